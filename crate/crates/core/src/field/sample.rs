//! Area-weighted surface sampling and Gaussian point-cloud corruption.

use super::{FieldError, PointCloud};
use crate::geom::Vec3;
use crate::mesh::Mesh;
use crate::rng::{rng_from_seed, standard_normal};
use rand::Rng;

/// Samples `n_points` uniformly by area; each point carries the flat
/// normal of its source triangle. Deterministic given the seed.
pub fn sample_surface_points(
    mesh: &Mesh,
    n_points: usize,
    rng_seed: u64,
) -> Result<PointCloud, FieldError> {
    assert!(n_points > 0);
    let mut cumulative = Vec::with_capacity(mesh.faces.len());
    let mut normals = Vec::with_capacity(mesh.faces.len());
    let mut total = 0.0;
    for &f in &mesh.faces {
        let [a, b, c] = mesh.face_points(f);
        let cross = b.sub(a).cross(c.sub(a));
        let area = cross.norm() * 0.5;
        total += area;
        cumulative.push(total);
        normals.push(cross.normalized().unwrap_or(Vec3::new(0.0, 0.0, 1.0)));
    }
    if total <= 0.0 {
        return Err(FieldError::ZeroArea);
    }

    let mut rng = rng_from_seed(rng_seed);
    let mut points = Vec::with_capacity(n_points);
    let mut point_normals = Vec::with_capacity(n_points);
    for _ in 0..n_points {
        let target: f64 = rng.gen::<f64>() * total;
        let fi = cumulative.partition_point(|&c| c < target).min(mesh.faces.len() - 1);
        let [a, b, c] = mesh.face_points(mesh.faces[fi]);
        // Uniform barycentric via the sqrt trick.
        let r1: f64 = rng.gen();
        let r2: f64 = rng.gen();
        let s = r1.sqrt();
        let (wa, wb, wc) = (1.0 - s, s * (1.0 - r2), s * r2);
        points.push(a.scale(wa).add(b.scale(wb)).add(c.scale(wc)));
        point_normals.push(normals[fi]);
    }
    Ok(PointCloud { points, normals: point_normals })
}

/// Adds `scale * N(0, I)` to every position and normal (normals are
/// re-normalized afterwards). `scale = 0` returns the cloud unchanged.
pub fn add_point_noise(cloud: &PointCloud, scale: f64, rng_seed: u64) -> PointCloud {
    assert!(scale >= 0.0);
    if scale == 0.0 {
        return cloud.clone();
    }
    let mut rng = rng_from_seed(rng_seed);
    let mut draw = |v: Vec3| {
        Vec3::new(
            v.x + scale * standard_normal(&mut rng),
            v.y + scale * standard_normal(&mut rng),
            v.z + scale * standard_normal(&mut rng),
        )
    };
    let points: Vec<Vec3> = cloud.points.iter().map(|&p| draw(p)).collect();
    let normals = cloud
        .normals
        .iter()
        .map(|&n| draw(n).normalized().unwrap_or(n))
        .collect();
    PointCloud { points, normals }
}
