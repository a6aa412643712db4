//! Signed distance to a watertight triangle mesh, sampled on the padded
//! unit-box grid. Unsigned distance is exact point-to-triangle distance;
//! the sign comes from ray-crossing parity voted across the three axis
//! directions. Ray origins are nudged off the lattice so axis-aligned
//! faces are not grazed.

use super::{FieldError, SdfGrid};
use crate::geom::Vec3;
use crate::mesh::Mesh;

const PARITY_DISAGREE_THRESHOLD: f64 = 0.01;

/// All three axis rays start from the grid point nudged by this offset, so
/// lattice points that land exactly on a mesh plane get one consistent
/// side instead of an ulp-level coin flip per axis. Components are
/// distinct irrational-ish values far below any cell size.
const RAY_ORIGIN_JITTER: Vec3 = Vec3 { x: 3.180_339e-7, y: 7.071_067e-7, z: 5.477_225e-7 };

pub fn mesh_to_sdf_grid(mesh: &Mesh, resolution: usize) -> Result<SdfGrid, FieldError> {
    mesh.validate()?;
    let triangles: Vec<[Vec3; 3]> = mesh.faces.iter().map(|&f| mesh.face_points(f)).collect();
    // Projected 2D bounds per triangle and axis, for cheap ray rejection.
    let bounds: Vec<[[f64; 4]; 3]> = triangles
        .iter()
        .map(|t| {
            let mut b = [[0.0; 4]; 3];
            for axis in 0..3 {
                let (u, v) = perpendicular_axes(axis);
                let us = [component(t[0], u), component(t[1], u), component(t[2], u)];
                let vs = [component(t[0], v), component(t[1], v), component(t[2], v)];
                b[axis] = [
                    us.iter().cloned().fold(f64::INFINITY, f64::min),
                    us.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
                    vs.iter().cloned().fold(f64::INFINITY, f64::min),
                    vs.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
                ];
            }
            b
        })
        .collect();

    let r = resolution;
    let mut grid = SdfGrid::from_fn(r, |p| {
        let mut best = f64::INFINITY;
        for t in &triangles {
            let d = point_triangle_dist_sq(p, t[0], t[1], t[2]);
            if d < best {
                best = d;
            }
        }
        best.sqrt()
    });

    // Parity votes; disagreement between the three axes marks grazing or
    // non-watertight geometry.
    let mut votes = vec![0u8; grid.values.len()];
    crate::parallel::fill_indexed(&mut votes, |i| {
        let x = i % r;
        let y = (i / r) % r;
        let z = i / (r * r);
        let p = grid_point(&grid, x, y, z).add(RAY_ORIGIN_JITTER);
        let mut v = 0u8;
        for axis in 0..3 {
            if ray_parity(p, axis, &triangles, &bounds) {
                v += 1;
            }
        }
        v
    });

    let disagree = votes.iter().filter(|&&v| v == 1 || v == 2).count();
    let disagree_fraction = disagree as f64 / votes.len() as f64;
    if disagree_fraction > PARITY_DISAGREE_THRESHOLD {
        return Err(FieldError::NonWatertight {
            disagree_fraction,
            threshold: PARITY_DISAGREE_THRESHOLD,
        });
    }

    for (value, &v) in grid.values.iter_mut().zip(&votes) {
        if v >= 2 {
            *value = -*value;
        }
    }
    Ok(grid)
}

fn grid_point(grid: &SdfGrid, x: usize, y: usize, z: usize) -> Vec3 {
    grid.point(x, y, z)
}

fn component(p: Vec3, axis: usize) -> f64 {
    match axis {
        0 => p.x,
        1 => p.y,
        _ => p.z,
    }
}

fn perpendicular_axes(axis: usize) -> (usize, usize) {
    match axis {
        0 => (1, 2),
        1 => (2, 0),
        _ => (0, 1),
    }
}

/// Parity of crossings of the ray from the (pre-jittered) point `p` along
/// `+axis`.
fn ray_parity(p: Vec3, axis: usize, triangles: &[[Vec3; 3]], bounds: &[[[f64; 4]; 3]]) -> bool {
    let (ua, va) = perpendicular_axes(axis);
    let u0 = component(p, ua);
    let v0 = component(p, va);
    let w0 = component(p, axis);

    let mut crossings = 0usize;
    for (t, b) in triangles.iter().zip(bounds) {
        let [umin, umax, vmin, vmax] = b[axis];
        if u0 < umin || u0 > umax || v0 < vmin || v0 > vmax {
            continue;
        }
        // 2D barycentric test in the (u, v) projection.
        let (au, av) = (component(t[0], ua), component(t[0], va));
        let (bu, bv) = (component(t[1], ua), component(t[1], va));
        let (cu, cv) = (component(t[2], ua), component(t[2], va));
        let d1 = (bu - au) * (v0 - av) - (bv - av) * (u0 - au);
        let d2 = (cu - bu) * (v0 - bv) - (cv - bv) * (u0 - bu);
        let d3 = (au - cu) * (v0 - cv) - (av - cv) * (u0 - cu);
        let has_neg = d1 < 0.0 || d2 < 0.0 || d3 < 0.0;
        let has_pos = d1 > 0.0 || d2 > 0.0 || d3 > 0.0;
        if has_neg && has_pos {
            continue;
        }
        let area2 = d1 + d2 + d3;
        if area2.abs() < 1e-30 {
            continue; // degenerate projection (triangle parallel to ray)
        }
        // Barycentric interpolation of the axis coordinate at (u0, v0).
        let wa = component(t[0], axis);
        let wb = component(t[1], axis);
        let wc = component(t[2], axis);
        let w_hit = (d2 * wa + d3 * wb + d1 * wc) / area2;
        if w_hit > w0 {
            crossings += 1;
        }
    }
    crossings % 2 == 1
}

/// Squared distance from `p` to triangle `abc` (Ericson, Real-Time
/// Collision Detection 5.1.5).
pub fn point_triangle_dist_sq(p: Vec3, a: Vec3, b: Vec3, c: Vec3) -> f64 {
    let ab = b.sub(a);
    let ac = c.sub(a);
    let ap = p.sub(a);

    let d1 = ab.dot(ap);
    let d2 = ac.dot(ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return ap.norm_sq();
    }

    let bp = p.sub(b);
    let d3 = ab.dot(bp);
    let d4 = ac.dot(bp);
    if d3 >= 0.0 && d4 <= d3 {
        return bp.norm_sq();
    }

    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return ap.sub(ab.scale(v)).norm_sq();
    }

    let cp = p.sub(c);
    let d5 = ab.dot(cp);
    let d6 = ac.dot(cp);
    if d6 >= 0.0 && d5 <= d6 {
        return cp.norm_sq();
    }

    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return ap.sub(ac.scale(w)).norm_sq();
    }

    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        let bc = c.sub(b);
        return bp.sub(bc.scale(w)).norm_sq();
    }

    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    let closest = a.add(ab.scale(v)).add(ac.scale(w));
    p.sub(closest).norm_sq()
}
