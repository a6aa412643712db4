//! Training-time augmentation: per-axis scaling, shifting, and rotation
//! about the vertical (z) axis, followed by re-normalization to the unit
//! box. The sampled transform is exposed so paired data (condition point
//! clouds) can be mapped through the identical affine map.

use super::{normalize_with_transform, Mesh, MeshError};
use crate::geom::Vec3;
use crate::rng::{rng_from_seed, SeedRng};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Sampling ranges for [`augment`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AugmentConfig {
    /// Per-axis scale factors drawn from this range.
    pub scale_range: (f64, f64),
    /// Per-axis translation drawn from +/- this bound.
    pub shift: f64,
    /// Rotation angle about z drawn from this range (radians).
    pub rotation_range: (f64, f64),
}

impl Default for AugmentConfig {
    fn default() -> Self {
        AugmentConfig {
            scale_range: (0.75, 1.25),
            shift: 0.1,
            rotation_range: (0.0, std::f64::consts::TAU),
        }
    }
}

impl AugmentConfig {
    /// Leaves the mesh unchanged up to re-normalization.
    pub fn identity() -> Self {
        AugmentConfig { scale_range: (1.0, 1.0), shift: 0.0, rotation_range: (0.0, 0.0) }
    }
}

/// Affine map `p -> L p + t` with linear part `L` (row-major 3x3).
#[derive(Debug, Clone, Copy)]
pub struct AffineTransform {
    pub linear: [[f64; 3]; 3],
    pub translation: Vec3,
}

impl AffineTransform {
    pub fn identity() -> Self {
        AffineTransform {
            linear: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            translation: Vec3::ZERO,
        }
    }

    /// The map used by unit-box normalization: center to origin, uniform
    /// scale by `1 / extent`.
    pub fn normalize(center: Vec3, extent: f64) -> Self {
        let s = 1.0 / extent;
        AffineTransform {
            linear: [[s, 0.0, 0.0], [0.0, s, 0.0], [0.0, 0.0, s]],
            translation: center.scale(-s),
        }
    }

    pub fn apply_point(&self, p: Vec3) -> Vec3 {
        let l = &self.linear;
        Vec3::new(
            l[0][0] * p.x + l[0][1] * p.y + l[0][2] * p.z + self.translation.x,
            l[1][0] * p.x + l[1][1] * p.y + l[1][2] * p.z + self.translation.y,
            l[2][0] * p.x + l[2][1] * p.y + l[2][2] * p.z + self.translation.z,
        )
    }

    /// Maps a surface normal through the inverse-transpose of the linear
    /// part and renormalizes. Valid for the diagonal-scale + z-rotation
    /// transforms sampled here (always invertible).
    pub fn apply_normal(&self, n: Vec3) -> Vec3 {
        let inv_t = invert3(&self.linear);
        // inverse-transpose: rows of the inverse become columns.
        let v = Vec3::new(
            inv_t[0][0] * n.x + inv_t[1][0] * n.y + inv_t[2][0] * n.z,
            inv_t[0][1] * n.x + inv_t[1][1] * n.y + inv_t[2][1] * n.z,
            inv_t[0][2] * n.x + inv_t[1][2] * n.y + inv_t[2][2] * n.z,
        );
        v.normalized().unwrap_or(n)
    }

    /// Composition: `self` after `first`.
    pub fn compose_after(&self, first: &AffineTransform) -> AffineTransform {
        let mut linear = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                linear[i][j] = (0..3).map(|k| self.linear[i][k] * first.linear[k][j]).sum();
            }
        }
        AffineTransform { linear, translation: self.apply_point(first.translation) }
    }

    /// Samples the augmentation transform (before re-normalization).
    pub fn sample(config: &AugmentConfig, rng: &mut SeedRng) -> AffineTransform {
        let mut scale = [0.0f64; 3];
        for s in scale.iter_mut() {
            *s = sample_range(rng, config.scale_range.0, config.scale_range.1);
        }
        let mut shift = [0.0f64; 3];
        for t in shift.iter_mut() {
            *t = sample_range(rng, -config.shift, config.shift);
        }
        let angle = sample_range(rng, config.rotation_range.0, config.rotation_range.1);
        let (sin, cos) = angle.sin_cos();
        // Rotate about z after per-axis scaling, then shift.
        let rot = [[cos, -sin, 0.0], [sin, cos, 0.0], [0.0, 0.0, 1.0]];
        let mut linear = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                linear[i][j] = rot[i][j] * scale[j];
            }
        }
        AffineTransform { linear, translation: Vec3::from(shift) }
    }
}

fn sample_range(rng: &mut SeedRng, lo: f64, hi: f64) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..hi)
    }
}

fn invert3(m: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    let inv_det = 1.0 / det;
    let mut out = [[0.0; 3]; 3];
    out[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) * inv_det;
    out[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) * inv_det;
    out[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) * inv_det;
    out[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) * inv_det;
    out[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) * inv_det;
    out[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) * inv_det;
    out[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) * inv_det;
    out[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) * inv_det;
    out[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * inv_det;
    out
}

/// Applies a seeded random scale/shift/z-rotation to a normalized mesh and
/// re-normalizes the result to the unit box. Deterministic given the seed.
pub fn augment(mesh: &Mesh, rng_seed: u64, config: &AugmentConfig) -> Result<Mesh, MeshError> {
    let mut rng = rng_from_seed(rng_seed);
    let t = AffineTransform::sample(config, &mut rng);
    let vertices = mesh.vertices.iter().map(|&v| t.apply_point(v)).collect();
    let moved = Mesh { vertices, faces: mesh.faces.clone() };
    let (out, _) = normalize_with_transform(&moved)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::normalize_to_unit_box;

    fn sample_mesh() -> Mesh {
        Mesh::new(
            vec![
                Vec3::new(-0.5, -0.25, -0.1),
                Vec3::new(0.5, -0.25, -0.1),
                Vec3::new(0.5, 0.25, -0.1),
                Vec3::new(-0.5, 0.25, 0.1),
            ],
            vec![[0, 1, 2], [0, 2, 3]],
        )
        .unwrap()
    }

    #[test]
    fn identity_config_is_renormalization_only() {
        let m = normalize_to_unit_box(&sample_mesh()).unwrap();
        let a = augment(&m, 9, &AugmentConfig::identity()).unwrap();
        for (u, v) in m.vertices.iter().zip(&a.vertices) {
            assert!(u.sub(*v).norm() < 1e-12);
        }
    }

    #[test]
    fn quarter_turn_swaps_xy_extents() {
        let m = normalize_to_unit_box(&sample_mesh()).unwrap();
        let cfg = AugmentConfig {
            scale_range: (1.0, 1.0),
            shift: 0.0,
            rotation_range: (std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2),
        };
        let a = augment(&m, 3, &cfg).unwrap();
        let bb = a.aabb().unwrap();
        let e = bb.extents();
        // Original box is 1.0 x 0.5; rotated by pi/2 it becomes 0.5 x 1.0,
        // re-normalized back to extents (0.5, 1.0).
        assert!((e.x - 0.5).abs() < 1e-9, "x extent {}", e.x);
        assert!((e.y - 1.0).abs() < 1e-9, "y extent {}", e.y);
    }

    #[test]
    fn same_seed_same_output() {
        let m = normalize_to_unit_box(&sample_mesh()).unwrap();
        let cfg = AugmentConfig::default();
        let a = augment(&m, 1234, &cfg).unwrap();
        let b = augment(&m, 1234, &cfg).unwrap();
        assert_eq!(a.vertices, b.vertices);
        let c = augment(&m, 1235, &cfg).unwrap();
        assert_ne!(a.vertices, c.vertices);
    }

    #[test]
    fn normal_map_matches_rotation() {
        let mut rng = rng_from_seed(5);
        let cfg = AugmentConfig {
            scale_range: (1.0, 1.0),
            shift: 0.0,
            rotation_range: (0.3, 0.3),
        };
        let t = AffineTransform::sample(&cfg, &mut rng);
        // For a pure rotation the normal transforms like a point direction.
        let n = Vec3::new(1.0, 0.0, 0.0);
        let expected = t.apply_point(n);
        let got = t.apply_normal(n);
        assert!(got.sub(expected).norm() < 1e-12);
    }
}
