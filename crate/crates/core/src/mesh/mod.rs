//! Triangle-mesh representation, normalization, coordinate quantization,
//! canonical ordering, and training-time augmentation.
//!
//! Conventions: z is the vertical axis; vertices sort ascending by (z, y, x);
//! faces sort by their lowest vertex index, then the remaining indices
//! ascending; within a face the lowest index comes first with the cyclic
//! orientation preserved, so winding survives canonicalization.

mod augment;
mod obj;

pub use augment::{augment, AffineTransform, AugmentConfig};
pub use obj::{load_obj, save_obj, write_obj};

use crate::geom::{Aabb, Vec3};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("mesh has {n_vertices} vertices and {n_faces} faces; need >= 3 and >= 1")]
    TooSmall { n_vertices: usize, n_faces: usize },
    #[error("face {face} references vertex {index} but there are only {n_vertices} vertices")]
    IndexOutOfRange { face: usize, index: usize, n_vertices: usize },
    #[error("face {face} repeats a vertex index")]
    DegenerateFace { face: usize },
    #[error("mesh bounding box has zero extent; cannot normalize")]
    DegenerateExtent,
    #[error("coordinate {value} outside [-0.5, 0.5] at vertex {vertex}")]
    CoordinateOutOfRange { vertex: usize, value: f64 },
    #[error("bin {bin} out of range for {n_bins} bins at vertex {vertex}")]
    BinOutOfRange { vertex: usize, bin: u32, n_bins: u32 },
    #[error("vertices {a} and {b} share bin {bin:?}; quantization should have merged them")]
    DuplicateVertexBins { a: usize, b: usize, bin: [u32; 3] },
}

/// Continuous triangle mesh: vertex positions plus index triples.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<Vec3>,
    pub faces: Vec<[usize; 3]>,
}

impl Mesh {
    /// Builds a mesh and checks the structural invariants.
    pub fn new(vertices: Vec<Vec3>, faces: Vec<[usize; 3]>) -> Result<Mesh, MeshError> {
        let mesh = Mesh { vertices, faces };
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn validate(&self) -> Result<(), MeshError> {
        if self.vertices.len() < 3 || self.faces.is_empty() {
            return Err(MeshError::TooSmall {
                n_vertices: self.vertices.len(),
                n_faces: self.faces.len(),
            });
        }
        for (fi, f) in self.faces.iter().enumerate() {
            for &i in f {
                if i >= self.vertices.len() {
                    return Err(MeshError::IndexOutOfRange {
                        face: fi,
                        index: i,
                        n_vertices: self.vertices.len(),
                    });
                }
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(MeshError::DegenerateFace { face: fi });
            }
        }
        Ok(())
    }

    pub fn aabb(&self) -> Option<Aabb> {
        Aabb::from_points(self.vertices.iter())
    }

    /// Positions of a face's three corners.
    pub fn face_points(&self, f: [usize; 3]) -> [Vec3; 3] {
        [self.vertices[f[0]], self.vertices[f[1]], self.vertices[f[2]]]
    }

    /// Sum of triangle areas.
    pub fn surface_area(&self) -> f64 {
        self.faces
            .iter()
            .map(|&f| {
                let [a, b, c] = self.face_points(f);
                b.sub(a).cross(c.sub(a)).norm() * 0.5
            })
            .sum()
    }
}

/// Coordinate-quantized mesh. Vertices are integer bin triples in
/// `[0, n_bins)` stored as `[x, y, z]`; `canonical` is only set by
/// [`canonicalize`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantizedMesh {
    pub vertices: Vec<[u32; 3]>,
    pub faces: Vec<[usize; 3]>,
    pub n_bins: u32,
    pub canonical: bool,
}

impl QuantizedMesh {
    /// Sort key for a vertex: (z, y, x) ascending.
    pub fn zyx_key(v: [u32; 3]) -> [u32; 3] {
        [v[2], v[1], v[0]]
    }
}

/// Scales and centers so the bounding box's longest axis spans exactly
/// [-0.5, 0.5] with the box center at the origin.
pub fn normalize_to_unit_box(mesh: &Mesh) -> Result<Mesh, MeshError> {
    let (out, _) = normalize_with_transform(mesh)?;
    Ok(out)
}

/// As [`normalize_to_unit_box`], also returning the applied transform so a
/// paired point cloud can follow the same map.
pub fn normalize_with_transform(mesh: &Mesh) -> Result<(Mesh, AffineTransform), MeshError> {
    let bb = mesh.aabb().ok_or(MeshError::TooSmall {
        n_vertices: 0,
        n_faces: mesh.faces.len(),
    })?;
    let extent = bb.max_extent();
    if extent <= 0.0 {
        return Err(MeshError::DegenerateExtent);
    }
    let t = AffineTransform::normalize(bb.center(), extent);
    // Rounding can overshoot the box by an ulp; the contract is exact.
    let clamp = |v: Vec3| {
        Vec3::new(
            v.x.clamp(-0.5, 0.5),
            v.y.clamp(-0.5, 0.5),
            v.z.clamp(-0.5, 0.5),
        )
    };
    let vertices = mesh.vertices.iter().map(|&v| clamp(t.apply_point(v))).collect();
    Ok((Mesh { vertices, faces: mesh.faces.clone() }, t))
}

/// Quantizes coordinates in [-0.5, 0.5] to `n_bins` bins per axis:
/// `bin = clamp(floor((v + 0.5) * n_bins), 0, n_bins - 1)`. Vertices that
/// land in the same bin triple are merged and faces left degenerate by the
/// merge are dropped.
pub fn quantize(mesh: &Mesh, n_bins: u32) -> Result<QuantizedMesh, MeshError> {
    assert!(n_bins > 0, "n_bins must be positive");
    let mut bins = Vec::with_capacity(mesh.vertices.len());
    for (vi, v) in mesh.vertices.iter().enumerate() {
        let mut triple = [0u32; 3];
        for (k, &c) in v.as_array().iter().enumerate() {
            if !(-0.5..=0.5).contains(&c) {
                return Err(MeshError::CoordinateOutOfRange { vertex: vi, value: c });
            }
            let b = ((c + 0.5) * n_bins as f64).floor();
            triple[k] = (b.max(0.0) as u32).min(n_bins - 1);
        }
        bins.push(triple);
    }

    // Merge identical bin triples, keeping first-seen order.
    let mut remap = Vec::with_capacity(bins.len());
    let mut unique: Vec<[u32; 3]> = Vec::new();
    let mut seen = std::collections::HashMap::new();
    for &b in &bins {
        let id = *seen.entry(b).or_insert_with(|| {
            unique.push(b);
            unique.len() - 1
        });
        remap.push(id);
    }

    let faces = mesh
        .faces
        .iter()
        .map(|f| [remap[f[0]], remap[f[1]], remap[f[2]]])
        .filter(|f| f[0] != f[1] && f[1] != f[2] && f[0] != f[2])
        .collect();

    Ok(QuantizedMesh { vertices: unique, faces, n_bins, canonical: false })
}

/// Maps bins back to coordinates at bin centers:
/// `v = (bin + 0.5) / n_bins - 0.5`.
pub fn dequantize(qmesh: &QuantizedMesh) -> Mesh {
    let n = qmesh.n_bins as f64;
    let vertices = qmesh
        .vertices
        .iter()
        .map(|b| {
            Vec3::new(
                (b[0] as f64 + 0.5) / n - 0.5,
                (b[1] as f64 + 0.5) / n - 0.5,
                (b[2] as f64 + 0.5) / n - 0.5,
            )
        })
        .collect();
    Mesh { vertices, faces: qmesh.faces.clone() }
}

/// Rewrites the mesh into canonical form: vertices strictly ascending by
/// (z, y, x); within each face the lowest index first, cyclic orientation
/// preserved; faces sorted by lowest index then remaining indices ascending.
/// Idempotent, and invariant under any permutation of the input.
pub fn canonicalize(qmesh: &QuantizedMesh) -> Result<QuantizedMesh, MeshError> {
    let n = qmesh.vertices.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| QuantizedMesh::zyx_key(qmesh.vertices[i]));

    for w in order.windows(2) {
        let (a, b) = (w[0], w[1]);
        if qmesh.vertices[a] == qmesh.vertices[b] {
            return Err(MeshError::DuplicateVertexBins { a, b, bin: qmesh.vertices[a] });
        }
    }

    let mut remap = vec![0usize; n];
    for (new_i, &old_i) in order.iter().enumerate() {
        remap[old_i] = new_i;
    }
    let vertices: Vec<[u32; 3]> = order.iter().map(|&i| qmesh.vertices[i]).collect();

    let mut faces: Vec<[usize; 3]> = qmesh
        .faces
        .iter()
        .map(|f| rotate_lowest_first([remap[f[0]], remap[f[1]], remap[f[2]]]))
        .collect();
    faces.sort_by_key(|&f| sorted_triple(f));

    Ok(QuantizedMesh { vertices, faces, n_bins: qmesh.n_bins, canonical: true })
}

/// Cyclic rotation putting the smallest index first.
fn rotate_lowest_first(f: [usize; 3]) -> [usize; 3] {
    if f[0] <= f[1] && f[0] <= f[2] {
        f
    } else if f[1] <= f[2] {
        [f[1], f[2], f[0]]
    } else {
        [f[2], f[0], f[1]]
    }
}

fn sorted_triple(f: [usize; 3]) -> [usize; 3] {
    let mut s = f;
    s.sort_unstable();
    s
}

/// Keeps meshes with at most `max_faces` faces, preserving order.
pub fn filter_by_face_count(meshes: Vec<Mesh>, max_faces: usize) -> Vec<Mesh> {
    meshes.into_iter().filter(|m| m.faces.len() <= max_faces).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri(vertices: Vec<Vec3>, faces: Vec<[usize; 3]>) -> Mesh {
        Mesh::new(vertices, faces).unwrap()
    }

    fn unit_cube_corners(lo: f64, hi: f64) -> Vec<Vec3> {
        let mut v = Vec::new();
        for &z in &[lo, hi] {
            for &y in &[lo, hi] {
                for &x in &[lo, hi] {
                    v.push(Vec3::new(x, y, z));
                }
            }
        }
        v
    }

    #[test]
    fn normalize_cube_to_unit_box() {
        let m = tri(unit_cube_corners(0.0, 2.0), vec![[0, 1, 2]]);
        let n = normalize_to_unit_box(&m).unwrap();
        let bb = n.aabb().unwrap();
        assert_eq!(bb.min, Vec3::new(-0.5, -0.5, -0.5));
        assert_eq!(bb.max, Vec3::new(0.5, 0.5, 0.5));
    }

    #[test]
    fn normalize_preserves_aspect_ratio() {
        // 2 x 1 x 1 box spans [-0.5,0.5] x [-0.25,0.25] x [-0.25,0.25].
        let mut vs = Vec::new();
        for &z in &[0.0, 1.0] {
            for &y in &[0.0, 1.0] {
                for &x in &[0.0, 2.0] {
                    vs.push(Vec3::new(x, y, z));
                }
            }
        }
        let m = tri(vs, vec![[0, 1, 2]]);
        let n = normalize_to_unit_box(&m).unwrap();
        let bb = n.aabb().unwrap();
        assert_eq!(bb.min, Vec3::new(-0.5, -0.25, -0.25));
        assert_eq!(bb.max, Vec3::new(0.5, 0.25, 0.25));
    }

    #[test]
    fn normalize_is_idempotent_and_scale_invariant() {
        let m = tri(
            vec![
                Vec3::new(0.3, 1.9, -2.0),
                Vec3::new(4.0, 0.0, 1.0),
                Vec3::new(-1.0, 2.5, 0.7),
            ],
            vec![[0, 1, 2]],
        );
        let n1 = normalize_to_unit_box(&m).unwrap();
        let n2 = normalize_to_unit_box(&n1).unwrap();
        for (a, b) in n1.vertices.iter().zip(&n2.vertices) {
            assert!(a.sub(*b).norm() < 1e-12);
        }
        let scaled = Mesh {
            vertices: m.vertices.iter().map(|v| v.scale(3.7)).collect(),
            faces: m.faces.clone(),
        };
        let ns = normalize_to_unit_box(&scaled).unwrap();
        for (a, b) in n1.vertices.iter().zip(&ns.vertices) {
            assert!(a.sub(*b).norm() < 1e-12);
        }
        // Longest axis hits +/-0.5 exactly on recompute.
        let bb = n1.aabb().unwrap();
        assert!((bb.max_extent() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn normalize_rejects_degenerate() {
        let m = tri(
            vec![Vec3::ZERO, Vec3::ZERO, Vec3::ZERO],
            vec![[0, 1, 2]],
        );
        assert!(matches!(normalize_to_unit_box(&m), Err(MeshError::DegenerateExtent)));
    }

    #[test]
    fn quantize_boundary_bins() {
        let m = tri(
            vec![
                Vec3::new(-0.5, -0.5, -0.5),
                Vec3::new(0.5, 0.5, 0.5),
                Vec3::new(0.0, 0.0, 0.0),
            ],
            vec![[0, 1, 2]],
        );
        let q = quantize(&m, 128).unwrap();
        assert_eq!(q.vertices[0], [0, 0, 0]);
        assert_eq!(q.vertices[1], [127, 127, 127]);
        assert_eq!(q.vertices[2], [64, 64, 64]);
    }

    #[test]
    fn quantize_rejects_out_of_range() {
        let m = tri(
            vec![Vec3::new(0.6, 0.0, 0.0), Vec3::ZERO, Vec3::new(0.1, 0.1, 0.1)],
            vec![[0, 1, 2]],
        );
        assert!(matches!(
            quantize(&m, 128),
            Err(MeshError::CoordinateOutOfRange { vertex: 0, .. })
        ));
    }

    #[test]
    fn quantize_merges_near_duplicates_and_drops_slivers() {
        // Two vertices 1e-9 apart fall into the same bin; the sliver face
        // using both collapses and is dropped.
        let m = tri(
            vec![
                Vec3::new(0.1, 0.1, 0.1),
                Vec3::new(0.1 + 1e-9, 0.1, 0.1),
                Vec3::new(-0.3, 0.2, 0.0),
                Vec3::new(0.4, -0.4, 0.3),
            ],
            vec![[0, 1, 2], [0, 2, 3]],
        );
        let q = quantize(&m, 128).unwrap();
        assert_eq!(q.vertices.len(), 3);
        assert_eq!(q.faces.len(), 1);
    }

    #[test]
    fn dequantize_bin_centers() {
        let q = QuantizedMesh {
            vertices: vec![[0, 0, 0], [64, 64, 64], [127, 0, 5]],
            faces: vec![[0, 1, 2]],
            n_bins: 128,
            canonical: false,
        };
        let m = dequantize(&q);
        assert_eq!(m.vertices[0].x, -0.49609375);
        assert_eq!(m.vertices[1].x, 0.00390625);
        assert_eq!(m.vertices[2].x, 0.49609375);
    }

    #[test]
    fn quantize_dequantize_roundtrip() {
        let q = QuantizedMesh {
            vertices: vec![[0, 3, 9], [64, 64, 64], [127, 0, 5]],
            faces: vec![[0, 1, 2]],
            n_bins: 128,
            canonical: false,
        };
        let rq = quantize(&dequantize(&q), 128).unwrap();
        assert_eq!(rq.vertices, q.vertices);
        assert_eq!(rq.faces, q.faces);
    }

    #[test]
    fn canonicalize_sorts_and_rotates() {
        // A=(0,0,0), B=(1,0,0), C=(0,1,0) given as (C, B, A): sorted by
        // (z,y,x) the order becomes A, B, C and the face starts at A.
        let q = QuantizedMesh {
            vertices: vec![[0, 1, 0], [1, 0, 0], [0, 0, 0]],
            faces: vec![[0, 1, 2]],
            n_bins: 128,
            canonical: false,
        };
        let c = canonicalize(&q).unwrap();
        assert_eq!(c.vertices, vec![[0, 0, 0], [1, 0, 0], [0, 1, 0]]);
        // Original cycle C->B->A preserved, rotated to start at A.
        assert_eq!(c.faces, vec![[0, 2, 1]]);
        assert!(c.canonical);
    }

    #[test]
    fn canonicalize_idempotent_and_permutation_invariant() {
        let base = QuantizedMesh {
            vertices: vec![[0, 0, 0], [5, 1, 0], [2, 7, 0], [4, 4, 6]],
            faces: vec![[0, 1, 2], [1, 3, 2]],
            n_bins: 16,
            canonical: false,
        };
        let canon = canonicalize(&base).unwrap();
        let again = canonicalize(&canon).unwrap();
        assert_eq!(canon, again);

        // All 3! vertex orders x 3 cyclic rotations of each face give the
        // same canonical output.
        let perms3 = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let single = QuantizedMesh {
            vertices: vec![[0, 0, 0], [3, 1, 2], [1, 5, 4]],
            faces: vec![[0, 1, 2]],
            n_bins: 8,
            canonical: false,
        };
        let expected = canonicalize(&single).unwrap();
        for perm in perms3 {
            let mut inv = [0usize; 3];
            for (new_i, &old_i) in perm.iter().enumerate() {
                inv[old_i] = new_i;
            }
            for rot in 0..3 {
                let vertices: Vec<[u32; 3]> = perm.iter().map(|&i| single.vertices[i]).collect();
                let f = single.faces[0];
                let rotated = [f[rot % 3], f[(rot + 1) % 3], f[(rot + 2) % 3]];
                let faces = vec![[inv[rotated[0]], inv[rotated[1]], inv[rotated[2]]]];
                let q = QuantizedMesh { vertices, faces, n_bins: 8, canonical: false };
                assert_eq!(canonicalize(&q).unwrap(), expected);
            }
        }
    }

    #[test]
    fn canonicalize_rejects_duplicate_bins() {
        let q = QuantizedMesh {
            vertices: vec![[1, 2, 3], [1, 2, 3], [0, 0, 0]],
            faces: vec![[0, 1, 2]],
            n_bins: 8,
            canonical: false,
        };
        assert!(matches!(canonicalize(&q), Err(MeshError::DuplicateVertexBins { .. })));
    }

    #[test]
    fn face_count_filter_boundary() {
        let small = tri(
            vec![Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0)],
            vec![[0, 1, 2]],
        );
        let mut two = small.clone();
        two.faces.push([0, 2, 1]);
        let kept = filter_by_face_count(vec![small.clone(), two.clone()], 1);
        assert_eq!(kept.len(), 1);
        let kept = filter_by_face_count(vec![small, two], 2);
        assert_eq!(kept.len(), 2);
        assert!(filter_by_face_count(vec![], 10).is_empty());
    }
}
