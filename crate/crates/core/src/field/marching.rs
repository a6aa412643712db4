//! Marching cubes over an [`SdfGrid`] with the standard 256-case table and
//! linear edge interpolation. Crossing vertices are welded by global grid
//! edge, so closed surfaces come out closed: every interior edge is shared
//! by exactly two triangles.

use super::tables::{CORNER_OFFSETS, EDGE_CONNECTIONS, EDGE_TABLE, TRIANGLE_TABLE};
use super::{FieldError, SdfGrid};
use crate::geom::Vec3;
use crate::mesh::Mesh;
use std::collections::HashMap;

pub fn marching_cubes(grid: &SdfGrid, iso: f64) -> Result<Mesh, FieldError> {
    let r = grid.resolution;
    let mut vertices: Vec<Vec3> = Vec::new();
    let mut faces: Vec<[usize; 3]> = Vec::new();
    // (global index of the edge's lower lattice point, axis) -> vertex id
    let mut edge_vertices: HashMap<(usize, u8), usize> = HashMap::new();

    for z in 0..r - 1 {
        for y in 0..r - 1 {
            for x in 0..r - 1 {
                let mut corner_values = [0.0f64; 8];
                let mut case = 0usize;
                for (i, off) in CORNER_OFFSETS.iter().enumerate() {
                    let v = grid.value(x + off[0], y + off[1], z + off[2]);
                    corner_values[i] = v;
                    if v < iso {
                        case |= 1 << i;
                    }
                }
                if EDGE_TABLE[case] == 0 {
                    continue;
                }

                let mut cell_edge_vertex = [usize::MAX; 12];
                for (edge, &[c0, c1]) in EDGE_CONNECTIONS.iter().enumerate() {
                    if EDGE_TABLE[case] & (1 << edge) == 0 {
                        continue;
                    }
                    let g0 = [
                        x + CORNER_OFFSETS[c0][0],
                        y + CORNER_OFFSETS[c0][1],
                        z + CORNER_OFFSETS[c0][2],
                    ];
                    let g1 = [
                        x + CORNER_OFFSETS[c1][0],
                        y + CORNER_OFFSETS[c1][1],
                        z + CORNER_OFFSETS[c1][2],
                    ];
                    // Canonical direction: from the lexicographically lower
                    // lattice point, so both adjacent cells interpolate
                    // identically.
                    let (lo, hi, v_lo, v_hi) = if g0 <= g1 {
                        (g0, g1, corner_values[c0], corner_values[c1])
                    } else {
                        (g1, g0, corner_values[c1], corner_values[c0])
                    };
                    let axis = if lo[0] != hi[0] {
                        0u8
                    } else if lo[1] != hi[1] {
                        1
                    } else {
                        2
                    };
                    let key = (grid.index(lo[0], lo[1], lo[2]), axis);
                    let id = *edge_vertices.entry(key).or_insert_with(|| {
                        let denom = v_hi - v_lo;
                        let t = if denom.abs() < 1e-300 {
                            0.5
                        } else {
                            ((iso - v_lo) / denom).clamp(0.0, 1.0)
                        };
                        let p0 = grid.point(lo[0], lo[1], lo[2]);
                        let p1 = grid.point(hi[0], hi[1], hi[2]);
                        vertices.push(p0.add(p1.sub(p0).scale(t)));
                        vertices.len() - 1
                    });
                    cell_edge_vertex[edge] = id;
                }

                let tri = &TRIANGLE_TABLE[case];
                let mut k = 0;
                while k < 15 && tri[k] >= 0 {
                    let a = cell_edge_vertex[tri[k] as usize];
                    let b = cell_edge_vertex[tri[k + 1] as usize];
                    let c = cell_edge_vertex[tri[k + 2] as usize];
                    debug_assert!(a != usize::MAX && b != usize::MAX && c != usize::MAX);
                    // Table winding faces the inside (value < iso); flip so
                    // normals point outward from the negative region.
                    faces.push([a, c, b]);
                    k += 3;
                }
            }
        }
    }

    if faces.is_empty() {
        return Err(FieldError::EmptySurface { iso });
    }
    Ok(Mesh { vertices, faces })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toydata::{signed_volume, watertight_audit};

    fn sphere_grid(radius: f64, resolution: usize) -> SdfGrid {
        SdfGrid::from_fn(resolution, |p| p.norm() - radius)
    }

    #[test]
    fn sphere_is_closed_manifold_with_euler_two() {
        for resolution in [16usize, 32, 48] {
            let g = sphere_grid(0.4, resolution);
            let m = marching_cubes(&g, 0.0).unwrap();
            assert!(watertight_audit(&m), "R={resolution} not watertight");
            let mut edges = std::collections::HashSet::new();
            for f in &m.faces {
                for k in 0..3 {
                    let (a, b) = (f[k], f[(k + 1) % 3]);
                    edges.insert((a.min(b), a.max(b)));
                }
            }
            let euler = m.vertices.len() as i64 - edges.len() as i64 + m.faces.len() as i64;
            assert_eq!(euler, 2, "R={resolution}");

            let diag = g.cell_diagonal();
            for v in &m.vertices {
                assert!(
                    (v.norm() - 0.4).abs() <= diag,
                    "R={resolution}: radial error {} > {diag}",
                    (v.norm() - 0.4).abs()
                );
            }
            assert!(signed_volume(&m) > 0.0, "R={resolution} inverted orientation");
        }
    }

    #[test]
    fn all_positive_grid_is_empty_surface() {
        let g = SdfGrid::from_fn(8, |_| 1.0);
        assert!(matches!(marching_cubes(&g, 0.0), Err(FieldError::EmptySurface { .. })));
    }

    #[test]
    fn cube_sdf_bbox_within_one_cell() {
        // Analytic SDF of the axis-aligned cube [-0.35, 0.35]^3.
        let h = 0.35;
        let g = SdfGrid::from_fn(32, |p| {
            let q = Vec3::new(p.x.abs() - h, p.y.abs() - h, p.z.abs() - h);
            let outside = Vec3::new(q.x.max(0.0), q.y.max(0.0), q.z.max(0.0)).norm();
            let inside = q.x.max(q.y).max(q.z).min(0.0);
            outside + inside
        });
        let m = marching_cubes(&g, 0.0).unwrap();
        let bb = m.aabb().unwrap();
        for (lo, hi) in [(bb.min.x, bb.max.x), (bb.min.y, bb.max.y), (bb.min.z, bb.max.z)] {
            assert!((lo + h).abs() <= g.cell_size, "lo {lo}");
            assert!((hi - h).abs() <= g.cell_size, "hi {hi}");
        }
        assert!(watertight_audit(&m));
    }

    #[test]
    fn toy_mesh_through_sdf_and_mc_stays_close() {
        let (train, _) = crate::toydata::generate_corpus(10, 33, 0.1);
        let item = &train[0];
        let g = crate::field::mesh_to_sdf_grid(&item.mesh, 32).unwrap();
        let m = marching_cubes(&g, 0.0).unwrap();
        assert!(watertight_audit(&m));
        // Every reconstructed vertex lies within a cell diagonal of the
        // true surface.
        let diag = g.cell_diagonal();
        for v in m.vertices.iter().step_by(7) {
            let d = item
                .mesh
                .faces
                .iter()
                .map(|&f| {
                    let [a, b, c] = item.mesh.face_points(f);
                    crate::field::sdf::point_triangle_dist_sq(*v, a, b, c)
                })
                .fold(f64::INFINITY, f64::min)
                .sqrt();
            assert!(d <= diag, "vertex {d} away from surface (diag {diag})");
        }
    }
}
