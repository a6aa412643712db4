//! Procedural low-poly corpus: watertight prismatic meshes with clean,
//! efficient topology and analytic sharp edges. Five families (box,
//! L-extrusion, tapered pyramid/frustum, fused prisms, stepped block), all
//! generated deterministically from a master seed.

use crate::geom::Vec3;
use crate::mesh::{normalize_to_unit_box, Mesh};
use crate::rng::{derive_seed, rng_from_seed, SeedRng};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Box,
    LExtrusion,
    Pyramid,
    FusedPrisms,
    SteppedBlock,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::Box,
        Family::LExtrusion,
        Family::Pyramid,
        Family::FusedPrisms,
        Family::SteppedBlock,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Box => "box",
            Family::LExtrusion => "l-extrusion",
            Family::Pyramid => "pyramid",
            Family::FusedPrisms => "fused-prisms",
            Family::SteppedBlock => "stepped-block",
        }
    }
}

/// Generation record for one corpus item.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ToySpec {
    pub family: Family,
    pub seed: u64,
    pub params: Vec<(String, f64)>,
}

#[derive(Debug, Clone)]
pub struct CorpusItem {
    pub spec: ToySpec,
    pub mesh: Mesh,
}

/// Deterministic corpus split into train and eval lists.
/// Families rotate round-robin so each contributes exactly ~20%.
pub fn generate_corpus(n: usize, seed: u64, split_ratio: f64) -> (Vec<CorpusItem>, Vec<CorpusItem>) {
    assert!(n >= 10, "corpus needs at least 10 items");
    assert!((0.0..1.0).contains(&split_ratio));
    let items: Vec<CorpusItem> = crate::parallel::map_collect(n, |i| {
        let family = Family::ALL[i % Family::ALL.len()];
        let item_seed = derive_seed(seed, "toy", i as u64);
        generate_one(family, item_seed)
    });

    let n_eval = (n as f64 * split_ratio).round() as usize;
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = rng_from_seed(derive_seed(seed, "split", 0));
    order.shuffle(&mut rng);

    let mut eval_flags = vec![false; n];
    for &i in order.iter().take(n_eval) {
        eval_flags[i] = true;
    }
    let mut train = Vec::with_capacity(n - n_eval);
    let mut eval = Vec::with_capacity(n_eval);
    for (item, is_eval) in items.into_iter().zip(eval_flags) {
        if is_eval {
            eval.push(item);
        } else {
            train.push(item);
        }
    }
    (train, eval)
}

/// Generates a single normalized watertight mesh for a family and seed.
pub fn generate_one(family: Family, seed: u64) -> CorpusItem {
    let mut rng = rng_from_seed(seed);
    let mut params = Vec::new();
    let p = |name: &str, rng: &mut SeedRng, lo: f64, hi: f64, params: &mut Vec<(String, f64)>| {
        let v = rng.gen_range(lo..hi);
        params.push((name.to_string(), v));
        v
    };

    let mesh = match family {
        Family::Box => {
            let w = p("w", &mut rng, 0.4, 1.0, &mut params);
            let d = p("d", &mut rng, 0.4, 1.0, &mut params);
            let h = p("h", &mut rng, 0.4, 1.0, &mut params);
            extrude_profile(&rect_profile(w, d), h, false)
        }
        Family::LExtrusion => {
            let w = p("w", &mut rng, 0.6, 1.0, &mut params);
            let d = p("d", &mut rng, 0.6, 1.0, &mut params);
            let notch_w = p("notch_w", &mut rng, 0.25 * w, 0.6 * w, &mut params);
            let notch_d = p("notch_d", &mut rng, 0.25 * d, 0.6 * d, &mut params);
            let h = p("h", &mut rng, 0.3, 0.9, &mut params);
            let profile = vec![
                [0.0, 0.0],
                [w, 0.0],
                [w, d - notch_d],
                [w - notch_w, d - notch_d],
                [w - notch_w, d],
                [0.0, d],
            ];
            extrude_profile(&profile, h, false)
        }
        Family::Pyramid => {
            let n = rng.gen_range(5..=8u32);
            params.push(("sides".into(), n as f64));
            let rx = p("rx", &mut rng, 0.3, 0.55, &mut params);
            let ry = p("ry", &mut rng, 0.3, 0.55, &mut params);
            let taper = p("taper", &mut rng, 0.3, 0.7, &mut params);
            let h = p("h", &mut rng, 0.4, 0.9, &mut params);
            frustum(n as usize, rx, ry, taper, h)
        }
        Family::FusedPrisms => {
            let a1 = p("a1", &mut rng, 0.35, 0.55, &mut params);
            let b1 = p("b1", &mut rng, 0.12, 0.25, &mut params);
            let a2 = p("a2", &mut rng, 0.10, 0.8 * a1, &mut params);
            let b2 = p("b2", &mut rng, 1.4 * b1, 0.6, &mut params);
            let h = p("h", &mut rng, 0.3, 0.8, &mut params);
            let plus = rng.gen_bool(0.5);
            params.push(("plus".into(), if plus { 1.0 } else { 0.0 }));
            let profile = if plus {
                // Plus: wide bar [-a1,a1]x[-b1,b1] fused with tall bar
                // [-a2,a2]x[-b2,b2].
                vec![
                    [a1, -b1],
                    [a1, b1],
                    [a2, b1],
                    [a2, b2],
                    [-a2, b2],
                    [-a2, b1],
                    [-a1, b1],
                    [-a1, -b1],
                    [-a2, -b1],
                    [-a2, -b2],
                    [a2, -b2],
                    [a2, -b1],
                ]
            } else {
                // T: stem only above the bar.
                vec![
                    [a1, -b1],
                    [a1, b1],
                    [a2, b1],
                    [a2, b2],
                    [-a2, b2],
                    [-a2, b1],
                    [-a1, b1],
                    [-a1, -b1],
                ]
            };
            extrude_profile(&profile, h, false)
        }
        Family::SteppedBlock => {
            let k = rng.gen_range(2..=4usize);
            params.push(("steps".into(), k as f64));
            let mut widths = Vec::with_capacity(k);
            let mut heights = Vec::with_capacity(k);
            for i in 0..k {
                widths.push(p(&format!("w{i}"), &mut rng, 0.15, 0.4, &mut params));
                heights.push(p(&format!("h{i}"), &mut rng, 0.15, 0.4, &mut params));
            }
            let depth = p("depth", &mut rng, 0.3, 0.8, &mut params);
            let total_w: f64 = widths.iter().sum();
            // Staircase in (x, y) of the profile plane; extrusion is rotated
            // so the profile's y becomes world z (steps ascend vertically).
            let mut profile = vec![[0.0, 0.0], [total_w, 0.0]];
            let mut x = total_w;
            let mut y = 0.0;
            for i in 0..k {
                y += heights[i];
                profile.push([x, y]);
                x -= widths[i];
                if i + 1 < k {
                    profile.push([x, y]);
                }
            }
            profile.push([0.0, y]);
            extrude_profile(&profile, depth, true)
        }
    };

    let mesh = normalize_to_unit_box(&mesh).expect("toy meshes are non-degenerate");
    CorpusItem { spec: ToySpec { family, seed, params }, mesh }
}

fn rect_profile(w: f64, d: f64) -> Vec<[f64; 2]> {
    vec![[0.0, 0.0], [w, 0.0], [w, d], [0.0, d]]
}

/// Extrudes a simple CCW polygon along +z into a closed prism. With
/// `upright`, the solid is rotated so the profile's y axis becomes world z.
fn extrude_profile(profile: &[[f64; 2]], height: f64, upright: bool) -> Mesh {
    let outline = ccw(profile);
    let v = outline.len();
    let cap = triangulate_polygon(&outline);

    let mut vertices = Vec::with_capacity(2 * v);
    for &[x, y] in &outline {
        vertices.push(Vec3::new(x, y, 0.0));
    }
    for &[x, y] in &outline {
        vertices.push(Vec3::new(x, y, height));
    }

    let mut faces = Vec::with_capacity(4 * v - 4);
    // Bottom cap faces -z: reverse the CCW triangulation.
    for &[a, b, c] in &cap {
        faces.push([a, c, b]);
    }
    // Top cap faces +z.
    for &[a, b, c] in &cap {
        faces.push([a + v, b + v, c + v]);
    }
    // Sides: outward quads split into two triangles.
    for i in 0..v {
        let j = (i + 1) % v;
        faces.push([i, j, j + v]);
        faces.push([i, j + v, i + v]);
    }

    let mut mesh = Mesh { vertices, faces };
    if upright {
        // Rotate -90 degrees about x: (x, y, z) -> (x, z, -y). Determinant +1
        // keeps the outward orientation.
        for p in &mut mesh.vertices {
            *p = Vec3::new(p.x, p.z, -p.y);
        }
    }
    mesh
}

/// Tapered prism over an elliptical n-gon: bottom ring, scaled top ring,
/// fan caps, quad sides.
fn frustum(n: usize, rx: f64, ry: f64, taper: f64, height: f64) -> Mesh {
    let ring: Vec<[f64; 2]> = (0..n)
        .map(|i| {
            let a = std::f64::consts::TAU * i as f64 / n as f64;
            [rx * a.cos(), ry * a.sin()]
        })
        .collect();
    let mut vertices = Vec::with_capacity(2 * n);
    for &[x, y] in &ring {
        vertices.push(Vec3::new(x, y, 0.0));
    }
    for &[x, y] in &ring {
        vertices.push(Vec3::new(x * taper, y * taper, height));
    }
    let mut faces = Vec::new();
    for k in 1..n - 1 {
        faces.push([0, k + 1, k]); // bottom cap, -z
        faces.push([n, n + k, n + k + 1]); // top cap, +z
    }
    for i in 0..n {
        let j = (i + 1) % n;
        faces.push([i, j, j + n]);
        faces.push([i, j + n, i + n]);
    }
    Mesh { vertices, faces }
}

fn signed_area(pts: &[[f64; 2]]) -> f64 {
    let n = pts.len();
    let mut s = 0.0;
    for i in 0..n {
        let [x0, y0] = pts[i];
        let [x1, y1] = pts[(i + 1) % n];
        s += x0 * y1 - x1 * y0;
    }
    s * 0.5
}

fn ccw(pts: &[[f64; 2]]) -> Vec<[f64; 2]> {
    if signed_area(pts) >= 0.0 {
        pts.to_vec()
    } else {
        pts.iter().rev().copied().collect()
    }
}

/// Ear-clipping triangulation of a simple CCW polygon.
fn triangulate_polygon(pts: &[[f64; 2]]) -> Vec<[usize; 3]> {
    let n = pts.len();
    assert!(n >= 3);
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut faces = Vec::with_capacity(n - 2);

    let cross = |a: [f64; 2], b: [f64; 2], c: [f64; 2]| -> f64 {
        (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    };
    let inside = |a: [f64; 2], b: [f64; 2], c: [f64; 2], p: [f64; 2]| -> bool {
        let eps = 1e-12;
        cross(a, b, p) >= -eps && cross(b, c, p) >= -eps && cross(c, a, p) >= -eps
    };

    while remaining.len() > 3 {
        let m = remaining.len();
        let mut clipped = false;
        for k in 0..m {
            let ia = remaining[(k + m - 1) % m];
            let ib = remaining[k];
            let ic = remaining[(k + 1) % m];
            if cross(pts[ia], pts[ib], pts[ic]) <= 1e-12 {
                continue; // reflex or collinear corner
            }
            let blocked = remaining.iter().any(|&other| {
                other != ia
                    && other != ib
                    && other != ic
                    && inside(pts[ia], pts[ib], pts[ic], pts[other])
            });
            if !blocked {
                faces.push([ia, ib, ic]);
                remaining.remove(k);
                clipped = true;
                break;
            }
        }
        assert!(clipped, "ear clipping stalled; profile is not a simple polygon");
    }
    faces.push([remaining[0], remaining[1], remaining[2]]);
    faces
}

/// Checks that every directed edge appears exactly once and its reverse
/// exists: closed, consistently oriented, 2-manifold along edges.
pub fn watertight_audit(mesh: &Mesh) -> bool {
    use std::collections::HashMap;
    let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
    for f in &mesh.faces {
        for k in 0..3 {
            let e = (f[k], f[(k + 1) % 3]);
            *directed.entry(e).or_insert(0) += 1;
        }
    }
    directed.iter().all(|(&(a, b), &count)| count == 1 && directed.get(&(b, a)) == Some(&1))
}

/// Signed volume via the divergence theorem; positive for outward-oriented
/// closed meshes.
pub fn signed_volume(mesh: &Mesh) -> f64 {
    mesh.faces
        .iter()
        .map(|&f| {
            let [a, b, c] = mesh.face_points(f);
            a.dot(b.cross(c)) / 6.0
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::write_obj;

    #[test]
    fn corpus_is_deterministic() {
        let (t1, e1) = generate_corpus(40, 7, 0.1);
        let (t2, e2) = generate_corpus(40, 7, 0.1);
        let dump = |items: &[CorpusItem]| -> String {
            items.iter().map(|i| write_obj(&i.mesh)).collect()
        };
        assert_eq!(dump(&t1), dump(&t2));
        assert_eq!(dump(&e1), dump(&e2));
        let (t3, _) = generate_corpus(40, 8, 0.1);
        assert_ne!(dump(&t1), dump(&t3));
    }

    #[test]
    fn split_sizes_follow_ratio() {
        let (train, eval) = generate_corpus(200, 7, 0.1);
        assert_eq!(train.len(), 180);
        assert_eq!(eval.len(), 20);
    }

    #[test]
    fn every_mesh_is_watertight_and_outward() {
        let (train, eval) = generate_corpus(100, 13, 0.1);
        for item in train.iter().chain(&eval) {
            let m = &item.mesh;
            m.validate().unwrap();
            assert!(
                watertight_audit(m),
                "family {:?} seed {} not watertight",
                item.spec.family,
                item.spec.seed
            );
            assert!(
                signed_volume(m) > 0.0,
                "family {:?} seed {} inverted",
                item.spec.family,
                item.spec.seed
            );
            assert!(
                (12..=120).contains(&m.faces.len()),
                "family {:?} face count {}",
                item.spec.family,
                m.faces.len()
            );
            let bb = m.aabb().unwrap();
            assert!((bb.max_extent() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn families_are_balanced() {
        let (train, eval) = generate_corpus(50, 3, 0.1);
        let mut counts = std::collections::HashMap::new();
        for item in train.iter().chain(&eval) {
            *counts.entry(item.spec.family.name()).or_insert(0usize) += 1;
        }
        for family in Family::ALL {
            let c = counts[family.name()];
            assert!(c >= 5, "family {} has {c} of 50", family.name());
        }
    }

    #[test]
    fn euler_characteristic_is_two() {
        let (train, _) = generate_corpus(25, 99, 0.1);
        for item in &train {
            let m = &item.mesh;
            let mut edges = std::collections::HashSet::new();
            for f in &m.faces {
                for k in 0..3 {
                    let (a, b) = (f[k], f[(k + 1) % 3]);
                    edges.insert((a.min(b), a.max(b)));
                }
            }
            let euler =
                m.vertices.len() as i64 - edges.len() as i64 + m.faces.len() as i64;
            assert_eq!(euler, 2, "family {:?}", item.spec.family);
        }
    }
}
