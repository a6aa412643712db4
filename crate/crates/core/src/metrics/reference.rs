//! Brute-force O(N^2) reference implementations of every metric. These are
//! the oracles the accelerated paths are tested against; they share no
//! nearest-neighbor machinery with the kd-tree code.

use super::{EcdParams, GenerativeReport};
use crate::field::PointCloud;
use crate::geom::Vec3;

fn min_dist_sq(p: Vec3, to: &[Vec3]) -> f64 {
    to.iter().map(|q| p.dist_sq(*q)).fold(f64::INFINITY, f64::min)
}

fn nearest_index(p: Vec3, to: &[Vec3], exclude: usize) -> usize {
    let mut best = (usize::MAX, f64::INFINITY);
    for (j, q) in to.iter().enumerate() {
        if j == exclude {
            continue;
        }
        let d = p.dist_sq(*q);
        if d < best.1 {
            best = (j, d);
        }
    }
    best.0
}

pub fn chamfer_distance_bruteforce(a: &[Vec3], b: &[Vec3]) -> f64 {
    let ab = a.iter().map(|&p| min_dist_sq(p, b)).sum::<f64>() / a.len() as f64;
    let ba = b.iter().map(|&p| min_dist_sq(p, a)).sum::<f64>() / b.len() as f64;
    ab + ba
}

pub fn normal_consistency_bruteforce(a: &PointCloud, b: &PointCloud) -> f64 {
    let dir = |from: &PointCloud, to: &PointCloud| -> f64 {
        from.points
            .iter()
            .zip(&from.normals)
            .map(|(&p, n)| {
                let j = nearest_index(p, &to.points, usize::MAX);
                n.dot(to.normals[j]).abs()
            })
            .sum::<f64>()
            / from.len() as f64
    };
    0.5 * (dir(a, b) + dir(b, a))
}

pub fn edge_points_bruteforce(cloud: &PointCloud, params: EcdParams) -> Vec<usize> {
    let cos_threshold = params.angle.cos();
    let r_sq = params.radius * params.radius;
    (0..cloud.len())
        .filter(|&i| {
            (0..cloud.len()).any(|j| {
                j != i
                    && cloud.points[i].dist_sq(cloud.points[j]) <= r_sq
                    && cloud.normals[i].dot(cloud.normals[j]) < cos_threshold
            })
        })
        .collect()
}

/// Returns (ecd, fallback) like the accelerated version.
pub fn edge_chamfer_distance_bruteforce(
    a: &PointCloud,
    b: &PointCloud,
    params: EcdParams,
) -> (f64, bool) {
    let ea = edge_points_bruteforce(a, params);
    let eb = edge_points_bruteforce(b, params);
    if ea.is_empty() || eb.is_empty() {
        return (chamfer_distance_bruteforce(&a.points, &b.points), true);
    }
    let pa: Vec<Vec3> = ea.iter().map(|&i| a.points[i]).collect();
    let pb: Vec<Vec3> = eb.iter().map(|&i| b.points[i]).collect();
    (chamfer_distance_bruteforce(&pa, &pb), false)
}

pub fn coverage_mmd_1nna_bruteforce(
    generated: &[PointCloud],
    reference: &[PointCloud],
) -> GenerativeReport {
    let g = generated.len();
    let union: Vec<&PointCloud> = generated.iter().chain(reference.iter()).collect();
    let n = union.len();
    let dist = |i: usize, j: usize| chamfer_distance_bruteforce(&union[i].points, &union[j].points);

    let mut covered = vec![false; reference.len()];
    for gi in 0..g {
        let mut best = (usize::MAX, f64::INFINITY);
        for rj in 0..reference.len() {
            let d = dist(gi, g + rj);
            if d < best.1 {
                best = (rj, d);
            }
        }
        covered[best.0] = true;
    }
    let cov = covered.iter().filter(|&&c| c).count() as f64 / reference.len() as f64;

    let mmd = (0..reference.len())
        .map(|rj| (0..g).map(|gi| dist(gi, g + rj)).fold(f64::INFINITY, f64::min))
        .sum::<f64>()
        / reference.len() as f64;

    let mut correct = 0usize;
    for i in 0..n {
        let mut best = (usize::MAX, f64::INFINITY);
        for j in 0..n {
            if j != i {
                let d = dist(i, j);
                if d < best.1 {
                    best = (j, d);
                }
            }
        }
        if (best.0 < g) == (i < g) {
            correct += 1;
        }
    }
    GenerativeReport { cov, mmd, one_nna: correct as f64 / n as f64 }
}
