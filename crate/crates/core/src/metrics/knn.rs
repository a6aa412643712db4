//! Exact nearest-neighbor search over 3D points: a balanced kd-tree with
//! lowest-index tie-breaking, so results match the brute-force scan
//! bit-for-bit even on duplicate points.

use crate::geom::Vec3;

pub struct KdTree {
    points: Vec<Vec3>,
    // node layout: flat recursion over index slices
    nodes: Vec<Node>,
    root: usize,
}

struct Node {
    index: usize, // point index at this node
    axis: u8,
    left: usize,  // usize::MAX when absent
    right: usize, // usize::MAX when absent
}

const NONE: usize = usize::MAX;

impl KdTree {
    pub fn build(points: &[Vec3]) -> KdTree {
        assert!(!points.is_empty());
        let mut ids: Vec<usize> = (0..points.len()).collect();
        let mut nodes = Vec::with_capacity(points.len());
        let root = Self::build_rec(points, &mut ids, &mut nodes);
        KdTree { points: points.to_vec(), nodes, root }
    }

    fn build_rec(points: &[Vec3], ids: &mut [usize], nodes: &mut Vec<Node>) -> usize {
        if ids.is_empty() {
            return NONE;
        }
        // Split on the widest axis of this subset.
        let mut lo = points[ids[0]];
        let mut hi = lo;
        for &i in ids.iter() {
            lo = lo.min_components(points[i]);
            hi = hi.max_components(points[i]);
        }
        let e = hi.sub(lo);
        let axis = if e.x >= e.y && e.x >= e.z {
            0u8
        } else if e.y >= e.z {
            1
        } else {
            2
        };
        let key = |i: usize| -> (f64, usize) { (component(points[i], axis), i) };
        let mid = ids.len() / 2;
        ids.select_nth_unstable_by(mid, |&a, &b| key(a).partial_cmp(&key(b)).unwrap());
        let index = ids[mid];

        let slot = nodes.len();
        nodes.push(Node { index, axis, left: NONE, right: NONE });
        // Recurse after reserving the slot; split borrows to appease rustc.
        let (left_ids, rest) = ids.split_at_mut(mid);
        let right_ids = &mut rest[1..];
        let left = Self::build_rec(points, left_ids, nodes);
        let right = Self::build_rec(points, right_ids, nodes);
        nodes[slot].left = left;
        nodes[slot].right = right;
        slot
    }

    /// Index and squared distance of the nearest point, excluding
    /// `exclude` (pass `usize::MAX` to search all). Ties break toward the
    /// lowest index.
    pub fn nearest(&self, query: Vec3, exclude: usize) -> (usize, f64) {
        let mut best = (NONE, f64::INFINITY);
        self.nearest_rec(self.root, query, exclude, &mut best);
        best
    }

    fn nearest_rec(&self, node: usize, query: Vec3, exclude: usize, best: &mut (usize, f64)) {
        if node == NONE {
            return;
        }
        let n = &self.nodes[node];
        if n.index != exclude {
            let d = query.dist_sq(self.points[n.index]);
            if d < best.1 || (d == best.1 && n.index < best.0) {
                *best = (n.index, d);
            }
        }
        let delta = component(query, n.axis) - component(self.points[n.index], n.axis);
        let (near, far) = if delta < 0.0 { (n.left, n.right) } else { (n.right, n.left) };
        self.nearest_rec(near, query, exclude, best);
        // The far side can still hold an equal-distance lower index, so
        // descend on <= rather than <.
        if delta * delta <= best.1 {
            self.nearest_rec(far, query, exclude, best);
        }
    }

    /// Visits every point with squared distance <= `radius_sq` (excluding
    /// `exclude`). Stops early when `visit` returns `false`.
    pub fn for_each_within<F: FnMut(usize, f64) -> bool>(
        &self,
        query: Vec3,
        radius_sq: f64,
        exclude: usize,
        visit: &mut F,
    ) {
        self.within_rec(self.root, query, radius_sq, exclude, visit);
    }

    fn within_rec<F: FnMut(usize, f64) -> bool>(
        &self,
        node: usize,
        query: Vec3,
        radius_sq: f64,
        exclude: usize,
        visit: &mut F,
    ) -> bool {
        if node == NONE {
            return true;
        }
        let n = &self.nodes[node];
        if n.index != exclude {
            let d = query.dist_sq(self.points[n.index]);
            if d <= radius_sq && !visit(n.index, d) {
                return false;
            }
        }
        let delta = component(query, n.axis) - component(self.points[n.index], n.axis);
        let (near, far) = if delta < 0.0 { (n.left, n.right) } else { (n.right, n.left) };
        if !self.within_rec(near, query, radius_sq, exclude, visit) {
            return false;
        }
        if delta * delta <= radius_sq {
            return self.within_rec(far, query, radius_sq, exclude, visit);
        }
        true
    }
}

fn component(p: Vec3, axis: u8) -> f64 {
    match axis {
        0 => p.x,
        1 => p.y,
        _ => p.z,
    }
}

/// Brute-force nearest neighbor: the reference the tree must match.
pub fn nearest_bruteforce(points: &[Vec3], query: Vec3, exclude: usize) -> (usize, f64) {
    let mut best = (usize::MAX, f64::INFINITY);
    for (i, p) in points.iter().enumerate() {
        if i == exclude {
            continue;
        }
        let d = query.dist_sq(*p);
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}
