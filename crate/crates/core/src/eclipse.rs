//! Eclipse queries on certain points: the points no other point
//! F-dominates under a weight-ratio box.
//!
//! Dominance is non-strict, so coordinate-identical points eliminate each
//! other from both the skyline and the eclipse.

use crate::dominance::{dominates_unchecked, f_dominates_ratio_unchecked};
use crate::polytope::RatioBox;
use crate::spatial::KdTree;

const BUCKET: usize = 8;

/// Skyline members plus the potential dominators needed by the pruned
/// eclipse: one representative per coordinate group that no
/// coordinate-distinct point dominates.
struct SkylineSplit {
    skyline: Vec<usize>,
    window: Vec<usize>,
}

fn sfs(points: &[Vec<f64>]) -> SkylineSplit {
    let sums: Vec<f64> = points.iter().map(|p| p.iter().sum()).collect();
    let mut order: Vec<usize> = (0..points.len()).collect();
    // A dominator sorts strictly before any coordinate-distinct point it
    // dominates: float sums are monotone and ties fall to the lex order.
    order.sort_by(|&a, &b| {
        sums[a]
            .total_cmp(&sums[b])
            .then_with(|| points[a].partial_cmp(&points[b]).expect("finite coordinates"))
            .then(a.cmp(&b))
    });
    let mut skyline = Vec::new();
    let mut window: Vec<usize> = Vec::new();
    let mut pos = 0;
    while pos < order.len() {
        let head = order[pos];
        let mut end = pos + 1;
        while end < order.len() && points[order[end]] == points[head] {
            end += 1;
        }
        let dominated = window.iter().any(|&w| dominates_unchecked(&points[w], &points[head]));
        if !dominated {
            window.push(head);
            if end - pos == 1 {
                skyline.push(head);
            }
        }
        pos = end;
    }
    skyline.sort_unstable();
    SkylineSplit { skyline, window }
}

/// Indices of points not classically dominated by any other point, ascending.
pub fn skyline(points: &[Vec<f64>]) -> Vec<usize> {
    sfs(points).skyline
}

/// Pairwise definition, quadratic in the number of points.
pub fn eclipse_naive(points: &[Vec<f64>], rb: &RatioBox) -> Vec<usize> {
    check(points, rb);
    (0..points.len())
        .filter(|&t| !(0..points.len()).any(|s| s != t && f_dominates_ratio_unchecked(rb, &points[s], &points[t])))
        .collect()
}

/// Skyline filter followed by one kd-tree existence search per candidate.
/// A subtree is skipped when its minimum corner cannot dominate the
/// candidate; the ratio predicate is monotone in the dominator's
/// coordinates, so that corner is an exact lower bound for the box.
pub fn eclipse_pruned(points: &[Vec<f64>], rb: &RatioBox) -> Vec<usize> {
    check(points, rb);
    let split = sfs(points);
    let d = rb.d;
    let flat: Vec<f64> = split.window.iter().flat_map(|&i| points[i].iter().copied()).collect();
    let tree = KdTree::build(&flat, d, BUCKET);
    split
        .skyline
        .into_iter()
        .filter(|&t| {
            let pt = &points[t];
            tree.find_any(
                |mbr| f_dominates_ratio_unchecked(rb, &mbr.min_corner, pt),
                |w| split.window[w] != t && f_dominates_ratio_unchecked(rb, tree.point(w), pt),
            )
            .is_none()
        })
        .collect()
}

fn check(points: &[Vec<f64>], rb: &RatioBox) {
    assert!(points.iter().all(|p| p.len() == rb.d), "dimension mismatch");
}
