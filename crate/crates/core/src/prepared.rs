use std::cmp::Ordering;

use crate::dominance::map_to_score_space;
use crate::error::Result;
use crate::model::{FlatInstances, UncertainDataset};
use crate::polytope::{PreferenceSpec, VertexSet};

/// Flattened instances together with their score-space images.
pub(crate) struct Prepared {
    pub flat: FlatInstances,
    pub vs: VertexSet,
    /// Row-major, `k` scores per instance.
    pub scores: Vec<f64>,
    pub k: usize,
}

impl Prepared {
    pub fn new(ds: &UncertainDataset, spec: &PreferenceSpec) -> Result<Self> {
        check_dims(ds, spec)?;
        let vs = spec.score_weights()?;
        Ok(Self::with_vertices(ds, vs))
    }

    pub fn with_vertices(ds: &UncertainDataset, vs: VertexSet) -> Self {
        let flat = ds.flat();
        let scores = map_to_score_space(&vs, &flat.coords, flat.d);
        let k = vs.len();
        Prepared { flat, vs, scores, k }
    }

    pub fn score(&self, i: usize) -> &[f64] {
        &self.scores[i * self.k..(i + 1) * self.k]
    }
}

pub(crate) fn check_dims(ds: &UncertainDataset, spec: &PreferenceSpec) -> Result<()> {
    if spec.d() != ds.d {
        return Err(crate::ArspError::DimensionMismatch {
            expected: ds.d,
            found: spec.d(),
        });
    }
    Ok(())
}

pub(crate) fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// Instances sorted lexicographically by score vector (ties by index), plus,
/// for every position, the end of its run of identical score vectors.
///
/// If `s` dominates `t` in score space then either the vectors are equal or
/// `s` sorts strictly before `t`, so scanning `0..run_end[pos]` finds every
/// dominator of the instance at `pos`.
pub(crate) fn lex_order(scores: &[f64], k: usize) -> (Vec<usize>, Vec<usize>) {
    let n = scores.len().checked_div(k).unwrap_or(0);
    let row = |i: usize| &scores[i * k..(i + 1) * k];
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| lex_cmp(row(a), row(b)).then(a.cmp(&b)));
    let mut run_end = vec![n; n];
    let mut start = 0;
    for pos in 1..=n {
        if pos == n || lex_cmp(row(order[pos]), row(order[start])) != Ordering::Equal {
            for e in &mut run_end[start..pos] {
                *e = pos;
            }
            start = pos;
        }
    }
    (order, run_end)
}
