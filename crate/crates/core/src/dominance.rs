//! Scores and dominance predicates.
//!
//! All predicates are non-strict (`<=` everywhere) and use exact float
//! comparisons, so equal-scoring points from different objects dominate each
//! other.

use crate::error::{ArspError, Result};
use crate::polytope::{RatioBox, VertexSet};

/// `S_w(t) = sum_i w[i] * t[i]`.
#[inline]
pub fn score(w: &[f64], t: &[f64]) -> f64 {
    w.iter().zip(t).map(|(a, b)| a * b).sum()
}

/// Scores of one point under every vertex of a region.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector(pub Vec<f64>);

impl ScoreVector {
    pub fn of(vs: &VertexSet, t: &[f64]) -> Self {
        ScoreVector(vs.iter().map(|w| score(w, t)).collect())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Maps `n` points (row-major, `d` values each) into score space; the
/// result is row-major with `vs.len()` values per point.
pub fn map_to_score_space(vs: &VertexSet, coords: &[f64], d: usize) -> Vec<f64> {
    let k = vs.len();
    let n = coords.len().checked_div(d).unwrap_or(0);
    let mut out = Vec::with_capacity(n * k);
    for p in coords.chunks_exact(d) {
        for w in vs.iter() {
            out.push(score(w, p));
        }
    }
    out
}

fn check_dims(expected: usize, a: &[f64], b: &[f64]) -> Result<()> {
    for found in [a.len(), b.len()] {
        if found != expected {
            return Err(ArspError::DimensionMismatch { expected, found });
        }
    }
    Ok(())
}

/// Coordinatewise `t <= s`.
#[inline]
pub fn dominates_unchecked(t: &[f64], s: &[f64]) -> bool {
    t.iter().zip(s).all(|(a, b)| a <= b)
}

pub fn classical_dominates(t: &[f64], s: &[f64]) -> Result<bool> {
    check_dims(t.len(), t, s)?;
    Ok(dominates_unchecked(t, s))
}

/// `t` F-dominates `s` iff `S_w(t) <= S_w(s)` for every vertex `w`.
pub fn f_dominates_vertices(vs: &VertexSet, t: &[f64], s: &[f64]) -> Result<bool> {
    check_dims(vs.d, t, s)?;
    Ok(f_dominates_vertices_unchecked(vs, t, s))
}

#[inline]
pub fn f_dominates_vertices_unchecked(vs: &VertexSet, t: &[f64], s: &[f64]) -> bool {
    vs.iter().all(|w| score(w, t) <= score(w, s))
}

/// O(d) test for weight-ratio regions:
/// `t[d] - s[d] <= sum_{i<d} c_i (s[i] - t[i])` with `c_i = l_i` when
/// `s[i] > t[i]` and `h_i` otherwise.
pub fn f_dominates_ratio(rb: &RatioBox, t: &[f64], s: &[f64]) -> Result<bool> {
    check_dims(rb.d, t, s)?;
    Ok(f_dominates_ratio_unchecked(rb, t, s))
}

#[inline]
pub fn f_dominates_ratio_unchecked(rb: &RatioBox, t: &[f64], s: &[f64]) -> bool {
    let last = rb.d - 1;
    t[last] - s[last] <= ratio_rhs(rb, t, s)
}

#[inline]
pub(crate) fn ratio_rhs(rb: &RatioBox, t: &[f64], s: &[f64]) -> f64 {
    let mut rhs = 0.0;
    for (i, &(l, h)) in rb.ranges.iter().enumerate() {
        let diff = s[i] - t[i];
        let c = if s[i] > t[i] { l } else { h };
        rhs += c * diff;
    }
    rhs
}
