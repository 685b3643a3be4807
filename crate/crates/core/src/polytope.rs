//! Preference regions on the weight simplex and their vertex sets.
//!
//! A region is either a general system `A w <= b` intersected with the
//! simplex, or a weight-ratio box `l_i <= w[i] / w[d] <= h_i`. Vertices are
//! found by basis enumeration: every choice of `d - 1` tight hyperplanes
//! (constraint rows or simplex facets `w[i] >= 0`) together with `sum w = 1`
//! is solved, and feasible solutions are kept.

use crate::error::{ArspError, Result};

/// Pivots smaller than this mark a singular basis.
pub const PIVOT_TOL: f64 = 1e-12;
/// Allowed constraint violation for a vertex to count as feasible.
pub const SLACK_TOL: f64 = 1e-9;
/// Two vertices closer than this in L-infinity are the same vertex.
pub const DEDUP_TOL: f64 = 1e-9;
pub const DEFAULT_VERTEX_CAP: usize = 64;

/// One row `coeffs . w <= rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintRow {
    pub coeffs: Vec<f64>,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraintSystem {
    pub d: usize,
    pub rows: Vec<ConstraintRow>,
}

impl LinearConstraintSystem {
    /// The unconstrained simplex.
    pub fn simplex(d: usize) -> Self {
        Self { d, rows: Vec::new() }
    }

    pub fn new(d: usize, rows: Vec<ConstraintRow>) -> Result<Self> {
        let cs = Self { d, rows };
        cs.check()?;
        Ok(cs)
    }

    fn check(&self) -> Result<()> {
        if self.d == 0 {
            return Err(ArspError::BadParam("d must be positive".into()));
        }
        for row in &self.rows {
            if row.coeffs.len() != self.d {
                return Err(ArspError::DimensionMismatch {
                    expected: self.d,
                    found: row.coeffs.len(),
                });
            }
            if !row.rhs.is_finite() || row.coeffs.iter().any(|c| !c.is_finite()) {
                return Err(ArspError::BadParam("constraint values must be finite".into()));
            }
        }
        Ok(())
    }

    pub fn push(&mut self, coeffs: Vec<f64>, rhs: f64) -> Result<()> {
        self.rows.push(ConstraintRow { coeffs, rhs });
        if let Err(e) = self.check() {
            self.rows.pop();
            return Err(e);
        }
        Ok(())
    }

    pub fn c(&self) -> usize {
        self.rows.len()
    }

    /// Smallest slack over all rows and simplex bounds (negative = violated).
    pub fn min_slack(&self, w: &[f64]) -> f64 {
        let mut slack = w.iter().copied().fold(f64::INFINITY, f64::min);
        for row in &self.rows {
            let lhs: f64 = row.coeffs.iter().zip(w).map(|(a, x)| a * x).sum();
            slack = slack.min(row.rhs - lhs);
        }
        slack
    }

    pub fn contains(&self, w: &[f64], tol: f64) -> bool {
        let sum: f64 = w.iter().sum();
        w.len() == self.d && (sum - 1.0).abs() <= tol && self.min_slack(w) >= -tol
    }
}

/// Weight-ratio constraints `l_i <= w[i] / w[d] <= h_i` for `i < d`.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioBox {
    pub d: usize,
    pub ranges: Vec<(f64, f64)>,
}

impl RatioBox {
    pub fn new(ranges: Vec<(f64, f64)>) -> Result<Self> {
        for &(l, h) in &ranges {
            if !(l.is_finite() && h.is_finite() && l > 0.0 && l <= h) {
                return Err(ArspError::BadParam(format!(
                    "ratio range [{l}, {h}] needs 0 < l <= h, both finite"
                )));
            }
        }
        Ok(Self {
            d: ranges.len() + 1,
            ranges,
        })
    }

    /// Same interval `[l, h]` on every one of the `d - 1` ratios.
    pub fn uniform(d: usize, l: f64, h: f64) -> Result<Self> {
        if d < 2 {
            return Err(ArspError::BadParam("ratio box needs d >= 2".into()));
        }
        Self::new(vec![(l, h); d - 1])
    }

    pub fn lo(&self, i: usize) -> f64 {
        self.ranges[i].0
    }

    pub fn hi(&self, i: usize) -> f64 {
        self.ranges[i].1
    }

    /// True when every interval of `self` lies inside the matching one of `outer`.
    pub fn is_within(&self, outer: &RatioBox) -> bool {
        self.d == outer.d
            && self
                .ranges
                .iter()
                .zip(&outer.ranges)
                .all(|(a, b)| a.0 >= b.0 && a.1 <= b.1)
    }

    /// Rewrites the box as `w[i] - h_i w[d] <= 0` and `l_i w[d] - w[i] <= 0`.
    pub fn to_constraints(&self) -> LinearConstraintSystem {
        let d = self.d;
        let mut rows = Vec::with_capacity(2 * (d - 1));
        for (i, &(l, h)) in self.ranges.iter().enumerate() {
            let mut upper = vec![0.0; d];
            upper[i] = 1.0;
            upper[d - 1] = -h;
            rows.push(ConstraintRow { coeffs: upper, rhs: 0.0 });
            let mut lower = vec![0.0; d];
            lower[i] = -1.0;
            lower[d - 1] = l;
            rows.push(ConstraintRow { coeffs: lower, rhs: 0.0 });
        }
        LinearConstraintSystem { d, rows }
    }
}

pub fn ratio_box_to_constraints(rb: &RatioBox) -> LinearConstraintSystem {
    rb.to_constraints()
}

/// Vertices of a preference region; every vertex lies on the simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexSet {
    pub d: usize,
    pub vertices: Vec<Vec<f64>>,
}

impl VertexSet {
    /// Vertices of a ratio box in closed form: each corner `r` of the box maps
    /// to `(r, 1) / (sum r + 1)`.
    pub fn from_ratio_box(rb: &RatioBox) -> Self {
        let k = rb.d - 1;
        let mut vertices: Vec<Vec<f64>> = Vec::with_capacity(1 << k);
        for code in 0..(1usize << k) {
            let mut w: Vec<f64> = (0..k)
                .map(|i| if code >> i & 1 == 1 { rb.hi(i) } else { rb.lo(i) })
                .collect();
            w.push(1.0);
            let total: f64 = w.iter().sum();
            for x in &mut w {
                *x /= total;
            }
            push_unique(&mut vertices, w);
        }
        sort_vertices(&mut vertices);
        Self { d: rb.d, vertices }
    }

    /// The same rays as [`VertexSet::from_ratio_box`] left unnormalized as
    /// `(r, 1)`. Dominance is scale invariant per vertex, and these weights
    /// keep exact ties exact when the ratios and coordinates are dyadic.
    pub fn ratio_corners(rb: &RatioBox) -> Self {
        let k = rb.d - 1;
        let mut vertices: Vec<Vec<f64>> = Vec::with_capacity(1 << k);
        for code in 0..(1usize << k) {
            let mut w: Vec<f64> = (0..k)
                .map(|i| if code >> i & 1 == 1 { rb.hi(i) } else { rb.lo(i) })
                .collect();
            w.push(1.0);
            if !vertices.contains(&w) {
                vertices.push(w);
            }
        }
        sort_vertices(&mut vertices);
        Self { d: rb.d, vertices }
    }

    /// The `d` unit vectors: vertices of the whole simplex.
    pub fn simplex(d: usize) -> Self {
        let mut vertices: Vec<Vec<f64>> = (0..d)
            .map(|i| {
                let mut w = vec![0.0; d];
                w[i] = 1.0;
                w
            })
            .collect();
        sort_vertices(&mut vertices);
        Self { d, vertices }
    }

    /// d', the number of vertices and the dimension of score space.
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// A single-point region; still valid, dominance reduces to one score.
    pub fn is_degenerate(&self) -> bool {
        self.vertices.len() == 1
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.vertices.iter().map(|v| v.as_slice())
    }
}

fn push_unique(vertices: &mut Vec<Vec<f64>>, w: Vec<f64>) {
    let dup = vertices.iter().any(|v| {
        v.iter()
            .zip(&w)
            .all(|(a, b)| (a - b).abs() <= DEDUP_TOL)
    });
    if !dup {
        vertices.push(w);
    }
}

/// Lexicographically decreasing, so the order is stable across runs.
fn sort_vertices(vertices: &mut [Vec<f64>]) {
    vertices.sort_by(|a, b| {
        for (x, y) in a.iter().zip(b) {
            match y.total_cmp(x) {
                std::cmp::Ordering::Equal => continue,
                o => return o,
            }
        }
        std::cmp::Ordering::Equal
    });
}

pub fn enumerate_vertices(cs: &LinearConstraintSystem) -> Result<VertexSet> {
    enumerate_vertices_capped(cs, DEFAULT_VERTEX_CAP)
}

/// Basis enumeration with an explicit cap on the number of vertices.
pub fn enumerate_vertices_capped(cs: &LinearConstraintSystem, cap: usize) -> Result<VertexSet> {
    cs.check()?;
    let d = cs.d;
    // Candidate tight hyperplanes: constraint rows, then facets -w[i] <= 0.
    let mut planes: Vec<(Vec<f64>, f64)> = cs.rows.iter().map(|r| (r.coeffs.clone(), r.rhs)).collect();
    for i in 0..d {
        let mut a = vec![0.0; d];
        a[i] = -1.0;
        planes.push((a, 0.0));
    }
    let mut vertices = Vec::new();
    let mut combo: Vec<usize> = (0..d - 1).collect();
    if d - 1 > planes.len() {
        return Err(ArspError::EmptyRegion);
    }
    let mut matrix = vec![0.0; d * (d + 1)];
    loop {
        // Rows 0..d-1 are the chosen planes, the last row is sum w = 1.
        for (r, &p) in combo.iter().enumerate() {
            let (a, b) = &planes[p];
            matrix[r * (d + 1)..r * (d + 1) + d].copy_from_slice(a);
            matrix[r * (d + 1) + d] = *b;
        }
        let last = (d - 1) * (d + 1);
        for x in &mut matrix[last..last + d] {
            *x = 1.0;
        }
        matrix[last + d] = 1.0;
        if let Some(mut w) = solve_in_place(&mut matrix, d) {
            if cs.min_slack(&w) >= -SLACK_TOL {
                for x in &mut w {
                    if *x < 0.0 {
                        *x = 0.0;
                    }
                }
                push_unique(&mut vertices, w);
                if vertices.len() > cap {
                    return Err(ArspError::TooManyVertices {
                        count: vertices.len(),
                        cap,
                    });
                }
            }
        }
        if !next_combination(&mut combo, planes.len()) {
            break;
        }
    }
    if vertices.is_empty() {
        return Err(ArspError::EmptyRegion);
    }
    sort_vertices(&mut vertices);
    Ok(VertexSet { d, vertices })
}

/// Advances `combo` to the next k-subset of `0..n` in lexicographic order.
fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < n - k + i {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Gaussian elimination with partial pivoting on an `n x (n+1)` augmented
/// matrix. Returns `None` for singular systems.
fn solve_in_place(m: &mut [f64], n: usize) -> Option<Vec<f64>> {
    let w = n + 1;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| m[a * w + col].abs().total_cmp(&m[b * w + col].abs()))
            .expect("non-empty range");
        if m[pivot * w + col].abs() < PIVOT_TOL {
            return None;
        }
        if pivot != col {
            for k in 0..w {
                m.swap(col * w + k, pivot * w + k);
            }
        }
        let p = m[col * w + col];
        for row in col + 1..n {
            let f = m[row * w + col] / p;
            if f != 0.0 {
                for k in col..w {
                    m[row * w + k] -= f * m[col * w + k];
                }
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = m[row * w + n];
        for k in row + 1..n {
            acc -= m[row * w + k] * x[k];
        }
        x[row] = acc / m[row * w + row];
    }
    Some(x)
}

/// The user's family of linear scoring functions.
#[derive(Debug, Clone, PartialEq)]
pub enum PreferenceSpec {
    Constraints(LinearConstraintSystem),
    Ratio(RatioBox),
}

impl PreferenceSpec {
    pub fn d(&self) -> usize {
        match self {
            PreferenceSpec::Constraints(cs) => cs.d,
            PreferenceSpec::Ratio(rb) => rb.d,
        }
    }

    pub fn vertices(&self) -> Result<VertexSet> {
        self.vertices_capped(DEFAULT_VERTEX_CAP)
    }

    pub fn vertices_capped(&self, cap: usize) -> Result<VertexSet> {
        let vs = match self {
            PreferenceSpec::Constraints(cs) => enumerate_vertices_capped(cs, cap)?,
            PreferenceSpec::Ratio(rb) => VertexSet::from_ratio_box(rb),
        };
        if vs.len() > cap {
            return Err(ArspError::TooManyVertices { count: vs.len(), cap });
        }
        Ok(vs)
    }

    /// Weights used to map instances into score space: the vertices, or for
    /// a ratio box its unnormalized corners.
    pub fn score_weights(&self) -> Result<VertexSet> {
        match self {
            PreferenceSpec::Ratio(rb) => {
                let vs = VertexSet::ratio_corners(rb);
                if vs.len() > DEFAULT_VERTEX_CAP {
                    return Err(ArspError::TooManyVertices {
                        count: vs.len(),
                        cap: DEFAULT_VERTEX_CAP,
                    });
                }
                Ok(vs)
            }
            PreferenceSpec::Constraints(_) => self.vertices(),
        }
    }

    pub fn as_constraints(&self) -> LinearConstraintSystem {
        match self {
            PreferenceSpec::Constraints(cs) => cs.clone(),
            PreferenceSpec::Ratio(rb) => rb.to_constraints(),
        }
    }

    pub fn ratio_box(&self) -> Option<&RatioBox> {
        match self {
            PreferenceSpec::Ratio(rb) => Some(rb),
            PreferenceSpec::Constraints(_) => None,
        }
    }
}

impl From<RatioBox> for PreferenceSpec {
    fn from(rb: RatioBox) -> Self {
        PreferenceSpec::Ratio(rb)
    }
}

impl From<LinearConstraintSystem> for PreferenceSpec {
    fn from(cs: LinearConstraintSystem) -> Self {
        PreferenceSpec::Constraints(cs)
    }
}
