//! Ground-truth algorithms.
//!
//! `enum_arsp` sums possible-world probabilities directly; `loop_arsp`
//! evaluates the product form
//! `Pr(t) = p(t) * prod_{j != i} (1 - sum_{s in T_j, s dominates t} p(s))`
//! with pairwise tests over a score-sorted order. Both have float and exact
//! rational variants sharing one generic implementation.

use num_rational::BigRational;
use num_traits::{Num, One, Zero};

use crate::error::{ArspError, Result};
use crate::exact::{rational_from_prob, ExactArspResult};
use crate::model::{clamp_mass, ArspResult, UncertainDataset, CERTAIN_EPS};
use crate::polytope::PreferenceSpec;
use crate::prepared::{lex_order, Prepared};
use crate::dominance::dominates_unchecked;

pub const DEFAULT_WORLD_CAP: u128 = 1_000_000;

/// Number of possible worlds: each object picks one instance or, when its
/// total is below 1, is absent.
pub fn world_count(ds: &UncertainDataset) -> u128 {
    ds.objects
        .iter()
        .map(|o| o.instances.len() as u128 + u128::from(o.total_prob() < 1.0 - CERTAIN_EPS))
        .fold(1u128, |acc, r| acc.saturating_mul(r))
}

struct ProbTable<P> {
    probs: Vec<P>,
    /// Absence probability per object, `None` when the object always occurs.
    absent: Vec<Option<P>>,
}

fn float_table(p: &Prepared) -> ProbTable<f64> {
    let absent = (0..p.flat.m())
        .map(|o| {
            let total = p.flat.object_totals[o];
            (total < 1.0 - CERTAIN_EPS).then_some(1.0 - total)
        })
        .collect();
    ProbTable {
        probs: p.flat.probs.clone(),
        absent,
    }
}

fn exact_table(p: &Prepared) -> ProbTable<BigRational> {
    let probs: Vec<BigRational> = p.flat.probs.iter().map(|&x| rational_from_prob(x)).collect();
    let mut totals = vec![BigRational::zero(); p.flat.m()];
    for (i, pr) in probs.iter().enumerate() {
        totals[p.flat.object[i]] += pr;
    }
    let absent = totals
        .into_iter()
        .map(|t| (t < BigRational::one()).then(|| BigRational::one() - t))
        .collect();
    ProbTable { probs, absent }
}

/// Instance index ranges per object, in flat order.
fn object_ranges(p: &Prepared) -> Vec<std::ops::Range<usize>> {
    let mut start = 0;
    (0..p.flat.m())
        .map(|o| {
            let mut end = start;
            while end < p.flat.n() && p.flat.object[end] == o {
                end += 1;
            }
            let r = start..end;
            start = end;
            r
        })
        .collect()
}

/// Possible-world enumeration with a mixed-radix counter over objects.
/// Returns per-instance sums and the total probability of all worlds.
fn enum_generic<P: Clone + Num>(p: &Prepared, table: &ProbTable<P>, cap: u128) -> Result<(Vec<P>, P)> {
    let m = p.flat.m();
    let n = p.flat.n();
    let ranges = object_ranges(p);
    let radix: Vec<usize> = (0..m)
        .map(|o| ranges[o].len() + usize::from(table.absent[o].is_some()))
        .collect();
    let worlds = radix.iter().fold(1u128, |acc, &r| acc.saturating_mul(r as u128));
    if worlds > cap {
        return Err(ArspError::TooManyWorlds { worlds, cap });
    }
    // dom[s * n + t]: s dominates t in score space.
    let mut dom = vec![false; n * n];
    for s in 0..n {
        for t in 0..n {
            dom[s * n + t] = s != t && dominates_unchecked(p.score(s), p.score(t));
        }
    }
    let mut out = vec![P::zero(); n];
    let mut total = P::zero();
    let mut digits = vec![0usize; m];
    let mut present: Vec<usize> = Vec::with_capacity(m);
    if m == 0 {
        return Ok((out, P::one()));
    }
    loop {
        present.clear();
        let mut prob = P::one();
        for o in 0..m {
            let digit = digits[o];
            if digit < ranges[o].len() {
                let i = ranges[o].start + digit;
                present.push(i);
                prob = prob * table.probs[i].clone();
            } else {
                prob = prob * table.absent[o].clone().expect("absent digit only when allowed");
            }
        }
        total = total + prob.clone();
        for &t in &present {
            if !present.iter().any(|&s| dom[s * n + t]) {
                out[t] = out[t].clone() + prob.clone();
            }
        }
        // Advance the counter.
        let mut o = 0;
        loop {
            digits[o] += 1;
            if digits[o] < radix[o] {
                break;
            }
            digits[o] = 0;
            o += 1;
            if o == m {
                return Ok((out, total));
            }
        }
    }
}

/// Pairwise product form over the lexicographic score order.
fn loop_generic<P: Clone + Num>(p: &Prepared, table: &ProbTable<P>, clamp: impl Fn(P) -> P) -> Vec<P> {
    let n = p.flat.n();
    let m = p.flat.m();
    let (order, run_end) = lex_order(&p.scores, p.k);
    let mut sigma = vec![P::zero(); m];
    let mut touched: Vec<usize> = Vec::new();
    let mut out = vec![P::zero(); n];
    for (pos, &t) in order.iter().enumerate() {
        let own = p.flat.object[t];
        let st = p.score(t);
        for &s in &order[..run_end[pos]] {
            let obj = p.flat.object[s];
            if obj == own || !dominates_unchecked(p.score(s), st) {
                continue;
            }
            if sigma[obj].is_zero() {
                touched.push(obj);
            }
            sigma[obj] = sigma[obj].clone() + table.probs[s].clone();
        }
        let mut pr = table.probs[t].clone();
        for &obj in &touched {
            let s = clamp(std::mem::replace(&mut sigma[obj], P::zero()));
            pr = pr * (P::one() - s);
        }
        touched.clear();
        out[t] = pr;
    }
    out
}

pub fn enum_arsp(ds: &UncertainDataset, spec: &PreferenceSpec) -> Result<ArspResult> {
    enum_arsp_capped(ds, spec, DEFAULT_WORLD_CAP)
}

pub fn enum_arsp_capped(ds: &UncertainDataset, spec: &PreferenceSpec, cap: u128) -> Result<ArspResult> {
    let p = Prepared::new(ds, spec)?;
    let (vals, _) = enum_generic(&p, &float_table(&p), cap)?;
    Ok(ArspResult::from_flat(&p.flat, &vals))
}

pub fn enum_arsp_exact(ds: &UncertainDataset, spec: &PreferenceSpec) -> Result<ExactArspResult> {
    let p = Prepared::new(ds, spec)?;
    let (vals, _) = enum_generic(&p, &exact_table(&p), DEFAULT_WORLD_CAP)?;
    Ok(to_exact(&p, vals))
}

/// Sum of `Pr(D)` over all possible worlds, exactly. Equals 1 for any valid
/// dataset.
pub fn total_world_probability_exact(ds: &UncertainDataset, spec: &PreferenceSpec) -> Result<BigRational> {
    let p = Prepared::new(ds, spec)?;
    enum_generic(&p, &exact_table(&p), DEFAULT_WORLD_CAP).map(|(_, total)| total)
}

/// Exact probability of one world; `choice[o]` is the index of the chosen
/// instance within object `o`, or `None` for an absent object.
pub fn world_probability_exact(ds: &UncertainDataset, choice: &[Option<usize>]) -> Result<BigRational> {
    if choice.len() != ds.m() {
        return Err(ArspError::DimensionMismatch {
            expected: ds.m(),
            found: choice.len(),
        });
    }
    let mut prob = BigRational::one();
    for (obj, c) in ds.objects.iter().zip(choice) {
        let probs: Vec<BigRational> = obj.instances.iter().map(|t| rational_from_prob(t.prob)).collect();
        match c {
            Some(j) => {
                let pr = probs
                    .get(*j)
                    .ok_or_else(|| ArspError::BadParam(format!("object {} has no instance index {j}", obj.object_id)))?;
                prob *= pr.clone();
            }
            None => {
                let total = probs.into_iter().fold(BigRational::zero(), |a, b| a + b);
                prob *= BigRational::one() - total;
            }
        }
    }
    Ok(prob)
}

pub fn loop_arsp(ds: &UncertainDataset, spec: &PreferenceSpec) -> Result<ArspResult> {
    let p = Prepared::new(ds, spec)?;
    Ok(loop_prepared(&p))
}

pub(crate) fn loop_prepared(p: &Prepared) -> ArspResult {
    let vals = loop_generic(p, &float_table(p), clamp_mass);
    ArspResult::from_flat(&p.flat, &vals)
}

pub fn loop_arsp_exact(ds: &UncertainDataset, spec: &PreferenceSpec) -> Result<ExactArspResult> {
    let p = Prepared::new(ds, spec)?;
    let vals = loop_generic(&p, &exact_table(&p), |s| s);
    Ok(to_exact(&p, vals))
}

fn to_exact(p: &Prepared, vals: Vec<BigRational>) -> ExactArspResult {
    ExactArspResult {
        instances: p.flat.keys.iter().copied().zip(vals).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::UncertainObject;
    use crate::polytope::{LinearConstraintSystem, RatioBox};

    fn simplex(d: usize) -> PreferenceSpec {
        LinearConstraintSystem::simplex(d).into()
    }

    #[test]
    fn lone_instance_keeps_its_probability() {
        let ds = UncertainDataset::new(2, vec![UncertainObject::from_points(1, vec![(vec![3.0, 4.0], 0.6)])]);
        let spec: PreferenceSpec = RatioBox::new(vec![(0.5, 2.0)]).unwrap().into();
        assert_eq!(enum_arsp(&ds, &spec).unwrap().get(1, 1), Some(0.6));
        assert_eq!(loop_arsp(&ds, &spec).unwrap().get(1, 1), Some(0.6));
    }

    #[test]
    fn certain_dominator_zeroes_everything_else() {
        let ds = UncertainDataset::new(
            2,
            vec![
                UncertainObject::from_points(1, vec![(vec![0.0, 0.0], 0.5), (vec![0.1, 0.0], 0.5)]),
                UncertainObject::from_points(2, vec![(vec![1.0, 1.0], 0.3), (vec![2.0, 0.5], 0.7)]),
                UncertainObject::from_points(3, vec![(vec![0.2, 0.1], 0.9)]),
            ],
        );
        let res = loop_arsp(&ds, &simplex(2)).unwrap();
        for (k, v) in &res.instances {
            if k.object_id != 1 {
                assert_eq!(*v, 0.0, "{k}");
            }
        }
        assert_eq!(res.object(1), Some(1.0));
        assert_eq!(res, enum_arsp(&ds, &simplex(2)).unwrap());
    }

    #[test]
    fn equal_first_score_does_not_hide_a_dominator() {
        // Under the simplex, (1,1) dominates (1,2) although both score 1 under (1,0).
        let ds = UncertainDataset::new(
            2,
            vec![
                UncertainObject::from_points(1, vec![(vec![1.0, 2.0], 1.0)]),
                UncertainObject::from_points(2, vec![(vec![1.0, 1.0], 0.5)]),
            ],
        );
        let res = loop_arsp(&ds, &simplex(2)).unwrap();
        assert_eq!(res.get(1, 1), Some(0.5));
        assert_eq!(res.get(2, 1), Some(0.5));
    }

    #[test]
    fn duplicates_discount_each_other() {
        let ds = UncertainDataset::new(
            2,
            vec![
                UncertainObject::from_points(1, vec![(vec![1.0, 1.0], 0.5)]),
                UncertainObject::from_points(2, vec![(vec![1.0, 1.0], 0.5)]),
            ],
        );
        let res = loop_arsp(&ds, &simplex(2)).unwrap();
        assert_eq!(res.get(1, 1), Some(0.25));
        assert_eq!(res.get(2, 1), Some(0.25));
        assert_eq!(res, enum_arsp(&ds, &simplex(2)).unwrap());
    }

    #[test]
    fn world_cap_is_enforced() {
        let objects = (0..30)
            .map(|i| UncertainObject::from_points(i, vec![(vec![i as f64, 0.0], 0.5), (vec![0.0, i as f64], 0.5)]))
            .collect();
        let ds = UncertainDataset::new(2, objects);
        assert_eq!(world_count(&ds), 1 << 30);
        assert!(matches!(
            enum_arsp(&ds, &simplex(2)),
            Err(ArspError::TooManyWorlds { worlds, .. }) if worlds == 1 << 30
        ));
    }

    #[test]
    fn absent_digit_counts_missing_mass() {
        let ds = UncertainDataset::new(2, vec![UncertainObject::from_points(1, vec![(vec![0.0, 0.0], 0.25)])]);
        assert_eq!(world_count(&ds), 2);
        let total = total_world_probability_exact(&ds, &simplex(2)).unwrap();
        assert_eq!(total, BigRational::one());
        assert_eq!(world_probability_exact(&ds, &[None]).unwrap(), crate::exact::ratio(3, 4));
    }
}
