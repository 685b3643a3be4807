//! Weight-ratio geometry: region codes, the per-region dominance
//! hyperplanes, a scan-based halfspace report for any `d`, and the planar
//! angular method.
//!
//! Around a target `t`, the space splits into `2^(d-1)` regions by comparing
//! the first `d - 1` coordinates; bit `i` is 1 when `s[i] >= t[i]`. Within
//! region `k` the instances dominating `t` are exactly those on or below
//! `x[d] = sum_i c_i (t[i] - x[i]) + t[d]`, with `c_i = l_i` on bit 0 and
//! `h_i` on bit 1.
//!
//! For `d = 2` the union of the two regions is an angular sector: `s`
//! dominates `t` iff the angle of `s - t` lies in
//! `[pi - atan l, 2 pi - atan h]`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::dominance::f_dominates_ratio_unchecked;
use crate::error::{ArspError, Result};
use crate::model::{clamp_mass, ArspResult, FlatInstances, UncertainDataset};
use crate::polytope::RatioBox;

/// Angles within this distance of an interval endpoint are re-decided by the
/// exact ratio predicate.
pub const ANGLE_GUARD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RegionCode(pub u32);

impl RegionCode {
    pub fn of(t: &[f64], s: &[f64]) -> RegionCode {
        let mut k = 0u32;
        for i in 0..t.len() - 1 {
            if s[i] >= t[i] {
                k |= 1 << i;
            }
        }
        RegionCode(k)
    }

    pub fn bit(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }
}

/// Groups `others` by region around `t`; values are positions in `others`.
pub fn region_partition<'a>(t: &[f64], others: impl IntoIterator<Item = &'a [f64]>) -> BTreeMap<RegionCode, Vec<usize>> {
    assert!(t.len() >= 2 && t.len() <= 32, "region codes need 2 <= d <= 32");
    let mut out: BTreeMap<RegionCode, Vec<usize>> = BTreeMap::new();
    for (pos, s) in others.into_iter().enumerate() {
        out.entry(RegionCode::of(t, s)).or_default().push(pos);
    }
    out
}

/// `x[d] = offset - sum_i coeffs[i] * x[i]`, anchored at `apex`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfspacePlane {
    pub coeffs: Vec<f64>,
    pub offset: f64,
    pub apex: Vec<f64>,
}

impl HalfspacePlane {
    /// On or below the plane; same arithmetic as the ratio predicate.
    pub fn contains(&self, s: &[f64]) -> bool {
        let t = &self.apex;
        let last = t.len() - 1;
        let mut rhs = 0.0;
        for (i, &c) in self.coeffs.iter().enumerate() {
            rhs += c * (t[i] - s[i]);
        }
        s[last] - t[last] <= rhs
    }

    /// The dual point `(-c_1, .., -c_{d-1}, -offset)`.
    pub fn dual_point(&self) -> Vec<f64> {
        let mut p: Vec<f64> = self.coeffs.iter().map(|c| -c).collect();
        p.push(-self.offset);
        p
    }

    /// Height of the plane above `x[..d-1]`.
    pub fn height(&self, x: &[f64]) -> f64 {
        self.offset - self.coeffs.iter().zip(x).map(|(c, v)| c * v).sum::<f64>()
    }
}

pub fn hyperplane_for(t: &[f64], k: RegionCode, rb: &RatioBox) -> HalfspacePlane {
    assert_eq!(t.len(), rb.d, "dimension mismatch");
    let coeffs: Vec<f64> = rb
        .ranges
        .iter()
        .enumerate()
        .map(|(i, &(l, h))| if k.bit(i) { h } else { l })
        .collect();
    let last = t.len() - 1;
    let offset = coeffs.iter().zip(t).map(|(c, x)| c * x).sum::<f64>() + t[last];
    HalfspacePlane {
        coeffs,
        offset,
        apex: t.to_vec(),
    }
}

/// Positions in `region` lying on or below the region's plane.
pub fn halfspace_report_scan(t: &[f64], k: RegionCode, rb: &RatioBox, region: &[&[f64]]) -> Vec<usize> {
    let plane = hyperplane_for(t, k, rb);
    region
        .iter()
        .enumerate()
        .filter(|(_, s)| plane.contains(s))
        .map(|(i, _)| i)
        .collect()
}

/// Angle of `s - t` in `[0, 2 pi)`, measured from the `+x` ray.
pub fn angle(t: &[f64], s: &[f64]) -> f64 {
    let a = (s[1] - t[1]).atan2(s[0] - t[0]);
    let a = if a < 0.0 { a + 2.0 * PI } else { a };
    if a >= 2.0 * PI {
        0.0
    } else {
        a
    }
}

/// Closed angular interval of dominators for a planar ratio box.
pub fn query_interval(rb: &RatioBox) -> (f64, f64) {
    let (l, h) = rb.ranges[0];
    (PI - l.atan(), 2.0 * PI - h.atan())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// Every object has exactly one instance.
    Singleton,
    General,
}

/// Product kept as `mant * 2^exp` so that long products do not underflow.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Scaled {
    mant: f64,
    exp: i64,
}

const RESCALE: f64 = 1.0 / (1u128 << 100) as f64;

impl Scaled {
    const ONE: Scaled = Scaled { mant: 1.0, exp: 0 };

    fn mul(self, x: f64) -> Scaled {
        let mut s = Scaled {
            mant: self.mant * x,
            exp: self.exp,
        };
        while s.mant != 0.0 && s.mant < RESCALE {
            s.mant *= (1u128 << 100) as f64;
            s.exp -= 100;
        }
        s
    }

    /// `self / base` as a plain float.
    fn div(self, base: Scaled) -> f64 {
        ldexp(self.mant / base.mant, self.exp - base.exp)
    }
}

fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e < -100 {
        x *= RESCALE;
        e += 100;
        if x == 0.0 {
            return 0.0;
        }
    }
    while e > 100 {
        x *= (1u128 << 100) as f64;
        e -= 100;
    }
    x * 2f64.powi(e as i32)
}

/// Instances of other objects around one target, sorted by angle.
#[derive(Debug, Clone)]
pub struct AngularIndex {
    pub target: usize,
    /// `(angle, instance)`, non-decreasing in angle, stable in input order.
    pub entries: Vec<(f64, usize)>,
    /// Other-object instances at the target's exact location.
    pub coincident: Vec<usize>,
    /// Singleton profile only: `prefix[j]` is the product of `1 - p` over
    /// `entries[..j]` excluding certain instances, whose count is `zeros[j]`.
    prefix: Vec<Scaled>,
    zeros: Vec<u32>,
}

impl AngularIndex {
    pub fn build(flat: &FlatInstances, target: usize, with_prefix: bool) -> AngularIndex {
        let t = flat.point(target);
        let own = flat.object[target];
        let mut entries = Vec::with_capacity(flat.n());
        let mut coincident = Vec::new();
        for s in 0..flat.n() {
            if flat.object[s] == own {
                continue;
            }
            let ps = flat.point(s);
            if ps == t {
                coincident.push(s);
            } else {
                entries.push((angle(t, ps), s));
            }
        }
        entries.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (mut prefix, mut zeros) = (Vec::new(), Vec::new());
        if with_prefix {
            prefix.reserve(entries.len() + 1);
            zeros.reserve(entries.len() + 1);
            prefix.push(Scaled::ONE);
            zeros.push(0);
            for &(_, s) in &entries {
                let p = clamp_mass(flat.probs[s]);
                let (last_p, last_z) = (*prefix.last().unwrap(), *zeros.last().unwrap());
                if p == 1.0 {
                    prefix.push(last_p);
                    zeros.push(last_z + 1);
                } else {
                    prefix.push(last_p.mul(1.0 - p));
                    zeros.push(last_z);
                }
            }
        }
        AngularIndex {
            target,
            entries,
            coincident,
            prefix,
            zeros,
        }
    }

    fn lower_bound(&self, a: f64) -> usize {
        self.entries.partition_point(|e| e.0 < a)
    }

    fn upper_bound(&self, a: f64) -> usize {
        self.entries.partition_point(|e| e.0 <= a)
    }

    /// Calls `f` with every dominator of the target: coincident instances,
    /// guard-zone instances confirmed by the exact predicate, and the core
    /// range. The core range is returned instead of visited when
    /// `visit_core` is false.
    fn dominators(&self, flat: &FlatInstances, rb: &RatioBox, visit_core: bool, mut f: impl FnMut(usize)) -> std::ops::Range<usize> {
        let t = flat.point(self.target);
        for &s in &self.coincident {
            f(s);
        }
        let (a, b) = query_interval(rb);
        let lo0 = self.lower_bound(a - ANGLE_GUARD);
        let lo1 = self.upper_bound(a + ANGLE_GUARD);
        let hi0 = self.lower_bound(b - ANGLE_GUARD);
        let hi1 = self.upper_bound(b + ANGLE_GUARD);
        for &(_, s) in self.entries[lo0..lo1].iter().chain(&self.entries[hi0..hi1]) {
            if f_dominates_ratio_unchecked(rb, flat.point(s), t) {
                f(s);
            }
        }
        let core = lo1..hi0.max(lo1);
        if visit_core {
            for &(_, s) in &self.entries[core.clone()] {
                f(s);
            }
        }
        core
    }

    /// Singleton-profile answer: own probability times the product of
    /// `1 - p` over all dominators.
    fn singleton_prob(&self, flat: &FlatInstances, rb: &RatioBox) -> f64 {
        let mut pr = flat.probs[self.target];
        let core = self.dominators(flat, rb, false, |s| pr *= 1.0 - clamp_mass(flat.probs[s]));
        if self.zeros[core.end] > self.zeros[core.start] {
            return 0.0;
        }
        pr * self.prefix[core.end].div(self.prefix[core.start])
    }

    fn general_prob(&self, flat: &FlatInstances, rb: &RatioBox, sigma: &mut [f64], touched: &mut Vec<usize>) -> f64 {
        self.dominators(flat, rb, true, |s| {
            let j = flat.object[s];
            if sigma[j] == 0.0 {
                touched.push(j);
            }
            sigma[j] += flat.probs[s];
        });
        let mut pr = flat.probs[self.target];
        for &j in touched.iter() {
            pr *= 1.0 - clamp_mass(sigma[j]);
            sigma[j] = 0.0;
        }
        touched.clear();
        pr
    }
}

fn check_input(ds: &UncertainDataset, rb: &RatioBox, profile: Profile) -> Result<()> {
    if ds.d != 2 {
        return Err(ArspError::NotPlanar(ds.d));
    }
    if rb.d != 2 {
        return Err(ArspError::DimensionMismatch { expected: 2, found: rb.d });
    }
    if profile == Profile::Singleton && !ds.is_singleton_profile() {
        return Err(ArspError::ProfileMismatch(
            "singleton profile requires exactly one instance per object".into(),
        ));
    }
    Ok(())
}

/// Preprocessed angular indexes for every instance; reusable across ratio
/// boxes. Memory is quadratic in the number of instances.
#[derive(Debug, Clone)]
pub struct Dual2dIndex {
    flat: FlatInstances,
    profile: Profile,
    indexes: Vec<AngularIndex>,
}

pub fn dual2d_preprocess(ds: &UncertainDataset, profile: Profile) -> Result<Dual2dIndex> {
    check_input(ds, &RatioBox::uniform(2, 1.0, 1.0)?, profile)?;
    let flat = ds.flat();
    let with_prefix = profile == Profile::Singleton;
    let indexes = (0..flat.n()).map(|t| AngularIndex::build(&flat, t, with_prefix)).collect();
    Ok(Dual2dIndex { flat, profile, indexes })
}

impl Dual2dIndex {
    pub fn angular(&self, target: usize) -> &AngularIndex {
        &self.indexes[target]
    }

    pub fn query(&self, rb: &RatioBox) -> Result<ArspResult> {
        if rb.d != 2 {
            return Err(ArspError::DimensionMismatch { expected: 2, found: rb.d });
        }
        let mut sigma = vec![0.0; self.flat.m()];
        let mut touched = Vec::new();
        let vals: Vec<f64> = self
            .indexes
            .iter()
            .map(|ix| match self.profile {
                Profile::Singleton => ix.singleton_prob(&self.flat, rb),
                Profile::General => ix.general_prob(&self.flat, rb, &mut sigma, &mut touched),
            })
            .collect();
        Ok(ArspResult::from_flat(&self.flat, &vals))
    }
}

/// Builds one target's index at a time, so memory stays linear.
pub fn dual2d_arsp(ds: &UncertainDataset, rb: &RatioBox, profile: Profile) -> Result<ArspResult> {
    check_input(ds, rb, profile)?;
    let flat = ds.flat();
    let mut sigma = vec![0.0; flat.m()];
    let mut touched = Vec::new();
    let vals: Vec<f64> = (0..flat.n())
        .map(|t| match profile {
            Profile::Singleton => AngularIndex::build(&flat, t, true).singleton_prob(&flat, rb),
            Profile::General => AngularIndex::build(&flat, t, false).general_prob(&flat, rb, &mut sigma, &mut touched),
        })
        .collect();
    Ok(ArspResult::from_flat(&flat, &vals))
}
