//! Uncertain datasets and the per-instance result model shared by every
//! algorithm in the crate.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Object totals within this distance of 1 are treated as certain.
pub const CERTAIN_EPS: f64 = 1e-12;

/// Slack allowed on `sum(p) <= 1` before validation complains.
pub const TOTAL_PROB_SLACK: f64 = 1e-12;

/// Identity of an instance. Coordinates are not identity: duplicates are legal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InstanceKey {
    pub object_id: u32,
    pub instance_id: u32,
}

impl InstanceKey {
    pub fn new(object_id: u32, instance_id: u32) -> Self {
        Self {
            object_id,
            instance_id,
        }
    }
}

impl fmt::Display for InstanceKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t({},{})", self.object_id, self.instance_id)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub object_id: u32,
    pub instance_id: u32,
    /// Attribute values, lower is better.
    pub coords: Vec<f64>,
    pub prob: f64,
}

impl Instance {
    pub fn new(object_id: u32, instance_id: u32, coords: Vec<f64>, prob: f64) -> Self {
        Self {
            object_id,
            instance_id,
            coords,
            prob,
        }
    }

    pub fn key(&self) -> InstanceKey {
        InstanceKey::new(self.object_id, self.instance_id)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UncertainObject {
    pub object_id: u32,
    pub instances: Vec<Instance>,
}

impl UncertainObject {
    pub fn new(object_id: u32, instances: Vec<Instance>) -> Self {
        Self {
            object_id,
            instances,
        }
    }

    /// Builds an object from `(coords, prob)` pairs, numbering instances from 1.
    pub fn from_points(object_id: u32, points: Vec<(Vec<f64>, f64)>) -> Self {
        let instances = points
            .into_iter()
            .enumerate()
            .map(|(j, (coords, prob))| Instance::new(object_id, j as u32 + 1, coords, prob))
            .collect();
        Self::new(object_id, instances)
    }

    pub fn total_prob(&self) -> f64 {
        self.instances.iter().map(|t| t.prob).sum()
    }

    /// True when the object occurs with probability 1 (up to [`CERTAIN_EPS`]).
    pub fn is_certain(&self) -> bool {
        (1.0 - self.total_prob()).abs() <= CERTAIN_EPS
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UncertainDataset {
    pub d: usize,
    pub objects: Vec<UncertainObject>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    ProbOutOfRange,
    NonFiniteCoord,
    DimensionMismatch,
    EmptyObject,
    TotalExceedsOne,
    ObjectIdMismatch,
    DuplicateObjectId,
    DuplicateInstanceId,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub object_id: u32,
    pub instance_id: Option<u32>,
    pub kind: ViolationKind,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.instance_id {
            Some(j) => write!(f, "object {} instance {}: {:?} ({})", self.object_id, j, self.kind, self.detail),
            None => write!(f, "object {}: {:?} ({})", self.object_id, self.kind, self.detail),
        }
    }
}

impl UncertainDataset {
    pub fn new(d: usize, objects: Vec<UncertainObject>) -> Self {
        Self { d, objects }
    }

    pub fn m(&self) -> usize {
        self.objects.len()
    }

    pub fn n(&self) -> usize {
        self.objects.iter().map(|o| o.instances.len()).sum()
    }

    pub fn instances(&self) -> impl Iterator<Item = &Instance> {
        self.objects.iter().flat_map(|o| o.instances.iter())
    }

    /// True when every object has exactly one instance.
    pub fn is_singleton_profile(&self) -> bool {
        self.objects.iter().all(|o| o.instances.len() == 1)
    }

    /// Returns every broken invariant; an empty list means the dataset is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut seen_objects = BTreeSet::new();
        for obj in &self.objects {
            let oid = obj.object_id;
            if !seen_objects.insert(oid) {
                out.push(Violation {
                    object_id: oid,
                    instance_id: None,
                    kind: ViolationKind::DuplicateObjectId,
                    detail: "object id appears more than once".into(),
                });
            }
            if obj.instances.is_empty() {
                out.push(Violation {
                    object_id: oid,
                    instance_id: None,
                    kind: ViolationKind::EmptyObject,
                    detail: "object has no instances".into(),
                });
            }
            let mut seen_instances = BTreeSet::new();
            for t in &obj.instances {
                let iv = |kind, detail: String| Violation {
                    object_id: oid,
                    instance_id: Some(t.instance_id),
                    kind,
                    detail,
                };
                if t.object_id != oid {
                    out.push(iv(
                        ViolationKind::ObjectIdMismatch,
                        format!("instance carries object id {}", t.object_id),
                    ));
                }
                if !seen_instances.insert(t.instance_id) {
                    out.push(iv(ViolationKind::DuplicateInstanceId, "instance id repeated".into()));
                }
                if !(t.prob > 0.0 && t.prob <= 1.0) {
                    out.push(iv(ViolationKind::ProbOutOfRange, format!("p = {} not in (0, 1]", t.prob)));
                }
                if t.coords.len() != self.d {
                    out.push(iv(
                        ViolationKind::DimensionMismatch,
                        format!("{} coordinates, dataset d = {}", t.coords.len(), self.d),
                    ));
                }
                if t.coords.iter().any(|x| !x.is_finite()) {
                    out.push(iv(ViolationKind::NonFiniteCoord, "coordinate is not finite".into()));
                }
            }
            let total = obj.total_prob();
            if total > 1.0 + TOTAL_PROB_SLACK {
                out.push(Violation {
                    object_id: oid,
                    instance_id: None,
                    kind: ViolationKind::TotalExceedsOne,
                    detail: format!("total probability {total}"),
                });
            }
        }
        out
    }

    /// Number of coordinate-identical instance pairs belonging to different
    /// objects. Such pairs dominate each other under the non-strict definition.
    pub fn cross_object_ties(&self) -> usize {
        let mut buckets: BTreeMap<Vec<u64>, Vec<u32>> = BTreeMap::new();
        for t in self.instances() {
            let bits = t.coords.iter().map(|x| x.to_bits()).collect();
            buckets.entry(bits).or_default().push(t.object_id);
        }
        let mut ties = 0;
        for ids in buckets.values() {
            for a in 0..ids.len() {
                for b in a + 1..ids.len() {
                    if ids[a] != ids[b] {
                        ties += 1;
                    }
                }
            }
        }
        ties
    }

    pub fn flat(&self) -> FlatInstances {
        FlatInstances::new(self)
    }
}

/// Instances laid out contiguously, indexed `0..n` in dataset order.
#[derive(Debug, Clone)]
pub struct FlatInstances {
    pub d: usize,
    pub coords: Vec<f64>,
    pub probs: Vec<f64>,
    /// Index of the owning object in `0..m`.
    pub object: Vec<usize>,
    pub keys: Vec<InstanceKey>,
    pub object_ids: Vec<u32>,
    pub object_totals: Vec<f64>,
}

impl FlatInstances {
    fn new(ds: &UncertainDataset) -> Self {
        let n = ds.n();
        let mut flat = FlatInstances {
            d: ds.d,
            coords: Vec::with_capacity(n * ds.d),
            probs: Vec::with_capacity(n),
            object: Vec::with_capacity(n),
            keys: Vec::with_capacity(n),
            object_ids: Vec::with_capacity(ds.m()),
            object_totals: Vec::with_capacity(ds.m()),
        };
        for (oi, obj) in ds.objects.iter().enumerate() {
            flat.object_ids.push(obj.object_id);
            flat.object_totals.push(obj.total_prob());
            for t in &obj.instances {
                flat.coords.extend_from_slice(&t.coords);
                flat.probs.push(t.prob);
                flat.object.push(oi);
                flat.keys.push(t.key());
            }
        }
        flat
    }

    pub fn n(&self) -> usize {
        self.probs.len()
    }

    pub fn m(&self) -> usize {
        self.object_ids.len()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    pub fn is_certain(&self, object: usize) -> bool {
        (1.0 - self.object_totals[object]).abs() <= CERTAIN_EPS
    }
}

/// Clamps an accumulated probability mass to exactly 1 when it is within
/// [`CERTAIN_EPS`] of it.
#[inline]
pub fn clamp_mass(sigma: f64) -> f64 {
    if (1.0 - sigma).abs() <= CERTAIN_EPS || sigma > 1.0 {
        1.0
    } else {
        sigma
    }
}

/// Rskyline probabilities of every instance plus per-object sums.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ArspResult {
    pub instances: BTreeMap<InstanceKey, f64>,
    pub objects: BTreeMap<u32, f64>,
}

impl ArspResult {
    /// Builds a result from values given in [`FlatInstances`] order.
    pub fn from_flat(flat: &FlatInstances, values: &[f64]) -> Self {
        assert_eq!(values.len(), flat.n(), "one value per instance");
        let mut res = ArspResult::default();
        for &oid in &flat.object_ids {
            res.objects.insert(oid, 0.0);
        }
        for (key, &v) in flat.keys.iter().zip(values) {
            res.instances.insert(*key, v);
            *res.objects.get_mut(&key.object_id).expect("object registered") += v;
        }
        res
    }

    pub fn get(&self, object_id: u32, instance_id: u32) -> Option<f64> {
        self.instances.get(&InstanceKey::new(object_id, instance_id)).copied()
    }

    pub fn object(&self, object_id: u32) -> Option<f64> {
        self.objects.get(&object_id).copied()
    }

    /// Number of instances with positive rskyline probability.
    pub fn arsp_size(&self) -> usize {
        self.instances.values().filter(|&&v| v > 0.0).count()
    }

    /// Largest per-instance absolute difference, or `None` when the two
    /// results cover different instance sets.
    pub fn max_abs_diff(&self, other: &ArspResult) -> Option<f64> {
        if self.instances.len() != other.instances.len() {
            return None;
        }
        let mut worst = 0.0f64;
        for (k, a) in &self.instances {
            let b = other.instances.get(k)?;
            worst = worst.max((a - b).abs());
        }
        Some(worst)
    }

    /// Objects sorted by decreasing probability; ties by id.
    pub fn top_objects(&self, k: usize) -> Vec<(u32, f64)> {
        let mut v: Vec<_> = self.objects.iter().map(|(&id, &p)| (id, p)).collect();
        v.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        v.truncate(k);
        v
    }

    /// Checks `0 <= Pr(t) <= p(t)` and that object values are instance sums.
    pub fn check_invariants(&self, ds: &UncertainDataset) -> Result<(), String> {
        for obj in &ds.objects {
            let mut sum = 0.0;
            for t in &obj.instances {
                let v = self
                    .instances
                    .get(&t.key())
                    .ok_or_else(|| format!("{} missing", t.key()))?;
                if !(*v >= 0.0 && *v <= t.prob * (1.0 + 1e-12)) {
                    return Err(format!("{}: value {} outside [0, {}]", t.key(), v, t.prob));
                }
                sum += v;
            }
            let ov = self
                .objects
                .get(&obj.object_id)
                .ok_or_else(|| format!("object {} missing", obj.object_id))?;
            if (ov - sum).abs() > 1e-12 {
                return Err(format!("object {}: {} != sum {}", obj.object_id, ov, sum));
            }
        }
        if self.instances.len() != ds.n() {
            return Err("result covers a different instance set".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obj(id: u32, probs: &[f64]) -> UncertainObject {
        UncertainObject::from_points(id, probs.iter().map(|&p| (vec![0.0, 1.0], p)).collect())
    }

    #[test]
    fn valid_dataset_has_no_violations() {
        let ds = UncertainDataset::new(2, vec![obj(1, &[0.5, 0.5]), obj(2, &[0.3])]);
        assert!(ds.validate().is_empty());
        assert_eq!(ds.n(), 3);
        assert_eq!(ds.m(), 2);
    }

    #[test]
    fn total_above_one_is_one_violation() {
        let ds = UncertainDataset::new(2, vec![obj(1, &[0.75, 0.75])]);
        let v = ds.validate();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, ViolationKind::TotalExceedsOne);
        assert_eq!(v[0].object_id, 1);
    }

    #[test]
    fn zero_probability_is_one_violation() {
        let ds = UncertainDataset::new(2, vec![obj(1, &[0.0, 0.5])]);
        let v = ds.validate();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, ViolationKind::ProbOutOfRange);
        assert_eq!(v[0].instance_id, Some(1));
    }

    #[test]
    fn structural_violations() {
        let mut a = obj(1, &[0.5]);
        a.instances[0].coords.push(3.0);
        a.instances.push(Instance::new(9, 1, vec![0.0, f64::NAN], 0.1));
        let ds = UncertainDataset::new(2, vec![a, obj(1, &[0.2]), UncertainObject::new(4, vec![])]);
        let kinds: Vec<_> = ds.validate().into_iter().map(|v| v.kind).collect();
        for k in [
            ViolationKind::DimensionMismatch,
            ViolationKind::ObjectIdMismatch,
            ViolationKind::DuplicateInstanceId,
            ViolationKind::NonFiniteCoord,
            ViolationKind::DuplicateObjectId,
            ViolationKind::EmptyObject,
        ] {
            assert!(kinds.contains(&k), "{k:?} not reported in {kinds:?}");
        }
    }

    #[test]
    fn ties_across_objects_are_counted() {
        let ds = UncertainDataset::new(2, vec![obj(1, &[0.5, 0.5]), obj(2, &[1.0])]);
        // All three instances share coordinates; the two of object 1 tie with object 2.
        assert_eq!(ds.cross_object_ties(), 2);
    }

    #[test]
    fn clamp_snaps_near_one() {
        assert_eq!(clamp_mass(1.0 - 1e-13), 1.0);
        assert_eq!(clamp_mass(0.5), 0.5);
        assert_eq!(clamp_mass(1.0 + 1e-9), 1.0);
    }

    #[test]
    fn result_aggregates_objects() {
        let ds = UncertainDataset::new(2, vec![obj(1, &[0.5, 0.5]), obj(2, &[0.3])]);
        let flat = ds.flat();
        let res = ArspResult::from_flat(&flat, &[0.25, 0.125, 0.3]);
        assert_eq!(res.object(1), Some(0.375));
        assert_eq!(res.arsp_size(), 3);
        assert!(res.check_invariants(&ds).is_ok());
        assert_eq!(res.top_objects(1), vec![(1, 0.375)]);
        let bad = ArspResult::from_flat(&flat, &[0.75, 0.0, 0.3]);
        assert!(bad.check_invariants(&ds).is_err());
    }
}
