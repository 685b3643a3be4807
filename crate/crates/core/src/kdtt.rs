//! Space-partitioning traversal over score-space points.
//!
//! Each node on the current root-to-node path keeps a candidate set `C` of
//! instances dominating its `P_max`; instances dominating `P_min` move into
//! the running state (`sigma`, `beta`, `chi`) and are undone on exit. The
//! fused form partitions while it traverses and skips subtrees whose
//! instances all have probability zero.
//!
//! Own-object mass is tracked like any other object: `sigma[own]` includes
//! the instance itself, and the leaf divides it back out of `beta`. A node is
//! pruned only when every instance in it is certainly dominated by another
//! object, which means two saturated objects, or one saturated object with
//! no instance in the node.

use std::cmp::Ordering;

use crate::dominance::dominates_unchecked;
use crate::error::Result;
use crate::model::{clamp_mass, ArspResult, UncertainDataset};
use crate::polytope::PreferenceSpec;
use crate::prepared::Prepared;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SplitVariant {
    /// Median split on one axis, axes taken round-robin by depth.
    #[default]
    Kd,
    /// Split at the bounding-box center on every axis at once.
    Quad,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KdttOptions {
    pub variant: SplitVariant,
    /// Partition during the traversal instead of building the tree first.
    pub fused: bool,
    /// Skip subtrees whose instances all have probability zero.
    pub prune: bool,
    /// Recompute `sigma` by brute force at every node and count mismatches.
    pub audit: bool,
}

impl Default for KdttOptions {
    fn default() -> Self {
        KdttOptions {
            variant: SplitVariant::Kd,
            fused: true,
            prune: true,
            audit: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct KdttStats {
    pub nodes: usize,
    pub leaves: usize,
    pub pruned: usize,
    pub audit_mismatches: usize,
}

/// Running per-path state with an undo log of exact previous values.
#[derive(Debug, Clone)]
pub struct TraversalState {
    pub sigma: Vec<f64>,
    pub beta: f64,
    pub chi: usize,
    /// Sum of saturated object indices; names the object when `chi == 1`.
    sat_sum: usize,
    log: Vec<Undo>,
}

#[derive(Debug, Clone, Copy)]
struct Undo {
    obj: usize,
    sigma: f64,
    beta: f64,
    saturated: bool,
}

impl TraversalState {
    pub fn new(m: usize) -> Self {
        TraversalState {
            sigma: vec![0.0; m],
            beta: 1.0,
            chi: 0,
            sat_sum: 0,
            log: Vec::new(),
        }
    }

    fn mark(&self) -> usize {
        self.log.len()
    }

    fn add(&mut self, obj: usize, p: f64) {
        let old = self.sigma[obj];
        let mut entry = Undo {
            obj,
            sigma: old,
            beta: self.beta,
            saturated: false,
        };
        if old < 1.0 {
            let new = clamp_mass(old + p);
            self.sigma[obj] = new;
            if new == 1.0 {
                self.beta /= 1.0 - old;
                self.chi += 1;
                self.sat_sum += obj;
                entry.saturated = true;
            } else {
                self.beta = self.beta * (1.0 - new) / (1.0 - old);
            }
        }
        self.log.push(entry);
    }

    fn undo_to(&mut self, mark: usize) {
        while self.log.len() > mark {
            let e = self.log.pop().expect("log longer than mark");
            self.sigma[e.obj] = e.sigma;
            self.beta = e.beta;
            if e.saturated {
                self.chi -= 1;
                self.sat_sum -= e.obj;
            }
        }
    }

    fn saturated_object(&self) -> Option<usize> {
        (self.chi == 1).then_some(self.sat_sum)
    }
}

pub fn kdtt_arsp(ds: &UncertainDataset, spec: &PreferenceSpec, variant: SplitVariant, fused: bool) -> Result<ArspResult> {
    let opts = KdttOptions {
        variant,
        fused,
        prune: fused,
        audit: false,
    };
    kdtt_arsp_with(ds, spec, &opts).map(|(r, _)| r)
}

pub fn kdtt_arsp_with(ds: &UncertainDataset, spec: &PreferenceSpec, opts: &KdttOptions) -> Result<(ArspResult, KdttStats)> {
    let p = Prepared::new(ds, spec)?;
    let (vals, stats) = run(&p, opts);
    Ok((ArspResult::from_flat(&p.flat, &vals), stats))
}

pub(crate) fn run(p: &Prepared, opts: &KdttOptions) -> (Vec<f64>, KdttStats) {
    let n = p.flat.n();
    let mut t = Traversal {
        p,
        opts: *opts,
        state: TraversalState::new(p.flat.m()),
        out: vec![0.0; n],
        stats: KdttStats::default(),
    };
    if n == 0 {
        return (t.out, t.stats);
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let root_c: Vec<usize> = (0..n).collect();
    if opts.fused {
        t.fused(&mut perm, &root_c, 0);
    } else {
        let tree = BuiltTree::build(p, opts.variant, &mut perm);
        t.built(&tree, 0, &root_c);
    }
    (t.out, t.stats)
}

struct Traversal<'a> {
    p: &'a Prepared,
    opts: KdttOptions,
    state: TraversalState,
    out: Vec<f64>,
    stats: KdttStats,
}

impl Traversal<'_> {
    /// Filters `c_par` against the node box, applying dominators of `pmin`.
    fn enter(&mut self, c_par: &[usize], pmin: &[f64], pmax: &[f64]) -> Vec<usize> {
        self.stats.nodes += 1;
        let mut c = Vec::new();
        for &s in c_par {
            let ss = self.p.score(s);
            if dominates_unchecked(ss, pmin) {
                self.state.add(self.p.flat.object[s], self.p.flat.probs[s]);
            } else if dominates_unchecked(ss, pmax) {
                c.push(s);
            }
        }
        if self.opts.audit {
            self.audit(pmin);
        }
        c
    }

    fn audit(&mut self, pmin: &[f64]) {
        let mut sigma = vec![0.0; self.p.flat.m()];
        for s in 0..self.p.flat.n() {
            if dominates_unchecked(self.p.score(s), pmin) {
                sigma[self.p.flat.object[s]] += self.p.flat.probs[s];
            }
        }
        for (a, b) in sigma.iter().zip(&self.state.sigma) {
            if (clamp_mass(*a) - b).abs() > 1e-9 {
                self.stats.audit_mismatches += 1;
            }
        }
    }

    /// True when every instance in `members` has probability zero.
    fn all_zero(&self, members: &[usize]) -> bool {
        match self.state.chi {
            0 => false,
            1 => {
                let sat = self.state.saturated_object().expect("chi is one");
                !members.iter().any(|&i| self.p.flat.object[i] == sat)
            }
            _ => true,
        }
    }

    fn emit(&mut self, t: usize) {
        self.stats.leaves += 1;
        let own = self.p.flat.object[t];
        let pt = self.p.flat.probs[t];
        let st = &self.state;
        self.out[t] = match st.chi {
            0 => st.beta * pt / (1.0 - st.sigma[own]),
            1 if st.saturated_object() == Some(own) => st.beta * pt,
            _ => 0.0,
        };
    }

    fn fused(&mut self, members: &mut [usize], c_par: &[usize], depth: usize) {
        let (pmin, pmax) = bounds(self.p, members);
        let mark = self.state.mark();
        let c = self.enter(c_par, &pmin, &pmax);
        if self.opts.prune && self.all_zero(members) {
            self.stats.pruned += 1;
        } else if members.len() == 1 {
            self.emit(members[0]);
        } else {
            let cuts = partition(self.p, self.opts.variant, members, depth, &pmin, &pmax);
            let mut start = 0;
            for end in cuts {
                self.fused(&mut members[start..end], &c, depth + 1);
                start = end;
            }
        }
        self.state.undo_to(mark);
    }

    fn built(&mut self, tree: &BuiltTree, id: usize, c_par: &[usize]) {
        let node = &tree.nodes[id];
        let members = &tree.perm[node.range.clone()];
        let k = self.p.k;
        let pmin = &tree.corners[2 * id * k..(2 * id + 1) * k];
        let pmax = &tree.corners[(2 * id + 1) * k..(2 * id + 2) * k];
        let mark = self.state.mark();
        let c = self.enter(c_par, pmin, pmax);
        if self.opts.prune && self.all_zero(members) {
            self.stats.pruned += 1;
        } else if members.len() == 1 {
            self.emit(members[0]);
        } else {
            for &child in &node.children {
                self.built(tree, child, &c);
            }
        }
        self.state.undo_to(mark);
    }
}

fn bounds(p: &Prepared, members: &[usize]) -> (Vec<f64>, Vec<f64>) {
    let mut lo = p.score(members[0]).to_vec();
    let mut hi = lo.clone();
    for &i in &members[1..] {
        for (j, &v) in p.score(i).iter().enumerate() {
            if v < lo[j] {
                lo[j] = v;
            }
            if v > hi[j] {
                hi[j] = v;
            }
        }
    }
    (lo, hi)
}

/// Reorders `members` into children and returns the end offset of each.
/// Every child is a proper subset, so recursion always terminates.
fn partition(p: &Prepared, variant: SplitVariant, members: &mut [usize], depth: usize, pmin: &[f64], pmax: &[f64]) -> Vec<usize> {
    let len = members.len();
    match variant {
        SplitVariant::Kd => {
            let axis = depth % p.k;
            let mid = len / 2;
            members.select_nth_unstable_by(mid, |&a, &b| p.score(a)[axis].total_cmp(&p.score(b)[axis]).then(a.cmp(&b)));
            vec![mid, len]
        }
        SplitVariant::Quad => {
            if pmin == pmax {
                return vec![len / 2, len];
            }
            let center: Vec<f64> = pmin.iter().zip(pmax).map(|(a, b)| a + (b - a) / 2.0).collect();
            let high = |i: usize, axis: usize| p.score(i)[axis] > center[axis];
            let cmp = |a: &usize, b: &usize| {
                for axis in 0..p.k {
                    match high(*a, axis).cmp(&high(*b, axis)) {
                        Ordering::Equal => continue,
                        o => return o,
                    }
                }
                a.cmp(b)
            };
            members.sort_unstable_by(cmp);
            let same = |a: usize, b: usize| (0..p.k).all(|axis| high(a, axis) == high(b, axis));
            let mut cuts = Vec::new();
            for pos in 1..len {
                if !same(members[pos - 1], members[pos]) {
                    cuts.push(pos);
                }
            }
            cuts.push(len);
            cuts
        }
    }
}

struct BuiltNode {
    range: std::ops::Range<usize>,
    children: Vec<usize>,
}

/// Fully materialized tree for the unfused traversal.
struct BuiltTree {
    perm: Vec<usize>,
    nodes: Vec<BuiltNode>,
    /// Per node: `k` min-corner values then `k` max-corner values.
    corners: Vec<f64>,
}

impl BuiltTree {
    fn build(p: &Prepared, variant: SplitVariant, perm: &mut [usize]) -> BuiltTree {
        let mut nodes = Vec::new();
        let mut corners = Vec::new();
        Self::grow(p, variant, perm, 0, 0, &mut nodes, &mut corners);
        BuiltTree {
            perm: perm.to_vec(),
            nodes,
            corners,
        }
    }

    fn grow(
        p: &Prepared,
        variant: SplitVariant,
        perm: &mut [usize],
        offset: usize,
        depth: usize,
        nodes: &mut Vec<BuiltNode>,
        corners: &mut Vec<f64>,
    ) -> usize {
        let id = nodes.len();
        let (lo, hi) = bounds(p, perm);
        corners.extend_from_slice(&lo);
        corners.extend_from_slice(&hi);
        nodes.push(BuiltNode {
            range: offset..offset + perm.len(),
            children: Vec::new(),
        });
        if perm.len() > 1 {
            let cuts = partition(p, variant, perm, depth, &lo, &hi);
            let mut start = 0;
            let mut children = Vec::with_capacity(cuts.len());
            for end in cuts {
                children.push(Self::grow(p, variant, &mut perm[start..end], offset + start, depth + 1, nodes, corners));
                start = end;
            }
            nodes[id].children = children;
        }
        id
    }
}
