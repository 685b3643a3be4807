//! Best-first traversal of an R-tree over the original instances.
//!
//! Entries leave the heap in lexicographic order of their score-space key
//! (`S_V(N_min)` for nodes, `S_V(t)` for instances); equal keys pop nodes
//! first. A dominator of `t` therefore pops before `t` or carries the same
//! key, and instances sharing a key are processed as one batch. Each object
//! owns an aggregated R-tree of the mapped instances seen so far; a fully
//! processed certain object contributes its max corner to the prune set.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::dominance::{dominates_unchecked, score};
use crate::error::Result;
use crate::model::{clamp_mass, ArspResult, UncertainDataset};
use crate::polytope::PreferenceSpec;
use crate::prepared::{lex_cmp, Prepared};
use crate::spatial::{build_rtree, AggRTree, RTree, RTreeNode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BnbStats {
    pub nodes_popped: usize,
    pub window_queries: usize,
    /// Instances assigned zero without a window query.
    pub pruned_instances: usize,
    pub prune_set_size: usize,
}

/// Max corners of fully processed certain objects.
#[derive(Debug, Clone)]
pub struct PruneSet {
    k: usize,
    corners: Vec<Vec<f64>>,
    seen_mass: Vec<f64>,
    seen_count: Vec<usize>,
    active: Vec<usize>,
}

impl PruneSet {
    pub fn new(m: usize, k: usize) -> Self {
        PruneSet {
            k,
            corners: vec![vec![f64::NEG_INFINITY; k]; m],
            seen_mass: vec![0.0; m],
            seen_count: vec![0; m],
            active: Vec::new(),
        }
    }

    /// Records a processed instance; activates the object's corner once all
    /// of its instances are in and their mass is 1.
    fn record(&mut self, obj: usize, mapped: &[f64], prob: f64, size: usize) {
        for (c, &v) in self.corners[obj].iter_mut().zip(mapped) {
            if v > *c {
                *c = v;
            }
        }
        self.seen_mass[obj] += prob;
        self.seen_count[obj] += 1;
        if self.seen_count[obj] == size && clamp_mass(self.seen_mass[obj]) == 1.0 {
            self.active.push(obj);
        }
    }

    /// True when an active corner dominates `key`.
    pub fn prunes(&self, key: &[f64]) -> bool {
        debug_assert_eq!(key.len(), self.k);
        self.active.iter().any(|&obj| dominates_unchecked(&self.corners[obj], key))
    }

    pub fn active_len(&self) -> usize {
        self.active.len()
    }

    pub fn corner(&self, obj: usize) -> Option<&[f64]> {
        self.active.contains(&obj).then(|| self.corners[obj].as_slice())
    }
}

#[derive(Debug)]
struct Entry {
    key: Vec<f64>,
    /// 0 for nodes, 1 for instances: nodes pop first on equal keys.
    kind: u8,
    seq: u64,
    id: usize,
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed for a min-heap.
        lex_cmp(&other.key, &self.key)
            .then(other.kind.cmp(&self.kind))
            .then(other.seq.cmp(&self.seq))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

pub fn bnb_arsp(ds: &UncertainDataset, spec: &PreferenceSpec) -> Result<ArspResult> {
    bnb_arsp_with_stats(ds, spec).map(|(r, _)| r)
}

pub fn bnb_arsp_with_stats(ds: &UncertainDataset, spec: &PreferenceSpec) -> Result<(ArspResult, BnbStats)> {
    let p = Prepared::new(ds, spec)?;
    let (vals, stats) = run(&p);
    Ok((ArspResult::from_flat(&p.flat, &vals), stats))
}

fn run(p: &Prepared) -> (Vec<f64>, BnbStats) {
    let flat = &p.flat;
    let n = flat.n();
    let m = flat.m();
    let mut out = vec![0.0; n];
    let mut stats = BnbStats::default();
    if n == 0 {
        return (out, stats);
    }
    let rtree = build_rtree(&flat.coords, flat.d);
    let sizes = subtree_sizes(&rtree);
    let mut obj_size = vec![0usize; m];
    for &o in &flat.object {
        obj_size[o] += 1;
    }
    let mut trees: Vec<AggRTree> = (0..m).map(|_| AggRTree::new(p.k)).collect();
    let mut nonempty: Vec<usize> = Vec::new();
    let mut prune = PruneSet::new(m, p.k);
    let node_key = |id: usize| -> Vec<f64> {
        let corner = &rtree.node(id).mbr().min_corner;
        p.vs.iter().map(|w| score(w, corner)).collect()
    };

    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    heap.push(Entry {
        key: node_key(rtree.root()),
        kind: 0,
        seq,
        id: rtree.root(),
    });
    let mut batch: Vec<usize> = Vec::new();
    let mut batch_mass: Vec<f64> = vec![0.0; m];
    let mut batch_objs: Vec<usize> = Vec::new();
    while let Some(top) = heap.pop() {
        if top.kind == 0 {
            stats.nodes_popped += 1;
            if prune.prunes(&top.key) {
                stats.pruned_instances += sizes[top.id];
                continue;
            }
            match rtree.node(top.id) {
                RTreeNode::Leaf { entries, .. } => {
                    for &i in entries {
                        let key = p.score(i).to_vec();
                        if prune.prunes(&key) {
                            stats.pruned_instances += 1;
                            continue;
                        }
                        seq += 1;
                        heap.push(Entry { key, kind: 1, seq, id: i });
                    }
                }
                RTreeNode::Internal { children, .. } => {
                    for &c in children {
                        let key = node_key(c);
                        if prune.prunes(&key) {
                            stats.pruned_instances += sizes[c];
                            continue;
                        }
                        seq += 1;
                        heap.push(Entry { key, kind: 0, seq, id: c });
                    }
                }
            }
            continue;
        }

        // Drain every instance sharing this key; no node with an equal or
        // smaller key remains in the heap.
        batch.clear();
        batch.push(top.id);
        while heap.peek().is_some_and(|e| e.kind == 1 && e.key == top.key) {
            batch.push(heap.pop().expect("peeked").id);
        }
        if prune.prunes(&top.key) {
            stats.pruned_instances += batch.len();
            continue;
        }
        batch_objs.clear();
        for &t in &batch {
            let j = flat.object[t];
            if batch_mass[j] == 0.0 {
                batch_objs.push(j);
            }
            batch_mass[j] += flat.probs[t];
        }
        for &t in &batch {
            let own = flat.object[t];
            let mut pr = flat.probs[t];
            for &j in &nonempty {
                if j != own {
                    stats.window_queries += 1;
                    let sigma = trees[j].dominated_sum(&top.key) + batch_mass[j];
                    pr *= 1.0 - clamp_mass(sigma);
                }
            }
            // Batch-mates of objects without a tree yet.
            for &j in &batch_objs {
                if j != own && trees[j].is_empty() {
                    pr *= 1.0 - clamp_mass(batch_mass[j]);
                }
            }
            out[t] = pr;
        }
        for &t in &batch {
            let own = flat.object[t];
            batch_mass[own] = 0.0;
            if trees[own].is_empty() {
                nonempty.push(own);
            }
            trees[own].insert(&top.key, flat.probs[t]);
            prune.record(own, &top.key, flat.probs[t], obj_size[own]);
        }
    }
    stats.prune_set_size = prune.active_len();
    (out, stats)
}

fn subtree_sizes(rtree: &RTree) -> Vec<usize> {
    let mut sizes = vec![0usize; rtree.node_count()];
    // Children precede parents in the arena.
    for id in 0..rtree.node_count() {
        sizes[id] = match rtree.node(id) {
            RTreeNode::Leaf { entries, .. } => entries.len(),
            RTreeNode::Internal { children, .. } => children.iter().map(|&c| sizes[c]).sum(),
        };
    }
    sizes
}
