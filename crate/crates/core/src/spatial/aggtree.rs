use super::{Mbr, DEFAULT_FANOUT};

#[derive(Debug, Clone)]
enum Kind {
    Leaf(Vec<usize>),
    Internal(Vec<usize>),
}

#[derive(Debug, Clone)]
struct Node {
    mbr: Mbr,
    sum: f64,
    kind: Kind,
}

/// Insert-only R-tree over weighted points. Every node caches the total
/// weight of its subtree, so a window whose box swallows a node is answered
/// from the cache. Overflowing nodes are split with Guttman's quadratic split.
#[derive(Debug, Clone)]
pub struct AggRTree {
    dim: usize,
    cap: usize,
    points: Vec<f64>,
    probs: Vec<f64>,
    nodes: Vec<Node>,
    root: Option<usize>,
}

impl AggRTree {
    pub fn new(dim: usize) -> Self {
        Self::with_capacity(dim, DEFAULT_FANOUT)
    }

    pub fn with_capacity(dim: usize, cap: usize) -> Self {
        assert!(dim > 0 && cap >= 3);
        Self {
            dim,
            cap,
            points: Vec::new(),
            probs: Vec::new(),
            nodes: Vec::new(),
            root: None,
        }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Total weight stored in the tree.
    pub fn total(&self) -> f64 {
        self.root.map_or(0.0, |r| self.nodes[r].sum)
    }

    fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    fn entry_mbr(&self, leaf: bool, e: usize) -> Mbr {
        if leaf {
            Mbr::from_point(self.point(e))
        } else {
            self.nodes[e].mbr.clone()
        }
    }

    pub fn insert(&mut self, point: &[f64], prob: f64) {
        assert_eq!(point.len(), self.dim);
        let idx = self.probs.len();
        self.points.extend_from_slice(point);
        self.probs.push(prob);
        match self.root {
            None => {
                self.nodes.push(Node {
                    mbr: Mbr::from_point(point),
                    sum: prob,
                    kind: Kind::Leaf(vec![idx]),
                });
                self.root = Some(self.nodes.len() - 1);
            }
            Some(root) => {
                if let Some(sibling) = self.insert_rec(root, idx) {
                    let mbr = self.nodes[root].mbr.union(&self.nodes[sibling].mbr);
                    let sum = self.nodes[root].sum + self.nodes[sibling].sum;
                    self.nodes.push(Node {
                        mbr,
                        sum,
                        kind: Kind::Internal(vec![root, sibling]),
                    });
                    self.root = Some(self.nodes.len() - 1);
                }
            }
        }
    }

    /// Inserts point `idx` below `node`; returns a new sibling if `node` split.
    fn insert_rec(&mut self, node: usize, idx: usize) -> Option<usize> {
        let prob = self.probs[idx];
        let p = self.point(idx).to_vec();
        self.nodes[node].mbr.expand_point(&p);
        self.nodes[node].sum += prob;
        let overflow = match &self.nodes[node].kind {
            Kind::Leaf(_) => {
                if let Kind::Leaf(entries) = &mut self.nodes[node].kind {
                    entries.push(idx);
                    entries.len() > self.cap
                } else {
                    unreachable!()
                }
            }
            Kind::Internal(children) => {
                let child = self.choose_subtree(children, &p);
                if let Some(sib) = self.insert_rec(child, idx) {
                    if let Kind::Internal(children) = &mut self.nodes[node].kind {
                        children.push(sib);
                        children.len() > self.cap
                    } else {
                        unreachable!()
                    }
                } else {
                    false
                }
            }
        };
        if overflow {
            Some(self.split(node))
        } else {
            None
        }
    }

    fn choose_subtree(&self, children: &[usize], p: &[f64]) -> usize {
        let mut best = children[0];
        let mut best_key = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
        for &c in children {
            let m = &self.nodes[c].mbr;
            let mut grown = m.clone();
            grown.expand_point(p);
            let key = (
                grown.volume() - m.volume(),
                margin(&grown) - margin(m),
                m.volume(),
            );
            if key < best_key {
                best_key = key;
                best = c;
            }
        }
        best
    }

    /// Quadratic split of an overflowing node; the node keeps one group and
    /// the returned new node gets the other.
    fn split(&mut self, node: usize) -> usize {
        let (leaf, entries) = match &mut self.nodes[node].kind {
            Kind::Leaf(e) => (true, std::mem::take(e)),
            Kind::Internal(e) => (false, std::mem::take(e)),
        };
        let boxes: Vec<Mbr> = entries.iter().map(|&e| self.entry_mbr(leaf, e)).collect();
        let min_fill = (self.cap + 1) / 3;

        let (mut s1, mut s2) = (0, 1);
        let mut worst = f64::NEG_INFINITY;
        for a in 0..boxes.len() {
            for b in a + 1..boxes.len() {
                let j = boxes[a].union(&boxes[b]);
                let waste = (j.volume() - boxes[a].volume() - boxes[b].volume(), margin(&j));
                if waste.0 > worst || (waste.0 == worst && waste.1 > margin(&boxes[s1].union(&boxes[s2]))) {
                    worst = waste.0;
                    s1 = a;
                    s2 = b;
                }
            }
        }
        let mut groups = [vec![s1], vec![s2]];
        let mut gm = [boxes[s1].clone(), boxes[s2].clone()];
        let mut rest: Vec<usize> = (0..boxes.len()).filter(|&i| i != s1 && i != s2).collect();
        while !rest.is_empty() {
            for g in 0..2 {
                if groups[g].len() + rest.len() == min_fill {
                    for &i in &rest {
                        gm[g].expand(&boxes[i]);
                    }
                    groups[g].append(&mut rest);
                    break;
                }
            }
            if rest.is_empty() {
                break;
            }
            // Pick the entry with the strongest preference for one group.
            let mut pick = 0;
            let mut pick_diff = f64::NEG_INFINITY;
            let mut pick_group = 0;
            for (r, &i) in rest.iter().enumerate() {
                let d0 = gm[0].union(&boxes[i]).volume() - gm[0].volume();
                let d1 = gm[1].union(&boxes[i]).volume() - gm[1].volume();
                let diff = (d0 - d1).abs();
                if diff > pick_diff {
                    pick_diff = diff;
                    pick = r;
                    pick_group = if d0 < d1 {
                        0
                    } else if d1 < d0 {
                        1
                    } else if groups[0].len() <= groups[1].len() {
                        0
                    } else {
                        1
                    };
                }
            }
            let i = rest.swap_remove(pick);
            gm[pick_group].expand(&boxes[i]);
            groups[pick_group].push(i);
        }

        let [g0, g1] = groups;
        let [m0, m1] = gm;
        let take = |g: Vec<usize>| -> Vec<usize> { g.into_iter().map(|i| entries[i]).collect() };
        let (e0, e1) = (take(g0), take(g1));
        let sum_of = |tree: &Self, es: &[usize]| -> f64 {
            if leaf {
                es.iter().map(|&e| tree.probs[e]).sum()
            } else {
                es.iter().map(|&e| tree.nodes[e].sum).sum()
            }
        };
        let (sum0, sum1) = (sum_of(self, &e0), sum_of(self, &e1));
        let wrap = |es| if leaf { Kind::Leaf(es) } else { Kind::Internal(es) };
        self.nodes[node] = Node {
            mbr: m0,
            sum: sum0,
            kind: wrap(e0),
        };
        self.nodes.push(Node {
            mbr: m1,
            sum: sum1,
            kind: wrap(e1),
        });
        self.nodes.len() - 1
    }

    /// Total weight of points `p` with `lo <= p <= hi` (closed box).
    pub fn window_sum(&self, lo: &[f64], hi: &[f64]) -> f64 {
        let Some(root) = self.root else { return 0.0 };
        let mut total = 0.0;
        let mut stack = vec![root];
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id];
            if !node.mbr.intersects(lo, hi) {
                continue;
            }
            if node.mbr.inside(lo, hi) {
                total += node.sum;
                continue;
            }
            match &node.kind {
                Kind::Leaf(entries) => {
                    for &e in entries {
                        let p = self.point(e);
                        if (0..self.dim).all(|k| lo[k] <= p[k] && p[k] <= hi[k]) {
                            total += self.probs[e];
                        }
                    }
                }
                Kind::Internal(children) => stack.extend(children.iter().copied()),
            }
        }
        total
    }

    /// Weight dominated by `hi`: points with `p <= hi` coordinatewise.
    pub fn dominated_sum(&self, hi: &[f64]) -> f64 {
        let lo = vec![f64::NEG_INFINITY; self.dim];
        self.window_sum(&lo, hi)
    }

    /// Recomputes cached sums bottom-up and reports the largest discrepancy.
    pub fn audit_sums(&self) -> f64 {
        fn walk(t: &AggRTree, id: usize, worst: &mut f64) -> f64 {
            let node = &t.nodes[id];
            let s: f64 = match &node.kind {
                Kind::Leaf(es) => es.iter().map(|&e| t.probs[e]).sum(),
                Kind::Internal(cs) => cs.iter().map(|&c| walk(t, c, worst)).sum(),
            };
            *worst = worst.max((s - node.sum).abs());
            s
        }
        let mut worst = 0.0;
        if let Some(r) = self.root {
            walk(self, r, &mut worst);
        }
        worst
    }
}

fn margin(m: &Mbr) -> f64 {
    m.min_corner.iter().zip(&m.max_corner).map(|(a, b)| b - a).sum()
}
