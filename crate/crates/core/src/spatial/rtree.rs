use super::{Mbr, DEFAULT_FANOUT};

#[derive(Debug, Clone)]
pub enum RTreeNode {
    /// Holds indices into the tree's point array.
    Leaf { mbr: Mbr, entries: Vec<usize> },
    Internal { mbr: Mbr, children: Vec<usize> },
}

impl RTreeNode {
    pub fn mbr(&self) -> &Mbr {
        match self {
            RTreeNode::Leaf { mbr, .. } | RTreeNode::Internal { mbr, .. } => mbr,
        }
    }
}

/// Static R-tree built by sort-tile-recursive packing. Immutable after build.
#[derive(Debug, Clone)]
pub struct RTree {
    dim: usize,
    points: Vec<f64>,
    nodes: Vec<RTreeNode>,
    root: usize,
}

/// Bulk-loads `points` (row-major, `dim` values each) with the default fanout.
pub fn build_rtree(points: &[f64], dim: usize) -> RTree {
    RTree::bulk_load(points, dim, DEFAULT_FANOUT)
}

impl RTree {
    pub fn bulk_load(points: &[f64], dim: usize, fanout: usize) -> RTree {
        assert!(dim > 0 && fanout >= 2);
        assert!(!points.is_empty() && points.len().is_multiple_of(dim), "need at least one point");
        let n = points.len() / dim;
        let mut nodes = Vec::new();
        let pt = |i: usize| &points[i * dim..(i + 1) * dim];

        let mut ids: Vec<usize> = (0..n).collect();
        let mut groups = Vec::new();
        str_groups(&mut ids, &|i, k| points[i * dim + k], 0, dim, fanout, &mut groups);
        let mut level: Vec<usize> = groups
            .into_iter()
            .map(|entries| {
                let mbr = Mbr::of_points(entries.iter().map(|&i| pt(i))).expect("non-empty group");
                nodes.push(RTreeNode::Leaf { mbr, entries });
                nodes.len() - 1
            })
            .collect();

        while level.len() > 1 {
            let centers: Vec<f64> = level
                .iter()
                .flat_map(|&id| {
                    let m = nodes[id].mbr();
                    (0..dim).map(move |k| m.center(k)).collect::<Vec<_>>()
                })
                .collect();
            let mut pos: Vec<usize> = (0..level.len()).collect();
            let mut groups = Vec::new();
            str_groups(&mut pos, &|i, k| centers[i * dim + k], 0, dim, fanout, &mut groups);
            level = groups
                .into_iter()
                .map(|g| {
                    let children: Vec<usize> = g.iter().map(|&p| level[p]).collect();
                    let mut mbr = nodes[children[0]].mbr().clone();
                    for &c in &children[1..] {
                        mbr.expand(nodes[c].mbr());
                    }
                    nodes.push(RTreeNode::Internal { mbr, children });
                    nodes.len() - 1
                })
                .collect();
        }
        RTree {
            dim,
            points: points.to_vec(),
            nodes,
            root: level[0],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn node(&self, id: usize) -> &RTreeNode {
        &self.nodes[id]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    /// Indices of all points inside the closed box `[lo, hi]`, ascending.
    pub fn window(&self, lo: &[f64], hi: &[f64]) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![self.root];
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id];
            if !node.mbr().intersects(lo, hi) {
                continue;
            }
            match node {
                RTreeNode::Leaf { entries, .. } => {
                    for &i in entries {
                        let p = self.point(i);
                        if (0..self.dim).all(|k| lo[k] <= p[k] && p[k] <= hi[k]) {
                            out.push(i);
                        }
                    }
                }
                RTreeNode::Internal { children, .. } => stack.extend(children.iter().copied()),
            }
        }
        out.sort_unstable();
        out
    }

    pub fn height(&self) -> usize {
        let mut h = 1;
        let mut id = self.root;
        while let RTreeNode::Internal { children, .. } = &self.nodes[id] {
            h += 1;
            id = children[0];
        }
        h
    }
}

/// Sort-tile-recursive grouping of `items` into runs of at most `cap`.
fn str_groups(
    items: &mut [usize],
    coord: &dyn Fn(usize, usize) -> f64,
    axis: usize,
    dim: usize,
    cap: usize,
    out: &mut Vec<Vec<usize>>,
) {
    if items.len() <= cap {
        out.push(items.to_vec());
        return;
    }
    items.sort_by(|&a, &b| coord(a, axis).total_cmp(&coord(b, axis)).then(a.cmp(&b)));
    if axis + 1 == dim {
        for chunk in items.chunks(cap) {
            out.push(chunk.to_vec());
        }
        return;
    }
    let leaves = items.len().div_ceil(cap);
    let slabs = (leaves as f64).powf(1.0 / (dim - axis) as f64).ceil() as usize;
    let slab_len = cap * leaves.div_ceil(slabs.max(1));
    for chunk in items.chunks_mut(slab_len) {
        str_groups(chunk, coord, axis + 1, dim, cap, out);
    }
}
