use super::Mbr;

#[derive(Debug, Clone)]
pub enum KdNode {
    Leaf { mbr: Mbr, entries: Vec<usize> },
    Split { mbr: Mbr, left: usize, right: usize },
}

impl KdNode {
    pub fn mbr(&self) -> &Mbr {
        match self {
            KdNode::Leaf { mbr, .. } | KdNode::Split { mbr, .. } => mbr,
        }
    }
}

/// Static bucket kd-tree, median split on the widest axis.
#[derive(Debug, Clone)]
pub struct KdTree {
    dim: usize,
    points: Vec<f64>,
    nodes: Vec<KdNode>,
    root: Option<usize>,
}

impl KdTree {
    pub fn build(points: &[f64], dim: usize, bucket: usize) -> Self {
        assert!(dim > 0 && bucket > 0);
        let n = points.len() / dim;
        let mut tree = KdTree {
            dim,
            points: points.to_vec(),
            nodes: Vec::new(),
            root: None,
        };
        if n > 0 {
            let mut ids: Vec<usize> = (0..n).collect();
            tree.root = Some(tree.build_rec(&mut ids, bucket));
        }
        tree
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn len(&self) -> usize {
        self.points.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn root(&self) -> Option<usize> {
        self.root
    }

    pub fn node(&self, id: usize) -> &KdNode {
        &self.nodes[id]
    }

    fn build_rec(&mut self, ids: &mut [usize], bucket: usize) -> usize {
        let dim = self.dim;
        let mbr = Mbr::of_points(ids.iter().map(|&i| &self.points[i * dim..(i + 1) * dim])).expect("non-empty");
        let axis = (0..dim)
            .max_by(|&a, &b| {
                (mbr.max_corner[a] - mbr.min_corner[a]).total_cmp(&(mbr.max_corner[b] - mbr.min_corner[b]))
            })
            .unwrap_or(0);
        if ids.len() <= bucket || mbr.max_corner[axis] == mbr.min_corner[axis] {
            self.nodes.push(KdNode::Leaf { mbr, entries: ids.to_vec() });
            return self.nodes.len() - 1;
        }
        let mid = ids.len() / 2;
        let pts = &self.points;
        ids.select_nth_unstable_by(mid, |&a, &b| pts[a * dim + axis].total_cmp(&pts[b * dim + axis]).then(a.cmp(&b)));
        let (l, r) = ids.split_at_mut(mid);
        let left = self.build_rec(l, bucket);
        let right = self.build_rec(r, bucket);
        self.nodes.push(KdNode::Split { mbr, left, right });
        self.nodes.len() - 1
    }

    /// Depth-first existence search. Subtrees whose box fails `may_contain`
    /// are skipped; returns the first point accepted by `accept`.
    pub fn find_any(&self, mut may_contain: impl FnMut(&Mbr) -> bool, mut accept: impl FnMut(usize) -> bool) -> Option<usize> {
        let mut stack = vec![self.root?];
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id];
            if !may_contain(node.mbr()) {
                continue;
            }
            match node {
                KdNode::Leaf { entries, .. } => {
                    if let Some(&i) = entries.iter().find(|&&i| accept(i)) {
                        return Some(i);
                    }
                }
                KdNode::Split { left, right, .. } => {
                    stack.push(*right);
                    stack.push(*left);
                }
            }
        }
        None
    }
}
