//! Spatial indexes: a bulk-loaded R-tree over instances, insert-only
//! aggregated R-trees that cache subtree probability mass, and a bucket
//! kd-tree used by the eclipse search.

mod aggtree;
mod kdtree;
mod mbr;
mod rtree;

pub use aggtree::AggRTree;
pub use kdtree::{KdNode, KdTree};
pub use mbr::Mbr;
pub use rtree::{build_rtree, RTree, RTreeNode};

pub const DEFAULT_FANOUT: usize = 16;
