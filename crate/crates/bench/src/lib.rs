//! Shared fixtures for the benchmarks.

use arsp::datagen::{gen_constraints, gen_dataset, ConstraintKind, Dist};
use arsp::{PreferenceSpec, RatioBox, UncertainDataset};

/// IND objects with `cnt` instances at most, edge length 0.2, weak rankings
/// on every attribute.
pub fn workload(m: usize, cnt: usize, d: usize, seed: u64) -> (UncertainDataset, PreferenceSpec) {
    let (ds, _) = gen_dataset(Dist::Ind, m, cnt, d, 0.2, 0.0, seed).expect("valid parameters");
    let cs = gen_constraints(ConstraintKind::Wr, d, d - 1, seed).expect("valid parameters");
    (ds, PreferenceSpec::Constraints(cs))
}

/// `n` certain IND points in `d` dimensions.
pub fn certain_points(n: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
    let (ds, _) = gen_dataset(Dist::Ind, n, 1, d, 0.0, 0.0, seed).expect("valid parameters");
    ds.instances().map(|t| t.coords.clone()).collect()
}

/// The ratio box `[0.36, 2.75]` on every ratio.
pub fn default_box(d: usize) -> RatioBox {
    RatioBox::uniform(d, 0.36, 2.75).expect("valid box")
}
