#![allow(dead_code)]

use arsp::datagen::{gen_constraints, ConstraintKind};
use arsp::{PreferenceSpec, RatioBox, UncertainDataset, UncertainObject};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Four objects in the plane; with ratios in `[0.5, 2]` the first instance
/// has probability 2/9 and the second 0.
pub fn four_objects() -> UncertainDataset {
    let half = 0.5;
    let third = 1.0 / 3.0;
    let obj = |id: u32, pts: &[(f64, f64, f64)]| UncertainObject::from_points(id, pts.iter().map(|&(x, y, p)| (vec![x, y], p)).collect());
    UncertainDataset::new(
        2,
        vec![
            obj(1, &[(2.0, 17.0, half), (8.0, 14.0, half)]),
            obj(2, &[(2.0, 12.0, third), (12.0, 4.0, third), (9.0, 12.0, third)]),
            obj(3, &[(6.0, 5.0, third), (8.0, 10.0, third), (10.0, 10.0, third)]),
            obj(4, &[(5.0, 16.0, half), (14.0, 6.0, half)]),
        ],
    )
}

pub fn example_box() -> RatioBox {
    RatioBox::new(vec![(0.5, 2.0)]).unwrap()
}

/// At most `max_m` objects and `max_n` instances. Probabilities are small
/// fractions `k / den`, so exact arithmetic recovers them. Roughly half the
/// datasets sit on a coarse integer grid to force ties.
pub fn small_dataset(r: &mut impl Rng, max_m: usize, max_n: usize, d: usize) -> UncertainDataset {
    let m = r.random_range(1..=max_m);
    let grid = r.random_bool(0.5);
    let mut budget = max_n;
    let mut objects = Vec::with_capacity(m);
    for o in 0..m {
        let left = m - o - 1;
        let cap = (budget - left).clamp(1, 3);
        let ni = r.random_range(1..=cap);
        budget -= ni;
        let den: u32 = r.random_range(ni as u32..=12);
        let mut weights = vec![1u32; ni];
        let mut spare = r.random_range(0..=den - ni as u32);
        while spare > 0 {
            weights[r.random_range(0..ni)] += 1;
            spare -= 1;
        }
        let pts = weights
            .iter()
            .map(|&w| {
                let coords = (0..d)
                    .map(|_| if grid { r.random_range(0..5) as f64 } else { r.random::<f64>() })
                    .collect();
                (coords, w as f64 / den as f64)
            })
            .collect();
        objects.push(UncertainObject::from_points(o as u32 + 1, pts));
    }
    UncertainDataset::new(d, objects)
}

/// Random ratio box whose bounds are multiples of 1/4 in `[0.25, 4]`.
pub fn dyadic_box(r: &mut impl Rng, d: usize) -> RatioBox {
    let ranges = (0..d - 1)
        .map(|_| {
            let a = r.random_range(1..=16) as f64 / 4.0;
            let b = r.random_range(1..=16) as f64 / 4.0;
            (a.min(b), a.max(b))
        })
        .collect();
    RatioBox::new(ranges).unwrap()
}

/// Weak rankings, interactive halfspaces or a ratio box, chosen uniformly.
pub fn random_spec(r: &mut impl Rng, d: usize) -> PreferenceSpec {
    let seed = r.random();
    match r.random_range(0..3) {
        0 => PreferenceSpec::Constraints(gen_constraints(ConstraintKind::Wr, d, r.random_range(0..d), seed).unwrap()),
        1 => PreferenceSpec::Constraints(gen_constraints(ConstraintKind::Im, d, r.random_range(1..=3), seed).unwrap()),
        _ => PreferenceSpec::Ratio(dyadic_box(r, d)),
    }
}
