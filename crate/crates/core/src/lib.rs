//! Restricted-skyline probabilities on discrete uncertain data.
//!
//! An uncertain object is a set of weighted instances, at most one of which
//! occurs. Given a family of linear scoring functions, either a polytope of
//! weights `A w <= b` on the simplex or a box of weight ratios, instance `s`
//! F-dominates `t` when every function scores `s` no higher than `t`. The
//! rskyline probability of `t` is the probability that `t` occurs and no
//! instance of another object that F-dominates it does:
//!
//! `Pr(t) = p(t) * prod_{j != i} (1 - sum_{s in T_j, s F-dominates t} p(s))`.
//!
//! All algorithms return an [`ArspResult`] with one value per instance:
//!
//! * [`baselines`]: possible-world enumeration and the pairwise product.
//! * [`kdtt`]: kd-tree or quadtree traversal in score space.
//! * [`bnb`]: best-first R-tree search with aggregated trees and pruning.
//! * [`dual2d`]: the planar angular method for ratio boxes.
//!
//! [`eclipse`] answers the certain-data special case, [`datagen`] builds
//! benchmark inputs and [`io`] reads and writes the text formats.

pub mod baselines;
pub mod bnb;
pub mod datagen;
pub mod dominance;
pub mod dual2d;
pub mod eclipse;
pub mod error;
pub mod exact;
pub mod io;
pub mod kdtt;
pub mod model;
pub mod polytope;
mod prepared;
pub mod spatial;

pub use error::{ArspError, Result};
pub use exact::ExactArspResult;
pub use model::{
    clamp_mass, ArspResult, FlatInstances, Instance, InstanceKey, UncertainDataset, UncertainObject, Violation, ViolationKind,
};
pub use polytope::{ConstraintRow, LinearConstraintSystem, PreferenceSpec, RatioBox, VertexSet};

use kdtt::{KdttOptions, SplitVariant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Enum,
    Loop,
    /// Tree built first, then traversed without pruning.
    Kdtt,
    KdttFused,
    QdttFused,
    Bnb,
    /// Planar angular method; ratio boxes only.
    Dual2d,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::Enum,
        Algorithm::Loop,
        Algorithm::Kdtt,
        Algorithm::KdttFused,
        Algorithm::QdttFused,
        Algorithm::Bnb,
        Algorithm::Dual2d,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Enum => "enum",
            Algorithm::Loop => "loop",
            Algorithm::Kdtt => "kdtt",
            Algorithm::KdttFused => "kdtt-fused",
            Algorithm::QdttFused => "qdtt-fused",
            Algorithm::Bnb => "bnb",
            Algorithm::Dual2d => "dual2d",
        }
    }

    pub fn parse(s: &str) -> Result<Algorithm> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| ArspError::BadParam(format!("unknown algorithm {s:?}")))
    }

    /// Whether the algorithm accepts this input at all.
    pub fn supports(self, ds: &UncertainDataset, spec: &PreferenceSpec) -> bool {
        match self {
            Algorithm::Dual2d => ds.d == 2 && spec.ratio_box().is_some(),
            Algorithm::Enum => baselines::world_count(ds) <= baselines::DEFAULT_WORLD_CAP,
            _ => true,
        }
    }

    pub fn run(self, ds: &UncertainDataset, spec: &PreferenceSpec) -> Result<ArspResult> {
        let kd = |variant, fused| {
            let opts = KdttOptions {
                variant,
                fused,
                prune: fused,
                audit: false,
            };
            kdtt::kdtt_arsp_with(ds, spec, &opts).map(|(r, _)| r)
        };
        match self {
            Algorithm::Enum => baselines::enum_arsp(ds, spec),
            Algorithm::Loop => baselines::loop_arsp(ds, spec),
            Algorithm::Kdtt => kd(SplitVariant::Kd, false),
            Algorithm::KdttFused => kd(SplitVariant::Kd, true),
            Algorithm::QdttFused => kd(SplitVariant::Quad, true),
            Algorithm::Bnb => bnb::bnb_arsp(ds, spec),
            Algorithm::Dual2d => {
                let rb = spec
                    .ratio_box()
                    .ok_or_else(|| ArspError::BadParam("dual2d needs a ratio box".into()))?;
                let profile = if ds.is_singleton_profile() {
                    dual2d::Profile::Singleton
                } else {
                    dual2d::Profile::General
                };
                dual2d::dual2d_arsp(ds, rb, profile)
            }
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = ArspError;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::parse(s)
    }
}
