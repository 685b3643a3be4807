//! Exact rational probabilities for the verification baselines.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Zero};
use std::collections::BTreeMap;

use crate::model::{ArspResult, InstanceKey};

/// Largest denominator tried when recovering a decimal fraction from a float.
const MAX_DENOMINATOR: i128 = 1_000_000_000_000;

/// Recovers the simple fraction a float was meant to hold (`0.333..` -> 1/3)
/// by walking continued-fraction convergents and returning the first one whose
/// correctly rounded value is `x` itself. Falls back to the float's exact
/// binary value when no convergent with a small denominator rounds to `x`.
pub fn rational_from_prob(x: f64) -> BigRational {
    assert!(x.is_finite(), "probability must be finite");
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let (p2, q2) = (ai * p1 + p0, ai * q1 + q0);
        if q2 > MAX_DENOMINATOR {
            break;
        }
        if (p2 as f64) / (q2 as f64) == x {
            return BigRational::new(BigInt::from(p2), BigInt::from(q2));
        }
        let frac = r - a;
        if frac == 0.0 {
            break;
        }
        r = 1.0 / frac;
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    BigRational::from_f64(x).expect("finite float")
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Per-instance rskyline probabilities as exact fractions.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactArspResult {
    pub instances: BTreeMap<InstanceKey, BigRational>,
}

impl ExactArspResult {
    pub fn get(&self, object_id: u32, instance_id: u32) -> Option<&BigRational> {
        self.instances.get(&InstanceKey::new(object_id, instance_id))
    }

    pub fn object(&self, object_id: u32) -> BigRational {
        self.instances
            .iter()
            .filter(|(k, _)| k.object_id == object_id)
            .fold(BigRational::zero(), |acc, (_, v)| acc + v)
    }

    pub fn to_float(&self) -> ArspResult {
        let mut res = ArspResult::default();
        for (k, v) in &self.instances {
            let f = rational_to_f64(v);
            res.instances.insert(*k, f);
            *res.objects.entry(k.object_id).or_insert(0.0) += f;
        }
        res
    }
}

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn one() -> BigRational {
    BigRational::one()
}
