//! Finite-range comparison of congruence counts against the growth rate
//! `p^{n − min(1, |α|/d)}`.
//!
//! The fractional exponent is avoided by comparing `N_j^d` with
//! `p^{j (n d − min(d, |α|))}`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::sqh::WeightSystem;

/// Which branch of the growth bound applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundBranch {
    /// `|α| ≤ d`: exponent `n − |α|/d`.
    Weighted,
    /// `|α| > d`: exponent `n − 1`.
    Generic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundReport {
    pub branch: BoundBranch,
    /// `n − min(1, |α|/d)`.
    pub exponent: BigRational,
    /// `N_j^d / p^{j (n d − min(d, |α|))}` for each computed `j`.
    pub ratios: Vec<BigRational>,
    pub max_ratio: BigRational,
    pub argmax: usize,
}

impl BoundReport {
    pub fn to_json(&self) -> Value {
        let rat = |r: &BigRational| format!("{}/{}", r.numer(), r.denom());
        json!({
            "branch": match self.branch { BoundBranch::Weighted => "weighted", BoundBranch::Generic => "generic" },
            "exponent": rat(&self.exponent),
            "ratios_pow_d": self.ratios.iter().map(rat).collect::<Vec<_>>(),
            "max_ratio_pow_d": rat(&self.max_ratio),
            "argmax": self.argmax,
        })
    }
}

pub fn bound_check(counts: &[BigInt], w: &WeightSystem, n: usize, p: u64) -> BoundReport {
    let total: u64 = w.alpha.iter().map(|&a| a as u64).sum();
    let d = w.d as u64;
    let (branch, cut) = if total <= d { (BoundBranch::Weighted, total) } else { (BoundBranch::Generic, d) };
    let exponent = BigRational::from_integer(BigInt::from(n)) - BigRational::new(BigInt::from(cut), BigInt::from(d));
    let step = n as u64 * d - cut;
    let p = BigInt::from(p);
    let ratios: Vec<BigRational> = counts
        .iter()
        .enumerate()
        .map(|(j, nj)| {
            let lhs = num_traits::pow(nj.clone(), d as usize);
            let rhs = num_traits::pow(p.clone(), (step * j as u64) as usize);
            BigRational::new(lhs, rhs)
        })
        .collect();
    let (argmax, max_ratio) =
        ratios.iter().enumerate().fold((0, BigRational::zero()), |(bj, b), (j, r)| if r > &b { (j, r.clone()) } else { (bj, b) });
    let max_ratio = if ratios.is_empty() { BigRational::one() } else { max_ratio };
    BoundReport { branch, exponent, ratios, max_ratio, argmax }
}
