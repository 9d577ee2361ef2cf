//! The Poincaré series `P(t) = Σ N_j (p^{-n} t)^j`, recovered from `Z` via
//! `P = (1 − t Z) / (1 − t)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::ratfun::{div_binomial, poly_add, RatFun};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoincareSeries {
    pub ratfun: RatFun,
    pub n: usize,
    pub p: u64,
}

/// `P(t) = (1 − t Z(t)) / (1 − t)`. Fails when `1 − t Z` does not vanish at
/// `t = 1`, which no zeta function over the full region does.
pub fn poincare_from_zeta(z: &RatFun, n: usize) -> Result<PoincareSeries> {
    let den = z.denominator_poly();
    let mut shifted = vec![BigRational::from_integer(0.into())];
    shifted.extend(z.numerator().iter().map(|c| -c));
    let top = poly_add(&den, &shifted);
    let quotient = div_binomial(&top, &BigRational::one(), 1)
        .ok_or_else(|| Error::InvariantViolation("1 − t·Z(t) does not vanish at t = 1".into()))?;
    Ok(PoincareSeries { ratfun: RatFun::from_parts(z.q(), quotient, z.denominator().to_vec()), n, p: z.q() })
}

impl PoincareSeries {
    /// `N_0, …, N_levels`, checking that each is a nonnegative integer and
    /// that `N_0 = 1`.
    pub fn counts(&self, levels: usize) -> Result<Vec<BigInt>> {
        let coeffs = self.ratfun.series_expand(levels);
        let mut out = Vec::with_capacity(levels + 1);
        for (j, c) in coeffs.into_iter().enumerate() {
            let scaled = c * BigRational::from_integer(num_traits::pow(BigInt::from(self.p), self.n * j));
            if !scaled.is_integer() || scaled.is_negative() {
                return Err(Error::InvariantViolation(format!("N_{j} = {scaled} is not a nonnegative integer")));
            }
            out.push(scaled.to_integer());
        }
        if out[0] != BigInt::one() {
            return Err(Error::InvariantViolation(format!("N_0 = {} instead of 1", out[0])));
        }
        Ok(out)
    }
}
