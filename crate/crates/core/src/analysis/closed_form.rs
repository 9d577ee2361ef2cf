//! Closed form for `Z(α x^n + β y^m)` with `gcd(n, m) = 1` and `α` a unit.
//!
//! With weights `(m, n)` the polynomial is quasihomogeneous of degree `nm`,
//! so `Z = Z(A^c) / (1 − p^{-(n+m)} t^{nm})` for `A = {v(x) ≥ m, v(y) ≥ n}`.
//! The complement is split by the valuations of `x` and `y`:
//!
//! * `v(x) = k < m`, `v(y) ≥ n`: `x^n` dominates;
//! * cells `v(x) = i < M`, `v(y) = j < n`, where `M = m + g + r` for
//!   `v(β) = g n + r`: compare `n i` with `v(β) + m j`, and on ties integrate
//!   the unit-circle form `ᾱ u^n + μ̄ w^m`;
//! * `v(x) ≥ M`, `v(y) = k < n`: `β y^m` dominates.
//!
//! Nothing here calls the stationary phase engine.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;

use crate::coeff::{LocalRing, Valuation};
use crate::error::{Error, Result};
use crate::ratfun::{DenomFactor, RatFun};

fn inv_pow(p: u64, k: u32) -> BigRational {
    BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(p), k as usize))
}

/// `ν` and `σ` of `a u^n + b w^m` over `(F_p^*)^2`, weighted by `p^{-2}`.
fn unit_square_counts(p: u64, a: u64, b: u64, n: u32, m: u32) -> (BigRational, BigRational) {
    let pw = |x: u64, e: u32| -> u64 { (0..e).fold(1u64, |acc, _| acc * x % p) };
    let (mut nonzero, mut smooth) = (0u64, 0u64);
    for u in 1..p {
        for w in 1..p {
            let value = (a * pw(u, n) + b * pw(w, m)) % p;
            if value != 0 {
                nonzero += 1;
            } else {
                let du = a * (n as u64 % p) % p * pw(u, n - 1) % p;
                let dw = b * (m as u64 % p) % p * pw(w, m - 1) % p;
                if du != 0 || dw != 0 {
                    smooth += 1;
                }
            }
        }
    }
    let sq = BigInt::from(p * p);
    (BigRational::new(nonzero.into(), sq.clone()), BigRational::new(smooth.into(), sq))
}

/// `Z(α x^n + β y^m)` by the piecewise closed form.
pub fn binomial_closed_form<R: LocalRing>(ring: &R, n: u32, m: u32, alpha: &R::Elem, beta: &R::Elem) -> Result<RatFun> {
    let p = ring.prime();
    if n < 2 || m < 2 {
        return Err(Error::InvalidParameters("exponents must exceed 1".into()));
    }
    if n.gcd(&m) != 1 {
        return Err(Error::InvalidParameters(format!("gcd({n}, {m}) ≠ 1")));
    }
    if (n as u64).is_multiple_of(p) && (m as u64).is_multiple_of(p) {
        return Err(Error::InvalidParameters(format!("{p} divides both exponents")));
    }
    if !ring.is_unit(alpha) {
        return Err(Error::InvalidParameters("α must be a unit".into()));
    }
    let vb = match ring.valuation(beta) {
        Valuation::Finite(v) => v,
        Valuation::Infinite => return Err(Error::InvalidParameters("β must be nonzero".into())),
    };
    let a_bar = ring.reduce(alpha);
    let mu_bar = ring.reduce(&ring.divide_by_uniformizer(beta, vb)?);

    let one_minus = BigRational::one() - inv_pow(p, 1);
    let smooth =
        RatFun::from_parts(p, vec![BigRational::from_integer(0.into()), one_minus.clone()], vec![DenomFactor::new(1, 1)]);
    let (nu, sigma) = unit_square_counts(p, a_bar, mu_bar, n, m);
    let tie_integral = RatFun::constant(p, nu).add(&smooth.scale(&sigma, 0));

    let mut total = RatFun::zero(p);
    // v(x) = k < m, v(y) ≥ n.
    for k in 0..m {
        total = total.add(&RatFun::monomial(p, &one_minus * inv_pow(p, n + k), n * k));
    }
    // Cells v(x) = i, v(y) = j.
    let (g, r) = (vb / n, vb % n);
    let cutoff = m + g + r;
    let cell_measure = &one_minus * &one_minus;
    for i in 0..cutoff {
        for j in 0..n {
            let lhs = (n * i) as i64;
            let rhs = (vb + m * j) as i64;
            let term = match rhs.cmp(&lhs) {
                std::cmp::Ordering::Greater => RatFun::monomial(p, &cell_measure * inv_pow(p, i + j), n * i),
                std::cmp::Ordering::Less => RatFun::monomial(p, &cell_measure * inv_pow(p, i + j), vb + m * j),
                std::cmp::Ordering::Equal => tie_integral.scale(&inv_pow(p, i + j), n * i),
            };
            total = total.add(&term);
        }
    }
    // v(x) ≥ M, v(y) = k < n.
    for k in 0..n {
        total = total.add(&RatFun::monomial(p, &one_minus * inv_pow(p, cutoff + k), vb + m * k));
    }
    Ok(total.geometric_close(n + m, n * m))
}
