//! Rational functions of `t = q^{-s}` with factored denominators.
//!
//! Every zeta function the engine produces has the shape
//! `N(t) / Π (1 − q^{-a} t^b)`, so the denominator is kept as a sorted multiset
//! of `(a, b)` pairs and only the numerator is a dense polynomial. `q` is the
//! concrete prime, which makes all coefficients plain rationals.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::coeff::bigint_json;
use crate::error::{Error, Result};

/// The factor `1 − q^{-a} t^b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DenomFactor {
    pub a: u32,
    pub b: u32,
}

impl DenomFactor {
    pub fn new(a: u32, b: u32) -> Self {
        assert!(a >= 1 && b >= 1, "denominator factor needs a, b >= 1");
        DenomFactor { a, b }
    }

    /// Real part of the corresponding pole in `s`: `−a/b`.
    pub fn pole_real_part(&self) -> BigRational {
        BigRational::new(BigInt::from(-(self.a as i64)), BigInt::from(self.b))
    }
}

/// Dense polynomial in `t` over `Q`, low degree first, no trailing zeros.
pub type QPoly = Vec<BigRational>;

fn trim(p: &mut QPoly) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

pub(crate) fn poly_add(a: &[BigRational], b: &[BigRational]) -> QPoly {
    let mut out: QPoly = (0..a.len().max(b.len()))
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(BigRational::zero);
            let y = b.get(i).cloned().unwrap_or_else(BigRational::zero);
            x + y
        })
        .collect();
    trim(&mut out);
    out
}

pub(crate) fn poly_mul(a: &[BigRational], b: &[BigRational]) -> QPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&mut out);
    out
}

/// Multiplies by `1 − c t^b`.
pub(crate) fn mul_binomial(p: &[BigRational], c: &BigRational, b: usize) -> QPoly {
    if p.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); p.len() + b];
    for (i, x) in p.iter().enumerate() {
        out[i] += x;
        out[i + b] -= x * c;
    }
    trim(&mut out);
    out
}

/// Exact division by `1 − c t^b`, or `None` when it does not divide.
pub(crate) fn div_binomial(p: &[BigRational], c: &BigRational, b: usize) -> Option<QPoly> {
    if p.is_empty() {
        return Some(Vec::new());
    }
    if p.len() <= b {
        return None;
    }
    let qlen = p.len() - b;
    let mut q: QPoly = Vec::with_capacity(qlen);
    for k in 0..qlen {
        let mut v = p[k].clone();
        if k >= b {
            v += c * &q[k - b];
        }
        q.push(v);
    }
    for k in qlen..p.len() {
        // p_k = q_k − c q_{k−b} with q_k = 0 beyond the quotient.
        let expected = if k >= b { -(c * &q[k - b]) } else { BigRational::zero() };
        if p[k] != expected {
            return None;
        }
    }
    Some(q)
}

fn q_pow_neg(q: u64, a: u32) -> BigRational {
    BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(q), a as usize))
}

/// `numerator / Π (1 − q^{-a} t^b)` in canonical form: the numerator has no
/// trailing zeros, the denominator is sorted and none of its factors divides
/// the numerator.
#[derive(Clone)]
pub struct RatFun {
    q: u64,
    num: QPoly,
    denom: Vec<DenomFactor>,
}

impl RatFun {
    pub fn zero(q: u64) -> Self {
        RatFun { q, num: Vec::new(), denom: Vec::new() }
    }

    pub fn one(q: u64) -> Self {
        Self::constant(q, BigRational::one())
    }

    pub fn constant(q: u64, c: BigRational) -> Self {
        Self::from_parts(q, vec![c], Vec::new())
    }

    /// `c · t^e`.
    pub fn monomial(q: u64, c: BigRational, e: u32) -> Self {
        let mut num = vec![BigRational::zero(); e as usize];
        num.push(c);
        Self::from_parts(q, num, Vec::new())
    }

    /// A polynomial in `t`.
    pub fn polynomial(q: u64, num: QPoly) -> Self {
        Self::from_parts(q, num, Vec::new())
    }

    pub fn from_parts(q: u64, num: QPoly, denom: Vec<DenomFactor>) -> Self {
        let mut r = RatFun { q, num, denom };
        r.canonicalize();
        r
    }

    /// `(1 − q^{-1}) t / (1 − q^{-1} t)`: the integral over a smooth zero.
    pub fn smooth_zero_series(q: u64) -> Self {
        let c = BigRational::one() - q_pow_neg(q, 1);
        Self::from_parts(q, vec![BigRational::zero(), c], vec![DenomFactor::new(1, 1)])
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn numerator(&self) -> &[BigRational] {
        &self.num
    }

    pub fn denominator(&self) -> &[DenomFactor] {
        &self.denom
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    fn factor_coeff(&self, f: DenomFactor) -> BigRational {
        q_pow_neg(self.q, f.a)
    }

    fn canonicalize(&mut self) {
        trim(&mut self.num);
        if self.num.is_empty() {
            self.denom.clear();
            return;
        }
        self.denom.sort();
        loop {
            let mut cancelled = false;
            let mut i = 0;
            while i < self.denom.len() {
                let f = self.denom[i];
                let c = self.factor_coeff(f);
                if let Some(quot) = div_binomial(&self.num, &c, f.b as usize) {
                    self.num = quot;
                    self.denom.remove(i);
                    cancelled = true;
                } else {
                    i += 1;
                }
            }
            if !cancelled {
                break;
            }
        }
    }

    fn check_same_q(&self, other: &Self) {
        assert_eq!(self.q, other.q, "rational functions over different primes");
    }

    /// Product of the denominator factors as a polynomial.
    pub fn denominator_poly(&self) -> QPoly {
        self.denom.iter().fold(vec![BigRational::one()], |acc, f| mul_binomial(&acc, &self.factor_coeff(*f), f.b as usize))
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_same_q(other);
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        // Common denominator: multiset maximum.
        let mut common = Vec::new();
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.denom, &other.denom);
        while i < a.len() || j < b.len() {
            match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) if x == y => {
                    common.push(*x);
                    i += 1;
                    j += 1;
                }
                (Some(x), Some(y)) if x < y => {
                    common.push(*x);
                    i += 1;
                }
                (Some(_), Some(y)) => {
                    common.push(*y);
                    j += 1;
                }
                (Some(x), None) => {
                    common.push(*x);
                    i += 1;
                }
                (None, Some(y)) => {
                    common.push(*y);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        let lift = |num: &QPoly, own: &[DenomFactor]| -> QPoly {
            let mut rest = common.clone();
            for f in own {
                let pos = rest.iter().position(|g| g == f).expect("own factor is in the common denominator");
                rest.remove(pos);
            }
            rest.iter().fold(num.clone(), |acc, f| mul_binomial(&acc, &self.factor_coeff(*f), f.b as usize))
        };
        let num = poly_add(&lift(&self.num, a), &lift(&other.num, b));
        Self::from_parts(self.q, num, common)
    }

    pub fn neg(&self) -> Self {
        RatFun { q: self.q, num: self.num.iter().map(|c| -c).collect(), denom: self.denom.clone() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_same_q(other);
        let mut denom = self.denom.clone();
        denom.extend_from_slice(&other.denom);
        Self::from_parts(self.q, poly_mul(&self.num, &other.num), denom)
    }

    /// Multiplies by `c · t^e`.
    pub fn scale(&self, c: &BigRational, e: u32) -> Self {
        if c.is_zero() {
            return Self::zero(self.q);
        }
        let mut num = vec![BigRational::zero(); e as usize];
        num.extend(self.num.iter().map(|x| x * c));
        Self::from_parts(self.q, num, self.denom.clone())
    }

    /// Multiplies by the geometric series `1 / (1 − q^{-a} t^b)`.
    pub fn geometric_close(&self, a: u32, b: u32) -> Self {
        let mut denom = self.denom.clone();
        denom.push(DenomFactor::new(a, b));
        Self::from_parts(self.q, self.num.clone(), denom)
    }

    /// Taylor coefficients `c_0, …, c_order` at `t = 0`.
    pub fn series_expand(&self, order: usize) -> Vec<BigRational> {
        let mut s: Vec<BigRational> = (0..=order).map(|k| self.num.get(k).cloned().unwrap_or_else(BigRational::zero)).collect();
        for f in &self.denom {
            let c = self.factor_coeff(*f);
            let b = f.b as usize;
            for k in b..=order {
                let prev = s[k - b].clone();
                s[k] += &c * prev;
            }
        }
        s
    }

    /// `{ −a/b }` over the denominator factors.
    pub fn pole_real_parts(&self) -> BTreeSet<BigRational> {
        self.denom.iter().map(DenomFactor::pole_real_part).collect()
    }

    /// True iff `self` can be written with a denominator dividing
    /// `Π target`, i.e. `self · Π target` is a polynomial.
    pub fn denominator_divides(&self, target: &[DenomFactor]) -> bool {
        let mut prod = self.num.clone();
        for f in target {
            prod = mul_binomial(&prod, &self.factor_coeff(*f), f.b as usize);
        }
        let mut rest = Some(prod);
        for f in &self.denom {
            rest = rest.and_then(|p| div_binomial(&p, &self.factor_coeff(*f), f.b as usize));
        }
        rest.is_some()
    }

    /// `self(t)` at a rational point; `None` at a pole.
    pub fn evaluate(&self, t: &BigRational) -> Option<BigRational> {
        let eval = |p: &[BigRational]| p.iter().rev().fold(BigRational::zero(), |acc, c| acc * t + c);
        let den = eval(&self.denominator_poly());
        if den.is_zero() {
            return None;
        }
        Some(eval(&self.num) / den)
    }

    /// `{"q": …, "num": [[n, d], …], "denom": [{"a": …, "b": …}, …]}`.
    pub fn to_json(&self) -> Value {
        json!({
            "q": self.q,
            "num": self.num.iter().map(|c| json!([bigint_json(c.numer()), bigint_json(c.denom())])).collect::<Vec<_>>(),
            "denom": self.denom.iter().map(|f| json!({"a": f.a, "b": f.b})).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::InvalidParameters(format!("malformed rational function JSON: {m}"));
        let q = v.get("q").and_then(Value::as_u64).ok_or_else(|| bad("missing q"))?;
        let int = |x: &Value| -> Result<BigInt> {
            match x {
                Value::Number(n) => n.to_string().parse().map_err(|_| bad("non-integer")),
                Value::String(s) => s.parse().map_err(|_| bad("non-integer")),
                _ => Err(bad("non-integer")),
            }
        };
        let mut num = Vec::new();
        for c in v.get("num").and_then(Value::as_array).ok_or_else(|| bad("missing num"))? {
            let pair = c.as_array().filter(|p| p.len() == 2).ok_or_else(|| bad("coefficient is not a pair"))?;
            let d = int(&pair[1])?;
            if d.is_zero() {
                return Err(bad("zero denominator"));
            }
            num.push(BigRational::new(int(&pair[0])?, d));
        }
        let mut denom = Vec::new();
        for f in v.get("denom").and_then(Value::as_array).ok_or_else(|| bad("missing denom"))? {
            let a = f.get("a").and_then(Value::as_u64).filter(|&a| a >= 1).ok_or_else(|| bad("bad a"))?;
            let b = f.get("b").and_then(Value::as_u64).filter(|&b| b >= 1).ok_or_else(|| bad("bad b"))?;
            denom.push(DenomFactor::new(a as u32, b as u32));
        }
        Ok(Self::from_parts(q, num, denom))
    }

    /// LaTeX rendering, e.g. `\frac{4/5}{(1 - 5^{-1} t)}` written with
    /// `\frac` and `q` substituted.
    pub fn to_latex(&self) -> String {
        let num = render_poly(&self.num, true);
        if self.denom.is_empty() {
            return num;
        }
        let den: String = self.denom.iter().map(|f| format!("(1 - {}^{{-{}}} {})", self.q, f.a, latex_t_power(f.b))).collect();
        format!("\\frac{{{num}}}{{{den}}}")
    }
}

fn latex_t_power(b: u32) -> String {
    if b == 1 {
        "t".to_string()
    } else {
        format!("t^{{{b}}}")
    }
}

fn render_coeff(c: &BigRational, latex: bool) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else if latex {
        format!("\\frac{{{}}}{{{}}}", c.numer(), c.denom())
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn render_poly(p: &[BigRational], latex: bool) -> String {
    if p.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, c) in p.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let mag = c.abs();
        let power = match (k, latex) {
            (0, _) => String::new(),
            (1, _) => "t".to_string(),
            (k, true) => format!("t^{{{k}}}"),
            (k, false) => format!("t^{k}"),
        };
        let body = match (power.is_empty(), mag.is_one()) {
            (true, _) => render_coeff(&mag, latex),
            (false, true) => power,
            (false, false) if latex => format!("{} {}", render_coeff(&mag, latex), power),
            (false, false) => format!("{}*{}", render_coeff(&mag, latex), power),
        };
        match (out.is_empty(), neg) {
            (true, true) => out.push_str(&format!("-{body}")),
            (true, false) => out.push_str(&body),
            (false, true) => out.push_str(&format!(" - {body}")),
            (false, false) => out.push_str(&format!(" + {body}")),
        }
    }
    out
}

impl PartialEq for RatFun {
    /// Equality as rational functions: cross-multiplied numerators agree.
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q && poly_mul(&self.num, &other.denominator_poly()) == poly_mul(&other.num, &self.denominator_poly())
    }
}

impl Eq for RatFun {}

impl fmt::Debug for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFun[q={}]({})", self.q, self)
    }
}

impl fmt::Display for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = render_poly(&self.num, false);
        if self.denom.is_empty() {
            return f.write_str(&num);
        }
        let den: String = self
            .denom
            .iter()
            .map(|d| {
                let t = if d.b == 1 { "t".to_string() } else { format!("t^{}", d.b) };
                format!("(1 - {}^-{}*{})", self.q, d.a, t)
            })
            .collect();
        write!(f, "({num}) / {den}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn geometric(q: u64) -> RatFun {
        RatFun::from_parts(q, vec![r(1, 1)], vec![DenomFactor::new(1, 1)])
    }

    #[test]
    fn add_examples() {
        let one = RatFun::one(5);
        let tail = RatFun::from_parts(5, vec![r(0, 1), r(1, 5)], vec![DenomFactor::new(1, 1)]);
        let sum = one.add(&tail);
        assert_eq!(sum.numerator(), &[r(1, 1)]);
        assert_eq!(sum.denominator(), &[DenomFactor::new(1, 1)]);
        assert_eq!(RatFun::one(5).scale(&r(1, 25), 3), RatFun::monomial(5, r(1, 25), 3));
        let x = geometric(5).scale(&r(3, 7), 2);
        assert_eq!(x.add(&RatFun::zero(5)), x);
    }

    #[test]
    fn geometric_close_examples() {
        let g = RatFun::one(5).geometric_close(5, 6);
        assert_eq!(g.denominator(), &[DenomFactor::new(5, 6)]);
        assert_eq!(g.numerator(), &[r(1, 1)]);
        let mut num = vec![r(1, 1)];
        num.extend(std::iter::repeat_n(r(0, 1), 5));
        num.push(r(-1, 3125));
        let f = RatFun::polynomial(5, num);
        let closed = f.geometric_close(5, 6);
        assert!(closed.denominator().is_empty());
        assert_eq!(closed.numerator(), &[r(1, 1)]);
        assert!(RatFun::zero(5).geometric_close(5, 6).is_zero());
    }

    #[test]
    fn series_expand_examples() {
        assert_eq!(geometric(5).series_expand(3), vec![r(1, 1), r(1, 5), r(1, 25), r(1, 125)]);
        assert_eq!(RatFun::monomial(5, r(1, 1), 2).series_expand(3), vec![r(0, 1), r(0, 1), r(1, 1), r(0, 1)]);
        let smooth = RatFun::from_parts(5, vec![r(4, 5)], vec![DenomFactor::new(1, 1)]);
        assert_eq!(smooth.series_expand(2), vec![r(4, 5), r(4, 25), r(4, 125)]);
    }

    #[test]
    fn pole_real_part_examples() {
        let z = RatFun::from_parts(5, vec![r(1, 1)], vec![DenomFactor::new(5, 6), DenomFactor::new(1, 1)]);
        let poles: Vec<_> = z.pole_real_parts().into_iter().collect();
        assert_eq!(poles, vec![r(-1, 1), r(-5, 6)]);
        assert!(RatFun::polynomial(5, vec![r(1, 1), r(2, 1)]).pole_real_parts().is_empty());
        let w = RatFun::from_parts(5, vec![r(1, 1)], vec![DenomFactor::new(3, 2)]);
        assert_eq!(w.pole_real_parts().into_iter().collect::<Vec<_>>(), vec![r(-3, 2)]);
    }

    #[test]
    fn equality_is_semantic() {
        // 1/(1 - t/5) = (1 + t/5)/(1 - t^2/25); both are canonical.
        let a = geometric(5);
        let b = RatFun::from_parts(5, vec![r(1, 1), r(1, 5)], vec![DenomFactor::new(2, 2)]);
        assert_eq!(b.denominator(), &[DenomFactor::new(2, 2)]);
        assert_eq!(a, b);
        assert_ne!(a, geometric(7).scale(&r(1, 1), 0));
        assert_ne!(a, a.scale(&r(2, 1), 0));
    }

    #[test]
    fn denominator_divides_handles_non_minimal_forms() {
        let b = RatFun::from_parts(5, vec![r(1, 1), r(1, 5)], vec![DenomFactor::new(2, 2)]);
        assert!(b.denominator_divides(&[DenomFactor::new(1, 1)]));
        assert!(!geometric(5).denominator_divides(&[DenomFactor::new(5, 6)]));
        assert!(RatFun::one(5).denominator_divides(&[]));
    }

    #[test]
    fn json_roundtrip_and_rendering() {
        let z = RatFun::from_parts(5, vec![r(4, 5), r(-3, 125)], vec![DenomFactor::new(1, 1), DenomFactor::new(5, 6)]);
        let text = z.to_json().to_string();
        let back = RatFun::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back.numerator(), z.numerator());
        assert_eq!(back.denominator(), z.denominator());
        assert_eq!(z.to_string(), "(4/5 - 3/125*t) / (1 - 5^-1*t)(1 - 5^-5*t^6)");
        assert!(z.to_latex().starts_with("\\frac{\\frac{4}{5} - \\frac{3}{125} t}"));
        let huge = RatFun::constant(5, BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(5), 60)));
        let back = RatFun::from_json(&serde_json::from_str(&huge.to_json().to_string()).unwrap()).unwrap();
        assert_eq!(back.numerator(), huge.numerator());
    }

    fn arb_ratfun() -> impl Strategy<Value = RatFun> {
        (prop::collection::vec(-20i64..20, 0..5), prop::collection::vec((1u32..4, 1u32..4), 0..3)).prop_map(|(num, den)| {
            RatFun::from_parts(
                5,
                num.into_iter().map(|c| r(c, 1)).collect(),
                den.into_iter().map(|(a, b)| DenomFactor::new(a, b)).collect(),
            )
        })
    }

    proptest! {
        #[test]
        fn expansion_is_additive(a in arb_ratfun(), b in arb_ratfun()) {
            let lhs = a.add(&b).series_expand(20);
            let rhs: Vec<_> = a.series_expand(20).into_iter().zip(b.series_expand(20)).map(|(x, y)| x + y).collect();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn canonical_form_is_stable(a in arb_ratfun()) {
            let again = RatFun::from_parts(a.q(), a.numerator().to_vec(), a.denominator().to_vec());
            prop_assert_eq!(again.numerator(), a.numerator());
            prop_assert_eq!(again.denominator(), a.denominator());
            prop_assert_eq!(again.series_expand(12), a.series_expand(12));
        }

        #[test]
        fn product_expansion_matches(a in arb_ratfun(), b in arb_ratfun()) {
            let prod = a.mul(&b).series_expand(10);
            let (sa, sb) = (a.series_expand(10), b.series_expand(10));
            let conv: Vec<BigRational> = (0..=10)
                .map(|k| (0..=k).map(|i| &sa[i] * &sb[k - i]).fold(BigRational::zero(), |x, y| x + y))
                .collect();
            prop_assert_eq!(prod, conv);
        }
    }
}
