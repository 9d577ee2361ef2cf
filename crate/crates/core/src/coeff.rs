//! Coefficient rings.
//!
//! Two exact models of the valuation ring `O_K` of a non-archimedean local
//! field with prime residue field `F_p`:
//!
//! * [`PadicRing`]: `Z ⊂ Z_p`, elements are arbitrary-precision integers and
//!   the uniformizer is `p` itself (`K = Q_p`).
//! * [`FpSeriesRing`]: `F_p[π] ⊂ F_p[[π]]`, elements are polynomials in the
//!   uniformizer with coefficients in `F_p` (`K = F_p((π))`).
//!
//! Every operation the engine performs (translation by lifted points, scaling
//! by powers of the uniformizer, exact division by them) stays inside these
//! subrings, so no truncation is ever needed.

use std::fmt;
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Default cap on the number of points any single enumeration may visit.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// π-adic order of an element; `Infinite` only for zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Valuation {
    Finite(u32),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Valuation::Infinite
    }
}

impl std::ops::Add for Valuation {
    type Output = Valuation;

    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

/// The prime field `F_p`. Elements are plain `u64` representatives in `[0, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidParameters(format!("{p} is not prime")));
        }
        if p > u32::MAX as u64 {
            return Err(Error::InvalidParameters(format!("prime {p} is too large")));
        }
        Ok(PrimeField { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn reduce_i64(&self, x: i64) -> u64 {
        x.rem_euclid(self.p as i64) as u64
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.p
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.p - b) % self.p
    }

    pub fn neg(&self, a: u64) -> u64 {
        (self.p - a) % self.p
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut acc = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `a` must be nonzero.
    pub fn inv(&self, a: u64) -> u64 {
        assert!(!a.is_multiple_of(self.p), "zero has no inverse in F_{}", self.p);
        self.pow(a, self.p - 2)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// A model of `O_K` with prime residue field.
///
/// Implementations are cheap to clone (they only carry the prime) and all
/// element operations are exact.
#[allow(clippy::wrong_self_convention)]
pub trait LocalRing: Clone + fmt::Debug + PartialEq + Eq + Hash + Send + Sync {
    type Elem: Clone + fmt::Debug + PartialEq + Eq + Hash + Send + Sync;

    fn field(&self) -> PrimeField;

    /// `0` for `Q_p`, `p` for `F_p((π))`.
    fn characteristic(&self) -> u64;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    /// Image of an integer under the canonical map `Z -> O_K`.
    fn from_bigint(&self, n: &BigInt) -> Self::Elem;
    fn uniformizer_pow(&self, k: u32) -> Self::Elem;

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;

    fn valuation(&self, a: &Self::Elem) -> Valuation;

    /// Returns `y` with `π^k · y = x`.
    fn divide_by_uniformizer(&self, x: &Self::Elem, k: u32) -> Result<Self::Elem>;

    /// Residue class in `F_p`.
    fn reduce(&self, a: &Self::Elem) -> u64;

    /// The canonical lift of a residue: `{0,…,p−1}` or a constant polynomial.
    fn lift(&self, r: u64) -> Self::Elem;

    /// First `j` π-adic digits of `a`, i.e. `a mod π^j` written in base π
    /// with digits in the canonical lifting.
    fn digits(&self, a: &Self::Elem, j: usize) -> Vec<u64>;

    /// Short human-readable form.
    fn render(&self, a: &Self::Elem) -> String;

    /// Concrete view of an element for rendering.
    fn view(&self, a: &Self::Elem) -> ElemView;

    /// JSON form: an integer in characteristic zero, the coefficient list of
    /// the π-polynomial in characteristic p.
    fn to_json(&self, a: &Self::Elem) -> serde_json::Value;

    fn prime(&self) -> u64 {
        self.field().p()
    }

    fn from_i64(&self, n: i64) -> Self::Elem {
        self.from_bigint(&BigInt::from(n))
    }

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn pow(&self, a: &Self::Elem, e: u32) -> Self::Elem {
        let mut acc = self.one();
        for _ in 0..e {
            acc = self.mul(&acc, a);
        }
        acc
    }

    fn is_unit(&self, a: &Self::Elem) -> bool {
        self.valuation(a) == Valuation::Finite(0)
    }
}

/// An element seen as what it concretely is.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ElemView {
    Integer(BigInt),
    /// Coefficients in `[0, p)`, low degree first, no trailing zeros.
    PiPolynomial(Vec<u64>),
}

/// `Z` viewed inside `Z_p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PadicRing {
    field: PrimeField,
}

impl PadicRing {
    pub fn new(p: u64) -> Result<Self> {
        Ok(PadicRing { field: PrimeField::new(p)? })
    }
}

impl LocalRing for PadicRing {
    type Elem = BigInt;

    fn field(&self) -> PrimeField {
        self.field
    }

    fn characteristic(&self) -> u64 {
        0
    }

    fn zero(&self) -> BigInt {
        BigInt::zero()
    }

    fn one(&self) -> BigInt {
        BigInt::one()
    }

    fn from_bigint(&self, n: &BigInt) -> BigInt {
        n.clone()
    }

    fn uniformizer_pow(&self, k: u32) -> BigInt {
        num_traits::pow(BigInt::from(self.field.p()), k as usize)
    }

    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }

    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }

    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }

    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }

    fn valuation(&self, a: &BigInt) -> Valuation {
        if a.is_zero() {
            return Valuation::Infinite;
        }
        let p = self.field.p();
        if let Some(mut small) = a.to_i128() {
            let p = p as i128;
            let mut v = 0;
            while small % p == 0 {
                small /= p;
                v += 1;
            }
            return Valuation::Finite(v);
        }
        let p = BigInt::from(p);
        let mut v = 0;
        let mut y = a.clone();
        loop {
            let (q, r) = y.div_rem(&p);
            if !r.is_zero() {
                return Valuation::Finite(v);
            }
            y = q;
            v += 1;
        }
    }

    fn divide_by_uniformizer(&self, x: &BigInt, k: u32) -> Result<BigInt> {
        if x.is_zero() {
            return Ok(BigInt::zero());
        }
        let v = self.valuation(x);
        if v < Valuation::Finite(k) {
            return Err(Error::InsufficientValuation { valuation: v.to_string(), requested: k });
        }
        Ok(x / self.uniformizer_pow(k))
    }

    fn reduce(&self, a: &BigInt) -> u64 {
        a.mod_floor(&BigInt::from(self.field.p())).to_u64().expect("residue fits in u64")
    }

    fn lift(&self, r: u64) -> BigInt {
        BigInt::from(r % self.field.p())
    }

    fn digits(&self, a: &BigInt, j: usize) -> Vec<u64> {
        let p = BigInt::from(self.field.p());
        let mut rest = a.mod_floor(&self.uniformizer_pow(j as u32));
        let mut out = Vec::with_capacity(j);
        for _ in 0..j {
            let (q, r) = rest.div_rem(&p);
            out.push(r.to_u64().expect("digit fits in u64"));
            rest = q;
        }
        out
    }

    fn render(&self, a: &BigInt) -> String {
        a.to_string()
    }

    fn view(&self, a: &BigInt) -> ElemView {
        ElemView::Integer(a.clone())
    }

    fn to_json(&self, a: &BigInt) -> serde_json::Value {
        bigint_json(a)
    }
}

pub(crate) fn bigint_json(a: &BigInt) -> serde_json::Value {
    serde_json::from_str(&a.to_string()).expect("integer literal is valid JSON")
}

/// Polynomial in the uniformizer over `F_p`, stored low degree first with no
/// trailing zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct PiPoly(Vec<u64>);

impl PiPoly {
    pub fn coeffs(&self) -> &[u64] {
        &self.0
    }

    fn trimmed(mut c: Vec<u64>) -> PiPoly {
        while c.last() == Some(&0) {
            c.pop();
        }
        PiPoly(c)
    }
}

/// `F_p[π]` viewed inside `F_p[[π]]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FpSeriesRing {
    field: PrimeField,
}

impl FpSeriesRing {
    pub fn new(p: u64) -> Result<Self> {
        Ok(FpSeriesRing { field: PrimeField::new(p)? })
    }

    /// Builds an element from its coefficients (low degree first), reducing
    /// each modulo p.
    pub fn element(&self, coeffs: &[u64]) -> PiPoly {
        PiPoly::trimmed(coeffs.iter().map(|c| c % self.field.p()).collect())
    }
}

impl LocalRing for FpSeriesRing {
    type Elem = PiPoly;

    fn field(&self) -> PrimeField {
        self.field
    }

    fn characteristic(&self) -> u64 {
        self.field.p()
    }

    fn zero(&self) -> PiPoly {
        PiPoly::default()
    }

    fn one(&self) -> PiPoly {
        PiPoly(vec![1])
    }

    fn from_bigint(&self, n: &BigInt) -> PiPoly {
        let r = n.mod_floor(&BigInt::from(self.field.p())).to_u64().expect("residue fits");
        PiPoly::trimmed(vec![r])
    }

    fn uniformizer_pow(&self, k: u32) -> PiPoly {
        let mut c = vec![0; k as usize + 1];
        c[k as usize] = 1;
        PiPoly(c)
    }

    fn add(&self, a: &PiPoly, b: &PiPoly) -> PiPoly {
        let (long, short) = if a.0.len() >= b.0.len() { (a, b) } else { (b, a) };
        let mut c = long.0.clone();
        for (i, x) in short.0.iter().enumerate() {
            c[i] = self.field.add(c[i], *x);
        }
        PiPoly::trimmed(c)
    }

    fn neg(&self, a: &PiPoly) -> PiPoly {
        PiPoly(a.0.iter().map(|&x| self.field.neg(x)).collect())
    }

    fn mul(&self, a: &PiPoly, b: &PiPoly) -> PiPoly {
        if a.0.is_empty() || b.0.is_empty() {
            return PiPoly::default();
        }
        let p = self.field.p();
        let mut c = vec![0u64; a.0.len() + b.0.len() - 1];
        for (i, x) in a.0.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in b.0.iter().enumerate() {
                c[i + j] = (c[i + j] + x * y) % p;
            }
        }
        PiPoly::trimmed(c)
    }

    fn is_zero(&self, a: &PiPoly) -> bool {
        a.0.is_empty()
    }

    fn valuation(&self, a: &PiPoly) -> Valuation {
        match a.0.iter().position(|&c| c != 0) {
            Some(i) => Valuation::Finite(i as u32),
            None => Valuation::Infinite,
        }
    }

    fn divide_by_uniformizer(&self, x: &PiPoly, k: u32) -> Result<PiPoly> {
        if x.0.is_empty() {
            return Ok(PiPoly::default());
        }
        let v = self.valuation(x);
        if v < Valuation::Finite(k) {
            return Err(Error::InsufficientValuation { valuation: v.to_string(), requested: k });
        }
        Ok(PiPoly(x.0[k as usize..].to_vec()))
    }

    fn reduce(&self, a: &PiPoly) -> u64 {
        a.0.first().copied().unwrap_or(0)
    }

    fn lift(&self, r: u64) -> PiPoly {
        PiPoly::trimmed(vec![r % self.field.p()])
    }

    fn digits(&self, a: &PiPoly, j: usize) -> Vec<u64> {
        (0..j).map(|i| a.0.get(i).copied().unwrap_or(0)).collect()
    }

    fn render(&self, a: &PiPoly) -> String {
        if a.0.is_empty() {
            return "0".to_string();
        }
        let parts: Vec<String> =
            a.0.iter()
                .enumerate()
                .filter(|(_, c)| **c != 0)
                .map(|(i, c)| match (i, c) {
                    (0, c) => c.to_string(),
                    (1, 1) => "u".to_string(),
                    (1, c) => format!("{c}*u"),
                    (i, 1) => format!("u^{i}"),
                    (i, c) => format!("{c}*u^{i}"),
                })
                .collect();
        parts.join(" + ")
    }

    fn view(&self, a: &PiPoly) -> ElemView {
        ElemView::PiPolynomial(a.0.clone())
    }

    fn to_json(&self, a: &PiPoly) -> serde_json::Value {
        serde_json::Value::Array(a.0.iter().map(|c| serde_json::Value::from(*c)).collect())
    }
}

/// A set of representatives of `F_p` inside `O_K`.
#[derive(Debug, Clone)]
pub struct Lifting<R: LocalRing> {
    table: Vec<R::Elem>,
}

impl<R: LocalRing> Lifting<R> {
    /// `{0,…,p−1}` in characteristic zero, constant polynomials in
    /// characteristic p.
    pub fn canonical(ring: &R) -> Self {
        Lifting { table: (0..ring.prime()).map(|a| ring.lift(a)).collect() }
    }

    /// Any table whose entry `a` reduces to `a`.
    pub fn from_table(ring: &R, table: Vec<R::Elem>) -> Result<Self> {
        if table.len() as u64 != ring.prime() {
            return Err(Error::InvalidParameters(format!(
                "lifting table has {} entries, expected {}",
                table.len(),
                ring.prime()
            )));
        }
        for (a, x) in table.iter().enumerate() {
            if ring.reduce(x) != a as u64 {
                return Err(Error::InvalidParameters(format!("lifting entry {a} reduces to {}", ring.reduce(x))));
            }
        }
        Ok(Lifting { table })
    }

    pub fn lift(&self, a: u64) -> &R::Elem {
        &self.table[a as usize]
    }

    pub fn lift_point(&self, point: &[u64]) -> Vec<R::Elem> {
        point.iter().map(|&a| self.lift(a).clone()).collect()
    }
}

/// `p^n`, or `None` on overflow.
pub fn checked_power(p: u64, n: usize) -> Option<u64> {
    let n = u32::try_from(n).ok()?;
    p.checked_pow(n)
}

pub(crate) fn check_budget(p: u64, n: usize, cap: u64) -> Result<u64> {
    match checked_power(p, n) {
        Some(size) if size <= cap => Ok(size),
        _ => Err(Error::BudgetExceeded { requested: format!("{p}^{n}"), cap }),
    }
}

/// Lexicographic iterator over `F_p^n` (last coordinate varies fastest).
#[derive(Debug, Clone)]
pub struct PointIter {
    p: u64,
    next: Option<Vec<u64>>,
}

impl PointIter {
    pub fn new(p: u64, n: usize) -> Self {
        PointIter { p, next: Some(vec![0; n]) }
    }
}

impl Iterator for PointIter {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut i = succ.len();
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            succ[i] += 1;
            if succ[i] < self.p {
                self.next = Some(succ);
                break;
            }
            succ[i] = 0;
        }
        Some(current)
    }
}

/// All points of `F_p^n` in lexicographic order.
pub fn enumerate_points(field: PrimeField, n: usize, cap: u64) -> Result<Vec<Vec<u64>>> {
    check_budget(field.p(), n, cap)?;
    Ok(PointIter::new(field.p(), n).collect())
}

/// Minimum of a family of valuations; `Infinite` for an empty family.
pub fn min_valuation<I: IntoIterator<Item = Valuation>>(it: I) -> Valuation {
    it.into_iter().min().unwrap_or(Valuation::Infinite)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn valuation_examples() {
        let z5 = PadicRing::new(5).unwrap();
        assert_eq!(z5.valuation(&BigInt::from(75)), Valuation::Finite(2));
        assert_eq!(z5.valuation(&BigInt::from(0)), Valuation::Infinite);
        let f3 = FpSeriesRing::new(3).unwrap();
        let x = f3.element(&[0, 0, 1, 2]);
        assert_eq!(f3.valuation(&x), Valuation::Finite(2));
    }

    #[test]
    fn divide_by_uniformizer_examples() {
        let z5 = PadicRing::new(5).unwrap();
        assert_eq!(z5.divide_by_uniformizer(&BigInt::from(75), 2).unwrap(), BigInt::from(3));
        assert_eq!(z5.divide_by_uniformizer(&BigInt::from(0), 7).unwrap(), BigInt::from(0));
        assert!(matches!(z5.divide_by_uniformizer(&BigInt::from(5), 2), Err(Error::InsufficientValuation { .. })));
        let f5 = FpSeriesRing::new(5).unwrap();
        let x = f5.element(&[0, 0, 3, 1]);
        assert_eq!(f5.divide_by_uniformizer(&x, 2).unwrap(), f5.element(&[3, 1]));
        assert!(f5.divide_by_uniformizer(&x, 3).is_err());
    }

    #[test]
    fn enumerate_points_examples() {
        let f2 = PrimeField::new(2).unwrap();
        assert_eq!(enumerate_points(f2, 1, DEFAULT_BUDGET).unwrap(), vec![vec![0], vec![1]]);
        let f3 = PrimeField::new(3).unwrap();
        let pts = enumerate_points(f3, 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(pts.len(), 9);
        assert_eq!(pts[0], vec![0, 0]);
        assert_eq!(pts[8], vec![2, 2]);
        assert!(matches!(enumerate_points(f2, 64, DEFAULT_BUDGET), Err(Error::BudgetExceeded { .. })));
        let all: std::collections::BTreeSet<_> =
            enumerate_points(PrimeField::new(5).unwrap(), 3, DEFAULT_BUDGET).unwrap().into_iter().collect();
        assert_eq!(all.len(), 125);
    }

    #[test]
    fn prime_field_rejects_composites() {
        assert!(PrimeField::new(1).is_err());
        assert!(PrimeField::new(9).is_err());
        assert!(PrimeField::new(7).is_ok());
    }

    #[test]
    fn digits_and_reduction() {
        let z5 = PadicRing::new(5).unwrap();
        assert_eq!(z5.digits(&BigInt::from(38), 3), vec![3, 2, 1]);
        assert_eq!(z5.digits(&BigInt::from(-1), 2), vec![4, 4]);
        assert_eq!(z5.reduce(&BigInt::from(-3)), 2);
        let f5 = FpSeriesRing::new(5).unwrap();
        assert_eq!(f5.from_i64(-1), f5.element(&[4]));
        assert_eq!(f5.digits(&f5.element(&[1, 0, 2]), 2), vec![1, 0]);
    }

    #[test]
    fn lifting_tables() {
        let z3 = PadicRing::new(3).unwrap();
        let canon = Lifting::canonical(&z3);
        assert_eq!(canon.lift(2), &BigInt::from(2));
        let alt = Lifting::from_table(&z3, vec![BigInt::from(3), BigInt::from(-2), BigInt::from(11)]).unwrap();
        assert_eq!(alt.lift(1), &BigInt::from(-2));
        assert!(Lifting::from_table(&z3, vec![BigInt::from(1), BigInt::from(1), BigInt::from(2)]).is_err());
    }

    fn arb_pipoly() -> impl Strategy<Value = Vec<u64>> {
        prop::collection::vec(0u64..7, 0..6)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn padic_valuation_laws(x in -100_000i64..100_000, y in -100_000i64..100_000) {
            let r = PadicRing::new(5).unwrap();
            let (x, y) = (BigInt::from(x), BigInt::from(y));
            let (vx, vy) = (r.valuation(&x), r.valuation(&y));
            if !x.is_zero() && !y.is_zero() {
                prop_assert_eq!(r.valuation(&r.mul(&x, &y)), vx + vy);
            }
            prop_assert!(r.valuation(&r.add(&x, &y)) >= vx.min(vy));
            prop_assert_eq!(r.reduce(&x) == 0, vx >= Valuation::Finite(1));
        }

        #[test]
        fn series_valuation_laws(x in arb_pipoly(), y in arb_pipoly()) {
            let r = FpSeriesRing::new(7).unwrap();
            let (x, y) = (r.element(&x), r.element(&y));
            let (vx, vy) = (r.valuation(&x), r.valuation(&y));
            if !r.is_zero(&x) && !r.is_zero(&y) {
                prop_assert_eq!(r.valuation(&r.mul(&x, &y)), vx + vy);
            }
            prop_assert!(r.valuation(&r.add(&x, &y)) >= vx.min(vy));
        }

        #[test]
        fn reduction_is_a_ring_homomorphism(x in -10_000i64..10_000, y in -10_000i64..10_000) {
            let r = PadicRing::new(7).unwrap();
            let f = r.field();
            let (x, y) = (BigInt::from(x), BigInt::from(y));
            prop_assert_eq!(r.reduce(&r.add(&x, &y)), f.add(r.reduce(&x), r.reduce(&y)));
            prop_assert_eq!(r.reduce(&r.mul(&x, &y)), f.mul(r.reduce(&x), r.reduce(&y)));
        }

        #[test]
        fn reduce_after_lift_is_identity(a in 0u64..11) {
            let z = PadicRing::new(11).unwrap();
            prop_assert_eq!(z.reduce(&z.lift(a)), a);
            let s = FpSeriesRing::new(11).unwrap();
            prop_assert_eq!(s.reduce(&s.lift(a)), a);
        }
    }
}
