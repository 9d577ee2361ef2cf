//! Exact multivariate polynomials over a [`LocalRing`], plus their
//! reductions modulo the uniformizer.

mod parse;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::binomial;

use crate::coeff::{ElemView, LocalRing, PrimeField, Valuation};
use crate::error::{Error, Result};

pub use parse::parse;

/// Exponent vector. Ordered by total degree first, then with larger leading
/// exponents first (`x^2 < x*y < y^2` inside degree 2).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn zero(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `Σ α_i m_i`.
pub fn weighted_degree(exponents: &[u32], weights: &[u32]) -> u64 {
    assert_eq!(exponents.len(), weights.len(), "weight vector length mismatch");
    exponents.iter().zip(weights).map(|(&m, &a)| m as u64 * a as u64).sum()
}

/// A polynomial in `n` variables with coefficients in `R`. No stored
/// coefficient is zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly<R: LocalRing> {
    ring: R,
    nvars: usize,
    terms: BTreeMap<Monomial, R::Elem>,
}

impl<R: LocalRing> MultiPoly<R> {
    pub fn zero(ring: &R, nvars: usize) -> Self {
        MultiPoly { ring: ring.clone(), nvars, terms: BTreeMap::new() }
    }

    pub fn constant(ring: &R, nvars: usize, c: R::Elem) -> Self {
        Self::from_terms(ring, nvars, [(vec![0; nvars], c)])
    }

    /// The variable `x_i` (0-based).
    pub fn variable(ring: &R, nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::from_terms(ring, nvars, [(e, ring.one())])
    }

    /// Sums the given terms; repeated exponent vectors are combined.
    pub fn from_terms<I>(ring: &R, nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, R::Elem)>,
    {
        let mut p = Self::zero(ring, nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector has wrong length");
            p.add_term(Monomial(e), c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: R::Elem) {
        if self.ring.is_zero(&c) {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let sum = self.ring.add(existing, &c);
                if self.ring.is_zero(&sum) {
                    self.terms.remove(&m);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &R::Elem)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, exponents: &[u32]) -> R::Elem {
        self.terms.get(&Monomial(exponents.to_vec())).cloned().unwrap_or_else(|| self.ring.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn constant_term(&self) -> R::Elem {
        self.coefficient(&vec![0; self.nvars])
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_compatible(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        MultiPoly {
            ring: self.ring.clone(),
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), self.ring.neg(c))).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_compatible(other);
        let mut out = Self::zero(&self.ring, self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let e = m1.0.iter().zip(&m2.0).map(|(a, b)| a + b).collect();
                out.add_term(Monomial(e), self.ring.mul(c1, c2));
            }
        }
        out
    }

    pub fn scale(&self, c: &R::Elem) -> Self {
        let mut out = Self::zero(&self.ring, self.nvars);
        for (m, x) in &self.terms {
            out.add_term(m.clone(), self.ring.mul(x, c));
        }
        out
    }

    fn check_compatible(&self, other: &Self) {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        assert!(self.ring == other.ring, "coefficient ring mismatch");
    }

    /// Minimum valuation of the coefficients.
    pub fn content_valuation(&self) -> Result<u32> {
        self.terms.values().filter_map(|c| self.ring.valuation(c).finite()).min().ok_or(Error::ZeroPolynomial)
    }

    /// Divides every coefficient by `π^k`.
    pub fn divide_by_uniformizer(&self, k: u32) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            terms.insert(m.clone(), self.ring.divide_by_uniformizer(c, k)?);
        }
        Ok(MultiPoly { ring: self.ring.clone(), nvars: self.nvars, terms })
    }

    /// Splits off the content: returns `(e, g)` with `self = π^e g` and `g`
    /// of unit content.
    pub fn normalize(&self) -> Result<(u32, Self)> {
        let e = self.content_valuation()?;
        Ok((e, self.divide_by_uniformizer(e)?))
    }

    /// Coefficient-wise reduction modulo π. Requires unit content.
    pub fn reduce_mod_pi(&self) -> Result<ResiduePoly> {
        let e = self.content_valuation()?;
        if e > 0 {
            return Err(Error::NonUnitContent { valuation: e });
        }
        let mut out = ResiduePoly::zero(self.ring.field(), self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), self.ring.reduce(c));
        }
        Ok(out)
    }

    /// Formal partial derivative with respect to `x_i` (0-based).
    pub fn partial_derivative(&self, i: usize) -> Self {
        assert!(i < self.nvars, "variable index out of range");
        let mut out = Self::zero(&self.ring, self.nvars);
        for (m, c) in &self.terms {
            let k = m.0[i];
            if k == 0 {
                continue;
            }
            let mut e = m.0.clone();
            e[i] -= 1;
            out.add_term(Monomial(e), self.ring.mul(c, &self.ring.from_i64(k as i64)));
        }
        out
    }

    /// `f(c_1 + π^{m_1} x_1, …, c_n + π^{m_n} x_n)`, expanded exactly.
    pub fn substitute_affine(&self, center: &[R::Elem], scale: &[u32]) -> Self {
        assert_eq!(center.len(), self.nvars, "center has wrong length");
        assert_eq!(scale.len(), self.nvars, "scale has wrong length");
        let ring = &self.ring;

        // tables[i][e] holds the coefficients of (c_i + π^{m_i} x)^e.
        let mut tables: Vec<Vec<Vec<R::Elem>>> = Vec::with_capacity(self.nvars);
        for i in 0..self.nvars {
            let max_e = self.terms.keys().map(|m| m.0[i]).max().unwrap_or(0) as usize;
            let pi_m = ring.uniformizer_pow(scale[i]);
            let mut rows = vec![vec![ring.one()]];
            for e in 1..=max_e {
                let c_pows: Vec<R::Elem> = {
                    let mut v = vec![ring.one()];
                    for _ in 0..e {
                        let last = v.last().unwrap().clone();
                        v.push(ring.mul(&last, &center[i]));
                    }
                    v
                };
                let mut pi_pow = ring.one();
                let mut row = Vec::with_capacity(e + 1);
                for k in 0..=e {
                    let b = ring.from_bigint(&binomial(BigInt::from(e), BigInt::from(k)));
                    row.push(ring.mul(&ring.mul(&b, &c_pows[e - k]), &pi_pow));
                    pi_pow = ring.mul(&pi_pow, &pi_m);
                }
                rows.push(row);
            }
            tables.push(rows);
        }

        let mut out = Self::zero(ring, self.nvars);
        for (m, c) in &self.terms {
            let mut partial: Vec<(Vec<u32>, R::Elem)> = vec![(vec![0; self.nvars], c.clone())];
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let row = &tables[i][e as usize];
                let mut next = Vec::with_capacity(partial.len() * row.len());
                for (exps, coef) in &partial {
                    for (k, u) in row.iter().enumerate() {
                        if ring.is_zero(u) {
                            continue;
                        }
                        let mut ex = exps.clone();
                        ex[i] = k as u32;
                        next.push((ex, ring.mul(coef, u)));
                    }
                }
                partial = next;
            }
            for (e, x) in partial {
                out.add_term(Monomial(e), x);
            }
        }
        out
    }

    /// Exact value at a point.
    pub fn evaluate(&self, point: &[R::Elem]) -> R::Elem {
        assert_eq!(point.len(), self.nvars, "point has wrong length");
        let ring = &self.ring;
        let mut acc = ring.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t = ring.mul(&t, &ring.pow(x, e));
                }
            }
            acc = ring.add(&acc, &t);
        }
        acc
    }

    /// The value at `point` and all first partials there.
    pub fn value_and_gradient(&self, point: &[R::Elem]) -> (R::Elem, Vec<R::Elem>) {
        let value = self.evaluate(point);
        let grad = (0..self.nvars).map(|i| self.partial_derivative(i).evaluate(point)).collect();
        (value, grad)
    }

    /// Minimum valuation of the coefficients whose monomial satisfies `pred`.
    pub fn min_valuation_where<F: Fn(&Monomial) -> bool>(&self, pred: F) -> Valuation {
        self.terms.iter().filter(|(m, _)| pred(m)).map(|(_, c)| self.ring.valuation(c)).min().unwrap_or(Valuation::Infinite)
    }

    /// Canonical text form, accepted back by [`parse`].
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let names = variable_names(self.nvars);
        let mut pieces: Vec<(bool, String)> = Vec::new();
        for (m, c) in &self.terms {
            let mono = render_monomial(m, &names);
            match self.ring.view(c) {
                ElemView::Integer(v) => {
                    let negative = v < BigInt::from(0);
                    let mag = if negative { -v } else { v };
                    pieces.push((negative, join_coeff(mag.to_string(), &mono)));
                }
                ElemView::PiPolynomial(digits) => {
                    for (k, d) in digits.iter().enumerate() {
                        if *d == 0 {
                            continue;
                        }
                        let mut factors = Vec::new();
                        if *d != 1 || (k == 0 && mono.is_empty()) {
                            factors.push(d.to_string());
                        }
                        match k {
                            0 => {}
                            1 => factors.push("u".to_string()),
                            k => factors.push(format!("u^{k}")),
                        }
                        if !mono.is_empty() {
                            factors.push(mono.clone());
                        }
                        pieces.push((false, factors.join("*")));
                    }
                }
            }
        }
        let mut out = String::new();
        for (i, (neg, s)) in pieces.iter().enumerate() {
            match (i, neg) {
                (0, true) => out.push_str(&format!("-{s}")),
                (0, false) => out.push_str(s),
                (_, true) => out.push_str(&format!(" - {s}")),
                (_, false) => out.push_str(&format!(" + {s}")),
            }
        }
        out
    }
}

impl<R: LocalRing> fmt::Debug for MultiPoly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly[{}]({})", self.nvars, self.render())
    }
}

impl<R: LocalRing> fmt::Display for MultiPoly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

pub(crate) fn variable_names(n: usize) -> Vec<String> {
    if n <= 4 {
        ["x", "y", "z", "w"][..n].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=n).map(|i| format!("x{i}")).collect()
    }
}

fn render_monomial(m: &Monomial, names: &[String]) -> String {
    let factors: Vec<String> =
        m.0.iter()
            .zip(names)
            .filter(|(e, _)| **e > 0)
            .map(|(e, name)| if *e == 1 { name.clone() } else { format!("{name}^{e}") })
            .collect();
    factors.join("*")
}

fn join_coeff(coeff: String, mono: &str) -> String {
    match (coeff.as_str(), mono.is_empty()) {
        (_, true) => coeff,
        ("1", false) => mono.to_string(),
        _ => format!("{coeff}*{mono}"),
    }
}

/// A polynomial over `F_p`: the reduction of a [`MultiPoly`] modulo π.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ResiduePoly {
    field: PrimeField,
    nvars: usize,
    terms: BTreeMap<Monomial, u64>,
}

impl ResiduePoly {
    pub fn zero(field: PrimeField, nvars: usize) -> Self {
        ResiduePoly { field, nvars, terms: BTreeMap::new() }
    }

    pub fn from_terms<I: IntoIterator<Item = (Vec<u32>, u64)>>(field: PrimeField, nvars: usize, terms: I) -> Self {
        let mut p = Self::zero(field, nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector has wrong length");
            p.add_term(Monomial(e), c % field.p());
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: u64) {
        if c == 0 {
            return;
        }
        let f = self.field;
        let entry = self.terms.entry(m.clone()).or_insert(0);
        *entry = f.add(*entry, c);
        if *entry == 0 {
            self.terms.remove(&m);
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &u64)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Self::zero(self.field, self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let e = m1.0.iter().zip(&m2.0).map(|(a, b)| a + b).collect();
                out.add_term(Monomial(e), self.field.mul(*c1, *c2));
            }
        }
        out
    }

    pub fn partial_derivative(&self, i: usize) -> Self {
        let mut out = Self::zero(self.field, self.nvars);
        for (m, c) in &self.terms {
            let k = m.0[i];
            if k == 0 {
                continue;
            }
            let mut e = m.0.clone();
            e[i] -= 1;
            out.add_term(Monomial(e), self.field.mul(*c, k as u64 % self.field.p()));
        }
        out
    }

    pub fn evaluate(&self, point: &[u64]) -> u64 {
        let f = self.field;
        self.terms.iter().fold(0, |acc, (m, c)| {
            let t = m.0.iter().zip(point).fold(*c, |t, (&e, &x)| f.mul(t, f.pow(x, e as u64)));
            f.add(acc, t)
        })
    }

    /// True iff the polynomial is a nonzero constant.
    pub fn is_nonzero_constant(&self) -> bool {
        self.terms.len() == 1 && self.terms.keys().all(|m| m.degree() == 0)
    }

    /// True iff the polynomial is a nonzero linear form without constant term.
    pub fn is_linear_form(&self) -> bool {
        !self.terms.is_empty() && self.terms.keys().all(|m| m.degree() == 1)
    }

    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let names = variable_names(self.nvars);
        self.terms.iter().map(|(m, c)| join_coeff(c.to_string(), &render_monomial(m, &names))).collect::<Vec<_>>().join(" + ")
    }
}
