//! Zeta functions of semiquasihomogeneous polynomials.
//!
//! For `F = f + g` with `f` quasihomogeneous of weighted degree `d` for the
//! weights `α` and `g` of higher weighted degree, split `O^n` into
//! `A = {v(x_i) ≥ α_i}` and its complement. The substitution
//! `x = π^α ∘ y` maps `A` onto `O^n` and turns `F` into `π^d F_1`, so
//!
//! ```text
//! Z(F) = Z(F, A^c) + W Z(F_1),    W = p^{-|α|} t^d.
//! ```
//!
//! Iterating pushes `g` to ever higher valuation until `Z(F_k, A^c)`
//! coincides with `Z(f, A^c)`, after which the tail is geometric.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;
use serde_json::{json, Value};

use crate::coeff::{LocalRing, Valuation};
use crate::error::{Error, Result};
use crate::poly::{weighted_degree, MultiPoly};
use crate::ratfun::{DenomFactor, RatFun};
use crate::region::{cell_change_of_variables, complement_cells, Polydisc, ValuationCell};
use crate::spf::{spf_zeta, SpfConfig, SpfTrace, TreeStats};

/// Coprime positive weights `α` and a weighted degree `d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeightSystem {
    pub alpha: Vec<u32>,
    pub d: u32,
}

impl WeightSystem {
    pub fn new(alpha: Vec<u32>, d: u32) -> Result<Self> {
        if alpha.is_empty() || alpha.contains(&0) || d == 0 {
            return Err(Error::InvalidHint("weights and degree must be positive".into()));
        }
        if alpha.iter().fold(0u32, |g, &a| g.gcd(&a)) != 1 {
            return Err(Error::InvalidHint(format!("weights {alpha:?} are not coprime")));
        }
        Ok(WeightSystem { alpha, d })
    }

    /// Parses `"a1,a2,…:d"`.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = || Error::InvalidHint(format!("expected \"a1,a2,…:d\", got {text:?}"));
        let (weights, d) = text.split_once(':').ok_or_else(bad)?;
        let alpha = weights.split(',').map(|w| w.trim().parse::<u32>().map_err(|_| bad())).collect::<Result<Vec<_>>>()?;
        let d = d.trim().parse::<u32>().map_err(|_| bad())?;
        Self::new(alpha, d)
    }

    /// `|α| = Σ α_i`.
    pub fn total(&self) -> u32 {
        self.alpha.iter().sum()
    }

    /// `1 − p^{-|α|} t^d`.
    pub fn factor(&self) -> DenomFactor {
        DenomFactor::new(self.total(), self.d)
    }
}

impl std::fmt::Display for WeightSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let a: Vec<String> = self.alpha.iter().map(u32::to_string).collect();
        write!(f, "{}:{}", a.join(","), self.d)
    }
}

/// `F = f + g` with `f` the weighted-degree-`d` part.
#[derive(Debug, Clone)]
pub struct SqhDecomposition<R: LocalRing> {
    pub f: MultiPoly<R>,
    pub g: MultiPoly<R>,
    pub weights: WeightSystem,
}

fn split<R: LocalRing>(poly: &MultiPoly<R>, w: &WeightSystem) -> (u64, MultiPoly<R>, MultiPoly<R>) {
    let ring = poly.ring();
    let n = poly.nvars();
    let min = poly.terms().map(|(m, _)| weighted_degree(m.exponents(), &w.alpha)).min().unwrap_or(0);
    let part = |keep: bool| {
        MultiPoly::from_terms(
            ring,
            n,
            poly.terms()
                .filter(|(m, _)| (weighted_degree(m.exponents(), &w.alpha) == min) == keep)
                .map(|(m, c)| (m.exponents().to_vec(), c.clone())),
        )
    };
    (min, part(true), part(false))
}

/// Each variable must occur in `f` as `x_i^a` or `x_i^a x_j`; without such
/// monomials `f` has a non-isolated critical locus.
fn covers_every_variable<R: LocalRing>(f: &MultiPoly<R>) -> bool {
    (0..f.nvars()).all(|i| {
        f.terms().any(|(m, _)| {
            let e = m.exponents();
            let others: u32 = e.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x).sum();
            e[i] >= 1 && others <= 1
        })
    })
}

/// Finds or validates a weight system making `F` semiquasihomogeneous.
///
/// Without a hint, weights in `[1, deg F]^n` with gcd 1 are tried by
/// increasing `|α|`, then lexicographically.
pub fn detect_weights<R: LocalRing>(poly: &MultiPoly<R>, hint: Option<&WeightSystem>) -> Result<SqhDecomposition<R>> {
    if poly.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let n = poly.nvars();
    if poly.terms().any(|(m, _)| m.degree() == 0) {
        return Err(Error::NotSemiQuasiHomogeneous("the polynomial has a constant term".into()));
    }
    if let Some(w) = hint {
        if w.alpha.len() != n {
            return Err(Error::InvalidHint(format!("{} weights given for {n} variables", w.alpha.len())));
        }
        let (min, f, g) = split(poly, w);
        if min < w.d as u64 {
            return Err(Error::InvalidHint(format!("a monomial has weighted degree {min} < {}", w.d)));
        }
        if min > w.d as u64 {
            return Err(Error::InvalidHint(format!("no monomial has weighted degree {}", w.d)));
        }
        return Ok(SqhDecomposition { f, g, weights: w.clone() });
    }

    let max = poly.total_degree();
    let mut candidates: Vec<Vec<u32>> = vec![vec![]];
    for _ in 0..n {
        candidates = candidates
            .into_iter()
            .flat_map(|prefix| {
                (1..=max).map(move |a| {
                    let mut v = prefix.clone();
                    v.push(a);
                    v
                })
            })
            .collect();
    }
    candidates.retain(|a| a.iter().fold(0u32, |g, &x| g.gcd(&x)) == 1);
    candidates.sort_by_key(|a| (a.iter().sum::<u32>(), a.clone()));
    for alpha in candidates {
        let probe = WeightSystem { alpha, d: 1 };
        let (min, f, g) = split(poly, &probe);
        if covers_every_variable(&f) {
            let weights = WeightSystem { alpha: probe.alpha, d: min as u32 };
            return Ok(SqhDecomposition { f, g, weights });
        }
    }
    Err(Error::NotSemiQuasiHomogeneous(format!("no weight system with entries up to {max} works")))
}

/// `F_{k+1} = π^{-d} F_k(π^{α_1} x_1, …, π^{α_n} x_n)`.
pub fn scale_step<R: LocalRing>(poly: &MultiPoly<R>, w: &WeightSystem) -> Result<MultiPoly<R>> {
    let ring = poly.ring();
    let substituted = poly.substitute_affine(&vec![ring.zero(); poly.nvars()], &w.alpha);
    let next = substituted.divide_by_uniformizer(w.d)?;
    debug_assert_eq!(next.scale(&ring.uniformizer_pow(w.d)), substituted);
    Ok(next)
}

/// Minimal valuation among the coefficients of weighted degree above `d`.
pub fn g_valuation<R: LocalRing>(poly: &MultiPoly<R>, w: &WeightSystem) -> Valuation {
    poly.min_valuation_where(|m| weighted_degree(m.exponents(), &w.alpha) > w.d as u64)
}

/// One cell's share of a complement integral, kept when tracing.
#[derive(Debug, Clone, PartialEq)]
pub struct CellTrace {
    pub sign: i32,
    pub cell: ValuationCell,
    pub e: u32,
    pub d_shift: u32,
    pub trace: SpfTrace,
}

impl CellTrace {
    pub fn to_json(&self) -> Value {
        json!({
            "sign": self.sign,
            "cell": self.cell.constraints(),
            "e": self.e,
            "d_shift": self.d_shift,
            "tree": self.trace.to_json(),
        })
    }
}

/// `Z(F, A_α^c)` with the work that went into it.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplementZeta {
    pub value: RatFun,
    pub stats: TreeStats,
    /// Per-cell trees; empty unless tracing is on.
    pub cells: Vec<CellTrace>,
}

/// `Z(F, A_α^c)` as a signed sum over valuation cells.
pub fn zeta_on_complement<R: LocalRing>(poly: &MultiPoly<R>, w: &WeightSystem, cfg: &SpfConfig) -> Result<ComplementZeta> {
    let p = poly.ring().prime();
    let disc = Polydisc::new(w.alpha.clone())?;
    let mut total = RatFun::zero(p);
    let mut stats = TreeStats::default();
    let mut cells = Vec::new();
    for (sign, cell) in complement_cells(&disc) {
        let sub = cell_change_of_variables(poly, &cell)?;
        let (z, trace) = spf_zeta(&sub.f_b, &sub.target, cfg)?;
        let coeff = BigRational::new(BigInt::from(sign), num_traits::pow(BigInt::from(p), sub.d_shift as usize));
        total = total.add(&z.scale(&coeff, sub.e));
        stats.nodes += trace.stats.nodes;
        stats.max_depth = stats.max_depth.max(trace.stats.max_depth);
        stats.max_e_accum = stats.max_e_accum.max(trace.stats.max_e_accum + sub.e);
        if cfg.trace {
            cells.push(CellTrace { sign, cell, e: sub.e, d_shift: sub.d_shift, trace });
        }
    }
    if !total.denominator_divides(&[DenomFactor::new(1, 1)]) {
        return Err(Error::InvariantViolation(format!("complement integral {total} has an unexpected denominator")));
    }
    Ok(ComplementZeta { value: total, stats, cells })
}

/// Limits for [`zeta_semiquasihomogeneous`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SqhConfig {
    pub spf: SpfConfig,
    /// Maximum number of scaling steps. Zero disables the driver entirely.
    pub max_iterations: u32,
}

impl Default for SqhConfig {
    fn default() -> Self {
        SqhConfig { spf: SpfConfig::default(), max_iterations: 32 }
    }
}

/// What the driver found on the way.
#[derive(Debug, Clone, PartialEq)]
pub struct SqhReport {
    pub weights: WeightSystem,
    /// First index from which `Z(F_k, A^c)` is constant.
    pub k0: u32,
    pub pole_real_parts: Vec<BigRational>,
    pub tree_stats: TreeStats,
    /// `m_k`, the valuation of the non-leading part of each `F_k` computed.
    pub g_valuations: Vec<Valuation>,
    /// `Z(f, A^c)` for the quasihomogeneous part.
    pub complement_limit: RatFun,
    /// `(label, cells)` per complement integral, when tracing; the label is
    /// `"limit"` or `"k=<index>"`.
    pub traces: Vec<(String, Vec<CellTrace>)>,
}

impl SqhReport {
    pub fn to_json(&self, zeta: &RatFun) -> Value {
        json!({
            "weights": self.weights.alpha,
            "d": self.weights.d,
            "k0": self.k0,
            "zeta": zeta.to_json(),
            "pole_real_parts": self.pole_real_parts.iter().map(|r| format!("{}/{}", r.numer(), r.denom())).collect::<Vec<_>>(),
            "tree_stats": self.tree_stats.to_json(),
        })
    }

    /// Every recorded recursion tree, grouped by complement integral.
    pub fn traces_json(&self) -> Value {
        json!({
            "weights": self.weights.alpha,
            "d": self.weights.d,
            "k0": self.k0,
            "complements": self.traces.iter().map(|(label, cells)| json!({
                "label": label,
                "cells": cells.iter().map(CellTrace::to_json).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// `Z(F)` for a semiquasihomogeneous `F` with an isolated singularity at the
/// origin.
pub fn zeta_semiquasihomogeneous<R: LocalRing>(
    poly: &MultiPoly<R>,
    hint: Option<&WeightSystem>,
    cfg: &SqhConfig,
) -> Result<(RatFun, SqhReport)> {
    let dec = detect_weights(poly, hint)?;
    let w = &dec.weights;
    let p = poly.ring().prime();
    if cfg.max_iterations == 0 {
        return Err(Error::StabilizationNotReached(0));
    }
    let limit = zeta_on_complement(&dec.f, w, &cfg.spf)?;
    let mut stats = limit.stats;
    let mut traces = vec![("limit".to_string(), limit.cells)];
    let limit = limit.value;
    let step = RatFun::monomial(p, BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(p), w.total() as usize)), w.d);

    let mut g_valuations = vec![g_valuation(poly, w)];
    let mut values: Vec<RatFun> = Vec::new();
    let mut record = |k: u32, c: ComplementZeta, values: &mut Vec<RatFun>| {
        stats.absorb(&c.stats);
        if cfg.spf.trace {
            traces.push((format!("k={k}"), c.cells));
        }
        values.push(c.value);
    };
    let k0 = if dec.g.is_zero() {
        0
    } else {
        let mut current = poly.clone();
        record(0, zeta_on_complement(&current, w, &cfg.spf)?, &mut values);
        let mut found = None;
        for k in 1..=cfg.max_iterations {
            current = scale_step(&current, w)?;
            let m = g_valuation(&current, w);
            let prev = *g_valuations.last().expect("nonempty");
            if !(m > prev || m.is_infinite()) {
                return Err(Error::InvariantViolation(format!("m_k did not increase: {prev} then {m}")));
            }
            g_valuations.push(m);
            record(k, zeta_on_complement(&current, w, &cfg.spf)?, &mut values);
            let k = k as usize;
            if k >= 2 && values[k - 1] == limit && values[k] == limit {
                found = Some(k as u32 - 1);
                break;
            }
        }
        found.ok_or(Error::StabilizationNotReached(cfg.max_iterations))?
    };
    if !cfg.spf.trace {
        traces.clear();
    }

    let mut z = RatFun::zero(p);
    let mut weight = RatFun::one(p);
    for value in values.iter().take(k0 as usize) {
        z = z.add(&weight.mul(value));
        weight = weight.mul(&step);
    }
    let (a, b) = (w.total(), w.d);
    z = z.add(&weight.mul(&limit).geometric_close(a, b));
    if !z.denominator_divides(&[DenomFactor::new(1, 1), DenomFactor::new(a, b)]) {
        return Err(Error::InvariantViolation(format!("denominator of {z} does not divide (1 − t/p)(1 − p^-{a} t^{b})")));
    }
    let report = SqhReport {
        weights: w.clone(),
        k0,
        pole_real_parts: z.pole_real_parts().into_iter().collect(),
        tree_stats: stats,
        g_valuations,
        complement_limit: limit,
        traces,
    };
    Ok((z, report))
}
