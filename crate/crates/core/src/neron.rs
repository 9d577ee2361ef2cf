//! Singular points of the reduction, dilatations and the measures `l`, `L`.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::coeff::{min_valuation, LocalRing, Valuation};
use crate::error::{Error, Result};
use crate::poly::{MultiPoly, ResiduePoly};
use crate::region::ResidueRegion;

/// How a residue point sits relative to the zero set of `f̄`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PointClass {
    NonVanishing,
    SmoothZero,
    SingularZero,
}

/// Counts over a residue region, already weighted by `p^{-n}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointClassification {
    pub nu: BigRational,
    pub sigma: BigRational,
    /// Singular zeros of `f̄` in the region, lexicographic.
    pub singular: Vec<Vec<u64>>,
}

/// Classifies one point given `f̄` and its partials.
pub fn classify_point(fbar: &ResiduePoly, partials: &[ResiduePoly], point: &[u64]) -> PointClass {
    if fbar.evaluate(point) != 0 {
        PointClass::NonVanishing
    } else if partials.iter().any(|d| d.evaluate(point) != 0) {
        PointClass::SmoothZero
    } else {
        PointClass::SingularZero
    }
}

/// `ν`, `σ` and the singular zeros of `f̄` on `region`. `f` must have unit
/// content.
pub fn classify_points<R: LocalRing>(f: &MultiPoly<R>, region: &ResidueRegion, budget: u64) -> Result<PointClassification> {
    let fbar = f.reduce_mod_pi()?;
    let n = f.nvars();
    assert_eq!(region.nvars(), n, "region dimension mismatch");
    let partials: Vec<ResiduePoly> = (0..n).map(|i| fbar.partial_derivative(i)).collect();
    let (mut nonvanishing, mut smooth) = (0u64, 0u64);
    let mut singular = Vec::new();
    for pt in region.points(budget)? {
        match classify_point(&fbar, &partials, &pt) {
            PointClass::NonVanishing => nonvanishing += 1,
            PointClass::SmoothZero => smooth += 1,
            PointClass::SingularZero => singular.push(pt),
        }
    }
    let scale = num_traits::pow(BigInt::from(f.ring().prime()), n);
    Ok(PointClassification {
        nu: BigRational::new(BigInt::from(nonvanishing), scale.clone()),
        sigma: BigRational::new(BigInt::from(smooth), scale),
        singular,
    })
}

/// `f(P + π^m ∘ x) = π^e f_P(x)` with `f_P` of unit content.
pub fn dilate<R: LocalRing>(f: &MultiPoly<R>, center: &[R::Elem], scale: &[u32]) -> Result<(MultiPoly<R>, u32)> {
    let substituted = f.substitute_affine(center, scale);
    let (e, f_p) = substituted.normalize()?;
    debug_assert_eq!(f_p.scale(&f.ring().uniformizer_pow(e)), substituted, "dilatation identity");
    Ok((f_p, e))
}

/// `L(f, P) = min(v(f(P)), v(∂f/∂x_i(P)))`; infinite at singular points of
/// `f` over `O`.
#[allow(non_snake_case)]
pub fn L_measure<R: LocalRing>(f: &MultiPoly<R>, point: &[R::Elem]) -> Valuation {
    let ring = f.ring();
    let (value, grad) = f.value_and_gradient(point);
    min_valuation(std::iter::once(&value).chain(&grad).map(|x| ring.valuation(x)))
}

/// `l(f, P) = min_i v(∂f/∂x_i(P))`.
pub fn l_measure<R: LocalRing>(f: &MultiPoly<R>, point: &[R::Elem]) -> Valuation {
    let ring = f.ring();
    min_valuation((0..f.nvars()).map(|i| ring.valuation(&f.partial_derivative(i).evaluate(point))))
}

/// Output of [`mu_procedure`].
#[derive(Debug, Clone)]
pub struct MuResult<R: LocalRing> {
    pub mu: u32,
    pub f_out: MultiPoly<R>,
    pub e_out: u32,
}

/// True iff the reduction is a nonzero constant or a nonzero linear form
/// without constant term.
pub fn is_terminal_reduction(g: &ResiduePoly) -> bool {
    g.is_nonzero_constant() || g.is_linear_form()
}

/// Smallest `μ ≥ 1` such that `π^{-e} f(P + π^μ x)` has a reduction that is a
/// nonzero constant or a linear form. Requires `P̄` to be a singular zero of
/// `f̄` and `L(f, P)` finite; the search stops at `L(f, P) + 2`.
pub fn mu_procedure<R: LocalRing>(f: &MultiPoly<R>, point: &[R::Elem]) -> Result<MuResult<R>> {
    let ring = f.ring();
    let n = f.nvars();
    let bound = match L_measure(f, point) {
        Valuation::Finite(l) => l,
        Valuation::Infinite => return Err(Error::NotApplicable("P is a singular point of f over O".into())),
    };
    let fbar = f.reduce_mod_pi()?;
    let residue: Vec<u64> = point.iter().map(|x| ring.reduce(x)).collect();
    let partials: Vec<ResiduePoly> = (0..n).map(|i| fbar.partial_derivative(i)).collect();
    if classify_point(&fbar, &partials, &residue) != PointClass::SingularZero {
        return Err(Error::NotApplicable("the reduction is not singular at P".into()));
    }
    for mu in 1..=bound + 2 {
        let (g, e) = dilate(f, point, &vec![mu; n])?;
        if is_terminal_reduction(&g.reduce_mod_pi()?) {
            return Ok(MuResult { mu, f_out: g, e_out: e });
        }
    }
    Err(Error::InvariantViolation(format!("no terminal dilatation found up to L + 2 = {}", bound + 2)))
}

/// One node of a dilatation tree.
#[derive(Debug, Clone, PartialEq)]
pub struct DilatationNode {
    /// Lifted center, one JSON value per coordinate.
    pub center: Vec<Value>,
    pub scale: Vec<u32>,
    pub e: u32,
    pub e_accum: u32,
    pub depth: u32,
}

impl DilatationNode {
    pub fn to_json(&self) -> Value {
        json!({
            "center": self.center,
            "scale": self.scale,
            "e": self.e,
            "E": self.e_accum,
            "depth": self.depth,
        })
    }
}
