//! The stationary phase recursion.
//!
//! Over a residue region `D`,
//!
//! ```text
//! Z(f, D) = ν + σ (1 − p⁻¹) t / (1 − p⁻¹ t) + Σ_{P̄ singular} p^{-n} t^{e_P} Z(f_P, O^n)
//! ```
//!
//! where `f_P = π^{-e_P} f(P + π x)` for the lifted point `P`. Unrolling the
//! recursion yields a finite tree whenever `D` avoids the singular locus of
//! `f` over `O`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::coeff::{Lifting, LocalRing, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::neron::{classify_points, dilate, DilatationNode};
use crate::poly::MultiPoly;
use crate::ratfun::RatFun;
use crate::region::ResidueRegion;

/// Limits and switches for [`spf_zeta`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpfConfig {
    /// Deepest allowed dilatation; the root has depth 0.
    pub max_depth: u32,
    /// Cap on the residue points enumerated at any single node.
    pub budget: u64,
    /// Keep every node in the returned trace.
    pub trace: bool,
    /// Evaluate sibling subtrees on the rayon pool.
    pub parallel: bool,
}

impl Default for SpfConfig {
    fn default() -> Self {
        SpfConfig { max_depth: 64, budget: DEFAULT_BUDGET, trace: false, parallel: false }
    }
}

/// A node of the recursion tree with its local contribution.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceNode {
    pub node: DilatationNode,
    pub parent: Option<usize>,
    pub nu: BigRational,
    pub sigma: BigRational,
    pub singular: usize,
}

/// Aggregate shape of a recursion tree.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TreeStats {
    pub nodes: u64,
    pub max_depth: u32,
    pub max_e_accum: u32,
}

impl TreeStats {
    pub fn absorb(&mut self, other: &TreeStats) {
        self.nodes += other.nodes;
        self.max_depth = self.max_depth.max(other.max_depth);
        self.max_e_accum = self.max_e_accum.max(other.max_e_accum);
    }

    pub fn to_json(&self) -> Value {
        json!({"nodes": self.nodes, "max_depth": self.max_depth, "max_E": self.max_e_accum})
    }
}

/// The recursion tree. Nodes are stored in depth-first order; they are only
/// kept when tracing is enabled, statistics always are.
#[derive(Debug, Clone, PartialEq)]
pub struct SpfTrace {
    pub p: u64,
    pub n: usize,
    pub nodes: Vec<TraceNode>,
    pub stats: TreeStats,
}

impl SpfTrace {
    /// Rebuilds `Σ_nodes p^{-n·depth} t^{E} (ν + σ S)` from the stored nodes,
    /// where `S` is the smooth-zero series.
    pub fn expansion(&self) -> RatFun {
        let smooth = RatFun::smooth_zero_series(self.p);
        let mut acc = RatFun::zero(self.p);
        for tn in &self.nodes {
            let weight = BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(self.p), self.n * tn.node.depth as usize));
            let local = RatFun::constant(self.p, tn.nu.clone()).add(&smooth.scale(&tn.sigma, 0));
            acc = acc.add(&local.scale(&weight, tn.node.e_accum));
        }
        acc
    }

    pub fn to_json(&self) -> Value {
        let rat = |r: &BigRational| json!([r.numer().to_string(), r.denom().to_string()]);
        json!({
            "p": self.p,
            "n": self.n,
            "stats": self.stats.to_json(),
            "nodes": self.nodes.iter().map(|t| {
                let mut v = t.node.to_json();
                let obj = v.as_object_mut().expect("node JSON is an object");
                obj.insert("parent".into(), json!(t.parent));
                obj.insert("nu".into(), rat(&t.nu));
                obj.insert("sigma".into(), rat(&t.sigma));
                obj.insert("singular".into(), json!(t.singular));
                v
            }).collect::<Vec<_>>(),
        })
    }
}

struct Ctx<'a, R: LocalRing> {
    cfg: SpfConfig,
    lifting: &'a Lifting<R>,
    p: u64,
    n: usize,
}

struct Subtree {
    z: RatFun,
    nodes: Vec<TraceNode>,
    stats: TreeStats,
}

fn eval_node<R: LocalRing>(ctx: &Ctx<'_, R>, f: &MultiPoly<R>, region: &ResidueRegion, node: DilatationNode) -> Result<Subtree> {
    if node.depth > ctx.cfg.max_depth {
        return Err(Error::DepthExceeded(ctx.cfg.max_depth));
    }
    let class = classify_points(f, region, ctx.cfg.budget)?;
    let singular_measure = BigRational::new(BigInt::from(class.singular.len()), num_traits::pow(BigInt::from(ctx.p), ctx.n));
    if &class.nu + &class.sigma + singular_measure != region.measure() {
        return Err(Error::InvariantViolation("point classification does not partition the region".into()));
    }

    let mut z = RatFun::constant(ctx.p, class.nu.clone()).add(&RatFun::smooth_zero_series(ctx.p).scale(&class.sigma, 0));
    let ones = vec![1u32; ctx.n];
    let child = |pt: &Vec<u64>| -> Result<(u32, Subtree)> {
        let center = ctx.lifting.lift_point(pt);
        let (fp, e) = dilate(f, &center, &ones)?;
        let ring = f.ring();
        let child_node = DilatationNode {
            center: center.iter().map(|c| ring.to_json(c)).collect(),
            scale: ones.clone(),
            e,
            e_accum: node.e_accum + e,
            depth: node.depth + 1,
        };
        let full = ResidueRegion::full(ctx.p, ctx.n);
        Ok((e, eval_node(ctx, &fp, &full, child_node)?))
    };
    let children: Vec<Result<(u32, Subtree)>> = if ctx.cfg.parallel && class.singular.len() > 1 {
        class.singular.par_iter().map(child).collect()
    } else {
        // Stop at the first error so a runaway branch is not followed by its siblings.
        let mut out = Vec::with_capacity(class.singular.len());
        for pt in &class.singular {
            let r = child(pt);
            let failed = r.is_err();
            out.push(r);
            if failed {
                break;
            }
        }
        out
    };

    let weight = BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(ctx.p), ctx.n));
    let mut stats = TreeStats { nodes: 1, max_depth: node.depth, max_e_accum: node.e_accum };
    let mut nodes = Vec::new();
    if ctx.cfg.trace {
        nodes.push(TraceNode { node, parent: None, nu: class.nu, sigma: class.sigma, singular: class.singular.len() });
    }
    for c in children {
        let (e, sub) = c?;
        z = z.add(&sub.z.scale(&weight, e));
        stats.absorb(&sub.stats);
        let offset = nodes.len();
        for mut tn in sub.nodes {
            tn.parent = Some(tn.parent.map_or(0, |p| p + offset));
            nodes.push(tn);
        }
    }
    Ok(Subtree { z, nodes, stats })
}

/// `∫_D |f|^s` with the canonical lifting of residues.
pub fn spf_zeta<R: LocalRing>(f: &MultiPoly<R>, region: &ResidueRegion, cfg: &SpfConfig) -> Result<(RatFun, SpfTrace)> {
    spf_zeta_with_lifting(f, region, cfg, &Lifting::canonical(f.ring()))
}

/// `∫_D |f|^s`, lifting singular residue points through `lifting`.
pub fn spf_zeta_with_lifting<R: LocalRing>(
    f: &MultiPoly<R>,
    region: &ResidueRegion,
    cfg: &SpfConfig,
    lifting: &Lifting<R>,
) -> Result<(RatFun, SpfTrace)> {
    if cfg.max_depth == 0 {
        return Err(Error::InvalidParameters("max_depth must be at least 1".into()));
    }
    let p = f.ring().prime();
    let n = f.nvars();
    if region.prime() != p || region.nvars() != n {
        return Err(Error::InvalidParameters("region does not match the polynomial".into()));
    }
    let (e0, g) = f.normalize()?;
    let ctx = Ctx { cfg: *cfg, lifting, p, n };
    let root = DilatationNode { center: Vec::new(), scale: Vec::new(), e: e0, e_accum: e0, depth: 0 };
    let sub = eval_node(&ctx, &g, region, root)?;
    let z = sub.z.scale(&BigRational::one(), e0);
    Ok((z, SpfTrace { p, n, nodes: sub.nodes, stats: sub.stats }))
}

/// Measures of `{x ∈ D : v(f(x)) = j}` for `j < levels`, from exhaustive
/// congruence counts.
pub fn level_measures<R: LocalRing>(
    f: &MultiPoly<R>,
    region: &ResidueRegion,
    levels: usize,
    budget: u64,
) -> Result<Vec<BigRational>> {
    let counts = crate::analysis::oracle_counts_region(f, region, levels, budget)?;
    Ok(measures_from_counts(&counts.counts, &region.measure(), f.ring().prime(), f.nvars()))
}

/// `μ_j = N_j p^{-nj} − N_{j+1} p^{-n(j+1)}` for `j < counts.len() − 1`,
/// with the region's measure in place of `N_0`.
pub fn measures_from_counts(counts: &[u64], region_measure: &BigRational, p: u64, n: usize) -> Vec<BigRational> {
    let p = BigInt::from(p);
    let cumulative: Vec<BigRational> =
        counts
            .iter()
            .enumerate()
            .map(|(j, &c)| {
                if j == 0 {
                    region_measure.clone()
                } else {
                    BigRational::new(BigInt::from(c), num_traits::pow(p.clone(), n * j))
                }
            })
            .collect();
    cumulative.windows(2).map(|w| &w[0] - &w[1]).collect()
}

/// True iff the first `levels` Taylor coefficients of `z` equal the measures
/// of `{x ∈ D : v(f(x)) = j}`.
pub fn series_check<R: LocalRing>(
    f: &MultiPoly<R>,
    region: &ResidueRegion,
    z: &RatFun,
    levels: usize,
    budget: u64,
) -> Result<bool> {
    if levels == 0 {
        return Ok(true);
    }
    let expected = level_measures(f, region, levels, budget)?;
    Ok(z.series_expand(levels - 1) == expected)
}

/// Convenience: `Z` as a constant when it is one.
pub fn constant_value(z: &RatFun) -> Option<BigRational> {
    match (z.numerator(), z.denominator()) {
        ([], []) => Some(BigRational::zero()),
        ([c], []) => Some(c.clone()),
        _ => None,
    }
}
