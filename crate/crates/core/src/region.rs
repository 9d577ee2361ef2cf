//! Integration domains.
//!
//! A [`ResidueRegion`] is the preimage in `O^n` of a set of residue points.
//! Polydiscs `A_r = {v(x_i) ≥ r_i}` and their complements are handled through
//! [`ValuationCell`]s, sets of the form `{v(x_i) = a_i for i ∈ B}`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::coeff::{check_budget, LocalRing, PointIter};
use crate::error::{Error, Result};
use crate::poly::MultiPoly;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Shape {
    /// Allowed residues per coordinate, each sorted and deduplicated.
    Product(Vec<Vec<u64>>),
    Explicit(BTreeSet<Vec<u64>>),
}

/// Preimage of a subset of `F_p^n` under reduction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ResidueRegion {
    p: u64,
    n: usize,
    shape: Shape,
}

impl ResidueRegion {
    /// All of `O^n`.
    pub fn full(p: u64, n: usize) -> Self {
        ResidueRegion { p, n, shape: Shape::Product(vec![(0..p).collect(); n]) }
    }

    /// Units on the coordinates in `units` (0-based), anything elsewhere.
    pub fn units_on(p: u64, n: usize, units: &[usize]) -> Self {
        let allowed = (0..n).map(|i| if units.contains(&i) { (1..p).collect() } else { (0..p).collect() }).collect();
        ResidueRegion { p, n, shape: Shape::Product(allowed) }
    }

    /// Product of per-coordinate residue sets.
    pub fn product(p: u64, allowed: Vec<Vec<u64>>) -> Result<Self> {
        let n = allowed.len();
        let mut clean = Vec::with_capacity(n);
        for set in allowed {
            if let Some(&bad) = set.iter().find(|&&a| a >= p) {
                return Err(Error::InvalidParameters(format!("residue {bad} is not reduced modulo {p}")));
            }
            let s: BTreeSet<u64> = set.into_iter().collect();
            clean.push(s.into_iter().collect());
        }
        Ok(ResidueRegion { p, n, shape: Shape::Product(clean) })
    }

    /// An explicit list of residue points; may be empty.
    pub fn explicit<I: IntoIterator<Item = Vec<u64>>>(p: u64, n: usize, points: I) -> Result<Self> {
        let mut set = BTreeSet::new();
        for pt in points {
            if pt.len() != n || pt.iter().any(|&a| a >= p) {
                return Err(Error::InvalidParameters(format!("{pt:?} is not a point of F_{p}^{n}")));
            }
            set.insert(pt);
        }
        Ok(ResidueRegion { p, n, shape: Shape::Explicit(set) })
    }

    /// `F_p^n` with the origin removed, i.e. the complement of `A_(1,…,1)`.
    pub fn punctured(p: u64, n: usize, cap: u64) -> Result<Self> {
        check_budget(p, n, cap)?;
        Self::explicit(p, n, PointIter::new(p, n).filter(|pt| pt.iter().any(|&a| a != 0)))
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn is_full(&self) -> bool {
        match &self.shape {
            Shape::Product(a) => a.iter().all(|s| s.len() as u64 == self.p),
            Shape::Explicit(_) => false,
        }
    }

    pub fn is_empty(&self) -> bool {
        match &self.shape {
            Shape::Product(a) => a.iter().any(Vec::is_empty),
            Shape::Explicit(s) => s.is_empty(),
        }
    }

    pub fn contains(&self, point: &[u64]) -> bool {
        match &self.shape {
            Shape::Product(a) => point.iter().zip(a).all(|(x, s)| s.binary_search(x).is_ok()),
            Shape::Explicit(s) => s.contains(point),
        }
    }

    /// Number of residue points.
    pub fn size(&self) -> BigInt {
        match &self.shape {
            Shape::Product(a) => a.iter().map(|s| BigInt::from(s.len())).product(),
            Shape::Explicit(s) => BigInt::from(s.len()),
        }
    }

    /// Residue points in lexicographic order.
    pub fn points(&self, cap: u64) -> Result<Vec<Vec<u64>>> {
        let size = self.size();
        if size > BigInt::from(cap) {
            return Err(Error::BudgetExceeded { requested: size.to_string(), cap });
        }
        Ok(match &self.shape {
            Shape::Explicit(s) => s.iter().cloned().collect(),
            Shape::Product(a) => {
                let mut out = vec![Vec::with_capacity(self.n)];
                for set in a {
                    out = out
                        .into_iter()
                        .flat_map(|prefix| {
                            set.iter().map(move |&x| {
                                let mut v = prefix.clone();
                                v.push(x);
                                v
                            })
                        })
                        .collect();
                }
                out
            }
        })
    }

    /// Haar measure `|D̄| · p^{-n}`.
    pub fn measure(&self) -> BigRational {
        BigRational::new(self.size(), num_traits::pow(BigInt::from(self.p), self.n))
    }
}

/// `A_r = {x : v(x_i) ≥ r_i}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polydisc {
    r: Vec<u32>,
}

impl Polydisc {
    pub fn new(r: Vec<u32>) -> Result<Self> {
        if r.is_empty() || r.contains(&0) {
            return Err(Error::InvalidParameters("polydisc radii must be positive".into()));
        }
        Ok(Polydisc { r })
    }

    pub fn radii(&self) -> &[u32] {
        &self.r
    }

    /// `p^{-Σ r_i}`.
    pub fn measure(&self, p: u64) -> BigRational {
        let s: u32 = self.r.iter().sum();
        BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(p), s as usize))
    }
}

/// `D(B, a) = {x : v(x_i) = a_i for i ∈ B}`; coordinate `i` is in `B` iff
/// `constraints[i]` is set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ValuationCell {
    constraints: Vec<Option<u32>>,
}

impl ValuationCell {
    pub fn new(constraints: Vec<Option<u32>>) -> Self {
        ValuationCell { constraints }
    }

    pub fn constraints(&self) -> &[Option<u32>] {
        &self.constraints
    }

    /// The constrained coordinates `B`, 0-based.
    pub fn support(&self) -> Vec<usize> {
        self.constraints.iter().enumerate().filter_map(|(i, c)| c.map(|_| i)).collect()
    }

    /// Intersection; `None` when two constraints on one coordinate disagree.
    pub fn intersect(&self, other: &Self) -> Option<Self> {
        assert_eq!(self.constraints.len(), other.constraints.len());
        let mut out = Vec::with_capacity(self.constraints.len());
        for (a, b) in self.constraints.iter().zip(&other.constraints) {
            out.push(match (a, b) {
                (Some(x), Some(y)) if x != y => return None,
                (Some(x), _) | (_, Some(x)) => Some(*x),
                (None, None) => None,
            });
        }
        Some(ValuationCell { constraints: out })
    }

    /// `Π_{i∈B} (1 − p^{-1}) p^{-a_i}`.
    pub fn measure(&self, p: u64) -> BigRational {
        let pb = BigInt::from(p);
        self.constraints
            .iter()
            .flatten()
            .map(|&a| BigRational::new(&pb - 1u32, num_traits::pow(pb.clone(), a as usize + 1)))
            .fold(BigRational::one(), |x, y| x * y)
    }
}

/// Signed cells whose signed indicators sum to the indicator of `A_r^c`.
///
/// Expanding `1 − Π_i (1 − Σ_{a<r_i} 1[v(x_i)=a])` gives one cell per nonempty
/// `B` and choice of `a_i < r_i` on `B`, with sign `(−1)^{|B|−1}`.
pub fn complement_cells(a: &Polydisc) -> Vec<(i32, ValuationCell)> {
    let n = a.r.len();
    let mut out = Vec::new();
    for mask in 1u64..(1 << n) {
        let support: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let sign = if support.len() % 2 == 1 { 1 } else { -1 };
        let mut choice = vec![0u32; support.len()];
        loop {
            let mut c = vec![None; n];
            for (k, &i) in support.iter().enumerate() {
                c[i] = Some(choice[k]);
            }
            out.push((sign, ValuationCell { constraints: c }));
            // Odometer over a_i < r_i.
            let mut k = 0;
            while k < support.len() {
                choice[k] += 1;
                if choice[k] < a.r[support[k]] {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
            if k == support.len() {
                break;
            }
        }
    }
    out
}

/// Net signed multiplicity per cell; zero entries removed.
pub fn collect_signed(cells: impl IntoIterator<Item = (i32, ValuationCell)>) -> BTreeMap<ValuationCell, i64> {
    let mut acc: BTreeMap<ValuationCell, i64> = BTreeMap::new();
    for (s, c) in cells {
        *acc.entry(c).or_insert(0) += s as i64;
    }
    acc.retain(|_, v| *v != 0);
    acc
}

/// Result of substituting `x_i = π^{a_i} y_i` on a cell.
#[derive(Debug, Clone)]
pub struct CellSubstitution<R: LocalRing> {
    /// Content extracted after substitution.
    pub e: u32,
    /// `Σ_{i∈B} a_i`, the Jacobian exponent.
    pub d_shift: u32,
    pub f_b: MultiPoly<R>,
    /// Units on `B`, everything elsewhere.
    pub target: ResidueRegion,
}

/// `∫_{D(B,a)} |f|^s = p^{-d_shift} t^e ∫_{target} |f_B|^s`.
pub fn cell_change_of_variables<R: LocalRing>(f: &MultiPoly<R>, cell: &ValuationCell) -> Result<CellSubstitution<R>> {
    let ring = f.ring();
    let n = f.nvars();
    assert_eq!(cell.constraints.len(), n, "cell dimension mismatch");
    if cell.support().is_empty() {
        return Err(Error::InvalidParameters("a cell with empty support is the empty set".into()));
    }
    let scale: Vec<u32> = cell.constraints.iter().map(|c| c.unwrap_or(0)).collect();
    let substituted = f.substitute_affine(&vec![ring.zero(); n], &scale);
    let (e, f_b) = substituted.normalize()?;
    Ok(CellSubstitution {
        e,
        d_shift: scale.iter().sum(),
        f_b,
        target: ResidueRegion::units_on(ring.prime(), n, &cell.support()),
    })
}

impl std::fmt::Display for ResidueRegion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.shape {
            Shape::Product(a) => {
                let parts: Vec<String> = a
                    .iter()
                    .map(|s| {
                        if s.len() as u64 == self.p {
                            "all".to_string()
                        } else if s.len() as u64 + 1 == self.p && !s.contains(&0) {
                            "units".to_string()
                        } else {
                            format!("{s:?}")
                        }
                    })
                    .collect();
                write!(f, "{}", parts.join(" x "))
            }
            Shape::Explicit(s) => write!(f, "{} explicit points", s.len()),
        }
    }
}
