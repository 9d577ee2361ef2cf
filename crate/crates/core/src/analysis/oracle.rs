//! Exhaustive congruence counts.
//!
//! `N_j = #{x ∈ (O/π^j)^n : f(x) ≡ 0 mod π^j}` is computed level by level:
//! every solution modulo `π^k` is extended by all digit vectors `d ∈ F_p^n`
//! to `x + π^k d`, and kept when `f` vanishes modulo `π^{k+1}`. This visits
//! exactly the classes that can still be solutions, so the count is exact
//! while the work is `Σ_k N_k · p^n` evaluations rather than `p^{nj}`.

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::coeff::{check_budget, LocalRing, PointIter};
use crate::error::{Error, Result};
use crate::poly::MultiPoly;
use crate::region::ResidueRegion;

/// `N_0, …, N_J`; `N_0 = 1` counts the single class modulo `π^0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub p: u64,
    pub nvars: usize,
    pub counts: Vec<u64>,
}

impl OracleResult {
    pub fn to_json(&self) -> Value {
        json!({"p": self.p, "n": self.nvars, "N": self.counts})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = || Error::InvalidParameters("malformed oracle JSON".into());
        let p = v.get("p").and_then(Value::as_u64).ok_or_else(bad)?;
        let nvars = v.get("n").and_then(Value::as_u64).ok_or_else(bad)? as usize;
        let counts = v
            .get("N")
            .and_then(Value::as_array)
            .ok_or_else(bad)?
            .iter()
            .map(|c| c.as_u64().ok_or_else(bad))
            .collect::<Result<_>>()?;
        Ok(OracleResult { p, nvars, counts })
    }
}

/// Arithmetic in `O/π^J`.
trait Truncated: Sync {
    type E: Clone + Send + Sync;
    fn zero(&self) -> Self::E;
    /// `x + d π^k`.
    fn shift(&self, x: &Self::E, d: u64, k: usize) -> Self::E;
    /// True iff `f(x) ≡ 0 mod π^level`.
    fn vanishes(&self, x: &[Self::E], level: usize) -> bool;
}

/// `Z/p^J` with `p^J < 2^63`, so products of reduced values fit in `u128`.
struct IntegerMod {
    powers: Vec<u128>,
    terms: Vec<(u128, Vec<u32>)>,
}

impl Truncated for IntegerMod {
    type E = u128;

    fn zero(&self) -> u128 {
        0
    }

    fn shift(&self, x: &u128, d: u64, k: usize) -> u128 {
        x + d as u128 * self.powers[k]
    }

    fn vanishes(&self, x: &[u128], level: usize) -> bool {
        let m = self.powers[level];
        let mut acc = 0u128;
        for (c, exps) in &self.terms {
            let mut t = c % m;
            for (xi, &e) in x.iter().zip(exps) {
                for _ in 0..e {
                    t = t * (xi % m) % m;
                }
            }
            acc = (acc + t) % m;
        }
        acc == 0
    }
}

/// `F_p[π]/π^J`, elements as digit vectors of length `J`.
struct SeriesMod {
    p: u64,
    len: usize,
    terms: Vec<(Vec<u64>, Vec<u32>)>,
}

impl SeriesMod {
    fn mul(&self, a: &[u64], b: &[u64], level: usize) -> Vec<u64> {
        let mut out = vec![0u64; self.len];
        for (i, &x) in a.iter().enumerate().take(level) {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate().take(level - i) {
                out[i + j] = (out[i + j] + x * y) % self.p;
            }
        }
        out
    }
}

impl Truncated for SeriesMod {
    type E = Vec<u64>;

    fn zero(&self) -> Vec<u64> {
        vec![0; self.len]
    }

    fn shift(&self, x: &Vec<u64>, d: u64, k: usize) -> Vec<u64> {
        let mut y = x.clone();
        y[k] = (y[k] + d) % self.p;
        y
    }

    fn vanishes(&self, x: &[Vec<u64>], level: usize) -> bool {
        let mut acc = vec![0u64; self.len];
        for (c, exps) in &self.terms {
            let mut t = c.clone();
            for (xi, &e) in x.iter().zip(exps) {
                for _ in 0..e {
                    t = self.mul(&t, xi, level);
                }
            }
            for k in 0..level {
                acc[k] = (acc[k] + t[k]) % self.p;
            }
        }
        acc[..level].iter().all(|&a| a == 0)
    }
}

fn lift_levels<A: Truncated>(a: &A, p: u64, n: usize, region: &ResidueRegion, levels: usize, budget: u64) -> Result<Vec<u64>> {
    let per_class = check_budget(p, n, budget)?;
    let digits: Vec<Vec<u64>> = PointIter::new(p, n).collect();
    let first: Vec<&Vec<u64>> = digits.iter().filter(|d| region.contains(d)).collect();
    let mut counts = vec![1u64];
    let mut current: Vec<Vec<A::E>> = vec![vec![a.zero(); n]];
    let mut spent: u64 = 0;
    for k in 0..levels {
        let cost = (current.len() as u64).saturating_mul(per_class);
        spent = spent.saturating_add(cost);
        if spent > budget {
            return Err(Error::BudgetExceeded { requested: format!("{spent} evaluations"), cap: budget });
        }
        let all: Vec<&Vec<u64>> = if k == 0 { first.clone() } else { digits.iter().collect() };
        let extend =
            |x: &Vec<A::E>, d: &Vec<u64>| -> Vec<A::E> { x.iter().zip(d.iter()).map(|(xi, &di)| a.shift(xi, di, k)).collect() };
        if k + 1 == levels {
            let total: u64 =
                current.par_iter().map(|x| all.iter().filter(|d| a.vanishes(&extend(x, d), k + 1)).count() as u64).sum();
            counts.push(total);
        } else {
            current = current
                .par_iter()
                .flat_map_iter(|x| all.iter().map(move |d| extend(x, d)).filter(|y| a.vanishes(y, k + 1)))
                .collect();
            counts.push(current.len() as u64);
        }
    }
    Ok(counts)
}

/// `N_0, …, N_levels` for `x` restricted to the preimage of `region`.
pub fn oracle_counts_region<R: LocalRing>(
    f: &MultiPoly<R>,
    region: &ResidueRegion,
    levels: usize,
    budget: u64,
) -> Result<OracleResult> {
    let ring = f.ring();
    let p = ring.prime();
    let n = f.nvars();
    assert_eq!(region.nvars(), n, "region dimension mismatch");
    let counts = if ring.characteristic() == 0 {
        let mut powers = vec![1u128];
        for _ in 0..levels {
            let next = powers.last().unwrap().checked_mul(p as u128).filter(|&m| m < 1u128 << 63);
            match next {
                Some(m) => powers.push(m),
                None => return Err(Error::BudgetExceeded { requested: format!("{p}^{levels} as a modulus"), cap: 1 << 63 }),
            }
        }
        let terms = f
            .terms()
            .map(|(m, c)| {
                let value = ring.digits(c, levels).iter().rev().fold(0u128, |acc, &d| acc * p as u128 + d as u128);
                (value, m.exponents().to_vec())
            })
            .collect();
        lift_levels(&IntegerMod { powers, terms }, p, n, region, levels, budget)?
    } else {
        let len = levels.max(1);
        let terms = f.terms().map(|(m, c)| (ring.digits(c, len), m.exponents().to_vec())).collect();
        lift_levels(&SeriesMod { p, len, terms }, p, n, region, levels, budget)?
    };
    Ok(OracleResult { p, nvars: n, counts })
}

/// `N_0, …, N_levels` over all of `O^n`.
pub fn oracle_counts<R: LocalRing>(f: &MultiPoly<R>, levels: usize, budget: u64) -> Result<OracleResult> {
    oracle_counts_region(f, &ResidueRegion::full(f.ring().prime(), f.nvars()), levels, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{FpSeriesRing, PadicRing, DEFAULT_BUDGET};
    use crate::poly::parse;

    /// Plain enumeration of `(Z/p^j)^2`.
    fn naive_two_vars(p: u64, j: u32, f: impl Fn(u64, u64, u64) -> u64) -> u64 {
        let m = p.pow(j);
        (0..m).map(|x| (0..m).filter(|&y| f(x, y, m) == 0).count() as u64).sum()
    }

    #[test]
    fn counts_examples() {
        let r = PadicRing::new(5).unwrap();
        let f = parse("x^2 + y^3", None, &r).unwrap();
        assert_eq!(oracle_counts(&f, 1, 1000).unwrap().counts, vec![1, 5]);
        for p in [2u64, 3, 7] {
            let r = PadicRing::new(p).unwrap();
            let x = parse("x", None, &r).unwrap();
            assert_eq!(oracle_counts(&x, 5, DEFAULT_BUDGET).unwrap().counts, vec![1; 6]);
            let one = parse("1 + 0*x", None, &r).unwrap();
            assert_eq!(oracle_counts(&one, 4, DEFAULT_BUDGET).unwrap().counts, vec![1, 0, 0, 0, 0]);
        }
    }

    #[test]
    fn lifting_enumeration_matches_naive() {
        for p in [2u64, 3, 5] {
            let r = PadicRing::new(p).unwrap();
            let f = parse("x^2 + y^3 + x*y^2", None, &r).unwrap();
            let counts = oracle_counts(&f, 3, DEFAULT_BUDGET).unwrap().counts;
            for j in 1..=3u32 {
                let naive = naive_two_vars(p, j, |x, y, m| (x * x % m + y * y % m * y + x * y % m * y) % m);
                assert_eq!(counts[j as usize], naive, "p={p} j={j}");
            }
        }
        let r = PadicRing::new(3).unwrap();
        let g = parse("x^2 - 7*y^3 + 9", None, &r).unwrap();
        let counts = oracle_counts(&g, 4, DEFAULT_BUDGET).unwrap().counts;
        for j in 1..=4u32 {
            let naive = naive_two_vars(3, j, |x, y, m| (x * x % m + m * 8 - 7 * (y * y % m * y % m) + 9) % m);
            assert_eq!(counts[j as usize], naive);
        }
    }

    #[test]
    fn characteristic_p_matches_naive_digit_arithmetic() {
        // x^2 + y^3 + u*x over F_3[u]/u^2: enumerate all (a0 + a1 u, b0 + b1 u).
        let s = FpSeriesRing::new(3).unwrap();
        let f = parse("x^2 + y^3 + u*x", None, &s).unwrap();
        let counts = oracle_counts(&f, 2, DEFAULT_BUDGET).unwrap().counts;
        let mut naive = 0;
        for a in 0..9u64 {
            for b in 0..9u64 {
                let (a0, a1, b0, b1) = (a % 3, a / 3, b % 3, b / 3);
                let c0 = (a0 * a0 + b0 * b0 * b0) % 3;
                let c1 = (2 * a0 * a1 + 3 * b0 * b0 * b1 + a0) % 3;
                if c0 == 0 && c1 == 0 {
                    naive += 1;
                }
            }
        }
        assert_eq!(counts[2], naive);
    }

    #[test]
    fn region_restricts_first_digit() {
        let r = PadicRing::new(3).unwrap();
        let f = parse("x^2 + y^3", None, &r).unwrap();
        let units = ResidueRegion::units_on(3, 2, &[0, 1]);
        let counts = oracle_counts_region(&f, &units, 3, DEFAULT_BUDGET).unwrap().counts;
        for j in 1..=3u32 {
            let naive = naive_two_vars(3, j, |x, y, m| if x % 3 == 0 || y % 3 == 0 { 1 } else { (x * x + y * y % m * y) % m });
            assert_eq!(counts[j as usize], naive);
        }
    }

    #[test]
    fn budget_and_json() {
        let r = PadicRing::new(7).unwrap();
        let f = parse("x^2 + y^2 + z^2", None, &r).unwrap();
        assert!(matches!(oracle_counts(&f, 5, 1_000_000), Err(Error::BudgetExceeded { .. })));
        assert!(matches!(oracle_counts(&f, 1, 100), Err(Error::BudgetExceeded { .. })));
        let res = oracle_counts(&f, 2, DEFAULT_BUDGET).unwrap();
        let back = OracleResult::from_json(&serde_json::from_str(&res.to_json().to_string()).unwrap()).unwrap();
        assert_eq!(back, res);
    }
}
