//! Acceptance suite. Every comparison is exact; each criterion prints one
//! PASS or FAIL line and the process exits nonzero if any fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use igusa_zeta::analysis::{binomial_closed_form, oracle_counts, poincare_from_zeta};
use igusa_zeta::coeff::{checked_power, FpSeriesRing, Lifting, LocalRing, PadicRing, Valuation, DEFAULT_BUDGET};
use igusa_zeta::neron::{classify_points, dilate, is_terminal_reduction, mu_procedure, L_measure};
use igusa_zeta::poly::{parse, MultiPoly};
use igusa_zeta::ratfun::{DenomFactor, RatFun};
use igusa_zeta::region::ResidueRegion;
use igusa_zeta::spf::{series_check, SpfConfig};
use igusa_zeta::sqh::{
    detect_weights, g_valuation, scale_step, zeta_on_complement, zeta_semiquasihomogeneous, SqhConfig, WeightSystem,
};
use igusa_zeta::Error;

type Outcome = Result<String, String>;

/// Name, check and optional wall-clock limit.
type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

const PRIMES: [u64; 3] = [3, 5, 7];

fn corpus(p: u64) -> Vec<String> {
    vec![
        "x".into(),
        "x^2 + y^3".into(),
        "x^2 + y^3 + x*y^2".into(),
        "x^2 + y^2 + z^2".into(),
        "x^3 + y^4".into(),
        format!("x^2 + {p}*y^3"),
    ]
}

fn zeta<R: LocalRing>(f: &MultiPoly<R>) -> Result<(RatFun, igusa_zeta::sqh::SqhReport), String> {
    zeta_semiquasihomogeneous(f, None, &SqhConfig::default()).map_err(|e| format!("{}: {e}", f.render()))
}

/// `β ∈ {1, π, π²}` in characteristic zero is `1, p, p²`.
fn criterion_1() -> Outcome {
    let mut cases = 0;
    for (n, m) in [(2u32, 3u32), (3, 4), (2, 5)] {
        for p in [5u64, 7, 11] {
            if ((n * m) as u64).is_multiple_of(p) {
                continue;
            }
            let r = PadicRing::new(p).unwrap();
            for vb in 0..3 {
                let beta = num_traits::pow(BigInt::from(p), vb);
                let f = parse(&format!("x^{n} + {beta}*y^{m}"), None, &r).unwrap();
                let (engine, _) = zeta(&f)?;
                let closed = binomial_closed_form(&r, n, m, &BigInt::one(), &beta).map_err(|e| e.to_string())?;
                if engine != closed {
                    return Err(format!("{} at p={p}: engine {engine} vs closed form {closed}", f.render()));
                }
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} cases equal as canonical rational functions"))
}

/// `J = 5` when `p^{5n} ≤ 10^8`, else 4.
fn depth_for(p: u64, n: usize) -> usize {
    match checked_power(p, 5 * n) {
        Some(v) if v <= 100_000_000 => 5,
        _ => 4,
    }
}

fn counts_and_series<R: LocalRing>(f: &MultiPoly<R>, z: &RatFun, levels: usize) -> Result<(), String> {
    let p = f.ring().prime();
    let n = f.nvars();
    let region = ResidueRegion::full(p, n);
    let ok = series_check(f, &region, z, levels, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    if !ok {
        return Err(format!("series_check failed for {} at p={p}", f.render()));
    }
    let from_series = poincare_from_zeta(z, n).and_then(|ps| ps.counts(levels)).map_err(|e| e.to_string())?;
    let brute = oracle_counts(f, levels, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    let brute: Vec<BigInt> = brute.counts.iter().map(|&c| BigInt::from(c)).collect();
    if from_series != brute {
        return Err(format!("{} at p={p}: P(t) gives {from_series:?}, brute force {brute:?}", f.render()));
    }
    Ok(())
}

fn criterion_2() -> Outcome {
    let mut cases = 0;
    let mut coefficients = 0;
    for p in PRIMES {
        let r = PadicRing::new(p).unwrap();
        for text in corpus(p) {
            let f = parse(&text, None, &r).unwrap();
            let (z, _) = zeta(&f)?;
            let levels = depth_for(p, f.nvars());
            counts_and_series(&f, &z, levels)?;
            cases += 1;
            coefficients += levels;
        }
    }
    Ok(format!("{cases} cases, {coefficients} counts N_j (j ≥ 1) matched"))
}

fn criterion_3() -> Outcome {
    let mut slowest = Duration::ZERO;
    let mut cases = 0;
    for p in PRIMES {
        let r = PadicRing::new(p).unwrap();
        for text in corpus(p) {
            let f = parse(&text, None, &r).unwrap();
            let start = Instant::now();
            let (z, report) = zeta(&f)?;
            slowest = slowest.max(start.elapsed());
            let w = &report.weights;
            if !z.denominator_divides(&[DenomFactor::new(1, 1), w.factor()]) {
                return Err(format!(
                    "{text} at p={p}: denominator of {z} does not divide (1 - t/p)(1 - p^-{} t^{})",
                    w.total(),
                    w.d
                ));
            }
            let allowed: BTreeSet<BigRational> =
                [BigRational::from_integer((-1).into()), BigRational::new(-BigInt::from(w.total()), BigInt::from(w.d))].into();
            let reported: BTreeSet<BigRational> = report.pole_real_parts.iter().cloned().collect();
            if !reported.is_subset(&allowed) || reported != z.pole_real_parts() {
                return Err(format!("{text} at p={p}: pole real parts {reported:?} not within {allowed:?}"));
            }
            cases += 1;
        }
    }
    if slowest >= Duration::from_secs(5) {
        return Err(format!("slowest case took {slowest:?}"));
    }
    Ok(format!("{cases} cases; slowest {:.2?}", slowest))
}

fn criterion_4() -> Outcome {
    let mut cases = 0;
    for p in PRIMES {
        let r = PadicRing::new(p).unwrap();
        for text in corpus(p) {
            let f = parse(&text, None, &r).unwrap();
            let dec = detect_weights(&f, None).map_err(|e| e.to_string())?;
            if !dec.g.is_zero() {
                continue;
            }
            let (z, report) = zeta(&f)?;
            let complement = zeta_on_complement(&f, &report.weights, &SpfConfig::default()).map_err(|e| e.to_string())?;
            let w = &report.weights;
            let mut factor = vec![BigRational::from_integer(0.into()); w.d as usize + 1];
            factor[0] = BigRational::one();
            factor[w.d as usize] = -BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(p), w.total() as usize));
            let lhs = z.mul(&RatFun::polynomial(p, factor));
            if lhs != complement.value || report.k0 != 0 {
                return Err(format!(
                    "{text} at p={p}: Z·(1 - p^-|α| t^d) = {lhs}, complement {}, k0 = {}",
                    complement.value, report.k0
                ));
            }
            cases += 1;
        }
    }
    Ok(format!("{cases} quasihomogeneous cases with k0 = 0"))
}

fn criterion_5() -> Outcome {
    let s = FpSeriesRing::new(5).unwrap();
    let f = parse("x^2 + y^3", None, &s).unwrap();
    let (z, report) = zeta(&f)?;
    counts_and_series(&f, &z, 4)?;
    Ok(format!("Z = {z}, weights {}, k0 = {}", report.weights, report.k0))
}

/// Walks the dilatation tree to `depth`, checking the structural identities
/// at every node. Returns the number of nodes checked.
fn structural_walk<R: LocalRing>(f: &MultiPoly<R>, depth: u32) -> Result<usize, String> {
    let ring = f.ring();
    let p = ring.prime();
    let n = f.nvars();
    let region = ResidueRegion::full(p, n);
    let cls = classify_points(f, &region, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    let singular = BigRational::new(BigInt::from(cls.singular.len()), num_traits::pow(BigInt::from(p), n));
    if &cls.nu + &cls.sigma + singular != region.measure() {
        return Err(format!("{}: ν + σ + singular·p^-n ≠ 1", f.render()));
    }
    let lifting = Lifting::canonical(ring);
    let mut nodes = 1;
    for point in &cls.singular {
        let center = lifting.lift_point(point);
        let ones = vec![1; n];
        let (child, e) = dilate(f, &center, &ones).map_err(|e| e.to_string())?;
        if f.substitute_affine(&center, &ones) != child.scale(&ring.uniformizer_pow(e)) {
            return Err(format!("{}: dilatation identity fails at {point:?}", f.render()));
        }
        if let Valuation::Finite(l) = L_measure(f, &center) {
            let m = mu_procedure(f, &center).map_err(|e| e.to_string())?;
            let terminal = is_terminal_reduction(&m.f_out.reduce_mod_pi().map_err(|e| e.to_string())?);
            let identity = m.f_out.scale(&ring.uniformizer_pow(m.e_out)) == f.substitute_affine(&center, &vec![m.mu; n]);
            if m.mu > l + 2 || !terminal || !identity {
                return Err(format!("{}: μ-procedure postcondition fails at {point:?} (μ = {}, L = {l})", f.render(), m.mu));
            }
        }
        if depth > 0 {
            nodes += structural_walk(&child, depth - 1)?;
        }
    }
    Ok(nodes)
}

fn strictly_increasing<R: LocalRing>(f: &MultiPoly<R>, w: &WeightSystem, steps: u32) -> Result<(), String> {
    let mut current = f.clone();
    let mut prev = g_valuation(&current, w);
    for _ in 0..steps {
        current = scale_step(&current, w).map_err(|e| e.to_string())?;
        let m = g_valuation(&current, w);
        if !(m > prev || m == Valuation::Infinite) {
            return Err(format!("{}: m_k went from {prev} to {m}", f.render()));
        }
        prev = m;
    }
    Ok(())
}

fn criterion_6() -> Outcome {
    let mut nodes = 0;
    let mut series = 0;
    for p in PRIMES {
        let r = PadicRing::new(p).unwrap();
        let mut inputs = corpus(p);
        inputs.extend([
            "x^2 + y^3 + 9".to_string(),
            format!("x^2 + y^3 + x^2*y^2 + {p}*x*y^2"),
            "x^3 + y^4 + x^2*y^2".to_string(),
        ]);
        for text in &inputs {
            let f = parse(text, None, &r).unwrap();
            nodes += structural_walk(&f, 3)?;
            if let Ok(dec) = detect_weights(&f, None) {
                strictly_increasing(&f, &dec.weights, 6)?;
                let (z, _) = zeta(&f)?;
                poincare_from_zeta(&z, f.nvars()).and_then(|ps| ps.counts(12)).map_err(|e| format!("{text}: {e}"))?;
                series += 1;
            }
        }
    }
    let s = FpSeriesRing::new(5).unwrap();
    for text in ["x^2 + y^3", "x^2 + y^3 + u^3", "x^2 + u*y^3 + x*y^2"] {
        let f = parse(text, None, &s).unwrap();
        nodes += structural_walk(&f, 3)?;
    }
    Ok(format!("{nodes} tree nodes checked; P(t) integral and nonnegative through N_12 for {series} results"))
}

fn criterion_7() -> Outcome {
    let r = PadicRing::new(5).unwrap();
    let f = parse("x^2 + y^3 + x*y", None, &r).unwrap();
    let hint = WeightSystem::new(vec![3, 2], 6).unwrap();
    match zeta_semiquasihomogeneous(&f, Some(&hint), &SqhConfig::default()) {
        Err(Error::InvalidHint(_)) => {}
        other => return Err(format!("hinted x^2 + y^3 + x*y: expected InvalidHint, got {other:?}")),
    }
    let g = parse("x^2*y^2", None, &r).unwrap();
    match zeta_semiquasihomogeneous(&g, None, &SqhConfig::default()) {
        Err(Error::NotSemiQuasiHomogeneous(_)) => {}
        other => return Err(format!("x^2*y^2: expected NotSemiQuasiHomogeneous, got {other:?}")),
    }
    let cusp = parse("x^2 + y^3", None, &r).unwrap();
    let (z, _) = zeta(&cusp)?;
    // Same value at t = 1, different Taylor coefficients.
    let c = BigRational::new(BigInt::one(), BigInt::from(625));
    let perturbed = z.add(&RatFun::polynomial(
        5,
        vec![BigRational::from_integer(0.into()), BigRational::from_integer(0.into()), c.clone(), -c],
    ));
    let region = ResidueRegion::full(5, 2);
    if series_check(&cusp, &region, &perturbed, 4, DEFAULT_BUDGET).map_err(|e| e.to_string())? {
        return Err("perturbed rational function passed series_check".into());
    }
    Ok("bad hint → InvalidHint; x^2*y^2 → NotSemiQuasiHomogeneous; perturbed Z fails series_check".into())
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("1 closed-form equivalence", criterion_1, Some(Duration::from_secs(10))),
        ("2 oracle coefficient match", criterion_2, Some(Duration::from_secs(300))),
        ("3 denominator shape", criterion_3, None),
        ("4 quasihomogeneous shortcut", criterion_4, None),
        ("5 positive characteristic", criterion_5, Some(Duration::from_secs(60))),
        ("6 structural properties", criterion_6, None),
        ("7 negative controls", criterion_7, None),
    ];
    let mut failures = 0;
    for (name, run, limit) in criteria {
        let start = Instant::now();
        let mut outcome = run();
        let elapsed = start.elapsed();
        if let (Ok(detail), Some(limit)) = (&outcome, limit) {
            if elapsed > limit {
                outcome = Err(format!("{detail}, but took {elapsed:.2?} > {limit:?}"));
            }
        }
        match outcome {
            Ok(detail) => println!("PASS  criterion {name}: {detail} [{elapsed:.2?}]"),
            Err(detail) => {
                failures += 1;
                println!("FAIL  criterion {name}: {detail} [{elapsed:.2?}]");
            }
        }
    }
    if failures > 0 {
        println!("acceptance: {failures} of 7 criteria failed");
        std::process::exit(1);
    }
    println!("acceptance: all 7 criteria passed");
}
