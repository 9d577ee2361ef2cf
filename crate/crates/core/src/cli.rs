//! The `igusa` command-line front end.
//!
//! Exit codes: 0 success, 1 other failure (including a failed `check`),
//! 2 parse error, 3 not semiquasihomogeneous or bad weights, 4 depth cap,
//! 5 stabilization cap, 6 enumeration budget.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::analysis::{binomial_closed_form, bound_check, oracle_counts, poincare_from_zeta, BoundBranch};
use crate::coeff::{bigint_json, FpSeriesRing, LocalRing, PadicRing, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::poly::{parse, MultiPoly};
use crate::ratfun::RatFun;
use crate::region::ResidueRegion;
use crate::spf::{measures_from_counts, spf_zeta, SpfConfig, SpfTrace};
use crate::sqh::{zeta_semiquasihomogeneous, SqhConfig, SqhReport, WeightSystem};

/// Exact Igusa local zeta functions of semiquasihomogeneous polynomials.
#[derive(Debug, Parser)]
#[command(name = "igusa", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Compute Z(F, s), the Poincaré series and the counts N_0..N_J.
    Compute(JobArgs),
    /// Count solutions of F ≡ 0 mod π^j by brute force.
    Oracle(JobArgs),
    /// Compare the engine against brute force and, for α x^n + β y^m, the closed form.
    Check(JobArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Compute(_) => "compute",
            Command::Oracle(_) => "oracle",
            Command::Check(_) => "check",
        }
    }

    fn job(&self) -> &JobArgs {
        match self {
            Command::Compute(a) | Command::Oracle(a) | Command::Check(a) => a,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CharMode {
    /// Q_p: coefficients are integers.
    #[value(name = "0")]
    Zero,
    /// F_p((π)): coefficients may use `u` for π.
    #[value(name = "p")]
    P,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Latex,
}

#[derive(Debug, Clone, Args)]
pub struct JobArgs {
    /// Polynomial such as "x^2 + y^3 + x*y^2"; `u` is π in characteristic p.
    pub polynomial: String,
    /// Residue characteristic p.
    #[arg(long)]
    pub prime: u64,
    #[arg(long = "char", value_enum, default_value = "0")]
    pub char_mode: CharMode,
    /// Weight hint "a1,a2,…:d".
    #[arg(long)]
    pub weights: Option<String>,
    /// Number of counts N_1..N_J printed by `compute`.
    #[arg(long, default_value_t = 4)]
    pub expand: usize,
    /// Depth J for `oracle` and `check`.
    #[arg(long, default_value_t = 4)]
    pub levels: usize,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Deepest dilatation allowed in any stationary phase tree.
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u32).range(1..))]
    pub max_depth: u32,
    /// Scaling steps allowed before giving up (0 always gives up).
    #[arg(long, default_value_t = 32)]
    pub max_iter: u32,
    /// Cap on enumerated residue points (per tree node, or cumulatively for the oracle).
    #[arg(long, default_value_t = DEFAULT_BUDGET, value_parser = clap::value_parser!(u64).range(1..))]
    pub budget: u64,
    /// Write the dilatation trees as JSON.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Directory of cached results.
    #[arg(long, env = "IGUSA_ZETA_CACHE")]
    pub cache: Option<PathBuf>,
    /// Evaluate sibling subtrees in parallel.
    #[arg(long)]
    pub parallel: bool,
}

impl JobArgs {
    fn sqh_config(&self) -> SqhConfig {
        SqhConfig {
            spf: SpfConfig {
                max_depth: self.max_depth,
                budget: self.budget,
                trace: self.trace.is_some(),
                parallel: self.parallel,
            },
            max_iterations: self.max_iter,
        }
    }

    fn depth(&self, cmd: &Command) -> usize {
        match cmd {
            Command::Compute(_) => self.expand,
            _ => self.levels,
        }
    }
}

/// What a command produced: the rendered output and the exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub output: String,
    pub exit_code: i32,
}

/// Parses the process arguments, runs the command and returns the exit code.
pub fn main_entry() -> i32 {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    match execute(&cli.command) {
        Ok(outcome) => {
            let mut lock = stdout.lock();
            // A closed pipe is not worth a panic.
            let _ = lock.write_all(outcome.output.as_bytes());
            let _ = lock.flush();
            outcome.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs one command, consulting the cache when one is configured.
pub fn execute(cmd: &Command) -> Result<Outcome> {
    let job = cmd.job();
    let canonical = match job.char_mode {
        CharMode::Zero => parse(&job.polynomial, None, &PadicRing::new(job.prime)?)?.render(),
        CharMode::P => parse(&job.polynomial, None, &FpSeriesRing::new(job.prime)?)?.render(),
    };
    let key = cache_key(cmd, &canonical);
    let cache_file = job.cache.as_ref().map(|dir| dir.join(format!("{}.json", key.digest)));
    if let (Some(path), None) = (&cache_file, &job.trace) {
        if let Some(hit) = read_cache(path, &key.material) {
            return Ok(hit);
        }
    }
    let outcome = match job.char_mode {
        CharMode::Zero => run(cmd, &PadicRing::new(job.prime)?)?,
        CharMode::P => run(cmd, &FpSeriesRing::new(job.prime)?)?,
    };
    if let (Some(dir), Some(path)) = (&job.cache, &cache_file) {
        write_cache(dir, path, &key.material, &outcome)?;
    }
    Ok(outcome)
}

struct CacheKey {
    material: String,
    digest: String,
}

fn cache_key(cmd: &Command, canonical: &str) -> CacheKey {
    let job = cmd.job();
    let material = format!(
        "igusa-zeta/1\ncommand={}\npoly={}\np={}\nchar={:?}\nweights={}\ndepth={}\nformat={:?}\nmax_depth={}\nmax_iter={}\nbudget={}",
        cmd.name(),
        canonical,
        job.prime,
        job.char_mode,
        job.weights.as_deref().unwrap_or("-"),
        job.depth(cmd),
        job.format,
        job.max_depth,
        job.max_iter,
        job.budget,
    );
    let digest = hex::encode(Sha256::digest(material.as_bytes()));
    CacheKey { material, digest }
}

fn read_cache(path: &Path, material: &str) -> Option<Outcome> {
    let text = std::fs::read_to_string(path).ok()?;
    let v: Value = serde_json::from_str(&text).ok()?;
    if v.get("key")?.as_str()? != material {
        return None;
    }
    Some(Outcome { output: v.get("output")?.as_str()?.to_string(), exit_code: v.get("exit_code")?.as_i64()? as i32 })
}

fn write_cache(dir: &Path, path: &Path, material: &str, outcome: &Outcome) -> Result<()> {
    let io = |e: std::io::Error| Error::InvalidParameters(format!("cache {}: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(io)?;
    let record = json!({"key": material, "output": outcome.output, "exit_code": outcome.exit_code});
    // Write then rename so concurrent readers never see a partial file.
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    std::fs::write(&tmp, serde_json::to_string_pretty(&record).expect("cache record serializes")).map_err(io)?;
    std::fs::rename(&tmp, path).map_err(io)
}

/// The engine's answer, by whichever route applied.
struct EngineResult {
    zeta: RatFun,
    route: Route,
}

enum Route {
    Sqh(Box<SqhReport>),
    /// A constant term: one stationary phase tree over `O^n`.
    Direct(SpfTrace),
}

fn engine<R: LocalRing>(f: &MultiPoly<R>, job: &JobArgs) -> Result<EngineResult> {
    let hint = job.weights.as_deref().map(WeightSystem::parse).transpose()?;
    let cfg = job.sqh_config();
    let has_constant = !f.ring().is_zero(&f.constant_term());
    let result = if has_constant && !f.is_zero() {
        if hint.is_some() {
            return Err(Error::InvalidHint("weights do not apply to a polynomial with a constant term".into()));
        }
        let region = ResidueRegion::full(f.ring().prime(), f.nvars());
        let (zeta, trace) = spf_zeta(f, &region, &cfg.spf)?;
        EngineResult { zeta, route: Route::Direct(trace) }
    } else {
        let (zeta, report) = zeta_semiquasihomogeneous(f, hint.as_ref(), &cfg)?;
        EngineResult { zeta, route: Route::Sqh(Box::new(report)) }
    };
    if let Some(path) = &job.trace {
        let tree = match &result.route {
            Route::Sqh(report) => report.traces_json(),
            Route::Direct(trace) => trace.to_json(),
        };
        let text = serde_json::to_string_pretty(&tree).expect("trace serializes");
        std::fs::write(path, text).map_err(|e| Error::InvalidParameters(format!("trace {}: {e}", path.display())))?;
    }
    Ok(result)
}

fn run<R: LocalRing>(cmd: &Command, ring: &R) -> Result<Outcome> {
    let job = cmd.job();
    let f = parse(&job.polynomial, None, ring)?;
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    match cmd {
        Command::Compute(_) => compute(&f, job),
        Command::Oracle(_) => oracle(&f, job),
        Command::Check(_) => check(&f, job),
    }
}

fn rat_string(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn list<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

fn char_label<R: LocalRing>(ring: &R) -> String {
    if ring.characteristic() == 0 {
        format!("Q_{}", ring.prime())
    } else {
        format!("F_{}((u))", ring.prime())
    }
}

fn compute<R: LocalRing>(f: &MultiPoly<R>, job: &JobArgs) -> Result<Outcome> {
    let ring = f.ring();
    let p = ring.prime();
    let n = f.nvars();
    let result = engine(f, job)?;
    let z = &result.zeta;
    let poincare = poincare_from_zeta(z, n)?;
    let counts = poincare.counts(job.expand)?;
    let poles: Vec<BigRational> = z.pole_real_parts().into_iter().collect();
    let bound = match &result.route {
        Route::Sqh(report) => Some(bound_check(&counts, &report.weights, n, p)),
        Route::Direct(_) => None,
    };

    let output = match job.format {
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "F = {}    over {}, t = {p}^-s", f.render(), char_label(ring));
            let _ = writeln!(s, "Z(t) = {z}");
            let _ = writeln!(s, "numerator: [{}]", list(z.numerator().iter().map(rat_string)));
            let _ = writeln!(
                s,
                "denominator factors (a, b) for 1 - {p}^-a t^b: {{{}}}",
                list(z.denominator().iter().map(|d| format!("({}, {})", d.a, d.b)))
            );
            let _ = writeln!(s, "pole real parts: {{{}}}", list(poles.iter().map(rat_string)));
            let _ = writeln!(s, "P(t) = {}", poincare.ratfun);
            let _ = writeln!(s, "N_0..N_{}: [{}]", job.expand, list(&counts));
            match &result.route {
                Route::Sqh(report) => {
                    let _ = writeln!(s, "weights: {}    k0: {}", report.weights, report.k0);
                    let _ = writeln!(s, "m_k: [{}]", list(&report.g_valuations));
                    let _ = writeln!(s, "tree: {}", stats_text(&report.tree_stats));
                }
                Route::Direct(trace) => {
                    let _ = writeln!(s, "route: stationary phase over O^{n} (constant term present)");
                    let _ = writeln!(s, "tree: {}", stats_text(&trace.stats));
                }
            }
            if let Some(b) = &bound {
                let branch = match b.branch {
                    BoundBranch::Weighted => "|α|/d ≤ 1",
                    BoundBranch::Generic => "|α|/d > 1",
                };
                let _ = writeln!(
                    s,
                    "growth: exponent {} ({branch}); max N_j^d / p^(j(nd - min(d,|α|))) = {} at j = {}",
                    rat_string(&b.exponent),
                    rat_string(&b.max_ratio),
                    b.argmax
                );
            }
            s
        }
        Format::Json => {
            let mut v = match &result.route {
                Route::Sqh(report) => report.to_json(z),
                Route::Direct(trace) => json!({
                    "weights": Value::Null,
                    "d": Value::Null,
                    "k0": Value::Null,
                    "zeta": z.to_json(),
                    "pole_real_parts": poles.iter().map(|r| format!("{}/{}", r.numer(), r.denom())).collect::<Vec<_>>(),
                    "tree_stats": trace.stats.to_json(),
                }),
            };
            let obj = v.as_object_mut().expect("report is an object");
            obj.insert("polynomial".into(), json!(f.render()));
            obj.insert("p".into(), json!(p));
            obj.insert("char".into(), json!(ring.characteristic()));
            obj.insert("n".into(), json!(n));
            obj.insert("denominator".into(), json!(z.denominator().iter().map(|d| [d.a, d.b]).collect::<Vec<_>>()));
            obj.insert("poincare".into(), poincare.ratfun.to_json());
            obj.insert("N".into(), json!(counts.iter().map(bigint_json).collect::<Vec<_>>()));
            if let Some(b) = &bound {
                obj.insert("growth".into(), b.to_json());
            }
            if let Route::Sqh(report) = &result.route {
                obj.insert("m_k".into(), json!(report.g_valuations.iter().map(|m| m.to_string()).collect::<Vec<_>>()));
            }
            let mut s = serde_json::to_string_pretty(&v).expect("JSON serializes");
            s.push('\n');
            s
        }
        Format::Latex => {
            let mut s = String::new();
            let _ = writeln!(s, "Z(s) = {}, \\quad t = {p}^{{-s}}", z.to_latex());
            let _ = writeln!(s, "P(t) = {}", poincare.ratfun.to_latex());
            let _ = writeln!(s, "(N_j)_{{j \\le {}}} = ({})", job.expand, list(&counts));
            s
        }
    };
    Ok(Outcome { output, exit_code: 0 })
}

fn stats_text(stats: &crate::spf::TreeStats) -> String {
    format!("{} nodes, depth {}, max accumulated e {}", stats.nodes, stats.max_depth, stats.max_e_accum)
}

fn oracle<R: LocalRing>(f: &MultiPoly<R>, job: &JobArgs) -> Result<Outcome> {
    let result = oracle_counts(f, job.levels, job.budget)?;
    let output = match job.format {
        Format::Text => format!("F = {}    over {}\nN = [{}]\n", f.render(), char_label(f.ring()), list(&result.counts)),
        Format::Json => format!("{}\n", serde_json::to_string(&result.to_json()).expect("JSON serializes")),
        Format::Latex => format!("(N_j)_{{j \\le {}}} = ({})\n", job.levels, list(&result.counts)),
    };
    Ok(Outcome { output, exit_code: 0 })
}

/// `(n, m, α, β)` when `f = α x^n + β y^m` in some order of the two
/// variables with `α` a unit.
fn binomial_shape<R: LocalRing>(f: &MultiPoly<R>) -> Option<(u32, u32, R::Elem, R::Elem)> {
    if f.nvars() != 2 || f.num_terms() != 2 {
        return None;
    }
    let mut pure = [None, None];
    for (m, c) in f.terms() {
        match *m.exponents() {
            [a, 0] if a > 0 => pure[0] = Some((a, c.clone())),
            [0, b] if b > 0 => pure[1] = Some((b, c.clone())),
            _ => return None,
        }
    }
    let [Some((a, ca)), Some((b, cb))] = pure else { return None };
    let ring = f.ring();
    if ring.is_unit(&ca) {
        Some((a, b, ca, cb))
    } else if ring.is_unit(&cb) {
        // Z is symmetric in the two variables.
        Some((b, a, cb, ca))
    } else {
        None
    }
}

struct Comparison {
    name: &'static str,
    status: Status,
    detail: String,
}

#[derive(PartialEq, Eq)]
enum Status {
    Pass,
    Fail,
    Skipped,
}

fn check<R: LocalRing>(f: &MultiPoly<R>, job: &JobArgs) -> Result<Outcome> {
    let ring = f.ring();
    let p = ring.prime();
    let n = f.nvars();
    let j = job.levels;
    let result = engine(f, job)?;
    let z = &result.zeta;
    let brute = oracle_counts(f, j, job.budget)?;
    let mut comparisons = Vec::new();

    let from_series = poincare_from_zeta(z, n).and_then(|ps| ps.counts(j));
    let expected: Vec<BigInt> = brute.counts.iter().map(|&c| BigInt::from(c)).collect();
    comparisons.push(match from_series {
        Ok(c) if c == expected => {
            Comparison { name: "counts", status: Status::Pass, detail: format!("N_0..N_{j} = [{}]", list(&c)) }
        }
        Ok(c) => Comparison {
            name: "counts",
            status: Status::Fail,
            detail: format!("engine [{}] vs brute force [{}]", list(&c), list(&expected)),
        },
        Err(e) => Comparison { name: "counts", status: Status::Fail, detail: e.to_string() },
    });

    let full = ResidueRegion::full(p, n);
    let measures = measures_from_counts(&brute.counts, &full.measure(), p, n);
    let series = if j == 0 { Vec::new() } else { z.series_expand(j - 1) };
    comparisons.push(Comparison {
        name: "series",
        status: if series == measures { Status::Pass } else { Status::Fail },
        detail: format!("coefficients of t^0..t^{} against measures of {{v(F) = j}}", j.saturating_sub(1)),
    });

    if let Route::Sqh(report) = &result.route {
        let target = [crate::ratfun::DenomFactor::new(1, 1), report.weights.factor()];
        comparisons.push(Comparison {
            name: "denominator",
            status: if z.denominator_divides(&target) { Status::Pass } else { Status::Fail },
            detail: format!("divides (1 - {p}^-1 t)(1 - {p}^-{} t^{})", report.weights.total(), report.weights.d),
        });
    }

    comparisons.push(match binomial_shape(f) {
        Some((a, b, alpha, beta)) => match binomial_closed_form(ring, a, b, &alpha, &beta) {
            Ok(closed) if &closed == z => {
                Comparison { name: "closed form", status: Status::Pass, detail: format!("α X^{a} + β Y^{b} with α a unit") }
            }
            Ok(closed) => Comparison { name: "closed form", status: Status::Fail, detail: format!("closed form gives {closed}") },
            Err(e) => Comparison { name: "closed form", status: Status::Skipped, detail: e.to_string() },
        },
        None => Comparison { name: "closed form", status: Status::Skipped, detail: "not of the form α x^n + β y^m".into() },
    });

    let pass = comparisons.iter().all(|c| c.status != Status::Fail);
    let label = |s: &Status| match s {
        Status::Pass => "pass",
        Status::Fail => "FAIL",
        Status::Skipped => "n/a",
    };
    let output = match job.format {
        Format::Json => {
            let v = json!({
                "polynomial": f.render(),
                "p": p,
                "char": ring.characteristic(),
                "levels": j,
                "zeta": z.to_json(),
                "pass": pass,
                "comparisons": comparisons.iter().map(|c| json!({
                    "name": c.name,
                    "status": label(&c.status),
                    "detail": c.detail,
                })).collect::<Vec<_>>(),
            });
            format!("{}\n", serde_json::to_string_pretty(&v).expect("JSON serializes"))
        }
        Format::Text | Format::Latex => {
            let mut s = String::new();
            let _ = writeln!(s, "F = {}    over {}", f.render(), char_label(ring));
            let _ = writeln!(s, "Z(t) = {z}");
            for c in &comparisons {
                let _ = writeln!(s, "{:<4} {}: {}", label(&c.status), c.name, c.detail);
            }
            let _ = writeln!(s, "check: {}", if pass { "pass" } else { "FAIL" });
            s
        }
    };
    Ok(Outcome { output, exit_code: if pass { 0 } else { 1 } })
}
