mod output;

use std::io::{self, Write};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use qaw_core::connect::{connection_aw_asc, connection_aw_c2h, connection_h_p, connection_w_p, ConnectionMatrix, Direction};
use qaw_core::density::{kernel_sum, DensitySpec, KernelKind, RescaledDensity, SchemeDensity, TruncationConfig};
use qaw_core::families::{b_sequence, eval_sequence, g_sequence, rescaled_sequence, Family, RescaledKind, SchemeParams};
use qaw_core::markov::{write_csv, ChainConfig, ChainSampler};
use qaw_core::suites::{run_suite, Suite, SuiteOptions, DEFAULT_MARKOV_SAMPLES, DEFAULT_SEED};
use qaw_core::QBase;

use output::{csv_row, document, num};

const TOL_ENV: &str = "QAW_DEFAULT_TOL";

/// Askey-Wilson scheme polynomials, densities, connection coefficients,
/// kernel expansions and the q-Gaussian Markov chain.
///
/// Output is JSON with top-level keys `request`, `result` and `reports`.
/// Exit status: 0 on success, 1 when a computation or a verify suite fails,
/// 2 on invalid input. Set QAW_DEFAULT_TOL to change the truncation
/// tolerance of infinite products (default 1e-14).
#[derive(Parser, Debug)]
#[command(name = "qaw", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "subcommand", content = "flags", rename_all = "snake_case")]
enum Command {
    /// Evaluate a polynomial family by its three-term recurrence.
    Eval(EvalArgs),
    /// Connection coefficients between two families.
    Coeffs(CoeffsArgs),
    /// Evaluate a density at points.
    Density(DensityArgs),
    /// Partial sum of a kernel expansion.
    Kernel(KernelArgs),
    /// Run verification suites.
    Verify(VerifyArgs),
    /// Sample the three-step q-Gaussian Markov chain (Y, X, Z).
    Sample(SampleArgs),
}

/// Askey-Wilson parameters, as four reals or as two conjugate pairs
/// `a, b = rho1 e^{+-i theta}`, `c, d = rho2 e^{+-i eta}` with
/// `y = cos theta`, `z = cos eta`. Unset values are 0.
#[derive(Args, Debug, Serialize, Clone, Copy)]
struct ParamArgs {
    /// Real parameter a; all pair products must lie in [-1, 1].
    #[serde(skip_serializing_if = "Option::is_none")]
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["y", "z", "rho1", "rho2"])]
    a: Option<f64>,
    /// Real parameter b; all pair products must lie in [-1, 1].
    #[serde(skip_serializing_if = "Option::is_none")]
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["y", "z", "rho1", "rho2"])]
    b: Option<f64>,
    /// Real parameter c; all pair products must lie in [-1, 1].
    #[serde(skip_serializing_if = "Option::is_none")]
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["y", "z", "rho1", "rho2"])]
    c: Option<f64>,
    /// Real parameter d; all pair products must lie in [-1, 1].
    #[serde(skip_serializing_if = "Option::is_none")]
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["y", "z", "rho1", "rho2"])]
    d: Option<f64>,
    /// Conditioning point y, in [-1, 1] (in S(q) for rescaled kinds).
    #[serde(skip_serializing_if = "Option::is_none")]
    #[arg(long, allow_hyphen_values = true)]
    y: Option<f64>,
    /// Conditioning point z, in [-1, 1] (in S(q) for rescaled kinds).
    #[serde(skip_serializing_if = "Option::is_none")]
    #[arg(long, allow_hyphen_values = true)]
    z: Option<f64>,
    /// Correlation rho1, in (-1, 1).
    #[serde(skip_serializing_if = "Option::is_none")]
    #[arg(long, allow_hyphen_values = true)]
    rho1: Option<f64>,
    /// Correlation rho2, in (-1, 1).
    #[serde(skip_serializing_if = "Option::is_none")]
    #[arg(long, allow_hyphen_values = true)]
    rho2: Option<f64>,
}

impl ParamArgs {
    fn conjugate_given(&self) -> bool {
        self.y.is_some() || self.z.is_some() || self.rho1.is_some() || self.rho2.is_some()
    }

    fn scheme(&self, q: QBase) -> Result<SchemeParams> {
        let v = |x: Option<f64>| x.unwrap_or(0.0);
        Ok(if self.conjugate_given() {
            SchemeParams::conjugate_in(v(self.y), v(self.rho1), v(self.z), v(self.rho2), q)?
        } else {
            SchemeParams::real(v(self.a), v(self.b), v(self.c), v(self.d), q.value())?
        })
    }

    fn conj(&self) -> [f64; 4] {
        [self.y, self.rho1, self.z, self.rho2].map(|x| x.unwrap_or(0.0))
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize)]
#[value(rename_all = "snake_case")]
#[serde(rename_all = "snake_case")]
enum FamilyArg {
    /// Askey-Wilson (a, b, c, d).
    Aw,
    /// Continuous dual Hahn (b, c, d).
    C2h,
    /// Al-Salam-Chihara (c, d).
    Asc,
    /// Continuous big q-Hermite (d).
    Bqh,
    /// Continuous q-Hermite.
    Qh,
    /// Askey-Wilson in conjugate form (y, rho1, z, rho2).
    W,
    /// Al-Salam-Chihara in conjugate form (y, rho1).
    P,
    /// The b_n polynomials.
    B,
    /// The g_n polynomials (y, rho1).
    G,
}

#[derive(Args, Debug, Serialize)]
struct EvalArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Degree, 0 to 10000.
    #[arg(long)]
    n: usize,
    /// Point; in [-1, 1] for the scheme families, in S(q) with --rescaled.
    #[arg(long, allow_hyphen_values = true)]
    x: f64,
    /// Base q, in (-1, 1].
    #[arg(long, allow_hyphen_values = true)]
    q: f64,
    /// Use the monic rescaled family on S(q) = [-2/sqrt(1-q), 2/sqrt(1-q)]
    /// (families qh, p, w, b, g only; allows q = 1).
    #[arg(long)]
    rescaled: bool,
    #[command(flatten)]
    #[serde(flatten)]
    params: ParamArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize)]
#[value(rename_all = "snake_case")]
#[serde(rename_all = "snake_case")]
enum MapArg {
    AwToC2h,
    C2hToAw,
    AwToAsc,
    AscToAw,
    WToP,
    PToW,
    HToP,
    PToH,
}

#[derive(Args, Debug, Serialize)]
struct CoeffsArgs {
    /// Source and target families; entry [k][n] is the coefficient of the
    /// k-th target polynomial in the n-th source polynomial.
    #[arg(long, value_enum)]
    map: MapArg,
    /// Largest degree, 0 to 200.
    #[arg(long)]
    nmax: usize,
    /// Base q, in (-1, 1).
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.5)]
    q: f64,
    #[command(flatten)]
    #[serde(flatten)]
    params: ParamArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize)]
#[value(rename_all = "snake_case")]
#[serde(rename_all = "snake_case")]
enum DensityArg {
    /// q-Hermite weight on [-1, 1].
    #[value(name = "f_h")]
    #[serde(rename = "f_h")]
    FH,
    /// Askey-Wilson (a, b, c, d).
    #[value(name = "f_aw")]
    #[serde(rename = "f_aw")]
    FAw,
    /// Continuous dual Hahn (b, c, d).
    #[value(name = "f_psi")]
    #[serde(rename = "f_psi")]
    FPsi,
    /// Al-Salam-Chihara (c, d).
    #[value(name = "f_q")]
    #[serde(rename = "f_q")]
    FQ,
    /// Continuous big q-Hermite (d).
    #[value(name = "f_bh")]
    #[serde(rename = "f_bh")]
    FBh,
    /// Al-Salam-Chihara, conjugate form (y, rho1).
    #[value(name = "f_p")]
    #[serde(rename = "f_p")]
    FP,
    /// Askey-Wilson, conjugate form (y, rho1, z, rho2).
    #[value(name = "f_w")]
    #[serde(rename = "f_w")]
    FW,
    /// q-Normal on S(q).
    #[value(name = "f_n")]
    #[serde(rename = "f_n")]
    FN,
    /// Conditional q-Normal on S(q) (y, rho1).
    #[value(name = "f_cn")]
    #[serde(rename = "f_cn")]
    FCn,
    /// Middle of a three-step chain given both ends, on S(q) (y, rho1, z, rho2).
    #[value(name = "f_c2n")]
    #[serde(rename = "f_c2n")]
    FC2n,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[value(rename_all = "snake_case")]
#[serde(rename_all = "snake_case")]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Serialize)]
struct DensityArgs {
    #[arg(long, value_enum)]
    kind: DensityArg,
    /// Evaluation points (repeatable or comma separated).
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',', required_unless_present = "grid", conflicts_with = "grid")]
    x: Vec<f64>,
    /// Evaluate at this many evenly spaced points covering the support
    /// (S(q) is cut to [-8, 8] at q = 1), 2 to 1000000.
    #[arg(long)]
    grid: Option<usize>,
    /// Base q, in (-1, 1]; q = 1 only for the rescaled kinds.
    #[arg(long, allow_hyphen_values = true)]
    q: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(flatten)]
    #[serde(flatten)]
    params: ParamArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize)]
#[value(rename_all = "snake_case")]
#[serde(rename_all = "snake_case")]
enum KernelArg {
    /// f_p / f_h in q-Hermite products (y, rho1).
    PoissonMehler,
    /// f_W / f_p in p_j products (y, rho1, z, rho2).
    AwForward,
    /// f_p / f_W in w_j (y, rho1, z, rho2).
    AwInverse,
    /// Continuous dual Hahn generating sum with its closed form (a, b, c, d).
    C2hSum,
}

#[derive(Args, Debug, Serialize)]
struct KernelArgs {
    #[arg(long, value_enum)]
    kind: KernelArg,
    /// Point, in [-1, 1].
    #[arg(long, allow_hyphen_values = true)]
    x: f64,
    /// Base q, in (-1, 1).
    #[arg(long, allow_hyphen_values = true)]
    q: f64,
    /// Most terms to add, 1 to 100000.
    #[arg(long, default_value_t = 500)]
    terms: usize,
    #[command(flatten)]
    #[serde(flatten)]
    params: ParamArgs,
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    /// Suites to run (repeatable or comma separated); all when omitted.
    #[arg(long, value_delimiter = ',', value_parser = parse_suite)]
    suite: Vec<Suite>,
    /// Use this base, in (-1, 1], everywhere instead of the built-in ones.
    #[arg(long, allow_hyphen_values = true)]
    q: Option<f64>,
    /// Seed for the random parameter draws and the sampler.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Chain samples in the markov suite, at least 1000.
    #[arg(long, default_value_t = DEFAULT_MARKOV_SAMPLES)]
    samples: usize,
}

fn parse_suite(s: &str) -> std::result::Result<Suite, String> {
    s.parse::<Suite>().map_err(|_| {
        let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
        format!("unknown suite {s:?}, expected one of {}", names.join(", "))
    })
}

#[derive(Args, Debug, Serialize)]
struct SampleArgs {
    /// Base q, in (-1, 1].
    #[arg(long, allow_hyphen_values = true)]
    q: f64,
    /// Correlation of (Y, X), in (-1, 1).
    #[arg(long, allow_hyphen_values = true)]
    rho1: f64,
    /// Correlation of (X, Z), in (-1, 1).
    #[arg(long, allow_hyphen_values = true)]
    rho2: f64,
    /// Number of draws, 1 to 100000000.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// CSV has a header `y,x,z`.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

/// What a successful run writes to standard output.
enum Output {
    Json { result: Value, reports: Vec<Value>, failed: bool },
    Text(String),
}

fn base(q: f64) -> Result<QBase> {
    Ok(QBase::new(q)?)
}

fn truncation() -> Result<TruncationConfig> {
    let mut t = TruncationConfig::default();
    if let Ok(raw) = std::env::var(TOL_ENV) {
        let tol: f64 = raw.trim().parse().with_context(|| format!("{TOL_ENV} = {raw:?} is not a decimal number"))?;
        if !(tol > 0.0 && tol < 1.0) {
            bail!("{TOL_ENV} = {tol} must lie in (0, 1)");
        }
        t.product_tol = tol;
    }
    Ok(t)
}

fn eval(a: &EvalArgs) -> Result<Output> {
    if a.n > 10_000 {
        bail!("--n {} exceeds 10000", a.n);
    }
    let q = base(a.q)?;
    let [y, rho1, z, rho2] = a.params.conj();
    let values = if a.rescaled {
        let (kind, extra) = match a.family {
            FamilyArg::Qh => (RescaledKind::H, vec![]),
            FamilyArg::P => (RescaledKind::P, vec![y, rho1]),
            FamilyArg::W => (RescaledKind::A, vec![y, rho1, z, rho2]),
            FamilyArg::B => (RescaledKind::B, vec![]),
            FamilyArg::G => (RescaledKind::G, vec![y, rho1]),
            other => bail!("no rescaled form of family {other:?}"),
        };
        rescaled_sequence(kind, a.n, a.x, &extra, q)?
    } else {
        if !(a.x.abs() <= 1.0) {
            bail!("x = {} outside [-1, 1]", a.x);
        }
        let qv = q.require_below_one("unscaled families")?.value();
        match a.family {
            FamilyArg::B => b_sequence(a.n, a.x, qv),
            FamilyArg::G => g_sequence(a.n, a.x, y, rho1, qv),
            f => {
                let family = match f {
                    FamilyArg::Aw => Family::Aw,
                    FamilyArg::C2h => Family::C2h,
                    FamilyArg::Asc => Family::Asc,
                    FamilyArg::Bqh => Family::Bqh,
                    FamilyArg::Qh => Family::Qh,
                    FamilyArg::W => Family::W,
                    _ => Family::P,
                };
                eval_sequence(family, a.n, a.x, &a.params.scheme(q)?)?.values
            }
        }
    };
    let result = json!({ "value": num(values[a.n]), "values": values.iter().map(|&v| num(v)).collect::<Vec<_>>() });
    Ok(Output::Json { result, reports: vec![], failed: false })
}

fn coeffs(a: &CoeffsArgs) -> Result<Output> {
    if a.nmax > 200 {
        bail!("--nmax {} exceeds 200", a.nmax);
    }
    let q = base(a.q)?;
    let n = a.nmax;
    let [y, rho1, _, _] = a.params.conj();
    let (fwd, inv) = (Direction::Forward, Direction::Inverse);
    let m: ConnectionMatrix = match a.map {
        MapArg::AwToC2h => connection_aw_c2h(n, &a.params.scheme(q)?, fwd)?,
        MapArg::C2hToAw => connection_aw_c2h(n, &a.params.scheme(q)?, inv)?,
        MapArg::AwToAsc => connection_aw_asc(n, &a.params.scheme(q)?, fwd)?,
        MapArg::AscToAw => connection_aw_asc(n, &a.params.scheme(q)?, inv)?,
        MapArg::WToP => connection_w_p(n, &a.params.scheme(q)?, fwd)?,
        MapArg::PToW => connection_w_p(n, &a.params.scheme(q)?, inv)?,
        MapArg::HToP => connection_h_p(n, y, rho1, q, fwd)?,
        MapArg::PToH => connection_h_p(n, y, rho1, q, inv)?,
    };
    let result = json!({
        "source": m.source.name(),
        "target": m.target.name(),
        "n_max": m.n_max,
        "coeff": m.coeff,
    });
    Ok(Output::Json { result, reports: vec![], failed: false })
}

fn density(a: &DensityArgs) -> Result<Output> {
    let q = base(a.q)?;
    let trunc = truncation()?;
    let [y, rho1, z, rho2] = a.params.conj();
    let scheme = |kind| -> Result<DensitySpec> { Ok(DensitySpec::Scheme { kind, params: a.params.scheme(q)? }) };
    let spec = match a.kind {
        DensityArg::FH => DensitySpec::FH { q },
        DensityArg::FAw => scheme(SchemeDensity::FAw)?,
        DensityArg::FPsi => scheme(SchemeDensity::FPsi)?,
        DensityArg::FQ => scheme(SchemeDensity::FQ)?,
        DensityArg::FBh => scheme(SchemeDensity::FBh)?,
        DensityArg::FP => scheme(SchemeDensity::FP)?,
        DensityArg::FW => scheme(SchemeDensity::FW)?,
        DensityArg::FN => DensitySpec::Rescaled { kind: RescaledDensity::FN, q },
        DensityArg::FCn => DensitySpec::Rescaled { kind: RescaledDensity::FCn { y, rho: rho1 }, q },
        DensityArg::FC2n => DensitySpec::Rescaled { kind: RescaledDensity::FC2n { y, rho1, z, rho2 }, q },
    };
    let (lo, hi) = spec.support();
    let xs: Vec<f64> = match a.grid {
        Some(n) => {
            if !(2..=1_000_000).contains(&n) {
                bail!("--grid {n} outside 2 to 1000000");
            }
            let (lo, hi) = (lo.max(-8.0), hi.min(8.0));
            (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
        }
        None => a.x.clone(),
    };
    let values = xs.iter().map(|&x| spec.eval(x, &trunc)).collect::<qaw_core::Result<Vec<_>>>()?;
    if a.format == Format::Csv {
        let mut s = String::from("x,density\n");
        for (x, v) in xs.iter().zip(&values) {
            s.push_str(&csv_row(&[*x, *v]));
            s.push('\n');
        }
        return Ok(Output::Text(s));
    }
    let points: Vec<Value> = xs.iter().zip(&values).map(|(&x, &v)| json!({ "x": num(x), "density": num(v) })).collect();
    let result = json!({ "kind": spec.kind().name(), "support": [num(lo), num(hi)], "points": points });
    Ok(Output::Json { result, reports: vec![], failed: false })
}

fn kernel(a: &KernelArgs) -> Result<Output> {
    if !(1..=100_000).contains(&a.terms) {
        bail!("--terms {} outside 1 to 100000", a.terms);
    }
    let q = base(a.q)?;
    let trunc = TruncationConfig { series_terms: a.terms, ..truncation()? };
    let kind = match a.kind {
        KernelArg::PoissonMehler => KernelKind::PoissonMehler,
        KernelArg::AwForward => KernelKind::AwForward,
        KernelArg::AwInverse => KernelKind::AwInverse,
        KernelArg::C2hSum => KernelKind::C2hSum,
    };
    let k = kernel_sum(kind, a.x, &a.params.scheme(q)?, &trunc)?;
    let result = json!({
        "sum": num(k.sum),
        "abs_sum": num(k.abs_sum),
        "terms": k.terms,
        "closed_form": k.closed_form.map_or(Value::Null, num),
    });
    Ok(Output::Json { result, reports: vec![], failed: false })
}

fn verify(a: &VerifyArgs) -> Result<Output> {
    if a.samples < 1000 {
        bail!("--samples {} below 1000", a.samples);
    }
    let opts = SuiteOptions {
        seed: a.seed,
        q: a.q.map(base).transpose()?,
        markov_samples: a.samples,
        ..SuiteOptions::default()
    };
    let mut suites = if a.suite.is_empty() { Suite::ALL.to_vec() } else { a.suite.clone() };
    suites.sort_by_key(|s| s.name());
    suites.dedup();
    let mut summary = Vec::new();
    let mut reports = Vec::new();
    let mut passed = true;
    for suite in suites {
        let r = run_suite(suite, &opts)?;
        passed &= r.passed;
        summary.push(json!({ "suite": suite.name(), "passed": r.passed, "checks": r.reports.len(), "runtime_ms": num(r.runtime_ms) }));
        for (index, report) in r.reports.iter().enumerate() {
            let mut v = serde_json::to_value(report)?;
            if let Value::Object(o) = &mut v {
                o.insert("suite".into(), json!(suite.name()));
                o.insert("index".into(), json!(index));
            }
            reports.push(v);
        }
    }
    let result = json!({ "passed": passed, "seed": a.seed, "suites": summary });
    Ok(Output::Json { result, reports, failed: !passed })
}

fn sample(a: &SampleArgs) -> Result<Output> {
    if !(1..=100_000_000).contains(&a.n) {
        bail!("--n {} outside 1 to 100000000", a.n);
    }
    let cfg = ChainConfig { q: base(a.q)?, rho1: a.rho1, rho2: a.rho2, n_samples: a.n, seed: a.seed };
    let samples = ChainSampler::new(cfg)?.sample();
    if a.format == Format::Csv {
        let mut buf = Vec::new();
        write_csv(&samples, &mut buf)?;
        return Ok(Output::Text(String::from_utf8(buf)?));
    }
    let rows: Vec<Value> = samples.iter().map(|s| json!([num(s.y), num(s.x), num(s.z)])).collect();
    let result = json!({ "columns": ["y", "x", "z"], "samples": rows });
    Ok(Output::Json { result, reports: vec![], failed: false })
}

/// Whether a library error means the request itself was unacceptable.
fn is_validation(e: &anyhow::Error) -> bool {
    use qaw_core::Error as E;
    match e.downcast_ref::<E>() {
        Some(E::InvalidParameter(_) | E::NonReal { .. } | E::DegenerateDenominator { .. } | E::LengthMismatch { .. }) => true,
        Some(_) => false,
        // Everything raised here directly is a check on the flags.
        None => true,
    }
}

fn error_kind(e: &anyhow::Error) -> &'static str {
    use qaw_core::Error as E;
    match e.downcast_ref::<E>() {
        Some(E::NonConvergence { .. }) => "non_convergence",
        Some(E::Quadrature { .. }) => "quadrature",
        Some(E::NonPositiveFactor { .. }) => "non_positive_factor",
        Some(E::NonMonotoneCdf { .. }) => "non_monotone_cdf",
        Some(E::InsufficientBins { .. }) => "insufficient_bins",
        Some(E::IllConditioned { .. }) => "ill_conditioned",
        _ => "error",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let parts: Vec<&str> =
                text.lines().map(str::trim).take_while(|l| !l.starts_with("Usage:")).filter(|l| !l.is_empty() && !l.starts_with("For more information")).collect();
            eprintln!("{}", parts.join(" ").trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    let request = serde_json::to_value(&cli.command).unwrap_or(Value::Null);
    let outcome = match &cli.command {
        Command::Eval(a) => eval(a),
        Command::Coeffs(a) => coeffs(a),
        Command::Density(a) => density(a),
        Command::Kernel(a) => kernel(a),
        Command::Verify(a) => verify(a),
        Command::Sample(a) => sample(a),
    };
    let (text, code) = match outcome {
        Ok(Output::Text(s)) => (s, ExitCode::SUCCESS),
        Ok(Output::Json { result, reports, failed }) => {
            let doc = document(request, result, reports);
            (format!("{doc:#}\n"), if failed { ExitCode::FAILURE } else { ExitCode::SUCCESS })
        }
        Err(e) if is_validation(&e) => {
            eprintln!("{}", format!("{e:#}").replace('\n', " "));
            return ExitCode::from(2);
        }
        Err(e) => {
            let result = json!({ "error": { "kind": error_kind(&e), "message": format!("{e:#}") } });
            (format!("{:#}\n", document(request, result, vec![])), ExitCode::FAILURE)
        }
    };
    let mut out = io::stdout().lock();
    if out.write_all(text.as_bytes()).and_then(|_| out.flush()).is_err() {
        return ExitCode::FAILURE;
    }
    code
}
