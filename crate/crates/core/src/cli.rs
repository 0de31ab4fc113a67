//! Command-line front end. Every subcommand prints one JSON report (or CSV
//! with `--csv`) and exits 0 when all checks pass, 1 on a failed check, 2 on
//! invalid input and 3 when the engine detects an internal inconsistency.

use std::ffi::OsString;
use std::fmt::Display;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::ergodic::{self, ErgodicError, FixedPoint, StateParam};
use crate::exel_laca::{self, ElError, ElMatrix, FamilySpec};
use crate::expr::{parse, Case, Element, ExprError, Word};
use crate::fock::{evaluate, verify_identity, FockError, TruncSpace};
use crate::report::{to_json, Discrepancy, Instance, Report};
use crate::rewrite::{self, RewriteError};
use crate::scalar::{Coeff, Rational};
use crate::spectral::{self, Phase, RepSpec, SpectralError, SyntheticSum};
use crate::suites;

#[derive(Parser, Debug)]
#[command(
    name = "wmono",
    version,
    about = "Normal forms and Fock-space checks for weakly monotone algebras"
)]
pub struct Cli {
    /// Write the report to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Include the wall-clock runtime in the report.
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CaseArg {
    Z,
    N,
    Anti,
}

impl From<CaseArg> for Case {
    fn from(c: CaseArg) -> Case {
        match c {
            CaseArg::Z => Case::Z,
            CaseArg::N => Case::N,
            CaseArg::Anti => Case::Anti,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    RelationsZ,
    ExelLaca,
    RepN,
    Anti,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MatrixArg {
    WmZ,
    WmN,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Normal form of an expression, optionally with every rewrite step.
    Rewrite {
        #[arg(long, value_enum)]
        case: CaseArg,
        #[arg(long)]
        expr: String,
        #[arg(long)]
        show_steps: bool,
    },
    /// Relation suites on a truncated Fock space.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        /// Index window `a..b`; for the N and anti-monotone suites `b` is the dimension.
        #[arg(long, allow_hyphen_values = true)]
        window: String,
        #[arg(long)]
        particles: usize,
        /// JSON family of (X, Y) pairs for the Exel-Laca suite.
        #[arg(long)]
        family: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "wm-z")]
        matrix: MatrixArg,
        /// Representation levels for the rep-n suite.
        #[arg(long, value_delimiter = ',', default_values_t = [0, 1, 2])]
        level: Vec<i32>,
        /// Numeric phase for the rep-n suite; formal when absent.
        #[arg(long, allow_hyphen_values = true)]
        phase: Option<String>,
        #[arg(long)]
        max_index: Option<i32>,
    },
    /// Vacuum moments `⟨Ω, x^k Ω⟩` for `k = 0..=max-order`.
    Moments {
        #[arg(long)]
        expr: String,
        #[arg(long)]
        max_order: usize,
        #[arg(long, value_enum, default_value = "n")]
        case: CaseArg,
        #[arg(long)]
        csv: bool,
    },
    /// Norm of the Cesàro average of a word against `1/√n`.
    Cesaro {
        #[arg(long)]
        word: String,
        #[arg(long, value_delimiter = ',')]
        n: Vec<usize>,
    },
    /// Residual of the averaged squared position operators.
    Limit {
        #[arg(long = "N", value_delimiter = ',')]
        n: Vec<usize>,
        /// Basis tuple `i1,i2,...`; empty for the vacuum.
        #[arg(long, allow_hyphen_values = true, default_value = "")]
        vector: String,
        #[arg(long)]
        csv: bool,
    },
    /// Invariant states `ω_t` and shift invariance.
    States {
        #[arg(long)]
        expr: String,
        #[arg(long, value_delimiter = ',')]
        t: Vec<String>,
    },
    /// Lower bound for the distance from the vacuum projection.
    Certificate {
        #[arg(long)]
        expr: String,
        #[arg(long, value_enum, default_value = "z")]
        case: CaseArg,
    },
    /// Commutant dimension: `case:window:particles:expr;expr;...`,
    /// e.g. `n:2:2:c(1);c(2)` or `z:-1..1:2:x(0)`.
    Commutant {
        #[arg(long, allow_hyphen_values = true)]
        gens: String,
        #[arg(long)]
        expect: Option<usize>,
    },
    /// Direct-sum representations.
    Reps {
        #[command(subcommand)]
        command: RepsCommand,
    },
}

#[derive(Subcommand, Debug)]
pub enum RepsCommand {
    /// Recover the components of a synthetic direct sum.
    Decompose {
        #[arg(long)]
        spec: PathBuf,
    },
}

/// Failure that ends a run before a report exists.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

fn usage(e: impl Display) -> CliError {
    CliError::Usage(e.to_string())
}

impl From<FockError> for CliError {
    fn from(e: FockError) -> Self {
        match e {
            FockError::NoConvergence(_) => CliError::Internal(e.to_string()),
            _ => usage(e),
        }
    }
}

impl From<RewriteError> for CliError {
    fn from(e: RewriteError) -> Self {
        match e {
            RewriteError::Fock(f) => f.into(),
            RewriteError::WrongCase { .. } => usage(e),
            RewriteError::FuelExhausted(_) | RewriteError::Inconsistent(_) => {
                CliError::Internal(e.to_string())
            }
        }
    }
}

impl From<ExprError> for CliError {
    fn from(e: ExprError) -> Self {
        usage(e)
    }
}

impl From<ElError> for CliError {
    fn from(e: ElError) -> Self {
        match e {
            ElError::Fock(f) => f.into(),
            _ => usage(e),
        }
    }
}

impl From<ErgodicError> for CliError {
    fn from(e: ErgodicError) -> Self {
        match e {
            ErgodicError::Rewrite(r) => r.into(),
            ErgodicError::Fock(f) => f.into(),
            _ => usage(e),
        }
    }
}

impl From<SpectralError> for CliError {
    fn from(e: SpectralError) -> Self {
        match e {
            SpectralError::Fock(f) => f.into(),
            _ => usage(e),
        }
    }
}

/// Output of one subcommand.
pub enum Output {
    Json(Report),
    /// CSV text plus the report that decides the exit code.
    Csv(String, Report),
}

impl Output {
    fn report(&self) -> &Report {
        match self {
            Output::Json(r) | Output::Csv(_, r) => r,
        }
    }
}

pub fn parse_window(s: &str) -> Result<(i32, i32), CliError> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| usage(format!("window `{s}` is not of the form a..b")))?;
    let a: i32 = a
        .trim()
        .parse()
        .map_err(|_| usage(format!("bad window start `{a}`")))?;
    let b: i32 = b
        .trim()
        .parse()
        .map_err(|_| usage(format!("bad window end `{b}`")))?;
    if a > b {
        return Err(usage(format!("empty window {a}..{b}")));
    }
    Ok((a, b))
}

pub fn parse_tuple(s: &str) -> Result<Vec<i32>, CliError> {
    let s = s.trim().trim_start_matches('(').trim_end_matches(')');
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| usage(format!("bad index `{t}`")))
        })
        .collect()
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn dimension_space(
    case: Case,
    (a, b): (i32, i32),
    particles: usize,
) -> Result<TruncSpace, CliError> {
    if !(0..=1).contains(&a) {
        return Err(usage(format!(
            "the {case} window must start at 0 or 1, got {a}"
        )));
    }
    Ok(TruncSpace::new(case, 1, b, particles)?)
}

fn cmd_rewrite(case: Case, expr: &str, show_steps: bool) -> Result<Report, CliError> {
    let x = parse(expr, case)?;
    let fuel = rewrite::default_fuel(&x);
    let (nf_elem, data, steps) = match case {
        Case::Z => {
            let (nf, steps) = rewrite::normalize_z_traced(&x, fuel, show_steps)?;
            let lambda: Vec<Value> = nf
                .lambda
                .iter()
                .map(|(w, c)| json!({ "word": w.to_string(), "coeff": c }))
                .collect();
            let pairs: Vec<Value> = nf
                .pairs
                .iter()
                .map(|(i, c)| json!({ "pair": i, "coeff": c }))
                .collect();
            (
                nf.to_element(),
                json!({ "unit": nf.unit, "lambda": lambda, "pairs": pairs }),
                steps,
            )
        }
        Case::N => {
            let (nf, steps) = rewrite::normalize_n_traced(&x, fuel, show_steps)?;
            let paths: Vec<Value> = nf
                .paths
                .iter()
                .map(|((mu, nu), c)| json!({ "mu": mu, "nu": nu, "coeff": c }))
                .collect();
            (
                nf.to_element(),
                json!({ "unit": nf.unit, "paths": paths }),
                steps,
            )
        }
        Case::Anti => return Err(usage("rewriting is defined for the z and n cases")),
    };
    let check = match case {
        Case::N => {
            let same = rewrite::equal_n(&x, &nf_elem)?;
            Instance::new(
                "evaluation-agreement",
                same,
                if same {
                    Discrepancy::ExactZero
                } else {
                    Discrepancy::Value(1.0)
                },
            )
        }
        _ => {
            let both = x.try_add(&nf_elem)?;
            let (lo, hi) = (both.min_index().unwrap_or(0), both.max_index().unwrap_or(0));
            match TruncSpace::z(lo, hi, both.max_len() + 1) {
                Ok(space) => Instance::from_identity(
                    "evaluation-agreement",
                    &verify_identity(&space, &x, &nf_elem, None)?,
                ),
                Err(FockError::TooLarge { .. }) => {
                    Instance::new("evaluation-agreement", true, Discrepancy::ExactZero)
                        .with_details(json!({ "skipped": "evaluation space too large" }))
                }
                Err(e) => return Err(e.into()),
            }
        }
    };
    let mut data = data;
    data["normalForm"] = json!(nf_elem.to_string());
    if show_steps {
        data["steps"] = json!(steps.iter().map(|s| s.to_string()).collect::<Vec<_>>());
    }
    Ok(Report::new(
        "rewrite",
        json!({ "case": case, "expr": expr }),
        vec![check],
    )
    .with_data(data))
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    suite: Suite,
    window: &str,
    particles: usize,
    family: Option<&PathBuf>,
    matrix: MatrixArg,
    levels: &[i32],
    phase: Option<&str>,
    max_index: Option<i32>,
) -> Result<Report, CliError> {
    let (a, b) = parse_window(window)?;
    match suite {
        Suite::RelationsZ => Ok(suites::relations_z(&TruncSpace::z(a, b, particles)?)?),
        Suite::Anti => Ok(suites::relations_anti(&dimension_space(
            Case::Anti,
            (a, b),
            particles,
        )?)?),
        Suite::ExelLaca => {
            let (m, space) = match matrix {
                MatrixArg::WmZ => (ElMatrix::WmZ, TruncSpace::z(a, b, particles)?),
                MatrixArg::WmN => (ElMatrix::WmN, dimension_space(Case::N, (a, b), particles)?),
            };
            let fam = match family {
                Some(p) => read_json(p)?,
                None => match matrix {
                    MatrixArg::WmZ => FamilySpec::Subsets {
                        lo: a + 2,
                        hi: b - 2,
                        max_size: 2,
                    },
                    MatrixArg::WmN => FamilySpec::Subsets {
                        lo: 0,
                        hi: b,
                        max_size: 2,
                    },
                },
            };
            let mut report = exel_laca::verify_el_suite(&space, &m, &fam)?;
            if matrix == MatrixArg::WmZ {
                let mut inst = report.instances;
                for j in (a + 3)..=(b - 3) {
                    inst.push(exel_laca::verify_step_identity(&space, j)?);
                }
                report = Report::new(report.suite, report.config, inst);
            }
            Ok(report)
        }
        Suite::RepN => {
            let space = dimension_space(Case::N, (a, b), particles)?;
            let ph = match phase {
                None => Phase::Formal,
                Some(s) => Phase::fixed(parse(s, Case::N)?.unit_coeff().clone())?,
            };
            let mut instances = Vec::new();
            for &n in levels {
                let spec = RepSpec::new(n, ph.clone(), space.clone())?;
                let top = max_index.unwrap_or(n + b).min(n + b);
                for mut inst in spectral::verify_rep(&spec, top)?.instances {
                    inst.id = format!("level {n}: {}", inst.id);
                    instances.push(inst);
                }
            }
            let config = json!({
                "space": space.describe(),
                "levels": levels,
                "phase": phase.unwrap_or("formal"),
            });
            Ok(Report::new("rep-n", config, instances))
        }
    }
}

fn cmd_moments(expr: &str, max_order: usize, case: Case, csv: bool) -> Result<Output, CliError> {
    let x = parse(expr, case)?;
    let moments = (0..=max_order)
        .map(|k| spectral::vacuum_moment(&x, k))
        .collect::<Result<Vec<Coeff>, _>>()?;
    let report = Report::new(
        "moments",
        json!({ "expr": expr, "case": case, "maxOrder": max_order }),
        vec![],
    )
    .with_data(json!({ "moments": moments }));
    if csv {
        let mut s = String::from("order,moment\n");
        for (k, m) in moments.iter().enumerate() {
            s += &format!("{k},{m}\n");
        }
        return Ok(Output::Csv(s, report));
    }
    Ok(Output::Json(report))
}

fn single_word(s: &str) -> Result<Word, CliError> {
    let x = parse(s, Case::Z)?;
    let mut terms = x.terms();
    match (terms.next(), terms.next()) {
        (Some((w, c)), None) if c.is_one() && x.unit_coeff().is_zero() => Ok(w.clone()),
        _ => Err(usage(format!("`{s}` is not a single word"))),
    }
}

fn cmd_cesaro(word: &str, ns: &[usize]) -> Result<Report, CliError> {
    let w = single_word(word)?;
    let mut instances = Vec::new();
    for &n in ns {
        let r = ergodic::check_cesaro_bound(&w, n, None)?;
        let excess = (r.norm - r.bound).max(0.0);
        instances.push(
            Instance::new(
                format!("cesaro({w}, n={n})"),
                r.pass,
                Discrepancy::Value(excess),
            )
            .with_details(serde_json::to_value(&r).expect("report serializes")),
        );
    }
    Ok(Report::new(
        "cesaro",
        json!({ "word": word, "n": ns }),
        instances,
    ))
}

fn cmd_limit(ns: &[usize], vector: &str, csv: bool) -> Result<Output, CliError> {
    let xi = parse_tuple(vector)?;
    let mut rows = Vec::new();
    let mut instances = Vec::new();
    for &n in ns {
        let r = spectral::limit_residual(n, &xi)?;
        let mut pass = r.residual <= r.bound + 1e-12;
        if xi.is_empty() {
            pass &= (r.residual - 1.0 / ((2 * n + 1) as f64).sqrt()).abs() <= 1e-12;
        }
        instances.push(
            Instance::new(
                format!("residual(N={n})"),
                pass,
                Discrepancy::Value((r.residual - r.bound).max(0.0)),
            )
            .with_details(serde_json::to_value(&r).expect("report serializes")),
        );
        rows.push(r);
    }
    let mut sorted: Vec<_> = rows.iter().map(|r| (r.n, r.residual)).collect();
    sorted.sort_by_key(|r| r.0);
    if sorted.len() > 1 {
        let dec = sorted.windows(2).all(|w| w[1].1 < w[0].1);
        instances.push(Instance::new(
            "strictly-decreasing",
            dec,
            Discrepancy::ExactZero,
        ));
    }
    let report = Report::new("limit", json!({ "N": ns, "vector": xi }), instances);
    if csv {
        let mut s = String::from("N,residual,bound\n");
        for r in &rows {
            s += &format!("{},{},{}\n", r.n, r.residual, r.bound);
        }
        return Ok(Output::Csv(s, report));
    }
    Ok(Output::Json(report))
}

fn cmd_states(expr: &str, ts: &[String]) -> Result<Report, CliError> {
    let x = parse(expr, Case::Z)?;
    let shifted = x.shift(1)?;
    let mut instances = Vec::new();
    let mut values = Vec::new();
    for t in ts {
        let r: Rational = t.parse().map_err(usage)?;
        let p = StateParam::new(r)?;
        let v = ergodic::omega_t(&x, &p)?;
        let w = ergodic::omega_t(&shifted, &p)?;
        let same = v == w;
        let disc = if same {
            Discrepancy::ExactZero
        } else {
            Discrepancy::Value((&v - &w).abs())
        };
        instances.push(Instance::new(
            format!("shift-invariance(t={})", p.value()),
            same,
            disc,
        ));
        values.push(json!({ "t": p.value(), "omega": v }));
    }
    let fixed = match ergodic::fixed_point_check(&x)? {
        FixedPoint::FixedScalar(c) => json!({ "fixedScalar": c }),
        FixedPoint::NotFixed { shift, discrepancy } => {
            json!({ "notFixed": { "shift": shift, "discrepancy": discrepancy } })
        }
    };
    Ok(
        Report::new("states", json!({ "expr": expr, "t": ts }), instances)
            .with_data(json!({ "values": values, "fixedPoint": fixed })),
    )
}

fn cmd_certificate(expr: &str, case: Case) -> Result<Report, CliError> {
    let x = parse(expr, case)?;
    let c = ergodic::vacuum_certificate(&x)?;
    let quarter = Coeff::ratio(1, 4);
    let pass = match (c.value_sq.exact_real(), quarter.exact_real()) {
        (Some(v), Some(q)) => v >= q,
        _ => c.value >= 0.5 - 1e-12,
    };
    let disc = Discrepancy::Value((0.5 - c.value).max(0.0));
    let inst = Instance::new("at-least-one-half", pass, disc)
        .with_details(serde_json::to_value(&c).expect("serializes"));
    Ok(Report::new(
        "certificate",
        json!({ "expr": expr, "case": case }),
        vec![inst],
    ))
}

/// `case:window:particles:expr;expr;...`
pub fn parse_gens(spec: &str) -> Result<(TruncSpace, Vec<Element>), CliError> {
    let mut parts = spec.splitn(4, ':');
    let (Some(case), Some(window), Some(particles), Some(exprs)) =
        (parts.next(), parts.next(), parts.next(), parts.next())
    else {
        return Err(usage(format!(
            "generator spec `{spec}` is not case:window:particles:exprs"
        )));
    };
    let case: Case = case.trim().parse().map_err(usage)?;
    let particles: usize = particles
        .trim()
        .parse()
        .map_err(|_| usage(format!("bad particle count `{particles}`")))?;
    let space = match case {
        Case::Z => {
            let (a, b) = parse_window(window)?;
            TruncSpace::z(a, b, particles)?
        }
        _ => {
            let d: i32 = window
                .trim()
                .parse()
                .map_err(|_| usage(format!("bad dimension `{window}`")))?;
            TruncSpace::new(case, 1, d, particles)?
        }
    };
    let elems = exprs
        .split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse(s, case))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((space, elems))
}

fn cmd_commutant(gens: &str, expect: Option<usize>) -> Result<Report, CliError> {
    let (space, elems) = parse_gens(gens)?;
    let mats = elems
        .iter()
        .map(|e| evaluate(&space, e))
        .collect::<Result<Vec<_>, _>>()?;
    let (dim, _) = spectral::commutant_dim(&mats)?;
    let mut instances = Vec::new();
    if let Some(k) = expect {
        let ok = k == dim;
        instances.push(Instance::new(
            format!("commutant-dimension={k}"),
            ok,
            if ok {
                Discrepancy::ExactZero
            } else {
                Discrepancy::Value((dim as f64 - k as f64).abs())
            },
        ));
    }
    Ok(Report::new(
        "commutant",
        json!({ "gens": gens, "space": space.describe() }),
        instances,
    )
    .with_data(json!({ "dimension": dim, "matrixSize": space.dim() })))
}

fn cmd_decompose(path: &PathBuf) -> Result<Report, CliError> {
    let spec: SyntheticSum = read_json(path)?;
    let gens = spec.build()?;
    let rec = spectral::decompose(&gens)?;
    // constructed multiset, merging blocks with equal level and phase
    let mut want: Vec<(i32, num_complex::Complex64, usize)> = Vec::new();
    for b in &spec.blocks {
        let z = b.phase.to_coeff()?.to_c64();
        match want
            .iter_mut()
            .find(|w| w.0 == b.level && (w.1 - z).norm() < spectral::CLUSTER_TOL)
        {
            Some(w) => w.2 += b.multiplicity,
            None => want.push((b.level, z, b.multiplicity)),
        }
    }
    let mut worst: f64 = 0.0;
    let mut matched = want.len() == rec.components.len();
    for w in &want {
        let hit = rec.components.iter().find(|c| {
            c.level as i32 == w.0 && (c.phase.to_c64() - w.1).norm() < spectral::CLUSTER_TOL
        });
        match hit {
            Some(c) if c.multiplicity == w.2 => worst = worst.max((c.phase.to_c64() - w.1).norm()),
            _ => matched = false,
        }
    }
    let pass = matched && worst <= 1e-9 && rec.residual_dim == spec.zero_block;
    let inst = Instance::new("recovered-components", pass, Discrepancy::Value(worst));
    Ok(Report::new("reps-decompose", json!({ "spec": spec }), vec![inst]).with_data(to_json(&rec)))
}

pub fn execute(cli: &Cli) -> Result<Output, CliError> {
    let json = |r: Result<Report, CliError>| r.map(Output::Json);
    match &cli.command {
        Command::Rewrite {
            case,
            expr,
            show_steps,
        } => json(cmd_rewrite((*case).into(), expr, *show_steps)),
        Command::Verify {
            suite,
            window,
            particles,
            family,
            matrix,
            level,
            phase,
            max_index,
        } => json(cmd_verify(
            *suite,
            window,
            *particles,
            family.as_ref(),
            *matrix,
            level,
            phase.as_deref(),
            *max_index,
        )),
        Command::Moments {
            expr,
            max_order,
            case,
            csv,
        } => cmd_moments(expr, *max_order, (*case).into(), *csv),
        Command::Cesaro { word, n } => json(cmd_cesaro(word, n)),
        Command::Limit { n, vector, csv } => cmd_limit(n, vector, *csv),
        Command::States { expr, t } => json(cmd_states(expr, t)),
        Command::Certificate { expr, case } => json(cmd_certificate(expr, (*case).into())),
        Command::Commutant { gens, expect } => json(cmd_commutant(gens, *expect)),
        Command::Reps {
            command: RepsCommand::Decompose { spec },
        } => json(cmd_decompose(spec)),
    }
}

/// Parses arguments, runs, writes the output and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let start = Instant::now();
    let mut out = match execute(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("{e}");
            return e.exit_code();
        }
    };
    if cli.timing {
        let ms = start.elapsed().as_millis() as u64;
        match &mut out {
            Output::Json(r) | Output::Csv(_, r) => r.runtime_millis = Some(ms),
        }
    }
    let text = match &out {
        Output::Json(r) => r.to_json() + "\n",
        Output::Csv(s, _) => s.clone(),
    };
    match &cli.out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, &text) {
                eprintln!("error: {}: {e}", p.display());
                return 2;
            }
        }
        None => print!("{text}"),
    }
    if out.report().all_pass() {
        0
    } else {
        1
    }
}
