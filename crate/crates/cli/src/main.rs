//! `ecsr` — solve scenarios, compute standards bundles, play the contract
//! game, verify the claim catalog over parameter grids, and sweep
//! parameters to CSV.
//!
//! Exit codes: 0 success, 2 usage or validation error, 3 numerical
//! failure. `ECSR_THREADS` caps the worker threads used by grid scans.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use ecsr_core::closed_form::{solve_scenario, ScenarioKey, SolveError};
use ecsr_core::game::{self, Participation, SpneOutcome};
use ecsr_core::model::{CertProfile, Equilibrium, ModelParams, Regime};
use ecsr_core::oracle::{nash_fixed_point, OracleConfig};
use ecsr_core::standards::{Mode, StandardsBundle};
use ecsr_core::verifier::{full_report_for, ClaimId, ParamGrid, VerifyConfig};

use output::{csv_field, csv_num, sig12, to_json_string};

#[derive(Parser)]
#[command(name = "ecsr", version, about = "Equilibrium engine for a certified-ECSR differentiated duopoly")]
struct Cli {
    #[command(subcommand)]
    command: Commands,
}

#[derive(Subcommand)]
enum Commands {
    /// Solve one market scenario and print the equilibrium as JSON.
    Solve(SolveArgs),
    /// Print the full certification-standards bundle for one economy.
    Standards(StandardsArgs),
    /// Build the price/quantity contract game and report its equilibria.
    Game(GameArgs),
    /// Scan a parameter grid and report each claim's validity.
    Verify(VerifyArgs),
    /// Sweep a parameter grid to CSV (one row per point).
    Sweep(SweepArgs),
}

#[derive(Args, Clone)]
struct ParamArgs {
    /// Demand intercept.
    #[arg(long = "A", default_value_t = 1.0)]
    a: f64,
    /// Consumer preference weight for certified spending, in (0,1).
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    /// Product substitutability, in (0,1).
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    /// Marginal environmental damage, > 0.
    #[arg(long, default_value_t = 1.0)]
    d: f64,
}

impl ParamArgs {
    fn build(&self) -> Result<ModelParams, CliError> {
        ModelParams::new(self.a, self.alpha, self.gamma, self.d)
            .map_err(|e| CliError::Usage(e.to_string()))
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Contract regime: PP, QQ, PQ or QP.
    #[arg(long, value_parser = Regime::from_str, required_unless_present = "scenario")]
    regime: Option<Regime>,
    /// Certification standard.
    #[arg(long, default_value_t = 0.0)]
    s: f64,
    /// Firm 1 certified (0 or 1).
    #[arg(long, default_value_t = 0)]
    e1: u8,
    /// Firm 2 certified (0 or 1).
    #[arg(long, default_value_t = 0)]
    e2: u8,
    /// Cross-check the closed form against the best-response fixed point.
    #[arg(long)]
    oracle: bool,
    /// Iteration cap for the fixed point.
    #[arg(long, default_value_t = 10_000)]
    max_iter: usize,
    /// Read params/regime/s from a scenario JSON file instead of flags.
    #[arg(long, conflicts_with_all = ["regime", "s", "a", "alpha", "gamma", "d"])]
    scenario: Option<PathBuf>,
}

#[derive(Args)]
struct StandardsArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Which evaluation mode to report: paper_literal, derived or both.
    #[arg(long, default_value = "both")]
    mode: String,
    /// Read params/mode from a scenario JSON file instead of flags.
    #[arg(long, conflicts_with_all = ["mode", "a", "alpha", "gamma", "d"])]
    scenario: Option<PathBuf>,
}

#[derive(Args)]
struct GameArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Uniform certification standard.
    #[arg(long, default_value_t = 0.0)]
    s: f64,
    /// Cell pricing: literal (all certified) or aware (per-cell stage).
    #[arg(long, default_value = "literal")]
    participation: String,
    /// Indifference tolerance for equilibrium detection.
    #[arg(long, default_value_t = 1e-9)]
    tie_tolerance: f64,
    /// Read params/s/participation from a scenario JSON file.
    #[arg(long, conflicts_with_all = ["s", "participation", "a", "alpha", "gamma", "d"])]
    scenario: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Claims to verify: `all` or a comma-separated id list.
    #[arg(long, default_value = "all")]
    claims: String,
    /// Mode(s) to verify under: paper_literal, derived or both.
    #[arg(long, default_value = "both")]
    mode: String,
    /// Demand intercept shared by all grid points.
    #[arg(long = "A", default_value_t = 1.0)]
    a: f64,
    /// Alpha range `start:end:step` (or one value); default grid if absent.
    #[arg(long)]
    alpha: Option<String>,
    /// Gamma range `start:end:step` (or one value); default grid if absent.
    #[arg(long)]
    gamma: Option<String>,
    /// Damage range `start:end:step` (or one value); default grid if absent.
    #[arg(long)]
    d: Option<String>,
    /// Cap on recorded counterexamples per report.
    #[arg(long, default_value_t = 10)]
    max_counterexamples: usize,
}

#[derive(Args)]
struct SweepArgs {
    /// Demand intercept shared by all grid points.
    #[arg(long = "A", default_value_t = 1.0)]
    a: f64,
    /// Alpha range `start:end:step` (or one value); default grid if absent.
    #[arg(long)]
    alpha: Option<String>,
    /// Gamma range `start:end:step` (or one value); default grid if absent.
    #[arg(long)]
    gamma: Option<String>,
    /// Damage range `start:end:step` (or one value); default grid if absent.
    #[arg(long)]
    d: Option<String>,
}

/// Scenario file schema: shared parameter block plus the optional
/// per-command fields. Unknown fields are rejected.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    params: ModelParams,
    regime: Option<Regime>,
    s: Option<f64>,
    mode: Option<String>,
    participation: Option<String>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Numeric(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Numeric(m) => f.write_str(m),
        }
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::ClosedForm(inner) => CliError::Usage(inner.to_string()),
            SolveError::Oracle(inner) => CliError::Numeric(inner.to_string()),
        }
    }
}

impl From<ecsr_core::standards::StandardsError> for CliError {
    fn from(e: ecsr_core::standards::StandardsError) -> Self {
        CliError::Numeric(e.to_string())
    }
}

impl From<ecsr_core::verifier::VerifyError> for CliError {
    fn from(e: ecsr_core::verifier::VerifyError) -> Self {
        CliError::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ CliError::Usage(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e @ CliError::Numeric(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}

fn init_threads() -> Result<(), String> {
    match std::env::var("ECSR_THREADS") {
        Err(_) => Ok(()),
        Ok(raw) => {
            let n: usize = raw
                .parse()
                .ok()
                .filter(|&n| n >= 1)
                .ok_or_else(|| format!("ECSR_THREADS must be a positive integer, got {raw:?}"))?;
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| e.to_string())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Commands::Solve(args) => cmd_solve(args),
        Commands::Standards(args) => cmd_standards(args),
        Commands::Game(args) => cmd_game(args),
        Commands::Verify(args) => cmd_verify(args),
        Commands::Sweep(args) => cmd_sweep(args),
    }
}

/// Write a line to stdout; a closed pipe ends the command quietly.
fn emit(text: &str) -> Result<(), CliError> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{text}").and_then(|()| out.flush()) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        Err(e) => Err(CliError::Usage(format!("cannot write output: {e}"))),
    }
}

fn load_scenario(path: &PathBuf) -> Result<ScenarioFile, CliError> {
    let raw = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read scenario {}: {e}", path.display())))?;
    serde_json::from_str(&raw)
        .map_err(|e| CliError::Usage(format!("invalid scenario {}: {e}", path.display())))
}

#[derive(Serialize)]
struct SolveOutput {
    scenario: ScenarioKey,
    params: ModelParams,
    method: &'static str,
    equilibrium: Equilibrium,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_check: Option<OracleCheck>,
}

#[derive(Serialize)]
struct OracleCheck {
    equilibrium: Equilibrium,
    max_field_deviation: f64,
}

fn cmd_solve(args: SolveArgs) -> Result<(), CliError> {
    let (params, regime, s) = match &args.scenario {
        Some(path) => {
            let sc = load_scenario(path)?;
            let regime = sc
                .regime
                .ok_or_else(|| CliError::Usage("scenario is missing `regime`".into()))?;
            (sc.params, regime, sc.s.unwrap_or(0.0))
        }
        None => (args.params.build()?, args.regime.expect("required by clap"), args.s),
    };
    let flag = |v: u8, name: &str| match v {
        0 => Ok(false),
        1 => Ok(true),
        other => Err(CliError::Usage(format!("--{name} must be 0 or 1, got {other}"))),
    };
    let cert = CertProfile::new(flag(args.e1, "e1")?, flag(args.e2, "e2")?, s)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let cfg = OracleConfig { max_iterations: args.max_iter, ..OracleConfig::default() };

    let equilibrium = solve_scenario(regime, &cert, &params, &cfg)?;
    let method = if cert.symmetric() { "closed_form" } else { "oracle" };
    let oracle_check = if args.oracle {
        let fixed = nash_fixed_point(regime, &cert, &params, &cfg)
            .map_err(|e| CliError::Numeric(e.to_string()))?;
        Some(OracleCheck {
            max_field_deviation: equilibrium.max_abs_diff(&fixed),
            equilibrium: fixed,
        })
    } else {
        None
    };

    emit(&to_json_string(SolveOutput {
        scenario: ScenarioKey::new(regime, &cert),
        params,
        method,
        equilibrium,
        oracle_check,
    }))
}

fn parse_modes(raw: &str) -> Result<Vec<Mode>, CliError> {
    match raw {
        "both" => Ok(vec![Mode::PaperLiteral, Mode::Derived]),
        other => Ok(vec![Mode::from_str(other).map_err(CliError::Usage)?]),
    }
}

fn cmd_standards(args: StandardsArgs) -> Result<(), CliError> {
    let (params, modes) = match &args.scenario {
        Some(path) => {
            let sc = load_scenario(path)?;
            let modes = parse_modes(sc.mode.as_deref().unwrap_or("both"))?;
            (sc.params, modes)
        }
        None => (args.params.build()?, parse_modes(&args.mode)?),
    };
    let bundle = StandardsBundle::compute(&params)?;

    let mut value = serde_json::to_value(&bundle).expect("serializable bundle");
    if modes.len() == 1 {
        let keep = modes[0].to_string();
        let drop = if modes[0] == Mode::PaperLiteral { "derived" } else { "paper_literal" };
        for key in ["u_pp", "u_qq", "u_pq1", "u_pq2", "eq_pp", "eq_qq", "eq_pq", "rank_equilibrium"]
        {
            if let Some(pair) = value.get_mut(key).and_then(|v| v.as_object_mut()) {
                pair.remove(drop);
                debug_assert!(pair.contains_key(&keep));
            }
        }
    }
    output::round_numbers(&mut value);
    emit(&serde_json::to_string_pretty(&value).expect("printable output"))
}

fn parse_participation(raw: &str) -> Result<Participation, CliError> {
    match raw {
        "literal" => Ok(Participation::Literal),
        "aware" => Ok(Participation::Aware),
        other => Err(CliError::Usage(format!("unknown participation: {other}"))),
    }
}

fn cmd_game(args: GameArgs) -> Result<(), CliError> {
    let (params, s, participation) = match &args.scenario {
        Some(path) => {
            let sc = load_scenario(path)?;
            let participation = match sc.participation.as_deref() {
                Some(p) => parse_participation(p)?,
                None => Participation::Literal,
            };
            (sc.params, sc.s.unwrap_or(0.0), participation)
        }
        None => (args.params.build()?, args.s, parse_participation(&args.participation)?),
    };
    if !(s.is_finite() && s >= 0.0) {
        return Err(CliError::Usage(format!("certification standard out of [0, inf): {s}")));
    }
    let outcome: SpneOutcome = game::spne_under_uniform_standard(
        s,
        &params,
        participation,
        &OracleConfig::default(),
        args.tie_tolerance,
    )?;
    emit(&to_json_string(&outcome))
}

fn parse_range(raw: &str, name: &str) -> Result<Vec<f64>, CliError> {
    let bad = |msg: String| CliError::Usage(format!("--{name} {raw:?}: {msg}"));
    let parts: Vec<&str> = raw.split(':').collect();
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.parse::<f64>().map_err(|e| bad(e.to_string())))
        .collect::<Result<_, _>>()?;
    match nums.as_slice() {
        [v] if v.is_finite() => Ok(vec![*v]),
        [start, end, step] => {
            if !(start.is_finite() && end.is_finite() && *step > 0.0) {
                return Err(bad("expected finite start:end with step > 0".into()));
            }
            if end < start {
                return Err(bad("end is below start".into()));
            }
            let n = ((end - start) / step + 1e-9).floor() as usize + 1;
            if n > 200_000 {
                return Err(bad(format!("{n} points is beyond the 200000-point cap")));
            }
            Ok((0..n).map(|k| start + k as f64 * step).collect())
        }
        _ => Err(bad("expected a single value or start:end:step".into())),
    }
}

fn build_grid(
    a: f64,
    alpha: &Option<String>,
    gamma: &Option<String>,
    d: &Option<String>,
) -> Result<ParamGrid, CliError> {
    let defaults = ParamGrid::default();
    Ok(ParamGrid {
        a,
        alphas: match alpha {
            Some(raw) => parse_range(raw, "alpha")?,
            None => defaults.alphas,
        },
        gammas: match gamma {
            Some(raw) => parse_range(raw, "gamma")?,
            None => defaults.gammas,
        },
        ds: match d {
            Some(raw) => parse_range(raw, "d")?,
            None => defaults.ds,
        },
    })
}

#[derive(Serialize)]
struct VerifyOutput<'a> {
    grid: &'a ParamGrid,
    modes: &'a [Mode],
    claims: Vec<ClaimEntry>,
    reports: Vec<ecsr_core::verifier::ClaimReport>,
}

#[derive(Serialize)]
struct ClaimEntry {
    id: &'static str,
    description: &'static str,
}

fn cmd_verify(args: VerifyArgs) -> Result<(), CliError> {
    let claims: Vec<ClaimId> = match args.claims.as_str() {
        "all" => ClaimId::ALL.to_vec(),
        list => list
            .split(',')
            .map(|id| ClaimId::from_str(id.trim()).map_err(CliError::Usage))
            .collect::<Result<_, _>>()?,
    };
    let modes = parse_modes(&args.mode)?;
    let grid = build_grid(args.a, &args.alpha, &args.gamma, &args.d)?;
    let cfg = VerifyConfig {
        max_counterexamples: args.max_counterexamples,
        ..VerifyConfig::default()
    };

    let reports = full_report_for(&claims, &grid, &modes, &cfg)?;
    let out = VerifyOutput {
        grid: &grid,
        modes: &modes,
        claims: claims
            .iter()
            .map(|c| ClaimEntry { id: c.id(), description: c.describe() })
            .collect(),
        reports,
    };
    emit(&to_json_string(&out))
}

const SWEEP_COLUMNS: &[&str] = &[
    "alpha",
    "gamma",
    "d",
    "A",
    "feas_pp",
    "feas_qq",
    "feas_pq1",
    "feas_pq2",
    "u_pp_literal",
    "u_pp_derived",
    "u_qq_literal",
    "u_qq_derived",
    "u_pq1_literal",
    "u_pq1_derived",
    "u_pq2_literal",
    "u_pq2_derived",
    "opt_pp",
    "opt_qq",
    "opt_pq",
    "d_min_pp",
    "d_min_qq",
    "d_min_pq",
    "eq_pp_literal",
    "eq_qq_literal",
    "eq_pq1_literal",
    "eq_pq2_literal",
    "eq_pp_derived",
    "eq_qq_derived",
    "eq_pq1_derived",
    "eq_pq2_derived",
    "rank_optimal_ok",
    "rank_thresholds_literal_ok",
    "rank_thresholds_derived_ok",
    "error",
];

fn sweep_row(params: &ModelParams) -> Vec<String> {
    use ecsr_core::standards::CertifierStandard;
    let head = vec![
        format!("{}", sig12(params.alpha())),
        format!("{}", sig12(params.gamma())),
        format!("{}", sig12(params.d())),
        format!("{}", sig12(params.a())),
    ];

    let bundle = match StandardsBundle::compute(params) {
        Ok(b) => b,
        Err(e) => {
            let mut row = head;
            row.extend(std::iter::repeat_n(String::new(), SWEEP_COLUMNS.len() - 5));
            row.push(csv_field(&e.to_string()));
            return row;
        }
    };

    let bound_value = |eq: &Option<CertifierStandard>| match eq {
        Some(CertifierStandard::Bound { value, .. }) => Some(*value),
        _ => None,
    };
    let candidate_values = |eq: &Option<CertifierStandard>| match eq {
        Some(CertifierStandard::Candidates { at_firm1_threshold, at_firm2_threshold }) => {
            (Some(at_firm1_threshold.value), Some(at_firm2_threshold.value))
        }
        _ => (None, None),
    };
    let (eq_pq1_lit, eq_pq2_lit) = candidate_values(&bundle.eq_pq.paper_literal);
    let (eq_pq1_der, eq_pq2_der) = candidate_values(&bundle.eq_pq.derived);

    let mut row = head;
    row.extend([
        csv_num(Some(bundle.feas_pp)),
        csv_num(Some(bundle.feas_qq)),
        csv_num(Some(bundle.feas_pq1)),
        csv_num(Some(bundle.feas_pq2)),
        csv_num(Some(bundle.u_pp.paper_literal)),
        csv_num(Some(bundle.u_pp.derived)),
        csv_num(Some(bundle.u_qq.paper_literal)),
        csv_num(Some(bundle.u_qq.derived)),
        csv_num(Some(bundle.u_pq1.paper_literal)),
        csv_num(Some(bundle.u_pq1.derived)),
        csv_num(Some(bundle.u_pq2.paper_literal)),
        csv_num(Some(bundle.u_pq2.derived)),
        csv_num(bundle.opt_pp),
        csv_num(bundle.opt_qq),
        csv_num(bundle.opt_pq),
        csv_num(Some(bundle.d_min_pp)),
        csv_num(Some(bundle.d_min_qq)),
        csv_num(Some(bundle.d_min_pq)),
        csv_num(bound_value(&bundle.eq_pp.paper_literal)),
        csv_num(bound_value(&bundle.eq_qq.paper_literal)),
        csv_num(eq_pq1_lit),
        csv_num(eq_pq2_lit),
        csv_num(bound_value(&bundle.eq_pp.derived)),
        csv_num(bound_value(&bundle.eq_qq.derived)),
        csv_num(eq_pq1_der),
        csv_num(eq_pq2_der),
        match &bundle.rank_optimal {
            Some(r) => r.matches_expected.to_string(),
            None => String::new(),
        },
        bundle.rank_equilibrium.paper_literal.matches_expected.to_string(),
        bundle.rank_equilibrium.derived.matches_expected.to_string(),
        csv_field(&bundle.warnings.join("; ")),
    ]);
    row
}

fn cmd_sweep(args: SweepArgs) -> Result<(), CliError> {
    let grid = build_grid(args.a, &args.alpha, &args.gamma, &args.d)?;
    let points = grid.points()?;

    let mut out = String::new();
    out.push_str(&SWEEP_COLUMNS.join(","));
    out.push('\n');
    for params in &points {
        out.push_str(&sweep_row(params).join(","));
        out.push('\n');
    }
    emit(out.trim_end())
}
