//! `qsg`: reproduces the efficiency/uncertainty curves, the motion table and
//! the feasibility windows, and probes single search scenarios.
//!
//! Data goes to stdout (or `--out`), the run manifest to stderr.

// `!(a > b)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod output;

use std::fmt;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use output::{csv, fmt_num, Cell, RunManifest};
use qsg_core::analysis::{self, EfficiencyReport, GeodesicityReport};
use qsg_core::oracle::{self, IntegratorSpec};
use qsg_core::quadrature::linspace;
use qsg_core::search::{self, SchemeKind, SearchConfig};
use qsg_core::Error;

const STEPS_ENV: &str = "QSG_DEFAULT_STEPS";
/// Allowed distance between the integrated and closed-form terminal states.
const ORACLE_TOL: f64 = 1e-8;

#[derive(Parser)]
#[command(name = "qsg", version, about = "Geometry of analog quantum search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Scheme {
    Fg,
    Mfg,
}

impl From<Scheme> for SchemeKind {
    fn from(s: Scheme) -> Self {
        match s {
            Scheme::Fg => SchemeKind::Fg,
            Scheme::Mfg => SchemeKind::Mfg,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Efficiency and uncertainty versus overlap for several energy ratios.
    Fig1 {
        #[arg(long, value_delimiter = ',', default_values_t = vec![1.0, 1.1, 2.0])]
        gammas: Vec<f64>,
        #[arg(long, default_value_t = 0.01)]
        x_min: f64,
        #[arg(long, default_value_t = 0.99)]
        x_max: f64,
        #[arg(long, default_value_t = 99)]
        points: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<String>,
    },
    /// Type of motion, uncertainty and efficiency of both schemes.
    Table1 {
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<String>,
    },
    /// Full JSON report for one scenario.
    Probe {
        #[arg(value_enum)]
        scheme: Scheme,
        #[arg(long)]
        x: f64,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        /// Include the sampled trajectory in the report.
        #[arg(long)]
        emit_trajectory: bool,
        #[arg(long)]
        out: Option<String>,
    },
    /// Feasibility windows of the MFG geodesic condition.
    AppendixB {
        #[arg(long, default_value_t = 10)]
        n_max: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<String>,
    },
}

enum Failure {
    Usage(String),
    Inconsistent(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "error: {m}"),
            Failure::Inconsistent(m) => write!(f, "consistency failure: {m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::Precondition { .. } | Error::StepCountTooLow(_) => Failure::Usage(e.to_string()),
            other => Failure::Inconsistent(other.to_string()),
        }
    }
}

struct Output {
    command: &'static str,
    params: serde_json::Value,
    data: String,
    out: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fig1 { gammas, x_min, x_max, points, format, out } => fig1(gammas, x_min, x_max, points, format, out),
        Command::Table1 { format, out } => table1(format, out),
        Command::Probe { scheme, x, gamma, emit_trajectory, out } => probe(scheme, x, gamma, emit_trajectory, out),
        Command::AppendixB { n_max, format, out } => appendix_b(n_max, format, out),
    };
    let (output, failure) = match result {
        Ok(o) => (Some(o), None),
        Err(f) => (f.partial, Some(f.failure)),
    };
    if let Some(o) = output {
        if let Err(e) = emit(&o) {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match failure {
        None => ExitCode::SUCCESS,
        Some(f) => {
            eprintln!("{f}");
            ExitCode::from(match f {
                Failure::Usage(_) => 2,
                Failure::Inconsistent(_) => 3,
            })
        }
    }
}

fn emit(o: &Output) -> std::io::Result<()> {
    match &o.out {
        Some(path) => std::fs::write(path, &o.data)?,
        None => print!("{}", o.data),
    }
    let manifest = RunManifest::new(o.command, o.params.clone(), &o.data);
    eprintln!("{}", serde_json::to_string(&manifest).expect("manifest serializes"));
    Ok(())
}

/// A failed command may still carry data worth writing (e.g. an inconsistent table).
struct Failed {
    partial: Option<Output>,
    failure: Failure,
}

type CmdResult = Result<Output, Box<Failed>>;

fn failed(partial: Option<Output>, failure: Failure) -> Box<Failed> {
    Box::new(Failed { partial, failure })
}

fn usage(msg: impl Into<String>) -> Box<Failed> {
    failed(None, Failure::Usage(msg.into()))
}

fn core(e: Error) -> Box<Failed> {
    failed(None, e.into())
}

fn integrator_spec() -> Result<IntegratorSpec, Box<Failed>> {
    match std::env::var(STEPS_ENV) {
        Err(_) => Ok(IntegratorSpec::default()),
        Ok(raw) => {
            let steps: usize =
                raw.trim().parse().map_err(|_| usage(format!("{STEPS_ENV}={raw:?} is not a step count")))?;
            IntegratorSpec::new(steps).map_err(core)
        }
    }
}

fn fig1(gammas: Vec<f64>, x_min: f64, x_max: f64, points: usize, format: Format, out: Option<String>) -> CmdResult {
    if gammas.is_empty() || gammas.iter().any(|g| !(g.is_finite() && *g >= 1.0)) {
        return Err(usage("--gammas must be a non-empty list of values >= 1"));
    }
    if points == 0 || !(x_min > 0.0 && x_max < 1.0 && x_min <= x_max) || (points > 1 && x_min == x_max) {
        return Err(usage("grid must satisfy 0 < x-min < x-max < 1 with points >= 1"));
    }
    let xs = linspace(x_min, x_max, points);
    let rows = analysis::sweep(&gammas, &xs, Some(analysis::DEFAULT_POINTS)).map_err(core)?;
    let data = match format {
        Format::Json => output::json(&rows),
        Format::Csv => csv(
            &["gamma", "x", "eta_closed", "delta_over_h_closed", "eta_numeric", "delta_over_h_numeric"],
            &rows
                .iter()
                .map(|r| {
                    vec![
                        r.gamma.into(),
                        r.x.into(),
                        r.eta_closed.into(),
                        r.delta_over_h_closed.into(),
                        r.eta_numeric.into(),
                        r.delta_over_h_numeric.into(),
                    ]
                })
                .collect::<Vec<_>>(),
        ),
    };
    Ok(Output {
        command: "fig1",
        params: json!({ "gammas": gammas, "x_min": x_min, "x_max": x_max, "points": points, "format": format }),
        data,
        out,
    })
}

fn table1(format: Format, out: Option<String>) -> CmdResult {
    let rows = analysis::table_one().map_err(core)?;
    let data = match format {
        Format::Json => output::json(&rows),
        Format::Csv => csv(
            &[
                "scheme",
                "x",
                "gamma",
                "motion",
                "residual_sup",
                "uncertainty",
                "delta_over_h_closed",
                "delta_over_h_numeric",
                "efficiency",
                "eta_closed",
                "eta_numeric",
                "consistent",
            ],
            &rows
                .iter()
                .map(|r| {
                    vec![
                        Cell::Text(r.scheme.label().into()),
                        r.x.into(),
                        r.gamma.into(),
                        Cell::Text(r.motion.label().into()),
                        r.residual_sup.into(),
                        Cell::Text(r.uncertainty.into()),
                        r.delta_over_h_closed.into(),
                        r.delta_over_h_numeric.into(),
                        Cell::Text(r.efficiency.into()),
                        r.eta_closed.into(),
                        r.eta_numeric.into(),
                        Cell::Text(r.consistent.to_string()),
                    ]
                })
                .collect::<Vec<_>>(),
        ),
    };
    let output = Output { command: "table1", params: json!({ "format": format }), data, out };
    match rows.iter().find(|r| !r.consistent) {
        Some(bad) => Err(failed(
            Some(output),
            Failure::Inconsistent(format!("{} row contradicts the expected table entries", bad.scheme.label())),
        )),
        None => Ok(output),
    }
}

#[derive(Serialize)]
struct ClosedForm {
    eta: f64,
    delta_over_h: f64,
}

#[derive(Serialize)]
struct OracleCheck {
    steps: usize,
    /// Largest component gap between the integrated and closed-form state at `t*`,
    /// after removing the global phase.
    terminal_error: f64,
}

#[derive(Serialize)]
struct Sample {
    t: f64,
    w_re: f64,
    w_im: f64,
    r_re: f64,
    r_im: f64,
    delta_e: f64,
}

#[derive(Serialize)]
struct ProbeReport {
    scheme: SchemeKind,
    x: f64,
    gamma: f64,
    t_star: f64,
    max_probability: f64,
    closed_form: ClosedForm,
    efficiency: EfficiencyReport,
    geodesicity: GeodesicityReport,
    oracle: OracleCheck,
    #[serde(skip_serializing_if = "Option::is_none")]
    trajectory: Option<Vec<Sample>>,
}

fn probe(scheme: Scheme, x: f64, gamma: f64, emit_trajectory: bool, out: Option<String>) -> CmdResult {
    let kind = SchemeKind::from(scheme);
    let cfg = SearchConfig::new(x, gamma).map_err(core)?;
    let spec = integrator_spec()?;
    let traj = analysis::geometric_trajectory(kind, &cfg, analysis::DEFAULT_POINTS).map_err(core)?;
    let efficiency = analysis::efficiency_from_definitions(&traj).map_err(core)?;
    let geodesicity = analysis::geodesicity_test(kind, &cfg).map_err(core)?;
    let closed_cfg = match kind {
        SchemeKind::Fg => cfg.fg_slice(),
        SchemeKind::Mfg => cfg,
    };
    let t_star = search::optimal_time(kind, &cfg);
    let h = search::hamiltonian(kind, &cfg);
    let integrated = oracle::rk4_terminal(&h, traj.first(), t_star, spec, cfg.hbar());
    let terminal_error = integrated.phase_fixed().ket().max_abs_diff(&traj.last().phase_fixed().ket());

    let trajectory = emit_trajectory.then(|| {
        let spread = traj.dispersions().unwrap_or_default();
        traj.times()
            .iter()
            .zip(traj.states())
            .zip(spread)
            .map(|((&t, s), delta_e)| Sample {
                t,
                w_re: s.w().re,
                w_im: s.w().im,
                r_re: s.r().re,
                r_im: s.r().im,
                delta_e,
            })
            .collect()
    });
    let report = ProbeReport {
        scheme: kind,
        x,
        gamma: geodesicity.gamma,
        t_star,
        max_probability: search::max_probability(kind, &cfg),
        closed_form: ClosedForm {
            eta: analysis::eta_mfg_closed(&closed_cfg),
            delta_over_h: analysis::delta_mfg_closed(&closed_cfg),
        },
        efficiency,
        geodesicity,
        oracle: OracleCheck { steps: spec.steps(), terminal_error },
        trajectory,
    };
    let output = Output {
        command: "probe",
        params: json!({ "scheme": scheme, "x": x, "gamma": gamma, "emit_trajectory": emit_trajectory, "steps": spec.steps() }),
        data: output::json(&report),
        out,
    };
    if terminal_error > ORACLE_TOL {
        return Err(failed(
            Some(output),
            Failure::Inconsistent(format!(
                "integrated terminal state differs from the closed form by {}",
                fmt_num(terminal_error)
            )),
        ));
    }
    Ok(output)
}

#[derive(Serialize)]
struct WindowRow {
    n: u64,
    i_minus: f64,
    i_plus: f64,
    measure: f64,
    i_minus_exact: String,
    i_plus_exact: String,
    measure_exact: String,
    gamma_sample: f64,
    x_sq_sample: f64,
    x_sq_gamma2: f64,
}

fn appendix_b(n_max: u64, format: Format, out: Option<String>) -> CmdResult {
    if n_max == 0 {
        return Err(usage("--n-max must be at least 1"));
    }
    let mut rows = Vec::new();
    for n in 1..=n_max {
        let w = analysis::feasibility_window(n).map_err(core)?;
        let gamma_sample = 0.5 * (w.i_minus_f64() + w.i_plus_f64());
        rows.push(WindowRow {
            n,
            i_minus: w.i_minus_f64(),
            i_plus: w.i_plus_f64(),
            measure: w.measure_f64(),
            i_minus_exact: w.i_minus.to_string(),
            i_plus_exact: w.i_plus.to_string(),
            measure_exact: w.measure.to_string(),
            gamma_sample,
            x_sq_sample: w.x_sq(gamma_sample),
            x_sq_gamma2: w.x_sq(2.0),
        });
    }
    let data = match format {
        Format::Json => output::json(&rows),
        Format::Csv => csv(
            &[
                "n",
                "i_minus",
                "i_plus",
                "measure",
                "i_minus_exact",
                "i_plus_exact",
                "measure_exact",
                "gamma_sample",
                "x_sq_sample",
                "x_sq_gamma2",
            ],
            &rows
                .iter()
                .map(|r| {
                    vec![
                        Cell::Int(r.n),
                        r.i_minus.into(),
                        r.i_plus.into(),
                        r.measure.into(),
                        Cell::Text(r.i_minus_exact.clone()),
                        Cell::Text(r.i_plus_exact.clone()),
                        Cell::Text(r.measure_exact.clone()),
                        r.gamma_sample.into(),
                        r.x_sq_sample.into(),
                        r.x_sq_gamma2.into(),
                    ]
                })
                .collect::<Vec<_>>(),
        ),
    };
    let output = Output { command: "appendix-b", params: json!({ "n_max": n_max, "format": format }), data, out };
    let feasible_at_two = rows.iter().find(|r| r.x_sq_gamma2 > 0.0 && r.x_sq_gamma2 < 1.0);
    let shrinking = rows.windows(2).all(|w| w[1].measure < w[0].measure);
    match (feasible_at_two, shrinking) {
        (Some(r), _) => {
            Err(failed(Some(output), Failure::Inconsistent(format!("feasible x at gamma = 2 for n = {}", r.n))))
        }
        (None, false) => {
            Err(failed(Some(output), Failure::Inconsistent("window measure is not decreasing in n".into())))
        }
        (None, true) => Ok(output),
    }
}
