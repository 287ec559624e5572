//! Command-line surface. Every subcommand prints one JSON document with the
//! parameters it ran with, SHA-256 hashes of its input files, the result and,
//! where there is something to check, a verdict.
//!
//! Exit status is 0 on success, 2 for malformed input, 3 for a mathematical
//! failure and 4 when a verdict or tolerance fails.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::connection::{self, MeromorphicSystem, ScalarOperator, SystemJson};
use crate::error::{Error, Result};
use crate::groupoid::{self, ChartKind, GroupoidChart};
use crate::oracle::{self, cmat, PathSpec};
use crate::resummation::{
    demos, delta_psi_numeric, required_degree, solve_formal_gauge, Coordinates, ExponentialModel, FormalGauge,
    PreGauge, ResumInputs,
};
use crate::series::json::MatJson;
use crate::series::MatSeries;

pub const THREADS_ENV: &str = "STOKES_RESUM_THREADS";

#[derive(Parser, Debug, Clone)]
#[command(name = "stokes-resum", version, about = "Resum divergent formal solutions on Stokes groupoids")]
pub struct Cli {
    /// Seed for randomized sampling.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the JSON here instead of stdout.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum KindArg {
    Sto,
    Pair,
}

impl From<KindArg> for ChartKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Sto => ChartKind::Sto,
            KindArg::Pair => ChartKind::Pair,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum DemoName {
    Euler,
    Airy,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Σ = t*φ̂ · Ψ₁ · (s*φ̂)⁻¹ through total degree N.
    Resum {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_enum)]
        chart: KindArg,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        degree: i64,
        /// Report Σ in (z, μ), μ = u/(1 + zu); Pair_2 only.
        #[arg(long)]
        mu_chart: bool,
        #[arg(long)]
        pre_gauge: Option<PathBuf>,
        /// Use this gauge (series JSON) instead of solving for one.
        #[arg(long)]
        gauge: Option<PathBuf>,
    },
    /// Formal gauge φ̂ from the model to the system.
    Gauge {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        degree: i64,
    },
    /// Numeric parallel transport along a polyline.
    Transport {
        #[arg(long)]
        system: PathBuf,
        /// Waypoints `re,im` separated by `;`.
        #[arg(long, allow_hyphen_values = true)]
        path: String,
        #[arg(long)]
        tol: f64,
        #[arg(long, default_value_t = 1e-3)]
        min_distance: f64,
    },
    /// Groupoid axioms for Sto_k or Pair_k.
    CheckGroupoid {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 10)]
        degree: i64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Pushforward along z ↦ zⁿ.
    Push {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        n: u32,
    },
    /// Pullback along z ↦ zⁿ.
    Pull {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        n: u32,
    },
    /// Anti-Stokes directions of the leading term.
    StokesDirections {
        #[arg(long)]
        system: PathBuf,
    },
    /// Companion system of a scalar operator.
    Companion {
        #[arg(long)]
        operator: PathBuf,
    },
    /// The Euler and Airy examples with their verdicts.
    Demo {
        #[arg(value_enum)]
        name: DemoName,
        #[arg(long)]
        degree: Option<i64>,
    },
}

/// Output of one run. `passed` is `false` when a verdict failed.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub json: Value,
    pub passed: bool,
}

/// Files read by a run, hashed as they are loaded.
#[derive(Default)]
struct Inputs(Map<String, Value>);

impl Inputs {
    fn read(&mut self, role: &str, path: &Path) -> Result<String> {
        let bytes = std::fs::read(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
        self.0.insert(role.into(), Value::from(hex::encode(Sha256::digest(&bytes))));
        String::from_utf8(bytes).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
    }

    fn system(&mut self, path: &Path) -> Result<MeromorphicSystem> {
        let text = self.read("system", path)?;
        Ok(MeromorphicSystem::from_json_str(&text)?)
    }

    fn model(&mut self, path: &Path) -> Result<ExponentialModel> {
        let text = self.read("model", path)?;
        Ok(ExponentialModel::from_json_str(&text)?)
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn mat(m: &MatSeries) -> Value {
    to_value(&MatJson::from(m))
}

fn system_value(s: &MeromorphicSystem) -> Value {
    to_value(&SystemJson::from(s))
}

fn cmat_value(m: &cmat::CMat) -> Value {
    m.iter().map(|row| row.iter().map(|c| json!([c.re, c.im])).collect::<Vec<_>>()).collect()
}

fn check_degree(n: i64) -> Result<()> {
    if n < 0 {
        return Err(Error::Input(format!("degree {n} is negative")));
    }
    Ok(())
}

/// Runs one command without writing anything.
pub fn run(cli: &Cli) -> Result<Report> {
    let mut inputs = Inputs::default();
    let (command, parameters, result, verdict) = match &cli.command {
        Command::Resum { system, model, chart, k, degree, mu_chart, pre_gauge, gauge } => {
            check_degree(*degree)?;
            let sys = inputs.system(system)?;
            let model = inputs.model(model)?;
            let chart = GroupoidChart::new((*chart).into(), *k)?;
            let pre = match pre_gauge {
                Some(p) => Some(PreGauge::from_json_str(&inputs.read("pre_gauge", p)?)?),
                None => None,
            };
            let coords = if *mu_chart { Coordinates::Mu } else { Coordinates::Standard };
            if *mu_chart && chart != GroupoidChart::pair(2) {
                return Err(Error::Input("--mu-chart needs --chart pair --k 2".into()));
            }
            let need = required_degree(*degree, pre.as_ref());
            let gauge = match gauge {
                Some(p) => {
                    let text = inputs.read("gauge", p)?;
                    let j: MatJson = serde_json::from_str(&text)?;
                    FormalGauge::new(MatSeries::try_from(&j)?)?.with_endpoints(model.clone(), sys.clone())
                }
                None => solve_formal_gauge(&model, &sys, need)?,
            };
            let job = ResumInputs { gauge, model, chart: chart.clone(), pre_gauge: pre, coords };
            let sigma = job.run(*degree)?;
            let identity = sigma.identity_check()?;
            (
                "resum",
                json!({
                    "chart": chart.to_string(),
                    "degree": degree,
                    "gauge_degree": need,
                    "coordinates": coords,
                }),
                json!({ "sigma": mat(&sigma.psi) }),
                Some(json!({ "identity_on_u0": identity, "passed": identity })),
            )
        }
        Command::Gauge { system, model, degree } => {
            check_degree(*degree)?;
            let sys = inputs.system(system)?;
            let model = inputs.model(model)?;
            let g = solve_formal_gauge(&model, &sys, *degree)?;
            let zero = g.residual()?.entries().iter().all(|e| e.is_zero());
            (
                "gauge",
                json!({ "degree": degree }),
                json!({ "phi": mat(g.phi()) }),
                Some(json!({ "residual_zero": zero, "passed": zero })),
            )
        }
        Command::Transport { system, path, tol, min_distance } => {
            let sys = inputs.system(system)?;
            let p = PathSpec::parse(path, *min_distance)?;
            let t = oracle::transport(&sys, &p, *tol)?;
            let waypoints: Vec<_> = p.waypoints().iter().map(|z| json!([z.re, z.im])).collect();
            (
                "transport",
                json!({ "path": waypoints, "tol": tol, "min_distance": min_distance }),
                to_value(&t),
                None,
            )
        }
        Command::CheckGroupoid { kind, k, degree, samples } => {
            check_degree(*degree)?;
            let chart = GroupoidChart::new((*kind).into(), *k)?;
            let reports = groupoid::check_groupoid(&chart, *degree, *samples, cli.seed)?;
            let passed = reports.iter().all(|r| r.passed);
            (
                "check-groupoid",
                json!({ "chart": chart.to_string(), "degree": degree, "samples": samples, "seed": cli.seed, "tol": 1e-9 }),
                json!({ "axioms": reports }),
                Some(json!({ "passed": passed })),
            )
        }
        Command::Push { system, n } => {
            let sys = inputs.system(system)?;
            let out = connection::pushforward(&sys, *n)?;
            ("push", json!({ "n": n }), json!({ "system": system_value(&out) }), None)
        }
        Command::Pull { system, n } => {
            let sys = inputs.system(system)?;
            let out = connection::pullback(&sys, *n)?;
            ("pull", json!({ "n": n }), json!({ "system": system_value(&out) }), None)
        }
        Command::StokesDirections { system } => {
            let sys = inputs.system(system)?;
            ("stokes-directions", json!({}), to_value(&connection::anti_stokes(&sys)?), None)
        }
        Command::Companion { operator } => {
            let op = ScalarOperator::from_json_str(&inputs.read("operator", operator)?)?;
            let sys = connection::companion(&op)?;
            ("companion", json!({ "order": op.order() }), json!({ "system": system_value(&sys) }), None)
        }
        Command::Demo { name: DemoName::Euler, degree } => {
            let n = degree.unwrap_or(14);
            check_degree(n)?;
            let (result, verdict) = demo_euler(n)?;
            ("demo euler", json!({ "degree": n, "chart": "Pair_2", "coordinates": "mu" }), result, Some(verdict))
        }
        Command::Demo { name: DemoName::Airy, degree } => {
            let n = degree.unwrap_or(6);
            check_degree(n)?;
            let (result, verdict) = demo_airy(n)?;
            ("demo airy", json!({ "degree": n, "chart": "Pair_3", "coordinates": "standard" }), result, Some(verdict))
        }
    };
    let passed = verdict.as_ref().is_none_or(|v| v["passed"] == Value::Bool(true));
    let mut doc = json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "parameters": parameters,
        "inputs": Value::Object(inputs.0),
        "result": result,
    });
    if let Some(v) = verdict {
        doc["verdict"] = v;
    }
    Ok(Report { json: doc, passed })
}

fn demo_euler(n: i64) -> Result<(Value, Value)> {
    let sigma = demos::euler_sigma(n)?;
    let mismatches = demos::euler_mismatches(&sigma, n);
    // coefficient of z^{i+1} μ^{i+j+1}, total degree 2i + j + 2
    let mut table = Vec::new();
    for i in 0..n.max(0) {
        for j in 0..=(n - 2 * i - 2) {
            let got = sigma.psi.get(0, 1).coeff(&[i + 1, i + j + 1]);
            let want = demos::euler_coefficient(i as u64, j as u64);
            table.push(json!({ "i": i, "j": j, "coefficient": got.to_string(), "expected": want.to_string() }));
        }
    }
    let first: Vec<_> = mismatches
        .iter()
        .take(10)
        .map(|(i, j, e, got, want)| json!({ "entry": [i, j], "exponents": e, "got": got.to_string(), "expected": want.to_string() }))
        .collect();
    let passed = mismatches.is_empty();
    Ok((
        json!({ "sigma": mat(&sigma.psi), "off_diagonal": table }),
        json!({ "closed_form": "[[e^mu, rho], [0, 1]]", "mismatches": mismatches.len(), "first_mismatches": first, "passed": passed }),
    ))
}

fn demo_airy(n: i64) -> Result<(Value, Value)> {
    let sigma = demos::airy_sigma(n)?;
    let m = n.min(6);
    let exact = sigma.truncated(m)?.psi.agrees_with(&demos::airy_expected().truncate_total(m)?)?;
    let chart = GroupoidChart::pair(3);
    let (z, u) = (Complex64::new(0.2, 0.0), Complex64::new(0.1, 0.0));
    let g = chart.point(z, u)?;
    let numeric = delta_psi_numeric(demos::airy_fundamental, &chart, &g)?;
    let series = sigma.psi.eval_numeric(&[z, u]);
    let rel = cmat::rel_diff(&series, &numeric);
    Ok((
        json!({
            "sigma": mat(&sigma.truncated(m)?.psi),
            "numeric_check": { "z": 0.2, "u": 0.1, "sigma": cmat_value(&series), "fundamental": cmat_value(&numeric), "relative_error": rel },
        }),
        json!({ "exact_match_degree": m, "exact_match": exact, "passed": exact }),
    ))
}

/// Applies [`THREADS_ENV`] to the global thread pool, if set.
pub fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v.trim().parse().map_err(|_| Error::Input(format!("{THREADS_ENV}={v:?}")))?;
        // a pool that is already built keeps its size
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Runs, writes the JSON and turns a failed verdict into [`Error::Tolerance`].
pub fn execute(cli: &Cli) -> Result<()> {
    configure_threads()?;
    let report = run(cli)?;
    let mut text = serde_json::to_string_pretty(&report.json)?;
    text.push('\n');
    match &cli.output {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    if report.passed {
        Ok(())
    } else {
        Err(Error::Tolerance("verdict failed".into()))
    }
}
