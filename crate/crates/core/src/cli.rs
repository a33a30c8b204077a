//! Command-line front end. Every command returns a [`Report`] that embeds
//! its effective configuration; `main` only parses, runs and writes.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::boundary::{
    self, Domain, Family, SolveMethod, SolverConfig, DEFAULT_EXACT_TOL, DEFAULT_SOLVER_TOL, DEFAULT_TRUNCATION,
};
use crate::dl::{self, DLVertex, Side};
use crate::montecarlo::{self, TrajectoryParams};
use crate::tree::{BoundaryPoint, TreeVertex};
use crate::walk::{TreeWalk, WalkSpec};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "dlharmonic", version, about = "Harmonic functions of semi-isotropic walks on Diestel-Leader graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Drift, phi, moments and case of a walk.
    Analyze(Common),
    /// Minimal harmonic families with their coefficients.
    Classify(SolverArgs),
    /// Boundary coefficients a_j of one tree projection.
    Coeffs(SolverArgs),
    /// K(x, ξ) on one tree projection.
    Kernel(KernelArgs),
    /// Exact harmonicity of every enumerated family.
    Verify(VerifyArgs),
    /// Seeded trajectories or boundary-hit frequencies.
    Simulate(SimulateArgs),
    /// Green-kernel ratios along a ray against the closed-form kernel.
    Martin(MartinArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum SideArg {
    #[value(name = "1")]
    #[serde(rename = "1")]
    One,
    #[value(name = "2")]
    #[serde(rename = "2")]
    Two,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::One => Side::One,
            SideArg::Two => Side::Two,
        }
    }
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct Common {
    /// Walk specification (JSON).
    #[arg(long)]
    pub walk: PathBuf,
    /// Output file; standard output when absent.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct SolverArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value = "1")]
    pub side: SideArg,
    #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
    pub truncation: usize,
    #[arg(long, default_value_t = DEFAULT_SOLVER_TOL)]
    pub tol: f64,
    #[arg(long, value_enum, default_value = "direct")]
    pub method: SolveMethod,
    #[arg(long, default_value_t = 100_000)]
    pub max_iterations: usize,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            truncation: self.truncation,
            tol: self.tol,
            method: self.method,
            max_iterations: self.max_iterations,
        }
    }
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct KernelArgs {
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Tree vertex as JSON, e.g. '{"hor":1,"word":{"0":1}}'.
    #[arg(long, default_value = r#"{"hor":0}"#)]
    pub x: String,
    /// Anchor of the boundary point as a tree vertex in JSON.
    #[arg(long, default_value = r#"{"hor":0}"#)]
    pub xi: String,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random deep vertices added to the radius-3 ball.
    #[arg(long, default_value_t = 50)]
    pub samples: usize,
    /// Boundary points tried per kernel family.
    #[arg(long, default_value_t = 3)]
    pub ends: usize,
    #[arg(long, default_value_t = DEFAULT_EXACT_TOL)]
    pub exact_tol: f64,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value = "1")]
    pub side: SideArg,
    #[arg(long)]
    pub seed: u64,
    /// Emit one trajectory instead of boundary-hit frequencies.
    #[arg(long)]
    pub trajectory: bool,
    #[arg(long, default_value_t = 10_000)]
    pub steps: usize,
    #[arg(long, default_value_t = 50)]
    pub window: usize,
    #[arg(long, default_value_t = 30)]
    pub depth_margin: u64,
    #[arg(long, default_value_t = 10_000)]
    pub runs: u64,
    #[arg(long, default_value_t = 10)]
    pub j_max: u64,
    /// Largest tolerated fraction of runs that never settle.
    #[arg(long, default_value_t = 1e-3)]
    pub max_unconverged: f64,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct MartinArgs {
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, default_value = r#"{"hor":0}"#)]
    pub x: String,
    #[arg(long, default_value = r#"{"hor":0}"#)]
    pub xi: String,
    #[arg(long, value_delimiter = ',', default_values_t = vec![4u64, 6, 8, 10])]
    pub depths: Vec<u64>,
    #[arg(long, default_value_t = 300)]
    pub n_max: usize,
    /// Tolerated relative error at the deepest point.
    #[arg(long, default_value_t = 0.05)]
    pub rel_tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Check {
    fn below(name: &str, value: f64, tol: f64) -> Check {
        Check {
            name: name.into(),
            value,
            tol,
            pass: value < tol,
        }
    }
}

/// The outcome of one command.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: &'static str,
    pub config: Value,
    pub result: Value,
    pub checks: Vec<Check>,
    /// `(header, rows)` for CSV output.
    pub table: Option<(Vec<String>, Vec<Vec<String>>)>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => {
                let doc = json!({
                    "command": self.command,
                    "config": self.config,
                    "result": self.result,
                    "checks": self.checks,
                    "passed": self.passed(),
                });
                Ok(serde_json::to_string_pretty(&doc)? + "\n")
            }
            Format::Csv => {
                let (header, rows) = self
                    .table
                    .as_ref()
                    .ok_or_else(|| Error::schema("format", format!("`{}` has no CSV form", self.command)))?;
                let mut out = String::new();
                writeln!(out, "# command: {}", self.command).expect("writing to a string");
                writeln!(out, "# config: {}", serde_json::to_string(&self.config)?).expect("writing to a string");
                for c in &self.checks {
                    writeln!(out, "# check {}: {:e} < {:e} {}", c.name, c.value, c.tol, if c.pass { "ok" } else { "FAIL" })
                        .expect("writing to a string");
                }
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(header)?;
                for row in rows {
                    w.write_record(row)?;
                }
                out.push_str(&String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.into_error()))?).expect("csv is utf-8"));
                Ok(out)
            }
        }
    }
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Analyze(c) => c,
            Command::Classify(a) | Command::Coeffs(a) => &a.common,
            Command::Kernel(a) => &a.solver.common,
            Command::Verify(a) => &a.solver.common,
            Command::Simulate(a) => &a.common,
            Command::Martin(a) => &a.solver.common,
        }
    }
}

pub fn run(command: &Command) -> Result<Report> {
    match command {
        Command::Analyze(a) => cmd_analyze(a),
        Command::Classify(a) => cmd_classify(a),
        Command::Coeffs(a) => cmd_coeffs(a),
        Command::Kernel(a) => cmd_kernel(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Martin(a) => cmd_martin(a),
    }
}

fn config_of(args: &impl Serialize, spec: &WalkSpec) -> Result<Value> {
    let mut config = serde_json::to_value(args)?;
    config["walk_spec"] = spec.raw.clone();
    Ok(config)
}

fn tree_walk(spec: &WalkSpec, side: SideArg) -> TreeWalk {
    spec.measure.project_to_tree(side.into())
}

fn parse_vertex(text: &str, name: &str, q: u32) -> Result<TreeVertex> {
    let v: TreeVertex = serde_json::from_str(text).map_err(|e| Error::schema(name, e.to_string()))?;
    v.validate(q)?;
    Ok(v)
}

pub fn cmd_analyze(args: &Common) -> Result<Report> {
    let spec = WalkSpec::from_path(&args.walk)?;
    let w = &spec.measure;
    let z = w.z_walk();
    let c0 = if z.has_zero_drift() { None } else { z.find_c0(crate::walk::DERIVED_MASS_TOL).ok().flatten() };
    let grid: Vec<Value> = (-8..=8)
        .map(|i| {
            let c = i as f64 * 0.25;
            json!({"c": c, "phi": z.phi(c)})
        })
        .collect();
    let case = match (z.has_zero_drift(), c0) {
        (true, _) => "I",
        (false, Some(_)) => "II",
        (false, None) => "unclassified",
    };
    let mu: serde_json::Map<String, Value> = z.support().map(|(n, p)| (n.to_string(), json!(p))).collect();
    let result = json!({
        "q": w.q(),
        "r": w.r(),
        "mu_tilde": mu,
        "drift": z.drift(),
        "phi_grid": grid,
        "c0": c0,
        "moment_1": w.moment(1.0),
        "moment_2_5": w.moment(2.5),
        "exp_moment_c0": c0.map(|c| w.exp_moment(c)),
        "irreducible": z.is_irreducible(),
        "case": case,
    });
    let table = (
        vec!["c".into(), "phi".into()],
        (-8..=8)
            .map(|i| {
                let c = i as f64 * 0.25;
                vec![c.to_string(), z.phi(c).to_string()]
            })
            .collect(),
    );
    Ok(Report {
        command: "analyze",
        config: config_of(args, &spec)?,
        result,
        checks: Vec::new(),
        table: Some(table),
    })
}

pub fn cmd_classify(args: &SolverArgs) -> Result<Report> {
    let spec = WalkSpec::from_path(&args.common.walk)?;
    let report = boundary::enumerate_minimal_families(&spec.measure, &args.config())?;
    let checks = report
        .residuals
        .iter()
        .enumerate()
        .map(|(i, &r)| Check::below(&format!("solver residual side {}", i + 1), r, args.tol))
        .collect();
    Ok(Report {
        command: "classify",
        config: config_of(args, &spec)?,
        result: serde_json::to_value(&report)?,
        checks,
        table: None,
    })
}

pub fn cmd_coeffs(args: &SolverArgs) -> Result<Report> {
    let spec = WalkSpec::from_path(&args.common.walk)?;
    let w = tree_walk(&spec, args.side);
    let c = boundary::solve_coefficients(&w, &args.config())?;
    let tail = boundary::tail_recurrence_residual(&c, &w)?;
    let rows = c.a.iter().enumerate().map(|(j, a)| vec![j.to_string(), a.to_string()]).collect();
    Ok(Report {
        command: "coeffs",
        config: config_of(args, &spec)?,
        checks: vec![
            Check::below("solver residual", c.residual, args.tol),
            Check::below("tail recurrence residual", tail, 1e-6),
        ],
        result: serde_json::to_value(&c)?,
        table: Some((vec!["j".into(), "a_j".into()], rows)),
    })
}

pub fn cmd_kernel(args: &KernelArgs) -> Result<Report> {
    let spec = WalkSpec::from_path(&args.solver.common.walk)?;
    let w = tree_walk(&spec, args.solver.side);
    let x = parse_vertex(&args.x, "x", w.q())?;
    let anchor = parse_vertex(&args.xi, "xi", w.q())?;
    let c = boundary::solve_coefficients(&w, &args.solver.config())?;
    // anchor deep enough for both confluents
    let xi = BoundaryPoint::new(anchor.clone());
    let xi = xi.deepen((x.hor().max(0) - anchor.hor()).max(0) as u64);
    let k = crate::tree::up_to_boundary(&TreeVertex::root(), &xi)?;
    let l = crate::tree::up_to_boundary(&x, &xi)?;
    let value = boundary::kernel_at(&c, &x, &xi)?;
    let harm = boundary::harmonicity_error_tree(
        &boundary::HarmonicFunction::tree_kernel(args.solver.side.into(), xi.clone(), c.clone()),
        &w,
        std::slice::from_ref(&x),
    )?;
    Ok(Report {
        command: "kernel",
        config: config_of(args, &spec)?,
        result: json!({"k": k, "l": l, "m": x.hor(), "kernel": value, "case": c.case}),
        checks: vec![Check::below("harmonicity rel err at x", harm, DEFAULT_EXACT_TOL)],
        table: Some((
            vec!["k".into(), "l".into(), "m".into(), "kernel".into()],
            vec![vec![k.to_string(), l.to_string(), x.hor().to_string(), value.to_string()]],
        )),
    })
}

/// A DL vertex with lamps near a random position.
fn random_dl_vertex(rng: &mut impl Rng, q: u32, r: u32, spread: i64) -> DLVertex {
    let pos = rng.random_range(-spread..=spread);
    let lamps = (pos - spread..=pos + spread).filter_map(|m| {
        let colours = if m <= pos { q } else { r };
        rng.random_bool(0.5).then(|| (m, rng.random_range(0..colours)))
    });
    DLVertex::from_lamps(pos, lamps)
}

fn random_end(rng: &mut impl Rng, q: u32, depth: i64) -> BoundaryPoint {
    let labels: Vec<(i64, u32)> = (-depth..=depth).map(|h| (h, rng.random_range(0..q))).collect();
    BoundaryPoint::new(TreeVertex::from_levels(depth, labels))
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<Report> {
    let spec = WalkSpec::from_path(&args.solver.common.walk)?;
    let w = &spec.measure;
    let report = boundary::enumerate_minimal_families(w, &args.solver.config())?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut points = dl::ball(&DLVertex::root(), 3, w.q(), w.r())?;
    points.extend((0..args.samples).map(|_| random_dl_vertex(&mut rng, w.q(), w.r(), 8)));
    let mut worst = 0.0f64;
    let mut rows = Vec::new();
    for family in &report.families {
        let (label, ends) = match family {
            Family::Kernels { side, .. } => {
                let q = if *side == Side::One { w.q() } else { w.r() };
                (format!("kernels side {}", side.index()), (0..args.ends).map(|_| random_end(&mut rng, q, 40)).collect())
            }
            Family::Exponential { side, .. } => (format!("exponential side {}", side.index()), vec![BoundaryPoint::new(TreeVertex::root())]),
            Family::Constant => ("constant".to_string(), vec![BoundaryPoint::new(TreeVertex::root())]),
        };
        for xi in ends {
            let h = family.member(&xi, Domain::DL);
            let err = boundary::harmonicity_error_dl(&h, w, &points)?;
            worst = worst.max(err);
            rows.push(vec![label.clone(), err.to_string()]);
        }
    }
    Ok(Report {
        command: "verify",
        config: config_of(args, &spec)?,
        result: json!({
            "case": report.case,
            "families": rows.iter().map(|r| json!({"family": r[0], "harmonicity_max_rel_err": r[1].parse::<f64>().unwrap_or(f64::NAN)})).collect::<Vec<_>>(),
            "points": points.len(),
        }),
        checks: vec![Check::below("harmonicity max rel err", worst, args.exact_tol)],
        table: Some((vec!["family".into(), "harmonicity_max_rel_err".into()], rows)),
    })
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<Report> {
    let spec = WalkSpec::from_path(&args.common.walk)?;
    let w = tree_walk(&spec, args.side);
    let params = TrajectoryParams::new(args.steps, args.window, args.depth_margin, args.seed)?;
    let config = config_of(args, &spec)?;
    if args.trajectory {
        let t = montecarlo::simulate(&w, &TreeVertex::root(), &params);
        let rows = t
            .points
            .iter()
            .map(|p| vec![p.n.to_string(), p.hor.to_string(), p.up_root.to_string()])
            .collect();
        return Ok(Report {
            command: "simulate",
            config,
            result: json!({"points": t.points, "end": t.end}),
            checks: Vec::new(),
            table: Some((vec!["n".into(), "hor".into(), "up_root".into()], rows)),
        });
    }
    let est = montecarlo::estimate_coefficients(&w, &params, args.runs, args.j_max)?;
    let rows = est
        .rows
        .iter()
        .map(|r| vec![r.j.to_string(), r.count.to_string(), r.freq.to_string(), r.stderr.to_string()])
        .collect();
    let unconverged = est.unconverged as f64 / args.runs.max(1) as f64;
    Ok(Report {
        command: "simulate",
        config,
        result: serde_json::to_value(&est)?,
        checks: vec![Check {
            name: "unconverged fraction".into(),
            value: unconverged,
            tol: args.max_unconverged,
            pass: unconverged <= args.max_unconverged,
        }],
        table: Some((vec!["j".into(), "count".into(), "freq".into(), "stderr".into()], rows)),
    })
}

pub fn cmd_martin(args: &MartinArgs) -> Result<Report> {
    let spec = WalkSpec::from_path(&args.solver.common.walk)?;
    let w = tree_walk(&spec, args.solver.side);
    let x = parse_vertex(&args.x, "x", w.q())?;
    let xi = BoundaryPoint::new(parse_vertex(&args.xi, "xi", w.q())?);
    let c = boundary::solve_coefficients(&w, &args.solver.config())?;
    let report = montecarlo::martin_convergence_test(&w, &c, &x, &xi, &args.depths, args.n_max)?;
    let rows = report
        .rows
        .iter()
        .map(|r| vec![r.n.to_string(), r.k_hat.to_string(), r.target.to_string(), r.rel_err.to_string()])
        .collect();
    Ok(Report {
        command: "martin",
        config: config_of(args, &spec)?,
        checks: vec![Check::below("final relative error", report.final_rel_err(), args.rel_tol)],
        result: serde_json::to_value(&report)?,
        table: Some((vec!["n".into(), "k_hat".into(), "target".into(), "rel_err".into()], rows)),
    })
}
