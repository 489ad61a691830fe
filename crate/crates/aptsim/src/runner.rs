//! Command dispatch: turns a [`RunConfig`] into CSV/JSON documents.
//!
//! Rendering is pure (config in, text out) so repeated runs are
//! byte-identical; writing is a separate step.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use aptsim_core::dynamics::{run, Evolution, EvolutionSpec, Trajectory};
use aptsim_core::entanglement::concurrence;
use aptsim_core::model::{AptParams, Family};
use aptsim_core::optics::decompose;
use aptsim_core::propagator::QubitDrive;
use aptsim_core::tomography::{mle_reconstruct, noiseless_counts, simulate_counts, DEFAULT_TOTAL};
use clap::{Parser, ValueEnum};
use serde::Serialize;

use crate::error::CliError;
use crate::figures::{preset, surface_a1, surface_a2_grid, Curve, FigureId, FIGURE_DT};
use crate::format::sig6;
use crate::io::{mle_json, read_counts, trajectory_csv, trajectory_json};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Concurrence curves for a figure preset or a custom (a1, a2) pair.
    Figure,
    /// Concurrence on an (a2, t) grid at fixed a1.
    Sweep,
    /// Wave-plate and loss settings realizing each propagator.
    Decompose,
    /// Simulated tomography of the evolved state with MLE reconstruction.
    Tomography,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Clone, Debug, Parser)]
#[command(name = "aptsim", version, about = "Entanglement dynamics of two qubits under anti-PT-symmetric Hamiltonians")]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,
    /// Figure preset; fixes the parameter sets and the default time grid.
    #[arg(long)]
    pub figure: Option<FigureId>,
    #[arg(long, allow_negative_numbers = true)]
    pub a1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub a2: Option<f64>,
    /// Leave qubit 2 undriven.
    #[arg(long)]
    pub identity_qubit2: bool,
    /// Use the PT Hamiltonian γ(σx − iaσz) for custom parameters.
    #[arg(long)]
    pub pt: bool,
    #[arg(long, allow_negative_numbers = true)]
    pub t_max: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub dt: Option<f64>,
    /// Sweep range for a2 (inclusive).
    #[arg(long, allow_negative_numbers = true)]
    pub a2_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub a2_max: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub a2_step: Option<f64>,
    /// Base seed for Poisson counts; time point k uses seed + k.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Count scale per projection basis.
    #[arg(long, default_value_t = DEFAULT_TOTAL as u32)]
    pub total: u32,
    /// Use expected counts instead of Poisson samples.
    #[arg(long)]
    pub noiseless: bool,
    /// Reconstruct from a `basis,observed,total` count file instead of simulating.
    #[arg(long)]
    pub counts: Option<PathBuf>,
    /// Output directory for `figure`, output file otherwise (stdout if absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Defaults to csv, or json for `tomography`.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// Rendered output of one command.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rendered {
    /// Named files, written into the output directory.
    Files(Vec<(String, String)>),
    /// A single document.
    Document(String),
}

impl RunConfig {
    pub fn format(&self) -> Format {
        self.format.unwrap_or(match self.command {
            Command::Tomography => Format::Json,
            _ => Format::Csv,
        })
    }

    fn family(&self) -> Family {
        if self.pt {
            Family::Pt
        } else {
            Family::Apt
        }
    }

    fn reject_with_figure(&self) -> Result<(), CliError> {
        let custom = self.a1.is_some()
            || self.a2.is_some()
            || self.identity_qubit2
            || self.pt
            || self.a2_min.is_some()
            || self.a2_max.is_some()
            || self.a2_step.is_some();
        if custom {
            return Err(usage(
                "--figure fixes the parameter sets; drop --a1/--a2/--identity-qubit2/--pt/--a2-*",
            ));
        }
        Ok(())
    }

    /// The custom curve described by --a1/--a2/--identity-qubit2/--pt.
    fn custom_curve(&self, default_a1: Option<f64>) -> Result<Curve, CliError> {
        let a1 = self
            .a1
            .or(default_a1)
            .ok_or_else(|| usage("--a1 is required without --figure"))?;
        let p1 = AptParams::new(a1, 1.0, self.family())?;
        let qubit2 = if self.identity_qubit2 {
            if self.a2.is_some() {
                return Err(usage("--a2 conflicts with --identity-qubit2"));
            }
            QubitDrive::Identity
        } else {
            let a2 = self.a2.unwrap_or(a1);
            QubitDrive::Hamiltonian(AptParams::new(a2, 1.0, self.family())?)
        };
        Ok(Curve::new(p1, qubit2))
    }

    fn spec(&self, curve: &Curve, t_max: f64, dt: f64) -> Result<EvolutionSpec, CliError> {
        let spec = EvolutionSpec::new(curve.qubit1, curve.qubit2, t_max).with_dt(dt);
        spec.validate()?;
        Ok(spec)
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn render_trajectory(traj: &Trajectory, format: Format) -> String {
    match format {
        Format::Csv => trajectory_csv(traj),
        Format::Json => trajectory_json(traj),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn csv_document(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV output is UTF-8")
}

/// `{0, dt, …}` up to `t_max`, with the same slack as trajectory grids.
fn time_grid(t_max: f64, dt: f64) -> Result<Vec<f64>, CliError> {
    let spec = EvolutionSpec::new(AptParams::apt(1.0)?, QubitDrive::Identity, t_max).with_dt(dt);
    spec.validate()?;
    Ok(spec.times().collect())
}

/// One curve per parameter set, named `fig<id>_<a1>_<a2>.<ext>`.
pub fn render_figure(cfg: &RunConfig) -> Result<Rendered, CliError> {
    let (id, curves, t_max, dt) = match cfg.figure {
        Some(figure) => {
            cfg.reject_with_figure()?;
            let p = preset(figure);
            (figure.to_string(), p.curves, cfg.t_max.unwrap_or(p.t_max), cfg.dt.unwrap_or(p.dt))
        }
        None => {
            let t_max = cfg.t_max.ok_or_else(|| usage("--t-max is required without --figure"))?;
            (
                "custom".to_string(),
                vec![cfg.custom_curve(None)?],
                t_max,
                cfg.dt.unwrap_or(FIGURE_DT),
            )
        }
    };
    let format = cfg.format();
    let mut files = Vec::with_capacity(curves.len());
    for curve in &curves {
        let traj = run(&cfg.spec(curve, t_max, dt)?)?;
        let name = format!("{}.{}", curve.file_stem(&id), format.extension());
        files.push((name, render_trajectory(&traj, format)));
    }
    Ok(Rendered::Files(files))
}

fn a2_range(min: f64, max: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(step > 0.0) || !(max >= min) || !min.is_finite() || !max.is_finite() {
        return Err(usage("a2 range needs finite a2-min <= a2-max and a2-step > 0"));
    }
    let n = ((max - min) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|k| min + k as f64 * step).collect())
}

#[derive(Serialize)]
struct SweepRow {
    a1: f64,
    a2: f64,
    t: f64,
    concurrence: f64,
}

/// `a1,a2,t,concurrence` rows over an a2 × t grid.
pub fn render_sweep(cfg: &RunConfig) -> Result<Rendered, CliError> {
    let (a1, a2_values) = match cfg.figure {
        Some(figure) => {
            cfg.reject_with_figure()?;
            let a1 = surface_a1(figure)
                .ok_or_else(|| usage(format!("figure {figure} is not a surface; use 4a or 4c")))?;
            (a1, surface_a2_grid())
        }
        None => {
            let a1 = cfg.a1.ok_or_else(|| usage("--a1 is required without --figure"))?;
            let grid = match (cfg.a2_min, cfg.a2_max, cfg.a2_step) {
                (None, None, None) => vec![cfg.a2.unwrap_or(a1)],
                (Some(lo), Some(hi), Some(step)) if cfg.a2.is_none() => a2_range(lo, hi, step)?,
                _ => return Err(usage("give either --a2 or all of --a2-min/--a2-max/--a2-step")),
            };
            (a1, grid)
        }
    };
    if cfg.identity_qubit2 {
        return Err(usage("sweep varies qubit 2; --identity-qubit2 does not apply"));
    }
    let t_max = cfg.t_max.unwrap_or(10.0);
    let dt = cfg.dt.unwrap_or(FIGURE_DT);
    let family = cfg.family();
    let p1 = AptParams::new(a1, 1.0, family)?;
    let mut rows = Vec::new();
    for a2 in a2_values {
        let curve = Curve::new(p1, AptParams::new(a2, 1.0, family)?);
        let traj = run(&cfg.spec(&curve, t_max, dt)?)?;
        for (&t, &c) in traj.times.iter().zip(&traj.concurrence) {
            rows.push(SweepRow {
                a1,
                a2,
                t,
                concurrence: c,
            });
        }
    }
    Ok(Rendered::Document(match cfg.format() {
        Format::Json => to_json(&rows),
        Format::Csv => csv_document(
            &["a1", "a2", "t", "concurrence"],
            rows.iter()
                .map(|r| vec![sig6(r.a1), sig6(r.a2), sig6(r.t), sig6(r.concurrence)]),
        ),
    }))
}

/// Default parameters and times for the decomposition table.
pub const DECOMPOSE_A: [f64; 4] = [0.8, 1.0, 1.2, 1.8];
pub const DECOMPOSE_T: [f64; 5] = [0.1, 0.5, 1.0, 2.0, 5.0];

#[derive(Serialize)]
struct DecompositionRow {
    a: f64,
    t: f64,
    theta1_deg: f64,
    theta2_deg: f64,
    xi1_deg: f64,
    xi2_deg: f64,
    k: i32,
    c: f64,
}

/// `a,t,theta1_deg,theta2_deg,xi1_deg,xi2_deg,k,c` rows.
pub fn render_decompose(cfg: &RunConfig) -> Result<Rendered, CliError> {
    if cfg.figure.is_some() || cfg.a2.is_some() || cfg.identity_qubit2 || cfg.pt {
        return Err(usage("decompose takes only --a1 and a time grid (APT qubits)"));
    }
    let a_values = match cfg.a1 {
        Some(a) => vec![a],
        None => DECOMPOSE_A.to_vec(),
    };
    let times = match cfg.t_max {
        Some(t_max) => time_grid(t_max, cfg.dt.unwrap_or(0.1))?,
        None => DECOMPOSE_T.to_vec(),
    };
    let mut rows = Vec::new();
    for &a in &a_values {
        let p = AptParams::apt(a)?;
        for &t in &times {
            let d = decompose(&p, t).map_err(|source| CliError::AtTime { t, source })?;
            rows.push(DecompositionRow {
                a,
                t,
                theta1_deg: d.theta1_deg,
                theta2_deg: d.theta2_deg,
                xi1_deg: d.xi1_deg,
                xi2_deg: d.xi2_deg,
                k: d.k,
                c: d.c,
            });
        }
    }
    Ok(Rendered::Document(match cfg.format() {
        Format::Json => to_json(&rows),
        Format::Csv => csv_document(
            &["a", "t", "theta1_deg", "theta2_deg", "xi1_deg", "xi2_deg", "k", "c"],
            rows.iter().map(|r| {
                vec![
                    sig6(r.a),
                    sig6(r.t),
                    sig6(r.theta1_deg),
                    sig6(r.theta2_deg),
                    sig6(r.xi1_deg),
                    sig6(r.xi2_deg),
                    r.k.to_string(),
                    sig6(r.c),
                ]
            }),
        ),
    }))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TomographyPoint {
    pub t: f64,
    pub fidelity: f64,
    pub concurrence_theory: f64,
    pub concurrence_mle: f64,
    pub log_likelihood: f64,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TomographyReport {
    pub family: &'static str,
    pub a1: f64,
    /// `None` when qubit 2 is undriven.
    pub a2: Option<f64>,
    pub total: u64,
    /// `None` for noiseless counts.
    pub seed: Option<u64>,
    pub points: Vec<TomographyPoint>,
}

/// Default tomography grid: ten points `0, 0.5, …, 4.5`.
pub const TOMOGRAPHY_T_MAX: f64 = 4.5;
pub const TOMOGRAPHY_DT: f64 = 0.5;

/// Evolves the Bell state, simulates counts at each time and reconstructs.
pub fn tomography_report(cfg: &RunConfig) -> Result<TomographyReport, CliError> {
    if cfg.figure.is_some() {
        return Err(usage("tomography does not use figure presets"));
    }
    let total = u64::from(cfg.total);
    if total == 0 {
        return Err(aptsim_core::Error::InvalidParameter {
            name: "total",
            value: 0.0,
            reason: "count scale must be positive",
        }
        .into());
    }
    let curve = cfg.custom_curve(Some(1.2))?;
    let times = time_grid(
        cfg.t_max.unwrap_or(TOMOGRAPHY_T_MAX),
        cfg.dt.unwrap_or(TOMOGRAPHY_DT),
    )?;
    let evolution = Evolution::new(curve.qubit1, curve.qubit2);
    let mut points = Vec::with_capacity(times.len());
    for (k, &t) in times.iter().enumerate() {
        let at = |source| CliError::AtTime { t, source };
        let truth = evolution.evolve(t).map_err(at)?.state;
        let counts = if cfg.noiseless {
            noiseless_counts(&truth, total)
        } else {
            simulate_counts(&truth, total, cfg.seed.wrapping_add(k as u64))
        }
        .map_err(at)?;
        let mle = mle_reconstruct(&counts).map_err(at)?.with_truth(&truth);
        points.push(TomographyPoint {
            t,
            fidelity: mle.fidelity_vs_truth.expect("truth supplied"),
            concurrence_theory: concurrence(&truth).map_err(at)?.value,
            concurrence_mle: concurrence(&mle.rho_hat).map_err(at)?.value,
            log_likelihood: mle.log_likelihood,
            iterations: mle.iterations,
        });
    }
    Ok(TomographyReport {
        family: match curve.qubit1.family() {
            Family::Apt => "apt",
            Family::Pt => "pt",
        },
        a1: curve.qubit1.a(),
        a2: curve.qubit2.params().map(|p| p.a()),
        total,
        seed: (!cfg.noiseless).then_some(cfg.seed),
        points,
    })
}

pub fn render_tomography(cfg: &RunConfig) -> Result<Rendered, CliError> {
    if let Some(path) = &cfg.counts {
        return render_reconstruction(cfg, path);
    }
    let report = tomography_report(cfg)?;
    Ok(Rendered::Document(match cfg.format() {
        Format::Json => to_json(&report),
        Format::Csv => csv_document(
            &["t", "fidelity", "concurrence_theory", "concurrence_mle"],
            report.points.iter().map(|p| {
                vec![
                    sig6(p.t),
                    sig6(p.fidelity),
                    sig6(p.concurrence_theory),
                    sig6(p.concurrence_mle),
                ]
            }),
        ),
    }))
}

/// MLE of a count file, as JSON.
fn render_reconstruction(cfg: &RunConfig, path: &Path) -> Result<Rendered, CliError> {
    if cfg.format() != Format::Json {
        return Err(usage("reconstruction from --counts is emitted as JSON only"));
    }
    let counts = read_counts(path)?;
    let mle = mle_reconstruct(&counts)?;
    let mut s = mle_json(&mle);
    s.push('\n');
    Ok(Rendered::Document(s))
}

pub fn render(cfg: &RunConfig) -> Result<Rendered, CliError> {
    match cfg.command {
        Command::Figure => render_figure(cfg),
        Command::Sweep => render_sweep(cfg),
        Command::Decompose => render_decompose(cfg),
        Command::Tomography => render_tomography(cfg),
    }
}

/// Writes rendered output: files go into `--out` (default `.`), a document
/// goes to `--out` or stdout. Returns the paths written.
pub fn write(cfg: &RunConfig, rendered: &Rendered) -> Result<Vec<PathBuf>, CliError> {
    match rendered {
        Rendered::Files(files) => {
            let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
            fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
            let mut written = Vec::with_capacity(files.len());
            for (name, contents) in files {
                let path = dir.join(name);
                fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
                written.push(path);
            }
            Ok(written)
        }
        Rendered::Document(text) => match &cfg.out {
            Some(path) => {
                fs::write(path, text).map_err(|e| CliError::io(path, e))?;
                Ok(vec![path.clone()])
            }
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(text.as_bytes())
                    .map_err(|e| CliError::io("<stdout>", e))?;
                Ok(Vec::new())
            }
        },
    }
}

pub fn execute(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let rendered = render(cfg)?;
    write(cfg, &rendered)
}
