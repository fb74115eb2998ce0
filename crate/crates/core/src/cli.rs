//! The `zml` command line.
//!
//! Every subcommand reads one JSON config, computes, and writes its
//! reports into the output directory (`--out`, else `output_dir` from the
//! config, else the working directory). The primary JSON report is also
//! printed on stdout. Exit codes: 0 success, 2 configuration error,
//! 3 numerical failure.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::potential::{
    lambda_1d_with, lambda_2d_radial_with, poisson_residual, radial_poisson_residual,
};
use crate::profiles::{total_flux, Dimension, FieldProfile};
use crate::reduction::{admissible_channels, verify_degeneracy_with};
use crate::report::{svg_polyline, to_json, Cell, CsvTable};
use crate::spectral::{
    count_near_zero, default_zero_tolerance, eigen_spectrum, tolerance_warning, ChannelBasis,
};
use crate::zeromodes::{
    admissible_k_interval, build_mode_1d, count_2d_zero_modes, mode_2d_from_potential, scan_k,
    SpinSector,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "zml",
    version,
    about = "Zero modes of Dirac-Weyl operators in compact magnetic fields"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory, overriding `output_dir` in the config.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write SVG plots.
    #[arg(long)]
    pub plots: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Total flux of the profile.
    Flux(RunArgs),
    /// Scalar potential on the grid.
    Potential(RunArgs),
    /// One zero-mode candidate `e^{±λ_k}`.
    Modes(RunArgs),
    /// Normalizability over a list of `k`.
    Scan(RunArgs),
    /// Spectrum of one Landau-gauge channel.
    Spectrum(RunArgs),
    /// Analytic degeneracy (line) or planar zero-mode count (radial).
    Count(RunArgs),
    /// Degeneracy against the spectral channel sweep.
    Verify(RunArgs),
    /// Planar modes `z^j e^{-λ}` for `j = 0..=j_max`.
    Modes2d(RunArgs),
}

impl Command {
    fn args(&self) -> &RunArgs {
        match self {
            Command::Flux(a)
            | Command::Potential(a)
            | Command::Modes(a)
            | Command::Scan(a)
            | Command::Spectrum(a)
            | Command::Count(a)
            | Command::Verify(a)
            | Command::Modes2d(a) => a,
        }
    }
}

/// A file to write into the output directory.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

/// Rendered outputs of one subcommand; `primary` is echoed on stdout.
#[derive(Debug, Clone, PartialEq)]
pub struct Outputs {
    pub primary: String,
    pub artifacts: Vec<Artifact>,
    pub warnings: Vec<String>,
}

impl Outputs {
    fn new(primary_name: &str, primary: String) -> Self {
        Outputs {
            artifacts: vec![Artifact {
                name: primary_name.to_string(),
                contents: primary.clone(),
            }],
            primary,
            warnings: Vec::new(),
        }
    }

    fn add(&mut self, name: impl Into<String>, contents: String) {
        self.artifacts.push(Artifact {
            name: name.into(),
            contents,
        });
    }
}

pub fn exit_code(err: &Error) -> i32 {
    if err.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_CONFIG
    }
}

/// Parse `argv` and run; returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli.command) {
        Ok(out) => {
            for w in &out.warnings {
                eprintln!("zml: warning: {w}");
            }
            print!("{}", out.primary);
            EXIT_OK
        }
        Err(e) => {
            eprintln!("zml: error: {e}");
            exit_code(&e)
        }
    }
}

/// Run a subcommand and write its artifacts.
pub fn run(command: &Command) -> Result<Outputs> {
    let args = command.args();
    let cfg = RunConfig::load(&args.config)?;
    let plots = args.plots || cfg.emit_plots;
    let outputs = compute(command, &cfg, plots)?;
    let dir = args
        .out
        .clone()
        .or_else(|| cfg.output_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    write_artifacts(&dir, &outputs.artifacts)?;
    Ok(outputs)
}

fn write_artifacts(dir: &Path, artifacts: &[Artifact]) -> Result<()> {
    let io = |e: std::io::Error| Error::Config(format!("cannot write to {}: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(io)?;
    for a in artifacts {
        std::fs::write(dir.join(&a.name), &a.contents).map_err(io)?;
    }
    Ok(())
}

/// Compute all outputs of a subcommand without touching the filesystem.
pub fn compute(command: &Command, cfg: &RunConfig, plots: bool) -> Result<Outputs> {
    let profile = cfg.profile()?;
    match command {
        Command::Flux(_) => cmd_flux(&profile),
        Command::Potential(_) => cmd_potential(&profile, cfg, plots),
        Command::Modes(_) => cmd_modes(&profile, cfg, plots),
        Command::Scan(_) => cmd_scan(&profile, cfg),
        Command::Spectrum(_) => cmd_spectrum(&profile, cfg, plots),
        Command::Count(_) => cmd_count(&profile, cfg),
        Command::Verify(_) => cmd_verify(&profile, cfg),
        Command::Modes2d(_) => cmd_modes2d(&profile, cfg, plots),
    }
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    to_json(v).map_err(|e| Error::Config(format!("report serialization: {e}")))
}

fn require_line(profile: &FieldProfile, hint: &str) -> Result<()> {
    if profile.dimension() == Dimension::Line {
        Ok(())
    } else {
        Err(Error::param(
            "profile.dimension",
            format!("this subcommand needs a line profile{hint}"),
        ))
    }
}

fn cmd_flux(profile: &FieldProfile) -> Result<Outputs> {
    let flux = total_flux(profile);
    let key = match profile.dimension() {
        Dimension::Line => "Q",
        Dimension::RadialPlane => "Phi",
    };
    let report = json!({
        key: flux.value,
        "method": flux.method,
        "dimension": profile.dimension(),
    });
    Ok(Outputs::new("flux.json", json(&report)?))
}

fn cmd_potential(profile: &FieldProfile, cfg: &RunConfig, plots: bool) -> Result<Outputs> {
    let grid = cfg.grid()?;
    let quad = cfg.quadrature()?;
    let margin = 2.0 * grid.h();
    let (report, table, xs, ys) = match profile.dimension() {
        Dimension::Line => {
            let pot = lambda_1d_with(profile, cfg.k, &grid, &quad)?;
            let residual = poisson_residual(&pot, profile, margin)?;
            let report = json!({
                "Q": pot.flux.value,
                "k": pot.k,
                "slope_left": pot.slope_left,
                "slope_right": pot.slope_right,
                "n": grid.len(),
                "h": grid.h(),
                "poisson_residual": residual,
            });
            let mut t = CsvTable::new(&["x", "lambda"]);
            for (x, v) in grid.points().zip(&pot.values) {
                t.push(vec![x.into(), (*v).into()]);
            }
            (report, t, grid.to_vec(), pot.values)
        }
        Dimension::RadialPlane => {
            let pot = lambda_2d_radial_with(profile, &grid, &quad)?;
            let residual = radial_poisson_residual(&pot, profile, margin)?;
            let report = json!({
                "Phi": pot.flux.value,
                "log_coefficient": pot.log_coefficient(),
                "n": grid.len(),
                "h": grid.h(),
                "poisson_residual": residual,
            });
            let mut t = CsvTable::new(&["r", "lambda"]);
            for (r, v) in grid.points().zip(&pot.values) {
                t.push(vec![r.into(), (*v).into()]);
            }
            (report, t, grid.to_vec(), pot.values)
        }
    };
    let mut out = Outputs::new("potential.json", json(&report)?);
    out.add("potential.csv", table.render());
    if plots {
        out.add(
            "potential.svg",
            svg_polyline("scalar potential", "x", "lambda", &xs, &ys),
        );
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeVerdict {
    pub sector: SpinSector,
    pub k: f64,
    pub normalizable: bool,
    pub l2_norm: Option<f64>,
    pub log_l2_norm: Option<f64>,
    pub window: [f64; 2],
}

fn window_of(profile: &FieldProfile) -> [f64; 2] {
    let (_, w) = admissible_k_interval(&total_flux(profile));
    [w.lo, w.hi]
}

fn cmd_modes(profile: &FieldProfile, cfg: &RunConfig, plots: bool) -> Result<Outputs> {
    require_line(profile, "; use modes2d for radial profiles")?;
    let sector = cfg.sector()?;
    let grid = cfg.grid()?;
    let mode = build_mode_1d(profile, cfg.k, sector, &grid)?;
    let verdict = ModeVerdict {
        sector,
        k: cfg.k,
        normalizable: mode.normalizable,
        l2_norm: mode.l2_norm(),
        log_l2_norm: mode.log_l2_norm.is_finite().then_some(mode.log_l2_norm),
        window: window_of(profile),
    };
    let mut t = CsvTable::new(&["x", "log_psi", "psi"]);
    for ((x, l), v) in grid.points().zip(&mode.log_values).zip(&mode.values) {
        t.push(vec![x.into(), (*l).into(), (*v).into()]);
    }
    let mut out = Outputs::new("modes.json", json(&verdict)?);
    out.add("modes.csv", t.render());
    if plots {
        out.add(
            "modes.svg",
            svg_polyline(
                "zero-mode candidate",
                "x",
                "log psi",
                &grid.to_vec(),
                &mode.log_values,
            ),
        );
    }
    Ok(out)
}

fn cmd_scan(profile: &FieldProfile, cfg: &RunConfig) -> Result<Outputs> {
    require_line(profile, "")?;
    let sector = cfg.sector()?;
    let grid = cfg.grid()?;
    let verdicts = scan_k(profile, sector, cfg.k_list()?, &grid)?;
    let report = json!({
        "Q": total_flux(profile).value,
        "sector": sector,
        "window": window_of(profile),
        "verdicts": verdicts,
    });
    let mut t = CsvTable::new(&["k", "normalizable", "l2_norm"]);
    for v in &verdicts {
        t.push(vec![v.k.into(), v.normalizable.into(), v.l2_norm.into()]);
    }
    let mut out = Outputs::new("scan.json", json(&report)?);
    out.add("scan.csv", t.render());
    Ok(out)
}

fn cmd_spectrum(profile: &FieldProfile, cfg: &RunConfig, plots: bool) -> Result<Outputs> {
    require_line(profile, "")?;
    let grid = cfg.grid()?;
    let basis =
        ChannelBasis::with_quadrature(profile, &grid, cfg.dense_cap()?, &cfg.quadrature()?)?;
    let op = basis.channel(cfg.ky)?;
    let tau = cfg
        .zero_tol()?
        .unwrap_or_else(|| default_zero_tolerance(profile, &grid));
    let spectrum = eigen_spectrum(&op, tau)?;
    let report = json!({
        "ky": cfg.ky,
        "zero_tol": tau,
        "near_zero_count": spectrum.near_zero_count,
        "zero_modes": count_near_zero(&spectrum),
        "continuum_threshold": spectrum.continuum_threshold,
        "first_positive": spectrum.first_positive(),
        "interior_points": op.interior_len(),
    });
    let mut t = CsvTable::new(&["channel_ky", "index", "eigenvalue"]);
    for (i, e) in spectrum.eigenvalues.iter().enumerate() {
        t.push(vec![cfg.ky.into(), i.into(), (*e).into()]);
    }
    let mut out = Outputs::new("spectrum.json", json(&report)?);
    out.add("spectrum.csv", t.render());
    out.warnings.extend(tolerance_warning(profile, tau));
    if plots {
        let idx: Vec<f64> = (0..spectrum.eigenvalues.len()).map(|i| i as f64).collect();
        out.add(
            "spectrum.svg",
            svg_polyline(
                "channel spectrum",
                "index",
                "E",
                &idx,
                &spectrum.eigenvalues,
            ),
        );
    }
    Ok(out)
}

/// Planar zero-mode count as reported by `count` on radial profiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarCountReport {
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "Phi")]
    pub phi: f64,
    pub sector: SpinSector,
    pub integer_flux: bool,
    pub strict_count: u64,
}

fn cmd_count(profile: &FieldProfile, cfg: &RunConfig) -> Result<Outputs> {
    let primary = match profile.dimension() {
        Dimension::Line => json(&admissible_channels(profile, &cfg.reduction()?)?)?,
        Dimension::RadialPlane => {
            let flux = total_flux(profile);
            let c = count_2d_zero_modes(&flux);
            json(&PlanarCountReport {
                n: c.n,
                phi: flux.value,
                sector: c.sector,
                integer_flux: c.integer_flux,
                strict_count: c.strict_count,
            })?
        }
    };
    Ok(Outputs::new("count.json", primary))
}

fn cmd_verify(profile: &FieldProfile, cfg: &RunConfig) -> Result<Outputs> {
    require_line(profile, "")?;
    let grid = cfg.grid()?;
    let opts = cfg.verify_options()?;
    let report = verify_degeneracy_with(profile, &cfg.reduction()?, cfg.level, &grid, &opts)?;
    let mut t = CsvTable::new(&["n", "ky", "admissible", "count"]);
    for c in &report.channels {
        t.push(vec![
            c.n.into(),
            c.ky.into(),
            c.admissible.into(),
            c.near_zero_count
                .map_or(Cell::Empty, |v| Cell::Int(v as i64)),
        ]);
    }
    let mut out = Outputs::new("verify.json", json(&report)?);
    out.add("verify.csv", t.render());
    let tau = opts
        .zero_tol
        .unwrap_or_else(|| default_zero_tolerance(profile, &grid));
    out.warnings.extend(tolerance_warning(profile, tau));
    if report.discrepancy > 1 {
        out.warnings.push(format!(
            "level {} count {} differs from the analytic degeneracy {} by more than one",
            cfg.level,
            report.g_numeric.unwrap_or(0),
            report.g_analytic
        ));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarModeVerdict {
    pub j: u32,
    pub tail_exponent: f64,
    pub normalizable: bool,
    pub counting_rule: bool,
    pub rules_disagree: bool,
}

fn cmd_modes2d(profile: &FieldProfile, cfg: &RunConfig, plots: bool) -> Result<Outputs> {
    if profile.dimension() != Dimension::RadialPlane {
        return Err(Error::param(
            "profile.dimension",
            "modes2d needs a radial-plane profile",
        ));
    }
    let radii = cfg.grid()?;
    let pot = lambda_2d_radial_with(profile, &radii, &cfg.quadrature()?)?;
    let count = count_2d_zero_modes(&pot.flux);
    let j_max = cfg.j_max.unwrap_or(count.n as u32);
    let modes: Vec<_> = (0..=j_max)
        .map(|j| mode_2d_from_potential(&pot, j))
        .collect();
    let verdicts: Vec<PlanarModeVerdict> = modes
        .iter()
        .map(|m| PlanarModeVerdict {
            j: m.j,
            tail_exponent: m.tail_exponent,
            normalizable: m.normalizable,
            counting_rule: m.counting_rule,
            rules_disagree: m.rules_disagree(),
        })
        .collect();
    let report = json!({
        "Phi": pot.flux.value,
        "N": count.n,
        "sector": count.sector,
        "modes": verdicts,
    });
    let mut t = CsvTable::new(&["j", "r", "log_psi", "psi"]);
    for m in &modes {
        for ((r, l), v) in radii.points().zip(&m.log_values).zip(&m.values) {
            t.push(vec![
                Cell::Int(i64::from(m.j)),
                r.into(),
                (*l).into(),
                (*v).into(),
            ]);
        }
    }
    let mut out = Outputs::new("modes2d.json", json(&report)?);
    out.add("modes2d.csv", t.render());
    if plots {
        for m in &modes {
            out.add(
                format!("modes2d_j{}.svg", m.j),
                svg_polyline(
                    &format!("planar mode j = {}", m.j),
                    "r",
                    "log psi",
                    &radii.to_vec(),
                    &m.log_values,
                ),
            );
        }
    }
    Ok(out)
}
