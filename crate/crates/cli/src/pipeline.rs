//! Stage orchestration: ingest (S0), fit (S1), cut-off search (S2), pressure
//! gradient (S3) and assembly (S4), plus the artifacts each command writes.

use crate::config::{GeometrySpec, RunConfig, WaveformSpec};
use crate::error::CliError;
use crate::output::{write_file, write_json, Cell, Csv};
use pulseflow::inverse::{assemble, lambda_from_flux};
use pulseflow::oracle::{compare_profiles, direct_solve, semi_axis_points, PhaseDeviation};
use pulseflow::waveform::{diagnostics, fit_correlation, select_modes, FlowDiagnostics};
use pulseflow::womersley_circle::CircleFlow;
use pulseflow::{
    build_basis, fourier_fit, ingest_csv, solve_stationary, Basis, FlowSolution, FourierWaveform,
    PressureGradientSeries, SampledWaveform, SectionGeometry, TruncationReport,
};
use serde::Serialize;
use std::path::Path;
use std::time::Instant;

pub const S0: &str = "S0 ingest";
pub const S1: &str = "S1 fit";
pub const S2: &str = "S2 truncation";
pub const S3: &str = "S3 pressure gradient";
pub const S4: &str = "S4 assembly";
pub const FLUX_CHECK: &str = "flux check";
pub const ORACLE: &str = "oracle";
pub const OUTPUT: &str = "output";

/// Samples per period in `lambda.csv` and in the flux round-trip check.
const TIME_SAMPLES: usize = 256;

#[derive(Debug, Clone, Serialize)]
pub struct StageTiming {
    pub stage: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seconds: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Wall-clock record, kept apart from the deterministic artifacts.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Timings {
    pub stages: Vec<StageTiming>,
}

impl Timings {
    pub fn time<T>(&mut self, stage: &'static str, f: impl FnOnce() -> Result<T, CliError>) -> Result<T, CliError> {
        let start = Instant::now();
        let out = f()?;
        let seconds = start.elapsed().as_secs_f64();
        log::info!("{stage}: {seconds:.3} s");
        self.stages.push(StageTiming { stage, seconds: Some(seconds), note: None });
        Ok(out)
    }

    pub fn skip(&mut self, stage: &'static str, note: impl Into<String>) {
        let note = note.into();
        log::info!("{stage}: skipped ({note})");
        self.stages.push(StageTiming { stage, seconds: None, note: Some(note) });
    }

    pub fn seconds(&self, stage: &str) -> Option<f64> {
        self.stages.iter().find(|s| s.stage == stage).and_then(|s| s.seconds)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CutoffSummary {
    pub max_mode: usize,
    pub intervals: usize,
    pub nstar_mu: usize,
    pub nstar_s: usize,
    pub nstar: usize,
}

impl From<&TruncationReport> for CutoffSummary {
    fn from(r: &TruncationReport) -> Self {
        Self { max_mode: r.max_mode, intervals: r.intervals, nstar_mu: r.nstar_mu, nstar_s: r.nstar_s, nstar: r.nstar }
    }
}

/// Deterministic run summary.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub command: &'static str,
    pub geometry: GeometrySpec,
    pub section: SectionGeometry,
    pub nu: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub period: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub correlation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation: Option<CutoffSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<FlowDiagnostics>,
    pub mean_flux: f64,
    pub mean_speed: f64,
    /// `[re, im]` of the pressure-gradient coefficients, `m = 0..=M`.
    pub lambda: Vec<[f64; 2]>,
    /// Max over the period of `|recovered flux - f| / max |f|`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flux_roundtrip: Option<f64>,
}

/// Result of the S0-S1 stages.
pub struct Fitted {
    pub sampled: SampledWaveform,
    pub fit: FourierWaveform,
    pub modes: usize,
    pub correlation: f64,
}

pub fn ingest(spec: &WaveformSpec, timings: &mut Timings) -> Result<SampledWaveform, CliError> {
    timings.time(S0, || ingest_csv(&spec.path, spec.period).map_err(CliError::stage(S0)))
}

pub fn fit(cfg: &RunConfig, sampled: SampledWaveform, timings: &mut Timings) -> Result<Fitted, CliError> {
    timings.time(S1, || {
        let (modes, fit) = match cfg.modes {
            Some(m) => (m, fourier_fit(&sampled, m).map_err(CliError::stage(S1))?),
            None => select_modes(&sampled, cfg.pearson()).map_err(CliError::stage(S1))?,
        };
        if modes > cfg.max_mode {
            return Err(CliError::Config(format!("fit needs {modes} modes, above max_mode = {}", cfg.max_mode)));
        }
        let correlation = fit_correlation(&sampled, &fit).map_err(CliError::stage(S1))?;
        log::info!("fit with M = {modes}, correlation {correlation}");
        Ok(Fitted { sampled, fit, modes, correlation })
    })
}

fn waveform_spec(cfg: &RunConfig) -> Result<&WaveformSpec, CliError> {
    cfg.waveform.as_ref().ok_or_else(|| CliError::Config("a waveform is required for this command".into()))
}

pub fn basis(cfg: &RunConfig, g: &SectionGeometry, period: f64, timings: &mut Timings) -> Result<Basis, CliError> {
    timings.time(S2, || {
        let b = build_basis(g, cfg.nu, period, &cfg.truncation()).map_err(CliError::stage(S2))?;
        let r = b.report();
        log::info!("N* = {} (mu: {}, s: {})", r.nstar, r.nstar_mu, r.nstar_s);
        Ok(b)
    })
}

pub fn solve_on_basis(basis: &Basis, fw: &FourierWaveform, timings: &mut Timings) -> Result<FlowSolution, CliError> {
    if fw.modes() > basis.max_mode() {
        return Err(CliError::Config(format!("waveform has {} modes, basis only {}", fw.modes(), basis.max_mode())));
    }
    let lambda = timings.time(S3, || lambda_from_flux(fw, basis.stacks()).map_err(CliError::stage(S3)))?;
    timings.time(S4, || {
        assemble(basis.geometry(), basis.nu(), fw, basis.stacks(), &lambda).map_err(CliError::stage(S4))
    })
}

/// Worst relative flux mismatch over one period.
pub fn flux_roundtrip(sol: &FlowSolution) -> f64 {
    let fw = sol.waveform();
    let scale = fw.max_over_period();
    (0..TIME_SAMPLES)
        .map(|k| {
            let t = fw.period() * k as f64 / TIME_SAMPLES as f64;
            (sol.recovered_flux(t) - fw.reconstruct(t)).abs()
        })
        .fold(0.0, f64::max)
        / scale
}

fn lambda_pairs(l: &PressureGradientSeries) -> Vec<[f64; 2]> {
    l.coeffs().iter().map(|c| [c.re, c.im]).collect()
}

fn profiles_csv(
    g: &SectionGeometry,
    phases: &[f64],
    points: usize,
    mean_speed: f64,
    mut w: impl FnMut(f64, f64, f64) -> pulseflow::Result<f64>,
) -> Result<String, CliError> {
    let pts = semi_axis_points(g, points);
    let mut csv = Csv::new(&["t_over_T", "axis", "coordinate", "w", "w_over_mean"]);
    for &phase in phases {
        for (i, &(x1, x2)) in pts.iter().enumerate() {
            let (axis, coord) = if i < points { ("major", x1) } else { ("minor", x2) };
            let v = w(phase, x1, x2).map_err(CliError::stage(S4))?;
            let ratio = if mean_speed != 0.0 { Cell::F(v / mean_speed) } else { Cell::Empty };
            csv.row(&[Cell::F(phase), Cell::S(axis), Cell::F(coord), Cell::F(v), ratio]);
        }
    }
    Ok(csv.finish())
}

fn lambda_csv(period: f64, f: impl Fn(f64) -> f64, lambda: impl Fn(f64) -> f64) -> String {
    let mut csv = Csv::new(&["t_over_T", "t", "f", "lambda"]);
    for k in 0..TIME_SAMPLES {
        let s = k as f64 / TIME_SAMPLES as f64;
        let t = s * period;
        csv.row(&[Cell::F(s), Cell::F(t), Cell::F(f(t)), Cell::F(lambda(t))]);
    }
    csv.finish()
}

/// Closed-form steady flow; also used by `solve` for steady-only configs.
pub fn run_stationary(cfg: &RunConfig, flux: f64, dir: &Path, timings: &mut Timings) -> Result<Summary, CliError> {
    let g = cfg.geometry.build().map_err(|e| CliError::Config(e.to_string()))?;
    let sol = timings.time(S3, || solve_stationary(&g, cfg.nu, flux).map_err(CliError::stage(S3)))?;
    let mean_speed = flux / g.area();
    let summary = Summary {
        command: "stationary",
        geometry: cfg.geometry,
        section: g,
        nu: cfg.nu,
        period: None,
        modes: Some(0),
        correlation: None,
        truncation: None,
        diagnostics: None,
        mean_flux: flux,
        mean_speed,
        lambda: vec![[sol.lambda(), 0.0]],
        flux_roundtrip: None,
    };
    timings.time(OUTPUT, || {
        let profiles = profiles_csv(&g, &[0.0], cfg.profile_points, mean_speed, |_, x1, x2| Ok(sol.velocity(x1, x2)))?;
        write_file(dir, "profiles.csv", &profiles)?;
        write_file(dir, "lambda.csv", &lambda_csv(1.0, |_| flux, |_| sol.lambda()))?;
        write_json(dir, "summary.json", &summary)
    })?;
    Ok(summary)
}

/// Exact pulsatile flow in a circular pipe.
pub fn run_circle(cfg: &RunConfig, dir: &Path, timings: &mut Timings) -> Result<Summary, CliError> {
    let g = cfg.geometry.build().map_err(|e| CliError::Config(e.to_string()))?;
    let SectionGeometry::Circle { radius } = g else {
        return Err(CliError::Config("circle-inverse needs a circle geometry".into()));
    };
    let sampled = ingest(waveform_spec(cfg)?, timings)?;
    let fitted = fit(cfg, sampled, timings)?;
    let fw = &fitted.fit;
    let flow = timings.time(S3, || CircleFlow::solve(radius, cfg.nu, fw).map_err(CliError::stage(S3)))?;
    let diag = diagnostics(fw, &g, cfg.nu).map_err(CliError::stage(S1))?;
    let summary = Summary {
        command: "circle-inverse",
        geometry: cfg.geometry,
        section: g,
        nu: cfg.nu,
        period: Some(fw.period()),
        modes: Some(fitted.modes),
        correlation: Some(fitted.correlation),
        truncation: None,
        diagnostics: Some(diag),
        mean_flux: fw.mean(),
        mean_speed: diag.mean_speed,
        lambda: lambda_pairs(&flow.lambda),
        flux_roundtrip: None,
    };
    timings.time(OUTPUT, || {
        let period = fw.period();
        let profiles = profiles_csv(&g, &cfg.phases, cfg.profile_points, diag.mean_speed, |phase, x1, x2| {
            flow.velocity(phase * period, x1.hypot(x2))
        })?;
        write_file(dir, "profiles.csv", &profiles)?;
        write_file(dir, "lambda.csv", &lambda_csv(period, |t| fw.reconstruct(t), |t| flow.lambda.reconstruct(t)))?;
        write_json(dir, "summary.json", &summary)
    })?;
    Ok(summary)
}

pub struct SolveOptions {
    pub emit_contours: bool,
}

/// Outcome of `solve`; the basis is kept for reuse.
pub struct SolveRun {
    pub summary: Summary,
    pub basis: Option<Basis>,
    pub solution: Option<FlowSolution>,
}

/// Full inverse pipeline, S0-S4, writing all artifacts to `dir`.
pub fn run_pipeline(
    cfg: &RunConfig,
    dir: &Path,
    opts: &SolveOptions,
    timings: &mut Timings,
) -> Result<SolveRun, CliError> {
    if let (None, Some(flux)) = (&cfg.waveform, cfg.flux) {
        let summary = run_stationary(cfg, flux, dir, timings)?;
        return Ok(SolveRun { summary, basis: None, solution: None });
    }
    if matches!(cfg.geometry, GeometrySpec::Circle { .. }) {
        let summary = run_circle(cfg, dir, timings)?;
        return Ok(SolveRun { summary, basis: None, solution: None });
    }
    let g = cfg.geometry.build().map_err(|e| CliError::Config(e.to_string()))?;
    g.eta_domain().map_err(|e| CliError::Config(e.to_string()))?;
    let sampled = ingest(waveform_spec(cfg)?, timings)?;
    let fitted = fit(cfg, sampled, timings)?;
    let b = basis(cfg, &g, fitted.fit.period(), timings)?;
    let (summary, sol) = finish_solve(cfg, &g, &b, &fitted, dir, opts, timings)?;
    Ok(SolveRun { summary, basis: Some(b), solution: Some(sol) })
}

/// S3-S4 and outputs against an existing basis.
pub fn finish_solve(
    cfg: &RunConfig,
    g: &SectionGeometry,
    basis: &Basis,
    fitted: &Fitted,
    dir: &Path,
    opts: &SolveOptions,
    timings: &mut Timings,
) -> Result<(Summary, FlowSolution), CliError> {
    let fw = &fitted.fit;
    if (basis.period() - fw.period()).abs() > 1e-12 * fw.period() {
        return Err(CliError::Config(format!(
            "waveform period {} differs from the cached basis period {}",
            fw.period(),
            basis.period()
        )));
    }
    let sol = solve_on_basis(basis, fw, timings)?;
    let diag = diagnostics(fw, g, cfg.nu).map_err(CliError::stage(S1))?;
    let roundtrip = timings.time(FLUX_CHECK, || Ok(flux_roundtrip(&sol)))?;
    let summary = Summary {
        command: "solve",
        geometry: cfg.geometry,
        section: *g,
        nu: cfg.nu,
        period: Some(fw.period()),
        modes: Some(fitted.modes),
        correlation: Some(fitted.correlation),
        truncation: Some(basis.report().into()),
        diagnostics: Some(diag),
        mean_flux: fw.mean(),
        mean_speed: diag.mean_speed,
        lambda: lambda_pairs(sol.lambda()),
        flux_roundtrip: Some(roundtrip),
    };
    timings.time(OUTPUT, || {
        let period = fw.period();
        let profiles = profiles_csv(g, &cfg.phases, cfg.profile_points, diag.mean_speed, |phase, x1, x2| {
            sol.velocity_cartesian(phase * period, x1, x2)
        })?;
        write_file(dir, "profiles.csv", &profiles)?;
        write_file(dir, "lambda.csv", &lambda_csv(period, |t| fw.reconstruct(t), |t| sol.lambda().reconstruct(t)))?;
        let report = basis.report();
        if opts.emit_contours {
            write_json(dir, "truncation.json", report)?;
            let mut csv = Csv::new(&["cutoff", "m", "mu", "s"]);
            for e in &report.entries {
                csv.row(&[Cell::U(e.cutoff), Cell::U(e.m), Cell::F(e.mu), Cell::F(e.s)]);
            }
            write_file(dir, "contours.csv", &csv.finish())?;
        } else {
            let brief = TruncationReport { entries: Vec::new(), ..report.clone() };
            write_json(dir, "truncation.json", &brief)?;
        }
        write_json(dir, "summary.json", &summary)
    })?;
    Ok((summary, sol))
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub periods: usize,
    pub periodicity_change: f64,
    pub eta_intervals: usize,
    pub theta_points: usize,
    pub steps_per_period: usize,
    /// RMS of `oracle flux - f` over the final period, relative to RMS `f`.
    pub flux_rms: f64,
    pub peak_speed: f64,
    pub phases: Vec<PhaseDeviation>,
    pub max_deviation: f64,
    /// Both measures below one percent.
    pub within_budget: bool,
}

/// Solves the inverse problem, then drives the direct solver with the
/// computed pressure gradient and compares.
pub fn run_oracle_check(cfg: &RunConfig, dir: &Path, timings: &mut Timings) -> Result<OracleReport, CliError> {
    let run = run_pipeline(cfg, dir, &SolveOptions { emit_contours: false }, timings)?;
    let sol = run
        .solution
        .ok_or_else(|| CliError::Config("oracle-check needs a pulsatile elliptical or annular run".into()))?;
    let settings = cfg.oracle_settings();
    let g = *sol.geometry();
    let direct = timings.time(ORACLE, || {
        direct_solve(&g, sol.nu(), sol.lambda(), &settings).map_err(CliError::stage(ORACLE))
    })?;
    let fw = sol.waveform();
    let flux_rms = direct.flux_rms_error(|t| fw.reconstruct(t));
    let cmp = compare_profiles(&direct, &sol).map_err(CliError::stage(ORACLE))?;
    let max_deviation = cmp.max_deviation();
    let report = OracleReport {
        periods: direct.periods,
        periodicity_change: direct.change,
        eta_intervals: settings.eta_intervals,
        theta_points: settings.theta_points,
        steps_per_period: settings.steps_per_period,
        flux_rms,
        peak_speed: cmp.peak,
        phases: cmp.phases.clone(),
        max_deviation,
        within_budget: flux_rms < 0.01 && max_deviation < 0.01,
    };
    timings.time(OUTPUT, || {
        let mut csv = Csv::new(&["t", "f", "oracle_flux"]);
        for (&t, &q) in direct.times.iter().zip(&direct.flux) {
            csv.row(&[Cell::F(t), Cell::F(fw.reconstruct(t)), Cell::F(q)]);
        }
        write_file(dir, "oracle_flux.csv", &csv.finish())?;
        let pts = semi_axis_points(&g, cfg.profile_points);
        let mut csv = Csv::new(&["t_over_T", "axis", "coordinate", "w_inverse", "w_oracle"]);
        for snap in &direct.snapshots {
            for (i, &(x1, x2)) in pts.iter().enumerate() {
                let (axis, coord) = if i < cfg.profile_points { ("major", x1) } else { ("minor", x2) };
                let wi = sol.velocity_cartesian(snap.time, x1, x2).map_err(CliError::stage(ORACLE))?;
                let wo = direct.velocity_cartesian(snap, x1, x2).map_err(CliError::stage(ORACLE))?;
                csv.row(&[Cell::F(snap.phase), Cell::S(axis), Cell::F(coord), Cell::F(wi), Cell::F(wo)]);
            }
        }
        write_file(dir, "oracle_profiles.csv", &csv.finish())?;
        write_json(dir, "oracle.json", &report)
    })?;
    Ok(report)
}

/// Runs S3-S4 for several waveforms against one basis, built for the first.
/// Each waveform gets a subdirectory named after its file stem.
pub fn run_sweep(
    cfg: &RunConfig,
    waveforms: &[WaveformSpec],
    opts: &SolveOptions,
) -> Result<Vec<(String, Summary, Timings)>, CliError> {
    if waveforms.is_empty() {
        return Err(CliError::Config("sweep needs at least one waveform".into()));
    }
    let g = cfg.geometry.build().map_err(|e| CliError::Config(e.to_string()))?;
    g.eta_domain().map_err(|e| CliError::Config(e.to_string()))?;
    let mut cached: Option<Basis> = None;
    let mut out = Vec::new();
    for (i, spec) in waveforms.iter().enumerate() {
        let name = spec
            .path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| format!("waveform_{i}"));
        let name = if out.iter().any(|(n, _, _): &(String, Summary, Timings)| *n == name) {
            format!("{name}_{i}")
        } else {
            name
        };
        let mut timings = Timings::default();
        let sampled = ingest(spec, &mut timings)?;
        let fitted = fit(cfg, sampled, &mut timings)?;
        let reuse = cached.as_ref().is_some_and(|b| (b.period() - fitted.fit.period()).abs() <= 1e-12 * b.period());
        if reuse {
            timings.skip(S2, "reused cached basis");
        } else {
            cached = Some(basis(cfg, &g, fitted.fit.period(), &mut timings)?);
        }
        let b = cached.as_ref().expect("basis available");
        let dir = cfg.output.join(&name);
        let (summary, _) = finish_solve(cfg, &g, b, &fitted, &dir, opts, &mut timings)?;
        write_json(&dir, "timings.json", &timings)?;
        out.push((name, summary, timings));
    }
    Ok(out)
}
