//! Periodic flow-rate waveforms: ingestion, truncated Fourier fits and the
//! nondimensional numbers used to label a flow.
//!
//! A real `T`-periodic signal is stored through its coefficients `f_m` for
//! `m = 0..=M`; the negative modes follow from `f_{-m} = conj(f_m)`, so
//!
//! ```text
//! f(t) = f_0 + 2 sum_{m=1}^{M} Re(f_m exp(i w_m t)),   w_m = 2 pi m / T.
//! ```

use crate::error::{Error, Result};
use crate::geometry::SectionGeometry;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::Path;

pub const MIN_SAMPLES: usize = 4;

/// Default Pearson threshold used when selecting the number of modes.
pub const DEFAULT_PEARSON_THRESHOLD: f64 = 1.0 - 1e-3;

/// Flow-rate samples over one period.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledWaveform {
    times: Vec<f64>,
    values: Vec<f64>,
    period: f64,
}

impl SampledWaveform {
    pub fn new(times: Vec<f64>, values: Vec<f64>, period: f64) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::InvalidInput(format!(
                "{} times but {} values",
                times.len(),
                values.len()
            )));
        }
        if times.len() < MIN_SAMPLES {
            return Err(Error::TooFewSamples { required: MIN_SAMPLES, got: times.len() });
        }
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidInput(format!("period must be positive, got {period}")));
        }
        for (row, w) in times.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(Error::NonMonotonicTime { row: row + 1 });
            }
        }
        if times[0] < 0.0 || *times.last().unwrap() >= period {
            return Err(Error::InvalidInput(format!(
                "sample times must lie in [0, {period}), got [{}, {}]",
                times[0],
                times.last().unwrap()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite flow rate {v}")));
        }
        Ok(Self { times, values, period })
    }

    /// Builds from `(t, f)` pairs. When `period` is `None` it is inferred as
    /// the last time plus the median sample spacing.
    pub fn from_pairs(pairs: &[(f64, f64)], period: Option<f64>) -> Result<Self> {
        let mut times = Vec::with_capacity(pairs.len());
        let mut values = Vec::with_capacity(pairs.len());
        for (row, &(t, f)) in pairs.iter().enumerate() {
            if let Some(&last) = times.last() {
                if t == last && values.last() == Some(&f) {
                    continue; // repeated row
                }
                if t <= last {
                    return Err(Error::NonMonotonicTime { row });
                }
            }
            times.push(t);
            values.push(f);
        }
        if times.len() < MIN_SAMPLES {
            return Err(Error::TooFewSamples { required: MIN_SAMPLES, got: times.len() });
        }
        let period = match period {
            Some(p) => p,
            None => {
                let mut dt: Vec<f64> = times.windows(2).map(|w| w[1] - w[0]).collect();
                dt.sort_by(f64::total_cmp);
                let median = if dt.len() % 2 == 1 {
                    dt[dt.len() / 2]
                } else {
                    0.5 * (dt[dt.len() / 2 - 1] + dt[dt.len() / 2])
                };
                times.last().unwrap() + median
            }
        };
        Self::new(times, values, period)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    fn is_uniform(&self) -> bool {
        let n = self.len() as f64;
        let dt = self.period / n;
        let t0 = self.times[0];
        self.times
            .iter()
            .enumerate()
            .all(|(k, t)| (t - t0 - dt * k as f64).abs() <= 1e-9 * self.period)
    }

    /// Periodic linear interpolation of the samples.
    pub fn interpolate(&self, t: f64) -> f64 {
        let t = t.rem_euclid(self.period);
        let n = self.len();
        let idx = self.times.partition_point(|&s| s <= t);
        let (t_lo, f_lo, t_hi, f_hi) = if idx == 0 {
            (
                self.times[n - 1] - self.period,
                self.values[n - 1],
                self.times[0],
                self.values[0],
            )
        } else if idx == n {
            (
                self.times[n - 1],
                self.values[n - 1],
                self.times[0] + self.period,
                self.values[0],
            )
        } else {
            (self.times[idx - 1], self.values[idx - 1], self.times[idx], self.values[idx])
        };
        let w = (t - t_lo) / (t_hi - t_lo);
        f_lo + w * (f_hi - f_lo)
    }
}

/// Reads a two-column `t,f` CSV. Lines starting with `#` are comments and a
/// leading non-numeric header row is skipped.
pub fn ingest_csv(path: impl AsRef<Path>, period: Option<f64>) -> Result<SampledWaveform> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_csv(&text, period)
}

pub fn parse_csv(text: &str, period: Option<f64>) -> Result<SampledWaveform> {
    let mut pairs = Vec::new();
    let mut seen_data = false;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() < 2 {
            return Err(Error::Parse { line: i + 1, message: "expected two columns".into() });
        }
        match (fields[0].parse::<f64>(), fields[1].parse::<f64>()) {
            (Ok(t), Ok(f)) => {
                seen_data = true;
                pairs.push((t, f));
            }
            _ if !seen_data => continue, // header
            _ => {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("cannot parse `{line}` as numbers"),
                })
            }
        }
    }
    SampledWaveform::from_pairs(&pairs, period)
}

/// Truncated Fourier series of a real periodic signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierWaveform {
    period: f64,
    coeffs: Vec<Complex64>,
}

impl FourierWaveform {
    /// `coeffs[m]` is `f_m` for `m = 0..=M`; the imaginary part of `f_0` is
    /// discarded.
    pub fn new(period: f64, mut coeffs: Vec<Complex64>) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidInput(format!("period must be positive, got {period}")));
        }
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("at least the mean coefficient is required".into()));
        }
        coeffs[0].im = 0.0;
        Ok(Self { period, coeffs })
    }

    /// A constant (steady) signal.
    pub fn steady(period: f64, value: f64) -> Result<Self> {
        Self::new(period, vec![Complex64::new(value, 0.0)])
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Highest retained mode `M`.
    pub fn modes(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, m: usize) -> Complex64 {
        self.coeffs.get(m).copied().unwrap_or_default()
    }

    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    pub fn omega(&self, m: usize) -> f64 {
        angular_frequency(self.period, m as i32)
    }

    /// Value at time `t`.
    pub fn reconstruct(&self, t: f64) -> f64 {
        let w = 2.0 * PI / self.period;
        self.coeffs.iter().enumerate().skip(1).fold(self.coeffs[0].re, |acc, (m, c)| {
            acc + 2.0 * (c * Complex64::from_polar(1.0, w * m as f64 * t)).re
        })
    }

    /// Sum over `m = -M..=M` without using the conjugate symmetry; its
    /// imaginary part measures the reality of the representation.
    pub fn reconstruct_complex(&self, t: f64) -> Complex64 {
        let w = 2.0 * PI / self.period;
        let mut acc = self.coeffs[0];
        for (m, c) in self.coeffs.iter().enumerate().skip(1) {
            let e = Complex64::from_polar(1.0, w * m as f64 * t);
            acc += c * e + c.conj() * e.conj();
        }
        acc
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            period: self.period,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// Keeps modes `0..=modes`.
    pub fn truncated(&self, modes: usize) -> Self {
        Self {
            period: self.period,
            coeffs: self.coeffs.iter().take(modes + 1).copied().collect(),
        }
    }

    /// Maximum over one period, located on a fine uniform grid.
    pub fn max_over_period(&self) -> f64 {
        let n = 8192;
        (0..n)
            .map(|k| self.reconstruct(self.period * k as f64 / n as f64))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn angular_frequency(period: f64, m: i32) -> f64 {
    2.0 * PI * m as f64 / period
}

/// Projects the samples on modes `0..=modes` by a discrete Fourier transform.
/// Non-uniform samples are first resampled onto a uniform grid by periodic
/// linear interpolation.
pub fn fourier_fit(w: &SampledWaveform, modes: usize) -> Result<FourierWaveform> {
    let n = w.len();
    let required = 2 * modes + 1;
    if required > n {
        return Err(Error::TooManyModes { modes, required, available: n });
    }
    let (times, values): (Vec<f64>, Vec<f64>) = if w.is_uniform() {
        (w.times.clone(), w.values.clone())
    } else {
        log::debug!("resampling {n} non-uniform samples");
        let dt = w.period / n as f64;
        (0..n)
            .map(|k| {
                let t = dt * k as f64;
                (t, w.interpolate(t))
            })
            .unzip()
    };
    let base = 2.0 * PI / w.period;
    let mut coeffs: Vec<Complex64> = (0..=modes)
        .map(|m| {
            let sum = times.iter().zip(&values).fold(Complex64::default(), |acc, (&t, &f)| {
                acc + f * Complex64::from_polar(1.0, -base * m as f64 * t)
            });
            sum / n as f64
        })
        .collect();
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if coeffs[0].im.abs() > 1e-10 * scale.max(f64::MIN_POSITIVE) {
        log::warn!("discarding imaginary part {:e} of the mean coefficient", coeffs[0].im);
    }
    coeffs[0].im = 0.0;
    FourierWaveform::new(w.period, coeffs)
}

/// Sample Pearson correlation coefficient.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "pearson needs two series of equal length >= 2, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::DegenerateSeries);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Pearson correlation between the samples and the fit evaluated at the
/// sample times.
pub fn fit_correlation(w: &SampledWaveform, fit: &FourierWaveform) -> Result<f64> {
    let rec: Vec<f64> = w.times().iter().map(|&t| fit.reconstruct(t)).collect();
    pearson(w.values(), &rec)
}

/// Smallest number of modes whose fit reaches `threshold` correlation, with
/// the fit itself.
pub fn select_modes(w: &SampledWaveform, threshold: f64) -> Result<(usize, FourierWaveform)> {
    let max_modes = (w.len() - 1) / 2;
    for m in 1..=max_modes {
        let fit = fourier_fit(w, m)?;
        if fit_correlation(w, &fit)? >= threshold {
            return Ok((m, fit));
        }
    }
    let fit = fourier_fit(w, max_modes)?;
    log::warn!("correlation threshold {threshold} not reached with {max_modes} modes");
    Ok((max_modes, fit))
}

/// Nondimensional labels of a pulsatile flow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowDiagnostics {
    /// Amplitude-weighted mean angular frequency [rad/s].
    pub characteristic_frequency: f64,
    /// `alpha + beta` for filled sections, mean gap for annuli [cm].
    pub characteristic_length: f64,
    /// Period mean flow rate over the area [cm/s].
    pub mean_speed: f64,
    /// Peak flow rate over the area [cm/s].
    pub peak_speed: f64,
    pub reynolds: f64,
    pub womersley: f64,
    /// `beta / alpha`.
    pub ellipticity: f64,
    /// `sqrt(1 - (beta / alpha)^2)`.
    pub eccentricity: f64,
}

pub fn diagnostics(fw: &FourierWaveform, g: &SectionGeometry, nu: f64) -> Result<FlowDiagnostics> {
    if !(nu.is_finite() && nu > 0.0) {
        return Err(Error::InvalidInput(format!("viscosity must be positive, got {nu}")));
    }
    let total: f64 = fw.coeffs().iter().map(|c| c.norm()).sum();
    if total == 0.0 {
        return Err(Error::DegenerateWaveform);
    }
    let weighted: f64 = fw
        .coeffs()
        .iter()
        .enumerate()
        .map(|(m, c)| c.norm() * fw.omega(m))
        .sum();
    let omega = weighted / total;
    let area = g.area();
    let length = g.characteristic_length();
    let peak_speed = fw.max_over_period() / area;
    Ok(FlowDiagnostics {
        characteristic_frequency: omega,
        characteristic_length: length,
        mean_speed: fw.mean() / area,
        peak_speed,
        reynolds: peak_speed * length / nu,
        womersley: 0.5 * length * (omega / nu).sqrt(),
        ellipticity: g.ellipticity(),
        eccentricity: g.eccentricity(),
    })
}
