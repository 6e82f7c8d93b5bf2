//! Oscillatory flow in a circular pipe for a prescribed flow rate.
//!
//! Each temporal mode `m >= 1` of the velocity is
//!
//! ```text
//! w_m(r) = (1 - J0(c Wo_r) / J0(c Wo_R)) lambda_m / (i w_m),   c = exp(3 pi i / 4)
//! ```
//!
//! and its flux `pi R^2 (1 - 0F1~(;2;z) / 0F1~(;1;z)) lambda_m / (i w_m)` with
//! `z = i Wo_R^2 / 4` is inverted to get `lambda_m` from `f_m`. The special
//! functions are summed from their power series; arguments are capped instead
//! of switching to asymptotics.

use crate::error::{Error, Result};
use crate::inverse::PressureGradientSeries;
use crate::stationary::unit_flux;
use crate::geometry::SectionGeometry;
use crate::waveform::{angular_frequency, FourierWaveform};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Largest `|z|` accepted by the series, i.e. Womersley numbers up to 40.
pub const SERIES_CAP: f64 = 400.0;

const TAIL_TOLERANCE: f64 = 1e-16;
const MAX_TERMS: usize = 500;

/// Sums `sum_k t_k` where `t_{k+1} = t_k * ratio(k)`, stopping once the
/// remaining tail is provably below tolerance relative to the largest term.
fn sum_series(first: Complex64, ratio: impl Fn(usize) -> Complex64) -> Complex64 {
    let mut term = first;
    let mut sum = first;
    let mut largest = first.norm();
    for k in 0..MAX_TERMS {
        let r = ratio(k);
        term *= r;
        sum += term;
        largest = largest.max(term.norm());
        // Once |ratio| < 1/2 the tail is bounded by the current term.
        if r.norm() < 0.5 && term.norm() <= TAIL_TOLERANCE * sum.norm().max(largest * 1e-300) {
            break;
        }
        if term.norm() == 0.0 {
            break;
        }
    }
    sum
}

fn check_cap(modulus: f64) -> Result<()> {
    if modulus > SERIES_CAP || !modulus.is_finite() {
        Err(Error::ArgumentTooLarge { modulus, cap: SERIES_CAP })
    } else {
        Ok(())
    }
}

/// Regularized confluent hypergeometric limit function
/// `0F1~(;b;z) = sum_k z^k / (k! (b + k - 1)!)` for integer `b >= 1`.
pub fn hyp0f1_reg(b: u32, z: Complex64) -> Result<Complex64> {
    if b == 0 {
        return Err(Error::InvalidInput("b must be a positive integer".into()));
    }
    check_cap(z.norm())?;
    let gamma_b: f64 = (1..b).map(f64::from).product();
    let first = Complex64::new(1.0 / gamma_b, 0.0);
    Ok(sum_series(first, |k| z / ((k + 1) as f64 * (k as f64 + b as f64))))
}

/// Bessel function `J0(z) = sum_k (-1)^k (z/2)^{2k} / (k!)^2`.
pub fn bessel_j0(z: Complex64) -> Result<Complex64> {
    let q = -z * z * 0.25;
    check_cap(q.norm())?;
    Ok(sum_series(Complex64::new(1.0, 0.0), |k| q / ((k + 1) as f64).powi(2)))
}

/// `1 - 0F1~(;2;z) / 0F1~(;1;z)`, with the numerator summed directly to avoid
/// cancellation at small `z`.
fn transfer_bracket(z: Complex64) -> Result<Complex64> {
    check_cap(z.norm())?;
    let f1 = hyp0f1_reg(1, z)?;
    // sum_{k>=1} z^k k / (k! (k+1)!)
    let diff = sum_series(z * 0.5, |i| z / ((i + 1) as f64 * (i + 3) as f64));
    Ok(diff / f1)
}

/// Generalized Womersley number `Wo_{r,m} = r sqrt(w_m / nu)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WomersleyNumber {
    pub r: f64,
    pub m: i32,
    pub value: f64,
}

impl WomersleyNumber {
    pub fn new(r: f64, m: i32, period: f64, nu: f64) -> Self {
        let omega = angular_frequency(period, m).abs();
        Self { r, m, value: r * (omega / nu).sqrt() }
    }
}

fn check_circle(radius: f64, nu: f64) -> Result<()> {
    SectionGeometry::circle(radius)?;
    if !(nu.is_finite() && nu > 0.0) {
        return Err(Error::InvalidInput(format!("viscosity must be positive, got {nu}")));
    }
    Ok(())
}

/// Flux carried by mode `m` of a unit pressure gradient.
pub fn circle_flux_per_gradient(radius: f64, nu: f64, period: f64, m: i32) -> Result<Complex64> {
    check_circle(radius, nu)?;
    if m == 0 {
        return Ok(Complex64::new(unit_flux(&SectionGeometry::Circle { radius }, nu)?, 0.0));
    }
    let omega = angular_frequency(period, m);
    let wo2 = radius * radius * omega.abs() / nu;
    // Negative modes are the conjugates of the positive ones.
    let z = Complex64::new(0.0, wo2 / 4.0);
    let mut bracket = transfer_bracket(z)?;
    if bracket.norm() < 1e-300 || !bracket.norm().is_finite() {
        return Err(Error::SingularTransferFunction { m });
    }
    let mut iw = Complex64::new(0.0, omega.abs());
    if m < 0 {
        bracket = bracket.conj();
        iw = iw.conj();
    }
    Ok(PI * radius * radius * bracket / iw)
}

/// Pressure-gradient coefficients reproducing the flow rate `fw` in a pipe of
/// radius `radius`.
pub fn lambda_from_flux_circle(radius: f64, nu: f64, fw: &FourierWaveform) -> Result<PressureGradientSeries> {
    let coeffs = fw
        .coeffs()
        .iter()
        .enumerate()
        .map(|(m, f)| Ok(f / circle_flux_per_gradient(radius, nu, fw.period(), m as i32)?))
        .collect::<Result<Vec<_>>>()?;
    PressureGradientSeries::new(fw.period(), coeffs)
}

/// Velocity coefficient of mode `m >= 1` at radius `r` for the pressure
/// coefficient `lambda_m`.
pub fn velocity_coeffs_circle(
    radius: f64,
    nu: f64,
    period: f64,
    lambda_m: Complex64,
    m: i32,
    r: f64,
) -> Result<Complex64> {
    check_circle(radius, nu)?;
    if m < 1 {
        return Err(Error::InvalidInput(format!("mode index must be >= 1, got {m}")));
    }
    if !(0.0..=radius).contains(&r) {
        return Err(Error::InvalidInput(format!("r = {r} outside [0, {radius}]")));
    }
    if r == radius {
        return Ok(Complex64::default());
    }
    let omega = angular_frequency(period, m);
    let c = Complex64::from_polar(1.0, 0.75 * PI);
    let wo_r = WomersleyNumber::new(r, m, period, nu).value;
    let wo_big = WomersleyNumber::new(radius, m, period, nu).value;
    let den = bessel_j0(c * wo_big)?;
    if den.norm() < 1e-300 {
        return Err(Error::SingularDenominator { m });
    }
    let num = bessel_j0(c * wo_r)?;
    Ok((1.0 - num / den) * lambda_m / Complex64::new(0.0, omega))
}

/// Full pulsatile solution in a circular pipe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleFlow {
    pub radius: f64,
    pub nu: f64,
    pub waveform: FourierWaveform,
    pub lambda: PressureGradientSeries,
}

impl CircleFlow {
    pub fn solve(radius: f64, nu: f64, waveform: &FourierWaveform) -> Result<Self> {
        let lambda = lambda_from_flux_circle(radius, nu, waveform)?;
        Ok(Self { radius, nu, waveform: waveform.clone(), lambda })
    }

    /// Velocity coefficient of mode `m >= 0` at radius `r`.
    pub fn mode(&self, m: usize, r: f64) -> Result<Complex64> {
        if m == 0 {
            let rr = r / self.radius;
            let l0 = self.lambda.coeff(0);
            return Ok(l0 * self.radius * self.radius / (4.0 * self.nu) * (1.0 - rr * rr));
        }
        velocity_coeffs_circle(self.radius, self.nu, self.lambda.period(), self.lambda.coeff(m), m as i32, r)
    }

    /// Velocity at time `t` and radius `r`.
    pub fn velocity(&self, t: f64, r: f64) -> Result<f64> {
        let period = self.lambda.period();
        let mut w = self.mode(0, r)?.re;
        for m in 1..=self.lambda.modes() {
            let e = Complex64::from_polar(1.0, angular_frequency(period, m as i32) * t);
            w += 2.0 * (self.mode(m, r)? * e).re;
        }
        Ok(w)
    }
}
