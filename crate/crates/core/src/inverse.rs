//! From a prescribed flow rate to the pressure gradient and the velocity.
//!
//! Each temporal mode of the unit-gradient solution carries the flux
//!
//! ```text
//! F(m) = pi a^2 int (cosh(2 eta) v_{m,0} - v_{m,2}) d eta
//! ```
//!
//! so `lambda_m = f_m / F(m)`, and the velocity is
//! `u = sum_m lambda_m phi_m(eta, theta) exp(i w_m t)` with
//! `phi_m = v_{m,0} + 2 sum_k v_{m,2k} cos(2 k theta)`.

use crate::error::{Error, Result};
use crate::geometry::{jacobian, SectionGeometry};
use crate::quadrature::{periodic_trapezoid, simpson};
use crate::spectral_bvp::{Basis, ModeStack};
use crate::stationary::Wall;
use crate::waveform::{angular_frequency, FourierWaveform};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Number of angular samples used by [`FlowSolution::recovered_flux`].
pub const FLUX_ANGLES: usize = 128;

/// Fourier coefficients `lambda_m`, `m = 0..=M`, of a real periodic pressure
/// gradient; negative modes are the conjugates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PressureGradientSeries {
    period: f64,
    coeffs: Vec<Complex64>,
}

impl PressureGradientSeries {
    /// The imaginary part of `lambda_0` is discarded.
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

    pub fn constant(period: f64, value: f64) -> Result<Self> {
        Self::new(period, vec![Complex64::new(value, 0.0)])
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn modes(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, m: usize) -> Complex64 {
        self.coeffs.get(m).copied().unwrap_or_default()
    }

    /// `lambda(t)`.
    pub fn reconstruct(&self, t: f64) -> f64 {
        let w = 2.0 * PI / self.period;
        self.coeffs.iter().enumerate().skip(1).fold(self.coeffs[0].re, |acc, (m, c)| {
            acc + 2.0 * (c * Complex64::from_polar(1.0, w * m as f64 * t)).re
        })
    }
}

/// Flux carried by the unit-gradient solution of one temporal mode.
pub fn flux_functional(stack: &ModeStack) -> Result<Complex64> {
    let a = stack.domain().a;
    let v0 = stack.mode(0);
    let v2 = stack.mode(1);
    let integrand: Vec<Complex64> = stack
        .eta()
        .iter()
        .enumerate()
        .map(|(j, &eta)| v0[j] * (2.0 * eta).cosh() - v2[j])
        .collect();
    let f = simpson(&integrand, stack.step()) * (PI * a * a);
    let floor = 1e-10 * PI * a * a * stack.domain().len() * stack.sup_norm(0);
    if f.norm() < floor || !f.norm().is_finite() {
        return Err(Error::VanishingDenominator { m: stack.m(), modulus: f.norm() });
    }
    Ok(f)
}

/// `lambda_m = f_m / F(m)`; `stacks[m]` must hold temporal mode `m`.
pub fn lambda_from_flux(fw: &FourierWaveform, stacks: &[ModeStack]) -> Result<PressureGradientSeries> {
    if stacks.len() <= fw.modes() {
        return Err(Error::InvalidInput(format!(
            "{} modes requested, stacks only cover m <= {}",
            fw.modes(),
            stacks.len() as i64 - 1
        )));
    }
    let coeffs = fw
        .coeffs()
        .iter()
        .zip(stacks)
        .enumerate()
        .map(|(m, (f, s))| {
            if s.m() != m as i32 {
                return Err(Error::InvalidInput(format!("stack {m} holds mode {}", s.m())));
            }
            if (s.period() - fw.period()).abs() > 1e-12 * fw.period() {
                return Err(Error::InvalidInput(format!(
                    "waveform period {} differs from the stack period {}",
                    fw.period(),
                    s.period()
                )));
            }
            let ff = flux_functional(s)?;
            if m == 0 {
                log::debug!("|F(0)| = {:e}", ff.norm());
            }
            Ok(f / ff)
        })
        .collect::<Result<Vec<_>>>()?;
    PressureGradientSeries::new(fw.period(), coeffs)
}

/// Four-point Lagrange weights for the node window containing `eta`.
fn cubic_window(eta_grid: &[f64], h: f64, eta: f64) -> (usize, [f64; 4]) {
    let n = eta_grid.len();
    let s = (eta - eta_grid[0]) / h;
    let cell = (s.floor().max(0.0) as usize).min(n - 2);
    let first = cell.saturating_sub(1).min(n - 4);
    let x = s - first as f64;
    let mut w = [0.0; 4];
    for (i, wi) in w.iter_mut().enumerate() {
        let mut p = 1.0;
        for k in 0..4 {
            if k != i {
                p *= (x - k as f64) / (i as f64 - k as f64);
            }
        }
        *wi = p;
    }
    (first, w)
}

/// Velocity field assembled from the mode stacks and the pressure gradient.
#[derive(Debug, Clone)]
pub struct FlowSolution {
    geometry: SectionGeometry,
    nu: f64,
    waveform: FourierWaveform,
    lambda: PressureGradientSeries,
    stacks: Vec<ModeStack>,
}

/// Checks that the stacks describe `g` with viscosity `nu`, then builds the
/// solution for `m = 0..=M` of the waveform.
pub fn assemble(
    g: &SectionGeometry,
    nu: f64,
    fw: &FourierWaveform,
    stacks: &[ModeStack],
    lambda: &PressureGradientSeries,
) -> Result<FlowSolution> {
    let dom = g.eta_domain()?;
    let modes = fw.modes();
    if lambda.modes() != modes || stacks.len() <= modes {
        return Err(Error::InvalidInput(format!(
            "inconsistent mode ranges: waveform {modes}, gradient {}, stacks {}",
            lambda.modes(),
            stacks.len()
        )));
    }
    let first = &stacks[0];
    for (m, s) in stacks.iter().take(modes + 1).enumerate() {
        if s.m() != m as i32 || s.domain() != &dom || s.nu() != nu || s.eta() != first.eta() || s.cutoff() != first.cutoff() {
            return Err(Error::InvalidInput(format!("stack {m} does not match the geometry or grid")));
        }
    }
    Ok(FlowSolution {
        geometry: *g,
        nu,
        waveform: fw.clone(),
        lambda: lambda.clone(),
        stacks: stacks[..=modes].to_vec(),
    })
}

impl FlowSolution {
    /// Maps `fw` through a precomputed basis (steps S3 and S4 only).
    pub fn from_basis(basis: &Basis, fw: &FourierWaveform) -> Result<Self> {
        if (basis.period() - fw.period()).abs() > 1e-12 * fw.period() {
            return Err(Error::InvalidInput(format!(
                "waveform period {} differs from the basis period {}",
                fw.period(),
                basis.period()
            )));
        }
        if fw.modes() > basis.max_mode() {
            return Err(Error::InvalidInput(format!(
                "waveform has {} modes, basis only {}",
                fw.modes(),
                basis.max_mode()
            )));
        }
        let lambda = lambda_from_flux(fw, basis.stacks())?;
        assemble(basis.geometry(), basis.nu(), fw, basis.stacks(), &lambda)
    }

    pub fn geometry(&self) -> &SectionGeometry {
        &self.geometry
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn waveform(&self) -> &FourierWaveform {
        &self.waveform
    }

    pub fn lambda(&self) -> &PressureGradientSeries {
        &self.lambda
    }

    pub fn cutoff(&self) -> usize {
        self.stacks[0].cutoff()
    }

    pub fn stacks(&self) -> &[ModeStack] {
        &self.stacks
    }

    pub fn period(&self) -> f64 {
        self.waveform.period()
    }

    fn check_eta(&self, eta: f64) -> Result<()> {
        let dom = self.stacks[0].domain();
        let tol = 1e-12 * dom.len();
        if eta < dom.start - tol || eta > dom.end + tol {
            return Err(Error::InvalidInput(format!("eta = {eta} outside [{}, {}]", dom.start, dom.end)));
        }
        Ok(())
    }

    /// `lambda_m phi_m(eta, theta)` for `m >= 0`.
    pub fn mode_field(&self, m: usize, eta: f64, theta: f64) -> Result<Complex64> {
        self.check_eta(eta)?;
        let s = &self.stacks[m];
        let (first, w) = cubic_window(s.eta(), s.step(), eta);
        Ok(self.lambda.coeff(m) * self.phi(s, first, &w, theta))
    }

    fn phi(&self, s: &ModeStack, first: usize, w: &[f64; 4], theta: f64) -> Complex64 {
        let mut acc = Complex64::default();
        for k in 0..=s.cutoff() {
            let v = s.mode(k);
            let val = (0..4).fold(Complex64::default(), |a, i| a + v[first + i] * w[i]);
            acc += if k == 0 { val } else { val * (2.0 * (2.0 * k as f64 * theta).cos()) };
        }
        acc
    }

    /// Velocity at time `t` and elliptical coordinates `(eta, theta)`.
    pub fn velocity(&self, t: f64, eta: f64, theta: f64) -> Result<f64> {
        self.check_eta(eta)?;
        let (first, w) = cubic_window(self.stacks[0].eta(), self.stacks[0].step(), eta);
        let mut u = (self.lambda.coeff(0) * self.phi(&self.stacks[0], first, &w, theta)).re;
        for (m, s) in self.stacks.iter().enumerate().skip(1) {
            let e = Complex64::from_polar(1.0, angular_frequency(self.period(), m as i32) * t);
            u += 2.0 * (self.lambda.coeff(m) * self.phi(s, first, &w, theta) * e).re;
        }
        Ok(u)
    }

    /// Sum over `m = -M..=M` with the negative modes written out; the
    /// imaginary part measures how well reality is preserved.
    pub fn velocity_complex(&self, t: f64, eta: f64, theta: f64) -> Result<Complex64> {
        let mut u = self.mode_field(0, eta, theta)?;
        for m in 1..self.stacks.len() {
            let e = Complex64::from_polar(1.0, angular_frequency(self.period(), m as i32) * t);
            let z = self.mode_field(m, eta, theta)?;
            u += z * e + z.conj() * e.conj();
        }
        Ok(u)
    }

    /// Velocity at a Cartesian point; zero outside the fluid region.
    pub fn velocity_cartesian(&self, t: f64, x1: f64, x2: f64) -> Result<f64> {
        let (eta, theta) = self.geometry.to_elliptic(x1, x2)?;
        let dom = self.stacks[0].domain();
        if eta < dom.start || eta > dom.end {
            return Ok(0.0);
        }
        self.velocity(t, eta, theta)
    }

    /// Flux `int int u J d eta d theta` at time `t`, by Simpson in `eta` on the
    /// solver nodes and the trapezoid rule in `theta`.
    pub fn recovered_flux(&self, t: f64) -> f64 {
        let s0 = &self.stacks[0];
        let a = s0.domain().a;
        let ht = 2.0 * PI / FLUX_ANGLES as f64;
        let phases: Vec<Complex64> = (0..self.stacks.len())
            .map(|m| {
                let l = self.lambda.coeff(m);
                if m == 0 {
                    l
                } else {
                    2.0 * l * Complex64::from_polar(1.0, angular_frequency(self.period(), m as i32) * t)
                }
            })
            .collect();
        let rows: Vec<f64> = s0
            .eta()
            .iter()
            .enumerate()
            .map(|(j, &eta)| {
                // Angular profile of u at node j, as cosine coefficients.
                let coeffs: Vec<f64> = (0..=s0.cutoff())
                    .map(|k| {
                        self.stacks
                            .iter()
                            .zip(&phases)
                            .map(|(s, p)| (s.mode(k)[j] * p).re)
                            .sum()
                    })
                    .collect();
                let ring: Vec<f64> = (0..FLUX_ANGLES)
                    .map(|l| {
                        let th = ht * l as f64;
                        let u = coeffs
                            .iter()
                            .enumerate()
                            .map(|(k, c)| if k == 0 { *c } else { 2.0 * c * (2.0 * k as f64 * th).cos() })
                            .sum::<f64>();
                        u * jacobian(a, eta, th)
                    })
                    .collect();
                periodic_trapezoid(&ring, ht)
            })
            .collect();
        simpson(&rows, s0.step())
    }

    /// Wall shear `-nu du/dn` (normal out of the fluid) at elliptical angle
    /// `theta` and time `t`, from a one-sided fourth-order derivative.
    pub fn wall_shear(&self, theta: f64, t: f64, wall: Wall) -> Result<f64> {
        let s0 = &self.stacks[0];
        let dom = *s0.domain();
        if wall == Wall::Inner && dom.filled {
            return Err(Error::UnsupportedGeometry { op: "inner wall shear", geometry: self.geometry.name() });
        }
        let n = s0.eta().len();
        let nodes: [usize; 5] = match wall {
            Wall::Outer => [n - 1, n - 2, n - 3, n - 4, n - 5],
            Wall::Inner => [0, 1, 2, 3, 4],
        };
        // d/d(eta) pointing into the fluid from the wall.
        let weights = [-25.0, 48.0, -36.0, 16.0, -3.0];
        let h = s0.step();
        let mut inward = 0.0;
        for (node, wgt) in nodes.iter().zip(weights) {
            let mut first = *node;
            let mut w = [0.0; 4];
            // exact node values: unit weight on the node itself
            if first + 3 >= n {
                first = n - 4;
            }
            w[node - first] = 1.0;
            let mut u = (self.lambda.coeff(0) * self.phi(s0, first, &w, theta)).re;
            for (m, s) in self.stacks.iter().enumerate().skip(1) {
                let e = Complex64::from_polar(1.0, angular_frequency(self.period(), m as i32) * t);
                u += 2.0 * (self.lambda.coeff(m) * self.phi(s, first, &w, theta) * e).re;
            }
            inward += wgt * u;
        }
        inward /= 12.0 * h;
        let eta = match wall {
            Wall::Outer => dom.end,
            Wall::Inner => dom.start,
        };
        // du/dn = -(inward derivative) / sqrt(J); shear is -nu du/dn.
        Ok(self.nu * inward / jacobian(dom.a, eta, theta).sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{confocal_annulus_from_semiaxes, ellipse_from_semiaxes};
    use crate::spectral_bvp::{build_basis, solve_modes, TruncationSettings};
    use crate::stationary::{solve_stationary, unit_flux};
    use approx::assert_relative_eq;

    fn ica() -> SectionGeometry {
        ellipse_from_semiaxes(0.25, 0.15).unwrap()
    }

    fn csf() -> SectionGeometry {
        confocal_annulus_from_semiaxes(1.11, 0.93, 0.43).unwrap()
    }

    fn stacks(g: &SectionGeometry, nu: f64, period: f64, modes: usize, cutoff: usize, j: usize) -> Vec<ModeStack> {
        (0..=modes).map(|m| solve_modes(g, nu, period, m as i32, cutoff, j).unwrap()).collect()
    }

    fn waveform(period: f64) -> FourierWaveform {
        let c = vec![
            Complex64::new(4.11, 0.0),
            Complex64::new(0.8, -0.6),
            Complex64::new(-0.3, 0.4),
            Complex64::new(0.1, 0.05),
        ];
        FourierWaveform::new(period, c).unwrap()
    }

    #[test]
    fn cubic_weights_reproduce_cubics() {
        let grid: Vec<f64> = (0..10).map(|i| 0.5 + 0.1 * i as f64).collect();
        let f = |x: f64| 2.0 * x * x * x - x + 0.3;
        for x in [0.5, 0.53, 0.77, 1.2, 1.39, 1.4] {
            let (first, w) = cubic_window(&grid, 0.1, x);
            let v: f64 = (0..4).map(|i| w[i] * f(grid[first + i])).sum();
            assert_relative_eq!(v, f(x), max_relative = 1e-12);
        }
    }

    #[test]
    fn steady_flux_functional_is_closed_form() {
        for (g, nu) in [(ica(), 0.035), (csf(), 0.01)] {
            let s = solve_modes(&g, nu, 0.95, 0, 2, 512).unwrap();
            let f = flux_functional(&s).unwrap();
            assert_relative_eq!(f.re, unit_flux(&g, nu).unwrap(), max_relative = 1e-10);
            assert_eq!(f.im, 0.0);
        }
    }

    #[test]
    fn flux_functional_matches_2d_quadrature() {
        let g = ica();
        let s = solve_modes(&g, 0.035, 0.95, 1, 17, 512).unwrap();
        let f = flux_functional(&s).unwrap();
        let a = s.domain().a;
        let nt = 64;
        let ht = 2.0 * PI / nt as f64;
        let rows: Vec<Complex64> = s
            .eta()
            .iter()
            .enumerate()
            .map(|(j, &eta)| {
                let ring: Vec<Complex64> = (0..nt)
                    .map(|l| {
                        let th = ht * l as f64;
                        let phi = (1..=17).fold(s.mode(0)[j], |acc, k| {
                            acc + s.mode(k)[j] * (2.0 * (2.0 * k as f64 * th).cos())
                        });
                        phi * jacobian(a, eta, th)
                    })
                    .collect();
                periodic_trapezoid(&ring, ht)
            })
            .collect();
        let q = simpson(&rows, s.step());
        assert!((q - f).norm() < 1e-8 * f.norm());
    }

    #[test]
    fn steady_pipeline_reproduces_stationary_solution() {
        for (g, nu, f0) in [(ica(), 0.035, 4.11), (csf(), 0.01, -0.11)] {
            let st = stacks(&g, nu, 0.95, 0, 2, 512);
            let fw = FourierWaveform::steady(0.95, f0).unwrap();
            let lam = lambda_from_flux(&fw, &st).unwrap();
            let exact = solve_stationary(&g, nu, f0).unwrap();
            assert_relative_eq!(lam.coeff(0).re, exact.lambda(), max_relative = 1e-10);
            let sol = assemble(&g, nu, &fw, &st, &lam).unwrap();
            let dom = g.eta_domain().unwrap();
            let peak = (0..=20)
                .map(|i| exact.velocity_elliptic(dom.start + dom.len() * i as f64 / 20.0, 0.0).unwrap().abs())
                .fold(0.0, f64::max);
            for i in 0..=37 {
                for k in 0..9 {
                    let eta = dom.start + dom.len() * i as f64 / 37.0;
                    let th = 0.71 * k as f64;
                    let u = sol.velocity(0.37, eta, th).unwrap();
                    let e = exact.velocity_elliptic(eta, th).unwrap();
                    assert!((u - e).abs() < 1e-8 * peak, "{}: {u} vs {e}", g.name());
                }
            }
            assert_relative_eq!(sol.recovered_flux(0.2), f0, max_relative = 1e-10);
        }
    }

    #[test]
    fn linearity_and_reality() {
        let g = ica();
        let st = stacks(&g, 0.035, 0.95, 3, 10, 128);
        let fw = waveform(0.95);
        let lam = lambda_from_flux(&fw, &st).unwrap();
        let lam2 = lambda_from_flux(&fw.scaled(2.0), &st).unwrap();
        for m in 0..=3 {
            assert!((lam2.coeff(m) - 2.0 * lam.coeff(m)).norm() < 1e-14 * lam.coeff(m).norm());
        }
        assert_eq!(lam.coeff(0).im, 0.0);
        let sol = assemble(&g, 0.035, &fw, &st, &lam).unwrap();
        for (t, eta, th) in [(0.1, 0.2, 0.3), (0.5, 0.6, 2.0), (0.9, 0.01, 4.0)] {
            let z = sol.velocity_complex(t, eta, th).unwrap();
            assert!(z.im.abs() < 1e-12 * z.norm());
            assert!((z.re - sol.velocity(t, eta, th).unwrap()).abs() < 1e-12 * z.norm());
        }
    }

    #[test]
    fn wall_is_no_slip() {
        let g = csf();
        let st = stacks(&g, 0.01, 0.95, 3, 8, 128);
        let fw = waveform(0.95);
        let lam = lambda_from_flux(&fw, &st).unwrap();
        let sol = assemble(&g, 0.01, &fw, &st, &lam).unwrap();
        let dom = g.eta_domain().unwrap();
        let mid = sol.velocity(0.0, 0.5 * (dom.start + dom.end), 0.0).unwrap().abs();
        for (t, th) in [(0.1, 0.3), (0.4, 2.0), (0.77, 5.0)] {
            assert!(sol.velocity(t, dom.end, th).unwrap().abs() <= 1e-10 * mid);
            assert!(sol.velocity(t, dom.start, th).unwrap().abs() <= 1e-10 * mid);
        }
        assert!(sol.velocity(0.0, dom.end + 0.1, 0.0).is_err());
    }

    #[test]
    fn flux_round_trip() {
        let g = ica();
        let st = stacks(&g, 0.035, 0.95, 3, 12, 256);
        let fw = waveform(0.95);
        let lam = lambda_from_flux(&fw, &st).unwrap();
        let sol = assemble(&g, 0.035, &fw, &st, &lam).unwrap();
        for i in 0..16 {
            let t = 0.95 * i as f64 / 16.0;
            let q = sol.recovered_flux(t);
            assert!((q - fw.reconstruct(t)).abs() < 1e-9 * 4.11, "t = {t}");
        }
        let zero = FourierWaveform::steady(0.95, 0.0).unwrap();
        let lz = lambda_from_flux(&zero, &st).unwrap();
        let sz = assemble(&g, 0.035, &zero, &st, &lz).unwrap();
        assert_eq!(sz.recovered_flux(0.3), 0.0);
        assert_eq!(sz.wall_shear(0.2, 0.3, Wall::Outer).unwrap(), 0.0);
    }

    #[test]
    fn steady_wall_shear() {
        let g = ica();
        let (alpha, beta) = g.outer_semiaxes();
        let (nu, f) = (0.035, 4.11);
        let st = stacks(&g, nu, 0.95, 0, 2, 512);
        let fw = FourierWaveform::steady(0.95, f).unwrap();
        let lam = lambda_from_flux(&fw, &st).unwrap();
        let sol = assemble(&g, nu, &fw, &st, &lam).unwrap();
        let expected = nu * (4.0 * f / (PI * alpha * beta)) / alpha;
        assert_relative_eq!(sol.wall_shear(0.0, 0.0, Wall::Outer).unwrap(), expected, max_relative = 1e-6);
        let exact = solve_stationary(&g, nu, f).unwrap();
        for th in [0.3, 1.0, 2.2] {
            assert_relative_eq!(
                sol.wall_shear(th, 0.1, Wall::Outer).unwrap(),
                exact.wall_shear(th, Wall::Outer).unwrap(),
                max_relative = 1e-6
            );
        }
        assert!(sol.wall_shear(0.0, 0.0, Wall::Inner).is_err());

        let g = csf();
        let st = stacks(&g, 0.01, 0.95, 0, 2, 512);
        let fw = FourierWaveform::steady(0.95, -0.11).unwrap();
        let lam = lambda_from_flux(&fw, &st).unwrap();
        let sol = assemble(&g, 0.01, &fw, &st, &lam).unwrap();
        let exact = solve_stationary(&g, 0.01, -0.11).unwrap();
        for wall in [Wall::Inner, Wall::Outer] {
            assert_relative_eq!(
                sol.wall_shear(0.7, 0.0, wall).unwrap(),
                exact.wall_shear(0.7, wall).unwrap(),
                max_relative = 1e-6
            );
        }
    }

    #[test]
    fn basis_reuse() {
        let g = ica();
        let settings = TruncationSettings { max_mode: 3, intervals: 128, ..Default::default() };
        let basis = build_basis(&g, 0.035, 0.95, &settings).unwrap();
        let fw = waveform(0.95);
        let a = FlowSolution::from_basis(&basis, &fw).unwrap();
        let b = FlowSolution::from_basis(&basis, &fw.scaled(-1.0)).unwrap();
        assert!((a.velocity(0.2, 0.3, 0.4).unwrap() + b.velocity(0.2, 0.3, 0.4).unwrap()).abs() < 1e-12);
        assert!(FlowSolution::from_basis(&basis, &waveform(1.0)).is_err());
        let wide = FourierWaveform::new(0.95, vec![Complex64::new(1.0, 0.0); 5]).unwrap();
        assert!(FlowSolution::from_basis(&basis, &wide).is_err());
    }

    #[test]
    fn cartesian_evaluation() {
        let g = ica();
        let nu = 0.035;
        let st = stacks(&g, nu, 0.95, 0, 2, 512);
        let fw = FourierWaveform::steady(0.95, 4.11).unwrap();
        let lam = lambda_from_flux(&fw, &st).unwrap();
        let sol = assemble(&g, nu, &fw, &st, &lam).unwrap();
        let exact = solve_stationary(&g, nu, 4.11).unwrap();
        for (x, y) in [(0.0, 0.0), (0.1, 0.05), (-0.2, -0.03), (0.0, 0.149)] {
            let u = sol.velocity_cartesian(0.0, x, y).unwrap();
            assert!((u - exact.velocity(x, y)).abs() < 1e-8 * exact.velocity(0.0, 0.0));
        }
        assert_eq!(sol.velocity_cartesian(0.0, 0.3, 0.0).unwrap(), 0.0);
    }
}
