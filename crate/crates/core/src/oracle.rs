//! Direct time-stepping of the transformed problem, independent of the modal
//! expansion, used to check the inverse pipeline.
//!
//! On the rectangle `(eta, theta)` the axial velocity obeys
//! `J u_t - nu (u_etaeta + u_thetatheta) = J lambda(t)`. It is discretized with
//! second-order central differences, periodic in `theta`, Dirichlet on the
//! walls and, for the filled ellipse, the mirror condition
//! `u(-h, theta) = u(h, theta)` across the inter-focal segment (exact for the
//! flows here, which are symmetric about the major axis). The angular nodes
//! are staggered by half a step so that no node sits on a focus, where `J`
//! vanishes. Time stepping is Crank-Nicolson after two backward-Euler half
//! steps that damp the start-up transient.

use crate::banded::{BandLu, BandMatrix};
use crate::error::{Error, Result};
use crate::geometry::{jacobian, SectionGeometry};
use crate::inverse::{FlowSolution, PressureGradientSeries};
use crate::quadrature::{periodic_trapezoid, simpson};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const MIN_GRID: usize = 64;
pub const DEFAULT_PERIOD_CAP: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSettings {
    /// Intervals in `eta`.
    pub eta_intervals: usize,
    /// Nodes in `theta`.
    pub theta_points: usize,
    pub steps_per_period: usize,
    pub max_periods: usize,
    /// Period-to-period RMS change of the flux, relative to its RMS, below
    /// which the run counts as periodic.
    pub tolerance: f64,
    /// Phases `t / T` at which the field of the final period is kept.
    pub phases: Vec<f64>,
}

impl Default for OracleSettings {
    fn default() -> Self {
        Self {
            eta_intervals: 96,
            theta_points: 96,
            steps_per_period: 400,
            max_periods: DEFAULT_PERIOD_CAP,
            tolerance: 1e-4,
            phases: vec![0.1, 0.3, 0.5, 0.7],
        }
    }
}

/// Field kept at one instant of the final period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub phase: f64,
    pub time: f64,
    /// `values[j * theta_points + l]`.
    pub values: Vec<f64>,
}

/// Outcome of a direct run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectRun {
    pub geometry: SectionGeometry,
    pub nu: f64,
    pub period: f64,
    pub eta: Vec<f64>,
    pub theta: Vec<f64>,
    pub dt: f64,
    pub periods: usize,
    /// Times of the final period, measured from its start.
    pub times: Vec<f64>,
    pub flux: Vec<f64>,
    /// Period-averaged `int int u^2 J` for every period run.
    pub energy: Vec<f64>,
    /// Relative RMS flux change between the last two periods.
    pub change: f64,
    pub snapshots: Vec<Snapshot>,
}

struct Grid {
    eta: Vec<f64>,
    theta: Vec<f64>,
    he: f64,
    ht: f64,
    jac: Vec<f64>,
    /// Rows whose value is imposed (walls).
    fixed: Vec<bool>,
}

impl Grid {
    fn new(g: &SectionGeometry, settings: &OracleSettings) -> Result<Self> {
        let dom = g.eta_domain()?;
        let (ne, nt) = (settings.eta_intervals, settings.theta_points);
        if ne < MIN_GRID || nt < MIN_GRID {
            return Err(Error::InvalidGrid(format!("oracle grid {ne} x {nt} is below {MIN_GRID} x {MIN_GRID}")));
        }
        let he = dom.len() / ne as f64;
        let ht = 2.0 * PI / nt as f64;
        let mut eta: Vec<f64> = (0..=ne).map(|j| dom.start + he * j as f64).collect();
        eta[ne] = dom.end;
        let theta: Vec<f64> = (0..nt).map(|l| ht * (l as f64 + 0.5)).collect();
        let mut jac = Vec::with_capacity(eta.len() * nt);
        let mut fixed = Vec::with_capacity(eta.len() * nt);
        for (j, &e) in eta.iter().enumerate() {
            let wall = j == ne || (j == 0 && !dom.filled);
            for &t in &theta {
                jac.push(jacobian(dom.a, e, t));
                fixed.push(wall);
            }
        }
        Ok(Self { eta, theta, he, ht, jac, fixed })
    }

    fn nt(&self) -> usize {
        self.theta.len()
    }

    fn len(&self) -> usize {
        self.jac.len()
    }

    /// Nonzeros `(col, coeff)` of the discrete Laplacian in row `(j, l)`.
    fn laplacian_row(&self, j: usize, l: usize) -> [(usize, f64); 5] {
        let nt = self.nt();
        let (ie, it) = (1.0 / (self.he * self.he), 1.0 / (self.ht * self.ht));
        let row = j * nt + l;
        let left = j * nt + (l + nt - 1) % nt;
        let right = j * nt + (l + 1) % nt;
        let (down, up, down_w) = if j == 0 {
            // mirror node folded onto j = 1
            (row + nt, row + nt, ie)
        } else {
            (row - nt, row + nt, ie)
        };
        [
            (row, -2.0 * ie - 2.0 * it),
            (left, it),
            (right, it),
            (down, down_w),
            (up, ie),
        ]
    }

    fn apply_laplacian(&self, u: &[f64], out: &mut [f64]) {
        for j in 0..self.eta.len() {
            for l in 0..self.nt() {
                let row = j * self.nt() + l;
                out[row] = if self.fixed[row] {
                    0.0
                } else {
                    self.laplacian_row(j, l).iter().map(|&(c, v)| v * u[c]).sum()
                };
            }
        }
    }

    /// Factorizes `J / dt - c nu L` with identity rows on the walls.
    fn operator(&self, dt: f64, c_nu: f64) -> Result<BandLu<f64>> {
        let nt = self.nt();
        let mut a = BandMatrix::zeros(self.len(), nt, nt);
        for j in 0..self.eta.len() {
            for l in 0..nt {
                let row = j * nt + l;
                if self.fixed[row] {
                    a.add(row, row, 1.0);
                    continue;
                }
                a.add(row, row, self.jac[row] / dt);
                for (col, v) in self.laplacian_row(j, l) {
                    a.add(row, col, -c_nu * v);
                }
            }
        }
        a.factorize()
            .map_err(|row| Error::SolverSingular { m: 0, cutoff: 0, intervals: self.eta.len() - 1, row })
    }

    fn integrate(&self, u: &[f64], square: bool) -> f64 {
        let nt = self.nt();
        let rows: Vec<f64> = (0..self.eta.len())
            .map(|j| {
                let ring: Vec<f64> = (0..nt)
                    .map(|l| {
                        let i = j * nt + l;
                        let v = if square { u[i] * u[i] } else { u[i] };
                        v * self.jac[i]
                    })
                    .collect();
                periodic_trapezoid(&ring, self.ht)
            })
            .collect();
        simpson(&rows, self.he)
    }
}

/// Integrates the direct problem driven by `lambda` from rest until the flux
/// is periodic.
pub fn direct_solve(
    g: &SectionGeometry,
    nu: f64,
    lambda: &PressureGradientSeries,
    settings: &OracleSettings,
) -> Result<DirectRun> {
    if !(nu.is_finite() && nu > 0.0) {
        return Err(Error::InvalidInput(format!("viscosity must be positive, got {nu}")));
    }
    if settings.steps_per_period < 4 || settings.max_periods == 0 {
        return Err(Error::InvalidInput("need at least 4 steps and one period".into()));
    }
    let grid = Grid::new(g, settings)?;
    let period = lambda.period();
    let steps = settings.steps_per_period;
    let dt = period / steps as f64;
    let n = grid.len();

    let cn = grid.operator(dt, 0.5 * nu)?;
    let euler = grid.operator(0.5 * dt, nu)?;

    let phase_steps: Vec<usize> = settings
        .phases
        .iter()
        .map(|p| ((p.rem_euclid(1.0) * steps as f64).round() as usize) % steps)
        .collect();

    let mut u = vec![0.0; n];
    let mut lap = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    let mut previous: Option<Vec<f64>> = None;
    let mut energy = Vec::new();
    let mut t = 0.0;

    for p in 0..settings.max_periods {
        let mut flux = Vec::with_capacity(steps);
        let mut snaps = Vec::new();
        let mut e_acc = 0.0;
        for k in 0..steps {
            for (i, &s) in phase_steps.iter().enumerate() {
                if s == k {
                    snaps.push(Snapshot { phase: settings.phases[i], time: k as f64 * dt, values: u.clone() });
                }
            }
            flux.push(grid.integrate(&u, false));
            e_acc += grid.integrate(&u, true);

            if p == 0 && k == 0 {
                // Two backward-Euler half steps.
                for half in 1..=2 {
                    let th = t + 0.5 * dt * half as f64;
                    let l_new = lambda.reconstruct(th);
                    for i in 0..n {
                        rhs[i] = if grid.fixed[i] { 0.0 } else { grid.jac[i] * (u[i] / (0.5 * dt) + l_new) };
                    }
                    euler.solve_in_place(&mut rhs);
                    u.copy_from_slice(&rhs);
                }
            } else {
                let (l_old, l_new) = (lambda.reconstruct(t), lambda.reconstruct(t + dt));
                grid.apply_laplacian(&u, &mut lap);
                for i in 0..n {
                    rhs[i] = if grid.fixed[i] {
                        0.0
                    } else {
                        grid.jac[i] * (u[i] / dt + 0.5 * (l_old + l_new)) + 0.5 * nu * lap[i]
                    };
                }
                cn.solve_in_place(&mut rhs);
                u.copy_from_slice(&rhs);
            }
            t += dt;
        }
        energy.push(e_acc / steps as f64);
        let change = match &previous {
            Some(prev) => {
                let scale = (flux.iter().map(|f| f * f).sum::<f64>() / steps as f64).sqrt();
                let diff = (flux.iter().zip(prev).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / steps as f64).sqrt();
                if scale > 0.0 {
                    diff / scale
                } else {
                    diff
                }
            }
            None => f64::INFINITY,
        };
        log::debug!("oracle period {}: flux change {change:e}", p + 1);
        if change <= settings.tolerance {
            snaps.sort_by(|a, b| a.time.total_cmp(&b.time));
            return Ok(DirectRun {
                geometry: *g,
                nu,
                period,
                eta: grid.eta.clone(),
                theta: grid.theta.clone(),
                dt,
                periods: p + 1,
                times: (0..steps).map(|k| k as f64 * dt).collect(),
                flux,
                energy,
                change,
                snapshots: snaps,
            });
        }
        if p + 1 == settings.max_periods {
            return Err(Error::NotPeriodic { periods: p + 1, change });
        }
        previous = Some(flux);
    }
    unreachable!("loop returns on the last period")
}

fn lagrange4(x: f64) -> [f64; 4] {
    let mut w = [0.0; 4];
    for (i, wi) in w.iter_mut().enumerate() {
        *wi = (0..4).filter(|&k| k != i).map(|k| (x - k as f64) / (i as f64 - k as f64)).product();
    }
    w
}

impl DirectRun {
    pub fn theta_points(&self) -> usize {
        self.theta.len()
    }

    /// Bicubic interpolation of a snapshot at `(eta, theta)`.
    pub fn velocity(&self, snapshot: &Snapshot, eta: f64, theta: f64) -> f64 {
        let nt = self.theta.len();
        let ne = self.eta.len();
        let he = (self.eta[ne - 1] - self.eta[0]) / (ne - 1) as f64;
        let ht = 2.0 * PI / nt as f64;
        let filled = self.geometry.eta_domain().map(|d| d.filled).unwrap_or(false);

        // eta window; the filled ellipse continues evenly below eta = 0.
        let s = (eta - self.eta[0]) / he;
        let cell = s.floor() as i64;
        let lo = if filled { (cell - 1).min(ne as i64 - 4) } else { (cell - 1).clamp(0, ne as i64 - 4) };
        let we = lagrange4(s - lo as f64);

        let st = theta.rem_euclid(2.0 * PI) / ht - 0.5;
        let tcell = st.floor() as i64;
        let wt = lagrange4(st - (tcell - 1) as f64);

        let mut acc = 0.0;
        for (a, wa) in we.iter().enumerate() {
            let j = (lo + a as i64).unsigned_abs() as usize;
            for (b, wb) in wt.iter().enumerate() {
                let l = (tcell - 1 + b as i64).rem_euclid(nt as i64) as usize;
                acc += wa * wb * snapshot.values[j * nt + l];
            }
        }
        acc
    }

    /// Velocity at a Cartesian point of a snapshot; zero outside the fluid.
    pub fn velocity_cartesian(&self, snapshot: &Snapshot, x1: f64, x2: f64) -> Result<f64> {
        let (eta, theta) = self.geometry.to_elliptic(x1, x2)?;
        let (lo, hi) = (self.eta[0], self.eta[self.eta.len() - 1]);
        if eta < lo || eta > hi {
            return Ok(0.0);
        }
        Ok(self.velocity(snapshot, eta, theta))
    }

    /// Relative RMS deviation between the final-period flux and `target(t)`.
    pub fn flux_rms_error(&self, target: impl Fn(f64) -> f64) -> f64 {
        let n = self.flux.len() as f64;
        let diff = self.times.iter().zip(&self.flux).map(|(&t, f)| (f - target(t)).powi(2)).sum::<f64>() / n;
        let scale = self.times.iter().map(|&t| target(t).powi(2)).sum::<f64>() / n;
        (diff / scale).sqrt()
    }
}

/// Deviation of the inverse solution from the oracle along both semi-axes at
/// one phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseDeviation {
    pub phase: f64,
    /// Max deviation over the profiles, relative to the reference peak.
    pub max: f64,
    pub rms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileReport {
    /// Peak `|w|` of the inverse solution over all compared profiles.
    pub peak: f64,
    pub phases: Vec<PhaseDeviation>,
}

impl ProfileReport {
    pub fn max_deviation(&self) -> f64 {
        self.phases.iter().map(|p| p.max).fold(0.0, f64::max)
    }
}

/// Points along the major and minor semi-axes, from the inner wall (or the
/// centre) to the outer wall.
pub fn semi_axis_points(g: &SectionGeometry, count: usize) -> Vec<(f64, f64)> {
    let (alpha, beta) = g.outer_semiaxes();
    let (a0, b0) = g.inner_semiaxes().unwrap_or((0.0, 0.0));
    let mut pts = Vec::with_capacity(2 * count);
    for i in 0..count {
        let s = i as f64 / (count - 1) as f64;
        pts.push((a0 + s * (alpha - a0), 0.0));
    }
    for i in 0..count {
        let s = i as f64 / (count - 1) as f64;
        pts.push((0.0, b0 + s * (beta - b0)));
    }
    pts
}

/// Compares the oracle snapshots with the inverse solution along both
/// semi-axes. Deviations are relative to the peak speed of the inverse
/// solution over all compared profiles.
pub fn compare_profiles(run: &DirectRun, sol: &FlowSolution) -> Result<ProfileReport> {
    if run.geometry != *sol.geometry() || run.nu != sol.nu() {
        return Err(Error::InvalidInput("oracle and solution describe different flows".into()));
    }
    let pts = semi_axis_points(&run.geometry, 65);
    let mut profiles = Vec::new();
    let mut peak = 0.0f64;
    for snap in &run.snapshots {
        let mut pairs = Vec::with_capacity(pts.len());
        for &(x1, x2) in &pts {
            let reference = sol.velocity_cartesian(snap.time, x1, x2)?;
            let direct = run.velocity_cartesian(snap, x1, x2)?;
            peak = peak.max(reference.abs());
            pairs.push((reference, direct));
        }
        profiles.push((snap.phase, pairs));
    }
    let scale = if peak > 0.0 { peak } else { 1.0 };
    let phases = profiles
        .into_iter()
        .map(|(phase, pairs)| {
            let n = pairs.len() as f64;
            let max = pairs.iter().map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale;
            let rms = (pairs.iter().map(|(a, b)| (a - b).powi(2)).sum::<f64>() / n).sqrt() / scale;
            PhaseDeviation { phase, max, rms }
        })
        .collect();
    Ok(ProfileReport { peak, phases })
}
