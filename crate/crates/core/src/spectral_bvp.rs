//! Coupled radial problems for the angular modes of a unit pressure gradient.
//!
//! Expanding one temporal mode `m` of the velocity as
//! `sum_n v_n(eta) exp(i n theta)` turns the transformed heat equation into
//!
//! ```text
//! v_n'' - [n^2 + (i Wo^2 / 2) cosh(2 eta)] v_n + (i Wo^2 / 4)(v_{n+2} + v_{n-2}) = g_n
//! g_0 = -a^2 cosh(2 eta) / (2 nu),   g_2 = a^2 / (4 nu),   Wo^2 = a^2 w_m / nu
//! ```
//!
//! for even `n` (odd modes are not forced). With `v_{-n} = v_n` only
//! `n = 0, 2, .., 2N` are kept; the last equation drops `v_{2N+2}`. The
//! filled ellipse has `v_n'(0) = 0` on the inter-focal segment and
//! `v_n(b) = 0`; the annulus has Dirichlet conditions on both walls.
//!
//! All modes at all nodes are solved at once as a single banded system. The
//! radial operator is discretized with the fourth-order Numerov scheme.

use crate::banded::BandMatrix;
use crate::error::{Error, Result};
use crate::geometry::{EtaDomain, SectionGeometry};
use crate::waveform::angular_frequency;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const MIN_INTERVALS: usize = 64;
pub const MIN_CUTOFF: usize = 2;
pub const DEFAULT_INTERVALS: usize = 512;
pub const DEFAULT_CUTOFF_CAP: usize = 64;
pub const DEFAULT_THRESHOLD: f64 = 1e-12;

/// Radial profiles of the angular modes `n = 0, 2, .., 2N` for temporal mode
/// `m` and unit pressure gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeStack {
    m: i32,
    cutoff: usize,
    domain: EtaDomain,
    nu: f64,
    period: f64,
    eta: Vec<f64>,
    /// `values[k][j]` is `v_{2k}(eta_j)`.
    values: Vec<Vec<Complex64>>,
}

impl ModeStack {
    pub fn m(&self) -> i32 {
        self.m
    }

    /// Cut-off `N`; the highest angular mode is `2N`.
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn intervals(&self) -> usize {
        self.eta.len() - 1
    }

    pub fn domain(&self) -> &EtaDomain {
        &self.domain
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn eta(&self) -> &[f64] {
        &self.eta
    }

    pub fn step(&self) -> f64 {
        self.domain.len() / self.intervals() as f64
    }

    /// Profile of angular mode `n = 2k`.
    pub fn mode(&self, k: usize) -> &[Complex64] {
        &self.values[k]
    }

    /// Max over the grid of `|v_{2k}|`.
    pub fn sup_norm(&self, k: usize) -> f64 {
        self.values[k].iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

fn wo2(domain: &EtaDomain, nu: f64, period: f64, m: i32) -> f64 {
    domain.a * domain.a * angular_frequency(period, m) / nu
}

fn validate(g: &SectionGeometry, nu: f64, period: f64, cutoff: usize, intervals: usize) -> Result<EtaDomain> {
    let domain = g.eta_domain()?;
    if !(nu.is_finite() && nu > 0.0) {
        return Err(Error::InvalidInput(format!("viscosity must be positive, got {nu}")));
    }
    if !(period.is_finite() && period > 0.0) {
        return Err(Error::InvalidInput(format!("period must be positive, got {period}")));
    }
    if cutoff < MIN_CUTOFF {
        return Err(Error::InvalidInput(format!("cut-off N must be >= {MIN_CUTOFF}, got {cutoff}")));
    }
    if intervals < MIN_INTERVALS {
        return Err(Error::InvalidGrid(format!(
            "need at least {MIN_INTERVALS} intervals, got {intervals}"
        )));
    }
    Ok(domain)
}

/// Coefficients of the system `v'' = A v + g` at one node.
struct NodeCoefficients {
    diag: Vec<Complex64>,
    /// Coupling of `v_{2k}` to `v_{2k +- 2}`; the `k = 0` row doubles it
    /// towards `k = 1` because `v_{-2} = v_2`.
    coupling: Complex64,
    g0: f64,
    g1: f64,
}

impl NodeCoefficients {
    fn new(domain: &EtaDomain, nu: f64, wo2: f64, cutoff: usize, eta: f64) -> Self {
        let c2 = (2.0 * eta).cosh();
        let diag = (0..=cutoff)
            .map(|k| Complex64::new((2 * k * 2 * k) as f64, 0.5 * wo2 * c2))
            .collect();
        let a2 = domain.a * domain.a;
        Self {
            diag,
            coupling: Complex64::new(0.0, -0.25 * wo2),
            g0: -a2 * c2 / (2.0 * nu),
            g1: a2 / (4.0 * nu),
        }
    }

    /// Entry `A[k][l]`.
    fn a(&self, k: usize, l: usize) -> Complex64 {
        if k == l {
            self.diag[k]
        } else if k == 0 && l == 1 {
            self.coupling * 2.0
        } else if k.abs_diff(l) == 1 {
            self.coupling
        } else {
            Complex64::default()
        }
    }

    fn g(&self, k: usize) -> f64 {
        match k {
            0 => self.g0,
            1 => self.g1,
            _ => 0.0,
        }
    }
}

struct System {
    matrix: BandMatrix<Complex64>,
    rhs: Vec<Complex64>,
}

fn assemble(domain: &EtaDomain, nu: f64, period: f64, m: i32, cutoff: usize, eta: &[f64]) -> System {
    let nodes = eta.len();
    let width = cutoff + 1;
    let n = nodes * width;
    let band = width + 1;
    let h = domain.len() / (nodes - 1) as f64;
    let w = h * h / 12.0;
    let wo2 = wo2(domain, nu, period, m);
    let coef: Vec<NodeCoefficients> =
        eta.iter().map(|&e| NodeCoefficients::new(domain, nu, wo2, cutoff, e)).collect();
    let mut matrix = BandMatrix::zeros(n, band, band);
    let mut rhs = vec![Complex64::default(); n];
    let idx = |j: usize, k: usize| j * width + k;
    let one = Complex64::new(1.0, 0.0);

    // (I - w A_{j-1}) y_{j-1} + (-2 I - 10 w A_j) y_j + (I - w A_{j+1}) y_{j+1}
    //   = w (g_{j-1} + 10 g_j + g_{j+1})
    let stencil = |row_node: usize, col_node: usize, scale: f64, weight: f64, mat: &mut BandMatrix<Complex64>| {
        for k in 0..width {
            for l in k.saturating_sub(1)..=(k + 1).min(width - 1) {
                let mut v = -coef[col_node].a(k, l) * (weight * w);
                if k == l {
                    v += one * scale;
                }
                mat.add(idx(row_node, k), idx(col_node, l), v);
            }
        }
    };

    for j in 0..nodes {
        let wall = j == nodes - 1 || (j == 0 && !domain.filled);
        if wall {
            for k in 0..width {
                matrix.add(idx(j, k), idx(j, k), one);
            }
            continue;
        }
        if j == 0 {
            // Even extension across the inter-focal segment: y_{-1} = y_1.
            stencil(0, 1, 2.0, 2.0, &mut matrix);
            stencil(0, 0, -2.0, 10.0, &mut matrix);
            for k in 0..width {
                rhs[idx(0, k)] = Complex64::new(w * (10.0 * coef[0].g(k) + 2.0 * coef[1].g(k)), 0.0);
            }
            continue;
        }
        stencil(j, j - 1, 1.0, 1.0, &mut matrix);
        stencil(j, j, -2.0, 10.0, &mut matrix);
        stencil(j, j + 1, 1.0, 1.0, &mut matrix);
        for k in 0..width {
            let g = coef[j - 1].g(k) + 10.0 * coef[j].g(k) + coef[j + 1].g(k);
            rhs[idx(j, k)] = Complex64::new(w * g, 0.0);
        }
    }
    System { matrix, rhs }
}

fn grid(domain: &EtaDomain, intervals: usize) -> Vec<f64> {
    let h = domain.len() / intervals as f64;
    let mut eta: Vec<f64> = (0..=intervals).map(|j| domain.start + h * j as f64).collect();
    eta[intervals] = domain.end;
    eta
}

/// Solves the truncated system for temporal mode `m` (any sign), cut-off `N`
/// and `J` uniform intervals in `eta`.
pub fn solve_modes(
    g: &SectionGeometry,
    nu: f64,
    period: f64,
    m: i32,
    cutoff: usize,
    intervals: usize,
) -> Result<ModeStack> {
    let domain = validate(g, nu, period, cutoff, intervals)?;
    let eta = grid(&domain, intervals);
    let System { matrix, mut rhs } = assemble(&domain, nu, period, m, cutoff, &eta);
    let lu = matrix
        .factorize()
        .map_err(|row| Error::SolverSingular { m, cutoff, intervals, row })?;
    lu.solve_in_place(&mut rhs);
    let width = cutoff + 1;
    // Wall values are imposed, not solved for; drop pivoting round-off.
    let walls: &[usize] = if domain.filled { &[intervals] } else { &[0, intervals] };
    for &j in walls {
        rhs[j * width..(j + 1) * width].fill(Complex64::default());
    }
    let values = (0..width)
        .map(|k| (0..eta.len()).map(|j| rhs[j * width + k]).collect())
        .collect();
    Ok(ModeStack { m, cutoff, domain, nu, period, eta, values })
}

fn reference_norm(stack: &ModeStack) -> Result<f64> {
    let r = stack.sup_norm(0);
    if r == 0.0 || !r.is_finite() {
        return Err(Error::DegenerateReference { m: stack.m, cutoff: stack.cutoff });
    }
    Ok(r)
}

/// Relative size of the last retained mode, `|v_{2N}| / |v_0|`.
pub fn mu_metric(stack: &ModeStack) -> Result<f64> {
    let r = reference_norm(stack)?;
    Ok(stack.sup_norm(stack.cutoff) / r)
}

/// Change of modes `n <= 2N - 2` when the cut-off grows from `N` to `N + 1`,
/// relative to `|v_0|`.
pub fn s_metric(stack: &ModeStack, next: &ModeStack) -> Result<f64> {
    if stack.m != next.m || stack.eta != next.eta || next.cutoff != stack.cutoff + 1 {
        return Err(Error::InvalidInput(format!(
            "stacks (m = {}, N = {}, J = {}) and (m = {}, N = {}, J = {}) are not consecutive",
            stack.m,
            stack.cutoff,
            stack.intervals(),
            next.m,
            next.cutoff,
            next.intervals()
        )));
    }
    let r = reference_norm(stack)?;
    let worst = (0..stack.cutoff)
        .map(|k| {
            stack.values[k]
                .iter()
                .zip(&next.values[k])
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    Ok(worst / r)
}

/// Truncation metrics of one `(m, N)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationEntry {
    pub m: usize,
    pub cutoff: usize,
    pub mu: f64,
    pub s: f64,
}

/// Outcome of the cut-off search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationReport {
    pub max_mode: usize,
    pub mu_threshold: f64,
    pub s_threshold: f64,
    pub intervals: usize,
    pub nstar_mu: usize,
    pub nstar_s: usize,
    pub nstar: usize,
    pub entries: Vec<TruncationEntry>,
}

impl TruncationReport {
    pub fn max_mu(&self, cutoff: usize) -> Option<f64> {
        self.column(cutoff).map(|e| e.mu).reduce(f64::max)
    }

    pub fn max_s(&self, cutoff: usize) -> Option<f64> {
        self.column(cutoff).map(|e| e.s).reduce(f64::max)
    }

    fn column(&self, cutoff: usize) -> impl Iterator<Item = &TruncationEntry> {
        self.entries.iter().filter(move |e| e.cutoff == cutoff)
    }
}

/// Settings of the cut-off search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationSettings {
    pub max_mode: usize,
    pub mu_threshold: f64,
    pub s_threshold: f64,
    pub intervals: usize,
    pub cap: usize,
}

impl Default for TruncationSettings {
    fn default() -> Self {
        Self {
            max_mode: 50,
            mu_threshold: DEFAULT_THRESHOLD,
            s_threshold: DEFAULT_THRESHOLD,
            intervals: DEFAULT_INTERVALS,
            cap: DEFAULT_CUTOFF_CAP,
        }
    }
}

/// Mode stacks for `m = 0..=M*` at the selected cut-off, reusable for any
/// flow-rate waveform of the same period.
#[derive(Debug, Clone)]
pub struct Basis {
    geometry: SectionGeometry,
    nu: f64,
    period: f64,
    report: TruncationReport,
    stacks: Vec<ModeStack>,
}

impl Basis {
    pub fn geometry(&self) -> &SectionGeometry {
        &self.geometry
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn report(&self) -> &TruncationReport {
        &self.report
    }

    pub fn cutoff(&self) -> usize {
        self.report.nstar
    }

    pub fn stacks(&self) -> &[ModeStack] {
        &self.stacks
    }

    pub fn max_mode(&self) -> usize {
        self.stacks.len() - 1
    }
}

fn solve_level(
    g: &SectionGeometry,
    nu: f64,
    period: f64,
    max_mode: usize,
    cutoff: usize,
    intervals: usize,
) -> Result<Vec<ModeStack>> {
    (0..=max_mode)
        .into_par_iter()
        .map(|m| solve_modes(g, nu, period, m as i32, cutoff, intervals))
        .collect()
}

/// Finds the smallest cut-off meeting both truncation thresholds for every
/// `m <= M*` and keeps the corresponding stacks.
pub fn build_basis(g: &SectionGeometry, nu: f64, period: f64, settings: &TruncationSettings) -> Result<Basis> {
    validate(g, nu, period, MIN_CUTOFF, settings.intervals)?;
    for (name, v) in [("mu threshold", settings.mu_threshold), ("s threshold", settings.s_threshold)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidInput(format!("{name} must be positive, got {v}")));
        }
    }
    let cap = settings.cap.max(MIN_CUTOFF);
    let solve = |n| solve_level(g, nu, period, settings.max_mode, n, settings.intervals);

    let mut entries = Vec::new();
    let mut nstar_mu = None;
    let mut nstar_s = None;
    let mut levels: Vec<(usize, Vec<ModeStack>)> = Vec::new();
    let mut current = solve(MIN_CUTOFF)?;
    let mut n = MIN_CUTOFF;
    loop {
        let next = solve(n + 1)?;
        let mut worst_mu = 0.0f64;
        let mut worst_s = 0.0f64;
        for (a, b) in current.iter().zip(&next) {
            let mu = mu_metric(a)?;
            let s = s_metric(a, b)?;
            worst_mu = worst_mu.max(mu);
            worst_s = worst_s.max(s);
            entries.push(TruncationEntry { m: a.m as usize, cutoff: n, mu, s });
        }
        log::debug!("N = {n}: max mu = {worst_mu:e}, max s = {worst_s:e}");
        if nstar_mu.is_none() && worst_mu <= settings.mu_threshold {
            nstar_mu = Some(n);
        }
        if nstar_s.is_none() && worst_s <= settings.s_threshold {
            nstar_s = Some(n);
        }
        // Keep only what can still become the selected level.
        let keep = |lvl: usize| Some(lvl) == nstar_mu || Some(lvl) == nstar_s;
        levels.retain(|(lvl, _)| keep(*lvl));
        if keep(n) {
            levels.push((n, current));
        }
        if let (Some(a), Some(b)) = (nstar_mu, nstar_s) {
            let nstar = a.max(b);
            let stacks = levels
                .into_iter()
                .find(|(lvl, _)| *lvl == nstar)
                .map(|(_, s)| s)
                .expect("selected level retained");
            let report = TruncationReport {
                max_mode: settings.max_mode,
                mu_threshold: settings.mu_threshold,
                s_threshold: settings.s_threshold,
                intervals: settings.intervals,
                nstar_mu: a,
                nstar_s: b,
                nstar,
                entries,
            };
            return Ok(Basis { geometry: *g, nu, period, report, stacks });
        }
        if n >= cap {
            return Err(Error::NoConvergence { cap });
        }
        current = next;
        n += 1;
    }
}

/// Runs the cut-off search and returns its report.
pub fn determine_nstar(
    g: &SectionGeometry,
    nu: f64,
    period: f64,
    settings: &TruncationSettings,
) -> Result<TruncationReport> {
    Ok(build_basis(g, nu, period, settings)?.report)
}
