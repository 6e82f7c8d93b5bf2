//! Closed-form steady flows and their flux to pressure-gradient maps.
//!
//! The steady problem is `-nu lap(w) = lambda` with no-slip walls and the
//! flux `int w dA = f` prescribed. Everything is linear in `lambda`, so each
//! geometry has a unit-gradient solution and a scalar `lambda = f / F` where
//! `F` is the flux carried by unit gradient.
//!
//! In elliptical coordinates the steady field only has the angular modes
//! `0` and `+-2`: `u(eta, theta) = u0(eta) + 2 u2(eta) cos(2 theta)`.

use crate::error::{Error, Result};
use crate::geometry::{EtaDomain, SectionGeometry};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Which wall of a section.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Wall {
    Outer,
    Inner,
}

/// Steady flow through a section for a given flux.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationarySolution {
    geometry: SectionGeometry,
    nu: f64,
    flux: f64,
    lambda: f64,
}

fn check_nu(nu: f64) -> Result<()> {
    if nu.is_finite() && nu > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("viscosity must be positive, got {nu}")))
    }
}

fn check_flux(f: f64) -> Result<()> {
    if f.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("flux must be finite, got {f}")))
    }
}

/// Flux carried by a unit pressure gradient.
pub fn unit_flux(g: &SectionGeometry, nu: f64) -> Result<f64> {
    check_nu(nu)?;
    Ok(match *g {
        SectionGeometry::Circle { radius } => PI * radius.powi(4) / (8.0 * nu),
        SectionGeometry::CircularAnnulus { inner, outer } => {
            let d = outer * outer - inner * inner;
            PI / (8.0 * nu) * (outer.powi(4) - inner.powi(4) - d * d / (outer / inner).ln())
        }
        SectionGeometry::Ellipse { a, b } => {
            let s = (2.0 * b).sinh();
            PI * a.powi(4) * s * s * (2.0 * b).tanh() / (32.0 * nu)
        }
        SectionGeometry::EllipticalAnnulus { a, b_inner: b1, b_outer: b2 } => {
            let gap = b2 - b1;
            let dc = (2.0 * b2).cosh() - (2.0 * b1).cosh();
            let bracket = 0.25 * ((4.0 * b2).sinh() - (4.0 * b1).sinh())
                - dc * dc / (2.0 * gap)
                - ((2.0 * gap).cosh() - 1.0) / (2.0 * gap).sinh();
            PI * a.powi(4) * bracket / (16.0 * nu)
        }
    })
}

/// Angular modes `(u0, u2)` of the unit-gradient steady field at `eta`.
pub fn unit_modes(dom: &EtaDomain, nu: f64, eta: f64) -> (f64, f64) {
    let a2 = dom.a * dom.a;
    if dom.filled {
        let b = dom.end;
        let e4 = (4.0 * b).exp();
        let u0 = -a2 / (8.0 * nu) * ((2.0 * eta).cosh() - (2.0 * b).cosh());
        let u2 = -a2 / (16.0 * nu) * (1.0 + e4 - (2.0 * (b - eta)).exp() - (2.0 * (b + eta)).exp())
            / (1.0 + e4);
        (u0, u2)
    } else {
        let (b1, b2) = (dom.start, dom.end);
        let gap = b2 - b1;
        let u0 = a2 / (8.0 * nu)
            * (((eta - b1) * (2.0 * b2).cosh() - (eta - b2) * (2.0 * b1).cosh()) / gap
                - (2.0 * eta).cosh());
        let u2 = a2 / (16.0 * nu)
            * (((2.0 * (eta - b1)).sinh() - (2.0 * (eta - b2)).sinh()) / (2.0 * gap).sinh() - 1.0);
        (u0, u2)
    }
}

/// `eta`-derivatives of [`unit_modes`].
pub fn unit_mode_slopes(dom: &EtaDomain, nu: f64, eta: f64) -> (f64, f64) {
    let a2 = dom.a * dom.a;
    if dom.filled {
        let b = dom.end;
        let e4 = (4.0 * b).exp();
        let d0 = -a2 / (4.0 * nu) * (2.0 * eta).sinh();
        let d2 = -a2 / (8.0 * nu) * ((2.0 * (b - eta)).exp() - (2.0 * (b + eta)).exp()) / (1.0 + e4);
        (d0, d2)
    } else {
        let (b1, b2) = (dom.start, dom.end);
        let gap = b2 - b1;
        let d0 = a2 / (8.0 * nu)
            * (((2.0 * b2).cosh() - (2.0 * b1).cosh()) / gap - 2.0 * (2.0 * eta).sinh());
        let d2 = a2 / (8.0 * nu) * ((2.0 * (eta - b1)).cosh() - (2.0 * (eta - b2)).cosh())
            / (2.0 * gap).sinh();
        (d0, d2)
    }
}

pub fn poiseuille_circle(radius: f64, nu: f64, f: f64) -> Result<StationarySolution> {
    solve_stationary(&SectionGeometry::circle(radius)?, nu, f)
}

pub fn poiseuille_circular_annulus(inner: f64, outer: f64, nu: f64, f: f64) -> Result<StationarySolution> {
    solve_stationary(&SectionGeometry::circular_annulus(inner, outer)?, nu, f)
}

pub fn poiseuille_ellipse(g: &SectionGeometry, nu: f64, f: f64) -> Result<StationarySolution> {
    match g {
        SectionGeometry::Ellipse { .. } => solve_stationary(g, nu, f),
        _ => Err(Error::UnsupportedGeometry { op: "poiseuille_ellipse", geometry: g.name() }),
    }
}

pub fn poiseuille_elliptical_annulus(g: &SectionGeometry, nu: f64, f: f64) -> Result<StationarySolution> {
    match g {
        SectionGeometry::EllipticalAnnulus { .. } => solve_stationary(g, nu, f),
        _ => Err(Error::UnsupportedGeometry {
            op: "poiseuille_elliptical_annulus",
            geometry: g.name(),
        }),
    }
}

/// Steady solution for any section.
pub fn solve_stationary(g: &SectionGeometry, nu: f64, f: f64) -> Result<StationarySolution> {
    check_flux(f)?;
    let lambda = f / unit_flux(g, nu)?;
    Ok(StationarySolution { geometry: *g, nu, flux: f, lambda })
}

impl StationarySolution {
    pub fn geometry(&self) -> &SectionGeometry {
        &self.geometry
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn flux(&self) -> f64 {
        self.flux
    }

    /// Pressure gradient `lambda` (pressure `p = -lambda z + p0`).
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Velocity at a Cartesian point; zero outside the fluid region.
    pub fn velocity(&self, x1: f64, x2: f64) -> f64 {
        let (lambda, nu) = (self.lambda, self.nu);
        match self.geometry {
            SectionGeometry::Circle { radius } => {
                let r2 = (x1 * x1 + x2 * x2) / (radius * radius);
                if r2 > 1.0 {
                    return 0.0;
                }
                lambda * radius * radius / (4.0 * nu) * (1.0 - r2)
            }
            SectionGeometry::CircularAnnulus { inner, outer } => {
                let r = x1.hypot(x2);
                if r < inner || r > outer {
                    return 0.0;
                }
                lambda / (4.0 * nu)
                    * (outer * outer - r * r
                        - (outer * outer - inner * inner) * (outer / r).ln() / (outer / inner).ln())
            }
            SectionGeometry::Ellipse { .. } => {
                let (alpha, beta) = self.geometry.outer_semiaxes();
                let q = x1 * x1 / (alpha * alpha) + x2 * x2 / (beta * beta);
                if q > 1.0 {
                    return 0.0;
                }
                let peak = lambda * alpha * alpha * beta * beta
                    / (2.0 * nu * (alpha * alpha + beta * beta));
                peak * (1.0 - q)
            }
            SectionGeometry::EllipticalAnnulus { .. } => {
                let (eta, theta) = self.geometry.to_elliptic(x1, x2).expect("elliptical section");
                self.velocity_elliptic(eta, theta).unwrap_or(0.0)
            }
        }
    }

    /// Velocity at elliptical coordinates, built from the angular modes.
    pub fn velocity_elliptic(&self, eta: f64, theta: f64) -> Result<f64> {
        let dom = self.geometry.eta_domain()?;
        if eta < dom.start || eta > dom.end {
            return Err(Error::InvalidInput(format!(
                "eta = {eta} outside [{}, {}]",
                dom.start, dom.end
            )));
        }
        let (u0, u2) = self.modes(eta)?;
        Ok(u0 + 2.0 * u2 * (2.0 * theta).cos())
    }

    /// Angular modes `(u0, u2)` scaled by the actual pressure gradient.
    pub fn modes(&self, eta: f64) -> Result<(f64, f64)> {
        let dom = self.geometry.eta_domain()?;
        let (u0, u2) = unit_modes(&dom, self.nu, eta);
        Ok((self.lambda * u0, self.lambda * u2))
    }

    /// Wall shear `-nu dw/dn` with `n` the normal pointing out of the fluid;
    /// positive for forward flow. `theta` is the polar angle on circular
    /// sections and the elliptical angle otherwise.
    pub fn wall_shear(&self, theta: f64, wall: Wall) -> Result<f64> {
        let (lambda, nu) = (self.lambda, self.nu);
        match (self.geometry, wall) {
            (SectionGeometry::Circle { radius }, Wall::Outer) => Ok(0.5 * lambda * radius),
            (SectionGeometry::CircularAnnulus { inner, outer }, _) => {
                let slope = |r: f64| {
                    lambda / (4.0 * nu)
                        * (-2.0 * r + (outer * outer - inner * inner) / (r * (outer / inner).ln()))
                };
                Ok(match wall {
                    Wall::Outer => -nu * slope(outer),
                    Wall::Inner => nu * slope(inner),
                })
            }
            (SectionGeometry::Ellipse { .. }, Wall::Outer)
            | (SectionGeometry::EllipticalAnnulus { .. }, _) => {
                let dom = self.geometry.eta_domain()?;
                let (eta, sign) = match wall {
                    Wall::Outer => (dom.end, -1.0),
                    Wall::Inner => (dom.start, 1.0),
                };
                let (d0, d2) = unit_mode_slopes(&dom, nu, eta);
                let du = lambda * (d0 + 2.0 * d2 * (2.0 * theta).cos());
                let j = crate::geometry::jacobian(dom.a, eta, theta);
                Ok(sign * nu * du / j.sqrt())
            }
            (g, Wall::Inner) => Err(Error::UnsupportedGeometry {
                op: "inner wall shear",
                geometry: g.name(),
            }),
        }
    }
}
