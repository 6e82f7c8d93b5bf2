//! Vessel cross-sections and the elliptical coordinate map.
//!
//! Elliptical sections are described by the semi-focal distance `a` and the
//! elliptical radius `b`, so that the boundary is the level set `eta = b` of
//!
//! ```text
//! x1 = a cosh(eta) cos(theta),   x2 = a sinh(eta) sin(theta)
//! ```
//!
//! with semi-axes `alpha = a cosh(b)` (along `x1`) and `beta = a sinh(b)`.
//! Lengths are in cm throughout.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SectionGeometry {
    Circle { radius: f64 },
    CircularAnnulus { inner: f64, outer: f64 },
    /// Semi-focal distance `a` and elliptical radius `b`.
    Ellipse { a: f64, b: f64 },
    /// Two confocal ellipses `eta = b_inner` and `eta = b_outer`.
    EllipticalAnnulus { a: f64, b_inner: f64, b_outer: f64 },
}

/// Interval of the elliptical radius covered by an elliptical section.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaDomain {
    pub a: f64,
    pub start: f64,
    pub end: f64,
    /// True when `start = 0` is the inter-focal segment (simply connected
    /// ellipse); false when `start` is an inner wall.
    pub filled: bool,
}

impl EtaDomain {
    pub fn len(&self) -> f64 {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.len() <= 0.0
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{name} must be positive and finite, got {v}")))
    }
}

impl SectionGeometry {
    pub fn circle(radius: f64) -> Result<Self> {
        positive("radius", radius)?;
        Ok(Self::Circle { radius })
    }

    pub fn circular_annulus(inner: f64, outer: f64) -> Result<Self> {
        positive("inner radius", inner)?;
        positive("outer radius", outer)?;
        if inner >= outer {
            return Err(Error::InvalidInput(format!(
                "inner radius {inner} must be below outer radius {outer}"
            )));
        }
        Ok(Self::CircularAnnulus { inner, outer })
    }

    pub fn ellipse(a: f64, b: f64) -> Result<Self> {
        positive("a", a)?;
        positive("b", b)?;
        Ok(Self::Ellipse { a, b })
    }

    pub fn elliptical_annulus(a: f64, b_inner: f64, b_outer: f64) -> Result<Self> {
        positive("a", a)?;
        positive("b_inner", b_inner)?;
        positive("b_outer", b_outer)?;
        if b_inner >= b_outer {
            return Err(Error::InvalidInput(format!(
                "b_inner {b_inner} must be below b_outer {b_outer}"
            )));
        }
        Ok(Self::EllipticalAnnulus { a, b_inner, b_outer })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Circle { .. } => "circle",
            Self::CircularAnnulus { .. } => "circular annulus",
            Self::Ellipse { .. } => "ellipse",
            Self::EllipticalAnnulus { .. } => "elliptical annulus",
        }
    }

    /// Semi-axes `(alpha, beta)` of the outer boundary.
    pub fn outer_semiaxes(&self) -> (f64, f64) {
        match *self {
            Self::Circle { radius } => (radius, radius),
            Self::CircularAnnulus { outer, .. } => (outer, outer),
            Self::Ellipse { a, b } => (a * b.cosh(), a * b.sinh()),
            Self::EllipticalAnnulus { a, b_outer, .. } => (a * b_outer.cosh(), a * b_outer.sinh()),
        }
    }

    /// Semi-axes of the inner boundary, if any.
    pub fn inner_semiaxes(&self) -> Option<(f64, f64)> {
        match *self {
            Self::CircularAnnulus { inner, .. } => Some((inner, inner)),
            Self::EllipticalAnnulus { a, b_inner, .. } => Some((a * b_inner.cosh(), a * b_inner.sinh())),
            _ => None,
        }
    }

    /// The `eta` interval of an elliptical section.
    pub fn eta_domain(&self) -> Result<EtaDomain> {
        match *self {
            Self::Ellipse { a, b } => Ok(EtaDomain { a, start: 0.0, end: b, filled: true }),
            Self::EllipticalAnnulus { a, b_inner, b_outer } => Ok(EtaDomain {
                a,
                start: b_inner,
                end: b_outer,
                filled: false,
            }),
            _ => Err(Error::UnsupportedGeometry {
                op: "elliptical coordinates",
                geometry: self.name(),
            }),
        }
    }

    fn focal(&self, op: &'static str) -> Result<f64> {
        match *self {
            Self::Ellipse { a, .. } | Self::EllipticalAnnulus { a, .. } => Ok(a),
            _ => Err(Error::UnsupportedGeometry { op, geometry: self.name() }),
        }
    }

    /// Maps elliptical coordinates to Cartesian `(x1, x2)`.
    pub fn to_cartesian(&self, eta: f64, theta: f64) -> Result<(f64, f64)> {
        let a = self.focal("to_cartesian")?;
        if eta < 0.0 {
            return Err(Error::InvalidInput(format!("eta must be nonnegative, got {eta}")));
        }
        Ok((a * eta.cosh() * theta.cos(), a * eta.sinh() * theta.sin()))
    }

    /// Inverse of [`to_cartesian`](Self::to_cartesian); `theta` is returned in
    /// `[0, 2 pi)`.
    pub fn to_elliptic(&self, x1: f64, x2: f64) -> Result<(f64, f64)> {
        let a = self.focal("to_elliptic")?;
        // x1 + i x2 = a cosh(eta + i theta)
        let w = (Complex64::new(x1, x2) / a).acosh();
        let (mut eta, mut theta) = (w.re, w.im);
        if eta < 0.0 {
            eta = -eta;
            theta = -theta;
        }
        Ok((eta, theta.rem_euclid(2.0 * PI)))
    }

    /// Area scale factor `J = a^2 (sinh^2 eta + sin^2 theta)` of the map.
    pub fn jacobian(&self, eta: f64, theta: f64) -> Result<f64> {
        let a = self.focal("jacobian")?;
        if eta < 0.0 {
            return Err(Error::InvalidInput(format!("eta must be nonnegative, got {eta}")));
        }
        Ok(jacobian(a, eta, theta))
    }

    pub fn area(&self) -> f64 {
        let (alpha, beta) = self.outer_semiaxes();
        let outer = PI * alpha * beta;
        match self.inner_semiaxes() {
            Some((a1, b1)) => outer - PI * a1 * b1,
            None => outer,
        }
    }

    /// Characteristic length: `alpha + beta` for filled sections, the mean gap
    /// `(alpha2 - alpha1 + beta2 - beta1) / 2` for annuli.
    pub fn characteristic_length(&self) -> f64 {
        let (a2, b2) = self.outer_semiaxes();
        match self.inner_semiaxes() {
            Some((a1, b1)) => 0.5 * (a2 - a1 + b2 - b1),
            None => a2 + b2,
        }
    }

    /// Ratio `beta / alpha` of the outer boundary.
    pub fn ellipticity(&self) -> f64 {
        let (alpha, beta) = self.outer_semiaxes();
        beta / alpha
    }

    /// Conic eccentricity `sqrt(1 - beta^2 / alpha^2)` of the outer boundary.
    pub fn eccentricity(&self) -> f64 {
        let e = self.ellipticity();
        (1.0 - e * e).max(0.0).sqrt()
    }
}

#[inline]
pub(crate) fn jacobian(a: f64, eta: f64, theta: f64) -> f64 {
    // sin^2 via the double angle keeps J exactly zero at the foci.
    let s = eta.sinh();
    a * a * (s * s + 0.5 * (1.0 - (2.0 * theta).cos()))
}

/// Builds an ellipse from its semi-axes, major axis along `x1`.
pub fn ellipse_from_semiaxes(alpha: f64, beta: f64) -> Result<SectionGeometry> {
    positive("alpha", alpha)?;
    positive("beta", beta)?;
    if alpha <= beta {
        return Err(Error::DegenerateGeometry(format!(
            "need alpha > beta, got alpha = {alpha}, beta = {beta}"
        )));
    }
    let a = ((alpha - beta) * (alpha + beta)).sqrt();
    // log((alpha + beta) / a), written as asinh to stay accurate for thin
    // ellipses where the log argument approaches one.
    let b = (beta / a).asinh();
    SectionGeometry::ellipse(a, b)
}

/// Builds the annulus between the ellipse `(alpha2, beta2)` and the inner
/// confocal ellipse with minor semi-axis `beta1`.
pub fn confocal_annulus_from_semiaxes(alpha2: f64, beta2: f64, beta1: f64) -> Result<SectionGeometry> {
    positive("alpha2", alpha2)?;
    positive("beta2", beta2)?;
    positive("beta1", beta1)?;
    if alpha2 <= beta2 {
        return Err(Error::DegenerateGeometry(format!(
            "need alpha2 > beta2, got alpha2 = {alpha2}, beta2 = {beta2}"
        )));
    }
    if beta1 >= beta2 {
        return Err(Error::InvalidInput(format!(
            "inner minor semi-axis {beta1} must be below outer {beta2}"
        )));
    }
    let a = ((alpha2 - beta2) * (alpha2 + beta2)).sqrt();
    let alpha1 = (a * a + beta1 * beta1).sqrt();
    debug_assert!((alpha1 - a * (beta1 / a).asinh().cosh()).abs() <= 1e-12 * alpha1);
    let b_inner = (beta1 / a).asinh();
    let b_outer = (beta2 / a).asinh();
    SectionGeometry::elliptical_annulus(a, b_inner, b_outer)
}
