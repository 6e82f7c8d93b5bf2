//! Pulsatile, fully-developed flow in circular, elliptical and annular
//! sections, driven by a prescribed periodic flow rate.
//!
//! The unknowns are the axial velocity and the pressure-gradient waveform.
//! Elliptical sections are solved by a Fourier expansion in the elliptical
//! angle that turns the heat-type equation into a coupled system of
//! two-point boundary-value problems, one per temporal mode.

pub mod banded;
pub mod error;
pub mod geometry;
pub mod inverse;
pub mod oracle;
pub mod quadrature;
pub mod spectral_bvp;
pub mod stationary;
pub mod waveform;
pub mod womersley_circle;

pub use error::{Error, Result};
pub use geometry::{confocal_annulus_from_semiaxes, ellipse_from_semiaxes, SectionGeometry};
pub use stationary::{solve_stationary, StationarySolution, Wall};
pub use waveform::{fourier_fit, ingest_csv, FourierWaveform, SampledWaveform};
pub use inverse::{FlowSolution, PressureGradientSeries};
pub use spectral_bvp::{build_basis, determine_nstar, solve_modes, Basis, ModeStack, TruncationReport, TruncationSettings};
