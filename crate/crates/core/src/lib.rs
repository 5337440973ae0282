//! Matched and Euclidean-mismatched decoding on finite Fourier-curve
//! constellations with tangent-space artificial noise.
//!
//! The crate is split along the analysis pipeline:
//!
//! - [`geometry`]: curve points, unit tangents, chords, offset spectra and
//!   antipodal closed forms.
//! - [`pairwise`]: the Gaussian tail function, Euclidean pairwise error
//!   probability for arbitrary pairs, and the matched phantom-pair expectation
//!   evaluated by Gauss-Hermite quadrature.
//! - [`bounds`]: finite-codebook symbol-error bounds for uniform even
//!   constellations.
//! - [`channel`]: the rank-one tangent-noise channel and both decoders.
//! - [`montecarlo`]: seeded, scheduling-independent simulation with Wilson
//!   intervals, and grid sweeps.
//! - [`sweep`]: sweep configuration, presets and CSV serialization used by the
//!   command-line tool.
//!
//! ```
//! use curvecomm::geometry::antipodal_geometry;
//! use curvecomm::pairwise::{antipodal_pep_euclidean, NoiseParams};
//!
//! let g = antipodal_geometry(20).unwrap();
//! assert!((g.delta - 2f64.sqrt()).abs() < 1e-12);
//!
//! let noise = NoiseParams::new(0.5, 0.3).unwrap();
//! let p = antipodal_pep_euclidean(20, noise).unwrap();
//! assert!(p > 0.0 && p < 0.5);
//! ```

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod channel;
pub mod error;
pub mod geometry;
pub mod montecarlo;
pub mod pairwise;
pub mod quadrature;
pub mod rng;
pub mod sweep;

pub use error::{Error, Result};
