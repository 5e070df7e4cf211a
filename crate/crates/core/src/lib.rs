//! Radial integrands `f(z) = g(|z|)` with `g(t) = t^{a + b sin φ(t)}` that are
//! uniformly elliptic yet have `p`-`q` growth for arbitrary `1 < p < q`.
//!
//! - [`integrand`]: `φ`, `g` and their derivatives.
//! - [`hessian`]: gradient, Hessian and spectrum of `f`, ellipticity bounds,
//!   growth-constant fits and the split-integrand contrast.
//! - [`verifier`]: grid-based checks of every bound, with signed margins.
//! - [`extreme`]: the exponent oscillation in the phase variable.
//! - [`variational`]: a finite-difference minimiser on the unit square.
//! - [`report`] and [`cli`]: CSV/JSON output and the command line.

pub mod cli;
pub mod error;
pub mod extreme;
pub mod hessian;
pub mod integrand;
pub mod params;
pub mod report;
pub mod variational;
pub mod verifier;

pub use error::{Error, Result};
pub use params::PQParams;
