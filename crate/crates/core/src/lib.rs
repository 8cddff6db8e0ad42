//! Computational Littlewood-Paley/Besov analysis toolkit and a
//! pseudo-spectral successive-approximation solver for the 2D viscous
//! shallow water system on a periodic box.
//!
//! The crate is organized bottom-up:
//!
//! - [`spectral`]: periodic grid, FFTs, spectral differentiation, dealiased
//!   products.
//! - [`littlewood_paley`]: dyadic partition of unity, frequency blocks,
//!   Besov / Sobolev / Chemin-Lerner norms.
//! - [`bony`]: paraproduct and remainder operators plus empirical verifiers
//!   for the functional inequalities the solver's estimates consume.
//! - [`calibration`]: one-time measurement of the inequality constants that
//!   are frozen and reused by every downstream threshold.
//! - [`linear`]: transport and transport-diffusion integrators with a priori
//!   estimate monitors.
//! - [`picard`]: the successive-approximation scheme, existence-time
//!   selection, budget and contraction diagnostics, uniqueness and
//!   long-horizon experiments.
//! - [`direct`]: an independent semi-implicit nonlinear integrator used as a
//!   cross-check oracle.
//! - [`data`]: seeded initial-data families.
//! - [`manifest`]: run manifests and the CLI driver plumbing.

pub mod bony;
pub mod calibration;
pub mod data;
pub mod direct;
pub mod error;
pub mod linear;
pub mod littlewood_paley;
pub mod manifest;
pub mod picard;
pub mod spectral;

pub use error::{Error, Result};
