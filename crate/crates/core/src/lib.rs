//! Semiclassical simulation toolkit on the periodic torus.
//!
//! The crate builds, perturbs and propagates semiclassical states on a
//! discretized d-torus (d = 1 or 2):
//!
//! - [`phasegrid`]: grids, wavefunctions, transforms, norms.
//! - [`pdo`]: symbols, quantization, oscillatory integrals, a local FIO kernel.
//! - [`randsymbol`]: random mesoscopic perturbations built from bump coverings
//!   of an energy shell, with hypothesis validators.
//! - [`hamflow`]: Hamiltonian flows, tangent maps, instability and distortion
//!   diagnostics.
//! - [`qprop`]: unitary propagation, conjugated operators, Egorov residuals.
//! - [`lagdecomp`]: band decomposition of eigenmodes into separated Lagrangian
//!   superpositions and WKB transport with random phase corrections.
//! - [`expstats`]: exponent budgets, independence and concentration checks,
//!   certified sup-norm measurements and the experiment sweep.
//! - [`cli`]: configuration, orchestration and reporting.
//!
//! Run `cargo run --example exponents` (or any other example) for a tour of
//! each capability; the `semitorus` binary drives the same pipelines from
//! JSON configuration files.

pub mod error;
pub mod fit;
pub mod rng;

pub mod phasegrid;

pub mod pdo;

pub mod randsymbol;

pub mod hamflow;

pub mod qprop;

pub mod lagdecomp;

pub mod expstats;

pub mod cli;

pub use error::{Error, Result};
