//! Workbench for locally asymptotically normal (LAN) one-sided tests in
//! autoregressive models with conditionally heteroskedastic perturbations.
//!
//! The library simulates AR(1), ARCH-type, and AR(m) series under a null
//! hypothesis and under contiguous alternatives drifting at rate n^(-1/2),
//! evaluates the central sequence V_n that drives the LAN expansion, and
//! corrects the estimation error introduced when V_n is evaluated at an
//! estimated parameter instead of the true one. The correction rests on an
//! estimator computed from an extended sample of size N = floor(1 + n^(S+1)),
//! whose error is small enough that the estimated and true central sequences
//! become asymptotically equivalent.
//!
//! Modules, bottom-up:
//! - [`score`]: innovation score function M_f, its derivatives, and the
//!   Fisher-type moments I_j for Gaussian and unit-variance Student-t noise;
//! - [`dgp`]: model configuration and reproducible path simulation;
//! - [`estimate`]: least-squares fits, confidence intervals, and the
//!   extended-sample estimator;
//! - [`central`]: central sequences, analytic gradients, plug-in variance
//!   estimates, and the tangent-space correction;
//! - [`testbench`]: the Neyman-Pearson decision and theoretical power;
//! - [`mc`]: the deterministic Monte Carlo harness and statistical oracles.

pub mod central;
pub mod dgp;
pub mod error;
pub mod estimate;
pub mod mc;
pub mod perturb;
pub mod quad;
pub mod score;
pub mod testbench;

pub use error::{Error, Result};
