//! Residual reinforcement learning at desk scale.
//!
//! This crate implements the semi-gradient / residual-gradient family of
//! temporal-difference methods for both policy evaluation and continuous
//! control, together with the exact closed-form machinery needed to verify
//! them:
//!
//! - [`mdp`] — finite MDPs with exact Bellman operators, stationary
//!   distributions, and ground-truth value functions.
//! - [`objectives`] — closed-form MSVE / MSBE / MSPBE, the d-weighted
//!   projection, TD fixed points, and MSBE minimizers (test oracles).
//! - [`linear`] — incremental TD, residual-gradient, and mixed residual
//!   learners with linear function approximation.
//! - [`nn`] — a small feed-forward network engine with exact reverse-mode
//!   gradients for parameters *and* inputs, target-network pairs, Huber
//!   loss, and SGD/Adam optimizers.
//! - [`agent`] — DDPG and its residual variants, including Bi-Res-DDPG
//!   with a bidirectional target network.
//! - [`model`] — deterministic transition models (oracle or learned),
//!   Dyna-style planning updates, and k-step model-value-expansion losses.
//! - [`env`] — deterministic continuous-control tasks (pendulum swing-up,
//!   point mass) and diagnostic MDPs (star counterexample, random chains).
//! - [`harness`] — seeded, reproducible experiment runner with CSV/JSON
//!   output and AUC metrics.
//!
//! Start with the runnable programs under `examples/`; each one exercises a
//! single capability end to end. The `resrl` binary exposes the same
//! functionality behind a small command-line interface.

pub mod agent;
pub mod env;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod linear;
pub mod mdp;
pub mod model;
pub mod nn;
pub mod objectives;
pub mod seeding;

pub use error::{Error, Result};
