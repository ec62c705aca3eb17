//! Toolkit for time-stamped dyadic proximity interactions, as recorded by
//! wearable sociometric badges.
//!
//! Badge streams arrive as edgelists of `(start, badge a, badge b, end)`
//! rows. Raw streams flicker: one face-to-face conversation is often stored
//! as many short fragments. This crate turns such streams into a normalized
//! [`model::EventLog`], repairs them with the three standard strategies
//! (minimum-duration filtering, gap interpolation, triadic closure), and
//! scores any processed stream against a ground-truth stream second by
//! second.
//!
//! The crate is organized as narrow layers:
//!
//! - [`model`]: canonical event/roster/window types, normalization, and
//!   per-second rasterization.
//! - [`preprocess`]: the repair strategies, each a pure
//!   `EventLog -> EventLog` transform.
//! - [`validity`]: classification tables, sensitivity / specificity /
//!   accuracy, and cutoff sweeps.
//! - [`aggregate`]: weighted contact networks, descriptive statistics,
//!   nomination networks with weak/strong symmetrization, and rank-based
//!   hit rates.
//! - [`stats`]: a small self-contained statistics kernel: logistic
//!   regression, likelihood-ratio tests, pooled t-tests, Cohen's kappa.
//! - [`simgen`]: synthetic ground truth plus a badge-physics degradation
//!   model, used as the oracle in the test suite.
//! - [`io`]: file formats, parse reports, and deterministic output
//!   manifests for the command-line frontend.
//!
//! Everything is deterministic: all randomness flows through explicit seeds
//! and all collections iterate in a fixed order.

pub mod aggregate;
pub mod io;
pub mod model;
pub mod preprocess;
pub mod simgen;
pub mod stats;
pub mod validity;
