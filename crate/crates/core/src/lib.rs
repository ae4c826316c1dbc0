//! Joint beam-cluster selection and linear precoding for coordinated
//! multi-satellite downlinks with DFT beamforming.
//!
//! Pipeline: [`geometry`] turns positions into (U,V) directions and ranges,
//! [`channel`] synthesizes channels and the DFT-effective tensor,
//! [`clustering`] enumerates candidate clusters per user, and [`dual`] /
//! [`simple`] compute associations and precoders that meet every SINR target
//! at minimum total power. [`oracle`] certifies results by exhaustive search;
//! [`scenario`], [`sweep`] and [`export`] cover configuration, experiments
//! and file output.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod clustering;
pub mod dual;
pub mod error;
pub mod export;
pub mod geometry;
pub mod linalg;
pub mod oracle;
pub mod problem;
pub mod scenario;
pub mod simple;
pub mod sweep;

pub use dual::{solve_dual, SolverOptions};
pub use error::{Error, Result};
pub use problem::{Algorithm, Instance, PrecoderSolution};
pub use scenario::Scenario;
pub use simple::solve_simple;
