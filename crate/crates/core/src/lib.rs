//! Random induced states, separability tests and the convex geometry of
//! quantum state space, at desk scale.
//!
//! The crate is layered bottom-up: [`linalg`] supplies Hermitian operators,
//! an eigensolver and tensor-product bookkeeping; [`rng`] derives
//! reproducible per-trial streams; [`ensembles`] samples GUE, Ginibre and
//! induced states; [`spectral`] and [`separability`] measure them;
//! [`geometry`] computes volumes and mean widths; [`experiments`] runs the
//! batch sweeps behind the CLI.

pub mod ensembles;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod linalg;
pub mod matrix_io;
pub mod rng;
pub mod separability;
pub mod spectral;
pub mod stats;

pub use error::{Error, Result};
