//! Fejér summation of Fourier series in countably many torus variables.
//!
//! Functions live on the infinite product of circles with its product
//! measure; characters are indexed by integer vectors with finite support.
//! This crate provides the index bookkeeping, the classical summation
//! kernels, test-function families with exact reference data, and the
//! machinery to study how rectangular Fejér means converge when both the
//! degrees and the number of active variables grow.

pub mod error;
pub mod experiment;
pub mod funcspace;
pub mod index;
pub mod kernels;
pub mod summation;
pub mod tensor_net;

pub use error::{Error, Result};
