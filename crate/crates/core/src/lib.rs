//! Nonlocal kernel representation of the relativistic square-root operator
//! ħc√(−(∇ − i a)² + μ²) and the machinery around it: special functions, fractional
//! powers of semigroups, Fourier-multiplier oracles, the real-time propagator and the
//! Dirac/square-root bridge.

pub mod dirac;
pub mod error;
pub mod kernel;
pub mod quad;
pub mod field;
pub mod fractional;
pub mod linalg;
pub mod params;
pub mod propagator;
pub mod special;
pub mod spectral;
pub mod suites;
pub mod config;
pub mod cli;

pub use error::{Error, Result};
