//! Exact simulation of integer-valued Hamiltonian cellular automata.

pub mod cmatrix;
pub mod conservation;
pub mod continuum;
pub mod engine;
pub mod error;
pub mod exact;
pub mod io;
pub mod multipartite;
pub mod random;
pub mod spectral;
pub mod suite;
pub mod uncertainty;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
