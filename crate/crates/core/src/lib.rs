//! Exact and floating-point machinery for the sign symbol
//! `m(g) = sign(Re(a conj(c) + b conj(d)))` on PSL2 over imaginary quadratic
//! rings: ring arithmetic, lattice enumeration, kernel classification,
//! Cotlar-identity sweeps, lemma checks, the ANK decomposition and
//! finitely supported group-algebra norms.

pub mod ank;
pub mod cotlar;
pub mod error;
pub mod ncfourier;
pub mod psl2;
pub mod quadring;
pub mod replay;
pub mod report;
pub mod rng;
pub mod sweep;
pub mod symbol;
pub mod text;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
