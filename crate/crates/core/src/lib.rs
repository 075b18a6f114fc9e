//! Numerics for the inhomogeneous Matsubara chain.
//!
//! The crate builds the transfer matrix of a chain of `U_q(sl2)` sites with
//! arbitrary spins and inhomogeneities, extracts the dominant eigenvector in a
//! spin sector, solves the Baxter equation for the twisted polynomials `Q±`
//! and evaluates the deformed Abelian integrals on top of them. From these
//! the two-point function `omega(ζ, ξ)` follows, together with the
//! expectation-value machinery (determinant form, basis table), a brute-force
//! finite-space oracle, domain-wall partition functions and the classical
//! `q → 1` limit.
//!
//! Spectral parameters are carried as [`Zeta`] values holding `ln ζ`, so all
//! powers `ζ^γ` and shifts `ζ → q^k ζ` are single-valued and mutually
//! consistent.

pub mod abelian;
pub mod classical;
pub mod dwbc;
pub mod error;
pub mod expectation;
pub mod fixtures;
pub mod model;
pub mod omega;
pub mod operators;
pub mod oracle;
pub mod poly;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use model::{ModelParams, Site, Zeta, C64};
pub use omega::OmegaModel;
pub use poly::Poly;
