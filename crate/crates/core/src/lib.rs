//! Numerical laboratory for the mixed operator `L = -Δ + (-Δ)^s` with a
//! Dirichlet exterior condition.
//!
//! The crate is organised bottom-up:
//!
//! * [`gridcore`] uniform grid domains, zero-extended fields and
//!   measure/perimeter/superlevel utilities;
//! * [`mixedop`] the discrete operator, its kernel table and energy forms;
//! * [`eigsolve`] principal eigenpairs and boundary normal-derivative traces;
//! * [`rearrange`] discrete Schwarz symmetrization and Pólya–Szegő reports;
//! * [`convexgeom`] exact planar convex geometry (in/out balls, Bonnesen
//!   deficit, ball sandwich, counterexample bodies);
//! * [`harness`] experiment configuration, orchestration and CSV output.
//!
//! The fractional Laplacian uses the unnormalized kernel
//! `(-Δ)^s u(x) = ½ ∫ (2u(x) - u(x+y) - u(x-y)) |y|^{-n-2s} dy`.

pub mod convexgeom;
pub mod eigsolve;
pub mod error;
pub mod gridcore;
pub mod harness;
pub mod mixedop;
pub mod par;
pub mod quadrature;
pub mod rearrange;

pub use error::{Error, Result};
