//! Construction and numerical verification of the cohomogeneity-one Kähler
//! metrics `dt² + (hh')²θ⊗θ + h²g_FS` on `ℂPⁿ` generated by even profile
//! polynomials `P` through `h'' = P'(h)/2`.
//!
//! The crate is layered bottom-up:
//!
//! * [`profile`]: admissible profiles, the profile ODE and `f`, `φ`.
//! * [`geometry`]: the metric in explicit chart coordinates, its complex
//!   structure and curvature (exact second derivatives by hyper-dual numbers).
//! * [`algebra`]: the model tensors `Π`, `Φ`, `Ψ`, derivation actions,
//!   pseudosymmetry residuals and the QCH least-squares fit.
//! * [`verifier`]: end-to-end checks and structured reports.

// `!(x > 0.0)` style guards are used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod autodiff;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod ode;
pub mod poly;
pub mod profile;
pub mod report;
pub mod verifier;

pub use error::{Error, Result};
pub use profile::{OdeTolerances, Profile, ProfileSolution};
