//! Forward-backward splitting for `f + g`, where `f` is weakly convex with a
//! computable (possibly inexact) proximal map and `g` is convex with a
//! Lipschitz gradient.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`]: dense vectors, CSR matrices, operator-norm estimation and
//!   Matrix Market I/O.
//! * [`functions`]: the binary and sphere penalties, the ball-distance data
//!   term, simple smooth terms and the weakly-convex/smooth reformulation.
//! * [`inexact_prox`]: a smoothed surrogate giving certified ε-proximal points
//!   for products of two-root penalties.
//! * [`solver`]: the forward-backward iteration, step-size validation and
//!   trajectory logging.
//! * [`diagnostics`]: convergence tube radii, contraction factors, sharpness
//!   and criticality probes, geometric rate fitting.
//! * [`tomography`]: parallel-beam projectors, phantoms, sinograms, LSQR
//!   baselines and the relaxed binary reconstruction.
//! * [`cli`]: the `wcfb` command-line front end.

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod functions;
pub mod inexact_prox;
pub mod linalg;
pub mod solver;
pub mod tomography;

pub use error::{Error, Result};
pub use functions::{
    BallDistanceTerm, BinaryPenalty, CompositeProblem, Penalty, SmoothTerm, SpherePenalty,
};
pub use linalg::{CsrMatrix, Vector};
pub use solver::{run_fb, validate_parameters, Mode, ParamReport, SolverConfig, Trajectory};
