//! Numerical spectral solver for Sturm-Liouville problems of the form
//!
//! ```text
//! (p(x) f')' - (q(x) - lambda r(x)) f = 0          on ]0, L[
//! p(0) f'(0) = (alpha1 lambda + alpha2) f(0)
//! p(L) f'(L) = (beta1  lambda - beta2 ) f(L)
//! ```
//!
//! with the spectral parameter `lambda` appearing affinely in *both* boundary
//! conditions. The solver shoots the initial value problem from x = 0 with an
//! adaptive Dormand-Prince 5(4) integrator, counts interior zeros through a
//! continuous Prüfer-type phase, locates the auxiliary spectrum (terminal
//! Dirichlet condition) to delimit the branches on which the characteristic
//! function is monotone, and bisects the pole-cleared characteristic
//! `G(lambda) = p(L)f'(L) - (beta1 lambda - beta2) f(L)` on each branch.
//!
//! On top of the eigensolver sit:
//!
//! * [`transforms`] — factorization to an associated regular Sturm-Liouville
//!   problem, its inverse map, the Liouville normal form, and verifier suites
//!   (zero separation/interlacing, eigenvalue asymptotics, monotonicity probes);
//! * [`specfun`] — independent closed-form oracles: Kummer/Tricomi confluent
//!   hypergeometric series, digamma, and the constant/linear viscosity profile
//!   solutions;
//! * [`heleshaw`] — the three-layer Hele-Shaw stability front end that builds
//!   problem instances from physical parameters and scans wave numbers.
//!
//! All computations are pure functions of their inputs; with the `parallel`
//! feature (default) the embarrassingly parallel layers (wave-number scans,
//! branch searches, verifier batches) run on rayon, with a sequential fallback
//! otherwise.

pub mod error;
pub mod heleshaw;
pub mod parallel;
pub mod slp;
pub mod specfun;
pub mod spectrum;
pub mod transforms;
pub(crate) mod util;

pub use error::{Error, Result};
pub use slp::{
    count_zeros, eigenfunction_samples, make_problem, shoot, BoundaryParams, CoeffFn,
    CoefficientSet, SLProblem, ShotResult, Smoothness, SolverSettings,
};
pub use spectrum::{
    aux_spectrum, branches, char_lhs, char_rhs, characteristic, classify_case, find_in_branch,
    full_spectrum, verify_interlacing, AuxSpectrum, Branch, BranchIndex, EigenvalueRecord,
    RegimeCase,
};
