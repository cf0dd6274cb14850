//! Over-relaxed splitting with certified linear convergence rates.
//!
//! This crate implements an over-relaxed alternating-direction method for
//! problems of the form `minimize f(x) + g(z) subject to Ax + Bz = c` with a
//! strongly convex, smooth `f`, together with machinery to *certify* its
//! linear convergence rate:
//!
//! - [`engine`] runs the iteration itself, with exact inner solvers for
//!   quadratic and soft-threshold subproblems and a damped Newton fallback.
//! - [`problem`] defines problem instances, curvature bounds, and the
//!   normalization map that reduces every instance to three scalars: a
//!   normalized penalty, an effective condition number, and the relaxation.
//! - [`certificate`] assembles a small linear matrix inequality whose
//!   feasibility proves a contraction factor, provides the closed-form
//!   optimal certificate, and validates it by two independent routes
//!   (eigenvalues and signed principal minors).
//! - [`sdp`] searches for feasible certificates numerically — a
//!   self-contained damped-Newton barrier method with a dual bound that can
//!   *prove* infeasibility — and bisects for the smallest certifiable rate.
//! - [`lower_bound`] constructs worst-case instances that contract exactly
//!   at the certified rate (so the certificates are unimprovable) and
//!   compares the resulting rates against optimally tuned gradient descent.
//! - [`linalg`] is the small dense linear-algebra kernel everything rests
//!   on: symmetric eigenvalues via cyclic Jacobi, singular values, Cholesky
//!   solves, and exact principal minors for matrices up to 4x4.
//!
//! The central closed form: with relaxation `alpha`, normalized penalty
//! `rho0`, and effective condition number `kappa`, the iteration contracts
//! at rate `tau = 1 - alpha / (1 + chi(rho0) sqrt(kappa))`, where
//! `chi(x) = max(x, 1/x)`. The certificate module produces the multipliers
//! and weight matrix that prove it, and the lower-bound module shows a
//! problem that attains it.

pub mod certificate;
pub mod engine;
pub mod error;
pub mod linalg;
pub mod lower_bound;
pub mod problem;
pub mod sdp;

pub use certificate::{
    chi, check_feasible, contraction_bound, explicit_certificate, principal_minors_closed_form,
    tau_formula, Certificate, ContractionBound, FeasibilityCheck,
};
pub use engine::{admm_step, observed_rate, AdmmParams, AdmmState, Engine, Trajectory};
pub use error::{Error, Result};
pub use lower_bound::{
    admm_vs_gd, counterexample_rate, gd_optimal_rate, simulate_gd_witness, verify_lower_bound,
    CounterexampleSpec, CounterexampleVariant, GdComparison, GdSetting, LowerBoundReport,
};
pub use problem::{
    derive_params, rho_for_normalized_step, validate_assumption, DerivedParams, FunctionOracle,
    ProblemConfig, ProblemInstance,
};
pub use sdp::{
    feasibility_frontier, minimal_tau, solve_feasibility, sweep, sweep_to_csv, FeasStatus,
    FeasibilityResult, FrontierResult, LmiPencil, MinimalTauResult, SolveOptions, SweepOptions,
    SweepRow,
};
