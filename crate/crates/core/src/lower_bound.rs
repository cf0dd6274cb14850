//! Exactness of the certified rates: worst-case problem families whose
//! iterates contract exactly at the certified factor, and a comparison
//! against optimally tuned gradient descent.
//!
//! The worst-case family is a two-dimensional quadratic split through an
//! identity-style constraint with the second objective absent. On it the
//! iteration acts diagonally, so the contraction factor per mode is known in
//! closed form and the slow mode matches the certified rate exactly —
//! proving the certificates cannot be improved.

use serde::{Deserialize, Serialize};

use crate::certificate::tau_formula;
use crate::engine::{observed_rate, AdmmParams, Engine};
use crate::error::{Error, Result};
use crate::linalg::{norm, Mat};
use crate::problem::{FunctionOracle, ProblemInstance};

/// Which penalty branch a worst-case construction targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CounterexampleVariant {
    /// Normalized penalty at least 1: penalty `rho = rho0 sqrt(l m)`.
    Rho0GeOne,
    /// Normalized penalty below 1: penalty `rho = sqrt(l m) / rho0`.
    Rho0LtOne,
}

/// Worst-case problem specification: a diagonal quadratic `diag(m, l)` with
/// no second objective, constrained by `A x - z = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleSpec {
    pub m: f64,
    pub l: f64,
    pub rho0: f64,
    pub variant: CounterexampleVariant,
}

impl CounterexampleSpec {
    /// Chooses the branch from the normalized penalty automatically.
    pub fn new(m: f64, l: f64, rho0: f64) -> Result<Self> {
        if !(m > 0.0 && l >= m && l.is_finite()) {
            return Err(Error::domain(format!(
                "curvatures must satisfy 0 < m <= l, got m={m}, l={l}"
            )));
        }
        if !(rho0 > 0.0 && rho0.is_finite()) {
            return Err(Error::domain(format!(
                "normalized penalty must be positive and finite, got {rho0}"
            )));
        }
        let variant = if rho0 >= 1.0 {
            CounterexampleVariant::Rho0GeOne
        } else {
            CounterexampleVariant::Rho0LtOne
        };
        Ok(CounterexampleSpec { m, l, rho0, variant })
    }

    /// Condition number of the quadratic (the constraint is perfectly
    /// conditioned in both variants, so this is also the effective one).
    pub fn kappa(&self) -> f64 {
        self.l / self.m
    }

    /// Penalty realizing the requested normalized penalty on this branch.
    pub fn step_size(&self) -> f64 {
        let geo = (self.l * self.m).sqrt();
        match self.variant {
            CounterexampleVariant::Rho0GeOne => self.rho0 * geo,
            CounterexampleVariant::Rho0LtOne => geo / self.rho0,
        }
    }

    /// The literal problem construction for this branch.
    ///
    /// The small-penalty branch scales the constraint matrix instead of the
    /// identity (`A = rho0 I`), which exercises the normalization map: the
    /// scaled curvatures become `m / rho0^2` and `l / rho0^2` while the
    /// normalized penalty still lands on `rho0`.
    pub fn instance(&self) -> Result<ProblemInstance> {
        let a_scale = match self.variant {
            CounterexampleVariant::Rho0GeOne => 1.0,
            CounterexampleVariant::Rho0LtOne => self.rho0,
        };
        self.build_instance(a_scale)
    }

    /// The identity-constrained problem whose iterates realize the slow-mode
    /// factor of [`Self::iteration_factors`] at penalty
    /// [`Self::step_size`], on both branches.
    pub fn rate_instance(&self) -> Result<ProblemInstance> {
        self.build_instance(1.0)
    }

    fn build_instance(&self, a_scale: f64) -> Result<ProblemInstance> {
        let f = FunctionOracle::quadratic(Mat::diag(&[self.m, self.l]), vec![0.0, 0.0])?;
        ProblemInstance::new(
            f,
            FunctionOracle::zero(),
            Mat::diag(&[a_scale, a_scale]),
            Mat::diag(&[-1.0, -1.0]),
            vec![0.0, 0.0],
        )
    }

    /// Per-mode contraction factors of the identity-constrained dynamics:
    /// with no second objective the iterates obey
    /// `z+ = (I - alpha (Q + rho I)^{-1} Q) z`, so each curvature `q`
    /// contracts by `1 - alpha q / (q + rho)`.
    pub fn iteration_factors(&self, alpha: f64) -> Result<[f64; 2]> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::domain(format!(
                "relaxation must lie in (0, 2], got {alpha}"
            )));
        }
        let rho = self.step_size();
        Ok([
            1.0 - alpha * self.m / (self.m + rho),
            1.0 - alpha * self.l / (self.l + rho),
        ])
    }
}

/// Exact contraction factor of the worst-case dynamics: the slow mode sits
/// along the smallest curvature, and on each proper branch it dominates the
/// fast mode in absolute value.
pub fn counterexample_rate(spec: &CounterexampleSpec, alpha: f64) -> Result<f64> {
    let factors = spec.iteration_factors(alpha)?;
    debug_assert!(
        factors[0] >= factors[1].abs() - 1e-12,
        "the slow mode must dominate: {factors:?}"
    );
    Ok(factors[0])
}

/// Simulation report pitting the predicted worst-case factor against the
/// rate observed from actual iterates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LowerBoundReport {
    pub m: f64,
    pub l: f64,
    pub rho0: f64,
    pub variant: CounterexampleVariant,
    pub alpha: f64,
    pub rho: f64,
    /// Exact slow-mode factor of the dynamics.
    pub predicted_rate: f64,
    /// Certified rate at the same normalized parameters.
    pub formula_rate: f64,
    /// Geometric-mean rate measured from the simulated trajectory.
    pub observed_rate: f64,
    /// `|observed - predicted|`.
    pub deviation: f64,
    pub iterations: usize,
    pub window: usize,
}

/// Runs the worst-case dynamics from the slow-mode direction and compares
/// the observed contraction against the exact prediction.
///
/// The fixed point is the origin, so errors are measured exactly rather
/// than against an estimated limit.
pub fn verify_lower_bound(
    spec: &CounterexampleSpec,
    alpha: f64,
    iterations: usize,
    window: usize,
) -> Result<LowerBoundReport> {
    let rho = spec.step_size();
    let predicted = counterexample_rate(spec, alpha)?;
    let formula = tau_formula(alpha, spec.rho0, spec.kappa())?;
    // Force the full iteration count: the tolerance is unreachable.
    let params = AdmmParams::new(alpha, rho, iterations, 1e-300)?;
    let engine = Engine::new(spec.rate_instance()?, params)?;
    let traj =
        engine.run_with_fixed_point(&[1.0, 0.0], &[0.0, 0.0], &[0.0, 0.0], &[0.0, 0.0])?;
    let observed = observed_rate(&traj, window)?;
    Ok(LowerBoundReport {
        m: spec.m,
        l: spec.l,
        rho0: spec.rho0,
        variant: spec.variant,
        alpha,
        rho,
        predicted_rate: predicted,
        formula_rate: formula,
        observed_rate: observed,
        deviation: (observed - predicted).abs(),
        iterations,
        window,
    })
}

/// Strong convexity and smoothness of the composite objective seen by
/// plain gradient descent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GdSetting {
    pub m_f: f64,
    pub l_f: f64,
}

impl GdSetting {
    pub fn new(m_f: f64, l_f: f64) -> Result<Self> {
        if !(m_f > 0.0 && l_f >= m_f && l_f.is_finite()) {
            return Err(Error::domain(format!(
                "curvatures must satisfy 0 < m <= l, got m={m_f}, l={l_f}"
            )));
        }
        Ok(GdSetting { m_f, l_f })
    }

    pub fn kappa_f(&self) -> f64 {
        self.l_f / self.m_f
    }

    /// Step size minimizing the worst-case contraction factor.
    pub fn optimal_beta(&self) -> f64 {
        2.0 / (self.l_f + self.m_f)
    }

    /// Worst-case contraction factor at step `beta`.
    pub fn rate_with_step(&self, beta: f64) -> Result<f64> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::domain(format!("step size must be positive, got {beta}")));
        }
        Ok((1.0 - beta * self.m_f).abs().max((1.0 - beta * self.l_f).abs()))
    }

    /// Contraction factor at the optimal step: `(kappa - 1) / (kappa + 1)`.
    pub fn optimal_rate(&self) -> f64 {
        let k = self.kappa_f();
        (k - 1.0) / (k + 1.0)
    }
}

/// Optimal gradient-descent contraction factor `1 - 2 / (1 + kappa_f)`.
pub fn gd_optimal_rate(kappa_f: f64) -> Result<f64> {
    if !(kappa_f >= 1.0 && kappa_f.is_finite()) {
        return Err(Error::domain(format!(
            "condition number must be finite and at least 1, got {kappa_f}"
        )));
    }
    Ok((kappa_f - 1.0) / (kappa_f + 1.0))
}

/// A gradient-descent run on the tightness witness.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GdWitness {
    /// Exact per-step factor of the witness dynamics.
    pub rate: f64,
    /// Simulated iterate norms starting from `(1, 1)`.
    pub error_norms: Vec<f64>,
}

/// Simulates gradient descent with the optimal step on the diagonal witness
/// `diag(m_f, l_f)` from `(1, 1)`: both coordinates contract by factors
/// `r` and `-r` with `r` the optimal rate, so the norm decays exactly
/// geometrically.
pub fn simulate_gd_witness(setting: &GdSetting, steps: usize) -> GdWitness {
    let beta = setting.optimal_beta();
    let mut x = [1.0, 1.0];
    let mut error_norms = Vec::with_capacity(steps + 1);
    error_norms.push(norm(&x));
    for _ in 0..steps {
        x[0] -= beta * setting.m_f * x[0];
        x[1] -= beta * setting.l_f * x[1];
        error_norms.push(norm(&x));
    }
    GdWitness { rate: setting.optimal_rate(), error_norms }
}

/// Side-by-side comparison of the certified splitting rate and the optimal
/// gradient-descent rate.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GdComparison {
    pub kappa: f64,
    pub kappa_f: f64,
    /// Best certified splitting rate `1 - 2 / (1 + sqrt(kappa))`.
    pub tau_admm: f64,
    /// Optimal gradient-descent rate `1 - 2 / (1 + kappa_f)`.
    pub tau_gd: f64,
    /// Left side of the domination inequality (the gradient-descent rate).
    pub more_spec_lhs: f64,
    /// Right side `2 tau / (1 + tau^2)` built from the splitting rate.
    pub more_spec_rhs: f64,
    /// `lhs - rhs`; nonnegative whenever `kappa_f >= kappa`, zero exactly
    /// at `kappa_f = kappa`.
    pub slack: f64,
    /// Whether the gradient-descent rate is at least the splitting rate.
    pub ordering_holds: bool,
}

/// Compares the best certified splitting rate at effective conditioning
/// `kappa` with optimally tuned gradient descent at conditioning `kappa_f`.
///
/// The splitting sees the constraint-aware conditioning, which never exceeds
/// the composite conditioning faced by gradient descent, hence the
/// requirement `kappa_f >= kappa`.
pub fn admm_vs_gd(kappa: f64, kappa_f: f64) -> Result<GdComparison> {
    if !(kappa >= 1.0 && kappa.is_finite()) {
        return Err(Error::domain(format!(
            "condition number must be finite and at least 1, got {kappa}"
        )));
    }
    if !(kappa_f >= kappa) {
        return Err(Error::domain(format!(
            "the comparison requires kappa_f >= kappa, got kappa_f={kappa_f} < kappa={kappa}"
        )));
    }
    let tau_admm = 1.0 - 2.0 / (1.0 + kappa.sqrt());
    let tau_gd = gd_optimal_rate(kappa_f)?;
    let rhs = 2.0 * tau_admm / (1.0 + tau_admm * tau_admm);
    Ok(GdComparison {
        kappa,
        kappa_f,
        tau_admm,
        tau_gd,
        more_spec_lhs: tau_gd,
        more_spec_rhs: rhs,
        slack: tau_gd - rhs,
        ordering_holds: tau_gd >= tau_admm - 1e-15,
    })
}

/// CSV dump of comparisons with a stable header.
pub fn comparisons_to_csv(rows: &[GdComparison]) -> String {
    let mut out =
        String::from("kappa,kappa_F,tau_admm,tau_gd,more_spec_lhs,more_spec_rhs,slack\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e}\n",
            r.kappa, r.kappa_f, r.tau_admm, r.tau_gd, r.more_spec_lhs, r.more_spec_rhs, r.slack
        ));
    }
    out
}
