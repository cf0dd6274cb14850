//! Convergence-rate certificates for the relaxed splitting iteration.
//!
//! The iteration, restricted to the two-dimensional observable that drives
//! its long-run behaviour, is an affine dynamical system interconnected with
//! two monotone operators. A rate `tau` is certified by exhibiting a 2x2
//! weight matrix `P` and multipliers `lambda1, lambda2 >= 0` that make a
//! specific symmetric 4x4 matrix negative semidefinite. This module builds
//! that matrix, evaluates the closed-form certificate that solves it, checks
//! negative semidefiniteness by two independent routes, and converts a
//! certificate into a concrete trajectory bound.
//!
//! Everything here is expressed in normalized parameters: the relaxation
//! `alpha`, the normalized penalty `rho0`, and the effective condition
//! number `kappa` (see [`crate::problem::derive_params`]).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    all_principal_minors4, eig4, mat4_mul, mat4_transpose, quad2, sym4_frobenius, Mat2, Mat4,
    Sym4,
};

/// Default relative tolerance for semidefiniteness checks.
pub const DEFAULT_FEAS_REL_TOL: f64 = 1e-9;

/// `max(x, 1/x)`: the symmetric conditioning of a positive scalar.
pub fn chi(x: f64) -> f64 {
    assert!(x > 0.0, "chi is defined for positive arguments, got {x}");
    x.max(1.0 / x)
}

/// The normalized two-state realization of the iteration.
///
/// For relaxation `alpha`, the update of the observable pair and the two
/// signals entering the monotone operators are captured by six 2x2 matrices,
/// plus the 4x4 selector `k` that maps `(state, input)` to the stacked
/// operator inputs/outputs used by the multiplier constraints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HatSystem {
    pub alpha: f64,
    pub a_hat: Mat2,
    pub b_hat: Mat2,
    pub c1_hat: Mat2,
    pub c2_hat: Mat2,
    pub d1_hat: Mat2,
    pub d2_hat: Mat2,
    pub k: Mat4,
}

impl HatSystem {
    /// Builds the realization for a given relaxation (`alpha > 0`).
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::domain(format!(
                "relaxation must be positive and finite, got {alpha}"
            )));
        }
        Ok(HatSystem {
            alpha,
            a_hat: [[1.0, alpha - 1.0], [0.0, 0.0]],
            b_hat: [[alpha, -1.0], [0.0, -1.0]],
            c1_hat: [[-1.0, -1.0], [0.0, 0.0]],
            c2_hat: [[1.0, alpha - 1.0], [0.0, 0.0]],
            d1_hat: [[-1.0, 0.0], [1.0, 0.0]],
            d2_hat: [[alpha, -1.0], [0.0, 1.0]],
            k: [
                [-1.0, -1.0, -1.0, 0.0],
                [0.0, 0.0, 1.0, 0.0],
                [1.0, alpha - 1.0, alpha, -1.0],
                [0.0, 0.0, 0.0, 1.0],
            ],
        })
    }
}

/// Sector constraint matrix for the strongly convex, smooth operator, in
/// normalized coordinates.
pub fn constraint_m1(rho0: f64, kappa: f64) -> Result<Mat2> {
    if !(rho0 > 0.0) {
        return Err(Error::domain(format!("normalized penalty must be positive, got {rho0}")));
    }
    if !(kappa >= 1.0) {
        return Err(Error::domain(format!("condition number must be at least 1, got {kappa}")));
    }
    let rk = kappa.sqrt();
    let cross = (rk + 1.0 / rk) / rho0;
    Ok([[-2.0 / (rho0 * rho0), cross], [cross, -2.0]])
}

/// Monotonicity constraint matrix for the second operator.
pub fn constraint_m2() -> Mat2 {
    [[0.0, 1.0], [1.0, 0.0]]
}

/// A candidate rate certificate: the weight matrix `P = [[1, xi], [xi, 1]]`
/// plus multipliers, tied to the normalized parameter triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub alpha: f64,
    pub rho0: f64,
    pub kappa: f64,
    /// Certified contraction factor.
    pub tau: f64,
    /// Off-diagonal entry of the unit-diagonal weight matrix.
    pub xi: f64,
    pub lambda1: f64,
    pub lambda2: f64,
}

/// Serializable dump of a certificate including the expanded weight matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub alpha: f64,
    pub rho0: f64,
    pub kappa: f64,
    pub tau: f64,
    pub xi: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub p: [[f64; 2]; 2],
}

impl Certificate {
    /// The weight matrix `[[1, xi], [xi, 1]]`.
    pub fn p(&self) -> Mat2 {
        [[1.0, self.xi], [self.xi, 1.0]]
    }

    /// Assembles the 4x4 matrix this certificate must make negative
    /// semidefinite.
    pub fn assemble(&self) -> Result<Sym4> {
        assemble_lmi(
            self.alpha,
            self.rho0,
            self.kappa,
            self.tau,
            &self.p(),
            self.lambda1,
            self.lambda2,
        )
    }

    /// Record form for serialization.
    pub fn record(&self) -> CertificateRecord {
        CertificateRecord {
            alpha: self.alpha,
            rho0: self.rho0,
            kappa: self.kappa,
            tau: self.tau,
            xi: self.xi,
            lambda1: self.lambda1,
            lambda2: self.lambda2,
            p: self.p(),
        }
    }
}

/// Validates the shared parameter domain of the rate formulas.
fn validate_triple(alpha: f64, rho0: f64, kappa: f64, alpha_cap: Option<f64>) -> Result<()> {
    match alpha_cap {
        Some(cap) if !(alpha > 0.0 && alpha <= cap) => {
            return Err(Error::domain(format!(
                "relaxation must lie in (0, {cap}], got {alpha}"
            )))
        }
        None if !(alpha > 0.0 && alpha.is_finite()) => {
            return Err(Error::domain(format!(
                "relaxation must be positive and finite, got {alpha}"
            )))
        }
        _ => {}
    }
    if !(rho0 > 0.0 && rho0.is_finite()) {
        return Err(Error::domain(format!(
            "normalized penalty must be positive and finite, got {rho0}"
        )));
    }
    if !(kappa >= 1.0 && kappa.is_finite()) {
        return Err(Error::domain(format!(
            "condition number must be finite and at least 1, got {kappa}"
        )));
    }
    Ok(())
}

/// Optimal certified contraction factor `1 - alpha / (1 + chi(rho0) sqrt(kappa))`.
pub fn tau_formula(alpha: f64, rho0: f64, kappa: f64) -> Result<f64> {
    validate_triple(alpha, rho0, kappa, Some(2.0))?;
    let c = chi(rho0) * kappa.sqrt();
    Ok(1.0 - alpha / (1.0 + c))
}

/// The closed-form certificate achieving the optimal rate.
///
/// Requires `kappa > 1` (the multipliers degenerate at `kappa = 1`),
/// `alpha` in `(0, 2]`, and a positive normalized penalty.
pub fn explicit_certificate(alpha: f64, rho0: f64, kappa: f64) -> Result<Certificate> {
    validate_triple(alpha, rho0, kappa, Some(2.0))?;
    if kappa <= 1.0 {
        return Err(Error::domain(format!(
            "the closed-form certificate needs kappa > 1, got {kappa}"
        )));
    }
    let rk = kappa.sqrt();
    let c = chi(rho0) * rk;
    let xi = -1.0 + alpha * (c - 1.0) / (1.0 - alpha + c);
    let lambda1 = alpha * rho0 * rk * (1.0 - alpha + c) / ((kappa - 1.0) * (1.0 + c));
    let lambda2 = 1.0 + xi;
    let tau = 1.0 - alpha / (1.0 + c);
    Ok(Certificate { alpha, rho0, kappa, tau, xi, lambda1, lambda2 })
}

/// Assembles the symmetric 4x4 matrix whose negative semidefiniteness
/// certifies the rate `tau` with weight `p` and multipliers
/// `(lambda1, lambda2)`.
///
/// Relaxations above 2 are allowed here on purpose: the feasibility search
/// probes that regime to map where certificates stop existing.
pub fn assemble_lmi(
    alpha: f64,
    rho0: f64,
    kappa: f64,
    tau: f64,
    p: &Mat2,
    lambda1: f64,
    lambda2: f64,
) -> Result<Sym4> {
    validate_triple(alpha, rho0, kappa, None)?;
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::domain(format!("rate must lie in (0, 1), got {tau}")));
    }
    if !(lambda1 >= 0.0 && lambda2 >= 0.0) {
        return Err(Error::domain(format!(
            "multipliers must be nonnegative, got ({lambda1}, {lambda2})"
        )));
    }
    let sys = HatSystem::new(alpha)?;
    let p_sym: Mat2 = [
        [p[0][0], 0.5 * (p[0][1] + p[1][0])],
        [0.5 * (p[0][1] + p[1][0]), p[1][1]],
    ];

    // Lyapunov part: [[A'PA - tau^2 P, A'PB], [B'PA, B'PB]] on (state, input).
    let a = &sys.a_hat;
    let b = &sys.b_hat;
    let cols_a = [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]; // columns of A as 2-vectors
    let cols_b = [[b[0][0], b[1][0]], [b[0][1], b[1][1]]];
    let mut m: Mat4 = [[0.0; 4]; 4];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = quad2(&cols_a[i], &p_sym, &cols_a[j])
                - tau * tau * p_sym[i][j];
            m[i][2 + j] = quad2(&cols_a[i], &p_sym, &cols_b[j]);
            m[2 + j][i] = m[i][2 + j];
            m[2 + i][2 + j] = quad2(&cols_b[i], &p_sym, &cols_b[j]);
        }
    }

    // Multiplier part: K' blkdiag(lambda1 M1, lambda2 M2) K.
    let m1 = constraint_m1(rho0, kappa)?;
    let m2 = constraint_m2();
    let mut blk: Mat4 = [[0.0; 4]; 4];
    for i in 0..2 {
        for j in 0..2 {
            blk[i][j] = lambda1 * m1[i][j];
            blk[2 + i][2 + j] = lambda2 * m2[i][j];
        }
    }
    let kt = mat4_transpose(&sys.k);
    let multiplier = mat4_mul(&kt, &mat4_mul(&blk, &sys.k));
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] += multiplier[i][j];
        }
    }

    // Average mirrored pairs so the result is exactly symmetric in floats.
    let mut out: Sym4 = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in i..4 {
            let v = 0.5 * (m[i][j] + m[j][i]);
            out[i][j] = v;
            out[j][i] = v;
        }
    }
    Ok(out)
}

/// Result of a dual-route negative-semidefiniteness check.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FeasibilityCheck {
    /// Whether both routes declared the matrix negative semidefinite.
    pub feasible: bool,
    /// Largest eigenvalue found by the spectral route.
    pub lambda_max: f64,
    /// Worst normalized sign-pattern slack found by the minor route
    /// (negative values are violations).
    pub worst_minor_slack: f64,
}

/// Checks `m <= 0` (negative semidefinite) by two independent routes and
/// insists they agree.
///
/// Route 1 computes the spectrum and tests
/// `lambda_max <= rel_tol * max(1, ||m||_F)`. The floor at 1 keeps the test
/// meaningful when the matrix vanishes identically up to roundoff, which
/// happens at certificates that are tight in every direction (e.g. the
/// optimal certificate at the relaxation limit with unit normalized
/// penalty); a pure-relative test would compare roundoff against roundoff
/// there.
/// Route 2 tests the sign pattern of all 15 principal minors: a matrix is
/// negative semidefinite exactly when every principal minor of order `n`
/// has sign `(-1)^n` (or vanishes). Disagreement is reported as an error
/// rather than silently resolved.
pub fn check_feasible(m: &Sym4, rel_tol: f64) -> Result<FeasibilityCheck> {
    if !(rel_tol >= 0.0) {
        return Err(Error::domain(format!("tolerance must be nonnegative, got {rel_tol}")));
    }
    let scale = sym4_frobenius(m).max(1.0);
    let eigs = eig4(m);
    let lambda_max = eigs[3];
    let eigen_feasible = lambda_max <= rel_tol * scale;

    let mut worst_slack = f64::INFINITY;
    let mut minor_feasible = true;
    for (keep, det) in all_principal_minors4(m) {
        let n = keep.len();
        let signed = if n % 2 == 0 { det } else { -det };
        let slack = signed / scale.powi(n as i32);
        worst_slack = worst_slack.min(slack);
        if slack < -rel_tol * n as f64 {
            minor_feasible = false;
        }
    }

    if eigen_feasible != minor_feasible {
        return Err(Error::CheckDisagreement {
            eigen_feasible,
            minor_feasible,
            lambda_max,
        });
    }
    Ok(FeasibilityCheck { feasible: eigen_feasible, lambda_max, worst_minor_slack: worst_slack })
}

/// The five nontrivial principal minors of the certificate matrix that admit
/// closed forms on the branch `rho0 >= 1` (the remaining minors vanish
/// because the last row and column are zero at the optimal certificate).
///
/// Indices refer to kept rows/columns of the 4x4 matrix, zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormMinors {
    /// Order-2 minor keeping rows/columns {0, 1}.
    pub order2_keep01: f64,
    /// Order-2 minor keeping rows/columns {1, 2}.
    pub order2_keep12: f64,
    /// Order-1 minor keeping row/column {0} (a diagonal entry).
    pub order1_keep0: f64,
    /// Order-1 minor keeping row/column {1}.
    pub order1_keep1: f64,
    /// Order-1 minor keeping row/column {2}.
    pub order1_keep2: f64,
}

impl ClosedFormMinors {
    /// Checks the negative-semidefinite sign pattern: order-1 minors must be
    /// nonpositive and order-2 minors nonnegative, up to `tol`.
    pub fn sign_pattern_ok(&self, tol: f64) -> bool {
        self.order1_keep0 <= tol
            && self.order1_keep1 <= tol
            && self.order1_keep2 <= tol
            && self.order2_keep01 >= -tol
            && self.order2_keep12 >= -tol
    }
}

/// Closed forms for the principal minors of the matrix assembled from the
/// optimal certificate, valid on the branch `rho0 >= 1` with `kappa > 1` and
/// `alpha` in `(0, 2]`.
pub fn principal_minors_closed_form(
    alpha: f64,
    rho0: f64,
    kappa: f64,
) -> Result<ClosedFormMinors> {
    validate_triple(alpha, rho0, kappa, Some(2.0))?;
    if kappa <= 1.0 {
        return Err(Error::domain(format!(
            "closed-form minors need kappa > 1, got {kappa}"
        )));
    }
    if rho0 < 1.0 {
        return Err(Error::UnsupportedBranch(format!(
            "closed-form minors are derived for rho0 >= 1, got {rho0}"
        )));
    }
    let rk = kappa.sqrt();
    let s = 1.0 + rho0 * rk; // 1 + rho0 sqrt(kappa), the recurring pole term
    let km1 = kappa - 1.0;

    let order2_keep01 = 2.0 * alpha * alpha * (2.0 - alpha) * (rho0 * rho0 - 1.0) * rk
        * (1.0 - alpha + rho0 * rk)
        / (km1 * rho0 * s.powi(3));
    let order2_keep12 = order2_keep01 * s * s;

    let order1_keep0 = alpha
        * (2.0 * (alpha - 1.0) * rk + (alpha - 2.0) * (1.0 + kappa) * rho0
            - 2.0 * rho0 * rho0 * rk)
        / (km1 * rho0 * s * s);
    let order1_keep2 = order1_keep0 * s * s;

    let inner = 2.0 * (alpha - 2.0) * rk
        + rho0
            * (2.0 + 2.0 * alpha * km1 - 4.0 * kappa + (alpha - 2.0) * km1 * rho0 * rk);
    let order1_keep1 =
        alpha * rk * (2.0 * (alpha - 1.0) + rho0 * inner) / (km1 * rho0 * s * s);

    Ok(ClosedFormMinors {
        order2_keep01,
        order2_keep12,
        order1_keep0,
        order1_keep1,
        order1_keep2,
    })
}

/// A trajectory bound derived from the optimal certificate: the observable
/// satisfies `||phi_t - phi*|| <= constant * tau^t * ||phi_0 - phi*||`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContractionBound {
    pub tau: f64,
    /// Condition ratio of the weight matrix `(1 + xi) / (1 - xi)`.
    pub eta: f64,
    /// Symmetric conditioning `chi(eta)` (1 in the balanced limit).
    pub chi_eta: f64,
    /// Leading constant `kappa_b * sqrt(chi(eta))`.
    pub constant: f64,
}

/// Converts the optimal certificate into an explicit trajectory bound.
///
/// Requires `alpha` strictly below 2 (at `alpha = 2` the weight matrix is
/// singular and the constant blows up) and `kappa_b >= 1`. In the perfectly
/// conditioned corner `kappa = 1, rho0 = 1` the weight ratio degenerates to
/// `0/0`; its limit is 1, so the constant reduces to `kappa_b`.
pub fn contraction_bound(
    alpha: f64,
    rho0: f64,
    kappa: f64,
    kappa_b: f64,
) -> Result<ContractionBound> {
    validate_triple(alpha, rho0, kappa, Some(2.0))?;
    if alpha >= 2.0 {
        return Err(Error::domain(
            "the trajectory bound needs alpha strictly below 2 (the weight matrix \
             is singular at alpha = 2)",
        ));
    }
    if !(kappa_b >= 1.0) {
        return Err(Error::domain(format!(
            "constraint conditioning must be at least 1, got {kappa_b}"
        )));
    }
    let c = chi(rho0) * kappa.sqrt();
    let tau = 1.0 - alpha / (1.0 + c);
    let eta = alpha / (2.0 - alpha) * (c - 1.0) / (c + 1.0);
    let chi_eta = if eta == 0.0 { 1.0 } else { chi(eta) };
    Ok(ContractionBound { tau, eta, chi_eta, constant: kappa_b * chi_eta.sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn chi_is_symmetric_under_inversion() {
        assert_eq!(chi(2.0), 2.0);
        assert_eq!(chi(0.5), 2.0);
        assert_eq!(chi(1.0), 1.0);
    }

    #[test]
    fn hat_system_at_alpha_one() {
        let sys = HatSystem::new(1.0).unwrap();
        assert_eq!(sys.a_hat, [[1.0, 0.0], [0.0, 0.0]]);
        assert_eq!(sys.b_hat, [[1.0, -1.0], [0.0, -1.0]]);
        assert_eq!(sys.k[2], [1.0, 0.0, 1.0, -1.0]);
    }

    #[test]
    fn constraint_m1_is_negative_semidefinite_on_diagonal() {
        let m1 = constraint_m1(1.0, 1.0).unwrap();
        assert_eq!(m1, [[-2.0, 2.0], [2.0, -2.0]]);
        let m1 = constraint_m1(2.0, 4.0).unwrap();
        assert_relative_eq!(m1[0][0], -0.5);
        assert_relative_eq!(m1[0][1], 1.25);
    }

    #[test]
    fn rate_formula_frozen_values() {
        assert_relative_eq!(tau_formula(1.0, 1.0, 4.0).unwrap(), 2.0 / 3.0);
        assert_relative_eq!(tau_formula(1.0, 2.0, 4.0).unwrap(), 0.8);
        assert_relative_eq!(tau_formula(2.0, 1.0, 9.0).unwrap(), 0.5);
    }

    #[test]
    fn rate_formula_is_penalty_inversion_symmetric() {
        for &(a, r, k) in &[(1.0, 2.0, 4.0), (0.5, 10.0, 100.0), (1.9, 0.5, 1.5)] {
            let t1 = tau_formula(a, r, k).unwrap();
            let t2 = tau_formula(a, 1.0 / r, k).unwrap();
            assert_eq!(t1, t2, "tau must be exactly chi-symmetric on this grid");
        }
    }

    #[test]
    fn explicit_certificate_frozen_values() {
        let c = explicit_certificate(1.0, 1.0, 4.0).unwrap();
        assert_relative_eq!(c.tau, 2.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(c.xi, -0.5, max_relative = 1e-15);
        assert_relative_eq!(c.lambda1, 4.0 / 9.0, max_relative = 1e-15);
        assert_relative_eq!(c.lambda2, 0.5, max_relative = 1e-15);

        let c = explicit_certificate(1.0, 2.0, 4.0).unwrap();
        assert_relative_eq!(c.tau, 0.8, max_relative = 1e-15);
        assert_relative_eq!(c.xi, -0.25, max_relative = 1e-15);
        assert_relative_eq!(c.lambda1, 16.0 / 15.0, max_relative = 1e-15);
        assert_relative_eq!(c.lambda2, 0.75, max_relative = 1e-15);

        let c = explicit_certificate(2.0, 1.0, 9.0).unwrap();
        assert_relative_eq!(c.tau, 0.5, max_relative = 1e-15);
        assert_relative_eq!(c.xi, 1.0, max_relative = 1e-15);
        assert_relative_eq!(c.lambda1, 3.0 / 8.0, max_relative = 1e-15);
        assert_relative_eq!(c.lambda2, 2.0, max_relative = 1e-15);
    }

    #[test]
    fn multiplier_one_is_not_inversion_symmetric() {
        // The first multiplier carries a bare rho0 factor, so inverting the
        // penalty changes it even though tau, xi, lambda2 are unchanged.
        let hi = explicit_certificate(1.0, 2.0, 4.0).unwrap();
        let lo = explicit_certificate(1.0, 0.5, 4.0).unwrap();
        assert_eq!(hi.tau, lo.tau);
        assert_eq!(hi.xi, lo.xi);
        assert_eq!(hi.lambda2, lo.lambda2);
        assert_relative_eq!(lo.lambda1, hi.lambda1 / 4.0, max_relative = 1e-15);
    }

    #[test]
    fn assembled_matrix_frozen_entries() {
        let c = explicit_certificate(1.0, 1.0, 4.0).unwrap();
        let m = c.assemble().unwrap();
        assert_relative_eq!(m[0][0], -1.0 / 3.0, max_relative = 1e-13);

        let c = explicit_certificate(1.0, 2.0, 4.0).unwrap();
        let m = c.assemble().unwrap();
        assert_relative_eq!(m[0][0], -13.0 / 75.0, max_relative = 1e-13);
        assert_relative_eq!(m[0][1], -28.0 / 75.0, max_relative = 1e-13);
        assert_relative_eq!(m[0][2], -13.0 / 15.0, max_relative = 1e-13);
        assert_relative_eq!(m[1][2], -28.0 / 15.0, max_relative = 1e-13);
        assert_relative_eq!(m[1][1], -88.0 / 75.0, max_relative = 1e-13);
        assert_relative_eq!(m[2][2], -13.0 / 3.0, max_relative = 1e-13);
    }

    #[test]
    fn assembled_matrix_last_row_vanishes_at_optimum() {
        // With lambda2 = 1 + xi the fourth row and column cancel; in floats
        // the residue is at most a few ulps of the matrix scale.
        for &(a, r, k) in &[
            (1.0, 1.0, 4.0),
            (0.5, 2.0, 10.0),
            (1.9, 0.1, 100.0),
            (2.0, 1.0, 9.0),
            (1.5, 10.0, 1e4),
        ] {
            let c = explicit_certificate(a, r, k).unwrap();
            let m = c.assemble().unwrap();
            let tol = 4.0 * f64::EPSILON * sym4_frobenius(&m);
            for i in 0..4 {
                assert!(
                    m[3][i].abs() <= tol && m[i][3].abs() <= tol,
                    "row/col 4 should vanish at ({a}, {r}, {k}): {:?}",
                    m[3]
                );
            }
        }
    }

    #[test]
    fn assembled_matrix_has_rank_deficiency_at_optimum() {
        // At (1, 2, 4) column 2 equals 5x column 0, so every order-3 minor
        // and the determinant vanish.
        let c = explicit_certificate(1.0, 2.0, 4.0).unwrap();
        let m = c.assemble().unwrap();
        for i in 0..4 {
            assert_relative_eq!(m[i][2], 5.0 * m[i][0], epsilon = 1e-12);
        }
        let scale = sym4_frobenius(&m);
        for (keep, det) in all_principal_minors4(&m) {
            if keep.len() >= 3 {
                assert!(
                    det.abs() <= 1e-12 * scale.powi(keep.len() as i32),
                    "minor {keep:?} should vanish, got {det:.3e}"
                );
            }
        }
    }

    #[test]
    fn explicit_certificate_is_feasible_by_both_routes() {
        for &(a, r, k) in &[
            (1.0, 1.0, 4.0),
            (0.25, 0.5, 1.5),
            (1.9, 10.0, 1e4),
            (2.0, 0.1, 100.0),
        ] {
            let c = explicit_certificate(a, r, k).unwrap();
            let m = c.assemble().unwrap();
            let check = check_feasible(&m, DEFAULT_FEAS_REL_TOL).unwrap();
            assert!(check.feasible, "certificate at ({a}, {r}, {k}) must verify: {check:?}");
        }
    }

    #[test]
    fn check_rejects_indefinite_matrix() {
        let mut m = [[0.0; 4]; 4];
        m[0][0] = 1.0;
        m[1][1] = -1.0;
        let check = check_feasible(&m, 1e-9).unwrap();
        assert!(!check.feasible);
        assert_relative_eq!(check.lambda_max, 1.0);
    }

    #[test]
    fn check_accepts_negative_definite_matrix() {
        let mut m = [[0.0; 4]; 4];
        for i in 0..4 {
            m[i][i] = -1.0 - i as f64;
        }
        let check = check_feasible(&m, 1e-9).unwrap();
        assert!(check.feasible);
    }

    #[test]
    fn closed_form_minors_frozen_values() {
        let minors = principal_minors_closed_form(1.0, 2.0, 4.0).unwrap();
        assert_relative_eq!(minors.order2_keep01, 0.064, max_relative = 1e-14);
        assert_relative_eq!(minors.order2_keep12, 1.6, max_relative = 1e-14);
        assert_relative_eq!(minors.order1_keep0, -13.0 / 75.0, max_relative = 1e-14);
        assert_relative_eq!(minors.order1_keep1, -88.0 / 75.0, max_relative = 1e-14);
        assert_relative_eq!(minors.order1_keep2, -13.0 / 3.0, max_relative = 1e-14);
        assert!(minors.sign_pattern_ok(1e-12));
    }

    #[test]
    fn closed_form_minors_match_assembled_matrix() {
        for &(a, r, k) in &[(1.0, 2.0, 4.0), (0.5, 1.0, 10.0), (1.9, 10.0, 100.0)] {
            let minors = principal_minors_closed_form(a, r, k).unwrap();
            let m = explicit_certificate(a, r, k).unwrap().assemble().unwrap();
            assert_relative_eq!(minors.order1_keep0, m[0][0], max_relative = 1e-11);
            assert_relative_eq!(minors.order1_keep1, m[1][1], max_relative = 1e-11);
            assert_relative_eq!(minors.order1_keep2, m[2][2], max_relative = 1e-11);
            let d01 = m[0][0] * m[1][1] - m[0][1] * m[0][1];
            let d12 = m[1][1] * m[2][2] - m[1][2] * m[1][2];
            assert_relative_eq!(minors.order2_keep01, d01, max_relative = 1e-10);
            assert_relative_eq!(minors.order2_keep12, d12, max_relative = 1e-10);
        }
    }

    #[test]
    fn closed_form_minors_reject_small_penalty_branch() {
        assert!(matches!(
            principal_minors_closed_form(1.0, 0.5, 4.0),
            Err(Error::UnsupportedBranch(_))
        ));
    }

    #[test]
    fn contraction_bound_frozen_values() {
        let b = contraction_bound(1.0, 1.0, 4.0, 1.0).unwrap();
        assert_relative_eq!(b.tau, 2.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(b.eta, 1.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(b.chi_eta, 3.0, max_relative = 1e-15);
        assert_relative_eq!(b.constant, 3f64.sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn contraction_bound_constant_matches_weight_conditioning() {
        // (1 + xi) / (1 - xi) equals eta, so chi(eta) is exactly the
        // condition number of the weight matrix.
        for &(a, r, k) in &[(1.0, 1.0, 4.0), (0.5, 2.0, 10.0), (1.5, 0.1, 100.0)] {
            let cert = explicit_certificate(a, r, k).unwrap();
            let bound = contraction_bound(a, r, k, 1.0).unwrap();
            let ratio = (1.0 + cert.xi) / (1.0 - cert.xi);
            assert_relative_eq!(bound.eta, ratio, max_relative = 1e-12);
        }
    }

    #[test]
    fn contraction_bound_degenerate_corner_uses_limit() {
        let b = contraction_bound(1.0, 1.0, 1.0, 2.5).unwrap();
        assert_eq!(b.eta, 0.0);
        assert_eq!(b.chi_eta, 1.0);
        assert_relative_eq!(b.constant, 2.5);
        assert_relative_eq!(b.tau, 0.5);
    }

    #[test]
    fn contraction_bound_rejects_full_relaxation() {
        assert!(contraction_bound(2.0, 1.0, 4.0, 1.0).is_err());
    }

    #[test]
    fn domain_errors_are_reported() {
        assert!(tau_formula(0.0, 1.0, 4.0).is_err());
        assert!(tau_formula(2.5, 1.0, 4.0).is_err());
        assert!(tau_formula(1.0, -1.0, 4.0).is_err());
        assert!(tau_formula(1.0, 1.0, 0.5).is_err());
        assert!(explicit_certificate(1.0, 1.0, 1.0).is_err());
        let p = [[1.0, 0.0], [0.0, 1.0]];
        assert!(assemble_lmi(1.0, 1.0, 4.0, 1.5, &p, 1.0, 1.0).is_err());
        assert!(assemble_lmi(1.0, 1.0, 4.0, 0.5, &p, -1.0, 1.0).is_err());
        // Relaxations above 2 are allowed in the assembly itself.
        assert!(assemble_lmi(2.6, 1.0, 4.0, 0.9, &p, 1.0, 1.0).is_ok());
    }
}
