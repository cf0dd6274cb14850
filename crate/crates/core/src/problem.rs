//! Problem data: function oracles, constraint matrices, and the derived
//! scale-free parameters that the certification layer consumes.
//!
//! A problem couples two convex functions `f` and `g` through the linear
//! constraint `A x + B z = c`. The solver layer only ever touches `f` and `g`
//! through [`FunctionOracle`], so quadratics, weighted l1 terms, the zero
//! function, and arbitrary user closures all flow through the same interface.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, Mat};

/// Upper curvature bound of a function: finite (smooth) or unbounded
/// (merely convex, like a weighted l1 norm).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurvatureUpper {
    Finite(f64),
    Unbounded,
}

/// Convexity and smoothness constants attached to an oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothnessBounds {
    /// Strong-convexity modulus (0 for merely convex functions).
    pub convexity_lower: f64,
    /// Curvature upper bound.
    pub curvature_upper: CurvatureUpper,
}

impl SmoothnessBounds {
    /// Both constants, failing when the upper bound is not finite.
    pub fn finite_pair(&self) -> Result<(f64, f64)> {
        match self.curvature_upper {
            CurvatureUpper::Finite(l) => Ok((self.convexity_lower, l)),
            CurvatureUpper::Unbounded => Err(Error::domain(
                "operation requires a finite curvature upper bound",
            )),
        }
    }
}

/// The concrete function behind an oracle.
#[derive(Clone)]
pub enum OracleKind {
    /// `x -> 0.5 x^T Q x + q^T x` with symmetric positive semidefinite `Q`.
    Quadratic { matrix: Mat, linear: Vec<f64> },
    /// `z -> weight * ||z||_1`.
    L1 { weight: f64 },
    /// The identically-zero function.
    Zero,
    /// Arbitrary value/gradient closures with user-supplied bounds.
    Generic {
        value: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
        gradient: Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>,
    },
}

impl fmt::Debug for OracleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleKind::Quadratic { matrix, .. } => {
                write!(f, "Quadratic({}x{})", matrix.rows(), matrix.cols())
            }
            OracleKind::L1 { weight } => write!(f, "L1(weight={weight})"),
            OracleKind::Zero => write!(f, "Zero"),
            OracleKind::Generic { .. } => write!(f, "Generic(..)"),
        }
    }
}

/// A convex function exposed through value and (sub)gradient queries,
/// together with its declared convexity/smoothness constants.
#[derive(Debug, Clone)]
pub struct FunctionOracle {
    pub kind: OracleKind,
    pub bounds: SmoothnessBounds,
}

impl FunctionOracle {
    /// Quadratic oracle; bounds are derived from the spectrum of `matrix`.
    pub fn quadratic(matrix: Mat, linear: Vec<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Dimension("quadratic matrix must be square".into()));
        }
        if matrix.rows() != linear.len() {
            return Err(Error::Dimension(
                "quadratic linear term length must match matrix order".into(),
            ));
        }
        if !matrix.is_symmetric(1e-12) {
            return Err(Error::domain("quadratic matrix must be symmetric"));
        }
        let eigs = matrix.sym_eigenvalues()?;
        let lo = eigs[0];
        let hi = eigs[eigs.len() - 1];
        if lo < -1e-12 * hi.abs().max(1.0) {
            return Err(Error::domain(format!(
                "quadratic matrix must be positive semidefinite (min eigenvalue {lo:.3e})"
            )));
        }
        Ok(FunctionOracle {
            kind: OracleKind::Quadratic { matrix, linear },
            bounds: SmoothnessBounds {
                convexity_lower: lo.max(0.0),
                curvature_upper: CurvatureUpper::Finite(hi),
            },
        })
    }

    /// Weighted l1-norm oracle (`weight >= 0`).
    pub fn l1(weight: f64) -> Result<Self> {
        if !(weight >= 0.0) {
            return Err(Error::domain("l1 weight must be nonnegative"));
        }
        Ok(FunctionOracle {
            kind: OracleKind::L1 { weight },
            bounds: SmoothnessBounds {
                convexity_lower: 0.0,
                curvature_upper: CurvatureUpper::Unbounded,
            },
        })
    }

    /// The identically-zero oracle.
    pub fn zero() -> Self {
        FunctionOracle {
            kind: OracleKind::Zero,
            bounds: SmoothnessBounds {
                convexity_lower: 0.0,
                curvature_upper: CurvatureUpper::Finite(0.0),
            },
        }
    }

    /// Oracle from arbitrary closures with caller-supplied bounds.
    pub fn generic(
        value: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
        gradient: Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>,
        bounds: SmoothnessBounds,
    ) -> Self {
        FunctionOracle { kind: OracleKind::Generic { value, gradient }, bounds }
    }

    /// Function value at `x`.
    pub fn value(&self, x: &[f64]) -> f64 {
        match &self.kind {
            OracleKind::Quadratic { matrix, linear } => {
                let qx = matrix.mul_vec(x).expect("quadratic oracle dimension mismatch");
                0.5 * dot(x, &qx) + dot(linear, x)
            }
            OracleKind::L1 { weight } => weight * x.iter().map(|v| v.abs()).sum::<f64>(),
            OracleKind::Zero => 0.0,
            OracleKind::Generic { value, .. } => value(x),
        }
    }

    /// Gradient at `x`; for the l1 oracle this is the sign subgradient.
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        match &self.kind {
            OracleKind::Quadratic { matrix, linear } => {
                let mut g = matrix.mul_vec(x).expect("quadratic oracle dimension mismatch");
                for (gi, li) in g.iter_mut().zip(linear) {
                    *gi += li;
                }
                g
            }
            OracleKind::L1 { weight } => x.iter().map(|v| weight * v.signum()).collect(),
            OracleKind::Zero => vec![0.0; x.len()],
            OracleKind::Generic { gradient, .. } => gradient(x),
        }
    }

    /// Intrinsic dimension when the oracle pins one down.
    pub fn dim_hint(&self) -> Option<usize> {
        match &self.kind {
            OracleKind::Quadratic { matrix, .. } => Some(matrix.rows()),
            _ => None,
        }
    }
}

/// A coupled problem `min f(x) + g(z)` subject to `A x + B z = c`.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub f: FunctionOracle,
    pub g: FunctionOracle,
    pub a: Mat,
    pub b: Mat,
    pub c: Vec<f64>,
}

/// Condition threshold below which a constraint matrix is rejected.
const RANK_TOL: f64 = 1e-12;

impl ProblemInstance {
    /// Validates shapes and rank conditions: `A` must be square and
    /// invertible, `B` must have full column rank, and `c` must match the
    /// constraint row dimension.
    pub fn new(
        f: FunctionOracle,
        g: FunctionOracle,
        a: Mat,
        b: Mat,
        c: Vec<f64>,
    ) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Dimension(format!(
                "constraint matrix A must be square, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        if b.rows() != a.rows() {
            return Err(Error::Dimension(format!(
                "A has {} rows but B has {}",
                a.rows(),
                b.rows()
            )));
        }
        if b.cols() > b.rows() {
            return Err(Error::Dimension(
                "B cannot have full column rank with more columns than rows".into(),
            ));
        }
        if c.len() != a.rows() {
            return Err(Error::Dimension(format!(
                "constraint vector has length {}, expected {}",
                c.len(),
                a.rows()
            )));
        }
        if let Some(dim) = f.dim_hint() {
            if dim != a.cols() {
                return Err(Error::Dimension(format!(
                    "f acts on dimension {dim} but A has {} columns",
                    a.cols()
                )));
            }
        }
        if let Some(dim) = g.dim_hint() {
            if dim != b.cols() {
                return Err(Error::Dimension(format!(
                    "g acts on dimension {dim} but B has {} columns",
                    b.cols()
                )));
            }
        }
        let sv_a = a.singular_values();
        let (a_max, a_min) = (sv_a[0], sv_a[sv_a.len() - 1]);
        if a_min <= RANK_TOL * a_max || a_max == 0.0 {
            return Err(Error::Conditioning(format!(
                "A is numerically singular (sigma_min/sigma_max = {:.3e})",
                if a_max > 0.0 { a_min / a_max } else { 0.0 }
            )));
        }
        let sv_b = b.singular_values();
        let (b_max, b_min) = (sv_b[0], sv_b[b.cols() - 1]);
        if b_min <= RANK_TOL * b_max || b_max == 0.0 {
            return Err(Error::Conditioning(format!(
                "B is numerically column-rank-deficient (sigma_min/sigma_max = {:.3e})",
                if b_max > 0.0 { b_min / b_max } else { 0.0 }
            )));
        }
        Ok(ProblemInstance { f, g, a, b, c })
    }

    /// Dimension of the `x` block.
    pub fn x_dim(&self) -> usize {
        self.a.cols()
    }

    /// Dimension of the `z` block.
    pub fn z_dim(&self) -> usize {
        self.b.cols()
    }

    /// Extreme singular values of `A` as `(largest, smallest)`.
    pub fn a_singular_range(&self) -> (f64, f64) {
        let sv = self.a.singular_values();
        (sv[0], sv[sv.len() - 1])
    }

    /// Extreme singular values of `B` as `(largest, smallest)`.
    pub fn b_singular_range(&self) -> (f64, f64) {
        let sv = self.b.singular_values();
        (sv[0], sv[self.b.cols() - 1])
    }
}

/// Scale-free parameters derived from a problem instance and a penalty.
///
/// All certification formulas consume only this triple of normalized
/// quantities plus the two condition numbers, never the raw problem data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    /// Convexity modulus scaled by the largest singular value of `A`.
    pub m_hat: f64,
    /// Curvature bound scaled by the smallest singular value of `A`.
    pub l_hat: f64,
    /// Normalized penalty `rho / sqrt(m_hat * l_hat)`.
    pub rho0: f64,
    /// Effective condition number `kappa_f * kappa_a^2`.
    pub kappa: f64,
    /// Condition number of `f` alone.
    pub kappa_f: f64,
    /// Condition number of `A`.
    pub kappa_a: f64,
    /// Condition number of `B` (restricted to its column space).
    pub kappa_b: f64,
}

/// Maps raw problem data and a penalty `rho` to the normalized parameters
/// used by every certification routine.
pub fn derive_params(instance: &ProblemInstance, rho: f64) -> Result<DerivedParams> {
    if !(rho > 0.0) {
        return Err(Error::domain(format!("penalty must be positive, got {rho}")));
    }
    let (m, l) = instance.f.bounds.finite_pair()?;
    if !(m > 0.0) {
        return Err(Error::domain(format!(
            "f must be strongly convex (modulus {m} is not positive)"
        )));
    }
    if l < m {
        return Err(Error::domain(format!(
            "curvature bound {l} is below convexity modulus {m}"
        )));
    }
    let (a_max, a_min) = instance.a_singular_range();
    let (b_max, b_min) = instance.b_singular_range();
    let m_hat = m / (a_max * a_max);
    let l_hat = l / (a_min * a_min);
    let kappa_f = l / m;
    let kappa_a = a_max / a_min;
    let kappa_b = b_max / b_min;
    Ok(DerivedParams {
        m_hat,
        l_hat,
        rho0: rho / (m_hat * l_hat).sqrt(),
        kappa: kappa_f * kappa_a * kappa_a,
        kappa_f,
        kappa_a,
        kappa_b,
    })
}

/// Penalty `rho` that realizes a requested normalized penalty `rho0` for
/// the given instance (the inverse of the map in [`derive_params`]).
pub fn rho_for_normalized_step(instance: &ProblemInstance, rho0: f64) -> Result<f64> {
    if !(rho0 > 0.0) {
        return Err(Error::domain(format!(
            "normalized penalty must be positive, got {rho0}"
        )));
    }
    let (m, l) = instance.f.bounds.finite_pair()?;
    if !(m > 0.0) {
        return Err(Error::domain("f must be strongly convex"));
    }
    let (a_max, a_min) = instance.a_singular_range();
    let m_hat = m / (a_max * a_max);
    let l_hat = l / (a_min * a_min);
    Ok(rho0 * (m_hat * l_hat).sqrt())
}

/// Outcome of sampling-based validation of the declared oracle bounds.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AssumptionReport {
    /// Number of point pairs tested per oracle.
    pub samples: usize,
    /// Most negative slack of the strong-convexity inequality observed.
    pub worst_lower_slack: f64,
    /// Most negative slack of the curvature inequality observed.
    pub worst_upper_slack: f64,
    /// Whether every sampled inequality held up to rounding tolerance.
    pub passed: bool,
}

/// Empirically checks the declared convexity/curvature bounds of both
/// oracles on `samples` random point pairs.
///
/// For each pair `(x, y)` the gradient monotonicity sandwich
/// `m ||x-y||^2 <= <grad(x)-grad(y), x-y> <= L ||x-y||^2` is evaluated;
/// the report records the worst slack seen on either side. Deterministic
/// for a fixed seed.
pub fn validate_assumption(
    instance: &ProblemInstance,
    samples: usize,
    seed: u64,
) -> AssumptionReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_lower = f64::INFINITY;
    let mut worst_upper = f64::INFINITY;

    let mut check = |oracle: &FunctionOracle, dim: usize, rng: &mut ChaCha8Rng| {
        let m = oracle.bounds.convexity_lower;
        let upper = oracle.bounds.curvature_upper;
        for _ in 0..samples {
            let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let y: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let gx = oracle.gradient(&x);
            let gy = oracle.gradient(&y);
            let mut inner = 0.0;
            let mut sq = 0.0;
            for i in 0..dim {
                let dx = x[i] - y[i];
                inner += (gx[i] - gy[i]) * dx;
                sq += dx * dx;
            }
            let scale = sq.max(1e-30);
            worst_lower = worst_lower.min((inner - m * sq) / scale);
            if let CurvatureUpper::Finite(l) = upper {
                worst_upper = worst_upper.min((l * sq - inner) / scale);
            }
        }
    };

    check(&instance.f, instance.x_dim(), &mut rng);
    check(&instance.g, instance.z_dim(), &mut rng);

    if worst_upper == f64::INFINITY {
        worst_upper = 0.0;
    }
    if worst_lower == f64::INFINITY {
        worst_lower = 0.0;
    }
    let tol = -1e-9;
    AssumptionReport {
        samples,
        worst_lower_slack: worst_lower,
        worst_upper_slack: worst_upper,
        passed: worst_lower >= tol && worst_upper >= tol,
    }
}

/// Serializable description of an oracle for config files.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OracleConfig {
    Quadratic { matrix: Vec<Vec<f64>>, linear: Vec<f64> },
    L1 { weight: f64 },
    Zero,
}

impl OracleConfig {
    /// Instantiates the oracle this config describes.
    pub fn build(&self) -> Result<FunctionOracle> {
        match self {
            OracleConfig::Quadratic { matrix, linear } => {
                FunctionOracle::quadratic(Mat::from_rows(matrix)?, linear.clone())
            }
            OracleConfig::L1 { weight } => FunctionOracle::l1(*weight),
            OracleConfig::Zero => Ok(FunctionOracle::zero()),
        }
    }
}

/// Serializable description of a full problem instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemConfig {
    pub f: OracleConfig,
    pub g: OracleConfig,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
    pub c: Vec<f64>,
}

impl ProblemConfig {
    /// Instantiates and validates the described problem.
    pub fn build(&self) -> Result<ProblemInstance> {
        ProblemInstance::new(
            self.f.build()?,
            self.g.build()?,
            Mat::from_rows(&self.a)?,
            Mat::from_rows(&self.b)?,
            self.c.clone(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn quadratic_instance(m: f64, l: f64, a_scale: f64) -> ProblemInstance {
        let f = FunctionOracle::quadratic(Mat::diag(&[m, l]), vec![0.0, 0.0]).unwrap();
        let g = FunctionOracle::zero();
        let a = Mat::diag(&[a_scale, a_scale]);
        let b = Mat::diag(&[-1.0, -1.0]);
        ProblemInstance::new(f, g, a, b, vec![0.0, 0.0]).unwrap()
    }

    #[test]
    fn quadratic_oracle_value_and_gradient() {
        let f = FunctionOracle::quadratic(
            Mat::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap(),
            vec![1.0, -1.0],
        )
        .unwrap();
        let x = [1.0, 2.0];
        // 0.5 * (2 + 2*0.5*2 + 4) + (1 - 2) = 0.5*8 - 1 = 3.
        assert_relative_eq!(f.value(&x), 3.0, max_relative = 1e-14);
        let g = f.gradient(&x);
        assert_relative_eq!(g[0], 2.0 + 1.0 + 1.0, max_relative = 1e-14);
        assert_relative_eq!(g[1], 0.5 + 2.0 - 1.0, max_relative = 1e-14);
    }

    #[test]
    fn quadratic_oracle_derives_bounds_from_spectrum() {
        let f = FunctionOracle::quadratic(Mat::diag(&[1.0, 4.0]), vec![0.0, 0.0]).unwrap();
        assert_relative_eq!(f.bounds.convexity_lower, 1.0);
        assert_eq!(f.bounds.curvature_upper, CurvatureUpper::Finite(4.0));
    }

    #[test]
    fn derive_params_identity_constraint() {
        let instance = quadratic_instance(1.0, 4.0, 1.0);
        let p = derive_params(&instance, 2.0).unwrap();
        assert_relative_eq!(p.m_hat, 1.0);
        assert_relative_eq!(p.l_hat, 4.0);
        assert_relative_eq!(p.rho0, 1.0); // 2 / sqrt(4)
        assert_relative_eq!(p.kappa, 4.0);
        assert_relative_eq!(p.kappa_f, 4.0);
        assert_relative_eq!(p.kappa_a, 1.0);
        assert_relative_eq!(p.kappa_b, 1.0);
    }

    #[test]
    fn derive_params_scaled_constraint() {
        // A = 0.5 I shifts both normalized curvatures by 1/0.25 and the
        // penalty rho = 4 lands at normalized penalty 0.5.
        let instance = quadratic_instance(1.0, 4.0, 0.5);
        let p = derive_params(&instance, 4.0).unwrap();
        assert_relative_eq!(p.m_hat, 4.0);
        assert_relative_eq!(p.l_hat, 16.0);
        assert_relative_eq!(p.rho0, 0.5);
        assert_relative_eq!(p.kappa, 4.0); // kappa_a = 1 for scaled identity
    }

    #[test]
    fn rho_round_trips_through_normalization() {
        let instance = quadratic_instance(1.0, 4.0, 0.5);
        for &rho0 in &[0.1, 0.5, 1.0, 2.0, 10.0] {
            let rho = rho_for_normalized_step(&instance, rho0).unwrap();
            let p = derive_params(&instance, rho).unwrap();
            assert_relative_eq!(p.rho0, rho0, max_relative = 1e-14);
        }
    }

    #[test]
    fn anisotropic_a_inflates_kappa() {
        let f = FunctionOracle::quadratic(Mat::diag(&[1.0, 4.0]), vec![0.0, 0.0]).unwrap();
        let a = Mat::diag(&[1.0, 3.0]);
        let b = Mat::diag(&[-1.0, -1.0]);
        let instance =
            ProblemInstance::new(f, FunctionOracle::zero(), a, b, vec![0.0, 0.0]).unwrap();
        let p = derive_params(&instance, 1.0).unwrap();
        assert_relative_eq!(p.kappa_a, 3.0);
        assert_relative_eq!(p.kappa, 36.0); // 4 * 9
        assert_relative_eq!(p.m_hat, 1.0 / 9.0);
        assert_relative_eq!(p.l_hat, 4.0);
    }

    #[test]
    fn singular_a_is_rejected() {
        let f = FunctionOracle::quadratic(Mat::diag(&[1.0, 4.0]), vec![0.0, 0.0]).unwrap();
        let a = Mat::diag(&[1.0, 0.0]);
        let b = Mat::diag(&[-1.0, -1.0]);
        let err = ProblemInstance::new(f, FunctionOracle::zero(), a, b, vec![0.0, 0.0])
            .unwrap_err();
        assert!(matches!(err, Error::Conditioning(_)));
    }

    #[test]
    fn derive_params_requires_strong_convexity() {
        let f = FunctionOracle::quadratic(Mat::diag(&[0.0, 4.0]), vec![0.0, 0.0]).unwrap();
        let instance = ProblemInstance::new(
            f,
            FunctionOracle::zero(),
            Mat::identity(2),
            Mat::diag(&[-1.0, -1.0]),
            vec![0.0, 0.0],
        )
        .unwrap();
        assert!(matches!(derive_params(&instance, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn validate_assumption_accepts_true_bounds() {
        let instance = quadratic_instance(1.0, 4.0, 1.0);
        let report = validate_assumption(&instance, 2000, 7);
        assert!(report.passed, "true bounds should validate: {report:?}");
    }

    #[test]
    fn validate_assumption_rejects_inflated_convexity() {
        // Claim convexity modulus 2 for a function whose true modulus is 1.
        let mut f =
            FunctionOracle::quadratic(Mat::diag(&[1.0, 4.0]), vec![0.0, 0.0]).unwrap();
        f.bounds.convexity_lower = 2.0;
        let instance = ProblemInstance::new(
            f,
            FunctionOracle::zero(),
            Mat::identity(2),
            Mat::diag(&[-1.0, -1.0]),
            vec![0.0, 0.0],
        )
        .unwrap();
        let report = validate_assumption(&instance, 2000, 7);
        assert!(!report.passed);
        assert!(report.worst_lower_slack < -1e-3);
    }

    #[test]
    fn validate_assumption_is_seed_deterministic() {
        let instance = quadratic_instance(1.0, 4.0, 1.0);
        let r1 = validate_assumption(&instance, 500, 42);
        let r2 = validate_assumption(&instance, 500, 42);
        assert_eq!(r1.worst_lower_slack, r2.worst_lower_slack);
        assert_eq!(r1.worst_upper_slack, r2.worst_upper_slack);
    }

    #[test]
    fn l1_oracle_on_sampled_pairs_is_monotone() {
        let f = FunctionOracle::quadratic(Mat::diag(&[1.0, 4.0]), vec![0.0, 0.0]).unwrap();
        let g = FunctionOracle::l1(0.3).unwrap();
        let instance = ProblemInstance::new(
            f,
            g,
            Mat::identity(2),
            Mat::diag(&[-1.0, -1.0]),
            vec![0.0, 0.0],
        )
        .unwrap();
        let report = validate_assumption(&instance, 2000, 11);
        assert!(report.passed, "l1 sign subgradient is monotone: {report:?}");
    }

    #[test]
    fn config_round_trip() {
        let cfg = ProblemConfig {
            f: OracleConfig::Quadratic {
                matrix: vec![vec![1.0, 0.0], vec![0.0, 4.0]],
                linear: vec![0.0, 0.0],
            },
            g: OracleConfig::L1 { weight: 0.5 },
            a: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            b: vec![vec![-1.0, 0.0], vec![0.0, -1.0]],
            c: vec![0.0, 0.0],
        };
        let json = serde_json::to_string(&cfg).unwrap();
        let back: ProblemConfig = serde_json::from_str(&json).unwrap();
        let instance = back.build().unwrap();
        assert_eq!(instance.x_dim(), 2);
        let p = derive_params(&instance, 2.0).unwrap();
        assert_relative_eq!(p.rho0, 1.0);
    }
}
