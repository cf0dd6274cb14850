//! Relaxed splitting iteration engine.
//!
//! One iteration alternates three updates with relaxation parameter `alpha`
//! and penalty `rho`:
//!
//! 1. `x` minimizes `f(x) + (rho/2) ||A x + B z - c + u||^2`,
//! 2. `z` minimizes `g(z) + (rho/2) ||alpha A x - (1-alpha) B z_prev + B z - alpha c + u||^2`,
//! 3. `u` accumulates the relaxed constraint residual.
//!
//! Quadratic subproblems are solved through Cholesky factorizations cached at
//! engine construction; the weighted l1 subproblem uses soft thresholding
//! (valid when `B^T B` is a multiple of the identity); anything else falls
//! back to a damped Newton inner solver.

use crate::error::{Error, Result};
use crate::linalg::{dist, norm, Cholesky, Mat};
use crate::problem::{FunctionOracle, OracleKind, ProblemInstance};

/// Iteration parameters: relaxation, penalty, and stopping controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmmParams {
    /// Relaxation parameter, in `(0, 2]`.
    pub alpha: f64,
    /// Penalty parameter, positive.
    pub rho: f64,
    /// Maximum recorded iterations per run.
    pub max_iters: usize,
    /// Error threshold that counts as converged.
    pub tol: f64,
}

impl AdmmParams {
    /// Validates ranges: `alpha` in `(0, 2]`, `rho > 0`, at least one step.
    pub fn new(alpha: f64, rho: f64, max_iters: usize, tol: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::domain(format!(
                "relaxation must lie in (0, 2], got {alpha}"
            )));
        }
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::domain(format!("penalty must be positive, got {rho}")));
        }
        if max_iters == 0 {
            return Err(Error::domain("max_iters must be at least 1"));
        }
        if !(tol >= 0.0) {
            return Err(Error::domain(format!("tolerance must be nonnegative, got {tol}")));
        }
        Ok(AdmmParams { alpha, rho, max_iters, tol })
    }
}

/// Full iterate: primal blocks, scaled dual, and the iteration counter.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmmState {
    pub x: Vec<f64>,
    pub z: Vec<f64>,
    pub u: Vec<f64>,
    pub iteration: usize,
}

impl AdmmState {
    /// Starting state from initial `z` and `u` (the `x` block is derived
    /// during the first step and starts at zero).
    pub fn initial(x_dim: usize, z0: &[f64], u0: &[f64]) -> Self {
        AdmmState { x: vec![0.0; x_dim], z: z0.to_vec(), u: u0.to_vec(), iteration: 0 }
    }

    /// Concatenated `(z, u)` observable whose convergence the certificates
    /// bound.
    pub fn phi(&self) -> Vec<f64> {
        let mut v = self.z.clone();
        v.extend_from_slice(&self.u);
        v
    }
}

/// Recorded run: the iterate sequence, distances to the fixed point, and
/// whether the tolerance was reached.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub states: Vec<AdmmState>,
    /// Fixed-point observable `(z*, u*)` the errors are measured against.
    pub phi_star: Vec<f64>,
    /// `||phi_t - phi*||` for each recorded state.
    pub error_norms: Vec<f64>,
    pub converged: bool,
}

impl Trajectory {
    /// Number of recorded states (iterations + 1).
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Last recorded distance to the fixed point.
    pub fn final_error(&self) -> f64 {
        *self.error_norms.last().unwrap_or(&f64::NAN)
    }

    /// Consecutive error ratios `e_{t+1} / e_t` (empty when fewer than two
    /// states were recorded).
    pub fn ratios(&self) -> Vec<f64> {
        self.error_norms.windows(2).map(|w| w[1] / w[0]).collect()
    }

    /// CSV dump with header `iteration,err_norm,ratio`; the ratio column is
    /// blank on the first row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iteration,err_norm,ratio\n");
        for (t, e) in self.error_norms.iter().enumerate() {
            if t == 0 {
                out.push_str(&format!("{t},{e:.17e},\n"));
            } else {
                out.push_str(&format!("{t},{e:.17e},{:.17e}\n", e / self.error_norms[t - 1]));
            }
        }
        out
    }
}

/// Strategy for the `x` minimization.
enum XSolver {
    /// Cached Cholesky of `Q + rho A^T A` plus the linear term of `f`.
    Quadratic { factor: Cholesky, linear: Vec<f64> },
    /// Damped Newton on the smooth subproblem objective.
    Newton,
}

/// Strategy for the `z` minimization.
enum ZSolver {
    /// `g = 0`: cached Cholesky of `B^T B`.
    Zero { factor: Cholesky },
    /// Quadratic `g`: cached Cholesky of `Q_g + rho B^T B`.
    Quadratic { factor: Cholesky, linear: Vec<f64> },
    /// Weighted l1 `g` with `B^T B = beta^2 I`: soft thresholding.
    SoftThreshold { beta_sq: f64, weight: f64 },
    /// Damped Newton on the smooth subproblem objective.
    Newton,
}

/// Iteration engine with subproblem factorizations cached up front.
pub struct Engine {
    instance: ProblemInstance,
    params: AdmmParams,
    a_t: Mat,
    b_t: Mat,
    x_solver: XSolver,
    z_solver: ZSolver,
}

/// Iteration cap for the damped Newton inner solver.
const NEWTON_MAX_ITERS: usize = 200;
/// Gradient-norm reduction demanded from the inner solver.
const NEWTON_TOL: f64 = 1e-12;
/// Iteration cap when locating the fixed point of the iteration map.
const FIXED_POINT_CAP: usize = 200_000;
/// Displacement threshold that ends the fixed-point search.
const FIXED_POINT_TOL: f64 = 1e-13;

impl Engine {
    /// Builds the engine, validating the problem/parameter pairing and
    /// caching whatever factorizations the oracles admit.
    pub fn new(instance: ProblemInstance, params: AdmmParams) -> Result<Self> {
        let rho = params.rho;
        let a_t = instance.a.transpose();
        let b_t = instance.b.transpose();
        let ata = instance.a.gram();
        let btb = instance.b.gram();

        let x_solver = match &instance.f.kind {
            OracleKind::Quadratic { matrix, linear } => {
                let system = matrix.add(&ata.scale(rho))?;
                XSolver::Quadratic { factor: Cholesky::new(&system)?, linear: linear.clone() }
            }
            OracleKind::Zero => {
                // f = 0 keeps the subproblem a plain least-squares solve.
                XSolver::Quadratic {
                    factor: Cholesky::new(&ata.scale(rho))?,
                    linear: vec![0.0; instance.x_dim()],
                }
            }
            OracleKind::L1 { .. } => {
                return Err(Error::UnsupportedBranch(
                    "an l1 objective on the x block is not supported".into(),
                ))
            }
            OracleKind::Generic { .. } => XSolver::Newton,
        };

        let z_solver = match &instance.g.kind {
            OracleKind::Zero => ZSolver::Zero { factor: Cholesky::new(&btb)? },
            OracleKind::Quadratic { matrix, linear } => {
                let system = matrix.add(&btb.scale(rho))?;
                ZSolver::Quadratic { factor: Cholesky::new(&system)?, linear: linear.clone() }
            }
            OracleKind::L1 { weight } => match btb.uniform_scaling(1e-12) {
                Some(beta_sq) if beta_sq > 0.0 => {
                    ZSolver::SoftThreshold { beta_sq, weight: *weight }
                }
                _ => {
                    return Err(Error::UnsupportedBranch(
                        "the l1 z-update needs B^T B proportional to the identity".into(),
                    ))
                }
            },
            OracleKind::Generic { .. } => ZSolver::Newton,
        };

        Ok(Engine { instance, params, a_t, b_t, x_solver, z_solver })
    }

    pub fn instance(&self) -> &ProblemInstance {
        &self.instance
    }

    pub fn params(&self) -> &AdmmParams {
        &self.params
    }

    /// One full iteration from `state`.
    pub fn step(&self, state: &AdmmState) -> Result<AdmmState> {
        let alpha = self.params.alpha;
        let inst = &self.instance;

        // r = B z - c + u is the affine part seen by the x subproblem.
        let bz = inst.b.mul_vec(&state.z)?;
        let mut r = bz.clone();
        for i in 0..r.len() {
            r[i] += state.u[i] - inst.c[i];
        }
        let x_next = self.solve_x(&r, &state.x)?;

        // v = alpha A x+ - (1 - alpha) B z - alpha c + u is the affine part
        // seen by the z subproblem; afterwards u+ = v + B z+.
        let ax = inst.a.mul_vec(&x_next)?;
        let mut v = vec![0.0; inst.c.len()];
        for i in 0..v.len() {
            v[i] = alpha * ax[i] - (1.0 - alpha) * bz[i] - alpha * inst.c[i] + state.u[i];
        }
        let z_next = self.solve_z(&v, &state.z)?;

        let bz_next = inst.b.mul_vec(&z_next)?;
        let u_next: Vec<f64> = v.iter().zip(&bz_next).map(|(vi, bi)| vi + bi).collect();

        Ok(AdmmState { x: x_next, z: z_next, u: u_next, iteration: state.iteration + 1 })
    }

    /// Minimizes `f(x) + (rho/2) ||A x + r||^2`.
    fn solve_x(&self, r: &[f64], warm: &[f64]) -> Result<Vec<f64>> {
        let rho = self.params.rho;
        match &self.x_solver {
            XSolver::Quadratic { factor, linear } => {
                let at_r = self.a_t.mul_vec(r)?;
                let rhs: Vec<f64> =
                    (0..linear.len()).map(|i| -linear[i] - rho * at_r[i]).collect();
                factor.solve(&rhs)
            }
            XSolver::Newton => self.newton(
                &self.instance.f,
                &self.instance.a,
                &self.a_t,
                r,
                warm,
            ),
        }
    }

    /// Minimizes `g(z) + (rho/2) ||B z + v||^2`.
    fn solve_z(&self, v: &[f64], warm: &[f64]) -> Result<Vec<f64>> {
        let rho = self.params.rho;
        match &self.z_solver {
            ZSolver::Zero { factor } => {
                let bt_v = self.b_t.mul_vec(v)?;
                let rhs: Vec<f64> = bt_v.iter().map(|x| -x).collect();
                factor.solve(&rhs)
            }
            ZSolver::Quadratic { factor, linear } => {
                let bt_v = self.b_t.mul_vec(v)?;
                let rhs: Vec<f64> =
                    (0..linear.len()).map(|i| -linear[i] - rho * bt_v[i]).collect();
                factor.solve(&rhs)
            }
            ZSolver::SoftThreshold { beta_sq, weight } => {
                let bt_v = self.b_t.mul_vec(v)?;
                let threshold = weight / (rho * beta_sq);
                Ok(bt_v
                    .iter()
                    .map(|&t| soft_threshold(-t / beta_sq, threshold))
                    .collect())
            }
            ZSolver::Newton => self.newton(
                &self.instance.g,
                &self.instance.b,
                &self.b_t,
                v,
                warm,
            ),
        }
    }

    /// Damped Newton minimization of `h(w) = oracle(w) + (rho/2)||M w + r||^2`
    /// with a finite-difference Hessian for the oracle part.
    fn newton(
        &self,
        oracle: &FunctionOracle,
        m: &Mat,
        m_t: &Mat,
        r: &[f64],
        warm: &[f64],
    ) -> Result<Vec<f64>> {
        let rho = self.params.rho;
        let n = m.cols();
        let mtm = m.gram().scale(rho);
        let mut w = if warm.len() == n { warm.to_vec() } else { vec![0.0; n] };

        let grad_h = |w: &[f64]| -> Result<Vec<f64>> {
            let mut g = oracle.gradient(w);
            let mw = m.mul_vec(w)?;
            let res: Vec<f64> = mw.iter().zip(r).map(|(a, b)| a + b).collect();
            let mt_res = m_t.mul_vec(&res)?;
            for i in 0..n {
                g[i] += rho * mt_res[i];
            }
            Ok(g)
        };

        let mut g = grad_h(&w)?;
        let g0 = norm(&g).max(1.0);
        let mut damping = 0.0;
        for iter in 0..NEWTON_MAX_ITERS {
            let gnorm = norm(&g);
            if gnorm <= NEWTON_TOL * g0 {
                return Ok(w);
            }
            // Finite-difference Hessian of the oracle term, symmetrized.
            let mut h = Mat::zeros(n, n);
            for j in 0..n {
                let eps = 1e-7 * w[j].abs().max(1.0);
                let mut wp = w.clone();
                let mut wm = w.clone();
                wp[j] += eps;
                wm[j] -= eps;
                let gp = oracle.gradient(&wp);
                let gm = oracle.gradient(&wm);
                for i in 0..n {
                    h.set(i, j, (gp[i] - gm[i]) / (2.0 * eps));
                }
            }
            let mut sym = Mat::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    sym.set(i, j, 0.5 * (h.get(i, j) + h.get(j, i)) + mtm.get(i, j));
                }
            }
            // Levenberg-style damping: retry with a larger ridge until the
            // step is solvable and shrinks the gradient.
            let mut advanced = false;
            for _ in 0..30 {
                let mut system = sym.clone();
                for i in 0..n {
                    system.set(i, i, system.get(i, i) + damping);
                }
                if let Ok(factor) = Cholesky::new(&system) {
                    let neg_g: Vec<f64> = g.iter().map(|x| -x).collect();
                    let step = factor.solve(&neg_g)?;
                    let w_try: Vec<f64> = w.iter().zip(&step).map(|(a, b)| a + b).collect();
                    let g_try = grad_h(&w_try)?;
                    if norm(&g_try) < gnorm {
                        w = w_try;
                        g = g_try;
                        damping = (damping / 10.0).max(0.0);
                        advanced = true;
                        break;
                    }
                }
                damping = if damping == 0.0 { 1e-8 } else { damping * 10.0 };
            }
            if !advanced {
                return Err(Error::InnerSolver { residual: gnorm, iterations: iter });
            }
        }
        Err(Error::InnerSolver { residual: norm(&g), iterations: NEWTON_MAX_ITERS })
    }

    /// Iterates until the `(z, u)` displacement stalls below a tight
    /// threshold and returns that fixed-point observable `(z*, u*)`.
    pub fn find_fixed_point(&self, z0: &[f64], u0: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let mut state = AdmmState::initial(self.instance.x_dim(), z0, u0);
        let mut prev_phi = state.phi();
        for _ in 0..FIXED_POINT_CAP {
            state = self.step(&state)?;
            let phi = state.phi();
            let disp = dist(&phi, &prev_phi);
            if disp <= FIXED_POINT_TOL * norm(&phi).max(1.0) {
                return Ok((state.z, state.u));
            }
            prev_phi = phi;
        }
        Err(Error::InnerSolver { residual: f64::NAN, iterations: FIXED_POINT_CAP })
    }

    /// Runs from `(z0, u0)` against a known fixed point, recording every
    /// state and its distance to the fixed point. Stops early once the
    /// error drops below the configured tolerance.
    pub fn run_with_fixed_point(
        &self,
        z0: &[f64],
        u0: &[f64],
        z_star: &[f64],
        u_star: &[f64],
    ) -> Result<Trajectory> {
        if z_star.len() != self.instance.z_dim() || u_star.len() != self.instance.c.len() {
            return Err(Error::Dimension("fixed point has wrong block sizes".into()));
        }
        let mut phi_star = z_star.to_vec();
        phi_star.extend_from_slice(u_star);

        let mut state = AdmmState::initial(self.instance.x_dim(), z0, u0);
        let mut states = vec![state.clone()];
        let mut error_norms = vec![dist(&state.phi(), &phi_star)];
        let mut converged = error_norms[0] <= self.params.tol;
        while !converged && state.iteration < self.params.max_iters {
            state = self.step(&state)?;
            let err = dist(&state.phi(), &phi_star);
            states.push(state.clone());
            error_norms.push(err);
            converged = err <= self.params.tol;
        }
        Ok(Trajectory { states, phi_star, error_norms, converged })
    }

    /// Runs from `(z0, u0)`, first locating the fixed point to high
    /// precision and then replaying the trajectory against it.
    pub fn run(&self, z0: &[f64], u0: &[f64]) -> Result<Trajectory> {
        let (z_star, u_star) = self.find_fixed_point(z0, u0)?;
        self.run_with_fixed_point(z0, u0, &z_star, &u_star)
    }
}

/// Scalar soft-threshold operator.
#[inline]
pub fn soft_threshold(t: f64, threshold: f64) -> f64 {
    if t > threshold {
        t - threshold
    } else if t < -threshold {
        t + threshold
    } else {
        0.0
    }
}

/// One iteration without keeping an engine around (factors on every call;
/// prefer [`Engine`] for loops).
pub fn admm_step(
    instance: &ProblemInstance,
    params: &AdmmParams,
    state: &AdmmState,
) -> Result<AdmmState> {
    Engine::new(instance.clone(), *params)?.step(state)
}

/// Geometric-mean contraction factor over the tail of a trajectory.
///
/// Entries are used only down to a floor of `100 eps` relative to the first
/// error (beyond that the error is rounding noise); from that usable prefix
/// the last `window + 1` entries give `(e_last / e_first)^(1/(len-1))`.
pub fn observed_rate(trajectory: &Trajectory, window: usize) -> Result<f64> {
    if window == 0 {
        return Err(Error::domain("rate window must be at least 1"));
    }
    let errs = &trajectory.error_norms;
    if errs.is_empty() {
        return Err(Error::InsufficientData("trajectory holds no error values".into()));
    }
    let floor = 100.0 * f64::EPSILON * errs[0].max(1.0);
    let mut usable = 0;
    for &e in errs.iter() {
        if e <= floor || !e.is_finite() {
            break;
        }
        usable += 1;
    }
    if usable < 2 {
        return Err(Error::InsufficientData(format!(
            "only {usable} error values above the noise floor"
        )));
    }
    let tail_len = (window + 1).min(usable);
    let first = errs[usable - tail_len];
    let last = errs[usable - 1];
    Ok((last / first).powf(1.0 / (tail_len as f64 - 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dot;
    use crate::problem::{CurvatureUpper, SmoothnessBounds};
    use approx::assert_relative_eq;
    use std::sync::Arc;

    fn diag_problem(alpha: f64, rho: f64) -> (Engine, AdmmState) {
        let f = FunctionOracle::quadratic(Mat::diag(&[1.0, 4.0]), vec![0.0, 0.0]).unwrap();
        let instance = ProblemInstance::new(
            f,
            FunctionOracle::zero(),
            Mat::identity(2),
            Mat::diag(&[-1.0, -1.0]),
            vec![0.0, 0.0],
        )
        .unwrap();
        let params = AdmmParams::new(alpha, rho, 100, 0.0).unwrap();
        let engine = Engine::new(instance, params).unwrap();
        let state = AdmmState::initial(2, &[1.0, 0.0], &[0.0, 0.0]);
        (engine, state)
    }

    #[test]
    fn one_step_matches_hand_computation_alpha_one() {
        // With Q = diag(1,4), A = I, B = -I, rho = 2, z0 = e1:
        // x+ = (Q + 2I)^{-1} (2 z0) = (2/3, 0), z+ = x+ at alpha = 1.
        let (engine, state) = diag_problem(1.0, 2.0);
        let next = engine.step(&state).unwrap();
        assert_relative_eq!(next.x[0], 2.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(next.z[0], 2.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(next.z[1], 0.0, epsilon = 1e-15);
        assert_relative_eq!(next.u[0], 0.0, epsilon = 1e-15);
        assert_relative_eq!(next.u[1], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn one_step_matches_hand_computation_alpha_two() {
        // Full over-relaxation doubles the x pull: z+ = 2 x+ - z0 = (1/3, 0).
        let (engine, state) = diag_problem(2.0, 2.0);
        let next = engine.step(&state).unwrap();
        assert_relative_eq!(next.z[0], 1.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(next.u[0], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn relaxation_one_reduces_to_classical_update() {
        // At alpha = 1 the z update must minimize
        // g(z) + (rho/2)||A x+ + B z - c + u||^2 exactly.
        let f = FunctionOracle::quadratic(
            Mat::from_rows(&[vec![2.0, 0.3], vec![0.3, 1.0]]).unwrap(),
            vec![0.1, -0.2],
        )
        .unwrap();
        let g = FunctionOracle::quadratic(Mat::diag(&[0.5, 0.5]), vec![0.0, 0.1]).unwrap();
        let a = Mat::from_rows(&[vec![1.0, 0.2], vec![0.0, 1.0]]).unwrap();
        let b = Mat::diag(&[-1.0, -2.0]);
        let c = vec![0.3, -0.1];
        let instance = ProblemInstance::new(f, g.clone(), a.clone(), b.clone(), c.clone()).unwrap();
        let params = AdmmParams::new(1.0, 1.7, 10, 0.0).unwrap();
        let engine = Engine::new(instance, params).unwrap();
        let state = AdmmState::initial(2, &[0.4, -0.6], &[0.2, 0.1]);
        let next = engine.step(&state).unwrap();

        // Classical z step solved independently: (Qg + rho B^T B) z =
        // -qg - rho B^T (A x+ - c + u).
        let rho = 1.7;
        let ax = a.mul_vec(&next.x).unwrap();
        let res: Vec<f64> = (0..2).map(|i| ax[i] - c[i] + state.u[i]).collect();
        let bt_res = b.transpose().mul_vec(&res).unwrap();
        let system = Mat::diag(&[0.5, 0.5]).add(&b.gram().scale(rho)).unwrap();
        let rhs: Vec<f64> = (0..2)
            .map(|i| -[0.0, 0.1][i] - rho * bt_res[i])
            .collect();
        let z_classical = Cholesky::new(&system).unwrap().solve(&rhs).unwrap();
        assert_relative_eq!(next.z[0], z_classical[0], max_relative = 1e-12);
        assert_relative_eq!(next.z[1], z_classical[1], max_relative = 1e-12);
    }

    #[test]
    fn fixed_point_is_invariant() {
        let (engine, _) = diag_problem(1.3, 0.9);
        let (z_star, u_star) = engine.find_fixed_point(&[1.0, 1.0], &[0.0, 0.0]).unwrap();
        let state = AdmmState { x: vec![0.0; 2], z: z_star.clone(), u: u_star.clone(), iteration: 0 };
        let next = engine.step(&state).unwrap();
        assert!(dist(&next.z, &z_star) <= 1e-12);
        assert!(dist(&next.u, &u_star) <= 1e-12);
    }

    #[test]
    fn run_records_monotone_errors_for_contraction() {
        let (engine, _) = diag_problem(1.0, 2.0);
        let traj = engine.run(&[1.0, 0.0], &[0.0, 0.0]).unwrap();
        assert!(traj.len() > 3);
        for w in traj.error_norms.windows(2) {
            if w[0] > 1e-12 {
                assert!(w[1] <= w[0] * (1.0 + 1e-12), "errors should contract: {w:?}");
            }
        }
    }

    #[test]
    fn observed_rate_matches_known_contraction() {
        // Here the iteration acts diagonally; along e1 the factor is
        // 1 - alpha / (1 + rho / m) = 1 - 1/(1 + 2) = 2/3.
        let (engine, _) = diag_problem(1.0, 2.0);
        let mut params = *engine.params();
        params.max_iters = 60;
        params.tol = 1e-300;
        let engine = Engine::new(engine.instance().clone(), params).unwrap();
        let traj = engine
            .run_with_fixed_point(&[1.0, 0.0], &[0.0, 0.0], &[0.0, 0.0], &[0.0, 0.0])
            .unwrap();
        let rate = observed_rate(&traj, 20).unwrap();
        assert_relative_eq!(rate, 2.0 / 3.0, epsilon = 1e-9);
    }

    #[test]
    fn observed_rate_needs_two_points() {
        let traj = Trajectory {
            states: vec![],
            phi_star: vec![],
            error_norms: vec![1.0],
            converged: false,
        };
        assert!(matches!(
            observed_rate(&traj, 5),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn observed_rate_ignores_noise_floor_tail() {
        // Clean geometric decay followed by rounding noise: the noise must
        // not contaminate the estimate.
        let mut errs: Vec<f64> = (0..40).map(|t| 0.5f64.powi(t)).collect();
        errs.extend_from_slice(&[1e-17, 3e-17, 2e-18]);
        let traj = Trajectory {
            states: vec![],
            phi_star: vec![],
            error_norms: errs,
            converged: true,
        };
        let rate = observed_rate(&traj, 10).unwrap();
        assert_relative_eq!(rate, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn soft_threshold_shrinks_toward_zero() {
        assert_eq!(soft_threshold(3.0, 1.0), 2.0);
        assert_eq!(soft_threshold(-3.0, 1.0), -2.0);
        assert_eq!(soft_threshold(0.5, 1.0), 0.0);
    }

    #[test]
    fn l1_update_satisfies_optimality_conditions() {
        // z+ must satisfy 0 in w d||z||_1 + rho B^T (B z + v); check the
        // subgradient residual coordinate-wise.
        let f = FunctionOracle::quadratic(Mat::diag(&[1.0, 2.0, 3.0]), vec![0.1, 0.0, -0.3])
            .unwrap();
        let g = FunctionOracle::l1(0.4).unwrap();
        let b = Mat::diag(&[-1.5, -1.5, -1.5]);
        let instance =
            ProblemInstance::new(f, g, Mat::identity(3), b.clone(), vec![0.2, -0.1, 0.0])
                .unwrap();
        let params = AdmmParams::new(1.4, 1.1, 50, 0.0).unwrap();
        let engine = Engine::new(instance, params).unwrap();
        let state = AdmmState::initial(3, &[0.5, -0.2, 0.9], &[0.1, 0.0, -0.4]);

        // Recompute v exactly as the step does.
        let next = engine.step(&state).unwrap();
        let ax = engine.instance().a.mul_vec(&next.x).unwrap();
        let bz0 = b.mul_vec(&state.z).unwrap();
        let v: Vec<f64> = (0..3)
            .map(|i| 1.4 * ax[i] - (1.0 - 1.4) * bz0[i] - 1.4 * engine.instance().c[i] + state.u[i])
            .collect();
        let bz = b.mul_vec(&next.z).unwrap();
        let res: Vec<f64> = (0..3).map(|i| bz[i] + v[i]).collect();
        let grad_quad = b.transpose().mul_vec(&res).unwrap();
        for i in 0..3 {
            let smooth = 1.1 * grad_quad[i];
            if next.z[i] != 0.0 {
                assert_relative_eq!(smooth, -0.4 * next.z[i].signum(), epsilon = 1e-10);
            } else {
                assert!(smooth.abs() <= 0.4 + 1e-10);
            }
        }
    }

    #[test]
    fn generic_oracle_matches_cached_quadratic_path() {
        // The damped Newton fallback must agree with the Cholesky path when
        // handed the same quadratic through closures.
        let q = Mat::diag(&[1.0, 4.0]);
        let q_for_value = q.clone();
        let q_for_grad = q.clone();
        let generic = FunctionOracle::generic(
            Arc::new(move |x: &[f64]| {
                let qx = q_for_value.mul_vec(x).unwrap();
                0.5 * dot(x, &qx)
            }),
            Arc::new(move |x: &[f64]| q_for_grad.mul_vec(x).unwrap()),
            SmoothnessBounds {
                convexity_lower: 1.0,
                curvature_upper: CurvatureUpper::Finite(4.0),
            },
        );
        let instance_generic = ProblemInstance::new(
            generic,
            FunctionOracle::zero(),
            Mat::identity(2),
            Mat::diag(&[-1.0, -1.0]),
            vec![0.0, 0.0],
        )
        .unwrap();
        let params = AdmmParams::new(1.5, 2.0, 10, 0.0).unwrap();
        let engine_generic = Engine::new(instance_generic, params).unwrap();
        let (engine_quad, _) = diag_problem(1.5, 2.0);

        let state = AdmmState::initial(2, &[0.7, -0.3], &[0.05, 0.2]);
        let a = engine_generic.step(&state).unwrap();
        let b = engine_quad.step(&state).unwrap();
        assert!(dist(&a.x, &b.x) <= 1e-9, "x blocks diverge: {:?} vs {:?}", a.x, b.x);
        assert!(dist(&a.z, &b.z) <= 1e-9);
        assert!(dist(&a.u, &b.u) <= 1e-9);
    }

    #[test]
    fn l1_with_anisotropic_b_is_rejected() {
        let f = FunctionOracle::quadratic(Mat::diag(&[1.0, 2.0]), vec![0.0, 0.0]).unwrap();
        let g = FunctionOracle::l1(0.4).unwrap();
        let b = Mat::diag(&[-1.0, -2.0]);
        let instance =
            ProblemInstance::new(f, g, Mat::identity(2), b, vec![0.0, 0.0]).unwrap();
        let params = AdmmParams::new(1.0, 1.0, 10, 0.0).unwrap();
        assert!(matches!(
            Engine::new(instance, params),
            Err(Error::UnsupportedBranch(_))
        ));
    }

    #[test]
    fn params_reject_out_of_range_relaxation() {
        assert!(AdmmParams::new(0.0, 1.0, 10, 0.0).is_err());
        assert!(AdmmParams::new(2.1, 1.0, 10, 0.0).is_err());
        assert!(AdmmParams::new(1.0, -1.0, 10, 0.0).is_err());
    }

    #[test]
    fn trajectory_csv_has_expected_shape() {
        let traj = Trajectory {
            states: vec![],
            phi_star: vec![],
            error_norms: vec![1.0, 0.5, 0.25],
            converged: true,
        };
        let csv = traj.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "iteration,err_norm,ratio");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].ends_with(','));
        assert!(lines[2].contains("5.0"));
    }
}
