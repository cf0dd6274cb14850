//! Numerical search for rate certificates, independent of the closed form.
//!
//! For fixed `(alpha, rho0, kappa, tau)` the certificate matrix is linear in
//! the five unknowns `(p11, p12, p22, lambda1, lambda2)`, so the existence
//! of a negative-semidefinite point is a small semidefinite feasibility
//! problem over the convex slice `trace(P) = 2`, `P` positive semidefinite,
//! `lambda >= 0`. It is decided by a damped-Newton barrier method on the
//! epigraph form: minimize the spectral level `t` subject to the pencil
//! staying below `t I`, plus the slice constraints. Newton steps are affine
//! invariant, so the method is immune to the wide coefficient-scale spreads
//! the pencil reaches at extreme parameters, where first-order descent
//! crawls. Feasibility is always certified by a direct eigenvalue
//! evaluation at the reported witness; infeasibility by a dual bound
//! through unit-trace positive semidefinite multipliers, built both from
//! eigenvector mixtures at the centered iterate and from the barrier's own
//! central dual point, so every verdict is backed by a checkable quantity.
//! The search is fully deterministic: no randomness enters anywhere, and
//! iteration counts are reported as eigenvalue evaluations.
//!
//! Verdicts are guarded against numerically meaningless arithmetic: a
//! `Feasible` result additionally requires the round-off bound of the
//! eigenvalue evaluation at the witness's own scale to fit inside the
//! feasibility tolerance, and the barrier confines the multipliers to the
//! region where that holds. Without the guard, directions in which a
//! constraint matrix degenerates to negative semidefinite (the conditioning
//! limit `kappa = 1` is one) would let the multipliers grow unboundedly and
//! launder an infeasible pencil into a certificate built from pure
//! round-off.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certificate::{
    assemble_lmi, check_feasible, explicit_certificate, tau_formula, DEFAULT_FEAS_REL_TOL,
};
use crate::error::{Error, Result};
use crate::linalg::{eig2, eig4, eig4_full, mat4_mul, sym4_frobenius, Mat2, Sym4};

/// Default width at which the rate bisection stops.
pub const DEFAULT_BISECT_TOL: f64 = 1e-5;
/// Lower end of the rate interval the bisection can search. Rates whose
/// true boundary lies below this (e.g. the one-step-exact corner at full
/// relaxation with perfect conditioning) are reported at the bracket floor.
pub const RATE_BRACKET_LO: f64 = 1e-4;
/// Upper end of the searchable rate interval (and the probe rate for
/// frontier scans).
pub const RATE_BRACKET_HI: f64 = 1.0 - 1e-6;
/// Infeasibility is declared when the dual bound exceeds this multiple of
/// the feasibility tolerance.
const INFEAS_MARGIN: f64 = 10.0;
/// Geometric decay of the barrier parameter between centering stages.
const MU_DECAY: f64 = 0.15;
/// Total barrier degree: 4 (epigraph block) + 2 (weight matrix) + 2
/// (multiplier lower bounds) + 2 (multiplier caps). The gap between a
/// centered iterate and the true slice minimum is at most this times the
/// barrier parameter.
const BARRIER_NU: f64 = 10.0;
/// Multiple of machine epsilon times the assembled-matrix Frobenius norm
/// taken as the round-off bound of one direct eigenvalue evaluation
/// (assembly plus a symmetric 4x4 eigensolve). A `Feasible` verdict
/// requires this bound to fit inside the feasibility tolerance; otherwise
/// the evaluation could not distinguish a true witness from a false one.
const EVAL_TRUST_FACTOR: f64 = 16.0;
/// Fraction of the trust budget a single multiplier may consume. The
/// barrier walls the multipliers below `CAP_SAFETY * tolerance /
/// (EVAL_TRUST_FACTOR * epsilon * ||coeff||)`, which keeps every iterate's
/// matrix small enough for its eigenvalues to be meaningful at the
/// feasibility tolerance. For the default tolerance the caps sit around
/// `1e4`-`1e7`, far above any certificate arising away from degenerate
/// parameter corners.
const CAP_SAFETY: f64 = 0.25;
/// Newton decrement below which an iterate counts as centered.
const CENTER_TOL: f64 = 0.1;
/// Cap on Newton iterations per centering stage.
const INNER_CAP: usize = 60;
/// Cap on step halvings inside one Newton iteration.
const BACKTRACK_CAP: usize = 48;
/// Fraction of the feasibility tolerance at which the search stops early;
/// the verdict then re-checks the witness against the full tolerance by a
/// direct evaluation.
const FEAS_EXIT_FRACTION: f64 = 0.75;

/// The certificate matrix as an affine function of the five unknowns
/// `(p11, p12, p22, lambda1, lambda2)` at fixed `(alpha, rho0, kappa, tau)`.
#[derive(Debug, Clone)]
pub struct LmiPencil {
    pub alpha: f64,
    pub rho0: f64,
    pub kappa: f64,
    pub tau: f64,
    /// Constant term (zero for this family; stored for honesty of the
    /// affine representation).
    pub base: Sym4,
    /// One coefficient matrix per unknown.
    pub coeffs: [Sym4; 5],
    /// Largest coefficient Frobenius norm; tolerances scale with it.
    pub scale: f64,
}

impl LmiPencil {
    /// Expands the assembly into affine form by probing unit directions.
    pub fn new(alpha: f64, rho0: f64, kappa: f64, tau: f64) -> Result<Self> {
        let zero2: Mat2 = [[0.0; 2]; 2];
        let base = assemble_lmi(alpha, rho0, kappa, tau, &zero2, 0.0, 0.0)?;
        let units: [(Mat2, f64, f64); 5] = [
            ([[1.0, 0.0], [0.0, 0.0]], 0.0, 0.0),
            ([[0.0, 1.0], [1.0, 0.0]], 0.0, 0.0),
            ([[0.0, 0.0], [0.0, 1.0]], 0.0, 0.0),
            (zero2, 1.0, 0.0),
            (zero2, 0.0, 1.0),
        ];
        let mut coeffs = [[[0.0; 4]; 4]; 5];
        let mut scale: f64 = 0.0;
        for (k, (p, l1, l2)) in units.iter().enumerate() {
            let m = assemble_lmi(alpha, rho0, kappa, tau, p, *l1, *l2)?;
            for i in 0..4 {
                for j in 0..4 {
                    coeffs[k][i][j] = m[i][j] - base[i][j];
                }
            }
            scale = scale.max(sym4_frobenius(&coeffs[k]));
        }
        Ok(LmiPencil {
            alpha,
            rho0,
            kappa,
            tau,
            base,
            coeffs,
            scale: scale.max(f64::MIN_POSITIVE),
        })
    }

    /// Evaluates the pencil at a point of the unknown space.
    pub fn evaluate(&self, v: &[f64; 5]) -> Sym4 {
        let mut m = self.base;
        for (k, c) in self.coeffs.iter().enumerate() {
            let w = v[k];
            if w == 0.0 {
                continue;
            }
            for i in 0..4 {
                for j in 0..4 {
                    m[i][j] += w * c[i][j];
                }
            }
        }
        m
    }
}

/// Verdict of a feasibility solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeasStatus {
    /// A witness with certified near-zero largest eigenvalue was found.
    Feasible,
    /// A dual bound proves no witness exists on the search slice.
    Infeasible,
    /// The evaluation budget or the barrier's resolution ran out before
    /// either certificate appeared (in practice only within a vanishing
    /// neighborhood of the feasibility boundary).
    Inconclusive,
}

/// Outcome of a feasibility solve, including the certifying quantities.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FeasibilityResult {
    pub status: FeasStatus,
    /// Best point found, as `(p11, p12, p22, lambda1, lambda2)`.
    pub witness: [f64; 5],
    /// Largest eigenvalue of the pencil at the witness (from a direct
    /// eigenvalue evaluation, not an estimate).
    pub certified_lambda_max: f64,
    /// Best valid dual lower bound on the minimal largest eigenvalue.
    pub dual_lower_bound: Option<f64>,
    /// Eigenvalue evaluations spent.
    pub iterations: usize,
}

/// Tuning knobs for the feasibility solver.
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Relative feasibility tolerance (scaled by the pencil coefficient norm).
    pub tolerance: f64,
    /// Budget in eigenvalue evaluations.
    pub max_iters: usize,
    /// Eigenvalue floor for the weight matrix `P` on the trace-2 slice.
    /// The default of `1e-6` keeps every accepted weight matrix uniformly
    /// positive definite, so a certified rate always controls the full
    /// observable norm rather than a seminorm. Zero relaxes the slice to
    /// plain positive semidefiniteness, whose boundary contains the
    /// degenerate optimal weights at the relaxation limit `alpha = 2`.
    pub psd_floor: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { tolerance: 1e-9, max_iters: 50_000, psd_floor: 1e-6 }
    }
}

/// Exact Euclidean projection onto the search slice: `lambda >= 0`,
/// `trace(P) = 2`, and both eigenvalues of `P` at least `floor`.
fn project(v: &mut [f64; 5], floor: f64) {
    v[3] = v[3].max(0.0);
    v[4] = v[4].max(0.0);
    let gap = 0.5 * (v[0] - v[2]);
    let off = v[1];
    let rad = (gap * gap + off * off).sqrt();
    // After shifting onto the trace-2 plane the eigenvalues are 1 -+ rad;
    // clamping the small one to the floor while preserving eigenvectors is
    // the exact projection onto this spectral set.
    let mut a = 1.0 - rad;
    let b = if a < floor {
        a = floor;
        2.0 - floor
    } else {
        1.0 + rad
    };
    if rad <= f64::MIN_POSITIVE {
        v[0] = 1.0;
        v[1] = 0.0;
        v[2] = 1.0;
        return;
    }
    // Cancellation-safe unit eigenvector for the larger eigenvalue.
    let (ux, uy) = if gap >= 0.0 { (rad + gap, off) } else { (off, rad - gap) };
    let n = (ux * ux + uy * uy).sqrt();
    let (ux, uy) = (ux / n, uy / n);
    let delta = b - a;
    v[0] = a + delta * ux * ux;
    v[1] = delta * ux * uy;
    v[2] = a + delta * uy * uy;
}

/// Frobenius inner product of two 4x4 matrices.
fn mat4_inner(a: &Sym4, b: &Sym4) -> f64 {
    let mut s = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            s += a[i][j] * b[i][j];
        }
    }
    s
}

/// Builds the density-matrix candidate `sum_i w_i q_i q_i^T
/// + b (q_top q_2nd^T + q_2nd q_top^T)` from the eigenvector basis.
fn density(vecs: &[[f64; 4]; 4], w: &[f64; 4], b: f64) -> Sym4 {
    let mut z = [[0.0; 4]; 4];
    for (wi, q) in w.iter().zip(vecs.iter()) {
        if *wi == 0.0 {
            continue;
        }
        for i in 0..4 {
            for j in 0..4 {
                z[i][j] += wi * q[i] * q[j];
            }
        }
    }
    if b != 0.0 {
        let (qa, qb) = (&vecs[3], &vecs[2]);
        for i in 0..4 {
            for j in 0..4 {
                z[i][j] += b * (qa[i] * qb[j] + qb[i] * qa[j]);
            }
        }
    }
    z
}

/// Minimum over the slice (with a zero eigenvalue floor) of the affine
/// minorant `<Z, M(v)>` for a unit-trace positive semidefinite `Z`.
/// Returns negative infinity when the minorant is unbounded below, which
/// happens when a multiplier coefficient points downhill: the multipliers
/// are only bounded on one side.
fn minorant_bound(pencil: &LmiPencil, z: &Sym4) -> f64 {
    let mut gz = [0.0; 5];
    for (k, c) in pencil.coeffs.iter().enumerate() {
        gz[k] = mat4_inner(z, c);
    }
    if gz[3] < 0.0 || gz[4] < 0.0 {
        return f64::NEG_INFINITY;
    }
    // Over `trace(P) = 2`, `P >= 0` the minimum of `<G, P>` is twice the
    // smallest eigenvalue of `G`; the multiplier part minimizes to zero.
    let gp: Mat2 = [[gz[0], 0.5 * gz[1]], [0.5 * gz[1], gz[2]]];
    mat4_inner(z, &pencil.base) + 2.0 * eig2(&gp)[0]
}

/// Valid dual lower bound on `min over the slice of lambda_max(M(v))`.
///
/// Any unit-trace positive semidefinite `Z` minorizes the objective:
/// `lambda_max(M(v)) >= <Z, M(v)>`, which is affine in `v`, and its minimum
/// over the slice has a closed form. Candidates for `Z` are built from the
/// eigenvectors at the current point — softened mixtures across temperature
/// scales plus a locally refined grid over the top-two eigenspace including
/// the cross term (the optimal dual lives in the top eigenspace but need
/// not be diagonal in the computed eigenbasis) — plus an optional caller
/// supplied matrix, used for the barrier's central dual point. The bound is
/// taken over the slice with a zero eigenvalue floor, so it certifies
/// infeasibility for every floored sub-slice as well. Returns negative
/// infinity when no candidate yields a valid bound.
fn dual_bound(
    pencil: &LmiPencil,
    vals: &[f64; 4],
    vecs: &[[f64; 4]; 4],
    extra: Option<&Sym4>,
) -> f64 {
    let spread = (vals[3] - vals[0]).max(1e-300);
    let mut best = minorant_bound(pencil, &density(vecs, &[0.0, 0.0, 0.0, 1.0], 0.0));
    if let Some(z) = extra {
        best = best.max(minorant_bound(pencil, z));
    }
    for factor in [1.0, 1e-1, 1e-2, 1e-3, 1e-4] {
        let mu = factor * spread;
        let mut w = [0.0; 4];
        let mut s = 0.0;
        for i in 0..4 {
            w[i] = ((vals[i] - vals[3]) / mu).exp();
            s += w[i];
        }
        for wi in &mut w {
            *wi /= s;
        }
        best = best.max(minorant_bound(pencil, &density(vecs, &w, 0.0)));
    }

    // Top-two eigenspace mixtures Z = theta q_top q_top^T
    // + (1 - theta) q_2nd q_2nd^T + b (q_top q_2nd^T + q_2nd q_top^T),
    // positive semidefinite exactly when b^2 <= theta (1 - theta).
    let top_pair = |theta: f64, beta: f64| -> f64 {
        let b = beta * (theta * (1.0 - theta)).max(0.0).sqrt();
        minorant_bound(pencil, &density(vecs, &[0.0, 0.0, 1.0 - theta, theta], b))
    };
    let (mut theta, mut beta) = (1.0, 0.0);
    let mut pair_best = f64::NEG_INFINITY;
    for ti in 0..=20 {
        let t = f64::from(ti) / 20.0;
        for bi in -4i32..=4 {
            let be = f64::from(bi) / 4.0;
            let lb = top_pair(t, be);
            if lb > pair_best {
                pair_best = lb;
                theta = t;
                beta = be;
            }
        }
    }
    let mut step = 0.05;
    for _ in 0..16 {
        let mut moved = false;
        for (dt, db) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
            let t2 = (theta + dt).clamp(0.0, 1.0);
            let b2 = (beta + db).clamp(-1.0, 1.0);
            let lb = top_pair(t2, b2);
            if lb > pair_best {
                pair_best = lb;
                theta = t2;
                beta = b2;
                moved = true;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    best.max(pair_best)
}

/// Solves a 5x5 linear system by Gaussian elimination with partial
/// pivoting. Returns `None` on (numerical) singularity.
fn solve5(mut a: [[f64; 5]; 5], mut b: [f64; 5]) -> Option<[f64; 5]> {
    for col in 0..5 {
        let mut piv = col;
        for r in col + 1..5 {
            if a[r][col].abs() > a[piv][col].abs() {
                piv = r;
            }
        }
        if !(a[piv][col].abs() > 1e-300) {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        let d = a[col][col];
        for r in col + 1..5 {
            let f = a[r][col] / d;
            if f == 0.0 {
                continue;
            }
            for c in col..5 {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = [0.0; 5];
    for i in (0..5).rev() {
        let mut s = b[i];
        for j in i + 1..5 {
            s -= a[i][j] * x[j];
        }
        x[i] = s / a[i][i];
    }
    if x.iter().all(|c| c.is_finite()) {
        Some(x)
    } else {
        None
    }
}

/// Newton direction `H d = -g`, retried with growing diagonal
/// regularization if the plain solve fails or is not a descent direction.
fn newton_dir(h: &[[f64; 5]; 5], g: &[f64; 5]) -> Option<[f64; 5]> {
    let mut rhs = [0.0; 5];
    for (r, gi) in rhs.iter_mut().zip(g.iter()) {
        *r = -gi;
    }
    let mut ridge = 0.0;
    for _ in 0..3 {
        let mut hh = *h;
        if ridge > 0.0 {
            for (i, row) in hh.iter_mut().enumerate() {
                row[i] += ridge * (1.0 + row[i].abs());
            }
        }
        if let Some(d) = solve5(hh, rhs) {
            let desc: f64 = d.iter().zip(g.iter()).map(|(a, b)| a * b).sum();
            if desc < 0.0 {
                return Some(d);
            }
        }
        ridge = if ridge == 0.0 { 1e-10 } else { ridge * 1e4 };
    }
    None
}

/// Snapshot of one interior point of the barrier domain.
struct Point {
    /// Eigenvalues of the epigraph block `t I - M(v)`, ascending; all
    /// positive inside the domain.
    s_vals: [f64; 4],
    /// Matching unit eigenvectors (shared with the pencil itself, whose
    /// eigenvalues are `t` minus these in reversed order).
    s_vecs: [[f64; 4]; 4],
    /// Log-determinant of the epigraph block.
    logdet_s: f64,
    /// Floored weight-matrix block and its determinant.
    q: Mat2,
    q_det: f64,
}

/// Outcome of one centering stage.
enum Centering {
    /// Newton decrement dropped below the centering tolerance (or no
    /// further progress was possible); the point is on the central path.
    Centered(Point),
    /// The incumbent's eigenvalue crossed the early-exit threshold.
    FoundWitness,
    /// The evaluation budget ran out.
    OutOfBudget,
}

/// Damped-Newton barrier solver in coefficient-normalized units over the
/// free variables `w = (p11, p12, lambda1, lambda2, t)`, with `p22`
/// eliminated through the trace constraint.
struct Barrier<'a> {
    pencil: &'a LmiPencil,
    /// Normalized coefficient matrices for the free variables.
    d: [Sym4; 4],
    /// Normalized constant term (absorbs the eliminated `p22`).
    b0: Sym4,
    floor: f64,
    /// Upper walls for the two multipliers, sized so every in-domain
    /// iterate stays where eigenvalue evaluations are trustworthy at the
    /// feasibility tolerance.
    cap: [f64; 2],
    evals: usize,
    max_evals: usize,
    /// Lowest normalized pencil eigenvalue seen so far, with its witness
    /// in `(p11, p12, p22, lambda1, lambda2)` form.
    best_lam: f64,
    best_witness: [f64; 5],
}

impl<'a> Barrier<'a> {
    fn new(pencil: &'a LmiPencil, floor: f64, tolerance: f64, max_evals: usize) -> Self {
        let s = pencil.scale;
        let mut d = [[[0.0; 4]; 4]; 4];
        let mut b0 = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                d[0][i][j] = (pencil.coeffs[0][i][j] - pencil.coeffs[2][i][j]) / s;
                d[1][i][j] = pencil.coeffs[1][i][j] / s;
                d[2][i][j] = pencil.coeffs[3][i][j] / s;
                d[3][i][j] = pencil.coeffs[4][i][j] / s;
                b0[i][j] = (pencil.base[i][j] + 2.0 * pencil.coeffs[2][i][j]) / s;
            }
        }
        let trust = CAP_SAFETY * tolerance / (EVAL_TRUST_FACTOR * f64::EPSILON);
        let cap = [
            trust / sym4_frobenius(&d[2]).max(f64::MIN_POSITIVE),
            trust / sym4_frobenius(&d[3]).max(f64::MIN_POSITIVE),
        ];
        Barrier {
            pencil,
            d,
            b0,
            floor,
            cap,
            evals: 0,
            max_evals,
            best_lam: f64::INFINITY,
            best_witness: [1.0, 0.0, 1.0, 0.0, 0.0],
        }
    }

    fn witness_of(w: &[f64; 5]) -> [f64; 5] {
        [w[0], w[1], 2.0 - w[0], w[2], w[3]]
    }

    /// Normalized pencil value at the free variables (the epigraph level is
    /// ignored).
    fn pencil_at(&self, w: &[f64; 5]) -> Sym4 {
        let mut m = self.b0;
        for (k, dk) in self.d.iter().enumerate() {
            let c = w[k];
            if c == 0.0 {
                continue;
            }
            for i in 0..4 {
                for j in 0..4 {
                    m[i][j] += c * dk[i][j];
                }
            }
        }
        m
    }

    /// Largest normalized pencil eigenvalue at the free variables; updates
    /// the incumbent.
    fn top_at(&mut self, w: &[f64; 5]) -> f64 {
        self.evals += 1;
        let lam = eig4(&self.pencil_at(w))[3];
        if lam < self.best_lam {
            self.best_lam = lam;
            self.best_witness = Self::witness_of(w);
        }
        lam
    }

    /// Largest eigenvalue of the raw (unnormalized) pencil at a witness,
    /// together with the round-off bound of that evaluation.
    fn raw_top(&mut self, v: &[f64; 5]) -> (f64, f64) {
        self.evals += 1;
        let m = self.pencil.evaluate(v);
        let err = EVAL_TRUST_FACTOR * f64::EPSILON * sym4_frobenius(&m);
        (eig4(&m)[3], err)
    }

    /// Evaluates the barrier blocks at `w`; `None` outside the domain.
    /// Every call performs (and counts) one eigenvalue evaluation and
    /// updates the incumbent.
    fn eval(&mut self, w: &[f64; 5]) -> Option<Point> {
        self.evals += 1;
        let m = self.pencil_at(w);
        let mut s_mat = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                s_mat[i][j] = -m[i][j];
            }
            s_mat[i][i] += w[4];
        }
        let (s_vals, s_vecs) = eig4_full(&s_mat);
        let lam = w[4] - s_vals[0];
        if lam < self.best_lam {
            self.best_lam = lam;
            self.best_witness = Self::witness_of(w);
        }
        let q: Mat2 = [[w[0] - self.floor, w[1]], [w[1], 2.0 - w[0] - self.floor]];
        let q_det = q[0][0] * q[1][1] - q[0][1] * q[1][0];
        if !(s_vals[0] > 0.0
            && q[0][0] > 0.0
            && q_det > 0.0
            && w[2] > 0.0
            && w[3] > 0.0
            && w[2] < self.cap[0]
            && w[3] < self.cap[1])
        {
            return None;
        }
        let logdet_s = s_vals.iter().map(|x| x.ln()).sum();
        Some(Point { s_vals, s_vecs, logdet_s, q, q_det })
    }

    /// Barrier-augmented objective `t / mu + phi(w)`.
    fn merit(&self, w: &[f64; 5], pt: &Point, mu: f64) -> f64 {
        w[4] / mu - pt.logdet_s - pt.q_det.ln() - w[2].ln() - w[3].ln()
            - (self.cap[0] - w[2]).ln()
            - (self.cap[1] - w[3]).ln()
    }

    /// Gradient and Hessian of the barrier-augmented objective.
    fn grad_hess(&self, w: &[f64; 5], pt: &Point, mu: f64) -> ([f64; 5], [[f64; 5]; 5]) {
        // Inverse of the epigraph block from its spectrum.
        let mut sinv = [[0.0; 4]; 4];
        for k in 0..4 {
            let c = 1.0 / pt.s_vals[k];
            let u = &pt.s_vecs[k];
            for i in 0..4 {
                for j in 0..4 {
                    sinv[i][j] += c * u[i] * u[j];
                }
            }
        }
        let a: [Sym4; 4] = std::array::from_fn(|j| mat4_mul(&sinv, &self.d[j]));
        let tr = |x: &Sym4| x[0][0] + x[1][1] + x[2][2] + x[3][3];
        let tr_prod = |x: &Sym4, y: &Sym4| {
            let mut s = 0.0;
            for i in 0..4 {
                for l in 0..4 {
                    s += x[i][l] * y[l][i];
                }
            }
            s
        };
        let mut g = [0.0; 5];
        let mut h = [[0.0; 5]; 5];
        for j in 0..4 {
            g[j] = tr(&a[j]);
            for k in j..4 {
                let v = tr_prod(&a[j], &a[k]);
                h[j][k] = v;
                h[k][j] = v;
            }
            let v = -tr_prod(&a[j], &sinv);
            h[j][4] = v;
            h[4][j] = v;
        }
        g[4] = 1.0 / mu - tr(&sinv);
        h[4][4] = tr_prod(&sinv, &sinv);

        // Weight-matrix block, in 2x2 closed forms. The derivatives of the
        // block in the two free coordinates are diag(1, -1) and the
        // off-diagonal flip.
        let qi: Mat2 = [
            [pt.q[1][1] / pt.q_det, -pt.q[0][1] / pt.q_det],
            [-pt.q[1][0] / pt.q_det, pt.q[0][0] / pt.q_det],
        ];
        let t0: Mat2 = [[qi[0][0], -qi[0][1]], [qi[1][0], -qi[1][1]]];
        let t1: Mat2 = [[qi[0][1], qi[0][0]], [qi[1][1], qi[1][0]]];
        let tr2 = |x: &Mat2, y: &Mat2| {
            x[0][0] * y[0][0] + x[0][1] * y[1][0] + x[1][0] * y[0][1] + x[1][1] * y[1][1]
        };
        g[0] -= t0[0][0] + t0[1][1];
        g[1] -= t1[0][0] + t1[1][1];
        h[0][0] += tr2(&t0, &t0);
        let c01 = tr2(&t0, &t1);
        h[0][1] += c01;
        h[1][0] += c01;
        h[1][1] += tr2(&t1, &t1);

        // Multiplier bounds: lower at zero, upper at the trust walls.
        g[2] -= 1.0 / w[2];
        g[3] -= 1.0 / w[3];
        h[2][2] += 1.0 / (w[2] * w[2]);
        h[3][3] += 1.0 / (w[3] * w[3]);
        let r2 = 1.0 / (self.cap[0] - w[2]);
        let r3 = 1.0 / (self.cap[1] - w[3]);
        g[2] += r2;
        g[3] += r3;
        h[2][2] += r2 * r2;
        h[3][3] += r3 * r3;
        (g, h)
    }

    /// Runs damped Newton at fixed barrier parameter until the decrement
    /// falls below the centering tolerance.
    fn center(&mut self, w: &mut [f64; 5], mu: f64, feas_exit: f64) -> Centering {
        let Some(mut cur) = self.eval(w) else {
            // Unreachable from an interior point; treated as exhaustion.
            return Centering::OutOfBudget;
        };
        for _ in 0..INNER_CAP {
            if self.best_lam <= feas_exit {
                return Centering::FoundWitness;
            }
            if self.evals >= self.max_evals {
                return Centering::OutOfBudget;
            }
            let (g, h) = self.grad_hess(w, &cur, mu);
            let Some(dir) = newton_dir(&h, &g) else {
                return Centering::Centered(cur);
            };
            let lam2 = -dir.iter().zip(g.iter()).map(|(a, b)| a * b).sum::<f64>();
            if !(lam2 > CENTER_TOL * CENTER_TOL) {
                return Centering::Centered(cur);
            }
            let lam_nt = lam2.sqrt();
            let mut step = if lam_nt > 0.25 { 1.0 / (1.0 + lam_nt) } else { 1.0 };
            let f_cur = self.merit(w, &cur, mu);
            let mut accepted = false;
            for _ in 0..BACKTRACK_CAP {
                let mut w_try = *w;
                for (wt, di) in w_try.iter_mut().zip(dir.iter()) {
                    *wt += step * di;
                }
                if let Some(pt) = self.eval(&w_try) {
                    if self.merit(&w_try, &pt, mu) <= f_cur - 0.01 * step * lam2 {
                        *w = w_try;
                        cur = pt;
                        accepted = true;
                        break;
                    }
                }
                if self.evals >= self.max_evals {
                    return Centering::OutOfBudget;
                }
                step *= 0.5;
            }
            if !accepted {
                return Centering::Centered(cur);
            }
        }
        Centering::Centered(cur)
    }
}

/// Searches the slice for a witness making the pencil negative semidefinite.
///
/// Runs the damped-Newton barrier method on the epigraph form, tightening
/// the barrier parameter geometrically. Returns `Feasible` with a witness
/// whose largest eigenvalue is certified below `tolerance * scale` by a
/// direct evaluation whose own round-off bound also fits inside that
/// tolerance (witnesses too large to evaluate meaningfully are never
/// accepted), `Infeasible` once a dual bound proves the minimum stays
/// decisively positive, or `Inconclusive` when the budget or the barrier's
/// resolution runs out first (near the feasibility boundary, or in
/// degenerate corners where any witness would need multipliers beyond the
/// trusted range). Deterministic for fixed inputs; an optional seed
/// witness is projected onto the slice, checked outright, and then warm
/// starts the interior iteration.
pub fn solve_feasibility(
    pencil: &LmiPencil,
    opts: &SolveOptions,
    seed_witness: Option<&[f64; 5]>,
) -> Result<FeasibilityResult> {
    if !(opts.tolerance > 0.0 && opts.tolerance < 1.0) {
        return Err(Error::Config(format!(
            "feasibility tolerance must lie in (0, 1), got {}",
            opts.tolerance
        )));
    }
    if !(opts.psd_floor >= 0.0 && opts.psd_floor < 0.5) {
        return Err(Error::Config(format!(
            "psd floor must lie in [0, 0.5), got {}",
            opts.psd_floor
        )));
    }
    if opts.max_iters == 0 {
        return Err(Error::Config("the solver needs a positive budget".into()));
    }
    let tol_abs = opts.tolerance * pencil.scale;
    let mut bar = Barrier::new(pencil, opts.psd_floor, opts.tolerance, opts.max_iters);

    // A projected seed may already be a witness; check it outright. The
    // inequality is homogeneous in the witness, so fix the scale first
    // (renormalize the weight trace to 2) and only then project — plain
    // projection of a scaled witness would shift it by a multiple of the
    // identity and deform its shape. The check only counts when its own
    // round-off bound fits inside the tolerance: a seed with runaway
    // multipliers produces eigenvalues made of noise, which must never
    // mint a certificate.
    let mut start = seed_witness.copied().unwrap_or([1.0, 0.0, 1.0, 0.5, 0.5]);
    let trace = start[0] + start[2];
    if trace > 0.0 && trace.is_finite() {
        for v in start.iter_mut() {
            *v *= 2.0 / trace;
        }
    }
    project(&mut start, opts.psd_floor);
    let (lam_seed, seed_err) = bar.raw_top(&start);
    if lam_seed <= tol_abs && seed_err <= tol_abs {
        return Ok(FeasibilityResult {
            status: FeasStatus::Feasible,
            witness: start,
            certified_lambda_max: lam_seed,
            dual_lower_bound: None,
            iterations: bar.evals,
        });
    }
    if seed_err <= tol_abs && lam_seed / pencil.scale < bar.best_lam {
        bar.best_lam = lam_seed / pencil.scale;
        bar.best_witness = start;
    }

    // Interior start: blend the weight matrix toward the identity, lift
    // the multipliers off their lower bounds and pull them under the trust
    // walls, then set the epigraph level one unit above the current top
    // eigenvalue.
    let blend = (1.5 * opts.psd_floor).clamp(0.05, 0.9);
    let mut w = [
        (1.0 - blend) * start[0] + blend,
        (1.0 - blend) * start[1],
        start[3].max(0.05).min(0.5 * bar.cap[0]),
        start[4].max(0.05).min(0.5 * bar.cap[1]),
        0.0,
    ];
    w[4] = bar.top_at(&w) + 1.0;

    let feas_exit = FEAS_EXIT_FRACTION * opts.tolerance;
    let mu_min = (0.05 * opts.tolerance / BARRIER_NU).max(1e-13);
    let mut lb_best = f64::NEG_INFINITY;
    let mut mu = 1.0;
    loop {
        match bar.center(&mut w, mu, feas_exit) {
            Centering::FoundWitness => {
                let witness = bar.best_witness;
                let (lam_raw, eval_err) = bar.raw_top(&witness);
                if lam_raw <= tol_abs && eval_err <= tol_abs {
                    return Ok(FeasibilityResult {
                        status: FeasStatus::Feasible,
                        witness,
                        certified_lambda_max: lam_raw,
                        dual_lower_bound: finite_or_none(lb_best),
                        iterations: bar.evals,
                    });
                }
                // The raw re-check disagreed beyond the exit margin (pure
                // roundoff pathology, or an untrustworthy scale); raise the
                // incumbent so the search resumes instead of spinning.
                bar.best_lam = lam_raw.max(eval_err) / pencil.scale;
            }
            Centering::OutOfBudget => break,
            Centering::Centered(pt) => {
                // The epigraph block shares eigenvectors with the pencil,
                // with eigenvalues reversed: order them for the dual bound.
                let mut vals_m = [0.0; 4];
                let mut vecs_m = [[0.0; 4]; 4];
                for k in 0..4 {
                    vals_m[k] = w[4] - pt.s_vals[3 - k];
                    vecs_m[k] = pt.s_vecs[3 - k];
                }
                // The central dual point: the normalized inverse of the
                // epigraph block (exactly unit trace at perfect centering).
                let mut z = [[0.0; 4]; 4];
                let mut tr_sinv = 0.0;
                for k in 0..4 {
                    let c = 1.0 / pt.s_vals[k];
                    tr_sinv += c;
                    let u = &pt.s_vecs[k];
                    for i in 0..4 {
                        for j in 0..4 {
                            z[i][j] += c * u[i] * u[j];
                        }
                    }
                }
                for row in &mut z {
                    for x in row.iter_mut() {
                        *x /= tr_sinv;
                    }
                }
                lb_best = lb_best.max(dual_bound(pencil, &vals_m, &vecs_m, Some(&z)));
                if lb_best >= INFEAS_MARGIN * tol_abs {
                    return Ok(FeasibilityResult {
                        status: FeasStatus::Infeasible,
                        witness: bar.best_witness,
                        certified_lambda_max: bar.best_lam * pencil.scale,
                        dual_lower_bound: finite_or_none(lb_best),
                        iterations: bar.evals,
                    });
                }
                if mu <= mu_min {
                    break;
                }
                mu *= MU_DECAY;
            }
        }
        if bar.evals >= bar.max_evals {
            break;
        }
    }

    let witness = bar.best_witness;
    let (lam_raw, _) = bar.raw_top(&witness);
    Ok(FeasibilityResult {
        status: FeasStatus::Inconclusive,
        witness,
        certified_lambda_max: lam_raw,
        dual_lower_bound: finite_or_none(lb_best),
        iterations: bar.evals,
    })
}

fn finite_or_none(x: f64) -> Option<f64> {
    if x.is_finite() {
        Some(x)
    } else {
        None
    }
}

/// One probe of the rate bisection.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TauProbe {
    pub tau: f64,
    pub status: FeasStatus,
    pub lambda_max: f64,
    pub dual_lower_bound: Option<f64>,
    pub iterations: usize,
}

/// Result of bisecting for the smallest certifiable rate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MinimalTauResult {
    /// Midpoint of the final bracket.
    pub tau: f64,
    /// Final `(lo, hi)` bracket; `hi` is always certified feasible.
    pub bracket: (f64, f64),
    /// Every probe in order.
    pub probes: Vec<TauProbe>,
    /// Whether the probe verdicts were monotone in the rate (no certified
    /// infeasibility above a certified feasibility).
    pub monotonic: bool,
}

/// Bisects for the smallest rate the numerical search can certify at the
/// given normalized parameters.
///
/// The upper bracket end is verified feasible first; each feasible probe
/// donates its witness as the warm start for the next. Probes that time out
/// are treated like infeasible ones for bracketing (the bracket moves up),
/// which keeps the certified-feasible invariant on the upper end.
pub fn minimal_tau(
    alpha: f64,
    rho0: f64,
    kappa: f64,
    bisect_tol: f64,
) -> Result<MinimalTauResult> {
    if !(bisect_tol > 0.0 && bisect_tol < 1.0) {
        return Err(Error::Config(format!(
            "bisection tolerance must lie in (0, 1), got {bisect_tol}"
        )));
    }
    let opts = SolveOptions::default();
    let mut probes = Vec::new();

    let hi_pencil = LmiPencil::new(alpha, rho0, kappa, RATE_BRACKET_HI)?;
    let hi_res = solve_feasibility(&hi_pencil, &opts, None)?;
    probes.push(TauProbe {
        tau: RATE_BRACKET_HI,
        status: hi_res.status,
        lambda_max: hi_res.certified_lambda_max,
        dual_lower_bound: hi_res.dual_lower_bound,
        iterations: hi_res.iterations,
    });
    if hi_res.status != FeasStatus::Feasible {
        return Err(Error::SearchFailed(format!(
            "no certificate found even at rate {RATE_BRACKET_HI} for alpha={alpha}, \
             rho0={rho0}, kappa={kappa}"
        )));
    }
    let mut warm = hi_res.witness;
    let (mut lo, mut hi) = (RATE_BRACKET_LO, RATE_BRACKET_HI);
    while hi - lo > bisect_tol {
        let mid = 0.5 * (lo + hi);
        let pencil = LmiPencil::new(alpha, rho0, kappa, mid)?;
        let res = solve_feasibility(&pencil, &opts, Some(&warm))?;
        probes.push(TauProbe {
            tau: mid,
            status: res.status,
            lambda_max: res.certified_lambda_max,
            dual_lower_bound: res.dual_lower_bound,
            iterations: res.iterations,
        });
        if res.status == FeasStatus::Feasible {
            hi = mid;
            warm = res.witness;
        } else {
            lo = mid;
        }
    }

    let mut monotonic = true;
    for a in &probes {
        for b in &probes {
            if a.tau < b.tau
                && a.status == FeasStatus::Feasible
                && b.status == FeasStatus::Infeasible
            {
                monotonic = false;
            }
        }
    }
    Ok(MinimalTauResult { tau: 0.5 * (lo + hi), bracket: (lo, hi), probes, monotonic })
}

/// One cell of a feasibility frontier scan.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FrontierCell {
    pub kappa: f64,
    pub status: FeasStatus,
    pub lambda_max: f64,
    pub dual_lower_bound: Option<f64>,
    pub iterations: usize,
}

/// Frontier scan result over an ascending condition-number grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrontierResult {
    pub alpha: f64,
    pub rho0: f64,
    pub cells: Vec<FrontierCell>,
    /// Largest grid point at which a certificate was found.
    pub largest_feasible: Option<f64>,
    /// Whether the feasible cells form a prefix of the grid.
    pub contiguous: bool,
}

/// Scans an ascending condition-number grid for existence of any rate
/// certificate (probing at a rate just below 1, which by monotonicity in
/// the rate decides existence for the whole range).
pub fn feasibility_frontier(alpha: f64, rho0: f64, kappas: &[f64]) -> Result<FrontierResult> {
    if kappas.is_empty() {
        return Err(Error::EmptyGrid("frontier scan needs at least one kappa".into()));
    }
    if kappas[0] < 1.0 {
        return Err(Error::domain(format!(
            "condition numbers must be at least 1, got {}",
            kappas[0]
        )));
    }
    for w in kappas.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::domain(
                "the frontier kappa grid must be strictly increasing",
            ));
        }
    }
    let opts = SolveOptions::default();
    let mut cells = Vec::with_capacity(kappas.len());
    let mut warm: Option<[f64; 5]> = None;
    for &kappa in kappas {
        let pencil = LmiPencil::new(alpha, rho0, kappa, RATE_BRACKET_HI)?;
        let res = solve_feasibility(&pencil, &opts, warm.as_ref())?;
        if res.status == FeasStatus::Feasible {
            warm = Some(res.witness);
        }
        cells.push(FrontierCell {
            kappa,
            status: res.status,
            lambda_max: res.certified_lambda_max,
            dual_lower_bound: res.dual_lower_bound,
            iterations: res.iterations,
        });
    }
    let largest_feasible = cells
        .iter()
        .filter(|c| c.status == FeasStatus::Feasible)
        .map(|c| c.kappa)
        .fold(None, |acc: Option<f64>, k| Some(acc.map_or(k, |a| a.max(k))));
    let mut contiguous = true;
    let mut seen_nonfeasible = false;
    for c in &cells {
        if c.status == FeasStatus::Feasible {
            if seen_nonfeasible {
                contiguous = false;
            }
        } else {
            seen_nonfeasible = true;
        }
    }
    Ok(FrontierResult { alpha, rho0, cells, largest_feasible, contiguous })
}

/// One row of a parameter sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub rho0: f64,
    pub kappa: f64,
    pub tau_formula: Option<f64>,
    pub tau_bisect: Option<f64>,
    pub lambda1: Option<f64>,
    pub lambda2: Option<f64>,
    pub lambda_max: Option<f64>,
    pub status: String,
}

/// Sweep configuration.
#[derive(Debug, Clone, Copy)]
pub struct SweepOptions {
    /// Also bisect for the minimal certifiable rate per cell (slow).
    pub bisect: bool,
    pub bisect_tol: f64,
    /// Relative tolerance for the dual-route certificate check.
    pub feas_rel_tol: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            bisect: false,
            bisect_tol: DEFAULT_BISECT_TOL,
            feas_rel_tol: DEFAULT_FEAS_REL_TOL,
        }
    }
}

/// Evaluates the certificate family over a parameter grid (in parallel,
/// with deterministic row order: alphas outermost, kappas innermost).
pub fn sweep(
    alphas: &[f64],
    rho0s: &[f64],
    kappas: &[f64],
    opts: &SweepOptions,
) -> Result<Vec<SweepRow>> {
    if alphas.is_empty() {
        return Err(Error::EmptyGrid("sweep needs at least one alpha".into()));
    }
    if rho0s.is_empty() {
        return Err(Error::EmptyGrid("sweep needs at least one rho0".into()));
    }
    if kappas.is_empty() {
        return Err(Error::EmptyGrid("sweep needs at least one kappa".into()));
    }
    let mut cells = Vec::with_capacity(alphas.len() * rho0s.len() * kappas.len());
    for &a in alphas {
        for &r in rho0s {
            for &k in kappas {
                cells.push((a, r, k));
            }
        }
    }
    Ok(cells
        .into_par_iter()
        .map(|(alpha, rho0, kappa)| sweep_cell(alpha, rho0, kappa, opts))
        .collect())
}

fn sweep_cell(alpha: f64, rho0: f64, kappa: f64, opts: &SweepOptions) -> SweepRow {
    let mut row = SweepRow {
        alpha,
        rho0,
        kappa,
        tau_formula: None,
        tau_bisect: None,
        lambda1: None,
        lambda2: None,
        lambda_max: None,
        status: String::new(),
    };
    if !(alpha > 0.0 && rho0 > 0.0 && kappa >= 1.0) {
        row.status = "invalid_parameters".into();
        return row;
    }
    if alpha <= 2.0 {
        row.tau_formula = tau_formula(alpha, rho0, kappa).ok();
        if kappa > 1.0 {
            match explicit_certificate(alpha, rho0, kappa)
                .and_then(|cert| Ok((cert, cert.assemble()?)))
            {
                Ok((cert, m)) => {
                    row.lambda1 = Some(cert.lambda1);
                    row.lambda2 = Some(cert.lambda2);
                    match check_feasible(&m, opts.feas_rel_tol) {
                        Ok(check) => {
                            row.lambda_max = Some(check.lambda_max);
                            row.status = if check.feasible {
                                "certified".into()
                            } else {
                                "check_failed".into()
                            };
                        }
                        Err(_) => row.status = "route_disagreement".into(),
                    }
                }
                Err(_) => row.status = "certificate_error".into(),
            }
        } else {
            row.status = "formula_only".into();
        }
        if opts.bisect {
            row.tau_bisect = minimal_tau(alpha, rho0, kappa, opts.bisect_tol)
                .ok()
                .map(|r| r.tau);
        }
    } else {
        // Beyond relaxation 2 there is no formula; probe for existence.
        match LmiPencil::new(alpha, rho0, kappa, RATE_BRACKET_HI)
            .and_then(|p| solve_feasibility(&p, &SolveOptions::default(), None))
        {
            Ok(res) => {
                row.lambda_max = Some(res.certified_lambda_max);
                row.status = match res.status {
                    FeasStatus::Feasible => "feasible".into(),
                    FeasStatus::Infeasible => "infeasible".into(),
                    FeasStatus::Inconclusive => "inconclusive".into(),
                };
                if opts.bisect && res.status == FeasStatus::Feasible {
                    row.tau_bisect = minimal_tau(alpha, rho0, kappa, opts.bisect_tol)
                        .ok()
                        .map(|r| r.tau);
                }
            }
            Err(_) => row.status = "solver_error".into(),
        }
    }
    row
}

/// Renders sweep rows as CSV with a stable header and full-precision values.
pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    fn opt(x: Option<f64>) -> String {
        x.map(|v| format!("{v:.10e}")).unwrap_or_default()
    }
    let mut out =
        String::from("alpha,rho0,kappa,tau_formula,tau_bisect,lambda1,lambda2,lambda_max,status\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.alpha,
            r.rho0,
            r.kappa,
            opt(r.tau_formula),
            opt(r.tau_bisect),
            opt(r.lambda1),
            opt(r.lambda2),
            opt(r.lambda_max),
            r.status
        ));
    }
    out
}
