//! Self-contained dense linear algebra for small matrices.
//!
//! Everything the crate needs runs on matrices of single-digit dimension, so
//! the routines here favour reproducibility over asymptotics: singular values
//! come from one-sided Jacobi orthogonalization, symmetric eigenvalues from
//! cyclic Jacobi rotations, and linear solves from a plain Cholesky
//! factorization. No external solver is involved anywhere.

use crate::error::{Error, Result};

/// Relative off-diagonal norm at which Jacobi eigenvalue sweeps stop.
const JACOBI_TOL: f64 = 1e-14;
/// Hard cap on Jacobi sweeps; convergence is quadratic, so this is generous.
const JACOBI_MAX_SWEEPS: usize = 60;

/// Dense row-major matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    /// Zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![0.0; rows * cols] }
    }

    /// Identity matrix of order `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Diagonal matrix from the given entries.
    pub fn diag(entries: &[f64]) -> Self {
        let mut m = Mat::zeros(entries.len(), entries.len());
        for (i, &v) in entries.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    /// Builds a matrix from nested rows, checking that they are rectangular.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Dimension("matrix needs at least one row".into()));
        }
        let cols = rows[0].len();
        if cols == 0 {
            return Err(Error::Dimension("matrix needs at least one column".into()));
        }
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::Dimension(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(Mat { rows: rows.len(), cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    /// Transposed copy.
    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &Mat) -> Result<Mat> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if self.cols != v.len() {
            return Err(Error::Dimension(format!(
                "cannot apply {}x{} to vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let mut out = vec![0.0; self.rows];
        for i in 0..self.rows {
            let mut acc = 0.0;
            for j in 0..self.cols {
                acc += self.get(i, j) * v[j];
            }
            out[i] = acc;
        }
        Ok(out)
    }

    /// Entry-wise sum `self + other`.
    pub fn add(&self, other: &Mat) -> Result<Mat> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension("matrix sum shape mismatch".into()));
        }
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(other.data.iter()) {
            *a += b;
        }
        Ok(out)
    }

    /// Scalar multiple.
    pub fn scale(&self, s: f64) -> Mat {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= s;
        }
        out
    }

    /// Frobenius norm.
    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// `A^T A`, always symmetric by construction.
    pub fn gram(&self) -> Mat {
        let mut out = Mat::zeros(self.cols, self.cols);
        for i in 0..self.cols {
            for j in i..self.cols {
                let mut acc = 0.0;
                for k in 0..self.rows {
                    acc += self.get(k, i) * self.get(k, j);
                }
                out.set(i, j, acc);
                out.set(j, i, acc);
            }
        }
        out
    }

    /// Checks symmetry up to a relative tolerance.
    pub fn is_symmetric(&self, rel_tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let scale = self.max_abs().max(1.0);
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if (self.get(i, j) - self.get(j, i)).abs() > rel_tol * scale {
                    return false;
                }
            }
        }
        true
    }

    /// If the matrix equals `beta * I` for some scalar `beta` (up to a
    /// relative tolerance), returns that scalar.
    pub fn uniform_scaling(&self, rel_tol: f64) -> Option<f64> {
        if !self.is_square() || self.rows == 0 {
            return None;
        }
        let beta = self.get(0, 0);
        let scale = self.max_abs().max(1.0);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let want = if i == j { beta } else { 0.0 };
                if (self.get(i, j) - want).abs() > rel_tol * scale {
                    return None;
                }
            }
        }
        Some(beta)
    }

    /// Eigenvalues of a symmetric matrix via cyclic Jacobi, ascending.
    pub fn sym_eigenvalues(&self) -> Result<Vec<f64>> {
        if !self.is_symmetric(1e-12) {
            return Err(Error::Domain("eigenvalue routine requires a symmetric matrix".into()));
        }
        let n = self.rows;
        let mut a = self.data.clone();
        jacobi_sweeps(&mut a, n)?;
        let mut eigs: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
        eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
        Ok(eigs)
    }

    /// Singular values via one-sided Jacobi orthogonalization, descending.
    ///
    /// Columns of the (possibly transposed) matrix are rotated pairwise until
    /// mutually orthogonal; the column norms are then the singular values.
    pub fn singular_values(&self) -> Vec<f64> {
        // Work on the tall orientation so column count is minimal.
        let work = if self.rows >= self.cols { self.clone() } else { self.transpose() };
        let (m, n) = (work.rows, work.cols);
        let mut cols: Vec<Vec<f64>> = (0..n).map(|j| (0..m).map(|i| work.get(i, j)).collect()).collect();
        for _ in 0..JACOBI_MAX_SWEEPS {
            let mut rotated = false;
            for p in 0..n {
                for q in (p + 1)..n {
                    let (mut app, mut aqq, mut apq) = (0.0, 0.0, 0.0);
                    for i in 0..m {
                        app += cols[p][i] * cols[p][i];
                        aqq += cols[q][i] * cols[q][i];
                        apq += cols[p][i] * cols[q][i];
                    }
                    if apq.abs() <= 1e-15 * (app * aqq).sqrt() {
                        continue;
                    }
                    rotated = true;
                    let zeta = (aqq - app) / (2.0 * apq);
                    let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = c * t;
                    for i in 0..m {
                        let vp = cols[p][i];
                        let vq = cols[q][i];
                        cols[p][i] = c * vp - s * vq;
                        cols[q][i] = s * vp + c * vq;
                    }
                }
            }
            if !rotated {
                break;
            }
        }
        let mut sv: Vec<f64> = cols
            .iter()
            .map(|col| col.iter().map(|x| x * x).sum::<f64>().sqrt())
            .collect();
        sv.sort_by(|x, y| y.partial_cmp(x).unwrap());
        sv
    }
}

/// Cyclic Jacobi rotations on a row-major symmetric buffer until the
/// off-diagonal Frobenius norm falls below `JACOBI_TOL` relative to the
/// matrix norm. Eigenvalues end up on the diagonal.
fn jacobi_sweeps(a: &mut [f64], n: usize) -> Result<usize> {
    let norm: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Ok(0);
    }
    let idx = |i: usize, j: usize| i * n + j;
    for sweep in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = {
            let mut acc = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    acc += 2.0 * a[idx(i, j)] * a[idx(i, j)];
                }
            }
            acc.sqrt()
        };
        if off <= JACOBI_TOL * norm {
            return Ok(sweep);
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[idx(p, q)];
                if apq.abs() <= 0.1 * JACOBI_TOL * norm / (n as f64) {
                    continue;
                }
                let theta = (a[idx(q, q)] - a[idx(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                // Rotate rows/columns p and q.
                for k in 0..n {
                    let akp = a[idx(k, p)];
                    let akq = a[idx(k, q)];
                    a[idx(k, p)] = c * akp - s * akq;
                    a[idx(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[idx(p, k)];
                    let aqk = a[idx(q, k)];
                    a[idx(p, k)] = c * apk - s * aqk;
                    a[idx(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    Err(Error::InnerSolver { residual: f64::NAN, iterations: JACOBI_MAX_SWEEPS })
}

/// Cholesky factorization of a symmetric positive definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: Mat,
}

impl Cholesky {
    /// Factors `a = L L^T`; fails with a conditioning error if a pivot is
    /// not strictly positive.
    pub fn new(a: &Mat) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Dimension("Cholesky needs a square matrix".into()));
        }
        let n = a.rows();
        let mut l = Mat::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let mut acc = a.get(i, j);
                for k in 0..j {
                    acc -= l.get(i, k) * l.get(j, k);
                }
                if i == j {
                    if acc <= 0.0 {
                        return Err(Error::Conditioning(format!(
                            "matrix is not positive definite (pivot {acc:.3e} at index {i})"
                        )));
                    }
                    l.set(i, j, acc.sqrt());
                } else {
                    l.set(i, j, acc / l.get(j, j));
                }
            }
        }
        Ok(Cholesky { l })
    }

    /// Solves `A x = b` given the stored factorization.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.l.rows();
        if b.len() != n {
            return Err(Error::Dimension("Cholesky solve rhs length mismatch".into()));
        }
        // Forward substitution L y = b.
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut acc = b[i];
            for k in 0..i {
                acc -= self.l.get(i, k) * y[k];
            }
            y[i] = acc / self.l.get(i, i);
        }
        // Back substitution L^T x = y.
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut acc = y[i];
            for k in (i + 1)..n {
                acc -= self.l.get(k, i) * x[k];
            }
            x[i] = acc / self.l.get(i, i);
        }
        Ok(x)
    }
}

// ---------------------------------------------------------------------------
// Fixed-size helpers used by the certificate and the feasibility search.
// ---------------------------------------------------------------------------

/// Stack-allocated 2x2 matrix.
pub type Mat2 = [[f64; 2]; 2];
/// Stack-allocated 4x4 matrix (not necessarily symmetric).
pub type Mat4 = [[f64; 4]; 4];
/// Stack-allocated symmetric 4x4 matrix.
pub type Sym4 = [[f64; 4]; 4];

/// 4x4 product.
pub fn mat4_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut acc = 0.0;
            for k in 0..4 {
                acc += a[i][k] * b[k][j];
            }
            out[i][j] = acc;
        }
    }
    out
}

/// 4x4 transpose.
pub fn mat4_transpose(a: &Mat4) -> Mat4 {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = a[j][i];
        }
    }
    out
}

/// 2x2 product.
pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Quadratic form `x^T A y` for 2-vectors.
#[inline]
pub fn quad2(x: &[f64; 2], a: &Mat2, y: &[f64; 2]) -> f64 {
    x[0] * (a[0][0] * y[0] + a[0][1] * y[1]) + x[1] * (a[1][0] * y[0] + a[1][1] * y[1])
}

/// Eigenvalues of a symmetric 2x2 matrix, ascending, by the closed form.
pub fn eig2(a: &Mat2) -> [f64; 2] {
    let half_trace = 0.5 * (a[0][0] + a[1][1]);
    let half_gap = 0.5 * (a[0][0] - a[1][1]);
    let radius = (half_gap * half_gap + a[0][1] * a[1][0]).max(0.0).sqrt();
    [half_trace - radius, half_trace + radius]
}

/// Frobenius norm of a symmetric 4x4 matrix.
pub fn sym4_frobenius(m: &Sym4) -> f64 {
    let mut acc = 0.0;
    for row in m {
        for x in row {
            acc += x * x;
        }
    }
    acc.sqrt()
}

/// Eigenvalues of a symmetric 4x4 matrix, ascending, via cyclic Jacobi.
pub fn eig4(m: &Sym4) -> [f64; 4] {
    let mut buf = [0.0; 16];
    for i in 0..4 {
        for j in 0..4 {
            buf[i * 4 + j] = 0.5 * (m[i][j] + m[j][i]);
        }
    }
    // Convergence failure is impossible for 4x4 symmetric input in practice;
    // fall back to whatever the diagonal holds if the cap were ever hit.
    let _ = jacobi_sweeps(&mut buf, 4);
    let mut eigs = [buf[0], buf[5], buf[10], buf[15]];
    eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    eigs
}

/// Eigen-decomposition of a symmetric 4x4 matrix.
///
/// Returns `(eigenvalues ascending, eigenvectors)` where `vectors[k]` is the
/// unit eigenvector paired with `values[k]`.
pub fn eig4_full(m: &Sym4) -> ([f64; 4], [[f64; 4]; 4]) {
    let mut a = [0.0; 16];
    for i in 0..4 {
        for j in 0..4 {
            a[i * 4 + j] = 0.5 * (m[i][j] + m[j][i]);
        }
    }
    let n = 4usize;
    let idx = |i: usize, j: usize| i * n + j;
    let mut v = [0.0; 16];
    for i in 0..4 {
        v[idx(i, i)] = 1.0;
    }
    let norm: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        'outer: for _ in 0..JACOBI_MAX_SWEEPS {
            let mut off = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    off += 2.0 * a[idx(i, j)] * a[idx(i, j)];
                }
            }
            if off.sqrt() <= JACOBI_TOL * norm {
                break 'outer;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[idx(p, q)];
                    if apq.abs() <= 0.1 * JACOBI_TOL * norm / (n as f64) {
                        continue;
                    }
                    let theta = (a[idx(q, q)] - a[idx(p, p)]) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = c * t;
                    for k in 0..n {
                        let akp = a[idx(k, p)];
                        let akq = a[idx(k, q)];
                        a[idx(k, p)] = c * akp - s * akq;
                        a[idx(k, q)] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[idx(p, k)];
                        let aqk = a[idx(q, k)];
                        a[idx(p, k)] = c * apk - s * aqk;
                        a[idx(q, k)] = s * apk + c * aqk;
                    }
                    for k in 0..n {
                        let vkp = v[idx(k, p)];
                        let vkq = v[idx(k, q)];
                        v[idx(k, p)] = c * vkp - s * vkq;
                        v[idx(k, q)] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
    let mut order = [0usize, 1, 2, 3];
    let diag = [a[0], a[5], a[10], a[15]];
    order.sort_by(|&x, &y| diag[x].partial_cmp(&diag[y]).unwrap());
    let mut values = [0.0; 4];
    let mut vectors = [[0.0; 4]; 4];
    for (k, &col) in order.iter().enumerate() {
        values[k] = diag[col];
        for i in 0..4 {
            vectors[k][i] = v[idx(i, col)];
        }
    }
    (values, vectors)
}

/// Determinant of a square matrix of order at most 4 (Laplace expansion).
pub fn det_small(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    match n {
        0 => 1.0,
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        3 => {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
        4 => {
            let mut acc = 0.0;
            let mut sign = 1.0;
            for j in 0..4 {
                let minor: Vec<Vec<f64>> = (1..4)
                    .map(|i| (0..4).filter(|&k| k != j).map(|k| m[i][k]).collect())
                    .collect();
                acc += sign * m[0][j] * det_small(&minor);
                sign = -sign;
            }
            acc
        }
        _ => panic!("det_small supports order <= 4"),
    }
}

/// Principal minor of a symmetric 4x4 matrix over the kept index set.
pub fn principal_minor4(m: &Sym4, keep: &[usize]) -> f64 {
    let sub: Vec<Vec<f64>> = keep
        .iter()
        .map(|&i| keep.iter().map(|&j| m[i][j]).collect())
        .collect();
    det_small(&sub)
}

/// All 15 nonempty principal minors of a symmetric 4x4 matrix.
///
/// Returns `(kept index set, minor value)` pairs in mask order.
pub fn all_principal_minors4(m: &Sym4) -> Vec<(Vec<usize>, f64)> {
    let mut out = Vec::with_capacity(15);
    for mask in 1u32..16 {
        let keep: Vec<usize> = (0..4).filter(|&i| mask & (1 << i) != 0).collect();
        let value = principal_minor4(m, &keep);
        out.push((keep, value));
    }
    out
}

/// Euclidean norm of a vector.
pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Euclidean distance between two vectors of equal length.
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Dot product.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
