//! Small dense linear algebra: Cholesky and Householder QR.
//!
//! Problem sizes in this crate stay in the low thousands, so hand-rolled
//! factorizations on `ndarray` storage are plenty and keep the build free of
//! BLAS/LAPACK linkage.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};

pub fn l2_norm(v: &Array1<f64>) -> f64 {
    v.dot(v).sqrt()
}

pub fn linf_norm(v: &Array1<f64>) -> f64 {
    v.iter().fold(0.0f64, |a, &x| a.max(x.abs()))
}

/// Cholesky factor of a symmetric positive definite matrix (lower triangle).
pub struct CholeskyFactor {
    l: Array2<f64>,
}

impl CholeskyFactor {
    pub fn new(a: &Array2<f64>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch("cholesky needs a square matrix".into()));
        }
        // Row-oriented (dot-product) form: both operands of the inner loop
        // are contiguous rows, which matters at the sizes the LP solver
        // feeds in.
        let mut l = Array2::zeros((n, n));
        let data = l.as_slice_mut().expect("contiguous");
        let src = a.as_slice().expect("contiguous");
        for i in 0..n {
            for j in 0..=i {
                let mut sum = src[i * n + j];
                let (ri, rj) = (&data[i * n..i * n + j], &data[j * n..j * n + j]);
                for k in 0..j {
                    sum -= ri[k] * rj[k];
                }
                if i == j {
                    if !(sum > 0.0) || !sum.is_finite() {
                        return Err(Error::Singular);
                    }
                    data[i * n + j] = sum.sqrt();
                } else {
                    data[i * n + j] = sum / data[j * n + j];
                }
            }
        }
        Ok(CholeskyFactor { l })
    }

    pub fn solve(&self, b: &Array1<f64>) -> Array1<f64> {
        let n = self.l.nrows();
        let mut x = b.clone();
        for i in 0..n {
            let mut s = x[i];
            for k in 0..i {
                s -= self.l[[i, k]] * x[k];
            }
            x[i] = s / self.l[[i, i]];
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in i + 1..n {
                s -= self.l[[k, i]] * x[k];
            }
            x[i] = s / self.l[[i, i]];
        }
        x
    }
}

/// Cholesky factorization with an escalating diagonal ridge as fallback
/// when the bare factorization breaks down.
pub fn cholesky_regularized(a: &Array2<f64>) -> Result<CholeskyFactor> {
    if let Ok(f) = CholeskyFactor::new(a) {
        return Ok(f);
    }
    let n = a.nrows();
    let scale = (0..n).map(|i| a[[i, i]].abs()).fold(1e-300, f64::max);
    let mut ridge = 1e-12 * scale;
    for _ in 0..8 {
        let mut reg = a.clone();
        for i in 0..n {
            reg[[i, i]] += ridge;
        }
        if let Ok(f) = CholeskyFactor::new(&reg) {
            return Ok(f);
        }
        ridge *= 100.0;
    }
    Err(Error::NumericalBreakdown("regularized cholesky"))
}

/// Solve `a x = b` for symmetric positive definite `a`, retrying with an
/// escalating diagonal ridge when the bare factorization breaks down.
pub fn solve_spd_regularized(a: &Array2<f64>, b: &Array1<f64>) -> Result<Array1<f64>> {
    Ok(cholesky_regularized(a)?.solve(b))
}

/// Householder QR of an `m x n` matrix with `m >= n`.
pub struct QrFactor {
    /// Reflectors below the diagonal, `R` on and above it.
    qr: Array2<f64>,
    /// Scalar `beta` of each reflector.
    betas: Vec<f64>,
    m: usize,
    n: usize,
}

impl QrFactor {
    pub fn new(a: &Array2<f64>) -> Result<Self> {
        let (m, n) = a.dim();
        if m < n {
            return Err(Error::DimensionMismatch(format!(
                "qr expects a tall matrix, got {m} x {n}"
            )));
        }
        let mut qr = a.clone();
        let mut betas = Vec::with_capacity(n);
        for j in 0..n {
            let mut norm2 = 0.0;
            for i in j..m {
                norm2 += qr[[i, j]] * qr[[i, j]];
            }
            let norm = norm2.sqrt();
            if norm == 0.0 {
                betas.push(0.0);
                continue;
            }
            let alpha = if qr[[j, j]] >= 0.0 { -norm } else { norm };
            let v0 = qr[[j, j]] - alpha;
            let beta = -1.0 / (alpha * v0);
            qr[[j, j]] = v0;
            // Apply (I - beta v v^T) to the remaining columns.
            for col in j + 1..n {
                let mut dot = 0.0;
                for i in j..m {
                    dot += qr[[i, j]] * qr[[i, col]];
                }
                let t = beta * dot;
                for i in j..m {
                    qr[[i, col]] -= t * qr[[i, j]];
                }
            }
            // Store reflector below the diagonal, R entry on it.
            let scale = 1.0 / v0;
            for i in j + 1..m {
                qr[[i, j]] *= scale;
            }
            qr[[j, j]] = alpha;
            betas.push(beta * v0 * v0);
        }
        Ok(QrFactor { qr, betas, m, n })
    }

    /// `max |r_jj|`, a scale for rank tests.
    fn r_scale(&self) -> f64 {
        (0..self.n).map(|j| self.qr[[j, j]].abs()).fold(0.0, f64::max)
    }

    pub fn is_rank_deficient(&self, rel_tol: f64) -> bool {
        let scale = self.r_scale();
        if scale == 0.0 {
            return self.n > 0;
        }
        (0..self.n).any(|j| self.qr[[j, j]].abs() < rel_tol * scale)
    }

    /// Apply `Q^T` to a length-`m` vector in place.
    pub fn apply_q_transpose(&self, v: &mut Array1<f64>) {
        assert_eq!(v.len(), self.m);
        for j in 0..self.n {
            let beta = self.betas[j];
            if beta == 0.0 {
                continue;
            }
            let mut dot = v[j];
            for i in j + 1..self.m {
                dot += self.qr[[i, j]] * v[i];
            }
            let t = beta * dot;
            v[j] -= t;
            for i in j + 1..self.m {
                v[i] -= t * self.qr[[i, j]];
            }
        }
    }

    /// Apply `Q` to a length-`m` vector in place.
    pub fn apply_q(&self, v: &mut Array1<f64>) {
        assert_eq!(v.len(), self.m);
        for j in (0..self.n).rev() {
            let beta = self.betas[j];
            if beta == 0.0 {
                continue;
            }
            let mut dot = v[j];
            for i in j + 1..self.m {
                dot += self.qr[[i, j]] * v[i];
            }
            let t = beta * dot;
            v[j] -= t;
            for i in j + 1..self.m {
                v[i] -= t * self.qr[[i, j]];
            }
        }
    }

    /// Least-squares solution of `a x = b` (minimum residual).
    pub fn solve_ls(&self, b: &Array1<f64>) -> Result<Array1<f64>> {
        if self.is_rank_deficient(1e-12) {
            return Err(Error::Singular);
        }
        let mut qtb = b.clone();
        self.apply_q_transpose(&mut qtb);
        let mut x = Array1::zeros(self.n);
        for i in (0..self.n).rev() {
            let mut s = qtb[i];
            for k in i + 1..self.n {
                s -= self.qr[[i, k]] * x[k];
            }
            x[i] = s / self.qr[[i, i]];
        }
        Ok(x)
    }

    /// Squared norm of the least-squares residual for `b`.
    pub fn residual_norm2(&self, b: &Array1<f64>) -> f64 {
        let mut qtb = b.clone();
        self.apply_q_transpose(&mut qtb);
        (self.n..self.m).map(|i| qtb[i] * qtb[i]).sum()
    }

    /// Orthonormal basis of the orthogonal complement of the column space
    /// (an `m x (m - n)` matrix).
    pub fn null_space_basis(&self) -> Array2<f64> {
        let cols = self.m - self.n;
        let mut basis = Array2::zeros((self.m, cols));
        for (c, j) in (self.n..self.m).enumerate() {
            let mut e = Array1::zeros(self.m);
            e[j] = 1.0;
            self.apply_q(&mut e);
            basis.column_mut(c).assign(&e);
        }
        basis
    }
}

/// Least-squares solve without keeping the factor around.
pub fn least_squares(a: &Array2<f64>, b: &Array1<f64>) -> Result<Array1<f64>> {
    QrFactor::new(a)?.solve_ls(b)
}

/// Minimum-norm solution of an underdetermined system `a x = b` with full
/// row rank `a` (`m <= n`), via `x = a^T (a a^T)^{-1} b`.
pub fn min_norm_solution(a: &Array2<f64>, b: &Array1<f64>) -> Result<Array1<f64>> {
    let gram = a.dot(&a.t());
    let w = solve_spd_regularized(&gram, b)?;
    Ok(a.t().dot(&w))
}
