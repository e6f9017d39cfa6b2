//! Dense primal-dual interior-point solver for standard-form linear
//! programs `min c'z  s.t.  A z = b, z >= 0` (Mehrotra predictor-corrector).
//!
//! The constraint matrix is a dense block (covering its leading rows)
//! followed by explicit sparse columns for slacks and residual splits, so
//! the normal matrix `A D A'` costs one GEMM over the dense block plus a
//! scatter over the few sparse entries instead of a GEMM over the full
//! column count.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::linalg::{cholesky_regularized, linf_norm, CholeskyFactor};

/// A sparse column: its nonzero `(row, coefficient)` entries.
pub type SparseCol = Vec<(usize, f64)>;

/// Standard-form LP data.
pub struct StandardLp {
    /// Dense block of the constraint matrix, occupying the leading
    /// `dense.nrows()` rows and the leading `dense.ncols()` columns.
    pub dense: Array2<f64>,
    /// Sparse columns appended after the dense block; these may reach every
    /// row.
    pub sparse_cols: Vec<SparseCol>,
    pub b: Array1<f64>,
    /// Cost vector over all `dense.ncols() + sparse_cols.len()` columns.
    pub cost: Array1<f64>,
}

/// Singleton convenience used by most callers.
pub fn single(row: usize, coeff: f64) -> SparseCol {
    vec![(row, coeff)]
}

/// Termination state of an LP solve.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    MaxIter,
}

pub struct LpSolution {
    /// Primal vector over all LP columns.
    pub z: Array1<f64>,
    /// Dual vector for the equality constraints.
    pub dual: Array1<f64>,
    pub status: LpStatus,
    pub iterations: usize,
    /// Relative duality gap at exit.
    pub gap: f64,
}

impl StandardLp {
    pub fn n_rows(&self) -> usize {
        self.b.len()
    }

    pub fn n_cols(&self) -> usize {
        self.dense.ncols() + self.sparse_cols.len()
    }

    fn apply(&self, z: &Array1<f64>) -> Array1<f64> {
        let k = self.dense.ncols();
        let head = self.dense.dot(&z.slice(ndarray::s![..k]).to_owned());
        let mut out = Array1::zeros(self.n_rows());
        out.slice_mut(ndarray::s![..head.len()]).assign(&head);
        for (j, col) in self.sparse_cols.iter().enumerate() {
            for &(row, coeff) in col {
                out[row] += coeff * z[k + j];
            }
        }
        out
    }

    fn apply_transpose(&self, v: &Array1<f64>) -> Array1<f64> {
        let k = self.dense.ncols();
        let mut out = Array1::zeros(self.n_cols());
        let head = self
            .dense
            .t()
            .dot(&v.slice(ndarray::s![..self.dense.nrows()]).to_owned());
        out.slice_mut(ndarray::s![..k]).assign(&head);
        for (j, col) in self.sparse_cols.iter().enumerate() {
            out[k + j] = col.iter().map(|&(row, coeff)| coeff * v[row]).sum();
        }
        out
    }

    /// `A diag(d) A'` as a dense `m x m` matrix.
    fn normal_matrix(&self, d: &Array1<f64>) -> Array2<f64> {
        let k = self.dense.ncols();
        let mut scaled = self.dense.clone();
        for (j, mut col) in scaled.columns_mut().into_iter().enumerate() {
            let s = d[j].sqrt();
            col.mapv_inplace(|v| v * s);
        }
        let dense_block = scaled.dot(&scaled.t());
        let m_rows = self.n_rows();
        let mut m = Array2::zeros((m_rows, m_rows));
        let r = dense_block.nrows();
        m.slice_mut(ndarray::s![..r, ..r]).assign(&dense_block);
        for (j, col) in self.sparse_cols.iter().enumerate() {
            let dj = d[k + j];
            for &(r1, c1) in col {
                for &(r2, c2) in col {
                    m[[r1, r2]] += dj * c1 * c2;
                }
            }
        }
        m
    }
}

pub struct LpOptions {
    /// Relative duality-gap tolerance.
    pub tol: f64,
    /// Relative primal/dual infeasibility tolerance.
    pub feas_tol: f64,
    pub max_iter: usize,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions {
            tol: 1e-8,
            feas_tol: 1e-9,
            max_iter: 200,
        }
    }
}

/// Largest `alpha <= 1` keeping `v + alpha dv >= 0`.
fn max_step(v: &Array1<f64>, dv: &Array1<f64>) -> f64 {
    let mut alpha = 1.0f64;
    for (&vi, &di) in v.iter().zip(dv.iter()) {
        if di < 0.0 {
            alpha = alpha.min(-vi / di);
        }
    }
    alpha
}

pub fn solve_lp(lp: &StandardLp, opts: &LpOptions) -> Result<LpSolution> {
    let m = lp.n_rows();
    let n = lp.n_cols();
    assert!(m >= 1 && n >= 1);

    let b_scale = 1.0 + linf_norm(&lp.b);
    let c_scale = 1.0 + linf_norm(&lp.cost);

    // Starting point: least-squares primal/dual shifted into the interior.
    let ones_d = Array1::ones(n);
    let gram = lp.normal_matrix(&ones_d);
    let gram_factor = match CholeskyFactor::new(&gram) {
        Ok(f) => f,
        Err(_) => return Err(Error::NumericalBreakdown("lp normal matrix at start")),
    };
    let mut x = lp.apply_transpose(&gram_factor.solve(&lp.b));
    let mut lambda = gram_factor.solve(&lp.apply(&lp.cost));
    let mut s = &lp.cost - &lp.apply_transpose(&lambda);

    let dx = (-1.5 * x.iter().cloned().fold(f64::INFINITY, f64::min)).max(0.0);
    let ds = (-1.5 * s.iter().cloned().fold(f64::INFINITY, f64::min)).max(0.0);
    x.mapv_inplace(|v| v + dx);
    s.mapv_inplace(|v| v + ds);
    let mut xs = x.dot(&s);
    if xs <= 0.0 {
        x += 1.0;
        s += 1.0;
        xs = x.dot(&s);
    }
    let dx2 = 0.5 * xs / s.sum();
    let ds2 = 0.5 * xs / x.sum();
    x.mapv_inplace(|v| v + dx2);
    s.mapv_inplace(|v| v + ds2);

    let mut gap = f64::INFINITY;
    for iter in 0..opts.max_iter {
        let r_b = &lp.apply(&x) - &lp.b;
        let r_c = &(&lp.apply_transpose(&lambda) + &s) - &lp.cost;
        let cx = lp.cost.dot(&x);
        let blam = lp.b.dot(&lambda);
        gap = (cx - blam).abs() / (1.0 + cx.abs());
        let feas_p = linf_norm(&r_b) / b_scale;
        let feas_d = linf_norm(&r_c) / c_scale;
        if gap <= opts.tol && feas_p <= opts.feas_tol && feas_d <= opts.feas_tol {
            return Ok(LpSolution {
                z: x,
                dual: lambda,
                status: LpStatus::Optimal,
                iterations: iter,
                gap,
            });
        }

        let mu = x.dot(&s) / n as f64;
        let d = &x / &s;
        let normal = lp.normal_matrix(&d);
        let factor = cholesky_regularized(&normal)?;

        // Affine scouting direction. Newton system after eliminating
        // (dx, ds): A D A' dlam = -r_b - A (rxs / s - d .* (-r_c)).
        let rxs_aff = -(&x * &s);
        let inner_aff = &(&rxs_aff / &s) - &(&d * &(-&r_c));
        let rhs_aff = -(&r_b) - lp.apply(&inner_aff);
        let dlam_aff = factor.solve(&rhs_aff);
        let dsig_aff = -(&r_c) - lp.apply_transpose(&dlam_aff);
        let dx_aff = &(&rxs_aff / &s) - &(&d * &dsig_aff);

        let alpha_p_aff = max_step(&x, &dx_aff);
        let alpha_d_aff = max_step(&s, &dsig_aff);
        let mu_aff = (&x + &(&dx_aff * alpha_p_aff)).dot(&(&s + &(&dsig_aff * alpha_d_aff)))
            / n as f64;
        let sigma = (mu_aff / mu).powi(3).clamp(0.0, 1.0);

        // Combined predictor-corrector direction.
        let rxs = &(&rxs_aff - &(&dx_aff * &dsig_aff)) + sigma * mu;
        let inner = &(&rxs / &s) - &(&d * &(-&r_c));
        let rhs = -(&r_b) - lp.apply(&inner);
        let dlam = factor.solve(&rhs);
        let dsig = -(&r_c) - lp.apply_transpose(&dlam);
        let dx = &(&rxs / &s) - &(&d * &dsig);

        let eta = 0.99995;
        let alpha_p = (eta * max_step(&x, &dx)).min(1.0);
        let alpha_d = (eta * max_step(&s, &dsig)).min(1.0);

        x = &x + &(&dx * alpha_p);
        lambda = &lambda + &(&dlam * alpha_d);
        s = &s + &(&dsig * alpha_d);

        if !x.iter().all(|v| v.is_finite()) || !s.iter().all(|v| v.is_finite()) {
            return Err(Error::NumericalBreakdown("lp iterates diverged"));
        }
    }

    Ok(LpSolution {
        z: x,
        dual: lambda,
        status: LpStatus::MaxIter,
        iterations: opts.max_iter,
        gap,
    })
}
