//! Brute-force l0 ground truth on tiny instances.
//!
//! Exhaustive support enumeration certifies what the convex solvers should
//! find: the sparsest vector consistent with the data, and whether it is
//! unique at that sparsity. Guards keep the combinatorics at desk scale.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::linalg::QrFactor;
use crate::model::ProblemInstance;

/// Exact-fit threshold for the exhaustive searches.
const FIT_TOL: f64 = 1e-9;

const MAX_N: usize = 24;
const MAX_K: usize = 4;

/// Sparsest consistent vector found by exhaustive search.
#[derive(Clone, Debug)]
pub struct OracleResult {
    pub x: Array1<f64>,
    /// Its l0 count.
    pub k: usize,
    /// No other support of the same size fits the data.
    pub unique: bool,
}

fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(
        start: usize,
        n: usize,
        k: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        let needed = k - current.len();
        for i in start..=n.saturating_sub(needed) {
            current.push(i);
            rec(i + 1, n, k, current, out);
            current.pop();
        }
    }
    rec(0, n, k, &mut current, &mut out);
    out
}

/// Least-squares fit of `y` on the columns `support`; returns the residual
/// norm and the padded solution.
fn support_fit(
    matrix: &Array2<f64>,
    y: &Array1<f64>,
    support: &[usize],
    n: usize,
) -> Option<(f64, Array1<f64>)> {
    let m = matrix.nrows();
    if support.is_empty() {
        let norm = y.dot(y).sqrt();
        return Some((norm, Array1::zeros(n)));
    }
    if support.len() > m {
        return None;
    }
    let mut sub = Array2::zeros((m, support.len()));
    for (c, &j) in support.iter().enumerate() {
        sub.column_mut(c).assign(&matrix.column(j));
    }
    let qr = QrFactor::new(&sub).ok()?;
    let coeffs = qr.solve_ls(y).ok()?;
    let residual = qr.residual_norm2(y).max(0.0).sqrt();
    let mut x = Array1::zeros(n);
    for (c, &j) in support.iter().enumerate() {
        x[j] = coeffs[c];
    }
    Some((residual, x))
}

/// Exhaustive search for the sparsest `x` with `phi x = y` (residual below
/// `1e-9`), scanning supports of size `0..=k_max`. Uniqueness is checked at
/// the minimal sparsity only.
pub fn l0_oracle(problem: &ProblemInstance, k_max: usize) -> Result<OracleResult> {
    if problem.n > MAX_N || k_max > MAX_K {
        return Err(Error::TooLarge {
            n: problem.n,
            k_max,
        });
    }
    let scale = 1.0 + problem.y.dot(&problem.y).sqrt();
    for k in 0..=k_max.min(problem.n) {
        let mut found: Option<Array1<f64>> = None;
        let mut count = 0usize;
        for support in subsets_of_size(problem.n, k) {
            if let Some((residual, x)) = support_fit(&problem.phi, &problem.y, &support, problem.n)
            {
                if residual <= FIT_TOL * scale {
                    // Supports whose fit is actually sparser than k belong
                    // to an earlier round; counting them here would declare
                    // spurious ties.
                    let l0 = x.iter().filter(|v| v.abs() > FIT_TOL).count();
                    if l0 < k {
                        continue;
                    }
                    count += 1;
                    if found.is_none() {
                        found = Some(x);
                    }
                }
            }
        }
        if let Some(x) = found {
            return Ok(OracleResult {
                x,
                k,
                unique: count == 1,
            });
        }
    }
    Err(Error::NoSolution { k_max })
}

/// Exhaustive decoding oracle for tall systems: find the sparsest
/// corruption `e` such that `y - e` lies in the column span of `phi`, and
/// return the decoded `x`.
pub fn decode_oracle(problem: &ProblemInstance, k_max: usize) -> Result<OracleResult> {
    if problem.m < problem.n {
        return Err(Error::DimensionMismatch(
            "decoding oracle needs a tall matrix".into(),
        ));
    }
    if problem.m > MAX_N || k_max > MAX_K {
        return Err(Error::TooLarge {
            n: problem.m,
            k_max,
        });
    }
    let qr = QrFactor::new(&problem.phi)?;
    if qr.is_rank_deficient(1e-12) {
        return Err(Error::RankDeficient {
            expected: problem.n,
        });
    }
    // Columns of `basis` span the orthogonal complement of range(phi):
    // y - e in range(phi) iff basis^T (y - e) = 0.
    let basis = qr.null_space_basis();
    let target = basis.t().dot(&problem.y);
    let scale = 1.0 + target.dot(&target).sqrt();
    let reduced = basis.t().to_owned();

    for k in 0..=k_max.min(problem.m) {
        let mut found: Option<Array1<f64>> = None;
        let mut count = 0usize;
        for support in subsets_of_size(problem.m, k) {
            if let Some((residual, e)) = support_fit(&reduced, &target, &support, problem.m) {
                if residual <= FIT_TOL * scale {
                    let l0 = e.iter().filter(|v| v.abs() > FIT_TOL).count();
                    if l0 < k {
                        continue;
                    }
                    count += 1;
                    if found.is_none() {
                        found = Some(e);
                    }
                }
            }
        }
        if let Some(e) = found {
            let clean = &problem.y - &e;
            let x = qr.solve_ls(&clean)?;
            return Ok(OracleResult {
                x,
                k,
                unique: count == 1,
            });
        }
    }
    Err(Error::NoSolution { k_max })
}
