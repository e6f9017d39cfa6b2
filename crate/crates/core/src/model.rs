//! Problem instances, signal specifications, and random ensembles.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// A linear inverse problem `y = phi * x (+ noise)` with a dense sensing
/// matrix. Structured operators (partial Fourier sampling) live in the
/// [`crate::tv`] module and do not pass through this type.
#[derive(Clone, Debug)]
pub struct ProblemInstance {
    pub phi: Array2<f64>,
    pub y: Array1<f64>,
    pub m: usize,
    pub n: usize,
    /// Noise level of the observation model, when known.
    pub noise_sigma: Option<f64>,
    /// Set when the columns of `phi` were normalized to unit l2 norm.
    pub columns_normalized: bool,
}

impl ProblemInstance {
    pub fn new(phi: Array2<f64>, y: Array1<f64>) -> Result<Self> {
        let (m, n) = phi.dim();
        if m < 1 || n < 1 {
            return Err(Error::InvalidArgument(
                "sensing matrix must have at least one row and column".into(),
            ));
        }
        if y.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "y has length {} but phi has {} rows",
                y.len(),
                m
            )));
        }
        Ok(ProblemInstance {
            phi,
            y,
            m,
            n,
            noise_sigma: None,
            columns_normalized: false,
        })
    }

    pub fn with_noise_sigma(mut self, sigma: f64) -> Self {
        self.noise_sigma = Some(sigma);
        self
    }

    pub fn mark_columns_normalized(mut self) -> Self {
        debug_assert!(self
            .phi
            .columns()
            .into_iter()
            .all(|c| (c.dot(&c).sqrt() - 1.0).abs() <= 1e-12));
        self.columns_normalized = true;
        self
    }

    pub fn apply(&self, x: &Array1<f64>) -> Array1<f64> {
        self.phi.dot(x)
    }

    pub fn adjoint(&self, v: &Array1<f64>) -> Array1<f64> {
        self.phi.t().dot(v)
    }

    /// Residual `y - phi * x`.
    pub fn residual(&self, x: &Array1<f64>) -> Array1<f64> {
        &self.y - &self.apply(x)
    }
}

/// What kind of synthetic signal to draw.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SignalKind {
    /// Exactly `k` spikes with standard normal values.
    SparseGaussian { k: usize },
    /// Exactly `k` spikes with values in `{-1, +1}`.
    SparseBernoulli { k: usize },
    /// Sorted magnitudes decay as `i^(-1/p)`, normalized to unit sup-norm.
    Compressible { p: f64 },
}

/// Specification of a synthetic test signal. The `seed` records which
/// stream drew the signal; generation itself consumes the stream passed to
/// [`gen_signal`].
#[derive(Clone, Copy, Debug)]
pub struct SignalSpec {
    pub kind: SignalKind,
    pub n: usize,
    pub seed: u64,
}

impl SignalSpec {
    pub fn validate(&self) -> Result<()> {
        match self.kind {
            SignalKind::SparseGaussian { k } | SignalKind::SparseBernoulli { k } => {
                if k > self.n {
                    return Err(Error::InvalidArgument(format!(
                        "sparsity k = {} exceeds length n = {}",
                        k, self.n
                    )));
                }
            }
            SignalKind::Compressible { p } => {
                if !(p > 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "decay exponent p must be positive, got {p}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A generated signal together with its support.
#[derive(Clone, Debug)]
pub struct GroundTruth {
    pub x0: Array1<f64>,
    pub support: Vec<usize>,
}

impl GroundTruth {
    fn from_vector(x0: Array1<f64>) -> Self {
        let support = x0
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, _)| i)
            .collect();
        GroundTruth { x0, support }
    }
}

/// Dense `m x n` matrix with i.i.d. standard normal entries, optionally with
/// unit-norm columns.
pub fn gen_gaussian_matrix(
    m: usize,
    n: usize,
    normalize_columns: bool,
    rng: &mut RngStream,
) -> Array2<f64> {
    assert!(m >= 1 && n >= 1);
    let mut phi = Array2::zeros((m, n));
    for i in 0..m {
        for j in 0..n {
            phi[[i, j]] = rng.normal();
        }
    }
    if normalize_columns {
        for mut col in phi.columns_mut() {
            let norm = col.dot(&col).sqrt();
            if norm > 0.0 {
                col.mapv_inplace(|v| v / norm);
            }
        }
    }
    phi
}

/// Dense `m x n` matrix with i.i.d. entries in `{-1, +1}`.
pub fn gen_bernoulli_matrix(m: usize, n: usize, rng: &mut RngStream) -> Array2<f64> {
    assert!(m >= 1 && n >= 1);
    let mut phi = Array2::zeros((m, n));
    for i in 0..m {
        for j in 0..n {
            phi[[i, j]] = rng.sign();
        }
    }
    phi
}

/// Draw a signal according to `spec`.
///
/// Sparse kinds factor each nonzero into a sign draw and a magnitude draw in
/// a fixed order, so the two sparse kinds consume identical randomness: at a
/// matched stream they produce the same support and sign pattern, which is
/// what makes their recovery curves directly comparable.
pub fn gen_signal(spec: &SignalSpec, rng: &mut RngStream) -> Result<GroundTruth> {
    spec.validate()?;
    let n = spec.n;
    match spec.kind {
        SignalKind::SparseGaussian { k } | SignalKind::SparseBernoulli { k } => {
            let gaussian = matches!(spec.kind, SignalKind::SparseGaussian { .. });
            let support = rng.choose_indices(n, k);
            let mut x0 = Array1::zeros(n);
            for &idx in &support {
                let sign = rng.sign();
                let magnitude = rng.normal().abs();
                x0[idx] = if gaussian { sign * magnitude } else { sign };
            }
            Ok(GroundTruth::from_vector(x0))
        }
        SignalKind::Compressible { p } => {
            let positions = rng.choose_indices(n, n);
            let mut x0 = Array1::zeros(n);
            for (rank, &idx) in positions.iter().enumerate() {
                // Largest term is rank 0 with magnitude 1, so the sup-norm
                // is exactly 1 without a separate normalization pass.
                let magnitude = ((rank + 1) as f64).powf(-1.0 / p);
                x0[idx] = rng.sign() * magnitude;
            }
            Ok(GroundTruth::from_vector(x0))
        }
    }
}

/// Signal model for the model-selection experiment: `k` nonzeros with
/// `x_i = s_i (1 + |a_i|)`, `s_i = +-1` fair and `a_i` standard normal, so
/// every nonzero magnitude is at least 1.
pub fn gen_dantzig_signal(n: usize, k: usize, rng: &mut RngStream) -> Result<GroundTruth> {
    if k > n {
        return Err(Error::InvalidArgument(format!(
            "sparsity k = {k} exceeds length n = {n}"
        )));
    }
    let support = rng.choose_indices(n, k);
    let mut x0 = Array1::zeros(n);
    for &idx in &support {
        let sign = rng.sign();
        let amplitude = 1.0 + rng.normal().abs();
        x0[idx] = sign * amplitude;
    }
    Ok(GroundTruth::from_vector(x0))
}
