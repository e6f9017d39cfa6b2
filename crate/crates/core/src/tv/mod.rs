//! Weighted total-variation recovery from partial Fourier measurements.
//!
//! The measurement operator samples the 2-D DFT of an `n x n` image on a
//! conjugate-symmetric frequency mask and packs the coefficients as real
//! numbers. Recovery minimizes a weighted isotropic TV seminorm subject to
//! exact data consistency, via a primal-dual splitting scheme whose data
//! projection is a pair of FFTs.

mod fourier;
mod phantom;
mod solver;

pub use fourier::{radial_sampler, FourierSampler};
pub use phantom::shepp_logan;
pub use solver::{solve_weighted_tv, TvOptions, TvSolution};

use ndarray::{Array1, Array2};

use crate::convex::SolveStatus;
use crate::error::{Error, Result};

/// A square grayscale image.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageGrid {
    pub n: usize,
    pub pixels: Array2<f64>,
}

impl ImageGrid {
    pub fn new(pixels: Array2<f64>) -> Result<Self> {
        let (r, c) = pixels.dim();
        if r != c {
            return Err(Error::DimensionMismatch(format!(
                "image must be square, got {r} x {c}"
            )));
        }
        Ok(ImageGrid { n: r, pixels })
    }

    pub fn zeros(n: usize) -> Self {
        ImageGrid {
            n,
            pixels: Array2::zeros((n, n)),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.pixels.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Relative l2 distance to a reference image.
    pub fn relative_error(&self, reference: &ImageGrid) -> f64 {
        let diff: f64 = self
            .pixels
            .iter()
            .zip(reference.pixels.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        diff.sqrt() / reference.frobenius_norm()
    }
}

/// Forward differences of an image on the interior `(n-1) x (n-1)` grid.
#[derive(Clone, Debug)]
pub struct GradientField {
    pub gx: Array2<f64>,
    pub gy: Array2<f64>,
}

impl GradientField {
    pub fn side(&self) -> usize {
        self.gx.nrows()
    }

    /// Per-site magnitudes `||(D x)_{ij}||_2`.
    pub fn magnitudes(&self) -> Array2<f64> {
        let k = self.side();
        Array2::from_shape_fn((k, k), |(i, j)| {
            (self.gx[[i, j]] * self.gx[[i, j]] + self.gy[[i, j]] * self.gy[[i, j]]).sqrt()
        })
    }
}

/// Forward-difference gradient `(Dx)_{ij} = (x_{i+1,j} - x_{ij}, x_{i,j+1} - x_{ij})`.
pub fn gradient(img: &ImageGrid) -> GradientField {
    let n = img.n;
    assert!(n >= 2, "gradient needs n >= 2");
    let k = n - 1;
    let mut gx = Array2::zeros((k, k));
    let mut gy = Array2::zeros((k, k));
    for i in 0..k {
        for j in 0..k {
            gx[[i, j]] = img.pixels[[i + 1, j]] - img.pixels[[i, j]];
            gy[[i, j]] = img.pixels[[i, j + 1]] - img.pixels[[i, j]];
        }
    }
    GradientField { gx, gy }
}

/// Adjoint of [`gradient`]: an `n x n` image from an interior field.
pub fn gradient_adjoint(field: &GradientField, n: usize) -> ImageGrid {
    let k = n - 1;
    assert_eq!(field.gx.dim(), (k, k));
    let mut out = Array2::zeros((n, n));
    for i in 0..k {
        for j in 0..k {
            let px = field.gx[[i, j]];
            out[[i + 1, j]] += px;
            out[[i, j]] -= px;
            let py = field.gy[[i, j]];
            out[[i, j + 1]] += py;
            out[[i, j]] -= py;
        }
    }
    ImageGrid { n, pixels: out }
}

/// Weighted isotropic TV value `sum w_{ij} ||(Dx)_{ij}||_2`; unit weights
/// when `weights` is `None`.
pub fn tv_norm(img: &ImageGrid, weights: Option<&Array2<f64>>) -> f64 {
    let mags = gradient(img).magnitudes();
    match weights {
        None => mags.sum(),
        Some(w) => {
            assert_eq!(w.dim(), mags.dim());
            (w * &mags).sum()
        }
    }
}

/// Trace of a reweighted TV run.
#[derive(Clone, Debug)]
pub struct TvTrace {
    pub images: Vec<ImageGrid>,
    /// Unit-weight TV value of each iterate.
    pub tv_values: Vec<f64>,
    /// Weighted TV value of each iterate under the weights it was solved
    /// with.
    pub weighted_tv_values: Vec<f64>,
    /// `sum log(||(Dx)_{ij}|| + eps)` per iterate.
    pub logsum_values: Vec<f64>,
    pub statuses: Vec<SolveStatus>,
}

impl TvTrace {
    pub fn last(&self) -> &ImageGrid {
        self.images.last().expect("trace has at least iteration 0")
    }
}

/// Reweighted TV recovery: iteration 0 is plain TV, then per-site weights
/// `w_{ij} = 1 / (||(D x)_{ij}|| + eps)`. Each solve warm-starts from the
/// previous iterate.
pub fn reweight_tv_run(
    sampler: &FourierSampler,
    y: &Array1<f64>,
    eps: f64,
    l_max: usize,
    opts: &TvOptions,
) -> Result<TvTrace> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument("eps must be positive".into()));
    }
    let k = sampler.n() - 1;
    let mut weights = Array2::ones((k, k));
    let mut trace = TvTrace {
        images: Vec::new(),
        tv_values: Vec::new(),
        weighted_tv_values: Vec::new(),
        logsum_values: Vec::new(),
        statuses: Vec::new(),
    };
    let mut warm: Option<TvSolution> = None;
    for _iteration in 0..=l_max {
        let sol = solver::solve_weighted_tv_warm(
            sampler,
            y,
            &weights,
            opts,
            warm.as_ref(),
        )?;
        let mags = gradient(&sol.image).magnitudes();
        trace.tv_values.push(mags.sum());
        trace.weighted_tv_values.push((&weights * &mags).sum());
        trace
            .logsum_values
            .push(mags.iter().map(|&v| (v + eps).ln()).sum());
        trace.statuses.push(sol.status);
        trace.images.push(sol.image.clone());

        weights = mags.mapv(|v| 1.0 / (v + eps));
        warm = Some(sol);
    }
    Ok(trace)
}
