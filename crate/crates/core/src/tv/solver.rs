//! Weighted TV minimization under exact Fourier data consistency, solved
//! with a primal-dual hybrid gradient (Chambolle-Pock) scheme. The prox of
//! the data term is the exact coefficient-replacement projection, so every
//! primal iterate is feasible; the dual prox is a per-site projection onto
//! the disc of radius `w_{ij}`.

use ndarray::{Array1, Array2};

use super::{gradient, gradient_adjoint, FourierSampler, GradientField, ImageGrid};
use crate::convex::SolveStatus;
use crate::error::{Error, Result};

/// Squared operator norm bound for the forward-difference gradient.
const GRAD_NORM2: f64 = 8.0;

#[derive(Clone, Copy, Debug)]
pub struct TvOptions {
    /// Relative primal-dual residual target.
    pub tol: f64,
    /// Inner iteration cap.
    pub max_iter: usize,
    /// How often the residual test runs.
    pub check_every: usize,
}

impl Default for TvOptions {
    fn default() -> Self {
        TvOptions {
            tol: 1e-6,
            max_iter: 5000,
            check_every: 100,
        }
    }
}

/// Result of one weighted TV solve.
#[derive(Clone, Debug)]
pub struct TvSolution {
    pub image: ImageGrid,
    pub status: SolveStatus,
    pub iterations: usize,
    /// Dual field at exit; reused to warm-start reweighted runs.
    pub dual: GradientField,
}

/// Minimize `sum w_{ij} ||(D x)_{ij}||` subject to measurement consistency.
pub fn solve_weighted_tv(
    sampler: &FourierSampler,
    y: &Array1<f64>,
    weights: &Array2<f64>,
    opts: &TvOptions,
) -> Result<TvSolution> {
    solve_weighted_tv_warm(sampler, y, weights, opts, None)
}

pub(super) fn solve_weighted_tv_warm(
    sampler: &FourierSampler,
    y: &Array1<f64>,
    weights: &Array2<f64>,
    opts: &TvOptions,
    warm: Option<&TvSolution>,
) -> Result<TvSolution> {
    let n = sampler.n();
    let k = n - 1;
    if weights.dim() != (k, k) {
        return Err(Error::DimensionMismatch(format!(
            "weights must be {k} x {k}"
        )));
    }
    if !weights.iter().all(|&w| w > 0.0 && w.is_finite()) {
        return Err(Error::InvalidArgument(
            "tv weights must be strictly positive and finite".into(),
        ));
    }

    let tau = 1.0 / GRAD_NORM2.sqrt();
    let sigma = 1.0 / GRAD_NORM2.sqrt();

    let mut x = match warm {
        Some(prev) => prev.image.clone(),
        None => ImageGrid::zeros(n),
    };
    x = sampler.project_consistent(&x, y);
    let mut px = match warm {
        Some(prev) => prev.dual.gx.clone(),
        None => Array2::zeros((k, k)),
    };
    let mut py = match warm {
        Some(prev) => prev.dual.gy.clone(),
        None => Array2::zeros((k, k)),
    };
    let mut x_bar = x.clone();

    let scale = (n * n) as f64;
    let mut status = SolveStatus::MaxIter;
    let mut iterations = opts.max_iter;
    let mut iter = 0;
    while iter < opts.max_iter {
        let px_old = px.clone();
        let py_old = py.clone();
        let x_old = x.clone();

        // Dual ascent and projection onto the weighted discs.
        let g = gradient(&x_bar);
        for i in 0..k {
            for j in 0..k {
                let mut vx = px[[i, j]] + sigma * g.gx[[i, j]];
                let mut vy = py[[i, j]] + sigma * g.gy[[i, j]];
                let norm = (vx * vx + vy * vy).sqrt();
                let w = weights[[i, j]];
                if norm > w {
                    let f = w / norm;
                    vx *= f;
                    vy *= f;
                }
                px[[i, j]] = vx;
                py[[i, j]] = vy;
            }
        }

        // Primal descent and exact projection onto the data set.
        let div = gradient_adjoint(
            &GradientField {
                gx: px.clone(),
                gy: py.clone(),
            },
            n,
        );
        let candidate = ImageGrid {
            n,
            pixels: &x.pixels - &(&div.pixels * tau),
        };
        x = sampler.project_consistent(&candidate, y);
        x_bar = ImageGrid {
            n,
            pixels: &(&x.pixels * 2.0) - &x_old.pixels,
        };

        iter += 1;
        if iter % opts.check_every == 0 || iter == opts.max_iter {
            // Standard PDHG residuals, averaged per element.
            let dx = ImageGrid {
                n,
                pixels: &x_old.pixels - &x.pixels,
            };
            let dpx = &px_old - &px;
            let dpy = &py_old - &py;
            let adj = gradient_adjoint(
                &GradientField {
                    gx: dpx.clone(),
                    gy: dpy.clone(),
                },
                n,
            );
            let primal: f64 = (&dx.pixels / tau - &adj.pixels)
                .iter()
                .map(|v| v * v)
                .sum::<f64>()
                .sqrt();
            let gd = gradient(&dx);
            let dual: f64 = ((&dpx / sigma - &gd.gx).iter().map(|v| v * v).sum::<f64>()
                + (&dpy / sigma - &gd.gy).iter().map(|v| v * v).sum::<f64>())
            .sqrt();
            let x_scale = 1.0 + x.frobenius_norm();
            if (primal + dual) / (scale.sqrt() * x_scale) <= opts.tol {
                status = SolveStatus::Optimal;
                iterations = iter;
                break;
            }
        }
    }

    Ok(TvSolution {
        image: x,
        status,
        iterations,
        dual: GradientField { gx: px, gy: py },
    })
}
