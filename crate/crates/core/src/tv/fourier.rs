//! Partial Fourier sampling with real-packed measurements.
//!
//! Frequencies use the unnormalized DFT with the origin at index (0, 0).
//! A mask is conjugate-symmetric by construction, so every measurement of a
//! real image is a real number: self-conjugate frequencies contribute their
//! (real) coefficient once, and each conjugate pair contributes the real and
//! imaginary part of its canonical representative.

use ndarray::{Array1, Array2};
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

use super::ImageGrid;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum MaskEntry {
    /// Frequency equal to its own conjugate partner: one real measurement.
    SelfConjugate(usize, usize),
    /// Canonical representative of a conjugate pair: two real measurements.
    Pair(usize, usize),
}

/// A frequency-domain sampling operator for `n x n` real images.
pub struct FourierSampler {
    n: usize,
    lines: usize,
    mask: Array2<bool>,
    entries: Vec<MaskEntry>,
    m: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl FourierSampler {
    fn from_mask(n: usize, lines: usize, mut mask: Array2<bool>) -> Self {
        // Conjugate-symmetrize, then build the packing plan in row-major
        // order of canonical representatives.
        let conj = |i: usize, j: usize| ((n - i) % n, (n - j) % n);
        let snapshot = mask.clone();
        for i in 0..n {
            for j in 0..n {
                if snapshot[[i, j]] {
                    let (ci, cj) = conj(i, j);
                    mask[[ci, cj]] = true;
                }
            }
        }
        let mut entries = Vec::new();
        let mut m = 0;
        for i in 0..n {
            for j in 0..n {
                if !mask[[i, j]] {
                    continue;
                }
                let (ci, cj) = conj(i, j);
                if (ci, cj) == (i, j) {
                    entries.push(MaskEntry::SelfConjugate(i, j));
                    m += 1;
                } else if (i, j) < (ci, cj) {
                    entries.push(MaskEntry::Pair(i, j));
                    m += 2;
                }
            }
        }
        let mut planner = FftPlanner::new();
        FourierSampler {
            n,
            lines,
            mask,
            entries,
            m,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        }
    }

    /// Sampler observing every frequency.
    pub fn full(n: usize) -> Self {
        Self::from_mask(n, n, Array2::from_elem((n, n), true))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lines(&self) -> usize {
        self.lines
    }

    /// Number of real-valued measurements.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn mask(&self) -> &Array2<bool> {
        &self.mask
    }

    fn fft2(&self, data: &mut Array2<Complex<f64>>, inverse: bool) {
        let n = self.n;
        let plan = if inverse { &self.inv } else { &self.fwd };
        for mut row in data.rows_mut() {
            let mut buf: Vec<Complex<f64>> = row.iter().cloned().collect();
            plan.process(&mut buf);
            for (dst, src) in row.iter_mut().zip(buf.iter()) {
                *dst = *src;
            }
        }
        let mut buf = vec![Complex::new(0.0, 0.0); n];
        for j in 0..n {
            for i in 0..n {
                buf[i] = data[[i, j]];
            }
            plan.process(&mut buf);
            for i in 0..n {
                data[[i, j]] = buf[i];
            }
        }
    }

    /// Masked unnormalized DFT coefficients of a real image, packed as
    /// reals.
    pub fn apply(&self, img: &ImageGrid) -> Array1<f64> {
        assert_eq!(img.n, self.n);
        let mut spectrum =
            Array2::from_shape_fn((self.n, self.n), |(i, j)| Complex::new(img.pixels[[i, j]], 0.0));
        self.fft2(&mut spectrum, false);
        self.pack(&spectrum)
    }

    fn pack(&self, spectrum: &Array2<Complex<f64>>) -> Array1<f64> {
        let mut out = Array1::zeros(self.m);
        let mut idx = 0;
        for entry in &self.entries {
            match *entry {
                MaskEntry::SelfConjugate(i, j) => {
                    out[idx] = spectrum[[i, j]].re;
                    idx += 1;
                }
                MaskEntry::Pair(i, j) => {
                    out[idx] = spectrum[[i, j]].re;
                    out[idx + 1] = spectrum[[i, j]].im;
                    idx += 2;
                }
            }
        }
        out
    }

    /// Exact transpose of [`FourierSampler::apply`].
    pub fn adjoint(&self, z: &Array1<f64>) -> ImageGrid {
        assert_eq!(z.len(), self.m);
        let n = self.n;
        let mut spectrum = Array2::from_elem((n, n), Complex::new(0.0, 0.0));
        let mut idx = 0;
        for entry in &self.entries {
            match *entry {
                MaskEntry::SelfConjugate(i, j) => {
                    spectrum[[i, j]] = Complex::new(z[idx], 0.0);
                    idx += 1;
                }
                MaskEntry::Pair(i, j) => {
                    // Half weight per element of the pair; the inverse
                    // transform sums both and restores the packed row.
                    let v = Complex::new(z[idx] / 2.0, z[idx + 1] / 2.0);
                    spectrum[[i, j]] = v;
                    spectrum[[(n - i) % n, (n - j) % n]] = v.conj();
                    idx += 2;
                }
            }
        }
        self.fft2(&mut spectrum, true);
        ImageGrid {
            n,
            pixels: Array2::from_shape_fn((n, n), |(i, j)| spectrum[[i, j]].re),
        }
    }

    /// Orthogonal projection of `img` onto `{x : apply(x) = y}`, exact up
    /// to FFT rounding: masked coefficients are replaced by the targets.
    pub fn project_consistent(&self, img: &ImageGrid, y: &Array1<f64>) -> ImageGrid {
        assert_eq!(y.len(), self.m);
        let n = self.n;
        let mut spectrum =
            Array2::from_shape_fn((n, n), |(i, j)| Complex::new(img.pixels[[i, j]], 0.0));
        self.fft2(&mut spectrum, false);
        let mut idx = 0;
        for entry in &self.entries {
            match *entry {
                MaskEntry::SelfConjugate(i, j) => {
                    spectrum[[i, j]] = Complex::new(y[idx], 0.0);
                    idx += 1;
                }
                MaskEntry::Pair(i, j) => {
                    let v = Complex::new(y[idx], y[idx + 1]);
                    spectrum[[i, j]] = v;
                    spectrum[[(n - i) % n, (n - j) % n]] = v.conj();
                    idx += 2;
                }
            }
        }
        self.fft2(&mut spectrum, true);
        let scale = 1.0 / (n * n) as f64;
        ImageGrid {
            n,
            pixels: Array2::from_shape_fn((n, n), |(i, j)| spectrum[[i, j]].re * scale),
        }
    }

    /// Measurement residual `||apply(x) - y||_2`.
    pub fn residual_norm(&self, img: &ImageGrid, y: &Array1<f64>) -> f64 {
        let z = self.apply(img);
        z.iter()
            .zip(y.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// Mask selecting, for each of `lines` equally spaced angles `pi t / lines`,
/// the `n` grid frequencies nearest the ideal line through DC, then
/// conjugate-symmetrized.
pub fn radial_sampler(n: usize, lines: usize) -> Result<FourierSampler> {
    if lines < 1 || lines > n {
        return Err(Error::InvalidArgument(format!(
            "line count must be in [1, {n}], got {lines}"
        )));
    }
    let half = (n / 2) as i64;
    let mut mask = Array2::from_elem((n, n), false);
    let wrap = |v: i64| (v.rem_euclid(n as i64)) as usize;
    for t in 0..lines {
        let theta = std::f64::consts::PI * t as f64 / lines as f64;
        let (s, c) = theta.sin_cos();
        if c.abs() >= s.abs() {
            for u in -half..half {
                let ky = (u as f64 * s / c).round() as i64;
                if ky >= -half && ky < half {
                    mask[[wrap(u), wrap(ky)]] = true;
                }
            }
        } else {
            for u in -half..half {
                let kx = (u as f64 * c / s).round() as i64;
                if kx >= -half && kx < half {
                    mask[[wrap(kx), wrap(u)]] = true;
                }
            }
        }
    }
    Ok(FourierSampler::from_mask(n, lines, mask))
}
