//! l1-analysis recovery in redundant dictionaries.
//!
//! A Gabor dictionary of Gaussian-windowed cosine/sine pairs plays the role
//! of the redundant frame. Analysis recovery penalizes the transform
//! coefficients of the signal (`min ||W Psi^T x||_1` over `phi x = y`);
//! synthesis recovery seeks sparse coefficients with `x = Psi alpha`. The
//! two coincide for orthonormal dictionaries and differ in general.

use ndarray::{s, Array1, Array2};

use crate::convex::{
    check_weights, weighted_l1, Solution, SolveOptions, SolveStatus, FREE_PAIR_COST,
};
use crate::error::{Error, Result};
use crate::linalg::linf_norm;
use crate::lp::{single, solve_lp, LpOptions, LpStatus, StandardLp};
use crate::model::{GroundTruth, ProblemInstance};
use crate::reweight::IterateTrace;

/// Phase of a real Gabor atom.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AtomPhase {
    Cosine,
    Sine,
}

/// Parameters of one atom: window center, modulation frequency, window
/// scale, phase.
#[derive(Clone, Copy, Debug)]
pub struct AtomParams {
    pub shift: f64,
    pub frequency: f64,
    pub scale: f64,
    pub phase: AtomPhase,
}

/// A dictionary of unit-norm atoms (columns of an `n x d` matrix).
#[derive(Clone, Debug)]
pub struct Dictionary {
    atoms: Array2<f64>,
    params: Vec<AtomParams>,
}

impl Dictionary {
    /// Wrap a raw atom matrix, normalizing columns and keeping metadata.
    pub fn from_atoms(mut atoms: Array2<f64>, params: Vec<AtomParams>) -> Result<Self> {
        if atoms.ncols() != params.len() {
            return Err(Error::DimensionMismatch(
                "one parameter record per atom".into(),
            ));
        }
        for mut col in atoms.columns_mut() {
            let norm = col.dot(&col).sqrt();
            if norm < 1e-12 {
                return Err(Error::InvalidArgument("zero-norm atom".into()));
            }
            col.mapv_inplace(|v| v / norm);
        }
        Ok(Dictionary { atoms, params })
    }

    /// The identity dictionary on `R^n` (orthonormal, for reductions).
    pub fn identity(n: usize) -> Self {
        let params = (0..n)
            .map(|i| AtomParams {
                shift: i as f64,
                frequency: 0.0,
                scale: 0.0,
                phase: AtomPhase::Cosine,
            })
            .collect();
        Dictionary {
            atoms: Array2::eye(n),
            params,
        }
    }

    pub fn n(&self) -> usize {
        self.atoms.nrows()
    }

    pub fn len(&self) -> usize {
        self.atoms.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.ncols() == 0
    }

    pub fn atoms(&self) -> &Array2<f64> {
        &self.atoms
    }

    pub fn params(&self) -> &[AtomParams] {
        &self.params
    }

    pub fn overcompleteness(&self) -> f64 {
        self.len() as f64 / self.n() as f64
    }

    /// Analysis coefficients `alpha = Psi^T x`.
    pub fn analyze(&self, x: &Array1<f64>) -> Array1<f64> {
        self.atoms.t().dot(x)
    }

    /// Synthesis `x = Psi alpha`.
    pub fn synthesize(&self, alpha: &Array1<f64>) -> Array1<f64> {
        self.atoms.dot(alpha)
    }
}

/// Gaussian-windowed cosine/sine atoms on the grid
/// `(scale, shift, frequency)`, one pair per site, unit-normalized;
/// candidates whose window leaves the support are dropped.
pub fn build_gabor_dict(
    n: usize,
    scales: &[f64],
    freq_step: f64,
    shift_step: f64,
) -> Result<Dictionary> {
    if n < 8 {
        return Err(Error::InvalidArgument("dictionary needs n >= 8".into()));
    }
    if !(freq_step > 0.0) || !(shift_step > 0.0) || scales.is_empty() {
        return Err(Error::InvalidArgument(
            "scales, freq_step and shift_step must be positive".into(),
        ));
    }
    let mut columns: Vec<Array1<f64>> = Vec::new();
    let mut params = Vec::new();
    let n_freq = (std::f64::consts::PI / freq_step).floor() as usize;
    for &scale in scales {
        let mut shift = 0.0;
        while shift < n as f64 {
            for fi in 0..=n_freq {
                let frequency = fi as f64 * freq_step;
                for phase in [AtomPhase::Cosine, AtomPhase::Sine] {
                    if fi == 0 && phase == AtomPhase::Sine {
                        continue;
                    }
                    let mut atom = Array1::zeros(n);
                    for t in 0..n {
                        let arg = (t as f64 - shift) / scale;
                        let window = (-0.5 * arg * arg).exp();
                        let osc = match phase {
                            AtomPhase::Cosine => (frequency * t as f64).cos(),
                            AtomPhase::Sine => (frequency * t as f64).sin(),
                        };
                        atom[t] = window * osc;
                    }
                    let norm = atom.dot(&atom).sqrt();
                    if norm < 1e-8 {
                        continue;
                    }
                    columns.push(atom / norm);
                    params.push(AtomParams {
                        shift,
                        frequency,
                        scale,
                        phase,
                    });
                }
            }
            shift += shift_step;
        }
    }
    let d = columns.len();
    if d < n {
        return Err(Error::InvalidArgument(format!(
            "parameter grid yields d = {d} < n = {n}"
        )));
    }
    let mut atoms = Array2::zeros((n, d));
    for (j, col) in columns.into_iter().enumerate() {
        atoms.column_mut(j).assign(&col);
    }
    Ok(Dictionary { atoms, params })
}

fn feasibility_floor(problem: &ProblemInstance) -> f64 {
    crate::convex::least_squares_residual_floor(problem)
}

/// Analysis-based recovery: minimize `sum_j w_j |(Psi^T x)_j|` subject to
/// `phi x = y`.
pub fn solve_weighted_l1_analysis(
    problem: &ProblemInstance,
    dict: &Dictionary,
    w: &Array1<f64>,
    opts: &SolveOptions,
) -> Result<Solution> {
    let d = dict.len();
    check_weights(w, d)?;
    if dict.n() != problem.n {
        return Err(Error::DimensionMismatch(
            "dictionary and problem disagree on n".into(),
        ));
    }
    if linf_norm(&problem.y) == 0.0 {
        return Ok(Solution {
            x: Array1::zeros(problem.n),
            objective: 0.0,
            status: SolveStatus::Optimal,
            certificate: None,
        });
    }
    let floor = feasibility_floor(problem);
    if floor > opts.feas_tol.max(1e-9) * (1.0 + crate::linalg::l2_norm(&problem.y)) {
        return Ok(Solution {
            x: Array1::zeros(problem.n),
            objective: f64::NAN,
            status: SolveStatus::Infeasible,
            certificate: None,
        });
    }

    let n = problem.n;
    let m = problem.m;
    let w_max = w.iter().cloned().fold(0.0f64, f64::max);
    let w_hat = w / w_max;

    // Rows 0..d: Psi^T (x+ - x-) - a+ + a- = 0; rows d..d+m: phi (x+ - x-) = y.
    let mut dense = Array2::zeros((d + m, 2 * n));
    let psi_t = dict.atoms.t();
    dense.slice_mut(s![..d, ..n]).assign(&psi_t);
    dense.slice_mut(s![..d, n..]).assign(&(-&psi_t.to_owned()));
    dense.slice_mut(s![d.., ..n]).assign(&problem.phi);
    dense.slice_mut(s![d.., n..]).assign(&(-&problem.phi));

    let mut sparse_cols = Vec::with_capacity(2 * d);
    for i in 0..d {
        sparse_cols.push(single(i, -1.0));
    }
    for i in 0..d {
        sparse_cols.push(single(i, 1.0));
    }

    let mut b = Array1::zeros(d + m);
    b.slice_mut(s![d..]).assign(&problem.y);
    let mut cost = Array1::from_elem(2 * n + 2 * d, FREE_PAIR_COST);
    cost.slice_mut(s![2 * n..2 * n + d]).assign(&w_hat);
    cost.slice_mut(s![2 * n + d..]).assign(&w_hat);

    let lp = StandardLp {
        dense,
        sparse_cols,
        b,
        cost,
    };
    let sol = solve_lp(
        &lp,
        &LpOptions {
            tol: opts.tol,
            feas_tol: opts.feas_tol,
            max_iter: opts.max_iter,
        },
    )?;
    let x = &sol.z.slice(s![..n]).to_owned() - &sol.z.slice(s![n..2 * n]).to_owned();
    Ok(Solution {
        objective: weighted_l1(w, &dict.analyze(&x)),
        x,
        status: match sol.status {
            LpStatus::Optimal => SolveStatus::Optimal,
            LpStatus::MaxIter => SolveStatus::MaxIter,
        },
        certificate: None,
    })
}

/// Synthesis-based recovery: coefficients and signal.
#[derive(Clone, Debug)]
pub struct SynthesisSolution {
    pub coefficients: Array1<f64>,
    pub x: Array1<f64>,
    pub objective: f64,
    pub status: SolveStatus,
}

/// Minimize `||alpha||_1` subject to `phi Psi alpha = y`; returns both the
/// coefficients and the synthesized signal.
pub fn solve_l1_synthesis(
    problem: &ProblemInstance,
    dict: &Dictionary,
    opts: &SolveOptions,
) -> Result<SynthesisSolution> {
    if dict.n() != problem.n {
        return Err(Error::DimensionMismatch(
            "dictionary and problem disagree on n".into(),
        ));
    }
    let combined = problem.phi.dot(dict.atoms());
    let synth_problem = ProblemInstance::new(combined, problem.y.clone())?;
    let sol = crate::convex::solve_weighted_bp(&synth_problem, &Array1::ones(dict.len()), opts)?;
    let x = dict.synthesize(&sol.x);
    Ok(SynthesisSolution {
        objective: sol.objective,
        coefficients: sol.x,
        x,
        status: sol.status,
    })
}

/// Reweighted l1-analysis: iteration 0 unweighted, then
/// `w_j = 1 / (|alpha_j| + eps)` with `alpha = Psi^T x`.
pub fn reweight_analysis_run(
    problem: &ProblemInstance,
    dict: &Dictionary,
    eps: f64,
    l_max: usize,
    opts: &SolveOptions,
) -> Result<IterateTrace> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument("eps must be positive".into()));
    }
    let d = dict.len();
    let mut weights = Array1::ones(d);
    let mut trace = IterateTrace::default();
    for iteration in 0..=l_max {
        let started = std::time::Instant::now();
        let sol =
            solve_weighted_l1_analysis(problem, dict, &weights, opts).map_err(|e| Error::Inner {
                iteration,
                source: Box::new(e),
            })?;
        if sol.status == SolveStatus::Infeasible {
            return Err(Error::Inner {
                iteration,
                source: Box::new(Error::InvalidArgument(
                    "analysis program reported infeasible".into(),
                )),
            });
        }
        let alpha = dict.analyze(&sol.x);
        trace.weights.push(weights.clone());
        trace.epsilons.push(eps);
        trace
            .logsum_objectives
            .push(alpha.iter().map(|&v| (v.abs() + eps).ln()).sum());
        trace.inner_statuses.push(sol.status);
        trace.wall_times.push(started.elapsed().as_secs_f64());
        trace.iterates.push(sol.x);

        if iteration < l_max {
            weights = alpha.mapv(|v| 1.0 / (v.abs() + eps));
        }
    }
    Ok(trace)
}

/// Parameters of one Gaussian-windowed sinusoid pulse.
#[derive(Clone, Copy, Debug)]
pub struct PulseParams {
    pub amplitude: f64,
    pub center: f64,
    pub frequency: f64,
    pub scale: f64,
    pub phase: f64,
}

/// Two-pulse test signal; the default parameters sit deliberately between
/// dictionary grid points.
#[derive(Clone, Copy, Debug)]
pub struct TwoPulseParams {
    pub first: PulseParams,
    pub second: PulseParams,
}

impl TwoPulseParams {
    /// Desk defaults for a length-`n` signal.
    pub fn for_length(n: usize) -> Self {
        let nf = n as f64;
        TwoPulseParams {
            first: PulseParams {
                amplitude: 1.0,
                center: 0.323 * nf,
                frequency: 0.82,
                scale: 0.068 * nf,
                phase: 0.4,
            },
            second: PulseParams {
                amplitude: 0.8,
                center: 0.677 * nf,
                frequency: 1.63,
                scale: 0.123 * nf,
                phase: 2.1,
            },
        }
    }
}

/// Superposition of two modulated pulses, normalized to unit peak.
pub fn make_two_pulse_signal(n: usize, params: &TwoPulseParams) -> Result<GroundTruth> {
    if n < 64 {
        return Err(Error::InvalidArgument("pulse signal needs n >= 64".into()));
    }
    let mut x = Array1::zeros(n);
    for pulse in [&params.first, &params.second] {
        for t in 0..n {
            let arg = (t as f64 - pulse.center) / pulse.scale;
            x[t] += pulse.amplitude
                * (-0.5 * arg * arg).exp()
                * (pulse.frequency * t as f64 + pulse.phase).cos();
        }
    }
    let peak = linf_norm(&x);
    if peak == 0.0 {
        return Err(Error::InvalidArgument("degenerate pulse parameters".into()));
    }
    x.mapv_inplace(|v| v / peak);
    let support = x
        .iter()
        .enumerate()
        .filter(|(_, &v)| v != 0.0)
        .map(|(i, _)| i)
        .collect();
    Ok(GroundTruth { x0: x, support })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    use crate::convex::solve_weighted_bp;
    use crate::linalg::l2_norm;
    use crate::model::{gen_bernoulli_matrix, gen_gaussian_matrix};
    use crate::rng::RngStream;

    fn desk_dict(n: usize) -> Dictionary {
        build_gabor_dict(n, &[3.0, 6.0, 12.0, 24.0], std::f64::consts::PI / 10.0, 8.0).unwrap()
    }

    #[test]
    fn atoms_are_unit_norm_and_grid_is_overcomplete() {
        let dict = desk_dict(128);
        for col in dict.atoms().columns() {
            assert_abs_diff_eq!(col.dot(&col).sqrt(), 1.0, epsilon = 1e-12);
        }
        assert!(
            dict.overcompleteness() >= 4.0,
            "d/n = {}",
            dict.overcompleteness()
        );
    }

    #[test]
    fn dictionary_construction_is_deterministic() {
        let a = desk_dict(128);
        let b = desk_dict(128);
        assert_eq!(a.atoms(), b.atoms());
    }

    #[test]
    fn undersized_grids_are_rejected() {
        assert!(build_gabor_dict(128, &[4.0], 2.0, 64.0).is_err());
    }

    #[test]
    fn orthonormal_dictionary_collapses_to_basis_pursuit() {
        let mut rng = RngStream::new(31, 0);
        let phi = gen_gaussian_matrix(8, 16, false, &mut rng);
        let mut x0 = Array1::zeros(16);
        x0[2] = 1.0;
        x0[9] = -0.5;
        let y = phi.dot(&x0);
        let problem = ProblemInstance::new(phi, y).unwrap();
        let dict = Dictionary::identity(16);
        let w = Array1::ones(16);
        let opts = SolveOptions::default();

        let analysis = solve_weighted_l1_analysis(&problem, &dict, &w, &opts).unwrap();
        let bp = solve_weighted_bp(&problem, &w, &opts).unwrap();
        for i in 0..16 {
            assert_abs_diff_eq!(analysis.x[i], bp.x[i], epsilon = 1e-6);
        }

        let synthesis = solve_l1_synthesis(&problem, &dict, &opts).unwrap();
        for i in 0..16 {
            assert_abs_diff_eq!(synthesis.x[i], bp.x[i], epsilon = 1e-6);
        }
    }

    #[test]
    fn zero_observation_gives_zero_signal() {
        let dict = desk_dict(128);
        let mut rng = RngStream::new(32, 0);
        let phi = gen_bernoulli_matrix(10, 128, &mut rng);
        let problem = ProblemInstance::new(phi, Array1::zeros(10)).unwrap();
        let sol =
            solve_weighted_l1_analysis(&problem, &dict, &Array1::ones(dict.len()), &SolveOptions::default())
                .unwrap();
        assert!(sol.x.iter().all(|&v| v == 0.0));
        let synth = solve_l1_synthesis(&problem, &dict, &SolveOptions::default()).unwrap();
        assert!(l2_norm(&synth.coefficients) < 1e-7);
    }

    /// Tiny-instance oracle: on the feasible affine plane (dimension
    /// n - m), the optimum of a weighted analysis objective sits where
    /// enough analysis hyperplanes intersect; enumerate those points.
    #[test]
    fn tiny_analysis_instance_matches_enumeration_oracle() {
        let n = 6;
        let d = 9;
        let m = 4;
        let mut rng = RngStream::new(33, 0);
        let atoms = Array2::from_shape_fn((n, d), |_| rng.normal());
        let params = vec![
            AtomParams {
                shift: 0.0,
                frequency: 0.0,
                scale: 0.0,
                phase: AtomPhase::Cosine
            };
            d
        ];
        let dict = Dictionary::from_atoms(atoms, params).unwrap();
        let phi = gen_gaussian_matrix(m, n, false, &mut rng);
        let y = phi.dot(&Array1::from_shape_fn(n, |_| rng.normal()));
        let problem = ProblemInstance::new(phi.clone(), y.clone()).unwrap();
        let w = Array1::from_shape_fn(d, |_| 0.5 + rng.uniform());

        let sol =
            solve_weighted_l1_analysis(&problem, &dict, &w, &SolveOptions::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);

        // Enumerate candidate vertices: x solving phi x = y plus two active
        // analysis zeros.
        let mut best = f64::INFINITY;
        for j1 in 0..d {
            for j2 in j1 + 1..d {
                let mut a = Array2::zeros((n, n));
                a.slice_mut(s![..m, ..]).assign(&phi);
                for c in 0..n {
                    a[[m, c]] = dict.atoms()[[c, j1]];
                    a[[m + 1, c]] = dict.atoms()[[c, j2]];
                }
                let mut rhs = Array1::zeros(n);
                rhs.slice_mut(s![..m]).assign(&y);
                if let Ok(x) = crate::linalg::least_squares(&a, &rhs) {
                    let residual = &a.dot(&x) - &rhs;
                    if l2_norm(&residual) < 1e-8 {
                        best = best.min(weighted_l1(&w, &dict.analyze(&x)));
                    }
                }
            }
        }
        assert_abs_diff_eq!(sol.objective, best, epsilon = 1e-6 * (1.0 + best));
    }

    #[test]
    fn two_pulse_signal_has_unit_peak_and_misses_the_grid() {
        let n = 128;
        let params = TwoPulseParams::for_length(n);
        let gt = make_two_pulse_signal(n, &params).unwrap();
        assert_abs_diff_eq!(linf_norm(&gt.x0), 1.0, epsilon = 1e-12);

        let dict = desk_dict(n);
        let correlation = dict
            .analyze(&gt.x0)
            .iter()
            .fold(0.0f64, |a, &v| a.max(v.abs()))
            / l2_norm(&gt.x0);
        assert!(
            correlation < 0.999,
            "a dictionary atom matches the pulse too well: {correlation}"
        );

        let again = make_two_pulse_signal(n, &params).unwrap();
        assert_eq!(gt.x0, again.x0);
    }
}
