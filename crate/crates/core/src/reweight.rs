//! The iterative reweighting driver.
//!
//! Iteration zero solves the chosen program with unit weights; every
//! subsequent iteration recomputes weights from the previous iterate
//! (`w_i = 1/(|x_i| + eps)` and friends) and re-solves. Each weighted solve
//! is the minimization of a linearization of a concave log-sum surrogate
//! around the current point, so the surrogate value is non-increasing along
//! the trace; the tests lean on that invariant.

use std::time::Instant;

use ndarray::Array1;

use crate::convex::{
    least_squares_on_support, solve_weighted_bp, solve_weighted_bpdn, solve_weighted_dantzig,
    solve_weighted_residual_l1, Solution, SolveOptions, SolveStatus, SupportSet,
};
use crate::error::{Error, Result};
use crate::linalg::linf_norm;
use crate::model::ProblemInstance;
use crate::rng::RngStream;

/// Which reweighting function maps an iterate to the next weight vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightRuleKind {
    /// `w_i = 1 / (|x_i| + eps)` — linearization of `sum log(|x_i| + eps)`.
    Logsum,
    /// `w_i = 1 / (x_i^2 + eps^2)` — linearization of `sum atan(|x_i|/eps)`.
    Atan,
    /// `w_i = 1 / (|r_i| + eps)` on the residual `r = y - phi x`.
    Residual,
    /// Per-site rule on gradient magnitudes; handled by [`crate::tv`].
    TvGradient,
}

/// A weight rule together with its current stability parameter.
#[derive(Clone, Copy, Debug)]
pub struct WeightRule {
    pub kind: WeightRuleKind,
    pub epsilon: f64,
}

/// How the stability parameter `eps` is chosen at each update.
#[derive(Clone, Debug)]
pub enum EpsPolicy {
    /// One fixed value for every iteration.
    Fixed(f64),
    /// Order-statistic rule from the current iterate with a `1e-3` floor.
    AdaptiveOrderStat,
    /// Empirical maximum of `||phi^T xi||_inf` over noise draws
    /// `xi ~ N(0, sigma^2 I)`; the stream address makes the draw
    /// reproducible.
    NoiseCalibrated {
        sigma: f64,
        n_trials: usize,
        seed: (u64, u64),
    },
    /// `eps = beta * std(y)`.
    ResidualStd { beta: f64 },
}

/// Gauss-Dantzig refinement settings used inside the driver.
#[derive(Clone, Copy, Debug)]
pub struct GaussRefine {
    pub sigma: f64,
    pub alpha: f64,
    /// Compute the next weights from the refined iterate instead of the raw
    /// one. Off by default; the raw iterate is the reference behavior.
    pub weights_from_refined: bool,
}

impl GaussRefine {
    pub fn new(sigma: f64) -> Self {
        GaussRefine {
            sigma,
            alpha: 0.25,
            weights_from_refined: false,
        }
    }
}

/// Which constrained program the inner solver runs.
#[derive(Clone, Copy, Debug)]
pub enum Mode {
    Bp,
    Bpdn { delta: f64 },
    Dantzig { delta: f64, refine: Option<GaussRefine> },
    Residual,
}

#[derive(Clone, Debug)]
pub struct ReweightConfig {
    pub rule: WeightRuleKind,
    pub eps_policy: EpsPolicy,
    /// Number of reweighted iterations after the unweighted solve.
    pub l_max: usize,
    /// Early stop when the sup-norm change between iterates drops below
    /// this; 0 disables.
    pub conv_tol: f64,
    pub inner: SolveOptions,
}

impl ReweightConfig {
    pub fn fixed_eps(rule: WeightRuleKind, eps: f64, l_max: usize) -> Self {
        ReweightConfig {
            rule,
            eps_policy: EpsPolicy::Fixed(eps),
            l_max,
            conv_tol: 1e-6,
            inner: SolveOptions::default(),
        }
    }
}

/// Audit trail of one reweighted run. All lists have one entry per
/// completed iteration (the unweighted solve is entry 0).
#[derive(Clone, Debug, Default)]
pub struct IterateTrace {
    pub iterates: Vec<Array1<f64>>,
    pub weights: Vec<Array1<f64>>,
    pub epsilons: Vec<f64>,
    /// Value of the concave surrogate at each iterate (log-sum for the
    /// log-sum rule, arctangent sum for the atan rule), evaluated with the
    /// epsilon recorded for that iteration.
    pub logsum_objectives: Vec<f64>,
    pub inner_statuses: Vec<SolveStatus>,
    pub wall_times: Vec<f64>,
    /// Gauss-Dantzig refinements per iteration, when requested.
    pub refined: Option<Vec<Array1<f64>>>,
}

impl IterateTrace {
    pub fn len(&self) -> usize {
        self.iterates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.iterates.is_empty()
    }

    pub fn last(&self) -> &Array1<f64> {
        self.iterates.last().expect("trace has at least iteration 0")
    }

    /// Iterate at reweighting depth `l`, falling back to the final one when
    /// the run converged early.
    pub fn at_depth(&self, l: usize) -> &Array1<f64> {
        self.iterates.get(l).unwrap_or_else(|| self.last())
    }

    fn assert_consistent(&self) {
        let n = self.iterates.len();
        debug_assert_eq!(self.weights.len(), n);
        debug_assert_eq!(self.epsilons.len(), n);
        debug_assert_eq!(self.logsum_objectives.len(), n);
        debug_assert_eq!(self.inner_statuses.len(), n);
        debug_assert_eq!(self.wall_times.len(), n);
        if let Some(r) = &self.refined {
            debug_assert_eq!(r.len(), n);
        }
    }
}

/// `w_i = 1 / (|x_i| + eps)`.
pub fn update_weights_logsum(x: &Array1<f64>, eps: f64) -> Array1<f64> {
    assert!(eps > 0.0);
    x.mapv(|v| 1.0 / (v.abs() + eps))
}

/// `w_i = 1 / (x_i^2 + eps^2)`.
pub fn update_weights_atan(x: &Array1<f64>, eps: f64) -> Array1<f64> {
    assert!(eps > 0.0);
    x.mapv(|v| 1.0 / (v * v + eps * eps))
}

/// `w_i = 1 / (|r_i| + eps)` for a residual vector.
pub fn update_weights_residual(r: &Array1<f64>, eps: f64) -> Array1<f64> {
    assert!(eps > 0.0);
    r.mapv(|v| 1.0 / (v.abs() + eps))
}

/// Order-statistic epsilon: the `i0`-th largest magnitude of the iterate
/// with `i0 = round(m / (4 ln(n/m)))` (natural log, clamped to `[1, n]`),
/// floored at `1e-3`. Requires `n > m`.
pub fn eps_adaptive(x: &Array1<f64>, m: usize, n: usize) -> Result<f64> {
    if n <= m {
        return Err(Error::InvalidArgument(format!(
            "adaptive eps needs n > m, got n = {n}, m = {m}"
        )));
    }
    if x.len() != n {
        return Err(Error::DimensionMismatch(
            "iterate length does not match n".into(),
        ));
    }
    let i0 = (m as f64 / (4.0 * (n as f64 / m as f64).ln())).round() as i64;
    let i0 = i0.clamp(1, n as i64) as usize;
    let mut mags: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    mags.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(mags[i0 - 1].max(1e-3))
}

/// Empirical maximum of `||phi^T xi||_inf` over `n_trials` draws of
/// `xi ~ N(0, sigma^2 I_m)`, floored at `1e-12`.
pub fn eps_noise_calibrated(
    problem: &ProblemInstance,
    sigma: f64,
    n_trials: usize,
    rng: &mut RngStream,
) -> f64 {
    if sigma == 0.0 {
        return 1e-12;
    }
    let mut best: f64 = 0.0;
    for _ in 0..n_trials {
        let xi = Array1::from_shape_fn(problem.m, |_| sigma * rng.normal());
        best = best.max(linf_norm(&problem.adjoint(&xi)));
    }
    best.max(1e-12)
}

/// Likely upper bound on the noise norm: `delta = sigma * sqrt(m + 2 sqrt(2m))`.
pub fn delta_noise(sigma: f64, m: usize) -> f64 {
    assert!(sigma >= 0.0 && m >= 1);
    sigma * ((m as f64) + 2.0 * (2.0 * m as f64).sqrt()).sqrt()
}

/// Gauss-Dantzig refinement: threshold the estimate at `alpha * sigma` and
/// re-fit by least squares on the surviving support.
pub fn gauss_dantzig_refine(
    problem: &ProblemInstance,
    x: &Array1<f64>,
    sigma: f64,
    alpha: f64,
) -> Result<Array1<f64>> {
    let support = SupportSet::from_threshold(x, alpha * sigma);
    least_squares_on_support(problem, &support)
}

/// Squared estimation error normalized by the oracle ideal
/// `sum_i min(x0_i^2, sigma^2)`.
pub fn rho_squared(x_hat: &Array1<f64>, x0: &Array1<f64>, sigma: f64) -> Result<f64> {
    if x_hat.len() != x0.len() {
        return Err(Error::DimensionMismatch("rho_squared length mismatch".into()));
    }
    let denom: f64 = x0.iter().map(|&v| (v * v).min(sigma * sigma)).sum();
    if denom == 0.0 {
        return Err(Error::Undefined("rho_squared denominator is zero"));
    }
    let num: f64 = x_hat
        .iter()
        .zip(x0.iter())
        .map(|(&a, &b)| (a - b) * (a - b))
        .sum();
    Ok(num / denom)
}

fn sample_std(y: &Array1<f64>) -> f64 {
    let m = y.len() as f64;
    let mean = y.sum() / m;
    (y.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>() / m).sqrt()
}

fn surrogate_value(kind: WeightRuleKind, v: &Array1<f64>, eps: f64) -> f64 {
    match kind {
        WeightRuleKind::Logsum | WeightRuleKind::Residual | WeightRuleKind::TvGradient => {
            v.iter().map(|&t| (t.abs() + eps).ln()).sum()
        }
        WeightRuleKind::Atan => v.iter().map(|&t| (t.abs() / eps).atan()).sum(),
    }
}

/// Run the reweighted iteration for one problem and mode.
pub fn reweight_run(
    problem: &ProblemInstance,
    mode: Mode,
    config: &ReweightConfig,
) -> Result<IterateTrace> {
    let weight_len = match mode {
        Mode::Residual => problem.m,
        _ => problem.n,
    };
    match (mode, config.rule) {
        (Mode::Residual, WeightRuleKind::Residual) => {}
        (Mode::Residual, _) | (_, WeightRuleKind::Residual) => {
            return Err(Error::InvalidArgument(
                "the residual rule pairs with residual mode only".into(),
            ));
        }
        (_, WeightRuleKind::TvGradient) => {
            return Err(Error::InvalidArgument(
                "the tv-gradient rule is driven by the tv module".into(),
            ));
        }
        _ => {}
    }

    // Policies that do not depend on the iterate are resolved once.
    let static_eps = match &config.eps_policy {
        EpsPolicy::Fixed(v) => {
            if !(*v > 0.0) {
                return Err(Error::InvalidArgument("fixed eps must be positive".into()));
            }
            Some(*v)
        }
        EpsPolicy::NoiseCalibrated {
            sigma,
            n_trials,
            seed,
        } => {
            let mut rng = RngStream::new(seed.0, seed.1);
            Some(eps_noise_calibrated(problem, *sigma, *n_trials, &mut rng))
        }
        EpsPolicy::ResidualStd { beta } => Some((beta * sample_std(&problem.y)).max(1e-12)),
        EpsPolicy::AdaptiveOrderStat => None,
    };

    let mut trace = IterateTrace::default();
    if matches!(mode, Mode::Dantzig { refine: Some(_), .. }) {
        trace.refined = Some(Vec::new());
    }

    let mut weights = Array1::ones(weight_len);
    for iteration in 0..=config.l_max {
        let started = Instant::now();
        let sol: Solution = match mode {
            Mode::Bp => solve_weighted_bp(problem, &weights, &config.inner),
            Mode::Bpdn { delta } => solve_weighted_bpdn(problem, &weights, delta, &config.inner),
            Mode::Dantzig { delta, .. } => {
                solve_weighted_dantzig(problem, &weights, delta, &config.inner)
            }
            Mode::Residual => solve_weighted_residual_l1(problem, &weights, &config.inner),
        }
        .map_err(|e| Error::Inner {
            iteration,
            source: Box::new(e),
        })?;
        if sol.status == SolveStatus::Infeasible {
            return Err(Error::Inner {
                iteration,
                source: Box::new(Error::InvalidArgument(
                    "inner program reported infeasible".into(),
                )),
            });
        }
        let wall = started.elapsed().as_secs_f64();

        let x = sol.x;
        let refined = match mode {
            Mode::Dantzig {
                refine: Some(gr), ..
            } => Some(
                gauss_dantzig_refine(problem, &x, gr.sigma, gr.alpha).map_err(|e| {
                    Error::Inner {
                        iteration,
                        source: Box::new(e),
                    }
                })?,
            ),
            _ => None,
        };

        // The vector the rule looks at: the iterate, the residual, or the
        // refined iterate when so configured.
        let rule_input: Array1<f64> = match mode {
            Mode::Residual => problem.residual(&x),
            Mode::Dantzig {
                refine: Some(gr), ..
            } if gr.weights_from_refined => refined.clone().unwrap(),
            _ => x.clone(),
        };

        let eps = match static_eps {
            Some(v) => v,
            None => eps_adaptive(&rule_input, problem.m, problem.n).map_err(|e| Error::Inner {
                iteration,
                source: Box::new(e),
            })?,
        };

        trace.weights.push(weights.clone());
        trace.epsilons.push(eps);
        trace
            .logsum_objectives
            .push(surrogate_value(config.rule, &rule_input, eps));
        trace.inner_statuses.push(sol.status);
        trace.wall_times.push(wall);
        if let Some(r) = refined {
            trace.refined.as_mut().unwrap().push(r);
        }

        let converged = trace
            .iterates
            .last()
            .map(|prev| linf_norm(&(&x - prev)) <= config.conv_tol)
            .unwrap_or(false);
        trace.iterates.push(x);

        if converged {
            break;
        }
        if iteration < config.l_max {
            weights = match config.rule {
                WeightRuleKind::Logsum => update_weights_logsum(&rule_input, eps),
                WeightRuleKind::Atan => update_weights_atan(&rule_input, eps),
                WeightRuleKind::Residual => update_weights_residual(&rule_input, eps),
                WeightRuleKind::TvGradient => unreachable!(),
            };
        }
    }

    trace.assert_consistent();
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::{array, Array2};

    use crate::model::gen_gaussian_matrix;

    #[test]
    fn logsum_weights_examples() {
        let w = update_weights_logsum(&Array1::zeros(4), 0.1);
        assert!(w.iter().all(|&v| (v - 10.0).abs() < 1e-12));

        let w = update_weights_logsum(&array![1.0, 0.0], 0.1);
        assert_abs_diff_eq!(w[0], 1.0 / 1.1, epsilon = 1e-12);
        assert_abs_diff_eq!(w[1], 10.0, epsilon = 1e-12);
    }

    #[test]
    fn logsum_weights_are_monotone_in_magnitude() {
        let mut rng = RngStream::new(2, 0);
        let x = Array1::from_shape_fn(32, |_| rng.normal());
        let w = update_weights_logsum(&x, 0.05);
        for i in 0..32 {
            for j in 0..32 {
                if x[i].abs() >= x[j].abs() {
                    assert!(w[i] <= w[j] + 1e-15);
                }
            }
        }
    }

    #[test]
    fn atan_weights_examples() {
        let w = update_weights_atan(&Array1::zeros(3), 0.1);
        assert!(w.iter().all(|&v| (v - 100.0).abs() < 1e-9));

        let w = update_weights_atan(&array![1.0], 0.1);
        assert_abs_diff_eq!(w[0], 1.0 / 1.01, epsilon = 1e-12);

        let mut rng = RngStream::new(3, 0);
        let x = Array1::from_shape_fn(16, |_| rng.normal());
        let flipped = x.mapv(|v| -v);
        assert_eq!(update_weights_atan(&x, 0.2), update_weights_atan(&flipped, 0.2));
    }

    #[test]
    fn residual_weights_examples() {
        let w = update_weights_residual(&Array1::zeros(5), 0.25);
        assert!(w.iter().all(|&v| (v - 4.0).abs() < 1e-12));

        let w = update_weights_residual(&array![0.9, 0.0], 0.1);
        assert_abs_diff_eq!(w[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(w[1], 10.0, epsilon = 1e-12);
    }

    #[test]
    fn adaptive_eps_order_statistic() {
        // i0 = round(128 / (4 ln 2)) = 46.
        let mut x = Array1::zeros(256);
        for i in 0..256 {
            x[i] = (256 - i) as f64; // |x|_(k) = 256 - k + 1
        }
        let eps = eps_adaptive(&x, 128, 256).unwrap();
        assert_abs_diff_eq!(eps, (256 - 46 + 1) as f64, epsilon = 1e-12);

        let tiny = Array1::from_elem(256, 1e-5);
        assert_eq!(eps_adaptive(&tiny, 128, 256).unwrap(), 1e-3);

        let mut scaled = Array1::zeros(256);
        for i in 0..46 {
            scaled[i] = 1.0;
        }
        scaled[45] = 0.5; // 46th largest
        assert_abs_diff_eq!(eps_adaptive(&scaled, 128, 256).unwrap(), 0.5, epsilon = 1e-12);

        assert!(eps_adaptive(&Array1::zeros(16), 16, 16).is_err());
    }

    #[test]
    fn noise_calibrated_eps_scaling_and_floor() {
        let mut rng = RngStream::new(5, 0);
        let phi = gen_gaussian_matrix(12, 30, false, &mut rng);
        let problem = ProblemInstance::new(phi, Array1::zeros(12)).unwrap();

        assert_eq!(
            eps_noise_calibrated(&problem, 0.0, 100, &mut RngStream::new(1, 1)),
            1e-12
        );

        let a = eps_noise_calibrated(&problem, 1.0, 50, &mut RngStream::new(9, 2));
        let b = eps_noise_calibrated(&problem, 2.0, 50, &mut RngStream::new(9, 2));
        assert_abs_diff_eq!(b, 2.0 * a, epsilon = 1e-12);
    }

    #[test]
    fn noise_calibrated_eps_scalar_identity_case() {
        // phi = 1x1 identity: the statistic is the max of 100 half-normal
        // draws, which concentrates near 2.8.
        let problem = ProblemInstance::new(array![[1.0]], array![0.0]).unwrap();
        let mut sum = 0.0;
        for t in 0..200 {
            sum += eps_noise_calibrated(&problem, 1.0, 100, &mut RngStream::new(33, t));
        }
        let mean = sum / 200.0;
        assert!((mean - 2.8).abs() <= 0.5, "mean of max stat {mean}");
    }

    #[test]
    fn delta_noise_examples() {
        assert_eq!(delta_noise(0.0, 7), 0.0);
        assert_abs_diff_eq!(delta_noise(1.0, 128), 160.0f64.sqrt(), epsilon = 1e-12);

        // Tail check: delta bounds the actual noise norm most of the time.
        let mut rng = RngStream::new(6, 0);
        let m = 128;
        let delta = delta_noise(1.0, m);
        let mut covered = 0;
        let trials = 10_000;
        for _ in 0..trials {
            let z = Array1::from_shape_fn(m, |_| rng.normal());
            if crate::linalg::l2_norm(&z) <= delta {
                covered += 1;
            }
        }
        assert!(
            covered as f64 >= 0.95 * trials as f64,
            "coverage {covered}/{trials}"
        );
    }

    #[test]
    fn gauss_dantzig_refinement_thresholds_and_refits() {
        let problem =
            ProblemInstance::new(Array2::eye(2), array![1.0, 0.01]).unwrap();
        let refined =
            gauss_dantzig_refine(&problem, &problem.y.clone(), 0.11, 0.25).unwrap();
        assert_abs_diff_eq!(refined[0], 1.0, epsilon = 1e-12);
        assert_eq!(refined[1], 0.0);

        let zero = gauss_dantzig_refine(&problem, &Array1::zeros(2), 0.11, 0.25).unwrap();
        assert!(zero.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn gauss_dantzig_exact_on_single_spike() {
        let mut rng = RngStream::new(7, 0);
        let phi = gen_gaussian_matrix(10, 16, false, &mut rng);
        let mut x0 = Array1::zeros(16);
        x0[3] = 2.0;
        let y = phi.dot(&x0);
        let problem = ProblemInstance::new(phi, y).unwrap();
        // A noisy estimate that still puts index 3 above the threshold.
        let mut estimate = Array1::from_elem(16, 0.01);
        estimate[3] = 1.5;
        let refined = gauss_dantzig_refine(&problem, &estimate, 0.5, 0.25).unwrap();
        for i in 0..16 {
            assert_abs_diff_eq!(refined[i], x0[i], epsilon = 1e-9);
        }
    }

    #[test]
    fn rho_squared_examples() {
        let x0 = array![1.0];
        assert_eq!(rho_squared(&x0, &x0, 0.5).unwrap(), 0.0);
        assert_abs_diff_eq!(
            rho_squared(&array![0.0], &x0, 0.5).unwrap(),
            4.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            rho_squared(&array![0.0, 0.0], &array![1.0, 1.0], 2.0).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        assert!(rho_squared(&array![0.0], &array![0.0], 0.5).is_err());
    }

    #[test]
    fn zero_lmax_returns_only_the_unweighted_solve() {
        let mut rng = RngStream::new(8, 0);
        let phi = gen_gaussian_matrix(8, 20, false, &mut rng);
        let mut x0 = Array1::zeros(20);
        x0[4] = 1.0;
        let y = phi.dot(&x0);
        let problem = ProblemInstance::new(phi, y).unwrap();

        let config = ReweightConfig::fixed_eps(WeightRuleKind::Logsum, 0.1, 0);
        let trace = reweight_run(&problem, Mode::Bp, &config).unwrap();
        assert_eq!(trace.len(), 1);
        assert!(trace.weights[0].iter().all(|&w| w == 1.0));
    }

    #[test]
    fn fixed_point_stops_early() {
        // k=1 spike is recovered exactly at iteration 0; iteration 1
        // reproduces it and the driver stops.
        let mut rng = RngStream::new(9, 0);
        let phi = gen_gaussian_matrix(8, 16, false, &mut rng);
        let mut x0 = Array1::zeros(16);
        x0[11] = 1.0;
        let y = phi.dot(&x0);
        let problem = ProblemInstance::new(phi, y).unwrap();

        let config = ReweightConfig::fixed_eps(WeightRuleKind::Logsum, 0.1, 6);
        let trace = reweight_run(&problem, Mode::Bp, &config).unwrap();
        assert!(trace.len() < 7, "converged trace has {} entries", trace.len());
        let last = trace.last();
        for i in 0..16 {
            assert_abs_diff_eq!(last[i], x0[i], epsilon = 1e-6);
        }
    }

    #[test]
    fn residual_mode_checks_rule_pairing() {
        let mut rng = RngStream::new(10, 0);
        let phi = gen_gaussian_matrix(12, 4, false, &mut rng);
        let y = Array1::from_shape_fn(12, |_| rng.normal());
        let problem = ProblemInstance::new(phi, y).unwrap();

        let bad = ReweightConfig::fixed_eps(WeightRuleKind::Logsum, 0.1, 1);
        assert!(reweight_run(&problem, Mode::Residual, &bad).is_err());

        let good = ReweightConfig::fixed_eps(WeightRuleKind::Residual, 0.1, 1);
        let trace = reweight_run(&problem, Mode::Residual, &good).unwrap();
        assert_eq!(trace.weights[0].len(), 12);
    }

    #[test]
    fn weights_stay_positive_and_finite() {
        let mut rng = RngStream::new(12, 0);
        let phi = gen_gaussian_matrix(10, 24, false, &mut rng);
        let mut x0 = Array1::zeros(24);
        for &i in &rng.choose_indices(24, 3) {
            x0[i] = rng.normal();
        }
        let y = phi.dot(&x0);
        let problem = ProblemInstance::new(phi, y).unwrap();
        let config = ReweightConfig::fixed_eps(WeightRuleKind::Logsum, 0.05, 3);
        let trace = reweight_run(&problem, Mode::Bp, &config).unwrap();
        for w in &trace.weights {
            assert!(w.iter().all(|&v| v > 0.0 && v.is_finite()));
        }
    }
}
