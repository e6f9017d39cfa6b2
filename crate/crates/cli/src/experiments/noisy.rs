//! Noise-aware recovery: reweighted quadratically constrained l1 with the
//! calibrated ball radius and correlation-based epsilon.

use std::path::PathBuf;

use rayon::prelude::*;

use rewl1_core::linalg::l2_norm;
use rewl1_core::model::{gen_gaussian_matrix, gen_signal, ProblemInstance, SignalKind, SignalSpec};
use rewl1_core::reweight::{delta_noise, reweight_run, EpsPolicy, Mode, ReweightConfig, WeightRuleKind};
use rewl1_core::rng::RngStream;

use super::{fmt_f64, improvement_ratio, median, rel_l2_error, stream_id, CsvWriter};
use crate::config::ExperimentConfig;
use crate::RunError;

const SWEEP_TAG: u64 = 3;

struct Cell {
    kind: &'static str,
    key: f64,
    trial: usize,
    sigma: f64,
    delta: f64,
    eps: f64,
    err_first: f64,
    err_final: f64,
    ratio: f64,
}

pub fn run_noisy(config: &ExperimentConfig) -> Result<Vec<PathBuf>, RunError> {
    let (n, m) = (config.n, config.m);
    let l_max = config.l_max();
    let beta = *config.beta_list.first().unwrap_or(&0.2);

    let mut kinds: Vec<(&'static str, SignalKind, f64)> = Vec::new();
    for &k in &config.k_list {
        kinds.push(("sparse-gaussian", SignalKind::SparseGaussian { k }, k as f64));
        kinds.push(("sparse-bernoulli", SignalKind::SparseBernoulli { k }, k as f64));
    }
    for &p in &config.p_list {
        kinds.push(("compressible", SignalKind::Compressible { p }, p));
    }

    let units: Vec<(usize, usize)> = kinds
        .iter()
        .enumerate()
        .flat_map(|(ki, _)| (0..config.trials).map(move |t| (ki, t)))
        .collect();

    let cells: Vec<Cell> = units
        .par_iter()
        .map(|&(ki, trial)| {
            let (kind_name, kind, key) = kinds[ki];
            let sid = stream_id(
                SWEEP_TAG.wrapping_mul(1 << 20).wrapping_add(ki as u64),
                trial as u64,
            );
            let mut rng = RngStream::new(config.master_seed, sid);
            let phi = gen_gaussian_matrix(m, n, true, &mut rng);
            let truth = gen_signal(
                &SignalSpec {
                    kind,
                    n,
                    seed: sid,
                },
                &mut rng,
            )
            .expect("valid spec");
            let clean = phi.dot(&truth.x0);
            let z0 = ndarray::Array1::from_shape_fn(m, |_| rng.normal());
            let sigma = if beta > 0.0 {
                beta * l2_norm(&clean) / l2_norm(&z0)
            } else {
                0.0
            };
            let y = &clean + &(&z0 * sigma);
            let problem = ProblemInstance::new(phi, y)
                .expect("consistent dims")
                .with_noise_sigma(sigma);
            let delta = delta_noise(sigma, m);

            let reweight = ReweightConfig {
                rule: WeightRuleKind::Logsum,
                eps_policy: EpsPolicy::NoiseCalibrated {
                    sigma,
                    n_trials: 100,
                    seed: (config.master_seed, sid ^ 0x5eed),
                },
                l_max,
                conv_tol: 1e-6,
                inner: Default::default(),
            };
            let trace =
                reweight_run(&problem, Mode::Bpdn { delta }, &reweight).expect("inner solve");
            let first = trace.at_depth(0);
            let last = trace.at_depth(l_max);
            Cell {
                kind: kind_name,
                key,
                trial,
                sigma,
                delta,
                eps: trace.epsilons[0],
                err_first: rel_l2_error(first, &truth.x0),
                err_final: rel_l2_error(last, &truth.x0),
                ratio: improvement_ratio(last, first, &truth.x0),
            }
        })
        .collect();
    let mut cells = cells;
    cells.sort_by(|a, b| {
        (a.kind, a.key, a.trial)
            .partial_cmp(&(b.kind, b.key, b.trial))
            .unwrap()
    });

    let mut trials_csv = CsvWriter::create(
        &config.out_dir,
        "noisy_trials.csv",
        config,
        "kind,k_or_p,trial,sigma,delta,eps,rel_err_unweighted,rel_err_final,l2_ratio",
    )?;
    for c in &cells {
        trials_csv.row(&[
            c.kind.to_string(),
            fmt_f64(c.key),
            c.trial.to_string(),
            fmt_f64(c.sigma),
            fmt_f64(c.delta),
            fmt_f64(c.eps),
            fmt_f64(c.err_first),
            fmt_f64(c.err_final),
            fmt_f64(c.ratio),
        ])?;
    }
    let trials_path = trials_csv.finish()?;

    let mut summary = CsvWriter::create(
        &config.out_dir,
        "noisy_summary.csv",
        config,
        "kind,k_or_p,trials,median_ratio,mean_ratio",
    )?;
    let mut seen: Vec<(&'static str, f64)> = Vec::new();
    for c in &cells {
        if !seen.contains(&(c.kind, c.key)) {
            seen.push((c.kind, c.key));
        }
    }
    for (kind, key) in seen {
        let mut ratios: Vec<f64> = cells
            .iter()
            .filter(|c| c.kind == kind && c.key == key)
            .map(|c| c.ratio)
            .collect();
        let count = ratios.len();
        let mean = ratios.iter().sum::<f64>() / count.max(1) as f64;
        summary.row(&[
            kind.to_string(),
            fmt_f64(key),
            count.to_string(),
            fmt_f64(median(&mut ratios)),
            fmt_f64(mean),
        ])?;
    }
    let summary_path = summary.finish()?;
    let meta = super::write_metadata(config)?;
    Ok(vec![trials_path, summary_path, meta])
}
