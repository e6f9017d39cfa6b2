//! Sparse error correction: decode a dense codeword hit by sign-flip
//! corruptions with unweighted and reweighted residual-l1 minimization.
//!
//! The unweighted decode is shared across the beta sweep within a trial;
//! only the weight updates depend on `eps = beta * std(y)`.

use std::path::PathBuf;

use ndarray::Array1;
use rayon::prelude::*;

use rewl1_core::convex::{solve_weighted_residual_l1, SolveOptions};
use rewl1_core::model::{gen_gaussian_matrix, ProblemInstance};
use rewl1_core::reweight::update_weights_residual;
use rewl1_core::rng::RngStream;

use super::{fmt_f64, linf_error, stream_id, CsvWriter, SUCCESS_LINF_TOL};
use crate::config::ExperimentConfig;
use crate::RunError;

const SWEEP_TAG: u64 = 5;

struct Cell {
    k: usize,
    beta: f64,
    trial: usize,
    eps: f64,
    success_unweighted: bool,
    success_reweighted: bool,
    linf_final: f64,
}

fn std_dev(y: &Array1<f64>) -> f64 {
    let m = y.len() as f64;
    let mean = y.sum() / m;
    (y.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>() / m).sqrt()
}

pub fn run_error_correction(config: &ExperimentConfig) -> Result<Vec<PathBuf>, RunError> {
    let (n, m) = (config.n, config.m);
    let l_max = config.l_max();
    let opts = SolveOptions::default();

    let units: Vec<(usize, usize)> = config
        .k_list
        .iter()
        .flat_map(|&k| (0..config.trials).map(move |t| (k, t)))
        .collect();

    let results: Vec<Vec<Cell>> = units
        .par_iter()
        .map(|&(k, trial)| {
            let sid = stream_id(
                SWEEP_TAG.wrapping_mul(1 << 20).wrapping_add(k as u64),
                trial as u64,
            );
            let mut rng = RngStream::new(config.master_seed, sid);
            let phi = gen_gaussian_matrix(m, n, false, &mut rng);
            let x0 = Array1::from_shape_fn(n, |_| rng.normal());
            let mut y = phi.dot(&x0);
            for &i in &rng.choose_indices(m, k) {
                y[i] = -y[i];
            }
            let problem = ProblemInstance::new(phi, y).expect("consistent dims");
            let sigma_y = std_dev(&problem.y);

            let unweighted =
                solve_weighted_residual_l1(&problem, &Array1::ones(m), &opts).expect("decode");
            let success0 = linf_error(&unweighted.x, &x0) <= SUCCESS_LINF_TOL;

            let mut cells = Vec::new();
            for &beta in &config.beta_list {
                let eps = (beta * sigma_y).max(1e-12);
                let mut x = unweighted.x.clone();
                for _ in 0..l_max {
                    let weights = update_weights_residual(&problem.residual(&x), eps);
                    x = solve_weighted_residual_l1(&problem, &weights, &opts)
                        .expect("decode")
                        .x;
                }
                let linf = linf_error(&x, &x0);
                cells.push(Cell {
                    k,
                    beta,
                    trial,
                    eps,
                    success_unweighted: success0,
                    success_reweighted: linf <= SUCCESS_LINF_TOL,
                    linf_final: linf,
                });
            }
            cells
        })
        .collect();
    let mut cells: Vec<Cell> = results.into_iter().flatten().collect();
    cells.sort_by(|a, b| {
        (a.k, a.beta, a.trial)
            .partial_cmp(&(b.k, b.beta, b.trial))
            .unwrap()
    });

    let mut trials_csv = CsvWriter::create(
        &config.out_dir,
        "error_correction_trials.csv",
        config,
        "k,corruption_frac,beta,trial,eps,success_unweighted,success_reweighted,linf_final",
    )?;
    for c in &cells {
        trials_csv.row(&[
            c.k.to_string(),
            fmt_f64(c.k as f64 / m as f64),
            fmt_f64(c.beta),
            c.trial.to_string(),
            fmt_f64(c.eps),
            (c.success_unweighted as u8).to_string(),
            (c.success_reweighted as u8).to_string(),
            fmt_f64(c.linf_final),
        ])?;
    }
    let trials_path = trials_csv.finish()?;

    let mut summary = CsvWriter::create(
        &config.out_dir,
        "error_correction_summary.csv",
        config,
        "k,corruption_frac,beta,trials,prob_unweighted,prob_reweighted",
    )?;
    for &k in &config.k_list {
        for &beta in &config.beta_list {
            let group: Vec<&Cell> = cells
                .iter()
                .filter(|c| c.k == k && c.beta == beta)
                .collect();
            let t = group.len().max(1) as f64;
            summary.row(&[
                k.to_string(),
                fmt_f64(k as f64 / m as f64),
                fmt_f64(beta),
                group.len().to_string(),
                fmt_f64(group.iter().filter(|c| c.success_unweighted).count() as f64 / t),
                fmt_f64(group.iter().filter(|c| c.success_reweighted).count() as f64 / t),
            ])?;
        }
    }
    let summary_path = summary.finish()?;
    let meta = super::write_metadata(config)?;
    Ok(vec![trials_path, summary_path, meta])
}
