//! Sparse-recovery phase transition: success probability of unweighted and
//! reweighted equality-constrained recovery as a function of sparsity,
//! stability parameter, and reweighting depth.

use std::path::PathBuf;

use rayon::prelude::*;

use rewl1_core::model::{gen_gaussian_matrix, gen_signal, ProblemInstance, SignalKind, SignalSpec};
use rewl1_core::reweight::{reweight_run, Mode, ReweightConfig, WeightRuleKind};
use rewl1_core::rng::RngStream;

use super::{fmt_f64, linf_error, rel_l2_error, stream_id, CsvWriter, SUCCESS_LINF_TOL};
use crate::config::ExperimentConfig;
use crate::RunError;

const SWEEP_TAG: u64 = 1;

struct Cell {
    k: usize,
    eps: f64,
    depth: usize,
    trial: usize,
    success: bool,
    linf: f64,
    rel_l2: f64,
    iterations_run: usize,
}

pub fn run_phase_transition(config: &ExperimentConfig) -> Result<Vec<PathBuf>, RunError> {
    let (n, m) = (config.n, config.m);
    let depths = &config.iter_list;
    let l_max = config.l_max();

    let units: Vec<(usize, usize)> = config
        .k_list
        .iter()
        .flat_map(|&k| (0..config.trials).map(move |t| (k, t)))
        .collect();

    let results: Vec<Vec<Cell>> = units
        .par_iter()
        .map(|&(k, trial)| {
            let mut rng = RngStream::new(
                config.master_seed,
                stream_id(SWEEP_TAG.wrapping_mul(1 << 20).wrapping_add(k as u64), trial as u64),
            );
            let phi = gen_gaussian_matrix(m, n, false, &mut rng);
            let truth = gen_signal(
                &SignalSpec {
                    kind: SignalKind::SparseGaussian { k },
                    n,
                    seed: rng.stream_id(),
                },
                &mut rng,
            )
            .expect("valid spec");
            let y = phi.dot(&truth.x0);
            let problem = ProblemInstance::new(phi, y).expect("consistent dims");

            let mut cells = Vec::new();
            for &eps in &config.eps_list {
                let reweight = ReweightConfig::fixed_eps(WeightRuleKind::Logsum, eps, l_max);
                let trace = match reweight_run(&problem, Mode::Bp, &reweight) {
                    Ok(t) => t,
                    Err(e) => panic!("inner solve failed at k={k}, trial={trial}: {e}"),
                };
                for &depth in depths {
                    let x = trace.at_depth(depth);
                    let linf = linf_error(x, &truth.x0);
                    cells.push(Cell {
                        k,
                        eps,
                        depth,
                        trial,
                        success: linf <= SUCCESS_LINF_TOL,
                        linf,
                        rel_l2: rel_l2_error(x, &truth.x0),
                        iterations_run: trace.len() - 1,
                    });
                }
            }
            cells
        })
        .collect();

    let mut cells: Vec<Cell> = results.into_iter().flatten().collect();
    cells.sort_by(|a, b| {
        (a.k, ordf(a.eps), a.depth, a.trial).partial_cmp(&(b.k, ordf(b.eps), b.depth, b.trial)).unwrap()
    });

    let mut trials_csv = CsvWriter::create(
        &config.out_dir,
        "phase_transition_trials.csv",
        config,
        "k,eps,n_iters,trial,success,linf_err,rel_l2_err,iterations_run",
    )?;
    for c in &cells {
        trials_csv.row(&[
            c.k.to_string(),
            fmt_f64(c.eps),
            c.depth.to_string(),
            c.trial.to_string(),
            (c.success as u8).to_string(),
            fmt_f64(c.linf),
            fmt_f64(c.rel_l2),
            c.iterations_run.to_string(),
        ])?;
    }
    let trials_path = trials_csv.finish()?;

    let mut summary = CsvWriter::create(
        &config.out_dir,
        "phase_transition_summary.csv",
        config,
        "k,eps,n_iters,trials,successes,prob,mean_l2_err",
    )?;
    for &k in &config.k_list {
        for &eps in &config.eps_list {
            for &depth in depths {
                let group: Vec<&Cell> = cells
                    .iter()
                    .filter(|c| c.k == k && c.eps == eps && c.depth == depth)
                    .collect();
                let successes = group.iter().filter(|c| c.success).count();
                let mean_l2 =
                    group.iter().map(|c| c.rel_l2).sum::<f64>() / group.len().max(1) as f64;
                summary.row(&[
                    k.to_string(),
                    fmt_f64(eps),
                    depth.to_string(),
                    group.len().to_string(),
                    successes.to_string(),
                    fmt_f64(successes as f64 / group.len().max(1) as f64),
                    fmt_f64(mean_l2),
                ])?;
            }
        }
    }
    let summary_path = summary.finish()?;
    let meta = super::write_metadata(config)?;
    Ok(vec![trials_path, summary_path, meta])
}

fn ordf(v: f64) -> ordered::OrdF64 {
    ordered::OrdF64(v)
}

mod ordered {
    #[derive(PartialEq, PartialOrd)]
    pub struct OrdF64(pub f64);
}
