//! Sparse and compressible recovery with the order-statistic epsilon rule.
//!
//! Sparse trials compare Gaussian spikes against Bernoulli spikes at the
//! same support and sign pattern (the generators consume identical
//! randomness), so the unweighted curves coincide and the reweighted gain
//! difference is the measured effect. Compressible trials record the
//! l2-error improvement ratio of the final iterate over the unweighted one.

use std::path::PathBuf;

use rayon::prelude::*;

use rewl1_core::model::{gen_gaussian_matrix, gen_signal, ProblemInstance, SignalKind, SignalSpec};
use rewl1_core::reweight::{reweight_run, EpsPolicy, Mode, ReweightConfig, WeightRuleKind};
use rewl1_core::rng::RngStream;

use super::{fmt_f64, improvement_ratio, linf_error, median, stream_id, CsvWriter, SUCCESS_LINF_TOL};
use crate::config::ExperimentConfig;
use crate::RunError;

const SWEEP_TAG: u64 = 2;

struct SparseCell {
    kind: &'static str,
    k: usize,
    trial: usize,
    success_unweighted: bool,
    success_reweighted: bool,
}

struct CompressibleCell {
    p: f64,
    trial: usize,
    ratio: f64,
}

fn adaptive_config(l_max: usize) -> ReweightConfig {
    ReweightConfig {
        rule: WeightRuleKind::Logsum,
        eps_policy: EpsPolicy::AdaptiveOrderStat,
        l_max,
        conv_tol: 1e-6,
        inner: Default::default(),
    }
}

pub fn run_adaptive_eps(config: &ExperimentConfig) -> Result<Vec<PathBuf>, RunError> {
    let (n, m) = (config.n, config.m);
    let l_max = config.l_max();

    // Sparse part: both spike kinds at every k.
    let sparse_units: Vec<(usize, usize)> = config
        .k_list
        .iter()
        .flat_map(|&k| (0..config.trials).map(move |t| (k, t)))
        .collect();
    let sparse: Vec<Vec<SparseCell>> = sparse_units
        .par_iter()
        .map(|&(k, trial)| {
            let mut cells = Vec::new();
            for (kind_name, kind) in [
                ("sparse-gaussian", SignalKind::SparseGaussian { k }),
                ("sparse-bernoulli", SignalKind::SparseBernoulli { k }),
            ] {
                // Identical stream for both kinds: same matrix, support,
                // and signs.
                let mut rng = RngStream::new(
                    config.master_seed,
                    stream_id(SWEEP_TAG.wrapping_mul(1 << 20).wrapping_add(k as u64), trial as u64),
                );
                let phi = gen_gaussian_matrix(m, n, false, &mut rng);
                let truth = gen_signal(
                    &SignalSpec {
                        kind,
                        n,
                        seed: rng.stream_id(),
                    },
                    &mut rng,
                )
                .expect("valid spec");
                let y = phi.dot(&truth.x0);
                let problem = ProblemInstance::new(phi, y).expect("consistent dims");
                let trace = reweight_run(&problem, Mode::Bp, &adaptive_config(l_max))
                    .expect("inner solve");
                cells.push(SparseCell {
                    kind: kind_name,
                    k,
                    trial,
                    success_unweighted: linf_error(trace.at_depth(0), &truth.x0)
                        <= SUCCESS_LINF_TOL,
                    success_reweighted: linf_error(trace.at_depth(l_max), &truth.x0)
                        <= SUCCESS_LINF_TOL,
                });
            }
            cells
        })
        .collect();
    let mut sparse: Vec<SparseCell> = sparse.into_iter().flatten().collect();
    sparse.sort_by(|a, b| (a.kind, a.k, a.trial).cmp(&(b.kind, b.k, b.trial)));

    // Compressible part: improvement ratios per decay exponent.
    let comp_units: Vec<(usize, usize)> = config
        .p_list
        .iter()
        .enumerate()
        .flat_map(|(pi, _)| (0..config.trials).map(move |t| (pi, t)))
        .collect();
    let comp: Vec<CompressibleCell> = comp_units
        .par_iter()
        .map(|&(pi, trial)| {
            let p = config.p_list[pi];
            let mut rng = RngStream::new(
                config.master_seed,
                stream_id(
                    SWEEP_TAG.wrapping_mul(1 << 20).wrapping_add(1000 + pi as u64),
                    trial as u64,
                ),
            );
            let phi = gen_gaussian_matrix(m, n, false, &mut rng);
            let truth = gen_signal(
                &SignalSpec {
                    kind: SignalKind::Compressible { p },
                    n,
                    seed: rng.stream_id(),
                },
                &mut rng,
            )
            .expect("valid spec");
            let y = phi.dot(&truth.x0);
            let problem = ProblemInstance::new(phi, y).expect("consistent dims");
            let trace =
                reweight_run(&problem, Mode::Bp, &adaptive_config(l_max)).expect("inner solve");
            CompressibleCell {
                p,
                trial,
                ratio: improvement_ratio(trace.at_depth(l_max), trace.at_depth(0), &truth.x0),
            }
        })
        .collect();
    let mut comp = comp;
    comp.sort_by(|a, b| (a.p, a.trial).partial_cmp(&(b.p, b.trial)).unwrap());

    let mut trials_csv = CsvWriter::create(
        &config.out_dir,
        "adaptive_eps_trials.csv",
        config,
        "kind,k,p,trial,success_unweighted,success_reweighted,l2_ratio",
    )?;
    for c in &sparse {
        trials_csv.row(&[
            c.kind.to_string(),
            c.k.to_string(),
            String::new(),
            c.trial.to_string(),
            (c.success_unweighted as u8).to_string(),
            (c.success_reweighted as u8).to_string(),
            String::new(),
        ])?;
    }
    for c in &comp {
        trials_csv.row(&[
            "compressible".to_string(),
            String::new(),
            fmt_f64(c.p),
            c.trial.to_string(),
            String::new(),
            String::new(),
            fmt_f64(c.ratio),
        ])?;
    }
    let trials_path = trials_csv.finish()?;

    let mut summary = CsvWriter::create(
        &config.out_dir,
        "adaptive_eps_summary.csv",
        config,
        "kind,k,p,trials,successes_unweighted,successes_reweighted,prob_unweighted,prob_reweighted,median_ratio",
    )?;
    for kind in ["sparse-gaussian", "sparse-bernoulli"] {
        for &k in &config.k_list {
            let group: Vec<&SparseCell> = sparse
                .iter()
                .filter(|c| c.kind == kind && c.k == k)
                .collect();
            let t = group.len().max(1) as f64;
            let su = group.iter().filter(|c| c.success_unweighted).count();
            let sr = group.iter().filter(|c| c.success_reweighted).count();
            summary.row(&[
                kind.to_string(),
                k.to_string(),
                String::new(),
                group.len().to_string(),
                su.to_string(),
                sr.to_string(),
                fmt_f64(su as f64 / t),
                fmt_f64(sr as f64 / t),
                String::new(),
            ])?;
        }
    }
    for &p in &config.p_list {
        let mut ratios: Vec<f64> = comp.iter().filter(|c| c.p == p).map(|c| c.ratio).collect();
        let count = ratios.len();
        let med = median(&mut ratios);
        summary.row(&[
            "compressible".to_string(),
            String::new(),
            fmt_f64(p),
            count.to_string(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            fmt_f64(med),
        ])?;
    }
    let summary_path = summary.finish()?;
    let meta = super::write_metadata(config)?;
    Ok(vec![trials_path, summary_path, meta])
}
