//! Model selection with the reweighted Dantzig selector and Gauss-Dantzig
//! refinement: ideal-error ratios, false positives, and correct detections
//! for the unweighted and reweighted estimators.

use std::path::PathBuf;

use rayon::prelude::*;

use rewl1_core::model::{gen_dantzig_signal, gen_gaussian_matrix, ProblemInstance};
use rewl1_core::reweight::{
    eps_noise_calibrated, reweight_run, rho_squared, EpsPolicy, GaussRefine, Mode, ReweightConfig,
    WeightRuleKind,
};
use rewl1_core::rng::RngStream;

use super::{fmt_f64, median, stream_id, CsvWriter};
use crate::config::ExperimentConfig;
use crate::RunError;

const SWEEP_TAG: u64 = 4;

struct Cell {
    k: usize,
    trial: usize,
    sigma: f64,
    delta: f64,
    rho2_unweighted: f64,
    rho2_reweighted: f64,
    fp_unweighted: usize,
    fp_reweighted: usize,
    cd_unweighted: usize,
    cd_reweighted: usize,
}

fn detection_counts(
    refined: &ndarray::Array1<f64>,
    x0: &ndarray::Array1<f64>,
) -> (usize, usize) {
    let mut false_positives = 0;
    let mut correct = 0;
    for (r, t) in refined.iter().zip(x0.iter()) {
        if *r != 0.0 {
            if *t != 0.0 {
                correct += 1;
            } else {
                false_positives += 1;
            }
        }
    }
    (false_positives, correct)
}

pub fn run_dantzig(config: &ExperimentConfig) -> Result<Vec<PathBuf>, RunError> {
    let (n, m) = (config.n, config.m);
    let l_max = config.l_max();
    let eps = *config.eps_list.first().unwrap_or(&0.1);

    let units: Vec<(usize, usize)> = config
        .k_list
        .iter()
        .flat_map(|&k| (0..config.trials).map(move |t| (k, t)))
        .collect();

    let cells: Vec<Cell> = units
        .par_iter()
        .map(|&(k, trial)| {
            let sigma = (1.0 / 3.0) * (k as f64 / m as f64).sqrt();
            let sid = stream_id(
                SWEEP_TAG.wrapping_mul(1 << 20).wrapping_add(k as u64),
                trial as u64,
            );
            let mut rng = RngStream::new(config.master_seed, sid);
            let phi = gen_gaussian_matrix(m, n, true, &mut rng);
            let truth = gen_dantzig_signal(n, k, &mut rng).expect("valid spec");
            let z = ndarray::Array1::from_shape_fn(m, |_| sigma * rng.normal());
            let y = &phi.dot(&truth.x0) + &z;
            let problem = ProblemInstance::new(phi, y)
                .expect("consistent dims")
                .with_noise_sigma(sigma);
            let delta = eps_noise_calibrated(&problem, sigma, 100, &mut rng);

            let reweight = ReweightConfig {
                rule: WeightRuleKind::Logsum,
                eps_policy: EpsPolicy::Fixed(eps),
                l_max,
                conv_tol: 1e-6,
                inner: Default::default(),
            };
            let trace = reweight_run(
                &problem,
                Mode::Dantzig {
                    delta,
                    refine: Some(GaussRefine::new(sigma)),
                },
                &reweight,
            )
            .expect("inner solve");
            let refined = trace.refined.as_ref().expect("refinement requested");
            let first = &refined[0];
            let last = refined.last().expect("at least one iteration");
            let (fp_u, cd_u) = detection_counts(first, &truth.x0);
            let (fp_r, cd_r) = detection_counts(last, &truth.x0);
            Cell {
                k,
                trial,
                sigma,
                delta,
                rho2_unweighted: rho_squared(first, &truth.x0, sigma).expect("nonzero truth"),
                rho2_reweighted: rho_squared(last, &truth.x0, sigma).expect("nonzero truth"),
                fp_unweighted: fp_u,
                fp_reweighted: fp_r,
                cd_unweighted: cd_u,
                cd_reweighted: cd_r,
            }
        })
        .collect();
    let mut cells = cells;
    cells.sort_by(|a, b| (a.k, a.trial).cmp(&(b.k, b.trial)));

    let mut trials_csv = CsvWriter::create(
        &config.out_dir,
        "dantzig_trials.csv",
        config,
        "k,trial,sigma,delta,rho2_unweighted,rho2_reweighted,fp_unweighted,fp_reweighted,cd_unweighted,cd_reweighted",
    )?;
    for c in &cells {
        trials_csv.row(&[
            c.k.to_string(),
            c.trial.to_string(),
            fmt_f64(c.sigma),
            fmt_f64(c.delta),
            fmt_f64(c.rho2_unweighted),
            fmt_f64(c.rho2_reweighted),
            c.fp_unweighted.to_string(),
            c.fp_reweighted.to_string(),
            c.cd_unweighted.to_string(),
            c.cd_reweighted.to_string(),
        ])?;
    }
    let trials_path = trials_csv.finish()?;

    let mut summary = CsvWriter::create(
        &config.out_dir,
        "dantzig_summary.csv",
        config,
        "k,trials,median_rho2_unweighted,median_rho2_reweighted,mean_rho2_unweighted,mean_rho2_reweighted,mean_fp_unweighted,mean_fp_reweighted,mean_cd_unweighted,mean_cd_reweighted",
    )?;
    for &k in &config.k_list {
        let group: Vec<&Cell> = cells.iter().filter(|c| c.k == k).collect();
        let count = group.len().max(1) as f64;
        let mut rho_u: Vec<f64> = group.iter().map(|c| c.rho2_unweighted).collect();
        let mut rho_r: Vec<f64> = group.iter().map(|c| c.rho2_reweighted).collect();
        summary.row(&[
            k.to_string(),
            group.len().to_string(),
            fmt_f64(median(&mut rho_u)),
            fmt_f64(median(&mut rho_r)),
            fmt_f64(group.iter().map(|c| c.rho2_unweighted).sum::<f64>() / count),
            fmt_f64(group.iter().map(|c| c.rho2_reweighted).sum::<f64>() / count),
            fmt_f64(group.iter().map(|c| c.fp_unweighted as f64).sum::<f64>() / count),
            fmt_f64(group.iter().map(|c| c.fp_reweighted as f64).sum::<f64>() / count),
            fmt_f64(group.iter().map(|c| c.cd_unweighted as f64).sum::<f64>() / count),
            fmt_f64(group.iter().map(|c| c.cd_reweighted as f64).sum::<f64>() / count),
        ])?;
    }
    let summary_path = summary.finish()?;
    let meta = super::write_metadata(config)?;
    Ok(vec![trials_path, summary_path, meta])
}
