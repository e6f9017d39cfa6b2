//! Log-barrier Newton solver for the quadratically constrained weighted l1
//! program: minimize `w' u` over `(x, u)` subject to `|x_i| <= u_i` and
//! `||y - phi x||_2 <= delta`, driving the barrier parameter up by a factor
//! of `mu` per stage. The Newton system is reduced to an `n x n` positive
//! definite solve by eliminating `u`.

use ndarray::Array1;

use crate::convex::{weighted_l1, Solution, SolveOptions, SolveStatus};
use crate::error::{Error, Result};
use crate::linalg::{min_norm_solution, solve_spd_regularized};
use crate::model::ProblemInstance;

const BARRIER_GROWTH: f64 = 10.0;
const MAX_NEWTON_PER_STAGE: usize = 60;
const MAX_STAGES: usize = 40;

struct BarrierState {
    x: Array1<f64>,
    u: Array1<f64>,
}

fn barrier_value(
    problem: &ProblemInstance,
    w: &Array1<f64>,
    delta: f64,
    tau: f64,
    state: &BarrierState,
) -> f64 {
    let mut value = tau * w.dot(&state.u);
    for i in 0..state.x.len() {
        let lo = state.u[i] - state.x[i];
        let hi = state.u[i] + state.x[i];
        if lo <= 0.0 || hi <= 0.0 {
            return f64::INFINITY;
        }
        value -= lo.ln() + hi.ln();
    }
    let r = problem.residual(&state.x);
    let slack = 0.5 * (delta * delta - r.dot(&r));
    if slack <= 0.0 {
        return f64::INFINITY;
    }
    value - slack.ln()
}

pub(crate) fn solve_log_barrier(
    problem: &ProblemInstance,
    w: &Array1<f64>,
    delta: f64,
    opts: &SolveOptions,
) -> Result<Solution> {
    let n = problem.n;
    let w_max = w.iter().cloned().fold(0.0f64, f64::max);
    let w_hat = w / w_max;

    // Strictly feasible start: the minimum-norm consistent point has zero
    // residual, hence lies inside the ball for any delta > 0.
    let x0 = min_norm_solution(&problem.phi, &problem.y)?;
    let x_inf = x0.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    let pad = 0.1 * x_inf.max(1e-6);
    let u0 = x0.mapv(|v| 1.05 * v.abs() + pad);
    let mut state = BarrierState { x: x0, u: u0 };

    let gram = problem.phi.t().dot(&problem.phi);

    let constraint_count = (2 * n + 1) as f64;
    let mut objective = w_hat.dot(&state.u);
    let mut tau = (constraint_count / objective.max(1e-12)).max(1.0);

    let mut converged = false;
    for _stage in 0..MAX_STAGES {
        // Center at the current barrier weight.
        for _newton in 0..MAX_NEWTON_PER_STAGE {
            let r = problem.residual(&state.x);
            let slack = 0.5 * (delta * delta - r.dot(&r));
            if slack <= 0.0 {
                return Err(Error::NumericalBreakdown("bpdn iterate left the ball"));
            }
            let c3 = 1.0 / slack;
            // Gradient of the residual part: phi^T (phi x - y) = -phi^T r.
            let g_res = -problem.adjoint(&r);

            let lo_inv = Array1::from_shape_fn(n, |i| 1.0 / (state.u[i] - state.x[i]));
            let hi_inv = Array1::from_shape_fn(n, |i| 1.0 / (state.u[i] + state.x[i]));

            let g_x = &(&lo_inv - &hi_inv) + &(&g_res * c3);
            let g_u = &(&w_hat * tau) - &(&lo_inv + &hi_inv);

            let sig_d = Array1::from_shape_fn(n, |i| {
                lo_inv[i] * lo_inv[i] + hi_inv[i] * hi_inv[i]
            });
            let sig_od = Array1::from_shape_fn(n, |i| {
                hi_inv[i] * hi_inv[i] - lo_inv[i] * lo_inv[i]
            });
            // Schur complement after eliminating u.
            let diag = Array1::from_shape_fn(n, |i| sig_d[i] - sig_od[i] * sig_od[i] / sig_d[i]);

            let mut h = &gram * c3;
            for i in 0..n {
                for j in 0..n {
                    h[[i, j]] += c3 * c3 * g_res[i] * g_res[j];
                }
                h[[i, i]] += diag[i];
            }
            let rhs = -(&g_x) + &(&sig_od * &(&g_u / &sig_d));
            let dx = solve_spd_regularized(&h, &rhs)?;
            let du = Array1::from_shape_fn(n, |i| {
                (-g_u[i] - sig_od[i] * dx[i]) / sig_d[i]
            });

            let decrement = -(g_x.dot(&dx) + g_u.dot(&du));
            if decrement / 2.0 <= 1e-10 {
                break;
            }

            // Largest step keeping the box slacks positive.
            let mut t_max = 1.0f64;
            for i in 0..n {
                let d_lo = du[i] - dx[i];
                if d_lo < 0.0 {
                    t_max = t_max.min(-(state.u[i] - state.x[i]) / d_lo);
                }
                let d_hi = du[i] + dx[i];
                if d_hi < 0.0 {
                    t_max = t_max.min(-(state.u[i] + state.x[i]) / d_hi);
                }
            }
            let mut t = 0.99 * t_max.min(1.0);

            let f0 = barrier_value(problem, &w_hat, delta, tau, &state);
            let slope = g_x.dot(&dx) + g_u.dot(&du);
            let mut accepted = false;
            for _ in 0..60 {
                let trial = BarrierState {
                    x: &state.x + &(&dx * t),
                    u: &state.u + &(&du * t),
                };
                let f_trial = barrier_value(problem, &w_hat, delta, tau, &trial);
                if f_trial <= f0 + 0.01 * t * slope {
                    state = trial;
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if !accepted {
                break;
            }
        }

        objective = w_hat.dot(&state.u);
        let gap = constraint_count / tau;
        if gap <= opts.tol * (1.0 + objective) {
            converged = true;
            break;
        }
        tau *= BARRIER_GROWTH;
    }

    Ok(Solution {
        objective: weighted_l1(w, &state.x),
        x: state.x,
        status: if converged {
            SolveStatus::Optimal
        } else {
            SolveStatus::MaxIter
        },
        certificate: None,
    })
}
