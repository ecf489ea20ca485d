//! Simulation harness.
//!
//! [`run_scenario`] integrates three coupled pieces side by side:
//!
//! 1. the true plant (P, V) under the configured input,
//! 2. the lifted model X(t) on the symmetry group, whose projection
//!    φ(X(t), ξ°) must shadow the plant (a consistency diagnostic), and
//! 3. the observer X̂(t), driven by the input and the measured pose only.
//!
//! Each logged record carries the plant state, the observer's estimate,
//! Lyapunov diagnostics, error norms, and the manifold residuals of every
//! integrated matrix.

pub mod config;
pub mod integrate;
pub mod lissajous;
pub mod output;

pub use config::{
    InputSource, Integrator, ObserverInitConfig, OriginConfig, Scenario, ScenarioConfig,
    TrueInitConfig,
};
pub use output::{emit_outputs, least_squares_slope, summarize, OutputPaths, Summary};

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::observer::{lyapunov, lyapunov_rate, DiagnosticError, ObserverState};
use crate::symmetry::{state_action, transitive_solve, SymmetryElement};
use crate::system::{dynamics, lifted_dynamics, output, State};
use integrate::{euler_step_algebra, euler_step_matrix, exp_step};

/// One logged simulation sample. Matrices are flattened row-major.
#[derive(Clone, Debug, Serialize)]
pub struct TrajectoryRecord {
    pub step: usize,
    pub t: f64,
    pub true_pose: Vec<f64>,
    pub true_vel: Vec<f64>,
    pub est_pose: Vec<f64>,
    pub est_vel: Vec<f64>,
    /// Projection φ(X(t), ξ°) of the independently integrated lifted
    /// state — ideally identical to the plant state.
    pub lift_pose: Vec<f64>,
    pub lift_vel: Vec<f64>,
    pub lyapunov: f64,
    pub lyapunov_rate: f64,
    /// ‖I − Ã‖_F.
    pub err_pose_norm: f64,
    /// ‖ã‖_F.
    pub err_offset_norm: f64,
    pub res_true_pose: f64,
    pub res_observer: f64,
    pub res_lifted: f64,
}

fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    m.transpose().as_slice().to_vec()
}

fn check_finite(step: usize, t: f64, values: &[&DMatrix<f64>]) -> Result<()> {
    for m in values {
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { step, t });
        }
    }
    Ok(())
}

/// Runs a configured scenario and returns every logged record.
///
/// The run aborts with [`Error::ConstraintBlowUp`] if any integrated group
/// matrix drifts past `1e3 × manifold_tol`, and with [`Error::NonFinite`]
/// if a state stops being finite.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<Vec<TrajectoryRecord>> {
    let sc = cfg.build()?;
    run_built_scenario(&sc)
}

/// Same as [`run_scenario`] for an already-validated scenario.
pub fn run_built_scenario(sc: &Scenario) -> Result<Vec<TrajectoryRecord>> {
    let desc = &sc.desc;
    let origin_state = sc.origin.to_state();
    let hard_limit = desc.hard_limit();

    let mut p_true = sc.true_init.pose().clone();
    let mut v_true = sc.true_init.velocity().clone();
    let mut x_lift = transitive_solve(&origin_state, &sc.true_init)?;
    let mut x_hat = sc.observer_init.clone();

    let mut records = Vec::with_capacity(sc.steps / sc.log_every + 2);

    for n in 0..=sc.steps {
        let t = n as f64 * sc.dt;
        let obs = ObserverState::new(x_hat.clone(), sc.origin.clone(), sc.gains)?;

        if n % sc.log_every == 0 || n == sc.steps {
            let state_true = State::new(p_true.clone(), v_true.clone())?;
            // Anchor the error diagnostics at the symmetry element implied
            // by the integrated plant state, so the logged error is exactly
            // what the innovation sees through the measurement.
            let x_implied = transitive_solve(&origin_state, &state_true)?;
            let err = obs.group_error(&x_implied)?;
            let diag = DiagnosticError::new(obs.v_hat()?, v_true.clone())?;
            let est = obs.estimate()?;
            let lift_proj = state_action(&x_lift, &origin_state)?;

            records.push(TrajectoryRecord {
                step: n,
                t,
                true_pose: row_major(p_true.matrix()),
                true_vel: v_true.coords().as_slice().to_vec(),
                est_pose: row_major(est.pose().matrix()),
                est_vel: est.velocity().coords().as_slice().to_vec(),
                lift_pose: row_major(lift_proj.pose().matrix()),
                lift_vel: lift_proj.velocity().coords().as_slice().to_vec(),
                lyapunov: lyapunov(&err, &diag, sc.gains.k2),
                lyapunov_rate: lyapunov_rate(&err, sc.gains.k1),
                err_pose_norm: err.pose_error_norm(),
                err_offset_norm: err.offset_norm(),
                res_true_pose: p_true.constraint_residual(),
                res_observer: x_hat.group_part().constraint_residual(),
                res_lifted: x_lift.group_part().constraint_residual(),
            });
        }
        if n == sc.steps {
            break;
        }

        let u = sc.input_at(t)?;
        let y = output(&State::new(p_true.clone(), v_true.clone())?);
        let delta = obs.innovation(&y)?;

        let d_true = dynamics(&State::new(p_true.clone(), v_true.clone())?, &u)?;
        let lam = lifted_dynamics(&x_lift, &sc.origin, &u)?;
        let d_lift = x_lift.left_translate(&lam)?;
        let d_obs = obs.dynamics(&u, &delta)?;

        let (p_next, a_lift_next, a_hat_next) = match sc.integrator {
            Integrator::Euler => (
                euler_step_matrix(
                    p_true.matrix(),
                    &(p_true.matrix() * d_true.dp_body.matrix()),
                    sc.dt,
                ),
                euler_step_matrix(x_lift.group_part().matrix(), &d_lift.d_group, sc.dt),
                euler_step_matrix(x_hat.group_part().matrix(), &d_obs.d_group, sc.dt),
            ),
            Integrator::Exp => {
                // Body rate of the observer's group slot: Â⁻¹ dÂ ∈ g.
                let a_hat_inv = x_hat.group_part().inverse()?;
                let w_hat = obs
                    .v_hat()?
                    .add(u.u1())?
                    .sub(&a_hat_inv.adjoint(&delta.d1)?)?;
                (
                    exp_step(&p_true, &d_true.dp_body, sc.dt)?.matrix().clone(),
                    exp_step(x_lift.group_part(), lam.w1(), sc.dt)?
                        .matrix()
                        .clone(),
                    exp_step(x_hat.group_part(), &w_hat, sc.dt)?
                        .matrix()
                        .clone(),
                )
            }
        };
        let v_next = euler_step_algebra(&v_true, &d_true.dv, sc.dt)?;
        let a_lift_offset = euler_step_algebra(x_lift.offset(), &d_lift.d_offset, sc.dt)?;
        let a_hat_offset = euler_step_algebra(x_hat.offset(), &d_obs.d_offset, sc.dt)?;

        let t_next = (n + 1) as f64 * sc.dt;
        check_finite(n + 1, t_next, &[&p_next, &a_lift_next, &a_hat_next])?;
        if v_next.coords().iter().any(|x| !x.is_finite())
            || a_lift_offset.coords().iter().any(|x| !x.is_finite())
            || a_hat_offset.coords().iter().any(|x| !x.is_finite())
        {
            return Err(Error::NonFinite {
                step: n + 1,
                t: t_next,
            });
        }
        for m in [&p_next, &a_lift_next, &a_hat_next] {
            let residual = desc.constraint_residual(m);
            if residual > hard_limit {
                return Err(Error::ConstraintBlowUp {
                    step: n + 1,
                    t: t_next,
                    residual,
                    limit: hard_limit,
                });
            }
        }

        p_true = GroupElement::new_unchecked(desc, p_next);
        v_true = v_next;
        x_lift = SymmetryElement::new(
            GroupElement::new_unchecked(desc, a_lift_next),
            a_lift_offset,
        )?;
        x_hat = SymmetryElement::new(GroupElement::new_unchecked(desc, a_hat_next), a_hat_offset)?;
    }

    Ok(records)
}
