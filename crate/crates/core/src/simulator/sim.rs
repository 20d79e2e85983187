use nalgebra::{DVector, Vector6};

use super::trajectory::Trajectory;
use crate::controllers::{ControlContext, Controller, SvdFactors};
use crate::disturbances::DisturbanceSignal;
use crate::dq::{exp_pure, Pose, Twist};
use crate::error::{Error, Result};
use crate::error_metrics::{task_error, TaskError};
use crate::kinematics::{fkm, jacobian, SerialChain};

/// Default sampling period, s.
pub const DEFAULT_DT: f64 = 0.005;

pub fn step_count(horizon: f64, dt: f64) -> usize {
    (horizon / dt * (1.0 + 1e-12)).floor() as usize
}

/// One logged control instant.
#[derive(Clone, Debug, PartialEq)]
pub struct SimRecord {
    pub t: f64,
    pub q: DVector<f64>,
    /// Joint-velocity command `u = q̇`.
    pub u: DVector<f64>,
    pub x: Pose,
    pub x_d: Pose,
    /// True desired twist, whether or not the controller was given it.
    pub xi_d: Twist,
    pub error: TaskError,
    pub sigma_min: f64,
    pub kappa_s: f64,
    /// Effective twist disturbance: the injected `v_w` plus whatever part of
    /// the task command the arm did not realize (`J q̇ − Γ`).
    pub v_w: Vector6<f64>,
    /// Effective pose disturbance: the injected `v_c` minus the desired-twist
    /// feedforward the controller was not given (`−x̃ ξ_d x̃*`).
    pub v_c: Vector6<f64>,
    pub feedforward_residual: Vector6<f64>,
    /// `J q̇`, the twist the joints impart.
    pub twist: Vector6<f64>,
    /// `‖vec₆(v_s)‖` and `κ_s √s̄ ‖Γ‖` of the singularity-robust law.
    pub induced: Option<(f64, f64)>,
}

impl SimRecord {
    pub fn err_norm(&self) -> f64 {
        self.error.norm()
    }

    pub fn u_norm(&self) -> f64 {
        self.u.norm()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimTrace {
    pub dof: usize,
    pub dt: f64,
    pub records: Vec<SimRecord>,
}

impl SimTrace {
    pub fn last(&self) -> &SimRecord {
        self.records.last().expect("traces are never empty")
    }
}

/// A closed loop ready to run: arm, controller, desired motion, and the two
/// disturbance channels.
pub struct Simulation {
    pub chain: SerialChain,
    pub controller: Box<dyn Controller>,
    pub trajectory: Trajectory,
    pub v_w: DisturbanceSignal,
    pub v_c: DisturbanceSignal,
    pub q0: DVector<f64>,
    /// True initial pose; `fkm(q0)` when `None`.
    pub x0: Option<Pose>,
    pub dt: f64,
    pub horizon: f64,
}

/// Joint and pose state carried between steps.
#[derive(Clone, Debug, PartialEq)]
pub struct SimState {
    pub q: DVector<f64>,
    pub x: Pose,
}

impl Simulation {
    /// `floor(T/dt)`, with a relative guard so that e.g. `10 / 0.005` gives
    /// 2000 even when the quotient rounds just below it.
    pub fn steps(&self) -> usize {
        step_count(self.horizon, self.dt)
    }

    pub fn initial_state(&self) -> Result<SimState> {
        Ok(SimState {
            q: self.q0.clone(),
            x: match self.x0 {
                Some(x) => x,
                None => fkm(&self.chain, &self.q0)?,
            },
        })
    }

    /// Evaluates the controller at `state` and time index `k`.
    pub fn observe(&self, state: &SimState, k: usize) -> Result<SimRecord> {
        let t = k as f64 * self.dt;
        let jac = jacobian(&self.chain, &state.q)?;
        let svd = SvdFactors::new(&jac);
        let (x_d, xi_d) = self.trajectory.sample(t);
        let known = self.trajectory.known_twist(t);
        let error = task_error(&state.x, &x_d);
        let out = self.controller.control(&ControlContext {
            jacobian: &jac,
            svd: &svd,
            x: &state.x,
            x_d: &x_d,
            xi_d: &known,
            error: &error,
        });
        if out.qdot.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteControl { t, step: k });
        }
        let realized = Vector6::from_column_slice((&jac * &out.qdot).as_slice());
        let mut v_w = self.v_w.sample(t)?.vec6();
        if let Some(gamma) = out.task_command {
            v_w += realized - gamma;
        }
        let mut v_c = self.v_c.sample(t)?.vec6();
        if !self.trajectory.is_twist_known() {
            v_c -= xi_d.transformed_by(&error.x_tilde).vec6();
        }
        Ok(SimRecord {
            t,
            q: state.q.clone(),
            u: out.qdot,
            x: state.x,
            x_d,
            xi_d,
            error,
            sigma_min: svd.sigma_min(),
            kappa_s: out.kappa_s,
            v_w,
            v_c,
            feedforward_residual: out.feedforward_residual,
            twist: realized,
            induced: out.induced,
        })
    }

    /// Advances one period under the command of `record`:
    /// `q ← q + dt q̇`, `x ← exp((dt/2)(J q̇ + v_w + v_c)) x`, reprojected.
    pub fn step(&self, state: &SimState, record: &SimRecord) -> Result<SimState> {
        let xi = Twist::from_vec6(&record.twist) + self.v_w.sample(record.t)? + self.v_c.sample(record.t)?;
        Ok(SimState {
            q: &state.q + &record.u * self.dt,
            x: (exp_pure(&xi.scale(0.5 * self.dt)) * state.x).renormalized(),
        })
    }

    /// `floor(T/dt) + 1` records at `t_k = k·dt`.
    pub fn run(&self) -> Result<SimTrace> {
        if !(self.dt > 0.0 && self.horizon >= self.dt) {
            return Err(Error::InvalidParameter(format!(
                "need dt > 0 and T >= dt, got dt = {}, T = {}",
                self.dt, self.horizon
            )));
        }
        self.chain.check_dim(self.q0.len())?;
        let n = self.steps();
        let mut state = self.initial_state()?;
        let mut records = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let rec = self.observe(&state, k)?;
            if k < n {
                state = self.step(&state, &rec)?;
            }
            records.push(rec);
        }
        Ok(SimTrace {
            dof: self.chain.dof(),
            dt: self.dt,
            records,
        })
    }
}
