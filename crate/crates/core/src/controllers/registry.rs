//! Runtime-selectable controllers behind one trait.
//!
//! Each law is registered under a stable name and built from a
//! [`ControllerParams`] block, so scenarios pick the law by string.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, Vector6};

use super::baselines::{baseline_control, BaselineKind};
use super::gains::{hinf_gains, AttenuationSpec, GainPair};
use super::linalg::{PseudoInverse, SvdFactors};
use super::singularity::{project, SingularRegionSpec};
use super::tracking::{feasibility_residual, TaskCommand};
use crate::dq::{Pose, Twist};
use crate::error::{Error, Result};
use crate::error_metrics::TaskError;

/// Everything a law may read at one control instant. `jacobian` and `svd`
/// are the analytical Jacobian at the measured joints; `x` is the measured
/// (disturbed) end-effector pose.
pub struct ControlContext<'a> {
    pub jacobian: &'a DMatrix<f64>,
    pub svd: &'a SvdFactors,
    pub x: &'a Pose,
    pub x_d: &'a Pose,
    /// Desired twist as known to the controller (zero when it is unknown).
    pub xi_d: &'a Twist,
    pub error: &'a TaskError,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ControlOutput {
    pub qdot: DVector<f64>,
    pub kappa_s: f64,
    /// `Γ` of the H∞ laws.
    pub task_command: Option<Vector6<f64>>,
    /// `Γ − J q̇_N` for the H∞ laws, zero otherwise.
    pub feedforward_residual: Vector6<f64>,
    /// `‖vec₆(v_s)‖` and its bound `κ_s √s̄ ‖Γ‖`, for the singularity-robust law.
    pub induced: Option<(f64, f64)>,
}

impl ControlOutput {
    pub fn from_qdot(qdot: DVector<f64>) -> Self {
        ControlOutput {
            qdot,
            kappa_s: 0.0,
            task_command: None,
            feedforward_residual: Vector6::zeros(),
            induced: None,
        }
    }
}

pub trait Controller: Send + Sync {
    fn name(&self) -> &str;
    fn control(&self, ctx: &ControlContext<'_>) -> ControlOutput;
}

/// Parameters shared by every registered law; each kind reads what it needs.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ControllerParams {
    /// Attenuation levels of the H∞ laws.
    pub attenuation: Option<AttenuationSpec>,
    /// Scalar gain of the baselines; for the H∞ laws, `κ_O = κ_T = kappa`
    /// when no attenuation levels are given.
    pub kappa: Option<f64>,
    pub region: Option<SingularRegionSpec>,
    pub inverse: PseudoInverse,
}

impl ControllerParams {
    fn gains(&self, kind: &str) -> Result<GainPair> {
        match (self.attenuation, self.kappa) {
            (Some(spec), _) => Ok(hinf_gains(&spec)),
            (None, Some(k)) => GainPair::new(k, k),
            (None, None) => Err(Error::InvalidParameter(format!(
                "`{kind}` needs attenuation levels or a gain"
            ))),
        }
    }

    fn kappa(&self, kind: &str) -> Result<f64> {
        match self.kappa {
            Some(k) if k > 0.0 && k.is_finite() => Ok(k),
            Some(k) => Err(Error::InvalidParameter(format!("gain must be positive, got {k}"))),
            None => Err(Error::InvalidParameter(format!("`{kind}` needs a gain `kappa`"))),
        }
    }
}

pub struct HinfTracking {
    pub gains: GainPair,
    pub inverse: PseudoInverse,
}

impl Controller for HinfTracking {
    fn name(&self) -> &str {
        "hinf_tracking"
    }

    fn control(&self, ctx: &ControlContext<'_>) -> ControlOutput {
        let cmd = TaskCommand::new(ctx.error, ctx.xi_d, &self.gains);
        let inv = match self.inverse {
            PseudoInverse::MoorePenrose { rank_tol } => ctx.svd.pinv(rank_tol),
            other => other.apply(ctx.jacobian),
        };
        let qdot = inv * cmd.as_dvector();
        let residual = feasibility_residual(ctx.jacobian, &qdot, &cmd.gamma);
        ControlOutput {
            qdot,
            kappa_s: 0.0,
            task_command: Some(cmd.gamma),
            feedforward_residual: residual,
            induced: None,
        }
    }
}

pub struct HinfSingularityRobust {
    pub gains: GainPair,
    pub region: SingularRegionSpec,
}

impl Controller for HinfSingularityRobust {
    fn name(&self) -> &str {
        "hinf_singularity_robust"
    }

    fn control(&self, ctx: &ControlContext<'_>) -> ControlOutput {
        let cmd = TaskCommand::new(ctx.error, ctx.xi_d, &self.gains);
        let nominal = ctx.svd.pinv(super::linalg::RANK_TOLERANCE) * cmd.as_dvector();
        let residual = feasibility_residual(ctx.jacobian, &nominal, &cmd.gamma);
        let proj = project(ctx.svd, &nominal, &self.region);
        let v_s = proj.induced_disturbance(ctx.jacobian, &nominal);
        let bound = proj.disturbance_bound(&cmd.gamma);
        ControlOutput {
            kappa_s: proj.kappa_s,
            task_command: Some(cmd.gamma),
            induced: Some((v_s.norm(), bound)),
            qdot: proj.qdot,
            feedforward_residual: residual,
        }
    }
}

pub struct Baseline {
    pub kind: BaselineKind,
    pub kappa: f64,
    pub inverse: PseudoInverse,
}

impl Controller for Baseline {
    fn name(&self) -> &str {
        self.kind.name()
    }

    fn control(&self, ctx: &ControlContext<'_>) -> ControlOutput {
        ControlOutput::from_qdot(baseline_control(
            self.kind,
            ctx.jacobian,
            ctx.x,
            ctx.x_d,
            self.kappa,
            self.inverse,
        ))
    }
}

pub type Constructor = fn(&ControllerParams) -> Result<Box<dyn Controller>>;

/// Name → constructor table.
pub struct ControllerRegistry {
    entries: BTreeMap<String, Constructor>,
}

impl ControllerRegistry {
    pub fn empty() -> Self {
        ControllerRegistry {
            entries: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, name: &str, ctor: Constructor) {
        self.entries.insert(name.to_string(), ctor);
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.keys().map(String::as_str).collect()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn build(&self, name: &str, params: &ControllerParams) -> Result<Box<dyn Controller>> {
        let ctor = self
            .entries
            .get(name)
            .ok_or_else(|| Error::UnknownController(name.to_string()))?;
        ctor(params)
    }
}

impl Default for ControllerRegistry {
    fn default() -> Self {
        let mut r = ControllerRegistry::empty();
        r.register("hinf_tracking", |p| {
            Ok(Box::new(HinfTracking {
                gains: p.gains("hinf_tracking")?,
                inverse: p.inverse,
            }))
        });
        r.register("hinf_singularity_robust", |p| {
            let region = p
                .region
                .ok_or_else(|| Error::InvalidParameter("`hinf_singularity_robust` needs a singular region".into()))?;
            Ok(Box::new(HinfSingularityRobust {
                gains: p.gains("hinf_singularity_robust")?,
                region,
            }))
        });
        fn baseline(kind: BaselineKind, p: &ControllerParams) -> Result<Box<dyn Controller>> {
            Ok(Box::new(Baseline {
                kind,
                kappa: p.kappa(kind.name())?,
                inverse: p.inverse,
            }))
        }
        r.register("dq_r8", |p| baseline(BaselineKind::DqR8, p));
        r.register("dq_robust", |p| baseline(BaselineKind::DqRobust, p));
        r.register("htm", |p| baseline(BaselineKind::Htm, p));
        r.register("decoupled", |p| baseline(BaselineKind::Decoupled, p));
        r
    }
}

/// Names of the built-in controllers, in registry order.
pub fn controller_names() -> Vec<String> {
    ControllerRegistry::default()
        .names()
        .into_iter()
        .map(String::from)
        .collect()
}
