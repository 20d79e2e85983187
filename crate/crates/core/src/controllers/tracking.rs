use nalgebra::{DMatrix, DVector, Vector6};

use super::gains::GainPair;
use super::linalg::PseudoInverse;
use crate::dq::Twist;
use crate::error_metrics::TaskError;

/// Task-space command `Γ = [κ_O vec₃ O; −κ_T vec₃ T] + vec₆(x̃ ξ_d x̃*)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TaskCommand {
    pub gamma: Vector6<f64>,
    /// The feedforward part `vec₆(x̃ ξ_d x̃*)` alone.
    pub feedforward: Vector6<f64>,
}

impl TaskCommand {
    pub fn new(error: &TaskError, xi_d: &Twist, gains: &GainPair) -> Self {
        let o = error.orientation.scale(gains.kappa_o);
        let t = error.translation.scale(-gains.kappa_t);
        let feedforward = xi_d.transformed_by(&error.x_tilde).vec6();
        let feedback = Vector6::new(o.x, o.y, o.z, t.x, t.y, t.z);
        TaskCommand {
            gamma: feedback + feedforward,
            feedforward,
        }
    }

    pub fn as_dvector(&self) -> DVector<f64> {
        DVector::from_column_slice(self.gamma.as_slice())
    }
}

/// `q̇ = J⁺ Γ`. With `ξ_d = 0` this is the set-point regulator.
pub fn hinf_tracking_law(
    jac: &DMatrix<f64>,
    error: &TaskError,
    xi_d: &Twist,
    gains: &GainPair,
    inverse: PseudoInverse,
) -> DVector<f64> {
    let cmd = TaskCommand::new(error, xi_d, gains);
    inverse.apply(jac) * cmd.as_dvector()
}

/// `Γ − J J⁺ Γ`: the part of the command the arm cannot realize, which acts
/// as an extra twist disturbance.
pub fn feasibility_residual(jac: &DMatrix<f64>, qdot: &DVector<f64>, gamma: &Vector6<f64>) -> Vector6<f64> {
    let realized = jac * qdot;
    gamma - Vector6::from_column_slice(realized.as_slice())
}
