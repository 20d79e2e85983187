//! Task-space error: the spatial difference `x̃ = x x_d*`, the invariant
//! error function `z̃ = 1 ∓ x̃`, and the orientation/translation parts the
//! controllers feed back.
//!
//! The sign of `z̃` is picked per call from `Re(P(x̃))` so that the closed
//! loop always converges along the short way round (no unwinding). This
//! per-step rule is a policy of this crate: a path that stays on one side of
//! `Re(P(x̃)) = 0` keeps one branch and sees continuous `O`, `T`; crossing
//! the boundary flips `O` by sign.

use crate::dq::{DualQuaternion, Pose, PureQuaternion, Quaternion};

/// `x̃ = η + μ + ε(η′ + μ′)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorDecomposition {
    pub eta: f64,
    pub eta_prime: f64,
    pub mu: PureQuaternion,
    pub mu_prime: PureQuaternion,
}

impl ErrorDecomposition {
    /// `V₁ = α₁((1 − η)² + ‖μ‖²)`.
    pub fn v1(&self, alpha1: f64) -> f64 {
        alpha1 * ((1.0 - self.eta).powi(2) + self.mu.norm_squared())
    }

    /// `V₂ = α₂(η′² + ‖μ′‖²)`.
    pub fn v2(&self, alpha2: f64) -> f64 {
        alpha2 * (self.eta_prime * self.eta_prime + self.mu_prime.norm_squared())
    }

    /// `ηη′ + ⟨μ, μ′⟩`, zero for unit elements.
    pub fn unit_constraint(&self) -> f64 {
        self.eta * self.eta_prime + self.mu.inner(&self.mu_prime)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// `z̃ = 1 − x̃`, used when `Re(P(x̃)) ≥ 0`.
    Minus,
    /// `z̃ = 1 + x̃`, used when `Re(P(x̃)) < 0`.
    Plus,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TaskError {
    pub x_tilde: Pose,
    pub z_tilde: DualQuaternion,
    pub branch: Branch,
    /// Orientation error `O(z̃)`: `-μ` on the minus branch, `μ` on the plus.
    pub orientation: PureQuaternion,
    /// Translation error `T(z̃)`, equal to `p̃` on both branches.
    pub translation: PureQuaternion,
}

impl TaskError {
    /// `√(‖P(z̃)‖² + ‖D(z̃)‖²)`.
    pub fn norm(&self) -> f64 {
        self.z_tilde.coefficient_norm_squared().sqrt()
    }
}

/// `x̃ = x x_d*`.
pub fn spatial_error(x: &Pose, x_d: &Pose) -> Pose {
    *x * x_d.conjugate()
}

pub fn error_function(x_tilde: &Pose) -> TaskError {
    let xt = x_tilde.dual_quaternion();
    let one = DualQuaternion::ONE;
    if xt.primary.w >= 0.0 {
        let z = one - xt;
        // -2 z̃′ (1 - z̃_P*) = 2 x̃′ r̃* = p̃
        let t = (z.dual * (Quaternion::ONE - z.primary.conjugate())).scale(-2.0);
        TaskError {
            x_tilde: *x_tilde,
            z_tilde: z,
            branch: Branch::Minus,
            orientation: z.primary.imag(),
            translation: t.imag(),
        }
    } else {
        let z = one + xt;
        let t = (z.dual * (z.primary.conjugate() - Quaternion::ONE)).scale(2.0);
        TaskError {
            x_tilde: *x_tilde,
            z_tilde: z,
            branch: Branch::Plus,
            orientation: xt.primary.imag(),
            translation: t.imag(),
        }
    }
}

pub fn task_error(x: &Pose, x_d: &Pose) -> TaskError {
    error_function(&spatial_error(x, x_d))
}

pub fn decompose(x_tilde: &Pose) -> ErrorDecomposition {
    let h = x_tilde.dual_quaternion();
    ErrorDecomposition {
        eta: h.primary.w,
        eta_prime: h.dual.w,
        mu: h.primary.imag(),
        mu_prime: h.dual.imag(),
    }
}
