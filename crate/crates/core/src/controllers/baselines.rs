//! Comparison controllers: coefficient-space dual-quaternion laws, the
//! homogeneous-transformation law, and a decoupled position/attitude law.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

use super::linalg::PseudoInverse;
use crate::dq::{conjugation_matrix, DualQuaternion, Pose, Quaternion};
use crate::kinematics::{geometric_jacobian_at, jacobian_r8_at, translation_jacobian_at};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaselineKind {
    /// `q̇ = J_R8⁺ κ vec₈(x_d − x)`.
    DqR8,
    /// `q̇ = N_R8⁺ κ vec₈(1 − x* x_d)`, `N_R8 = H⁻(x_d) C₈ J_R8`.
    DqRobust,
    /// `q̇ = J_G⁺ κ [p_d − p; φ̃ñ]`, `R̃ = R_d Rᵀ`.
    Htm,
    /// `q̇ = [J_p; N_R4]⁺ κ [p_d − p; vec₄(1 − r* r_d)]`.
    Decoupled,
}

impl BaselineKind {
    pub fn name(&self) -> &'static str {
        match self {
            BaselineKind::DqR8 => "dq_r8",
            BaselineKind::DqRobust => "dq_robust",
            BaselineKind::Htm => "htm",
            BaselineKind::Decoupled => "decoupled",
        }
    }
}

/// `N_R8 = H⁻(x_d) C₈ J_R8`, the Jacobian of `vec₈(x* x_d)`.
pub fn robust_jacobian(jac_r8: &DMatrix<f64>, x_d: &Pose) -> DMatrix<f64> {
    let h = x_d.dual_quaternion().hamilton_minus() * conjugation_matrix();
    let h = DMatrix::from_iterator(8, 8, h.iter().copied());
    h * jac_r8
}

/// Joint velocities of a baseline law given the analytical Jacobian `jac`
/// evaluated at the measured configuration and the measured pose `x`.
pub fn baseline_control(
    kind: BaselineKind,
    jac: &DMatrix<f64>,
    x: &Pose,
    x_d: &Pose,
    kappa: f64,
    inverse: PseudoInverse,
) -> DVector<f64> {
    match kind {
        BaselineKind::DqR8 => {
            let j = jacobian_r8_at(jac, x);
            let e = (x_d.dual_quaternion() - x.dual_quaternion()).vec8();
            inverse.apply(&j) * DVector::from_column_slice(e.as_slice()) * kappa
        }
        BaselineKind::DqRobust => {
            let n = robust_jacobian(&jacobian_r8_at(jac, x), x_d);
            let e = (DualQuaternion::ONE - x.conjugate().dual_quaternion() * x_d.dual_quaternion()).vec8();
            inverse.apply(&n) * DVector::from_column_slice(e.as_slice()) * kappa
        }
        BaselineKind::Htm => {
            let p = x.translation();
            let jg = geometric_jacobian_at(jac, &p);
            let dp = x_d.translation() - p;
            let r_tilde = x_d.rotation().to_rotation_matrix() * x.rotation().to_rotation_matrix().transpose();
            let w = angle_axis(&r_tilde);
            let e = DVector::from_column_slice(&[dp.x, dp.y, dp.z, w.x, w.y, w.z]);
            inverse.apply(&jg) * e * kappa
        }
        BaselineKind::Decoupled => {
            let p = x.translation();
            let jp = translation_jacobian_at(jac, &p);
            let n4 = robust_jacobian(&jacobian_r8_at(jac, x), x_d);
            let mut jdec = DMatrix::zeros(7, jac.ncols());
            jdec.rows_mut(0, 3).copy_from(&jp);
            jdec.rows_mut(3, 4).copy_from(&n4.rows(0, 4));
            let dp = x_d.translation() - p;
            let er = Quaternion::ONE - x.rotation().quaternion().conjugate() * x_d.rotation().quaternion();
            let e = DVector::from_column_slice(&[dp.x, dp.y, dp.z, er.w, er.x, er.y, er.z]);
            inverse.apply(&jdec) * e * kappa
        }
    }
}

/// Below this rotation angle the axis is read off the skew part by series.
const SMALL_ANGLE: f64 = 1e-8;

/// `φ n` of a rotation matrix, `φ ∈ [0, π]`.
///
/// `φ = atan2(‖w‖, (tr R − 1)/2)` with `w` the axial vector of the skew part.
/// Near zero the axis comes from `w` by series; past `π/2` it comes from the
/// symmetric part `(R + Rᵀ)/2 = cos φ I + (1 − cos φ) n nᵀ`, which stays well
/// conditioned up to and including `φ = π`.
pub fn angle_axis(r: &Matrix3<f64>) -> Vector3<f64> {
    let w = 0.5 * Vector3::new(r[(2, 1)] - r[(1, 2)], r[(0, 2)] - r[(2, 0)], r[(1, 0)] - r[(0, 1)]);
    let c = (0.5 * (r.trace() - 1.0)).clamp(-1.0, 1.0);
    let s = w.norm();
    let phi = s.atan2(c);
    if c >= 0.0 {
        if s < SMALL_ANGLE {
            return w * (1.0 + s * s / 6.0);
        }
        return w * (phi / s);
    }
    let sym = 0.5 * (r + r.transpose());
    let nn = (sym - Matrix3::identity() * c) / (1.0 - c);
    let k = (0..3).max_by(|&a, &b| nn[(a, a)].total_cmp(&nn[(b, b)])).unwrap_or(0);
    let mut n = nn.column(k).into_owned() / nn[(k, k)].sqrt();
    n /= n.norm();
    if n.dot(&w) < 0.0 {
        n = -n;
    }
    n * phi
}
