//! Serial-chain forward kinematics and the Jacobians consumed by the
//! controllers.
//!
//! The analytical Jacobian `J` (6×n) maps joint rates to `vec6` of the
//! end-effector twist in the inertial frame, rows ordered as
//! `(ω_x, ω_y, ω_z, ṗ+p×ω)`. Every other Jacobian here is a fixed linear
//! function of `J` and the end-effector pose.

mod chain;

use nalgebra::{DMatrix, DVector, Vector6};

pub use chain::{DhLink, JointState, SerialChain, CHAIN_HEADER, LBR_IV, LBR_IV_FLANGE, PLANAR_2_LINK};

use crate::dq::{vec6_embedding, DualQuaternion, Pose, PureQuaternion, Twist};
use crate::error::{Error, Result};

/// `x_N(q) = base · x_1^0(q_1) ⋯ x_n^{n-1}(q_n) · effector`.
pub fn fkm(chain: &SerialChain, q: &DVector<f64>) -> Result<Pose> {
    chain.check_dim(q.len())?;
    let mut x = chain.base();
    for (link, &qi) in chain.links().iter().zip(q.iter()) {
        x = x * link.pose(qi);
    }
    Ok(x * chain.effector())
}

/// Analytical Jacobian, column `i` = `vec6(j_i)` with
/// `j_i = 2 x_{i-1}^0 (dx_i^{i-1}/dq_i) (x_i^{i-1})* (x_{i-1}^0)*`.
pub fn jacobian(chain: &SerialChain, q: &DVector<f64>) -> Result<DMatrix<f64>> {
    chain.check_dim(q.len())?;
    let n = chain.dof();
    let mut jac = DMatrix::zeros(6, n);
    let mut prefix = chain.base();
    for (i, (link, &qi)) in chain.links().iter().zip(q.iter()).enumerate() {
        let xi = link.pose(qi);
        let dxi = link.pose_derivative(qi);
        let prefix_dq: DualQuaternion = prefix.into();
        let j = (prefix_dq * dxi * xi.conjugate().dual_quaternion() * prefix.conjugate().dual_quaternion()).scale(2.0);
        // j is a line through the joint axis; its real parts are round-off.
        let col = Twist::new(j.primary.imag(), j.dual.imag()).vec6();
        jac.set_column(i, &col);
        prefix = prefix * xi;
    }
    Ok(jac)
}

/// `J_R8 = (1/2) H⁻(x) E J`, so that `vec8(ẋ) = J_R8 q̇` at pose `x`.
pub fn jacobian_r8_at(jac: &DMatrix<f64>, x: &Pose) -> DMatrix<f64> {
    let h = x.dual_quaternion().hamilton_minus() * vec6_embedding();
    let h = DMatrix::from_iterator(8, 6, h.iter().copied());
    (h * jac).scale(0.5)
}

pub fn jacobian_r8(chain: &SerialChain, q: &DVector<f64>) -> Result<DMatrix<f64>> {
    let jac = jacobian(chain, q)?;
    Ok(jacobian_r8_at(&jac, &fkm(chain, q)?))
}

/// Geometric Jacobian `[v; ω]` at end-effector position `p`: the angular
/// rows of `J` and linear rows `dual - p × angular`.
pub fn geometric_jacobian_at(jac: &DMatrix<f64>, p: &PureQuaternion) -> DMatrix<f64> {
    let n = jac.ncols();
    let mut out = DMatrix::zeros(6, n);
    let lin = translation_jacobian_at(jac, p);
    out.rows_mut(0, 3).copy_from(&lin);
    out.rows_mut(3, 3).copy_from(&jac.rows(0, 3));
    out
}

/// `J_p` with `ṗ = J_p q̇`.
pub fn translation_jacobian_at(jac: &DMatrix<f64>, p: &PureQuaternion) -> DMatrix<f64> {
    let skew = p.skew();
    let skew = DMatrix::from_iterator(3, 3, skew.iter().copied());
    jac.rows(3, 3) - skew * jac.rows(0, 3)
}

pub fn geometric_jacobian(chain: &SerialChain, q: &DVector<f64>) -> Result<DMatrix<f64>> {
    let jac = jacobian(chain, q)?;
    Ok(geometric_jacobian_at(&jac, &fkm(chain, q)?.translation()))
}

pub fn translation_jacobian(chain: &SerialChain, q: &DVector<f64>) -> Result<DMatrix<f64>> {
    let jac = jacobian(chain, q)?;
    Ok(translation_jacobian_at(&jac, &fkm(chain, q)?.translation()))
}

/// Damped least-squares position-and-orientation IK, used to place a chain
/// at a prescribed start pose. Returns the joint vector once the twist-like
/// residual falls below `tol`.
pub fn inverse_kinematics(
    chain: &SerialChain,
    target: &Pose,
    seed: &DVector<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<DVector<f64>> {
    chain.check_dim(seed.len())?;
    let mut q = seed.clone();
    let damping = 1e-4;
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter {
        let x = fkm(chain, &q)?;
        let err = pose_residual(&x, target);
        residual = err.norm();
        if residual < tol {
            return Ok(q);
        }
        let jac = jacobian(chain, &q)?;
        let jg = geometric_jacobian_at(&jac, &x.translation());
        let jjt = &jg * jg.transpose() + DMatrix::identity(6, 6) * damping;
        let Some(inv) = jjt.try_inverse() else {
            break;
        };
        let step = jg.transpose() * inv * DVector::from_column_slice(err.as_slice());
        let scale = (0.5 / step.amax()).min(1.0);
        q += step * scale;
    }
    Err(Error::IkDidNotConverge { residual })
}

/// `[p_t - p; 2 Im(r_t r*)]` on the short hemisphere.
fn pose_residual(x: &Pose, target: &Pose) -> Vector6<f64> {
    let dp = target.translation() - x.translation();
    let mut dr = target.rotation().quaternion() * x.rotation().quaternion().conjugate();
    if dr.w < 0.0 {
        dr = -dr;
    }
    let w = dr.imag().scale(2.0);
    Vector6::new(dp.x, dp.y, dp.z, w.x, w.y, w.z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dq::Quaternion;
    use std::f64::consts::PI;

    fn single_z() -> SerialChain {
        SerialChain::new(vec![DhLink::new(0.0, 0.0, 0.0, 0.0)]).unwrap()
    }

    #[test]
    fn identity_row_gives_identity_pose() {
        let x = fkm(&single_z(), &DVector::from_element(1, 0.0)).unwrap();
        assert_eq!(x, Pose::IDENTITY);
    }

    #[test]
    fn single_revolute_quarter_turn() {
        let x = fkm(&single_z(), &DVector::from_element(1, PI / 2.0)).unwrap();
        let p = x.dual_quaternion().primary;
        let c = (PI / 4.0).cos();
        assert!((p - Quaternion::new(c, 0.0, 0.0, c)).norm() < 1e-15);
    }

    #[test]
    fn single_revolute_column() {
        let j = jacobian(&single_z(), &DVector::from_element(1, 0.4)).unwrap();
        assert!((j.column(0) - Vector6::new(0.0, 0.0, 1.0, 0.0, 0.0, 0.0)).norm() < 1e-15);
        let jg = geometric_jacobian(&single_z(), &DVector::from_element(1, 0.4)).unwrap();
        assert!(jg.rows(0, 3).norm() < 1e-15);
        assert!((jg[(5, 0)] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let chain = SerialChain::lbr_iv();
        assert!(matches!(
            fkm(&chain, &DVector::zeros(3)),
            Err(Error::DimensionMismatch { expected: 7, actual: 3 })
        ));
        assert!(jacobian(&chain, &DVector::zeros(8)).is_err());
    }

    #[test]
    fn lbr_column_count() {
        let j = jacobian(&SerialChain::lbr_iv(), &DVector::from_element(7, 0.3)).unwrap();
        assert_eq!((j.nrows(), j.ncols()), (6, 7));
    }

    #[test]
    fn r8_identity_pose_has_zero_real_rows() {
        let chain = SerialChain::planar_two_link();
        let jac = jacobian(&chain, &DVector::from_column_slice(&[0.3, -0.8])).unwrap();
        let jr8 = jacobian_r8_at(&jac, &Pose::IDENTITY);
        let v = jr8 * DVector::from_column_slice(&[0.7, 1.9]);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[4], 0.0);
    }

    #[test]
    fn ik_reaches_reachable_pose() {
        let chain = SerialChain::lbr_iv();
        let q_true = DVector::from_column_slice(&[0.3, 0.6, -0.2, -1.1, 0.4, 0.7, 0.1]);
        let target = fkm(&chain, &q_true).unwrap();
        let seed = DVector::from_column_slice(&[0.0, 0.4, 0.0, -0.9, 0.0, 0.5, 0.0]);
        let q = inverse_kinematics(&chain, &target, &seed, 1e-12, 500).unwrap();
        let x = fkm(&chain, &q).unwrap();
        assert!((x.translation() - target.translation()).norm() < 1e-10);
        let dr = x.rotation().quaternion().dot(&target.rotation().quaternion()).abs();
        assert!((dr - 1.0).abs() < 1e-12);
    }
}
