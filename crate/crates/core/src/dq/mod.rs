//! Quaternion and dual quaternion algebra.
//!
//! Poses are unit dual quaternions `x = r + ε(1/2) p r`, twists are pure
//! dual quaternions `ω + ε(ṗ + p × ω)`, and every 8-vector in the crate uses
//! the coefficient order `(1, î, ĵ, k̂, ε, εî, εĵ, εk̂)`.

mod dual_quaternion;
mod quaternion;

pub use dual_quaternion::{exp_pure, DualQuaternion, Matrix8, Pose, Twist, Vector8, RENORMALIZE_TOLERANCE};
pub use quaternion::{PureQuaternion, Quaternion, UnitQuaternion, PURE_TOLERANCE, UNIT_TOLERANCE};

/// `C₈ = diag(1, -1, -1, -1, 1, -1, -1, -1)`, with `vec8(h*) = C₈ vec8(h)`.
pub fn conjugation_matrix() -> Matrix8 {
    Matrix8::from_diagonal(&Vector8::from_column_slice(&[
        1.0, -1.0, -1.0, -1.0, 1.0, -1.0, -1.0, -1.0,
    ]))
}

/// 8×6 embedding `E` with `vec8(ξ) = E vec6(ξ)` for pure `ξ`.
pub fn vec6_embedding() -> nalgebra::SMatrix<f64, 8, 6> {
    let mut e = nalgebra::SMatrix::<f64, 8, 6>::zeros();
    for k in 0..3 {
        e[(1 + k, k)] = 1.0;
        e[(5 + k, 3 + k)] = 1.0;
    }
    e
}
