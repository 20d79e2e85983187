#![allow(dead_code)]

use std::path::PathBuf;

use dqhinf::dq::{DualQuaternion, Pose, PureQuaternion, Quaternion, Twist, UnitQuaternion, Vector8};
use nalgebra::{DVector, Matrix4};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn quat(r: &mut impl Rng) -> Quaternion {
    Quaternion::new(
        r.random_range(-2.0..2.0),
        r.random_range(-2.0..2.0),
        r.random_range(-2.0..2.0),
        r.random_range(-2.0..2.0),
    )
}

pub fn pure(r: &mut impl Rng) -> PureQuaternion {
    PureQuaternion::new(
        r.random_range(-2.0..2.0),
        r.random_range(-2.0..2.0),
        r.random_range(-2.0..2.0),
    )
}

pub fn unit(r: &mut impl Rng) -> UnitQuaternion {
    loop {
        let q = quat(r);
        if q.norm() > 1e-3 {
            return UnitQuaternion::new_normalize(q).unwrap();
        }
    }
}

pub fn dual(r: &mut impl Rng) -> DualQuaternion {
    DualQuaternion::new(quat(r), quat(r))
}

pub fn pose(r: &mut impl Rng) -> Pose {
    Pose::from_rotation_translation(unit(r), pure(r))
}

pub fn twist(r: &mut impl Rng) -> Twist {
    Twist::new(pure(r), pure(r))
}

pub fn joints(r: &mut impl Rng, n: usize, range: f64) -> DVector<f64> {
    DVector::from_fn(n, |_, _| r.random_range(-range..range))
}

pub fn quat_strategy() -> impl Strategy<Value = Quaternion> {
    prop::array::uniform4(-2.0..2.0f64).prop_map(|a| Quaternion::new(a[0], a[1], a[2], a[3]))
}

pub fn pure_strategy() -> impl Strategy<Value = PureQuaternion> {
    prop::array::uniform3(-2.0..2.0f64).prop_map(|a| PureQuaternion::new(a[0], a[1], a[2]))
}

pub fn unit_strategy() -> impl Strategy<Value = UnitQuaternion> {
    quat_strategy()
        .prop_filter("away from zero", |q| q.norm() > 1e-3)
        .prop_map(|q| UnitQuaternion::new_normalize(q).unwrap())
}

pub fn pose_strategy() -> impl Strategy<Value = Pose> {
    (unit_strategy(), pure_strategy()).prop_map(|(r, p)| Pose::from_rotation_translation(r, p))
}

pub fn twist_strategy() -> impl Strategy<Value = Twist> {
    (pure_strategy(), pure_strategy()).prop_map(|(w, v)| Twist::new(w, v))
}

/// RK4 on `vec8(ẋ) = H⁺(ξ) vec8(x)` with constant `ξ`.
pub fn rk4_constant_twist(xi: &Twist, x0: &Pose, t: f64, steps: usize) -> Vector8 {
    let a = xi.dual_quaternion().hamilton_plus();
    let h = t / steps as f64;
    let mut y = x0.vec8();
    for _ in 0..steps {
        let k1 = a * y;
        let k2 = a * (y + k1 * (0.5 * h));
        let k3 = a * (y + k2 * (0.5 * h));
        let k4 = a * (y + k3 * h);
        y += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    y
}

/// Standard DH homogeneous transform `Rz(θ) Tz(d) Tx(a) Rx(α)`.
pub fn dh_matrix(theta: f64, d: f64, a: f64, alpha: f64) -> Matrix4<f64> {
    let (st, ct) = theta.sin_cos();
    let (sa, ca) = alpha.sin_cos();
    Matrix4::new(
        ct,
        -st * ca,
        st * sa,
        a * ct, //
        st,
        ct * ca,
        -ct * sa,
        a * st, //
        0.0,
        sa,
        ca,
        d, //
        0.0,
        0.0,
        0.0,
        1.0,
    )
}

pub fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data/scenarios")
        .join(name)
}

pub fn chain_file(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/chains").join(name)
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}
