use nalgebra::Vector3;

use crate::disturbances::triangle_wave;
use crate::dq::{exp_pure, Pose, PureQuaternion, Twist};
use crate::error::{Error, Result};

/// Desired end-effector motion `x_d(t)` with its inertial-frame twist
/// `ξ_d(t)`, `ẋ_d = (1/2) ξ_d x_d`.
#[derive(Clone, Debug, PartialEq)]
pub enum Trajectory {
    SetPoint(Pose),
    Screw(ScrewMotion),
    MovingTarget(MovingTarget),
}

/// Screw-linear interpolation `x(s) = exp(s L) x_0`, `L = log(x_1 x_0*)`,
/// with minimum-jerk timing `s(τ) = 10τ³ − 15τ⁴ + 6τ⁵` over
/// `[start, start + duration]`. With `ret = Some((h, d))` the motion rests
/// `h` seconds at `x_1` and then returns to `x_0` over `d` seconds. If `x_1`
/// lies on the far hemisphere from `x_0` the motion ends at `-x_1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScrewMotion {
    pub from: Pose,
    pub to: Pose,
    pub start: f64,
    pub duration: f64,
    pub ret: Option<(f64, f64)>,
    log: Twist,
}

impl ScrewMotion {
    pub fn new(from: Pose, to: Pose, start: f64, duration: f64, ret: Option<(f64, f64)>) -> Result<Self> {
        let bad_ret = ret.is_some_and(|(h, d)| !(h >= 0.0 && d > 0.0 && d.is_finite()));
        if !(duration > 0.0 && duration.is_finite()) || start.is_nan() || start < 0.0 || bad_ret {
            return Err(Error::InvalidParameter(format!(
                "screw timing needs start >= 0, durations > 0, hold >= 0 (got {start}, {duration}, {ret:?})"
            )));
        }
        let mut rel = to * from.conjugate();
        let mut to = to;
        // shortest screw: keep the relative rotation on the positive
        // hemisphere, and end on the matching sign of `to` so x_d is continuous
        if rel.dual_quaternion().primary.w < 0.0 {
            rel = rel.antipode();
            to = to.antipode();
        }
        Ok(ScrewMotion {
            from,
            to,
            start,
            duration,
            ret,
            log: rel.log(),
        })
    }

    /// `(s, ṡ)` at time `t`.
    fn progress(&self, t: f64) -> (f64, f64) {
        let out = min_jerk((t - self.start) / self.duration);
        let Some((hold, back)) = self.ret else {
            return (out.0, out.1 / self.duration);
        };
        let back_start = self.start + self.duration + hold;
        if t <= back_start {
            (out.0, out.1 / self.duration)
        } else {
            let b = min_jerk((t - back_start) / back);
            (1.0 - b.0, -b.1 / back)
        }
    }

    pub fn sample(&self, t: f64) -> (Pose, Twist) {
        let (s, sdot) = self.progress(t);
        let x = if s <= 0.0 {
            self.from
        } else if s >= 1.0 {
            self.to
        } else {
            (exp_pure(&self.log.scale(s)) * self.from).renormalized()
        };
        (x, self.log.scale(2.0 * sdot))
    }
}

/// `(s, ds/dτ)` of the quintic minimum-jerk profile, clamped outside [0, 1].
fn min_jerk(tau: f64) -> (f64, f64) {
    if tau <= 0.0 {
        (0.0, 0.0)
    } else if tau >= 1.0 {
        (1.0, 0.0)
    } else {
        let t2 = tau * tau;
        let t3 = t2 * tau;
        (t3 * (10.0 - 15.0 * tau + 6.0 * t2), 30.0 * t2 * (1.0 - 2.0 * tau + t2))
    }
}

/// A target rigidly attached, with constant offset, to a base translating
/// in triangle-wave fashion: `x_d(t) = translation(p_b(t)) · offset`.
///
/// The arm is not told the base velocity, so [`Trajectory::known_twist`]
/// is zero for this kind; its true twist `ε ṗ_b` still drives `x_d`.
#[derive(Clone, Debug, PartialEq)]
pub struct MovingTarget {
    pub offset: Pose,
    /// Base speed along each inertial axis, m/s.
    pub speed: Vector3<f64>,
    /// Triangle period along each axis, s (ignored where speed is 0).
    pub periods: Vector3<f64>,
}

impl MovingTarget {
    pub fn new(offset: Pose, speed: Vector3<f64>, periods: Vector3<f64>) -> Result<Self> {
        for i in 0..3 {
            if speed[i] != 0.0 && (periods[i].is_nan() || periods[i] <= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "moving-target period along axis {i} must be positive"
                )));
            }
        }
        Ok(MovingTarget { offset, speed, periods })
    }

    pub fn base_motion(&self, t: f64) -> (PureQuaternion, PureQuaternion) {
        let mut p = [0.0; 3];
        let mut v = [0.0; 3];
        for i in 0..3 {
            if self.speed[i] != 0.0 {
                let (d, s) = triangle_wave(t, self.periods[i]);
                p[i] = self.speed[i] * d;
                v[i] = self.speed[i] * s;
            }
        }
        (
            PureQuaternion::new(p[0], p[1], p[2]),
            PureQuaternion::new(v[0], v[1], v[2]),
        )
    }

    pub fn sample(&self, t: f64) -> (Pose, Twist) {
        let (p, v) = self.base_motion(t);
        (
            Pose::from_translation(p) * self.offset,
            Twist::new(PureQuaternion::ZERO, v),
        )
    }
}

impl Trajectory {
    /// `(x_d(t), ξ_d(t))`, the true desired motion.
    pub fn sample(&self, t: f64) -> (Pose, Twist) {
        match self {
            Trajectory::SetPoint(x) => (*x, Twist::ZERO),
            Trajectory::Screw(m) => m.sample(t),
            Trajectory::MovingTarget(m) => m.sample(t),
        }
    }

    /// The part of `ξ_d` the controller is given as feedforward.
    pub fn known_twist(&self, t: f64) -> Twist {
        match self {
            Trajectory::MovingTarget(_) => Twist::ZERO,
            _ => self.sample(t).1,
        }
    }

    pub fn is_twist_known(&self) -> bool {
        !matches!(self, Trajectory::MovingTarget(_))
    }

    pub fn initial(&self) -> Pose {
        self.sample(0.0).0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dq::UnitQuaternion;

    #[test]
    fn screw_endpoints_are_exact() {
        let a = Pose::from_rotation_translation(
            UnitQuaternion::from_angle_axis(0.3, PureQuaternion::I).unwrap(),
            PureQuaternion::new(0.5, 0.0, 0.2),
        );
        let b = Pose::from_rotation_translation(
            UnitQuaternion::from_angle_axis(-1.1, PureQuaternion::K).unwrap(),
            PureQuaternion::new(0.1, 0.4, 0.6),
        );
        let m = ScrewMotion::new(a, b, 1.0, 2.0, Some((1.0, 2.0))).unwrap();
        assert_eq!(m.sample(0.0).0, a);
        assert_eq!(m.sample(3.0).0, b);
        assert_eq!(m.sample(3.5).0, b);
        assert_eq!(m.sample(6.0).0, a);
        assert_eq!(m.sample(0.5).1, Twist::ZERO);
    }

    #[test]
    fn set_point_twist_is_zero() {
        let t = Trajectory::SetPoint(Pose::IDENTITY);
        assert_eq!(t.sample(3.0).1, Twist::ZERO);
    }

    #[test]
    fn moving_target_hides_its_twist() {
        let m = MovingTarget::new(
            Pose::IDENTITY,
            Vector3::new(0.1, 0.05, 0.0),
            Vector3::new(2.5, 3.45, 0.0),
        )
        .unwrap();
        let t = Trajectory::MovingTarget(m);
        assert_eq!(t.known_twist(0.3), Twist::ZERO);
        assert_eq!(t.sample(0.3).1.dual.x, 0.1);
        let (x, _) = t.sample(1.0);
        assert!((x.translation().x - 0.1).abs() < 1e-15);
    }
}
