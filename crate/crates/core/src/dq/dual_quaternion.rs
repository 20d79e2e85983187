use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{SMatrix, SVector, Vector6};

use super::quaternion::{PureQuaternion, Quaternion, UnitQuaternion, UNIT_TOLERANCE};
use crate::error::{Error, Result};

pub type Vector8 = SVector<f64, 8>;
pub type Matrix8 = SMatrix<f64, 8, 8>;

/// Drift beyond which a pose is reprojected onto the unit set.
pub const RENORMALIZE_TOLERANCE: f64 = 1e-9;

/// Below this rotation angle `exp`/`log` switch to their series forms.
const SERIES_ANGLE: f64 = 1e-8;

/// Dual quaternion `h + ε h'` with `ε² = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct DualQuaternion {
    pub primary: Quaternion,
    pub dual: Quaternion,
}

impl DualQuaternion {
    pub const ZERO: DualQuaternion = DualQuaternion::new(Quaternion::ZERO, Quaternion::ZERO);
    pub const ONE: DualQuaternion = DualQuaternion::new(Quaternion::ONE, Quaternion::ZERO);

    pub const fn new(primary: Quaternion, dual: Quaternion) -> Self {
        DualQuaternion { primary, dual }
    }

    /// `P(h)`
    pub fn primary(&self) -> Quaternion {
        self.primary
    }

    /// `D(h)`
    pub fn dual(&self) -> Quaternion {
        self.dual
    }

    pub fn conjugate(&self) -> DualQuaternion {
        DualQuaternion::new(self.primary.conjugate(), self.dual.conjugate())
    }

    /// Real scalar norm: the norm of the primary part. The dual component of
    /// the dual-number norm is [`DualQuaternion::norm_dual`].
    pub fn norm(&self) -> f64 {
        self.primary.norm()
    }

    /// Dual component of `√(h h*)`, i.e. `⟨P, D⟩ / ‖P‖`; zero for poses.
    pub fn norm_dual(&self) -> f64 {
        let n = self.primary.norm();
        if n == 0.0 {
            0.0
        } else {
            self.primary.dot(&self.dual) / n
        }
    }

    pub fn scale(&self, s: f64) -> DualQuaternion {
        DualQuaternion::new(self.primary.scale(s), self.dual.scale(s))
    }

    pub fn is_finite(&self) -> bool {
        self.primary.is_finite() && self.dual.is_finite()
    }

    /// Sum of squared coefficients, `‖P‖² + ‖D‖²`.
    pub fn coefficient_norm_squared(&self) -> f64 {
        self.primary.norm_squared() + self.dual.norm_squared()
    }

    /// Coefficients in the order `(1, î, ĵ, k̂, ε, εî, εĵ, εk̂)`.
    pub fn vec8(&self) -> Vector8 {
        let (p, d) = (self.primary, self.dual);
        Vector8::from_column_slice(&[p.w, p.x, p.y, p.z, d.w, d.x, d.y, d.z])
    }

    pub fn from_vec8(v: &Vector8) -> Self {
        DualQuaternion::new(
            Quaternion::new(v[0], v[1], v[2], v[3]),
            Quaternion::new(v[4], v[5], v[6], v[7]),
        )
    }

    /// `vec6`, failing when either real part is not zero.
    pub fn vec6(&self) -> Result<Vector6<f64>> {
        Ok(self.to_twist()?.vec6())
    }

    /// Reinterpret as a pure dual quaternion.
    pub fn to_twist(&self) -> Result<Twist> {
        Ok(Twist::new(self.primary.to_pure()?, self.dual.to_pure()?))
    }

    /// Matrix `H⁺(h)` with `vec8(h a) = H⁺(h) vec8(a)`.
    pub fn hamilton_plus(&self) -> Matrix8 {
        let p = self.primary.hamilton_plus();
        let d = self.dual.hamilton_plus();
        let mut m = Matrix8::zeros();
        m.fixed_view_mut::<4, 4>(0, 0).copy_from(&p);
        m.fixed_view_mut::<4, 4>(4, 0).copy_from(&d);
        m.fixed_view_mut::<4, 4>(4, 4).copy_from(&p);
        m
    }

    /// Matrix `H⁻(h)` with `vec8(a h) = H⁻(h) vec8(a)`.
    pub fn hamilton_minus(&self) -> Matrix8 {
        let p = self.primary.hamilton_minus();
        let d = self.dual.hamilton_minus();
        let mut m = Matrix8::zeros();
        m.fixed_view_mut::<4, 4>(0, 0).copy_from(&p);
        m.fixed_view_mut::<4, 4>(4, 0).copy_from(&d);
        m.fixed_view_mut::<4, 4>(4, 4).copy_from(&p);
        m
    }
}

impl Add for DualQuaternion {
    type Output = DualQuaternion;
    fn add(self, o: DualQuaternion) -> DualQuaternion {
        DualQuaternion::new(self.primary + o.primary, self.dual + o.dual)
    }
}

impl Sub for DualQuaternion {
    type Output = DualQuaternion;
    fn sub(self, o: DualQuaternion) -> DualQuaternion {
        DualQuaternion::new(self.primary - o.primary, self.dual - o.dual)
    }
}

impl Neg for DualQuaternion {
    type Output = DualQuaternion;
    fn neg(self) -> DualQuaternion {
        DualQuaternion::new(-self.primary, -self.dual)
    }
}

/// `(a + εa')(b + εb') = ab + ε(ab' + a'b)`.
impl Mul for DualQuaternion {
    type Output = DualQuaternion;
    fn mul(self, o: DualQuaternion) -> DualQuaternion {
        DualQuaternion::new(self.primary * o.primary, self.primary * o.dual + self.dual * o.primary)
    }
}

impl Mul<f64> for DualQuaternion {
    type Output = DualQuaternion;
    fn mul(self, s: f64) -> DualQuaternion {
        self.scale(s)
    }
}

impl From<Quaternion> for DualQuaternion {
    fn from(q: Quaternion) -> Self {
        DualQuaternion::new(q, Quaternion::ZERO)
    }
}

impl From<f64> for DualQuaternion {
    fn from(w: f64) -> Self {
        DualQuaternion::new(Quaternion::from(w), Quaternion::ZERO)
    }
}

/// Pure dual quaternion `ω + ε(ṗ + p × ω)`; isomorphic to ℝ⁶.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Twist {
    pub primary: PureQuaternion,
    pub dual: PureQuaternion,
}

impl Twist {
    pub const ZERO: Twist = Twist::new(PureQuaternion::ZERO, PureQuaternion::ZERO);

    pub const fn new(primary: PureQuaternion, dual: PureQuaternion) -> Self {
        Twist { primary, dual }
    }

    pub fn dual_quaternion(&self) -> DualQuaternion {
        DualQuaternion::new(self.primary.quaternion(), self.dual.quaternion())
    }

    /// `vec6`, ordered `(î, ĵ, k̂, εî, εĵ, εk̂)`.
    pub fn vec6(&self) -> Vector6<f64> {
        Vector6::new(
            self.primary.x,
            self.primary.y,
            self.primary.z,
            self.dual.x,
            self.dual.y,
            self.dual.z,
        )
    }

    pub fn from_vec6(v: &Vector6<f64>) -> Self {
        Twist::new(
            PureQuaternion::new(v[0], v[1], v[2]),
            PureQuaternion::new(v[3], v[4], v[5]),
        )
    }

    pub fn scale(&self, s: f64) -> Twist {
        Twist::new(self.primary.scale(s), self.dual.scale(s))
    }

    pub fn is_finite(&self) -> bool {
        self.vec6().iter().all(|v| v.is_finite())
    }

    /// `a ξ a*` for a unit dual quaternion `a` (adjoint action).
    pub fn transformed_by(&self, a: &Pose) -> Twist {
        let t = a.0 * self.dual_quaternion() * a.0.conjugate();
        Twist::new(t.primary.imag(), t.dual.imag())
    }
}

impl Add for Twist {
    type Output = Twist;
    fn add(self, o: Twist) -> Twist {
        Twist::new(self.primary + o.primary, self.dual + o.dual)
    }
}

impl Sub for Twist {
    type Output = Twist;
    fn sub(self, o: Twist) -> Twist {
        Twist::new(self.primary - o.primary, self.dual - o.dual)
    }
}

impl Neg for Twist {
    type Output = Twist;
    fn neg(self) -> Twist {
        Twist::new(-self.primary, -self.dual)
    }
}

impl Mul<f64> for Twist {
    type Output = Twist;
    fn mul(self, s: f64) -> Twist {
        self.scale(s)
    }
}

/// Unit dual quaternion `r + ε(1/2) p r`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pose(DualQuaternion);

impl Pose {
    pub const IDENTITY: Pose = Pose(DualQuaternion::ONE);

    /// Checks both unit conditions against [`UNIT_TOLERANCE`].
    pub fn new(h: DualQuaternion) -> Result<Self> {
        let n = h.primary.norm();
        let study = h.primary.dot(&h.dual);
        if (n - 1.0).abs() > UNIT_TOLERANCE || study.abs() > UNIT_TOLERANCE || !h.is_finite() {
            return Err(Error::ConstraintViolation(format!(
                "not a unit dual quaternion (‖P‖ = {n}, ⟨P, D⟩ = {study:e})"
            )));
        }
        Ok(Pose(h))
    }

    /// Projects onto the unit set: normalize the primary part, then
    /// remove the component of the dual part along it.
    pub fn new_normalize(h: DualQuaternion) -> Result<Self> {
        let n = h.primary.norm();
        if n == 0.0 || !n.is_finite() || !h.dual.is_finite() {
            return Err(Error::ConstraintViolation(
                "cannot normalize a dual quaternion with zero primary part".into(),
            ));
        }
        let p = h.primary.scale(1.0 / n);
        let d = h.dual.scale(1.0 / n);
        let d = d - p.scale(d.dot(&p));
        Ok(Pose(DualQuaternion::new(p, d)))
    }

    pub(crate) fn new_unchecked(h: DualQuaternion) -> Self {
        Pose(h)
    }

    pub fn from_rotation_translation(r: UnitQuaternion, p: PureQuaternion) -> Pose {
        let r = r.quaternion();
        Pose(DualQuaternion::new(r, (p.quaternion() * r).scale(0.5)))
    }

    pub fn from_rotation(r: UnitQuaternion) -> Pose {
        Pose(DualQuaternion::new(r.quaternion(), Quaternion::ZERO))
    }

    pub fn from_translation(p: PureQuaternion) -> Pose {
        Pose::from_rotation_translation(UnitQuaternion::IDENTITY, p)
    }

    pub fn dual_quaternion(&self) -> DualQuaternion {
        self.0
    }

    pub fn rotation(&self) -> UnitQuaternion {
        UnitQuaternion::new_unchecked(self.0.primary)
    }

    /// `p = 2 D(x) P(x)*`
    pub fn translation(&self) -> PureQuaternion {
        (self.0.dual * self.0.primary.conjugate()).scale(2.0).imag()
    }

    /// Group inverse `x*`.
    pub fn conjugate(&self) -> Pose {
        Pose(self.0.conjugate())
    }

    pub fn vec8(&self) -> Vector8 {
        self.0.vec8()
    }

    /// Largest violation of the two unit conditions.
    pub fn unit_drift(&self) -> f64 {
        let n = (self.0.primary.norm() - 1.0).abs();
        let s = self.0.primary.dot(&self.0.dual).abs();
        n.max(s)
    }

    /// Reprojects when the drift exceeds [`RENORMALIZE_TOLERANCE`].
    pub fn renormalized(self) -> Pose {
        if self.unit_drift() > RENORMALIZE_TOLERANCE {
            Pose::new_normalize(self.0).unwrap_or(self)
        } else {
            self
        }
    }

    /// Same rigid motion, opposite hemisphere (`-x`).
    pub fn antipode(&self) -> Pose {
        Pose(-self.0)
    }

    /// Logarithm with `exp_pure(log(x)) = x`; the rotation half-angle lies
    /// in `[0, π]`. Undefined (series fallback only) at half-angle `π`.
    pub fn log(&self) -> Twist {
        let p = self.0.primary;
        let d = self.0.dual;
        let v = p.imag();
        let s = v.norm();
        let theta = s.atan2(p.w);
        let a = if s > SERIES_ANGLE { v.scale(theta / s) } else { v };
        let (sinc, c2) = exp_coefficients(theta);
        // d.w = -sinc ⟨a,b⟩ ; d.v = sinc b + c2 ⟨a,b⟩ a
        let ab = if sinc.abs() > 1e-12 { -d.w / sinc } else { 0.0 };
        let b = (d.imag() - a.scale(c2 * ab)).scale(1.0 / sinc.max(1e-12));
        Twist::new(a, b)
    }
}

impl Mul for Pose {
    type Output = Pose;
    fn mul(self, o: Pose) -> Pose {
        Pose(self.0 * o.0)
    }
}

impl Mul<DualQuaternion> for Pose {
    type Output = DualQuaternion;
    fn mul(self, o: DualQuaternion) -> DualQuaternion {
        self.0 * o
    }
}

impl From<Pose> for DualQuaternion {
    fn from(x: Pose) -> DualQuaternion {
        x.0
    }
}

/// `(sin θ / θ, (cos θ - sin θ/θ) / θ²)` with series forms near zero.
fn exp_coefficients(theta: f64) -> (f64, f64) {
    if theta < SERIES_ANGLE {
        let t2 = theta * theta;
        (1.0 - t2 / 6.0, -1.0 / 3.0 + t2 / 30.0)
    } else {
        let (s, c) = theta.sin_cos();
        let sinc = s / theta;
        (sinc, (c - sinc) / (theta * theta))
    }
}

/// Exponential of a pure dual quaternion: the solution at `t = 1` of
/// `ẋ = h x`, `x(0) = 1`.
///
/// With `h = a + εb`, `θ = ‖a‖`:
/// `P = cos θ + (sin θ/θ) a`,
/// `D = -(sin θ/θ)⟨a,b⟩ + (sin θ/θ) b + ((cos θ - sin θ/θ)/θ²)⟨a,b⟩ a`.
pub fn exp_pure(h: &Twist) -> Pose {
    let a = h.primary;
    let b = h.dual;
    let theta = a.norm();
    let (sinc, c2) = exp_coefficients(theta);
    let ab = a.inner(&b);
    let primary = Quaternion::new(theta.cos(), sinc * a.x, sinc * a.y, sinc * a.z);
    let dv = b.scale(sinc) + a.scale(c2 * ab);
    let dual = Quaternion::new(-sinc * ab, dv.x, dv.y, dv.z);
    Pose(DualQuaternion::new(primary, dual))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn epsilon_squared_vanishes() {
        let a = DualQuaternion::new(Quaternion::ONE, Quaternion::I);
        let b = DualQuaternion::new(Quaternion::ONE, Quaternion::J);
        let ab = a * b;
        assert_eq!(ab.primary, Quaternion::ONE);
        assert_eq!(ab.dual, Quaternion::I + Quaternion::J);
    }

    #[test]
    fn vec6_of_pure_dual() {
        let h = DualQuaternion::new(Quaternion::I, Quaternion::J);
        let v = h.vec6().unwrap();
        assert_eq!(v.as_slice(), &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        assert!(DualQuaternion::ONE.vec6().is_err());
    }

    #[test]
    fn hamilton_minus_identity_and_basis() {
        assert_eq!(DualQuaternion::ONE.hamilton_minus(), Matrix8::identity());
        let j = DualQuaternion::from(Quaternion::J);
        let i = DualQuaternion::from(Quaternion::I);
        let k = DualQuaternion::from(Quaternion::K);
        assert_eq!(j.hamilton_minus() * i.vec8(), k.vec8());
    }

    #[test]
    fn pose_identity_from_zero_translation() {
        let x = Pose::from_rotation_translation(UnitQuaternion::IDENTITY, PureQuaternion::ZERO);
        assert_eq!(x, Pose::IDENTITY);
    }

    #[test]
    fn exp_of_zero_and_quarter_turn() {
        assert_eq!(exp_pure(&Twist::ZERO), Pose::IDENTITY);
        let x = exp_pure(&Twist::new(PureQuaternion::K.scale(PI / 2.0), PureQuaternion::ZERO));
        let p = x.dual_quaternion().primary;
        assert!(p.w.abs() < 1e-16 && (p.z - 1.0).abs() < 1e-16);
        assert_eq!(x.dual_quaternion().dual, Quaternion::ZERO);
    }

    #[test]
    fn exp_pure_translation_uses_series() {
        let h = Twist::new(PureQuaternion::ZERO, PureQuaternion::new(0.5, -1.0, 0.25));
        let x = exp_pure(&h);
        let p = x.translation();
        assert!((p.vec3() - nalgebra::Vector3::new(1.0, -2.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn log_inverts_exp() {
        let h = Twist::new(PureQuaternion::new(0.3, -0.5, 0.9), PureQuaternion::new(-0.2, 0.7, 0.1));
        let back = exp_pure(&h).log();
        assert!((back.vec6() - h.vec6()).norm() < 1e-13);
        let h = Twist::new(PureQuaternion::ZERO, PureQuaternion::new(1.0, 2.0, 3.0));
        assert!((exp_pure(&h).log().vec6() - h.vec6()).norm() < 1e-13);
    }

    #[test]
    fn normalize_projects_to_unit_set() {
        let h = DualQuaternion::new(
            Quaternion::new(1.1, 0.2, 0.0, -0.3),
            Quaternion::new(0.4, 0.1, 0.2, 0.3),
        );
        let x = Pose::new_normalize(h).unwrap();
        assert!(x.unit_drift() < 1e-15);
        assert!(Pose::new(h).is_err());
    }
}
