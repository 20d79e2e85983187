use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};

use crate::error::{Error, Result};

/// Largest real part accepted when a general quaternion is reinterpreted as
/// a pure one. Products such as `x ξ x*` carry round-off of order 1e-16.
pub const PURE_TOLERANCE: f64 = 1e-9;

/// Tolerance on `|‖h‖ - 1|` when an already-normalized value is required.
pub const UNIT_TOLERANCE: f64 = 1e-9;

/// Quaternion `w + x î + y ĵ + z k̂`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quaternion { w, x, y, z }
    }

    pub fn real(&self) -> f64 {
        self.w
    }

    /// Imaginary part `Im(h)`.
    pub fn imag(&self) -> PureQuaternion {
        PureQuaternion::new(self.x, self.y, self.z)
    }

    pub fn conjugate(&self) -> Quaternion {
        Quaternion::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm_squared(&self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// Euclidean inner product of the coefficient 4-vectors.
    pub fn dot(&self, other: &Quaternion) -> f64 {
        self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn scale(&self, s: f64) -> Quaternion {
        Quaternion::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    pub fn is_finite(&self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Coefficients in the order `(1, î, ĵ, k̂)`.
    pub fn vec4(&self) -> Vector4<f64> {
        Vector4::new(self.w, self.x, self.y, self.z)
    }

    pub fn from_vec4(v: &Vector4<f64>) -> Quaternion {
        Quaternion::new(v[0], v[1], v[2], v[3])
    }

    /// Reinterpret as a pure quaternion, rejecting a real part above
    /// [`PURE_TOLERANCE`].
    pub fn to_pure(&self) -> Result<PureQuaternion> {
        if self.w.abs() > PURE_TOLERANCE || !self.w.is_finite() {
            return Err(Error::ConstraintViolation(format!(
                "quaternion with real part {:e} is not pure",
                self.w
            )));
        }
        Ok(self.imag())
    }

    /// `vec3(h)`; fails for non-pure input.
    pub fn vec3(&self) -> Result<Vector3<f64>> {
        Ok(self.to_pure()?.vec3())
    }

    /// Matrix `H⁺(h)` with `vec4(h a) = H⁺(h) vec4(a)`.
    pub fn hamilton_plus(&self) -> Matrix4<f64> {
        let (w, x, y, z) = (self.w, self.x, self.y, self.z);
        Matrix4::new(
            w, -x, -y, -z, //
            x, w, -z, y, //
            y, z, w, -x, //
            z, -y, x, w,
        )
    }

    /// Matrix `H⁻(h)` with `vec4(a h) = H⁻(h) vec4(a)`.
    pub fn hamilton_minus(&self) -> Matrix4<f64> {
        let (w, x, y, z) = (self.w, self.x, self.y, self.z);
        Matrix4::new(
            w, -x, -y, -z, //
            x, w, z, -y, //
            y, -z, w, x, //
            z, y, -x, w,
        )
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, o: Quaternion) {
        *self = *self + o;
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.w, -self.x, -self.y, -self.z)
    }
}

/// Hamilton product.
impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, b: Quaternion) -> Quaternion {
        let a = self;
        Quaternion::new(
            a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;
    fn mul(self, s: f64) -> Quaternion {
        self.scale(s)
    }
}

impl From<f64> for Quaternion {
    fn from(w: f64) -> Self {
        Quaternion::new(w, 0.0, 0.0, 0.0)
    }
}

/// Quaternion with real part identically zero; isomorphic to ℝ³.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct PureQuaternion {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl PureQuaternion {
    pub const ZERO: PureQuaternion = PureQuaternion::new(0.0, 0.0, 0.0);
    pub const I: PureQuaternion = PureQuaternion::new(1.0, 0.0, 0.0);
    pub const J: PureQuaternion = PureQuaternion::new(0.0, 1.0, 0.0);
    pub const K: PureQuaternion = PureQuaternion::new(0.0, 0.0, 1.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        PureQuaternion { x, y, z }
    }

    pub fn quaternion(&self) -> Quaternion {
        Quaternion::new(0.0, self.x, self.y, self.z)
    }

    /// `vec3`, coefficient order `(î, ĵ, k̂)`.
    pub fn vec3(&self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }

    pub fn from_vec3(v: &Vector3<f64>) -> Self {
        PureQuaternion::new(v[0], v[1], v[2])
    }

    /// `⟨u, v⟩ = -(uv + vu)/2`.
    pub fn inner(&self, o: &PureQuaternion) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    /// `u × v = (uv - vu)/2`.
    pub fn cross(&self, o: &PureQuaternion) -> PureQuaternion {
        PureQuaternion::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm_squared(&self) -> f64 {
        self.inner(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn scale(&self, s: f64) -> PureQuaternion {
        PureQuaternion::new(self.x * s, self.y * s, self.z * s)
    }

    /// Skew-symmetric matrix `[u]×` with `[u]× v = u × v`.
    pub fn skew(&self) -> Matrix3<f64> {
        Matrix3::new(
            0.0, -self.z, self.y, //
            self.z, 0.0, -self.x, //
            -self.y, self.x, 0.0,
        )
    }
}

impl Add for PureQuaternion {
    type Output = PureQuaternion;
    fn add(self, o: PureQuaternion) -> PureQuaternion {
        PureQuaternion::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for PureQuaternion {
    type Output = PureQuaternion;
    fn sub(self, o: PureQuaternion) -> PureQuaternion {
        PureQuaternion::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for PureQuaternion {
    type Output = PureQuaternion;
    fn neg(self) -> PureQuaternion {
        PureQuaternion::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for PureQuaternion {
    type Output = PureQuaternion;
    fn mul(self, s: f64) -> PureQuaternion {
        self.scale(s)
    }
}

impl From<PureQuaternion> for Quaternion {
    fn from(p: PureQuaternion) -> Quaternion {
        p.quaternion()
    }
}

/// Unit quaternion; represents a rotation in Spin(3).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitQuaternion(Quaternion);

impl UnitQuaternion {
    pub const IDENTITY: UnitQuaternion = UnitQuaternion(Quaternion::ONE);

    /// Wraps `q` after checking `|‖q‖ - 1| ≤ UNIT_TOLERANCE`.
    pub fn new(q: Quaternion) -> Result<Self> {
        let n = q.norm();
        if (n - 1.0).abs() > UNIT_TOLERANCE || !n.is_finite() {
            return Err(Error::ConstraintViolation(format!("quaternion norm {n} is not unit")));
        }
        Ok(UnitQuaternion(q))
    }

    /// Divides by the norm. Fails on a zero quaternion.
    pub fn new_normalize(q: Quaternion) -> Result<Self> {
        let n = q.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ConstraintViolation("cannot normalize a zero quaternion".into()));
        }
        Ok(UnitQuaternion(q.scale(1.0 / n)))
    }

    pub(crate) fn new_unchecked(q: Quaternion) -> Self {
        UnitQuaternion(q)
    }

    /// `r = cos(φ/2) + sin(φ/2) n` for a unit axis `n`.
    pub fn from_angle_axis(angle: f64, axis: PureQuaternion) -> Result<Self> {
        let n = axis.norm();
        if (n - 1.0).abs() > UNIT_TOLERANCE {
            return Err(Error::ConstraintViolation(format!(
                "rotation axis norm {n} is not unit"
            )));
        }
        let (s, c) = (0.5 * angle).sin_cos();
        Ok(UnitQuaternion(Quaternion::new(c, s * axis.x, s * axis.y, s * axis.z)))
    }

    pub fn quaternion(&self) -> Quaternion {
        self.0
    }

    pub fn conjugate(&self) -> UnitQuaternion {
        UnitQuaternion(self.0.conjugate())
    }

    /// Rotates a pure quaternion: `r v r*`.
    pub fn rotate(&self, v: &PureQuaternion) -> PureQuaternion {
        (self.0 * v.quaternion() * self.0.conjugate()).imag()
    }

    /// Equivalent rotation matrix.
    pub fn to_rotation_matrix(&self) -> Matrix3<f64> {
        let Quaternion { w, x, y, z } = self.0;
        Matrix3::new(
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        )
    }
}

impl Mul for UnitQuaternion {
    type Output = UnitQuaternion;
    fn mul(self, o: UnitQuaternion) -> UnitQuaternion {
        UnitQuaternion(self.0 * o.0)
    }
}

impl From<UnitQuaternion> for Quaternion {
    fn from(r: UnitQuaternion) -> Quaternion {
        r.0
    }
}
