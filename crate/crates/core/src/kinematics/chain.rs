use std::path::Path;

use nalgebra::DVector;

use crate::dq::{DualQuaternion, Pose, PureQuaternion, Quaternion};
use crate::error::{Error, Result};

/// Header line every chain file starts with.
pub const CHAIN_HEADER: &str = "dh-standard";

/// One standard (distal) Denavit–Hartenberg row of a revolute joint:
/// `A = Rz(θ₀ + q) · Tz(d) · Tx(a) · Rx(α)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DhLink {
    pub theta_offset: f64,
    pub d: f64,
    pub a: f64,
    pub alpha: f64,
}

impl DhLink {
    pub fn new(theta_offset: f64, d: f64, a: f64, alpha: f64) -> Self {
        DhLink {
            theta_offset,
            d,
            a,
            alpha,
        }
    }

    /// Pose of this link's distal frame; `x_i^{i-1}(q_i)`.
    pub fn pose(&self, q: f64) -> Pose {
        let (st, ct) = (0.5 * (self.theta_offset + q)).sin_cos();
        let (sa, ca) = (0.5 * self.alpha).sin_cos();
        let rz = Quaternion::new(ct, 0.0, 0.0, st);
        let rx = Quaternion::new(ca, sa, 0.0, 0.0);
        let r = rz * rx;
        // translation: Rz applied to (a, 0, d)
        let p = Quaternion::new(0.0, self.a * 2.0 * ct * ct - self.a, self.a * 2.0 * st * ct, self.d);
        Pose::new_unchecked(DualQuaternion::new(r, (p * r).scale(0.5)))
    }

    /// `dx_i^{i-1}/dq_i = (1/2) k̂ x_i^{i-1}`: the joint rotates about the
    /// proximal z axis.
    pub fn pose_derivative(&self, q: f64) -> DualQuaternion {
        DualQuaternion::from(Quaternion::K.scale(0.5)) * self.pose(q).dual_quaternion()
    }

    fn is_finite(&self) -> bool {
        self.theta_offset.is_finite() && self.d.is_finite() && self.a.is_finite() && self.alpha.is_finite()
    }
}

/// Revolute serial arm described by DH rows, with fixed base and
/// end-effector offsets: `x_N(q) = base · x_1^0 ⋯ x_n^{n-1} · effector`.
#[derive(Clone, Debug, PartialEq)]
pub struct SerialChain {
    links: Vec<DhLink>,
    base: Pose,
    effector: Pose,
}

impl SerialChain {
    pub fn new(links: Vec<DhLink>) -> Result<Self> {
        if links.is_empty() {
            return Err(Error::InvalidParameter("a chain needs at least one link".into()));
        }
        if let Some(i) = links.iter().position(|l| !l.is_finite()) {
            return Err(Error::InvalidParameter(format!("link {i} has non-finite parameters")));
        }
        Ok(SerialChain {
            links,
            base: Pose::IDENTITY,
            effector: Pose::IDENTITY,
        })
    }

    pub fn with_base(mut self, base: Pose) -> Self {
        self.base = base;
        self
    }

    pub fn with_effector(mut self, effector: Pose) -> Self {
        self.effector = effector;
        self
    }

    pub fn links(&self) -> &[DhLink] {
        &self.links
    }

    pub fn dof(&self) -> usize {
        self.links.len()
    }

    pub fn base(&self) -> Pose {
        self.base
    }

    pub fn effector(&self) -> Pose {
        self.effector
    }

    /// Parses the chain text format: a `dh-standard` header, then one
    /// `theta_offset d a alpha` row per link. `#` starts a comment.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut header_seen = false;
        let mut links = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Config {
                path: origin.to_string(),
                line: idx + 1,
                message,
            };
            if !header_seen {
                if line != CHAIN_HEADER {
                    return Err(err(format!("expected header `{CHAIN_HEADER}`, found `{line}`")));
                }
                header_seen = true;
                continue;
            }
            let values: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|_| err(format!("`{t}` is not a number"))))
                .collect::<Result<_>>()?;
            if values.len() != 4 {
                return Err(err(format!(
                    "expected 4 columns `theta_offset d a alpha`, found {}",
                    values.len()
                )));
            }
            links.push(DhLink::new(values[0], values[1], values[2], values[3]));
        }
        if !header_seen {
            return Err(Error::Config {
                path: origin.to_string(),
                line: 1,
                message: format!("missing `{CHAIN_HEADER}` header"),
            });
        }
        SerialChain::new(links).map_err(|e| Error::Config {
            path: origin.to_string(),
            line: text.lines().count().max(1),
            message: e.to_string(),
        })
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        SerialChain::parse(&text, &path.display().to_string())
    }

    /// Two-link planar arm with unit links, rotating about ẑ.
    pub fn planar_two_link() -> Self {
        SerialChain::parse(PLANAR_2_LINK, "planar2.dh").expect("shipped chain parses")
    }

    /// Approximate KUKA LBR-IV: the shipped `lbr_iv.dh` table with the
    /// 0.078 m flange offset along the last z axis.
    pub fn lbr_iv() -> Self {
        SerialChain::parse(LBR_IV, "lbr_iv.dh")
            .expect("shipped chain parses")
            .with_effector(Pose::from_translation(PureQuaternion::new(0.0, 0.0, LBR_IV_FLANGE)))
    }

    pub(crate) fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.dof() {
            return Err(Error::DimensionMismatch {
                expected: self.dof(),
                actual: len,
            });
        }
        Ok(())
    }
}

pub const PLANAR_2_LINK: &str = include_str!("../../data/chains/planar2.dh");
pub const LBR_IV: &str = include_str!("../../data/chains/lbr_iv.dh");
/// Flange/tool offset of the approximate LBR-IV, metres along the last z.
pub const LBR_IV_FLANGE: f64 = 0.078;

/// Joint positions and, optionally, velocities.
#[derive(Clone, Debug, PartialEq)]
pub struct JointState {
    pub q: DVector<f64>,
    pub qdot: Option<DVector<f64>>,
}

impl JointState {
    pub fn new(q: DVector<f64>) -> Self {
        JointState { q, qdot: None }
    }

    pub fn with_velocity(q: DVector<f64>, qdot: DVector<f64>) -> Result<Self> {
        if q.len() != qdot.len() {
            return Err(Error::DimensionMismatch {
                expected: q.len(),
                actual: qdot.len(),
            });
        }
        Ok(JointState { q, qdot: Some(qdot) })
    }
}
