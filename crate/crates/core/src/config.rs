//! Scenario files.
//!
//! A scenario is line-oriented `key = value` text in five sections,
//! `[robot] [controller] [trajectory] [disturbance] [sim]`, plus an optional
//! `[sweep]` that expands one file into a family of runs differing in a
//! single key. `#` starts a comment. Vectors are whitespace separated.
//!
//! ```text
//! [robot]
//! chain = ../chains/lbr_iv.dh        # relative to this file
//! base.translation = 1.6 -0.1 0.1
//! effector.translation = 0 0 0.078
//! q0 = 0 0.6 0 -1.3 0 0.7 0
//! initial.translation = 2.15 -0.05 0.7   # optional: IK from q0
//! initial.angle_axis = 2.187 -0.689 0.395 0.606
//!
//! [controller]
//! kind = hinf_tracking               # see `dqhinf --list-controllers`
//! gamma_O = 2                        # or gamma_O1/gamma_O2, or kappa
//! gamma_T = 0.5
//! sigma_region = 0.01                # singular region, optional
//! sigma_far = 2
//! inverse = alsi                     # or pinv (default)
//! alsi_eps = 0.01
//! alsi_lambda_max = 2
//!
//! [trajectory]
//! kind = set_point                   # or screw, moving_target
//! target.translation = 1.56 -0.43 0.65
//! target.quaternion = 0.7071067811865476 0 0.7071067811865476 0
//!
//! [disturbance]
//! vw.kind = band_limited             # zero constant sinusoid triangle band_limited
//! vw.amplitude = 0.05 0.05 0.05 0.02 0.02 0.02
//! vw.tones = 6
//! vw.f_min = 0.2
//! vw.f_max = 2
//!
//! [sim]
//! dt = 0.005
//! T = 10
//! seed = 1
//!
//! [sweep]
//! key = controller.gamma_T
//! values = 3.5 2 0.9
//! ```
//!
//! Screw trajectories take `to.*` or a world-frame `displacement` of the
//! start pose, `duration`, optional `start`, and an optional `hold`/`back`
//! pair for the return leg; `from.*` defaults to the initial pose. Moving
//! targets take `offset.*`, `speed` and `periods`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::{DVector, Vector3, Vector6};

use crate::controllers::{AttenuationSpec, ControllerParams, ControllerRegistry, PseudoInverse, SingularRegionSpec};
use crate::disturbances::DisturbanceSignal;
use crate::dq::{Pose, PureQuaternion, Quaternion, UnitQuaternion};
use crate::error::{Error, Result};
use crate::kinematics::{fkm, inverse_kinematics, SerialChain};
use crate::simulator::{MovingTarget, ScrewMotion, Simulation, Trajectory, DEFAULT_DT};

const SECTIONS: [&str; 6] = ["robot", "controller", "trajectory", "disturbance", "sim", "sweep"];

/// Offset mixed into the scenario seed for the `v_c` channel so the two
/// channels draw independent tones.
const VC_SEED_OFFSET: u64 = 0x9E37_79B9_7F4A_7C15;

const IK_TOLERANCE: f64 = 1e-12;
const IK_MAX_ITER: usize = 2000;

#[derive(Clone, Debug, PartialEq)]
pub enum RotationSpec {
    Identity,
    /// Angle in radians about an axis; the axis is normalized on use.
    AngleAxis {
        angle: f64,
        axis: [f64; 3],
    },
    /// `w x y z`, normalized on use.
    Quaternion([f64; 4]),
}

#[derive(Clone, Debug, PartialEq)]
pub struct PoseSpec {
    pub translation: [f64; 3],
    pub rotation: RotationSpec,
}

impl PoseSpec {
    pub fn pose(&self) -> Result<Pose> {
        let r = match &self.rotation {
            RotationSpec::Identity => UnitQuaternion::IDENTITY,
            RotationSpec::AngleAxis { angle, axis } => {
                let a = PureQuaternion::new(axis[0], axis[1], axis[2]);
                let n = a.norm();
                if !(n > 0.0 && n.is_finite()) {
                    return Err(Error::InvalidParameter("rotation axis must be nonzero".into()));
                }
                UnitQuaternion::from_angle_axis(*angle, a.scale(1.0 / n))?
            }
            RotationSpec::Quaternion(q) => UnitQuaternion::new_normalize(Quaternion::new(q[0], q[1], q[2], q[3]))?,
        };
        let [x, y, z] = self.translation;
        Ok(Pose::from_rotation_translation(r, PureQuaternion::new(x, y, z)))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RobotSpec {
    /// Chain file as written; relative paths resolve against the scenario's
    /// directory.
    pub chain: String,
    pub base: Option<PoseSpec>,
    pub effector: Option<PoseSpec>,
    pub q0: Vec<f64>,
    /// Start pose reached by inverse kinematics seeded at `q0`.
    pub initial: Option<PoseSpec>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum InverseSpec {
    Pinv,
    Alsi { eps: f64, lambda_max: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ControllerSpec {
    pub kind: String,
    /// `[γ_O1, γ_O2, γ_T1, γ_T2]`.
    pub attenuation: Option<[f64; 4]>,
    pub kappa: Option<f64>,
    /// `(σ_region, σ_far)`.
    pub region: Option<(f64, f64)>,
    pub inverse: InverseSpec,
}

impl ControllerSpec {
    pub fn params(&self) -> Result<ControllerParams> {
        let attenuation = match self.attenuation {
            Some([o1, o2, t1, t2]) => Some(AttenuationSpec::new(o1, o2, t1, t2)?),
            None => None,
        };
        let region = match self.region {
            Some((r, f)) => Some(SingularRegionSpec::new(r, f)?),
            None => None,
        };
        let inverse = match self.inverse {
            InverseSpec::Pinv => PseudoInverse::default(),
            InverseSpec::Alsi { eps, lambda_max } => PseudoInverse::Alsi { eps, lambda_max },
        };
        Ok(ControllerParams {
            attenuation,
            kappa: self.kappa,
            region,
            inverse,
        })
    }

    pub fn attenuation_spec(&self) -> Result<Option<AttenuationSpec>> {
        Ok(self.params()?.attenuation)
    }

    pub fn region_spec(&self) -> Result<Option<SingularRegionSpec>> {
        Ok(self.params()?.region)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ScrewGoal {
    Pose(PoseSpec),
    /// World-frame translation applied to the start pose.
    Displacement([f64; 3]),
}

#[derive(Clone, Debug, PartialEq)]
pub enum TrajectorySpec {
    SetPoint {
        target: PoseSpec,
    },
    Screw {
        from: Option<PoseSpec>,
        to: ScrewGoal,
        start: f64,
        duration: f64,
        /// `(hold, back)` of the return leg.
        ret: Option<(f64, f64)>,
    },
    MovingTarget {
        offset: PoseSpec,
        speed: [f64; 3],
        periods: [f64; 3],
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum DisturbanceSpec {
    Zero,
    Constant {
        amplitude: [f64; 6],
    },
    Sinusoid {
        amplitude: [f64; 6],
        period: f64,
        phase: f64,
    },
    Triangle {
        amplitude: [f64; 6],
        periods: [f64; 6],
    },
    BandLimited {
        amplitude: [f64; 6],
        tones: usize,
        f_min: f64,
        f_max: f64,
    },
}

impl DisturbanceSpec {
    pub fn signal(&self, horizon: f64, dt: f64, seed: u64) -> Result<DisturbanceSignal> {
        let v6 = |a: &[f64; 6]| Vector6::from_column_slice(a);
        match self {
            DisturbanceSpec::Zero => Ok(DisturbanceSignal::zero(horizon)),
            DisturbanceSpec::Constant { amplitude } => Ok(DisturbanceSignal::constant(v6(amplitude), horizon)),
            DisturbanceSpec::Sinusoid {
                amplitude,
                period,
                phase,
            } => DisturbanceSignal::sinusoid(v6(amplitude), *period, *phase, horizon),
            DisturbanceSpec::Triangle { amplitude, periods } => {
                DisturbanceSignal::triangle_base(v6(amplitude), v6(periods), horizon)
            }
            DisturbanceSpec::BandLimited {
                amplitude,
                tones,
                f_min,
                f_max,
            } => DisturbanceSignal::band_limited(v6(amplitude), *tones, *f_min, *f_max, dt, seed, horizon),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    /// Directory relative chain paths resolve against; not serialized.
    pub base_dir: PathBuf,
    pub robot: RobotSpec,
    pub controller: ControllerSpec,
    pub trajectory: TrajectorySpec,
    pub v_w: DisturbanceSpec,
    pub v_c: DisturbanceSpec,
    pub dt: f64,
    pub horizon: f64,
    pub seed: u64,
}

impl ScenarioConfig {
    /// Parses a file holding exactly one scenario (no `[sweep]`).
    pub fn parse(text: &str, origin: &str, base_dir: &Path) -> Result<Self> {
        let mut all = parse_scenarios(text, origin, base_dir)?;
        if all.len() != 1 {
            return Err(Error::Config {
                path: origin.to_string(),
                line: 1,
                message: format!("expected one scenario, the sweep yields {}", all.len()),
            });
        }
        Ok(all.remove(0))
    }

    pub fn chain_path(&self) -> PathBuf {
        let p = Path::new(&self.robot.chain);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn chain(&self) -> Result<SerialChain> {
        let mut chain = SerialChain::from_file(self.chain_path())?;
        if let Some(b) = &self.robot.base {
            chain = chain.with_base(b.pose()?);
        }
        if let Some(e) = &self.robot.effector {
            chain = chain.with_effector(e.pose()?);
        }
        Ok(chain)
    }

    /// `q0`, or the inverse-kinematics solution for the initial pose seeded
    /// at `q0`.
    pub fn initial_joints(&self, chain: &SerialChain) -> Result<DVector<f64>> {
        let seed = DVector::from_column_slice(&self.robot.q0);
        match &self.robot.initial {
            None => Ok(seed),
            Some(p) => inverse_kinematics(chain, &p.pose()?, &seed, IK_TOLERANCE, IK_MAX_ITER),
        }
    }

    pub fn vc_seed(&self) -> u64 {
        self.seed.wrapping_add(VC_SEED_OFFSET)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.horizon >= self.dt && self.horizon.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "T must be at least dt, got T = {}, dt = {}",
                self.horizon, self.dt
            )));
        }
        ControllerRegistry::default().build(&self.controller.kind, &self.controller.params()?)?;
        Ok(())
    }

    pub fn build(&self) -> Result<Simulation> {
        self.validate()?;
        let chain = self.chain()?;
        let q0 = self.initial_joints(&chain)?;
        let x0 = fkm(&chain, &q0)?;
        let controller = ControllerRegistry::default().build(&self.controller.kind, &self.controller.params()?)?;
        let trajectory = match &self.trajectory {
            TrajectorySpec::SetPoint { target } => Trajectory::SetPoint(target.pose()?),
            TrajectorySpec::Screw {
                from,
                to,
                start,
                duration,
                ret,
            } => {
                let from = match from {
                    Some(p) => p.pose()?,
                    None => x0,
                };
                let to = match to {
                    ScrewGoal::Pose(p) => p.pose()?,
                    ScrewGoal::Displacement([x, y, z]) => {
                        Pose::from_translation(PureQuaternion::new(*x, *y, *z)) * from
                    }
                };
                Trajectory::Screw(ScrewMotion::new(from, to, *start, *duration, *ret)?)
            }
            TrajectorySpec::MovingTarget { offset, speed, periods } => Trajectory::MovingTarget(MovingTarget::new(
                offset.pose()?,
                Vector3::from_column_slice(speed),
                Vector3::from_column_slice(periods),
            )?),
        };
        Ok(Simulation {
            chain,
            controller,
            trajectory,
            v_w: self.v_w.signal(self.horizon, self.dt, self.seed)?,
            v_c: self.v_c.signal(self.horizon, self.dt, self.vc_seed())?,
            q0,
            x0: None,
            dt: self.dt,
            horizon: self.horizon,
        })
    }

    /// Canonical text form: fixed section and key order, every float in its
    /// shortest round-trip representation, shorthands expanded.
    pub fn to_canonical(&self) -> String {
        let mut s = String::new();
        let r = &self.robot;
        s.push_str("[robot]\n");
        kv(&mut s, "chain", &r.chain);
        if let Some(p) = &r.base {
            write_pose(&mut s, "base", p);
        }
        if let Some(p) = &r.effector {
            write_pose(&mut s, "effector", p);
        }
        kv(&mut s, "q0", &join(&r.q0));
        if let Some(p) = &r.initial {
            write_pose(&mut s, "initial", p);
        }

        let c = &self.controller;
        s.push_str("\n[controller]\n");
        kv(&mut s, "kind", &c.kind);
        if let Some([o1, o2, t1, t2]) = c.attenuation {
            kv(&mut s, "gamma_O1", &num(o1));
            kv(&mut s, "gamma_O2", &num(o2));
            kv(&mut s, "gamma_T1", &num(t1));
            kv(&mut s, "gamma_T2", &num(t2));
        }
        if let Some(k) = c.kappa {
            kv(&mut s, "kappa", &num(k));
        }
        if let Some((reg, far)) = c.region {
            kv(&mut s, "sigma_region", &num(reg));
            kv(&mut s, "sigma_far", &num(far));
        }
        match c.inverse {
            InverseSpec::Pinv => kv(&mut s, "inverse", "pinv"),
            InverseSpec::Alsi { eps, lambda_max } => {
                kv(&mut s, "inverse", "alsi");
                kv(&mut s, "alsi_eps", &num(eps));
                kv(&mut s, "alsi_lambda_max", &num(lambda_max));
            }
        }

        s.push_str("\n[trajectory]\n");
        match &self.trajectory {
            TrajectorySpec::SetPoint { target } => {
                kv(&mut s, "kind", "set_point");
                write_pose(&mut s, "target", target);
            }
            TrajectorySpec::Screw {
                from,
                to,
                start,
                duration,
                ret,
            } => {
                kv(&mut s, "kind", "screw");
                if let Some(p) = from {
                    write_pose(&mut s, "from", p);
                }
                match to {
                    ScrewGoal::Pose(p) => write_pose(&mut s, "to", p),
                    ScrewGoal::Displacement(d) => kv(&mut s, "displacement", &join(d)),
                }
                kv(&mut s, "start", &num(*start));
                kv(&mut s, "duration", &num(*duration));
                if let Some((h, b)) = ret {
                    kv(&mut s, "hold", &num(*h));
                    kv(&mut s, "back", &num(*b));
                }
            }
            TrajectorySpec::MovingTarget { offset, speed, periods } => {
                kv(&mut s, "kind", "moving_target");
                write_pose(&mut s, "offset", offset);
                kv(&mut s, "speed", &join(speed));
                kv(&mut s, "periods", &join(periods));
            }
        }

        s.push_str("\n[disturbance]\n");
        write_disturbance(&mut s, "vw", &self.v_w);
        write_disturbance(&mut s, "vc", &self.v_c);

        s.push_str("\n[sim]\n");
        kv(&mut s, "name", &self.name);
        kv(&mut s, "dt", &num(self.dt));
        kv(&mut s, "T", &num(self.horizon));
        kv(&mut s, "seed", &self.seed.to_string());
        s
    }
}

/// Reads a scenario file, expanding any `[sweep]`.
pub fn load(path: impl AsRef<Path>) -> Result<Vec<ScenarioConfig>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut out = parse_scenarios(&text, &path.display().to_string(), &base_dir)?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario");
    for c in &mut out {
        if c.name.is_empty() {
            c.name = stem.to_string();
        } else if let Some(rest) = c.name.strip_prefix('\u{0}') {
            c.name = format!("{stem}{rest}");
        }
    }
    Ok(out)
}

/// Parses scenario text; a `[sweep]` yields one scenario per value, named
/// `<name>_<key>_<value>`. Scenarios without a `name` get an empty one
/// (or, when swept, a `\0`-prefixed suffix that [`load`] fills with the
/// file stem).
pub fn parse_scenarios(text: &str, origin: &str, base_dir: &Path) -> Result<Vec<ScenarioConfig>> {
    let mut doc = Document::parse(text, origin)?;
    let Some(sweep) = doc.sections.remove("sweep") else {
        return Ok(vec![doc.scenario(base_dir)?]);
    };
    let mut sweep = doc.section_from(sweep, "sweep");
    let key = sweep.require("key")?;
    let values = sweep.require("values")?;
    sweep.finish()?;
    let (section, name) = key
        .value
        .split_once('.')
        .filter(|(s, _)| SECTIONS[..5].contains(s))
        .ok_or_else(|| doc.err(key.line, format!("sweep key `{}` must be `<section>.<key>`", key.value)))?;
    let items: Vec<&str> = values.value.split_whitespace().collect();
    if items.is_empty() {
        return Err(doc.err(values.line, "sweep needs at least one value".into()));
    }
    let mut out = Vec::with_capacity(items.len());
    for item in items {
        let mut variant = doc.clone();
        let (_, entries) = variant
            .sections
            .entry(section.to_string())
            .or_insert_with(|| (key.line, BTreeMap::new()));
        entries.insert(
            name.to_string(),
            Entry {
                value: item.to_string(),
                line: values.line,
            },
        );
        let mut c = variant.scenario(base_dir)?;
        let suffix = format!("_{name}_{item}");
        c.name = if c.name.is_empty() {
            format!("\u{0}{suffix}")
        } else {
            format!("{}{suffix}", c.name)
        };
        out.push(c);
    }
    Ok(out)
}

#[derive(Clone, Debug)]
struct Entry {
    value: String,
    line: usize,
}

#[derive(Clone, Debug)]
struct Document {
    origin: String,
    last_line: usize,
    /// Section name → (header line, key → entry).
    sections: BTreeMap<String, (usize, BTreeMap<String, Entry>)>,
}

impl Document {
    fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut doc = Document {
            origin: origin.to_string(),
            last_line: text.lines().count().max(1),
            sections: BTreeMap::new(),
        };
        let mut current: Option<String> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let name = name.trim();
                if !SECTIONS.contains(&name) {
                    return Err(doc.err(line_no, format!("unknown section `[{name}]`")));
                }
                if doc.sections.contains_key(name) {
                    return Err(doc.err(line_no, format!("section `[{name}]` appears twice")));
                }
                doc.sections.insert(name.to_string(), (line_no, BTreeMap::new()));
                current = Some(name.to_string());
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(doc.err(line_no, format!("expected `key = value`, found `{line}`")));
            };
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || value.is_empty() {
                return Err(doc.err(line_no, "empty key or value".into()));
            }
            let Some(section) = &current else {
                return Err(doc.err(line_no, format!("`{key}` appears before any section header")));
            };
            let entries = &mut doc.sections.get_mut(section).expect("section was inserted").1;
            if entries.contains_key(key) {
                return Err(doc.err(line_no, format!("duplicate key `{key}`")));
            }
            entries.insert(
                key.to_string(),
                Entry {
                    value: value.to_string(),
                    line: line_no,
                },
            );
        }
        Ok(doc)
    }

    fn err(&self, line: usize, message: String) -> Error {
        Error::Config {
            path: self.origin.clone(),
            line,
            message,
        }
    }

    fn section(&self, name: &'static str) -> Section<'_> {
        let (header, entries) = self
            .sections
            .get(name)
            .cloned()
            .unwrap_or((self.last_line, BTreeMap::new()));
        Section {
            doc: self,
            name,
            header,
            entries,
        }
    }

    fn section_from(&self, raw: (usize, BTreeMap<String, Entry>), name: &'static str) -> Section<'_> {
        Section {
            doc: self,
            name,
            header: raw.0,
            entries: raw.1,
        }
    }

    fn scenario(&self, base_dir: &Path) -> Result<ScenarioConfig> {
        let mut robot = self.section("robot");
        let robot_spec = RobotSpec {
            chain: robot.require("chain")?.value,
            base: robot.pose("base")?,
            effector: robot.pose("effector")?,
            q0: {
                let e = robot.require("q0")?;
                robot.floats(&e)?
            },
            initial: robot.pose("initial")?,
        };
        robot.finish()?;

        let mut ctl = self.section("controller");
        let controller = ctl.controller()?;
        ctl.finish()?;

        let mut tr = self.section("trajectory");
        let trajectory = tr.trajectory()?;
        tr.finish()?;

        let mut dist = self.section("disturbance");
        let v_w = dist.disturbance("vw")?;
        let v_c = dist.disturbance("vc")?;
        dist.finish()?;

        let mut sim = self.section("sim");
        let name = sim.take("name").map(|e| e.value).unwrap_or_default();
        let dt = sim.opt_float("dt")?.unwrap_or(DEFAULT_DT);
        let horizon = {
            let e = sim.require("T")?;
            sim.float(&e)?
        };
        let seed = match sim.take("seed") {
            Some(e) => e
                .value
                .parse::<u64>()
                .map_err(|_| self.err(e.line, format!("seed `{}` is not a nonnegative integer", e.value)))?,
            None => 0,
        };
        let sim_header = sim.header;
        sim.finish()?;

        let cfg = ScenarioConfig {
            name,
            base_dir: base_dir.to_path_buf(),
            robot: robot_spec,
            controller,
            trajectory,
            v_w,
            v_c,
            dt,
            horizon,
            seed,
        };
        if !(dt > 0.0 && horizon >= dt && horizon.is_finite()) {
            return Err(self.err(
                sim_header,
                format!("need dt > 0 and T >= dt, got dt = {dt}, T = {horizon}"),
            ));
        }
        Ok(cfg)
    }
}

struct Section<'a> {
    doc: &'a Document,
    name: &'static str,
    header: usize,
    entries: BTreeMap<String, Entry>,
}

impl Section<'_> {
    fn err(&self, line: usize, message: String) -> Error {
        self.doc.err(line, message)
    }

    fn take(&mut self, key: &str) -> Option<Entry> {
        self.entries.remove(key)
    }

    fn require(&mut self, key: &str) -> Result<Entry> {
        self.take(key)
            .ok_or_else(|| self.err(self.header, format!("[{}] is missing `{key}`", self.name)))
    }

    fn finish(self) -> Result<()> {
        match self.entries.iter().min_by_key(|(_, e)| e.line) {
            Some((k, e)) => Err(self.err(e.line, format!("unknown key `{k}` in [{}]", self.name))),
            None => Ok(()),
        }
    }

    fn floats(&self, e: &Entry) -> Result<Vec<f64>> {
        e.value
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| self.err(e.line, format!("`{t}` is not a finite number")))
            })
            .collect()
    }

    fn fixed<const N: usize>(&self, e: &Entry) -> Result<[f64; N]> {
        let v = self.floats(e)?;
        v.as_slice()
            .try_into()
            .map_err(|_| self.err(e.line, format!("expected {N} numbers, found {}", v.len())))
    }

    fn float(&self, e: &Entry) -> Result<f64> {
        Ok(self.fixed::<1>(e)?[0])
    }

    fn opt_float(&mut self, key: &str) -> Result<Option<f64>> {
        match self.take(key) {
            Some(e) => self.float(&e).map(Some),
            None => Ok(None),
        }
    }

    fn req_float(&mut self, key: &str) -> Result<f64> {
        let e = self.require(key)?;
        self.float(&e)
    }

    fn req_fixed<const N: usize>(&mut self, key: &str) -> Result<[f64; N]> {
        let e = self.require(key)?;
        self.fixed(&e)
    }

    /// `<prefix>.translation` plus at most one of `<prefix>.angle_axis`,
    /// `<prefix>.quaternion`; `None` when no key with the prefix exists.
    fn pose(&mut self, prefix: &str) -> Result<Option<PoseSpec>> {
        let t = self.take(&format!("{prefix}.translation"));
        let aa = self.take(&format!("{prefix}.angle_axis"));
        let q = self.take(&format!("{prefix}.quaternion"));
        if t.is_none() && aa.is_none() && q.is_none() {
            return Ok(None);
        }
        let translation = match &t {
            Some(e) => self.fixed::<3>(e)?,
            None => [0.0; 3],
        };
        let rotation = match (aa, q) {
            (Some(a), Some(b)) => {
                return Err(self.err(
                    a.line.max(b.line),
                    format!("`{prefix}` has both an angle_axis and a quaternion"),
                ))
            }
            (Some(e), None) => {
                let [angle, x, y, z] = self.fixed::<4>(&e)?;
                if x == 0.0 && y == 0.0 && z == 0.0 {
                    return Err(self.err(e.line, "rotation axis must be nonzero".into()));
                }
                RotationSpec::AngleAxis { angle, axis: [x, y, z] }
            }
            (None, Some(e)) => {
                let q = self.fixed::<4>(&e)?;
                if q.iter().all(|v| *v == 0.0) {
                    return Err(self.err(e.line, "quaternion must be nonzero".into()));
                }
                RotationSpec::Quaternion(q)
            }
            (None, None) => RotationSpec::Identity,
        };
        Ok(Some(PoseSpec { translation, rotation }))
    }

    fn req_pose(&mut self, prefix: &str) -> Result<PoseSpec> {
        self.pose(prefix)?
            .ok_or_else(|| self.err(self.header, format!("[{}] is missing `{prefix}.*`", self.name)))
    }

    fn controller(&mut self) -> Result<ControllerSpec> {
        let kind = self.require("kind")?;
        let registry = ControllerRegistry::default();
        if !registry.contains(&kind.value) {
            return Err(self.err(
                kind.line,
                format!(
                    "unknown controller `{}`; known: {}",
                    kind.value,
                    registry.names().join(", ")
                ),
            ));
        }
        let mut pair = |short: &str| -> Result<Option<[f64; 2]>> {
            let s = self.opt_float(short)?;
            let a = self.opt_float(&format!("{short}1"))?;
            let b = self.opt_float(&format!("{short}2"))?;
            match (s, a, b) {
                (None, None, None) => Ok(None),
                (Some(g), None, None) => Ok(Some([g, g])),
                (None, Some(a), Some(b)) => Ok(Some([a, b])),
                _ => Err(self.err(
                    self.header,
                    format!("give either `{short}` or both `{short}1` and `{short}2`"),
                )),
            }
        };
        let o = pair("gamma_O")?;
        let t = pair("gamma_T")?;
        let attenuation = match (o, t) {
            (None, None) => None,
            (Some([o1, o2]), Some([t1, t2])) => Some([o1, o2, t1, t2]),
            _ => {
                return Err(self.err(
                    self.header,
                    "attenuation needs both orientation and translation levels".into(),
                ))
            }
        };
        let kappa = self.opt_float("kappa")?;
        let region = match (self.take("sigma_region"), self.take("sigma_far")) {
            (None, None) => None,
            (Some(r), Some(f)) => Some((self.float(&r)?, self.float(&f)?)),
            (Some(e), None) | (None, Some(e)) => {
                return Err(self.err(
                    e.line,
                    "the singular region needs both `sigma_region` and `sigma_far`".into(),
                ))
            }
        };
        let inverse = match self.take("inverse") {
            None => InverseSpec::Pinv,
            Some(e) if e.value == "pinv" => InverseSpec::Pinv,
            Some(e) if e.value == "alsi" => InverseSpec::Alsi {
                eps: self.req_float("alsi_eps")?,
                lambda_max: self.req_float("alsi_lambda_max")?,
            },
            Some(e) => return Err(self.err(e.line, format!("unknown inverse `{}` (pinv | alsi)", e.value))),
        };
        let spec = ControllerSpec {
            kind: kind.value,
            attenuation,
            kappa,
            region,
            inverse,
        };
        spec.params()
            .and_then(|p| registry.build(&spec.kind, &p).map(|_| ()))
            .map_err(|e| self.err(kind.line, e.to_string()))?;
        Ok(spec)
    }

    fn trajectory(&mut self) -> Result<TrajectorySpec> {
        let kind = self.require("kind")?;
        match kind.value.as_str() {
            "set_point" => Ok(TrajectorySpec::SetPoint {
                target: self.req_pose("target")?,
            }),
            "screw" => {
                let from = self.pose("from")?;
                let goal = self.pose("to")?;
                let disp = self.take("displacement");
                let to = match (goal, disp) {
                    (Some(p), None) => ScrewGoal::Pose(p),
                    (None, Some(e)) => ScrewGoal::Displacement(self.fixed::<3>(&e)?),
                    _ => {
                        return Err(self.err(
                            kind.line,
                            "a screw needs exactly one of `to.*` and `displacement`".into(),
                        ))
                    }
                };
                let start = self.opt_float("start")?.unwrap_or(0.0);
                let duration = self.req_float("duration")?;
                let ret = match (self.opt_float("hold")?, self.opt_float("back")?) {
                    (None, None) => None,
                    (Some(h), Some(b)) => Some((h, b)),
                    _ => return Err(self.err(kind.line, "`hold` and `back` go together".into())),
                };
                Ok(TrajectorySpec::Screw {
                    from,
                    to,
                    start,
                    duration,
                    ret,
                })
            }
            "moving_target" => Ok(TrajectorySpec::MovingTarget {
                offset: self.req_pose("offset")?,
                speed: self.req_fixed::<3>("speed")?,
                periods: self.req_fixed::<3>("periods")?,
            }),
            other => Err(self.err(
                kind.line,
                format!("unknown trajectory `{other}` (set_point | screw | moving_target)"),
            )),
        }
    }

    fn disturbance(&mut self, ch: &str) -> Result<DisturbanceSpec> {
        let Some(kind) = self.take(&format!("{ch}.kind")) else {
            return Ok(DisturbanceSpec::Zero);
        };
        let key = |k: &str| format!("{ch}.{k}");
        let spec = match kind.value.as_str() {
            "zero" => DisturbanceSpec::Zero,
            "constant" => DisturbanceSpec::Constant {
                amplitude: self.req_fixed::<6>(&key("amplitude"))?,
            },
            "sinusoid" => DisturbanceSpec::Sinusoid {
                amplitude: self.req_fixed::<6>(&key("amplitude"))?,
                period: self.req_float(&key("period"))?,
                phase: self.opt_float(&key("phase"))?.unwrap_or(0.0),
            },
            "triangle" => DisturbanceSpec::Triangle {
                amplitude: self.req_fixed::<6>(&key("amplitude"))?,
                periods: self.req_fixed::<6>(&key("periods"))?,
            },
            "band_limited" => {
                let tones = self.require(&key("tones"))?;
                let n = tones
                    .value
                    .parse::<usize>()
                    .map_err(|_| self.err(tones.line, format!("`{}` is not a tone count", tones.value)))?;
                DisturbanceSpec::BandLimited {
                    amplitude: self.req_fixed::<6>(&key("amplitude"))?,
                    tones: n,
                    f_min: self.req_float(&key("f_min"))?,
                    f_max: self.req_float(&key("f_max"))?,
                }
            }
            other => {
                return Err(self.err(
                    kind.line,
                    format!("unknown disturbance `{other}` (zero | constant | sinusoid | triangle | band_limited)"),
                ))
            }
        };
        Ok(spec)
    }
}

fn num(v: f64) -> String {
    format!("{v}")
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| num(*x)).collect::<Vec<_>>().join(" ")
}

fn kv(s: &mut String, key: &str, value: &str) {
    let _ = writeln!(s, "{key} = {value}");
}

fn write_pose(s: &mut String, prefix: &str, p: &PoseSpec) {
    kv(s, &format!("{prefix}.translation"), &join(&p.translation));
    match &p.rotation {
        RotationSpec::Identity => {}
        RotationSpec::AngleAxis { angle, axis } => {
            let v = [*angle, axis[0], axis[1], axis[2]];
            kv(s, &format!("{prefix}.angle_axis"), &join(&v));
        }
        RotationSpec::Quaternion(q) => kv(s, &format!("{prefix}.quaternion"), &join(q)),
    }
}

fn write_disturbance(s: &mut String, ch: &str, d: &DisturbanceSpec) {
    let key = |k: &str| format!("{ch}.{k}");
    match d {
        DisturbanceSpec::Zero => kv(s, &key("kind"), "zero"),
        DisturbanceSpec::Constant { amplitude } => {
            kv(s, &key("kind"), "constant");
            kv(s, &key("amplitude"), &join(amplitude));
        }
        DisturbanceSpec::Sinusoid {
            amplitude,
            period,
            phase,
        } => {
            kv(s, &key("kind"), "sinusoid");
            kv(s, &key("amplitude"), &join(amplitude));
            kv(s, &key("period"), &num(*period));
            kv(s, &key("phase"), &num(*phase));
        }
        DisturbanceSpec::Triangle { amplitude, periods } => {
            kv(s, &key("kind"), "triangle");
            kv(s, &key("amplitude"), &join(amplitude));
            kv(s, &key("periods"), &join(periods));
        }
        DisturbanceSpec::BandLimited {
            amplitude,
            tones,
            f_min,
            f_max,
        } => {
            kv(s, &key("kind"), "band_limited");
            kv(s, &key("amplitude"), &join(amplitude));
            kv(s, &key("tones"), &tones.to_string());
            kv(s, &key("f_min"), &num(*f_min));
            kv(s, &key("f_max"), &num(*f_max));
        }
    }
}
