mod common;

use std::time::Instant;

use common::*;
use dqhinf::analysis::{effort_and_error, trace_csv};
use dqhinf::config;
use dqhinf::controllers::*;
use dqhinf::disturbances::DisturbanceSignal;
use dqhinf::dq::*;
use dqhinf::kinematics::{fkm, SerialChain};
use dqhinf::simulator::*;
use dqhinf::Error;
use nalgebra::{DVector, Vector3, Vector6};

/// Commands a fixed joint velocity regardless of the error.
struct Fixed(DVector<f64>);

impl Controller for Fixed {
    fn name(&self) -> &str {
        "fixed"
    }
    fn control(&self, _: &ControlContext<'_>) -> ControlOutput {
        ControlOutput::from_qdot(self.0.clone())
    }
}

fn sim_with(
    controller: Box<dyn Controller>,
    trajectory: Trajectory,
    v_w: DisturbanceSignal,
    dt: f64,
    horizon: f64,
) -> Simulation {
    let chain = SerialChain::lbr_iv();
    Simulation {
        q0: DVector::from_column_slice(&[0.2, 0.6, -0.1, -1.2, 0.3, 0.7, 0.1]),
        chain,
        controller,
        trajectory,
        v_c: DisturbanceSignal::zero(horizon),
        v_w,
        x0: None,
        dt,
        horizon,
    }
}

fn idle() -> Box<dyn Controller> {
    Box::new(Fixed(DVector::zeros(7)))
}

#[test]
fn idle_undisturbed_pose_is_unchanged() {
    let sim = sim_with(
        idle(),
        Trajectory::SetPoint(Pose::IDENTITY),
        DisturbanceSignal::zero(1.0),
        0.01,
        1.0,
    );
    let trace = sim.run().unwrap();
    let x0 = trace.records[0].x;
    for r in &trace.records {
        assert!((r.x.vec8() - x0.vec8()).norm() < 1e-15);
        assert_eq!(r.q, sim.q0);
    }
}

#[test]
fn constant_twist_matches_rk4() {
    let mut r = rng(21);
    for _ in 0..10 {
        let xi = twist(&mut r);
        let t_end = 2.0;
        let sim = sim_with(
            idle(),
            Trajectory::SetPoint(Pose::IDENTITY),
            DisturbanceSignal::constant(xi.vec6(), t_end),
            0.01,
            t_end,
        );
        let trace = sim.run().unwrap();
        let x0 = trace.records[0].x;
        // ẋ = (1/2) ξ x
        let oracle = rk4_constant_twist(&xi.scale(0.5), &x0, t_end, 20_000);
        assert!((trace.last().x.vec8() - oracle).norm() < 1e-8);
    }
}

#[test]
fn long_run_stays_unit() {
    // 10⁵ exponential-map steps under a time-varying twist
    let s = DisturbanceSignal::band_limited(Vector6::from_element(0.8), 8, 0.1, 20.0, 0.001, 5, 100.0).unwrap();
    let mut x = Pose::IDENTITY;
    let dt = 0.001;
    let mut worst: f64 = 0.0;
    for k in 0..100_000 {
        let xi = s.sample(k as f64 * dt).unwrap();
        x = (exp_pure(&xi.scale(0.5 * dt)) * x).renormalized();
        worst = worst.max(x.unit_drift());
    }
    assert!(worst <= 1e-9, "{worst:e}");
}

#[test]
fn logged_poses_stay_unit_under_closed_loop() {
    let cfg = &config::load(scenario("tracking.cfg")).unwrap()[0];
    let trace = cfg.build().unwrap().run().unwrap();
    for r in &trace.records {
        assert!(r.x.unit_drift() <= 1e-9);
        assert!(r.x_d.unit_drift() <= 1e-9);
        assert!(r.error.x_tilde.unit_drift() <= 1e-9);
    }
}

fn screw() -> ScrewMotion {
    let a = Pose::from_rotation_translation(
        UnitQuaternion::from_angle_axis(0.4, PureQuaternion::new(0.0, 0.6, 0.8)).unwrap(),
        PureQuaternion::new(0.5, -0.2, 0.7),
    );
    let b = Pose::from_rotation_translation(
        UnitQuaternion::from_angle_axis(-1.9, PureQuaternion::new(1.0, 0.0, 0.0)).unwrap(),
        PureQuaternion::new(0.1, 0.4, 0.3),
    );
    ScrewMotion::new(a, b, 0.5, 3.0, Some((1.0, 2.0))).unwrap()
}

#[test]
fn screw_endpoints_are_exact() {
    let m = screw();
    assert_eq!(m.sample(0.0).0, m.from);
    assert_eq!(m.sample(3.5).0, m.to);
    assert_eq!(m.sample(4.5).0, m.to);
    assert_eq!(m.sample(6.5).0, m.from);
    assert_eq!(m.sample(0.0).1, Twist::ZERO);
    assert_eq!(m.sample(4.0).1, Twist::ZERO);
    // `to` is the configured pose up to the double-cover sign
    let b = Pose::from_rotation_translation(
        UnitQuaternion::from_angle_axis(-1.9, PureQuaternion::new(1.0, 0.0, 0.0)).unwrap(),
        PureQuaternion::new(0.1, 0.4, 0.3),
    );
    assert!(m.to == b || m.to == b.antipode());
    assert!(ScrewMotion::new(b, b, 0.0, 0.0, None).is_err());
}

#[test]
fn screw_twist_matches_finite_difference() {
    let m = screw();
    let h = 1e-6;
    for k in 1..130 {
        let t = k as f64 * 0.05;
        let (x, xi) = m.sample(t);
        let fd = (m.sample(t + h).0.vec8() - m.sample(t - h).0.vec8()) / (2.0 * h);
        let model = (xi.dual_quaternion() * x.dual_quaternion()).scale(0.5).vec8();
        assert!((fd - model).norm() < 1e-6, "t = {t}: {}", (fd - model).norm());
    }
}

#[test]
fn set_point_and_moving_target_twists() {
    let x = pose(&mut rng(22));
    let sp = Trajectory::SetPoint(x);
    assert!((0..50).all(|k| sp.sample(k as f64 * 0.1) == (x, Twist::ZERO)));
    let mt = Trajectory::MovingTarget(
        MovingTarget::new(x, Vector3::new(0.1, 0.1, 0.0), Vector3::new(2.5, 3.45, 1.0)).unwrap(),
    );
    assert!(!mt.is_twist_known());
    assert_eq!(mt.known_twist(0.3), Twist::ZERO);
    let h = 1e-6;
    for t in [0.3, 1.0, 2.0, 4.4] {
        let (xd, xi) = mt.sample(t);
        assert_eq!(xi.primary, PureQuaternion::ZERO);
        let fd = (mt.sample(t + h).0.vec8() - mt.sample(t - h).0.vec8()) / (2.0 * h);
        let model = (xi.dual_quaternion() * xd.dual_quaternion()).scale(0.5).vec8();
        assert!((fd - model).norm() < 1e-6);
    }
}

#[test]
fn moving_target_feedforward_is_logged_as_disturbance() {
    let cfg = &config::load(scenario("attenuation.cfg")).unwrap()[0];
    let mut sim = cfg.build().unwrap();
    sim.v_w = DisturbanceSignal::zero(sim.horizon);
    sim.v_c = DisturbanceSignal::zero(sim.horizon);
    let state = sim.initial_state().unwrap();
    let rec = sim.observe(&state, 100).unwrap();
    let expected = -rec.xi_d.transformed_by(&rec.error.x_tilde).vec6();
    assert!((rec.v_c - expected).norm() < 1e-15);
    assert!(rec.xi_d.dual.norm() > 0.0);
}

#[test]
fn trace_length_and_determinism() {
    let cfg = &config::load(scenario("set_point.cfg")).unwrap()[0];
    let sim = cfg.build().unwrap();
    let a = sim.run().unwrap();
    assert_eq!(a.records.len(), (sim.horizon / sim.dt).floor() as usize + 1);
    assert_eq!(a.records.len(), 2001);
    for (k, r) in a.records.iter().enumerate() {
        assert_eq!(r.t, k as f64 * sim.dt);
    }
    let b = cfg.build().unwrap().run().unwrap();
    assert_eq!(a, b);
    assert_eq!(trace_csv(&a), trace_csv(&b));
    assert_eq!(
        effort_and_error(&a).effort_integral.to_bits(),
        effort_and_error(&b).effort_integral.to_bits()
    );
    assert_eq!(step_count(1.0, 0.1), 10);
    assert_eq!(step_count(0.3, 0.1), 3);
}

#[test]
fn set_point_converges() {
    let mut cfg = config::load(scenario("set_point.cfg")).unwrap().remove(0);
    assert_eq!(cfg.controller.kind, "hinf_tracking");
    cfg.horizon = 10.0;
    let trace = cfg.build().unwrap().run().unwrap();
    assert!(trace.last().err_norm() < 1e-3);
}

#[test]
fn non_finite_input_aborts() {
    let sim = sim_with(
        Box::new(Fixed(DVector::from_element(7, f64::NAN))),
        Trajectory::SetPoint(Pose::IDENTITY),
        DisturbanceSignal::zero(1.0),
        0.01,
        1.0,
    );
    assert!(matches!(sim.run(), Err(Error::NonFiniteControl { step: 0, .. })));
    let sim = sim_with(
        idle(),
        Trajectory::SetPoint(Pose::IDENTITY),
        DisturbanceSignal::zero(1.0),
        0.01,
        0.001,
    );
    assert!(sim.run().is_err());
}

#[test]
fn joints_integrate_by_euler() {
    let u = DVector::from_column_slice(&[0.1, -0.2, 0.05, 0.0, 0.3, -0.1, 0.2]);
    let sim = sim_with(
        Box::new(Fixed(u.clone())),
        Trajectory::SetPoint(Pose::IDENTITY),
        DisturbanceSignal::zero(1.0),
        0.01,
        1.0,
    );
    let trace = sim.run().unwrap();
    let q_end = &sim.q0 + &u * 1.0;
    assert!((&trace.last().q - &q_end).norm() < 1e-12);
    // with no disturbance the true pose follows the arm to first order in dt
    let x_fk = fkm(&sim.chain, &trace.last().q).unwrap();
    assert!((trace.last().x.vec8() - x_fk.vec8()).norm() < 1e-2);
}

#[test]
fn undisturbed_decay_follows_gains() {
    let started = Instant::now();
    let mut cfg = config::load(scenario("set_point.cfg")).unwrap().remove(0);
    cfg.horizon = 3.0;
    let sim = cfg.build().unwrap();
    let trace = sim.run().unwrap();
    let kappa = 2.0;
    let z0 = trace.records[0].error.translation.norm_squared();
    let p0 = trace.records[0].error.orientation.norm_squared();
    for r in &trace.records {
        if r.t <= 3.0 / kappa {
            let model = z0 * (-2.0 * kappa * r.t).exp();
            assert!(
                (r.error.translation.norm_squared() - model).abs() <= 0.05 * model,
                "t = {}",
                r.t
            );
        }
        assert!(r.error.orientation.norm_squared() <= p0 * (-0.5 * kappa * r.t).exp() * 1.05);
    }
    assert!(started.elapsed().as_secs_f64() < 30.0);
}
