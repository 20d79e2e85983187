mod common;

use std::path::Path;

use common::*;
use dqhinf::config::*;
use dqhinf::controllers::{controller_names, ControllerRegistry};
use dqhinf::Error;
use proptest::collection::vec;
use proptest::prelude::*;

fn float() -> BoxedStrategy<f64> {
    prop_oneof![
        -10.0..10.0f64,
        prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO,
        Just(0.1),
        Just(1e-300),
    ]
    .boxed()
}

fn arr<const N: usize>() -> BoxedStrategy<[f64; N]> {
    prop::array::uniform(float()).boxed()
}

fn rotation() -> BoxedStrategy<RotationSpec> {
    prop_oneof![
        Just(RotationSpec::Identity),
        (float(), arr::<3>())
            .prop_filter("nonzero axis", |(_, a)| a.iter().any(|v| *v != 0.0))
            .prop_map(|(angle, axis)| RotationSpec::AngleAxis { angle, axis }),
        arr::<4>()
            .prop_filter("nonzero quaternion", |q| q.iter().any(|v| *v != 0.0))
            .prop_map(RotationSpec::Quaternion),
    ]
    .boxed()
}

fn pose_spec() -> BoxedStrategy<PoseSpec> {
    (arr::<3>(), rotation())
        .prop_map(|(translation, rotation)| PoseSpec { translation, rotation })
        .boxed()
}

fn disturbance() -> BoxedStrategy<DisturbanceSpec> {
    prop_oneof![
        Just(DisturbanceSpec::Zero),
        arr::<6>().prop_map(|amplitude| DisturbanceSpec::Constant { amplitude }),
        (arr::<6>(), float(), float()).prop_map(|(amplitude, period, phase)| DisturbanceSpec::Sinusoid {
            amplitude,
            period,
            phase
        }),
        (arr::<6>(), arr::<6>()).prop_map(|(amplitude, periods)| DisturbanceSpec::Triangle { amplitude, periods }),
        (arr::<6>(), 0..20usize, float(), float()).prop_map(|(amplitude, tones, f_min, f_max)| {
            DisturbanceSpec::BandLimited {
                amplitude,
                tones,
                f_min,
                f_max,
            }
        }),
    ]
    .boxed()
}

fn trajectory() -> BoxedStrategy<TrajectorySpec> {
    let goal = prop_oneof![
        pose_spec().prop_map(ScrewGoal::Pose),
        arr::<3>().prop_map(ScrewGoal::Displacement)
    ]
    .boxed();
    prop_oneof![
        pose_spec().prop_map(|target| TrajectorySpec::SetPoint { target }),
        (
            prop::option::of(pose_spec()),
            goal,
            float(),
            float(),
            prop::option::of((float(), float()))
        )
            .prop_map(|(from, to, start, duration, ret)| TrajectorySpec::Screw {
                from,
                to,
                start,
                duration,
                ret
            }),
        (pose_spec(), arr::<3>(), arr::<3>()).prop_map(|(offset, speed, periods)| TrajectorySpec::MovingTarget {
            offset,
            speed,
            periods
        }),
    ]
    .boxed()
}

fn positive() -> BoxedStrategy<f64> {
    prop_oneof![
        1e-3..100.0f64,
        prop::num::f64::POSITIVE.prop_filter("finite", |v| v.is_finite())
    ]
    .boxed()
}

/// Only controllers the registry can build parse, so draw those.
fn controller() -> BoxedStrategy<ControllerSpec> {
    let kinds: Vec<String> = controller_names();
    let inverse = prop_oneof![
        Just(InverseSpec::Pinv),
        (positive(), positive()).prop_map(|(eps, lambda_max)| InverseSpec::Alsi { eps, lambda_max }),
    ];
    (
        prop::sample::select(kinds),
        prop::option::of(prop::array::uniform4(positive())),
        prop::option::of(positive()),
        prop::option::of((1e-4..1.0f64, 1.001..10.0f64)),
        inverse,
    )
        .prop_map(|(kind, attenuation, kappa, region, inverse)| ControllerSpec {
            kind,
            attenuation,
            kappa,
            region,
            inverse,
        })
        .prop_filter("buildable controller", |c| {
            c.params()
                .and_then(|p| ControllerRegistry::default().build(&c.kind, &p).map(drop))
                .is_ok()
        })
        .boxed()
}

fn scenario_config() -> BoxedStrategy<ScenarioConfig> {
    let robot = (
        "[a-zA-Z0-9_./-]{1,24}",
        prop::option::of(pose_spec()),
        prop::option::of(pose_spec()),
        vec(float(), 1..9),
        prop::option::of(pose_spec()),
    )
        .prop_map(|(chain, base, effector, q0, initial)| RobotSpec {
            chain,
            base,
            effector,
            q0,
            initial,
        });
    (
        "[a-z][a-z0-9_]{0,15}",
        robot,
        controller(),
        trajectory(),
        disturbance(),
        disturbance(),
        (1e-5..1.0f64, 1.0..1e4f64, any::<u64>()),
    )
        .prop_map(
            |(name, robot, controller, trajectory, v_w, v_c, (dt, horizon, seed))| ScenarioConfig {
                name,
                base_dir: "/somewhere".into(),
                robot,
                controller,
                trajectory,
                v_w,
                v_c,
                dt,
                horizon,
                seed,
            },
        )
        .boxed()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn canonical_form_round_trips(c in scenario_config()) {
        let text = c.to_canonical();
        let back = ScenarioConfig::parse(&text, "canonical", Path::new("/somewhere")).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(back.to_canonical(), text);
    }
}

#[test]
fn shipped_scenarios_parse_and_build() {
    let dir = scenario("");
    let mut n = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "cfg") {
            for c in load(&path).unwrap() {
                c.build().unwrap_or_else(|e| panic!("{}: {e}", c.name));
                let again = ScenarioConfig::parse(&c.to_canonical(), "canonical", &c.base_dir).unwrap();
                assert_eq!(again, c);
                n += 1;
            }
        }
    }
    // 5 + 5 swept regulation/tracking runs, 7 attenuation runs, 2 singularity runs
    assert_eq!(n, 19);
}

#[test]
fn sweep_names_use_the_file_stem() {
    let names: Vec<String> = load(scenario("set_point.cfg"))
        .unwrap()
        .into_iter()
        .map(|c| c.name)
        .collect();
    assert_eq!(names[0], "set_point_kind_hinf_tracking");
    assert!(names.iter().all(|n| n.starts_with("set_point_kind_")));
    let attn = load(scenario("attenuation.cfg")).unwrap();
    let gammas: Vec<f64> = attn.iter().map(|c| c.controller.attenuation.unwrap()[2]).collect();
    assert_eq!(gammas, [3.5, 2.0, 0.9, 0.6, 0.5, 0.4, 0.2]);
}

#[test]
fn malformed_input_reports_lines() {
    let text = "[robot]\nchain = a.dh\nq0 = 0 0\n\n[controller]\nkind = htm\nkappa = two\n";
    match parse_scenarios(text, "bad.cfg", Path::new(".")) {
        Err(Error::Config { path, line, .. }) => {
            assert_eq!(path, "bad.cfg");
            assert_eq!(line, 7);
        }
        other => panic!("{other:?}"),
    }
    let text = "[robot]\nchain = a.dh\nq0 = 0\nfrobnicate = 1\n";
    assert!(matches!(
        parse_scenarios(text, "x", Path::new(".")),
        Err(Error::Config { line: 4, .. })
    ));
    let text = "[robot]\nchain = a.dh\nq0 = 0\n[nonsense]\n";
    assert!(matches!(
        parse_scenarios(text, "x", Path::new(".")),
        Err(Error::Config { line: 4, .. })
    ));
    let text = "[robot]\nchain = a.dh\nq0 = 0\nthis line has no equals\n";
    assert!(matches!(
        parse_scenarios(text, "x", Path::new(".")),
        Err(Error::Config { line: 4, .. })
    ));
}

#[test]
fn missing_chain_file_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.cfg");
    std::fs::write(
        &path,
        "[robot]\nchain = nowhere.dh\nq0 = 0 0\n[controller]\nkind = htm\nkappa = 2\n[trajectory]\nkind = set_point\ntarget.translation = 1 0 0\n[sim]\nT = 1\n",
    )
    .unwrap();
    let c = load(&path).unwrap().remove(0);
    assert_eq!(c.name, "s");
    assert_eq!(c.dt, 0.005);
    let err = c.build().err().expect("chain file is missing");
    assert!(matches!(err, Error::Io { .. }), "{err:?}");
    assert!(err.to_string().contains("nowhere.dh"));
    assert!(matches!(load(dir.path().join("absent.cfg")), Err(Error::Io { .. })));
}

#[test]
fn validation_rejects_bad_timing_and_kinds() {
    let mut c = load(scenario("set_point.cfg")).unwrap().remove(0);
    c.dt = 0.0;
    assert!(c.build().is_err());
    c.dt = 0.01;
    c.horizon = 0.001;
    assert!(c.build().is_err());
    c.horizon = 1.0;
    c.controller.kind = "nope".into();
    assert!(matches!(c.build(), Err(Error::UnknownController(_))));
}
