use capflow::flow::*;
use capflow::geometry::GridSpec;
use capflow::mobius::CapRadius;
use capflow::symfunc::CurvatureSpec;
use std::f64::consts::FRAC_PI_2;

fn cap(r: f64) -> InitialData {
    InitialData::Cap {
        radius: CapRadius::Finite(r),
    }
}

fn run_cap(kind: FlowKind, n: usize, theta: f64, t_max: f64) -> FlowTrace {
    let spec = GridSpec::axisymmetric(n, 60, theta);
    let mut cfg = FlowConfig::new(kind, spec, t_max);
    cfg.monitor.every_steps = 20;
    run(&cfg, cap(1.0).build(spec, 0).unwrap()).unwrap()
}

#[test]
fn icf_expands_and_mcf_shrinks() {
    let icf = run_cap(FlowKind::Icf, 2, 1.2, 0.02);
    let mcf = run_cap(FlowKind::Mcf, 2, 1.2, 0.005);
    for (tr, grows) in [(&icf, true), (&mcf, false)] {
        assert_eq!(tr.stop, StopReason::TMax);
        assert!(tr.rows.windows(2).all(|w| w[1].t > w[0].t));
        let (w0, w1) = (tr.rows[0].w[0], tr.last().w[0]);
        assert_eq!(w1 > w0, grows, "{w0} -> {w1}");
        // the last quermassintegral is constant up to discretization error
        let n = tr.n();
        assert!((tr.last().w[n + 1] / tr.rows[0].w[n + 1] - 1.0).abs() < 1e-3);
        assert!(tr.rows.iter().all(|r| r.angle_residual < 1e-2));
    }
}

#[test]
fn runs_are_deterministic() {
    let a = run_cap(FlowKind::Icf, 3, FRAC_PI_2, 0.01);
    let b = run_cap(FlowKind::Icf, 3, FRAC_PI_2, 0.01);
    assert_eq!(a.to_csv(), b.to_csv());
    assert_eq!(a.summary_json(7), b.summary_json(7));
}

#[test]
fn stop_conditions() {
    let spec = GridSpec::axisymmetric(2, 40, FRAC_PI_2);
    let g = cap(1.0).build(spec, 0).unwrap();

    let mut cfg = FlowConfig::new(FlowKind::Icf, spec, 10.0);
    cfg.max_steps = Some(25);
    let tr = run(&cfg, g.clone()).unwrap();
    assert_eq!(tr.stop, StopReason::MaxSteps);
    assert_eq!(tr.steps, 25);
    assert_eq!(tr.last().step, 25);

    let mut cfg = FlowConfig::new(FlowKind::Icf, spec, 10.0);
    cfg.stop.min_f = 0.9;
    let tr = run(&cfg, g.clone()).unwrap();
    assert_eq!(tr.stop, StopReason::MinCurvature);
    assert!(tr.last().min_f < 0.9);
    assert!(!tr.stop.is_failure());

    let mut cfg = FlowConfig::new(FlowKind::Icf, spec, 10.0);
    cfg.stop.max_abs_u = 0.2;
    assert_eq!(run(&cfg, g).unwrap().stop, StopReason::MaxHeight);
}

#[test]
fn general_curvature_functions_keep_max_f_bounded() {
    let spec = GridSpec::axisymmetric(3, 60, FRAC_PI_2);
    let init = InitialData::PerturbedCap {
        radius: CapRadius::Finite(1.0),
        epsilon: 0.05,
        terms: vec![PerturbTerm { power: 2, coeff: 1.0 }],
        azimuthal: 0.0,
        random_terms: None,
    };
    for curvature in [CurvatureSpec { k: 2, l: 1 }, CurvatureSpec { k: 3, l: 0 }] {
        let mut cfg = FlowConfig::new(FlowKind::Icf, spec, 0.02);
        cfg.curvature = curvature;
        let tr = run(&cfg, init.build(spec, 0).unwrap()).unwrap();
        assert_eq!(tr.stop, StopReason::TMax, "{curvature:?}");
        assert!(tr.step_stats.max_f_rise <= 1e-6, "{curvature:?}: {:?}", tr.step_stats);
    }
}

#[test]
fn full2d_flow_keeps_the_contact_angle() {
    let spec = GridSpec::full2d(30, 16, 1.2);
    let init = InitialData::PerturbedCap {
        radius: CapRadius::Finite(1.0),
        epsilon: 0.05,
        terms: vec![PerturbTerm { power: 2, coeff: 1.0 }],
        azimuthal: 0.5,
        random_terms: None,
    };
    let mut cfg = FlowConfig::new(FlowKind::Mcf, spec, 0.005);
    cfg.monitor.every_steps = 200;
    let tr = run(&cfg, init.build(spec, 0).unwrap()).unwrap();
    assert_eq!(tr.stop, StopReason::TMax);
    assert!(tr.rows.iter().all(|r| r.angle_residual < 1e-2));
}

#[test]
fn random_perturbations_follow_the_seed() {
    let spec = GridSpec::axisymmetric(2, 40, FRAC_PI_2);
    let init = InitialData::PerturbedCap {
        radius: CapRadius::Finite(1.0),
        epsilon: 0.01,
        terms: vec![],
        azimuthal: 0.0,
        random_terms: Some(3),
    };
    let a = init.build(spec, 1).unwrap();
    let b = init.build(spec, 1).unwrap();
    let c = init.build(spec, 2).unwrap();
    assert_eq!(a.u, b.u);
    assert_ne!(a.u, c.u);
}

#[test]
fn config_validation() {
    let spec = GridSpec::axisymmetric(2, 40, FRAC_PI_2);
    let base = FlowConfig::new(FlowKind::Icf, spec, 1.0);
    let bad = [
        FlowConfig { dt_safety: 0.0, ..base.clone() },
        FlowConfig { dt_safety: 1.5, ..base.clone() },
        FlowConfig { t_max: -1.0, ..base.clone() },
        FlowConfig { curvature: CurvatureSpec { k: 3, l: 0 }, ..base.clone() },
        FlowConfig { grid: GridSpec::axisymmetric(2, 40, 2.0), ..base.clone() },
    ];
    for c in bad {
        assert!(matches!(c.validate(), Err(capflow::CapflowError::Config(_))), "{c:?}");
    }
    assert!(base.validate().is_ok());
    let json = serde_json::to_string(&base).unwrap();
    let back: FlowConfig = serde_json::from_str(&json).unwrap();
    assert_eq!(back, base);
}

#[test]
fn non_convex_initial_data_is_rejected() {
    let spec = GridSpec::axisymmetric(2, 60, FRAC_PI_2);
    let init = InitialData::PerturbedCap {
        radius: CapRadius::Finite(1.0),
        epsilon: 0.5,
        terms: vec![PerturbTerm { power: 2, coeff: 1.0 }],
        azimuthal: 0.0,
        random_terms: None,
    };
    assert!(matches!(init.build(spec, 0), Err(capflow::CapflowError::Config(_))));
    // a polynomial profile must satisfy the contact condition
    let poly = InitialData::Polynomial { coefficients: vec![0.0, 0.3, -0.2] };
    assert!(poly.build(spec, 0).is_err());
}

#[test]
fn monitors_on_the_flat_ball() {
    assert!(q_monitor(2, &[1.0, 1.0, 1.0, 1.0]).is_nan());
    let w = capflow::quermass::flat_disk_quermass(3);
    assert!((q_monitor(3, &w) - q_limit(3)).abs() < 1e-12);
    assert!(af_deficits(3, &w).iter().all(|d| d.abs() < 1e-12));
    assert!(remaining_time(2, 1.0) > 0.0);
}
