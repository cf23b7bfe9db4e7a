use capflow::flow::InitialData;
use capflow::geometry::*;
use capflow::mobius::{CapRadius, CapSpec};
use capflow::quermass::*;
use proptest::prelude::*;
use std::f64::consts::{FRAC_PI_2, PI};

fn cap_fields(n: usize, n_beta: usize, theta: f64, r: f64) -> SurfaceFields {
    let g = HalfSphereGrid::from_cap(GridSpec::axisymmetric(n, n_beta, theta), &CapSpec::new(theta, r).unwrap()).unwrap();
    fundamental_forms(&g).unwrap()
}

#[test]
fn caps_are_umbilic_to_second_order() {
    let mut errs = Vec::new();
    for nb in [50, 100, 200] {
        let f = cap_fields(3, nb, PI / 3.0, 0.7);
        let e = f
            .nodes
            .iter()
            .map(|p| (p.kappa.a - 1.0 / 0.7).abs().max((p.kappa.b - 1.0 / 0.7).abs()))
            .fold(0.0, f64::max);
        errs.push(e);
    }
    for w in errs.windows(2) {
        assert!((w[0] / w[1]).log2() > 1.8, "{errs:?}");
    }
}

#[test]
fn cap_contact_angle_and_area() {
    let theta = 1.1;
    let f = cap_fields(2, 200, theta, 1.5);
    assert!(f.boundary.contact_residual < 1e-4);
    // refinement changes the area only at the discretization level
    let q = cap_quermass(2, theta, CapRadius::Finite(1.5), 400).unwrap();
    assert!((q.area() - f.area()).abs() < 1e-3 * f.area());
    assert!(q.w_theta.iter().all(|w| w.is_finite() && *w > 0.0));
}

#[test]
fn flat_disk_matches_analytic_values() {
    for n in 2..=5 {
        let q = cap_quermass(n, FRAC_PI_2, CapRadius::Infinite, 400).unwrap();
        let exact = flat_disk_quermass(n);
        for (k, (a, b)) in q.w_theta.iter().zip(&exact).enumerate() {
            assert!((a - b).abs() < 1e-4, "n = {n}, W_{k}: {a} vs {b}");
        }
    }
}

#[test]
fn quermass_of_the_full_hemisphere() {
    // hemisphere values through the closed form and the recursion
    for n in 1..=7 {
        let rec = geodesic_ball_quermass(n, FRAC_PI_2);
        for k in 1..=(n + 1) / 2 {
            let closed = hemisphere_odd_quermass(n, k).unwrap();
            assert!((rec[2 * k - 1] - closed).abs() < 1e-10);
        }
    }
}

#[test]
fn cap_table_inverts_its_columns() {
    let table = CapTable::build(2, PI / 3.0, 100, CapTable::default_radii()).unwrap();
    assert!(table.monotone[0] && table.monotone[1]);
    // W_3 is constant along caps
    assert!(!table.monotone[3]);
    if !table.monotone[2] {
        assert!(matches!(table.inverse(2, table.values[5][2]), Err(capflow::CapflowError::Numerical(_))));
    }
    for k in 0..=1 {
        let col: Vec<f64> = table.values.iter().map(|v| v[k]).collect();
        let target = 0.5 * (col[10] + col[11]);
        let r = table.inverse(k, target).unwrap();
        assert!((table.f(k, r).unwrap() - target).abs() < 1e-9);
    }
    assert!(matches!(table.inverse(0, -1.0), Err(capflow::CapflowError::Range(_))));
    assert!(table.inverse(3, 0.1).is_err());
    let csv = table.to_csv(&[0, 1]).unwrap();
    assert!(csv.starts_with("r,f_0,f_1\n"));
    assert!(csv.trim_end().ends_with(&format!("inf,{},{}", capflow::io::fmt_f64(table.values[64][0]), capflow::io::fmt_f64(table.values[64][1]))));
}

#[test]
fn full2d_reproduces_axisymmetric_data() {
    let theta = 1.2;
    let cap = CapSpec::new(theta, 1.3).unwrap();
    let ax = fundamental_forms(&HalfSphereGrid::from_cap(GridSpec::axisymmetric(2, 60, theta), &cap).unwrap()).unwrap();
    let fd = fundamental_forms(&HalfSphereGrid::from_cap(GridSpec::full2d(60, 16, theta), &cap).unwrap()).unwrap();
    assert!((ax.area() - fd.area()).abs() < 1e-9 * ax.area());
    let qa = assemble_w(&ax).unwrap();
    let qf = assemble_w(&fd).unwrap();
    for (a, b) in qa.w_theta.iter().zip(&qf.w_theta) {
        assert!((a - b).abs() < 1e-8);
    }
}

#[test]
fn invalid_grids_are_rejected() {
    assert!(GridSpec::axisymmetric(1, 100, 1.0).validate().is_err());
    assert!(GridSpec::axisymmetric(2, 2, 1.0).validate().is_err());
    assert!(GridSpec::full2d(50, 12, 1.0).validate().is_err());
    let mut s = GridSpec::full2d(50, 16, 1.0);
    s.n = 3;
    assert!(s.validate().is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Perturbed caps keep the support function non-positive in the
    /// interior and produce finite, positive quermassintegrals.
    #[test]
    fn perturbed_caps_are_well_formed(eps in 0.0f64..0.05, r in 0.6f64..3.0, n in 2usize..=4) {
        let init = InitialData::PerturbedCap {
            radius: CapRadius::Finite(r),
            epsilon: eps,
            terms: vec![capflow::flow::PerturbTerm { power: 2, coeff: 1.0 }],
            azimuthal: 0.0,
            random_terms: None,
        };
        let g = init.build(GridSpec::axisymmetric(n, 80, FRAC_PI_2), 0).unwrap();
        let f = fundamental_forms(&g).unwrap();
        let nb = f.nodes.len();
        prop_assert!(f.nodes[..nb - 1].iter().all(|p| p.support() < 1e-8));
        let q = assemble_w(&f).unwrap();
        prop_assert!(q.w_theta.iter().all(|w| w.is_finite() && *w > 0.0));
        prop_assert!(q.area() > 0.0);
    }

    /// The two curvature kernels agree on random caps, with a gap that
    /// shrinks at second order.
    #[test]
    fn kernels_agree(theta in 0.3f64..FRAC_PI_2, r in 0.3f64..5.0) {
        let gap = |nb: usize| {
            let g = HalfSphereGrid::from_cap(GridSpec::axisymmetric(2, nb, theta), &CapSpec::new(theta, r).unwrap()).unwrap();
            let a = fundamental_forms(&g).unwrap();
            let b = conformal_graph_kernel(&g).unwrap();
            a.nodes
                .iter()
                .zip(&b.kappa)
                .map(|(p, k)| (p.kappa.a - k.a).abs().max((p.kappa.b - k.b).abs()))
                .fold(0.0, f64::max)
        };
        let (g1, g2) = (gap(100), gap(200));
        prop_assert!(g2 * r < 1e-2);
        prop_assert!(g2 < 1e-12 || g1 / g2 > 3.4, "{} {}", g1, g2);
    }
}
