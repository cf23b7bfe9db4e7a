use capflow::mobius::*;
use proptest::prelude::*;
use std::f64::consts::FRAC_PI_2;

fn ball_point() -> impl Strategy<Value = Vec<f64>> {
    (2usize..=5)
        .prop_flat_map(|m| prop::collection::vec(-1.0f64..1.0, m))
        .prop_filter("inside, away from e", |x| {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            let m = x.len();
            let d2: f64 = x[..m - 1].iter().map(|v| v * v).sum::<f64>() + (x[m - 1] - 1.0).powi(2);
            r2 < 1.0 && d2 > 1e-2
        })
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

proptest! {
    #[test]
    fn round_trip(x in ball_point()) {
        let y = ball_to_halfspace(&x).unwrap();
        prop_assert!(*y.last().unwrap() > 0.0);
        let back = halfspace_to_ball(&y).unwrap();
        prop_assert!(dist2(&x, &back).sqrt() < 1e-12);
    }

    #[test]
    fn conformal_factor_identity(x in ball_point()) {
        let y = ball_to_halfspace(&x).unwrap();
        let m = x.len();
        let mut e = vec![0.0; m];
        e[m - 1] = 1.0;
        let c = conformal_factor(&y).unwrap();
        prop_assert!((c * dist2(&x, &e) / 2.0 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn pushforward_scales_lengths(x in ball_point(), dir in prop::collection::vec(-1.0f64..1.0, 5)) {
        let y = ball_to_halfspace(&x).unwrap();
        let m = y.len();
        let w: Vec<f64> = dir[..m].to_vec();
        let wn: f64 = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assume!(wn > 1e-3);
        let p = pushforward_to_ball(&y, &w).unwrap();
        let pn: f64 = p.iter().map(|v| v * v).sum::<f64>().sqrt();
        // conformal: all directions are scaled by the same factor
        let c = conformal_factor(&y).unwrap();
        prop_assert!((pn * c / wn - 1.0).abs() < 1e-9);
    }

    #[test]
    fn caps_meet_the_sphere_at_their_angle(theta in 0.2f64..FRAC_PI_2, r in 0.2f64..20.0, b in 0.0f64..1.0) {
        let cap = CapSpec::new(theta, r).unwrap();
        let img = cap.image().unwrap();
        // interior point of the cap lies on the image sphere
        let beta = b * FRAC_PI_2;
        let z = [beta.sin(), 0.0, beta.cos()];
        let x = cap_embedding(&cap, &z).unwrap();
        let y = ball_to_halfspace(&x).unwrap();
        let on_sphere = (y[0].powi(2) + y[1].powi(2) + (y[2] - img.center).powi(2)).sqrt();
        prop_assert!((on_sphere - img.radius).abs() < 1e-10 * img.radius.max(1.0));
        // the rim lies on the unit sphere
        let rim = cap_embedding(&cap, &[1.0, 0.0, 0.0]).unwrap();
        let norm: f64 = rim.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!((norm - 1.0).abs() < 1e-10);
    }
}

#[test]
fn pole_and_domain_errors() {
    assert!(matches!(
        ball_to_halfspace(&[0.0, 0.0, 1.0]),
        Err(capflow::CapflowError::Pole { .. })
    ));
    assert!(halfspace_to_ball(&[1.0]).is_err());
    assert!(conformal_factor(&[0.0, -0.5]).is_err());
    assert!(CapSpec::new(0.0, 1.0).is_err());
    assert!(CapSpec::new(1.0, -1.0).is_err());
}

#[test]
fn flat_ball_is_the_plane_at_cos_theta() {
    let theta = 1.0;
    let cap = CapSpec {
        theta,
        radius: CapRadius::Infinite,
    };
    for b in [0.0f64, 0.4, 1.2] {
        let x = cap_embedding(&cap, &[b.sin(), 0.0, b.cos()]).unwrap();
        assert!((x[2] - theta.cos()).abs() < 1e-12);
    }
}

#[test]
fn polar_coordinates_round_trip() {
    let y = [0.3, -0.4, 1.2];
    let p = PolarCoords::from_cartesian(&y).unwrap();
    let back = p.to_cartesian();
    assert!(dist2(&y, &back) < 1e-28);
    let axis = PolarCoords::from_cartesian(&[0.0, 0.0, 2.0]).unwrap();
    assert_eq!(axis.beta, 0.0);
    assert_eq!(axis.xi, vec![1.0, 0.0]);
}
