use capflow::symfunc::*;
use proptest::prelude::*;

fn kappa(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<f64>> {
    n.prop_flat_map(|n| prop::collection::vec(1e-3f64..50.0, n))
}

fn rel_le(a: f64, b: f64) -> bool {
    a <= b * (1.0 + 1e-12) + 1e-300
}

proptest! {
    #[test]
    fn newton_maclaurin(k in kappa(1..=9)) {
        let e = elementary_symmetric_all(&k);
        let n = k.len();
        for j in 1..n {
            prop_assert!(rel_le(e[j - 1] * e[j + 1], e[j] * e[j]));
        }
        for j in 1..=n {
            prop_assert!(rel_le(e[j].powf(1.0 / j as f64), e[1]));
        }
    }

    #[test]
    fn homogeneity(k in kappa(1..=7), s in 0.1f64..10.0) {
        let e = elementary_symmetric_all(&k);
        let scaled: Vec<f64> = k.iter().map(|x| x * s).collect();
        let es = elementary_symmetric_all(&scaled);
        for j in 0..e.len() {
            let expect = e[j] * s.powi(j as i32);
            prop_assert!((es[j] - expect).abs() <= 1e-11 * expect.abs());
        }
    }

    #[test]
    fn curvature_function_bounds(k in kappa(2..=8), pick in any::<(prop::sample::Index, prop::sample::Index)>()) {
        let n = k.len();
        let kk = pick.0.index(n) + 1;
        let l = pick.1.index(kk);
        let spec = CurvatureSpec { k: kk, l };
        let kv = KappaVector::new(&k).unwrap();
        let f = spec.eval(&kv).unwrap();
        let e1 = elementary_symmetric(&kv, 1).unwrap();
        prop_assert!(rel_le(f, e1));
        prop_assert!(f >= kv.min() * (1.0 - 1e-12));
        let g: f64 = spec.gradient(&kv).unwrap().iter().sum();
        prop_assert!(g >= 1.0 - 1e-10);
        let d = spec.dual(&kv).unwrap();
        prop_assert!(d >= kv.min() * (1.0 - 1e-12) && rel_le(d, kv.max()));
    }

    #[test]
    fn gradient_matches_difference(k in kappa(2..=6), kk in 1usize..=2) {
        let kv = KappaVector::new(&k).unwrap();
        let grad = elementary_symmetric_gradient(&kv, kk).unwrap();
        let vals = kv.values().to_vec();
        for i in 0..vals.len() {
            let h = 1e-6 * vals[i].max(1.0);
            let mut p = vals.clone();
            let mut m = vals.clone();
            p[i] += h;
            m[i] -= h;
            let fd = (elementary_symmetric_all(&p)[kk] - elementary_symmetric_all(&m)[kk]) / (2.0 * h);
            prop_assert!((fd - grad[i]).abs() <= 1e-6 * grad[i].abs().max(1.0));
        }
    }

    #[test]
    fn rational_identity(n in 1usize..=40, k in 0usize..20) {
        prop_assume!(2 * k + 1 <= n);
        let s = alternating_sum_s(n, k).unwrap();
        prop_assert_eq!(&s, &alternating_sum_closed_form(n, k).unwrap());
        prop_assert_eq!(&s, &alternating_sum_recursive(n, k).unwrap());
    }
}

#[test]
fn umbilic_points_give_the_common_value() {
    let kv = KappaVector::new(&[2.5; 5]).unwrap();
    for k in 1..=5 {
        for l in 0..k {
            let f = CurvatureSpec { k, l }.eval(&kv).unwrap();
            assert!((f - 2.5).abs() < 1e-13);
        }
    }
}

#[test]
fn domain_errors() {
    assert!(KappaVector::new(&[]).is_err());
    assert!(KappaVector::new(&[1.0, f64::NAN]).is_err());
    assert!(alternating_sum_s(4, 2).is_err());
    assert!(CurvatureSpec { k: 2, l: 2 }.validate(3).is_err());
    assert!(CurvatureSpec { k: 4, l: 0 }.validate(3).is_err());
    let outside = KappaVector::new(&[-1.0, 2.0, 3.0]).unwrap();
    assert!(CurvatureSpec { k: 2, l: 0 }.eval(&outside).is_err());
}

#[test]
fn af_rhs_at_flat_disk_is_attained() {
    let w = capflow::quermass::flat_disk_quermass(5);
    for k in 1..=2 {
        let a = af_rhs_a(5, k, w[1]).unwrap();
        assert!((a - w[2 * k + 1]).abs() < 1e-12, "k = {k}: {a} vs {}", w[2 * k + 1]);
    }
}
