use proptest::prelude::*;
use rayon::ThreadPoolBuilder;

use juntalab::geometry::{hamming_distance, linf_product_distance, BaseMetric, BoxSet, Interval};
use juntalab::inequality::{random_trigpoly, run_suite, RandomPolySpec, Suite};
use juntalab::quad::{FnHandle, GridTable};
use juntalab::report::{fmt_sig, JSON_DIGITS};
use juntalab::torus::{CoordSet, TrigPoly};

fn interval() -> impl Strategy<Value = Interval> {
    (0.0..1.0f64, 0.0..1.0f64).prop_map(|(a, b)| Interval::new(a.min(b), a.max(b)))
}

fn box_set(dim: usize) -> impl Strategy<Value = BoxSet> {
    prop::collection::vec(prop::collection::vec(interval(), dim), 1..4).prop_map(|b| BoxSet::new(b).unwrap())
}

proptest! {
    #[test]
    fn hamming_below_linf(pairs in prop::collection::vec((0.0..1.0f64, 0.0..1.0f64), 1..8), circle: bool) {
        let metric = if circle { BaseMetric::Circle } else { BaseMetric::Interval };
        let (x, y): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let h = hamming_distance(&x, &y, metric).unwrap();
        let l = linf_product_distance(&x, &y, metric).unwrap();
        prop_assert!(0.0 <= h && h <= l + 1e-15);
        prop_assert_eq!(hamming_distance(&x, &x, metric).unwrap(), 0.0);
    }

    #[test]
    fn box_distance_is_symmetric_and_bounded(a in box_set(3), b in box_set(3), x in prop::collection::vec(0.0..1.0f64, 3)) {
        let d = a.linf_distance(&b).unwrap();
        prop_assert_eq!(d, b.linf_distance(&a).unwrap());
        // triangle through the point x
        prop_assert!(d <= a.dist_inf(&x) + b.dist_inf(&x) + 1e-15);
        prop_assert_eq!(a.contains(&x), a.dist_inf(&x) == 0.0);
    }

    #[test]
    fn json_floats_round_trip(x in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        prop_assert_eq!(fmt_sig(x, JSON_DIGITS).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn poly_text_and_json_round_trip(n in 1usize..5, degree in 1u32..4, seed: u64) {
        let f = random_trigpoly(&RandomPolySpec::new(n, degree, seed)).unwrap();
        prop_assert_eq!(TrigPoly::from_text(&f.to_text()).unwrap(), f.clone());
        prop_assert_eq!(TrigPoly::from_json_str(&f.to_json().unwrap()).unwrap(), f);
    }

    #[test]
    fn grid_cond_exp_preserves_mean(members in prop::collection::vec(any::<bool>(), 3)) {
        let h = FnHandle::cube(3, |x| x[0] * x[1] + x[2].powi(3));
        let t = GridTable::sample(&h, 8).unwrap();
        let keep = CoordSet::new(3, (0..3).filter(|&i| members[i])).unwrap();
        let e = t.cond_exp(&keep).unwrap();
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        prop_assert!((mean(t.values()) - mean(e.values())).abs() < 1e-12);
        prop_assert_eq!(e.live_axes(), keep);
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let suite = Suite::from_json_str(
        r#"{"checks": [{"check": "heat_l1", "polys": 6, "max_dim": 4, "t": [0.1]},
                       {"check": "hypercontractivity", "polys": 6, "max_dim": 4, "t": [0.5]}]}"#,
    )
    .unwrap();
    let one = ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let four = ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let a = one.install(|| run_suite(&suite, Some(3)).unwrap());
    let b = four.install(|| run_suite(&suite, Some(3)).unwrap());
    assert_eq!(a, b);
    let h = FnHandle::cube(3, |x| (x[0] - x[1]).abs() + x[2]);
    let ta = one.install(|| GridTable::sample(&h, 20).unwrap());
    let tb = four.install(|| GridTable::sample(&h, 20).unwrap());
    assert_eq!(ta, tb);
}
