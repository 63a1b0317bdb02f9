use fueterlab::fields::{fueter_map, ComplexSeed};
use fueterlab::operators::{fueter_left, DerivativeEngine};
use fueterlab::quat::{from_spherical, q_inv, to_spherical, SphericalPoint};
use fueterlab::verify::{sample_points, Accumulator, SamplingPlan};
use fueterlab::Quat;
use proptest::prelude::*;

fn quat() -> impl Strategy<Value = Quat> {
    (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64).prop_map(|(w, x, y, z)| Quat::new(w, x, y, z))
}

fn point() -> impl Strategy<Value = SphericalPoint<f64>> {
    (-1.5..1.5f64, 0.4..2.5f64, 0.0..std::f64::consts::TAU, 0.35..2.79f64)
        .prop_map(|(t, r, a, b)| SphericalPoint::new(t, r, a, b))
}

proptest! {
    #[test]
    fn norm_is_multiplicative(a in quat(), b in quat()) {
        let lhs = (a * b).norm();
        let rhs = a.norm() * b.norm();
        prop_assert!((lhs - rhs).abs() <= 1e-13 * (1.0 + rhs));
    }

    #[test]
    fn product_is_associative(a in quat(), b in quat(), c in quat()) {
        let d = ((a * b) * c - a * (b * c)).norm();
        prop_assert!(d <= 1e-13 * (1.0 + a.norm() * b.norm() * c.norm()));
    }

    #[test]
    fn inverse_is_two_sided(a in quat()) {
        prop_assume!(a.norm() > 1e-3);
        let inv = q_inv(a).unwrap();
        prop_assert!((a * inv - Quat::one()).norm() < 1e-12);
        prop_assert!((inv * a - Quat::one()).norm() < 1e-12);
    }

    #[test]
    fn spherical_round_trip(p in point()) {
        let q = from_spherical(&p);
        let back = to_spherical(&q).unwrap();
        prop_assert!((from_spherical(&back) - q).norm() < 1e-13);
        prop_assert!((back.r - p.r).abs() < 1e-13);
        prop_assert!((back.t - p.t).abs() < 1e-15);
    }

    #[test]
    fn fueter_fields_satisfy_condition(p in point(), n in 1u32..6) {
        let f = fueter_map(ComplexSeed::power(n));
        let d = fueter_left(&f, &p, &DerivativeEngine::analytic()).unwrap();
        let (_, v) = f.jets(&p).unwrap();
        let target = -2.0 * v.value / p.r;
        prop_assert!((d - Quat::from_real(target)).norm() <= 1e-9 * (1.0 + target.abs()));
    }

    #[test]
    fn accumulator_ignores_partition(split in 1usize..40, seed in 0u64..1000) {
        let pts = sample_points(&SamplingPlan::default().with_n(40).with_seed(seed), &[]).unwrap();
        let e = DerivativeEngine::<f64>::analytic();
        let res = |k: usize| (k as f64 * 0.37).sin().abs();
        let mut whole = Accumulator::new();
        for (k, p) in pts.iter().enumerate() {
            whole.push(k, res(k), 0.5, *p);
        }
        let (mut a, mut b) = (Accumulator::new(), Accumulator::new());
        for (k, p) in pts.iter().enumerate().rev() {
            if k < split { a.push(k, res(k), 0.5, *p) } else { b.push(k, res(k), 0.5, *p) }
        }
        let merged = b.merge(a);
        prop_assert_eq!(
            whole.finalize("c", "f", &e, 1.0).unwrap(),
            merged.finalize("c", "f", &e, 1.0).unwrap()
        );
    }
}
