use num_complex::Complex64 as C64;
use proptest::prelude::*;
use qsteer_core::{
    apply, error_probability, expm_step, overlap, propagate_final, robustness_set, ErrorMap, HermitianOperator,
    ParameterBox, QuantumState, StrategySpec, TimeGrid,
};

fn hermitian(n: usize) -> impl Strategy<Value = HermitianOperator> {
    prop::collection::vec(-4.0f64..4.0, n * n).prop_map(move |raw| {
        let mut m = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            m[i * n + i] = C64::new(raw[i * n + i], 0.0);
            for j in i + 1..n {
                let z = C64::new(raw[i * n + j], raw[j * n + i]);
                m[i * n + j] = z;
                m[j * n + i] = z.conj();
            }
        }
        HermitianOperator::new(n, m).unwrap()
    })
}

fn state(n: usize) -> impl Strategy<Value = QuantumState> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n)
        .prop_filter_map("nonzero", |v| QuantumState::new(v.into_iter().map(|(a, b)| C64::new(a, b)).collect()).ok())
}

fn sized_hermitian() -> impl Strategy<Value = HermitianOperator> {
    (2usize..=5).prop_flat_map(hermitian)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn expm_step_is_unitary(h in sized_hermitian(), dt in -3.0f64..3.0) {
        let u = expm_step(&h, dt).unwrap();
        prop_assert!(u.unitarity_defect() <= 1e-10, "defect {}", u.unitarity_defect());
    }

    #[test]
    fn expm_step_is_a_one_parameter_group(h in sized_hermitian(), a in -1.5f64..1.5, b in -1.5f64..1.5) {
        let ua = expm_step(&h, a).unwrap();
        let ub = expm_step(&h, b).unwrap();
        let uab = expm_step(&h, a + b).unwrap();
        prop_assert!(ua.compose(&ub).unwrap().max_abs_diff(&uab) <= 1e-10);
        let inverse = expm_step(&h, -a).unwrap();
        prop_assert!(ua.compose(&inverse).unwrap().max_abs_diff(&qsteer_core::UnitaryOperator::identity(h.dim())) <= 1e-10);
    }

    #[test]
    fn apply_preserves_norm_and_inner_products(
        (h, x, y) in (2usize..=4).prop_flat_map(|n| (hermitian(n), state(n), state(n))),
        dt in -3.0f64..3.0,
    ) {
        let u = expm_step(&h, dt).unwrap();
        let ux = apply(&u, &x).unwrap();
        let uy = apply(&u, &y).unwrap();
        prop_assert!((ux.norm() - 1.0).abs() <= 1e-12);
        let before = overlap(&x, &y).unwrap();
        let after = overlap(&ux, &uy).unwrap();
        prop_assert!((before - after).norm() <= 1e-10);
    }

    #[test]
    fn error_probability_in_unit_interval((a, b) in (2usize..=4).prop_flat_map(|n| (state(n), state(n)))) {
        let p = error_probability(&a, &b).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
        prop_assert!(error_probability(&a, &a).unwrap() <= 1e-12);
    }

    #[test]
    fn error_probability_ignores_global_phase(a in state(3), b in state(3), phase in -6.3f64..6.3) {
        let p = error_probability(&a, &b).unwrap();
        let q = error_probability(&a.with_global_phase(phase), &b).unwrap();
        prop_assert!((p - q).abs() <= 1e-12);
    }

    #[test]
    fn propagation_preserves_norm(
        d in 0.0f64..3.0, o in 0.0f64..3.0, t in 0.1f64..6.0, psi in state(2),
    ) {
        let spec = StrategySpec::allen_eberly(d, o, t, TimeGrid::symmetric(6.0, 200).unwrap()).unwrap();
        let last = propagate_final(&spec.plant(), &[d, o], &psi, &spec.grid(), t).unwrap();
        prop_assert!((last.norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn robustness_set_is_monotone_in_epsilon(
        values in prop::collection::vec(0.0f64..1.0, 12),
        a in 0.0f64..0.99, b in 0.0f64..0.99,
    ) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let pb = ParameterBox::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let map = ErrorMap::from_values(pb, vec![3, 4], values, 1.0, "test").unwrap();
        let (in_lo, r_lo) = robustness_set(&map, lo).unwrap();
        let (in_hi, r_hi) = robustness_set(&map, hi).unwrap();
        prop_assert!(in_lo.iter().zip(&in_hi).all(|(&x, &y)| !x || y));
        prop_assert!(r_lo.inside_fraction <= r_hi.inside_fraction);
        prop_assert!(!r_lo.is_robust || r_hi.is_robust);
    }

    #[test]
    fn box_axes_hit_both_endpoints(lo in -5.0f64..5.0, width in 1e-3f64..10.0, res in 2usize..50) {
        let pb = ParameterBox::new(vec![lo], vec![lo + width]).unwrap();
        let axis = pb.axis(0, res);
        prop_assert_eq!(axis.len(), res);
        prop_assert_eq!(axis[0], lo);
        prop_assert_eq!(axis[res - 1], lo + width);
        prop_assert!(axis.windows(2).all(|w| w[0] < w[1]));
    }
}
