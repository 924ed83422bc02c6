//! Property tests for the structural invariants: transform bijections,
//! Plancherel, adjoint pairings and zonal parity.

use num_complex::Complex64;
use proptest::prelude::*;

use commlab_core::dyadic::{haar_analysis, haar_synthesis};
use commlab_core::lattice::{forward_transform, inverse_transform, Field, GridSpec};
use commlab_core::multiplier::Multiplier;
use commlab_core::zonal::zonal_eval;

fn small_grid() -> impl Strategy<Value = GridSpec> {
    prop_oneof![
        (4usize..=16).prop_filter("pow2", |n| n.is_power_of_two()).prop_map(|n| {
            GridSpec::from_dims_points(&[1], &[n]).unwrap()
        }),
        (2usize..=3).prop_map(|d| GridSpec::from_dims_points(&[d], &[8]).unwrap()),
        Just(GridSpec::from_dims_points(&[1, 1], &[8, 16]).unwrap()),
        Just(GridSpec::from_dims_points(&[2, 1], &[4, 8]).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fourier_round_trip_and_parseval(spec in small_grid(), seed in 0u64..1000) {
        let f = Field::random(&spec, seed);
        let ff = forward_transform(&f).unwrap();
        prop_assert!((f.l2_norm() - ff.l2_norm()).abs() <= 1e-12 * f.l2_norm());
        let back = inverse_transform(&ff).unwrap();
        prop_assert!(back.sub(&f).unwrap().l2_norm() <= 1e-12 * f.l2_norm());
    }

    #[test]
    fn haar_round_trip_and_plancherel(spec in small_grid(), seed in 0u64..1000) {
        let f = Field::random(&spec, seed);
        let h = haar_analysis(&f);
        let sum: f64 = h.coeffs().iter().map(|z| z.norm_sqr()).sum();
        let norm2 = f.l2_norm().powi(2);
        prop_assert!((sum - norm2).abs() <= 1e-10 * norm2.max(1.0));
        let back = haar_synthesis(&h);
        prop_assert!(back.sub(&f).unwrap().l2_norm() <= 1e-12 * f.l2_norm());
    }

    #[test]
    fn multiplier_adjoint_pairing(spec in small_grid(), seed in 0u64..1000) {
        let m = Multiplier::random_contraction(&spec, seed);
        let f = Field::random(&spec, seed.wrapping_add(1));
        let g = Field::random(&spec, seed.wrapping_add(2));
        let lhs = m.apply(&f).unwrap().inner_product(&g).unwrap();
        let rhs = f.inner_product(&m.adjoint().apply(&g).unwrap()).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-11 * (f.l2_norm() * g.l2_norm()).max(1.0));
    }

    #[test]
    fn multiplier_apply_is_contractive(spec in small_grid(), seed in 0u64..1000) {
        let m = Multiplier::random_contraction(&spec, seed);
        let f = Field::random_unit(&spec, seed.wrapping_add(9));
        prop_assert!(m.apply(&f).unwrap().l2_norm() <= m.max_abs_symbol() + 1e-10);
    }

    #[test]
    fn zonal_parity_and_bound(n in 0usize..24, d in 2usize..6, t in -1.0f64..1.0) {
        let a = zonal_eval(n, d, t).unwrap();
        let b = zonal_eval(n, d, -t).unwrap();
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((a - sign * b).abs() <= 1e-12);
        prop_assert!(a.abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn inner_product_hermitian(seed in 0u64..1000) {
        let spec = GridSpec::from_dims_points(&[1, 1], &[8, 8]).unwrap();
        let f = Field::random(&spec, seed);
        let g = Field::random(&spec, seed.wrapping_add(5));
        let fg = f.inner_product(&g).unwrap();
        let gf = g.inner_product(&f).unwrap();
        prop_assert!((fg - gf.conj()).norm() < 1e-12);
        let ff = f.inner_product(&f).unwrap();
        prop_assert!(ff.im.abs() < 1e-12 && ff.re >= 0.0);
        let c = Complex64::new(0.5, -2.0);
        let cfg = f.scale(c).inner_product(&g).unwrap();
        prop_assert!((cfg - c * fg).norm() < 1e-11);
    }
}
