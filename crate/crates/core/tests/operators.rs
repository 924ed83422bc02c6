//! Cross-module integration checks: dense-oracle contractivity, cone
//! geometry cross-checks, opposing-support reductions across parameters,
//! and the paraproduct boundedness sampling study.

use num_complex::Complex64;

use commlab_core::commutator::{
    iterated_commutator, operator_norm, opposing_test_function, LinearOperator, NormMethod,
    NormOptions,
};
use commlab_core::dyadic::{paraproduct, product_bmo_norm, seeded_signs, ParaproductSpec};
use commlab_core::lattice::{Field, GridSpec};
use commlab_core::multiplier::{
    make_cone_projection, make_hilbert, make_riesz, make_smooth_cone, tensor, ConeBase, ConeSpec,
    Multiplier,
};

#[test]
fn dense_oracle_contractivity_of_constructors() {
    let line = GridSpec::from_dims_points(&[1], &[8]).unwrap();
    let plane = GridSpec::from_dims_points(&[2], &[8]).unwrap();
    let two = GridSpec::from_dims_points(&[1, 1], &[8, 8]).unwrap();
    let cone = ConeSpec::ball(0, &[1.0, 0.0], 0.5, 0.2).unwrap();
    let cases: Vec<Multiplier> = vec![
        make_hilbert(&line, 0).unwrap(),
        make_riesz(&plane, 0, 2).unwrap(),
        make_cone_projection(&plane, &cone).unwrap(),
        make_smooth_cone(&plane, &cone).unwrap(),
        tensor(&[make_hilbert(&two, 0).unwrap(), make_hilbert(&two, 1).unwrap()]).unwrap(),
    ];
    for m in cases {
        let op = LinearOperator::from_multiplier(&m);
        let est = operator_norm(&op, NormMethod::Dense, NormOptions::default()).unwrap();
        assert!(
            est.value <= m.max_abs_symbol() + 1e-10,
            "{:?}: {} vs {}",
            m.meta(),
            est.value,
            m.max_abs_symbol()
        );
    }
}

#[test]
fn cube_cone_nests_inside_ball_cone() {
    // (1 + tau) C(xi, Q) inside D(xi, r): then T_C = T_D T_C and the
    // one-sided bound || T_D(g) || >= || T_C(g) || follows
    let spec = GridSpec::from_dims_points(&[2], &[32]).unwrap();
    let dir = [0.8, 0.6];
    let cube = ConeSpec::new(0, dir.to_vec(), 0.3, ConeBase::Cube, 0.2, 2).unwrap();
    let ball = ConeSpec::new(0, dir.to_vec(), 0.6, ConeBase::Ball, 0.2, 2).unwrap();
    let tc = make_smooth_cone(&spec, &cube).unwrap();
    let td = make_smooth_cone(&spec, &ball).unwrap();
    // the ball symbol is 1 wherever the cube symbol is nonzero
    for (c, d) in tc.symbol().iter().zip(td.symbol()) {
        if c.norm() > 0.0 {
            assert!((d - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }
    let g = Field::random(&spec, 5);
    let tcg = tc.apply(&g).unwrap();
    let tdtcg = td.apply(&tcg).unwrap();
    assert!(tcg.sub(&tdtcg).unwrap().l2_norm() <= 1e-12 * g.l2_norm());
    let tdg = td.apply(&g).unwrap();
    assert!(tdg.l2_norm() + 1e-12 >= tcg.l2_norm());
}

#[test]
fn iterated_commutator_collapses_on_opposing_supports() {
    // multi-parameter version: with opposing Fourier support in every
    // parameter the iterated bracket reduces to the tensor product applied
    // to b f
    let spec = GridSpec::from_dims_points(&[2, 2], &[16, 16]).unwrap();
    let cone1 = ConeSpec::ball(0, &[1.0, 0.0], 0.6, 0.2).unwrap();
    let cone2 = ConeSpec::ball(1, &[0.0, 1.0], 0.6, 0.2).unwrap();
    let f = opposing_test_function(&spec, &[cone1.clone(), cone2.clone()], 7).unwrap();
    let t1 = make_smooth_cone(&spec, &cone1).unwrap();
    let t2 = make_smooth_cone(&spec, &cone2).unwrap();
    // both cone operators annihilate f
    assert!(t1.apply(&f).unwrap().l2_norm() <= 1e-12);
    assert!(t2.apply(&f).unwrap().l2_norm() <= 1e-12);
    let b = Field::random(&spec, 11);
    let bf = b.mul_pointwise(&f).unwrap();
    let ops = [
        LinearOperator::from_multiplier(&t1),
        LinearOperator::from_multiplier(&t2),
    ];
    let comm = iterated_commutator(&ops, &b).unwrap();
    let lhs = comm.apply(&f).unwrap();
    let rhs = t1.apply(&t2.apply(&bf).unwrap()).unwrap();
    assert!(lhs.sub(&rhs).unwrap().l2_norm() <= 1e-12 * bf.l2_norm());
}

#[test]
fn paraproduct_boundedness_sampling_study() {
    // || B_{k,l}(b, f) || <= C || b ||_BMO || f ||: the empirical constant
    // stays within a small band across shapes up to (3, 3)
    let grid = GridSpec::from_dims_points(&[1, 1], &[16, 16]).unwrap();
    let shapes: Vec<(usize, usize, ParaproductSpec)> = vec![
        (0, 0, ParaproductSpec::classical()),
        (1, 1, ParaproductSpec::ancestor(1, 1).unwrap()),
        (2, 2, ParaproductSpec::ancestor(2, 2).unwrap()),
        (3, 3, ParaproductSpec::ancestor(3, 3).unwrap()),
    ];
    let mut constants = Vec::new();
    for (k, l, pp) in &shapes {
        let mut c = 0.0f64;
        for seed in 0..50u64 {
            let b = Field::random(&grid, 1000 + seed);
            let f = Field::random_unit(&grid, 2000 + seed);
            let bmo = product_bmo_norm(&b, &[0, 1], 4).unwrap().value;
            let (out, _) = paraproduct(pp, &b, &f, seeded_signs(seed)).unwrap();
            c = c.max(out.l2_norm() / (bmo * f.l2_norm()));
        }
        assert!(c.is_finite() && c > 0.0, "shape ({k},{l})");
        constants.push(c);
    }
    let max = constants.iter().cloned().fold(0.0f64, f64::max);
    let min = constants.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(
        max / min < 8.0,
        "empirical constants spread too wide: {constants:?}"
    );
}
