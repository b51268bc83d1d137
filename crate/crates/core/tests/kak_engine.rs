mod common;

use num_complex::Complex64;
use orthosynth::kak::{abelian_params, euler_zyz, kak_factor, nearest_product_2x2, InvolutionSpec};
use orthosynth::mat::{kron, ComplexMatrix};
use orthosynth::pauli::{exp_commuting_sum, PauliSum};
use orthosynth::random::{haar_unitary, sample_rng};
use orthosynth::Tolerances;
use proptest::prelude::*;

fn specs() -> [&'static InvolutionSpec; 3] {
    [
        InvolutionSpec::two_qubit(),
        InvolutionSpec::three_qubit_outer(),
        InvolutionSpec::three_qubit_inner(),
    ]
}

#[test]
fn specs_validate() {
    for spec in specs() {
        assert!(spec.validate().unwrap() < 1e-12, "{}", spec.name);
        let s = &spec.sigma;
        for l in &spec.l_basis.elements {
            let m = l.to_matrix();
            assert!(common::dist(&(&(s * &m) * s), &m) < 1e-12);
        }
        for p in &spec.p_basis.elements {
            let m = p.to_matrix();
            assert!(common::dist(&(&(s * &m) * s), &m.scale(Complex64::new(-1.0, 0.0))) < 1e-12);
        }
        assert!(spec.a_basis.is_abelian());
    }
}

#[test]
fn subgroup_inputs_have_trivial_torus_part() {
    let tol = Tolerances::default();
    let mut rng = sample_rng(1, 0);
    for spec in specs() {
        for _ in 0..20 {
            let u = common::random_element(&spec.l_basis, &mut rng);
            let r = kak_factor(&u, spec, &tol).unwrap();
            assert!(r.params.iter().all(|p| p.abs() < 1e-10), "{}: {:?}", spec.name, r.params);
            assert!(common::dist(&r.a, &ComplexMatrix::identity(spec.dim())) < 1e-10);
            assert!(r.reconstruction_error(&u) < 1e-10);
        }
    }
}

#[test]
fn torus_params_recovered() {
    let spec = InvolutionSpec::two_qubit();
    let u = exp_commuting_sum(&PauliSum::from_basis(&spec.a_basis, &[0.3, 0.8]).unwrap()).unwrap();
    let r = kak_factor(&u, spec, &Tolerances::default()).unwrap();
    assert!(r.reconstruction_error(&u) < 1e-10);
    let again = exp_commuting_sum(&PauliSum::from_basis(&spec.a_basis, &r.params).unwrap()).unwrap();
    assert!(common::dist(&again, &r.a) < 1e-10);
    let mut p = r.params.clone();
    p.iter_mut().for_each(|x| *x = x.abs());
    p.sort_by(f64::total_cmp);
    assert!((p[0] - 0.3).abs() < 1e-10 && (p[1] - 0.8).abs() < 1e-10, "{:?}", r.params);
}

#[test]
fn forward_constructions_refactor() {
    let tol = Tolerances::default();
    for (s, spec) in specs().into_iter().enumerate() {
        let mut rng = sample_rng(31, s as u64);
        for _ in 0..100 {
            let k = common::random_element(&spec.l_basis, &mut rng);
            let a = common::random_element(&spec.a_basis, &mut rng);
            let k2 = common::random_element(&spec.l_basis, &mut rng);
            let u = &(&k * &a) * &k2;
            let r = kak_factor(&u, spec, &tol).unwrap();
            assert!(r.reconstruction_error(&u) < 1e-9, "{}", spec.name);
            assert!(r.theta_residual(spec) < 1e-9, "{} {:e} {:e}", spec.name, r.theta_residual(spec), r.residual);
            let torus = exp_commuting_sum(&PauliSum::from_basis(&spec.a_basis, &r.params).unwrap()).unwrap();
            assert!(common::dist(&torus, &r.a) < 1e-10, "{} {:e} {:?}", spec.name, common::dist(&torus, &r.a), r.params);
            assert_eq!(kak_factor(&u, spec, &tol).unwrap(), r);
        }
    }
}

#[test]
fn abelian_params_reexponentiate() {
    let mut rng = sample_rng(4, 0);
    for spec in specs() {
        for _ in 0..50 {
            let terms = common::random_terms(&spec.a_basis, &mut rng);
            let a = common::exp_minus_i(&terms);
            let c = abelian_params(&a, &spec.a_basis).unwrap();
            let back = exp_commuting_sum(&PauliSum::from_basis(&spec.a_basis, &c).unwrap()).unwrap();
            assert!(common::dist(&back, &a) < 1e-10);
        }
    }
}

#[test]
fn euler_rebuilds_random_unitaries() {
    let mut rng = sample_rng(200, 0);
    for _ in 0..200 {
        let u = haar_unitary(2, &mut rng);
        let e = euler_zyz(&u).unwrap();
        assert!(common::dist(&e.matrix(), &u) < 1e-12);
        assert!((0.0..=std::f64::consts::PI).contains(&e.phi));
        for t in [e.theta, e.psi] {
            assert!(t > -std::f64::consts::PI && t <= std::f64::consts::PI);
        }
        assert!((e.phase.norm() - 1.0).abs() < 1e-14);
    }
    let mut bad = ComplexMatrix::identity(2);
    bad[(1, 1)] = Complex64::new(2.0, 0.0);
    assert!(euler_zyz(&bad).is_err());
}

#[test]
fn nearest_product_recovers_products() {
    let mut rng = sample_rng(9, 0);
    for _ in 0..200 {
        let (v, w) = (haar_unitary(2, &mut rng), haar_unitary(2, &mut rng));
        let u = kron(&v, &w);
        let (v2, w2, r) = nearest_product_2x2(&u).unwrap();
        assert!(r < 1e-12);
        assert!(common::dist(&kron(&v2, &w2), &u) < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn forward_construction_property(seed in any::<u64>(), which in 0usize..3) {
        let spec = specs()[which];
        let mut rng = sample_rng(seed, 0);
        let u = &(&common::random_element(&spec.l_basis, &mut rng)
            * &common::random_element(&spec.a_basis, &mut rng))
            * &common::random_element(&spec.l_basis, &mut rng);
        let r = kak_factor(&u, spec, &Tolerances::default()).unwrap();
        prop_assert!(r.reconstruction_error(&u) < 1e-9);
        prop_assert!(r.theta_residual(spec) < 1e-9);
    }
}
