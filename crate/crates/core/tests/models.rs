use ltdr::dieudonne::{build_dg, build_dh, delta_matrix, iota_matrix, random_unit, DElement};
use ltdr::padic::make_field;
use ltdr::semilinear::{weak_admissibility_sample, FilteredIsocrystal};
use ltdr::{PadicElement, PadicMatrix};
use num_rational::Rational64;

#[test]
fn v_to_the_n_is_p_sigma_minus_n() {
    for n in 1..=5 {
        let k = make_field(2, n, 24).unwrap();
        let dh = build_dh(&k, n).unwrap();
        let mut rng = ltdr::rng::seeded(n as u64);
        let lambda = ltdr::rng::integral_matrix(&k, n, 1, &mut rng);
        let mut v = lambda.clone();
        for _ in 0..n {
            v = dh.apply_v(&v);
        }
        let expected = lambda.frobenius_pow(-(n as i64)).scale(&PadicElement::from_i64(&k, 2));
        assert!(v.approx_eq(&expected), "n = {n}");
    }
}

#[test]
fn v_commutes_with_iota() {
    for n in 1..=4 {
        let k = make_field(3, n, 16).unwrap();
        let dh = build_dh(&k, n).unwrap();
        let dg = build_dg(&k, n).unwrap();
        let mut rng = ltdr::rng::seeded(100 + n as u64);
        for _ in 0..5 {
            let d = random_unit(&k, n, &mut rng);
            // V∘ι(d) = ι(d)∘V  ⇔  M·σ⁻¹(ι(d)) = ι(d)·M
            let ih = dh.iota(&d).unwrap();
            assert!((dh.v_matrix() * &ih.frobenius_pow(-1)).approx_eq(&(&ih * dh.v_matrix())));
            let ig = dg.iota(&d).unwrap();
            assert!((dg.v_matrix() * &ig.frobenius_pow(-1)).approx_eq(&(&ig * dg.v_matrix())));
        }
    }
}

#[test]
fn delta_intertwines_actions() {
    for n in 1..=4 {
        let k = make_field(2, n, 20).unwrap();
        let dg = build_dg(&k, n).unwrap();
        let delta = delta_matrix(&k, n).unwrap();
        let mut rng = ltdr::rng::seeded(7 + n as u64);
        for _ in 0..5 {
            let d = random_unit(&k, n, &mut rng);
            let lhs = delta.matrix() * &delta.source_action(&d);
            let rhs = &dg.iota(&d).unwrap() * delta.matrix();
            assert!(lhs.approx_eq(&rhs), "n = {n}");
        }
        // Δ is a map of Dieudonné modules
        let vh = PadicMatrix::block_diagonal(&k, &vec![build_dh(&k, n).unwrap().v_matrix().clone(); n]);
        assert!((dg.v_matrix() * delta.matrix()).approx_eq(&(delta.matrix() * &vh)));
    }
}

#[test]
fn grading_twists_the_unramified_action() {
    let n = 3;
    let k = make_field(2, 3, 16).unwrap();
    let dg = build_dg(&k, n).unwrap();
    let zeta = PadicElement::teichmueller(&k, &[0, 1, 0]);
    let d = DElement::scalar(n, zeta.clone()).unwrap();
    let m = dg.iota(&d).unwrap();
    for i in 0..n {
        for idx in dg.graded_piece(i) {
            assert!(m.get(idx, idx).approx_eq(&zeta.frobenius_pow(-(i as i64))));
        }
        assert_eq!(dg.graded_piece(i).len(), n);
    }
}

#[test]
fn iota_is_multiplicative_with_pi_powers() {
    let n = 3;
    let k = make_field(5, 3, 10).unwrap();
    let mut rng = ltdr::rng::seeded(3);
    let a = random_unit(&k, n, &mut rng);
    for e in 0..2 * n {
        let pe = DElement::pi_power(&k, n, e);
        let lhs = iota_matrix(&pe.mul(&a));
        let rhs = &iota_matrix(&pe) * &iota_matrix(&a);
        assert!(lhs.approx_eq(&rhs));
        let conj = iota_matrix(&a.conjugate_by_pi(e as i64));
        assert!((&iota_matrix(&pe) * &iota_matrix(&a)).approx_eq(&(&conj * &iota_matrix(&pe))));
    }
}

#[test]
fn unit_root_space_of_dg() {
    for n in 1..=4 {
        let k = make_field(2, 2, 20).unwrap();
        let dg = build_dg(&k, n).unwrap();
        let u = dg.unit_root_operator().unwrap();
        assert!(u.newton_slopes().unwrap().iter().all(|s| *s == Rational64::from_integer(0)));
        let fixed = dg.unit_root_fixed_space().unwrap();
        assert_eq!(fixed.dim(), n);
        assert!(u.apply(&fixed.basis).approx_eq(&fixed.basis));
    }
}

/// Fil on D(G) from a hyperplane W ⊂ N_0; the sub-object generated by a
/// rational vector v breaks t_H ≤ t_N exactly when v ∈ W.
#[test]
fn weak_admissibility_of_dg() {
    let n = 2;
    let k = make_field(2, 2, 20).unwrap();
    let dg = build_dg(&k, n).unwrap();
    let iso = dg.frobenius_isocrystal().unwrap();
    let omega = PadicElement::from_integer_coeffs(&k, &[0, 1]);
    let one = PadicElement::one(&k);
    let zero = PadicElement::zero(&k);

    let generic = PadicMatrix::column_vector(&k, vec![one.clone(), omega]);
    let rational = PadicMatrix::column_vector(&k, vec![one.clone(), one.clone()]);
    let lines: Vec<PadicMatrix> = [
        vec![one.clone(), zero.clone()],
        vec![zero.clone(), one.clone()],
        vec![one.clone(), one.clone()],
        vec![one.clone(), PadicElement::from_i64(&k, 2)],
    ]
    .into_iter()
    .map(|v| dg.sub_object_from_n0(&PadicMatrix::column_vector(&k, v)).unwrap())
    .collect();

    let fil = dg.filtration_from_n0(&generic).unwrap();
    let fi = FilteredIsocrystal::new(iso.clone(), fil).unwrap();
    let rep = weak_admissibility_sample(&fi, &lines).unwrap();
    assert!(rep.full_equality);
    assert!(rep.weakly_admissible_on_sample);

    let fil = dg.filtration_from_n0(&rational).unwrap();
    let fi = FilteredIsocrystal::new(iso, fil).unwrap();
    let rep = weak_admissibility_sample(&fi, &lines).unwrap();
    assert!(rep.full_equality);
    assert!(!rep.weakly_admissible_on_sample);
    let failing: Vec<usize> = rep.sub_objects.iter().enumerate().filter(|(_, r)| !r.holds).map(|(i, _)| i).collect();
    assert_eq!(failing, vec![2]);
}

#[test]
fn dh_full_object_equality() {
    let n = 3;
    let k = make_field(2, 3, 20).unwrap();
    let dh = build_dh(&k, n).unwrap();
    let mut rng = ltdr::rng::seeded(5);
    let fil = ltdr::rng::integral_matrix(&k, n, n - 1, &mut rng);
    let fi = FilteredIsocrystal::new(dh.frobenius_isocrystal().unwrap(), fil).unwrap();
    let rep = weak_admissibility_sample(&fi, &[]).unwrap();
    assert!(rep.full_equality);
    assert_eq!(rep.full.t_h, (n - 1) as i64);
}
