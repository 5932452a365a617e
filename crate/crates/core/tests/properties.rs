use std::sync::Arc;

use ltdr::dieudonne::{iota_matrix, random_unit};
use ltdr::padic::{certified_rank, make_field, FieldDescriptor};
use ltdr::rng;
use ltdr::{PadicElement, Valuation};
use proptest::prelude::*;
use rand_chacha::ChaCha8Rng;

fn field(p: u64, m: usize) -> Arc<FieldDescriptor> {
    make_field(p, m, 20).unwrap()
}

fn element(k: &Arc<FieldDescriptor>, r: &mut ChaCha8Rng, shift: i64) -> PadicElement {
    rng::integral_element(k, r) * PadicElement::p_power(k, shift)
}

fn prime() -> impl Strategy<Value = u64> {
    prop_oneof![Just(2u64), Just(3), Just(5), Just(7)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(p in prime(), m in 1usize..4, seed: u64, s in -3i64..4) {
        let k = field(p, m);
        let mut r = rng::seeded(seed);
        let (a, b, c) = (element(&k, &mut r, s), element(&k, &mut r, 0), element(&k, &mut r, 1));
        prop_assert!((&a + &b).approx_eq(&(&b + &a)));
        prop_assert!((&a * &b).approx_eq(&(&b * &a)));
        prop_assert!((&(&a * &b) * &c).approx_eq(&(&a * &(&b * &c))));
        prop_assert!((&a * &(&b + &c)).approx_eq(&(&(&a * &b) + &(&a * &c))));
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn valuation_is_additive(p in prime(), m in 1usize..4, seed: u64, s in -3i64..4, t in 0i64..3) {
        let k = field(p, m);
        let mut r = rng::seeded(seed);
        let u = rng::unit_element(&k, &mut r) * PadicElement::p_power(&k, s);
        let w = rng::unit_element(&k, &mut r) * PadicElement::p_power(&k, t);
        prop_assert_eq!(u.valuation(), Valuation::Exact(s));
        prop_assert_eq!((&u * &w).valuation(), Valuation::Exact(s + t));
        let inv = u.inverse().unwrap();
        prop_assert_eq!(inv.valuation(), Valuation::Exact(-s));
        prop_assert!((&u * &inv).approx_eq(&PadicElement::one(&k)));
    }

    #[test]
    fn frobenius_is_a_ring_automorphism_of_order_m(p in prime(), m in 1usize..5, seed: u64) {
        let k = field(p, m);
        let mut r = rng::seeded(seed);
        let (a, b) = (element(&k, &mut r, 0), element(&k, &mut r, -1));
        prop_assert!((&a * &b).frobenius().approx_eq(&(&a.frobenius() * &b.frobenius())));
        prop_assert!((&a + &b).frobenius().approx_eq(&(&a.frobenius() + &b.frobenius())));
        prop_assert!(a.frobenius_pow(m as i64).approx_eq(&a));
        prop_assert!(a.frobenius_pow(-1).frobenius().approx_eq(&a));
    }

    #[test]
    fn rank_is_invariant_under_unimodular_change(p in prime(), m in 1usize..3, seed: u64, n in 2usize..5) {
        let k = field(p, m);
        let mut r = rng::seeded(seed);
        let rank = (seed as usize) % (n + 1);
        let a = rng::integral_matrix(&k, n, rank, &mut r);
        let b = rng::integral_matrix(&k, rank, n, &mut r);
        let x = &a * &b;
        let u = rng::unimodular_matrix(&k, n, &mut r);
        let w = rng::unimodular_matrix(&k, n, &mut r);
        let before = certified_rank(&x, 10);
        let after = certified_rank(&(&(&u * &x) * &w), 10);
        prop_assert_eq!(before.rank, after.rank);
        prop_assert!(before.rank <= rank);
    }

    #[test]
    fn iota_is_multiplicative(p in prime(), n in 1usize..4, seed: u64) {
        let k = field(p, n);
        let mut r = rng::seeded(seed);
        let (d1, d2) = (random_unit(&k, n, &mut r), random_unit(&k, n, &mut r));
        prop_assert!(iota_matrix(&d1.mul(&d2)).approx_eq(&(&iota_matrix(&d1) * &iota_matrix(&d2))));
    }
}
