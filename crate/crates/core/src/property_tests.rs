//! Randomised checks of the space, dislocation and modulus identities.

use crate::dislocation::{apply, compose, inverse};
use crate::modulus::{closed_form, midpoint_gap_check, modulus_for_exponent};
use crate::space::{duality_conjugate, pairing, Element, Space};
use crate::Dislocation;
use proptest::prelude::*;

fn coeffs(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-4.0..4.0f64, len)
}

fn nonzero(c: &[f64]) -> bool {
    c.iter().any(|v| v.abs() > 1e-3)
}

proptest! {
    #[test]
    fn conjugate_pairs_to_norm(p in 1.2..6.0f64, c in coeffs(24)) {
        prop_assume!(nonzero(&c));
        let x = Element::new(Space::sequence(p, -12, 11).unwrap(), 0, c).unwrap();
        let v = duality_conjugate(&x).unwrap();
        let n = x.norm();
        prop_assert!((pairing(&v, &x).unwrap() - n).abs() <= 1e-10 * n.max(1.0));
        prop_assert!((v.norm() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn dislocations_are_isometries(p in 1.2..5.0f64, scale in -2i32..=2, shift in -3i32..=3, c in coeffs(16)) {
        // Support (-1, 1) at level 3; every image stays inside (-32, 32).
        let s = Space::grid(p, -32.0, 32.0, 0).unwrap();
        let u = Element::from_cells(s, 3, |a, _| {
            if (-1.0..1.0).contains(&a) { c[((a + 1.0) * 8.0) as usize] } else { 0.0 }
        })
        .unwrap();
        let g = Dislocation::new(scale, shift as f64);
        let gu = apply(&g, &u).unwrap();
        prop_assert!((gu.norm() - u.norm()).abs() <= 1e-12 * u.norm().max(1.0));
        let back = apply(&inverse(&g), &gu).unwrap();
        prop_assert!(back.max_abs_diff(&u).unwrap() <= 1e-12);
    }

    #[test]
    fn composition_acts_as_successive_application(
        a in -2i32..=2, b in -2i32..=2, ya in -2i32..=2, yb in -2i32..=2, c in coeffs(8)
    ) {
        let s = Space::grid(2.0, -64.0, 64.0, 0).unwrap();
        let u = Element::from_cells(s, 3, |x, _| {
            if (0.0..1.0).contains(&x) { c[(x * 8.0) as usize] } else { 0.0 }
        })
        .unwrap();
        let g = Dislocation::new(a, ya as f64);
        let h = Dislocation::new(b, yb as f64);
        let both = apply(&compose(&g, &h), &u).unwrap();
        let stepwise = apply(&g, &apply(&h, &u).unwrap()).unwrap();
        prop_assert!(both.max_abs_diff(&stepwise).unwrap() <= 1e-12);
        prop_assert!(compose(&g, &inverse(&g)).is_identity());
    }

    #[test]
    fn modulus_is_monotone_with_nondecreasing_ratio(p in 1.1..8.0f64, e1 in 0.01..2.0f64, e2 in 0.01..2.0f64) {
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let dl = modulus_for_exponent(p, lo).unwrap();
        let dh = modulus_for_exponent(p, hi).unwrap();
        prop_assert!(dl <= dh + 1e-12);
        prop_assert!(dl / lo <= dh / hi + 1e-9);
        if p >= 2.0 {
            prop_assert!((dh - closed_form(p, hi)).abs() <= 1e-12);
        }
    }

    #[test]
    fn midpoint_gap_holds(p in 1.2..6.0f64, a in coeffs(12), b in coeffs(12)) {
        prop_assume!(nonzero(&a) || nonzero(&b));
        let s = Space::sequence(p, 0, 11).unwrap();
        let u = Element::new(s, 0, a).unwrap();
        let v = Element::new(s, 0, b).unwrap();
        let c = u.norm().max(v.norm());
        let gap = midpoint_gap_check(&u, &v, c, c).unwrap();
        prop_assert!(gap.holds, "lhs {} rhs {}", gap.lhs, gap.rhs);
    }
}
