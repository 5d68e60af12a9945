//! Modulus of convexity of the Lᵖ geometry and the midpoint gap inequality.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::space::{Element, Space};

/// Relative round-off slack for identity checks.
pub const IDENTITY_TOL: f64 = 1e-10;

fn check_eps(eps: f64) -> Result<()> {
    if (0.0..=2.0).contains(&eps) {
        Ok(())
    } else {
        Err(Error::OutOfDomain {
            what: "eps",
            value: eps,
            domain: "[0, 2]",
        })
    }
}

/// `1 - (1 - (eps/2)^p)^{1/p}`, the exact modulus of Lᵖ for `p >= 2`.
pub fn closed_form(p: f64, eps: f64) -> f64 {
    1.0 - (1.0 - (eps / 2.0).powf(p)).max(0.0).powf(1.0 / p)
}

/// Midpoint deficit along the two-atom family `x = (a, b)`, `y = (a, -b)`
/// written in the sum/difference basis of two atoms of mass 1/2, so that the
/// unit-norm constraint reads `(|a + b|^p + |a - b|^p) / 2 = 1` with
/// `b = eps / 2`. Solves for `a` by bisection and returns `1 - a`.
pub fn hanner_family(p: f64, eps: f64) -> f64 {
    let b = eps / 2.0;
    let g = |a: f64| 0.5 * ((a + b).abs().powf(p) + (a - b).abs().powf(p)) - 1.0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    if g(lo) >= 0.0 {
        return 1.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    1.0 - 0.5 * (lo + hi)
}

/// Modulus of convexity `δ(eps)` of the space's Lᵖ geometry.
///
/// For `p >= 2` this is the closed form. For `1 < p < 2` the extremal pairs
/// are the two-atom Hanner configurations, evaluated numerically.
pub fn modulus_of_convexity(space: &Space, eps: f64) -> Result<f64> {
    modulus_for_exponent(space.p(), eps)
}

pub fn modulus_for_exponent(p: f64, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::InvalidExponent(p));
    }
    if eps == 0.0 {
        return Ok(0.0);
    }
    if eps == 2.0 {
        return Ok(1.0);
    }
    if p >= 2.0 {
        Ok(closed_form(p, eps))
    } else {
        Ok(hanner_family(p, eps))
    }
}

/// `δ` with its argument clamped into `[0, 2]`, for norms that exceed the
/// domain by round-off.
pub(crate) fn delta_clamped(p: f64, eps: f64) -> f64 {
    modulus_for_exponent(p, eps.clamp(0.0, 2.0)).unwrap_or(f64::NAN)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MidpointGap {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Checks `‖(u+v)/2‖ <= C1 - C2 δ(‖u-v‖ / C2)` for bounds `C1, C2` at least
/// `max(‖u‖, ‖v‖)`.
pub fn midpoint_gap_check(u: &Element, v: &Element, c1: f64, c2: f64) -> Result<MidpointGap> {
    let nu = u.norm();
    let nv = v.norm();
    if nu == 0.0 && nv == 0.0 {
        return Err(Error::InvalidInput(
            "midpoint gap needs a nonzero element".into(),
        ));
    }
    let max_norm = nu.max(nv);
    let slack = max_norm * (1.0 - IDENTITY_TOL);
    for (name, value) in [("C1", c1), ("C2", c2)] {
        if !(value >= slack) {
            return Err(Error::BoundBelowNorm {
                name,
                value,
                max_norm,
            });
        }
    }
    let diff = u.sub(v)?.norm();
    let lhs = u.add(v)?.scaled(0.5).norm();
    let rhs = c1 - c2 * delta_clamped(u.space().p(), diff / c2);
    Ok(MidpointGap {
        lhs,
        rhs,
        holds: lhs <= rhs + IDENTITY_TOL * c1.max(1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(p: f64, n: i64) -> Space {
        Space::sequence(p, 0, n - 1).unwrap()
    }

    #[test]
    fn endpoints() {
        for p in [1.2, 1.5, 2.0, 3.0, 4.0] {
            let s = seq(p, 2);
            assert_eq!(modulus_of_convexity(&s, 0.0).unwrap(), 0.0);
            assert_eq!(modulus_of_convexity(&s, 2.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn hilbert_value_at_one() {
        let d = modulus_of_convexity(&seq(2.0, 2), 1.0).unwrap();
        assert!((d - (1.0 - 3f64.sqrt() / 2.0)).abs() < 1e-15);
        assert!((d - 0.133975).abs() < 1e-6);
    }

    #[test]
    fn l4_value_at_one() {
        let d = modulus_of_convexity(&seq(4.0, 2), 1.0).unwrap();
        assert!((d - 0.0160052).abs() < 1e-6);
    }

    #[test]
    fn hanner_family_matches_closed_form_at_two() {
        // Both families coincide for p = 2.
        for eps in [0.1, 0.7, 1.3, 1.9] {
            assert!((hanner_family(2.0, eps) - closed_form(2.0, eps)).abs() < 1e-14);
        }
    }

    #[test]
    fn eps_outside_range_is_an_error() {
        let s = seq(3.0, 2);
        assert!(modulus_of_convexity(&s, -0.1).is_err());
        assert!(modulus_of_convexity(&s, 2.1).is_err());
        assert!(modulus_of_convexity(&s, f64::NAN).is_err());
    }

    #[test]
    fn extremal_hilbert_pair_is_tight() {
        let s = seq(2.0, 2);
        let u = Element::new(s, 0, vec![1.0, 0.0]).unwrap();
        let v = Element::new(s, 0, vec![0.0, 1.0]).unwrap();
        let r = midpoint_gap_check(&u, &v, 1.0, 1.0).unwrap();
        assert!((r.lhs - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((r.rhs - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(r.holds);
    }

    #[test]
    fn equal_points_hold_with_equality() {
        let s = seq(3.0, 3);
        let u = Element::new(s, 0, vec![0.3, -1.0, 2.0]).unwrap();
        let n = u.norm();
        let r = midpoint_gap_check(&u, &u, n, n).unwrap();
        assert!((r.lhs - n).abs() < 1e-15);
        assert!((r.rhs - n).abs() < 1e-15);
        assert!(r.holds);
    }

    #[test]
    fn bounds_below_norm_are_rejected() {
        let s = seq(2.0, 2);
        let u = Element::new(s, 0, vec![3.0, 4.0]).unwrap();
        let v = Element::new(s, 0, vec![0.0, 1.0]).unwrap();
        assert!(matches!(
            midpoint_gap_check(&u, &v, 4.0, 5.0),
            Err(Error::BoundBelowNorm { name: "C1", .. })
        ));
        assert!(matches!(
            midpoint_gap_check(&u, &v, 5.0, 4.9),
            Err(Error::BoundBelowNorm { name: "C2", .. })
        ));
        let z = Element::zeros(s, 0).unwrap();
        assert!(midpoint_gap_check(&z, &z, 1.0, 1.0).is_err());
    }
}
