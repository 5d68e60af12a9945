//! Convexity and Brezis-Lieb type inequalities, checked along sequences.

use serde::Serialize;

use crate::convergence::{delta_limit_dual, weak_limit_estimate, TestDictionary};
use crate::corpus::{nonadditive_constant, nonadditive_pair};
use crate::error::{Error, Result};
use crate::modulus::delta_clamped;
use crate::seq::{decays, Seq};
use crate::space::Element;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Plus,
    Minus,
}

/// `f₊(t) = (1+t)^p - 1 - t^p - p t^{p-1} - p t` for `t >= 0`, and
/// `f₋(t) = (1-t)^p - 1 - t^p + p t^{p-1} + p t` for `t` in `[0, 1]`.
pub fn elementary_f(p: f64, t: f64, branch: Branch) -> Result<f64> {
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::InvalidExponent(p));
    }
    let pow = |x: f64, e: f64| if x == 0.0 { 0.0 } else { x.powf(e) };
    match branch {
        Branch::Plus => {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::OutOfDomain {
                    what: "t",
                    value: t,
                    domain: "[0, ∞)",
                });
            }
            Ok(pow(1.0 + t, p) - 1.0 - pow(t, p) - p * pow(t, p - 1.0) - p * t)
        }
        Branch::Minus => {
            if !(0.0..=1.0).contains(&t) {
                return Err(Error::OutOfDomain {
                    what: "t",
                    value: t,
                    domain: "[0, 1]",
                });
            }
            Ok(pow(1.0 - t, p) - 1.0 - pow(t, p) + p * pow(t, p - 1.0) + p * t)
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ElementaryScan {
    pub p: f64,
    pub branch: Branch,
    pub min: f64,
    pub argmin: f64,
    /// First grid point with `f < -witness_tol`, if any.
    pub witness: Option<f64>,
}

/// Minimum of `f` over the grid `0, step, 2 step, ..` up to `t_max`.
pub fn elementary_scan(
    p: f64,
    branch: Branch,
    t_max: f64,
    step: f64,
    witness_tol: f64,
) -> Result<ElementaryScan> {
    if !(step > 0.0 && t_max >= 0.0) {
        return Err(Error::InvalidInput(
            "scan needs step > 0 and t_max >= 0".into(),
        ));
    }
    let n = (t_max / step).round() as usize;
    let mut min = f64::INFINITY;
    let mut argmin = 0.0;
    let mut witness = None;
    for i in 0..=n {
        let t = (i as f64 * step).min(t_max);
        let f = elementary_f(p, t, branch)?;
        if f < min {
            min = f;
            argmin = t;
        }
        if witness.is_none() && f < -witness_tol {
            witness = Some(t);
        }
    }
    Ok(ElementaryScan {
        p,
        branch,
        min,
        argmin,
        witness,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct InequalityReport {
    /// Left and right side at the last index.
    pub lhs: f64,
    pub rhs: f64,
    /// Smallest tail margin.
    pub margin: f64,
    pub holds: bool,
    /// Margin at every index.
    pub trend: Vec<f64>,
    pub warnings: Vec<String>,
}

fn report(seq: &Seq, sides: Vec<(f64, f64)>, tol: f64, warnings: Vec<String>) -> InequalityReport {
    let trend: Vec<f64> = sides.iter().map(|(l, r)| l - r).collect();
    let margin = trend[seq.tail_start()..]
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let (lhs, rhs) = *sides.last().expect("nonempty sequence");
    InequalityReport {
        lhs,
        rhs,
        margin,
        holds: margin >= -tol,
        trend,
        warnings,
    }
}

fn check_space(seq: &Seq, u: &Element) -> Result<()> {
    if seq.space() == u.space() {
        Ok(())
    } else {
        Err(Error::GeometryMismatch)
    }
}

/// `∫|u_k|^p` against `∫|u|^p + ∫|u_k - u|^p`, margin `lhs - rhs`.
///
/// The lower bound needs `p >= 3` and `u` to be both the weak and the Δ-limit;
/// each unverified hypothesis adds a warning.
pub fn bl_lower_bound(
    seq: &Seq,
    u: &Element,
    dict: &TestDictionary,
    tol: f64,
) -> Result<InequalityReport> {
    check_space(seq, u)?;
    let p = u.space().p();
    let mut warnings = Vec::new();
    if p < 3.0 {
        warnings.push(format!("p = {p} < 3: the lower bound is not guaranteed"));
    }
    let weak = weak_limit_estimate(seq, dict)?;
    let gap = weak.limit.max_abs_diff(u)?;
    if gap > 1e-3 * u.sup_norm().max(1.0) {
        warnings.push(format!(
            "u differs from the weak-limit estimate by {gap:.3e}"
        ));
    }
    if !delta_limit_dual(seq, u, dict)?.delta_convergent {
        warnings.push("u is not certified as the Δ-limit".into());
    }
    let up = u.power_integral(p);
    let sides = seq
        .elements()
        .iter()
        .map(|x| Ok((x.power_integral(p), up + x.sub(u)?.power_integral(p))))
        .collect::<Result<Vec<_>>>()?;
    Ok(report(seq, sides, tol, warnings))
}

fn check_normalized(seq: &Seq) -> Result<()> {
    let s = seq.tail_sup_norm();
    if s > 1.0 + 1e-12 {
        Err(Error::Unnormalized(s))
    } else {
        Ok(())
    }
}

/// `‖u_k‖` against `‖u_k - u‖ + δ(‖u‖)`.
pub fn delta_energy_bound(seq: &Seq, u: &Element, tol: f64) -> Result<InequalityReport> {
    check_space(seq, u)?;
    check_normalized(seq)?;
    let nu = u.norm();
    if nu >= 2.0 {
        return Err(Error::ProfileTooLarge(nu));
    }
    let d = delta_clamped(u.space().p(), nu);
    let sides = seq
        .elements()
        .iter()
        .map(|x| Ok((x.norm(), x.distance(u)? + d)))
        .collect::<Result<Vec<_>>>()?;
    Ok(report(seq, sides, tol, vec![]))
}

/// `‖u_k‖` against `‖u‖ + δ(‖u_k - u‖)`.
pub fn weak_lsc_bound(seq: &Seq, u: &Element, tol: f64) -> Result<InequalityReport> {
    check_space(seq, u)?;
    let mut warnings = Vec::new();
    if seq.tail_sup_norm() > 1.0 + 1e-12 {
        warnings.push("tail is not normalized".into());
    }
    let p = u.space().p();
    let nu = u.norm();
    let sides = seq
        .elements()
        .iter()
        .map(|x| Ok((x.norm(), nu + delta_clamped(p, x.distance(u)?))))
        .collect::<Result<Vec<_>>>()?;
    Ok(report(seq, sides, tol, warnings))
}

/// `‖u_k‖²` against `‖u_k - u‖² + ‖u‖²` in a Hilbert space; holds when the
/// two-sided gap vanishes along the tail.
pub fn hilbert_identity(seq: &Seq, u: &Element, tol: f64) -> Result<InequalityReport> {
    check_space(seq, u)?;
    let p = u.space().p();
    if p != 2.0 {
        return Err(Error::OutOfDomain {
            what: "p",
            value: p,
            domain: "{2}",
        });
    }
    let nu2 = u.norm().powi(2);
    let sides = seq
        .elements()
        .iter()
        .map(|x| Ok((x.norm().powi(2), x.distance(u)?.powi(2) + nu2)))
        .collect::<Result<Vec<_>>>()?;
    let mut r = report(seq, sides, tol, vec![]);
    let gaps: Vec<f64> = r.trend[seq.tail_start()..]
        .iter()
        .map(|m| m.abs())
        .collect();
    r.margin = -gaps.iter().copied().fold(0.0, f64::max);
    r.holds = decays(&gaps, tol, 0.2);
    Ok(r)
}

#[derive(Clone, Debug, Serialize)]
pub struct CubeTrend {
    /// `n` for each index.
    pub scales: Vec<u64>,
    /// Mean of the cube over the window.
    pub mean: Vec<f64>,
    /// Largest `|avg_C f³|` over the unit cells.
    pub max_cell_average: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NonadditivityReport {
    pub x_cubed: CubeTrend,
    pub y_cubed: CubeTrend,
    pub sum_cubed: CubeTrend,
    /// Mean of `(x_0 + y_0)^3` over one period, integrated exactly.
    pub limit_constant: f64,
    pub x_cubed_null: bool,
    pub y_cubed_null: bool,
    pub sum_cubed_nonzero: bool,
    pub certified: bool,
}

fn cube_trend(xs: &[Element], exps: &[u32]) -> Result<CubeTrend> {
    let mut mean = Vec::new();
    let mut max_cell_average = Vec::new();
    for x in xs {
        let cube = x.map(|v| v * v * v);
        let c = cube.cumulative();
        let (a, b) = x.space().extent();
        mean.push(c.average(a, b));
        let cells = (b - a) as usize;
        max_cell_average.push(
            (0..cells)
                .map(|i| c.average(a + i as f64, a + i as f64 + 1.0).abs())
                .fold(0.0, f64::max),
        );
    }
    Ok(CubeTrend {
        scales: exps.iter().map(|e| 1u64 << e).collect(),
        mean,
        max_cell_average,
    })
}

/// Cubes of the periodized step functions on `(0, 9)`: `x_n³` and `y_n³`
/// tend weakly to zero while `(x_n + y_n)³` tends to a nonzero constant.
pub fn nonadditivity_demo(exps: &[u32], tol: f64) -> Result<NonadditivityReport> {
    if exps.len() < 2 {
        return Err(Error::InsufficientTail("need at least two scales".into()));
    }
    let (xs, ys) = nonadditive_pair(4.0, exps.iter().copied())?;
    let sums = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| x.add(y))
        .collect::<Result<Vec<_>>>()?;
    let x_cubed = cube_trend(&xs, exps)?;
    let y_cubed = cube_trend(&ys, exps)?;
    let sum_cubed = cube_trend(&sums, exps)?;
    let tail = exps.len() / 2;
    let null = |t: &CubeTrend| {
        decays(&t.max_cell_average[tail..], tol, 0.2)
            && t.mean[tail..].iter().all(|m| m.abs() <= tol)
    };
    let x_cubed_null = null(&x_cubed);
    let y_cubed_null = null(&y_cubed);
    let sum_cubed_nonzero = sum_cubed.mean[tail..].iter().all(|m| m.abs() > 10.0 * tol);
    Ok(NonadditivityReport {
        limit_constant: nonadditive_constant(),
        certified: x_cubed_null && y_cubed_null && sum_cubed_nonzero,
        x_cubed,
        y_cubed,
        sum_cubed,
        x_cubed_null,
        y_cubed_null,
        sum_cubed_nonzero,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Space;

    #[test]
    fn elementary_values() {
        assert_eq!(elementary_f(3.0, 1.0, Branch::Plus).unwrap(), 0.0);
        assert_eq!(elementary_f(4.0, 1.0, Branch::Plus).unwrap(), 6.0);
        assert_eq!(elementary_f(3.0, 0.0, Branch::Plus).unwrap(), 0.0);
        let f = elementary_f(2.5, 0.01, Branch::Plus).unwrap();
        assert!(f < -2e-3 && f > -3e-3, "{f}");
        assert!(elementary_f(3.0, -0.1, Branch::Plus).is_err());
        assert!(elementary_f(3.0, 1.1, Branch::Minus).is_err());
        assert!(elementary_f(1.0, 0.5, Branch::Minus).is_err());
    }

    #[test]
    fn scan_finds_witness_below_three() {
        let s = elementary_scan(2.5, Branch::Plus, 10.0, 1e-3, 1e-6).unwrap();
        assert!(s.witness.is_some());
        let s = elementary_scan(3.5, Branch::Plus, 10.0, 1e-3, 1e-6).unwrap();
        assert!(s.witness.is_none());
        assert!(s.min >= -1e-12);
    }

    #[test]
    fn zero_limit_has_zero_margin() {
        let s = Space::sequence(4.0, 0, 3).unwrap();
        let xs: Vec<Element> = (0..8)
            .map(|k| Element::basis(s, (k % 4) as i64).unwrap().scaled(0.5))
            .collect();
        let seq = Seq::with_half_tail(xs).unwrap();
        let u = Element::zeros(s, 0).unwrap();
        let dict = TestDictionary::new(&s, 0).unwrap();
        let r = bl_lower_bound(&seq, &u, &dict, 1e-9).unwrap();
        assert!(r.trend.iter().all(|m| m.abs() < 1e-15));
        assert!(r.holds);
        let r = delta_energy_bound(&seq, &u, 1e-9).unwrap();
        assert!(r.trend.iter().all(|m| m.abs() < 1e-15));
    }

    #[test]
    fn constant_sequence_energy_margin() {
        let s = Space::sequence(4.0, 0, 1).unwrap();
        let u = Element::new(s, 0, vec![0.6, 0.3]).unwrap();
        let seq = Seq::with_half_tail(vec![u.clone(); 4]).unwrap();
        let r = delta_energy_bound(&seq, &u, 1e-12).unwrap();
        let n = u.norm();
        assert!((r.margin - (n - delta_clamped(4.0, n))).abs() < 1e-15);
        assert!(r.holds);
        let r = hilbert_identity(
            &Seq::with_half_tail(vec![u.with_exponent(2.0).unwrap(); 4]).unwrap(),
            &u.with_exponent(2.0).unwrap(),
            1e-12,
        )
        .unwrap();
        assert!(r.holds);
        assert!(hilbert_identity(&seq, &u, 1e-12).is_err());
    }

    #[test]
    fn unnormalized_energy_input_errors() {
        let s = Space::sequence(4.0, 0, 0).unwrap();
        let x = Element::new(s, 0, vec![1.5]).unwrap();
        let seq = Seq::with_half_tail(vec![x.clone(); 2]).unwrap();
        assert!(delta_energy_bound(&seq, &Element::zeros(s, 0).unwrap(), 1e-9).is_err());
    }

    #[test]
    fn nonadditivity_is_certified() {
        let r = nonadditivity_demo(&[3, 4, 5, 6, 7, 8, 9, 10, 11, 12], 1e-3).unwrap();
        assert_eq!(r.limit_constant, -3.0);
        assert!(r.x_cubed_null && r.y_cubed_null && r.sum_cubed_nonzero);
    }
}
