//! Discretized ambient spaces and their elements.
//!
//! A [`Space`] is either a window of integer sites carrying the counting
//! measure (ℓᵖ) or a bounded interval of the real line partitioned into dyadic
//! cells (Lᵖ of piecewise-constant functions). Grid elements carry their own
//! refinement level; combining two elements first refines both to the finer
//! level, which duplicates coefficients and therefore preserves the function
//! exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest number of cells a single element may allocate.
pub const MAX_CELLS: usize = 1 << 24;

/// Largest refinement level accepted for grid elements.
pub const MAX_LEVEL: u32 = 40;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Geometry {
    /// Integer sites `first..=last`, each of unit mass.
    Sequence { first: i64, last: i64 },
    /// Interval `[start, end)` split into cells of width `2^-level`,
    /// `level >= base_level`. Both endpoints are multiples of `2^-base_level`.
    Grid {
        start: f64,
        end: f64,
        base_level: u32,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpace", into = "RawSpace")]
pub struct Space {
    p: f64,
    geometry: Geometry,
}

#[derive(Serialize, Deserialize)]
struct RawSpace {
    p: f64,
    geometry: Geometry,
}

impl TryFrom<RawSpace> for Space {
    type Error = Error;

    fn try_from(raw: RawSpace) -> Result<Self> {
        match raw.geometry {
            Geometry::Sequence { first, last } => Space::sequence(raw.p, first, last),
            Geometry::Grid {
                start,
                end,
                base_level,
            } => Space::grid(raw.p, start, end, base_level),
        }
    }
}

impl From<Space> for RawSpace {
    fn from(space: Space) -> Self {
        RawSpace {
            p: space.p,
            geometry: space.geometry,
        }
    }
}

fn check_exponent(p: f64) -> Result<()> {
    if p.is_finite() && p > 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidExponent(p))
    }
}

/// Smallest level `L` such that `x * 2^L` is an integer, if one exists below
/// [`MAX_LEVEL`].
pub fn dyadic_level(x: f64) -> Option<u32> {
    if !x.is_finite() {
        return None;
    }
    (0..=MAX_LEVEL).find(|&l| {
        let scaled = x * pow2(l as i32);
        scaled.fract() == 0.0 && scaled.abs() < 9.0e15
    })
}

/// `2^e` for moderate integer `e`, exact in floating point.
pub fn pow2(e: i32) -> f64 {
    (2.0f64).powi(e)
}

/// Converts an exactly representable dyadic position to an integer index.
pub(crate) fn exact_index(x: f64) -> Option<i64> {
    if x.fract() == 0.0 && x.abs() < 9.0e15 {
        Some(x as i64)
    } else {
        None
    }
}

impl Space {
    pub fn sequence(p: f64, first: i64, last: i64) -> Result<Self> {
        check_exponent(p)?;
        if last < first {
            return Err(Error::InvalidSpace(format!(
                "empty index window [{first}, {last}]"
            )));
        }
        if (last - first) as u64 + 1 > MAX_CELLS as u64 {
            return Err(Error::ResolutionLimit(format!(
                "index window [{first}, {last}] is too large"
            )));
        }
        Ok(Space {
            p,
            geometry: Geometry::Sequence { first, last },
        })
    }

    pub fn grid(p: f64, start: f64, end: f64, base_level: u32) -> Result<Self> {
        check_exponent(p)?;
        if !(start.is_finite() && end.is_finite() && start < end) {
            return Err(Error::InvalidSpace(format!(
                "interval [{start}, {end}) is empty or not finite"
            )));
        }
        if base_level > MAX_LEVEL {
            return Err(Error::InvalidSpace(format!(
                "base level {base_level} exceeds {MAX_LEVEL}"
            )));
        }
        let scale = pow2(base_level as i32);
        if exact_index(start * scale).is_none() || exact_index(end * scale).is_none() {
            return Err(Error::InvalidSpace(format!(
                "endpoints {start}, {end} are not multiples of 2^-{base_level}"
            )));
        }
        let space = Space {
            p,
            geometry: Geometry::Grid {
                start,
                end,
                base_level,
            },
        };
        space.cell_count(base_level)?;
        Ok(space)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Conjugate exponent `p / (p - 1)`.
    pub fn dual_exponent(&self) -> f64 {
        self.p / (self.p - 1.0)
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn is_grid(&self) -> bool {
        matches!(self.geometry, Geometry::Grid { .. })
    }

    /// Same geometry with another exponent.
    pub fn with_exponent(&self, p: f64) -> Result<Self> {
        check_exponent(p)?;
        Ok(Space {
            p,
            geometry: self.geometry,
        })
    }

    /// Coarsest admissible level (always 0 for sequence spaces).
    pub fn base_level(&self) -> u32 {
        match self.geometry {
            Geometry::Sequence { .. } => 0,
            Geometry::Grid { base_level, .. } => base_level,
        }
    }

    /// Extent of the window as a half-open real interval. Site `i` of a
    /// sequence space occupies `[i, i + 1)`.
    pub fn extent(&self) -> (f64, f64) {
        match self.geometry {
            Geometry::Sequence { first, last } => (first as f64, last as f64 + 1.0),
            Geometry::Grid { start, end, .. } => (start, end),
        }
    }

    pub fn diameter(&self) -> f64 {
        let (a, b) = self.extent();
        b - a
    }

    /// Number of cells at `level`.
    pub fn cell_count(&self, level: u32) -> Result<usize> {
        match self.geometry {
            Geometry::Sequence { first, last } => {
                if level != 0 {
                    return Err(Error::InvalidSpace(
                        "sequence spaces have a single level".into(),
                    ));
                }
                Ok((last - first + 1) as usize)
            }
            Geometry::Grid {
                start,
                end,
                base_level,
            } => {
                if level < base_level || level > MAX_LEVEL {
                    return Err(Error::InvalidSpace(format!(
                        "level {level} outside [{base_level}, {MAX_LEVEL}]"
                    )));
                }
                let n = (end - start) * pow2(level as i32);
                if n > MAX_CELLS as f64 {
                    return Err(Error::ResolutionLimit(format!(
                        "{n} cells at level {level} exceed {MAX_CELLS}"
                    )));
                }
                Ok(n as usize)
            }
        }
    }

    /// Measure of one cell at `level`.
    pub fn cell_measure(&self, level: u32) -> f64 {
        match self.geometry {
            Geometry::Sequence { .. } => 1.0,
            Geometry::Grid { .. } => pow2(-(level as i32)),
        }
    }

    /// Left endpoint of the window at cell resolution.
    pub(crate) fn origin(&self) -> f64 {
        self.extent().0
    }

    /// Half-open interval covered by cell `i` at `level`.
    pub fn cell_interval(&self, level: u32, i: usize) -> (f64, f64) {
        let h = self.cell_measure(level);
        let a = self.origin() + i as f64 * h;
        (a, a + h)
    }

    /// Whether both spaces share exponent and geometry.
    pub fn same_as(&self, other: &Space) -> bool {
        self == other
    }

    fn check_same(&self, other: &Space) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GeometryMismatch)
        }
    }
}

/// A vector of cell values over a [`Space`] at a fixed refinement level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Element {
    space: Space,
    level: u32,
    coeffs: Vec<f64>,
}

impl Element {
    pub fn zeros(space: Space, level: u32) -> Result<Self> {
        let n = space.cell_count(level)?;
        Ok(Element {
            space,
            level,
            coeffs: vec![0.0; n],
        })
    }

    pub fn new(space: Space, level: u32, coeffs: Vec<f64>) -> Result<Self> {
        let n = space.cell_count(level)?;
        if coeffs.len() != n {
            return Err(Error::LengthMismatch {
                left: coeffs.len(),
                right: n,
            });
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("non-finite coefficient".into()));
        }
        Ok(Element {
            space,
            level,
            coeffs,
        })
    }

    /// Element whose value on each cell is `f(a, b)` for the cell `[a, b)`.
    pub fn from_cells(space: Space, level: u32, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let n = space.cell_count(level)?;
        let coeffs = (0..n)
            .map(|i| {
                let (a, b) = space.cell_interval(level, i);
                f(a, b)
            })
            .collect();
        Element::new(space, level, coeffs)
    }

    /// `value` times the indicator of `[a, b)`. For sequence spaces this covers
    /// the sites `i` with `a <= i < b`.
    pub fn indicator(space: Space, a: f64, b: f64, value: f64) -> Result<Self> {
        if !(a < b) {
            return Err(Error::InvalidInput(format!("empty interval [{a}, {b})")));
        }
        let level = match space.geometry() {
            Geometry::Sequence { .. } => 0,
            Geometry::Grid { base_level, .. } => {
                let la = dyadic_level(a)
                    .ok_or_else(|| Error::InvalidInput(format!("{a} is not a dyadic rational")))?;
                let lb = dyadic_level(b)
                    .ok_or_else(|| Error::InvalidInput(format!("{b} is not a dyadic rational")))?;
                base_level.max(la).max(lb)
            }
        };
        Element::from_cells(
            space,
            level,
            |lo, hi| {
                if lo >= a && hi <= b {
                    value
                } else {
                    0.0
                }
            },
        )
    }

    /// Unit vector at site `i` of a sequence space.
    pub fn basis(space: Space, i: i64) -> Result<Self> {
        match space.geometry() {
            Geometry::Sequence { first, last } if (first..=last).contains(&i) => {
                let mut e = Element::zeros(space, 0)?;
                e.coeffs[(i - first) as usize] = 1.0;
                Ok(e)
            }
            Geometry::Sequence { .. } => Err(Error::WindowOverflow(format!(
                "site {i} outside the index window"
            ))),
            Geometry::Grid { .. } => Err(Error::InvalidInput(
                "basis vectors exist only in sequence spaces".into(),
            )),
        }
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn cell_measure(&self) -> f64 {
        self.space.cell_measure(self.level)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// Same function at a finer level.
    pub fn refine(&self, level: u32) -> Result<Self> {
        if level == self.level {
            return Ok(self.clone());
        }
        if level < self.level {
            return Err(Error::InvalidInput(format!(
                "cannot refine from level {} down to {level}",
                self.level
            )));
        }
        let n = self.space.cell_count(level)?;
        let shift = level - self.level;
        let coeffs = (0..n).map(|i| self.coeffs[i >> shift]).collect();
        Ok(Element {
            space: self.space,
            level,
            coeffs,
        })
    }

    /// Exact representation at the coarsest level that loses nothing.
    pub fn simplified(&self) -> Self {
        let mut out = self.clone();
        while out.level > out.space.base_level()
            && out.coeffs.len().is_multiple_of(2)
            && out.coeffs.chunks(2).all(|c| c[0] == c[1])
        {
            out.coeffs = out.coeffs.chunks(2).map(|c| c[0]).collect();
            out.level -= 1;
        }
        out
    }

    fn combine(&self, other: &Element, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.space.check_same(&other.space)?;
        let level = self.level.max(other.level);
        let n = self.space.cell_count(level)?;
        let sa = level - self.level;
        let sb = level - other.level;
        let coeffs = (0..n)
            .map(|i| f(self.coeffs[i >> sa], other.coeffs[i >> sb]))
            .collect();
        Ok(Element {
            space: self.space,
            level,
            coeffs,
        })
    }

    pub fn add(&self, other: &Element) -> Result<Self> {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Element) -> Result<Self> {
        self.combine(other, |a, b| a - b)
    }

    /// `self + t * other`.
    pub fn axpy(&self, t: f64, other: &Element) -> Result<Self> {
        self.combine(other, |a, b| a + t * b)
    }

    pub fn scaled(&self, t: f64) -> Self {
        self.map(|c| c * t)
    }

    /// Pointwise image under `f` (for example cubes of the values).
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Element {
            space: self.space,
            level: self.level,
            coeffs: self.coeffs.iter().map(|&c| f(c)).collect(),
        }
    }

    /// Same coefficients regarded in the space with exponent `p`.
    pub fn with_exponent(&self, p: f64) -> Result<Self> {
        Ok(Element {
            space: self.space.with_exponent(p)?,
            level: self.level,
            coeffs: self.coeffs.clone(),
        })
    }

    /// `∫ |x|^q dμ`.
    pub fn power_integral(&self, q: f64) -> f64 {
        let mu = self.cell_measure();
        let pw = power(q);
        self.coeffs.iter().map(|c| pw(c.abs())).sum::<f64>() * mu
    }

    /// `∫ x dμ`.
    pub fn integral(&self) -> f64 {
        self.coeffs.iter().sum::<f64>() * self.cell_measure()
    }

    /// Norm of the ambient Lᵖ / ℓᵖ space.
    pub fn norm(&self) -> f64 {
        lp_norm(&self.coeffs, self.space.p, self.cell_measure())
    }

    /// Largest absolute coefficient.
    pub fn sup_norm(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Norm of `self - other`.
    pub fn distance(&self, other: &Element) -> Result<f64> {
        Ok(self.sub(other)?.norm())
    }

    /// Largest cell-wise difference after alignment.
    pub fn max_abs_diff(&self, other: &Element) -> Result<f64> {
        Ok(self.sub(other)?.sup_norm())
    }

    /// Running integral, used for exact integrals over dyadic intervals.
    pub fn cumulative(&self) -> Cumulative {
        Cumulative::new(self)
    }
}

/// `t ↦ t^e` for `t ≥ 0`, by repeated multiplication when `e` is a small
/// integer.
pub(crate) fn power(e: f64) -> impl Fn(f64) -> f64 {
    let int = (e.fract() == 0.0 && (0.0..=16.0).contains(&e)).then_some(e as i32);
    move |t| match int {
        Some(k) => t.powi(k),
        None => t.powf(e),
    }
}

/// `(Σ |c_i|^p μ)^{1/p}`, computed with rescaling against overflow.
pub(crate) fn lp_norm(coeffs: &[f64], p: f64, mu: f64) -> f64 {
    let m = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if m == 0.0 {
        return 0.0;
    }
    let pw = power(p);
    let s: f64 = coeffs.iter().map(|c| pw(c.abs() / m)).sum();
    m * (s * mu).powf(1.0 / p)
}

/// Prefix sums of an element, giving `∫_a^b x` for any interval in `O(1)`.
#[derive(Clone, Debug)]
pub struct Cumulative {
    origin: f64,
    level: u32,
    cell: f64,
    values: Vec<f64>,
    prefix: Vec<f64>,
}

impl Cumulative {
    fn new(x: &Element) -> Self {
        let cell = x.cell_measure();
        let mut prefix = Vec::with_capacity(x.coeffs.len() + 1);
        let mut acc = 0.0;
        prefix.push(0.0);
        for &c in &x.coeffs {
            acc += c * cell;
            prefix.push(acc);
        }
        Cumulative {
            origin: x.space.origin(),
            level: x.level,
            cell,
            values: x.coeffs.clone(),
            prefix,
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// `∫_{origin}^{t} x`, with `x = 0` outside the window.
    fn at(&self, t: f64) -> f64 {
        let n = self.values.len();
        let pos = (t - self.origin) / self.cell;
        if pos <= 0.0 {
            return 0.0;
        }
        if pos >= n as f64 {
            return self.prefix[n];
        }
        let i = pos.floor() as usize;
        let frac = pos - i as f64;
        self.prefix[i] + frac * self.values[i] * self.cell
    }

    /// `∫_a^b x`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        self.at(b) - self.at(a)
    }

    /// Mean value over `[a, b)`.
    pub fn average(&self, a: f64, b: f64) -> f64 {
        self.integral(a, b) / (b - a)
    }
}

/// An element of the dual space, exponent `p' = p / (p - 1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualElement {
    space: Space,
    level: u32,
    coeffs: Vec<f64>,
}

impl DualElement {
    /// Dual element over the primal space `space`.
    pub fn new(space: Space, level: u32, coeffs: Vec<f64>) -> Result<Self> {
        let x = Element::new(space, level, coeffs)?;
        Ok(DualElement {
            space: x.space,
            level: x.level,
            coeffs: x.coeffs,
        })
    }

    /// Primal space this functional acts on.
    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn exponent(&self) -> f64 {
        self.space.dual_exponent()
    }

    /// Norm in the dual exponent.
    pub fn norm(&self) -> f64 {
        lp_norm(
            &self.coeffs,
            self.exponent(),
            self.space.cell_measure(self.level),
        )
    }

    /// Same values read as a primal element (for dual-space arithmetic).
    pub fn to_values(&self) -> Element {
        Element {
            space: self.space,
            level: self.level,
            coeffs: self.coeffs.clone(),
        }
    }
}

/// `Σ v_i x_i μ_i` after aligning both to the finer level.
pub fn pairing(v: &DualElement, x: &Element) -> Result<f64> {
    v.space.check_same(&x.space)?;
    Ok(weighted_dot(
        &v.space, v.level, &v.coeffs, x.level, &x.coeffs,
    ))
}

/// `Σ a_i b_i μ_i` over the finer of two levels of the same space.
pub(crate) fn weighted_dot(space: &Space, la: u32, a: &[f64], lb: u32, b: &[f64]) -> f64 {
    let level = la.max(lb);
    let mu = space.cell_measure(level);
    let (fine, fine_level, coarse, coarse_level) = if la >= lb {
        (a, la, b, lb)
    } else {
        (b, lb, a, la)
    };
    let shift = fine_level - coarse_level;
    fine.iter()
        .enumerate()
        .map(|(i, f)| f * coarse[i >> shift])
        .sum::<f64>()
        * mu
}

/// Duality conjugate `sign(x)|x|^{p-1} / ‖x‖^{p-1}`.
pub fn duality_conjugate(x: &Element) -> Result<DualElement> {
    let n = x.norm();
    if n == 0.0 {
        return Err(Error::ZeroElement);
    }
    let pw = power(x.space.p - 1.0);
    let coeffs = x
        .coeffs
        .iter()
        .map(|&c| c.signum() * pw(c.abs() / n))
        .map(|c| if c == 0.0 { 0.0 } else { c })
        .collect();
    Ok(DualElement {
        space: x.space,
        level: x.level,
        coeffs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l2() -> Space {
        Space::sequence(2.0, 0, 1).unwrap()
    }

    #[test]
    fn pythagorean_norm() {
        let x = Element::new(l2(), 0, vec![3.0, 4.0]).unwrap();
        assert_eq!(x.norm(), 5.0);
    }

    #[test]
    fn unit_indicator_norm() {
        let s = Space::grid(4.0, 0.0, 1.0, 0).unwrap();
        let x = Element::indicator(s, 0.0, 1.0, 1.0).unwrap();
        assert_eq!(x.norm(), 1.0);
    }

    #[test]
    fn scaled_small_indicator_has_unit_l3_norm() {
        let s = Space::grid(3.0, 0.0, 1.0, 0).unwrap();
        let x = Element::indicator(s, 0.0, 0.125, 2.0).unwrap();
        assert_eq!(x.level(), 3);
        assert!((x.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pairings_of_indicators() {
        let s = Space::grid(2.0, 0.0, 2.0, 0).unwrap();
        let a = Element::indicator(s, 0.0, 1.0, 1.0).unwrap();
        let b = Element::indicator(s, 1.0, 2.0, 1.0).unwrap();
        let va = DualElement::new(s, a.level(), a.coeffs().to_vec()).unwrap();
        assert_eq!(pairing(&va, &a).unwrap(), 1.0);
        assert_eq!(pairing(&va, &b).unwrap(), 0.0);
    }

    #[test]
    fn conjugate_of_pythagorean_pair() {
        let x = Element::new(l2(), 0, vec![3.0, 4.0]).unwrap();
        let c = duality_conjugate(&x).unwrap();
        assert!((c.coeffs()[0] - 0.6).abs() < 1e-15);
        assert!((c.coeffs()[1] - 0.8).abs() < 1e-15);
        assert!((pairing(&c, &x).unwrap() - 5.0).abs() < 1e-14);
        assert!((c.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn conjugate_of_constant_is_indicator() {
        let s = Space::grid(4.0, 0.0, 1.0, 0).unwrap();
        let x = Element::indicator(s, 0.0, 1.0, 3.7).unwrap();
        let c = duality_conjugate(&x).unwrap();
        assert!(c.coeffs().iter().all(|&v| (v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn conjugate_in_l3() {
        let s = Space::sequence(3.0, 0, 1).unwrap();
        let x = Element::new(s, 0, vec![1.0, -1.0]).unwrap();
        let c = duality_conjugate(&x).unwrap();
        let expected = 2f64.powf(-2.0 / 3.0);
        assert!((c.coeffs()[0] - expected).abs() < 1e-15);
        assert!((c.coeffs()[1] + expected).abs() < 1e-15);
    }

    #[test]
    fn conjugate_of_zero_is_an_error() {
        let x = Element::zeros(l2(), 0).unwrap();
        assert!(matches!(duality_conjugate(&x), Err(Error::ZeroElement)));
    }

    #[test]
    fn mismatched_geometry_is_rejected() {
        let a = Element::new(l2(), 0, vec![1.0, 0.0]).unwrap();
        let other = Space::sequence(2.0, 0, 2).unwrap();
        let v = DualElement::new(other, 0, vec![1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(pairing(&v, &a), Err(Error::GeometryMismatch)));
        let b = Element::zeros(other, 0).unwrap();
        assert!(a.add(&b).is_err());
    }

    #[test]
    fn refinement_preserves_norm_and_integral() {
        let s = Space::grid(3.0, -1.0, 2.0, 0).unwrap();
        let x = Element::new(s, 1, vec![1.0, -2.0, 0.5, 0.0, 3.0, 1.0]).unwrap();
        let y = x.refine(4).unwrap();
        assert!((x.norm() - y.norm()).abs() < 1e-14);
        assert!((x.integral() - y.integral()).abs() < 1e-14);
        assert_eq!(y.simplified(), x);
    }

    #[test]
    fn cumulative_integrates_partial_cells() {
        let s = Space::grid(2.0, 0.0, 4.0, 0).unwrap();
        let x = Element::new(s, 0, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let c = x.cumulative();
        assert_eq!(c.integral(0.5, 2.5), 0.5 + 2.0 + 1.5);
        assert_eq!(c.integral(-3.0, 10.0), 10.0);
    }

    #[test]
    fn rejects_bad_spaces() {
        assert!(Space::sequence(1.0, 0, 3).is_err());
        assert!(Space::grid(2.0, 0.0, 0.3, 2).is_err());
        assert!(Space::grid(2.0, 1.0, 1.0, 0).is_err());
    }
}
