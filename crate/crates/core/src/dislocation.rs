//! Dyadic dilation and shift isometries.
//!
//! On a grid space the dislocation `(m, y)` acts by
//! `(g u)(x) = 2^{m/p} u(2^m x - y)`; on a sequence space only `m = 0` is
//! allowed and `y` is an integer index shift. Shifts are dyadic rationals, so
//! every composition and inverse stays exact in floating point.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{dyadic_level, exact_index, pow2, Cumulative, Element, Geometry, Space};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dislocation {
    /// Dyadic dilation exponent `m`.
    pub scale: i32,
    /// Shift `y`, in units of the dilated reference window.
    pub shift: f64,
}

impl Dislocation {
    pub const IDENTITY: Dislocation = Dislocation {
        scale: 0,
        shift: 0.0,
    };

    pub fn new(scale: i32, shift: f64) -> Self {
        Dislocation { scale, shift }
    }

    pub fn translation(shift: f64) -> Self {
        Dislocation { scale: 0, shift }
    }

    pub fn dilation(scale: i32) -> Self {
        Dislocation { scale, shift: 0.0 }
    }

    pub fn is_identity(&self) -> bool {
        self.scale == 0 && self.shift == 0.0
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Dislocation) -> Dislocation {
        Dislocation {
            scale: self.scale + other.scale,
            shift: pow2(other.scale) * self.shift + other.shift,
        }
    }

    pub fn inverse(&self) -> Dislocation {
        let shift = -self.shift * pow2(-self.scale);
        Dislocation {
            scale: -self.scale,
            shift: if shift == 0.0 { 0.0 } else { shift },
        }
    }

    /// Image of the reference window `[0, 1)`.
    pub fn reference_image(&self) -> (f64, f64) {
        let w = pow2(-self.scale);
        (self.shift * w, (self.shift + 1.0) * w)
    }

    /// Whether the image of the reference window has left it, either by a
    /// change of scale or by a translation clearing it.
    pub fn escapes_reference(&self) -> bool {
        self.scale != 0 || self.shift.abs() >= 1.0
    }
}

pub fn compose(g: &Dislocation, h: &Dislocation) -> Dislocation {
    g.compose(h)
}

pub fn inverse(g: &Dislocation) -> Dislocation {
    g.inverse()
}

/// `g · u` in the space of `u`.
pub fn apply(g: &Dislocation, u: &Element) -> Result<Element> {
    apply_into(g, u, u.space())
}

/// `g · u` represented in `target`, a space of the same kind and exponent.
/// Fails with a window overflow if a nonzero cell lands outside `target`.
pub fn apply_into(g: &Dislocation, u: &Element, target: &Space) -> Result<Element> {
    transport(g, u, target, false)
}

/// `g · u` restricted to the window of `target`; cells landing outside are
/// dropped.
pub fn apply_restricted(g: &Dislocation, u: &Element, target: &Space) -> Result<Element> {
    transport(g, u, target, true)
}

fn transport(g: &Dislocation, u: &Element, target: &Space, restrict: bool) -> Result<Element> {
    if u.space().p() != target.p() {
        return Err(Error::GeometryMismatch);
    }
    match (u.space().geometry(), target.geometry()) {
        (Geometry::Sequence { first, .. }, Geometry::Sequence { first: t_first, .. }) => {
            if g.scale != 0 {
                return Err(Error::InvalidInput(
                    "sequence spaces admit only shifts".into(),
                ));
            }
            let y = exact_index(g.shift).ok_or_else(|| {
                Error::InvalidInput(format!("shift {} is not an integer", g.shift))
            })?;
            let mut out = Element::zeros(*target, 0)?;
            let n = out.coeffs().len() as i64;
            let offset = first + y - t_first;
            let coeffs = out.coeffs_mut();
            for (i, &c) in u.coeffs().iter().enumerate() {
                if c == 0.0 {
                    continue;
                }
                let j = i as i64 + offset;
                if (j < 0 || j >= n) && restrict {
                    continue;
                }
                if j < 0 || j >= n {
                    return Err(Error::WindowOverflow(format!(
                        "site {} shifted by {y} leaves the window",
                        first + i as i64
                    )));
                }
                coeffs[j as usize] = c;
            }
            Ok(out)
        }
        (
            Geometry::Grid { start, .. },
            Geometry::Grid {
                start: t_start,
                base_level,
                ..
            },
        ) => {
            let shift_level = dyadic_level(g.shift)
                .ok_or_else(|| Error::InvalidInput(format!("shift {} is not dyadic", g.shift)))?
                as i64;
            let level_in = (u.level() as i64)
                .max(shift_level)
                .max(base_level as i64 - g.scale as i64);
            let level_out = level_in + g.scale as i64;
            if level_out < 0 || level_in > crate::space::MAX_LEVEL as i64 {
                return Err(Error::ResolutionLimit(format!(
                    "dislocation {g:?} needs level {level_in}"
                )));
            }
            let (level_in, level_out) = (level_in as u32, level_out as u32);
            let mut out = Element::zeros(*target, level_out)?;
            let n_out = out.coeffs().len() as i64;
            let to_int = |x: f64| {
                exact_index(x).ok_or_else(|| {
                    Error::ResolutionLimit(format!("position {x} is not representable"))
                })
            };
            let offset = to_int((start + g.shift) * pow2(level_in as i32))?
                - to_int(t_start * pow2(level_out as i32))?;
            let refine = 1i64 << (level_in - u.level());
            let factor = pow2(g.scale).powf(1.0 / u.space().p());
            let coeffs = out.coeffs_mut();
            for (c, &v) in u.coeffs().iter().enumerate() {
                if v == 0.0 {
                    continue;
                }
                let lo = c as i64 * refine + offset;
                let hi = lo + refine;
                if restrict {
                    for slot in
                        &mut coeffs[lo.clamp(0, n_out) as usize..hi.clamp(0, n_out) as usize]
                    {
                        *slot = factor * v;
                    }
                    continue;
                }
                if lo < 0 || hi > n_out {
                    let (a, b) = u.space().cell_interval(u.level(), c);
                    return Err(Error::WindowOverflow(format!(
                        "cell [{a}, {b}) under {g:?} leaves the target window"
                    )));
                }
                for slot in &mut coeffs[lo as usize..hi as usize] {
                    *slot = factor * v;
                }
            }
            Ok(out)
        }
        _ => Err(Error::GeometryMismatch),
    }
}

/// Per-index gauges decorating a sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DislocationPath {
    pub gauges: Vec<Dislocation>,
}

impl DislocationPath {
    pub fn new(gauges: Vec<Dislocation>) -> Self {
        DislocationPath { gauges }
    }

    pub fn identity(len: usize) -> Self {
        DislocationPath {
            gauges: vec![Dislocation::IDENTITY; len],
        }
    }

    pub fn len(&self) -> usize {
        self.gauges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gauges.is_empty()
    }

    pub fn get(&self, k: usize) -> Dislocation {
        self.gauges[k]
    }

    pub fn is_identity(&self) -> bool {
        self.gauges.iter().all(Dislocation::is_identity)
    }

    /// The common gauge of `gauges[from..]`, if there is one.
    pub fn constant_from(&self, from: usize) -> Option<Dislocation> {
        let first = *self.gauges.get(from)?;
        self.gauges[from..]
            .iter()
            .all(|g| *g == first)
            .then_some(first)
    }
}

/// `k ↦ inverse(a_k) ∘ b_k`.
pub fn relative_path(a: &DislocationPath, b: &DislocationPath) -> Result<DislocationPath> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(DislocationPath::new(
        a.gauges
            .iter()
            .zip(&b.gauges)
            .map(|(ga, gb)| ga.inverse().compose(gb))
            .collect(),
    ))
}

/// Finite-data test for `g_k ⇀ 0`.
///
/// Over the tail (the last half of the path) every gauge must move the
/// reference window off itself, and no gauge may repeat: a repeated value is
/// the finite trace of a constant, hence strongly convergent, subsequence.
pub fn path_weak_null(path: &DislocationPath) -> bool {
    let n = path.len();
    if n == 0 {
        return false;
    }
    let tail = &path.gauges[n - (n / 2).max(1)..];
    if !tail.iter().all(Dislocation::escapes_reference) {
        return false;
    }
    tail.iter()
        .enumerate()
        .all(|(i, g)| tail[i + 1..].iter().all(|h| h != g))
}

/// Search bounds for the concentration locator and the local window in which
/// recentred elements are observed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchGrid {
    /// Scales `m` range over `[-max_scale, max_scale]`.
    pub max_scale: u32,
    /// Recentred elements are observed on `[-r, r + 1)` (sites `-r..=r`).
    pub view_radius: u32,
    /// Refinement level of the observation window.
    pub view_level: u32,
}

impl SearchGrid {
    pub fn new(max_scale: u32) -> Self {
        SearchGrid {
            max_scale,
            view_radius: 1,
            view_level: 2,
        }
    }

    /// Space in which profiles are observed, with the exponent of `ambient`.
    pub fn view_space(&self, ambient: &Space) -> Result<Space> {
        let r = self.view_radius as i64;
        match ambient.geometry() {
            Geometry::Sequence { .. } => Space::sequence(ambient.p(), -r, r),
            Geometry::Grid { .. } => Space::grid(ambient.p(), -(r as f64), r as f64 + 1.0, 0),
        }
    }

    pub fn view_level_for(&self, ambient: &Space) -> u32 {
        if ambient.is_grid() {
            self.view_level
        } else {
            0
        }
    }
}

/// Best gauge found by [`locate`], with its score.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Located {
    pub gauge: Dislocation,
    pub score: f64,
}

fn better(candidate: (f64, Dislocation), best: &Option<(f64, Dislocation)>) -> bool {
    let Some((best_score, best_g)) = best else {
        return true;
    };
    let tol = 1e-12 * best_score.abs().max(candidate.0.abs());
    if candidate.0 > best_score + tol {
        return true;
    }
    if candidate.0 < best_score - tol {
        return false;
    }
    let key = |g: &Dislocation| (g.scale.unsigned_abs(), g.shift.abs(), g.shift);
    let (a, b) = (key(&candidate.1), key(best_g));
    (a.0, a.1, a.2).partial_cmp(&(b.0, b.1, b.2)) == Some(std::cmp::Ordering::Less)
}

/// Gauge `g` maximising the p-mass of the unit-window average of `g⁻¹ u`,
/// i.e. `2^{-m} |avg_{g[0,1)} u|^p`, over scales `|m| <= max_scale` and
/// integer shifts. Ties go to the smallest `|m|`, then the smallest `|y|`.
pub fn concentration_locator(u: &Element, grid: &SearchGrid) -> Result<Dislocation> {
    Ok(locate(u, &u.cumulative(), grid)?.gauge)
}

/// [`concentration_locator`] with a precomputed running integral of `u`.
pub fn locate(u: &Element, cumulative: &Cumulative, grid: &SearchGrid) -> Result<Located> {
    if u.is_zero() {
        return Err(Error::ZeroElement);
    }
    let p = u.space().p();
    let mut best: Option<(f64, Dislocation)> = None;
    match u.space().geometry() {
        Geometry::Sequence { first, .. } => {
            for (i, &c) in u.coeffs().iter().enumerate() {
                let cand = (
                    c.abs().powf(p),
                    Dislocation::translation((first + i as i64) as f64),
                );
                if better(cand, &best) {
                    best = Some(cand);
                }
            }
        }
        Geometry::Grid { start, end, .. } => {
            let top = (grid.max_scale as i64).min(u.level() as i64) as i32;
            for m in -(grid.max_scale as i32)..=top {
                let w = pow2(-m);
                let y_lo = (start / w).floor() as i64;
                let y_hi = (end / w).ceil() as i64;
                let weight = pow2(m).powf(p - 1.0);
                for y in y_lo..y_hi {
                    let a = y as f64 * w;
                    let integral = cumulative.integral(a, a + w);
                    let cand = (
                        integral.abs().powf(p) * weight,
                        Dislocation::new(m, y as f64),
                    );
                    if better(cand, &best) {
                        best = Some(cand);
                    }
                }
            }
        }
    }
    let (score, gauge) = best.ok_or(Error::ZeroElement)?;
    Ok(Located { gauge, score })
}

/// Local observation of `g⁻¹ u`, averaged onto the cells of a fixed view
/// space at a fixed level.
#[derive(Clone, Copy, Debug)]
pub struct LocalView {
    pub space: Space,
    pub level: u32,
}

impl LocalView {
    pub fn new(grid: &SearchGrid, ambient: &Space) -> Result<Self> {
        Ok(LocalView {
            space: grid.view_space(ambient)?,
            level: grid.view_level_for(ambient),
        })
    }

    /// Cell averages of `g⁻¹ u` on the view, with `u = 0` outside its window.
    pub fn observe(
        &self,
        g: &Dislocation,
        u: &Element,
        cumulative: &Cumulative,
    ) -> Result<Element> {
        match (u.space().geometry(), self.space.geometry()) {
            (Geometry::Sequence { first, last }, Geometry::Sequence { first: vf, .. }) => {
                let y = exact_index(g.shift).ok_or_else(|| {
                    Error::InvalidInput(format!("shift {} is not an integer", g.shift))
                })?;
                let n = self.space.cell_count(0)?;
                let coeffs = (0..n)
                    .map(|i| {
                        let site = vf + i as i64 + y;
                        if (first..=last).contains(&site) {
                            u.coeffs()[(site - first) as usize]
                        } else {
                            0.0
                        }
                    })
                    .collect();
                Element::new(self.space, 0, coeffs)
            }
            (Geometry::Grid { .. }, Geometry::Grid { .. }) => {
                let factor = pow2(-g.scale).powf(1.0 / u.space().p());
                let inv = pow2(-g.scale);
                Element::from_cells(self.space, self.level, |a, b| {
                    let lo = (a + g.shift) * inv;
                    let hi = (b + g.shift) * inv;
                    factor * cumulative.average(lo, hi)
                })
            }
            _ => Err(Error::GeometryMismatch),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l4_line(a: f64, b: f64) -> Space {
        Space::grid(4.0, a, b, 0).unwrap()
    }

    #[test]
    fn dilation_of_unit_indicator() {
        let s = l4_line(0.0, 2.0);
        let u = Element::indicator(s, 0.0, 1.0, 1.0).unwrap();
        let v = apply(&Dislocation::new(1, 0.0), &u).unwrap();
        let expected = Element::indicator(s, 0.0, 0.5, 2f64.powf(0.25)).unwrap();
        assert!(v.max_abs_diff(&expected).unwrap() < 1e-15);
        assert!((v.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sequence_shift() {
        let s = Space::sequence(2.0, 0, 5).unwrap();
        let e0 = Element::basis(s, 0).unwrap();
        let v = apply(&Dislocation::translation(3.0), &e0).unwrap();
        assert_eq!(v, Element::basis(s, 3).unwrap());
        assert_eq!(apply(&Dislocation::IDENTITY, &e0).unwrap(), e0);
        assert!(matches!(
            apply(&Dislocation::translation(6.0), &e0),
            Err(Error::WindowOverflow(_))
        ));
    }

    #[test]
    fn overflow_on_grid() {
        let s = l4_line(0.0, 2.0);
        let u = Element::indicator(s, 0.0, 1.0, 1.0).unwrap();
        assert!(matches!(
            apply(&Dislocation::new(-1, 0.0), &u)
                .and_then(|v| apply(&Dislocation::translation(1.0), &v)),
            Err(Error::WindowOverflow(_))
        ));
    }

    #[test]
    fn group_laws() {
        let g = Dislocation::new(1, 3.0);
        assert_eq!(g.inverse().compose(&g), Dislocation::IDENTITY);
        assert_eq!(g.compose(&g.inverse()), Dislocation::IDENTITY);
        assert_eq!(
            Dislocation::dilation(1).compose(&Dislocation::dilation(1)),
            Dislocation::dilation(2)
        );
        assert_eq!(
            Dislocation::translation(2.5).compose(&Dislocation::translation(-4.0)),
            Dislocation::translation(-1.5)
        );
    }

    #[test]
    fn composition_matches_sequential_application() {
        let s = l4_line(-8.0, 8.0);
        let u = Element::new(
            s,
            1,
            (0..32)
                .map(|i| {
                    if (12..20).contains(&i) {
                        (i as f64).sin()
                    } else {
                        0.0
                    }
                })
                .collect(),
        )
        .unwrap();
        let g = Dislocation::new(2, 1.5);
        let h = Dislocation::new(-1, 0.25);
        let lhs = apply(&g.compose(&h), &u).unwrap();
        let rhs = apply(&g, &apply(&h, &u).unwrap()).unwrap();
        assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-14);
    }

    #[test]
    fn weak_null_paths() {
        let shifts = DislocationPath::new(
            (0..10)
                .map(|k| Dislocation::translation(k as f64))
                .collect(),
        );
        assert!(path_weak_null(&shifts));
        assert!(!path_weak_null(&DislocationPath::identity(10)));
        let scales = DislocationPath::new((0..10).map(Dislocation::dilation).collect());
        assert!(path_weak_null(&scales));
        let constant = DislocationPath::new(vec![Dislocation::dilation(3); 10]);
        assert!(!path_weak_null(&constant));
        assert!(!path_weak_null(&DislocationPath::new(vec![])));
    }

    #[test]
    fn relative_paths() {
        let a = DislocationPath::new((0..8).map(|k| Dislocation::translation(k as f64)).collect());
        let b = DislocationPath::new(
            (0..8)
                .map(|k| Dislocation::translation(-(k as f64)))
                .collect(),
        );
        let same = relative_path(&a, &a).unwrap();
        assert!(same.is_identity());
        assert!(!path_weak_null(&same));
        let rel = relative_path(&a, &b).unwrap();
        assert_eq!(rel.get(5), Dislocation::translation(-10.0));
        assert!(path_weak_null(&rel));
        let short = DislocationPath::identity(3);
        assert!(relative_path(&a, &short).is_err());
    }

    #[test]
    fn locator_finds_translate_and_dilate() {
        let s = l4_line(-8.0, 8.0);
        let u = Element::indicator(s, 5.0, 6.0, 1.0).unwrap();
        let grid = SearchGrid::new(6);
        assert_eq!(
            concentration_locator(&u, &grid).unwrap(),
            Dislocation::translation(5.0)
        );
        for k in 0..5 {
            let w = 2f64.powi(-k);
            let u = Element::indicator(s, 0.0, w, 2f64.powf(k as f64 / 4.0)).unwrap();
            assert_eq!(
                concentration_locator(&u, &grid).unwrap(),
                Dislocation::dilation(k)
            );
        }
        let z = Element::zeros(s, 0).unwrap();
        assert!(concentration_locator(&z, &grid).is_err());
    }

    #[test]
    fn restricted_transport_drops_outside_cells() {
        let s = Space::sequence(2.0, 0, 3).unwrap();
        let v = Element::new(Space::sequence(2.0, -1, 1).unwrap(), 0, vec![5.0, 1.0, 2.0]).unwrap();
        let g = Dislocation::translation(0.0);
        assert!(apply_into(&g, &v, &s).is_err());
        let r = apply_restricted(&g, &v, &s).unwrap();
        assert_eq!(r.coeffs(), &[1.0, 2.0, 0.0, 0.0]);
        let line = l4_line(0.0, 4.0);
        let bump = Element::indicator(l4_line(-1.0, 2.0), -1.0, 2.0, 1.0).unwrap();
        let r = apply_restricted(&Dislocation::new(1, 0.0), &bump, &line).unwrap();
        assert!((r.integral() - 2f64.powf(0.25)).abs() < 1e-12);
    }

    #[test]
    fn view_of_recentred_bubble() {
        let s = l4_line(-8.0, 8.0);
        let w = Element::new(
            l4_line(-1.0, 2.0),
            2,
            vec![0., 0., 0., 0., 1.0, 0.8, 0.9, 0.7, 0., 0., 0., 0.],
        )
        .unwrap();
        let g = Dislocation::new(3, 20.0);
        let u = apply_into(&g, &w, &s).unwrap();
        let view = LocalView::new(&SearchGrid::new(6), &s).unwrap();
        let seen = view.observe(&g, &u, &u.cumulative()).unwrap();
        assert!(seen.max_abs_diff(&w).unwrap() < 1e-14);
    }
}
