//! Weak limits, asymptotic centers and Δ-limits of finite sequences.
//!
//! Limits of finite data are read off the tail: `liminf` and `limsup` become
//! the tail minimum and maximum, and "tends to zero" becomes a decay trend
//! (see [`DeltaOptions`]).

mod chebyshev;

use serde::Serialize;

pub use chebyshev::{chebyshev_center, chebyshev_center_with, ChebyshevCenter, ChebyshevOptions};

use crate::dislocation::{locate, Dislocation, DislocationPath, LocalView, SearchGrid};
use crate::error::{Error, Result};
use crate::seq::{decays, quarter_maxima, Seq};
use crate::space::{duality_conjugate, Cumulative, Element, Geometry, Space};

/// Default threshold below which a tail trend counts as vanished.
pub const DEFAULT_TOL: f64 = 1e-3;

/// Decay rule for tail trends: a series has vanished if its last quarter is
/// below `tol`, or has fallen below `ratio` times its first quarter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DeltaOptions {
    pub tol: f64,
    pub ratio: f64,
}

impl Default for DeltaOptions {
    fn default() -> Self {
        DeltaOptions {
            tol: DEFAULT_TOL,
            ratio: 0.2,
        }
    }
}

impl DeltaOptions {
    pub fn with_tol(tol: f64) -> Self {
        DeltaOptions {
            tol,
            ..Default::default()
        }
    }

    fn vanishes(&self, series: &[f64]) -> bool {
        decays(series, self.tol, self.ratio)
    }
}

/// Indicator of `[a, b)`; `depth` is `None` for the whole window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Atom {
    pub a: f64,
    pub b: f64,
    pub depth: Option<u32>,
}

impl Atom {
    pub fn measure(&self) -> f64 {
        self.b - self.a
    }

    /// `⟨χ_{[a,b)}, x⟩` from a running integral of `x`.
    pub fn pair(&self, cumulative: &Cumulative) -> f64 {
        cumulative.integral(self.a, self.b)
    }
}

/// Finite family of test functionals: on a grid, indicators of the dyadic
/// cells of levels `base..=base + depth` plus the constant; on a sequence
/// space, the coordinate functionals.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TestDictionary {
    space: Space,
    depth: u32,
    atoms: Vec<Atom>,
}

impl TestDictionary {
    pub fn new(space: &Space, depth: u32) -> Result<Self> {
        let (a, b) = space.extent();
        TestDictionary::within(space, a, b, depth)
    }

    /// Dictionary of the cells inside the observation region `[a, b)`, with
    /// the indicator of the region in place of the constant. Sequences may
    /// then escape the region while staying inside the window.
    pub fn within(space: &Space, a: f64, b: f64, depth: u32) -> Result<Self> {
        let (lo, hi) = space.extent();
        if !(lo <= a && a < b && b <= hi) {
            return Err(Error::InvalidInput(format!(
                "region [{a}, {b}) is not inside the window [{lo}, {hi})"
            )));
        }
        let inside = |x: (f64, f64)| a <= x.0 && x.1 <= b;
        let mut atoms = Vec::new();
        let depth = match space.geometry() {
            Geometry::Sequence { first, last } => {
                for i in (first..=last).filter(|&i| inside((i as f64, i as f64 + 1.0))) {
                    atoms.push(Atom {
                        a: i as f64,
                        b: i as f64 + 1.0,
                        depth: Some(0),
                    });
                }
                0
            }
            Geometry::Grid { base_level, .. } => {
                atoms.push(Atom { a, b, depth: None });
                for d in 0..=depth {
                    let level = base_level + d;
                    for i in 0..space.cell_count(level)? {
                        let cell = space.cell_interval(level, i);
                        if inside(cell) {
                            atoms.push(Atom {
                                a: cell.0,
                                b: cell.1,
                                depth: Some(d),
                            });
                        }
                    }
                }
                depth
            }
        };
        Ok(TestDictionary {
            space: *space,
            depth,
            atoms,
        })
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Level of the finest cells.
    pub fn finest_level(&self) -> u32 {
        match self.space.geometry() {
            Geometry::Sequence { .. } => 0,
            Geometry::Grid { base_level, .. } => base_level + self.depth,
        }
    }

    /// Pairings of every atom with `x`.
    pub fn pairings(&self, x: &Element) -> Result<Vec<f64>> {
        self.check(x.space())?;
        let c = x.cumulative();
        Ok(self.atoms.iter().map(|a| a.pair(&c)).collect())
    }

    fn check(&self, space: &Space) -> Result<()> {
        if *space == self.space {
            Ok(())
        } else {
            Err(Error::GeometryMismatch)
        }
    }
}

fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Median and median absolute deviation.
fn robust_center(values: &[f64]) -> (f64, f64) {
    let mut v = values.to_vec();
    let med = median(&mut v);
    let mut dev: Vec<f64> = values.iter().map(|x| (x - med).abs()).collect();
    (med, median(&mut dev))
}

/// A refinement detail is attributed to the limit only if it is stable along
/// the tail, i.e. its median dominates its spread by this factor.
const DETAIL_STABILITY: f64 = 4.0;

#[derive(Clone, Debug, Serialize)]
pub struct WeakLimit {
    pub limit: Element,
    /// Per tail index, the largest `|avg_C (x_k - limit)|` over the atoms.
    pub residuals: Vec<f64>,
    pub residual_decays: bool,
}

/// Candidate weak limit from tail statistics of dictionary averages.
///
/// Sequence spaces take the tail median of each coordinate. Grid spaces
/// start from the tail median of the mean over the window and descend the
/// dyadic hierarchy; at each cell the median tail increment over the parent
/// mean is kept only when it is stable along the tail, so oscillations that
/// average out at coarser scales are not mistaken for structure.
pub fn weak_limit_estimate(seq: &Seq, dict: &TestDictionary) -> Result<WeakLimit> {
    weak_limit_with(seq, dict, &DeltaOptions::default())
}

pub fn weak_limit_with(seq: &Seq, dict: &TestDictionary, opts: &DeltaOptions) -> Result<WeakLimit> {
    dict.check(seq.space())?;
    let space = *seq.space();
    let tail: Vec<Cumulative> = seq.tail().iter().map(Element::cumulative).collect();
    let limit = match space.geometry() {
        Geometry::Sequence { first, last } => {
            let coeffs = (first..=last)
                .map(|i| {
                    let mut v: Vec<f64> = tail
                        .iter()
                        .map(|c| c.integral(i as f64, i as f64 + 1.0))
                        .collect();
                    median(&mut v)
                })
                .collect();
            Element::new(space, 0, coeffs)?
        }
        Geometry::Grid {
            start,
            end,
            base_level,
        } => {
            let root: Vec<f64> = tail.iter().map(|c| c.average(start, end)).collect();
            let (root_est, _) = robust_center(&root);
            let mut parent_est = vec![root_est; space.cell_count(base_level)?];
            let mut parent_raw: Vec<Vec<f64>> = vec![root; parent_est.len()];
            let mut level = base_level;
            loop {
                let n = space.cell_count(level)?;
                let shift = if level == base_level { None } else { Some(1) };
                let mut est = Vec::with_capacity(n);
                let mut raw = Vec::with_capacity(n);
                for i in 0..n {
                    let pi = match shift {
                        None => i,
                        Some(s) => i >> s,
                    };
                    let (a, b) = space.cell_interval(level, i);
                    let child: Vec<f64> = tail.iter().map(|c| c.average(a, b)).collect();
                    let diffs: Vec<f64> = child
                        .iter()
                        .zip(&parent_raw[pi])
                        .map(|(c, p)| c - p)
                        .collect();
                    let (med, mad) = robust_center(&diffs);
                    let detail = if med.abs() > DETAIL_STABILITY * mad {
                        med
                    } else {
                        0.0
                    };
                    est.push(parent_est[pi] + detail);
                    raw.push(child);
                }
                if level == dict.finest_level() {
                    break Element::new(space, level, est)?;
                }
                parent_est = est;
                parent_raw = raw;
                level += 1;
            }
        }
    };
    let limit_cum = limit.cumulative();
    let residuals: Vec<f64> = tail
        .iter()
        .map(|c| {
            dict.atoms()
                .iter()
                .map(|a| ((a.pair(c) - a.pair(&limit_cum)) / a.measure()).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    let residual_decays = opts.vanishes(&residuals);
    Ok(WeakLimit {
        limit,
        residuals,
        residual_decays,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct AsymptoticCenter {
    pub center: Element,
    pub radius: f64,
    /// `‖y_{N+1} - y_N‖` for consecutive tail centers.
    pub increments: Vec<f64>,
}

/// Minimal tail length for the asymptotic center.
pub const MIN_TAIL: usize = 4;

/// Limit of the Chebyshev centers `y_N` of the tails `{x_N, x_{N+1}, ...}`,
/// taken as the deepest center once consecutive centers agree to within
/// `1e-3 * max(1, sup ‖x_k‖)`.
pub fn asymptotic_center(seq: &Seq) -> Result<AsymptoticCenter> {
    asymptotic_center_with(seq, 1e-3 * seq.sup_norm().max(1.0))
}

pub fn asymptotic_center_with(seq: &Seq, tol: f64) -> Result<AsymptoticCenter> {
    let k = seq.len();
    if seq.tail_len() < MIN_TAIL {
        return Err(Error::InsufficientTail(format!(
            "tail of length {} is shorter than {MIN_TAIL}",
            seq.tail_len()
        )));
    }
    let mut centers = Vec::new();
    for n in seq.tail_start()..=k - MIN_TAIL {
        centers.push(chebyshev_center(&seq.elements()[n..])?);
    }
    let increments = centers
        .windows(2)
        .map(|w| w[1].0.distance(&w[0].0))
        .collect::<Result<Vec<_>>>()?;
    let (center, radius) = centers.pop().expect("at least one tail center");
    if let Some(&last) = increments.last() {
        if last > tol {
            return Err(Error::InsufficientTail(format!(
                "tail centers still move by {last:.3e} > {tol:.3e}"
            )));
        }
    }
    Ok(AsymptoticCenter {
        center,
        radius,
        increments,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DeltaVerdict {
    /// `min_k ‖x_k - x‖` over the tail.
    pub min_distance: f64,
    /// The tail converges to the candidate in norm; the dual test is skipped.
    pub norm_convergent: bool,
    pub delta_convergent: bool,
    /// Per tail index, the largest `|⟨(x_k - x)*, φ⟩|` over the atoms.
    pub trend: Vec<f64>,
    /// Atoms whose pairing series did not vanish.
    pub persistent_atoms: usize,
}

/// Dual Δ-limit test: `x_k ⇁ x` iff the conjugates `(x_k - x)*` tend weakly
/// to zero. Each atom pairing must vanish along the tail.
pub fn delta_limit_dual(seq: &Seq, x: &Element, dict: &TestDictionary) -> Result<DeltaVerdict> {
    delta_limit_with(seq, x, dict, &DeltaOptions::default())
}

pub fn delta_limit_with(
    seq: &Seq,
    x: &Element,
    dict: &TestDictionary,
    opts: &DeltaOptions,
) -> Result<DeltaVerdict> {
    dict.check(seq.space())?;
    if *x.space() != *seq.space() {
        return Err(Error::GeometryMismatch);
    }
    let diffs = seq
        .tail()
        .iter()
        .map(|e| e.sub(x))
        .collect::<Result<Vec<_>>>()?;
    let distances: Vec<f64> = diffs.iter().map(Element::norm).collect();
    let min_distance = distances.iter().copied().fold(f64::INFINITY, f64::min);
    let scale = seq.sup_norm().max(x.norm()).max(1.0);
    if quarter_maxima(&distances).1 <= opts.tol * scale {
        return Ok(DeltaVerdict {
            min_distance,
            norm_convergent: true,
            delta_convergent: true,
            trend: vec![0.0; diffs.len()],
            persistent_atoms: 0,
        });
    }
    let pairings: Vec<Vec<f64>> = diffs
        .iter()
        .map(|d| match duality_conjugate(d) {
            Ok(c) => {
                let cum = c.to_values().cumulative();
                dict.atoms().iter().map(|a| a.pair(&cum)).collect()
            }
            Err(_) => vec![0.0; dict.len()],
        })
        .collect();
    let trend: Vec<f64> = pairings
        .iter()
        .map(|row| row.iter().fold(0.0f64, |m, v| m.max(v.abs())))
        .collect();
    let persistent_atoms = (0..dict.len())
        .filter(|&j| {
            let series: Vec<f64> = pairings.iter().map(|row| row[j]).collect();
            !opts.vanishes(&series)
        })
        .count();
    Ok(DeltaVerdict {
        min_distance,
        norm_convergent: false,
        delta_convergent: persistent_atoms == 0,
        trend,
        persistent_atoms,
    })
}

/// `min_x [liminf ‖x_n - x‖ - liminf ‖x_n - x0‖]` over the candidates; a
/// negative value exhibits a point strictly better than `x0`.
pub fn opial_gap(seq: &Seq, x0: &Element, candidates: &[Element]) -> Result<f64> {
    let base = seq.tail_min_distance(x0)?;
    candidates.iter().try_fold(f64::INFINITY, |m, x| {
        Ok(m.min(seq.tail_min_distance(x)? - base))
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PFunctional {
    pub value: f64,
    pub witness: Option<DislocationPath>,
    /// Profile in the local view space of the search grid.
    pub profile: Option<Element>,
    pub verdict: Option<DeltaVerdict>,
}

/// Gauges from the locator for every index; zero elements keep the identity.
pub fn locate_path(seq: &Seq, grid: &SearchGrid) -> Result<DislocationPath> {
    seq.elements()
        .iter()
        .map(|x| {
            if x.is_zero() {
                Ok(Dislocation::IDENTITY)
            } else {
                locate(x, &x.cumulative(), grid).map(|l| l.gauge)
            }
        })
        .collect::<Result<Vec<_>>>()
        .map(DislocationPath::new)
}

/// Recentred local views `g_k⁻¹ x_k` observed through the search grid.
pub fn recentred_views(seq: &Seq, path: &DislocationPath, grid: &SearchGrid) -> Result<Seq> {
    if path.len() != seq.len() {
        return Err(Error::LengthMismatch {
            left: path.len(),
            right: seq.len(),
        });
    }
    let view = LocalView::new(grid, seq.space())?;
    let views = seq
        .elements()
        .iter()
        .zip(&path.gauges)
        .map(|(x, g)| view.observe(g, x, &x.cumulative()))
        .collect::<Result<Vec<_>>>()?;
    Seq::new(views, seq.tail_start())
}

/// Center of a tail, falling back to the Chebyshev center of the last
/// [`MIN_TAIL`] elements when the tail centers have not settled.
pub fn tail_center(seq: &Seq) -> Result<Element> {
    match asymptotic_center(seq) {
        Ok(c) => Ok(c.center),
        Err(Error::InsufficientTail(_)) => {
            let n = seq.len();
            let from = n.saturating_sub(MIN_TAIL).max(seq.tail_start().min(n - 1));
            Ok(chebyshev_center(&seq.elements()[from..])?.0)
        }
        Err(e) => Err(e),
    }
}

/// Lower estimate of the largest profile norm extractable by dislocations.
///
/// Locates the dominant concentration in every element, observes the
/// recentred elements through a fixed local window and takes the center of
/// their tail as the profile.
pub fn p_functional(
    seq: &Seq,
    grid: &SearchGrid,
    view_depth: u32,
    tol: f64,
) -> Result<PFunctional> {
    let none = PFunctional {
        value: 0.0,
        witness: None,
        profile: None,
        verdict: None,
    };
    if seq.tail().iter().all(Element::is_zero) {
        return Ok(none);
    }
    let path = locate_path(seq, grid)?;
    let views = recentred_views(seq, &path, grid)?;
    let profile = tail_center(&views)?;
    let value = profile.norm();
    if value < tol {
        return Ok(none);
    }
    let dict = TestDictionary::new(views.space(), view_depth)?;
    let verdict = delta_limit_dual(&views, &profile, &dict)?;
    Ok(PFunctional {
        value,
        witness: Some(path),
        profile: Some(profile),
        verdict: Some(verdict),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DWeakNull {
    pub null: bool,
    pub value: f64,
    pub witness: Option<DislocationPath>,
}

/// `true` iff no dislocation path extracts a profile of norm `>= tol`.
pub fn d_weak_null_check(
    seq: &Seq,
    grid: &SearchGrid,
    view_depth: u32,
    tol: f64,
) -> Result<DWeakNull> {
    let p = p_functional(seq, grid, view_depth, tol)?;
    Ok(DWeakNull {
        null: p.value < tol,
        value: p.value,
        witness: p.witness,
    })
}

/// Asymptotic radius surrogate: Chebyshev radius of the last half.
fn tail_radius(seq: &Seq, indices: &[usize]) -> Result<f64> {
    let half = &indices[indices.len() / 2..];
    let points: Vec<Element> = half.iter().map(|&i| seq.get(i).clone()).collect();
    Ok(chebyshev_center(&points)?.1)
}

/// Subsequence with (near) minimal asymptotic radius among arithmetic
/// progressions of step at most 4 and a greedy halving ladder.
///
/// Radii within `tol * max(1, sup ‖x_k‖)` are treated as equal, in which case
/// the longer candidate wins, then the one listed first.
pub fn regular_subsequence(seq: &Seq, tol: f64) -> Result<Vec<usize>> {
    let n = seq.len();
    if n < 8 {
        return Err(Error::InsufficientTail(format!(
            "regular subsequence needs 8 elements, got {n}"
        )));
    }
    let scale = seq.sup_norm().max(1.0);
    let eq = tol * scale;
    let mut candidates: Vec<Vec<usize>> = Vec::new();
    for step in 1..=4 {
        for offset in 0..step {
            candidates.push((offset..n).step_by(step).collect());
        }
    }
    // Greedy ladder: keep halving while the radius improves by more than
    // 2^{-i} of the scale at round i.
    let mut current: Vec<usize> = (0..n).collect();
    let mut radius = tail_radius(seq, &current)?;
    for i in 1.. {
        if current.len() < 8 {
            break;
        }
        let mut best: Option<(f64, Vec<usize>)> = None;
        for offset in 0..2 {
            let cand: Vec<usize> = current.iter().skip(offset).step_by(2).copied().collect();
            let r = tail_radius(seq, &cand)?;
            if best.as_ref().is_none_or(|(b, _)| r < *b) {
                best = Some((r, cand));
            }
        }
        let (r, cand) = best.expect("two halvings");
        if radius - r <= scale * 0.5f64.powi(i) {
            break;
        }
        radius = r;
        current = cand;
        candidates.push(current.clone());
    }
    let mut chosen: Option<(f64, &Vec<usize>)> = None;
    for cand in &candidates {
        if cand.len() < MIN_TAIL {
            continue;
        }
        let r = tail_radius(seq, cand)?;
        let better = match chosen {
            None => true,
            Some((br, bc)) => r < br - eq || (r <= br + eq && cand.len() > bc.len()),
        };
        if better {
            chosen = Some((r, cand));
        }
    }
    Ok(chosen
        .map(|(_, c)| c.clone())
        .unwrap_or_else(|| (0..n).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l4_window(a: f64, b: f64) -> Space {
        Space::grid(4.0, a, b, 0).unwrap()
    }

    #[test]
    fn dictionary_layout() {
        let s = l4_window(0.0, 2.0);
        let d = TestDictionary::new(&s, 2).unwrap();
        assert_eq!(d.len(), 1 + 2 + 4 + 8);
        assert_eq!(d.finest_level(), 2);
        let q = Space::sequence(3.0, -2, 2).unwrap();
        assert_eq!(TestDictionary::new(&q, 5).unwrap().len(), 5);
        assert_eq!(TestDictionary::within(&q, 0.0, 2.0, 0).unwrap().len(), 2);
        assert_eq!(
            TestDictionary::within(&s, 1.0, 2.0, 1).unwrap().len(),
            1 + 1 + 2
        );
        assert!(TestDictionary::within(&s, 1.0, 3.0, 1).is_err());
    }

    #[test]
    fn constant_sequence_weak_limit() {
        let s = l4_window(0.0, 4.0);
        let w = Element::new(s, 1, vec![0.5, -1.0, 0.0, 0.25, 2.0, 2.0, 0.0, 1.0]).unwrap();
        let seq = Seq::with_half_tail(vec![w.clone(); 8]).unwrap();
        let dict = TestDictionary::new(&s, 1).unwrap();
        let est = weak_limit_estimate(&seq, &dict).unwrap();
        assert!(est.limit.max_abs_diff(&w).unwrap() < 1e-15);
        assert!(est.residuals.iter().all(|r| *r < 1e-15));
        assert!(est.residual_decays);
    }

    #[test]
    fn escaping_bumps_have_zero_weak_limit() {
        let s = l4_window(0.0, 16.0);
        let xs: Vec<Element> = (0..16)
            .map(|k| Element::indicator(s, k as f64, k as f64 + 1.0, 1.0).unwrap())
            .collect();
        let seq = Seq::with_half_tail(xs).unwrap();
        let dict = TestDictionary::new(&s, 1).unwrap();
        let est = weak_limit_estimate(&seq, &dict).unwrap();
        assert!(est.limit.sup_norm() < 1e-15);
    }

    #[test]
    fn alternating_pair_center_is_midpoint() {
        let s = Space::sequence(2.0, 0, 2).unwrap();
        let a = Element::new(s, 0, vec![1.0, 0.0, 0.5]).unwrap();
        let b = Element::new(s, 0, vec![0.0, 1.0, -0.5]).unwrap();
        let xs: Vec<Element> = (0..12)
            .map(|k| if k % 2 == 0 { a.clone() } else { b.clone() })
            .collect();
        let seq = Seq::with_half_tail(xs).unwrap();
        let c = asymptotic_center(&seq).unwrap();
        let mid = a.add(&b).unwrap().scaled(0.5);
        assert!(c.center.distance(&mid).unwrap() < 1e-6);
    }

    #[test]
    fn convergent_sequence_center_and_verdict() {
        let s = Space::sequence(3.0, 0, 3).unwrap();
        let u = Element::new(s, 0, vec![0.3, -0.2, 0.1, 0.4]).unwrap();
        let xs: Vec<Element> = (0..20)
            .map(|k| {
                u.axpy(0.5f64.powi(k), &Element::basis(s, 1).unwrap())
                    .unwrap()
            })
            .collect();
        let seq = Seq::with_half_tail(xs).unwrap();
        let c = asymptotic_center(&seq).unwrap();
        assert!(c.center.distance(&u).unwrap() < 1e-4);
        let dict = TestDictionary::new(&s, 0).unwrap();
        let v = delta_limit_dual(&seq, &u, &dict).unwrap();
        assert!(v.delta_convergent);
    }

    #[test]
    fn constant_sequence_is_not_delta_convergent_elsewhere() {
        let s = Space::sequence(4.0, 0, 1).unwrap();
        let w = Element::new(s, 0, vec![1.0, 0.5]).unwrap();
        let seq = Seq::with_half_tail(vec![w.clone(); 8]).unwrap();
        let dict = TestDictionary::new(&s, 0).unwrap();
        let zero = Element::zeros(s, 0).unwrap();
        let v = delta_limit_dual(&seq, &zero, &dict).unwrap();
        assert!(!v.norm_convergent);
        assert!(!v.delta_convergent);
        let v = delta_limit_dual(&seq, &w, &dict).unwrap();
        assert!(v.norm_convergent && v.delta_convergent);
    }

    #[test]
    fn escaping_bumps_are_delta_null() {
        let s = l4_window(0.0, 32.0);
        let xs: Vec<Element> = (0..32)
            .map(|k| Element::indicator(s, k as f64, k as f64 + 1.0, 1.0).unwrap())
            .collect();
        let seq = Seq::with_half_tail(xs).unwrap();
        let dict = TestDictionary::within(&s, 0.0, 8.0, 2).unwrap();
        let v = delta_limit_dual(&seq, &Element::zeros(s, 0).unwrap(), &dict).unwrap();
        assert!(!v.norm_convergent);
        assert!(v.delta_convergent);
        // The whole-window constant still sees every bump.
        let full = TestDictionary::new(&s, 0).unwrap();
        let v = delta_limit_dual(&seq, &Element::zeros(s, 0).unwrap(), &full).unwrap();
        assert!(!v.delta_convergent);
    }

    #[test]
    fn opial_gap_signs() {
        let s = Space::sequence(2.0, 0, 1).unwrap();
        let u = Element::new(s, 0, vec![1.0, 0.0]).unwrap();
        let seq = Seq::with_half_tail(vec![u.clone(); 6]).unwrap();
        let cands = vec![Element::zeros(s, 0).unwrap(), Element::basis(s, 1).unwrap()];
        assert!(opial_gap(&seq, &u, &cands).unwrap() > 0.0);
    }

    #[test]
    fn translated_profile_is_recovered() {
        let s = Space::grid(4.0, -2.0, 32.0, 0).unwrap();
        let view = Space::grid(4.0, -1.0, 2.0, 0).unwrap();
        let w = Element::new(
            view,
            2,
            vec![0., 0., 0., 0., 0.5, 0.4, 0.45, 0.35, 0., 0., 0., 0.],
        )
        .unwrap();
        let xs: Vec<Element> = (0..16)
            .map(|k| {
                crate::dislocation::apply_into(&Dislocation::translation(2.0 * k as f64), &w, &s)
                    .unwrap()
            })
            .collect();
        let seq = Seq::with_half_tail(xs).unwrap();
        let pf = p_functional(&seq, &SearchGrid::new(4), 2, 1e-3).unwrap();
        assert!((pf.value - w.norm()).abs() < 1e-9);
        let path = pf.witness.unwrap();
        assert_eq!(path.get(7), Dislocation::translation(14.0));
        assert!(
            !d_weak_null_check(&seq, &SearchGrid::new(4), 2, 1e-3)
                .unwrap()
                .null
        );
    }

    #[test]
    fn regular_subsequence_of_alternating_pair() {
        let s = Space::sequence(2.0, 0, 1).unwrap();
        let a = Element::basis(s, 0).unwrap();
        let b = Element::basis(s, 1).unwrap();
        let xs: Vec<Element> = (0..16)
            .map(|k| if k % 2 == 0 { a.clone() } else { b.clone() })
            .collect();
        let seq = Seq::with_half_tail(xs).unwrap();
        let idx = regular_subsequence(&seq, 1e-3).unwrap();
        assert_eq!(idx, (0..16).step_by(2).collect::<Vec<_>>());
    }
}
