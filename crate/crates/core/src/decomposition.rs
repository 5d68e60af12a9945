//! Iterative profile extraction.
//!
//! Each step finds the dominant concentration path of the current sequence,
//! takes the Δ-limit of the recentred views as the profile `w`, and
//! subtracts `g_k w` from every element. Steps repeat until no profile of
//! norm above the tolerance remains or the profile budget is spent.

use serde::Serialize;

use crate::convergence::{
    d_weak_null_check, delta_limit_dual, locate_path, recentred_views, tail_center,
    weak_limit_estimate, DeltaVerdict, TestDictionary, DEFAULT_TOL,
};
use crate::dislocation::{
    apply_restricted, path_weak_null, relative_path, DislocationPath, SearchGrid,
};
use crate::error::{Error, Result};
use crate::modulus::{delta_clamped, modulus_for_exponent};
use crate::seq::Seq;
use crate::space::Element;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecompositionOptions {
    pub grid: SearchGrid,
    /// Depth of the test dictionary on the view space.
    pub view_depth: u32,
    pub max_profiles: usize,
    /// Profiles of norm below this are not extracted.
    pub tol: f64,
    pub tol_budget: f64,
}

impl DecompositionOptions {
    pub fn new(grid: SearchGrid) -> Self {
        DecompositionOptions {
            grid,
            view_depth: 2,
            max_profiles: 16,
            tol: DEFAULT_TOL,
            tol_budget: 1e-2,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Profile {
    pub path: DislocationPath,
    /// On the view space of the search grid, or on the ambient space for
    /// the identity path.
    pub w: Element,
    pub norm: f64,
    pub verdict: DeltaVerdict,
}

#[derive(Clone, Debug)]
pub struct Extraction {
    pub profile: Profile,
    pub remainder: Seq,
}

/// One greedy extraction, or `None` when the largest profile is below `tol`.
///
/// A path that is constant on the tail is replaced by the identity path, and
/// the profile is then the Δ-limit of the whole elements rather than of their
/// local views.
pub fn extract_profile_step(seq: &Seq, opts: &DecompositionOptions) -> Result<Option<Extraction>> {
    if seq.tail().iter().all(Element::is_zero) {
        return Ok(None);
    }
    let located = locate_path(seq, &opts.grid)?;
    let (path, w, verdict) = if located.constant_from(seq.tail_start()).is_some() {
        let (w, verdict) = delta_limit_candidate(seq, opts.view_depth)?;
        (DislocationPath::identity(seq.len()), w, verdict)
    } else {
        let views = recentred_views(seq, &located, &opts.grid)?;
        let (w, verdict) = delta_limit_candidate(&views, opts.view_depth)?;
        (located, w, verdict)
    };
    let norm = w.norm();
    if norm < opts.tol {
        return Ok(None);
    }
    if norm > 2.0 {
        return Err(Error::ProfileTooLarge(norm));
    }
    let remainder = seq.try_map_indexed(|k, x| {
        let gw = apply_restricted(&path.get(k), &w, x.space())?;
        x.sub(&gw)
    })?;
    Ok(Some(Extraction {
        profile: Profile {
            path,
            w,
            norm,
            verdict,
        },
        remainder,
    }))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SigmaEntry {
    /// Tail sup-norm before the step.
    pub sup_norm: f64,
    /// Tail sup-norm after the step, the greedy upper estimate of σ.
    pub sigma: f64,
}

/// Per-step check of the ladder bound: with `j` the largest integer such that
/// `δ(2^{-j})` still dominates the step's drop, the profile norm is at most
/// `2^{-j}`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LadderEntry {
    pub step: usize,
    pub drop: f64,
    pub delta_of_norm: f64,
    pub j: i32,
    pub bound: f64,
    pub profile_norm: f64,
    pub drop_ok: bool,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct EnergyReport {
    pub limsup_remainder: f64,
    pub sum_delta_profiles: f64,
    pub lhs: f64,
    pub budget_ok: bool,
    pub ladder: Vec<LadderEntry>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Tolerance,
    MaxProfiles,
    Stalled,
    /// The next candidate profile failed its Δ-limit verdict.
    Uncertified,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProfileDecomposition {
    pub profiles: Vec<Profile>,
    pub remainder: Seq,
    pub energy: EnergyReport,
    pub sigma_trace: Vec<SigmaEntry>,
    /// Indices of the input kept in the decomposition.
    pub index_map: Vec<usize>,
    pub termination: Termination,
}

/// Largest `j >= -1` with `δ(2^{-j}) >= drop`.
fn ladder_rung(p: f64, drop: f64) -> i32 {
    let mut j = -1;
    while j < 60 && modulus_for_exponent(p, 0.5f64.powi(j + 1)).unwrap_or(0.0) >= drop {
        j += 1;
    }
    j
}

/// Slack for the per-step energy drop.
pub const DROP_SLACK: f64 = 1e-6;

/// Δ-limit estimate of a sequence: the tail center, or the weak-limit
/// estimate when only the latter passes the dual test. The verdict belongs to
/// the returned candidate.
fn delta_limit_candidate(seq: &Seq, depth: u32) -> Result<(Element, DeltaVerdict)> {
    let dict = TestDictionary::new(seq.space(), depth)?;
    let center = tail_center(seq)?;
    let verdict = delta_limit_dual(seq, &center, &dict)?;
    if verdict.norm_convergent || verdict.delta_convergent {
        return Ok((center, verdict));
    }
    let weak = weak_limit_estimate(seq, &dict)?.limit;
    let weak_verdict = delta_limit_dual(seq, &weak, &dict)?;
    if weak_verdict.delta_convergent {
        Ok((weak, weak_verdict))
    } else {
        Ok((center, verdict))
    }
}

/// Greedy profile decomposition of a sequence with `sup ‖u_k‖ <= 1`.
pub fn profile_decomposition(
    seq: &Seq,
    opts: &DecompositionOptions,
) -> Result<ProfileDecomposition> {
    let sup = seq.sup_norm();
    if sup > 1.0 + 1e-12 {
        return Err(Error::Unnormalized(sup));
    }
    let p = seq.space().p();
    let mut current = seq.clone();
    let mut profiles = Vec::new();
    let mut sigma_trace = Vec::new();
    let mut termination = Termination::Tolerance;
    loop {
        if profiles.len() >= opts.max_profiles {
            termination = Termination::MaxProfiles;
            break;
        }
        let before = current.tail_sup_norm();
        let Some(step) = extract_profile_step(&current, opts)? else {
            break;
        };
        let v = &step.profile.verdict;
        if !(v.norm_convergent || v.delta_convergent) {
            termination = Termination::Uncertified;
            break;
        }
        let after = step.remainder.tail_sup_norm();
        if after >= before {
            termination = Termination::Stalled;
            break;
        }
        sigma_trace.push(SigmaEntry {
            sup_norm: before,
            sigma: after,
        });
        profiles.push(step.profile);
        current = step.remainder;
    }
    let ladder = profiles
        .iter()
        .zip(&sigma_trace)
        .enumerate()
        .map(|(step, (prof, s))| {
            let drop = s.sup_norm - s.sigma;
            let delta_of_norm = delta_clamped(p, prof.norm);
            let j = ladder_rung(p, drop);
            let bound = 0.5f64.powi(j);
            LadderEntry {
                step,
                drop,
                delta_of_norm,
                j,
                bound,
                profile_norm: prof.norm,
                drop_ok: drop >= delta_of_norm - DROP_SLACK,
                holds: prof.norm <= bound * (1.0 + 1e-12),
            }
        })
        .collect();
    // Identity-path profiles come first.
    profiles.sort_by_key(|prof| !prof.path.is_identity());
    let limsup_remainder = current.tail_sup_norm();
    let sum_delta_profiles: f64 = profiles.iter().map(|w| delta_clamped(p, w.norm)).sum();
    let lhs = limsup_remainder + sum_delta_profiles;
    if lhs > 1.0 + opts.tol_budget {
        return Err(Error::EnergyBudgetExceeded {
            lhs,
            tol_budget: opts.tol_budget,
        });
    }
    Ok(ProfileDecomposition {
        profiles,
        remainder: current,
        energy: EnergyReport {
            limsup_remainder,
            sum_delta_profiles,
            lhs,
            budget_ok: lhs <= 1.0 + opts.tol_budget,
            ladder,
        },
        sigma_trace,
        index_map: (0..seq.len()).collect(),
        termination,
    })
}

impl ProfileDecomposition {
    /// Pairwise decoupling: entry `(m, n)` is `path_weak_null` of the relative
    /// path; the diagonal is `None`.
    pub fn decoupling_matrix(&self) -> Result<Vec<Vec<Option<bool>>>> {
        decoupling_check(self)
    }

    pub fn decoupled(&self) -> Result<bool> {
        Ok(self
            .decoupling_matrix()?
            .iter()
            .flatten()
            .all(|e| e.unwrap_or(true)))
    }

    /// `max_k sup |u_k - Σ_n g_k^{(n)} w^{(n)} - r_k|`.
    pub fn reconstruction_error(&self, original: &Seq) -> Result<f64> {
        let mut worst = 0.0f64;
        for (k, &i) in self.index_map.iter().enumerate() {
            let x = original.get(i);
            let mut acc = self.remainder.get(k).clone();
            for prof in &self.profiles {
                acc = acc.add(&apply_restricted(&prof.path.get(k), &prof.w, x.space())?)?;
            }
            worst = worst.max(x.max_abs_diff(&acc)?);
        }
        Ok(worst)
    }

    /// Whether the remainder carries no further profile above `tol`.
    pub fn remainder_null(&self, opts: &DecompositionOptions) -> Result<bool> {
        Ok(d_weak_null_check(&self.remainder, &opts.grid, opts.view_depth, opts.tol)?.null)
    }
}

pub fn decoupling_check(decomp: &ProfileDecomposition) -> Result<Vec<Vec<Option<bool>>>> {
    let n = decomp.profiles.len();
    let mut m = vec![vec![None; n]; n];
    for a in 0..n {
        for b in 0..n {
            if a != b {
                let rel = relative_path(&decomp.profiles[a].path, &decomp.profiles[b].path)?;
                m[a][b] = Some(path_weak_null(&rel));
            }
        }
    }
    Ok(m)
}

/// Energy bookkeeping of an existing decomposition against a budget.
pub fn energy_budget(decomp: &ProfileDecomposition, tol_budget: f64) -> EnergyReport {
    let p = decomp.remainder.space().p();
    let limsup_remainder = decomp.remainder.tail_sup_norm();
    let sum_delta_profiles: f64 = decomp
        .profiles
        .iter()
        .map(|w| delta_clamped(p, w.norm))
        .sum();
    let lhs = limsup_remainder + sum_delta_profiles;
    EnergyReport {
        limsup_remainder,
        sum_delta_profiles,
        lhs,
        budget_ok: lhs <= 1.0 + tol_budget,
        ladder: decomp.energy.ladder.clone(),
    }
}
