//! Deterministic example sequences, addressable by name.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dislocation::{apply_into, Dislocation, DislocationPath};
use crate::error::{Error, Result};
use crate::seq::Seq;
use crate::space::{Element, Space};

pub const EXAMPLES: [&str; 7] = [
    "bl-strict-03",
    "bubbles",
    "linf-dyadic",
    "Linfty-mass",
    "nonadditive-09",
    "nonlsc-L4",
    "spreading-lp",
];

pub type Params = BTreeMap<String, f64>;

/// A profile the generator planted, with its path.
#[derive(Clone, Debug, Serialize)]
pub struct PlantedProfile {
    pub path: DislocationPath,
    pub w: Element,
}

#[derive(Clone, Debug, Serialize)]
pub struct Example {
    pub name: String,
    /// Effective parameters, defaults filled in.
    pub params: Params,
    pub seq: Seq,
    /// Expected outcomes, as human-readable statements keyed by quantity.
    pub expected: BTreeMap<String, String>,
    pub planted: Vec<PlantedProfile>,
}

struct Reader<'a> {
    given: &'a Params,
    used: Params,
}

impl Reader<'_> {
    fn get(&mut self, key: &str, default: f64) -> f64 {
        let v = self.given.get(key).copied().unwrap_or(default);
        self.used.insert(key.to_string(), v);
        v
    }

    fn int(&mut self, key: &str, default: u32, min: u32, max: u32) -> Result<u32> {
        let v = self.get(key, default as f64);
        if v.fract() != 0.0 || v < min as f64 || v > max as f64 {
            return Err(Error::InvalidInput(format!(
                "parameter {key} = {v} must be an integer in [{min}, {max}]"
            )));
        }
        Ok(v as u32)
    }

    fn finish(self) -> Result<Params> {
        if let Some(k) = self.given.keys().find(|k| !self.used.contains_key(*k)) {
            return Err(Error::InvalidInput(format!(
                "unknown parameter `{k}`; accepted: {}",
                self.used.keys().cloned().collect::<Vec<_>>().join(", ")
            )));
        }
        Ok(self.used)
    }
}

fn expect(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

/// Generates the named example; unknown names list the available ones.
pub fn generate(name: &str, params: &Params) -> Result<Example> {
    let mut r = Reader {
        given: params,
        used: Params::new(),
    };
    let (seq, expected, planted) = match name {
        "bl-strict-03" => bl_strict(&mut r)?,
        "bubbles" => bubbles(&mut r)?,
        "linf-dyadic" => linf_dyadic(&mut r)?,
        "Linfty-mass" => linfty_mass(&mut r)?,
        "nonadditive-09" => nonadditive(&mut r)?,
        "nonlsc-L4" => nonlsc(&mut r)?,
        "spreading-lp" => spreading(&mut r)?,
        _ => {
            return Err(Error::UnknownExample {
                name: name.to_string(),
                available: EXAMPLES.to_vec(),
            })
        }
    };
    Ok(Example {
        name: name.to_string(),
        params: r.finish()?,
        seq,
        expected,
        planted,
    })
}

type Generated = (Seq, BTreeMap<String, String>, Vec<PlantedProfile>);

/// `u_k` on `(0, 3)` for `k = 2^j`: on `((m-1)/k, m/k)` the value is
/// `a_{m mod 3}` with `a_1 = 1`, `a_2 = 2`, `a_0 = 0`.
pub fn bl_strict_element(p: f64, j: u32) -> Result<Element> {
    let space = Space::grid(p, 0.0, 3.0, 0)?;
    let k = 1usize << j;
    let coeffs = (1..=3 * k)
        .map(|m| match m % 3 {
            1 => 1.0,
            2 => 2.0,
            _ => 0.0,
        })
        .collect();
    Element::new(space, j, coeffs)
}

fn bl_strict(r: &mut Reader) -> Result<Generated> {
    let p = r.get("p", 4.0);
    let max_exp = r.int("max_exp", 12, 1, 16)?;
    let xs = (0..=max_exp)
        .map(|j| bl_strict_element(p, j))
        .collect::<Result<Vec<_>>>()?;
    let seq = Seq::with_half_tail(xs)?;
    Ok((
        seq,
        expect(&[
            ("weak_limit", "1".into()),
            ("delta_limit", "1".into()),
            ("cross_term", "∫(u_k - 1)^2 = 2 for every k".into()),
            ("bl_margin_p4", "6 * 2 = 12".into()),
        ]),
        vec![],
    ))
}

/// One period of the step patterns on `(0, 9)`, at level 1.
fn nonadditive_patterns(p: f64) -> Result<(Element, Element)> {
    let space = Space::grid(p, 0.0, 9.0, 0)?;
    let x0 = Element::from_cells(space, 1, |a, _| if a < 1.0 { 2.0 } else { -1.0 })?;
    let y0 = Element::from_cells(space, 1, |a, _| if a < 4.5 { -1.0 } else { 1.0 })?;
    Ok((x0, y0))
}

/// `f(n t)` extended `9/n`-periodically, for `n = 2^e` and a pattern at
/// level 1 on `(0, 9)`.
pub fn periodize(pattern: &Element, e: u32) -> Result<Element> {
    let n = 1usize << e;
    let base = pattern.coeffs();
    let coeffs = (0..n).flat_map(|_| base.iter().copied()).collect();
    Element::new(*pattern.space(), pattern.level() + e, coeffs)
}

/// `x_n` and `y_n` on `L^p((0, 9))` for `n = 2^e`, `e` in `exps`.
pub fn nonadditive_pair(
    p: f64,
    exps: impl IntoIterator<Item = u32>,
) -> Result<(Vec<Element>, Vec<Element>)> {
    let (x0, y0) = nonadditive_patterns(p)?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for e in exps {
        xs.push(periodize(&x0, e)?);
        ys.push(periodize(&y0, e)?);
    }
    Ok((xs, ys))
}

/// Mean of `(x_0 + y_0)^3` over one period, integrated exactly.
pub fn nonadditive_constant() -> f64 {
    let (x0, y0) = nonadditive_patterns(4.0).expect("fixed patterns");
    let s = x0.add(&y0).expect("same space");
    s.map(|v| v * v * v).integral() / 9.0
}

fn nonadditive(r: &mut Reader) -> Result<Generated> {
    let p = r.get("p", 4.0);
    let min_exp = r.int("min_exp", 3, 0, 16)?;
    let max_exp = r.int("max_exp", 12, min_exp, 16)?;
    let (xs, _) = nonadditive_pair(p, min_exp..=max_exp)?;
    let seq = Seq::with_half_tail(xs)?;
    Ok((
        seq,
        expect(&[
            ("weak_limit", "-2/3".into()),
            ("delta_limit", "0".into()),
            ("sum_cubed_mean", format!("{}", nonadditive_constant())),
        ]),
        vec![],
    ))
}

fn nonlsc(r: &mut Reader) -> Result<Generated> {
    let p = r.get("p", 4.0);
    let min_exp = r.int("min_exp", 3, 0, 16)?;
    let max_exp = r.int("max_exp", 12, min_exp, 16)?;
    let space = Space::grid(p, 0.0, 9.0, 0)?;
    // ∫v³ = 8 - 8 = 0 and ∫v = 6 over a period; unit norm in L⁴.
    let scale = 24f64.powf(-0.25);
    let v0 = Element::from_cells(space, 0, |a, _| if a < 8.0 { scale } else { -2.0 * scale })?;
    let xs = (min_exp..=max_exp)
        .map(|e| periodize(&v0.refine(1)?, e))
        .collect::<Result<Vec<_>>>()?;
    let seq = Seq::with_half_tail(xs)?;
    Ok((
        seq,
        expect(&[
            ("weak_limit", format!("{}", 6.0 / 9.0 * scale)),
            ("delta_limit", "0".into()),
        ]),
        vec![],
    ))
}

/// Indicator of intervals of lengths `j / 2^k`, `j = 1..=2^k`, placed at
/// `(j - 1)(k + 2)` so that consecutive gaps exceed `k`.
fn linf_dyadic(r: &mut Reader) -> Result<Generated> {
    let p = r.get("p", 2.0);
    let depth = r.int("depth", 4, 1, 8)?;
    let end = ((1u64 << depth) * (depth as u64 + 2)) as f64;
    let space = Space::grid(p, 0.0, end, 0)?;
    let xs = (1..=depth)
        .map(|k| {
            let h = 0.5f64.powi(k as i32);
            let period = (k + 2) as f64;
            Element::from_cells(space, k, |a, _| {
                let j = (a / period).floor();
                let local = a - j * period;
                if j < (1u64 << k) as f64 && local < (j + 1.0) * h {
                    1.0
                } else {
                    0.0
                }
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let seq = Seq::with_half_tail(xs)?;
    Ok((
        seq,
        expect(&[
            ("sup_norm", "1".into()),
            (
                "distinct_profiles",
                format!("2^k at index k, {} at the last", 1u64 << depth),
            ),
        ]),
        vec![],
    ))
}

/// Lengths of the maximal runs of nonzero cells: the distinct translates of
/// the indicators making up `x`.
pub fn shift_profile_lengths(x: &Element) -> Vec<f64> {
    let h = x.cell_measure();
    let mut out = Vec::new();
    let mut run = 0usize;
    for &c in x.coeffs().iter().chain(std::iter::once(&0.0)) {
        if c != 0.0 {
            run += 1;
        } else if run > 0 {
            out.push(run as f64 * h);
            run = 0;
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

fn linfty_mass(r: &mut Reader) -> Result<Generated> {
    let p = r.get("p", 2.0);
    let count = r.int("count", 12, 2, 24)?;
    let offset = r.get("offset", 0.5);
    if crate::space::dyadic_level(offset).is_none_or(|l| l > 24) || !(0.0..1.0).contains(&offset) {
        return Err(Error::InvalidInput(format!(
            "offset {offset} must be a dyadic rational in [0, 1)"
        )));
    }
    let space = Space::grid(p, 0.0, 2.0, 0)?;
    let xs = (1..=count)
        .map(|k| Element::indicator(space, offset, offset + 0.5f64.powi(k as i32), 1.0))
        .collect::<Result<Vec<_>>>()?;
    let seq = Seq::with_half_tail(xs)?;
    Ok((
        seq,
        expect(&[
            ("sup_norm", "1 for every k".into()),
            ("lp_norm", "2^{-k/p}".into()),
            ("gauge", "(k, offset * 2^k)".into()),
        ]),
        vec![],
    ))
}

fn spreading(r: &mut Reader) -> Result<Generated> {
    let p = r.get("p", 2.0);
    let count = r.int("count", 64, 2, 1 << 16)?;
    let space = Space::sequence(p, 0, count as i64 - 1)?;
    let xs = (1..=count as usize)
        .map(|k| {
            let v = (k as f64).powf(-1.0 / p);
            Element::new(
                space,
                0,
                (0..count as usize)
                    .map(|i| if i < k { v } else { 0.0 })
                    .collect(),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let seq = Seq::with_half_tail(xs)?;
    Ok((
        seq,
        expect(&[("lp_norm", "1".into()), ("sup_norm", "k^{-1/p}".into())]),
        vec![],
    ))
}

/// Relative shape of the planted bubble profiles on quarter cells of `(0, 1)`.
const BUBBLE_SHAPE: [f64; 4] = [1.0, 0.8, 0.9, 0.7];

/// A bubble profile of norm `norm` on the view space `(-1, 2)` at level 2.
pub fn bubble_profile(p: f64, norm: f64, flip: bool) -> Result<Element> {
    let view = Space::grid(p, -1.0, 2.0, 0)?;
    let mut coeffs = vec![0.0; 12];
    for (i, v) in BUBBLE_SHAPE.iter().enumerate() {
        coeffs[4 + if flip { 3 - i } else { i }] = *v;
    }
    let shape = Element::new(view, 2, coeffs)?;
    Ok(shape.scaled(norm / shape.norm()))
}

/// Three decoupled bubbles riding on shift `2k`, shift `-2k - 1` and
/// dilation `k`, `k = 1..=count`, plus seeded dithered noise on pairs of
/// cells at level `count + 3`. The noise averages to zero over every cell of
/// level `count + 2` or coarser.
fn bubbles(r: &mut Reader) -> Result<Generated> {
    let p = r.get("p", 4.0);
    let count = r.int("count", 10, 4, 16)?;
    let norms = [
        r.get("norm_a", 0.5),
        r.get("norm_b", 0.4),
        r.get("norm_c", 0.3),
    ];
    let noise = r.get("noise", 0.02);
    let seed = r.get("seed", 7.0);
    if norms.iter().any(|n| !(*n >= 0.0 && *n <= 1.0)) || !(noise >= 0.0) {
        return Err(Error::InvalidInput(
            "bubble norms must lie in [0, 1], noise >= 0".into(),
        ));
    }
    let half = 2.0 * count as f64 + 2.0;
    let space = Space::grid(p, -half, half, 0)?;
    let noise_level = count + 3;
    let profiles = [
        bubble_profile(p, norms[0], false)?,
        bubble_profile(p, norms[1], true)?,
        bubble_profile(p, norms[2], false)?,
    ];
    let paths: [DislocationPath; 3] = [
        DislocationPath::new(
            (1..=count)
                .map(|k| Dislocation::translation(2.0 * k as f64))
                .collect(),
        ),
        DislocationPath::new(
            (1..=count)
                .map(|k| Dislocation::translation(-2.0 * k as f64 - 1.0))
                .collect(),
        ),
        DislocationPath::new(
            (1..=count)
                .map(|k| Dislocation::dilation(k as i32))
                .collect(),
        ),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed as u64);
    let cells = space.cell_count(noise_level)?;
    let mut xs = Vec::with_capacity(count as usize);
    for k in 0..count as usize {
        let mut x = Element::zeros(space, noise_level)?;
        for (w, path) in profiles.iter().zip(&paths) {
            x = x.add(&apply_into(&path.get(k), w, &space)?)?;
        }
        let mut dither = vec![0.0; cells];
        for pair in dither.chunks_mut(2) {
            let s = if rng.random::<bool>() { noise } else { -noise };
            pair[0] = s;
            pair[1] = -s;
        }
        x = x.add(&Element::new(space, noise_level, dither)?)?;
        xs.push(x);
    }
    let seq = Seq::with_half_tail(xs)?;
    let planted = profiles
        .into_iter()
        .zip(paths)
        .map(|(w, path)| PlantedProfile { path, w })
        .collect();
    Ok((
        seq,
        expect(&[
            ("profiles", "3".into()),
            (
                "profile_norms",
                format!("{}, {}, {}", norms[0], norms[1], norms[2]),
            ),
            ("noise_sup_norm", format!("{noise}")),
        ]),
        planted,
    ))
}
