//! Chebyshev centers: minimisers of `y ↦ max_i ‖x_i - y‖`.
//!
//! A short run of averaged subgradient steps from the barycenter is followed
//! by a bundle-style polish: each step minimises the max of the linearised
//! distances plus a proximal term, solved in its dual over the simplex.

use crate::error::{Error, Result};
use crate::space::{lp_norm, power, Element};

#[derive(Clone, Copy, Debug)]
pub struct ChebyshevOptions {
    pub max_iterations: usize,
    /// Subgradient iterations before polishing.
    pub warmup: usize,
    /// Stop once the best radius improves by less than
    /// `min_improvement * initial radius` over this many iterations.
    pub window: usize,
    pub min_improvement: f64,
}

impl Default for ChebyshevOptions {
    fn default() -> Self {
        ChebyshevOptions {
            max_iterations: 20_000,
            warmup: 100,
            window: 50,
            min_improvement: 1e-9,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ChebyshevCenter {
    pub center: Element,
    pub radius: f64,
    pub iterations: usize,
}

/// Center and radius of a finite set with default options.
pub fn chebyshev_center(points: &[Element]) -> Result<(Element, f64)> {
    let c = chebyshev_center_with(points, &ChebyshevOptions::default())?;
    Ok((c.center, c.radius))
}

struct Problem {
    points: Vec<Vec<f64>>,
    p: f64,
    mu: f64,
}

impl Problem {
    fn distances(&self, y: &[f64], buf: &mut [f64]) -> Vec<f64> {
        self.points
            .iter()
            .map(|x| {
                for ((b, xi), yi) in buf.iter_mut().zip(x).zip(y) {
                    *b = xi - yi;
                }
                lp_norm(buf, self.p, self.mu)
            })
            .collect()
    }

    fn objective(&self, y: &[f64], buf: &mut [f64]) -> f64 {
        self.distances(y, buf).into_iter().fold(0.0, f64::max)
    }

    /// `conj(x_i - y)`, the negative gradient of `‖x_i - y‖` in `y` with
    /// respect to the `μ`-weighted inner product.
    fn ascent(&self, i: usize, y: &[f64], dist: f64) -> Vec<f64> {
        if dist == 0.0 {
            return vec![0.0; y.len()];
        }
        let pw = power(self.p - 1.0);
        self.points[i]
            .iter()
            .zip(y)
            .map(|(x, y)| {
                let d = x - y;
                d.signum() * pw(d.abs() / dist)
            })
            .collect()
    }

    fn dot(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() * self.mu
    }
}

/// Cuts with their Gram matrix, kept in sync as cuts come and go.
#[derive(Default)]
struct Bundle {
    cuts: Vec<(Vec<f64>, f64)>,
    gram: Vec<Vec<f64>>,
}

impl Bundle {
    fn push(&mut self, problem: &Problem, g: Vec<f64>, l: f64) {
        let row: Vec<f64> = self.cuts.iter().map(|c| problem.dot(&c.0, &g)).collect();
        for (r, v) in self.gram.iter_mut().zip(&row) {
            r.push(*v);
        }
        let mut row = row;
        row.push(problem.dot(&g, &g));
        self.gram.push(row);
        self.cuts.push((g, l));
    }

    fn retain(&mut self, keep: &[bool]) {
        let mut it = keep.iter();
        self.cuts.retain(|_| *it.next().unwrap_or(&true));
        let mut it = keep.iter();
        self.gram.retain(|_| *it.next().unwrap_or(&true));
        for r in &mut self.gram {
            let mut it = keep.iter();
            r.retain(|_| *it.next().unwrap_or(&true));
        }
    }
}

pub fn chebyshev_center_with(
    points: &[Element],
    opts: &ChebyshevOptions,
) -> Result<ChebyshevCenter> {
    let first = points
        .first()
        .ok_or_else(|| Error::InvalidInput("Chebyshev center of an empty set".into()))?;
    let space = *first.space();
    if points.iter().any(|x| *x.space() != space) {
        return Err(Error::GeometryMismatch);
    }
    let level = points.iter().map(Element::level).max().unwrap_or(0);
    let aligned = points
        .iter()
        .map(|x| x.refine(level).map(Element::into_coeffs))
        .collect::<Result<Vec<_>>>()?;
    let n = aligned[0].len();
    let problem = Problem {
        points: aligned,
        p: space.p(),
        mu: space.cell_measure(level),
    };
    let m = problem.points.len();
    let mut buf = vec![0.0; n];

    let mut y = vec![0.0; n];
    for x in &problem.points {
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi += xi / m as f64;
        }
    }
    let initial = problem.objective(&y, &mut buf);
    if initial == 0.0 {
        return Ok(ChebyshevCenter {
            center: Element::new(space, level, y)?,
            radius: 0.0,
            iterations: 0,
        });
    }

    let mut best = y.clone();
    let mut best_f = initial;
    let mut history = vec![initial];
    let converged = |history: &[f64]| {
        let t = history.len();
        t > opts.window
            && history[t - 1 - opts.window] - history[t - 1] < opts.min_improvement * initial
    };

    // Averaged subgradient warm-up.
    let step = 0.25 * initial;
    let mut avg = y.clone();
    for t in 1..=opts.warmup.min(opts.max_iterations) {
        let d = problem.distances(&y, &mut buf);
        let (j, &dj) = d
            .iter()
            .enumerate()
            .fold((0, &d[0]), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        let g = problem.ascent(j, &y, dj);
        let gn = problem.dot(&g, &g).sqrt();
        if gn == 0.0 {
            break;
        }
        let s = step / (t as f64).sqrt() / gn;
        for (yi, gi) in y.iter_mut().zip(&g) {
            *yi += s * gi;
        }
        let w = 1.0 / (t as f64 + 1.0);
        for (ai, yi) in avg.iter_mut().zip(&y) {
            *ai += w * (yi - *ai);
        }
        for cand in [&y, &avg] {
            let f = problem.objective(cand, &mut buf);
            if f < best_f {
                best_f = f;
                best.clone_from(cand);
            }
        }
        history.push(best_f);
    }

    // Proximal bundle polish. Each cut is a linearisation of one distance,
    // stored as its ascent direction and its value at the prox center.
    let mut yc = best.clone();
    let mut fc = best_f;
    let mut bundle = Bundle::default();
    let add_cuts = |bundle: &mut Bundle, z: &[f64], shift: &[f64], floor: f64, buf: &mut [f64]| {
        let dz = problem.distances(z, buf);
        for (i, &di) in dz.iter().enumerate() {
            if di >= floor {
                let g = problem.ascent(i, z, di);
                let l = di + problem.dot(&g, shift);
                bundle.push(&problem, g, l);
            }
        }
    };
    let zero = vec![0.0; n];
    add_cuts(&mut bundle, &yc, &zero, 0.0, &mut buf);
    let mut rho = 1.0 / fc.max(f64::MIN_POSITIVE);
    let mut iterations = history.len() - 1;
    while iterations < opts.max_iterations {
        iterations += 1;
        let cuts = &bundle.cuts;
        let values: Vec<f64> = cuts.iter().map(|c| c.1).collect();
        let lambda = simplex_qp(&bundle.gram, &values, rho);
        // d = (1/ρ) Σ λ_j g_j
        let mut d = vec![0.0; n];
        for (l, (g, _)) in lambda.iter().zip(cuts) {
            if *l != 0.0 {
                for (di, gi) in d.iter_mut().zip(g) {
                    *di += l * gi / rho;
                }
            }
        }
        let drops: Vec<f64> = cuts.iter().map(|(g, _)| problem.dot(g, &d)).collect();
        let model = cuts
            .iter()
            .zip(&drops)
            .map(|((_, l), dg)| l - dg)
            .fold(f64::NEG_INFINITY, f64::max);
        let predicted = fc - model;
        if !(predicted > 1e-15 * fc) {
            break;
        }
        let trial: Vec<f64> = yc.iter().zip(&d).map(|(y, di)| y + di).collect();
        let ft = problem.objective(&trial, &mut buf);
        if ft <= fc - 0.1 * predicted {
            for ((_, l), dg) in bundle.cuts.iter_mut().zip(&drops) {
                *l -= dg;
            }
            if ft <= fc - 0.5 * predicted {
                rho *= 0.5;
            }
            yc = trial;
            fc = ft;
            add_cuts(&mut bundle, &yc, &zero, 0.0, &mut buf);
            if fc < best_f {
                best_f = fc;
                best.clone_from(&yc);
            }
            history.push(best_f);
            if converged(&history) {
                break;
            }
        } else {
            add_cuts(&mut bundle, &trial, &d, model, &mut buf);
            rho *= 1.5;
        }
        if bundle.cuts.len() > (4 * m).max(64) {
            let keep: Vec<bool> = lambda.iter().map(|l| *l > 0.0).collect();
            bundle.retain(&keep);
        }
    }
    let center = Element::new(space, level, best)?;
    if iterations >= opts.max_iterations && !converged(&history) {
        return Err(Error::NonConvergence {
            iterations,
            radius: best_f,
            best: Box::new(center),
        });
    }
    Ok(ChebyshevCenter {
        center,
        radius: best_f,
        iterations,
    })
}

/// `argmin_{λ ∈ Δ} λᵀGλ / (2ρ) - λᵀf` by a primal active-set method. Each
/// pass solves the equality-constrained problem on the current support.
fn simplex_qp(gram: &[Vec<f64>], f: &[f64], rho: f64) -> Vec<f64> {
    let m = f.len();
    if m == 1 {
        return vec![1.0];
    }
    let h = |i: usize, j: usize| gram[i][j] / rho;
    let ridge = 1e-13
        * (0..m)
            .map(|i| h(i, i))
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
    let imax = (0..m).fold(0, |b, i| if f[i] > f[b] { i } else { b });
    let mut lambda = vec![0.0; m];
    lambda[imax] = 1.0;
    let mut support = vec![imax];
    let scale = f.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
    for _ in 0..20 * m {
        let mu = support_solve(&support, &h, f, ridge);
        if mu.iter().all(|v| *v >= 0.0) {
            for (k, &i) in support.iter().enumerate() {
                lambda[i] = mu[k];
            }
            let grad: Vec<f64> = (0..m)
                .map(|i| support.iter().map(|&j| h(i, j) * lambda[j]).sum::<f64>() - f[i])
                .collect();
            let level = support.iter().map(|&i| grad[i] * lambda[i]).sum::<f64>();
            let entering =
                (0..m)
                    .filter(|i| !support.contains(i))
                    .fold(None, |best: Option<usize>, i| match best {
                        Some(b) if grad[b] <= grad[i] => Some(b),
                        _ => Some(i),
                    });
            match entering {
                Some(i) if grad[i] < level - 1e-15 * scale => support.push(i),
                _ => break,
            }
        } else {
            // Move toward the infeasible solution until a weight hits zero.
            let mut alpha = 1.0f64;
            for (k, &i) in support.iter().enumerate() {
                if mu[k] < 0.0 {
                    alpha = alpha.min(lambda[i] / (lambda[i] - mu[k]));
                }
            }
            for (k, &i) in support.iter().enumerate() {
                lambda[i] += alpha * (mu[k] - lambda[i]);
            }
            let before = support.len();
            support.retain(|&i| lambda[i] > 1e-15);
            if support.len() == before {
                // Degenerate step; drop the most negative component.
                let (k, _) = mu.iter().enumerate().fold((0, f64::INFINITY), |a, (k, v)| {
                    if *v < a.1 {
                        (k, *v)
                    } else {
                        a
                    }
                });
                support.remove(k);
            }
            for i in 0..m {
                if !support.contains(&i) {
                    lambda[i] = 0.0;
                }
            }
            let total: f64 = lambda.iter().sum();
            for l in lambda.iter_mut() {
                *l /= total;
            }
        }
    }
    lambda
}

/// Solves `H_SS μ + ν1 = f_S`, `1ᵀμ = 1` by Gaussian elimination.
fn support_solve(
    support: &[usize],
    h: &impl Fn(usize, usize) -> f64,
    f: &[f64],
    ridge: f64,
) -> Vec<f64> {
    let k = support.len();
    let n = k + 1;
    let mut a = vec![vec![0.0; n + 1]; n];
    for (r, &i) in support.iter().enumerate() {
        for (c, &j) in support.iter().enumerate() {
            a[r][c] = h(i, j) + if r == c { ridge } else { 0.0 };
        }
        a[r][k] = 1.0;
        a[r][n] = f[i];
    }
    for c in 0..k {
        a[k][c] = 1.0;
    }
    a[k][n] = 1.0;
    for col in 0..n {
        let piv = (col..n).fold(col, |b, r| {
            if a[r][col].abs() > a[b][col].abs() {
                r
            } else {
                b
            }
        });
        a.swap(col, piv);
        let d = a[col][col];
        if d == 0.0 {
            continue;
        }
        for r in 0..n {
            if r != col {
                let factor = a[r][col] / d;
                if factor != 0.0 {
                    for c in col..=n {
                        a[r][c] -= factor * a[col][c];
                    }
                }
            }
        }
    }
    (0..k)
        .map(|r| {
            if a[r][r] == 0.0 {
                0.0
            } else {
                a[r][n] / a[r][r]
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Space;

    #[test]
    fn singleton() {
        let s = Space::sequence(3.0, 0, 2).unwrap();
        let a = Element::new(s, 0, vec![1.0, -2.0, 0.5]).unwrap();
        let (c, r) = chebyshev_center(std::slice::from_ref(&a)).unwrap();
        assert_eq!(c, a);
        assert_eq!(r, 0.0);
    }

    #[test]
    fn hilbert_pair_midpoint() {
        let s = Space::sequence(2.0, 0, 2).unwrap();
        let a = Element::new(s, 0, vec![1.0, 0.0, 2.0]).unwrap();
        let b = Element::new(s, 0, vec![-1.0, 3.0, 0.0]).unwrap();
        let (c, r) = chebyshev_center(&[a.clone(), b.clone()]).unwrap();
        let mid = a.add(&b).unwrap().scaled(0.5);
        assert!(c.distance(&mid).unwrap() < 1e-6);
        assert!((r - a.distance(&b).unwrap() / 2.0).abs() < 1e-9);
    }

    #[test]
    fn l4_pair_on_symmetric_line() {
        let s = Space::sequence(4.0, 0, 1).unwrap();
        let a = Element::basis(s, 0).unwrap();
        let b = Element::basis(s, 1).unwrap();
        let (c, r) = chebyshev_center(&[a, b]).unwrap();
        // One-dimensional oracle along y = (t, t).
        let g = |t: f64| ((1.0 - t).powi(4) + t.powi(4)).powf(0.25);
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..200 {
            let (m1, m2) = (lo + (hi - lo) / 3.0, hi - (hi - lo) / 3.0);
            if g(m1) < g(m2) {
                hi = m2
            } else {
                lo = m1
            }
        }
        assert!((r - g(lo)).abs() < 1e-9);
        assert!((r - 2f64.powf(0.25) / 2.0).abs() < 1e-9);
        assert!((c.coeffs()[0] - 0.5).abs() < 1e-5 && (c.coeffs()[1] - 0.5).abs() < 1e-5);
    }

    #[test]
    fn simplex_qp_balances_opposite_directions() {
        // Two cuts with opposite directions and equal values: λ = (1/2, 1/2).
        let gram = vec![vec![1.0, -1.0], vec![-1.0, 1.0]];
        let l = simplex_qp(&gram, &[1.0, 1.0], 1.0);
        assert!((l[0] - 0.5).abs() < 1e-12 && (l[1] - 0.5).abs() < 1e-12);
        // A dominant value keeps all weight.
        let l = simplex_qp(&gram, &[10.0, 0.0], 1.0);
        assert!((l[0] - 1.0).abs() < 1e-12 && l[1] == 0.0);
    }

    #[test]
    fn empty_set_is_an_error() {
        assert!(chebyshev_center(&[]).is_err());
    }
}
