//! Reference computations written independently of the library.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn euclid(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn sup(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Distance from `x` to the nearest integer, by comparing floor and ceiling.
pub fn int_gap(x: f64) -> f64 {
    (x - x.floor()).min(x.ceil() - x)
}

/// `dist(ta, ℤⁿ)`.
pub fn dist(a: &[f64], t: f64) -> f64 {
    a.iter().map(|x| int_gap(t * x).powi(2)).sum::<f64>().sqrt()
}

/// Minimum of `dist(ta, ℤⁿ)` on the grid `lo, lo + step, …, hi`.
pub fn grid_min_dist(a: &[f64], lo: f64, hi: f64, step: f64) -> f64 {
    let n = ((hi - lo) / step).ceil() as usize;
    (0..=n)
        .map(|i| dist(a, (lo + i as f64 * step).min(hi)))
        .fold(f64::INFINITY, f64::min)
}

/// First grid point `t = i·step` with `dist(ta) ≤ min(γ t ‖a‖, α)`.
pub fn grid_lcd(a: &[f64], gamma: f64, alpha: f64, t_max: f64, step: f64) -> Option<f64> {
    let an = euclid(a);
    let mut i = 1usize;
    loop {
        let t = i as f64 * step;
        if t > t_max {
            return None;
        }
        if dist(a, t) <= alpha.min(gamma * t * an) {
            return Some(t);
        }
        i += 1;
    }
}

/// Largest mass in a closed window `[x, x + λ]`, trying every atom as the
/// left end. Quadratic; meant for small supports.
pub fn brute_q(atoms: &[(f64, f64)], lambda: f64) -> f64 {
    atoms
        .iter()
        .map(|&(x, _)| {
            atoms
                .iter()
                .filter(|&&(y, _)| y >= x && y <= x + lambda)
                .map(|&(_, p)| p)
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}

/// Window maximum for larger supports: sort, then binary search for the
/// right end of each window. `slack` widens windows to absorb rounding of
/// atoms that coincide mathematically.
pub fn sorted_q(atoms: &[(f64, f64)], lambda: f64, slack: f64) -> f64 {
    let mut v = atoms.to_vec();
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut prefix = vec![0.0];
    for &(_, p) in &v {
        prefix.push(prefix.last().unwrap() + p);
    }
    let mut best = 0.0_f64;
    for (i, &(x, _)) in v.iter().enumerate() {
        let first = v.partition_point(|&(y, _)| y < x - slack);
        let end = v.partition_point(|&(y, _)| y <= x + lambda + slack);
        best = best.max(prefix[end] - prefix[first.min(i)]);
    }
    best
}

/// Atoms of `X_1 + … + X_n` for i.i.d. `X` on `law`, one per multiset of
/// outcomes with its multinomial weight. Coinciding sums are not merged.
pub fn iid_sum_atoms(law: &[(f64, f64)], n: usize) -> Vec<(f64, f64)> {
    let k = law.len();
    let mut out = Vec::new();
    let mut counts = vec![0usize; k];
    fn rec(law: &[(f64, f64)], i: usize, left: usize, counts: &mut Vec<usize>, out: &mut Vec<(f64, f64)>, n: usize) {
        if i + 1 == law.len() {
            counts[i] = left;
            let mut ln_w = ln_factorial(n);
            let mut x = 0.0;
            for (j, &c) in counts.iter().enumerate() {
                ln_w += c as f64 * law[j].1.ln() - ln_factorial(c);
                x += c as f64 * law[j].0;
            }
            out.push((x, ln_w.exp()));
            return;
        }
        for c in 0..=left {
            counts[i] = c;
            rec(law, i + 1, left - c, counts, out, n);
        }
    }
    rec(law, 0, n, &mut counts, &mut out, n);
    out
}

pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// `n choose k` in exact integer arithmetic.
pub fn binomial(n: u32, k: u32) -> u128 {
    let mut c: u128 = 1;
    for i in 0..k as u128 {
        c = c * (n as u128 - i) / (i + 1);
    }
    c
}

/// `|Σ p e^{itx}|`.
pub fn abs_char(law: &[(f64, f64)], t: f64) -> f64 {
    let (re, im) = law.iter().fold((0.0, 0.0), |(re, im), &(x, p)| {
        (re + p * (t * x).cos(), im + p * (t * x).sin())
    });
    re.hypot(im)
}

/// Composite Simpson rule with `panels` (even) subintervals.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let panels = panels + panels % 2;
    let h = (b - a) / panels as f64;
    let mut s = f(a) + f(b);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// `λ ∫_0^{1/λ} g(t) dt` with enough panels for a frequency up to `freq`.
pub fn esseen_reference<F: Fn(f64) -> f64>(g: F, lambda: f64, freq: f64) -> f64 {
    let upper = 1.0 / lambda;
    let panels = ((upper * freq.max(1.0)) * 400.0).ceil().max(4000.0) as usize;
    lambda * simpson(g, 0.0, upper, panels)
}

/// Law on `k` atoms in `[-span, span]` with random positive weights.
pub fn random_atoms<R: Rng>(r: &mut R, k: usize, span: f64) -> Vec<(f64, f64)> {
    let w: Vec<f64> = (0..k).map(|_| r.random_range(0.05..1.0)).collect();
    let total: f64 = w.iter().sum();
    w.iter().map(|wi| (r.random_range(-span..=span), wi / total)).collect()
}

/// Law of `X − X'` for independent copies of `law`, unmerged.
pub fn difference_law(law: &[(f64, f64)]) -> Vec<(f64, f64)> {
    law.iter()
        .flat_map(|&(x, p)| law.iter().map(move |&(y, q)| (x - y, p * q)))
        .collect()
}

/// `E min(X²/τ², 1)`.
pub fn truncated_second_moment(law: &[(f64, f64)], tau: f64) -> f64 {
    law.iter().map(|&(x, p)| p * (x * x / (tau * tau)).min(1.0)).sum()
}

/// `Σ_j 4^{-j} P(|X| ∈ (2^{-j}, 2^{-j+1}])` with shell 0 holding `|X| > 1`.
pub fn shell_functional(law: &[(f64, f64)]) -> f64 {
    law.iter()
        .filter(|&&(x, _)| x != 0.0)
        .map(|&(x, p)| {
            let ax = x.abs();
            if ax > 1.0 {
                return p;
            }
            let mut j = 1;
            let mut lower = 0.5;
            while ax <= lower {
                j += 1;
                lower *= 0.5;
            }
            p * 0.25f64.powi(j)
        })
        .sum()
}

/// Least-squares slope.
pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (sx, sy): (f64, f64) = (x.iter().sum(), y.iter().sum());
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let sxx: f64 = x.iter().map(|a| a * a).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}
