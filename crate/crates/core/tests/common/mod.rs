//! Oracles shared by the integration tests. None of them call into the
//! library's own contraction code.

#![allow(dead_code)]

use protes::TensorTrain;
use rand::Rng;

/// Random TT with `d <= d_max`, mode sizes in `2..=n_max` and interior ranks
/// in `1..=r_max`. Entries are uniform on `(0, 1)` or `(-1, 1)`.
pub fn random_tt<R: Rng>(rng: &mut R, d_max: usize, n_max: usize, r_max: usize, nonneg: bool) -> TensorTrain {
    random_tt_in(rng, d_max, n_max, r_max, if nonneg { 0.0 } else { -1.0 })
}

/// As [`random_tt`] with entries uniform on `(lo, 1)`.
pub fn random_tt_in<R: Rng>(rng: &mut R, d_max: usize, n_max: usize, r_max: usize, lo: f64) -> TensorTrain {
    let d = rng.gen_range(1..=d_max);
    let shape: Vec<usize> = (0..d).map(|_| rng.gen_range(2..=n_max)).collect();
    let mut ranks: Vec<usize> = (0..=d).map(|_| rng.gen_range(1..=r_max)).collect();
    ranks[0] = 1;
    ranks[d] = 1;
    let cores = (0..d)
        .map(|i| {
            (0..ranks[i] * shape[i] * ranks[i + 1])
                .map(|_| {
                    let v: f64 = rng.gen_range(lo..1.0);
                    if v == 0.0 {
                        0.5
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect();
    TensorTrain::from_cores(shape, ranks, cores).unwrap()
}

/// Row-major list of every multi-index of `shape`.
pub fn all_indices(shape: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &n in shape {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..n).map(move |v| {
                    let mut x = prefix.clone();
                    x.push(v);
                    x
                })
            })
            .collect();
    }
    out
}

/// `p[x] = Σ_{α_1..α_{d-1}} Π_i G_i[α_{i-1}, x_i, α_i]`, enumerating every
/// tuple of rank indices explicitly.
pub fn brute_force_entry(tt: &TensorTrain, x: &[usize]) -> f64 {
    let d = tt.ndim();
    let ranks = tt.ranks();
    let inner: Vec<usize> = ranks[1..d].to_vec();
    let mut total = 0.0;
    for alphas in all_indices(&inner) {
        let mut prod = 1.0;
        for i in 0..d {
            let a = if i == 0 { 0 } else { alphas[i - 1] };
            let b = if i + 1 == d { 0 } else { alphas[i] };
            prod *= tt.entry(i, a, x[i], b);
        }
        total += prod;
    }
    total
}

/// `Σ Π |G|` over the same terms: the scale that bounds rounding error of a
/// signed contraction.
pub fn brute_force_abs_entry(tt: &TensorTrain, x: &[usize]) -> f64 {
    let d = tt.ndim();
    let inner: Vec<usize> = tt.ranks()[1..d].to_vec();
    all_indices(&inner)
        .iter()
        .map(|alphas| {
            (0..d)
                .map(|i| {
                    let a = if i == 0 { 0 } else { alphas[i - 1] };
                    let b = if i + 1 == d { 0 } else { alphas[i] };
                    tt.entry(i, a, x[i], b).abs()
                })
                .product::<f64>()
        })
        .sum()
}

pub fn full_tensor(tt: &TensorTrain) -> Vec<f64> {
    all_indices(tt.shape()).iter().map(|x| brute_force_entry(tt, x)).collect()
}

/// Lengths of the maximal runs of ones.
pub fn runs_of_ones(x: &[usize]) -> Vec<usize> {
    let mut runs = Vec::new();
    let mut current = 0;
    for &v in x {
        if v == 1 {
            current += 1;
        } else if current > 0 {
            runs.push(current);
            current = 0;
        }
    }
    if current > 0 {
        runs.push(current);
    }
    runs
}

/// Inequality form: with `x[t] = 0` outside `1..=N`,
/// `x[t] >= x[t-1] - x[t-j]` for `j = 2..=l` and every `1 <= t <= N + l - 1`.
pub fn satisfies_inequalities(x: &[usize], l: usize) -> bool {
    let n = x.len() as i64;
    let at = |t: i64| -> i64 {
        if t >= 1 && t <= n {
            x[(t - 1) as usize] as i64
        } else {
            0
        }
    };
    (1..=n + l as i64 - 1).all(|t| (2..=l as i64).all(|j| at(t) >= at(t - 1) - at(t - j)))
}

/// Number of binary words of length `d` whose runs of ones all have length
/// at least `l`, by dynamic programming over (last symbol, open run length).
pub fn count_min_run_words(d: usize, l: usize) -> u64 {
    // state: 0 = last symbol 0 (or empty), s in 1..=l = open run of length s (capped)
    let mut counts = vec![0u64; l + 1];
    counts[0] = 1;
    for _ in 0..d {
        let mut next = vec![0u64; l + 1];
        for (s, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if s == 0 || s == l {
                next[0] += c;
            }
            next[(s + 1).min(l)] += c;
        }
        counts = next;
    }
    counts[0] + if l > 0 { counts[l] } else { 0 }
}

/// Goodness of fit of empirical sample counts against `p / Σp`.
pub struct Fit {
    pub tv: f64,
    pub chi2: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Compares `samples` with the normalized `|weights|`. Cells with expected
/// count below 5 are pooled into one cell for the chi-squared statistic.
pub fn goodness_of_fit(weights: &[f64], counts: &[u64]) -> Fit {
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    let total_w: f64 = weights.iter().map(|w| w.abs()).sum();
    let n: u64 = counts.iter().sum();
    let probs: Vec<f64> = weights.iter().map(|w| w.abs() / total_w).collect();
    let tv = 0.5
        * probs
            .iter()
            .zip(counts)
            .map(|(p, &c)| (p - c as f64 / n as f64).abs())
            .sum::<f64>();
    let mut chi2 = 0.0;
    let mut cells = 0;
    let (mut pooled_e, mut pooled_o) = (0.0, 0.0);
    for (p, &c) in probs.iter().zip(counts) {
        let e = p * n as f64;
        if e < 5.0 {
            pooled_e += e;
            pooled_o += c as f64;
        } else {
            chi2 += (c as f64 - e).powi(2) / e;
            cells += 1;
        }
    }
    if pooled_e > 0.0 {
        chi2 += (pooled_o - pooled_e).powi(2) / pooled_e;
        cells += 1;
    }
    let dof = cells.max(2) - 1;
    let p_value = 1.0 - ChiSquared::new(dof as f64).unwrap().cdf(chi2);
    Fit { tv, chi2, dof, p_value }
}

/// Counts of each row-major cell among `samples`.
pub fn histogram(shape: &[usize], samples: &[protes::MultiIndex]) -> Vec<u64> {
    let total: usize = shape.iter().product();
    let mut counts = vec![0u64; total];
    for x in samples {
        let pos = x.iter().zip(shape).fold(0, |acc, (&v, &n)| acc * n + v);
        counts[pos] += 1;
    }
    counts
}

/// Copy of `tt` with one core entry shifted by `delta`.
pub fn perturbed(tt: &TensorTrain, core: usize, at: usize, delta: f64) -> TensorTrain {
    let mut cores = tt.cores().to_vec();
    cores[core][at] += delta;
    TensorTrain::from_cores(tt.shape().to_vec(), tt.ranks().to_vec(), cores).unwrap()
}

/// Largest relative deviation between `grad` and central differences of `f`
/// with step `h`, over every core entry. Entries where both are exactly zero
/// count as agreeing.
pub fn max_fd_error<F>(tt: &TensorTrain, grad: &[Vec<f64>], h: f64, f: F) -> f64
where
    F: Fn(&TensorTrain) -> f64,
{
    max_fd_error_with_floor(tt, grad, h, 0.0, f)
}

/// As [`max_fd_error`] with `floor` added to the denominator, for entries
/// whose true value is near the round-off of the difference quotient.
pub fn max_fd_error_with_floor<F>(tt: &TensorTrain, grad: &[Vec<f64>], h: f64, floor: f64, f: F) -> f64
where
    F: Fn(&TensorTrain) -> f64,
{
    let mut worst: f64 = 0.0;
    for (i, g) in grad.iter().enumerate() {
        for (at, &gi) in g.iter().enumerate() {
            let fd = (f(&perturbed(tt, i, at, h)) - f(&perturbed(tt, i, at, -h))) / (2.0 * h);
            let scale = gi.abs().max(fd.abs()) + floor;
            if scale > 0.0 {
                worst = worst.max((gi - fd).abs() / scale);
            }
        }
    }
    worst
}

/// `k` random indices of `tt`'s shape.
pub fn random_selection<R: Rng>(rng: &mut R, tt: &TensorTrain, k: usize) -> Vec<protes::MultiIndex> {
    (0..k)
        .map(|_| protes::MultiIndex(tt.shape().iter().map(|&n| rng.gen_range(0..n)).collect()))
        .collect()
}
