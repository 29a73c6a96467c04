//! Log-likelihood of selected candidates and its exact gradient.

use crate::error::{Error, Result};
use crate::tensor_train::{rescale, MultiIndex, TensorTrain, LOG_FLOOR};

/// Per-core gradient arrays, laid out exactly like the cores.
pub type CoreGradients = Vec<Vec<f64>>;

/// `Σ_s log(|p[x_s]| + LOG_FLOOR)` over the selected candidates.
pub fn loss(tt: &TensorTrain, selected: &[MultiIndex]) -> Result<f64> {
    if selected.is_empty() {
        return Err(Error::EmptySelection);
    }
    selected.iter().map(|x| tt.log_eval(x)).sum()
}

/// Gradient of `Σ_s log|p[x_s]|` with respect to every core entry.
///
/// For one index, `p = L_{i-1} G_i[:, n_i, :] R_{i+1}` where `L` and `R` are
/// the products of the other chosen slices, so the gradient of `log|p|` on
/// slice `n_i` of core `i` is `outer(L_{i-1}, R_{i+1}) / p`. Both interface
/// vectors are kept at unit max-norm; their scales cancel against `p`.
pub fn loss_gradient(tt: &TensorTrain, selected: &[MultiIndex]) -> Result<CoreGradients> {
    if selected.is_empty() {
        return Err(Error::EmptySelection);
    }
    let d = tt.ndim();
    let mut grad: CoreGradients = tt.cores().iter().map(|c| vec![0.0; c.len()]).collect();
    let floor = LOG_FLOOR.ln();

    let mut lefts: Vec<Vec<f64>> = vec![Vec::new(); d + 1];
    let mut rights: Vec<Vec<f64>> = vec![Vec::new(); d + 1];
    let mut tmp = Vec::new();
    for (position, x) in selected.iter().enumerate() {
        tt.check_index(x)?;
        let vanishing = Error::VanishingLikelihood { position };

        lefts[0] = vec![1.0];
        let mut log_p = 0.0;
        for i in 0..d {
            tt.left_mul(i, x[i], &lefts[i], &mut tmp);
            log_p += rescale(&mut tmp).ok_or_else(|| vanishing.clone())?;
            lefts[i + 1] = tmp.clone();
        }
        log_p += lefts[d][0].abs().ln();
        if log_p <= floor {
            return Err(vanishing);
        }

        rights[d] = vec![1.0];
        for i in (0..d).rev() {
            tt.right_mul(i, x[i], &rights[i + 1], &mut tmp);
            rescale(&mut tmp).ok_or_else(|| vanishing.clone())?;
            rights[i] = tmp.clone();
        }

        for i in 0..d {
            let (_, modes, r1) = tt.core_shape(i);
            let left = &lefts[i];
            let right = &rights[i + 1];
            tt.left_mul(i, x[i], left, &mut tmp);
            let p_scaled: f64 = tmp.iter().zip(right).map(|(a, b)| a * b).sum();
            if p_scaled == 0.0 || !p_scaled.is_finite() {
                return Err(vanishing);
            }
            let g = &mut grad[i];
            for (a, &la) in left.iter().enumerate() {
                let base = (a * modes + x[i]) * r1;
                for (b, &rb) in right.iter().enumerate() {
                    g[base + b] += la * rb / p_scaled;
                }
            }
        }
    }
    Ok(grad)
}

/// `log Z` with `Z` the full contraction of the absolute cores, so that
/// `|p[x]| <= Z` for every index, with equality of `Σ_x |p[x]|` and `Z`
/// whenever all entries are nonnegative.
pub fn log_normalizer(tt: &TensorTrain) -> Result<f64> {
    Ok(Normalizer::new(tt)?.log_z)
}

/// Gradient of [`log_normalizer`]. Zero entries get the zero subgradient.
pub fn log_normalizer_gradient(tt: &TensorTrain) -> Result<CoreGradients> {
    let norm = Normalizer::new(tt)?;
    Ok((0..tt.ndim())
        .map(|i| {
            let (r0, modes, r1) = tt.core_shape(i);
            let core = tt.core(i);
            let (l, r) = (&norm.lefts[i], &norm.rights[i + 1]);
            let scaled = norm.scaled[i];
            let mut g = vec![0.0; core.len()];
            for a in 0..r0 {
                for n in 0..modes {
                    for b in 0..r1 {
                        let at = (a * modes + n) * r1 + b;
                        if core[at] != 0.0 {
                            g[at] = core[at].signum() * l[a] * r[b] / scaled;
                        }
                    }
                }
            }
            g
        })
        .collect())
}

/// `Σ_s log|p[x_s]| - k log Z`: the log-likelihood of the selection under the
/// normalized model `|p| / Z`.
pub fn normalized_loss(tt: &TensorTrain, selected: &[MultiIndex]) -> Result<f64> {
    Ok(loss(tt, selected)? - selected.len() as f64 * log_normalizer(tt)?)
}

/// Gradient of [`normalized_loss`].
pub fn normalized_loss_gradient(tt: &TensorTrain, selected: &[MultiIndex]) -> Result<CoreGradients> {
    let mut grad = loss_gradient(tt, selected)?;
    let k = selected.len() as f64;
    for (g, z) in grad.iter_mut().zip(log_normalizer_gradient(tt)?) {
        for (gi, zi) in g.iter_mut().zip(z) {
            *gi -= k * zi;
        }
    }
    Ok(grad)
}

/// Prefix and suffix products of the mode-summed absolute cores.
struct Normalizer {
    log_z: f64,
    lefts: Vec<Vec<f64>>,
    rights: Vec<Vec<f64>>,
    /// `Z` for core `i` in the scale of `lefts[i]` and `rights[i + 1]`.
    scaled: Vec<f64>,
}

impl Normalizer {
    fn new(tt: &TensorTrain) -> Result<Self> {
        let d = tt.ndim();
        let zero = || Error::DegenerateDistribution { mode: 0 };
        let summed: Vec<Vec<f64>> = (0..d)
            .map(|i| {
                let (r0, modes, r1) = tt.core_shape(i);
                let core = tt.core(i);
                let mut s = vec![0.0; r0 * r1];
                for a in 0..r0 {
                    for n in 0..modes {
                        for b in 0..r1 {
                            s[a * r1 + b] += core[(a * modes + n) * r1 + b].abs();
                        }
                    }
                }
                s
            })
            .collect();

        let mut lefts = vec![vec![1.0]];
        let mut log_z = 0.0;
        for (i, s) in summed.iter().enumerate() {
            let (r0, _, r1) = tt.core_shape(i);
            let prev = &lefts[i];
            let mut next: Vec<f64> = (0..r1).map(|b| (0..r0).map(|a| prev[a] * s[a * r1 + b]).sum()).collect();
            log_z += rescale(&mut next).ok_or_else(zero)?;
            lefts.push(next);
        }
        log_z += lefts[d][0].ln();

        let mut rights = vec![Vec::new(); d + 1];
        rights[d] = vec![1.0];
        for i in (0..d).rev() {
            let (r0, _, r1) = tt.core_shape(i);
            let mut v: Vec<f64> = (0..r0)
                .map(|a| (0..r1).map(|b| summed[i][a * r1 + b] * rights[i + 1][b]).sum())
                .collect();
            rescale(&mut v).ok_or_else(zero)?;
            rights[i] = v;
        }

        let scaled = (0..d)
            .map(|i| {
                let (r0, _, r1) = tt.core_shape(i);
                let (l, r) = (&lefts[i], &rights[i + 1]);
                (0..r0)
                    .map(|a| (0..r1).map(|b| l[a] * summed[i][a * r1 + b] * r[b]).sum::<f64>())
                    .sum()
            })
            .collect();
        Ok(Normalizer {
            log_z,
            lefts,
            rights,
            scaled,
        })
    }
}
