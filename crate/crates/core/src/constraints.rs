//! Exact 0/1 indicator tensors in TT format built from finite automata.
//!
//! A deterministic automaton reads the multi-index left to right. Core `k`
//! maps the state before mode `k` (left rank channel) to the state after it
//! (right rank channel): entry `(s, n, s')` is 1 iff reading symbol `n` in
//! state `s` leads to `s'`. Rejection is an extra rank channel that is zero
//! everywhere, so any rejected prefix contributes nothing regardless of the
//! remaining symbols. The last core folds in the acceptance test.

use std::fmt;
use std::sync::Arc;

use rand::distributions::{Distribution, Uniform};

use crate::error::{Error, Result};
use crate::rng;
use crate::tensor_train::TensorTrain;

type TransitionFn = dyn Fn(usize, usize, usize) -> Option<usize> + Send + Sync;
type AcceptFn = dyn Fn(usize) -> bool + Send + Sync;

/// Deterministic automaton over `d` positions with `n_symbols` symbols each.
#[derive(Clone)]
pub struct AutomatonSpec {
    pub d: usize,
    pub n_symbols: usize,
    pub n_states: usize,
    transition: Arc<TransitionFn>,
    accept: Arc<AcceptFn>,
}

impl fmt::Debug for AutomatonSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AutomatonSpec")
            .field("d", &self.d)
            .field("n_symbols", &self.n_symbols)
            .field("n_states", &self.n_states)
            .finish_non_exhaustive()
    }
}

impl AutomatonSpec {
    /// `transition(k, n, s)` returns the next state or `None` to reject;
    /// `accept(s)` tests the state reached after the last symbol. The start
    /// state is 0.
    pub fn new<T, A>(d: usize, n_symbols: usize, n_states: usize, transition: T, accept: A) -> Result<Self>
    where
        T: Fn(usize, usize, usize) -> Option<usize> + Send + Sync + 'static,
        A: Fn(usize) -> bool + Send + Sync + 'static,
    {
        if d == 0 || n_symbols == 0 || n_states == 0 {
            return Err(Error::InvalidProblem("automaton needs d, symbols and states >= 1".into()));
        }
        Ok(AutomatonSpec {
            d,
            n_symbols,
            n_states,
            transition: Arc::new(transition),
            accept: Arc::new(accept),
        })
    }

    pub fn transition(&self, k: usize, n: usize, s: usize) -> Option<usize> {
        (self.transition)(k, n, s).filter(|&next| next < self.n_states)
    }

    pub fn accepts(&self, s: usize) -> bool {
        (self.accept)(s)
    }

    /// Runs the automaton over a whole word.
    pub fn accepts_word(&self, x: &[usize]) -> bool {
        if x.len() != self.d {
            return false;
        }
        let mut s = 0;
        for (k, &n) in x.iter().enumerate() {
            match self.transition(k, n, s) {
                Some(next) => s = next,
                None => return false,
            }
        }
        self.accepts(s)
    }
}

/// Binary words in which every maximal run of ones has length at least `l`.
///
/// The state counts consecutive ones seen so far, capped at `l`. A zero is
/// allowed only after no ones or after a completed run (state 0 or `l`); the
/// word is accepted when it ends in one of those states, which is the same as
/// requiring a trailing run of ones to have reached length `l`.
pub fn min_run_spec(d: usize, l: usize) -> Result<AutomatonSpec> {
    if l == 0 {
        return Err(Error::InvalidProblem("run length must be at least 1".into()));
    }
    AutomatonSpec::new(
        d,
        2,
        l + 1,
        move |_, n, s| match n {
            1 => Some((s + 1).min(l)),
            0 if s == 0 || s == l => Some(0),
            _ => None,
        },
        move |s| s == 0 || s == l,
    )
}

/// TT whose value is exactly 1 on accepted words and 0 elsewhere.
///
/// Interior ranks are `n_states + 1`; the last channel is the zero reject
/// channel.
pub fn build_indicator_tt(spec: &AutomatonSpec) -> Result<TensorTrain> {
    let d = spec.d;
    let n = spec.n_symbols;
    let inner = spec.n_states + 1;
    let mut ranks = vec![inner; d + 1];
    ranks[0] = 1;
    ranks[d] = 1;

    let cores = (0..d)
        .map(|k| {
            let (r0, r1) = (ranks[k], ranks[k + 1]);
            let mut core = vec![0.0; r0 * n * r1];
            // Left channel `s` is automaton state `s`; the reject channel and
            // states beyond the first core's start state stay zero.
            for s in 0..r0.min(spec.n_states) {
                for symbol in 0..n {
                    let Some(next) = spec.transition(k, symbol, s) else {
                        continue;
                    };
                    let column = if k + 1 == d {
                        if !spec.accepts(next) {
                            continue;
                        }
                        0
                    } else {
                        next
                    };
                    core[(s * n + symbol) * r1 + column] = 1.0;
                }
            }
            core
        })
        .collect();
    TensorTrain::from_cores(vec![n; d], ranks, cores)
}

/// Magnitude bound of the noise placed in padded rank channels.
pub const PADDING_NOISE: f64 = 1e-6;

/// Starting model for a constrained run: the indicator itself, with interior
/// ranks raised to `rank_pad` when that is larger. Entries touching a padded
/// channel get uniform noise in `(0, PADDING_NOISE)`; all original entries are
/// kept, so values differ from the indicator only by products of that noise.
/// `rank_pad = 0` returns the indicator unchanged.
pub fn constrained_init(indicator: &TensorTrain, rank_pad: usize, seed: u64) -> Result<TensorTrain> {
    let d = indicator.ndim();
    let old = indicator.ranks();
    let mut ranks: Vec<usize> = old.iter().map(|&r| r.max(rank_pad)).collect();
    ranks[0] = 1;
    ranks[d] = 1;
    if ranks == old {
        return Ok(indicator.clone());
    }
    let noise = Uniform::new(0.0, PADDING_NOISE);
    let mut rng = rng::stream(seed, rng::STREAM_PADDING);
    let cores = (0..d)
        .map(|i| {
            let n = indicator.shape()[i];
            let (r0, r1) = (ranks[i], ranks[i + 1]);
            let (o0, o1) = (old[i], old[i + 1]);
            let mut core = vec![0.0; r0 * n * r1];
            for a in 0..r0 {
                for m in 0..n {
                    for b in 0..r1 {
                        core[(a * n + m) * r1 + b] = if a < o0 && b < o1 {
                            indicator.entry(i, a, m, b)
                        } else {
                            noise.sample(&mut rng)
                        };
                    }
                }
            }
            core
        })
        .collect();
    TensorTrain::from_cores(indicator.shape().to_vec(), ranks, cores)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::unravel;

    fn all_words(d: usize) -> impl Iterator<Item = Vec<usize>> {
        (0..1usize << d).map(move |i| unravel(i, &vec![2; d]))
    }

    #[test]
    fn accept_everything() {
        let spec = AutomatonSpec::new(3, 2, 1, |_, _, _| Some(0), |_| true).unwrap();
        let tt = build_indicator_tt(&spec).unwrap();
        for x in all_words(3) {
            assert_eq!(tt.eval(&x).unwrap(), 1.0);
        }
    }

    #[test]
    fn accept_only_zeros() {
        let spec = AutomatonSpec::new(3, 2, 1, |_, n, _| (n == 0).then_some(0), |_| true).unwrap();
        let tt = build_indicator_tt(&spec).unwrap();
        let ones: Vec<_> = all_words(3).filter(|x| tt.eval(x).unwrap() == 1.0).collect();
        assert_eq!(ones, vec![vec![0, 0, 0]]);
    }

    #[test]
    fn min_run_four_modes() {
        let spec = min_run_spec(4, 3).unwrap();
        let tt = build_indicator_tt(&spec).unwrap();
        let admissible: Vec<_> = all_words(4).filter(|x| tt.eval(x).unwrap() == 1.0).collect();
        assert_eq!(
            admissible,
            vec![vec![0, 0, 0, 0], vec![0, 1, 1, 1], vec![1, 1, 1, 0], vec![1, 1, 1, 1]]
        );
        for x in all_words(4) {
            let v = tt.eval(&x).unwrap();
            assert!(v == 0.0 || v == 1.0);
        }
    }

    #[test]
    fn min_run_three_modes() {
        let spec = min_run_spec(3, 3).unwrap();
        let admissible: Vec<_> = all_words(3).filter(|x| spec.accepts_word(x)).collect();
        assert_eq!(admissible, vec![vec![0, 0, 0], vec![1, 1, 1]]);
    }

    #[test]
    fn run_length_one_is_vacuous() {
        let tt = build_indicator_tt(&min_run_spec(6, 1).unwrap()).unwrap();
        assert!(all_words(6).all(|x| tt.eval(&x).unwrap() == 1.0));
    }

    #[test]
    fn single_mode() {
        let tt = build_indicator_tt(&min_run_spec(1, 1).unwrap()).unwrap();
        assert_eq!((tt.eval(&[0]).unwrap(), tt.eval(&[1]).unwrap()), (1.0, 1.0));
        let tt = build_indicator_tt(&min_run_spec(1, 2).unwrap()).unwrap();
        assert_eq!((tt.eval(&[0]).unwrap(), tt.eval(&[1]).unwrap()), (1.0, 0.0));
    }

    #[test]
    fn rank_bound() {
        for l in 1..=4 {
            let tt = build_indicator_tt(&min_run_spec(8, l).unwrap()).unwrap();
            assert!(tt.ranks().iter().all(|&r| r <= l + 2));
        }
    }

    #[test]
    fn padding_zero_is_identity() {
        let tt = build_indicator_tt(&min_run_spec(5, 3).unwrap()).unwrap();
        assert_eq!(constrained_init(&tt, 0, 1).unwrap(), tt);
        assert_eq!(constrained_init(&tt, 3, 1).unwrap(), tt);
    }

    #[test]
    fn padding_keeps_values() {
        let tt = build_indicator_tt(&min_run_spec(4, 3).unwrap()).unwrap();
        let padded = constrained_init(&tt, 8, 7).unwrap();
        assert_eq!(padded.ranks(), &[1, 8, 8, 8, 1]);
        for x in all_words(4) {
            assert!((padded.eval(&x).unwrap() - tt.eval(&x).unwrap()).abs() < 1e-6);
        }
    }
}
