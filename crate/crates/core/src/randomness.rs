//! Labelled randomness streams.
//!
//! Every random decision in a session goes through the [`Coins`] trait, which
//! has exactly two primitives: a uniform index and a biased coin. The seeded
//! implementation splits one master seed into independent ChaCha streams, one
//! per `(label, index)`. The privacy auditor implements the same trait to walk
//! every branch of a session exhaustively.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Source of random decisions.
pub trait Coins {
    /// Uniform value in `0..n`. `n` must be positive.
    fn below(&mut self, n: usize) -> usize;

    /// `true` with probability `p`.
    fn bernoulli(&mut self, p: f64) -> bool;

    fn bit(&mut self) -> bool {
        self.below(2) == 1
    }
}

impl<C: Coins + ?Sized> Coins for &mut C {
    fn below(&mut self, n: usize) -> usize {
        (**self).below(n)
    }

    fn bernoulli(&mut self, p: f64) -> bool {
        (**self).bernoulli(p)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StreamLabel {
    /// Alice's local randomness `Z_A`.
    AliceLocal = 1,
    /// Bob's local randomness `Z_B`.
    BobLocal = 2,
    /// Source or channel noise of the erasure resource.
    Noise = 3,
    /// Experiment inputs drawn by the simulation harness.
    Source = 4,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StreamId {
    pub label: StreamLabel,
    pub index: u32,
}

impl StreamId {
    pub fn new(label: StreamLabel, index: u32) -> Self {
        Self { label, index }
    }

    fn word(self) -> u64 {
        ((self.label as u64) << 32) | self.index as u64
    }
}

/// A replayable stream: identical `(seed, id)` gives identical draws.
#[derive(Clone, Debug)]
pub struct SeededCoins {
    rng: ChaCha8Rng,
}

impl SeededCoins {
    pub fn new(seed: u64, id: StreamId) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(id.word());
        Self { rng }
    }

    pub fn labelled(seed: u64, label: StreamLabel) -> Self {
        Self::new(seed, StreamId::new(label, 0))
    }
}

impl Coins for SeededCoins {
    fn below(&mut self, n: usize) -> usize {
        assert!(n > 0, "below(0)");
        self.rng.gen_range(0..n)
    }

    fn bernoulli(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }
}

/// Per-trial seed derived from a master seed (splitmix64 finaliser).
pub fn trial_seed(master: u64, trial: u64) -> u64 {
    let mut z = master ^ trial.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniformly random ordered selection of `count` distinct elements of `pool`.
///
/// Partial Fisher-Yates: every ordered arrangement is equally likely.
pub fn draw_without_replacement<T: Clone>(
    pool: &[T],
    count: usize,
    coins: &mut dyn Coins,
) -> Result<Vec<T>> {
    if count > pool.len() {
        return Err(Error::Insufficient {
            requested: count,
            available: pool.len(),
        });
    }
    let mut work = pool.to_vec();
    for t in 0..count {
        let j = t + coins.below(work.len() - t);
        work.swap(t, j);
    }
    work.truncate(count);
    Ok(work)
}

/// One recorded draw from a party's local stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Draw {
    pub arity: u32,
    pub value: u32,
}

/// Forwards to an inner stream and records every outcome.
pub struct RecordingCoins<'a> {
    inner: &'a mut dyn Coins,
    record: &'a mut Vec<Draw>,
}

impl<'a> RecordingCoins<'a> {
    pub fn new(inner: &'a mut dyn Coins, record: &'a mut Vec<Draw>) -> Self {
        Self { inner, record }
    }
}

impl Coins for RecordingCoins<'_> {
    fn below(&mut self, n: usize) -> usize {
        let v = self.inner.below(n);
        self.record.push(Draw {
            arity: n as u32,
            value: v as u32,
        });
        v
    }

    fn bernoulli(&mut self, p: f64) -> bool {
        let v = self.inner.bernoulli(p);
        self.record.push(Draw {
            arity: 2,
            value: v as u32,
        });
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_stream_replays() {
        let id = StreamId::new(StreamLabel::BobLocal, 3);
        let mut a = SeededCoins::new(42, id);
        let mut b = SeededCoins::new(42, id);
        let xs: Vec<usize> = (0..32).map(|_| a.below(1000)).collect();
        let ys: Vec<usize> = (0..32).map(|_| b.below(1000)).collect();
        assert_eq!(xs, ys);
    }

    #[test]
    fn labels_separate_streams() {
        let mut a = SeededCoins::labelled(42, StreamLabel::AliceLocal);
        let mut b = SeededCoins::labelled(42, StreamLabel::BobLocal);
        let xs: Vec<usize> = (0..32).map(|_| a.below(1 << 20)).collect();
        let ys: Vec<usize> = (0..32).map(|_| b.below(1 << 20)).collect();
        assert_ne!(xs, ys);
    }

    #[test]
    fn trial_seeds_differ() {
        assert_ne!(trial_seed(7, 0), trial_seed(7, 1));
        assert_eq!(trial_seed(7, 5), trial_seed(7, 5));
    }

    #[test]
    fn draw_edge_cases() {
        let mut c = SeededCoins::labelled(1, StreamLabel::BobLocal);
        assert_eq!(draw_without_replacement(&[5], 1, &mut c).unwrap(), vec![5]);
        assert!(draw_without_replacement(&[1, 2, 3], 0, &mut c).unwrap().is_empty());
        assert_eq!(
            draw_without_replacement(&[1, 2], 3, &mut c),
            Err(Error::Insufficient {
                requested: 3,
                available: 2
            })
        );
    }

    #[test]
    fn two_element_arrangements_are_balanced() {
        // 10^4 seeded trials; each ordering should appear 0.5 +- 0.02.
        let mut forward = 0usize;
        for trial in 0..10_000u64 {
            let mut c = SeededCoins::new(trial_seed(99, trial), StreamId::new(StreamLabel::BobLocal, 0));
            if draw_without_replacement(&[1, 2], 2, &mut c).unwrap() == vec![1, 2] {
                forward += 1;
            }
        }
        let freq = forward as f64 / 10_000.0;
        assert!((freq - 0.5).abs() < 0.02, "freq {freq}");
    }

    #[test]
    fn arrangements_of_three_pass_chi_square() {
        // 6 orderings of 3 elements, 6000 draws; chi-square 5 dof, 0.999 quantile 20.5
        let mut counts = std::collections::HashMap::new();
        let mut c = SeededCoins::labelled(2024, StreamLabel::BobLocal);
        for _ in 0..6000 {
            *counts
                .entry(draw_without_replacement(&[1, 2, 3], 3, &mut c).unwrap())
                .or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 6);
        let chi: f64 = counts
            .values()
            .map(|&o| (o as f64 - 1000.0).powi(2) / 1000.0)
            .sum();
        assert!(chi < 20.5, "chi-square {chi}");
    }

    #[test]
    fn recording_wrapper_logs_draws() {
        let mut inner = SeededCoins::labelled(5, StreamLabel::AliceLocal);
        let mut record = Vec::new();
        let mut coins = RecordingCoins::new(&mut inner, &mut record);
        let v = coins.below(7);
        let b = coins.bernoulli(0.5);
        assert_eq!(
            record,
            vec![
                Draw { arity: 7, value: v as u32 },
                Draw { arity: 2, value: b as u32 }
            ]
        );
    }
}
