//! Exhaustive enumeration of a randomised computation.
//!
//! The closure is re-run once per branch of its random decisions. Each
//! [`EnumCoins`] call either replays the decision recorded on the current path
//! or opens a new decision at its first option; after a run the path is
//! advanced like an odometer. The weight of an outcome is the product of the
//! chosen options' probabilities. Zero-probability options are never visited.

use std::cell::RefCell;
use std::rc::Rc;

use crate::randomness::Coins;
use crate::{Error, Result};

#[derive(Debug)]
struct Decision {
    /// (value, probability) for each live option
    options: Vec<(usize, f64)>,
    chosen: usize,
}

#[derive(Debug, Default)]
struct Trail {
    decisions: Vec<Decision>,
    cursor: usize,
}

impl Trail {
    fn decide(&mut self, options: impl FnOnce() -> Vec<(usize, f64)>) -> usize {
        if self.cursor < self.decisions.len() {
            let d = &self.decisions[self.cursor];
            self.cursor += 1;
            return d.options[d.chosen].0;
        }
        let options = options();
        assert!(!options.is_empty(), "decision without live options");
        let value = options[0].0;
        self.decisions.push(Decision { options, chosen: 0 });
        self.cursor += 1;
        value
    }

    fn weight(&self) -> f64 {
        self.decisions
            .iter()
            .map(|d| d.options[d.chosen].1)
            .product()
    }

    fn advance(&mut self) -> bool {
        self.cursor = 0;
        while let Some(last) = self.decisions.last_mut() {
            if last.chosen + 1 < last.options.len() {
                last.chosen += 1;
                return true;
            }
            self.decisions.pop();
        }
        false
    }
}

/// Coins that branch instead of sampling. Clones share one decision path,
/// so several parties can draw from "independent" streams in one run.
#[derive(Clone, Debug, Default)]
pub struct EnumCoins {
    trail: Rc<RefCell<Trail>>,
}

impl Coins for EnumCoins {
    fn below(&mut self, n: usize) -> usize {
        assert!(n > 0, "below(0)");
        let w = 1.0 / n as f64;
        self.trail
            .borrow_mut()
            .decide(|| (0..n).map(|v| (v, w)).collect())
    }

    fn bernoulli(&mut self, p: f64) -> bool {
        self.trail.borrow_mut().decide(|| {
            [(0usize, 1.0 - p), (1usize, p)]
                .into_iter()
                .filter(|&(_, w)| w > 0.0)
                .collect()
        }) == 1
    }
}

/// Runs `f` on every branch; returns `(probability, outcome)` pairs in
/// depth-first order. Fails once more than `cap` branches were visited.
pub fn enumerate<T>(cap: u128, mut f: impl FnMut(&mut EnumCoins) -> T) -> Result<Vec<(f64, T)>> {
    let mut coins = EnumCoins::default();
    let mut out = Vec::new();
    loop {
        let value = f(&mut coins);
        let weight = coins.trail.borrow().weight();
        out.push((weight, value));
        if out.len() as u128 > cap {
            return Err(Error::Capacity {
                atoms: out.len() as u128,
                cap,
            });
        }
        if !coins.trail.borrow_mut().advance() {
            return Ok(out);
        }
    }
}
