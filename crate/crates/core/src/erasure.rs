//! Binary erasure source BES(p) and channel BEC(p).

use std::fmt;

use crate::randomness::Coins;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErasureParams {
    p: f64,
}

impl ErasureParams {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Parameter(format!(
                "erasure probability {p} outside [0, 1]"
            )));
        }
        Ok(Self { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

/// Output alphabet `{0, 1, e}` of the erasure channel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ErasureSymbol {
    Zero,
    One,
    Erased,
}

impl ErasureSymbol {
    pub fn from_bit(b: bool) -> Self {
        if b {
            ErasureSymbol::One
        } else {
            ErasureSymbol::Zero
        }
    }

    pub fn bit(self) -> Option<bool> {
        match self {
            ErasureSymbol::Zero => Some(false),
            ErasureSymbol::One => Some(true),
            ErasureSymbol::Erased => None,
        }
    }

    pub fn is_erased(self) -> bool {
        self == ErasureSymbol::Erased
    }
}

impl fmt::Display for ErasureSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErasureSymbol::Zero => "0",
            ErasureSymbol::One => "1",
            ErasureSymbol::Erased => "e",
        })
    }
}

/// Paired `(X^n, Y^n)`: `x` is Alice's side, `y` is Bob's.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ErasureSequence {
    x: Vec<bool>,
    y: Vec<ErasureSymbol>,
}

impl ErasureSequence {
    /// Checks equal length and that `y_i` is `e` or equals `x_i`.
    pub fn new(x: Vec<bool>, y: Vec<ErasureSymbol>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::dims(x.len(), y.len()));
        }
        if let Some(i) = x
            .iter()
            .zip(&y)
            .position(|(&xi, &yi)| !yi.is_erased() && yi.bit() != Some(xi))
        {
            return Err(Error::Parameter(format!(
                "position {} flips a bit; erasure channels only erase",
                i + 1
            )));
        }
        Ok(Self { x, y })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn x(&self) -> &[bool] {
        &self.x
    }

    pub fn y(&self) -> &[ErasureSymbol] {
        &self.y
    }

    pub fn erasure_count(&self) -> usize {
        self.y.iter().filter(|s| s.is_erased()).count()
    }
}

/// `S` (non-erased) and `S_e` (erased) as sorted 1-based index lists.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndexPartition {
    pub non_erased: Vec<usize>,
    pub erased: Vec<usize>,
}

/// Draws `n` samples of BES(p): `X_i` uniform, `Y_i` erased with probability `p`.
pub fn sample_bes(params: ErasureParams, n: usize, coins: &mut dyn Coins) -> ErasureSequence {
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let xi = coins.bit();
        let erased = coins.bernoulli(params.p);
        x.push(xi);
        y.push(if erased {
            ErasureSymbol::Erased
        } else {
            ErasureSymbol::from_bit(xi)
        });
    }
    ErasureSequence { x, y }
}

/// Passes sender-chosen inputs through BEC(p).
pub fn simulate_bec_transmission(
    params: ErasureParams,
    inputs: &[bool],
    noise: &mut dyn Coins,
) -> ErasureSequence {
    let y = inputs
        .iter()
        .map(|&xi| {
            if noise.bernoulli(params.p) {
                ErasureSymbol::Erased
            } else {
                ErasureSymbol::from_bit(xi)
            }
        })
        .collect();
    ErasureSequence {
        x: inputs.to_vec(),
        y,
    }
}

pub fn partition_indices(seq: &ErasureSequence) -> IndexPartition {
    partition_subset(seq.y(), 1..=seq.len())
}

/// Partitions only the given 1-based positions.
pub fn partition_subset(
    y: &[ErasureSymbol],
    positions: impl IntoIterator<Item = usize>,
) -> IndexPartition {
    let (erased, non_erased) = positions
        .into_iter()
        .partition(|&i| y[i - 1].is_erased());
    IndexPartition { non_erased, erased }
}
