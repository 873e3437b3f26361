//! Search over branching sequences for the bootstrapped protocol.

use crate::analysis::rates::rate_boot;
use crate::{Error, RateScalar, Result};

/// Every sequence of length `1..=max_u` with entries in `2..=m` and product
/// at least `m`, ordered by length and then lexicographically. With
/// `non_decreasing` only sorted sequences are produced, and only those that
/// reach `m` on their last level.
pub fn branching_sequences(m: usize, max_u: usize, non_decreasing: bool) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for u in 1..=max_u {
        let mut cur = Vec::with_capacity(u);
        extend(m, u, non_decreasing, 1, &mut cur, &mut out);
    }
    out
}

fn extend(
    m: usize,
    u: usize,
    non_decreasing: bool,
    product: usize,
    cur: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if cur.len() == u {
        if product >= m {
            out.push(cur.clone());
        }
        return;
    }
    if non_decreasing && product >= m {
        // a further level is superfluous
        return;
    }
    let start = if non_decreasing {
        cur.last().copied().unwrap_or(2)
    } else {
        2
    };
    for s in start..=m {
        cur.push(s);
        extend(m, u, non_decreasing, product.saturating_mul(s), cur, out);
        cur.pop();
    }
}

/// `ceil(log2 m)`, the depth of an all-twos tree.
pub fn default_depth(m: usize) -> usize {
    (usize::BITS - (m.max(2) - 1).leading_zeros()) as usize
}

#[derive(Clone, Debug, PartialEq)]
pub struct BranchingChoice<T> {
    pub branching: Vec<usize>,
    pub rate: T,
}

/// Best branching sequence for erasure probability `p`.
///
/// Only sorted sequences are searched, since the rate does not depend on the
/// order of the levels, and a level is never added once the product reaches
/// `m`. Ties keep the first candidate in (length, lexicographic) order.
pub fn optimize_boot_params<T: RateScalar>(p: T, m: usize, max_u: usize) -> Result<BranchingChoice<T>> {
    if m < 2 || max_u < 1 {
        return Err(Error::Parameter(format!("need m >= 2 and max_u >= 1 (m={m}, max_u={max_u})")));
    }
    let mut best: Option<BranchingChoice<T>> = None;
    for s in branching_sequences(m, max_u, true) {
        let rate = rate_boot(p.clone(), &s);
        if best.as_ref().is_none_or(|b| rate > b.rate) {
            best = Some(BranchingChoice { branching: s, rate });
        }
    }
    Ok(best.expect("the single level {m} is always admissible"))
}
