//! Exact abort probability of sample-wise OT.

use num_traits::Float;

/// `ln 0!, ln 1!, .., ln n!`.
fn ln_factorials<T: Float>(n: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = T::zero();
    out.push(acc);
    for i in 1..=n {
        acc = acc + T::from(i).unwrap().ln();
        out.push(acc);
    }
    out
}

fn log_sum_exp<T: Float>(terms: &[T]) -> T {
    let max = terms.iter().copied().fold(T::neg_infinity(), T::max);
    if max == T::neg_infinity() {
        return max;
    }
    let sum = terms.iter().fold(T::zero(), |a, &t| a + (t - max).exp());
    max + sum.ln()
}

/// Probability that a session with `n` samples of BES(p) aborts when Bob
/// needs `k` non-erased and `k(m-1)` erased samples.
///
/// With `|S| ~ Bin(n, 1 - p)` the session proceeds iff
/// `k <= |S| <= n - k(m-1)`, so this is the mass of the two tails outside
/// that interval, summed in log space.
pub fn abort_probability_exact<T: Float>(p: T, n: usize, k: usize, m: usize) -> T {
    let need_erased = k * m.saturating_sub(1);
    if k + need_erased > n {
        return T::one();
    }
    let (lo, hi) = (k, n - need_erased);
    let q = T::one() - p;
    if q <= T::zero() {
        // no sample survives
        return if lo == 0 { T::zero() } else { T::one() };
    }
    if p <= T::zero() {
        return if hi == n { T::zero() } else { T::one() };
    }
    let lf = ln_factorials::<T>(n);
    let (ln_q, ln_p) = (q.ln(), p.ln());
    let log_pmf = |s: usize| {
        lf[n] - lf[s] - lf[n - s] + T::from(s).unwrap() * ln_q + T::from(n - s).unwrap() * ln_p
    };
    let tails: Vec<T> = (0..lo).chain(hi + 1..=n).map(log_pmf).collect();
    let prob = log_sum_exp(&tails).exp();
    prob.min(T::one()).max(T::zero())
}
