//! Entropies, mutual information and the OT capacity upper bound.
//!
//! All quantities are in bits, with `0 log 0 = 0`.

use num_traits::Float;

use crate::{Error, Result};

/// `-sum p log2 p` over the non-zero entries.
pub fn entropy<T: Float>(probs: impl IntoIterator<Item = T>) -> T {
    probs
        .into_iter()
        .filter(|&p| p > T::zero())
        .fold(T::zero(), |acc, p| acc - p * p.log2())
}

fn mass_tolerance<T: Float>() -> T {
    let floor = T::from(1e-12).unwrap();
    let scaled = T::epsilon() * T::from(64.0).unwrap();
    floor.max(scaled)
}

/// Joint law `P_{X,Y}` on `{0..nx} x {0..ny}`, stored row-major by `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct JointDistribution<T> {
    nx: usize,
    ny: usize,
    probs: Vec<T>,
}

impl<T: Float> JointDistribution<T> {
    pub fn new(nx: usize, ny: usize, probs: Vec<T>) -> Result<Self> {
        if nx == 0 || ny == 0 || probs.len() != nx * ny {
            return Err(Error::Distribution(format!(
                "{} probabilities for a {nx}x{ny} support",
                probs.len()
            )));
        }
        if probs.iter().any(|p| !(*p >= T::zero())) {
            return Err(Error::Distribution("negative or NaN probability".into()));
        }
        let total = probs.iter().fold(T::zero(), |a, &p| a + p);
        if (total - T::one()).abs() > mass_tolerance() {
            return Err(Error::Distribution(format!(
                "total mass {} is not 1",
                total.to_f64().unwrap_or(f64::NAN)
            )));
        }
        Ok(Self { nx, ny, probs })
    }

    /// `P_X` pushed through the channel `P_{Y|X}` (rows indexed by `x`).
    pub fn from_channel(input: &[T], channel: &[Vec<T>]) -> Result<Self> {
        let ny = channel.first().map_or(0, Vec::len);
        if input.len() != channel.len() || channel.iter().any(|row| row.len() != ny) {
            return Err(Error::Distribution("channel rows do not match the input".into()));
        }
        for row in channel {
            let total = row.iter().fold(T::zero(), |a, &p| a + p);
            if (total - T::one()).abs() > mass_tolerance() || row.iter().any(|p| !(*p >= T::zero())) {
                return Err(Error::Distribution("channel row is not a distribution".into()));
            }
        }
        let probs = input
            .iter()
            .zip(channel)
            .flat_map(|(&px, row)| row.iter().map(move |&w| px * w))
            .collect();
        Self::new(input.len(), ny, probs)
    }

    /// `X` uniform on `{0,1}`, `Y` in `{0, 1, e}` (index 2) with erasure
    /// probability `p`.
    pub fn bes(p: T) -> Result<Self> {
        if !(p >= T::zero() && p <= T::one()) {
            return Err(Error::Distribution("erasure probability outside [0, 1]".into()));
        }
        Self::from_channel(&[T::from(0.5).unwrap(); 2], &erasure_channel(p))
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn p(&self, x: usize, y: usize) -> T {
        self.probs[x * self.ny + y]
    }

    pub fn marginal_x(&self) -> Vec<T> {
        (0..self.nx)
            .map(|x| (0..self.ny).fold(T::zero(), |a, y| a + self.p(x, y)))
            .collect()
    }

    pub fn marginal_y(&self) -> Vec<T> {
        (0..self.ny)
            .map(|y| (0..self.nx).fold(T::zero(), |a, x| a + self.p(x, y)))
            .collect()
    }

    pub fn joint_entropy(&self) -> T {
        entropy(self.probs.iter().copied())
    }

    /// `H(X|Y) = H(X,Y) - H(Y)`.
    pub fn conditional_entropy_x_given_y(&self) -> T {
        let h = self.joint_entropy() - entropy(self.marginal_y());
        h.max(T::zero())
    }

    /// `I(X;Y) = H(X) + H(Y) - H(X,Y)`.
    pub fn mutual_information(&self) -> T {
        let i = entropy(self.marginal_x()) + entropy(self.marginal_y()) - self.joint_entropy();
        i.max(T::zero())
    }
}

/// Rows `P(. | x)` of BEC(p) over outputs `{0, 1, e}`.
pub fn erasure_channel<T: Float>(p: T) -> Vec<Vec<T>> {
    let keep = T::one() - p;
    vec![vec![keep, T::zero(), p], vec![T::zero(), keep, p]]
}

/// `min(I(X;Y), H(X|Y) / (m - 1))` for a source with joint law `joint`.
pub fn capacity_upper_bound<T: Float>(joint: &JointDistribution<T>, m: usize) -> Result<T> {
    if m < 2 {
        return Err(Error::Parameter(format!("1-out-of-{m} OT is undefined")));
    }
    let spread = T::from(m - 1).unwrap();
    Ok(joint
        .mutual_information()
        .min(joint.conditional_entropy_x_given_y() / spread))
}

/// Channel bound maximised over input laws, with the maximising input.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelBound<T> {
    pub bound: T,
    pub input: Vec<T>,
}

const SEARCH_TOL: f64 = 1e-6;

/// `max over P_X` of the source bound for the joint law `P_X P_{Y|X}`.
///
/// Binary inputs use golden-section search on `P_X(1)`. Larger inputs use a
/// simplex grid followed by a shrinking pattern search.
pub fn channel_capacity_upper_bound<T: Float>(channel: &[Vec<T>], m: usize) -> Result<ChannelBound<T>> {
    let nx = channel.len();
    if nx == 0 {
        return Err(Error::Distribution("channel has no inputs".into()));
    }
    let eval = |input: &[T]| -> Result<T> {
        capacity_upper_bound(&JointDistribution::from_channel(input, channel)?, m)
    };
    if nx == 1 {
        let input = vec![T::one()];
        return Ok(ChannelBound { bound: eval(&input)?, input });
    }
    if nx == 2 {
        return golden_section(&eval);
    }
    pattern_search(nx, &eval)
}

fn golden_section<T: Float>(eval: &dyn Fn(&[T]) -> Result<T>) -> Result<ChannelBound<T>> {
    let law = |q: T| [T::one() - q, q];
    let phi = T::from(0.618_033_988_749_894_9).unwrap();
    let tol = T::from(SEARCH_TOL).unwrap();
    let (mut lo, mut hi) = (T::zero(), T::one());
    let mut c = hi - phi * (hi - lo);
    let mut d = lo + phi * (hi - lo);
    let mut fc = eval(&law(c))?;
    let mut fd = eval(&law(d))?;
    while hi - lo > tol {
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - phi * (hi - lo);
            fc = eval(&law(c))?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + phi * (hi - lo);
            fd = eval(&law(d))?;
        }
    }
    let two = T::one() + T::one();
    let mid = (lo + hi) / two;
    // the bound is concave here but may peak on the boundary
    let mut best = ChannelBound {
        bound: eval(&law(mid))?,
        input: law(mid).to_vec(),
    };
    for q in [T::zero(), T::one()] {
        let v = eval(&law(q))?;
        if v > best.bound {
            best = ChannelBound {
                bound: v,
                input: law(q).to_vec(),
            };
        }
    }
    Ok(best)
}

fn pattern_search<T: Float>(nx: usize, eval: &dyn Fn(&[T]) -> Result<T>) -> Result<ChannelBound<T>> {
    // simplex grid with `steps` divisions
    let steps = match nx {
        3 => 40,
        4 => 16,
        5 => 8,
        _ => 4,
    };
    let mut best: Option<ChannelBound<T>> = None;
    let mut counts = vec![0usize; nx];
    grid(&mut counts, 0, steps, &mut |c| {
        let input: Vec<T> = c
            .iter()
            .map(|&x| T::from(x).unwrap() / T::from(steps).unwrap())
            .collect();
        let v = eval(&input)?;
        if best.as_ref().is_none_or(|b| v > b.bound) {
            best = Some(ChannelBound { bound: v, input });
        }
        Ok(())
    })?;
    let mut best = best.expect("grid is non-empty");

    // move mass between pairs of inputs, halving the step when stuck
    let mut step = T::one() / T::from(steps).unwrap();
    let tol = T::from(SEARCH_TOL).unwrap();
    while step > tol {
        let mut improved = false;
        for i in 0..nx {
            for j in 0..nx {
                if i == j || best.input[j] <= T::zero() {
                    continue;
                }
                let moved = step.min(best.input[j]);
                let mut cand = best.input.clone();
                cand[i] = cand[i] + moved;
                cand[j] = cand[j] - moved;
                let v = eval(&cand)?;
                if v > best.bound {
                    best = ChannelBound { bound: v, input: cand };
                    improved = true;
                }
            }
        }
        if !improved {
            step = step / (T::one() + T::one());
        }
    }
    Ok(best)
}

fn grid(
    counts: &mut Vec<usize>,
    pos: usize,
    left: usize,
    visit: &mut dyn FnMut(&[usize]) -> Result<()>,
) -> Result<()> {
    if pos + 1 == counts.len() {
        counts[pos] = left;
        return visit(counts);
    }
    for c in 0..=left {
        counts[pos] = c;
        grid(counts, pos + 1, left - c, visit)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn entropy_conventions() {
        assert_eq!(entropy([1.0f64, 0.0]), 0.0);
        assert!((entropy([0.5f64, 0.5]) - 1.0).abs() < 1e-15);
        assert!((entropy([0.25f64; 4]) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_laws() {
        assert!(JointDistribution::new(2, 2, vec![0.5, 0.5, 0.5, -0.5]).is_err());
        assert!(JointDistribution::new(2, 2, vec![0.5, 0.5, 0.5, 0.5]).is_err());
        assert!(JointDistribution::new(2, 2, vec![0.5, 0.5, 0.0]).is_err());
        assert!(JointDistribution::new(1, 1, vec![f64::NAN]).is_err());
        assert!(capacity_upper_bound(&JointDistribution::new(1, 1, vec![1.0]).unwrap(), 1).is_err());
    }

    #[test]
    fn erasure_source_quantities() {
        for p in [0.0, 0.1, 0.5, 0.9, 1.0] {
            let j = JointDistribution::<f64>::bes(p).unwrap();
            assert!((j.mutual_information() - (1.0 - p)).abs() < 1e-12);
            assert!((j.conditional_entropy_x_given_y() - p).abs() < 1e-12);
        }
    }

    #[test]
    fn independent_pair_has_zero_bound() {
        let j = JointDistribution::new(2, 2, vec![0.25f64; 4]).unwrap();
        assert!(capacity_upper_bound(&j, 2).unwrap().abs() < 1e-15);
    }

    #[test]
    fn single_precision_works() {
        let j = JointDistribution::<f32>::bes(0.5).unwrap();
        assert!((capacity_upper_bound(&j, 2).unwrap() - 0.5).abs() < 1e-6);
    }

    #[test]
    fn erasure_channel_peaks_at_uniform_input() {
        for (p, m) in [(0.5, 2usize), (0.9, 10), (0.3, 3)] {
            let best = channel_capacity_upper_bound(&erasure_channel(p), m).unwrap();
            let want = (1.0 - p).min(p / (m - 1) as f64);
            assert!((best.bound - want).abs() < 1e-9, "p={p} m={m}");
        }
    }

    #[test]
    fn ternary_channel_search() {
        // ternary erasure channel
        let p = 0.6;
        let ch: Vec<Vec<f64>> = (0..3)
            .map(|x| (0..4).map(|y| if y == 3 { p } else if y == x { 1.0 - p } else { 0.0 }).collect())
            .collect();
        let best = channel_capacity_upper_bound(&ch, 2).unwrap();
        // uniform input: I = (1-p) log2 3, H(X|Y) = p log2 3
        let want = (1.0 - p) * 3f64.log2();
        assert!((best.bound - want).abs() < 1e-6, "{best:?}");
    }

    proptest! {
        #[test]
        fn mutual_information_bounded(w in prop::collection::vec(0.0f64..1.0, 6)) {
            let total: f64 = w.iter().sum();
            prop_assume!(total > 1e-3);
            let probs: Vec<f64> = w.iter().map(|x| x / total).collect();
            let j = JointDistribution::new(2, 3, probs).unwrap();
            let i = j.mutual_information();
            prop_assert!(i >= 0.0);
            prop_assert!(i <= entropy(j.marginal_x()) + 1e-12);
            prop_assert!(j.conditional_entropy_x_given_y() <= entropy(j.marginal_x()) + 1e-12);
        }
    }
}
