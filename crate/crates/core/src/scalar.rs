use num_rational::Ratio;
use num_traits::Num;
use std::fmt::Debug;

/// Scalar field for rate and capacity formulas.
///
/// Only field operations and ordering are needed, which lets the rate
/// calculators run on floats as well as on exact rationals.
pub trait RateScalar: Num + Clone + PartialOrd + Debug {
    fn from_count(n: u64) -> Self;

    fn to_f64(&self) -> f64;

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn recip(self) -> Self {
        Self::one() / self
    }
}

impl RateScalar for f64 {
    fn from_count(n: u64) -> Self {
        n as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl RateScalar for f32 {
    fn from_count(n: u64) -> Self {
        n as f32
    }

    fn to_f64(&self) -> f64 {
        *self as f64
    }
}

impl RateScalar for Ratio<i64> {
    fn from_count(n: u64) -> Self {
        Ratio::from_integer(i64::try_from(n).expect("count fits in i64"))
    }

    fn to_f64(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}

impl RateScalar for Ratio<i128> {
    fn from_count(n: u64) -> Self {
        Ratio::from_integer(n as i128)
    }

    fn to_f64(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_and_recip() {
        assert_eq!(2.0f64.min_of(3.0), 2.0);
        let half = Ratio::new(1i64, 2);
        assert_eq!(half.recip(), Ratio::from_integer(2));
        assert_eq!(Ratio::<i64>::from_count(7).to_f64(), 7.0);
    }
}
