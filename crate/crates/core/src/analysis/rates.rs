//! Closed-form achievable rates.
//!
//! Everything here is generic over [`RateScalar`], so the same code gives
//! floating-point curves and exact rational values.

use crate::function::FunctionSpec;
use crate::RateScalar;

/// `min(1 - p, p / (m - 1))`, the sample-wise OT rate on an erasure resource.
///
/// # Panics
///
/// If `m < 2`.
pub fn rate_swot<T: RateScalar>(p: T, m: usize) -> T {
    assert!(m >= 2, "1-out-of-{m} OT is undefined");
    let keep = T::one() - p.clone();
    keep.min_of(p / T::from_count(m as u64 - 1))
}

/// Upper bound `min(I(X;Y), H(X|Y)/(m-1))` specialised to an erasure source,
/// where `I(X;Y) = 1 - p` and `H(X|Y) = p`.
pub fn bes_capacity_bound<T: RateScalar>(p: T, m: usize) -> T {
    assert!(m >= 2, "1-out-of-{m} OT is undefined");
    let mutual = T::one() - p.clone();
    let equivocation = p;
    mutual.min_of(equivocation / T::from_count(m as u64 - 1))
}

/// Rate of the bootstrapped protocol, `(sum_i 1/R(p, s_i))^-1`, or zero if
/// any level has rate zero.
///
/// # Panics
///
/// If `branching` is empty or contains a radix below 2.
pub fn rate_boot<T: RateScalar>(p: T, branching: &[usize]) -> T {
    assert!(!branching.is_empty(), "empty branching sequence");
    let mut total = T::zero();
    for &s in branching {
        let r = rate_swot(p.clone(), s);
        if r.is_zero() {
            return T::zero();
        }
        total = total + r.recip();
    }
    total.recip()
}

/// One `h / R(p, m)` term; `None` means the term needs OT over an alphabet
/// with fewer than two letters.
fn load<T: RateScalar>(p: &T, h: u32, m: u32) -> Option<Option<T>> {
    if h == 0 {
        return Some(None);
    }
    if m < 2 {
        return None;
    }
    let r = rate_swot(p.clone(), m as usize);
    Some(Some(if r.is_zero() {
        // marks an infinite load
        T::zero()
    } else {
        T::from_count(h as u64) / r
    }))
}

fn compose<T: RateScalar>(terms: [Option<Option<T>>; 2]) -> Option<T> {
    let mut total = T::zero();
    let mut any = false;
    for t in terms {
        match t? {
            None => {}
            Some(v) if v.is_zero() => return Some(T::zero()),
            Some(v) => {
                any = true;
                total = total + v;
            }
        }
    }
    any.then(|| total.recip())
}

/// Function-computation rate as the displayed closed form
/// `(h_B / R(p, m_A) + h_A / R(p, m_B))^-1`.
///
/// `None` when both output widths are zero (nothing to compute) or a term
/// needs an alphabet of size one.
pub fn rate_gsfc<T: RateScalar>(p: T, spec: &FunctionSpec) -> Option<T> {
    compose([
        load(&p, spec.h_b(), spec.m_a()),
        load(&p, spec.h_a(), spec.m_b()),
    ])
}

/// Rate of the protocol as actually run: the `k h_B` bits of `g` travel by
/// 1-out-of-`m_B` OT and the `k h_A` bits of `f` by 1-out-of-`m_A` OT, so
/// `(h_B / R(p, m_B) + h_A / R(p, m_A))^-1`.
pub fn rate_gsfc_accounted<T: RateScalar>(p: T, spec: &FunctionSpec) -> Option<T> {
    compose([
        load(&p, spec.h_b(), spec.m_b()),
        load(&p, spec.h_a(), spec.m_a()),
    ])
}

/// Rates evaluated at one operating point.
#[derive(Clone, Debug, PartialEq)]
pub struct RateReport<T> {
    pub p: T,
    pub m: usize,
    pub params: Option<Vec<usize>>,
    pub swot_rate: T,
    pub swot_capacity_upper: T,
    pub boot_rate: Option<T>,
    pub gsfc_rate: Option<T>,
}

impl<T: RateScalar> RateReport<T> {
    pub fn evaluate(p: T, m: usize, branching: Option<&[usize]>, spec: Option<&FunctionSpec>) -> Self {
        Self {
            swot_rate: rate_swot(p.clone(), m),
            swot_capacity_upper: bes_capacity_bound(p.clone(), m),
            boot_rate: branching.map(|s| rate_boot(p.clone(), s)),
            gsfc_rate: spec.and_then(|s| rate_gsfc(p.clone(), s)),
            params: branching.map(<[usize]>::to_vec),
            m,
            p,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ExactRate;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> ExactRate {
        ExactRate::new(n, d)
    }

    #[test]
    fn swot_points() {
        assert_eq!(rate_swot(q(1, 2), 2), q(1, 2));
        assert_eq!(rate_swot(q(9, 10), 10), q(1, 10));
        assert_eq!(rate_swot(q(0, 1), 7), q(0, 1));
        assert_eq!(rate_swot(q(1, 1), 7), q(0, 1));
        assert!((rate_swot(0.9f32, 10) - 0.1).abs() < 1e-6);
    }

    #[test]
    fn boot_points() {
        assert_eq!(rate_boot(q(1, 2), &[2, 2, 2, 2]), q(1, 8));
        assert_eq!(rate_boot(q(1, 2), &[2, 3]), q(1, 6));
        assert_eq!(rate_boot(q(1, 2), &[10]), rate_swot(q(1, 2), 10));
        assert_eq!(rate_boot(q(0, 1), &[2, 3]), q(0, 1));
    }

    #[test]
    fn gsfc_points() {
        let and = FunctionSpec::from_fns(2, 2, 2, 2, |a, b| (a == 2 && b == 2) as u32, |a, b| (a == 2 && b == 2) as u32).unwrap();
        assert_eq!(rate_gsfc(q(1, 2), &and), Some(q(1, 4)));
        assert_eq!(rate_gsfc_accounted(q(1, 2), &and), Some(q(1, 4)));

        let ot = FunctionSpec::selection(3).unwrap();
        // f constant: only the g direction, 1-out-of-3 over 1-bit outputs
        assert_eq!(rate_gsfc_accounted(q(1, 2), &ot), Some(rate_swot(q(1, 2), 3)));
        let none = FunctionSpec::from_fns(2, 2, 1, 1, |_, _| 0, |_, _| 0).unwrap();
        assert_eq!(rate_gsfc::<f64>(0.5, &none), None);
    }

    #[test]
    fn displayed_form_swaps_with_roles() {
        let spec = FunctionSpec::from_fns(4, 2, 3, 2, |a, b| (a + b) % 3, |a, b| (a * b) % 2).unwrap();
        let swapped = FunctionSpec::from_fns(2, 4, 2, 3, |b, a| (a * b) % 2, |b, a| (a + b) % 3).unwrap();
        for p in [q(1, 5), q(1, 2), q(2, 3)] {
            assert_eq!(rate_gsfc(p, &spec), rate_gsfc(p, &swapped));
        }
    }

    #[test]
    fn report_fields() {
        let r = RateReport::evaluate(q(1, 2), 10, Some(&[2, 2, 2, 2]), None);
        assert_eq!(r.swot_rate, q(1, 18));
        assert_eq!(r.swot_capacity_upper, q(1, 18));
        assert_eq!(r.boot_rate, Some(q(1, 8)));
        assert_eq!(r.gsfc_rate, None);
    }

    proptest! {
        #[test]
        fn rates_stay_in_unit_interval(num in 0i64..=100, m in 2usize..16) {
            let p = q(num, 100);
            let r = rate_swot(p, m);
            prop_assert!(r >= q(0, 1) && r <= q(1, 1));
            prop_assert!(r <= q(1, m as i64));
        }

        #[test]
        fn boot_below_every_level(num in 0i64..=100, s in prop::collection::vec(2usize..9, 1..4)) {
            let p = q(num, 100);
            let r = rate_boot(p, &s);
            for &si in &s {
                prop_assert!(r <= rate_swot(p, si));
            }
            prop_assert!(r >= q(0, 1));
        }

        #[test]
        fn swot_peak(m in 2usize..13, num in 0i64..=120) {
            let p = q(num, 120);
            prop_assert!(rate_swot(p, m) <= rate_swot(q(m as i64 - 1, m as i64), m));
        }
    }
}
