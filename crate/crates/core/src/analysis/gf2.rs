//! Linear algebra over GF(2) on dense bit vectors.

/// Echelon form with respect to a column priority order.
///
/// Returns `(lead, row)` pairs where `lead` is the first non-zero column of
/// `row` when columns are visited in `order`. Rows are reduced against each
/// other, so each lead column is zero in every other row. Columns missing from
/// `order` are visited last, in natural order.
pub fn echelon(rows: &[Vec<bool>], order: &[usize]) -> Vec<(usize, Vec<bool>)> {
    let width = rows.first().map_or(0, Vec::len);
    let mut seen = vec![false; width];
    let mut full: Vec<usize> = Vec::with_capacity(width);
    for c in order.iter().copied().chain(0..width) {
        if c < width && !seen[c] {
            seen[c] = true;
            full.push(c);
        }
    }
    let mut work: Vec<Vec<bool>> = rows.to_vec();
    let mut out: Vec<(usize, Vec<bool>)> = Vec::new();
    for &col in &full {
        let Some(pos) = work.iter().position(|r| r[col]) else {
            continue;
        };
        let pivot = work.swap_remove(pos);
        for r in work.iter_mut().filter(|r| r[col]) {
            xor_into(r, &pivot);
        }
        for (_, r) in out.iter_mut().filter(|(_, r)| r[col]) {
            xor_into(r, &pivot);
        }
        out.push((col, pivot));
    }
    out
}

pub fn xor_into(target: &mut [bool], other: &[bool]) {
    for (t, &o) in target.iter_mut().zip(other) {
        *t ^= o;
    }
}

/// Whether `v` lies in the span of an echelon basis.
pub fn in_span(basis: &[(usize, Vec<bool>)], v: &[bool]) -> bool {
    let mut r = v.to_vec();
    for (lead, row) in basis {
        if r[*lead] {
            xor_into(&mut r, row);
        }
    }
    r.iter().all(|&b| !b)
}

pub fn weight(v: &[bool]) -> usize {
    v.iter().filter(|&&b| b).count()
}

/// Non-zero vectors of least weight, at least `min_weight`, in the span of
/// `basis`. Enumerates all `2^d` combinations; `None` when `d > max_dim`.
pub fn min_weight_vectors(
    basis: &[Vec<bool>],
    min_weight: usize,
    max_dim: usize,
) -> Option<Vec<Vec<bool>>> {
    let d = basis.len();
    if d > max_dim {
        return None;
    }
    let width = basis.first().map_or(0, Vec::len);
    let mut best = usize::MAX;
    let mut found: Vec<Vec<bool>> = Vec::new();
    for mask in 1u64..(1u64 << d) {
        let mut v = vec![false; width];
        for (i, row) in basis.iter().enumerate() {
            if mask >> i & 1 == 1 {
                xor_into(&mut v, row);
            }
        }
        let w = weight(&v);
        if w < min_weight || w > best {
            continue;
        }
        if w < best {
            best = w;
            found.clear();
        }
        found.push(v);
    }
    found.sort();
    found.dedup();
    Some(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(bits: &str) -> Vec<bool> {
        bits.chars().map(|c| c == '1').collect()
    }

    #[test]
    fn priority_order_controls_leads() {
        let rows = vec![v("110"), v("011")];
        let e = echelon(&rows, &[2, 1, 0]);
        let leads: Vec<usize> = e.iter().map(|(l, _)| *l).collect();
        assert_eq!(leads, vec![2, 1]);
        // rows led beyond column 2 are zero there
        assert!(!e[1].1[2]);
    }

    #[test]
    fn span_membership() {
        let e = echelon(&[v("1100"), v("0110")], &[]);
        assert!(in_span(&e, &v("1010")));
        assert!(!in_span(&e, &v("1000")));
        assert!(in_span(&e, &v("0000")));
    }

    #[test]
    fn min_weight_enumeration() {
        let basis = vec![v("1101"), v("0111")];
        let got = min_weight_vectors(&basis, 2, 20).unwrap();
        assert_eq!(got, vec![v("1010")]);
        assert!(min_weight_vectors(&basis, 2, 1).is_none());
    }

    proptest! {
        #[test]
        fn echelon_preserves_span(rows in prop::collection::vec(prop::collection::vec(any::<bool>(), 6), 1..6)) {
            let e = echelon(&rows, &[5, 3, 1]);
            for r in &rows {
                prop_assert!(in_span(&e, r));
            }
            // each echelon row is a combination of the input rows
            let again = echelon(&rows, &[]);
            for (_, r) in &e {
                prop_assert!(in_span(&again, r));
            }
            prop_assert_eq!(e.len(), again.len());
        }
    }
}
