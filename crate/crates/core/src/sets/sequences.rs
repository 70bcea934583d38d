//! Predicates on integer sequences and radially bounded sets.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::lattice::{sup_norm, Point};

/// Outcome of [`superlinear_check`]; `violation = Some((n, k))` means
/// `a_n < a_{n-k} + a_k` with 1-based indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SuperlinearCheck {
    pub superlinear: bool,
    pub violation: Option<(usize, usize)>,
}

/// Exhaustive test of `a_n ≥ a_{n-k} + a_k`, `0 < k < n`, in the order
/// `n = 2, 3, …` and `k = 1, …, n/2`.
pub fn superlinear_check(seq: &[u64]) -> SuperlinearCheck {
    for n in 2..=seq.len() {
        for k in 1..=n / 2 {
            let rhs = seq[n - k - 1] as u128 + seq[k - 1] as u128;
            if (seq[n - 1] as u128) < rhs {
                return SuperlinearCheck {
                    superlinear: false,
                    violation: Some((n, k)),
                };
            }
        }
    }
    SuperlinearCheck {
        superlinear: true,
        violation: None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ConvexGapCheck {
    /// Gaps `a_n - a_{n-1}` are nondecreasing.
    pub convex: bool,
    /// First `n` (1-based) with `a_n - a_{n-1} < a_{n-1} - a_{n-2}`.
    pub violation: Option<usize>,
    /// Convex and `a_1 ≤ a_2 - a_1`, i.e. the gaps with `a_0 = 0` are
    /// nondecreasing too, which forces superlinearity.
    pub implies_superlinear: bool,
}

pub fn convex_gap_check(seq: &[u64]) -> ConvexGapCheck {
    let mut violation = None;
    for n in 3..=seq.len() {
        let g1 = seq[n - 2] as i128 - seq[n - 3] as i128;
        let g2 = seq[n - 1] as i128 - seq[n - 2] as i128;
        if g2 < g1 {
            violation = Some(n);
            break;
        }
    }
    let convex = violation.is_none();
    let start_ok = seq.len() < 2 || seq[0] as i128 <= seq[1] as i128 - seq[0] as i128;
    ConvexGapCheck {
        convex,
        violation,
        implies_superlinear: convex && start_ok,
    }
}

/// Largest number of points sharing one sup norm, or `None` for an empty
/// list.
pub fn radial_bound(points: &[Point]) -> Option<usize> {
    let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
    for p in points {
        *counts.entry(sup_norm(p)).or_default() += 1;
    }
    counts.values().copied().max()
}

/// Distinct sup norms in increasing order.
pub fn radial_sequence(points: &[Point]) -> Vec<u64> {
    let mut r: Vec<u64> = points.iter().map(sup_norm).collect();
    r.sort_unstable();
    r.dedup();
    r
}
