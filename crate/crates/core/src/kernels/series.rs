//! Series route for the Green function.
//!
//! `G_α(x) = Σ_n p_α(n, x) = Σ_n Σ_k P(τ_n = k) p(k, x)`. All terms are
//! nonnegative, so the series may be summed along simple-random-walk time
//! instead: `G_α(x) = Σ_{k≥0} u_k p(k, x)` with the renewal sequence
//! `u_k = Σ_n P(τ_n = k)`, whose generating function is `(1 − s)^{-α/2}`
//! (`u_0 = 1`, `u_{k+1} = u_k (k + α/2)/(k + 1)`). Partial sums are
//! certified lower bounds.

use super::{for_each_srw, GreenMethod, GreenValue, WalkConfig};
use crate::error::{Error, Result};
use crate::lattice::Point;
use crate::real::Real;

/// Partial sums at `n_terms / 4`, `n_terms / 2` and `n_terms`.
fn partial_sums(dim: crate::lattice::Dim, alpha: f64, x: &Point, n_terms: u64) -> [f64; 3] {
    let a = 0.5 * alpha;
    let marks = [n_terms / 4, n_terms / 2, n_terms];
    let mut sums = [0.0; 3];
    let mut acc = 0.0;
    let mut u = 1.0;
    let mut u_k = 0u64;
    let mut mark = 0;
    for_each_srw(dim, x, n_terms.saturating_sub(1), |k, p| {
        while mark < 3 && k >= marks[mark] {
            sums[mark] = acc;
            mark += 1;
        }
        while u_k < k {
            u *= (u_k as f64 + a) / (u_k as f64 + 1.0);
            u_k += 1;
        }
        acc += u * p;
    });
    for s in sums.iter_mut().skip(mark) {
        *s = acc;
    }
    sums
}

/// Extrapolated tail `S_∞ − S(N)` assuming `S(N) = S_∞ − A N^{-q} − B N^{-q-1}`
/// with `q = (d − α)/2`.
fn tail_estimate(sums: [f64; 3], n_terms: u64, q: f64) -> f64 {
    let ns = [n_terms as f64 / 4.0, n_terms as f64 / 2.0, n_terms as f64];
    // Solve [1, -N^-q, -N^-q-1] · (S, A, B) = S(N) for the three marks.
    let mut m = [[0.0f64; 4]; 3];
    for i in 0..3 {
        m[i] = [1.0, -ns[i].powf(-q), -ns[i].powf(-q - 1.0), sums[i]];
    }
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .unwrap();
        m.swap(col, pivot);
        for row in 0..3 {
            if row != col {
                let f = m[row][col] / m[col][col];
                for c in col..4 {
                    m[row][c] -= f * m[col][c];
                }
            }
        }
    }
    let limit = m[0][3] / m[0][0];
    (limit - sums[2]).max(0.0)
}

/// Partial sum of the first `n_terms` terms (`k < n_terms`).
pub fn green_series<T: Real>(cfg: &WalkConfig<T>, x: &Point, n_terms: u64) -> Result<GreenValue<T>> {
    cfg.require_transient()?;
    if n_terms == 0 {
        return Err(Error::domain("series needs at least one term"));
    }
    if !cfg.dim.admits(x) {
        return Err(Error::domain(format!("point {x:?} is not in Z^1")));
    }
    let alpha = cfg.alpha.f64();
    let sums = partial_sums(cfg.dim, alpha, x, n_terms);
    let q = 0.5 * cfg.gap().f64();
    let tail = if n_terms >= 64 {
        tail_estimate(sums, n_terms, q)
    } else {
        // last-term heuristic: the terms decay like k^{-q-1}
        let last = sums[2] - sums[1];
        last * 2.0 / q
    };
    Ok(GreenValue {
        value: T::of(sums[2]),
        abs_error_bound: T::of(tail),
        method: GreenMethod::Series,
    })
}

/// Doubles the term count until successive extrapolated values agree to
/// `rtol / 10`.
pub fn green_series_adaptive<T: Real>(
    cfg: &WalkConfig<T>,
    x: &Point,
    rtol: f64,
) -> Result<GreenValue<T>> {
    let spread = (x[0].unsigned_abs() + x[1].unsigned_abs()).max(1);
    let mut n = (1u64 << 14).max((64 * spread * spread).next_power_of_two());
    let mut prev = green_series(cfg, x, n)?;
    while n < 1 << 26 {
        n *= 2;
        let next = green_series(cfg, x, n)?;
        let (a, b) = (prev.estimate().f64(), next.estimate().f64());
        prev = next;
        if (a - b).abs() <= 0.1 * rtol * b.abs() {
            break;
        }
    }
    Ok(prev)
}
