//! Regularly varying generators `h(x) = x^β (ln x)^γ exp(a (ln x)^δ)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauss::gauss_legendre;

/// Most generator indices visited by one enumeration.
pub const MAX_ENUMERATION: u64 = 1 << 28;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HSpec {
    pub beta: f64,
    /// Power of `ln x`.
    pub log_power: f64,
    pub exp_a: f64,
    pub exp_gamma: f64,
}

impl HSpec {
    pub fn power(beta: f64) -> Self {
        HSpec {
            beta,
            log_power: 0.0,
            exp_a: 0.0,
            exp_gamma: 0.0,
        }
    }

    pub fn power_log(beta: f64, log_power: f64) -> Self {
        HSpec {
            log_power,
            ..Self::power(beta)
        }
    }

    pub fn power_exp(beta: f64, exp_a: f64, exp_gamma: f64) -> Self {
        HSpec {
            exp_a,
            exp_gamma,
            ..Self::power(beta)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::domain(format!("beta = {} must be positive", self.beta)));
        }
        if !self.log_power.is_finite() || !self.exp_a.is_finite() {
            return Err(Error::domain("h parameters must be finite"));
        }
        if self.exp_a != 0.0 && !(self.exp_gamma > 0.0 && self.exp_gamma < 1.0) {
            return Err(Error::domain(format!(
                "exp_gamma = {} must lie in (0, 1)",
                self.exp_gamma
            )));
        }
        Ok(())
    }

    pub fn is_pure_power(&self) -> bool {
        self.log_power == 0.0 && self.exp_a == 0.0
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut v = x.powf(self.beta);
        if self.log_power != 0.0 || self.exp_a != 0.0 {
            let l = x.ln();
            if self.log_power != 0.0 {
                v *= l.powf(self.log_power);
            }
            if self.exp_a != 0.0 {
                v *= (self.exp_a * l.powf(self.exp_gamma)).exp();
            }
        }
        v
    }

    /// `[h(n)]`, saturating at `u64::MAX`.
    pub fn floor_at(&self, n: u64) -> u64 {
        if self.is_pure_power() && self.beta.fract() == 0.0 && self.beta <= 64.0 {
            return n.checked_pow(self.beta as u32).unwrap_or(u64::MAX);
        }
        let v = self.eval(n as f64);
        let v = v + v * 1e-14;
        if v >= u64::MAX as f64 {
            u64::MAX
        } else if v > 0.0 {
            v.floor() as u64
        } else {
            0
        }
    }

    /// Smallest `n ≥ 1` with `[h(n)] ≥ m`.
    fn first_index_reaching(&self, m: u64) -> Result<u64> {
        if self.floor_at(1) >= m {
            return Ok(1);
        }
        let (mut lo, mut hi) = (1u64, 2u64);
        while self.floor_at(hi) < m {
            if self.eval(hi as f64) <= self.eval(lo as f64) {
                return Err(self.not_increasing(hi));
            }
            lo = hi;
            hi = hi
                .checked_mul(2)
                .ok_or_else(|| Error::Resource("generator index overflow".into()))?;
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.floor_at(mid) >= m {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }

    fn not_increasing(&self, n: u64) -> Error {
        Error::domain(format!("h = {self} is not increasing near n = {n}"))
    }

    /// Distinct values `[h(n)]`, `n ≥ 1`, lying in `[lo, hi)`.
    pub fn values_in(&self, lo: u64, hi: u64) -> Result<Vec<u64>> {
        self.validate()?;
        let lo = lo.max(1);
        let mut out = Vec::new();
        if hi <= lo {
            return Ok(out);
        }
        let mut n = self.first_index_reaching(lo)?;
        let start = n;
        let mut prev_h = self.eval(n as f64);
        loop {
            let v = self.floor_at(n);
            if v >= hi {
                break;
            }
            if out.last() != Some(&v) && v >= lo {
                out.push(v);
            }
            n += 1;
            if n - start > MAX_ENUMERATION {
                return Err(Error::Resource(format!(
                    "more than {MAX_ENUMERATION} generator indices needed below {hi}"
                )));
            }
            let h = self.eval(n as f64);
            if h <= prev_h {
                return Err(self.not_increasing(n));
            }
            prev_h = h;
        }
        Ok(out)
    }

    /// Whether `m = [h(n)]` for some `n ≥ 1`.
    pub fn contains(&self, m: u64) -> bool {
        match self.first_index_reaching(m) {
            Ok(n) => self.floor_at(n) == m,
            Err(_) => false,
        }
    }

    /// The first `count` distinct values.
    pub fn prefix(&self, count: usize) -> Vec<u64> {
        let mut out: Vec<u64> = Vec::with_capacity(count);
        let mut n = 1;
        while out.len() < count {
            let v = self.floor_at(n);
            if v > 0 && out.last() != Some(&v) {
                out.push(v);
            }
            if v == u64::MAX {
                break;
            }
            n += 1;
        }
        out
    }

    /// `φ(y)` with `φ = h^{-1}`, by bisection on `[1, ∞)`.
    pub fn inverse(&self, y: f64) -> f64 {
        let (mut lo, mut hi) = (1.0f64, 2.0f64);
        while self.eval(hi) < y {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.eval(mid) < y {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-13 * hi {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// Expected number of primes `[h(n)] ≤ x`, `∫_2^x φ'(y) / ln y dy`,
    /// written as `∫ du / ln h(u)` over `u ∈ [φ(2), φ(x)]`.
    pub fn prime_count_model(&self, x: f64) -> f64 {
        let (a, b) = (self.inverse(2.0), self.inverse(x));
        if b <= a {
            return 0.0;
        }
        let rule = gauss_legendre(20);
        // panels graded geometrically in u
        let panels = 64;
        let ratio = (b / a).powf(1.0 / panels as f64);
        let mut total = 0.0;
        let mut lo = a;
        for _ in 0..panels {
            let hi = lo * ratio;
            let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
            total += rule
                .iter()
                .map(|&(t, w)| half * w / self.eval(mid + half * t).ln())
                .sum::<f64>();
            lo = hi;
        }
        total
    }
}

impl fmt::Display for HSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "beta={}", self.beta)?;
        if self.log_power != 0.0 {
            write!(f, ";log={}", self.log_power)?;
        }
        if self.exp_a != 0.0 {
            write!(f, ";exp_a={};exp_gamma={}", self.exp_a, self.exp_gamma)?;
        }
        Ok(())
    }
}
