//! Thorn profiles `t(n)` with `|x₁| ≤ t(x₂)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::growth::Growth;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThornProfile {
    Zero,
    /// `n / ln n`
    OverLog,
    /// `n / log₂(n + 2)`
    OverLog2,
    /// `n / ln ln n`
    OverLogLog,
    /// `n / (ln n)^γ`
    OverLogPow(f64),
    /// `n / 2^{√log₂ n}`
    OverRootExp,
    Const(u64),
    /// `c·n`, `0 < c ≤ 1`
    Linear(f64),
    /// `n - 1`
    MinusOne,
}

impl ThornProfile {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ThornProfile::OverLogPow(g) if !(g > 0.0 && g.is_finite()) => {
                Err(Error::domain(format!("log power {g} must be positive")))
            }
            ThornProfile::Linear(c) if !(c > 0.0 && c <= 1.0) => {
                Err(Error::domain(format!("slope {c} must lie in (0, 1]")))
            }
            _ => Ok(()),
        }
    }

    /// Real-valued profile; continuous and nondecreasing on `x ≥ 1`.
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            ThornProfile::Zero => 0.0,
            ThornProfile::OverLog => x / x.ln().max(1.0),
            ThornProfile::OverLog2 => x / (x + 2.0).log2(),
            ThornProfile::OverLogLog => {
                let l = if x > 1.0 { x.ln().ln() } else { 0.0 };
                x / l.max(1.0)
            }
            ThornProfile::OverLogPow(g) => x / x.ln().max(g.max(1.0)).powf(g),
            ThornProfile::OverRootExp => x / 2f64.powf(x.max(1.0).log2().sqrt()),
            ThornProfile::Const(c) => c as f64,
            ThornProfile::Linear(c) => c * x,
            ThornProfile::MinusOne => (x - 1.0).max(0.0),
        }
    }

    /// `t(n) = [profile(n)]`.
    pub fn at(&self, n: u64) -> u64 {
        match *self {
            ThornProfile::Zero => 0,
            ThornProfile::Const(c) => c,
            ThornProfile::MinusOne => n.saturating_sub(1),
            _ => {
                let v = self.eval(n as f64);
                (v + v * 1e-14).floor() as u64
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ThornProfile::Zero | ThornProfile::Const(0))
    }

    /// Shape of `(t(2^n) + 1) / 2^n`.
    pub fn width_growth(&self) -> Growth<f64> {
        let ln2 = std::f64::consts::LN_2;
        match *self {
            ThornProfile::Zero | ThornProfile::Const(_) => Growth::geometric(-ln2),
            ThornProfile::OverLog | ThornProfile::OverLog2 => Growth::polynomial(-1.0, 0.0),
            ThornProfile::OverLogLog => Growth::polynomial(0.0, -1.0),
            ThornProfile::OverLogPow(g) => Growth::polynomial(-g, 0.0),
            ThornProfile::OverRootExp => Growth::stretched(-ln2),
            ThornProfile::Linear(_) | ThornProfile::MinusOne => Growth::one(),
        }
    }

    /// Whether `t(n)/n → 0`.
    pub fn is_sublinear(&self) -> bool {
        !matches!(self, ThornProfile::Linear(_) | ThornProfile::MinusOne)
    }

    /// Checks monotonicity and `t(n) ≤ n` on `[threshold, limit]`.
    pub fn check_on(&self, threshold: u64, limit: u64) -> Result<()> {
        let mut prev = self.at(threshold.max(1));
        let mut n = threshold.max(1);
        while n <= limit {
            let v = self.at(n);
            if v < prev {
                return Err(Error::domain(format!("profile {self} decreases at n = {n}")));
            }
            if v > n {
                return Err(Error::domain(format!("profile {self} exceeds n at n = {n}")));
            }
            prev = v;
            n += 1 + n / 64;
        }
        Ok(())
    }
}

impl fmt::Display for ThornProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThornProfile::Zero => write!(f, "0"),
            ThornProfile::OverLog => write!(f, "n/log"),
            ThornProfile::OverLog2 => write!(f, "n/log2"),
            ThornProfile::OverLogLog => write!(f, "n/loglog"),
            ThornProfile::OverLogPow(g) => write!(f, "n/log^{g}"),
            ThornProfile::OverRootExp => write!(f, "n/2^sqrt"),
            ThornProfile::Const(c) => write!(f, "{c}"),
            ThornProfile::Linear(c) => write!(f, "{c}n"),
            ThornProfile::MinusOne => write!(f, "n-1"),
        }
    }
}

impl FromStr for ThornProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::parse("thorn profile", format!("unknown profile '{s}'"));
        let p = match s {
            "0" => ThornProfile::Zero,
            "n/log" => ThornProfile::OverLog,
            "n/log2" => ThornProfile::OverLog2,
            "n/loglog" => ThornProfile::OverLogLog,
            "n/2^sqrt" => ThornProfile::OverRootExp,
            "n-1" => ThornProfile::MinusOne,
            "n" => ThornProfile::Linear(1.0),
            _ => {
                if let Some(g) = s.strip_prefix("n/log^") {
                    ThornProfile::OverLogPow(g.parse().map_err(|_| bad())?)
                } else if let Some(c) = s.strip_suffix('n') {
                    ThornProfile::Linear(c.trim_end_matches('*').parse().map_err(|_| bad())?)
                } else {
                    ThornProfile::Const(s.parse().map_err(|_| bad())?)
                }
            }
        };
        p.validate()?;
        Ok(p)
    }
}
