//! Target sets: symbolic families, membership and dyadic shells.
//!
//! One-dimensional families are sets of positive integers `a` embedded as
//! `[a, 0]`. Shells use the sup norm: `B_n = {b : 2^n ≤ ‖b‖_∞ < 2^{n+1}}`.
//!
//! Families are written as `kind[:key=value;…]`:
//!
//! ```text
//! primes
//! all[:d=2]
//! axis
//! power:beta=2[;log=1][;exp_a=0.5;exp_gamma=0.5]
//! leitmann:beta=1;log=2
//! piatetski:beta=1.1
//! bucy:alpha=0.5
//! thorn:t=n/log
//! subthorn:t=n/loglog;base=primes
//! list:pts=3|5|9          list:pts=3,4|5,0
//! radial:pts=1,0|4,0|9,0
//! ```
//!
//! `base=` must come last in a subthorn and takes the rest of the string.

mod growth;
mod hspec;
mod primes;
mod sequences;
mod thorn;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{sup_norm, Dim, FiniteLatticeSet, Point};

pub use growth::Growth;
pub use hspec::{HSpec, MAX_ENUMERATION};
pub use primes::{is_prime, primes_in, small_primes, PrimeTable, PRIME_RANGE_LIMIT};
pub use sequences::{
    convex_gap_check, radial_bound, radial_sequence, superlinear_check, ConvexGapCheck,
    SuperlinearCheck,
};
pub use thorn::ThornProfile;

/// Upper end of the Piatetski-Shapiro exponent range.
pub const PIATETSKI_BETA_MAX: (i64, i64) = (2817, 2426);

/// Most points materialised for one shell.
pub const MAX_SHELL_POINTS: usize = 1 << 26;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetFamily {
    ExplicitList { dim: Dim, points: Vec<Point> },
    /// `{[h(n)] : n ≥ 1}`
    Power { h: HSpec },
    Primes,
    /// Primes of the form `[h(n)]`.
    Leitmann { h: HSpec },
    /// Primes of the form `[n^β]`.
    PiatetskiShapiro { beta: f64 },
    /// Blocks `[2^n, 2^n(1 + n^{-γ}))`, `γ = 2/(1 - α)`.
    Bucy { alpha: f64 },
    /// `ℕ × {0}`
    Axis2d,
    Thorn { t: ThornProfile },
    Subthorn { t: ThornProfile, base: Box<SetFamily> },
    RadiallyBoundedList { points: Vec<Point> },
    Whole { dim: Dim },
}

fn piatetski_in_range(beta: f64) -> bool {
    let (num, den) = PIATETSKI_BETA_MAX;
    beta >= 1.0 && beta * (den as f64) < num as f64
}

impl SetFamily {
    pub fn dim(&self) -> Dim {
        match self {
            SetFamily::ExplicitList { dim, .. } | SetFamily::Whole { dim } => *dim,
            SetFamily::Axis2d
            | SetFamily::Thorn { .. }
            | SetFamily::Subthorn { .. }
            | SetFamily::RadiallyBoundedList { .. } => Dim::Two,
            _ => Dim::One,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SetFamily::ExplicitList { dim, points } => {
                if points.iter().any(|p| !dim.admits(p)) {
                    return Err(Error::domain("list point outside its dimension"));
                }
                Ok(())
            }
            SetFamily::Power { h } | SetFamily::Leitmann { h } => h.validate(),
            SetFamily::PiatetskiShapiro { beta } => {
                if piatetski_in_range(*beta) {
                    Ok(())
                } else {
                    Err(Error::domain(format!(
                        "Piatetski-Shapiro exponent {beta} outside [1, 2817/2426)"
                    )))
                }
            }
            SetFamily::Bucy { alpha } => {
                if *alpha > 0.0 && *alpha < 1.0 {
                    Ok(())
                } else {
                    Err(Error::domain(format!("bucy alpha = {alpha} must lie in (0, 1)")))
                }
            }
            SetFamily::Thorn { t } => t.validate(),
            SetFamily::Subthorn { t, base } => {
                t.validate()?;
                if base.dim() != Dim::One {
                    return Err(Error::domain("subthorn base must be a one-dimensional family"));
                }
                base.validate()
            }
            _ => Ok(()),
        }
    }

    fn leitmann_h(&self) -> Option<HSpec> {
        match self {
            SetFamily::Leitmann { h } => Some(*h),
            SetFamily::PiatetskiShapiro { beta } => Some(HSpec::power(*beta)),
            _ => None,
        }
    }

    /// Members `a ∈ [lo, hi)` of a one-dimensional family, ascending.
    /// Lists contribute their positive coordinates only.
    pub fn members_1d(&self, lo: u64, hi: u64) -> Result<Vec<u64>> {
        if self.dim() != Dim::One {
            return Err(Error::domain(format!("{self} is not a family of integers")));
        }
        let lo = lo.max(1);
        if hi <= lo {
            return Ok(Vec::new());
        }
        match self {
            SetFamily::Primes => primes_in(lo, hi),
            SetFamily::Power { h } => h.values_in(lo, hi),
            SetFamily::Leitmann { .. } | SetFamily::PiatetskiShapiro { .. } => {
                self.validate()?;
                let h = self.leitmann_h().unwrap();
                Ok(h.values_in(lo, hi)?.into_iter().filter(|&v| is_prime(v)).collect())
            }
            SetFamily::Bucy { alpha } => {
                self.validate()?;
                let mut out = Vec::new();
                for n in 1..64u32 {
                    let start = 1u64 << n;
                    if start >= hi {
                        break;
                    }
                    let end = start + bucy_block_len(*alpha, n);
                    out.extend(start.max(lo)..end.min(hi));
                }
                Ok(out)
            }
            SetFamily::ExplicitList { points, .. } => {
                let mut v: Vec<u64> = points
                    .iter()
                    .filter(|p| p[0] > 0 && (p[0] as u64) >= lo && (p[0] as u64) < hi)
                    .map(|p| p[0] as u64)
                    .collect();
                v.sort_unstable();
                v.dedup();
                Ok(v)
            }
            SetFamily::Whole { .. } => {
                if hi - lo > MAX_SHELL_POINTS as u64 {
                    return Err(Error::Resource(format!("range [{lo}, {hi}) too large")));
                }
                Ok((lo..hi).collect())
            }
            _ => unreachable!(),
        }
    }

    /// The first `count` positive members of a one-dimensional family.
    pub fn prefix(&self, count: usize) -> Result<Vec<u64>> {
        let mut hi = 16u64;
        loop {
            let v = self.members_1d(1, hi)?;
            if v.len() >= count || hi >= 1 << 62 {
                return Ok(v.into_iter().take(count).collect());
            }
            if let SetFamily::ExplicitList { .. } = self {
                return Ok(v);
            }
            hi *= 2;
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.contains_with(p, None)
    }

    /// Membership, with an optional sieved table for prime tests.
    pub fn contains_with(&self, p: &Point, primes: Option<&PrimeTable>) -> bool {
        let prime = |m: u64| match primes {
            Some(t) => t.is_prime(m),
            None => is_prime(m),
        };
        let one_d = |p: &Point| (p[1] == 0 && p[0] > 0).then_some(p[0] as u64);
        match self {
            SetFamily::ExplicitList { points, .. } | SetFamily::RadiallyBoundedList { points } => {
                points.contains(p)
            }
            SetFamily::Whole { dim } => dim.admits(p),
            SetFamily::Primes => one_d(p).is_some_and(prime),
            SetFamily::Power { h } => one_d(p).is_some_and(|m| h.contains(m)),
            SetFamily::Leitmann { .. } | SetFamily::PiatetskiShapiro { .. } => {
                let h = self.leitmann_h().unwrap();
                one_d(p).is_some_and(|m| prime(m) && h.contains(m))
            }
            SetFamily::Bucy { alpha } => one_d(p).is_some_and(|m| {
                let n = 63 - m.leading_zeros();
                n >= 1 && m - (1u64 << n) < bucy_block_len(*alpha, n)
            }),
            SetFamily::Axis2d => p[1] == 0 && p[0] >= 1,
            SetFamily::Thorn { t } => p[1] >= 1 && p[0].unsigned_abs() <= t.at(p[1] as u64),
            SetFamily::Subthorn { t, base } => {
                p[1] >= 1
                    && p[0].unsigned_abs() <= t.at(p[1] as u64)
                    && base.contains_with(&[p[1], 0], primes)
            }
        }
    }

    /// Members of shell `n`, sorted.
    pub fn shell_points(&self, n: u32) -> Result<Vec<Point>> {
        self.validate()?;
        if n > 61 {
            return Err(Error::domain(format!("shell index {n} too large")));
        }
        let lo = 1u64 << n;
        let hi = lo << 1;
        let in_shell = |p: &Point| (lo..hi).contains(&sup_norm(p));
        let mut pts: Vec<Point> = match self {
            SetFamily::ExplicitList { points, .. } | SetFamily::RadiallyBoundedList { points } => {
                points.iter().copied().filter(in_shell).collect()
            }
            SetFamily::Whole { dim: Dim::One } => {
                let pos = self.members_1d(lo, hi)?;
                pos.iter()
                    .map(|&m| [-(m as i64), 0])
                    .chain(pos.iter().map(|&m| [m as i64, 0]))
                    .collect()
            }
            SetFamily::Whole { dim: Dim::Two } => {
                let side = (2 * hi - 1) as usize;
                if side.saturating_mul(side) > MAX_SHELL_POINTS {
                    return Err(Error::Resource(format!("shell {n} of Z^2 is too large")));
                }
                let r = hi as i64 - 1;
                (-r..=r)
                    .flat_map(|a| (-r..=r).map(move |b| [a, b]))
                    .filter(in_shell)
                    .collect()
            }
            SetFamily::Axis2d => (lo..hi).map(|m| [m as i64, 0]).collect(),
            SetFamily::Thorn { t } => thorn_shell(t, None, n)?,
            SetFamily::Subthorn { t, base } => {
                let rows = base.members_1d(1, hi)?;
                thorn_shell(t, Some(&rows), n)?
            }
            _ => self
                .members_1d(lo, hi)?
                .into_iter()
                .map(|m| [m as i64, 0])
                .collect(),
        };
        if pts.len() > MAX_SHELL_POINTS {
            return Err(Error::Resource(format!("shell {n} has {} points", pts.len())));
        }
        pts.sort_unstable();
        Ok(pts)
    }

    /// Shell `n` as a lattice set, `None` when empty.
    pub fn dyadic_shell(&self, n: u32) -> Result<Option<FiniteLatticeSet>> {
        let pts = self.shell_points(n)?;
        Ok((!pts.is_empty()).then(|| FiniteLatticeSet::from_distinct(self.dim(), pts)))
    }
}

/// `|A_n| = ⌈2^n n^{-γ}⌉` with `γ = 2/(1 - α)`.
pub fn bucy_block_len(alpha: f64, n: u32) -> u64 {
    let gamma = 2.0 / (1.0 - alpha);
    let two_n = 1u128 << n;
    if gamma.fract() == 0.0 && gamma <= 64.0 {
        if let Some(p) = (n as u128).checked_pow(gamma as u32) {
            return (two_n.div_ceil(p)) as u64;
        }
        return 1;
    }
    let x = (n as f64 * std::f64::consts::LN_2 - gamma * (n as f64).ln()).exp();
    (x.ceil() as u64).max(1)
}

/// Points of a (sub)thorn in shell `n`; `rows` restricts `x₂`.
fn thorn_shell(t: &ThornProfile, rows: Option<&[u64]>, n: u32) -> Result<Vec<Point>> {
    let lo = 1u64 << n;
    let hi = lo << 1;
    let mut out = Vec::new();
    let push_row = |x2: u64, out: &mut Vec<Point>| -> Result<()> {
        let w = t.at(x2).min(hi - 1);
        let (from, to) = if x2 >= lo { (0, w) } else { (lo, w) };
        if from > to {
            return Ok(());
        }
        if out.len() as u64 + 2 * (to - from + 1) > MAX_SHELL_POINTS as u64 {
            return Err(Error::Resource(format!("thorn shell {n} is too large")));
        }
        for a in from..=to {
            out.push([a as i64, x2 as i64]);
            if a > 0 {
                out.push([-(a as i64), x2 as i64]);
            }
        }
        Ok(())
    };
    match rows {
        Some(rows) => {
            for &x2 in rows.iter().filter(|&&x| x >= 1 && x < hi) {
                push_row(x2, &mut out)?;
            }
        }
        None => {
            for x2 in 1..hi {
                push_row(x2, &mut out)?;
            }
        }
    }
    Ok(out)
}

pub fn dyadic_shell(family: &SetFamily, n: u32) -> Result<Option<FiniteLatticeSet>> {
    family.dyadic_shell(n)
}

pub fn thorn_members(t: &ThornProfile, n: u32) -> Result<Option<FiniteLatticeSet>> {
    SetFamily::Thorn { t: *t }.dyadic_shell(n)
}

pub fn subthorn_members(
    t: &ThornProfile,
    base: &SetFamily,
    n: u32,
) -> Result<Option<FiniteLatticeSet>> {
    SetFamily::Subthorn {
        t: *t,
        base: Box::new(base.clone()),
    }
    .dyadic_shell(n)
}

/// Primes `[h(n)]` in `[lo, hi)`.
pub fn leitmann_primes(h: &HSpec, lo: u64, hi: u64) -> Result<Vec<u64>> {
    SetFamily::Leitmann { h: *h }.members_1d(lo, hi)
}

fn fmt_points(f: &mut fmt::Formatter<'_>, dim: Dim, points: &[Point]) -> fmt::Result {
    let parts: Vec<String> = points
        .iter()
        .map(|p| match dim {
            Dim::One => p[0].to_string(),
            Dim::Two => format!("{},{}", p[0], p[1]),
        })
        .collect();
    write!(f, "pts={}", parts.join("|"))
}

impl fmt::Display for SetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetFamily::Primes => write!(f, "primes"),
            SetFamily::Whole { dim } => write!(f, "all:d={}", dim.get()),
            SetFamily::Axis2d => write!(f, "axis"),
            SetFamily::Power { h } => write!(f, "power:{h}"),
            SetFamily::Leitmann { h } => write!(f, "leitmann:{h}"),
            SetFamily::PiatetskiShapiro { beta } => write!(f, "piatetski:beta={beta}"),
            SetFamily::Bucy { alpha } => write!(f, "bucy:alpha={alpha}"),
            SetFamily::Thorn { t } => write!(f, "thorn:t={t}"),
            SetFamily::Subthorn { t, base } => write!(f, "subthorn:t={t};base={base}"),
            SetFamily::ExplicitList { dim, points } => {
                write!(f, "list:")?;
                fmt_points(f, *dim, points)
            }
            SetFamily::RadiallyBoundedList { points } => {
                write!(f, "radial:")?;
                fmt_points(f, Dim::Two, points)
            }
        }
    }
}

fn parse_points(s: &str) -> Result<(Dim, Vec<Point>)> {
    let bad = |d: String| Error::parse("point list", d);
    let mut dim = None;
    let mut pts = Vec::new();
    for item in s.split('|').map(str::trim).filter(|t| !t.is_empty()) {
        let coords: Vec<i64> = item
            .split(',')
            .map(|c| c.trim().parse::<i64>().map_err(|e| bad(format!("'{item}': {e}"))))
            .collect::<Result<_>>()?;
        let d = match coords.len() {
            1 => Dim::One,
            2 => Dim::Two,
            k => return Err(bad(format!("'{item}' has {k} coordinates"))),
        };
        if dim.replace(d).is_some_and(|old| old != d) {
            return Err(bad("mixed dimensions".into()));
        }
        pts.push([coords[0], coords.get(1).copied().unwrap_or(0)]);
    }
    let dim = dim.ok_or_else(|| bad("no points".into()))?;
    let mut seen = HashSet::new();
    if let Some(p) = pts.iter().find(|p| !seen.insert(**p)) {
        return Err(bad(format!("duplicate point {p:?}")));
    }
    Ok((dim, pts))
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse()
        .map_err(|_| Error::parse("family", format!("{key}='{v}' is not a number")))
}

/// `key=value` pairs separated by `;`; a `base=` pair swallows the rest.
fn split_params(s: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    let mut rest = s;
    while !rest.trim().is_empty() {
        let (key, after) = rest
            .split_once('=')
            .ok_or_else(|| Error::parse("family", format!("expected key=value in '{rest}'")))?;
        let key = key.trim().to_string();
        if key == "base" {
            out.push((key, after.trim().to_string()));
            break;
        }
        let (val, next) = after.split_once(';').unwrap_or((after, ""));
        out.push((key, val.trim().to_string()));
        rest = next;
    }
    Ok(out)
}

fn parse_h(params: &[(String, String)]) -> Result<HSpec> {
    let mut h = HSpec::power(f64::NAN);
    for (k, v) in params {
        match k.as_str() {
            "beta" => h.beta = parse_f64(k, v)?,
            "log" => h.log_power = parse_f64(k, v)?,
            "exp_a" => h.exp_a = parse_f64(k, v)?,
            "exp_gamma" => h.exp_gamma = parse_f64(k, v)?,
            _ => return Err(Error::parse("family", format!("unknown key '{k}'"))),
        }
    }
    if h.beta.is_nan() {
        return Err(Error::parse("family", "missing beta"));
    }
    Ok(h)
}

impl FromStr for SetFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let params = split_params(rest)?;
        let get = |key: &str| -> Result<&str> {
            params
                .iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| v.as_str())
                .ok_or_else(|| Error::parse("family", format!("{kind} needs {key}=")))
        };
        let only = |keys: &[&str]| -> Result<()> {
            match params.iter().find(|(k, _)| !keys.contains(&k.as_str())) {
                Some((k, _)) => Err(Error::parse("family", format!("{kind} has no key '{k}'"))),
                None => Ok(()),
            }
        };
        let fam = match kind.trim() {
            "primes" => {
                only(&[])?;
                SetFamily::Primes
            }
            "all" => {
                only(&["d"])?;
                let d = match params.first() {
                    Some((_, v)) => v
                        .parse::<usize>()
                        .map_err(|_| Error::parse("family", format!("bad dimension '{v}'")))?,
                    None => 1,
                };
                SetFamily::Whole { dim: Dim::new(d)? }
            }
            "axis" => {
                only(&[])?;
                SetFamily::Axis2d
            }
            "power" => SetFamily::Power { h: parse_h(&params)? },
            "leitmann" => SetFamily::Leitmann { h: parse_h(&params)? },
            "piatetski" => {
                only(&["beta"])?;
                SetFamily::PiatetskiShapiro {
                    beta: parse_f64("beta", get("beta")?)?,
                }
            }
            "bucy" => {
                only(&["alpha"])?;
                SetFamily::Bucy {
                    alpha: parse_f64("alpha", get("alpha")?)?,
                }
            }
            "thorn" => {
                only(&["t"])?;
                SetFamily::Thorn { t: get("t")?.parse()? }
            }
            "subthorn" => {
                only(&["t", "base"])?;
                SetFamily::Subthorn {
                    t: get("t")?.parse()?,
                    base: Box::new(get("base")?.parse()?),
                }
            }
            "list" => {
                only(&["pts"])?;
                let (dim, points) = parse_points(get("pts")?)?;
                SetFamily::ExplicitList { dim, points }
            }
            "radial" => {
                only(&["pts"])?;
                let (dim, points) = parse_points(get("pts")?)?;
                if dim != Dim::Two {
                    return Err(Error::parse("family", "radial lists live in Z^2"));
                }
                SetFamily::RadiallyBoundedList { points }
            }
            other => return Err(Error::parse("family", format!("unknown kind '{other}'"))),
        };
        fam.validate()?;
        Ok(fam)
    }
}
