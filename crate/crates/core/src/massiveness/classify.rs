//! Closed-form massiveness criteria.

use serde::Serialize;

use super::{envelope_fit, EnvelopeFit};
use crate::error::{Error, Result};
use crate::lattice::{sup_norm, Dim, Point};
use crate::real::Field;
use crate::sets::{
    radial_bound, radial_sequence, superlinear_check, Growth, HSpec, SetFamily, ThornProfile,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Massive,
    NonMassive,
    /// A sufficient condition for massiveness holds.
    MassiveBySufficiency,
    Inconclusive,
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub verdict: Verdict,
    /// The criterion that produced the verdict.
    pub rule: String,
    pub detail: String,
}

impl Classification {
    fn new(verdict: Verdict, rule: &str, detail: impl Into<String>) -> Self {
        Classification {
            verdict,
            rule: rule.to_string(),
            detail: detail.into(),
        }
    }
}

pub const RULE_SUPERLINEAR: &str = "superlinear sequence: massive iff sum of a_n^(alpha-1) diverges";
pub const RULE_POWER: &str = "power sequence [n^beta]: massive iff beta <= 1/(1-alpha)";
pub const RULE_DENSE: &str = "generator grows sublinearly: the sequence covers every large integer";
pub const RULE_PRIMES: &str = "primes: massive for every 0 < alpha < 1";
pub const RULE_BLOCKS: &str = "interval blocks: Cap(A_n) ~ |A_n|^(1-alpha)";
pub const RULE_AXIS: &str = "axis N x {0}: massive iff 1 <= alpha < 2";
pub const RULE_RADIAL: &str = "radially bounded superlinear set: massive iff sum of |a|^(alpha-2) diverges";
pub const RULE_RADIAL_LOW: &str = "radially bounded sets are never massive for alpha < 1";
pub const RULE_THORN: &str = "thorn: massive iff sum of (t(2^n)/2^n)^(1-alpha) diverges";
pub const RULE_THORN_AXIS: &str = "thorn contains the axis {0} x N, massive for alpha >= 1";
pub const RULE_SUBTHORN: &str = "subthorn: massive if sum of (L(2^n) l(2^n))^(alpha/2-1) diverges";
pub const RULE_PIATETSKI: &str = "Piatetski-Shapiro primes: not massive when alpha < 1 - 1/beta";
pub const RULE_LEITMANN: &str = "Leitmann primes [n log^C n]: massive when alpha >= C/(1+C)";
pub const RULE_WHOLE: &str = "whole lattice";

fn one<F: Field>() -> F {
    F::one()
}

fn require_unit_interval<F: Field>(alpha: F) -> Result<()> {
    if alpha > F::zero() && alpha < one() {
        Ok(())
    } else {
        Err(Error::domain(format!("alpha = {} must lie in (0, 1)", alpha.as_f64())))
    }
}

pub fn classify_power_sequence<F: Field>(alpha: F, beta: F) -> Result<Classification> {
    require_unit_interval(alpha)?;
    if !(beta > F::zero()) {
        return Err(Error::domain(format!("beta = {} must be positive", beta.as_f64())));
    }
    let s = beta * (one::<F>() - alpha);
    let verdict = if s <= one() { Verdict::Massive } else { Verdict::NonMassive };
    Ok(Classification::new(
        verdict,
        RULE_POWER,
        format!("beta (1 - alpha) = {}", s.as_f64()),
    ))
}

pub fn classify_axis_2d<F: Field>(alpha: F) -> Result<Classification> {
    let two = one::<F>() + one();
    if !(alpha > F::zero() && alpha < two) {
        return Err(Error::domain(format!("alpha = {} must lie in (0, 2)", alpha.as_f64())));
    }
    let verdict = if alpha >= one() { Verdict::Massive } else { Verdict::NonMassive };
    Ok(Classification::new(verdict, RULE_AXIS, format!("alpha = {}", alpha.as_f64())))
}

pub fn classify_piatetski<F: Field>(alpha: F, beta: F) -> Result<Classification> {
    require_unit_interval(alpha)?;
    let max = F::from_ratio(2817, 2426);
    if !(beta >= one() && beta < max) {
        return Err(Error::domain(format!(
            "Piatetski-Shapiro exponent {} outside [1, 2817/2426)",
            beta.as_f64()
        )));
    }
    let bound = one::<F>() - one::<F>() / beta;
    let verdict = if alpha < bound { Verdict::NonMassive } else { Verdict::Inconclusive };
    Ok(Classification::new(
        verdict,
        RULE_PIATETSKI,
        format!("1 - 1/beta = {}", bound.as_f64()),
    ))
}

pub fn classify_leitmann_log<F: Field>(alpha: F, c: F) -> Result<Classification> {
    require_unit_interval(alpha)?;
    if !(c > F::zero()) {
        return Err(Error::domain(format!("log power C = {} must be positive", c.as_f64())));
    }
    let threshold = c / (one::<F>() + c);
    let verdict = if alpha >= threshold { Verdict::Massive } else { Verdict::Inconclusive };
    Ok(Classification::new(
        verdict,
        RULE_LEITMANN,
        format!("C/(1+C) = {}", threshold.as_f64()),
    ))
}

pub fn classify_thorn_2d(alpha: f64, t: &ThornProfile) -> Result<Classification> {
    t.validate()?;
    if alpha >= 1.0 && alpha < 2.0 {
        return Ok(Classification::new(Verdict::Massive, RULE_THORN_AXIS, format!("alpha = {alpha}")));
    }
    require_unit_interval(alpha)?;
    let terms = t.width_growth().pow(1.0 - alpha);
    let verdict = if terms.series_diverges() { Verdict::Massive } else { Verdict::NonMassive };
    Ok(Classification::new(verdict, RULE_THORN, format!("terms ~ {}", describe(&terms))))
}

/// `L(2^n)` and `l(2^n)` given as growth descriptors.
pub fn classify_subthorn_2d<F: Field>(alpha: F, big_l: Growth<F>, small_l: Growth<F>) -> Result<Classification> {
    require_unit_interval(alpha)?;
    let e = alpha / (one::<F>() + one()) - one();
    let terms = big_l.mul(small_l).pow(e);
    let verdict = if terms.series_diverges() {
        Verdict::MassiveBySufficiency
    } else {
        Verdict::Inconclusive
    };
    Ok(Classification::new(verdict, RULE_SUBTHORN, format!("terms ~ {}", describe(&terms.to_f64()))))
}

fn describe(g: &Growth<f64>) -> String {
    let mut parts = Vec::new();
    if g.log_rho != 0.0 || g.root != 0.0 {
        parts.push(format!("exp({:.4} n + {:.4} sqrt n)", g.log_rho, g.root));
    }
    if g.power != 0.0 {
        parts.push(format!("n^{:.4}", g.power));
    }
    if g.log != 0.0 {
        parts.push(format!("(ln n)^{:.4}", g.log));
    }
    if parts.is_empty() {
        parts.push("1".into());
    }
    parts.join(" ")
}

/// `l(2^n)` with `π_A(x) = x / l(x)`, when known.
pub fn counting_deficit(base: &SetFamily) -> Option<Growth<f64>> {
    let ln2 = std::f64::consts::LN_2;
    let power_part = |h: &HSpec| -> Option<Growth<f64>> {
        if h.exp_a != 0.0 {
            return None;
        }
        if h.beta <= 1.0 && h.log_power == 0.0 {
            return Some(Growth::one());
        }
        // φ(x) ≍ x^{1/β} (ln x)^{-γ/β}
        Some(
            Growth::geometric((1.0 - 1.0 / h.beta) * ln2)
                .mul(Growth::polynomial(h.log_power / h.beta, 0.0)),
        )
    };
    match base {
        SetFamily::Primes => Some(Growth::polynomial(1.0, 0.0)),
        SetFamily::Whole { dim: Dim::One } => Some(Growth::one()),
        SetFamily::Power { h } => power_part(h),
        SetFamily::Leitmann { h } => power_part(h).map(|g| g.mul(Growth::polynomial(1.0, 0.0))),
        SetFamily::PiatetskiShapiro { beta } => {
            power_part(&HSpec::power(*beta)).map(|g| g.mul(Growth::polynomial(1.0, 0.0)))
        }
        SetFamily::Bucy { alpha } => Some(Growth::polynomial(2.0 / (1.0 - alpha), 0.0)),
        _ => None,
    }
}

/// Largest `f(2x)/f(x)` over `x = 2^k`, `k ∈ [4, 40]`.
fn doubling_constant(f: impl Fn(f64) -> f64) -> f64 {
    (4..40)
        .map(|k| {
            let x = 2f64.powi(k);
            f(2.0 * x) / f(x)
        })
        .fold(0.0, f64::max)
}

pub const DOUBLING_LIMIT: f64 = 8.0;

pub fn classify_subthorn_family(alpha: f64, t: &ThornProfile, base: &SetFamily) -> Result<Classification> {
    require_unit_interval(alpha)?;
    if t.is_zero() {
        return Ok(Classification::new(Verdict::NotApplicable, RULE_SUBTHORN, "profile is identically zero"));
    }
    let big_l = |x: f64| x / t.eval(x);
    let c = doubling_constant(big_l);
    if !(c <= DOUBLING_LIMIT) {
        return Ok(Classification::new(
            Verdict::NotApplicable,
            RULE_SUBTHORN,
            format!("L is not doubling (ratio {c:.3})"),
        ));
    }
    let Some(small_l) = counting_deficit(base) else {
        return Ok(Classification::new(
            Verdict::NotApplicable,
            RULE_SUBTHORN,
            format!("no counting model for base {base}"),
        ));
    };
    classify_subthorn_2d(alpha, t.width_growth().recip(), small_l)
}

/// Classification of a raw list together with its series evidence.
#[derive(Clone, Debug, Serialize)]
pub struct SeriesClassification {
    pub classification: Classification,
    pub terms: Vec<f64>,
    pub partial_sums: Vec<f64>,
    pub fit: Option<EnvelopeFit>,
}

/// Verdict of a term sequence whose envelope is fitted exactly: geometric
/// growth or decay decides, otherwise `s ≤ 1` is divergent.
fn series_verdict(fit: Option<&EnvelopeFit>) -> Verdict {
    let Some(f) = fit else {
        return Verdict::Inconclusive;
    };
    if f.log_rho > 1e-6 {
        Verdict::Massive
    } else if f.log_rho < -1e-6 {
        Verdict::NonMassive
    } else if f.s <= 1.0 + 1e-6 {
        Verdict::Massive
    } else if f.s >= 1.05 {
        Verdict::NonMassive
    } else {
        Verdict::Inconclusive
    }
}

fn series_evidence(terms: Vec<f64>, rule: &str, extra: String) -> SeriesClassification {
    let ns: Vec<f64> = (1..=terms.len()).map(|n| n as f64).collect();
    let fit = envelope_fit(&ns, &terms);
    let partial_sums = terms
        .iter()
        .scan(0.0, |acc, t| {
            *acc += t;
            Some(*acc)
        })
        .collect();
    let verdict = series_verdict(fit.as_ref());
    let detail = match &fit {
        Some(f) => format!("{extra}terms ~ n^-{:.4} rho^n, rho = {:.5}", f.s, f.log_rho.exp()),
        None => format!("{extra}too few terms"),
    };
    SeriesClassification {
        classification: Classification::new(verdict, rule, detail),
        terms,
        partial_sums,
        fit,
    }
}

fn not_applicable(rule: &str, detail: String) -> SeriesClassification {
    SeriesClassification {
        classification: Classification::new(Verdict::NotApplicable, rule, detail),
        terms: Vec::new(),
        partial_sums: Vec::new(),
        fit: None,
    }
}

/// Series diagnostic `Σ a_n^{α-1}` for an explicit increasing sequence.
pub fn classify_superlinear(alpha: f64, seq: &[u64]) -> Result<SeriesClassification> {
    require_unit_interval(alpha)?;
    let check = superlinear_check(seq);
    if let Some((n, k)) = check.violation {
        return Ok(not_applicable(
            RULE_SUPERLINEAR,
            format!("a_{n} < a_{} + a_{k}", n - k),
        ));
    }
    let terms = seq.iter().map(|&a| (a as f64).powf(alpha - 1.0)).collect();
    Ok(series_evidence(terms, RULE_SUPERLINEAR, String::new()))
}

/// Series diagnostic `Σ_{a} ‖a‖_∞^{α-2}` for a radially bounded set in Z².
pub fn classify_superlinear_2d(alpha: f64, points: &[Point]) -> Result<SeriesClassification> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::domain(format!("alpha = {alpha} must lie in (0, 2)")));
    }
    let Some(bound) = radial_bound(points) else {
        return Ok(not_applicable(RULE_RADIAL, "empty set".into()));
    };
    if alpha < 1.0 {
        return Ok(SeriesClassification {
            classification: Classification::new(
                Verdict::NonMassive,
                RULE_RADIAL_LOW,
                format!("radial bound N = {bound}"),
            ),
            terms: Vec::new(),
            partial_sums: Vec::new(),
            fit: None,
        });
    }
    let radii = radial_sequence(points);
    if radii.first() == Some(&0) {
        return Ok(not_applicable(RULE_RADIAL, "set contains the origin".into()));
    }
    if let Some((n, k)) = superlinear_check(&radii).violation {
        return Ok(not_applicable(
            RULE_RADIAL,
            format!("norms are not superlinear: r_{n} < r_{} + r_{k}", n - k),
        ));
    }
    let terms = radii
        .iter()
        .map(|&r| {
            let count = points.iter().filter(|p| sup_norm(p) == r).count();
            count as f64 * (r as f64).powf(alpha - 2.0)
        })
        .collect();
    Ok(series_evidence(terms, RULE_RADIAL, format!("radial bound N = {bound}; ")))
}

/// Number of terms used for raw-list diagnostics of symbolic families.
pub const SERIES_PREFIX: usize = 4096;

/// Dispatches on the family to the applicable criterion.
pub fn classify(family: &SetFamily, alpha: f64, dim: Dim) -> Result<Classification> {
    family.validate()?;
    if family.dim() != dim {
        return Err(Error::domain(format!(
            "family {family} lives in dimension {}, not {}",
            family.dim().get(),
            dim.get()
        )));
    }
    if !(alpha > 0.0 && alpha < dim.get() as f64) {
        return Err(Error::NotTransient { alpha, dim: dim.get() });
    }
    let c = match family {
        SetFamily::Whole { .. } => Classification::new(Verdict::Massive, RULE_WHOLE, ""),
        SetFamily::Primes => Classification::new(Verdict::Massive, RULE_PRIMES, ""),
        SetFamily::Power { h } => {
            if h.is_pure_power() {
                classify_power_sequence(alpha, h.beta)?
            } else if h.beta < 1.0 {
                Classification::new(Verdict::Massive, RULE_DENSE, format!("beta = {}", h.beta))
            } else {
                // a_n^{α-1} = n^{β(α-1)} (ln n)^{γ(α-1)} exp(a(α-1)(ln n)^δ)
                let terms = Growth::polynomial(h.beta, h.log_power).pow(alpha - 1.0);
                if h.exp_a != 0.0 && terms.power == -1.0 {
                    Classification::new(Verdict::Inconclusive, RULE_SUPERLINEAR, "boundary exponent with exp factor")
                } else {
                    let v = if terms.series_diverges() { Verdict::Massive } else { Verdict::NonMassive };
                    Classification::new(v, RULE_SUPERLINEAR, format!("terms ~ {}", describe(&terms)))
                }
            }
        }
        SetFamily::Leitmann { h } => {
            if h.beta == 1.0 && h.exp_a == 0.0 && h.log_power > 0.0 {
                classify_leitmann_log(alpha, h.log_power)?
            } else if h.is_pure_power() && h.beta >= 1.0 && h.beta * 2426.0 < 2817.0 {
                classify_piatetski(alpha, h.beta)?
            } else if h.is_pure_power() && h.beta == 1.0 {
                Classification::new(Verdict::Massive, RULE_PRIMES, "h(x) = x")
            } else {
                Classification::new(Verdict::Inconclusive, RULE_LEITMANN, format!("no criterion for h = {h}"))
            }
        }
        SetFamily::PiatetskiShapiro { beta } => classify_piatetski(alpha, *beta)?,
        SetFamily::Bucy { alpha: a0 } => {
            require_unit_interval(alpha)?;
            let gamma = 2.0 / (1.0 - a0);
            let s = gamma * (1.0 - alpha);
            let v = if s <= 1.0 { Verdict::Massive } else { Verdict::NonMassive };
            Classification::new(v, RULE_BLOCKS, format!("terms ~ n^-{s:.4}"))
        }
        SetFamily::Axis2d => classify_axis_2d(alpha)?,
        SetFamily::Thorn { t } => classify_thorn_2d(alpha, t)?,
        SetFamily::Subthorn { t, base } => {
            if alpha >= 1.0 {
                Classification::new(Verdict::Inconclusive, RULE_SUBTHORN, "criterion needs alpha < 1")
            } else {
                classify_subthorn_family(alpha, t, base)?
            }
        }
        SetFamily::ExplicitList { dim: Dim::One, points } => {
            let mut seq: Vec<u64> = points.iter().filter(|p| p[0] > 0).map(|p| p[0] as u64).collect();
            seq.sort_unstable();
            classify_superlinear(alpha, &seq)?.classification
        }
        SetFamily::ExplicitList { points, .. } | SetFamily::RadiallyBoundedList { points } => {
            classify_superlinear_2d(alpha, points)?.classification
        }
    };
    Ok(c)
}
