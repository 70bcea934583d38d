use super::{GreenMethod, GreenValue, WalkConfig};
use crate::error::{Error, Result};
use crate::lattice::{euclidean_norm, Dim, Point};
use crate::real::Real;
use crate::special::gamma;

/// Constant `C(d, α)` in `G_α(x) ~ C(d, α) ‖x‖^{α-d}`.
///
/// d = 1: `2^{-α/2} π^{-1/2} Γ((1-α)/2) / Γ(α/2)`;
/// d = 2: `Γ(1-α/2) / (π Γ(α/2))`.
pub fn asymptotic_constant<T: Real>(cfg: &WalkConfig<T>) -> Result<T> {
    cfg.require_transient()?;
    let half = cfg.alpha / T::of(2.0);
    Ok(match cfg.dim {
        Dim::One => {
            T::of(2.0).powf(-half) / T::PI().sqrt() * gamma((T::one() - cfg.alpha) / T::of(2.0))
                / gamma(half)
        }
        Dim::Two => gamma(T::one() - half) / (T::PI() * gamma(half)),
    })
}

/// Far-field form of the Green function (Euclidean norm).
pub fn green_asymptotic<T: Real>(cfg: &WalkConfig<T>, x: &Point) -> Result<GreenValue<T>> {
    cfg.require_transient()?;
    if *x == [0, 0] {
        return Err(Error::domain("asymptotic Green function is undefined at x = 0"));
    }
    let c = asymptotic_constant(cfg)?;
    let r = T::of(euclidean_norm(x));
    Ok(GreenValue {
        value: c * r.powf(-cfg.gap()),
        abs_error_bound: T::infinity(),
        method: GreenMethod::Asymptotic,
    })
}
