//! Combination of stage-wise p-values and two-stage rejection boundaries.

use crate::statdist::{bvn_cdf, norm_cdf, norm_quantile, quantile_unchecked};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// p-values are kept inside this margin before any quantile transform.
pub const P_CLAMP: f64 = 1e-15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CombinationMethod {
    InverseNormal,
    Fisher,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CombinationConfig {
    pub method: CombinationMethod,
    /// (w₁, w₂); only the inverse-normal method uses them.
    pub weights: (f64, f64),
    pub alpha: f64,
    /// Cumulative spending (α₁*, α₂*) with α₂* = α.
    pub spending: Option<(f64, f64)>,
}

impl CombinationConfig {
    /// Inverse-normal weights with w₁² = n₁/(n₁+n₂).
    pub fn inverse_normal(stage1: f64, stage2: f64, alpha: f64) -> Self {
        Self::from_squared_weight(stage1 / (stage1 + stage2), alpha)
    }

    pub fn from_squared_weight(w1_squared: f64, alpha: f64) -> Self {
        CombinationConfig {
            method: CombinationMethod::InverseNormal,
            weights: (w1_squared.sqrt(), (1.0 - w1_squared).sqrt()),
            alpha,
            spending: None,
        }
    }

    pub fn fisher(alpha: f64) -> Self {
        CombinationConfig { method: CombinationMethod::Fisher, weights: (0.0, 0.0), alpha, spending: None }
    }

    pub fn with_spending(mut self, alpha1: f64) -> Self {
        self.spending = Some((alpha1, self.alpha));
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidTest(format!("level must lie in (0, 1), got {}", self.alpha)));
        }
        if self.method == CombinationMethod::InverseNormal {
            let (w1, w2) = self.weights;
            if !(w1 >= 0.0 && w2 >= 0.0) || (w1 * w1 + w2 * w2 - 1.0).abs() > 1e-10 {
                return Err(Error::InvalidTest(format!(
                    "inverse-normal weights must be nonnegative with w1² + w2² = 1, got ({w1}, {w2})"
                )));
            }
        }
        if let Some((a1, a2)) = self.spending {
            if self.method != CombinationMethod::InverseNormal {
                return Err(Error::InvalidTest("alpha spending needs the inverse-normal method".into()));
            }
            if !(a1 >= 0.0 && a1 <= a2) || (a2 - self.alpha).abs() > 1e-12 {
                return Err(Error::InvalidTest(format!(
                    "spending must satisfy 0 ≤ α1* ≤ α2* = α, got ({a1}, {a2}) with α = {}",
                    self.alpha
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Combined {
    pub reject: bool,
    /// C₂ for inverse normal, −2 ln(p₁p₂) for Fisher.
    pub statistic: f64,
    /// Whether either p-value had to be clamped away from 0 or 1.
    pub clamped: bool,
}

/// Critical values used by [`combine`], computed once per configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Boundaries {
    /// Stage-1 efficacy boundary on the standardized scale; +∞ without spending.
    pub u1: f64,
    /// Final boundary for C₂ (inverse normal) or for −2 ln(p₁p₂) (Fisher).
    pub u2: f64,
}

impl Boundaries {
    pub fn new(config: &CombinationConfig) -> Result<Self> {
        config.validate()?;
        match config.method {
            CombinationMethod::Fisher => Ok(Boundaries { u1: f64::INFINITY, u2: chi_square4_quantile(1.0 - config.alpha) }),
            CombinationMethod::InverseNormal => match config.spending {
                Some(_) => {
                    let (u1, u2) = spending_boundaries(config)?;
                    Ok(Boundaries { u1, u2 })
                }
                None => Ok(Boundaries { u1: f64::INFINITY, u2: norm_quantile(1.0 - config.alpha)? }),
            },
        }
    }
}

fn clamp_p(p: f64, clamped: &mut bool) -> f64 {
    let q = p.clamp(P_CLAMP, 1.0 - P_CLAMP);
    if q != p {
        *clamped = true;
    }
    q
}

/// Combine stage-wise p-values with precomputed boundaries.
pub fn combine_with(p1: f64, p2: f64, config: &CombinationConfig, bounds: &Boundaries) -> Combined {
    let mut clamped = false;
    let q1 = clamp_p(p1, &mut clamped);
    let q2 = clamp_p(p2, &mut clamped);
    match config.method {
        CombinationMethod::InverseNormal => {
            let z1 = quantile_unchecked(1.0 - q1);
            let z2 = quantile_unchecked(1.0 - q2);
            let (w1, w2) = config.weights;
            let statistic = w1 * z1 + w2 * z2;
            Combined { reject: z1 >= bounds.u1 || statistic >= bounds.u2, statistic, clamped }
        }
        CombinationMethod::Fisher => {
            let statistic = -2.0 * (q1 * q2).ln();
            Combined { reject: statistic >= bounds.u2, statistic, clamped }
        }
    }
}

/// Combine stage-wise p-values into a level-α decision.
pub fn combine(p1: f64, p2: f64, config: &CombinationConfig) -> Result<Combined> {
    let bounds = Boundaries::new(config)?;
    Ok(combine_with(p1, p2, config, &bounds))
}

/// Survival function of χ² with 4 degrees of freedom.
pub fn chi_square4_sf(x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else {
        (-0.5 * x).exp() * (1.0 + 0.5 * x)
    }
}

/// Quantile of χ²₄ at probability `p`, by bisection to 1e−10.
pub fn chi_square4_quantile(p: f64) -> f64 {
    let target = 1.0 - p;
    let (mut lo, mut hi) = (0.0, 1.0);
    while chi_square4_sf(hi) > target {
        hi *= 2.0;
    }
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if chi_square4_sf(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Two-stage boundaries (u₁, u₂) for spending α₁* at the interim.
///
/// u₁ = Φ⁻¹(1 − α₁*) and u₂ solves P(C₁ < u₁, C₂ ≥ u₂) = α − α₁* where
/// corr(C₁, C₂) = w₁.
pub fn spending_boundaries(config: &CombinationConfig) -> Result<(f64, f64)> {
    let (alpha1, alpha2) = config
        .spending
        .ok_or_else(|| Error::InvalidTest("no spending specified".into()))?;
    if alpha1 > alpha2 || alpha1 < 0.0 {
        return Err(Error::InvalidTest(format!("stage-1 spending {alpha1} exceeds the level {alpha2}")));
    }
    let w1 = config.weights.0;
    let u1 = if alpha1 == 0.0 { f64::INFINITY } else { norm_quantile(1.0 - alpha1)? };
    let remaining = alpha2 - alpha1;
    if remaining <= 0.0 {
        return Ok((u1, f64::INFINITY));
    }
    if u1 == f64::INFINITY {
        return Ok((u1, norm_quantile(1.0 - alpha2)?));
    }
    let below = norm_cdf(u1);
    let excess = |u2: f64| below - bvn_cdf(u1, u2, w1) - remaining;
    let (mut lo, mut hi) = (-10.0, 40.0);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if excess(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((u1, 0.5 * (lo + hi)))
}
