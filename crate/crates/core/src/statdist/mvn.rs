use super::quadrature::gaussian_step_integral;
use super::{norm_cdf, norm_pdf};

/// Correlations this close to ±1 are treated as exactly degenerate.
const DEGENERATE: f64 = 1e-14;

/// P(Z₁ ≤ z1, Z₂ ≤ z2) for a standard bivariate normal with correlation `rho`.
///
/// Uses the conditioning integral ∫_{-∞}^{z1} φ(u) Φ((z2 − ρu)/√(1−ρ²)) du.
pub fn bvn_cdf(z1: f64, z2: f64, rho: f64) -> f64 {
    if z1.is_nan() || z2.is_nan() || rho.is_nan() {
        return f64::NAN;
    }
    let rho = rho.clamp(-1.0, 1.0);
    if z1 == f64::NEG_INFINITY || z2 == f64::NEG_INFINITY {
        return 0.0;
    }
    if z1 == f64::INFINITY {
        return norm_cdf(z2);
    }
    if z2 == f64::INFINITY {
        return norm_cdf(z1);
    }
    if rho == 0.0 {
        return norm_cdf(z1) * norm_cdf(z2);
    }
    if rho >= 1.0 - DEGENERATE {
        return norm_cdf(z1.min(z2));
    }
    if rho <= -1.0 + DEGENERATE {
        return (norm_cdf(z1) - norm_cdf(-z2)).max(0.0);
    }
    let sd = (1.0 - rho * rho).sqrt();
    let value = gaussian_step_integral(z1, z2 / rho, sd / rho.abs(), rho > 0.0, |u| {
        norm_cdf((z2 - rho * u) / sd)
    });
    value.clamp(0.0, 1.0)
}

/// P(max_{i≤m} Zᵢ ≤ z) for m standard normals with common correlation `r` ∈ [0, 1).
///
/// One-factor representation Zᵢ = √r·U + √(1−r)·εᵢ, integrated over U.
pub fn equicorr_max_cdf(m: usize, r: f64, z: f64) -> f64 {
    if m == 0 || z == f64::INFINITY {
        return 1.0;
    }
    if z == f64::NEG_INFINITY {
        return 0.0;
    }
    if z.is_nan() || r.is_nan() {
        return f64::NAN;
    }
    debug_assert!((0.0..1.0).contains(&r), "equicorrelation {r} outside [0, 1)");
    let r = r.clamp(0.0, 1.0);
    if m == 1 {
        return norm_cdf(z);
    }
    if r == 0.0 {
        return norm_cdf(z).powi(m as i32);
    }
    if r >= 1.0 - DEGENERATE {
        return norm_cdf(z);
    }
    let c = r.sqrt();
    let sd = (1.0 - r).sqrt();
    let power = m as i32;
    let value = gaussian_step_integral(f64::INFINITY, z / c, sd / c, true, |u| {
        norm_cdf((z - c * u) / sd).powi(power)
    });
    value.clamp(0.0, 1.0)
}

/// Density of max_{i≤m} Zᵢ under common correlation `r`.
///
/// Conditioning on the arm attaining the maximum leaves m−1 normals with
/// correlation r/(1+r), which gives m·φ(z)·F_{m−1}(z·√((1−r)/(1+r))).
pub fn equicorr_max_pdf(m: usize, r: f64, z: f64) -> f64 {
    if m == 0 || !z.is_finite() {
        return 0.0;
    }
    let r = r.clamp(0.0, 1.0);
    if r >= 1.0 - DEGENERATE {
        return norm_pdf(z);
    }
    let inner_r = r / (1.0 + r);
    let inner_z = z * ((1.0 - r) / (1.0 + r)).sqrt();
    m as f64 * norm_pdf(z) * equicorr_max_cdf(m - 1, inner_r, inner_z)
}
