//! Numerical primitives shared by the model and the tests.

mod cholesky;
mod mvn;
mod quadrature;
mod stream;

pub use cholesky::{cholesky, PSD_TOLERANCE};
pub use mvn::{bvn_cdf, equicorr_max_cdf, equicorr_max_pdf};
pub use stream::{derive_seed, replication_stream, ReplicationStream};

use crate::{Error, Result};
use libm::erfc;
use statrs::function::erf::erfc_inv;
use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Standard normal density.
#[inline]
pub fn norm_pdf(z: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * z * z).exp()
}

/// Standard normal distribution function Φ(z).
#[inline]
pub fn norm_cdf(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    0.5 * erfc(-z * FRAC_1_SQRT_2)
}

/// Upper tail 1 − Φ(z), accurate far into the right tail.
#[inline]
pub fn norm_sf(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    0.5 * erfc(z * FRAC_1_SQRT_2)
}

/// Φ(b) − Φ(a) for a ≤ b, evaluated on whichever tail keeps precision.
pub(crate) fn norm_mass(a: f64, b: f64) -> f64 {
    if a >= b {
        0.0
    } else if a > 0.0 {
        norm_sf(a) - norm_sf(b)
    } else {
        norm_cdf(b) - norm_cdf(a)
    }
}

/// Quantile Φ⁻¹(p) for p in (0, 1).
pub fn norm_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("normal quantile needs 0 < p < 1, got {p}")));
    }
    Ok(quantile_unchecked(p))
}

/// Φ⁻¹(p) without the domain check; p must lie in (0, 1).
#[inline]
pub(crate) fn quantile_unchecked(p: f64) -> f64 {
    let x = -SQRT_2 * erfc_inv(2.0 * p);
    // one Halley step on whichever tail is smaller
    let err = if p < 0.5 { norm_cdf(x) - p } else { (1.0 - p) - norm_sf(x) };
    let d = norm_pdf(x);
    if d > 0.0 {
        let u = err / d;
        x - u / (1.0 + 0.5 * x * u)
    } else {
        x
    }
}
