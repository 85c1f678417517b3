//! Tabulated distribution of the maximum of equicorrelated normals.
//!
//! Dunnett-type p-values are evaluated millions of times per scenario with
//! the same correlation, so the cdf is tabulated once per (size, correlation)
//! and read back by cubic Hermite interpolation using the exact density as
//! the derivative.

use crate::statdist::{equicorr_max_cdf, equicorr_max_pdf};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

const LOWER: f64 = -8.0;
const UPPER: f64 = 8.5;
const STEP: f64 = 0.005;

#[derive(Debug)]
pub(crate) struct MaxTable {
    r: f64,
    max_m: usize,
    points: usize,
    // cdf and pdf, row m−1, column grid index
    cdf: Vec<f64>,
    pdf: Vec<f64>,
}

impl MaxTable {
    fn build(max_m: usize, r: f64) -> Self {
        let points = ((UPPER - LOWER) / STEP).round() as usize + 1;
        let mut cdf = Vec::with_capacity(max_m * points);
        let mut pdf = Vec::with_capacity(max_m * points);
        for m in 1..=max_m {
            for i in 0..points {
                let z = LOWER + i as f64 * STEP;
                cdf.push(equicorr_max_cdf(m, r, z));
                pdf.push(equicorr_max_pdf(m, r, z));
            }
        }
        MaxTable { r, max_m, points, cdf, pdf }
    }

    /// P(max of m ≥ z), the Dunnett-type p-value for observed maximum z.
    pub(crate) fn upper_tail(&self, m: usize, z: f64) -> f64 {
        if m == 0 || z == f64::NEG_INFINITY {
            return 1.0;
        }
        if m > self.max_m || !(LOWER..UPPER).contains(&z) {
            return 1.0 - equicorr_max_cdf(m, self.r, z);
        }
        let x = (z - LOWER) / STEP;
        let i = (x.floor() as usize).min(self.points - 2);
        let t = x - i as f64;
        let row = (m - 1) * self.points;
        let (f0, f1) = (self.cdf[row + i], self.cdf[row + i + 1]);
        let (d0, d1) = (self.pdf[row + i] * STEP, self.pdf[row + i + 1] * STEP);
        let t2 = t * t;
        let t3 = t2 * t;
        let f = (2.0 * t3 - 3.0 * t2 + 1.0) * f0
            + (t3 - 2.0 * t2 + t) * d0
            + (-2.0 * t3 + 3.0 * t2) * f1
            + (t3 - t2) * d1;
        (1.0 - f).clamp(0.0, 1.0)
    }
}

type Key = (usize, u64);

fn cache() -> &'static Mutex<HashMap<Key, Arc<MaxTable>>> {
    static CACHE: OnceLock<Mutex<HashMap<Key, Arc<MaxTable>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Shared table for sizes 1..=max_m at correlation r.
pub(crate) fn max_table(max_m: usize, r: f64) -> Arc<MaxTable> {
    let key = (max_m, r.to_bits());
    if let Some(t) = cache().lock().unwrap().get(&key) {
        return Arc::clone(t);
    }
    let table = Arc::new(MaxTable::build(max_m, r));
    cache().lock().unwrap().entry(key).or_insert(table).clone()
}
