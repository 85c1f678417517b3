use crate::{Error, Result};
use ndarray::Array2;

/// Pivots within this (relative) distance of zero are treated as exact zeros.
pub const PSD_TOLERANCE: f64 = 1e-10;

/// Lower-triangular L with L·Lᵀ equal to the symmetric PSD input.
///
/// Rank-deficient inputs are accepted: a pivot in [-tol, tol] becomes an
/// exact zero column, provided the rest of that column is also zero to
/// tolerance. Anything else reports the offending pivot.
pub fn cholesky(matrix: &Array2<f64>) -> Result<Array2<f64>> {
    let n = matrix.nrows();
    if matrix.ncols() != n {
        return Err(Error::Domain(format!(
            "cholesky needs a square matrix, got {}x{}",
            n,
            matrix.ncols()
        )));
    }
    let scale = matrix.diag().iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    let tol = PSD_TOLERANCE * scale;
    for i in 0..n {
        for j in 0..i {
            if (matrix[[i, j]] - matrix[[j, i]]).abs() > tol {
                return Err(Error::Domain(format!("matrix is not symmetric at ({i}, {j})")));
            }
        }
    }

    let mut l = Array2::<f64>::zeros((n, n));
    for j in 0..n {
        let mut d = matrix[[j, j]];
        for k in 0..j {
            d -= l[[j, k]] * l[[j, k]];
        }
        if d < -tol || d.is_nan() {
            return Err(Error::NotPositiveSemidefinite { pivot: j, value: d });
        }
        if d <= tol {
            for i in (j + 1)..n {
                let mut s = matrix[[i, j]];
                for k in 0..j {
                    s -= l[[i, k]] * l[[j, k]];
                }
                if s.abs() > tol.sqrt() {
                    return Err(Error::NotPositiveSemidefinite { pivot: j, value: d });
                }
            }
            continue;
        }
        let root = d.sqrt();
        l[[j, j]] = root;
        for i in (j + 1)..n {
            let mut s = matrix[[i, j]];
            for k in 0..j {
                s -= l[[i, k]] * l[[j, k]];
            }
            l[[i, j]] = s / root;
        }
    }
    Ok(l)
}
