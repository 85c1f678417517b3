use ndarray::Array2;

/// K×K matrix with unit diagonal and every off-diagonal entry equal to `r`.
pub fn compound_symmetry(k: usize, r: f64) -> Array2<f64> {
    Array2::from_shape_fn((k, k), |(i, j)| if i == j { 1.0 } else { r })
}

/// Correlation form of the group-sequential matrix with entries I_min(i,j).
///
/// `information` holds cumulative information levels; entry (i, j) is
/// √(I_i / I_j) for i ≤ j.
pub fn group_sequential_correlation(information: &[f64]) -> Array2<f64> {
    let j = information.len();
    Array2::from_shape_fn((j, j), |(a, b)| {
        let (lo, hi) = if information[a] <= information[b] {
            (information[a], information[b])
        } else {
            (information[b], information[a])
        };
        (lo / hi).sqrt()
    })
}

/// Subgroup (share τ) nested in the full population: correlation √τ.
pub fn nested_population_correlation(tau: f64) -> Array2<f64> {
    group_sequential_correlation(&[tau, 1.0])
}

/// Two-endpoint block [[S, ρS], [ρS, S]] for a stage correlation S.
///
/// Both endpoints are observed on the same patients, so their information
/// levels are proportional and the cross block is ρ times the stage block.
pub fn endpoint_stage_block(stage: &Array2<f64>, rho: f64) -> Array2<f64> {
    let j = stage.nrows();
    Array2::from_shape_fn((2 * j, 2 * j), |(a, b)| {
        let s = stage[[a % j, b % j]];
        if (a < j) == (b < j) {
            s
        } else {
            rho * s
        }
    })
}

pub fn kronecker(a: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    Array2::from_shape_fn((ar * br, ac * bc), |(i, j)| a[[i / br, j / bc]] * b[[i % br, j % bc]])
}
