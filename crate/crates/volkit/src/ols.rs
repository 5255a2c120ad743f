//! Small dense least-squares solver for the diagnostic regressions.
//!
//! Designs here are tiny (a handful of columns), so the normal equations are
//! solved directly with Gauss-Jordan elimination; the full inverse of `X'X`
//! is kept for coefficient standard errors.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub(crate) struct OlsFit {
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub r_squared: f64,
    pub nobs: usize,
}

/// Ordinary least squares of `y` on row-major design `rows` (each row one
/// observation, length `k`). Errors with `SingularRegression` when `X'X`
/// is not invertible.
pub(crate) fn ols(y: &[f64], rows: &[Vec<f64>]) -> Result<OlsFit> {
    let n = y.len();
    assert_eq!(n, rows.len(), "design/response length mismatch");
    let k = rows.first().map_or(0, Vec::len);
    if n <= k || k == 0 {
        return Err(Error::TooFewObservations { have: n, need: k + 1 });
    }

    let mut xtx = vec![vec![0.0f64; k]; k];
    let mut xty = vec![0.0f64; k];
    for (row, &yi) in rows.iter().zip(y) {
        debug_assert_eq!(row.len(), k);
        for i in 0..k {
            xty[i] += row[i] * yi;
            for j in i..k {
                xtx[i][j] += row[i] * row[j];
            }
        }
    }
    for i in 0..k {
        for j in 0..i {
            xtx[i][j] = xtx[j][i];
        }
    }

    let inverse = invert_matrix(&xtx)?;
    let coefficients: Vec<f64> =
        (0..k).map(|i| (0..k).map(|j| inverse[i][j] * xty[j]).sum()).collect();

    let mut rss = 0.0;
    for (row, &yi) in rows.iter().zip(y) {
        let fitted: f64 = row.iter().zip(&coefficients).map(|(x, c)| x * c).sum();
        rss += (yi - fitted) * (yi - fitted);
    }
    let mean = y.iter().sum::<f64>() / n as f64;
    let tss: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
    let r_squared = if tss > 0.0 { 1.0 - rss / tss } else { 0.0 };

    let sigma2 = rss / (n - k) as f64;
    let std_errors: Vec<f64> = (0..k)
        .map(|i| {
            let v = sigma2 * inverse[i][i];
            if v > 0.0 {
                v.sqrt()
            } else {
                0.0
            }
        })
        .collect();

    Ok(OlsFit { coefficients, std_errors, r_squared, nobs: n })
}

/// Gauss-Jordan inverse with partial pivoting.
pub(crate) fn invert_matrix(matrix: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let k = matrix.len();
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    let mut inv: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..k).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let scale: f64 = matrix
        .iter()
        .flat_map(|row| row.iter().map(|v| v.abs()))
        .fold(0.0, f64::max)
        .max(1.0);

    for col in 0..k {
        let pivot_row = (col..k)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("non-empty");
        if a[pivot_row][col].abs() <= 1e-12 * scale {
            return Err(Error::SingularRegression);
        }
        a.swap(col, pivot_row);
        inv.swap(col, pivot_row);
        let pivot = a[col][col];
        for j in 0..k {
            a[col][j] /= pivot;
            inv[col][j] /= pivot;
        }
        for i in 0..k {
            if i == col {
                continue;
            }
            let factor = a[i][col];
            if factor == 0.0 {
                continue;
            }
            for j in 0..k {
                a[i][j] -= factor * a[col][j];
                inv[i][j] -= factor * inv[col][j];
            }
        }
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn recovers_exact_linear_relation() {
        // y = 2 + 3x, noise-free.
        let xs = [0.0, 1.0, 2.0, 3.0, 4.0];
        let rows: Vec<Vec<f64>> = xs.iter().map(|&x| vec![1.0, x]).collect();
        let y: Vec<f64> = xs.iter().map(|&x| 2.0 + 3.0 * x).collect();
        let fit = ols(&y, &rows).unwrap();
        assert_abs_diff_eq!(fit.coefficients[0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.coefficients[1], 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.r_squared, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn collinear_design_is_singular() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![1.0, i as f64, 2.0 * i as f64]).collect();
        let y: Vec<f64> = (0..10).map(|i| i as f64).collect();
        assert!(matches!(ols(&y, &rows), Err(Error::SingularRegression)));
    }

    #[test]
    fn standard_errors_match_closed_form_simple_regression() {
        // Known closed form: se(b1)² = s² / Σ(x−x̄)².
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let y = [1.1, 1.9, 3.2, 3.8, 5.1, 5.9];
        let rows: Vec<Vec<f64>> = xs.iter().map(|&x| vec![1.0, x]).collect();
        let fit = ols(&y, &rows).unwrap();
        let xbar = xs.iter().sum::<f64>() / 6.0;
        let sxx: f64 = xs.iter().map(|x| (x - xbar) * (x - xbar)).sum();
        let rss: f64 = xs
            .iter()
            .zip(&y)
            .map(|(&x, &yi)| {
                let fitted = fit.coefficients[0] + fit.coefficients[1] * x;
                (yi - fitted) * (yi - fitted)
            })
            .sum();
        let s2 = rss / 4.0;
        assert_abs_diff_eq!(fit.std_errors[1], (s2 / sxx).sqrt(), epsilon = 1e-12);
    }
}
