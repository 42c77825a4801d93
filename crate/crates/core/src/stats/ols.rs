use nalgebra::{DMatrix, DVector};

use super::{r_squared, terms_for, DesignMatrix, FitResult, ModelKind, StatsError};

/// Relative size below which a diagonal entry of R counts as zero.
const RANK_TOL: f64 = 1e-10;

/// Least squares on an intercept-augmented design via Householder QR.
/// Returns the coefficients and fitted values.
pub(crate) fn least_squares(
    x: &DMatrix<f64>,
    y: &[f64],
) -> Result<(DVector<f64>, DVector<f64>), StatsError> {
    let p = x.ncols();
    let qr = x.clone().qr();
    let r = qr.r();
    let scale = (0..p).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    if scale == 0.0 || (0..p).any(|i| r[(i, i)].abs() <= RANK_TOL * scale) {
        return Err(StatsError::Singular);
    }
    let mut qty = DVector::from_column_slice(y);
    qr.q_tr_mul(&mut qty);
    let rhs = qty.rows(0, p).into_owned();
    let beta = r.solve_upper_triangular(&rhs).ok_or(StatsError::Singular)?;
    let fitted = x * &beta;
    Ok((beta, fitted))
}

/// Ordinary least squares with an intercept.
pub fn ols_fit(data: &DesignMatrix) -> Result<FitResult, StatsError> {
    let y = data.response();
    let first = y[0];
    if y.iter().all(|&v| v == first) {
        return Err(StatsError::RSquaredUndefined);
    }
    let x = data.with_intercept();
    let (beta, fitted) = least_squares(&x, y)?;
    let r2 = r_squared(y, fitted.as_slice())?;
    Ok(FitResult {
        model: ModelKind::Ols,
        terms: terms_for(data),
        coefficients: beta.iter().copied().collect(),
        r_squared: Some(r2),
        mcfadden_pseudo_r2: None,
        binary_ols_r_squared: None,
        log_likelihood: None,
        null_log_likelihood: None,
        gradient_norm: None,
        converged: true,
        iterations: 1,
    })
}
