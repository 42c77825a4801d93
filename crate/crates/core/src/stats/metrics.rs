use super::StatsError;

/// `1 - SSE / SST`.
pub fn r_squared(y: &[f64], y_hat: &[f64]) -> Result<f64, StatsError> {
    if y.len() != y_hat.len() {
        return Err(StatsError::Shape(format!(
            "{} observations but {} fitted values",
            y.len(),
            y_hat.len()
        )));
    }
    if y.is_empty() {
        return Err(StatsError::RSquaredUndefined);
    }
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let sst: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    if sst == 0.0 {
        return Err(StatsError::RSquaredUndefined);
    }
    let sse: f64 = y.iter().zip(y_hat).map(|(a, b)| (a - b).powi(2)).sum();
    Ok(1.0 - sse / sst)
}

/// McFadden pseudo-R²: `1 - lnL / lnL0`. `lnL0` is the intercept-only
/// log-likelihood and must be negative.
pub fn mcfadden(ln_l: f64, ln_l0: f64) -> Result<f64, StatsError> {
    if ln_l0.is_nan() || ln_l0 >= 0.0 || !ln_l.is_finite() || ln_l > 0.0 {
        return Err(StatsError::LikelihoodDomain(format!(
            "lnL = {ln_l}, lnL0 = {ln_l0}"
        )));
    }
    Ok(1.0 - ln_l / ln_l0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_and_mean_predictions() {
        let y = [1.0, 4.0, 2.0, 7.0];
        assert_eq!(r_squared(&y, &y).unwrap(), 1.0);
        let m = [3.5; 4];
        assert_eq!(r_squared(&y, &m).unwrap(), 0.0);
    }

    #[test]
    fn constant_response_is_undefined() {
        assert_eq!(
            r_squared(&[2.0; 5], &[1.0; 5]),
            Err(StatsError::RSquaredUndefined)
        );
    }

    #[test]
    fn mcfadden_of_null_model_is_zero() {
        assert_eq!(mcfadden(-120.5, -120.5).unwrap(), 0.0);
        assert!((mcfadden(-60.0, -120.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(mcfadden(-1.0, 0.0).is_err());
    }
}
