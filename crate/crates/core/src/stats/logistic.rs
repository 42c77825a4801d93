//! Ridge-penalized logistic regression by IRLS (Newton's method) with step
//! halving. The intercept is never penalized.
//!
//! Convergence: the infinity norm of the penalized score is at most `tol`
//! and the last Newton step moved no coefficient by more than
//! `1e-6 * (1 + |beta|_inf)`. The second condition keeps separated data,
//! whose score vanishes while the coefficients run off to infinity, from
//! being reported as converged.

use nalgebra::{DMatrix, DVector};

use super::ols::least_squares;
use super::{mcfadden, r_squared, terms_for, DesignMatrix, FitResult, ModelKind, StatsError};
use crate::decision::logistic;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticOptions {
    pub ridge: f64,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for LogisticOptions {
    fn default() -> Self {
        Self {
            ridge: 1e-6,
            max_iter: 100,
            tol: 1e-8,
        }
    }
}

const STEP_TOL: f64 = 1e-6;
const MAX_HALVINGS: usize = 40;

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Bernoulli log-likelihood of 0/1 responses `y` under coefficients `beta`
/// for an intercept-augmented design `x`.
pub fn log_likelihood(x: &DMatrix<f64>, y: &[f64], beta: &[f64]) -> f64 {
    let eta = x * DVector::from_column_slice(beta);
    eta.iter()
        .zip(y)
        .map(|(&z, &yi)| yi * z - softplus(z))
        .sum()
}

/// Analytic score `X^T (y - p)` of [`log_likelihood`].
pub fn log_likelihood_gradient(x: &DMatrix<f64>, y: &[f64], beta: &[f64]) -> Vec<f64> {
    let eta = x * DVector::from_column_slice(beta);
    let resid =
        DVector::from_iterator(y.len(), eta.iter().zip(y).map(|(&z, &yi)| yi - logistic(z)));
    (x.transpose() * resid).iter().copied().collect()
}

fn penalty(beta: &DVector<f64>, ridge: f64) -> f64 {
    0.5 * ridge * beta.iter().skip(1).map(|b| b * b).sum::<f64>()
}

fn objective(x: &DMatrix<f64>, y: &[f64], beta: &DVector<f64>, ridge: f64) -> f64 {
    log_likelihood(x, y, beta.as_slice()) - penalty(beta, ridge)
}

fn check_binary(y: &[f64]) -> Result<(), StatsError> {
    if let Some(&v) = y.iter().find(|&&v| v != 0.0 && v != 1.0) {
        return Err(StatsError::NonBinaryResponse(v));
    }
    let ones = y.iter().filter(|&&v| v == 1.0).count();
    if ones == 0 || ones == y.len() {
        return Err(StatsError::DegenerateResponse);
    }
    Ok(())
}

/// Fits `P(y = 1) = logistic(intercept + features · w)`. Non-convergence is
/// reported through `converged = false`, not as an error.
pub fn logistic_fit(data: &DesignMatrix, opts: LogisticOptions) -> Result<FitResult, StatsError> {
    if !(opts.ridge >= 0.0 && opts.ridge.is_finite()) {
        return Err(StatsError::Shape(format!(
            "ridge must be >= 0, got {}",
            opts.ridge
        )));
    }
    let y = data.response();
    check_binary(y)?;
    let x = data.with_intercept();
    let (n, p) = x.shape();
    let yv = DVector::from_column_slice(y);

    let mut beta = DVector::<f64>::zeros(p);
    let mut obj = objective(&x, y, &beta, opts.ridge);
    let mut last_step = f64::INFINITY;
    let mut grad_norm;
    let mut converged = false;
    let mut iterations = 0;

    loop {
        let eta = &x * &beta;
        let prob = eta.map(logistic);
        let weights = prob.map(|q| q * (1.0 - q));
        let mut grad = x.transpose() * (&yv - &prob);
        for j in 1..p {
            grad[j] -= opts.ridge * beta[j];
        }
        grad_norm = grad.amax();
        let beta_scale = 1.0 + beta.amax();
        if grad_norm <= opts.tol && last_step <= STEP_TOL * beta_scale {
            converged = true;
            break;
        }
        if iterations == opts.max_iter {
            break;
        }
        iterations += 1;

        // X^T W X + ridge * I (intercept excluded).
        let mut xw = x.clone();
        for i in 0..n {
            xw.row_mut(i).scale_mut(weights[i]);
        }
        let mut hess = x.transpose() * xw;
        for j in 1..p {
            hess[(j, j)] += opts.ridge;
        }
        let Some(chol) = hess.cholesky() else {
            break;
        };
        let step = chol.solve(&grad);

        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let candidate = &beta + &step * scale;
            let cand_obj = objective(&x, y, &candidate, opts.ridge);
            if cand_obj >= obj || (cand_obj - obj).abs() <= 1e-12 * obj.abs() {
                beta = candidate;
                obj = cand_obj;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        last_step = if accepted { step.amax() * scale } else { 0.0 };
        if !accepted {
            // No ascent direction left at machine precision.
            let eta = &x * &beta;
            let mut grad = x.transpose() * (&yv - eta.map(logistic));
            for j in 1..p {
                grad[j] -= opts.ridge * beta[j];
            }
            grad_norm = grad.amax();
            converged = grad_norm <= opts.tol;
            break;
        }
    }

    let ln_l = log_likelihood(&x, y, beta.as_slice());
    let ybar = y.iter().sum::<f64>() / n as f64;
    let ln_l0 = n as f64 * (ybar * ybar.ln() + (1.0 - ybar) * (1.0 - ybar).ln());
    let pseudo = mcfadden(ln_l.min(0.0), ln_l0)?;
    let binary_r2 = least_squares(&x, y).and_then(|(_, fitted)| r_squared(y, fitted.as_slice()))?;

    Ok(FitResult {
        model: ModelKind::Logistic,
        terms: terms_for(data),
        coefficients: beta.iter().copied().collect(),
        r_squared: None,
        mcfadden_pseudo_r2: Some(pseudo),
        binary_ols_r_squared: Some(binary_r2),
        log_likelihood: Some(ln_l),
        null_log_likelihood: Some(ln_l0),
        gradient_norm: Some(grad_norm),
        converged,
        iterations,
    })
}
