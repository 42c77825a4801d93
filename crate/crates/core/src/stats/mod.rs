//! Regression fits for the creator model (OLS) and the consumer model
//! (logistic), with R² and McFadden pseudo-R² reporting.

mod logistic;
mod metrics;
mod ols;
mod table;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use logistic::{log_likelihood, log_likelihood_gradient, logistic_fit, LogisticOptions};
pub use metrics::{mcfadden, r_squared};
pub use ols::ols_fit;
pub use table::{read_table, RESPONSE_COLUMN};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("design matrix is rank deficient")]
    Singular,
    #[error("response is constant, R² is undefined")]
    RSquaredUndefined,
    #[error("response has a single class")]
    DegenerateResponse,
    #[error("response value {0} is not 0 or 1")]
    NonBinaryResponse(f64),
    #[error("non-finite value at row {row}, column {column}")]
    NonFinite { row: usize, column: usize },
    #[error("{0}")]
    Shape(String),
    #[error("log-likelihood arguments invalid: {0}")]
    LikelihoodDomain(String),
    #[error("table error: {0}")]
    Table(String),
}

impl StatsError {
    /// Stable machine-readable reason, used by the CLI.
    pub fn code(&self) -> &'static str {
        match self {
            StatsError::Singular => "singular-design",
            StatsError::RSquaredUndefined => "r2-undefined",
            StatsError::DegenerateResponse => "degenerate-response",
            StatsError::NonBinaryResponse(_) => "non-binary-response",
            StatsError::NonFinite { .. } => "non-finite",
            StatsError::Shape(_) => "bad-shape",
            StatsError::LikelihoodDomain(_) => "likelihood-domain",
            StatsError::Table(_) => "bad-table",
        }
    }
}

/// n observations of k named features plus a response. The intercept column
/// is implicit and added by the fitters.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    feature_names: Vec<String>,
    features: DMatrix<f64>,
    response: Vec<f64>,
}

impl DesignMatrix {
    pub fn new(
        feature_names: Vec<String>,
        rows: &[Vec<f64>],
        response: Vec<f64>,
    ) -> Result<Self, StatsError> {
        let n = rows.len();
        let k = feature_names.len();
        if response.len() != n {
            return Err(StatsError::Shape(format!(
                "{n} rows but {} responses",
                response.len()
            )));
        }
        if n <= k {
            return Err(StatsError::Shape(format!(
                "need more observations than features, got n = {n}, k = {k}"
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(StatsError::Shape(format!(
                    "row {i} has {} values, expected {k}",
                    row.len()
                )));
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(StatsError::NonFinite { row: i, column: j });
            }
        }
        if let Some(i) = response.iter().position(|v| !v.is_finite()) {
            return Err(StatsError::NonFinite { row: i, column: k });
        }
        let features = DMatrix::from_fn(n, k, |i, j| rows[i][j]);
        Ok(Self {
            feature_names,
            features,
            response,
        })
    }

    /// Single-feature convenience constructor.
    pub fn from_xy(x: &[f64], y: &[f64]) -> Result<Self, StatsError> {
        let rows: Vec<Vec<f64>> = x.iter().map(|&v| vec![v]).collect();
        Self::new(vec!["x".to_string()], &rows, y.to_vec())
    }

    pub fn n(&self) -> usize {
        self.features.nrows()
    }

    pub fn k(&self) -> usize {
        self.features.ncols()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn features(&self) -> &DMatrix<f64> {
        &self.features
    }

    pub fn response(&self) -> &[f64] {
        &self.response
    }

    /// Features with a leading column of ones.
    pub fn with_intercept(&self) -> DMatrix<f64> {
        let (n, k) = self.features.shape();
        DMatrix::from_fn(n, k + 1, |i, j| {
            if j == 0 {
                1.0
            } else {
                self.features[(i, j - 1)]
            }
        })
    }

    /// Copy with feature column `j` multiplied by `c`.
    pub fn scale_feature(&self, j: usize, c: f64) -> Self {
        let mut out = self.clone();
        out.features.column_mut(j).scale_mut(c);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Ols,
    Logistic,
}

/// Outcome of a fit. Serialized as the CLI's JSON output; field names are
/// part of the file format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: ModelKind,
    /// `intercept` followed by the feature names.
    pub terms: Vec<String>,
    /// Same order as `terms`.
    pub coefficients: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_squared: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mcfadden_pseudo_r2: Option<f64>,
    /// R² of an OLS fit to the same 0/1 response; logistic fits only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub binary_ols_r_squared: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log_likelihood: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub null_log_likelihood: Option<f64>,
    /// Infinity norm of the (penalized) score at the returned coefficients.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gradient_norm: Option<f64>,
    pub converged: bool,
    pub iterations: usize,
}

fn terms_for(data: &DesignMatrix) -> Vec<String> {
    std::iter::once("intercept".to_string())
        .chain(data.feature_names().iter().cloned())
        .collect()
}
