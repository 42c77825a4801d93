//! Sharing models: the consumer's logistic share decision and the creator's
//! linear prediction of total hits.

use serde::{Deserialize, Serialize};

use crate::content::FeatureVector;
use crate::error::{ConfigError, InputError, Violation};
use crate::rng::RngStream;

/// Standard logistic function, evaluated without overflow for large |z|.
#[inline]
pub fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Consumer model: `P(share) = logistic(intercept + w · features)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SharingModel {
    pub intercept: f64,
    pub w_humor: f64,
    pub w_relevance: f64,
    pub w_selfref: f64,
}

impl Default for SharingModel {
    /// Calibrated defaults, not fitted values. See the README for the sweep
    /// that produced them.
    fn default() -> Self {
        Self {
            intercept: -5.2,
            w_humor: 0.4,
            w_relevance: 0.4,
            w_selfref: 0.2,
        }
    }
}

impl SharingModel {
    pub fn new(intercept: f64, w_humor: f64, w_relevance: f64, w_selfref: f64) -> Self {
        Self {
            intercept,
            w_humor,
            w_relevance,
            w_selfref,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let violations: Vec<Violation> = [
            ("sharing_model.intercept", self.intercept),
            ("sharing_model.w_humor", self.w_humor),
            ("sharing_model.w_relevance", self.w_relevance),
            ("sharing_model.w_selfref", self.w_selfref),
        ]
        .into_iter()
        .filter(|(_, v)| !v.is_finite())
        .map(|(name, _)| Violation::new(name, "must be finite"))
        .collect();
        if violations.is_empty() {
            Ok(())
        } else {
            Err(ConfigError { violations })
        }
    }

    pub fn linear_predictor(&self, f: &FeatureVector) -> f64 {
        self.intercept
            + self.w_humor * f.humor
            + self.w_relevance * f.self_relevance
            + self.w_selfref * f.self_reference
    }

    /// Same model with every coefficient negated.
    pub fn negated(&self) -> Self {
        Self::new(
            -self.intercept,
            -self.w_humor,
            -self.w_relevance,
            -self.w_selfref,
        )
    }
}

pub fn share_probability(model: &SharingModel, f: &FeatureVector) -> Result<f64, InputError> {
    if let Some((name, value)) = f.first_non_finite() {
        return Err(InputError::NonFinite { name, value });
    }
    Ok(logistic(model.linear_predictor(f)))
}

/// Bernoulli(`p`) draw. Always consumes one word from `rng`, even for p = 0
/// or 1, so the stream position does not depend on the probabilities seen.
pub fn decide_share(rng: &mut RngStream, p: f64) -> Result<bool, InputError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(InputError::ProbabilityOutOfRange(p));
    }
    Ok(rng.bernoulli(p))
}

/// Creator model: total hits as a linear function of creator-side ratings
/// (humor, self-relevance, predicted liking, optional scale scores).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CreatorModel {
    pub intercept: f64,
    pub weights: Vec<f64>,
}

impl CreatorModel {
    pub fn new(intercept: f64, weights: Vec<f64>) -> Self {
        Self { intercept, weights }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }
}

/// `intercept + weights · features`. Can be negative; callers clamp for display.
pub fn predict_total_hits(model: &CreatorModel, features: &[f64]) -> Result<f64, InputError> {
    if features.len() != model.dim() {
        return Err(InputError::LengthMismatch {
            expected: model.dim(),
            actual: features.len(),
        });
    }
    Ok(model.intercept
        + model
            .weights
            .iter()
            .zip(features)
            .map(|(w, x)| w * x)
            .sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::StreamLabel;
    use proptest::prelude::*;

    #[test]
    fn zero_model_is_one_half() {
        let m = SharingModel::new(0.0, 0.0, 0.0, 0.0);
        let p = share_probability(&m, &FeatureVector::new(3.0, -7.0, 1e6)).unwrap();
        assert_eq!(p, 0.5);
    }

    #[test]
    fn humor_two_gives_logistic_of_two() {
        // 1 / (1 + e^-2) to 12 significant digits.
        let m = SharingModel::new(0.0, 1.0, 0.0, 0.0);
        let p = share_probability(&m, &FeatureVector::new(2.0, 0.0, 0.0)).unwrap();
        assert!((p - 0.880_797_077_977_882).abs() < 1e-12, "{p}");
    }

    #[test]
    fn non_finite_feature_rejected() {
        let m = SharingModel::default();
        let err = share_probability(&m, &FeatureVector::new(0.0, f64::NAN, 0.0)).unwrap_err();
        assert!(matches!(
            err,
            InputError::NonFinite {
                name: "self_relevance",
                ..
            }
        ));
    }

    #[test]
    fn result_strictly_inside_unit_interval_for_moderate_inputs() {
        let m = SharingModel::new(-30.0, 1.0, 1.0, 1.0);
        let p = share_probability(&m, &FeatureVector::new(0.0, 0.0, 0.0)).unwrap();
        assert!(p > 0.0 && p < 1.0);
    }

    #[test]
    fn decide_share_edges() {
        let mut rng = RngStream::new(1, StreamLabel::Decisions);
        for _ in 0..1000 {
            assert!(!decide_share(&mut rng, 0.0).unwrap());
            assert!(decide_share(&mut rng, 1.0).unwrap());
        }
        assert!(decide_share(&mut rng, 1.5).is_err());
        assert!(decide_share(&mut rng, -0.1).is_err());
        assert!(decide_share(&mut rng, f64::NAN).is_err());
    }

    #[test]
    fn decide_share_frequency() {
        // 3 * sqrt(0.25 / 10_000) = 0.015.
        let mut rng = RngStream::new(2, StreamLabel::Decisions);
        let hits = (0..10_000)
            .filter(|_| decide_share(&mut rng, 0.5).unwrap())
            .count();
        assert!((hits as f64 / 10_000.0 - 0.5).abs() <= 0.015, "{hits}");
    }

    #[test]
    fn decide_share_reproducible() {
        let draw = || {
            let mut rng = RngStream::new(3, StreamLabel::Decisions);
            (0..64)
                .map(|_| decide_share(&mut rng, 0.3).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(), draw());
    }

    #[test]
    fn creator_model_examples() {
        let m = CreatorModel::new(5.0, vec![0.0, 0.0, 0.0]);
        assert_eq!(predict_total_hits(&m, &[1.0, -4.0, 9.0]).unwrap(), 5.0);
        let m = CreatorModel::new(0.0, vec![1.0, 1.0]);
        assert_eq!(predict_total_hits(&m, &[2.0, 3.0]).unwrap(), 5.0);
        assert_eq!(
            predict_total_hits(&m, &[1.0]).unwrap_err(),
            InputError::LengthMismatch {
                expected: 2,
                actual: 1
            }
        );
    }

    fn feature() -> impl Strategy<Value = f64> {
        -5.0..5.0f64
    }

    proptest! {
        #[test]
        fn monotone_in_each_feature(
            b0 in -3.0..3.0f64, w in prop::array::uniform3(-2.0..2.0f64),
            f in prop::array::uniform3(feature()), which in 0usize..3, step in 0.1..1.0f64,
        ) {
            let m = SharingModel::new(b0, w[0], w[1], w[2]);
            let mut g = f;
            g[which] += step;
            let p = share_probability(&m, &FeatureVector::new(f[0], f[1], f[2])).unwrap();
            let q = share_probability(&m, &FeatureVector::new(g[0], g[1], g[2])).unwrap();
            if w[which] > 0.05 {
                prop_assert!(q > p);
            } else if w[which] < -0.05 {
                prop_assert!(q < p);
            }
        }

        #[test]
        fn logistic_symmetry(
            b0 in -4.0..4.0f64, w in prop::array::uniform3(-2.0..2.0f64),
            f in prop::array::uniform3(feature()),
        ) {
            let m = SharingModel::new(b0, w[0], w[1], w[2]);
            let fv = FeatureVector::new(f[0], f[1], f[2]);
            let p = share_probability(&m, &fv).unwrap();
            let q = share_probability(&m.negated(), &fv).unwrap();
            prop_assert!((p + q - 1.0).abs() < 1e-12);
        }

        #[test]
        fn creator_model_is_linear(
            w in prop::collection::vec(-3.0..3.0f64, 4),
            a in prop::collection::vec(-10.0..10.0f64, 4),
            b in prop::collection::vec(-10.0..10.0f64, 4),
            c in -5.0..5.0f64,
        ) {
            let m = CreatorModel::new(0.0, w);
            let pa = predict_total_hits(&m, &a).unwrap();
            let pb = predict_total_hits(&m, &b).unwrap();
            let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
            let scaled: Vec<f64> = a.iter().map(|x| c * x).collect();
            let tol = 1e-12 * (1.0 + pa.abs() + pb.abs()) * 100.0;
            prop_assert!((predict_total_hits(&m, &sum).unwrap() - (pa + pb)).abs() <= tol);
            prop_assert!((predict_total_hits(&m, &scaled).unwrap() - c * pa).abs() <= tol * (1.0 + c.abs()));
        }
    }
}
