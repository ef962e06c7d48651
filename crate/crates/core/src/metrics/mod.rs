//! Regression metrics for label predictions.
//!
//! `MAE = (1/n) Σ |yᵢ − ŷᵢ|`, `P_l = |{i : |yᵢ − ŷᵢ| ≤ l}| / n` (inclusive),
//! `APE(i) = 100 · |yᵢ − ŷᵢ| / yᵢ` and `MAPE = (1/n) Σ APE(i)`.

mod boxplot;
pub mod report;
pub mod svg;

use thiserror::Error;

pub use boxplot::{grouped_boxplot_stats, quantile_sorted, ErrorMode, GroupStats};
pub use report::{EvalReport, ReportRow};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("length mismatch: {actual} actual vs {predicted} predicted values")]
    LengthMismatch { actual: usize, predicted: usize },
    #[error("no records")]
    Empty,
    #[error("record {index}: actual value {value} must be positive for a percentage error")]
    NonPositiveActual { index: usize, value: f64 },
    #[error("threshold must be non-negative, got {0}")]
    NegativeThreshold(f64),
    #[error("bin width must be at least 1")]
    ZeroBinWidth,
    #[error("malformed report: {0}")]
    Parse(String),
}

fn check(actual: &[f64], predicted: &[f64]) -> Result<(), MetricsError> {
    if actual.len() != predicted.len() {
        return Err(MetricsError::LengthMismatch {
            actual: actual.len(),
            predicted: predicted.len(),
        });
    }
    if actual.is_empty() {
        return Err(MetricsError::Empty);
    }
    Ok(())
}

/// Per-record `|yᵢ − ŷᵢ|`.
pub fn absolute_errors(actual: &[f64], predicted: &[f64]) -> Result<Vec<f64>, MetricsError> {
    check(actual, predicted)?;
    Ok(actual.iter().zip(predicted).map(|(y, p)| (y - p).abs()).collect())
}

pub fn mae(actual: &[f64], predicted: &[f64]) -> Result<f64, MetricsError> {
    let errors = absolute_errors(actual, predicted)?;
    Ok(errors.iter().sum::<f64>() / errors.len() as f64)
}

/// Fraction of records whose absolute error is at most `l`.
pub fn p_l(actual: &[f64], predicted: &[f64], l: f64) -> Result<f64, MetricsError> {
    if l.is_nan() || l < 0.0 {
        return Err(MetricsError::NegativeThreshold(l));
    }
    let errors = absolute_errors(actual, predicted)?;
    Ok(errors.iter().filter(|&&e| e <= l).count() as f64 / errors.len() as f64)
}

/// Absolute percentage error of one record.
pub fn ape(actual: f64, predicted: f64) -> Result<f64, MetricsError> {
    if actual.is_nan() || actual <= 0.0 {
        return Err(MetricsError::NonPositiveActual { index: 0, value: actual });
    }
    Ok(100.0 * (actual - predicted).abs() / actual)
}

pub fn percentage_errors(actual: &[f64], predicted: &[f64]) -> Result<Vec<f64>, MetricsError> {
    check(actual, predicted)?;
    actual
        .iter()
        .zip(predicted)
        .enumerate()
        .map(|(index, (&y, &p))| ape(y, p).map_err(|_| MetricsError::NonPositiveActual { index, value: y }))
        .collect()
}

pub fn mape(actual: &[f64], predicted: &[f64]) -> Result<f64, MetricsError> {
    let errors = percentage_errors(actual, predicted)?;
    Ok(errors.iter().sum::<f64>() / errors.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn mae_examples() {
        assert_relative_eq!(mae(&[3.0, 4.0, 5.0], &[3.5, 4.0, 6.0]).unwrap(), 0.5);
        assert_eq!(mae(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(mae(&[2.0], &[4.0]).unwrap(), 2.0);
        assert_eq!(mae(&[], &[]), Err(MetricsError::Empty));
        assert!(matches!(mae(&[1.0], &[1.0, 2.0]), Err(MetricsError::LengthMismatch { .. })));
    }

    #[test]
    fn p_l_examples() {
        let y = [3.0, 4.0, 5.0];
        let p = [3.5, 4.0, 6.0];
        assert_eq!(p_l(&y, &p, 1.0).unwrap(), 1.0);
        assert_relative_eq!(p_l(&y, &p, 0.5).unwrap(), 2.0 / 3.0);
        assert_eq!(p_l(&y, &y, 0.0).unwrap(), 1.0);
        assert!(p_l(&y, &p, -0.1).is_err());
    }

    #[test]
    fn ape_examples() {
        assert_eq!(format!("{:.1}", ape(30.0, 32.0).unwrap()), "6.7");
        assert_eq!(ape(2.0, 4.0).unwrap(), 100.0);
        assert_eq!(ape(7.0, 7.0).unwrap(), 0.0);
        assert!(ape(0.0, 1.0).is_err());
    }

    #[test]
    fn mape_examples() {
        let m = mape(&[30.0, 2.0], &[32.0, 4.0]).unwrap();
        assert_relative_eq!(m, (200.0 / 30.0 + 100.0) / 2.0, epsilon = 1e-12);
        assert_eq!(format!("{m:.1}"), "53.3");
        assert_eq!(mape(&[3.0, 9.0], &[3.0, 9.0]).unwrap(), 0.0);
        assert_eq!(mape(&[4.0], &[5.0]).unwrap(), 25.0);
        assert!(matches!(
            mape(&[1.0, 0.0], &[1.0, 1.0]),
            Err(MetricsError::NonPositiveActual { index: 1, .. })
        ));
    }

    fn pairs() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (1usize..60).prop_flat_map(|n| {
            (
                proptest::collection::vec(1.0f64..50.0, n),
                proptest::collection::vec(-5.0f64..60.0, n),
            )
        })
    }

    proptest! {
        #[test]
        fn p_l_is_monotone((y, p) in pairs(), a in 0.0f64..5.0, b in 0.0f64..5.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(p_l(&y, &p, lo).unwrap() <= p_l(&y, &p, hi).unwrap());
        }

        #[test]
        fn zero_mae_iff_all_exact((y, p) in pairs(), exact in any::<bool>()) {
            let p = if exact { y.clone() } else { p };
            prop_assert_eq!(mae(&y, &p).unwrap() == 0.0, p_l(&y, &p, 0.0).unwrap() == 1.0);
        }

        #[test]
        fn mape_is_scale_invariant((y, p) in pairs(), s in 0.1f64..10.0) {
            let ys: Vec<f64> = y.iter().map(|v| v * s).collect();
            let ps: Vec<f64> = p.iter().map(|v| v * s).collect();
            let a = mape(&y, &p).unwrap();
            let b = mape(&ys, &ps).unwrap();
            prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
        }
    }
}
