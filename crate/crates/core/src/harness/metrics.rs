use serde::Serialize;

use crate::error::{Error, Result};

/// Jain's fairness index `(sum U)^2 / (I * sum U^2)`.
///
/// Returns exactly 1.0 when every value is equal, so perfectly even
/// allocations are not blurred by rounding.
pub fn jain_index(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::input("Jain index of an empty allocation"));
    }
    if values.iter().all(|&v| v == 0.0) {
        return Err(Error::input(
            "Jain index is undefined when every value is zero",
        ));
    }
    if values.iter().all(|&v| v == values[0]) {
        return Ok(1.0);
    }
    let sum: f64 = values.iter().sum();
    let squares: f64 = values.iter().map(|v| v * v).sum();
    Ok(sum * sum / (values.len() as f64 * squares))
}

/// Sample mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub mean: f64,
    /// `s / sqrt(n)` with the unbiased sample deviation; 0 for `n < 2`.
    pub se: f64,
    pub n: usize,
}

impl Summary {
    pub fn of(values: &[f64]) -> Option<Self> {
        let n = values.len();
        if n == 0 {
            return None;
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let se = if n < 2 {
            0.0
        } else {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        };
        Some(Self { mean, se, n })
    }
}
