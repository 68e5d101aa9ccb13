//! Paired Student t-test with an analytic two-sided p-value.

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use super::MetricsError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    pub t: f64,
    pub df: u64,
    pub p_two_sided: f64,
    pub mean_difference: f64,
    /// "a>b", "a<b", or "a=b" from the sign of the mean difference.
    pub direction: String,
}

impl TTestResult {
    pub fn significant(&self, alpha: f64) -> bool {
        self.p_two_sided < alpha
    }
}

/// Tests whether the mean of `a[i] - b[i]` differs from zero.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<TTestResult, MetricsError> {
    if a.len() != b.len() {
        return Err(MetricsError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let n = a.len();
    if n < 2 {
        return Err(MetricsError::TooFewPairs(n));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(MetricsError::NonFinite);
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    if diffs.iter().all(|d| *d == diffs[0]) {
        return Err(MetricsError::DegenerateZeroVariance);
    }
    let nf = n as f64;
    let mean = diffs.iter().sum::<f64>() / nf;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (nf - 1.0);
    let t = mean / (var.sqrt() / nf.sqrt());
    let df = (n - 1) as u64;
    let p = student_t_two_sided(t, df as f64);
    let direction = if mean > 0.0 {
        "a>b"
    } else if mean < 0.0 {
        "a<b"
    } else {
        "a=b"
    };
    Ok(TTestResult {
        t,
        df,
        p_two_sided: p,
        mean_difference: mean,
        direction: direction.to_string(),
    })
}

/// P(|T| >= |t|) for Student's t with `df` degrees of freedom, via the
/// identity `2 * sf(|t|) = I_{df/(df+t^2)}(df/2, 1/2)`.
pub fn student_t_two_sided(t: f64, df: f64) -> f64 {
    let x = df / (df + t * t);
    beta_reg(df / 2.0, 0.5, x).clamp(f64::MIN_POSITIVE, 1.0)
}
