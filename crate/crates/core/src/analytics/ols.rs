use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OlsError {
    #[error("x has {x} values but y has {y}")]
    LengthMismatch { x: usize, y: usize },
    #[error("need at least 3 points, got {0}")]
    InsufficientData(usize),
    #[error("predictor is constant; slope is undefined")]
    DegenerateDesign,
    #[error("non-finite value in input")]
    NonFinite,
}

/// Simple linear regression with intercept.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult {
    pub beta: f64,
    pub se: f64,
    pub t: f64,
    /// Two-sided p-value from Student's t with n - 2 degrees of freedom.
    pub p: f64,
    pub n: usize,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Two-sided tail probability `P(|T| >= |t|)` for Student's t with `df`
/// degrees of freedom, via the regularized incomplete beta function.
pub fn student_t_two_sided_p(t: f64, df: f64) -> f64 {
    if t.is_nan() || df <= 0.0 {
        return f64::NAN;
    }
    if t.is_infinite() {
        return 0.0;
    }
    let t2 = t * t;
    if t2 < df {
        (1.0 - beta_reg(0.5, df / 2.0, t2 / (df + t2))).clamp(0.0, 1.0)
    } else {
        beta_reg(df / 2.0, 0.5, df / (df + t2)).clamp(0.0, 1.0)
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Closed-form least squares fit of `y = intercept + beta * x`.
///
/// A constant response gives `beta = 0`, `se = 0`, `t = 0` and `p = 1`; an
/// exact non-flat fit gives an infinite `t` and `p = 0`. `r_squared` is 0
/// when the response has no variance.
pub fn ols_fit(x: &[f64], y: &[f64]) -> Result<RegressionResult, OlsError> {
    if x.len() != y.len() {
        return Err(OlsError::LengthMismatch { x: x.len(), y: y.len() });
    }
    let n = x.len();
    if n < 3 {
        return Err(OlsError::InsufficientData(n));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(OlsError::NonFinite);
    }
    let (mx, my) = (mean(x), mean(y));
    let sxx: f64 = x.iter().map(|xi| (xi - mx).powi(2)).sum();
    if sxx == 0.0 || x.iter().all(|&xi| xi == x[0]) {
        return Err(OlsError::DegenerateDesign);
    }
    let sxy: f64 = x.iter().zip(y).map(|(xi, yi)| (xi - mx) * (yi - my)).sum();
    let syy: f64 = y.iter().map(|yi| (yi - my).powi(2)).sum();
    let beta = sxy / sxx;
    let intercept = my - beta * mx;
    let sse: f64 = x.iter().zip(y).map(|(xi, yi)| (yi - intercept - beta * xi).powi(2)).sum();
    let df = (n - 2) as f64;
    let se = (sse / df / sxx).sqrt();
    let (t, p) = if se > 0.0 {
        let t = beta / se;
        (t, student_t_two_sided_p(t, df))
    } else if beta == 0.0 {
        (0.0, 1.0)
    } else {
        (beta.signum() * f64::INFINITY, 0.0)
    };
    let r_squared = if syy > 0.0 { (1.0 - sse / syy).clamp(0.0, 1.0) } else { 0.0 };
    Ok(RegressionResult { beta, se, t, p, n, intercept, r_squared })
}
