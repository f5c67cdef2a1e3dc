use super::{finite_column, ratio, two_sided_t, EstimateError, FitKind, FitResult, INTERCEPT, RANK_TOLERANCE};
use crate::linalg::{svd_least_squares, Rank};
use crate::Dataset;
use nalgebra::{DMatrix, DVector};

/// Least squares `target ~ 1 + regressors` with classical standard errors.
pub fn ols_fit<S: AsRef<str>>(data: &Dataset, target: &str, regressors: &[S]) -> Result<FitResult, EstimateError> {
    let n = data.n_rows();
    let p = regressors.len() + 1;
    if n <= p {
        return Err(EstimateError::InsufficientData { needed: p, got: n });
    }
    let y = DVector::from_column_slice(finite_column(data, target)?);
    let cols = regressors.iter().map(|r| finite_column(data, r.as_ref())).collect::<Result<Vec<_>, _>>()?;
    let x = DMatrix::from_fn(n, p, |i, j| if j == 0 { 1.0 } else { cols[j - 1][i] });

    let solve = match svd_least_squares(x.clone(), &y, RANK_TOLERANCE) {
        Rank::Full(s) => s,
        Rank::Deficient { ratio } => return Err(EstimateError::RankDeficient { ratio }),
    };
    let beta = solve.solution;
    let resid = &y - &x * &beta;
    let sse = resid.norm_squared();
    let df = (n - p) as f64;
    let sigma2 = sse / df;
    let mean_y = y.mean();
    let sst: f64 = y.iter().map(|v| (v - mean_y).powi(2)).sum();

    let std_errors: Vec<f64> = (0..p).map(|j| (sigma2 * solve.gram_inverse[(j, j)]).max(0.0).sqrt()).collect();
    let statistics: Vec<f64> = beta.iter().zip(&std_errors).map(|(&b, &se)| ratio(b, se)).collect();
    let p_values = statistics.iter().map(|&t| two_sided_t(t, df)).collect();

    let mut terms = vec![INTERCEPT.to_string()];
    terms.extend(regressors.iter().map(|r| r.as_ref().to_string()));
    Ok(FitResult {
        kind: FitKind::Ols,
        target: target.to_string(),
        terms,
        coefficients: beta.iter().copied().collect(),
        std_errors,
        statistics,
        p_values,
        residual_variance: sigma2,
        r_squared: (sst > 0.0).then(|| 1.0 - sse / sst),
        log_likelihood: None,
        n_used: n,
    })
}
