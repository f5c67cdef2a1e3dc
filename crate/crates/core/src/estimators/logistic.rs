use super::{finite_column, ratio, two_sided_normal, EstimateError, FitKind, FitResult, INTERCEPT};
use crate::Dataset;
use nalgebra::{DMatrix, DVector};

/// Gradient norm at which Newton iterations stop.
pub const GRADIENT_TOLERANCE: f64 = 1e-8;
const MAX_ITERATIONS: usize = 100;
const MAX_COEFFICIENT: f64 = 1e3;

/// `ln(1 + e^x)` without overflow.
pub(crate) fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn log_likelihood(x: &DMatrix<f64>, y: &DVector<f64>, beta: &DVector<f64>) -> f64 {
    let eta = x * beta;
    eta.iter().zip(y.iter()).map(|(&e, &t)| t * e - softplus(e)).sum()
}

/// Maximum-likelihood logistic regression `P(target = 1) = σ(1 + regressors)`
/// by damped Newton, with Wald standard errors from the observed information.
pub fn logistic_fit<S: AsRef<str>>(data: &Dataset, target: &str, regressors: &[S]) -> Result<FitResult, EstimateError> {
    let n = data.n_rows();
    let p = regressors.len() + 1;
    if n <= p {
        return Err(EstimateError::InsufficientData { needed: p, got: n });
    }
    let yv = finite_column(data, target)?;
    if yv.iter().any(|&v| v != 0.0 && v != 1.0) {
        return Err(EstimateError::NonBinaryTarget(target.to_string()));
    }
    let positives = yv.iter().filter(|&&v| v == 1.0).count();
    if positives == 0 || positives == n {
        return Err(EstimateError::Separation(format!("target `{target}` is constant")));
    }
    let y = DVector::from_column_slice(yv);
    let cols = regressors.iter().map(|r| finite_column(data, r.as_ref())).collect::<Result<Vec<_>, _>>()?;
    let x = DMatrix::from_fn(n, p, |i, j| if j == 0 { 1.0 } else { cols[j - 1][i] });

    let mut beta = DVector::zeros(p);
    let mut ll = log_likelihood(&x, &y, &beta);
    let mut converged = false;
    let mut hessian = DMatrix::zeros(p, p);
    for _ in 0..MAX_ITERATIONS {
        let eta = &x * &beta;
        let prob = eta.map(sigmoid);
        let grad = x.transpose() * (&y - &prob);
        let weights = prob.map(|q| q * (1.0 - q));
        let mut xw = x.clone();
        for (i, mut row) in xw.row_iter_mut().enumerate() {
            row *= weights[i];
        }
        hessian = x.transpose() * xw;
        if grad.norm() < GRADIENT_TOLERANCE {
            converged = true;
            break;
        }
        let Some(chol) = hessian.clone().cholesky() else {
            return Err(EstimateError::Separation("information matrix is singular".into()));
        };
        let step = chol.solve(&grad);
        // Halve the step until the likelihood does not decrease.
        let mut t = 1.0;
        loop {
            let candidate = &beta + &step * t;
            let cand_ll = log_likelihood(&x, &y, &candidate);
            if cand_ll >= ll - 1e-12 * ll.abs() || t < 1e-10 {
                beta = candidate;
                ll = cand_ll;
                break;
            }
            t *= 0.5;
        }
        if beta.amax() > MAX_COEFFICIENT {
            return Err(EstimateError::Separation("coefficients grew without bound".into()));
        }
    }
    if !converged {
        return Err(EstimateError::Separation(format!("no convergence in {MAX_ITERATIONS} Newton steps")));
    }
    if ll > -1e-6 {
        return Err(EstimateError::Separation("fitted probabilities are numerically 0 or 1".into()));
    }

    let cov = hessian.try_inverse().ok_or_else(|| EstimateError::Separation("information matrix is singular".into()))?;
    let std_errors: Vec<f64> = (0..p).map(|j| cov[(j, j)].max(0.0).sqrt()).collect();
    let statistics: Vec<f64> = beta.iter().zip(&std_errors).map(|(&b, &se)| ratio(b, se)).collect();
    let p_values = statistics.iter().map(|&z| two_sided_normal(z)).collect();

    let mut terms = vec![INTERCEPT.to_string()];
    terms.extend(regressors.iter().map(|r| r.as_ref().to_string()));
    Ok(FitResult {
        kind: FitKind::Logistic,
        target: target.to_string(),
        terms,
        coefficients: beta.iter().copied().collect(),
        std_errors,
        statistics,
        p_values,
        residual_variance: 1.0,
        r_squared: None,
        log_likelihood: Some(ll),
        n_used: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn simulated(n: usize, seed: u64, b0: f64, b1: f64) -> Dataset {
        let x: Vec<f64> = (0..n as u64).map(|i| rng::normal(seed, 0, i)).collect();
        let y: Vec<f64> = x.iter().enumerate().map(|(i, &v)| f64::from(rng::uniform(seed, 1, i as u64) < sigmoid(b0 + b1 * v))).collect();
        Dataset::from_columns([("x", x), ("y", y)], seed).unwrap()
    }

    #[test]
    fn stable_link_functions() {
        assert_eq!(softplus(800.0), 800.0);
        assert!(softplus(-800.0) >= 0.0 && softplus(-800.0) < 1e-300);
        assert!((softplus(0.0) - 2f64.ln()).abs() < 1e-15);
        assert_eq!(sigmoid(-800.0), 0.0);
        assert_eq!(sigmoid(800.0), 1.0);
    }

    #[test]
    fn recovers_coefficients() {
        let d = simulated(20_000, 9, -0.5, 1.5);
        let fit = logistic_fit(&d, "y", &["x"]).unwrap();
        assert!((fit.intercept() + 0.5).abs() < 4.0 * fit.std_errors[0]);
        assert!((fit.coefficients[1] - 1.5).abs() < 4.0 * fit.std_errors[1]);
        assert!(fit.p_values[1] < 1e-10);
    }

    #[test]
    fn gradient_vanishes_at_optimum() {
        let d = simulated(500, 4, 0.3, -0.8);
        let fit = logistic_fit(&d, "y", &["x"]).unwrap();
        let (x, y) = (d.column("x").unwrap(), d.column("y").unwrap());
        let mut g = [0.0; 2];
        for i in 0..x.len() {
            let r = y[i] - sigmoid(fit.linear_predictor(&[x[i]]));
            g[0] += r;
            g[1] += r * x[i];
        }
        assert!(g[0].hypot(g[1]) < GRADIENT_TOLERANCE);
    }

    #[test]
    fn hand_checked_small_problem() {
        // Balanced design with no signal: MLE is exactly zero, SE = 2/sqrt(n) for the intercept.
        let d = Dataset::from_columns([("x", vec![-1.0, -1.0, 1.0, 1.0]), ("y", vec![0.0, 1.0, 0.0, 1.0])], 0).unwrap();
        let fit = logistic_fit(&d, "y", &["x"]).unwrap();
        assert!(fit.coefficients.iter().all(|b| b.abs() < 1e-12));
        assert!((fit.std_errors[0] - 1.0).abs() < 1e-12);
        assert!((fit.log_likelihood.unwrap() - 4.0 * 0.5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn error_paths() {
        let sep = Dataset::from_columns([("x", vec![-2.0, -1.0, 1.0, 2.0]), ("y", vec![0.0, 0.0, 1.0, 1.0])], 0).unwrap();
        assert!(matches!(logistic_fit(&sep, "y", &["x"]), Err(EstimateError::Separation(_))));
        let bad = Dataset::from_columns([("x", vec![-2.0, -1.0, 1.0, 2.0]), ("y", vec![0.0, 0.5, 1.0, 1.0])], 0).unwrap();
        assert!(matches!(logistic_fit(&bad, "y", &["x"]), Err(EstimateError::NonBinaryTarget(_))));
        let flat = Dataset::from_columns([("x", vec![-2.0, -1.0, 1.0, 2.0]), ("y", vec![1.0; 4])], 0).unwrap();
        assert!(matches!(logistic_fit(&flat, "y", &["x"]), Err(EstimateError::Separation(_))));
    }
}
