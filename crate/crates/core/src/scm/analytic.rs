//! Closed-form moments of linear-Gaussian models.
//!
//! These are the ground truth the sampled estimates are compared against:
//! population covariance by forward propagation, the coefficients any
//! consistent OLS fit converges to, and path-product total effects.

use super::{ScmError, StructuralModel};
use crate::linalg;
use nalgebra::{DMatrix, DVector};

/// Condition-number guard for population regressions.
pub const MAX_CONDITION: f64 = 1e12;

/// Means and covariance over all nodes, indexed in declaration order.
#[derive(Debug, Clone)]
pub struct PopulationMoments {
    names: Vec<String>,
    pub mean: DVector<f64>,
    pub covariance: DMatrix<f64>,
}

impl PopulationMoments {
    fn idx(&self, node: &str) -> Result<usize, ScmError> {
        self.names.iter().position(|n| n == node).ok_or_else(|| ScmError::UnknownNode(node.to_string()))
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn cov(&self, a: &str, b: &str) -> Result<f64, ScmError> {
        Ok(self.covariance[(self.idx(a)?, self.idx(b)?)])
    }

    pub fn var(&self, a: &str) -> Result<f64, ScmError> {
        self.cov(a, a)
    }

    pub fn mean_of(&self, a: &str) -> Result<f64, ScmError> {
        Ok(self.mean[self.idx(a)?])
    }

    pub fn correlation(&self, a: &str, b: &str) -> Result<f64, ScmError> {
        Ok(self.cov(a, b)? / (self.var(a)? * self.var(b)?).sqrt())
    }
}

/// Population least-squares fit `target ~ 1 + regressors`.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationFit {
    pub intercept: f64,
    pub regressors: Vec<String>,
    pub coefficients: Vec<f64>,
}

impl PopulationFit {
    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.regressors.iter().position(|r| r == name).map(|i| self.coefficients[i])
    }
}

impl StructuralModel {
    /// Exact means and covariance of a linear model with Gaussian or constant noise.
    pub fn population_moments(&self) -> Result<PopulationMoments, ScmError> {
        let k = self.names.len();
        let mut mean = DVector::zeros(k);
        let mut cov = DMatrix::zeros(k, k);
        let mut done: Vec<usize> = Vec::with_capacity(k);
        for &j in &self.order {
            let (weights, intercept, noise_var) = self.linear_parts(j)?;
            let parents = &self.parent_index[j];
            mean[j] = intercept + self.assignments[j].noise.mean() + parents.iter().zip(weights).map(|(&p, w)| w * mean[p]).sum::<f64>();
            for &i in &done {
                let c: f64 = parents.iter().zip(weights).map(|(&p, w)| w * cov[(p, i)]).sum();
                cov[(j, i)] = c;
                cov[(i, j)] = c;
            }
            let mut v = noise_var;
            for (&p, wp) in parents.iter().zip(weights) {
                for (&q, wq) in parents.iter().zip(weights) {
                    v += wp * wq * cov[(p, q)];
                }
            }
            cov[(j, j)] = v;
            done.push(j);
        }
        Ok(PopulationMoments { names: self.names.clone(), mean, covariance: cov })
    }

    pub fn population_covariance(&self) -> Result<DMatrix<f64>, ScmError> {
        Ok(self.population_moments()?.covariance)
    }

    /// `Σ_XX⁻¹ Σ_Xy` plus the matching intercept.
    pub fn population_regression<S: AsRef<str>>(&self, target: &str, regressors: &[S]) -> Result<PopulationFit, ScmError> {
        let m = self.population_moments()?;
        let t = self.node_index(target)?;
        let xs = regressors.iter().map(|r| self.node_index(r.as_ref())).collect::<Result<Vec<_>, _>>()?;
        if xs.contains(&t) {
            return Err(ScmError::InvalidQuery(format!("target `{target}` is also a regressor")));
        }
        let p = xs.len();
        let sxx = DMatrix::from_fn(p, p, |a, b| m.covariance[(xs[a], xs[b])]);
        let sxy = DVector::from_fn(p, |a, _| m.covariance[(xs[a], t)]);
        let beta = if p == 0 {
            DVector::zeros(0)
        } else {
            linalg::solve_symmetric(sxx, &sxy, MAX_CONDITION).map_err(|condition| ScmError::SingularCovariance { condition })?
        };
        let intercept = m.mean[t] - xs.iter().zip(beta.iter()).map(|(&i, b)| b * m.mean[i]).sum::<f64>();
        Ok(PopulationFit {
            intercept,
            regressors: regressors.iter().map(|r| r.as_ref().to_string()).collect(),
            coefficients: beta.iter().copied().collect(),
        })
    }

    /// Sum over directed paths `cause -> ... -> outcome` of the product of edge weights.
    pub fn total_effect_linear(&self, cause: &str, outcome: &str) -> Result<f64, ScmError> {
        let c = self.node_index(cause)?;
        let o = self.node_index(outcome)?;
        if c == o {
            return Err(ScmError::InvalidQuery("cause and outcome must differ".into()));
        }
        let k = self.names.len();
        // Outgoing edges with their weights.
        let mut out: Vec<Vec<(usize, f64)>> = vec![Vec::new(); k];
        for j in 0..k {
            let (weights, _, _) = self.linear_parts(j)?;
            for (&p, &w) in self.parent_index[j].iter().zip(weights) {
                out[p].push((j, w));
            }
        }
        fn walk(v: usize, target: usize, out: &[Vec<(usize, f64)>], product: f64) -> f64 {
            if v == target {
                return product;
            }
            out[v].iter().map(|&(c, w)| walk(c, target, out, product * w)).sum()
        }
        Ok(walk(c, o, &out, 1.0))
    }
}

#[cfg(test)]
mod tests {
    use crate::scm::{presets, ModelSpec, NoiseSpec, ScmError, StructuralAssignment};

    #[test]
    fn scaled_exogenous_variance() {
        let m = ModelSpec::new()
            .assign("x2", StructuralAssignment::exogenous(NoiseSpec::standard_normal().scaled(0.8)))
            .assign("x4", StructuralAssignment::exogenous(NoiseSpec::standard_normal()))
            .validate()
            .unwrap();
        let mom = m.population_moments().unwrap();
        assert!((mom.var("x2").unwrap() - 0.64).abs() < 1e-15);
        assert_eq!(mom.cov("x2", "x4").unwrap(), 0.0);
    }

    #[test]
    fn nine_node_moments_by_hand() {
        let mom = presets::mediated_confounding().population_moments().unwrap();
        // Var(x0) = 1 + 4 * 0.64 + 0.04; Cov(x0, y) = 2 Cov(x0, x3) - Cov(x0, x1).
        assert!((mom.var("x0").unwrap() - 3.6).abs() < 1e-12);
        assert!((mom.cov("x0", "y").unwrap() - 4.64).abs() < 1e-12);
    }

    #[test]
    fn naive_and_adjusted_regressions() {
        let m = presets::mediated_confounding();
        let naive = m.population_regression("y", &["x0"]).unwrap();
        assert!((naive.coefficients[0] - 4.64 / 3.6).abs() < 1e-12);
        let adjusted = m.population_regression("y", &["x0", "x3"]).unwrap();
        assert!((adjusted.coefficients[0] - 2.0).abs() < 1e-12);
        assert!((adjusted.coefficients[1] - 2.0).abs() < 1e-12);
        let mediator = m.population_regression("y", &["x0", "x1"]).unwrap();
        // x0 coefficient: 2 Cov(x0, x3) / Var(x0) = -2.56 / 3.6.
        assert!((mediator.coefficients[0] + 2.56 / 3.6).abs() < 1e-12);
        assert!((mediator.coefficients[1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn exogenous_regression_recovers_weights() {
        let m = presets::exogenous_predictors(&[3.3, 0.1, 0.3, 0.5]);
        let fit = m.population_regression("y", &["x1", "x2", "x3"]).unwrap();
        assert!((fit.intercept - 3.3).abs() < 1e-12);
        for (b, t) in fit.coefficients.iter().zip([0.1, 0.3, 0.5]) {
            assert!((b - t).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_regressors_refused() {
        let m = presets::exogenous_predictors(&[3.3, 0.1, 0.3, 0.5]);
        // x0 is the constant column.
        let err = m.population_regression("y", &["x0", "x1"]).unwrap_err();
        assert!(matches!(err, ScmError::SingularCovariance { .. }));
    }

    #[test]
    fn path_products() {
        let m = presets::mediated_confounding();
        assert_eq!(m.total_effect_linear("x0", "y").unwrap(), 2.0);
        assert_eq!(m.total_effect_linear("x6", "y").unwrap(), 0.0);
        assert_eq!(m.total_effect_linear("x2", "y").unwrap(), -2.0);
        assert_eq!(m.total_effect_linear("x4", "x7").unwrap(), 1.0);
        assert!(m.total_effect_linear("x0", "x0").is_err());
        assert!(matches!(m.total_effect_linear("q", "y"), Err(ScmError::UnknownNode(_))));
    }

    #[test]
    fn custom_nodes_have_no_analytic_moments() {
        let m = ModelSpec::new()
            .assign("a", StructuralAssignment::exogenous(NoiseSpec::standard_normal()))
            .assign("b", StructuralAssignment::custom(["a"], |v| v[0] * v[0], NoiseSpec::standard_normal()))
            .validate()
            .unwrap();
        assert_eq!(m.population_moments().unwrap_err(), ScmError::Nonlinear("b".into()));
        let u = ModelSpec::new().assign("a", StructuralAssignment::exogenous(NoiseSpec::uniform(0.0, 1.0))).validate().unwrap();
        assert!(matches!(u.population_covariance(), Err(ScmError::Nonlinear(_))));
    }

    #[test]
    fn intervened_node_has_zero_covariance() {
        let m = presets::mediated_confounding().intervene_constant("x0", 1.5).unwrap();
        let mom = m.population_moments().unwrap();
        for n in mom.names() {
            assert_eq!(mom.cov("x0", n).unwrap(), 0.0);
        }
        assert_eq!(mom.mean_of("x0").unwrap(), 1.5);
    }
}
