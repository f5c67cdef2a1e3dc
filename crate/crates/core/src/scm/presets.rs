//! The two linear models used throughout the misspecification experiments.

use super::{ModelSpec, NoiseSpec, StructuralAssignment, StructuralModel};

/// Exogenous predictors feeding one outcome.
///
/// `x0 := 1`, `x_k := N(0,1)` for `k = 1..K-1`, and
/// `y := Σ θ_k x_k + N(0,1)`, with `θ_0` acting as the intercept through the
/// constant node.
pub fn exogenous_predictors(theta: &[f64]) -> StructuralModel {
    assert!(!theta.is_empty(), "need at least the intercept weight");
    let mut spec = ModelSpec::new().assign("x0", StructuralAssignment::exogenous(NoiseSpec::constant(1.0)));
    for k in 1..theta.len() {
        spec.push(format!("x{k}"), StructuralAssignment::exogenous(NoiseSpec::standard_normal()));
    }
    let parents: Vec<(String, f64)> = theta.iter().enumerate().map(|(k, &t)| (format!("x{k}"), t)).collect();
    spec.push("y", StructuralAssignment::linear(parents, 0.0, NoiseSpec::standard_normal()));
    spec.validate().expect("exogenous model is acyclic")
}

/// Nine-node linear-Gaussian model with a confounded, mediated `x0 -> y` effect.
///
/// ```text
/// x4 := U4            x2 := 0.8 U2        x0 := x4 - 2 x2 + 0.2 U0
/// x1 := -2 x0 + 0.5 U1                    x3 := x2 + 0.1 U3
/// x5 := 3 x0 + 0.8 U5 x6 := x1 + 0.5 U6
/// y  := 2 x3 - x1 + 0.2 Uy                x7 := 0.5 y + 0.1 U7
/// ```
pub fn mediated_confounding() -> StructuralModel {
    let n = NoiseSpec::standard_normal;
    ModelSpec::new()
        .assign("x0", StructuralAssignment::linear([("x4", 1.0), ("x2", -2.0)], 0.0, n().scaled(0.2)))
        .assign("x1", StructuralAssignment::linear([("x0", -2.0)], 0.0, n().scaled(0.5)))
        .assign("x2", StructuralAssignment::exogenous(n().scaled(0.8)))
        .assign("x3", StructuralAssignment::linear([("x2", 1.0)], 0.0, n().scaled(0.1)))
        .assign("x4", StructuralAssignment::exogenous(n()))
        .assign("x5", StructuralAssignment::linear([("x0", 3.0)], 0.0, n().scaled(0.8)))
        .assign("x6", StructuralAssignment::linear([("x1", 1.0)], 0.0, n().scaled(0.5)))
        .assign("x7", StructuralAssignment::linear([("y", 0.5)], 0.0, n().scaled(0.1)))
        .assign("y", StructuralAssignment::linear([("x3", 2.0), ("x1", -1.0)], 0.0, n().scaled(0.2)))
        .validate()
        .expect("nine-node model is acyclic")
}
