//! Random linear-Gaussian models shared by the integration tests.

use causalsim::rng;
use causalsim::scm::{ModelSpec, NoiseSpec, StructuralAssignment, StructuralModel};
use rand::Rng;

/// Random DAG over `v0 … v{p-1}` (edges only from lower to higher index),
/// each edge present with probability `density`, weights with magnitude in
/// [0.5, 1.5] and random sign, noise sd in [0.5, 1.5], intercepts in [-1, 1].
pub fn random_linear_model(p: usize, density: f64, seed: u64) -> StructuralModel {
    let mut r = rng::sequential(seed);
    let mut spec = ModelSpec::new();
    // Declare in reverse so declaration order differs from topological order.
    let mut nodes = Vec::new();
    for j in 0..p {
        let mut parents: Vec<(String, f64)> = Vec::new();
        for i in 0..j {
            if r.random::<f64>() < density {
                let mag = r.random_range(0.5..1.5);
                parents.push((format!("v{i}"), if r.random::<bool>() { mag } else { -mag }));
            }
        }
        let noise = NoiseSpec::gaussian(0.0, r.random_range(0.5..1.5));
        let intercept = r.random_range(-1.0..1.0);
        nodes.push((format!("v{j}"), StructuralAssignment::linear(parents, intercept, noise)));
    }
    for (name, a) in nodes.into_iter().rev() {
        spec.push(name, a);
    }
    spec.validate().expect("lower-triangular graphs are acyclic")
}
