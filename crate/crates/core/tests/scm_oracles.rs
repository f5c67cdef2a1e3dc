//! Sampling checked against the closed-form moments, graph surgery, and
//! path-product total effects.

mod common;

use causalsim::scm::{presets, StructuralModel};
use causalsim::Dataset;
use common::random_linear_model;

/// Element-wise comparison of the sample covariance with the population
/// covariance, in units of the Monte-Carlo standard error of each entry.
fn worst_z(model: &StructuralModel, data: &Dataset) -> f64 {
    let moments = model.population_moments().unwrap();
    let names = model.nodes();
    let n = data.n_rows() as f64;
    let centered: Vec<Vec<f64>> = names
        .iter()
        .map(|a| {
            let c = data.column(a).unwrap();
            let m = c.iter().sum::<f64>() / n;
            c.iter().map(|v| v - m).collect()
        })
        .collect();
    let mut worst: f64 = 0.0;
    for i in 0..names.len() {
        for j in i..names.len() {
            let prods: Vec<f64> = centered[i].iter().zip(&centered[j]).map(|(a, b)| a * b).collect();
            let cov = prods.iter().sum::<f64>() / n;
            let var = prods.iter().map(|p| (p - cov).powi(2)).sum::<f64>() / n;
            let se = (var / n).sqrt();
            let truth = moments.cov(&names[i], &names[j]).unwrap();
            if se == 0.0 {
                assert!((cov - truth).abs() < 1e-12);
                continue;
            }
            worst = worst.max((cov - truth).abs() / se);
        }
    }
    worst
}

#[test]
fn million_row_covariance_matches_population() {
    let mut models = vec![presets::mediated_confounding()];
    models.extend((0..3).map(|s| random_linear_model(6 + 2 * s as usize, 0.4, 1000 + s)));
    for (k, m) in models.iter().enumerate() {
        let data = m.sample(1_000_000, 77 + k as u64).unwrap();
        let z = worst_z(m, &data);
        assert!(z < 5.0, "model {k}: worst deviation {z:.2} standard errors");
    }
}

#[test]
fn nine_node_hand_values() {
    let m = presets::mediated_confounding();
    let mom = m.population_moments().unwrap();
    assert!((mom.var("x0").unwrap() - 3.6).abs() < 1e-12);
    assert!((mom.cov("x0", "y").unwrap() - 4.64).abs() < 1e-12);
    assert!((mom.var("x2").unwrap() - 0.64).abs() < 1e-12);
    assert_eq!(mom.cov("x2", "x4").unwrap(), 0.0);
}

#[test]
fn surgery_makes_node_constant_and_uncorrelated() {
    let base = presets::mediated_confounding();
    for node in ["x0", "x3", "x4", "y"] {
        let m = base.intervene_constant(node, 1.5).unwrap();
        let data = m.sample(500, 3).unwrap();
        assert!(data.column(node).unwrap().iter().all(|&v| v == 1.5));
        let mom = m.population_moments().unwrap();
        assert_eq!(mom.mean_of(node).unwrap(), 1.5);
        for other in m.nodes() {
            assert_eq!(mom.cov(node, other).unwrap(), 0.0, "{node} vs {other}");
        }
        assert!(m.edges().iter().all(|(_, c)| c != node));
    }
}

#[test]
fn two_point_interventions_recover_total_effects() {
    let mut cases: Vec<(StructuralModel, String, String)> = Vec::new();
    let nine = presets::mediated_confounding();
    for (c, o) in [("x0", "y"), ("x2", "y"), ("x4", "x7"), ("x6", "y"), ("x2", "x5")] {
        cases.push((nine.clone(), c.into(), o.into()));
    }
    for s in 0..5u64 {
        let m = random_linear_model(7, 0.5, 50 + s);
        cases.push((m.clone(), "v1".into(), "v6".into()));
        cases.push((m, "v0".into(), "v4".into()));
    }
    for (m, cause, outcome) in &cases {
        let effect = m.total_effect_linear(cause, outcome).unwrap();
        let n = 20_000;
        let mean = |t: f64, seed: u64| {
            let d = m.intervene_constant(cause, t).unwrap().sample(n, seed).unwrap();
            d.column(outcome).unwrap().iter().sum::<f64>() / n as f64
        };
        // Common random numbers: the noise of every other node is shared, so
        // the difference is exact for a linear model.
        let crn = mean(1.0, 9) - mean(0.0, 9);
        assert!((crn - effect).abs() < 1e-9, "{cause}->{outcome}: {crn} vs {effect}");
        // Independent draws: agreement within sampling error.
        let indep = mean(1.0, 10) - mean(0.0, 11);
        let sd = m.intervene_constant(cause, 0.0).unwrap().population_moments().unwrap().var(outcome).unwrap().sqrt();
        let se = sd * (2.0 / n as f64).sqrt();
        assert!((indep - effect).abs() < 5.0 * se + 1e-12, "{cause}->{outcome}: {indep} vs {effect}");
    }
}

#[test]
fn path_products_on_nine_node_model() {
    let m = presets::mediated_confounding();
    assert!((m.total_effect_linear("x0", "y").unwrap() - 2.0).abs() < 1e-12);
    assert!((m.total_effect_linear("x2", "y").unwrap() + 2.0).abs() < 1e-12);
    assert!((m.total_effect_linear("x4", "x7").unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(m.total_effect_linear("x6", "y").unwrap(), 0.0);
}

#[test]
fn sampling_is_deterministic() {
    let m = random_linear_model(8, 0.4, 5);
    let mut a = Vec::new();
    let mut b = Vec::new();
    m.sample(1000, 42).unwrap().write_csv(&mut a).unwrap();
    m.sample(1000, 42).unwrap().write_csv(&mut b).unwrap();
    assert_eq!(a, b);
    let mut c = Vec::new();
    m.sample(1000, 43).unwrap().write_csv(&mut c).unwrap();
    assert_ne!(a, c);
}

#[test]
fn zero_noise_sample_equals_population_mean() {
    use causalsim::scm::{ModelSpec, NoiseSpec, StructuralAssignment};
    let m = ModelSpec::new()
        .assign("a", StructuralAssignment::exogenous(NoiseSpec::constant(2.0)))
        .assign("b", StructuralAssignment::linear([("a", -1.5)], 0.5, NoiseSpec::constant(0.0)))
        .assign("c", StructuralAssignment::linear([("a", 1.0), ("b", 2.0)], 0.0, NoiseSpec::constant(1.0)))
        .validate()
        .unwrap();
    let d = m.sample(10, 1).unwrap();
    let mom = m.population_moments().unwrap();
    for node in ["a", "b", "c"] {
        let expect = mom.mean_of(node).unwrap();
        assert!(d.column(node).unwrap().iter().all(|&v| (v - expect).abs() < 1e-12));
    }
    assert!((mom.mean_of("c").unwrap() - (2.0 + 2.0 * -2.5 + 1.0)).abs() < 1e-12);
}
