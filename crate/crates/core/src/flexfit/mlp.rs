//! Fully connected network trained by full-batch gradient descent.
//!
//! JSON schema: `{ features, target, activation, output, layers: [{ n_in,
//! n_out, weights, biases }] }` where `weights` is the `n_out × n_in` matrix
//! in row-major order.

use super::{check_binary, feature_matrix, target_column, FlexError};
use crate::{rng, Dataset};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Tanh,
    Relu,
}

/// Output transform: identity (squared loss) or logistic (log loss).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputKind {
    Identity,
    Logistic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MlpConfig {
    pub hidden: Vec<usize>,
    pub activation: Activation,
    pub output: OutputKind,
    pub learning_rate: f64,
    pub epochs: usize,
    /// Heavy-ball momentum coefficient; 0 gives plain gradient descent.
    pub momentum: f64,
    pub seed: u64,
}

impl Default for MlpConfig {
    fn default() -> Self {
        Self {
            hidden: vec![32],
            activation: Activation::Tanh,
            output: OutputKind::Identity,
            learning_rate: 0.01,
            epochs: 20_000,
            momentum: 0.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub n_in: usize,
    pub n_out: usize,
    /// Row-major `n_out × n_in`.
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    pub features: Vec<String>,
    pub target: String,
    pub activation: Activation,
    pub output: OutputKind,
    pub layers: Vec<Layer>,
    /// Training loss before each update plus the final loss; not serialized.
    #[serde(skip)]
    pub loss_trace: Vec<f64>,
}

fn sigmoid(x: f64) -> f64 {
    crate::estimators::sigmoid(x)
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Tanh => z.tanh(),
            Activation::Relu => z.max(0.0),
        }
    }

    /// Derivative expressed through the pre-activation and activation.
    fn derivative(self, z: f64, a: f64) -> f64 {
        match self {
            Activation::Tanh => 1.0 - a * a,
            Activation::Relu => f64::from(z > 0.0),
        }
    }
}

impl MlpModel {
    /// Network with the given shape and all parameters zero.
    pub fn zeros(features: Vec<String>, target: impl Into<String>, hidden: &[usize], activation: Activation, output: OutputKind) -> Self {
        let mut sizes = vec![features.len()];
        sizes.extend_from_slice(hidden);
        sizes.push(1);
        let layers =
            sizes.windows(2).map(|w| Layer { n_in: w[0], n_out: w[1], weights: vec![0.0; w[0] * w[1]], biases: vec![0.0; w[1]] }).collect();
        Self { features, target: target.into(), activation, output, layers, loss_trace: Vec::new() }
    }

    /// Pre-link output for one row of feature values.
    pub fn margin_row(&self, row: &[f64]) -> f64 {
        let mut a = row.to_vec();
        let last = self.layers.len() - 1;
        for (l, layer) in self.layers.iter().enumerate() {
            let mut next = layer.biases.clone();
            for (o, out) in next.iter_mut().enumerate() {
                let w = &layer.weights[o * layer.n_in..(o + 1) * layer.n_in];
                *out += w.iter().zip(&a).map(|(w, x)| w * x).sum::<f64>();
                if l < last {
                    *out = self.activation.apply(*out);
                }
            }
            a = next;
        }
        a[0]
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let m = self.margin_row(row);
        match self.output {
            OutputKind::Identity => m,
            OutputKind::Logistic => sigmoid(m),
        }
    }

    /// All weights and biases, layer by layer, weights before biases.
    pub fn params(&self) -> Vec<f64> {
        self.layers.iter().flat_map(|l| l.weights.iter().chain(&l.biases).copied()).collect()
    }

    pub fn set_params(&mut self, params: &[f64]) {
        let mut it = params.iter().copied();
        for l in &mut self.layers {
            for w in l.weights.iter_mut().chain(l.biases.iter_mut()) {
                *w = it.next().expect("parameter vector too short");
            }
        }
        assert!(it.next().is_none(), "parameter vector too long");
    }

    /// Training loss and its gradient with respect to [`MlpModel::params`],
    /// for a row-major feature matrix `x` (`n × d`) and targets `y`.
    pub fn loss_and_gradient(&self, x: &[f64], y: &[f64]) -> (f64, Vec<f64>) {
        let net = Net::from_model(self);
        let xm = DMatrix::from_row_slice(y.len(), self.features.len(), x);
        let (loss, grads) = net.loss_and_gradient(&xm, &DVector::from_column_slice(y), self.activation, self.output);
        (loss, grads.flatten())
    }
}

/// Dense working copy used for batch training.
#[derive(Clone)]
struct Net {
    w: Vec<DMatrix<f64>>,
    b: Vec<DVector<f64>>,
}

impl Net {
    fn from_model(m: &MlpModel) -> Self {
        Net {
            w: m.layers.iter().map(|l| DMatrix::from_row_slice(l.n_out, l.n_in, &l.weights)).collect(),
            b: m.layers.iter().map(|l| DVector::from_column_slice(&l.biases)).collect(),
        }
    }

    fn write_back(&self, m: &mut MlpModel) {
        for (l, layer) in m.layers.iter_mut().enumerate() {
            let w = &self.w[l];
            layer.weights = (0..w.nrows()).flat_map(|r| w.row(r).iter().copied().collect::<Vec<_>>()).collect();
            layer.biases = self.b[l].iter().copied().collect();
        }
    }

    fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for (w, b) in self.w.iter().zip(&self.b) {
            for r in 0..w.nrows() {
                out.extend(w.row(r).iter());
            }
            out.extend(b.iter());
        }
        out
    }

    fn axpy(&mut self, alpha: f64, other: &Net) {
        for (w, g) in self.w.iter_mut().zip(&other.w) {
            *w += g * alpha;
        }
        for (b, g) in self.b.iter_mut().zip(&other.b) {
            *b += g * alpha;
        }
    }

    fn scale(&mut self, s: f64) {
        self.w.iter_mut().for_each(|w| *w *= s);
        self.b.iter_mut().for_each(|b| *b *= s);
    }

    fn loss_and_gradient(&self, x: &DMatrix<f64>, y: &DVector<f64>, act: Activation, output: OutputKind) -> (f64, Net) {
        let n = x.nrows() as f64;
        let depth = self.w.len();
        // Forward pass, keeping pre-activations and activations.
        let mut zs: Vec<DMatrix<f64>> = Vec::with_capacity(depth);
        let mut acts: Vec<DMatrix<f64>> = Vec::with_capacity(depth);
        for l in 0..depth {
            let input = if l == 0 { x } else { &acts[l - 1] };
            let mut z = input * self.w[l].transpose();
            for mut row in z.row_iter_mut() {
                row += self.b[l].transpose();
            }
            let a = if l + 1 < depth { z.map(|v| act.apply(v)) } else { z.clone() };
            zs.push(z);
            acts.push(a);
        }
        let margin = acts[depth - 1].column(0);
        let (loss, mut delta) = match output {
            OutputKind::Identity => {
                let r = margin - y;
                (r.norm_squared() / n, DMatrix::from_column_slice(r.len(), 1, (r * (2.0 / n)).as_slice()))
            }
            OutputKind::Logistic => {
                let loss = margin.iter().zip(y.iter()).map(|(&m, &t)| crate::estimators::softplus(m) - t * m).sum::<f64>() / n;
                let d: Vec<f64> = margin.iter().zip(y.iter()).map(|(&m, &t)| (sigmoid(m) - t) / n).collect();
                (loss, DMatrix::from_column_slice(d.len(), 1, &d))
            }
        };
        // Backward pass.
        let mut gw = vec![DMatrix::zeros(0, 0); depth];
        let mut gb = vec![DVector::zeros(0); depth];
        for l in (0..depth).rev() {
            let input = if l == 0 { x } else { &acts[l - 1] };
            gw[l] = delta.transpose() * input;
            gb[l] = delta.row_sum().transpose();
            if l > 0 {
                let mut prev = &delta * &self.w[l];
                prev.zip_zip_apply(&zs[l - 1], &acts[l - 1], |d, z, a| *d *= act.derivative(z, a));
                delta = prev;
            }
        }
        (loss, Net { w: gw, b: gb })
    }
}

/// Train on `features → target` by full-batch gradient descent on mean
/// squared error (identity output) or mean log loss (logistic output).
/// Weights start at `N(0, 1/fan_in)` drawn from a stream keyed by the seed;
/// biases start at zero.
pub fn mlp_train<S: AsRef<str>>(train: &Dataset, target: &str, features: &[S], config: &MlpConfig) -> Result<MlpModel, FlexError> {
    if config.hidden.is_empty() || config.hidden.contains(&0) {
        return Err(FlexError::InvalidConfig("need at least one non-empty hidden layer".into()));
    }
    if features.is_empty() {
        return Err(FlexError::InvalidConfig("no features".into()));
    }
    if !(config.learning_rate > 0.0) || !(0.0..1.0).contains(&config.momentum) {
        return Err(FlexError::InvalidConfig("learning_rate must be > 0 and momentum in [0, 1)".into()));
    }
    let n = train.n_rows();
    if n == 0 {
        return Err(FlexError::InsufficientData { needed: 1, got: 0 });
    }
    let x = feature_matrix(train, features)?;
    let y = target_column(train, target)?;
    if config.output == OutputKind::Logistic {
        check_binary(y, target)?;
    }

    let names: Vec<String> = features.iter().map(|f| f.as_ref().to_string()).collect();
    let mut model = MlpModel::zeros(names, target, &config.hidden, config.activation, config.output);
    let mut init = rng::sequential(rng::derive_seed(config.seed, rng::label("mlp-init")));
    for layer in &mut model.layers {
        let sd = (1.0 / layer.n_in as f64).sqrt();
        layer.weights.iter_mut().for_each(|w| *w = sd * rng::normal_from(&mut init));
    }

    let xm = DMatrix::from_row_slice(n, features.len(), &x);
    let ym = DVector::from_column_slice(y);
    let mut net = Net::from_model(&model);
    let mut velocity: Option<Net> = None;
    let mut trace = Vec::with_capacity(config.epochs + 1);
    let mut initial = f64::NAN;
    for epoch in 0..config.epochs {
        let (loss, grad) = net.loss_and_gradient(&xm, &ym, config.activation, config.output);
        if epoch == 0 {
            initial = loss;
        }
        if !loss.is_finite() || loss > 1e6 * initial {
            return Err(FlexError::Divergence { epoch, loss, initial });
        }
        trace.push(loss);
        if config.momentum > 0.0 {
            let v = velocity.get_or_insert_with(|| {
                let mut z = grad.clone();
                z.scale(0.0);
                z
            });
            v.scale(config.momentum);
            v.axpy(-config.learning_rate, &grad);
            net.axpy(1.0, v);
        } else {
            net.axpy(-config.learning_rate, &grad);
        }
    }
    let (final_loss, _) = net.loss_and_gradient(&xm, &ym, config.activation, config.output);
    if !final_loss.is_finite() || (initial.is_finite() && final_loss > 1e6 * initial) {
        return Err(FlexError::Divergence { epoch: config.epochs, loss: final_loss, initial });
    }
    trace.push(final_loss);
    net.write_back(&mut model);
    model.loss_trace = trace;
    Ok(model)
}
