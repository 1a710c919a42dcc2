//! Feed-forward networks with layer-normalized ReLU hidden layers.
//!
//! Hidden layer: `h = ReLU(g ⊙ LN(W x + b) + o)` where `LN` subtracts the mean
//! and divides by the (ε-stabilized) standard deviation across the layer.
//! Output layer: `y = W x + b`.
//!
//! Weights are stored row-major with shape `(output_width, input_width)`.
//! Batched inputs are `(batch, width)` matrices.

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::distributions::{Distribution, Uniform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Variance stabilizer inside layer normalization.
pub const LAYERNORM_EPS: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayerKind {
    /// affine → layernorm → ReLU
    Hidden,
    /// affine only
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayerSpec {
    pub input_width: usize,
    pub output_width: usize,
    pub kind: LayerKind,
}

impl LayerSpec {
    pub fn hidden(input_width: usize, output_width: usize) -> Self {
        Self { input_width, output_width, kind: LayerKind::Hidden }
    }

    pub fn linear(input_width: usize, output_width: usize) -> Self {
        Self { input_width, output_width, kind: LayerKind::Linear }
    }
}

/// Builds `input → hidden[0] → … → output` with normalized hidden layers and a
/// linear output layer.
pub fn mlp_spec(input: usize, hidden: &[usize], output: usize) -> Vec<LayerSpec> {
    let mut spec = Vec::with_capacity(hidden.len() + 1);
    let mut prev = input;
    for &h in hidden {
        spec.push(LayerSpec::hidden(prev, h));
        prev = h;
    }
    spec.push(LayerSpec::linear(prev, output));
    spec
}

pub fn validate_spec(spec: &[LayerSpec]) -> Result<()> {
    if spec.is_empty() {
        return Err(Error::config("network needs at least one layer"));
    }
    for (i, layer) in spec.iter().enumerate() {
        if layer.input_width == 0 || layer.output_width == 0 {
            return Err(Error::config(format!("layer {i} has a zero width")));
        }
        if i > 0 && spec[i - 1].output_width != layer.input_width {
            return Err(Error::config(format!(
                "layer {} outputs {} values but layer {i} expects {}",
                i - 1,
                spec[i - 1].output_width,
                layer.input_width
            )));
        }
    }
    Ok(())
}

/// Parameters of one layer. `gain`/`offset` are empty for linear layers.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub kind: LayerKind,
    pub weight: Array2<f64>,
    pub bias: Array1<f64>,
    pub gain: Array1<f64>,
    pub offset: Array1<f64>,
}

impl Layer {
    fn zeros(spec: LayerSpec) -> Self {
        let norm = match spec.kind {
            LayerKind::Hidden => spec.output_width,
            LayerKind::Linear => 0,
        };
        Self {
            kind: spec.kind,
            weight: Array2::zeros((spec.output_width, spec.input_width)),
            bias: Array1::zeros(spec.output_width),
            gain: Array1::zeros(norm),
            offset: Array1::zeros(norm),
        }
    }

    pub fn spec(&self) -> LayerSpec {
        LayerSpec {
            input_width: self.weight.ncols(),
            output_width: self.weight.nrows(),
            kind: self.kind,
        }
    }
}

/// All weights, biases and normalization gains/offsets of one MLP.
///
/// The same type carries gradients, which mirror the parameter shapes.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParams {
    pub layers: Vec<Layer>,
}

pub type ParamGrads = NetworkParams;

impl NetworkParams {
    /// All-zero parameters (and zero normalization gains) for `spec`.
    pub fn zeros(spec: &[LayerSpec]) -> Result<Self> {
        validate_spec(spec)?;
        Ok(Self { layers: spec.iter().map(|&s| Layer::zeros(s)).collect() })
    }

    pub fn zeros_like(&self) -> Self {
        Self { layers: self.layers.iter().map(|l| Layer::zeros(l.spec())).collect() }
    }

    pub fn spec(&self) -> Vec<LayerSpec> {
        self.layers.iter().map(Layer::spec).collect()
    }

    pub fn input_width(&self) -> usize {
        self.layers[0].weight.ncols()
    }

    pub fn output_width(&self) -> usize {
        self.layers[self.layers.len() - 1].weight.nrows()
    }

    pub fn num_params(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    /// Flat views of every parameter tensor in a fixed order
    /// (per layer: weight, bias, gain, offset).
    pub fn tensors(&self) -> Vec<&[f64]> {
        let mut out = Vec::with_capacity(self.layers.len() * 4);
        for l in &self.layers {
            out.push(l.weight.as_slice().expect("standard layout"));
            out.push(l.bias.as_slice().expect("standard layout"));
            out.push(l.gain.as_slice().expect("standard layout"));
            out.push(l.offset.as_slice().expect("standard layout"));
        }
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out = Vec::with_capacity(self.layers.len() * 4);
        for l in &mut self.layers {
            out.push(l.weight.as_slice_mut().expect("standard layout"));
            out.push(l.bias.as_slice_mut().expect("standard layout"));
            out.push(l.gain.as_slice_mut().expect("standard layout"));
            out.push(l.offset.as_slice_mut().expect("standard layout"));
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.iter().all(|v| v.is_finite()))
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.spec() == other.spec()
    }

    fn check_same_shape(&self, other: &Self, what: &str) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::shape(format!("{what}: parameter shapes differ")))
        }
    }

    /// `self ← (1 − τ)·online + τ·self`.
    pub fn blend_towards(&mut self, online: &Self, tau: f64) -> Result<()> {
        self.check_same_shape(online, "soft update")?;
        for (t, o) in self.tensors_mut().into_iter().zip(online.tensors()) {
            for (t, &o) in t.iter_mut().zip(o) {
                *t = (1.0 - tau) * o + tau * *t;
            }
        }
        Ok(())
    }

    /// `self ← self + scale·other`.
    pub fn add_scaled(&mut self, other: &Self, scale: f64) -> Result<()> {
        self.check_same_shape(other, "add_scaled")?;
        for (t, o) in self.tensors_mut().into_iter().zip(other.tensors()) {
            for (t, &o) in t.iter_mut().zip(o) {
                *t += scale * o;
            }
        }
        Ok(())
    }

    pub fn scale(&mut self, factor: f64) {
        for t in self.tensors_mut() {
            t.iter_mut().for_each(|v| *v *= factor);
        }
    }

    /// Euclidean distance between two parameter sets of equal shape.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        self.check_same_shape(other, "distance")?;
        let mut acc = 0.0;
        for (a, b) in self.tensors().into_iter().zip(other.tensors()) {
            acc += a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>();
        }
        Ok(acc.sqrt())
    }

    pub fn max_abs(&self) -> f64 {
        self.tensors()
            .iter()
            .flat_map(|t| t.iter())
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Xavier-uniform weights on `±√(6/(fan_in+fan_out))`, zero biases, unit
/// normalization gains and zero offsets. Deterministic in `seed`.
pub fn xavier_init(spec: &[LayerSpec], seed: u64) -> Result<NetworkParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    xavier_init_with_rng(spec, &mut rng)
}

pub fn xavier_init_with_rng<R: Rng + ?Sized>(
    spec: &[LayerSpec],
    rng: &mut R,
) -> Result<NetworkParams> {
    let mut params = NetworkParams::zeros(spec)?;
    for layer in &mut params.layers {
        let (fan_out, fan_in) = layer.weight.dim();
        let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
        let dist = Uniform::new_inclusive(-limit, limit);
        layer.weight.iter_mut().for_each(|w| *w = dist.sample(rng));
        layer.gain.fill(1.0);
    }
    Ok(params)
}

#[derive(Debug, Clone)]
struct LayerTape {
    input: Array2<f64>,
    /// Normalized pre-activations, before gain/offset (hidden only).
    normalized: Array2<f64>,
    inv_std: Array1<f64>,
    /// `g ⊙ x̂ + o`, the ReLU argument (hidden only).
    activation_input: Array2<f64>,
}

/// Forward values recorded for [`backward`].
#[derive(Debug, Clone)]
pub struct GradientTape {
    layers: Vec<LayerTape>,
}

impl GradientTape {
    pub fn batch_size(&self) -> usize {
        self.layers[0].input.nrows()
    }

    /// Normalized pre-activations (before gain/offset) of hidden layer `index`.
    pub fn normalized(&self, index: usize) -> Option<ArrayView2<'_, f64>> {
        self.layers
            .get(index)
            .filter(|l| l.normalized.ncols() > 0)
            .map(|l| l.normalized.view())
    }
}

fn check_input(params: &NetworkParams, input: &ArrayView2<f64>) -> Result<()> {
    if input.ncols() != params.input_width() {
        return Err(Error::shape(format!(
            "network expects {} inputs, got {}",
            params.input_width(),
            input.ncols()
        )));
    }
    if input.iter().any(|v| !v.is_finite()) {
        return Err(Error::numeric("non-finite network input"));
    }
    Ok(())
}

fn affine(layer: &Layer, x: &ArrayView2<f64>) -> Array2<f64> {
    let mut z = x.dot(&layer.weight.t());
    z += &layer.bias;
    z
}

/// Row-wise layer normalization; returns (x̂, 1/σ).
fn normalize_rows(z: &Array2<f64>) -> (Array2<f64>, Array1<f64>) {
    let (rows, width) = z.dim();
    let z = z.as_standard_layout();
    let src = z.as_slice().expect("standard layout");
    let mut normalized = Vec::with_capacity(rows * width);
    let mut inv_std = Vec::with_capacity(rows);
    let w = width as f64;
    for row in src.chunks_exact(width) {
        let mean = row.iter().sum::<f64>() / w;
        let var = row.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / w;
        let k = 1.0 / (var + LAYERNORM_EPS).sqrt();
        inv_std.push(k);
        normalized.extend(row.iter().map(|v| (v - mean) * k));
    }
    (
        Array2::from_shape_vec((rows, width), normalized).expect("shape"),
        Array1::from(inv_std),
    )
}

/// Applies gain/offset and ReLU; returns (pre-ReLU, post-ReLU).
fn hidden_output(layer: &Layer, normalized: &Array2<f64>) -> (Array2<f64>, Array2<f64>) {
    let (rows, width) = normalized.dim();
    let src = normalized.as_slice().expect("standard layout");
    let gain = layer.gain.as_slice().expect("standard layout");
    let offset = layer.offset.as_slice().expect("standard layout");
    let mut y = Vec::with_capacity(rows * width);
    for xr in src.chunks_exact(width) {
        y.extend(xr.iter().zip(gain).zip(offset).map(|((x, g), o)| x * g + o));
    }
    let h: Vec<f64> = y.iter().map(|v| v.max(0.0)).collect();
    (
        Array2::from_shape_vec((rows, width), y).expect("shape"),
        Array2::from_shape_vec((rows, width), h).expect("shape"),
    )
}

/// Batched forward pass recording a tape for [`backward`].
pub fn forward_batch(
    params: &NetworkParams,
    input: ArrayView2<f64>,
) -> Result<(Array2<f64>, GradientTape)> {
    check_input(params, &input)?;
    let mut tapes = Vec::with_capacity(params.layers.len());
    let mut x = input.to_owned();
    for layer in &params.layers {
        let z = affine(layer, &x.view());
        match layer.kind {
            LayerKind::Hidden => {
                let (normalized, inv_std) = normalize_rows(&z);
                let (y, h) = hidden_output(layer, &normalized);
                tapes.push(LayerTape { input: x, normalized, inv_std, activation_input: y });
                x = h;
            }
            LayerKind::Linear => {
                tapes.push(LayerTape {
                    input: x,
                    normalized: Array2::zeros((0, 0)),
                    inv_std: Array1::zeros(0),
                    activation_input: Array2::zeros((0, 0)),
                });
                x = z;
            }
        }
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::numeric("non-finite network output"));
    }
    Ok((x, GradientTape { layers: tapes }))
}

/// Single-sample forward pass.
pub fn forward(params: &NetworkParams, input: &[f64]) -> Result<(Vec<f64>, GradientTape)> {
    let view = ArrayView2::from_shape((1, input.len()), input).expect("row vector");
    let (out, tape) = forward_batch(params, view)?;
    Ok((out.into_raw_vec_and_offset().0, tape))
}

/// Batched forward pass without recording a tape.
pub fn predict_batch(params: &NetworkParams, input: ArrayView2<f64>) -> Result<Array2<f64>> {
    check_input(params, &input)?;
    let mut x = input.to_owned();
    for layer in &params.layers {
        let z = affine(layer, &x.view());
        x = match layer.kind {
            LayerKind::Hidden => {
                let (normalized, _) = normalize_rows(&z);
                hidden_output(layer, &normalized).1
            }
            LayerKind::Linear => z,
        };
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::numeric("non-finite network output"));
    }
    Ok(x)
}

pub fn predict(params: &NetworkParams, input: &[f64]) -> Result<Vec<f64>> {
    let view = ArrayView2::from_shape((1, input.len()), input).expect("row vector");
    Ok(predict_batch(params, view)?.into_raw_vec_and_offset().0)
}

/// Reverse-mode gradients of `Σ output_grad ⊙ output` w.r.t. the parameters
/// and the network input, summed over the batch.
pub fn backward(
    params: &NetworkParams,
    tape: &GradientTape,
    output_grad: ArrayView2<f64>,
) -> Result<(ParamGrads, Array2<f64>)> {
    if tape.layers.len() != params.layers.len() {
        return Err(Error::shape("tape does not match network depth"));
    }
    let batch = tape.batch_size();
    if output_grad.dim() != (batch, params.output_width()) {
        return Err(Error::shape(format!(
            "output gradient has shape {:?}, expected ({batch}, {})",
            output_grad.dim(),
            params.output_width()
        )));
    }
    let mut grads = params.zeros_like();
    let mut delta = output_grad.to_owned();
    for (i, (layer, lt)) in params.layers.iter().zip(&tape.layers).enumerate().rev() {
        if lt.input.ncols() != layer.weight.ncols() {
            return Err(Error::shape(format!("tape layer {i} does not match parameters")));
        }
        let g = &mut grads.layers[i];
        let dz = match layer.kind {
            LayerKind::Linear => delta,
            LayerKind::Hidden => {
                let width = layer.gain.len();
                let gain = layer.gain.as_slice().expect("standard layout");
                let delta = delta.as_standard_layout();
                let d = delta.as_slice().expect("standard layout");
                let y = lt.activation_input.as_slice().expect("standard layout");
                let xh = lt.normalized.as_slice().expect("standard layout");
                let mut dgain = vec![0.0; width];
                let mut doffset = vec![0.0; width];
                let mut dz = Vec::with_capacity(d.len());
                let w = width as f64;
                let rows = d.chunks_exact(width).zip(y.chunks_exact(width)).zip(xh.chunks_exact(width));
                for (((dr, yr), xr), &k) in rows.zip(lt.inv_std.iter()) {
                    let start = dz.len();
                    let mut sum_d = 0.0;
                    let mut sum_dx = 0.0;
                    for j in 0..width {
                        // through ReLU
                        let dv = if yr[j] > 0.0 { dr[j] } else { 0.0 };
                        dgain[j] += dv * xr[j];
                        doffset[j] += dv;
                        let dxhat = dv * gain[j];
                        dz.push(dxhat);
                        sum_d += dxhat;
                        sum_dx += dxhat * xr[j];
                    }
                    // dz = (1/σ)(dx̂ − mean(dx̂) − x̂·mean(dx̂ ⊙ x̂))
                    let (mean_d, mean_dx) = (sum_d / w, sum_dx / w);
                    for (o, x) in dz[start..].iter_mut().zip(xr) {
                        *o = k * (*o - mean_d - x * mean_dx);
                    }
                }
                g.gain = Array1::from(dgain);
                g.offset = Array1::from(doffset);
                Array2::from_shape_vec(delta.raw_dim(), dz).expect("shape")
            }
        };
        g.weight = dz.t().dot(&lt.input).as_standard_layout().into_owned();
        g.bias = dz.sum_axis(Axis(0));
        delta = dz.dot(&layer.weight);
    }
    Ok((grads, delta))
}

/// Convenience for single-sample gradients.
pub fn backward_single(
    params: &NetworkParams,
    tape: &GradientTape,
    output_grad: &[f64],
) -> Result<(ParamGrads, Vec<f64>)> {
    let view = ArrayView2::from_shape((1, output_grad.len()), output_grad)
        .map_err(|e| Error::shape(e.to_string()))?;
    let (g, dx) = backward(params, tape, view)?;
    Ok((g, dx.into_raw_vec_and_offset().0))
}
