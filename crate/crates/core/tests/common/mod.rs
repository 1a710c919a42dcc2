//! Independent scalar reference implementations used as test oracles.
#![allow(dead_code)]

pub mod checks;
pub mod sac_oracle;

use sacflight::nn::{LayerKind, NetworkParams, LAYERNORM_EPS};

/// Plain-loop forward pass: affine, then (hidden layers) layer normalization
/// with gain/offset and ReLU.
pub fn mlp_forward(p: &NetworkParams, x: &[f64]) -> Vec<f64> {
    let mut v = x.to_vec();
    for layer in &p.layers {
        let (rows, cols) = layer.weight.dim();
        let mut z = vec![0.0; rows];
        for i in 0..rows {
            let mut acc = layer.bias[i];
            for j in 0..cols {
                acc += layer.weight[[i, j]] * v[j];
            }
            z[i] = acc;
        }
        v = match layer.kind {
            LayerKind::Linear => z,
            LayerKind::Hidden => {
                let n = rows as f64;
                let mean = z.iter().sum::<f64>() / n;
                let var = z.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / n;
                let sd = (var + LAYERNORM_EPS).sqrt();
                (0..rows).map(|i| (layer.gain[i] * (z[i] - mean) / sd + layer.offset[i]).max(0.0)).collect()
            }
        };
    }
    v
}

pub const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// log π(a|s) of the tanh-squashed Gaussian, written out directly.
pub fn squashed_log_prob(mean: f64, log_std: f64, xi: f64) -> (f64, f64) {
    let u = mean + log_std.exp() * xi;
    let a = u.tanh();
    let lp = -0.5 * xi * xi - log_std - 0.5 * LN_2PI - (1.0 - a * a).ln();
    (a, lp)
}

/// Policy sample for one state: `(actions, total log-density)`.
pub fn policy_sample(policy: &NetworkParams, s: &[f64], xi: &[f64], log_std_bounds: (f64, f64)) -> (Vec<f64>, f64) {
    let out = mlp_forward(policy, s);
    let m = xi.len();
    let mut actions = Vec::with_capacity(m);
    let mut total = 0.0;
    for j in 0..m {
        let ls = out[m + j].clamp(log_std_bounds.0, log_std_bounds.1);
        let (a, lp) = squashed_log_prob(out[j], ls, xi[j]);
        actions.push(a);
        total += lp;
    }
    (actions, total)
}

pub fn q_forward(q: &NetworkParams, s: &[f64], a: &[f64]) -> f64 {
    let input: Vec<f64> = s.iter().chain(a).copied().collect();
    mlp_forward(q, &input)[0]
}

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sacflight::nn::{backward, forward_batch, mlp_spec, xavier_init_with_rng};

/// Random network with non-trivial normalization gains and offsets.
pub fn random_network<R: Rng>(rng: &mut R) -> NetworkParams {
    let input = rng.gen_range(1..=5);
    let depth = rng.gen_range(1..=3);
    let hidden: Vec<usize> = (0..depth).map(|_| rng.gen_range(2..=6)).collect();
    let output = rng.gen_range(1..=3);
    perturbed_network(input, &hidden, output, rng)
}

/// Xavier network of the given shape with randomized biases, gains, offsets.
pub fn perturbed_network<R: Rng>(input: usize, hidden: &[usize], output: usize, rng: &mut R) -> NetworkParams {
    let mut p = xavier_init_with_rng(&mlp_spec(input, hidden, output), rng).unwrap();
    for layer in &mut p.layers {
        for g in layer.gain.iter_mut() {
            *g = rng.gen_range(0.5..1.5);
        }
        for o in layer.offset.iter_mut() {
            *o = rng.gen_range(-0.3..0.3);
        }
        for b in layer.bias.iter_mut() {
            *b = rng.gen_range(-0.2..0.2);
        }
    }
    p
}

fn weighted_output(p: &NetworkParams, x: &Array2<f64>, w: &Array2<f64>) -> f64 {
    let (out, _) = forward_batch(p, x.view()).unwrap();
    (&out * w).sum()
}

/// Largest relative discrepancy between reverse-mode and central-difference
/// gradients over `nets` random networks, covering parameters and inputs.
/// Relative error is `|a − n| / max(|a|, |n|, floor)`.
pub fn gradient_suite(nets: usize, seed: u64, floor: f64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = 1e-6;
    let mut worst = 0.0f64;
    let rel = |a: f64, n: f64| (a - n).abs() / a.abs().max(n.abs()).max(floor);
    for _ in 0..nets {
        let p = random_network(&mut rng);
        let batch = rng.gen_range(1..=4);
        let x = Array2::from_shape_fn((batch, p.input_width()), |_| rng.gen_range(-1.0..1.0));
        let w = Array2::from_shape_fn((batch, p.output_width()), |_| rng.gen_range(-1.0..1.0));
        let (_, tape) = forward_batch(&p, x.view()).unwrap();
        let (grads, dx) = backward(&p, &tape, w.view()).unwrap();
        let analytic: Vec<f64> = grads.tensors().into_iter().flatten().copied().collect();
        let mut k = 0;
        let n_tensors = p.tensors().len();
        for t in 0..n_tensors {
            let len = p.tensors()[t].len();
            for i in 0..len {
                let mut plus = p.clone();
                plus.tensors_mut()[t][i] += h;
                let mut minus = p.clone();
                minus.tensors_mut()[t][i] -= h;
                let numeric = (weighted_output(&plus, &x, &w) - weighted_output(&minus, &x, &w)) / (2.0 * h);
                worst = worst.max(rel(analytic[k], numeric));
                k += 1;
            }
        }
        for idx in 0..x.len() {
            let (r, c) = (idx / x.ncols(), idx % x.ncols());
            let mut xp = x.clone();
            xp[[r, c]] += h;
            let mut xm = x.clone();
            xm[[r, c]] -= h;
            let numeric = (weighted_output(&p, &xp, &w) - weighted_output(&p, &xm, &w)) / (2.0 * h);
            worst = worst.max(rel(dx[[r, c]], numeric));
        }
    }
    worst
}
