use rand::Rng;
use serde::{Deserialize, Serialize};

use super::relu;
use crate::error::{Error, Result};

/// A scalar activation with its declared Lipschitz constant and `|sigma(0)|`.
#[derive(Debug, Clone, Copy)]
pub struct Activation {
    pub name: &'static str,
    pub f: fn(f64) -> f64,
    pub lipschitz: f64,
    pub sigma0: f64,
}

impl Activation {
    pub fn relu() -> Self {
        Self { name: "relu", f: relu, lipschitz: 1.0, sigma0: 0.0 }
    }

    pub fn tanh() -> Self {
        Self { name: "tanh", f: f64::tanh, lipschitz: 1.0, sigma0: 0.0 }
    }

    pub fn sigmoid() -> Self {
        fn s(v: f64) -> f64 {
            1.0 / (1.0 + (-v).exp())
        }
        Self { name: "sigmoid", f: s, lipschitz: 0.25, sigma0: 0.5 }
    }

    pub fn softplus() -> Self {
        fn s(v: f64) -> f64 {
            v.max(0.0) + (-v.abs()).exp().ln_1p()
        }
        Self { name: "softplus", f: s, lipschitz: 1.0, sigma0: std::f64::consts::LN_2 }
    }
}

/// Depth-`L` width-`k` network on `[-1,1]^d`:
/// `z_0 = x`, `z_l = sigma(W_l z_{l-1} + b_l)` for `l < L`, output
/// `clip01(<a, z_{L-1}> + c)`. Every parameter lies in `[-1,1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DeepRepr", into = "DeepRepr")]
pub struct DeepNetParams {
    depth: usize,
    k: usize,
    d: usize,
    weights: Vec<Vec<Vec<f64>>>,
    biases: Vec<Vec<f64>>,
    a: Vec<f64>,
    c: f64,
}

#[derive(Serialize, Deserialize)]
struct DeepRepr {
    #[serde(rename = "L")]
    depth: usize,
    k: usize,
    d: usize,
    #[serde(rename = "W")]
    weights: Vec<Vec<Vec<f64>>>,
    b: Vec<Vec<f64>>,
    a: Vec<f64>,
    c: f64,
}

fn check_shape(depth: usize, k: usize, d: usize) -> Result<()> {
    if depth < 2 || k == 0 || d == 0 {
        return Err(Error::Domain(format!("need L >= 2, k >= 1, d >= 1; got L={depth}, k={k}, d={d}")));
    }
    Ok(())
}

impl DeepNetParams {
    /// `p = kd + (L-2)k^2 + Lk + 1`.
    pub fn param_count(depth: usize, k: usize, d: usize) -> usize {
        k * d + (depth - 2) * k * k + depth * k + 1
    }

    /// Unflattens `theta` in the order `W_1, b_1, ..., W_{L-1}, b_{L-1}, a, c`
    /// (matrices row-major).
    pub fn from_flat(depth: usize, k: usize, d: usize, theta: &[f64]) -> Result<Self> {
        check_shape(depth, k, d)?;
        let p = Self::param_count(depth, k, d);
        if theta.len() != p {
            return Err(Error::Domain(format!("expected {p} parameters, got {}", theta.len())));
        }
        if let Some(v) = theta.iter().find(|v| !(v.abs() <= 1.0)) {
            return Err(Error::Domain(format!("parameter {v} outside [-1, 1]")));
        }
        let mut it = theta.iter().copied();
        let mut take = |n: usize| -> Vec<f64> { it.by_ref().take(n).collect() };
        let mut weights = Vec::with_capacity(depth - 1);
        let mut biases = Vec::with_capacity(depth - 1);
        for layer in 0..depth - 1 {
            let cols = if layer == 0 { d } else { k };
            weights.push((0..k).map(|_| take(cols)).collect());
            biases.push(take(k));
        }
        let a = take(k);
        let c = take(1)[0];
        Ok(Self { depth, k, d, weights, biases, a, c })
    }

    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(Self::param_count(self.depth, self.k, self.d));
        for (w, b) in self.weights.iter().zip(&self.biases) {
            for row in w {
                out.extend_from_slice(row);
            }
            out.extend_from_slice(b);
        }
        out.extend_from_slice(&self.a);
        out.push(self.c);
        out
    }

    pub fn random<R: Rng>(rng: &mut R, depth: usize, k: usize, d: usize) -> Result<Self> {
        check_shape(depth, k, d)?;
        let theta: Vec<f64> = (0..Self::param_count(depth, k, d)).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        Self::from_flat(depth, k, d, &theta)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn width(&self) -> usize {
        self.k
    }

    pub fn input_dim(&self) -> usize {
        self.d
    }

    /// `<a, z_{L-1}(x)> + c` before clipping.
    pub fn preactivation(&self, sigma: &Activation, x: &[f64]) -> f64 {
        let mut z = x.to_vec();
        for (w, b) in self.weights.iter().zip(&self.biases) {
            z = w
                .iter()
                .zip(b)
                .map(|(row, bi)| (sigma.f)(row.iter().zip(&z).map(|(r, v)| r * v).sum::<f64>() + bi))
                .collect();
        }
        self.a.iter().zip(&z).map(|(a, v)| a * v).sum::<f64>() + self.c
    }
}

impl TryFrom<DeepRepr> for DeepNetParams {
    type Error = Error;

    fn try_from(r: DeepRepr) -> Result<Self> {
        check_shape(r.depth, r.k, r.d)?;
        if r.weights.len() != r.depth - 1 || r.b.len() != r.depth - 1 || r.a.len() != r.k {
            return Err(Error::Domain("layer counts do not match L and k".into()));
        }
        let mut theta = Vec::new();
        for (l, (w, b)) in r.weights.iter().zip(&r.b).enumerate() {
            let cols = if l == 0 { r.d } else { r.k };
            if w.len() != r.k || w.iter().any(|row| row.len() != cols) || b.len() != r.k {
                return Err(Error::Domain(format!("layer {} has the wrong shape", l + 1)));
            }
            w.iter().for_each(|row| theta.extend_from_slice(row));
            theta.extend_from_slice(b);
        }
        theta.extend_from_slice(&r.a);
        theta.push(r.c);
        Self::from_flat(r.depth, r.k, r.d, &theta)
    }
}

impl From<DeepNetParams> for DeepRepr {
    fn from(p: DeepNetParams) -> Self {
        DeepRepr { depth: p.depth, k: p.k, d: p.d, weights: p.weights, b: p.biases, a: p.a, c: p.c }
    }
}

pub fn eval_deep(params: &DeepNetParams, sigma: &Activation, x: &[f64]) -> f64 {
    params.preactivation(sigma, x).clamp(0.0, 1.0)
}

/// `K = (1 + max_l M_l)(1 + L_sigma S)` with `M_0 = 1`,
/// `M_1 = |sigma(0)| + L_sigma (d M_0 + 1)`, `M_l = |sigma(0)| + L_sigma (k M_{l-1} + 1)`
/// and `S = sum_{s=0}^{L-2} (L_sigma k)^s`.
pub fn deep_lipschitz_constant(depth: usize, k: usize, d: usize, l_sigma: f64, sigma0: f64) -> Result<f64> {
    check_shape(depth, k, d)?;
    if !(l_sigma > 0.0) {
        return Err(Error::Domain(format!("activation Lipschitz constant must be positive, got {l_sigma}")));
    }
    let s0 = sigma0.abs();
    let mut m = 1.0f64;
    let mut m_bar = m;
    for layer in 1..depth {
        let fan_in = if layer == 1 { d } else { k } as f64;
        m = s0 + l_sigma * (fan_in * m + 1.0);
        m_bar = m_bar.max(m);
    }
    let s: f64 = (0..=depth - 2).map(|e| (l_sigma * k as f64).powi(e as i32)).sum();
    Ok((1.0 + m_bar) * (1.0 + l_sigma * s))
}
