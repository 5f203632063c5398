use serde::{Deserialize, Serialize};

use super::{dot, norm2, relu, NORM_TOL};
use crate::error::{Error, Result};
use crate::protocol::Hypothesis;

/// `x -> clip_{[-1,1]}(sum_j a_j ReLU(w^j . x))` with `|a_j| <= 1`, `|w^j|_2 <= 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KReluRepr", into = "KReluRepr")]
pub struct KReluParams {
    a: Vec<f64>,
    w: Vec<Vec<f64>>,
    d: usize,
}

#[derive(Serialize, Deserialize)]
struct KReluRepr {
    k: usize,
    d: usize,
    a: Vec<f64>,
    w: Vec<Vec<f64>>,
}

impl KReluParams {
    pub fn new(a: Vec<f64>, w: Vec<Vec<f64>>, d: usize) -> Result<Self> {
        if a.len() != w.len() || a.is_empty() {
            return Err(Error::Domain(format!(
                "need k >= 1 output weights and k neurons, got {} and {}",
                a.len(),
                w.len()
            )));
        }
        for (j, (aj, wj)) in a.iter().zip(&w).enumerate() {
            if !(aj.abs() <= 1.0) {
                return Err(Error::Domain(format!("|a_{j}| = {} exceeds 1", aj.abs())));
            }
            if wj.len() != d {
                return Err(Error::Domain(format!("w^{j} has dimension {}, expected {d}", wj.len())));
            }
            if !(norm2(wj) <= 1.0 + NORM_TOL) {
                return Err(Error::Domain(format!("|w^{j}|_2 = {} exceeds 1", norm2(wj))));
            }
        }
        Ok(Self { a, w, d })
    }

    pub fn k(&self) -> usize {
        self.a.len()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn w(&self) -> &[Vec<f64>] {
        &self.w
    }

    fn raw(&self, x: &[f64]) -> f64 {
        let s: f64 = self.a.iter().zip(&self.w).map(|(a, w)| a * relu(dot(w, x))).sum();
        s.clamp(-1.0, 1.0)
    }
}

impl TryFrom<KReluRepr> for KReluParams {
    type Error = Error;

    fn try_from(r: KReluRepr) -> Result<Self> {
        if r.k != r.a.len() {
            return Err(Error::Domain(format!("k = {} but {} output weights given", r.k, r.a.len())));
        }
        Self::new(r.a, r.w, r.d)
    }
}

impl From<KReluParams> for KReluRepr {
    fn from(p: KReluParams) -> Self {
        KReluRepr { k: p.a.len(), d: p.d, a: p.a, w: p.w }
    }
}

pub fn eval_krelu(params: &KReluParams, x: &[f64]) -> Result<f64> {
    if x.len() != params.d {
        return Err(Error::Domain(format!("input has dimension {}, expected {}", x.len(), params.d)));
    }
    if norm2(x) > 1.0 + NORM_TOL {
        return Err(Error::Domain(format!("|x|_2 = {} exceeds 1", norm2(x))));
    }
    Ok(params.raw(x))
}

impl Hypothesis for KReluParams {
    fn eval(&self, x: &[f64]) -> f64 {
        self.raw(x)
    }
}

/// One-dimensional two-neuron net with biases:
/// `a1 ReLU(w1 x + b1) + a2 ReLU(w2 x + b2) + b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoReluNet {
    pub w: [f64; 2],
    pub b: [f64; 2],
    pub a: [f64; 2],
    pub c: f64,
}

impl TwoReluNet {
    pub fn value(&self, x: f64) -> f64 {
        self.a[0] * relu(self.w[0] * x + self.b[0]) + self.a[1] * relu(self.w[1] * x + self.b[1]) + self.c
    }

    /// All seven parameters, in `w, b, a, c` order.
    pub fn params(&self) -> [f64; 7] {
        [self.w[0], self.w[1], self.b[0], self.b[1], self.a[0], self.a[1], self.c]
    }

    pub fn in_unit_box(&self) -> bool {
        self.params().iter().all(|v| v.abs() <= 1.0)
    }
}

impl Hypothesis for TwoReluNet {
    fn eval(&self, x: &[f64]) -> f64 {
        self.value(x[0])
    }
}

/// Parameters realizing `f(x) = ReLU(theta - x) - ReLU(theta - x - eps)`:
/// `eps` left of `theta - eps`, `0` right of `theta`, linear between.
pub fn two_relu_witness(theta: f64, eps: f64) -> Result<TwoReluNet> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Domain(format!("eps must lie in (0, 1], got {eps}")));
    }
    if !(theta >= -1.0 + eps && theta <= 1.0) {
        return Err(Error::Domain(format!("theta must lie in [{}, 1], got {theta}", -1.0 + eps)));
    }
    Ok(TwoReluNet { w: [-1.0, -1.0], b: [theta, theta - eps], a: [1.0, -1.0], c: 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn krelu_examples() {
        let p = KReluParams::new(vec![1.0], vec![vec![1.0, 0.0]], 2).unwrap();
        assert_eq!(eval_krelu(&p, &[1.0, 0.0]).unwrap(), 1.0);

        let p = KReluParams::new(vec![1.0, -1.0], vec![vec![0.6, 0.8], vec![0.6, 0.8]], 2).unwrap();
        for x in [[0.5, 0.5], [-0.3, 0.1], [0.0, 1.0]] {
            assert_eq!(eval_krelu(&p, &x).unwrap(), 0.0);
        }

        let p = KReluParams::new(vec![1.0, 1.0], vec![vec![1.0, 0.0], vec![1.0, 0.0]], 2).unwrap();
        assert_eq!(eval_krelu(&p, &[1.0, 0.0]).unwrap(), 1.0);
        assert!(eval_krelu(&p, &[1.0, 0.1]).is_err());
    }

    #[test]
    fn krelu_validation() {
        assert!(KReluParams::new(vec![1.5], vec![vec![1.0]], 1).is_err());
        assert!(KReluParams::new(vec![1.0], vec![vec![1.0, 1.0]], 2).is_err());
        let json = r#"{"k":1,"d":2,"a":[0.5],"w":[[0.6,0.8]]}"#;
        let p: KReluParams = serde_json::from_str(json).unwrap();
        assert_eq!(serde_json::to_string(&p).unwrap(), json);
        assert!(serde_json::from_str::<KReluParams>(r#"{"k":1,"d":1,"a":[0.5],"w":[[2.0]]}"#).is_err());
    }

    #[test]
    fn witness_examples() {
        let f = two_relu_witness(0.5, 0.25).unwrap();
        assert!(f.in_unit_box());
        assert_eq!(f.value(0.5), 0.0);
        assert_eq!(f.value(0.0), 0.25);
        assert!((f.value(0.4) - 0.1).abs() < 1e-15);
        assert_eq!(f.value(1.0), 0.0);
        assert_eq!(f.value(-1.0), 0.25);
        assert!(two_relu_witness(-0.9, 0.25).is_err());
        assert!(two_relu_witness(0.0, 0.0).is_err());
    }
}
