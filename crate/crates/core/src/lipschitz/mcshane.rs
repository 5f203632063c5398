use super::{clip01, linf};
use crate::error::{Error, Result};
use crate::protocol::{Hypothesis, CERTIFY_TOL};

/// `x -> clip01(min_i (y_i + L |x - x_i|_inf))`.
#[derive(Debug, Clone, PartialEq)]
pub struct McShane {
    anchors: Vec<(Vec<f64>, f64)>,
    l: f64,
}

/// Builds the upper McShane extension after checking every anchor pair is
/// `L`-compatible (up to the default certification tolerance).
pub fn mcshane_extend(anchors: Vec<(Vec<f64>, f64)>, l: f64) -> Result<McShane> {
    if !(l > 0.0) {
        return Err(Error::Domain(format!("Lipschitz constant must be positive, got {l}")));
    }
    for i in 0..anchors.len() {
        for j in i + 1..anchors.len() {
            let (xi, yi) = &anchors[i];
            let (xj, yj) = &anchors[j];
            let gap = (yi - yj).abs() - l * linf(xi, xj);
            if gap > CERTIFY_TOL {
                return Err(Error::Construction(format!(
                    "anchors {i} and {j} are not {l}-Lipschitz compatible: |{yi} - {yj}| > {l} * {}",
                    linf(xi, xj)
                )));
            }
        }
    }
    Ok(McShane { anchors, l })
}

impl McShane {
    pub fn anchors(&self) -> &[(Vec<f64>, f64)] {
        &self.anchors
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let m = self.anchors.iter().fold(f64::INFINITY, |m, (xi, yi)| m.min(yi + self.l * linf(x, xi)));
        clip01(m)
    }
}

impl Hypothesis for McShane {
    fn eval(&self, x: &[f64]) -> f64 {
        self.value(x)
    }
}
