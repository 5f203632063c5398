use super::linf;
use crate::error::{Error, Result};
use crate::protocol::{Learner, Transcript, CERTIFY_TOL};

/// Observed anchors of an `L`-Lipschitz target into `[0,1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeState {
    anchors: Vec<(Vec<f64>, f64)>,
    l: f64,
    d: usize,
}

impl EnvelopeState {
    pub fn new(l: f64, d: usize) -> Result<Self> {
        if !(l >= 1.0) || d == 0 {
            return Err(Error::Domain(format!("envelope needs L >= 1 and d >= 1, got L={l}, d={d}")));
        }
        Ok(Self { anchors: Vec::new(), l, d })
    }

    pub fn with_anchors(l: f64, d: usize, anchors: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        let mut s = Self::new(l, d)?;
        for (x, y) in anchors {
            s.push(x, y)?;
        }
        Ok(s)
    }

    pub fn push(&mut self, x: Vec<f64>, y: f64) -> Result<()> {
        if x.len() != self.d {
            return Err(Error::Domain(format!("anchor has dimension {}, expected {}", x.len(), self.d)));
        }
        self.anchors.push((x, y));
        Ok(())
    }

    pub fn anchors(&self) -> &[(Vec<f64>, f64)] {
        &self.anchors
    }

    pub fn lipschitz(&self) -> f64 {
        self.l
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// `(lower(x), upper(x))` in one scan of the anchors.
    pub fn bounds(&self, x: &[f64]) -> (f64, f64) {
        let mut lo: f64 = 0.0;
        let mut hi: f64 = 1.0;
        for (xs, ys) in &self.anchors {
            let r = self.l * linf(x, xs);
            lo = lo.max(ys - r);
            hi = hi.min(ys + r);
        }
        (lo, hi)
    }

    pub fn lower(&self, x: &[f64]) -> f64 {
        self.bounds(x).0
    }

    pub fn upper(&self, x: &[f64]) -> f64 {
        self.bounds(x).1
    }

    /// `upper(x) - lower(x)`, without the inversion check.
    pub fn width(&self, x: &[f64]) -> f64 {
        let (lo, hi) = self.bounds(x);
        hi - lo
    }
}

/// Midpoint of the envelopes at `x` and their width.
pub fn envelope_predict(state: &EnvelopeState, x: &[f64]) -> Result<(f64, f64)> {
    envelope_predict_tol(state, x, CERTIFY_TOL)
}

pub fn envelope_predict_tol(state: &EnvelopeState, x: &[f64], tol: f64) -> Result<(f64, f64)> {
    if x.len() != state.d {
        return Err(Error::Domain(format!("query has dimension {}, expected {}", x.len(), state.d)));
    }
    let (lo, hi) = state.bounds(x);
    if lo > hi + tol {
        return Err(Error::NonRealizable(format!("envelopes cross at {x:?}: lower {lo} > upper {hi}")));
    }
    Ok(((lo + hi) / 2.0, (hi - lo).max(0.0)))
}

/// Predicts the envelope midpoint; remembers every labeled point.
#[derive(Debug, Clone)]
pub struct EnvelopeLearner {
    state: EnvelopeState,
}

pub fn envelope_learner(l: f64, d: usize) -> Result<EnvelopeLearner> {
    Ok(EnvelopeLearner { state: EnvelopeState::new(l, d)? })
}

impl EnvelopeLearner {
    pub fn state(&self) -> &EnvelopeState {
        &self.state
    }
}

impl Learner for EnvelopeLearner {
    fn predict(&self, x: &[f64], _: &Transcript) -> Result<f64> {
        envelope_predict(&self.state, x).map(|(y, _)| y)
    }

    fn update(&mut self, x: &[f64], y: f64) {
        self.state.anchors.push((x.to_vec(), y));
    }
}

/// Midpoint-rule estimate of `int_{[-1,1]^d} W(x)^{q-d} dx` with
/// `resolution` cells per axis.
pub fn envelope_potential(state: &EnvelopeState, q: f64, resolution: usize) -> Result<f64> {
    let d = state.d;
    if !(q > d as f64) {
        return Err(Error::Domain(format!("potential needs q > d, got q={q}, d={d}")));
    }
    if resolution < 2 {
        return Err(Error::Domain("resolution must be at least 2 cells per axis".into()));
    }
    let h = 2.0 / resolution as f64;
    let cells = resolution.checked_pow(d as u32).ok_or_else(|| Error::Domain("grid too large".into()))?;
    let exp = q - d as f64;
    let mut idx = vec![0usize; d];
    let mut x = vec![0.0; d];
    let mut sum = 0.0;
    for _ in 0..cells {
        for (xi, &i) in x.iter_mut().zip(&idx) {
            *xi = -1.0 + (i as f64 + 0.5) * h;
        }
        let w = state.width(&x).max(0.0);
        sum += if exp == 1.0 { w } else { w.powf(exp) };
        for i in idx.iter_mut().rev() {
            *i += 1;
            if *i < resolution {
                break;
            }
            *i = 0;
        }
    }
    Ok(sum * h.powi(d as i32))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn predict_examples() {
        let empty = EnvelopeState::new(1.0, 1).unwrap();
        assert_eq!(envelope_predict(&empty, &[0.3]).unwrap(), (0.5, 1.0));

        let s = EnvelopeState::with_anchors(1.0, 1, vec![(vec![0.0], 0.9)]).unwrap();
        let (y, w) = envelope_predict(&s, &[0.2]).unwrap();
        assert!((y - 0.85).abs() < 1e-12 && (w - 0.3).abs() < 1e-12);

        let s = EnvelopeState::with_anchors(1.0, 1, vec![(vec![0.0], 0.5)]).unwrap();
        assert_eq!(envelope_predict(&s, &[1.0]).unwrap(), (0.5, 1.0));
    }

    #[test]
    fn inversion_is_an_error() {
        let s = EnvelopeState::with_anchors(1.0, 1, vec![(vec![0.0], 0.0), (vec![0.1], 0.9)]).unwrap();
        assert!(matches!(envelope_predict(&s, &[0.05]), Err(Error::NonRealizable(_))));
    }

    #[test]
    fn potential_examples() {
        let empty = EnvelopeState::new(1.0, 1).unwrap();
        assert!((envelope_potential(&empty, 2.0, 8).unwrap() - 2.0).abs() < 1e-12);
        let empty2 = EnvelopeState::new(1.0, 2).unwrap();
        assert!((envelope_potential(&empty2, 3.0, 8).unwrap() - 4.0).abs() < 1e-12);

        // W = 2|x| on |x| <= 1/2 and 1 elsewhere, so the integral is 1/2 + 1
        let s = EnvelopeState::with_anchors(1.0, 1, vec![(vec![0.0], 0.5)]).unwrap();
        assert!((envelope_potential(&s, 2.0, 400).unwrap() - 1.5).abs() < 1e-12);
        assert!(envelope_potential(&s, 1.0, 10).is_err());
    }
}
