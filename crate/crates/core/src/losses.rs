//! Pairwise losses on label spaces and the relaxed triangle inequality.

use serde::{Deserialize, Serialize};
use std::io::Read;

use crate::error::{Error, Result};

/// Denominators below this are treated as zero by [`check_approx_triangle`].
pub const RATIO_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LossRepr", into = "LossRepr")]
pub struct Loss {
    kind: LossKind,
    c: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LossKind {
    /// `|a - b|^q`.
    PowerQ(f64),
    /// `min{1, (a - b)^2 / 4}`.
    ClippedSquared,
    /// `0` on equal labels, `1` otherwise.
    ZeroOne,
    /// Lookup table over integer label indices.
    Custom(CustomTable),
}

/// Symmetric loss matrix over a finite, named label set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CustomTable {
    labels: Vec<String>,
    matrix: Vec<Vec<f64>>,
}

impl CustomTable {
    pub fn new(labels: Vec<String>, matrix: Vec<Vec<f64>>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::Domain("custom loss needs at least one label".into()));
        }
        if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
            return Err(Error::Domain(format!("custom loss matrix must be {n}x{n}")));
        }
        for i in 0..n {
            if matrix[i][i] != 0.0 {
                return Err(Error::Domain(format!(
                    "custom loss diagonal entry ({i},{i}) is {}, expected 0",
                    matrix[i][i]
                )));
            }
            for j in 0..n {
                let v = matrix[i][j];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::Domain(format!("custom loss entry ({i},{j}) = {v}")));
                }
                if v != matrix[j][i] {
                    return Err(Error::Domain(format!(
                        "custom loss not symmetric at ({i},{j}): {v} vs {}",
                        matrix[j][i]
                    )));
                }
            }
        }
        Ok(Self { labels, matrix })
    }

    /// Reads a square CSV: a header row of label names, then one numeric row per label.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let labels: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        let mut matrix = Vec::with_capacity(labels.len());
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|s| {
                    s.parse::<f64>().map_err(|e| Error::Format(format!("row {}: cannot parse {s:?}: {e}", line + 1)))
                })
                .collect::<Result<Vec<_>>>()?;
            matrix.push(row);
        }
        Self::new(labels, matrix)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.matrix[i][j]
    }

    /// Smallest `c` for which the table satisfies the relaxed triangle inequality,
    /// over all label triples. Infinite if some positive entry is bridged by zeros.
    pub fn required_c(&self) -> f64 {
        let n = self.len();
        let mut best: f64 = 1.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let num = self.matrix[i][j];
                    let den = self.matrix[i][k] + self.matrix[j][k];
                    if den < RATIO_FLOOR {
                        if num > RATIO_FLOOR {
                            return f64::INFINITY;
                        }
                    } else {
                        best = best.max(num / den);
                    }
                }
            }
        }
        best
    }

    fn index(&self, y: f64) -> Result<usize> {
        if y.fract() != 0.0 || y < 0.0 || y >= self.len() as f64 {
            return Err(Error::Domain(format!("label {y} is not an index into a {}-label table", self.len())));
        }
        Ok(y as usize)
    }
}

impl Loss {
    /// `|a - b|^q` with `c = 2^{q-1}`.
    pub fn power(q: f64) -> Result<Self> {
        if !(q.is_finite() && q >= 1.0) {
            return Err(Error::Domain(format!("power loss needs q >= 1, got {q}")));
        }
        Ok(Self { kind: LossKind::PowerQ(q), c: 2f64.powf(q - 1.0) })
    }

    pub fn absolute() -> Self {
        Self::power(1.0).expect("q = 1 is valid")
    }

    pub fn squared() -> Self {
        Self::power(2.0).expect("q = 2 is valid")
    }

    pub fn clipped_squared() -> Self {
        Self { kind: LossKind::ClippedSquared, c: 2.0 }
    }

    pub fn zero_one() -> Self {
        Self { kind: LossKind::ZeroOne, c: 1.0 }
    }

    /// Table loss with a declared constant `c`. The declaration is not checked
    /// against the table; see [`CustomTable::required_c`].
    pub fn custom(table: CustomTable, c: f64) -> Result<Self> {
        if !(c >= 1.0) {
            return Err(Error::Domain(format!("approximation constant must be >= 1, got {c}")));
        }
        Ok(Self { kind: LossKind::Custom(table), c })
    }

    pub fn kind(&self) -> &LossKind {
        &self.kind
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Exponent for power losses, `None` otherwise.
    pub fn q(&self) -> Option<f64> {
        match self.kind {
            LossKind::PowerQ(q) => Some(q),
            _ => None,
        }
    }

    pub fn evaluate(&self, a: f64, b: f64) -> Result<f64> {
        Ok(match &self.kind {
            LossKind::PowerQ(q) => {
                let d = (a - b).abs();
                if *q == 1.0 {
                    d
                } else if *q == 2.0 {
                    d * d
                } else {
                    d.powf(*q)
                }
            }
            LossKind::ClippedSquared => ((a - b) * (a - b) / 4.0).min(1.0),
            LossKind::ZeroOne => {
                if a == b {
                    0.0
                } else {
                    1.0
                }
            }
            LossKind::Custom(t) => t.entry(t.index(a)?, t.index(b)?),
        })
    }

    /// Whether `y` is a label this loss can score.
    pub fn accepts(&self, y: f64) -> bool {
        match &self.kind {
            LossKind::Custom(t) => t.index(y).is_ok(),
            _ => y.is_finite(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriangleViolation {
    pub triple: (f64, f64, f64),
    /// `l(y1,y2) / (l(y1,y3) + l(y2,y3))`; infinite for a zero denominator.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TriangleReport {
    pub violations: Vec<TriangleViolation>,
    /// Largest ratio seen over triples with a positive denominator.
    pub max_required_c: f64,
}

/// Checks `l(y1,y2) <= c (l(y1,y3) + l(y2,y3))` on each triple with the loss's declared `c`.
///
/// A relative slack of `1e-12` absorbs rounding on triples that meet the
/// inequality with equality.
pub fn check_approx_triangle(loss: &Loss, triples: &[(f64, f64, f64)]) -> Result<TriangleReport> {
    let mut report = TriangleReport::default();
    for &(y1, y2, y3) in triples {
        let num = loss.evaluate(y1, y2)?;
        let den = loss.evaluate(y1, y3)? + loss.evaluate(y2, y3)?;
        if den < RATIO_FLOOR {
            if num > RATIO_FLOOR {
                report.violations.push(TriangleViolation { triple: (y1, y2, y3), ratio: f64::INFINITY });
            }
            continue;
        }
        let ratio = num / den;
        report.max_required_c = report.max_required_c.max(ratio);
        if num > loss.c * den * (1.0 + 1e-12) {
            report.violations.push(TriangleViolation { triple: (y1, y2, y3), ratio });
        }
    }
    Ok(report)
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum LossRepr {
    PowerQ { q: f64 },
    ClippedSquared,
    ZeroOne,
    Custom { labels: Vec<String>, matrix: Vec<Vec<f64>>, c: f64 },
}

impl TryFrom<LossRepr> for Loss {
    type Error = Error;

    fn try_from(r: LossRepr) -> Result<Self> {
        match r {
            LossRepr::PowerQ { q } => Loss::power(q),
            LossRepr::ClippedSquared => Ok(Loss::clipped_squared()),
            LossRepr::ZeroOne => Ok(Loss::zero_one()),
            LossRepr::Custom { labels, matrix, c } => Loss::custom(CustomTable::new(labels, matrix)?, c),
        }
    }
}

impl From<Loss> for LossRepr {
    fn from(l: Loss) -> Self {
        match l.kind {
            LossKind::PowerQ(q) => LossRepr::PowerQ { q },
            LossKind::ClippedSquared => LossRepr::ClippedSquared,
            LossKind::ZeroOne => LossRepr::ZeroOne,
            LossKind::Custom(t) => LossRepr::Custom { labels: t.labels, matrix: t.matrix, c: l.c },
        }
    }
}
