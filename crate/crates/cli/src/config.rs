//! Experiment configuration: parsing, validation and sweep expansion.

use std::fmt;
use std::path::PathBuf;

use realonline::losses::{Loss, LossKind};
use realonline::registry::{ENVIRONMENTS, FIXTURES, LEARNERS};
use serde::{Deserialize, Serialize};

/// A configuration problem, anchored to a line of the source file when possible.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.column > 0 {
            write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Game,
    Entropy,
    BoundTable,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(String),
    Many(Vec<String>),
}

impl OneOrMany {
    fn into_vec(self) -> Vec<String> {
        match self {
            OneOrMany::One(s) => vec![s],
            OneOrMany::Many(v) => v,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    #[serde(rename = "L")]
    l: Option<Vec<f64>>,
    d: Option<Vec<usize>>,
    q: Option<Vec<f64>>,
    #[serde(rename = "T")]
    t: Option<Vec<usize>>,
    depth: Option<Vec<usize>>,
    eps: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    kind: Kind,
    learner: Option<OneOrMany>,
    environment: Option<OneOrMany>,
    loss: Option<Loss>,
    fixture: Option<String>,
    class_csv: Option<String>,
    #[serde(default)]
    sweep: RawSweep,
    seed: Option<u64>,
    out: Option<String>,
}

/// Where an entropy experiment gets its class.
#[derive(Debug, Clone, PartialEq)]
pub enum ClassSource {
    Fixture(String),
    Csv { path: PathBuf, loss: Loss },
}

/// Validated sweep axes; each is nonempty.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub l: Vec<f64>,
    pub d: Vec<usize>,
    pub q: Vec<f64>,
    pub t: Vec<usize>,
    pub depth: Vec<usize>,
    pub eps: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub kind: Kind,
    pub learners: Vec<String>,
    pub environments: Vec<String>,
    /// `None` means `|a-b|^q` with `q` taken from the cell (zero-one for the interval game).
    pub loss: Option<Loss>,
    pub class: Option<ClassSource>,
    pub sweep: Sweep,
    pub seed: u64,
    pub out: PathBuf,
}

/// One point of the sweep cross product.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    pub index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub learner: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub environment: Option<String>,
    #[serde(rename = "L")]
    pub l: f64,
    pub d: usize,
    pub q: f64,
    #[serde(rename = "T")]
    pub t: usize,
    pub depth: usize,
    pub eps: f64,
}

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_OUT: &str = "results";

/// 1-based line of the first `"key":` in `text`, or 1.
fn anchor(text: &str, key: &str) -> usize {
    let quoted = format!("\"{key}\"");
    for (i, line) in text.lines().enumerate() {
        let mut rest = line;
        while let Some(pos) = rest.find(&quoted) {
            let after = rest[pos + quoted.len()..].trim_start();
            if after.starts_with(':') {
                return i + 1;
            }
            rest = &rest[pos + quoted.len()..];
        }
    }
    1
}

fn err(text: &str, key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError { line: anchor(text, key), column: 0, message: message.into() }
}

fn axis<T: Clone>(text: &str, name: &str, v: Option<Vec<T>>, default: T) -> Result<Vec<T>, ConfigError> {
    match v {
        None => Ok(vec![default]),
        Some(v) if v.is_empty() => Err(err(text, name, format!("sweep axis {name:?} is empty"))),
        Some(v) => Ok(v),
    }
}

fn check_all<T: Copy + fmt::Display>(
    text: &str,
    name: &str,
    values: &[T],
    ok: impl Fn(T) -> bool,
    what: &str,
) -> Result<(), ConfigError> {
    match values.iter().find(|&&v| !ok(v)) {
        Some(v) => Err(err(text, name, format!("{name} = {v}: {what}"))),
        None => Ok(()),
    }
}

fn names(text: &str, key: &str, v: Option<OneOrMany>, known: &[&str]) -> Result<Vec<String>, ConfigError> {
    let v = v.ok_or_else(|| err(text, "kind", format!("missing field {key:?}")))?.into_vec();
    if v.is_empty() {
        return Err(err(text, key, format!("{key:?} lists no names")));
    }
    for n in &v {
        if !known.contains(&n.as_str()) {
            return Err(err(text, key, format!("unknown {key} {n:?}; known: {}", known.join(", "))));
        }
    }
    Ok(v)
}

/// Parses and validates `text`; relative paths resolve against `base`.
pub fn parse(text: &str, base: &std::path::Path) -> Result<Config, ConfigError> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| ConfigError {
        line: e.line().max(1),
        column: e.column(),
        message: e.to_string(),
    })?;
    let s = raw.sweep;
    let sweep = Sweep {
        l: axis(text, "L", s.l, 1.0)?,
        d: axis(text, "d", s.d, 1)?,
        q: axis(text, "q", s.q, 1.0)?,
        t: axis(text, "T", s.t, 100)?,
        depth: axis(text, "depth", s.depth, 3)?,
        eps: axis(text, "eps", s.eps, 0.1)?,
    };
    check_all(text, "L", &sweep.l, |v| v.is_finite() && v > 0.0, "must be positive")?;
    check_all(text, "d", &sweep.d, |v| v >= 1, "must be at least 1")?;
    check_all(text, "q", &sweep.q, |v| v.is_finite() && v > 0.0, "must be positive")?;
    check_all(text, "T", &sweep.t, |v| v >= 1, "must be at least 1")?;
    check_all(text, "depth", &sweep.depth, |v| v >= 1, "must be at least 1")?;
    check_all(text, "eps", &sweep.eps, |v| v.is_finite() && v > 0.0, "must be positive")?;

    let mut cfg = Config {
        kind: raw.kind,
        learners: Vec::new(),
        environments: Vec::new(),
        loss: raw.loss,
        class: None,
        sweep,
        seed: raw.seed.unwrap_or(DEFAULT_SEED),
        out: PathBuf::from(raw.out.unwrap_or_else(|| DEFAULT_OUT.to_string())),
    };
    match raw.kind {
        Kind::Game => {
            cfg.learners = names(text, "learner", raw.learner, LEARNERS)?;
            cfg.environments = names(text, "environment", raw.environment, ENVIRONMENTS)?;
            if let Some(loss) = &cfg.loss {
                if matches!(loss.kind(), LossKind::Custom(_)) {
                    return Err(err(
                        text,
                        "loss",
                        "games need a loss on real labels; custom tables index finite label sets",
                    ));
                }
            }
            if cfg.learners.iter().any(|l| l == "envelope") {
                check_all(text, "L", &cfg.sweep.l, |v| v >= 1.0, "the envelope learner needs L >= 1")?;
            }
        }
        Kind::Entropy => {
            cfg.class = Some(match (raw.fixture, raw.class_csv) {
                (Some(f), None) => {
                    if !FIXTURES.contains(&f.as_str()) {
                        return Err(err(
                            text,
                            "fixture",
                            format!("unknown fixture {f:?}; known: {}", FIXTURES.join(", ")),
                        ));
                    }
                    ClassSource::Fixture(f)
                }
                (None, Some(p)) => {
                    ClassSource::Csv { path: base.join(p), loss: cfg.loss.clone().unwrap_or_else(Loss::absolute) }
                }
                (Some(_), Some(_)) => {
                    return Err(err(text, "class_csv", "give either \"fixture\" or \"class_csv\", not both"))
                }
                (None, None) => return Err(err(text, "kind", "entropy experiments need \"fixture\" or \"class_csv\"")),
            });
            let max = realonline::entropy::MAX_SEARCH_DEPTH;
            check_all(text, "depth", &cfg.sweep.depth, |v| v <= max, &format!("search depth is limited to {max}"))?;
        }
        Kind::BoundTable => {
            check_all(text, "L", &cfg.sweep.l, |v| v >= 1.0, "bound tables need L >= 1")?;
            check_all(text, "eps", &cfg.sweep.eps, |v| v <= 1.0, "bound tables need eps <= 1")?;
        }
    }
    Ok(cfg)
}

impl Config {
    /// Cross product of all axes in a fixed order; the index is the RNG stream.
    pub fn cells(&self) -> Vec<Cell> {
        let s = &self.sweep;
        let (learners, envs): (Vec<Option<String>>, Vec<Option<String>>) = match self.kind {
            Kind::Game => (
                self.learners.iter().cloned().map(Some).collect(),
                self.environments.iter().cloned().map(Some).collect(),
            ),
            _ => (vec![None], vec![None]),
        };
        let mut out = Vec::new();
        for learner in &learners {
            for environment in &envs {
                for &l in &s.l {
                    for &d in &s.d {
                        for &q in &s.q {
                            for &t in &s.t {
                                for &depth in &s.depth {
                                    for &eps in &s.eps {
                                        out.push(Cell {
                                            index: out.len(),
                                            learner: learner.clone(),
                                            environment: environment.clone(),
                                            l,
                                            d,
                                            q,
                                            t,
                                            depth,
                                            eps,
                                        });
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::Path;

    #[test]
    fn parses_and_expands() {
        let text = r#"{
  "kind": "game",
  "learner": ["envelope", "constant-half"],
  "environment": "dyadic",
  "sweep": {"T": [4, 8], "q": [1]}
}"#;
        let c = parse(text, Path::new(".")).unwrap();
        let cells = c.cells();
        assert_eq!(cells.len(), 4);
        assert_eq!(cells[1].t, 8);
        assert_eq!(cells[2].learner.as_deref(), Some("constant-half"));
        assert_eq!(c.seed, DEFAULT_SEED);
    }

    #[test]
    fn errors_point_at_lines() {
        let text = "{\n  \"kind\": \"game\",\n  \"learner\": \"envelope\",\n  \"environment\": \"dyadic\",\n  \"sweep\": {\n    \"T\": []\n  }\n}";
        let e = parse(text, Path::new(".")).unwrap_err();
        assert_eq!(e.line, 6);
        assert!(e.message.contains("empty"));

        let text = "{\n  \"kind\": \"game\",\n  \"learner\": \"nope\"\n}";
        assert_eq!(parse(text, Path::new(".")).unwrap_err().line, 3);

        let text = "{\n  \"kind\": \"game\",\n  \"learner\" \"envelope\"\n}";
        let e = parse(text, Path::new(".")).unwrap_err();
        assert_eq!(e.line, 3);
        assert!(e.column > 0);

        let text = "{\n  \"kind\": \"entropy\",\n  \"fixture\": \"cube-class\",\n  \"sweep\": {\"depth\": [9]}\n}";
        assert_eq!(parse(text, Path::new(".")).unwrap_err().line, 4);
    }

    #[test]
    fn anchor_skips_values() {
        assert_eq!(anchor("{\"a\": \"T\",\n\"T\": 1}", "T"), 2);
    }
}
