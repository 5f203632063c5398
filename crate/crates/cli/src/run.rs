//! Executes a validated configuration and writes its artifacts.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use realonline::entropy::{
    covering_number, covering_profile, entropy_potential, lipschitz_cover_bound, online_dim_lower_bound, FiniteClass,
    LIPSCHITZ_C0,
};
use realonline::exec::Exec;
use realonline::lipschitz::{critical_bound, pointwise_mistake_bound, supercritical_constant};
use realonline::losses::Loss;
use realonline::registry::{fixture, play, BoundKind, GameSpec};
use realonline::Error;
use serde_json::{json, Value};

use crate::config::{Cell, ClassSource, Config, Kind};

const LIPSCHITZ_ENVS: &[&str] = &["dyadic", "far-endpoint", "grid", "random-lipschitz"];

/// How a run ended, in exit-code order of severity.
#[derive(Debug)]
pub enum RunError {
    Runtime(String),
    /// Some cell missed its bound or produced an uncertified transcript.
    BoundViolation(usize),
    /// Some cell ran out of search budget.
    Resource(String),
}

struct CellResult {
    row: Value,
    ok: bool,
    resource: Option<String>,
}

fn cell_path(out: &Path, index: usize, ext: &str) -> PathBuf {
    out.join(format!("cell_{index:04}.{ext}"))
}

fn write_json(path: &Path, v: &Value) -> Result<(), RunError> {
    let mut text = serde_json::to_string_pretty(v).map_err(|e| RunError::Runtime(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| RunError::Runtime(format!("{}: {e}", path.display())))
}

fn rt(e: impl std::fmt::Display) -> RunError {
    RunError::Runtime(e.to_string())
}

fn game_loss(cfg: &Config, cell: &Cell) -> Loss {
    match &cfg.loss {
        Some(l) => l.clone(),
        None if cell.environment.as_deref() == Some("interval") => Loss::zero_one(),
        None => Loss::power(cell.q).unwrap_or_else(|_| Loss::absolute()),
    }
}

fn bound_kind_name(k: BoundKind) -> &'static str {
    match k {
        BoundKind::Upper => "upper",
        BoundKind::Lower => "lower",
    }
}

fn run_game_cell(cfg: &Config, cell: &Cell, out: &Path) -> Result<CellResult, RunError> {
    let learner = cell.learner.as_deref().unwrap_or_default();
    let env = cell.environment.as_deref().unwrap_or_default();
    let spec = GameSpec { l: cell.l, d: cell.d, q: cell.q, t: cell.t, depth: cell.depth, eps: cell.eps };
    let loss = game_loss(cfg, cell);
    let outcome = match play(learner, env, &spec, &loss, cfg.seed, cell.index as u64) {
        Ok(o) => o,
        Err(Error::Resource { message, .. }) => return Err(RunError::Resource(message)),
        Err(e) => return Err(RunError::Runtime(format!("cell {}: {e}", cell.index))),
    };
    let tr = &outcome.transcript;
    let csv_path = cell_path(out, cell.index, "csv");
    let file = File::create(&csv_path).map_err(rt)?;
    tr.write_csv(BufWriter::new(file)).map_err(rt)?;

    let horizon = tr.horizon();
    let cum = tr.cumulative_loss;
    let q = loss.q();
    if LIPSCHITZ_ENVS.contains(&env) {
        let constant = q.and_then(|q| {
            let d = cell.d as f64;
            if q > d {
                Some(supercritical_constant(cell.d, q))
            } else if q == d {
                Some(8f64.powi(cell.d as i32))
            } else {
                None
            }
        });
        let sidecar = json!({
            "L": cell.l,
            "d": cell.d,
            "q": q,
            "T": horizon,
            "bound_constant": constant,
            "cumulative_loss": cum,
        });
        write_json(&cell_path(out, cell.index, "json"), &sidecar)?;
    }

    // an upper bound is the headline guarantee when one applies
    let headline = outcome.bounds.iter().find(|b| b.kind == BoundKind::Upper).or_else(|| outcome.bounds.first());
    let satisfied = outcome.bounds_hold();
    let row = json!({
        "cell": cell,
        "loss": loss,
        "horizon": horizon,
        "cumulative_loss": cum,
        "log_growth": cum / (1.0 + (horizon.max(1) as f64).ln()),
        "paper_bound": headline.map(|b| b.value),
        "bound_kind": headline.map(|b| bound_kind_name(b.kind)),
        "bounds": outcome.bounds.iter().map(|b| json!({"kind": bound_kind_name(b.kind), "value": b.value})).collect::<Vec<_>>(),
        "bound_satisfied": satisfied,
        "certified": outcome.certified,
        "flagged": tr.flagged,
        "csv": csv_path.file_name().map(|f| f.to_string_lossy().into_owned()),
    });
    Ok(CellResult { row, ok: satisfied && outcome.certified, resource: None })
}

fn load_class(src: &ClassSource) -> Result<FiniteClass, RunError> {
    match src {
        ClassSource::Fixture(name) => fixture(name).map_err(rt),
        ClassSource::Csv { path, loss } => {
            let f = File::open(path).map_err(|e| RunError::Runtime(format!("{}: {e}", path.display())))?;
            FiniteClass::from_csv(f, loss.clone()).map_err(|e| RunError::Runtime(format!("{}: {e}", path.display())))
        }
    }
}

struct ClassSummary {
    phi: f64,
    profile: Vec<(f64, usize, bool)>,
}

fn run_entropy_cell(
    class: &FiniteClass,
    summary: &ClassSummary,
    cell: &Cell,
    out: &Path,
) -> Result<CellResult, RunError> {
    let u = class.all();
    let n_eps = covering_number(class, u, cell.eps).map_err(rt)?;
    let c = class.loss().c();
    let bound = 4.0 * c * summary.phi;
    let (d_onl, resource) = match online_dim_lower_bound(class, cell.depth) {
        Ok(v) => (v, None),
        Err(Error::Resource { message, partial }) => (partial, Some(message)),
        Err(e) => return Err(rt(e)),
    };

    let csv_path = cell_path(out, cell.index, "csv");
    let mut w = BufWriter::new(File::create(&csv_path).map_err(rt)?);
    let mut text = String::from("eps_from,eps_to,covering_number,log2_covering_number,exact\n");
    for (i, &(b, n, exact)) in summary.profile.iter().enumerate() {
        let start = if i == 0 { 0.0 } else { b };
        let end = summary.profile.get(i + 1).map_or(class.diam(), |p| p.0);
        if end <= start {
            continue;
        }
        text.push_str(&format!("{start},{end},{n},{},{exact}\n", (n as f64).log2()));
    }
    w.write_all(text.as_bytes()).map_err(rt)?;
    w.flush().map_err(rt)?;

    let satisfied = d_onl <= bound + 1e-9;
    let row = json!({
        "cell": { "index": cell.index, "depth": cell.depth, "eps": cell.eps },
        "rows": class.n(),
        "points": class.m(),
        "c": c,
        "potential": summary.phi,
        "covering_number": n_eps,
        "online_dim_lower_bound": d_onl,
        "search_complete": resource.is_none(),
        "cumulative_loss": Value::Null,
        "paper_bound": bound,
        "bound_kind": "upper",
        "bound_satisfied": satisfied,
        "csv": csv_path.file_name().map(|f| f.to_string_lossy().into_owned()),
    });
    Ok(CellResult { row, ok: satisfied, resource })
}

fn run_bound_cell(cell: &Cell, out: &Path) -> Result<CellResult, RunError> {
    let d = cell.d as f64;
    let q = cell.q;
    let supercritical = (q > d).then(|| supercritical_constant(cell.d, q) * cell.l.powi(cell.d as i32));
    let critical = critical_bound(cell.l, cell.d, cell.t);
    let forced = (q < d).then(|| cell.l.powf(q) * (cell.t as f64).powf(1.0 - q / d));
    let mistakes = pointwise_mistake_bound(cell.l, cell.d, cell.eps);
    let cover = lipschitz_cover_bound(cell.l, cell.eps, cell.d, LIPSCHITZ_C0).map_err(rt)?;

    let quantities: Vec<(&str, Option<f64>)> = vec![
        ("supercritical_total_loss", supercritical),
        ("critical_total_loss", Some(critical)),
        ("subcritical_forced_loss", forced),
        ("pointwise_mistakes", Some(mistakes)),
        ("log2_sup_cover", Some(cover)),
    ];
    let csv_path = cell_path(out, cell.index, "csv");
    let mut text = String::from("quantity,value\n");
    for (name, v) in &quantities {
        text.push_str(&format!("{name},{}\n", v.map(|v| v.to_string()).unwrap_or_default()));
    }
    fs::write(&csv_path, text).map_err(rt)?;

    let (headline, kind) = if q > d {
        (supercritical, "upper")
    } else if q == d {
        (Some(critical), "upper")
    } else {
        (forced, "lower")
    };
    let mut row = json!({
        "cell": { "index": cell.index, "L": cell.l, "d": cell.d, "q": q, "T": cell.t, "eps": cell.eps },
        "cumulative_loss": Value::Null,
        "paper_bound": headline,
        "bound_kind": kind,
        "bound_satisfied": true,
        "csv": csv_path.file_name().map(|f| f.to_string_lossy().into_owned()),
    });
    for (name, v) in quantities {
        row[name] = json!(v);
    }
    Ok(CellResult { row, ok: true, resource: None })
}

/// Runs every cell, writes `summary.json`, and reports the worst outcome.
pub fn run(cfg: &Config, exec: Exec) -> Result<PathBuf, RunError> {
    let out = cfg.out.clone();
    fs::create_dir_all(&out).map_err(|e| RunError::Runtime(format!("{}: {e}", out.display())))?;
    let cells = cfg.cells();
    let results: Vec<Result<CellResult, RunError>> = match cfg.kind {
        Kind::Game => exec.map(cells, |c| run_game_cell(cfg, &c, &out)),
        Kind::Entropy => {
            let class = load_class(cfg.class.as_ref().expect("validated entropy config"))?;
            let summary = ClassSummary {
                phi: entropy_potential(&class, class.all()).map_err(rt)?,
                profile: covering_profile(&class, class.all()).map_err(rt)?,
            };
            exec.map(cells, |c| run_entropy_cell(&class, &summary, &c, &out))
        }
        Kind::BoundTable => exec.map(cells, |c| run_bound_cell(&c, &out)),
    };

    let mut rows = Vec::new();
    let mut violations = 0;
    let mut resource = None;
    for r in results {
        let r = r?;
        violations += usize::from(!r.ok);
        if resource.is_none() {
            resource = r.resource;
        }
        rows.push(r.row);
    }
    let summary = json!({
        "kind": cfg.kind,
        "seed": cfg.seed,
        "cells": rows,
        "all_bounds_satisfied": violations == 0,
    });
    let path = out.join("summary.json");
    write_json(&path, &summary)?;
    if let Some(m) = resource {
        return Err(RunError::Resource(m));
    }
    if violations > 0 {
        return Err(RunError::BoundViolation(violations));
    }
    Ok(path)
}
