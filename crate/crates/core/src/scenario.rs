//! Scenario files: TOML documents naming a model, a pair of endpoints and
//! optional solver settings. Every problem found while loading is reported,
//! each with the key path it came from.
//!
//! ```toml
//! name = "cos3-wall"
//!
//! [model]
//! kind = "builtin"            # or "split", "gpw"
//! builtin = "cos3-wall"
//!
//! [endpoints]
//! p = { x = [0, 0, 0], t = 0 }
//! q = { x = ["3*pi/2", 0, 0], t = 0 }
//!
//! [solver]
//! nodes = 64
//! ```
//!
//! Coordinates may be numbers or constant expressions. A split model takes
//! `dim`, `delta`, `beta`, optionally `metric` (d² entries, row-major) and
//! `potential`; a gpw model takes `dim`, `profile` (a field in x1..xd and u)
//! and optionally `metric`, with endpoints `{ x, u, v }`. Any model may list
//! `[[model.excluded]]` boxes with `lo` and `hi` corners.

use std::path::{Path, PathBuf};

use toml::{Table, Value};

use crate::action::EndpointPair;
use crate::connect::ConnectConfig;
use crate::error::{Error, Result};
use crate::fieldlang::FieldExpr;
use crate::geometry::{catalog, ExcludedRegion, MetricModel};
use crate::gpw::{GpwModel, GpwOptions, GpwPoint};

#[derive(Debug, Clone)]
pub enum ScenarioModel {
    Split(MetricModel),
    Gpw(GpwModel),
}

#[derive(Debug, Clone)]
pub enum ScenarioEndpoints {
    Split(EndpointPair),
    Gpw { p: GpwPoint, q: GpwPoint },
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub source: Option<PathBuf>,
    pub model: ScenarioModel,
    pub endpoints: ScenarioEndpoints,
    pub config: ConnectConfig,
    pub gpw: GpwOptions,
}

impl Scenario {
    pub fn dim(&self) -> usize {
        match &self.model {
            ScenarioModel::Split(m) => m.dim(),
            ScenarioModel::Gpw(m) => m.dim(),
        }
    }
}

#[derive(Default)]
struct Problems(Vec<String>);

impl Problems {
    fn push(&mut self, at: &str, msg: impl std::fmt::Display) {
        self.0.push(format!("{at}: {msg}"));
    }

    fn number(&mut self, at: &str, v: &Value) -> Option<f64> {
        match v {
            Value::Integer(i) => Some(*i as f64),
            Value::Float(f) => Some(*f),
            Value::String(s) => match FieldExpr::scalar(s, 1) {
                Ok(e) if e.variables().is_empty() => match e.eval_component(0, &[0.0]) {
                    Ok(x) if x.is_finite() => Some(x),
                    Ok(x) => {
                        self.push(at, format!("`{s}` evaluates to {x}"));
                        None
                    }
                    Err(err) => {
                        self.push(at, err);
                        None
                    }
                },
                Ok(_) => {
                    self.push(at, format!("`{s}` is not a constant"));
                    None
                }
                Err(err) => {
                    self.push(at, err);
                    None
                }
            },
            other => {
                self.push(at, format!("expected a number, found {}", other.type_str()));
                None
            }
        }
    }

    fn vector(&mut self, at: &str, v: &Value) -> Option<Vec<f64>> {
        let Some(items) = v.as_array() else {
            self.push(at, "expected an array of numbers");
            return None;
        };
        let out: Vec<Option<f64>> = items
            .iter()
            .enumerate()
            .map(|(i, x)| self.number(&format!("{at}[{i}]"), x))
            .collect();
        out.into_iter().collect()
    }

    fn string<'a>(&mut self, at: &str, v: &'a Value) -> Option<&'a str> {
        let s = v.as_str();
        if s.is_none() {
            self.push(at, format!("expected a string, found {}", v.type_str()));
        }
        s
    }

    fn unknown_keys(&mut self, at: &str, table: &Table, known: &[&str]) {
        for key in table.keys() {
            if !known.contains(&key.as_str()) {
                let path = if at.is_empty() { key.clone() } else { format!("{at}.{key}") };
                self.push(&path, format!("unknown key (expected one of: {})", known.join(", ")));
            }
        }
    }
}

fn table<'a>(problems: &mut Problems, at: &str, parent: &'a Table, key: &str) -> Option<&'a Table> {
    match parent.get(key) {
        Some(Value::Table(t)) => Some(t),
        Some(other) => {
            problems.push(at, format!("expected a table, found {}", other.type_str()));
            None
        }
        None => {
            problems.push(at, "missing");
            None
        }
    }
}

fn usize_of(problems: &mut Problems, at: &str, v: &Value) -> Option<usize> {
    match v.as_integer() {
        Some(i) if i >= 0 => Some(i as usize),
        _ => {
            problems.push(at, "expected a non-negative integer");
            None
        }
    }
}

fn load_model(problems: &mut Problems, model: &Table) -> Option<ScenarioModel> {
    let kind = match model.get("kind") {
        Some(v) => problems.string("model.kind", v)?,
        None => {
            problems.push("model.kind", "missing");
            return None;
        }
    };
    let dim = model.get("dim").and_then(|v| usize_of(problems, "model.dim", v));
    let field = |problems: &mut Problems, key: &str| -> Option<String> {
        let at = format!("model.{key}");
        match model.get(key) {
            Some(v) => problems.string(&at, v).map(str::to_string),
            None => None,
        }
    };
    let metric = |problems: &mut Problems, base: MetricModel| -> Option<MetricModel> {
        let Some(v) = model.get("metric") else {
            return Some(base);
        };
        let Some(items) = v.as_array() else {
            problems.push("model.metric", "expected an array of expressions");
            return None;
        };
        let sources: Vec<Option<&str>> = items
            .iter()
            .enumerate()
            .map(|(i, x)| problems.string(&format!("model.metric[{i}]"), x))
            .collect();
        let sources: Vec<&str> = sources.into_iter().collect::<Option<_>>()?;
        match base.with_metric_sources(&sources) {
            Ok(m) => Some(m),
            Err(e) => {
                problems.push("model.metric", e);
                None
            }
        }
    };

    let built: Option<ScenarioModel> = match kind {
        "builtin" => {
            problems.unknown_keys("model", model, &["kind", "builtin", "dim", "excluded"]);
            let name = field(problems, "builtin");
            match name {
                None => {
                    problems.push("model.builtin", "missing");
                    None
                }
                Some(name) => match catalog::by_name(&name, dim) {
                    Ok(m) => Some(ScenarioModel::Split(m)),
                    Err(e) => {
                        problems.push("model.builtin", e);
                        None
                    }
                },
            }
        }
        "split" => {
            problems.unknown_keys(
                "model",
                model,
                &["kind", "dim", "delta", "beta", "metric", "potential", "excluded"],
            );
            let Some(dim) = dim else {
                problems.push("model.dim", "missing");
                return None;
            };
            let delta = field(problems, "delta");
            let beta = field(problems, "beta");
            if delta.is_none() {
                problems.push("model.delta", "missing");
            }
            if beta.is_none() {
                problems.push("model.beta", "missing");
            }
            let parsed_delta = delta.and_then(|d| FieldExpr::vector(&d, dim).map_err(|e| problems.push("model.delta", e)).ok());
            let parsed_beta = beta.and_then(|b| FieldExpr::scalar(&b, dim).map_err(|e| problems.push("model.beta", e)).ok());
            let base = match MetricModel::new(dim, parsed_delta?, parsed_beta?) {
                Ok(m) => m.named("split"),
                Err(e) => {
                    problems.push("model", e);
                    return None;
                }
            };
            let mut base = metric(problems, base)?;
            if let Some(src) = field(problems, "potential") {
                match FieldExpr::scalar(&src, dim) {
                    Ok(e) => base = base.with_potential(e),
                    Err(e) => problems.push("model.potential", e),
                }
            }
            Some(ScenarioModel::Split(base))
        }
        "gpw" => {
            problems.unknown_keys("model", model, &["kind", "dim", "profile", "metric", "excluded"]);
            let Some(dim) = dim else {
                problems.push("model.dim", "missing");
                return None;
            };
            let Some(profile) = field(problems, "profile") else {
                problems.push("model.profile", "missing");
                return None;
            };
            let profile = FieldExpr::scalar(&profile, dim)
                .map_err(|e| problems.push("model.profile", e))
                .ok()?;
            let zero = vec!["0"; dim].join(", ");
            let base = match MetricModel::from_sources(dim, &format!("[{zero}]"), "0") {
                Ok(m) => m.named("gpw"),
                Err(e) => {
                    problems.push("model.dim", e);
                    return None;
                }
            };
            let base = metric(problems, base)?;
            match GpwModel::new(base, profile) {
                Ok(m) => Some(ScenarioModel::Gpw(m)),
                Err(e) => {
                    problems.push("model.profile", e);
                    None
                }
            }
        }
        other => {
            problems.push("model.kind", format!("unknown kind `{other}` (expected split, gpw or builtin)"));
            None
        }
    };
    let mut built = built?;
    if let Some(regions) = model.get("excluded") {
        let Some(items) = regions.as_array() else {
            problems.push("model.excluded", "expected an array of tables");
            return None;
        };
        for (i, item) in items.iter().enumerate() {
            let at = format!("model.excluded[{i}]");
            let Some(t) = item.as_table() else {
                problems.push(&at, "expected a table with lo and hi");
                continue;
            };
            problems.unknown_keys(&at, t, &["lo", "hi"]);
            let lo = t.get("lo").and_then(|v| problems.vector(&format!("{at}.lo"), v));
            let hi = t.get("hi").and_then(|v| problems.vector(&format!("{at}.hi"), v));
            let (Some(lo), Some(hi)) = (lo, hi) else {
                problems.push(&at, "needs both lo and hi");
                continue;
            };
            let region = match ExcludedRegion::new(lo, hi) {
                Ok(r) => r,
                Err(e) => {
                    problems.push(&at, e);
                    continue;
                }
            };
            let result = match &mut built {
                ScenarioModel::Split(m) => m.clone().with_excluded(region).map(|next| *m = next),
                ScenarioModel::Gpw(g) => g.base.clone().with_excluded(region).map(|next| g.base = next),
            };
            if let Err(e) = result {
                problems.push(&at, e);
            }
        }
    }
    Some(built)
}

fn load_point(problems: &mut Problems, at: &str, v: Option<&Value>, gpw: bool) -> Option<(Vec<f64>, f64, f64)> {
    let Some(v) = v else {
        problems.push(at, "missing");
        return None;
    };
    let Some(t) = v.as_table() else {
        problems.push(at, "expected a table");
        return None;
    };
    let keys: &[&str] = if gpw { &["x", "u", "v"] } else { &["x", "t"] };
    problems.unknown_keys(at, t, keys);
    let mut get = |key: &str| -> Option<&Value> {
        let value = t.get(key);
        if value.is_none() {
            problems.push(&format!("{at}.{key}"), "missing");
        }
        value
    };
    let x = get("x");
    let second = get(keys[1]);
    let third = if gpw { get("v") } else { None };
    let x = x.and_then(|v| problems.vector(&format!("{at}.x"), v));
    let a = second.and_then(|v| problems.number(&format!("{at}.{}", keys[1]), v));
    let b = if gpw {
        third.and_then(|v| problems.number(&format!("{at}.v"), v))
    } else {
        Some(0.0)
    };
    Some((x?, a?, b?))
}

fn load_solver(problems: &mut Problems, solver: Option<&Table>) -> (ConnectConfig, GpwOptions) {
    let mut config = ConnectConfig::default();
    let mut gpw = GpwOptions::default();
    let Some(solver) = solver else {
        return (config, gpw);
    };
    for (key, value) in solver {
        let at = format!("solver.{key}");
        match key.as_str() {
            "nodes" => config.nodes = usize_of(problems, &at, value).unwrap_or(config.nodes),
            "k_max" => config.k_max = usize_of(problems, &at, value).map_or(config.k_max, |v| v as u32),
            "grid" => config.grid = usize_of(problems, &at, value).unwrap_or(config.grid),
            "seed" => config.seed = usize_of(problems, &at, value).map_or(config.seed, |v| v as u64),
            "multistart" => config.multistart = usize_of(problems, &at, value).unwrap_or(config.multistart),
            "max_iter" => config.max_iter = usize_of(problems, &at, value).unwrap_or(config.max_iter),
            "n_start" => config.n_start = problems.number(&at, value).unwrap_or(config.n_start),
            "tol_grad" => config.tol_grad = problems.number(&at, value).unwrap_or(config.tol_grad),
            "tol_lim" => config.tol_lim = problems.number(&at, value).unwrap_or(config.tol_lim),
            "tol_bvp" => {
                config.tol_bvp = problems.number(&at, value).unwrap_or(config.tol_bvp);
                gpw.tol_bvp = config.tol_bvp;
            }
            _ => problems.push(&at, "unknown solver setting"),
        }
    }
    (config, gpw)
}

/// Parse and validate scenario text. `name` is used when the text has none.
pub fn parse_scenario(text: &str, name: &str) -> Result<Scenario> {
    let doc: Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::Scenario(vec![format!("syntax: {e}")]))?;
    let mut problems = Problems::default();
    problems.unknown_keys("", &doc, &["name", "model", "endpoints", "solver"]);
    let name = match doc.get("name") {
        Some(v) => problems.string("name", v).unwrap_or(name).to_string(),
        None => name.to_string(),
    };
    let model = table(&mut problems, "model", &doc, "model").and_then(|m| load_model(&mut problems, m));
    let solver = match doc.get("solver") {
        Some(_) => table(&mut problems, "solver", &doc, "solver"),
        None => None,
    };
    let (config, gpw) = load_solver(&mut problems, solver);
    if let Err(Error::Scenario(list)) = config.validate() {
        for p in list {
            problems.push("solver", p);
        }
    }
    let is_gpw = match &model {
        Some(m) => matches!(m, ScenarioModel::Gpw(_)),
        None => doc
            .get("model")
            .and_then(|m| m.get("kind"))
            .and_then(Value::as_str)
            == Some("gpw"),
    };
    // The dimension endpoints are checked against, known even when the fields fail to parse.
    let dim = match &model {
        Some(ScenarioModel::Split(m)) => Some(m.dim()),
        Some(ScenarioModel::Gpw(g)) => Some(g.dim()),
        None => doc
            .get("model")
            .and_then(|m| m.get("dim"))
            .and_then(Value::as_integer)
            .and_then(|d| usize::try_from(d).ok()),
    };
    let points = table(&mut problems, "endpoints", &doc, "endpoints").map(|e| {
        problems.unknown_keys("endpoints", e, &["p", "q"]);
        let p = load_point(&mut problems, "endpoints.p", e.get("p"), is_gpw);
        let q = load_point(&mut problems, "endpoints.q", e.get("q"), is_gpw);
        (p, q)
    });
    if let Some((p, q)) = &points {
        for (at, point) in [("endpoints.p.x", p), ("endpoints.q.x", q)] {
            let Some(x) = point.as_ref().map(|pt| &pt.0) else { continue };
            if let Some(dim) = dim.filter(|d| x.len() != *d) {
                problems.push(at, format!("has {} coordinates, model dimension is {dim}", x.len()));
                continue;
            }
            let base = match &model {
                Some(ScenarioModel::Split(m)) => m,
                Some(ScenarioModel::Gpw(g)) => &g.base,
                None => continue,
            };
            if let Err(e) = base.check_point(x) {
                problems.push(at, e);
            }
        }
    }

    let mut checked = None;
    if let (Some(_), Some((Some(p), Some(q)))) = (&model, points) {
        checked = Some(if is_gpw {
            ScenarioEndpoints::Gpw {
                p: GpwPoint::new(p.0, p.1, p.2),
                q: GpwPoint::new(q.0, q.1, q.2),
            }
        } else {
            ScenarioEndpoints::Split(EndpointPair {
                xp: p.0,
                tp: p.1,
                xq: q.0,
                tq: q.1,
            })
        });
    }
    if !problems.0.is_empty() {
        return Err(Error::Scenario(problems.0));
    }
    Ok(Scenario {
        name,
        source: None,
        model: model.expect("validated"),
        endpoints: checked.expect("validated"),
        config,
        gpw,
    })
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario");
    let mut scenario = parse_scenario(&text, stem).map_err(|e| match e {
        Error::Scenario(list) => Error::Scenario(
            list.into_iter()
                .map(|p| format!("{}: {p}", path.display()))
                .collect(),
        ),
        other => other,
    })?;
    scenario.source = Some(path.to_path_buf());
    Ok(scenario)
}
