//! Command-line front end: argument parsing, dispatch and output files.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::action::{self, DiscretePath};
use crate::connect::{self, classify_pairing, ConditionII, ConnectConfig, ConnectVerdict, Diagnostics, LimitRecord};
use crate::error::{Error, Result};
use crate::geodesic::{self, System};
use crate::gpw::{self, GpwGeodesic};
use crate::obstruction::{self, GridSearch, ObstructionCertificate, PotentialKind, SearchConfig};
use crate::scenario::{load_scenario, Scenario, ScenarioEndpoints, ScenarioModel};
use crate::spacetime::SpacetimeModel;
use crate::tol;

#[derive(Debug, Parser)]
#[command(name = "geoconnect", version, about = "Geodesic connection in split spacetimes and plane waves")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the full pipeline and write a verdict with path samples.
    Connect(Common),
    /// Check a path file against the geodesic equations and conservation laws.
    Verify {
        #[command(flatten)]
        common: Common,
        /// CSV with columns s, x1..xd, t.
        #[arg(long)]
        path: PathBuf,
    },
    /// Run only the structural obstruction search.
    Obstruct(Common),
    /// Connect two points of a plane-wave scenario.
    GpwConnect(Common),
    /// Per-n diagnostics across the whole perturbation schedule.
    Sweep(Common),
    /// Arrival time of the future lightlike lift of a path.
    Arrival {
        #[command(flatten)]
        common: Common,
        /// CSV with columns s, x1..xd (a t column is ignored).
        #[arg(long)]
        path: PathBuf,
        /// Perturbation parameter n (β + 1/n); required when β vanishes.
        #[arg(long)]
        n: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Csv,
    GnuplotData,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Scenario files.
    pub scenarios: Vec<PathBuf>,
    /// Additional scenario file (may be repeated).
    #[arg(long = "scenario")]
    pub scenario_flags: Vec<PathBuf>,
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long)]
    pub n_start: Option<f64>,
    #[arg(long)]
    pub k_max: Option<u32>,
    #[arg(long)]
    pub tol_grad: Option<f64>,
    #[arg(long)]
    pub tol_lim: Option<f64>,
    #[arg(long)]
    pub tol_bvp: Option<f64>,
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Scenarios to run in parallel.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Output directory; each scenario writes into a subdirectory named after it.
    #[arg(long, default_value = "geoconnect-out")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Emit::Csv)]
    pub emit: Emit,
}

impl Common {
    fn apply(&self, s: &mut Scenario) -> Result<()> {
        let c = &mut s.config;
        if let Some(v) = self.nodes {
            c.nodes = v;
        }
        if let Some(v) = self.n_start {
            c.n_start = v;
        }
        if let Some(v) = self.k_max {
            c.k_max = v;
        }
        if let Some(v) = self.tol_grad {
            c.tol_grad = v;
        }
        if let Some(v) = self.tol_lim {
            c.tol_lim = v;
        }
        if let Some(v) = self.tol_bvp {
            c.tol_bvp = v;
            s.gpw.tol_bvp = v;
        }
        if let Some(v) = self.grid {
            c.grid = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        c.validate()
    }

    fn files(&self) -> Vec<PathBuf> {
        self.scenarios.iter().chain(&self.scenario_flags).cloned().collect()
    }
}

/// Parse arguments, run every scenario and return the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    run(&cli.command)
}

fn common(command: &Command) -> &Common {
    match command {
        Command::Connect(c) | Command::Obstruct(c) | Command::GpwConnect(c) | Command::Sweep(c) => c,
        Command::Verify { common, .. } | Command::Arrival { common, .. } => common,
    }
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Connect(_) => "connect",
        Command::Verify { .. } => "verify",
        Command::Obstruct(_) => "obstruct",
        Command::GpwConnect(_) => "gpw-connect",
        Command::Sweep(_) => "sweep",
        Command::Arrival { .. } => "arrival",
    }
}

pub fn run(command: &Command) -> i32 {
    let opts = common(command);
    let files = opts.files();
    if files.is_empty() {
        eprintln!("error: no scenario given");
        return 1;
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(opts.jobs.max(1)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let results: Vec<(PathBuf, Result<(String, i32)>)> = pool.install(|| {
        files
            .par_iter()
            .map(|f| (f.clone(), run_file(command, opts, f)))
            .collect()
    });
    let mut code = 0;
    let mut failed = false;
    for (file, result) in results {
        match result {
            Ok((summary, c)) => {
                println!("{summary}");
                code = code.max(c);
            }
            Err(e) => {
                eprintln!("error: {}: {e}", file.display());
                failed = true;
            }
        }
    }
    if failed {
        1
    } else {
        code
    }
}

fn run_file(command: &Command, opts: &Common, file: &Path) -> Result<(String, i32)> {
    let mut scenario = load_scenario(file)?;
    opts.apply(&mut scenario)?;
    let dir = opts.out.join(&scenario.name);
    fs::create_dir_all(&dir).map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;
    let out = Output { dir, emit: opts.emit };
    let (verdict, code) = match command {
        Command::Connect(_) => match &scenario.model {
            ScenarioModel::Gpw(_) => run_gpw(&scenario, &out, "connect")?,
            ScenarioModel::Split(_) => run_connect(&scenario, &out)?,
        },
        Command::GpwConnect(_) => run_gpw(&scenario, &out, "gpw-connect")?,
        Command::Obstruct(_) => run_obstruct(&scenario, &out)?,
        Command::Sweep(_) => run_sweep(&scenario, &out)?,
        Command::Verify { path, .. } => run_verify(&scenario, &out, path)?,
        Command::Arrival { path, n, .. } => run_arrival(&scenario, &out, path, *n)?,
    };
    Ok((
        format!(
            "{}: {} {verdict} (exit {code}) -> {}",
            scenario.name,
            command_name(command),
            out.dir.display()
        ),
        code,
    ))
}

struct Output {
    dir: PathBuf,
    emit: Emit,
}

impl Output {
    fn write(&self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| Error::io(format!("writing {}", path.display()), e))
    }

    fn toml<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        let text = toml::to_string_pretty(value).map_err(|e| Error::Precondition(format!("serializing {name}: {e}")))?;
        self.write(name, &text)
    }

    /// A numeric table as CSV (header row) or whitespace-separated gnuplot data.
    fn table(&self, stem: &str, header: &[String], rows: &[Vec<f64>]) -> Result<()> {
        let mut text = String::new();
        let (name, sep) = match self.emit {
            Emit::Csv => {
                text.push_str(&header.join(","));
                (format!("{stem}.csv"), ",")
            }
            Emit::GnuplotData => {
                text.push_str("# ");
                text.push_str(&header.join(" "));
                (format!("{stem}.dat"), " ")
            }
        };
        text.push('\n');
        for row in rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            text.push_str(&cells.join(sep));
            text.push('\n');
        }
        self.write(&name, &text)
    }
}

fn split_parts(s: &Scenario) -> Result<(&crate::geometry::MetricModel, &action::EndpointPair)> {
    match (&s.model, &s.endpoints) {
        (ScenarioModel::Split(m), ScenarioEndpoints::Split(e)) => Ok((m, e)),
        _ => Err(Error::Precondition(format!(
            "scenario `{}` is a plane wave; use gpw-connect",
            s.name
        ))),
    }
}

#[derive(Serialize)]
struct GeodesicSummary {
    action: f64,
    energy: f64,
    killing: f64,
    energy_drift: f64,
    killing_drift: f64,
    endpoint_error: f64,
    residual: f64,
    condition_ii: ConditionII,
    initial_velocity: Vec<f64>,
    initial_tdot: f64,
    samples: usize,
}

#[derive(Serialize)]
struct ModeSummary {
    mode: &'static str,
    applicable: bool,
    reachable: bool,
    visited: usize,
}

#[derive(Serialize)]
struct SearchSummary {
    shape: Vec<usize>,
    spacing: Vec<f64>,
    modes: Vec<ModeSummary>,
}

impl From<&GridSearch> for SearchSummary {
    fn from(g: &GridSearch) -> Self {
        SearchSummary {
            shape: g.shape.clone(),
            spacing: g.spacing.clone(),
            modes: g
                .modes
                .iter()
                .map(|m| ModeSummary {
                    mode: m.mode.name(),
                    applicable: m.applicable,
                    reachable: m.reachable,
                    visited: m.visited,
                })
                .collect(),
        }
    }
}

#[derive(Serialize)]
struct CertificateSummary {
    potential: String,
    potential_kind: PotentialKind,
    /// 1-based coordinates spanned by the grid.
    axes: Vec<usize>,
    resolution: usize,
    epsilon: f64,
    lambda_start: f64,
    lambda_goal: f64,
    all_modes_unreachable: bool,
    stable_under_refinement: bool,
    coarse: SearchSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    refined: Option<SearchSummary>,
}

impl From<&ObstructionCertificate> for CertificateSummary {
    fn from(c: &ObstructionCertificate) -> Self {
        CertificateSummary {
            potential: c.potential.clone(),
            potential_kind: c.potential_kind,
            axes: c.axes.iter().map(|a| a + 1).collect(),
            resolution: c.resolution,
            epsilon: c.epsilon,
            lambda_start: c.lambda_start,
            lambda_goal: c.lambda_goal,
            all_modes_unreachable: c.coarse.all_unreachable(),
            stable_under_refinement: c.certifies(),
            coarse: (&c.coarse).into(),
            refined: c.refined.as_ref().map(Into::into),
        }
    }
}

#[derive(Serialize)]
struct DiagnosticsSummary {
    reason: String,
    notes: Vec<String>,
    /// The convergence test is a heuristic stopping rule, not a proof of convergence.
    heuristic_stopping_rule: bool,
    records: Vec<LimitRecord>,
}

impl From<&Diagnostics> for DiagnosticsSummary {
    fn from(d: &Diagnostics) -> Self {
        DiagnosticsSummary {
            reason: d.reason.clone(),
            notes: d.notes.clone(),
            heuristic_stopping_rule: true,
            records: d.records.clone(),
        }
    }
}

#[derive(Serialize)]
struct VerdictFile<'a> {
    scenario: &'a str,
    command: &'a str,
    verdict: &'a str,
    exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    geodesic: Option<GeodesicSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    plane_wave: Option<GpwSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<CertificateSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    diagnostics: Option<DiagnosticsSummary>,
    config: ConnectConfig,
}

fn path_header(dim: usize, tail: &[&str]) -> Vec<String> {
    std::iter::once("s".to_string())
        .chain((1..=dim).map(|k| format!("x{k}")))
        .chain(tail.iter().map(|s| s.to_string()))
        .collect()
}

fn run_connect(s: &Scenario, out: &Output) -> Result<(&'static str, i32)> {
    let (model, pair) = split_parts(s)?;
    let verdict = connect::connect(model, pair, &s.config)?;
    let mut file = VerdictFile {
        scenario: &s.name,
        command: "connect",
        verdict: verdict.tag(),
        exit_code: verdict.exit_code(),
        geodesic: None,
        plane_wave: None,
        certificate: None,
        diagnostics: None,
        config: s.config,
    };
    match &verdict {
        ConnectVerdict::Geodesic(geo) => {
            let sol = &geo.solution;
            file.geodesic = Some(GeodesicSummary {
                action: geo.action,
                energy: sol.energy,
                killing: sol.killing,
                energy_drift: sol.energy_drift,
                killing_drift: sol.killing_drift,
                endpoint_error: sol.endpoint_error,
                residual: sol.residual,
                condition_ii: geo.condition_ii,
                initial_velocity: sol.start().xdot.clone(),
                initial_tdot: sol.start().tdot,
                samples: sol.samples.len(),
            });
            file.diagnostics = Some((&geo.diagnostics).into());
            let rows: Vec<Vec<f64>> = sol
                .samples
                .iter()
                .map(|smp| {
                    std::iter::once(smp.s)
                        .chain(smp.state.x.iter().copied())
                        .chain([smp.state.t])
                        .collect()
                })
                .collect();
            out.table("path", &path_header(model.dim(), &["t"]), &rows)?;
        }
        ConnectVerdict::Obstructed { certificate, diagnostics } => {
            file.certificate = Some(certificate.as_ref().into());
            file.diagnostics = Some(diagnostics.into());
        }
        ConnectVerdict::Inconclusive(d) => file.diagnostics = Some(d.into()),
    }
    out.toml("verdict.toml", &file)?;
    Ok((verdict.tag(), verdict.exit_code()))
}

#[derive(Serialize)]
struct GpwSummary {
    energy: f64,
    energy_drift: f64,
    killing: f64,
    killing_drift: f64,
    endpoint_error: f64,
    residual: f64,
    condition_ii: ConditionII,
    jacobian_condition: f64,
    newton_iterations: usize,
}

fn run_gpw(s: &Scenario, out: &Output, command: &str) -> Result<(&'static str, i32)> {
    let (ScenarioModel::Gpw(model), ScenarioEndpoints::Gpw { p, q }) = (&s.model, &s.endpoints) else {
        return Err(Error::Precondition(format!("scenario `{}` is not a plane wave", s.name)));
    };
    let verdict: ConnectVerdict<GpwGeodesic> = gpw::gpw_connect(model, p, q, s.gpw)?;
    let mut file = VerdictFile {
        scenario: &s.name,
        command,
        verdict: verdict.tag(),
        exit_code: verdict.exit_code(),
        geodesic: None,
        plane_wave: None,
        certificate: None,
        diagnostics: verdict.diagnostics().map(Into::into),
        config: s.config,
    };
    if let ConnectVerdict::Geodesic(geo) = &verdict {
        file.plane_wave = Some(GpwSummary {
            energy: geo.energy,
            energy_drift: geo.energy_drift,
            killing: geo.killing,
            killing_drift: geo.killing_drift,
            endpoint_error: geo.endpoint_error,
            residual: geo.residual,
            condition_ii: geo.condition_ii,
            jacobian_condition: geo.jacobian_condition,
            newton_iterations: geo.iterations,
        });
        let rows: Vec<Vec<f64>> = geo
            .samples
            .iter()
            .map(|smp| {
                std::iter::once(smp.s)
                    .chain(smp.point.x.iter().copied())
                    .chain([smp.point.u, smp.point.v])
                    .collect()
            })
            .collect();
        out.table("path", &path_header(model.dim(), &["u", "v"]), &rows)?;
    }
    out.toml("verdict.toml", &file)?;
    Ok((verdict.tag(), verdict.exit_code()))
}

fn run_obstruct(s: &Scenario, out: &Output) -> Result<(&'static str, i32)> {
    let (model, pair) = split_parts(s)?;
    let search = SearchConfig {
        resolution: s.config.grid,
        ..Default::default()
    };
    #[derive(Serialize)]
    struct ObstructFile<'a> {
        scenario: &'a str,
        result: &'a str,
        exit_code: i32,
        #[serde(skip_serializing_if = "Option::is_none")]
        certificate: Option<CertificateSummary>,
    }
    let cert = obstruction::certify(model, &pair.xp, &pair.xq, search)?;
    let (result, code) = match &cert {
        Some(c) if c.certifies() => ("Obstructed", 2),
        Some(_) => ("Reachable", 0),
        None => ("NotApplicable", 3),
    };
    if let Some(w) = cert.as_ref().and_then(|c| c.witness()) {
        let rows: Vec<Vec<f64>> = (0..w.node_count())
            .map(|i| std::iter::once(i as f64 * w.h()).chain(w.node(i).iter().copied()).collect())
            .collect();
        out.table("witness", &path_header(model.dim(), &[]), &rows)?;
    }
    out.toml(
        "certificate.toml",
        &ObstructFile {
            scenario: &s.name,
            result,
            exit_code: code,
            certificate: cert.as_ref().map(Into::into),
        },
    )?;
    Ok((result, code))
}

fn run_sweep(s: &Scenario, out: &Output) -> Result<(&'static str, i32)> {
    let (model, pair) = split_parts(s)?;
    let records = connect::sweep(model, pair, &s.config)?;
    let header: Vec<String> = [
        "n",
        "Jn",
        "xdot_l2",
        "tdot_l2",
        "h1_gap",
        "residual",
        "pairing_min",
        "pairing_max",
    ]
    .iter()
    .map(|h| h.to_string())
    .collect();
    let rows: Vec<Vec<f64>> = records
        .iter()
        .map(|r| {
            vec![
                r.n,
                r.jn,
                r.xdot_l2,
                r.tdot_l2,
                r.h1_gap.unwrap_or(f64::NAN),
                r.residual,
                r.pairing_min,
                r.pairing_max,
            ]
        })
        .collect();
    out.table("sweep", &header, &rows)?;
    Ok(("Swept", 0))
}

/// Read a numeric table written by [`Output::table`] (CSV or gnuplot layout).
pub fn read_table(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header_line = lines
        .next()
        .ok_or_else(|| Error::Precondition(format!("{} is empty", path.display())))?;
    let split = |l: &str| -> Vec<String> {
        l.trim_start_matches('#')
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(str::to_string)
            .collect()
    };
    let header = split(header_line);
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let row = split(line)
            .iter()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|e| Error::Precondition(format!("{} line {}: {e}", path.display(), i + 2)))?;
        if row.len() != header.len() {
            return Err(Error::Precondition(format!(
                "{} line {}: expected {} columns, found {}",
                path.display(),
                i + 2,
                header.len(),
                row.len()
            )));
        }
        rows.push(row);
    }
    Ok((header, rows))
}

/// Load a path file with columns s, x1..xd and optionally t.
pub fn read_path(path: &Path, dim: usize) -> Result<DiscretePath> {
    let (header, rows) = read_table(path)?;
    let has_t = header.len() == dim + 2 && header[dim + 1] == "t";
    if header.len() != dim + 1 && !has_t {
        return Err(Error::Precondition(format!(
            "{}: expected columns s, x1..x{dim}[, t], found {}",
            path.display(),
            header.join(", ")
        )));
    }
    let nodes: Vec<Vec<f64>> = rows.iter().map(|r| r[1..=dim].to_vec()).collect();
    let m = rows.len().saturating_sub(1);
    for (i, r) in rows.iter().enumerate() {
        if m == 0 || (r[0] - i as f64 / m as f64).abs() > 1e-9 {
            return Err(Error::Precondition(format!(
                "{}: parameter column must be uniform on [0, 1] (row {})",
                path.display(),
                i + 1
            )));
        }
    }
    let p = DiscretePath::from_nodes(&nodes)?;
    if has_t {
        p.with_times(rows.iter().map(|r| r[dim + 1]).collect())
    } else {
        Ok(p)
    }
}

#[derive(Serialize)]
struct VerifyFile<'a> {
    scenario: &'a str,
    path: String,
    segments: usize,
    system: &'a str,
    residual: f64,
    pairing_min: f64,
    pairing_max: f64,
    condition_ii: ConditionII,
    energy_min: f64,
    energy_max: f64,
    passed: bool,
}

fn run_verify(s: &Scenario, out: &Output, file: &Path) -> Result<(&'static str, i32)> {
    let (model, _) = split_parts(s)?;
    let path = read_path(file, model.dim())?;
    if path.times().is_none() {
        return Err(Error::Precondition("verify needs a t column".into()));
    }
    let st = SpacetimeModel::new(model);
    let system = if model.is_lightlike() { System::Lightlike } else { System::Stationary };
    let residual = geodesic::residual(&st, &path, system)?;
    let pairings = action::killing_pairings(&st, &path)?;
    let tdot = path.time_velocities().expect("checked above");
    let mut energies = Vec::with_capacity(path.segments());
    for (i, td) in tdot.iter().enumerate() {
        let v: Vec<f64> = path.velocity(i).iter().copied().collect();
        energies.push(st.lorentz_inner(&path.midpoint(i), &v, *td, &v, *td)?);
    }
    let condition = classify_pairing(&pairings);
    let passed = residual <= tol::TOL_LIMIT_RESIDUAL && condition != ConditionII::SignChange;
    let fold = |v: &[f64]| {
        (
            v.iter().copied().fold(f64::INFINITY, f64::min),
            v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        )
    };
    let (pmin, pmax) = fold(&pairings);
    let (emin, emax) = fold(&energies);
    out.toml(
        "verify.toml",
        &VerifyFile {
            scenario: &s.name,
            path: file.display().to_string(),
            segments: path.segments(),
            system: if system == System::Lightlike { "lightlike" } else { "stationary" },
            residual,
            pairing_min: pmin,
            pairing_max: pmax,
            condition_ii: condition,
            energy_min: emin,
            energy_max: emax,
            passed,
        },
    )?;
    Ok((if passed { "Verified" } else { "Rejected" }, if passed { 0 } else { 3 }))
}

fn run_arrival(s: &Scenario, out: &Output, file: &Path, n: Option<f64>) -> Result<(&'static str, i32)> {
    let (model, pair) = split_parts(s)?;
    let path = read_path(file, model.dim())?;
    let path = DiscretePath::from_flat(path.dim(), path.flat().to_vec())?;
    let st = match n {
        Some(n) => SpacetimeModel::perturbed(model, n)?,
        None => SpacetimeModel::new(model),
    };
    let (arrival, lifted) = action::arrival_time(&st, &path, pair.tp)?;
    #[derive(Serialize)]
    struct ArrivalFile<'a> {
        scenario: &'a str,
        path: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        n: Option<f64>,
        t_start: f64,
        arrival_time: f64,
    }
    out.toml(
        "arrival.toml",
        &ArrivalFile {
            scenario: &s.name,
            path: file.display().to_string(),
            n,
            t_start: pair.tp,
            arrival_time: arrival,
        },
    )?;
    let times = lifted.times().expect("lift has times");
    let rows: Vec<Vec<f64>> = (0..lifted.node_count())
        .map(|i| {
            std::iter::once(i as f64 * lifted.h())
                .chain(lifted.node(i).iter().copied())
                .chain([times[i]])
                .collect()
        })
        .collect();
    out.table("arrival", &path_header(model.dim(), &["t"]), &rows)?;
    Ok(("Computed", 0))
}
