use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use normspace::bm::{bm_distance, isometry_group, symmetry_break};
use normspace::qmetric::{from_log_profile, metric_axioms_report, range_metric, to_log_profile};
use normspace::qspace::{self, limit_of_sequence, space_axioms_report};
use normspace::quasinorm::polyhedral_approx;
use normspace::schema::{spec_from_json, spec_to_json};
use normspace::{khare_distance, make_grid, NormSpec, ProjectiveGrid};

use crate::exit::{CliError, COMPUTATION, DIMENSION, OK, PROPERTY_FAILURE};
use crate::plot;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub grid: Option<usize>,
    pub seed: u64,
    pub polish: bool,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn resolution(&self, n: usize) -> usize {
        self.grid.unwrap_or(if n == 2 { 720 } else { 2000 })
    }

    fn grid(&self, n: usize) -> Result<ProjectiveGrid, CliError> {
        Ok(make_grid(n, self.resolution(n), self.seed)?)
    }

    fn json_only(&self) -> Result<(), CliError> {
        match self.format {
            None | Some(Format::Json) => Ok(()),
            Some(f) => Err(CliError::input(format!(
                "format {f:?} is only supported by plot"
            ))),
        }
    }
}

/// What a command prints and the exit code it ends with.
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { stdout, code: OK }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn load(path: &Path) -> Result<NormSpec, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    spec_from_json(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn load_all(paths: &[PathBuf]) -> Result<Vec<NormSpec>, CliError> {
    let specs: Vec<NormSpec> = paths.iter().map(|p| load(p)).collect::<Result<_, _>>()?;
    if let Some(first) = specs.first() {
        for (s, p) in specs.iter().zip(paths) {
            if s.dim() != first.dim() {
                return Err(CliError {
                    code: DIMENSION,
                    message: format!(
                        "dimension mismatch: {} has dimension {}, expected {}",
                        p.display(),
                        s.dim(),
                        first.dim()
                    ),
                });
            }
        }
    }
    Ok(specs)
}

fn write_out(cfg: &RunConfig, text: &str) -> Result<Outcome, CliError> {
    match &cfg.out {
        Some(path) => {
            fs::write(path, text)
                .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))?;
            Ok(Outcome::ok(String::new()))
        }
        None => Ok(Outcome::ok(text.to_string())),
    }
}

fn spec_value(spec: &NormSpec) -> Value {
    serde_json::from_str(&spec_to_json(spec)).expect("spec documents are valid JSON")
}

pub fn dist(cfg: &RunConfig, x: &Path, y: &Path) -> Result<Outcome, CliError> {
    cfg.json_only()?;
    let specs = load_all(&[x.to_path_buf(), y.to_path_buf()])?;
    let grid = cfg.grid(specs[0].dim())?;
    let w = khare_distance(&specs[0], &specs[1], &grid, cfg.polish)?;
    Ok(Outcome::ok(to_json(&w)))
}

pub fn eval(cfg: &RunConfig, spec: &Path, at: &[String]) -> Result<Outcome, CliError> {
    cfg.json_only()?;
    let s = load(spec)?;
    let mut values = Vec::with_capacity(at.len());
    for text in at {
        let point: Vec<f64> = text
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::input(format!("bad point `{text}`: {e}")))?;
        let v = s.eval(&point)?;
        values.push(json!({ "point": point, "value": v }));
    }
    Ok(Outcome::ok(to_json(&json!({ "values": values }))))
}

pub enum Op {
    Interp(f64),
    Opposite,
    Scale(f64),
    Add,
    Mean,
}

pub fn op(cfg: &RunConfig, op: Op, inputs: &[PathBuf]) -> Result<Outcome, CliError> {
    cfg.json_only()?;
    let specs = load_all(inputs)?;
    let spec = match op {
        Op::Interp(theta) => qspace::interpolate(&specs[0], &specs[1], theta)?,
        Op::Opposite => qspace::opposite(&specs[0]),
        Op::Scale(theta) => qspace::scalar_mult(theta, &specs[0])?,
        Op::Add => qspace::add(&specs[0], &specs[1])?,
        Op::Mean => qspace::mean(&specs[0], &specs[1])?,
    };
    write_out(cfg, &spec_to_json(&spec))
}

pub fn axioms(cfg: &RunConfig, inputs: &[PathBuf]) -> Result<Outcome, CliError> {
    cfg.json_only()?;
    if inputs.len() < 3 {
        return Err(CliError::input(format!(
            "need ≥ 3 specs, got {}",
            inputs.len()
        )));
    }
    let specs = load_all(inputs)?;
    let grid = cfg.grid(specs[0].dim())?;
    let metric = metric_axioms_report(&specs, &grid)?;
    let space = space_axioms_report(&specs, &grid, cfg.seed)?;
    let passed = metric.passed && space.passed;
    let text = to_json(&json!({
        "grid_size": grid.len(),
        "metric": metric,
        "space": space,
        "passed": passed,
    }));
    Ok(Outcome {
        stdout: text,
        code: if passed { OK } else { PROPERTY_FAILURE },
    })
}

/// Failures inside bm, iso and break exit with 4 unless the inputs disagree
/// in dimension.
fn computation(e: normspace::NormError) -> CliError {
    let mut c = CliError::from(e);
    if c.code != DIMENSION {
        c.code = COMPUTATION;
    }
    c
}

pub fn bm(
    cfg: &RunConfig,
    x: &Path,
    y: &Path,
    starts: usize,
    budget: usize,
) -> Result<Outcome, CliError> {
    cfg.json_only()?;
    let specs = load_all(&[x.to_path_buf(), y.to_path_buf()])?;
    let grid = cfg.grid(specs[0].dim())?;
    let r =
        bm_distance(&specs[0], &specs[1], &grid, starts, budget, cfg.seed).map_err(computation)?;
    Ok(Outcome::ok(to_json(&r)))
}

pub fn iso(cfg: &RunConfig, spec: &Path) -> Result<Outcome, CliError> {
    cfg.json_only()?;
    let s = load(spec)?;
    let grid = cfg.grid(s.dim())?;
    let (ball, approximated) = match &s {
        NormSpec::Polytope(b) => ((**b).clone(), false),
        other => (polyhedral_approx(other, &grid).map_err(computation)?, true),
    };
    let report = isometry_group(&ball, &grid).map_err(computation)?;
    Ok(Outcome::ok(to_json(&json!({
        "order": report.order,
        "trivial": report.trivial,
        "at_approximation_resolution": approximated,
        "classifications": report.classifications,
        "elements": report.elements,
    }))))
}

pub fn brk(cfg: &RunConfig, spec: &Path, epsilon: f64) -> Result<Outcome, CliError> {
    cfg.json_only()?;
    let s = load(spec)?;
    let NormSpec::Polytope(ball) = &s else {
        return Err(CliError {
            code: COMPUTATION,
            message: "break requires a polytope spec".into(),
        });
    };
    let r = symmetry_break(ball, epsilon, cfg.seed).map_err(computation)?;
    let mut record = serde_json::to_value(&r).expect("serializable");
    match &cfg.out {
        Some(path) => {
            fs::write(path, spec_to_json(&r.spec))
                .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))?;
            record["spec_path"] = json!(path.display().to_string());
        }
        None => record["spec"] = spec_value(&r.spec),
    }
    Ok(Outcome::ok(to_json(&record)))
}

pub fn approx(cfg: &RunConfig, spec: &Path) -> Result<Outcome, CliError> {
    cfg.json_only()?;
    let s = load(spec)?;
    let grid = cfg.grid(s.dim())?;
    let ball = polyhedral_approx(&s, &grid)?;
    write_out(cfg, &spec_to_json(&NormSpec::polytope(ball)))
}

pub fn limit(cfg: &RunConfig, inputs: &[PathBuf], tol: f64) -> Result<Outcome, CliError> {
    cfg.json_only()?;
    let specs = load_all(inputs)?;
    if specs.is_empty() {
        return Err(CliError::input("need at least 2 specs"));
    }
    let grid = cfg.grid(specs[0].dim())?;
    let lim = limit_of_sequence(&specs, &grid, tol)?;
    let zero = to_log_profile(&NormSpec::euclidean(grid.dim()), &grid, true)?;
    let spec = from_log_profile(&lim)?;
    let mut summary = json!({
        "terms": specs.len(),
        "tol": tol,
        "grid_size": grid.len(),
        "range_to_euclidean": range_metric(&lim, &zero)?,
    });
    match &cfg.out {
        Some(path) => {
            fs::write(path, spec_to_json(&spec))
                .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))?;
            summary["limit_path"] = json!(path.display().to_string());
        }
        None => summary["limit"] = spec_value(&spec),
    }
    Ok(Outcome::ok(to_json(&summary)))
}

pub fn plot(cfg: &RunConfig, inputs: &[PathBuf]) -> Result<Outcome, CliError> {
    let specs: Vec<NormSpec> = inputs.iter().map(|p| load(p)).collect::<Result<_, _>>()?;
    if specs.is_empty() {
        return Err(CliError::input("plot needs at least one spec"));
    }
    if specs.iter().any(|s| s.dim() != 2) {
        return Err(CliError::input("plotting supports dimension 2"));
    }
    let text = match cfg.format.unwrap_or(Format::Svg) {
        Format::Svg => {
            let labels: Vec<String> = inputs
                .iter()
                .map(|p| {
                    p.file_stem()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_default()
                })
                .collect();
            plot::svg(&specs, &labels)
        }
        Format::Csv => plot::csv(&specs),
        Format::Json => return Err(CliError::input("plot writes svg or csv")),
    };
    write_out(cfg, &text)
}
