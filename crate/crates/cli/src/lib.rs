//! Configuration, orchestration and report writing behind the `finsler`
//! binary.
//!
//! Exit codes: 0 ok, 2 config error, 3 invariant violation or failed audit
//! case, 4 numerical failure, 5 flow integration aborted.

pub mod config;

use std::fmt;
use std::path::{Path, PathBuf};

use finsler_core::chart_metric::{random_samples, sample_lattice};
use finsler_core::curvature_engine::{
    compute_curvature, einstein_diagnostic, CurvatureBundle, CurvatureRecord, DiagnosticReport,
    TOL_EINSTEIN,
};
use finsler_core::flow_lab::{
    constant_curvature_oracle, extinction_time, FamilyKind, FlowProblem, FlowStatus,
    ParametricFamily,
};
use finsler_core::identity_auditor::{run_audit as audit_samples, CaseStatus, Rung, SampleStatus};
use finsler_core::report::{csv_line, fmt_csv, CURVATURE_CONVENTION};
use finsler_core::tensor_lab::{compute_bundle, semi_c_fit, BundleInvariants, BundleRecord, SemiCFit};
use finsler_core::{FinslerError, FinslerMetricSpec, TangentSample};
use rayon::prelude::*;
use serde::Serialize;

pub use config::{Format, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;
pub const EXIT_ABORTED: i32 = 5;

/// Relative bound on the structural tensor identities.
pub const TOL_TENSOR_GATE: f64 = 1e-9;
/// `‖C - (pA + qB)‖/‖C‖` bound for the semi-C decomposition.
pub const TOL_SEMI_C_GATE: f64 = 1e-8;
/// Symmetry of `Ric_ij` and `Ric_ij y^i y^j = Ric`.
pub const TOL_CURVATURE_GATE: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Tensors,
    Curvature,
    Audit,
    Flow,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Tensors => "tensors",
            Command::Curvature => "curvature",
            Command::Audit => "audit",
            Command::Flow => "flow",
        }
    }
}

/// Non-zero exit with a message for stderr.
#[derive(Clone, Debug, PartialEq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

/// Configuration-type errors exit 2, everything else is numerical.
pub fn exit_code_for(e: &FinslerError) -> i32 {
    match e {
        FinslerError::InvalidChart(_)
        | FinslerError::RiemannianField(_)
        | FinslerError::OneFormField(_)
        | FinslerError::PhiProfile(_)
        | FinslerError::InvalidArgument(_)
        | FinslerError::FitIllPosed(_) => EXIT_CONFIG,
        _ => EXIT_NUMERICAL,
    }
}

fn core_failure(context: &str, e: FinslerError) -> Failure {
    Failure::new(exit_code_for(&e), format!("{context}: {e}"))
}

/// Result of a completed run; `code` may still be non-zero.
#[derive(Clone, Debug)]
pub struct RunSummary {
    pub code: i32,
    pub message: String,
    pub files: Vec<PathBuf>,
}

#[derive(Serialize)]
struct LadderEntry {
    rung: Rung,
    tolerance: f64,
}

#[derive(Serialize)]
struct Gates {
    tensor_identities: f64,
    semi_c_decomposition: f64,
    curvature_identities: f64,
    einstein: f64,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    curvature_convention: &'static str,
    tolerance_ladder: Vec<LadderEntry>,
    gates: Gates,
    config: &'a RunConfig,
    metric: &'a FinslerMetricSpec,
    report: T,
}

struct Writer<'a> {
    cfg: &'a RunConfig,
    spec: &'a FinslerMetricSpec,
    command: Command,
    files: Vec<PathBuf>,
}

impl<'a> Writer<'a> {
    fn new(cfg: &'a RunConfig, spec: &'a FinslerMetricSpec, command: Command) -> Result<Self, Failure> {
        std::fs::create_dir_all(&cfg.out).map_err(|e| {
            Failure::new(EXIT_CONFIG, format!("cannot create {}: {e}", cfg.out.display()))
        })?;
        Ok(Self {
            cfg,
            spec,
            command,
            files: Vec::new(),
        })
    }

    fn wants(&self, f: Format) -> bool {
        self.cfg.formats.contains(&f)
    }

    fn write(&mut self, rel: &str, body: &str) -> Result<(), Failure> {
        let path = self.cfg.out.join(rel);
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)
                .map_err(|e| Failure::new(EXIT_NUMERICAL, format!("cannot create {}: {e}", dir.display())))?;
        }
        std::fs::write(&path, body)
            .map_err(|e| Failure::new(EXIT_NUMERICAL, format!("cannot write {}: {e}", path.display())))?;
        self.files.push(path);
        Ok(())
    }

    fn json<T: Serialize>(&mut self, rel: &str, report: T) -> Result<(), Failure> {
        if !self.wants(Format::Json) {
            return Ok(());
        }
        let env = Envelope {
            tool: "finsler",
            version: env!("CARGO_PKG_VERSION"),
            command: self.command.name(),
            curvature_convention: CURVATURE_CONVENTION,
            tolerance_ladder: Rung::LADDER
                .iter()
                .map(|&rung| LadderEntry {
                    rung,
                    tolerance: rung.tolerance(),
                })
                .collect(),
            gates: Gates {
                tensor_identities: TOL_TENSOR_GATE,
                semi_c_decomposition: TOL_SEMI_C_GATE,
                curvature_identities: TOL_CURVATURE_GATE,
                einstein: TOL_EINSTEIN,
            },
            config: self.cfg,
            metric: self.spec,
            report,
        };
        let mut text = serde_json::to_string_pretty(&env)
            .map_err(|e| Failure::new(EXIT_NUMERICAL, format!("serializing {rel}: {e}")))?;
        text.push('\n');
        self.write(rel, &text)
    }

    /// CSV files start with a `#` header echoing tool, version and config.
    fn csv(&mut self, rel: &str, body: &str) -> Result<(), Failure> {
        if !self.wants(Format::Csv) {
            return Ok(());
        }
        let config = serde_json::to_string(self.cfg).unwrap_or_default();
        let text = format!(
            "# finsler {} {} metric={}\n# convention: {}\n# config: {}\n{}",
            env!("CARGO_PKG_VERSION"),
            self.command.name(),
            self.spec.name,
            CURVATURE_CONVENTION,
            config,
            body
        );
        self.write(rel, &text)
    }
}

fn samples_for(cfg: &RunConfig, spec: &FinslerMetricSpec) -> Result<Vec<TangentSample>, Failure> {
    match cfg.sampling.mode {
        config::SamplingMode::Random => Ok(random_samples(spec, cfg.sampling.count, cfg.seed)),
        config::SamplingMode::Lattice => {
            sample_lattice(spec, cfg.sampling.directions_per_point, cfg.direction_set())
                .map_err(|e| core_failure("sampling", e))
        }
    }
}

fn failed_ids(errors: &[(usize, String)]) -> String {
    let ids: Vec<String> = errors.iter().map(|(id, _)| id.to_string()).collect();
    format!(
        "numerical failure at sample ids [{}]: {}",
        ids.join(", "),
        errors[0].1
    )
}

/// Runs one subcommand end to end.
pub fn execute(command: Command, cfg: &RunConfig) -> Result<RunSummary, Failure> {
    let spec = cfg.validate()?;
    match command {
        Command::Tensors => run_tensors(cfg, &spec),
        Command::Curvature => run_curvature(cfg, &spec),
        Command::Audit => run_audit(cfg, &spec),
        Command::Flow => run_flow(cfg, &spec),
    }
}

#[derive(Serialize)]
struct TensorEntry {
    #[serde(flatten)]
    record: BundleRecord,
    invariants: BundleInvariants,
    #[serde(skip_serializing_if = "Option::is_none")]
    semi_c: Option<SemiCFit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    semi_c_skipped: Option<String>,
    c_norm: f64,
    gate_pass: bool,
}

#[derive(Serialize)]
struct TensorReport<'a> {
    samples: usize,
    gate_failures: Vec<usize>,
    numerical_failures: &'a [(usize, String)],
    entries: &'a [TensorEntry],
}

pub fn run_tensors(cfg: &RunConfig, spec: &FinslerMetricSpec) -> Result<RunSummary, Failure> {
    let samples = samples_for(cfg, spec)?;
    let n = spec.dim();
    let results: Vec<Result<TensorEntry, (usize, String)>> = samples
        .par_iter()
        .map(|s| {
            let b = compute_bundle(spec, s).map_err(|e| (s.id, e.to_string()))?;
            let invariants = b.invariants();
            let (semi_c, semi_c_skipped) = match semi_c_fit(&b, n) {
                Ok(fit) => (Some(fit), None),
                Err(e @ (FinslerError::FitIllPosed(_) | FinslerError::RiemannianDegenerate(_))) => {
                    (None, Some(e.to_string()))
                }
                Err(e) => return Err((s.id, e.to_string())),
            };
            let gate_pass = invariants.worst() <= TOL_TENSOR_GATE
                && invariants.min_eigenvalue > 0.0
                && semi_c.map_or(true, |f| f.decomposition_residual <= TOL_SEMI_C_GATE);
            Ok(TensorEntry {
                record: BundleRecord::new(s, &b),
                invariants,
                semi_c,
                semi_c_skipped,
                c_norm: b.c.frobenius(),
                gate_pass,
            })
        })
        .collect();
    let mut entries = Vec::new();
    let mut errors = Vec::new();
    for r in results {
        match r {
            Ok(e) => entries.push(e),
            Err(e) => errors.push(e),
        }
    }
    let gate_failures: Vec<usize> = entries
        .iter()
        .filter(|e| !e.gate_pass)
        .map(|e| e.record.sample_id)
        .collect();

    let mut w = Writer::new(cfg, spec, Command::Tensors)?;
    w.json(
        "tensors.json",
        TensorReport {
            samples: samples.len(),
            gate_failures: gate_failures.clone(),
            numerical_failures: &errors,
            entries: &entries,
        },
    )?;
    let mut csv = csv_line(
        [
            "sample_id", "F", "C_norm", "I_normsq", "invariant_worst", "min_eigenvalue", "p", "q",
            "kappa", "decomposition_residual", "gate_pass",
        ]
        .map(String::from),
    );
    for e in &entries {
        let fit = e.semi_c;
        let cell = |f: fn(&SemiCFit) -> f64| fit.as_ref().map_or(String::new(), |v| fmt_csv(f(v)));
        csv.push_str(&csv_line([
            e.record.sample_id.to_string(),
            fmt_csv(e.record.f),
            fmt_csv(e.c_norm),
            fmt_csv(e.record.i_norm_sq),
            fmt_csv(e.invariants.worst()),
            fmt_csv(e.invariants.min_eigenvalue),
            cell(|f| f.p),
            cell(|f| f.q),
            cell(|f| f.kappa),
            cell(|f| f.decomposition_residual),
            e.gate_pass.to_string(),
        ]));
    }
    w.csv("tensors.csv", &csv)?;

    let (code, message) = if !errors.is_empty() {
        (EXIT_NUMERICAL, failed_ids(&errors))
    } else if !gate_failures.is_empty() {
        (
            EXIT_INVARIANT,
            format!("tensor invariant gate failed at sample ids {gate_failures:?}"),
        )
    } else {
        (EXIT_OK, format!("{} samples, all tensor gates pass", entries.len()))
    };
    Ok(RunSummary {
        code,
        message,
        files: w.files,
    })
}

#[derive(Serialize)]
struct CurvatureEntry {
    #[serde(flatten)]
    record: CurvatureRecord,
    #[serde(rename = "Ric_ijk")]
    ric_ijk: Vec<f64>,
    symmetry_defect: f64,
    contraction_defect: f64,
    gate_pass: bool,
}

#[derive(Serialize)]
struct CurvatureReport<'a> {
    samples: usize,
    gate_failures: Vec<usize>,
    numerical_failures: &'a [(usize, String)],
    #[serde(skip_serializing_if = "Option::is_none")]
    einstein: Option<&'a DiagnosticReport>,
    entries: &'a [CurvatureEntry],
}

/// `(max|Ric_ij - Ric_ji|, |Ric_ij y^i y^j - Ric|)` relative to `max(scale, 1)`.
fn curvature_defects(cb: &CurvatureBundle) -> (f64, f64) {
    let m = &cb.ric_ij;
    let y = &cb.tensors.y;
    let scale = m.amax().max(cb.ric.abs()).max(1.0);
    let sym = (m - m.transpose()).amax() / scale;
    let contraction = (y.dot(&(m * y)) - cb.ric).abs() / (scale * y.norm_squared().max(1.0));
    (sym, contraction)
}

pub fn run_curvature(cfg: &RunConfig, spec: &FinslerMetricSpec) -> Result<RunSummary, Failure> {
    let samples = samples_for(cfg, spec)?;
    let results: Vec<Result<CurvatureEntry, (usize, String)>> = samples
        .par_iter()
        .map(|s| {
            let cb = compute_curvature(spec, s, &cfg.fd).map_err(|e| (s.id, e.to_string()))?;
            let (symmetry_defect, contraction_defect) = curvature_defects(&cb);
            let finite = cb.ric.is_finite() && cb.rnorm.is_finite();
            Ok(CurvatureEntry {
                record: CurvatureRecord::new(s, &cb),
                ric_ijk: cb.ric_ijk.data.clone(),
                symmetry_defect,
                contraction_defect,
                gate_pass: finite
                    && symmetry_defect <= TOL_CURVATURE_GATE
                    && contraction_defect <= TOL_CURVATURE_GATE,
            })
        })
        .collect();
    let mut entries = Vec::new();
    let mut errors = Vec::new();
    for r in results {
        match r {
            Ok(e) => entries.push(e),
            Err(e) => errors.push(e),
        }
    }
    let gate_failures: Vec<usize> = entries
        .iter()
        .filter(|e| !e.gate_pass)
        .map(|e| e.record.sample_id)
        .collect();
    // grouping by base point only makes sense on a lattice
    let diag = if cfg.sampling.mode == config::SamplingMode::Lattice && errors.is_empty() {
        Some(einstein_diagnostic(spec, &samples, TOL_EINSTEIN).map_err(|e| core_failure("einstein diagnostic", e))?)
    } else {
        None
    };

    let mut w = Writer::new(cfg, spec, Command::Curvature)?;
    w.json(
        "curvature.json",
        CurvatureReport {
            samples: samples.len(),
            gate_failures: gate_failures.clone(),
            numerical_failures: &errors,
            einstein: diag.as_ref(),
            entries: &entries,
        },
    )?;
    let mut csv = csv_line(
        ["sample_id", "Ric", "R", "rho", "symmetry_defect", "contraction_defect", "gate_pass"].map(String::from),
    );
    for e in &entries {
        csv.push_str(&csv_line([
            e.record.sample_id.to_string(),
            fmt_csv(e.record.ric),
            fmt_csv(e.record.rnorm),
            fmt_csv(e.record.rho),
            fmt_csv(e.symmetry_defect),
            fmt_csv(e.contraction_defect),
            e.gate_pass.to_string(),
        ]));
    }
    w.csv("curvature.csv", &csv)?;
    if let Some(d) = &diag {
        w.csv("einstein.csv", &d.to_csv())?;
    }

    let (code, message) = if !errors.is_empty() {
        (EXIT_NUMERICAL, failed_ids(&errors))
    } else if !gate_failures.is_empty() {
        (
            EXIT_INVARIANT,
            format!("curvature invariant gate failed at sample ids {gate_failures:?}"),
        )
    } else {
        let extra = diag
            .as_ref()
            .map(|d| format!("; einstein = {} (max deviation {:e})", d.einstein, d.max_rel_deviation))
            .unwrap_or_default();
        (EXIT_OK, format!("{} samples, all curvature gates pass{extra}", entries.len()))
    };
    Ok(RunSummary {
        code,
        message,
        files: w.files,
    })
}

#[derive(Serialize)]
struct RungRow<'a> {
    case: &'a str,
    rung: Rung,
    tolerance: f64,
    status: CaseStatus,
    pass: bool,
    max_residual: f64,
    evaluated: usize,
    trivial: usize,
    errors: usize,
}

#[derive(Serialize)]
struct AuditIndex<'a> {
    samples: usize,
    average_r: Option<f64>,
    coefficient: finsler_core::identity_auditor::Coefficient,
    all_pass: bool,
    rung_table: Vec<RungRow<'a>>,
}

pub fn run_audit(cfg: &RunConfig, spec: &FinslerMetricSpec) -> Result<RunSummary, Failure> {
    let cases = cfg.cases();
    let n = spec.dim();
    if n < 3 {
        let gated: Vec<&str> = cases.iter().filter(|c| c.requires_semi_c()).map(|c| c.id()).collect();
        if !gated.is_empty() {
            return Err(Failure::new(
                EXIT_CONFIG,
                format!(
                    "dimension gate: cases [{}] need a semi-C fit, which requires n >= 3 (got n = {n})",
                    gated.join(", ")
                ),
            ));
        }
    }
    let audit_cfg = cfg.audit_config();
    audit_cfg.validate().map_err(|e| Failure::new(EXIT_CONFIG, format!("audit: {e}")))?;
    let samples = samples_for(cfg, spec)?;
    let out = audit_samples(spec, &samples, &cases, &audit_cfg).map_err(|e| core_failure("audit", e))?;

    let mut w = Writer::new(cfg, spec, Command::Audit)?;
    for r in &out.reports {
        w.json(&format!("audit/{}.json", r.case), r)?;
    }
    w.json(
        "audit.json",
        AuditIndex {
            samples: samples.len(),
            average_r: out.average_r,
            coefficient: out.coefficient,
            all_pass: out.all_pass(),
            rung_table: out
                .reports
                .iter()
                .map(|r| RungRow {
                    case: &r.case,
                    rung: r.rung,
                    tolerance: r.tolerance,
                    status: r.status,
                    pass: r.pass,
                    max_residual: r.max_residual,
                    evaluated: r.evaluated,
                    trivial: r.trivial,
                    errors: r.errors,
                })
                .collect(),
        },
    )?;
    w.csv("audit_summary.csv", &out.summary_csv())?;

    let mut errors: Vec<(usize, String)> = Vec::new();
    for r in &out.reports {
        for s in r.samples.iter().filter(|s| s.status == SampleStatus::Error) {
            if !errors.iter().any(|(id, _)| *id == s.sample_id) {
                errors.push((s.sample_id, format!("{}: {}", r.case, s.message.clone().unwrap_or_default())));
            }
        }
    }
    let has_errors = out.reports.iter().any(|r| r.errors > 0);
    let failed: Vec<&str> = out.reports.iter().filter(|r| !r.pass).map(|r| r.case.as_str()).collect();
    let (code, message) = if has_errors {
        let msg = if errors.is_empty() {
            "numerical failure in audit samples".to_string()
        } else {
            failed_ids(&errors)
        };
        (EXIT_NUMERICAL, msg)
    } else if !failed.is_empty() {
        (EXIT_INVARIANT, format!("audit cases failed their rung: {}", failed.join(", ")))
    } else {
        let trivial = out
            .reports
            .iter()
            .filter(|r| r.status == CaseStatus::TriviallySatisfied)
            .count();
        (
            EXIT_OK,
            format!("{} cases pass ({trivial} trivially satisfied)", out.reports.len()),
        )
    };
    Ok(RunSummary {
        code,
        message,
        files: w.files,
    })
}

#[derive(Serialize)]
struct FlowSummary<'a> {
    family: FamilyKind,
    parameter: &'a str,
    status: &'a FlowStatus,
    final_theta: f64,
    max_drift: f64,
    fixed_point: bool,
    fixed_point_tol: f64,
    extinction_estimate: Option<f64>,
    /// Closed-form extinction time for the round sphere conformal flow.
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_extinction_time: Option<f64>,
    /// `max_t |c(t) - c_oracle(t)|` on the round sphere conformal flow.
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_max_error: Option<f64>,
    rows: &'a [finsler_core::flow_lab::FlowRow],
}

fn sphere_radius(spec: &FinslerMetricSpec) -> Option<f64> {
    use finsler_core::chart_metric::{AlphaKind, PhiKind};
    match (&spec.alpha.kind, &spec.phi.kind, spec.beta.is_zero()) {
        (AlphaKind::StereographicSphere { r }, PhiKind::Riemannian, true) => Some(r * spec.alpha.scale.sqrt()),
        _ => None,
    }
}

pub fn run_flow(cfg: &RunConfig, spec: &FinslerMetricSpec) -> Result<RunSummary, Failure> {
    let section = cfg
        .flow
        .as_ref()
        .ok_or_else(|| Failure::new(EXIT_CONFIG, "flow: missing [flow] table with a `family`"))?;
    let flow_cfg = section.flow_config();
    flow_cfg.validate().map_err(|e| Failure::new(EXIT_CONFIG, format!("flow: {e}")))?;
    let family = ParametricFamily::new(spec.clone(), section.family).map_err(|e| core_failure("flow family", e))?;
    let problem = FlowProblem::new(family.clone(), flow_cfg.clone()).map_err(|e| core_failure("flow", e))?;
    let outcome = problem.run();

    let extinction_estimate = match &outcome.status {
        FlowStatus::Aborted {
            extinction_estimate, ..
        } => *extinction_estimate,
        FlowStatus::Completed => outcome.trace.extinction_estimate(&family),
    };
    let oracle = match (sphere_radius(spec), section.family, flow_cfg.mode) {
        (Some(r), FamilyKind::Conformal, finsler_core::flow_lab::FlowMode::Unnormalized) => Some(r),
        _ => None,
    };
    let n = spec.dim();
    let oracle_max_error = oracle.map(|r| {
        outcome
            .trace
            .rows
            .iter()
            .filter_map(|row| constant_curvature_oracle(n, r, row.t).ok().map(|c| (row.theta - c).abs()))
            .fold(0.0, f64::max)
    });
    let fixed_point = outcome.is_fixed_point(section.fixed_point_tol);

    let mut w = Writer::new(cfg, spec, Command::Flow)?;
    // the trace is always written, whatever the formats
    let trace = outcome.trace.to_csv();
    if w.wants(Format::Csv) {
        w.csv("flow_trace.csv", &trace)?;
    } else {
        w.write("flow_trace.csv", &trace)?;
    }
    w.json(
        "flow_summary.json",
        FlowSummary {
            family: section.family,
            parameter: &outcome.trace.parameter,
            status: &outcome.status,
            final_theta: outcome.final_theta(),
            max_drift: outcome.max_drift,
            fixed_point,
            fixed_point_tol: section.fixed_point_tol,
            extinction_estimate,
            oracle_extinction_time: oracle.map(|r| extinction_time(n, r)),
            oracle_max_error,
            rows: &outcome.trace.rows,
        },
    )?;
    let mut csv = csv_line(
        ["status", "final_theta", "max_drift", "fixed_point", "extinction_estimate"].map(String::from),
    );
    let status = match &outcome.status {
        FlowStatus::Completed => "completed",
        FlowStatus::Aborted { .. } => "aborted",
    };
    csv.push_str(&csv_line([
        status.to_string(),
        fmt_csv(outcome.final_theta()),
        fmt_csv(outcome.max_drift),
        fixed_point.to_string(),
        extinction_estimate.map(fmt_csv).unwrap_or_default(),
    ]));
    w.csv("flow_summary.csv", &csv)?;

    let est = extinction_estimate
        .map(|t| format!("; extinction estimate {t:.6}"))
        .unwrap_or_default();
    let (code, message) = match &outcome.status {
        FlowStatus::Aborted { t, reason, .. } => (EXIT_ABORTED, format!("flow aborted at t = {t}: {reason}{est}")),
        FlowStatus::Completed => (
            EXIT_OK,
            format!(
                "flow completed, final {} = {}, fixed point = {fixed_point}{est}",
                outcome.trace.parameter,
                outcome.final_theta()
            ),
        ),
    };
    Ok(RunSummary {
        code,
        message,
        files: w.files,
    })
}

/// Applies `FINSLER_THREADS` to the global rayon pool.
pub fn configure_threads(value: Option<&str>) -> Result<(), Failure> {
    let Some(v) = value else { return Ok(()) };
    let threads: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|t| *t > 0)
        .ok_or_else(|| Failure::new(EXIT_CONFIG, format!("FINSLER_THREADS must be a positive integer, got {v:?}")))?;
    // a second call in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

/// Output directory, seed and formats from the command line override the file.
pub fn apply_overrides(cfg: &mut RunConfig, out: Option<&Path>, seed: Option<u64>, formats: Option<Vec<Format>>) {
    if let Some(o) = out {
        cfg.out = o.to_path_buf();
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(mut f) = formats {
        f.dedup();
        cfg.formats = f;
    }
}
