//! TOML run configuration.

use std::path::{Path, PathBuf};

use finsler_core::chart_metric::{
    AlphaKind, BetaKind, DirectionSet, OneFormField, PhiKind, PhiProfile, RiemannianField,
};
use finsler_core::flow_lab::{FamilyKind, FlowConfig, FlowMode, Integrator, SMQuadratureSpec};
use finsler_core::identity_auditor::{AuditConfig, CaseId};
use finsler_core::jet_calculus::FdConfig;
use finsler_core::{fixtures, FinslerMetricSpec};
use serde::{Deserialize, Serialize};

use crate::{exit_code_for, Failure, EXIT_CONFIG};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_out")]
    pub out: PathBuf,
    /// Seeds random samples and low-discrepancy direction sets.
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
    pub metric: MetricConfig,
    #[serde(default)]
    pub sampling: SamplingConfig,
    #[serde(default)]
    pub fd: FdConfig,
    #[serde(default)]
    pub audit: AuditSection,
    #[serde(default)]
    pub flow: Option<FlowSection>,
}

fn default_out() -> PathBuf {
    PathBuf::from("finsler-out")
}

fn default_formats() -> Vec<Format> {
    vec![Format::Json, Format::Csv]
}

/// Either a built-in fixture (optionally with component overrides) or a
/// fully custom metric.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricConfig {
    pub fixture: Option<String>,
    #[serde(default = "default_dim")]
    pub dim: usize,
    /// `FIX-SPHERE` radius.
    pub radius: Option<f64>,
    pub name: Option<String>,
    pub bounds: Option<Vec<[f64; 2]>>,
    pub grid: Option<Vec<usize>>,
    pub alpha: Option<AlphaKind>,
    pub alpha_scale: Option<f64>,
    pub beta: Option<BetaKind>,
    pub beta_scale: Option<f64>,
    pub phi: Option<PhiKind>,
    pub b0: Option<f64>,
    pub s_range: Option<[f64; 2]>,
}

fn default_dim() -> usize {
    3
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingMode {
    Random,
    Lattice,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Directions {
    LowDiscrepancy,
    Symmetric,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SamplingConfig {
    pub mode: SamplingMode,
    /// Random mode: number of samples.
    pub count: usize,
    /// Lattice mode: directions per grid point.
    pub directions_per_point: usize,
    pub directions: Directions,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self {
            mode: SamplingMode::Random,
            count: 20,
            directions_per_point: 8,
            directions: Directions::LowDiscrepancy,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AuditSection {
    /// Case ids to run; all when absent.
    pub cases: Option<Vec<CaseId>>,
    pub dt_probe: f64,
    pub noise_floor: f64,
    pub quadrature: SMQuadratureSpec,
}

impl Default for AuditSection {
    fn default() -> Self {
        let d = AuditConfig::default();
        Self {
            cases: None,
            dt_probe: d.dt_probe,
            noise_floor: d.noise_floor,
            quadrature: d.quadrature,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSection {
    pub family: FamilyKind,
    #[serde(default = "default_mode")]
    pub mode: FlowMode,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default = "default_integrator")]
    pub integrator: Integrator,
    #[serde(default)]
    pub quadrature: SMQuadratureSpec,
    #[serde(default = "default_guard")]
    pub extinction_guard: f64,
    /// Drift bound for the fixed-point verdict.
    #[serde(default = "default_fixed_tol")]
    pub fixed_point_tol: f64,
}

fn default_mode() -> FlowMode {
    FlowConfig::default().mode
}
fn default_dt() -> f64 {
    FlowConfig::default().dt
}
fn default_steps() -> usize {
    FlowConfig::default().steps
}
fn default_integrator() -> Integrator {
    FlowConfig::default().integrator
}
fn default_guard() -> f64 {
    FlowConfig::default().extinction_guard
}
fn default_fixed_tol() -> f64 {
    1e-8
}

impl FlowSection {
    pub fn flow_config(&self) -> FlowConfig {
        FlowConfig {
            mode: self.mode,
            dt: self.dt,
            steps: self.steps,
            integrator: self.integrator,
            quadrature: self.quadrature.clone(),
            extinction_guard: self.extinction_guard,
        }
    }
}

fn config_err(msg: impl Into<String>) -> Failure {
    Failure::new(EXIT_CONFIG, msg)
}

impl RunConfig {
    pub fn parse(text: &str, origin: &str) -> Result<Self, Failure> {
        toml::from_str(text).map_err(|e| config_err(format!("{origin}: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn audit_config(&self) -> AuditConfig {
        AuditConfig {
            fd: self.fd.clone(),
            dt_probe: self.audit.dt_probe,
            quadrature: self.audit.quadrature.clone(),
            noise_floor: self.audit.noise_floor,
        }
    }

    pub fn cases(&self) -> Vec<CaseId> {
        self.audit.cases.clone().unwrap_or_else(|| CaseId::ALL.to_vec())
    }

    pub fn direction_set(&self) -> DirectionSet {
        match self.sampling.directions {
            Directions::LowDiscrepancy => DirectionSet::LowDiscrepancy { seed: self.seed },
            Directions::Symmetric => DirectionSet::Symmetric,
        }
    }

    /// Structural checks that do not depend on the subcommand.
    pub fn validate(&self) -> Result<FinslerMetricSpec, Failure> {
        if self.formats.is_empty() {
            return Err(config_err("formats: at least one of json, csv is required"));
        }
        self.fd.validate().map_err(|e| config_err(format!("fd: {e}")))?;
        match self.sampling.mode {
            SamplingMode::Random if self.sampling.count == 0 => {
                return Err(config_err("sampling.count must be positive"))
            }
            _ => {}
        }
        self.metric.build()
    }
}

impl MetricConfig {
    pub fn build(&self) -> Result<FinslerMetricSpec, Failure> {
        let n = self.dim;
        let mut spec = match &self.fixture {
            Some(name) => fixtures::by_name(name, n, self.radius)
                .map_err(|e| config_err(format!("metric.fixture: {e}")))?,
            None => {
                let phi = self
                    .phi
                    .clone()
                    .ok_or_else(|| config_err("metric: either `fixture` or `phi` is required"))?;
                FinslerMetricSpec {
                    name: "custom".into(),
                    chart: finsler_core::chart_metric::ChartSpec::cube(n, 1.0, 2),
                    alpha: RiemannianField::new(AlphaKind::Euclidean),
                    beta: OneFormField::new(BetaKind::Zero),
                    phi: PhiProfile::new(phi),
                }
            }
        };
        if self.fixture.is_none() && self.radius.is_some() {
            return Err(config_err("metric.radius only applies to FIX-SPHERE"));
        }
        if let Some(name) = &self.name {
            spec.name = name.clone();
        }
        if let Some(b) = &self.bounds {
            spec.chart.bounds = b.iter().map(|p| (p[0], p[1])).collect();
        }
        if let Some(g) = &self.grid {
            spec.chart.grid = g.clone();
        }
        if let Some(a) = &self.alpha {
            spec.alpha = RiemannianField::new(a.clone());
        }
        if let Some(k) = self.alpha_scale {
            spec.alpha.scale = k;
        }
        if let Some(b) = &self.beta {
            spec.beta = OneFormField::new(b.clone());
        }
        if let Some(k) = self.beta_scale {
            spec.beta.scale = k;
        }
        if self.fixture.is_some() {
            if let Some(phi) = &self.phi {
                spec.phi = PhiProfile::new(phi.clone());
            }
        }
        if let Some(b0) = self.b0 {
            spec.phi.b0 = b0;
        }
        if let Some(r) = self.s_range {
            spec.phi.s_range = (r[0], r[1]);
        }
        spec.validate()
            .map_err(|e| Failure::new(exit_code_for(&e), format!("metric {}: {e}", spec.name)))?;
        Ok(spec)
    }
}
