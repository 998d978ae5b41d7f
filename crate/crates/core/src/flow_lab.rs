//! Scalar Ricci flow `d log F/dt = -R (+ ⟨R⟩)` projected onto parametric
//! metric families, the fiber-average quadrature and the closed-form
//! sphere oracle.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chart_metric::{sample_lattice, DirectionSet, FinslerMetricSpec, TangentSample};
use crate::curvature_engine::{ricci_scalars, ricci_tensor};
use crate::error::{FinslerError, Result};
use crate::jet_calculus::FdConfig;
use crate::linalg::{Mat, Vector};
use crate::report::{csv_line, fmt_csv};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    /// `F_c = √c F`, parameter `c > 0`.
    Conformal,
    /// `F_λ = λ F`, parameter `λ > 0`; the conformal family in scale form.
    ConformalScale,
    /// `b ↦ τ b`, parameter `τ`.
    RandersScale,
}

/// One-parameter deformation of a base metric.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParametricFamily {
    pub base: FinslerMetricSpec,
    pub kind: FamilyKind,
    pub lower: f64,
    pub upper: f64,
}

impl ParametricFamily {
    pub fn new(base: FinslerMetricSpec, kind: FamilyKind) -> Result<Self> {
        let (lower, upper) = match kind {
            FamilyKind::Conformal | FamilyKind::ConformalScale => (1e-12, 1e12),
            FamilyKind::RandersScale => {
                let worst = base
                    .chart
                    .base_points()
                    .iter()
                    .map(|x| base.b_norm_sq(x).sqrt())
                    .fold(0.0, f64::max);
                if worst == 0.0 {
                    return Err(FinslerError::RankDeficient(0.0));
                }
                let tmax = 0.99 * base.phi.b0 / worst;
                (-tmax, tmax)
            }
        };
        Ok(Self {
            base,
            kind,
            lower,
            upper,
        })
    }

    pub fn with_bounds(mut self, lower: f64, upper: f64) -> Self {
        self.lower = lower;
        self.upper = upper;
        self
    }

    pub fn parameter_name(&self) -> &'static str {
        match self.kind {
            FamilyKind::Conformal => "c",
            FamilyKind::ConformalScale => "lambda",
            FamilyKind::RandersScale => "tau",
        }
    }

    pub fn initial(&self) -> f64 {
        1.0
    }

    pub fn check_bounds(&self, theta: f64) -> Result<()> {
        if !(theta >= self.lower && theta <= self.upper) {
            return Err(FinslerError::BoundsExceeded(format!(
                "{} = {theta} outside [{}, {}]",
                self.parameter_name(),
                self.lower,
                self.upper
            )));
        }
        Ok(())
    }

    pub fn spec_at(&self, theta: f64) -> Result<FinslerMetricSpec> {
        self.check_bounds(theta)?;
        let mut spec = self.base.clone();
        match self.kind {
            FamilyKind::Conformal => {
                spec.alpha = spec.alpha.scaled(theta);
                spec.beta = spec.beta.scaled(theta.sqrt());
            }
            FamilyKind::ConformalScale => {
                spec.alpha = spec.alpha.scaled(theta * theta);
                spec.beta = spec.beta.scaled(theta);
            }
            FamilyKind::RandersScale => spec.beta = spec.beta.scaled(theta),
        }
        Ok(spec)
    }

    /// `∂ log F/∂θ` at a sample.
    pub fn dlog_f(&self, theta: f64, sample: &TangentSample) -> Result<f64> {
        match self.kind {
            FamilyKind::Conformal => Ok(0.5 / theta),
            FamilyKind::ConformalScale => Ok(1.0 / theta),
            FamilyKind::RandersScale => {
                let s_base = self.base.alpha_beta(&sample.x, &sample.y)?.s;
                let [phi, dphi, _] = self.base.phi.derivs(theta * s_base)?;
                Ok(dphi * s_base / phi)
            }
        }
    }

    /// `F²_θ / F²_base`, when it is independent of the sample.
    pub fn conformal_factor(&self, theta: f64) -> Option<f64> {
        match self.kind {
            FamilyKind::Conformal => Some(theta),
            FamilyKind::ConformalScale => Some(theta * theta),
            FamilyKind::RandersScale => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FiberWeight {
    Uniform,
    DetG,
}

/// Discrete fiber measure: chart grid × unit directions, normalized weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SMQuadratureSpec {
    pub directions_per_fiber: usize,
    pub weight: FiberWeight,
    pub seed: u64,
}

impl Default for SMQuadratureSpec {
    fn default() -> Self {
        Self {
            directions_per_fiber: 8,
            weight: FiberWeight::Uniform,
            seed: 0,
        }
    }
}

impl SMQuadratureSpec {
    pub fn lattice(&self, spec: &FinslerMetricSpec) -> Result<Vec<TangentSample>> {
        sample_lattice(
            spec,
            self.directions_per_fiber,
            DirectionSet::LowDiscrepancy { seed: self.seed },
        )
    }

    pub fn weights(&self, spec: &FinslerMetricSpec, samples: &[TangentSample]) -> Result<Vec<f64>> {
        let w = match self.weight {
            FiberWeight::Uniform => vec![1.0; samples.len()],
            FiberWeight::DetG => samples
                .iter()
                .map(|s| spec.fundamental_tensor(&s.x, &s.y).map(|g| g.determinant()))
                .collect::<Result<Vec<_>>>()?,
        };
        if let Some(bad) = w.iter().find(|v| !(**v > 0.0)) {
            return Err(FinslerError::NonPositiveValue(format!("quadrature weight {bad}")));
        }
        Ok(w)
    }
}

/// `Σ w q / Σ w`; exactly 1 for `q ≡ 1`.
pub fn weighted_mean(weights: &[f64], values: &[f64]) -> f64 {
    let num: f64 = weights.iter().zip(values).map(|(w, q)| w * q).sum();
    let den: f64 = weights.iter().sum();
    num / den
}

pub type FiberQuantity<'a> = dyn Fn(&[f64], &[f64]) -> Result<f64> + Sync + 'a;

/// Weighted average of a 0-homogeneous quantity over the discrete `SM`.
pub fn sm_average(spec: &FinslerMetricSpec, quantity: &FiberQuantity, quad: &SMQuadratureSpec) -> Result<f64> {
    let samples = quad.lattice(spec)?;
    let first = &samples[0];
    let q1 = quantity(&first.x, &first.y)?;
    let y2: Vec<f64> = first.y.iter().map(|v| 2.0 * v).collect();
    let q2 = quantity(&first.x, &y2)?;
    let dev = (q2 - q1).abs() / q1.abs().max(1.0);
    if dev > 1e-6 {
        return Err(FinslerError::NotHomogeneous(dev));
    }
    let weights = quad.weights(spec, &samples)?;
    let values = samples
        .par_iter()
        .map(|s| quantity(&s.x, &s.y))
        .collect::<Result<Vec<_>>>()?;
    Ok(weighted_mean(&weights, &values))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowMode {
    Unnormalized,
    Normalized,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    Euler,
    Rk4,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FlowConfig {
    pub mode: FlowMode,
    pub dt: f64,
    pub steps: usize,
    pub integrator: Integrator,
    pub quadrature: SMQuadratureSpec,
    /// Abort once the conformal factor drops below this.
    pub extinction_guard: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            mode: FlowMode::Unnormalized,
            dt: 1e-3,
            steps: 100,
            integrator: Integrator::Rk4,
            quadrature: SMQuadratureSpec::default(),
            extinction_guard: 0.05,
        }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(FinslerError::InvalidArgument(format!("flow.dt must be positive, got {}", self.dt)));
        }
        if self.steps < 1 {
            return Err(FinslerError::InvalidArgument("flow.steps must be >= 1".into()));
        }
        if self.quadrature.directions_per_fiber < 1 {
            return Err(FinslerError::InvalidArgument(
                "flow.quadrature.directions_per_fiber must be >= 1".into(),
            ));
        }
        if !(self.extinction_guard >= 0.0) {
            return Err(FinslerError::InvalidArgument("flow.extinction_guard must be >= 0".into()));
        }
        Ok(())
    }
}

/// `d log F/dt` at a sample: `-R`, or `-R + ⟨R⟩` when normalized.
pub fn scalar_flow_rhs(spec: &FinslerMetricSpec, sample: &TangentSample, mode: FlowMode, sm_average_r: f64) -> Result<f64> {
    let (_, r) = ricci_scalars(spec, &sample.x, &sample.y)?;
    Ok(match mode {
        FlowMode::Unnormalized => -r,
        FlowMode::Normalized => -r + sm_average_r,
    })
}

/// `dg_ij/dt`: `-2 Ric_ij`, plus `2⟨R⟩ g_ij` when normalized.
pub fn tensor_flow_rhs(
    spec: &FinslerMetricSpec,
    sample: &TangentSample,
    mode: FlowMode,
    sm_average_r: f64,
    fd: &FdConfig,
) -> Result<Mat> {
    let ric = ricci_tensor(spec, &sample.x, &sample.y, fd)?;
    let mut rhs = ric * -2.0;
    if mode == FlowMode::Normalized {
        rhs += spec.fundamental_tensor(&sample.x, &sample.y)? * (2.0 * sm_average_r);
    }
    Ok(rhs)
}

/// Least-squares projection of the pointwise rhs at one parameter value.
#[derive(Clone, Debug)]
pub struct ProjectedRhs {
    pub dtheta: f64,
    /// RMS of pointwise minus projected rhs.
    pub residual: f64,
    pub mean_r: f64,
    pub min_r: f64,
    pub max_r: f64,
}

/// A family, a flow configuration and the fixed sample lattice.
#[derive(Clone, Debug)]
pub struct FlowProblem {
    pub family: ParametricFamily,
    pub config: FlowConfig,
    pub lattice: Vec<TangentSample>,
}

impl FlowProblem {
    pub fn new(family: ParametricFamily, config: FlowConfig) -> Result<Self> {
        config.validate()?;
        let lattice = config.quadrature.lattice(&family.base)?;
        Ok(Self {
            family,
            config,
            lattice,
        })
    }

    pub fn rhs(&self, theta: f64) -> Result<ProjectedRhs> {
        let spec = self.family.spec_at(theta)?;
        for s in &self.lattice {
            if !spec.admissibility_check(s).admissible() {
                return Err(FinslerError::BoundsExceeded(format!(
                    "sample {} inadmissible at {} = {theta}",
                    s.id,
                    self.family.parameter_name()
                )));
            }
        }
        let rows = self
            .lattice
            .par_iter()
            .map(|s| -> Result<(f64, f64)> {
                let (_, r) = ricci_scalars(&spec, &s.x, &s.y)?;
                Ok((r, self.family.dlog_f(theta, s)?))
            })
            .collect::<Result<Vec<_>>>()?;
        let weights = self.config.quadrature.weights(&spec, &self.lattice)?;
        let rs: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let mean_r = weighted_mean(&weights, &rs);
        let target: Vec<f64> = rs
            .iter()
            .map(|r| match self.config.mode {
                FlowMode::Unnormalized => -r,
                FlowMode::Normalized => -r + mean_r,
            })
            .collect();
        let jac = Vector::from_iterator(rows.len(), rows.iter().map(|r| r.1));
        let rhs = Vector::from_vec(target);
        let jtj = jac.dot(&jac);
        let scale = rows.len() as f64 * jac.amax().powi(2);
        if !(jtj > 1e-24 * scale.max(1e-300)) {
            return Err(FinslerError::RankDeficient(jtj.sqrt()));
        }
        let dtheta = jac.dot(&rhs) / jtj;
        let resid = &rhs - &jac * dtheta;
        let residual = (resid.norm_squared() / rows.len() as f64).sqrt();
        Ok(ProjectedRhs {
            dtheta,
            residual,
            mean_r,
            min_r: rs.iter().copied().fold(f64::INFINITY, f64::min),
            max_r: rs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
    }

    /// One integrator step from `theta`; `first` is the rhs already
    /// evaluated at `theta`.
    pub fn advance(&self, theta: f64, first: &ProjectedRhs) -> Result<f64> {
        let dt = self.config.dt;
        let next = match self.config.integrator {
            Integrator::Euler => theta + dt * first.dtheta,
            Integrator::Rk4 => {
                let k1 = first.dtheta;
                let k2 = self.rhs(theta + 0.5 * dt * k1)?.dtheta;
                let k3 = self.rhs(theta + 0.5 * dt * k2)?.dtheta;
                let k4 = self.rhs(theta + dt * k3)?.dtheta;
                theta + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            }
        };
        self.family.check_bounds(next)?;
        Ok(next)
    }

    /// Integrates `config.steps` steps or until the extinction guard fires.
    pub fn run(&self) -> FlowOutcome {
        let name = self.family.parameter_name().to_string();
        let mut trace = FlowTrace {
            parameter: name,
            rows: Vec::new(),
        };
        let mut theta = self.family.initial();
        let theta0 = theta;
        let dt = self.config.dt;
        let mut status = FlowStatus::Completed;
        for step in 0..=self.config.steps {
            let t = step as f64 * dt;
            let rhs = match self.rhs(theta) {
                Ok(r) => r,
                Err(e) => {
                    status = FlowStatus::Aborted {
                        t,
                        reason: e.to_string(),
                        extinction_estimate: None,
                    };
                    break;
                }
            };
            trace.rows.push(FlowRow {
                t,
                theta,
                residual: rhs.residual,
                mean_r: rhs.mean_r,
                min_r: rhs.min_r,
                max_r: rhs.max_r,
            });
            if step == self.config.steps {
                break;
            }
            if let Some(c) = self.family.conformal_factor(theta) {
                if c < self.config.extinction_guard {
                    status = FlowStatus::Aborted {
                        t,
                        reason: format!("conformal factor {c} below guard {}", self.config.extinction_guard),
                        extinction_estimate: trace.extinction_estimate(&self.family),
                    };
                    break;
                }
            }
            match self.advance(theta, &rhs) {
                Ok(next) => theta = next,
                Err(e) => {
                    status = FlowStatus::Aborted {
                        t,
                        reason: e.to_string(),
                        extinction_estimate: trace.extinction_estimate(&self.family),
                    };
                    break;
                }
            }
        }
        let max_drift = trace
            .rows
            .iter()
            .map(|r| (r.theta - theta0).abs())
            .fold(0.0, f64::max);
        FlowOutcome {
            trace,
            status,
            max_drift,
        }
    }
}

/// Single step without keeping a problem around.
pub fn parametric_flow_step(
    family: &ParametricFamily,
    theta: f64,
    config: &FlowConfig,
) -> Result<(f64, ProjectedRhs)> {
    let problem = FlowProblem::new(family.clone(), config.clone())?;
    let rhs = problem.rhs(theta)?;
    Ok((problem.advance(theta, &rhs)?, rhs))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlowRow {
    pub t: f64,
    pub theta: f64,
    pub residual: f64,
    pub mean_r: f64,
    pub min_r: f64,
    pub max_r: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlowTrace {
    pub parameter: String,
    pub rows: Vec<FlowRow>,
}

impl FlowTrace {
    pub fn to_csv(&self) -> String {
        let mut out = csv_line(
            ["t", &self.parameter, "residual", "meanR", "minR", "maxR"]
                .iter()
                .map(|s| s.to_string()),
        );
        for r in &self.rows {
            out.push_str(&csv_line(
                [r.t, r.theta, r.residual, r.mean_r, r.min_r, r.max_r]
                    .iter()
                    .map(|v| fmt_csv(*v)),
            ));
        }
        out
    }

    /// Linear extrapolation of the conformal factor to zero from the last
    /// two rows.
    pub fn extinction_estimate(&self, family: &ParametricFamily) -> Option<f64> {
        let k = self.rows.len();
        if k < 2 {
            return None;
        }
        let (a, b) = (&self.rows[k - 2], &self.rows[k - 1]);
        let ca = family.conformal_factor(a.theta)?;
        let cb = family.conformal_factor(b.theta)?;
        let slope = (cb - ca) / (b.t - a.t);
        if !(slope < 0.0) {
            return None;
        }
        Some(b.t - cb / slope)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FlowStatus {
    Completed,
    Aborted {
        t: f64,
        reason: String,
        extinction_estimate: Option<f64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlowOutcome {
    pub trace: FlowTrace,
    pub status: FlowStatus,
    /// `max_t |θ(t) - θ(0)|`
    pub max_drift: f64,
}

impl FlowOutcome {
    pub fn final_theta(&self) -> f64 {
        self.trace.rows.last().map(|r| r.theta).unwrap_or(f64::NAN)
    }

    pub fn is_fixed_point(&self, tol: f64) -> bool {
        self.status == FlowStatus::Completed && self.max_drift <= tol
    }
}

/// `t* = r0² / (2(n-1))`
pub fn extinction_time(n: usize, r0: f64) -> f64 {
    r0 * r0 / (2.0 * (n as f64 - 1.0))
}

/// `c(t) = 1 - 2(n-1)t/r0²` for `F² = c(t) F₀²` on the round sphere.
pub fn constant_curvature_oracle(n: usize, r0: f64, t: f64) -> Result<f64> {
    let ts = extinction_time(n, r0);
    if t >= ts {
        return Err(FinslerError::Extinct { t, extinction: ts });
    }
    Ok(1.0 - t / ts)
}
