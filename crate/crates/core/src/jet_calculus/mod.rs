//! Vertical (y) and horizontal (x) derivatives of scalar fields on `TM`.
//!
//! Two independent routes are available: exact truncated Taylor jets and
//! central finite differences with Richardson extrapolation. The jets are
//! used for `g`, `C` and the spray; finite differences cross-check them and
//! supply vertical derivatives of curvature quantities.

pub mod fd;
mod jet;

pub use fd::{
    fd_oracle, fd_partial_vec, fd_symmetric_tensors, FdConfig, FdEstimate, FdEvaluator, FdTensors,
};
pub use jet::{Jet, JetSpace, MonomialTable, Scalar};

use serde::{Deserialize, Serialize};

use crate::chart_metric::{FinslerMetricSpec, TangentSample};
use crate::error::{FinslerError, Result};

/// Differentiation route.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivMode {
    Taylor,
    FiniteDifference,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JetConfig {
    pub vertical_order: usize,
    pub horizontal_order: usize,
    pub mode: DerivMode,
}

impl Default for JetConfig {
    fn default() -> Self {
        Self {
            vertical_order: 3,
            horizontal_order: 2,
            mode: DerivMode::Taylor,
        }
    }
}

/// Scalar fields on `TM` derived from a metric spec.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TmField {
    F,
    FSquared,
}

impl TmField {
    pub fn eval<T: Scalar>(&self, spec: &FinslerMetricSpec, x: &[T], y: &[T]) -> Result<T> {
        match self {
            TmField::F => spec.f_value(x, y),
            TmField::FSquared => spec.f_squared(x, y),
        }
    }
}

/// Value and symmetric derivative tensors in one block of variables
/// (flattened row-major; empty when not requested).
#[derive(Clone, Debug, PartialEq)]
pub struct DerivativeTensors {
    pub n: usize,
    pub value: f64,
    pub grad: Vec<f64>,
    pub hess: Vec<f64>,
    pub third: Vec<f64>,
}

impl DerivativeTensors {
    pub fn hess_at(&self, i: usize, j: usize) -> f64 {
        self.hess[i * self.n + j]
    }

    pub fn third_at(&self, i: usize, j: usize, k: usize) -> f64 {
        self.third[(i * self.n + j) * self.n + k]
    }
}

fn check_order(order: usize, max: usize, what: &str) -> Result<()> {
    if order == 0 || order > max {
        return Err(FinslerError::InvalidArgument(format!(
            "{what} order must be in 1..={max}, got {order}"
        )));
    }
    Ok(())
}

fn tensors_from_jet(j: &Jet, offset: usize, n: usize, order: usize) -> DerivativeTensors {
    let m = j.nvars();
    let idx = |vars: &[usize]| {
        let mut e = vec![0u8; m];
        for &v in vars {
            e[offset + v] += 1;
        }
        j.partial(&e)
    };
    let grad = (0..n).map(|i| idx(&[i])).collect();
    let hess = if order >= 2 {
        (0..n * n).map(|k| idx(&[k / n, k % n])).collect()
    } else {
        Vec::new()
    };
    let third = if order >= 3 {
        (0..n * n * n)
            .map(|k| idx(&[k / (n * n), (k / n) % n, k % n]))
            .collect()
    } else {
        Vec::new()
    };
    DerivativeTensors {
        n,
        value: j.value(),
        grad,
        hess,
        third,
    }
}

fn tensors_from_fd(t: FdTensors, order: usize) -> DerivativeTensors {
    DerivativeTensors {
        n: t.n,
        value: t.value[0],
        grad: t.grad[0].clone(),
        hess: if order >= 2 { t.hess[0].clone() } else { Vec::new() },
        third: if order >= 3 { t.third[0].clone() } else { Vec::new() },
    }
}

/// Jet of `field` in all `2n` variables `(x, y)` at the sample.
pub fn mixed_jet(
    spec: &FinslerMetricSpec,
    field: TmField,
    sample: &TangentSample,
    order: usize,
) -> Result<Jet> {
    let n = spec.dim();
    let sp = JetSpace::new(2 * n, order);
    let xs: Vec<Jet> = (0..n).map(|i| sp.variable(i, sample.x[i])).collect();
    let ys: Vec<Jet> = (0..n).map(|i| sp.variable(n + i, sample.y[i])).collect();
    field.eval(spec, &xs, &ys)
}

/// Derivatives of `field` in `y` at fixed `x`, up to `order` (1..=3).
pub fn vertical_jet(
    spec: &FinslerMetricSpec,
    field: TmField,
    sample: &TangentSample,
    order: usize,
    mode: DerivMode,
    fd: &FdConfig,
) -> Result<DerivativeTensors> {
    check_order(order, 3, "vertical")?;
    let n = spec.dim();
    match mode {
        DerivMode::Taylor => {
            let sp = JetSpace::new(n, order);
            let xs: Vec<Jet> = sample.x.iter().map(|&v| sp.constant(v)).collect();
            let ys: Vec<Jet> = (0..n).map(|i| sp.variable(i, sample.y[i])).collect();
            let j = field.eval(spec, &xs, &ys)?;
            Ok(tensors_from_jet(&j, 0, n, order))
        }
        DerivMode::FiniteDifference => {
            let x = sample.x.clone();
            let f = move |y: &[f64]| field.eval(spec, &x, y).map(|v| vec![v]);
            Ok(tensors_from_fd(fd_symmetric_tensors(&f, &sample.y, order, fd)?, order))
        }
    }
}

/// Derivatives of `field` in `x` at fixed `y`, up to `order` (1..=2).
pub fn horizontal_jet(
    spec: &FinslerMetricSpec,
    field: TmField,
    sample: &TangentSample,
    order: usize,
    mode: DerivMode,
    fd: &FdConfig,
) -> Result<DerivativeTensors> {
    check_order(order, 2, "horizontal")?;
    let n = spec.dim();
    match mode {
        DerivMode::Taylor => {
            let sp = JetSpace::new(n, order);
            let xs: Vec<Jet> = (0..n).map(|i| sp.variable(i, sample.x[i])).collect();
            let ys: Vec<Jet> = sample.y.iter().map(|&v| sp.constant(v)).collect();
            let j = field.eval(spec, &xs, &ys)?;
            Ok(tensors_from_jet(&j, 0, n, order))
        }
        DerivMode::FiniteDifference => {
            let y = sample.y.clone();
            let f = move |x: &[f64]| field.eval(spec, x, &y).map(|v| vec![v]);
            Ok(tensors_from_fd(fd_symmetric_tensors(&f, &sample.x, order, fd)?, order))
        }
    }
}

/// Finite-difference partial of `field` for a multi-index over `(x, y)`
/// (length `2n`, total order <= 4). Returns `(value, error estimate)`.
pub fn fd_mixed_partial(
    spec: &FinslerMetricSpec,
    field: TmField,
    sample: &TangentSample,
    multi_index: &[u8],
    fd: &FdConfig,
) -> Result<(f64, f64)> {
    let n = spec.dim();
    let mut point = sample.x.clone();
    point.extend_from_slice(&sample.y);
    let f = move |p: &[f64]| field.eval(spec, &p[..n], &p[n..]);
    fd_oracle(&f, &point, multi_index, fd)
}
