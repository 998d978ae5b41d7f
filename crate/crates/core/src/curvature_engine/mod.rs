//! Spray, Riemann curvature, Ricci scalar and its vertical derivatives.
//!
//! `G^i`, `R^i_k` and `Ric` come from one order-4 jet of `F²` in all `2n`
//! variables. Derivatives of `Ric` and `R = Ric/F²` in `y` are finite
//! differences over re-evaluations of that pipeline.

mod christoffel;

use rayon::prelude::*;
use serde::Serialize;

pub use christoffel::{christoffel_oracle, ChristoffelData};

use crate::chart_metric::{FinslerMetricSpec, TangentSample};
use crate::error::{FinslerError, Result};
use crate::jet_calculus::{fd_symmetric_tensors, mixed_jet, FdConfig, Jet, JetSpace, Scalar, TmField};
use crate::linalg::{row_major, Mat, Tensor3, Vector};
use crate::report::{csv_line, fmt_csv, ser_f64, ser_f64_vec};
use crate::tensor_lab::{compute_bundle, TensorBundle};

/// Spray coefficients as order-2 jets in `(x, y)` at the sample.
///
/// `G^i = ¼ g^{il} ([F²]_{x^k y^l} y^k - [F²]_{x^l})`, with `g⁻¹` expanded as
/// `(1 - P + P²) M` where `M` is the inverse at the sample and `P = M Δ`.
/// `Δ` has no constant term, so the series is exact to order 2.
pub fn spray_jets(spec: &FinslerMetricSpec, sample: &TangentSample) -> Result<Vec<Jet>> {
    let n = spec.dim();
    let f2 = mixed_jet(spec, TmField::FSquared, sample, 4)?;
    let sp = JetSpace::new(2 * n, 2);
    let dy: Vec<Jet> = (0..n).map(|l| f2.derivative(n + l)).collect();
    let g: Vec<Vec<Jet>> = (0..n)
        .map(|i| (0..n).map(|l| dy[i].derivative(n + l).scale(0.5)).collect())
        .collect();
    let a: Vec<Jet> = (0..n)
        .map(|l| {
            let mut acc = f2.derivative(l).truncate(2).scale(-1.0);
            for k in 0..n {
                let yk = sp.variable(n + k, sample.y[k]);
                acc = acc.add(&dy[l].derivative(k).mul(&yk));
            }
            acc
        })
        .collect();
    let g0 = Mat::from_fn(n, n, |i, j| g[i][j].value());
    let m = g0
        .clone()
        .try_inverse()
        .ok_or(FinslerError::NotPositiveDefinite {
            min_eigenvalue: crate::linalg::min_eigenvalue(&g0),
        })?;
    // P = M Δ
    let p: Vec<Vec<Jet>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut acc = sp.constant(0.0);
                    for k in 0..n {
                        acc = acc.add(&g[k][j].add_const(-g0[(k, j)]).scale(m[(i, k)]));
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let apply_p = |v: &[Jet]| -> Vec<Jet> {
        (0..n)
            .map(|i| {
                let mut acc = sp.constant(0.0);
                for j in 0..n {
                    acc = acc.add(&p[i][j].mul(&v[j]));
                }
                acc
            })
            .collect()
    };
    let ma: Vec<Jet> = (0..n)
        .map(|i| {
            let mut acc = sp.constant(0.0);
            for l in 0..n {
                acc = acc.add(&a[l].scale(m[(i, l)]));
            }
            acc
        })
        .collect();
    let pv = apply_p(&ma);
    let ppv = apply_p(&pv);
    Ok((0..n)
        .map(|i| ma[i].sub(&pv[i]).add(&ppv[i]).scale(0.25))
        .collect())
}

pub fn spray_coefficients(spec: &FinslerMetricSpec, sample: &TangentSample) -> Result<Vec<f64>> {
    Ok(spray_jets(spec, sample)?.iter().map(|j| j.value()).collect())
}

/// `R^i_k` and its trace.
#[derive(Clone, Debug)]
pub struct RiemannCurvature {
    pub spray: Vec<f64>,
    pub rmk: Mat,
    pub ric: f64,
}

/// `R^i_k = 2∂G^i/∂x^k - y^j ∂²G^i/∂x^j∂y^k + 2G^j ∂²G^i/∂y^j∂y^k - ∂G^i/∂y^j ∂G^j/∂y^k`
pub fn riemann_curvature(spec: &FinslerMetricSpec, sample: &TangentSample) -> Result<RiemannCurvature> {
    let n = spec.dim();
    let gj = spray_jets(spec, sample)?;
    let spray: Vec<f64> = gj.iter().map(|j| j.value()).collect();
    let dy = Mat::from_fn(n, n, |i, j| gj[i].partial_vars(&[n + j]));
    let rmk = Mat::from_fn(n, n, |i, k| {
        let mut acc = 2.0 * gj[i].partial_vars(&[k]);
        for j in 0..n {
            acc -= sample.y[j] * gj[i].partial_vars(&[j, n + k]);
            acc += 2.0 * spray[j] * gj[i].partial_vars(&[n + j, n + k]);
            acc -= dy[(i, j)] * dy[(j, k)];
        }
        acc
    });
    let ric = rmk.trace();
    Ok(RiemannCurvature { spray, rmk, ric })
}

/// `Ric` and `R = Ric/F²` at `(x, y)`.
pub fn ricci_scalars(spec: &FinslerMetricSpec, x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    let s = spec.sample(0, x.to_vec(), y.to_vec());
    let ric = riemann_curvature(spec, &s)?.ric;
    let f2 = spec.f_squared(x, y)?;
    Ok((ric, ric / f2))
}

/// `Ric_ij = ½ [Ric]_{y^i y^j}` at `(x, y)` by finite differences.
pub fn ricci_tensor(spec: &FinslerMetricSpec, x: &[f64], y: &[f64], fd: &FdConfig) -> Result<Mat> {
    let n = y.len();
    let ricf = |yy: &[f64]| -> Result<Vec<f64>> { Ok(vec![ricci_scalars(spec, x, yy)?.0]) };
    let t = fd_symmetric_tensors(&ricf, y, 2, fd)?;
    Ok(Mat::from_fn(n, n, |i, j| 0.5 * t.hess[0][i * n + j]))
}

/// `ρ = g^{jk} Ric_jk` at `(x, y)`.
pub fn rho_at(spec: &FinslerMetricSpec, x: &[f64], y: &[f64], fd: &FdConfig) -> Result<f64> {
    rho_from(spec, x, y, &ricci_tensor(spec, x, y, fd)?)
}

fn rho_from(spec: &FinslerMetricSpec, x: &[f64], y: &[f64], ric: &Mat) -> Result<f64> {
    let g = spec.fundamental_tensor(x, y)?;
    let ginv = g
        .clone()
        .cholesky()
        .ok_or(FinslerError::NotPositiveDefinite {
            min_eigenvalue: crate::linalg::min_eigenvalue(&g),
        })?
        .inverse();
    Ok(ginv.component_mul(ric).sum())
}

/// The outer layer of a nested difference (a gradient of an FD Hessian)
/// takes a larger step: rounding noise from the inner layer is divided by
/// the outer step, while the truncation error of the smooth inner result
/// stays far below it.
pub const NESTED_STEP_FACTOR: f64 = 10.0;

/// Everything curvature-related at one sample.
#[derive(Clone, Debug)]
pub struct CurvatureBundle {
    pub n: usize,
    pub tensors: TensorBundle,
    pub spray: Vec<f64>,
    pub rmk: Mat,
    pub ric: f64,
    /// `R = Ric/F²`
    pub rnorm: f64,
    /// `Ric_ij = ½ [Ric]_{y^i y^j}`
    pub ric_ij: Mat,
    /// `Ric_{ij,k} = ∂Ric_ij/∂y^k`
    pub ric_ijk: Tensor3,
    pub rho: f64,
    /// `∂ρ/∂y^i` by differencing `ρ` itself.
    pub rho_i: Vector,
    /// `∂Ric/∂y^i`
    pub ric_grad: Vector,
    /// `∂Ric_ij/∂y^k` by differencing `Ric_ij` itself, stored `(i, j, k)`.
    pub ric_ij_grad: Tensor3,
    pub r_der1: Vector,
    pub r_der2: Mat,
    pub r_der3: Tensor3,
}

impl CurvatureBundle {
    /// `Ric^{ij}`
    pub fn ric_up(&self) -> Mat {
        self.tensors.raise2(&self.ric_ij)
    }

    /// `ρ^i = g^{ij} ρ_j`
    pub fn rho_up(&self) -> Vector {
        &self.tensors.g_inv * &self.rho_i
    }

    /// `∂ρ/∂y^i` by the product rule, `-2 C^{jk}_i Ric_jk + g^{jk} Ric_{jk,i}`.
    pub fn rho_i_product_rule(&self) -> Vector {
        let n = self.n;
        let t = &self.tensors;
        let ric_up = self.ric_up();
        Vector::from_fn(n, |i, _| {
            let mut acc = 0.0;
            for j in 0..n {
                for k in 0..n {
                    acc += -2.0 * ric_up[(j, k)] * t.c.get(i, j, k) + t.g_inv[(j, k)] * self.ric_ijk.get(j, k, i);
                }
            }
            acc
        })
    }
}

/// Full curvature bundle; vertical derivatives by finite differences.
pub fn compute_curvature(
    spec: &FinslerMetricSpec,
    sample: &TangentSample,
    fd: &FdConfig,
) -> Result<CurvatureBundle> {
    let n = spec.dim();
    let tensors = compute_bundle(spec, sample)?;
    let rc = riemann_curvature(spec, sample)?;
    let x = sample.x.clone();
    let f = |y: &[f64]| -> Result<Vec<f64>> {
        let (ric, r) = ricci_scalars(spec, &x, y)?;
        Ok(vec![ric, r])
    };
    let t = fd_symmetric_tensors(&f, &sample.y, 3, fd)?;
    let ric_ij = Mat::from_fn(n, n, |i, j| 0.5 * t.hess[0][i * n + j]);
    let ric_ijk = Tensor3 {
        n,
        data: t.third[0].iter().map(|v| 0.5 * v).collect(),
    };
    let rho = (0..n)
        .flat_map(|j| (0..n).map(move |k| (j, k)))
        .map(|(j, k)| tensors.g_inv[(j, k)] * ric_ij[(j, k)])
        .sum();
    // ρ and Ric_ij as functions of y, differenced once more
    let nested = |y: &[f64]| -> Result<Vec<f64>> {
        let ric = ricci_tensor(spec, &x, y, fd)?;
        let mut out = vec![rho_from(spec, &x, y, &ric)?];
        out.extend(row_major(&ric));
        Ok(out)
    };
    let outer = FdConfig {
        base_step: fd.base_step * NESTED_STEP_FACTOR,
        ..fd.clone()
    };
    let nt = fd_symmetric_tensors(&nested, &sample.y, 1, &outer)?;
    let ric_ij_grad = Tensor3::from_fn(n, |i, j, k| nt.grad[1 + i * n + j][k]);
    let f2 = tensors.f * tensors.f;
    Ok(CurvatureBundle {
        n,
        spray: rc.spray,
        rmk: rc.rmk,
        ric: rc.ric,
        rnorm: rc.ric / f2,
        ric_ij,
        ric_ijk,
        rho,
        rho_i: Vector::from_vec(nt.grad[0].clone()),
        ric_grad: Vector::from_vec(t.grad[0].clone()),
        ric_ij_grad,
        r_der1: Vector::from_vec(t.grad[1].clone()),
        r_der2: Mat::from_row_slice(n, n, &t.hess[1]),
        r_der3: Tensor3 {
            n,
            data: t.third[1].clone(),
        },
        tensors,
    })
}

/// Per-base-point spread of `R` over sampled directions.
#[derive(Clone, Debug, Serialize)]
pub struct PointDiagnostic {
    #[serde(serialize_with = "ser_f64_vec")]
    pub x: Vec<f64>,
    pub directions: usize,
    #[serde(serialize_with = "ser_f64")]
    pub mean_r: f64,
    #[serde(serialize_with = "ser_f64")]
    pub deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiagnosticReport {
    pub per_point: Vec<PointDiagnostic>,
    #[serde(serialize_with = "ser_f64")]
    pub max_rel_deviation: f64,
    #[serde(serialize_with = "ser_f64")]
    pub tolerance: f64,
    pub einstein: bool,
}

impl DiagnosticReport {
    pub fn mean_r_per_x(&self) -> Vec<f64> {
        self.per_point.iter().map(|p| p.mean_r).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,mean_R,deviation\n");
        for p in &self.per_point {
            let x = p.x.iter().map(|v| fmt_csv(*v)).collect::<Vec<_>>().join(" ");
            out.push_str(&csv_line([x, fmt_csv(p.mean_r), fmt_csv(p.deviation)]));
        }
        out
    }
}

pub const TOL_EINSTEIN: f64 = 1e-4;
const EINSTEIN_GUARD: f64 = 1e-12;

/// Groups samples by base point and measures how far `R` is from depending
/// on `x` alone.
pub fn einstein_diagnostic(
    spec: &FinslerMetricSpec,
    samples: &[TangentSample],
    tol: f64,
) -> Result<DiagnosticReport> {
    let n = spec.dim();
    let mut groups: Vec<(Vec<f64>, Vec<&TangentSample>)> = Vec::new();
    for s in samples {
        match groups.iter_mut().find(|(x, _)| *x == s.x) {
            Some((_, v)) => v.push(s),
            None => groups.push((s.x.clone(), vec![s])),
        }
    }
    if let Some((x, v)) = groups.iter().find(|(_, v)| v.len() < n + 1) {
        return Err(FinslerError::InvalidArgument(format!(
            "einstein diagnostic needs at least {} directions per base point, got {} at {:?}",
            n + 1,
            v.len(),
            x
        )));
    }
    let per_point = groups
        .par_iter()
        .map(|(x, v)| -> Result<PointDiagnostic> {
            let rs = v
                .iter()
                .map(|s| ricci_scalars(spec, &s.x, &s.y).map(|r| r.1))
                .collect::<Result<Vec<f64>>>()?;
            let mean = rs.iter().sum::<f64>() / rs.len() as f64;
            let dev = rs
                .iter()
                .map(|r| (r - mean).abs() / (mean.abs() + EINSTEIN_GUARD))
                .fold(0.0, f64::max);
            Ok(PointDiagnostic {
                x: x.clone(),
                directions: rs.len(),
                mean_r: mean,
                deviation: dev,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_rel_deviation = per_point.iter().map(|p| p.deviation).fold(0.0, f64::max);
    Ok(DiagnosticReport {
        per_point,
        max_rel_deviation,
        tolerance: tol,
        einstein: max_rel_deviation <= tol,
    })
}

/// JSON record of a curvature bundle.
#[derive(Clone, Debug, Serialize)]
pub struct CurvatureRecord {
    pub sample_id: usize,
    #[serde(serialize_with = "ser_f64_vec")]
    pub x: Vec<f64>,
    #[serde(serialize_with = "ser_f64_vec")]
    pub y: Vec<f64>,
    #[serde(rename = "G", serialize_with = "ser_f64_vec")]
    pub g_spray: Vec<f64>,
    #[serde(rename = "Rmk", serialize_with = "ser_f64_vec")]
    pub rmk: Vec<f64>,
    #[serde(rename = "Ric", serialize_with = "ser_f64")]
    pub ric: f64,
    #[serde(rename = "Rnorm", serialize_with = "ser_f64")]
    pub rnorm: f64,
    #[serde(rename = "Ric_ij", serialize_with = "ser_f64_vec")]
    pub ric_ij: Vec<f64>,
    #[serde(serialize_with = "ser_f64")]
    pub rho: f64,
    #[serde(serialize_with = "ser_f64_vec")]
    pub rho_i: Vec<f64>,
    #[serde(rename = "R_der1", serialize_with = "ser_f64_vec")]
    pub r_der1: Vec<f64>,
    #[serde(rename = "R_der2", serialize_with = "ser_f64_vec")]
    pub r_der2: Vec<f64>,
    #[serde(rename = "R_der3", serialize_with = "ser_f64_vec")]
    pub r_der3: Vec<f64>,
}

impl CurvatureRecord {
    pub fn new(sample: &TangentSample, b: &CurvatureBundle) -> Self {
        Self {
            sample_id: sample.id,
            x: sample.x.clone(),
            y: sample.y.clone(),
            g_spray: b.spray.clone(),
            rmk: row_major(&b.rmk),
            ric: b.ric,
            rnorm: b.rnorm,
            ric_ij: row_major(&b.ric_ij),
            rho: b.rho,
            rho_i: b.rho_i.iter().copied().collect(),
            r_der1: b.r_der1.iter().copied().collect(),
            r_der2: row_major(&b.r_der2),
            r_der3: b.r_der3.data.clone(),
        }
    }
}

#[cfg(test)]
mod tests;
