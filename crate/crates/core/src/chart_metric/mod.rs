//! Single-chart (α, β)-metrics `F = α φ(β/α)`, tangent samples and the
//! built-in fixtures.

mod fields;
pub mod fixtures;
mod sampling;

pub use fields::{
    AlphaKind, BetaKind, OneFormField, PhiKind, PhiProfile, Polynomial, RiemannianField,
};
pub use sampling::{random_samples, sample_lattice, DirectionSet};

use serde::{Deserialize, Serialize};

use crate::error::{FinslerError, Result};
use crate::jet_calculus::{JetSpace, Scalar};
use crate::linalg::{min_eigenvalue, Mat};

/// Coordinate box and base-point grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartSpec {
    pub dim: usize,
    pub bounds: Vec<(f64, f64)>,
    pub grid: Vec<usize>,
}

impl ChartSpec {
    pub fn cube(dim: usize, half_width: f64, grid_per_axis: usize) -> Self {
        Self {
            dim,
            bounds: vec![(-half_width, half_width); dim],
            grid: vec![grid_per_axis; dim],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(FinslerError::InvalidChart(format!(
                "dimension must be >= 2, got {}",
                self.dim
            )));
        }
        if self.bounds.len() != self.dim || self.grid.len() != self.dim {
            return Err(FinslerError::InvalidChart(
                "bounds and grid must have one entry per axis".into(),
            ));
        }
        for (axis, (lo, hi)) in self.bounds.iter().enumerate() {
            if !(hi - lo > 0.0) {
                return Err(FinslerError::InvalidChart(format!(
                    "axis {axis} has non-positive width [{lo}, {hi}]"
                )));
            }
        }
        if self.grid.iter().any(|&g| g < 1) {
            return Err(FinslerError::InvalidChart("grid counts must be >= 1".into()));
        }
        Ok(())
    }

    /// Grid base points in lexicographic order (last axis fastest).
    pub fn base_points(&self) -> Vec<Vec<f64>> {
        let axes: Vec<Vec<f64>> = self
            .bounds
            .iter()
            .zip(&self.grid)
            .map(|(&(lo, hi), &k)| {
                if k == 1 {
                    vec![0.5 * (lo + hi)]
                } else {
                    (0..k)
                        .map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64)
                        .collect()
                }
            })
            .collect();
        let mut out = vec![Vec::new()];
        for axis in &axes {
            out = out
                .into_iter()
                .flat_map(|p| {
                    axis.iter().map(move |&v| {
                        let mut q = p.clone();
                        q.push(v);
                        q
                    })
                })
                .collect();
        }
        out
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(&self.bounds)
            .all(|(v, (lo, hi))| *v >= *lo && *v <= *hi)
    }
}

/// `F = α φ(β/α)` on one chart.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FinslerMetricSpec {
    pub name: String,
    pub chart: ChartSpec,
    pub alpha: RiemannianField,
    pub beta: OneFormField,
    pub phi: PhiProfile,
}

/// A point of `TM_0` with its cached `s = β/α`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangentSample {
    pub id: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub s: f64,
    pub admissible: bool,
}

/// Outcome of [`FinslerMetricSpec::admissibility_check`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdmissibilityVerdict {
    pub s_in_range: bool,
    pub alpha_positive: bool,
    pub g_positive_definite: bool,
    /// `φ - sφ' + (b² - s²)φ''` at the sample (NaN if unavailable).
    pub positivity_functional: f64,
    /// Smallest eigenvalue of `g_y` (NaN if unavailable).
    pub min_eigenvalue: f64,
}

impl AdmissibilityVerdict {
    pub fn admissible(&self) -> bool {
        self.s_in_range && self.alpha_positive && self.g_positive_definite
    }
}

/// The pieces `α², β, s` of an (α, β)-metric at one point.
pub struct AlphaBeta<T> {
    pub alpha_sq: T,
    pub alpha: T,
    pub beta: T,
    pub s: T,
}

impl FinslerMetricSpec {
    pub fn dim(&self) -> usize {
        self.chart.dim
    }

    pub fn validate(&self) -> Result<()> {
        self.chart.validate()?;
        let n = self.dim();
        self.alpha.validate_shape(n)?;
        self.beta.validate_shape(n)?;
        self.phi.validate()?;
        for x in self.chart.base_points() {
            let a = self.alpha_matrix(&x);
            let lam = min_eigenvalue(&a);
            if !(lam > 0.0) {
                return Err(FinslerError::RiemannianField(format!(
                    "a_ij not positive definite at x = {x:?} (min eigenvalue {lam:e})"
                )));
            }
            let b_norm = self.b_norm_sq(&x).sqrt();
            if !(b_norm < self.phi.b0) {
                return Err(FinslerError::OneFormField(format!(
                    "|b|_alpha = {b_norm} at x = {x:?} is not below b0 = {}",
                    self.phi.b0
                )));
            }
        }
        Ok(())
    }

    pub fn alpha_matrix(&self, x: &[f64]) -> Mat {
        let n = self.dim();
        Mat::from_row_slice(n, n, &self.alpha.eval(x))
    }

    pub fn b_vector(&self, x: &[f64]) -> Vec<f64> {
        self.beta.eval(x)
    }

    /// `‖b‖²_α = a^{ij} b_i b_j`
    pub fn b_norm_sq(&self, x: &[f64]) -> f64 {
        let a = self.alpha_matrix(x);
        let b = nalgebra::DVector::from_vec(self.b_vector(x));
        match a.clone().cholesky() {
            Some(ch) => b.dot(&ch.solve(&b)),
            None => f64::NAN,
        }
    }

    pub fn alpha_beta<T: Scalar>(&self, x: &[T], y: &[T]) -> Result<AlphaBeta<T>> {
        let n = self.dim();
        let a = self.alpha.eval(x);
        let mut alpha_sq = y[0].constant_like(0.0);
        for i in 0..n {
            for j in 0..n {
                alpha_sq = alpha_sq.add(&a[i * n + j].mul(&y[i]).mul(&y[j]));
            }
        }
        if !(alpha_sq.value() > 0.0) {
            return Err(FinslerError::InadmissibleSample(format!(
                "alpha^2 = {} is not positive",
                alpha_sq.value()
            )));
        }
        let alpha = alpha_sq.sqrt();
        let b = self.beta.eval(x);
        let mut beta = y[0].constant_like(0.0);
        for i in 0..n {
            beta = beta.add(&b[i].mul(&y[i]));
        }
        let s = beta.div(&alpha);
        Ok(AlphaBeta {
            alpha_sq,
            alpha,
            beta,
            s,
        })
    }

    /// `F²` on any scalar type; `α²φ²` avoids a square root round trip in the
    /// Riemannian case, so `C` vanishes exactly there.
    pub fn f_squared<T: Scalar>(&self, x: &[T], y: &[T]) -> Result<T> {
        let ab = self.alpha_beta(x, y)?;
        if self.phi.is_riemannian() {
            return Ok(ab.alpha_sq);
        }
        let phi = self.phi.eval(&ab.s)?;
        Ok(ab.alpha_sq.mul(&phi.square()))
    }

    pub fn f_value<T: Scalar>(&self, x: &[T], y: &[T]) -> Result<T> {
        let ab = self.alpha_beta(x, y)?;
        let phi = self.phi.eval(&ab.s)?;
        Ok(ab.alpha.mul(&phi))
    }

    /// Builds a sample, caching `s`; admissibility is decided separately.
    pub fn sample(&self, id: usize, x: Vec<f64>, y: Vec<f64>) -> TangentSample {
        let s = self
            .alpha_beta(&x, &y)
            .map(|ab| ab.s)
            .unwrap_or(f64::NAN);
        TangentSample {
            id,
            x,
            y,
            s,
            admissible: false,
        }
    }

    /// `F(x, y) = α φ(s)`.
    pub fn evaluate_f(&self, sample: &TangentSample) -> Result<f64> {
        if sample.y.iter().all(|v| *v == 0.0) {
            return Err(FinslerError::InadmissibleSample("y = 0".into()));
        }
        let ab = self.alpha_beta(&sample.x, &sample.y)?;
        // s_range restricts sampling; evaluation only needs s inside (-b0, b0)
        if !(ab.s.abs() < self.phi.b0) {
            return Err(FinslerError::InadmissibleSample(format!(
                "s = {} outside the phi domain (-{b0}, {b0})",
                ab.s,
                b0 = self.phi.b0
            )));
        }
        let phi = self.phi.eval(&ab.s)?;
        if !(phi > 0.0) {
            return Err(FinslerError::NonPositiveValue(format!("phi(s = {}) = {phi}", ab.s)));
        }
        Ok(ab.alpha * phi)
    }

    /// Fundamental tensor `g_ij = ½ ∂²F²/∂y^i∂y^j` from a vertical jet.
    pub fn fundamental_tensor(&self, x: &[f64], y: &[f64]) -> Result<Mat> {
        let n = self.dim();
        let sp = JetSpace::new(n, 2);
        let xs: Vec<_> = x.iter().map(|&v| sp.constant(v)).collect();
        let ys: Vec<_> = (0..n).map(|i| sp.variable(i, y[i])).collect();
        let f2 = self.f_squared(&xs, &ys)?;
        Ok(Mat::from_fn(n, n, |i, j| 0.5 * f2.partial_vars(&[i, j])))
    }

    /// Flags `s ∈ s_range`, `α > 0`, and `g_y > 0` (positivity functional and
    /// eigenvalues). Never fails; failures are encoded in the verdict.
    pub fn admissibility_check(&self, sample: &TangentSample) -> AdmissibilityVerdict {
        let mut v = AdmissibilityVerdict {
            s_in_range: false,
            alpha_positive: false,
            g_positive_definite: false,
            positivity_functional: f64::NAN,
            min_eigenvalue: f64::NAN,
        };
        if sample.y.iter().all(|c| *c == 0.0) {
            return v;
        }
        let ab = match self.alpha_beta(&sample.x, &sample.y) {
            Ok(ab) => ab,
            Err(_) => return v,
        };
        v.alpha_positive = ab.alpha > 0.0;
        v.s_in_range = self.phi.s_in_range(ab.s);
        if !v.s_in_range {
            return v;
        }
        v.positivity_functional = self
            .phi
            .positivity_functional(ab.s, self.b_norm_sq(&sample.x))
            .unwrap_or(f64::NAN);
        if let Ok(g) = self.fundamental_tensor(&sample.x, &sample.y) {
            v.min_eigenvalue = min_eigenvalue(&g);
        }
        v.g_positive_definite = v.positivity_functional > 0.0 && v.min_eigenvalue > 0.0;
        v
    }

    /// Builds a sample and marks it admissible according to the verdict.
    pub fn checked_sample(&self, id: usize, x: Vec<f64>, y: Vec<f64>) -> TangentSample {
        let mut s = self.sample(id, x, y);
        s.admissible = self.admissibility_check(&s).admissible();
        s
    }

    pub fn describe(&self) -> String {
        format!(
            "{}: n={}, alpha={}, beta={}, phi={}",
            self.name,
            self.dim(),
            self.alpha.descriptor(),
            self.beta.descriptor(),
            self.phi.name()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn evaluate_f_examples() {
        let euc = euclidean(3);
        let s = euc.sample(0, vec![0.0; 3], vec![3.0, 4.0, 0.0]);
        assert_eq!(euc.evaluate_f(&s).unwrap(), 5.0);

        let mr = minkowski_randers(3);
        let s = mr.sample(0, vec![0.0; 3], vec![1.0, 0.0, 0.0]);
        assert!((mr.evaluate_f(&s).unwrap() - 1.3).abs() < 1e-15);

        let kr = kropina(3);
        let s = kr.sample(0, vec![0.0; 3], vec![1.0, 0.0, 0.0]);
        assert!((kr.evaluate_f(&s).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn kropina_rejects_s_zero() {
        let kr = kropina(3);
        let s = kr.sample(0, vec![0.0; 3], vec![0.0, 1.0, 0.0]);
        let v = kr.admissibility_check(&s);
        assert!(!v.s_in_range);
        assert!(!v.admissible());
        assert!(matches!(
            kr.evaluate_f(&s),
            Err(FinslerError::SingularEvaluation(_))
        ));
    }

    #[test]
    fn euclidean_always_admissible() {
        let euc = euclidean(3);
        for y in [[1.0, 0.0, 0.0], [0.3, -2.0, 0.1], [-1.0, -1.0, -1.0]] {
            let s = euc.sample(0, vec![0.5, -0.2, 0.9], y.to_vec());
            assert!(euc.admissibility_check(&s).admissible());
        }
    }

    #[test]
    fn zero_vector_is_inadmissible() {
        let euc = euclidean(3);
        let s = euc.sample(0, vec![0.0; 3], vec![0.0; 3]);
        assert!(!euc.admissibility_check(&s).admissible());
        assert!(euc.evaluate_f(&s).is_err());
    }

    #[test]
    fn admissibility_is_pure() {
        let mr = randers_var(3);
        let s = mr.sample(0, vec![0.3, 0.1, -0.4], vec![0.2, 1.0, -0.5]);
        assert_eq!(mr.admissibility_check(&s), mr.admissibility_check(&s));
    }

    #[test]
    fn oversized_one_form_fails_validation() {
        let mut spec = minkowski_randers(3);
        spec.beta = OneFormField::new(BetaKind::Constant {
            b: vec![1.2, 0.0, 0.0],
        });
        assert!(matches!(spec.validate(), Err(FinslerError::OneFormField(_))));
    }

    #[test]
    fn base_point_grid() {
        let c = ChartSpec::cube(3, 1.0, 2);
        let pts = c.base_points();
        assert_eq!(pts.len(), 8);
        assert_eq!(pts[0], vec![-1.0, -1.0, -1.0]);
        assert_eq!(pts[7], vec![1.0, 1.0, 1.0]);
        let c = ChartSpec {
            dim: 2,
            bounds: vec![(0.0, 2.0), (0.0, 1.0)],
            grid: vec![1, 3],
        };
        assert_eq!(c.base_points()[1], vec![1.0, 0.5]);
    }

    #[test]
    fn degenerate_chart_rejected() {
        let mut c = ChartSpec::cube(3, 1.0, 2);
        c.bounds[1] = (0.5, 0.5);
        assert!(c.validate().is_err());
        assert!(ChartSpec::cube(1, 1.0, 2).validate().is_err());
    }
}
