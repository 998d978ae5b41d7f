//! Fundamental tensor, Cartan torsion, mean Cartan torsion and angular
//! metric at a tangent sample, plus the semi-C-reducibility fit
//!
//! ```text
//! C_ijk = p/(1+n) (h_ij I_k + h_jk I_i + h_ki I_j) + q/‖I‖² I_i I_j I_k,   p + q = 1.
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chart_metric::{FinslerMetricSpec, TangentSample};
use crate::error::{FinslerError, Result};
use crate::jet_calculus::{vertical_jet, DerivMode, FdConfig, TmField};
use crate::linalg::{row_major, max_abs_mat, max_abs_vec, min_eigenvalue, Mat, Tensor3, Vector};
use crate::report::{ser_f64, ser_f64_vec};

/// Below this `‖I‖²` a sample counts as Riemannian-degenerate.
pub const EPS_I: f64 = 1e-8;

/// Per-sample tensors of `F` at `(x, y)`.
#[derive(Clone, Debug)]
pub struct TensorBundle {
    pub n: usize,
    pub f: f64,
    pub y: Vector,
    pub g: Mat,
    pub g_inv: Mat,
    pub c: Tensor3,
    /// Mean Cartan torsion `I_i = g^{jk} C_ijk`.
    pub i_low: Vector,
    /// `y_i = g_ij y^j`
    pub y_low: Vector,
    /// `ℓ_i = y_i / F`
    pub ell: Vector,
    /// Angular metric `h_ij = g_ij - ℓ_i ℓ_j`.
    pub h: Mat,
    pub i_norm_sq: f64,
}

/// Worst residuals of the structural identities of a bundle.
#[derive(Clone, Debug, Serialize)]
pub struct BundleInvariants {
    /// `|C_ijk y^k|` relative to `max|C| |y|`.
    pub c_dot_y: f64,
    /// `|I_i y^i|` relative to `max|I| |y|`.
    pub i_dot_y: f64,
    /// `|h_ij y^j|` relative to `max|g| |y|`.
    pub h_dot_y: f64,
    /// `|h_ij I^j - I_i|` relative to `max|I|`.
    pub h_on_i: f64,
    /// `max|g g⁻¹ - 1|`
    pub g_inverse: f64,
    pub min_eigenvalue: f64,
}

impl BundleInvariants {
    pub fn worst(&self) -> f64 {
        [self.c_dot_y, self.i_dot_y, self.h_dot_y, self.h_on_i, self.g_inverse]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

fn rel(num: f64, scale: f64) -> f64 {
    if scale < 1e-300 {
        num
    } else {
        num / scale
    }
}

impl TensorBundle {
    /// Assembles the derived fields from `y`, `g` and `C`; `F = sqrt(g(y, y))`.
    pub fn from_parts(y: Vector, g: Mat, c: Tensor3) -> Result<Self> {
        let n = y.len();
        let lam = min_eigenvalue(&g);
        if !(lam > 0.0) {
            return Err(FinslerError::NotPositiveDefinite { min_eigenvalue: lam });
        }
        let g_inv = g
            .clone()
            .cholesky()
            .ok_or(FinslerError::NotPositiveDefinite { min_eigenvalue: lam })?
            .inverse();
        let y_low = &g * &y;
        let f = y_low.dot(&y).sqrt();
        let ell = &y_low / f;
        let h = &g - &ell * ell.transpose();
        let i_low = c.trace_with(&g_inv);
        let i_norm_sq = i_low.dot(&(&g_inv * &i_low));
        Ok(Self {
            n,
            f,
            y,
            g,
            g_inv,
            c,
            i_low,
            y_low,
            ell,
            h,
            i_norm_sq,
        })
    }

    /// `I^i = g^{ij} I_j`
    pub fn i_up(&self) -> Vector {
        &self.g_inv * &self.i_low
    }

    /// `ℓ^i = y^i / F`
    pub fn ell_up(&self) -> Vector {
        &self.y / self.f
    }

    pub fn i_norm(&self) -> f64 {
        self.i_norm_sq.max(0.0).sqrt()
    }

    pub fn is_riemannian_degenerate(&self) -> bool {
        self.i_norm_sq <= EPS_I
    }

    /// Raises both indices of a covariant 2-tensor with `g⁻¹`.
    pub fn raise2(&self, m: &Mat) -> Mat {
        &self.g_inv * m * &self.g_inv
    }

    pub fn invariants(&self) -> BundleInvariants {
        let n = self.n;
        let ynorm = self.y.norm();
        let c_scale = self.c.max_abs() * ynorm;
        let c_dot_y = rel(max_abs_mat(&self.c.contract_last(&self.y)), c_scale);
        let i_scale = max_abs_vec(&self.i_low);
        let i_dot_y = rel(self.i_low.dot(&self.y).abs(), i_scale * ynorm);
        let h_dot_y = rel(max_abs_vec(&(&self.h * &self.y)), max_abs_mat(&self.g) * ynorm);
        let h_on_i = rel(max_abs_vec(&(&self.h * self.i_up() - &self.i_low)), i_scale);
        let g_inverse = max_abs_mat(&(&self.g * &self.g_inv - Mat::identity(n, n)));
        BundleInvariants {
            c_dot_y,
            i_dot_y,
            h_dot_y,
            h_on_i,
            g_inverse,
            min_eigenvalue: min_eigenvalue(&self.g),
        }
    }

    /// `h_ij I_k + h_jk I_i + h_ki I_j`
    pub fn h_block(&self) -> Tensor3 {
        Tensor3::cyclic_outer(&self.h, &self.i_low)
    }

    /// `I_i I_j I_k / ‖I‖²`
    pub fn i_cubed_block(&self) -> Tensor3 {
        Tensor3::outer(&self.i_low, &self.i_low, &self.i_low).scale(1.0 / self.i_norm_sq)
    }

    /// The semi-C-reducible form with scalars `p`, `q`.
    pub fn semi_c_form(&self, p: f64, q: f64) -> Tensor3 {
        let n = self.n as f64;
        self.h_block()
            .scale(p / (1.0 + n))
            .add(&self.i_cubed_block().scale(q))
    }

    /// `κ = C_ijk I^i I^j I^k / ‖I‖⁴`
    pub fn kappa(&self) -> f64 {
        let iu = self.i_up();
        self.c.contract3(&iu, &iu, &iu) / (self.i_norm_sq * self.i_norm_sq)
    }
}

/// All tensors at an admissible sample from one order-3 vertical jet of `F²`.
pub fn compute_bundle(spec: &FinslerMetricSpec, sample: &TangentSample) -> Result<TensorBundle> {
    let n = spec.dim();
    let d = vertical_jet(
        spec,
        TmField::FSquared,
        sample,
        3,
        DerivMode::Taylor,
        &FdConfig::default(),
    )?;
    let g = Mat::from_fn(n, n, |i, j| 0.5 * d.hess_at(i, j));
    let c = Tensor3::from_fn(n, |i, j, k| 0.25 * d.third_at(i, j, k));
    let y = Vector::from_column_slice(&sample.y);
    let mut b = TensorBundle::from_parts(y, g, c)?;
    // F from the metric itself rather than sqrt(g(y,y)); equal by Euler.
    b.f = d.value.sqrt();
    b.ell = &b.y_low / b.f;
    b.h = &b.g - &b.ell * b.ell.transpose();
    Ok(b)
}

/// Max over samples of `‖I‖ = sqrt(g^{ij} I_i I_j)`.
pub fn deicke_indicator(spec: &FinslerMetricSpec, samples: &[TangentSample]) -> Result<f64> {
    if samples.is_empty() {
        return Err(FinslerError::InvalidArgument(
            "deicke indicator needs at least one sample".into(),
        ));
    }
    let mut worst: f64 = 0.0;
    for s in samples {
        worst = worst.max(compute_bundle(spec, s)?.i_norm());
    }
    Ok(worst)
}

/// Fitted semi-C scalars.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SemiCFit {
    #[serde(serialize_with = "ser_f64")]
    pub p: f64,
    #[serde(serialize_with = "ser_f64")]
    pub q: f64,
    #[serde(serialize_with = "ser_f64")]
    pub kappa: f64,
    /// `‖C - fitted‖_F / ‖C‖_F`
    #[serde(serialize_with = "ser_f64")]
    pub decomposition_residual: f64,
}

fn fit_gate(bundle: &TensorBundle, n: usize) -> Result<()> {
    if n < 3 {
        return Err(FinslerError::FitIllPosed(n));
    }
    if bundle.is_riemannian_degenerate() {
        return Err(FinslerError::RiemannianDegenerate(bundle.i_norm_sq));
    }
    Ok(())
}

fn decomposition_residual(bundle: &TensorBundle, p: f64, q: f64) -> f64 {
    let fitted = bundle.semi_c_form(p, q);
    let denom = bundle.c.frobenius();
    bundle.c.sub(&fitted).frobenius() / denom.max(1e-300)
}

/// Closed-form fit from the `I³` contraction.
///
/// Contracting the semi-C form with `I^i I^j I^k` gives
/// `κ = (3p + (1+n) q)/(1+n)`, each of the three `h`-terms contributing
/// `p/(1+n) ‖I‖⁴` because `h_ij I^j = I_i`. With `p = 1 - q` this is linear
/// in `q`.
pub fn semi_c_fit(bundle: &TensorBundle, n: usize) -> Result<SemiCFit> {
    fit_gate(bundle, n)?;
    let nf = n as f64;
    let kappa = bundle.kappa();
    let q = (kappa - 3.0 / (1.0 + nf)) * (1.0 + nf) / (nf - 2.0);
    let p = 1.0 - q;
    Ok(SemiCFit {
        p,
        q,
        kappa,
        decomposition_residual: decomposition_residual(bundle, p, q),
    })
}

/// Unconstrained least-squares fit of `C ≈ p A + q B` with `A` the `h`-block
/// over `1+n` and `B` the `I³` block; independent of `κ`.
pub fn semi_c_least_squares(bundle: &TensorBundle, n: usize) -> Result<SemiCFit> {
    fit_gate(bundle, n)?;
    let nf = n as f64;
    let a = bundle.h_block().scale(1.0 / (1.0 + nf));
    let b = bundle.i_cubed_block();
    let dot = |u: &Tensor3, v: &Tensor3| u.data.iter().zip(&v.data).map(|(x, y)| x * y).sum::<f64>();
    let (aa, ab, bb) = (dot(&a, &a), dot(&a, &b), dot(&b, &b));
    let (ac, bc) = (dot(&a, &bundle.c), dot(&b, &bundle.c));
    let det = aa * bb - ab * ab;
    if det.abs() <= 1e-14 * aa * bb {
        return Err(FinslerError::FitIllPosed(n));
    }
    let p = (ac * bb - bc * ab) / det;
    let q = (aa * bc - ab * ac) / det;
    Ok(SemiCFit {
        p,
        q,
        kappa: bundle.kappa(),
        decomposition_residual: decomposition_residual(bundle, p, q),
    })
}

/// Which closed form for `κ` a sample supports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KappaMatch {
    /// `(1 + n q)/(1 + n)`
    Displayed,
    /// `(3p + (1+n) q)/(1 + n)`
    DirectContraction,
    Both,
    Neither,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct KappaComparison {
    pub kappa: f64,
    pub displayed: f64,
    pub direct: f64,
    pub p: f64,
    pub q: f64,
    pub verdict: KappaMatch,
}

/// Compares `κ` against both candidate coefficients, with `(p, q)` from the
/// least-squares fit.
pub fn compare_kappa(bundle: &TensorBundle, n: usize, tol: f64) -> Result<KappaComparison> {
    let fit = semi_c_least_squares(bundle, n)?;
    let nf = n as f64;
    let displayed = (1.0 + nf * fit.q) / (1.0 + nf);
    let direct = (3.0 * fit.p + (1.0 + nf) * fit.q) / (1.0 + nf);
    let kappa = bundle.kappa();
    let close = |c: f64| (kappa - c).abs() <= tol * (kappa.abs() + c.abs()).max(1e-300);
    let verdict = match (close(displayed), close(direct)) {
        (true, true) => KappaMatch::Both,
        (true, false) => KappaMatch::Displayed,
        (false, true) => KappaMatch::DirectContraction,
        (false, false) => KappaMatch::Neither,
    };
    Ok(KappaComparison {
        kappa,
        displayed,
        direct,
        p: fit.p,
        q: fit.q,
        verdict,
    })
}

/// Random SPD `g`, direction `y` and mean torsion `I ⊥ y`, with `C` built
/// exactly from the semi-C form at `(1 - q, q)`.
pub fn synthetic_semi_c(n: usize, q: f64, seed: u64) -> Result<TensorBundle> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = Mat::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let g = &m * m.transpose() + Mat::identity(n, n) * (0.5 * n as f64);
    let y = Vector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
    let v = Vector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
    // project v so that I_i y^i = 0
    let y_low = &g * &y;
    let f_sq = y_low.dot(&y);
    let i_low = &v - &y_low * (v.dot(&y) / f_sq);
    let mut b = TensorBundle::from_parts(y, g, Tensor3::zeros(n))?;
    b.i_norm_sq = i_low.dot(&(&b.g_inv * &i_low));
    b.i_low = i_low;
    let c = b.semi_c_form(1.0 - q, q);
    TensorBundle::from_parts(b.y.clone(), b.g.clone(), c)
}

/// JSON record of a bundle; floats are emitted as round-trip decimal strings.
#[derive(Clone, Debug, Serialize)]
pub struct BundleRecord {
    pub sample_id: usize,
    #[serde(serialize_with = "ser_f64_vec")]
    pub x: Vec<f64>,
    #[serde(serialize_with = "ser_f64_vec")]
    pub y: Vec<f64>,
    #[serde(rename = "F", serialize_with = "ser_f64")]
    pub f: f64,
    #[serde(serialize_with = "ser_f64_vec")]
    pub g: Vec<f64>,
    #[serde(serialize_with = "ser_f64_vec")]
    pub g_inv: Vec<f64>,
    #[serde(rename = "C", serialize_with = "ser_f64_vec")]
    pub c: Vec<f64>,
    #[serde(rename = "I", serialize_with = "ser_f64_vec")]
    pub i: Vec<f64>,
    #[serde(serialize_with = "ser_f64_vec")]
    pub y_low: Vec<f64>,
    #[serde(serialize_with = "ser_f64_vec")]
    pub ell: Vec<f64>,
    #[serde(serialize_with = "ser_f64_vec")]
    pub h: Vec<f64>,
    #[serde(rename = "I_normsq", serialize_with = "ser_f64")]
    pub i_norm_sq: f64,
}

impl BundleRecord {
    pub fn new(sample: &TangentSample, b: &TensorBundle) -> Self {
        Self {
            sample_id: sample.id,
            x: sample.x.clone(),
            y: sample.y.clone(),
            f: b.f,
            g: row_major(&b.g),
            g_inv: row_major(&b.g_inv),
            c: b.c.data.clone(),
            i: b.i_low.iter().copied().collect(),
            y_low: b.y_low.iter().copied().collect(),
            ell: b.ell.iter().copied().collect(),
            h: row_major(&b.h),
            i_norm_sq: b.i_norm_sq,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart_metric::fixtures::*;
    use crate::jet_calculus::{fd_symmetric_tensors, FdConfig};

    #[test]
    fn euclidean_bundle() {
        let spec = euclidean(3);
        let s = spec.sample(0, vec![0.2, 0.1, -0.5], vec![1.0, 2.0, -2.0]);
        let b = compute_bundle(&spec, &s).unwrap();
        assert_eq!(b.g, Mat::identity(3, 3));
        assert!(b.c.data.iter().all(|v| *v == 0.0));
        assert!(b.i_low.iter().all(|v| *v == 0.0));
        let expect_h = Mat::identity(3, 3) - &b.y * b.y.transpose() / 9.0;
        assert!((b.h - expect_h).abs().max() < 1e-15);
    }

    #[test]
    fn randers_mean_torsion_is_orthogonal_to_y() {
        let spec = minkowski_randers(3);
        let s = spec.sample(0, vec![0.0; 3], vec![0.3, 1.0, -0.4]);
        let b = compute_bundle(&spec, &s).unwrap();
        assert!(b.i_norm() > 1e-3);
        assert!(b.i_low.dot(&b.y).abs() < 1e-10);
        assert!(b.invariants().worst() < 1e-12, "{:?}", b.invariants());
    }

    #[test]
    fn sphere_is_torsion_free() {
        let spec = sphere(3, 1.0);
        let s = spec.sample(0, vec![0.3, -0.4, 0.2], vec![0.5, 1.0, 0.1]);
        let b = compute_bundle(&spec, &s).unwrap();
        assert!(b.c.max_abs() <= 1e-12);
    }

    #[test]
    fn cartan_equals_half_vertical_derivative_of_g() {
        let spec = randers_var(3);
        let s = spec.sample(0, vec![0.4, -0.2, 0.7], vec![0.3, 1.1, -0.6]);
        let b = compute_bundle(&spec, &s).unwrap();
        let x = s.x.clone();
        let gfun = |y: &[f64]| -> Result<Vec<f64>> {
            Ok(spec.fundamental_tensor(&x, y)?.iter().copied().collect())
        };
        let t = fd_symmetric_tensors(&gfun, &s.y, 1, &FdConfig::default()).unwrap();
        // column-major storage from nalgebra: entry (i, j) is component j*3+i
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let fd = 0.5 * t.grad[j * 3 + i][k];
                    assert!((b.c.get(i, j, k) - fd).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn deicke_separates_riemannian_from_randers() {
        let samples = |spec: &FinslerMetricSpec| crate::chart_metric::random_samples(spec, 20, 3);
        let e = euclidean(3);
        assert!(deicke_indicator(&e, &samples(&e)).unwrap() <= 1e-12);
        let sp = sphere(3, 1.0);
        assert!(deicke_indicator(&sp, &samples(&sp)).unwrap() <= 1e-10);
        let r = minkowski_randers(3);
        assert!(deicke_indicator(&r, &samples(&r)).unwrap() >= 1e-3);
    }

    #[test]
    fn randers_and_kropina_are_c_reducible() {
        for spec in [minkowski_randers(3), kropina(3)] {
            for s in crate::chart_metric::random_samples(&spec, 10, 11) {
                let b = compute_bundle(&spec, &s).unwrap();
                let fit = semi_c_fit(&b, 3).unwrap();
                assert!(fit.q.abs() <= 1e-6, "{}: q = {}", spec.name, fit.q);
                assert!(fit.decomposition_residual <= 1e-8);
            }
        }
    }

    #[test]
    fn synthetic_round_trip() {
        let b = synthetic_semi_c(3, 0.4, 17).unwrap();
        let fit = semi_c_fit(&b, 3).unwrap();
        assert!((fit.q - 0.4).abs() <= 1e-9);
        assert!((fit.p + fit.q - 1.0).abs() == 0.0);
        assert!(fit.decomposition_residual <= 1e-10);
        let ls = semi_c_least_squares(&b, 3).unwrap();
        assert!((ls.q - 0.4).abs() <= 1e-9 && (ls.p - 0.6).abs() <= 1e-9);
    }

    #[test]
    fn fitted_form_traces_back_to_i() {
        let b = synthetic_semi_c(4, 0.25, 5).unwrap();
        let tr = b.semi_c_form(0.75, 0.25).trace_with(&b.g_inv);
        assert!((tr - &b.i_low).abs().max() <= 1e-9 * max_abs_vec(&b.i_low));
    }

    #[test]
    fn kappa_coefficient_comparison() {
        let b = synthetic_semi_c(3, 0.4, 2).unwrap();
        let cmp = compare_kappa(&b, 3, 1e-6).unwrap();
        assert!((cmp.displayed - 0.55).abs() < 1e-9);
        assert!((cmp.direct - 0.85).abs() < 1e-9);
        assert_eq!(cmp.verdict, KappaMatch::DirectContraction);
        let b = synthetic_semi_c(3, 1.0, 2).unwrap();
        let cmp = compare_kappa(&b, 3, 1e-6).unwrap();
        assert_eq!(cmp.verdict, KappaMatch::Both);
    }

    #[test]
    fn fit_gates() {
        let spec = euclidean(3);
        let s = spec.sample(0, vec![0.0; 3], vec![1.0, 0.0, 0.0]);
        let b = compute_bundle(&spec, &s).unwrap();
        assert!(matches!(semi_c_fit(&b, 3), Err(FinslerError::RiemannianDegenerate(_))));
        let r = minkowski_randers(2);
        let s = r.sample(0, vec![0.0; 2], vec![0.3, 1.0]);
        let b = compute_bundle(&r, &s).unwrap();
        assert!(matches!(semi_c_fit(&b, 2), Err(FinslerError::FitIllPosed(2))));
    }

    #[test]
    fn zero_homogeneity_of_g_and_c() {
        let spec = randers_var(3);
        let s = spec.sample(0, vec![0.1, 0.5, -0.3], vec![0.7, -0.2, 0.4]);
        let b = compute_bundle(&spec, &s).unwrap();
        for lam in [0.5, 2.0] {
            let ys: Vec<f64> = s.y.iter().map(|v| v * lam).collect();
            let sl = spec.sample(1, s.x.clone(), ys);
            let bl = compute_bundle(&spec, &sl).unwrap();
            assert!((&bl.g - &b.g).abs().max() <= 1e-10 * max_abs_mat(&b.g));
            let scaled = b.c.scale(1.0 / lam);
            assert!(bl.c.sub(&scaled).max_abs() <= 1e-10 * b.c.max_abs());
        }
    }
}
