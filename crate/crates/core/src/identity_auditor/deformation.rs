//! Linearized deformations `g(t) = g + t ġ`, `C(t) = C + t Ċ` and the time
//! derivatives of everything built from them.

use crate::curvature_engine::CurvatureBundle;
use crate::error::{FinslerError, Result};
use crate::flow_lab::FlowMode;
use crate::jet_calculus::{fd_partial_vec, FdConfig};
use crate::linalg::{row_major, Mat, Tensor3, Vector};
use crate::tensor_lab::{semi_c_fit, TensorBundle};

/// First-order action of a flow on `(g, C)` at one sample.
#[derive(Clone, Debug)]
pub struct Deformation {
    pub gdot: Mat,
    pub cdot: Tensor3,
}

impl Deformation {
    /// `ġ = -2 Ric_ij (+ 2⟨R⟩ g)`, `Ċ = -Ric_{ij,k} (+ 2⟨R⟩ C)`.
    pub fn ricci_flow(cb: &CurvatureBundle, mode: FlowMode, avg_r: f64) -> Self {
        let t = &cb.tensors;
        let mut gdot = &cb.ric_ij * -2.0;
        let mut cdot = cb.ric_ijk.scale(-1.0);
        if mode == FlowMode::Normalized {
            gdot += &t.g * (2.0 * avg_r);
            cdot = cdot.add(&t.c.scale(2.0 * avg_r));
        }
        Self { gdot, cdot }
    }

    pub fn flipped(&self) -> Self {
        Self {
            gdot: -&self.gdot,
            cdot: self.cdot.scale(-1.0),
        }
    }

    pub fn at(&self, base: &TensorBundle, t: f64) -> Result<TensorBundle> {
        TensorBundle::from_parts(
            base.y.clone(),
            &base.g + &self.gdot * t,
            base.c.add(&self.cdot.scale(t)),
        )
    }
}

/// `d/dt` at `t = 0` of the quantities the identities talk about.
#[derive(Clone, Debug)]
pub struct Rates {
    pub g_inv: Mat,
    pub i_low: Vector,
    pub i_up: Vector,
    pub y_low: Vector,
    pub h: Mat,
    /// `h_ij I_k + h_jk I_i + h_ki I_j`
    pub h_block: Tensor3,
    /// `I_i I_j I_k / ‖I‖²`; zero on Riemannian-degenerate samples.
    pub i_cubed: Tensor3,
    packed: Vec<f64>,
}

fn pack(b: &TensorBundle) -> Vec<f64> {
    let mut v = row_major(&b.g_inv);
    v.extend(b.i_low.iter());
    v.extend(b.i_up().iter());
    v.extend(b.y_low.iter());
    v.extend(row_major(&b.h));
    v.extend(&b.h_block().data);
    if b.is_riemannian_degenerate() {
        v.extend(std::iter::repeat(0.0).take(b.n * b.n * b.n));
    } else {
        v.extend(&b.i_cubed_block().data);
    }
    v
}

impl Rates {
    pub fn measure(base: &TensorBundle, def: &Deformation, fd: &FdConfig) -> Result<Self> {
        let n = base.n;
        let f = |t: &[f64]| -> Result<Vec<f64>> { Ok(pack(&def.at(base, t[0])?)) };
        let d = fd_partial_vec(&f, &[0.0], &[1], fd)?.value;
        let mut it = d.iter().copied();
        let mut take = |k: usize| -> Vec<f64> { it.by_ref().take(k).collect() };
        let g_inv = Mat::from_row_slice(n, n, &take(n * n));
        let i_low = Vector::from_vec(take(n));
        let i_up = Vector::from_vec(take(n));
        let y_low = Vector::from_vec(take(n));
        let h = Mat::from_row_slice(n, n, &take(n * n));
        let h_block = Tensor3 { n, data: take(n * n * n) };
        let i_cubed = Tensor3 { n, data: take(n * n * n) };
        Ok(Self {
            g_inv,
            i_low,
            i_up,
            y_low,
            h,
            h_block,
            i_cubed,
            packed: d,
        })
    }

    /// `max|self + other| / max|self|`: zero when `other` is the rate of the
    /// sign-flipped deformation of a linear response.
    pub fn linearity_defect(&self, flipped: &Rates) -> f64 {
        let num = self
            .packed
            .iter()
            .zip(&flipped.packed)
            .map(|(a, b)| (a + b).abs())
            .fold(0.0, f64::max);
        let den = self.packed.iter().map(|a| a.abs()).fold(0.0, f64::max);
        if den == 0.0 {
            num
        } else {
            num / den
        }
    }

    /// `I'^m I_m + I^m I'_m`
    pub fn norm_sq_rate(&self, base: &TensorBundle) -> f64 {
        self.i_up.dot(&base.i_low) + base.i_up().dot(&self.i_low)
    }
}

/// `q'` by a central difference of the `κ`-based semi-C fit along the
/// deformation.
pub fn q_rate_probe(base: &TensorBundle, def: &Deformation, dt: f64) -> Result<f64> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(FinslerError::InvalidArgument(format!("probe step {dt}")));
    }
    let q_at = |t: f64| -> Result<f64> {
        let b = def
            .at(base, t)
            .map_err(|e| FinslerError::ProbeStepInvalid(format!("t = {t:e}: {e}")))?;
        semi_c_fit(&b, base.n)
            .map(|fit| fit.q)
            .map_err(|e| FinslerError::ProbeStepInvalid(format!("t = {t:e}: {e}")))
    };
    Ok((q_at(dt)? - q_at(-dt)?) / (2.0 * dt))
}

/// Builds a synthetic semi-C bundle with `q = q0`, deforms `C` along
/// `rate (I³/‖I‖² - h-block/(1+n))` (which keeps `g` and `I` fixed and moves
/// `q` at exactly `rate`), and returns the probe's estimate of `q'`.
pub fn synthetic_q_rate(n: usize, q0: f64, rate: f64, seed: u64, dt: f64) -> Result<f64> {
    let base = crate::tensor_lab::synthetic_semi_c(n, q0, seed)?;
    let a = base.h_block().scale(1.0 / (1.0 + n as f64));
    let def = Deformation {
        gdot: Mat::zeros(n, n),
        cdot: base.i_cubed_block().sub(&a).scale(rate),
    };
    q_rate_probe(&base, &def, dt)
}
