//! Classical Riemannian curvature of `a_ij(x)` from central differences.
//!
//! Uses only `a_ij` and the finite-difference engine, never the jets or the
//! spray, so it can serve as an oracle for the Riemannian reduction.

use crate::chart_metric::RiemannianField;
use crate::error::{FinslerError, Result};
use crate::jet_calculus::{fd_symmetric_tensors, FdConfig};
use crate::linalg::{Mat, Tensor3};

/// Christoffel symbols and Ricci tensor of `a` at one point.
#[derive(Clone, Debug)]
pub struct ChristoffelData {
    pub a: Mat,
    /// `Γ^i_jk`, stored as `(i, j, k)`.
    pub gamma: Tensor3,
    /// Classical Ricci tensor `R_jk = ∂_iΓ^i_jk - ∂_kΓ^i_ij + Γ^i_ipΓ^p_jk - Γ^i_kpΓ^p_ij`.
    pub ricci: Mat,
}

impl ChristoffelData {
    /// `½ Γ^i_jk y^j y^k`
    pub fn spray(&self, y: &[f64]) -> Vec<f64> {
        let n = self.a.nrows();
        (0..n)
            .map(|i| {
                let mut acc = 0.0;
                for j in 0..n {
                    for k in 0..n {
                        acc += self.gamma.get(i, j, k) * y[j] * y[k];
                    }
                }
                0.5 * acc
            })
            .collect()
    }

    /// `R_jk y^j y^k`
    pub fn ricci_scalar(&self, y: &[f64]) -> f64 {
        let n = y.len();
        let mut acc = 0.0;
        for j in 0..n {
            for k in 0..n {
                acc += self.ricci[(j, k)] * y[j] * y[k];
            }
        }
        acc
    }
}

pub fn christoffel_oracle(field: &RiemannianField, x: &[f64], fd: &FdConfig) -> Result<ChristoffelData> {
    let n = x.len();
    let f = |p: &[f64]| -> Result<Vec<f64>> { Ok(field.eval(p)) };
    let t = fd_symmetric_tensors(&f, x, 2, fd)?;
    let a = Mat::from_row_slice(n, n, &t.value);
    let ainv = a
        .clone()
        .try_inverse()
        .ok_or_else(|| FinslerError::InvalidArgument("a_ij is singular".into()))?;
    // da[m] = ∂_m a (matrix), dda[m][q] = ∂_m∂_q a
    let da: Vec<Mat> = (0..n)
        .map(|m| Mat::from_fn(n, n, |i, j| t.grad[i * n + j][m]))
        .collect();
    let dda = |m: usize, q: usize, i: usize, j: usize| t.hess[i * n + j][m * n + q];

    // Γ_ljk = ½(∂_j a_lk + ∂_k a_lj - ∂_l a_jk) and its x-derivative
    let low = |l: usize, j: usize, k: usize| 0.5 * (da[j][(l, k)] + da[k][(l, j)] - da[l][(j, k)]);
    let dlow = |m: usize, l: usize, j: usize, k: usize| {
        0.5 * (dda(m, j, l, k) + dda(m, k, l, j) - dda(m, l, j, k))
    };
    let gamma = Tensor3::from_fn(n, |i, j, k| (0..n).map(|l| ainv[(i, l)] * low(l, j, k)).sum());
    // ∂_m a^{il} = -a^{ip} ∂_m a_pq a^{ql}
    let dainv: Vec<Mat> = da.iter().map(|d| -(&ainv * d * &ainv)).collect();
    let dgamma = |m: usize, i: usize, j: usize, k: usize| -> f64 {
        (0..n)
            .map(|l| dainv[m][(i, l)] * low(l, j, k) + ainv[(i, l)] * dlow(m, l, j, k))
            .sum()
    };
    let ricci = Mat::from_fn(n, n, |j, k| {
        let mut acc = 0.0;
        for i in 0..n {
            acc += dgamma(i, i, j, k) - dgamma(k, i, i, j);
            for p in 0..n {
                acc += gamma.get(i, i, p) * gamma.get(p, j, k) - gamma.get(i, k, p) * gamma.get(p, i, j);
            }
        }
        acc
    });
    Ok(ChristoffelData { a, gamma, ricci })
}
