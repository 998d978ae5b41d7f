//! Small dense helpers: matrices come from nalgebra, rank-3 tensors are a
//! flat row-major buffer.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

pub type Mat = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Rank-3 covariant tensor `T_ijk`, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tensor3 {
    pub n: usize,
    pub data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n * n],
        }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize, usize) -> f64) -> Self {
        let mut t = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    t.data[(i * n + j) * n + k] = f(i, j, k);
                }
            }
        }
        t
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(i * self.n + j) * self.n + k]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        let n = self.n;
        self.data[(i * n + j) * n + k] = v;
    }

    /// `T_ijk u^i v^j w^k`
    pub fn contract3(&self, u: &Vector, v: &Vector, w: &Vector) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let uv = u[i] * v[j];
                for k in 0..n {
                    acc += self.get(i, j, k) * uv * w[k];
                }
            }
        }
        acc
    }

    /// `T_ijk w^k`
    pub fn contract_last(&self, w: &Vector) -> Mat {
        let n = self.n;
        Mat::from_fn(n, n, |i, j| (0..n).map(|k| self.get(i, j, k) * w[k]).sum())
    }

    /// `M^{jk} T_ijk`
    pub fn trace_with(&self, m: &Mat) -> Vector {
        let n = self.n;
        Vector::from_fn(n, |i, _| {
            let mut acc = 0.0;
            for j in 0..n {
                for k in 0..n {
                    acc += m[(j, k)] * self.get(i, j, k);
                }
            }
            acc
        })
    }

    pub fn scale(&self, k: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|v| v * k).collect(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest deviation from full index symmetry.
    pub fn asymmetry(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let v = self.get(i, j, k);
                    for w in [self.get(j, i, k), self.get(i, k, j), self.get(k, j, i)] {
                        worst = worst.max((v - w).abs());
                    }
                }
            }
        }
        worst
    }

    /// `S_ij w_k + S_jk w_i + S_ki w_j`
    pub fn cyclic_outer(s: &Mat, w: &Vector) -> Self {
        let n = w.len();
        Self::from_fn(n, |i, j, k| s[(i, j)] * w[k] + s[(j, k)] * w[i] + s[(k, i)] * w[j])
    }

    /// `u_i v_j w_k`
    pub fn outer(u: &Vector, v: &Vector, w: &Vector) -> Self {
        let n = u.len();
        Self::from_fn(n, |i, j, k| u[i] * v[j] * w[k])
    }
}

/// Entries in row-major order.
pub fn row_major(m: &Mat) -> Vec<f64> {
    let c = m.ncols();
    (0..m.nrows() * c).map(|k| m[(k / c, k % c)]).collect()
}

pub fn min_eigenvalue(m: &Mat) -> f64 {
    let sym = (m + m.transpose()) * 0.5;
    sym.symmetric_eigenvalues()
        .iter()
        .fold(f64::INFINITY, |a, &b| a.min(b))
}

pub fn max_abs_mat(m: &Mat) -> f64 {
    m.iter().fold(0.0, |a, v| a.max(v.abs()))
}

pub fn max_abs_vec(v: &Vector) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

/// Relative residual `|a - b| / (|a| + |b| + eps)` in the max norm.
pub fn rel_residual(a: &[f64], b: &[f64], eps: f64) -> f64 {
    let diff = a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    let na = a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let nb = b.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    diff / (na + nb + eps)
}
