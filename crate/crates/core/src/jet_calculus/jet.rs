//! Truncated multivariate Taylor arithmetic.
//!
//! A [`Jet`] stores the Taylor coefficients `c_α = ∂^α f / α!` of a scalar
//! function of `m` variables around an expansion point, for every multi-index
//! with `|α| <= order`. Products, reciprocals and square roots propagate the
//! coefficients exactly (up to rounding), so any composition of those
//! operations yields machine-precision partial derivatives.
//!
//! Monomials are kept in graded order: all degree-0 terms, then degree 1, and
//! so on. Within one degree the enumeration does not depend on the truncation
//! order, so the table for order `N - 1` is a prefix of the table for `N`.
//! Differentiation and truncation are therefore prefix operations.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

/// Arithmetic shared by plain `f64` evaluation and jet evaluation.
///
/// Field evaluators (metric components, `F²`, ...) are written once against
/// this trait and evaluated either pointwise or as jets.
pub trait Scalar: Clone + Send + Sync {
    /// A constant living in the same space as `self`.
    fn constant_like(&self, v: f64) -> Self;
    /// The value at the expansion point.
    fn value(&self) -> f64;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn scale(&self, k: f64) -> Self;
    fn add_const(&self, k: f64) -> Self;
    fn recip(&self) -> Self;
    fn sqrt(&self) -> Self;

    fn div(&self, o: &Self) -> Self {
        self.mul(&o.recip())
    }

    fn square(&self) -> Self {
        self.mul(self)
    }

    fn powi(&self, k: u32) -> Self {
        let mut acc = self.constant_like(1.0);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }
}

impl Scalar for f64 {
    fn constant_like(&self, v: f64) -> Self {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn scale(&self, k: f64) -> Self {
        self * k
    }
    fn add_const(&self, k: f64) -> Self {
        self + k
    }
    fn recip(&self) -> Self {
        1.0 / self
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn powi(&self, k: u32) -> Self {
        f64::powi(*self, k as i32)
    }
}

/// Multiplication and differentiation tables for `(nvars, order)`.
pub struct MonomialTable {
    nvars: usize,
    order: usize,
    exps: Vec<Vec<u8>>,
    degree_end: Vec<usize>,
    index: HashMap<Vec<u8>, usize>,
    mul: Vec<(u32, u32, u32)>,
    deriv: Vec<Vec<(u32, u32, f64)>>,
    factorial: Vec<f64>,
}

impl fmt::Debug for MonomialTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MonomialTable")
            .field("nvars", &self.nvars)
            .field("order", &self.order)
            .field("len", &self.exps.len())
            .finish()
    }
}

fn monomials_of_degree(nvars: usize, degree: usize) -> Vec<Vec<u8>> {
    fn rec(pos: usize, left: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if pos + 1 == cur.len() {
            cur[pos] = left as u8;
            out.push(cur.clone());
            return;
        }
        for e in (0..=left).rev() {
            cur[pos] = e as u8;
            rec(pos + 1, left - e, cur, out);
        }
        cur[pos] = 0;
    }
    let mut out = Vec::new();
    if nvars == 0 {
        if degree == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    let mut cur = vec![0u8; nvars];
    rec(0, degree, &mut cur, &mut out);
    out
}

impl MonomialTable {
    fn build(nvars: usize, order: usize) -> Self {
        let mut exps = Vec::new();
        let mut degree_end = Vec::with_capacity(order + 1);
        for d in 0..=order {
            exps.extend(monomials_of_degree(nvars, d));
            degree_end.push(exps.len());
        }
        let index: HashMap<Vec<u8>, usize> =
            exps.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        let degree = |e: &Vec<u8>| e.iter().map(|&v| v as usize).sum::<usize>();
        let mut mul = Vec::new();
        for (a, ea) in exps.iter().enumerate() {
            let da = degree(ea);
            for (b, eb) in exps.iter().enumerate() {
                if da + degree(eb) > order {
                    continue;
                }
                let sum: Vec<u8> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                mul.push((a as u32, b as u32, index[&sum] as u32));
            }
        }
        let mut deriv = vec![Vec::new(); nvars];
        for (src, e) in exps.iter().enumerate() {
            for (v, slot) in deriv.iter_mut().enumerate() {
                if e[v] == 0 {
                    continue;
                }
                let mut lowered = e.clone();
                lowered[v] -= 1;
                slot.push((src as u32, index[&lowered] as u32, e[v] as f64));
            }
        }
        let factorial = exps
            .iter()
            .map(|e| {
                e.iter()
                    .map(|&k| (1..=k as u64).product::<u64>() as f64)
                    .product()
            })
            .collect();
        Self {
            nvars,
            order,
            exps,
            degree_end,
            index,
            mul,
            deriv,
            factorial,
        }
    }

    /// Shared table for `(nvars, order)`, built on first use.
    pub fn get(nvars: usize, order: usize) -> Arc<MonomialTable> {
        static TABLES: OnceLock<Mutex<HashMap<(usize, usize), Arc<MonomialTable>>>> =
            OnceLock::new();
        let cache = TABLES.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("monomial table cache poisoned");
        guard
            .entry((nvars, order))
            .or_insert_with(|| Arc::new(MonomialTable::build(nvars, order)))
            .clone()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }
}

/// Truncated multivariate Taylor expansion.
#[derive(Clone)]
pub struct Jet {
    table: Arc<MonomialTable>,
    coeffs: Vec<f64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("nvars", &self.table.nvars)
            .field("order", &self.table.order)
            .field("value", &self.coeffs[0])
            .finish()
    }
}

/// Handle used to create jets over a fixed variable set and order.
#[derive(Clone, Debug)]
pub struct JetSpace {
    table: Arc<MonomialTable>,
}

impl JetSpace {
    pub fn new(nvars: usize, order: usize) -> Self {
        Self {
            table: MonomialTable::get(nvars, order),
        }
    }

    pub fn nvars(&self) -> usize {
        self.table.nvars
    }

    pub fn order(&self) -> usize {
        self.table.order
    }

    pub fn constant(&self, v: f64) -> Jet {
        let mut coeffs = vec![0.0; self.table.len()];
        coeffs[0] = v;
        Jet {
            table: self.table.clone(),
            coeffs,
        }
    }

    /// The coordinate function `z_var` expanded at `z_var = value`.
    pub fn variable(&self, var: usize, value: f64) -> Jet {
        assert!(var < self.table.nvars, "variable index out of range");
        let mut j = self.constant(value);
        if self.table.order >= 1 {
            let mut e = vec![0u8; self.table.nvars];
            e[var] = 1;
            j.coeffs[self.table.index[&e]] = 1.0;
        }
        j
    }
}

impl Jet {
    pub fn nvars(&self) -> usize {
        self.table.nvars
    }

    pub fn order(&self) -> usize {
        self.table.order
    }

    /// Partial derivative `∂^α f` at the expansion point; zero beyond the
    /// truncation order.
    pub fn partial(&self, multi_index: &[u8]) -> f64 {
        assert_eq!(multi_index.len(), self.table.nvars);
        match self.table.index.get(multi_index) {
            Some(&k) => self.coeffs[k] * self.table.factorial[k],
            None => 0.0,
        }
    }

    /// Partial derivative with respect to the listed variables (repeats allowed).
    pub fn partial_vars(&self, vars: &[usize]) -> f64 {
        let mut e = vec![0u8; self.table.nvars];
        for &v in vars {
            e[v] += 1;
        }
        self.partial(&e)
    }

    /// `∂f/∂z_var` as a jet of one lower order.
    pub fn derivative(&self, var: usize) -> Jet {
        assert!(self.table.order >= 1, "cannot differentiate an order-0 jet");
        let table = MonomialTable::get(self.table.nvars, self.table.order - 1);
        let mut coeffs = vec![0.0; table.len()];
        for &(src, dst, k) in &self.table.deriv[var] {
            coeffs[dst as usize] += k * self.coeffs[src as usize];
        }
        Jet { table, coeffs }
    }

    pub fn truncate(&self, order: usize) -> Jet {
        if order >= self.table.order {
            return self.clone();
        }
        let table = MonomialTable::get(self.table.nvars, order);
        let coeffs = self.coeffs[..table.len()].to_vec();
        Jet { table, coeffs }
    }

    fn aligned(&self, o: &Jet) -> (Jet, Jet) {
        assert_eq!(self.table.nvars, o.table.nvars, "jets over different variables");
        let ord = self.table.order.min(o.table.order);
        (self.truncate(ord), o.truncate(ord))
    }

    /// Evaluates `Σ_k d_k (u - u0)^k` where `d_k = f^(k)(u0) / k!`.
    pub fn compose(&self, taylor: &[f64]) -> Jet {
        let order = self.table.order;
        let mut delta = self.clone();
        delta.coeffs[0] = 0.0;
        let top = order.min(taylor.len().saturating_sub(1));
        let mut acc = self.constant_like(taylor[top]);
        for k in (0..top).rev() {
            acc = acc.mul(&delta);
            acc.coeffs[0] += taylor[k];
        }
        acc
    }

    /// Taylor coefficients of every degree, for inspection.
    pub fn degree_slice(&self, degree: usize) -> &[f64] {
        let start = if degree == 0 {
            0
        } else {
            self.table.degree_end[degree - 1]
        };
        &self.coeffs[start..self.table.degree_end[degree]]
    }
}

fn binomial_real(p: f64, k: usize) -> f64 {
    let mut acc = 1.0;
    for i in 0..k {
        acc *= (p - i as f64) / (i as f64 + 1.0);
    }
    acc
}

impl Scalar for Jet {
    fn constant_like(&self, v: f64) -> Self {
        let mut coeffs = vec![0.0; self.table.len()];
        coeffs[0] = v;
        Jet {
            table: self.table.clone(),
            coeffs,
        }
    }

    fn value(&self) -> f64 {
        self.coeffs[0]
    }

    fn add(&self, o: &Self) -> Self {
        let (mut a, b) = self.aligned(o);
        a.coeffs.iter_mut().zip(&b.coeffs).for_each(|(x, y)| *x += y);
        a
    }

    fn sub(&self, o: &Self) -> Self {
        let (mut a, b) = self.aligned(o);
        a.coeffs.iter_mut().zip(&b.coeffs).for_each(|(x, y)| *x -= y);
        a
    }

    fn mul(&self, o: &Self) -> Self {
        if self.table.order != o.table.order {
            let (a, b) = self.aligned(o);
            return a.mul(&b);
        }
        assert_eq!(self.table.nvars, o.table.nvars, "jets over different variables");
        let mut out = vec![0.0; self.coeffs.len()];
        let (x, y) = (&self.coeffs, &o.coeffs);
        for &(a, b, c) in &self.table.mul {
            out[c as usize] += x[a as usize] * y[b as usize];
        }
        Jet {
            table: self.table.clone(),
            coeffs: out,
        }
    }

    fn scale(&self, k: f64) -> Self {
        Jet {
            table: self.table.clone(),
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    fn add_const(&self, k: f64) -> Self {
        let mut j = self.clone();
        j.coeffs[0] += k;
        j
    }

    fn recip(&self) -> Self {
        let u0 = self.coeffs[0];
        let taylor: Vec<f64> = (0..=self.table.order)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign * u0.powi(-(k as i32) - 1)
            })
            .collect();
        self.compose(&taylor)
    }

    fn sqrt(&self) -> Self {
        let u0 = self.coeffs[0];
        let taylor: Vec<f64> = (0..=self.table.order)
            .map(|k| binomial_real(0.5, k) * u0.powf(0.5 - k as f64))
            .collect();
        self.compose(&taylor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_sizes_match_binomials() {
        // C(m + N, N) monomials of degree <= N in m variables.
        assert_eq!(MonomialTable::get(3, 3).len(), 20);
        assert_eq!(MonomialTable::get(6, 4).len(), 210);
        assert_eq!(MonomialTable::get(6, 4).mul.len(), 1820);
    }

    #[test]
    fn lower_order_table_is_prefix() {
        let hi = MonomialTable::get(4, 4);
        let lo = MonomialTable::get(4, 2);
        assert_eq!(&hi.exps[..lo.len()], &lo.exps[..]);
    }

    #[test]
    fn polynomial_partials_are_exact() {
        // f = x^2 y + 3 y^3 at (2, -1)
        let sp = JetSpace::new(2, 3);
        let x = sp.variable(0, 2.0);
        let y = sp.variable(1, -1.0);
        let f = x.square().mul(&y).add(&y.powi(3).scale(3.0));
        assert_eq!(f.value(), 4.0 * -1.0 - 3.0);
        assert_eq!(f.partial(&[1, 0]), 2.0 * 2.0 * -1.0);
        assert_eq!(f.partial(&[0, 1]), 4.0 + 9.0);
        assert_eq!(f.partial(&[1, 1]), 4.0);
        assert_eq!(f.partial(&[0, 2]), 18.0 * -1.0);
        assert_eq!(f.partial(&[0, 3]), 18.0);
        assert_eq!(f.partial(&[2, 1]), 2.0);
    }

    #[test]
    fn sqrt_and_recip_match_closed_forms() {
        let sp = JetSpace::new(1, 4);
        let x = sp.variable(0, 2.0);
        let s = x.sqrt();
        // d^k/dx^k sqrt(x) at 2
        let expect = [
            2f64.sqrt(),
            0.5 * 2f64.powf(-0.5),
            -0.25 * 2f64.powf(-1.5),
            0.375 * 2f64.powf(-2.5),
            -0.9375 * 2f64.powf(-3.5),
        ];
        for (k, e) in expect.iter().enumerate() {
            assert!((s.partial(&[k as u8]) - e).abs() < 1e-14, "order {k}");
        }
        let r = x.recip();
        let expect = [0.5, -0.25, 0.25, -0.375, 0.75];
        for (k, e) in expect.iter().enumerate() {
            assert!((r.partial(&[k as u8]) - e).abs() < 1e-14, "order {k}");
        }
    }

    #[test]
    fn derivative_lowers_order_consistently() {
        let sp = JetSpace::new(2, 4);
        let x = sp.variable(0, 0.3);
        let y = sp.variable(1, 0.7);
        let f = x.mul(&y).add_const(1.0).recip();
        let fx = f.derivative(0);
        assert_eq!(fx.order(), 3);
        for e in [[0u8, 0], [1, 0], [0, 1], [2, 1], [1, 2], [0, 3]] {
            let mut full = e;
            full[0] += 1;
            assert!((fx.partial(&e) - f.partial(&full)).abs() < 1e-12);
        }
    }

    #[test]
    fn mixed_orders_truncate() {
        let a = JetSpace::new(2, 3).variable(0, 1.0);
        let b = JetSpace::new(2, 1).variable(1, 2.0);
        let c = a.mul(&b);
        assert_eq!(c.order(), 1);
        assert_eq!(c.partial(&[1, 0]), 2.0);
        assert_eq!(c.partial(&[0, 1]), 1.0);
    }
}
