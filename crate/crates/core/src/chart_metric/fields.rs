//! Component fields of an (α, β)-metric: the Riemannian field `a_ij(x)`, the
//! one-form `b_i(x)` and the profile `φ(s)`.

use serde::{Deserialize, Serialize};

use crate::error::{FinslerError, Result};
use crate::jet_calculus::Scalar;

/// Multivariate polynomial in the chart coordinates, total degree <= 4.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    /// `(coefficient, exponents)` pairs.
    pub terms: Vec<(f64, Vec<u8>)>,
}

impl Polynomial {
    pub const MAX_DEGREE: usize = 4;

    pub fn constant(c: f64, n: usize) -> Self {
        Self {
            terms: vec![(c, vec![0; n])],
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        for (_, e) in &self.terms {
            if e.len() != n {
                return Err(FinslerError::InvalidArgument(format!(
                    "polynomial term has {} exponents, chart has dimension {n}",
                    e.len()
                )));
            }
            let deg: usize = e.iter().map(|&k| k as usize).sum();
            if deg > Self::MAX_DEGREE {
                return Err(FinslerError::InvalidArgument(format!(
                    "polynomial term of degree {deg} exceeds {}",
                    Self::MAX_DEGREE
                )));
            }
        }
        Ok(())
    }

    pub fn eval<T: Scalar>(&self, x: &[T]) -> T {
        let mut acc = x[0].constant_like(0.0);
        for (c, e) in &self.terms {
            let mut term = x[0].constant_like(*c);
            for (xi, &k) in x.iter().zip(e) {
                if k > 0 {
                    term = term.mul(&xi.powi(k as u32));
                }
            }
            acc = acc.add(&term);
        }
        acc
    }
}

/// Closed-form descriptor of the Riemannian part.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AlphaKind {
    Euclidean,
    /// `a_ij = λ(x) δ_ij`.
    Conformal { lambda: Polynomial },
    /// Round sphere of radius `r` in stereographic coordinates:
    /// `a_ij = 4r⁴/(r² + |x|²)² δ_ij`.
    StereographicSphere { r: f64 },
    /// Upper-triangular entries `a_11, a_12, ..., a_1n, a_22, ...`.
    CustomPolynomial { entries: Vec<Polynomial> },
}

/// `a_ij(x)` with an overall constant multiplier.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RiemannianField {
    pub kind: AlphaKind,
    pub scale: f64,
}

impl RiemannianField {
    pub fn new(kind: AlphaKind) -> Self {
        Self { kind, scale: 1.0 }
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self {
            kind: self.kind.clone(),
            scale: self.scale * k,
        }
    }

    pub fn descriptor(&self) -> String {
        let base = match &self.kind {
            AlphaKind::Euclidean => "euclidean".to_string(),
            AlphaKind::Conformal { .. } => "conformal(lambda(x))".to_string(),
            AlphaKind::StereographicSphere { r } => format!("stereographic-sphere({r})"),
            AlphaKind::CustomPolynomial { .. } => "custom-polynomial".to_string(),
        };
        if self.scale == 1.0 {
            base
        } else {
            format!("{}*{base}", self.scale)
        }
    }

    pub fn validate_shape(&self, n: usize) -> Result<()> {
        match &self.kind {
            AlphaKind::Conformal { lambda } => lambda.validate(n),
            AlphaKind::StereographicSphere { r } if !(*r > 0.0) => Err(
                FinslerError::RiemannianField(format!("sphere radius must be positive, got {r}")),
            ),
            AlphaKind::CustomPolynomial { entries } => {
                if entries.len() != n * (n + 1) / 2 {
                    return Err(FinslerError::RiemannianField(format!(
                        "custom field needs {} upper-triangular entries, got {}",
                        n * (n + 1) / 2,
                        entries.len()
                    )));
                }
                entries.iter().try_for_each(|p| p.validate(n))
            }
            _ => Ok(()),
        }
        .and_then(|_| {
            if self.scale > 0.0 {
                Ok(())
            } else {
                Err(FinslerError::RiemannianField("scale must be positive".into()))
            }
        })
    }

    /// Full symmetric matrix, row-major.
    pub fn eval<T: Scalar>(&self, x: &[T]) -> Vec<T> {
        let n = x.len();
        let zero = x[0].constant_like(0.0);
        let mut a = vec![zero.clone(); n * n];
        let diag = |v: T, a: &mut Vec<T>| {
            for i in 0..n {
                a[i * n + i] = v.clone();
            }
        };
        match &self.kind {
            AlphaKind::Euclidean => diag(x[0].constant_like(self.scale), &mut a),
            AlphaKind::Conformal { lambda } => diag(lambda.eval(x).scale(self.scale), &mut a),
            AlphaKind::StereographicSphere { r } => {
                let r2 = r * r;
                let mut q = zero.add_const(r2);
                for xi in x {
                    q = q.add(&xi.square());
                }
                let v = q.square().recip().scale(4.0 * r2 * r2 * self.scale);
                diag(v, &mut a);
            }
            AlphaKind::CustomPolynomial { entries } => {
                let mut k = 0;
                for i in 0..n {
                    for j in i..n {
                        let v = entries[k].eval(x).scale(self.scale);
                        a[i * n + j] = v.clone();
                        a[j * n + i] = v;
                        k += 1;
                    }
                }
            }
        }
        a
    }
}

/// Closed-form descriptor of the one-form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BetaKind {
    Zero,
    Constant { b: Vec<f64> },
    /// `b_i(x) = eps * x_i`.
    Linear { eps: f64 },
    CustomPolynomial { components: Vec<Polynomial> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OneFormField {
    pub kind: BetaKind,
    pub scale: f64,
}

impl OneFormField {
    pub fn new(kind: BetaKind) -> Self {
        Self { kind, scale: 1.0 }
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self {
            kind: self.kind.clone(),
            scale: self.scale * k,
        }
    }

    pub fn descriptor(&self) -> String {
        let base = match &self.kind {
            BetaKind::Zero => "zero".to_string(),
            BetaKind::Constant { b } => format!("constant({b:?})"),
            BetaKind::Linear { eps } => format!("linear({eps}*x)"),
            BetaKind::CustomPolynomial { .. } => "custom-polynomial".to_string(),
        };
        if self.scale == 1.0 {
            base
        } else {
            format!("{}*{base}", self.scale)
        }
    }

    pub fn validate_shape(&self, n: usize) -> Result<()> {
        match &self.kind {
            BetaKind::Constant { b } if b.len() != n => Err(FinslerError::OneFormField(format!(
                "constant one-form has {} components, chart has dimension {n}",
                b.len()
            ))),
            BetaKind::CustomPolynomial { components } => {
                if components.len() != n {
                    return Err(FinslerError::OneFormField(format!(
                        "custom one-form has {} components, chart has dimension {n}",
                        components.len()
                    )));
                }
                components.iter().try_for_each(|p| p.validate(n))
            }
            _ => Ok(()),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind, BetaKind::Zero) || self.scale == 0.0
    }

    pub fn eval<T: Scalar>(&self, x: &[T]) -> Vec<T> {
        let n = x.len();
        match &self.kind {
            BetaKind::Zero => vec![x[0].constant_like(0.0); n],
            BetaKind::Constant { b } => b.iter().map(|v| x[0].constant_like(v * self.scale)).collect(),
            BetaKind::Linear { eps } => x.iter().map(|xi| xi.scale(eps * self.scale)).collect(),
            BetaKind::CustomPolynomial { components } => components
                .iter()
                .map(|p| p.eval(x).scale(self.scale))
                .collect(),
        }
    }
}

/// Shape of φ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PhiKind {
    /// φ = 1
    Riemannian,
    /// φ = 1 + s
    Randers,
    /// φ = 1/s
    Kropina,
    /// φ = 1/(1 - s)
    Matsumoto,
    /// φ = Σ c_k s^k
    Polynomial { coefficients: Vec<f64> },
}

/// The profile φ with its domain bound `b0` and the sampled range of `s`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiProfile {
    pub kind: PhiKind,
    pub b0: f64,
    pub s_range: (f64, f64),
}

impl PhiProfile {
    /// Default domain data for each kind. Kropina excludes `|s| < 0.2`.
    pub fn new(kind: PhiKind) -> Self {
        let (b0, s_range) = match kind {
            PhiKind::Riemannian => (1.0e6, (-0.99e6, 0.99e6)),
            PhiKind::Randers => (1.0, (-0.99, 0.99)),
            PhiKind::Kropina => (1.0, (0.2, 0.99)),
            PhiKind::Matsumoto => (0.5, (-0.49, 0.49)),
            PhiKind::Polynomial { .. } => (1.0, (-0.99, 0.99)),
        };
        Self { kind, b0, s_range }
    }

    pub fn with_s_range(mut self, lo: f64, hi: f64) -> Self {
        self.s_range = (lo, hi);
        self
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            PhiKind::Riemannian => "riemannian",
            PhiKind::Randers => "randers",
            PhiKind::Kropina => "kropina",
            PhiKind::Matsumoto => "matsumoto",
            PhiKind::Polynomial { .. } => "polynomial",
        }
    }

    pub fn is_riemannian(&self) -> bool {
        matches!(self.kind, PhiKind::Riemannian)
    }

    pub fn s_in_range(&self, s: f64) -> bool {
        s >= self.s_range.0 && s <= self.s_range.1
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.s_range;
        if !(self.b0 > 0.0) {
            return Err(FinslerError::PhiProfile(format!("b0 must be positive, got {}", self.b0)));
        }
        if !(lo < hi) || lo <= -self.b0 || hi >= self.b0 {
            return Err(FinslerError::PhiProfile(format!(
                "s_range [{lo}, {hi}] must be a non-empty sub-interval of (-{b0}, {b0})",
                b0 = self.b0
            )));
        }
        if matches!(self.kind, PhiKind::Kropina) && lo <= 0.0 && hi >= 0.0 {
            return Err(FinslerError::PhiProfile(
                "kropina s_range must exclude s = 0".into(),
            ));
        }
        if let PhiKind::Polynomial { coefficients } = &self.kind {
            if coefficients.is_empty() {
                return Err(FinslerError::PhiProfile("empty coefficient list".into()));
            }
        }
        let (lo, hi) = (lo.max(-1e3), hi.min(1e3));
        for k in 0..=100 {
            let s = lo + (hi - lo) * k as f64 / 100.0;
            let [phi, _, _] = self.derivs(s)?;
            if !(phi > 0.0) {
                return Err(FinslerError::PhiProfile(format!("phi({s}) = {phi} is not positive")));
            }
        }
        Ok(())
    }

    /// φ evaluated on any scalar type.
    pub fn eval<T: Scalar>(&self, s: &T) -> Result<T> {
        Ok(match &self.kind {
            PhiKind::Riemannian => s.constant_like(1.0),
            PhiKind::Randers => s.add_const(1.0),
            PhiKind::Kropina => {
                if s.value() == 0.0 {
                    return Err(FinslerError::SingularEvaluation("kropina at s = 0".into()));
                }
                s.recip()
            }
            PhiKind::Matsumoto => {
                if s.value() == 1.0 {
                    return Err(FinslerError::SingularEvaluation("matsumoto at s = 1".into()));
                }
                s.scale(-1.0).add_const(1.0).recip()
            }
            PhiKind::Polynomial { coefficients } => {
                let mut acc = s.constant_like(*coefficients.last().expect("validated"));
                for c in coefficients.iter().rev().skip(1) {
                    acc = acc.mul(s).add_const(*c);
                }
                acc
            }
        })
    }

    /// `[φ, φ', φ'']` at a point.
    pub fn derivs(&self, s: f64) -> Result<[f64; 3]> {
        Ok(match &self.kind {
            PhiKind::Riemannian => [1.0, 0.0, 0.0],
            PhiKind::Randers => [1.0 + s, 1.0, 0.0],
            PhiKind::Kropina => {
                if s == 0.0 {
                    return Err(FinslerError::SingularEvaluation("kropina at s = 0".into()));
                }
                [1.0 / s, -1.0 / (s * s), 2.0 / (s * s * s)]
            }
            PhiKind::Matsumoto => {
                let u = 1.0 - s;
                [1.0 / u, 1.0 / (u * u), 2.0 / (u * u * u)]
            }
            PhiKind::Polynomial { coefficients } => {
                let (mut p, mut dp, mut ddp) = (0.0, 0.0, 0.0);
                for (k, c) in coefficients.iter().enumerate() {
                    let k = k as i32;
                    p += c * s.powi(k);
                    if k >= 1 {
                        dp += c * k as f64 * s.powi(k - 1);
                    }
                    if k >= 2 {
                        ddp += c * (k * (k - 1)) as f64 * s.powi(k - 2);
                    }
                }
                [p, dp, ddp]
            }
        })
    }

    /// `φ(s) - sφ'(s) + (b² - s²)φ''(s)`.
    pub fn positivity_functional(&self, s: f64, b_sq: f64) -> Result<f64> {
        let [p, dp, ddp] = self.derivs(s)?;
        Ok(p - s * dp + (b_sq - s * s) * ddp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_factor_at_origin() {
        let a = RiemannianField::new(AlphaKind::StereographicSphere { r: 1.0 });
        let m = a.eval(&[0.0, 0.0, 0.0]);
        assert_eq!(m[0], 4.0);
        assert_eq!(m[1], 0.0);
        let m = a.eval(&[1.0, 0.0, 0.0]);
        assert_eq!(m[4], 1.0);
    }

    #[test]
    fn phi_kinds() {
        let k = PhiProfile::new(PhiKind::Kropina);
        assert_eq!(k.eval(&0.5).unwrap(), 2.0);
        assert!(k.eval(&0.0).is_err());
        let m = PhiProfile::new(PhiKind::Matsumoto);
        assert_eq!(m.eval(&0.5).unwrap(), 2.0);
        let p = PhiProfile::new(PhiKind::Polynomial {
            coefficients: vec![1.0, 0.5, 0.25],
        });
        assert_eq!(p.eval(&2.0).unwrap(), 1.0 + 1.0 + 1.0);
        assert_eq!(p.derivs(2.0).unwrap(), [3.0, 0.5 + 1.0, 0.5]);
    }

    #[test]
    fn kropina_functional_is_two_b_squared_over_s_cubed() {
        let k = PhiProfile::new(PhiKind::Kropina);
        let v = k.positivity_functional(0.3, 0.25).unwrap();
        assert!((v - 2.0 * 0.25 / 0.027).abs() < 1e-12);
    }

    #[test]
    fn kropina_range_must_avoid_zero() {
        let k = PhiProfile::new(PhiKind::Kropina).with_s_range(-0.1, 0.4);
        assert!(k.validate().is_err());
    }

    #[test]
    fn polynomial_degree_gate() {
        let p = Polynomial {
            terms: vec![(1.0, vec![3, 2])],
        };
        assert!(p.validate(2).is_err());
    }
}
