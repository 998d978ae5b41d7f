//! Built-in metrics covering the Riemannian, locally Minkowski, non-Berwald
//! Randers and singular-φ (Kropina) cases.

use super::{
    AlphaKind, BetaKind, ChartSpec, FinslerMetricSpec, OneFormField, PhiKind, PhiProfile,
    RiemannianField,
};
use crate::error::{FinslerError, Result};

/// `FIX-EUC(n)`: flat α, β = 0, φ = 1 on `[-1, 1]^n`.
pub fn euclidean(n: usize) -> FinslerMetricSpec {
    FinslerMetricSpec {
        name: "FIX-EUC".into(),
        chart: ChartSpec::cube(n, 1.0, 2),
        alpha: RiemannianField::new(AlphaKind::Euclidean),
        beta: OneFormField::new(BetaKind::Zero),
        phi: PhiProfile::new(PhiKind::Riemannian),
    }
}

/// `FIX-MINK-RANDERS(n)`: flat α, constant `b = (0.3, 0, ...)`, Randers.
pub fn minkowski_randers(n: usize) -> FinslerMetricSpec {
    let mut b = vec![0.0; n];
    b[0] = 0.3;
    FinslerMetricSpec {
        name: "FIX-MINK-RANDERS".into(),
        chart: ChartSpec::cube(n, 1.0, 2),
        alpha: RiemannianField::new(AlphaKind::Euclidean),
        beta: OneFormField::new(BetaKind::Constant { b }),
        phi: PhiProfile::new(PhiKind::Randers),
    }
}

/// `FIX-RANDERS-VAR(n)`: flat α, `b_i(x) = 0.1 x_i`, Randers.
pub fn randers_var(n: usize) -> FinslerMetricSpec {
    FinslerMetricSpec {
        name: "FIX-RANDERS-VAR".into(),
        chart: ChartSpec::cube(n, 1.0, 2),
        alpha: RiemannianField::new(AlphaKind::Euclidean),
        beta: OneFormField::new(BetaKind::Linear { eps: 0.1 }),
        phi: PhiProfile::new(PhiKind::Randers),
    }
}

/// `FIX-SPHERE(n, r)`: stereographic round sphere, β = 0, φ = 1 on `[-0.8, 0.8]^n`.
pub fn sphere(n: usize, r: f64) -> FinslerMetricSpec {
    FinslerMetricSpec {
        name: "FIX-SPHERE".into(),
        chart: ChartSpec::cube(n, 0.8, 2),
        alpha: RiemannianField::new(AlphaKind::StereographicSphere { r }),
        beta: OneFormField::new(BetaKind::Zero),
        phi: PhiProfile::new(PhiKind::Riemannian),
    }
}

/// `FIX-KROPINA(n)`: flat α, `b = (0.5, 0, ...)`, φ = 1/s with `s ∈ [0.2, 0.49]`.
pub fn kropina(n: usize) -> FinslerMetricSpec {
    let mut b = vec![0.0; n];
    b[0] = 0.5;
    FinslerMetricSpec {
        name: "FIX-KROPINA".into(),
        chart: ChartSpec::cube(n, 1.0, 2),
        alpha: RiemannianField::new(AlphaKind::Euclidean),
        beta: OneFormField::new(BetaKind::Constant { b }),
        phi: PhiProfile::new(PhiKind::Kropina).with_s_range(0.2, 0.49),
    }
}

pub const FIXTURE_NAMES: [&str; 5] = [
    "FIX-EUC",
    "FIX-MINK-RANDERS",
    "FIX-RANDERS-VAR",
    "FIX-SPHERE",
    "FIX-KROPINA",
];

/// Resolves a fixture by name; `r` is only used by `FIX-SPHERE`.
pub fn by_name(name: &str, n: usize, r: Option<f64>) -> Result<FinslerMetricSpec> {
    Ok(match name {
        "FIX-EUC" => euclidean(n),
        "FIX-MINK-RANDERS" => minkowski_randers(n),
        "FIX-RANDERS-VAR" => randers_var(n),
        "FIX-SPHERE" => sphere(n, r.unwrap_or(1.0)),
        "FIX-KROPINA" => kropina(n),
        other => {
            return Err(FinslerError::InvalidArgument(format!(
                "unknown fixture {other:?}; known: {}",
                FIXTURE_NAMES.join(", ")
            )))
        }
    })
}

/// All five fixtures in dimension `n` (sphere of radius 1).
pub fn all(n: usize) -> Vec<FinslerMetricSpec> {
    vec![
        euclidean(n),
        minkowski_randers(n),
        randers_var(n),
        sphere(n, 1.0),
        kropina(n),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::min_eigenvalue;

    #[test]
    fn fixtures_validate() {
        for n in [2, 3, 4] {
            for spec in all(n) {
                spec.validate().unwrap_or_else(|e| panic!("{}: {e}", spec.name));
            }
        }
    }

    #[test]
    fn sphere_factor_positive_on_box() {
        let spec = sphere(3, 1.0);
        for x in spec.chart.base_points() {
            let a = spec.alpha_matrix(&x);
            assert!(min_eigenvalue(&a) > 0.0);
            let r2: f64 = x.iter().map(|v| v * v).sum();
            let expect = 4.0 / (1.0 + r2).powi(2);
            assert!((a[(0, 0)] - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn unknown_fixture() {
        assert!(by_name("FIX-NOPE", 3, None).is_err());
    }
}
