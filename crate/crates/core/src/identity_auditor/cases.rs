//! The identity catalogue: what each case compares, at one prepared sample.

use serde::{Deserialize, Serialize};

use super::{AuditPoint, Rung};
use crate::error::{FinslerError, Result};
use crate::linalg::{row_major, Mat, Tensor3, Vector};
use crate::tensor_lab::SemiCFit;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseId {
    #[serde(rename = "eq-R")]
    EqR,
    #[serde(rename = "eq-Ric1")]
    EqRic1,
    #[serde(rename = "eq-Ric")]
    EqRic,
    #[serde(rename = "eq-C")]
    EqC,
    #[serde(rename = "eq-Ric2")]
    EqRic2,
    #[serde(rename = "eq-Car")]
    EqCar,
    #[serde(rename = "eq-Ric3")]
    EqRic3,
    #[serde(rename = "lemma2-gprime")]
    GPrime,
    #[serde(rename = "lemma2-Iprime")]
    IPrime,
    #[serde(rename = "lemma2-Iprime-up")]
    IPrimeUp,
    #[serde(rename = "lemma2-yprime")]
    YPrime,
    #[serde(rename = "lemma2-hprime")]
    HPrime,
    #[serde(rename = "lemma2-eqm1")]
    CubedRate,
    #[serde(rename = "lemma2-eq1")]
    CubedRateContracted,
    #[serde(rename = "lemma2-eq2")]
    HBlockRate,
    #[serde(rename = "lemma2-eq3")]
    HBlockRateContracted,
    #[serde(rename = "lemma2-eq4")]
    ScalarRateBlock,
    #[serde(rename = "lemma2-final")]
    Lemma2Final,
    #[serde(rename = "sec5-Iprime")]
    NormIPrime,
    #[serde(rename = "sec5-Iprime-up")]
    NormIPrimeUp,
    #[serde(rename = "sec5-Cprime")]
    NormCPrime,
    #[serde(rename = "sec5-Omega")]
    NormOmega,
}

/// Which closed form of `C_ijk I^i I^j I^k / ‖I‖⁴` downstream cases use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Coefficient {
    /// `(1 + n q)/(1 + n)`
    Displayed,
    /// `(3p + (1+n) q)/(1 + n)`
    Direct,
}

impl Coefficient {
    pub fn value(self, n: usize, fit: &SemiCFit) -> f64 {
        let nf = n as f64;
        match self {
            Coefficient::Displayed => (1.0 + nf * fit.q) / (1.0 + nf),
            Coefficient::Direct => (3.0 * fit.p + (1.0 + nf) * fit.q) / (1.0 + nf),
        }
    }

    pub fn other(self) -> Self {
        match self {
            Coefficient::Displayed => Coefficient::Direct,
            Coefficient::Direct => Coefficient::Displayed,
        }
    }
}

/// Everything a case evaluator produces at one sample.
pub(crate) struct Sides {
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    /// Natural magnitude of the terms, for the noise floor.
    pub scale: f64,
    /// Alternative right-hand sides, in `CaseId::variant_names` order.
    pub variants: Vec<Vec<f64>>,
    pub tag: Option<String>,
}

/// Evaluation-wide inputs shared by all samples.
pub(crate) struct CaseContext {
    pub avg_r: f64,
    pub coefficient: Coefficient,
}

impl CaseId {
    pub const ALL: [CaseId; 22] = [
        CaseId::EqR,
        CaseId::EqRic1,
        CaseId::EqRic,
        CaseId::EqC,
        CaseId::EqRic2,
        CaseId::EqCar,
        CaseId::EqRic3,
        CaseId::GPrime,
        CaseId::IPrime,
        CaseId::IPrimeUp,
        CaseId::YPrime,
        CaseId::HPrime,
        CaseId::CubedRate,
        CaseId::CubedRateContracted,
        CaseId::HBlockRate,
        CaseId::HBlockRateContracted,
        CaseId::ScalarRateBlock,
        CaseId::Lemma2Final,
        CaseId::NormIPrime,
        CaseId::NormIPrimeUp,
        CaseId::NormCPrime,
        CaseId::NormOmega,
    ];

    pub fn id(self) -> &'static str {
        match self {
            CaseId::EqR => "eq-R",
            CaseId::EqRic1 => "eq-Ric1",
            CaseId::EqRic => "eq-Ric",
            CaseId::EqC => "eq-C",
            CaseId::EqRic2 => "eq-Ric2",
            CaseId::EqCar => "eq-Car",
            CaseId::EqRic3 => "eq-Ric3",
            CaseId::GPrime => "lemma2-gprime",
            CaseId::IPrime => "lemma2-Iprime",
            CaseId::IPrimeUp => "lemma2-Iprime-up",
            CaseId::YPrime => "lemma2-yprime",
            CaseId::HPrime => "lemma2-hprime",
            CaseId::CubedRate => "lemma2-eqm1",
            CaseId::CubedRateContracted => "lemma2-eq1",
            CaseId::HBlockRate => "lemma2-eq2",
            CaseId::HBlockRateContracted => "lemma2-eq3",
            CaseId::ScalarRateBlock => "lemma2-eq4",
            CaseId::Lemma2Final => "lemma2-final",
            CaseId::NormIPrime => "sec5-Iprime",
            CaseId::NormIPrimeUp => "sec5-Iprime-up",
            CaseId::NormCPrime => "sec5-Cprime",
            CaseId::NormOmega => "sec5-Omega",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.id() == id)
    }

    pub fn rung(self) -> Rung {
        use CaseId::*;
        match self {
            EqC | ScalarRateBlock => Rung::Algebraic,
            EqR | GPrime | YPrime | HPrime => Rung::Order2,
            Lemma2Final => Rung::DoubleProbe,
            _ => Rung::Order3,
        }
    }

    /// Cases that vanish identically when `I = 0`.
    pub fn requires_semi_c(self) -> bool {
        !matches!(
            self,
            CaseId::EqR | CaseId::EqRic1 | CaseId::EqCar | CaseId::GPrime | CaseId::YPrime | CaseId::HPrime
        )
    }

    pub fn is_normalized(self) -> bool {
        matches!(
            self,
            CaseId::NormIPrime | CaseId::NormIPrimeUp | CaseId::NormCPrime | CaseId::NormOmega
        )
    }

    /// Whether the left side is measured along the linearized deformation.
    pub fn uses_rates(self) -> bool {
        use CaseId::*;
        matches!(
            self,
            GPrime
                | YPrime
                | IPrime
                | IPrimeUp
                | HPrime
                | CubedRate
                | CubedRateContracted
                | HBlockRate
                | HBlockRateContracted
                | Lemma2Final
                | NormIPrime
                | NormIPrimeUp
                | NormOmega
        )
    }

    pub fn statement(self) -> &'static str {
        use CaseId::*;
        match self {
            EqR => "Ric_ij = R g_ij + 1/2 F^2 R_{,i,j} + R_{,i} y_j + R_{,j} y_i",
            EqRic1 => {
                "Ric_{ij,k} = 2R C_ijk + 1/2 F^2 R_{,i,j,k} + (g_jk R_{,i} + g_ij R_{,k} + g_ki R_{,j}) \
                 + (R_{,j,k} y_i + R_{,i,j} y_k + R_{,k,i} y_j)"
            }
            EqRic => {
                "Ric_{ij,k} I^i I^j I^k = 2R C_ijk I^i I^j I^k + 1/2 F^2 R_{,i,j,k} I^i I^j I^k \
                 + 3 |I|^2 I^m R_{,m}"
            }
            EqC => "C_ijk I^i I^j I^k / |I|^4 = (1 + n q)/(1 + n)  vs  (3p + (1 + n) q)/(1 + n)",
            EqRic2 => {
                "Ric_{ij,k} I^i I^j I^k = 2R k(p,q) |I|^4 + 1/2 F^2 R_{,i,j,k} I^i I^j I^k + 3 |I|^2 I^m R_{,m}"
            }
            EqCar => "C'_ijk = 1/2 d(g'_ij)/dy^k = -Ric_{ij,k}",
            EqRic3 => {
                "C'_ijk I^i I^j I^k = -2R k(p,q) |I|^4 - 1/2 F^2 R_{,i,j,k} I^i I^j I^k - 3 |I|^2 I^m R_{,m}"
            }
            GPrime => "(g^{il})' = 2 Ric^{il}",
            IPrime => "I'_i = -rho_i,  rho = g^{jk} Ric_jk",
            IPrimeUp => "I'^i = 2 Ric^{ij} I_j - rho^i",
            YPrime => "y'_i = -2 Ric_im y^m",
            HPrime => "h'_ij = 2R h_ij - 2R g_ij - 2 Ric_ij + 2 (Ric_im l_j + Ric_jm l_i) l^m",
            CubedRate => {
                "(I_i I_j I_k / |I|^2)' = -(I'^m I_m + I^m I'_m)/|I|^2 C_ijk \
                 - (rho_i I_j I_k + rho_j I_i I_k + rho_k I_i I_j)/|I|^2"
            }
            CubedRateContracted => {
                "(I_i I_j I_k / |I|^2)' I^i I^j I^k \
                 = [2(nq+1)(rho^m I_m - Ric^{pq} I_p I_q)/((n+1)|I|^2) - 3 rho_m I^m] |I|^2"
            }
            HBlockRate => {
                "(h_ij I_k + h_jk I_i + h_ki I_j)' = -(rho_i h_jk + rho_j h_ik + rho_k h_ij) \
                 - 2R (I_i g_jk + ...) - 2 (I_i Ric_jk + ...) + 2R (I_i h_jk + ...) + 2 (I_i L_jk + ...), \
                 L_jk = (Ric_jr l_k + Ric_kr l_j) l^r"
            }
            HBlockRateContracted => {
                "(h_ij I_k + h_jk I_i + h_ki I_j)' I^i I^j I^k = -3 (rho_m I^m + 2 Ric_pq I^p I^q) |I|^2"
            }
            ScalarRateBlock => {
                "[p'/(1+n) (h_ij I_k + h_jk I_i + h_ki I_j) + q'/|I|^2 I_i I_j I_k] I^i I^j I^k \
                 = n q'/(1+n) |I|^4  with p' = -q'"
            }
            Lemma2Final => {
                "C'_ijk I^i I^j I^k = [n q'/(n+1) |I|^2 \
                 - q (2(nq+1)(rho^m I_m - Ric^{pq} I_p I_q)/((n+1)|I|^2) - 3 rho_m I^m) \
                 - 3p/(n+1) (rho_m I^m + 2 Ric_pq I^p I^q)] |I|^2"
            }
            NormIPrime => "I'_i = -rho_i under g' = -2 Ric + 2<R> g, C' = -Ric_{ij,k} + 2<R> C",
            NormIPrimeUp => "I'^i = 2 [Ric^{ij} - <R> g^{ij}] I_j - rho^i",
            NormCPrime => {
                "C'_ijk = -(I'^m I_m + I^m I'_m)/|I|^2 C_ijk - (rho_i I_j I_k + rho_j I_i I_k + rho_k I_i I_j)/|I|^2"
            }
            NormOmega => {
                "C'_ijk I^i I^j I^k = (Omega |I|^2 - 3 rho_m I^m) |I|^2,  Omega = -(I'^m I_m + I^m I'_m)/|I|^2"
            }
        }
    }

    pub fn variant_names(self) -> &'static [&'static str] {
        use CaseId::*;
        match self {
            EqR => &["literal: R_{,i} y_j + R_{,i} y_i"],
            EqC => &["displayed", "direct"],
            EqRic2 | EqRic3 => &["other coefficient"],
            IPrime => &["product rule: 2 Ric^{jk} C_ijk - g^{jk} Ric_{jk,i}"],
            YPrime => &["deformation: (g_ij(t) y^j)'"],
            CubedRate => &["corrected: I_i I_j I_k/|I|^2 in place of C_ijk"],
            CubedRateContracted => &[
                "first line with measured I'^m I_m + I^m I'_m",
                "corrected: -(rho_m I^m + 2 Ric_pq I^p I^q) |I|^2",
            ],
            ScalarRateBlock => &["corrected: (n-2) q'/(n+1) |I|^4"],
            Lemma2Final => &["corrected: [(n-2) q'/(n+1) |I|^2 - kappa (rho_m I^m + 2 Ric_pq I^p I^q)] |I|^2"],
            NormIPrime => &["un-normalized I'_i"],
            NormCPrime => &["substitution: -Ric_{ij,k} + 2<R> C_ijk by direct third derivative"],
            NormOmega => &["closed-form Omega = 2(rho^m I_m - Ric^{ml} I_m I_l)/|I|^2 + 2<R>"],
            _ => &[],
        }
    }

    pub(crate) fn evaluate(self, p: &AuditPoint, ctx: &CaseContext) -> Result<Sides> {
        let cb = &p.cb;
        let t = &cb.tensors;
        let n = cb.n;
        let nf = n as f64;
        let f = t.f;
        let f2 = f * f;
        let r = cb.rnorm;
        let k = p.curvature_scale;
        let iu = t.i_up();
        let nsq = t.i_norm_sq;
        let i3 = |c: &Tensor3| c.contract3(&iu, &iu, &iu);
        let rho_dot_i = cb.rho_i.dot(&iu);
        let ric_ii = cb.ric_ij.dot(&(&iu * iu.transpose()));
        let i_scale = k * nsq.powf(1.5) / f;
        let ric_up = cb.ric_up();
        let sides = |lhs: Vec<f64>, rhs: Vec<f64>, scale: f64| Sides {
            lhs,
            rhs,
            scale,
            variants: vec![],
            tag: None,
        };
        let mat = |m: &Mat| row_major(m);
        let vec = |v: &Vector| v.as_slice().to_vec();
        let rates = || p.rates.as_ref().ok_or_else(|| missing("deformation rates"));
        let norm_rates = || p.norm_rates.as_ref().ok_or_else(|| missing("normalized deformation rates"));
        let ls_fit = || p.ls_fit.as_ref().ok_or_else(|| missing("least-squares semi-C fit"));
        let kappa_fit = || p.kappa_fit.as_ref().ok_or_else(|| missing("semi-C fit"));
        let r1_dot_i = cb.r_der1.dot(&iu);
        let r3_iii = i3(&cb.r_der3);
        let ric_lemma_rhs = |coef: f64| 2.0 * r * coef * nsq * nsq + 0.5 * f2 * r3_iii + 3.0 * nsq * r1_dot_i;

        Ok(match self {
            CaseId::EqR => {
                let r1 = &cb.r_der1;
                let y = &t.y_low;
                let base = &t.g * r + &cb.r_der2 * (0.5 * f2);
                let rhs = &base + r1 * y.transpose() + y * r1.transpose();
                let literal = &base + Mat::from_fn(n, n, |i, j| r1[i] * y[j] + r1[i] * y[i]);
                let mut s = sides(mat(&cb.ric_ij), mat(&rhs), k);
                s.variants.push(mat(&literal));
                s
            }
            CaseId::EqRic1 => {
                let rhs = t
                    .c
                    .scale(2.0 * r)
                    .add(&cb.r_der3.scale(0.5 * f2))
                    .add(&Tensor3::cyclic_outer(&t.g, &cb.r_der1))
                    .add(&Tensor3::cyclic_outer(&cb.r_der2, &t.y_low));
                sides(cb.ric_ijk.data.clone(), rhs.data, k / f)
            }
            CaseId::EqRic => sides(
                vec![i3(&cb.ric_ijk)],
                vec![2.0 * r * i3(&t.c) + 0.5 * f2 * r3_iii + 3.0 * nsq * r1_dot_i],
                i_scale,
            ),
            CaseId::EqC => {
                let fit = ls_fit()?;
                let kappa = t.kappa();
                let displayed = Coefficient::Displayed.value(n, fit);
                let direct = Coefficient::Direct.value(n, fit);
                let tol = Rung::Algebraic.tolerance();
                let close = |c: f64| (kappa - c).abs() <= tol * (kappa.abs() + c.abs()).max(1e-300);
                let (tag, matched) = match (close(displayed), close(direct)) {
                    (true, true) => ("both", direct),
                    (true, false) => ("displayed", displayed),
                    (false, true) => ("direct", direct),
                    (false, false) => ("neither", direct),
                };
                Sides {
                    lhs: vec![kappa],
                    rhs: vec![matched],
                    scale: 0.0,
                    variants: vec![vec![displayed], vec![direct]],
                    tag: Some(tag.into()),
                }
            }
            CaseId::EqRic2 | CaseId::EqRic3 => {
                let fit = ls_fit()?;
                let sign = if self == CaseId::EqRic3 { -1.0 } else { 1.0 };
                let lhs = if self == CaseId::EqRic3 {
                    -i3(&cb.ric_ij_grad)
                } else {
                    i3(&cb.ric_ijk)
                };
                let mut s = sides(
                    vec![lhs],
                    vec![sign * ric_lemma_rhs(ctx.coefficient.value(n, fit))],
                    i_scale,
                );
                s.variants
                    .push(vec![sign * ric_lemma_rhs(ctx.coefficient.other().value(n, fit))]);
                s
            }
            CaseId::EqCar => sides(
                cb.ric_ij_grad.scale(-1.0).data,
                cb.ric_ijk.scale(-1.0).data,
                k / f,
            ),
            CaseId::GPrime => {
                let ginv_max = t.g_inv.iter().fold(0.0f64, |a, v| a.max(v.abs()));
                sides(mat(&rates()?.g_inv), mat(&(&ric_up * 2.0)), k * ginv_max * ginv_max)
            }
            CaseId::IPrime => {
                let mut s = sides(vec(&rates()?.i_low), vec(&-&cb.rho_i), k / f);
                s.variants.push(vec(&-cb.rho_i_product_rule()));
                s
            }
            CaseId::IPrimeUp => sides(
                vec(&rates()?.i_up),
                vec(&(&ric_up * &t.i_low * 2.0 - cb.rho_up())),
                k / f,
            ),
            CaseId::YPrime => {
                let mut s = sides(vec(&-&cb.ric_grad), vec(&(&cb.ric_ij * &t.y * -2.0)), k * f);
                s.variants.push(vec(&rates()?.y_low));
                s
            }
            CaseId::HPrime => {
                let rhs = &t.h * (2.0 * r) - &t.g * (2.0 * r) - &cb.ric_ij * 2.0 + lambda(p) * 2.0;
                sides(mat(&rates()?.h), mat(&rhs), k)
            }
            CaseId::CubedRate => {
                let rt = rates()?;
                let x = norm_sq_rate_closed(p, 0.0);
                let rii = Tensor3::cyclic_outer(&(&t.i_low * t.i_low.transpose()), &cb.rho_i).scale(1.0 / nsq);
                let rhs = t.c.scale(-x / nsq).sub(&rii);
                let corrected = t.i_cubed_block().scale(-x / nsq).sub(&rii);
                let mut s = sides(rt.i_cubed.data.clone(), rhs.data, k / f);
                s.variants.push(corrected.data);
                s
            }
            CaseId::CubedRateContracted => {
                let rt = rates()?;
                let q = kappa_fit()?.q;
                let lhs = i3(&rt.i_cubed);
                let rhs = (2.0 * (nf * q + 1.0) * (rho_dot_i - ric_ii) / ((nf + 1.0) * nsq) - 3.0 * rho_dot_i) * nsq;
                let x_measured = rt.norm_sq_rate(t);
                let first = -((nf * q + 1.0) * x_measured / ((nf + 1.0) * nsq) + 3.0 * rho_dot_i) * nsq;
                let corrected = -(rho_dot_i + 2.0 * ric_ii) * nsq;
                let mut s = sides(vec![lhs], vec![rhs], i_scale);
                s.variants.push(vec![first]);
                s.variants.push(vec![corrected]);
                s
            }
            CaseId::HBlockRate => {
                let rt = rates()?;
                let i = &t.i_low;
                let rhs = Tensor3::cyclic_outer(&t.h, &cb.rho_i)
                    .scale(-1.0)
                    .add(&Tensor3::cyclic_outer(&t.g, i).scale(-2.0 * r))
                    .add(&Tensor3::cyclic_outer(&cb.ric_ij, i).scale(-2.0))
                    .add(&Tensor3::cyclic_outer(&t.h, i).scale(2.0 * r))
                    .add(&Tensor3::cyclic_outer(&lambda(p), i).scale(2.0));
                sides(rt.h_block.data.clone(), rhs.data, k / f)
            }
            CaseId::HBlockRateContracted => sides(
                vec![i3(&rates()?.h_block)],
                vec![-3.0 * (rho_dot_i + 2.0 * ric_ii) * nsq],
                i_scale,
            ),
            CaseId::ScalarRateBlock => {
                // linear in q', so q' = 1 (p' = -1) covers every value
                let lhs = i3(&t.h_block().scale(-1.0 / (1.0 + nf)).add(&t.i_cubed_block()));
                let mut s = sides(vec![lhs], vec![nf / (1.0 + nf) * nsq * nsq], 0.0);
                s.variants.push(vec![(nf - 2.0) / (nf + 1.0) * nsq * nsq]);
                s
            }
            CaseId::Lemma2Final => {
                let fit = kappa_fit()?;
                let qdot = p.q_rate.ok_or_else(|| missing("q' probe"))?;
                let (pp, q) = (fit.p, fit.q);
                let lhs = -i3(&cb.ric_ijk);
                let rhs = (nf * qdot / (nf + 1.0) * nsq
                    - q * (2.0 * (nf * q + 1.0) * (rho_dot_i - ric_ii) / ((nf + 1.0) * nsq) - 3.0 * rho_dot_i)
                    - 3.0 * pp / (nf + 1.0) * (rho_dot_i + 2.0 * ric_ii))
                    * nsq;
                let corrected =
                    ((nf - 2.0) * qdot / (nf + 1.0) * nsq - fit.kappa * (rho_dot_i + 2.0 * ric_ii)) * nsq;
                let mut s = sides(vec![lhs], vec![rhs], i_scale);
                s.variants.push(vec![corrected]);
                s.tag = Some(format!("q'={:e}", qdot));
                s
            }
            CaseId::NormIPrime => {
                let mut s = sides(vec(&norm_rates()?.i_low), vec(&-&cb.rho_i), k / f);
                s.variants.push(vec(&rates()?.i_low));
                s
            }
            CaseId::NormIPrimeUp => {
                let m = &ric_up - &t.g_inv * ctx.avg_r;
                sides(
                    vec(&norm_rates()?.i_up),
                    vec(&(&m * &t.i_low * 2.0 - cb.rho_up())),
                    k / f,
                )
            }
            CaseId::NormCPrime => {
                let lhs = cb.ric_ij_grad.scale(-1.0).add(&t.c.scale(2.0 * ctx.avg_r));
                let x = norm_sq_rate_closed(p, ctx.avg_r);
                let rii = Tensor3::cyclic_outer(&(&t.i_low * t.i_low.transpose()), &cb.rho_i).scale(1.0 / nsq);
                let rhs = t.c.scale(-x / nsq).sub(&rii);
                let subst = cb.ric_ijk.scale(-1.0).add(&t.c.scale(2.0 * ctx.avg_r));
                let mut s = sides(lhs.data, rhs.data, k / f);
                s.variants.push(subst.data);
                s
            }
            CaseId::NormOmega => {
                let nr = norm_rates()?;
                let lhs = i3(&cb.ric_ij_grad.scale(-1.0).add(&t.c.scale(2.0 * ctx.avg_r)));
                let omega_def = -nr.norm_sq_rate(t) / nsq;
                let omega_closed = 2.0 * (rho_dot_i - ric_ii) / nsq + 2.0 * ctx.avg_r;
                let mut s = sides(vec![lhs], vec![(omega_def * nsq - 3.0 * rho_dot_i) * nsq], i_scale);
                s.variants.push(vec![(omega_closed * nsq - 3.0 * rho_dot_i) * nsq]);
                s.tag = Some(format!("Omega={:e}", omega_def));
                s
            }
        })
    }
}

fn missing(what: &str) -> FinslerError {
    FinslerError::InvalidArgument(format!("{what} not prepared for this sample"))
}

/// `Λ_ij = (Ric_im ℓ_j + Ric_jm ℓ_i) ℓ^m`
fn lambda(p: &AuditPoint) -> Mat {
    let t = &p.cb.tensors;
    let v = &p.cb.ric_ij * t.ell_up();
    &v * t.ell.transpose() + &t.ell * v.transpose()
}

/// `I'^m I_m + I^m I'_m` from the closed forms of `I'_i` and `I'^i`, with
/// `avg_r = 0` for the un-normalized flow.
fn norm_sq_rate_closed(p: &AuditPoint, avg_r: f64) -> f64 {
    let cb = &p.cb;
    let t = &cb.tensors;
    let iu = t.i_up();
    let rho_dot_i = cb.rho_i.dot(&iu);
    let ric_ii = cb.ric_ij.dot(&(&iu * iu.transpose()));
    2.0 * ric_ii - 2.0 * avg_r * t.i_norm_sq - 2.0 * rho_dot_i
}
