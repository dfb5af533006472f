use serde::{Deserialize, Serialize};

use super::registry::kgauduchon_rhs;
use super::{critical_t, IntegralEstimate, Param, PointContext, Quadrature, Scope, Tolerance, CLASS_TOL};
use crate::error::{GeomError, Result};
use crate::hermitian::{GrayHervella, NormBundle};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// Which way the integral must point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sign {
    NonNegative,
    NonPositive,
}

/// Complex dimensions a statement covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dims {
    Any,
    Surface,
    AtLeast3,
}

impl Dims {
    pub fn covers(self, n: usize) -> bool {
        match self {
            Dims::Any => true,
            Dims::Surface => n == 2,
            Dims::AtLeast3 => n >= 3,
        }
    }
}

/// An integral inequality `∫ lhs(t) ≥ 0` (or `≤ 0`), proved by writing
/// `lhs(t) − c(t) δα_F` as a combination of component norms.
pub struct SignTheorem {
    pub id: &'static str,
    pub formula: &'static str,
    /// Allowed Gray–Hervella components.
    pub classes: &'static [usize],
    pub dims: Dims,
    /// Inclusive range of `t` where the sign holds.
    pub t_range: fn(usize) -> Vec<(f64, f64)>,
    pub sign: Sign,
    pub lhs: fn(&PointContext, f64) -> Result<f64>,
    /// Coefficient of `δα_F` in `lhs`.
    pub delta_coeff: fn(f64) -> f64,
    pub integrand: fn(&NormBundle, f64, usize) -> f64,
    /// Components forced to vanish when the integral is zero, and what that
    /// makes the structure.
    pub equality: fn(f64, usize) -> (&'static [&'static str], &'static str),
}

fn component(nb: &NormBundle, name: &str) -> f64 {
    match name {
        "(dF)-" => nb.df_minus,
        "N0" => nb.n0,
        "(dF)0+" => nb.df_plus_primitive,
        "alpha" => nb.lee,
        "N" => nb.nijenhuis,
        _ => unreachable!("unknown component {name}"),
    }
}

fn twice_s1_minus_s(c: &PointContext, t: f64) -> Result<f64> {
    Ok(2.0 * c.level(t)?.s1 - c.g.s)
}

fn s1_minus_s2(c: &PointContext, t: f64) -> Result<f64> {
    let l = c.level(t)?;
    Ok(l.s1 - l.s2)
}

fn s_minus_sj(c: &PointContext, _: f64) -> Result<f64> {
    Ok(c.g.s - c.g.s_j)
}

fn diff_q(t: f64, n: usize) -> f64 {
    let nf = n as f64;
    ((nf + 1.0) * t * t + (6.0 * nf - 10.0) * t + 5.0 - 3.0 * nf) / (8.0 * (nf - 1.0))
}

const SQRT3: f64 = 1.732_050_807_568_877_2;

pub fn sign_theorems() -> Vec<SignTheorem> {
    vec![
        SignTheorem {
            id: "riemannian_excess_quasi_kaehler_free",
            formula: "int (s - s_J) = int (2/3|(dF)^-|^2 + |alpha_F|^2) >= 0",
            classes: &[1, 3, 4],
            dims: Dims::Any,
            t_range: |_| vec![(f64::NEG_INFINITY, f64::INFINITY)],
            sign: Sign::NonNegative,
            lhs: s_minus_sj,
            delta_coeff: |_| 2.0,
            integrand: |nb, _, _| 2.0 / 3.0 * nb.df_minus + nb.lee,
            equality: |_, _| (&["(dF)-", "alpha"], "balanced Hermitian"),
        },
        SignTheorem {
            id: "riemannian_excess_quasi_kaehler",
            formula: "int (s - s_J) = -1/4 int |N|^2 <= 0",
            classes: &[2, 3],
            dims: Dims::Any,
            t_range: |_| vec![(f64::NEG_INFINITY, f64::INFINITY)],
            sign: Sign::NonPositive,
            lhs: s_minus_sj,
            delta_coeff: |_| 2.0,
            integrand: |nb, _, _| -nb.nijenhuis / 4.0,
            equality: |_, _| (&["N"], "balanced Hermitian"),
        },
        SignTheorem {
            id: "first_chern_excess_lower",
            formula: "int (2 s_1(t) - s) = int (1/8|N|^2 + 1/2|(dF)_0^+|^2 + (t - t*)|alpha_F|^2) >= 0 for t >= t* = 1 - 1/(2(n-1))",
            classes: &[2, 3, 4],
            dims: Dims::AtLeast3,
            t_range: |n| vec![(critical_t(n), f64::INFINITY)],
            sign: Sign::NonNegative,
            lhs: twice_s1_minus_s,
            delta_coeff: |t| t - 2.0,
            integrand: |nb, t, n| nb.nijenhuis / 8.0 + nb.df_plus_primitive / 2.0 + (t - critical_t(n)) * nb.lee,
            equality: |t, n| {
                if t == critical_t(n) {
                    (&["N0", "(dF)0+"], "locally conformally Kaehler")
                } else {
                    (&["N0", "(dF)0+", "alpha"], "Kaehler")
                }
            },
        },
        SignTheorem {
            id: "first_chern_excess_upper",
            formula: "int (2 s_1(t) - s) = int (-5/6|(dF)^-|^2 + (t - t*)|alpha_F|^2) <= 0 for t <= t*",
            classes: &[1, 4],
            dims: Dims::AtLeast3,
            t_range: |n| vec![(f64::NEG_INFINITY, critical_t(n))],
            sign: Sign::NonPositive,
            lhs: twice_s1_minus_s,
            delta_coeff: |t| t - 2.0,
            integrand: |nb, t, n| -5.0 / 6.0 * nb.df_minus + (t - critical_t(n)) * nb.lee,
            equality: |t, n| {
                if t == critical_t(n) {
                    (&["(dF)-"], "locally conformally Kaehler")
                } else {
                    (&["(dF)-", "alpha"], "Kaehler")
                }
            },
        },
        SignTheorem {
            id: "first_chern_excess_surface_lower",
            formula: "int (2 s_1(t) - s) = int (1/8|N|^2 + (2t-1)/2|alpha_F|^2) >= 0 for t >= 1/2",
            classes: &[2, 3, 4],
            dims: Dims::Surface,
            t_range: |_| vec![(0.5, f64::INFINITY)],
            sign: Sign::NonNegative,
            lhs: twice_s1_minus_s,
            delta_coeff: |t| t - 2.0,
            integrand: |nb, t, _| nb.nijenhuis / 8.0 + (2.0 * t - 1.0) / 2.0 * nb.lee,
            equality: |t, _| {
                if t == 0.5 {
                    (&["N"], "Hermitian surface")
                } else {
                    (&["N", "alpha"], "Kaehler surface")
                }
            },
        },
        SignTheorem {
            id: "first_chern_excess_surface_upper",
            formula: "int (2 s_1(t) - s) = int (2t-1)/2|alpha_F|^2 <= 0 for integrable J and t <= 1/2",
            classes: &[3, 4],
            dims: Dims::Surface,
            t_range: |_| vec![(f64::NEG_INFINITY, 0.5)],
            sign: Sign::NonPositive,
            lhs: twice_s1_minus_s,
            delta_coeff: |t| t - 2.0,
            integrand: |nb, t, _| (2.0 * t - 1.0) / 2.0 * nb.lee,
            equality: |t, _| {
                if t == 0.5 {
                    (&[], "Hermitian surface")
                } else {
                    (&["alpha"], "Kaehler surface")
                }
            },
        },
        SignTheorem {
            id: "scalar_difference_lower",
            formula: "int (s_1(t) - s_2(t)) = int (1/32|N|^2 + (t-1)^2/4|(dF)_0^+|^2 + q(t)/(8(n-1))|alpha_F|^2) >= 0, q = (n+1)t^2 + (6n-10)t + 5 - 3n, t outside (-3-2sqrt3, -3+2sqrt3)",
            classes: &[2, 3, 4],
            dims: Dims::AtLeast3,
            t_range: |_| vec![(f64::NEG_INFINITY, -3.0 - 2.0 * SQRT3), (-3.0 + 2.0 * SQRT3, f64::INFINITY)],
            sign: Sign::NonNegative,
            lhs: s1_minus_s2,
            delta_coeff: |t| t - 0.5,
            integrand: |nb, t, n| {
                nb.nijenhuis / 32.0 + (t - 1.0).powi(2) / 4.0 * nb.df_plus_primitive + diff_q(t, n) * nb.lee
            },
            equality: |t, _| {
                if t == 1.0 {
                    (&["N", "alpha"], "balanced Hermitian")
                } else {
                    (&["N", "(dF)0+", "alpha"], "Kaehler")
                }
            },
        },
        SignTheorem {
            id: "scalar_difference_upper",
            formula: "int (s_1(t) - s_2(t)) = int (q(t)/(8(n-1))|alpha_F|^2 - 1/3|(dF)^-|^2) <= 0 for t in [-1, 1/3]",
            classes: &[1, 4],
            dims: Dims::AtLeast3,
            t_range: |_| vec![(-1.0, 1.0 / 3.0)],
            sign: Sign::NonPositive,
            lhs: s1_minus_s2,
            delta_coeff: |t| t - 0.5,
            integrand: |nb, t, n| diff_q(t, n) * nb.lee - nb.df_minus / 3.0,
            equality: |_, _| (&["(dF)-", "alpha"], "Kaehler"),
        },
        SignTheorem {
            id: "scalar_difference_surface_outer",
            formula: "int (s_1(t) - s_2(t)) = int (1/32|N|^2 + (3t-1)(t+1)/8|alpha_F|^2) >= 0 for t <= -1 or t >= 1/3",
            classes: &[2, 3, 4],
            dims: Dims::Surface,
            t_range: |_| vec![(f64::NEG_INFINITY, -1.0), (1.0 / 3.0, f64::INFINITY)],
            sign: Sign::NonNegative,
            lhs: s1_minus_s2,
            delta_coeff: |t| t - 0.5,
            integrand: |nb, t, _| nb.nijenhuis / 32.0 + (3.0 * t - 1.0) * (t + 1.0) / 8.0 * nb.lee,
            equality: |t, _| {
                if t == -1.0 || t == 1.0 / 3.0 {
                    (&["N"], "Hermitian surface")
                } else {
                    (&["N", "alpha"], "Kaehler surface")
                }
            },
        },
        SignTheorem {
            id: "scalar_difference_surface_inner",
            formula: "int (s_1(t) - s_2(t)) = int (3t-1)(t+1)/8|alpha_F|^2 <= 0 for integrable J and t in [-1, 1/3]",
            classes: &[3, 4],
            dims: Dims::Surface,
            t_range: |_| vec![(-1.0, 1.0 / 3.0)],
            sign: Sign::NonPositive,
            lhs: s1_minus_s2,
            delta_coeff: |t| t - 0.5,
            integrand: |nb, t, _| (3.0 * t - 1.0) * (t + 1.0) / 8.0 * nb.lee,
            equality: |t, _| {
                if t == -1.0 || t == 1.0 / 3.0 {
                    (&[], "Hermitian surface")
                } else {
                    (&["alpha"], "Kaehler surface")
                }
            },
        },
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignReport {
    pub theorem: String,
    pub t: f64,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integral: Option<IntegralEstimate>,
    /// Largest pointwise `|lhs − c(t)δα − integrand|`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pointwise_residual: Option<f64>,
    pub sign_holds: bool,
    pub equality: bool,
    /// Components found to vanish when equality holds.
    pub vanishing: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnosis: Option<String>,
}

impl SignReport {
    fn skipped(th: &SignTheorem, t: f64, reason: String) -> Self {
        Self {
            theorem: th.id.to_string(),
            t,
            status: Status::Skipped,
            reason: Some(reason),
            integral: None,
            pointwise_residual: None,
            sign_holds: false,
            equality: false,
            vanishing: Vec::new(),
            diagnosis: None,
        }
    }
}

fn hypotheses(th: &SignTheorem, class: GrayHervella, n: usize, t: f64) -> std::result::Result<(), String> {
    if !class.within(th.classes) {
        return Err(format!("class {class} not within the allowed components"));
    }
    if !th.dims.covers(n) {
        let want = if th.dims == Dims::Surface { "2" } else { "at least 3" };
        return Err(format!("statement is for complex dimension {want}, have {n}"));
    }
    if !(th.t_range)(n).iter().any(|(lo, hi)| *lo <= t && t <= *hi) {
        return Err(format!("t = {t} outside the range of the statement"));
    }
    Ok(())
}

/// Whether `|x| ≤ tol + 3σ`.
fn negligible(e: &IntegralEstimate, tol: f64) -> bool {
    e.value.abs() <= tol + 3.0 * e.sigma()
}

/// Run every sign theorem at each `t` on a prepared quadrature.
pub fn sign_theorem_checks(q: &Quadrature, class: GrayHervella, ts: &[f64], tol: Tolerance) -> Result<Vec<SignReport>> {
    let n = q.n;
    let mut out = Vec::new();
    for th in sign_theorems() {
        for &t in ts {
            if let Err(reason) = hypotheses(&th, class, n, t) {
                out.push(SignReport::skipped(&th, t, reason));
                continue;
            }
            let mut pointwise: f64 = 0.0;
            for c in q.contexts() {
                let nb = c.norms();
                let lhs = (th.lhs)(c, t)? - (th.delta_coeff)(t) * nb.delta_lee;
                let rhs = (th.integrand)(nb, t, n);
                let err = (lhs - rhs).abs();
                let scale = lhs.abs().max(rhs.abs());
                pointwise = pointwise.max(if scale > 0.0 && err / scale < tol.rel { 0.0 } else { err });
            }
            let integral = q.integrate(|c| (th.lhs)(c, t))?;
            let closed = q.integrate(|c| Ok((th.integrand)(c.norms(), t, n)))?;
            let slack = tol.abs + 3.0 * integral.sigma();
            let sign_holds = match th.sign {
                Sign::NonNegative => integral.value >= -slack,
                Sign::NonPositive => integral.value <= slack,
            };
            let equality = negligible(&closed, tol.abs);
            let (forced, conclusion) = (th.equality)(t, n);
            let mut vanishing = Vec::new();
            let mut consistent = true;
            if equality {
                for name in forced {
                    let e = q.integrate(|c| Ok(component(c.norms(), name)))?;
                    if negligible(&e, tol.abs) {
                        vanishing.push(name.to_string());
                    } else {
                        consistent = false;
                    }
                }
            }
            let pass = pointwise < tol.abs && sign_holds && consistent;
            out.push(SignReport {
                theorem: th.id.to_string(),
                t,
                status: if pass { Status::Pass } else { Status::Fail },
                reason: None,
                integral: Some(integral),
                pointwise_residual: Some(pointwise),
                sign_holds,
                equality,
                vanishing,
                diagnosis: (equality && consistent).then(|| conclusion.to_string()),
            });
        }
    }
    Ok(out)
}

/// `∫ lhs = ∫ rhs` over a compact quotient.
pub struct IntegralIdentity {
    pub id: &'static str,
    pub formula: &'static str,
    pub scope: Scope,
    pub param: Param,
    pub lhs: fn(&PointContext, Option<f64>) -> Result<f64>,
    pub rhs: fn(&PointContext, Option<f64>) -> Result<f64>,
}

fn need_t(t: Option<f64>) -> Result<f64> {
    t.ok_or_else(|| GeomError::Domain("integral identity needs t".into()))
}

pub fn integral_identities() -> Vec<IntegralIdentity> {
    vec![
        IntegralIdentity {
            id: "lee_divergence_integral",
            formula: "int delta alpha_F = 0",
            scope: Scope::AlmostHermitian,
            param: Param::None,
            lhs: |c, _| Ok(c.norms().delta_lee),
            rhs: |_, _| Ok(0.0),
        },
        IntegralIdentity {
            id: "scalar_difference_integral",
            formula: "int (s_1(t) - s_2(t)) = int (-1/3|(dF)^-|^2 + 1/32|N0|^2 + (t-1)^2/4|(dF)_0^+|^2 + q(t)/(8(n-1))|alpha_F|^2)",
            scope: Scope::AlmostHermitian,
            param: Param::T,
            lhs: |c, t| s1_minus_s2(c, need_t(t)?),
            rhs: |c, t| {
                let (t, nb) = (need_t(t)?, c.norms());
                Ok(-nb.df_minus / 3.0 + nb.n0 / 32.0 + (t - 1.0).powi(2) / 4.0 * nb.df_plus_primitive
                    + diff_q(t, c.g.n) * nb.lee)
            },
        },
        IntegralIdentity {
            id: "chern_scalar_difference_integral",
            formula: "int (s_1(1) - s_2(1)) = 1/2 int |alpha_F|^2",
            scope: Scope::Hermitian,
            param: Param::None,
            lhs: |c, _| s1_minus_s2(c, 1.0),
            rhs: |c, _| Ok(c.norms().lee / 2.0),
        },
        IntegralIdentity {
            id: "chern_first_scalar_excess_integral",
            formula: "int (2 s_1(1) - s) = 1/2 int |dF|^2",
            scope: Scope::Hermitian,
            param: Param::None,
            lhs: |c, _| twice_s1_minus_s(c, 1.0),
            rhs: |c, _| Ok(c.norms().df / 2.0),
        },
        IntegralIdentity {
            id: "bismut_scalar_difference_integral",
            formula: "int (s_1(-1) - s_2(-1)) = int (|dF|^2 - |alpha_F|^2)",
            scope: Scope::HermitianAtLeast3,
            param: Param::None,
            lhs: |c, _| s1_minus_s2(c, -1.0),
            rhs: |c, _| Ok(c.norms().df - c.norms().lee),
        },
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralCheck {
    pub identity_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lhs: Option<IntegralEstimate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rhs: Option<IntegralEstimate>,
    /// `∫ (lhs − rhs)`, whose standard error sets the acceptance band.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub difference: Option<IntegralEstimate>,
}

/// Pass when `|∫(lhs − rhs)| ≤ tol_abs + 3σ`.
pub fn integral_identity_checks(
    q: &Quadrature,
    class: GrayHervella,
    ts: &[f64],
    tol: Tolerance,
) -> Result<Vec<IntegralCheck>> {
    let n = q.n;
    let mut out = Vec::new();
    for ii in integral_identities() {
        let scope = ii.scope.applies(class, n);
        for (t, _) in ii.param.values(n, ts) {
            if let Err(reason) = &scope {
                out.push(IntegralCheck {
                    identity_id: ii.id.to_string(),
                    t,
                    status: Status::Skipped,
                    reason: Some(reason.clone()),
                    lhs: None,
                    rhs: None,
                    difference: None,
                });
                continue;
            }
            let lhs = q.integrate(|c| (ii.lhs)(c, t))?;
            let rhs = q.integrate(|c| (ii.rhs)(c, t))?;
            let difference = q.integrate(|c| Ok((ii.lhs)(c, t)? - (ii.rhs)(c, t)?))?;
            let pass = negligible(&difference, tol.abs);
            out.push(IntegralCheck {
                identity_id: ii.id.to_string(),
                t,
                status: if pass { Status::Pass } else { Status::Fail },
                reason: None,
                lhs: Some(lhs),
                rhs: Some(rhs),
                difference: Some(difference),
            });
        }
    }
    Ok(out)
}

/// The `k`-Gauduchon density at one point, computed by differentiating
/// `F^k` and from the closed form in the component norms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KGauduchon {
    pub k: usize,
    pub lhs_density: f64,
    pub rhs_density: f64,
    pub residual: f64,
}

pub fn kgauduchon(c: &PointContext, k: usize) -> Result<KGauduchon> {
    let n = c.g.n;
    if n < 3 {
        return Err(GeomError::Domain(format!("k-Gauduchon densities need complex dimension at least 3, have {n}")));
    }
    let nb = c.norms();
    if nb.df_minus > CLASS_TOL || nb.n0 > CLASS_TOL {
        return Err(GeomError::Domain("k-Gauduchon densities need an integrable J".into()));
    }
    let lhs_density = c.g.kgauduchon_density(k)?;
    let rhs_density = kgauduchon_rhs(c, k);
    Ok(KGauduchon { k, lhs_density, rhs_density, residual: (lhs_density - rhs_density).abs() })
}

/// Integrated `k`-Gauduchon density: the structure is `k`-Gauduchon when it
/// vanishes identically.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KGauduchonTheorem {
    pub k: usize,
    pub density: IntegralEstimate,
    pub closed_form: IntegralEstimate,
    pub max_residual: f64,
    /// Largest `|density|` over the nodes.
    pub max_density: f64,
}

pub fn kgauduchon_theorem(q: &Quadrature, k: usize) -> Result<KGauduchonTheorem> {
    let mut max_residual: f64 = 0.0;
    let mut max_density: f64 = 0.0;
    for c in q.contexts() {
        let kg = kgauduchon(c, k)?;
        max_residual = max_residual.max(kg.residual);
        max_density = max_density.max(kg.lhs_density.abs());
    }
    let density = q.integrate(|c| c.g.kgauduchon_density(k))?;
    let closed_form = q.integrate(|c| Ok(kgauduchon_rhs(c, k)))?;
    Ok(KGauduchonTheorem { k, density, closed_form, max_residual, max_density })
}
