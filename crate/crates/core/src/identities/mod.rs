//! Registry of pointwise identities with a suite runner, quadrature over
//! fundamental domains, the integral sign theorems and the k-Gauduchon
//! densities.

mod quadrature;
mod registry;
mod theorems;

pub use quadrature::{integrate_named, named_integrand, IntegralEstimate, NamedIntegrand, Quadrature, INTEGRAND_NAMES};
pub use registry::{registry, IdentityDef, Param, Scope};
pub use theorems::{
    integral_identities, integral_identity_checks, kgauduchon, kgauduchon_theorem, sign_theorem_checks, sign_theorems,
    Dims, IntegralCheck, IntegralIdentity, KGauduchon, KGauduchonTheorem, SignReport, SignTheorem, Status,
};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::forms::KForm;
use crate::gauduchon::{first_chern_form, ricci_forms, scalar_curvatures, to_unitary, ChernTorsion};
use crate::hermitian::{GrayHervella, NormBundle};
use crate::jet::ChartPoint;
use crate::manifold::Manifold;
use crate::pipeline::PointGeometry;

pub const DEFAULT_TOL_ABS: f64 = 1e-8;
pub const DEFAULT_TOL_REL: f64 = 1e-6;
/// Squared norm below which a Gray–Hervella component counts as absent.
pub const CLASS_TOL: f64 = 1e-12;

/// Parameter value where `t` meets the first critical value `1 − 1/(2(n−1))`.
pub fn critical_t(n: usize) -> f64 {
    1.0 - 1.0 / (2.0 * (n as f64 - 1.0))
}

/// The default `t` grid: Bismut, Lichnerowicz, `½`, the critical value,
/// Chern and `2`.
pub fn default_t_values(n: usize) -> Vec<f64> {
    let mut ts = vec![-1.0, 0.0, 0.5, critical_t(n), 1.0, 2.0];
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    ts
}

/// Curvature data of `D^t` at one point.
#[derive(Clone, Debug)]
pub struct Level {
    pub t: f64,
    pub k_frame: Vec<f64>,
    pub k_unitary: Vec<Complex64>,
    pub s1: f64,
    pub s2: f64,
    /// Largest imaginary part of the two contractions.
    pub imag: f64,
    pub rho1: KForm<f64>,
    pub rho1_imag: f64,
    pub ricci: [(KForm<f64>, f64); 4],
}

impl Level {
    fn new(g: &PointGeometry, t: f64) -> Self {
        let n = g.n;
        let k_frame = g.curvature_t.at(t);
        let k_unitary = to_unitary(&k_frame, 4, n);
        let (s1, s2, imag) = scalar_curvatures(&k_unitary, n);
        let (rho1, rho1_imag) = first_chern_form(&k_frame, n);
        let ricci = ricci_forms(&k_unitary, n);
        Self { t, k_frame, k_unitary, s1, s2, imag, rho1, rho1_imag, ricci }
    }
}

/// Point geometry plus the Chern torsion and the curvature of `D^t` on a
/// fixed set of `t`.
#[derive(Clone, Debug)]
pub struct PointContext {
    pub g: PointGeometry,
    pub torsion: ChernTorsion,
    levels: Vec<Level>,
}

impl PointContext {
    /// Levels are built for `ts` together with `−1, 0, 1`.
    pub fn new(g: PointGeometry, ts: &[f64]) -> Self {
        let torsion = ChernTorsion::new(&g.torsion, g.n);
        let mut all: Vec<f64> = ts.iter().copied().chain([-1.0, 0.0, 1.0]).collect();
        all.sort_by(f64::total_cmp);
        all.dedup();
        let levels = all.into_iter().map(|t| Level::new(&g, t)).collect();
        Self { g, torsion, levels }
    }

    pub fn compute(m: &Manifold, x: &[f64], ts: &[f64]) -> Result<Self> {
        Ok(Self::new(PointGeometry::compute(m, x)?, ts))
    }

    pub fn level(&self, t: f64) -> Result<&Level> {
        self.levels
            .iter()
            .find(|l| l.t == t)
            .ok_or_else(|| GeomError::Domain(format!("curvature at t = {t} was not prepared")))
    }

    pub fn norms(&self) -> &NormBundle {
        &self.g.norms
    }
}

/// Both sides of an identity. Tensor identities report Euclidean norms of
/// the two sides and the largest componentwise difference.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Comparison {
    pub lhs: f64,
    pub rhs: f64,
    pub abs_err: f64,
}

impl Comparison {
    pub fn scalar(lhs: f64, rhs: f64) -> Self {
        Self { lhs, rhs, abs_err: (lhs - rhs).abs() }
    }

    /// A quantity that must vanish.
    pub fn residual(r: f64) -> Self {
        Self { lhs: r, rhs: 0.0, abs_err: r.abs() }
    }

    pub fn tensors(l: &[f64], r: &[f64]) -> Self {
        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let abs_err = l.iter().zip(r).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        Self { lhs: norm(l), rhs: norm(r), abs_err }
    }

    pub fn complex(l: &[Complex64], r: &[Complex64]) -> Self {
        let norm = |v: &[Complex64]| v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        let abs_err = l.iter().zip(r).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        Self { lhs: norm(l), rhs: norm(r), abs_err }
    }

    pub fn forms(l: &KForm<f64>, r: &KForm<f64>) -> Self {
        Self::tensors(l.comps(), r.comps())
    }

    pub fn rel_err(&self) -> f64 {
        let scale = self.lhs.abs().max(self.rhs.abs());
        if self.abs_err == 0.0 {
            0.0
        } else if scale == 0.0 {
            f64::INFINITY
        } else {
            self.abs_err / scale
        }
    }
}

/// Pass rule shared by every comparison: `abs_err < tol_abs` or
/// `rel_err < tol_rel`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { abs: DEFAULT_TOL_ABS, rel: DEFAULT_TOL_REL }
    }
}

impl Tolerance {
    pub fn accepts(&self, c: &Comparison) -> bool {
        c.abs_err < self.abs || c.rel_err() < self.rel
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityResult {
    pub identity_id: String,
    pub point: ChartPoint,
    pub t: Option<f64>,
    pub k: Option<usize>,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl IdentityResult {
    fn failed(id: &str, point: ChartPoint, t: Option<f64>, k: Option<usize>, err: String) -> Self {
        Self {
            identity_id: id.to_string(),
            point,
            t,
            k,
            lhs: f64::NAN,
            rhs: f64::NAN,
            abs_err: f64::NAN,
            rel_err: f64::NAN,
            pass: false,
            error: Some(err),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Skipped {
    pub identity_id: String,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteReport {
    /// Class computed from the sampled component norms.
    pub class: GrayHervella,
    pub results: Vec<IdentityResult>,
    pub skipped: Vec<Skipped>,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityResult> {
        self.results.iter().filter(|r| !r.pass)
    }
}

/// Build contexts at every point in parallel, preserving order.
pub fn prepare_points(m: &Manifold, points: &[Vec<f64>], ts: &[f64]) -> Vec<Result<PointContext>> {
    points.par_iter().map(|x| PointContext::compute(m, x, ts)).collect()
}

/// Class from component norms over a set of prepared points.
pub fn classify_contexts<'a>(ctxs: impl IntoIterator<Item = &'a PointContext>, tol: f64) -> GrayHervella {
    GrayHervella::classify(ctxs.into_iter().map(|c| c.norms()), tol)
}

/// Every applicable identity at every point and parameter value.
pub fn run_pointwise_suite(m: &Manifold, points: &[Vec<f64>], ts: &[f64], tol: Tolerance) -> SuiteReport {
    let ctxs = prepare_points(m, points, ts);
    suite_on_contexts(m.n, points, &ctxs, ts, tol)
}

/// As [`run_pointwise_suite`] on already prepared contexts.
pub fn suite_on_contexts(
    n: usize,
    points: &[Vec<f64>],
    ctxs: &[Result<PointContext>],
    ts: &[f64],
    tol: Tolerance,
) -> SuiteReport {
    let class = classify_contexts(ctxs.iter().filter_map(|c| c.as_ref().ok()), CLASS_TOL);
    let defs = registry();
    let mut skipped = Vec::new();
    let active: Vec<&IdentityDef> = defs
        .iter()
        .filter(|d| match d.scope.applies(class, n) {
            Ok(()) => true,
            Err(reason) => {
                skipped.push(Skipped { identity_id: d.id.to_string(), reason });
                false
            }
        })
        .collect();
    let per_point: Vec<Vec<IdentityResult>> = points
        .par_iter()
        .zip(ctxs.par_iter())
        .map(|(x, ctx)| {
            let point = ChartPoint::new(x.clone());
            let ctx = match ctx {
                Ok(c) => c,
                Err(e) => {
                    return vec![IdentityResult::failed("pipeline", point, None, None, e.to_string())];
                }
            };
            let mut out = Vec::new();
            for def in &active {
                for (t, k) in def.param.values(n, ts) {
                    let arg = t.or(k.map(|k| k as f64));
                    let r = match (def.eval)(ctx, arg) {
                        Ok(c) => IdentityResult {
                            identity_id: def.id.to_string(),
                            point: point.clone(),
                            t,
                            k,
                            lhs: c.lhs,
                            rhs: c.rhs,
                            abs_err: c.abs_err,
                            rel_err: c.rel_err(),
                            pass: tol.accepts(&c),
                            error: None,
                        },
                        Err(e) => IdentityResult::failed(def.id, point.clone(), t, k, e.to_string()),
                    };
                    out.push(r);
                }
            }
            out
        })
        .collect();
    // identity-major order: registry position, then point, then parameter
    let order = |id: &str| defs.iter().position(|d| d.id == id).unwrap_or(usize::MAX);
    let mut results: Vec<(usize, usize, usize, IdentityResult)> = per_point
        .into_iter()
        .enumerate()
        .flat_map(|(p, rs)| rs.into_iter().enumerate().map(move |(i, r)| (p, i, r)))
        .map(|(p, i, r)| (order(&r.identity_id), p, i, r))
        .collect();
    results.sort_by_key(|(o, p, i, _)| (*o, *p, *i));
    SuiteReport { class, results: results.into_iter().map(|(.., r)| r).collect(), skipped }
}

/// Per-identity spread of `lhs` over points, keyed by `(id, t, k)`.
pub fn lhs_spread(results: &[IdentityResult]) -> Vec<(String, Option<f64>, Option<usize>, f64)> {
    let mut out: Vec<(String, Option<f64>, Option<usize>, f64, f64)> = Vec::new();
    for r in results.iter().filter(|r| r.error.is_none()) {
        match out.iter_mut().find(|e| e.0 == r.identity_id && e.1 == r.t && e.2 == r.k) {
            Some(e) => {
                e.3 = e.3.min(r.lhs);
                e.4 = e.4.max(r.lhs);
            }
            None => out.push((r.identity_id.clone(), r.t, r.k, r.lhs, r.lhs)),
        }
    }
    out.into_iter().map(|(id, t, k, lo, hi)| (id, t, k, hi - lo)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_rule_uses_either_tolerance() {
        let tol = Tolerance { abs: 1e-8, rel: 1e-6 };
        assert!(tol.accepts(&Comparison::scalar(1e6, 1e6 + 0.5)));
        assert!(tol.accepts(&Comparison::scalar(0.0, 1e-9)));
        assert!(!tol.accepts(&Comparison::scalar(1.0, 1.0 + 1e-5)));
        assert!(!tol.accepts(&Comparison::residual(1e-7)));
    }

    #[test]
    fn default_grid_contains_critical_value() {
        let ts = default_t_values(3);
        assert_eq!(ts, vec![-1.0, 0.0, 0.5, 0.75, 1.0, 2.0]);
        assert_eq!(default_t_values(2).len(), 5);
    }
}
