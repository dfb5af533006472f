use serde::{Deserialize, Serialize};

use super::{Comparison, PointContext};
use crate::error::{GeomError, Result};
use crate::forms::KForm;
use crate::frame::{standard_f, standard_j};
use crate::gauduchon::{
    gamma_unitary, hermitian_closed_form, lichnerowicz_from_s, lichnerowicz_from_sj, nijenhuis_unitary, s1_closed_form,
    s2_closed_form, scalar_difference, shifted_from_lichnerowicz, surface_closed_form,
};
use crate::hermitian::{lambda_contract, vector_two_form_norm_sq, GrayHervella};
use crate::riemannian::{i3, i4};

/// Which structures an identity is claimed for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scope {
    AlmostHermitian,
    /// Integrable `J`: `(dF)⁻ = N⁰ = 0`.
    Hermitian,
    /// Real dimension four.
    Surface,
    /// Integrable and real dimension at least six.
    HermitianAtLeast3,
}

impl Scope {
    pub fn applies(&self, class: GrayHervella, n: usize) -> std::result::Result<(), String> {
        match self {
            Scope::AlmostHermitian => Ok(()),
            Scope::Hermitian if !class.is_hermitian() => Err(format!("needs integrable J, class is {class}")),
            Scope::Hermitian => Ok(()),
            Scope::Surface if n != 2 => Err(format!("needs complex dimension 2, have {n}")),
            Scope::Surface => Ok(()),
            Scope::HermitianAtLeast3 if n < 3 => Err(format!("needs complex dimension at least 3, have {n}")),
            Scope::HermitianAtLeast3 => Scope::Hermitian.applies(class, n),
        }
    }
}

/// The parameter an identity is evaluated over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Param {
    None,
    /// Every `t` of the run.
    T,
    /// `k = 1, …, n−1`.
    K,
}

impl Param {
    pub fn values(&self, n: usize, ts: &[f64]) -> Vec<(Option<f64>, Option<usize>)> {
        match self {
            Param::None => vec![(None, None)],
            Param::T => ts.iter().map(|t| (Some(*t), None)).collect(),
            Param::K => (1..n).map(|k| (None, Some(k))).collect(),
        }
    }
}

pub type EvalFn = fn(&PointContext, Option<f64>) -> Result<Comparison>;

pub struct IdentityDef {
    pub id: &'static str,
    /// The identity as a formula.
    pub anchor: &'static str,
    pub scope: Scope,
    pub param: Param,
    pub eval: EvalFn,
}

impl std::fmt::Debug for IdentityDef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "IdentityDef({})", self.id)
    }
}

fn arg(a: Option<f64>) -> Result<f64> {
    a.ok_or_else(|| GeomError::Domain("identity needs a parameter value".into()))
}

/// `J e_b = sign · e_c` in the adapted frame.
fn j_image(n: usize, b: usize) -> (usize, f64) {
    if b < n {
        (b + n, 1.0)
    } else {
        (b - n, -1.0)
    }
}

fn nabla_f_from_df(c: &PointContext) -> Result<Comparison> {
    let g = &c.g;
    let (n, d) = (g.n, g.dim());
    let df = &g.decomposition.df;
    let mut rhs = vec![0.0; d * d * d];
    for x in 0..d {
        for y in 0..d {
            for z in 0..d {
                let (jy, sy) = j_image(n, y);
                let (jz, sz) = j_image(n, z);
                rhs[i3(d, x, y, z)] =
                    0.5 * (df.eval(&[x, y, z]) - sy * sz * df.eval(&[x, jy, jz]) - g.decomposition.n_j_first(x, y, z));
            }
        }
    }
    Ok(Comparison::tensors(&g.nabla_f, &rhs))
}

fn nabla_f_skew(c: &PointContext) -> Result<Comparison> {
    let g = &c.g;
    let (n, d) = (g.n, g.dim());
    let nf = |x, y, z| g.nabla_f[i3(d, x, y, z)];
    let mut r = 0.0_f64;
    for x in 0..d {
        for y in 0..d {
            for z in 0..d {
                let (jy, sy) = j_image(n, y);
                let (jz, sz) = j_image(n, z);
                r = r.max((nf(x, y, z) + nf(x, z, y)).abs());
                r = r.max((nf(x, y, z) + sy * sz * nf(x, jy, jz)).abs());
            }
        }
    }
    Ok(Comparison::residual(r))
}

fn nijenhuis_symmetries(c: &PointContext) -> Result<Comparison> {
    let g = &c.g;
    let (n, d) = (g.n, g.dim());
    let nt = &g.nijenhuis;
    let mut r = 0.0_f64;
    for a in 0..d {
        for b in 0..d {
            for e in 0..d {
                // N(JX,Y) = −J N(X,Y), paired with e_a
                let (jb, sb) = j_image(n, b);
                r = r.max((sb * nt[i3(d, a, jb, e)] - g.decomposition.n_j_first(a, b, e)).abs());
                r = r.max((nt[i3(d, a, b, e)] + nt[i3(d, a, e, b)]).abs());
            }
        }
    }
    Ok(Comparison::residual(r))
}

fn df_primitive_part(c: &PointContext) -> Result<Comparison> {
    let g = &c.g;
    let (n, d) = (g.n, g.dim());
    let f = standard_f(n);
    let df0 = g.decomposition.df.sub(&g.lee_contraction.wedge(&f).scale(1.0 / (n as f64 - 1.0)));
    let eye: Vec<f64> = (0..d * d).map(|i| if i % (d + 1) == 0 { 1.0 } else { 0.0 }).collect();
    Ok(Comparison::residual(lambda_contract(&df0, &f, &eye).max_abs()))
}

/// `¼ Σ_A ⟨J(∇_X J)e_A, (∇_Y J)e_A⟩` as a frame 2-form.
fn nabla_j_square(c: &PointContext) -> KForm<f64> {
    let g = &c.g;
    let (n, d) = (g.n, g.dim());
    let jf = standard_j(n);
    KForm::from_fn(d, 2, |s| {
        let (x, y) = (s[0], s[1]);
        let mut acc = 0.0;
        for a in 0..d {
            for cc in 0..d {
                for e in 0..d {
                    acc += g.nabla_f[i3(d, x, a, cc)] * jf[e * d + cc] * g.nabla_f[i3(d, y, a, e)];
                }
            }
        }
        acc / 4.0
    })
}

fn lichnerowicz_curvature(c: &PointContext) -> Result<Comparison> {
    let g = &c.g;
    let (n, d) = (g.n, g.dim());
    let jf = standard_j(n);
    let r = |a, b, z, w| g.riemann.get(a, b, z, w);
    let nf = |z, a, e| g.nabla_f[i3(d, z, a, e)];
    let mut rhs = vec![0.0; d * d * d * d];
    for x in 0..d {
        for y in 0..d {
            let (jx, sx) = j_image(n, x);
            let (jy, sy) = j_image(n, y);
            debug_assert_eq!(jf[jx * d + x], sx);
            for z in 0..d {
                for w in 0..d {
                    let mut v = 0.5 * (r(x, y, z, w) + sx * sy * r(jx, jy, z, w));
                    for e in 0..d {
                        v += 0.25 * (nf(z, x, e) * nf(w, y, e) - nf(w, x, e) * nf(z, y, e));
                    }
                    rhs[i4(d, x, y, z, w)] = v;
                }
            }
        }
    }
    Ok(Comparison::tensors(&g.curvature_t.k0, &rhs))
}

fn kgauduchon_closed(c: &PointContext, k: usize) -> f64 {
    let nb = c.norms();
    let n = c.g.n;
    let fact: f64 = (1..=n.saturating_sub(3)).map(|i| i as f64).product();
    let (kf, nf) = (k as f64, n as f64);
    kf * fact / 2.0 * ((nf - kf - 1.0) * (nb.df - nb.lee) - (nf - 2.0) * nb.delta_lee)
}

fn k_of(a: Option<f64>) -> Result<usize> {
    Ok(arg(a)? as usize)
}

/// All registered identities in reporting order.
pub fn registry() -> Vec<IdentityDef> {
    use Param as P;
    use Scope as S;
    vec![
        IdentityDef {
            id: "fundamental_form_norm",
            anchor: "|F|^2 = n",
            scope: S::AlmostHermitian,
            param: P::None,
            eval: |c, _| Ok(Comparison::scalar(c.g.f.norm_sq(), c.g.n as f64)),
        },
        IdentityDef {
            id: "volume_form",
            anchor: "|F^n/n!| = sqrt(det h) dx",
            scope: S::AlmostHermitian,
            param: P::None,
            eval: |c, _| Ok(Comparison::scalar(c.g.volume_ratio.abs(), 1.0)),
        },
        IdentityDef {
            id: "nabla_f_from_df_and_nijenhuis",
            anchor: "(nabla_X F)(Y,Z) = 1/2[dF(X,Y,Z) - dF(X,JY,JZ) - <JX,N(Y,Z)>]",
            scope: S::AlmostHermitian,
            param: P::None,
            eval: |c, _| nabla_f_from_df(c),
        },
        IdentityDef {
            id: "nabla_f_symmetries",
            anchor: "(nabla_X F)(Y,Z) = -(nabla_X F)(Z,Y) = -(nabla_X F)(JY,JZ)",
            scope: S::AlmostHermitian,
            param: P::None,
            eval: |c, _| nabla_f_skew(c),
        },
        IdentityDef {
            id: "nijenhuis_symmetries",
            anchor: "N(Y,X) = -N(X,Y), N(JX,Y) = -J N(X,Y)",
            scope: S::AlmostHermitian,
            param: P::None,
            eval: |c, _| nijenhuis_symmetries(c),
        },
        IdentityDef {
            id: "nabla_f_decomposition",
            anchor: "(nabla_X F)(Y,Z) = (dF)^-(X,Y,Z) - 1/2 N(JX,Y,Z) + 1/2[(dF)^+(X,Y,Z) - (dF)^+(X,JY,JZ)]",
            scope: S::AlmostHermitian,
            param: P::None,
            eval: |c, _| Ok(Comparison::tensors(&c.g.nabla_f, &c.g.decomposition.reconstruct_nabla_f())),
        },
        IdentityDef {
            id: "df_primitive_part",
            anchor: "dF = (dF)_0 + alpha_F ^ F/(n-1), Lambda (dF)_0 = 0",
            scope: S::AlmostHermitian,
            param: P::None,
            eval: |c, _| df_primitive_part(c),
        },
        IdentityDef {
            id: "lee_form_two_paths",
            anchor: "alpha_F = J delta F",
            scope: S::AlmostHermitian,
            param: P::None,
            eval: |c, _| Ok(Comparison::forms(&c.g.lee_contraction, &c.g.lee_codifferential)),
        },
        IdentityDef {
            id: "nabla_f_norm_total",
            anchor: "|nabla F|^2 = |dF|^2 + 1/4|N0|^2 - 2/3|(dF)^-|^2",
            scope: S::AlmostHermitian,
            param: P::None,
            eval: |c, _| {
                let nb = c.norms();
                Ok(Comparison::scalar(nb.nabla_f, nb.df + nb.n0 / 4.0 - 2.0 / 3.0 * nb.df_minus))
            },
        },
        IdentityDef {
            id: "nabla_f_norm_plus",
            anchor: "|nabla F|^2 = |(dF)^+|^2 + 1/4|N0|^2 + 1/3|(dF)^-|^2",
            scope: S::AlmostHermitian,
            param: P::None,
            eval: |c, _| {
                let nb = c.norms();
                Ok(Comparison::scalar(nb.nabla_f, nb.df_plus + nb.n0 / 4.0 + nb.df_minus / 3.0))
            },
        },
        IdentityDef {
            id: "nabla_f_norm_components",
            anchor: "|nabla F|^2 = |alpha_F|^2/(n-1) + |(dF)_0^+|^2 + 1/4|N0|^2 + 1/3|(dF)^-|^2",
            scope: S::AlmostHermitian,
            param: P::None,
            eval: |c, _| {
                let nb = c.norms();
                let n = c.g.n as f64;
                let rhs = nb.lee / (n - 1.0) + nb.df_plus_primitive + nb.n0 / 4.0 + nb.df_minus / 3.0;
                Ok(Comparison::scalar(nb.nabla_f, rhs))
            },
        },
        IdentityDef {
            id: "nabla_f_norm_integrable",
            anchor: "|nabla F|^2 = |dF|^2 for integrable J",
            scope: S::Hermitian,
            param: P::None,
            eval: |c, _| Ok(Comparison::scalar(c.norms().nabla_f, c.norms().df)),
        },
        IdentityDef {
            id: "riemann_symmetries",
            anchor: "R_ABCD = -R_BACD = -R_ABDC = R_CDAB, R_A[BCD] = 0",
            scope: S::AlmostHermitian,
            param: P::None,
            eval: |c, _| Ok(Comparison::residual(c.g.riemann.symmetry_residual())),
        },
        IdentityDef {
            id: "j_ricci_form_curvature_operator",
            anchor: "rho_J = R(F)",
            scope: S::AlmostHermitian,
            param: P::None,
            eval: |c, _| Ok(Comparison::forms(&c.g.rho_j, &c.g.curvature_operator_f)),
        },
        IdentityDef {
            id: "j_scalar_curvature_operator",
            anchor: "s_J = 2<R(F),F>",
            scope: S::AlmostHermitian,
            param: P::None,
            eval: |c, _| Ok(Comparison::scalar(c.g.s_j, 2.0 * c.g.curvature_operator_f.inner(&c.g.f)?)),
        },
        IdentityDef {
            id: "weyl_f_contraction",
            anchor: "<W(F),F> = [(2n-1)s_J - s]/(2(2n-1))",
            scope: S::AlmostHermitian,
            param: P::None,
            eval: |c, _| {
                let m = 2.0 * c.g.n as f64 - 1.0;
                Ok(Comparison::scalar(c.g.weyl_f, (m * c.g.s_j - c.g.s) / (2.0 * m)))
            },
        },
        IdentityDef {
            id: "trace_bochner",
            anchor: "2(n-1)/(2n-1) s - 2<W(F),F> = |dF|^2 + |alpha_F|^2 + 2 delta alpha_F - |nabla F|^2",
            scope: S::AlmostHermitian,
            param: P::None,
            eval: |c, _| {
                let (nb, n) = (c.norms(), c.g.n as f64);
                let lhs = 2.0 * (n - 1.0) / (2.0 * n - 1.0) * c.g.s - 2.0 * c.g.weyl_f;
                Ok(Comparison::scalar(lhs, nb.df + nb.lee + 2.0 * nb.delta_lee - nb.nabla_f))
            },
        },
        IdentityDef {
            id: "s_minus_sj_norms",
            anchor: "s - s_J = |dF|^2 - |nabla F|^2 + |alpha_F|^2 + 2 delta alpha_F",
            scope: S::AlmostHermitian,
            param: P::None,
            eval: |c, _| {
                let nb = c.norms();
                Ok(Comparison::scalar(c.g.s - c.g.s_j, nb.df - nb.nabla_f + nb.lee + 2.0 * nb.delta_lee))
            },
        },
        IdentityDef {
            id: "s_minus_sj_components",
            anchor: "s - s_J = 2/3|(dF)^-|^2 - 1/4|N0|^2 + |alpha_F|^2 + 2 delta alpha_F",
            scope: S::AlmostHermitian,
            param: P::None,
            eval: |c, _| {
                let nb = c.norms();
                let rhs = 2.0 / 3.0 * nb.df_minus - nb.n0 / 4.0 + nb.lee + 2.0 * nb.delta_lee;
                Ok(Comparison::scalar(c.g.s - c.g.s_j, rhs))
            },
        },
        IdentityDef {
            id: "lichnerowicz_curvature",
            anchor: "K0(X,Y,Z,W) = 1/2[R(X,Y,Z,W) + R(JX,JY,Z,W)] + 1/4[<(nabla_Z J)X,(nabla_W J)Y> - <(nabla_W J)X,(nabla_Z J)Y>]",
            scope: S::AlmostHermitian,
            param: P::None,
            eval: |c, _| lichnerowicz_curvature(c),
        },
        IdentityDef {
            id: "first_chern_form_lichnerowicz",
            anchor: "rho_1(0)(X,Y) = R(F)(X,Y) + 1/4<J(nabla_X J)e_A,(nabla_Y J)e_A>",
            scope: S::AlmostHermitian,
            param: P::None,
            eval: |c, _| Ok(Comparison::forms(&c.level(0.0)?.rho1, &c.g.rho_j.add(&nabla_j_square(c)))),
        },
        IdentityDef {
            id: "s1_lichnerowicz_j_scalar",
            anchor: "s_1(0) = s_J/2 + 1/4|(dF)^+|^2 - 1/12|(dF)^-|^2 - 1/16|N0|^2",
            scope: S::AlmostHermitian,
            param: P::None,
            eval: |c, _| {
                let (s1, _) = lichnerowicz_from_sj(c.norms(), c.g.s, c.g.s_j);
                Ok(Comparison::scalar(c.level(0.0)?.s1, s1))
            },
        },
        IdentityDef {
            id: "s2_lichnerowicz_j_scalar",
            anchor: "s_2(0) = (s_J + s)/4 + 1/8[|alpha_F|^2 - (|nabla F|^2 - |dF|^2)]",
            scope: S::AlmostHermitian,
            param: P::None,
            eval: |c, _| {
                let (_, s2) = lichnerowicz_from_sj(c.norms(), c.g.s, c.g.s_j);
                Ok(Comparison::scalar(c.level(0.0)?.s2, s2))
            },
        },
        IdentityDef {
            id: "s1_lichnerowicz",
            anchor: "s_1(0) = s/2 - 5/12|(dF)^-|^2 + 1/16|N0|^2 + 1/4|(dF)_0^+|^2 + (3-2n)/(4(n-1))|alpha_F|^2 - delta alpha_F",
            scope: S::AlmostHermitian,
            param: P::None,
            eval: |c, _| {
                let (s1, _) = lichnerowicz_from_s(c.norms(), c.g.s, c.g.n)?;
                Ok(Comparison::scalar(c.level(0.0)?.s1, s1))
            },
        },
        IdentityDef {
            id: "s2_lichnerowicz",
            anchor: "s_2(0) = s/2 - 1/12|(dF)^-|^2 + 1/32|N0|^2 - 1/8|alpha_F|^2 - 1/2 delta alpha_F",
            scope: S::AlmostHermitian,
            param: P::None,
            eval: |c, _| {
                let (_, s2) = lichnerowicz_from_s(c.norms(), c.g.s, c.g.n)?;
                Ok(Comparison::scalar(c.level(0.0)?.s2, s2))
            },
        },
        IdentityDef {
            id: "connection_metric_compatible",
            anchor: "D^t h = 0",
            scope: S::AlmostHermitian,
            param: P::T,
            eval: |c, t| Ok(Comparison::residual(c.g.connection_residuals(arg(t)?).0)),
        },
        IdentityDef {
            id: "connection_j_compatible",
            anchor: "D^t J = 0",
            scope: S::AlmostHermitian,
            param: P::T,
            eval: |c, t| Ok(Comparison::residual(c.g.connection_residuals(arg(t)?).1)),
        },
        IdentityDef {
            id: "chern_torsion_no_mixed_part",
            anchor: "T^{D^1}(u_j, u_kbar) = 0",
            scope: S::AlmostHermitian,
            param: P::None,
            eval: |c, _| Ok(Comparison::residual(c.torsion.mixed)),
        },
        IdentityDef {
            id: "nijenhuis_chern_torsion",
            anchor: "N^k_{ibar jbar} = -4 T^k_{ibar jbar}",
            scope: S::AlmostHermitian,
            param: P::None,
            eval: |c, _| {
                let lhs = nijenhuis_unitary(&c.g.nijenhuis, c.g.n);
                Ok(Comparison::complex(&lhs, &c.torsion.predicted_nijenhuis()))
            },
        },
        IdentityDef {
            id: "lee_form_chern_torsion",
            anchor: "alpha_F = T^i_{ji} theta^j + conj(T^i_{ji}) conj(theta^j)",
            scope: S::AlmostHermitian,
            param: P::None,
            eval: |c, _| Ok(Comparison::forms(&c.g.lee_contraction, &c.torsion.lee_form())),
        },
        IdentityDef {
            id: "df_plus_chern_torsion",
            anchor: "(dF)^+ = i/2(T^i_{jk} theta^j^theta^k^conj(theta^i) - c.c.)",
            scope: S::AlmostHermitian,
            param: P::None,
            eval: |c, _| Ok(Comparison::forms(&c.g.decomposition.df_plus, &c.torsion.df_plus())),
        },
        IdentityDef {
            id: "df_minus_chern_torsion",
            anchor: "(dF)^- = i/2(T^i_{jbar kbar} conj(theta^j)^conj(theta^k)^conj(theta^i) - c.c.)",
            scope: S::AlmostHermitian,
            param: P::None,
            eval: |c, _| Ok(Comparison::forms(&c.g.decomposition.df_minus, &c.torsion.df_minus())),
        },
        IdentityDef {
            id: "torsion_norm_chern",
            anchor: "|T^{D^1}|^2 = T^i_{jk} conj(T^i_{jk}) + T^i_{jbar kbar} conj(T^i_{jbar kbar})",
            scope: S::AlmostHermitian,
            param: P::None,
            eval: |c, _| {
                Ok(Comparison::scalar(vector_two_form_norm_sq(&c.g.torsion, c.g.dim()), c.torsion.norm_sq()))
            },
        },
        IdentityDef {
            id: "nijenhuis_norm_chern",
            anchor: "|N|^2 = 16 T^i_{jbar kbar} conj(T^i_{jbar kbar})",
            scope: S::AlmostHermitian,
            param: P::None,
            eval: |c, _| Ok(Comparison::scalar(c.norms().nijenhuis, c.torsion.nijenhuis_norm_sq())),
        },
        IdentityDef {
            id: "lee_norm_chern",
            anchor: "|alpha_F|^2 = 2 T^i_{ji} conj(T^k_{jk})",
            scope: S::AlmostHermitian,
            param: P::None,
            eval: |c, _| Ok(Comparison::scalar(c.norms().lee, c.torsion.lee_norm_sq())),
        },
        IdentityDef {
            id: "df_plus_norm_chern",
            anchor: "|(dF)^+|^2 = T^i_{jk} conj(T^i_{jk})",
            scope: S::AlmostHermitian,
            param: P::None,
            eval: |c, _| Ok(Comparison::scalar(c.norms().df_plus, c.torsion.df_plus_norm_sq())),
        },
        IdentityDef {
            id: "df_minus_norm_chern",
            anchor: "|(dF)^-|^2 = T^i_{jbar kbar} conj(T^i_{jbar kbar}) + 2 T^i_{jbar kbar} conj(T^k_{ibar jbar})",
            scope: S::AlmostHermitian,
            param: P::None,
            eval: |c, _| Ok(Comparison::scalar(c.norms().df_minus, c.torsion.df_minus_norm_sq())),
        },
        IdentityDef {
            id: "gamma_from_chern_torsion",
            anchor: "phi^i_j - psi^i_j = 1/2 T^i_{jk} theta^k - 1/2 conj(T^j_{ik}) conj(theta^k)",
            scope: S::AlmostHermitian,
            param: P::None,
            eval: |c, _| {
                let lhs = gamma_unitary(&c.g.gamma, c.g.n);
                Ok(Comparison::complex(&lhs, &c.torsion.predicted_gamma()))
            },
        },
        IdentityDef {
            id: "first_chern_form_real",
            anchor: "rho_1(t) = i sum_i K^t(u_ibar, u_i, ., .) is real",
            scope: S::AlmostHermitian,
            param: P::T,
            eval: |c, t| Ok(Comparison::residual(c.level(arg(t)?)?.rho1_imag)),
        },
        IdentityDef {
            id: "first_chern_form_shift",
            anchor: "rho_1(t) = rho_1(0) + t/2 d delta F",
            scope: S::AlmostHermitian,
            param: P::T,
            eval: |c, t| {
                let t = arg(t)?;
                let rhs = c.level(0.0)?.rho1.add(&c.g.d_delta_f.scale(t / 2.0));
                Ok(Comparison::forms(&c.level(t)?.rho1, &rhs))
            },
        },
        IdentityDef {
            id: "d_delta_f_trace",
            anchor: "<d delta F, F> = |alpha_F|^2 + delta alpha_F",
            scope: S::AlmostHermitian,
            param: P::None,
            eval: |c, _| {
                let nb = c.norms();
                Ok(Comparison::scalar(c.g.d_delta_f.inner(&c.g.f)?, nb.lee + nb.delta_lee))
            },
        },
        IdentityDef {
            id: "ricci_form_first_is_11_part",
            anchor: "rho^(1)(t) = 1/2[rho_1(t) + J rho_1(t)]",
            scope: S::AlmostHermitian,
            param: P::T,
            eval: |c, t| {
                let l = c.level(arg(t)?)?;
                let jf = standard_j(c.g.n);
                let rhs = l.rho1.add(&l.rho1.j_action(&jf)).scale(0.5);
                Ok(Comparison::forms(&l.ricci[0].0, &rhs))
            },
        },
        IdentityDef {
            id: "ricci_form_11_shift",
            anchor: "rho^(1)(t) = rho_1(1) + (t-1)/4 (d delta F + J d delta F)",
            scope: S::Hermitian,
            param: P::T,
            eval: |c, t| {
                let t = arg(t)?;
                let jf = standard_j(c.g.n);
                let ddf = &c.g.d_delta_f;
                let rhs = c.level(1.0)?.rho1.add(&ddf.add(&ddf.j_action(&jf)).scale((t - 1.0) / 4.0));
                Ok(Comparison::forms(&c.level(t)?.ricci[0].0, &rhs))
            },
        },
        IdentityDef {
            id: "ricci_forms_real",
            anchor: "rho^(a)(t) = i c_{ij} theta^i ^ conj(theta^j) is real for a = 1, 2",
            scope: S::AlmostHermitian,
            param: P::T,
            eval: |c, t| {
                let l = c.level(arg(t)?)?;
                Ok(Comparison::residual(l.ricci[0].1.max(l.ricci[1].1)))
            },
        },
        IdentityDef {
            id: "ricci_form_first_trace",
            anchor: "<rho^(1)(t), F> = s_1(t)",
            scope: S::AlmostHermitian,
            param: P::T,
            eval: |c, t| {
                let l = c.level(arg(t)?)?;
                Ok(Comparison::scalar(l.ricci[0].0.inner(&c.g.f)?, l.s1))
            },
        },
        IdentityDef {
            id: "ricci_form_third_trace",
            anchor: "<rho^(3)(t), F> = s_2(t)",
            scope: S::AlmostHermitian,
            param: P::T,
            eval: |c, t| {
                let l = c.level(arg(t)?)?;
                Ok(Comparison::scalar(l.ricci[2].0.inner(&c.g.f)?, l.s2))
            },
        },
        IdentityDef {
            id: "scalar_curvatures_real",
            anchor: "s_1(t) = K^t_{ibar i j jbar}, s_2(t) = K^t_{ibar j i jbar} are real",
            scope: S::AlmostHermitian,
            param: P::T,
            eval: |c, t| Ok(Comparison::residual(c.level(arg(t)?)?.imag)),
        },
        IdentityDef {
            id: "s1_closed_form",
            anchor: "s_1(t) = s/2 - 5/12|(dF)^-|^2 + 1/16|N0|^2 + 1/4|(dF)_0^+|^2 + [1/(4(n-1)) + (t-1)/2]|alpha_F|^2 + (t-2)/2 delta alpha_F",
            scope: S::AlmostHermitian,
            param: P::T,
            eval: |c, t| {
                let t = arg(t)?;
                Ok(Comparison::scalar(c.level(t)?.s1, s1_closed_form(c.norms(), c.g.s, t, c.g.n)?))
            },
        },
        IdentityDef {
            id: "s2_closed_form",
            anchor: "s_2(t) = s/2 - 1/12|(dF)^-|^2 + 1/32|N0|^2 - (t^2-2t)/4|(dF)_0^+|^2 - [(t^2-2t)/(4(n-1)) + (t+1)^2/8]|alpha_F|^2 - (t+1)/2 delta alpha_F",
            scope: S::AlmostHermitian,
            param: P::T,
            eval: |c, t| {
                let t = arg(t)?;
                Ok(Comparison::scalar(c.level(t)?.s2, s2_closed_form(c.norms(), c.g.s, t, c.g.n)?))
            },
        },
        IdentityDef {
            id: "s1_shift",
            anchor: "s_1(t) = s_1(0) + t/2(|alpha_F|^2 + delta alpha_F)",
            scope: S::AlmostHermitian,
            param: P::T,
            eval: |c, t| {
                let t = arg(t)?;
                let l0 = c.level(0.0)?;
                let (s1, _) = shifted_from_lichnerowicz(c.norms(), l0.s1, l0.s2, t);
                Ok(Comparison::scalar(c.level(t)?.s1, s1))
            },
        },
        IdentityDef {
            id: "s2_shift",
            anchor: "s_2(t) = s_2(0) - t/2(|alpha_F|^2 + delta alpha_F) - (t^2-2t)/4|(dF)^+|^2 - (t^2-2t)/8|alpha_F|^2",
            scope: S::AlmostHermitian,
            param: P::T,
            eval: |c, t| {
                let t = arg(t)?;
                let l0 = c.level(0.0)?;
                let (_, s2) = shifted_from_lichnerowicz(c.norms(), l0.s1, l0.s2, t);
                Ok(Comparison::scalar(c.level(t)?.s2, s2))
            },
        },
        IdentityDef {
            id: "s1_hermitian",
            anchor: "s_1(t) = s/2 + 1/4|dF|^2 + (t-1)/2|alpha_F|^2 + (t-2)/2 delta alpha_F",
            scope: S::Hermitian,
            param: P::T,
            eval: |c, t| {
                let t = arg(t)?;
                Ok(Comparison::scalar(c.level(t)?.s1, hermitian_closed_form(c.norms(), c.g.s, t).0))
            },
        },
        IdentityDef {
            id: "s2_hermitian",
            anchor: "s_2(t) = s/2 - (t^2-2t)/4|dF|^2 - (t+1)^2/8|alpha_F|^2 - (t+1)/2 delta alpha_F",
            scope: S::Hermitian,
            param: P::T,
            eval: |c, t| {
                let t = arg(t)?;
                Ok(Comparison::scalar(c.level(t)?.s2, hermitian_closed_form(c.norms(), c.g.s, t).1))
            },
        },
        IdentityDef {
            id: "s1_surface",
            anchor: "s_1(t) = s/2 + 1/16|N|^2 + (2t-1)/4|alpha_F|^2 + (t-2)/2 delta alpha_F",
            scope: S::Surface,
            param: P::T,
            eval: |c, t| {
                let t = arg(t)?;
                Ok(Comparison::scalar(c.level(t)?.s1, surface_closed_form(c.norms(), c.g.s, t).0))
            },
        },
        IdentityDef {
            id: "s2_surface",
            anchor: "s_2(t) = s/2 + 1/32|N|^2 - (3t^2-2t+1)/8|alpha_F|^2 - (t+1)/2 delta alpha_F",
            scope: S::Surface,
            param: P::T,
            eval: |c, t| {
                let t = arg(t)?;
                Ok(Comparison::scalar(c.level(t)?.s2, surface_closed_form(c.norms(), c.g.s, t).1))
            },
        },
        IdentityDef {
            id: "scalar_difference",
            anchor: "s_1(t) - s_2(t) = -1/3|(dF)^-|^2 + 1/32|N0|^2 + (t-1)^2/4|(dF)_0^+|^2 + ((n+1)t^2 + (6n-10)t + 5 - 3n)/(8(n-1))|alpha_F|^2 + (t-1/2) delta alpha_F",
            scope: S::AlmostHermitian,
            param: P::T,
            eval: |c, t| {
                let t = arg(t)?;
                let l = c.level(t)?;
                Ok(Comparison::scalar(l.s1 - l.s2, scalar_difference(c.norms(), t, c.g.n)?))
            },
        },
        IdentityDef {
            id: "chern_scalar_difference",
            anchor: "s_1(1) - s_2(1) = 1/2|alpha_F|^2 + 1/2 delta alpha_F",
            scope: S::Hermitian,
            param: P::None,
            eval: |c, _| {
                let (l, nb) = (c.level(1.0)?, c.norms());
                Ok(Comparison::scalar(l.s1 - l.s2, (nb.lee + nb.delta_lee) / 2.0))
            },
        },
        IdentityDef {
            id: "chern_first_scalar_excess",
            anchor: "2 s_1(1) - s = 1/2|dF|^2 - delta alpha_F",
            scope: S::Hermitian,
            param: P::None,
            eval: |c, _| {
                let nb = c.norms();
                Ok(Comparison::scalar(2.0 * c.level(1.0)?.s1 - c.g.s, nb.df / 2.0 - nb.delta_lee))
            },
        },
        IdentityDef {
            id: "bismut_second_scalar",
            anchor: "s_2(-1) = s/2 - 3/4|dF|^2",
            scope: S::Hermitian,
            param: P::None,
            eval: |c, _| Ok(Comparison::scalar(c.level(-1.0)?.s2, c.g.s / 2.0 - 0.75 * c.norms().df)),
        },
        IdentityDef {
            id: "bismut_scalar_difference",
            anchor: "s_1(-1) - s_2(-1) = |dF|^2 - |alpha_F|^2 - 3/2 delta alpha_F",
            scope: S::Hermitian,
            param: P::None,
            eval: |c, _| {
                let (l, nb) = (c.level(-1.0)?, c.norms());
                Ok(Comparison::scalar(l.s1 - l.s2, nb.df - nb.lee - 1.5 * nb.delta_lee))
            },
        },
        IdentityDef {
            id: "del_f_wedge_delbar_f_pairing",
            anchor: "<i del F ^ delbar F, F^3> = 3(|alpha_F|^2 - |dF|^2)",
            scope: S::HermitianAtLeast3,
            param: P::None,
            eval: |c, _| {
                let nb = c.norms();
                let lhs = c.g.del_f_wedge_delbar_f.inner(&c.g.f.power(3))?;
                Ok(Comparison::scalar(lhs, 3.0 * (nb.lee - nb.df)))
            },
        },
        IdentityDef {
            id: "ddbar_f_pairing",
            anchor: "<i del delbar F, F^2> = |dF|^2 - |alpha_F|^2 - delta alpha_F",
            scope: S::HermitianAtLeast3,
            param: P::None,
            eval: |c, _| {
                let nb = c.norms();
                let lhs = c.g.ddbar_f.inner(&c.g.f.power(2))?;
                Ok(Comparison::scalar(lhs, nb.df - nb.lee - nb.delta_lee))
            },
        },
        IdentityDef {
            id: "kgauduchon_expansion",
            anchor: "i del delbar(F^k) ^ F^{n-k-1} = k(k-1) i del F ^ delbar F ^ F^{n-3} + k i del delbar F ^ F^{n-2}",
            scope: S::HermitianAtLeast3,
            param: P::K,
            eval: |c, k| {
                let k = k_of(k)?;
                let g = &c.g;
                let n = g.n;
                let lhs = g.kgauduchon_density(k)?;
                let a = g.top_density(&g.del_f_wedge_delbar_f.wedge(&g.f.power(n - 3)))?;
                let b = g.top_density(&g.ddbar_f.wedge(&g.f.power(n - 2)))?;
                let kf = k as f64;
                Ok(Comparison::scalar(lhs, kf * (kf - 1.0) * a + kf * b))
            },
        },
        IdentityDef {
            id: "kgauduchon_density",
            anchor: "i del delbar(F^k) ^ F^{n-k-1} = k (n-3)!/2 [(n-k-1)(|dF|^2 - |alpha_F|^2) - (n-2) delta alpha_F] dv",
            scope: S::HermitianAtLeast3,
            param: P::K,
            eval: |c, k| {
                let k = k_of(k)?;
                Ok(Comparison::scalar(c.g.kgauduchon_density(k)?, kgauduchon_closed(c, k)))
            },
        },
    ]
}

/// Closed-form k-Gauduchon density at a prepared point.
pub(crate) fn kgauduchon_rhs(c: &PointContext, k: usize) -> f64 {
    kgauduchon_closed(c, k)
}
