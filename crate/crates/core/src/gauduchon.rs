//! The line of canonical Hermitian connections `D^t = D^0 + t·A1`:
//! coefficients, compatibility, torsion of the Chern member, curvature and
//! its unitary traces, first Chern form and Ricci forms, and the closed-form
//! scalar-curvature expressions.

use num_complex::Complex64;

use crate::error::{GeomError, Result};
use crate::forms::KForm;
use crate::frame::{transform_tensor, unitary_coframe, unitary_matrix};
use crate::hermitian::NormBundle;
use crate::jet::Jet;
use crate::riemannian::{curvature_linear, curvature_quadratic, i3, i4, Coefficients};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Coordinate coefficients `(A0, A1)` of the family: `A0 = Γ − ½J∇J` and
/// `h(A1(X,Y),Z) = ¼[h((∇_{JY}J)Z + J(∇_YJ)Z, X) − h((∇_{JZ}J)Y + J(∇_ZJ)Y, X)]`.
///
/// `nj[a][b][c] = (∇_aJ)^b_c`. Output index `[c][a][b]` with
/// `D_{∂_a}∂_b = A^c_{ab}∂_c`.
pub fn connection_jets(
    gamma: &[Jet],
    nj: &[Jet],
    j: &[Jet],
    h: &[Jet],
    hinv: &[Jet],
    dim: usize,
) -> (Vec<Jet>, Vec<Jet>) {
    let d = dim;
    let zero = || Jet::constant(0.0);
    let mut a0 = Vec::with_capacity(d * d * d);
    for c in 0..d {
        for a in 0..d {
            for b in 0..d {
                let mut acc = gamma[i3(d, c, a, b)].clone();
                for e in 0..d {
                    acc = acc - (&j[c * d + e] * &nj[i3(d, a, e, b)]) * 0.5;
                }
                a0.push(acc);
            }
        }
    }
    // M[b][x][z] = (∇_{J∂_b}J)^x_z + J^x_e (∇_bJ)^e_z
    let mut m = vec![zero(); d * d * d];
    for b in 0..d {
        for x in 0..d {
            for z in 0..d {
                let mut acc = zero();
                for e in 0..d {
                    acc = acc + &j[e * d + b] * &nj[i3(d, e, x, z)] + &j[x * d + e] * &nj[i3(d, b, e, z)];
                }
                m[i3(d, b, x, z)] = acc;
            }
        }
    }
    // C_{abz} = h_{xa}(M[b][x][z] − M[z][x][b])
    let mut cl = vec![zero(); d * d * d];
    for a in 0..d {
        for b in 0..d {
            for z in 0..d {
                let mut acc = zero();
                for x in 0..d {
                    acc = acc + &h[x * d + a] * (&m[i3(d, b, x, z)] - &m[i3(d, z, x, b)]);
                }
                cl[i3(d, a, b, z)] = acc;
            }
        }
    }
    let mut a1 = Vec::with_capacity(d * d * d);
    for c in 0..d {
        for a in 0..d {
            for b in 0..d {
                let mut acc = zero();
                for z in 0..d {
                    acc = acc + &hinv[c * d + z] * &cl[i3(d, a, b, z)];
                }
                a1.push(acc * 0.25);
            }
        }
    }
    (a0, a1)
}

/// Largest entries of `D h` and `D J` for coefficients `a` (values only).
pub fn compatibility_residuals(a: &Coefficients, h: &[Jet], j: &[Jet]) -> (f64, f64) {
    let d = a.dim;
    let av = |c: usize, x: usize, y: usize| a.value[i3(d, c, x, y)];
    let (mut rh, mut rj) = (0.0_f64, 0.0_f64);
    for x in 0..d {
        for b in 0..d {
            for c in 0..d {
                let mut dh = h[b * d + c].d1(x);
                let mut dj = j[b * d + c].d1(x);
                for e in 0..d {
                    dh -= av(e, x, b) * h[e * d + c].value() + av(e, x, c) * h[b * d + e].value();
                    dj += av(b, x, e) * j[e * d + c].value() - av(e, x, c) * j[b * d + e].value();
                }
                rh = rh.max(dh.abs());
                rj = rj.max(dj.abs());
            }
        }
    }
    (rh, rj)
}

/// `K(t) = K0 + t K1 + t² K2`, lowered, in the adapted frame.
#[derive(Clone, Debug)]
pub struct CurvatureFamily {
    pub n: usize,
    pub k0: Vec<f64>,
    pub k1: Vec<f64>,
    pub k2: Vec<f64>,
}

impl CurvatureFamily {
    /// Build from coordinate coefficients, the metric value and the frame.
    pub fn new(a0: &Coefficients, a1: &Coefficients, h: &[f64], frame: &[f64], n: usize) -> Self {
        let d = 2 * n;
        let add = |x: Vec<f64>, y: &[f64]| -> Vec<f64> { x.iter().zip(y).map(|(p, q)| p + q).collect() };
        let k0 = add(curvature_linear(a0, h), &curvature_quadratic(a0, a0, h));
        let k1 = add(add(curvature_linear(a1, h), &curvature_quadratic(a0, a1, h)), &curvature_quadratic(a1, a0, h));
        let k2 = curvature_quadratic(a1, a1, h);
        let tf = |k: Vec<f64>| transform_tensor(&k, 4, d, frame);
        Self { n, k0: tf(k0), k1: tf(k1), k2: tf(k2) }
    }

    pub fn at(&self, t: f64) -> Vec<f64> {
        (0..self.k0.len()).map(|i| self.k0[i] + t * self.k1[i] + t * t * self.k2[i]).collect()
    }
}

/// Complex multilinear extension to `(u_1..u_n, ū_1..ū_n)` of a frame tensor.
pub fn to_unitary(t: &[f64], rank: usize, n: usize) -> Vec<Complex64> {
    let c: Vec<Complex64> = t.iter().map(|v| Complex64::new(*v, 0.0)).collect();
    transform_tensor(&c, rank, 2 * n, &unitary_matrix(n))
}

/// `(s1, s2)` with `s1 = K(ū_i,u_i,u_j,ū_j)` and `s2 = K(ū_i,u_j,u_i,ū_j)`,
/// returned with the largest imaginary part.
pub fn scalar_curvatures(k_unitary: &[Complex64], n: usize) -> (f64, f64, f64) {
    let d = 2 * n;
    let mut s1 = Complex64::new(0.0, 0.0);
    let mut s2 = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            s1 += k_unitary[i4(d, n + i, i, j, n + j)];
            s2 += k_unitary[i4(d, n + i, j, i, n + j)];
        }
    }
    (s1.re, s2.re, s1.im.abs().max(s2.im.abs()))
}

/// `ρ₁(X,Y) = √−1 Σ_i K(ū_i, u_i, X, Y)` in the real frame, with the
/// largest imaginary residue.
pub fn first_chern_form(k: &[f64], n: usize) -> (KForm<f64>, f64) {
    let d = 2 * n;
    let u = unitary_matrix(n);
    // P[A][B] = Σ_i ū_i^A u_i^B
    let mut p = vec![Complex64::new(0.0, 0.0); d * d];
    for a in 0..d {
        for b in 0..d {
            p[a * d + b] = (0..n).map(|i| u[a * d + n + i] * u[b * d + i]).sum();
        }
    }
    let mut imag = 0.0_f64;
    let form = KForm::from_fn(d, 2, |s| {
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 0..d {
            for b in 0..d {
                acc += p[a * d + b] * k[i4(d, a, b, s[0], s[1])];
            }
        }
        let v = I * acc;
        imag = imag.max(v.im.abs());
        v.re
    });
    (form, imag)
}

/// The four Ricci forms `√−1 c_{ij} θ^i∧θ̄^j` with
/// `c⁽¹⁾ = K_{k̄ki j̄}`, `c⁽²⁾ = K_{j̄ikk̄}`, `c⁽³⁾ = K_{k̄ikj̄}`, `c⁽⁴⁾ = K_{j̄kik̄}`,
/// each with the largest imaginary residue. Only `c⁽¹⁾` and `c⁽²⁾` are
/// Hermitian in general; the others return their real part.
pub fn ricci_forms(k_unitary: &[Complex64], n: usize) -> [(KForm<f64>, f64); 4] {
    let d = 2 * n;
    let theta = unitary_coframe(n);
    let coeff = |which: usize, i: usize, j: usize| -> Complex64 {
        (0..n)
            .map(|k| match which {
                0 => k_unitary[i4(d, n + k, k, i, n + j)],
                1 => k_unitary[i4(d, n + j, i, k, n + k)],
                2 => k_unitary[i4(d, n + k, i, k, n + j)],
                _ => k_unitary[i4(d, n + j, k, i, n + k)],
            })
            .sum()
    };
    std::array::from_fn(|which| {
        let mut acc = KForm::<Complex64>::zero(d, 2);
        for i in 0..n {
            for j in 0..n {
                let c = I * coeff(which, i, j);
                acc = acc.add(&theta[i].wedge(&theta[j].conj()).mul_scalar(&c));
            }
        }
        let imag = acc.im().max_abs();
        (acc.re(), imag)
    })
}

/// `−√−1 Σ_i ρ(u_i, ū_i)` for a real 2-form in the frame.
pub fn unitary_trace(rho: &KForm<f64>, n: usize) -> f64 {
    let u = to_unitary(&full_two_tensor(rho), 2, n);
    let d = 2 * n;
    let tr: Complex64 = (0..n).map(|i| u[i * d + n + i]).sum();
    (-I * tr).re
}

fn full_two_tensor(rho: &KForm<f64>) -> Vec<f64> {
    let d = rho.dim();
    let mut out = vec![0.0; d * d];
    for a in 0..d {
        for b in 0..d {
            out[a * d + b] = rho.eval(&[a, b]);
        }
    }
    out
}

/// Unitary components of the Chern torsion from the frame torsion
/// `T_{ABC} = ⟨e_A, T(e_B, e_C)⟩`.
#[derive(Clone, Debug)]
pub struct ChernTorsion {
    pub n: usize,
    /// `T^i_{jk} = θ^i(T(u_j,u_k))`, index `[i][j][k]`
    pub holo: Vec<Complex64>,
    /// `T^i_{j̄k̄} = θ^i(T(ū_j,ū_k))`
    pub anti: Vec<Complex64>,
    /// largest `|θ^i(T(u_j,ū_k))|`
    pub mixed: f64,
}

impl ChernTorsion {
    pub fn new(t_frame: &[f64], n: usize) -> Self {
        let d = 2 * n;
        let tu = to_unitary(t_frame, 3, n);
        let mut holo = Vec::with_capacity(n * n * n);
        let mut anti = Vec::with_capacity(n * n * n);
        let mut mixed = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    holo.push(tu[i3(d, n + i, j, k)]);
                    anti.push(tu[i3(d, n + i, n + j, n + k)]);
                    mixed = mixed.max(tu[i3(d, n + i, j, n + k)].norm());
                }
            }
        }
        Self { n, holo, anti, mixed }
    }

    pub fn holo(&self, i: usize, j: usize, k: usize) -> Complex64 {
        self.holo[(i * self.n + j) * self.n + k]
    }

    pub fn anti(&self, i: usize, j: usize, k: usize) -> Complex64 {
        self.anti[(i * self.n + j) * self.n + k]
    }

    /// `Σ|T^i_{jk}|² + Σ|T^i_{j̄k̄}|²`
    pub fn norm_sq(&self) -> f64 {
        self.holo.iter().chain(&self.anti).map(|z| z.norm_sqr()).sum()
    }

    pub fn nijenhuis_norm_sq(&self) -> f64 {
        16.0 * self.anti.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    /// `α(u_j) = Σ_i T^i_{ji}`
    pub fn lee_trace(&self, j: usize) -> Complex64 {
        (0..self.n).map(|i| self.holo(i, j, i)).sum()
    }

    pub fn lee_norm_sq(&self) -> f64 {
        2.0 * (0..self.n).map(|j| self.lee_trace(j).norm_sqr()).sum::<f64>()
    }

    pub fn df_plus_norm_sq(&self) -> f64 {
        self.holo.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn df_minus_norm_sq(&self) -> f64 {
        let n = self.n;
        let mut cross = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    cross += self.anti(i, j, k) * self.anti(k, i, j).conj();
                }
            }
        }
        self.anti.iter().map(|z| z.norm_sqr()).sum::<f64>() + 2.0 * cross.re
    }

    /// `α = T^i_{ji} θ^j + c.c.` as a real frame 1-form.
    pub fn lee_form(&self) -> KForm<f64> {
        let theta = unitary_coframe(self.n);
        let mut acc = KForm::<Complex64>::zero(2 * self.n, 1);
        for (j, th) in theta.iter().enumerate() {
            acc = acc.add(&th.mul_scalar(&self.lee_trace(j)));
        }
        acc.add(&acc.conj()).re()
    }

    /// `(dF)⁺ = (√−1/2)(T^i_{jk} θ^j∧θ^k∧θ̄^i − c.c.)`.
    pub fn df_plus(&self) -> KForm<f64> {
        self.three_form(|i, j, k| self.holo(i, j, k), false)
    }

    /// `(dF)⁻ = (√−1/2)(T^i_{j̄k̄} θ̄^j∧θ̄^k∧θ̄^i − c.c.)`.
    pub fn df_minus(&self) -> KForm<f64> {
        self.three_form(|i, j, k| self.anti(i, j, k), true)
    }

    fn three_form(&self, c: impl Fn(usize, usize, usize) -> Complex64, all_bar: bool) -> KForm<f64> {
        let n = self.n;
        let theta = unitary_coframe(n);
        let bar: Vec<_> = theta.iter().map(|t| t.conj()).collect();
        let first = if all_bar { &bar } else { &theta };
        let mut acc = KForm::<Complex64>::zero(2 * n, 3);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let w = first[j].wedge(&first[k]).wedge(&bar[i]);
                    acc = acc.add(&w.mul_scalar(&c(i, j, k)));
                }
            }
        }
        acc.sub(&acc.conj()).mul_scalar(&(I * 0.5)).re()
    }

    /// `N^k_{īj̄} = −4 T^k_{īj̄}` as predicted values, index `[k][i][j]`.
    pub fn predicted_nijenhuis(&self) -> Vec<Complex64> {
        self.anti.iter().map(|z| z * -4.0).collect()
    }

    /// `γ^i_j(u_k) = ½T^i_{jk}` and `γ^i_j(ū_k) = −½ conj(T^j_{ik})`,
    /// index `[i][j][k]` for `k` over `(u, ū)`.
    pub fn predicted_gamma(&self) -> Vec<Complex64> {
        let n = self.n;
        let mut out = Vec::with_capacity(2 * n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..2 * n {
                    out.push(if k < n { self.holo(i, j, k) * 0.5 } else { self.holo(j, i, k - n).conj() * -0.5 });
                }
            }
        }
        out
    }
}

/// Unitary components `[k][i][j] = ⟨N(ū_i,ū_j), ū_k⟩` of a frame tensor
/// `N_{ABC} = ⟨e_A, N(e_B,e_C)⟩`.
pub fn nijenhuis_unitary(n_frame: &[f64], n: usize) -> Vec<Complex64> {
    let d = 2 * n;
    let nu = to_unitary(n_frame, 3, n);
    let mut out = Vec::with_capacity(n * n * n);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                out.push(nu[i3(d, n + k, n + i, n + j)]);
            }
        }
    }
    out
}

/// `γ^i_j(v_k) = θ^i((D⁰−D¹)_{v_k} u_j)` from the frame tensor
/// `G_{ABC} = ⟨e_A, (D⁰−D¹)_{e_B} e_C⟩`, index as in
/// [`ChernTorsion::predicted_gamma`].
pub fn gamma_unitary(g_frame: &[f64], n: usize) -> Vec<Complex64> {
    let d = 2 * n;
    let gu = to_unitary(g_frame, 3, n);
    let mut out = Vec::with_capacity(2 * n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..d {
                out.push(gu[i3(d, n + i, k, j)]);
            }
        }
    }
    out
}

fn check_n(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(GeomError::Domain(format!("complex dimension {n} < 2")));
    }
    Ok(n as f64)
}

/// `s₁(t)` from `s` and the norm bundle.
pub fn s1_closed_form(nb: &NormBundle, s: f64, t: f64, n: usize) -> Result<f64> {
    let nf = check_n(n)?;
    Ok(s / 2.0 - 5.0 / 12.0 * nb.df_minus
        + nb.n0 / 16.0
        + nb.df_plus_primitive / 4.0
        + (1.0 / (4.0 * (nf - 1.0)) + (t - 1.0) / 2.0) * nb.lee
        + (t - 2.0) / 2.0 * nb.delta_lee)
}

/// `s₂(t)` from `s` and the norm bundle.
pub fn s2_closed_form(nb: &NormBundle, s: f64, t: f64, n: usize) -> Result<f64> {
    let nf = check_n(n)?;
    let q = t * t - 2.0 * t;
    Ok(s / 2.0 - nb.df_minus / 12.0 + nb.n0 / 32.0
        - q / 4.0 * nb.df_plus_primitive
        - (q / (4.0 * (nf - 1.0)) + (t + 1.0).powi(2) / 8.0) * nb.lee
        - (t + 1.0) / 2.0 * nb.delta_lee)
}

/// Lichnerowicz scalars through `s_J`: returns `(s₁(0), s₂(0))`.
pub fn lichnerowicz_from_sj(nb: &NormBundle, s: f64, s_j: f64) -> (f64, f64) {
    let s1 = s_j / 2.0 + nb.df_plus / 4.0 - nb.df_minus / 12.0 - nb.n0 / 16.0;
    let s2 = (s_j + s) / 4.0 + (nb.lee - (nb.nabla_f - nb.df)) / 8.0;
    (s1, s2)
}

/// Lichnerowicz scalars through `s`: returns `(s₁(0), s₂(0))`.
pub fn lichnerowicz_from_s(nb: &NormBundle, s: f64, n: usize) -> Result<(f64, f64)> {
    let nf = check_n(n)?;
    let s1 = s / 2.0 - 5.0 / 12.0 * nb.df_minus
        + nb.n0 / 16.0
        + nb.df_plus_primitive / 4.0
        + (3.0 - 2.0 * nf) / (4.0 * (nf - 1.0)) * nb.lee
        - nb.delta_lee;
    let s2 = s / 2.0 - nb.df_minus / 12.0 + nb.n0 / 32.0 - nb.lee / 8.0 - nb.delta_lee / 2.0;
    Ok((s1, s2))
}

/// Shift relations from `t = 0`: returns `(s₁(t), s₂(t))`.
pub fn shifted_from_lichnerowicz(nb: &NormBundle, s1_0: f64, s2_0: f64, t: f64) -> (f64, f64) {
    let c = nb.lee + nb.delta_lee;
    let q = t * t - 2.0 * t;
    (s1_0 + t / 2.0 * c, s2_0 - t / 2.0 * c - q / 4.0 * nb.df_plus - q / 8.0 * nb.lee)
}

/// Hermitian specialisation: returns `(s₁(t), s₂(t))`.
pub fn hermitian_closed_form(nb: &NormBundle, s: f64, t: f64) -> (f64, f64) {
    let s1 = s / 2.0 + nb.df / 4.0 + (t - 1.0) / 2.0 * nb.lee + (t - 2.0) / 2.0 * nb.delta_lee;
    let s2 =
        s / 2.0 - (t * t - 2.0 * t) / 4.0 * nb.df - (t + 1.0).powi(2) / 8.0 * nb.lee - (t + 1.0) / 2.0 * nb.delta_lee;
    (s1, s2)
}

/// Complex-surface specialisation: returns `(s₁(t), s₂(t))`.
pub fn surface_closed_form(nb: &NormBundle, s: f64, t: f64) -> (f64, f64) {
    let s1 = s / 2.0 + nb.nijenhuis / 16.0 + (2.0 * t - 1.0) / 4.0 * nb.lee + (t - 2.0) / 2.0 * nb.delta_lee;
    let s2 =
        s / 2.0 + nb.nijenhuis / 32.0 - (3.0 * t * t - 2.0 * t + 1.0) / 8.0 * nb.lee - (t + 1.0) / 2.0 * nb.delta_lee;
    (s1, s2)
}

/// `s₁(t) − s₂(t)` through the component norms.
pub fn scalar_difference(nb: &NormBundle, t: f64, n: usize) -> Result<f64> {
    let nf = check_n(n)?;
    let q = (nf + 1.0) * t * t + (6.0 * nf - 10.0) * t + 5.0 - 3.0 * nf;
    Ok(-nb.df_minus / 3.0
        + nb.n0 / 32.0
        + (t - 1.0).powi(2) / 4.0 * nb.df_plus_primitive
        + q / (8.0 * (nf - 1.0)) * nb.lee
        + (t - 0.5) * nb.delta_lee)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kaehler_norms_give_half_s() {
        let nb = NormBundle::default();
        for t in [-1.0, 0.0, 0.5, 2.0] {
            assert_eq!(s1_closed_form(&nb, 7.0, t, 3).unwrap(), 3.5);
            assert_eq!(s2_closed_form(&nb, 7.0, t, 3).unwrap(), 3.5);
        }
        assert!(s1_closed_form(&nb, 1.0, 0.0, 1).is_err());
    }

    #[test]
    fn nearly_kaehler_sphere_values() {
        let nb = NormBundle { df_minus: 36.0, df: 36.0, nabla_f: 12.0, ..Default::default() };
        for t in [-1.0, 0.0, 1.0 / 3.0, 1.0, 2.0] {
            assert!(s1_closed_form(&nb, 30.0, t, 3).unwrap().abs() < 1e-12);
            assert!((s2_closed_form(&nb, 30.0, t, 3).unwrap() - 12.0).abs() < 1e-12);
        }
        let (a, b) = lichnerowicz_from_sj(&nb, 30.0, 6.0);
        assert!(a.abs() < 1e-12 && (b - 12.0).abs() < 1e-12);
    }

    #[test]
    fn difference_polynomial_matches_closed_forms() {
        let nb = NormBundle {
            df_minus: 0.7,
            n0: 1.3,
            df_plus_primitive: 0.4,
            lee: 2.1,
            delta_lee: -0.6,
            ..Default::default()
        };
        for n in [2, 3, 4] {
            for t in [-1.0, -0.5, 0.0, 0.3, 1.0, 2.0] {
                let d = s1_closed_form(&nb, 1.5, t, n).unwrap() - s2_closed_form(&nb, 1.5, t, n).unwrap();
                assert!((d - scalar_difference(&nb, t, n).unwrap()).abs() < 1e-12);
            }
        }
    }
}
