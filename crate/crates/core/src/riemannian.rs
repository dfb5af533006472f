//! Levi-Civita connection, curvature of a connection from its coefficient
//! jets, and the Riemannian contractions used by the identity suite.
//!
//! Curvature of a connection with coefficients `D_{∂_a} ∂_b = A^c_{ab} ∂_c`
//! is stored lowered, `K[x,y,z,w] = ⟨D_z D_w ∂_y − D_w D_z ∂_y, ∂_x⟩`, so the
//! first slot is the lowered output and the last pair is the 2-form pair.

use crate::error::Result;
use crate::forms::KForm;
use crate::jet::Jet;
use crate::scalar::{determinant, inverse};

#[inline]
pub(crate) fn i3(d: usize, a: usize, b: usize, c: usize) -> usize {
    (a * d + b) * d + c
}

#[inline]
pub(crate) fn i4(d: usize, a: usize, b: usize, c: usize, e: usize) -> usize {
    ((a * d + b) * d + c) * d + e
}

/// Metric jets with inverse and volume density.
#[derive(Clone, Debug)]
pub struct MetricJets {
    pub dim: usize,
    pub h: Vec<Jet>,
    pub hinv: Vec<Jet>,
    pub sqrt_det: Jet,
}

impl MetricJets {
    pub fn new(h: Vec<Jet>, dim: usize) -> Result<Self> {
        let hinv = inverse(&h, dim)?;
        let sqrt_det = determinant(&h, dim)?.sqrt()?;
        Ok(Self { dim, h, hinv, sqrt_det })
    }

    pub fn value(&self) -> Vec<f64> {
        self.h.iter().map(Jet::value).collect()
    }

    /// `∂_e h_{ab}` as jets one order lower, indexed `[e][a][b]`.
    pub fn derivatives(&self) -> Result<Vec<Jet>> {
        let d = self.dim;
        let mut out = Vec::with_capacity(d * d * d);
        for e in 0..d {
            for ab in 0..d * d {
                out.push(self.h[ab].partial(e)?);
            }
        }
        Ok(out)
    }
}

/// Christoffel symbols `Γ^c_{ab}` (index `[c][a][b]`), one jet order below `h`.
pub fn christoffel(m: &MetricJets) -> Result<Vec<Jet>> {
    let d = m.dim;
    let dh = m.derivatives()?;
    let mut lower = Vec::with_capacity(d * d * d);
    // Γ_{e,ab} = ½(∂_a h_{eb} + ∂_b h_{ea} − ∂_e h_{ab})
    for e in 0..d {
        for a in 0..d {
            for b in 0..d {
                let v = &(&dh[i3(d, a, e, b)] + &dh[i3(d, b, e, a)]) - &dh[i3(d, e, a, b)];
                lower.push(v * 0.5);
            }
        }
    }
    let mut out = Vec::with_capacity(d * d * d);
    for c in 0..d {
        for a in 0..d {
            for b in 0..d {
                let mut acc = Jet::constant(0.0);
                for e in 0..d {
                    acc = acc + &m.hinv[c * d + e] * &lower[i3(d, e, a, b)];
                }
                out.push(acc);
            }
        }
    }
    Ok(out)
}

/// Connection coefficients `A^c_{ab}` and their first derivatives at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct Coefficients {
    pub dim: usize,
    /// `[c][a][b]`
    pub value: Vec<f64>,
    /// `[e][c][a][b]` = `∂_e A^c_{ab}`
    pub deriv: Vec<f64>,
}

impl Coefficients {
    pub fn from_jets(a: &[Jet], dim: usize) -> Self {
        let value = a.iter().map(Jet::value).collect();
        let mut deriv = vec![0.0; dim * a.len()];
        for e in 0..dim {
            for (k, j) in a.iter().enumerate() {
                deriv[e * a.len() + k] = j.d1(e);
            }
        }
        Self { dim, value, deriv }
    }

    pub fn combine(&self, other: &Self, s: f64) -> Self {
        Self {
            dim: self.dim,
            value: self.value.iter().zip(&other.value).map(|(a, b)| a + s * b).collect(),
            deriv: self.deriv.iter().zip(&other.deriv).map(|(a, b)| a + s * b).collect(),
        }
    }

    /// Torsion `T^c_{ab} = A^c_{ab} − A^c_{ba}`.
    pub fn torsion(&self) -> Vec<f64> {
        let d = self.dim;
        let mut t = vec![0.0; d * d * d];
        for c in 0..d {
            for a in 0..d {
                for b in 0..d {
                    t[i3(d, c, a, b)] = self.value[i3(d, c, a, b)] - self.value[i3(d, c, b, a)];
                }
            }
        }
        t
    }
}

/// Derivative part of the lowered curvature:
/// `h_{xc}(∂_z A^c_{wy} − ∂_w A^c_{zy})`.
pub fn curvature_linear(a: &Coefficients, h: &[f64]) -> Vec<f64> {
    let d = a.dim;
    let n3 = d * d * d;
    let mut up = vec![0.0; d * n3];
    for c in 0..d {
        for y in 0..d {
            for z in 0..d {
                for w in 0..d {
                    up[i4(d, c, y, z, w)] = a.deriv[z * n3 + i3(d, c, w, y)] - a.deriv[w * n3 + i3(d, c, z, y)];
                }
            }
        }
    }
    lower_first(&up, h, d)
}

/// Quadratic part of the lowered curvature:
/// `h_{xc}(A^c_{ze} B^e_{wy} − A^c_{we} B^e_{zy})`.
pub fn curvature_quadratic(a: &Coefficients, b: &Coefficients, h: &[f64]) -> Vec<f64> {
    let d = a.dim;
    let mut up = vec![0.0; d * d * d * d];
    for c in 0..d {
        for y in 0..d {
            for z in 0..d {
                for w in 0..d {
                    let mut acc = 0.0;
                    for e in 0..d {
                        acc += a.value[i3(d, c, z, e)] * b.value[i3(d, e, w, y)]
                            - a.value[i3(d, c, w, e)] * b.value[i3(d, e, z, y)];
                    }
                    up[i4(d, c, y, z, w)] = acc;
                }
            }
        }
    }
    lower_first(&up, h, d)
}

fn lower_first(up: &[f64], h: &[f64], d: usize) -> Vec<f64> {
    let n3 = d * d * d;
    let mut out = vec![0.0; d * n3];
    for x in 0..d {
        for rest in 0..n3 {
            let mut acc = 0.0;
            for c in 0..d {
                acc += h[x * d + c] * up[c * n3 + rest];
            }
            out[x * n3 + rest] = acc;
        }
    }
    out
}

/// Lowered curvature of a connection, coordinate basis.
pub fn curvature(a: &Coefficients, h: &[f64]) -> Vec<f64> {
    let lin = curvature_linear(a, h);
    let quad = curvature_quadratic(a, a, h);
    lin.iter().zip(&quad).map(|(x, y)| x + y).collect()
}

/// A 4-tensor in an orthonormal frame, `R(e_A, e_B, e_C, e_D)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RiemannTensor {
    pub n: usize,
    pub comps: Vec<f64>,
}

impl RiemannTensor {
    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn get(&self, a: usize, b: usize, c: usize, e: usize) -> f64 {
        self.comps[i4(self.dim(), a, b, c, e)]
    }

    /// Largest violation of the algebraic curvature symmetries: antisymmetry
    /// in each pair, pair symmetry and the first Bianchi identity.
    pub fn symmetry_residual(&self) -> f64 {
        let d = self.dim();
        let mut r = 0.0_f64;
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    for e in 0..d {
                        let v = self.get(a, b, c, e);
                        r = r.max((v + self.get(b, a, c, e)).abs());
                        r = r.max((v + self.get(a, b, e, c)).abs());
                        r = r.max((v - self.get(c, e, a, b)).abs());
                        r = r.max((v + self.get(a, c, e, b) + self.get(a, e, b, c)).abs());
                    }
                }
            }
        }
        r
    }
}

/// `Ric(X,Y) = R(e_A, X, e_A, Y)`.
pub fn ricci(r: &RiemannTensor) -> Vec<f64> {
    let d = r.dim();
    let mut out = vec![0.0; d * d];
    for x in 0..d {
        for y in 0..d {
            out[x * d + y] = (0..d).map(|a| r.get(a, x, a, y)).sum();
        }
    }
    out
}

pub fn scalar_s(ric: &[f64], dim: usize) -> f64 {
    (0..dim).map(|a| ric[a * dim + a]).sum()
}

/// `Ric_J(X,Y) = R(e_A, X, J e_A, J Y)` with `J` the frame matrix
/// (`jf[c*d+a]` is the `c`-component of `J e_a`).
pub fn j_ricci(r: &RiemannTensor, jf: &[f64]) -> Vec<f64> {
    let d = r.dim();
    let mut out = vec![0.0; d * d];
    for x in 0..d {
        for y in 0..d {
            let mut acc = 0.0;
            for a in 0..d {
                for c in 0..d {
                    let ja = jf[c * d + a];
                    if ja == 0.0 {
                        continue;
                    }
                    for e in 0..d {
                        let jy = jf[e * d + y];
                        if jy != 0.0 {
                            acc += ja * jy * r.get(a, x, c, e);
                        }
                    }
                }
            }
            out[x * d + y] = acc;
        }
    }
    out
}

/// `ρ_J(X,Y) = −Ric_J(X, JY)`.
pub fn j_ricci_form(ric_j: &[f64], jf: &[f64], dim: usize) -> KForm<f64> {
    KForm::from_fn(dim, 2, |s| {
        let (x, y) = (s[0], s[1]);
        -(0..dim).map(|c| ric_j[x * dim + c] * jf[c * dim + y]).sum::<f64>()
    })
}

/// The curvature operator on 2-forms: `⟨𝔯(φ), e^C∧e^D⟩ = Σ_{A<B} φ_{AB} R_{ABCD}`.
pub fn curvature_operator(r: &RiemannTensor, phi: &KForm<f64>) -> KForm<f64> {
    let d = r.dim();
    let sets = crate::forms::index_sets(d, 2);
    KForm::from_fn(d, 2, |cd| sets.iter().map(|ab| phi.component(ab) * r.get(ab[0], ab[1], cd[0], cd[1])).sum())
}

/// Weyl tensor from the orthogonal decomposition with `g = δ` in the frame.
pub fn weyl(r: &RiemannTensor, ric: &[f64], s: f64) -> RiemannTensor {
    let d = r.dim();
    let m = d as f64;
    let g = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let mut comps = vec![0.0; d * d * d * d];
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                for e in 0..d {
                    let ric_part = ric[a * d + c] * g(b, e) - ric[a * d + e] * g(b, c) + ric[b * d + e] * g(a, c)
                        - ric[b * d + c] * g(a, e);
                    let s_part = g(a, c) * g(b, e) - g(a, e) * g(b, c);
                    comps[i4(d, a, b, c, e)] =
                        r.get(a, b, c, e) - ric_part / (m - 2.0) + s * s_part / ((m - 1.0) * (m - 2.0));
                }
            }
        }
    }
    RiemannTensor { n: r.n, comps }
}

/// `⟨W(F), F⟩ = Σ_{A<B, C<D} W_{ABCD} F_{AB} F_{CD}`.
pub fn weyl_contract(w: &RiemannTensor, f: &KForm<f64>) -> Result<f64> {
    curvature_operator(w, f).inner(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{build_adapted_frame, standard_f, standard_j, transform_tensor};

    /// Round unit sphere in a stereographic chart: h = 4δ/(1+|x|²)².
    fn sphere_metric(x: &[f64]) -> MetricJets {
        let d = x.len();
        let xs = Jet::coordinates(x, 2);
        let mut r2 = Jet::constant(1.0);
        for v in &xs {
            r2 = r2 + v * v;
        }
        let f = (r2.powf(-2.0).unwrap()) * 4.0;
        let h = (0..d * d).map(|i| if i % (d + 1) == 0 { f.clone() } else { Jet::constant(0.0) }).collect();
        MetricJets::new(h, d).unwrap()
    }

    fn frame_riemann(m: &MetricJets, n: usize) -> RiemannTensor {
        let d = 2 * n;
        let gamma = christoffel(m).unwrap();
        let c = Coefficients::from_jets(&gamma, d);
        let hv = m.value();
        let r = curvature(&c, &hv);
        let f = build_adapted_frame(&hv, &standard_j(n), d).unwrap();
        RiemannTensor { n, comps: transform_tensor(&r, 4, d, &f.vectors) }
    }

    #[test]
    fn flat_metric_has_no_christoffels() {
        let x = Jet::coordinates(&[0.1, 0.2, 0.3, 0.4], 2);
        let h = (0..16).map(|i| if i % 5 == 0 { Jet::constant(1.0) } else { &x[0] * 0.0 }).collect();
        let m = MetricJets::new(h, 4).unwrap();
        assert!(christoffel(&m).unwrap().iter().all(|g| g.value() == 0.0));
    }

    #[test]
    fn conformal_christoffels_match_closed_form() {
        // h = e^{2φ} δ: Γ^c_{ab} = δ^c_a ∂_bφ + δ^c_b ∂_aφ − δ_{ab} ∂_cφ, φ = log 2 − log(1+|x|²)
        let x = [0.3, -0.1, 0.25, 0.5, -0.4, 0.2];
        let m = sphere_metric(&x);
        let g = christoffel(&m).unwrap();
        let r2: f64 = 1.0 + x.iter().map(|v| v * v).sum::<f64>();
        let dphi: Vec<f64> = x.iter().map(|v| -2.0 * v / r2).collect();
        let d = 6;
        let del = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        for c in 0..d {
            for a in 0..d {
                for b in 0..d {
                    let expect = del(c, a) * dphi[b] + del(c, b) * dphi[a] - del(a, b) * dphi[c];
                    assert!((g[i3(d, c, a, b)].value() - expect).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn unit_sphere_curvature() {
        let x = [0.3, -0.1, 0.25, 0.5, -0.4, 0.2];
        let r = frame_riemann(&sphere_metric(&x), 3);
        assert!(r.symmetry_residual() < 1e-9);
        let ric = ricci(&r);
        assert!((scalar_s(&ric, 6) - 30.0).abs() < 1e-9);
        // sectional curvature 1
        assert!((r.get(0, 1, 0, 1) - 1.0).abs() < 1e-10);
        // curvature operator is the identity, so ρ_J = F and s_J = 2n
        let f = standard_f(3);
        let rf = curvature_operator(&r, &f);
        assert!(rf.sub(&f).max_abs() < 1e-10);
        let jf = standard_j(3);
        let ric_j = j_ricci(&r, &jf);
        assert!((scalar_s(&ric_j, 6) - 6.0).abs() < 1e-9);
        assert!(j_ricci_form(&ric_j, &jf, 6).sub(&rf).max_abs() < 1e-9);
        // conformally flat
        let w = weyl(&r, &ric, 30.0);
        assert!(w.comps.iter().all(|v| v.abs() < 1e-9));
    }
}
