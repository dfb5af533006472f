//! Fundamental form, Nijenhuis tensor, covariant derivative of `J`, the
//! four-component decomposition of `∇F` and the resulting norm invariants.
//!
//! Coordinate-level objects are jets; frame-level objects are plain values
//! in a `J`-adapted orthonormal frame, where `J` is [`standard_j`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::forms::{index_sets, KForm};
use crate::frame::{real_type_part, standard_f, standard_j};
use crate::jet::Jet;
use crate::riemannian::i3;

/// Coordinate fundamental form `F_{ab} = h(J∂_a, ∂_b)`.
pub fn fundamental_form(h: &[Jet], j: &[Jet], dim: usize) -> KForm<Jet> {
    KForm::from_fn(dim, 2, |s| {
        let (a, b) = (s[0], s[1]);
        let mut acc = Jet::constant(0.0);
        for c in 0..dim {
            acc = acc + &j[c * dim + a] * &h[c * dim + b];
        }
        acc
    })
}

/// Nijenhuis tensor `N^k_{ij}` of `J` in coordinates, index `[k][i][j]`,
/// from `N(X,Y) = [X,Y] + J[JX,Y] + J[X,JY] − [JX,JY]`.
pub fn nijenhuis(j: &[Jet], dim: usize) -> Vec<f64> {
    let d = dim;
    let jv = |c: usize, a: usize| j[c * d + a].value();
    let dj = |m: usize, c: usize, a: usize| j[c * d + a].d1(m);
    let mut out = vec![0.0; d * d * d];
    for k in 0..d {
        for a in 0..d {
            for b in 0..d {
                let mut acc = 0.0;
                for m in 0..d {
                    acc += jv(k, m) * (dj(a, m, b) - dj(b, m, a));
                    acc += jv(m, b) * dj(m, k, a) - jv(m, a) * dj(m, k, b);
                }
                out[i3(d, k, a, b)] = acc;
            }
        }
    }
    out
}

/// `(∇_a J)^b_c`, index `[a][b][c]`, one jet order below `Γ` and `∂J`.
pub fn nabla_j(gamma: &[Jet], j: &[Jet], dim: usize) -> Result<Vec<Jet>> {
    let d = dim;
    let mut out = Vec::with_capacity(d * d * d);
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                let mut acc = j[b * d + c].partial(a)?;
                for e in 0..d {
                    acc = acc + &gamma[i3(d, b, a, e)] * &j[e * d + c] - &gamma[i3(d, e, a, c)] * &j[b * d + e];
                }
                out.push(acc);
            }
        }
    }
    Ok(out)
}

/// Lower the first index of a `(1,2)` tensor: `T_{xab} = h_{xc} T^c_{ab}`.
pub fn lower_vector_valued(t: &[f64], h: &[f64], dim: usize) -> Vec<f64> {
    let d = dim;
    let mut out = vec![0.0; d * d * d];
    for x in 0..d {
        for ab in 0..d * d {
            out[x * d * d + ab] = (0..d).map(|c| h[x * d + c] * t[c * d * d + ab]).sum();
        }
    }
    out
}

/// Contraction with the fundamental form:
/// `(Λφ)_{c…} = Σ_{a<b} F^{ab} φ_{ab c…}` with `F^{ab}` raised by `ginv`.
pub fn lambda_contract<S: crate::scalar::Scalar>(phi: &KForm<S>, f: &KForm<S>, ginv: &[S]) -> KForm<S> {
    let dim = phi.dim();
    let fr = f.pullback(ginv);
    let pairs = index_sets(dim, 2);
    KForm::from_fn(dim, phi.degree() - 2, |rest| {
        let mut acc = S::zero();
        for p in &pairs {
            let fab = fr.component(p);
            let mut idx = p.clone();
            idx.extend_from_slice(rest);
            acc = acc + fab * phi.eval(&idx);
        }
        acc
    })
}

/// Norm of a tensor `T_{ABC}` antisymmetric in its last two slots:
/// `Σ_A Σ_{B<C} T_{ABC}²`.
pub fn vector_two_form_norm_sq(t: &[f64], dim: usize) -> f64 {
    let d = dim;
    let mut acc = 0.0;
    for a in 0..d {
        for b in 0..d {
            for c in (b + 1)..d {
                acc += t[i3(d, a, b, c)].powi(2);
            }
        }
    }
    acc
}

/// The four Gray–Hervella components and their ingredients, frame basis.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub n: usize,
    pub df: KForm<f64>,
    pub df_minus: KForm<f64>,
    pub df_plus: KForm<f64>,
    pub df_plus_primitive: KForm<f64>,
    pub lee: KForm<f64>,
    /// `N_{ABC} = ⟨e_A, N(e_B, e_C)⟩`
    pub n_full: Vec<f64>,
    pub b_n: Vec<f64>,
    pub n0: Vec<f64>,
}

impl Decomposition {
    /// Split `dF` and `N` (both in the adapted frame) given the Lee form.
    pub fn new(n: usize, df: KForm<f64>, n_full: Vec<f64>, lee: KForm<f64>) -> Result<Self> {
        let d = 2 * n;
        let df_minus = real_type_part(&df, n, 3)?;
        let df_plus = real_type_part(&df, n, 1)?;
        let f = standard_f(n);
        let df_plus_primitive = df_plus.sub(&lee.wedge(&f).scale(1.0 / (n as f64 - 1.0)));
        let mut b_n = vec![0.0; d * d * d];
        for x in 0..d {
            for y in 0..d {
                for z in 0..d {
                    b_n[i3(d, x, y, z)] =
                        (n_full[i3(d, x, y, z)] + n_full[i3(d, y, z, x)] + n_full[i3(d, z, x, y)]) / 3.0;
                }
            }
        }
        let n0 = n_full.iter().zip(&b_n).map(|(a, b)| a - b).collect();
        Ok(Self { n, df, df_minus, df_plus, df_plus_primitive, lee, n_full, b_n, n0 })
    }

    /// `N(JX,Y,Z) = ⟨JX, N(Y,Z)⟩` in the frame.
    pub fn n_j_first(&self, a: usize, b: usize, c: usize) -> f64 {
        let (n, d) = (self.n, 2 * self.n);
        // J e_A = e_{A+n} for A < n, −e_{A−n} otherwise
        if a < n {
            self.n_full[i3(d, a + n, b, c)]
        } else {
            -self.n_full[i3(d, a - n, b, c)]
        }
    }

    /// Right side of the four-component expression of `(∇_A F)_{BC}`.
    pub fn reconstruct_nabla_f(&self) -> Vec<f64> {
        let d = 2 * self.n;
        let j = standard_j(self.n);
        let jimg = |b: usize| (0..d).find(|&c| j[c * d + b] != 0.0).map(|c| (c, j[c * d + b])).unwrap();
        let mut out = vec![0.0; d * d * d];
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    let (jb, sb) = jimg(b);
                    let (jc, sc) = jimg(c);
                    let plus = self.df_plus.eval(&[a, b, c]) - sb * sc * self.df_plus.eval(&[a, jb, jc]);
                    out[i3(d, a, b, c)] = self.df_minus.eval(&[a, b, c]) - 0.5 * self.n_j_first(a, b, c) + 0.5 * plus;
                }
            }
        }
        out
    }

    pub fn norms(&self, nabla_f: &[f64], delta_lee: f64) -> NormBundle {
        let d = 2 * self.n;
        NormBundle {
            df_minus: self.df_minus.norm_sq(),
            n0: vector_two_form_norm_sq(&self.n0, d),
            df_plus_primitive: self.df_plus_primitive.norm_sq(),
            lee: self.lee.norm_sq(),
            df: self.df.norm_sq(),
            df_plus: self.df_plus.norm_sq(),
            nijenhuis: vector_two_form_norm_sq(&self.n_full, d),
            nabla_f: vector_two_form_norm_sq(nabla_f, d),
            delta_lee,
        }
    }
}

/// Scalar invariants of `∇F` at a point.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NormBundle {
    pub df_minus: f64,
    pub n0: f64,
    pub df_plus_primitive: f64,
    pub lee: f64,
    pub df: f64,
    pub df_plus: f64,
    pub nijenhuis: f64,
    pub nabla_f: f64,
    pub delta_lee: f64,
}

impl NormBundle {
    pub fn components(&self) -> [f64; 4] {
        [self.df_minus, self.n0, self.df_plus_primitive, self.lee]
    }
}

/// Presence flags of the four components `(dF)⁻, N⁰, (dF)₀⁺, α_F`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GrayHervella(pub [bool; 4]);

impl GrayHervella {
    pub const KAEHLER: Self = Self([false; 4]);

    /// Flag a component when its largest squared norm over the sample
    /// exceeds `tol`.
    pub fn classify<'a>(norms: impl IntoIterator<Item = &'a NormBundle>, tol: f64) -> Self {
        let mut max = [0.0_f64; 4];
        for nb in norms {
            for (m, v) in max.iter_mut().zip(nb.components()) {
                *m = m.max(v);
            }
        }
        Self(max.map(|m| m > tol))
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0[i - 1]
    }

    /// Whether every present component is among `allowed` (class indices 1..=4).
    pub fn within(&self, allowed: &[usize]) -> bool {
        (1..=4).all(|i| !self.contains(i) || allowed.contains(&i))
    }

    pub fn is_hermitian(&self) -> bool {
        self.within(&[3, 4])
    }
}

impl fmt::Display for GrayHervella {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = (1..=4).filter(|&i| self.contains(i)).map(|i| format!("W{i}")).collect();
        if parts.is_empty() {
            write!(f, "K")
        } else {
            write!(f, "{}", parts.join("+"))
        }
    }
}

impl std::str::FromStr for GrayHervella {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        if s == "K" {
            return Ok(Self::KAEHLER);
        }
        let mut flags = [false; 4];
        for part in s.split('+') {
            match part.trim() {
                "W1" => flags[0] = true,
                "W2" => flags[1] = true,
                "W3" => flags[2] = true,
                "W4" => flags[3] = true,
                other => return Err(format!("unknown class component `{other}`")),
            }
        }
        Ok(Self(flags))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_labels_round_trip() {
        for s in ["K", "W1", "W2", "W3+W4", "W1+W2+W3+W4"] {
            let c: GrayHervella = s.parse().unwrap();
            assert_eq!(c.to_string(), s);
        }
        assert!("W5".parse::<GrayHervella>().is_err());
        assert!("W3+W4".parse::<GrayHervella>().unwrap().is_hermitian());
    }

    #[test]
    fn lambda_of_lee_wedge_f() {
        // Λ(β∧F) = (n−1)β
        let n = 3;
        let f = standard_f(n);
        let beta = KForm::one_form(vec![0.3, -1.0, 0.5, 2.0, 0.1, -0.7]);
        let id: Vec<f64> = (0..36).map(|i| if i % 7 == 0 { 1.0 } else { 0.0 }).collect();
        let l = lambda_contract(&beta.wedge(&f), &f, &id);
        assert!(l.sub(&beta.scale(2.0)).max_abs() < 1e-14);
    }
}
