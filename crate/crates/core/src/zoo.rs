//! Built-in manifolds.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{GeomError, Result};
use crate::expr::{parse, Expr};
use crate::hermitian::GrayHervella;
use crate::jet::Jet;
use crate::manifold::{Domain, Fields, Manifold, Source};
use crate::sampling::sphere_volume;
use crate::scalar::{inverse, mat_mul};

/// Reference values an entry must reproduce.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExpectedScalars {
    pub s: Option<f64>,
    pub s_j: Option<f64>,
    pub df: Option<f64>,
    pub nabla_f: Option<f64>,
    pub lee: Option<f64>,
    pub nijenhuis: Option<f64>,
    pub delta_lee: Option<f64>,
    /// `s₁(t)` for every `t`.
    pub s1_all_t: Option<f64>,
    pub s2_all_t: Option<f64>,
    /// `(t, s₁(t), s₂(t))`
    pub at_t: Vec<(f64, f64, f64)>,
}

#[derive(Clone, Debug)]
pub struct ZooEntry {
    pub manifold: Manifold,
    pub expected: ExpectedScalars,
    /// Volume of the fundamental domain.
    pub volume: f64,
}

pub const PERTURBED_SEED: u64 = 20_240_917;
pub const PERTURBED_AMPLITUDE: f64 = 0.05;

pub fn catalog() -> Vec<ZooEntry> {
    vec![
        flat_torus(2),
        flat_torus(3),
        kodaira_thurston(),
        kodaira_thurston_cplx(),
        hopf(2),
        hopf(3),
        iwasawa(),
        s6_nearly_kaehler(),
        perturbed_torus(),
    ]
}

pub fn names() -> Vec<String> {
    catalog().into_iter().map(|e| e.manifold.name).collect()
}

pub fn lookup(name: &str) -> Result<ZooEntry> {
    catalog().into_iter().find(|e| e.manifold.name == name).ok_or_else(|| GeomError::UnknownManifold(name.to_string()))
}

fn exprs(rows: &[&[&str]], d: usize) -> Vec<Expr> {
    rows.iter().flat_map(|r| r.iter().map(|s| parse(s, d).expect("built-in expression parses"))).collect()
}

fn unit_box(d: usize) -> Domain {
    Domain::Box { lo: vec![0.0; d], hi: vec![1.0; d], periodic: vec![true; d] }
}

fn identity_strings(d: usize) -> Vec<Vec<String>> {
    (0..d).map(|r| (0..d).map(|c| if r == c { "1" } else { "0" }.to_string()).collect()).collect()
}

fn standard_j_strings(n: usize) -> Vec<Vec<String>> {
    let d = 2 * n;
    (0..d)
        .map(|r| {
            (0..d)
                .map(|c| {
                    if r == c + n {
                        "1"
                    } else if c == r + n {
                        "-1"
                    } else {
                        "0"
                    }
                    .to_string()
                })
                .collect()
        })
        .collect()
}

fn from_strings(rows: &[Vec<String>], d: usize) -> Vec<Expr> {
    rows.iter().flatten().map(|s| parse(s, d).expect("built-in expression parses")).collect()
}

pub fn flat_torus(n: usize) -> ZooEntry {
    let d = 2 * n;
    let zeros = ExpectedScalars {
        s: Some(0.0),
        s_j: Some(0.0),
        df: Some(0.0),
        nabla_f: Some(0.0),
        lee: Some(0.0),
        nijenhuis: Some(0.0),
        delta_lee: Some(0.0),
        s1_all_t: Some(0.0),
        s2_all_t: Some(0.0),
        at_t: vec![],
    };
    ZooEntry {
        manifold: Manifold {
            name: format!("flat_torus_{d}"),
            n,
            source: Source::Expr {
                metric: from_strings(&identity_strings(d), d),
                j: from_strings(&standard_j_strings(n), d),
            },
            domain: unit_box(d),
            expected_class: Some(GrayHervella::KAEHLER),
            homogeneous: true,
        },
        expected: zeros,
        volume: 1.0,
    }
}

const KT_METRIC: [&[&str]; 4] =
    [&["1", "0", "0", "0"], &["0", "1+x1^2", "-x1", "0"], &["0", "-x1", "1", "0"], &["0", "0", "0", "1"]];

/// Coframe `dx, dy, dz − x dy, dt`; `J e₁ = e₃`, `J e₂ = e₄`, so `F` is closed.
pub fn kodaira_thurston() -> ZooEntry {
    let j: [&[&str]; 4] =
        [&["0", "x1", "-1", "0"], &["0", "0", "0", "-1"], &["1", "0", "0", "-x1"], &["0", "1", "0", "0"]];
    ZooEntry {
        manifold: Manifold {
            name: "kodaira_thurston".into(),
            n: 2,
            source: Source::Expr { metric: exprs(&KT_METRIC, 4), j: exprs(&j, 4) },
            domain: unit_box(4),
            expected_class: Some("W2".parse().unwrap()),
            homogeneous: true,
        },
        expected: ExpectedScalars {
            s: Some(-0.5),
            s_j: Some(0.5),
            nijenhuis: Some(4.0),
            df: Some(0.0),
            lee: Some(0.0),
            ..Default::default()
        },
        volume: 1.0,
    }
}

/// Same metric with the integrable `J e₁ = e₂`, `J e₃ = e₄`.
pub fn kodaira_thurston_cplx() -> ZooEntry {
    let j: [&[&str]; 4] =
        [&["0", "-1", "0", "0"], &["1", "0", "0", "0"], &["x1", "0", "0", "-1"], &["0", "-x1", "1", "0"]];
    ZooEntry {
        manifold: Manifold {
            name: "kodaira_thurston_cplx".into(),
            n: 2,
            source: Source::Expr { metric: exprs(&KT_METRIC, 4), j: exprs(&j, 4) },
            domain: unit_box(4),
            expected_class: Some("W4".parse().unwrap()),
            homogeneous: true,
        },
        expected: ExpectedScalars { s: Some(-0.5), nijenhuis: Some(0.0), delta_lee: Some(0.0), ..Default::default() },
        volume: 1.0,
    }
}

/// The metric entry `1/|x|²` of the Hopf manifold in text form.
pub fn hopf_entry_text(d: usize) -> String {
    let sum: Vec<String> = (1..=d).map(|i| format!("x{i}^2")).collect();
    format!("1/({})", sum.join("+"))
}

/// Closed form of `1/|x|²` as a jet.
pub fn hopf_entry_jet(x: &[f64], order: u8) -> Jet {
    let c = Jet::coordinates(x, order);
    let mut r2 = Jet::constant(0.0);
    for v in &c {
        r2 = r2 + v * v;
    }
    Jet::constant(1.0) / r2
}

/// `ℂⁿ∖{0}` modulo `z ~ 2z` with `h = δ/|z|²`.
pub fn hopf(n: usize) -> ZooEntry {
    let d = 2 * n;
    let entry = hopf_entry_text(d);
    let metric: Vec<Vec<String>> =
        (0..d).map(|r| (0..d).map(|c| if r == c { entry.clone() } else { "0".into() }).collect()).collect();
    let nf = n as f64;
    ZooEntry {
        manifold: Manifold {
            name: format!("hopf_{n}"),
            n,
            source: Source::Expr { metric: from_strings(&metric, d), j: from_strings(&standard_j_strings(n), d) },
            domain: Domain::Annulus { inner: 1.0, outer: 2.0 },
            expected_class: Some("W4".parse().unwrap()),
            homogeneous: true,
        },
        expected: ExpectedScalars {
            s: Some((2.0 * nf - 1.0) * (2.0 * nf - 2.0)),
            lee: Some(4.0 * (nf - 1.0).powi(2)),
            df: Some(4.0 * (nf - 1.0)),
            nabla_f: Some(4.0 * (nf - 1.0)),
            nijenhuis: Some(0.0),
            delta_lee: Some(0.0),
            ..Default::default()
        },
        volume: 2f64.ln() * sphere_volume(d - 1),
    }
}

/// Unitary coframe `dz₁, dz₂, dz₃ − z₁dz₂` in coordinates
/// `(x₁,x₂,x₃,y₁,y₂,y₃)`, `z_k = x_k + √−1 y_k`.
pub fn iwasawa() -> ZooEntry {
    // h = 2[diag(1,1,0,1,1,0) + a aᵀ + b bᵀ]
    let a = ["0", "-x1", "1", "0", "x4", "0"];
    let b = ["0", "-x4", "0", "0", "-x1", "1"];
    let base = [1, 1, 0, 1, 1, 0];
    let mut rows = vec![vec![String::new(); 6]; 6];
    for r in 0..6 {
        for c in 0..6 {
            let mut terms = Vec::new();
            if r == c && base[r] == 1 {
                terms.push("1".to_string());
            }
            for v in [&a, &b] {
                if v[r] != "0" && v[c] != "0" {
                    terms.push(format!("({})*({})", v[r], v[c]));
                }
            }
            rows[r][c] = if terms.is_empty() { "0".into() } else { format!("2*({})", terms.join("+")) };
        }
    }
    ZooEntry {
        manifold: Manifold {
            name: "iwasawa".into(),
            n: 3,
            source: Source::Expr { metric: from_strings(&rows, 6), j: from_strings(&standard_j_strings(3), 6) },
            domain: unit_box(6),
            expected_class: Some("W3".parse().unwrap()),
            homogeneous: true,
        },
        expected: ExpectedScalars {
            s: Some(-1.0),
            df: Some(2.0),
            lee: Some(0.0),
            nijenhuis: Some(0.0),
            delta_lee: Some(0.0),
            at_t: vec![(1.0, 0.0, 0.0)],
            ..Default::default()
        },
        volume: 8.0,
    }
}

/// Cross product on `ℝ⁷` from the triples `e_a × e_b = e_c`.
const FANO: [[usize; 3]; 7] = [[1, 2, 4], [2, 3, 5], [3, 4, 6], [4, 5, 7], [5, 6, 1], [6, 7, 2], [7, 1, 3]];

pub fn cross7<T>(u: &[T], v: &[T]) -> Vec<T>
where
    T: Clone + std::ops::Sub<Output = T> + std::ops::Mul<Output = T> + std::ops::Add<Output = T> + From<f64>,
{
    let mut out: Vec<T> = (0..7).map(|_| T::from(0.0)).collect();
    for t in FANO {
        let [a, b, c] = t.map(|i| i - 1);
        for (p, q, r) in [(a, b, c), (b, c, a), (c, a, b)] {
            out[r] = out[r].clone() + u[p].clone() * v[q].clone() - u[q].clone() * v[p].clone();
        }
    }
    out
}

/// Induced `(h, J)` on a chart of an embedded submanifold:
/// `h = DEᵀDE` and `J = h⁻¹ DEᵀ J_amb DE`, where `ambient(E, v)` is the
/// ambient structure applied to `v` at `E`. `e` needs order 3.
pub fn embedded_structure(e: &[Jet], dim: usize, ambient: impl Fn(&[Jet], &[Jet]) -> Vec<Jet>) -> Result<Fields> {
    let m = e.len();
    let de: Vec<Vec<Jet>> =
        (0..dim).map(|a| e.iter().map(|c| c.partial(a)).collect::<Result<_>>()).collect::<Result<_>>()?;
    let dot = |u: &[Jet], v: &[Jet]| -> Jet {
        let mut acc = Jet::constant(0.0);
        for i in 0..m {
            acc = acc + &u[i] * &v[i];
        }
        acc
    };
    let mut h = Vec::with_capacity(dim * dim);
    for a in 0..dim {
        for b in 0..dim {
            h.push(dot(&de[a], &de[b]));
        }
    }
    let e2: Vec<Jet> = e.iter().map(|c| c.truncate(2)).collect();
    let hinv = inverse(&h, dim).map_err(|_| GeomError::Chart("embedding differential is rank deficient".into()))?;
    // W[b][a] = ⟨∂_b E, J_amb ∂_a E⟩
    let images: Vec<Vec<Jet>> = de.iter().map(|v| ambient(&e2, v)).collect();
    let mut w = Vec::with_capacity(dim * dim);
    for b in 0..dim {
        for a in 0..dim {
            w.push(dot(&de[b], &images[a]));
        }
    }
    let j = mat_mul(&hinv, &w, dim);
    Ok(Fields { h, j })
}

/// Inverse stereographic projection `x ↦ (2x, |x|²−1)/(1+|x|²)`.
pub fn stereographic(x: &[f64], order: u8) -> Vec<Jet> {
    let c = Jet::coordinates(x, order);
    let mut r2 = Jet::constant(0.0);
    for v in &c {
        r2 = r2 + v * v;
    }
    let inv = Jet::constant(1.0) / (&r2 + 1.0);
    let mut out: Vec<Jet> = c.iter().map(|v| v * &inv * 2.0).collect();
    out.push((&r2 - 1.0) * &inv);
    out
}

/// Unit `S⁶` with `J_p v = p × v`.
pub fn s6_nearly_kaehler() -> ZooEntry {
    let field = |x: &[f64], order: u8| -> Result<Fields> {
        let e = stereographic(x, order.max(2) + 1);
        embedded_structure(&e, 6, |p, v| cross7(p, v))
    };
    ZooEntry {
        manifold: Manifold {
            name: "s6_nearly_kaehler".into(),
            n: 3,
            source: Source::Closure(Arc::new(field)),
            domain: Domain::Sphere { max_radius: 4.0 },
            expected_class: Some("W1".parse().unwrap()),
            homogeneous: true,
        },
        expected: ExpectedScalars {
            s: Some(30.0),
            s_j: Some(6.0),
            df: Some(36.0),
            nabla_f: Some(12.0),
            lee: Some(0.0),
            delta_lee: Some(0.0),
            s1_all_t: Some(0.0),
            s2_all_t: Some(12.0),
            ..Default::default()
        },
        volume: sphere_volume(6),
    }
}

/// One seeded trigonometric term `a·sin(2π k·x + φ)`.
#[derive(Clone, Debug)]
struct Wave {
    amp: f64,
    k: Vec<f64>,
    phase: f64,
}

impl Wave {
    fn random(rng: &mut ChaCha8Rng, d: usize) -> Self {
        loop {
            let k: Vec<f64> = (0..d).map(|_| rng.gen_range(-1i32..=1) as f64).collect();
            if k.iter().any(|v| *v != 0.0) {
                return Wave { amp: rng.gen_range(-1.0..1.0), k, phase: rng.gen_range(0.0..2.0 * PI) };
            }
        }
    }

    fn eval(&self, c: &[Jet]) -> Jet {
        let mut arg = Jet::constant(self.phase);
        for (ki, xi) in self.k.iter().zip(c) {
            if *ki != 0.0 {
                arg = arg + xi * (2.0 * PI * ki);
            }
        }
        arg.sin() * self.amp
    }
}

/// Seeded generic structure on `T⁶`: `J = P J₀ P⁻¹` with `P = I + εM(x)`,
/// `h = ½(h₀ + Jᵀh₀J)` with `h₀ = I + εS(x)`.
pub fn perturbed_torus() -> ZooEntry {
    let (n, d) = (3usize, 6usize);
    let mut rng = ChaCha8Rng::seed_from_u64(PERTURBED_SEED);
    let p_waves: Vec<Wave> = (0..d * d).map(|_| Wave::random(&mut rng, d)).collect();
    let s_waves: Vec<Wave> = (0..d * (d + 1) / 2).map(|_| Wave::random(&mut rng, d)).collect();
    // ‖εM‖ and ‖εS‖ stay below 1 by the row-sum bound, so P is invertible
    // and h₀ positive definite
    assert!(PERTURBED_AMPLITUDE * d as f64 <= 0.5);
    let field = move |x: &[f64], order: u8| -> Result<Fields> {
        let c = Jet::coordinates(x, order);
        let eps = PERTURBED_AMPLITUDE;
        let p: Vec<Jet> = (0..d * d)
            .map(|i| {
                let w = p_waves[i].eval(&c) * eps;
                if i % (d + 1) == 0 {
                    w + 1.0
                } else {
                    w
                }
            })
            .collect();
        let pinv = inverse(&p, d)?;
        let j0: Vec<Jet> = crate::frame::standard_j(n).into_iter().map(Jet::constant).collect();
        let j = mat_mul(&mat_mul(&p, &j0, d), &pinv, d);
        let mut h0 = vec![Jet::constant(0.0); d * d];
        let mut idx = 0;
        for r in 0..d {
            for s in r..d {
                let mut v = s_waves[idx].eval(&c) * eps;
                idx += 1;
                if r == s {
                    v = v + 1.0;
                }
                h0[r * d + s] = v.clone();
                h0[s * d + r] = v;
            }
        }
        let jt = crate::scalar::transpose(&j, d);
        let conj = mat_mul(&mat_mul(&jt, &h0, d), &j, d);
        let h = h0.iter().zip(&conj).map(|(a, b)| (a + b) * 0.5).collect();
        Ok(Fields { h, j })
    };
    ZooEntry {
        manifold: Manifold {
            name: "perturbed_torus".into(),
            n,
            source: Source::Closure(Arc::new(field)),
            domain: unit_box(d),
            expected_class: Some("W1+W2+W3+W4".parse().unwrap()),
            homogeneous: false,
        },
        expected: ExpectedScalars::default(),
        volume: f64::NAN,
    }
}
