//! Pointwise J-adapted orthonormal frames, their unitary complexification,
//! and bidegree projection of forms.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{GeomError, Result};
use crate::forms::KForm;
use crate::scalar::Scalar;

/// Tolerance for the defining identities of `(h, J)` at a point.
pub const STRUCTURE_TOL: f64 = 1e-10;
const CANDIDATE_TOL: f64 = 1e-8;

/// Orthonormal frame with `e_{n+i} = J e_i`. `vectors[c * dim + a]` is the
/// `c`-th coordinate component of `e_a`.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    pub n: usize,
    pub vectors: Vec<f64>,
}

impl Frame {
    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn vector(&self, a: usize) -> Vec<f64> {
        let d = self.dim();
        (0..d).map(|c| self.vectors[c * d + a]).collect()
    }
}

fn h_inner(h: &[f64], u: &[f64], v: &[f64]) -> f64 {
    let d = u.len();
    let mut acc = 0.0;
    for a in 0..d {
        for b in 0..d {
            acc += u[a] * h[a * d + b] * v[b];
        }
    }
    acc
}

fn apply(m: &[f64], v: &[f64]) -> Vec<f64> {
    let d = v.len();
    (0..d).map(|a| (0..d).map(|b| m[a * d + b] * v[b]).sum()).collect()
}

/// Verify that `h` is symmetric positive definite and `J` is an
/// `h`-orthogonal almost complex structure (row-major, `j[a*d+b] = J^a_b`).
pub fn check_structure(h: &[f64], j: &[f64], dim: usize) -> Result<()> {
    if dim == 0 || dim % 2 != 0 {
        return Err(GeomError::Structure(format!("dimension {dim} is not even and positive")));
    }
    if h.len() != dim * dim || j.len() != dim * dim {
        return Err(GeomError::Structure("metric or J has the wrong shape".into()));
    }
    if h.iter().chain(j).any(|v| !v.is_finite()) {
        return Err(GeomError::Structure("non-finite metric or J entry".into()));
    }
    let scale = h.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0);
    for a in 0..dim {
        for b in 0..dim {
            if (h[a * dim + b] - h[b * dim + a]).abs() > STRUCTURE_TOL * scale {
                return Err(GeomError::Structure("metric is not symmetric".into()));
            }
            let mut jj = 0.0;
            for c in 0..dim {
                jj += j[a * dim + c] * j[c * dim + b];
            }
            let target = if a == b { -1.0 } else { 0.0 };
            if (jj - target).abs() > STRUCTURE_TOL * scale {
                return Err(GeomError::Structure(format!("J² ≠ −Id (entry ({a},{b}) is {jj})")));
            }
        }
    }
    for a in 0..dim {
        for b in 0..dim {
            let mut v = 0.0;
            for c in 0..dim {
                for e in 0..dim {
                    v += j[c * dim + a] * h[c * dim + e] * j[e * dim + b];
                }
            }
            if (v - h[a * dim + b]).abs() > STRUCTURE_TOL * scale {
                return Err(GeomError::Structure("J is not orthogonal for the metric".into()));
            }
        }
    }
    for k in 1..=dim {
        // leading principal minors positive
        let sub: Vec<f64> = (0..k * k).map(|i| h[(i / k) * dim + i % k]).collect();
        if crate::scalar::determinant(&sub, k)? <= 0.0 {
            return Err(GeomError::Structure("metric is not positive definite".into()));
        }
    }
    Ok(())
}

/// Gram–Schmidt over the coordinate basis in index order, each accepted
/// vector paired with its `J` image.
pub fn build_adapted_frame(h: &[f64], j: &[f64], dim: usize) -> Result<Frame> {
    check_structure(h, j, dim)?;
    let n = dim / 2;
    let mut es: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut jes: Vec<Vec<f64>> = Vec::with_capacity(n);
    for cand in 0..dim {
        if es.len() == n {
            break;
        }
        let mut v: Vec<f64> = (0..dim).map(|c| if c == cand { 1.0 } else { 0.0 }).collect();
        for _ in 0..2 {
            for u in es.iter().chain(&jes) {
                let p = h_inner(h, &v, u);
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= p * y;
                }
            }
        }
        let norm = h_inner(h, &v, &v).max(0.0).sqrt();
        if norm < CANDIDATE_TOL {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= norm);
        jes.push(apply(j, &v));
        es.push(v);
    }
    if es.len() < n {
        return Err(GeomError::DegenerateFrame(format!("only {} of {n} frame vectors found", es.len())));
    }
    let mut vectors = vec![0.0; dim * dim];
    for (a, v) in es.iter().chain(&jes).enumerate() {
        for c in 0..dim {
            vectors[c * dim + a] = v[c];
        }
    }
    Ok(Frame { n, vectors })
}

/// `J` in any adapted frame: `J e_i = e_{n+i}`, `J e_{n+i} = −e_i`.
pub fn standard_j(n: usize) -> Vec<f64> {
    let d = 2 * n;
    let mut j = vec![0.0; d * d];
    for i in 0..n {
        j[(n + i) * d + i] = 1.0;
        j[i * d + n + i] = -1.0;
    }
    j
}

/// The fundamental form `F = Σ e^i ∧ e^{n+i}` in any adapted frame.
pub fn standard_f(n: usize) -> KForm<f64> {
    KForm::from_fn(2 * n, 2, |s| if s[1] == s[0] + n { 1.0 } else { 0.0 })
}

/// Frame components of the vectors `(u_1,…,u_n, ū_1,…,ū_n)` with
/// `u_i = (e_i − √−1 e_{n+i})/√2`; `m[A * dim + a]`.
pub fn unitary_matrix(n: usize) -> Vec<Complex64> {
    let d = 2 * n;
    let s = FRAC_1_SQRT_2;
    let mut m = vec![Complex64::new(0.0, 0.0); d * d];
    for i in 0..n {
        m[i * d + i] = Complex64::new(s, 0.0);
        m[(n + i) * d + i] = Complex64::new(0.0, -s);
        m[i * d + n + i] = Complex64::new(s, 0.0);
        m[(n + i) * d + n + i] = Complex64::new(0.0, s);
    }
    m
}

/// Inverse of [`unitary_matrix`]: `e_i = (u_i + ū_i)/√2`,
/// `e_{n+i} = √−1 (u_i − ū_i)/√2`.
pub fn unitary_inverse(n: usize) -> Vec<Complex64> {
    let d = 2 * n;
    let s = FRAC_1_SQRT_2;
    let mut m = vec![Complex64::new(0.0, 0.0); d * d];
    for i in 0..n {
        m[i * d + i] = Complex64::new(s, 0.0);
        m[(n + i) * d + i] = Complex64::new(s, 0.0);
        m[i * d + n + i] = Complex64::new(0.0, s);
        m[(n + i) * d + n + i] = Complex64::new(0.0, -s);
    }
    m
}

/// Coordinate components of the unitary vectors `u_i`.
pub fn unitary_frame(f: &Frame) -> Vec<Vec<Complex64>> {
    let n = f.n;
    (0..n)
        .map(|i| {
            let (e, je) = (f.vector(i), f.vector(n + i));
            e.iter().zip(&je).map(|(a, b)| Complex64::new(*a, -*b) * FRAC_1_SQRT_2).collect()
        })
        .collect()
}

/// The unitary coframe `θ^i = (ω^i + √−1 ω^{n+i})/√2` as complex 1-forms in
/// the real frame basis.
pub fn unitary_coframe(n: usize) -> Vec<KForm<Complex64>> {
    (0..n)
        .map(|i| {
            let mut c = vec![Complex64::new(0.0, 0.0); 2 * n];
            c[i] = Complex64::new(FRAC_1_SQRT_2, 0.0);
            c[n + i] = Complex64::new(0.0, FRAC_1_SQRT_2);
            KForm::one_form(c)
        })
        .collect()
}

/// Change every index of a covariant tensor: `T'[A…] = Σ T[a…] m[a*dim+A]`.
pub fn transform_tensor<S: Scalar>(t: &[S], rank: usize, dim: usize, m: &[S]) -> Vec<S> {
    let mut cur = t.to_vec();
    for slot in 0..rank {
        let stride = dim.pow((rank - 1 - slot) as u32);
        let mut next = vec![S::zero(); cur.len()];
        for (idx, out) in next.iter_mut().enumerate() {
            let target = (idx / stride) % dim;
            let base = idx - target * stride;
            let mut acc = S::zero();
            for a in 0..dim {
                acc = acc + cur[base + a * stride].clone() * m[a * dim + target].clone();
            }
            *out = acc;
        }
        cur = next;
    }
    cur
}

/// A complex form of pure bidegree, stored in the real frame basis.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexForm {
    pub p: usize,
    pub q: usize,
    pub form: KForm<Complex64>,
}

impl ComplexForm {
    /// Complex conjugation swaps the bidegree.
    pub fn conj(&self) -> ComplexForm {
        ComplexForm { p: self.q, q: self.p, form: self.form.conj() }
    }
}

/// Components `φ(v_{I})` on the unitary vectors `v = (u, ū)`.
pub fn unitary_components(a: &KForm<Complex64>, n: usize) -> KForm<Complex64> {
    a.pullback(&unitary_matrix(n))
}

/// Project a frame-basis form onto bidegree `(p, q)`.
pub fn pq_project(a: &KForm<Complex64>, p: usize, q: usize, n: usize) -> Result<ComplexForm> {
    if p + q != a.degree() {
        return Err(GeomError::Domain(format!("bidegree ({p},{q}) does not match degree {}", a.degree())));
    }
    let mut b = unitary_components(a, n);
    let sets = crate::forms::index_sets(2 * n, a.degree());
    for s in &sets {
        let holo = s.iter().filter(|&&i| i < n).count();
        if holo != p {
            b.set(s, Complex64::new(0.0, 0.0));
        }
    }
    Ok(ComplexForm { p, q, form: b.pullback(&unitary_inverse(n)) })
}

/// Real part of `Σ_{p−q ∈ diffs}` projections: e.g. the `(3,0)+(0,3)` part of
/// a real 3-form is `real_type_part(φ, &[3])`.
pub fn real_type_part(a: &KForm<f64>, n: usize, abs_diff: usize) -> Result<KForm<f64>> {
    let k = a.degree();
    let c = a.to_complex();
    let mut acc = KForm::<f64>::zero(a.dim(), k);
    for p in 0..=k {
        let q = k - p;
        if p.abs_diff(q) == abs_diff {
            acc = acc.add(&pq_project(&c, p, q, n)?.form.re());
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn j0(n: usize) -> Vec<f64> {
        standard_j(n)
    }

    fn identity(d: usize) -> Vec<f64> {
        (0..d * d).map(|i| if i % (d + 1) == 0 { 1.0 } else { 0.0 }).collect()
    }

    #[test]
    fn flat_frame_is_standard_basis() {
        let f = build_adapted_frame(&identity(4), &j0(2), 4).unwrap();
        assert_eq!(f.vectors, identity(4));
    }

    #[test]
    fn conformal_frame_scales() {
        // h = δ/|z|² with |z|² = 4
        let h: Vec<f64> = identity(4).iter().map(|v| v / 4.0).collect();
        let f = build_adapted_frame(&h, &j0(2), 4).unwrap();
        for a in 0..4 {
            let v = f.vector(a);
            assert!((v.iter().map(|x| x * x).sum::<f64>().sqrt() - 2.0).abs() < 1e-14);
        }
    }

    fn random_structure(seed: u64, n: usize) -> (Vec<f64>, Vec<f64>) {
        let d = 2 * n;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p: Vec<f64> =
            (0..d * d).map(|i| if i % (d + 1) == 0 { 1.0 } else { 0.0 } + rng.gen_range(-0.4..0.4)).collect();
        let pinv = crate::scalar::inverse(&p, d).unwrap();
        let j = crate::scalar::mat_mul(&crate::scalar::mat_mul(&p, &j0(n), d), &pinv, d);
        let a: Vec<f64> = (0..d * d).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let at = crate::scalar::transpose(&a, d);
        let mut h0 = crate::scalar::mat_mul(&at, &a, d);
        for i in 0..d {
            h0[i * d + i] += 1.0;
        }
        let jt = crate::scalar::transpose(&j, d);
        let jhj = crate::scalar::mat_mul(&crate::scalar::mat_mul(&jt, &h0, d), &j, d);
        let h = h0.iter().zip(&jhj).map(|(x, y)| 0.5 * (x + y)).collect();
        (h, j)
    }

    #[test]
    fn random_compatible_structures_give_valid_frames() {
        for seed in 0..20 {
            let n = 2 + (seed as usize % 2);
            let d = 2 * n;
            let (h, j) = random_structure(seed, n);
            let f = build_adapted_frame(&h, &j, d).unwrap();
            let g = transform_tensor(&h, 2, d, &f.vectors);
            for a in 0..d {
                for b in 0..d {
                    let target = if a == b { 1.0 } else { 0.0 };
                    assert!((g[a * d + b] - target).abs() < 1e-12);
                }
            }
            for i in 0..n {
                let je = apply(&j, &f.vector(i));
                let e = f.vector(n + i);
                assert!(je.iter().zip(&e).all(|(x, y)| x == y));
            }
        }
    }

    #[test]
    fn incompatible_structures_are_rejected() {
        let mut j = j0(2);
        j[0] = 0.5;
        assert!(matches!(build_adapted_frame(&identity(4), &j, 4), Err(GeomError::Structure(_))));
        let mut h = identity(4);
        h[0] = 2.0;
        assert!(matches!(build_adapted_frame(&h, &j0(2), 4), Err(GeomError::Structure(_))));
    }

    #[test]
    fn unitary_vectors_are_hermitian_orthonormal() {
        let (h, j) = random_structure(7, 3);
        let f = build_adapted_frame(&h, &j, 6).unwrap();
        let u = unitary_frame(&f);
        let hc: Vec<Complex64> = h.iter().map(|v| Complex64::new(*v, 0.0)).collect();
        let bil = |x: &[Complex64], y: &[Complex64]| -> Complex64 {
            let mut acc = Complex64::new(0.0, 0.0);
            for a in 0..6 {
                for b in 0..6 {
                    acc += x[a] * hc[a * 6 + b] * y[b];
                }
            }
            acc
        };
        for i in 0..3 {
            // J u_i = √−1 u_i
            let ju: Vec<Complex64> = (0..6).map(|a| (0..6).map(|b| u[i][b] * j[a * 6 + b]).sum()).collect();
            for a in 0..6 {
                assert!((ju[a] - Complex64::i() * u[i][a]).norm() < 1e-12);
            }
            for k in 0..3 {
                let ubar: Vec<Complex64> = u[k].iter().map(|z| z.conj()).collect();
                let target = if i == k { 1.0 } else { 0.0 };
                assert!((bil(&u[i], &ubar) - target).norm() < 1e-12);
                assert!(bil(&u[i], &u[k]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn fundamental_form_is_type_one_one() {
        let n = 2;
        let f = standard_f(n).to_complex();
        let p11 = pq_project(&f, 1, 1, n).unwrap();
        assert!(p11.form.sub(&f).norm_sq() < 1e-28);
        assert!(pq_project(&f, 2, 0, n).unwrap().form.norm_sq() < 1e-28);
        // F = √−1 Σ θ^i ∧ θ̄^i
        let th = unitary_coframe(n);
        let mut g = KForm::<Complex64>::zero(4, 2);
        for t in &th {
            g = g.add(&t.wedge(&t.conj()).scale(1.0).map(|z| z * Complex64::i()));
        }
        assert!(g.sub(&f).norm_sq() < 1e-28);
    }

    #[test]
    fn projections_are_complete_and_idempotent() {
        let n = 3;
        let phi = KForm::from_fn(6, 3, |s| ((s[0] + 2 * s[1] + 5 * s[2]) as f64).cos()).to_complex();
        let mut sum = KForm::<Complex64>::zero(6, 3);
        for p in 0..=3 {
            let pr = pq_project(&phi, p, 3 - p, n).unwrap();
            let again = pq_project(&pr.form, p, 3 - p, n).unwrap();
            assert!(again.form.sub(&pr.form).norm_sq() < 1e-26);
            // conjugation maps (p,q) to (q,p)
            let c = pr.conj();
            assert!(pq_project(&c.form, c.p, c.q, n).unwrap().form.sub(&c.form).norm_sq() < 1e-26);
            sum = sum.add(&pr.form);
        }
        assert!(sum.sub(&phi).norm_sq() < 1e-26);
        assert!(pq_project(&phi, 1, 1, n).is_err());
    }

    #[test]
    fn derivation_eigenvalues_match_bidegree() {
        let n = 3;
        let d = 6;
        let j = j0(n);
        let phi = KForm::from_fn(d, 3, |s| ((s[0] * 7 + s[1] * 3 + s[2]) as f64).sin());
        let minus = real_type_part(&phi, n, 3).unwrap();
        let plus = real_type_part(&phi, n, 1).unwrap();
        let l2 = |x: &KForm<f64>| x.complex_derivation(&j).complex_derivation(&j);
        assert!(l2(&minus).add(&minus.scale(9.0)).max_abs() < 1e-12);
        assert!(l2(&plus).add(&plus).max_abs() < 1e-12);
        assert!(minus.add(&plus).sub(&phi).max_abs() < 1e-12);
    }
}
