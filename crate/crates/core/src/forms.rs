//! Exterior algebra over a fixed basis.
//!
//! A [`KForm`] stores one component per strictly increasing multi-index, so
//! antisymmetry is implicit. Index sets are ordered colexicographically,
//! which is the numeric order of their bitmasks. The same type holds forms in
//! a coordinate basis (with jet components, so `d` is available) and in an
//! orthonormal frame (with real or complex components).

use num_complex::Complex64;

use crate::error::{GeomError, Result};
use crate::jet::Jet;
use crate::scalar::Scalar;

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r = 1usize;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Increasing index sets of size `k` over `0..dim`, in storage order.
pub fn index_sets(dim: usize, k: usize) -> Vec<Vec<usize>> {
    assert!(dim <= 16, "form dimension {dim} too large");
    (0u32..(1 << dim))
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..dim).filter(|i| m & (1 << i) != 0).collect())
        .collect()
}

fn rank(set: &[usize]) -> usize {
    set.iter().enumerate().map(|(i, &c)| binomial(c, i + 1)).sum()
}

/// Sort `idx` in place; returns the permutation sign, or `None` on a repeat.
pub fn sort_sign(idx: &mut [usize]) -> Option<f64> {
    let mut sign = 1.0;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
        if j > 0 && idx[j - 1] == idx[j] {
            return None;
        }
    }
    Some(sign)
}

fn complement(dim: usize, set: &[usize]) -> Vec<usize> {
    (0..dim).filter(|i| !set.contains(i)).collect()
}

/// Determinant by permutation expansion. Safe for jets whose point value is
/// singular (derivatives of a vanishing minor need not vanish).
pub fn leibniz_det<S: Scalar>(m: &[S], k: usize) -> S {
    match k {
        0 => S::from_f64(1.0),
        1 => m[0].clone(),
        2 => m[0].clone() * m[3].clone() - m[1].clone() * m[2].clone(),
        _ => {
            // Laplace expansion along the first row.
            let mut acc = S::zero();
            for col in 0..k {
                let mut minor = Vec::with_capacity((k - 1) * (k - 1));
                for r in 1..k {
                    for c in 0..k {
                        if c != col {
                            minor.push(m[r * k + c].clone());
                        }
                    }
                }
                let term = m[col].clone() * leibniz_det(&minor, k - 1);
                acc = if col % 2 == 0 { acc + term } else { acc - term };
            }
            acc
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KForm<S> {
    dim: usize,
    degree: usize,
    comps: Vec<S>,
}

impl<S: Scalar> KForm<S> {
    pub fn zero(dim: usize, degree: usize) -> Self {
        Self { dim, degree, comps: vec![S::zero(); binomial(dim, degree)] }
    }

    /// Build from a function of the increasing index set.
    pub fn from_fn(dim: usize, degree: usize, mut f: impl FnMut(&[usize]) -> S) -> Self {
        let comps = index_sets(dim, degree).iter().map(|s| f(s)).collect();
        Self { dim, degree, comps }
    }

    pub fn from_components(dim: usize, degree: usize, comps: Vec<S>) -> Result<Self> {
        if comps.len() != binomial(dim, degree) {
            return Err(GeomError::Domain(format!(
                "a {degree}-form in dimension {dim} needs {} components, got {}",
                binomial(dim, degree),
                comps.len()
            )));
        }
        Ok(Self { dim, degree, comps })
    }

    /// A 1-form from its components.
    pub fn one_form(comps: Vec<S>) -> Self {
        Self { dim: comps.len(), degree: 1, comps }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn comps(&self) -> &[S] {
        &self.comps
    }

    /// Component on an increasing index set.
    pub fn component(&self, set: &[usize]) -> S {
        self.comps[rank(set)].clone()
    }

    pub fn set(&mut self, set: &[usize], value: S) {
        let r = rank(set);
        self.comps[r] = value;
    }

    /// Value on an arbitrary index tuple (antisymmetric extension).
    pub fn eval(&self, idx: &[usize]) -> S {
        let mut s = idx.to_vec();
        match sort_sign(&mut s) {
            Some(sign) => {
                let v = self.component(&s);
                if sign > 0.0 {
                    v
                } else {
                    -v
                }
            }
            None => S::zero(),
        }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> KForm<T> {
        KForm { dim: self.dim, degree: self.degree, comps: self.comps.iter().map(f).collect() }
    }

    fn check_same(&self, other: &Self) {
        assert_eq!((self.dim, self.degree), (other.dim, other.degree), "form shape mismatch");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_same(other);
        let comps = self.comps.iter().zip(&other.comps).map(|(a, b)| a.clone() + b.clone()).collect();
        Self { dim: self.dim, degree: self.degree, comps }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_same(other);
        let comps = self.comps.iter().zip(&other.comps).map(|(a, b)| a.clone() - b.clone()).collect();
        Self { dim: self.dim, degree: self.degree, comps }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|v| v.scale(s))
    }

    pub fn mul_scalar(&self, s: &S) -> Self {
        self.map(|v| v.clone() * s.clone())
    }

    pub fn wedge(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "form dimension mismatch");
        let dim = self.dim;
        let mut out = Self::zero(dim, self.degree + other.degree);
        if self.degree + other.degree > dim {
            return out;
        }
        let left = index_sets(dim, self.degree);
        let right = index_sets(dim, other.degree);
        for (i, a) in left.iter().enumerate() {
            for (j, b) in right.iter().enumerate() {
                if a.iter().any(|x| b.contains(x)) {
                    continue;
                }
                let mut idx: Vec<usize> = a.iter().chain(b).copied().collect();
                let sign = sort_sign(&mut idx).expect("disjoint sets");
                let term = self.comps[i].clone() * other.comps[j].clone();
                let r = rank(&idx);
                out.comps[r] = if sign > 0.0 { out.comps[r].clone() + term } else { out.comps[r].clone() - term };
            }
        }
        out
    }

    /// `k`-th wedge power.
    pub fn power(&self, k: usize) -> Self {
        let mut out = KForm::from_fn(self.dim, 0, |_| S::from_f64(1.0));
        for _ in 0..k {
            out = out.wedge(self);
        }
        out
    }

    /// Pull back along the linear map `m` (row-major, `m[c*dim+a]` is the
    /// `c`-component of the image of basis vector `a`): the result evaluated
    /// on basis vectors equals this form evaluated on their images.
    pub fn pullback(&self, m: &[S]) -> Self {
        let dim = self.dim;
        let k = self.degree;
        let sets = index_sets(dim, k);
        let mut out = Self::zero(dim, k);
        for (oi, target) in sets.iter().enumerate() {
            let mut acc = S::zero();
            for (si, source) in sets.iter().enumerate() {
                let sub: Vec<S> = source
                    .iter()
                    .flat_map(|&r| target.iter().map(move |&c| (r, c)))
                    .map(|(r, c)| m[r * dim + c].clone())
                    .collect();
                acc = acc + leibniz_det(&sub, k) * self.comps[si].clone();
            }
            out.comps[oi] = acc;
        }
        out
    }

    /// Hodge star for the metric with inverse `ginv` and volume density
    /// `sqrt_det`, both in the basis of this form.
    pub fn hodge_star(&self, ginv: &[S], sqrt_det: &S) -> Self {
        let dim = self.dim;
        let k = self.degree;
        let raised = self.pullback(ginv);
        KForm::from_fn(dim, dim - k, |target| {
            let mut idx = complement(dim, target);
            let source = idx.clone();
            idx.extend_from_slice(target);
            let sign = sort_sign(&mut idx).expect("complementary sets");
            let v = raised.component(&source) * sqrt_det.clone();
            if sign > 0.0 {
                v
            } else {
                -v
            }
        })
    }

    /// The derivation extending `J` to forms:
    /// `(Lφ)(X₁,…,X_k) = Σ_m φ(X₁,…,J X_m,…,X_k)`.
    /// On a `(p,q)` form it acts as multiplication by `i(p−q)`.
    pub fn complex_derivation(&self, j: &[S]) -> Self {
        let dim = self.dim;
        KForm::from_fn(dim, self.degree, |set| {
            let mut acc = S::zero();
            for m in 0..set.len() {
                for c in 0..dim {
                    let mut idx = set.to_vec();
                    idx[m] = c;
                    let v = self.eval(&idx);
                    acc = acc + j[c * dim + set[m]].clone() * v;
                }
            }
            acc
        })
    }

    /// `(Jφ)(X₁,…,X_k) = (−1)^k φ(JX₁,…,JX_k)`.
    pub fn j_action(&self, j: &[S]) -> Self {
        let p = self.pullback(j);
        if self.degree % 2 == 0 {
            p
        } else {
            p.scale(-1.0)
        }
    }
}

impl KForm<f64> {
    /// Inner product summing over increasing multi-indices.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        if self.degree != other.degree || self.dim != other.dim {
            return Err(GeomError::Domain(format!(
                "inner product of a {}-form with a {}-form",
                self.degree, other.degree
            )));
        }
        Ok(self.comps.iter().zip(&other.comps).map(|(a, b)| a * b).sum())
    }

    pub fn norm_sq(&self) -> f64 {
        self.comps.iter().map(|a| a * a).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn to_complex(&self) -> KForm<Complex64> {
        self.map(|v| Complex64::new(*v, 0.0))
    }
}

impl KForm<Complex64> {
    pub fn re(&self) -> KForm<f64> {
        self.map(|v| v.re)
    }

    pub fn im(&self) -> KForm<f64> {
        self.map(|v| v.im)
    }

    /// Hermitian norm squared.
    pub fn norm_sq(&self) -> f64 {
        self.comps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }
}

impl KForm<Jet> {
    /// Point values of every component.
    pub fn value(&self) -> KForm<f64> {
        self.map(|v| v.value())
    }

    /// Exterior derivative of a coordinate-basis form field; lowers the jet
    /// order by one.
    pub fn exterior_derivative(&self) -> Result<Self> {
        let dim = self.dim;
        let k = self.degree;
        if k >= dim {
            return Ok(Self::zero(dim, k + 1));
        }
        let mut out = Vec::with_capacity(binomial(dim, k + 1));
        for set in index_sets(dim, k + 1) {
            let mut acc = Jet::constant(0.0);
            for m in 0..set.len() {
                let mut rest = set.clone();
                let a = rest.remove(m);
                let part = self.component(&rest).partial(a)?;
                acc = if m % 2 == 0 { acc + part } else { acc - part };
            }
            out.push(acc);
        }
        Ok(Self { dim, degree: k + 1, comps: out })
    }

    /// Codifferential `δ = −∗d∗` in the coordinate basis.
    pub fn codifferential(&self, ginv: &[Jet], sqrt_det: &Jet) -> Result<Self> {
        if self.degree == 0 {
            return Ok(Self::zero(self.dim, 0));
        }
        let star = self.hodge_star(ginv, sqrt_det);
        let d = star.exterior_derivative()?;
        Ok(d.hodge_star(ginv, sqrt_det).scale(-1.0))
    }
}

/// Embed a 0-form.
pub fn scalar_form<S: Scalar>(dim: usize, v: S) -> KForm<S> {
    KForm::from_fn(dim, 0, |_| v.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn standard_f(n: usize) -> KForm<f64> {
        KForm::from_fn(2 * n, 2, |s| if s[1] == s[0] + n { 1.0 } else { 0.0 })
    }

    #[test]
    fn colex_ranks_match_enumeration() {
        for k in 0..=5 {
            for (i, s) in index_sets(5, k).iter().enumerate() {
                assert_eq!(rank(s), i);
            }
        }
    }

    #[test]
    fn fundamental_form_has_norm_n() {
        for n in 2..=4 {
            assert!((standard_f(n).norm_sq() - n as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn wedge_square_against_full_index_expansion() {
        // Full-index oracle: (a∧b)(X1..X4) = Σ_{σ} sgn(σ)/(2!2!) a(Xσ1,Xσ2) b(Xσ3,Xσ4).
        let f = standard_f(2);
        let f2 = f.wedge(&f);
        let perms = permutations(4);
        let brute = |idx: &[usize]| -> f64 {
            perms.iter().map(|(p, s)| s * f.eval(&[idx[p[0]], idx[p[1]]]) * f.eval(&[idx[p[2]], idx[p[3]]]) / 4.0).sum()
        };
        assert!((f2.component(&[0, 1, 2, 3]) - brute(&[0, 1, 2, 3])).abs() < 1e-15);
        // F∧F = 2 e⁰∧e²∧e¹∧e³: the complex orientation is opposite to the
        // coordinate one when n = 2.
        assert!((f2.component(&[0, 1, 2, 3]) + 2.0).abs() < 1e-15);
        assert!((f2.inner(&f2).unwrap() - 4.0).abs() < 1e-15);
    }

    fn permutations(k: usize) -> Vec<(Vec<usize>, f64)> {
        if k == 0 {
            return vec![(vec![], 1.0)];
        }
        let mut out = Vec::new();
        for (p, s) in permutations(k - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, k - 1);
                let sign = if (p.len() - pos) % 2 == 0 { s } else { -s };
                out.push((q, sign));
            }
        }
        out
    }

    #[test]
    fn hodge_star_squares_to_sign() {
        let dim = 6;
        let id: Vec<f64> = (0..36).map(|i| if i % 7 == 0 { 1.0 } else { 0.0 }).collect();
        for k in 0..=dim {
            let phi = KForm::from_fn(dim, k, |s| s.iter().map(|&i| (i + 1) as f64).sum::<f64>().sin());
            let ss = phi.hodge_star(&id, &1.0).hodge_star(&id, &1.0);
            let sign = if (k * (dim - k)) % 2 == 0 { 1.0 } else { -1.0 };
            assert!(ss.sub(&phi.scale(sign)).max_abs() < 1e-14);
        }
        let one = scalar_form(dim, 1.0);
        let dv = one.hodge_star(&id, &1.0);
        assert_eq!(dv.inner(&dv).unwrap(), 1.0);
    }

    #[test]
    fn degree_mismatch_is_an_error() {
        let a = KForm::<f64>::zero(4, 1);
        let b = KForm::<f64>::zero(4, 2);
        assert!(a.inner(&b).is_err());
        assert_eq!(KForm::<f64>::zero(4, 2).norm_sq(), 0.0);
    }

    #[test]
    fn exterior_derivative_squares_to_zero() {
        let x = Jet::coordinates(&[0.3, -0.2, 0.7, 1.1], 2);
        let phi = KForm::one_form(vec![
            (&x[0] * &x[1]).sin(),
            (&x[2] * &x[3]).exp(),
            &x[0] * &x[0] * &x[3],
            (&x[1] + &x[2]).cos(),
        ]);
        let dd = phi.exterior_derivative().unwrap().exterior_derivative().unwrap();
        assert!(dd.value().max_abs() < 1e-12);
    }

    #[test]
    fn derivation_acts_on_unitary_types() {
        // J0 on R^4: J e_i = e_{n+i}
        let n = 2;
        let mut j = vec![0.0; 16];
        for i in 0..n {
            j[(n + i) * 4 + i] = 1.0;
            j[i * 4 + n + i] = -1.0;
        }
        let f = standard_f(2);
        assert!(f.complex_derivation(&j).max_abs() < 1e-15);
        // J² acts as the identity on even-degree forms
        let phi = KForm::from_fn(4, 2, |s| (s[0] * 3 + s[1]) as f64);
        assert!(phi.j_action(&j).j_action(&j).sub(&phi).max_abs() < 1e-14);
    }
}
