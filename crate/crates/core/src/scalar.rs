//! Scalar abstraction shared by real values, complex values and jets, plus
//! small dense linear algebra over it.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{GeomError, Result};
use crate::jet::Jet;

pub trait Scalar:
    Clone + Debug + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn zero() -> Self;
    fn from_f64(v: f64) -> Self;
    /// Magnitude of the point value, used for pivoting and residuals.
    fn magnitude(&self) -> f64;
    fn checked_div(&self, other: &Self) -> Result<Self>;

    fn scale(&self, s: f64) -> Self {
        self.clone() * Self::from_f64(s)
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn checked_div(&self, other: &Self) -> Result<Self> {
        if *other == 0.0 {
            return Err(GeomError::DegenerateValue("division by zero".into()));
        }
        Ok(self / other)
    }
    fn scale(&self, s: f64) -> Self {
        self * s
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn from_f64(v: f64) -> Self {
        Complex64::new(v, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn checked_div(&self, other: &Self) -> Result<Self> {
        if other.norm() == 0.0 {
            return Err(GeomError::DegenerateValue("division by zero".into()));
        }
        Ok(self / other)
    }
    fn scale(&self, s: f64) -> Self {
        self * s
    }
}

impl Scalar for Jet {
    fn zero() -> Self {
        Jet::constant(0.0)
    }
    fn from_f64(v: f64) -> Self {
        Jet::constant(v)
    }
    fn magnitude(&self) -> f64 {
        self.value().abs()
    }
    fn checked_div(&self, other: &Self) -> Result<Self> {
        Jet::checked_div(self, other)
    }
    fn scale(&self, s: f64) -> Self {
        self * s
    }
}

/// Row-major square matrix helpers.
pub fn mat_mul<S: Scalar>(a: &[S], b: &[S], n: usize) -> Vec<S> {
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = S::zero();
            for k in 0..n {
                acc = acc + a[i * n + k].clone() * b[k * n + j].clone();
            }
            out.push(acc);
        }
    }
    out
}

pub fn transpose<S: Clone>(a: &[S], n: usize) -> Vec<S> {
    (0..n * n).map(|ij| a[(ij % n) * n + ij / n].clone()).collect()
}

/// LU factorisation with partial pivoting on point values.
struct Lu<S> {
    n: usize,
    lu: Vec<S>,
    perm: Vec<usize>,
    sign: f64,
}

fn lu<S: Scalar>(m: &[S], n: usize) -> Result<Lu<S>> {
    let mut a = m.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sign = 1.0;
    let scale = m.iter().map(|v| v.magnitude()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    for k in 0..n {
        let (p, pmag) =
            (k..n)
                .map(|i| (i, a[i * n + k].magnitude()))
                .fold((k, -1.0), |best, c| if c.1 > best.1 { c } else { best });
        if pmag <= 1e-14 * scale {
            return Err(GeomError::DegenerateValue("singular matrix".into()));
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            perm.swap(k, p);
            sign = -sign;
        }
        let pivot = a[k * n + k].clone();
        for i in (k + 1)..n {
            let f = a[i * n + k].checked_div(&pivot)?;
            for j in (k + 1)..n {
                a[i * n + j] = a[i * n + j].clone() - f.clone() * a[k * n + j].clone();
            }
            a[i * n + k] = f;
        }
    }
    Ok(Lu { n, lu: a, perm, sign })
}

pub fn determinant<S: Scalar>(m: &[S], n: usize) -> Result<S> {
    if n == 0 {
        return Ok(S::from_f64(1.0));
    }
    match n {
        1 => return Ok(m[0].clone()),
        2 => return Ok(m[0].clone() * m[3].clone() - m[1].clone() * m[2].clone()),
        _ => {}
    }
    let f = match lu(m, n) {
        Ok(f) => f,
        Err(GeomError::DegenerateValue(_)) => return Ok(S::zero()),
        Err(e) => return Err(e),
    };
    let mut d = S::from_f64(f.sign);
    for k in 0..n {
        d = d * f.lu[k * n + k].clone();
    }
    Ok(d)
}

pub fn inverse<S: Scalar>(m: &[S], n: usize) -> Result<Vec<S>> {
    let f = lu(m, n)?;
    let mut inv = vec![S::zero(); n * n];
    for col in 0..n {
        // solve L U x = P e_col
        let mut y: Vec<S> = (0..n).map(|i| S::from_f64(if f.perm[i] == col { 1.0 } else { 0.0 })).collect();
        for i in 0..n {
            for k in 0..i {
                y[i] = y[i].clone() - f.lu[i * f.n + k].clone() * y[k].clone();
            }
        }
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                y[i] = y[i].clone() - f.lu[i * n + k].clone() * y[k].clone();
            }
            y[i] = y[i].checked_div(&f.lu[i * n + i])?;
        }
        for i in 0..n {
            inv[i * n + col] = y[i].clone();
        }
    }
    Ok(inv)
}
