//! Truncated Taylor jets over chart coordinates.
//!
//! A [`Jet`] carries a scalar value together with all partial derivatives up
//! to a declared order (at most three) at a single chart point. Arithmetic
//! and elementary functions propagate derivatives exactly (Leibniz and Faà di
//! Bruno rules), so curvature built from metric jets contains no truncation
//! error. Derivative storage is dense: `grad[a]`, `hess[a*d+b]`,
//! `third[(a*d+b)*d+c]`.
//!
//! Constants are stored without derivative slots (`dim == 0`) and combine
//! with jets of any dimension.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{GeomError, Result};

pub const MAX_ORDER: u8 = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    value: f64,
    dim: usize,
    order: u8,
    grad: Vec<f64>,
    hess: Vec<f64>,
    third: Vec<f64>,
}

/// A point in a chart.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ChartPoint {
    pub coords: Vec<f64>,
    pub chart_id: String,
}

impl ChartPoint {
    pub fn new(coords: Vec<f64>) -> Self {
        Self { coords, chart_id: "main".to_string() }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// Value and first three derivatives of a univariate function at a point.
#[derive(Clone, Copy, Debug)]
struct Taylor1 {
    f0: f64,
    f1: f64,
    f2: f64,
    f3: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum UnaryFn {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    /// Real power with a constant exponent.
    PowConst(f64),
}

impl Jet {
    pub fn constant(value: f64) -> Self {
        Self { value, dim: 0, order: MAX_ORDER, grad: Vec::new(), hess: Vec::new(), third: Vec::new() }
    }

    /// The coordinate function `x_index` evaluated at `value`.
    pub fn variable(value: f64, index: usize, dim: usize, order: u8) -> Self {
        assert!(index < dim, "coordinate index {index} out of range for dim {dim}");
        let order = order.min(MAX_ORDER);
        let mut j = Self::zeros(dim, order);
        j.value = value;
        if order >= 1 {
            j.grad[index] = 1.0;
        }
        j
    }

    /// Coordinate jets for every chart coordinate of `x`.
    pub fn coordinates(x: &[f64], order: u8) -> Vec<Jet> {
        (0..x.len()).map(|a| Jet::variable(x[a], a, x.len(), order)).collect()
    }

    /// Zero jet with allocated derivative slots.
    pub fn zeros(dim: usize, order: u8) -> Self {
        let order = order.min(MAX_ORDER);
        Self {
            value: 0.0,
            dim,
            order,
            grad: if order >= 1 { vec![0.0; dim] } else { Vec::new() },
            hess: if order >= 2 { vec![0.0; dim * dim] } else { Vec::new() },
            third: if order >= 3 { vec![0.0; dim * dim * dim] } else { Vec::new() },
        }
    }

    /// Build a jet from explicit dense derivative arrays; the order is the
    /// number of non-empty arrays.
    pub fn from_parts(value: f64, dim: usize, grad: Vec<f64>, hess: Vec<f64>, third: Vec<f64>) -> Self {
        let order = [!grad.is_empty(), !hess.is_empty(), !third.is_empty()].iter().take_while(|b| **b).count() as u8;
        assert!(grad.is_empty() || grad.len() == dim);
        assert!(hess.is_empty() || hess.len() == dim * dim);
        assert!(third.is_empty() || third.len() == dim * dim * dim);
        Self { value, dim, order, grad, hess, third }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> u8 {
        self.order
    }

    pub fn is_constant(&self) -> bool {
        self.dim == 0
    }

    pub fn d1(&self, a: usize) -> f64 {
        if self.dim == 0 {
            0.0
        } else {
            self.grad[a]
        }
    }

    pub fn d2(&self, a: usize, b: usize) -> f64 {
        if self.dim == 0 {
            0.0
        } else {
            self.hess[a * self.dim + b]
        }
    }

    pub fn d3(&self, a: usize, b: usize, c: usize) -> f64 {
        if self.dim == 0 {
            0.0
        } else {
            self.third[(a * self.dim + b) * self.dim + c]
        }
    }

    pub fn grad(&self) -> &[f64] {
        &self.grad
    }

    pub fn hess(&self) -> &[f64] {
        &self.hess
    }

    pub fn third(&self) -> &[f64] {
        &self.third
    }

    /// Drop derivative slots above `order`.
    pub fn truncate(&self, order: u8) -> Jet {
        if order >= self.order {
            return self.clone();
        }
        let mut j = self.clone();
        j.order = order;
        if order < 3 {
            j.third = Vec::new();
        }
        if order < 2 {
            j.hess = Vec::new();
        }
        if order < 1 {
            j.grad = Vec::new();
        }
        j
    }

    /// Partial derivative along coordinate `a`; the result has one order less.
    pub fn partial(&self, a: usize) -> Result<Jet> {
        if self.dim == 0 {
            return Ok(Jet::constant(0.0));
        }
        if self.order == 0 {
            return Err(GeomError::Order { needed: 1, have: 0 });
        }
        let d = self.dim;
        let order = self.order - 1;
        let grad = if order >= 1 { self.hess[a * d..(a + 1) * d].to_vec() } else { Vec::new() };
        let hess = if order >= 2 { self.third[a * d * d..(a + 1) * d * d].to_vec() } else { Vec::new() };
        Ok(Jet { value: self.grad[a], dim: d, order, grad, hess, third: Vec::new() })
    }

    fn shape(a: &Jet, b: &Jet) -> (usize, u8) {
        match (a.dim, b.dim) {
            (0, _) => (b.dim, b.order.min(a.order)),
            (_, 0) => (a.dim, a.order.min(b.order)),
            (x, y) => {
                assert_eq!(x, y, "jet dimension mismatch");
                (x, a.order.min(b.order))
            }
        }
    }

    fn scaled(&self, s: f64, order: u8) -> Jet {
        let t = self.truncate(order);
        Jet {
            value: t.value * s,
            dim: t.dim,
            order: t.order,
            grad: t.grad.iter().map(|v| v * s).collect(),
            hess: t.hess.iter().map(|v| v * s).collect(),
            third: t.third.iter().map(|v| v * s).collect(),
        }
    }

    fn add_signed(&self, other: &Jet, sign: f64) -> Jet {
        let (dim, order) = Self::shape(self, other);
        if other.dim == 0 {
            let mut r = self.truncate(order);
            r.value += sign * other.value;
            return r;
        }
        if self.dim == 0 {
            let mut r = other.scaled(sign, order);
            r.value += self.value;
            return r;
        }
        let mut r = Jet::zeros(dim, order);
        r.value = self.value + sign * other.value;
        for (o, (x, y)) in r.grad.iter_mut().zip(self.grad.iter().zip(&other.grad)) {
            *o = x + sign * y;
        }
        for (o, (x, y)) in r.hess.iter_mut().zip(self.hess.iter().zip(&other.hess)) {
            *o = x + sign * y;
        }
        for (o, (x, y)) in r.third.iter_mut().zip(self.third.iter().zip(&other.third)) {
            *o = x + sign * y;
        }
        r
    }

    fn product(&self, other: &Jet) -> Jet {
        let (d, order) = Self::shape(self, other);
        if other.dim == 0 {
            return self.scaled(other.value, order);
        }
        if self.dim == 0 {
            return other.scaled(self.value, order);
        }
        let (av, bv) = (self.value, other.value);
        let mut r = Jet::zeros(d, order);
        r.value = av * bv;
        if order >= 1 {
            let (ag, bg) = (&self.grad, &other.grad);
            for i in 0..d {
                r.grad[i] = ag[i] * bv + av * bg[i];
            }
            if order >= 2 {
                let (ah, bh) = (&self.hess, &other.hess);
                for i in 0..d {
                    for j in 0..d {
                        let ij = i * d + j;
                        r.hess[ij] = ah[ij] * bv + ag[i] * bg[j] + ag[j] * bg[i] + av * bh[ij];
                    }
                }
                if order >= 3 {
                    let (at, bt) = (&self.third, &other.third);
                    for i in 0..d {
                        for j in 0..d {
                            for k in 0..d {
                                let ijk = (i * d + j) * d + k;
                                r.third[ijk] = at[ijk] * bv
                                    + av * bt[ijk]
                                    + ah[i * d + j] * bg[k]
                                    + ah[i * d + k] * bg[j]
                                    + ah[j * d + k] * bg[i]
                                    + ag[i] * bh[j * d + k]
                                    + ag[j] * bh[i * d + k]
                                    + ag[k] * bh[i * d + j];
                            }
                        }
                    }
                }
            }
        }
        r
    }

    fn compose(&self, f: Taylor1) -> Jet {
        if self.dim == 0 {
            return Jet::constant(f.f0);
        }
        let d = self.dim;
        let mut r = Jet::zeros(d, self.order);
        r.value = f.f0;
        if self.order >= 1 {
            let g = &self.grad;
            for i in 0..d {
                r.grad[i] = f.f1 * g[i];
            }
            if self.order >= 2 {
                let h = &self.hess;
                for i in 0..d {
                    for j in 0..d {
                        r.hess[i * d + j] = f.f1 * h[i * d + j] + f.f2 * g[i] * g[j];
                    }
                }
                if self.order >= 3 {
                    let t = &self.third;
                    for i in 0..d {
                        for j in 0..d {
                            for k in 0..d {
                                let ijk = (i * d + j) * d + k;
                                r.third[ijk] = f.f1 * t[ijk]
                                    + f.f2 * (h[i * d + j] * g[k] + h[i * d + k] * g[j] + h[j * d + k] * g[i])
                                    + f.f3 * g[i] * g[j] * g[k];
                            }
                        }
                    }
                }
            }
        }
        r
    }

    pub fn recip(&self) -> Result<Jet> {
        let v = self.value;
        if v == 0.0 || !v.is_finite() {
            return Err(GeomError::DegenerateValue(format!("reciprocal of {v}")));
        }
        let r = 1.0 / v;
        Ok(self.compose(Taylor1 { f0: r, f1: -r * r, f2: 2.0 * r * r * r, f3: -6.0 * r * r * r * r }))
    }

    pub fn checked_div(&self, other: &Jet) -> Result<Jet> {
        Ok(self.product(&other.recip()?))
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = self.value.sin_cos();
        self.compose(Taylor1 { f0: s, f1: c, f2: -s, f3: -c })
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = self.value.sin_cos();
        self.compose(Taylor1 { f0: c, f1: -s, f2: -c, f3: s })
    }

    pub fn exp(&self) -> Jet {
        let e = self.value.exp();
        self.compose(Taylor1 { f0: e, f1: e, f2: e, f3: e })
    }

    pub fn ln(&self) -> Result<Jet> {
        let v = self.value;
        if v <= 0.0 || !v.is_finite() {
            return Err(GeomError::DegenerateValue(format!("log of {v}")));
        }
        let r = 1.0 / v;
        Ok(self.compose(Taylor1 { f0: v.ln(), f1: r, f2: -r * r, f3: 2.0 * r * r * r }))
    }

    pub fn sqrt(&self) -> Result<Jet> {
        let v = self.value;
        if v <= 0.0 || !v.is_finite() {
            if v == 0.0 && self.dim == 0 {
                return Ok(Jet::constant(0.0));
            }
            return Err(GeomError::DegenerateValue(format!("sqrt of {v}")));
        }
        let s = v.sqrt();
        Ok(self.compose(Taylor1 { f0: s, f1: 0.5 / s, f2: -0.25 / (s * v), f3: 0.375 / (s * v * v) }))
    }

    /// `self^p` for a constant real exponent. Integer exponents accept any
    /// base (nonzero when negative); other exponents need a positive base.
    pub fn powf(&self, p: f64) -> Result<Jet> {
        let v = self.value;
        let integral = p.fract() == 0.0 && p.abs() < 1e9;
        if integral {
            let k = p as i32;
            if k == 0 {
                return Ok(self.compose(Taylor1 { f0: 1.0, f1: 0.0, f2: 0.0, f3: 0.0 }));
            }
            if k < 0 && v == 0.0 {
                return Err(GeomError::DegenerateValue(format!("0 raised to {k}")));
            }
            let pw = |e: i32| if e < 0 && k >= 0 { 0.0 } else { v.powi(e) };
            let kf = k as f64;
            let f0 = v.powi(k);
            let f1 = kf * pw(k - 1);
            let f2 = kf * (kf - 1.0) * if k >= 2 || k < 0 { v.powi(k - 2) } else { 0.0 };
            let f3 = kf * (kf - 1.0) * (kf - 2.0) * if k >= 3 || k < 0 { v.powi(k - 3) } else { 0.0 };
            return Ok(self.compose(Taylor1 { f0, f1, f2, f3 }));
        }
        if v <= 0.0 || !v.is_finite() {
            return Err(GeomError::DegenerateValue(format!("{v} raised to non-integer power {p}")));
        }
        Ok(self.compose(Taylor1 {
            f0: v.powf(p),
            f1: p * v.powf(p - 1.0),
            f2: p * (p - 1.0) * v.powf(p - 2.0),
            f3: p * (p - 1.0) * (p - 2.0) * v.powf(p - 3.0),
        }))
    }

    pub fn apply(&self, f: UnaryFn) -> Result<Jet> {
        match f {
            UnaryFn::Sin => Ok(self.sin()),
            UnaryFn::Cos => Ok(self.cos()),
            UnaryFn::Exp => Ok(self.exp()),
            UnaryFn::Log => self.ln(),
            UnaryFn::Sqrt => self.sqrt(),
            UnaryFn::PowConst(p) => self.powf(p),
        }
    }

    /// Largest absolute deviation across all stored slots, compared up to
    /// the smaller of the two orders.
    pub fn max_abs_diff(&self, other: &Jet) -> f64 {
        let diff = self - other;
        let mut m = diff.value.abs();
        for v in diff.grad.iter().chain(&diff.hess).chain(&diff.third) {
            m = m.max(v.abs());
        }
        m
    }
}

/// Checked binary arithmetic on jets.
pub fn jet_arith(a: &Jet, b: &Jet, op: ArithOp) -> Result<Jet> {
    match op {
        ArithOp::Add => Ok(a + b),
        ArithOp::Sub => Ok(a - b),
        ArithOp::Mul => Ok(a * b),
        ArithOp::Div => a.checked_div(b),
    }
}

pub fn jet_func(a: &Jet, f: UnaryFn) -> Result<Jet> {
    a.apply(f)
}

macro_rules! jet_binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&Jet> for &Jet {
            type Output = Jet;
            fn $m(self, rhs: &Jet) -> Jet {
                let f: fn(&Jet, &Jet) -> Jet = $body;
                f(self, rhs)
            }
        }
        impl $tr<Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: &Jet) -> Jet {
                (&self).$m(rhs)
            }
        }
        impl $tr<Jet> for &Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                self.$m(&rhs)
            }
        }
        impl $tr<f64> for Jet {
            type Output = Jet;
            fn $m(self, rhs: f64) -> Jet {
                (&self).$m(&Jet::constant(rhs))
            }
        }
        impl $tr<f64> for &Jet {
            type Output = Jet;
            fn $m(self, rhs: f64) -> Jet {
                self.$m(&Jet::constant(rhs))
            }
        }
    };
}

jet_binop!(Add, add, |a, b| a.add_signed(b, 1.0));
jet_binop!(Sub, sub, |a, b| a.add_signed(b, -1.0));
jet_binop!(Mul, mul, |a, b| a.product(b));
// Unchecked division follows f64 semantics on a zero divisor; use
// `checked_div` where the error must surface.
jet_binop!(Div, div, |a, b| match b.recip() {
    Ok(r) => a.product(&r),
    Err(_) => a.scaled(f64::NAN, a.order.min(b.order)),
});

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        let o = self.order;
        self.scaled(-1.0, o)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scaled(-1.0, self.order)
    }
}

impl From<f64> for Jet {
    fn from(v: f64) -> Self {
        Jet::constant(v)
    }
}

/// Central-difference estimate of a scalar field's derivatives.
#[derive(Clone, Debug)]
pub struct FdEstimate {
    pub value: f64,
    pub grad: Vec<f64>,
    pub hess: Vec<f64>,
    pub third: Vec<f64>,
}

pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// Finite-difference oracle: central differences for gradient and Hessian
/// (O(h²)), and central differences of the Hessian stencil for third
/// derivatives. `in_domain` rejects stencils leaving the chart.
pub fn fd_oracle<F>(field: F, p: &ChartPoint, h: f64, in_domain: &dyn Fn(&[f64]) -> bool) -> Result<FdEstimate>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    if h <= 0.0 || !h.is_finite() {
        return Err(GeomError::Domain(format!("finite-difference step must be positive, got {h}")));
    }
    let d = p.dim();
    let x0 = &p.coords;
    let eval = |shift: &[(usize, f64)]| -> Result<f64> {
        let mut x = x0.clone();
        for &(a, s) in shift {
            x[a] += s;
        }
        if !in_domain(&x) {
            return Err(GeomError::Domain(format!("stencil point {x:?} leaves the chart domain")));
        }
        field(&x)
    };
    let hess_at = |base: &[(usize, f64)]| -> Result<Vec<f64>> {
        let f0 = eval(base)?;
        let mut hs = vec![0.0; d * d];
        for i in 0..d {
            let mut s = base.to_vec();
            s.push((i, h));
            let fp = eval(&s)?;
            s.pop();
            s.push((i, -h));
            let fm = eval(&s)?;
            hs[i * d + i] = (fp - 2.0 * f0 + fm) / (h * h);
            for j in (i + 1)..d {
                let q = |si: f64, sj: f64| {
                    let mut s = base.to_vec();
                    s.push((i, si * h));
                    s.push((j, sj * h));
                    eval(&s)
                };
                let v = (q(1.0, 1.0)? - q(1.0, -1.0)? - q(-1.0, 1.0)? + q(-1.0, -1.0)?) / (4.0 * h * h);
                hs[i * d + j] = v;
                hs[j * d + i] = v;
            }
        }
        Ok(hs)
    };
    let value = eval(&[])?;
    let mut grad = vec![0.0; d];
    for (a, g) in grad.iter_mut().enumerate() {
        *g = (eval(&[(a, h)])? - eval(&[(a, -h)])?) / (2.0 * h);
    }
    let hess = hess_at(&[])?;
    let mut third = vec![0.0; d * d * d];
    for k in 0..d {
        let hp = hess_at(&[(k, h)])?;
        let hm = hess_at(&[(k, -h)])?;
        for ij in 0..d * d {
            third[ij * d + k] = (hp[ij] - hm[ij]) / (2.0 * h);
        }
    }
    Ok(FdEstimate { value, grad, hess, third })
}
