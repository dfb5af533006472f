use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::PointContext;
use crate::error::{GeomError, Result};
use crate::manifold::{Domain, Manifold};
use crate::sampling::{lattice_rule, quasi_random_rule, QuadratureMethod};

/// Prepared quadrature nodes with weights for `dv`.
#[derive(Clone, Debug)]
pub struct Quadrature {
    pub method: QuadratureMethod,
    pub n: usize,
    pub ts: Vec<f64>,
    groups: Vec<Vec<(PointContext, f64)>>,
    /// Largest `| |F^n/n!| / √det h − 1 |` over the nodes.
    pub volume_residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralEstimate {
    pub value: f64,
    /// Standard error over independent replicates; lattice rules have none.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
    pub samples: usize,
    pub method: QuadratureMethod,
}

impl IntegralEstimate {
    pub fn sigma(&self) -> f64 {
        self.std_error.unwrap_or(0.0)
    }
}

impl Quadrature {
    /// Homogeneous box domains use a midpoint lattice, everything else
    /// randomly shifted quasi-random replicates.
    pub fn new(m: &Manifold, samples: usize, seed: u64, ts: &[f64]) -> Result<Self> {
        let d = m.dim();
        let rule = match (&m.domain, m.homogeneous) {
            (Domain::Box { .. }, true) => lattice_rule(&m.domain, d, samples)?,
            _ => quasi_random_rule(&m.domain, d, samples, seed)?,
        };
        let sphere = matches!(m.domain, Domain::Sphere { .. });
        let groups = rule
            .groups
            .par_iter()
            .map(|nodes| {
                nodes
                    .iter()
                    .map(|(x, w)| {
                        let ctx = PointContext::compute(m, x, ts)?;
                        let mut dv = w * ctx.g.sqrt_det;
                        if sphere {
                            let r2: f64 = x.iter().map(|v| v * v).sum();
                            dv /= (2.0 / (1.0 + r2)).powi(d as i32);
                        }
                        Ok((ctx, dv))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let volume_residual =
            groups.iter().flatten().map(|(c, _)| (c.g.volume_ratio.abs() - 1.0).abs()).fold(0.0, f64::max);
        Ok(Self { method: rule.method, n: m.n, ts: ts.to_vec(), groups, volume_residual })
    }

    pub fn samples(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    pub fn contexts(&self) -> impl Iterator<Item = &PointContext> {
        self.groups.iter().flatten().map(|(c, _)| c)
    }

    /// `∫ f dv`.
    pub fn integrate(&self, f: impl Fn(&PointContext) -> Result<f64> + Sync) -> Result<IntegralEstimate> {
        let means = self
            .groups
            .iter()
            .map(|g| g.iter().map(|(c, w)| Ok(w * f(c)?)).sum::<Result<f64>>())
            .collect::<Result<Vec<f64>>>()?;
        let k = means.len() as f64;
        let value = means.iter().sum::<f64>() / k;
        let std_error = (means.len() > 1).then(|| {
            let var = means.iter().map(|m| (m - value).powi(2)).sum::<f64>() / (k - 1.0);
            (var / k).sqrt()
        });
        Ok(IntegralEstimate { value, std_error, samples: self.samples(), method: self.method })
    }
}

/// Base integrand names; `:t=` and `:k=` suffixes select parameters.
pub const INTEGRAND_NAMES: &[&str] = &[
    "volume",
    "s",
    "s-j",
    "s1:t=T",
    "s2:t=T",
    "twice-s1-minus-s:t=T",
    "s1-minus-s2:t=T",
    "s-minus-s-j",
    "bismut-difference",
    "kgauduchon:k=K",
    "delta-lee",
    "df",
    "df-minus",
    "df-plus",
    "df-plus-primitive",
    "nabla-f",
    "lee",
    "nijenhuis",
    "n0",
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NamedIntegrand {
    Volume,
    S,
    SJ,
    S1(f64),
    S2(f64),
    TwiceS1MinusS(f64),
    S1MinusS2(f64),
    SMinusSJ,
    BismutDifference,
    KGauduchon(usize),
    DeltaLee,
    Df,
    DfMinus,
    DfPlus,
    DfPlusPrimitive,
    NablaF,
    Lee,
    Nijenhuis,
    N0,
}

fn parse_param<T: std::str::FromStr>(name: &str, rest: Option<&str>, key: &str) -> Result<T> {
    let bad = || GeomError::Domain(format!("integrand {name} needs a {key}= suffix"));
    let v = rest.and_then(|r| r.strip_prefix(key)).and_then(|r| r.strip_prefix('=')).ok_or_else(bad)?;
    v.parse().map_err(|_| GeomError::Domain(format!("cannot parse {key} in integrand {name}")))
}

/// Parse `name` or `name:t=0.5` / `kgauduchon:k=2`.
pub fn named_integrand(name: &str) -> Result<NamedIntegrand> {
    use NamedIntegrand as I;
    let (base, rest) = match name.split_once(':') {
        Some((b, r)) => (b, Some(r)),
        None => (name, None),
    };
    let t = || parse_param::<f64>(name, rest, "t");
    let plain = |i: I| match rest {
        None => Ok(i),
        Some(_) => Err(GeomError::Domain(format!("integrand {base} takes no parameter"))),
    };
    match base {
        "volume" => plain(I::Volume),
        "s" => plain(I::S),
        "s-j" => plain(I::SJ),
        "s1" => Ok(I::S1(t()?)),
        "s2" => Ok(I::S2(t()?)),
        "twice-s1-minus-s" => Ok(I::TwiceS1MinusS(t()?)),
        "s1-minus-s2" => Ok(I::S1MinusS2(t()?)),
        "s-minus-s-j" => plain(I::SMinusSJ),
        "bismut-difference" => plain(I::BismutDifference),
        "kgauduchon" => Ok(I::KGauduchon(parse_param(name, rest, "k")?)),
        "delta-lee" => plain(I::DeltaLee),
        "df" => plain(I::Df),
        "df-minus" => plain(I::DfMinus),
        "df-plus" => plain(I::DfPlus),
        "df-plus-primitive" => plain(I::DfPlusPrimitive),
        "nabla-f" => plain(I::NablaF),
        "lee" => plain(I::Lee),
        "nijenhuis" => plain(I::Nijenhuis),
        "n0" => plain(I::N0),
        _ => Err(GeomError::Domain(format!("unknown integrand {name}; known: {}", INTEGRAND_NAMES.join(", ")))),
    }
}

impl NamedIntegrand {
    /// The connection parameter the integrand needs prepared, if any.
    pub fn t(&self) -> Option<f64> {
        use NamedIntegrand as I;
        match *self {
            I::S1(t) | I::S2(t) | I::TwiceS1MinusS(t) | I::S1MinusS2(t) => Some(t),
            I::BismutDifference => Some(-1.0),
            _ => None,
        }
    }

    pub fn eval(&self, c: &PointContext) -> Result<f64> {
        use NamedIntegrand as I;
        let nb = c.norms();
        Ok(match *self {
            I::Volume => 1.0,
            I::S => c.g.s,
            I::SJ => c.g.s_j,
            I::S1(t) => c.level(t)?.s1,
            I::S2(t) => c.level(t)?.s2,
            I::TwiceS1MinusS(t) => 2.0 * c.level(t)?.s1 - c.g.s,
            I::S1MinusS2(t) => {
                let l = c.level(t)?;
                l.s1 - l.s2
            }
            I::SMinusSJ => c.g.s - c.g.s_j,
            I::BismutDifference => {
                let l = c.level(-1.0)?;
                l.s1 - l.s2
            }
            I::KGauduchon(k) => c.g.kgauduchon_density(k)?,
            I::DeltaLee => nb.delta_lee,
            I::Df => nb.df,
            I::DfMinus => nb.df_minus,
            I::DfPlus => nb.df_plus,
            I::DfPlusPrimitive => nb.df_plus_primitive,
            I::NablaF => nb.nabla_f,
            I::Lee => nb.lee,
            I::Nijenhuis => nb.nijenhuis,
            I::N0 => nb.n0,
        })
    }
}

pub fn integrate_named(q: &Quadrature, name: &str) -> Result<IntegralEstimate> {
    let f = named_integrand(name)?;
    q.integrate(|c| f.eval(c))
}
