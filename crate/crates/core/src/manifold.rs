//! Almost Hermitian manifolds given by closed-form `(h, J)` over a chart,
//! with a fundamental domain, and the JSON spec format for user manifolds.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::expr::{parse, Expr};
use crate::hermitian::GrayHervella;
use crate::jet::Jet;

/// Metric and almost complex structure jets at a point; `j[c*d+a]` is the
/// `c`-component of `J∂_a`.
#[derive(Clone, Debug)]
pub struct Fields {
    pub h: Vec<Jet>,
    pub j: Vec<Jet>,
}

pub type FieldFn = dyn Fn(&[f64], u8) -> Result<Fields> + Send + Sync;

#[derive(Clone)]
pub enum Source {
    Expr { metric: Vec<Expr>, j: Vec<Expr> },
    Closure(Arc<FieldFn>),
}

impl fmt::Debug for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Expr { .. } => write!(f, "Source::Expr"),
            Source::Closure(_) => write!(f, "Source::Closure"),
        }
    }
}

/// Fundamental domain used for sampling and quadrature.
#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    /// Coordinate box; periodic axes place no restriction on the chart.
    Box { lo: Vec<f64>, hi: Vec<f64>, periodic: Vec<bool> },
    /// `inner ≤ |x| < outer` on `ℝ^{2n}∖{0}`, identified radially.
    Annulus { inner: f64, outer: f64 },
    /// Stereographic chart of the unit sphere, sampled up to `|x| ≤ max_radius`.
    Sphere { max_radius: f64 },
}

impl Domain {
    /// Whether `x` lies in the chart on which the fields are defined.
    pub fn chart_contains(&self, x: &[f64]) -> bool {
        match self {
            Domain::Box { lo, hi, periodic } => {
                x.iter().enumerate().all(|(i, v)| v.is_finite() && (periodic[i] || (lo[i] <= *v && *v <= hi[i])))
            }
            Domain::Annulus { .. } => x.iter().map(|v| v * v).sum::<f64>() > 0.0,
            Domain::Sphere { .. } => x.iter().all(|v| v.is_finite()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Manifold {
    pub name: String,
    pub n: usize,
    pub source: Source,
    pub domain: Domain,
    pub expected_class: Option<GrayHervella>,
    /// Isometries act transitively on the fundamental domain, so every
    /// scalar invariant is constant.
    pub homogeneous: bool,
}

impl Manifold {
    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn exportable(&self) -> bool {
        matches!(self.source, Source::Expr { .. })
    }

    /// Jets of `h` and `J` of the requested order at `x`.
    pub fn fields(&self, x: &[f64], order: u8) -> Result<Fields> {
        let d = self.dim();
        if x.len() != d {
            return Err(GeomError::Chart(format!("point has {} coordinates, chart has {d}", x.len())));
        }
        if !self.domain.chart_contains(x) {
            return Err(GeomError::Chart(format!("point {x:?} outside the chart")));
        }
        match &self.source {
            Source::Expr { metric, j } => {
                let coords = Jet::coordinates(x, order);
                let h = metric.iter().map(|e| e.eval_jets(&coords)).collect::<Result<Vec<_>>>()?;
                let j = j.iter().map(|e| e.eval_jets(&coords)).collect::<Result<Vec<_>>>()?;
                Ok(Fields { h, j })
            }
            Source::Closure(f) => f(x, order),
        }
    }

    /// Build from a parsed JSON spec.
    pub fn from_spec(spec: &ManifoldSpec) -> Result<Self> {
        let d = spec.dim;
        if d < 4 || d % 2 != 0 {
            return Err(GeomError::Spec(format!("dim must be even and at least 4, got {d}")));
        }
        let matrix = |rows: &[Vec<String>], what: &str| -> Result<Vec<Expr>> {
            if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                return Err(GeomError::Spec(format!("{what} must be a full {d}x{d} matrix")));
            }
            let mut out = Vec::with_capacity(d * d);
            for (r, row) in rows.iter().enumerate() {
                for (c, src) in row.iter().enumerate() {
                    out.push(parse(src, d).map_err(|e| GeomError::Spec(format!("{what}[{r}][{c}]: {e}")))?);
                }
            }
            Ok(out)
        };
        let metric = matrix(&spec.metric, "metric")?;
        let j = matrix(&spec.j, "J")?;
        let domain = spec.domain.to_domain(d)?;
        let expected_class = match &spec.expected_class {
            Some(s) => Some(s.parse().map_err(GeomError::Spec)?),
            None => None,
        };
        Ok(Manifold {
            name: spec.name.clone().unwrap_or_else(|| "user".into()),
            n: d / 2,
            source: Source::Expr { metric, j },
            domain,
            expected_class,
            homogeneous: false,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ManifoldSpec = serde_json::from_str(text).map_err(|e| GeomError::Spec(e.to_string()))?;
        Self::from_spec(&spec)
    }

    /// Export as a JSON spec; fails for closure-defined manifolds.
    pub fn to_spec(&self) -> Result<ManifoldSpec> {
        let Source::Expr { metric, j } = &self.source else {
            return Err(GeomError::Spec(format!("{} is not defined by closed-form expressions", self.name)));
        };
        let d = self.dim();
        let rows = |m: &[Expr]| (0..d).map(|r| (0..d).map(|c| m[r * d + c].to_string()).collect()).collect();
        let domain = match &self.domain {
            Domain::Box { lo, hi, periodic } => DomainSpec {
                periodic: Some(periodic.clone()),
                r#box: Some(lo.iter().zip(hi).map(|(a, b)| [*a, *b]).collect()),
                annulus: None,
            },
            Domain::Annulus { inner, outer } => {
                DomainSpec { periodic: None, r#box: None, annulus: Some(AnnulusSpec { inner: *inner, outer: *outer }) }
            }
            Domain::Sphere { .. } => return Err(GeomError::Spec("sphere charts are not exportable".into())),
        };
        Ok(ManifoldSpec {
            name: Some(self.name.clone()),
            dim: d,
            metric: rows(metric),
            j: rows(j),
            domain,
            expected_class: self.expected_class.map(|c| c.to_string()),
        })
    }
}

/// JSON manifold spec.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub dim: usize,
    pub metric: Vec<Vec<String>>,
    #[serde(rename = "J")]
    pub j: Vec<Vec<String>>,
    pub domain: DomainSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_class: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub periodic: Option<Vec<bool>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r#box: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annulus: Option<AnnulusSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnulusSpec {
    pub inner: f64,
    pub outer: f64,
}

impl DomainSpec {
    fn to_domain(&self, d: usize) -> Result<Domain> {
        match (&self.r#box, &self.annulus) {
            (Some(b), None) => {
                if b.len() != d {
                    return Err(GeomError::Spec(format!("box needs {d} intervals, got {}", b.len())));
                }
                if b.iter().any(|[lo, hi]| !(lo < hi) || !lo.is_finite() || !hi.is_finite()) {
                    return Err(GeomError::Spec("box intervals must satisfy lo < hi".into()));
                }
                let periodic = self.periodic.clone().unwrap_or_else(|| vec![false; d]);
                if periodic.len() != d {
                    return Err(GeomError::Spec(format!("periodic needs {d} flags, got {}", periodic.len())));
                }
                Ok(Domain::Box { lo: b.iter().map(|p| p[0]).collect(), hi: b.iter().map(|p| p[1]).collect(), periodic })
            }
            (None, Some(a)) => {
                if !(0.0 < a.inner && a.inner < a.outer && a.outer.is_finite()) {
                    return Err(GeomError::Spec("annulus needs 0 < inner < outer".into()));
                }
                if self.periodic.is_some() {
                    return Err(GeomError::Spec("periodic flags apply only to a box".into()));
                }
                Ok(Domain::Annulus { inner: a.inner, outer: a.outer })
            }
            _ => Err(GeomError::Spec("domain needs exactly one of `box` or `annulus`".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FLAT: &str = r#"{
        "dim": 4,
        "metric": [["1","0","0","0"],["0","1","0","0"],["0","0","1","0"],["0","0","0","1"]],
        "J": [["0","0","-1","0"],["0","0","0","-1"],["1","0","0","0"],["0","1","0","0"]],
        "domain": {"periodic": [true,true,true,true], "box": [[0,1],[0,1],[0,1],[0,1]]},
        "expected_class": "K"
    }"#;

    #[test]
    fn spec_round_trip() {
        let m = Manifold::from_json(FLAT).unwrap();
        assert_eq!(m.n, 2);
        let spec = m.to_spec().unwrap();
        let again = Manifold::from_spec(&spec).unwrap();
        assert_eq!(again.to_spec().unwrap(), spec);
        let f = m.fields(&[0.1, 0.2, 0.3, 0.4], 2).unwrap();
        assert_eq!(f.j[2 * 4].value(), 1.0);
    }

    #[test]
    fn malformed_specs_are_rejected() {
        let bad_dim = FLAT.replace("\"dim\": 4", "\"dim\": 3");
        assert!(matches!(Manifold::from_json(&bad_dim), Err(GeomError::Spec(_))));
        let bad_expr = FLAT.replacen("\"1\"", "\"x9\"", 1);
        let err = Manifold::from_json(&bad_expr).unwrap_err();
        assert!(err.to_string().contains("metric[0][0]"), "{err}");
        let no_domain = FLAT.replace(r#""box": [[0,1],[0,1],[0,1],[0,1]]"#, r#""box": null"#);
        assert!(Manifold::from_json(&no_domain).is_err());
        assert!(Manifold::from_json("{").is_err());
    }

    #[test]
    fn annulus_domain() {
        let spec = FLAT.replace(
            r#"{"periodic": [true,true,true,true], "box": [[0,1],[0,1],[0,1],[0,1]]}"#,
            r#"{"annulus": {"inner": 1, "outer": 2}}"#,
        );
        let m = Manifold::from_json(&spec).unwrap();
        assert_eq!(m.domain, Domain::Annulus { inner: 1.0, outer: 2.0 });
        assert!(m.fields(&[0.0; 4], 1).is_err());
    }
}
