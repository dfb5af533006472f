use std::fmt;
use std::path::PathBuf;

use serde::Serialize;

use hermscal_core::identities::{default_t_values, Tolerance};
use hermscal_core::manifold::Manifold;
use hermscal_core::sampling::sample_points;
use hermscal_core::zoo::{self, ExpectedScalars};
use hermscal_core::GeomError;

use crate::{Format, RunArgs};

#[derive(Debug)]
pub struct InputError(String);

impl InputError {
    pub fn new(msg: impl Into<String>) -> Self {
        Self(msg.into())
    }
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<GeomError> for InputError {
    fn from(e: GeomError) -> Self {
        Self(e.to_string())
    }
}

impl From<std::io::Error> for InputError {
    fn from(e: std::io::Error) -> Self {
        Self(e.to_string())
    }
}

/// What goes into a report's `config` block. The output path is left out
/// so the same run written to two places gives identical bytes.
#[derive(Clone, Debug, Serialize)]
pub struct ConfigEcho {
    pub source: String,
    pub points: usize,
    pub samples: usize,
    pub seed: u64,
    pub t_values: Vec<f64>,
    pub tol_abs: f64,
    pub tol_rel: f64,
}

pub struct RunConfig {
    pub manifold: Manifold,
    pub expected: Option<ExpectedScalars>,
    pub volume: Option<f64>,
    pub points: Vec<Vec<f64>>,
    pub seed: u64,
    pub ts: Vec<f64>,
    pub tol: Tolerance,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub echo: ConfigEcho,
}

fn parse_t(s: &str) -> Result<f64, InputError> {
    let s = s.trim();
    let bad = || InputError::new(format!("cannot parse t value `{s}`"));
    let v = match s.split_once('/') {
        Some((a, b)) => {
            let (a, b): (f64, f64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
            a / b
        }
        None => s.parse().map_err(|_| bad())?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

pub fn parse_t_list(s: &str) -> Result<Vec<f64>, InputError> {
    let mut ts = s.split(',').map(parse_t).collect::<Result<Vec<_>, _>>()?;
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    Ok(ts)
}

impl RunConfig {
    pub fn from_args(a: &RunArgs) -> Result<Self, InputError> {
        if a.points == 0 || a.samples == 0 {
            return Err(InputError::new("--points and --samples must be at least 1"));
        }
        if !(a.tol_abs > 0.0) || !(a.tol_rel > 0.0) {
            return Err(InputError::new("tolerances must be positive"));
        }
        let (manifold, expected, volume, source) = match (&a.manifold, &a.spec) {
            (Some(name), None) => {
                let e = zoo::lookup(name)?;
                let vol = e.volume.is_finite().then_some(e.volume);
                (e.manifold, Some(e.expected), vol, name.clone())
            }
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| InputError::new(format!("cannot read {}: {e}", path.display())))?;
                let m = Manifold::from_json(&text).map_err(|e| InputError::new(format!("{}: {e}", path.display())))?;
                (m, None, None, format!("spec:{}", m_name_or_path(path)))
            }
            _ => return Err(InputError::new("give exactly one of --manifold or --spec")),
        };
        let ts = match &a.t {
            Some(s) => parse_t_list(s)?,
            None => default_t_values(manifold.n),
        };
        let points = sample_points(&manifold.domain, manifold.dim(), a.points, a.seed);
        let echo = ConfigEcho {
            source,
            points: a.points,
            samples: a.samples,
            seed: a.seed,
            t_values: ts.clone(),
            tol_abs: a.tol_abs,
            tol_rel: a.tol_rel,
        };
        Ok(Self {
            manifold,
            expected,
            volume,
            points,
            seed: a.seed,
            ts,
            tol: Tolerance { abs: a.tol_abs, rel: a.tol_rel },
            out: a.output.out.clone(),
            format: a.output.format,
            echo,
        })
    }
}

fn m_name_or_path(p: &std::path::Path) -> String {
    p.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_else(|| p.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_lists_accept_fractions() {
        assert_eq!(parse_t_list("1, -1/2,0.5,1/2").unwrap(), vec![-0.5, 0.5, 1.0]);
        assert!(parse_t_list("a").is_err());
        assert!(parse_t_list("1/0").is_err());
    }
}
