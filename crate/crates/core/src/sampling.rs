//! Seeded sample points and quadrature over fundamental domains.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::gamma::gamma;

use crate::error::{GeomError, Result};
use crate::manifold::Domain;

const PRIMES: [u8; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
/// Independent shifted replicates in the quasi-random estimator.
pub const QMC_REPLICATES: usize = 16;

/// Volume of the unit sphere `S^k ⊂ ℝ^{k+1}`.
pub fn sphere_volume(k: usize) -> f64 {
    let m = (k + 1) as f64;
    2.0 * std::f64::consts::PI.powf(m / 2.0) / gamma(m / 2.0)
}

/// Number of uniform variates [`map_unit`] consumes.
pub fn unit_dims(domain: &Domain, dim: usize) -> usize {
    match domain {
        Domain::Box { .. } => dim,
        Domain::Annulus { .. } => dim + 1,
        Domain::Sphere { .. } => dim + 1,
    }
}

fn gaussian(u: f64) -> f64 {
    let u = u.clamp(1e-300, 1.0 - f64::EPSILON);
    Normal::standard().inverse_cdf(u)
}

/// Map uniform variates to a chart point with weight `w` such that
/// `E[g(x)·w] = ∫ g dx` over the domain. Sphere charts return a weight
/// relative to the round volume density and may reject (`None`).
pub fn map_unit(domain: &Domain, dim: usize, u: &[f64]) -> Option<(Vec<f64>, f64)> {
    match domain {
        Domain::Box { lo, hi, .. } => {
            let x = (0..dim).map(|i| lo[i] + u[i] * (hi[i] - lo[i])).collect();
            let vol = lo.iter().zip(hi).map(|(a, b)| b - a).product();
            Some((x, vol))
        }
        Domain::Annulus { inner, outer } => {
            let g: Vec<f64> = u[1..=dim].iter().map(|v| gaussian(*v)).collect();
            let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 {
                return None;
            }
            let ratio = outer / inner;
            let r = inner * ratio.powf(u[0]);
            let x = g.iter().map(|v| r * v / norm).collect();
            let w = ratio.ln() * sphere_volume(dim - 1) * r.powi(dim as i32);
            Some((x, w))
        }
        Domain::Sphere { max_radius } => {
            let g: Vec<f64> = u[..=dim].iter().map(|v| gaussian(*v)).collect();
            let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            let p: Vec<f64> = g.iter().map(|v| v / norm).collect();
            let denom = 1.0 - p[dim];
            if denom <= 0.0 {
                return None;
            }
            let x: Vec<f64> = p[..dim].iter().map(|v| v / denom).collect();
            if x.iter().map(|v| v * v).sum::<f64>().sqrt() > *max_radius {
                return None;
            }
            Some((x, sphere_volume(dim)))
        }
    }
}

/// `count` seeded pseudo-random points in the domain.
pub fn sample_points(domain: &Domain, dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = unit_dims(domain, dim);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let u: Vec<f64> = (0..k).map(|_| rng.gen::<f64>()).collect();
        if let Some((x, _)) = map_unit(domain, dim, &u) {
            out.push(x);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureMethod {
    LatticeQuadrature,
    QuasiRandom,
}

/// Points with weights; `groups` splits them into independent replicates
/// for a standard error.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub method: QuadratureMethod,
    pub groups: Vec<Vec<(Vec<f64>, f64)>>,
}

/// Midpoint tensor lattice with about `samples` nodes on a box.
pub fn lattice_rule(domain: &Domain, dim: usize, samples: usize) -> Result<QuadratureRule> {
    let Domain::Box { .. } = domain else {
        return Err(GeomError::Domain("lattice quadrature needs a box domain".into()));
    };
    let m = ((samples.max(1) as f64).powf(1.0 / dim as f64).floor() as usize).max(1);
    let total = m.pow(dim as u32);
    let mut nodes = Vec::with_capacity(total);
    for idx in 0..total {
        let mut rem = idx;
        let u: Vec<f64> = (0..dim)
            .map(|_| {
                let k = rem % m;
                rem /= m;
                (k as f64 + 0.5) / m as f64
            })
            .collect();
        let (x, w) = map_unit(domain, dim, &u).expect("box maps every point");
        nodes.push((x, w / total as f64));
    }
    Ok(QuadratureRule { method: QuadratureMethod::LatticeQuadrature, groups: vec![nodes] })
}

/// Randomly shifted Halton replicates (Cranley–Patterson rotation).
pub fn quasi_random_rule(domain: &Domain, dim: usize, samples: usize, seed: u64) -> Result<QuadratureRule> {
    let k = unit_dims(domain, dim);
    if k > PRIMES.len() {
        return Err(GeomError::Domain(format!("quasi-random rule supports at most {} variates", PRIMES.len())));
    }
    let per = (samples / QMC_REPLICATES).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut groups = Vec::with_capacity(QMC_REPLICATES);
    for _ in 0..QMC_REPLICATES {
        let shift: Vec<f64> = (0..k).map(|_| rng.gen::<f64>()).collect();
        let mut nodes = Vec::with_capacity(per);
        let mut index = 1;
        let mut tries = 0;
        while nodes.len() < per {
            let u: Vec<f64> = (0..k).map(|i| (halton::number(PRIMES[i], index) + shift[i]).fract()).collect();
            index += 1;
            tries += 1;
            if let Some(node) = map_unit(domain, dim, &u) {
                nodes.push(node);
            }
            if tries > 100 * per + 100 {
                return Err(GeomError::Domain("quasi-random sampler rejects almost every point".into()));
            }
        }
        let count = nodes.len() as f64;
        groups.push(nodes.into_iter().map(|(x, w)| (x, w / count)).collect());
    }
    Ok(QuadratureRule { method: QuadratureMethod::QuasiRandom, groups })
}
