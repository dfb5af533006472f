use std::collections::HashSet;

use hermscal_core::identities::{
    integrate_named, lhs_spread, registry, run_pointwise_suite, PointContext, Quadrature, Tolerance, DEFAULT_TOL_ABS,
    DEFAULT_TOL_REL,
};
use hermscal_core::manifold::Manifold;
use hermscal_core::sampling::sample_points;
use hermscal_core::scalar::inverse;
use hermscal_core::zoo::{catalog, lookup};

const TOL: Tolerance = Tolerance { abs: DEFAULT_TOL_ABS, rel: DEFAULT_TOL_REL };

#[test]
fn registry_metadata_is_complete() {
    let defs = registry();
    let mut seen = HashSet::new();
    for d in &defs {
        assert!(seen.insert(d.id), "duplicate id {}", d.id);
        assert!(d.id.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_'), "{}", d.id);
        assert!(!d.anchor.trim().is_empty(), "{} has no formula", d.id);
        assert!(d.anchor.contains('='), "{}: formula `{}` states no equation", d.id, d.anchor);
    }
    assert!(defs.len() >= 60);
}

#[test]
fn homogeneous_members_give_constant_lhs() {
    for e in catalog().into_iter().filter(|e| e.manifold.homogeneous) {
        let m = &e.manifold;
        let pts = sample_points(&m.domain, m.dim(), 12, 5);
        let rep = run_pointwise_suite(m, &pts, &[-1.0, 0.5, 1.0], TOL);
        assert!(rep.all_pass(), "{}: {:?}", m.name, rep.failures().next());
        for (id, t, k, spread) in lhs_spread(&rep.results) {
            assert!(spread < 1e-9, "{}: {id} t={t:?} k={k:?} spread {spread:e}", m.name);
        }
    }
}

#[test]
fn quadrature_reproduces_catalog_volumes() {
    for e in catalog() {
        let m = &e.manifold;
        let q = Quadrature::new(m, 128, 1, &[]).unwrap();
        assert!(q.volume_residual < 1e-10, "{}: {}", m.name, q.volume_residual);
        if e.volume.is_finite() {
            let v = integrate_named(&q, "volume").unwrap();
            assert!(
                (v.value - e.volume).abs() <= 1e-9 * e.volume + 3.0 * v.sigma(),
                "{}: {} vs {}",
                m.name,
                v.value,
                e.volume
            );
        }
    }
}

/// `δα = −(1/√g) ∂_a(√g g^{ab} α_b)` by central differences.
fn fd_delta_lee(m: &Manifold, x: &[f64], h: f64) -> f64 {
    let d = m.dim();
    let flux = |y: &[f64], a: usize| {
        let c = PointContext::compute(m, y, &[]).unwrap();
        let ginv = inverse(&c.g.h, d).unwrap();
        let alpha = c.g.lee_coordinates.comps();
        c.g.sqrt_det * (0..d).map(|b| ginv[a * d + b] * alpha[b]).sum::<f64>()
    };
    let mut div = 0.0;
    for a in 0..d {
        let (mut xp, mut xm) = (x.to_vec(), x.to_vec());
        xp[a] += h;
        xm[a] -= h;
        div += (flux(&xp, a) - flux(&xm, a)) / (2.0 * h);
    }
    let c = PointContext::compute(m, x, &[]).unwrap();
    -div / c.g.sqrt_det
}

#[test]
fn lee_codifferential_matches_divergence() {
    for name in ["perturbed_torus", "hopf_2", "kodaira_thurston_cplx"] {
        let m = lookup(name).unwrap().manifold;
        for x in sample_points(&m.domain, m.dim(), 4, 9) {
            let c = PointContext::compute(&m, &x, &[]).unwrap();
            let fd = fd_delta_lee(&m, &x, 1e-4);
            let jet = c.norms().delta_lee;
            assert!((fd - jet).abs() < 1e-5, "{name}: δα {jet} vs {fd} at {x:?}");
        }
    }
}

#[test]
fn perturbed_torus_is_not_gauduchon() {
    let m = lookup("perturbed_torus").unwrap().manifold;
    let pts = sample_points(&m.domain, m.dim(), 10, 3);
    let max_delta =
        pts.iter().map(|x| PointContext::compute(&m, x, &[]).unwrap().norms().delta_lee.abs()).fold(0.0, f64::max);
    assert!(max_delta > 1e-6, "δα vanishes everywhere: {max_delta}");
}

#[test]
fn exportable_members_round_trip_through_json() {
    for e in catalog().into_iter().filter(|e| e.manifold.exportable()) {
        let m = &e.manifold;
        let text = serde_json::to_string(&m.to_spec().unwrap()).unwrap();
        let back = Manifold::from_json(&text).unwrap();
        assert_eq!(back.n, m.n);
        let x = &sample_points(&m.domain, m.dim(), 1, 2)[0];
        let (a, b) = (m.fields(x, 2).unwrap(), back.fields(x, 2).unwrap());
        for (ja, jb) in a.h.iter().chain(&a.j).zip(b.h.iter().chain(&b.j)) {
            assert!(ja.max_abs_diff(jb) < 1e-14, "{}", m.name);
        }
    }
}

fn spec(metric_11: &str, dim: usize, boxes: &str, extra: &str) -> String {
    let eye = |r: usize, c: usize| if r == c { "1" } else { "0" };
    let jm = |r: usize, c: usize| match (r, c) {
        (2, 0) | (3, 1) => "1",
        (0, 2) | (1, 3) => "-1",
        _ => "0",
    };
    let mat = |f: &dyn Fn(usize, usize) -> &'static str, first: Option<&str>| {
        let rows: Vec<String> = (0..4)
            .map(|r| {
                let cells: Vec<String> = (0..4)
                    .map(|c| format!("\"{}\"", if (r, c) == (1, 1) { first.unwrap_or(f(r, c)) } else { f(r, c) }))
                    .collect();
                format!("[{}]", cells.join(","))
            })
            .collect();
        format!("[{}]", rows.join(","))
    };
    format!(
        r#"{{"dim":{dim},"metric":{},"J":{},"domain":{{"box":{boxes}}}{extra}}}"#,
        mat(&eye, Some(metric_11)),
        mat(&jm, None)
    )
}

#[test]
fn malformed_specs_are_rejected() {
    let unit = "[[0,1],[0,1],[0,1],[0,1]]";
    let ok = spec("1 + 0.1*sin(x1)", 4, unit, "");
    Manifold::from_json(&ok).unwrap();
    for bad in [
        String::new(),
        "{}".into(),
        spec("1", 6, unit, ""),
        spec("1", 4, "[[0,1],[0,1],[0,1]]", ""),
        spec("1", 4, "[[1,0],[0,1],[0,1],[0,1]]", ""),
        spec("1 + x9", 4, unit, ""),
        spec("1 +", 4, unit, ""),
        spec("1", 4, unit, r#","extra":1"#),
    ] {
        assert!(Manifold::from_json(&bad).is_err(), "accepted {bad}");
    }
}
