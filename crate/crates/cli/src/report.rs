//! Report assembly. Every document goes through `serde_json::Value`, whose
//! maps are ordered by key, so output bytes depend only on the run.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use hermscal_core::conventions::ledger_hash;
use hermscal_core::gauduchon::{s1_closed_form, s2_closed_form};
use hermscal_core::identities::{
    classify_contexts, integral_identity_checks, kgauduchon_theorem, named_integrand, prepare_points,
    sign_theorem_checks, suite_on_contexts, PointContext, Quadrature, Status, CLASS_TOL,
};
use hermscal_core::manifold::{Domain, Manifold};
use hermscal_core::zoo;

use crate::config::{InputError, RunConfig};
use crate::Format;

pub const SCHEMA_VERSION: u32 = 1;
/// Agreement required with a catalog entry's reference table.
pub const TABLE_TOL: f64 = 1e-7;

/// A report in both output shapes.
pub struct Doc {
    pub json: Value,
    pub csv_header: Vec<&'static str>,
    pub csv_rows: Vec<Vec<String>>,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn num(v: f64) -> String {
    format!("{v}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn point_string(x: &[f64]) -> String {
    x.iter().map(|v| num(*v)).collect::<Vec<_>>().join(";")
}

pub fn emit(doc: &Doc, format: Format, out: Option<&Path>) -> Result<(), InputError> {
    let bytes = match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&doc.json).expect("json values serialize");
            s.push('\n');
            s.into_bytes()
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&doc.csv_header).map_err(|e| InputError::new(e.to_string()))?;
            for r in &doc.csv_rows {
                w.write_record(r).map_err(|e| InputError::new(e.to_string()))?;
            }
            w.into_inner().map_err(|e| InputError::new(e.to_string()))?
        }
    };
    match out {
        Some(p) => {
            std::fs::write(p, bytes).map_err(|e| InputError::new(format!("cannot write {}: {e}", p.display())))?
        }
        None => std::io::stdout().write_all(&bytes)?,
    }
    Ok(())
}

fn domain_kind(d: &Domain) -> &'static str {
    match d {
        Domain::Box { .. } => "box",
        Domain::Annulus { .. } => "annulus",
        Domain::Sphere { .. } => "sphere",
    }
}

fn manifold_block(m: &Manifold, class: Option<String>) -> Value {
    json!({
        "name": m.name,
        "n": m.n,
        "dim": m.dim(),
        "domain": domain_kind(&m.domain),
        "homogeneous": m.homogeneous,
        "exportable": m.exportable(),
        "expected_class": m.expected_class.map(|c| c.to_string()),
        "class": class,
    })
}

pub fn list() -> Doc {
    let entries: Vec<Value> = zoo::catalog().iter().map(|e| manifold_block(&e.manifold, None)).collect();
    let csv_rows = entries
        .iter()
        .map(|v| {
            ["name", "dim", "expected_class", "domain", "homogeneous", "exportable"]
                .iter()
                .map(|k| match &v[*k] {
                    Value::String(s) => s.clone(),
                    Value::Null => String::new(),
                    other => other.to_string(),
                })
                .collect()
        })
        .collect();
    Doc {
        json: json!({ "schema_version": SCHEMA_VERSION, "manifolds": entries, "ledger_hash": ledger_hash() }),
        csv_header: vec!["name", "dim", "expected_class", "domain", "homogeneous", "exportable"],
        csv_rows,
    }
}

/// `ts` plus every parameter a catalog table refers to.
fn prepared_ts(cfg: &RunConfig) -> Vec<f64> {
    let mut ts = cfg.ts.clone();
    if let Some(e) = &cfg.expected {
        ts.extend(e.at_t.iter().map(|r| r.0));
    }
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    ts
}

fn contexts(cfg: &RunConfig, ts: &[f64]) -> Result<Vec<PointContext>, InputError> {
    prepare_points(&cfg.manifold, &cfg.points, ts)
        .into_iter()
        .zip(&cfg.points)
        .map(|(c, x)| c.map_err(|e| InputError::new(format!("at {x:?}: {e}"))))
        .collect()
}

#[derive(Serialize)]
struct Aggregate {
    quantity: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    t: Option<f64>,
    mean: f64,
    min: f64,
    max: f64,
}

/// `(quantity, t, value)` for one point: both paths for `s₁`, `s₂`.
fn scalar_entries(c: &PointContext, ts: &[f64]) -> Vec<(&'static str, Option<f64>, f64)> {
    let g = &c.g;
    let nb = c.norms();
    let mut v = vec![
        ("s", None, g.s),
        ("s_j", None, g.s_j),
        ("df", None, nb.df),
        ("df_minus", None, nb.df_minus),
        ("df_plus", None, nb.df_plus),
        ("df_plus_primitive", None, nb.df_plus_primitive),
        ("n0", None, nb.n0),
        ("nijenhuis", None, nb.nijenhuis),
        ("nabla_f", None, nb.nabla_f),
        ("lee", None, nb.lee),
        ("delta_lee", None, nb.delta_lee),
    ];
    for &t in ts {
        let (s1, s2) = c.level(t).map(|l| (l.s1, l.s2)).unwrap_or((f64::NAN, f64::NAN));
        v.push(("s1", Some(t), s1));
        v.push(("s1_closed_form", Some(t), s1_closed_form(nb, g.s, t, g.n).unwrap_or(f64::NAN)));
        v.push(("s2", Some(t), s2));
        v.push(("s2_closed_form", Some(t), s2_closed_form(nb, g.s, t, g.n).unwrap_or(f64::NAN)));
    }
    v
}

fn aggregate(ctxs: &[PointContext], ts: &[f64]) -> Vec<Aggregate> {
    let per: Vec<_> = ctxs.iter().map(|c| scalar_entries(c, ts)).collect();
    let Some(first) = per.first() else { return Vec::new() };
    (0..first.len())
        .map(|i| {
            let vals: Vec<f64> = per.iter().map(|p| p[i].2).collect();
            Aggregate {
                quantity: first[i].0.to_string(),
                t: first[i].1,
                mean: vals.iter().sum::<f64>() / vals.len() as f64,
                min: vals.iter().copied().fold(f64::INFINITY, f64::min),
                max: vals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            }
        })
        .collect()
}

#[derive(Serialize)]
struct TableCheck {
    quantity: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    t: Option<f64>,
    expected: f64,
    max_deviation: f64,
    pass: bool,
}

/// Compare a catalog entry's reference table at every point.
fn table_checks(cfg: &RunConfig, ctxs: &[PointContext]) -> Vec<TableCheck> {
    let Some(e) = &cfg.expected else { return Vec::new() };
    let mut checks: Vec<(String, Option<f64>, f64, Box<dyn Fn(&PointContext) -> f64>)> = Vec::new();
    let plain: [(&str, Option<f64>, fn(&PointContext) -> f64); 7] = [
        ("s", e.s, |c| c.g.s),
        ("s_j", e.s_j, |c| c.g.s_j),
        ("df", e.df, |c| c.norms().df),
        ("nabla_f", e.nabla_f, |c| c.norms().nabla_f),
        ("lee", e.lee, |c| c.norms().lee),
        ("nijenhuis", e.nijenhuis, |c| c.norms().nijenhuis),
        ("delta_lee", e.delta_lee, |c| c.norms().delta_lee),
    ];
    for (name, want, f) in plain {
        if let Some(w) = want {
            checks.push((name.to_string(), None, w, Box::new(f)));
        }
    }
    for &t in &cfg.ts {
        if let Some(w) = e.s1_all_t {
            checks.push(("s1".into(), Some(t), w, Box::new(move |c| c.level(t).map_or(f64::NAN, |l| l.s1))));
        }
        if let Some(w) = e.s2_all_t {
            checks.push(("s2".into(), Some(t), w, Box::new(move |c| c.level(t).map_or(f64::NAN, |l| l.s2))));
        }
    }
    for &(t, s1, s2) in &e.at_t {
        checks.push(("s1".into(), Some(t), s1, Box::new(move |c| c.level(t).map_or(f64::NAN, |l| l.s1))));
        checks.push(("s2".into(), Some(t), s2, Box::new(move |c| c.level(t).map_or(f64::NAN, |l| l.s2))));
    }
    checks
        .into_iter()
        .map(|(quantity, t, expected, f)| {
            let dev =
                ctxs.iter()
                    .map(|c| (f(c) - expected).abs())
                    .fold(0.0, |a: f64, b| if b.is_nan() { f64::NAN } else { a.max(b) });
            TableCheck { quantity, t, expected, max_deviation: dev, pass: dev <= TABLE_TOL }
        })
        .collect()
}

fn ok_or_skipped(s: Status) -> bool {
    s != Status::Fail
}

/// Integrals: volume, sign theorems, integral identities and the
/// k-Gauduchon densities. Returns the block and whether it passed.
fn integrals(cfg: &RunConfig, class: hermscal_core::hermitian::GrayHervella, ts: &[f64]) -> (Value, bool) {
    let q = match Quadrature::new(&cfg.manifold, cfg.echo.samples, cfg.seed, ts) {
        Ok(q) => q,
        Err(e) => return (json!({ "error": e.to_string() }), false),
    };
    let volume = match q.integrate(|_| Ok(1.0)) {
        Ok(v) => v,
        Err(e) => return (json!({ "error": e.to_string() }), false),
    };
    let mut pass = true;
    let signs = match sign_theorem_checks(&q, class, &cfg.ts, cfg.tol) {
        Ok(r) => {
            pass &= r.iter().all(|s| ok_or_skipped(s.status));
            to_value(&r)
        }
        Err(e) => {
            pass = false;
            json!({ "error": e.to_string() })
        }
    };
    let identities = match integral_identity_checks(&q, class, &cfg.ts, cfg.tol) {
        Ok(r) => {
            pass &= r.iter().all(|s| ok_or_skipped(s.status));
            to_value(&r)
        }
        Err(e) => {
            pass = false;
            json!({ "error": e.to_string() })
        }
    };
    let n = cfg.manifold.n;
    let kg: Vec<Value> = if n >= 3 && class.is_hermitian() {
        (1..n)
            .map(|k| match kgauduchon_theorem(&q, k) {
                Ok(r) => {
                    pass &= r.max_residual < cfg.tol.abs;
                    to_value(&r)
                }
                Err(e) => {
                    pass = false;
                    json!({ "k": k, "error": e.to_string() })
                }
            })
            .collect()
    } else {
        Vec::new()
    };
    let volume_ok = q.volume_residual < 1e-10
        && cfg.volume.map_or(true, |v| (volume.value - v).abs() <= 1e-8 * v.max(1.0) + 3.0 * volume.sigma());
    pass &= volume_ok;
    let block = json!({
        "method": q.method,
        "samples": q.samples(),
        "volume": volume,
        "expected_volume": cfg.volume,
        "volume_residual": q.volume_residual,
        "sign_theorems": signs,
        "identities": identities,
        "kgauduchon": kg,
    });
    (block, pass)
}

pub fn verify(cfg: &RunConfig) -> Result<(Doc, bool), InputError> {
    let ts = prepared_ts(cfg);
    let ctx_results = prepare_points(&cfg.manifold, &cfg.points, &ts);
    let suite = suite_on_contexts(cfg.manifold.n, &cfg.points, &ctx_results, &cfg.ts, cfg.tol);
    let ctxs: Vec<PointContext> = ctx_results.into_iter().filter_map(Result::ok).collect();
    let tables = table_checks(cfg, &ctxs);
    let class_ok = cfg.manifold.expected_class.map_or(true, |c| c == suite.class);
    let (integrals, integrals_ok) = integrals(cfg, suite.class, &ts);
    let failures = suite.failures().count();
    let pass = suite.all_pass() && class_ok && tables.iter().all(|t| t.pass) && integrals_ok;
    let csv_rows = suite
        .results
        .iter()
        .map(|r| {
            vec![
                r.identity_id.clone(),
                point_string(&r.point.coords),
                opt(r.t),
                r.k.map(|k| k.to_string()).unwrap_or_default(),
                num(r.lhs),
                num(r.rhs),
                num(r.abs_err),
                num(r.rel_err),
                r.pass.to_string(),
                r.error.clone().unwrap_or_default(),
            ]
        })
        .collect();
    let json = json!({
        "schema_version": SCHEMA_VERSION,
        "manifold": manifold_block(&cfg.manifold, Some(suite.class.to_string())),
        "config": cfg.echo,
        "results": suite.results,
        "skipped": suite.skipped,
        "scalars": aggregate(&ctxs, &cfg.ts),
        "reference_table": tables,
        "integrals": integrals,
        "summary": {
            "results": suite.results.len(),
            "failures": failures,
            "class_matches": class_ok,
            "pass": pass,
        },
        "ledger_hash": ledger_hash(),
    });
    let header = vec!["identity_id", "point", "t", "k", "lhs", "rhs", "abs_err", "rel_err", "pass", "error"];
    Ok((Doc { json, csv_header: header, csv_rows }, pass))
}

pub fn scalars(cfg: &RunConfig) -> Result<Doc, InputError> {
    let ctxs = contexts(cfg, &cfg.ts)?;
    let mut rows = Vec::new();
    let mut points = Vec::new();
    for c in &ctxs {
        let entries = scalar_entries(c, &cfg.ts);
        let nb = c.norms();
        for &t in &cfg.ts {
            let get = |q: &str| entries.iter().find(|e| e.0 == q && e.1 == Some(t)).map_or(f64::NAN, |e| e.2);
            rows.push(vec![
                point_string(&c.g.x),
                num(t),
                num(c.g.s),
                num(c.g.s_j),
                num(get("s1")),
                num(get("s1_closed_form")),
                num(get("s2")),
                num(get("s2_closed_form")),
                num(nb.df),
                num(nb.nabla_f),
                num(nb.lee),
                num(nb.nijenhuis),
                num(nb.delta_lee),
            ]);
        }
        let levels: Vec<Value> = cfg
            .ts
            .iter()
            .map(|&t| {
                let get = |q: &str| entries.iter().find(|e| e.0 == q && e.1 == Some(t)).map_or(f64::NAN, |e| e.2);
                json!({
                    "t": t,
                    "s1": get("s1"),
                    "s1_closed_form": get("s1_closed_form"),
                    "s2": get("s2"),
                    "s2_closed_form": get("s2_closed_form"),
                })
            })
            .collect();
        points.push(json!({
            "point": c.g.x,
            "s": c.g.s,
            "s_j": c.g.s_j,
            "norms": nb,
            "levels": levels,
        }));
    }
    let json = json!({
        "schema_version": SCHEMA_VERSION,
        "manifold": manifold_block(&cfg.manifold, Some(classify_contexts(&ctxs, CLASS_TOL).to_string())),
        "config": cfg.echo,
        "scalars": { "points": points, "aggregate": aggregate(&ctxs, &cfg.ts) },
        "ledger_hash": ledger_hash(),
    });
    let header = vec![
        "point",
        "t",
        "s",
        "s_j",
        "s1",
        "s1_closed_form",
        "s2",
        "s2_closed_form",
        "df",
        "nabla_f",
        "lee",
        "nijenhuis",
        "delta_lee",
    ];
    Ok(Doc { json, csv_header: header, csv_rows: rows })
}

pub fn integrate(cfg: &RunConfig, names: &[String]) -> Result<Doc, InputError> {
    let parsed = names.iter().map(|n| named_integrand(n)).collect::<Result<Vec<_>, _>>()?;
    let mut ts = cfg.ts.clone();
    ts.extend(parsed.iter().filter_map(|p| p.t()));
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let q = Quadrature::new(&cfg.manifold, cfg.echo.samples, cfg.seed, &ts)?;
    let mut out = Vec::new();
    let mut rows = Vec::new();
    for (name, f) in names.iter().zip(&parsed) {
        let est = q.integrate(|c| f.eval(c)).map_err(|e| InputError::new(format!("{name}: {e}")))?;
        rows.push(vec![
            name.clone(),
            num(est.value),
            opt(est.std_error),
            est.samples.to_string(),
            to_value(&est.method).as_str().unwrap_or_default().to_string(),
        ]);
        out.push(json!({ "integrand": name, "estimate": est }));
    }
    let json = json!({
        "schema_version": SCHEMA_VERSION,
        "manifold": manifold_block(&cfg.manifold, None),
        "config": cfg.echo,
        "integrals": out,
        "volume_residual": q.volume_residual,
        "ledger_hash": ledger_hash(),
    });
    Ok(Doc { json, csv_header: vec!["integrand", "value", "std_error", "samples", "method"], csv_rows: rows })
}

const COMPONENTS: [&str; 4] = ["df_minus", "n0", "df_plus_primitive", "lee"];

pub fn classify(cfg: &RunConfig, tol: f64) -> Result<(Doc, String), InputError> {
    let ctxs = contexts(cfg, &[])?;
    let class = classify_contexts(&ctxs, tol);
    let mut maxima = [0.0f64; 4];
    for c in &ctxs {
        for (m, v) in maxima.iter_mut().zip(c.norms().components()) {
            *m = m.max(v);
        }
    }
    let label = class.to_string();
    let components: serde_json::Map<String, Value> =
        COMPONENTS.iter().zip(maxima).map(|(k, v)| (k.to_string(), json!(v))).collect();
    let rows = COMPONENTS
        .iter()
        .zip(maxima)
        .enumerate()
        .map(|(i, (k, v))| vec![format!("W{}", i + 1), k.to_string(), num(v), (v > tol).to_string()])
        .collect();
    let json = json!({
        "schema_version": SCHEMA_VERSION,
        "manifold": manifold_block(&cfg.manifold, Some(label.clone())),
        "config": cfg.echo,
        "class": label,
        "class_tol": tol,
        "max_component_norms": components,
        "ledger_hash": ledger_hash(),
    });
    Ok((Doc { json, csv_header: vec!["class", "component", "max_norm_sq", "present"], csv_rows: rows }, label))
}
