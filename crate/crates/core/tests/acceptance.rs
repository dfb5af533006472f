//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
//!
//! Tolerances are pinned below and are not tuned per manifold.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::process::ExitCode;

use hermscal_core::identities::{
    critical_t, integral_identity_checks, kgauduchon, prepare_points, sign_theorem_checks, sign_theorems,
    suite_on_contexts, IntegralCheck, PointContext, Quadrature, SignReport, Status, SuiteReport, Tolerance,
};
use hermscal_core::jet::{fd_oracle, ChartPoint};
use hermscal_core::manifold::Manifold;
use hermscal_core::sampling::sample_points;
use hermscal_core::zoo::{catalog, lookup, ZooEntry};

const POINTS: usize = 100;
const SHIFT_POINTS: usize = 50;
const POINT_SEED: u64 = 0;
const QUAD_SAMPLES: usize = 512;
const QUAD_SEED: u64 = 0;

const CLOSED_FORM_ABS: f64 = 1e-8;
const CLOSED_FORM_REL: f64 = 1e-6;
const TWO_PATH_ABS: f64 = 1e-8;
const NORM_ABS: f64 = 1e-8;
const INTEGRABLE_NABLA_F_ABS: f64 = 1e-10;
const TORSION_ABS: f64 = 1e-9;
const SHIFT_ABS: f64 = 1e-8;
const TABLE_ABS: f64 = 1e-7;
const KG_ABS: f64 = 1e-8;
/// Integral checks: `|∫(lhs − rhs)| ≤ INTEGRAL_ABS + 3σ`.
const INTEGRAL_ABS: f64 = 1e-8;
const FD_STEP: f64 = 1e-4;
const FD_REL: f64 = 1e-5;
const FD_POINTS: usize = 3;

fn t_grid(n: usize) -> Vec<f64> {
    let mut ts = vec![-1.0, -0.5, 0.0, 1.0 / 3.0, 0.5, critical_t(n), 1.0, 2.0];
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    ts
}

/// Everything the pointwise criteria read, built once per catalog entry.
struct Prepared {
    entry: ZooEntry,
    points: Vec<Vec<f64>>,
    ts: Vec<f64>,
    ctxs: Vec<PointContext>,
    suite: SuiteReport,
}

impl Prepared {
    fn new(entry: ZooEntry) -> Result<Self, String> {
        let m = &entry.manifold;
        let ts = t_grid(m.n);
        let points = sample_points(&m.domain, m.dim(), POINTS, POINT_SEED);
        let raw = prepare_points(m, &points, &ts);
        let tol = Tolerance { abs: CLOSED_FORM_ABS, rel: CLOSED_FORM_REL };
        let suite = suite_on_contexts(m.n, &points, &raw, &ts, tol);
        let ctxs = raw.into_iter().collect::<Result<Vec<_>, _>>().map_err(|e| format!("{}: {e}", m.name))?;
        Ok(Self { entry, points, ts, ctxs, suite })
    }

    fn name(&self) -> &str {
        &self.entry.manifold.name
    }
}

#[derive(Default)]
struct Outcome {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Outcome {
    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(msg());
        }
    }
}

/// Largest `abs_err` over results with the given ids, and the failures
/// against `abs`. Missing ids count as failures.
fn abs_check(
    out: &mut Outcome,
    p: &Prepared,
    ids: &[&str],
    abs: f64,
    filter: impl Fn(&hermscal_core::identities::IdentityResult) -> bool,
) -> f64 {
    let skipped: Vec<&str> = p.suite.skipped.iter().map(|s| s.identity_id.as_str()).collect();
    let mut worst: f64 = 0.0;
    for id in ids {
        let rs: Vec<_> = p.suite.results.iter().filter(|r| r.identity_id == *id && filter(r)).collect();
        if rs.is_empty() {
            out.check(skipped.contains(id), || format!("{}: no results for {id}", p.name()));
            continue;
        }
        for r in rs {
            if let Some(e) = &r.error {
                out.failures.push(format!("{}: {id} errored: {e}", p.name()));
                continue;
            }
            worst = worst.max(r.abs_err);
            out.check(r.abs_err < abs, || {
                format!("{}: {id} t={:?} k={:?} abs_err {:.3e} at {:?}", p.name(), r.t, r.k, r.abs_err, r.point.coords)
            });
        }
    }
    worst
}

fn closed_forms(all: &[Prepared]) -> Outcome {
    let mut out = Outcome::default();
    for p in all {
        for id in ["s1_closed_form", "s2_closed_form"] {
            let rs: Vec<_> = p.suite.results.iter().filter(|r| r.identity_id == id).collect();
            out.check(rs.len() == p.points.len() * p.ts.len(), || {
                format!("{}: {id} has {} results", p.name(), rs.len())
            });
            for r in rs {
                out.check(r.pass, || {
                    format!("{}: {id} t={:?} abs {:.3e} rel {:.3e}", p.name(), r.t, r.abs_err, r.rel_err)
                });
            }
        }
    }
    let perturbed = all.iter().find(|p| p.name() == "perturbed_torus");
    out.check(perturbed.is_some_and(|p| p.suite.class.to_string() == "W1+W2+W3+W4"), || {
        "perturbed_torus missing or not of class W1+W2+W3+W4".into()
    });
    out
}

fn two_paths(all: &[Prepared]) -> Outcome {
    let mut out = Outcome::default();
    let ids = [
        "lichnerowicz_curvature",
        "first_chern_form_lichnerowicz",
        "s1_lichnerowicz_j_scalar",
        "s2_lichnerowicz_j_scalar",
        "s1_lichnerowicz",
        "s2_lichnerowicz",
    ];
    let mut worst: f64 = 0.0;
    for p in all {
        worst = worst.max(abs_check(&mut out, p, &ids, TWO_PATH_ABS, |_| true));
    }
    out.notes.push(format!("max abs_err {worst:.2e}"));
    out
}

fn norm_identities(all: &[Prepared]) -> Outcome {
    let mut out = Outcome::default();
    let ids = [
        "nabla_f_from_df_and_nijenhuis",
        "nabla_f_symmetries",
        "nijenhuis_symmetries",
        "nabla_f_decomposition",
        "nabla_f_norm_total",
        "nabla_f_norm_plus",
        "nabla_f_norm_components",
        "weyl_f_contraction",
        "s_minus_sj_norms",
        "s_minus_sj_components",
    ];
    let mut worst: f64 = 0.0;
    let mut integrable = 0;
    for p in all {
        worst = worst.max(abs_check(&mut out, p, &ids, NORM_ABS, |_| true));
        if p.suite.class.is_hermitian() {
            integrable += 1;
            for c in &p.ctxs {
                let nb = c.norms();
                let err = (nb.nabla_f - nb.df).abs();
                out.check(err < INTEGRABLE_NABLA_F_ABS, || {
                    format!("{}: |∇F|² − |dF|² = {err:.3e} at {:?}", p.name(), c.g.x)
                });
            }
        }
    }
    out.notes.push(format!("max abs_err {worst:.2e}, {integrable} integrable members"));
    out
}

fn torsion(all: &[Prepared]) -> Outcome {
    let mut out = Outcome::default();
    let ids = [
        "chern_torsion_no_mixed_part",
        "nijenhuis_chern_torsion",
        "lee_form_chern_torsion",
        "df_plus_chern_torsion",
        "df_minus_chern_torsion",
        "torsion_norm_chern",
        "nijenhuis_norm_chern",
        "lee_norm_chern",
        "df_plus_norm_chern",
        "df_minus_norm_chern",
        "gamma_from_chern_torsion",
    ];
    let mut worst: f64 = 0.0;
    for p in all {
        worst = worst.max(abs_check(&mut out, p, &ids, TORSION_ABS, |_| true));
    }
    out.notes.push(format!("max abs_err {worst:.2e}"));
    out
}

fn shifts(all: &[Prepared]) -> Outcome {
    let mut out = Outcome::default();
    let ts = [-1.0, 0.0, 0.5, 1.0];
    let ids = ["first_chern_form_shift", "ricci_form_11_shift"];
    let mut worst: f64 = 0.0;
    for p in all {
        let first: Vec<&Vec<f64>> = p.points.iter().take(SHIFT_POINTS).collect();
        let keep = |r: &hermscal_core::identities::IdentityResult| {
            r.t.is_some_and(|t| ts.contains(&t)) && first.iter().any(|x| **x == r.point.coords)
        };
        worst = worst.max(abs_check(&mut out, p, &ids, SHIFT_ABS, keep));
    }
    out.notes.push(format!("max abs_err {worst:.2e}"));
    out
}

/// Reference values, written out independently of the catalog.
fn reference(name: &str) -> Vec<(&'static str, Option<f64>, f64)> {
    let zero_all = |ts: &[f64]| {
        let mut v = vec![
            ("s", None, 0.0),
            ("s_J", None, 0.0),
            ("|dF|^2", None, 0.0),
            ("|nabla F|^2", None, 0.0),
            ("|alpha|^2", None, 0.0),
            ("|N|^2", None, 0.0),
            ("delta alpha", None, 0.0),
        ];
        for &t in ts {
            v.push(("s1", Some(t), 0.0));
            v.push(("s2", Some(t), 0.0));
        }
        v
    };
    match name {
        "flat_torus_4" => zero_all(&t_grid(2)),
        "flat_torus_6" => zero_all(&t_grid(3)),
        "s6_nearly_kaehler" => {
            let mut v =
                vec![("s", None, 30.0), ("s_J", None, 6.0), ("|dF|^2", None, 36.0), ("|nabla F|^2", None, 12.0)];
            for t in t_grid(3) {
                v.push(("s1", Some(t), 0.0));
                v.push(("s2", Some(t), 12.0));
            }
            v
        }
        "iwasawa" => vec![
            ("s", None, -1.0),
            ("|dF|^2", None, 2.0),
            ("s1", Some(1.0), 0.0),
            ("s2", Some(1.0), 0.0),
            ("s1-s2", Some(-1.0), 2.0),
        ],
        _ => Vec::new(),
    }
}

fn table_value(c: &PointContext, key: &str, t: Option<f64>) -> Result<f64, String> {
    let nb = c.norms();
    let lv = |t: Option<f64>| c.level(t.expect("parametrised entry")).map_err(|e| e.to_string());
    Ok(match key {
        "s" => c.g.s,
        "s_J" => c.g.s_j,
        "|dF|^2" => nb.df,
        "|nabla F|^2" => nb.nabla_f,
        "|alpha|^2" => nb.lee,
        "|N|^2" => nb.nijenhuis,
        "delta alpha" => nb.delta_lee,
        "s1" => lv(t)?.s1,
        "s2" => lv(t)?.s2,
        "s1-s2" => {
            let l = lv(t)?;
            l.s1 - l.s2
        }
        other => return Err(format!("unknown table key {other}")),
    })
}

fn tables(all: &[Prepared]) -> Outcome {
    let mut out = Outcome::default();
    let mut checked = 0;
    for name in ["flat_torus_4", "flat_torus_6", "s6_nearly_kaehler", "iwasawa"] {
        let Some(p) = all.iter().find(|p| p.name() == name) else {
            out.failures.push(format!("{name} missing from the catalog"));
            continue;
        };
        for (key, t, want) in reference(name) {
            for c in &p.ctxs {
                checked += 1;
                match table_value(c, key, t) {
                    Ok(v) => out.check((v - want).abs() < TABLE_ABS, || {
                        format!("{name}: {key} t={t:?} = {v} (want {want}) at {:?}", c.g.x)
                    }),
                    Err(e) => out.failures.push(format!("{name}: {key}: {e}")),
                }
            }
        }
    }
    out.notes.push(format!("{checked} values"));
    out
}

struct Integrated {
    name: String,
    signs: Vec<SignReport>,
    integrals: Vec<IntegralCheck>,
    quadrature: Quadrature,
}

fn integrate_all(all: &[Prepared]) -> Result<Vec<Integrated>, String> {
    let tol = Tolerance { abs: INTEGRAL_ABS, rel: CLOSED_FORM_REL };
    all.iter()
        .map(|p| {
            let m = &p.entry.manifold;
            let q = Quadrature::new(m, QUAD_SAMPLES, QUAD_SEED, &p.ts).map_err(|e| format!("{}: {e}", m.name))?;
            let signs = sign_theorem_checks(&q, p.suite.class, &p.ts, tol).map_err(|e| format!("{}: {e}", m.name))?;
            let integrals =
                integral_identity_checks(&q, p.suite.class, &p.ts, tol).map_err(|e| format!("{}: {e}", m.name))?;
            Ok(Integrated { name: m.name.clone(), signs, integrals, quadrature: q })
        })
        .collect()
}

fn find_sign<'a>(ints: &'a [Integrated], name: &str, theorem: &str, t: f64) -> Option<&'a SignReport> {
    ints.iter().find(|i| i.name == name)?.signs.iter().find(|r| r.theorem == theorem && (r.t - t).abs() < 1e-12)
}

fn sign_criteria(ints: &[Integrated]) -> Outcome {
    let mut out = Outcome::default();
    let mut exercised: BTreeMap<&'static str, usize> = sign_theorems().iter().map(|th| (th.id, 0)).collect();
    for i in ints {
        for r in &i.signs {
            if r.status == Status::Skipped {
                continue;
            }
            if let Some(c) = exercised.get_mut(r.theorem.as_str()) {
                *c += 1;
            }
            out.check(r.status == Status::Pass, || {
                format!(
                    "{}: {} t={} sign_holds={} residual={:?} integral={:?}",
                    i.name,
                    r.theorem,
                    r.t,
                    r.sign_holds,
                    r.pointwise_residual,
                    r.integral.map(|e| e.value)
                )
            });
        }
    }
    for (id, count) in &exercised {
        out.check(*count > 0, || format!("{id} never applies to a catalog member"));
    }
    // equality cases and their diagnoses
    let expect =
        |out: &mut Outcome, name: &str, th: &str, t: f64, diagnosis: Option<&str>| match find_sign(ints, name, th, t) {
            Some(r) if r.status != Status::Skipped => out.check(r.diagnosis.as_deref() == diagnosis, || {
                format!("{name}: {th} t={t} diagnosis {:?}, want {diagnosis:?}", r.diagnosis)
            }),
            _ => out.failures.push(format!("{name}: {th} t={t} not evaluated")),
        };
    let t3 = critical_t(3);
    expect(&mut out, "hopf_3", "first_chern_excess_lower", t3, Some("locally conformally Kaehler"));
    expect(&mut out, "hopf_3", "first_chern_excess_lower", 2.0, None);
    expect(&mut out, "hopf_2", "first_chern_excess_surface_lower", 0.5, Some("Hermitian surface"));
    expect(&mut out, "iwasawa", "riemannian_excess_quasi_kaehler_free", 1.0, Some("balanced Hermitian"));
    expect(&mut out, "s6_nearly_kaehler", "riemannian_excess_quasi_kaehler_free", 1.0, None);
    expect(&mut out, "kodaira_thurston", "riemannian_excess_quasi_kaehler", 1.0, None);
    expect(&mut out, "flat_torus_6", "first_chern_excess_upper", 0.5, Some("Kaehler"));
    let n_ints = ints.iter().map(|i| i.signs.iter().filter(|r| r.status != Status::Skipped).count()).sum::<usize>();
    out.notes.push(format!("{n_ints} theorem/t cases on {} members", ints.len()));
    out
}

fn kgauduchon_criteria(all: &[Prepared], ints: &[Integrated]) -> Outcome {
    let mut out = Outcome::default();
    let get = |name: &str| all.iter().find(|p| p.name() == name);
    match get("iwasawa") {
        Some(p) => {
            for c in &p.ctxs {
                for (k, want) in [(1, 1.0), (2, 0.0)] {
                    match kgauduchon(c, k) {
                        Ok(kg) => {
                            out.check((kg.lhs_density - want).abs() < KG_ABS, || {
                                format!("iwasawa: k={k} density {} (want {want})", kg.lhs_density)
                            });
                            out.check(kg.residual < KG_ABS, || format!("iwasawa: k={k} residual {:.3e}", kg.residual));
                        }
                        Err(e) => out.failures.push(format!("iwasawa: k={k}: {e}")),
                    }
                }
            }
        }
        None => out.failures.push("iwasawa missing".into()),
    }
    let mut worst: f64 = 0.0;
    match get("hopf_3") {
        Some(p) => {
            for c in p.ctxs.iter().take(SHIFT_POINTS) {
                for k in 1..3 {
                    match kgauduchon(c, k) {
                        Ok(kg) => {
                            worst = worst.max(kg.residual);
                            out.check(kg.residual < KG_ABS, || format!("hopf_3: k={k} residual {:.3e}", kg.residual));
                        }
                        Err(e) => out.failures.push(format!("hopf_3: k={k}: {e}")),
                    }
                }
            }
        }
        None => out.failures.push("hopf_3 missing".into()),
    }
    // the intermediate pairings go through the pointwise suite
    for p in all {
        abs_check(
            &mut out,
            p,
            &["del_f_wedge_delbar_f_pairing", "ddbar_f_pairing", "kgauduchon_expansion", "kgauduchon_density"],
            KG_ABS,
            |_| true,
        );
    }
    let mut bismut = 0;
    for i in ints {
        for c in i.integrals.iter().filter(|c| c.identity_id == "bismut_scalar_difference_integral") {
            if c.status == Status::Skipped {
                continue;
            }
            bismut += 1;
            out.check(c.status == Status::Pass, || {
                format!("{}: Bismut integral difference {:?}", i.name, c.difference.map(|d| (d.value, d.std_error)))
            });
        }
    }
    out.check(bismut >= 2, || format!("Bismut integral identity evaluated on only {bismut} members"));
    out.notes.push(format!("hopf_3 max residual {worst:.2e}, Bismut integral on {bismut} members"));
    out
}

fn component_jets(m: &Manifold, x: &[f64], order: u8) -> Result<Vec<hermscal_core::jet::Jet>, String> {
    let f = m.fields(x, order).map_err(|e| e.to_string())?;
    Ok(f.h.into_iter().chain(f.j).collect())
}

fn rel_ok(jet: f64, fd: f64) -> bool {
    (jet - fd).abs() <= FD_REL * jet.abs().max(fd.abs()).max(1.0)
}

fn fd_oracle_criterion(all: &[Prepared]) -> Outcome {
    let mut out = Outcome::default();
    let mut compared = 0usize;
    let mut no_third = Vec::new();
    for p in all {
        let m = &p.entry.manifold;
        let d = m.dim();
        let in_domain = |y: &[f64]| m.domain.chart_contains(y);
        for x in sample_points(&m.domain, d, FD_POINTS, POINT_SEED + 1) {
            let jets = match component_jets(m, &x, 3) {
                Ok(j) => j,
                Err(e) => {
                    out.failures.push(format!("{}: {e}", m.name));
                    continue;
                }
            };
            let has_third = jets.iter().all(|j| j.is_constant() || j.order() >= 3);
            // third derivatives from central differences of the exact Hessian
            let shifted: Option<Vec<(Vec<_>, Vec<_>)>> = has_third.then(|| {
                (0..d)
                    .map(|k| {
                        let mut xp = x.clone();
                        let mut xm = x.clone();
                        xp[k] += FD_STEP;
                        xm[k] -= FD_STEP;
                        (component_jets(m, &xp, 2).unwrap_or_default(), component_jets(m, &xm, 2).unwrap_or_default())
                    })
                    .collect()
            });
            if !has_third && !no_third.contains(&m.name) {
                no_third.push(m.name.clone());
            }
            // every component shares the stencil, so evaluate each node once
            let cache: RefCell<HashMap<Vec<u64>, Vec<f64>>> = RefCell::default();
            let values = |y: &[f64]| -> hermscal_core::Result<Vec<f64>> {
                let key: Vec<u64> = y.iter().map(|v| v.to_bits()).collect();
                if let Some(v) = cache.borrow().get(&key) {
                    return Ok(v.clone());
                }
                let f = m.fields(y, 0)?;
                let v: Vec<f64> = f.h.iter().chain(f.j.iter()).map(|j| j.value()).collect();
                cache.borrow_mut().insert(key, v.clone());
                Ok(v)
            };
            for (ci, jet) in jets.iter().enumerate() {
                let field = |y: &[f64]| -> hermscal_core::Result<f64> { Ok(values(y)?[ci]) };
                let fd = match fd_oracle(field, &ChartPoint::new(x.clone()), FD_STEP, &in_domain) {
                    Ok(fd) => fd,
                    Err(e) => {
                        out.failures.push(format!("{}: component {ci}: {e}", m.name));
                        continue;
                    }
                };
                let mut bad = Vec::new();
                if !rel_ok(jet.value(), fd.value) {
                    bad.push(format!("value {} vs {}", jet.value(), fd.value));
                }
                for a in 0..d {
                    if !rel_ok(jet.d1(a), fd.grad[a]) {
                        bad.push(format!("d{a} {} vs {}", jet.d1(a), fd.grad[a]));
                    }
                    for b in 0..d {
                        if !rel_ok(jet.d2(a, b), fd.hess[a * d + b]) {
                            bad.push(format!("d{a}{b} {} vs {}", jet.d2(a, b), fd.hess[a * d + b]));
                        }
                    }
                }
                compared += 1 + d + d * d;
                if let Some(sh) = &shifted {
                    for (k, (jp, jm)) in sh.iter().enumerate() {
                        if jp.len() != jets.len() || jm.len() != jets.len() {
                            bad.push(format!("shifted fields unavailable along {k}"));
                            continue;
                        }
                        for a in 0..d {
                            for b in 0..d {
                                let est = (jp[ci].d2(a, b) - jm[ci].d2(a, b)) / (2.0 * FD_STEP);
                                if !rel_ok(jet.d3(a, b, k), est) {
                                    bad.push(format!("d{a}{b}{k} {} vs {est}", jet.d3(a, b, k)));
                                }
                            }
                        }
                    }
                    compared += d * d * d;
                }
                out.check(bad.is_empty(), || format!("{}: component {ci} at {x:?}: {}", m.name, bad.join("; ")));
            }
        }
    }
    out.notes.push(format!("{compared} derivative entries"));
    if !no_third.is_empty() {
        out.notes.push(format!("no third-order jets on {}", no_third.join(", ")));
    }
    out
}

fn determinism() -> Outcome {
    let mut out = Outcome::default();
    for name in ["hopf_2", "perturbed_torus"] {
        let render = |threads: usize| -> Result<String, String> {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| e.to_string())?;
            pool.install(|| {
                let m = lookup(name).map_err(|e| e.to_string())?.manifold;
                let ts = t_grid(m.n);
                let points = sample_points(&m.domain, m.dim(), 20, POINT_SEED);
                let raw = prepare_points(&m, &points, &ts);
                let tol = Tolerance { abs: CLOSED_FORM_ABS, rel: CLOSED_FORM_REL };
                let suite = suite_on_contexts(m.n, &points, &raw, &ts, tol);
                let q = Quadrature::new(&m, 256, QUAD_SEED, &ts).map_err(|e| e.to_string())?;
                let signs = sign_theorem_checks(&q, suite.class, &ts, tol).map_err(|e| e.to_string())?;
                let ints = integral_identity_checks(&q, suite.class, &ts, tol).map_err(|e| e.to_string())?;
                serde_json::to_string(&(suite, signs, ints)).map_err(|e| e.to_string())
            })
        };
        match (render(1), render(4), render(4)) {
            (Ok(a), Ok(b), Ok(c)) => {
                out.check(b == c, || format!("{name}: repeated runs differ"));
                out.check(a == b, || format!("{name}: output depends on the thread count"));
            }
            (a, b, c) => {
                for e in [a.err(), b.err(), c.err()].into_iter().flatten() {
                    out.failures.push(format!("{name}: {e}"));
                }
            }
        }
    }
    out
}

fn main() -> ExitCode {
    let started = std::time::Instant::now();
    let prepared: Result<Vec<Prepared>, String> = catalog().into_iter().map(Prepared::new).collect();
    let prepared = match prepared {
        Ok(p) => p,
        Err(e) => {
            println!("FAIL setup: {e}");
            return ExitCode::FAILURE;
        }
    };
    let ints = integrate_all(&prepared);
    let mut rows: Vec<(u8, &str, Outcome)> = vec![
        (1, "scalar curvatures by contraction match the closed forms", closed_forms(&prepared)),
        (2, "Lichnerowicz connection two-path agreement", two_paths(&prepared)),
        (3, "norm identities and decomposition reconstruction", norm_identities(&prepared)),
        (4, "Chern torsion identities", torsion(&prepared)),
        (5, "first Chern form and Ricci form shifts", shifts(&prepared)),
        (6, "reference scalar tables", tables(&prepared)),
    ];
    match &ints {
        Ok(ints) => {
            rows.push((7, "integral sign theorems and equality diagnoses", sign_criteria(ints)));
            rows.push((
                8,
                "k-Gauduchon densities and the Bismut integral identity",
                kgauduchon_criteria(&prepared, ints),
            ));
            let vol: Vec<String> =
                ints.iter().map(|i| format!("{}:{:.1e}", i.name, i.quadrature.volume_residual)).collect();
            rows[5].2.notes.push(format!("volume residuals {}", vol.join(" ")));
        }
        Err(e) => {
            for (id, what) in [
                (7, "integral sign theorems and equality diagnoses"),
                (8, "k-Gauduchon densities and the Bismut integral identity"),
            ] {
                rows.push((id, what, Outcome { failures: vec![e.clone()], notes: vec![] }));
            }
        }
    }
    rows.push((9, "jets agree with finite differences", fd_oracle_criterion(&prepared)));
    rows.push((10, "reports are byte-identical across runs and thread counts", determinism()));

    let mut all_pass = true;
    for (id, what, o) in &rows {
        let pass = o.failures.is_empty();
        all_pass &= pass;
        let notes = if o.notes.is_empty() { String::new() } else { format!(" ({})", o.notes.join("; ")) };
        println!("{} criterion {id}: {what}{notes}", if pass { "PASS" } else { "FAIL" });
        for f in o.failures.iter().take(10) {
            println!("    {f}");
        }
        if o.failures.len() > 10 {
            println!("    ... {} more", o.failures.len() - 10);
        }
    }
    println!("acceptance finished in {:.1}s", started.elapsed().as_secs_f64());
    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
