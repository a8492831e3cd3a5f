use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use xihom::cohomology::{
    build_complete_resolution, complete_ext_colimit_oracle, complete_ext_stable_oracle, gpd, gprojective_test,
    xi_ext, xi_ext_injective_side, xi_ext_two_resolutions, ColimitValue, CompleteValidation, GpdVerdict, GprojVerdict,
    Regime,
};
use xihom::instance::Instance;
use xihom::modcat::ModuleRef;
use xihom::propclass::{audit_axioms, AuditReport, SplitOverZero};
use xihom::resolution::DimVerdict;
use xihom::verify::{verify, verify_catalog, VerifyOptions, VerifyReport};

use crate::output::Table;

/// A finished command: its JSON result, its table, and whether the verdict held.
pub struct Outcome {
    pub result: serde_json::Value,
    pub flags: serde_json::Value,
    pub seed: Option<u64>,
    pub table: Table,
    pub ok: bool,
}

impl Outcome {
    fn new<T: Serialize>(result: &T, flags: serde_json::Value, table: Table, ok: bool) -> Self {
        Outcome {
            result: serde_json::to_value(result).expect("results serialize"),
            flags,
            seed: None,
            table,
            ok,
        }
    }
}

fn dims(m: &ModuleRef) -> String {
    let parts: Vec<String> = m.vertex_dims().iter().map(|d| d.to_string()).collect();
    format!("({})", parts.join(","))
}

fn dim_verdict(v: DimVerdict) -> String {
    match v {
        DimVerdict::Finite(n) => n.to_string(),
        DimVerdict::ExceedsWindow => "exceeds window".into(),
    }
}

fn regime(r: Regime) -> &'static str {
    match r {
        Regime::CertifiedSelfInjective => "certified (self-injective)",
        Regime::CertifiedFinitePd => "certified (finite pd)",
        Regime::WindowVerified => "window verified",
    }
}

#[derive(Serialize)]
struct BasisResult {
    p: u32,
    vertices: usize,
    arrows: Vec<String>,
    dimension: usize,
    basis: Vec<String>,
    projective_dims: Vec<usize>,
    self_injective: bool,
}

pub fn basis(inst: &Instance) -> Outcome {
    let cat = inst.session.category();
    let b = cat.basis();
    let q = cat.quiver();
    let result = BasisResult {
        p: q.field().modulus(),
        vertices: q.vertices(),
        arrows: q.arrows().iter().map(|a| a.name.clone()).collect(),
        dimension: b.dim(),
        basis: (0..b.dim()).map(|i| b.label(i)).collect(),
        projective_dims: (0..q.vertices()).map(|v| cat.projective(v).dim()).collect(),
        self_injective: cat.is_self_injective(),
    };
    let mut t = Table::new(format!("algebra of dimension {} over F_{}", result.dimension, result.p), &["index", "basis path"]);
    for (i, l) in result.basis.iter().enumerate() {
        t.row(vec![i.to_string(), l.clone()]);
    }
    t.note(format!("indecomposable projective dimensions: {:?}", result.projective_dims));
    t.note(format!("self-injective: {}", result.self_injective));
    Outcome::new(&result, json!({}), t, true)
}

#[derive(Serialize)]
struct ResolutionTerm {
    degree: usize,
    projective_dims: Vec<usize>,
    top: Vec<usize>,
    syzygy_dims: Vec<usize>,
}

#[derive(Serialize)]
struct ResolveResult {
    module: String,
    proper_class: String,
    length: usize,
    terms: Vec<ResolutionTerm>,
    pd: DimVerdict,
}

fn top(inst: &Instance, m: &ModuleRef) -> Vec<usize> {
    let cat = inst.session.category();
    let mut out = vec![0; cat.quiver().vertices()];
    for v in cat.projective_cover(m).summand_vertices {
        out[v] += 1;
    }
    out
}

pub fn resolve(inst: &Instance, name: &str, m: &ModuleRef, length: usize) -> Outcome {
    let s = &inst.session;
    let r = s.resolution(m, length);
    let terms: Vec<ResolutionTerm> = (0..length)
        .map(|i| ResolutionTerm {
            degree: i,
            projective_dims: r.projective(i).vertex_dims().to_vec(),
            top: top(inst, r.projective(i)),
            syzygy_dims: r.syzygy(i + 1).vertex_dims().to_vec(),
        })
        .collect();
    let result = ResolveResult {
        module: name.into(),
        proper_class: s.xi().describe(),
        length,
        pd: s.xi_pd(m, length),
        terms,
    };
    let mut t = Table::new(
        format!("relative resolution of {name} ({} class)", result.proper_class),
        &["degree", "term dims", "top", "next syzygy dims"],
    );
    for term in &result.terms {
        t.row(vec![
            term.degree.to_string(),
            format!("{:?}", term.projective_dims),
            format!("{:?}", term.top),
            format!("{:?}", term.syzygy_dims),
        ]);
    }
    t.note(format!("projective dimension: {}", dim_verdict(result.pd)));
    Outcome::new(&result, json!({ "length": length }), t, true)
}

#[derive(Serialize)]
struct PdResult {
    module: String,
    window: usize,
    pd: DimVerdict,
}

pub fn pd(inst: &Instance, name: &str, m: &ModuleRef, window: usize) -> Outcome {
    let result = PdResult {
        module: name.into(),
        window,
        pd: inst.session.xi_pd(m, window),
    };
    let mut t = Table::new(format!("relative projective dimension of {name} {}", dims(m)), &[]);
    t.note(format!("pd = {} (window {window})", dim_verdict(result.pd)));
    Outcome::new(&result, json!({ "window": window }), t, true)
}

#[derive(Serialize)]
struct ExtRow {
    degree: usize,
    projective: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    two_resolutions: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    injective: Option<usize>,
    agree: bool,
}

#[derive(Serialize)]
struct ExtResult {
    source: String,
    target: String,
    rows: Vec<ExtRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    injective_side: Option<String>,
}

pub fn ext(inst: &Instance, names: (&str, &str), m: &ModuleRef, n: &ModuleRef, degrees: (i64, i64)) -> anyhow::Result<Outcome> {
    if degrees.0 < 0 {
        anyhow::bail!("relative ext is only defined in nonnegative degrees");
    }
    let s = &inst.session;
    let injective_ok = s.xi().is_all();
    let rows: Vec<ExtRow> = (degrees.0..=degrees.1)
        .into_par_iter()
        .map(|d| {
            let d = d as usize;
            let projective = xi_ext(s, m, n, d).dimension;
            let two_resolutions = (d >= 1).then(|| xi_ext_two_resolutions(s, m, n, d).dimension);
            let injective = if injective_ok {
                xi_ext_injective_side(s, m, n, d).ok().map(|g| g.dimension)
            } else {
                None
            };
            let agree = two_resolutions.is_none_or(|x| x == projective) && injective.is_none_or(|x| x == projective);
            ExtRow {
                degree: d,
                projective,
                two_resolutions,
                injective,
                agree,
            }
        })
        .collect();
    let ok = rows.iter().all(|r| r.agree);
    let result = ExtResult {
        source: names.0.into(),
        target: names.1.into(),
        rows,
        injective_side: (!injective_ok).then(|| "not available for a relative class".to_string()),
    };
    let mut t = Table::new(
        format!("relative ext({}, {})", names.0, names.1),
        &["degree", "projective", "two resolutions", "injective", "agree"],
    );
    let opt = |x: Option<usize>| x.map_or("-".to_string(), |v| v.to_string());
    for r in &result.rows {
        t.row(vec![
            r.degree.to_string(),
            r.projective.to_string(),
            opt(r.two_resolutions),
            opt(r.injective),
            r.agree.to_string(),
        ]);
    }
    if let Some(note) = &result.injective_side {
        t.note(format!("injective side: {note}"));
    }
    Ok(Outcome::new(&result, json!({ "from": degrees.0, "to": degrees.1 }), t, ok))
}

#[derive(Serialize)]
struct CompleteRow {
    degree: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    dimension: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stable_oracle: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    colimit_oracle: Option<ColimitValue>,
    agree: bool,
}

#[derive(Serialize)]
struct CompleteResult {
    source: String,
    target: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    regime: Option<Regime>,
    #[serde(skip_serializing_if = "Option::is_none")]
    validation: Option<CompleteValidation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    rows: Vec<CompleteRow>,
}

pub fn complete_ext(
    inst: &Instance,
    names: (&str, &str),
    m: &ModuleRef,
    n: &ModuleRef,
    degrees: (i64, i64),
    window: usize,
    stability: usize,
) -> Outcome {
    let s = &inst.session;
    let flags = json!({ "from": degrees.0, "to": degrees.1, "window": window, "stability": stability });
    let title = format!("complete ext({}, {})", names.0, names.1);
    let cr = match build_complete_resolution(s, m, window) {
        Ok(cr) => cr,
        Err(e) => {
            let result = CompleteResult {
                source: names.0.into(),
                target: names.1.into(),
                regime: None,
                validation: None,
                error: Some(e.to_string()),
                rows: Vec::new(),
            };
            let mut t = Table::new(title, &[]);
            t.note(format!("no complete resolution: {e}"));
            return Outcome::new(&result, flags, t, false);
        }
    };
    let validation = cr.validate(s);
    let rows: Vec<CompleteRow> = (degrees.0..=degrees.1)
        .into_par_iter()
        .map(|d| {
            let value = cr.ext(n, d);
            let stable = complete_ext_stable_oracle(s, m, n, d).ok().map(|g| g.dimension);
            let colimit = Some(complete_ext_colimit_oracle(s, m, n, d, window, stability));
            let (dimension, error) = match value {
                Ok(g) => (Some(g.dimension), None),
                Err(e) => (None, Some(e.to_string())),
            };
            let agree = dimension.is_some()
                && stable.is_none_or(|x| Some(x) == dimension)
                && match colimit {
                    Some(ColimitValue::Stable { dimension: x, .. }) => Some(x) == dimension,
                    _ => true,
                };
            CompleteRow {
                degree: d,
                dimension,
                error,
                stable_oracle: stable,
                colimit_oracle: colimit,
                agree,
            }
        })
        .collect();
    let ok = validation.passed() && rows.iter().all(|r| r.agree);
    let result = CompleteResult {
        source: names.0.into(),
        target: names.1.into(),
        regime: Some(cr.regime),
        validation: Some(validation),
        error: None,
        rows,
    };
    let mut t = Table::new(title, &["degree", "dimension", "stable oracle", "colimit oracle", "agree"]);
    for r in &result.rows {
        let colimit = match r.colimit_oracle {
            Some(ColimitValue::Stable { dimension, from_k }) => format!("{dimension} (from k={from_k})"),
            Some(ColimitValue::NotStabilized) => "not stabilized".into(),
            None => "-".into(),
        };
        t.row(vec![
            r.degree.to_string(),
            r.dimension.map_or_else(|| r.error.clone().unwrap_or_default(), |x| x.to_string()),
            r.stable_oracle.map_or("-".into(), |x| x.to_string()),
            colimit,
            r.agree.to_string(),
        ]);
    }
    t.note(format!("regime: {}", regime(cr.regime)));
    t.note(format!(
        "complete resolution validates: {}",
        result.validation.as_ref().is_some_and(|v| v.passed())
    ));
    Outcome::new(&result, flags, t, ok)
}

#[derive(Serialize)]
struct GpdResult {
    module: String,
    window: usize,
    pd: DimVerdict,
    gpd: GpdVerdict,
    gorenstein_projective: GprojVerdict,
}

pub fn gorenstein(inst: &Instance, name: &str, m: &ModuleRef, window: usize) -> Outcome {
    let s = &inst.session;
    let result = GpdResult {
        module: name.into(),
        window,
        pd: s.xi_pd(m, window),
        gpd: gpd(s, m, window),
        gorenstein_projective: gprojective_test(s, m, window),
    };
    let mut t = Table::new(format!("Gorenstein dimension of {name} {}", dims(m)), &[]);
    t.note(format!("gpd = {} ({})", dim_verdict(result.gpd.value), regime(result.gpd.regime)));
    t.note(format!("pd = {}", dim_verdict(result.pd)));
    t.note(format!(
        "Gorenstein projective: {} ({})",
        result.gorenstein_projective.member,
        regime(result.gorenstein_projective.regime)
    ));
    if let Some(f) = &result.gorenstein_projective.failure {
        t.note(format!("first failing check: {f}"));
    }
    Outcome::new(&result, json!({ "window": window }), t, true)
}

pub fn audit(inst: &Instance, trials: usize, seed: u64, fixture: bool) -> Outcome {
    let cat = inst.session.category();
    let pool: Vec<ModuleRef> = inst.modules.values().cloned().collect();
    let report: AuditReport = if fixture {
        audit_axioms(cat, &SplitOverZero, &pool, trials, seed)
    } else {
        audit_axioms(cat, inst.session.xi(), &pool, trials, seed)
    };
    let mut t = Table::new(format!("axiom audit of {} ({trials} trials)", report.class), &["axiom", "tested", "violations"]);
    for c in &report.checks {
        t.row(vec![
            serde_json::to_value(c.axiom).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
            c.tested.to_string(),
            c.violations.to_string(),
        ]);
    }
    let ok = report.total_violations() == 0;
    let mut out = Outcome::new(&report, json!({ "trials": trials, "fixture": fixture }), t, ok);
    out.seed = Some(seed);
    out
}

pub fn run_verify(instances: Option<Vec<(String, Instance)>>, opts: VerifyOptions) -> Outcome {
    let report: VerifyReport = match &instances {
        Some(list) => verify(list, &opts),
        None => verify_catalog(&opts),
    };
    let mut t = Table::new(
        format!("verification of {}", report.instances.join(", ")),
        &["criterion", "result", "checks", "failed", "name"],
    );
    for c in &report.criteria {
        t.row(vec![
            c.id.to_string(),
            if c.passed { "pass" } else { "FAIL" }.into(),
            c.checks.to_string(),
            c.failed.to_string(),
            c.name.clone(),
        ]);
    }
    for c in &report.criteria {
        for f in &c.failures {
            t.note(format!("criterion {}: {f}", c.id));
        }
    }
    let flags = json!({
        "window": opts.window,
        "length": opts.length,
        "stability": opts.stability,
        "audit_trials": opts.audit_trials,
        "homotopy_trials": opts.homotopy_trials,
    });
    let mut out = Outcome::new(&report, flags, t, report.passed());
    out.seed = Some(opts.seed);
    out
}
