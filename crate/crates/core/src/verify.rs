//! End-to-end verification: eight numbered checks run over a set of loaded instances.
//!
//! Every check runs generically on each instance. When verifying the bundled catalog,
//! known values for particular modules are checked as well.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cohomology::{
    build_complete_resolution, complete_ext_colimit_oracle, complete_ext_stable_oracle, gpd, vanishing_report,
    xi_ext, xi_ext_injective_side, xi_ext_two_resolutions, ColimitValue, Regime,
};
use crate::instance::{catalog, Instance};
use crate::modcat::{HomSpace, ModuleMap, ModuleRef};
use crate::propclass::{audit_axioms, Axiom, ProperClassSpec, SplitOverZero};
use crate::resolution::{homotopy_between, lift_morphism, ChainMap, DimVerdict, Session};

const KEPT_FAILURES: usize = 12;

#[derive(Clone, Debug, Serialize)]
pub struct VerifyOptions {
    pub window: usize,
    pub length: usize,
    pub stability: usize,
    pub audit_trials: usize,
    pub homotopy_trials: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            window: 12,
            length: 12,
            stability: 4,
            audit_trials: 200,
            homotopy_trials: 100,
            seed: 20_240_917,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub checks: usize,
    pub failed: usize,
    pub failures: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub instances: Vec<String>,
    pub options: VerifyOptions,
    pub criteria: Vec<CriterionResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }

    pub fn criterion(&self, id: u8) -> Option<&CriterionResult> {
        self.criteria.iter().find(|c| c.id == id)
    }
}

#[derive(Default)]
struct Tally {
    checks: usize,
    failed: usize,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failed += 1;
            if self.failures.len() < KEPT_FAILURES {
                self.failures.push(what());
            }
        }
    }

    fn eq<T: PartialEq + std::fmt::Debug>(&mut self, got: T, want: T, what: impl FnOnce() -> String) {
        let ok = got == want;
        self.check(ok, || format!("{}: got {got:?}, expected {want:?}", what()));
    }

    fn absorb(&mut self, other: Tally) {
        self.checks += other.checks;
        self.failed += other.failed;
        let room = KEPT_FAILURES.saturating_sub(self.failures.len());
        self.failures.extend(other.failures.into_iter().take(room));
        self.notes.extend(other.notes);
    }

    fn finish(self, id: u8, name: &str) -> CriterionResult {
        CriterionResult {
            id,
            name: name.into(),
            passed: self.failed == 0,
            checks: self.checks,
            failed: self.failed,
            failures: self.failures,
            notes: self.notes,
        }
    }
}

struct Ctx<'a> {
    instances: &'a [(String, Instance)],
    opts: &'a VerifyOptions,
    expectations: bool,
}

impl Ctx<'_> {
    fn named(&self, name: &str) -> Option<&Instance> {
        if !self.expectations {
            return None;
        }
        self.instances.iter().find(|(n, _)| n == name).map(|(_, i)| i)
    }

    fn each(&self, f: impl Fn(&str, &Instance) -> Tally + Sync) -> Tally {
        let parts: Vec<Tally> = self.instances.par_iter().map(|(n, i)| f(n, i)).collect();
        let mut t = Tally::default();
        for p in parts {
            t.absorb(p);
        }
        t
    }
}

/// Named modules followed by any simple modules not already present.
fn test_modules(inst: &Instance) -> Vec<ModuleRef> {
    let cat = inst.session.category();
    let mut out: Vec<ModuleRef> = inst.modules.values().cloned().collect();
    for v in 0..cat.quiver().vertices() {
        let s = cat.simple(v);
        if !out.contains(&s) {
            out.push(s);
        }
    }
    out
}

fn named_pairs(inst: &Instance) -> Vec<(&str, &ModuleRef, &str, &ModuleRef)> {
    let mut out = Vec::new();
    for (a, m) in &inst.modules {
        for (b, n) in &inst.modules {
            out.push((a.as_str(), m, b.as_str(), n));
        }
    }
    out
}

fn audits(ctx: &Ctx) -> Tally {
    let trials = ctx.opts.audit_trials;
    let seed = ctx.opts.seed;
    let mut t = ctx.each(|name, inst| {
        let mut t = Tally::default();
        let cat = inst.session.category();
        let pool: Vec<ModuleRef> = inst.modules.values().cloned().collect();
        let rep = audit_axioms(cat, inst.session.xi(), &pool, trials, seed);
        t.eq(rep.total_violations(), 0, || format!("{name}: violations for {}", rep.class));
        let fixture = audit_axioms(cat, &SplitOverZero, &pool, trials, seed);
        t.check(fixture.total_violations() > 0, || format!("{name}: the split-over-zero fixture passed every axiom"));
        t.check(fixture.violations(Axiom::SplitContainment) > 0, || {
            format!("{name}: the fixture was not caught by split containment")
        });
        t
    });
    for name in ["dual_numbers", "truncated_cube"] {
        let Some(inst) = ctx.named(name) else { continue };
        let cat = inst.session.category();
        let pool: Vec<ModuleRef> = inst.modules.values().cloned().collect();
        let k = inst.modules["k"].clone();
        let relative = ProperClassSpec::relative(cat, vec![k]).expect("k belongs to the algebra");
        for class in [ProperClassSpec::All, relative] {
            let rep = audit_axioms(cat, &class, &pool, trials, seed);
            t.eq(rep.total_violations(), 0, || format!("{name}: violations for {}", rep.class));
            t.eq(rep.trials, trials, || format!("{name}: trials run"));
        }
    }
    t
}

fn two_resolutions(ctx: &Ctx) -> Tally {
    let mut t = ctx.each(|name, inst| {
        let mut t = Tally::default();
        for (a, m, b, n) in named_pairs(inst) {
            for d in 1..=6 {
                let one = xi_ext(&inst.session, m, n, d).dimension;
                let two = xi_ext_two_resolutions(&inst.session, m, n, d).dimension;
                t.eq(two, one, || format!("{name}: ext^{d}({a}, {b}) via two resolutions"));
            }
        }
        t
    });
    if let Some(inst) = ctx.named("dual_numbers") {
        let k = &inst.modules["k"];
        for d in 1..=6 {
            t.eq(xi_ext(&inst.session, k, k, d).dimension, 1, || format!("dual_numbers: ext^{d}(k, k)"));
        }
    }
    t
}

fn injective_side(ctx: &Ctx) -> Tally {
    ctx.each(|name, inst| {
        let mut t = Tally::default();
        if !inst.session.xi().is_all() {
            t.notes.push(format!("{name}: injective side skipped for a relative class"));
            return t;
        }
        for (a, m, b, n) in named_pairs(inst) {
            for d in 0..=6 {
                let proj = xi_ext(&inst.session, m, n, d).dimension;
                match xi_ext_injective_side(&inst.session, m, n, d) {
                    Ok(inj) => t.eq(inj.dimension, proj, || format!("{name}: ext^{d}({a}, {b}) injective side")),
                    Err(e) => t.check(false, || format!("{name}: ext^{d}({a}, {b}) injective side: {e}")),
                }
            }
        }
        t
    })
}

fn vanishing_bounds(ctx: &Ctx) -> Tally {
    let window = ctx.opts.window;
    let mut t = ctx.each(|name, inst| {
        let mut t = Tally::default();
        let s = &inst.session;
        let tests = test_modules(inst);
        let all = s.xi().is_all();
        let top = 6.min(window.saturating_sub(2));
        for (a, m) in &inst.modules {
            let pd = s.xi_pd(m, window);
            for n in 0..=top {
                let bounded = matches!(pd, DimVerdict::Finite(p) if p <= n);
                let vanishes = tests.iter().all(|x| xi_ext(s, m, x, n + 1).dimension == 0);
                if all {
                    t.eq(vanishes, bounded, || format!("{name}: pd({a}) <= {n} against ext^{} vanishing", n + 1));
                } else if bounded {
                    t.check(vanishes, || format!("{name}: pd({a}) <= {n} but ext^{} survives", n + 1));
                }
            }
            let g = gpd(s, m, window);
            if g.value.is_finite() {
                match build_complete_resolution(s, m, window) {
                    Ok(cr) => match cr.ext(m, 0) {
                        Ok(h) => t.eq(h.dimension == 0, pd.is_finite(), || {
                            format!("{name}: complete ext^0({a}, {a}) vanishing against finite pd")
                        }),
                        Err(e) => t.check(false, || format!("{name}: complete ext^0({a}, {a}): {e}")),
                    },
                    Err(e) => t.check(false, || format!("{name}: complete resolution of {a}: {e}")),
                }
            }
        }
        t
    });
    if let Some(inst) = ctx.named("dual_numbers") {
        let s = &inst.session;
        let k = &inst.modules["k"];
        t.eq(s.xi_pd(k, window), DimVerdict::ExceedsWindow, || "dual_numbers: pd(k)".into());
        let ce0 = build_complete_resolution(s, k, window).ok().and_then(|c| c.ext(k, 0).ok()).map(|h| h.dimension);
        t.eq(ce0, Some(1), || "dual_numbers: complete ext^0(k, k)".into());
    }
    for name in ["a2", "a3"] {
        let Some(inst) = ctx.named(name) else { continue };
        let s = &inst.session;
        for (a, m) in &inst.modules {
            t.check(s.xi_pd(m, window).is_finite(), || format!("{name}: pd({a}) should be finite"));
            let cr = match build_complete_resolution(s, m, window) {
                Ok(cr) => cr,
                Err(e) => {
                    t.check(false, || format!("{name}: complete resolution of {a}: {e}"));
                    continue;
                }
            };
            for (b, n) in &inst.modules {
                for d in -6..=6 {
                    let dim = cr.ext(n, d).map(|h| h.dimension).ok();
                    t.eq(dim, Some(0), || format!("{name}: complete ext^{d}({a}, {b})"));
                }
            }
        }
    }
    t
}

fn complete_resolutions(ctx: &Ctx) -> Tally {
    let window = ctx.opts.window;
    ctx.each(|name, inst| {
        let mut t = Tally::default();
        let s = &inst.session;
        for (a, m) in &inst.modules {
            if !gpd(s, m, window).value.is_finite() {
                t.notes.push(format!("{name}: {a} has no Gorenstein projective syzygy within the window"));
                if ctx.expectations {
                    t.check(false, || format!("{name}: {a} should have finite Gorenstein dimension"));
                }
                continue;
            }
            match build_complete_resolution(s, m, window) {
                Ok(cr) => {
                    let v = cr.validate(s);
                    t.check(v.passed(), || format!("{name}: complete resolution of {a} fails validation: {v:?}"));
                }
                Err(e) => t.check(false, || format!("{name}: complete resolution of {a}: {e}")),
            }
        }
        t
    })
}

fn oracles(ctx: &Ctx) -> Tally {
    let (window, stability) = (ctx.opts.window, ctx.opts.stability);
    let mut t = ctx.each(|name, inst| {
        let mut t = Tally::default();
        let s = &inst.session;
        if !(s.xi().is_all() && s.category().is_self_injective()) {
            t.notes.push(format!("{name}: oracles need a self-injective algebra and all conflations"));
            return t;
        }
        for (a, m, b, n) in named_pairs(inst) {
            let cr = match build_complete_resolution(s, m, window) {
                Ok(cr) => cr,
                Err(e) => {
                    t.check(false, || format!("{name}: complete resolution of {a}: {e}"));
                    continue;
                }
            };
            t.eq(cr.regime, Regime::CertifiedSelfInjective, || format!("{name}: regime for {a}"));
            for d in -6..=6i64 {
                let value = cr.ext(n, d).map(|h| h.dimension).ok();
                let stable = complete_ext_stable_oracle(s, m, n, d).map(|h| h.dimension).ok();
                t.eq(stable, value, || format!("{name}: stable oracle at ({a}, {b}, {d})"));
                if let ColimitValue::Stable { dimension, .. } = complete_ext_colimit_oracle(s, m, n, d, window, stability) {
                    t.eq(Some(dimension), value, || format!("{name}: colimit oracle at ({a}, {b}, {d})"));
                }
            }
        }
        t
    });
    for name in ["dual_numbers", "truncated_cube"] {
        let Some(inst) = ctx.named(name) else { continue };
        let s = &inst.session;
        let k = &inst.modules["k"];
        for d in -6..=6i64 {
            let value = build_complete_resolution(s, k, window).ok().and_then(|c| c.ext(k, d).ok()).map(|h| h.dimension);
            t.eq(value, Some(1), || format!("{name}: complete ext^{d}(k, k)"));
            let colimit = complete_ext_colimit_oracle(s, k, k, d, window, stability);
            t.check(matches!(colimit, ColimitValue::Stable { dimension: 1, .. }), || {
                format!("{name}: colimit oracle at degree {d} gave {colimit:?}")
            });
        }
    }
    t
}

fn vanishing_matrices(ctx: &Ctx) -> Tally {
    let window = ctx.opts.window;
    let mut t = ctx.each(|name, inst| {
        let mut t = Tally::default();
        let tests = test_modules(inst);
        for (a, m) in &inst.modules {
            let r = vanishing_report(&inst.session, m, window, &tests, 6);
            if !r.gpd.value.is_finite() {
                continue;
            }
            t.eq(r.pd_criterion_holds, Some(true), || format!("{name}: pd criterion for {a}"));
            t.eq(r.gpd_criterion_holds, Some(true), || format!("{name}: gpd criterion for {a}"));
        }
        t
    });
    if let Some(inst) = ctx.named("dual_numbers") {
        let k = &inst.modules["k"];
        let r = vanishing_report(&inst.session, k, window, &test_modules(inst), 6);
        t.eq(r.gpd.value, DimVerdict::Finite(0), || "dual_numbers: gpd(k)".into());
        t.eq(r.pd, DimVerdict::ExceedsWindow, || "dual_numbers: pd(k)".into());
        t.check(r.complete_ext0_self.is_some_and(|d| d > 0), || "dual_numbers: complete ext^0(k, k) vanishes".into());
    }
    if let Some(inst) = ctx.named("a2") {
        let s1 = &inst.modules["S1"];
        let r = vanishing_report(&inst.session, s1, window, &test_modules(inst), 6);
        t.eq(r.gpd.value, DimVerdict::Finite(1), || "a2: gpd(S1)".into());
        t.eq(r.pd, DimVerdict::Finite(1), || "a2: pd(S1)".into());
        t.eq(r.complete_ext0_self, Some(0), || "a2: complete ext^0(S1, S1)".into());
    }
    t
}

/// `φ_i − ψ_i = d s_i + s_{i−1} d` in every degree the homotopy covers.
fn is_homotopy(phi: &ChainMap, psi: &ChainMap, s: &[ModuleMap]) -> bool {
    let (rm, rn) = (&phi.source, &phi.target);
    (0..s.len()).all(|i| {
        let diff = phi.components[i].sub(&psi.components[i]);
        let mut rhs = rn.differential(i + 1).compose(&s[i]);
        if i > 0 {
            rhs = rhs.add(&s[i - 1].compose(&rm.differential(i)));
        }
        diff == rhs
    })
}

fn homotopies(ctx: &Ctx) -> Tally {
    let length = ctx.opts.length.max(1);
    let outcomes: Vec<Tally> = (0..ctx.opts.homotopy_trials)
        .into_par_iter()
        .map(|trial| {
            let mut t = Tally::default();
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.opts.seed);
            rng.set_stream(trial as u64);
            let (name, inst) = &ctx.instances[trial % ctx.instances.len()];
            let mods: Vec<&ModuleRef> = inst.modules.values().collect();
            let (Some(m), Some(n)) = (mods.choose(&mut rng), mods.choose(&mut rng)) else {
                return t;
            };
            let mu = HomSpace::new(m, n).random_element(&mut rng);
            let s: &Session = &inst.session;
            let rm = s.resolution(m, length);
            let rn = s.resolution(n, length + 1);
            let phi = lift_morphism(&mu, &rm, &rn, Some(&mut rng));
            let psi = lift_morphism(&mu, &rm, &rn, Some(&mut rng));
            t.check(phi.validate() && psi.validate(), || format!("trial {trial} on {name}: lift is not a chain map"));
            match homotopy_between(&phi, &psi) {
                Some(h) => t.check(is_homotopy(&phi, &psi, &h), || format!("trial {trial} on {name}: homotopy equations fail")),
                None => t.check(false, || format!("trial {trial} on {name}: no homotopy found")),
            }
            t
        })
        .collect();
    let mut t = Tally::default();
    for o in outcomes {
        t.absorb(o);
    }
    t
}

type Criterion = (u8, &'static str, fn(&Ctx) -> Tally);

const CRITERIA: [Criterion; 8] = [
    (1, "proper class axioms", audits),
    (2, "ext via two resolutions", two_resolutions),
    (3, "projective and injective sides agree", injective_side),
    (4, "vanishing detects dimensions", vanishing_bounds),
    (5, "complete resolutions validate", complete_resolutions),
    (6, "complete ext matches oracles", oracles),
    (7, "vanishing matrices", vanishing_matrices),
    (8, "lifts are unique up to homotopy", homotopies),
];

fn run(instances: &[(String, Instance)], opts: &VerifyOptions, expectations: bool) -> VerifyReport {
    let ctx = Ctx {
        instances,
        opts,
        expectations,
    };
    let criteria = CRITERIA
        .par_iter()
        .map(|(id, name, f)| f(&ctx).finish(*id, name))
        .collect();
    VerifyReport {
        instances: instances.iter().map(|(n, _)| n.clone()).collect(),
        options: opts.clone(),
        criteria,
    }
}

/// Verify arbitrary instances using the generic checks only.
pub fn verify(instances: &[(String, Instance)], opts: &VerifyOptions) -> VerifyReport {
    assert!(!instances.is_empty(), "nothing to verify");
    run(instances, opts, false)
}

/// Verify the bundled catalog, including its known values.
pub fn verify_catalog(opts: &VerifyOptions) -> VerifyReport {
    let instances: Vec<(String, Instance)> = catalog::load_all().into_iter().map(|(n, i)| (n.to_string(), i)).collect();
    run(&instances, opts, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tally_keeps_counts_beyond_stored_failures() {
        let mut t = Tally::default();
        for i in 0..KEPT_FAILURES + 5 {
            t.check(false, || format!("failure {i}"));
        }
        t.check(true, String::new);
        let r = t.finish(9, "demo");
        assert_eq!((r.checks, r.failed, r.failures.len()), (KEPT_FAILURES + 6, KEPT_FAILURES + 5, KEPT_FAILURES));
        assert!(!r.passed);
    }

    #[test]
    fn generic_verification_of_one_instance() {
        let inst = catalog::load("a2").unwrap().unwrap();
        let opts = VerifyOptions {
            window: 8,
            length: 6,
            audit_trials: 20,
            homotopy_trials: 10,
            ..VerifyOptions::default()
        };
        let report = verify(&[("a2".into(), inst)], &opts);
        for c in &report.criteria {
            assert!(c.passed, "{c:?}");
        }
    }
}
