//! Proper classes of conflations.
//!
//! Two shapes are supported: the class of all short exact sequences, and the relative
//! class of sequences on which `Hom(X, -)` stays exact for every `X` in a finite list.
//! The regular module is always treated as a member of that list, which guarantees
//! enough relative projectives.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::modcat::{Conflation, DirectSum, HomSpace, ModuleCategory, ModuleMap, ModuleRef};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProperClassError {
    #[error("a relative proper class needs at least one module")]
    EmptyRelative,
    #[error("relative module lives over a different algebra")]
    ForeignModule,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ProperClassSpec {
    All,
    Relative(Vec<ModuleRef>),
}

/// A relative cover `K → Q → M` in the class, with `Q` relatively projective.
#[derive(Clone, Debug)]
pub struct XiCover {
    pub conflation: Conflation,
    /// Vertex of each indecomposable projective summand of `Q`.
    pub projective_vertices: Vec<usize>,
    /// How many copies of each relative module appear in `Q`.
    pub relative_multiplicities: Vec<usize>,
}

fn hom_is_surjective_on(x: &ModuleRef, g: &ModuleMap) -> bool {
    let into_b = HomSpace::new(x, g.source());
    let target_dim = HomSpace::new(x, g.target()).dim();
    let len = ModuleMap::flat_len(x, g.target());
    into_b.image_rank(|h| g.compose(h).flatten(), len) == target_dim
}

impl ProperClassSpec {
    pub fn relative(cat: &ModuleCategory, modules: Vec<ModuleRef>) -> Result<Self, ProperClassError> {
        if modules.is_empty() {
            return Err(ProperClassError::EmptyRelative);
        }
        if modules.iter().any(|m| **m.quiver() != **cat.quiver()) {
            return Err(ProperClassError::ForeignModule);
        }
        Ok(ProperClassSpec::Relative(modules))
    }

    pub fn is_all(&self) -> bool {
        matches!(self, ProperClassSpec::All)
    }

    pub fn relative_modules(&self) -> &[ModuleRef] {
        match self {
            ProperClassSpec::All => &[],
            ProperClassSpec::Relative(xs) => xs,
        }
    }

    /// Membership of a (valid) conflation.
    pub fn contains(&self, c: &Conflation) -> bool {
        if c.validate().is_err() {
            return false;
        }
        self.relative_modules()
            .iter()
            .all(|x| hom_is_surjective_on(x, c.deflation()))
    }

    /// Indecomposable projectives followed by the relative modules: a finite set whose
    /// additive closure is the class of relative projectives.
    pub fn generators(&self, cat: &ModuleCategory) -> Vec<ModuleRef> {
        let mut gens = cat.projectives().to_vec();
        gens.extend(self.relative_modules().iter().cloned());
        gens
    }

    /// The canonical cover: the projective cover, plus for relative classes one copy of
    /// `X` per basis element of `Hom(X, M)`, mapped by evaluation.
    pub fn xi_cover(&self, cat: &ModuleCategory, m: &ModuleRef) -> XiCover {
        let pc = cat.projective_cover(m);
        if self.is_all() {
            return XiCover {
                conflation: pc.conflation,
                projective_vertices: pc.summand_vertices,
                relative_multiplicities: vec![],
            };
        }
        let mut summands: Vec<ModuleRef> = pc
            .summand_vertices
            .iter()
            .map(|&v| cat.projective(v).clone())
            .collect();
        let proj_sum = DirectSum::new(cat.quiver(), &summands);
        let mut comps: Vec<ModuleMap> = (0..summands.len())
            .map(|i| pc.conflation.deflation().compose(&proj_sum.injections[i]))
            .collect();
        let mut mult = Vec::new();
        for x in self.relative_modules() {
            let hs = HomSpace::new(x, m);
            mult.push(hs.dim());
            for h in hs.basis {
                summands.push(x.clone());
                comps.push(h);
            }
        }
        let sum = DirectSum::new(cat.quiver(), &summands);
        let refs: Vec<Option<&ModuleMap>> = comps.iter().map(Some).collect();
        let defl = DirectSum::row(&sum, &refs, m);
        XiCover {
            conflation: Conflation::from_deflation(defl).expect("cover is surjective"),
            projective_vertices: pc.summand_vertices,
            relative_multiplicities: mult,
        }
    }

    /// Relatively projective iff the canonical cover splits.
    pub fn xi_projective(&self, cat: &ModuleCategory, m: &ModuleRef) -> bool {
        if m.is_zero() || cat.is_projective(m) {
            return true;
        }
        if self.is_all() {
            return false;
        }
        self.xi_cover(cat, m).conflation.section().is_some()
    }

    /// A left approximation of `m` by relative projectives: the minimal projective
    /// approximation, enlarged greedily by relative modules until every map into them
    /// factors.
    pub fn left_approximation(&self, cat: &ModuleCategory, m: &ModuleRef) -> (DirectSum, ModuleMap) {
        let (psum, pmap) = cat.left_projective_approximation(m);
        if self.is_all() {
            return (psum, pmap);
        }
        let mut summands = psum.summands.clone();
        let mut comps: Vec<ModuleMap> = psum.projections.iter().map(|p| p.compose(&pmap)).collect();
        let field = m.field();
        for x in self.relative_modules() {
            let len = ModuleMap::flat_len(m, x);
            let current = DirectSum::new(cat.quiver(), &summands);
            let refs: Vec<Option<&ModuleMap>> = comps.iter().map(Some).collect();
            let phi = DirectSum::column(m, &refs, &current);
            let mut span: Vec<Vec<u32>> = HomSpace::new(&current.module, x)
                .basis
                .iter()
                .map(|u| u.compose(&phi).flatten())
                .collect();
            let endo = HomSpace::new(x, x);
            let mut rank = crate::linalg::rank_of_vectors(field, len, &span);
            for h in HomSpace::new(m, x).basis {
                span.push(h.flatten());
                let r = crate::linalg::rank_of_vectors(field, len, &span);
                span.pop();
                if r == rank {
                    continue;
                }
                span.extend(endo.basis.iter().map(|e| e.compose(&h).flatten()));
                rank = crate::linalg::rank_of_vectors(field, len, &span);
                summands.push(x.clone());
                comps.push(h);
            }
        }
        let sum = DirectSum::new(cat.quiver(), &summands);
        let refs: Vec<Option<&ModuleMap>> = comps.iter().map(Some).collect();
        let map = DirectSum::column(m, &refs, &sum);
        (sum, map)
    }

    pub fn describe(&self) -> String {
        match self {
            ProperClassSpec::All => "all".into(),
            ProperClassSpec::Relative(xs) => format!("relative({} modules)", xs.len()),
        }
    }
}

/// Anything the axiom audit can be run against.
pub trait ConflationClass: Sync {
    fn label(&self) -> String;
    fn contains(&self, c: &Conflation) -> bool;
    /// A random member of the class ending in `c`.
    fn sample_member(&self, cat: &ModuleCategory, c: &ModuleRef, pool: &[ModuleRef], rng: &mut ChaCha8Rng) -> Conflation;
}

impl ConflationClass for ProperClassSpec {
    fn label(&self) -> String {
        self.describe()
    }

    fn contains(&self, c: &Conflation) -> bool {
        ProperClassSpec::contains(self, c)
    }

    /// Every member ending in `c` is a pushout of the canonical cover, so pushing the
    /// cover out along random maps samples the whole class.
    fn sample_member(&self, cat: &ModuleCategory, c: &ModuleRef, pool: &[ModuleRef], rng: &mut ChaCha8Rng) -> Conflation {
        let cover = self.xi_cover(cat, c).conflation;
        push_out_randomly(&cover, pool, rng)
    }
}

fn push_out_randomly(base: &Conflation, pool: &[ModuleRef], rng: &mut ChaCha8Rng) -> Conflation {
    let k = base.left().clone();
    let target = if rng.gen_bool(0.25) {
        k.clone()
    } else {
        pool.choose(rng).expect("nonempty pool").clone()
    };
    let alpha = HomSpace::new(&k, &target).random_element(rng);
    base.pushout(&alpha).0
}

/// A random conflation (not necessarily in any class) ending in `c`.
/// A deliberately broken class: only the trivial conflations `0 → C → C`. It is not
/// closed under adding split sequences, so audits of it must report violations.
#[derive(Clone, Copy, Debug, Default)]
pub struct SplitOverZero;

impl ConflationClass for SplitOverZero {
    fn label(&self) -> String {
        "split-over-zero".into()
    }
    fn contains(&self, c: &Conflation) -> bool {
        c.left().is_zero() && c.deflation().is_iso()
    }
    fn sample_member(&self, cat: &ModuleCategory, c: &ModuleRef, _: &[ModuleRef], _: &mut ChaCha8Rng) -> Conflation {
        Conflation::split(&cat.zero(), c)
    }
}

pub fn sample_conflation(cat: &ModuleCategory, c: &ModuleRef, pool: &[ModuleRef], rng: &mut ChaCha8Rng) -> Conflation {
    if rng.gen_bool(0.15) {
        let a = pool.choose(rng).expect("nonempty pool");
        return Conflation::split(a, c);
    }
    let cover = cat.projective_cover(c).conflation;
    push_out_randomly(&cover, pool, rng)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    SplitContainment,
    Coproducts,
    BaseChange,
    CobaseChange,
    Saturation,
}

impl Axiom {
    pub const ALL: [Axiom; 5] = [
        Axiom::SplitContainment,
        Axiom::Coproducts,
        Axiom::BaseChange,
        Axiom::CobaseChange,
        Axiom::Saturation,
    ];
}

/// A conflation written out in global coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConflationRecord {
    pub left_dims: Vec<usize>,
    pub middle_dims: Vec<usize>,
    pub right_dims: Vec<usize>,
    pub inflation: Vec<Vec<u32>>,
    pub deflation: Vec<Vec<u32>>,
}

impl From<&Conflation> for ConflationRecord {
    fn from(c: &Conflation) -> Self {
        ConflationRecord {
            left_dims: c.left().vertex_dims().to_vec(),
            middle_dims: c.middle().vertex_dims().to_vec(),
            right_dims: c.right().vertex_dims().to_vec(),
            inflation: c.inflation().matrix().to_rows(),
            deflation: c.deflation().matrix().to_rows(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    pub tested: usize,
    pub violations: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub axiom: Axiom,
    pub trial: usize,
    pub conflation: ConflationRecord,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub class: String,
    pub trials: usize,
    pub seed: u64,
    pub checks: Vec<AxiomCheck>,
    pub counterexamples: Vec<Counterexample>,
}

impl AuditReport {
    pub fn violations(&self, axiom: Axiom) -> usize {
        self.checks.iter().filter(|c| c.axiom == axiom).map(|c| c.violations).sum()
    }

    pub fn total_violations(&self) -> usize {
        self.checks.iter().map(|c| c.violations).sum()
    }
}

/// Counterexamples kept per axiom in a report.
const MAX_COUNTEREXAMPLES: usize = 3;

struct TrialOutcome {
    tested: [bool; 5],
    failures: Vec<(Axiom, Conflation)>,
}

fn run_trial<C: ConflationClass + ?Sized>(
    cat: &ModuleCategory,
    class: &C,
    pool: &[ModuleRef],
    rng: &mut ChaCha8Rng,
) -> TrialOutcome {
    let mut tested = [true; 5];
    let mut failures = Vec::new();
    let pick = |rng: &mut ChaCha8Rng| pool.choose(rng).expect("nonempty pool").clone();

    let split = Conflation::split(&pick(rng), &pick(rng));
    if !class.contains(&split) {
        failures.push((Axiom::SplitContainment, split));
    }

    let (c1, c2) = (pick(rng), pick(rng));
    let sum = class
        .sample_member(cat, &c1, pool, rng)
        .direct_sum(&class.sample_member(cat, &c2, pool, rng));
    if !class.contains(&sum) {
        failures.push((Axiom::Coproducts, sum));
    }

    let c = pick(rng);
    let member = class.sample_member(cat, &c, pool, rng);
    let other = if rng.gen_bool(0.25) { c.clone() } else { pick(rng) };
    let gamma = HomSpace::new(&other, &c).random_element(rng);
    let (pulled, _) = member.pullback(&gamma);
    if !class.contains(&pulled) {
        failures.push((Axiom::BaseChange, pulled));
    }

    let a = member.left().clone();
    let other = if rng.gen_bool(0.25) { a.clone() } else { pick(rng) };
    let alpha = HomSpace::new(&a, &other).random_element(rng);
    let (pushed, _) = member.pushout(&alpha);
    if !class.contains(&pushed) {
        failures.push((Axiom::CobaseChange, pushed));
    }

    // Saturation: with M = B1 ×_C B2, membership of A2 → B2 → C and A1 → M → B2 must
    // force membership of A1 → B1 → C.
    let c = pick(rng);
    let delta1 = sample_conflation(cat, &c, pool, rng);
    let delta2 = class.sample_member(cat, &c, pool, rng);
    let (row, _) = delta1.pullback(delta2.deflation());
    if class.contains(&delta2) && class.contains(&row) {
        if !class.contains(&delta1) {
            failures.push((Axiom::Saturation, delta1));
        }
    } else {
        tested[4] = false;
    }
    TrialOutcome { tested, failures }
}

/// Randomized audit of the proper-class axioms. Each trial owns an RNG stream derived
/// from `seed` and the trial index, so the report does not depend on scheduling.
pub fn audit_axioms<C: ConflationClass + ?Sized>(
    cat: &ModuleCategory,
    class: &C,
    pool: &[ModuleRef],
    trials: usize,
    seed: u64,
) -> AuditReport {
    assert!(!pool.is_empty(), "audit needs at least one module");
    let outcomes: Vec<TrialOutcome> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            run_trial(cat, class, pool, &mut rng)
        })
        .collect();
    let mut checks: Vec<AxiomCheck> = Axiom::ALL
        .iter()
        .map(|&axiom| AxiomCheck {
            axiom,
            tested: 0,
            violations: 0,
        })
        .collect();
    let mut counterexamples = Vec::new();
    for (t, out) in outcomes.iter().enumerate() {
        for (i, &ran) in out.tested.iter().enumerate() {
            checks[i].tested += usize::from(ran);
        }
        for (axiom, c) in &out.failures {
            let check = checks.iter_mut().find(|ch| ch.axiom == *axiom).unwrap();
            check.violations += 1;
            if check.violations <= MAX_COUNTEREXAMPLES {
                counterexamples.push(Counterexample {
                    axiom: *axiom,
                    trial: t,
                    conflation: c.into(),
                });
            }
        }
    }
    AuditReport {
        class: class.label(),
        trials,
        seed,
        checks,
        counterexamples,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modcat::tests::{cyclic, truncated_loop};

    #[test]
    fn membership_examples() {
        let cat = truncated_loop(2, 2);
        let k = cat.simple(0);
        let seq = cat.projective_cover(&k).conflation;
        let rel = ProperClassSpec::relative(&cat, vec![k.clone()]).unwrap();
        assert!(!rel.contains(&seq));
        assert!(ProperClassSpec::All.contains(&seq));
        let split = Conflation::split(&k, cat.projective(0));
        assert!(rel.contains(&split));
        assert!(ProperClassSpec::All.contains(&split));
    }

    #[test]
    fn relative_projectivity() {
        let cat = truncated_loop(2, 2);
        let k = cat.simple(0);
        let a = cat.regular();
        let rel = ProperClassSpec::relative(&cat, vec![k.clone()]).unwrap();
        assert!(!ProperClassSpec::All.xi_projective(&cat, &k));
        assert!(rel.xi_projective(&cat, &k));
        assert!(ProperClassSpec::All.xi_projective(&cat, &a));
        assert!(rel.xi_projective(&cat, &a));
    }

    #[test]
    fn covers() {
        let cat = truncated_loop(2, 2);
        let k = cat.simple(0);
        let all = ProperClassSpec::All.xi_cover(&cat, &k);
        assert_eq!(all.conflation.middle().dim(), 2);
        assert_eq!(all.conflation.left().dim(), 1);
        assert!(!all.conflation.is_split());
        let rel = ProperClassSpec::relative(&cat, vec![k.clone()]).unwrap();
        let cov = rel.xi_cover(&cat, &k);
        assert_eq!(cov.relative_multiplicities, vec![1]);
        assert!(cov.conflation.is_split());
        assert!(rel.contains(&cov.conflation));
    }

    #[test]
    fn covers_are_members_with_projective_middle() {
        let cat = truncated_loop(3, 3);
        let rel = ProperClassSpec::relative(&cat, vec![cat.simple(0)]).unwrap();
        for xi in [ProperClassSpec::All, rel] {
            for j in 1..=3 {
                let m = cyclic(&cat, j);
                let cov = xi.xi_cover(&cat, &m);
                assert!(xi.contains(&cov.conflation));
                assert!(xi.xi_projective(&cat, cov.conflation.middle()));
            }
        }
    }

    #[test]
    fn relative_left_approximation_factors_maps_into_generators() {
        let cat = truncated_loop(3, 3);
        let m2 = cyclic(&cat, 2);
        let rel = ProperClassSpec::relative(&cat, vec![cat.simple(0)]).unwrap();
        let (sum, phi) = rel.left_approximation(&cat, &m2);
        for g in rel.generators(&cat) {
            let target = HomSpace::new(&m2, &g).dim();
            let len = ModuleMap::flat_len(&m2, &g);
            let got = HomSpace::new(&sum.module, &g).image_rank(|u| u.compose(&phi).flatten(), len);
            assert_eq!(got, target);
        }
    }

    #[test]
    fn audit_small() {
        let cat = truncated_loop(2, 2);
        let pool = vec![cat.simple(0), cat.regular()];
        let rep = audit_axioms(&cat, &ProperClassSpec::All, &pool, 20, 7);
        assert_eq!(rep.total_violations(), 0);
        let bad = audit_axioms(&cat, &SplitOverZero, &pool, 20, 7);
        assert!(bad.violations(Axiom::SplitContainment) > 0);
        assert!(!bad.counterexamples.is_empty());
        assert_eq!(rep, audit_axioms(&cat, &ProperClassSpec::All, &pool, 20, 7));
    }
}
