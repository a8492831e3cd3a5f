//! Relative projective resolutions, comparison maps between them, and injective
//! coresolutions obtained by dualizing resolutions over the opposite algebra.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::modcat::{
    factor_through_mono, lift_through, Conflation, HomSpace, Module, ModuleCategory, ModuleMap, ModuleRef,
};
use crate::propclass::ProperClassSpec;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ResolutionError {
    #[error("injective coresolutions are only constructed for the class of all conflations")]
    RelativeCoresolution,
    #[error("the algebra is not self-injective")]
    NotSelfInjective,
}

/// A finite dimension, or a statement that none was found inside the search window.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DimVerdict {
    Finite(usize),
    ExceedsWindow,
}

impl DimVerdict {
    pub fn is_finite(self) -> bool {
        matches!(self, DimVerdict::Finite(_))
    }

    pub fn finite(self) -> Option<usize> {
        match self {
            DimVerdict::Finite(n) => Some(n),
            DimVerdict::ExceedsWindow => None,
        }
    }
}

/// `... → P_1 → P_0 → M` stored as the conflations `K_{i+1} → P_i → K_i`, `K_0 = M`.
#[derive(Clone, Debug)]
pub struct XiResolution {
    base: ModuleRef,
    steps: Vec<Conflation>,
}

impl XiResolution {
    pub fn base(&self) -> &ModuleRef {
        &self.base
    }

    /// Number of stored steps; `P_i` is available for `i < len()`.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn step(&self, i: usize) -> &Conflation {
        &self.steps[i]
    }

    pub fn steps(&self) -> &[Conflation] {
        &self.steps
    }

    pub fn projective(&self, i: usize) -> &ModuleRef {
        self.steps[i].middle()
    }

    /// `K_i`, for `i <= len()`.
    pub fn syzygy(&self, i: usize) -> &ModuleRef {
        if i == 0 {
            &self.base
        } else {
            self.steps[i - 1].left()
        }
    }

    /// `d_i = f_{i-1} ∘ g_i : P_i → P_{i-1}` for `1 <= i < len()`.
    pub fn differential(&self, i: usize) -> ModuleMap {
        assert!(i >= 1 && i < self.steps.len());
        self.steps[i - 1].inflation().compose(self.steps[i].deflation())
    }

    pub fn augmentation(&self) -> &ModuleMap {
        self.steps[0].deflation()
    }

    /// Adjacent steps splice and every step lies in `xi`.
    pub fn validate(&self, xi: &ProperClassSpec) -> bool {
        (0..self.steps.len()).all(|i| {
            let joins = **self.steps[i].right() == **self.syzygy(i);
            joins && xi.contains(&self.steps[i])
        }) && (2..self.steps.len()).all(|i| self.differential(i - 1).compose(&self.differential(i)).is_zero())
    }
}

/// `M → I_0 → I_1 → ...` stored as conflations `K^j → I_j → K^{j+1}`, `K^0 = M`.
#[derive(Clone, Debug)]
pub struct Coresolution {
    base: ModuleRef,
    steps: Vec<Conflation>,
}

impl Coresolution {
    pub fn base(&self) -> &ModuleRef {
        &self.base
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn step(&self, j: usize) -> &Conflation {
        &self.steps[j]
    }

    pub fn injective(&self, j: usize) -> &ModuleRef {
        self.steps[j].middle()
    }

    pub fn cosyzygy(&self, j: usize) -> &ModuleRef {
        if j == 0 {
            &self.base
        } else {
            self.steps[j - 1].right()
        }
    }

    /// `I_j → I_{j+1}`, for `j + 1 < len()`.
    pub fn differential(&self, j: usize) -> ModuleMap {
        self.steps[j + 1].inflation().compose(self.steps[j].deflation())
    }

    pub fn coaugmentation(&self) -> &ModuleMap {
        self.steps[0].inflation()
    }
}

/// A lift of `base: M → N` to resolutions, one component `P^M_i → P^N_i` per degree.
#[derive(Clone, Debug)]
pub struct ChainMap {
    pub source: Arc<XiResolution>,
    pub target: Arc<XiResolution>,
    pub base: ModuleMap,
    pub components: Vec<ModuleMap>,
}

impl ChainMap {
    /// All stored squares commute.
    pub fn validate(&self) -> bool {
        let (rm, rn) = (&self.source, &self.target);
        let Some(phi0) = self.components.first() else {
            return true;
        };
        if rn.augmentation().compose(phi0) != self.base.compose(rm.augmentation()) {
            return false;
        }
        (1..self.components.len()).all(|i| {
            rn.differential(i).compose(&self.components[i]) == self.components[i - 1].compose(&rm.differential(i))
        })
    }
}

/// An algebra, a proper class on its module category, and a memo table of resolutions.
pub struct Session {
    cat: ModuleCategory,
    xi: ProperClassSpec,
    resolutions: Mutex<HashMap<Module, Arc<XiResolution>>>,
    opposite: OnceLock<ModuleCategory>,
}

impl Session {
    pub fn new(cat: ModuleCategory, xi: ProperClassSpec) -> Self {
        Session {
            cat,
            xi,
            resolutions: Mutex::new(HashMap::new()),
            opposite: OnceLock::new(),
        }
    }

    pub fn category(&self) -> &ModuleCategory {
        &self.cat
    }

    pub fn xi(&self) -> &ProperClassSpec {
        &self.xi
    }

    pub fn is_xi_projective(&self, m: &ModuleRef) -> bool {
        self.xi.xi_projective(&self.cat, m)
    }

    fn next_step(&self, k: &ModuleRef) -> Conflation {
        if self.is_xi_projective(k) {
            let zero = self.cat.zero();
            Conflation::new(ModuleMap::zero(&zero, k), ModuleMap::identity(k)).expect("trivial step")
        } else {
            self.xi.xi_cover(&self.cat, k).conflation
        }
    }

    /// A resolution with at least `length` steps. Relatively projective syzygies are
    /// resolved by themselves, so the tower becomes zero right after them.
    pub fn resolution(&self, m: &ModuleRef, length: usize) -> Arc<XiResolution> {
        let cached = self.resolutions.lock().unwrap().get(&**m).cloned();
        if let Some(r) = &cached {
            if r.len() >= length {
                return r.clone();
            }
        }
        let mut steps = cached.map(|r| r.steps.clone()).unwrap_or_default();
        while steps.len() < length {
            let k = steps.last().map(|s| s.left().clone()).unwrap_or_else(|| m.clone());
            steps.push(self.next_step(&k));
        }
        let res = Arc::new(XiResolution { base: m.clone(), steps });
        let mut table = self.resolutions.lock().unwrap();
        let entry = table.entry((**m).clone()).or_insert_with(|| res.clone());
        if entry.len() < res.len() {
            *entry = res.clone();
        }
        entry.clone()
    }

    /// Smallest `n <= window` with `K_n` relatively projective.
    pub fn xi_pd(&self, m: &ModuleRef, window: usize) -> DimVerdict {
        let r = self.resolution(m, window);
        (0..=window)
            .find(|&n| self.is_xi_projective(r.syzygy(n)))
            .map_or(DimVerdict::ExceedsWindow, DimVerdict::Finite)
    }

    /// The `k`-th syzygy of `m` along its canonical resolution.
    pub fn syzygy(&self, m: &ModuleRef, k: usize) -> ModuleRef {
        self.resolution(m, k).syzygy(k).clone()
    }

    pub fn opposite_category(&self) -> &ModuleCategory {
        self.opposite.get_or_init(|| self.cat.opposite())
    }

    /// Injective coresolution of `m`: the dual of a minimal projective resolution of
    /// `D m` over the opposite algebra.
    pub fn coresolution(&self, m: &ModuleRef, length: usize) -> Result<Coresolution, ResolutionError> {
        if !self.xi.is_all() {
            return Err(ResolutionError::RelativeCoresolution);
        }
        let op = self.opposite_category();
        let dm = Arc::new(m.dual().rehome(op.quiver()));
        let mut op_steps: Vec<Conflation> = Vec::with_capacity(length);
        let mut k = dm;
        for _ in 0..length {
            let step = if op.is_projective(&k) {
                let zero = op.zero();
                Conflation::new(ModuleMap::zero(&zero, &k), ModuleMap::identity(&k)).expect("trivial step")
            } else {
                op.projective_cover(&k).conflation
            };
            k = step.left().clone();
            op_steps.push(step);
        }
        let q = self.cat.quiver();
        let steps = op_steps.iter().map(|s| s.dual().rehome(q)).collect();
        Ok(Coresolution { base: m.clone(), steps })
    }

    /// The `k`-th cosyzygy `K^k`, defined here only over self-injective algebras.
    pub fn cosyzygy(&self, m: &ModuleRef, k: usize) -> Result<ModuleRef, ResolutionError> {
        if !self.cat.is_self_injective() {
            return Err(ResolutionError::NotSelfInjective);
        }
        if k == 0 {
            return Ok(m.clone());
        }
        Ok(self.coresolution(m, k)?.cosyzygy(k).clone())
    }
}

/// Lift `mu: M → N` to the given resolutions, degree by degree. With `perturb`, each
/// component is shifted by a random map through the next syzygy of `N`, producing a
/// different but equally valid lift.
pub fn lift_morphism<R: Rng>(
    mu: &ModuleMap,
    rm: &Arc<XiResolution>,
    rn: &Arc<XiResolution>,
    mut perturb: Option<&mut R>,
) -> ChainMap {
    let n = rm.len().min(rn.len());
    let mut components = Vec::with_capacity(n);
    let mut kappa = mu.clone();
    for i in 0..n {
        let (sm, sn) = (rm.step(i), rn.step(i));
        let t = kappa.compose(sm.deflation());
        let mut phi = lift_through(sn.deflation(), &t).expect("relatively projective terms lift");
        if let Some(rng) = perturb.as_deref_mut() {
            let h = HomSpace::new(sm.middle(), sn.left()).random_element(rng);
            phi = phi.add(&sn.inflation().compose(&h));
        }
        kappa = factor_through_mono(sn.inflation(), &phi.compose(sm.inflation())).expect("syzygy map restricts");
        components.push(phi);
    }
    ChainMap {
        source: rm.clone(),
        target: rn.clone(),
        base: mu.clone(),
        components,
    }
}

/// Maps `s_i : P^M_i → P^N_{i+1}` with `φ_i − ψ_i = d s_i + s_{i−1} d` in every degree
/// where `P^N_{i+1}` is stored, solved one degree at a time.
pub fn homotopy_between(phi: &ChainMap, psi: &ChainMap) -> Option<Vec<ModuleMap>> {
    assert_eq!(phi.components.len(), psi.components.len());
    let (rm, rn) = (&phi.source, &phi.target);
    let degrees = phi.components.len().min(rn.len().saturating_sub(1));
    let mut s: Vec<ModuleMap> = Vec::with_capacity(degrees);
    for i in 0..degrees {
        let mut r = phi.components[i].sub(&psi.components[i]);
        if i > 0 {
            r = r.sub(&s[i - 1].compose(&rm.differential(i)));
        }
        s.push(lift_through(&rn.differential(i + 1), &r)?);
    }
    Some(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modcat::find_isomorphism;
    use crate::modcat::tests::{cyclic, linear, truncated_loop};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn session(cat: ModuleCategory) -> Session {
        Session::new(cat, ProperClassSpec::All)
    }

    #[test]
    fn dual_numbers_resolution_is_constant() {
        let s = session(truncated_loop(2, 2));
        let k = s.category().simple(0);
        let r = s.resolution(&k, 4);
        assert!(r.validate(s.xi()));
        for i in 0..4 {
            assert_eq!(**r.projective(i), **s.category().projective(0));
            assert_eq!(**r.syzygy(i + 1), *k);
        }
    }

    #[test]
    fn cube_syzygies_alternate() {
        let cat = truncated_loop(3, 3);
        let m2 = cyclic(&cat, 2);
        let s = session(cat);
        let k = s.category().simple(0);
        let r = s.resolution(&k, 4);
        assert!(r.validate(s.xi()));
        for i in 0..4 {
            let expect = if i % 2 == 0 { k.clone() } else { m2.clone() };
            assert!(find_isomorphism(r.syzygy(i), &expect).is_some(), "K_{i}");
        }
    }

    #[test]
    fn projective_dimensions() {
        let s = session(linear(2, 2));
        let s1 = s.category().simple(0);
        assert_eq!(s.xi_pd(&s1, 12), DimVerdict::Finite(1));
        assert_eq!(s.xi_pd(s.category().projective(0), 12), DimVerdict::Finite(0));
        let d = session(truncated_loop(2, 2));
        let k = d.category().simple(0);
        assert_eq!(d.xi_pd(&k, 12), DimVerdict::ExceedsWindow);
        let r = s.resolution(&s1, 3);
        assert!(r.syzygy(2).is_zero());
    }

    #[test]
    fn memo_extends_consistently() {
        let s = session(truncated_loop(3, 3));
        let k = s.category().simple(0);
        let short = s.resolution(&k, 2);
        let long = s.resolution(&k, 5);
        assert!(long.len() >= 5);
        for i in 0..2 {
            assert_eq!(short.step(i).deflation(), long.step(i).deflation());
        }
    }

    #[test]
    fn lifts_and_homotopies() {
        let s = session(truncated_loop(2, 2));
        let k = s.category().simple(0);
        let r = s.resolution(&k, 5);
        let id = ModuleMap::identity(&k);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = lift_morphism::<ChaCha8Rng>(&id, &r, &r, None);
        let b = lift_morphism(&id, &r, &r, Some(&mut rng));
        assert!(a.validate() && b.validate());
        assert!(homotopy_between(&a, &b).is_some());
        assert!(homotopy_between(&a, &a).unwrap().iter().all(|h| h.is_zero()));
        let zero = lift_morphism::<ChaCha8Rng>(&ModuleMap::zero(&k, &k), &r, &r, None);
        assert!(homotopy_between(&a, &zero).is_none());
        let z2 = lift_morphism(&ModuleMap::zero(&k, &k), &r, &r, Some(&mut rng));
        assert!(homotopy_between(&z2, &zero).is_some());
    }

    #[test]
    fn coresolutions_and_cosyzygies() {
        let s = session(truncated_loop(2, 2));
        let k = s.category().simple(0);
        let c = s.coresolution(&k, 3).unwrap();
        for j in 0..3 {
            assert!(find_isomorphism(c.injective(j), s.category().projective(0)).is_some());
        }
        assert_eq!(*s.cosyzygy(&k, 1).unwrap(), *k);
        let a = s.category().projective(0).clone();
        assert!(s.cosyzygy(&a, 1).unwrap().is_zero());

        let cat3 = truncated_loop(3, 3);
        let m2 = cyclic(&cat3, 2);
        let s3 = session(cat3);
        let k3 = s3.category().simple(0);
        assert!(find_isomorphism(&s3.cosyzygy(&k3, 1).unwrap(), &m2).is_some());

        let a2 = session(linear(2, 2));
        let s2 = a2.category().simple(1);
        let co = a2.coresolution(&s2, 3).unwrap();
        assert!(co.cosyzygy(2).is_zero());
        assert!(a2.category().is_injective(co.injective(0)));
        assert_eq!(a2.cosyzygy(&s2, 1), Err(ResolutionError::NotSelfInjective));
        let rel = Session::new(truncated_loop(2, 2), ProperClassSpec::Relative(vec![k.clone()]));
        assert!(rel.coresolution(&rel.category().simple(0), 2).is_err());
    }

    #[test]
    fn relative_resolution_of_relative_projective_is_trivial() {
        let cat = truncated_loop(2, 2);
        let k = cat.simple(0);
        let s = Session::new(cat, ProperClassSpec::Relative(vec![k.clone()]));
        assert_eq!(s.xi_pd(&k, 4), DimVerdict::Finite(0));
        let r = s.resolution(&k, 3);
        assert!(r.syzygy(1).is_zero());
        assert!(r.validate(s.xi()));
    }
}
