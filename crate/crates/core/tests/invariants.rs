use std::sync::OnceLock;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use xihom::cohomology::xi_ext;
use xihom::instance::{catalog, Instance};
use xihom::modcat::{Conflation, DirectSum, HomSpace, ModuleMap, ModuleRef};
use xihom::propclass::sample_conflation;

fn instances() -> &'static [(&'static str, Instance)] {
    static CELL: OnceLock<Vec<(&'static str, Instance)>> = OnceLock::new();
    CELL.get_or_init(catalog::load_all)
}

struct Draw {
    inst: &'static Instance,
    pool: Vec<ModuleRef>,
    rng: ChaCha8Rng,
}

impl Draw {
    fn new(which: usize, seed: u64) -> Self {
        let all = instances();
        let inst = &all[which % all.len()].1;
        Draw {
            inst,
            pool: inst.modules.values().cloned().collect(),
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn module(&mut self) -> ModuleRef {
        self.pool.choose(&mut self.rng).unwrap().clone()
    }

    fn map(&mut self, from: &ModuleRef, to: &ModuleRef) -> ModuleMap {
        HomSpace::new(from, to).random_element(&mut self.rng)
    }

    fn conflation(&mut self) -> Conflation {
        let c = self.module();
        sample_conflation(self.inst.session.category(), &c, &self.pool, &mut self.rng)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sampled_conflations_are_exact(which in 0usize..6, seed in any::<u64>()) {
        let mut d = Draw::new(which, seed);
        let e = d.conflation();
        prop_assert!(e.validate().is_ok());
        prop_assert_eq!(e.left().dim() + e.right().dim(), e.middle().dim());
    }

    #[test]
    fn base_change_is_functorial(which in 0usize..6, seed in any::<u64>()) {
        let mut d = Draw::new(which, seed);
        let e = d.conflation();
        let (c1, c2) = (d.module(), d.module());
        let gamma = d.map(&c1, e.right());
        let delta = d.map(&c2, &c1);
        let (once, _) = e.pullback(&gamma.compose(&delta));
        let (step, _) = e.pullback(&gamma);
        let (twice, _) = step.pullback(&delta);
        prop_assert!(once.baer_equivalent(&twice));
    }

    #[test]
    fn cobase_change_is_functorial(which in 0usize..6, seed in any::<u64>()) {
        let mut d = Draw::new(which, seed);
        let e = d.conflation();
        let (a1, a2) = (d.module(), d.module());
        let alpha = d.map(e.left(), &a1);
        let beta = d.map(&a1, &a2);
        let (once, _) = e.pushout(&beta.compose(&alpha));
        let (step, _) = e.pushout(&alpha);
        let (twice, _) = step.pushout(&beta);
        prop_assert!(once.baer_equivalent(&twice));
    }

    #[test]
    fn base_and_cobase_change_commute(which in 0usize..6, seed in any::<u64>()) {
        let mut d = Draw::new(which, seed);
        let e = d.conflation();
        let (a, c) = (d.module(), d.module());
        let alpha = d.map(e.left(), &a);
        let gamma = d.map(&c, e.right());
        let (left_first, _) = e.pushout(&alpha);
        let (left_first, _) = left_first.pullback(&gamma);
        let (right_first, _) = e.pullback(&gamma);
        let (right_first, _) = right_first.pushout(&alpha);
        prop_assert!(left_first.baer_equivalent(&right_first));
    }

    #[test]
    fn pushout_along_zero_splits(which in 0usize..6, seed in any::<u64>()) {
        let mut d = Draw::new(which, seed);
        let e = d.conflation();
        let a = d.module();
        let (split, _) = e.pushout(&ModuleMap::zero(e.left(), &a));
        prop_assert!(split.is_split());
        let (same, _) = e.pushout(&ModuleMap::identity(e.left()));
        prop_assert!(same.baer_equivalent(&e));
    }

    #[test]
    fn ext_is_additive(which in 0usize..6, seed in any::<u64>(), degree in 0usize..4) {
        let mut d = Draw::new(which, seed);
        let (m, n, x) = (d.module(), d.module(), d.module());
        let s = &d.inst.session;
        let sum = DirectSum::new(s.category().quiver(), &[m.clone(), n.clone()]).module;
        let whole = xi_ext(s, &sum, &x, degree).dimension;
        let parts = xi_ext(s, &m, &x, degree).dimension + xi_ext(s, &n, &x, degree).dimension;
        prop_assert_eq!(whole, parts);
    }
}
