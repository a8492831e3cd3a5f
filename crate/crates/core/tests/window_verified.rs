//! The triangular algebra of the dual numbers: vertices 0 and 1, a loop at each, an
//! arrow between them, and the loops commuting with the arrow. It is Gorenstein but not
//! self-injective, and its simple at vertex 1 has infinite projective dimension.

use xihom::cohomology::{build_complete_resolution, gpd, gprojective_test, Regime};
use xihom::instance::Instance;
use xihom::resolution::DimVerdict;

const TRIANGULAR: &str = r#"{
  "p": 2,
  "quiver": {
    "vertices": 2,
    "arrows": [
      {"src": 0, "tgt": 0, "name": "x0"},
      {"src": 1, "tgt": 1, "name": "x1"},
      {"src": 0, "tgt": 1, "name": "a"}
    ],
    "relations": [
      [{"coeff": 1, "path": ["x0", "x0"]}],
      [{"coeff": 1, "path": ["x1", "x1"]}],
      [{"coeff": 1, "path": ["x0", "a"]}, {"coeff": -1, "path": ["a", "x1"]}]
    ],
    "nilpotency_bound": 3
  },
  "modules": {
    "S0": {"dim": 1, "action": {"x0": [[0]], "x1": [[0]], "a": [[0]]}, "vertex_blocks": {"0": [[1]], "1": [[0]]}},
    "S1": {"dim": 1, "action": {"x0": [[0]], "x1": [[0]], "a": [[0]]}, "vertex_blocks": {"0": [[0]], "1": [[1]]}},
    "E": {
      "dim": 2,
      "action": {"x0": [[0, 0], [0, 0]], "x1": [[0, 0], [0, 0]], "a": [[0, 0], [1, 0]]},
      "vertex_blocks": {"0": [[1, 0], [0, 0]], "1": [[0, 0], [0, 1]]}
    }
  },
  "proper_class": "all"
}"#;

fn load() -> Instance {
    Instance::from_json(TRIANGULAR).unwrap()
}

#[test]
fn algebra_shape() {
    let inst = load();
    let cat = inst.session.category();
    assert_eq!(cat.basis().dim(), 6);
    assert!(!cat.is_self_injective());
}

#[test]
fn monomorphisms_are_gorenstein_projective() {
    let inst = load();
    let s = &inst.session;
    for name in ["S1", "E"] {
        let m = inst.module(name).unwrap();
        assert_eq!(s.xi_pd(m, 12), DimVerdict::ExceedsWindow, "{name}");
        let v = gprojective_test(s, m, 12);
        assert!(v.member, "{name}: {v:?}");
        assert_eq!(v.regime, Regime::WindowVerified);
    }
    let s0 = inst.module("S0").unwrap();
    assert!(!gprojective_test(s, s0, 12).member);
    let g = gpd(s, s0, 12);
    assert_eq!(g.value, DimVerdict::Finite(1));
    assert_eq!(g.regime, Regime::WindowVerified);
}

#[test]
fn complete_resolutions_validate() {
    let inst = load();
    let s = &inst.session;
    for (name, m) in &inst.modules {
        let cr = build_complete_resolution(s, m, 8).unwrap();
        let v = cr.validate(s);
        assert!(v.passed(), "{name}: {v:?}");
        assert_eq!(cr.regime, Regime::WindowVerified);
    }
    let s1 = inst.module("S1").unwrap();
    let cr = build_complete_resolution(s, s1, 8).unwrap();
    assert!(cr.ext(s1, 0).unwrap().dimension > 0);
}
