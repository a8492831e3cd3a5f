//! Brute-force Hom and stable Hom over small catalog modules, compared with the library.

use xihom::cohomology::build_complete_resolution;
use xihom::instance::{catalog, Instance};
use xihom::linalg::{rank_of_vectors, Matrix};
use xihom::modcat::{HomSpace, ModuleRef};

const LIMIT: u64 = 1 << 16;

/// Every module homomorphism `m → n`, found by enumerating all matrices.
fn all_homs(inst: &Instance, m: &ModuleRef, n: &ModuleRef) -> Option<Vec<Matrix>> {
    let q = inst.session.category().quiver();
    let field = q.field();
    let p = u64::from(field.modulus());
    let cells = (m.dim() * n.dim()) as u32;
    let count = p.checked_pow(cells).filter(|&c| c <= LIMIT)?;
    let mut out = Vec::new();
    for code in 0..count {
        let mut rest = code;
        let x = Matrix::from_fn(field, n.dim(), m.dim(), |_, _| {
            let digit = (rest % p) as u32;
            rest /= p;
            digit
        });
        let arrows = (0..q.arrows().len()).all(|a| x.mul(&m.action_matrix(a)) == n.action_matrix(a).mul(&x));
        let vertices = (0..q.vertices()).all(|v| x.mul(&m.vertex_block(v)) == n.vertex_block(v).mul(&x));
        if arrows && vertices {
            out.push(x);
        }
    }
    Some(out)
}

fn log_p(count: usize, p: u32) -> usize {
    let (mut n, mut d) = (1usize, 0);
    while n < count {
        n *= p as usize;
        d += 1;
    }
    assert_eq!(n, count, "a subspace has a prime power of elements");
    d
}

#[test]
fn hom_dimensions_match_enumeration() {
    let mut compared = 0;
    for (name, inst) in catalog::load_all() {
        let p = inst.session.category().field().modulus();
        for (a, m) in &inst.modules {
            for (b, n) in &inst.modules {
                let Some(homs) = all_homs(&inst, m, n) else { continue };
                assert_eq!(HomSpace::new(m, n).dim(), log_p(homs.len(), p), "{name}: Hom({a}, {b})");
                compared += 1;
            }
        }
    }
    assert!(compared > 40);
}

#[test]
fn stable_hom_matches_complete_ext_in_degree_zero() {
    for name in ["dual_numbers", "truncated_cube", "truncated_quartic"] {
        let inst = catalog::load(name).unwrap().unwrap();
        let s = &inst.session;
        let field = s.category().field();
        let a = inst.module("A").unwrap();
        for (x, m) in &inst.modules {
            let cr = build_complete_resolution(s, m, 6).unwrap();
            for (y, n) in &inst.modules {
                let homs = all_homs(&inst, m, n).unwrap();
                let into_a = all_homs(&inst, m, a).unwrap();
                let out_of_a = all_homs(&inst, a, n).unwrap();
                let through: Vec<Vec<u32>> = into_a
                    .iter()
                    .flat_map(|f| out_of_a.iter().map(move |g| g.mul(f).flatten()))
                    .collect();
                let full = log_p(homs.len(), field.modulus());
                let stable = full - rank_of_vectors(field, m.dim() * n.dim(), &through);
                assert_eq!(cr.ext(n, 0).unwrap().dimension, stable, "{name}: stable Hom({x}, {y})");
            }
        }
    }
}
