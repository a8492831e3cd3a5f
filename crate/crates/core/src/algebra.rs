//! Finite-dimensional algebras `kQ/I` given by a quiver with admissible relations.
//!
//! Paths are stored as arrow sequences in traversal order (first arrow first). The
//! product of basis elements follows composition order: `a * b` means "walk `b`, then
//! walk `a`", and is nonzero only when `b` ends where `a` starts. With this convention
//! a left module is exactly a representation of the quiver.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{Fp, Matrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("arrow `{name}` references vertex {vertex}, but the quiver has {vertices} vertices")]
    BadVertex { name: String, vertex: usize, vertices: usize },
    #[error("duplicate arrow name `{0}`")]
    DuplicateArrow(String),
    #[error("relation {relation}: path is not composable at step {step}")]
    NotComposable { relation: usize, step: usize },
    #[error("relation {relation} is not admissible: it has a term of length {length} < 2")]
    NotAdmissible { relation: usize, length: usize },
    #[error("relation {0} combines paths that are not parallel")]
    NotParallel(usize),
    #[error("nilpotency bound must be at least 2 when the quiver has arrows (got {0})")]
    BadBound(usize),
    #[error("relations do not kill all paths of length {bound}: path [{path}] survives")]
    NotNilpotent { bound: usize, path: String },
    #[error("multiplication table fails associativity on basis triple ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
    #[error("sum of vertex idempotents is not a two-sided unit")]
    NoUnit,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Arrow {
    pub source: usize,
    pub target: usize,
    pub name: String,
}

/// One term `coeff * path` of a relation; `path` lists arrow indices in traversal order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RelationTerm {
    pub coeff: u32,
    pub path: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuiverPresentation {
    field: Fp,
    vertices: usize,
    arrows: Vec<Arrow>,
    relations: Vec<Vec<RelationTerm>>,
    nilpotency_bound: usize,
}

impl QuiverPresentation {
    /// Validates the quiver data. Relation coefficients are reduced mod p and terms
    /// with equal paths are merged.
    pub fn new(
        field: Fp,
        vertices: usize,
        arrows: Vec<Arrow>,
        relations: Vec<Vec<(i64, Vec<usize>)>>,
        nilpotency_bound: usize,
    ) -> Result<Self, AlgebraError> {
        for (i, a) in arrows.iter().enumerate() {
            for v in [a.source, a.target] {
                if v >= vertices {
                    return Err(AlgebraError::BadVertex {
                        name: a.name.clone(),
                        vertex: v,
                        vertices,
                    });
                }
            }
            if arrows[..i].iter().any(|b| b.name == a.name) {
                return Err(AlgebraError::DuplicateArrow(a.name.clone()));
            }
        }
        if !arrows.is_empty() && nilpotency_bound < 2 {
            return Err(AlgebraError::BadBound(nilpotency_bound));
        }
        let mut rels = Vec::with_capacity(relations.len());
        for (ri, rel) in relations.into_iter().enumerate() {
            let mut terms: Vec<RelationTerm> = Vec::new();
            let mut ends = None;
            for (coeff, path) in rel {
                if path.len() < 2 {
                    return Err(AlgebraError::NotAdmissible {
                        relation: ri,
                        length: path.len(),
                    });
                }
                for (step, w) in path.windows(2).enumerate() {
                    if arrows[w[0]].target != arrows[w[1]].source {
                        return Err(AlgebraError::NotComposable { relation: ri, step });
                    }
                }
                let e = (arrows[path[0]].source, arrows[*path.last().unwrap()].target);
                if *ends.get_or_insert(e) != e {
                    return Err(AlgebraError::NotParallel(ri));
                }
                let c = field.reduce(coeff);
                match terms.iter_mut().find(|t| t.path == path) {
                    Some(t) => t.coeff = field.add(t.coeff, c),
                    None => terms.push(RelationTerm { coeff: c, path }),
                }
            }
            terms.retain(|t| t.coeff != 0);
            rels.push(terms);
        }
        Ok(QuiverPresentation {
            field,
            vertices,
            arrows,
            relations: rels,
            nilpotency_bound,
        })
    }

    pub fn field(&self) -> Fp {
        self.field
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn relations(&self) -> &[Vec<RelationTerm>] {
        &self.relations
    }

    pub fn nilpotency_bound(&self) -> usize {
        self.nilpotency_bound
    }

    pub fn arrow_index(&self, name: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.name == name)
    }

    /// The opposite quiver: every arrow reversed, every relation path read backwards.
    pub fn opposite(&self) -> QuiverPresentation {
        QuiverPresentation {
            field: self.field,
            vertices: self.vertices,
            arrows: self
                .arrows
                .iter()
                .map(|a| Arrow {
                    source: a.target,
                    target: a.source,
                    name: a.name.clone(),
                })
                .collect(),
            relations: self
                .relations
                .iter()
                .map(|rel| {
                    rel.iter()
                        .map(|t| RelationTerm {
                            coeff: t.coeff,
                            path: t.path.iter().rev().copied().collect(),
                        })
                        .collect()
                })
                .collect(),
            nilpotency_bound: self.nilpotency_bound,
        }
    }

    fn path_label(&self, path: &[usize]) -> String {
        path.iter()
            .map(|&a| self.arrows[a].name.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// A path in the quiver. Trivial paths have no arrows and `source == target`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Path {
    pub source: usize,
    pub target: usize,
    pub arrows: Vec<usize>,
}

impl Path {
    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.arrows.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_trivial()
    }
}

/// Path basis and structure constants of `kQ/I`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraBasis {
    quiver: Arc<QuiverPresentation>,
    basis_paths: Vec<Path>,
    /// `mult[a][b]` lists `(c, coeff)` with `a * b = sum coeff * c`.
    mult: Vec<Vec<Vec<(usize, u32)>>>,
    vertex_idempotents: Vec<usize>,
    arrow_elements: Vec<usize>,
}

fn all_paths(q: &QuiverPresentation, max_len: usize) -> Vec<Path> {
    let mut out: Vec<Path> = (0..q.vertices)
        .map(|v| Path {
            source: v,
            target: v,
            arrows: vec![],
        })
        .collect();
    let mut frontier = out.clone();
    for _ in 0..max_len {
        let mut next = Vec::new();
        for p in &frontier {
            for (ai, a) in q.arrows.iter().enumerate() {
                if a.source == p.target {
                    let mut arrows = p.arrows.clone();
                    arrows.push(ai);
                    next.push(Path {
                        source: p.source,
                        target: a.target,
                        arrows,
                    });
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Build the path basis by row-reducing all consequences `u * rho * v` of the relations
/// in path lengths up to the nilpotency bound.
pub fn enumerate_basis(q: QuiverPresentation) -> Result<AlgebraBasis, AlgebraError> {
    let k = q.field;
    let bound = if q.arrows.is_empty() { 1 } else { q.nilpotency_bound };
    let mut paths = all_paths(&q, bound);
    // longest paths first, so reduction rewrites long paths in terms of shorter ones
    paths.sort_by_key(|p| std::cmp::Reverse(p.len()));
    let index: HashMap<Vec<usize>, usize> = paths
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.is_trivial())
        .map(|(i, p)| (p.arrows.clone(), i))
        .collect();
    let ncols = paths.len();

    let mut rows: Vec<Vec<u32>> = Vec::new();
    for rel in &q.relations {
        if rel.is_empty() {
            continue;
        }
        let (rs, rt) = (q.arrows[rel[0].path[0]].source, q.arrows[*rel[0].path.last().unwrap()].target);
        let min_len = rel.iter().map(|t| t.path.len()).min().unwrap();
        for before in paths.iter().filter(|p| p.target == rs) {
            for after in paths.iter().filter(|p| p.source == rt) {
                if before.len() + after.len() + min_len > bound {
                    continue;
                }
                let mut row = vec![0u32; ncols];
                for t in rel {
                    let mut word = before.arrows.clone();
                    word.extend_from_slice(&t.path);
                    word.extend_from_slice(&after.arrows);
                    if let Some(&c) = index.get(&word) {
                        row[c] = k.add(row[c], t.coeff);
                    }
                }
                if row.iter().any(|&x| x != 0) {
                    rows.push(row);
                }
            }
        }
    }
    let relation_rank = crate::linalg::rank_of_vectors(k, ncols, &rows);
    let top: Vec<usize> = (0..ncols).filter(|&i| paths[i].len() == bound && bound > 0 && !q.arrows.is_empty()).collect();
    for &c in &top {
        let mut unit = vec![0u32; ncols];
        unit[c] = 1;
        rows.push(unit);
    }
    let m = if rows.is_empty() {
        Matrix::zeros(k, 0, ncols)
    } else {
        Matrix::from_columns(k, ncols, &rows).transpose()
    };
    let (reduced, pivots) = m.rref_only();
    if pivots.len() != relation_rank {
        // some path of length `bound` is not a consequence of the relations
        for &c in &top {
            let mut unit = vec![0u32; ncols];
            unit[c] = 1;
            let mut probe: Vec<Vec<u32>> = rows[..rows.len() - top.len()].to_vec();
            probe.push(unit);
            if crate::linalg::rank_of_vectors(k, ncols, &probe) > relation_rank {
                return Err(AlgebraError::NotNilpotent {
                    bound,
                    path: q.path_label(&paths[c].arrows),
                });
            }
        }
    }

    let mut is_pivot = vec![false; ncols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    // basis: non-pivot paths, listed by length then enumeration order
    let mut free: Vec<usize> = (0..ncols).filter(|&c| !is_pivot[c]).collect();
    free.sort_by_key(|&c| (paths[c].len(), c));
    let mut basis_of_col: HashMap<usize, usize> = HashMap::new();
    for (bi, &c) in free.iter().enumerate() {
        basis_of_col.insert(c, bi);
    }
    // normal form of every path of length < bound, as (basis index, coeff)
    let normal_form = |col: usize| -> Vec<(usize, u32)> {
        if let Some(&b) = basis_of_col.get(&col) {
            return vec![(b, 1)];
        }
        let r = pivots.iter().position(|&pc| pc == col).expect("pivot row");
        let mut out: Vec<(usize, u32)> = free
            .iter()
            .filter_map(|&fc| {
                let x = reduced.get(r, fc);
                (x != 0).then(|| (basis_of_col[&fc], k.neg(x)))
            })
            .collect();
        out.sort();
        out
    };

    let basis_paths: Vec<Path> = free.iter().map(|&c| paths[c].clone()).collect();
    let dim = basis_paths.len();
    let trivial_col = |v: usize| (0..ncols).find(|&c| paths[c].is_trivial() && paths[c].source == v).unwrap();
    let mut mult = vec![vec![Vec::new(); dim]; dim];
    for (ai, a) in basis_paths.iter().enumerate() {
        for (bi, b) in basis_paths.iter().enumerate() {
            if a.source != b.target {
                continue;
            }
            let mut word = b.arrows.clone();
            word.extend_from_slice(&a.arrows);
            if word.len() >= bound && !q.arrows.is_empty() {
                continue;
            }
            let col = if word.is_empty() { trivial_col(a.source) } else { index[&word] };
            mult[ai][bi] = normal_form(col);
        }
    }
    let vertex_idempotents = (0..q.vertices).map(|v| basis_of_col[&trivial_col(v)]).collect();
    let arrow_elements = (0..q.arrows.len()).map(|a| basis_of_col[&index[&vec![a]]]).collect();
    let basis = AlgebraBasis {
        quiver: Arc::new(q),
        basis_paths,
        mult,
        vertex_idempotents,
        arrow_elements,
    };
    basis.check_axioms()?;
    Ok(basis)
}

impl AlgebraBasis {
    pub fn quiver(&self) -> &Arc<QuiverPresentation> {
        &self.quiver
    }

    pub fn field(&self) -> Fp {
        self.quiver.field
    }

    pub fn dim(&self) -> usize {
        self.basis_paths.len()
    }

    pub fn basis_paths(&self) -> &[Path] {
        &self.basis_paths
    }

    pub fn product(&self, a: usize, b: usize) -> &[(usize, u32)] {
        &self.mult[a][b]
    }

    pub fn vertex_idempotent(&self, v: usize) -> usize {
        self.vertex_idempotents[v]
    }

    pub fn vertex_idempotents(&self) -> &[usize] {
        &self.vertex_idempotents
    }

    pub fn arrow_element(&self, arrow: usize) -> usize {
        self.arrow_elements[arrow]
    }

    pub fn label(&self, b: usize) -> String {
        let p = &self.basis_paths[b];
        if p.is_trivial() {
            format!("e{}", p.source)
        } else {
            self.quiver.path_label(&p.arrows)
        }
    }

    /// Multiply two coefficient vectors.
    fn mul_vec(&self, x: &[u32], y: &[u32]) -> Vec<u32> {
        let k = self.field();
        let mut out = vec![0u32; self.dim()];
        for (a, &xa) in x.iter().enumerate().filter(|(_, &v)| v != 0) {
            for (b, &yb) in y.iter().enumerate().filter(|(_, &v)| v != 0) {
                let s = k.mul(xa, yb);
                for &(c, coeff) in &self.mult[a][b] {
                    out[c] = k.add(out[c], k.mul(s, coeff));
                }
            }
        }
        out
    }

    fn unit_vec(&self, b: usize) -> Vec<u32> {
        let mut v = vec![0u32; self.dim()];
        v[b] = 1;
        v
    }

    /// Exhaustive associativity and unit checks.
    pub fn check_axioms(&self) -> Result<(), AlgebraError> {
        let n = self.dim();
        let mut one = vec![0u32; n];
        for &e in &self.vertex_idempotents {
            one[e] = 1;
        }
        for b in 0..n {
            let u = self.unit_vec(b);
            if self.mul_vec(&one, &u) != u || self.mul_vec(&u, &one) != u {
                return Err(AlgebraError::NoUnit);
            }
        }
        for a in 0..n {
            let ua = self.unit_vec(a);
            for b in 0..n {
                let ab = self.mul_vec(&ua, &self.unit_vec(b));
                for c in 0..n {
                    let uc = self.unit_vec(c);
                    let left = self.mul_vec(&ab, &uc);
                    let bc = self.mul_vec(&self.unit_vec(b), &uc);
                    if left != self.mul_vec(&ua, &bc) {
                        return Err(AlgebraError::NotAssociative(a, b, c));
                    }
                }
            }
        }
        Ok(())
    }

    /// The opposite algebra on the same basis (paths reversed), with `c^op_{ab} = c_{ba}`.
    pub fn opposite(&self) -> AlgebraBasis {
        let n = self.dim();
        let mut mult = vec![vec![Vec::new(); n]; n];
        for (a, row) in mult.iter_mut().enumerate() {
            for (b, entry) in row.iter_mut().enumerate() {
                *entry = self.mult[b][a].clone();
            }
        }
        AlgebraBasis {
            quiver: Arc::new(self.quiver.opposite()),
            basis_paths: self
                .basis_paths
                .iter()
                .map(|p| Path {
                    source: p.target,
                    target: p.source,
                    arrows: p.arrows.iter().rev().copied().collect(),
                })
                .collect(),
            mult,
            vertex_idempotents: self.vertex_idempotents.clone(),
            arrow_elements: self.arrow_elements.clone(),
        }
    }

    /// Basis indices of paths starting at `v`, grouped by target vertex.
    pub fn paths_from(&self, v: usize) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.quiver.vertices];
        for (i, p) in self.basis_paths.iter().enumerate() {
            if p.source == v {
                out[p.target].push(i);
            }
        }
        out
    }

    /// Number of basis paths ending at `v` (the dimension of the indecomposable
    /// projective right module at `v`).
    pub fn paths_into(&self, v: usize) -> usize {
        self.basis_paths.iter().filter(|p| p.target == v).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u32) -> Fp {
        Fp::new(p).unwrap()
    }

    fn arrow(s: usize, t: usize, name: &str) -> Arrow {
        Arrow {
            source: s,
            target: t,
            name: name.into(),
        }
    }

    pub(crate) fn truncated_loop(p: u32, n: usize) -> AlgebraBasis {
        let q = QuiverPresentation::new(f(p), 1, vec![arrow(0, 0, "x")], vec![vec![(1, vec![0; n])]], n).unwrap();
        enumerate_basis(q).unwrap()
    }

    #[test]
    fn dual_numbers_basis() {
        let a = truncated_loop(2, 2);
        assert_eq!(a.dim(), 2);
        let labels: Vec<String> = (0..2).map(|i| a.label(i)).collect();
        assert_eq!(labels, ["e0", "x"]);
        let x = a.arrow_element(0);
        assert!(a.product(x, x).is_empty());
    }

    #[test]
    fn cube_truncation_basis() {
        let a = truncated_loop(3, 3);
        assert_eq!(a.dim(), 3);
        let x = a.arrow_element(0);
        // x * x = x^2, a basis element of length 2
        let xx = a.product(x, x);
        assert_eq!(xx.len(), 1);
        assert_eq!(a.basis_paths()[xx[0].0].len(), 2);
    }

    #[test]
    fn a2_path_algebra() {
        let q = QuiverPresentation::new(f(2), 2, vec![arrow(0, 1, "a")], vec![], 2).unwrap();
        let a = enumerate_basis(q).unwrap();
        assert_eq!(a.dim(), 3);
        let op = a.opposite();
        assert_eq!(op.quiver().arrows()[0].source, 1);
        assert_eq!(op.quiver().arrows()[0].target, 0);
        assert_eq!(op.opposite(), a);
        assert_eq!(op.dim(), a.dim());
    }

    #[test]
    fn commutative_algebra_is_its_own_opposite() {
        let a = truncated_loop(2, 2);
        let op = a.opposite();
        assert_eq!(op.mult, a.mult);
        assert_eq!(op.opposite(), a);
    }

    #[test]
    fn rejects_short_relations() {
        let err = QuiverPresentation::new(f(2), 1, vec![arrow(0, 0, "x")], vec![vec![(1, vec![0])]], 2).unwrap_err();
        assert!(matches!(err, AlgebraError::NotAdmissible { .. }));
    }

    #[test]
    fn rejects_bad_nilpotency_bound() {
        let q = QuiverPresentation::new(f(2), 1, vec![arrow(0, 0, "x")], vec![vec![(1, vec![0, 0, 0])]], 2).unwrap();
        assert!(matches!(enumerate_basis(q), Err(AlgebraError::NotNilpotent { .. })));
    }

    #[test]
    fn rejects_non_parallel_relation() {
        let arrows = vec![arrow(0, 1, "a"), arrow(1, 2, "b"), arrow(1, 1, "c")];
        let err = QuiverPresentation::new(f(2), 3, arrows, vec![vec![(1, vec![0, 1]), (1, vec![0, 2])]], 3).unwrap_err();
        assert_eq!(err, AlgebraError::NotParallel(0));
    }

    #[test]
    fn commutative_square_with_relation() {
        // 0 -a-> 1 -b-> 3, 0 -c-> 2 -d-> 3 with ab = cd: dim = 4 vertices + 4 arrows + 1 long path
        let arrows = vec![arrow(0, 1, "a"), arrow(1, 3, "b"), arrow(0, 2, "c"), arrow(2, 3, "d")];
        let q = QuiverPresentation::new(f(3), 4, arrows, vec![vec![(1, vec![0, 1]), (-1, vec![2, 3])]], 3).unwrap();
        let a = enumerate_basis(q).unwrap();
        assert_eq!(a.dim(), 9);
        assert_eq!(a.opposite().opposite(), a);
    }
}
