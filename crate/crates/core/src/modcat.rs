//! Finite-dimensional modules over `kQ/I` as quiver representations, their morphisms,
//! and short exact sequences (conflations) with the extension calculus built on them.
//!
//! A [`Module`] stores one vector space per vertex and one matrix per arrow, so every
//! morphism is block diagonal with one block per vertex. Global coordinates list the
//! vertex blocks in vertex order.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebra::{AlgebraBasis, QuiverPresentation};
use crate::linalg::{rank_of_vectors, Fp, Matrix};

pub type ModuleRef = Arc<Module>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModuleError {
    #[error("modules live over different algebras")]
    AlgebraMismatch,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("module action violates relation {0}")]
    RelationViolated(usize),
    #[error("vertex blocks are not complete orthogonal idempotents")]
    BadVertexBlocks,
    #[error("action of arrow `{0}` does not respect the vertex blocks")]
    ArrowLeavesBlock(String),
    #[error("matrix does not commute with the action of arrow `{0}`")]
    NotIntertwiner(String),
    #[error("not a conflation: {0}")]
    NotExact(&'static str),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Module {
    quiver: Arc<QuiverPresentation>,
    dims: Vec<usize>,
    /// Arrow `a: s -> t` acts by a `dims[t] x dims[s]` matrix.
    maps: Vec<Matrix>,
}

impl fmt::Debug for Module {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Module{:?}", self.dims)
    }
}

fn path_action(quiver: &QuiverPresentation, dims: &[usize], maps: &[Matrix], path: &[usize]) -> Matrix {
    let k = quiver.field();
    let start = quiver.arrows()[path[0]].source;
    let mut acc = Matrix::identity(k, dims[start]);
    for &a in path {
        acc = maps[a].mul(&acc);
    }
    acc
}

impl Module {
    pub fn new(quiver: Arc<QuiverPresentation>, dims: Vec<usize>, maps: Vec<Matrix>) -> Result<Self, ModuleError> {
        if dims.len() != quiver.vertices() || maps.len() != quiver.arrows().len() {
            return Err(ModuleError::Shape("vertex or arrow count".into()));
        }
        for (a, m) in quiver.arrows().iter().zip(&maps) {
            if (m.rows(), m.cols()) != (dims[a.target], dims[a.source]) || m.field() != quiver.field() {
                return Err(ModuleError::Shape(format!("action of arrow `{}`", a.name)));
            }
        }
        for (ri, rel) in quiver.relations().iter().enumerate() {
            let Some(first) = rel.first() else { continue };
            let s = quiver.arrows()[first.path[0]].source;
            let t = quiver.arrows()[*first.path.last().unwrap()].target;
            let mut acc = Matrix::zeros(quiver.field(), dims[t], dims[s]);
            for term in rel {
                acc = acc.add(&path_action(&quiver, &dims, &maps, &term.path).scale(term.coeff));
            }
            if !acc.is_zero() {
                return Err(ModuleError::RelationViolated(ri));
            }
        }
        Ok(Module { quiver, dims, maps })
    }

    /// Build from a global action (one `dim x dim` matrix per arrow) and arbitrary
    /// vertex idempotents, changing to a basis adapted to the vertex decomposition.
    pub fn from_global(
        quiver: Arc<QuiverPresentation>,
        dim: usize,
        actions: &[Matrix],
        blocks: &[Matrix],
    ) -> Result<Self, ModuleError> {
        let k = quiver.field();
        let nv = quiver.vertices();
        if actions.len() != quiver.arrows().len() || blocks.len() != nv {
            return Err(ModuleError::Shape("vertex or arrow count".into()));
        }
        if actions.iter().chain(blocks).any(|m| m.rows() != dim || m.cols() != dim) {
            return Err(ModuleError::Shape(format!("expected {dim}x{dim} matrices")));
        }
        let mut sum = Matrix::zeros(k, dim, dim);
        for (i, e) in blocks.iter().enumerate() {
            for (j, f) in blocks.iter().enumerate() {
                let prod = e.mul(f);
                if (i == j && prod != *e) || (i != j && !prod.is_zero()) {
                    return Err(ModuleError::BadVertexBlocks);
                }
            }
            sum = sum.add(e);
        }
        if !sum.is_identity() {
            return Err(ModuleError::BadVertexBlocks);
        }
        for (a, act) in quiver.arrows().iter().zip(actions) {
            if blocks[a.target].mul(act).mul(&blocks[a.source]) != *act {
                return Err(ModuleError::ArrowLeavesBlock(a.name.clone()));
            }
        }
        let bases: Vec<Matrix> = blocks.iter().map(|e| e.column_space_basis()).collect();
        let dims: Vec<usize> = bases.iter().map(|b| b.cols()).collect();
        let maps = quiver
            .arrows()
            .iter()
            .zip(actions)
            .map(|(a, act)| {
                bases[a.target]
                    .solve(&act.mul(&bases[a.source]))
                    .expect("image lies in the target block")
            })
            .collect();
        Module::new(quiver, dims, maps)
    }

    pub fn zero(quiver: Arc<QuiverPresentation>) -> Self {
        let k = quiver.field();
        let maps = quiver.arrows().iter().map(|_| Matrix::zeros(k, 0, 0)).collect();
        Module {
            dims: vec![0; quiver.vertices()],
            quiver,
            maps,
        }
    }

    /// The simple module at vertex `v`.
    pub fn simple(quiver: Arc<QuiverPresentation>, v: usize) -> Self {
        let mut dims = vec![0; quiver.vertices()];
        dims[v] = 1;
        let k = quiver.field();
        let maps = quiver
            .arrows()
            .iter()
            .map(|a| Matrix::zeros(k, dims[a.target], dims[a.source]))
            .collect();
        Module { quiver, dims, maps }
    }

    pub fn quiver(&self) -> &Arc<QuiverPresentation> {
        &self.quiver
    }

    pub fn field(&self) -> Fp {
        self.quiver.field()
    }

    pub fn dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn vertex_dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn arrow_map(&self, arrow: usize) -> &Matrix {
        &self.maps[arrow]
    }

    pub fn offset(&self, v: usize) -> usize {
        self.dims[..v].iter().sum()
    }

    /// Action of an arrow as a `dim x dim` matrix in global coordinates.
    pub fn action_matrix(&self, arrow: usize) -> Matrix {
        let a = &self.quiver.arrows()[arrow];
        let mut m = Matrix::zeros(self.field(), self.dim(), self.dim());
        m.paste(self.offset(a.target), self.offset(a.source), &self.maps[arrow]);
        m
    }

    /// Idempotent projection onto the block of vertex `v`, in global coordinates.
    pub fn vertex_block(&self, v: usize) -> Matrix {
        let mut m = Matrix::zeros(self.field(), self.dim(), self.dim());
        m.paste(self.offset(v), self.offset(v), &Matrix::identity(self.field(), self.dims[v]));
        m
    }

    /// Action of a path (arrow indices in traversal order) between vertex blocks.
    pub fn path_action(&self, path: &[usize]) -> Matrix {
        path_action(&self.quiver, &self.dims, &self.maps, path)
    }

    pub fn same_algebra(&self, other: &Module) -> bool {
        Arc::ptr_eq(&self.quiver, &other.quiver) || self.quiver == other.quiver
    }

    /// The vector-space dual `Hom_k(M, k)`, a module over the opposite quiver.
    pub fn dual(&self) -> Module {
        Module {
            quiver: Arc::new(self.quiver.opposite()),
            dims: self.dims.clone(),
            maps: self.maps.iter().map(|m| m.transpose()).collect(),
        }
    }

    /// Same data, re-homed onto an equal quiver (so `Arc`s can be shared).
    pub fn rehome(&self, quiver: &Arc<QuiverPresentation>) -> Module {
        assert!(*self.quiver == **quiver, "rehome onto a different quiver");
        Module {
            quiver: quiver.clone(),
            dims: self.dims.clone(),
            maps: self.maps.clone(),
        }
    }

    /// The radical `sum_a im(a)` per vertex, as column bases.
    pub fn radical_basis(&self) -> Vec<Matrix> {
        let k = self.field();
        (0..self.dims.len())
            .map(|v| {
                let mut gens = Matrix::zeros(k, self.dims[v], 0);
                for (ai, a) in self.quiver.arrows().iter().enumerate() {
                    if a.target == v {
                        gens = gens.hstack(&self.maps[ai]);
                    }
                }
                gens.column_space_basis()
            })
            .collect()
    }

    /// Socle dimension per vertex: common kernel of all outgoing arrows.
    pub fn socle_dims(&self) -> Vec<usize> {
        let k = self.field();
        (0..self.dims.len())
            .map(|v| {
                let mut stacked = Matrix::zeros(k, 0, self.dims[v]);
                for (ai, a) in self.quiver.arrows().iter().enumerate() {
                    if a.source == v {
                        stacked = stacked.vstack(&self.maps[ai]);
                    }
                }
                self.dims[v] - stacked.rank()
            })
            .collect()
    }

    /// Top generators: for each vertex, standard vectors completing a basis of the
    /// radical (pivot convention).
    pub fn top_generators(&self) -> Vec<Vec<Vec<u32>>> {
        self.radical_basis()
            .iter()
            .enumerate()
            .map(|(v, rad)| complement_standard(rad, self.dims[v]))
            .collect()
    }
}

/// Standard basis vectors (as columns) completing the column span of `basis` in `F^n`.
fn complement_standard(basis: &Matrix, n: usize) -> Vec<Vec<u32>> {
    let (_, pivots) = basis.transpose().rref_only();
    (0..n)
        .filter(|c| !pivots.contains(c))
        .map(|c| {
            let mut e = vec![0u32; n];
            e[c] = 1;
            e
        })
        .collect()
}

#[derive(Clone, PartialEq, Eq)]
pub struct ModuleMap {
    source: ModuleRef,
    target: ModuleRef,
    blocks: Vec<Matrix>,
}

impl fmt::Debug for ModuleMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ModuleMap({:?} -> {:?}) {:?}", self.source, self.target, self.blocks)
    }
}

impl ModuleMap {
    /// Checked constructor: shapes and intertwining.
    pub fn new(source: ModuleRef, target: ModuleRef, blocks: Vec<Matrix>) -> Result<Self, ModuleError> {
        if !source.same_algebra(&target) {
            return Err(ModuleError::AlgebraMismatch);
        }
        if blocks.len() != source.dims.len()
            || blocks
                .iter()
                .enumerate()
                .any(|(v, b)| (b.rows(), b.cols()) != (target.dims[v], source.dims[v]))
        {
            return Err(ModuleError::Shape("map blocks".into()));
        }
        for (ai, a) in source.quiver.arrows().iter().enumerate() {
            if blocks[a.target].mul(&source.maps[ai]) != target.maps[ai].mul(&blocks[a.source]) {
                return Err(ModuleError::NotIntertwiner(a.name.clone()));
            }
        }
        Ok(ModuleMap { source, target, blocks })
    }

    fn raw(source: ModuleRef, target: ModuleRef, blocks: Vec<Matrix>) -> Self {
        let m = ModuleMap { source, target, blocks };
        debug_assert!(m.verify().is_ok(), "constructed map is not an intertwiner");
        m
    }

    pub fn verify(&self) -> Result<(), ModuleError> {
        ModuleMap::new(self.source.clone(), self.target.clone(), self.blocks.clone()).map(|_| ())
    }

    /// Build from a global `dim N x dim M` matrix (must be block diagonal).
    pub fn from_matrix(source: ModuleRef, target: ModuleRef, m: &Matrix) -> Result<Self, ModuleError> {
        if (m.rows(), m.cols()) != (target.dim(), source.dim()) {
            return Err(ModuleError::Shape("map matrix".into()));
        }
        let nv = source.dims.len();
        let mut rebuilt = Matrix::zeros(m.field(), m.rows(), m.cols());
        let mut blocks = Vec::with_capacity(nv);
        for v in 0..nv {
            let (r0, c0) = (target.offset(v), source.offset(v));
            let b = m.submatrix(r0..r0 + target.dims[v], c0..c0 + source.dims[v]);
            rebuilt.paste(r0, c0, &b);
            blocks.push(b);
        }
        if rebuilt != *m {
            return Err(ModuleError::Shape("map does not respect vertex blocks".into()));
        }
        ModuleMap::new(source, target, blocks)
    }

    pub fn zero(source: &ModuleRef, target: &ModuleRef) -> Self {
        let k = source.field();
        let blocks = (0..source.dims.len())
            .map(|v| Matrix::zeros(k, target.dims[v], source.dims[v]))
            .collect();
        ModuleMap::raw(source.clone(), target.clone(), blocks)
    }

    pub fn identity(m: &ModuleRef) -> Self {
        let k = m.field();
        let blocks = m.dims.iter().map(|&d| Matrix::identity(k, d)).collect();
        ModuleMap::raw(m.clone(), m.clone(), blocks)
    }

    pub fn source(&self) -> &ModuleRef {
        &self.source
    }

    pub fn target(&self) -> &ModuleRef {
        &self.target
    }

    pub fn blocks(&self) -> &[Matrix] {
        &self.blocks
    }

    /// Global block-diagonal matrix.
    pub fn matrix(&self) -> Matrix {
        let mut m = Matrix::zeros(self.source.field(), self.target.dim(), self.source.dim());
        for (v, b) in self.blocks.iter().enumerate() {
            m.paste(self.target.offset(v), self.source.offset(v), b);
        }
        m
    }

    /// Coordinates of the map in `Hom_k`: the blocks' entries concatenated.
    pub fn flatten(&self) -> Vec<u32> {
        self.blocks.iter().flat_map(|b| b.entries().iter().copied()).collect()
    }

    pub fn flat_len(source: &Module, target: &Module) -> usize {
        source.dims.iter().zip(&target.dims).map(|(a, b)| a * b).sum()
    }

    fn from_flat(source: &ModuleRef, target: &ModuleRef, flat: &[u32]) -> Self {
        let k = source.field();
        let mut pos = 0;
        let blocks = (0..source.dims.len())
            .map(|v| {
                let (r, c) = (target.dims[v], source.dims[v]);
                let b = Matrix::from_fn(k, r, c, |i, j| flat[pos + i * c + j]);
                pos += r * c;
                b
            })
            .collect();
        ModuleMap::raw(source.clone(), target.clone(), blocks)
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &ModuleMap) -> ModuleMap {
        assert!(
            *other.target == *self.source,
            "compose: target {:?} does not match source {:?}",
            other.target,
            self.source
        );
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| a.mul(b)).collect();
        ModuleMap::raw(other.source.clone(), self.target.clone(), blocks)
    }

    fn zip(&self, other: &ModuleMap, f: impl Fn(&Matrix, &Matrix) -> Matrix) -> ModuleMap {
        assert!(*self.source == *other.source && *self.target == *other.target, "parallel maps required");
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect();
        ModuleMap::raw(self.source.clone(), self.target.clone(), blocks)
    }

    pub fn add(&self, other: &ModuleMap) -> ModuleMap {
        self.zip(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &ModuleMap) -> ModuleMap {
        self.zip(other, |a, b| a.sub(b))
    }

    pub fn scale(&self, s: u32) -> ModuleMap {
        let blocks = self.blocks.iter().map(|b| b.scale(s)).collect();
        ModuleMap::raw(self.source.clone(), self.target.clone(), blocks)
    }

    pub fn neg(&self) -> ModuleMap {
        self.scale(self.source.field().neg(1))
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(|b| b.is_zero())
    }

    pub fn rank(&self) -> usize {
        self.blocks.iter().map(|b| b.rank()).sum()
    }

    pub fn is_injective(&self) -> bool {
        self.rank() == self.source.dim()
    }

    pub fn is_surjective(&self) -> bool {
        self.rank() == self.target.dim()
    }

    pub fn is_iso(&self) -> bool {
        self.source.dim() == self.target.dim() && self.is_injective()
    }

    pub fn inverse(&self) -> Option<ModuleMap> {
        let blocks = self.blocks.iter().map(|b| b.inverse()).collect::<Option<Vec<_>>>()?;
        Some(ModuleMap::raw(self.target.clone(), self.source.clone(), blocks))
    }

    pub fn is_identity(&self) -> bool {
        *self.source == *self.target && self.blocks.iter().all(|b| b.is_identity())
    }

    /// Transposed map between dual modules.
    pub fn dual(&self) -> ModuleMap {
        ModuleMap {
            source: Arc::new(self.target.dual()),
            target: Arc::new(self.source.dual()),
            blocks: self.blocks.iter().map(|b| b.transpose()).collect(),
        }
    }

    pub fn dual_between(&self, source: &ModuleRef, target: &ModuleRef) -> ModuleMap {
        ModuleMap::raw(
            source.clone(),
            target.clone(),
            self.blocks.iter().map(|b| b.transpose()).collect(),
        )
    }

    /// Same matrices, with source and target replaced by equal modules.
    pub fn retarget(&self, source: &ModuleRef, target: &ModuleRef) -> ModuleMap {
        assert!(**source == *self.source && **target == *self.target);
        ModuleMap {
            source: source.clone(),
            target: target.clone(),
            blocks: self.blocks.clone(),
        }
    }
}

impl ModuleMap {
    /// Same matrices over an equal quiver held by a different `Arc`.
    pub fn rehome(&self, quiver: &Arc<QuiverPresentation>) -> ModuleMap {
        ModuleMap {
            source: Arc::new(self.source.rehome(quiver)),
            target: Arc::new(self.target.rehome(quiver)),
            blocks: self.blocks.clone(),
        }
    }
}

/// A basis of `Hom_A(M, N)`.
#[derive(Clone, Debug)]
pub struct HomSpace {
    pub source: ModuleRef,
    pub target: ModuleRef,
    pub basis: Vec<ModuleMap>,
}

/// Solve the intertwining equations `X_t M_a = N_a X_s` for all arrows.
pub fn hom_basis(m: &ModuleRef, n: &ModuleRef) -> Vec<ModuleMap> {
    assert!(m.same_algebra(n), "hom_basis across different algebras");
    let k = m.field();
    let q = m.quiver.clone();
    let nv = q.vertices();
    let mut var_off = vec![0usize; nv + 1];
    for v in 0..nv {
        var_off[v + 1] = var_off[v] + n.dims[v] * m.dims[v];
    }
    let nvars = var_off[nv];
    if nvars == 0 {
        return vec![];
    }
    let neqs: usize = q.arrows().iter().map(|a| n.dims[a.target] * m.dims[a.source]).sum();
    let mut eqs = Matrix::zeros(k, neqs, nvars);
    let mut row = 0;
    for (ai, a) in q.arrows().iter().enumerate() {
        let (s, t) = (a.source, a.target);
        let (ma, na) = (&m.maps[ai], &n.maps[ai]);
        for r in 0..n.dims[t] {
            for c in 0..m.dims[s] {
                // (X_t M_a)[r][c] = sum_j X_t[r][j] M_a[j][c]
                for j in 0..m.dims[t] {
                    let x = ma.get(j, c);
                    if x != 0 {
                        let col = var_off[t] + r * m.dims[t] + j;
                        eqs.set(row, col, k.add(eqs.get(row, col), x));
                    }
                }
                // -(N_a X_s)[r][c] = -sum_j N_a[r][j] X_s[j][c]
                for j in 0..n.dims[s] {
                    let x = na.get(r, j);
                    if x != 0 {
                        let col = var_off[s] + j * m.dims[s] + c;
                        eqs.set(row, col, k.sub(eqs.get(row, col), x));
                    }
                }
                row += 1;
            }
        }
    }
    let kb = eqs.kernel_basis();
    (0..kb.cols())
        .map(|j| ModuleMap::from_flat(m, n, &kb.column(j)))
        .collect()
}

impl HomSpace {
    pub fn new(source: &ModuleRef, target: &ModuleRef) -> Self {
        HomSpace {
            source: source.clone(),
            target: target.clone(),
            basis: hom_basis(source, target),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn combination(&self, coeffs: &[u32]) -> ModuleMap {
        let k = self.source.field();
        let mut acc = ModuleMap::zero(&self.source, &self.target);
        for (b, &c) in self.basis.iter().zip(coeffs) {
            if c != 0 {
                acc = acc.add(&b.scale(c % k.modulus()));
            }
        }
        acc
    }

    /// Find `h` in this Hom space with `op(h) = rhs`, where `op` is linear.
    pub fn solve_linear(&self, op: impl Fn(&ModuleMap) -> Vec<u32>, rhs: &[u32]) -> Option<ModuleMap> {
        let k = self.source.field();
        let cols: Vec<Vec<u32>> = self.basis.iter().map(&op).collect();
        if cols.is_empty() {
            return rhs.iter().all(|&x| x == 0).then(|| ModuleMap::zero(&self.source, &self.target));
        }
        let a = Matrix::from_columns(k, rhs.len(), &cols);
        let x = a.solve(&Matrix::column_vector(k, rhs))?;
        Some(self.combination(&x.column(0)))
    }

    /// Dimension of the image of `h ↦ op(h)`.
    pub fn image_rank(&self, op: impl Fn(&ModuleMap) -> Vec<u32>, len: usize) -> usize {
        let vecs: Vec<Vec<u32>> = self.basis.iter().map(op).collect();
        rank_of_vectors(self.source.field(), len, &vecs)
    }
}

impl HomSpace {
    /// A uniformly random element of the space.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> ModuleMap {
        let p = self.source.field().modulus();
        let coeffs: Vec<u32> = self.basis.iter().map(|_| rng.gen_range(0..p)).collect();
        self.combination(&coeffs)
    }
}

/// Search `Hom(X, Y)` for an isomorphism. Small spaces are enumerated exhaustively;
/// larger ones are sampled with a fixed seed, so a `None` there is only probable.
pub fn find_isomorphism(x: &ModuleRef, y: &ModuleRef) -> Option<ModuleMap> {
    if x.vertex_dims() != y.vertex_dims() {
        return None;
    }
    let hs = HomSpace::new(x, y);
    let p = x.field().modulus() as u64;
    let d = hs.dim() as u32;
    if p.checked_pow(d).is_some_and(|n| n <= 4096) {
        let total = p.pow(d);
        for mut idx in 0..total {
            let coeffs: Vec<u32> = (0..d)
                .map(|_| {
                    let c = (idx % p) as u32;
                    idx /= p;
                    c
                })
                .collect();
            let h = hs.combination(&coeffs);
            if h.is_iso() {
                return Some(h);
            }
        }
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x150_1507);
    (0..256).map(|_| hs.random_element(&mut rng)).find(|h| h.is_iso())
}

/// Find `φ: X → B` with `g ∘ φ = t`, where `g: B → C` and `t: X → C`.
pub fn lift_through(g: &ModuleMap, t: &ModuleMap) -> Option<ModuleMap> {
    let hs = HomSpace::new(t.source(), g.source());
    hs.solve_linear(|h| g.compose(h).flatten(), &t.flatten())
}

/// Find `φ: B → Y` with `φ ∘ f = t`, where `f: A → B` and `t: A → Y`.
pub fn extend_along(f: &ModuleMap, t: &ModuleMap) -> Option<ModuleMap> {
    let hs = HomSpace::new(f.target(), t.target());
    hs.solve_linear(|h| h.compose(f).flatten(), &t.flatten())
}

/// The unique `u` with `i ∘ u = t` for a monomorphism `i`, if it exists.
pub fn factor_through_mono(i: &ModuleMap, t: &ModuleMap) -> Option<ModuleMap> {
    let blocks = i
        .blocks
        .iter()
        .zip(&t.blocks)
        .map(|(ib, tb)| ib.solve(tb))
        .collect::<Option<Vec<_>>>()?;
    ModuleMap::new(t.source.clone(), i.source.clone(), blocks).ok()
}

/// The unique `u` with `u ∘ q = t` for an epimorphism `q`, if it exists.
pub fn factor_through_epi(q: &ModuleMap, t: &ModuleMap) -> Option<ModuleMap> {
    let blocks = q
        .blocks
        .iter()
        .zip(&t.blocks)
        .map(|(qb, tb)| qb.transpose().solve(&tb.transpose()).map(|x| x.transpose()))
        .collect::<Option<Vec<_>>>()?;
    ModuleMap::new(q.target.clone(), t.target.clone(), blocks).ok()
}

/// Kernel submodule and its inclusion.
pub fn kernel(f: &ModuleMap) -> (ModuleRef, ModuleMap) {
    let src = &f.source;
    let bases: Vec<Matrix> = f.blocks.iter().map(|b| b.kernel_basis()).collect();
    submodule(src, bases)
}

/// Image submodule, its inclusion, and the corestriction `M → im f`.
pub fn image(f: &ModuleMap) -> (ModuleRef, ModuleMap, ModuleMap) {
    let bases: Vec<Matrix> = f.blocks.iter().map(|b| b.column_space_basis()).collect();
    let (im, incl) = submodule(&f.target, bases);
    let cores = factor_through_mono(&incl, f).expect("f factors through its image");
    (im, incl, cores)
}

/// Submodule spanned per vertex by the columns of `bases` (which must be stable).
fn submodule(m: &ModuleRef, bases: Vec<Matrix>) -> (ModuleRef, ModuleMap) {
    let q = m.quiver.clone();
    let dims: Vec<usize> = bases.iter().map(|b| b.cols()).collect();
    let maps = q
        .arrows()
        .iter()
        .enumerate()
        .map(|(ai, a)| {
            bases[a.target]
                .solve(&m.maps[ai].mul(&bases[a.source]))
                .expect("subspace is a submodule")
        })
        .collect();
    let sub = Arc::new(Module { quiver: q, dims, maps });
    let incl = ModuleMap::raw(sub.clone(), m.clone(), bases);
    (sub, incl)
}

/// Cokernel module and the projection onto it.
pub fn cokernel(f: &ModuleMap) -> (ModuleRef, ModuleMap) {
    let tgt = &f.target;
    let k = tgt.field();
    let mut projs = Vec::new();
    let mut sections = Vec::new();
    for (v, b) in f.blocks.iter().enumerate() {
        let n = tgt.dims[v];
        let im = b.column_space_basis();
        let comp = complement_standard(&im, n);
        let sec = Matrix::from_columns(k, n, &comp);
        let full = im.hstack(&sec).inverse().expect("image plus complement is a basis");
        projs.push(full.submatrix(im.cols()..n, 0..n));
        sections.push(sec);
    }
    let q = tgt.quiver.clone();
    let dims: Vec<usize> = projs.iter().map(|p| p.rows()).collect();
    let maps = q
        .arrows()
        .iter()
        .enumerate()
        .map(|(ai, a)| projs[a.target].mul(&tgt.maps[ai]).mul(&sections[a.source]))
        .collect();
    let coker = Arc::new(Module { quiver: q, dims, maps });
    let proj = ModuleMap::raw(tgt.clone(), coker.clone(), projs);
    (coker, proj)
}

/// A finite direct sum with its canonical injections and projections.
#[derive(Clone, Debug)]
pub struct DirectSum {
    pub module: ModuleRef,
    pub summands: Vec<ModuleRef>,
    pub injections: Vec<ModuleMap>,
    pub projections: Vec<ModuleMap>,
}

impl DirectSum {
    pub fn new(quiver: &Arc<QuiverPresentation>, summands: &[ModuleRef]) -> Self {
        let k = quiver.field();
        let nv = quiver.vertices();
        let dims: Vec<usize> = (0..nv).map(|v| summands.iter().map(|s| s.dims[v]).sum()).collect();
        let maps = quiver
            .arrows()
            .iter()
            .enumerate()
            .map(|(ai, a)| {
                let rd: Vec<usize> = summands.iter().map(|s| s.dims[a.target]).collect();
                let cd: Vec<usize> = summands.iter().map(|s| s.dims[a.source]).collect();
                let blocks: Vec<Vec<Option<Matrix>>> = (0..summands.len())
                    .map(|i| (0..summands.len()).map(|j| (i == j).then(|| summands[i].maps[ai].clone())).collect())
                    .collect();
                Matrix::block(k, &rd, &cd, &blocks)
            })
            .collect();
        let module = Arc::new(Module {
            quiver: quiver.clone(),
            dims,
            maps,
        });
        let mut injections = Vec::new();
        let mut projections = Vec::new();
        for (i, s) in summands.iter().enumerate() {
            let offs: Vec<usize> = (0..nv).map(|v| summands[..i].iter().map(|t| t.dims[v]).sum()).collect();
            let inj_blocks: Vec<Matrix> = (0..nv)
                .map(|v| {
                    let mut b = Matrix::zeros(k, module.dims[v], s.dims[v]);
                    b.paste(offs[v], 0, &Matrix::identity(k, s.dims[v]));
                    b
                })
                .collect();
            let proj_blocks = inj_blocks.iter().map(|b| b.transpose()).collect();
            injections.push(ModuleMap::raw(s.clone(), module.clone(), inj_blocks));
            projections.push(ModuleMap::raw(module.clone(), s.clone(), proj_blocks));
        }
        DirectSum {
            module,
            summands: summands.to_vec(),
            injections,
            projections,
        }
    }

    /// The map `⊕ sources → ⊕ targets` with component `(r, c)` from source summand `c`
    /// to target summand `r`; `None` entries are zero.
    pub fn matrix_map(source: &DirectSum, target: &DirectSum, comps: &[Vec<Option<&ModuleMap>>]) -> ModuleMap {
        let k = source.module.field();
        let nv = source.module.dims.len();
        let blocks = (0..nv)
            .map(|v| {
                let rd: Vec<usize> = target.summands.iter().map(|s| s.dims[v]).collect();
                let cd: Vec<usize> = source.summands.iter().map(|s| s.dims[v]).collect();
                let bl: Vec<Vec<Option<Matrix>>> = (0..target.summands.len())
                    .map(|r| {
                        (0..source.summands.len())
                            .map(|c| comps.get(r).and_then(|row| row.get(c)).and_then(|m| m.map(|m| m.blocks[v].clone())))
                            .collect()
                    })
                    .collect();
                Matrix::block(k, &rd, &cd, &bl)
            })
            .collect();
        ModuleMap::raw(source.module.clone(), target.module.clone(), blocks)
    }

    /// Row map `[f_1 ... f_n]: ⊕ sources → target`.
    pub fn row(source: &DirectSum, comps: &[Option<&ModuleMap>], target: &ModuleRef) -> ModuleMap {
        let t = DirectSum::new(source.module.quiver(), std::slice::from_ref(target));
        let m = DirectSum::matrix_map(source, &t, &[comps.to_vec()]);
        m.retarget(&source.module, target)
    }

    /// Column map `[f_1; ...; f_n]: source → ⊕ targets`.
    pub fn column(source: &ModuleRef, comps: &[Option<&ModuleMap>], target: &DirectSum) -> ModuleMap {
        let s = DirectSum::new(target.module.quiver(), std::slice::from_ref(source));
        let rows: Vec<Vec<Option<&ModuleMap>>> = comps.iter().map(|c| vec![*c]).collect();
        let m = DirectSum::matrix_map(&s, target, &rows);
        m.retarget(source, &target.module)
    }
}

/// A short exact sequence `A → B → C` (inflation, deflation).
#[derive(Clone, Debug)]
pub struct Conflation {
    inflation: ModuleMap,
    deflation: ModuleMap,
}

impl Conflation {
    pub fn new(inflation: ModuleMap, deflation: ModuleMap) -> Result<Self, ModuleError> {
        let c = Conflation { inflation, deflation };
        c.validate()?;
        Ok(c)
    }

    /// Exactness validator: injective, surjective, and image = kernel.
    pub fn validate(&self) -> Result<(), ModuleError> {
        let (f, g) = (&self.inflation, &self.deflation);
        if *f.target != *g.source {
            return Err(ModuleError::NotExact("maps are not composable"));
        }
        if !f.is_injective() {
            return Err(ModuleError::NotExact("inflation is not injective"));
        }
        if !g.is_surjective() {
            return Err(ModuleError::NotExact("deflation is not surjective"));
        }
        if !g.compose(f).is_zero() {
            return Err(ModuleError::NotExact("composite is nonzero"));
        }
        if f.source.dim() + g.target.dim() != f.target.dim() {
            return Err(ModuleError::NotExact("image differs from kernel"));
        }
        Ok(())
    }

    pub fn inflation(&self) -> &ModuleMap {
        &self.inflation
    }

    pub fn deflation(&self) -> &ModuleMap {
        &self.deflation
    }

    pub fn left(&self) -> &ModuleRef {
        &self.inflation.source
    }

    pub fn middle(&self) -> &ModuleRef {
        &self.inflation.target
    }

    pub fn right(&self) -> &ModuleRef {
        &self.deflation.target
    }

    /// `ker g → B → C` for a surjection `g`.
    pub fn from_deflation(g: ModuleMap) -> Result<Self, ModuleError> {
        let (_, incl) = kernel(&g);
        Conflation::new(incl, g)
    }

    /// `A → B → coker f` for an injection `f`.
    pub fn from_inflation(f: ModuleMap) -> Result<Self, ModuleError> {
        let (_, proj) = cokernel(&f);
        Conflation::new(f, proj)
    }

    /// The canonical split sequence `A → A ⊕ C → C`.
    pub fn split(a: &ModuleRef, c: &ModuleRef) -> Self {
        let s = DirectSum::new(a.quiver(), &[a.clone(), c.clone()]);
        Conflation {
            inflation: s.injections[0].clone(),
            deflation: s.projections[1].clone(),
        }
    }

    pub fn direct_sum(&self, other: &Conflation) -> Conflation {
        let q = self.left().quiver().clone();
        let sa = DirectSum::new(&q, &[self.left().clone(), other.left().clone()]);
        let sb = DirectSum::new(&q, &[self.middle().clone(), other.middle().clone()]);
        let sc = DirectSum::new(&q, &[self.right().clone(), other.right().clone()]);
        let f = DirectSum::matrix_map(&sa, &sb, &[vec![Some(&self.inflation), None], vec![None, Some(&other.inflation)]]);
        let g = DirectSum::matrix_map(&sb, &sc, &[vec![Some(&self.deflation), None], vec![None, Some(&other.deflation)]]);
        Conflation { inflation: f, deflation: g }
    }

    /// Split iff the inflation admits a retraction.
    pub fn is_split(&self) -> bool {
        extend_along(&self.inflation, &ModuleMap::identity(self.left())).is_some()
    }

    /// A section of the deflation, if one exists.
    pub fn section(&self) -> Option<ModuleMap> {
        lift_through(&self.deflation, &ModuleMap::identity(self.right()))
    }

    /// Equality in `Ext^1(C, A)`: an isomorphism `(1, b, 1)` between the sequences.
    pub fn baer_equivalent(&self, other: &Conflation) -> bool {
        if *self.left() != *other.left() || *self.right() != *other.right() {
            return false;
        }
        let hs = HomSpace::new(self.middle(), other.middle());
        let mut rhs = other.inflation.flatten();
        rhs.extend(self.deflation.flatten());
        hs.solve_linear(
            |b| {
                let mut v = b.compose(&self.inflation).flatten();
                v.extend(other.deflation.compose(b).flatten());
                v
            },
            &rhs,
        )
        .is_some()
    }

    /// Base change along `gamma: C' → C`. Also returns the induced map `B' → B`.
    pub fn pullback(&self, gamma: &ModuleMap) -> (Conflation, ModuleMap) {
        assert!(*gamma.target == **self.right(), "pullback: map must land in the right end");
        let q = self.left().quiver().clone();
        let s = DirectSum::new(&q, &[self.middle().clone(), gamma.source.clone()]);
        let neg = gamma.neg();
        let to_c = DirectSum::row(&s, &[Some(&self.deflation), Some(&neg)], self.right());
        let (_, incl) = kernel(&to_c);
        let to_b = s.projections[0].compose(&incl);
        let defl = s.projections[1].compose(&incl);
        let zero = ModuleMap::zero(self.left(), &gamma.source);
        let into_sum = DirectSum::column(self.left(), &[Some(&self.inflation), Some(&zero)], &s);
        let infl = factor_through_mono(&incl, &into_sum).expect("inflation lands in the pullback");
        (Conflation { inflation: infl, deflation: defl }, to_b)
    }

    /// Cobase change along `alpha: A → A'`. Also returns the induced map `B → B'`.
    pub fn pushout(&self, alpha: &ModuleMap) -> (Conflation, ModuleMap) {
        assert!(*alpha.source == **self.left(), "pushout: map must start at the left end");
        let q = self.left().quiver().clone();
        let s = DirectSum::new(&q, &[self.middle().clone(), alpha.target.clone()]);
        let neg = alpha.neg();
        let from_a = DirectSum::column(self.left(), &[Some(&self.inflation), Some(&neg)], &s);
        let (_, proj) = cokernel(&from_a);
        let from_b = proj.compose(&s.injections[0]);
        let infl = proj.compose(&s.injections[1]);
        let zero = ModuleMap::zero(&alpha.target, self.right());
        let out_of_sum = DirectSum::row(&s, &[Some(&self.deflation), Some(&zero)], self.right());
        let defl = factor_through_epi(&proj, &out_of_sum).expect("deflation factors through the pushout");
        (Conflation { inflation: infl, deflation: defl }, from_b)
    }

    /// For `A -f-> B -g-> C` and `alpha: B → D`, the sequence
    /// `A -[-αf; f]-> D ⊕ B -[[1, α], [0, g]]-> D ⊕ C`.
    pub fn sheared_sum(&self, alpha: &ModuleMap) -> Conflation {
        assert!(*alpha.source == **self.middle());
        let q = self.left().quiver().clone();
        let d = alpha.target.clone();
        let db = DirectSum::new(&q, &[d.clone(), self.middle().clone()]);
        let dc = DirectSum::new(&q, &[d.clone(), self.right().clone()]);
        let top = alpha.compose(&self.inflation).neg();
        let infl = DirectSum::column(self.left(), &[Some(&top), Some(&self.inflation)], &db);
        let id = ModuleMap::identity(&d);
        let defl = DirectSum::matrix_map(&db, &dc, &[vec![Some(&id), Some(alpha)], vec![None, Some(&self.deflation)]]);
        Conflation { inflation: infl, deflation: defl }
    }

    pub fn rehome(&self, quiver: &Arc<QuiverPresentation>) -> Conflation {
        let f = self.inflation.rehome(quiver);
        let g = self.deflation.rehome(quiver);
        let g = g.retarget(f.target(), g.target());
        Conflation { inflation: f, deflation: g }
    }

    /// Dual sequence `D C → D B → D A` over the opposite algebra.
    pub fn dual(&self) -> Conflation {
        let da = Arc::new(self.left().dual());
        let db = Arc::new(self.middle().dual());
        let dc = Arc::new(self.right().dual());
        let q = da.quiver().clone();
        let db = Arc::new(db.rehome(&q));
        let dc = Arc::new(dc.rehome(&q));
        Conflation {
            inflation: self.deflation.dual_between(&dc, &db),
            deflation: self.inflation.dual_between(&db, &da),
        }
    }
}

/// An element of `Ext^1(C, A)` represented by a conflation; equality is Baer equivalence.
#[derive(Clone, Debug)]
pub struct ExtElement {
    pub representative: Conflation,
}

impl ExtElement {
    pub fn endpoints(&self) -> (&ModuleRef, &ModuleRef) {
        (self.representative.right(), self.representative.left())
    }

    pub fn is_zero(&self) -> bool {
        self.representative.is_split()
    }
}

impl PartialEq for ExtElement {
    fn eq(&self, other: &Self) -> bool {
        self.representative.baer_equivalent(&other.representative)
    }
}

/// The module category of a finite-dimensional algebra: the algebra plus its
/// indecomposable projectives.
#[derive(Clone, Debug)]
pub struct ModuleCategory {
    basis: AlgebraBasis,
    projectives: Vec<ModuleRef>,
}

/// A minimal projective cover `K → P → M` together with the vertex of each summand of `P`.
#[derive(Clone, Debug)]
pub struct ProjectiveCover {
    pub conflation: Conflation,
    pub summand_vertices: Vec<usize>,
}

impl ModuleCategory {
    pub fn new(basis: AlgebraBasis) -> Self {
        let q = basis.quiver().clone();
        let k = q.field();
        let nv = q.vertices();
        let mut projectives = Vec::with_capacity(nv);
        for v in 0..nv {
            let by_target = basis.paths_from(v);
            let dims: Vec<usize> = by_target.iter().map(|l| l.len()).collect();
            let maps = q
                .arrows()
                .iter()
                .enumerate()
                .map(|(ai, a)| {
                    let x = basis.arrow_element(ai);
                    let mut m = Matrix::zeros(k, dims[a.target], dims[a.source]);
                    for (col, &p) in by_target[a.source].iter().enumerate() {
                        for &(c, coeff) in basis.product(x, p) {
                            let row = by_target[a.target].iter().position(|&t| t == c).expect("parallel path");
                            m.set(row, col, coeff);
                        }
                    }
                    m
                })
                .collect();
            let pv = Module::new(q.clone(), dims, maps).expect("projective satisfies the relations");
            projectives.push(Arc::new(pv));
        }
        ModuleCategory { basis, projectives }
    }

    pub fn basis(&self) -> &AlgebraBasis {
        &self.basis
    }

    pub fn quiver(&self) -> &Arc<QuiverPresentation> {
        self.basis.quiver()
    }

    pub fn field(&self) -> Fp {
        self.basis.field()
    }

    pub fn projective(&self, v: usize) -> &ModuleRef {
        &self.projectives[v]
    }

    pub fn projectives(&self) -> &[ModuleRef] {
        &self.projectives
    }

    pub fn zero(&self) -> ModuleRef {
        Arc::new(Module::zero(self.quiver().clone()))
    }

    pub fn simple(&self, v: usize) -> ModuleRef {
        Arc::new(Module::simple(self.quiver().clone(), v))
    }

    /// The regular module `A = ⊕_v P_v`.
    pub fn regular(&self) -> ModuleRef {
        DirectSum::new(self.quiver(), &self.projectives).module
    }

    /// Re-home a module onto this category's quiver `Arc`.
    pub fn adopt(&self, m: &Module) -> Result<ModuleRef, ModuleError> {
        if *m.quiver != **self.quiver() {
            return Err(ModuleError::AlgebraMismatch);
        }
        Ok(Arc::new(m.rehome(self.quiver())))
    }

    /// The map `P_v → N` sending `e_v` to `x ∈ N_v`.
    pub fn map_from_projective(&self, v: usize, n: &ModuleRef, x: &[u32]) -> ModuleMap {
        let k = self.field();
        let pv = &self.projectives[v];
        let by_target = self.basis.paths_from(v);
        let xv = Matrix::column_vector(k, x);
        let blocks = (0..self.quiver().vertices())
            .map(|t| {
                let mut b = Matrix::zeros(k, n.dims[t], pv.dims[t]);
                for (col, &p) in by_target[t].iter().enumerate() {
                    let path = &self.basis.basis_paths()[p];
                    let img = if path.is_trivial() { xv.clone() } else { n.path_action(&path.arrows).mul(&xv) };
                    for r in 0..n.dims[t] {
                        b.set(r, col, img.get(r, 0));
                    }
                }
                b
            })
            .collect();
        ModuleMap::raw(pv.clone(), n.clone(), blocks)
    }

    /// Right multiplication by an arrow `a: j → t`, a map `P_t → P_j`.
    pub fn right_multiplication(&self, arrow: usize) -> ModuleMap {
        let a = &self.quiver().arrows()[arrow];
        let pj = &self.projectives[a.source];
        let by_target = self.basis.paths_from(a.source);
        let pos = by_target[a.target]
            .iter()
            .position(|&b| b == self.basis.arrow_element(arrow))
            .expect("arrow is a basis path");
        let mut x = vec![0u32; pj.dims[a.target]];
        x[pos] = 1;
        self.map_from_projective(a.target, pj, &x)
    }

    /// Minimal projective cover via the top `M / rad M`.
    pub fn projective_cover(&self, m: &ModuleRef) -> ProjectiveCover {
        let gens = m.top_generators();
        let mut summands = Vec::new();
        let mut vertices = Vec::new();
        let mut comps = Vec::new();
        for (v, gv) in gens.iter().enumerate() {
            for x in gv {
                summands.push(self.projectives[v].clone());
                vertices.push(v);
                comps.push(self.map_from_projective(v, m, x));
            }
        }
        let sum = DirectSum::new(self.quiver(), &summands);
        let refs: Vec<Option<&ModuleMap>> = comps.iter().map(Some).collect();
        let defl = DirectSum::row(&sum, &refs, m);
        ProjectiveCover {
            conflation: Conflation::from_deflation(defl).expect("top generators generate"),
            summand_vertices: vertices,
        }
    }

    /// A module is projective iff its projective cover is an isomorphism.
    pub fn is_projective(&self, m: &Module) -> bool {
        let tops = m.top_generators();
        let cover_dim: usize = tops
            .iter()
            .enumerate()
            .map(|(v, g)| g.len() * self.projectives[v].dim())
            .sum();
        cover_dim == m.dim()
    }

    /// Injective iff the dual is projective over the opposite algebra: compare the
    /// socle with the injective envelope dimension.
    pub fn is_injective(&self, m: &Module) -> bool {
        let env: usize = m
            .socle_dims()
            .iter()
            .enumerate()
            .map(|(v, &s)| s * self.basis.paths_into(v))
            .sum();
        env == m.dim()
    }

    pub fn is_self_injective(&self) -> bool {
        self.projectives.iter().all(|p| self.is_injective(p))
    }

    /// The opposite category's algebra data.
    pub fn opposite(&self) -> ModuleCategory {
        ModuleCategory::new(self.basis.opposite())
    }

    /// Minimal left `add(A)`-approximation `M → ⊕ P_j^{t_j}`: components form a basis of
    /// `Hom(M, P_j)` modulo the maps factoring through right multiplication by arrows.
    pub fn left_projective_approximation(&self, m: &ModuleRef) -> (DirectSum, ModuleMap) {
        let nv = self.quiver().vertices();
        let homs: Vec<HomSpace> = (0..nv).map(|v| HomSpace::new(m, &self.projectives[v])).collect();
        let mut summands = Vec::new();
        let mut comps: Vec<ModuleMap> = Vec::new();
        for j in 0..nv {
            let len = ModuleMap::flat_len(m, &self.projectives[j]);
            let mut rad: Vec<Vec<u32>> = Vec::new();
            for (ai, a) in self.quiver().arrows().iter().enumerate() {
                if a.source != j {
                    continue;
                }
                let rho = self.right_multiplication(ai);
                for h in &homs[a.target].basis {
                    rad.push(rho.compose(h).flatten());
                }
            }
            let mut span = rad;
            let mut rank = rank_of_vectors(self.field(), len, &span);
            for h in &homs[j].basis {
                span.push(h.flatten());
                let r = rank_of_vectors(self.field(), len, &span);
                if r > rank {
                    rank = r;
                    summands.push(self.projectives[j].clone());
                    comps.push(h.clone());
                } else {
                    span.pop();
                }
            }
        }
        let sum = DirectSum::new(self.quiver(), &summands);
        let refs: Vec<Option<&ModuleMap>> = comps.iter().map(Some).collect();
        let map = DirectSum::column(m, &refs, &sum);
        (sum, map)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::algebra::{enumerate_basis, Arrow, QuiverPresentation};

    pub(crate) fn truncated_loop(p: u32, n: usize) -> ModuleCategory {
        let k = Fp::new(p).unwrap();
        let q = QuiverPresentation::new(
            k,
            1,
            vec![Arrow {
                source: 0,
                target: 0,
                name: "x".into(),
            }],
            vec![vec![(1, vec![0; n])]],
            n,
        )
        .unwrap();
        ModuleCategory::new(enumerate_basis(q).unwrap())
    }

    pub(crate) fn linear(p: u32, n: usize) -> ModuleCategory {
        let k = Fp::new(p).unwrap();
        let arrows = (0..n - 1)
            .map(|i| Arrow {
                source: i,
                target: i + 1,
                name: format!("a{i}"),
            })
            .collect();
        let q = QuiverPresentation::new(k, n, arrows, vec![], n.max(2)).unwrap();
        ModuleCategory::new(enumerate_basis(q).unwrap())
    }

    /// `k[x]/(x^n)` quotient `A/(x^j)` as a module, `j <= n`.
    pub(crate) fn cyclic(cat: &ModuleCategory, j: usize) -> ModuleRef {
        let k = cat.field();
        let x = Matrix::from_fn(k, j, j, |r, c| u32::from(r == c + 1));
        Arc::new(Module::new(cat.quiver().clone(), vec![j], vec![x]).unwrap())
    }

    #[test]
    fn dual_numbers_homs() {
        let cat = truncated_loop(2, 2);
        let kmod = cat.simple(0);
        let a = cat.projective(0).clone();
        assert_eq!(hom_basis(&kmod, &kmod).len(), 1);
        assert_eq!(hom_basis(&a, &a).len(), 2);
        assert!(hom_basis(&a, &cat.zero()).is_empty());
        // Hom(A, M) has dimension dim M
        for j in 1..=2 {
            let m = cyclic(&cat, j);
            assert_eq!(hom_basis(&a, &m).len(), m.dim());
        }
    }

    #[test]
    fn kernel_and_cokernel() {
        let cat = truncated_loop(2, 2);
        let a = cat.projective(0).clone();
        let (z, _) = kernel(&ModuleMap::identity(&a));
        assert!(z.is_zero());
        let cover = cat.projective_cover(&cat.simple(0));
        let k1 = cover.conflation.left();
        assert_eq!(k1.dim(), 1);
        assert_eq!(**k1, *cat.simple(0));
        let zero = cat.zero();
        let (c, proj) = cokernel(&ModuleMap::zero(&zero, &a));
        assert_eq!(*c, *a);
        assert!(proj.is_iso());
    }

    #[test]
    fn split_detection() {
        let cat = truncated_loop(2, 2);
        let kmod = cat.simple(0);
        let a = cat.projective(0).clone();
        assert!(Conflation::split(&kmod, &a).is_split());
        let cover = cat.projective_cover(&kmod).conflation;
        assert!(!cover.is_split());
        // sequences ending in a projective split
        let c = Conflation::split(&kmod, &a);
        let (pulled, _) = cover.pullback(&ModuleMap::zero(&a, &kmod));
        assert!(pulled.is_split());
        assert!(c.is_split());
    }

    #[test]
    fn base_and_cobase_change() {
        let cat = truncated_loop(2, 2);
        let kmod = cat.simple(0);
        let cover = cat.projective_cover(&kmod).conflation;
        let id = ModuleMap::identity(&kmod);
        let (pb, _) = cover.pullback(&id);
        pb.validate().unwrap();
        assert!(pb.baer_equivalent(&cover));
        let (po, _) = cover.pushout(&id);
        po.validate().unwrap();
        assert!(po.baer_equivalent(&cover));
        let (pz, _) = cover.pushout(&ModuleMap::zero(&kmod, &kmod));
        assert!(pz.is_split());
        let (bz, _) = cover.pullback(&ModuleMap::zero(&kmod, &kmod));
        assert!(bz.is_split());
    }

    #[test]
    fn sheared_sum_with_zero_is_plain_sum() {
        let cat = truncated_loop(3, 3);
        let kmod = cat.simple(0);
        let cover = cat.projective_cover(&kmod).conflation;
        let d = cyclic(&cat, 2);
        let sh = cover.sheared_sum(&ModuleMap::zero(cover.middle(), &d));
        sh.validate().unwrap();
        let plain = Conflation::split(&cat.zero(), &d).direct_sum(&cover);
        assert_eq!(sh.inflation().matrix(), plain.inflation().matrix());
        assert_eq!(sh.deflation().matrix(), plain.deflation().matrix());
        // a nonzero shear is still exact
        let alpha = hom_basis(cover.middle(), &d).pop().unwrap();
        cover.sheared_sum(&alpha).validate().unwrap();
    }

    #[test]
    fn duality() {
        let cat = truncated_loop(2, 2);
        assert!(Module::zero(cat.quiver().clone()).dual().is_zero());
        let kmod = cat.simple(0);
        let a = cat.projective(0);
        assert_eq!(kmod.dual().dual(), *kmod);
        assert_eq!(a.dual().dual(), **a);
        assert!(cat.is_self_injective());
        let a2 = linear(2, 2);
        assert!(!a2.is_self_injective());
        // P_0 = (k -> k) is injective, P_1 = S_1 is not
        assert!(a2.is_injective(a2.projective(0)));
        assert!(!a2.is_injective(a2.projective(1)));
        assert!(a2.is_injective(&a2.simple(0)));
    }

    #[test]
    fn global_form_roundtrip() {
        let cat = linear(3, 2);
        let p0 = cat.projective(0);
        let acts: Vec<Matrix> = (0..1).map(|a| p0.action_matrix(a)).collect();
        let blocks: Vec<Matrix> = (0..2).map(|v| p0.vertex_block(v)).collect();
        let back = Module::from_global(cat.quiver().clone(), p0.dim(), &acts, &blocks).unwrap();
        assert_eq!(back, **p0);
        // idempotents listed in the wrong order of coordinates still normalize
        let k = cat.field();
        let swapped_blocks = vec![
            Matrix::from_rows(k, 2, &[vec![0, 0], vec![0, 1]]),
            Matrix::from_rows(k, 2, &[vec![1, 0], vec![0, 0]]),
        ];
        let act = Matrix::from_rows(k, 2, &[vec![0, 1], vec![0, 0]]);
        let m = Module::from_global(cat.quiver().clone(), 2, &[act], &swapped_blocks).unwrap();
        assert_eq!(m, **p0);
    }

    #[test]
    fn projective_covers_and_approximations() {
        let cat = truncated_loop(3, 3);
        let m2 = cyclic(&cat, 2);
        let cov = cat.projective_cover(&m2);
        assert_eq!(cov.summand_vertices, vec![0]);
        assert_eq!(cov.conflation.left().dim(), 1);
        assert!(cat.is_projective(cat.projective(0)));
        assert!(!cat.is_projective(&m2));
        let (sum, map) = cat.left_projective_approximation(&m2);
        assert_eq!(sum.summands.len(), 1);
        assert!(map.is_injective());
    }
}
