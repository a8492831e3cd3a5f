//! JSON instance files: an algebra given by a quiver with relations, named modules, and
//! a proper class.
//!
//! ```json
//! {
//!   "p": 2,
//!   "quiver": {
//!     "vertices": 1,
//!     "arrows": [{"src": 0, "tgt": 0, "name": "x"}],
//!     "relations": [[{"coeff": 1, "path": ["x", "x"]}]],
//!     "nilpotency_bound": 2
//!   },
//!   "modules": {"k": {"dim": 1, "action": {"x": [[0]]}, "vertex_blocks": {"0": [[1]]}}},
//!   "proper_class": "all"
//! }
//! ```
//!
//! Paths list arrow names in the order they are traversed. Module matrices act on
//! column vectors, and entries are reduced mod `p` on load. Loaded modules are
//! re-expressed in a basis adapted to the vertex idempotents; serializing an instance
//! writes that normalized form.

use std::sync::Arc;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{enumerate_basis, AlgebraError, Arrow, QuiverPresentation};
use crate::linalg::{FieldError, Fp, Matrix};
use crate::modcat::{Module, ModuleCategory, ModuleError, ModuleRef};
use crate::propclass::{ProperClassError, ProperClassSpec};
use crate::resolution::Session;

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("{message} at line {line}, column {column}")]
    Parse { line: usize, column: usize, message: String },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("unknown arrow `{0}`")]
    UnknownArrow(String),
    #[error("unknown module `{0}`")]
    UnknownModule(String),
    #[error("module `{module}`: {reason}")]
    BadModuleData { module: String, reason: String },
    #[error("module `{module}`: {source}")]
    Module { module: String, source: ModuleError },
    #[error(transparent)]
    ProperClass(#[from] ProperClassError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrowSpec {
    pub src: usize,
    pub tgt: usize,
    pub name: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub coeff: i64,
    pub path: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuiverSpec {
    pub vertices: usize,
    pub arrows: Vec<ArrowSpec>,
    #[serde(default)]
    pub relations: Vec<Vec<TermSpec>>,
    pub nilpotency_bound: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleSpec {
    pub dim: usize,
    #[serde(default)]
    pub action: IndexMap<String, Vec<Vec<i64>>>,
    /// May be omitted for one-vertex quivers.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex_blocks: Option<IndexMap<String, Vec<Vec<i64>>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ProperClassFile {
    All,
    Relative(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub p: u32,
    pub quiver: QuiverSpec,
    pub modules: IndexMap<String, ModuleSpec>,
    pub proper_class: ProperClassFile,
}

/// A validated instance: the session (algebra, class, caches) plus named modules.
pub struct Instance {
    pub session: Session,
    pub modules: IndexMap<String, ModuleRef>,
    pub proper_class: ProperClassFile,
}

impl std::fmt::Debug for Instance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Instance")
            .field("quiver", self.session.category().quiver())
            .field("modules", &self.modules)
            .field("proper_class", &self.proper_class)
            .finish()
    }
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        self.session.category().quiver() == other.session.category().quiver()
            && self.modules == other.modules
            && self.proper_class == other.proper_class
    }
}

fn matrix(field: Fp, dim: usize, rows: &[Vec<i64>], module: &str, what: &str) -> Result<Matrix, InstanceError> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(InstanceError::BadModuleData {
            module: module.into(),
            reason: format!("{what} must be a {dim}x{dim} matrix"),
        });
    }
    Ok(Matrix::from_rows(field, dim, rows))
}

fn build_quiver(file: &InstanceFile) -> Result<QuiverPresentation, InstanceError> {
    let field = Fp::new(file.p)?;
    let q = &file.quiver;
    let arrows: Vec<Arrow> = q
        .arrows
        .iter()
        .map(|a| Arrow {
            source: a.src,
            target: a.tgt,
            name: a.name.clone(),
        })
        .collect();
    let index = |name: &str| {
        arrows
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| InstanceError::UnknownArrow(name.into()))
    };
    let mut relations = Vec::with_capacity(q.relations.len());
    for rel in &q.relations {
        let mut terms = Vec::with_capacity(rel.len());
        for t in rel {
            let path = t.path.iter().map(|n| index(n)).collect::<Result<Vec<_>, _>>()?;
            terms.push((t.coeff, path));
        }
        relations.push(terms);
    }
    Ok(QuiverPresentation::new(field, q.vertices, arrows, relations, q.nilpotency_bound)?)
}

fn build_module(quiver: &Arc<QuiverPresentation>, name: &str, spec: &ModuleSpec) -> Result<Module, InstanceError> {
    let field = quiver.field();
    let mut actions = Vec::with_capacity(quiver.arrows().len());
    for a in quiver.arrows() {
        let rows = spec.action.get(&a.name).ok_or_else(|| InstanceError::BadModuleData {
            module: name.into(),
            reason: format!("missing action of arrow `{}`", a.name),
        })?;
        actions.push(matrix(field, spec.dim, rows, name, &format!("action of `{}`", a.name))?);
    }
    if let Some(extra) = spec.action.keys().find(|k| quiver.arrow_index(k).is_none()) {
        return Err(InstanceError::UnknownArrow(extra.clone()));
    }
    let nv = quiver.vertices();
    let blocks = match &spec.vertex_blocks {
        None if nv == 1 => vec![Matrix::identity(field, spec.dim)],
        None => {
            return Err(InstanceError::BadModuleData {
                module: name.into(),
                reason: "vertex_blocks are required when the quiver has several vertices".into(),
            })
        }
        Some(map) => {
            if let Some(bad) = map.keys().find(|k| k.parse::<usize>().map_or(true, |v| v >= nv)) {
                return Err(InstanceError::BadModuleData {
                    module: name.into(),
                    reason: format!("`{bad}` is not a vertex"),
                });
            }
            (0..nv)
                .map(|v| match map.get(&v.to_string()) {
                    Some(rows) => matrix(field, spec.dim, rows, name, &format!("vertex block {v}")),
                    None => Ok(Matrix::zeros(field, spec.dim, spec.dim)),
                })
                .collect::<Result<Vec<_>, _>>()?
        }
    };
    Module::from_global(quiver.clone(), spec.dim, &actions, &blocks).map_err(|source| InstanceError::Module {
        module: name.into(),
        source,
    })
}

impl Instance {
    pub fn from_json(text: &str) -> Result<Instance, InstanceError> {
        let file: InstanceFile = serde_json::from_str(text).map_err(|e| InstanceError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Instance::from_file(&file)
    }

    pub fn from_file(file: &InstanceFile) -> Result<Instance, InstanceError> {
        let basis = enumerate_basis(build_quiver(file)?)?;
        let cat = ModuleCategory::new(basis);
        let quiver = cat.quiver().clone();
        let mut modules = IndexMap::new();
        for (name, spec) in &file.modules {
            modules.insert(name.clone(), Arc::new(build_module(&quiver, name, spec)?));
        }
        let xi = match &file.proper_class {
            ProperClassFile::All => ProperClassSpec::All,
            ProperClassFile::Relative(names) => {
                let xs = names
                    .iter()
                    .map(|n| modules.get(n).cloned().ok_or_else(|| InstanceError::UnknownModule(n.clone())))
                    .collect::<Result<Vec<_>, _>>()?;
                ProperClassSpec::relative(&cat, xs)?
            }
        };
        Ok(Instance {
            session: Session::new(cat, xi),
            modules,
            proper_class: file.proper_class.clone(),
        })
    }

    pub fn module(&self, name: &str) -> Result<&ModuleRef, InstanceError> {
        self.modules.get(name).ok_or_else(|| InstanceError::UnknownModule(name.into()))
    }

    /// The normalized file form of this instance.
    pub fn to_file(&self) -> InstanceFile {
        let q = self.session.category().quiver();
        let to_i64 = |m: &Matrix| -> Vec<Vec<i64>> {
            m.to_rows()
                .into_iter()
                .map(|r| r.into_iter().map(i64::from).collect())
                .collect()
        };
        let names: Vec<&str> = q.arrows().iter().map(|a| a.name.as_str()).collect();
        let quiver = QuiverSpec {
            vertices: q.vertices(),
            arrows: q
                .arrows()
                .iter()
                .map(|a| ArrowSpec {
                    src: a.source,
                    tgt: a.target,
                    name: a.name.clone(),
                })
                .collect(),
            relations: q
                .relations()
                .iter()
                .map(|rel| {
                    rel.iter()
                        .map(|t| TermSpec {
                            coeff: i64::from(t.coeff),
                            path: t.path.iter().map(|&a| names[a].to_string()).collect(),
                        })
                        .collect()
                })
                .collect(),
            nilpotency_bound: q.nilpotency_bound(),
        };
        let modules = self
            .modules
            .iter()
            .map(|(name, m)| {
                let action = (0..q.arrows().len())
                    .map(|a| (names[a].to_string(), to_i64(&m.action_matrix(a))))
                    .collect();
                let blocks = (0..q.vertices()).map(|v| (v.to_string(), to_i64(&m.vertex_block(v)))).collect();
                let spec = ModuleSpec {
                    dim: m.dim(),
                    action,
                    vertex_blocks: Some(blocks),
                };
                (name.clone(), spec)
            })
            .collect();
        InstanceFile {
            p: q.field().modulus(),
            quiver,
            modules,
            proper_class: self.proper_class.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("instance serializes")
    }
}

/// The instances shipped with the library.
pub mod catalog {
    use super::{Instance, InstanceError};

    pub const ENTRIES: [(&str, &str); 6] = [
        ("dual_numbers", include_str!("../catalog/dual_numbers.json")),
        ("dual_numbers_relative", include_str!("../catalog/dual_numbers_relative.json")),
        ("truncated_cube", include_str!("../catalog/truncated_cube.json")),
        ("a2", include_str!("../catalog/a2.json")),
        ("a3", include_str!("../catalog/a3.json")),
        ("truncated_quartic", include_str!("../catalog/truncated_quartic.json")),
    ];

    pub fn names() -> impl Iterator<Item = &'static str> {
        ENTRIES.iter().map(|(n, _)| *n)
    }

    pub fn source(name: &str) -> Option<&'static str> {
        ENTRIES.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
    }

    pub fn load(name: &str) -> Option<Result<Instance, InstanceError>> {
        source(name).map(Instance::from_json)
    }

    pub fn load_all() -> Vec<(&'static str, Instance)> {
        ENTRIES
            .iter()
            .map(|(n, s)| (*n, Instance::from_json(s).expect("catalog instance is valid")))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_loads_and_round_trips() {
        for (name, inst) in catalog::load_all() {
            let again = Instance::from_json(&inst.to_json()).unwrap();
            assert_eq!(inst, again, "{name}");
            assert_eq!(inst.to_json(), again.to_json());
        }
    }

    #[test]
    fn catalog_dimensions() {
        let dims = |name: &str| catalog::load(name).unwrap().unwrap().session.category().basis().dim();
        assert_eq!(dims("dual_numbers"), 2);
        assert_eq!(dims("truncated_cube"), 3);
        assert_eq!(dims("a2"), 3);
        assert_eq!(dims("a3"), 6);
        assert_eq!(dims("truncated_quartic"), 4);
    }

    #[test]
    fn rejects_unknown_keys_with_location() {
        let text = "{\n  \"p\": 2,\n  \"colour\": 1\n}";
        match Instance::from_json(text) {
            Err(InstanceError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_modules() {
        let base = catalog::source("dual_numbers").unwrap();
        let mut file: InstanceFile = serde_json::from_str(base).unwrap();
        file.modules.get_mut("k").unwrap().action.insert("x".into(), vec![vec![1]]);
        assert!(matches!(Instance::from_file(&file), Err(InstanceError::Module { .. })));
        let mut file: InstanceFile = serde_json::from_str(base).unwrap();
        file.proper_class = ProperClassFile::Relative(vec!["nope".into()]);
        assert!(matches!(Instance::from_file(&file), Err(InstanceError::UnknownModule(_))));
        let mut file: InstanceFile = serde_json::from_str(base).unwrap();
        file.p = 4;
        assert!(matches!(Instance::from_file(&file), Err(InstanceError::Field(_))));
    }

    #[test]
    fn proper_class_forms() {
        let all: ProperClassFile = serde_json::from_str("\"all\"").unwrap();
        assert_eq!(all, ProperClassFile::All);
        let rel: ProperClassFile = serde_json::from_str("{\"relative\": [\"k\"]}").unwrap();
        assert_eq!(rel, ProperClassFile::Relative(vec!["k".into()]));
    }
}
