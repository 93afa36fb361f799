//! JSON input format: a vertex-labelled graph with one group per vertex.
//!
//! ```json
//! {"vertices": [{"name": "a", "group": {"kind": "cyclic", "n": 2}},
//!               {"name": "b", "group": {"kind": "abstract", "order": "infinite",
//!                                       "amenable": "true"}}],
//!  "edges": [["a", "b"]],
//!  "conventions": {"finite_groups_pp": true}}
//! ```

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::groups::{build_group, Conventions, Facts, GroupDescriptor, Order};
use crate::truth::Truth;
use crate::words::GraphProduct;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub vertices: Vec<VertexEntry>,
    #[serde(default)]
    pub edges: Vec<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conventions: Option<Conventions>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexEntry {
    pub name: String,
    pub group: GroupEntry,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum GroupEntry {
    Cyclic {
        n: u32,
    },
    Dihedral {
        n: u32,
    },
    Symmetric {
        n: u32,
    },
    Table {
        names: Vec<String>,
        table: Vec<Vec<u32>>,
    },
    Abstract {
        order: OrderEntry,
        #[serde(default)]
        properly_proximal: Truth,
        #[serde(default)]
        amenable: Truth,
        #[serde(default)]
        weakly_amenable_cstar1: Truth,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OrderEntry {
    Finite(u64),
    Named(InfiniteTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InfiniteTag {
    Infinite,
}

impl GroupEntry {
    pub fn descriptor(&self) -> GroupDescriptor {
        match self {
            GroupEntry::Cyclic { n } => GroupDescriptor::Cyclic(*n),
            GroupEntry::Dihedral { n } => GroupDescriptor::Dihedral(*n),
            GroupEntry::Symmetric { n } => GroupDescriptor::Symmetric(*n),
            GroupEntry::Table { names, table } => {
                GroupDescriptor::Table { names: names.clone(), table: table.clone() }
            }
            GroupEntry::Abstract { order, properly_proximal, amenable, weakly_amenable_cstar1 } => {
                GroupDescriptor::Abstract {
                    order: match order {
                        OrderEntry::Finite(n) => Order::Finite(*n),
                        OrderEntry::Named(InfiniteTag::Infinite) => Order::Infinite,
                    },
                    facts: Facts {
                        properly_proximal: *properly_proximal,
                        amenable: *amenable,
                        weakly_amenable_cstar1: *weakly_amenable_cstar1,
                    },
                }
            }
        }
    }
}

/// A parsed and validated input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spec {
    pub product: GraphProduct,
    pub conventions: Conventions,
}

impl Spec {
    pub fn graph(&self) -> &Graph {
        self.product.graph()
    }
}

fn field(path: String) -> impl FnOnce(Error) -> Error {
    move |e| match e {
        Error::InvalidInput(msg) => Error::InvalidInput(format!("{path}: {msg}")),
        Error::UnknownVertex(v) => Error::InvalidInput(format!("{path}: undeclared vertex `{v}`")),
        Error::GroupAxiom { axiom, witness } => {
            Error::InvalidInput(format!("{path}: table violates {axiom} ({witness})"))
        }
        other => other,
    }
}

impl SpecFile {
    pub fn validate(&self) -> Result<Spec> {
        let mut index = HashMap::new();
        let mut names = Vec::with_capacity(self.vertices.len());
        let mut groups = Vec::with_capacity(self.vertices.len());
        for (i, v) in self.vertices.iter().enumerate() {
            if v.name.is_empty() {
                return Err(Error::input(format!("vertices[{i}].name: empty vertex name")));
            }
            if index.insert(v.name.as_str(), i).is_some() {
                return Err(Error::input(format!(
                    "vertices[{i}].name: duplicate vertex `{}`",
                    v.name
                )));
            }
            names.push(v.name.clone());
            groups.push(build_group(v.group.descriptor()).map_err(field(format!("vertices[{i}].group")))?);
        }
        let mut edges = Vec::with_capacity(self.edges.len());
        for (i, [u, w]) in self.edges.iter().enumerate() {
            let look = |name: &String| {
                index.get(name.as_str()).copied().ok_or_else(|| {
                    Error::input(format!("edges[{i}]: edge references undeclared vertex `{name}`"))
                })
            };
            let (a, b) = (look(u)?, look(w)?);
            if a == b {
                return Err(Error::input(format!("edges[{i}]: loop edge at `{u}`")));
            }
            edges.push((a, b));
        }
        let graph = Graph::new(names, &edges).map_err(field("edges".into()))?;
        let product = GraphProduct::new(graph, groups).map_err(field("vertices".into()))?;
        Ok(Spec { product, conventions: self.conventions.unwrap_or_default() })
    }
}

/// Parses and validates JSON text. Syntax errors report line and column.
pub fn parse_spec(text: &str) -> Result<Spec> {
    let file: SpecFile = serde_json::from_str(text).map_err(|e| Error::input(format!("spec: {e}")))?;
    file.validate()
}

pub fn load_spec(path: &Path) -> Result<Spec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::input(format!("cannot read {}: {e}", path.display())))?;
    parse_spec(&text)
}
