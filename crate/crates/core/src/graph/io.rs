//! On-disk graph document: UTF-8 JSON with `dimension`, `vertices`, `edges`
//! and `base_vertex`. Unknown keys are rejected.

use serde::{Deserialize, Serialize};

use super::{Edge, GraphError, PeriodicGraph, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexRecord {
    pub name: String,
    pub potential: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub tail: String,
    pub head: String,
    pub offset: Vec<i64>,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub dimension: usize,
    pub vertices: Vec<VertexRecord>,
    pub edges: Vec<EdgeRecord>,
    pub base_vertex: String,
}

impl GraphFile {
    pub fn into_graph<T: Scalar>(self) -> Result<PeriodicGraph<T>> {
        let names: Vec<String> = self.vertices.iter().map(|v| v.name.clone()).collect();
        let index = |name: &str| {
            names.iter().position(|n| n == name).ok_or_else(|| GraphError::UnknownVertex(name.to_owned()))
        };
        let potential = self.vertices.iter().map(|v| T::lit(v.potential)).collect();
        let edges = self
            .edges
            .iter()
            .map(|e| {
                Ok(Edge { tail: index(&e.tail)?, head: index(&e.head)?, offset: e.offset.clone(), weight: T::lit(e.weight) })
            })
            .collect::<Result<Vec<_>>>()?;
        let base = index(&self.base_vertex)?;
        PeriodicGraph::new(self.dimension, names, potential, edges, base)
    }

    pub fn from_graph<T: Scalar>(g: &PeriodicGraph<T>) -> Self {
        GraphFile {
            dimension: g.dimension(),
            vertices: g
                .vertex_names()
                .iter()
                .zip(g.potential())
                .map(|(n, c)| VertexRecord { name: n.clone(), potential: c.as_f64() })
                .collect(),
            edges: g
                .edges()
                .iter()
                .map(|e| EdgeRecord {
                    tail: g.vertex_name(e.tail).to_owned(),
                    head: g.vertex_name(e.head).to_owned(),
                    offset: e.offset.clone(),
                    weight: e.weight.as_f64(),
                })
                .collect(),
            base_vertex: g.vertex_name(g.base_vertex()).to_owned(),
        }
    }
}

impl<T: Scalar> PeriodicGraph<T> {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: GraphFile = serde_json::from_str(text).map_err(|e| GraphError::Format(e.to_string()))?;
        file.into_graph()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&GraphFile::from_graph(self)).expect("graph documents always serialize")
    }
}
