//! Perfect networks in an annulus: the data model, JSON format, boundary
//! labeling, validation, faces, and the geometric transforms.

mod crossing;
mod faces;
pub mod fixtures;
mod labeling;
mod random;
mod transform;
mod validate;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::arith::{fmt_scalar, parse_scalar, Field, Scalar};
use crate::error::{Error, Result};
use crate::geometry::{AnnulusSpec, Circle, Point, Polyline};

pub use crossing::{identity_gadget, resolve_crossings};
pub use faces::{face_weights, find_connecting_trail, trail_weight, Face};
pub use labeling::{label_boundary, BoundaryLabeling};
pub use random::{random_network, RandomSpec};
pub use transform::{
    cut_move_passes, gauge_transform, move_cut_base, reverse_cut, reverse_orientation, GaugeAssignment,
};
pub use validate::{validate, validate_drawing};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexKind {
    Source,
    Sink,
    White,
    Black,
}

impl VertexKind {
    pub fn is_boundary(self) -> bool {
        matches!(self, VertexKind::Source | VertexKind::Sink)
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct Vertex {
    pub id: String,
    pub kind: VertexKind,
    pub pos: Point,
}

#[derive(Clone, PartialEq, Debug)]
pub enum Weight {
    Value(Scalar),
    Symbol(String),
}

impl Weight {
    pub fn value(&self) -> Option<&Scalar> {
        match self {
            Weight::Value(v) => Some(v),
            Weight::Symbol(_) => None,
        }
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct Edge {
    pub id: String,
    pub tail: usize,
    pub head: usize,
    pub weight: Weight,
    /// Full polyline from the tail position to the head position.
    pub polyline: Polyline,
}

#[derive(Clone, PartialEq, Debug)]
pub struct Network {
    pub annulus: AnnulusSpec,
    /// Runs from its base point on the inner circle to its base point on
    /// the outer circle.
    pub cut: Polyline,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
}

impl Network {
    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.id == id)
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    pub fn out_edges(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.edges[e].tail == v).collect()
    }

    pub fn in_edges(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.edges[e].head == v).collect()
    }

    pub fn circle_of(&self, v: usize) -> Option<Circle> {
        self.annulus.circle_of(&self.vertices[v].pos)
    }

    pub fn boundary_positions(&self) -> Vec<Point> {
        let mut pts: Vec<Point> =
            self.vertices.iter().filter(|v| v.kind.is_boundary()).map(|v| v.pos.clone()).collect();
        pts.push(self.cut.first().clone());
        pts.push(self.cut.last().clone());
        pts
    }

    /// Numeric edge weights, failing on an unbound symbol.
    pub fn numeric_weights(&self) -> Result<Vec<Scalar>> {
        self.edges
            .iter()
            .map(|e| match &e.weight {
                Weight::Value(v) => Ok(v.clone()),
                Weight::Symbol(s) => Err(Error::UnboundSymbol(s.clone())),
            })
            .collect()
    }

    /// Replaces symbolic weights by the given values.
    pub fn bind(&self, values: &HashMap<String, Scalar>) -> Result<Network> {
        let mut n = self.clone();
        for e in &mut n.edges {
            if let Weight::Symbol(s) = &e.weight {
                let v = values.get(s).ok_or_else(|| Error::UnboundSymbol(s.clone()))?;
                e.weight = Weight::Value(v.clone());
            }
        }
        Ok(n)
    }

    /// Distinct symbol names in order of first appearance.
    pub fn symbols(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for e in &self.edges {
            if let Weight::Symbol(s) = &e.weight {
                if !out.contains(s) {
                    out.push(s.clone());
                }
            }
        }
        out
    }

    pub fn with_weights(&self, w: &[Scalar]) -> Network {
        let mut n = self.clone();
        for (e, v) in n.edges.iter_mut().zip(w) {
            e.weight = Weight::Value(v.clone());
        }
        n
    }

    pub fn from_json(text: &str) -> Result<Network> {
        let raw: RawNetwork = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        raw.into_network()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&RawNetwork::from_network(self)).expect("serializable")
    }
}

#[derive(Serialize, Deserialize)]
struct RawAnnulus {
    inner_radius: String,
    outer_radius: String,
}

#[derive(Serialize, Deserialize)]
struct RawVertex {
    id: String,
    kind: VertexKind,
    pos: Point,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawWeight {
    Value(String),
    Symbol { symbol: String },
}

#[derive(Serialize, Deserialize)]
struct RawEdge {
    id: String,
    tail: String,
    head: String,
    weight: RawWeight,
    #[serde(default)]
    polyline: Vec<Point>,
}

#[derive(Serialize, Deserialize)]
struct RawNetwork {
    annulus: RawAnnulus,
    cut: Vec<Point>,
    vertices: Vec<RawVertex>,
    edges: Vec<RawEdge>,
}

impl RawNetwork {
    fn into_network(self) -> Result<Network> {
        let annulus =
            AnnulusSpec::new(parse_scalar(&self.annulus.inner_radius)?, parse_scalar(&self.annulus.outer_radius)?)?;
        let cut = Polyline::open(self.cut)?;
        let mut ids = HashMap::new();
        let mut vertices = Vec::new();
        for v in self.vertices {
            if ids.insert(v.id.clone(), vertices.len()).is_some() {
                return Err(Error::Parse(format!("duplicate vertex id {}", v.id)));
            }
            vertices.push(Vertex { id: v.id, kind: v.kind, pos: v.pos });
        }
        let mut edges = Vec::new();
        let mut edge_ids = HashMap::new();
        for e in self.edges {
            if edge_ids.insert(e.id.clone(), ()).is_some() {
                return Err(Error::Parse(format!("duplicate edge id {}", e.id)));
            }
            let find = |id: &str| {
                ids.get(id).copied().ok_or_else(|| Error::Parse(format!("edge {} refers to unknown vertex {id}", e.id)))
            };
            let (tail, head) = (find(&e.tail)?, find(&e.head)?);
            // endpoints may be omitted from the stored polyline
            let mut pts = e.polyline;
            if pts.first() != Some(&vertices[tail].pos) {
                pts.insert(0, vertices[tail].pos.clone());
            }
            if pts.last() != Some(&vertices[head].pos) {
                pts.push(vertices[head].pos.clone());
            }
            let polyline = Polyline::open(pts).map_err(|err| Error::Parse(format!("edge {}: {err}", e.id)))?;
            let weight = match e.weight {
                RawWeight::Value(s) => Weight::Value(parse_scalar(&s)?),
                RawWeight::Symbol { symbol } => Weight::Symbol(symbol),
            };
            edges.push(Edge { id: e.id, tail, head, weight, polyline });
        }
        Ok(Network { annulus, cut, vertices, edges })
    }

    fn from_network(n: &Network) -> Self {
        RawNetwork {
            annulus: RawAnnulus {
                inner_radius: fmt_scalar(&n.annulus.inner_radius),
                outer_radius: fmt_scalar(&n.annulus.outer_radius),
            },
            cut: n.cut.points.clone(),
            vertices: n
                .vertices
                .iter()
                .map(|v| RawVertex { id: v.id.clone(), kind: v.kind, pos: v.pos.clone() })
                .collect(),
            edges: n
                .edges
                .iter()
                .map(|e| RawEdge {
                    id: e.id.clone(),
                    tail: n.vertices[e.tail].id.clone(),
                    head: n.vertices[e.head].id.clone(),
                    weight: match &e.weight {
                        Weight::Value(v) => RawWeight::Value(fmt_scalar(v)),
                        Weight::Symbol(s) => RawWeight::Symbol { symbol: s.clone() },
                    },
                    polyline: e.polyline.points.clone(),
                })
                .collect(),
        }
    }
}

/// Nonzero check shared by operations that invert weights.
pub(crate) fn nonzero_weights(n: &Network) -> Result<Vec<Scalar>> {
    let w = n.numeric_weights()?;
    for (e, v) in n.edges.iter().zip(&w) {
        if Field::is_zero(v) {
            return Err(Error::ZeroWeight(e.id.clone()));
        }
    }
    Ok(w)
}
