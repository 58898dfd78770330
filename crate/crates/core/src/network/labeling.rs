use std::cmp::Ordering;

use serde::Serialize;

use super::{Network, VertexKind};
use crate::geometry::{ccw_angle_cmp, Circle};

/// Boundary labels `b_1..b_n`: outer vertices counterclockwise from the cut,
/// then inner vertices clockwise from the cut. Index sets are 1-based.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct BoundaryLabeling {
    /// `order[l - 1]` is the vertex index carrying label `l`.
    pub order: Vec<usize>,
    pub n1: usize,
    pub sources: Vec<usize>,
    pub sinks: Vec<usize>,
}

impl BoundaryLabeling {
    pub fn n(&self) -> usize {
        self.order.len()
    }

    pub fn label_of(&self, v: usize) -> Option<usize> {
        self.order.iter().position(|&x| x == v).map(|i| i + 1)
    }

    pub fn vertex(&self, label: usize) -> usize {
        self.order[label - 1]
    }

    pub fn k(&self) -> usize {
        self.sources.len()
    }

    pub fn m(&self) -> usize {
        self.sinks.len()
    }

    pub fn circle(&self, label: usize) -> Circle {
        if label <= self.n1 {
            Circle::Outer
        } else {
            Circle::Inner
        }
    }

    /// Row of a source label in the measurement matrix.
    pub fn source_row(&self, label: usize) -> Option<usize> {
        self.sources.iter().position(|&l| l == label)
    }

    pub fn sink_col(&self, label: usize) -> Option<usize> {
        self.sinks.iter().position(|&l| l == label)
    }
}

pub fn label_boundary(n: &Network) -> BoundaryLabeling {
    let on = |c: Circle| -> Vec<usize> {
        (0..n.vertices.len()).filter(|&v| n.vertices[v].kind.is_boundary() && n.circle_of(v) == Some(c)).collect()
    };
    let mut outer = on(Circle::Outer);
    let base_out = n.cut.last();
    outer.sort_by(|&a, &b| ccw_angle_cmp(base_out, &n.vertices[a].pos, &n.vertices[b].pos));
    let mut inner = on(Circle::Inner);
    let base_in = n.cut.first();
    // clockwise: decreasing counterclockwise angle, the base point itself last
    inner.sort_by(|&a, &b| match ccw_angle_cmp(base_in, &n.vertices[a].pos, &n.vertices[b].pos) {
        Ordering::Less => Ordering::Greater,
        Ordering::Greater => Ordering::Less,
        Ordering::Equal => Ordering::Equal,
    });
    let n1 = outer.len();
    let order: Vec<usize> = outer.into_iter().chain(inner).collect();
    let pick = |kind: VertexKind| -> Vec<usize> {
        (1..=order.len()).filter(|&l| n.vertices[order[l - 1]].kind == kind).collect()
    };
    BoundaryLabeling { n1, sources: pick(VertexKind::Source), sinks: pick(VertexKind::Sink), order }
}
