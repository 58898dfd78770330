//! Small networks used by tests, benches and examples.

use super::{Edge, Network, Vertex, VertexKind, Weight};
use crate::arith::{frac, Scalar};
use crate::geometry::{AnnulusSpec, Point, Polyline};

fn pt(x: (i64, i64), y: (i64, i64)) -> Point {
    Point::new(frac(x.0, x.1), frac(y.0, y.1))
}

struct Builder {
    n: Network,
}

impl Builder {
    fn new(inner: i64, outer: i64, cut: Vec<Point>) -> Self {
        let annulus = AnnulusSpec::new(frac(inner, 1), frac(outer, 1)).expect("radii");
        Builder {
            n: Network {
                annulus,
                cut: Polyline { points: cut, closed: false },
                vertices: Vec::new(),
                edges: Vec::new(),
            },
        }
    }

    fn vertex(&mut self, id: &str, kind: VertexKind, pos: Point) -> &mut Self {
        self.n.vertices.push(Vertex { id: id.into(), kind, pos });
        self
    }

    fn edge(&mut self, id: &str, tail: &str, head: &str, via: &[Point]) -> &mut Self {
        let t = self.n.vertex_index(tail).expect("tail");
        let h = self.n.vertex_index(head).expect("head");
        let mut points = vec![self.n.vertices[t].pos.clone()];
        points.extend(via.iter().cloned());
        points.push(self.n.vertices[h].pos.clone());
        self.n.edges.push(Edge {
            id: id.into(),
            tail: t,
            head: h,
            weight: Weight::Symbol(id.replace('e', "w")),
            polyline: Polyline { points, closed: false },
        });
        self
    }
}

/// Three boundary vertices (one outer source, an inner sink and an inner
/// source), five internal vertices and a cycle around the hole. Edge `ek`
/// carries the symbol `wk`.
pub fn pergrann() -> Network {
    use VertexKind::*;
    let mut b = Builder::new(1, 4, vec![Point::ints(1, 0), Point::ints(4, 0)]);
    b.vertex("b", Source, Point::ints(0, 4))
        .vertex("b'", Sink, pt((-12, 13), (-5, 13)))
        .vertex("b''", Source, pt((4, 5), (-3, 5)))
        .vertex("v1", White, Point::ints(0, 3))
        .vertex("v2", Black, pt((-5, 4), (2, 1)))
        .vertex("v3", White, pt((-12, 5), (-4, 5)))
        .vertex("v4", Black, pt((1, 2), (-5, 2)))
        .vertex("v5", Black, pt((12, 5), (-4, 5)));
    b.edge("e1", "b", "v1", &[])
        .edge("e2", "v1", "v2", &[])
        .edge("e3", "v2", "v3", &[])
        .edge("e4", "v3", "b'", &[])
        .edge("e5", "v3", "v4", &[])
        .edge("e6", "v4", "v5", &[])
        .edge("e7", "b''", "v5", &[])
        .edge("e8", "v5", "v2", &[pt((13, 5), (3, 5)), pt((1, 1), (5, 2))])
        .edge(
            "e9",
            "v1",
            "v4",
            &[pt((-2, 1), (3, 1)), pt((-16, 5), (0, 1)), pt((-11, 5), (-12, 5)), pt((1, 2), (-33, 10))],
        );
    b.n
}

/// Generic rational values for the weights of [`pergrann`].
pub fn pergrann_values() -> Vec<Scalar> {
    [(2, 3), (3, 5), (-5, 7), (7, 2), (11, 13), (-2, 9), (5, 11), (13, 17), (3, 19)]
        .iter()
        .map(|&(p, q)| frac(p, q))
        .collect()
}

/// A single edge from an outer source to an inner sink.
pub fn spoke() -> Network {
    let mut b = Builder::new(1, 2, vec![Point::ints(1, 0), Point::ints(2, 0)]);
    b.vertex("s", VertexKind::Source, Point::ints(0, 2)).vertex("t", VertexKind::Sink, Point::ints(0, 1)).edge(
        "e1",
        "s",
        "t",
        &[],
    );
    b.n
}

/// Two outer sources joined to two inner sinks by edges that cross once.
/// Not planar.
pub fn crossed() -> Network {
    let mut b = Builder::new(1, 4, vec![Point::ints(1, 0), Point::ints(4, 0)]);
    b.vertex("p1", VertexKind::Source, pt((-16, 5), (12, 5)))
        .vertex("p2", VertexKind::Source, pt((16, 5), (12, 5)))
        .vertex("q1", VertexKind::Sink, pt((-3, 5), (4, 5)))
        .vertex("q2", VertexKind::Sink, pt((3, 5), (4, 5)))
        .edge("e1", "p1", "q2", &[pt((3, 5), (2, 1))])
        .edge("e2", "p2", "q1", &[pt((-3, 5), (2, 1))]);
    b.n
}
