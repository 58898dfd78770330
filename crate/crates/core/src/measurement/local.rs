//! Geometric sign data that path weights factor through.
//!
//! The concordance count of `C_P` against a fixed probe direction is a sum
//! over consecutive segment pairs, so its parity splits into a part inside
//! each edge, a part at each vertex passage, and a part from the closing
//! curve together with its two junctions.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geometry::{choose_probe, closing_curve, cone_count, in_open_cone, intersection_index, Point};
use crate::network::{label_boundary, BoundaryLabeling, Network};

#[derive(Clone, Debug)]
pub struct LocalData {
    pub labels: BoundaryLabeling,
    pub probe: Point,
    /// `(-1)^{cone count inside the edge}`
    pub edge_sign: Vec<i8>,
    /// intersection index of each edge with the cut
    pub ind: Vec<i64>,
    /// sign of each vertex passage `(e, f)` with `head(e) = tail(f)`
    pub turn: HashMap<(usize, usize), i8>,
    /// edge leaving each source, by matrix row
    pub first_edge: Vec<Option<usize>>,
    /// edge entering each sink, by matrix column
    pub last_edge: Vec<Option<usize>>,
    /// `(-1)^{closing count - 1}` by (row, column), when both ends have edges
    pub closing: Vec<Vec<i8>>,
}

fn parity(c: u64) -> i8 {
    if c.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn directions_of(points: &[Point]) -> Vec<Point> {
    points.windows(2).map(|w| w[1].sub(&w[0])).collect()
}

impl LocalData {
    pub fn new(n: &Network) -> Result<Self> {
        let labels = label_boundary(n);
        let avoid = n.boundary_positions();
        let only = |v: usize, out: bool| -> Option<usize> {
            n.edges.iter().position(|e| if out { e.tail == v } else { e.head == v })
        };
        let first_edge: Vec<Option<usize>> = labels.sources.iter().map(|&l| only(labels.vertex(l), true)).collect();
        let last_edge: Vec<Option<usize>> = labels.sinks.iter().map(|&l| only(labels.vertex(l), false)).collect();

        // closing curves as full point lists, sink first and source last
        let mut curves = vec![vec![Vec::new(); labels.m()]; labels.k()];
        for (r, &i) in labels.sources.iter().enumerate() {
            for (c, &j) in labels.sinks.iter().enumerate() {
                let (src, snk) = (&n.vertices[labels.vertex(i)].pos, &n.vertices[labels.vertex(j)].pos);
                let mut pts = vec![snk.clone()];
                pts.extend(closing_curve(snk, src, &n.annulus, &n.cut, &avoid)?);
                curves[r][c] = pts;
            }
        }
        let mut all_dirs: Vec<Point> = n.edges.iter().flat_map(|e| e.polyline.directions()).collect();
        for row in &curves {
            for pts in row {
                all_dirs.extend(directions_of(pts));
            }
        }
        let probe = choose_probe(all_dirs.iter());

        let mut edge_sign = Vec::with_capacity(n.edges.len());
        let mut ind = Vec::with_capacity(n.edges.len());
        for e in &n.edges {
            edge_sign.push(parity(cone_count(&e.polyline.directions(), false, &probe)?));
            ind.push(intersection_index(&e.polyline, &n.cut)?);
        }
        let mut turn = HashMap::new();
        for (a, e) in n.edges.iter().enumerate() {
            let last = e.polyline.directions().pop().expect("edge has a segment");
            for f in n.out_edges(e.head) {
                let first = &n.edges[f].polyline.directions()[0];
                let inside = in_open_cone(&last, first, &probe).ok_or(Error::DegenerateTurn(e.head))?;
                turn.insert((a, f), if inside { -1 } else { 1 });
            }
        }
        let mut closing = vec![vec![1i8; labels.m()]; labels.k()];
        for r in 0..labels.k() {
            for c in 0..labels.m() {
                let (Some(f), Some(g)) = (first_edge[r], last_edge[c]) else {
                    continue;
                };
                let mut dirs = vec![n.edges[g].polyline.directions().pop().expect("segment")];
                dirs.extend(directions_of(&curves[r][c]));
                dirs.push(n.edges[f].polyline.directions()[0].clone());
                let count = cone_count(&dirs, false, &probe)?;
                closing[r][c] = -parity(count);
            }
        }
        Ok(LocalData { labels, probe, edge_sign, ind, turn, first_edge, last_edge, closing })
    }
}
