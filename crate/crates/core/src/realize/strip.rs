//! Drawings on the strip `x ∈ ℝ / W`, `0 ≤ y ≤ h`, where `y = 0` is the
//! outer circle and `x` runs counterclockwise from the cut. Composition
//! happens on the strip; [`Gadget::to_network`] maps it into the annulus.

use num_traits::{Signed, ToPrimitive};

use crate::arith::{frac, int, RatLambda, Scalar};
use crate::error::{Error, Result};
use crate::geometry::{AnnulusSpec, Point, Polyline};
use crate::network::{resolve_crossings, Edge, Network, Vertex, VertexKind, Weight};

/// A strip point; the actual abscissa is `x + wrap · W` for the period `W`
/// fixed at the end.
#[derive(Clone, PartialEq, Debug)]
pub struct SPoint {
    pub x: Scalar,
    pub wrap: i64,
    pub y: Scalar,
}

impl SPoint {
    pub fn new(x: Scalar, y: Scalar) -> Self {
        SPoint { x, wrap: 0, y }
    }

    fn shifted(&self, dx: &Scalar, dy: &Scalar, dwrap: i64) -> SPoint {
        SPoint { x: &self.x + dx, wrap: self.wrap + dwrap, y: &self.y + dy }
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct GVertex {
    pub id: String,
    pub kind: VertexKind,
    pub pos: SPoint,
}

/// `pts` starts at the tail and ends at the head, both lifted.
#[derive(Clone, PartialEq, Debug)]
pub struct GEdge {
    pub id: String,
    pub tail: usize,
    pub head: usize,
    pub weight: Weight,
    pub pts: Vec<SPoint>,
}

/// A network fragment in the box `[0, width] × [0, height]` with terminals
/// on the top and bottom lines, listed left to right.
#[derive(Clone, PartialEq, Debug)]
pub struct Gadget {
    pub width: Scalar,
    pub height: Scalar,
    pub vertices: Vec<GVertex>,
    pub edges: Vec<GEdge>,
    pub top: Vec<usize>,
    pub bottom: Vec<usize>,
    /// One line per construction step.
    pub provenance: Vec<String>,
    /// The function a scalar gadget is built to measure, when known.
    pub value: Option<RatLambda>,
}

fn half(k: i64) -> Scalar {
    frac(2 * k + 1, 2)
}

impl Gadget {
    pub fn empty(width: Scalar, height: Scalar) -> Self {
        Gadget {
            width,
            height,
            vertices: Vec::new(),
            edges: Vec::new(),
            top: Vec::new(),
            bottom: Vec::new(),
            provenance: Vec::new(),
            value: None,
        }
    }

    pub fn vertex(&mut self, id: impl Into<String>, kind: VertexKind, pos: SPoint) -> usize {
        self.vertices.push(GVertex { id: id.into(), kind, pos });
        self.vertices.len() - 1
    }

    /// Edge through the given bends; the head may be lifted by `wrap`.
    pub fn edge(&mut self, tail: usize, head: usize, weight: Weight, via: Vec<SPoint>, wrap: i64) -> usize {
        let mut pts = vec![self.vertices[tail].pos.clone()];
        pts.extend(via);
        let h = &self.vertices[head].pos;
        pts.push(SPoint { wrap: h.wrap + wrap, ..h.clone() });
        let id = format!("e{}", self.edges.len() + 1);
        self.edges.push(GEdge { id, tail, head, weight, pts });
        self.edges.len() - 1
    }

    pub fn note(mut self, s: impl Into<String>) -> Self {
        self.provenance.push(s.into());
        self
    }

    fn kinds(&self, ids: &[usize]) -> Vec<VertexKind> {
        ids.iter().map(|&v| self.vertices[v].kind).collect()
    }

    /// Whether all top terminals are sources and all bottom ones sinks.
    pub fn is_separated(&self) -> bool {
        self.kinds(&self.top).iter().all(|&k| k == VertexKind::Source)
            && self.kinds(&self.bottom).iter().all(|&k| k == VertexKind::Sink)
            && self.vertices.iter().filter(|v| v.kind.is_boundary()).count() == self.top.len() + self.bottom.len()
    }

    pub fn sources(&self) -> usize {
        self.top.len()
    }

    pub fn sinks(&self) -> usize {
        self.bottom.len()
    }

    /// `n` vertical edges of weight 1.
    pub fn wires(n: usize) -> Self {
        let mut g = Gadget::empty(int(n as i64), int(1));
        for i in 0..n {
            let x = half(i as i64);
            let s = g.vertex(format!("s{i}"), VertexKind::Source, SPoint::new(x.clone(), int(0)));
            let t = g.vertex(format!("t{i}"), VertexKind::Sink, SPoint::new(x, int(1)));
            g.edge(s, t, Weight::Value(int(1)), vec![], 0);
            g.top.push(s);
            g.bottom.push(t);
        }
        g
    }

    fn translate(&mut self, dx: &Scalar, dy: &Scalar) {
        for v in &mut self.vertices {
            v.pos = v.pos.shifted(dx, dy, 0);
        }
        for e in &mut self.edges {
            for p in &mut e.pts {
                *p = p.shifted(dx, dy, 0);
            }
        }
    }

    /// Moves the bottom terminals down to `height`.
    fn stretch(&mut self, height: &Scalar) {
        if *height == self.height {
            return;
        }
        for &t in &self.bottom {
            self.vertices[t].pos.y = height.clone();
            for e in &mut self.edges {
                if e.head == t {
                    let last = e.pts.pop().expect("edge has endpoints");
                    let prev = e.pts.last().expect("edge has two endpoints");
                    if prev.x != last.x || prev.wrap != last.wrap {
                        e.pts.push(last.clone());
                    }
                    e.pts.push(SPoint { y: height.clone(), ..last });
                }
            }
        }
        self.height = height.clone();
    }

    fn absorb(&mut self, other: Gadget) -> (Vec<usize>, Vec<usize>) {
        let base = self.vertices.len();
        let ne = self.edges.len();
        self.vertices.extend(other.vertices);
        for (i, mut e) in other.edges.into_iter().enumerate() {
            e.tail += base;
            e.head += base;
            e.id = format!("e{}", ne + i + 1);
            self.edges.push(e);
        }
        self.provenance.extend(other.provenance);
        (other.top.iter().map(|v| v + base).collect(), other.bottom.iter().map(|v| v + base).collect())
    }

    /// Copies `other` shifted by `(dx, dy)`; returns its terminals.
    pub(super) fn embed(&mut self, mut other: Gadget, dx: &Scalar, dy: &Scalar) -> (Vec<usize>, Vec<usize>) {
        other.translate(dx, dy);
        self.absorb(other)
    }

    /// `a` on the left and `b` on the right, separated by a unit gap.
    pub fn beside(a: Gadget, b: Gadget) -> Gadget {
        let h = if a.height > b.height { a.height.clone() } else { b.height.clone() };
        let (mut a, mut b) = (a, b);
        a.stretch(&h);
        b.stretch(&h);
        b.translate(&(&a.width + int(1)), &int(0));
        let width = &a.width + int(1) + &b.width;
        let mut g = a;
        g.value = None;
        let (top, bottom) = g.absorb(b);
        g.top.extend(top);
        g.bottom.extend(bottom);
        g.width = width;
        g
    }

    /// `b` below `a`, the bottom terminals of `a` glued to the top terminals
    /// of `b` in left-to-right order.
    pub fn stack(a: Gadget, b: Gadget) -> Result<Gadget> {
        if a.bottom.len() != b.top.len() {
            return Err(Error::Dimension(format!("cannot glue {} sinks to {} sources", a.bottom.len(), b.top.len())));
        }
        let mut b = b;
        let height = &a.height + int(1) + &b.height;
        b.translate(&int(0), &(&a.height + int(1)));
        let width = if a.width > b.width { a.width.clone() } else { b.width.clone() };
        let value = match (&a.value, &b.value) {
            (Some(x), Some(y)) => Some(x.clone() * y.clone()),
            _ => None,
        };
        let mut g = a;
        g.value = value;
        let glue_up = g.bottom.clone();
        let (top, bottom) = g.absorb(b);
        for (s, t) in glue_up.into_iter().zip(top) {
            g.glue(s, t);
        }
        g.bottom = bottom;
        g.width = width;
        g.height = height;
        Ok(g.compact())
    }

    /// Merges the edge into sink `s` with the edge out of source `t`.
    pub(super) fn glue(&mut self, s: usize, t: usize) {
        let ein = self.edges.iter().position(|e| e.head == s).expect("sink has an incoming edge");
        let eout = self.edges.iter().position(|e| e.tail == t).expect("source has an outgoing edge");
        let a = self.edges[ein].clone();
        let b = self.edges[eout].clone();
        let dwrap = a.pts.last().expect("nonempty").wrap - b.pts[0].wrap;
        let mut pts = a.pts.clone();
        pts.extend(b.pts.iter().map(|p| p.shifted(&int(0), &int(0), dwrap)));
        pts.dedup();
        let weight = match (&a.weight, &b.weight) {
            (Weight::Value(x), Weight::Value(y)) => Weight::Value(x.clone() * y.clone()),
            (w, Weight::Value(y)) if *y == int(1) => w.clone(),
            (Weight::Value(x), w) if *x == int(1) => w.clone(),
            _ => panic!("cannot merge two symbolic weights"),
        };
        self.edges[ein] = GEdge { id: a.id, tail: a.tail, head: b.head, weight, pts };
        self.edges[eout].tail = usize::MAX;
        self.edges[eout].head = usize::MAX;
        self.vertices[s].kind = VertexKind::White;
        self.vertices[s].id.clear();
        self.vertices[t].id.clear();
    }

    /// Drops glued terminals and merged edges.
    pub(super) fn compact(mut self) -> Gadget {
        let dead: Vec<bool> = self.vertices.iter().map(|v| v.id.is_empty()).collect();
        let mut map = vec![usize::MAX; self.vertices.len()];
        let mut k = 0;
        for (i, d) in dead.iter().enumerate() {
            if !d {
                map[i] = k;
                k += 1;
            }
        }
        self.vertices = self.vertices.into_iter().zip(&dead).filter(|(_, d)| !**d).map(|(v, _)| v).collect();
        self.edges.retain(|e| e.tail != usize::MAX);
        for (i, e) in self.edges.iter_mut().enumerate() {
            e.tail = map[e.tail];
            e.head = map[e.head];
            e.id = format!("e{}", i + 1);
        }
        self.top = self.top.iter().map(|&v| map[v]).collect();
        self.bottom = self.bottom.iter().map(|&v| map[v]).collect();
        self
    }

    /// Renames vertices `v1, v2, …` keeping terminal names `b*`.
    fn rename(&mut self) {
        for (i, v) in self.vertices.iter_mut().enumerate() {
            v.id = if v.kind.is_boundary() { format!("b{}", i + 1) } else { format!("v{}", i + 1) };
        }
    }

    /// The drawing in the annulus `1 ≤ |z| ≤ 2` with the cut along the
    /// positive real axis, crossings not yet resolved.
    pub fn to_drawing(&self) -> Result<Network> {
        let mut g = self.clone();
        g.rename();
        let period = &g.width + int(1);
        let map = StripMap { period: period.clone(), height: g.height.clone() };
        let vertices = g
            .vertices
            .iter()
            .map(|v| Vertex { id: v.id.clone(), kind: v.kind, pos: map.point(&v.pos, &period) })
            .collect();
        let mut edges = Vec::new();
        for e in &g.edges {
            let mut points = vec![map.point(&e.pts[0], &period)];
            for w in e.pts.windows(2) {
                points.extend(map.segment(&w[0], &w[1])?);
            }
            edges.push(Edge {
                id: e.id.clone(),
                tail: e.tail,
                head: e.head,
                weight: e.weight.clone(),
                polyline: Polyline { points, closed: false },
            });
        }
        Ok(Network {
            annulus: AnnulusSpec::new(int(1), int(2))?,
            cut: Polyline { points: vec![Point::ints(1, 0), Point::ints(2, 0)], closed: false },
            vertices,
            edges,
        })
    }

    /// The planar network: the drawing with every crossing replaced by the
    /// identity gadget.
    pub fn to_network(&self) -> Result<Network> {
        resolve_crossings(&self.to_drawing()?)
    }
}

struct StripMap {
    period: Scalar,
    height: Scalar,
}

/// Unit vector at turn fraction `t`, exact and rational: each quarter turn
/// is parametrized by the half-angle tangent.
fn unit_at(t: &Scalar) -> Point {
    let four = t * int(4);
    let q = four.floor();
    let u = &four - &q;
    let q = q.to_integer().to_i64().expect("small").rem_euclid(4);
    let mut p = Point::new(int(1), int(0)).rotate(&u);
    for _ in 0..q {
        p = Point::new(-p.y.clone(), p.x.clone());
    }
    p
}

// Chords of a full turn at radius 2 sag by about π²/n²; with this many
// pieces that stays under a quarter of one strip unit of depth.
fn pieces_per_turn(height: &Scalar) -> i64 {
    let h = height.to_f64().unwrap_or(1.0).max(1.0);
    ((2.0 * std::f64::consts::PI * h.sqrt()).ceil() as i64).max(32)
}

impl StripMap {
    fn lift(&self, p: &SPoint) -> Scalar {
        &p.x + int(p.wrap) * &self.period
    }

    fn point(&self, p: &SPoint, period: &Scalar) -> Point {
        let x = self.lift(p) / period;
        let t = &x - x.floor();
        let r = int(2) - &p.y / &self.height;
        unit_at(&t).scale(&r)
    }

    // every vertical feature and the seam sit at half-integer abscissae
    fn on_grid(&self, x: &Scalar) -> bool {
        (x * int(2)).is_integer()
    }

    /// Images of the points after `a` up to `b`.
    fn segment(&self, a: &SPoint, b: &SPoint) -> Result<Vec<Point>> {
        let (xa, xb) = (self.lift(a), self.lift(b));
        let turns = ((&xb - &xa) / &self.period).abs();
        let base = (turns * int(pieces_per_turn(&self.height))).ceil().to_integer().to_i64().expect("small").max(1);
        for n in base..base + 64 {
            let pts: Vec<SPoint> = (1..=n)
                .map(|i| {
                    let s = frac(i, n);
                    SPoint { x: &xa + (&xb - &xa) * &s, wrap: 0, y: &a.y + (&b.y - &a.y) * &s }
                })
                .collect();
            if pts[..pts.len() - 1].iter().any(|p| self.on_grid(&p.x)) {
                continue;
            }
            // interior samples go on a dyadic grid
            let mut out: Vec<Point> = pts.iter().map(|p| self.point(p, &self.period).snap(48)).collect();
            if let Some(last) = out.last_mut() {
                *last = self.point(b, &self.period);
            }
            return Ok(out);
        }
        Err(Error::ApproximationTooCoarse("segment keeps landing on the cut".into()))
    }
}
