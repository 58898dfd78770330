use std::cmp::Ordering;
use std::collections::VecDeque;

use serde::Serialize;

use super::{nonzero_weights, Network};
use crate::arith::{fmt_scalar, Field, Scalar};
use crate::error::{Error, Result};
use crate::geometry::{boundary_arc, ccw_angle_cmp, Circle, Point};

#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct Face {
    pub id: String,
    /// Boundary edges with exponent +1 when the edge runs along the
    /// counterclockwise orientation of the face boundary.
    pub edges: Vec<(String, i32)>,
    #[serde(serialize_with = "ser_scalar")]
    pub weight: Scalar,
    /// Whether the face touches a boundary circle.
    pub unbounded: bool,
}

fn ser_scalar<S: serde::Serializer>(q: &Scalar, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_scalar(q))
}

#[derive(Clone, Copy, Debug)]
enum Dart {
    Edge { e: usize, forward: bool },
    Arc { circle: Circle, from: usize, to: usize, ccw: bool },
}

struct Darts<'a> {
    n: &'a Network,
    darts: Vec<Dart>,
    /// Darts leaving each vertex in counterclockwise order.
    around: Vec<Vec<usize>>,
}

impl<'a> Darts<'a> {
    fn build(n: &'a Network) -> Self {
        let mut darts = Vec::new();
        for e in 0..n.edges.len() {
            darts.push(Dart::Edge { e, forward: true });
            darts.push(Dart::Edge { e, forward: false });
        }
        for circle in [Circle::Outer, Circle::Inner] {
            let mut on: Vec<usize> = (0..n.vertices.len())
                .filter(|&v| n.vertices[v].kind.is_boundary() && n.circle_of(v) == Some(circle))
                .collect();
            let base = Point::ints(1, 0);
            on.sort_by(|&a, &b| ccw_angle_cmp(&base, &n.vertices[a].pos, &n.vertices[b].pos));
            for i in 0..on.len() {
                let (from, to) = (on[i], on[(i + 1) % on.len()]);
                darts.push(Dart::Arc { circle, from, to, ccw: true });
                darts.push(Dart::Arc { circle, from, to, ccw: false });
            }
        }
        let mut d = Darts { n, darts, around: vec![Vec::new(); n.vertices.len()] };
        for i in 0..d.darts.len() {
            let s = d.start(i);
            d.around[s].push(i);
        }
        let base = Point::ints(1, 0);
        for v in 0..n.vertices.len() {
            let mut list = std::mem::take(&mut d.around[v]);
            list.sort_by(|&a, &b| ccw_angle_cmp(&base, &d.departure(a), &d.departure(b)).then(Ordering::Equal));
            d.around[v] = list;
        }
        d
    }

    fn start(&self, d: usize) -> usize {
        match self.darts[d] {
            Dart::Edge { e, forward } => {
                let edge = &self.n.edges[e];
                if forward {
                    edge.tail
                } else {
                    edge.head
                }
            }
            Dart::Arc { from, to, ccw, .. } => {
                if ccw {
                    from
                } else {
                    to
                }
            }
        }
    }

    fn twin(&self, d: usize) -> usize {
        d ^ 1
    }

    fn end(&self, d: usize) -> usize {
        self.start(self.twin(d))
    }

    fn departure(&self, d: usize) -> Point {
        match self.darts[d] {
            Dart::Edge { e, forward } => {
                let dirs = self.n.edges[e].polyline.directions();
                if forward {
                    dirs[0].clone()
                } else {
                    dirs.last().unwrap().neg()
                }
            }
            Dart::Arc { from, to, ccw, .. } => {
                let p = &self.n.vertices[if ccw { from } else { to }].pos;
                let t = Point::new(-p.y.clone(), p.x.clone());
                if ccw {
                    t
                } else {
                    t.neg()
                }
            }
        }
    }

    /// Next dart along the face lying to the left of `d`.
    fn next(&self, d: usize) -> usize {
        let v = self.end(d);
        let list = &self.around[v];
        let t = self.twin(d);
        let i = list.iter().position(|&x| x == t).expect("twin leaves v");
        list[(i + list.len() - 1) % list.len()]
    }

    /// Points along the dart, start included, end excluded.
    fn points(&self, d: usize) -> Result<Vec<Point>> {
        match self.darts[d] {
            Dart::Edge { e, forward } => {
                let mut p = self.n.edges[e].polyline.points.clone();
                if !forward {
                    p.reverse();
                }
                p.pop();
                Ok(p)
            }
            Dart::Arc { circle, from, to, ccw } => {
                let (a, b) = (&self.n.vertices[from].pos, &self.n.vertices[to].pos);
                let mut p = vec![a.clone()];
                p.extend(boundary_arc(circle, a, b, &[])?);
                if !ccw {
                    p.reverse();
                }
                p.pop();
                Ok(p)
            }
        }
    }
}

fn signed_area2(pts: &[Point]) -> Scalar {
    let mut acc = <Scalar as Field>::zero();
    for i in 0..pts.len() {
        acc += pts[i].cross(&pts[(i + 1) % pts.len()]);
    }
    acc
}

fn strictly_contains(poly: &[Point], p: &Point) -> bool {
    let mut inside = false;
    for i in 0..poly.len() {
        let (a, b) = (&poly[i], &poly[(i + 1) % poly.len()]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = &a.x + (&p.y - &a.y) * (&b.x - &a.x) / (&b.y - &a.y);
            if x > p.x {
                inside = !inside;
            }
        }
    }
    inside
}

struct Walk {
    darts: Vec<usize>,
    points: Vec<Point>,
    area2: Scalar,
    touches: bool,
}

fn whole_circle(r: &Scalar, circle: Circle) -> Result<Walk> {
    let p = Point::new(r.clone(), <Scalar as Field>::zero());
    let mut pts = vec![p.clone()];
    pts.extend(boundary_arc(circle, &p, &p, &[])?);
    pts.pop();
    if circle == Circle::Inner {
        pts.reverse();
    }
    let area2 = signed_area2(&pts);
    Ok(Walk { darts: Vec::new(), points: pts, area2, touches: true })
}

/// Faces of the drawing (components of the annulus minus the network) with
/// their weights `y_f = Π w_e^{±1}`.
pub fn face_weights(n: &Network) -> Result<Vec<Face>> {
    let w = nonzero_weights(n)?;
    let d = Darts::build(n);
    let mut seen = vec![false; d.darts.len()];
    let mut walks = Vec::new();
    for s in 0..d.darts.len() {
        if seen[s] {
            continue;
        }
        let mut cur = s;
        let mut darts = Vec::new();
        let mut points = Vec::new();
        while !seen[cur] {
            seen[cur] = true;
            darts.push(cur);
            points.extend(d.points(cur)?);
            cur = d.next(cur);
        }
        // the plane outside the outer circle and the hole itself
        let off_annulus = darts.iter().all(|&x| {
            matches!(
                d.darts[x],
                Dart::Arc { circle: Circle::Outer, ccw: false, .. }
                    | Dart::Arc { circle: Circle::Inner, ccw: true, .. }
            )
        });
        if off_annulus {
            continue;
        }
        let touches = darts.iter().any(|&x| matches!(d.darts[x], Dart::Arc { .. }));
        let area2 = signed_area2(&points);
        walks.push(Walk { darts, points, area2, touches });
    }
    for circle in [Circle::Outer, Circle::Inner] {
        let empty = !n.vertices.iter().enumerate().any(|(v, x)| x.kind.is_boundary() && n.circle_of(v) == Some(circle));
        if empty {
            walks.push(whole_circle(n.annulus.radius(circle), circle)?);
        }
    }
    let zero = <Scalar as Field>::zero();
    let outers: Vec<usize> = (0..walks.len()).filter(|&i| walks[i].area2 > zero).collect();
    let mut members: Vec<Vec<usize>> = outers.iter().map(|&i| vec![i]).collect();
    for h in 0..walks.len() {
        if walks[h].area2 > zero {
            continue;
        }
        let probe = &walks[h].points[0];
        let host = outers
            .iter()
            .enumerate()
            .filter(|(_, &o)| strictly_contains(&walks[o].points, probe))
            .min_by(|(_, &a), (_, &b)| walks[a].area2.cmp(&walks[b].area2))
            .map(|(k, _)| k)
            .ok_or_else(|| Error::Precondition("face boundary outside every face".into()))?;
        members[host].push(h);
    }
    let mut faces = Vec::new();
    for (k, group) in members.iter().enumerate() {
        let mut edges = Vec::new();
        let mut weight = <Scalar as Field>::one();
        let mut touches = false;
        for &wi in group {
            touches |= walks[wi].touches;
            for &x in &walks[wi].darts {
                if let Dart::Edge { e, forward } = d.darts[x] {
                    let g = if forward { 1 } else { -1 };
                    edges.push((n.edges[e].id.clone(), g));
                    weight = if forward { weight * w[e].clone() } else { weight / w[e].clone() };
                }
            }
        }
        faces.push(Face { id: format!("f{}", k + 1), edges, weight, unbounded: touches });
    }
    Ok(faces)
}

/// Product of `w_e` over forward steps and `w_e^{-1}` over backward steps.
pub fn trail_weight(n: &Network, trail: &[String]) -> Result<Scalar> {
    let w = nonzero_weights(n)?;
    let idx: Vec<usize> = trail
        .iter()
        .map(|id| n.vertex_index(id).ok_or_else(|| Error::InvalidPath(format!("unknown vertex {id}"))))
        .collect::<Result<_>>()?;
    if idx.len() < 2 {
        return Err(Error::InvalidPath("trail needs at least two vertices".into()));
    }
    for end in [idx[0], *idx.last().unwrap()] {
        if !n.vertices[end].kind.is_boundary() {
            return Err(Error::InvalidPath(format!("trail end {} is not a boundary vertex", n.vertices[end].id)));
        }
    }
    let mut acc = <Scalar as Field>::one();
    for s in idx.windows(2) {
        let (u, v) = (s[0], s[1]);
        if let Some(e) = n.edges.iter().position(|e| e.tail == u && e.head == v) {
            acc *= w[e].clone();
        } else if let Some(e) = n.edges.iter().position(|e| e.tail == v && e.head == u) {
            acc /= w[e].clone();
        } else {
            return Err(Error::InvalidPath(format!(
                "broken trail: no edge between {} and {}",
                n.vertices[u].id, n.vertices[v].id
            )));
        }
    }
    Ok(acc)
}

/// Some trail of vertex ids from an outer boundary vertex to an inner one.
pub fn find_connecting_trail(n: &Network) -> Option<Vec<String>> {
    let nv = n.vertices.len();
    let mut adj = vec![Vec::new(); nv];
    for e in &n.edges {
        adj[e.tail].push(e.head);
        adj[e.head].push(e.tail);
    }
    let mut prev = vec![usize::MAX; nv];
    let mut queue = VecDeque::new();
    for (v, p) in prev.iter_mut().enumerate() {
        if n.vertices[v].kind.is_boundary() && n.circle_of(v) == Some(Circle::Outer) {
            *p = v;
            queue.push_back(v);
        }
    }
    while let Some(u) = queue.pop_front() {
        if n.vertices[u].kind.is_boundary() && n.circle_of(u) == Some(Circle::Inner) {
            let mut path = vec![u];
            let mut x = u;
            while prev[x] != x {
                x = prev[x];
                path.push(x);
            }
            path.reverse();
            return Some(path.into_iter().map(|v| n.vertices[v].id.clone()).collect());
        }
        for &v in &adj[u] {
            if prev[v] == usize::MAX {
                prev[v] = u;
                queue.push_back(v);
            }
        }
    }
    None
}
