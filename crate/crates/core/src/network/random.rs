//! Random valid networks, grown from a seed edge by local moves that keep
//! the drawing planar.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Edge, Network, Vertex, VertexKind, Weight};
use crate::arith::{frac, Scalar};
use crate::geometry::{AnnulusSpec, Point, Polyline};

#[derive(Clone, Copy, Debug)]
pub struct RandomSpec {
    pub internal: usize,
    pub acyclic: bool,
    pub seed: u64,
}

fn unit(rng: &mut ChaCha8Rng) -> Point {
    // S(u) for a random rational u, away from the cut direction (1, 0)
    loop {
        let u = frac(rng.gen_range(-40..=40), rng.gen_range(7..=13));
        if u == frac(0, 1) {
            continue;
        }
        let one = frac(1, 1);
        let d = &one + &u * &u;
        return Point::new((&one - &u * &u) / &d, frac(2, 1) * &u / &d);
    }
}

fn rot90(p: &Point) -> Point {
    Point::new(-p.y.clone(), p.x.clone())
}

fn random_weight(rng: &mut ChaCha8Rng) -> Scalar {
    loop {
        let n: i64 = rng.gen_range(-6..=6);
        if n != 0 {
            return frac(n, rng.gen_range(1..=4));
        }
    }
}

fn seed_network(rng: &mut ChaCha8Rng) -> Network {
    let annulus = AnnulusSpec::new(frac(1, 1), frac(4, 1)).expect("radii");
    let d = unit(rng);
    let r = |c: (i64, i64), p: &Point| p.scale(&frac(c.0, c.1));
    let mut pts = match rng.gen_range(0..3) {
        0 => {
            // once around the hole, outer to inner
            let d2 = d.rotate(&frac(-1, 3));
            let q = [d.clone(), rot90(&d), rot90(&rot90(&d)), rot90(&rot90(&rot90(&d)))];
            let mut v = vec![r((4, 1), &d)];
            v.extend(q.iter().map(|x| r((5, 2), x)));
            v.push(r((3, 2), &d2));
            v.push(d2);
            v
        }
        1 => vec![r((4, 1), &d), d.clone()],
        _ => {
            let e = rot90(&d);
            vec![r((4, 1), &d), r((5, 2), &d), r((5, 2), &e), r((4, 1), &e)]
        }
    };
    if rng.gen_bool(0.5) {
        pts.reverse();
    }
    let vertices = vec![
        Vertex { id: "b1".into(), kind: VertexKind::Source, pos: pts[0].clone() },
        Vertex { id: "b2".into(), kind: VertexKind::Sink, pos: pts.last().unwrap().clone() },
    ];
    let edges = vec![Edge {
        id: "e1".into(),
        tail: 0,
        head: 1,
        weight: Weight::Value(frac(1, 1)),
        polyline: Polyline { points: pts, closed: false },
    }];
    Network {
        annulus,
        cut: Polyline { points: vec![Point::ints(1, 0), Point::ints(4, 0)], closed: false },
        vertices,
        edges,
    }
}

/// Splits edge `e` at a random interior point, inserting a vertex of the
/// given kind. Returns the new vertex index.
fn split(n: &mut Network, rng: &mut ChaCha8Rng, e: usize, kind: VertexKind) -> usize {
    let pts = n.edges[e].polyline.points.clone();
    let s = rng.gen_range(0..pts.len() - 1);
    let f = frac(rng.gen_range(1..=10), 11);
    let p = pts[s].lerp(&pts[s + 1], &f);
    let v = n.vertices.len();
    n.vertices.push(Vertex { id: format!("v{v}"), kind, pos: p.clone() });
    let mut first = pts[..=s].to_vec();
    first.push(p.clone());
    let mut second = vec![p];
    second.extend(pts[s + 1..].iter().cloned());
    let old_head = n.edges[e].head;
    n.edges[e].polyline = Polyline { points: first, closed: false };
    n.edges[e].head = v;
    n.edges.push(Edge {
        id: format!("e{}", n.edges.len() + 1),
        tail: v,
        head: old_head,
        weight: Weight::Value(frac(1, 1)),
        polyline: Polyline { points: second, closed: false },
    });
    v
}

fn reaches(n: &Network, from: usize, to: usize) -> bool {
    let mut seen = vec![false; n.vertices.len()];
    let mut stack = vec![from];
    while let Some(u) = stack.pop() {
        if u == to {
            return true;
        }
        if std::mem::replace(&mut seen[u], true) {
            continue;
        }
        stack.extend(n.out_edges(u).into_iter().map(|e| n.edges[e].head));
    }
    false
}

fn random_point(rng: &mut ChaCha8Rng) -> Point {
    let r = frac(rng.gen_range(12..=36), 10);
    unit(rng).scale(&r)
}

fn try_move(n: &Network, rng: &mut ChaCha8Rng, acyclic: bool) -> Option<Network> {
    let mut m = n.clone();
    let ne = m.edges.len();
    let boundary_move = m.vertices.len() < 3 || rng.gen_bool(0.55);
    {
        if boundary_move {
            let source = rng.gen_bool(0.5);
            let e = rng.gen_range(0..ne);
            let kind = if source { VertexKind::Black } else { VertexKind::White };
            let v = split(&mut m, rng, e, kind);
            let r = if rng.gen_bool(0.5) { frac(4, 1) } else { frac(1, 1) };
            let b = m.vertices.len();
            let pos = unit(rng).scale(&r);
            let kind = if source { VertexKind::Source } else { VertexKind::Sink };
            m.vertices.push(Vertex { id: format!("b{b}"), kind, pos: pos.clone() });
            let mut pts = vec![pos, m.vertices[v].pos.clone()];
            if rng.gen_bool(0.3) {
                pts.insert(1, random_point(rng));
            }
            let (t, h) = if source {
                (b, v)
            } else {
                pts.reverse();
                (v, b)
            };
            m.edges.push(Edge {
                id: format!("e{}", m.edges.len() + 1),
                tail: t,
                head: h,
                weight: Weight::Value(frac(1, 1)),
                polyline: Polyline { points: pts, closed: false },
            });
        } else {
            let e1 = rng.gen_range(0..ne);
            let e2 = rng.gen_range(0..ne);
            if e1 == e2 {
                return None;
            }
            let p = split(&mut m, rng, e1, VertexKind::White);
            let q = split(&mut m, rng, e2, VertexKind::Black);
            if acyclic && reaches(&m, q, p) {
                return None;
            }
            let mut pts = vec![m.vertices[p].pos.clone(), m.vertices[q].pos.clone()];
            for _ in 0..rng.gen_range(0..3) {
                pts.insert(pts.len() - 1, random_point(rng));
            }
            m.edges.push(Edge {
                id: format!("e{}", m.edges.len() + 1),
                tail: p,
                head: q,
                weight: Weight::Value(frac(1, 1)),
                polyline: Polyline { points: pts, closed: false },
            });
        }
    }
    if m.edges.iter().any(|e| Polyline::open(e.polyline.points.clone()).is_err()) {
        return None;
    }
    super::validate(&m).is_empty().then_some(m)
}

fn internal_count(n: &Network) -> usize {
    n.vertices.iter().filter(|v| !v.kind.is_boundary()).count()
}

/// A random valid network with at most `spec.internal` internal vertices
/// and random nonzero weights.
pub fn random_network(spec: RandomSpec) -> Network {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut n = seed_network(&mut rng);
    let mut failures = 0;
    while internal_count(&n) < spec.internal && failures < 200 {
        match try_move(&n, &mut rng, spec.acyclic) {
            Some(m) if internal_count(&m) <= spec.internal => n = m,
            _ => failures += 1,
        }
    }
    for (k, e) in n.edges.iter_mut().enumerate() {
        e.id = format!("e{}", k + 1);
        e.weight = Weight::Value(random_weight(&mut rng));
    }
    n
}
