//! Crossing removal: every transversal crossing of two edges is replaced by
//! a small planar gadget whose boundary measurement matrix is the identity.

use num_traits::ToPrimitive;

use super::validate::segment_contacts;
use super::{Edge, Network, Vertex, VertexKind, Weight};
use crate::arith::{frac, Field, Scalar};
use crate::error::{Error, Result};
use crate::geometry::{segment_crossing, Crossing, Point, Polyline};

/// The four-terminal gadget drawn in the unit disk: sources `s1 = (-1,0)`,
/// `s2 = (0,-1)`, sinks `t3 = (1,0)`, `t4 = (0,1)`.
pub struct Gadget {
    /// (name, kind, local position)
    pub vertices: Vec<(&'static str, VertexKind, Point)>,
    /// (edge number, tail, head)
    pub edges: Vec<(usize, &'static str, &'static str)>,
}

pub fn identity_gadget() -> Gadget {
    let q = |x: i64, y: i64| Point::new(frac(x, 10), frac(y, 10));
    Gadget {
        vertices: vec![
            ("s1", VertexKind::Source, q(-10, 0)),
            ("s2", VertexKind::Source, q(0, -10)),
            ("t3", VertexKind::Sink, q(10, 0)),
            ("t4", VertexKind::Sink, q(0, 10)),
            ("a", VertexKind::White, q(-5, 0)),
            ("f", VertexKind::Black, q(0, -5)),
            ("e", VertexKind::White, q(1, -1)),
            ("g", VertexKind::Black, q(-1, 3)),
            ("c", VertexKind::White, q(0, 6)),
            ("d", VertexKind::Black, q(6, 0)),
        ],
        edges: vec![
            (1, "s1", "a"),
            (2, "a", "g"),
            (3, "g", "c"),
            (4, "c", "t4"),
            (5, "s2", "f"),
            (6, "f", "e"),
            (7, "e", "d"),
            (8, "d", "t3"),
            (9, "a", "f"),
            (10, "e", "g"),
            (11, "c", "d"),
        ],
    }
}

// Gauge-equivalent to w5 = w10 = -1 with the sign moved off the terminal
// edges, so the crossing edges keep their own weights.
fn internal_weight(k: usize) -> Scalar {
    match k {
        6 | 9 | 10 => frac(-1, 1),
        _ => frac(1, 1),
    }
}

type Site = (usize, usize, usize, usize);

fn all_crossings(n: &Network) -> Result<Vec<Site>> {
    let mut out = Vec::new();
    for (x, i, y, j, kind) in segment_contacts(n) {
        if kind == Crossing::Degenerate {
            return Err(Error::NonGenericIntersection(format!(
                "edges {} and {} touch without crossing",
                n.edges[x].id, n.edges[y].id
            )));
        }
        if x == y {
            return Err(Error::Unsupported(format!("edge {} crosses itself", n.edges[x].id)));
        }
        out.push((x, i, y, j));
    }
    Ok(out)
}

fn seg(n: &Network, e: usize, k: usize) -> (&Point, &Point) {
    let p = &n.edges[e].polyline.points;
    (&p[k], &p[k + 1])
}

// Where segment `k` of edge `e` went after edge `x` was split at segment
// `i`, its tail part keeping index `x` and its head part becoming `fresh`.
fn moved(e: usize, k: usize, x: usize, i: usize, fresh: usize) -> Vec<(usize, usize)> {
    if e != x || k < i {
        vec![(e, k)]
    } else if k > i {
        vec![(fresh, k - i + 1)]
    } else {
        vec![(x, i), (fresh, 1)]
    }
}

fn approx(p: &Point) -> (f64, f64) {
    (p.x.to_f64().unwrap_or(f64::NAN), p.y.to_f64().unwrap_or(f64::NAN))
}

fn dist2(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let d = (b.0 - a.0, b.1 - a.1);
    let l = d.0 * d.0 + d.1 * d.1;
    let t = if l == 0.0 { 0.0 } else { (((p.0 - a.0) * d.0 + (p.1 - a.1) * d.1) / l).clamp(0.0, 1.0) };
    let q = (a.0 + t * d.0 - p.0, a.1 + t * d.1 - p.1);
    q.0 * q.0 + q.1 * q.1
}

/// Approximate distance from `p` to everything in the drawing other than
/// the two crossing segments; only used to size the gadget, which is
/// checked exactly afterwards.
fn clearance(n: &Network, cache: &[Vec<(f64, f64)>], skip: [(usize, usize); 2], p: &Point) -> f64 {
    let ann = &n.annulus;
    let q = approx(p);
    let r = q.0.hypot(q.1);
    let ri = ann.inner_radius.to_f64().unwrap_or(0.0);
    let ro = ann.outer_radius.to_f64().unwrap_or(0.0);
    let mut best = (r - ri).min(ro - r).powi(2);
    for (e, pts) in cache.iter().enumerate() {
        for (k, w) in pts.windows(2).enumerate() {
            if !skip.contains(&(e, k)) {
                best = best.min(dist2(q, w[0], w[1]));
            }
        }
    }
    for (u, v) in n.cut.segments() {
        best = best.min(dist2(q, approx(u), approx(v)));
    }
    best
}

fn approx_edge(e: &Edge) -> Vec<(f64, f64)> {
    e.polyline.points.iter().map(approx).collect()
}

fn power_of_half(k: u32) -> Scalar {
    Scalar::new(1.into(), num_bigint::BigInt::from(1u8) << k)
}

// A dyadic grid fine enough that rounding the gadget onto it moves no
// point by more than a tiny fraction of the gadget's inradius.
fn grid_bits(dx: &Point, dy: &Point, sigma: &Scalar) -> u32 {
    let ((a, b), (c, d)) = (dx.approx(), dy.approx());
    let size = (a * d - b * c).abs() / a.hypot(b).max(c.hypot(d)) * sigma.to_f64().unwrap_or(0.0);
    let bits = 12.0 - size.log2();
    if bits.is_finite() {
        (bits.ceil() as u32).clamp(16, 4096)
    } else {
        4096
    }
}

/// Replaces crossings one at a time until the drawing is planar. Each
/// replacement preserves all boundary measurements. The gadget is scaled
/// to fit in a disk around the crossing that meets nothing else.
pub fn resolve_crossings(n: &Network) -> Result<Network> {
    let mut cur = n.clone();
    let mut pending = all_crossings(&cur)?;
    let mut cache: Vec<Vec<(f64, f64)>> = cur.edges.iter().map(approx_edge).collect();
    let mut serial = 0usize;
    while let Some((x, i, y, j)) = pending.pop() {
        serial += 1;
        let (a, b) = seg(&cur, x, i);
        let (c, d) = seg(&cur, y, j);
        // solve a + s (b - a) = c + t (d - c)
        let (u, v) = (b.sub(a), d.sub(c));
        let s = c.sub(a).cross(&v) / u.cross(&v);
        let t = a.sub(c).cross(&u) / v.cross(&u);
        let p = a.lerp(b, &s);
        let reach = (u.norm2() + v.norm2()).to_f64().unwrap_or(f64::INFINITY);
        let room = clearance(&cur, &cache, [(x, i), (y, j)], &p);
        let one = <Scalar as Field>::one();
        let fits = |r: &Scalar, sigma: &Scalar| sigma < r && (r + sigma) < one;
        let k = (1..200)
            .find(|&k| {
                let sigma = power_of_half(k);
                let sf = 0.5f64.powi(k as i32);
                fits(&s, &sigma) && fits(&t, &sigma) && 64.0 * sf * sf * reach < room
            })
            .ok_or_else(|| Error::ApproximationTooCoarse("no room for a crossing gadget".into()))?;
        let (fx, fy) = (cur.edges.len(), cur.edges.len() + 1);
        replace(&mut cur, x, i, y, j, &p, &power_of_half(k), serial);
        for e in [x, y] {
            cache[e] = approx_edge(&cur.edges[e]);
        }
        cache.extend(cur.edges[fx..].iter().map(approx_edge));
        let mut next = Vec::with_capacity(pending.len());
        for (e, k, f, l) in pending {
            let first: Vec<_> = moved(e, k, x, i, fx).into_iter().flat_map(|(e, k)| moved(e, k, y, j, fy)).collect();
            let second: Vec<_> = moved(f, l, x, i, fx).into_iter().flat_map(|(f, l)| moved(f, l, y, j, fy)).collect();
            if first == [(e, k)] && second == [(f, l)] {
                next.push((e, k, f, l));
                continue;
            }
            let mut hit = None;
            for &(e, k) in &first {
                for &(f, l) in &second {
                    let (a, b) = seg(&cur, e, k);
                    let (c, d) = seg(&cur, f, l);
                    if let Crossing::Proper(_) = segment_crossing(a, b, c, d) {
                        hit = Some((e, k, f, l));
                    }
                }
            }
            next.push(hit.ok_or_else(|| Error::ApproximationTooCoarse("a crossing was lost".into()))?);
        }
        pending = next;
    }
    let problems = super::validate(&cur);
    if !problems.is_empty() {
        return Err(Error::InvalidNetwork(problems));
    }
    Ok(cur)
}

#[allow(clippy::too_many_arguments)]
fn replace(out: &mut Network, x: usize, i: usize, y: usize, j: usize, p: &Point, sigma: &Scalar, serial: usize) {
    let g = identity_gadget();
    let ex = &out.edges[x].clone();
    let ey = &out.edges[y].clone();
    let dx = ex.polyline.points[i + 1].sub(&ex.polyline.points[i]);
    let dy = ey.polyline.points[j + 1].sub(&ey.polyline.points[j]);
    let bits = grid_bits(&dx, &dy, sigma);
    let place = |q: &Point| p.add(&dx.scale(&(&q.x * sigma))).add(&dy.scale(&(&q.y * sigma))).snap(bits);
    let local = |name: &str| g.vertices.iter().find(|v| v.0 == name).map(|v| place(&v.2)).unwrap();

    let base = out.vertices.len();
    let names = ["a", "f", "e", "g", "c", "d"];
    for name in names {
        let kind = g.vertices.iter().find(|v| v.0 == name).unwrap().1;
        out.vertices.push(Vertex { id: format!("x{serial}.{name}"), kind, pos: local(name) });
    }
    let vid = |name: &str| base + names.iter().position(|&m| m == name).unwrap();

    let split = |e: &Edge, seg: usize, port_in: &str, port_out: &str, v_in: &str, v_out: &str| {
        let pts = &e.polyline.points;
        let mut first = pts[..=seg].to_vec();
        first.push(local(port_in));
        first.push(local(v_in));
        let mut second = vec![local(v_out), local(port_out)];
        second.extend(pts[seg + 1..].iter().cloned());
        (first, second)
    };
    let (x1, x2) = split(ex, i, "s1", "t3", "a", "d");
    let (y1, y2) = split(ey, j, "s2", "t4", "f", "c");
    let one = Weight::Value(<Scalar as Field>::one());
    out.edges[x] = Edge { polyline: Polyline { points: x1, closed: false }, head: vid("a"), ..ex.clone() };
    out.edges[y] = Edge { polyline: Polyline { points: y1, closed: false }, head: vid("f"), ..ey.clone() };
    out.edges.push(Edge {
        id: format!("{}~{serial}", ex.id),
        tail: vid("d"),
        head: ex.head,
        weight: one.clone(),
        polyline: Polyline { points: x2, closed: false },
    });
    out.edges.push(Edge {
        id: format!("{}~{serial}", ey.id),
        tail: vid("c"),
        head: ey.head,
        weight: one,
        polyline: Polyline { points: y2, closed: false },
    });
    for &(k, t, h) in &g.edges {
        if matches!(k, 1 | 4 | 5 | 8) {
            continue;
        }
        out.edges.push(Edge {
            id: format!("x{serial}.w{k}"),
            tail: vid(t),
            head: vid(h),
            weight: Weight::Value(internal_weight(k)),
            polyline: Polyline { points: vec![local(t), local(h)], closed: false },
        });
    }
}
