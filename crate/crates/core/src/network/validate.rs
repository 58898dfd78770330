use super::{Network, VertexKind};
use crate::arith::{field::sign_of, Field};
use crate::geometry::{orient_f64, segment_crossing, Crossing, Point};

/// Every violated invariant, with the offending ids. Empty means valid.
pub fn validate(n: &Network) -> Vec<String> {
    let mut out = validate_drawing(n);
    out.extend(planarity(n));
    out
}

/// All checks except planarity; drawings with crossing edges pass.
pub fn validate_drawing(n: &Network) -> Vec<String> {
    let mut out = Vec::new();
    let ann = &n.annulus;
    for (i, v) in n.vertices.iter().enumerate() {
        let on_circle = ann.circle_of(&v.pos).is_some();
        if v.kind.is_boundary() && !on_circle {
            out.push(format!("vertex {}: boundary vertex not on a boundary circle", v.id));
        }
        if !v.kind.is_boundary() && !ann.strictly_inside(&v.pos) {
            out.push(format!("vertex {}: internal vertex not strictly inside the annulus", v.id));
        }
        let (ins, outs) = (n.in_edges(i).len(), n.out_edges(i).len());
        match v.kind {
            VertexKind::Source if (ins, outs) != (0, 1) => {
                out.push(format!("vertex {}: source needs one outgoing and no incoming edge", v.id))
            }
            VertexKind::Sink if (ins, outs) != (1, 0) => {
                out.push(format!("vertex {}: sink needs one incoming and no outgoing edge", v.id))
            }
            VertexKind::White | VertexKind::Black if ins + outs != 3 => {
                out.push(format!("vertex {}: internal degree ≠ 3", v.id))
            }
            VertexKind::White if ins != 1 => {
                out.push(format!("vertex {}: white vertex needs exactly one incoming edge", v.id))
            }
            VertexKind::Black if outs != 1 => {
                out.push(format!("vertex {}: black vertex needs exactly one outgoing edge", v.id))
            }
            _ => {}
        }
        if v.pos == *n.cut.first() || v.pos == *n.cut.last() {
            out.push(format!("vertex {}: coincides with a base point of the cut", v.id));
        }
    }
    for e in &n.edges {
        let pts = &e.polyline.points;
        if e.tail == e.head {
            out.push(format!("edge {}: loop", e.id));
        }
        if pts[0] != n.vertices[e.tail].pos || *pts.last().unwrap() != n.vertices[e.head].pos {
            out.push(format!("edge {}: polyline does not join its endpoints", e.id));
        }
        if pts[1..pts.len() - 1].iter().any(|p| !ann.strictly_inside(p)) {
            out.push(format!("edge {}: polyline leaves the open annulus", e.id));
        } else if e.polyline.segments().any(|(a, b)| !ann.contains_segment(a, b)) {
            out.push(format!("edge {}: segment leaves the annulus", e.id));
        }
        if pts.windows(3).any(|w| doubles_back(&w[0], &w[1], &w[2])) {
            out.push(format!("edge {}: degenerate turn", e.id));
        }
        // edges must meet the boundary circles transversally
        let first = &pts[1].sub(&pts[0]);
        let last = &pts[pts.len() - 1].sub(&pts[pts.len() - 2]);
        if ann.circle_of(&pts[0]).is_some() && Field::is_zero(&first.dot(&pts[0])) {
            out.push(format!("edge {}: tangent to the boundary at its tail", e.id));
        }
        let end = pts.last().unwrap();
        if ann.circle_of(end).is_some() && Field::is_zero(&last.dot(end)) {
            out.push(format!("edge {}: tangent to the boundary at its head", e.id));
        }
        'cut: for (a, b) in e.polyline.segments() {
            for (c, d) in n.cut.segments() {
                if touches(a, b, c, d) {
                    out.push(format!("edge {}: non-generic intersection with the cut", e.id));
                    break 'cut;
                }
            }
        }
    }
    let cut = &n.cut;
    if ann.circle_of(cut.first()) != Some(crate::geometry::Circle::Inner) {
        out.push("cut: must start on the inner circle".into());
    }
    if ann.circle_of(cut.last()) != Some(crate::geometry::Circle::Outer) {
        out.push("cut: must end on the outer circle".into());
    }
    if cut.points[1..cut.points.len() - 1].iter().any(|p| !ann.strictly_inside(p))
        || cut.segments().any(|(a, b)| !ann.contains_segment(a, b))
    {
        out.push("cut: leaves the annulus".into());
    }
    for (i, v) in n.vertices.iter().enumerate() {
        if v.kind.is_boundary() {
            continue;
        }
        for &ei in &n.in_edges(i) {
            for &eo in &n.out_edges(i) {
                let pi = &n.edges[ei].polyline.points;
                let po = &n.edges[eo].polyline.points;
                if doubles_back(&pi[pi.len() - 2], &po[0], &po[1]) {
                    out.push(format!(
                        "vertex {}: degenerate turn between {} and {}",
                        v.id, n.edges[ei].id, n.edges[eo].id
                    ));
                }
            }
        }
    }
    out
}

// Whether the path a, b, c turns back on itself at b (or stalls).
fn doubles_back(a: &Point, b: &Point, c: &Point) -> bool {
    let (pa, pb, pc) = (a.approx(), b.approx(), c.approx());
    let (u, v) = ((pb.0 - pa.0, pb.1 - pa.1), (pc.0 - pb.0, pc.1 - pb.1));
    let size = (u.0.abs() + u.1.abs()) * (v.0.abs() + v.1.abs());
    let (dot, cross) = (u.0 * v.0 + u.1 * v.1, u.0 * v.1 - u.1 * v.0);
    if dot > 1e-12 * size || cross.abs() > 1e-12 * size {
        return false;
    }
    let (u, v) = (b.sub(a), c.sub(b));
    Field::is_zero(&u.cross(&v)) && sign_of(&u.dot(&v)) <= 0
}

struct Seg<'a> {
    edge: usize,
    idx: usize,
    a: &'a Point,
    b: &'a Point,
    pa: (f64, f64),
    pb: (f64, f64),
    lo: (f64, f64),
    hi: (f64, f64),
}

fn approx(p: &Point) -> (f64, f64) {
    p.approx()
}

fn segments(n: &Network) -> Vec<Seg<'_>> {
    let mut out = Vec::new();
    for (ei, e) in n.edges.iter().enumerate() {
        for (idx, (a, b)) in e.polyline.segments().enumerate() {
            let (pa, pb) = (approx(a), approx(b));
            let pad = 1e-9 * (1.0 + pa.0.abs().max(pa.1.abs()).max(pb.0.abs()).max(pb.1.abs()));
            out.push(Seg {
                edge: ei,
                idx,
                a,
                b,
                pa,
                pb,
                lo: (pa.0.min(pb.0) - pad, pa.1.min(pb.1) - pad),
                hi: (pa.0.max(pb.0) + pad, pa.1.max(pb.1) + pad),
            });
        }
    }
    out
}

/// Pairs of edges with segments that cross or touch illegitimately.
pub(crate) fn bad_contacts(n: &Network) -> Vec<(usize, usize, Crossing)> {
    let mut out = contacts(n);
    out.sort_by_key(|&(a, b, _)| (a, b));
    out.dedup_by_key(|&mut (a, b, _)| (a, b));
    out
}

// Orientation in floating point when its sign is certain.
fn touches(a: &Point, b: &Point, c: &Point, d: &Point) -> bool {
    let (pa, pb, pc, pd) = (a.approx(), b.approx(), c.approx(), d.approx());
    // with every orientation certain, no endpoint lies on the other segment
    let certain =
        [(pa, pb, pc), (pa, pb, pd), (pc, pd, pa), (pc, pd, pb)].iter().all(|&(p, q, r)| orient_f64(p, q, r).is_some());
    !certain && segment_crossing(a, b, c, d) == Crossing::Degenerate
}

// `segment_crossing` with a floating-point shortcut for clear cases.
fn crossing(s: &Seg<'_>, t: &Seg<'_>) -> Crossing {
    let quick = (|| {
        let o1 = orient_f64(s.pa, s.pb, t.pa)?;
        let o2 = orient_f64(s.pa, s.pb, t.pb)?;
        let o3 = orient_f64(t.pa, t.pb, s.pa)?;
        let o4 = orient_f64(t.pa, t.pb, s.pb)?;
        if o1 == o2 || o3 == o4 {
            return Some(Crossing::None);
        }
        // the sign of the cross product of the directions is o2 - o1 over 2
        Some(Crossing::Proper(o2))
    })();
    quick.unwrap_or_else(|| segment_crossing(s.a, s.b, t.a, t.b))
}

/// Every offending segment pair as `(edge, segment, edge, segment, kind)`.
pub(crate) fn segment_contacts(n: &Network) -> Vec<(usize, usize, usize, usize, Crossing)> {
    let mut segs = segments(n);
    segs.sort_by(|s, t| s.lo.0.total_cmp(&t.lo.0));
    let mut out = Vec::new();
    for i in 0..segs.len() {
        for j in i + 1..segs.len() {
            let (s, t) = (&segs[i], &segs[j]);
            if t.lo.0 > s.hi.0 {
                break;
            }
            if t.lo.1 > s.hi.1 || s.lo.1 > t.hi.1 {
                continue;
            }
            if shares_end(s, t) {
                if !legit_touch(n, s, t) {
                    out.push((s.edge, s.idx, t.edge, t.idx, Crossing::Degenerate));
                }
                continue;
            }
            let c = crossing(s, t);
            let ok = match c {
                Crossing::None => true,
                Crossing::Proper(_) => false,
                Crossing::Degenerate => legit_touch(n, s, t),
            };
            if !ok {
                out.push((s.edge, s.idx, t.edge, t.idx, c));
            }
        }
    }
    out
}

/// Every offending segment pair, one entry per pair.
pub(crate) fn contacts(n: &Network) -> Vec<(usize, usize, Crossing)> {
    segment_contacts(n).into_iter().map(|(a, _, b, _, c)| (a.min(b), a.max(b), c)).collect()
}

fn shares_end(s: &Seg<'_>, t: &Seg<'_>) -> bool {
    let near = |p: (f64, f64), q: (f64, f64)| (p.0 - q.0).abs() + (p.1 - q.1).abs() < 1e-12;
    (near(s.pa, t.pa) && s.a == t.a)
        || (near(s.pa, t.pb) && s.a == t.b)
        || (near(s.pb, t.pa) && s.b == t.a)
        || (near(s.pb, t.pb) && s.b == t.b)
}

// Segments may only share an endpoint that is a common joint: consecutive
// segments of one edge, or end segments of two edges at a shared vertex.
fn legit_touch(n: &Network, s: &Seg<'_>, t: &Seg<'_>) -> bool {
    let shared = if s.a == t.a || s.a == t.b {
        s.a
    } else if s.b == t.a || s.b == t.b {
        s.b
    } else {
        return false;
    };
    if s.edge == t.edge {
        if s.idx.abs_diff(t.idx) != 1 {
            return false;
        }
    } else if !is_vertex_end(n, s, shared) || !is_vertex_end(n, t, shared) {
        return false;
    }
    // touching only at the shared point
    let so = if s.a == shared { s.b } else { s.a };
    let to = if t.a == shared { t.b } else { t.a };
    !doubles_back(so, shared, to)
}

fn is_vertex_end(n: &Network, s: &Seg<'_>, p: &Point) -> bool {
    let e = &n.edges[s.edge];
    let last = e.polyline.points.len() - 2;
    (s.idx == 0 && s.a == p && n.vertices[e.tail].pos == *p)
        || (s.idx == last && s.b == p && n.vertices[e.head].pos == *p)
}

fn planarity(n: &Network) -> Vec<String> {
    bad_contacts(n)
        .into_iter()
        .map(|(a, b, c)| {
            if a == b {
                format!("edge {}: self-intersection", n.edges[a].id)
            } else if c == Crossing::Degenerate {
                format!("edges {},{}: non-transversal contact", n.edges[a].id, n.edges[b].id)
            } else {
                format!("edges {},{}: planarity violation", n.edges[a].id, n.edges[b].id)
            }
        })
        .collect()
}
