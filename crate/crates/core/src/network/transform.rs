use std::collections::HashMap;

use super::{Network, Weight};
use crate::arith::{frac, Field, Scalar};
use crate::error::{Error, Result};
use crate::geometry::{
    ccw_angle_cmp, grid_sweep, intersection_index, segment_crossing, strictly_ccw_between, unit_grid, Circle, Crossing,
    Point, Polyline,
};

/// Nonzero values at internal vertices, keyed by vertex id.
pub type GaugeAssignment = HashMap<String, Scalar>;

/// `w_e -> w_e φ(head) / φ(tail)`, with φ = 1 on boundary vertices.
pub fn gauge_transform(n: &Network, phi: &GaugeAssignment) -> Result<Network> {
    let mut g = vec![<Scalar as Field>::one(); n.vertices.len()];
    for (id, val) in phi {
        let v =
            n.vertex_index(id).ok_or_else(|| Error::Precondition(format!("gauge refers to unknown vertex {id}")))?;
        if n.vertices[v].kind.is_boundary() {
            return Err(Error::Precondition(format!("gauge value given for boundary vertex {id}")));
        }
        if Field::is_zero(val) {
            return Err(Error::Precondition(format!("zero gauge value at {id}")));
        }
        g[v] = val.clone();
    }
    let w = n.numeric_weights()?;
    let mut out = n.clone();
    for (e, edge) in out.edges.iter_mut().enumerate() {
        edge.weight = Weight::Value(&w[e] * &g[edge.head] / &g[edge.tail]);
    }
    Ok(out)
}

/// Mirror image in the horizontal axis; boundary orientations reverse.
pub fn reverse_orientation(n: &Network) -> Network {
    let m = |p: &Point| Point::new(p.x.clone(), -p.y.clone());
    let mut out = n.clone();
    out.cut = n.cut.map(m);
    for v in &mut out.vertices {
        v.pos = m(&v.pos);
    }
    for e in &mut out.edges {
        e.polyline = e.polyline.map(m);
    }
    out
}

fn crossing_profile(n: &Network, cut: &Polyline) -> Option<Vec<(i64, usize)>> {
    let mut out = Vec::new();
    for e in &n.edges {
        let mut count = 0;
        for (a, b) in e.polyline.segments() {
            for (c, d) in cut.segments() {
                match segment_crossing(a, b, c, d) {
                    Crossing::None => {}
                    Crossing::Proper(_) => count += 1,
                    Crossing::Degenerate => return None,
                }
            }
        }
        out.push((intersection_index(&e.polyline, cut).ok()?, count));
    }
    Some(out)
}

/// The circle swap `z -> r_in r_out / z`, with the cut reversed so that it
/// again runs from the inner circle outwards. Segments are subdivided until
/// the image is a valid drawing with the same crossings.
pub fn reverse_cut(n: &Network) -> Result<Network> {
    let c = &n.annulus.inner_radius * &n.annulus.outer_radius;
    let inv = |p: &Point| {
        let r2 = p.norm2();
        Point::new(&c * &p.x / &r2, -(&c * &p.y) / &r2)
    };
    let before = crossing_profile(n, &n.cut)
        .ok_or_else(|| Error::NonGenericIntersection("network meets its cut non-transversally".into()))?;
    let planar = super::validate(n).is_empty();
    for k in 0..7 {
        let pieces = 1i64 << k;
        let map = |pl: &Polyline| -> Polyline {
            let mut pts = vec![inv(pl.first())];
            for (a, b) in pl.segments() {
                for j in 1..=pieces {
                    pts.push(inv(&a.lerp(b, &frac(j, pieces))));
                }
            }
            Polyline { points: pts, closed: false }
        };
        let mut out = n.clone();
        out.cut = map(&n.cut).reversed();
        for v in &mut out.vertices {
            v.pos = inv(&v.pos);
        }
        for e in &mut out.edges {
            e.polyline = map(&e.polyline);
        }
        let ok_drawing =
            if planar { super::validate(&out).is_empty() } else { super::validate_drawing(&out).is_empty() };
        if !ok_drawing {
            continue;
        }
        let Some(after) = crossing_profile(&out, &out.cut) else {
            continue;
        };
        let flipped = before.iter().zip(&after).all(|(b, a)| a.0 == -b.0 && a.1 == b.1);
        if flipped {
            return Ok(out);
        }
    }
    Err(Error::ApproximationTooCoarse("cut reversal image needs a finer subdivision".into()))
}

fn cut_base(n: &Network, which: Circle) -> Point {
    match which {
        Circle::Inner => n.cut.first().clone(),
        Circle::Outer => n.cut.last().clone(),
    }
}

// boundary vertices on the circle, counterclockwise from the base point
fn boundary_ccw(n: &Network, which: Circle) -> Result<Vec<usize>> {
    let base = cut_base(n, which);
    let mut on: Vec<usize> =
        (0..n.vertices.len()).filter(|&v| n.vertices[v].kind.is_boundary() && n.circle_of(v) == Some(which)).collect();
    if on.is_empty() {
        return Err(Error::Precondition("no boundary vertex on that circle".into()));
    }
    on.sort_by(|&a, &b| ccw_angle_cmp(&base, &n.vertices[a].pos, &n.vertices[b].pos));
    Ok(on)
}

/// The boundary vertex that [`move_cut_base`] moves the base point past.
pub fn cut_move_passes(n: &Network, which: Circle) -> Result<usize> {
    Ok(boundary_ccw(n, which)?[0])
}

/// Moves the base point of the cut on the given circle counterclockwise past
/// the first boundary vertex on that circle, by a detour running close to
/// the circle.
pub fn move_cut_base(n: &Network, which: Circle) -> Result<Network> {
    let r = n.annulus.radius(which).clone();
    let base = cut_base(n, which);
    let on = boundary_ccw(n, which)?;
    let passed = on[0];
    let bpos = n.vertices[passed].pos.clone();
    let limit = if on.len() > 1 { n.vertices[on[1]].pos.clone() } else { base.clone() };
    let passed_edges: Vec<usize> =
        (0..n.edges.len()).filter(|&e| n.edges[e].tail == passed || n.edges[e].head == passed).collect();

    // every point not on this circle stays outside the band next to it
    let r2 = &r * &r;
    let mut pts: Vec<&Point> = n.vertices.iter().map(|v| &v.pos).collect();
    for e in &n.edges {
        pts.extend(e.polyline.points.iter());
    }
    pts.extend(n.cut.points.iter());
    let off: Vec<Scalar> = pts.iter().map(|p| p.norm2()).filter(|q| *q != r2).collect();
    let width = &n.annulus.outer_radius - &n.annulus.inner_radius;
    let before = crossing_profile(n, &n.cut)
        .ok_or_else(|| Error::NonGenericIntersection("network meets its cut non-transversally".into()))?;

    for depth in 1..40 {
        let eps = &width / Scalar::from_integer((1u64 << depth.min(60)).into());
        let (band, mid) = match which {
            Circle::Outer => (&r - &eps, &r - &eps / frac(2, 1)),
            Circle::Inner => (&r + &eps, &r + &eps / frac(2, 1)),
        };
        let band2 = &band * &band;
        let clear = match which {
            Circle::Outer => off.iter().all(|q| *q < band2),
            Circle::Inner => off.iter().all(|q| *q > band2),
        };
        if !clear {
            continue;
        }
        let scale = &mid / &r;
        let a0 = base.scale(&scale);
        for (g, twist) in [(8i64, 0i64), (8, 29), (32, 0), (32, 113), (128, 0), (128, 457)] {
            // a twisted grid keeps arc corners off edges through grid directions
            let grid: Vec<Point> = if twist == 0 {
                unit_grid(g)
            } else {
                unit_grid(g).iter().map(|p| p.rotate(&frac(1, twist))).collect()
            };
            // first grid direction past the vertex being passed
            let unit_b = bpos.scale(&(frac(1, 1) / &r));
            let unit_limit = limit.scale(&(frac(1, 1) / &r));
            let unit_base = base.scale(&(frac(1, 1) / &r));
            let Some(past) = grid_sweep(&grid, &frac(1, 1), &unit_b, &unit_limit).into_iter().next() else {
                continue;
            };
            let mut arc = vec![a0.clone()];
            arc.extend(grid_sweep(&grid, &mid, &unit_base, &past));
            arc.push(past.scale(&mid));
            let end = past.scale(&r);
            if !strictly_ccw_between(&bpos, &end, &limit) && on.len() > 1 {
                continue;
            }
            for t in 1..12 {
                let tq = frac(1, 1) - frac(1, 1i64 << t);
                let cut = match which {
                    Circle::Outer => {
                        let m = n.cut.points.len();
                        let q = n.cut.points[m - 2].lerp(&base, &tq);
                        let mut p = n.cut.points[..m - 1].to_vec();
                        p.push(q);
                        p.extend(arc.iter().cloned());
                        p.push(end.clone());
                        p
                    }
                    Circle::Inner => {
                        let q = base.lerp(&n.cut.points[1], &(frac(1, 1) - &tq));
                        let mut p = vec![end.clone()];
                        p.extend(arc.iter().rev().cloned());
                        p.push(q);
                        p.extend(n.cut.points[1..].iter().cloned());
                        p
                    }
                };
                let Ok(cut) = Polyline::open(cut) else {
                    continue;
                };
                let mut out = n.clone();
                out.cut = cut;
                if !super::validate_drawing(&out).is_empty() {
                    continue;
                }
                let Some(after) = crossing_profile(&out, &out.cut) else {
                    continue;
                };
                let ok = before.iter().zip(&after).enumerate().all(|(e, (b, a))| {
                    if passed_edges.contains(&e) {
                        (a.0 - b.0).abs() == 1 && a.1 == b.1 + 1
                    } else {
                        a == b
                    }
                });
                if ok {
                    return Ok(out);
                }
            }
        }
    }
    Err(Error::ApproximationTooCoarse("no detour for the cut base point found".into()))
}
