//! Exact planar geometry for networks drawn in an annulus centered at the
//! origin: polylines, crossings with the cut, concordance numbers, and the
//! closing curves attached to paths.

use std::cmp::Ordering;
use std::fmt;

use num_traits::ToPrimitive;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{fmt_scalar, frac, parse_scalar, Field, Scalar};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Point {
    pub x: Scalar,
    pub y: Scalar,
}

impl Point {
    pub fn new(x: Scalar, y: Scalar) -> Self {
        Point { x, y }
    }

    /// Nearest floating-point coordinates.
    pub fn approx(&self) -> (f64, f64) {
        (self.x.to_f64().unwrap_or(f64::NAN), self.y.to_f64().unwrap_or(f64::NAN))
    }

    fn approx_norm(&self) -> f64 {
        let (x, y) = self.approx();
        x.hypot(y)
    }

    pub fn ints(x: i64, y: i64) -> Self {
        Point::new(frac(x, 1), frac(y, 1))
    }

    pub fn zero() -> Self {
        Point::ints(0, 0)
    }

    pub fn add(&self, o: &Point) -> Point {
        Point::new(&self.x + &o.x, &self.y + &o.y)
    }

    pub fn sub(&self, o: &Point) -> Point {
        Point::new(&self.x - &o.x, &self.y - &o.y)
    }

    pub fn scale(&self, c: &Scalar) -> Point {
        Point::new(&self.x * c, &self.y * c)
    }

    pub fn neg(&self) -> Point {
        Point::new(-&self.x, -&self.y)
    }

    pub fn dot(&self, o: &Point) -> Scalar {
        &self.x * &o.x + &self.y * &o.y
    }

    pub fn cross(&self, o: &Point) -> Scalar {
        &self.x * &o.y - &self.y * &o.x
    }

    pub fn norm2(&self) -> Scalar {
        self.dot(self)
    }

    pub fn is_zero(&self) -> bool {
        Field::is_zero(&self.x) && Field::is_zero(&self.y)
    }

    /// `self + t (o - self)`
    pub fn lerp(&self, o: &Point, t: &Scalar) -> Point {
        self.add(&o.sub(self).scale(t))
    }

    /// Rotation by the angle whose half-angle tangent is `u`.
    pub fn rotate(&self, u: &Scalar) -> Point {
        let one = <Scalar as Field>::one();
        let d = &one + u * u;
        let c = (&one - u * u) / &d;
        let s = (frac(2, 1) * u) / &d;
        Point::new(&c * &self.x - &s * &self.y, &s * &self.x + &c * &self.y)
    }

    /// Nearest point with both coordinates in `2^-bits ℤ`.
    pub fn snap(&self, bits: u32) -> Point {
        let scale = Scalar::from_integer(num_bigint::BigInt::from(1u8) << bits);
        let round = |v: &Scalar| (v * &scale).round() / &scale;
        Point::new(round(&self.x), round(&self.y))
    }

    pub fn to_strings(&self) -> [String; 2] {
        [fmt_scalar(&self.x), fmt_scalar(&self.y)]
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", fmt_scalar(&self.x), fmt_scalar(&self.y))
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [x, y] = <[String; 2]>::deserialize(d)?;
        Ok(Point::new(parse_scalar(&x).map_err(D::Error::custom)?, parse_scalar(&y).map_err(D::Error::custom)?))
    }
}

/// Sign of the turn `a -> b -> c`: +1 for a left turn.
pub fn orient(a: &Point, b: &Point, c: &Point) -> i32 {
    orient_f64(a.approx(), b.approx(), c.approx()).unwrap_or_else(|| sgn(&b.sub(a).cross(&c.sub(a))))
}

/// Orientation in floating point, or `None` when rounding could flip it.
pub(crate) fn orient_f64(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> Option<i32> {
    let (u, v) = ((b.0 - a.0, b.1 - a.1), (c.0 - a.0, c.1 - a.1));
    let scale = 1.0 + a.0.abs().max(a.1.abs()).max(b.0.abs()).max(b.1.abs()).max(c.0.abs()).max(c.1.abs());
    let tol = 1e-12 * scale * (u.0.abs() + u.1.abs() + v.0.abs() + v.1.abs());
    certain_sign(u.0 * v.1 - u.1 * v.0, tol)
}

fn certain_sign(x: f64, tol: f64) -> Option<i32> {
    if !x.is_finite() {
        None
    } else if x > tol {
        Some(1)
    } else if x < -tol {
        Some(-1)
    } else {
        None
    }
}

/// Sign of `p × q`.
pub fn cross_sign(p: &Point, q: &Point) -> i32 {
    let ((a, b), (c, d)) = (p.approx(), q.approx());
    let tol = 1e-12 * (a.abs() + b.abs()) * (c.abs() + d.abs());
    certain_sign(a * d - b * c, tol).unwrap_or_else(|| sgn(&p.cross(q)))
}

fn sgn(q: &Scalar) -> i32 {
    crate::arith::field::sign_of(q)
}

/// Polygonal curve; a closed curve does not repeat its first point.
#[derive(Clone, PartialEq, Debug)]
pub struct Polyline {
    pub points: Vec<Point>,
    pub closed: bool,
}

impl Polyline {
    pub fn open(points: Vec<Point>) -> Result<Self> {
        let p = Polyline { points, closed: false };
        p.check()?;
        Ok(p)
    }

    pub fn closed(points: Vec<Point>) -> Result<Self> {
        let p = Polyline { points, closed: true };
        p.check()?;
        Ok(p)
    }

    fn check(&self) -> Result<()> {
        let min = if self.closed { 3 } else { 2 };
        if self.points.len() < min {
            return Err(Error::Parse(format!("polyline needs at least {min} points")));
        }
        for (i, (a, b)) in self.segments().enumerate() {
            if a == b {
                return Err(Error::Parse(format!("zero-length segment {i} at {a}")));
            }
        }
        Ok(())
    }

    pub fn first(&self) -> &Point {
        &self.points[0]
    }

    pub fn last(&self) -> &Point {
        self.points.last().expect("nonempty")
    }

    pub fn segments(&self) -> impl Iterator<Item = (&Point, &Point)> + '_ {
        let n = self.points.len();
        let count = if self.closed { n } else { n - 1 };
        (0..count).map(move |i| (&self.points[i], &self.points[(i + 1) % n]))
    }

    pub fn directions(&self) -> Vec<Point> {
        self.segments().map(|(a, b)| b.sub(a)).collect()
    }

    pub fn reversed(&self) -> Polyline {
        let mut points = self.points.clone();
        points.reverse();
        Polyline { points, closed: self.closed }
    }

    /// Inserts the midpoint of segment `i`.
    pub fn refined(&self, i: usize) -> Polyline {
        let n = self.points.len();
        let mid = self.points[i].lerp(&self.points[(i + 1) % n], &frac(1, 2));
        let mut points = self.points.clone();
        points.insert(i + 1, mid);
        Polyline { points, closed: self.closed }
    }

    pub fn map(&self, f: impl Fn(&Point) -> Point) -> Polyline {
        Polyline { points: self.points.iter().map(f).collect(), closed: self.closed }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Circle {
    Outer,
    Inner,
}

#[derive(Clone, PartialEq, Debug)]
pub struct AnnulusSpec {
    pub inner_radius: Scalar,
    pub outer_radius: Scalar,
}

impl AnnulusSpec {
    pub fn new(inner_radius: Scalar, outer_radius: Scalar) -> Result<Self> {
        if sgn(&inner_radius) <= 0 || inner_radius >= outer_radius {
            return Err(Error::Parse("annulus radii must satisfy 0 < inner < outer".into()));
        }
        Ok(AnnulusSpec { inner_radius, outer_radius })
    }

    pub fn radius(&self, c: Circle) -> &Scalar {
        match c {
            Circle::Inner => &self.inner_radius,
            Circle::Outer => &self.outer_radius,
        }
    }

    pub fn circle_of(&self, p: &Point) -> Option<Circle> {
        let r2 = p.norm2();
        if r2 == &self.inner_radius * &self.inner_radius {
            Some(Circle::Inner)
        } else if r2 == &self.outer_radius * &self.outer_radius {
            Some(Circle::Outer)
        } else {
            None
        }
    }

    fn radii_f64(&self) -> (f64, f64) {
        (self.inner_radius.to_f64().unwrap_or(f64::NAN), self.outer_radius.to_f64().unwrap_or(f64::NAN))
    }

    pub fn strictly_inside(&self, p: &Point) -> bool {
        let (ri, ro) = self.radii_f64();
        let r = p.approx_norm();
        if r > ri * (1.0 + 1e-9) && r < ro * (1.0 - 1e-9) {
            return true;
        }
        let r2 = p.norm2();
        r2 > &self.inner_radius * &self.inner_radius && r2 < &self.outer_radius * &self.outer_radius
    }

    /// Whether the closed segment stays in the closed annulus, touching the
    /// circles at most at its endpoints.
    pub fn contains_segment(&self, a: &Point, b: &Point) -> bool {
        let (ri, ro) = self.radii_f64();
        let (pa, pb) = (a.approx(), b.approx());
        let d = (pb.0 - pa.0, pb.1 - pa.1);
        let l = d.0 * d.0 + d.1 * d.1;
        let t = if l > 0.0 { (-(pa.0 * d.0 + pa.1 * d.1) / l).clamp(0.0, 1.0) } else { 0.0 };
        let near = (pa.0 + t * d.0).hypot(pa.1 + t * d.1);
        let tol = 1e-9;
        if near > ri * (1.0 + tol) && a.approx_norm() < ro * (1.0 - tol) && b.approx_norm() < ro * (1.0 - tol) {
            return true;
        }
        let ri2 = &self.inner_radius * &self.inner_radius;
        let ro2 = &self.outer_radius * &self.outer_radius;
        // the outer disk is convex, so only the endpoints matter there
        if a.norm2() > ro2 || b.norm2() > ro2 {
            return false;
        }
        let d = b.sub(a);
        let t = -a.dot(&d) / d.norm2();
        let zero = <Scalar as Field>::zero();
        let one = <Scalar as Field>::one();
        if t <= zero {
            a.norm2() >= ri2
        } else if t >= one {
            b.norm2() >= ri2
        } else {
            a.lerp(b, &t).norm2() > ri2
        }
    }
}

/// Outcome of intersecting two segments.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Crossing {
    None,
    /// Interiors cross at one point; the sign is that of the basis formed by
    /// the two directions.
    Proper(i32),
    /// Touching, overlapping, or passing through an endpoint.
    Degenerate,
}

pub fn segment_crossing(p1: &Point, p2: &Point, q1: &Point, q2: &Point) -> Crossing {
    let (a, b, c, d) = (p1.approx(), p2.approx(), q1.approx(), q2.approx());
    let quick = (|| {
        let o1 = orient_f64(a, b, c)?;
        let o2 = orient_f64(a, b, d)?;
        let o3 = orient_f64(c, d, a)?;
        let o4 = orient_f64(c, d, b)?;
        // with all four certain no endpoint lies on the other segment
        if o1 == o2 || o3 == o4 {
            return Some(Crossing::None);
        }
        Some(Crossing::Proper(o2))
    })();
    if let Some(q) = quick {
        return q;
    }
    let o1 = orient(p1, p2, q1);
    let o2 = orient(p1, p2, q2);
    let o3 = orient(q1, q2, p1);
    let o4 = orient(q1, q2, p2);
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return Crossing::Proper(sgn(&p2.sub(p1).cross(&q2.sub(q1))));
    }
    let on = |a: &Point, b: &Point, p: &Point| {
        orient(a, b, p) == 0 && {
            let d = b.sub(a);
            let t = p.sub(a).dot(&d);
            t >= <Scalar as Field>::zero() && t <= d.norm2()
        }
    };
    if on(p1, p2, q1) || on(p1, p2, q2) || on(q1, q2, p1) || on(q1, q2, p2) {
        Crossing::Degenerate
    } else {
        Crossing::None
    }
}

/// Whether `p` lies on the closed segment `[a, b]`.
pub fn point_on_segment(p: &Point, a: &Point, b: &Point) -> bool {
    segment_crossing(a, b, p, p) == Crossing::Degenerate
}

/// Algebraic intersection number of `curve` with `cut`.
pub fn intersection_index(curve: &Polyline, cut: &Polyline) -> Result<i64> {
    let mut total = 0i64;
    let boxes: Vec<[f64; 4]> = cut.segments().map(|(c, d)| bbox(c, d)).collect();
    for (a, b) in curve.segments() {
        let ab = bbox(a, b);
        for ((c, d), cd) in cut.segments().zip(&boxes) {
            if apart(&ab, cd) {
                continue;
            }
            match segment_crossing(a, b, c, d) {
                Crossing::None => {}
                Crossing::Proper(s) => total += s as i64,
                Crossing::Degenerate => {
                    return Err(Error::NonGenericIntersection(format!(
                        "segment {a}-{b} meets the cut segment {c}-{d} non-transversally"
                    )))
                }
            }
        }
    }
    Ok(total)
}

fn bbox(a: &Point, b: &Point) -> [f64; 4] {
    let ((x1, y1), (x2, y2)) = (a.approx(), b.approx());
    [x1.min(x2), y1.min(y2), x1.max(x2), y1.max(y2)]
}

// separated by a clear margin, so the exact segments cannot meet
fn apart(p: &[f64; 4], q: &[f64; 4]) -> bool {
    let m = 1e-9 * (1.0 + p.iter().chain(q).fold(0.0f64, |a, x| a.max(x.abs())));
    p[2] + m < q[0] || q[2] + m < p[0] || p[3] + m < q[1] || q[3] + m < p[1]
}

/// Whether `l` lies in the open cone spanned by `d1` and `d2`; `None` when
/// the two directions are exactly opposite.
pub fn in_open_cone(d1: &Point, d2: &Point, l: &Point) -> Option<bool> {
    let c = cross_sign(d1, d2);
    if c == 0 {
        // a ray (or a line, which is rejected)
        return if sgn(&d1.dot(d2)) > 0 { Some(false) } else { None };
    }
    Some(cross_sign(l, d2) == c && cross_sign(d1, l) == c)
}

/// A probe direction collinear with none of `dirs`.
pub fn choose_probe<'a>(dirs: impl IntoIterator<Item = &'a Point> + Clone) -> Point {
    let mut k: i64 = 0;
    loop {
        // a deterministic walk over slopes
        let l = Point::new(frac(1, 1), frac(2 * k + 1, 7 + 3 * k));
        k += 1;
        if dirs.clone().into_iter().all(|d| cross_sign(d, &l) != 0) {
            return l;
        }
    }
}

/// Number of consecutive pairs of `dirs` (cyclically when `closed`) whose
/// open cone contains `l`; errors with the index of a cusp.
pub fn cone_count(dirs: &[Point], closed: bool, l: &Point) -> Result<u64> {
    let n = dirs.len();
    let pairs = if closed { n } else { n.saturating_sub(1) };
    let mut count = 0;
    for i in 0..pairs {
        match in_open_cone(&dirs[i], &dirs[(i + 1) % n], l) {
            Some(true) => count += 1,
            Some(false) => {}
            None => return Err(Error::DegenerateTurn((i + 1) % n)),
        }
    }
    Ok(count)
}

/// Concordance number of a closed curve, as 0 or 1.
pub fn concordance(c: &Polyline) -> Result<u8> {
    let dirs = c.directions();
    let l = choose_probe(dirs.iter());
    concordance_with_probe(c, &l)
}

pub fn concordance_with_probe(c: &Polyline, l: &Point) -> Result<u8> {
    if !c.closed {
        return Err(Error::Precondition("concordance needs a closed curve".into()));
    }
    let dirs = c.directions();
    if dirs.iter().any(|d| sgn(&d.cross(l)) == 0) {
        return Err(Error::Precondition("probe collinear with a segment".into()));
    }
    Ok((cone_count(&dirs, true, l)? % 2) as u8)
}

/// Compares the counterclockwise angles of `p` and `q` measured from `base`,
/// in `[0, 2π)`.
pub fn ccw_angle_cmp(base: &Point, p: &Point, q: &Point) -> Ordering {
    let key = |v: &Point| {
        let (dot, cr) = (base.dot(v), base.cross(v));
        let half = if sgn(&cr) > 0 || (sgn(&cr) == 0 && sgn(&dot) > 0) { 0 } else { 1 };
        (half, Point::new(dot, cr))
    };
    let (hp, fp) = key(p);
    let (hq, fq) = key(q);
    hp.cmp(&hq).then_with(|| 0.cmp(&sgn(&fp.cross(&fq))))
}

/// Whether `p` is strictly inside the counterclockwise sweep from `a` to `b`.
pub fn strictly_ccw_between(a: &Point, p: &Point, b: &Point) -> bool {
    let zero_a = ccw_angle_cmp(a, p, a) == Ordering::Equal;
    !zero_a && ccw_angle_cmp(a, p, b) == Ordering::Less
}

const ARC_STEPS: [(i64, i64); 4] = [(1, 4), (2, 9), (3, 13), (1, 5)];

/// Rational points on the circle through `from`, rotating counterclockwise
/// from `from` to `to` with steps below a right angle. Includes both ends.
fn arc_nodes(from: &Point, to: &Point, avoid: &[Point]) -> Result<Vec<Point>> {
    'steps: for (n, d) in ARC_STEPS {
        let u = frac(n, d);
        let mut nodes = vec![from.clone()];
        let mut cur = from.clone();
        for _ in 0..64 {
            let next = cur.rotate(&u);
            if next == *to || strictly_ccw_between(&cur, to, &next) {
                nodes.push(to.clone());
                return Ok(nodes);
            }
            if avoid.contains(&next) {
                continue 'steps;
            }
            nodes.push(next.clone());
            cur = next;
        }
        unreachable!("a full turn takes fewer than 64 steps");
    }
    Err(Error::ApproximationTooCoarse(format!("no arc subdivision from {from} to {to} avoids the boundary vertices")))
}

/// Polygonal counterclockwise arc along a boundary circle from `from` to `to`
/// that leaves the open annulus: chords inside the hole for the inner circle,
/// tangent lines outside for the outer one. Returns the points after `from`,
/// ending with `to`.
pub fn boundary_arc(circle: Circle, from: &Point, to: &Point, avoid: &[Point]) -> Result<Vec<Point>> {
    let nodes = arc_nodes(from, to, avoid)?;
    match circle {
        Circle::Inner => Ok(nodes[1..].to_vec()),
        Circle::Outer => {
            let r2 = from.norm2();
            let mut out = Vec::with_capacity(nodes.len());
            for w in nodes.windows(2) {
                // meeting point of the tangents at w[0] and w[1]
                let s = w[0].add(&w[1]);
                out.push(s.scale(&(&r2 / (&r2 + w[0].dot(&w[1])))));
            }
            out.push(to.clone());
            Ok(out)
        }
    }
}

/// The closed curve `C_P`: the path followed by counterclockwise boundary
/// arcs, passing along the cut when the endpoints lie on different circles.
/// `cut` runs from the inner circle to the outer one; `avoid` lists points
/// the arcs must not touch (boundary vertices).
pub fn close_path(path: &Polyline, annulus: &AnnulusSpec, cut: &Polyline, avoid: &[Point]) -> Result<Polyline> {
    let closing = closing_curve(path.last(), path.first(), annulus, cut, avoid)?;
    let mut points = path.points.clone();
    points.extend(closing.into_iter().take_while(|p| p != path.first()));
    Polyline::closed(points)
}

/// Points of the closing curve from `sink` back to `source`, excluding
/// `sink` and including `source`.
pub fn closing_curve(
    sink: &Point,
    source: &Point,
    annulus: &AnnulusSpec,
    cut: &Polyline,
    avoid: &[Point],
) -> Result<Vec<Point>> {
    let cs = annulus
        .circle_of(sink)
        .ok_or_else(|| Error::Precondition(format!("path end {sink} is not on a boundary circle")))?;
    let cb = annulus
        .circle_of(source)
        .ok_or_else(|| Error::Precondition(format!("path start {source} is not on a boundary circle")))?;
    if cs == cb {
        return boundary_arc(cs, sink, source, avoid);
    }
    let along: Vec<Point> = match cs {
        Circle::Inner => cut.points.clone(),
        Circle::Outer => cut.reversed().points,
    };
    let mut out = boundary_arc(cs, sink, &along[0], avoid)?;
    out.extend(along[1..].iter().cloned());
    out.extend(boundary_arc(cb, along.last().expect("cut"), source, avoid)?);
    Ok(out)
}

/// Rational unit vectors `S(k/n)` and their negatives, roughly evenly
/// spread with spacing below `2/n` radians, sorted counterclockwise from
/// the direction `(0, -1)`.
pub fn unit_grid(n: i64) -> Vec<Point> {
    let one = <Scalar as Field>::one();
    let mut out = Vec::new();
    for flip in [false, true] {
        for k in -n..n {
            let u = frac(k, n);
            let d = &one + &u * &u;
            let p = Point::new((&one - &u * &u) / &d, frac(2, 1) * &u / &d);
            out.push(if flip { p.neg() } else { p });
        }
    }
    out
}

/// Points of `grid` scaled to radius `r` lying strictly inside the
/// counterclockwise sweep from direction `from` to direction `to`, in
/// sweep order.
pub fn grid_sweep(grid: &[Point], r: &Scalar, from: &Point, to: &Point) -> Vec<Point> {
    let mut inside: Vec<&Point> = grid.iter().filter(|g| strictly_ccw_between(from, g, to)).collect();
    inside.sort_by(|a, b| ccw_angle_cmp(from, a, b));
    inside.into_iter().map(|g| g.scale(r)).collect()
}
