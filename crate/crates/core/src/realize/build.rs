//! Gadgets: monomials, sums, feedback loops, constant fan networks, and the
//! scalar and matrix compilers built from them.

use crate::arith::{fmt_scalar, frac, int, Field, Matrix, Poly, RatLambda, Scalar};
use crate::error::{Error, Result};
use crate::network::{VertexKind, Weight};

use super::strip::{Gadget, SPoint};

fn pt(x: Scalar, y: Scalar) -> SPoint {
    SPoint::new(x, y)
}

fn one() -> Weight {
    Weight::Value(int(1))
}

/// `a λ^d`: one edge winding `-d` times around the hole. Each turn
/// contributes `-λ^{-1}`, so the weight carries the sign `(-1)^d`. The
/// spiral drops by more than one unit per turn.
pub fn scalar_monomial(a: &Scalar, d: i64) -> Result<Gadget> {
    if Field::is_zero(a) {
        return Err(Error::ZeroWeight(format!("monomial {}·λ^{d}", fmt_scalar(a))));
    }
    let h = int(d.abs() + 2);
    let mut g = Gadget::empty(int(1), h.clone());
    let x = frac(1, 2);
    let s = g.vertex("s", VertexKind::Source, pt(x.clone(), int(0)));
    let t = g.vertex("t", VertexKind::Sink, pt(x.clone(), h.clone()));
    let w = if d % 2 == 0 { a.clone() } else { -a.clone() };
    let via = vec![pt(x.clone(), frac(1, 3)), SPoint { x, wrap: -d, y: h - frac(1, 3) }];
    g.edge(s, t, Weight::Value(w), via, -d);
    g.top.push(s);
    g.bottom.push(t);
    g.value = Some(RatLambda::laurent_monomial(a.clone(), d));
    Ok(g.note(format!("monomial {}·λ^{d}", fmt_scalar(a))))
}

fn check_scalar(g: &Gadget, op: &str) -> Result<()> {
    if g.sources() != 1 || g.sinks() != 1 || !g.is_separated() {
        return Err(Error::Precondition(format!(
            "{op} needs a scalar network with its source outside and sink inside"
        )));
    }
    Ok(())
}

/// Side by side: measures `[[0, F₁], [F₂, 0]]` for scalars.
pub fn direct_sum(a: Gadget, b: Gadget) -> Result<Gadget> {
    check_scalar(&a, "direct sum")?;
    check_scalar(&b, "direct sum")?;
    Ok(Gadget::beside(a, b).note("direct sum"))
}

/// Concatenation: measures `M₁ W₀ M₂`, the product for scalars.
pub fn concat(a: Gadget, b: Gadget) -> Result<Gadget> {
    Ok(Gadget::stack(a, b)?.note("concatenation"))
}

/// Blocks side by side, each in its own horizontal band, so that a block
/// winding around the hole only crosses the wires of the others.
pub fn staggered(blocks: Vec<Gadget>) -> Result<Gadget> {
    let ins: Vec<usize> = blocks.iter().map(Gadget::sources).collect();
    let outs: Vec<usize> = blocks.iter().map(Gadget::sinks).collect();
    let mut acc: Option<Gadget> = None;
    for (r, b) in blocks.into_iter().enumerate() {
        let left: usize = outs[..r].iter().sum();
        let right: usize = ins[r + 1..].iter().sum();
        let mut band = b;
        if left > 0 {
            band = Gadget::beside(Gadget::wires(left), band);
        }
        if right > 0 {
            band = Gadget::beside(band, Gadget::wires(right));
        }
        acc = Some(match acc {
            None => band,
            Some(a) => Gadget::stack(a, band)?,
        });
    }
    acc.ok_or_else(|| Error::Precondition("nothing to place".into()))
}

/// One source split by white vertices into `m` outputs, or `m` inputs
/// merged by black vertices into one sink; `y` grows downward.
fn fan(m: usize, split: bool) -> Gadget {
    let h = int(m as i64 + 1);
    let mut g = Gadget::empty(int(m as i64), h.clone());
    let xs: Vec<Scalar> = (0..m).map(|j| frac(2 * j as i64 + 1, 2)).collect();
    let (root_y, leaf_y) = if split { (int(0), h.clone()) } else { (h.clone(), int(0)) };
    let (root_kind, leaf_kind, inner) = if split {
        (VertexKind::Source, VertexKind::Sink, VertexKind::White)
    } else {
        (VertexKind::Sink, VertexKind::Source, VertexKind::Black)
    };
    let root = g.vertex("r", root_kind, pt(xs[0].clone(), root_y));
    let leaves: Vec<usize> =
        (0..m).map(|j| g.vertex(format!("l{j}"), leaf_kind, pt(xs[j].clone(), leaf_y.clone()))).collect();
    let connect = |g: &mut Gadget, a: usize, b: usize, via: Vec<SPoint>| {
        if split {
            g.edge(a, b, one(), via, 0)
        } else {
            g.edge(b, a, one(), via, 0)
        }
    };
    // a chain down the leftmost column; node j peels off leaf m - 1 - j
    let mut prev = root;
    for j in 0..m {
        if j + 1 == m {
            connect(&mut g, prev, leaves[0], vec![]);
            break;
        }
        let d = frac(2 * j as i64 + 1, 2);
        let (depth, bend) = if split { (d.clone(), d + frac(1, 3)) } else { (&h - &d, &h - d - frac(1, 3)) };
        let node = g.vertex(format!("c{j}"), inner, pt(xs[0].clone(), depth));
        connect(&mut g, prev, node, vec![]);
        connect(&mut g, node, leaves[m - 1 - j], vec![pt(xs[m - 1 - j].clone(), bend)]);
        prev = node;
    }
    if split {
        g.top.push(root);
        g.bottom = leaves;
    } else {
        g.top = leaves;
        g.bottom.push(root);
    }
    g
}

/// Measures `F₁ + F₂`: split, the two summands in staggered bands, merge.
pub fn add(a: Gadget, b: Gadget) -> Result<Gadget> {
    check_scalar(&a, "sum")?;
    check_scalar(&b, "sum")?;
    let value = match (&a.value, &b.value) {
        (Some(x), Some(y)) => Some(x.clone() + y.clone()),
        _ => None,
    };
    let mid = staggered(vec![a, b])?;
    let mut g = Gadget::stack(Gadget::stack(fan(2, true), mid)?, fan(2, false))?;
    g.value = value;
    Ok(g.note("sum"))
}

/// Measures `F/(1+F)`, or `-F/(1+F)` when `negate`: the output of `F` is
/// fed back to its input along a lane on the right. The sign is carried by
/// the edge into the new sink.
pub fn feedback(n: Gadget, negate: bool) -> Result<Gadget> {
    check_scalar(&n, "feedback")?;
    let value = match &n.value {
        Some(f) => {
            let one = RatLambda::one();
            let den = one + f.clone();
            if Field::is_zero(&den) {
                return Err(Error::SingularFeedback);
            }
            let q = f.clone() * Field::inv(&den).ok_or(Error::SingularFeedback)?;
            Some(if negate { -q } else { q })
        }
        None => None,
    };
    let h = n.height.clone();
    let xs = n.vertices[n.top[0]].pos.x.clone();
    let xt = n.vertices[n.bottom[0]].pos.x.clone();
    let lane = &n.width + frac(1, 2);
    let mut g = Gadget::empty(&n.width + int(1), &h + int(2));
    let s = g.vertex("s", VertexKind::Source, pt(xs.clone(), int(0)));
    let b = g.vertex("b", VertexKind::Black, pt(xs.clone(), frac(1, 2)));
    let nt = g.vertex("nt", VertexKind::Sink, pt(xs, int(1)));
    let (top, bottom) = g.embed(n, &int(0), &int(1));
    let w = g.vertex("w", VertexKind::White, pt(xt.clone(), &h + frac(3, 2)));
    let ns = g.vertex("ns", VertexKind::Source, pt(xt.clone(), &h + int(1)));
    let t = g.vertex("t", VertexKind::Sink, pt(xt, &h + int(2)));
    g.edge(s, b, one(), vec![], 0);
    g.edge(b, nt, one(), vec![], 0);
    g.edge(ns, w, one(), vec![], 0);
    g.edge(w, t, Weight::Value(if negate { int(-1) } else { int(1) }), vec![], 0);
    let back = vec![pt(lane.clone(), &h + frac(5, 4)), pt(lane, frac(3, 4))];
    g.edge(w, b, one(), back, 0);
    g.glue(nt, top[0]);
    g.glue(bottom[0], ns);
    g.top.push(s);
    g.bottom.push(t);
    let mut g = g.compact();
    g.value = value;
    Ok(g.note(if negate { "feedback -F/(1+F)" } else { "feedback F/(1+F)" }))
}

/// `a` as a single edge.
pub fn constant(a: &Scalar) -> Result<Gadget> {
    scalar_monomial(a, 0)
}

/// The zero function, as `1 + (-1)`.
pub fn zero() -> Result<Gadget> {
    Ok(add(constant(&int(1))?, constant(&int(-1))?)?.note("zero"))
}

/// `Σ c_i λ^{i + shift}` in Horner form, `c_r + λ^g (c_s + λ^h (…))` over
/// the nonzero coefficients, so each power of `λ` costs one turn.
fn laurent(p: &Poly<Scalar>, shift: i64) -> Result<Gadget> {
    let terms: Vec<(i64, &Scalar)> =
        p.coeffs().iter().enumerate().filter(|(_, c)| !Field::is_zero(*c)).map(|(i, c)| (i as i64, c)).collect();
    let Some(&(top, lead)) = terms.last() else {
        return zero();
    };
    let low = terms[0].0;
    if terms.len() == 1 {
        return scalar_monomial(lead, top + shift);
    }
    let mut acc = constant(lead)?;
    let mut prev = top;
    for &(i, c) in terms.iter().rev().skip(1) {
        acc = add(constant(c)?, concat(scalar_monomial(&int(1), prev - i)?, acc)?)?;
        prev = i;
    }
    if low + shift != 0 {
        acc = concat(scalar_monomial(&int(1), low + shift)?, acc)?;
    }
    Ok(acc)
}

/// `1/(1 + G)` as `1 - G/(1 + G)`.
pub fn reciprocal(g: Gadget) -> Result<Gadget> {
    Ok(add(constant(&int(1))?, feedback(g, true)?)?.note("reciprocal 1/(1+F)"))
}

/// Writes `f = λ^{-e} P(λ) / Q(λ)` with `Q(0) = 1` and realizes the
/// Laurent polynomial, then concatenates with `1/Q`.
pub fn realize_scalar(f: &RatLambda) -> Result<Gadget> {
    let g = scalar_gadget(f)?;
    if g.value.as_ref() != Some(f) {
        return Err(Error::Inconsistent(format!("scalar construction for {f} lost track of its value")));
    }
    Ok(g)
}

fn scalar_gadget(f: &RatLambda) -> Result<Gadget> {
    if Field::is_zero(f) {
        return zero();
    }
    let den = f.den();
    let e = den.coeffs().iter().position(|c| !Field::is_zero(c)).expect("nonzero denominator");
    let q0 = den.coeffs()[e].clone();
    let scale = Field::inv(&q0).expect("nonzero");
    let num: Vec<Scalar> = f.num().coeffs().iter().map(|c| c.clone() * scale.clone()).collect();
    let q: Vec<Scalar> = den.coeffs()[e..].iter().map(|c| c.clone() * scale.clone()).collect();
    let p = laurent(&Poly::new(num), -(e as i64))?;
    if q.len() == 1 {
        return Ok(p.note(format!("scalar {f}")));
    }
    let mut g = q;
    g[0] = int(0);
    let r = reciprocal(laurent(&Poly::new(g), 0)?)?;
    Ok(concat(p, r)?.note(format!("scalar {f}")))
}

/// `targets.len()` inputs on top, `outs` outputs on the bottom; input `p`
/// runs down, turns right at its own level and merges into the bus of
/// output `targets[p]`. Inputs further right turn first, so horizontals
/// only cross buses.
pub fn route(targets: &[usize], outs: usize) -> Result<Gadget> {
    let n = targets.len();
    if (0..outs).any(|c| !targets.contains(&c)) || targets.iter().any(|&c| c >= outs) {
        return Err(Error::Precondition("every output of a routing needs an input".into()));
    }
    let h = int(n as i64 + 1);
    let mut g = Gadget::empty(int((n + outs) as i64), h.clone());
    let level = |p: usize| frac(2 * (n - p) as i64 - 1, 2);
    let bus = |c: usize| frac(2 * (n + c) as i64 + 1, 2);
    let top: Vec<usize> =
        (0..n).map(|p| g.vertex(format!("s{p}"), VertexKind::Source, pt(frac(2 * p as i64 + 1, 2), int(0)))).collect();
    for c in 0..outs {
        // inputs of this bus from the top down
        let feed: Vec<usize> = (0..n).rev().filter(|&p| targets[p] == c).collect();
        let sink = g.vertex(format!("t{c}"), VertexKind::Sink, pt(bus(c), h.clone()));
        let turn = |p: usize| pt(frac(2 * p as i64 + 1, 2), level(p));
        let mut prev = top[feed[0]];
        let mut via = vec![turn(feed[0]), pt(bus(c), level(feed[0]))];
        for &p in &feed[1..] {
            let node = g.vertex(format!("m{p}"), VertexKind::Black, pt(bus(c), level(p)));
            g.edge(prev, node, one(), via, 0);
            g.edge(top[p], node, one(), vec![turn(p)], 0);
            prev = node;
            via = vec![];
        }
        g.edge(prev, sink, one(), via, 0);
        g.bottom.push(sink);
    }
    g.top = top;
    Ok(g.note(format!("routing {targets:?}")))
}

/// `F` as the composite fan-out, entries side by side, merge: source `i`
/// splits into one strand per column, strand `(i, j)` passes through a
/// realization of `F_ij`, and all strands of column `j` merge into the
/// sink labelled `j`.
pub fn realize_matrix(f: &Matrix<RatLambda>) -> Result<Gadget> {
    let (k, m) = (f.rows(), f.cols());
    if k == 0 || m == 0 {
        return Err(Error::Dimension("empty matrix".into()));
    }
    let cells: Vec<(usize, usize)> = (0..k).flat_map(|i| (0..m).map(move |j| (i, j))).collect();
    let blocks = crate::par::map(crate::par::Exec::Auto, cells, |(i, j)| {
        Ok(realize_scalar(f.get(i, j))?.note(format!("entry ({}, {})", i + 1, j + 1)))
    });
    let blocks = blocks.into_iter().collect::<Result<Vec<_>>>()?;
    let mut fan_out = fan(m, true);
    for _ in 1..k {
        fan_out = Gadget::beside(fan_out, fan(m, true));
    }
    let fan_out = fan_out.note(format!("fan-out of {k} sources into {m} strands each"));
    let targets: Vec<usize> = (0..k * m).map(|p| m - 1 - p % m).collect();
    let g = Gadget::stack(Gadget::stack(fan_out, staggered(blocks)?)?, route(&targets, m)?)?;
    Ok(g.note(format!("{k}x{m} matrix")))
}

/// Terminal placements of a scalar network, named by which circle carries
/// the source and the sink; the two outer-circle layouts differ in which
/// terminal comes first counterclockwise from the cut.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Layout {
    /// Source outside, sink inside.
    Separated,
    /// Both outside, the source first.
    OuterSourceFirst,
    /// Both outside, the sink first.
    OuterSinkFirst,
    /// Source inside, sink outside.
    Swapped,
}

impl Layout {
    pub const ALL: [Layout; 4] = [Layout::Separated, Layout::OuterSourceFirst, Layout::OuterSinkFirst, Layout::Swapped];
}

impl std::str::FromStr for Layout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "separated" => Ok(Layout::Separated),
            "outer-source-first" => Ok(Layout::OuterSourceFirst),
            "outer-sink-first" => Ok(Layout::OuterSinkFirst),
            "swapped" => Ok(Layout::Swapped),
            _ => Err(Error::Parse(format!("unknown layout {s:?}"))),
        }
    }
}

// A point a third of the way along the segment `a → b`, which must not
// wrap, and a lane point slightly off its level.
fn branch(a: &SPoint, b: &SPoint, lane: &Scalar, dy: Scalar) -> Result<(SPoint, SPoint)> {
    if a.wrap != b.wrap {
        return Err(Error::Unsupported("terminal edge winds on its last segment".into()));
    }
    let s = frac(1, 3);
    let m = SPoint { x: &a.x + (&b.x - &a.x) * &s, wrap: a.wrap, y: &a.y + (&b.y - &a.y) * &s };
    let turn = SPoint { x: lane.clone(), wrap: a.wrap, y: &m.y + dy };
    Ok((m, turn))
}

/// Moves the terminals of a separated scalar network to `layout`: the edge
/// into the sink is replaced by one with the same tail running along a new
/// lane to the outer circle, and likewise for the source, whose new edge is
/// negated. The measured function is unchanged. Crossings with the lanes
/// are left for [`Gadget::to_network`].
pub fn relocate_terminals(g: Gadget, layout: Layout) -> Result<Gadget> {
    check_scalar(&g, "relocation")?;
    if layout == Layout::Separated {
        return Ok(g);
    }
    let winds = |e: &super::strip::GEdge| e.pts.iter().any(|p| p.wrap != e.pts[0].wrap);
    let ein = g.edges.iter().position(|e| e.head == g.bottom[0]).expect("sink has an edge");
    let eout = g.edges.iter().position(|e| e.tail == g.top[0]).expect("source has an edge");
    // the rerouted edges must not wind or coincide, or they would cross
    // themselves; a vanishing summand gives the terminals their own edges
    let mut g = if ein == eout || winds(&g.edges[ein]) || winds(&g.edges[eout]) { add(g, zero()?)? } else { g };
    if layout == Layout::OuterSinkFirst {
        g = Gadget::beside(Gadget::empty(int(0), g.height.clone()), g);
    }
    let lane = match layout {
        Layout::OuterSinkFirst => frac(1, 2),
        _ => &g.width + frac(1, 2),
    };
    if layout != Layout::OuterSinkFirst {
        g.width = &g.width + int(1);
    }
    let t = g.bottom[0];
    let e = g.edges.iter().position(|e| e.head == t).expect("sink has an edge");
    let n = g.edges[e].pts.len();
    let (m, turn) = branch(&g.edges[e].pts[n - 2], &g.edges[e].pts[n - 1], &lane, frac(1, 29))?;
    let top = SPoint { x: lane.clone(), wrap: m.wrap, y: int(0) };
    g.vertices[t].pos = SPoint::new(lane.clone(), int(0));
    let pts = &mut g.edges[e].pts;
    pts.truncate(n - 1);
    pts.extend([m, turn, top]);
    g.bottom.clear();
    g.top.push(t);
    let mut g = g.note(format!("sink moved to the outer circle along x = {lane}"));
    if layout == Layout::Swapped {
        let lane = &g.width + frac(1, 2);
        g.width = &g.width + int(1);
        let s = g.top[0];
        let e = g.edges.iter().position(|e| e.tail == s).expect("source has an edge");
        let (m, turn) = branch(&g.edges[e].pts[0], &g.edges[e].pts[1], &lane, frac(-1, 29))?;
        let h = g.height.clone();
        let bottom = SPoint { x: lane.clone(), wrap: m.wrap, y: h.clone() };
        g.vertices[s].pos = SPoint::new(lane.clone(), h);
        let pts = &mut g.edges[e].pts;
        pts.splice(0..1, [bottom, turn, m]);
        // a path from the inner to the outer circle picks up a sign
        g.edges[e].weight = match &g.edges[e].weight {
            Weight::Value(w) => Weight::Value(-w.clone()),
            Weight::Symbol(_) => return Err(Error::Unsupported("relocating a symbolic edge".into())),
        };
        g.top.remove(0);
        g.bottom.push(s);
        g = g.note(format!("source moved to the inner circle along x = {lane}"));
    }
    Ok(g)
}
