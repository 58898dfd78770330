//! The four-terminal network whose measurement matrix is the identity,
//! placed in the annulus with every terminal on the outer circle.

use crate::arith::int;
use crate::error::Result;
use crate::network::{Network, VertexKind, Weight};

use super::strip::{Gadget, SPoint};

fn layout(weight: impl Fn(usize) -> Weight) -> Gadget {
    let mut g = Gadget::empty(int(8), int(4));
    let at = |x: i64, y: i64| SPoint::new(int(x), int(y));
    let s1 = g.vertex("s1", VertexKind::Source, at(1, 0));
    let s2 = g.vertex("s2", VertexKind::Source, at(3, 0));
    let t3 = g.vertex("t3", VertexKind::Sink, at(5, 0));
    let t4 = g.vertex("t4", VertexKind::Sink, at(7, 0));
    let a = g.vertex("a", VertexKind::White, at(1, 1));
    let f = g.vertex("f", VertexKind::Black, at(3, 1));
    let e = g.vertex("e", VertexKind::White, at(4, 2));
    let d = g.vertex("d", VertexKind::Black, at(5, 1));
    let c = g.vertex("c", VertexKind::White, at(7, 1));
    let gv = g.vertex("g", VertexKind::Black, at(4, 3));
    // edge k is numbered as in the usual picture
    let wiring = [(s1, a), (a, gv), (gv, c), (c, t4), (s2, f), (f, e), (e, d), (d, t3), (a, f), (e, gv), (c, d)];
    for (k, (t, h)) in wiring.into_iter().enumerate() {
        g.edge(t, h, weight(k + 1), vec![], 0);
    }
    g.top = vec![s1, s2, t3, t4];
    g.note("identity network")
}

/// Weights `w₅ = w₁₀ = -1`, all others 1.
pub fn make_identity_network() -> Result<Network> {
    let w = |k: usize| Weight::Value(if k == 5 || k == 10 { int(-1) } else { int(1) });
    layout(w).to_drawing()
}

/// Edge `k` carries the symbol `wk`.
pub fn identity_network_symbolic() -> Result<Network> {
    layout(|k| Weight::Symbol(format!("w{k}"))).to_drawing()
}
