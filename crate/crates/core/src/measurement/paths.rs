//! Single paths and truncated path series, computed from whole closed
//! curves rather than from local sign data.

use serde::Serialize;

use super::local::LocalData;
use crate::arith::{fmt_scalar, Field, RatLambda, Scalar};
use crate::error::{Error, Result};
use crate::geometry::{close_path, concordance, intersection_index, Circle, Polyline};
use crate::network::{cut_move_passes, Network, VertexKind, Weight};

/// Edge indices of a path given by edge ids; consecutive edges must meet.
pub fn parse_path(n: &Network, ids: &[String]) -> Result<Vec<usize>> {
    if ids.is_empty() {
        return Err(Error::InvalidPath("empty path".into()));
    }
    let idx: Vec<usize> = ids
        .iter()
        .map(|id| n.edge_index(id).ok_or_else(|| Error::InvalidPath(format!("unknown edge {id}"))))
        .collect::<Result<_>>()?;
    for w in idx.windows(2) {
        if n.edges[w[0]].head != n.edges[w[1]].tail {
            return Err(Error::InvalidPath(format!(
                "edge {} does not continue edge {}",
                n.edges[w[1]].id, n.edges[w[0]].id
            )));
        }
    }
    Ok(idx)
}

fn trace(n: &Network, path: &[usize], closed: bool) -> Result<Polyline> {
    let mut pts = vec![n.edges[path[0]].polyline.first().clone()];
    for &e in path {
        pts.extend(n.edges[e].polyline.points[1..].iter().cloned());
    }
    if closed {
        pts.pop();
        Polyline::closed(pts)
    } else {
        Polyline::open(pts)
    }
}

fn sign_power<F: Field>(x: F, negative: bool) -> F {
    if negative {
        -x
    } else {
        x
    }
}

fn product<F: Field>(path: &[usize], w: &[F]) -> F {
    path.iter().fold(F::one(), |acc, &e| acc * w[e].clone())
}

/// `(-1)^{c(C_P) - 1} λ^{ind(P)}` for a source-to-sink path.
pub fn path_sign_and_power(n: &Network, path: &[usize]) -> Result<(i8, i64)> {
    let first = n.edges[path[0]].tail;
    let last = n.edges[*path.last().expect("nonempty")].head;
    if n.vertices[first].kind != VertexKind::Source || n.vertices[last].kind != VertexKind::Sink {
        return Err(Error::InvalidPath("a path runs from a source to a sink".into()));
    }
    let p = trace(n, path, false)?;
    let closed = close_path(&p, &n.annulus, &n.cut, &n.boundary_positions())?;
    let c = concordance(&closed)?;
    let ind = intersection_index(&p, &n.cut)?;
    Ok((if c == 1 { 1 } else { -1 }, ind))
}

fn via_edges<F: Field>(data: &LocalData, n: &Network, path: &[usize], a: &[F]) -> Result<F> {
    let row = data.first_edge.iter().position(|&f| f == Some(path[0]));
    let col = data.last_edge.iter().position(|&g| g == path.last().copied());
    let (Some(r), Some(c)) = (row, col) else {
        return Err(Error::InvalidPath("a path runs from a source to a sink".into()));
    };
    let mut neg = data.closing[r][c] < 0;
    for w in path.windows(2) {
        neg ^= data.turn[&(w[0], w[1])] < 0;
    }
    let _ = n;
    Ok(sign_power(product(path, a), neg))
}

/// Weight of a path computed from the closed curve `C_P`, checked against
/// the product of modified edge weights.
pub fn path_weight_over<F: Field>(n: &Network, path: &[usize], w: &[F], lambda: &F) -> Result<F> {
    let (s, k) = path_sign_and_power(n, path)?;
    let lk = lambda.powi(k).ok_or(Error::Pole)?;
    let geometric = sign_power(product(path, w) * lk, s < 0);
    let data = LocalData::new(n)?;
    let a = super::modified_weights(&data, w, lambda)?;
    let local = via_edges(&data, n, path, &a)?;
    if local != geometric {
        return Err(Error::Inconsistent(format!("path weight {geometric:?} vs {local:?} from modified weights")));
    }
    Ok(geometric)
}

/// Weight of a cycle, `(-1)^{c(C) - 1} λ^{ind(C)} Π w_e`.
pub fn cycle_weight_over<F: Field>(n: &Network, cycle: &[usize], w: &[F], lambda: &F) -> Result<F> {
    if n.edges[cycle[0]].tail != n.edges[*cycle.last().expect("nonempty")].head {
        return Err(Error::InvalidPath("cycle does not close".into()));
    }
    let c = trace(n, cycle, true)?;
    let conc = concordance(&c)?;
    let ind = intersection_index(&c, &n.cut)?;
    let lk = lambda.powi(ind).ok_or(Error::Pole)?;
    Ok(sign_power(product(cycle, w) * lk, conc == 0))
}

/// Splits at the first repeated edge into `P'` and the cycle `C^0`.
pub fn split_first_repeat(path: &[usize]) -> Option<(Vec<usize>, Vec<usize>)> {
    for j in 1..path.len() {
        if let Some(i) = path[..j].iter().position(|&e| e == path[j]) {
            let mut rest = path[..i].to_vec();
            rest.extend_from_slice(&path[j..]);
            return Some((rest, path[i..j].to_vec()));
        }
    }
    None
}

/// Checks `w_P = -w_{P'} w_{C^0}`.
pub fn cycle_decompose_check_over<F: Field>(n: &Network, path: &[usize], w: &[F], lambda: &F) -> Result<bool> {
    let (rest, cycle) = split_first_repeat(path).ok_or(Error::NothingToDecompose)?;
    let wp = path_weight_over(n, path, w, lambda)?;
    let wr = path_weight_over(n, &rest, w, lambda)?;
    let wc = cycle_weight_over(n, &cycle, w, lambda)?;
    Ok(wp == -(wr * wc))
}

#[derive(Clone, Debug, Serialize)]
pub struct PathSeriesTerm {
    pub edges: Vec<String>,
    pub sign: i8,
    pub lambda_power: i64,
    #[serde(serialize_with = "ser_scalar")]
    pub monomial: Scalar,
}

fn ser_scalar<S: serde::Serializer>(q: &Scalar, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_scalar(q))
}

/// All paths from edge `start` to a sink through at most `maxlen` edges,
/// ending at vertex `sink`.
pub fn enumerate_paths(n: &Network, start: usize, sink: usize, maxlen: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut stack = vec![vec![start]];
    while let Some(p) = stack.pop() {
        let head = n.edges[*p.last().expect("nonempty")].head;
        if head == sink {
            out.push(p);
            continue;
        }
        if p.len() == maxlen {
            continue;
        }
        for f in n.out_edges(head) {
            let mut q = p.clone();
            q.push(f);
            stack.push(q);
        }
    }
    out.sort();
    out
}

/// Terms of the path series between labels `i` and `j` up to `maxlen` edges.
pub fn series_terms(n: &Network, i: usize, j: usize, maxlen: usize) -> Result<Vec<PathSeriesTerm>> {
    let data = LocalData::new(n)?;
    let w = n.numeric_weights()?;
    let row = data.labels.source_row(i).ok_or_else(|| Error::Precondition(format!("b{i} is not a source")))?;
    let col = data.labels.sink_col(j).ok_or_else(|| Error::Precondition(format!("b{j} is not a sink")))?;
    let Some(start) = data.first_edge[row] else {
        return Ok(Vec::new());
    };
    let sink = data.labels.vertex(data.labels.sinks[col]);
    enumerate_paths(n, start, sink, maxlen)
        .into_iter()
        .map(|p| {
            let (sign, k) = path_sign_and_power(n, &p)?;
            Ok(PathSeriesTerm {
                edges: p.iter().map(|&e| n.edges[e].id.clone()).collect(),
                sign,
                lambda_power: k,
                monomial: product(&p, &w),
            })
        })
        .collect()
}

/// Partial sum of the path series at `λ = t`.
pub fn series_oracle(n: &Network, i: usize, j: usize, maxlen: usize, t: &Scalar) -> Result<Scalar> {
    let mut acc = Scalar::zero();
    for term in series_terms(n, i, j, maxlen)? {
        let lk = t.powi(term.lambda_power).ok_or(Error::Pole)?;
        acc += sign_power(term.monomial * lk, term.sign < 0);
    }
    Ok(acc)
}

/// Every weight multiplied by `1 / (2 |E| max |w_e|)`, small enough for the
/// path series to converge at moderate `λ`.
pub fn rescaled_for_series(n: &Network) -> Result<Network> {
    let w = n.numeric_weights()?;
    let max =
        w.iter().map(|x| if x < &Scalar::zero() { -x.clone() } else { x.clone() }).max().unwrap_or_else(Scalar::one);
    if max.is_zero() {
        return Ok(n.clone());
    }
    let f = Scalar::one() / (max * Scalar::from_int(2 * n.edges.len() as i64));
    let mut out = n.clone();
    for (e, x) in out.edges.iter_mut().zip(w) {
        e.weight = Weight::Value(x * &f);
    }
    Ok(out)
}

/// `((-1)^α λ)^β` with `w'_P = factor · w_P` after [`move_cut_base`] on
/// `which`: `α` is 1 when the ends of `P` lie on different circles, and `β`
/// is 1 (or -1) when the passed vertex is the sink (or source) of `P`.
///
/// [`move_cut_base`]: crate::network::move_cut_base
pub fn cut_move_path_factor(n: &Network, which: Circle, path: &[usize]) -> Result<RatLambda> {
    let (Some(&first), Some(&last)) = (path.first(), path.last()) else {
        return Err(Error::InvalidPath("empty path".into()));
    };
    let (src, snk) = (n.edges[first].tail, n.edges[last].head);
    let b = cut_move_passes(n, which)?;
    let beta = if b == snk {
        1
    } else if b == src {
        -1
    } else {
        0
    };
    let sign = if n.circle_of(src) == n.circle_of(snk) { 1 } else { -1 };
    Ok(RatLambda::laurent_monomial(Scalar::from_int(sign).powi(beta).expect("unit"), beta))
}
