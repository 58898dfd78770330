//! Path sums by elimination on the line graph: nodes are edges, and the arc
//! `e -> f` carries `a_e · τ(e, f)`. Removing a node `x` with loop weight
//! `ℓ` adds `p · q / (1 - ℓ)` for every pair of arcs `u -> x -> v`.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::local::LocalData;
use crate::arith::{Field, Matrix};
use crate::error::{Error, Result};

/// Order in which internal line-graph nodes are removed.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum Order {
    #[default]
    Natural,
    Reverse,
    Shuffled(u64),
}

/// Modified edge weights `(-1)^{c_e} λ^{ind(e)} w_e`.
pub fn modified_weights<F: Field>(data: &LocalData, w: &[F], lambda: &F) -> Result<Vec<F>> {
    w.iter()
        .zip(&data.edge_sign)
        .zip(&data.ind)
        .map(|((we, &s), &k)| {
            let lk = lambda.powi(k).ok_or(Error::Pole)?;
            let v = we.clone() * lk;
            Ok(if s < 0 { -v } else { v })
        })
        .collect()
}

/// Signed sums over all paths between every source and sink. With the
/// natural order, a singular pivot makes it retry with other orders: the
/// result does not depend on the order whenever it is defined.
pub fn eliminate<F: Field>(data: &LocalData, a: &[F], order: Order) -> Result<Matrix<F>> {
    let first = eliminate_in(data, a, order);
    if order != Order::Natural || !matches!(first, Err(Error::NonGenericWeights(_))) {
        return first;
    }
    let retries = std::iter::once(Order::Reverse).chain((1..=8).map(Order::Shuffled));
    for o in retries {
        let r = eliminate_in(data, a, o);
        if !matches!(r, Err(Error::NonGenericWeights(_))) {
            return r;
        }
    }
    first
}

fn eliminate_in<F: Field>(data: &LocalData, a: &[F], order: Order) -> Result<Matrix<F>> {
    let ne = a.len();
    let mut out: Vec<BTreeMap<usize, F>> = vec![BTreeMap::new(); ne];
    let mut inn: Vec<BTreeMap<usize, F>> = vec![BTreeMap::new(); ne];
    for (&(e, f), &t) in &data.turn {
        let v = if t < 0 { -a[e].clone() } else { a[e].clone() };
        out[e].insert(f, v.clone());
        inn[f].insert(e, v);
    }
    let terminal: Vec<bool> =
        (0..ne).map(|e| data.first_edge.contains(&Some(e)) || data.last_edge.contains(&Some(e))).collect();
    let mut nodes: Vec<usize> = (0..ne).filter(|&e| !terminal[e]).collect();
    match order {
        Order::Natural => {}
        Order::Reverse => nodes.reverse(),
        Order::Shuffled(seed) => nodes.shuffle(&mut ChaCha8Rng::seed_from_u64(seed)),
    }
    for x in nodes {
        let succ = std::mem::take(&mut out[x]);
        let pred = std::mem::take(&mut inn[x]);
        let factor = match succ.get(&x) {
            Some(l) => (F::one() - l.clone())
                .inv()
                .ok_or_else(|| Error::NonGenericWeights(format!("cycle sum through edge {x} equals 1")))?,
            None => F::one(),
        };
        for (&u, p) in pred.iter().filter(|(&u, _)| u != x) {
            out[u].remove(&x);
            let pf = p.clone() * factor.clone();
            for (&v, q) in succ.iter().filter(|(&v, _)| v != x) {
                let add = pf.clone() * q.clone();
                let cur = out[u].remove(&v).unwrap_or_else(F::zero);
                let s = cur + add;
                if s.is_zero() {
                    inn[v].remove(&u);
                } else {
                    out[u].insert(v, s.clone());
                    inn[v].insert(u, s);
                }
            }
        }
        for &v in succ.keys() {
            inn[v].remove(&x);
        }
    }
    let (k, m) = (data.labels.k(), data.labels.m());
    Ok(Matrix::from_fn(k, m, |r, c| {
        let (Some(f), Some(g)) = (data.first_edge[r], data.last_edge[c]) else {
            return F::zero();
        };
        let v = if f == g {
            a[f].clone()
        } else {
            match out[f].get(&g) {
                Some(arc) => arc.clone() * a[g].clone(),
                None => return F::zero(),
            }
        };
        if data.closing[r][c] < 0 {
            -v
        } else {
            v
        }
    }))
}
