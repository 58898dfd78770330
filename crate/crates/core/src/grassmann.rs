//! Grassmannian loops: the extended boundary matrix, its Plücker
//! coordinates, path reversal, and the checks relating the charts of a
//! network and of its path reversal.

use serde::Serialize;

use crate::arith::{fmt_scalar, Field, Matrix, RatLambda, Scalar};
use crate::error::{Error, Result};
use crate::geometry::{segment_crossing, Crossing};
use crate::measurement::{measurement_matrix, LocalData, MeasurementMatrix};
use crate::network::{label_boundary, nonzero_weights, validate, BoundaryLabeling, Network, VertexKind, Weight};
use crate::par::{self, Exec};
use crate::poisson::{edge_bracket, jet, PoissonParams};

/// Number of sources strictly between `i` and `j` in the linear order.
pub fn sign_exponent(sources: &[usize], i: usize, j: usize) -> usize {
    let (lo, hi) = (i.min(j), i.max(j));
    sources.iter().filter(|&&x| lo < x && x < hi).count()
}

/// `k × n` matrix with the identity on source columns and
/// `(-1)^{s(p,j)} M_{pq}` in sink column `j`. With `ident = false` the
/// source columns are zero instead, which gives derivatives of the above.
fn extend<F: Field>(sources: &[usize], sinks: &[usize], n: usize, m: &Matrix<F>, ident: bool) -> Matrix<F> {
    Matrix::from_fn(sources.len(), n, |p, c| {
        let label = c + 1;
        if let Some(r) = sources.iter().position(|&x| x == label) {
            if r == p && ident {
                F::one()
            } else {
                F::zero()
            }
        } else {
            let q = sinks.iter().position(|&x| x == label).expect("every label is a source or a sink");
            let v = m.get(p, q).clone();
            if sign_exponent(sources, sources[p], label) % 2 == 1 {
                -v
            } else {
                v
            }
        }
    })
}

#[derive(Clone, Debug)]
pub struct ExtendedMatrix {
    pub sources: Vec<usize>,
    pub sinks: Vec<usize>,
    pub entries: Matrix<RatLambda>,
}

impl ExtendedMatrix {
    pub fn from_measurements(m: &MeasurementMatrix) -> Self {
        let n = m.sources.len() + m.sinks.len();
        let entries = extend(&m.sources, &m.sinks, n, &m.entries, true);
        ExtendedMatrix { sources: m.sources.clone(), sinks: m.sinks.clone(), entries }
    }

    pub fn k(&self) -> usize {
        self.sources.len()
    }

    pub fn n(&self) -> usize {
        self.entries.cols()
    }

    /// The minor on columns `K`, listed as labels in any order.
    pub fn plucker(&self, k_set: &[usize]) -> Result<RatLambda> {
        let cols = columns(k_set, self.k(), self.n())?;
        let rows: Vec<usize> = (0..self.k()).collect();
        self.entries.select(&rows, &cols).det()
    }

    /// Whether `x_I = 1` and `x_{I(i_p → j_q)} = M_{pq}` for every pair.
    pub fn check_minor_identity(&self, m: &MeasurementMatrix) -> Result<bool> {
        if !Field::is_zero(&(self.plucker(&self.sources)? - RatLambda::one())) {
            return Ok(false);
        }
        for (p, &i) in self.sources.iter().enumerate() {
            for (q, &j) in self.sinks.iter().enumerate() {
                let k: Vec<usize> = self.sources.iter().map(|&x| if x == i { j } else { x }).collect();
                if self.plucker(&k)? != *m.entries.get(p, q) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Sorted 0-based column indices of a `k`-subset of `[1, n]`.
fn columns(k_set: &[usize], k: usize, n: usize) -> Result<Vec<usize>> {
    let mut cols: Vec<usize> = k_set.to_vec();
    cols.sort_unstable();
    cols.dedup();
    if cols.len() != k || k_set.len() != k {
        return Err(Error::Precondition(format!("expected {k} distinct labels, got {k_set:?}")));
    }
    if cols.iter().any(|&c| c == 0 || c > n) {
        return Err(Error::Precondition(format!("labels must lie in [1, {n}]: {k_set:?}")));
    }
    Ok(cols.into_iter().map(|c| c - 1).collect())
}

pub fn extended_matrix(n: &Network) -> Result<ExtendedMatrix> {
    Ok(ExtendedMatrix::from_measurements(&measurement_matrix(n)?))
}

pub fn plucker(n: &Network, k_set: &[usize]) -> Result<RatLambda> {
    extended_matrix(n)?.plucker(k_set)
}

/// Every `k`-subset of `[1, n]` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..=n {
            cur.push(x);
            go(x + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(1, n, k, &mut Vec::new(), &mut out);
    out
}

/// Checks a path given by edge indices: consecutive, simple, from a source
/// to a sink. Returns the labels of its endpoints.
fn path_ends(n: &Network, labels: &BoundaryLabeling, path: &[usize]) -> Result<(usize, usize)> {
    let first = *path.first().ok_or_else(|| Error::InvalidPath("empty path".into()))?;
    let mut seen = vec![n.edges[first].tail];
    for w in path.windows(2) {
        if n.edges[w[0]].head != n.edges[w[1]].tail {
            return Err(Error::InvalidPath(format!("{} does not continue {}", n.edges[w[1]].id, n.edges[w[0]].id)));
        }
    }
    for &e in path {
        let h = n.edges[e].head;
        if seen.contains(&h) {
            return Err(Error::InvalidPath(format!("path is not simple at {}", n.vertices[h].id)));
        }
        seen.push(h);
    }
    let (a, b) = (seen[0], *seen.last().expect("nonempty"));
    if n.vertices[a].kind != VertexKind::Source || n.vertices[b].kind != VertexKind::Sink {
        return Err(Error::InvalidPath("path must run from a source to a sink".into()));
    }
    Ok((labels.label_of(a).expect("boundary"), labels.label_of(b).expect("boundary")))
}

/// Reverses every edge of a simple source-to-sink path and inverts its
/// weight; the endpoints trade roles.
pub fn reverse_path(n: &Network, path: &[usize]) -> Result<Network> {
    let labels = label_boundary(n);
    path_ends(n, &labels, path)?;
    let mut out = n.clone();
    for &e in path {
        let edge = &mut out.edges[e];
        let w = match &edge.weight {
            Weight::Value(v) => v.inv().ok_or_else(|| Error::ZeroWeight(edge.id.clone()))?,
            Weight::Symbol(s) => return Err(Error::UnboundSymbol(s.clone())),
        };
        edge.weight = Weight::Value(w);
        std::mem::swap(&mut edge.tail, &mut edge.head);
        edge.polyline = edge.polyline.reversed();
    }
    let (a, b) = (n.edges[path[0]].tail, n.edges[*path.last().expect("nonempty")].head);
    out.vertices[a].kind = VertexKind::Sink;
    out.vertices[b].kind = VertexKind::Source;
    let problems = validate(&out);
    if !problems.is_empty() {
        return Err(Error::InvalidNetwork(problems));
    }
    Ok(out)
}

/// The same path in the reversed network, as edge indices from its new
/// source.
pub fn reversed_path(path: &[usize]) -> Vec<usize> {
    path.iter().rev().copied().collect()
}

/// Whether no edge of the path touches the cut at all.
pub fn path_avoids_cut(n: &Network, path: &[usize]) -> bool {
    path.iter().all(|&e| {
        n.edges[e]
            .polyline
            .segments()
            .all(|(a, b)| n.cut.segments().all(|(c, d)| segment_crossing(a, b, c, d) == Crossing::None))
    })
}

/// Endpoints of a reversed path and the sign `t^P`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct PathReversal {
    pub source: usize,
    pub sink: usize,
    /// `1` when both ends lie on one circle, else `-1`
    pub t_sign: i8,
}

impl PathReversal {
    pub fn new(n: &Network, path: &[usize]) -> Result<Self> {
        let labels = label_boundary(n);
        let (i, j) = path_ends(n, &labels, path)?;
        let t_sign = if labels.circle(i) == labels.circle(j) { 1 } else { -1 };
        Ok(PathReversal { source: i, sink: j, t_sign })
    }

    /// `S_{t^P}` on a point.
    pub fn apply(&self, t: &Scalar) -> Scalar {
        if self.t_sign < 0 {
            -t.clone()
        } else {
            t.clone()
        }
    }
}

fn checked_reversal(n: &Network, path: &[usize]) -> Result<(PathReversal, Network)> {
    let rec = PathReversal::new(n, path)?;
    if !path_avoids_cut(n, path) {
        return Err(Error::Precondition("path meets the cut".into()));
    }
    let m = measurement_matrix(n)?;
    let mij = m.get(rec.source, rec.sink).expect("endpoints are a source and a sink");
    if Field::is_zero(mij) {
        return Err(Error::Precondition(format!("M({}, {}) vanishes identically", rec.source, rec.sink)));
    }
    Ok((rec, reverse_path(n, path)?))
}

/// One instance of `S(x_K) · M^P(j, i) = x^P_K` at a point.
#[derive(Clone, Debug, Serialize)]
pub struct PathrevOutcome {
    pub k_set: Vec<usize>,
    pub t_sign: i8,
    pub lhs: String,
    pub rhs: String,
    pub pass: bool,
}

fn extended_at(n: &Network, t: &Scalar) -> Result<(BoundaryLabeling, Matrix<Scalar>)> {
    let data = LocalData::new(n)?;
    let w = nonzero_weights(n)?;
    let m = crate::measurement::eliminate(
        &data,
        &crate::measurement::modified_weights(&data, &w, t)?,
        crate::measurement::Order::Natural,
    )?;
    let l = data.labels;
    let x = extend(&l.sources, &l.sinks, l.n(), &m, true);
    Ok((l, x))
}

fn minor(x: &Matrix<Scalar>, k_set: &[usize]) -> Result<Scalar> {
    let cols = columns(k_set, x.rows(), x.cols())?;
    let rows: Vec<usize> = (0..x.rows()).collect();
    x.select(&rows, &cols).det()
}

/// Path-reversal identity for each listed `K` at `t0`.
pub fn check_pathrev(
    n: &Network,
    path: &[usize],
    k_sets: &[Vec<usize>],
    t0: &Scalar,
    exec: Exec,
) -> Result<Vec<PathrevOutcome>> {
    let (rec, np) = checked_reversal(n, path)?;
    let (_, x) = extended_at(n, &rec.apply(t0))?;
    let (lp, xp) = extended_at(&np, t0)?;
    let r = lp.source_row(rec.sink).expect("reversed source");
    let c = lp.sink_col(rec.source).expect("reversed sink");
    let m_ji = crate::measurement::measurement_at(&np, t0)?.get(r, c).clone();
    par::map(exec, k_sets.to_vec(), |k| {
        let lhs = minor(&x, &k)? * m_ji.clone();
        let rhs = minor(&xp, &k)?;
        Ok(PathrevOutcome {
            k_set: k,
            t_sign: rec.t_sign,
            pass: lhs == rhs,
            lhs: fmt_scalar(&lhs),
            rhs: fmt_scalar(&rhs),
        })
    })
    .into_iter()
    .collect()
}

/// `x_num / x_den` on the Grassmannian.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct PluckerRatio {
    pub num: Vec<usize>,
    pub den: Vec<usize>,
}

/// Value and logarithmic edge derivatives of Plücker ratios at one point.
struct RatioJets {
    x: Matrix<Scalar>,
    dx: Vec<Matrix<Scalar>>,
}

impl RatioJets {
    fn new(n: &Network, t: &Scalar, exec: Exec) -> Result<Self> {
        let data = LocalData::new(n)?;
        let w = nonzero_weights(n)?;
        let j = jet(&data, &w, t, exec)?;
        let l = &data.labels;
        let x = extend(&l.sources, &l.sinks, l.n(), &j.value, true);
        let dx = j.log_derivs.iter().map(|d| extend(&l.sources, &l.sinks, l.n(), d, false)).collect();
        Ok(RatioJets { x, dx })
    }

    /// `(x_K, D_e x_K for each e)`, using multilinearity of the determinant
    /// in the columns.
    fn minor_jet(&self, k_set: &[usize]) -> Result<(Scalar, Vec<Scalar>)> {
        let cols = columns(k_set, self.x.rows(), self.x.cols())?;
        let rows: Vec<usize> = (0..self.x.rows()).collect();
        let base = self.x.select(&rows, &cols);
        let value = base.det()?;
        let derivs = self
            .dx
            .iter()
            .map(|d| {
                let dm = d.select(&rows, &cols);
                let mut acc = Scalar::zero();
                for c in 0..cols.len() {
                    let mut m = base.clone();
                    for r in 0..rows.len() {
                        m.set(r, c, dm.get(r, c).clone());
                    }
                    acc += m.det()?;
                }
                Ok(acc)
            })
            .collect::<Result<_>>()?;
        Ok((value, derivs))
    }

    fn ratio_jet(&self, f: &PluckerRatio) -> Result<Vec<Scalar>> {
        let (a, da) = self.minor_jet(&f.num)?;
        let (b, db) = self.minor_jet(&f.den)?;
        let bi = b.inv().ok_or(Error::Pole)?;
        let r = a * bi.clone();
        Ok(da.into_iter().zip(db).map(|(x, y)| bi.clone() * (x - r.clone() * y)).collect())
    }
}

fn ratio_bracket(
    n: &Network,
    params: &PoissonParams,
    f: &PluckerRatio,
    g: &PluckerRatio,
    t: &Scalar,
    s: &Scalar,
    exec: Exec,
) -> Result<Scalar> {
    let df = RatioJets::new(n, t, exec)?.ratio_jet(f)?;
    let dg = RatioJets::new(n, s, exec)?.ratio_jet(g)?;
    let mut acc = Scalar::zero();
    for (e, h, c) in edge_bracket(n, params) {
        acc += c * (df[e].clone() * dg[h].clone() - df[h].clone() * dg[e].clone());
    }
    Ok(acc)
}

#[derive(Clone, Debug, Serialize)]
pub struct ChartOutcome {
    pub t_sign: i8,
    /// `{f(S t), g(S s)}` through the original network
    pub original: String,
    /// `{f(t), g(s)}` through the reversed network
    pub reversed: String,
    pub pass: bool,
}

/// Bracket of two Plücker ratios computed in `n` and in its reversal along
/// `path`, which sit in the charts `I` and `I(i → j)`.
#[allow(clippy::too_many_arguments)]
pub fn chart_consistency(
    n: &Network,
    path: &[usize],
    params: &PoissonParams,
    f: &PluckerRatio,
    g: &PluckerRatio,
    t: &Scalar,
    s: &Scalar,
    exec: Exec,
) -> Result<ChartOutcome> {
    let (rec, np) = checked_reversal(n, path)?;
    let a = ratio_bracket(n, params, f, g, &rec.apply(t), &rec.apply(s), exec)?;
    let b = ratio_bracket(&np, params, f, g, t, s, exec)?;
    Ok(ChartOutcome { t_sign: rec.t_sign, pass: a == b, original: fmt_scalar(&a), reversed: fmt_scalar(&b) })
}

/// Simple source-to-sink paths avoiding the cut, up to `limit` of them.
pub fn cut_free_paths(n: &Network, limit: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut stack: Vec<Vec<usize>> = (0..n.edges.len())
        .filter(|&e| n.vertices[n.edges[e].tail].kind == VertexKind::Source)
        .map(|e| vec![e])
        .collect();
    while let Some(p) = stack.pop() {
        if out.len() == limit {
            break;
        }
        if !path_avoids_cut(n, &p) {
            continue;
        }
        let head = n.edges[*p.last().expect("nonempty")].head;
        if n.vertices[head].kind == VertexKind::Sink {
            out.push(p);
            continue;
        }
        for e in n.out_edges(head) {
            let h = n.edges[e].head;
            if p.iter().any(|&x| n.edges[x].tail == h) {
                continue;
            }
            let mut q = p.clone();
            q.push(e);
            stack.push(q);
        }
    }
    out
}
