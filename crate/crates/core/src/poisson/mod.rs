//! Universal vertex brackets on flag variables and their pushforward to edge
//! weights, face weights and boundary measurements.

mod faces;
mod reduce;
mod reference;
mod sklyanin;

use std::collections::BTreeMap;

use crate::arith::{parse_scalar, Dual, Field, Matrix, Scalar};
use crate::error::{Error, Result};
use crate::geometry::{ccw_angle_cmp, Point};
use crate::measurement::{eliminate, modified_weights, LocalData, Order};
use crate::network::{nonzero_weights, Network, VertexKind};
use crate::par::{self, Exec};

pub use faces::{face_bracket, FaceBracket, FlagContribution};
pub use reduce::{
    psre2_check, psre_check, reduce_case, reduce_case_where, reduced_values, transported_reference, CheckOutcome,
    Checker, Formula, ReducedValues, Reduction, Transform,
};
pub use reference::{
    classify, classify_all, psre2_alternate, psre2_reference, psre_reference, BracketCase, CaseTag, Family, PairValues,
};
pub use sklyanin::{sklyanin_check, sklyanin_reference, RMatrixSpec, SklyaninOutcome};

/// The six constants of the universal bracket at white (`a`) and black (`b`)
/// vertices.
#[derive(Clone, PartialEq, Debug)]
pub struct PoissonParams {
    pub a12: Scalar,
    pub a13: Scalar,
    pub a23: Scalar,
    pub b12: Scalar,
    pub b13: Scalar,
    pub b23: Scalar,
}

impl PoissonParams {
    pub fn new(v: [Scalar; 6]) -> Self {
        let [a12, a13, a23, b12, b13, b23] = v;
        PoissonParams { a12, a13, a23, b12, b13, b23 }
    }

    /// Only `{x², x³}` is nonzero, with the given constants.
    pub fn two(alpha: Scalar, beta: Scalar) -> Self {
        let z = Scalar::zero();
        PoissonParams::new([z.clone(), z.clone(), alpha, z.clone(), z, beta])
    }

    /// `α = -β = 1`.
    pub fn poi1() -> Self {
        Self::two(Scalar::one(), -Scalar::one())
    }

    /// `α = β = 1`.
    pub fn poi2() -> Self {
        Self::two(Scalar::one(), Scalar::one())
    }

    /// Comma-separated `a12,a13,a23,b12,b13,b23`.
    pub fn parse(s: &str) -> Result<Self> {
        let v: Vec<Scalar> = s.split(',').map(|x| parse_scalar(x.trim())).collect::<Result<_>>()?;
        let arr: [Scalar; 6] =
            v.try_into().map_err(|_| Error::Parse("expected six comma-separated parameters".into()))?;
        Ok(Self::new(arr))
    }

    pub fn alpha(&self) -> Scalar {
        self.a23.clone() + self.a13.clone() - self.a12.clone()
    }

    pub fn beta(&self) -> Scalar {
        self.b23.clone() + self.b13.clone() - self.b12.clone()
    }

    /// `c` in `{x^i, x^j} = c x^i x^j` at a vertex of the given color.
    pub fn coefficient(&self, kind: VertexKind, i: u8, j: u8) -> Scalar {
        let (c12, c13, c23) = match kind {
            VertexKind::White => (&self.a12, &self.a13, &self.a23),
            VertexKind::Black => (&self.b12, &self.b13, &self.b23),
            _ => return Scalar::zero(),
        };
        match (i, j) {
            (1, 2) => c12.clone(),
            (1, 3) => c13.clone(),
            (2, 3) => c23.clone(),
            (2, 1) => -c12.clone(),
            (3, 1) => -c13.clone(),
            (3, 2) => -c23.clone(),
            _ => Scalar::zero(),
        }
    }
}

/// A vertex together with the local coordinate labelling one incident edge.
/// Boundary vertices carry the single index 1.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Flag {
    pub vertex: usize,
    pub index: u8,
}

fn departure(n: &Network, v: usize, e: usize) -> Point {
    let edge = &n.edges[e];
    let d = edge.polyline.directions();
    if edge.tail == v {
        d[0].clone()
    } else {
        d[d.len() - 1].neg()
    }
}

/// Local index of the flag `(v, e)`. The distinguished edge (the incoming
/// one at a white vertex, the outgoing one at a black vertex) is 1; going
/// counterclockwise from it come 3 and then 2.
pub fn flag_index(n: &Network, v: usize, e: usize) -> u8 {
    let kind = n.vertices[v].kind;
    if kind.is_boundary() {
        return 1;
    }
    let special = if kind == VertexKind::White { n.in_edges(v)[0] } else { n.out_edges(v)[0] };
    if e == special {
        return 1;
    }
    let others: Vec<usize> = n
        .edges
        .iter()
        .enumerate()
        .filter(|(i, x)| *i != special && (x.tail == v || x.head == v))
        .map(|(i, _)| i)
        .collect();
    let base = departure(n, v, special);
    let (a, b) = (departure(n, v, others[0]), departure(n, v, others[1]));
    let first = if ccw_angle_cmp(&base, &a, &b).is_lt() { others[0] } else { others[1] };
    if e == first {
        3
    } else {
        2
    }
}

/// The flags at the tail and at the head of an edge.
pub fn edge_flags(n: &Network, e: usize) -> (Flag, Flag) {
    let edge = &n.edges[e];
    (
        Flag { vertex: edge.tail, index: flag_index(n, edge.tail, e) },
        Flag { vertex: edge.head, index: flag_index(n, edge.head, e) },
    )
}

/// Values of all flag coordinates.
#[derive(Clone, PartialEq, Debug)]
pub struct FlagAssignment {
    pub values: BTreeMap<Flag, Scalar>,
}

impl FlagAssignment {
    /// Puts each edge weight on its tail flag and 1 on its head flag.
    pub fn from_weights(n: &Network) -> Result<Self> {
        let w = nonzero_weights(n)?;
        let mut values = BTreeMap::new();
        for (e, we) in w.into_iter().enumerate() {
            let (t, h) = edge_flags(n, e);
            values.insert(t, we);
            values.insert(h, Scalar::one());
        }
        Ok(FlagAssignment { values })
    }

    pub fn value(&self, f: &Flag) -> Result<&Scalar> {
        self.values.get(f).ok_or_else(|| Error::Precondition(format!("no value for flag {f:?}")))
    }

    /// `w_e = x_tail · x_head` for every edge.
    pub fn edge_weights(&self, n: &Network) -> Result<Vec<Scalar>> {
        (0..n.edges.len())
            .map(|e| {
                let (t, h) = edge_flags(n, e);
                Ok(self.value(&t)?.clone() * self.value(&h)?.clone())
            })
            .collect()
    }
}

pub fn flag_bracket(n: &Network, params: &PoissonParams, f1: &Flag, f2: &Flag, fa: &FlagAssignment) -> Result<Scalar> {
    if f1.vertex != f2.vertex {
        return Ok(Scalar::zero());
    }
    let c = params.coefficient(n.vertices[f1.vertex].kind, f1.index, f2.index);
    Ok(c * fa.value(f1)?.clone() * fa.value(f2)?.clone())
}

/// Constants `c_ef` with `{w_e, w_f} = c_ef w_e w_f`, listed for `e < f`.
pub fn edge_bracket(n: &Network, params: &PoissonParams) -> Vec<(usize, usize, Scalar)> {
    let mut acc: BTreeMap<(usize, usize), Scalar> = BTreeMap::new();
    for v in 0..n.vertices.len() {
        let kind = n.vertices[v].kind;
        if kind.is_boundary() {
            continue;
        }
        let inc: Vec<(usize, u8)> = n
            .edges
            .iter()
            .enumerate()
            .filter(|(_, x)| x.tail == v || x.head == v)
            .map(|(e, _)| (e, flag_index(n, v, e)))
            .collect();
        for &(e, i) in &inc {
            for &(f, j) in &inc {
                if e < f {
                    let c = params.coefficient(kind, i, j);
                    let slot = acc.entry((e, f)).or_insert_with(Scalar::zero);
                    *slot = slot.clone() + c;
                }
            }
        }
    }
    acc.into_iter().filter(|(_, c)| !Field::is_zero(c)).map(|((e, f), c)| (e, f, c)).collect()
}

/// Measurement matrix at one point together with its logarithmic
/// derivatives `w_e ∂M/∂w_e`, one matrix per edge.
#[derive(Clone, Debug)]
pub struct Jet {
    pub value: Matrix<Scalar>,
    pub log_derivs: Vec<Matrix<Scalar>>,
}

pub(crate) fn jet(data: &LocalData, w: &[Scalar], t: &Scalar, exec: Exec) -> Result<Jet> {
    let value = eliminate(data, &modified_weights(data, w, t)?, Order::Natural)?;
    let lambda = Dual::constant(t.clone());
    let derivs = par::map(exec, (0..w.len()).collect(), |e| {
        let wd: Vec<Dual<Scalar>> = w
            .iter()
            .enumerate()
            .map(|(i, x)| if i == e { Dual::new(x.clone(), x.clone()) } else { Dual::constant(x.clone()) })
            .collect();
        let m = eliminate(data, &modified_weights(data, &wd, &lambda)?, Order::Natural)?;
        Ok(m.map(|d| d.deriv.clone()))
    });
    Ok(Jet { value, log_derivs: derivs.into_iter().collect::<Result<_>>()? })
}

/// Everything needed for brackets between entries at `t` and at `s`.
#[derive(Clone, Debug)]
pub struct BracketData {
    pub sources: Vec<usize>,
    pub sinks: Vec<usize>,
    pub coefficients: Vec<(usize, usize, Scalar)>,
    pub at_t: Jet,
    pub at_s: Jet,
}

impl BracketData {
    pub fn new(n: &Network, params: &PoissonParams, t: &Scalar, s: &Scalar, exec: Exec) -> Result<Self> {
        let data = LocalData::new(n)?;
        let w = nonzero_weights(n)?;
        let at_t = jet(&data, &w, t, exec)?;
        let at_s = if s == t { at_t.clone() } else { jet(&data, &w, s, exec)? };
        Ok(BracketData {
            sources: data.labels.sources.clone(),
            sinks: data.labels.sinks.clone(),
            coefficients: edge_bracket(n, params),
            at_t,
            at_s,
        })
    }

    fn cell(&self, i: usize, j: usize) -> Result<(usize, usize)> {
        let r = self.sources.iter().position(|&x| x == i);
        let c = self.sinks.iter().position(|&x| x == j);
        match (r, c) {
            (Some(r), Some(c)) => Ok((r, c)),
            _ => Err(Error::Precondition(format!("({i}, {j}) is not a source/sink pair"))),
        }
    }

    /// `{M_{ij}(t), M_{i'j'}(s)}` for labels `(i, j)` and `(i', j')`.
    pub fn bracket(&self, a: (usize, usize), b: (usize, usize)) -> Result<Scalar> {
        let (ra, ca) = self.cell(a.0, a.1)?;
        let (rb, cb) = self.cell(b.0, b.1)?;
        let dt = |e: usize| self.at_t.log_derivs[e].get(ra, ca);
        let ds = |e: usize| self.at_s.log_derivs[e].get(rb, cb);
        let mut acc = Scalar::zero();
        for (e, f, c) in &self.coefficients {
            let term = dt(*e).clone() * ds(*f).clone() - dt(*f).clone() * ds(*e).clone();
            acc += c.clone() * term;
        }
        Ok(acc)
    }
}

/// Chain-rule bracket `{M_{ij}(t), M_{i'j'}(s)}` of two boundary measurements.
pub fn measurement_bracket(
    n: &Network,
    params: &PoissonParams,
    a: (usize, usize),
    b: (usize, usize),
    t: &Scalar,
    s: &Scalar,
) -> Result<Scalar> {
    BracketData::new(n, params, t, s, Exec::Auto)?.bracket(a, b)
}
