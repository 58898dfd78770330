//! Bringing a quadruple of labels into a closed-form case by relabeling moves:
//! moving a base point of the cut, reversing the cut, and reversing the
//! orientation. Only the labels and the induced changes of the measurement
//! functions are tracked; the drawing is never rebuilt.

use std::collections::BTreeMap;

use serde::Serialize;

use super::reference::{
    classify_all, psre2_alternate, psre2_reference, psre_reference, BracketCase, CaseTag, Family, PairValues,
};
use super::{BracketData, PoissonParams};
use crate::arith::{Field, RatLambda, Scalar};
use crate::error::{Error, Result};
use crate::measurement::{measurement_matrix, MeasurementMatrix};
use crate::network::{label_boundary, BoundaryLabeling, Network};
use crate::par::Exec;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum Transform {
    MoveOuter,
    MoveInner,
    ReverseCut,
    ReverseOrientation,
}

/// A source/sink pair by original labels.
type Pair = (usize, usize);

/// Labels after some transforms. A tracked entry becomes
/// `M'(u) = sign · u^power · M(φ(u))`, with `φ` the identity or inversion.
#[derive(Clone, Debug)]
struct Frame {
    /// `order[l - 1]` is the original label now carrying label `l`
    order: Vec<usize>,
    n1: usize,
    factor: BTreeMap<Pair, (i8, i64)>,
    inverted: bool,
    eps: i8,
}

impl Frame {
    fn current(&self, orig: usize) -> usize {
        self.order.iter().position(|&x| x == orig).unwrap() + 1
    }

    fn n(&self) -> usize {
        self.order.len()
    }

    fn outer(&self, orig: usize) -> bool {
        self.current(orig) <= self.n1
    }

    fn pass(&mut self, passed: usize) {
        let keys: Vec<Pair> = self.factor.keys().copied().collect();
        for (i, j) in keys {
            let beta = if passed == j {
                1
            } else if passed == i {
                -1
            } else {
                0
            };
            if beta == 0 {
                continue;
            }
            let cross = self.outer(i) != self.outer(j);
            let f = self.factor.get_mut(&(i, j)).unwrap();
            if cross {
                f.0 = -f.0;
            }
            f.1 += beta;
        }
    }

    fn apply(&mut self, t: Transform) -> Result<()> {
        let (n, n1) = (self.n(), self.n1);
        match t {
            Transform::MoveOuter => {
                if n1 == 0 {
                    return Err(Error::Precondition("no outer boundary vertex".into()));
                }
                self.pass(self.order[0]);
                let first = self.order.remove(0);
                self.order.insert(n1 - 1, first);
            }
            Transform::MoveInner => {
                if n1 == n {
                    return Err(Error::Precondition("no inner boundary vertex".into()));
                }
                self.pass(self.order[n - 1]);
                let last = self.order.pop().unwrap();
                self.order.insert(n1, last);
            }
            Transform::ReverseCut | Transform::ReverseOrientation => {
                let (outer, inner) = self.order.split_at(n1);
                if t == Transform::ReverseCut {
                    self.order = inner.iter().chain(outer).copied().collect();
                    self.n1 = n - n1;
                } else {
                    self.order = outer.iter().rev().chain(inner.iter().rev()).copied().collect();
                    self.eps = -self.eps;
                }
                for f in self.factor.values_mut() {
                    f.1 = -f.1;
                }
                self.inverted = !self.inverted;
            }
        }
        Ok(())
    }
}

/// Transform sequence and the case reached.
#[derive(Clone, Debug, Serialize)]
pub struct Reduction {
    pub steps: Vec<Transform>,
    pub case: BracketCase,
    /// whether the two entries were exchanged (using antisymmetry)
    pub swapped: bool,
}

fn sequences(n1: usize, n2: usize) -> Vec<Vec<Transform>> {
    let mut all = Vec::new();
    for a in 0..n1.max(1) {
        for b in 0..n2.max(1) {
            for cr in 0..2 {
                for or in 0..2 {
                    let mut s = vec![Transform::MoveOuter; a];
                    s.extend(vec![Transform::MoveInner; b]);
                    if cr == 1 {
                        s.push(Transform::ReverseCut);
                    }
                    if or == 1 {
                        s.push(Transform::ReverseOrientation);
                    }
                    all.push(s);
                }
            }
        }
    }
    // stable: ties keep the generation order
    all.sort_by_key(|s| s.len());
    all
}

fn start_frame(n: usize, n1: usize, pairs: &[Pair]) -> Frame {
    Frame {
        order: (1..=n).collect(),
        n1,
        factor: pairs.iter().map(|&p| (p, (1, 0))).collect(),
        inverted: false,
        eps: 1,
    }
}

fn reduce_in(
    family: Family,
    a: Pair,
    b: Pair,
    n: usize,
    n1: usize,
    accept: &dyn Fn(&CaseTag) -> bool,
) -> Result<Option<(Vec<Transform>, BracketCase)>> {
    let pairs = [a, b, (a.0, b.1), (b.0, a.1)];
    for seq in sequences(n1, n - n1) {
        let mut fr = start_frame(n, n1, &pairs);
        for &t in &seq {
            fr.apply(t)?;
        }
        let q = (fr.current(a.0), fr.current(a.1), fr.current(b.0), fr.current(b.1));
        if let Some(&tag) = classify_all(family, q, fr.n1).iter().find(|t| accept(t)) {
            let case = BracketCase { ip: q.0, jq: q.1, ipb: q.2, jqb: q.3, n1: fr.n1, tag };
            return Ok(Some((seq, case)));
        }
    }
    Ok(None)
}

/// Finds the shortest transform sequence bringing `{M_a(t), M_b(s)}` into a
/// closed-form case, falling back to `-{M_b(s), M_a(t)}`.
pub fn reduce_case(family: Family, n: &Network, a: Pair, b: Pair) -> Result<Reduction> {
    reduce_case_where(family, &label_boundary(n), a, b, &|_| true)
}

/// As [`reduce_case`], restricted to the cases `accept` allows.
pub fn reduce_case_where(
    family: Family,
    labels: &BoundaryLabeling,
    a: Pair,
    b: Pair,
    accept: &dyn Fn(&CaseTag) -> bool,
) -> Result<Reduction> {
    let (found, swapped) = match reduce_in(family, a, b, labels.n(), labels.n1, accept)? {
        Some(x) => (x, false),
        None => match reduce_in(family, b, a, labels.n(), labels.n1, accept)? {
            Some(x) => (x, true),
            None => return Err(Error::CaseReductionFailed(format!("{family:?} {a:?} {b:?}"))),
        },
    };
    Ok(Reduction { steps: found.0, case: found.1, swapped })
}

/// Result of comparing a chain-rule bracket with its closed form.
#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub reduction: Reduction,
    pub a: Pair,
    pub b: Pair,
    #[serde(serialize_with = "ser")]
    pub t: Scalar,
    #[serde(serialize_with = "ser")]
    pub s: Scalar,
    #[serde(serialize_with = "ser")]
    pub chain_rule: Scalar,
    #[serde(serialize_with = "ser")]
    pub reference: Scalar,
    pub pass: bool,
}

pub(crate) fn ser<S: serde::Serializer>(q: &Scalar, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&crate::arith::fmt_scalar(q))
}

fn monomial(f: (i8, i64)) -> RatLambda {
    RatLambda::laurent_monomial(Scalar::from_int(f.0 as i64), f.1)
}

/// Which closed form a check compares against.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum Formula {
    Psre,
    Psre2,
    /// see [`psre2_alternate`]
    Psre2Alternate,
}

impl Formula {
    pub fn family(self) -> Family {
        match self {
            Formula::Psre => Family::Poi1,
            _ => Family::Poi2,
        }
    }

    fn eval(self, case: &BracketCase, v: &PairValues, t: &Scalar, s: &Scalar) -> Result<Scalar> {
        match self {
            Formula::Psre => psre_reference(case, v, t, s),
            Formula::Psre2 => psre2_reference(case, v, t, s),
            Formula::Psre2Alternate => psre2_alternate(case, v, t, s),
        }
    }
}

/// Entries of the reduced frame at the transported points.
#[derive(Clone, Debug)]
pub struct ReducedValues {
    pub values: PairValues,
    /// the points `(t, s)` seen in the reduced frame
    pub u: Scalar,
    pub v: Scalar,
    /// `{M_a(t), M_b(s)} = scale · {M'_a'(u), M'_b'(v)}`
    pub scale: Scalar,
}

/// Evaluates the entries a closed form needs in the frame reached by `red`.
pub fn reduced_values(
    labels: &BoundaryLabeling,
    m: &MeasurementMatrix,
    red: &Reduction,
    a: Pair,
    b: Pair,
    t: &Scalar,
    s: &Scalar,
) -> Result<ReducedValues> {
    let (a, b, t, s) = if red.swapped { (b, a, s, t) } else { (a, b, t, s) };
    let pairs = [a, b, (a.0, b.1), (b.0, a.1)];
    let mut fr = start_frame(labels.n(), labels.n1, &pairs);
    for &st in &red.steps {
        fr.apply(st)?;
    }
    let entry = |p: Pair| -> Result<RatLambda> {
        let f = m.get(p.0, p.1).ok_or_else(|| Error::Precondition(format!("({}, {}) is not a pair", p.0, p.1)))?;
        let g = if fr.inverted { f.invert_var() } else { f.clone() };
        Ok(monomial(fr.factor[&p]) * g)
    };
    let phi = |x: &Scalar| if fr.inverted { x.inv().ok_or(Error::Pole) } else { Ok(x.clone()) };
    let (u, v) = (phi(t)?, phi(s)?);
    let at = |f: &RatLambda| -> Result<[Scalar; 2]> { Ok([f.eval(&u)?, f.eval(&v)?]) };
    let (fa, fb) = (entry(a)?, entry(b)?);
    let values = PairValues {
        pq: at(&fa)?,
        pbqb: at(&fb)?,
        pqb: at(&entry((a.0, b.1))?)?,
        pbq: at(&entry((b.0, a.1))?)?,
        d_pq: at(&fa.derivative())?,
        d_pbqb: at(&fb.derivative())?,
    };
    let g = monomial(fr.factor[&a]).eval(&u)? * monomial(fr.factor[&b]).eval(&v)?;
    let scale = g.inv().ok_or(Error::Pole)?;
    let scale = if (fr.eps < 0) != red.swapped { -scale } else { scale };
    Ok(ReducedValues { values, u, v, scale })
}

/// Closed form for `{M_a(t), M_b(s)}` evaluated in the frame reached by
/// `red` and transported back to the original labels.
#[allow(clippy::too_many_arguments)]
pub fn transported_reference(
    formula: Formula,
    labels: &BoundaryLabeling,
    m: &MeasurementMatrix,
    red: &Reduction,
    a: Pair,
    b: Pair,
    t: &Scalar,
    s: &Scalar,
) -> Result<Scalar> {
    let r = reduced_values(labels, m, red, a, b, t, s)?;
    Ok(r.scale * formula.eval(&red.case, &r.values, &r.u, &r.v)?)
}

/// Compares chain-rule brackets with the closed forms of one family on a
/// fixed network and set of `(t, s)` points.
pub struct Checker {
    pub formula: Formula,
    labels: BoundaryLabeling,
    m: MeasurementMatrix,
    points: Vec<(Scalar, Scalar, BracketData)>,
}

impl Checker {
    pub fn new(formula: Formula, n: &Network, points: &[(Scalar, Scalar)], exec: Exec) -> Result<Self> {
        let params = match formula.family() {
            Family::Poi1 => PoissonParams::poi1(),
            Family::Poi2 => PoissonParams::poi2(),
        };
        let points = points
            .iter()
            .map(|(t, s)| Ok((t.clone(), s.clone(), BracketData::new(n, &params, t, s, exec)?)))
            .collect::<Result<_>>()?;
        Ok(Checker { formula, labels: label_boundary(n), m: measurement_matrix(n)?, points })
    }

    pub fn labels(&self) -> &BoundaryLabeling {
        &self.labels
    }

    pub fn measurement(&self) -> &MeasurementMatrix {
        &self.m
    }

    /// Every `(source, sink)` label pair.
    pub fn pairs(&self) -> Vec<Pair> {
        let l = &self.labels;
        l.sources.iter().flat_map(|&i| l.sinks.iter().map(move |&j| (i, j))).collect()
    }

    pub fn check(&self, a: Pair, b: Pair) -> Result<Vec<CheckOutcome>> {
        self.check_where(a, b, &|_| true)
    }

    /// Checks through the first reachable case that `accept` allows.
    pub fn check_where(&self, a: Pair, b: Pair, accept: &dyn Fn(&CaseTag) -> bool) -> Result<Vec<CheckOutcome>> {
        let red = reduce_case_where(self.formula.family(), &self.labels, a, b, accept)?;
        self.points
            .iter()
            .map(|(t, s, data)| {
                let lhs = data.bracket(a, b)?;
                let rhs = transported_reference(self.formula, &self.labels, &self.m, &red, a, b, t, s)?;
                Ok(CheckOutcome {
                    reduction: red.clone(),
                    a,
                    b,
                    t: t.clone(),
                    s: s.clone(),
                    pass: lhs == rhs,
                    chain_rule: lhs,
                    reference: rhs,
                })
            })
            .collect()
    }
}

/// Chain-rule bracket against the `α = -β = 1` closed form at each point.
pub fn psre_check(n: &Network, a: Pair, b: Pair, points: &[(Scalar, Scalar)]) -> Result<Vec<CheckOutcome>> {
    Checker::new(Formula::Psre, n, points, Exec::Auto)?.check(a, b)
}

/// Chain-rule bracket against the `α = β = 1` closed form at each point.
pub fn psre2_check(n: &Network, a: Pair, b: Pair, points: &[(Scalar, Scalar)]) -> Result<Vec<CheckOutcome>> {
    Checker::new(Formula::Psre2, n, points, Exec::Auto)?.check(a, b)
}
