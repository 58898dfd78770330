//! Boundary measurements: exact elimination, single path weights and the
//! truncated path series.

mod eliminate;
mod local;
mod paths;

use serde::Serialize;

pub use eliminate::{eliminate, modified_weights, Order};
pub use local::LocalData;
pub use paths::{
    cut_move_path_factor, cycle_decompose_check_over, cycle_weight_over, enumerate_paths, parse_path,
    path_sign_and_power, path_weight_over, rescaled_for_series, series_oracle, series_terms, split_first_repeat,
    PathSeriesTerm,
};

use crate::arith::{Field, MPoly, Matrix, RatLambda, Scalar, SymFrac};
use crate::error::{Error, Result};
use crate::geometry::Circle;
use crate::network::{Network, VertexKind, Weight};
use crate::par::{self, Exec};

/// Boundary measurement matrix with rows indexed by source labels and
/// columns by sink labels, both increasing.
#[derive(Clone, PartialEq, Debug)]
pub struct MeasurementMatrix<F: Field = RatLambda> {
    pub sources: Vec<usize>,
    pub sinks: Vec<usize>,
    pub n1: usize,
    pub entries: Matrix<F>,
}

impl<F: Field> MeasurementMatrix<F> {
    pub fn k1(&self) -> usize {
        self.sources.iter().filter(|&&i| i <= self.n1).count()
    }

    pub fn m1(&self) -> usize {
        self.sinks.iter().filter(|&&j| j <= self.n1).count()
    }

    /// `M(i, j)` for a source label `i` and sink label `j`.
    pub fn get(&self, i: usize, j: usize) -> Option<&F> {
        let r = self.sources.iter().position(|&x| x == i)?;
        let c = self.sinks.iter().position(|&x| x == j)?;
        Some(self.entries.get(r, c))
    }

    /// The blocks `M1, M2, M3, M4` split by circle.
    pub fn blocks(&self) -> [Matrix<F>; 4] {
        let (k, m) = (self.sources.len(), self.sinks.len());
        let (k1, m1) = (self.k1(), self.m1());
        let r1: Vec<usize> = (0..k1).collect();
        let r2: Vec<usize> = (k1..k).collect();
        let c1: Vec<usize> = (0..m1).collect();
        let c2: Vec<usize> = (m1..m).collect();
        [
            self.entries.select(&r1, &c1),
            self.entries.select(&r1, &c2),
            self.entries.select(&r2, &c1),
            self.entries.select(&r2, &c2),
        ]
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> MeasurementMatrix<G> {
        MeasurementMatrix {
            sources: self.sources.clone(),
            sinks: self.sinks.clone(),
            n1: self.n1,
            entries: self.entries.map(f),
        }
    }
}

/// Measurement matrix over any field, given weights and the value of `λ`.
pub fn measurement_matrix_over<F: Field>(
    data: &LocalData,
    w: &[F],
    lambda: &F,
    order: Order,
) -> Result<MeasurementMatrix<F>> {
    let a = modified_weights(data, w, lambda)?;
    Ok(MeasurementMatrix {
        sources: data.labels.sources.clone(),
        sinks: data.labels.sinks.clone(),
        n1: data.labels.n1,
        entries: eliminate(data, &a, order)?,
    })
}

fn lifted(n: &Network) -> Result<Vec<RatLambda>> {
    Ok(n.numeric_weights()?.iter().map(RatLambda::from_scalar).collect())
}

pub fn measurement_matrix(n: &Network) -> Result<MeasurementMatrix> {
    measurement_matrix_with(n, Order::Natural)
}

pub fn measurement_matrix_with(n: &Network, order: Order) -> Result<MeasurementMatrix> {
    let data = LocalData::new(n)?;
    measurement_matrix_over(&data, &lifted(n)?, &RatLambda::lambda(), order)
}

/// `M(i, j)` for labels `i` (a source) and `j` (a sink).
pub fn boundary_measurement(n: &Network, i: usize, j: usize) -> Result<RatLambda> {
    let m = measurement_matrix(n)?;
    let bad = |l: usize, what: &str| Error::Precondition(format!("b{l} is not a {what}"));
    if !m.sources.contains(&i) {
        return Err(bad(i, "source"));
    }
    m.get(i, j).cloned().ok_or_else(|| bad(j, "sink"))
}

/// Matrix evaluated at `λ = t` without forming rational functions.
pub fn measurement_at(n: &Network, t: &Scalar) -> Result<Matrix<Scalar>> {
    let data = LocalData::new(n)?;
    Ok(measurement_matrix_over(&data, &n.numeric_weights()?, t, Order::Natural)?.entries)
}

/// Multivariate weights: variable 0 is `λ`, then one variable per symbol.
pub struct Symbolic {
    pub names: Vec<String>,
    pub weights: Vec<SymFrac>,
}

impl Symbolic {
    pub fn new(n: &Network) -> Self {
        let syms = n.symbols();
        let weights = n
            .edges
            .iter()
            .map(|e| match &e.weight {
                Weight::Value(v) => SymFrac::from_poly(MPoly::constant(v.clone())),
                Weight::Symbol(s) => SymFrac::var(1 + syms.iter().position(|x| x == s).expect("listed")),
            })
            .collect();
        let mut names = vec!["λ".to_string()];
        names.extend(syms);
        Symbolic { names, weights }
    }

    pub fn lambda(&self) -> SymFrac {
        SymFrac::var(0)
    }

    pub fn format(&self, f: &SymFrac) -> String {
        f.format(&self.names)
    }
}

/// Measurement matrix with symbolic weights kept as variables.
pub fn symbolic_matrix(n: &Network) -> Result<(MeasurementMatrix<SymFrac>, Symbolic)> {
    let data = LocalData::new(n)?;
    let s = Symbolic::new(n);
    let m = measurement_matrix_over(&data, &s.weights, &s.lambda(), Order::Natural)?;
    Ok((m, s))
}

/// Path weight as a rational function of `λ`; numeric weights required.
pub fn path_weight(n: &Network, ids: &[String]) -> Result<RatLambda> {
    let p = parse_path(n, ids)?;
    path_weight_over(n, &p, &lifted(n)?, &RatLambda::lambda())
}

/// Path weight with symbolic weights kept as variables.
pub fn path_weight_symbolic(n: &Network, ids: &[String]) -> Result<(SymFrac, Symbolic)> {
    let p = parse_path(n, ids)?;
    let s = Symbolic::new(n);
    let v = path_weight_over(n, &p, &s.weights, &s.lambda())?;
    Ok((v, s))
}

/// Checks `w_P = -w_{P'} w_{C^0}` at the first repeated edge, with every
/// edge weight treated as an independent variable.
pub fn cycle_decompose_check(n: &Network, ids: &[String]) -> Result<bool> {
    let p = parse_path(n, ids)?;
    let s = Symbolic::new(n);
    let vars: Vec<SymFrac> = (0..n.edges.len()).map(|e| SymFrac::var(e + 1)).collect();
    cycle_decompose_check_over(n, &p, &vars, &s.lambda())
}

/// Compares `w'_P` with [`cut_move_path_factor`] `· w_P` on every path of at
/// most `maxlen` edges between boundary vertices. Both networks share the
/// edge weights, so only the sign and the power of `λ` are compared.
/// Returns (paths checked, paths agreeing).
pub fn cut_move_path_check(n: &Network, which: Circle, maxlen: usize) -> Result<(usize, usize)> {
    let moved = crate::network::move_cut_base(n, which)?;
    let unit = |(sign, k): (i8, i64)| RatLambda::laurent_monomial(Scalar::from_int(sign as i64), k);
    let sinks: Vec<usize> = (0..n.vertices.len()).filter(|&v| n.vertices[v].kind == VertexKind::Sink).collect();
    let (mut checked, mut agree) = (0, 0);
    for v in (0..n.vertices.len()).filter(|&v| n.vertices[v].kind == VertexKind::Source) {
        for start in n.out_edges(v) {
            for &t in &sinks {
                for p in enumerate_paths(n, start, t, maxlen) {
                    let before = unit(path_sign_and_power(n, &p)?);
                    let after = unit(path_sign_and_power(&moved, &p)?);
                    checked += 1;
                    agree += (after == cut_move_path_factor(n, which, &p)? * before) as usize;
                }
            }
        }
    }
    Ok((checked, agree))
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleRow {
    pub maxlen: usize,
    pub partial: String,
    pub exact: String,
    pub error: String,
}

/// Partial sums of the series for `maxlen = 1..=max` against the exact
/// value at `t`, computed in parallel over lengths.
pub fn oracle_table(n: &Network, i: usize, j: usize, max: usize, t: &Scalar, exec: Exec) -> Result<Vec<OracleRow>> {
    let exact = boundary_measurement(n, i, j)?.eval(t)?;
    let rows = par::map(exec, (1..=max).collect(), |l| series_oracle(n, i, j, l, t).map(|p| (l, p)));
    rows.into_iter()
        .map(|r| {
            let (l, p) = r?;
            let err = &exact - &p;
            Ok(OracleRow {
                maxlen: l,
                partial: crate::arith::fmt_scalar(&p),
                exact: crate::arith::fmt_scalar(&exact),
                error: crate::arith::fmt_scalar(&err),
            })
        })
        .collect()
}

/// `Λ+` (`sign = 1`) or `Λ-` (`sign = -1`) of the given size.
pub fn lambda_shift(size: usize, sign: i64) -> Matrix<RatLambda> {
    Matrix::from_fn(size, size, |r, c| {
        if c == r + 1 {
            RatLambda::one()
        } else if r + 1 == size && c == 0 {
            RatLambda::laurent_monomial(Scalar::from_int(sign), -1)
        } else {
            RatLambda::zero()
        }
    })
}

/// Inverse of [`lambda_shift`].
pub fn lambda_shift_inv(size: usize, sign: i64) -> Matrix<RatLambda> {
    Matrix::from_fn(size, size, |r, c| {
        if r == c + 1 {
            RatLambda::one()
        } else if r == 0 && c + 1 == size {
            RatLambda::laurent_monomial(Scalar::from_int(sign), 1)
        } else {
            RatLambda::zero()
        }
    })
}

fn assemble(b: [Matrix<RatLambda>; 4], k1: usize, m1: usize, k: usize, m: usize) -> Matrix<RatLambda> {
    Matrix::from_fn(k, m, |r, c| match (r < k1, c < m1) {
        (true, true) => b[0].get(r, c).clone(),
        (true, false) => b[1].get(r, c - m1).clone(),
        (false, true) => b[2].get(r - k1, c).clone(),
        (false, false) => b[3].get(r - k1, c - m1).clone(),
    })
}

/// Predicted matrix after moving the cut base on `which` circle past the
/// adjacent boundary vertex (`b_1` on the outer circle, `b_n` on the inner
/// one), by conjugation with `Λ±`.
pub fn cut_move_rule(m: &MeasurementMatrix, which: crate::geometry::Circle) -> Result<MeasurementMatrix> {
    use crate::geometry::Circle;
    let n = m.sources.len() + m.sinks.len();
    let (k, mm) = (m.sources.len(), m.sinks.len());
    let (k1, m1) = (m.k1(), m.m1());
    let (k2, m2) = (k - k1, mm - m1);
    let [b1, b2, b3, b4] = m.blocks();
    let relabel = |l: usize| -> usize {
        match which {
            Circle::Outer if l <= m.n1 => {
                if l == 1 {
                    m.n1
                } else {
                    l - 1
                }
            }
            Circle::Inner if l > m.n1 => {
                if l == n {
                    m.n1 + 1
                } else {
                    l + 1
                }
            }
            _ => l,
        }
    };
    let empty = || Error::Precondition("no boundary vertex on that circle".into());
    let blocks = match which {
        Circle::Outer => {
            if m.n1 == 0 {
                return Err(empty());
            }
            if m.sources.contains(&1) {
                [lambda_shift(k1, 1).mul(&b1)?, lambda_shift(k1, -1).mul(&b2)?, b3, b4]
            } else {
                [b1.mul(&lambda_shift_inv(m1, 1))?, b2, b3.mul(&lambda_shift_inv(m1, -1))?, b4]
            }
        }
        Circle::Inner => {
            if m.n1 == n {
                return Err(empty());
            }
            if m.sources.contains(&n) {
                [b1, b2, lambda_shift(k2, -1).transpose().mul(&b3)?, lambda_shift(k2, 1).transpose().mul(&b4)?]
            } else {
                [b1, b2.mul(&lambda_shift_inv(m2, -1).transpose())?, b3, b4.mul(&lambda_shift_inv(m2, 1).transpose())?]
            }
        }
    };
    let mut sources: Vec<usize> = m.sources.iter().map(|&l| relabel(l)).collect();
    let mut sinks: Vec<usize> = m.sinks.iter().map(|&l| relabel(l)).collect();
    sources.sort_unstable();
    sinks.sort_unstable();
    Ok(MeasurementMatrix { sources, sinks, n1: m.n1, entries: assemble(blocks, k1, m1, k, mm) })
}
