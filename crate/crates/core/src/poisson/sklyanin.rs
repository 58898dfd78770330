//! The trigonometric R-matrix bracket on square matrix functions.

use super::{BracketData, PoissonParams};
use crate::arith::{Field, Matrix, Scalar};
use crate::error::{Error, Result};
use crate::network::{label_boundary, Network};
use crate::par::{self, Exec};

/// Trigonometric R-matrix acting on `R^k ⊗ R^k`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct RMatrixSpec {
    pub k: usize,
}

fn kron(a: &Matrix<Scalar>, b: &Matrix<Scalar>) -> Matrix<Scalar> {
    let (br, bc) = (b.rows(), b.cols());
    Matrix::from_fn(a.rows() * br, a.cols() * bc, |r, c| a.get(r / br, c / bc).clone() * b.get(r % br, c % bc).clone())
}

impl RMatrixSpec {
    /// `R(t, s)` with rows and columns indexed by `(a, b) ↦ a·k + b`.
    pub fn r(&self, t: &Scalar, s: &Scalar) -> Result<Matrix<Scalar>> {
        let k = self.k;
        let d = (s.clone() - t.clone()).inv().ok_or_else(|| Error::Precondition("t = s".into()))?;
        let diag = (t.clone() + s.clone()) * d.clone();
        let two = Scalar::from_int(2) * d;
        let mut r = Matrix::zeros(k * k, k * k);
        for l in 0..k {
            r.set(l * k + l, l * k + l, diag.clone());
            for m in l + 1..k {
                // E_lm ⊗ E_ml maps e_m ⊗ e_l to e_l ⊗ e_m
                r.set(l * k + m, m * k + l, two.clone() * t.clone());
                r.set(m * k + l, l * k + m, two.clone() * s.clone());
            }
        }
        Ok(r)
    }

    /// Whether `R(t, s) = -P R(s, t) P`.
    pub fn antisymmetric_at(&self, t: &Scalar, s: &Scalar) -> Result<bool> {
        let k = self.k;
        let (a, b) = (self.r(t, s)?, self.r(s, t)?);
        let swap = |i: usize| (i % k) * k + i / k;
        Ok((0..k * k).all(|i| (0..k * k).all(|j| *a.get(i, j) == -b.get(swap(i), swap(j)).clone())))
    }

    /// `[R(t, s), A(s) ⊗ A(t)]`; entry `(p·k + p̄, q·k + q̄)`.
    pub fn commutator(
        &self,
        at: &Matrix<Scalar>,
        as_: &Matrix<Scalar>,
        t: &Scalar,
        s: &Scalar,
    ) -> Result<Matrix<Scalar>> {
        let r = self.r(t, s)?;
        let x = kron(as_, at);
        let (rx, xr) = (r.mul(&x)?, x.mul(&r)?);
        Ok(Matrix::from_fn(rx.rows(), rx.cols(), |i, j| rx.get(i, j).clone() - xr.get(i, j).clone()))
    }
}

/// Entrywise form of the bracket `{a_{pq}(t), a_{p̄q̄}(s)}` for 0-based
/// indices, given `A(t)` and `A(s)`. Pairs outside the listed patterns
/// vanish.
pub fn sklyanin_reference(
    at: &Matrix<Scalar>,
    as_: &Matrix<Scalar>,
    x: (usize, usize),
    y: (usize, usize),
    t: &Scalar,
    s: &Scalar,
) -> Result<Scalar> {
    let (p, q) = x;
    let (pb, qb) = y;
    if x == y {
        return Ok(Scalar::zero());
    }
    if p > pb || (p == pb && q > qb) {
        return Ok(-sklyanin_reference(as_, at, y, x, s, t)?);
    }
    let k = (t.clone() - s.clone()).inv().ok_or_else(|| Error::Precondition("t = s".into()))?;
    let two = Scalar::from_int(2);
    let a = |m: &Matrix<Scalar>, i: usize, j: usize| m.get(i, j).clone();
    let out = if p == pb {
        (t.clone() + s.clone()) * a(as_, p, qb) * a(at, p, q) - two * s.clone() * a(at, p, qb) * a(as_, p, q)
    } else if q == qb {
        two * t.clone() * a(as_, p, q) * a(at, pb, q) - (t.clone() + s.clone()) * a(at, p, q) * a(as_, pb, q)
    } else if q < qb {
        two * (t.clone() * a(as_, p, qb) * a(at, pb, q) - s.clone() * a(at, p, qb) * a(as_, pb, q))
    } else {
        // {a_{p Q̄}(t), a_{p̄ Q}(s)} with Q = qb < Q̄ = q
        two * t.clone() * (a(as_, p, qb) * a(at, pb, q) - a(at, p, qb) * a(as_, pb, q))
    };
    Ok(out * k)
}

/// One entry pair of `A = M W₀` at one point; entries are 1-based.
#[derive(Clone, PartialEq, Debug, serde::Serialize)]
pub struct SklyaninOutcome {
    pub a: (usize, usize),
    pub b: (usize, usize),
    #[serde(serialize_with = "super::reduce::ser")]
    pub t: Scalar,
    #[serde(serialize_with = "super::reduce::ser")]
    pub s: Scalar,
    #[serde(serialize_with = "super::reduce::ser")]
    pub chain_rule: Scalar,
    #[serde(serialize_with = "super::reduce::ser")]
    pub reference: Scalar,
    pub pass: bool,
}

/// Compares `{a_{pq}(t), a_{p̄q̄}(s)}` under `α = 1, β = -1` with the
/// R-matrix formulas, for every ordered pair of entries of `A = M W₀` and
/// every point. The network must have its `k` sources on the outer circle
/// and its `k` sinks on the inner one.
pub fn sklyanin_check(n: &Network, points: &[(Scalar, Scalar)], exec: Exec) -> Result<Vec<SklyaninOutcome>> {
    let labels = label_boundary(n);
    let k = labels.k();
    if k == 0 || labels.m() != k || labels.n1 != k || labels.sources.iter().any(|&i| i > k) {
        return Err(Error::Precondition("needs k outer sources and k inner sinks".into()));
    }
    let params = PoissonParams::poi1();
    let per_point = par::map(exec, points.to_vec(), |(t, s)| {
        let data = BracketData::new(n, &params, &t, &s, exec)?;
        let w0 = |m: &Matrix<Scalar>| Matrix::from_fn(k, k, |p, q| m.get(p, k - 1 - q).clone());
        let (at, as_) = (w0(&data.at_t.value), w0(&data.at_s.value));
        let entries: Vec<(usize, usize)> = (0..k).flat_map(|p| (0..k).map(move |q| (p, q))).collect();
        let mut out = Vec::new();
        for &x in &entries {
            for &y in &entries {
                let label = |(p, q): (usize, usize)| (data.sources[p], data.sinks[k - 1 - q]);
                let chain_rule = data.bracket(label(x), label(y))?;
                let reference = sklyanin_reference(&at, &as_, x, y, &t, &s)?;
                out.push(SklyaninOutcome {
                    a: (x.0 + 1, x.1 + 1),
                    b: (y.0 + 1, y.1 + 1),
                    t: t.clone(),
                    s: s.clone(),
                    pass: chain_rule == reference,
                    chain_rule,
                    reference,
                });
            }
        }
        Ok(out)
    });
    Ok(per_point.into_iter().collect::<Result<Vec<_>>>()?.into_iter().flatten().collect())
}
