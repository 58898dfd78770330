//! Closed-form brackets of boundary measurements for the two basic members
//! of the family: `α = -β = 1` and `α = β = 1`.

use std::fmt;

use serde::Serialize;

use crate::arith::{Field, Scalar};
use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum Family {
    /// `α = -β = 1`
    Poi1,
    /// `α = β = 1`
    Poi2,
}

/// Which closed form applies: the roman case and the branch within it.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct CaseTag {
    pub family: Family,
    pub case: u8,
    pub branch: u8,
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let roman = ["i", "ii", "iii", "iv"][self.case as usize - 1];
        let fam = match self.family {
            Family::Poi1 => "psre",
            Family::Poi2 => "psre2",
        };
        write!(f, "{fam}({roman}).{}", self.branch)
    }
}

/// Labels `(i_p, j_q, i_p̄, j_q̄)` with `n₁` and the formula they fall under.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct BracketCase {
    pub ip: usize,
    pub jq: usize,
    pub ipb: usize,
    pub jqb: usize,
    pub n1: usize,
    pub tag: CaseTag,
}

fn tag(family: Family, case: u8, branch: u8) -> CaseTag {
    CaseTag { family, case, branch }
}

/// Every closed form whose conditions hold, in a fixed order.
pub fn classify_all(family: Family, q: (usize, usize, usize, usize), n1: usize) -> Vec<CaseTag> {
    let (ip, jq, ipb, jqb) = q;
    let mut out = Vec::new();
    match family {
        Family::Poi1 => {
            let f = Family::Poi1;
            if ip <= n1 && ipb <= n1 && ip.max(ipb) < jqb && jqb < jq {
                out.push(tag(
                    f,
                    1,
                    if jq <= n1 {
                        1
                    } else if jqb <= n1 {
                        2
                    } else {
                        3
                    },
                ));
            }
            if jqb > n1 && jq > n1 && ip < ipb && ipb < jq.min(jqb) {
                out.push(tag(
                    f,
                    2,
                    if ipb <= n1 {
                        1
                    } else if ip <= n1 {
                        2
                    } else {
                        3
                    },
                ));
            }
            if ip == ipb && jq == jqb && ip < jq {
                if jq <= n1 {
                    out.push(tag(f, 3, 1));
                } else if ip <= n1 {
                    out.push(tag(f, 3, 2));
                }
            }
            if ip < ipb.min(jq).min(jqb) {
                if jqb < ipb && ipb < jq && jq <= n1 {
                    out.push(tag(f, 4, 1));
                } else if jq <= n1 && n1 < ipb && ipb < jqb {
                    out.push(tag(f, 4, 2));
                } else if jqb <= n1 && n1 < ipb && ipb < jq {
                    out.push(tag(f, 4, 3));
                }
            }
        }
        Family::Poi2 => {
            let f = Family::Poi2;
            if ip.max(ipb) < jqb && jqb < jq {
                let b = if jq <= n1 {
                    Some(1)
                } else if jqb <= n1 {
                    Some(2)
                } else if ip.max(ipb) <= n1 {
                    Some(3)
                } else if ip <= n1 {
                    Some(4)
                } else if ipb <= n1 {
                    Some(5)
                } else {
                    None
                };
                if let Some(b) = b {
                    out.push(tag(f, 1, b));
                }
            }
            if ip < jqb && jqb < ipb && ipb < jq {
                if jqb <= n1 && n1 < ipb {
                    out.push(tag(f, 2, 1));
                } else if jq <= n1 {
                    out.push(tag(f, 2, 2));
                }
            }
            if ip < jq && jq < ipb && ipb < jqb {
                if jq <= n1 && n1 < ipb {
                    out.push(tag(f, 3, 1));
                } else if jqb <= n1 {
                    out.push(tag(f, 3, 2));
                }
            }
        }
    }
    out
}

/// The first closed form covering the quadruple, if any.
pub fn classify(family: Family, q: (usize, usize, usize, usize), n1: usize) -> Option<BracketCase> {
    classify_all(family, q, n1).first().map(|&tag| BracketCase { ip: q.0, jq: q.1, ipb: q.2, jqb: q.3, n1, tag })
}

/// Values at `t` (index 0) and `s` (index 1) of the entries a formula uses.
/// `pq` is `M_{pq}`, `pqb` is `M_{p q̄}`, and so on; `d_*` are derivatives.
#[derive(Clone, PartialEq, Debug)]
pub struct PairValues {
    pub pq: [Scalar; 2],
    pub pbqb: [Scalar; 2],
    pub pqb: [Scalar; 2],
    pub pbq: [Scalar; 2],
    pub d_pq: [Scalar; 2],
    pub d_pbqb: [Scalar; 2],
}

fn sgn(a: usize, b: usize) -> Scalar {
    Scalar::from_int(match b.cmp(&a) {
        std::cmp::Ordering::Greater => 1,
        std::cmp::Ordering::Less => -1,
        std::cmp::Ordering::Equal => 0,
    })
}

fn kernel(t: &Scalar, s: &Scalar) -> Result<Scalar> {
    (t.clone() - s.clone()).inv().ok_or_else(|| Error::Precondition("t = s".into()))
}

/// Right-hand side of the `α = -β = 1` formula selected by `case`.
pub fn psre_reference(case: &BracketCase, v: &PairValues, t: &Scalar, s: &Scalar) -> Result<Scalar> {
    if case.tag.family != Family::Poi1 {
        return Err(Error::Precondition("not a psre case".into()));
    }
    let k = kernel(t, s)?;
    let two = Scalar::from_int(2);
    let (at, as_) = (v.pqb[0].clone(), v.pqb[1].clone());
    let (bt, bs) = (v.pbq[0].clone(), v.pbq[1].clone());
    let sigma = sgn(case.ip, case.ipb) - sgn(case.jq, case.jqb);
    let out = match (case.tag.case, case.tag.branch) {
        (1, b) => {
            let phi = match b {
                1 => (at.clone() - as_.clone()) * (s.clone() * bt.clone() - t.clone() * bs.clone()),
                2 => s.clone() * bt.clone() * (at.clone() - as_.clone()),
                _ => s.clone() * (at.clone() * bs.clone() - as_.clone() * bt.clone()),
            };
            sigma * as_ * bt - two * k * phi
        }
        (2, b) => {
            let psi = match b {
                1 => t.clone() * (at.clone() * bs.clone() - as_.clone() * bt.clone()),
                2 => -(t.clone() * at.clone() * (bt.clone() - bs.clone())),
                _ => -((t.clone() * at.clone() - s.clone() * as_.clone()) * (bt.clone() - bs.clone())),
            };
            sigma * at * bs - two * k * psi
        }
        (3, 1) => {
            let (mt, ms) = (v.pq[0].clone(), v.pq[1].clone());
            -(two * k * (mt.clone() - ms.clone()) * (s.clone() * mt - t.clone() * ms))
        }
        (3, _) => Scalar::zero(),
        (4, 1) => two * t.clone() * k * (at - as_) * (bt - bs),
        (4, 2) => -(two * t.clone() * k * (at * bt - as_ * bs)),
        _ => Scalar::zero(),
    };
    Ok(out)
}

/// Right-hand side of the `α = β = 1` bracket selected by `case`.
pub fn psre2_reference(case: &BracketCase, v: &PairValues, t: &Scalar, s: &Scalar) -> Result<Scalar> {
    if case.tag.family != Family::Poi2 {
        return Err(Error::Precondition("not a psre2 case".into()));
    }
    let two = Scalar::from_int(2);
    let (p, q) = (v.pq[0].clone(), v.pbqb[1].clone());
    let dp = t.clone() * v.d_pq[0].clone() * q.clone();
    let dq = s.clone() * p.clone() * v.d_pbqb[1].clone();
    let out = match (case.tag.case, case.tag.branch) {
        (1, b) => {
            let sigma = sgn(case.ip, case.ipb) + sgn(case.jq, case.jqb);
            let gamma = match b {
                1 => Scalar::zero(),
                2 | 4 => -dq,
                3 => dp - dq,
                _ => dp,
            };
            two * gamma - sigma * p * q
        }
        (2, 1) => -(two * (dp + dq)),
        _ => Scalar::zero(),
    };
    Ok(out)
}

/// Variant of [`psre2_reference`] with the opposite overall sign,
/// `t M'_{pq}(t) M_{p̄q̄}(s)` as `Γ` in (i).4, no (i).5, and (ii) vanishing
/// throughout. Agrees with the chain rule only up to sign and only off those
/// branches.
pub fn psre2_alternate(case: &BracketCase, v: &PairValues, t: &Scalar, s: &Scalar) -> Result<Scalar> {
    if case.tag.family != Family::Poi2 {
        return Err(Error::Precondition("not a psre2 case".into()));
    }
    if case.tag.case != 1 {
        return Ok(Scalar::zero());
    }
    let two = Scalar::from_int(2);
    let sigma = sgn(case.ip, case.ipb) + sgn(case.jq, case.jqb);
    let (p, q) = (v.pq[0].clone(), v.pbqb[1].clone());
    let dp = t.clone() * v.d_pq[0].clone() * q.clone();
    let dq = s.clone() * p.clone() * v.d_pbqb[1].clone();
    let gamma = match case.tag.branch {
        1 => Scalar::zero(),
        2 => -dq,
        3 => dp - dq,
        4 => dp,
        _ => return Err(Error::Precondition(format!("{} has no alternate form", case.tag))),
    };
    Ok(sigma * p * q - two * gamma)
}
