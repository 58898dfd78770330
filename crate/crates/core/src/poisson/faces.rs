use std::collections::BTreeMap;

use serde::Serialize;

use super::{edge_bracket, PoissonParams};
use crate::arith::{fmt_scalar, Scalar};
use crate::error::{Error, Result};
use crate::network::{face_weights, Face, Network, VertexKind};

/// Predicted share of one flag common to both faces.
#[derive(Clone, Debug, Serialize)]
pub struct FlagContribution {
    pub vertex: String,
    pub edge: String,
    pub positive: bool,
    pub color: VertexKind,
    /// coefficient of `y_f y_f'`
    pub value: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct FaceBracket {
    pub f: String,
    pub g: String,
    /// `{y_f, y_g}` by the chain rule
    pub value: String,
    /// `{y_f, y_g} / (y_f y_g)` by the chain rule
    pub coefficient: String,
    /// sum of the flag contributions
    pub predicted: String,
    pub contributions: Vec<FlagContribution>,
    pub agree: bool,
}

fn exponents(n: &Network, f: &Face) -> Result<BTreeMap<usize, i32>> {
    let mut out = BTreeMap::new();
    for (id, k) in &f.edges {
        let e = n.edge_index(id).ok_or_else(|| Error::Precondition(format!("unknown edge {id}")))?;
        *out.entry(e).or_insert(0) += k;
    }
    out.retain(|_, k| *k != 0);
    Ok(out)
}

/// Chain-rule bracket of two face weights, with the flag-by-flag account.
pub fn face_bracket(n: &Network, params: &PoissonParams, f: &str, g: &str) -> Result<FaceBracket> {
    let faces = face_weights(n)?;
    let find =
        |id: &str| faces.iter().find(|x| x.id == id).ok_or_else(|| Error::Precondition(format!("unknown face {id}")));
    let (ff, gg) = (find(f)?, find(g)?);
    let (ef, eg) = (exponents(n, ff)?, exponents(n, gg)?);
    let gam = |m: &BTreeMap<usize, i32>, e: usize| Scalar::from_integer((*m.get(&e).unwrap_or(&0)).into());
    let mut coef = Scalar::from_integer(0.into());
    for (e, h, c) in edge_bracket(n, params) {
        coef += c * (gam(&ef, e) * gam(&eg, h) - gam(&ef, h) * gam(&eg, e));
    }
    let (alpha, beta) = (params.alpha(), params.beta());
    let mut contributions = Vec::new();
    let mut predicted = Scalar::from_integer(0.into());
    for (&e, &kf) in &ef {
        let Some(&kg) = eg.get(&e) else { continue };
        if kf != -kg {
            continue;
        }
        let edge = &n.edges[e];
        for v in [edge.tail, edge.head] {
            let color = n.vertices[v].kind;
            let base = match color {
                VertexKind::White => alpha.clone(),
                VertexKind::Black => beta.clone(),
                _ => continue,
            };
            let positive = v == edge.tail;
            // f to the right of e is the reference orientation
            let mut c = if positive { -base } else { base };
            if kf > 0 {
                c = -c;
            }
            predicted += c.clone();
            contributions.push(FlagContribution {
                vertex: n.vertices[v].id.clone(),
                edge: edge.id.clone(),
                positive,
                color,
                value: fmt_scalar(&c),
            });
        }
    }
    let value = coef.clone() * ff.weight.clone() * gg.weight.clone();
    Ok(FaceBracket {
        f: f.to_string(),
        g: g.to_string(),
        value: fmt_scalar(&value),
        coefficient: fmt_scalar(&coef),
        predicted: fmt_scalar(&predicted),
        agree: coef == predicted,
        contributions,
    })
}
