//! Input and output of the matrix compiler.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::arith::{Matrix, RatLambda};
use crate::error::{Error, Result};
use crate::measurement::measurement_matrix;
use crate::network::Network;

use super::build::realize_matrix;

/// A `k × m` matrix of rational functions of `λ`.
#[derive(Clone, PartialEq, Debug)]
pub struct RationalMatrixSpec {
    pub k: usize,
    pub m: usize,
    pub entries: Matrix<RatLambda>,
}

#[derive(Serialize, Deserialize)]
struct RawSpec {
    k: usize,
    m: usize,
    entries: Vec<(Value, Value)>,
}

// "1,0,2/3", ["1", "0", "2/3"] or [1, 0, "2/3"], lowest degree first
fn coefficients(v: &Value) -> Result<Vec<String>> {
    let bad = || Error::Parse(format!("bad coefficient list {v}"));
    match v {
        Value::String(s) => Ok(s.split(',').map(|c| c.trim().to_string()).collect()),
        Value::Array(items) => items
            .iter()
            .map(|c| match c {
                Value::String(s) => Ok(s.trim().to_string()),
                Value::Number(n) => Ok(n.to_string()),
                _ => Err(bad()),
            })
            .collect(),
        _ => Err(bad()),
    }
}

impl RationalMatrixSpec {
    pub fn new(entries: Matrix<RatLambda>) -> Self {
        RationalMatrixSpec { k: entries.rows(), m: entries.cols(), entries }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawSpec = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if raw.k == 0 || raw.m == 0 {
            return Err(Error::Parse("k and m must be positive".into()));
        }
        if raw.entries.len() != raw.k * raw.m {
            return Err(Error::Parse(format!("expected {} entries, found {}", raw.k * raw.m, raw.entries.len())));
        }
        let mut rows = Vec::with_capacity(raw.k);
        for row in raw.entries.chunks(raw.m) {
            let row = row
                .iter()
                .map(|(n, d)| RatLambda::from_coeff_strings(&coefficients(n)?, &coefficients(d)?))
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Ok(Self::new(Matrix::from_rows(rows)?))
    }

    pub fn to_json(&self) -> String {
        let entries = (0..self.k)
            .flat_map(|i| (0..self.m).map(move |j| (i, j)))
            .map(|(i, j)| {
                let (n, d) = self.entries.get(i, j).to_coeff_strings();
                let list = |c: Vec<String>| Value::String(if c.is_empty() { "0".into() } else { c.join(",") });
                (list(n), list(d))
            })
            .collect();
        serde_json::to_string_pretty(&RawSpec { k: self.k, m: self.m, entries }).expect("serializable")
    }
}

/// A compiled network with the steps that built it.
#[derive(Clone, Debug)]
pub struct Realization {
    pub network: Network,
    pub provenance: Vec<String>,
    pub crossings_resolved: usize,
}

/// Compiles `spec` and checks the result by measuring it.
pub fn realize(spec: &RationalMatrixSpec) -> Result<Realization> {
    let g = realize_matrix(&spec.entries)?;
    let drawing = g.to_drawing()?;
    let before = drawing.edges.len();
    let network = crate::network::resolve_crossings(&drawing)?;
    // each crossing splits two edges and adds the seven inner gadget edges
    let crossings_resolved = (network.edges.len() - before) / 9;
    let m = measurement_matrix(&network)?;
    if m.entries != spec.entries {
        return Err(Error::Inconsistent("the compiled network measures a different matrix".into()));
    }
    Ok(Realization { network, provenance: g.provenance, crossings_resolved })
}
