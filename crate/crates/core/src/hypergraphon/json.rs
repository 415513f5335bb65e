use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use super::{Grid, StepHypergraphon, TypeDistribution};
use crate::error::{Error, Result};
use crate::types::{signature_from_json, signature_to_json};
use crate::types::{QfType, TypeSpace};

fn int_to_json(x: &BigInt) -> Value {
    match x.to_u64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

fn int_from_json(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => n
            .as_u64()
            .map(BigInt::from)
            .ok_or_else(|| Error::Format(format!("expected a non-negative integer, got {n}"))),
        Value::String(s) => s
            .parse()
            .map_err(|_| Error::Format(format!("expected an integer string, got {s:?}"))),
        other => Err(Error::Format(format!("expected an integer, got {other}"))),
    }
}

fn ratio_from_json(num: &Value, den: &Value) -> Result<BigRational> {
    let den = int_from_json(den)?;
    if den == BigInt::from(0) {
        return Err(Error::Format("zero denominator".into()));
    }
    Ok(BigRational::new(int_from_json(num)?, den))
}

pub fn hypergraphon_to_json(w: &StepHypergraphon) -> Value {
    let grid: Vec<Value> = w
        .grid()
        .weights()
        .iter()
        .map(|r| json!([int_to_json(r.numer()), int_to_json(r.denom())]))
        .collect();
    let table: Vec<Value> = w
        .table()
        .iter()
        .enumerate()
        .map(|(idx, d)| {
            let dist: Vec<Value> = d
                .atoms()
                .iter()
                .map(|(t, p)| json!([t.index(), int_to_json(p.numer()), int_to_json(p.denom())]))
                .collect();
            json!({"cells": w.cells_of(idx), "dist": dist})
        })
        .collect();
    json!({
        "grid": grid,
        "k": w.k(),
        "signature": signature_to_json(w.space().signature()),
        "table": table,
    })
}

/// Parses the JSON form without checking coherence.
pub fn hypergraphon_from_json(value: &Value) -> Result<StepHypergraphon> {
    let field = |name: &str| value.get(name).ok_or_else(|| Error::Format(format!("missing `{name}`")));
    let k = field("k")?
        .as_u64()
        .ok_or_else(|| Error::Format("`k` must be an integer".into()))? as usize;
    let signature = Arc::new(signature_from_json(field("signature")?)?);
    let space = TypeSpace::new(signature, k)?;
    let grid_list = field("grid")?
        .as_array()
        .ok_or_else(|| Error::Format("`grid` must be a list".into()))?;
    let mut weights = Vec::new();
    for pair in grid_list {
        match pair.as_array().map(Vec::as_slice) {
            Some([num, den]) => weights.push(ratio_from_json(num, den)?),
            _ => return Err(Error::Format(format!("grid entry {pair} is not [num, den]"))),
        }
    }
    let grid = Grid::new(weights)?;
    let entries = field("table")?
        .as_array()
        .ok_or_else(|| Error::Format("`table` must be a list".into()))?;
    let coords = (1usize << k) - 1;
    let mut table: BTreeMap<usize, TypeDistribution> = BTreeMap::new();
    for entry in entries {
        let cells: Vec<usize> = entry
            .get("cells")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Format("table entry without `cells`".into()))?
            .iter()
            .map(|c| c.as_u64().map(|c| c as usize))
            .collect::<Option<_>>()
            .ok_or_else(|| Error::Format("cells must be non-negative integers".into()))?;
        if cells.len() != coords || cells.iter().any(|&c| c >= grid.m()) {
            return Err(Error::Format(format!("bad cell vector {cells:?}")));
        }
        let index = cells.iter().fold(0, |acc, &c| acc * grid.m() + c);
        let dist = entry
            .get("dist")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Format(format!("entry {cells:?} without `dist`")))?;
        let mut atoms = Vec::new();
        for atom in dist {
            match atom.as_array().map(Vec::as_slice) {
                Some([t, num, den]) => {
                    let t = t
                        .as_u64()
                        .ok_or_else(|| Error::Format(format!("bad type index {t}")))?;
                    atoms.push((QfType::from_index(t), ratio_from_json(num, den)?));
                }
                _ => return Err(Error::Format(format!("dist atom {atom} is not [type, num, den]"))),
            }
        }
        if table.insert(index, TypeDistribution::new(atoms)?).is_some() {
            return Err(Error::Format(format!("cell vector {cells:?} listed twice")));
        }
    }
    let expected = grid.m().checked_pow(coords as u32).unwrap_or(usize::MAX);
    if table.len() != expected {
        let missing = (0..expected).find(|i| !table.contains_key(i)).unwrap_or(0);
        return Err(Error::IncompleteTable(format!(
            "{} of {expected} cell vectors given; first missing index {missing}",
            table.len()
        )));
    }
    StepHypergraphon::unvalidated(space, grid, table.into_values().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraphon::{make_er, make_triangle};
    use crate::types::Signature;

    #[test]
    fn round_trip() {
        for w in [make_er(Arc::new(Signature::hypergraph(2)), 2).unwrap(), make_triangle().unwrap()] {
            let v = hypergraphon_to_json(&w);
            let back = hypergraphon_from_json(&v).unwrap();
            assert_eq!(back.table(), w.table());
            assert_eq!(back.grid(), w.grid());
            assert!(back.is_coherent());
        }
    }

    #[test]
    fn er_json_text() {
        let w = make_er(Arc::new(Signature::hypergraph(2)), 2).unwrap();
        assert_eq!(
            serde_json::to_string(&hypergraphon_to_json(&w)).unwrap(),
            r#"{"grid":[[1,1]],"k":2,"signature":[{"arity":2,"name":"E"}],"table":[{"cells":[0,0,0],"dist":[[0,1,2],[3,1,2]]}]}"#
        );
    }

    #[test]
    fn missing_cells_rejected() {
        let v: Value = serde_json::from_str(
            r#"{"grid":[[1,2],[1,2]],"k":2,"signature":[{"arity":2,"name":"E"}],"table":[{"cells":[0,0,0],"dist":[[0,1,1]]}]}"#,
        )
        .unwrap();
        assert!(matches!(hypergraphon_from_json(&v), Err(Error::IncompleteTable(_))));
    }
}
