//! CSV and JSON serialization of [`OperatorMatrix`].
//!
//! CSV: one record per row, each cell the string `"re,im"` (quoted by the
//! writer because of the embedded comma). No header; the order is the row
//! count minus one and the structure is recovered from the zero pattern.
//!
//! JSON: `{"n": N, "structure": "lower-triangular", "entries": [[[re, im], …], …]}`.
//!
//! Floats are written in shortest round-trip form, so reading back gives the
//! identical values.

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hardy::{OperatorMatrix, Structure};

pub fn write_csv<W: Write>(m: &OperatorMatrix, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    for r in 0..m.dim() {
        w.write_record(m.row(r).iter().map(|z| format!("{:?},{:?}", z.re, z.im)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<OperatorMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(input);
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    for record in rdr.records() {
        let record = record?;
        rows.push(record.iter().map(parse_cell).collect::<Result<_>>()?);
    }
    let dim = rows.len();
    if dim == 0 {
        return Err(Error::Parse("empty matrix".into()));
    }
    if let Some(bad) = rows.iter().position(|r| r.len() != dim) {
        return Err(Error::Parse(format!("row {bad} does not have {dim} cells")));
    }
    let entries: Vec<Complex64> = rows.into_iter().flatten().collect();
    let structure = tightest_structure(dim, &entries);
    OperatorMatrix::new(dim - 1, structure, entries)
}

fn parse_cell(cell: &str) -> Result<Complex64> {
    let (re, im) = cell
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("cell {cell:?} is not of the form re,im")))?;
    let parse = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|e| Error::Parse(format!("{s:?}: {e}")))
    };
    Ok(Complex64::new(parse(re)?, parse(im)?))
}

fn tightest_structure(dim: usize, entries: &[Complex64]) -> Structure {
    let zero = Complex64::new(0.0, 0.0);
    let nz = |r: usize, c: usize| entries[r * dim + c] != zero;
    let pairs = || (0..dim).flat_map(|r| (0..dim).map(move |c| (r, c)));
    let lower = pairs().all(|(r, c)| r >= c || !nz(r, c));
    let upper = pairs().all(|(r, c)| r <= c || !nz(r, c));
    let band_upper = pairs().all(|(r, c)| c == r || c == r + 1 || !nz(r, c));
    let band_lower = pairs().all(|(r, c)| r == c || r == c + 1 || !nz(r, c));
    if band_upper || band_lower {
        Structure::Bidiagonal
    } else if lower {
        Structure::LowerTriangular
    } else if upper {
        Structure::UpperTriangular
    } else {
        Structure::Dense
    }
}

#[derive(Serialize, Deserialize)]
struct JsonMatrix {
    n: usize,
    structure: Structure,
    entries: Vec<Vec<[f64; 2]>>,
}

pub fn to_json(m: &OperatorMatrix) -> Result<String> {
    if m.entries().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Parse("JSON cannot carry non-finite entries".into()));
    }
    let doc = JsonMatrix {
        n: m.order(),
        structure: m.structure(),
        entries: (0..m.dim())
            .map(|r| m.row(r).iter().map(|z| [z.re, z.im]).collect())
            .collect(),
    };
    Ok(serde_json::to_string(&doc)?)
}

pub fn from_json(s: &str) -> Result<OperatorMatrix> {
    let doc: JsonMatrix = serde_json::from_str(s)?;
    let dim = doc.n + 1;
    if doc.entries.len() != dim || doc.entries.iter().any(|r| r.len() != dim) {
        return Err(Error::Parse(format!("entries are not {dim}x{dim}")));
    }
    let entries = doc
        .entries
        .into_iter()
        .flatten()
        .map(|[re, im]| Complex64::new(re, im))
        .collect();
    OperatorMatrix::new(doc.n, doc.structure, entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardy::{cesaro_adjoint_matrix, cesaro_matrix};
    use proptest::prelude::*;

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_csv(&cesaro_matrix(1), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "\"1.0,0.0\",\"0.0,0.0\"\n\"0.5,0.0\",\"0.5,0.0\"\n");
    }

    #[test]
    fn json_layout() {
        let s = to_json(&cesaro_adjoint_matrix(1)).unwrap();
        assert_eq!(
            s,
            r#"{"n":1,"structure":"upper-triangular","entries":[[[1.0,0.0],[0.5,0.0]],[[0.0,0.0],[0.5,0.0]]]}"#
        );
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        assert!(read_csv("\"1,0\",\"2,0\"\n".as_bytes()).is_err());
        assert!(read_csv("\"1;0\"\n".as_bytes()).is_err());
        assert!(from_json(r#"{"n":1,"structure":"dense","entries":[[[1,0]]]}"#).is_err());
        assert!(from_json(
            r#"{"n":1,"structure":"lower-triangular","entries":[[[1,0],[1,0]],[[1,0],[1,0]]]}"#
        )
        .is_err());
    }

    fn arbitrary_matrix() -> impl Strategy<Value = OperatorMatrix> {
        (0usize..6).prop_flat_map(|order| {
            let dim = order + 1;
            proptest::collection::vec(
                (any::<f64>(), any::<f64>()).prop_filter("finite", |(a, b)| {
                    a.is_finite() && b.is_finite()
                }),
                dim * dim,
            )
            .prop_map(move |cells| {
                let entries = cells
                    .into_iter()
                    .map(|(re, im)| Complex64::new(re, im))
                    .collect();
                OperatorMatrix::new(order, Structure::Dense, entries).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn round_trips_are_value_exact(m in arbitrary_matrix()) {
            let mut buf = Vec::new();
            write_csv(&m, &mut buf).unwrap();
            let back = read_csv(buf.as_slice()).unwrap();
            prop_assert_eq!(back.entries(), m.entries());

            let back = from_json(&to_json(&m).unwrap()).unwrap();
            prop_assert_eq!(back, m);
        }
    }
}
