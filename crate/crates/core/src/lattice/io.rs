use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{check_dim, IntegerBox, LatticeFunction};
use crate::error::{Error, Result};

/// JSON document form `{dim, origin, shape, values}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LatticeFunctionDoc {
    pub dim: usize,
    pub origin: Vec<i64>,
    pub shape: Vec<usize>,
    pub values: Vec<f64>,
}

impl From<&LatticeFunction> for LatticeFunctionDoc {
    fn from(f: &LatticeFunction) -> Self {
        Self {
            dim: f.dim(),
            origin: f.origin().to_vec(),
            shape: f.shape(),
            values: f.values().to_vec(),
        }
    }
}

impl TryFrom<LatticeFunctionDoc> for LatticeFunction {
    type Error = Error;

    fn try_from(doc: LatticeFunctionDoc) -> Result<Self> {
        if doc.origin.len() != doc.dim {
            return Err(Error::DimensionMismatch {
                expected: doc.dim,
                found: doc.origin.len(),
            });
        }
        LatticeFunction::new(doc.origin, doc.shape, doc.values)
    }
}

impl LatticeFunction {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&LatticeFunctionDoc::from(self)).expect("finite values serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str::<LatticeFunctionDoc>(s)?.try_into()
    }

    /// Parses either a single document or an array of documents.
    pub fn many_from_json(s: &str) -> Result<Vec<Self>> {
        let v: serde_json::Value = serde_json::from_str(s)?;
        let docs: Vec<LatticeFunctionDoc> = if v.is_array() {
            serde_json::from_value(v)?
        } else {
            vec![serde_json::from_value(v)?]
        };
        docs.into_iter().map(Self::try_from).collect()
    }

    /// Sparse CSV, one `n_1,…,n_d,value` line per nonzero entry, no header.
    pub fn write_sparse_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        for (n, v) in self.iter() {
            if v != 0.0 {
                let mut row: Vec<String> = n.iter().map(i64::to_string).collect();
                row.push(v.to_string());
                out.write_record(&row)?;
            }
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_sparse_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_sparse_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    /// Reads the sparse CSV form. Blank lines and `#` comments are skipped.
    /// `dim` is required only to interpret an empty file.
    pub fn read_sparse_csv<R: Read>(r: R, dim: Option<usize>) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(r);
        let mut entries: Vec<(Vec<i64>, f64)> = Vec::new();
        let mut seen_dim = dim;
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() < 2 {
                return Err(Error::Parse(format!("record {line}: expected n_1,..,n_d,value")));
            }
            let d = rec.len() - 1;
            match seen_dim {
                Some(e) if e != d => return Err(Error::DimensionMismatch { expected: e, found: d }),
                _ => seen_dim = Some(d),
            }
            let n = rec
                .iter()
                .take(d)
                .map(|s| s.parse::<i64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse(format!("record {line}: {e}")))?;
            let v: f64 = rec[d]
                .parse()
                .map_err(|e| Error::Parse(format!("record {line}: {e}")))?;
            if !v.is_finite() {
                return Err(Error::NonFinite(line));
            }
            entries.push((n, v));
        }
        let d = seen_dim.ok_or_else(|| Error::Parse("empty input and no dimension given".into()))?;
        check_dim(d)?;
        let Some(first) = entries.first() else {
            return Ok(LatticeFunction::zeros(&IntegerBox::new(vec![0; d], vec![0; d])?));
        };
        let mut hull = IntegerBox::point(&first.0)?;
        for (n, _) in &entries {
            hull = hull.hull_with_point(n);
        }
        let mut values = vec![0.0; hull.count() as usize];
        let mut filled = vec![false; values.len()];
        for (n, v) in entries {
            let i = hull.linear_index(&n);
            if std::mem::replace(&mut filled[i], true) {
                return Err(Error::Parse(format!("duplicate entry at {n:?}")));
            }
            values[i] = v;
        }
        LatticeFunction::new(hull.lo().to_vec(), hull.extents(), values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_is_bit_exact() {
        let vals = vec![0.1, -1e-300, 1.0 / 3.0, 123_456_789.123_456_79, 5e-324, -0.0];
        let f = LatticeFunction::new(vec![-2, 7], vec![2, 3], vals).unwrap();
        let g = LatticeFunction::from_json(&f.to_json()).unwrap();
        assert_eq!(f.origin(), g.origin());
        for (a, b) in f.values().iter().zip(g.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn json_rejects_bad_documents() {
        assert!(LatticeFunction::from_json(r#"{"dim":1,"origin":[0],"shape":[2],"values":[1]}"#).is_err());
        assert!(LatticeFunction::from_json(r#"{"dim":2,"origin":[0],"shape":[1],"values":[1]}"#).is_err());
        assert!(LatticeFunction::from_json(r#"{"dim":4,"origin":[0,0,0,0],"shape":[1,1,1,1],"values":[1]}"#).is_err());
        assert!(LatticeFunction::from_json("{not json").is_err());
        let many = LatticeFunction::many_from_json(
            r#"[{"dim":1,"origin":[0],"shape":[1],"values":[1]},{"dim":1,"origin":[2],"shape":[2],"values":[1,2]}]"#,
        )
        .unwrap();
        assert_eq!(many.len(), 2);
    }

    #[test]
    fn sparse_csv_round_trip() {
        let f = LatticeFunction::new(vec![-1, 0], vec![2, 2], vec![0.0, 0.7, -2.5, 1e-17]).unwrap();
        let text = f.to_sparse_csv();
        assert_eq!(text.lines().count(), 3);
        let g = LatticeFunction::read_sparse_csv(text.as_bytes(), None).unwrap();
        for (n, v) in f.iter() {
            assert_eq!(g.get(&n).to_bits(), v.to_bits());
        }
    }

    #[test]
    fn sparse_csv_comments_blank_and_errors() {
        let text = "# spikes\n\n0,0,1\n 2 , -1 , 3.5\n";
        let g = LatticeFunction::read_sparse_csv(text.as_bytes(), None).unwrap();
        assert_eq!(g.get(&[2, -1]), 3.5);
        assert_eq!(g.get(&[0, 0]), 1.0);
        assert!(LatticeFunction::read_sparse_csv("0,1\n0,0,1\n".as_bytes(), None).is_err());
        assert!(LatticeFunction::read_sparse_csv("0,1\n0,2\n".as_bytes(), None).is_err());
        assert!(LatticeFunction::read_sparse_csv("a,1\n".as_bytes(), None).is_err());
        assert!(LatticeFunction::read_sparse_csv("".as_bytes(), None).is_err());
        let z = LatticeFunction::read_sparse_csv("".as_bytes(), Some(2)).unwrap();
        assert!(z.is_zero() && z.dim() == 2);
    }
}
