//! JSON encodings shared by every instance schema.
//!
//! Matrices are row-major arrays of rows. Real entries are numbers; complex
//! entries are `[re, im]` pairs. Readers accept either form for any entry.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::linear_core::{Field, Subspace, DEFAULT_TOL};
use crate::{CMat, RMat, C64};

#[derive(Serialize, Deserialize, Clone, Copy)]
#[serde(untagged)]
enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

pub fn rmat_rows(m: &RMat) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

pub fn cmat_rows(m: &CMat) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn rows_to_cmat(rows: Vec<Vec<Entry>>, ncols_hint: usize) -> Result<CMat, String> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(ncols_hint, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err("ragged matrix rows".into());
    }
    let mut m = CMat::zeros(nrows, ncols);
    for (i, row) in rows.into_iter().enumerate() {
        for (j, e) in row.into_iter().enumerate() {
            m[(i, j)] = match e {
                Entry::Real(x) => C64::new(x, 0.0),
                Entry::Complex([re, im]) => C64::new(re, im),
            };
        }
    }
    Ok(m)
}

/// Parse a matrix from a JSON value, accepting real or complex entries.
pub fn cmat_from_value(v: &serde_json::Value) -> Result<CMat, String> {
    let rows: Vec<Vec<Entry>> = serde_json::from_value(v.clone()).map_err(|e| e.to_string())?;
    rows_to_cmat(rows, 0)
}

/// Parse a real matrix; complex entries must have zero imaginary part.
pub fn rmat_from_value(v: &serde_json::Value) -> Result<RMat, String> {
    let c = cmat_from_value(v)?;
    if c.iter().any(|z| z.im != 0.0) {
        return Err("expected a real matrix".into());
    }
    Ok(c.map(|z| z.re))
}

/// `#[serde(with = "json::rmat")]` for real matrices.
pub mod rmat {
    use super::*;

    pub fn serialize<S: Serializer>(m: &RMat, s: S) -> Result<S::Ok, S::Error> {
        rmat_rows(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<RMat, D::Error> {
        let rows = Vec::<Vec<Entry>>::deserialize(d)?;
        let c = rows_to_cmat(rows, 0).map_err(D::Error::custom)?;
        if c.iter().any(|z| z.im != 0.0) {
            return Err(D::Error::custom("expected a real matrix"));
        }
        Ok(c.map(|z| z.re))
    }
}

/// `#[serde(with = "json::cmat")]` for complex matrices.
pub mod cmat {
    use super::*;

    pub fn serialize<S: Serializer>(m: &CMat, s: S) -> Result<S::Ok, S::Error> {
        cmat_rows(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CMat, D::Error> {
        let rows = Vec::<Vec<Entry>>::deserialize(d)?;
        rows_to_cmat(rows, 0).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct SubspaceJson {
    ambient_dim: usize,
    field: Field,
    frame: Vec<Vec<Entry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tol: Option<f64>,
}

impl Serialize for Subspace {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let f = self.frame();
        let frame = (0..f.nrows())
            .map(|i| {
                (0..f.ncols())
                    .map(|j| match self.field() {
                        Field::Real => Entry::Real(f[(i, j)].re),
                        Field::Complex => Entry::Complex([f[(i, j)].re, f[(i, j)].im]),
                    })
                    .collect()
            })
            .collect();
        SubspaceJson {
            ambient_dim: self.ambient_dim(),
            field: self.field(),
            frame,
            tol: Some(self.tol()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Subspace {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = SubspaceJson::deserialize(d)?;
        if raw.frame.len() != raw.ambient_dim {
            return Err(D::Error::custom(format!(
                "frame has {} rows, ambient_dim is {}",
                raw.frame.len(),
                raw.ambient_dim
            )));
        }
        let m = rows_to_cmat(raw.frame, 0).map_err(D::Error::custom)?;
        if raw.field == Field::Real && m.iter().any(|z| z.im != 0.0) {
            return Err(D::Error::custom("real subspace with complex frame entries"));
        }
        // Frames from files are re-orthonormalized rather than trusted.
        Ok(Subspace::span(raw.field, &m, raw.tol.unwrap_or(DEFAULT_TOL)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subspace_round_trip() {
        let m = RMat::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        let s = Subspace::span_real(&m, DEFAULT_TOL);
        let text = serde_json::to_string(&s).unwrap();
        let back: Subspace = serde_json::from_str(&text).unwrap();
        assert_eq!(back.field(), Field::Real);
        assert!(s.distance(&back).unwrap() < 1e-14);
    }

    #[test]
    fn complex_entries_as_pairs() {
        let v = serde_json::json!([[[0.0, 1.0], 2.0]]);
        let m = cmat_from_value(&v).unwrap();
        assert_eq!(m[(0, 0)], C64::new(0.0, 1.0));
        assert_eq!(m[(0, 1)], C64::new(2.0, 0.0));
        assert!(rmat_from_value(&v).is_err());
    }

    #[test]
    fn zero_subspace_encoding() {
        let z = Subspace::zero(3, Field::Complex);
        let v = serde_json::to_value(&z).unwrap();
        assert_eq!(v["frame"], serde_json::json!([[], [], []]));
        let back: Subspace = serde_json::from_value(v).unwrap();
        assert_eq!(back.dim(), 0);
        assert_eq!(back.ambient_dim(), 3);
    }
}
