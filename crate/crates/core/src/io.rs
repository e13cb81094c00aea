//! JSON matrix files.
//!
//! ```json
//! {"kind": "state", "dims": [2, 2], "data": [[[0.5, 0.0], [0.0, -0.5]], [[0.0, 0.5], [0.5, 0.0]]]}
//! ```
//!
//! `data` holds rows of `[re, im]` pairs. For `choi` files `dims` is
//! `[dim_out, dim_in]` and `data` is the `(dim_out·dim_in)`-square Choi
//! matrix; pure states are `[d, 1]` columns.

use std::fmt;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channels::Channel;
use crate::linalg::ComplexMatrix;
use crate::states::{DensityMatrix, PureState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixKind {
    State,
    Pure,
    Choi,
    Unitary,
}

impl fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::State => "state",
            Self::Pure => "pure",
            Self::Choi => "choi",
            Self::Unitary => "unitary",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum FileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed matrix file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed matrix file: {0}")]
    Shape(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub kind: MatrixKind,
    pub dims: [usize; 2],
    pub data: Vec<Vec<[f64; 2]>>,
    /// Global phase of a canonicalizing unitary `e^{iφ} Q`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase: Option<f64>,
}

impl MatrixFile {
    pub fn from_matrix(kind: MatrixKind, dims: [usize; 2], m: &ComplexMatrix) -> Self {
        let data = m
            .row_iter()
            .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
            .collect();
        Self {
            kind,
            dims,
            data,
            phase: None,
        }
    }

    pub fn from_state(rho: &DensityMatrix) -> Self {
        Self::from_matrix(MatrixKind::State, [rho.dim(), rho.dim()], rho.mat())
    }

    pub fn from_pure(psi: &PureState) -> Self {
        let col = ComplexMatrix::from_column_slice(psi.dim(), 1, psi.amplitudes().as_slice());
        Self::from_matrix(MatrixKind::Pure, [psi.dim(), 1], &col)
    }

    pub fn from_channel(ch: &Channel) -> Self {
        Self::from_matrix(MatrixKind::Choi, [ch.dim_out(), ch.dim_in()], ch.choi())
    }

    pub fn from_unitary(u: &ComplexMatrix, phase: Option<f64>) -> Self {
        let mut f = Self::from_matrix(MatrixKind::Unitary, [u.nrows(), u.ncols()], u);
        f.phase = phase;
        f
    }

    /// Expected `(rows, cols)` of `data`.
    fn data_shape(&self) -> (usize, usize) {
        match self.kind {
            MatrixKind::Choi => {
                let n = self.dims[0] * self.dims[1];
                (n, n)
            }
            _ => (self.dims[0], self.dims[1]),
        }
    }

    pub fn validate(&self) -> Result<(), FileError> {
        let (rows, cols) = self.data_shape();
        if rows == 0 || cols == 0 {
            return Err(FileError::Shape("empty dimensions".into()));
        }
        match self.kind {
            MatrixKind::Pure if cols != 1 => {
                return Err(FileError::Shape(format!(
                    "pure state must be [d, 1], got {:?}",
                    self.dims
                )))
            }
            MatrixKind::State | MatrixKind::Unitary if rows != cols => {
                return Err(FileError::Shape(format!(
                    "{} must be square, got {:?}",
                    self.kind, self.dims
                )))
            }
            _ => {}
        }
        if self.data.len() != rows || self.data.iter().any(|r| r.len() != cols) {
            return Err(FileError::Shape(format!(
                "data does not match declared dims {:?}",
                self.dims
            )));
        }
        if self.data.iter().flatten().flatten().any(|x| !x.is_finite()) {
            return Err(FileError::Shape("non-finite entry".into()));
        }
        if matches!(self.phase, Some(p) if !p.is_finite()) {
            return Err(FileError::Shape("non-finite phase".into()));
        }
        Ok(())
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        let (rows, cols) = self.data_shape();
        ComplexMatrix::from_fn(rows, cols, |r, c| {
            let [re, im] = self.data[r][c];
            Complex64::new(re, im)
        })
    }

    pub fn from_json(text: &str) -> Result<Self, FileError> {
        let f: Self = serde_json::from_str(text)?;
        f.validate()?;
        Ok(f)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self, FileError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| FileError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<(), FileError> {
        let path = path.as_ref();
        let mut text = self.to_json();
        text.push('\n');
        std::fs::write(path, text).map_err(|source| FileError::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{complex_ginibre, seeded};
    use proptest::prelude::*;

    #[test]
    fn parses_documented_example() {
        let f = MatrixFile::from_json(
            r#"{"kind": "state", "dims": [2, 2], "data": [[[0.5, 0.0], [0.0, -0.5]], [[0.0, 0.5], [0.5, 0.0]]]}"#,
        )
        .unwrap();
        assert_eq!(f.kind, MatrixKind::State);
        assert_eq!(f.to_matrix()[(0, 1)], Complex64::new(0.0, -0.5));
    }

    #[test]
    fn rejects_bad_shapes() {
        for bad in [
            r#"{"kind": "state", "dims": [2, 2], "data": [[[1, 0]]]}"#,
            r#"{"kind": "pure", "dims": [2, 2], "data": [[[1, 0], [0, 0]], [[0, 0], [0, 0]]]}"#,
            r#"{"kind": "choi", "dims": [2, 2], "data": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]}"#,
            r#"{"kind": "matrix", "dims": [1, 1], "data": [[[1, 0]]]}"#,
            r#"{"kind": "state", "dims": [1, 1], "data": [[[1, 0]]], "extra": 1}"#,
            r#"{"kind": "state", "dims": [0, 0], "data": []}"#,
            "not json",
        ] {
            assert!(MatrixFile::from_json(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn choi_shape_uses_product_dimension() {
        let ch = Channel::identity(2);
        let f = MatrixFile::from_channel(&ch);
        assert_eq!(f.dims, [2, 2]);
        assert_eq!(f.data.len(), 4);
        assert!(f.validate().is_ok());
    }

    proptest! {
        #[test]
        fn write_read_is_bit_identical(seed in any::<u64>(), rows in 1usize..5, phase in proptest::option::of(-10.0f64..10.0)) {
            let m = complex_ginibre(rows, rows, &mut seeded(seed)).map(|z| z * Complex64::new(1.0 / 3.0, 0.0));
            let mut f = MatrixFile::from_matrix(MatrixKind::Unitary, [rows, rows], &m);
            f.phase = phase;
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("m.json");
            f.write(&path).unwrap();
            let back = MatrixFile::read(&path).unwrap();
            prop_assert_eq!(&back, &f);
            let bits = |x: &MatrixFile| x.data.iter().flatten().flatten().map(|v| v.to_bits()).collect::<Vec<_>>();
            prop_assert_eq!(bits(&back), bits(&f));
            prop_assert_eq!(std::fs::read_to_string(&path).unwrap(), back.to_json() + "\n");
        }
    }
}
