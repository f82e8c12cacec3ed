//! JSON input documents. Complex numbers are `[re, im]` pairs and matrices are
//! row-major nested arrays.

use std::io::Read;
use std::path::Path;

use annulus_dilation::{CMat64, Complex};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::config::check_schema;
use crate::failure::Failure;

pub type Pair = [f64; 2];
pub type MatrixRows = Vec<Vec<Pair>>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixInput {
    pub schema: Option<String>,
    pub matrix: MatrixRows,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TupleInput {
    pub schema: Option<String>,
    pub tuple: Vec<MatrixRows>,
}

/// Per-face sample grids. Face `f` puts axis `j` on the inner circle when bit
/// `j` of `f` is set; each face holds `P^m` samples at angles `2πi/P`, last
/// axis fastest.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirichletInput {
    pub schema: Option<String>,
    pub dim: usize,
    pub order: Option<usize>,
    pub faces: Vec<Vec<Pair>>,
}

pub trait Versioned {
    fn schema(&self) -> Option<&str>;
}

macro_rules! versioned {
    ($($t:ty),*) => {
        $(impl Versioned for $t {
            fn schema(&self) -> Option<&str> {
                self.schema.as_deref()
            }
        })*
    };
}

versioned!(MatrixInput, TupleInput, DirichletInput);

/// Reads the input document from `path`, or stdin when absent.
pub fn read_input<T: DeserializeOwned + Versioned>(path: Option<&Path>) -> Result<T, Failure> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", p.display())))?,
        None => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| Failure::Usage(format!("cannot read stdin: {e}")))?;
            s
        }
    };
    let doc: T = serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("malformed input: {e}")))?;
    check_schema(doc.schema())?;
    Ok(doc)
}

pub fn complex(p: &Pair) -> Complex<f64> {
    Complex::new(p[0], p[1])
}

pub fn pair(z: Complex<f64>) -> Pair {
    [z.re, z.im]
}

pub fn square_matrix(rows: &MatrixRows) -> Result<CMat64, Failure> {
    let d = rows.len();
    if d == 0 || rows.iter().any(|row| row.len() != d) {
        return Err(Failure::Usage("matrix must be square and nonempty".into()));
    }
    if rows.iter().flatten().flatten().any(|x| !x.is_finite()) {
        return Err(Failure::Usage("matrix entries must be finite".into()));
    }
    Ok(CMat64::from_fn(d, d, |i, j| complex(&rows[i][j])))
}

pub fn matrix_rows(m: &CMat64) -> MatrixRows {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| pair(m[(i, j)])).collect()).collect()
}
