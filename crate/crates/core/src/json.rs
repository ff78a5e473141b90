//! JSON forms of series and matrices.
//!
//! A series is `{"rows", "cols", "degree", "coeffs", "decay_hint"?}` where
//! `coeffs[j]` lists the entries of the `j`-th coefficient row-major as
//! `[re, im]` pairs. Numbers pass through `f64` whatever the working
//! precision, which is lossless for both supported scalars.

use crate::error::{HbError, Result};
use crate::linalg::CMat;
use crate::scalar::{lit, to_f64, Cx, Real};
use crate::series::{MatrixTaylorSeries, TaylorSeries};
use serde::{Deserialize, Serialize};

pub type Entry = [f64; 2];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub rows: usize,
    pub cols: usize,
    pub degree: usize,
    pub coeffs: Vec<Vec<Entry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay_hint: Option<f64>,
}

pub fn entry<T: Real>(z: Cx<T>) -> Entry {
    [to_f64(z.re), to_f64(z.im)]
}

pub fn from_entry<T: Real>(e: &Entry) -> Cx<T> {
    Cx::new(lit(e[0]), lit(e[1]))
}

pub fn matrix_to_json<T: Real>(m: &CMat<T>) -> Vec<Entry> {
    m.as_slice().iter().map(|&z| entry(z)).collect()
}

pub fn matrix_from_json<T: Real>(rows: usize, cols: usize, data: &[Entry]) -> Result<CMat<T>> {
    if data.len() != rows * cols {
        return Err(HbError::Schema(format!(
            "expected {} matrix entries, found {}",
            rows * cols,
            data.len()
        )));
    }
    Ok(CMat::from_vec(
        rows,
        cols,
        data.iter().map(from_entry).collect(),
    ))
}

impl SeriesJson {
    pub fn from_matrix_series<T: Real>(s: &MatrixTaylorSeries<T>) -> Self {
        SeriesJson {
            rows: s.rows(),
            cols: s.cols(),
            degree: s.degree(),
            coeffs: s.coeffs().iter().map(matrix_to_json).collect(),
            decay_hint: None,
        }
    }

    pub fn from_taylor<T: Real>(s: &TaylorSeries<T>) -> Self {
        SeriesJson {
            rows: 1,
            cols: 1,
            degree: s.degree(),
            coeffs: s.coeffs().iter().map(|&z| vec![entry(z)]).collect(),
            decay_hint: s.decay_hint().map(to_f64),
        }
    }

    fn check(&self) -> Result<()> {
        if self.coeffs.is_empty() || self.coeffs.len() != self.degree + 1 {
            return Err(HbError::Schema(format!(
                "series declares degree {} but has {} coefficients",
                self.degree,
                self.coeffs.len()
            )));
        }
        if let Some(h) = self.decay_hint {
            if !(h > 0.0) {
                return Err(HbError::Schema(format!(
                    "decay_hint must be positive, got {h}"
                )));
            }
        }
        Ok(())
    }

    pub fn to_matrix_series<T: Real>(&self) -> Result<MatrixTaylorSeries<T>> {
        self.check()?;
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| matrix_from_json(self.rows, self.cols, c))
            .collect::<Result<Vec<_>>>()?;
        MatrixTaylorSeries::try_from_coeffs(self.rows, self.cols, coeffs)
    }

    pub fn to_taylor<T: Real>(&self) -> Result<TaylorSeries<T>> {
        self.check()?;
        if (self.rows, self.cols) != (1, 1) {
            return Err(HbError::Schema(format!(
                "scalar series expected, found {}x{}",
                self.rows, self.cols
            )));
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| match c.as_slice() {
                [e] => Ok(from_entry(e)),
                _ => Err(HbError::Schema(
                    "scalar coefficient must hold one entry".into(),
                )),
            })
            .collect::<Result<Vec<_>>>()?;
        let s = TaylorSeries::new(coeffs);
        Ok(match self.decay_hint {
            Some(h) => s.with_decay_hint(lit(h)),
            None => s,
        })
    }
}

/// Reads a scalar series from JSON text.
pub fn taylor_from_str<T: Real>(text: &str) -> Result<TaylorSeries<T>> {
    let parsed: SeriesJson = serde_json::from_str(text)?;
    parsed.to_taylor()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    #[test]
    fn round_trips() {
        let s = TaylorSeries::<f64>::new(vec![cx(0.1, -0.3), cx(1.0 / 3.0, 2.0f64.sqrt())])
            .with_decay_hint(1.5);
        let text = serde_json::to_string(&SeriesJson::from_taylor(&s)).unwrap();
        assert_eq!(taylor_from_str::<f64>(&text).unwrap(), s);
        let m = MatrixTaylorSeries::from_coeffs(
            1,
            2,
            vec![
                CMat::row_vector(&[cx(1.0, 0.0), cx(0.0, 1e-300)]),
                CMat::row_vector(&[cx(-0.0, 7.0), cx(3.0, 4.0)]),
            ],
        );
        let back: MatrixTaylorSeries<f64> = SeriesJson::from_matrix_series(&m)
            .to_matrix_series()
            .unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn malformed_input() {
        assert!(matches!(
            taylor_from_str::<f64>("{\"rows\":1"),
            Err(HbError::Schema(_))
        ));
        let bad = r#"{"rows":1,"cols":1,"degree":2,"coeffs":[[[1,0]]]}"#;
        assert!(matches!(
            taylor_from_str::<f64>(bad),
            Err(HbError::Schema(_))
        ));
        let hint = r#"{"rows":1,"cols":1,"degree":0,"coeffs":[[[1,0]]],"decay_hint":-1}"#;
        assert!(matches!(
            taylor_from_str::<f64>(hint),
            Err(HbError::Schema(_))
        ));
    }
}
