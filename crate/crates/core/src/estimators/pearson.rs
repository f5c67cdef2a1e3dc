use super::{finite_column, two_sided_t, EstimateError};
use crate::Dataset;
use serde::{Deserialize, Serialize};
use std::io::Write;

/// Pearson correlation with its two-sided t-test p-value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrResult {
    pub a: String,
    pub b: String,
    pub r: f64,
    pub p: f64,
    pub n: usize,
}

impl CorrResult {
    pub const CSV_HEADER: [&'static str; 5] = ["a", "b", "r", "p", "n"];

    pub fn write_csv<W: Write>(rows: &[CorrResult], writer: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(Self::CSV_HEADER)?;
        for c in rows {
            w.write_record([c.a.clone(), c.b.clone(), c.r.to_string(), c.p.to_string(), c.n.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn pearson(data: &Dataset, a: &str, b: &str) -> Result<CorrResult, EstimateError> {
    let n = data.n_rows();
    if n < 3 {
        return Err(EstimateError::InsufficientData { needed: 2, got: n });
    }
    let (x, y) = (finite_column(data, a)?, finite_column(data, b)?);
    let r = correlation(x, y).map_err(|which| EstimateError::DegenerateColumn(if which == 0 { a } else { b }.to_string()))?;
    let p = if r.abs() >= 1.0 {
        0.0
    } else {
        let df = (n - 2) as f64;
        two_sided_t(r * (df / (1.0 - r * r)).sqrt(), df)
    };
    Ok(CorrResult { a: a.to_string(), b: b.to_string(), r, p, n })
}

/// Sample correlation; `Err(i)` names the zero-variance input.
pub(crate) fn correlation(x: &[f64], y: &[f64]) -> Result<f64, usize> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxx += da * da;
        syy += db * db;
        sxy += da * db;
    }
    if sxx == 0.0 {
        return Err(0);
    }
    if syy == 0.0 {
        return Err(1);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}
