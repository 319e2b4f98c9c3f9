//! Estimates from weighted rows: the naive LW ratio and the CS-LW ratio with
//! residual expectations estimated from the filled weight matrix.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::analysis::NodeId;
use crate::error::{Error, Result};
use crate::state::WeightedRow;

pub const BATCHES: usize = 30;

pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    if m == f64::INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Lw,
    Cslw,
    Focslw,
    Exact,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Lw => "lw",
            Algorithm::Cslw => "cslw",
            Algorithm::Focslw => "focslw",
            Algorithm::Exact => "exact",
        }
    }

    pub fn from_name(s: &str) -> Option<Algorithm> {
        Some(match s {
            "lw" => Algorithm::Lw,
            "cslw" => Algorithm::Cslw,
            "focslw" => Algorithm::Focslw,
            "exact" => Algorithm::Exact,
            _ => return None,
        })
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: Option<f64>,
    pub n_samples: usize,
    pub algorithm: Algorithm,
}

/// Self-normalized ratio Σ f·w / Σ w over (f, log w) pairs.
fn ratio(pairs: &[(bool, f64)]) -> Option<f64> {
    let all: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let den = log_sum_exp(&all);
    if den == f64::NEG_INFINITY || den.is_nan() {
        return None;
    }
    let hits: Vec<f64> = pairs.iter().filter(|p| p.0).map(|p| p.1).collect();
    Some((log_sum_exp(&hits) - den).exp())
}

/// Batch-means standard error over 30 contiguous batches; `None` below 30 rows.
/// Batches whose weights are all zero are skipped.
pub fn std_error(pairs: &[(bool, f64)]) -> Option<f64> {
    let m = pairs.len();
    if m < BATCHES {
        return None;
    }
    let means: Vec<f64> = (0..BATCHES).filter_map(|b| ratio(&pairs[b * m / BATCHES..(b + 1) * m / BATCHES])).collect();
    let k = means.len();
    if k < 2 {
        return None;
    }
    let mean = means.iter().sum::<f64>() / k as f64;
    let var = means.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (k - 1) as f64;
    Some((var / k as f64).sqrt())
}

fn finish(pairs: &[(bool, f64)], algorithm: Algorithm) -> Result<Estimate> {
    let value = ratio(pairs).ok_or(Error::ZeroWeight)?;
    Ok(Estimate { value, std_error: std_error(pairs), n_samples: pairs.len(), algorithm })
}

/// The plain likelihood-weighting ratio using every weight recorded in each row.
pub fn estimate_naive(rows: &[WeightedRow], algorithm: Algorithm) -> Result<Estimate> {
    let pairs: Vec<(bool, f64)> = rows.iter().map(|r| (r.f, r.log_weight())).collect();
    finish(&pairs, algorithm)
}

/// Rows over the diagnostic universe E⋆; every row holds a cell for every column.
#[derive(Clone, Debug)]
pub struct WeightMatrix {
    pub columns: Vec<NodeId>,
    pub rows: Vec<WeightedRow>,
    cells: Vec<Vec<f64>>,
}

impl WeightMatrix {
    pub fn new(columns: Vec<NodeId>, rows: Vec<WeightedRow>) -> Result<WeightMatrix> {
        let index: HashMap<NodeId, usize> = columns.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut cells = Vec::with_capacity(rows.len());
        for (m, row) in rows.iter().enumerate() {
            let mut line = vec![f64::NAN; columns.len()];
            for &(e, w) in row.natural.iter().chain(&row.filled) {
                let i = *index.get(&e).ok_or_else(|| {
                    Error::Invariant(format!("row {m} weighs node {e} outside the diagnostic universe"))
                })?;
                if !line[i].is_nan() {
                    return Err(Error::Invariant(format!("row {m} weighs node {e} twice")));
                }
                line[i] = w;
            }
            if line.iter().any(|w| w.is_nan()) {
                return Err(Error::Invariant(format!("row {m} has missing weight cells")));
            }
            cells.push(line);
        }
        Ok(WeightMatrix { columns, rows, cells })
    }

    /// log Ê[∏_{e∈R} W_e] = log (1/M) Σ_r ∏_{e∈R} w_e[r], for residual column set `r`.
    pub fn log_expected(&self, residual: &[usize]) -> f64 {
        let sums: Vec<f64> = self.cells.iter().map(|line| residual.iter().map(|&i| line[i]).sum()).collect();
        log_sum_exp(&sums) - (self.rows.len() as f64).ln()
    }
}

/// The CS-LW ratio: natural weight times the estimated expected weight of the
/// residual evidence. Rows without residuals use their natural weight as is.
pub fn estimate_cslw(matrix: &WeightMatrix, algorithm: Algorithm) -> Result<Estimate> {
    let index: HashMap<NodeId, usize> = matrix.columns.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut cache: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    let mut pairs = Vec::with_capacity(matrix.rows.len());
    for row in &matrix.rows {
        let natural = row.natural_log_weight();
        if row.filled.is_empty() {
            pairs.push((row.f, natural));
            continue;
        }
        let mut key: Vec<usize> = row.filled.iter().map(|(e, _)| index[e]).collect();
        key.sort_unstable();
        let lx = *cache.entry(key).or_insert_with_key(|k| matrix.log_expected(k));
        pairs.push((row.f, natural + lx));
    }
    finish(&pairs, algorithm)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(f: bool, natural: &[(NodeId, f64)], filled: &[(NodeId, f64)]) -> WeightedRow {
        let ln = |v: &[(NodeId, f64)]| v.iter().map(|&(e, w)| (e, w.ln())).collect();
        WeightedRow { f, natural: ln(natural), filled: ln(filled) }
    }

    #[test]
    fn naive_ratio() {
        let rows = [row(true, &[(0, 0.5)], &[]), row(false, &[(0, 0.5)], &[])];
        let e = estimate_naive(&rows, Algorithm::Lw).unwrap();
        assert!((e.value - 0.5).abs() < 1e-15);
        assert_eq!(e.std_error, None);
        assert_eq!(e.n_samples, 2);
    }

    #[test]
    fn zero_denominator() {
        let rows = [row(true, &[(0, 0.0)], &[])];
        assert_eq!(estimate_naive(&rows, Algorithm::Lw), Err(Error::ZeroWeight));
    }

    #[test]
    fn cslw_two_row_example() {
        let rows = vec![row(true, &[(1, 0.5)], &[(2, 0.3)]), row(false, &[(1, 0.5), (2, 0.4)], &[])];
        let m = WeightMatrix::new(vec![1, 2], rows).unwrap();
        assert!((m.log_expected(&[1]).exp() - 0.35).abs() < 1e-12);
        let e = estimate_cslw(&m, Algorithm::Cslw).unwrap();
        assert!((e.value - 0.175 / 0.375).abs() < 1e-12);
    }

    #[test]
    fn incomplete_matrix_rejected() {
        assert!(WeightMatrix::new(vec![1, 2], vec![row(true, &[(1, 0.5)], &[])]).is_err());
        assert!(WeightMatrix::new(vec![1], vec![row(true, &[(1, 0.5)], &[(1, 0.5)])]).is_err());
    }

    #[test]
    fn std_error_constant_rows() {
        let pairs = vec![(true, 0.0); 300];
        assert_eq!(std_error(&pairs), Some(0.0));
        assert_eq!(std_error(&pairs[..29]), None);
    }
}
