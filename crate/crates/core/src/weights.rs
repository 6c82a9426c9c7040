//! Topic weights `W` given an estimated topic matrix.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{clip_renormalize, CscMatrix};

/// Ridge penalty used by default in the ranking pipeline.
pub const DEFAULT_RIDGE_LAMBDA: f64 = 0.3;

#[derive(Debug, Clone, PartialEq)]
pub struct TopicWeights {
    /// `K x n`, columns on the simplex.
    pub w_hat: DMatrix<f64>,
    pub dominant: Vec<usize>,
    /// Documents with no in-vocabulary mass, given uniform weights.
    pub empty_docs: Vec<usize>,
}

/// `w_i = (A'A + lambda I)^{-1} A' d_i`, clipped to the simplex.
pub fn estimate_weights_ridge(
    a_hat: &DMatrix<f64>,
    d: &CscMatrix<f64>,
    lambda: f64,
) -> Result<TopicWeights> {
    if !(lambda >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "lambda must be nonnegative, got {lambda}"
        )));
    }
    let k = a_hat.ncols();
    let gram = a_hat.transpose() * a_hat + DMatrix::identity(k, k) * lambda;
    solve_columns(a_hat, d, &gram, None)
}

/// Weighted least squares with `Theta = diag(M)^{-1/2}`, clipped to the simplex.
pub fn estimate_weights_wls(
    a_hat: &DMatrix<f64>,
    d: &CscMatrix<f64>,
    m_diag: &[f64],
) -> Result<TopicWeights> {
    if m_diag.len() != a_hat.nrows() {
        return Err(Error::ShapeMismatch(
            "M diagonal length differs from p".into(),
        ));
    }
    if m_diag.iter().any(|&m| !(m > 0.0)) {
        return Err(Error::InvalidArgument(
            "M diagonal must be strictly positive".into(),
        ));
    }
    let inv_m: Vec<f64> = m_diag.iter().map(|m| 1.0 / m).collect();
    let weighted = DMatrix::from_fn(a_hat.nrows(), a_hat.ncols(), |j, c| {
        a_hat[(j, c)] * inv_m[j]
    });
    let gram = weighted.transpose() * a_hat;
    solve_columns(a_hat, d, &gram, Some(&inv_m))
}

fn solve_columns(
    a_hat: &DMatrix<f64>,
    d: &CscMatrix<f64>,
    gram: &DMatrix<f64>,
    row_weights: Option<&[f64]>,
) -> Result<TopicWeights> {
    let (p, k) = a_hat.shape();
    if d.nrows() != p {
        return Err(Error::ShapeMismatch(format!(
            "topic matrix has {p} rows, frequency matrix has {}",
            d.nrows()
        )));
    }
    let chol = crate::linalg::cholesky_checked(gram.clone()).ok_or(Error::SingularSystem)?;
    let n = d.ncols();

    enum Col {
        Ok(Vec<f64>),
        Empty,
        AllZero,
    }
    let cols: Vec<Col> = (0..n)
        .into_par_iter()
        .map(|i| {
            let (rows, vals) = d.column(i);
            if vals.iter().all(|&v| v == 0.0) {
                return Col::Empty;
            }
            let mut rhs = DVector::zeros(k);
            for (&j, &v) in rows.iter().zip(vals) {
                let v = match row_weights {
                    Some(w) => v * w[j],
                    None => v,
                };
                for c in 0..k {
                    rhs[c] += a_hat[(j, c)] * v;
                }
            }
            let mut w: Vec<f64> = chol.solve(&rhs).iter().cloned().collect();
            match clip_renormalize(&mut w) {
                Some(()) => Col::Ok(w),
                None => Col::AllZero,
            }
        })
        .collect();

    let mut w_hat = DMatrix::zeros(k, n);
    let mut empty_docs = Vec::new();
    for (i, col) in cols.into_iter().enumerate() {
        match col {
            Col::Ok(w) => w_hat.column_mut(i).copy_from_slice(&w),
            Col::Empty => {
                empty_docs.push(i);
                w_hat.column_mut(i).fill(1.0 / k as f64);
            }
            Col::AllZero => return Err(Error::AllZeroSolution { column: i }),
        }
    }
    if !empty_docs.is_empty() {
        log::warn!(
            "{} empty documents given uniform topic weights",
            empty_docs.len()
        );
    }
    let dominant = dominant_topic(&w_hat);
    Ok(TopicWeights {
        w_hat,
        dominant,
        empty_docs,
    })
}

/// Column argmax, smallest index on ties.
pub fn dominant_topic(w_hat: &DMatrix<f64>) -> Vec<usize> {
    w_hat
        .column_iter()
        .map(|col| {
            let mut best = 0;
            for k in 1..col.len() {
                if col[k] > col[best] {
                    best = k;
                }
            }
            best
        })
        .collect()
}

/// The `m` documents with the largest weight on topic `k`, ties to the lower index.
pub fn representative_docs(w_hat: &DMatrix<f64>, k: usize, m: usize) -> Vec<usize> {
    let row = w_hat.row(k);
    let mut idx: Vec<usize> = (0..w_hat.ncols()).collect();
    idx.sort_by(|&a, &b| {
        row[b]
            .partial_cmp(&row[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    idx.truncate(m);
    idx
}
