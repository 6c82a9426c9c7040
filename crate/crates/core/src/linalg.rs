//! Sparse storage and the dense/truncated SVD routines used by the spectral
//! estimator.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Compressed sparse column matrix.
///
/// Row indices inside each column are strictly increasing and explicit zeros
/// are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct CscMatrix<T> {
    nrows: usize,
    ncols: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<T>,
}

impl<T> CscMatrix<T>
where
    T: Copy + PartialEq + Default + std::ops::AddAssign,
{
    /// Builds a matrix from `(row, col, value)` triplets. Duplicates are summed,
    /// zeros are dropped.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, T)>,
    ) -> Result<Self> {
        let mut entries: Vec<(usize, usize, T)> = triplets.into_iter().collect();
        for &(r, c, _) in &entries {
            if r >= nrows || c >= ncols {
                return Err(Error::InvalidShape(format!(
                    "entry ({r}, {c}) outside a {nrows}x{ncols} matrix"
                )));
            }
        }
        entries.sort_by_key(|&(r, c, _)| (c, r));

        let mut col_ptr = vec![0usize; ncols + 1];
        let mut row_idx = Vec::with_capacity(entries.len());
        let mut values: Vec<T> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in entries {
            if last == Some((r, c)) {
                *values.last_mut().expect("previous entry") += v;
                continue;
            }
            row_idx.push(r);
            values.push(v);
            col_ptr[c + 1] += 1;
            last = Some((r, c));
        }
        for c in 0..ncols {
            col_ptr[c + 1] += col_ptr[c];
        }
        let mut m = CscMatrix {
            nrows,
            ncols,
            col_ptr,
            row_idx,
            values,
        };
        m.prune_zeros();
        Ok(m)
    }

    /// Builds a matrix column by column from sorted `(row, value)` lists.
    pub fn from_columns(nrows: usize, columns: Vec<Vec<(usize, T)>>) -> Result<Self> {
        let ncols = columns.len();
        let mut col_ptr = Vec::with_capacity(ncols + 1);
        col_ptr.push(0);
        let mut row_idx = Vec::new();
        let mut values = Vec::new();
        for (c, col) in columns.into_iter().enumerate() {
            let mut prev: Option<usize> = None;
            for (r, v) in col {
                if r >= nrows || prev.is_some_and(|p| p >= r) {
                    return Err(Error::InvalidShape(format!(
                        "column {c}: row {r} out of range or out of order"
                    )));
                }
                prev = Some(r);
                if v != T::default() {
                    row_idx.push(r);
                    values.push(v);
                }
            }
            col_ptr.push(row_idx.len());
        }
        Ok(CscMatrix {
            nrows,
            ncols,
            col_ptr,
            row_idx,
            values,
        })
    }

    fn prune_zeros(&mut self) {
        if self.values.iter().all(|v| *v != T::default()) {
            return;
        }
        let mut col_ptr = vec![0usize; self.ncols + 1];
        let mut row_idx = Vec::with_capacity(self.row_idx.len());
        let mut values = Vec::with_capacity(self.values.len());
        for c in 0..self.ncols {
            for k in self.col_ptr[c]..self.col_ptr[c + 1] {
                if self.values[k] != T::default() {
                    row_idx.push(self.row_idx[k]);
                    values.push(self.values[k]);
                }
            }
            col_ptr[c + 1] = row_idx.len();
        }
        self.col_ptr = col_ptr;
        self.row_idx = row_idx;
        self.values = values;
    }
}

impl<T: Copy> CscMatrix<T> {
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Row indices and values of column `c`.
    pub fn column(&self, c: usize) -> (&[usize], &[T]) {
        let range = self.col_ptr[c]..self.col_ptr[c + 1];
        (&self.row_idx[range.clone()], &self.values[range])
    }

    pub fn get(&self, r: usize, c: usize) -> Option<T> {
        let (rows, vals) = self.column(c);
        rows.binary_search(&r).ok().map(|k| vals[k])
    }

    /// Iterates `(row, col, value)` in column-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.ncols).flat_map(move |c| {
            let (rows, vals) = self.column(c);
            rows.iter().zip(vals).map(move |(&r, &v)| (r, c, v))
        })
    }

    /// Applies `f(row, col, value)` to every stored entry, keeping the pattern.
    pub fn map_with_index<U: Copy>(&self, mut f: impl FnMut(usize, usize, T) -> U) -> CscMatrix<U> {
        let mut values = Vec::with_capacity(self.values.len());
        for c in 0..self.ncols {
            for k in self.col_ptr[c]..self.col_ptr[c + 1] {
                values.push(f(self.row_idx[k], c, self.values[k]));
            }
        }
        CscMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            col_ptr: self.col_ptr.clone(),
            row_idx: self.row_idx.clone(),
            values,
        }
    }

    /// Keeps the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> CscMatrix<T> {
        let mut col_ptr = Vec::with_capacity(cols.len() + 1);
        col_ptr.push(0);
        let mut row_idx = Vec::new();
        let mut values = Vec::new();
        for &c in cols {
            let (rows, vals) = self.column(c);
            row_idx.extend_from_slice(rows);
            values.extend_from_slice(vals);
            col_ptr.push(row_idx.len());
        }
        CscMatrix {
            nrows: self.nrows,
            ncols: cols.len(),
            col_ptr,
            row_idx,
            values,
        }
    }

    /// Returns the transpose, still in CSC layout (i.e. the CSR layout of `self`).
    pub fn transpose(&self) -> CscMatrix<T> {
        let mut counts = vec![0usize; self.nrows + 1];
        for &r in &self.row_idx {
            counts[r + 1] += 1;
        }
        for r in 0..self.nrows {
            counts[r + 1] += counts[r];
        }
        let col_ptr = counts.clone();
        let mut next = counts;
        let mut row_idx = vec![0usize; self.nnz()];
        let mut values: Vec<T> = self.values.clone();
        for c in 0..self.ncols {
            for k in self.col_ptr[c]..self.col_ptr[c + 1] {
                let r = self.row_idx[k];
                let dst = next[r];
                next[r] += 1;
                row_idx[dst] = c;
                values[dst] = self.values[k];
            }
        }
        CscMatrix {
            nrows: self.ncols,
            ncols: self.nrows,
            col_ptr,
            row_idx,
            values,
        }
    }
}

impl<T: Copy + Into<f64>> CscMatrix<T> {
    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for (r, c, v) in self.triplets() {
            m[(r, c)] = v.into();
        }
        m
    }

    pub fn column_sums(&self) -> Vec<f64> {
        (0..self.ncols)
            .map(|c| self.column(c).1.iter().map(|&v| v.into()).sum())
            .collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.nrows];
        for (r, _, v) in self.triplets() {
            sums[r] += v.into();
        }
        sums
    }
}

/// A sparse real matrix paired with its transpose so that both `A·X` and
/// `A'·X` run column-parallel with a fixed summation order.
#[derive(Debug, Clone)]
pub struct SparseOperator {
    a: CscMatrix<f64>,
    at: CscMatrix<f64>,
}

impl SparseOperator {
    pub fn new(a: CscMatrix<f64>) -> Self {
        let at = a.transpose();
        SparseOperator { a, at }
    }

    pub fn nrows(&self) -> usize {
        self.a.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.a.ncols()
    }

    pub fn matrix(&self) -> &CscMatrix<f64> {
        &self.a
    }

    /// `A·X`, where `X` has `ncols()` rows.
    pub fn mul(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        transpose_times(&self.at, x)
    }

    /// `A'·X`, where `X` has `nrows()` rows.
    pub fn mul_t(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        transpose_times(&self.a, x)
    }
}

/// Computes `S'·X` for CSC `S`: output row `c` is the sparse column `c` of `S`
/// dotted against `X`. Each output row is produced by one task, so the result
/// does not depend on thread scheduling.
fn transpose_times(s: &CscMatrix<f64>, x: &DMatrix<f64>) -> DMatrix<f64> {
    assert_eq!(s.nrows(), x.nrows(), "dimension mismatch");
    let b = x.ncols();
    if b == 0 {
        return DMatrix::zeros(s.ncols(), 0);
    }
    // row-major copy of x so each sparse entry reads one contiguous row
    let xt = x.transpose();
    let xr = xt.as_slice();
    let mut out = vec![0.0; s.ncols() * b];
    out.par_chunks_mut(b).enumerate().for_each(|(c, acc)| {
        let (idx, vals) = s.column(c);
        for (&r, &v) in idx.iter().zip(vals) {
            let row = &xr[r * b..(r + 1) * b];
            for (a, &xv) in acc.iter_mut().zip(row) {
                *a += v * xv;
            }
        }
    });
    DMatrix::from_row_slice(s.ncols(), b, &out)
}

/// Leading singular triplets: `u` is `nrows x k`, `v` is `ncols x k`.
#[derive(Debug, Clone)]
pub struct TruncatedSvd {
    pub u: DMatrix<f64>,
    pub singular_values: Vec<f64>,
    pub v: DMatrix<f64>,
    /// Estimates of the singular values after the first `k`: exact for the
    /// dense path, Ritz values of the extra block columns otherwise.
    pub trailing: Vec<f64>,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvdOptions {
    pub oversample: usize,
    pub max_iterations: usize,
    /// Stop once every residual `|A v_k - s_k u_k|` is below `tol * s_1`.
    pub tol: f64,
    pub seed: u64,
    /// Problems whose smaller side is at most this go straight to a dense SVD.
    pub dense_cutoff: usize,
}

impl Default for SvdOptions {
    fn default() -> Self {
        SvdOptions {
            oversample: 10,
            max_iterations: 2000,
            tol: 1e-11,
            seed: 0x5c0e,
            dense_cutoff: 64,
        }
    }
}

/// Full SVD of a dense matrix, sorted by decreasing singular value.
pub fn dense_svd(a: &DMatrix<f64>, k: usize) -> TruncatedSvd {
    let (m, n) = a.shape();
    let k = k.min(m.min(n));
    let svd = a.clone().svd(true, true);
    let u = svd.u.expect("u requested");
    let vt = svd.v_t.expect("v_t requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| {
        svd.singular_values[j]
            .partial_cmp(&svd.singular_values[i])
            .expect("finite singular values")
            .then(i.cmp(&j))
    });
    let trailing = order[k..].iter().map(|&i| svd.singular_values[i]).collect();
    let order = &order[..k];
    TruncatedSvd {
        u: DMatrix::from_fn(m, k, |r, c| u[(r, order[c])]),
        singular_values: order.iter().map(|&i| svd.singular_values[i]).collect(),
        v: DMatrix::from_fn(n, k, |r, c| vt[(order[c], r)]),
        trailing,
        iterations: 0,
    }
}

const RITZ_INTERVAL: usize = 4;

/// Top-`k` SVD of a sparse operator by block subspace iteration with
/// Rayleigh–Ritz extraction. Deterministic for a fixed `opts.seed`.
pub fn truncated_svd(op: &SparseOperator, k: usize, opts: &SvdOptions) -> TruncatedSvd {
    let (m, n) = (op.nrows(), op.ncols());
    let k = k.min(m.min(n));
    let block = (k + opts.oversample).min(m.min(n));
    if m.min(n) <= opts.dense_cutoff || block == m.min(n) {
        return dense_svd(&op.matrix().to_dense(), k);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let start = DMatrix::from_fn(m, block, |_, _| StandardNormal.sample(&mut rng));
    let mut q = orthonormalize(&start);
    let mut iterations = 0;
    loop {
        iterations += 1;
        // z = A'q, so q'A = z'.
        let z = op.mul_t(&q);
        let w = op.mul(&z);
        if iterations % RITZ_INTERVAL != 0 && iterations < opts.max_iterations {
            q = orthonormalize(&w);
            continue;
        }
        let svd = z.clone().svd(true, true);
        let uz = svd.u.expect("u requested");
        let vzt = svd.v_t.expect("v_t requested");
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&i, &j| {
            svd.singular_values[j]
                .partial_cmp(&svd.singular_values[i])
                .expect("finite singular values")
                .then(i.cmp(&j))
        });
        let sigma: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
        // Left vectors of q'A are columns of V_z; right vectors are columns of U_z.
        let left_small = DMatrix::from_fn(block, block, |r, c| vzt[(order[c], r)]);
        let u_full = &q * &left_small;

        let s1 = sigma[0].max(f64::MIN_POSITIVE);
        let mut worst = 0.0f64;
        for (c, &s) in sigma.iter().enumerate().take(k) {
            if s <= s1 * 1e-14 {
                continue;
            }
            // A v_c = A z V_z e_c / s_c = w V_z e_c / s_c.
            let av = (&w * left_small.column(c)) / s;
            let resid = (av - u_full.column(c) * s).norm();
            worst = worst.max(resid);
        }

        if worst <= opts.tol * s1 || iterations >= opts.max_iterations {
            if iterations >= opts.max_iterations && worst > opts.tol * s1 {
                log::warn!(
                    "subspace iteration stopped at {iterations} iterations with residual {:.3e}",
                    worst / s1
                );
            }
            let u = u_full.columns(0, k).into_owned();
            let v = DMatrix::from_fn(n, k, |r, c| uz[(r, order[c])]);
            return TruncatedSvd {
                u,
                singular_values: sigma[..k].to_vec(),
                v,
                trailing: sigma[k..].to_vec(),
                iterations,
            };
        }
        q = orthonormalize(&w);
    }
}

/// Orthonormal basis for the column space via Householder QR (thin Q).
pub fn orthonormalize(a: &DMatrix<f64>) -> DMatrix<f64> {
    let qr = a.clone().qr();
    qr.q()
}

/// 2-norm condition number of a square matrix.
pub fn condition_number(a: &DMatrix<f64>) -> f64 {
    let s = a.clone().singular_values();
    let max = s.iter().cloned().fold(0.0, f64::max);
    let min = s.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Clips negative entries to zero and rescales to unit sum. Returns `None`
/// when nothing positive remains.
/// Cholesky factorization that also rejects numerically singular matrices,
/// judged by the ratio of the smallest to the largest pivot.
pub fn cholesky_checked(a: DMatrix<f64>) -> Option<nalgebra::Cholesky<f64, nalgebra::Dyn>> {
    let chol = a.cholesky()?;
    let diag = chol.l_dirty().diagonal();
    let max = diag.amax();
    let min = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    (max > 0.0 && min > 1e-6 * max).then_some(chol)
}

pub fn clip_renormalize(v: &mut [f64]) -> Option<()> {
    let mut total = 0.0;
    for x in v.iter_mut() {
        if *x < 0.0 {
            *x = 0.0;
        }
        total += *x;
    }
    if total <= 0.0 || !total.is_finite() {
        return None;
    }
    for x in v.iter_mut() {
        *x /= total;
    }
    Some(())
}

/// Euclidean projection onto the probability simplex (sort-based).
pub fn project_simplex(v: &DVector<f64>) -> DVector<f64> {
    let mut sorted: Vec<f64> = v.iter().cloned().collect();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("finite input"));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (i, &s) in sorted.iter().enumerate() {
        cumsum += s;
        let t = (cumsum - 1.0) / (i as f64 + 1.0);
        if s - t > 0.0 {
            theta = t;
        }
    }
    v.map(|x| (x - theta).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_sparse(m: usize, n: usize, density: f64, seed: u64) -> CscMatrix<f64> {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = Vec::new();
        for c in 0..n {
            for r in 0..m {
                if rng.random::<f64>() < density {
                    t.push((r, c, rng.random::<f64>()));
                }
            }
        }
        CscMatrix::from_triplets(m, n, t).unwrap()
    }

    #[test]
    fn triplets_sum_duplicates_and_drop_zeros() {
        let m =
            CscMatrix::from_triplets(2, 2, vec![(0, 0, 1.0), (0, 0, 2.0), (1, 1, 0.0)]).unwrap();
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(0, 0), Some(3.0));
        assert_eq!(m.get(1, 1), None);
    }

    #[test]
    fn out_of_range_triplet_rejected() {
        assert!(CscMatrix::from_triplets(2, 2, vec![(2, 0, 1.0)]).is_err());
    }

    #[test]
    fn transpose_matches_dense() {
        let a = random_sparse(7, 5, 0.4, 1);
        assert_eq!(a.transpose().to_dense(), a.to_dense().transpose());
    }

    #[test]
    fn operator_products_match_dense() {
        let a = random_sparse(30, 40, 0.2, 2);
        let op = SparseOperator::new(a.clone());
        let x = DMatrix::from_fn(40, 3, |i, j| (i * 3 + j) as f64 * 0.01);
        let y = DMatrix::from_fn(30, 3, |i, j| (i + j) as f64 * 0.1);
        let dense = a.to_dense();
        assert!((op.mul(&x) - &dense * &x).abs().max() < 1e-12);
        assert!((op.mul_t(&y) - dense.transpose() * &y).abs().max() < 1e-12);
    }

    #[test]
    fn truncated_matches_dense_svd() {
        let a = random_sparse(120, 300, 0.1, 3);
        let op = SparseOperator::new(a.clone());
        let opts = SvdOptions {
            dense_cutoff: 0,
            ..SvdOptions::default()
        };
        let t = truncated_svd(&op, 4, &opts);
        let d = dense_svd(&a.to_dense(), 4);
        for k in 0..4 {
            assert!(
                (t.singular_values[k] - d.singular_values[k]).abs() < 1e-9 * d.singular_values[0]
            );
            let dot = t.u.column(k).dot(&d.u.column(k)).abs();
            assert!((dot - 1.0).abs() < 1e-8, "k={k} dot={dot}");
        }
        let gram = t.u.transpose() * &t.u;
        assert!((gram - DMatrix::identity(4, 4)).abs().max() < 1e-10);
    }

    #[test]
    fn simplex_projection_basics() {
        let p = project_simplex(&DVector::from_vec(vec![0.2, 0.3, 0.5]));
        assert!((p - DVector::from_vec(vec![0.2, 0.3, 0.5])).abs().max() < 1e-15);
        let p = project_simplex(&DVector::from_vec(vec![-0.5, 1.5]));
        assert_eq!(p.as_slice(), &[0.0, 1.0]);
    }

    #[test]
    fn clip_renormalize_rejects_nonpositive() {
        let mut v = vec![-1.0, 0.0];
        assert!(clip_renormalize(&mut v).is_none());
        let mut v = vec![-0.5, 1.5];
        clip_renormalize(&mut v).unwrap();
        assert_eq!(v, vec![0.0, 1.0]);
    }
}
