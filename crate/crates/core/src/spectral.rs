//! Topic-SCORE: estimation of the topic matrix from word frequencies by SCORE
//! normalized singular vectors and simplex vertex hunting.
//!
//! The pipeline is `normalization_matrix -> score_embed -> vertex_hunt ->
//! barycentric -> estimate_topic_matrix`. Scree-based choice of `K` and the
//! anchor-word reports live here too, since they read the same spectra.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{
    condition_number, project_simplex, truncated_svd, CscMatrix, SparseOperator, SvdOptions,
};

/// Entries of the leading singular vector smaller than this are treated as zero.
pub const LEAD_VECTOR_EPS: f64 = 1e-12;
/// `sigma_K / sigma_1` below this means the normalized matrix has rank < K.
pub const RANK_RATIO_EPS: f64 = 1e-12;
/// Vertex sets with a larger affine condition number are rejected.
pub const MAX_VERTEX_CONDITION: f64 = 1e8;
/// `sigma_{K+1} / sigma_1` at or below this marks noise-free, exactly rank-K data.
pub const EXACT_RANK_EPS: f64 = 1e-9;

/// Diagonal of `M`: the row means of `D`.
pub fn normalization_matrix(d: &CscMatrix<f64>) -> Result<Vec<f64>> {
    let n = d.ncols() as f64;
    let sums = d.row_sums();
    if let Some(index) = sums.iter().position(|&s| s <= 0.0) {
        return Err(Error::ZeroRow { index });
    }
    Ok(sums.into_iter().map(|s| s / n).collect())
}

/// Leading singular vectors of `M^{-1/2} D` and their SCORE ratios.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreEmbedding {
    /// `p x K`, column `k` is the `k`-th left singular vector.
    pub xi: DMatrix<f64>,
    pub singular_values: Vec<f64>,
    /// `sigma_{K+1}`, when the matrix has more than `K` singular values.
    pub next_singular_value: Option<f64>,
    /// `p x (K-1)`, `R(i, k) = xi(i, k+1) / xi(i, 0)`.
    pub r: DMatrix<f64>,
    pub m_diag: Vec<f64>,
}

impl ScoreEmbedding {
    pub fn k(&self) -> usize {
        self.xi.ncols()
    }

    /// True when `sigma_{K+1}` vanishes relative to `sigma_1`.
    pub fn is_exact_rank(&self) -> bool {
        match self.next_singular_value {
            None => true,
            Some(s) => s <= EXACT_RANK_EPS * self.singular_values[0],
        }
    }
}

pub fn score_embed(d: &CscMatrix<f64>, k: usize, svd: &SvdOptions) -> Result<ScoreEmbedding> {
    let m_diag = normalization_matrix(d)?;
    score_embed_with(d, m_diag, k, svd)
}

/// `score_embed` with a caller-supplied `M` diagonal.
pub fn score_embed_with(
    d: &CscMatrix<f64>,
    m_diag: Vec<f64>,
    k: usize,
    svd: &SvdOptions,
) -> Result<ScoreEmbedding> {
    let (p, n) = (d.nrows(), d.ncols());
    if k == 0 || k > p.min(n) {
        return Err(Error::InvalidArgument(format!(
            "K must lie in 1..={}, got {k}",
            p.min(n)
        )));
    }
    if m_diag.len() != p {
        return Err(Error::ShapeMismatch(
            "M diagonal length differs from p".into(),
        ));
    }
    let inv_sqrt: Vec<f64> = m_diag.iter().map(|m| 1.0 / m.sqrt()).collect();
    let scaled = d.map_with_index(|r, _, v| v * inv_sqrt[r]);
    let op = SparseOperator::new(scaled);

    let t = truncated_svd(&op, k, svd);
    let sigma1 = t.singular_values[0];
    let ratio = if sigma1 > 0.0 {
        t.singular_values[k - 1] / sigma1
    } else {
        0.0
    };
    if ratio < RANK_RATIO_EPS {
        return Err(Error::RankDeficient { ratio });
    }

    let mut xi = t.u.columns(0, k).into_owned();
    if xi.column(0).sum() < 0.0 {
        xi.column_mut(0).neg_mut();
    }
    for c in 1..k {
        let col = xi.column(c);
        let mut best = 0;
        for i in 1..p {
            if col[i].abs() > col[best].abs() {
                best = i;
            }
        }
        if col[best] < 0.0 {
            xi.column_mut(c).neg_mut();
        }
    }
    if let Some(word) = (0..p).find(|&i| xi[(i, 0)].abs() < LEAD_VECTOR_EPS) {
        return Err(Error::DegenerateLeadVector {
            word,
            value: xi[(word, 0)],
        });
    }
    let r = DMatrix::from_fn(p, k - 1, |i, c| xi[(i, c + 1)] / xi[(i, 0)]);

    Ok(ScoreEmbedding {
        singular_values: t.singular_values[..k].to_vec(),
        next_singular_value: t.trailing.first().copied(),
        xi,
        r,
        m_diag,
    })
}

/// Estimated simplex vertices; column `k` of `v` is vertex `k` in `R^{K-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexVertices {
    pub v: DMatrix<f64>,
    /// Condition number of the `K x K` matrix `[V; 1']`.
    pub condition: f64,
}

impl SimplexVertices {
    pub fn new(v: DMatrix<f64>) -> Self {
        let condition = condition_number(&augmented(&v));
        SimplexVertices { v, condition }
    }

    pub fn k(&self) -> usize {
        self.v.ncols()
    }
}

fn augmented(v: &DMatrix<f64>) -> DMatrix<f64> {
    let k = v.ncols();
    DMatrix::from_fn(v.nrows() + 1, k, |r, c| {
        if r < v.nrows() {
            v[(r, c)]
        } else {
            1.0
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexHunter {
    /// Lloyd clustering into sketch centers, then successive projection on the centers.
    Sketched,
    /// Successive projection directly on the rows.
    Successive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexHuntOptions {
    pub method: VertexHunter,
    /// Number of sketch centers; `None` means `10 K`.
    pub centers: Option<usize>,
    pub seed: u64,
    pub max_iterations: usize,
    pub tol: f64,
}

impl Default for VertexHuntOptions {
    fn default() -> Self {
        VertexHuntOptions {
            method: VertexHunter::Sketched,
            centers: None,
            seed: 0,
            max_iterations: 100,
            tol: 1e-8,
        }
    }
}

/// Locates the `K` vertices of the simplex traced by the rows of `r`.
pub fn vertex_hunt(
    r: &DMatrix<f64>,
    k: usize,
    opts: &VertexHuntOptions,
) -> Result<SimplexVertices> {
    let p = r.nrows();
    if k == 0 {
        return Err(Error::InvalidArgument("K must be positive".into()));
    }
    if r.ncols() + 1 != k {
        return Err(Error::ShapeMismatch(format!(
            "embedding has {} columns, expected K-1 = {}",
            r.ncols(),
            k - 1
        )));
    }
    if p < k {
        return Err(Error::TooFewPoints { points: p, k });
    }
    if k == 1 {
        return Ok(SimplexVertices {
            v: DMatrix::zeros(0, 1),
            condition: 1.0,
        });
    }

    let points = match opts.method {
        VertexHunter::Successive => r.clone(),
        VertexHunter::Sketched => {
            let l = opts.centers.unwrap_or(10 * k).max(k);
            lloyd(r, l, opts)
        }
    };
    let picked = successive_projection(&points, k);
    let v = DMatrix::from_fn(k - 1, k, |d, c| points[(picked[c], d)]);
    let vertices = SimplexVertices::new(v);
    if !(vertices.condition <= MAX_VERTEX_CONDITION) {
        return Err(Error::CollapsedVertices {
            condition: vertices.condition,
        });
    }
    Ok(vertices)
}

/// Successive projection on rows lifted to `(1, r_i)`: repeatedly take the row
/// of largest residual norm and project it out. Returns row indices in pick order.
pub fn successive_projection(points: &DMatrix<f64>, k: usize) -> Vec<usize> {
    let (n, d) = points.shape();
    let mut resid = DMatrix::from_fn(
        n,
        d + 1,
        |i, c| if c == 0 { 1.0 } else { points[(i, c - 1)] },
    );
    let mut picked = Vec::with_capacity(k);
    for _ in 0..k {
        let mut best = 0;
        let mut best_norm = -1.0;
        for i in 0..n {
            let norm = resid.row(i).norm_squared();
            if norm > best_norm * (1.0 + 1e-12) && !picked.contains(&i) {
                best = i;
                best_norm = norm;
            }
        }
        picked.push(best);
        let u = resid.row(best).transpose();
        let unorm = u.norm();
        if unorm == 0.0 {
            continue;
        }
        let u = u / unorm;
        let proj = &resid * &u;
        resid -= proj * u.transpose();
    }
    picked
}

/// Lloyd's algorithm with k-means++ seeding. Returns the centers as rows.
fn lloyd(points: &DMatrix<f64>, l: usize, opts: &VertexHuntOptions) -> DMatrix<f64> {
    let (n, d) = points.shape();
    if l >= n {
        return points.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let dist2 = |i: usize, c: &DMatrix<f64>, j: usize| -> f64 {
        (0..d).map(|t| (points[(i, t)] - c[(j, t)]).powi(2)).sum()
    };

    let mut centers = DMatrix::zeros(l, d);
    let first = rng.random_range(0..n);
    centers.row_mut(0).copy_from(&points.row(first));
    let mut nearest: Vec<f64> = (0..n).map(|i| dist2(i, &centers, 0)).collect();
    for c in 1..l {
        let total: f64 = nearest.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &w) in nearest.iter().enumerate() {
                if w > 0.0 && target < w {
                    chosen = i;
                    break;
                }
                target -= w;
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        centers.row_mut(c).copy_from(&points.row(pick));
        for (i, near) in nearest.iter_mut().enumerate() {
            *near = near.min(dist2(i, &centers, c));
        }
    }

    let mut assign = vec![0usize; n];
    for _ in 0..opts.max_iterations {
        for (i, a) in assign.iter_mut().enumerate() {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for c in 0..l {
                let dd = dist2(i, &centers, c);
                if dd < best_d {
                    best = c;
                    best_d = dd;
                }
            }
            *a = best;
        }
        let mut sums = DMatrix::<f64>::zeros(l, d);
        let mut counts = vec![0usize; l];
        for (i, &a) in assign.iter().enumerate() {
            counts[a] += 1;
            for t in 0..d {
                sums[(a, t)] += points[(i, t)];
            }
        }
        let mut next = centers.clone();
        for c in 0..l {
            if counts[c] > 0 {
                for t in 0..d {
                    next[(c, t)] = sums[(c, t)] / counts[c] as f64;
                }
            }
        }
        let change = (&next - &centers).norm();
        let scale = centers.norm().max(f64::MIN_POSITIVE);
        centers = next;
        if change <= opts.tol * scale {
            break;
        }
    }
    centers
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BarycentricMode {
    /// Unconstrained affine solve, negatives clipped, renormalized.
    ClipRenormalize,
    /// Least squares restricted to the probability simplex.
    SimplexConstrained,
}

/// Precomputed solver for barycentric coordinates against fixed vertices.
#[derive(Debug, Clone)]
pub struct BarycentricSolver {
    vertices: DMatrix<f64>,
    inverse: DMatrix<f64>,
    mode: BarycentricMode,
}

impl BarycentricSolver {
    pub fn new(vertices: &SimplexVertices, mode: BarycentricMode) -> Result<Self> {
        let aug = augmented(&vertices.v);
        let condition = condition_number(&aug);
        if !(condition <= MAX_VERTEX_CONDITION) {
            return Err(Error::DegenerateSimplex { condition });
        }
        let inverse = aug
            .clone()
            .try_inverse()
            .ok_or(Error::DegenerateSimplex { condition })?;
        Ok(BarycentricSolver {
            vertices: vertices.v.clone(),
            inverse,
            mode,
        })
    }

    /// Affine coordinates of `r` before any clipping.
    pub fn raw(&self, r: &[f64]) -> DVector<f64> {
        let k = self.inverse.nrows();
        let rhs = DVector::from_fn(k, |i, _| if i + 1 < k { r[i] } else { 1.0 });
        &self.inverse * rhs
    }

    pub fn solve(&self, r: &[f64]) -> DVector<f64> {
        let raw = self.raw(r);
        match self.mode {
            BarycentricMode::ClipRenormalize => {
                let mut pi: Vec<f64> = raw.iter().cloned().collect();
                crate::linalg::clip_renormalize(&mut pi).expect("affine coordinates sum to one");
                DVector::from_vec(pi)
            }
            BarycentricMode::SimplexConstrained => self.constrained(r, raw),
        }
    }

    fn constrained(&self, r: &[f64], start: DVector<f64>) -> DVector<f64> {
        let k = self.inverse.nrows();
        if k == 1 {
            return DVector::from_element(1, 1.0);
        }
        let target = DVector::from_column_slice(r);
        let gram = self.vertices.transpose() * &self.vertices;
        let lin = self.vertices.transpose() * &target;
        let lipschitz = gram
            .clone()
            .symmetric_eigenvalues()
            .max()
            .max(f64::MIN_POSITIVE);
        let mut pi = project_simplex(&start);
        for _ in 0..10_000 {
            let grad = &gram * &pi - &lin;
            let next = project_simplex(&(&pi - grad / lipschitz));
            let change = (&next - &pi).amax();
            pi = next;
            if change < 1e-14 {
                break;
            }
        }
        pi
    }
}

pub fn barycentric(r: &[f64], vertices: &SimplexVertices) -> Result<DVector<f64>> {
    Ok(BarycentricSolver::new(vertices, BarycentricMode::ClipRenormalize)?.solve(r))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub vertex: VertexHuntOptions,
    pub barycentric: BarycentricMode,
    pub svd: SvdOptions,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            vertex: VertexHuntOptions::default(),
            barycentric: BarycentricMode::ClipRenormalize,
            svd: SvdOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopicModelFit {
    /// `p x K`, columns on the simplex.
    pub a_hat: DMatrix<f64>,
    pub embedding: ScoreEmbedding,
    pub vertices: SimplexVertices,
    /// `p x K`, row `j` is the barycentric coordinate of word `j`.
    pub pi: DMatrix<f64>,
    /// Vertex hunting method actually used.
    pub hunter: VertexHunter,
}

impl TopicModelFit {
    pub fn k(&self) -> usize {
        self.a_hat.ncols()
    }
}

/// Estimates the `p x K` topic matrix from the frequency matrix `D`.
pub fn estimate_topic_matrix(
    d: &CscMatrix<f64>,
    k: usize,
    opts: &FitOptions,
) -> Result<TopicModelFit> {
    let embedding = score_embed(d, k, &opts.svd)?;
    let p = d.nrows();

    if k == 1 {
        let total: f64 = embedding.m_diag.iter().sum();
        let a_hat = DMatrix::from_fn(p, 1, |j, _| embedding.m_diag[j] / total);
        return Ok(TopicModelFit {
            a_hat,
            vertices: SimplexVertices {
                v: DMatrix::zeros(0, 1),
                condition: 1.0,
            },
            pi: DMatrix::from_element(p, 1, 1.0),
            embedding,
            hunter: opts.vertex.method,
        });
    }

    let mut vh = opts.vertex;
    if vh.method == VertexHunter::Sketched && embedding.is_exact_rank() {
        vh.method = VertexHunter::Successive;
    }
    let vertices = vertex_hunt(&embedding.r, k, &vh)?;
    let solver = BarycentricSolver::new(&vertices, opts.barycentric)?;

    let rows: Vec<Vec<f64>> = (0..p)
        .into_par_iter()
        .map(|j| {
            let r: Vec<f64> = embedding.r.row(j).iter().cloned().collect();
            solver.solve(&r).iter().cloned().collect()
        })
        .collect();
    let pi = DMatrix::from_fn(p, k, |j, c| rows[j][c]);

    let mut a_hat = DMatrix::from_fn(p, k, |j, c| {
        let v = embedding.m_diag[j].sqrt() * embedding.xi[(j, 0)] * pi[(j, c)];
        v.max(0.0)
    });
    for c in 0..k {
        let s = a_hat.column(c).sum();
        if !(s > 0.0) {
            return Err(Error::DegenerateSimplex {
                condition: f64::INFINITY,
            });
        }
        a_hat.column_mut(c).unscale_mut(s);
    }

    Ok(TopicModelFit {
        a_hat,
        embedding,
        vertices,
        pi,
        hunter: vh.method,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScreeReport {
    pub singular_values: Vec<f64>,
    pub threshold: Option<f64>,
    pub k_hat: Option<usize>,
}

/// Leading `max_l` singular values of `x`, and the count above `threshold`.
pub fn select_k_scree(
    x: &CscMatrix<f64>,
    threshold: Option<f64>,
    max_l: usize,
) -> Result<ScreeReport> {
    let limit = x.nrows().min(x.ncols());
    if max_l == 0 || max_l > limit {
        return Err(Error::InvalidArgument(format!(
            "number of singular values must lie in 1..={limit}, got {max_l}"
        )));
    }
    let op = SparseOperator::new(x.clone());
    let t = truncated_svd(&op, max_l, &SvdOptions::default());
    Ok(scree_from_values(t.singular_values, threshold))
}

pub fn scree_from_values(singular_values: Vec<f64>, threshold: Option<f64>) -> ScreeReport {
    let k_hat = threshold.map(|t| singular_values.iter().filter(|&&s| s > t).count());
    ScreeReport {
        singular_values,
        threshold,
        k_hat,
    }
}

/// Row-normalized topic matrix: `a(j, k) = A(j, k) / sum_l A(j, l)`.
pub fn topic_loadings(a_hat: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let mut a = a_hat.clone();
    for j in 0..a.nrows() {
        let s = a.row(j).sum();
        if !(s > 0.0) {
            return Err(Error::ZeroRow { index: j });
        }
        a.row_mut(j).unscale_mut(s);
    }
    Ok(a)
}

/// The `m` words with the largest loading on topic `k`, ties to the lower index.
pub fn frequent_anchor_words(loadings: &DMatrix<f64>, k: usize, m: usize) -> Vec<usize> {
    let col = loadings.column(k);
    let mut idx: Vec<usize> = (0..loadings.nrows()).collect();
    idx.sort_by(|&a, &b| {
        col[b]
            .partial_cmp(&col[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    idx.truncate(m);
    idx
}

#[cfg(test)]
mod tests {
    use super::*;

    fn csc(rows: usize, cols: usize, data: &[f64]) -> CscMatrix<f64> {
        let t = (0..rows)
            .flat_map(|r| (0..cols).map(move |c| (r, c, data[r * cols + c])))
            .collect::<Vec<_>>();
        CscMatrix::from_triplets(rows, cols, t).unwrap()
    }

    #[test]
    fn normalization_row_means() {
        let m = normalization_matrix(&csc(2, 2, &[0.5, 0.5, 0.5, 0.5])).unwrap();
        assert_eq!(m, vec![0.5, 0.5]);
        let m = normalization_matrix(&csc(2, 2, &[1.0, 0.0, 0.0, 1.0])).unwrap();
        assert_eq!(m, vec![0.5, 0.5]);
        let m = normalization_matrix(&csc(2, 2, &[0.2, 0.4, 0.8, 0.6])).unwrap();
        assert!((m[0] - 0.3).abs() < 1e-15 && (m[1] - 0.7).abs() < 1e-15);
    }

    #[test]
    fn normalization_zero_row() {
        let err = normalization_matrix(&csc(2, 2, &[1.0, 1.0, 0.0, 0.0])).unwrap_err();
        assert!(matches!(err, Error::ZeroRow { index: 1 }));
    }

    #[test]
    fn k_one_embedding_has_no_ratio_columns() {
        let d = csc(3, 2, &[0.2, 0.5, 0.3, 0.25, 0.5, 0.25]);
        let e = score_embed(&d, 1, &SvdOptions::default()).unwrap();
        assert_eq!(e.r.ncols(), 0);
        assert!(e.xi.column(0).iter().all(|&x| x > 0.0));
    }

    #[test]
    fn rank_deficient_detected() {
        // two identical columns: rank one
        let d = csc(2, 2, &[0.5, 0.5, 0.5, 0.5]);
        assert!(matches!(
            score_embed(&d, 2, &SvdOptions::default()),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn spa_picks_triangle_vertices() {
        let verts = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let mut rows = vec![[0.2, 0.2], [0.5, 0.3], [0.1, 0.6], [0.3, 0.3]];
        rows.extend_from_slice(&verts);
        let pts = DMatrix::from_fn(rows.len(), 2, |i, c| rows[i][c]);
        let mut picked = successive_projection(&pts, 3);
        picked.sort();
        assert_eq!(picked, vec![4, 5, 6]);
    }

    #[test]
    fn sketched_hunt_recovers_triangle() {
        let verts = [[-1.0, -1.0], [2.0, -0.5], [0.0, 1.5]];
        let mut rows = Vec::new();
        for v in &verts {
            for _ in 0..3 {
                rows.push(*v);
            }
        }
        for w in [
            [0.2, 0.3, 0.5],
            [0.6, 0.2, 0.2],
            [0.3, 0.4, 0.3],
            [0.1, 0.1, 0.8],
            [0.45, 0.45, 0.1],
        ] {
            let x = (0..3).map(|k| w[k] * verts[k][0]).sum::<f64>();
            let y = (0..3).map(|k| w[k] * verts[k][1]).sum::<f64>();
            rows.push([x, y]);
        }
        let r = DMatrix::from_fn(rows.len(), 2, |i, c| rows[i][c]);
        let found = vertex_hunt(&r, 3, &VertexHuntOptions::default()).unwrap();
        for v in &verts {
            let hit = (0..3).any(|c| {
                (found.v[(0, c)] - v[0]).abs() < 1e-6 && (found.v[(1, c)] - v[1]).abs() < 1e-6
            });
            assert!(hit, "vertex {v:?} not found in {}", found.v);
        }
    }

    #[test]
    fn segment_endpoints_for_k2() {
        let r = DMatrix::from_column_slice(5, 1, &[0.3, -1.0, 0.5, 2.0, 0.0]);
        let opts = VertexHuntOptions {
            method: VertexHunter::Successive,
            ..Default::default()
        };
        let v = vertex_hunt(&r, 2, &opts).unwrap();
        let mut ends = vec![v.v[(0, 0)], v.v[(0, 1)]];
        ends.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(ends, vec![-1.0, 2.0]);
    }

    #[test]
    fn vertex_hunt_k1_and_too_few_points() {
        let v = vertex_hunt(&DMatrix::zeros(4, 0), 1, &VertexHuntOptions::default()).unwrap();
        assert_eq!(v.v.shape(), (0, 1));
        assert!(matches!(
            vertex_hunt(&DMatrix::zeros(2, 2), 3, &VertexHuntOptions::default()),
            Err(Error::TooFewPoints { points: 2, k: 3 })
        ));
    }

    #[test]
    fn collapsed_vertices_rejected() {
        let r = DMatrix::from_column_slice(4, 1, &[1.0, 1.0, 1.0, 1.0]);
        let opts = VertexHuntOptions {
            method: VertexHunter::Successive,
            ..Default::default()
        };
        assert!(matches!(
            vertex_hunt(&r, 2, &opts),
            Err(Error::CollapsedVertices { .. })
        ));
    }

    #[test]
    fn barycentric_cases() {
        let v = SimplexVertices::new(DMatrix::from_row_slice(
            2,
            3,
            &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
        ));
        let pi = barycentric(&[1.0, 0.0], &v).unwrap();
        assert!((pi - DVector::from_vec(vec![0.0, 1.0, 0.0])).amax() < 1e-14);
        let pi = barycentric(&[1.0 / 3.0, 1.0 / 3.0], &v).unwrap();
        assert!(pi.iter().all(|&x| (x - 1.0 / 3.0).abs() < 1e-14));

        let seg = SimplexVertices::new(DMatrix::from_row_slice(1, 2, &[0.0, 1.0]));
        let pi = barycentric(&[1.5], &seg).unwrap();
        assert_eq!(pi.as_slice(), &[0.0, 1.0]);
    }

    #[test]
    fn barycentric_degenerate() {
        let seg = SimplexVertices::new(DMatrix::from_row_slice(1, 2, &[1.0, 1.0]));
        assert!(matches!(
            barycentric(&[1.0], &seg),
            Err(Error::DegenerateSimplex { .. })
        ));
    }

    #[test]
    fn constrained_mode_matches_inside_and_projects_outside() {
        let v = SimplexVertices::new(DMatrix::from_row_slice(
            2,
            3,
            &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
        ));
        let s = BarycentricSolver::new(&v, BarycentricMode::SimplexConstrained).unwrap();
        let pi = s.solve(&[0.2, 0.3]);
        assert!((pi - DVector::from_vec(vec![0.5, 0.2, 0.3])).amax() < 1e-10);
        // (1, 1) is closest to the midpoint of the edge between vertices 1 and 2.
        let pi = s.solve(&[1.0, 1.0]);
        assert!((pi - DVector::from_vec(vec![0.0, 0.5, 0.5])).amax() < 1e-10);
    }

    #[test]
    fn k_one_topic_is_normalized_row_means() {
        let d = csc(3, 2, &[0.2, 0.4, 0.5, 0.4, 0.3, 0.2]);
        let fit = estimate_topic_matrix(&d, 1, &FitOptions::default()).unwrap();
        let expect = [0.3, 0.45, 0.25];
        for (j, e) in expect.iter().enumerate() {
            assert!((fit.a_hat[(j, 0)] - e).abs() < 1e-12);
        }
    }

    #[test]
    fn scree_counting() {
        let r = scree_from_values(vec![10.0, 5.0, 0.1], Some(1.0));
        assert_eq!(r.k_hat, Some(2));
        let r = scree_from_values(vec![10.0, 5.0, 0.1], Some(11.0));
        assert_eq!(r.k_hat, Some(0));
        assert_eq!(scree_from_values(vec![1.0], None).k_hat, None);
    }

    #[test]
    fn scree_rejects_too_many_values() {
        assert!(select_k_scree(&csc(2, 2, &[1.0, 0.0, 0.0, 1.0]), None, 3).is_err());
    }

    #[test]
    fn loadings_and_anchor_words() {
        let a = DMatrix::from_row_slice(3, 3, &[0.2, 0.0, 0.0, 0.1, 0.1, 0.0, 0.3, 0.3, 0.3]);
        let l = topic_loadings(&a).unwrap();
        assert_eq!(
            l.row(0).iter().cloned().collect::<Vec<_>>(),
            vec![1.0, 0.0, 0.0]
        );
        assert_eq!(l[(1, 0)], 0.5);
        for j in 0..3 {
            assert!((l.row(j).sum() - 1.0).abs() < 1e-12);
        }
        let col = DMatrix::from_column_slice(3, 1, &[0.9, 0.1, 0.5]);
        assert_eq!(frequent_anchor_words(&col, 0, 2), vec![0, 2]);
        let flat = DMatrix::from_element(4, 1, 0.25);
        assert_eq!(frequent_anchor_words(&flat, 0, 1), vec![0]);
    }

    #[test]
    fn loadings_zero_row() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 1.0]);
        assert!(matches!(
            topic_loadings(&a),
            Err(Error::ZeroRow { index: 0 })
        ));
    }
}
