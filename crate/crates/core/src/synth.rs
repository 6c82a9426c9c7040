//! Ground-truth generators for the topic model and the citation model, and
//! permutation-matched error measures.
//!
//! # RNG stream layout
//!
//! [`SynthParams::generate`] seeds one `ChaCha8Rng` per component from the
//! same 64-bit seed and selects a distinct stream with `set_stream`:
//!
//! | stream | component |
//! |--------|-----------|
//! | 0 | topic matrix `A` |
//! | 1 | topic weights `W` |
//! | 2 | word counts |
//! | 3 | citations |
//! | 4 | paper metadata |
//!
//! Changing the document length therefore leaves `A` and `W` untouched, and
//! ChaCha output is identical on every platform. Dirichlet columns draw `K`
//! `Gamma(alpha, 1)` variates in topic order and normalize them.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Gamma, Geometric};

use crate::corpus::{CitationGraph, DocumentTermMatrix, PaperMeta, Vocabulary};
use crate::error::{Error, Result};
use crate::glm::logistic;
use crate::linalg::CscMatrix;

pub const DEFAULT_HETEROGENEITY: f64 = 100.0;

/// Known parameters behind a synthetic corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    /// `p x K`, column-stochastic.
    pub a: DMatrix<f64>,
    /// `K x n`, column-stochastic.
    pub w: DMatrix<f64>,
    /// Median-zero topic scores, when citations were generated.
    pub mu: Option<DVector<f64>>,
    pub seed: u64,
}

/// Random topic matrix whose first `k * anchor_count` rows are anchor words,
/// `anchor_count` consecutive rows per topic.
///
/// Each row gets a magnitude `heterogeneity^(-u)` with `u` evenly spaced over
/// `[0, 1]` and assigned to rows in random order. Anchor rows put all their
/// mass on their topic; other rows split it across topics with weights drawn
/// from `Uniform(0.1, 1)`. Columns are then normalized to sum to one.
pub fn random_topic_matrix<R: Rng>(
    p: usize,
    k: usize,
    anchor_count: usize,
    heterogeneity: f64,
    rng: &mut R,
) -> Result<DMatrix<f64>> {
    if k == 0 || anchor_count == 0 || p < k * anchor_count {
        return Err(Error::InvalidShape(format!(
            "need p >= K * anchor_count with K, anchor_count >= 1 (p={p}, K={k}, anchor_count={anchor_count})"
        )));
    }
    if !(heterogeneity >= 1.0) {
        return Err(Error::InvalidArgument(format!("heterogeneity must be >= 1, got {heterogeneity}")));
    }
    let mut order: Vec<usize> = (0..p).collect();
    order.shuffle(rng);
    let mut a = DMatrix::zeros(p, k);
    for j in 0..p {
        let u = if p > 1 { order[j] as f64 / (p - 1) as f64 } else { 0.0 };
        let scale = heterogeneity.powf(-u);
        if j < k * anchor_count {
            a[(j, j / anchor_count)] = scale;
        } else {
            let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.1..1.0)).collect();
            let total: f64 = raw.iter().sum();
            for (t, r) in raw.into_iter().enumerate() {
                a[(j, t)] = scale * r / total;
            }
        }
    }
    for mut col in a.column_iter_mut() {
        let s = col.sum();
        col /= s;
    }
    Ok(a)
}

/// Topic weights: the first columns are one-hot, cycling through the topics;
/// the rest are `Dirichlet(alpha)`.
///
/// The number of one-hot columns is `ceil(pure_fraction * n)`, raised to `K`
/// (capped at `n`) whenever `pure_fraction > 0` so that `W` has rank `K`.
pub fn random_weights<R: Rng>(n: usize, k: usize, alpha: f64, pure_fraction: f64, rng: &mut R) -> Result<DMatrix<f64>> {
    if k == 0 {
        return Err(Error::InvalidShape("K must be positive".into()));
    }
    if !(0.0..=1.0).contains(&pure_fraction) {
        return Err(Error::InvalidArgument(format!("pure_fraction must lie in [0, 1], got {pure_fraction}")));
    }
    let gamma = Gamma::new(alpha, 1.0).map_err(|e| Error::InvalidArgument(format!("dirichlet alpha {alpha}: {e}")))?;
    let mut n_pure = (pure_fraction * n as f64).ceil() as usize;
    if pure_fraction > 0.0 {
        n_pure = n_pure.max(k);
    }
    let n_pure = n_pure.min(n);
    let mut w = DMatrix::zeros(k, n);
    for i in 0..n {
        if i < n_pure {
            w[(i % k, i)] = 1.0;
            continue;
        }
        loop {
            let draws: Vec<f64> = (0..k).map(|_| gamma.sample(rng)).collect();
            let total: f64 = draws.iter().sum();
            if total > 0.0 {
                for (t, g) in draws.into_iter().enumerate() {
                    w[(t, i)] = g / total;
                }
                break;
            }
        }
    }
    Ok(w)
}

/// Draws column `i` of the counts from `Multinomial(doc_len, A w_i)`.
///
/// Short documents are sampled word by word from the cumulative distribution;
/// long ones by successive conditional binomials.
pub fn sample_counts<R: Rng>(a: &DMatrix<f64>, w: &DMatrix<f64>, doc_len: u64, rng: &mut R) -> Result<DocumentTermMatrix> {
    let (p, k) = a.shape();
    if w.nrows() != k {
        return Err(Error::ShapeMismatch(format!("A has {k} columns, W has {} rows", w.nrows())));
    }
    let n = w.ncols();
    let mut triplets = Vec::new();
    let mut omega = vec![0.0; p];
    let mut counts = vec![0u32; p];
    for i in 0..n {
        for (j, o) in omega.iter_mut().enumerate() {
            *o = (0..k).map(|t| a[(j, t)] * w[(t, i)]).sum::<f64>().max(0.0);
        }
        counts.fill(0);
        if doc_len < p as u64 {
            let mut cdf = Vec::with_capacity(p);
            let mut acc = 0.0;
            for &o in &omega {
                acc += o;
                cdf.push(acc);
            }
            for _ in 0..doc_len {
                let u = rng.random::<f64>() * acc;
                let j = cdf.partition_point(|&c| c <= u).min(p - 1);
                // skip zero-probability words that share the same cumulative value
                let j = (j..p).find(|&j| omega[j] > 0.0).unwrap_or(j);
                counts[j] += 1;
            }
        } else {
            let mut remaining = doc_len;
            let mut mass: f64 = omega.iter().sum();
            for j in 0..p {
                if remaining == 0 {
                    break;
                }
                let prob = if mass > 0.0 { (omega[j] / mass).clamp(0.0, 1.0) } else { 1.0 };
                let x = if j == p - 1 || prob >= 1.0 {
                    remaining
                } else {
                    Binomial::new(remaining, prob).expect("probability in [0, 1]").sample(rng)
                };
                counts[j] = x as u32;
                remaining -= x;
                mass -= omega[j];
            }
        }
        for (j, &c) in counts.iter().enumerate() {
            if c > 0 {
                triplets.push((j, i, c));
            }
        }
    }
    DocumentTermMatrix::new(CscMatrix::from_triplets(p, n, triplets)?, Vocabulary::anonymous(p))
}

/// Citations between documents with known topic weights.
///
/// Each unordered pair is comparable with probability `pair_prob` and then
/// gets one directed edge, `i -> j` with probability
/// `logistic(mu'w_i - mu'w_j)`. With `duplicate_pairs` every comparable pair
/// draws a direction twice and keeps both edges, so pairs whose draws
/// disagree cite each other.
pub fn sample_citations<R: Rng>(
    w: &DMatrix<f64>,
    mu: &DVector<f64>,
    pair_prob: f64,
    duplicate_pairs: bool,
    rng: &mut R,
) -> Result<CitationGraph> {
    if w.nrows() != mu.len() {
        return Err(Error::ShapeMismatch(format!("W has {} rows, mu has {} entries", w.nrows(), mu.len())));
    }
    if !(0.0..=1.0).contains(&pair_prob) {
        return Err(Error::InvalidArgument(format!("pair_prob must lie in [0, 1], got {pair_prob}")));
    }
    let n = w.ncols();
    if pair_prob == 0.0 || n < 2 {
        return CitationGraph::new(n, Vec::new());
    }
    let score: Vec<f64> = (0..n).map(|i| w.column(i).dot(mu)).collect();
    let skip = Geometric::new(pair_prob).expect("probability in (0, 1]");
    let mut edges = Vec::new();
    let (mut i, mut j) = (0usize, 0usize);
    loop {
        // advance j by the number of non-comparable pairs, then one more
        let mut gap = skip.sample(rng) + 1;
        while gap > 0 {
            let left_in_row = (n - 1 - j) as u64;
            if gap <= left_in_row {
                j += gap as usize;
                gap = 0;
            } else {
                gap -= left_in_row;
                i += 1;
                j = i;
                if i >= n - 1 {
                    return CitationGraph::new(n, edges);
                }
            }
        }
        let p_ij = logistic(score[i] - score[j]);
        let draws = if duplicate_pairs { 2 } else { 1 };
        for _ in 0..draws {
            if rng.random::<f64>() < p_ij {
                edges.push((i, j));
            } else {
                edges.push((j, i));
            }
        }
    }
}

/// Bibliographic records for `n` synthetic papers: ids `P000000`, ...,
/// years uniform over `years`, journals `J00`, ... uniform, and 1 to 4
/// authors drawn from a pool of `max(n / 2, 1)` ids.
pub fn random_metadata<R: Rng>(n: usize, years: (i32, i32), journals: usize, rng: &mut R) -> Result<Vec<PaperMeta>> {
    if years.0 > years.1 || journals == 0 {
        return Err(Error::InvalidArgument(format!(
            "need a nonempty year range and at least one journal (years {years:?}, journals {journals})"
        )));
    }
    let pool = (n / 2).max(1);
    Ok((0..n)
        .map(|i| {
            let m = rng.random_range(1..=4usize).min(pool);
            let mut authors: Vec<usize> = Vec::with_capacity(m);
            while authors.len() < m {
                let a = rng.random_range(0..pool);
                if !authors.contains(&a) {
                    authors.push(a);
                }
            }
            PaperMeta {
                paper_id: format!("P{i:06}"),
                year: rng.random_range(years.0..=years.1),
                journal_id: format!("J{:02}", rng.random_range(0..journals)),
                author_ids: authors.into_iter().map(|a| format!("A{a:06}")).collect(),
            }
        })
        .collect())
}

/// Parameters for a complete synthetic corpus.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SynthParams {
    pub p: usize,
    pub n: usize,
    pub k: usize,
    pub doc_len: u64,
    pub anchor_count: usize,
    pub heterogeneity: f64,
    pub alpha: f64,
    pub pure_fraction: f64,
    /// Topic scores for citations; no citations are drawn when absent.
    pub mu: Option<Vec<f64>>,
    pub pair_prob: f64,
    pub duplicate_pairs: bool,
    pub seed: u64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            p: 100,
            n: 500,
            k: 3,
            doc_len: 300,
            anchor_count: 5,
            heterogeneity: DEFAULT_HETEROGENEITY,
            alpha: 1.0,
            pure_fraction: 0.2,
            mu: None,
            pair_prob: 0.01,
            duplicate_pairs: false,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub truth: GroundTruth,
    pub dtm: DocumentTermMatrix,
    pub graph: Option<CitationGraph>,
    pub metas: Vec<PaperMeta>,
}

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

impl SynthParams {
    pub fn generate(&self) -> Result<SynthCorpus> {
        let a = random_topic_matrix(self.p, self.k, self.anchor_count, self.heterogeneity, &mut stream_rng(self.seed, 0))?;
        let w = random_weights(self.n, self.k, self.alpha, self.pure_fraction, &mut stream_rng(self.seed, 1))?;
        let dtm = sample_counts(&a, &w, self.doc_len, &mut stream_rng(self.seed, 2))?;
        let (mu, graph) = match &self.mu {
            Some(mu) => {
                let mu = DVector::from_column_slice(mu);
                let g = sample_citations(&w, &mu, self.pair_prob, self.duplicate_pairs, &mut stream_rng(self.seed, 3))?;
                (Some(mu), Some(g))
            }
            None => (None, None),
        };
        let metas = random_metadata(self.n, (1975, 2015), 36, &mut stream_rng(self.seed, 4))?;
        Ok(SynthCorpus {
            truth: GroundTruth {
                a,
                w,
                mu,
                seed: self.seed,
            },
            dtm,
            graph,
            metas,
        })
    }
}

/// Minimum-cost assignment of rows to columns of a square cost matrix:
/// `perm[r]` is the column given to row `r`. Exhaustive for `K <= 8`,
/// Hungarian algorithm above.
pub fn min_cost_assignment(cost: &DMatrix<f64>) -> (f64, Vec<usize>) {
    let k = cost.nrows();
    if k <= 8 {
        let mut best = (f64::INFINITY, (0..k).collect::<Vec<_>>());
        for_each_permutation(k, |perm| {
            let c: f64 = perm.iter().enumerate().map(|(r, &c)| cost[(r, c)]).sum();
            if c < best.0 {
                best = (c, perm.to_vec());
            }
        });
        best
    } else {
        let perm = hungarian(cost);
        let c = perm.iter().enumerate().map(|(r, &c)| cost[(r, c)]).sum();
        (c, perm)
    }
}

/// Visits all permutations of `0..k` in lexicographic order.
fn for_each_permutation(k: usize, mut f: impl FnMut(&[usize])) {
    let mut perm: Vec<usize> = (0..k).collect();
    loop {
        f(&perm);
        let Some(i) = (1..k).rev().find(|&i| perm[i - 1] < perm[i]) else {
            return;
        };
        let j = (i..k).rev().find(|&j| perm[j] > perm[i - 1]).expect("successor exists");
        perm.swap(i - 1, j);
        perm[i..].reverse();
    }
}

fn hungarian(cost: &DMatrix<f64>) -> Vec<usize> {
    let n = cost.nrows();
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for row in 1..=n {
        owner[0] = row;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[(i0 - 1, j - 1)] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut perm = vec![0; n];
    for j in 1..=n {
        perm[owner[j] - 1] = j - 1;
    }
    perm
}

fn check_same_shape(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch(format!("{:?} vs {:?}", a.shape(), b.shape())));
    }
    Ok(())
}

/// `min_P sum_k |A_hat P_k - A_k|_1`. `perm[k]` is the estimated column matched to true column `k`.
pub fn l1_error(a_hat: &DMatrix<f64>, a_true: &DMatrix<f64>) -> Result<(f64, Vec<usize>)> {
    check_same_shape(a_hat, a_true)?;
    let k = a_true.ncols();
    let cost = DMatrix::from_fn(k, k, |t, e| (a_true.column(t) - a_hat.column(e)).lp_norm(1));
    Ok(min_cost_assignment(&cost))
}

/// `min_P (1/n) sum_i |P w_hat_i - w_i|_1`, matching rows.
pub fn w_error(w_hat: &DMatrix<f64>, w_true: &DMatrix<f64>) -> Result<(f64, Vec<usize>)> {
    check_same_shape(w_hat, w_true)?;
    let (k, n) = w_true.shape();
    if n == 0 {
        return Ok((0.0, (0..k).collect()));
    }
    let cost = DMatrix::from_fn(k, k, |t, e| (w_true.row(t) - w_hat.row(e)).lp_norm(1) / n as f64);
    Ok(min_cost_assignment(&cost))
}

/// `min_P max |A_hat P - A|` over column permutations; exhaustive for
/// `K <= 8`, otherwise evaluated at the l1-optimal permutation.
pub fn max_abs_error(a_hat: &DMatrix<f64>, a_true: &DMatrix<f64>) -> Result<(f64, Vec<usize>)> {
    check_same_shape(a_hat, a_true)?;
    let k = a_true.ncols();
    let cost = DMatrix::from_fn(k, k, |t, e| (a_true.column(t) - a_hat.column(e)).amax());
    let worst = |perm: &[usize]| perm.iter().enumerate().map(|(t, &e)| cost[(t, e)]).fold(0.0, f64::max);
    if k <= 8 {
        let mut best = (f64::INFINITY, (0..k).collect::<Vec<_>>());
        for_each_permutation(k, |perm| {
            let c = worst(perm);
            if c < best.0 {
                best = (c, perm.to_vec());
            }
        });
        Ok(best)
    } else {
        let (_, perm) = l1_error(a_hat, a_true)?;
        Ok((worst(&perm), perm))
    }
}
