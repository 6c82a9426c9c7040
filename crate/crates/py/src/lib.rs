//! Python bindings: topic fitting, topic weights, TR-SCORE and Stigler
//! rankings, PageRank, synthetic corpora and citation metrics.
//!
//! Matrices cross the boundary as lists of rows. Count matrices are `p x n`
//! (words by documents); topic weight matrices are `K x n`.

use nalgebra::DMatrix;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use tscore::corpus::{frequency_matrix, CitationGraph, DocumentTermMatrix, Vocabulary};
use tscore::linalg::CscMatrix;
use tscore::metrics::{self, CitationCurve, PeakRule};
use tscore::ranking::{self, PairSelection, PairedComparisons};
use tscore::spectral::{self, BarycentricMode, VertexHunter, VertexHuntOptions};
use tscore::synth::{self, SynthParams};
use tscore::{weights, ErrorCategory, FitOptions};

create_exception!(tscore_py, TscoreError, PyException, "Base class for toolkit errors.");
create_exception!(tscore_py, InputError, TscoreError, "Malformed input or arguments.");
create_exception!(tscore_py, EmptyResultError, TscoreError, "Nothing left to work with.");
create_exception!(tscore_py, NumericalError, TscoreError, "A numerical step failed.");
create_exception!(tscore_py, DegenerateError, TscoreError, "The model is not identifiable on this data.");

fn to_py(e: tscore::Error) -> PyErr {
    let msg = e.to_string();
    match e.category() {
        ErrorCategory::Input => InputError::new_err(msg),
        ErrorCategory::EmptyResult => EmptyResultError::new_err(msg),
        ErrorCategory::Numerical => NumericalError::new_err(msg),
        ErrorCategory::Degenerate => DegenerateError::new_err(msg),
    }
}

fn input(msg: impl Into<String>) -> PyErr {
    InputError::new_err(msg.into())
}

fn matrix(rows: &[Vec<f64>], what: &str) -> PyResult<DMatrix<f64>> {
    let ncols = rows.first().map_or(0, Vec::len);
    if let Some(r) = rows.iter().position(|r| r.len() != ncols) {
        return Err(input(format!("{what}: row {r} has {} entries, expected {ncols}", rows[r].len())));
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |r, c| rows[r][c]))
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|r| m.row(r).iter().copied().collect()).collect()
}

fn sparse(m: &DMatrix<f64>) -> PyResult<CscMatrix<f64>> {
    let t: Vec<(usize, usize, f64)> = (0..m.ncols())
        .flat_map(|c| (0..m.nrows()).map(move |r| (r, c)))
        .filter(|&(r, c)| m[(r, c)] != 0.0)
        .map(|(r, c)| (r, c, m[(r, c)]))
        .collect();
    CscMatrix::from_triplets(m.nrows(), m.ncols(), t).map_err(to_py)
}

/// Column-normalized frequencies from a `p x n` count matrix.
fn frequencies(counts: &[Vec<u32>]) -> PyResult<CscMatrix<f64>> {
    let p = counts.len();
    let n = counts.first().map_or(0, Vec::len);
    if counts.iter().any(|r| r.len() != n) {
        return Err(input("counts: rows differ in length"));
    }
    let t: Vec<(usize, usize, u32)> = (0..n)
        .flat_map(|c| (0..p).map(move |r| (r, c)))
        .filter(|&(r, c)| counts[r][c] > 0)
        .map(|(r, c)| (r, c, counts[r][c]))
        .collect();
    let x = CscMatrix::from_triplets(p, n, t).map_err(to_py)?;
    let dtm = DocumentTermMatrix::new(x, Vocabulary::anonymous(p)).map_err(to_py)?;
    frequency_matrix(&dtm).map_err(to_py)
}

fn graph(n: usize, citations: Vec<(usize, usize)>) -> PyResult<CitationGraph> {
    CitationGraph::new(n, citations).map_err(to_py)
}

fn pair_selection(s: &str) -> PyResult<PairSelection> {
    match s {
        "at_least_one" => Ok(PairSelection::AtLeastOne),
        "exactly_one" => Ok(PairSelection::ExactlyOne),
        _ => Err(input(format!("pairs must be 'at_least_one' or 'exactly_one', got {s:?}"))),
    }
}

fn fit_options(vertex_hunter: &str, centers: Option<usize>, barycentric: &str, seed: u64) -> PyResult<FitOptions> {
    let method = match vertex_hunter {
        "sketched" => VertexHunter::Sketched,
        "successive" => VertexHunter::Successive,
        _ => return Err(input(format!("vertex_hunter must be 'sketched' or 'successive', got {vertex_hunter:?}"))),
    };
    let barycentric = match barycentric {
        "clip" => BarycentricMode::ClipRenormalize,
        "simplex" => BarycentricMode::SimplexConstrained,
        _ => return Err(input(format!("barycentric must be 'clip' or 'simplex', got {barycentric:?}"))),
    };
    Ok(FitOptions {
        vertex: VertexHuntOptions {
            method,
            centers,
            seed,
            ..Default::default()
        },
        barycentric,
        ..Default::default()
    })
}

/// A fitted topic model.
#[pyclass(frozen, get_all, skip_from_py_object)]
#[derive(Debug, Clone)]
pub struct TopicFit {
    /// `p x K` topic matrix, columns summing to one.
    pub a_hat: Vec<Vec<f64>>,
    /// `p x K` barycentric coordinates of the words.
    pub pi: Vec<Vec<f64>>,
    pub vertices: Vec<Vec<f64>>,
    pub singular_values: Vec<f64>,
    /// `"sketched"` or `"successive"`.
    pub hunter: String,
}

#[pymethods]
impl TopicFit {
    #[getter]
    fn k(&self) -> usize {
        self.singular_values.len()
    }

    /// Row-normalized topic matrix.
    fn loadings(&self) -> PyResult<Vec<Vec<f64>>> {
        Ok(rows(&spectral::topic_loadings(&matrix(&self.a_hat, "a_hat")?).map_err(to_py)?))
    }

    /// Indices of the `m` words with the largest loading on `topic`.
    fn anchor_words(&self, topic: usize, m: usize) -> PyResult<Vec<usize>> {
        if topic >= self.k() {
            return Err(input(format!("topic {topic} out of range for K = {}", self.k())));
        }
        let loadings = spectral::topic_loadings(&matrix(&self.a_hat, "a_hat")?).map_err(to_py)?;
        Ok(spectral::frequent_anchor_words(&loadings, topic, m))
    }

    fn __repr__(&self) -> String {
        format!("TopicFit(p={}, K={}, hunter={:?})", self.a_hat.len(), self.k(), self.hunter)
    }
}

/// Export scores from a paired-comparison fit.
#[pyclass(frozen, get_all, skip_from_py_object)]
#[derive(Debug, Clone)]
pub struct ExportScores {
    pub mu: Vec<f64>,
    /// Pearson dispersion; NaN without residual degrees of freedom.
    pub phi: f64,
    pub n_pairs: usize,
    pub iterations: usize,
    pub converged: bool,
    pub degenerate: bool,
}

#[pymethods]
impl ExportScores {
    /// Entity indices from highest to lowest score.
    fn ranking(&self) -> Vec<usize> {
        self.core().ranking()
    }

    fn __repr__(&self) -> String {
        format!("ExportScores(mu={:?}, phi={}, n_pairs={})", self.mu, self.phi, self.n_pairs)
    }
}

impl ExportScores {
    fn core(&self) -> ranking::ExportScores {
        ranking::ExportScores {
            mu: self.mu.clone(),
            phi: self.phi,
            n_pairs: self.n_pairs,
            iterations: self.iterations,
            converged: self.converged,
            degenerate: self.degenerate,
        }
    }
}

impl From<ranking::ExportScores> for ExportScores {
    fn from(s: ranking::ExportScores) -> Self {
        ExportScores {
            mu: s.mu,
            phi: s.phi,
            n_pairs: s.n_pairs,
            iterations: s.iterations,
            converged: s.converged,
            degenerate: s.degenerate,
        }
    }
}

/// Estimate the topic matrix from a `p x n` count matrix.
#[pyfunction]
#[pyo3(signature = (counts, k, *, vertex_hunter = "sketched", centers = None, barycentric = "clip", seed = 0))]
pub fn fit_topics(
    py: Python<'_>,
    counts: Vec<Vec<u32>>,
    k: usize,
    vertex_hunter: &str,
    centers: Option<usize>,
    barycentric: &str,
    seed: u64,
) -> PyResult<TopicFit> {
    let d = frequencies(&counts)?;
    let opts = fit_options(vertex_hunter, centers, barycentric, seed)?;
    let fit = py.detach(|| tscore::estimate_topic_matrix(&d, k, &opts)).map_err(to_py)?;
    Ok(TopicFit {
        a_hat: rows(&fit.a_hat),
        pi: rows(&fit.pi),
        vertices: rows(&fit.vertices.v),
        singular_values: fit.embedding.singular_values.clone(),
        hunter: match fit.hunter {
            VertexHunter::Sketched => "sketched",
            VertexHunter::Successive => "successive",
        }
        .into(),
    })
}

/// Topic weights (`K x n`) for each document given a topic matrix.
#[pyfunction]
#[pyo3(signature = (a_hat, counts, *, method = "ridge", lam = weights::DEFAULT_RIDGE_LAMBDA))]
pub fn estimate_weights(a_hat: Vec<Vec<f64>>, counts: Vec<Vec<u32>>, method: &str, lam: f64) -> PyResult<Vec<Vec<f64>>> {
    let a = matrix(&a_hat, "a_hat")?;
    let d = frequencies(&counts)?;
    let w = match method {
        "ridge" => weights::estimate_weights_ridge(&a, &d, lam),
        "wls" => {
            let m = spectral::normalization_matrix(&d).map_err(to_py)?;
            weights::estimate_weights_wls(&a, &d, &m)
        }
        _ => return Err(input(format!("method must be 'ridge' or 'wls', got {method:?}"))),
    }
    .map_err(to_py)?;
    Ok(rows(&w.w_hat))
}

/// TR-SCORE: topic model, ridge weights, then topic export scores.
///
/// `citations` lists `(i, j)` pairs meaning document `i` cites document `j`.
#[pyfunction]
#[pyo3(signature = (counts, citations, k, *, lam = weights::DEFAULT_RIDGE_LAMBDA, pairs = "at_least_one", seed = 0))]
pub fn tr_score(
    py: Python<'_>,
    counts: Vec<Vec<u32>>,
    citations: Vec<(usize, usize)>,
    k: usize,
    lam: f64,
    pairs: &str,
    seed: u64,
) -> PyResult<ExportScores> {
    let d = frequencies(&counts)?;
    let g = graph(d.ncols(), citations)?;
    let opts = tscore::TrScoreOptions {
        lambda: lam,
        fit: fit_options("sketched", None, "clip", seed)?,
        pairs: pair_selection(pairs)?,
    };
    let r = py.detach(|| tscore::tr_score(&d, &g, k, &opts)).map_err(to_py)?;
    Ok(r.scores.into())
}

/// Export scores from given topic weights (`K x n`) and citations.
#[pyfunction]
#[pyo3(signature = (w_hat, citations, *, pairs = "at_least_one"))]
pub fn export_scores(w_hat: Vec<Vec<f64>>, citations: Vec<(usize, usize)>, pairs: &str) -> PyResult<ExportScores> {
    let w = matrix(&w_hat, "w_hat")?;
    let g = graph(w.ncols(), citations)?;
    Ok(ranking::fit_export_scores(&w, &g, pair_selection(pairs)?).map_err(to_py)?.into())
}

/// Stigler model from a square matrix of citation counts, `wins[a][b]` being
/// citations from `a` to `b`.
#[pyfunction]
#[pyo3(signature = (wins, entities = None))]
pub fn fit_stigler(wins: Vec<Vec<u64>>, entities: Option<Vec<String>>) -> PyResult<ExportScores> {
    let j = wins.len();
    if wins.iter().any(|r| r.len() != j) {
        return Err(input("wins must be square"));
    }
    let names = entities.unwrap_or_else(|| (0..j).map(|i| i.to_string()).collect());
    let pc = PairedComparisons::new(names, DMatrix::from_fn(j, j, |r, c| wins[r][c])).map_err(to_py)?;
    Ok(ranking::fit_stigler(&pc).map_err(to_py)?.into())
}

/// PageRank of a nonnegative adjacency matrix where `adjacency[i][j]` weights `i -> j`.
#[pyfunction]
#[pyo3(signature = (adjacency, alpha = 0.85, tol = 1e-12))]
pub fn pagerank(adjacency: Vec<Vec<f64>>, alpha: f64, tol: f64) -> PyResult<Vec<f64>> {
    ranking::pagerank(&matrix(&adjacency, "adjacency")?, alpha, tol).map_err(to_py)
}

/// Sleeping-beauty coefficient and 1-based peak year of a yearly citation curve.
#[pyfunction]
#[pyo3(signature = (counts, peak_rule = "earliest"))]
pub fn sleeping_beauty(counts: Vec<u64>, peak_rule: &str) -> PyResult<(f64, usize)> {
    let rule = match peak_rule {
        "earliest" => PeakRule::Earliest,
        "latest" => PeakRule::Latest,
        _ => return Err(input(format!("peak_rule must be 'earliest' or 'latest', got {peak_rule:?}"))),
    };
    Ok(metrics::sleeping_beauty(&CitationCurve::new(counts).map_err(to_py)?, rule))
}

/// Centered topic interest as `(author, [z_1, ..., z_K])` pairs.
#[pyfunction]
pub fn topic_interest(author_papers: Vec<(String, Vec<usize>)>, w_hat: Vec<Vec<f64>>) -> PyResult<Vec<(String, Vec<f64>)>> {
    let w = matrix(&w_hat, "w_hat")?;
    Ok(metrics::topic_interest(&author_papers, &w)
        .map_err(to_py)?
        .into_iter()
        .map(|t| (t.author_id, t.z))
        .collect())
}

/// Indices of topics whose interest exceeds `fraction` of the largest.
#[pyfunction]
#[pyo3(signature = (z, fraction = 0.5))]
pub fn major_topics(z: Vec<f64>, fraction: f64) -> Vec<usize> {
    metrics::major_topics(&z, fraction).topics
}

/// Leading singular values of a count matrix and the count above `threshold`.
#[pyfunction]
#[pyo3(signature = (counts, max_l, threshold = None))]
pub fn select_k(counts: Vec<Vec<f64>>, max_l: usize, threshold: Option<f64>) -> PyResult<(Vec<f64>, Option<usize>)> {
    let x = sparse(&matrix(&counts, "counts")?)?;
    let r = tscore::select_k_scree(&x, threshold, max_l).map_err(to_py)?;
    Ok((r.singular_values, r.k_hat))
}

/// Permutation-matched `(error, perm)` between topic matrices; `perm[k]` is
/// the estimated column matched to true column `k`.
#[pyfunction]
pub fn l1_error(a_hat: Vec<Vec<f64>>, a_true: Vec<Vec<f64>>) -> PyResult<(f64, Vec<usize>)> {
    synth::l1_error(&matrix(&a_hat, "a_hat")?, &matrix(&a_true, "a_true")?).map_err(to_py)
}

/// A synthetic corpus with its generating parameters.
#[pyclass(frozen, get_all, skip_from_py_object)]
#[derive(Debug, Clone)]
pub struct SynthCorpus {
    /// `p x n` word counts.
    pub counts: Vec<Vec<u32>>,
    /// `p x K` true topic matrix.
    pub a: Vec<Vec<f64>>,
    /// `K x n` true topic weights.
    pub w: Vec<Vec<f64>>,
    pub mu: Option<Vec<f64>>,
    /// `(i, j)`: document `i` cites document `j`.
    pub citations: Vec<(usize, usize)>,
    pub years: Vec<i32>,
    pub journals: Vec<String>,
    pub authors: Vec<Vec<String>>,
}

#[pymethods]
impl SynthCorpus {
    fn __repr__(&self) -> String {
        format!(
            "SynthCorpus(p={}, n={}, K={}, citations={})",
            self.counts.len(),
            self.years.len(),
            self.w.len(),
            self.citations.len()
        )
    }
}

#[pyfunction]
#[pyo3(signature = (
    *, p = 100, n = 500, k = 3, doc_len = 300, anchor_count = 5,
    heterogeneity = synth::DEFAULT_HETEROGENEITY, alpha = 1.0, pure_fraction = 0.2,
    mu = None, pair_prob = 0.01, duplicate_pairs = false, seed = 0
))]
#[allow(clippy::too_many_arguments)]
pub fn synthesize(
    py: Python<'_>,
    p: usize,
    n: usize,
    k: usize,
    doc_len: u64,
    anchor_count: usize,
    heterogeneity: f64,
    alpha: f64,
    pure_fraction: f64,
    mu: Option<Vec<f64>>,
    pair_prob: f64,
    duplicate_pairs: bool,
    seed: u64,
) -> PyResult<SynthCorpus> {
    let params = SynthParams {
        p,
        n,
        k,
        doc_len,
        anchor_count,
        heterogeneity,
        alpha,
        pure_fraction,
        mu,
        pair_prob,
        duplicate_pairs,
        seed,
    };
    let c = py.detach(|| params.generate()).map_err(to_py)?;
    let x = c.dtm.counts();
    let mut counts = vec![vec![0u32; x.ncols()]; x.nrows()];
    for (r, col, v) in x.triplets() {
        counts[r][col] = v;
    }
    Ok(SynthCorpus {
        counts,
        a: rows(&c.truth.a),
        w: rows(&c.truth.w),
        mu: c.truth.mu.map(|m| m.iter().copied().collect()),
        citations: c.graph.map(|g| g.edges().to_vec()).unwrap_or_default(),
        years: c.metas.iter().map(|m| m.year).collect(),
        journals: c.metas.iter().map(|m| m.journal_id.clone()).collect(),
        authors: c.metas.into_iter().map(|m| m.author_ids).collect(),
    })
}

#[pymodule]
pub fn tscore_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("TscoreError", py.get_type::<TscoreError>())?;
    m.add("InputError", py.get_type::<InputError>())?;
    m.add("EmptyResultError", py.get_type::<EmptyResultError>())?;
    m.add("NumericalError", py.get_type::<NumericalError>())?;
    m.add("DegenerateError", py.get_type::<DegenerateError>())?;
    m.add_class::<TopicFit>()?;
    m.add_class::<ExportScores>()?;
    m.add_class::<SynthCorpus>()?;
    m.add_function(wrap_pyfunction!(fit_topics, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_weights, m)?)?;
    m.add_function(wrap_pyfunction!(tr_score, m)?)?;
    m.add_function(wrap_pyfunction!(export_scores, m)?)?;
    m.add_function(wrap_pyfunction!(fit_stigler, m)?)?;
    m.add_function(wrap_pyfunction!(pagerank, m)?)?;
    m.add_function(wrap_pyfunction!(sleeping_beauty, m)?)?;
    m.add_function(wrap_pyfunction!(topic_interest, m)?)?;
    m.add_function(wrap_pyfunction!(major_topics, m)?)?;
    m.add_function(wrap_pyfunction!(select_k, m)?)?;
    m.add_function(wrap_pyfunction!(l1_error, m)?)?;
    m.add_function(wrap_pyfunction!(synthesize, m)?)?;
    Ok(())
}
