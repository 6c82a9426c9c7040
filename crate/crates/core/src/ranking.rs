//! Citation-exchange rankings: Stigler's paired-comparison model for journals,
//! PageRank, TR-SCORE export scores for topics, and cross-topic citation graphs.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};

use crate::corpus::{CitationGraph, PaperMeta};
use crate::error::{Error, Result};
use crate::glm::{fit_binomial_logit, pearson_dispersion, BinomialData, IrlsOptions};
use crate::linalg::CscMatrix;
use crate::spectral::{estimate_topic_matrix, FitOptions, TopicModelFit};
use crate::weights::{dominant_topic, estimate_weights_ridge, TopicWeights, DEFAULT_RIDGE_LAMBDA};

/// Between-entity citation counts. `wins[(a, b)]` counts citations from `a` to `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedComparisons {
    pub entities: Vec<String>,
    pub wins: DMatrix<u64>,
    /// Citations an entity makes to itself; kept out of `wins`.
    pub self_citations: Vec<u64>,
}

impl PairedComparisons {
    pub fn new(entities: Vec<String>, mut wins: DMatrix<u64>) -> Result<Self> {
        let j = entities.len();
        if wins.shape() != (j, j) {
            return Err(Error::ShapeMismatch(format!(
                "wins matrix is {:?}, expected {j}x{j}",
                wins.shape()
            )));
        }
        let self_citations = (0..j).map(|a| wins[(a, a)]).collect();
        for a in 0..j {
            wins[(a, a)] = 0;
        }
        Ok(PairedComparisons {
            entities,
            wins,
            self_citations,
        })
    }

    pub fn len(&self) -> usize {
        self.entities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }

    /// Citation matrix for PageRank, with or without self-citations.
    pub fn adjacency(&self, include_self: bool) -> DMatrix<f64> {
        let mut a = self.wins.map(|v| v as f64);
        if include_self {
            for (k, &s) in self.self_citations.iter().enumerate() {
                a[(k, k)] = s as f64;
            }
        }
        a
    }
}

/// Journal-level citation counts with a look-back window.
///
/// For each base year `y`, a citation from a paper published in year `y` to a
/// paper published in `[y - window + 1, y]` is counted between their journals.
/// Yearly matrices are summed over `base_years`. Entities are the sorted journal
/// ids present in `metas`.
pub fn journal_citation_matrix(
    metas: &[PaperMeta],
    graph: &CitationGraph,
    window_years: i32,
    base_years: &[i32],
) -> Result<PairedComparisons> {
    if window_years < 1 {
        return Err(Error::InvalidArgument(
            "window must be at least one year".into(),
        ));
    }
    if graph.n() != metas.len() {
        return Err(Error::ShapeMismatch(format!(
            "citation graph has {} papers, metadata has {}",
            graph.n(),
            metas.len()
        )));
    }
    let journals: BTreeSet<&str> = metas
        .iter()
        .map(|m| m.journal_id.as_str())
        .filter(|j| !j.is_empty())
        .collect();
    let index: BTreeMap<&str, usize> = journals.iter().enumerate().map(|(i, &j)| (j, i)).collect();
    let nj = journals.len();
    let mut wins = DMatrix::<u64>::zeros(nj, nj);
    let bases: BTreeSet<i32> = base_years.iter().copied().collect();

    for &(i, j) in graph.edges() {
        let (citer, cited) = (&metas[i], &metas[j]);
        if !bases.contains(&citer.year) {
            continue;
        }
        let y = citer.year;
        if cited.year < y - window_years + 1 || cited.year > y {
            continue;
        }
        let a = *index
            .get(citer.journal_id.as_str())
            .ok_or_else(|| Error::UnknownJournal {
                paper: citer.paper_id.clone(),
            })?;
        let b = *index
            .get(cited.journal_id.as_str())
            .ok_or_else(|| Error::UnknownJournal {
                paper: cited.paper_id.clone(),
            })?;
        wins[(a, b)] += 1;
    }
    PairedComparisons::new(journals.into_iter().map(str::to_string).collect(), wins)
}

/// Which comparable pairs enter the quasi-likelihood and the count `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PairSelection {
    /// Pairs with at least one citation in either direction.
    #[default]
    AtLeastOne,
    /// Only pairs with exactly one citation between them.
    ExactlyOne,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ExportScores {
    pub mu: Vec<f64>,
    /// Pearson dispersion; NaN when there are no residual degrees of freedom.
    pub phi: f64,
    pub n_pairs: usize,
    pub iterations: usize,
    pub converged: bool,
    /// Predictors carried no variation, so every score fits equally well.
    pub degenerate: bool,
}

impl ExportScores {
    /// Entity indices ordered by descending score (ties by index).
    pub fn ranking(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.mu.len()).collect();
        idx.sort_by(|&a, &b| {
            self.mu[b]
                .partial_cmp(&self.mu[a])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        idx
    }
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite scores"));
    let n = v.len();
    if n == 0 {
        0.0
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn center_median(mu: &mut [f64]) {
    let m = median(mu);
    for x in mu.iter_mut() {
        *x -= m;
    }
}

fn components(n: usize, pairs: impl Iterator<Item = (usize, usize)>) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (a, b) in pairs {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for x in 0..n {
        let r = find(&mut parent, x);
        groups.entry(r).or_default().push(x);
    }
    groups.into_values().collect()
}

/// Scores above this magnitude after fitting indicate a diverging MLE.
const SEPARATION_BOUND: f64 = 30.0;

/// Fits Stigler's model `P(a cites b | one citation between them) =
/// logistic(mu_a - mu_b)` to entity-level counts.
pub fn fit_stigler(pc: &PairedComparisons) -> Result<ExportScores> {
    let j = pc.len();
    if j < 2 {
        return Err(Error::InvalidArgument("need at least two entities".into()));
    }
    let mut pairs = Vec::new();
    for a in 0..j {
        for b in (a + 1)..j {
            let total = pc.wins[(a, b)] + pc.wins[(b, a)];
            if total > 0 {
                pairs.push((a, b, pc.wins[(a, b)] as f64, total as f64));
            }
        }
    }
    if pairs.is_empty() {
        return Err(Error::NoComparablePairs);
    }
    let comps = components(j, pairs.iter().map(|&(a, b, _, _)| (a, b)));
    if comps.len() > 1 {
        return Err(Error::DisconnectedComparisonGraph {
            components: comps
                .into_iter()
                .map(|c| c.into_iter().map(|k| pc.entities[k].clone()).collect())
                .collect(),
        });
    }
    for a in 0..j {
        let out: u64 = (0..j).map(|b| pc.wins[(a, b)]).sum();
        let inc: u64 = (0..j).map(|b| pc.wins[(b, a)]).sum();
        if out == 0 {
            return Err(Error::Separation {
                entity: pc.entities[a].clone(),
                kind: "loses",
            });
        }
        if inc == 0 {
            return Err(Error::Separation {
                entity: pc.entities[a].clone(),
                kind: "wins",
            });
        }
    }

    let q = j - 1;
    let mut x = DMatrix::zeros(pairs.len(), q);
    for (r, &(a, b, _, _)) in pairs.iter().enumerate() {
        if a > 0 {
            x[(r, a - 1)] = 1.0;
        }
        if b > 0 {
            x[(r, b - 1)] = -1.0;
        }
    }
    let data = BinomialData {
        x,
        successes: pairs.iter().map(|p| p.2).collect(),
        trials: pairs.iter().map(|p| p.3).collect(),
    };
    let fit = fit_binomial_logit(&data, &IrlsOptions::default())?;
    if fit.beta.amax() > SEPARATION_BOUND {
        let worst = fit.beta.iamax();
        return Err(Error::Separation {
            entity: pc.entities[worst + 1].clone(),
            kind: "(with its group) dominates",
        });
    }
    let phi = pearson_dispersion(&data, &fit.beta, pairs.len() as isize - q as isize);
    let mut mu = Vec::with_capacity(j);
    mu.push(0.0);
    mu.extend(fit.beta.iter().copied());
    center_median(&mut mu);
    Ok(ExportScores {
        mu,
        phi,
        n_pairs: pairs.len(),
        iterations: fit.iterations,
        converged: fit.converged,
        degenerate: false,
    })
}

/// PageRank over a citation matrix where `adjacency[(i, j)]` is the weight of
/// `i -> j`. Rank flows from citing to cited; nodes citing nothing spread
/// uniformly.
pub fn pagerank(adjacency: &DMatrix<f64>, alpha: f64, tol: f64) -> Result<Vec<f64>> {
    let j = adjacency.nrows();
    if adjacency.ncols() != j {
        return Err(Error::ShapeMismatch("adjacency must be square".into()));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    if j == 0 {
        return Ok(Vec::new());
    }
    if adjacency.iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return Err(Error::InvalidArgument(
            "adjacency entries must be finite and nonnegative".into(),
        ));
    }
    let out: Vec<f64> = (0..j).map(|i| adjacency.row(i).sum()).collect();
    let uniform = 1.0 / j as f64;
    let mut rank = vec![uniform; j];
    for _ in 0..100_000 {
        let dangling: f64 = (0..j).filter(|&i| out[i] == 0.0).map(|i| rank[i]).sum();
        let mut next = vec![(1.0 - alpha) * uniform + alpha * dangling * uniform; j];
        for i in 0..j {
            if out[i] == 0.0 {
                continue;
            }
            let share = alpha * rank[i] / out[i];
            for (t, nx) in next.iter_mut().enumerate() {
                let w = adjacency[(i, t)];
                if w != 0.0 {
                    *nx += share * w;
                }
            }
        }
        let total: f64 = next.iter().sum();
        for v in next.iter_mut() {
            *v /= total;
        }
        let change: f64 = next.iter().zip(&rank).map(|(a, b)| (a - b).abs()).sum();
        rank = next;
        if change < tol {
            break;
        }
    }
    Ok(rank)
}

/// Grouped pair data for the TR-SCORE quasi-likelihood.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparablePair {
    /// Lower paper index.
    pub i: usize,
    /// Higher paper index.
    pub j: usize,
    /// Citations from `i` to `j` (0 or 1).
    pub c_ij: u32,
    /// `C_ij + C_ji`.
    pub total: u32,
}

pub fn comparable_pairs(graph: &CitationGraph, selection: PairSelection) -> Vec<ComparablePair> {
    let mut map: BTreeMap<(usize, usize), (u32, u32)> = BTreeMap::new();
    for &(a, b) in graph.edges() {
        let key = (a.min(b), a.max(b));
        let e = map.entry(key).or_insert((0, 0));
        if a < b {
            e.0 += 1;
        }
        e.1 += 1;
    }
    map.into_iter()
        .filter(|(_, (_, total))| match selection {
            PairSelection::AtLeastOne => *total >= 1,
            PairSelection::ExactlyOne => *total == 1,
        })
        .map(|((i, j), (c_ij, total))| ComparablePair { i, j, c_ij, total })
        .collect()
}

/// Step 3 of TR-SCORE: export scores given topic weights (`K x n`).
pub fn fit_export_scores(
    w_hat: &DMatrix<f64>,
    graph: &CitationGraph,
    selection: PairSelection,
) -> Result<ExportScores> {
    let (k, n) = w_hat.shape();
    if graph.n() != n {
        return Err(Error::ShapeMismatch(format!(
            "citation graph has {} papers, weights have {n} columns",
            graph.n()
        )));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("K must be positive".into()));
    }
    let pairs = comparable_pairs(graph, selection);
    if pairs.is_empty() {
        return Err(Error::NoComparablePairs);
    }
    let q = k - 1;
    let x = DMatrix::from_fn(pairs.len(), q, |r, c| {
        w_hat[(c + 1, pairs[r].i)] - w_hat[(c + 1, pairs[r].j)]
    });
    let data = BinomialData {
        x,
        successes: pairs.iter().map(|p| p.c_ij as f64).collect(),
        trials: pairs.iter().map(|p| p.total as f64).collect(),
    };
    let df = pairs.len() as isize - q as isize;

    if q == 0 || data.x.iter().all(|&v| v == 0.0) {
        let beta = DVector::zeros(q);
        return Ok(ExportScores {
            mu: vec![0.0; k],
            phi: pearson_dispersion(&data, &beta, df),
            n_pairs: pairs.len(),
            iterations: 0,
            converged: true,
            degenerate: true,
        });
    }

    let fit = fit_binomial_logit(&data, &IrlsOptions::default())?;
    let phi = pearson_dispersion(&data, &fit.beta, df);
    let mut mu = Vec::with_capacity(k);
    mu.push(0.0);
    mu.extend(fit.beta.iter().copied());
    center_median(&mut mu);
    Ok(ExportScores {
        mu,
        phi,
        n_pairs: pairs.len(),
        iterations: fit.iterations,
        converged: fit.converged,
        degenerate: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrScoreOptions {
    pub lambda: f64,
    pub fit: FitOptions,
    pub pairs: PairSelection,
}

impl Default for TrScoreOptions {
    fn default() -> Self {
        TrScoreOptions {
            lambda: DEFAULT_RIDGE_LAMBDA,
            fit: FitOptions::default(),
            pairs: PairSelection::AtLeastOne,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrScoreResult {
    pub scores: ExportScores,
    pub fit: TopicModelFit,
    pub weights: TopicWeights,
}

/// TR-SCORE: topic matrix, ridge topic weights, then export scores.
pub fn tr_score(
    d: &CscMatrix<f64>,
    graph: &CitationGraph,
    k: usize,
    opts: &TrScoreOptions,
) -> Result<TrScoreResult> {
    let fit = estimate_topic_matrix(d, k, &opts.fit)?;
    let weights = estimate_weights_ridge(&fit.a_hat, d, opts.lambda)?;
    let scores = fit_export_scores(&weights.w_hat, graph, opts.pairs)?;
    Ok(TrScoreResult {
        scores,
        fit,
        weights,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphMode {
    Weighted,
    Dominant,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossTopicGraph {
    /// Row-normalized `n_counts`.
    pub p: DMatrix<f64>,
    /// Allocated citation counts from topic `k` to topic `l`.
    pub n_counts: DMatrix<f64>,
    pub mode: GraphMode,
    /// Topics that make no citations; their rows of `p` stay zero.
    pub zero_rows: Vec<usize>,
}

pub fn cross_topic_graph(
    w_hat: &DMatrix<f64>,
    graph: &CitationGraph,
    mode: GraphMode,
) -> Result<CrossTopicGraph> {
    let (k, n) = w_hat.shape();
    if graph.n() != n {
        return Err(Error::ShapeMismatch(format!(
            "citation graph has {} papers, weights have {n} columns",
            graph.n()
        )));
    }
    let weights = match mode {
        GraphMode::Weighted => w_hat.clone(),
        GraphMode::Dominant => {
            let labels = dominant_topic(w_hat);
            DMatrix::from_fn(k, n, |t, i| if labels[i] == t { 1.0 } else { 0.0 })
        }
    };
    let mut n_counts = DMatrix::zeros(k, k);
    for &(i, j) in graph.edges() {
        n_counts += weights.column(i) * weights.column(j).transpose();
    }
    let mut p = n_counts.clone();
    let mut zero_rows = Vec::new();
    for t in 0..k {
        let s = p.row(t).sum();
        if s > 0.0 {
            p.row_mut(t).unscale_mut(s);
        } else {
            zero_rows.push(t);
        }
    }
    Ok(CrossTopicGraph {
        p,
        n_counts,
        mode,
        zero_rows,
    })
}

/// Paper defaults for the edge cutoff in each mode.
pub fn default_edge_cutoff(mode: GraphMode) -> f64 {
    match mode {
        GraphMode::Dominant => 0.09,
        GraphMode::Weighted => 0.11,
    }
}

/// Off-diagonal edges with weight at least `cutoff`, heaviest first.
pub fn threshold_edges(g: &CrossTopicGraph, cutoff: f64) -> Result<Vec<(usize, usize, f64)>> {
    if !(0.0..=1.0).contains(&cutoff) {
        return Err(Error::InvalidArgument(format!(
            "cutoff must lie in [0, 1], got {cutoff}"
        )));
    }
    let k = g.p.nrows();
    let mut edges: Vec<(usize, usize, f64)> = (0..k)
        .flat_map(|a| (0..k).map(move |b| (a, b)))
        .filter(|&(a, b)| a != b && g.p[(a, b)] >= cutoff)
        .map(|(a, b)| (a, b, g.p[(a, b)]))
        .collect();
    edges.sort_by(|x, y| {
        y.2.partial_cmp(&x.2)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then((x.0, x.1).cmp(&(y.0, y.1)))
    });
    Ok(edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta(id: &str, year: i32, journal: &str) -> PaperMeta {
        PaperMeta {
            paper_id: id.into(),
            year,
            journal_id: journal.into(),
            author_ids: vec!["x".into()],
        }
    }

    #[test]
    fn window_counting() {
        let metas = vec![
            meta("p", 2014, "A"),
            meta("q", 2005, "B"),
            meta("r", 2004, "B"),
        ];
        let g = CitationGraph::new(3, vec![(0, 1)]).unwrap();
        let pc = journal_citation_matrix(&metas, &g, 10, &[2014]).unwrap();
        assert_eq!(pc.entities, vec!["A", "B"]);
        assert_eq!(pc.wins[(0, 1)], 1);

        let g = CitationGraph::new(3, vec![(0, 2)]).unwrap();
        let pc = journal_citation_matrix(&metas, &g, 10, &[2014]).unwrap();
        assert!(pc.wins.iter().all(|&v| v == 0));
    }

    #[test]
    fn base_years_sum() {
        let metas = vec![
            meta("a", 2014, "A"),
            meta("b", 2015, "A"),
            meta("c", 2010, "B"),
            meta("d", 2013, "A"),
        ];
        let g = CitationGraph::new(4, vec![(0, 2), (1, 2), (2, 3), (1, 0)]).unwrap();
        let only14 = journal_citation_matrix(&metas, &g, 10, &[2014]).unwrap();
        let only15 = journal_citation_matrix(&metas, &g, 10, &[2015]).unwrap();
        let both = journal_citation_matrix(&metas, &g, 10, &[2014, 2015]).unwrap();
        assert_eq!(both.wins, &only14.wins + &only15.wins);
        assert_eq!(both.wins[(0, 1)], 2);
        assert_eq!(both.self_citations, vec![1, 0]);
    }

    #[test]
    fn unknown_journal() {
        let metas = vec![meta("a", 2014, "A"), meta("b", 2010, "")];
        let g = CitationGraph::new(2, vec![(0, 1)]).unwrap();
        assert!(matches!(
            journal_citation_matrix(&metas, &g, 10, &[2014]),
            Err(Error::UnknownJournal { .. })
        ));
    }

    #[test]
    fn stigler_two_entities_closed_form() {
        let pc = PairedComparisons::new(
            vec!["a".into(), "b".into()],
            DMatrix::from_row_slice(2, 2, &[0, 3, 1, 0]),
        )
        .unwrap();
        let s = fit_stigler(&pc).unwrap();
        let half = 3f64.ln() / 2.0;
        assert!((s.mu[0] - half).abs() < 1e-10);
        assert!((s.mu[1] + half).abs() < 1e-10);
        assert!(s.phi.is_nan());
        assert_eq!(s.n_pairs, 1);
    }

    #[test]
    fn stigler_symmetric_is_zero() {
        let wins = DMatrix::from_row_slice(3, 3, &[0, 4, 2, 4, 0, 7, 2, 7, 0]);
        let pc = PairedComparisons::new(vec!["a".into(), "b".into(), "c".into()], wins).unwrap();
        let s = fit_stigler(&pc).unwrap();
        assert!(s.mu.iter().all(|m| m.abs() < 1e-10));
    }

    #[test]
    fn stigler_errors() {
        let names = |n: usize| (0..n).map(|i| format!("j{i}")).collect::<Vec<_>>();
        let disc = DMatrix::from_row_slice(4, 4, &[0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 2, 0, 0, 1, 0]);
        match fit_stigler(&PairedComparisons::new(names(4), disc).unwrap()) {
            Err(Error::DisconnectedComparisonGraph { components }) => {
                assert_eq!(components.len(), 2)
            }
            other => panic!("unexpected {other:?}"),
        }
        let sep = DMatrix::from_row_slice(2, 2, &[0, 5, 0, 0]);
        assert!(matches!(
            fit_stigler(&PairedComparisons::new(names(2), sep).unwrap()),
            Err(Error::Separation { .. })
        ));
        let none = DMatrix::zeros(2, 2);
        assert!(matches!(
            fit_stigler(&PairedComparisons::new(names(2), none).unwrap()),
            Err(Error::NoComparablePairs)
        ));
    }

    #[test]
    fn pagerank_symmetric_cases() {
        let two = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        for alpha in [0.1, 0.5, 0.85] {
            let r = pagerank(&two, alpha, 1e-12).unwrap();
            assert!((r[0] - 0.5).abs() < 1e-12 && (r[1] - 0.5).abs() < 1e-12);
        }
        let cycle = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0]);
        let r = pagerank(&cycle, 0.85, 1e-12).unwrap();
        assert!(r.iter().all(|v| (v - 1.0 / 3.0).abs() < 1e-12));
    }

    #[test]
    fn pagerank_rejects_bad_alpha() {
        assert!(pagerank(&DMatrix::zeros(2, 2), 1.0, 1e-12).is_err());
        assert!(pagerank(&DMatrix::zeros(2, 2), 0.0, 1e-12).is_err());
    }

    #[test]
    fn comparable_pairs_orientation() {
        let g = CitationGraph::new(3, vec![(2, 0), (0, 2), (1, 2)]).unwrap();
        let pairs = comparable_pairs(&g, PairSelection::AtLeastOne);
        assert_eq!(
            pairs,
            vec![
                ComparablePair {
                    i: 0,
                    j: 2,
                    c_ij: 1,
                    total: 2
                },
                ComparablePair {
                    i: 1,
                    j: 2,
                    c_ij: 1,
                    total: 1
                },
            ]
        );
        assert_eq!(comparable_pairs(&g, PairSelection::ExactlyOne).len(), 1);
    }

    #[test]
    fn equal_weights_are_degenerate() {
        let w = DMatrix::from_element(3, 4, 1.0 / 3.0);
        let g = CitationGraph::new(4, vec![(0, 1), (2, 3), (3, 1)]).unwrap();
        let s = fit_export_scores(&w, &g, PairSelection::AtLeastOne).unwrap();
        assert!(s.degenerate);
        assert_eq!(s.mu, vec![0.0; 3]);
    }

    #[test]
    fn no_pairs_error() {
        let w = DMatrix::from_element(2, 3, 0.5);
        assert!(matches!(
            fit_export_scores(&w, &CitationGraph::empty(3), PairSelection::AtLeastOne),
            Err(Error::NoComparablePairs)
        ));
    }

    #[test]
    fn cross_topic_single_edge() {
        let w = DMatrix::from_column_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let g = CitationGraph::new(2, vec![(0, 1)]).unwrap();
        for mode in [GraphMode::Weighted, GraphMode::Dominant] {
            let ct = cross_topic_graph(&w, &g, mode).unwrap();
            assert_eq!(
                ct.n_counts,
                DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0])
            );
            assert_eq!(
                ct.p.row(0).iter().cloned().collect::<Vec<_>>(),
                vec![0.0, 1.0]
            );
            assert_eq!(ct.zero_rows, vec![1]);
        }
    }

    #[test]
    fn cross_topic_half_weights() {
        let w = DMatrix::from_element(2, 2, 0.5);
        let g = CitationGraph::new(2, vec![(0, 1)]).unwrap();
        let ct = cross_topic_graph(&w, &g, GraphMode::Weighted).unwrap();
        assert_eq!(ct.n_counts, DMatrix::from_element(2, 2, 0.25));
        assert_eq!(ct.p, DMatrix::from_element(2, 2, 0.5));
    }

    #[test]
    fn thresholding() {
        let mut p = DMatrix::from_element(3, 3, 0.05);
        for k in 0..3 {
            p[(k, k)] = 0.9;
        }
        let g = CrossTopicGraph {
            p: p.clone(),
            n_counts: p,
            mode: GraphMode::Dominant,
            zero_rows: vec![],
        };
        assert!(threshold_edges(&g, 0.09).unwrap().is_empty());
        assert_eq!(threshold_edges(&g, 0.0).unwrap().len(), 6);
        assert!(threshold_edges(&g, 1.5).is_err());
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[1.0, 4.0]), 2.5);
    }
}
