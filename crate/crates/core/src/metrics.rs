//! Bibliometric statistics: yearly paper counts, author centrality, the
//! sleeping-beauty coefficient, author topic interests and topic trends.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use nalgebra::DMatrix;

use crate::corpus::{CitationGraph, PaperMeta};
use crate::error::{Error, Result};

/// One row of the yearly paper-count table.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct YearCounts {
    pub year: i32,
    pub papers: usize,
    pub active_authors: usize,
    /// Sum over papers of the author count (standard counting credits each author 1).
    pub authorships: usize,
    /// Mean standard count per active author.
    pub papers_per_author: Option<f64>,
    /// Mean fractional count per active author.
    pub fractional_papers_per_author: Option<f64>,
    pub authors_per_paper: Option<f64>,
    /// Papers with 1, 2, 3 and 4+ authors.
    pub by_author_count: [usize; 4],
    /// Active authors with seniority < 3, 3..=10 and > 10 years.
    pub by_seniority: [usize; 3],
}

/// Per-author standard and fractional paper counts for each year.
pub fn author_year_counts(metas: &[PaperMeta]) -> BTreeMap<(i32, String), (usize, f64)> {
    let mut out: BTreeMap<(i32, String), (usize, f64)> = BTreeMap::new();
    for m in metas {
        let authors: BTreeSet<&String> = m.author_ids.iter().collect();
        let share = 1.0 / authors.len().max(1) as f64;
        for a in authors {
            let e = out.entry((m.year, a.clone())).or_insert((0, 0.0));
            e.0 += 1;
            e.1 += share;
        }
    }
    out
}

pub fn paper_counts(metas: &[PaperMeta]) -> Vec<YearCounts> {
    let (Some(first), Some(last)) = (
        metas.iter().map(|m| m.year).min(),
        metas.iter().map(|m| m.year).max(),
    ) else {
        return Vec::new();
    };
    let mut debut: HashMap<&str, i32> = HashMap::new();
    for m in metas {
        for a in &m.author_ids {
            let e = debut.entry(a.as_str()).or_insert(m.year);
            *e = (*e).min(m.year);
        }
    }

    let mut by_year: BTreeMap<i32, Vec<&PaperMeta>> = BTreeMap::new();
    for m in metas {
        by_year.entry(m.year).or_default().push(m);
    }
    (first..=last)
        .map(|year| {
            let papers = by_year.get(&year).map(Vec::as_slice).unwrap_or(&[]);
            let mut active: HashSet<&str> = HashSet::new();
            let mut authorships = 0;
            let mut by_author_count = [0usize; 4];
            for m in papers {
                let distinct: BTreeSet<&str> = m.author_ids.iter().map(String::as_str).collect();
                authorships += distinct.len();
                if !distinct.is_empty() {
                    by_author_count[(distinct.len() - 1).min(3)] += 1;
                }
                active.extend(distinct);
            }
            let mut by_seniority = [0usize; 3];
            for a in &active {
                let k = year - debut[a];
                let bin = if k < 3 {
                    0
                } else if k <= 10 {
                    1
                } else {
                    2
                };
                by_seniority[bin] += 1;
            }
            let n_active = active.len();
            let credited = papers.iter().filter(|m| !m.author_ids.is_empty()).count();
            YearCounts {
                year,
                papers: papers.len(),
                active_authors: n_active,
                authorships,
                papers_per_author: (n_active > 0).then(|| authorships as f64 / n_active as f64),
                fractional_papers_per_author: (n_active > 0)
                    .then(|| credited as f64 / n_active as f64),
                authors_per_paper: (!papers.is_empty())
                    .then(|| authorships as f64 / papers.len() as f64),
                by_author_count,
                by_seniority,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct AuthorCentrality {
    pub author: String,
    pub coauthors: usize,
    /// Distinct other authors who cited at least one of this author's papers.
    pub citers: usize,
    pub citations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Centrality {
    /// Sorted by author id.
    pub authors: Vec<AuthorCentrality>,
    /// In-degree of every paper.
    pub paper_citations: Vec<usize>,
}

pub fn centrality(metas: &[PaperMeta], graph: &CitationGraph) -> Result<Centrality> {
    if graph.n() != metas.len() {
        return Err(Error::ShapeMismatch(format!(
            "citation graph has {} papers, metadata has {}",
            graph.n(),
            metas.len()
        )));
    }
    let mut paper_citations = vec![0usize; metas.len()];
    for &(_, j) in graph.edges() {
        paper_citations[j] += 1;
    }

    let mut coauthors: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    let mut citations: HashMap<&str, usize> = HashMap::new();
    for (i, m) in metas.iter().enumerate() {
        for a in &m.author_ids {
            let set = coauthors.entry(a.as_str()).or_default();
            set.extend(m.author_ids.iter().map(String::as_str).filter(|b| b != a));
        }
        let distinct: BTreeSet<&str> = m.author_ids.iter().map(String::as_str).collect();
        for a in distinct {
            *citations.entry(a).or_insert(0) += paper_citations[i];
        }
    }
    let mut citers: HashMap<&str, HashSet<&str>> = HashMap::new();
    for &(i, j) in graph.edges() {
        for cited in &metas[j].author_ids {
            let set = citers.entry(cited.as_str()).or_default();
            for citer in &metas[i].author_ids {
                if citer != cited {
                    set.insert(citer.as_str());
                }
            }
        }
    }
    let authors = coauthors
        .into_iter()
        .map(|(a, co)| AuthorCentrality {
            author: a.to_string(),
            coauthors: co.len(),
            citers: citers.get(a).map_or(0, HashSet::len),
            citations: citations.get(a).copied().unwrap_or(0),
        })
        .collect();
    Ok(Centrality {
        authors,
        paper_citations,
    })
}

/// The `k` largest entries by `key`, ties by author id.
pub fn top_authors(
    authors: &[AuthorCentrality],
    k: usize,
    key: impl Fn(&AuthorCentrality) -> usize,
) -> Vec<&AuthorCentrality> {
    let mut v: Vec<&AuthorCentrality> = authors.iter().collect();
    v.sort_by(|a, b| key(b).cmp(&key(a)).then(a.author.cmp(&b.author)));
    v.truncate(k);
    v
}

/// Yearly citations received, `counts[t-1]` for years `t = 1..T` since publication.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CitationCurve {
    pub counts: Vec<u64>,
}

impl CitationCurve {
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::InvalidArgument(
                "citation curve needs at least one year".into(),
            ));
        }
        Ok(CitationCurve { counts })
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn peak(&self) -> u64 {
        self.counts.iter().copied().max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PeakRule {
    #[default]
    Earliest,
    Latest,
}

/// Sleeping-beauty coefficient `B` and the peak year `t*` (1-based).
///
/// Each year `t <= t*` contributes `(n(t*)/t* - n(t)/t) / (max(n(t), 1)/t)`,
/// evaluated as `(n(t*) t - n(t) t*) / (t* max(n(t), 1))` so the numerator is an
/// exact integer.
pub fn sleeping_beauty(curve: &CitationCurve, rule: PeakRule) -> (f64, usize) {
    let n = &curve.counts;
    let peak = curve.peak();
    let t_star = match rule {
        PeakRule::Earliest => n.iter().position(|&c| c == peak),
        PeakRule::Latest => n.iter().rposition(|&c| c == peak),
    }
    .expect("nonempty curve")
        + 1;
    let n_star = peak as i128;
    let ts = t_star as i128;
    let b = (1..=t_star)
        .map(|t| {
            let nt = n[t - 1] as i128;
            let num = n_star * t as i128 - nt * ts;
            num as f64 / (ts * nt.max(1)) as f64
        })
        .sum();
    (b, t_star)
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SleepingBeautyRow {
    pub paper_id: String,
    pub total_citations: u64,
    pub b: f64,
    pub t_star: usize,
    pub peak: u64,
}

/// Keeps the `top_by_peak` curves with the highest yearly peak, then orders by
/// `B` descending (ties: total citations descending, then paper id).
pub fn rank_sleeping_beauties(
    curves: &[(String, CitationCurve)],
    top_by_peak: usize,
    rule: PeakRule,
) -> Vec<SleepingBeautyRow> {
    let mut rows: Vec<SleepingBeautyRow> = curves
        .iter()
        .map(|(id, c)| {
            let (b, t_star) = sleeping_beauty(c, rule);
            SleepingBeautyRow {
                paper_id: id.clone(),
                total_citations: c.total(),
                b,
                t_star,
                peak: c.peak(),
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        b.peak
            .cmp(&a.peak)
            .then(b.total_citations.cmp(&a.total_citations))
            .then(a.paper_id.cmp(&b.paper_id))
    });
    rows.truncate(top_by_peak);
    rows.sort_by(|a, b| {
        b.b.partial_cmp(&a.b)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(b.total_citations.cmp(&a.total_citations))
            .then(a.paper_id.cmp(&b.paper_id))
    });
    rows
}

/// Yearly citation curves from the in-corpus citation graph. Year 1 is the
/// publication year; curves run through `end_year`.
pub fn citation_curves(
    metas: &[PaperMeta],
    graph: &CitationGraph,
    end_year: i32,
) -> Result<Vec<(String, CitationCurve)>> {
    if graph.n() != metas.len() {
        return Err(Error::ShapeMismatch(
            "citation graph and metadata disagree on paper count".into(),
        ));
    }
    let mut counts: Vec<Vec<u64>> = metas
        .iter()
        .map(|m| vec![0; (end_year - m.year + 1).max(1) as usize])
        .collect();
    for &(i, j) in graph.edges() {
        let age = metas[i].year - metas[j].year;
        if age >= 0 && (age as usize) < counts[j].len() {
            counts[j][age as usize] += 1;
        }
    }
    Ok(metas
        .iter()
        .zip(counts)
        .map(|(m, c)| (m.paper_id.clone(), CitationCurve { counts: c }))
        .collect())
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct TopicInterest {
    pub author_id: String,
    pub z: Vec<f64>,
    pub paper_count: usize,
}

/// Paper indices per author, authors sorted by id.
pub fn author_papers(metas: &[PaperMeta]) -> Vec<(String, Vec<usize>)> {
    let mut map: BTreeMap<&str, BTreeSet<usize>> = BTreeMap::new();
    for (i, m) in metas.iter().enumerate() {
        for a in &m.author_ids {
            map.entry(a.as_str()).or_default().insert(i);
        }
    }
    map.into_iter()
        .map(|(a, s)| (a.to_string(), s.into_iter().collect()))
        .collect()
}

/// Centered topic interest `z_a = mean_{i in N_a} w_i - mean_i w_i`.
pub fn topic_interest(
    author_papers: &[(String, Vec<usize>)],
    w_hat: &DMatrix<f64>,
) -> Result<Vec<TopicInterest>> {
    let (k, n) = w_hat.shape();
    if n == 0 {
        return Err(Error::InvalidArgument("no documents".into()));
    }
    let grand: Vec<f64> = (0..k).map(|t| w_hat.row(t).sum() / n as f64).collect();
    let mut out = Vec::new();
    for (author, papers) in author_papers {
        if papers.is_empty() {
            continue;
        }
        if let Some(&bad) = papers.iter().find(|&&i| i >= n) {
            return Err(Error::InvalidArgument(format!(
                "author {author} lists paper {bad} outside 0..{n}"
            )));
        }
        let z = (0..k)
            .map(|t| {
                papers.iter().map(|&i| w_hat[(t, i)]).sum::<f64>() / papers.len() as f64 - grand[t]
            })
            .collect();
        out.push(TopicInterest {
            author_id: author.clone(),
            z,
            paper_count: papers.len(),
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MajorTopics {
    pub topics: Vec<usize>,
    /// No entry of `z` is positive, so the rule does not apply.
    pub degenerate: bool,
}

/// Topics with `z(k) > fraction * max(z)`.
pub fn major_topics(z: &[f64], fraction: f64) -> MajorTopics {
    let max = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(max > 0.0) {
        return MajorTopics {
            topics: Vec::new(),
            degenerate: true,
        };
    }
    MajorTopics {
        topics: (0..z.len()).filter(|&k| z[k] > fraction * max).collect(),
        degenerate: false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrendGrouping {
    All,
    Journal,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct TrendRow {
    pub group: String,
    pub year: i32,
    pub weights: Vec<f64>,
}

/// Three-year weighted moving average of a yearly series. Years missing from
/// the series drop out of the kernel, which is renormalized.
pub fn smooth_series(series: &BTreeMap<i32, Vec<f64>>) -> BTreeMap<i32, Vec<f64>> {
    const KERNEL: [(i32, f64); 3] = [(-1, 0.25), (0, 0.5), (1, 0.25)];
    series
        .keys()
        .map(|&y| {
            let k = series[&y].len();
            let mut acc = vec![0.0; k];
            let mut total = 0.0;
            for (off, w) in KERNEL {
                if let Some(v) = series.get(&(y + off)) {
                    total += w;
                    for (a, x) in acc.iter_mut().zip(v) {
                        *a += w * x;
                    }
                }
            }
            (y, acc.into_iter().map(|a| a / total).collect())
        })
        .collect()
}

/// Yearly mean topic weights, smoothed, for the whole corpus or per journal.
pub fn topic_trends(
    w_hat: &DMatrix<f64>,
    metas: &[PaperMeta],
    group_by: TrendGrouping,
) -> Result<Vec<TrendRow>> {
    let (k, n) = w_hat.shape();
    if metas.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "weights have {n} columns, metadata has {} papers",
            metas.len()
        )));
    }
    let mut groups: BTreeMap<String, BTreeMap<i32, (Vec<f64>, usize)>> = BTreeMap::new();
    for (i, m) in metas.iter().enumerate() {
        let g = match group_by {
            TrendGrouping::All => "all".to_string(),
            TrendGrouping::Journal => m.journal_id.clone(),
        };
        let e = groups
            .entry(g)
            .or_default()
            .entry(m.year)
            .or_insert_with(|| (vec![0.0; k], 0));
        for t in 0..k {
            e.0[t] += w_hat[(t, i)];
        }
        e.1 += 1;
    }
    let mut rows = Vec::new();
    for (g, years) in groups {
        let means: BTreeMap<i32, Vec<f64>> = years
            .into_iter()
            .map(|(y, (s, c))| (y, s.into_iter().map(|v| v / c as f64).collect()))
            .collect();
        for (year, weights) in smooth_series(&means) {
            rows.push(TrendRow {
                group: g.clone(),
                year,
                weights,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta(id: &str, year: i32, authors: &[&str]) -> PaperMeta {
        PaperMeta {
            paper_id: id.into(),
            year,
            journal_id: "J".into(),
            author_ids: authors.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn fractional_counts_split_evenly() {
        let metas = vec![meta("p", 2000, &["a", "b"])];
        let c = author_year_counts(&metas);
        assert_eq!(c[&(2000, "a".to_string())], (1, 0.5));
        assert_eq!(c[&(2000, "b".to_string())], (1, 0.5));
        let rows = paper_counts(&metas);
        assert_eq!(rows[0].papers, 1);
        assert_eq!(rows[0].active_authors, 2);
        assert_eq!(rows[0].papers_per_author, Some(1.0));
        assert_eq!(rows[0].fractional_papers_per_author, Some(0.5));
        assert_eq!(rows[0].by_author_count, [0, 1, 0, 0]);
    }

    #[test]
    fn seniority_and_empty_years() {
        let metas = vec![meta("p", 2000, &["a"]), meta("q", 2005, &["a", "b"])];
        let rows = paper_counts(&metas);
        assert_eq!(rows.len(), 6);
        let y2003 = &rows[3];
        assert_eq!((y2003.papers, y2003.active_authors), (0, 0));
        assert_eq!(y2003.papers_per_author, None);
        assert_eq!(y2003.authors_per_paper, None);
        // a debuted in 2000 (seniority 5), b in 2005 (seniority 0)
        assert_eq!(rows[5].by_seniority, [1, 1, 0]);
    }

    #[test]
    fn citer_counts_exclude_self() {
        let metas = vec![meta("p", 2000, &["a"]), meta("q", 2001, &["a"])];
        let g = CitationGraph::new(2, vec![(1, 0)]).unwrap();
        let c = centrality(&metas, &g).unwrap();
        assert_eq!(c.authors[0].citers, 0);
        assert_eq!(c.authors[0].citations, 1);
    }

    #[test]
    fn same_citer_counted_once() {
        let metas = vec![
            meta("i", 2001, &["x"]),
            meta("i2", 2002, &["x"]),
            meta("j", 2000, &["y", "z"]),
            meta("lone", 2000, &["w"]),
        ];
        let g = CitationGraph::new(4, vec![(0, 2), (1, 2)]).unwrap();
        let c = centrality(&metas, &g).unwrap();
        let y = c.authors.iter().find(|a| a.author == "y").unwrap();
        assert_eq!((y.citers, y.citations, y.coauthors), (1, 2, 1));
        assert_eq!(c.paper_citations, vec![0, 0, 2, 0]);
        let top = top_authors(&c.authors, 1, |a| a.citations);
        assert_eq!(top[0].author, "y");
    }

    #[test]
    fn sleeping_beauty_hand_values() {
        let b = |v: &[u64]| {
            sleeping_beauty(&CitationCurve::new(v.to_vec()).unwrap(), PeakRule::Earliest)
        };
        assert_eq!(b(&[2, 4, 6, 8]), (0.0, 4));
        assert_eq!(b(&[1, 4, 9]), (2.5, 3));
        assert_eq!(b(&[0, 0, 5]), (5.0, 3));
    }

    #[test]
    fn peak_tie_rules() {
        let c = CitationCurve::new(vec![1, 3, 1, 3]).unwrap();
        assert_eq!(sleeping_beauty(&c, PeakRule::Earliest).1, 2);
        assert_eq!(sleeping_beauty(&c, PeakRule::Latest).1, 4);
    }

    #[test]
    fn sublinear_curve_is_negative() {
        let c = CitationCurve::new(vec![10, 12, 13, 14]).unwrap();
        assert!(sleeping_beauty(&c, PeakRule::Earliest).0 < 0.0);
    }

    #[test]
    fn ranking_filters_by_peak_then_orders() {
        let curves = vec![
            ("a".to_string(), CitationCurve::new(vec![0, 10]).unwrap()),
            ("b".to_string(), CitationCurve::new(vec![0, 3]).unwrap()),
        ];
        let rows = rank_sleeping_beauties(&curves, 1, PeakRule::Earliest);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].paper_id, "a");

        let tied = vec![
            ("x".to_string(), CitationCurve::new(vec![2, 4]).unwrap()),
            ("y".to_string(), CitationCurve::new(vec![3, 6, 1]).unwrap()),
        ];
        let rows = rank_sleeping_beauties(&tied, 300, PeakRule::Earliest);
        assert_eq!(rows[0].b, rows[1].b);
        assert_eq!(rows[0].paper_id, "y");
    }

    #[test]
    fn curves_from_graph() {
        let metas = vec![meta("old", 2000, &["a"]), meta("new", 2002, &["b"])];
        let g = CitationGraph::new(2, vec![(1, 0)]).unwrap();
        let curves = citation_curves(&metas, &g, 2003).unwrap();
        assert_eq!(curves[0].1.counts, vec![0, 0, 1, 0]);
        assert_eq!(curves[1].1.counts, vec![0, 0]);
    }

    #[test]
    fn interest_hand_example() {
        let w = DMatrix::from_column_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let z = topic_interest(&[("a".into(), vec![0])], &w).unwrap();
        assert_eq!(z[0].z, vec![0.5, -0.5]);
        let w = DMatrix::from_element(2, 1, 0.5);
        let z = topic_interest(&[("a".into(), vec![0]), ("nobody".into(), vec![])], &w).unwrap();
        assert_eq!(z.len(), 1);
        assert_eq!(z[0].z, vec![0.0, 0.0]);
    }

    #[test]
    fn major_topic_rule() {
        assert_eq!(major_topics(&[0.3, 0.2, -0.5], 0.5).topics, vec![0, 1]);
        assert_eq!(major_topics(&[0.3, 0.1, -0.4], 0.5).topics, vec![0]);
        let m = major_topics(&[0.0, -0.1, 0.1 - 0.1], 0.5);
        assert!(m.degenerate && m.topics.is_empty());
    }

    #[test]
    fn smoothing_cases() {
        let mut s = BTreeMap::new();
        for (y, v) in [(2000, 0.0), (2001, 1.0), (2002, 0.0)] {
            s.insert(y, vec![v, 1.0 - v]);
        }
        let out = smooth_series(&s);
        assert_eq!(out[&2001], vec![0.5, 0.5]);
        assert!((out[&2000][0] - 0.25 / 0.75).abs() < 1e-15);

        let single: BTreeMap<i32, Vec<f64>> = [(1999, vec![0.2, 0.8])].into_iter().collect();
        assert_eq!(smooth_series(&single)[&1999], vec![0.2, 0.8]);

        let constant: BTreeMap<i32, Vec<f64>> = (1990..1995).map(|y| (y, vec![0.3, 0.7])).collect();
        for v in smooth_series(&constant).values() {
            assert!((v[0] - 0.3).abs() < 1e-15 && (v[1] - 0.7).abs() < 1e-15);
        }
    }

    #[test]
    fn trends_by_journal() {
        let mut metas = vec![
            meta("a", 2000, &["x"]),
            meta("b", 2000, &["y"]),
            meta("c", 2001, &["z"]),
        ];
        metas[2].journal_id = "K".into();
        let w = DMatrix::from_column_slice(2, 3, &[1.0, 0.0, 0.0, 1.0, 0.5, 0.5]);
        let rows = topic_trends(&w, &metas, TrendGrouping::Journal).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].group, "J");
        assert_eq!(rows[0].weights, vec![0.5, 0.5]);
        let all = topic_trends(&w, &metas, TrendGrouping::All).unwrap();
        assert_eq!(all.len(), 2);
    }
}
