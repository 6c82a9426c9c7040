//! Corpus data model: vocabulary, document-term counts, paper metadata and the
//! citation graph, plus the abstract preprocessing pipeline.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::error::{Error, Result};
use crate::linalg::CscMatrix;

/// Ordered list of unique tokens with a reverse index.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Vocabulary {
    words: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    pub fn new(words: Vec<String>) -> Result<Self> {
        let mut index = HashMap::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            if index.insert(w.clone(), i).is_some() {
                return Err(Error::InvalidArgument(format!(
                    "duplicate vocabulary token {w:?}"
                )));
            }
        }
        Ok(Vocabulary { words, index })
    }

    /// Placeholder names `w0, w1, ...` for corpora loaded without a word list.
    pub fn anonymous(p: usize) -> Self {
        Vocabulary::new((0..p).map(|j| format!("w{j}")).collect()).expect("distinct names")
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn word(&self, j: usize) -> &str {
        &self.words[j]
    }

    pub fn position(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }
}

/// Sparse `p x n` word-document count matrix `X` with its column totals.
#[derive(Debug, Clone, PartialEq)]
pub struct DocumentTermMatrix {
    counts: CscMatrix<u32>,
    doc_lengths: Vec<u64>,
    vocabulary: Vocabulary,
    /// For each column, the index of the source document it came from.
    source_docs: Vec<usize>,
}

impl DocumentTermMatrix {
    pub fn new(counts: CscMatrix<u32>, vocabulary: Vocabulary) -> Result<Self> {
        let n = counts.ncols();
        Self::with_sources(counts, vocabulary, (0..n).collect())
    }

    pub fn with_sources(
        counts: CscMatrix<u32>,
        vocabulary: Vocabulary,
        source_docs: Vec<usize>,
    ) -> Result<Self> {
        if counts.nrows() != vocabulary.len() {
            return Err(Error::ShapeMismatch(format!(
                "count matrix has {} rows but vocabulary has {} words",
                counts.nrows(),
                vocabulary.len()
            )));
        }
        if source_docs.len() != counts.ncols() {
            return Err(Error::ShapeMismatch("source document list length".into()));
        }
        let doc_lengths = (0..counts.ncols())
            .map(|c| counts.column(c).1.iter().map(|&v| v as u64).sum())
            .collect();
        Ok(DocumentTermMatrix {
            counts,
            doc_lengths,
            vocabulary,
            source_docs,
        })
    }

    pub fn counts(&self) -> &CscMatrix<u32> {
        &self.counts
    }

    pub fn doc_lengths(&self) -> &[u64] {
        &self.doc_lengths
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn source_docs(&self) -> &[usize] {
        &self.source_docs
    }

    pub fn n_words(&self) -> usize {
        self.counts.nrows()
    }

    pub fn n_docs(&self) -> usize {
        self.counts.ncols()
    }

    /// Drops documents, keeping the listed columns in order.
    pub fn select_docs(&self, keep: &[usize]) -> DocumentTermMatrix {
        DocumentTermMatrix {
            counts: self.counts.select_columns(keep),
            doc_lengths: keep.iter().map(|&c| self.doc_lengths[c]).collect(),
            vocabulary: self.vocabulary.clone(),
            source_docs: keep.iter().map(|&c| self.source_docs[c]).collect(),
        }
    }
}

/// Bibliographic record of one paper.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaperMeta {
    pub paper_id: String,
    pub year: i32,
    pub journal_id: String,
    pub author_ids: Vec<String>,
}

/// Directed citation edges between papers `0..n`; `(i, j)` means `i` cites `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CitationGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl CitationGraph {
    /// Sorts and deduplicates the edges. Self-loops and out-of-range indices are
    /// rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidArgument(format!(
                    "edge ({i}, {j}) outside 0..{n}"
                )));
            }
            if i == j {
                return Err(Error::InvalidArgument(format!(
                    "self-citation at paper {i}"
                )));
            }
            set.insert((i, j));
        }
        Ok(CitationGraph {
            n,
            edges: set.into_iter().collect(),
        })
    }

    pub fn empty(n: usize) -> Self {
        CitationGraph {
            n,
            edges: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Restricts to the listed nodes, renumbered by their position in `keep`.
    pub fn induced(&self, keep: &[usize]) -> CitationGraph {
        let remap: HashMap<usize, usize> = keep
            .iter()
            .enumerate()
            .map(|(new, &old)| (old, new))
            .collect();
        let edges = self
            .edges
            .iter()
            .filter_map(|&(i, j)| Some((*remap.get(&i)?, *remap.get(&j)?)))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        CitationGraph {
            n: keep.len(),
            edges,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreprocessConfig {
    pub stop_words: HashSet<String>,
    pub min_doc_count: usize,
    pub short_doc_quantile: f64,
    pub lowercase: bool,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        PreprocessConfig {
            stop_words: HashSet::new(),
            min_doc_count: 100,
            short_doc_quantile: 0.10,
            lowercase: true,
        }
    }
}

impl PreprocessConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.short_doc_quantile) {
            return Err(Error::InvalidArgument(format!(
                "short_doc_quantile must lie in [0, 1), got {}",
                self.short_doc_quantile
            )));
        }
        if self.min_doc_count == 0 {
            return Err(Error::InvalidArgument(
                "min_doc_count must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// A small English stop list for tests and quick runs.
pub const DEFAULT_STOP_WORDS: &[&str] = &[
    "a", "about", "above", "after", "again", "against", "all", "also", "am", "an", "and", "any",
    "are", "as", "at", "be", "because", "been", "before", "being", "below", "between", "both",
    "but", "by", "can", "could", "did", "do", "does", "doing", "down", "during", "each", "few",
    "for", "from", "further", "had", "has", "have", "having", "he", "her", "here", "hers", "him",
    "his", "how", "i", "if", "in", "into", "is", "it", "its", "itself", "just", "may", "me",
    "more", "most", "my", "no", "nor", "not", "now", "of", "off", "on", "once", "only", "or",
    "other", "our", "ours", "out", "over", "own", "same", "she", "should", "so", "some", "such",
    "than", "that", "the", "their", "theirs", "them", "then", "there", "these", "they", "this",
    "those", "through", "to", "too", "under", "until", "up", "very", "was", "we", "were", "what",
    "when", "where", "which", "while", "who", "whom", "why", "will", "with", "would", "you",
    "your", "yours",
];

pub fn default_stop_words() -> HashSet<String> {
    DEFAULT_STOP_WORDS.iter().map(|s| s.to_string()).collect()
}

/// Splits text into word tokens. Any non-alphanumeric character separates
/// tokens; purely numeric tokens and stop words are discarded.
pub fn tokenize(raw_text: &str, config: &PreprocessConfig) -> Vec<String> {
    raw_text
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .filter(|t| !t.chars().all(|c| c.is_numeric()))
        .map(|t| {
            if config.lowercase {
                t.to_lowercase()
            } else {
                t.to_string()
            }
        })
        .filter(|t| !config.stop_words.contains(t))
        .collect()
}

/// Tabulates token lists into a document-term matrix.
///
/// Words kept are those appearing in at least `min_doc_count` documents,
/// ordered by first appearance. The `short_doc_quantile` fraction of documents
/// with the fewest in-vocabulary tokens is then removed (among equal lengths the
/// later document goes first), as is any document left with no tokens.
pub fn build_matrix(
    token_lists: &[Vec<String>],
    config: &PreprocessConfig,
) -> Result<DocumentTermMatrix> {
    config.validate()?;
    if token_lists.is_empty() {
        return Err(Error::InvalidArgument("no documents given".into()));
    }

    let mut doc_freq: HashMap<&str, usize> = HashMap::new();
    let mut first_seen: Vec<&str> = Vec::new();
    for tokens in token_lists {
        let mut seen_here = HashSet::new();
        for t in tokens {
            if seen_here.insert(t.as_str()) {
                let e = doc_freq.entry(t.as_str()).or_insert(0);
                if *e == 0 {
                    first_seen.push(t.as_str());
                }
                *e += 1;
            }
        }
    }
    let words: Vec<String> = first_seen
        .into_iter()
        .filter(|w| doc_freq[w] >= config.min_doc_count)
        .map(str::to_string)
        .collect();
    if words.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    let vocabulary = Vocabulary::new(words)?;

    let columns: Vec<Vec<(usize, u32)>> = token_lists
        .iter()
        .map(|tokens| {
            let mut counts: HashMap<usize, u32> = HashMap::new();
            for t in tokens {
                if let Some(j) = vocabulary.position(t) {
                    *counts.entry(j).or_insert(0) += 1;
                }
            }
            let mut col: Vec<(usize, u32)> = counts.into_iter().collect();
            col.sort_unstable();
            col
        })
        .collect();
    let lengths: Vec<u64> = columns
        .iter()
        .map(|c| c.iter().map(|&(_, v)| v as u64).sum())
        .collect();

    let n = token_lists.len();
    let n_remove = ((config.short_doc_quantile * n as f64) + 1e-9).floor() as usize;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| lengths[a].cmp(&lengths[b]).then(b.cmp(&a)));
    let mut removed = vec![false; n];
    for &d in order.iter().take(n_remove) {
        removed[d] = true;
    }
    let keep: Vec<usize> = (0..n).filter(|&d| !removed[d] && lengths[d] > 0).collect();
    if keep.is_empty() {
        return Err(Error::AllDocumentsRemoved);
    }

    let p = vocabulary.len();
    let mut kept_columns = Vec::with_capacity(keep.len());
    let mut all_columns: Vec<Option<Vec<(usize, u32)>>> = columns.into_iter().map(Some).collect();
    for &d in &keep {
        kept_columns.push(all_columns[d].take().expect("each document kept once"));
    }
    let counts = CscMatrix::from_columns(p, kept_columns)?;
    DocumentTermMatrix::with_sources(counts, vocabulary, keep)
}

/// Column-normalized frequencies `D(j, i) = X(j, i) / N_i`.
pub fn frequency_matrix(dtm: &DocumentTermMatrix) -> Result<CscMatrix<f64>> {
    if let Some(doc) = dtm.doc_lengths().iter().position(|&n| n == 0) {
        return Err(Error::ZeroLengthDocument { doc });
    }
    let lengths = dtm.doc_lengths();
    Ok(dtm
        .counts()
        .map_with_index(|_, c, v| v as f64 / lengths[c] as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(stop: &[&str], min_doc_count: usize, q: f64) -> PreprocessConfig {
        PreprocessConfig {
            stop_words: stop.iter().map(|s| s.to_string()).collect(),
            min_doc_count,
            short_doc_quantile: q,
            lowercase: true,
        }
    }

    fn docs(lists: &[&[&str]]) -> Vec<Vec<String>> {
        lists
            .iter()
            .map(|d| d.iter().map(|s| s.to_string()).collect())
            .collect()
    }

    #[test]
    fn tokenize_strips_punctuation_case_and_stop_words() {
        let toks = tokenize("The EM algorithm, revisited.", &cfg(&["the"], 1, 0.0));
        assert_eq!(toks, vec!["em", "algorithm", "revisited"]);
    }

    #[test]
    fn tokenize_empty_and_numbers() {
        let c = cfg(&[], 1, 0.0);
        assert!(tokenize("", &c).is_empty());
        assert!(tokenize("123 456", &c).is_empty());
        assert_eq!(tokenize("l1 penalty 2", &c), vec!["l1", "penalty"]);
    }

    #[test]
    fn tokenize_respects_lowercase_flag() {
        let mut c = cfg(&[], 1, 0.0);
        c.lowercase = false;
        assert_eq!(tokenize("Bayes Factor", &c), vec!["Bayes", "Factor"]);
    }

    #[test]
    fn low_frequency_words_dropped() {
        let dtm = build_matrix(
            &docs(&[&["a", "b"], &["a", "c"], &["a"]]),
            &cfg(&[], 2, 0.0),
        )
        .unwrap();
        assert_eq!(dtm.vocabulary().words(), &["a".to_string()]);
        assert_eq!(dtm.doc_lengths(), &[1, 1, 1]);
    }

    #[test]
    fn single_document_tabulation() {
        let dtm = build_matrix(&docs(&[&["a", "a", "b"]]), &cfg(&[], 1, 0.0)).unwrap();
        assert_eq!(
            dtm.counts().to_dense(),
            nalgebra::DMatrix::from_row_slice(2, 1, &[2.0, 1.0])
        );
        assert_eq!(dtm.doc_lengths(), &[3]);
    }

    #[test]
    fn shortest_decile_removed() {
        let lists: Vec<Vec<String>> = (1..=10)
            .map(|len| std::iter::repeat_n("w".to_string(), len).collect())
            .collect();
        let dtm = build_matrix(&lists, &cfg(&[], 1, 0.10)).unwrap();
        assert_eq!(dtm.n_docs(), 9);
        assert_eq!(dtm.source_docs(), &[1, 2, 3, 4, 5, 6, 7, 8, 9]);
    }

    #[test]
    fn short_doc_ties_keep_earlier() {
        let lists = docs(&[&["w"], &["w"], &["w", "w"], &["w", "w"]]);
        let dtm = build_matrix(&lists, &cfg(&[], 1, 0.25)).unwrap();
        assert_eq!(dtm.source_docs(), &[0, 2, 3]);
    }

    #[test]
    fn empty_vocabulary_and_all_removed() {
        assert!(matches!(
            build_matrix(&docs(&[&["a"], &["b"]]), &cfg(&[], 2, 0.0)),
            Err(Error::EmptyVocabulary)
        ));
        assert!(matches!(
            build_matrix(&docs(&[&[], &[]]), &cfg(&[], 1, 0.0)),
            Err(Error::EmptyVocabulary)
        ));
        let lists = docs(&[&["a"], &[]]);
        let dtm = build_matrix(&lists, &cfg(&[], 1, 0.0)).unwrap();
        assert_eq!(dtm.n_docs(), 1);
    }

    #[test]
    fn invalid_config_rejected() {
        assert!(build_matrix(&docs(&[&["a"]]), &cfg(&[], 1, 1.0)).is_err());
        assert!(build_matrix(&docs(&[&["a"]]), &cfg(&[], 0, 0.0)).is_err());
    }

    #[test]
    fn frequency_columns_sum_to_one() {
        let counts =
            CscMatrix::from_triplets(2, 2, vec![(0, 0, 2u32), (1, 0, 1), (0, 1, 5)]).unwrap();
        let dtm = DocumentTermMatrix::new(counts, Vocabulary::anonymous(2)).unwrap();
        let d = frequency_matrix(&dtm).unwrap();
        assert_eq!(d.get(0, 0), Some(2.0 / 3.0));
        assert_eq!(d.get(1, 0), Some(1.0 / 3.0));
        assert_eq!(d.get(0, 1), Some(1.0));
        assert_eq!(d.get(1, 1), None);
        for s in d.column_sums() {
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_length_document_rejected() {
        let counts = CscMatrix::from_triplets(2, 2, vec![(0, 0, 2u32)]).unwrap();
        let dtm = DocumentTermMatrix::new(counts, Vocabulary::anonymous(2)).unwrap();
        assert!(matches!(
            frequency_matrix(&dtm),
            Err(Error::ZeroLengthDocument { doc: 1 })
        ));
    }

    #[test]
    fn citation_graph_contract() {
        let g = CitationGraph::new(3, vec![(0, 1), (0, 1), (2, 0)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (2, 0)]);
        assert!(CitationGraph::new(2, vec![(1, 1)]).is_err());
        assert!(CitationGraph::new(2, vec![(0, 2)]).is_err());
        let sub = g.induced(&[0, 1]);
        assert_eq!(sub.edges(), &[(0, 1)]);
    }

    #[test]
    fn vocabulary_rejects_duplicates() {
        assert!(Vocabulary::new(vec!["a".into(), "a".into()]).is_err());
        let v = Vocabulary::new(vec!["x".into(), "y".into()]).unwrap();
        assert_eq!(v.position("y"), Some(1));
    }
}
