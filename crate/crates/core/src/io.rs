//! Readers and writers for corpus files, fitted models, scores and reports.
//!
//! Corpus inputs are plain text: whitespace-separated count triplets, one
//! word or document per line, and tab-separated metadata and citation
//! records. Numeric outputs are comma-separated with 17 significant digits,
//! which round-trips every `f64`.

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;

use crate::corpus::{CitationGraph, DocumentTermMatrix, PaperMeta, Vocabulary};
use crate::error::{Error, Result};
use crate::linalg::CscMatrix;
use crate::metrics::{AuthorCentrality, MajorTopics, SleepingBeautyRow, TopicInterest, TrendRow, YearCounts};
use crate::ranking::{CrossTopicGraph, ExportScores};
use crate::spectral::{ScreeReport, TopicModelFit};
use crate::synth::GroundTruth;
use crate::weights::TopicWeights;

pub const COUNTS_FILE: &str = "counts.txt";
pub const VOCAB_FILE: &str = "vocab.txt";
pub const DOC_IDS_FILE: &str = "doc_ids.txt";
pub const METADATA_FILE: &str = "metadata.tsv";
pub const CITATIONS_FILE: &str = "citations.tsv";

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    io_err(path, std::io::Error::other(e.to_string()))
}

pub fn read_text(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
    String::from_utf8(bytes).map_err(|e| {
        let line = 1 + e.as_bytes()[..e.utf8_error().valid_up_to()].iter().filter(|&&b| b == b'\n').count();
        Error::parse(path.display().to_string(), line, "invalid UTF-8")
    })
}

fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<fs::File>) -> std::io::Result<()>) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
    }
    let file = fs::File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    body(&mut w).and_then(|_| w.flush()).map_err(|e| io_err(path, e))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
    }
    csv::Writer::from_path(path).map_err(|e| csv_err(path, e))
}

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// Parses a count file: header `p n nnz`, then `nnz` lines `row col count`.
pub fn parse_triplets(text: &str, source_name: &str) -> Result<CscMatrix<u32>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hline, header) = lines
        .next()
        .ok_or_else(|| Error::parse(source_name, 1, "missing header \"p n nnz\""))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let parse_usize = |s: &str, line: usize, what: &str| {
        s.parse::<usize>()
            .map_err(|_| Error::parse(source_name, line, format!("{what} is not a nonnegative integer: {s:?}")))
    };
    if fields.len() != 3 {
        return Err(Error::parse(source_name, hline, "header must have three fields \"p n nnz\""));
    }
    let p = parse_usize(fields[0], hline, "p")?;
    let n = parse_usize(fields[1], hline, "n")?;
    let nnz = parse_usize(fields[2], hline, "nnz")?;

    let mut seen = std::collections::HashSet::with_capacity(nnz);
    let mut triplets = Vec::with_capacity(nnz);
    for (line, l) in lines {
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() != 3 {
            return Err(Error::parse(source_name, line, "expected \"row col count\""));
        }
        let r = parse_usize(f[0], line, "row")?;
        let c = parse_usize(f[1], line, "col")?;
        let v: u32 = f[2]
            .parse()
            .map_err(|_| Error::parse(source_name, line, format!("count is not a nonnegative integer: {:?}", f[2])))?;
        if r >= p || c >= n {
            return Err(Error::parse(source_name, line, format!("entry ({r}, {c}) outside {p} x {n}")));
        }
        if !seen.insert((r, c)) {
            return Err(Error::parse(source_name, line, format!("duplicate entry ({r}, {c})")));
        }
        triplets.push((r, c, v));
    }
    if triplets.len() != nnz {
        return Err(Error::parse(
            source_name,
            hline,
            format!("header declares {nnz} entries, found {}", triplets.len()),
        ));
    }
    CscMatrix::from_triplets(p, n, triplets)
}

pub fn read_triplets(path: &Path) -> Result<CscMatrix<u32>> {
    parse_triplets(&read_text(path)?, &path.display().to_string())
}

pub fn write_triplets(path: &Path, counts: &CscMatrix<u32>) -> Result<()> {
    write_file(path, |w| {
        writeln!(w, "{} {} {}", counts.nrows(), counts.ncols(), counts.nnz())?;
        for (r, c, v) in counts.triplets() {
            writeln!(w, "{r} {c} {v}")?;
        }
        Ok(())
    })
}

/// Every line of a UTF-8 file, trailing newline characters removed.
pub fn read_lines(path: &Path) -> Result<Vec<String>> {
    Ok(read_text(path)?.lines().map(str::to_string).collect())
}

/// Trimmed, nonempty lines (vocabulary, stop words, document ids).
pub fn read_word_list(path: &Path) -> Result<Vec<String>> {
    Ok(read_text(path)?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect())
}

pub fn write_lines<S: AsRef<str>>(path: &Path, lines: &[S]) -> Result<()> {
    write_file(path, |w| {
        for l in lines {
            writeln!(w, "{}", l.as_ref())?;
        }
        Ok(())
    })
}

/// Parses `paper_id<TAB>year<TAB>journal_id<TAB>author_id[,author_id...]`.
pub fn parse_metadata(text: &str, source_name: &str) -> Result<Vec<PaperMeta>> {
    let mut out = Vec::new();
    let mut ids = std::collections::HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.trim_end_matches('\r');
        if l.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = l.split('\t').collect();
        if f.len() < 3 || f.len() > 4 {
            return Err(Error::parse(source_name, line, "expected paper_id, year, journal_id, authors separated by tabs"));
        }
        let paper_id = f[0].trim();
        if paper_id.is_empty() {
            return Err(Error::parse(source_name, line, "empty paper id"));
        }
        let year: i32 = f[1]
            .trim()
            .parse()
            .map_err(|_| Error::parse(source_name, line, format!("year is not an integer: {:?}", f[1])))?;
        let author_ids: Vec<String> = f
            .get(3)
            .map(|a| a.split(',').map(str::trim).filter(|s| !s.is_empty()).map(str::to_string).collect())
            .unwrap_or_default();
        if !ids.insert(paper_id.to_string()) {
            return Err(Error::parse(source_name, line, format!("duplicate paper id {paper_id:?}")));
        }
        out.push(PaperMeta {
            paper_id: paper_id.to_string(),
            year,
            journal_id: f[2].trim().to_string(),
            author_ids,
        });
    }
    Ok(out)
}

pub fn read_metadata(path: &Path) -> Result<Vec<PaperMeta>> {
    parse_metadata(&read_text(path)?, &path.display().to_string())
}

pub fn write_metadata(path: &Path, metas: &[PaperMeta]) -> Result<()> {
    write_file(path, |w| {
        for m in metas {
            writeln!(w, "{}\t{}\t{}\t{}", m.paper_id, m.year, m.journal_id, m.author_ids.join(","))?;
        }
        Ok(())
    })
}

/// Parses `citer_id<TAB>cited_id` lines against the papers in `metas`.
/// Every unknown id is collected into a single `DanglingCitation` error.
pub fn parse_citations(text: &str, source_name: &str, metas: &[PaperMeta]) -> Result<CitationGraph> {
    let index: HashMap<&str, usize> = metas.iter().enumerate().map(|(i, m)| (m.paper_id.as_str(), i)).collect();
    let mut edges = Vec::new();
    let mut dangling = BTreeSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.trim();
        if l.is_empty() {
            continue;
        }
        let f: Vec<&str> = l.split('\t').map(str::trim).collect();
        if f.len() != 2 || f[0].is_empty() || f[1].is_empty() {
            return Err(Error::parse(source_name, line, "expected citer_id<TAB>cited_id"));
        }
        if f[0] == f[1] {
            return Err(Error::parse(source_name, line, format!("paper {} cites itself", f[0])));
        }
        match (index.get(f[0]), index.get(f[1])) {
            (Some(&a), Some(&b)) => edges.push((a, b)),
            (a, b) => {
                if a.is_none() {
                    dangling.insert(f[0].to_string());
                }
                if b.is_none() {
                    dangling.insert(f[1].to_string());
                }
            }
        }
    }
    if !dangling.is_empty() {
        return Err(Error::DanglingCitation {
            ids: dangling.into_iter().collect(),
        });
    }
    CitationGraph::new(metas.len(), edges)
}

pub fn read_citations(path: &Path, metas: &[PaperMeta]) -> Result<CitationGraph> {
    parse_citations(&read_text(path)?, &path.display().to_string(), metas)
}

pub fn write_citations(path: &Path, metas: &[PaperMeta], graph: &CitationGraph) -> Result<()> {
    write_file(path, |w| {
        for &(i, j) in graph.edges() {
            writeln!(w, "{}\t{}", metas[i].paper_id, metas[j].paper_id)?;
        }
        Ok(())
    })
}

/// Paths of the files making up a corpus.
#[derive(Debug, Clone, Default)]
pub struct CorpusPaths {
    pub counts: PathBuf,
    pub vocab: Option<PathBuf>,
    pub doc_ids: Option<PathBuf>,
    pub metadata: Option<PathBuf>,
    pub citations: Option<PathBuf>,
}

impl CorpusPaths {
    /// The standard file names inside `dir`; optional files are kept only if present.
    pub fn in_dir(dir: &Path) -> Self {
        let opt = |name: &str| Some(dir.join(name)).filter(|p| p.exists());
        CorpusPaths {
            counts: dir.join(COUNTS_FILE),
            vocab: opt(VOCAB_FILE),
            doc_ids: opt(DOC_IDS_FILE),
            metadata: opt(METADATA_FILE),
            citations: opt(CITATIONS_FILE),
        }
    }
}

/// A corpus with documents aligned to their metadata.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub dtm: DocumentTermMatrix,
    /// One id per document (column of the count matrix).
    pub doc_ids: Vec<String>,
    /// Every paper in the metadata file, in file order.
    pub papers: Vec<PaperMeta>,
    /// Citations among all papers in `papers`.
    pub paper_graph: Option<CitationGraph>,
    /// Index into `papers` for each document, when metadata is present.
    pub doc_papers: Option<Vec<usize>>,
}

impl Corpus {
    /// Metadata for each document.
    pub fn doc_metas(&self) -> Option<Vec<PaperMeta>> {
        self.doc_papers
            .as_ref()
            .map(|idx| idx.iter().map(|&i| self.papers[i].clone()).collect())
    }

    /// Citations among documents only.
    pub fn doc_graph(&self) -> Option<CitationGraph> {
        match (&self.paper_graph, &self.doc_papers) {
            (Some(g), Some(idx)) => Some(g.induced(idx)),
            _ => None,
        }
    }
}

pub fn load_corpus(paths: &CorpusPaths) -> Result<Corpus> {
    let counts = read_triplets(&paths.counts)?;
    let (p, n) = (counts.nrows(), counts.ncols());
    let vocabulary = match &paths.vocab {
        Some(path) => {
            let words = read_word_list(path)?;
            if words.len() != p {
                return Err(Error::ShapeMismatch(format!(
                    "{} lists {} words, count matrix has {p} rows",
                    path.display(),
                    words.len()
                )));
            }
            Vocabulary::new(words)?
        }
        None => Vocabulary::anonymous(p),
    };
    let dtm = DocumentTermMatrix::new(counts, vocabulary)?;
    let doc_ids = match &paths.doc_ids {
        Some(path) => {
            let ids = read_word_list(path)?;
            if ids.len() != n {
                return Err(Error::ShapeMismatch(format!(
                    "{} lists {} documents, count matrix has {n} columns",
                    path.display(),
                    ids.len()
                )));
            }
            ids
        }
        None => (0..n).map(|i| i.to_string()).collect(),
    };
    let papers = match &paths.metadata {
        Some(path) => read_metadata(path)?,
        None => Vec::new(),
    };
    let paper_graph = match &paths.citations {
        Some(path) => {
            if paths.metadata.is_none() {
                return Err(Error::InvalidArgument("a citation file needs a metadata file".into()));
            }
            Some(read_citations(path, &papers)?)
        }
        None => None,
    };
    let doc_papers = if paths.metadata.is_some() {
        let index: HashMap<&str, usize> = papers.iter().enumerate().map(|(i, m)| (m.paper_id.as_str(), i)).collect();
        let mut missing = Vec::new();
        let idx: Vec<usize> = doc_ids
            .iter()
            .map(|id| {
                index.get(id.as_str()).copied().unwrap_or_else(|| {
                    missing.push(id.clone());
                    0
                })
            })
            .collect();
        if !missing.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "documents without metadata: {}",
                missing.join(", ")
            )));
        }
        Some(idx)
    } else {
        None
    };
    Ok(Corpus {
        dtm,
        doc_ids,
        papers,
        paper_graph,
        doc_papers,
    })
}

/// Writes the count matrix, vocabulary and document ids into `dir`.
pub fn write_corpus(dir: &Path, dtm: &DocumentTermMatrix, doc_ids: &[String]) -> Result<()> {
    write_triplets(&dir.join(COUNTS_FILE), dtm.counts())?;
    write_lines(&dir.join(VOCAB_FILE), dtm.vocabulary().words())?;
    write_lines(&dir.join(DOC_IDS_FILE), doc_ids)
}

pub fn write_matrix_csv(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    write_file(path, |w| {
        for r in 0..m.nrows() {
            let row: Vec<String> = (0..m.ncols()).map(|c| fmt_f64(m[(r, c)])).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    })
}

/// Reads a header-less numeric CSV; every row must have the same length.
pub fn read_matrix_csv(path: &Path) -> Result<DMatrix<f64>> {
    let name = path.display().to_string();
    let text = read_text(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, l) in text.lines().enumerate() {
        if l.trim().is_empty() {
            continue;
        }
        let row = l
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|e| Error::parse(&name, i + 1, format!("not a number: {e}")))?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::parse(&name, i + 1, format!("expected {} fields, found {}", first.len(), row.len())));
            }
        }
        rows.push(row);
    }
    let ncols = rows.first().map_or(0, Vec::len);
    Ok(DMatrix::from_fn(rows.len(), ncols, |r, c| rows[r][c]))
}

pub fn write_vector_csv(path: &Path, v: &[f64]) -> Result<()> {
    write_matrix_csv(path, &DMatrix::from_column_slice(v.len(), 1, v))
}

pub fn read_vector_csv(path: &Path) -> Result<Vec<f64>> {
    let m = read_matrix_csv(path)?;
    if m.ncols() > 1 {
        return Err(Error::parse(path.display().to_string(), 1, "expected one value per line"));
    }
    Ok(m.iter().cloned().collect())
}

/// Writes `A_hat.csv`, `vertices.csv`, `singular_values.csv` and `pi.csv`.
pub fn write_fit(dir: &Path, fit: &TopicModelFit) -> Result<()> {
    write_matrix_csv(&dir.join("A_hat.csv"), &fit.a_hat)?;
    write_matrix_csv(&dir.join("vertices.csv"), &fit.vertices.v)?;
    write_vector_csv(&dir.join("singular_values.csv"), &fit.embedding.singular_values)?;
    write_matrix_csv(&dir.join("pi.csv"), &fit.pi)
}

pub fn read_a_hat(dir: &Path) -> Result<DMatrix<f64>> {
    read_matrix_csv(&dir.join("A_hat.csv"))
}

/// One line of the anchor-word report.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct AnchorRow {
    pub topic: usize,
    pub rank: usize,
    pub word: String,
    pub loading: f64,
}

pub fn write_anchor_report(path: &Path, rows: &[AnchorRow]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["topic", "rank", "word", "loading"]).map_err(|e| csv_err(path, e))?;
    for r in rows {
        w.write_record([r.topic.to_string(), r.rank.to_string(), r.word.clone(), fmt_f64(r.loading)])
            .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

/// Writes `W_hat.csv` (one row per document) and `dominant.csv`. Topics in
/// every report are numbered from 1.
pub fn write_weights(dir: &Path, weights: &TopicWeights, doc_ids: &[String]) -> Result<()> {
    write_matrix_csv(&dir.join("W_hat.csv"), &weights.w_hat.transpose())?;
    let path = dir.join("dominant.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["paper_id", "topic_index"]).map_err(|e| csv_err(&path, e))?;
    for (id, k) in doc_ids.iter().zip(&weights.dominant) {
        w.write_record([id.as_str(), &(k + 1).to_string()]).map_err(|e| csv_err(&path, e))?;
    }
    w.flush().map_err(|e| io_err(&path, e))
}

/// Reads `W_hat.csv` back as a `K x n` matrix.
pub fn read_w_hat(dir: &Path) -> Result<DMatrix<f64>> {
    Ok(read_matrix_csv(&dir.join("W_hat.csv"))?.transpose())
}

#[derive(serde::Serialize)]
struct ScoresSidecar<'a> {
    phi: Option<f64>,
    n_pairs: usize,
    iterations: usize,
    converged: bool,
    degenerate: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    mode: Option<&'a str>,
}

/// Writes the scores table `entity,mu,rank` and its JSON sidecar. A NaN
/// dispersion is written as `null`.
pub fn write_scores(csv_path: &Path, json_path: &Path, entities: &[String], scores: &ExportScores, mode: Option<&str>) -> Result<()> {
    let mut rank = vec![0usize; scores.mu.len()];
    for (pos, &e) in scores.ranking().iter().enumerate() {
        rank[e] = pos + 1;
    }
    let mut w = csv_writer(csv_path)?;
    w.write_record(["entity", "mu", "rank"]).map_err(|e| csv_err(csv_path, e))?;
    for (i, name) in entities.iter().enumerate() {
        w.write_record([name.as_str(), &fmt_f64(scores.mu[i]), &rank[i].to_string()])
            .map_err(|e| csv_err(csv_path, e))?;
    }
    w.flush().map_err(|e| io_err(csv_path, e))?;
    let sidecar = ScoresSidecar {
        phi: scores.phi.is_finite().then_some(scores.phi),
        n_pairs: scores.n_pairs,
        iterations: scores.iterations,
        converged: scores.converged,
        degenerate: scores.degenerate,
        mode,
    };
    let json = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
    write_file(json_path, |w| writeln!(w, "{json}"))
}

/// Writes the thresholded edge list and the full transition matrix.
pub fn write_graph(edges_path: &Path, matrix_path: &Path, graph: &CrossTopicGraph, edges: &[(usize, usize, f64)]) -> Result<()> {
    let mut w = csv_writer(edges_path)?;
    w.write_record(["from_topic", "to_topic", "weight"]).map_err(|e| csv_err(edges_path, e))?;
    for &(a, b, x) in edges {
        w.write_record([(a + 1).to_string(), (b + 1).to_string(), fmt_f64(x)])
            .map_err(|e| csv_err(edges_path, e))?;
    }
    w.flush().map_err(|e| io_err(edges_path, e))?;
    write_matrix_csv(matrix_path, &graph.p)
}

fn opt_f64(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

pub fn write_paper_counts(path: &Path, rows: &[YearCounts]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record([
        "year",
        "papers",
        "active_authors",
        "authorships",
        "papers_per_author",
        "fractional_papers_per_author",
        "authors_per_paper",
        "papers_1_author",
        "papers_2_authors",
        "papers_3_authors",
        "papers_4plus_authors",
        "authors_seniority_lt3",
        "authors_seniority_3_10",
        "authors_seniority_gt10",
    ])
    .map_err(|e| csv_err(path, e))?;
    for r in rows {
        let mut rec = vec![
            r.year.to_string(),
            r.papers.to_string(),
            r.active_authors.to_string(),
            r.authorships.to_string(),
            opt_f64(r.papers_per_author),
            opt_f64(r.fractional_papers_per_author),
            opt_f64(r.authors_per_paper),
        ];
        rec.extend(r.by_author_count.iter().map(usize::to_string));
        rec.extend(r.by_seniority.iter().map(usize::to_string));
        w.write_record(&rec).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

pub fn write_centrality(path: &Path, rows: &[&AuthorCentrality]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["author", "coauthors", "citers", "citations"]).map_err(|e| csv_err(path, e))?;
    for r in rows {
        w.write_record([r.author.clone(), r.coauthors.to_string(), r.citers.to_string(), r.citations.to_string()])
            .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

pub fn write_sleeping_beauty(path: &Path, rows: &[SleepingBeautyRow]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["paper_id", "TC", "B", "t_star"]).map_err(|e| csv_err(path, e))?;
    for r in rows {
        w.write_record([r.paper_id.clone(), r.total_citations.to_string(), fmt_f64(r.b), r.t_star.to_string()])
            .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

pub fn write_topic_interest(path: &Path, rows: &[(TopicInterest, MajorTopics)], k: usize) -> Result<()> {
    let mut w = csv_writer(path)?;
    let mut header = vec!["author".to_string()];
    header.extend((1..=k).map(|t| format!("z_{t}")));
    header.push("major_topics".into());
    w.write_record(&header).map_err(|e| csv_err(path, e))?;
    for (z, major) in rows {
        let mut rec = vec![z.author_id.clone()];
        rec.extend(z.z.iter().map(|&x| fmt_f64(x)));
        rec.push(major.topics.iter().map(|t| (t + 1).to_string()).collect::<Vec<_>>().join(";"));
        w.write_record(&rec).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

pub fn write_trends(path: &Path, rows: &[TrendRow], k: usize) -> Result<()> {
    let mut w = csv_writer(path)?;
    let mut header = vec!["group".to_string(), "year".to_string()];
    header.extend((1..=k).map(|t| format!("w_{t}")));
    w.write_record(&header).map_err(|e| csv_err(path, e))?;
    for r in rows {
        let mut rec = vec![r.group.clone(), r.year.to_string()];
        rec.extend(r.weights.iter().map(|&x| fmt_f64(x)));
        w.write_record(&rec).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

/// Writes `entity,score,rank` with rank 1 for the largest score.
pub fn write_pagerank(path: &Path, entities: &[String], scores: &[f64]) -> Result<()> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b)));
    let mut rank = vec![0usize; scores.len()];
    for (pos, &e) in order.iter().enumerate() {
        rank[e] = pos + 1;
    }
    let mut w = csv_writer(path)?;
    w.write_record(["entity", "score", "rank"]).map_err(|e| csv_err(path, e))?;
    for (i, name) in entities.iter().enumerate() {
        w.write_record([name.as_str(), &fmt_f64(scores[i]), &rank[i].to_string()])
            .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

pub fn write_scree(path: &Path, report: &ScreeReport) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["index", "singular_value", "above_threshold"]).map_err(|e| csv_err(path, e))?;
    for (i, &s) in report.singular_values.iter().enumerate() {
        let above = report.threshold.map(|t| (s > t).to_string()).unwrap_or_default();
        w.write_record([(i + 1).to_string(), fmt_f64(s), above]).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

/// Reads the `mu` column of a scores table, in file order.
pub fn read_scores(path: &Path) -> Result<Vec<f64>> {
    let name = path.display().to_string();
    let text = read_text(path)?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == "entity,mu,rank" => {}
        _ => return Err(Error::parse(&name, 1, "expected header entity,mu,rank")),
    }
    let mut mu = Vec::new();
    for (i, l) in lines {
        if l.trim().is_empty() {
            continue;
        }
        let field = l.rsplit(',').nth(1).ok_or_else(|| Error::parse(&name, i + 1, "expected three fields"))?;
        mu.push(field.trim().parse().map_err(|e| Error::parse(&name, i + 1, format!("not a number: {e}")))?);
    }
    Ok(mu)
}

/// Writes `A_true.csv`, `W_true.csv` (one row per document) and, when
/// present, `mu_true.csv`.
pub fn write_truth(dir: &Path, truth: &GroundTruth) -> Result<()> {
    write_matrix_csv(&dir.join("A_true.csv"), &truth.a)?;
    write_matrix_csv(&dir.join("W_true.csv"), &truth.w.transpose())?;
    if let Some(mu) = &truth.mu {
        write_vector_csv(&dir.join("mu_true.csv"), mu.as_slice())?;
    }
    Ok(())
}

pub fn read_truth(dir: &Path) -> Result<GroundTruth> {
    let mu_path = dir.join("mu_true.csv");
    Ok(GroundTruth {
        a: read_matrix_csv(&dir.join("A_true.csv"))?,
        w: read_matrix_csv(&dir.join("W_true.csv"))?.transpose(),
        mu: if mu_path.exists() {
            Some(nalgebra::DVector::from_vec(read_vector_csv(&mu_path)?))
        } else {
            None
        },
        seed: 0,
    })
}
