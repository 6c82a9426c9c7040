use std::fs;
use std::path::{Path, PathBuf};

use log::info;
use nalgebra::DMatrix;
use serde_json::json;
use tscore::corpus::{build_matrix, default_stop_words, frequency_matrix, tokenize, CitationGraph, PaperMeta, PreprocessConfig};
use tscore::io::{self, AnchorRow, Corpus, CorpusPaths};
use tscore::linalg::CscMatrix;
use tscore::metrics::{self, PeakRule, TrendGrouping};
use tscore::ranking::{self, GraphMode, PairSelection};
use tscore::spectral::{self, BarycentricMode, VertexHunter, VertexHuntOptions};
use tscore::synth::{self, SynthParams};
use tscore::{weights, Error, FitOptions, Result};

use crate::*;

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Preprocess(a) => {
            preprocess(a)?;
            dump_flags(cli, &a.out)
        }
        Command::Fit(a) => {
            fit(a, cli.seed)?;
            dump_flags(cli, &a.out)
        }
        Command::SelectK(a) => {
            select_k(a)?;
            match &a.out {
                Some(out) => dump_flags(cli, out),
                None => Ok(()),
            }
        }
        Command::Rank(a) => {
            rank(a)?;
            dump_flags(cli, &a.out)
        }
        Command::Metrics { metric } => {
            let out = metric_out(metric);
            metrics(metric)?;
            dump_flags(cli, out)
        }
        Command::Graph(a) => {
            graph(a)?;
            dump_flags(cli, &a.out)
        }
        Command::Synth(a) => {
            synth(a, cli.seed)?;
            dump_flags(cli, &a.out)
        }
        Command::Eval(a) => eval(a),
    }
}

fn dump_flags(cli: &Cli, out: &Path) -> Result<()> {
    if !cli.dump_flags {
        return Ok(());
    }
    let args: Vec<String> = std::env::args().collect();
    let text = serde_json::to_string_pretty(&json!({ "args": args })).expect("strings serialize");
    io::write_lines(&out.join("invocation.json"), &[text])
}

fn require(path: &Path) -> Result<()> {
    if path.exists() {
        Ok(())
    } else {
        Err(Error::Io {
            path: path.display().to_string(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "no such file or directory"),
        })
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.display().to_string(),
        source,
    })
}

fn topic_names(k: usize) -> Vec<String> {
    (1..=k).map(|t| format!("topic_{t}")).collect()
}

fn load_counts(dir: &Path) -> Result<Corpus> {
    require(dir)?;
    let mut paths = CorpusPaths::in_dir(dir);
    paths.metadata = None;
    paths.citations = None;
    io::load_corpus(&paths)
}

fn load_with_metadata(dir: &Path) -> Result<Corpus> {
    require(dir)?;
    let paths = CorpusPaths::in_dir(dir);
    require(&dir.join(io::METADATA_FILE))?;
    io::load_corpus(&paths)
}

fn load_papers(dir: &Path, with_citations: bool) -> Result<(Vec<PaperMeta>, Option<CitationGraph>)> {
    let meta_path = dir.join(io::METADATA_FILE);
    require(&meta_path)?;
    let metas = io::read_metadata(&meta_path)?;
    let graph = if with_citations {
        let cite_path = dir.join(io::CITATIONS_FILE);
        require(&cite_path)?;
        Some(io::read_citations(&cite_path, &metas)?)
    } else {
        None
    };
    Ok((metas, graph))
}

fn preprocess(a: &PreprocessArgs) -> Result<()> {
    for path in [Some(&a.input), a.ids.as_ref(), a.metadata.as_ref(), a.citations.as_ref(), a.stopwords.as_ref()]
        .into_iter()
        .flatten()
    {
        require(path)?;
    }
    let mut stop_words = if a.default_stopwords { default_stop_words() } else { Default::default() };
    if let Some(path) = &a.stopwords {
        stop_words.extend(io::read_word_list(path)?);
    }
    let config = PreprocessConfig {
        stop_words,
        min_doc_count: a.min_doc_count,
        short_doc_quantile: a.short_doc_quantile,
        lowercase: !a.no_lowercase,
    };
    config.validate()?;

    let docs = io::read_lines(&a.input)?;
    let metas = a.metadata.as_deref().map(io::read_metadata).transpose()?;
    let ids: Vec<String> = match (&a.ids, &metas) {
        (Some(path), _) => io::read_word_list(path)?,
        (None, Some(m)) => m.iter().map(|m| m.paper_id.clone()).collect(),
        (None, None) => (0..docs.len()).map(|i| i.to_string()).collect(),
    };
    if ids.len() != docs.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} documents but {} document ids",
            docs.len(),
            ids.len()
        )));
    }
    let graph = match (&a.citations, &metas) {
        (Some(path), Some(m)) => Some(io::read_citations(path, m)?),
        _ => None,
    };

    let tokens: Vec<Vec<String>> = docs.iter().map(|d| tokenize(d, &config)).collect();
    let dtm = build_matrix(&tokens, &config)?;
    let kept: Vec<String> = dtm.source_docs().iter().map(|&i| ids[i].clone()).collect();

    create_dir(&a.out)?;
    io::write_corpus(&a.out, &dtm, &kept)?;
    if let Some(m) = &metas {
        io::write_metadata(&a.out.join(io::METADATA_FILE), m)?;
        if let Some(g) = &graph {
            io::write_citations(&a.out.join(io::CITATIONS_FILE), m, g)?;
        }
    }
    println!(
        "vocabulary size p = {}, documents kept n = {} of {}, removed {}",
        dtm.n_words(),
        dtm.n_docs(),
        docs.len(),
        docs.len() - dtm.n_docs()
    );
    Ok(())
}

fn fit_options(a: &FitArgs, seed: u64) -> FitOptions {
    FitOptions {
        vertex: VertexHuntOptions {
            method: match a.vertex_hunter {
                Hunter::Sketched => VertexHunter::Sketched,
                Hunter::Successive => VertexHunter::Successive,
            },
            centers: a.centers,
            seed,
            ..Default::default()
        },
        barycentric: match a.barycentric {
            Barycentric::Clip => BarycentricMode::ClipRenormalize,
            Barycentric::Simplex => BarycentricMode::SimplexConstrained,
        },
        ..Default::default()
    }
}

fn fit_one(corpus: &Corpus, d: &CscMatrix<f64>, k: usize, a: &FitArgs, seed: u64, out: &Path) -> Result<()> {
    let fit = tscore::estimate_topic_matrix(d, k, &fit_options(a, seed))?;
    let w = match a.weights {
        WeightMethod::Ridge => weights::estimate_weights_ridge(&fit.a_hat, d, a.lambda)?,
        WeightMethod::Wls => weights::estimate_weights_wls(&fit.a_hat, d, &fit.embedding.m_diag)?,
    };
    create_dir(out)?;
    io::write_fit(out, &fit)?;
    io::write_weights(out, &w, &corpus.doc_ids)?;

    let loadings = spectral::topic_loadings(&fit.a_hat)?;
    let vocab = corpus.dtm.vocabulary();
    let rows: Vec<AnchorRow> = (0..k)
        .flat_map(|t| {
            spectral::frequent_anchor_words(&loadings, t, a.anchor_top)
                .into_iter()
                .enumerate()
                .map(move |(r, j)| (t, r, j))
        })
        .map(|(t, r, j)| AnchorRow {
            topic: t + 1,
            rank: r + 1,
            word: vocab.word(j).to_string(),
            loading: loadings[(j, t)],
        })
        .collect();
    io::write_anchor_report(&out.join("anchor_words.csv"), &rows)?;
    println!(
        "K = {k}: p = {}, n = {}, vertex hunter {:?}, {} empty documents -> {}",
        fit.a_hat.nrows(),
        w.w_hat.ncols(),
        fit.hunter,
        w.empty_docs.len(),
        out.display()
    );
    Ok(())
}

fn fit(a: &FitArgs, seed: u64) -> Result<()> {
    if a.anchor_top == 0 {
        return Err(Error::InvalidArgument("--anchor-top must be positive".into()));
    }
    let corpus = load_counts(&a.corpus)?;
    let d = frequency_matrix(&corpus.dtm)?;
    info!("loaded {} x {} frequency matrix", d.nrows(), d.ncols());
    create_dir(&a.out)?;
    match (a.k, a.k_range) {
        (Some(k), _) => fit_one(&corpus, &d, k, a, seed, &a.out),
        (None, Some(range)) => {
            let max_l = (range.hi + 1).min(d.nrows().min(d.ncols()));
            let scree = tscore::select_k_scree(&d, None, max_l)?;
            io::write_scree(&a.out.join("scree.csv"), &scree)?;
            let mut first_err = None;
            for k in range.lo..=range.hi {
                if let Err(e) = fit_one(&corpus, &d, k, a, seed, &a.out.join(format!("k{k:02}"))) {
                    eprintln!("K = {k}: {e}");
                    first_err.get_or_insert(e);
                }
            }
            first_err.map_or(Ok(()), Err)
        }
        (None, None) => Err(Error::InvalidArgument("give --k or --k-range".into())),
    }
}

fn select_k(a: &SelectKArgs) -> Result<()> {
    let corpus = load_counts(&a.corpus)?;
    let x = match a.matrix {
        ScreeMatrix::Counts => corpus.dtm.counts().map_with_index(|_, _, v| v as f64),
        ScreeMatrix::Frequency => frequency_matrix(&corpus.dtm)?,
    };
    let report = tscore::select_k_scree(&x, a.threshold, a.max_l)?;
    if let Some(out) = &a.out {
        io::write_scree(&out.join("scree.csv"), &report)?;
    }
    println!(
        "{}",
        json!({
            "singular_values": report.singular_values,
            "threshold": report.threshold,
            "k_hat": report.k_hat,
        })
    );
    Ok(())
}

fn graph_mode(g: &GraphOptions) -> (GraphMode, f64) {
    let mode = match g.graph_mode {
        GraphModeArg::Dominant => GraphMode::Dominant,
        GraphModeArg::Weighted => GraphMode::Weighted,
    };
    (mode, g.edge_cutoff.unwrap_or_else(|| ranking::default_edge_cutoff(mode)))
}

fn doc_graph(corpus: &Corpus, dir: &Path) -> Result<CitationGraph> {
    corpus.doc_graph().ok_or_else(|| {
        Error::InvalidArgument(format!("{} has no {}", dir.display(), io::CITATIONS_FILE))
    })
}

fn read_weights(fit_dir: &Path, n: usize) -> Result<DMatrix<f64>> {
    require(fit_dir)?;
    let w = io::read_w_hat(fit_dir)?;
    if w.ncols() != n {
        return Err(Error::ShapeMismatch(format!(
            "{} has {} documents, corpus has {n}",
            fit_dir.join("W_hat.csv").display(),
            w.ncols()
        )));
    }
    Ok(w)
}

fn write_cross_topic(out: &Path, w_hat: &DMatrix<f64>, graph: &CitationGraph, opts: &GraphOptions) -> Result<usize> {
    let (mode, cutoff) = graph_mode(opts);
    let g = ranking::cross_topic_graph(w_hat, graph, mode)?;
    let edges = ranking::threshold_edges(&g, cutoff)?;
    io::write_graph(&out.join("graph_edges.csv"), &out.join("graph_matrix.csv"), &g, &edges)?;
    io::write_matrix_csv(&out.join("graph_counts.csv"), &g.n_counts)?;
    Ok(edges.len())
}

fn rank(a: &RankArgs) -> Result<()> {
    let selection = match a.pairs {
        Pairs::AtLeastOne => PairSelection::AtLeastOne,
        Pairs::ExactlyOne => PairSelection::ExactlyOne,
    };
    match a.mode {
        RankMode::Topics => {
            let fit_dir = a.fit.as_ref().ok_or_else(|| Error::InvalidArgument("--mode topics needs --fit".into()))?;
            let corpus = load_with_metadata(&a.corpus)?;
            let graph = doc_graph(&corpus, &a.corpus)?;
            let w = read_weights(fit_dir, corpus.dtm.n_docs())?;
            let scores = ranking::fit_export_scores(&w, &graph, selection)?;
            create_dir(&a.out)?;
            io::write_scores(&a.out.join("scores.csv"), &a.out.join("scores.json"), &topic_names(w.nrows()), &scores, Some("topics"))?;
            let edges = write_cross_topic(&a.out, &w, &graph, &a.graph)?;
            println!(
                "{} topics, {} comparable pairs, phi = {:.4}, {edges} graph edges",
                scores.mu.len(),
                scores.n_pairs,
                scores.phi
            );
        }
        RankMode::Journals | RankMode::Pagerank => {
            let (metas, graph) = load_papers(&a.corpus, true)?;
            let pc = ranking::journal_citation_matrix(&metas, graph.as_ref().expect("loaded"), a.window, &a.base_years)?;
            create_dir(&a.out)?;
            if a.mode == RankMode::Journals {
                let scores = ranking::fit_stigler(&pc)?;
                io::write_scores(&a.out.join("scores.csv"), &a.out.join("scores.json"), &pc.entities, &scores, Some("journals"))?;
                println!("{} journals, {} pairs, phi = {:.4}", pc.len(), scores.n_pairs, scores.phi);
            } else {
                let pr = ranking::pagerank(&pc.adjacency(a.include_self), a.alpha, 1e-12)?;
                io::write_pagerank(&a.out.join("pagerank.csv"), &pc.entities, &pr)?;
                println!("{} journals ranked by PageRank", pc.len());
            }
        }
    }
    Ok(())
}

fn graph(a: &GraphArgs) -> Result<()> {
    let corpus = load_with_metadata(&a.corpus)?;
    let g = doc_graph(&corpus, &a.corpus)?;
    let w = read_weights(&a.fit, corpus.dtm.n_docs())?;
    create_dir(&a.out)?;
    let edges = write_cross_topic(&a.out, &w, &g, &a.graph)?;
    println!("{} topics, {edges} edges kept", w.nrows());
    Ok(())
}

fn metric_out(m: &Metric) -> &Path {
    match m {
        Metric::Counts { out, .. }
        | Metric::Centrality { out, .. }
        | Metric::SleepingBeauty { out, .. }
        | Metric::Interest { out, .. }
        | Metric::Trends { out, .. } => out,
    }
}

fn metrics(m: &Metric) -> Result<()> {
    match m {
        Metric::Counts { corpus, out } => {
            let (metas, _) = load_papers(corpus, false)?;
            let rows = metrics::paper_counts(&metas);
            io::write_paper_counts(&out.join("paper_counts.csv"), &rows)?;
            println!("{} years, {} papers", rows.len(), metas.len());
        }
        Metric::Centrality { corpus, out, top, sort_by } => {
            let (metas, graph) = load_papers(corpus, true)?;
            let c = metrics::centrality(&metas, graph.as_ref().expect("loaded"))?;
            let key = |a: &metrics::AuthorCentrality| match sort_by {
                SortKey::Coauthors => a.coauthors,
                SortKey::Citers => a.citers,
                SortKey::Citations => a.citations,
            };
            let rows = metrics::top_authors(&c.authors, top.unwrap_or(c.authors.len()), key);
            io::write_centrality(&out.join("centrality_authors.csv"), &rows)?;
            println!("{} authors written", rows.len());
        }
        Metric::SleepingBeauty {
            corpus,
            out,
            top_by_peak,
            end_year,
            peak_rule,
        } => {
            let (metas, graph) = load_papers(corpus, true)?;
            let end = match end_year {
                Some(y) => *y,
                None => metas.iter().map(|m| m.year).max().ok_or(Error::InvalidArgument("metadata is empty".into()))?,
            };
            let curves = metrics::citation_curves(&metas, graph.as_ref().expect("loaded"), end)?;
            let rule = match peak_rule {
                PeakRuleArg::Earliest => PeakRule::Earliest,
                PeakRuleArg::Latest => PeakRule::Latest,
            };
            let rows = metrics::rank_sleeping_beauties(&curves, *top_by_peak, rule);
            io::write_sleeping_beauty(&out.join("sleeping_beauty.csv"), &rows)?;
            println!("{} papers scored through {end}", rows.len());
        }
        Metric::Interest { corpus, fit, out, fraction } => {
            if !(0.0..=1.0).contains(fraction) {
                return Err(Error::InvalidArgument(format!("--fraction must lie in [0, 1], got {fraction}")));
            }
            let c = load_with_metadata(corpus)?;
            let w = read_weights(fit, c.dtm.n_docs())?;
            let metas = c.doc_metas().expect("metadata loaded");
            let z = metrics::topic_interest(&metrics::author_papers(&metas), &w)?;
            let rows: Vec<_> = z
                .into_iter()
                .map(|t| {
                    let major = metrics::major_topics(&t.z, *fraction);
                    (t, major)
                })
                .collect();
            io::write_topic_interest(&out.join("topic_interest.csv"), &rows, w.nrows())?;
            println!("{} authors written", rows.len());
        }
        Metric::Trends { corpus, fit, out, group_by } => {
            let c = load_with_metadata(corpus)?;
            let w = read_weights(fit, c.dtm.n_docs())?;
            let metas = c.doc_metas().expect("metadata loaded");
            let grouping = match group_by {
                GroupBy::All => TrendGrouping::All,
                GroupBy::Journal => TrendGrouping::Journal,
            };
            let rows = metrics::topic_trends(&w, &metas, grouping)?;
            io::write_trends(&out.join("trends.csv"), &rows, w.nrows())?;
            println!("{} rows written", rows.len());
        }
    }
    Ok(())
}

fn synth(a: &SynthArgs, seed: u64) -> Result<()> {
    let params = SynthParams {
        p: a.p,
        n: a.n,
        k: a.k,
        doc_len: a.doc_len,
        anchor_count: a.anchor_count,
        heterogeneity: a.heterogeneity,
        alpha: a.alpha,
        pure_fraction: a.pure_fraction,
        mu: a.mu.clone(),
        pair_prob: a.pair_prob,
        duplicate_pairs: a.duplicate_pairs,
        seed,
    };
    let c = params.generate()?;
    create_dir(&a.out)?;
    let ids: Vec<String> = c.metas.iter().map(|m| m.paper_id.clone()).collect();
    io::write_corpus(&a.out, &c.dtm, &ids)?;
    io::write_metadata(&a.out.join(io::METADATA_FILE), &c.metas)?;
    if let Some(g) = &c.graph {
        io::write_citations(&a.out.join(io::CITATIONS_FILE), &c.metas, g)?;
    }
    let truth_dir: PathBuf = a.out.join("truth");
    io::write_truth(&truth_dir, &c.truth)?;
    let text = serde_json::to_string_pretty(&params).expect("params serialize");
    io::write_lines(&a.out.join("params.json"), &[text])?;
    println!(
        "p = {}, n = {}, K = {}, {} citations -> {}",
        a.p,
        a.n,
        a.k,
        c.graph.as_ref().map_or(0, |g| g.len()),
        a.out.display()
    );
    Ok(())
}

fn eval(a: &EvalArgs) -> Result<()> {
    require(&a.fit)?;
    require(&a.truth)?;
    let truth = io::read_truth(&a.truth)?;
    let a_hat = io::read_a_hat(&a.fit)?;
    let (l1, perm) = synth::l1_error(&a_hat, &truth.a)?;
    let w_hat = io::read_w_hat(&a.fit)?;
    let (w_err, w_perm) = synth::w_error(&w_hat, &truth.w)?;
    let mu_error = match (&a.scores, &truth.mu) {
        (Some(path), Some(mu)) => {
            let mu_hat = io::read_scores(path)?;
            if mu_hat.len() != mu.len() {
                return Err(Error::ShapeMismatch(format!(
                    "{} has {} scores, truth has {}",
                    path.display(),
                    mu_hat.len(),
                    mu.len()
                )));
            }
            Some((0..mu.len()).map(|k| (mu_hat[perm[k]] - mu[k]).abs()).fold(0.0, f64::max))
        }
        (Some(_), None) => {
            return Err(Error::InvalidArgument(format!(
                "{} has no mu_true.csv",
                a.truth.display()
            )))
        }
        _ => None,
    };
    println!(
        "{}",
        json!({
            "l1_error": l1,
            "topic_permutation": perm,
            "w_error": w_err,
            "w_permutation": w_perm,
            "mu_error": mu_error,
        })
    );
    Ok(())
}
