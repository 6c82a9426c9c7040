use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn tscore(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tscore"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = tscore(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(dir: &Path, args: &[&str]) -> (i32, String) {
    let out = tscore(dir, args);
    (out.status.code().unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn read(path: impl AsRef<Path>) -> String {
    fs::read_to_string(path).unwrap()
}

fn csv_column(path: impl AsRef<Path>, column: &str) -> Vec<String> {
    let text = read(path);
    let mut lines = text.lines();
    let idx = lines.next().unwrap().split(',').position(|h| h == column).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().to_string()).collect()
}

fn dir_contents(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            out.extend(dir_contents(&path));
        } else {
            out.push((path.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&path).unwrap()));
        }
    }
    out.sort();
    out
}

#[test]
fn preprocess_tabulates_and_reports_sizes() {
    let t = tempfile::tempdir().unwrap();
    fs::write(t.path().join("docs.txt"), "The EM algorithm, revisited.\nEM for mixtures 2024\nthe\nmixtures of experts\n").unwrap();
    fs::write(t.path().join("stop.txt"), "the\nof\nfor\n").unwrap();
    let stdout = ok(
        t.path(),
        &["preprocess", "--input", "docs.txt", "--stopwords", "stop.txt", "--min-doc-count", "2", "--short-doc-quantile", "0", "--out", "c"],
    );
    assert!(stdout.contains("p = 2"), "{stdout}");
    assert!(stdout.contains("removed 1"), "{stdout}");
    assert_eq!(read(t.path().join("c/vocab.txt")), "em\nmixtures\n");
    assert_eq!(read(t.path().join("c/doc_ids.txt")), "0\n1\n3\n");
    assert_eq!(read(t.path().join("c/counts.txt")), "2 3 4\n0 0 1\n0 1 1\n1 1 1\n1 2 1\n");
}

#[test]
fn preprocess_keeps_metadata_ids_and_citations() {
    let t = tempfile::tempdir().unwrap();
    fs::write(t.path().join("docs.txt"), "a b\na c\na\n").unwrap();
    fs::write(t.path().join("meta.tsv"), "p1\t2001\tJ\tx\np2\t2002\tJ\ty\np3\t2003\tK\tx,y\n").unwrap();
    fs::write(t.path().join("cites.tsv"), "p2\tp1\np3\tp2\n").unwrap();
    ok(
        t.path(),
        &[
            "preprocess", "--input", "docs.txt", "--metadata", "meta.tsv", "--citations", "cites.tsv",
            "--min-doc-count", "2", "--short-doc-quantile", "0", "--out", "c",
        ],
    );
    assert_eq!(read(t.path().join("c/vocab.txt")), "a\n");
    assert_eq!(read(t.path().join("c/doc_ids.txt")), "p1\np2\np3\n");
    assert_eq!(read(t.path().join("c/citations.tsv")), "p2\tp1\np3\tp2\n");
}

#[test]
fn exit_codes_follow_error_categories() {
    let t = tempfile::tempdir().unwrap();
    let (c, err) = code(t.path(), &["preprocess", "--input", "missing.txt", "--out", "c"]);
    assert_eq!(c, 2);
    assert!(err.contains("missing.txt"), "{err}");

    fs::write(t.path().join("docs.txt"), "alpha beta alpha\ngamma delta delta\n".repeat(5)).unwrap();
    let (c, _) = code(t.path(), &["preprocess", "--input", "docs.txt", "--out", "c"]);
    assert_eq!(c, 3, "default min-doc-count leaves no vocabulary");

    ok(t.path(), &["preprocess", "--input", "docs.txt", "--min-doc-count", "1", "--short-doc-quantile", "0", "--out", "c"]);
    let (c, err) = code(t.path(), &["fit", "--corpus", "c", "--k", "2", "--out", "f"]);
    assert_eq!(c, 4, "two disjoint vocabularies break the leading vector: {err}");

    fs::write(t.path().join("c/metadata.tsv"), "a\t2014\tJ1\tx\nb\t2014\tJ2\ty\nc\t2014\tJ3\tz\n").unwrap();
    fs::write(t.path().join("c/citations.tsv"), "a\tb\n").unwrap();
    let (c, err) = code(t.path(), &["rank", "--mode", "journals", "--corpus", "c", "--out", "r"]);
    assert_eq!(c, 5, "J3 is never compared: {err}");

    let (c, _) = code(t.path(), &["fit", "--corpus", "c", "--out", "f"]);
    assert_eq!(c, 2, "usage errors exit 2");
}

#[test]
fn journal_ranking_matches_closed_form() {
    let t = tempfile::tempdir().unwrap();
    let c = t.path().join("c");
    fs::create_dir(&c).unwrap();
    let meta = "a1\t2014\tJA\tx\na2\t2014\tJA\tx\na3\t2014\tJA\tx\nb1\t2015\tJB\ty\nb2\t2010\tJB\ty\na4\t2012\tJA\tx\n";
    fs::write(c.join("metadata.tsv"), meta).unwrap();
    fs::write(c.join("citations.tsv"), "a1\tb2\na2\tb2\na3\tb2\nb1\ta4\n").unwrap();
    ok(t.path(), &["rank", "--mode", "journals", "--corpus", "c", "--out", "r"]);
    assert_eq!(csv_column(t.path().join("r/scores.csv"), "entity"), ["JA", "JB"]);
    let mu: Vec<f64> = csv_column(t.path().join("r/scores.csv"), "mu").iter().map(|s| s.parse().unwrap()).collect();
    let half_log3 = 3f64.ln() / 2.0;
    assert!((mu[0] - half_log3).abs() < 1e-6 && (mu[1] + half_log3).abs() < 1e-6, "{mu:?}");
    let sidecar: serde_json::Value = serde_json::from_str(&read(t.path().join("r/scores.json"))).unwrap();
    assert_eq!(sidecar["n_pairs"], 1);
    assert_eq!(sidecar["mode"], "journals");

    ok(t.path(), &["rank", "--mode", "pagerank", "--corpus", "c", "--out", "p"]);
    let pr: Vec<f64> = csv_column(t.path().join("p/pagerank.csv"), "score").iter().map(|s| s.parse().unwrap()).collect();
    assert!((pr.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert!((pr[0] - 0.5).abs() < 1e-12, "a two-journal cycle is uniform: {pr:?}");
}

#[test]
fn sleeping_beauty_from_citation_files() {
    let t = tempfile::tempdir().unwrap();
    let c = t.path().join("c");
    fs::create_dir(&c).unwrap();
    let mut meta = String::from("target\t2000\tJ\tz\n");
    let mut cites = String::new();
    for (year, count) in [(2000, 1), (2001, 4), (2002, 9)] {
        for i in 0..count {
            meta.push_str(&format!("c{year}_{i}\t{year}\tJ\ta{i}\n"));
            cites.push_str(&format!("c{year}_{i}\ttarget\n"));
        }
    }
    fs::write(c.join("metadata.tsv"), meta).unwrap();
    fs::write(c.join("citations.tsv"), cites).unwrap();
    ok(t.path(), &["metrics", "sleeping-beauty", "--corpus", "c", "--out", "m", "--top-by-peak", "1"]);
    let text = read(t.path().join("m/sleeping_beauty.csv"));
    let row = text.lines().nth(1).unwrap();
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields[0], "target");
    assert_eq!(fields[1], "14");
    assert_eq!(fields[2].parse::<f64>().unwrap(), 2.5);
    assert_eq!(fields[3], "3");
}

#[test]
fn synthetic_loop_runs_and_reports_json() {
    let t = tempfile::tempdir().unwrap();
    let d = t.path();
    ok(d, &["--seed", "3", "synth", "--mu=1,0,-1", "--pair-prob", "0.02", "--out", "s", "--dump-flags"]);
    let invocation: serde_json::Value = serde_json::from_str(&read(d.join("s/invocation.json"))).unwrap();
    assert!(invocation["args"].as_array().unwrap().iter().any(|a| a == "--dump-flags"));
    let params: serde_json::Value = serde_json::from_str(&read(d.join("s/params.json"))).unwrap();
    assert_eq!(params["seed"], 3);

    ok(d, &["fit", "--corpus", "s", "--k", "3", "--out", "f", "--anchor-top", "20"]);
    let anchors = read(d.join("f/anchor_words.csv"));
    assert_eq!(anchors.lines().count(), 1 + 3 * 20);
    assert!(anchors.starts_with("topic,rank,word,loading\n1,1,"));
    let dominant = csv_column(d.join("f/dominant.csv"), "topic_index");
    assert_eq!(dominant.len(), 500);
    assert!(dominant.iter().all(|k| ["1", "2", "3"].contains(&k.as_str())));

    ok(d, &["rank", "--mode", "topics", "--corpus", "s", "--fit", "f", "--out", "r"]);
    let mu: Vec<f64> = csv_column(d.join("r/scores.csv"), "mu").iter().map(|s| s.parse().unwrap()).collect();
    let mut sorted = mu.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(sorted[1], 0.0, "scores are median-centered");
    let edges = read(d.join("r/graph_edges.csv"));
    assert!(edges.starts_with("from_topic,to_topic,weight\n"));
    for line in edges.lines().skip(1) {
        assert!(line.split(',').nth(2).unwrap().parse::<f64>().unwrap() >= 0.09);
    }

    for m in ["counts", "centrality", "sleeping-beauty"] {
        ok(d, &["metrics", m, "--corpus", "s", "--out", "m"]);
    }
    ok(d, &["metrics", "interest", "--corpus", "s", "--fit", "f", "--out", "m"]);
    ok(d, &["metrics", "trends", "--corpus", "s", "--fit", "f", "--out", "m"]);
    assert_eq!(csv_column(d.join("m/sleeping_beauty.csv"), "paper_id").len(), 300);
    for row in read(d.join("m/trends.csv")).lines().skip(1) {
        let s: f64 = row.split(',').skip(2).map(|x| x.parse::<f64>().unwrap()).sum();
        assert!((s - 1.0).abs() < 1e-12);
    }

    let report = ok(d, &["eval", "--fit", "f", "--truth", "s/truth", "--scores", "r/scores.csv"]);
    assert_eq!(report.trim_end().lines().count(), 1);
    let v: serde_json::Value = serde_json::from_str(&report).unwrap();
    assert!(v["l1_error"].as_f64().unwrap() < 0.5, "{v}");
    assert!(v["w_error"].as_f64().is_some());
    assert!(v["mu_error"].as_f64().is_some());
    let mut perm: Vec<u64> = v["topic_permutation"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect();
    perm.sort();
    assert_eq!(perm, [0, 1, 2]);
}

#[test]
fn k_range_writes_scree_and_one_fit_per_k() {
    let t = tempfile::tempdir().unwrap();
    let d = t.path();
    ok(d, &["synth", "--n", "300", "--out", "s"]);
    ok(d, &["fit", "--corpus", "s", "--k-range", "2:4", "--out", "f"]);
    assert_eq!(csv_column(d.join("f/scree.csv"), "singular_value").len(), 5);
    for k in 2..=4 {
        let a = read(d.join(format!("f/k{k:02}/A_hat.csv")));
        assert_eq!(a.lines().next().unwrap().split(',').count(), k);
    }
    let out = ok(d, &["select-k", "--corpus", "s", "--max-l", "4", "--threshold", "1e9"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["k_hat"], 0);
    assert_eq!(v["singular_values"].as_array().unwrap().len(), 4);
}

#[test]
fn reruns_are_byte_identical() {
    let t = tempfile::tempdir().unwrap();
    let d = t.path();
    for run in ["a", "b"] {
        ok(d, &["--seed", "11", "synth", "--n", "400", "--mu", "0.5,0,-0.5", "--out", &format!("{run}/s")]);
        ok(d, &["--seed", "11", "fit", "--corpus", &format!("{run}/s"), "--k", "3", "--out", &format!("{run}/f")]);
        ok(d, &["rank", "--mode", "topics", "--corpus", &format!("{run}/s"), "--fit", &format!("{run}/f"), "--out", &format!("{run}/r")]);
    }
    assert_eq!(dir_contents(&d.join("a")), dir_contents(&d.join("b")));

    ok(d, &["--seed", "12", "synth", "--n", "400", "--out", "c"]);
    assert_ne!(read(d.join("a/s/counts.txt")), read(d.join("c/counts.txt")));
}

#[test]
fn all_pure_synth_has_identity_weights() {
    let t = tempfile::tempdir().unwrap();
    ok(t.path(), &["synth", "--pure-fraction", "1", "--n", "3", "--k", "3", "--out", "s"]);
    let w = read(t.path().join("s/truth/W_true.csv"));
    for (i, row) in w.lines().enumerate() {
        let v: Vec<f64> = row.split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(v, (0..3).map(|j| if i == j { 1.0 } else { 0.0 }).collect::<Vec<_>>());
    }
    assert!(!t.path().join("s/citations.tsv").exists());
}
