//! The bundled example script: golden outputs, independent recomputation of
//! several answers from the data files, and fixture regeneration.

mod common;
#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::collections::{BTreeMap, BTreeSet};

use common::*;
use simseql_cli::fixtures::{self, DEFAULT_SEED};
use simseql_core::OptimizerOptions;
use support::queries::QUERIES;

fn data(file: &str) -> (Vec<String>, Vec<Vec<String>>) {
    read_table(&examples_dir().join("section6").join(file))
}

fn param_vector(name: &str) -> Vec<f64> {
    let s = bundled_session();
    s.params.get(name).unwrap().as_vector().unwrap().to_vec()
}

/// Data lines of a TSV rendering, the two header lines dropped.
fn body(tsv: &str) -> Vec<Vec<String>> {
    tsv.lines().skip(2).map(|l| l.split('\t').map(String::from).collect()).collect()
}

fn column(tsv: &str, i: usize) -> Vec<String> {
    body(tsv).into_iter().map(|r| r[i].clone()).collect()
}

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

fn l2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Textbook dynamic program with substitution, insertion and deletion costs.
fn edit(a: &str, b: &str, sub: f64, ins: f64, del: f64) -> f64 {
    let (a, b): (Vec<char>, Vec<char>) = (a.chars().collect(), b.chars().collect());
    let mut d = vec![vec![0.0; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i as f64 * del;
    }
    for (j, cell) in d[0].iter_mut().enumerate() {
        *cell = j as f64 * ins;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let s = if a[i - 1] == b[j - 1] { 0.0 } else { sub };
            d[i][j] = (d[i - 1][j - 1] + s).min(d[i][j - 1] + ins).min(d[i - 1][j] + del);
        }
    }
    d[a.len()][b.len()]
}

/// `(id, distance)` pairs sorted nearest first, ties by id.
fn ranked(mut v: Vec<(i64, f64)>) -> Vec<(i64, f64)> {
    v.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    v
}

#[test]
fn queries_match_goldens_on_both_paths() {
    let mut s = bundled_session();
    let expected = expected_output();
    for (i, q) in QUERIES.iter().enumerate() {
        let reference = query_tsv(&mut s, q, OptimizerOptions::none()).unwrap();
        let optimized = query_tsv(&mut s, q, OptimizerOptions::default()).unwrap();
        assert_eq!(reference, optimized, "query {}", i + 1);
        check_golden(&format!("q{}.tsv", i + 1), &reference).unwrap();
        assert!(expected.contains(&reference), "query {} output missing from the script golden", i + 1);
    }
}

#[test]
fn first_query_returns_thirty_nearest_shapes() {
    let mut s = bundled_session();
    let tsv = query_tsv(&mut s, QUERIES[0], OptimizerOptions::default()).unwrap();
    assert_eq!(body(&tsv).len(), 30);
    let q = param_vector("queryImage");
    let (_, rows) = data("image.tsv");
    let want = ranked(rows.iter().map(|r| (r[0].parse().unwrap(), l2(&q, &vector_cell(&r[3])))).collect());
    let ids: Vec<String> = want[..30].iter().map(|(id, _)| id.to_string()).collect();
    assert_eq!(column(&tsv, 0), ids);
    for (got, (_, d)) in body(&tsv).iter().zip(&want) {
        let got: f64 = got[1].parse().unwrap();
        assert!((got - d).abs() <= 1e-5 * d.max(1.0), "{got} vs {d}");
    }
}

#[test]
fn second_query_matches_weighted_edit_oracle() {
    let mut s = bundled_session();
    let tsv = query_tsv(&mut s, QUERIES[1], OptimizerOptions::default()).unwrap();
    let (_, rows) = data("keyword.tsv");
    let want = ranked(
        rows.iter()
            .map(|r| (r[0].parse().unwrap(), edit("feather", &r[1], 1.0, 2.0, 2.0)))
            .filter(|(_, d)| *d <= 2.0)
            .collect(),
    );
    let words: BTreeMap<i64, String> = rows.iter().map(|r| (r[0].parse().unwrap(), r[1].clone())).collect();
    let expected: Vec<String> = want.iter().map(|(id, _)| words[id].clone()).collect();
    assert_eq!(column(&tsv, 0), expected);
    assert!(expected.len() >= 5, "{expected:?}");
}

#[test]
fn third_query_pairs_words_one_edit_apart() {
    let mut s = bundled_session();
    let tsv = query_tsv(&mut s, QUERIES[2], OptimizerOptions::default()).unwrap();
    let (_, rows) = data("keyword.tsv");
    let mut want = BTreeSet::new();
    for a in &rows {
        for b in &rows {
            if edit(&a[1], &b[1], 1.0, 1.0, 1.0) <= 1.0 {
                want.insert((a[0].clone(), b[0].clone()));
            }
        }
    }
    let got: BTreeSet<(String, String)> = body(&tsv).into_iter().map(|r| (r[0].clone(), r[2].clone())).collect();
    assert_eq!(got, want);
    assert_eq!(body(&tsv).len(), want.len());
}

#[test]
fn fifth_query_finds_the_video_with_both_faces() {
    let mut s = bundled_session();
    let tsv = query_tsv(&mut s, QUERIES[4], OptimizerOptions::default()).unwrap();
    let (obama, bush) = (param_vector("ObamaFace"), param_vector("BushFace"));
    let (_, rows) = data("video_frame.tsv");
    let videos = |face: &[f64]| -> BTreeSet<String> {
        rows.iter()
            .filter(|r| l2(face, &vector_cell(&r[2])) <= 0.01)
            .map(|r| r[1].clone())
            .collect()
    };
    let both: Vec<String> = videos(&obama).intersection(&videos(&bush)).cloned().collect();
    assert_eq!(both.len(), 1);
    assert_eq!(column(&tsv, 0), both);
}

#[test]
fn sixth_query_finds_the_planted_video() {
    let mut s = bundled_session();
    let tsv = query_tsv(&mut s, QUERIES[5], OptimizerOptions::default()).unwrap();
    let ids = column(&tsv, 0);
    assert!(!ids.is_empty());
    assert!(ids.iter().all(|v| v == "9"), "{ids:?}");
}

#[test]
fn seventh_query_matches_tag_count_oracle() {
    let mut s = bundled_session();
    let tsv = query_tsv(&mut s, QUERIES[6], OptimizerOptions::default()).unwrap();
    let q = param_vector("Image");
    let (_, images) = data("image.tsv");
    let near = ranked(images.iter().map(|r| (r[0].parse().unwrap(), l1(&q, &vector_cell(&r[2])))).collect());
    let near: BTreeSet<i64> = near[..30].iter().map(|(id, _)| *id).collect();
    let (_, tags) = data("image_keyword.tsv");
    let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
    for t in &tags {
        if near.contains(&t[0].parse().unwrap()) {
            *counts.entry(t[1].parse().unwrap()).or_default() += 1;
        }
    }
    let frequent: BTreeSet<i64> = counts.into_iter().filter(|(_, n)| *n > 3).map(|(k, _)| k).collect();
    // With at most ten frequent keywords the TOP 10 cut-off cannot split ties.
    assert!(!frequent.is_empty() && frequent.len() <= 10, "{frequent:?}");
    let (_, keywords) = data("keyword.tsv");
    let want: Vec<String> = keywords
        .iter()
        .filter(|r| frequent.contains(&r[0].parse().unwrap()))
        .map(|r| r[1].clone())
        .collect();
    assert_eq!(column(&tsv, 0), want);
}

#[test]
fn bundled_fixtures_regenerate_identically() {
    let dir = tempfile::tempdir().unwrap();
    let files = fixtures::generate(dir.path(), DEFAULT_SEED).unwrap();
    assert_eq!(files.len(), 109);
    for f in files {
        let rel = f.strip_prefix(dir.path()).unwrap();
        let bundled = std::fs::read(examples_dir().join(rel)).unwrap_or_else(|e| panic!("{}: {e}", rel.display()));
        assert!(std::fs::read(&f).unwrap() == bundled, "{} differs from the bundled copy", rel.display());
    }
}

#[test]
fn fixture_sizes() {
    for (file, rows) in [("image.tsv", 100), ("video_frame.tsv", 200), ("keyword.tsv", 50), ("image_keyword.tsv", 300)] {
        assert_eq!(data(file).1.len(), rows, "{file}");
    }
}
