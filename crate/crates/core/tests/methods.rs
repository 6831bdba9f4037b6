mod support;

use simseql_core::datamodel::Value;
use simseql_core::{Catalog, Database, OptimizerOptions, ParamBinding};
use support::*;

fn none() -> ParamBinding {
    ParamBinding::new()
}

fn both_paths(c: &Catalog, db: &Database, text: &str, params: &ParamBinding) -> simseql_core::ResultSet {
    let (_, seq) = run(text, c, db, params, OptimizerOptions::none());
    let (_, opt) = run(text, c, db, params, OptimizerOptions::default());
    same_rows(&seq, &opt, 1e-12).unwrap();
    seq
}

#[test]
fn similarity_join_keeps_self_and_symmetric_pairs() {
    let c = Catalog::builtin();
    let db = strings(&c, &["cat", "cut", "dog"]);
    attach_metric(&c, &db, "keyword", "value", None);
    let q = "SELECT k1.value, k2.value, distance
             FROM SIMSEARCH IN keyword AS k1, keyword AS k2
                  BY simple_edit_distance(k1.value, k2.value)
                  METHOD MessifSimilarityJoin(1)";
    let rs = both_paths(&c, &db, q, &none());
    let got: Vec<(String, String, f64)> = rs
        .rows
        .iter()
        .map(|r| (r[0].to_string(), r[1].to_string(), r[2].as_f64().unwrap()))
        .collect();
    let pair = |a: &str, b: &str, d| (a.to_string(), b.to_string(), d);
    assert_eq!(
        got,
        vec![
            pair("cat", "cat", 0.0),
            pair("cut", "cut", 0.0),
            pair("dog", "dog", 0.0),
            pair("cat", "cut", 1.0),
            pair("cut", "cat", 1.0),
        ]
    );
}

#[test]
fn typo_candidates_join() {
    let c = Catalog::builtin();
    let db = strings(&c, &["feather", "faether", "dog", "dot"]);
    let q = "SELECT * FROM SIMSEARCH IN keyword AS k1, keyword AS k2
             BY simple_edit_distance(k1.value, k2.value) METHOD MessifSimilarityJoin(1)";
    let (_, rs) = run(q, &c, &db, &none(), OptimizerOptions::default());
    let mut pairs: Vec<(String, String)> = rs.rows.iter().map(|r| (r[1].to_string(), r[3].to_string())).collect();
    pairs.sort();
    let mut expected: Vec<(String, String)> = ["feather", "faether", "dog", "dot"]
        .iter()
        .map(|w| (w.to_string(), w.to_string()))
        .collect();
    expected.push(("dog".into(), "dot".into()));
    expected.push(("dot".into(), "dog".into()));
    expected.sort();
    assert_eq!(pairs, expected);
}

#[test]
fn reverse_knn_on_a_line() {
    let c = Catalog::builtin();
    let mut db = Database::new();
    let rows = [0.0, 1.0, 10.0]
        .iter()
        .enumerate()
        .map(|(i, x)| vec![Value::Integer(i as i64 + 1), Value::vector(vec![*x])])
        .collect();
    relation(&c, &mut db, "p", &[("id", "integer", None), ("v", "number_vector", Some("L1_metric"))], rows);
    let params = ParamBinding::new().with("q", Value::vector(vec![2.0]));
    let q = "SELECT id, distance FROM SIMSEARCH :q IN p BY v METHOD reverseKnn(1)";
    let rs = both_paths(&c, &db, q, &params);
    assert_eq!(ints(&rs, 0), vec![2, 3]);
    attach_metric(&c, &db, "p", "v", None);
    let rs = both_paths(&c, &db, q, &params);
    assert_eq!(ints(&rs, 0), vec![2, 3]);
    assert_eq!(rs.rows[1][1].as_f64(), Some(8.0));
}

#[test]
fn reverse_knn_on_a_singleton_returns_it() {
    let c = Catalog::builtin();
    let mut db = Database::new();
    relation(&c, &mut db, "p", &[("v", "number_vector", Some("L1_metric"))], vec![vec![Value::vector(vec![5.0])]]);
    let params = ParamBinding::new().with("q", Value::vector(vec![100.0]));
    let (_, rs) = run("SELECT distance FROM SIMSEARCH :q IN p BY v METHOD reverseKnn(1)", &c, &db, &params, OptimizerOptions::default());
    assert_eq!(rs.rows.len(), 1);
}

#[test]
fn distinct_knn_skips_repeated_groups() {
    let c = Catalog::builtin();
    let mut db = Database::new();
    let rows = [(1.0, "a"), (2.0, "a"), (3.0, "b")]
        .iter()
        .map(|(v, g)| vec![Value::vector(vec![*v]), Value::string(g)])
        .collect();
    relation(&c, &mut db, "t", &[("v", "number_vector", Some("L1_metric")), ("g", "string", None)], rows);
    let params = ParamBinding::new().with("q", Value::vector(vec![0.0]));
    let q = "SELECT v, g FROM SIMSEARCH :q IN t BY v METHOD distinctKnn(2, g)";
    let rs = both_paths(&c, &db, q, &params);
    let got: Vec<String> = rs.rows.iter().map(|r| format!("{} {}", r[0], r[1])).collect();
    assert_eq!(got, vec!["[1] a", "[3] b"]);
    attach_metric(&c, &db, "t", "v", None);
    let rs = both_paths(&c, &db, q, &params);
    assert_eq!(rs.rows.len(), 2);

    let rs = both_paths(&c, &db, "SELECT g FROM SIMSEARCH :q IN t BY v METHOD distinctKnn(10, g)", &params);
    assert_eq!(texts(&rs, 0), vec!["a", "b"]);
}

#[test]
fn knn_and_range_small_examples() {
    let c = Catalog::builtin();
    let mut db = Database::new();
    let rows = [1.0, 5.0, 9.0]
        .iter()
        .enumerate()
        .map(|(i, x)| vec![Value::Integer(i as i64 + 1), Value::vector(vec![*x])])
        .collect();
    relation(&c, &mut db, "p", &[("id", "integer", None), ("v", "number_vector", Some("L1_metric"))], rows);
    let params = ParamBinding::new().with("q", Value::vector(vec![4.0]));
    let rs = both_paths(&c, &db, "SELECT TOP 2 id, distance FROM SIMSEARCH :q IN p BY v", &params);
    assert_eq!(ints(&rs, 0), vec![2, 1]);
    assert_eq!(rs.rows[1][1].as_f64(), Some(3.0));

    // Without TOP every tuple comes back, nearest first.
    let rs = both_paths(&c, &db, "SELECT id FROM SIMSEARCH :q IN p BY v", &params);
    assert_eq!(ints(&rs, 0), vec![2, 1, 3]);

    let words = strings(&c, &["cat", "cut", "dog"]);
    let rs = both_paths(&c, &words, "SELECT value, distance FROM SIMSEARCH 'cat' IN keyword BY value METHOD rangeQuery(1)", &none());
    assert_eq!(texts(&rs, 0), vec!["cat", "cut"]);
    let rs = both_paths(&c, &words, "SELECT value FROM SIMSEARCH 'cut' IN keyword BY value METHOD rangeQuery(0)", &none());
    assert_eq!(texts(&rs, 0), vec!["cut"]);
}

#[test]
fn generous_budget_equals_exact_range() {
    let c = Catalog::builtin();
    let db = random_points(&c, 11, 200, 3);
    attach_metric(&c, &db, "pts", "v", None);
    let params = ParamBinding::new().with("q", Value::vector(vec![0.0, 0.0, 0.0]));
    for opts in [OptimizerOptions::none(), OptimizerOptions::default()] {
        let (_, exact) = run("SELECT id, distance FROM SIMSEARCH :q IN pts BY v METHOD rangeQuery(4.5)", &c, &db, &params, opts);
        let (_, approx) = run(
            "SELECT id, distance FROM SIMSEARCH :q IN pts BY v METHOD MessifRangeQuery(4.5, 15000)",
            &c,
            &db,
            &params,
            opts,
        );
        assert!(!exact.rows.is_empty());
        same_rows(&exact, &approx, 0.0).unwrap();
        assert!(approx.notices.is_empty());
    }
}

#[test]
fn small_budget_raises_a_notice() {
    let c = Catalog::builtin();
    let db = random_points(&c, 3, 50, 2);
    let params = ParamBinding::new().with("q", Value::vector(vec![0.0, 0.0]));
    let (_, rs) = run(
        "SELECT id FROM SIMSEARCH :q IN pts BY v METHOD MessifRangeQuery(100, 10)",
        &c,
        &db,
        &params,
        OptimizerOptions::default(),
    );
    assert_eq!(rs.rows.len(), 10);
    assert_eq!(rs.notices.len(), 1);
}

#[test]
fn empty_relation_gives_empty_results() {
    let c = Catalog::builtin();
    let db = random_points(&c, 1, 0, 2);
    attach_metric(&c, &db, "pts", "v", None);
    let params = ParamBinding::new().with("q", Value::vector(vec![0.0, 0.0]));
    for q in [
        "SELECT TOP 3 id FROM SIMSEARCH :q IN pts BY v",
        "SELECT id FROM SIMSEARCH :q IN pts BY v METHOD rangeQuery(10)",
        "SELECT id FROM SIMSEARCH :q IN pts BY v METHOD reverseKnn(2)",
        "SELECT id FROM SIMSEARCH :q IN pts BY v METHOD distinctKnn(2, g)",
    ] {
        assert!(both_paths(&c, &db, q, &params).rows.is_empty(), "{q}");
    }
}

#[test]
fn set_distance_takes_the_nearest_query_object() {
    let c = Catalog::builtin();
    let mut db = Database::new();
    let rows = [0.0, 10.0, 20.0].iter().map(|x| vec![Value::vector(vec![*x])]).collect();
    relation(&c, &mut db, "p", &[("v", "number_vector", Some("L1_metric"))], rows);
    let params = ParamBinding::new()
        .with("a", Value::vector(vec![3.0]))
        .with("b", Value::vector(vec![19.0]));
    let (_, rs) = run(
        "SELECT v, distance FROM SIMSEARCH :a AS qa, :b AS qb IN p BY minimum(DISTANCE(qa, v), DISTANCE(qb, v))",
        &c,
        &db,
        &params,
        OptimizerOptions::default(),
    );
    let got: Vec<(String, f64)> = rs.rows.iter().map(|r| (r[0].to_string(), r[1].as_f64().unwrap())).collect();
    assert_eq!(got, vec![("[20]".into(), 1.0), ("[0]".into(), 3.0), ("[10]".into(), 7.0)]);
}

#[test]
fn weight_sum_combines_attribute_distances() {
    let c = Catalog::builtin();
    let mut db = Database::new();
    relation(
        &c,
        &mut db,
        "p",
        &[("a", "number_vector", Some("L1_metric")), ("b", "number_vector", Some("L1_metric"))],
        vec![vec![Value::vector(vec![2.0]), Value::vector(vec![5.0])]],
    );
    let params = ParamBinding::new().with("z", Value::vector(vec![0.0]));
    let (_, rs) = run(
        "SELECT distance FROM SIMSEARCH :z AS o IN p BY weight_sum((DISTANCE(a, o), 0.7), (DISTANCE(b, o), 0.2))",
        &c,
        &db,
        &params,
        OptimizerOptions::default(),
    );
    assert!((rs.rows[0][0].as_f64().unwrap() - 2.4).abs() < 1e-12);
}

#[test]
fn distance_errors_name_the_row() {
    let c = Catalog::builtin();
    let mut db = Database::new();
    let rows = vec![vec![Value::vector(vec![1.0, 2.0])], vec![Value::vector(vec![1.0])]];
    relation(&c, &mut db, "p", &[("v", "number_vector", Some("L1_metric"))], rows);
    let params = ParamBinding::new().with("q", Value::vector(vec![0.0, 0.0]));
    let q = simseql_core::parse("SELECT v FROM SIMSEARCH :q IN p BY v").unwrap();
    let b = simseql_core::bind(&q, &c, &db, &params).unwrap();
    let err = simseql_core::execute(&simseql_core::optimize(&b, &c, &db, &OptimizerOptions::default()), &db).unwrap_err();
    assert!(err.to_string().contains("row 2"), "{err}");
}
