//! Budget chains, recomputed distances and nested-search materialization.

mod support;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use simseql_core::datamodel::{Database, Value};
use simseql_core::functions::{l1_metric, l2_metric, weight_sum};
use simseql_core::indexes::{seq_search, ApproximationBudget, Selection};
use simseql_core::{Catalog, OptimizerOptions, ParamBinding};
use support::cases::*;
use support::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn index_range_budgets_form_a_chain(seed in any::<u64>(), rows in 0usize..1000, r in 0u32..24) {
        check_index_budget_chain(seed, rows, r)?;
    }

    #[test]
    fn query_budgets_form_a_chain(seed in any::<u64>(), rows in 0usize..400, r in 0u32..24, indexed in any::<bool>()) {
        check_query_budget_chain(seed, rows, r, indexed)?;
    }
}

#[test]
fn sequential_budget_counts_evaluations() {
    for n in [0usize, 1, 5, 50] {
        for b in [1usize, 3, 10, 100] {
            let mut calls = 0;
            let out = seq_search(0..n as u64, Selection::<f64>::All, ApproximationBudget::limit(b), |k| {
                calls += 1;
                Ok(*k as f64)
            })
            .unwrap();
            assert_eq!(out.evaluations, b.min(n));
            assert_eq!(calls, b.min(n));
        }
    }
}

fn close(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

type Recompute<'a> = Box<dyn Fn(&Value) -> f64 + 'a>;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn distance_column_matches_recomputation(seed in any::<u64>(), rows in 0usize..120, indexed in any::<bool>(), form in 0usize..4) {
        let c = Catalog::builtin();
        let db = random_points(&c, seed, rows, 3);
        if indexed {
            attach_metric(&c, &db, "pts", "v", None);
        }
        let a = Value::vector(vec![1.0, 0.0, 2.0]);
        let b = Value::vector(vec![-3.0, 4.0, 0.5]);
        let params = ParamBinding::new().with("a", a.clone()).with("b", b.clone());
        let (q, recompute): (&str, Recompute) = match form {
            0 => ("SELECT v, distance FROM SIMSEARCH :a IN pts BY v", Box::new(|v| l2_metric(&a, v).unwrap())),
            1 => (
                "SELECT v, distance FROM SIMSEARCH :a IN pts BY v DISTANCE FUNCTION L1_metric METHOD rangeQuery(6)",
                Box::new(|v| l1_metric(&a, v).unwrap()),
            ),
            2 => (
                "SELECT v, distance FROM SIMSEARCH :a AS x, :b AS y IN pts BY minimum(DISTANCE(x, v), DISTANCE(y, v))",
                Box::new(|v| l2_metric(&a, v).unwrap().min(l2_metric(&b, v).unwrap())),
            ),
            _ => (
                "SELECT v, distance FROM SIMSEARCH :a AS x, :b AS y IN pts
                 BY weight_sum((DISTANCE(x, v), 0.7), (L1_metric(y, v), 0.2)) METHOD reverseKnn(2)",
                Box::new(|v| weight_sum(&[(l2_metric(&a, v).unwrap(), 0.7), (l1_metric(&b, v).unwrap(), 0.2)]).unwrap()),
            ),
        };
        if form == 3 {
            // reverseKnn takes a single query object.
            let parsed = simseql_core::parse(q).unwrap();
            prop_assert!(simseql_core::bind(&parsed, &c, &db, &params).is_err());
            return Ok(());
        }
        let (_, rs) = run(q, &c, &db, &params, OptimizerOptions::default());
        for r in &rs.rows {
            let d = r[1].as_f64().unwrap();
            prop_assert!(close(d, recompute(&r[0])), "{} vs {}", d, recompute(&r[0]));
        }
        let ds: Vec<f64> = rs.rows.iter().map(|r| r[1].as_f64().unwrap()).collect();
        prop_assert!(ds.windows(2).all(|w| w[0] <= w[1]));
    }
}

fn two_relations(seed: u64) -> (Catalog, Database) {
    let c = Catalog::builtin();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut db = Database::new();
    let videos = rng.gen_range(1..6);
    let rows = |n: usize, rng: &mut ChaCha8Rng| -> Vec<Vec<Value>> {
        (0..n)
            .map(|i| {
                vec![
                    Value::Integer(i as i64 + 1),
                    Value::Integer(rng.gen_range(0..videos)),
                    Value::Long(rng.gen_range(0..300)),
                    Value::vector(vec![f64::from(rng.gen_range(-4i32..=4)), f64::from(rng.gen_range(-4i32..=4))]),
                ]
            })
            .collect()
    };
    let faces = rows(rng.gen_range(0..40), &mut rng);
    let captions = rows(rng.gen_range(0..40), &mut rng);
    relation(
        &c,
        &mut db,
        "faces",
        &[("fid", "integer", None), ("video", "integer", None), ("t", "long", Some("L1_metric")), ("v", "number_vector", Some("L2_metric"))],
        faces,
    );
    relation(
        &c,
        &mut db,
        "captions",
        &[("cid", "integer", None), ("video", "integer", None), ("t2", "long", Some("L1_metric")), ("w", "number_vector", Some("L2_metric"))],
        captions,
    );
    (c, db)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn nested_search_equals_materialized_inner(seed in any::<u64>(), r1 in 0u32..8, r2 in 0u32..8, method in 0usize..3) {
        let (c, mut db) = two_relations(seed);
        let params = ParamBinding::new()
            .with("p", Value::vector(vec![0.0, 1.0]))
            .with("q", Value::vector(vec![1.0, 0.0]));
        let inner = format!(
            "SIMSEARCH :p IN faces AS a BY v METHOD rangeQuery({r1})
             NATURAL JOIN
             SIMSEARCH :q IN captions AS b BY w METHOD MessifRangeQuery({r2}, 1000)"
        );
        let outer_method = ["", "METHOD rangeQuery(100)", "METHOD MessifRangeQuery(1000, 7)"][method];
        let nested = format!(
            "SELECT fid, cid, distance FROM SIMSEARCH IN {inner} BY DISTANCE(a.t, b.t2) {outer_method} AS s"
        );
        let (_, direct) = run(&nested, &c, &db, &params, OptimizerOptions::default());

        let (_, inner_rows) = run(&format!("SELECT fid, video, t, cid, t2 FROM {inner}"), &c, &db, &params, OptimizerOptions::default());
        relation(
            &c,
            &mut db,
            "tmp",
            &[("fid", "integer", None), ("video", "integer", None), ("t", "long", Some("L1_metric")), ("cid", "integer", None), ("t2", "long", None)],
            inner_rows.rows,
        );
        let materialized = format!("SELECT fid, cid, distance FROM SIMSEARCH IN tmp BY DISTANCE(t, t2) {outer_method} AS s");
        let (_, via_tmp) = run(&materialized, &c, &db, &params, OptimizerOptions::default());
        prop_assert!(same_rows(&direct, &via_tmp, 0.0).is_ok(), "{:?}\n{:?}", direct.rows, via_tmp.rows);
    }
}
