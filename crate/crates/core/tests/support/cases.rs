//! Randomized instances for index-versus-scan, rewrite and budget checks.

use std::collections::BTreeSet;
use std::path::Path;

use proptest::prelude::*;
use simseql_core::datamodel::Value;
use simseql_core::functions::l2_metric;
use simseql_core::indexes::{AttachedIndex, ApproximationBudget};
use simseql_core::{Catalog, Database, OptimizerOptions, ParamBinding};

use super::*;

/// Relative tolerance for distances produced by different access paths.
pub const REL_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct Instance {
    pub seed: u64,
    pub rows: usize,
    pub dim: usize,
    /// Measure strings by edit distance instead of vectors.
    pub strings: bool,
    /// Vectors under L1 instead of the default L2.
    pub l1: bool,
    pub query: Vec<i32>,
    pub query_text: String,
    pub k: usize,
    pub radius: f64,
}

pub fn instance(max_rows: usize) -> impl Strategy<Value = Instance> {
    (any::<u64>(), 0..=max_rows, 1usize..=4, any::<bool>(), any::<bool>(), 1usize..=12, 0u32..=16).prop_flat_map(
        |(seed, rows, dim, strings, l1, k, r)| {
            (prop::collection::vec(-7i32..=7, dim), "[abcd]{0,5}").prop_map(move |(query, query_text)| Instance {
                seed,
                rows,
                dim,
                strings,
                l1,
                query,
                query_text,
                k,
                radius: f64::from(r) / 2.0,
            })
        },
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Knn,
    Range,
    MessifRange,
    SimilarityJoin,
    ReverseKnn,
    DistinctKnn,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Knn,
        Method::Range,
        Method::MessifRange,
        Method::SimilarityJoin,
        Method::ReverseKnn,
        Method::DistinctKnn,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Knn => "NN",
            Method::Range => "rangeQuery",
            Method::MessifRange => "MessifRangeQuery",
            Method::SimilarityJoin => "MessifSimilarityJoin",
            Method::ReverseKnn => "reverseKnn",
            Method::DistinctKnn => "distinctKnn",
        }
    }

    /// Largest relation the method is tried on; quadratic methods get less.
    pub fn max_rows(self) -> usize {
        match self {
            Method::SimilarityJoin => 150,
            Method::ReverseKnn => 200,
            _ => 500,
        }
    }

    /// Query text and the access path the optimized plan must use.
    pub fn query(self, t: &Instance) -> (String, &'static str) {
        let by = t.by();
        match self {
            Method::Knn => (format!("SELECT TOP {} id, distance FROM SIMSEARCH :q IN pts BY {by}", t.k), "metric-index"),
            Method::Range => (
                format!("SELECT id, distance FROM SIMSEARCH :q IN pts BY {by} METHOD rangeQuery({})", t.radius),
                "metric-index",
            ),
            Method::MessifRange => (
                format!("SELECT id, distance FROM SIMSEARCH :q IN pts BY {by} METHOD MessifRangeQuery({}, 1000000)", t.radius),
                "metric-index",
            ),
            Method::SimilarityJoin => {
                let (d, a) = (t.distance(), t.attr());
                (
                    format!(
                        "SELECT a.id, b.id, distance FROM SIMSEARCH IN pts AS a, pts AS b
                         BY {d}(a.{a}, b.{a}) METHOD MessifSimilarityJoin({})",
                        t.radius / 2.0
                    ),
                    "index-nested-loop",
                )
            }
            Method::ReverseKnn => (
                format!("SELECT id, distance FROM SIMSEARCH :q IN pts BY {by} METHOD reverseKnn({})", t.k.min(5)),
                "metric-index",
            ),
            Method::DistinctKnn => (
                format!("SELECT id, g, distance FROM SIMSEARCH :q IN pts BY {by} METHOD distinctKnn({}, g)", t.k),
                "metric-index",
            ),
        }
    }
}

impl Instance {
    pub fn attr(&self) -> &'static str {
        if self.strings {
            "s"
        } else {
            "v"
        }
    }

    pub fn by(&self) -> String {
        match (self.strings, self.l1) {
            (true, _) => "s".into(),
            (false, true) => "v DISTANCE FUNCTION L1_metric".into(),
            (false, false) => "v".into(),
        }
    }

    pub fn distance(&self) -> &'static str {
        match (self.strings, self.l1) {
            (true, _) => "simple_edit_distance",
            (false, true) => "L1_metric",
            (false, false) => "L2_metric",
        }
    }

    pub fn params(&self) -> ParamBinding {
        let q = if self.strings {
            Value::string(&self.query_text)
        } else {
            Value::vector(self.query.iter().map(|x| f64::from(*x)).collect::<Vec<_>>())
        };
        ParamBinding::new().with("q", q)
    }

    /// Runs the method's query with and without the index and compares.
    pub fn check(&self, method: Method) -> Result<(), TestCaseError> {
        let (query, access) = method.query(self);
        let c = Catalog::builtin();
        let db = random_points(&c, self.seed, self.rows, self.dim);
        let distance = (!self.strings).then(|| (self.distance(), vec![]));
        attach_metric(&c, &db, "pts", self.attr(), distance);
        let params = self.params();
        let (seq_plan, seq) = run(&query, &c, &db, &params, OptimizerOptions::none());
        let (idx_plan, idx) = run(&query, &c, &db, &params, OptimizerOptions::default());
        prop_assert!(seq_plan.contains("seq-scan"), "{}", seq_plan);
        prop_assert!(idx_plan.contains(access), "{}", idx_plan);
        if let Err(e) = same_rows(&seq, &idx, REL_TOLERANCE) {
            return Err(TestCaseError::fail(format!("{query}: {e}")));
        }
        Ok(())
    }
}

// Rewrites.

pub fn only(r1: bool, r2: bool) -> OptimizerOptions {
    OptimizerOptions {
        r1,
        r2,
        use_indexes: false,
    }
}

/// A filtered search and whether R1's guard holds for it.
pub fn r1_query() -> impl Strategy<Value = (String, bool)> {
    let radius = (0u32..=20).prop_map(|r| f64::from(r) / 2.0);
    (radius, 0usize..8, 0i64..4)
        .prop_map(|(r, shape, g)| match shape {
            0 => (format!("distance <= {r}"), true),
            1 => (format!("distance < {r}"), true),
            2 => (format!("distance <= {r} AND g = {g}"), true),
            3 => (format!("g <> {g} AND distance < {r} AND distance <= {}", r + 1.0), true),
            4 => (format!("distance >= {r}"), false),
            5 => (format!("distance <= {r} OR g = {g}"), false),
            6 => (format!("NOT distance > {r}"), false),
            _ => (format!("g = {g}"), false),
        })
        .prop_map(|(w, fires)| (format!("SELECT id, g, distance FROM SIMSEARCH :q IN pts BY v WHERE {w}"), fires))
}

/// A top-n query and whether R2's guard holds for it.
pub fn r2_query() -> impl Strategy<Value = (String, bool)> {
    (1usize..=40, 0usize..7).prop_map(|(n, shape)| {
        let base = format!("SELECT TOP {n} id, distance FROM SIMSEARCH :q IN pts BY v");
        match shape {
            0 => (base, true),
            1 => (format!("{base} ORDER BY distance"), true),
            2 => (format!("{base} ORDER BY distance ASC"), true),
            3 => (format!("{base} ORDER BY distance DESC"), false),
            4 => (format!("{base} ORDER BY id"), false),
            5 => (format!("{base} WHERE g = 1"), false),
            _ => (format!("SELECT TOP {n} id, distance FROM SIMSEARCH :q IN pts BY v METHOD rangeQuery(3)"), false),
        }
    })
}

pub fn rewrite_setup(seed: u64, rows: usize) -> (Catalog, Database, ParamBinding) {
    let c = Catalog::builtin();
    let db = random_points(&c, seed, rows, 2);
    attach_metric(&c, &db, "pts", "v", None);
    let params = ParamBinding::new().with("q", Value::vector(vec![(seed % 5) as f64, 1.0]));
    (c, db, params)
}

/// Runs `query` with no rewrites, with only `rewrite` (`"R1"` or `"R2"`)
/// and with everything enabled; checks the rewrite fires exactly when
/// `fires` and that all three agree.
pub fn check_rewrite(rewrite: &str, query: &str, fires: bool, seed: u64, rows: usize) -> Result<(), TestCaseError> {
    let (c, db, params) = rewrite_setup(seed, rows);
    let (_, reference) = run(query, &c, &db, &params, OptimizerOptions::none());
    let (plan, rewritten) = run(query, &c, &db, &params, only(rewrite == "R1", rewrite == "R2"));
    prop_assert_eq!(plan.contains(&format!("rewrite:{rewrite}")), fires, "{}", plan);
    prop_assert!(same_rows(&reference, &rewritten, 0.0).is_ok(), "{}", query);
    let (_, indexed) = run(query, &c, &db, &params, OptimizerOptions::default());
    prop_assert!(same_rows(&reference, &indexed, 0.0).is_ok(), "{}", query);
    Ok(())
}

// Budgets.

pub const BUDGETS: [Option<usize>; 4] = [Some(1), Some(10), Some(100), None];

pub fn budget(b: Option<usize>) -> ApproximationBudget {
    b.map_or(ApproximationBudget::UNLIMITED, ApproximationBudget::limit)
}

fn id_set(rs: &simseql_core::ResultSet) -> BTreeSet<i64> {
    ints(rs, 0).into_iter().collect()
}

/// Index range searches under growing budgets: each answer contains the
/// previous one, evaluations stay within the budget and the unlimited
/// answer is exact.
pub fn check_index_budget_chain(seed: u64, rows: usize, r: u32) -> Result<(), TestCaseError> {
    let c = Catalog::builtin();
    let db = random_points(&c, seed, rows, 3);
    attach_metric(&c, &db, "pts", "v", None);
    let rel = db.read("pts").unwrap();
    let AttachedIndex::Metric(index) = &rel.indexes()[0] else { unreachable!() };
    let q = Value::vector(vec![0.0, 1.0, -1.0]);
    let radius = f64::from(r) / 2.0;
    let mut previous: Option<BTreeSet<u64>> = None;
    for b in BUDGETS {
        let out = index.range(&q, radius, budget(b)).unwrap();
        if let Some(m) = b {
            prop_assert!(out.evaluations <= m, "{} evaluations under budget {}", out.evaluations, m);
        }
        let ids: BTreeSet<u64> = out.hits.iter().map(|h| h.0).collect();
        if let Some(p) = &previous {
            prop_assert!(p.is_subset(&ids));
        }
        previous = Some(ids);
    }
    let exact: BTreeSet<u64> = rel
        .scan()
        .filter(|t| l2_metric(&q, &t.values[2]).unwrap() <= radius)
        .map(|t| t.row_id.0)
        .collect();
    prop_assert_eq!(previous.unwrap(), exact);
    Ok(())
}

/// The same chain through `MessifRangeQuery`, with or without an index.
pub fn check_query_budget_chain(seed: u64, rows: usize, r: u32, indexed: bool) -> Result<(), TestCaseError> {
    let c = Catalog::builtin();
    let db = random_points(&c, seed, rows, 2);
    if indexed {
        attach_metric(&c, &db, "pts", "v", None);
    }
    let params = ParamBinding::new().with("q", Value::vector(vec![1.0, -2.0]));
    let radius = f64::from(r) / 2.0;
    let mut previous: Option<BTreeSet<i64>> = None;
    for b in BUDGETS {
        let limit = b.unwrap_or(1_000_000);
        let q = format!("SELECT id FROM SIMSEARCH :q IN pts BY v METHOD MessifRangeQuery({radius}, {limit})");
        let (_, rs) = run(&q, &c, &db, &params, OptimizerOptions::default());
        prop_assert!(rs.rows.len() <= limit);
        let ids = id_set(&rs);
        if let Some(p) = &previous {
            prop_assert!(p.is_subset(&ids));
        }
        previous = Some(ids);
    }
    let (_, exact) = run(
        &format!("SELECT id FROM SIMSEARCH :q IN pts BY v METHOD rangeQuery({radius})"),
        &c,
        &db,
        &params,
        OptimizerOptions::none(),
    );
    prop_assert_eq!(previous.unwrap(), id_set(&exact));
    Ok(())
}

// Plan goldens.

/// Compares with `<dir>/<name>.txt`; `UPDATE_GOLDEN=1` rewrites the file
/// instead.
fn golden(dir: &Path, name: &str, actual: &str) -> Result<(), String> {
    let path = dir.join(format!("{name}.txt"));
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(dir).unwrap();
        std::fs::write(&path, actual).unwrap();
        return Ok(());
    }
    let expected = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if actual == expected {
        Ok(())
    } else {
        Err(format!("EXPLAIN for {name} differs from {}:\n{actual}", path.display()))
    }
}

fn require(plan: &str, needle: &str) -> Result<(), String> {
    if plan.contains(needle) {
        Ok(())
    } else {
        Err(format!("expected {needle:?} in\n{plan}"))
    }
}

/// EXPLAIN output for queries on both sides of the R1 and R2 guards,
/// checked against the golden files in `dir`.
pub fn check_explain_goldens(dir: &Path) -> Result<(), String> {
    let c = Catalog::builtin();
    let words = strings(&c, &["feather", "faether", "dog", "dot", "weather"]);
    let none = ParamBinding::new();
    let default = OptimizerOptions::default();
    let q2 = "SELECT value FROM SIMSEARCH 'feather' IN keyword BY value
              DISTANCE FUNCTION weighted_edit_distance(1,2,2) WHERE distance <= 2";
    let plan = explain_of(q2, &c, &words, &none, default);
    require(&plan, "seq-scan")?;
    golden(dir, "range_pushdown_seq", &plan)?;
    let weights = vec![Value::Integer(1), Value::Integer(2), Value::Integer(2)];
    attach_metric(&c, &words, "keyword", "value", Some(("weighted_edit_distance", weights)));
    let plan = explain_of(q2, &c, &words, &none, default);
    require(&plan, "rewrite:R1 range(2) via metric-index(keyword.value, weighted_edit_distance)")?;
    golden(dir, "range_pushdown_index", &plan)?;
    let q = "SELECT value FROM SIMSEARCH 'feather' IN keyword BY value WHERE distance > 2";
    golden(dir, "no_pushdown_for_other_filters", &explain_of(q, &c, &words, &none, default))?;

    let (c, db, params) = rewrite_setup(3, 50);
    let plan = explain_of("SELECT TOP 30 id, distance FROM SIMSEARCH :q IN pts BY v", &c, &db, &params, default);
    require(&plan, "rewrite:R2 knn(30)")?;
    golden(dir, "top_pushdown", &plan)?;
    let q = "SELECT TOP 30 id, distance FROM SIMSEARCH :q IN pts BY v ORDER BY id";
    golden(dir, "no_top_pushdown_when_ordered_otherwise", &explain_of(q, &c, &db, &params, default))?;
    let q = "SELECT TOP 1 id FROM SIMSEARCH :q AS a, :q AS b IN pts BY minimum(DISTANCE(a, v), DISTANCE(b, v))";
    golden(dir, "composite_spec_scans", &explain_of(q, &c, &db, &params, default))?;
    let plain = explain_of("SELECT id FROM pts", &c, &db, &params, default);
    if plain.lines().count() != 1 || plain.contains("rewrite") {
        return Err(format!("plain scan plan:\n{plain}"));
    }
    golden(dir, "plain_scan", &plain)
}
