//! Metric-index access versus sequential scan, method by method.

mod support;

use proptest::prelude::*;
use support::cases::{instance, Method};

const CASES: u32 = 200;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    #[test]
    fn knn_index_matches_scan(t in instance(Method::Knn.max_rows())) {
        t.check(Method::Knn)?;
    }

    #[test]
    fn range_index_matches_scan(t in instance(Method::Range.max_rows())) {
        t.check(Method::Range)?;
    }

    #[test]
    fn unlimited_budget_range_index_matches_scan(t in instance(Method::MessifRange.max_rows())) {
        t.check(Method::MessifRange)?;
    }

    #[test]
    fn similarity_join_index_matches_scan(t in instance(Method::SimilarityJoin.max_rows())) {
        t.check(Method::SimilarityJoin)?;
    }

    #[test]
    fn reverse_knn_index_matches_scan(t in instance(Method::ReverseKnn.max_rows())) {
        t.check(Method::ReverseKnn)?;
    }

    #[test]
    fn distinct_knn_index_matches_scan(t in instance(Method::DistinctKnn.max_rows())) {
        t.check(Method::DistinctKnn)?;
    }
}
