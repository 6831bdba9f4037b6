//! Similarity search execution: candidate enumeration, the built-in method
//! semantics and their sequential and metric-index access paths.

use std::cmp::Ordering;
use std::collections::HashSet;

use super::eval::as_distance;
use super::exec::Executor;
use super::optimize::indexed_operand;
use crate::binder::{BoundDistanceSpec, QueryObjectSource, SearchAccess, Semantics, SimSearchNode};
use crate::catalog::DistanceContext;
use crate::datamodel::ops::Row;
use crate::datamodel::{DistanceAnnotatedTuple, Relation, RowId, Value};
use crate::error::{Error, Result};
use crate::indexes::{seq_search, ApproximationBudget, AttachedIndex, MetricIndex, Selection};
use crate::Dist;

/// A selected candidate: its position in each source and its distance.
type Hit = (Vec<usize>, Dist);

fn by_distance_then_key(a: &Hit, b: &Hit) -> Ordering {
    a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0))
}

fn describe_key(key: &[usize]) -> String {
    match key {
        [p] => format!("row {}", p + 1),
        _ => format!(
            "rows ({})",
            key.iter().map(|p| (p + 1).to_string()).collect::<Vec<_>>().join(", ")
        ),
    }
}

fn at_candidate(e: Error, key: &[usize]) -> Error {
    match e {
        Error::Runtime(m) => Error::Runtime(format!("{m} (candidate {})", describe_key(key))),
        other => other,
    }
}

/// Every position vector over sources of the given sizes, left-major.
fn candidates(sizes: &[usize]) -> Vec<Vec<usize>> {
    if sizes.is_empty() || sizes.contains(&0) {
        return Vec::new();
    }
    let total: usize = sizes.iter().product();
    let mut out = Vec::with_capacity(total);
    let mut key = vec![0; sizes.len()];
    for _ in 0..total {
        out.push(key.clone());
        for i in (0..sizes.len()).rev() {
            key[i] += 1;
            if key[i] < sizes[i] {
                break;
            }
            key[i] = 0;
        }
    }
    out
}

fn candidate_row(sources: &[Vec<Row>], key: &[usize]) -> Row {
    let mut row = Vec::new();
    for (s, &p) in sources.iter().zip(key) {
        row.extend_from_slice(&s[p]);
    }
    row
}

fn metric_index<'r>(rel: &'r Relation, name: &crate::datamodel::Name) -> Result<&'r MetricIndex> {
    rel.indexes()
        .iter()
        .find_map(|i| match i {
            AttachedIndex::Metric(m) if m.name() == name => Some(m),
            _ => None,
        })
        .ok_or_else(|| Error::runtime(format!("metric index '{name}' is no longer attached to {}", rel.name())))
}

fn position(rel: &Relation, id: u64) -> Result<usize> {
    rel.position_of(RowId(id))
        .ok_or_else(|| Error::runtime(format!("index of {} refers to a missing row", rel.name())))
}

impl Executor<'_> {
    pub(crate) fn search(&mut self, node: &SimSearchNode) -> Result<Vec<Row>> {
        let objects = self.query_objects(node)?;
        let mut sources = Vec::with_capacity(node.sources.len());
        for s in &node.sources {
            sources.push(self.run(s)?);
        }
        let total: usize = sources.iter().map(Vec::len).product();
        if let Semantics::Range { budget, .. } = &node.semantics {
            if let Some(m) = budget.max_visited() {
                if m < total {
                    self.notices.push(format!(
                        "search {}: budget of {m} distance evaluations is below the {total} candidates; \
                         the result may be incomplete",
                        node.alias.as_ref().map_or(node.method_text.as_str(), |a| a.as_str())
                    ));
                }
            }
        }
        if matches!(node.spec, BoundDistanceSpec::AttributeDefault { .. } | BoundDistanceSpec::AttributeNamed { .. })
            && objects.len() != 1
        {
            return Err(Error::runtime(format!(
                "attribute distance needs exactly one query object, got {}",
                objects.len()
            )));
        }
        let hits = match &node.access {
            SearchAccess::Sequential => self.sequential(node, &sources, &objects)?,
            SearchAccess::MetricIndex { relation, index, .. } => {
                match self.via_metric_index(node, relation.as_str(), index, &objects)? {
                    Some(h) => h,
                    None => self.sequential(node, &sources, &objects)?,
                }
            }
            SearchAccess::IndexNestedLoop {
                relation,
                index,
                left_column,
                ..
            } => self.index_nested_loop(node, &sources, relation.as_str(), index, *left_column)?,
        };
        Ok(hits
            .into_iter()
            .enumerate()
            .map(|(i, (key, d))| {
                let mut row = candidate_row(&sources, &key);
                row.push(Value::Float(d));
                row.push(Value::Integer(i as i64 + 1));
                row
            })
            .collect())
    }

    fn query_objects(&mut self, node: &SimSearchNode) -> Result<Vec<Value>> {
        let mut out = Vec::with_capacity(node.objects.len());
        for o in &node.objects {
            out.push(match &o.source {
                QueryObjectSource::Value(e) => self.eval(e, &[], &[])?,
                QueryObjectSource::Subquery(plan) => {
                    let mut rows = self.run(plan)?;
                    if rows.len() != 1 {
                        return Err(Error::runtime(format!(
                            "a query object subquery must return one row, got {}",
                            rows.len()
                        )));
                    }
                    rows.swap_remove(0).swap_remove(0)
                }
            });
        }
        Ok(out)
    }

    /// Distance of one candidate under the search's distance spec.
    fn measure(&mut self, node: &SimSearchNode, row: &[Value], objects: &[Value]) -> Result<Dist> {
        match &node.spec {
            BoundDistanceSpec::AttributeDefault {
                column,
                entry,
                params,
                corpus,
                ..
            }
            | BoundDistanceSpec::AttributeNamed {
                column,
                entry,
                params,
                corpus,
                ..
            } => {
                let corpus = match corpus {
                    Some(o) => self.corpus(o)?,
                    None => None,
                };
                let ctx = DistanceContext {
                    corpus: corpus.as_deref(),
                };
                entry.evaluate(&objects[0], &row[*column], params, &ctx)
            }
            BoundDistanceSpec::Expression(e) => as_distance(&self.eval(e, row, objects)?),
        }
    }

    fn sequential(&mut self, node: &SimSearchNode, sources: &[Vec<Row>], objects: &[Value]) -> Result<Vec<Hit>> {
        let sizes: Vec<usize> = sources.iter().map(Vec::len).collect();
        let keys = candidates(&sizes);
        let mut run = |sel: Selection<Dist>, budget: ApproximationBudget| -> Result<Vec<Hit>> {
            let out = seq_search(keys.clone(), sel, budget, |key| {
                let row = candidate_row(sources, key);
                self.measure(node, &row, objects).map_err(|e| at_candidate(e, key))
            })?;
            Ok(out.hits)
        };
        match &node.semantics {
            Semantics::Knn(None) => run(Selection::All, ApproximationBudget::UNLIMITED),
            Semantics::Knn(Some(k)) => run(Selection::Knn(*k), ApproximationBudget::UNLIMITED),
            Semantics::Range { radius, budget } => run(Selection::Range(*radius), *budget),
            Semantics::SimilarityJoin { threshold } => run(Selection::Range(*threshold), ApproximationBudget::UNLIMITED),
            Semantics::DistinctKnn { k, column } => {
                let all = run(Selection::All, ApproximationBudget::UNLIMITED)?;
                Ok(distinct_greedy(all.into_iter(), *k, |key| candidate_row(sources, key)[*column].clone()))
            }
            Semantics::Custom(method) => {
                let all = run(Selection::All, ApproximationBudget::UNLIMITED)?;
                let tuples = all
                    .into_iter()
                    .map(|(key, distance)| DistanceAnnotatedTuple {
                        row: candidate_row(sources, &key),
                        key,
                        distance,
                    })
                    .collect();
                let mut chosen: Vec<Hit> = method
                    .select(tuples, &node.method_params)?
                    .into_iter()
                    .map(|t| (t.key, t.distance))
                    .collect();
                chosen.sort_by(by_distance_then_key);
                Ok(chosen)
            }
            Semantics::ReverseKnn { k } => self.reverse_knn_seq(node, sources, objects, *k),
        }
    }

    fn reverse_knn_seq(&mut self, node: &SimSearchNode, sources: &[Vec<Row>], objects: &[Value], k: usize) -> Result<Vec<Hit>> {
        let Some((column, entry, params)) = node.spec.attribute() else {
            return Err(Error::runtime("reverse kNN needs an attribute distance"));
        };
        let corpus = match &node.spec {
            BoundDistanceSpec::AttributeDefault { corpus: Some(o), .. }
            | BoundDistanceSpec::AttributeNamed { corpus: Some(o), .. } => self.corpus(o)?,
            _ => None,
        };
        let ctx = DistanceContext {
            corpus: corpus.as_deref(),
        };
        let rows = &sources[0];
        let mut hits = Vec::new();
        for (t, row) in rows.iter().enumerate() {
            let key = vec![t];
            let d = self.measure(node, row, objects).map_err(|e| at_candidate(e, &key))?;
            let mut others = Vec::with_capacity(rows.len().saturating_sub(1));
            for (s, other) in rows.iter().enumerate() {
                if s != t {
                    others.push(
                        entry
                            .evaluate(&row[column], &other[column], params, &ctx)
                            .map_err(|e| at_candidate(e, &key))?,
                    );
                }
            }
            let qualifies = if others.len() < k {
                true
            } else {
                let (_, kth, _) = others.select_nth_unstable_by(k - 1, |a, b| a.total_cmp(b));
                d <= *kth
            };
            if qualifies {
                hits.push((key, d));
            }
        }
        hits.sort_by(by_distance_then_key);
        Ok(hits)
    }

    /// Metric-index access path over a single full-scan source. `None` when
    /// the method has no index algorithm.
    fn via_metric_index(
        &mut self,
        node: &SimSearchNode,
        relation: &str,
        index: &crate::datamodel::Name,
        objects: &[Value],
    ) -> Result<Option<Vec<Hit>>> {
        let Some((column, _, _)) = indexed_operand(node) else {
            return Ok(None);
        };
        let db = self.db;
        let rel = db.read(relation)?;
        let idx = metric_index(&rel, index)?;
        let q = &objects[0];
        let to_hits = |hits: Vec<(u64, Dist)>| -> Result<Vec<Hit>> {
            let mut out = hits
                .into_iter()
                .map(|(id, d)| Ok((vec![position(&rel, id)?], d)))
                .collect::<Result<Vec<Hit>>>()?;
            out.sort_by(by_distance_then_key);
            Ok(out)
        };
        Ok(Some(match &node.semantics {
            Semantics::Knn(Some(k)) => to_hits(idx.knn(q, *k, ApproximationBudget::UNLIMITED)?.hits)?,
            Semantics::Range { radius, budget } => to_hits(idx.range(q, *radius, *budget)?.hits)?,
            Semantics::ReverseKnn { k } => {
                let ctx = DistanceContext::default();
                let mut hits = Vec::new();
                for (t, tuple) in rel.tuples().iter().enumerate() {
                    let v = &tuple.values[column];
                    let d = idx
                        .distance()
                        .evaluate(q, v, idx.params(), &ctx)
                        .map_err(|e| at_candidate(e, &[t]))?;
                    // The k+1 nearest include the tuple itself at distance 0,
                    // so the last of them is the k-th nearest other tuple.
                    let near = idx.knn(v, k + 1, ApproximationBudget::UNLIMITED)?.hits;
                    if near.len() < k + 1 || d <= near[*k].1 {
                        hits.push((vec![t], d));
                    }
                }
                hits.sort_by(by_distance_then_key);
                hits
            }
            Semantics::DistinctKnn { k, column: distinct } => {
                let mut it = idx.nearest(q, ApproximationBudget::UNLIMITED);
                let mut seen = HashSet::new();
                let mut out = Vec::new();
                while out.len() < *k {
                    let Some((id, d)) = it.next_hit()? else { break };
                    let p = position(&rel, id)?;
                    if seen.insert(rel.tuples()[p].values[*distinct].clone()) {
                        out.push((vec![p], d));
                    }
                }
                out
            }
            _ => return Ok(None),
        }))
    }

    fn index_nested_loop(
        &mut self,
        node: &SimSearchNode,
        sources: &[Vec<Row>],
        relation: &str,
        index: &crate::datamodel::Name,
        left_column: usize,
    ) -> Result<Vec<Hit>> {
        let Semantics::SimilarityJoin { threshold } = node.semantics else {
            return Err(Error::runtime("index nested loop serves similarity joins only"));
        };
        let db = self.db;
        let rel = db.read(relation)?;
        let idx = metric_index(&rel, index)?;
        let mut hits = Vec::new();
        for (i, left) in sources[0].iter().enumerate() {
            let found = idx
                .range(&left[left_column], threshold, ApproximationBudget::UNLIMITED)
                .map_err(|e| at_candidate(e, &[i]))?;
            for (id, d) in found.hits {
                hits.push((vec![i, position(&rel, id)?], d));
            }
        }
        hits.sort_by(by_distance_then_key);
        Ok(hits)
    }
}

/// Greedy distinct selection over hits in ascending order: a hit is taken
/// unless its value of the distinct attribute was taken already.
fn distinct_greedy(hits: impl Iterator<Item = Hit>, k: usize, mut value: impl FnMut(&[usize]) -> Value) -> Vec<Hit> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for h in hits {
        if out.len() == k {
            break;
        }
        if seen.insert(value(&h.0)) {
            out.push(h);
        }
    }
    out
}
