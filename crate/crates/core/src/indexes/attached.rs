//! Indexes attached to a relation attribute.

use std::sync::Arc;

use super::ordered::{CompareOp, OrderedIndex};
use super::vptree::{Nearest, VpTree};
use super::{ApproximationBudget, SearchOutcome};
use crate::catalog::{Catalog, DistanceContext, DistanceFunctionEntry, IndexKind, IndexTarget, METRIC_INDEX, ORDERED_INDEX};
use crate::datamodel::{Name, Relation, RowId, Value};
use crate::error::{Error, Result};
use crate::Dist;

pub const DEFAULT_INDEX_SEED: u64 = 0x5eed;

type ValueDistance<'a> = Box<dyn FnMut(&Value, &Value) -> Result<Dist> + 'a>;

fn column_of(rel: &Relation, attr: &str) -> Result<usize> {
    rel.schema()
        .index_of(attr)
        .ok_or_else(|| Error::catalog(format!("relation '{}' has no attribute '{attr}'", rel.name())))
}

/// Vantage-point tree over one attribute under one metric distance.
#[derive(Clone, Debug)]
pub struct MetricIndex {
    name: Name,
    attribute: Name,
    column: usize,
    distance: Arc<DistanceFunctionEntry>,
    params: Vec<Value>,
    tree: VpTree<Value, Dist>,
    /// Rows whose value is null: infinitely far from everything.
    nulls: Vec<u64>,
    dimension: Option<usize>,
}

/// Builds a metric index over `rel.attr`. Without an explicit distance the
/// attribute's default is used. Fails unless the distance declares every
/// property the metric index requires.
pub fn build_metric_index(
    catalog: &Catalog,
    rel: &Relation,
    attr: &str,
    distance: Option<(&str, Vec<Value>)>,
    seed: u64,
) -> Result<MetricIndex> {
    let column = column_of(rel, attr)?;
    let attribute = &rel.schema().attributes()[column];
    let (entry, args) = match distance {
        Some((name, args)) => (
            catalog
                .distance(name)
                .ok_or_else(|| Error::catalog(format!("unknown distance function '{name}'")))?,
            args,
        ),
        None => (catalog.attribute_default_distance(attribute)?, Vec::new()),
    };
    let params = entry.bind_params(args).map_err(|e| Error::catalog(e.to_string()))?;
    let index = catalog
        .index(METRIC_INDEX)
        .ok_or_else(|| Error::catalog("no metric index is registered"))?;
    let missing = catalog.missing_requirements(&index, IndexTarget::Distance { entry: &entry, params: &params });
    if !missing.is_empty() {
        return Err(Error::catalog(format!(
            "metric index on {}.{} requires {}, which '{}' does not declare",
            rel.name(),
            attribute.name,
            missing.join(", "),
            entry.name
        )));
    }
    if !entry.accepts(&attribute.data_type, attribute.kind) {
        return Err(Error::catalog(format!(
            "distance function '{}' does not accept type '{}' of attribute '{}'",
            entry.name, attribute.data_type, attribute.name
        )));
    }
    let mut dimension = None;
    let mut items = Vec::new();
    let mut nulls = Vec::new();
    for t in rel.scan() {
        let v = &t.values[column];
        if v.is_null() {
            nulls.push(t.row_id.0);
            continue;
        }
        check_dimension(&mut dimension, v)?;
        items.push((t.row_id.0, v.clone()));
    }
    let ctx = DistanceContext::default();
    let tree = VpTree::build(items, seed, |a, b| entry.evaluate(a, b, &params, &ctx))?;
    Ok(MetricIndex {
        name: Name::new(format!("{}_{}_metric", rel.name(), attribute.name)),
        attribute: attribute.name.clone(),
        column,
        distance: entry,
        params,
        tree,
        nulls,
        dimension,
    })
}

fn check_dimension(dimension: &mut Option<usize>, v: &Value) -> Result<()> {
    if let Some(vec) = v.as_vector() {
        match *dimension {
            Some(d) if d != vec.len() => {
                return Err(Error::runtime(format!(
                    "vector of dimension {} does not match the index dimension {d}",
                    vec.len()
                )))
            }
            _ => *dimension = Some(vec.len()),
        }
    }
    Ok(())
}

impl MetricIndex {
    pub fn with_name(mut self, name: &str) -> Self {
        self.name = Name::new(name);
        self
    }

    pub fn name(&self) -> &Name {
        &self.name
    }

    pub fn attribute(&self) -> &Name {
        &self.attribute
    }

    pub fn column(&self) -> usize {
        self.column
    }

    pub fn distance(&self) -> &Arc<DistanceFunctionEntry> {
        &self.distance
    }

    pub fn params(&self) -> &[Value] {
        &self.params
    }

    pub fn dimension(&self) -> Option<usize> {
        self.dimension
    }

    pub fn tree(&self) -> &VpTree<Value, Dist> {
        &self.tree
    }

    /// Whether this index measures with `entry` under `params`.
    pub fn serves(&self, entry: &DistanceFunctionEntry, params: &[Value]) -> bool {
        self.distance.name == entry.name && self.params == params
    }

    fn evaluator(&self) -> ValueDistance<'_> {
        let ctx = DistanceContext::default();
        Box::new(move |a, b| self.distance.evaluate(a, b, &self.params, &ctx))
    }

    pub fn check_insert(&self, v: &Value) -> Result<()> {
        let mut dim = self.dimension;
        check_dimension(&mut dim, v)
    }

    pub fn insert(&mut self, row: RowId, v: &Value) -> Result<()> {
        if v.is_null() {
            self.nulls.push(row.0);
            return Ok(());
        }
        check_dimension(&mut self.dimension, v)?;
        let ctx = DistanceContext::default();
        let (entry, params) = (&self.distance, &self.params);
        self.tree.insert(row.0, v.clone(), |a, b| entry.evaluate(a, b, params, &ctx))
    }

    /// Rows in ascending `(distance, row id)` order; null rows come last.
    pub fn nearest<'a>(&'a self, query: &'a Value, budget: ApproximationBudget) -> MetricNearest<'a> {
        let tail = if query.is_null() {
            let mut all: Vec<u64> = self.nulls.clone();
            all.extend(self.tree.leaves().into_iter().flatten());
            all.sort_unstable();
            all.dedup();
            all
        } else {
            self.nulls.clone()
        };
        MetricNearest {
            inner: (!query.is_null()).then(|| self.tree.nearest(query, budget, self.evaluator())),
            budget,
            tail,
            next_tail: 0,
        }
    }

    pub fn knn(&self, query: &Value, k: usize, budget: ApproximationBudget) -> Result<SearchOutcome<u64, Dist>> {
        if k < 1 {
            return Err(Error::runtime("k must be at least 1"));
        }
        let mut it = self.nearest(query, budget);
        let mut hits = Vec::new();
        while hits.len() < k {
            match it.next_hit()? {
                Some(h) => hits.push(h),
                None => break,
            }
        }
        Ok(SearchOutcome {
            hits,
            evaluations: it.evaluations(),
        })
    }

    pub fn range(&self, query: &Value, radius: Dist, budget: ApproximationBudget) -> Result<SearchOutcome<u64, Dist>> {
        if query.is_null() {
            if !(radius >= 0.0) {
                return Err(Error::runtime(format!("range radius must be non-negative, got {radius}")));
            }
            return Ok(SearchOutcome {
                hits: Vec::new(),
                evaluations: 0,
            });
        }
        self.tree.range(query, radius, budget, self.evaluator())
    }
}

/// Incremental traversal of a metric index, nulls appended at infinity.
pub struct MetricNearest<'a> {
    inner: Option<Nearest<'a, Value, Dist, ValueDistance<'a>>>,
    budget: ApproximationBudget,
    /// Rows at infinite distance, ascending.
    tail: Vec<u64>,
    next_tail: usize,
}

impl MetricNearest<'_> {
    pub fn evaluations(&self) -> usize {
        self.inner.as_ref().map_or(0, |i| i.evaluations()) + self.next_tail
    }

    pub fn next_hit(&mut self) -> Result<Option<(u64, Dist)>> {
        if let Some(inner) = &mut self.inner {
            if let Some(h) = inner.next_hit()? {
                return Ok(Some(h));
            }
        }
        if self.next_tail >= self.tail.len() || !self.budget.allows(self.evaluations()) {
            return Ok(None);
        }
        self.next_tail += 1;
        Ok(Some((self.tail[self.next_tail - 1], Dist::INFINITY)))
    }
}

/// Sorted array over one attribute of a totally ordered type.
#[derive(Clone, Debug)]
pub struct ValueOrderedIndex {
    name: Name,
    attribute: Name,
    column: usize,
    inner: OrderedIndex<Value>,
}

pub fn build_ordered_index(catalog: &Catalog, rel: &Relation, attr: &str) -> Result<ValueOrderedIndex> {
    let column = column_of(rel, attr)?;
    let attribute = &rel.schema().attributes()[column];
    let t = catalog
        .data_type(attribute.data_type.as_str())
        .ok_or_else(|| Error::catalog(format!("unknown data type '{}'", attribute.data_type)))?;
    let index = catalog
        .index(ORDERED_INDEX)
        .ok_or_else(|| Error::catalog("no ordered index is registered"))?;
    let missing = catalog.missing_requirements(&index, IndexTarget::DataType(t));
    if !missing.is_empty() {
        return Err(Error::catalog(format!(
            "ordered index on {}.{} requires a {}, which type '{}' lacks",
            rel.name(),
            attribute.name,
            missing.join(", "),
            t.id
        )));
    }
    let items = rel
        .scan()
        .filter(|t| !t.values[column].is_null())
        .map(|t| (t.row_id.0, t.values[column].clone()));
    Ok(ValueOrderedIndex {
        name: Name::new(format!("{}_{}_ordered", rel.name(), attribute.name)),
        attribute: attribute.name.clone(),
        column,
        inner: OrderedIndex::build(items, Value::total_cmp),
    })
}

impl ValueOrderedIndex {
    pub fn with_name(mut self, name: &str) -> Self {
        self.name = Name::new(name);
        self
    }

    pub fn name(&self) -> &Name {
        &self.name
    }

    pub fn attribute(&self) -> &Name {
        &self.attribute
    }

    pub fn column(&self) -> usize {
        self.column
    }

    pub fn len(&self) -> usize {
        self.inner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.is_empty()
    }

    pub fn insert(&mut self, row: RowId, v: &Value) {
        if !v.is_null() {
            self.inner.insert(row.0, v.clone());
        }
    }

    /// Rows with `value op probe`, ascending. A null probe matches nothing.
    pub fn ordered_lookup(&self, op: CompareOp, probe: &Value) -> Vec<RowId> {
        if probe.is_null() {
            return Vec::new();
        }
        self.inner.lookup(op, probe).into_iter().map(RowId).collect()
    }
}

#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)]
pub enum AttachedIndex {
    Metric(MetricIndex),
    Ordered(ValueOrderedIndex),
}

impl AttachedIndex {
    pub fn name(&self) -> &Name {
        match self {
            AttachedIndex::Metric(i) => i.name(),
            AttachedIndex::Ordered(i) => i.name(),
        }
    }

    pub fn column(&self) -> usize {
        match self {
            AttachedIndex::Metric(i) => i.column(),
            AttachedIndex::Ordered(i) => i.column(),
        }
    }

    pub fn attribute(&self) -> &Name {
        match self {
            AttachedIndex::Metric(i) => i.attribute(),
            AttachedIndex::Ordered(i) => i.attribute(),
        }
    }

    pub fn kind(&self) -> IndexKind {
        match self {
            AttachedIndex::Metric(_) => IndexKind::Metric,
            AttachedIndex::Ordered(_) => IndexKind::Ordered,
        }
    }

    pub fn check_insert(&self, v: &Value) -> Result<()> {
        match self {
            AttachedIndex::Metric(i) => i.check_insert(v),
            AttachedIndex::Ordered(_) => Ok(()),
        }
    }

    pub fn insert(&mut self, row: RowId, v: &Value) -> Result<()> {
        match self {
            AttachedIndex::Metric(i) => i.insert(row, v),
            AttachedIndex::Ordered(i) => {
                i.insert(row, v);
                Ok(())
            }
        }
    }
}
