//! Rule-based rewrites and access-path selection.

use std::sync::Arc;

use super::{OptimizerOptions, PhysicalPlan};
use crate::binder::{
    BoundDistanceSpec, BoundExpr, BoundPlan, Plan, PlanNode, QueryObjectSource, Rewrite, ScanAccess, SearchAccess,
    Semantics, SimSearchNode,
};
use crate::catalog::{Catalog, DistanceFunctionEntry, IndexTarget, METRIC_INDEX};
use crate::datamodel::{Database, Value};
use crate::indexes::{AttachedIndex, CompareOp};
use crate::parser::{BinaryOp, UnaryOp};
use crate::Dist;

pub fn optimize(plan: &BoundPlan, catalog: &Catalog, db: &Database, opts: &OptimizerOptions) -> PhysicalPlan {
    let mut root = plan.root.clone();
    let o = Optimizer { catalog, db, opts };
    o.plan(&mut root);
    PhysicalPlan {
        root,
        columns: plan.columns.clone(),
    }
}

struct Optimizer<'a> {
    catalog: &'a Catalog,
    db: &'a Database,
    opts: &'a OptimizerOptions,
}

/// Numeric value of a constant expression, if it is a literal number.
fn literal_number(e: &BoundExpr) -> Option<f64> {
    match e {
        BoundExpr::Literal(v) => v.as_f64(),
        BoundExpr::Unary {
            op: UnaryOp::Neg,
            expr,
        } => literal_number(expr).map(|v| -v),
        _ => None,
    }
}

/// Radius implied by a conjunct `distance <= r`, `distance < r` or the
/// flipped forms, over the distance column `dc`.
fn radius_bound(conjunct: &BoundExpr, dc: usize) -> Option<Dist> {
    let BoundExpr::Binary { op, left, right } = conjunct else {
        return None;
    };
    let r = match (op, left.as_ref(), right.as_ref()) {
        (BinaryOp::Le | BinaryOp::Lt, BoundExpr::Column(c), r) if *c == dc => literal_number(r)?,
        (BinaryOp::Ge | BinaryOp::Gt, l, BoundExpr::Column(c)) if *c == dc => literal_number(l)?,
        _ => return None,
    };
    (r.is_finite() && r >= 0.0).then_some(r)
}

fn is_plain_nn(s: &SimSearchNode) -> bool {
    matches!(s.semantics, Semantics::Knn(None)) && s.rewrite.is_none()
}

/// Column, distance and parameters the search measures with when a metric
/// index on one attribute could serve it: an attribute spec, or a single
/// `DISTANCE(query object, column)` expression, with one static query object
/// and one source.
pub(crate) fn indexed_operand(s: &SimSearchNode) -> Option<(usize, Arc<DistanceFunctionEntry>, Vec<Value>)> {
    if s.sources.len() != 1 || s.objects.len() != 1 {
        return None;
    }
    if !matches!(s.objects[0].source, QueryObjectSource::Value(_)) {
        return None;
    }
    match &s.spec {
        BoundDistanceSpec::Expression(BoundExpr::Distance(call)) => {
            match (&call.left, &call.right) {
                (BoundExpr::QueryObject(0), BoundExpr::Column(c)) | (BoundExpr::Column(c), BoundExpr::QueryObject(0)) => {
                    Some((*c, call.entry.clone(), call.params.clone()))
                }
                _ => None,
            }
        }
        spec => spec
            .attribute()
            .map(|(c, entry, params)| (c, entry.clone(), params.to_vec())),
    }
}

fn full_scan_relation(p: &Plan) -> Option<&crate::datamodel::Name> {
    match &p.node {
        PlanNode::Scan(s) if s.access == ScanAccess::Full => Some(&s.relation),
        _ => None,
    }
}

fn compare_op(op: BinaryOp) -> Option<CompareOp> {
    Some(match op {
        BinaryOp::Eq => CompareOp::Eq,
        BinaryOp::Lt => CompareOp::Lt,
        BinaryOp::Le => CompareOp::Le,
        BinaryOp::Gt => CompareOp::Gt,
        BinaryOp::Ge => CompareOp::Ge,
        _ => return None,
    })
}

impl Optimizer<'_> {
    fn plan(&self, p: &mut Plan) {
        self.children(p);
        self.rewrite(p);
        self.access(p);
    }

    fn children(&self, p: &mut Plan) {
        match &mut p.node {
            PlanNode::Scan(_) => {}
            PlanNode::SimSearch(s) => {
                for src in &mut s.sources {
                    self.plan(src);
                }
                for o in &mut s.objects {
                    match &mut o.source {
                        QueryObjectSource::Value(e) => self.expr(e),
                        QueryObjectSource::Subquery(q) => self.plan(q),
                    }
                }
                if let BoundDistanceSpec::Expression(e) = &mut s.spec {
                    self.expr(e);
                }
            }
            PlanNode::Join {
                left,
                right,
                condition,
            } => {
                self.plan(left);
                self.plan(right);
                if let crate::binder::JoinCondition::On { predicate, .. } = condition {
                    self.expr(predicate);
                }
            }
            PlanNode::Filter { input, predicate, .. } => {
                self.plan(input);
                self.expr(predicate);
            }
            PlanNode::Aggregate {
                input,
                group_by,
                aggregates,
                ..
            } => {
                self.plan(input);
                group_by.iter_mut().for_each(|e| self.expr(e));
                for a in aggregates {
                    if let Some(e) = &mut a.argument {
                        self.expr(e);
                    }
                }
            }
            PlanNode::Sort { input, keys, .. } => {
                self.plan(input);
                keys.iter_mut().for_each(|k| self.expr(&mut k.expr));
            }
            PlanNode::Project { input, exprs } => {
                self.plan(input);
                exprs.iter_mut().for_each(|e| self.expr(e));
            }
            PlanNode::Distinct { input } | PlanNode::Limit { input, .. } => self.plan(input),
        }
    }

    /// Optimizes the subqueries nested in an expression.
    fn expr(&self, e: &mut BoundExpr) {
        match e {
            BoundExpr::Literal(_) | BoundExpr::Column(_) | BoundExpr::QueryObject(_) => {}
            BoundExpr::Unary { expr, .. } | BoundExpr::IsNull { expr, .. } => self.expr(expr),
            BoundExpr::Binary { left, right, .. } => {
                self.expr(left);
                self.expr(right);
            }
            BoundExpr::Distance(c) => {
                self.expr(&mut c.left);
                self.expr(&mut c.right);
            }
            BoundExpr::SetDistance { args, .. } => args.iter_mut().for_each(|a| self.expr(a)),
            BoundExpr::Aggregated { parts, .. } => {
                for (d, w) in parts {
                    self.expr(d);
                    self.expr(w);
                }
            }
            BoundExpr::Extract { arg, .. } => self.expr(arg),
            BoundExpr::InSubquery { expr, plan, .. } => {
                self.expr(expr);
                let mut inner = (**plan).clone();
                self.plan(&mut inner);
                *plan = Arc::new(inner);
            }
            BoundExpr::ScalarSubquery { plan, .. } => {
                let mut inner = (**plan).clone();
                self.plan(&mut inner);
                *plan = Arc::new(inner);
            }
        }
    }

    fn rewrite(&self, p: &mut Plan) {
        match &mut p.node {
            PlanNode::Filter { input, predicate, .. } if self.opts.r1 => {
                let PlanNode::SimSearch(s) = &mut input.node else { return };
                if !is_plain_nn(s) {
                    return;
                }
                let dc = s.distance_column();
                let r = predicate
                    .conjuncts()
                    .into_iter()
                    .filter_map(|c| radius_bound(c, dc))
                    .min_by(|a, b| a.total_cmp(b));
                if let Some(radius) = r {
                    s.semantics = Semantics::Range {
                        radius,
                        budget: crate::indexes::ApproximationBudget::UNLIMITED,
                    };
                    s.rewrite = Some(Rewrite::R1 { radius });
                    self.search_access(s);
                }
            }
            PlanNode::Limit { input, n } if self.opts.r2 && *n >= 1 => {
                let PlanNode::Project { input: below, .. } = &mut input.node else { return };
                let search = match &mut below.node {
                    PlanNode::SimSearch(s) => s,
                    PlanNode::Sort { input: sorted, keys, .. } => {
                        let PlanNode::SimSearch(s) = &mut sorted.node else { return };
                        let by_distance = matches!(
                            keys.as_slice(),
                            [k] if !k.descending && matches!(k.expr, BoundExpr::Column(c) if c == s.distance_column())
                        );
                        if !by_distance {
                            return;
                        }
                        s
                    }
                    _ => return,
                };
                if is_plain_nn(search) {
                    search.semantics = Semantics::Knn(Some(*n));
                    search.rewrite = Some(Rewrite::R2 { k: *n });
                    self.search_access(search);
                }
            }
            _ => {}
        }
    }

    fn access(&self, p: &mut Plan) {
        match &mut p.node {
            PlanNode::SimSearch(s) => self.search_access(s),
            PlanNode::Filter { input, predicate, .. } if self.opts.use_indexes => {
                let PlanNode::Scan(scan) = &mut input.node else { return };
                if scan.access != ScanAccess::Full {
                    return;
                }
                let Ok(rel) = self.db.read(scan.relation.as_str()) else { return };
                for c in predicate.conjuncts() {
                    let BoundExpr::Binary { op, left, right } = c else { continue };
                    let Some(op) = compare_op(*op) else { continue };
                    let (col, probe, op) = match (left.as_ref(), right.as_ref()) {
                        (BoundExpr::Column(col), BoundExpr::Literal(v)) => (*col, v, op),
                        (BoundExpr::Literal(v), BoundExpr::Column(col)) => (*col, v, op.flipped()),
                        _ => continue,
                    };
                    let attr = &rel.schema().attributes()[col];
                    let fits = probe
                        .kind()
                        .is_some_and(|k| k.fits(attr.kind) || (k.is_numeric() && attr.kind.is_numeric()));
                    if !fits {
                        continue;
                    }
                    let found = rel.indexes().iter().find_map(|i| match i {
                        AttachedIndex::Ordered(o) if o.column() == col => Some(o.name().clone()),
                        _ => None,
                    });
                    if let Some(index) = found {
                        scan.access = ScanAccess::Ordered {
                            index,
                            attribute: attr.name.clone(),
                            op,
                            probe: probe.clone(),
                        };
                        return;
                    }
                }
            }
            _ => {}
        }
    }

    fn search_access(&self, s: &mut SimSearchNode) {
        s.access = SearchAccess::Sequential;
        if !self.opts.use_indexes {
            return;
        }
        match &s.semantics {
            Semantics::Knn(Some(_)) | Semantics::ReverseKnn { .. } | Semantics::DistinctKnn { .. } => {}
            Semantics::Range { radius, .. } if radius.is_finite() => {}
            Semantics::SimilarityJoin { threshold } if threshold.is_finite() => {
                self.join_access(s);
                return;
            }
            _ => return,
        }
        let Some((column, entry, params)) = indexed_operand(s) else { return };
        let Some(relation) = full_scan_relation(&s.sources[0]) else { return };
        if let Some(idx) = self.find_metric(relation.as_str(), column, &entry, &params) {
            s.access = SearchAccess::MetricIndex {
                relation: relation.clone(),
                attribute: idx.0,
                index: idx.1,
                distance: entry.name.clone(),
            };
        }
    }

    fn join_access(&self, s: &mut SimSearchNode) {
        if s.sources.len() != 2 {
            return;
        }
        let (Some(_), Some(right)) = (full_scan_relation(&s.sources[0]), full_scan_relation(&s.sources[1])) else {
            return;
        };
        let BoundDistanceSpec::Expression(BoundExpr::Distance(call)) = &s.spec else { return };
        let width = s.sources[0].schema.len();
        let (a, b) = match (&call.left, &call.right) {
            (BoundExpr::Column(a), BoundExpr::Column(b)) => (*a, *b),
            _ => return,
        };
        let (left_column, right_column) = match (a < width, b < width) {
            (true, false) => (a, b - width),
            (false, true) => (b, a - width),
            _ => return,
        };
        if let Some(idx) = self.find_metric(right.as_str(), right_column, &call.entry, &call.params) {
            s.access = SearchAccess::IndexNestedLoop {
                relation: right.clone(),
                attribute: idx.0,
                index: idx.1,
                distance: call.entry.name.clone(),
                left_column,
            };
        }
    }

    fn eligible(&self, entry: &DistanceFunctionEntry, params: &[Value]) -> bool {
        self.catalog
            .index(METRIC_INDEX)
            .is_some_and(|index| self.catalog.check_index_eligibility(&index, IndexTarget::Distance { entry, params }))
    }

    /// `(attribute, index name)` of a metric index on `relation.column`
    /// measuring with `entry` under `params`.
    fn find_metric(
        &self,
        relation: &str,
        column: usize,
        entry: &DistanceFunctionEntry,
        params: &[Value],
    ) -> Option<(crate::datamodel::Name, crate::datamodel::Name)> {
        let rel = self.db.read(relation).ok()?;
        rel.indexes().iter().find_map(|i| match i {
            AttachedIndex::Metric(m) if m.column() == column && m.serves(entry, params) && self.eligible(entry, params) => {
                Some((m.attribute().clone(), m.name().clone()))
            }
            _ => None,
        })
    }
}

