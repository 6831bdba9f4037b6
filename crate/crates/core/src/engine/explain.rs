//! Indented text rendering of physical plans.

use std::fmt::Write;

use super::PhysicalPlan;
use crate::binder::{
    BoundDistanceSpec, BoundExpr, JoinCondition, Plan, PlanNode, QueryObjectSource, Rewrite, ScanAccess, SearchAccess,
    Semantics, SimSearchNode,
};
use crate::datamodel::format_significant;

pub fn explain(plan: &PhysicalPlan) -> String {
    let mut out = String::new();
    node(&plan.root, 0, None, &mut out);
    out
}

fn indent(depth: usize, out: &mut String) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

fn number(v: f64) -> String {
    format_significant(v, 6)
}

fn column_list(p: &Plan) -> String {
    p.schema
        .columns
        .iter()
        .map(|c| c.name.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Renders `p` at `depth`; `suffix` is appended to its first line (the
/// output columns of a projection folded into its input).
fn node(p: &Plan, depth: usize, suffix: Option<String>, out: &mut String) {
    if let PlanNode::Project { input, .. } = &p.node {
        let cols = format!(" -> ({})", column_list(p));
        node(input, depth, Some(cols), out);
        return;
    }
    indent(depth, out);
    let mut children: Vec<&Plan> = Vec::new();
    let mut exprs: Vec<&BoundExpr> = Vec::new();
    match &p.node {
        PlanNode::Scan(s) => {
            out.push_str("scan ");
            out.push_str(s.relation.as_str());
            if let Some(a) = &s.alias {
                let _ = write!(out, " as {a}");
            }
            if let ScanAccess::Ordered {
                attribute, op, probe, ..
            } = &s.access
            {
                let _ = write!(out, " via ordered-index({}.{attribute}) {} {probe}", s.relation, op.symbol());
            }
        }
        PlanNode::SimSearch(s) => {
            search_line(s, out);
            children.extend(s.sources.iter());
            for o in &s.objects {
                match &o.source {
                    QueryObjectSource::Value(e) => exprs.push(e),
                    QueryObjectSource::Subquery(q) => children.push(q),
                }
            }
            if let BoundDistanceSpec::Expression(e) = &s.spec {
                exprs.push(e);
            }
        }
        PlanNode::Join {
            left,
            right,
            condition,
        } => {
            match condition {
                JoinCondition::Cross => out.push_str("join cross"),
                JoinCondition::On { predicate, text } => {
                    let _ = write!(out, "join on {text}");
                    exprs.push(predicate);
                }
                JoinCondition::Natural(pairs) => {
                    let names: Vec<String> = pairs.iter().map(|&(i, _)| left.schema.columns[i].name.to_string()).collect();
                    let _ = write!(out, "join natural({})", names.join(", "));
                }
            }
            children.push(left);
            children.push(right);
        }
        PlanNode::Filter { input, predicate, text } => {
            let _ = write!(out, "filter {text}");
            children.push(input);
            exprs.push(predicate);
        }
        PlanNode::Aggregate {
            input,
            text,
            group_by,
            aggregates,
        } => {
            let _ = write!(out, "aggregate {text}");
            children.push(input);
            exprs.extend(group_by.iter());
            exprs.extend(aggregates.iter().filter_map(|a| a.argument.as_ref()));
        }
        PlanNode::Sort { input, text, keys } => {
            let _ = write!(out, "sort {text}");
            children.push(input);
            exprs.extend(keys.iter().map(|k| &k.expr));
        }
        PlanNode::Distinct { input } => {
            out.push_str("distinct");
            children.push(input);
        }
        PlanNode::Limit { input, n } => {
            let _ = write!(out, "limit {n}");
            children.push(input);
        }
        PlanNode::Project { .. } => unreachable!("projections are folded"),
    }
    if let Some(s) = suffix {
        out.push_str(&s);
    }
    out.push('\n');
    for c in children {
        node(c, depth + 1, None, out);
    }
    let mut subqueries = Vec::new();
    for e in exprs {
        collect_subqueries(e, &mut subqueries);
    }
    for (id, plan) in subqueries {
        indent(depth + 1, out);
        let _ = writeln!(out, "subquery {id}");
        node(plan, depth + 2, None, out);
    }
}

fn search_line(s: &SimSearchNode, out: &mut String) {
    let _ = write!(out, "simsearch {} objects={} by {}", s.method_text, s.objects.len(), s.by_text);
    if let Some(a) = &s.alias {
        let _ = write!(out, " as {a}");
    }
    if let Semantics::Range { budget, .. } = &s.semantics {
        if !budget.is_unlimited() {
            let _ = write!(out, " budget={budget}");
        }
    }
    match s.rewrite {
        Some(Rewrite::R1 { radius }) => {
            let _ = write!(out, " rewrite:R1 range({})", number(radius));
        }
        Some(Rewrite::R2 { k }) => {
            let _ = write!(out, " rewrite:R2 knn({k})");
        }
        None => {}
    }
    match &s.access {
        SearchAccess::Sequential => out.push_str(" via seq-scan"),
        SearchAccess::MetricIndex {
            relation,
            attribute,
            distance,
            ..
        } => {
            let _ = write!(out, " via metric-index({relation}.{attribute}, {distance})");
        }
        SearchAccess::IndexNestedLoop {
            relation,
            attribute,
            distance,
            ..
        } => {
            let _ = write!(out, " via index-nested-loop({relation}.{attribute}, {distance})");
        }
    }
}

fn collect_subqueries<'p>(e: &'p BoundExpr, out: &mut Vec<(usize, &'p Plan)>) {
    match e {
        BoundExpr::Literal(_) | BoundExpr::Column(_) | BoundExpr::QueryObject(_) => {}
        BoundExpr::Unary { expr, .. } | BoundExpr::IsNull { expr, .. } | BoundExpr::Extract { arg: expr, .. } => {
            collect_subqueries(expr, out)
        }
        BoundExpr::Binary { left, right, .. } => {
            collect_subqueries(left, out);
            collect_subqueries(right, out);
        }
        BoundExpr::Distance(c) => {
            collect_subqueries(&c.left, out);
            collect_subqueries(&c.right, out);
        }
        BoundExpr::SetDistance { args, .. } => args.iter().for_each(|a| collect_subqueries(a, out)),
        BoundExpr::Aggregated { parts, .. } => {
            for (d, w) in parts {
                collect_subqueries(d, out);
                collect_subqueries(w, out);
            }
        }
        BoundExpr::InSubquery { expr, plan, id, .. } => {
            collect_subqueries(expr, out);
            out.push((*id, plan));
        }
        BoundExpr::ScalarSubquery { plan, id } => out.push((*id, plan)),
    }
}
