//! Plan execution.

use std::collections::HashMap;
use std::rc::Rc;
use std::sync::Arc;

use crate::binder::{ColumnOrigin, JoinCondition, Plan, PlanNode, ScanAccess, ScanNode};
use crate::datamodel::ops::{self, Row};
use crate::datamodel::{Database, Name, Value};
use crate::error::Result;
use crate::functions::tfidf::TextCorpus;
use crate::indexes::AttachedIndex;

pub(crate) struct Executor<'a> {
    pub db: &'a Database,
    /// First column of every uncorrelated subquery evaluated so far.
    subqueries: HashMap<usize, Rc<Vec<Value>>>,
    corpora: HashMap<(Name, usize), Option<Arc<TextCorpus>>>,
    pub notices: Vec<String>,
}

impl<'a> Executor<'a> {
    pub fn new(db: &'a Database) -> Self {
        Executor {
            db,
            subqueries: HashMap::new(),
            corpora: HashMap::new(),
            notices: Vec::new(),
        }
    }

    pub fn subquery_column(&mut self, id: usize, plan: &Plan) -> Result<Rc<Vec<Value>>> {
        if let Some(v) = self.subqueries.get(&id) {
            return Ok(v.clone());
        }
        let rows = self.run(plan)?;
        let values = Rc::new(rows.into_iter().map(|mut r| r.swap_remove(0)).collect::<Vec<_>>());
        self.subqueries.insert(id, values.clone());
        Ok(values)
    }

    pub fn corpus(&mut self, origin: &ColumnOrigin) -> Result<Option<Arc<TextCorpus>>> {
        let key = (origin.relation.clone(), origin.column);
        if let Some(c) = self.corpora.get(&key) {
            return Ok(c.clone());
        }
        let c = self.db.read(origin.relation.as_str())?.corpus(origin.column);
        self.corpora.insert(key, c.clone());
        Ok(c)
    }

    pub fn run(&mut self, plan: &Plan) -> Result<Vec<Row>> {
        match &plan.node {
            PlanNode::Scan(scan) => self.scan(scan),
            PlanNode::SimSearch(node) => self.search(node),
            PlanNode::Join {
                left,
                right,
                condition,
            } => {
                let l = self.run(left)?;
                let r = self.run(right)?;
                match condition {
                    JoinCondition::Cross => Ok(ops::cartesian(&l, &r)),
                    JoinCondition::On { predicate, .. } => {
                        let mut out = Vec::new();
                        for a in &l {
                            for b in &r {
                                let row = ops::concat(a, b);
                                if self.holds(predicate, &row)? {
                                    out.push(row);
                                }
                            }
                        }
                        Ok(out)
                    }
                    JoinCondition::Natural(pairs) => {
                        let mut out = Vec::new();
                        for a in &l {
                            for b in &r {
                                let equal = pairs
                                    .iter()
                                    .all(|&(i, j)| a[i].sql_compare(&b[j]) == Some(std::cmp::Ordering::Equal));
                                if equal {
                                    out.push(ops::concat(a, b));
                                }
                            }
                        }
                        Ok(out)
                    }
                }
            }
            PlanNode::Filter { input, predicate, .. } => {
                let rows = self.run(input)?;
                ops::filter(rows, |r| self.holds(predicate, r))
            }
            PlanNode::Aggregate {
                input,
                group_by,
                aggregates,
                ..
            } => {
                let rows = self.run(input)?;
                let specs: Vec<_> = aggregates.iter().map(|a| a.spec).collect();
                // Per row: group keys, then aggregate arguments.
                let mut keyed = Vec::with_capacity(rows.len());
                for r in &rows {
                    let mut vals = Vec::with_capacity(group_by.len() + aggregates.len());
                    for g in group_by {
                        vals.push(self.eval(g, r, &[])?);
                    }
                    for a in aggregates {
                        vals.push(match &a.argument {
                            Some(e) => self.eval(e, r, &[])?,
                            None => Value::Null,
                        });
                    }
                    keyed.push(vals);
                }
                let n = group_by.len();
                ops::group_aggregate(
                    &keyed,
                    group_by.is_empty(),
                    &specs,
                    |r| Ok(r[..n].to_vec()),
                    |r, i| Ok(r[n + i].clone()),
                )
            }
            PlanNode::Sort { input, keys, .. } => {
                let rows = self.run(input)?;
                let descending: Vec<bool> = keys.iter().map(|k| k.descending).collect();
                ops::sort(rows, &descending, |r| keys.iter().map(|k| self.eval(&k.expr, r, &[])).collect())
            }
            PlanNode::Project { input, exprs } => {
                let rows = self.run(input)?;
                ops::project(&rows, |r| exprs.iter().map(|e| self.eval(e, r, &[])).collect())
            }
            PlanNode::Distinct { input } => Ok(ops::distinct(self.run(input)?)),
            PlanNode::Limit { input, n } => Ok(ops::top_n(self.run(input)?, *n)),
        }
    }

    fn scan(&mut self, scan: &ScanNode) -> Result<Vec<Row>> {
        let rel = self.db.read(scan.relation.as_str())?;
        if let ScanAccess::Ordered { index, op, probe, .. } = &scan.access {
            let found = rel.indexes().iter().find_map(|i| match i {
                AttachedIndex::Ordered(o) if o.name() == index => Some(o),
                _ => None,
            });
            if let Some(o) = found {
                let mut positions: Vec<usize> = o
                    .ordered_lookup(*op, probe)
                    .into_iter()
                    .filter_map(|id| rel.position_of(id))
                    .collect();
                positions.sort_unstable();
                let tuples = rel.tuples();
                return Ok(positions.into_iter().map(|p| tuples[p].values.clone()).collect());
            }
        }
        Ok(rel.scan().map(|t| t.values.clone()).collect())
    }
}
