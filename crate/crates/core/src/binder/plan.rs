//! Bound logical plans.

use std::sync::Arc;

use super::schema::{ColumnOrigin, RowSchema, Ty};
use crate::catalog::{
    AggregatedDistanceEntry, DistanceFunctionEntry, ExtractorEntry, SearchMethod, SearchMethodEntry,
    SetDistanceEntry,
};
use crate::datamodel::ops::AggregateSpec;
use crate::datamodel::{Name, Value};
use crate::indexes::{ApproximationBudget, CompareOp};
use crate::parser::{BinaryOp, UnaryOp};
use crate::Dist;

/// Expression over the input row of the node that owns it.
#[derive(Clone, Debug)]
pub enum BoundExpr {
    Literal(Value),
    Column(usize),
    /// Value of the i-th query object of the enclosing search.
    QueryObject(usize),
    Unary {
        op: UnaryOp,
        expr: Box<BoundExpr>,
    },
    Binary {
        op: BinaryOp,
        left: Box<BoundExpr>,
        right: Box<BoundExpr>,
    },
    IsNull {
        expr: Box<BoundExpr>,
        negated: bool,
    },
    /// Element distance between two operands.
    Distance(Box<DistanceCall>),
    SetDistance {
        entry: Arc<SetDistanceEntry>,
        args: Vec<BoundExpr>,
    },
    /// `(distance, weight)` parts combined by an aggregated distance.
    Aggregated {
        entry: Arc<AggregatedDistanceEntry>,
        parts: Vec<(BoundExpr, BoundExpr)>,
    },
    Extract {
        entry: Arc<ExtractorEntry>,
        arg: Box<BoundExpr>,
    },
    /// Membership in the first column of an uncorrelated subquery.
    InSubquery {
        expr: Box<BoundExpr>,
        plan: Arc<Plan>,
        negated: bool,
        id: usize,
    },
    /// First column of the single row of an uncorrelated subquery.
    ScalarSubquery {
        plan: Arc<Plan>,
        id: usize,
    },
}

#[derive(Clone, Debug)]
pub struct DistanceCall {
    pub entry: Arc<DistanceFunctionEntry>,
    pub params: Vec<Value>,
    pub left: BoundExpr,
    pub right: BoundExpr,
    /// Column whose document statistics the function may consult.
    pub corpus: Option<ColumnOrigin>,
}

impl BoundExpr {
    pub fn boxed(self) -> Box<BoundExpr> {
        Box::new(self)
    }

    /// Splits a conjunction into its conjuncts.
    pub fn conjuncts(&self) -> Vec<&BoundExpr> {
        match self {
            BoundExpr::Binary {
                op: BinaryOp::And,
                left,
                right,
            } => {
                let mut v = left.conjuncts();
                v.extend(right.conjuncts());
                v
            }
            e => vec![e],
        }
    }

    /// Whether the expression reads no row column and no query object.
    pub fn is_constant(&self) -> bool {
        match self {
            BoundExpr::Literal(_) => true,
            BoundExpr::Column(_) | BoundExpr::QueryObject(_) => false,
            BoundExpr::Unary { expr, .. } | BoundExpr::IsNull { expr, .. } => expr.is_constant(),
            BoundExpr::Binary { left, right, .. } => left.is_constant() && right.is_constant(),
            BoundExpr::Distance(c) => c.left.is_constant() && c.right.is_constant(),
            BoundExpr::SetDistance { args, .. } => args.iter().all(BoundExpr::is_constant),
            BoundExpr::Aggregated { parts, .. } => parts.iter().all(|(d, w)| d.is_constant() && w.is_constant()),
            BoundExpr::Extract { arg, .. } => arg.is_constant(),
            BoundExpr::InSubquery { expr, .. } => expr.is_constant(),
            BoundExpr::ScalarSubquery { .. } => true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Plan {
    pub node: PlanNode,
    pub schema: RowSchema,
}

#[derive(Clone, Debug)]
pub enum PlanNode {
    Scan(ScanNode),
    SimSearch(Box<SimSearchNode>),
    Join {
        left: Box<Plan>,
        right: Box<Plan>,
        condition: JoinCondition,
    },
    Filter {
        input: Box<Plan>,
        predicate: BoundExpr,
        text: String,
    },
    /// Output: group keys, then one column per aggregate.
    Aggregate {
        input: Box<Plan>,
        group_by: Vec<BoundExpr>,
        aggregates: Vec<BoundAggregate>,
        text: String,
    },
    Sort {
        input: Box<Plan>,
        keys: Vec<SortKey>,
        text: String,
    },
    Project {
        input: Box<Plan>,
        exprs: Vec<BoundExpr>,
    },
    Distinct {
        input: Box<Plan>,
    },
    Limit {
        input: Box<Plan>,
        n: usize,
    },
}

impl Plan {
    pub fn children(&self) -> Vec<&Plan> {
        match &self.node {
            PlanNode::Scan(_) => vec![],
            PlanNode::SimSearch(s) => s.sources.iter().collect(),
            PlanNode::Join { left, right, .. } => vec![left, right],
            PlanNode::Filter { input, .. }
            | PlanNode::Aggregate { input, .. }
            | PlanNode::Sort { input, .. }
            | PlanNode::Project { input, .. }
            | PlanNode::Distinct { input }
            | PlanNode::Limit { input, .. } => vec![input],
        }
    }

    /// Every search node of the tree, pre-order. Subqueries inside
    /// expressions are not visited.
    pub fn searches(&self) -> Vec<&SimSearchNode> {
        let mut out = Vec::new();
        if let PlanNode::SimSearch(s) = &self.node {
            out.push(&**s);
        }
        for c in self.children() {
            out.extend(c.searches());
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct ScanNode {
    pub relation: Name,
    pub alias: Option<Name>,
    pub access: ScanAccess,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ScanAccess {
    Full,
    /// Rows whose attribute satisfies `op probe`, via an ordered index.
    Ordered {
        index: Name,
        attribute: Name,
        op: CompareOp,
        probe: Value,
    },
}

#[derive(Clone, Debug)]
pub enum JoinCondition {
    Cross,
    On { predicate: BoundExpr, text: String },
    /// Equality on pairs (left column, right column), right columns counted
    /// within the right input.
    Natural(Vec<(usize, usize)>),
}

#[derive(Clone, Debug)]
pub struct BoundAggregate {
    pub spec: AggregateSpec,
    pub argument: Option<BoundExpr>,
}

#[derive(Clone, Debug)]
pub struct SortKey {
    pub expr: BoundExpr,
    pub descending: bool,
}

/// The three ways a search measures distance.
#[derive(Clone, Debug)]
pub enum BoundDistanceSpec {
    /// `BY attr`: the attribute's default distance.
    AttributeDefault {
        column: usize,
        attribute: Name,
        entry: Arc<DistanceFunctionEntry>,
        params: Vec<Value>,
        corpus: Option<ColumnOrigin>,
    },
    /// `BY attr DISTANCE FUNCTION f(args)`.
    AttributeNamed {
        column: usize,
        attribute: Name,
        entry: Arc<DistanceFunctionEntry>,
        params: Vec<Value>,
        corpus: Option<ColumnOrigin>,
    },
    /// Any distance expression over query objects and source columns.
    Expression(BoundExpr),
}

impl BoundDistanceSpec {
    /// `(column, entry, params)` of the attribute forms.
    pub fn attribute(&self) -> Option<(usize, &Arc<DistanceFunctionEntry>, &[Value])> {
        match self {
            BoundDistanceSpec::AttributeDefault {
                column, entry, params, ..
            }
            | BoundDistanceSpec::AttributeNamed {
                column, entry, params, ..
            } => Some((*column, entry, params)),
            BoundDistanceSpec::Expression(_) => None,
        }
    }
}

#[derive(Clone, Debug)]
pub enum QueryObjectSource {
    /// Constant expression, evaluated once when execution starts.
    Value(BoundExpr),
    /// Nested query whose first column yields the objects.
    Subquery(Box<Plan>),
}

#[derive(Clone, Debug)]
pub struct BoundQueryObject {
    pub alias: Option<Name>,
    pub source: QueryObjectSource,
    pub ty: Ty,
}

/// Selection semantics a search is executed with.
#[derive(Clone, Debug)]
pub enum Semantics {
    /// Nearest neighbours: the k best, or every candidate ranked.
    Knn(Option<usize>),
    Range {
        radius: Dist,
        budget: ApproximationBudget,
    },
    SimilarityJoin {
        threshold: Dist,
    },
    ReverseKnn {
        k: usize,
    },
    DistinctKnn {
        k: usize,
        column: usize,
    },
    Custom(Arc<dyn SearchMethod>),
}

/// Rewrite applied by the optimizer.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Rewrite {
    /// Distance filter pushed into the search as a range query.
    R1 { radius: Dist },
    /// TOP n pushed into the search as a kNN query.
    R2 { k: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub enum SearchAccess {
    Sequential,
    /// Metric index on the single source relation.
    MetricIndex {
        relation: Name,
        attribute: Name,
        index: Name,
        distance: Name,
    },
    /// Similarity join probing a metric index on the right source per
    /// left row.
    IndexNestedLoop {
        relation: Name,
        attribute: Name,
        index: Name,
        distance: Name,
        left_column: usize,
    },
}

#[derive(Clone, Debug)]
pub struct SimSearchNode {
    pub sources: Vec<Plan>,
    pub objects: Vec<BoundQueryObject>,
    pub spec: BoundDistanceSpec,
    pub method: Arc<SearchMethodEntry>,
    pub method_params: Vec<Value>,
    pub semantics: Semantics,
    pub rewrite: Option<Rewrite>,
    pub access: SearchAccess,
    pub alias: Option<Name>,
    pub by_text: String,
    pub method_text: String,
}

impl SimSearchNode {
    /// Width of the concatenated source rows; the distance column follows.
    pub fn source_width(&self) -> usize {
        self.sources.iter().map(|s| s.schema.len()).sum()
    }

    pub fn distance_column(&self) -> usize {
        self.source_width()
    }

    pub fn rank_column(&self) -> usize {
        self.source_width() + 1
    }
}
