use std::sync::Arc;

use super::plan::*;
use super::schema::{ColumnInfo, ColumnRole, RowSchema, Ty, DISTANCE_COLUMN, RANK_COLUMN};
use super::ParamBinding;
use crate::catalog::{
    bind_params, Catalog, DistanceFunctionEntry, MethodKind, ParamKind, DEFAULT_METHOD, IDENTITY_DISTANCE,
};
use crate::datamodel::ops::{AggregateFunc, AggregateSpec};
use crate::datamodel::{Database, Name, Value, ValueKind};
use crate::error::{Error, Pos, Result};
use crate::indexes::ApproximationBudget;
use crate::parser::{
    print_expr, BinaryOp, BySpec, Call, ColumnRef, Expr, FromItem, Ident, JoinKind, Limit, Literal, Query, SelectItem,
    SimSearch, UnaryOp,
};
use crate::Dist;

/// A bound expression with its static type. `column` is set when the
/// expression is a plain column reference.
struct Typed {
    expr: BoundExpr,
    ty: Ty,
    column: Option<ColumnInfo>,
}

impl Typed {
    fn new(expr: BoundExpr, ty: Ty) -> Self {
        Typed { expr, ty, column: None }
    }
}

struct ObjectInfo {
    alias: Option<Name>,
    ty: Ty,
}

/// Grouping context while binding expressions above an aggregation.
struct AggState {
    groups: Vec<Expr>,
    group_types: Vec<Ty>,
    group_infos: Vec<Option<ColumnInfo>>,
    /// Input column of each plain-column group key.
    group_columns: Vec<Option<usize>>,
    aggregates: Vec<(Expr, BoundAggregate, Ty)>,
}

struct Scope<'s> {
    schema: &'s RowSchema,
    objects: &'s [ObjectInfo],
    /// Select-list aliases visible to HAVING and ORDER BY.
    aliases: &'s [(Name, Expr)],
    agg: Option<&'s mut AggState>,
}

impl<'s> Scope<'s> {
    fn plain(schema: &'s RowSchema) -> Self {
        Scope {
            schema,
            objects: &[],
            aliases: &[],
            agg: None,
        }
    }
}

pub(super) struct Binder<'a> {
    pub catalog: &'a Catalog,
    pub db: &'a Database,
    pub params: &'a ParamBinding,
    pub next_subquery: usize,
}

fn float_ty() -> Ty {
    Ty::of_kind(ValueKind::Float)
}

fn bool_ty() -> Ty {
    Ty::of_kind(ValueKind::Integer)
}

fn expr_pos(e: &Expr) -> Pos {
    e.pos().unwrap_or_default()
}

fn from_item_pos(item: &FromItem) -> Pos {
    match item {
        FromItem::Relation { name, .. } => name.pos,
        FromItem::Subquery { query, .. } => query.from.first().map(from_item_pos).unwrap_or_default(),
        FromItem::SimSearch(s) => s.pos,
        FromItem::Join { left, .. } => from_item_pos(left),
    }
}

/// Name a FROM item can be referred to by.
fn from_item_name(item: &FromItem) -> Option<Name> {
    match item {
        FromItem::Relation { name, alias } => Some(Name::new(&alias.as_ref().unwrap_or(name).value)),
        FromItem::Subquery { alias, .. } => alias.as_ref().map(|a| Name::new(&a.value)),
        FromItem::SimSearch(s) => s.alias.as_ref().map(|a| Name::new(&a.value)),
        FromItem::Join { .. } => None,
    }
}

fn is_aggregate_call(e: &Expr, catalog: &Catalog) -> bool {
    matches!(e, Expr::Function { name, .. }
        if AggregateFunc::from_name(&name.value).is_some() && catalog.distance(&name.value).is_none())
}

fn contains_aggregate(e: &Expr, catalog: &Catalog) -> bool {
    if is_aggregate_call(e, catalog) {
        return true;
    }
    match e {
        Expr::Function { args, .. } | Expr::Tuple(args) => args.iter().any(|a| contains_aggregate(a, catalog)),
        Expr::Binary { left, right, .. } => contains_aggregate(left, catalog) || contains_aggregate(right, catalog),
        Expr::Unary { expr, .. } | Expr::IsNull { expr, .. } | Expr::InSubquery { expr, .. } => {
            contains_aggregate(expr, catalog)
        }
        _ => false,
    }
}

fn check_disjoint(left: &RowSchema, right: &RowSchema, pos: Pos) -> Result<()> {
    for c in &right.columns {
        for q in &c.qualifiers {
            if left.has_qualifier(q.as_str()) {
                return Err(Error::bind(
                    Some(pos),
                    format!("source name '{q}' is used twice in one FROM clause; give one of them an alias"),
                ));
            }
        }
    }
    Ok(())
}

fn literal_value(l: &Literal, pos: Pos) -> Result<Value> {
    Ok(match l {
        Literal::Integer(i) => Value::Integer(*i),
        Literal::Float(f) => Value::Float(*f),
        Literal::String(s) => Value::string(s),
        Literal::Null => Value::Null,
        Literal::Vector(v) => Value::vector(v.clone()),
        Literal::Date(d) => Value::Date(Value::parse_date(d).map_err(|e| e.at(pos))?),
    })
}

impl Binder<'_> {
    fn value_ty(&self, v: &Value) -> Ty {
        match v.kind() {
            None => Ty::unknown(),
            Some(k) => {
                let mut ty = Ty::of_kind(k);
                if let Some(t) = self.catalog.type_for_kind(k) {
                    ty.data_type = Some(t.id.clone());
                }
                ty
            }
        }
    }

    fn param(&self, id: &Ident) -> Result<Value> {
        self.params
            .get(&id.value)
            .cloned()
            .ok_or_else(|| Error::bind(Some(id.pos), format!("parameter ':{}' is not bound", id.value)))
    }

    /// Value of a constant argument (literal, parameter, negated number).
    fn const_value(&self, e: &Expr) -> Result<Value> {
        match e {
            Expr::Literal(l) => literal_value(l, expr_pos(e)),
            Expr::Param(id) => self.param(id),
            Expr::Unary { op: UnaryOp::Neg, expr } => match self.const_value(expr)? {
                Value::Integer(i) => Ok(Value::Integer(-i)),
                Value::Long(i) => Ok(Value::Long(-i)),
                Value::Float(f) => Ok(Value::Float(-f)),
                other => Err(Error::bind(Some(expr_pos(e)), format!("cannot negate {other}"))),
            },
            other => Err(Error::bind(
                Some(expr_pos(other)),
                format!("expected a constant argument, found '{}'", print_expr(other)),
            )),
        }
    }

    fn next_id(&mut self) -> usize {
        self.next_subquery += 1;
        self.next_subquery
    }

    // ---- queries -------------------------------------------------------

    pub fn bind_query(&mut self, q: &Query) -> Result<Plan> {
        let mut plan: Option<Plan> = None;
        for item in &q.from {
            let p = self.bind_from_item(item)?;
            plan = Some(match plan {
                None => p,
                Some(l) => {
                    check_disjoint(&l.schema, &p.schema, from_item_pos(item))?;
                    let schema = l.schema.concat(&p.schema);
                    Plan {
                        node: PlanNode::Join {
                            left: Box::new(l),
                            right: Box::new(p),
                            condition: JoinCondition::Cross,
                        },
                        schema,
                    }
                }
            });
        }
        let mut plan = plan.ok_or_else(|| Error::bind(None, "query has no FROM clause"))?;

        if let Some(w) = &q.selection {
            if contains_aggregate(w, self.catalog) {
                return Err(Error::bind(Some(expr_pos(w)), "aggregate functions are not allowed in WHERE"));
            }
            let pred = self.bind_expr(w, &mut Scope::plain(&plan.schema))?;
            let schema = plan.schema.clone();
            plan = Plan {
                node: PlanNode::Filter {
                    input: Box::new(plan),
                    predicate: pred.expr,
                    text: print_expr(w),
                },
                schema,
            };
        }

        let aliases: Vec<(Name, Expr)> = q
            .projection
            .iter()
            .filter_map(|item| match item {
                SelectItem::Expr { expr, alias: Some(a) } => Some((Name::new(&a.value), expr.clone())),
                _ => None,
            })
            .collect();
        let aggregated = !q.group_by.is_empty()
            || q.having.is_some()
            || q.projection.iter().any(|i| matches!(i, SelectItem::Expr { expr, .. } if contains_aggregate(expr, self.catalog)))
            || q.order_by.iter().any(|o| contains_aggregate(&o.expr, self.catalog));

        let (mut plan, select, order) = if aggregated {
            self.bind_aggregation(q, plan, &aliases)?
        } else {
            let mut order = Vec::new();
            for o in &q.order_by {
                let mut sc = Scope {
                    schema: &plan.schema,
                    objects: &[],
                    aliases: &aliases,
                    agg: None,
                };
                order.push((self.bind_expr(&o.expr, &mut sc)?, o.descending));
            }
            let select = self.bind_select(q, &plan.schema, None)?;
            (plan, select, order)
        };

        if !order.is_empty() {
            let text = q
                .order_by
                .iter()
                .map(|o| format!("{}{}", print_expr(&o.expr), if o.descending { " DESC" } else { "" }))
                .collect::<Vec<_>>()
                .join(", ");
            let schema = plan.schema.clone();
            plan = Plan {
                node: PlanNode::Sort {
                    input: Box::new(plan),
                    keys: order
                        .into_iter()
                        .map(|(t, descending)| SortKey {
                            expr: t.expr,
                            descending,
                        })
                        .collect(),
                    text,
                },
                schema,
            };
        }

        let mut columns = Vec::new();
        let mut exprs = Vec::new();
        for (typed, name) in select {
            let info = match &typed.column {
                Some(c) => ColumnInfo {
                    name,
                    qualifiers: c.qualifiers.clone(),
                    role: ColumnRole::Attribute,
                    ty: typed.ty.clone(),
                    depth: 0,
                    merged: false,
                },
                None => ColumnInfo::attribute(name, None, typed.ty.clone()),
            };
            columns.push(info);
            exprs.push(typed.expr);
        }
        plan = Plan {
            node: PlanNode::Project {
                input: Box::new(plan),
                exprs,
            },
            schema: RowSchema::new(columns),
        };
        if q.distinct {
            let schema = plan.schema.clone();
            plan = Plan {
                node: PlanNode::Distinct { input: Box::new(plan) },
                schema,
            };
        }
        if let Some(Limit::Top(n)) = q.limit {
            let schema = plan.schema.clone();
            plan = Plan {
                node: PlanNode::Limit {
                    input: Box::new(plan),
                    n: usize::try_from(n).unwrap_or(usize::MAX),
                },
                schema,
            };
        }
        Ok(plan)
    }

    /// Binds the select list; `agg` is the grouping context when the query
    /// aggregates.
    fn bind_select(
        &mut self,
        q: &Query,
        schema: &RowSchema,
        mut agg: Option<&mut AggState>,
    ) -> Result<Vec<(Typed, Name)>> {
        let mut out = Vec::new();
        for item in &q.projection {
            match item {
                SelectItem::Wildcard | SelectItem::QualifiedWildcard(_) => {
                    if agg.is_some() {
                        return Err(Error::bind(
                            q.from.first().map(from_item_pos),
                            "'*' cannot be used in an aggregating query",
                        ));
                    }
                    let cols = match item {
                        SelectItem::QualifiedWildcard(qual) => {
                            if !schema.has_qualifier(&qual.value) {
                                return Err(Error::bind(Some(qual.pos), format!("unknown source '{}'", qual.value)));
                            }
                            schema.qualified_wildcard(&qual.value)
                        }
                        _ => schema.wildcard(),
                    };
                    for i in cols {
                        let c = schema.columns[i].clone();
                        out.push((
                            Typed {
                                expr: BoundExpr::Column(i),
                                ty: c.ty.clone(),
                                column: Some(c.clone()),
                            },
                            c.name.clone(),
                        ));
                    }
                }
                SelectItem::Expr { expr, alias } => {
                    let mut sc = Scope {
                        schema,
                        objects: &[],
                        aliases: &[],
                        agg: agg.as_deref_mut(),
                    };
                    let t = self.bind_expr(expr, &mut sc)?;
                    let name = match (alias, expr) {
                        (Some(a), _) => Name::new(&a.value),
                        (None, Expr::Column(c)) => Name::new(&c.name.value),
                        (None, e) => Name::new(print_expr(e)),
                    };
                    out.push((t, name));
                }
            }
        }
        Ok(out)
    }

    #[allow(clippy::type_complexity)]
    fn bind_aggregation(
        &mut self,
        q: &Query,
        input: Plan,
        aliases: &[(Name, Expr)],
    ) -> Result<(Plan, Vec<(Typed, Name)>, Vec<(Typed, bool)>)> {
        let pre = input.schema.clone();
        let mut st = AggState {
            groups: q.group_by.clone(),
            group_types: Vec::new(),
            group_infos: Vec::new(),
            group_columns: Vec::new(),
            aggregates: Vec::new(),
        };
        let mut group_exprs = Vec::new();
        for g in &q.group_by {
            if contains_aggregate(g, self.catalog) {
                return Err(Error::bind(Some(expr_pos(g)), "aggregate functions are not allowed in GROUP BY"));
            }
            let t = self.bind_expr(g, &mut Scope::plain(&pre))?;
            st.group_columns.push(match t.expr {
                BoundExpr::Column(i) => Some(i),
                _ => None,
            });
            st.group_types.push(t.ty.clone());
            st.group_infos.push(t.column.clone());
            group_exprs.push(t.expr);
        }
        let select = self.bind_select(q, &pre, Some(&mut st))?;
        let having = match &q.having {
            Some(h) => {
                let mut sc = Scope {
                    schema: &pre,
                    objects: &[],
                    aliases,
                    agg: Some(&mut st),
                };
                Some((self.bind_expr(h, &mut sc)?, print_expr(h)))
            }
            None => None,
        };
        let mut order = Vec::new();
        for o in &q.order_by {
            let mut sc = Scope {
                schema: &pre,
                objects: &[],
                aliases,
                agg: Some(&mut st),
            };
            order.push((self.bind_expr(&o.expr, &mut sc)?, o.descending));
        }

        let mut columns = Vec::new();
        for (i, g) in q.group_by.iter().enumerate() {
            columns.push(match &st.group_infos[i] {
                Some(c) => ColumnInfo {
                    role: ColumnRole::Attribute,
                    depth: 0,
                    merged: false,
                    ..c.clone()
                },
                None => ColumnInfo::attribute(Name::new(print_expr(g)), None, st.group_types[i].clone()),
            });
        }
        let mut parts: Vec<String> = q.group_by.iter().map(print_expr).collect();
        if !parts.is_empty() {
            parts = vec![format!("group by {}", parts.join(", "))];
        }
        let mut aggregates = Vec::new();
        for (ast, agg, ty) in st.aggregates {
            parts.push(print_expr(&ast));
            columns.push(ColumnInfo::attribute(Name::new(print_expr(&ast)), None, ty));
            aggregates.push(agg);
        }
        let mut plan = Plan {
            node: PlanNode::Aggregate {
                input: Box::new(input),
                group_by: group_exprs,
                aggregates,
                text: parts.join("; "),
            },
            schema: RowSchema::new(columns),
        };
        if let Some((h, text)) = having {
            let schema = plan.schema.clone();
            plan = Plan {
                node: PlanNode::Filter {
                    input: Box::new(plan),
                    predicate: h.expr,
                    text,
                },
                schema,
            };
        }
        Ok((plan, select, order))
    }

    // ---- FROM items ----------------------------------------------------

    fn bind_from_item(&mut self, item: &FromItem) -> Result<Plan> {
        match item {
            FromItem::Relation { name, alias } => self.bind_relation(name, alias.as_ref()),
            FromItem::Subquery { query, alias } => {
                let mut p = self.bind_query(query)?;
                if let Some(a) = alias {
                    for c in &mut p.schema.columns {
                        c.qualifiers = vec![Name::new(&a.value)];
                    }
                }
                Ok(p)
            }
            FromItem::SimSearch(s) => self.bind_simsearch(s),
            FromItem::Join { left, right, kind } => {
                let l = self.bind_from_item(left)?;
                let r = self.bind_from_item(right)?;
                let pos = from_item_pos(right);
                check_disjoint(&l.schema, &r.schema, pos)?;
                match kind {
                    JoinKind::Inner(on) => {
                        let schema = l.schema.concat(&r.schema);
                        let pred = self.bind_expr(on, &mut Scope::plain(&schema))?;
                        Ok(Plan {
                            node: PlanNode::Join {
                                left: Box::new(l),
                                right: Box::new(r),
                                condition: JoinCondition::On {
                                    predicate: pred.expr,
                                    text: print_expr(on),
                                },
                            },
                            schema,
                        })
                    }
                    JoinKind::Natural => self.natural_join(l, r, pos),
                }
            }
        }
    }

    fn bind_relation(&mut self, name: &Ident, alias: Option<&Ident>) -> Result<Plan> {
        let rel = self
            .db
            .read(&name.value)
            .map_err(|_| Error::bind(Some(name.pos), format!("unknown relation '{}'", name.value)))?;
        let qualifier = Name::new(&alias.unwrap_or(name).value);
        let columns = rel
            .schema()
            .attributes()
            .iter()
            .enumerate()
            .map(|(i, a)| {
                ColumnInfo::attribute(
                    a.name.clone(),
                    Some(qualifier.clone()),
                    Ty {
                        kind: Some(a.kind),
                        data_type: Some(a.data_type.clone()),
                        attribute: Some(a.clone()),
                        origin: Some(super::schema::ColumnOrigin {
                            relation: rel.name().clone(),
                            column: i,
                        }),
                    },
                )
            })
            .collect();
        Ok(Plan {
            node: PlanNode::Scan(ScanNode {
                relation: rel.name().clone(),
                alias: alias.map(|a| Name::new(&a.value)),
                access: ScanAccess::Full,
            }),
            schema: RowSchema::new(columns),
        })
    }

    fn natural_join(&mut self, l: Plan, r: Plan, pos: Pos) -> Result<Plan> {
        let visible = |s: &RowSchema, i: usize| s.columns[i].role == ColumnRole::Attribute && !s.columns[i].merged;
        let mut pairs = Vec::new();
        for i in 0..l.schema.len() {
            if !visible(&l.schema, i) {
                continue;
            }
            let name = &l.schema.columns[i].name;
            let rights: Vec<usize> = (0..r.schema.len())
                .filter(|&j| visible(&r.schema, j) && r.schema.columns[j].name == *name)
                .collect();
            if rights.is_empty() {
                continue;
            }
            let lefts = (0..l.schema.len())
                .filter(|&k| visible(&l.schema, k) && l.schema.columns[k].name == *name)
                .count();
            if lefts > 1 || rights.len() > 1 {
                return Err(Error::bind(Some(pos), format!("natural join column '{name}' is ambiguous")));
            }
            let (lt, rt) = (&l.schema.columns[i].ty, &r.schema.columns[rights[0]].ty);
            if !lt.compatible(rt) {
                return Err(Error::bind(
                    Some(pos),
                    format!(
                        "natural join column '{name}' has type {} on the left and {} on the right",
                        lt.describe(),
                        rt.describe()
                    ),
                ));
            }
            pairs.push((i, rights[0]));
        }
        let mut right_schema = r.schema.clone();
        for &(_, j) in &pairs {
            right_schema.columns[j].merged = true;
        }
        let schema = l.schema.concat(&right_schema);
        let condition = if pairs.is_empty() {
            JoinCondition::Cross
        } else {
            JoinCondition::Natural(pairs)
        };
        Ok(Plan {
            node: PlanNode::Join {
                left: Box::new(l),
                right: Box::new(r),
                condition,
            },
            schema,
        })
    }

    // ---- similarity search ---------------------------------------------

    fn bind_simsearch(&mut self, s: &SimSearch) -> Result<Plan> {
        let mut sources = Vec::new();
        let mut schema = RowSchema::default();
        for item in &s.sources {
            let p = self.bind_from_item(item)?;
            check_disjoint(&schema, &p.schema, from_item_pos(item))?;
            schema = schema.concat(&p.schema);
            sources.push(p);
        }

        let mut objects = Vec::new();
        let mut infos = Vec::new();
        let empty = RowSchema::default();
        for o in &s.objects {
            let alias = o.alias.as_ref().map(|a| Name::new(&a.value));
            if let Some(a) = &alias {
                if infos.iter().any(|i: &ObjectInfo| i.alias.as_ref() == Some(a)) {
                    return Err(Error::bind(
                        o.alias.as_ref().map(|a| a.pos),
                        format!("query object alias '{a}' is used twice"),
                    ));
                }
            }
            let (source, ty) = match &o.expr {
                Expr::Subquery(q) => {
                    let p = self.bind_query(q)?;
                    let mut ty = p.schema.columns[0].ty.clone();
                    ty.attribute = None;
                    ty.origin = None;
                    (QueryObjectSource::Subquery(Box::new(p)), ty)
                }
                e => {
                    let t = self.bind_expr(e, &mut Scope::plain(&empty))?;
                    (QueryObjectSource::Value(t.expr), t.ty)
                }
            };
            infos.push(ObjectInfo {
                alias: alias.clone(),
                ty: ty.clone(),
            });
            objects.push(BoundQueryObject { alias, source, ty });
        }

        let (method_name, args) = match &s.method {
            Some(c) => (c.name.clone(), c.args.clone().unwrap_or_default()),
            None => (Ident::at(DEFAULT_METHOD, s.pos), Vec::new()),
        };
        let method = self.catalog.method(&method_name.value).ok_or_else(|| {
            Error::bind(Some(method_name.pos), format!("unknown search method '{}'", method_name.value))
        })?;
        let mut raw = Vec::new();
        let mut distinct_column = None;
        for (i, a) in args.iter().enumerate() {
            let attribute_param = method.params.get(i).is_some_and(|p| p.kind == ParamKind::Attribute);
            match (attribute_param, a) {
                (true, Expr::Column(c)) => {
                    let col = schema.resolve(c.qualifier.as_ref().map(|q| q.value.as_str()), &c.name.value, c.pos())?;
                    distinct_column = Some(col);
                    raw.push(Value::string(&c.name.value));
                }
                (true, other) => {
                    return Err(Error::bind(
                        Some(expr_pos(other)),
                        format!(
                            "parameter '{}' of '{}' must name an attribute",
                            method.params[i].name, method.name
                        ),
                    ))
                }
                (false, e) => raw.push(self.const_value(e)?),
            }
        }
        let method_params = bind_params(method.name.as_str(), &method.params, raw).map_err(|e| e.at(method_name.pos))?;

        let n_objects = objects.len();
        if !method.query_objects.admits(n_objects) {
            let wanted = match method.query_objects {
                crate::catalog::QueryObjects::Zero => "no query objects",
                crate::catalog::QueryObjects::Singleton => "exactly one query object",
                crate::catalog::QueryObjects::Arbitrary => "any number of query objects",
            };
            return Err(Error::bind(
                Some(method_name.pos),
                format!("method '{}' takes {wanted}, got {n_objects}", method.name),
            ));
        }
        if !method.relations.admits(sources.len()) {
            return Err(Error::bind(
                Some(method_name.pos),
                format!(
                    "method '{}' searches {} relation(s), got {}",
                    method.name,
                    method.relations,
                    sources.len()
                ),
            ));
        }

        let spec = self.bind_by(&s.by, &schema, &infos, s.pos)?;
        let semantics = self.semantics(&method.kind, &method_params, distinct_column, method_name.pos)?;
        match (&semantics, &spec) {
            (Semantics::SimilarityJoin { .. }, BoundDistanceSpec::AttributeDefault { .. })
            | (Semantics::SimilarityJoin { .. }, BoundDistanceSpec::AttributeNamed { .. }) => {
                return Err(Error::bind(
                    Some(s.pos),
                    format!(
                        "method '{}' needs a distance expression over both relations, e.g. DISTANCE(a.x, b.x)",
                        method.name
                    ),
                ))
            }
            (Semantics::ReverseKnn { .. }, BoundDistanceSpec::Expression(_)) => {
                return Err(Error::bind(
                    Some(s.pos),
                    format!("method '{}' needs an attribute distance (BY attribute)", method.name),
                ))
            }
            _ => {}
        }

        let mut qualifiers: Vec<Name> = s.alias.iter().map(|a| Name::new(&a.value)).collect();
        qualifiers.extend(s.sources.iter().filter_map(from_item_name));
        let mut columns = Vec::new();
        for p in &sources {
            for c in &p.schema.columns {
                let mut c = c.clone();
                if c.role != ColumnRole::Attribute {
                    c.depth += 1;
                }
                if let Some(a) = &s.alias {
                    c.qualifiers.push(Name::new(&a.value));
                }
                columns.push(c);
            }
        }
        for (name, role, kind) in [
            (DISTANCE_COLUMN, ColumnRole::Distance, ValueKind::Float),
            (RANK_COLUMN, ColumnRole::Rank, ValueKind::Integer),
        ] {
            columns.push(ColumnInfo {
                name: Name::new(name),
                qualifiers: qualifiers.clone(),
                role,
                ty: Ty::of_kind(kind),
                depth: 0,
                merged: false,
            });
        }
        let by_text = match &s.by {
            BySpec::Attribute(c) => print_expr(&Expr::Column(c.clone())),
            BySpec::AttributeWith { attr, function } => format!(
                "{} DISTANCE FUNCTION {}",
                print_expr(&Expr::Column(attr.clone())),
                call_text(function)
            ),
            BySpec::Expr(e) => print_expr(e),
        };
        let method_text = match &s.method {
            Some(c) => call_text(c),
            None => DEFAULT_METHOD.to_string(),
        };
        Ok(Plan {
            node: PlanNode::SimSearch(Box::new(SimSearchNode {
                sources,
                objects,
                spec,
                method,
                method_params,
                semantics,
                rewrite: None,
                access: SearchAccess::Sequential,
                alias: s.alias.as_ref().map(|a| Name::new(&a.value)),
                by_text,
                method_text,
            })),
            schema: RowSchema::new(columns),
        })
    }

    fn semantics(&self, kind: &MethodKind, params: &[Value], distinct_column: Option<usize>, pos: Pos) -> Result<Semantics> {
        let number = |i: usize, what: &str| -> Result<Dist> {
            let v = params
                .get(i)
                .and_then(Value::as_f64)
                .ok_or_else(|| Error::bind(Some(pos), format!("missing numeric {what}")))?;
            if v.is_nan() || v < 0.0 {
                return Err(Error::bind(Some(pos), format!("{what} must be non-negative, got {v}")));
            }
            Ok(v)
        };
        let count = |i: usize, what: &str| -> Result<usize> {
            match params.get(i) {
                Some(Value::Integer(k) | Value::Long(k)) if *k >= 1 => Ok(*k as usize),
                Some(v) => Err(Error::bind(Some(pos), format!("{what} must be a positive integer, got {v}"))),
                None => Err(Error::bind(Some(pos), format!("missing {what}"))),
            }
        };
        Ok(match kind {
            MethodKind::NearestNeighbor => Semantics::Knn(None),
            MethodKind::Range => Semantics::Range {
                radius: number(0, "radius")?,
                budget: ApproximationBudget::UNLIMITED,
            },
            MethodKind::ApproximateRange => Semantics::Range {
                radius: number(0, "radius")?,
                budget: ApproximationBudget::limit(count(1, "max_visited")?),
            },
            MethodKind::SimilarityJoin => Semantics::SimilarityJoin {
                threshold: number(0, "threshold")?,
            },
            MethodKind::ReverseKnn => Semantics::ReverseKnn { k: count(0, "k")? },
            MethodKind::DistinctKnn => Semantics::DistinctKnn {
                k: count(0, "k")?,
                column: distinct_column.ok_or_else(|| Error::bind(Some(pos), "missing distinct attribute"))?,
            },
            MethodKind::Custom(m) => Semantics::Custom(m.clone()),
        })
    }

    fn bind_by(&mut self, by: &BySpec, schema: &RowSchema, objects: &[ObjectInfo], pos: Pos) -> Result<BoundDistanceSpec> {
        let (c, function) = match by {
            BySpec::Attribute(c) => (c, None),
            BySpec::AttributeWith { attr, function } => (attr, Some(function)),
            BySpec::Expr(e) => {
                let mut sc = Scope {
                    schema,
                    objects,
                    aliases: &[],
                    agg: None,
                };
                let t = self.bind_expr(e, &mut sc)?;
                if t.ty.kind.is_some_and(|k| !k.is_numeric()) {
                    return Err(Error::bind(
                        Some(expr_pos(e)),
                        format!("BY expression must yield a distance, got {}", t.ty.describe()),
                    ));
                }
                return Ok(BoundDistanceSpec::Expression(t.expr));
            }
        };
        let column = schema.resolve(c.qualifier.as_ref().map(|q| q.value.as_str()), &c.name.value, c.pos())?;
        let info = &schema.columns[column];
        match objects.len() {
            0 => {
                return Err(Error::bind(
                    Some(c.pos()),
                    format!(
                        "BY {} compares query objects with the attribute, but the search has none",
                        c.name.value
                    ),
                ))
            }
            1 => {}
            n => {
                return Err(Error::bind(
                    Some(pos),
                    format!(
                        "{n} query objects need a set distance to combine them, e.g. BY minimum({})",
                        c.name.value
                    ),
                ))
            }
        }
        if !objects[0].ty.compatible(&info.ty) {
            return Err(Error::bind(
                Some(c.pos()),
                format!(
                    "type mismatch: query object is {} but attribute '{}' is {}",
                    objects[0].ty.describe(),
                    c.name.value,
                    info.ty.describe()
                ),
            ));
        }
        let (entry, args, fpos) = match function {
            None => (self.default_distance(&info.ty, &info.ty)?, Vec::new(), c.pos()),
            Some(f) => {
                let entry = self.catalog.distance(&f.name.value).ok_or_else(|| {
                    Error::bind(Some(f.name.pos), format!("unknown distance function '{}'", f.name.value))
                })?;
                let args = f
                    .args
                    .iter()
                    .flatten()
                    .map(|a| self.const_value(a))
                    .collect::<Result<Vec<_>>>()?;
                (entry, args, f.name.pos)
            }
        };
        self.check_accepts(&entry, &info.ty, fpos)?;
        let params = entry.bind_params(args).map_err(|e| e.at(fpos))?;
        let corpus = info.ty.origin.clone().filter(|_| info.ty.kind == Some(ValueKind::String));
        let attribute = info.name.clone();
        Ok(match function {
            None => BoundDistanceSpec::AttributeDefault {
                column,
                attribute,
                entry,
                params,
                corpus,
            },
            Some(_) => BoundDistanceSpec::AttributeNamed {
                column,
                attribute,
                entry,
                params,
                corpus,
            },
        })
    }

    /// Default distance for comparing values of types `x` and `y`: an
    /// attribute-level default first (y, then x), else the data type's.
    fn default_distance(&self, x: &Ty, y: &Ty) -> Result<Arc<DistanceFunctionEntry>> {
        // A declared attribute default wins; an attribute without one
        // measures by identity; computed values use their type's default.
        let attrs: Vec<_> = [y, x].into_iter().filter_map(|t| t.attribute.as_ref()).collect();
        if let Some(a) = attrs.iter().find(|a| a.default_distance.is_some()).or(attrs.first()) {
            return self
                .catalog
                .attribute_default_distance(a)
                .map_err(|e| Error::bind(None, e.to_string()));
        }
        match y.data_type.as_ref().or(x.data_type.as_ref()) {
            Some(t) => self.catalog.type_default_distance(t.as_str()),
            None => self
                .catalog
                .distance(IDENTITY_DISTANCE)
                .ok_or_else(|| Error::bind(None, "identity_distance is not registered")),
        }
    }

    fn check_accepts(&self, entry: &DistanceFunctionEntry, ty: &Ty, pos: Pos) -> Result<()> {
        if let (Some(dt), Some(kind)) = (&ty.data_type, ty.kind) {
            if !entry.accepts(dt, kind) {
                return Err(Error::bind(
                    Some(pos),
                    format!("distance function '{}' does not accept type '{dt}'", entry.name),
                ));
            }
        }
        Ok(())
    }

    // ---- expressions ---------------------------------------------------

    fn bind_expr(&mut self, e: &Expr, sc: &mut Scope<'_>) -> Result<Typed> {
        if let Some(agg) = sc.agg.as_deref() {
            if let Some(i) = agg.groups.iter().position(|g| g == e) {
                return Ok(Typed {
                    expr: BoundExpr::Column(i),
                    ty: agg.group_types[i].clone(),
                    column: agg.group_infos[i].clone(),
                });
            }
        }
        let pos = expr_pos(e);
        match e {
            Expr::Literal(l) => {
                let v = literal_value(l, pos)?;
                Ok(Typed::new(BoundExpr::Literal(v.clone()), self.value_ty(&v)))
            }
            Expr::Param(id) => {
                let v = self.param(id)?;
                let ty = self.value_ty(&v);
                Ok(Typed::new(BoundExpr::Literal(v), ty))
            }
            Expr::Column(c) => self.bind_column(c, sc),
            Expr::Function { .. } => self.bind_function(e, sc),
            Expr::Tuple(_) => Err(Error::bind(
                Some(pos),
                "a parenthesized list is only allowed as a (distance, weight) part of an aggregated distance",
            )),
            Expr::Subquery(q) => {
                let p = self.bind_query(q)?;
                let mut ty = p.schema.columns[0].ty.clone();
                ty.attribute = None;
                ty.origin = None;
                let id = self.next_id();
                Ok(Typed::new(
                    BoundExpr::ScalarSubquery {
                        plan: Arc::new(p),
                        id,
                    },
                    ty,
                ))
            }
            Expr::InSubquery { expr, query, negated } => {
                let t = self.bind_expr(expr, sc)?;
                let p = self.bind_query(query)?;
                let first = &p.schema.columns[0].ty;
                if !t.ty.compatible(first) {
                    return Err(Error::bind(
                        Some(pos),
                        format!("cannot compare {} with subquery column of type {}", t.ty.describe(), first.describe()),
                    ));
                }
                let id = self.next_id();
                Ok(Typed::new(
                    BoundExpr::InSubquery {
                        expr: t.expr.boxed(),
                        plan: Arc::new(p),
                        negated: *negated,
                        id,
                    },
                    bool_ty(),
                ))
            }
            Expr::Binary { op, left, right } => {
                let l = self.bind_expr(left, sc)?;
                let r = self.bind_expr(right, sc)?;
                let ty = match op {
                    BinaryOp::And | BinaryOp::Or => bool_ty(),
                    op if op.is_comparison() => {
                        if !l.ty.compatible(&r.ty) {
                            return Err(Error::bind(
                                Some(pos),
                                format!("cannot compare {} with {}", l.ty.describe(), r.ty.describe()),
                            ));
                        }
                        bool_ty()
                    }
                    _ => {
                        for t in [&l.ty, &r.ty] {
                            if t.kind.is_some_and(|k| !k.is_numeric()) {
                                return Err(Error::bind(
                                    Some(pos),
                                    format!("operator '{}' needs numbers, got {}", op.symbol(), t.describe()),
                                ));
                            }
                        }
                        let integral = |t: &Ty| matches!(t.kind, Some(ValueKind::Integer | ValueKind::Long));
                        if *op != BinaryOp::Div && integral(&l.ty) && integral(&r.ty) {
                            Ty::of_kind(ValueKind::Integer)
                        } else {
                            float_ty()
                        }
                    }
                };
                Ok(Typed::new(
                    BoundExpr::Binary {
                        op: *op,
                        left: l.expr.boxed(),
                        right: r.expr.boxed(),
                    },
                    ty,
                ))
            }
            Expr::Unary { op, expr } => {
                let t = self.bind_expr(expr, sc)?;
                let ty = match op {
                    UnaryOp::Not => bool_ty(),
                    UnaryOp::Neg => {
                        if t.ty.kind.is_some_and(|k| !k.is_numeric()) {
                            return Err(Error::bind(Some(pos), format!("cannot negate {}", t.ty.describe())));
                        }
                        t.ty.kind.map(Ty::of_kind).unwrap_or_default()
                    }
                };
                Ok(Typed::new(
                    BoundExpr::Unary {
                        op: *op,
                        expr: t.expr.boxed(),
                    },
                    ty,
                ))
            }
            Expr::IsNull { expr, negated } => {
                let t = self.bind_expr(expr, sc)?;
                Ok(Typed::new(
                    BoundExpr::IsNull {
                        expr: t.expr.boxed(),
                        negated: *negated,
                    },
                    bool_ty(),
                ))
            }
        }
    }

    fn bind_column(&mut self, c: &ColumnRef, sc: &mut Scope<'_>) -> Result<Typed> {
        let name = c.name.value.as_str();
        let qualifier = c.qualifier.as_ref().map(|q| q.value.as_str());
        if qualifier.is_none() {
            if let Some((_, ast)) = sc.aliases.iter().find(|(n, _)| n.matches(name)) {
                let ast = ast.clone();
                let mut inner = Scope {
                    schema: sc.schema,
                    objects: sc.objects,
                    aliases: &[],
                    agg: sc.agg.as_deref_mut(),
                };
                return self.bind_expr(&ast, &mut inner);
            }
            if let Some(i) = sc
                .objects
                .iter()
                .position(|o| o.alias.as_ref().is_some_and(|a| a.matches(name)))
            {
                if sc.schema.resolve(None, name, c.pos()).is_ok() {
                    return Err(Error::bind(
                        Some(c.pos()),
                        format!("'{name}' names both a query object and a column"),
                    ));
                }
                return Ok(Typed::new(BoundExpr::QueryObject(i), sc.objects[i].ty.clone()));
            }
        }
        let idx = sc.schema.resolve(qualifier, name, c.pos())?;
        if let Some(agg) = sc.agg.as_deref() {
            return match agg.group_columns.iter().position(|g| *g == Some(idx)) {
                Some(i) => Ok(Typed {
                    expr: BoundExpr::Column(i),
                    ty: agg.group_types[i].clone(),
                    column: agg.group_infos[i].clone(),
                }),
                None => Err(Error::bind(
                    Some(c.pos()),
                    format!("column '{name}' must appear in GROUP BY or inside an aggregate function"),
                )),
            };
        }
        let col = sc.schema.columns[idx].clone();
        Ok(Typed {
            expr: BoundExpr::Column(idx),
            ty: col.ty.clone(),
            column: Some(col),
        })
    }

    fn bind_function(&mut self, e: &Expr, sc: &mut Scope<'_>) -> Result<Typed> {
        let Expr::Function {
            name,
            args,
            distinct,
            star,
        } = e
        else {
            unreachable!("bind_function is only called on function calls")
        };
        let pos = name.pos;
        let fname = name.value.as_str();
        if is_aggregate_call(e, self.catalog) {
            return self.bind_aggregate(e, sc);
        }
        if *star || *distinct {
            return Err(Error::bind(
                Some(pos),
                format!("'{}' is only allowed in aggregate functions", if *star { "*" } else { "DISTINCT" }),
            ));
        }
        if fname.eq_ignore_ascii_case("distance") {
            if args.len() != 2 {
                return Err(Error::bind(Some(pos), format!("DISTANCE takes 2 arguments, got {}", args.len())));
            }
            let l = self.bind_expr(&args[0], sc)?;
            let r = self.bind_expr(&args[1], sc)?;
            return self.distance_leaf(None, Vec::new(), l, r, pos);
        }
        if let Some(entry) = self.catalog.distance(fname) {
            if args.len() < 2 {
                return Err(Error::bind(
                    Some(pos),
                    format!("distance function '{}' needs two operands", entry.name),
                ));
            }
            let l = self.bind_expr(&args[0], sc)?;
            let r = self.bind_expr(&args[1], sc)?;
            let params = args[2..].iter().map(|a| self.const_value(a)).collect::<Result<Vec<_>>>()?;
            return self.distance_leaf(Some(entry), params, l, r, pos);
        }
        if let Some(entry) = self.catalog.set_distance(fname) {
            let mut bound = Vec::new();
            if let [Expr::Column(c)] = args.as_slice() {
                if !sc.objects.is_empty() && sc.schema.resolve(c.qualifier.as_ref().map(|q| q.value.as_str()), &c.name.value, c.pos()).is_ok() {
                    let col = self.bind_column(c, sc)?;
                    for i in 0..sc.objects.len() {
                        let q = Typed::new(BoundExpr::QueryObject(i), sc.objects[i].ty.clone());
                        let leaf_col = Typed {
                            expr: col.expr.clone(),
                            ty: col.ty.clone(),
                            column: col.column.clone(),
                        };
                        bound.push(self.distance_leaf(None, Vec::new(), q, leaf_col, pos)?.expr);
                    }
                    return Ok(Typed::new(BoundExpr::SetDistance { entry, args: bound }, float_ty()));
                }
            }
            if args.is_empty() {
                return Err(Error::bind(Some(pos), format!("'{}' needs at least one distance", entry.name)));
            }
            for a in args {
                let t = self.bind_expr(a, sc)?;
                self.require_numeric(&t.ty, a, &entry.name)?;
                bound.push(t.expr);
            }
            return Ok(Typed::new(BoundExpr::SetDistance { entry, args: bound }, float_ty()));
        }
        if let Some(entry) = self.catalog.aggregated_distance(fname) {
            if args.is_empty() {
                return Err(Error::bind(Some(pos), format!("'{}' needs at least one part", entry.name)));
            }
            let mut parts = Vec::new();
            for a in args {
                let Expr::Tuple(items) = a else {
                    return Err(Error::bind(
                        Some(expr_pos(a)),
                        format!("arguments of '{}' are (distance, weight) pairs", entry.name),
                    ));
                };
                if items.len() != 2 {
                    return Err(Error::bind(
                        Some(expr_pos(a)),
                        format!("arguments of '{}' are (distance, weight) pairs", entry.name),
                    ));
                }
                let d = self.bind_expr(&items[0], sc)?;
                self.require_numeric(&d.ty, &items[0], &entry.name)?;
                let w = self.bind_expr(&items[1], sc)?;
                self.require_numeric(&w.ty, &items[1], &entry.name)?;
                parts.push((d.expr, w.expr));
            }
            return Ok(Typed::new(BoundExpr::Aggregated { entry, parts }, float_ty()));
        }
        if let Some(entry) = self.catalog.extractor(fname) {
            if args.len() != 1 {
                return Err(Error::bind(
                    Some(pos),
                    format!("extractor '{}' takes 1 argument, got {}", entry.name, args.len()),
                ));
            }
            let t = self.bind_expr(&args[0], sc)?;
            let input = self.catalog.data_type(entry.input.as_str());
            if let (Some(kind), Some(input)) = (t.ty.kind, input) {
                if kind != input.repr {
                    return Err(Error::bind(
                        Some(expr_pos(&args[0])),
                        format!("extractor '{}' expects {}, got {}", entry.name, entry.input, t.ty.describe()),
                    ));
                }
            }
            let output = self.catalog.data_type(entry.output.as_str());
            let ty = Ty {
                kind: output.map(|t| t.repr),
                data_type: Some(entry.output.clone()),
                attribute: None,
                origin: None,
            };
            return Ok(Typed::new(
                BoundExpr::Extract {
                    entry,
                    arg: t.expr.boxed(),
                },
                ty,
            ));
        }
        Err(Error::bind(Some(pos), format!("unknown function '{fname}'")))
    }

    fn require_numeric(&self, ty: &Ty, e: &Expr, owner: &Name) -> Result<()> {
        if ty.kind.is_some_and(|k| !k.is_numeric()) {
            return Err(Error::bind(
                Some(expr_pos(e)),
                format!("'{owner}' needs numeric arguments, got {}", ty.describe()),
            ));
        }
        Ok(())
    }

    fn distance_leaf(
        &mut self,
        entry: Option<Arc<DistanceFunctionEntry>>,
        params: Vec<Value>,
        l: Typed,
        r: Typed,
        pos: Pos,
    ) -> Result<Typed> {
        if !l.ty.compatible(&r.ty) {
            return Err(Error::bind(
                Some(pos),
                format!("type mismatch: cannot measure {} against {}", l.ty.describe(), r.ty.describe()),
            ));
        }
        let entry = match entry {
            Some(e) => e,
            None => self.default_distance(&l.ty, &r.ty).map_err(|e| e.at(pos))?,
        };
        self.check_accepts(&entry, &l.ty, pos)?;
        self.check_accepts(&entry, &r.ty, pos)?;
        let params = entry.bind_params(params).map_err(|e| e.at(pos))?;
        let corpus = [&r.ty, &l.ty]
            .into_iter()
            .find(|t| t.kind == Some(ValueKind::String) && t.origin.is_some())
            .and_then(|t| t.origin.clone());
        Ok(Typed::new(
            BoundExpr::Distance(Box::new(DistanceCall {
                entry,
                params,
                left: l.expr,
                right: r.expr,
                corpus,
            })),
            float_ty(),
        ))
    }

    fn bind_aggregate(&mut self, e: &Expr, sc: &mut Scope<'_>) -> Result<Typed> {
        let Expr::Function {
            name,
            args,
            distinct,
            star,
        } = e
        else {
            unreachable!("bind_aggregate is only called on function calls")
        };
        let pos = name.pos;
        let Some(agg) = sc.agg.as_deref() else {
            return Err(Error::bind(
                Some(pos),
                format!("aggregate function '{}' is not allowed here", name.value),
            ));
        };
        if let Some(j) = agg.aggregates.iter().position(|(ast, _, _)| ast == e) {
            return Ok(Typed::new(
                BoundExpr::Column(agg.groups.len() + j),
                agg.aggregates[j].2.clone(),
            ));
        }
        let func = AggregateFunc::from_name(&name.value).expect("checked by caller");
        let (spec, argument, ty) = if *star {
            if func != AggregateFunc::Count || !args.is_empty() {
                return Err(Error::bind(Some(pos), "only count accepts '*'"));
            }
            (
                AggregateSpec {
                    func: AggregateFunc::CountStar,
                    distinct: false,
                },
                None,
                Ty::of_kind(ValueKind::Integer),
            )
        } else {
            if args.len() != 1 {
                return Err(Error::bind(
                    Some(pos),
                    format!("aggregate '{}' takes 1 argument, got {}", name.value, args.len()),
                ));
            }
            let mut inner = Scope {
                schema: sc.schema,
                objects: sc.objects,
                aliases: &[],
                agg: None,
            };
            let t = self.bind_expr(&args[0], &mut inner)?;
            let ty = match func {
                AggregateFunc::Count | AggregateFunc::CountStar => Ty::of_kind(ValueKind::Integer),
                AggregateFunc::Avg => float_ty(),
                AggregateFunc::Sum => {
                    if t.ty.kind.is_some_and(|k| !k.is_numeric()) {
                        return Err(Error::bind(Some(pos), format!("sum needs numbers, got {}", t.ty.describe())));
                    }
                    match t.ty.kind {
                        Some(ValueKind::Integer | ValueKind::Long) => Ty::of_kind(ValueKind::Integer),
                        _ => float_ty(),
                    }
                }
                AggregateFunc::Min | AggregateFunc::Max => Ty {
                    attribute: None,
                    origin: None,
                    ..t.ty.clone()
                },
            };
            if func == AggregateFunc::Avg && t.ty.kind.is_some_and(|k| !k.is_numeric()) {
                return Err(Error::bind(Some(pos), format!("avg needs numbers, got {}", t.ty.describe())));
            }
            (
                AggregateSpec {
                    func,
                    distinct: *distinct,
                },
                Some(t.expr),
                ty,
            )
        };
        let agg = sc.agg.as_deref_mut().expect("checked above");
        agg.aggregates.push((e.clone(), BoundAggregate { spec, argument }, ty.clone()));
        Ok(Typed::new(BoundExpr::Column(agg.groups.len() + agg.aggregates.len() - 1), ty))
    }
}

fn call_text(c: &Call) -> String {
    match &c.args {
        None => c.name.value.clone(),
        Some(args) => format!(
            "{}({})",
            c.name.value,
            args.iter().map(print_expr).collect::<Vec<_>>().join(", ")
        ),
    }
}
