//! Canonical text of a query tree.

use std::fmt::Write;

use super::ast::*;

/// Single-line text that parses back to an equal tree.
pub fn print(q: &Query) -> String {
    let mut out = String::new();
    query(&mut out, q);
    out
}

pub fn print_expr(e: &Expr) -> String {
    let mut out = String::new();
    expr(&mut out, e, 0);
    out
}

fn list<T>(out: &mut String, items: &[T], mut f: impl FnMut(&mut String, &T)) {
    for (i, it) in items.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        f(out, it);
    }
}

fn alias(out: &mut String, a: &Option<Ident>) {
    if let Some(a) = a {
        write!(out, " AS {}", a.value).unwrap();
    }
}

fn query(out: &mut String, q: &Query) {
    out.push_str("SELECT ");
    if q.distinct {
        out.push_str("DISTINCT ");
    }
    match q.limit {
        Some(Limit::Top(n)) => write!(out, "TOP {n} ").unwrap(),
        Some(Limit::All) => out.push_str("ALL "),
        None => {}
    }
    list(out, &q.projection, |out, item| match item {
        SelectItem::Wildcard => out.push('*'),
        SelectItem::QualifiedWildcard(q) => write!(out, "{}.*", q.value).unwrap(),
        SelectItem::Expr { expr: e, alias: a } => {
            expr(out, e, 0);
            alias(out, a);
        }
    });
    out.push_str(" FROM ");
    list(out, &q.from, from_item);
    if let Some(w) = &q.selection {
        out.push_str(" WHERE ");
        expr(out, w, 0);
    }
    if !q.group_by.is_empty() {
        out.push_str(" GROUP BY ");
        list(out, &q.group_by, |out, e| expr(out, e, 0));
    }
    if let Some(h) = &q.having {
        out.push_str(" HAVING ");
        expr(out, h, 0);
    }
    if !q.order_by.is_empty() {
        out.push_str(" ORDER BY ");
        list(out, &q.order_by, |out, o| {
            expr(out, &o.expr, 0);
            if o.descending {
                out.push_str(" DESC");
            }
        });
    }
}

fn from_item(out: &mut String, f: &FromItem) {
    match f {
        FromItem::Relation { name, alias: a } => {
            out.push_str(&name.value);
            alias(out, a);
        }
        FromItem::Subquery { query: q, alias: a } => {
            out.push('(');
            query(out, q);
            out.push(')');
            alias(out, a);
        }
        FromItem::SimSearch(s) => simsearch(out, s),
        FromItem::Join { left, right, kind } => {
            from_item(out, left);
            out.push_str(match kind {
                JoinKind::Natural => " NATURAL JOIN ",
                JoinKind::Inner(_) => " INNER JOIN ",
            });
            let nested = matches!(**right, FromItem::Join { .. });
            if nested {
                out.push('(');
            }
            from_item(out, right);
            if nested {
                out.push(')');
            }
            if let JoinKind::Inner(on) = kind {
                out.push_str(" ON ");
                expr(out, on, 0);
            }
        }
    }
}

fn simsearch(out: &mut String, s: &SimSearch) {
    out.push_str("SIMSEARCH ");
    if !s.objects.is_empty() {
        list(out, &s.objects, |out, o| {
            expr(out, &o.expr, UNARY_PRECEDENCE);
            alias(out, &o.alias);
        });
        out.push(' ');
    }
    out.push_str("IN ");
    list(out, &s.sources, from_item);
    out.push_str(" BY ");
    match &s.by {
        BySpec::Attribute(c) => column(out, c),
        BySpec::AttributeWith { attr, function } => {
            column(out, attr);
            out.push_str(" DISTANCE FUNCTION ");
            call(out, function);
        }
        BySpec::Expr(e) => expr(out, e, 0),
    }
    if let Some(m) = &s.method {
        out.push_str(" METHOD ");
        call(out, m);
    }
    alias(out, &s.alias);
}

fn call(out: &mut String, c: &Call) {
    out.push_str(&c.name.value);
    if let Some(args) = &c.args {
        out.push('(');
        list(out, args, |out, e| expr(out, e, 0));
        out.push(')');
    }
}

fn column(out: &mut String, c: &ColumnRef) {
    if let Some(q) = &c.qualifier {
        write!(out, "{}.", q.value).unwrap();
    }
    out.push_str(&c.name.value);
}

fn float(v: f64) -> String {
    let s = format!("{v}");
    if s.contains(['.', 'e', 'E']) || !v.is_finite() {
        s
    } else {
        format!("{s}.0")
    }
}

fn literal(out: &mut String, l: &Literal) {
    match l {
        Literal::Integer(v) => write!(out, "{v}").unwrap(),
        Literal::Float(v) => out.push_str(&float(*v)),
        Literal::String(s) => write!(out, "'{}'", s.replace('\'', "''")).unwrap(),
        Literal::Null => out.push_str("NULL"),
        Literal::Vector(v) => {
            out.push('[');
            list(out, v, |out, x| out.push_str(&float(*x)));
            out.push(']');
        }
        Literal::Date(s) => write!(out, "date '{}'", s.replace('\'', "''")).unwrap(),
    }
}

/// Prints `e`, parenthesized when it binds looser than `min`.
fn expr(out: &mut String, e: &Expr, min: u8) {
    let prec = e.precedence();
    let paren = prec < min;
    if paren {
        out.push('(');
    }
    match e {
        Expr::Literal(l) => literal(out, l),
        Expr::Param(p) => write!(out, ":{}", p.value).unwrap(),
        Expr::Column(c) => column(out, c),
        Expr::Function {
            name,
            args,
            distinct,
            star,
        } => {
            write!(out, "{}(", name.value).unwrap();
            if *star {
                out.push('*');
            } else {
                if *distinct {
                    out.push_str("DISTINCT ");
                }
                list(out, args, |out, a| expr(out, a, 0));
            }
            out.push(')');
        }
        Expr::Tuple(items) => {
            out.push('(');
            list(out, items, |out, a| expr(out, a, 0));
            out.push(')');
        }
        Expr::Subquery(q) => {
            out.push('(');
            query(out, q);
            out.push(')');
        }
        Expr::InSubquery {
            expr: inner,
            query: q,
            negated,
        } => {
            expr(out, inner, 5);
            out.push_str(if *negated { " NOT IN (" } else { " IN (" });
            query(out, q);
            out.push(')');
        }
        Expr::IsNull { expr: inner, negated } => {
            expr(out, inner, 5);
            out.push_str(if *negated { " IS NOT NULL" } else { " IS NULL" });
        }
        Expr::Binary { op, left, right } => {
            let p = op.precedence();
            expr(out, left, p);
            write!(out, " {} ", op.symbol()).unwrap();
            expr(out, right, p + 1);
        }
        Expr::Unary { op: UnaryOp::Not, expr: inner } => {
            out.push_str("NOT ");
            expr(out, inner, NOT_PRECEDENCE);
        }
        Expr::Unary { op: UnaryOp::Neg, expr: inner } => {
            out.push('-');
            match **inner {
                Expr::Column(_) | Expr::Param(_) | Expr::Function { .. } => expr(out, inner, 0),
                _ => {
                    out.push('(');
                    expr(out, inner, 0);
                    out.push(')');
                }
            }
        }
    }
    if paren {
        out.push(')');
    }
}
