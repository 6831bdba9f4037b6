//! Generated syntax trees and malformed query text.

use proptest::prelude::*;
use simseql_core::parser::*;
use simseql_core::ErrorKind;

/// Query text that must be rejected with a positioned error.
pub const MALFORMED: &[&str] = &[
    "",
    "SELECT",
    "SELECT FROM t",
    "SELECT a",
    "SELECT a FROM",
    "SELECT a, FROM t",
    "SELECT a FROM t WHERE",
    "SELECT a FROM t WHERE a =",
    "SELECT TOP 0 a FROM t",
    "SELECT TOP a FROM t",
    "SELECT TOP 3 ALL a FROM t",
    "SELECT a FROM t GROUP a",
    "SELECT a FROM t ORDER a",
    "SELECT a FROM SIMSEARCH 'x' keyword BY value",
    "SELECT a FROM SIMSEARCH 'x' IN keyword",
    "SELECT a FROM SIMSEARCH 'x' IN keyword BY",
    "SELECT a FROM SIMSEARCH 'x' IN BY value",
    "SELECT a FROM SIMSEARCH 'x' IN t BY v METHOD",
    "SELECT a FROM SIMSEARCH 'x' IN t BY v METHOD m(1",
    "SELECT a FROM SIMSEARCH 'x' IN t BY v DISTANCE FUNCTION",
    "SELECT a FROM SIMSEARCH 'x' AS IN t BY v",
    "SELECT a FROM t INNER JOIN u",
    "SELECT a FROM t NATURAL u",
    "SELECT a FROM t WHERE id IN (1, 2)",
    "SELECT a FROM t WHERE id IN SELECT b FROM u",
    "SELECT a FROM (SELECT b FROM u",
    "SELECT a FROM t WHERE x = 'unterminated",
    "SELECT a FROM t /* open comment",
    "SELECT a FROM t WHERE x = 1 extra",
    "SELECT f(a FROM t",
    "SELECT a.* .b FROM t",
    "SELECT a FROM t WHERE x IS 3",
    "SELECT a FROM t; SELECT b FROM u",
    "SELECT a FROM t WHERE x = #",
    "SELECT 12abc FROM t",
    "SELECT a FROM t WHERE v = [1, 'x']",
    "SELECT DISTINCT DISTINCT a FROM t",
];

/// Parses `text`, expecting a positioned syntax error.
pub fn check_malformed(text: &str) -> Result<(), String> {
    let err = match parse(text) {
        Ok(q) => return Err(format!("{text:?} parsed as {q:?}")),
        Err(e) => e,
    };
    if err.kind() != ErrorKind::Syntax {
        return Err(format!("{text:?}: {err}"));
    }
    match err.position() {
        Some(pos) if pos.line >= 1 && pos.offset <= text.len() => Ok(()),
        _ => Err(format!("{text:?}: unpositioned {err}")),
    }
}

/// Prints `q`, parses the text back and compares.
pub fn check_round_trip(q: &Query) -> Result<(), TestCaseError> {
    let text = print(q);
    let parsed = parse(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
    prop_assert_eq!(&parsed, q, "{}", text);
    prop_assert_eq!(print(&parsed), text);
    Ok(())
}

const NAMES: &[&str] = &["a", "b", "id", "value", "color", "t", "u", "k1", "x_2", "rank", "video_id"];

fn ident() -> impl Strategy<Value = Ident> {
    prop::sample::select(NAMES).prop_map(Ident::new)
}

fn literal() -> impl Strategy<Value = Literal> {
    prop_oneof![
        (-1000i64..1000).prop_map(Literal::Integer),
        (-1.0e6f64..1.0e6).prop_map(Literal::Float),
        "[a-z' ]{0,6}".prop_map(Literal::String),
        Just(Literal::Null),
        prop::collection::vec(-50.0f64..50.0, 0..4).prop_map(Literal::Vector),
        Just(Literal::Date("2009-01-20".into())),
    ]
}

fn column() -> impl Strategy<Value = ColumnRef> {
    (prop::option::of(ident()), ident()).prop_map(|(qualifier, name)| ColumnRef { qualifier, name })
}

fn expr_leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        literal().prop_map(Expr::Literal),
        ident().prop_map(Expr::Param),
        column().prop_map(Expr::Column),
        prop::option::of(ident()).prop_map(|q| Expr::Column(ColumnRef { qualifier: q, name: Ident::new("distance") })),
    ]
}

fn binop() -> impl Strategy<Value = BinaryOp> {
    prop::sample::select(vec![
        BinaryOp::Or,
        BinaryOp::And,
        BinaryOp::Eq,
        BinaryOp::NotEq,
        BinaryOp::Lt,
        BinaryOp::Le,
        BinaryOp::Gt,
        BinaryOp::Ge,
        BinaryOp::Add,
        BinaryOp::Sub,
        BinaryOp::Mul,
        BinaryOp::Div,
    ])
}

fn expr() -> impl Strategy<Value = Expr> {
    expr_leaf().prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            (binop(), inner.clone(), inner.clone()).prop_map(|(op, l, r)| Expr::binary(op, l, r)),
            inner.clone().prop_map(|e| Expr::Unary { op: UnaryOp::Not, expr: Box::new(e) }),
            inner.clone().prop_map(|e| Expr::Unary { op: UnaryOp::Neg, expr: Box::new(e) }),
            (inner.clone(), any::<bool>()).prop_map(|(e, negated)| Expr::IsNull { expr: Box::new(e), negated }),
            (ident(), prop::collection::vec(inner.clone(), 0..3), any::<bool>()).prop_map(|(name, args, distinct)| {
                let distinct = distinct && !args.is_empty();
                Expr::Function { name, args, distinct, star: false }
            }),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Function {
                name: Ident::new("DISTANCE"),
                args: vec![a, b],
                distinct: false,
                star: false,
            }),
            prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::Tuple),
            (inner, any::<bool>()).prop_map(|(e, negated)| Expr::InSubquery {
                expr: Box::new(e),
                query: Box::new(simple_query("u")),
                negated,
            }),
        ]
    })
}

fn simple_query(rel: &str) -> Query {
    parse(&format!("SELECT id FROM {rel}")).unwrap()
}

fn call() -> impl Strategy<Value = Call> {
    (ident(), prop::option::of(prop::collection::vec(literal().prop_map(Expr::Literal), 0..3)))
        .prop_map(|(name, args)| Call { name, args })
}

fn by_spec() -> impl Strategy<Value = BySpec> {
    prop_oneof![
        column().prop_map(BySpec::Attribute),
        (column(), call()).prop_map(|(attr, function)| BySpec::AttributeWith { attr, function }),
        expr()
            .prop_filter("column-shaped expressions print as attributes", |e| !matches!(e, Expr::Column(_)))
            .prop_map(BySpec::Expr),
    ]
}

fn relation() -> impl Strategy<Value = FromItem> {
    (ident(), prop::option::of(ident())).prop_map(|(name, alias)| FromItem::Relation { name, alias })
}

fn from_item() -> impl Strategy<Value = FromItem> {
    relation().prop_recursive(3, 12, 3, |inner| {
        prop_oneof![
            (
                prop::collection::vec(
                    (expr_leaf(), prop::option::of(ident())).prop_map(|(expr, alias)| QueryObject { expr, alias }),
                    0..3
                ),
                prop::collection::vec(inner.clone(), 1..3),
                by_spec(),
                prop::option::of(call()),
                prop::option::of(ident()),
            )
                .prop_map(|(objects, sources, by, method, alias)| {
                    FromItem::SimSearch(Box::new(SimSearch {
                        objects,
                        sources,
                        by,
                        method,
                        alias,
                        pos: Default::default(),
                    }))
                }),
            (inner.clone(), inner.clone(), prop::option::of(expr())).prop_map(|(l, r, on)| FromItem::Join {
                left: Box::new(l),
                right: Box::new(r),
                kind: on.map_or(JoinKind::Natural, JoinKind::Inner),
            }),
            (inner, prop::option::of(ident())).prop_map(|(f, alias)| FromItem::Subquery {
                query: Box::new(Query { from: vec![f], ..simple_query("t") }),
                alias,
            }),
        ]
    })
}

fn select_item() -> impl Strategy<Value = SelectItem> {
    prop_oneof![
        Just(SelectItem::Wildcard),
        ident().prop_map(SelectItem::QualifiedWildcard),
        (expr(), prop::option::of(ident())).prop_map(|(expr, alias)| SelectItem::Expr { expr, alias }),
    ]
}

pub fn query() -> impl Strategy<Value = Query> {
    (
        any::<bool>(),
        prop::option::of(prop_oneof![(1u64..500).prop_map(Limit::Top), Just(Limit::All)]),
        prop::collection::vec(select_item(), 1..4),
        prop::collection::vec(from_item(), 1..3),
        prop::option::of(expr()),
        prop::collection::vec(expr(), 0..2),
        prop::option::of(expr()),
        prop::collection::vec((expr(), any::<bool>()).prop_map(|(expr, descending)| OrderItem { expr, descending }), 0..3),
    )
        .prop_map(|(distinct, limit, projection, from, selection, group_by, having, order_by)| Query {
            distinct,
            limit,
            projection,
            from,
            selection,
            group_by,
            having,
            order_by,
        })
}
