//! Abstract syntax tree of a SimSeQL query.

use crate::error::Pos;

/// A name as written. Equality ignores the position.
#[derive(Clone, Debug, Eq)]
pub struct Ident {
    pub value: String,
    pub pos: Pos,
}

impl Ident {
    pub fn new(value: impl Into<String>) -> Self {
        Ident {
            value: value.into(),
            pos: Pos::default(),
        }
    }

    pub fn at(value: impl Into<String>, pos: Pos) -> Self {
        Ident {
            value: value.into(),
            pos,
        }
    }

    pub fn matches(&self, other: &str) -> bool {
        self.value.eq_ignore_ascii_case(other)
    }
}

impl PartialEq for Ident {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Query {
    pub distinct: bool,
    pub limit: Option<Limit>,
    pub projection: Vec<SelectItem>,
    pub from: Vec<FromItem>,
    pub selection: Option<Expr>,
    pub group_by: Vec<Expr>,
    pub having: Option<Expr>,
    pub order_by: Vec<OrderItem>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Limit {
    Top(u64),
    All,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SelectItem {
    Wildcard,
    QualifiedWildcard(Ident),
    Expr { expr: Expr, alias: Option<Ident> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrderItem {
    pub expr: Expr,
    pub descending: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum FromItem {
    Relation { name: Ident, alias: Option<Ident> },
    Subquery { query: Box<Query>, alias: Option<Ident> },
    SimSearch(Box<SimSearch>),
    Join { left: Box<FromItem>, right: Box<FromItem>, kind: JoinKind },
}

#[derive(Clone, Debug, PartialEq)]
pub enum JoinKind {
    Inner(Expr),
    Natural,
}

/// Equality ignores `pos`.
#[derive(Clone, Debug)]
pub struct SimSearch {
    pub objects: Vec<QueryObject>,
    /// Searched relations; several imply their Cartesian product.
    pub sources: Vec<FromItem>,
    pub by: BySpec,
    pub method: Option<Call>,
    pub alias: Option<Ident>,
    pub pos: Pos,
}

impl PartialEq for SimSearch {
    fn eq(&self, other: &Self) -> bool {
        self.objects == other.objects
            && self.sources == other.sources
            && self.by == other.by
            && self.method == other.method
            && self.alias == other.alias
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QueryObject {
    pub expr: Expr,
    pub alias: Option<Ident>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum BySpec {
    /// `BY attr`: the attribute's default distance.
    Attribute(ColumnRef),
    /// `BY attr DISTANCE FUNCTION f[(args)]`.
    AttributeWith { attr: ColumnRef, function: Call },
    /// `BY expr`: a distance built from calls, `DISTANCE(x, y)` and numbers.
    Expr(Expr),
}

/// `name` or `name(args)`; `args` is `None` without parentheses.
#[derive(Clone, Debug, PartialEq)]
pub struct Call {
    pub name: Ident,
    pub args: Option<Vec<Expr>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ColumnRef {
    pub qualifier: Option<Ident>,
    pub name: Ident,
}

impl ColumnRef {
    pub fn pos(&self) -> Pos {
        self.qualifier.as_ref().unwrap_or(&self.name).pos
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Literal {
    Integer(i64),
    Float(f64),
    String(String),
    Null,
    Vector(Vec<f64>),
    /// `date 'YYYY-MM-DD'`, kept as text.
    Date(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinaryOp {
    Or,
    And,
    Eq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
    Mul,
    Div,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Or => "OR",
            BinaryOp::And => "AND",
            BinaryOp::Eq => "=",
            BinaryOp::NotEq => "<>",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
        }
    }

    /// Binding strength; larger binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinaryOp::Or => 1,
            BinaryOp::And => 2,
            BinaryOp::Eq | BinaryOp::NotEq | BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge => 4,
            BinaryOp::Add | BinaryOp::Sub => 5,
            BinaryOp::Mul | BinaryOp::Div => 6,
        }
    }

    pub fn is_comparison(self) -> bool {
        self.precedence() == 4
    }
}

pub const NOT_PRECEDENCE: u8 = 3;
pub const UNARY_PRECEDENCE: u8 = 7;
pub const ATOM_PRECEDENCE: u8 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnaryOp {
    Not,
    Neg,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Literal(Literal),
    /// `:name`.
    Param(Ident),
    /// Attribute reference; `distance`, `ds.distance` and `ds.rank` are
    /// column references resolved by the binder.
    Column(ColumnRef),
    /// Function call; `DISTANCE(x, y)` is a call named `DISTANCE`.
    Function {
        name: Ident,
        args: Vec<Expr>,
        distinct: bool,
        /// `count(*)`.
        star: bool,
    },
    /// Parenthesized list of two or more expressions.
    Tuple(Vec<Expr>),
    Subquery(Box<Query>),
    InSubquery {
        expr: Box<Expr>,
        query: Box<Query>,
        negated: bool,
    },
    Binary {
        op: BinaryOp,
        left: Box<Expr>,
        right: Box<Expr>,
    },
    Unary {
        op: UnaryOp,
        expr: Box<Expr>,
    },
    IsNull {
        expr: Box<Expr>,
        negated: bool,
    },
}

impl Expr {
    pub fn column(name: &str) -> Self {
        Expr::Column(ColumnRef {
            qualifier: None,
            name: Ident::new(name),
        })
    }

    pub fn binary(op: BinaryOp, left: Expr, right: Expr) -> Self {
        Expr::Binary {
            op,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn precedence(&self) -> u8 {
        match self {
            Expr::Binary { op, .. } => op.precedence(),
            Expr::InSubquery { .. } | Expr::IsNull { .. } => 4,
            Expr::Unary { op: UnaryOp::Not, .. } => NOT_PRECEDENCE,
            Expr::Unary { op: UnaryOp::Neg, .. } => UNARY_PRECEDENCE,
            Expr::Literal(Literal::Integer(v)) if *v < 0 => UNARY_PRECEDENCE,
            Expr::Literal(Literal::Float(v)) if v.is_sign_negative() => UNARY_PRECEDENCE,
            _ => ATOM_PRECEDENCE,
        }
    }

    /// First source position found in the expression.
    pub fn pos(&self) -> Option<Pos> {
        match self {
            Expr::Param(i) => Some(i.pos),
            Expr::Column(c) => Some(c.pos()),
            Expr::Function { name, .. } => Some(name.pos),
            Expr::Tuple(es) => es.iter().find_map(Expr::pos),
            Expr::InSubquery { expr, .. } | Expr::Unary { expr, .. } | Expr::IsNull { expr, .. } => expr.pos(),
            Expr::Binary { left, right, .. } => left.pos().or_else(|| right.pos()),
            Expr::Literal(_) | Expr::Subquery(_) => None,
        }
    }
}
