//! Recursive-descent parser.

use super::ast::*;
use super::lexer::{tokenize, Keyword, Token, TokenKind};
use crate::error::{Error, Pos, Result};

/// Parses one query, optionally terminated by `;`.
pub fn parse(text: &str) -> Result<Query> {
    let mut p = Parser::new(tokenize(text)?);
    let q = p.query()?;
    p.eat(&TokenKind::Semicolon);
    p.expect_end()?;
    Ok(q)
}

/// Parses a standalone expression.
pub fn parse_expr(text: &str) -> Result<Expr> {
    let mut p = Parser::new(tokenize(text)?);
    let e = p.expr()?;
    p.expect_end()?;
    Ok(e)
}

struct Parser {
    tokens: Vec<Token>,
    i: usize,
}

impl Parser {
    fn new(tokens: Vec<Token>) -> Self {
        Parser { tokens, i: 0 }
    }

    fn peek(&self) -> &TokenKind {
        &self.tokens[self.i].kind
    }

    fn peek_at(&self, n: usize) -> &TokenKind {
        let j = (self.i + n).min(self.tokens.len() - 1);
        &self.tokens[j].kind
    }

    fn pos(&self) -> Pos {
        self.tokens[self.i].pos
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.i].clone();
        if self.i + 1 < self.tokens.len() {
            self.i += 1;
        }
        t
    }

    fn at_kw(&self, k: Keyword) -> bool {
        *self.peek() == TokenKind::Keyword(k)
    }

    fn eat_kw(&mut self, k: Keyword) -> bool {
        if self.at_kw(k) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek() == kind {
            self.advance();
            true
        } else {
            false
        }
    }

    fn error(&self, expected: &[&str]) -> Error {
        let found = &self.tokens[self.i];
        let what = match &found.kind {
            TokenKind::Eof => "end of input".to_string(),
            TokenKind::Ident(s) => format!("'{s}'"),
            TokenKind::Keyword(_) => format!("'{}'", found.text),
            other => other.to_string(),
        };
        Error::Syntax {
            pos: found.pos,
            message: format!("expected {}, found {what}", expected.join(" or ")),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn error_msg(&self, message: impl Into<String>) -> Error {
        Error::Syntax {
            pos: self.pos(),
            message: message.into(),
            expected: Vec::new(),
        }
    }

    fn expect_kw(&mut self, k: Keyword) -> Result<()> {
        if self.eat_kw(k) {
            Ok(())
        } else {
            Err(self.error(&[k.as_str()]))
        }
    }

    fn expect(&mut self, kind: TokenKind, shown: &str) -> Result<()> {
        if self.eat(&kind) {
            Ok(())
        } else {
            Err(self.error(&[shown]))
        }
    }

    fn expect_end(&self) -> Result<()> {
        if *self.peek() == TokenKind::Eof {
            Ok(())
        } else {
            Err(self.error(&["end of statement"]))
        }
    }

    fn ident(&mut self, what: &str) -> Result<Ident> {
        match self.peek().clone() {
            TokenKind::Ident(s) => {
                let pos = self.pos();
                self.advance();
                Ok(Ident::at(s, pos))
            }
            _ => Err(self.error(&[what])),
        }
    }

    fn alias(&mut self) -> Result<Option<Ident>> {
        if self.eat_kw(Keyword::As) {
            Ok(Some(self.ident("alias")?))
        } else {
            Ok(None)
        }
    }

    fn query(&mut self) -> Result<Query> {
        self.expect_kw(Keyword::Select)?;
        let mut distinct = false;
        let mut limit = None;
        loop {
            let pos = self.pos();
            if self.eat_kw(Keyword::Distinct) {
                if distinct {
                    return Err(Error::Syntax { pos, message: "DISTINCT given twice".into(), expected: vec![] });
                }
                distinct = true;
            } else if self.at_kw(Keyword::Top) || self.at_kw(Keyword::All) {
                if limit.is_some() {
                    return Err(self.error_msg("only one of TOP n or ALL may be given"));
                }
                if self.eat_kw(Keyword::All) {
                    limit = Some(Limit::All);
                } else {
                    self.advance();
                    match *self.peek() {
                        TokenKind::Integer(n) if n >= 1 => {
                            self.advance();
                            limit = Some(Limit::Top(n as u64));
                        }
                        TokenKind::Integer(_) => return Err(self.error_msg("TOP n requires n >= 1")),
                        _ => return Err(self.error(&["positive integer"])),
                    }
                }
            } else {
                break;
            }
        }
        if self.at_kw(Keyword::From) {
            return Err(Error::Syntax {
                pos: self.pos(),
                message: "empty select list".into(),
                expected: vec!["select item".into()],
            });
        }
        let mut projection = vec![self.select_item()?];
        while self.eat(&TokenKind::Comma) {
            projection.push(self.select_item()?);
        }
        self.expect_kw(Keyword::From)?;
        let mut from = vec![self.source_item()?];
        while self.eat(&TokenKind::Comma) {
            from.push(self.source_item()?);
        }
        let selection = if self.eat_kw(Keyword::Where) { Some(self.expr()?) } else { None };
        let mut group_by = Vec::new();
        if self.eat_kw(Keyword::Group) {
            self.expect_kw(Keyword::By)?;
            group_by.push(self.expr()?);
            while self.eat(&TokenKind::Comma) {
                group_by.push(self.expr()?);
            }
        }
        let having = if self.eat_kw(Keyword::Having) { Some(self.expr()?) } else { None };
        let mut order_by = Vec::new();
        if self.eat_kw(Keyword::Order) {
            self.expect_kw(Keyword::By)?;
            loop {
                let expr = self.expr()?;
                let descending = if self.eat_kw(Keyword::Desc) {
                    true
                } else {
                    self.eat_kw(Keyword::Asc);
                    false
                };
                order_by.push(OrderItem { expr, descending });
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
        }
        Ok(Query {
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

    fn select_item(&mut self) -> Result<SelectItem> {
        if self.eat(&TokenKind::Star) {
            return Ok(SelectItem::Wildcard);
        }
        if let (TokenKind::Ident(_), TokenKind::Dot, TokenKind::Star) = (self.peek(), self.peek_at(1), self.peek_at(2)) {
            let q = self.ident("qualifier")?;
            self.advance();
            self.advance();
            return Ok(SelectItem::QualifiedWildcard(q));
        }
        let expr = self.expr()?;
        let alias = self.alias()?;
        Ok(SelectItem::Expr { expr, alias })
    }

    fn source_item(&mut self) -> Result<FromItem> {
        let mut left = self.source_primary()?;
        loop {
            let kind_natural = if self.at_kw(Keyword::Natural) {
                self.advance();
                self.expect_kw(Keyword::Join)?;
                true
            } else if self.at_kw(Keyword::Inner) {
                self.advance();
                self.expect_kw(Keyword::Join)?;
                false
            } else if self.eat_kw(Keyword::Join) {
                false
            } else {
                return Ok(left);
            };
            let right = self.source_primary()?;
            let kind = if kind_natural {
                JoinKind::Natural
            } else {
                self.expect_kw(Keyword::On)?;
                JoinKind::Inner(self.expr()?)
            };
            left = FromItem::Join {
                left: Box::new(left),
                right: Box::new(right),
                kind,
            };
        }
    }

    fn source_primary(&mut self) -> Result<FromItem> {
        match self.peek() {
            TokenKind::Keyword(Keyword::Simsearch) => Ok(FromItem::SimSearch(Box::new(self.simsearch()?))),
            TokenKind::LParen => {
                self.advance();
                if self.at_kw(Keyword::Select) {
                    let query = Box::new(self.query()?);
                    self.expect(TokenKind::RParen, "')'")?;
                    let alias = self.alias()?;
                    Ok(FromItem::Subquery { query, alias })
                } else {
                    let item = self.source_item()?;
                    self.expect(TokenKind::RParen, "')'")?;
                    Ok(item)
                }
            }
            TokenKind::Ident(_) => {
                let name = self.ident("relation name")?;
                let alias = self.alias()?;
                Ok(FromItem::Relation { name, alias })
            }
            _ => Err(self.error(&["relation name", "SIMSEARCH", "'('"])),
        }
    }

    fn simsearch(&mut self) -> Result<SimSearch> {
        let pos = self.pos();
        self.expect_kw(Keyword::Simsearch)?;
        let mut objects = Vec::new();
        if !self.at_kw(Keyword::In) {
            loop {
                let expr = self.unary()?;
                let alias = self.alias()?;
                objects.push(QueryObject { expr, alias });
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
        }
        self.expect_kw(Keyword::In)?;
        let mut sources = vec![self.source_item()?];
        while self.eat(&TokenKind::Comma) {
            sources.push(self.source_item()?);
        }
        if !self.at_kw(Keyword::By) {
            return Err(self.error(&["BY", "','"]));
        }
        self.advance();
        let expr = self.expr()?;
        let by = match expr {
            Expr::Column(attr) => {
                if self.at_kw(Keyword::Distance) && *self.peek_at(1) == TokenKind::Keyword(Keyword::Function) {
                    self.advance();
                    self.advance();
                    BySpec::AttributeWith {
                        attr,
                        function: self.call()?,
                    }
                } else {
                    BySpec::Attribute(attr)
                }
            }
            other => BySpec::Expr(other),
        };
        let method = if self.eat_kw(Keyword::Method) { Some(self.call()?) } else { None };
        let alias = self.alias()?;
        Ok(SimSearch {
            objects,
            sources,
            by,
            method,
            alias,
            pos,
        })
    }

    fn call(&mut self) -> Result<Call> {
        let name = self.ident("function name")?;
        let args = if self.eat(&TokenKind::LParen) {
            let mut args = Vec::new();
            if !self.eat(&TokenKind::RParen) {
                loop {
                    args.push(self.expr()?);
                    if !self.eat(&TokenKind::Comma) {
                        break;
                    }
                }
                self.expect(TokenKind::RParen, "')'")?;
            }
            Some(args)
        } else {
            None
        };
        Ok(Call { name, args })
    }

    pub fn expr(&mut self) -> Result<Expr> {
        let mut left = self.and()?;
        while self.eat_kw(Keyword::Or) {
            left = Expr::binary(BinaryOp::Or, left, self.and()?);
        }
        Ok(left)
    }

    fn and(&mut self) -> Result<Expr> {
        let mut left = self.not()?;
        while self.eat_kw(Keyword::And) {
            left = Expr::binary(BinaryOp::And, left, self.not()?);
        }
        Ok(left)
    }

    fn not(&mut self) -> Result<Expr> {
        if self.eat_kw(Keyword::Not) {
            return Ok(Expr::Unary {
                op: UnaryOp::Not,
                expr: Box::new(self.not()?),
            });
        }
        self.comparison()
    }

    fn comparison(&mut self) -> Result<Expr> {
        let mut left = self.additive()?;
        loop {
            let op = match self.peek() {
                TokenKind::Eq => BinaryOp::Eq,
                TokenKind::NotEq => BinaryOp::NotEq,
                TokenKind::Lt => BinaryOp::Lt,
                TokenKind::Le => BinaryOp::Le,
                TokenKind::Gt => BinaryOp::Gt,
                TokenKind::Ge => BinaryOp::Ge,
                TokenKind::Keyword(Keyword::In) => {
                    self.advance();
                    left = self.in_subquery(left, false)?;
                    continue;
                }
                TokenKind::Keyword(Keyword::Not) if *self.peek_at(1) == TokenKind::Keyword(Keyword::In) => {
                    self.advance();
                    self.advance();
                    left = self.in_subquery(left, true)?;
                    continue;
                }
                TokenKind::Keyword(Keyword::Is) => {
                    self.advance();
                    let negated = self.eat_kw(Keyword::Not);
                    self.expect_kw(Keyword::Null)?;
                    left = Expr::IsNull {
                        expr: Box::new(left),
                        negated,
                    };
                    continue;
                }
                _ => return Ok(left),
            };
            self.advance();
            left = Expr::binary(op, left, self.additive()?);
        }
    }

    fn in_subquery(&mut self, left: Expr, negated: bool) -> Result<Expr> {
        self.expect(TokenKind::LParen, "'('")?;
        if !self.at_kw(Keyword::Select) {
            return Err(self.error(&["SELECT"]));
        }
        let query = Box::new(self.query()?);
        self.expect(TokenKind::RParen, "')'")?;
        Ok(Expr::InSubquery {
            expr: Box::new(left),
            query,
            negated,
        })
    }

    fn additive(&mut self) -> Result<Expr> {
        let mut left = self.multiplicative()?;
        loop {
            let op = match self.peek() {
                TokenKind::Plus => BinaryOp::Add,
                TokenKind::Minus => BinaryOp::Sub,
                _ => return Ok(left),
            };
            self.advance();
            left = Expr::binary(op, left, self.multiplicative()?);
        }
    }

    fn multiplicative(&mut self) -> Result<Expr> {
        let mut left = self.unary()?;
        loop {
            let op = match self.peek() {
                TokenKind::Star => BinaryOp::Mul,
                TokenKind::Slash => BinaryOp::Div,
                _ => return Ok(left),
            };
            self.advance();
            left = Expr::binary(op, left, self.unary()?);
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(&TokenKind::Minus) {
            return match *self.peek() {
                TokenKind::Integer(v) => {
                    self.advance();
                    Ok(Expr::Literal(Literal::Integer(-v)))
                }
                TokenKind::Float(v) => {
                    self.advance();
                    Ok(Expr::Literal(Literal::Float(-v)))
                }
                _ => Ok(Expr::Unary {
                    op: UnaryOp::Neg,
                    expr: Box::new(self.unary()?),
                }),
            };
        }
        self.primary()
    }

    fn signed_number(&mut self) -> Result<f64> {
        let neg = self.eat(&TokenKind::Minus);
        let v = match *self.peek() {
            TokenKind::Integer(v) => v as f64,
            TokenKind::Float(v) => v,
            _ => return Err(self.error(&["number"])),
        };
        self.advance();
        Ok(if neg { -v } else { v })
    }

    fn primary(&mut self) -> Result<Expr> {
        let pos = self.pos();
        match self.peek().clone() {
            TokenKind::Integer(v) => {
                self.advance();
                Ok(Expr::Literal(Literal::Integer(v)))
            }
            TokenKind::Float(v) => {
                self.advance();
                Ok(Expr::Literal(Literal::Float(v)))
            }
            TokenKind::String(s) => {
                self.advance();
                Ok(Expr::Literal(Literal::String(s)))
            }
            TokenKind::Keyword(Keyword::Null) => {
                self.advance();
                Ok(Expr::Literal(Literal::Null))
            }
            TokenKind::Param(p) => {
                self.advance();
                Ok(Expr::Param(Ident::at(p, pos)))
            }
            TokenKind::LBracket => {
                self.advance();
                let mut v = Vec::new();
                if !self.eat(&TokenKind::RBracket) {
                    loop {
                        v.push(self.signed_number()?);
                        if !self.eat(&TokenKind::Comma) {
                            break;
                        }
                    }
                    self.expect(TokenKind::RBracket, "']'")?;
                }
                Ok(Expr::Literal(Literal::Vector(v)))
            }
            TokenKind::LParen => {
                self.advance();
                if self.at_kw(Keyword::Select) {
                    let q = self.query()?;
                    self.expect(TokenKind::RParen, "')'")?;
                    return Ok(Expr::Subquery(Box::new(q)));
                }
                let mut items = vec![self.expr()?];
                while self.eat(&TokenKind::Comma) {
                    items.push(self.expr()?);
                }
                self.expect(TokenKind::RParen, "')'")?;
                Ok(if items.len() == 1 { items.pop().unwrap() } else { Expr::Tuple(items) })
            }
            TokenKind::Keyword(Keyword::Distance) => {
                let text = self.advance().text;
                let name = Ident::at(text, pos);
                if *self.peek() == TokenKind::LParen {
                    self.function(name)
                } else {
                    Ok(Expr::Column(ColumnRef { qualifier: None, name }))
                }
            }
            TokenKind::Ident(word) => {
                self.advance();
                let name = Ident::at(word, pos);
                match self.peek().clone() {
                    TokenKind::LParen => self.function(name),
                    TokenKind::String(s) if name.matches("date") => {
                        self.advance();
                        Ok(Expr::Literal(Literal::Date(s)))
                    }
                    TokenKind::Dot => {
                        self.advance();
                        let pos = self.pos();
                        let column = match self.peek().clone() {
                            TokenKind::Ident(s) => s,
                            TokenKind::Keyword(Keyword::Distance) => self.tokens[self.i].text.clone(),
                            _ => return Err(self.error(&["attribute name"])),
                        };
                        self.advance();
                        Ok(Expr::Column(ColumnRef {
                            qualifier: Some(name),
                            name: Ident::at(column, pos),
                        }))
                    }
                    _ => Ok(Expr::Column(ColumnRef { qualifier: None, name })),
                }
            }
            _ => Err(self.error(&["expression"])),
        }
    }

    fn function(&mut self, name: Ident) -> Result<Expr> {
        self.expect(TokenKind::LParen, "'('")?;
        if self.eat(&TokenKind::Star) {
            self.expect(TokenKind::RParen, "')'")?;
            return Ok(Expr::Function {
                name,
                args: Vec::new(),
                distinct: false,
                star: true,
            });
        }
        let distinct = self.eat_kw(Keyword::Distinct);
        let mut args = Vec::new();
        if !self.eat(&TokenKind::RParen) {
            loop {
                args.push(self.expr()?);
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
            self.expect(TokenKind::RParen, "')'")?;
        }
        Ok(Expr::Function {
            name,
            args,
            distinct,
            star: false,
        })
    }
}
