//! Catalog and data statements understood besides queries.
//!
//! ```text
//! CREATE TYPE name AS representation [DISTANCE function]
//! CREATE RELATION name (attr type [DISTANCE function [ALSO function]...], ...)
//! CREATE INDEX [name] ON rel(attr) USING metric|ordered [WITH DISTANCE function[(args)]]
//! LOAD rel FROM 'file'
//! SAVE TO 'directory'
//! RESTORE FROM 'directory'
//! EXPLAIN query
//! ```
//!
//! The clauses of `CREATE INDEX` may come in any order.

use std::fmt;

use simseql_core::catalog::IndexKind;
use simseql_core::datamodel::Attribute;
use simseql_core::parser::{tokenize, Keyword, Token, TokenKind};
use simseql_core::{Error, Pos, Value};

#[derive(Clone, Debug, PartialEq)]
pub struct AttributeDecl {
    pub name: String,
    pub data_type: String,
    pub default_distance: Option<String>,
    pub other_distances: Vec<String>,
}

impl From<&Attribute> for AttributeDecl {
    fn from(a: &Attribute) -> Self {
        AttributeDecl {
            name: a.name.to_string(),
            data_type: a.data_type.to_string(),
            default_distance: a.default_distance.as_ref().map(|d| d.to_string()),
            other_distances: a.other_distances.iter().map(|d| d.to_string()).collect(),
        }
    }
}

impl fmt::Display for AttributeDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.name, self.data_type)?;
        if let Some(d) = &self.default_distance {
            write!(f, " DISTANCE {d}")?;
            for o in &self.other_distances {
                write!(f, " ALSO {o}")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndexDecl {
    pub name: Option<String>,
    pub relation: String,
    pub attribute: String,
    pub kind: IndexKind,
    pub distance: Option<(String, Vec<Value>)>,
}

fn literal(v: &Value) -> String {
    match v {
        Value::String(s) => format!("'{}'", s.replace('\'', "''")),
        other => other.to_string(),
    }
}

impl fmt::Display for IndexDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("CREATE INDEX ")?;
        if let Some(n) = &self.name {
            write!(f, "{n} ")?;
        }
        let kind = match self.kind {
            IndexKind::Metric => "metric",
            IndexKind::Ordered => "ordered",
        };
        write!(f, "ON {}({}) USING {kind}", self.relation, self.attribute)?;
        if let Some((d, args)) = &self.distance {
            write!(f, " WITH DISTANCE {d}")?;
            if !args.is_empty() {
                let args: Vec<String> = args.iter().map(literal).collect();
                write!(f, "({})", args.join(", "))?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    CreateType {
        name: String,
        representation: String,
        distance: Option<String>,
    },
    CreateRelation {
        name: String,
        attributes: Vec<AttributeDecl>,
    },
    CreateIndex(IndexDecl),
    Load {
        relation: String,
        path: String,
    },
    Save {
        directory: String,
    },
    Restore {
        directory: String,
    },
    /// `EXPLAIN`; the query is the statement text from `offset` on.
    Explain {
        offset: usize,
    },
    Query,
}

/// Recognizes the statement form of `text`. Anything that is not one of
/// the commands above is taken to be a query.
pub fn classify(text: &str) -> Result<Command, Error> {
    let tokens = tokenize(text)?;
    let word = match &tokens[0].kind {
        TokenKind::Ident(w) => w.to_ascii_uppercase(),
        _ => return Ok(Command::Query),
    };
    let mut p = Parser { tokens, i: 1 };
    let cmd = match word.as_str() {
        "CREATE" => p.create()?,
        "LOAD" => {
            let relation = p.ident("relation name")?;
            p.keyword(Keyword::From)?;
            let path = p.string("file name")?;
            Command::Load { relation, path }
        }
        "SAVE" => {
            p.word("TO")?;
            Command::Save {
                directory: p.string("directory name")?,
            }
        }
        "RESTORE" => {
            p.keyword(Keyword::From)?;
            Command::Restore {
                directory: p.string("directory name")?,
            }
        }
        "EXPLAIN" => {
            return Ok(Command::Explain {
                offset: p.tokens[1].pos.offset,
            })
        }
        _ => return Ok(Command::Query),
    };
    p.end()?;
    Ok(cmd)
}

/// `text` with everything before `offset` blanked out, line breaks kept.
pub fn blank_prefix(text: &str, offset: usize) -> String {
    let mut out: String = text[..offset]
        .chars()
        .map(|c| if c == '\n' { '\n' } else { ' ' })
        .collect();
    out.push_str(&text[offset..]);
    out
}

struct Parser {
    tokens: Vec<Token>,
    i: usize,
}

fn syntax(pos: Pos, message: String, expected: &[&str]) -> Error {
    Error::Syntax {
        pos,
        message,
        expected: expected.iter().map(|s| s.to_string()).collect(),
    }
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.i.min(self.tokens.len() - 1)]
    }

    fn advance(&mut self) -> Token {
        let t = self.peek().clone();
        if self.i < self.tokens.len() - 1 {
            self.i += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> Error {
        let t = self.peek();
        syntax(
            t.pos,
            format!("expected {}, found {}", expected.join(" or "), t.kind),
            expected,
        )
    }

    fn is_word(&self, word: &str) -> bool {
        matches!(&self.peek().kind, TokenKind::Ident(w) if w.eq_ignore_ascii_case(word))
    }

    fn word(&mut self, word: &str) -> Result<(), Error> {
        if self.is_word(word) {
            self.advance();
            Ok(())
        } else {
            Err(self.error(&[word]))
        }
    }

    fn keyword(&mut self, k: Keyword) -> Result<(), Error> {
        if self.peek().kind == TokenKind::Keyword(k) {
            self.advance();
            Ok(())
        } else {
            Err(self.error(&[k.as_str()]))
        }
    }

    fn punct(&mut self, kind: TokenKind) -> Result<(), Error> {
        if self.peek().kind == kind {
            self.advance();
            Ok(())
        } else {
            let shown = kind.to_string();
            Err(self.error(&[shown.as_str()]))
        }
    }

    fn eat(&mut self, kind: TokenKind) -> bool {
        if self.peek().kind == kind {
            self.advance();
            true
        } else {
            false
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, Error> {
        match &self.peek().kind {
            TokenKind::Ident(s) => {
                let s = s.clone();
                self.advance();
                Ok(s)
            }
            _ => Err(self.error(&[what])),
        }
    }

    fn string(&mut self, what: &str) -> Result<String, Error> {
        match &self.peek().kind {
            TokenKind::String(s) => {
                let s = s.clone();
                self.advance();
                Ok(s)
            }
            _ => Err(self.error(&[what])),
        }
    }

    fn end(&mut self) -> Result<(), Error> {
        self.eat(TokenKind::Semicolon);
        if self.peek().kind == TokenKind::Eof {
            Ok(())
        } else {
            Err(self.error(&["end of statement"]))
        }
    }

    fn create(&mut self) -> Result<Command, Error> {
        if self.is_word("TYPE") {
            self.advance();
            let name = self.ident("type name")?;
            self.keyword(Keyword::As)?;
            let representation = self.ident("representation")?;
            let distance = if self.eat(TokenKind::Keyword(Keyword::Distance)) {
                Some(self.ident("distance function")?)
            } else {
                None
            };
            Ok(Command::CreateType {
                name,
                representation,
                distance,
            })
        } else if self.is_word("RELATION") {
            self.advance();
            let name = self.ident("relation name")?;
            self.punct(TokenKind::LParen)?;
            let mut attributes = vec![self.attribute()?];
            while self.eat(TokenKind::Comma) {
                attributes.push(self.attribute()?);
            }
            self.punct(TokenKind::RParen)?;
            Ok(Command::CreateRelation { name, attributes })
        } else if self.is_word("INDEX") {
            self.advance();
            self.index().map(Command::CreateIndex)
        } else {
            Err(self.error(&["TYPE", "RELATION", "INDEX"]))
        }
    }

    fn attribute(&mut self) -> Result<AttributeDecl, Error> {
        let name = self.ident("attribute name")?;
        let data_type = self.ident("data type")?;
        let mut decl = AttributeDecl {
            name,
            data_type,
            default_distance: None,
            other_distances: Vec::new(),
        };
        if self.eat(TokenKind::Keyword(Keyword::Distance)) {
            decl.default_distance = Some(self.ident("distance function")?);
            while self.is_word("ALSO") {
                self.advance();
                decl.other_distances.push(self.ident("distance function")?);
            }
        }
        Ok(decl)
    }

    fn index(&mut self) -> Result<IndexDecl, Error> {
        let name = match &self.peek().kind {
            TokenKind::Ident(_) if !self.is_word("USING") && !self.is_word("WITH") => Some(self.ident("index name")?),
            _ => None,
        };
        let mut target = None;
        let mut kind = None;
        let mut distance = None;
        loop {
            let start = self.peek().pos;
            let duplicate = |clause: &str| syntax(start, format!("{clause} given twice"), &[]);
            if self.eat(TokenKind::Keyword(Keyword::On)) {
                if target.is_some() {
                    return Err(duplicate("ON"));
                }
                let rel = self.ident("relation name")?;
                self.punct(TokenKind::LParen)?;
                let attr = self.ident("attribute name")?;
                self.punct(TokenKind::RParen)?;
                target = Some((rel, attr));
            } else if self.is_word("USING") {
                if kind.is_some() {
                    return Err(duplicate("USING"));
                }
                self.advance();
                kind = Some(if self.is_word("metric") {
                    IndexKind::Metric
                } else if self.is_word("ordered") {
                    IndexKind::Ordered
                } else {
                    return Err(self.error(&["metric", "ordered"]));
                });
                self.advance();
            } else if self.is_word("WITH") {
                if distance.is_some() {
                    return Err(duplicate("WITH DISTANCE"));
                }
                self.advance();
                self.keyword(Keyword::Distance)?;
                let f = self.ident("distance function")?;
                let mut args = Vec::new();
                if self.eat(TokenKind::LParen)
                    && !self.eat(TokenKind::RParen) {
                        args.push(self.literal()?);
                        while self.eat(TokenKind::Comma) {
                            args.push(self.literal()?);
                        }
                        self.punct(TokenKind::RParen)?;
                    }
                distance = Some((f, args));
            } else {
                break;
            }
        }
        let Some((relation, attribute)) = target else {
            return Err(self.error(&["ON"]));
        };
        let Some(kind) = kind else {
            return Err(self.error(&["USING"]));
        };
        Ok(IndexDecl {
            name,
            relation,
            attribute,
            kind,
            distance,
        })
    }

    fn literal(&mut self) -> Result<Value, Error> {
        let negative = self.eat(TokenKind::Minus);
        let v = match self.peek().kind.clone() {
            TokenKind::Integer(v) => Value::Integer(if negative { -v } else { v }),
            TokenKind::Float(v) => Value::Float(if negative { -v } else { v }),
            TokenKind::String(s) if !negative => Value::string(s),
            _ => return Err(self.error(&["literal"])),
        };
        self.advance();
        Ok(v)
    }
}
