//! Tokenizer for SimSeQL text.

use std::fmt;

use crate::error::{Error, Pos, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Keyword {
    All,
    And,
    As,
    Asc,
    By,
    Desc,
    Distance,
    Distinct,
    From,
    Function,
    Group,
    Having,
    In,
    Inner,
    Is,
    Join,
    Method,
    Natural,
    Not,
    Null,
    On,
    Or,
    Order,
    Select,
    Simsearch,
    Top,
    Where,
}

const KEYWORDS: &[(&str, Keyword)] = &[
    ("ALL", Keyword::All),
    ("AND", Keyword::And),
    ("AS", Keyword::As),
    ("ASC", Keyword::Asc),
    ("BY", Keyword::By),
    ("DESC", Keyword::Desc),
    ("DISTANCE", Keyword::Distance),
    ("DISTINCT", Keyword::Distinct),
    ("FROM", Keyword::From),
    ("FUNCTION", Keyword::Function),
    ("GROUP", Keyword::Group),
    ("HAVING", Keyword::Having),
    ("IN", Keyword::In),
    ("INNER", Keyword::Inner),
    ("IS", Keyword::Is),
    ("JOIN", Keyword::Join),
    ("METHOD", Keyword::Method),
    ("NATURAL", Keyword::Natural),
    ("NOT", Keyword::Not),
    ("NULL", Keyword::Null),
    ("ON", Keyword::On),
    ("OR", Keyword::Or),
    ("ORDER", Keyword::Order),
    ("SELECT", Keyword::Select),
    ("SIMSEARCH", Keyword::Simsearch),
    ("TOP", Keyword::Top),
    ("WHERE", Keyword::Where),
];

impl Keyword {
    pub fn lookup(word: &str) -> Option<Keyword> {
        KEYWORDS
            .iter()
            .find(|(k, _)| k.eq_ignore_ascii_case(word))
            .map(|(_, kw)| *kw)
    }

    pub fn as_str(self) -> &'static str {
        KEYWORDS.iter().find(|(_, k)| *k == self).map(|(s, _)| *s).unwrap_or("?")
    }
}

impl fmt::Display for Keyword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TokenKind {
    Keyword(Keyword),
    Ident(String),
    Integer(i64),
    Float(f64),
    String(String),
    /// `:name`, stored without the colon.
    Param(String),
    Comma,
    Dot,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Semicolon,
    Star,
    Plus,
    Minus,
    Slash,
    Eq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    Backslash,
    Eof,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Keyword(k) => write!(f, "{k}"),
            TokenKind::Ident(s) => write!(f, "identifier {s}"),
            TokenKind::Integer(v) => write!(f, "{v}"),
            TokenKind::Float(v) => write!(f, "{v}"),
            TokenKind::String(s) => write!(f, "'{}'", s.replace('\'', "''")),
            TokenKind::Param(p) => write!(f, ":{p}"),
            TokenKind::Comma => f.write_str("','"),
            TokenKind::Dot => f.write_str("'.'"),
            TokenKind::LParen => f.write_str("'('"),
            TokenKind::RParen => f.write_str("')'"),
            TokenKind::LBracket => f.write_str("'['"),
            TokenKind::RBracket => f.write_str("']'"),
            TokenKind::Semicolon => f.write_str("';'"),
            TokenKind::Star => f.write_str("'*'"),
            TokenKind::Plus => f.write_str("'+'"),
            TokenKind::Minus => f.write_str("'-'"),
            TokenKind::Slash => f.write_str("'/'"),
            TokenKind::Eq => f.write_str("'='"),
            TokenKind::NotEq => f.write_str("'<>'"),
            TokenKind::Lt => f.write_str("'<'"),
            TokenKind::Le => f.write_str("'<='"),
            TokenKind::Gt => f.write_str("'>'"),
            TokenKind::Ge => f.write_str("'>='"),
            TokenKind::Backslash => f.write_str("'\\'"),
            TokenKind::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub pos: Pos,
    /// Source spelling of words (keywords keep their original case).
    pub text: String,
}

struct Lexer<'a> {
    src: &'a str,
    chars: Vec<(usize, char)>,
    i: usize,
    line: u32,
    col: u32,
}

fn syntax(pos: Pos, message: impl Into<String>) -> Error {
    Error::Syntax {
        pos,
        message: message.into(),
        expected: Vec::new(),
    }
}

impl<'a> Lexer<'a> {
    fn pos(&self) -> Pos {
        let offset = self.chars.get(self.i).map_or(self.src.len(), |c| c.0);
        Pos::new(self.line, self.col, offset)
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.i).map(|c| c.1)
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.chars.get(self.i + n).map(|c| c.1)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.i += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) -> Result<()> {
        loop {
            match (self.peek(), self.peek_at(1)) {
                (Some(c), _) if c.is_whitespace() => {
                    self.bump();
                }
                (Some('-'), Some('-')) => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                (Some('/'), Some('*')) => {
                    let start = self.pos();
                    self.bump();
                    self.bump();
                    loop {
                        match (self.peek(), self.peek_at(1)) {
                            (Some('*'), Some('/')) => {
                                self.bump();
                                self.bump();
                                break;
                            }
                            (Some(_), _) => {
                                self.bump();
                            }
                            (None, _) => return Err(syntax(start, "unterminated comment")),
                        }
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn slice(&self, from: usize) -> &'a str {
        let start = self.chars[from].0;
        let end = self.chars.get(self.i).map_or(self.src.len(), |c| c.0);
        &self.src[start..end]
    }

    fn word(&mut self) -> &'a str {
        let from = self.i;
        while self.peek().is_some_and(|c| c.is_alphanumeric() || c == '_') {
            self.bump();
        }
        self.slice(from)
    }

    fn number(&mut self, pos: Pos) -> Result<TokenKind> {
        let from = self.i;
        let mut float = false;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
        }
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            float = true;
            self.bump();
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.bump();
            }
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            let sign = matches!(self.peek_at(1), Some('+' | '-'));
            let digit_at = if sign { 2 } else { 1 };
            if self.peek_at(digit_at).is_some_and(|c| c.is_ascii_digit()) {
                float = true;
                for _ in 0..digit_at {
                    self.bump();
                }
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.bump();
                }
            }
        }
        if self.peek().is_some_and(|c| c.is_alphabetic() || c == '_') {
            return Err(syntax(pos, format!("malformed number '{}{}'", self.slice(from), self.peek().unwrap())));
        }
        let text = self.slice(from);
        if !float {
            if let Ok(v) = text.parse::<i64>() {
                return Ok(TokenKind::Integer(v));
            }
        }
        text.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .map(TokenKind::Float)
            .ok_or_else(|| syntax(pos, format!("number '{text}' is out of range")))
    }

    fn string(&mut self, pos: Pos) -> Result<TokenKind> {
        self.bump();
        let mut out = String::new();
        loop {
            match self.bump() {
                Some('\'') if self.peek() == Some('\'') => {
                    self.bump();
                    out.push('\'');
                }
                Some('\'') => return Ok(TokenKind::String(out)),
                Some(c) => out.push(c),
                None => return Err(syntax(pos, "unterminated string literal")),
            }
        }
    }

    fn next(&mut self) -> Result<Token> {
        self.skip_trivia()?;
        let pos = self.pos();
        let from = self.i;
        let Some(c) = self.peek() else {
            return Ok(Token {
                kind: TokenKind::Eof,
                pos,
                text: String::new(),
            });
        };
        let kind = match c {
            c if c.is_alphabetic() || c == '_' => {
                let w = self.word();
                match Keyword::lookup(w) {
                    Some(k) => TokenKind::Keyword(k),
                    None => TokenKind::Ident(w.to_string()),
                }
            }
            c if c.is_ascii_digit() => self.number(pos)?,
            '.' if self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) => {
                return Err(syntax(pos, "numbers must start with a digit"));
            }
            '\'' => self.string(pos)?,
            ':' => {
                self.bump();
                let w = self.word();
                if w.is_empty() {
                    return Err(syntax(pos, "expected a parameter name after ':'"));
                }
                TokenKind::Param(w.to_string())
            }
            _ => {
                self.bump();
                match (c, self.peek()) {
                    ('<', Some('=')) => {
                        self.bump();
                        TokenKind::Le
                    }
                    ('<', Some('>')) => {
                        self.bump();
                        TokenKind::NotEq
                    }
                    ('>', Some('=')) => {
                        self.bump();
                        TokenKind::Ge
                    }
                    ('!', Some('=')) => {
                        self.bump();
                        TokenKind::NotEq
                    }
                    (',', _) => TokenKind::Comma,
                    ('.', _) => TokenKind::Dot,
                    ('(', _) => TokenKind::LParen,
                    (')', _) => TokenKind::RParen,
                    ('[', _) => TokenKind::LBracket,
                    (']', _) => TokenKind::RBracket,
                    (';', _) => TokenKind::Semicolon,
                    ('*', _) => TokenKind::Star,
                    ('+', _) => TokenKind::Plus,
                    ('-', _) => TokenKind::Minus,
                    ('/', _) => TokenKind::Slash,
                    ('=', _) => TokenKind::Eq,
                    ('<', _) => TokenKind::Lt,
                    ('>', _) => TokenKind::Gt,
                    ('\\', _) => TokenKind::Backslash,
                    _ => return Err(syntax(pos, format!("unexpected character '{c}'"))),
                }
            }
        };
        Ok(Token {
            kind,
            pos,
            text: self.slice(from).to_string(),
        })
    }
}

/// Splits `text` into tokens, ending with [`TokenKind::Eof`]. Comments
/// (`/* */` and `--` to end of line) are skipped.
pub fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut lx = Lexer {
        src: text,
        chars: text.char_indices().collect(),
        i: 0,
        line: 1,
        col: 1,
    };
    let mut out = Vec::new();
    loop {
        let t = lx.next()?;
        let end = t.kind == TokenKind::Eof;
        out.push(t);
        if end {
            return Ok(out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(s: &str) -> Vec<TokenKind> {
        tokenize(s).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn select_top() {
        assert_eq!(
            kinds("SELECT TOP 30 id"),
            vec![
                TokenKind::Keyword(Keyword::Select),
                TokenKind::Keyword(Keyword::Top),
                TokenKind::Integer(30),
                TokenKind::Ident("id".into()),
                TokenKind::Eof
            ]
        );
        assert_eq!(kinds("select")[0], TokenKind::Keyword(Keyword::Select));
    }

    #[test]
    fn strings_and_escapes() {
        assert_eq!(kinds("'feather'")[0], TokenKind::String("feather".into()));
        assert_eq!(kinds("'it''s'")[0], TokenKind::String("it's".into()));
        let err = tokenize("x = 'unclosed").unwrap_err();
        assert_eq!(err.position().unwrap().offset, 4);
    }

    #[test]
    fn numbers_params_comments() {
        assert_eq!(
            kinds("1.5e3 :queryImage /* c */ 7 -- tail\n<= <>"),
            vec![
                TokenKind::Float(1500.0),
                TokenKind::Param("queryImage".into()),
                TokenKind::Integer(7),
                TokenKind::Le,
                TokenKind::NotEq,
                TokenKind::Eof
            ]
        );
        let err = tokenize("a /* never closed").unwrap_err();
        assert_eq!(err.position().unwrap().column, 3);
    }

    #[test]
    fn positions_track_lines() {
        let t = tokenize("SELECT\n  a").unwrap();
        assert_eq!((t[1].pos.line, t[1].pos.column), (2, 3));
    }
}
