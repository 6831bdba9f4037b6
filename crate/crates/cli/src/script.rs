//! Splitting script text into statements and directives.
//!
//! Statements run up to a `;` outside string literals and comments.
//! Directives start with `\` at the beginning of a statement and end at the
//! end of their line.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnitKind {
    Statement,
    Directive,
}

/// One statement or directive with the position of its first character.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Unit {
    pub kind: UnitKind,
    /// Text without the terminating `;`.
    pub text: String,
    pub line: u32,
    pub column: u32,
}

impl Unit {
    /// The text preceded by enough padding that positions reported for it
    /// match the script: add `line - 1` to the line of such a position.
    pub fn padded(&self) -> String {
        let mut s = " ".repeat(self.column.saturating_sub(1) as usize);
        s.push_str(&self.text);
        s
    }
}

/// Result of splitting: complete units and the unterminated tail, if any.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Split {
    pub units: Vec<Unit>,
    pub rest: Option<Unit>,
    /// Byte offset where `rest` starts, or the text length.
    pub consumed: usize,
}

struct Cursor<'a> {
    src: &'a str,
    i: usize,
    line: u32,
    column: u32,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<char> {
        self.src[self.i..].chars().next()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.src[self.i..].chars();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.i += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn skip_line(&mut self) {
        while let Some(c) = self.peek() {
            if c == '\n' {
                break;
            }
            self.bump();
        }
    }

    fn skip_block_comment(&mut self) {
        self.bump();
        self.bump();
        while let Some(c) = self.bump() {
            if c == '*' && self.peek() == Some('/') {
                self.bump();
                return;
            }
        }
    }

    /// Skips whitespace and comments between units.
    fn skip_trivia(&mut self) {
        loop {
            match (self.peek(), self.peek2()) {
                (Some(c), _) if c.is_whitespace() => {
                    self.bump();
                }
                (Some('-'), Some('-')) => self.skip_line(),
                (Some('/'), Some('*')) => self.skip_block_comment(),
                _ => return,
            }
        }
    }
}

pub fn split(src: &str) -> Split {
    let mut cur = Cursor {
        src,
        i: 0,
        line: 1,
        column: 1,
    };
    let mut units = Vec::new();
    loop {
        cur.skip_trivia();
        let Some(first) = cur.peek() else {
            return Split {
                units,
                rest: None,
                consumed: src.len(),
            };
        };
        let (start, line, column) = (cur.i, cur.line, cur.column);
        if first == '\\' {
            cur.skip_line();
            units.push(Unit {
                kind: UnitKind::Directive,
                text: src[start..cur.i].trim_end().to_string(),
                line,
                column,
            });
            continue;
        }
        let mut terminated = false;
        while let Some(c) = cur.peek() {
            match c {
                ';' => {
                    terminated = true;
                    break;
                }
                '\'' => {
                    cur.bump();
                    while let Some(c) = cur.bump() {
                        if c == '\'' {
                            if cur.peek() == Some('\'') {
                                cur.bump();
                            } else {
                                break;
                            }
                        }
                    }
                }
                '-' if cur.peek2() == Some('-') => cur.skip_line(),
                '/' if cur.peek2() == Some('*') => cur.skip_block_comment(),
                _ => {
                    cur.bump();
                }
            }
        }
        let unit = Unit {
            kind: UnitKind::Statement,
            text: src[start..cur.i].to_string(),
            line,
            column,
        };
        if !terminated {
            return Split {
                units,
                rest: Some(unit),
                consumed: start,
            };
        }
        cur.bump();
        units.push(unit);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(s: &Split) -> Vec<(&str, u32, u32)> {
        s.units.iter().map(|u| (u.text.as_str(), u.line, u.column)).collect()
    }

    #[test]
    fn statements_and_directives() {
        let s = split("\\set :k 3\nSELECT a\nFROM t;  SELECT b FROM t;\n-- done\n");
        assert_eq!(
            texts(&s),
            vec![("\\set :k 3", 1, 1), ("SELECT a\nFROM t", 2, 1), ("SELECT b FROM t", 3, 10)]
        );
        assert_eq!(s.units[0].kind, UnitKind::Directive);
        assert!(s.rest.is_none());
    }

    #[test]
    fn semicolons_inside_strings_and_comments() {
        let s = split("SELECT 'a;''b' -- c;d\n /* e; */ FROM t;");
        assert_eq!(s.units.len(), 1);
        assert!(s.units[0].text.contains("/* e; */"));
    }

    #[test]
    fn unterminated_tail() {
        let s = split("SELECT 1 FROM t; SELECT 2\nFROM");
        assert_eq!(s.units.len(), 1);
        let rest = s.rest.unwrap();
        assert_eq!((rest.line, rest.column), (1, 18));
        assert_eq!(s.consumed, 17);
    }

    #[test]
    fn backslash_only_starts_a_directive_at_statement_start() {
        let s = split("SELECT a\n\\b FROM t;");
        assert_eq!(s.units.len(), 1);
        assert_eq!(s.units[0].kind, UnitKind::Statement);
    }

    #[test]
    fn padding_restores_columns() {
        let s = split("   SELECT x;");
        assert_eq!(s.units[0].padded(), "   SELECT x");
    }
}
