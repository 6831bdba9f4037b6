//! Rendering of result relations.

use std::fmt::Write;

use simseql_core::datamodel::Row;
use simseql_core::Value;

use crate::tsv::format_cell;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputMode {
    /// Padded columns with a header rule and a row count.
    #[default]
    Table,
    /// The data file format: names, type names, one line per tuple.
    Tsv,
    /// One block of `name | value` lines per tuple.
    Records,
}

impl OutputMode {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "table" => Some(OutputMode::Table),
            "tsv" => Some(OutputMode::Tsv),
            "records" => Some(OutputMode::Records),
            _ => None,
        }
    }
}

/// A result relation ready for rendering.
#[derive(Clone, Copy, Debug)]
pub struct ResultView<'a> {
    pub columns: &'a [String],
    /// Data type names, one per column.
    pub types: &'a [String],
    pub rows: &'a [Row],
}

fn count_line(n: usize) -> String {
    if n == 1 {
        "(1 row)".into()
    } else {
        format!("({n} rows)")
    }
}

/// A cell for the aligned modes: strings as text, line breaks and tabs escaped.
fn display_cell(v: &Value) -> String {
    match v.as_str() {
        Some(s) => s.replace('\\', "\\\\").replace('\t', "\\t").replace('\n', "\\n").replace('\r', "\\r"),
        None => format_cell(v, false),
    }
}

fn is_number(v: &Value) -> bool {
    matches!(v, Value::Integer(_) | Value::Long(_) | Value::Float(_))
}

/// Renders `view`; every line, the last included, ends with a newline.
pub fn render(view: ResultView<'_>, mode: OutputMode) -> String {
    let cell = if mode == OutputMode::Tsv { |v: &Value| format_cell(v, false) } else { display_cell };
    let cells: Vec<Vec<String>> = view.rows.iter().map(|r| r.iter().map(cell).collect()).collect();
    let mut out = String::new();
    match mode {
        OutputMode::Tsv => {
            out.push_str(&view.columns.join("\t"));
            out.push('\n');
            out.push_str(&view.types.join("\t"));
            out.push('\n');
            for row in &cells {
                out.push_str(&row.join("\t"));
                out.push('\n');
            }
        }
        OutputMode::Table => {
            let mut widths: Vec<usize> = view.columns.iter().map(|c| c.chars().count()).collect();
            for row in &cells {
                for (w, c) in widths.iter_mut().zip(row) {
                    *w = (*w).max(c.chars().count());
                }
            }
            let numeric: Vec<bool> = (0..view.columns.len())
                .map(|i| {
                    let mut values = view.rows.iter().map(|r| &r[i]).filter(|v| !v.is_null()).peekable();
                    values.peek().is_some() && values.all(is_number)
                })
                .collect();
            let line = |cells: &[String], right: &dyn Fn(usize) -> bool| -> String {
                let parts: Vec<String> = cells
                    .iter()
                    .enumerate()
                    .map(|(i, c)| {
                        if right(i) {
                            format!("{c:>w$}", w = widths[i])
                        } else {
                            format!("{c:<w$}", w = widths[i])
                        }
                    })
                    .collect();
                parts.join(" | ").trim_end().to_string()
            };
            out.push_str(&line(view.columns, &|_| false));
            out.push('\n');
            let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
            out.push_str(&rule.join("-+-"));
            out.push('\n');
            for row in &cells {
                out.push_str(&line(row, &|i| numeric[i]));
                out.push('\n');
            }
            out.push_str(&count_line(cells.len()));
            out.push('\n');
        }
        OutputMode::Records => {
            let width = view.columns.iter().map(|c| c.chars().count()).max().unwrap_or(0);
            for (n, row) in cells.iter().enumerate() {
                let _ = writeln!(out, "-[ RECORD {} ]", n + 1);
                for (c, v) in view.columns.iter().zip(row) {
                    let _ = writeln!(out, "{}", format!("{c:<width$} | {v}").trim_end());
                }
            }
            if cells.is_empty() {
                out.push_str(&view.columns.join(" | "));
                out.push('\n');
                out.push_str(&count_line(0));
                out.push('\n');
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn view<'a>(columns: &'a [String], types: &'a [String], rows: &'a [Row]) -> ResultView<'a> {
        ResultView { columns, types, rows }
    }

    fn strings(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn table_pads_and_counts() {
        let columns = strings(&["id", "distance"]);
        let types = strings(&["integer", "float"]);
        let rows = vec![
            vec![Value::Integer(7), Value::Float(0.5)],
            vec![Value::Integer(12), Value::Float(1.0 / 3.0)],
        ];
        let text = render(view(&columns, &types, &rows), OutputMode::Table);
        assert_eq!(text, "id | distance\n---+---------\n 7 |      0.5\n12 | 0.333333\n(2 rows)\n");
    }

    #[test]
    fn empty_results_show_header_and_count() {
        let columns = strings(&["value"]);
        let types = strings(&["string"]);
        let text = render(view(&columns, &types, &[]), OutputMode::Table);
        assert_eq!(text, "value\n-----\n(0 rows)\n");
        let text = render(view(&columns, &types, &[]), OutputMode::Records);
        assert_eq!(text, "value\n(0 rows)\n");
        let text = render(view(&columns, &types, &[]), OutputMode::Tsv);
        assert_eq!(text, "value\nstring\n");
    }

    #[test]
    fn tsv_and_records() {
        let columns = strings(&["id", "value"]);
        let types = strings(&["integer", "string"]);
        let rows = vec![vec![Value::Integer(1), Value::string("a\tb")], vec![Value::Null, Value::string("")]];
        let text = render(view(&columns, &types, &rows), OutputMode::Tsv);
        assert_eq!(text, "id\tvalue\ninteger\tstring\n1\ta\\tb\n\t\\e\n");
        let text = render(view(&columns, &types, &rows), OutputMode::Records);
        assert_eq!(text, "-[ RECORD 1 ]\nid    | 1\nvalue | a\\tb\n-[ RECORD 2 ]\nid    |\nvalue |\n");
    }

    #[test]
    fn distances_keep_six_significant_digits() {
        let columns = strings(&["distance"]);
        let types = strings(&["float"]);
        let rows = vec![vec![Value::Float(123.456789)], vec![Value::Float(0.000012345678)]];
        let text = render(view(&columns, &types, &rows), OutputMode::Tsv);
        assert_eq!(text, "distance\nfloat\n123.457\n1.23457e-05\n");
    }
}
