//! Tab-separated data files.
//!
//! The first line holds attribute names, the second their data type names.
//! Every further line is one tuple; blank lines are skipped unless the
//! relation has a single column, where they hold a null. An empty cell is
//! null. Vectors are
//! written `[v1,v2,...]`, images `ppm:path` with the path relative to the
//! data file. In strings, tab, line feed, carriage return and backslash
//! are escaped as `\t`, `\n`, `\r` and `\\`; `\e` stands for the empty
//! string.

use std::fs;
use std::path::{Path, PathBuf};

use simseql_core::datamodel::{ImageRaster, ValueKind};
use simseql_core::{Catalog, Database, Schema, Value};

use crate::error::{CliError, Result};

pub const IMAGE_PREFIX: &str = "ppm:";

pub fn escape(s: &str) -> String {
    if s.is_empty() {
        return "\\e".into();
    }
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\\' => out.push_str("\\\\"),
            c => out.push(c),
        }
    }
    out
}

pub fn unescape(s: &str) -> Result<String, String> {
    if s == "\\e" {
        return Ok(String::new());
    }
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some('\\') => out.push('\\'),
            Some(other) => return Err(format!("unknown escape '\\{other}'")),
            None => return Err("dangling '\\'".into()),
        }
    }
    Ok(out)
}

/// Parses `[v1,v2,...]`.
pub fn parse_vector(s: &str) -> Result<Vec<f64>, String> {
    let inner = s
        .trim()
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| format!("expected a vector like [1,2,3], found '{s}'"))?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| format!("'{}' is not a number", x.trim()))
        })
        .collect()
}

pub fn read_image(path: &Path) -> Result<ImageRaster> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    ImageRaster::from_ppm(&bytes).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// Parses one cell of a column stored as `kind`; image paths resolve
/// against `base`.
pub fn parse_cell(cell: &str, kind: ValueKind, base: &Path) -> Result<Value> {
    if cell.is_empty() {
        return Ok(Value::Null);
    }
    let bad = |what: &str| CliError::Data(format!("'{cell}' is not a valid {what}"));
    Ok(match kind {
        ValueKind::Integer => Value::Integer(cell.trim().parse().map_err(|_| bad("integer"))?),
        ValueKind::Long => Value::Long(cell.trim().parse().map_err(|_| bad("long"))?),
        ValueKind::Float => Value::Float(cell.trim().parse().map_err(|_| bad("float"))?),
        ValueKind::String => Value::string(unescape(cell).map_err(CliError::Data)?),
        ValueKind::Date => Value::Date(Value::parse_date(cell.trim())?),
        ValueKind::NumberVector => Value::vector(parse_vector(cell).map_err(CliError::Data)?),
        ValueKind::Image => {
            let rel = cell.strip_prefix(IMAGE_PREFIX).ok_or_else(|| bad("image reference (ppm:path)"))?;
            Value::image(read_image(&base.join(rel))?)
        }
    })
}

/// Text of a non-image cell. Floats are written at full precision when
/// `exact`, else with six significant digits.
pub fn format_cell(v: &Value, exact: bool) -> String {
    match v {
        Value::Null => String::new(),
        Value::Float(x) if exact => format!("{x}"),
        Value::String(s) => escape(s),
        other => other.to_string(),
    }
}

fn split_line(line: &str) -> Vec<&str> {
    line.strip_suffix('\r').unwrap_or(line).split('\t').collect()
}

/// Appends the tuples of `path` to `relation`, creating the relation from
/// the file header when it does not exist. Returns the number of tuples.
pub fn load(catalog: &Catalog, db: &mut Database, relation: &str, path: &Path) -> Result<usize> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let at = |line: usize, msg: String| CliError::Data(format!("{}:{line}: {msg}", path.display()));
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (Some((_, names)), Some((_, types))) = (lines.next(), lines.next()) else {
        return Err(at(1, "expected a line of attribute names and a line of type names".into()));
    };
    let (names, types) = (split_line(names), split_line(types));
    if names.len() != types.len() {
        return Err(at(2, format!("{} attribute names but {} type names", names.len(), types.len())));
    }
    if !db.contains(relation) {
        let attrs = names
            .iter()
            .zip(&types)
            .map(|(n, t)| catalog.attribute(n, t))
            .collect::<Result<Vec<_>, _>>()?;
        db.create_relation(catalog, relation, Schema::new(attrs)?)?;
    }
    let mut rel = db.write(relation)?;
    let kinds: Vec<ValueKind> = rel.schema().attributes().iter().map(|a| a.kind).collect();
    if names.len() != kinds.len() {
        return Err(at(1, format!("{} columns, but relation '{relation}' has {}", names.len(), kinds.len())));
    }
    for ((a, n), t) in rel.schema().attributes().iter().zip(&names).zip(&types) {
        if !a.name.matches(n) {
            return Err(at(1, format!("column '{n}' does not match attribute '{}'", a.name)));
        }
        let repr = catalog
            .data_type(t)
            .map(|d| d.repr)
            .ok_or_else(|| at(2, format!("unknown data type '{t}'")))?;
        if !repr.fits(a.kind) {
            return Err(at(2, format!("type '{t}' does not fit attribute '{}' of type {}", a.name, a.data_type)));
        }
    }
    let base = path.parent().unwrap_or(Path::new("."));
    let mut count = 0;
    for (n, line) in lines {
        // A blank line is a null in a one-column relation, noise otherwise.
        if line.is_empty() && kinds.len() != 1 {
            continue;
        }
        let cells = split_line(line);
        if cells.len() != kinds.len() {
            return Err(at(n, format!("expected {} cells, found {}", kinds.len(), cells.len())));
        }
        let values = cells
            .iter()
            .zip(&kinds)
            .map(|(c, k)| parse_cell(c, *k, base))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| at(n, e.to_string()))?;
        rel.append_tuple(values).map_err(|e| at(n, e.to_string()))?;
        count += 1;
    }
    Ok(count)
}

/// Writes every relation of `db` to `dir` as `<name>.tsv`, images under
/// `<name>_images/`. Returns the written relation names and files.
pub fn save(db: &Database, dir: &Path) -> Result<Vec<(String, PathBuf)>> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut written = Vec::new();
    for name in db.names() {
        let rel = db.read(name.as_str())?;
        let attrs = rel.schema().attributes();
        let mut out = String::new();
        let header: Vec<&str> = attrs.iter().map(|a| a.name.as_str()).collect();
        let types: Vec<&str> = attrs.iter().map(|a| a.data_type.as_str()).collect();
        out.push_str(&header.join("\t"));
        out.push('\n');
        out.push_str(&types.join("\t"));
        out.push('\n');
        let image_dir = format!("{name}_images");
        for (row, t) in rel.scan().enumerate() {
            let mut cells = Vec::with_capacity(attrs.len());
            for (a, v) in attrs.iter().zip(&t.values) {
                match v {
                    Value::Image(img) => {
                        let rel_path = format!("{image_dir}/{}_{}.ppm", row + 1, a.name);
                        let file = dir.join(&rel_path);
                        if let Some(p) = file.parent() {
                            fs::create_dir_all(p).map_err(|e| CliError::io(p, e))?;
                        }
                        fs::write(&file, img.to_ppm()).map_err(|e| CliError::io(&file, e))?;
                        cells.push(format!("{IMAGE_PREFIX}{rel_path}"));
                    }
                    other => cells.push(format_cell(other, true)),
                }
            }
            out.push_str(&cells.join("\t"));
            out.push('\n');
        }
        let file = dir.join(format!("{name}.tsv"));
        fs::write(&file, out).map_err(|e| CliError::io(&file, e))?;
        written.push((name.to_string(), file));
    }
    Ok(written)
}
