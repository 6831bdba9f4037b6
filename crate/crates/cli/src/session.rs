//! Session state and execution of statements and directives.

use std::fs;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use simseql_core::catalog::{DataTypeEntry, IndexKind, ParamSpec, QueryObjects};
use simseql_core::datamodel::{Name, ValueKind};
use simseql_core::indexes::{build_metric_index, build_ordered_index, AttachedIndex, DEFAULT_INDEX_SEED};
use simseql_core::parser::{tokenize, TokenKind};
use simseql_core::{
    bind, execute, explain, optimize, parse, Catalog, Database, Error, OptimizerOptions, ParamBinding, PhysicalPlan,
    ResultSet, Schema, Value,
};

use crate::ddl::{blank_prefix, classify, AttributeDecl, Command, IndexDecl};
use crate::error::{CliError, Result, ScriptError};
use crate::render::{render, OutputMode, ResultView};
use crate::script::{split, Unit, UnitKind};
use crate::tsv;

/// Name of the script `SAVE` writes next to the data files.
pub const SNAPSHOT_SCRIPT: &str = "restore.simseql";

const HELP: &str = "\
Statements end with ';':
  SELECT ...                     run a query
  EXPLAIN SELECT ...             show the chosen plan
  CREATE TYPE name AS repr [DISTANCE f]
  CREATE RELATION r (attr type [DISTANCE f [ALSO g]...], ...)
  CREATE INDEX [name] ON r(attr) USING metric|ordered [WITH DISTANCE f(args)]
  LOAD r FROM 'file.tsv'
  SAVE TO 'dir'
  RESTORE FROM 'dir'
Directives take one line:
  \\set [:name value]            value: literal, vector:[...] or ppm:path
  \\list types|distances|extractors|methods|indexes|relations
  \\output table|tsv|records
  \\help
  \\q
";

/// Whether to keep reading after a unit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flow {
    Continue,
    Quit,
}

/// A query's plan and result with the data type name of every column.
#[derive(Clone, Debug)]
pub struct QueryOutput {
    pub plan: PhysicalPlan,
    pub result: ResultSet,
    pub types: Vec<String>,
}

impl QueryOutput {
    pub fn view(&self) -> ResultView<'_> {
        ResultView {
            columns: &self.result.columns,
            types: &self.types,
            rows: &self.result.rows,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
struct TypeDecl {
    name: String,
    representation: ValueKind,
    distance: Option<String>,
}

#[derive(Debug)]
pub struct Session {
    pub catalog: Catalog,
    pub db: Database,
    pub params: ParamBinding,
    pub output: OutputMode,
    pub explain_all: bool,
    pub optimizer: OptimizerOptions,
    /// Directory relative paths resolve against; the running script's
    /// directory when unset.
    pub data_dir: Option<PathBuf>,
    types: Vec<TypeDecl>,
    indexes: Vec<IndexDecl>,
}

impl Default for Session {
    fn default() -> Self {
        Session::new()
    }
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes()).map_err(|e| CliError::io("<output>", e))
}

fn param_list(params: &[ParamSpec]) -> String {
    let parts: Vec<String> = params
        .iter()
        .map(|p| match &p.default {
            Some(d) => format!("{}={d}", p.name),
            None => p.name.clone(),
        })
        .collect();
    parts.join(", ")
}

fn strings<const N: usize>(xs: [&str; N]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

/// Parses the value of `\set`: a literal, `vector:[...]` or `ppm:path`.
pub fn parse_param_value(spec: &str, base: &Path) -> Result<Value> {
    let spec = spec.trim();
    if let Some(v) = spec.strip_prefix("vector:") {
        return Ok(Value::vector(tsv::parse_vector(v).map_err(CliError::Data)?));
    }
    if let Some(p) = spec.strip_prefix(tsv::IMAGE_PREFIX) {
        return Ok(Value::image(tsv::read_image(&base.join(p.trim()))?));
    }
    let tokens = tokenize(spec)?;
    let kinds: Vec<&TokenKind> = tokens.iter().map(|t| &t.kind).filter(|k| **k != TokenKind::Eof).collect();
    let v = match kinds.as_slice() {
        [TokenKind::Integer(v)] => Value::Integer(*v),
        [TokenKind::Float(v)] => Value::Float(*v),
        [TokenKind::Minus, TokenKind::Integer(v)] => Value::Integer(-v),
        [TokenKind::Minus, TokenKind::Float(v)] => Value::Float(-v),
        [TokenKind::String(s)] => Value::string(s),
        _ => {
            return Err(CliError::Data(format!(
                "expected a literal, vector:[...] or ppm:path, found '{spec}'"
            )))
        }
    };
    Ok(v)
}

impl Session {
    pub fn new() -> Self {
        Session {
            catalog: Catalog::builtin(),
            db: Database::new(),
            params: ParamBinding::new(),
            output: OutputMode::default(),
            explain_all: false,
            optimizer: OptimizerOptions::default(),
            data_dir: None,
            types: Vec::new(),
            indexes: Vec::new(),
        }
    }

    fn base(&self, script_dir: &Path) -> PathBuf {
        self.data_dir.clone().unwrap_or_else(|| script_dir.to_path_buf())
    }

    pub fn plan(&self, text: &str) -> Result<PhysicalPlan, Error> {
        let query = parse(text)?;
        let bound = bind(&query, &self.catalog, &self.db, &self.params)?;
        Ok(optimize(&bound, &self.catalog, &self.db, &self.optimizer))
    }

    /// Plans and runs one query.
    pub fn query(&self, text: &str) -> Result<QueryOutput> {
        let plan = self.plan(text)?;
        let result = execute(&plan, &self.db)?;
        let types = plan.root.schema.columns.iter().map(|c| c.ty.describe()).collect();
        Ok(QueryOutput { plan, result, types })
    }

    /// Runs the script at `path`, stopping at the first error.
    pub fn run_script(&mut self, path: &Path, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), ScriptError> {
        let name = path.display().to_string();
        let text = fs::read_to_string(path).map_err(|e| ScriptError {
            source_name: name.clone(),
            line: 0,
            error: CliError::io(path, e),
        })?;
        let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
        self.run_source(&text, &name, dir, out, err)
    }

    /// Runs script `text`, stopping at the first error. Relative paths
    /// resolve against `dir` unless a data directory is set.
    pub fn run_source(
        &mut self,
        text: &str,
        source_name: &str,
        dir: &Path,
        out: &mut dyn Write,
        err: &mut dyn Write,
    ) -> Result<(), ScriptError> {
        let parts = split(text);
        for unit in parts.units.iter().chain(parts.rest.iter()) {
            match self.run_unit(unit, dir, out, err) {
                Ok(Flow::Continue) => {}
                Ok(Flow::Quit) => break,
                Err(error) => {
                    return Err(ScriptError {
                        source_name: source_name.to_string(),
                        line: unit.line,
                        error,
                    })
                }
            }
        }
        Ok(())
    }

    /// Reads statements from `input` until it ends or `\q`. Errors are
    /// reported on `err` and do not stop the loop. Returns the number of
    /// failed units.
    pub fn repl(&mut self, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write, prompt: bool) -> usize {
        let dir = PathBuf::from(".");
        let mut buffer = String::new();
        let mut failures = 0;
        loop {
            if prompt {
                let _ = write!(out, "{}", if buffer.trim().is_empty() { "simseql> " } else { "   ...> " });
                let _ = out.flush();
            }
            let mut line = String::new();
            let eof = !matches!(input.read_line(&mut line), Ok(n) if n > 0);
            buffer.push_str(&line);
            let parts = split(&buffer);
            let mut units = parts.units.clone();
            if eof {
                units.extend(parts.rest.clone());
            }
            for unit in &units {
                match self.run_unit(unit, &dir, out, err) {
                    Ok(Flow::Continue) => {}
                    Ok(Flow::Quit) => return failures,
                    Err(e) => {
                        failures += 1;
                        let _ = writeln!(err, "error: {e}");
                    }
                }
            }
            if eof {
                return failures;
            }
            buffer.drain(..parts.consumed);
        }
    }

    pub fn run_unit(&mut self, unit: &Unit, dir: &Path, out: &mut dyn Write, err: &mut dyn Write) -> Result<Flow> {
        let base = self.base(dir);
        match unit.kind {
            UnitKind::Directive => self.directive(unit, &base, out),
            UnitKind::Statement => {
                self.statement(unit, &base, out, err)?;
                Ok(Flow::Continue)
            }
        }
    }

    fn statement(&mut self, unit: &Unit, base: &Path, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
        let text = unit.padded();
        let shift = unit.line.saturating_sub(1);
        let shifted = |e: Error| CliError::Engine(e.shifted(shift));
        match classify(&text).map_err(shifted)? {
            Command::Query => {
                if self.explain_all {
                    let plan = self.plan(&text).map_err(shifted)?;
                    write_out(out, &format!("{}\n\n", explain(&plan).trim_end()))?;
                }
                let q = self.query(&text).map_err(|e| match e {
                    CliError::Engine(e) => shifted(e),
                    other => other,
                })?;
                for n in &q.result.notices {
                    let _ = writeln!(err, "notice: {n}");
                }
                write_out(out, &render(q.view(), self.output))?;
                write_out(out, "\n")?;
            }
            Command::Explain { offset } => {
                let plan = self.plan(&blank_prefix(&text, offset)).map_err(shifted)?;
                write_out(out, &format!("{}\n\n", explain(&plan).trim_end()))?;
            }
            Command::CreateType {
                name,
                representation,
                distance,
            } => self.create_type(&name, &representation, distance)?,
            Command::CreateRelation { name, attributes } => self.create_relation(&name, &attributes)?,
            Command::CreateIndex(decl) => self.create_index(decl)?,
            Command::Load { relation, path } => {
                tsv::load(&self.catalog, &mut self.db, &relation, &base.join(path))?;
            }
            Command::Save { directory } => self.save(&base.join(directory))?,
            Command::Restore { directory } => self.restore(&base.join(directory), out, err)?,
        }
        Ok(())
    }

    pub fn create_type(&mut self, name: &str, representation: &str, distance: Option<String>) -> Result<()> {
        let repr = ValueKind::from_type_name(representation).ok_or_else(|| {
            let known: Vec<&str> = ValueKind::ALL.iter().map(|k| k.type_name()).collect();
            Error::Catalog(format!(
                "unknown representation '{representation}', expected one of {}",
                known.join(", ")
            ))
        })?;
        let comparison = self.catalog.type_for_kind(repr).and_then(|t| t.comparison.clone());
        self.catalog.register_data_type(DataTypeEntry {
            id: Name::new(name),
            repr,
            default_distance: distance.as_deref().map(Name::new),
            comparison,
        })?;
        self.types.push(TypeDecl {
            name: name.to_string(),
            representation: repr,
            distance,
        });
        Ok(())
    }

    pub fn create_relation(&mut self, name: &str, attributes: &[AttributeDecl]) -> Result<()> {
        let mut attrs = Vec::with_capacity(attributes.len());
        for a in attributes {
            let mut attr = self.catalog.attribute(&a.name, &a.data_type)?;
            if let Some(d) = &a.default_distance {
                attr = attr.with_default(d.as_str());
            }
            for o in &a.other_distances {
                attr = attr.with_other(o.as_str());
            }
            attrs.push(attr);
        }
        self.db.create_relation(&self.catalog, name, Schema::new(attrs)?)?;
        Ok(())
    }

    pub fn create_index(&mut self, decl: IndexDecl) -> Result<()> {
        let mut rel = self.db.write(&decl.relation)?;
        let taken = |n: &str| rel.indexes().iter().any(|i| i.name().matches(n));
        let index = match decl.kind {
            IndexKind::Metric => {
                let distance = decl.distance.as_ref().map(|(n, args)| (n.as_str(), args.clone()));
                AttachedIndex::Metric(build_metric_index(
                    &self.catalog,
                    &rel,
                    &decl.attribute,
                    distance,
                    DEFAULT_INDEX_SEED,
                )?)
            }
            IndexKind::Ordered => {
                if decl.distance.is_some() {
                    return Err(Error::Catalog("an ordered index takes no distance function".into()).into());
                }
                AttachedIndex::Ordered(build_ordered_index(&self.catalog, &rel, &decl.attribute)?)
            }
        };
        let name = match &decl.name {
            Some(n) => n.clone(),
            None => {
                let stem = index.name().to_string();
                let mut name = stem.clone();
                let mut n = 1;
                while taken(&name) {
                    n += 1;
                    name = format!("{stem}_{n}");
                }
                name
            }
        };
        let index = match index {
            AttachedIndex::Metric(i) => AttachedIndex::Metric(i.with_name(&name)),
            AttachedIndex::Ordered(i) => AttachedIndex::Ordered(i.with_name(&name)),
        };
        rel.attach_index(index)?;
        drop(rel);
        self.indexes.push(IndexDecl {
            name: Some(name),
            ..decl
        });
        Ok(())
    }

    /// Writes all relations and a script recreating types, relations and
    /// indexes to `dir`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        let files = tsv::save(&self.db, dir)?;
        let mut script = String::new();
        for t in &self.types {
            script.push_str(&format!("CREATE TYPE {} AS {}", t.name, t.representation));
            if let Some(d) = &t.distance {
                script.push_str(&format!(" DISTANCE {d}"));
            }
            script.push_str(";\n");
        }
        for (name, file) in &files {
            let rel = self.db.read(name)?;
            let attrs: Vec<String> = rel
                .schema()
                .attributes()
                .iter()
                .map(|a| AttributeDecl::from(a).to_string())
                .collect();
            script.push_str(&format!("CREATE RELATION {name} ({});\n", attrs.join(", ")));
            let file_name = file.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
            script.push_str(&format!("LOAD {name} FROM '{}';\n", file_name.replace('\'', "''")));
        }
        for decl in self.indexes.iter().filter(|d| self.db.contains(&d.relation)) {
            script.push_str(&format!("{decl};\n"));
        }
        let path = dir.join(SNAPSHOT_SCRIPT);
        fs::write(&path, script).map_err(|e| CliError::io(&path, e))
    }

    /// Replaces catalog extensions, relations and indexes with the snapshot
    /// in `dir`; indexes are rebuilt.
    pub fn restore(&mut self, dir: &Path, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
        let path = dir.join(SNAPSHOT_SCRIPT);
        let text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
        let mut fresh = Session {
            output: self.output,
            explain_all: self.explain_all,
            optimizer: self.optimizer,
            params: self.params.clone(),
            ..Session::new()
        };
        fresh
            .run_source(&text, &path.display().to_string(), dir, out, err)
            .map_err(|e| CliError::Nested(Box::new(e)))?;
        fresh.data_dir = self.data_dir.take();
        *self = fresh;
        Ok(())
    }

    fn directive(&mut self, unit: &Unit, base: &Path, out: &mut dyn Write) -> Result<Flow> {
        let body = unit.text.trim_start_matches('\\');
        let (name, rest) = body.split_once(char::is_whitespace).unwrap_or((body, ""));
        let rest = rest.trim();
        let unknown = |what: &str| {
            CliError::Engine(Error::Syntax {
                pos: simseql_core::Pos::new(unit.line, unit.column, 0),
                message: what.to_string(),
                expected: Vec::new(),
            })
        };
        match name.to_ascii_lowercase().as_str() {
            "set" if rest.is_empty() => {
                let mut text = String::new();
                for (n, v) in self.params.iter() {
                    text.push_str(&format!(":{n} = {}\n", tsv::format_cell(v, true)));
                }
                write_out(out, &text)?;
            }
            "set" => {
                let (param, value) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
                let param = param.trim_start_matches(':');
                if param.is_empty() || value.trim().is_empty() {
                    return Err(unknown("usage: \\set :name value"));
                }
                let v = parse_param_value(value, base)?;
                self.params.set(param, v);
            }
            "list" => self.list(rest, out).map_err(|e| match e {
                CliError::Data(m) => unknown(&m),
                other => other,
            })?,
            "output" => {
                self.output = OutputMode::parse(rest).ok_or_else(|| unknown("usage: \\output table|tsv|records"))?;
            }
            "help" | "?" => write_out(out, HELP)?,
            "q" | "quit" => return Ok(Flow::Quit),
            _ => return Err(unknown(&format!("unknown directive '\\{name}'; try \\help"))),
        }
        Ok(Flow::Continue)
    }

    /// Registry listing for `\list`.
    pub fn list(&self, what: &str, out: &mut dyn Write) -> Result<()> {
        let c = &self.catalog;
        let (columns, rows): (Vec<String>, Vec<Vec<String>>) = match what.to_ascii_lowercase().as_str() {
            "types" => (
                strings(["name", "representation", "default_distance", "comparison"]),
                c.data_types()
                    .map(|t| {
                        vec![
                            t.id.to_string(),
                            t.repr.to_string(),
                            t.default_distance.as_ref().map(|d| d.to_string()).unwrap_or_default(),
                            t.comparison.as_ref().map(|d| d.to_string()).unwrap_or_default(),
                        ]
                    })
                    .collect(),
            ),
            "distances" => {
                let mut rows: Vec<Vec<String>> = c
                    .distances()
                    .map(|d| {
                        let operands: Vec<&str> = d.operand_types.iter().map(|t| t.as_str()).collect();
                        let bounds: Vec<&str> = d.lower_bounds.iter().map(|t| t.as_str()).collect();
                        vec![
                            d.name.to_string(),
                            "basic".into(),
                            if operands.is_empty() { "any".into() } else { operands.join(",") },
                            param_list(&d.params),
                            d.properties.to_string(),
                            bounds.join(","),
                        ]
                    })
                    .collect();
                rows.extend(c.set_distances().map(|s| {
                    vec![s.name.to_string(), "set".into(), String::new(), String::new(), String::new(), String::new()]
                }));
                rows.extend(c.aggregated_distances().map(|s| {
                    vec![s.name.to_string(), "aggregated".into(), String::new(), String::new(), String::new(), String::new()]
                }));
                (strings(["name", "kind", "operands", "parameters", "properties", "lower_bound_of"]), rows)
            }
            "extractors" => (
                strings(["name", "input", "output"]),
                c.extractors()
                    .map(|e| vec![e.name.to_string(), e.input.to_string(), e.output.to_string()])
                    .collect(),
            ),
            "methods" => (
                strings(["name", "query_objects", "relations", "parameters"]),
                c.methods()
                    .map(|m| {
                        let objects = match m.query_objects {
                            QueryObjects::Zero => "0",
                            QueryObjects::Singleton => "1",
                            QueryObjects::Arbitrary => "any",
                        };
                        vec![m.name.to_string(), objects.into(), m.relations.to_string(), param_list(&m.params)]
                    })
                    .collect(),
            ),
            "indexes" => {
                let mut rows: Vec<Vec<String>> = c
                    .indexes()
                    .map(|i| {
                        let methods: Vec<&str> = i.supported_methods.iter().map(|m| m.as_str()).collect();
                        vec![
                            i.name.to_string(),
                            String::new(),
                            i.required_properties.join(","),
                            methods.join(","),
                        ]
                    })
                    .collect();
                for name in self.db.names() {
                    let rel = self.db.read(name.as_str())?;
                    for i in rel.indexes() {
                        let detail = match i {
                            AttachedIndex::Metric(m) => format!("metric, {}", m.distance().name),
                            AttachedIndex::Ordered(_) => "ordered".into(),
                        };
                        rows.push(vec![i.name().to_string(), format!("{name}.{}", i.attribute()), detail, String::new()]);
                    }
                }
                (strings(["name", "attached_to", "requires", "methods"]), rows)
            }
            "relations" => {
                let mut rows = Vec::new();
                for name in self.db.names() {
                    let rel = self.db.read(name.as_str())?;
                    let attrs: Vec<String> = rel
                        .schema()
                        .attributes()
                        .iter()
                        .map(|a| AttributeDecl::from(a).to_string())
                        .collect();
                    rows.push(vec![name.to_string(), rel.len().to_string(), attrs.join(", ")]);
                }
                (strings(["name", "tuples", "attributes"]), rows)
            }
            _ => {
                return Err(CliError::Data(
                    "usage: \\list types|distances|extractors|methods|indexes|relations".into(),
                ))
            }
        };
        let rows: Vec<Vec<Value>> = rows
            .into_iter()
            .map(|r| r.into_iter().map(Value::string).collect())
            .collect();
        let types = vec!["string".to_string(); columns.len()];
        let view = ResultView {
            columns: &columns,
            types: &types,
            rows: &rows,
        };
        write_out(out, &render(view, self.output))?;
        write_out(out, "\n")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(s: &mut Session, text: &str) -> Result<String, ScriptError> {
        let mut out = Vec::new();
        let mut err = Vec::new();
        s.run_source(text, "test", Path::new("."), &mut out, &mut err)?;
        Ok(String::from_utf8(out).unwrap())
    }

    #[test]
    fn param_values() {
        let base = Path::new(".");
        assert_eq!(parse_param_value("3", base).unwrap(), Value::Integer(3));
        assert_eq!(parse_param_value("-2.5", base).unwrap(), Value::Float(-2.5));
        assert_eq!(parse_param_value("'it''s'", base).unwrap(), Value::string("it's"));
        assert_eq!(parse_param_value("vector:[1, 2]", base).unwrap(), Value::vector(vec![1.0, 2.0]));
        assert!(parse_param_value("two words", base).is_err());
        assert!(parse_param_value("ppm:missing.ppm", base).is_err());
    }

    #[test]
    fn rebinding_replaces() {
        let mut s = Session::new();
        run(&mut s, "\\set :k 1\n\\set :K 2\n").unwrap();
        assert_eq!(s.params.len(), 1);
        assert_eq!(s.params.get("k"), Some(&Value::Integer(2)));
    }

    #[test]
    fn custom_type_attribute() {
        let mut s = Session::new();
        run(
            &mut s,
            "CREATE TYPE point AS number_vector DISTANCE L2_metric;
             CREATE RELATION p (id integer, at point DISTANCE L1_metric);",
        )
        .unwrap();
        let mut rel = s.db.write("p").unwrap();
        rel.append_tuple(vec![Value::Integer(1), Value::vector(vec![0.0, 0.0])]).unwrap();
        rel.append_tuple(vec![Value::Integer(2), Value::vector(vec![3.0, 4.0])]).unwrap();
        drop(rel);
        s.output = OutputMode::Tsv;
        let out = run(&mut s, "SELECT id, DISTANCE(at, :o) AS d FROM p ORDER BY d;").unwrap_err();
        assert!(out.to_string().contains("'o'") || out.to_string().contains(":o"), "{out}");
        s.params.set("o", Value::vector(vec![0.0, 0.0]));
        let out = run(&mut s, "SELECT id, DISTANCE(at, :o) AS d FROM p ORDER BY d;").unwrap();
        assert_eq!(out, "id\td\ninteger\tfloat\n1\t0\n2\t7\n\n");
    }

    #[test]
    fn unknown_directive_reports_its_line() {
        let mut s = Session::new();
        let e = run(&mut s, "\n\n\\frobnicate\n").unwrap_err();
        assert_eq!(e.line, 3);
        assert_eq!(e.exit_code(), 2);
    }
}
