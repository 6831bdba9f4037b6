#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use simseql_cli::{render, OutputMode, Session};
use simseql_core::OptimizerOptions;

pub fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn examples_dir() -> PathBuf {
    manifest_dir().join("examples")
}

pub fn bundled_script() -> PathBuf {
    examples_dir().join("section6.simseql")
}

pub fn expected_output() -> String {
    let path = examples_dir().join("section6.expected.tsv");
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// A session after running the bundled script, its output discarded.
pub fn bundled_session() -> Session {
    let mut s = Session::new();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    s.run_script(&bundled_script(), &mut out, &mut err)
        .unwrap_or_else(|e| panic!("{e}\n{}", String::from_utf8_lossy(&err)));
    s
}

/// Runs `text` with `opts` and renders the result in TSV mode.
pub fn query_tsv(s: &mut Session, text: &str, opts: OptimizerOptions) -> Result<String, String> {
    s.optimizer = opts;
    let out = s.query(text).map_err(|e| format!("{e}\n{text}"))?;
    Ok(render(out.view(), OutputMode::Tsv))
}

pub fn golden_path(name: &str) -> PathBuf {
    manifest_dir().join("tests/golden").join(name)
}

/// Compares with `tests/golden/<name>`; `UPDATE_GOLDEN=1` rewrites the
/// file instead.
pub fn check_golden(name: &str, actual: &str) -> Result<(), String> {
    let path = golden_path(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, actual).unwrap();
        return Ok(());
    }
    let expected = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if actual == expected {
        Ok(())
    } else {
        Err(format!("{} differs:\n--- expected\n{expected}--- actual\n{actual}", path.display()))
    }
}

/// Runs the binary in `dir` with `args`, feeding `stdin`.
pub fn simseql(dir: &Path, args: &[&str], stdin: &str) -> Output {
    use std::io::Write;
    let mut child = Command::new(env!("CARGO_BIN_EXE_simseql"))
        .current_dir(dir)
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Rows of a data file: header names, then cells split on tabs.
pub fn read_table(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let mut lines = text.lines();
    let names = lines.next().unwrap().split('\t').map(String::from).collect();
    lines.next();
    let rows = lines
        .filter(|l| !l.is_empty())
        .map(|l| l.split('\t').map(String::from).collect())
        .collect();
    (names, rows)
}

pub fn vector_cell(cell: &str) -> Vec<f64> {
    let inner = cell.trim().trim_start_matches('[').trim_end_matches(']');
    if inner.trim().is_empty() {
        return Vec::new();
    }
    inner.split(',').map(|x| x.trim().parse().unwrap()).collect()
}
