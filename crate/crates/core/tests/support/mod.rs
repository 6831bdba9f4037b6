#![allow(dead_code)]

pub mod ast;
pub mod cases;
pub mod queries;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use simseql_core::datamodel::Value;
use simseql_core::indexes::{build_metric_index, AttachedIndex, DEFAULT_INDEX_SEED};
use simseql_core::{bind, execute, explain, optimize, parse, Catalog, Database, OptimizerOptions, ParamBinding, ResultSet, Schema};

/// A relation from `(name, type, default distance)` columns and rows.
pub fn relation(c: &Catalog, db: &mut Database, name: &str, columns: &[(&str, &str, Option<&str>)], rows: Vec<Vec<Value>>) {
    let attrs = columns
        .iter()
        .map(|(n, t, d)| {
            let a = c.attribute(n, t).unwrap();
            match d {
                Some(d) => a.with_default(*d),
                None => a,
            }
        })
        .collect();
    db.create_relation(c, name, Schema::new(attrs).unwrap()).unwrap();
    let mut rel = db.write(name).unwrap();
    for r in rows {
        rel.append_tuple(r).unwrap();
    }
}

pub fn attach_metric(c: &Catalog, db: &Database, rel: &str, attr: &str, distance: Option<(&str, Vec<Value>)>) {
    let mut r = db.write(rel).unwrap();
    let index = build_metric_index(c, &r, attr, distance, DEFAULT_INDEX_SEED).unwrap();
    r.attach_index(AttachedIndex::Metric(index)).unwrap();
}

pub fn strings(c: &Catalog, words: &[&str]) -> Database {
    let mut db = Database::new();
    let rows = words
        .iter()
        .enumerate()
        .map(|(i, w)| vec![Value::Integer(i as i64 + 1), Value::string(w)])
        .collect();
    relation(c, &mut db, "keyword", &[("id", "integer", None), ("value", "string", Some("simple_edit_distance"))], rows);
    db
}

/// `pts(id, g, v, s)`: small-integer vectors and short strings, so that
/// distance ties are common.
pub fn random_points(c: &Catalog, seed: u64, n: usize, dim: usize) -> Database {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut db = Database::new();
    let groups = rng.gen_range(1..=8);
    let rows = (0..n)
        .map(|i| {
            let v: Vec<f64> = (0..dim).map(|_| f64::from(rng.gen_range(-6i32..=6))).collect();
            let len = rng.gen_range(0..=5);
            let s: String = (0..len).map(|_| ['a', 'b', 'c', 'd'][rng.gen_range(0..4)]).collect();
            vec![
                Value::Integer(i as i64 + 1),
                Value::Integer(rng.gen_range(0..groups)),
                Value::vector(v),
                Value::string(s),
            ]
        })
        .collect();
    relation(
        c,
        &mut db,
        "pts",
        &[
            ("id", "integer", None),
            ("g", "integer", None),
            ("v", "number_vector", Some("L2_metric")),
            ("s", "string", Some("simple_edit_distance")),
        ],
        rows,
    );
    db
}

pub fn run(text: &str, c: &Catalog, db: &Database, params: &ParamBinding, opts: OptimizerOptions) -> (String, ResultSet) {
    let q = parse(text).unwrap_or_else(|e| panic!("{text}: {e}"));
    let bound = bind(&q, c, db, params).unwrap_or_else(|e| panic!("{text}: {e}"));
    let plan = optimize(&bound, c, db, &opts);
    let rs = execute(&plan, db).unwrap_or_else(|e| panic!("{text}: {e}"));
    (explain(&plan), rs)
}

pub fn explain_of(text: &str, c: &Catalog, db: &Database, params: &ParamBinding, opts: OptimizerOptions) -> String {
    let q = parse(text).unwrap();
    let bound = bind(&q, c, db, params).unwrap_or_else(|e| panic!("{text}: {e}"));
    explain(&optimize(&bound, c, db, &opts))
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    a == b || (a - b).abs() <= rel * a.abs().max(b.abs())
}

/// Ordered row equality, floats compared at `rel` relative tolerance.
pub fn same_rows(a: &ResultSet, b: &ResultSet, rel: f64) -> Result<(), String> {
    if a.rows.len() != b.rows.len() {
        return Err(format!("{} rows vs {} rows", a.rows.len(), b.rows.len()));
    }
    for (i, (x, y)) in a.rows.iter().zip(&b.rows).enumerate() {
        let equal = x.len() == y.len()
            && x.iter().zip(y).all(|(u, v)| match (u, v) {
                (Value::Float(p), Value::Float(q)) => close(*p, *q, rel),
                _ => u.total_cmp(v) == std::cmp::Ordering::Equal,
            });
        if !equal {
            return Err(format!("row {i}: {x:?} vs {y:?}"));
        }
    }
    Ok(())
}

pub fn ints(rs: &ResultSet, col: usize) -> Vec<i64> {
    rs.rows.iter().map(|r| r[col].as_i64().unwrap()).collect()
}

pub fn texts(rs: &ResultSet, col: usize) -> Vec<String> {
    rs.rows.iter().map(|r| r[col].as_str().unwrap().to_string()).collect()
}

fn gray(shade: u8) -> Value {
    Value::image(simseql_core::datamodel::ImageRaster::from_fn(4, 4, |x, _| if x < 2 { [shade; 3] } else { [255 - shade; 3] }))
}

/// The four media relations with a handful of rows each.
pub fn media_db(c: &Catalog) -> Database {
    let mut db = Database::new();
    let v = |xs: &[f64]| Value::vector(xs.to_vec());
    let image_attrs = [
        ("id", "integer", None),
        ("image", "binary_image", None),
        ("color", "number_vector", Some("mpeg7_color_layout_metric")),
        ("shape", "number_vector", Some("mpeg7_contour_shape_metric")),
        ("title", "string", Some("tf_idf")),
        ("location", "string", Some("simple_edit_distance")),
        ("date", "date", Some("L1_metric")),
    ];
    let images = (0..6)
        .map(|i| {
            let f = i as f64;
            vec![
                Value::Integer(i + 1),
                gray((i * 40) as u8),
                v(&[f; 12]),
                v(&[f / 16.0; 16]),
                Value::string(format!("photo {i} of a volcano")),
                Value::string(["Naples", "Rome", "Oslo"][i as usize % 3]),
                Value::Date(i as i32 * 30),
            ]
        })
        .collect();
    relation(c, &mut db, "image", &image_attrs, images);
    let frame_attrs = [
        ("id", "integer", None),
        ("video_id", "integer", None),
        ("face_descriptor", "number_vector", Some("mpeg7_face_metric")),
        ("subtitles", "string", Some("tf_idf")),
        ("time_second", "long", Some("L1_metric")),
        ("color", "number_vector", Some("mpeg7_color_layout_metric")),
        ("shape", "number_vector", Some("mpeg7_contour_shape_metric")),
    ];
    let frames = (0..8)
        .map(|i| {
            let f = i as f64;
            vec![
                Value::Integer(i + 1),
                Value::Integer(i / 3 + 1),
                v(&[f, 0.0, 1.0]),
                Value::string(if i % 2 == 0 { "the vulcano erupts" } else { "weather report" }),
                Value::Long(i * 45),
                v(&[f; 12]),
                v(&[f / 16.0; 16]),
            ]
        })
        .collect();
    relation(c, &mut db, "video_frame", &frame_attrs, frames);
    let words = ["feather", "faether", "dog", "dot", "volcano"];
    let keywords = words
        .iter()
        .enumerate()
        .map(|(i, w)| vec![Value::Integer(i as i64 + 1), Value::string(w)])
        .collect();
    relation(
        c,
        &mut db,
        "keyword",
        &[("id", "integer", None), ("value", "string", Some("simple_edit_distance"))],
        keywords,
    );
    let links = (0..12)
        .map(|i| vec![Value::Integer(i % 6 + 1), Value::Integer(i % 5 + 1)])
        .collect();
    relation(c, &mut db, "image_keyword", &[("image_id", "integer", None), ("keyword_id", "integer", None)], links);
    db
}

/// Bindings for every parameter the example queries use.
pub fn media_params() -> ParamBinding {
    let mut p = ParamBinding::new();
    for (i, name) in ["o1", "o2", "o3", "VesuvImage"].iter().enumerate() {
        p.set(name, gray((i * 50) as u8));
    }
    p.set("queryImage", Value::vector(vec![0.1; 16]));
    p.set("Image", Value::vector(vec![2.0; 12]));
    p.set("ObamaFace", Value::vector(vec![1.0, 0.0, 1.0]));
    p.set("BushFace", Value::vector(vec![2.0, 0.0, 1.0]));
    p
}
