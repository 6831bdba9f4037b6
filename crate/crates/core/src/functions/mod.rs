//! Built-in distance functions, extractors and generalized distances.
//!
//! The value-level functions below are what the catalog registers; each
//! one checks operand kinds and reports mismatches as runtime errors. The
//! `mpeg7_*` metrics and `extract_MPEG7_*` extractors are lightweight
//! stand-ins that keep the descriptor names.

pub mod builtin;
pub mod edit;
pub mod extractors;
pub mod generalized;
pub mod kernels;
pub mod tfidf;

use crate::datamodel::{Value, ValueKind};
use crate::error::{Error, Result};
use crate::Dist;

pub use generalized::{minimum_of, set_distance_minimum, weight_sum};
use tfidf::TextCorpus;

/// Weight profile of the `mpeg7_*` metrics: one on every coordinate.
pub const MPEG7_WEIGHT: Dist = 1.0;

fn kind_name(v: &Value) -> &'static str {
    v.kind().map(|k| k.type_name()).unwrap_or("null")
}

fn mismatch(func: &str, x: &Value, y: &Value) -> Error {
    Error::runtime(format!(
        "{func} cannot compare {} with {}",
        kind_name(x),
        kind_name(y)
    ))
}

fn same_kind(x: &Value, y: &Value) -> bool {
    match (x.kind(), y.kind()) {
        (Some(a), Some(b)) => a.fits(b),
        _ => false,
    }
}

/// 0 for structurally equal values, infinity otherwise.
pub fn identity_distance(x: &Value, y: &Value) -> Result<Dist> {
    if !same_kind(x, y) {
        return Err(mismatch("identity_distance", x, y));
    }
    Ok(if x == y { 0.0 } else { Dist::INFINITY })
}

/// Coordinates of a number vector, or a scalar number/date as a
/// one-dimensional vector.
fn coordinates(v: &Value) -> Option<std::borrow::Cow<'_, [f64]>> {
    match v {
        Value::NumberVector(c) => Some(std::borrow::Cow::Borrowed(c)),
        Value::Integer(_) | Value::Long(_) | Value::Float(_) | Value::Date(_) => {
            Some(std::borrow::Cow::Owned(vec![v.as_f64()?]))
        }
        _ => None,
    }
}

fn vectors<'a>(func: &str, x: &'a Value, y: &'a Value) -> Result<(&'a [f64], &'a [f64])> {
    match (x.as_vector(), y.as_vector()) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(mismatch(func, x, y)),
    }
}

pub fn l1_metric(x: &Value, y: &Value) -> Result<Dist> {
    let vector_pair = x.kind() == Some(ValueKind::NumberVector) || y.kind() == Some(ValueKind::NumberVector);
    match (coordinates(x), coordinates(y)) {
        (Some(a), Some(b)) if !vector_pair || same_kind(x, y) => kernels::l1(&a, &b),
        _ => Err(mismatch("L1_metric", x, y)),
    }
}

pub fn l2_metric(x: &Value, y: &Value) -> Result<Dist> {
    let (a, b) = vectors("L2_metric", x, y)?;
    kernels::l2(a, b)
}

fn strings<'a>(func: &str, x: &'a Value, y: &'a Value) -> Result<(&'a str, &'a str)> {
    match (x.as_str(), y.as_str()) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(mismatch(func, x, y)),
    }
}

pub fn simple_edit_distance(x: &Value, y: &Value) -> Result<Dist> {
    let (a, b) = strings("simple_edit_distance", x, y)?;
    Ok(edit::levenshtein(a, b) as Dist)
}

/// Weighted edit distance; weights are (substitute, insert, delete).
pub fn weighted_edit_distance(x: &Value, y: &Value, substitute: f64, insert: f64, delete: f64) -> Result<Dist> {
    let (a, b) = strings("weighted_edit_distance", x, y)?;
    let w = edit::EditWeights::new(substitute, insert, delete)?;
    Ok(edit::weighted_edit(a, b, w))
}

pub fn tf_idf(x: &Value, y: &Value, corpus: &TextCorpus) -> Result<Dist> {
    let (a, b) = strings("tf_idf", x, y)?;
    Ok(tfidf::tf_idf_distance(a, b, corpus))
}

fn mpeg7(func: &str, x: &Value, y: &Value) -> Result<Dist> {
    let (a, b) = vectors(func, x, y)?;
    kernels::weighted_l2(a, b, &kernels::WeightProfile::Uniform(MPEG7_WEIGHT))
}

pub fn mpeg7_color_layout_metric(x: &Value, y: &Value) -> Result<Dist> {
    mpeg7("mpeg7_color_layout_metric", x, y)
}

pub fn mpeg7_contour_shape_metric(x: &Value, y: &Value) -> Result<Dist> {
    mpeg7("mpeg7_contour_shape_metric", x, y)
}

pub fn mpeg7_face_metric(x: &Value, y: &Value) -> Result<Dist> {
    mpeg7("mpeg7_face_metric", x, y)
}

fn raster<'a>(func: &str, v: &'a Value) -> Result<&'a crate::datamodel::ImageRaster> {
    v.as_image()
        .ok_or_else(|| Error::runtime(format!("{func} expects binary_image input, got {}", kind_name(v))))
}

#[allow(non_snake_case)]
pub fn extract_MPEG7_color_layout(img: &Value) -> Result<Value> {
    let r = raster("extract_MPEG7_color_layout", img)?;
    Ok(Value::vector(extractors::color_layout(r)?))
}

#[allow(non_snake_case)]
pub fn extract_MPEG7_contour_shape(img: &Value) -> Result<Value> {
    let r = raster("extract_MPEG7_contour_shape", img)?;
    Ok(Value::vector(extractors::contour_shape(r)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datamodel::ImageRaster;

    #[test]
    fn identity_values() {
        assert_eq!(identity_distance(&Value::Integer(5), &Value::Integer(5)).unwrap(), 0.0);
        assert_eq!(identity_distance(&Value::Integer(5), &Value::Integer(7)).unwrap(), Dist::INFINITY);
        assert_eq!(identity_distance(&Value::string("a"), &Value::string("a")).unwrap(), 0.0);
        assert_eq!(identity_distance(&Value::Integer(5), &Value::Long(5)).unwrap(), 0.0);
        assert!(identity_distance(&Value::Integer(5), &Value::string("5")).is_err());
    }

    #[test]
    fn l1_on_vectors_and_scalars() {
        assert_eq!(l1_metric(&Value::vector([1.0, 2.0]), &Value::vector([4.0, 6.0])).unwrap(), 7.0);
        assert_eq!(l1_metric(&Value::Date(10), &Value::Date(3)).unwrap(), 7.0);
        assert_eq!(l1_metric(&Value::Long(100), &Value::Integer(-20)).unwrap(), 120.0);
        assert!(l1_metric(&Value::vector([1.0]), &Value::Integer(1)).is_err());
        assert!(l1_metric(&Value::vector([1.0]), &Value::vector([1.0, 2.0])).is_err());
    }

    #[test]
    fn l2_and_stand_ins() {
        let (a, b) = (Value::vector([0.0, 0.0]), Value::vector([3.0, 4.0]));
        assert_eq!(l2_metric(&a, &b).unwrap(), 5.0);
        for f in [mpeg7_color_layout_metric, mpeg7_contour_shape_metric, mpeg7_face_metric] {
            assert_eq!(f(&a, &b).unwrap(), 5.0);
            assert_eq!(f(&b, &b).unwrap(), 0.0);
        }
        assert!(l2_metric(&Value::string("x"), &b).is_err());
    }

    #[test]
    fn edit_values() {
        let s = Value::string;
        assert_eq!(simple_edit_distance(&s("cat"), &s("cut")).unwrap(), 1.0);
        assert_eq!(simple_edit_distance(&s("cat"), &s("cats")).unwrap(), 1.0);
        assert_eq!(weighted_edit_distance(&s("cat"), &s("cut"), 1.0, 2.0, 2.0).unwrap(), 1.0);
        assert_eq!(weighted_edit_distance(&s("cat"), &s("cats"), 1.0, 2.0, 2.0).unwrap(), 2.0);
        assert!(weighted_edit_distance(&s("a"), &s("b"), -1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn extractor_outputs() {
        let img = Value::image(ImageRaster::from_fn(6, 6, |_, _| [128; 3]));
        assert_eq!(extract_MPEG7_color_layout(&img).unwrap(), Value::vector(vec![128.0; 12]));
        assert_eq!(extract_MPEG7_contour_shape(&img).unwrap().as_vector().unwrap().len(), 16);
        assert!(extract_MPEG7_color_layout(&Value::Integer(1)).is_err());
        assert_eq!(extract_MPEG7_color_layout(&img).unwrap(), extract_MPEG7_color_layout(&img).unwrap());
    }
}
