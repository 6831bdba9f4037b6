//! Catalog adapters for the built-in functions.

use std::sync::Arc;

use crate::catalog::{
    AggregatedDistance, DistanceContext, DistanceFunction, Extractor, PropertySet, SetDistance, MONOTONICITY,
};
use crate::datamodel::Value;
use crate::error::{Error, Result};
use crate::functions::{self as f, edit::EditWeights, tfidf::TextCorpus};
use crate::Dist;

/// A parameterless distance given by a plain function.
#[derive(Debug)]
pub struct PlainDistance {
    pub func: fn(&Value, &Value) -> Result<Dist>,
    pub properties: PropertySet,
}

impl PlainDistance {
    pub fn new(func: fn(&Value, &Value) -> Result<Dist>, properties: PropertySet) -> Arc<Self> {
        Arc::new(PlainDistance { func, properties })
    }
}

impl DistanceFunction for PlainDistance {
    fn distance(&self, x: &Value, y: &Value, _: &[Value], _: &DistanceContext<'_>) -> Result<Dist> {
        (self.func)(x, y)
    }

    fn properties(&self, _: &[Value]) -> PropertySet {
        self.properties.clone()
    }
}

#[derive(Debug)]
pub struct WeightedEdit;

fn edit_weights(params: &[Value]) -> Result<EditWeights<f64>> {
    let w: Vec<f64> = params.iter().filter_map(Value::as_f64).collect();
    if w.len() != 3 || params.len() != 3 {
        return Err(Error::runtime("weighted_edit_distance takes three numeric weights"));
    }
    EditWeights::new(w[0], w[1], w[2])
}

impl DistanceFunction for WeightedEdit {
    fn distance(&self, x: &Value, y: &Value, params: &[Value], _: &DistanceContext<'_>) -> Result<Dist> {
        let w = edit_weights(params)?;
        f::weighted_edit_distance(x, y, w.substitute, w.insert, w.delete)
    }

    fn properties(&self, params: &[Value]) -> PropertySet {
        match edit_weights(params) {
            Ok(w) if w.is_metric() => PropertySet::metric(),
            _ => PropertySet::new().with(MONOTONICITY, true),
        }
    }
}

#[derive(Debug)]
pub struct TfIdf;

impl DistanceFunction for TfIdf {
    fn distance(&self, x: &Value, y: &Value, _: &[Value], ctx: &DistanceContext<'_>) -> Result<Dist> {
        match ctx.corpus {
            Some(c) => f::tf_idf(x, y, c),
            None => f::tf_idf(x, y, &TextCorpus::default()),
        }
    }

    fn properties(&self, _: &[Value]) -> PropertySet {
        PropertySet::new().with(MONOTONICITY, true)
    }
}

#[derive(Debug)]
pub struct PlainExtractor(pub fn(&Value) -> Result<Value>);

impl Extractor for PlainExtractor {
    fn extract(&self, input: &Value) -> Result<Value> {
        (self.0)(input)
    }
}

#[derive(Debug)]
pub struct Minimum;

impl SetDistance for Minimum {
    fn combine(&self, distances: &[Dist]) -> Result<Dist> {
        f::minimum_of(distances)
    }
}

#[derive(Debug)]
pub struct WeightSum;

impl AggregatedDistance for WeightSum {
    fn aggregate(&self, parts: &[(Dist, f64)]) -> Result<Dist> {
        f::weight_sum(parts)
    }
}
