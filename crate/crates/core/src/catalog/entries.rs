use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::datamodel::{DataTypeId, DistanceAnnotatedTuple, Name, Value, ValueKind};
use crate::error::{Error, Result};
use crate::functions::tfidf::TextCorpus;
use crate::Dist;

pub const METRIC_POSTULATES: &str = "metric_postulates";
pub const MONOTONICITY: &str = "monotonicity";

/// Declared properties of a function. Open-ended: any string key may be
/// declared, planners consult the ones they understand.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PropertySet(BTreeMap<String, bool>);

impl PropertySet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn metric() -> Self {
        PropertySet::new()
            .with(METRIC_POSTULATES, true)
            .with(MONOTONICITY, true)
    }

    pub fn with(mut self, key: &str, value: bool) -> Self {
        self.0.insert(key.to_ascii_lowercase(), value);
        self
    }

    pub fn declares(&self, key: &str) -> bool {
        self.0.get(&key.to_ascii_lowercase()).copied().unwrap_or(false)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, bool)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

impl fmt::Display for PropertySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let on: Vec<&str> = self.iter().filter(|(_, v)| *v).map(|(k, _)| k).collect();
        if on.is_empty() {
            f.write_str("-")
        } else {
            f.write_str(&on.join(","))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamKind {
    Number,
    String,
    /// An attribute name of the searched relation (e.g. distinct kNN).
    Attribute,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParamSpec {
    pub name: String,
    pub kind: ParamKind,
    pub default: Option<Value>,
}

impl ParamSpec {
    pub fn number(name: &str) -> Self {
        ParamSpec {
            name: name.into(),
            kind: ParamKind::Number,
            default: None,
        }
    }

    pub fn attribute(name: &str) -> Self {
        ParamSpec {
            name: name.into(),
            kind: ParamKind::Attribute,
            default: None,
        }
    }

    pub fn with_default(mut self, v: Value) -> Self {
        self.default = Some(v);
        self
    }
}

/// Checks `args` against `specs`, filling trailing defaults.
pub fn bind_params(owner: &str, specs: &[ParamSpec], mut args: Vec<Value>) -> Result<Vec<Value>> {
    let required = specs.iter().take_while(|s| s.default.is_none()).count();
    if args.len() < required || args.len() > specs.len() {
        let expect = if required == specs.len() {
            format!("{}", specs.len())
        } else {
            format!("{required} to {}", specs.len())
        };
        return Err(Error::bind(
            None,
            format!("'{owner}' takes {expect} parameter(s), got {}", args.len()),
        ));
    }
    for (spec, arg) in specs.iter().zip(&args) {
        let ok = match spec.kind {
            ParamKind::Number => arg.kind().is_some_and(|k| k.is_numeric()),
            ParamKind::String | ParamKind::Attribute => arg.kind() == Some(ValueKind::String),
        };
        if !ok {
            return Err(Error::bind(
                None,
                format!("parameter '{}' of '{owner}' must be {:?}, got {arg}", spec.name, spec.kind),
            ));
        }
    }
    for spec in &specs[args.len()..] {
        args.push(spec.default.clone().expect("defaults are trailing"));
    }
    Ok(args)
}

/// Evaluation context a distance function may need besides its operands.
#[derive(Clone, Copy, Debug, Default)]
pub struct DistanceContext<'a> {
    /// Document statistics of the attribute being compared (tf-idf).
    pub corpus: Option<&'a TextCorpus>,
}

/// Implementation of a basic distance function `D x D -> [0, inf]`.
pub trait DistanceFunction: Send + Sync + fmt::Debug {
    fn distance(&self, x: &Value, y: &Value, params: &[Value], ctx: &DistanceContext<'_>) -> Result<Dist>;

    /// Properties under the given (already bound) parameters.
    fn properties(&self, params: &[Value]) -> PropertySet;
}

#[derive(Clone, Debug)]
pub struct DistanceFunctionEntry {
    pub name: Name,
    /// Accepted operand types; empty accepts every type.
    pub operand_types: Vec<DataTypeId>,
    pub params: Vec<ParamSpec>,
    /// Properties under default parameters.
    pub properties: PropertySet,
    /// Functions this one is a lower bound of.
    pub lower_bounds: Vec<Name>,
    pub implementation: Arc<dyn DistanceFunction>,
}

impl DistanceFunctionEntry {
    pub fn new(name: &str, operand_types: &[&str], implementation: Arc<dyn DistanceFunction>) -> Self {
        DistanceFunctionEntry {
            name: Name::new(name),
            operand_types: operand_types.iter().map(|t| Name::new(*t)).collect(),
            params: Vec::new(),
            properties: PropertySet::new(),
            lower_bounds: Vec::new(),
            implementation,
        }
    }

    pub fn with_params(mut self, params: Vec<ParamSpec>) -> Self {
        self.params = params;
        self
    }

    pub fn lower_bound_of(mut self, other: &str) -> Self {
        self.lower_bounds.push(Name::new(other));
        self
    }

    /// Fills `properties` from the implementation under default parameters.
    pub fn declared(mut self) -> Self {
        let defaults: Vec<Value> = self.params.iter().filter_map(|p| p.default.clone()).collect();
        if defaults.len() == self.params.len() {
            self.properties = self.implementation.properties(&defaults);
        }
        self
    }

    pub fn accepts(&self, data_type: &DataTypeId, repr: ValueKind) -> bool {
        self.operand_types.is_empty()
            || self
                .operand_types
                .iter()
                .any(|t| t == data_type || t.matches(repr.type_name()))
    }

    pub fn properties_for(&self, params: &[Value]) -> PropertySet {
        self.implementation.properties(params)
    }

    pub fn bind_params(&self, args: Vec<Value>) -> Result<Vec<Value>> {
        bind_params(self.name.as_str(), &self.params, args)
    }

    /// Distance with the engine-wide conventions: a null operand is at
    /// infinite distance, results are never negative or NaN.
    pub fn evaluate(&self, x: &Value, y: &Value, params: &[Value], ctx: &DistanceContext<'_>) -> Result<Dist> {
        if x.is_null() || y.is_null() {
            return Ok(Dist::INFINITY);
        }
        let d = self.implementation.distance(x, y, params, ctx)?;
        if d.is_nan() || d < 0.0 {
            return Err(Error::runtime(format!(
                "distance function '{}' returned invalid value {d}",
                self.name
            )));
        }
        Ok(d)
    }
}

pub type CompareFn = fn(&Value, &Value) -> std::cmp::Ordering;

#[derive(Clone, Debug)]
pub struct ComparisonFunctionEntry {
    pub name: Name,
    pub operand_type: DataTypeId,
    pub implementation: CompareFn,
}

pub trait Extractor: Send + Sync + fmt::Debug {
    fn extract(&self, input: &Value) -> Result<Value>;
}

#[derive(Clone, Debug)]
pub struct ExtractorEntry {
    pub name: Name,
    pub input: DataTypeId,
    pub output: DataTypeId,
    pub implementation: Arc<dyn Extractor>,
}

/// Combines element distances from a candidate to each query object.
pub trait SetDistance: Send + Sync + fmt::Debug {
    fn combine(&self, distances: &[Dist]) -> Result<Dist>;
}

#[derive(Clone, Debug)]
pub struct SetDistanceEntry {
    pub name: Name,
    pub implementation: Arc<dyn SetDistance>,
}

/// Combines (distance, weight) parts into one distance.
pub trait AggregatedDistance: Send + Sync + fmt::Debug {
    fn aggregate(&self, parts: &[(Dist, f64)]) -> Result<Dist>;
}

#[derive(Clone, Debug)]
pub struct AggregatedDistanceEntry {
    pub name: Name,
    pub implementation: Arc<dyn AggregatedDistance>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QueryObjects {
    Zero,
    Singleton,
    Arbitrary,
}

impl QueryObjects {
    pub fn admits(self, n: usize) -> bool {
        match self {
            QueryObjects::Zero => n == 0,
            QueryObjects::Singleton => n == 1,
            QueryObjects::Arbitrary => true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelationArity {
    Exactly(usize),
    AtLeast(usize),
}

impl RelationArity {
    pub fn admits(self, n: usize) -> bool {
        match self {
            RelationArity::Exactly(k) => n == k,
            RelationArity::AtLeast(k) => n >= k,
        }
    }
}

impl fmt::Display for RelationArity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelationArity::Exactly(k) => write!(f, "{k}"),
            RelationArity::AtLeast(k) => write!(f, ">={k}"),
        }
    }
}

/// Selection semantics of a user-registered method: it receives every
/// candidate (sequential access path) in ascending distance order.
pub trait SearchMethod: Send + Sync + fmt::Debug {
    fn select(
        &self,
        candidates: Vec<DistanceAnnotatedTuple>,
        params: &[Value],
    ) -> Result<Vec<DistanceAnnotatedTuple>>;
}

#[derive(Clone, Debug)]
pub enum MethodKind {
    NearestNeighbor,
    Range,
    ApproximateRange,
    SimilarityJoin,
    ReverseKnn,
    DistinctKnn,
    Custom(Arc<dyn SearchMethod>),
}

#[derive(Clone, Debug)]
pub struct SearchMethodEntry {
    pub name: Name,
    pub query_objects: QueryObjects,
    pub relations: RelationArity,
    pub params: Vec<ParamSpec>,
    pub kind: MethodKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndexKind {
    Metric,
    Ordered,
}

#[derive(Clone, Debug)]
pub struct IndexEntry {
    pub name: Name,
    pub kind: IndexKind,
    /// Properties the indexed distance function must declare.
    pub required_properties: Vec<String>,
    /// Whether the indexed data type needs a comparison function.
    pub requires_comparison: bool,
    pub supported_methods: Vec<Name>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DataTypeEntry {
    pub id: DataTypeId,
    pub repr: ValueKind,
    /// Used by `DISTANCE(x, y)` when neither operand carries an attribute
    /// default. Identity when absent.
    pub default_distance: Option<Name>,
    pub comparison: Option<Name>,
}
