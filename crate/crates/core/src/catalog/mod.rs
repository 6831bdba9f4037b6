//! Registries of data types, functions, search methods and indexes.
//!
//! Every registry resolves names case-insensitively and rejects duplicates.
//! The planner never looks at function implementations to decide what is
//! allowed: it consults the declared [`PropertySet`] of each distance
//! function and the requirements of each [`IndexEntry`].

mod builtin;
mod entries;
pub mod properties;

use std::sync::Arc;

use indexmap::IndexMap;

pub use entries::*;

use crate::datamodel::{Attribute, DataTypeId, Name, Schema, Value, ValueKind};
use crate::error::{Error, Result};

pub const IDENTITY_DISTANCE: &str = "identity_distance";
pub const DEFAULT_METHOD: &str = "NN";
pub const METRIC_INDEX: &str = "metric";
pub const ORDERED_INDEX: &str = "ordered";

/// What an index would be built over.
#[derive(Clone, Copy, Debug)]
pub enum IndexTarget<'a> {
    Distance {
        entry: &'a DistanceFunctionEntry,
        params: &'a [Value],
    },
    DataType(&'a DataTypeEntry),
}

#[derive(Clone, Debug, Default)]
pub struct Catalog {
    types: IndexMap<Name, DataTypeEntry>,
    distances: IndexMap<Name, Arc<DistanceFunctionEntry>>,
    comparisons: IndexMap<Name, ComparisonFunctionEntry>,
    extractors: IndexMap<Name, Arc<ExtractorEntry>>,
    set_distances: IndexMap<Name, Arc<SetDistanceEntry>>,
    aggregated: IndexMap<Name, Arc<AggregatedDistanceEntry>>,
    methods: IndexMap<Name, Arc<SearchMethodEntry>>,
    indexes: IndexMap<Name, Arc<IndexEntry>>,
}

fn insert_unique<V>(map: &mut IndexMap<Name, V>, what: &str, name: &Name, value: V) -> Result<()> {
    if map.contains_key(name) {
        return Err(Error::catalog(format!("{what} '{name}' is already registered")));
    }
    map.insert(name.clone(), value);
    Ok(())
}

impl Catalog {
    /// An empty catalog.
    pub fn new() -> Self {
        Self::default()
    }

    /// The catalog with every built-in type, function, method and index.
    pub fn builtin() -> Self {
        builtin::catalog()
    }

    pub fn register_data_type(&mut self, entry: DataTypeEntry) -> Result<DataTypeId> {
        for name in entry.default_distance.iter() {
            if !self.distances.contains_key(name) {
                return Err(Error::catalog(format!(
                    "data type '{}' names unknown distance function '{name}'",
                    entry.id
                )));
            }
        }
        for name in entry.comparison.iter() {
            if !self.comparisons.contains_key(name) {
                return Err(Error::catalog(format!(
                    "data type '{}' names unknown comparison function '{name}'",
                    entry.id
                )));
            }
        }
        let id = entry.id.clone();
        insert_unique(&mut self.types, "data type", &id, entry)?;
        Ok(id)
    }

    pub fn register_distance(&mut self, entry: DistanceFunctionEntry) -> Result<()> {
        for t in &entry.operand_types {
            if !self.types.contains_key(t) {
                return Err(Error::catalog(format!(
                    "distance function '{}' references unknown data type '{t}'",
                    entry.name
                )));
            }
        }
        let name = entry.name.clone();
        insert_unique(&mut self.distances, "distance function", &name, Arc::new(entry))
    }

    pub fn register_comparison(&mut self, entry: ComparisonFunctionEntry) -> Result<()> {
        let name = entry.name.clone();
        insert_unique(&mut self.comparisons, "comparison function", &name, entry)
    }

    pub fn register_extractor(&mut self, entry: ExtractorEntry) -> Result<()> {
        for t in [&entry.input, &entry.output] {
            if !self.types.contains_key(t) {
                return Err(Error::catalog(format!(
                    "extractor '{}' references unknown data type '{t}'",
                    entry.name
                )));
            }
        }
        let name = entry.name.clone();
        insert_unique(&mut self.extractors, "extractor", &name, Arc::new(entry))
    }

    pub fn register_set_distance(&mut self, entry: SetDistanceEntry) -> Result<()> {
        let name = entry.name.clone();
        insert_unique(&mut self.set_distances, "set distance", &name, Arc::new(entry))
    }

    pub fn register_aggregated_distance(&mut self, entry: AggregatedDistanceEntry) -> Result<()> {
        let name = entry.name.clone();
        insert_unique(&mut self.aggregated, "aggregated distance", &name, Arc::new(entry))
    }

    pub fn register_method(&mut self, entry: SearchMethodEntry) -> Result<()> {
        let name = entry.name.clone();
        insert_unique(&mut self.methods, "search method", &name, Arc::new(entry))
    }

    pub fn register_index(&mut self, entry: IndexEntry) -> Result<()> {
        let name = entry.name.clone();
        insert_unique(&mut self.indexes, "index", &name, Arc::new(entry))
    }

    pub fn data_type(&self, name: &str) -> Option<&DataTypeEntry> {
        self.types.get(&Name::new(name))
    }

    pub fn distance(&self, name: &str) -> Option<Arc<DistanceFunctionEntry>> {
        self.distances.get(&Name::new(name)).cloned()
    }

    pub fn comparison(&self, name: &str) -> Option<&ComparisonFunctionEntry> {
        self.comparisons.get(&Name::new(name))
    }

    pub fn extractor(&self, name: &str) -> Option<Arc<ExtractorEntry>> {
        self.extractors.get(&Name::new(name)).cloned()
    }

    pub fn set_distance(&self, name: &str) -> Option<Arc<SetDistanceEntry>> {
        self.set_distances.get(&Name::new(name)).cloned()
    }

    pub fn aggregated_distance(&self, name: &str) -> Option<Arc<AggregatedDistanceEntry>> {
        self.aggregated.get(&Name::new(name)).cloned()
    }

    pub fn method(&self, name: &str) -> Option<Arc<SearchMethodEntry>> {
        self.methods.get(&Name::new(name)).cloned()
    }

    pub fn index(&self, name: &str) -> Option<Arc<IndexEntry>> {
        self.indexes.get(&Name::new(name)).cloned()
    }

    pub fn data_types(&self) -> impl Iterator<Item = &DataTypeEntry> {
        self.types.values()
    }

    pub fn distances(&self) -> impl Iterator<Item = &Arc<DistanceFunctionEntry>> {
        self.distances.values()
    }

    pub fn comparisons(&self) -> impl Iterator<Item = &ComparisonFunctionEntry> {
        self.comparisons.values()
    }

    pub fn extractors(&self) -> impl Iterator<Item = &Arc<ExtractorEntry>> {
        self.extractors.values()
    }

    pub fn set_distances(&self) -> impl Iterator<Item = &Arc<SetDistanceEntry>> {
        self.set_distances.values()
    }

    pub fn aggregated_distances(&self) -> impl Iterator<Item = &Arc<AggregatedDistanceEntry>> {
        self.aggregated.values()
    }

    pub fn methods(&self) -> impl Iterator<Item = &Arc<SearchMethodEntry>> {
        self.methods.values()
    }

    pub fn indexes(&self) -> impl Iterator<Item = &Arc<IndexEntry>> {
        self.indexes.values()
    }

    /// An attribute of a registered data type.
    pub fn attribute(&self, name: &str, data_type: &str) -> Result<Attribute> {
        let t = self
            .data_type(data_type)
            .ok_or_else(|| Error::catalog(format!("unknown data type '{data_type}'")))?;
        Ok(Attribute::new(name, t.id.clone(), t.repr))
    }

    /// Checks that every attribute's type and distance functions exist and
    /// fit together.
    pub fn validate_schema(&self, schema: &Schema) -> Result<()> {
        for a in schema.attributes() {
            let t = self.data_type(a.data_type.as_str()).ok_or_else(|| {
                Error::catalog(format!("unknown data type '{}' for attribute '{}'", a.data_type, a.name))
            })?;
            if !t.repr.fits(a.kind) {
                return Err(Error::catalog(format!(
                    "attribute '{}' is declared as {} but type '{}' stores {}",
                    a.name, a.kind, t.id, t.repr
                )));
            }
            for d in a.default_distance.iter().chain(&a.other_distances) {
                let entry = self.distance(d.as_str()).ok_or_else(|| {
                    Error::catalog(format!("unknown distance function '{d}' for attribute '{}'", a.name))
                })?;
                if !entry.accepts(&t.id, t.repr) {
                    return Err(Error::catalog(format!(
                        "distance function '{d}' does not accept type '{}' of attribute '{}'",
                        t.id, a.name
                    )));
                }
            }
        }
        Ok(())
    }

    fn identity(&self) -> Result<Arc<DistanceFunctionEntry>> {
        self.distance(IDENTITY_DISTANCE)
            .ok_or_else(|| Error::catalog("identity_distance is not registered"))
    }

    /// The attribute's default distance, or identity when none is declared.
    pub fn resolve_default_distance(&self, schema: &Schema, attr: &str) -> Result<Arc<DistanceFunctionEntry>> {
        let a = schema
            .attribute(attr)
            .ok_or_else(|| Error::catalog(format!("unknown attribute '{attr}'")))?;
        self.attribute_default_distance(a)
    }

    pub fn attribute_default_distance(&self, a: &Attribute) -> Result<Arc<DistanceFunctionEntry>> {
        match &a.default_distance {
            Some(d) => self
                .distance(d.as_str())
                .ok_or_else(|| Error::catalog(format!("unknown distance function '{d}'"))),
            None => self.identity(),
        }
    }

    /// The data type's default distance, or identity.
    pub fn type_default_distance(&self, data_type: &str) -> Result<Arc<DistanceFunctionEntry>> {
        match self.data_type(data_type).and_then(|t| t.default_distance.as_ref()) {
            Some(d) => self
                .distance(d.as_str())
                .ok_or_else(|| Error::catalog(format!("unknown distance function '{d}'"))),
            None => self.identity(),
        }
    }

    /// Data type registered for a value representation, preferring the
    /// type whose name matches the representation name.
    pub fn type_for_kind(&self, kind: ValueKind) -> Option<&DataTypeEntry> {
        self.data_type(kind.type_name())
            .or_else(|| self.types.values().find(|t| t.repr == kind))
    }

    /// Requirements of `index` that `target` does not meet.
    pub fn missing_requirements(&self, index: &IndexEntry, target: IndexTarget<'_>) -> Vec<String> {
        let mut missing = Vec::new();
        match target {
            IndexTarget::Distance { entry, params } => {
                let props = entry.properties_for(params);
                missing.extend(index.required_properties.iter().filter(|p| !props.declares(p)).cloned());
                if index.requires_comparison {
                    missing.push("comparison function".into());
                }
            }
            IndexTarget::DataType(t) => {
                missing.extend(index.required_properties.iter().cloned());
                let has_cmp = t.comparison.as_ref().is_some_and(|c| self.comparisons.contains_key(c));
                if index.requires_comparison && !has_cmp {
                    missing.push("comparison function".into());
                }
            }
        }
        missing
    }

    /// Whether `index` may be built over `target`.
    pub fn check_index_eligibility(&self, index: &IndexEntry, target: IndexTarget<'_>) -> bool {
        self.missing_requirements(index, target).is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::builtin::PlainDistance;

    #[test]
    fn names_resolve_case_insensitively() {
        let c = Catalog::builtin();
        assert!(c.distance("WEIGHTED_EDIT_DISTANCE").is_some());
        assert_eq!(c.distance("weighted_edit_distance").unwrap().params.len(), 3);
        assert!(c.method("messifsimilarityjoin").is_some());
        assert!(c.data_type("Number_Vector").is_some());
    }

    #[test]
    fn similarity_join_signature() {
        let c = Catalog::builtin();
        let m = c.method("MessifSimilarityJoin").unwrap();
        assert_eq!(m.query_objects, QueryObjects::Zero);
        assert_eq!(m.relations, RelationArity::Exactly(2));
        assert_eq!(m.params.len(), 1);
        assert_eq!(m.params[0].kind, ParamKind::Number);
    }

    #[test]
    fn duplicate_registration_fails() {
        let mut c = Catalog::builtin();
        let e = DistanceFunctionEntry::new(
            "L2_metric",
            &["number_vector"],
            PlainDistance::new(crate::functions::l2_metric, PropertySet::metric()),
        );
        assert!(c.register_distance(e).is_err());
        let unknown = DistanceFunctionEntry::new(
            "fresh",
            &["no_such_type"],
            PlainDistance::new(crate::functions::l2_metric, PropertySet::metric()),
        );
        assert!(c.register_distance(unknown).is_err());
    }

    #[test]
    fn default_distance_resolution() {
        let c = Catalog::builtin();
        let schema = Schema::new(vec![
            c.attribute("id", "integer").unwrap(),
            c.attribute("shape", "number_vector")
                .unwrap()
                .with_default("mpeg7_contour_shape_metric")
                .with_other("L2_metric"),
        ])
        .unwrap();
        assert!(c.resolve_default_distance(&schema, "shape").unwrap().name.matches("mpeg7_contour_shape_metric"));
        assert!(c.resolve_default_distance(&schema, "ID").unwrap().name.matches("identity_distance"));
        assert!(c.resolve_default_distance(&schema, "nosuch").is_err());
    }

    #[test]
    fn eligibility_rules() {
        let c = Catalog::builtin();
        let metric = c.index(METRIC_INDEX).unwrap();
        let ordered = c.index(ORDERED_INDEX).unwrap();
        let check = |name: &str, params: &[Value]| {
            let entry = c.distance(name).unwrap();
            let params = entry.bind_params(params.to_vec()).unwrap();
            c.check_index_eligibility(&metric, IndexTarget::Distance { entry: &entry, params: &params })
        };
        assert!(check("L2_metric", &[]));
        assert!(!check("tf_idf", &[]));
        assert!(!check("identity_distance", &[]));
        assert!(check("weighted_edit_distance", &[Value::Integer(1), Value::Integer(2), Value::Integer(2)]));
        assert!(!check("weighted_edit_distance", &[Value::Integer(1), Value::Integer(2), Value::Integer(3)]));
        let image = c.data_type("binary_image").unwrap();
        let integer = c.data_type("integer").unwrap();
        assert!(!c.check_index_eligibility(&ordered, IndexTarget::DataType(image)));
        assert!(c.check_index_eligibility(&ordered, IndexTarget::DataType(integer)));
        let tf = c.distance("tf_idf").unwrap();
        assert_eq!(
            c.missing_requirements(&metric, IndexTarget::Distance { entry: &tf, params: &[] }),
            vec![METRIC_POSTULATES.to_string()]
        );
    }

    #[test]
    fn schema_validation() {
        let c = Catalog::builtin();
        let bad = Schema::new(vec![c.attribute("v", "string").unwrap().with_default("L2_metric")]).unwrap();
        assert!(c.validate_schema(&bad).is_err());
        let unknown = Schema::new(vec![c.attribute("v", "string").unwrap().with_default("foo")]).unwrap();
        assert!(c.validate_schema(&unknown).is_err());
        assert!(c.attribute("v", "no_type").is_err());
    }
}
