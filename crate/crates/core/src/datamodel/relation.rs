use std::sync::{Arc, RwLock, RwLockReadGuard, RwLockWriteGuard};

use indexmap::IndexMap;

use super::schema::{Name, Schema};
use super::value::{Value, ValueKind};
use crate::catalog::Catalog;
use crate::error::{Error, Result};
use crate::functions::tfidf::TextCorpus;
use crate::indexes::AttachedIndex;

/// Engine-internal, monotone row identifier. Never visible in the language.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RowId(pub u64);

#[derive(Clone, Debug, PartialEq)]
pub struct Tuple {
    pub row_id: RowId,
    pub values: Vec<Value>,
}

/// Named multiset of tuples conforming to a schema, plus attached indexes.
#[derive(Debug)]
pub struct Relation {
    name: Name,
    schema: Schema,
    tuples: Vec<Tuple>,
    next_row_id: u64,
    indexes: Vec<AttachedIndex>,
    corpora: Vec<Option<Arc<TextCorpus>>>,
}

/// Creates an empty relation after validating `schema` against the catalog.
pub fn make_relation(catalog: &Catalog, name: &str, schema: Schema) -> Result<Relation> {
    catalog.validate_schema(&schema)?;
    Ok(Relation::new(Name::new(name), schema))
}

impl Relation {
    fn new(name: Name, schema: Schema) -> Self {
        let corpora = schema
            .attributes()
            .iter()
            .map(|a| (a.kind == ValueKind::String).then(|| Arc::new(TextCorpus::default())))
            .collect();
        Relation {
            name,
            schema,
            tuples: Vec::new(),
            next_row_id: 1,
            indexes: Vec::new(),
            corpora,
        }
    }

    pub fn name(&self) -> &Name {
        &self.name
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    /// Appends a tuple, updating every attached index and text corpus.
    pub fn append_tuple(&mut self, values: Vec<Value>) -> Result<RowId> {
        let attrs = self.schema.attributes();
        if values.len() != attrs.len() {
            return Err(Error::runtime(format!(
                "relation '{}' expects {} values, got {}",
                self.name,
                attrs.len(),
                values.len()
            )));
        }
        let values = values
            .into_iter()
            .zip(attrs)
            .map(|(v, a)| {
                v.coerce_to(a.kind)
                    .map_err(|e| Error::runtime(format!("attribute '{}': {e}", a.name)))
            })
            .collect::<Result<Vec<_>>>()?;
        for index in &self.indexes {
            index.check_insert(&values[index.column()])?;
        }
        let row_id = RowId(self.next_row_id);
        for index in &mut self.indexes {
            index.insert(row_id, &values[index.column()])?;
        }
        for (corpus, v) in self.corpora.iter_mut().zip(&values) {
            if let (Some(c), Value::String(s)) = (corpus, v) {
                Arc::make_mut(c).add_document(s);
            }
        }
        self.next_row_id += 1;
        self.tuples.push(Tuple { row_id, values });
        Ok(row_id)
    }

    /// Every tuple exactly once, in row-id order.
    pub fn scan(&self) -> impl Iterator<Item = &Tuple> + '_ {
        self.tuples.iter()
    }

    pub fn tuples(&self) -> &[Tuple] {
        &self.tuples
    }

    /// Scan position of a row id.
    pub fn position_of(&self, row_id: RowId) -> Option<usize> {
        self.tuples.binary_search_by_key(&row_id, |t| t.row_id).ok()
    }

    pub fn tuple(&self, row_id: RowId) -> Option<&Tuple> {
        self.position_of(row_id).map(|i| &self.tuples[i])
    }

    pub fn attach_index(&mut self, index: AttachedIndex) -> Result<()> {
        if self.indexes.iter().any(|i| i.name() == index.name()) {
            return Err(Error::catalog(format!(
                "relation '{}' already has an index named '{}'",
                self.name,
                index.name()
            )));
        }
        self.indexes.push(index);
        Ok(())
    }

    pub fn indexes(&self) -> &[AttachedIndex] {
        &self.indexes
    }

    /// Document statistics of a string attribute, for tf-idf.
    pub fn corpus(&self, column: usize) -> Option<Arc<TextCorpus>> {
        self.corpora.get(column).cloned().flatten()
    }
}

/// Relation store shared by a session. Each relation has its own lock:
/// concurrent readers, exclusive writers.
#[derive(Debug, Default)]
pub struct Database {
    relations: IndexMap<Name, Arc<RwLock<Relation>>>,
}

impl Database {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, relation: Relation) -> Result<()> {
        let name = relation.name().clone();
        if self.relations.contains_key(&name) {
            return Err(Error::catalog(format!("relation '{name}' already exists")));
        }
        self.relations.insert(name, Arc::new(RwLock::new(relation)));
        Ok(())
    }

    /// `make_relation` followed by `register`.
    pub fn create_relation(&mut self, catalog: &Catalog, name: &str, schema: Schema) -> Result<()> {
        if self.contains(name) {
            return Err(Error::catalog(format!("relation '{name}' already exists")));
        }
        self.register(make_relation(catalog, name, schema)?)
    }

    pub fn get(&self, name: &str) -> Option<Arc<RwLock<Relation>>> {
        self.relations.get(&Name::new(name)).cloned()
    }

    pub fn read(&self, name: &str) -> Result<RwLockReadGuard<'_, Relation>> {
        let rel = self
            .relations
            .get(&Name::new(name))
            .ok_or_else(|| Error::runtime(format!("unknown relation '{name}'")))?;
        rel.read()
            .map_err(|_| Error::runtime(format!("relation '{name}' lock poisoned")))
    }

    pub fn write(&self, name: &str) -> Result<RwLockWriteGuard<'_, Relation>> {
        let rel = self
            .relations
            .get(&Name::new(name))
            .ok_or_else(|| Error::runtime(format!("unknown relation '{name}'")))?;
        rel.write()
            .map_err(|_| Error::runtime(format!("relation '{name}' lock poisoned")))
    }

    pub fn names(&self) -> impl Iterator<Item = &Name> {
        self.relations.keys()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.relations.contains_key(&Name::new(name))
    }
}
