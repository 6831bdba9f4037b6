use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use super::value::ValueKind;
use crate::error::{Error, Result};

/// Case-insensitive identifier used for every registry and schema name.
/// Keeps the spelling it was created with for display.
#[derive(Clone, Debug)]
pub struct Name(Arc<str>);

impl Name {
    pub fn new(s: impl AsRef<str>) -> Self {
        Name(Arc::from(s.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn key(&self) -> String {
        self.0.to_ascii_lowercase()
    }

    pub fn matches(&self, other: &str) -> bool {
        self.0.eq_ignore_ascii_case(other)
    }
}

impl PartialEq for Name {
    fn eq(&self, other: &Self) -> bool {
        self.0.eq_ignore_ascii_case(&other.0)
    }
}

impl Eq for Name {}

impl Hash for Name {
    fn hash<H: Hasher>(&self, state: &mut H) {
        for b in self.0.bytes() {
            state.write_u8(b.to_ascii_lowercase());
        }
        state.write_u8(0xff);
    }
}

impl PartialOrd for Name {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Name {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key().cmp(&other.key())
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Self {
        Name::new(s)
    }
}

impl From<String> for Name {
    fn from(s: String) -> Self {
        Name::new(s)
    }
}

/// Identifier of a catalog data type.
pub type DataTypeId = Name;

#[derive(Clone, Debug, PartialEq)]
pub struct Attribute {
    pub name: Name,
    pub data_type: DataTypeId,
    /// Storage representation of `data_type`.
    pub kind: ValueKind,
    /// Distance used by `BY attr` and `DISTANCE(x, attr)`; identity when absent.
    pub default_distance: Option<Name>,
    /// Further distance functions declared for the attribute.
    pub other_distances: Vec<Name>,
}

impl Attribute {
    pub fn new(name: impl Into<Name>, data_type: impl Into<DataTypeId>, kind: ValueKind) -> Self {
        Attribute {
            name: name.into(),
            data_type: data_type.into(),
            kind,
            default_distance: None,
            other_distances: Vec::new(),
        }
    }

    pub fn with_default(mut self, distance: impl Into<Name>) -> Self {
        self.default_distance = Some(distance.into());
        self
    }

    pub fn with_other(mut self, distance: impl Into<Name>) -> Self {
        self.other_distances.push(distance.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Schema {
    attributes: Vec<Attribute>,
}

impl Schema {
    pub fn new(attributes: Vec<Attribute>) -> Result<Self> {
        if attributes.is_empty() {
            return Err(Error::catalog("relation schema needs at least one attribute"));
        }
        for (i, a) in attributes.iter().enumerate() {
            if attributes[..i].iter().any(|b| b.name == a.name) {
                return Err(Error::catalog(format!("duplicate attribute '{}'", a.name)));
            }
            if let Some(d) = &a.default_distance {
                if a.other_distances.contains(d) {
                    return Err(Error::catalog(format!(
                        "distance '{d}' listed twice for attribute '{}'",
                        a.name
                    )));
                }
            }
        }
        Ok(Schema { attributes })
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn arity(&self) -> usize {
        self.attributes.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name.matches(name))
    }

    pub fn attribute(&self, name: &str) -> Option<&Attribute> {
        self.index_of(name).map(|i| &self.attributes[i])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_compare_case_insensitively() {
        assert_eq!(Name::new("L1_metric"), Name::new("l1_METRIC"));
        let mut set = std::collections::HashSet::new();
        set.insert(Name::new("Image"));
        assert!(set.contains(&Name::new("IMAGE")));
        assert_eq!(Name::new("L1_metric").to_string(), "L1_metric");
    }

    #[test]
    fn schema_rejects_empty_and_duplicates() {
        assert!(Schema::new(vec![]).is_err());
        let a = Attribute::new("id", "integer", ValueKind::Integer);
        let b = Attribute::new("ID", "integer", ValueKind::Integer);
        assert!(Schema::new(vec![a.clone(), b]).is_err());
        let s = Schema::new(vec![a]).unwrap();
        assert_eq!(s.index_of("Id"), Some(0));
    }
}
