//! Row schemas of plan nodes and name resolution.

use crate::datamodel::{Attribute, DataTypeId, Name, ValueKind};
use crate::error::{Error, Pos, Result};

/// What a column holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ColumnRole {
    Attribute,
    /// Distance attribute appended by a similarity search.
    Distance,
    /// 1-based position in the ascending-distance order of a search.
    Rank,
}

/// Base relation column a value was read from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColumnOrigin {
    pub relation: Name,
    pub column: usize,
}

/// Static type of a bound expression. Unknown parts are `None` (null
/// literals, nulls coming out of aggregates).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Ty {
    pub kind: Option<ValueKind>,
    pub data_type: Option<DataTypeId>,
    /// Schema attribute, for attribute-level default distances.
    pub attribute: Option<Attribute>,
    pub origin: Option<ColumnOrigin>,
}

impl Ty {
    pub fn of_kind(kind: ValueKind) -> Self {
        Ty {
            kind: Some(kind),
            data_type: Some(Name::new(kind.type_name())),
            attribute: None,
            origin: None,
        }
    }

    pub fn unknown() -> Self {
        Ty::default()
    }

    pub fn is_numeric(&self) -> bool {
        self.kind.is_some_and(|k| k.is_numeric())
    }

    /// Name used in diagnostics.
    pub fn describe(&self) -> String {
        match (&self.data_type, self.kind) {
            (Some(t), _) => t.to_string(),
            (None, Some(k)) => k.type_name().into(),
            _ => "null".into(),
        }
    }

    /// Whether values of the two types may be compared or measured.
    pub fn compatible(&self, other: &Ty) -> bool {
        match (self.kind, other.kind) {
            (None, _) | (_, None) => true,
            (Some(a), Some(b)) if a.is_numeric() && b.is_numeric() => true,
            (Some(a), Some(b)) => {
                a == b
                    && match (&self.data_type, &other.data_type) {
                        (Some(x), Some(y)) => x == y || x.matches(a.type_name()) || y.matches(b.type_name()),
                        _ => true,
                    }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ColumnInfo {
    pub name: Name,
    /// Names the column may be qualified with.
    pub qualifiers: Vec<Name>,
    pub role: ColumnRole,
    pub ty: Ty,
    /// Search nesting depth for distance and rank columns: 0 for the search
    /// that produced it, +1 each time it passes through an enclosing search.
    pub depth: u32,
    /// Right-hand copy of a natural-join column; reachable only qualified.
    pub merged: bool,
}

impl ColumnInfo {
    pub fn attribute(name: Name, qualifier: Option<Name>, ty: Ty) -> Self {
        ColumnInfo {
            name,
            qualifiers: qualifier.into_iter().collect(),
            role: ColumnRole::Attribute,
            ty,
            depth: 0,
            merged: false,
        }
    }

    fn qualified_by(&self, q: &str) -> bool {
        self.qualifiers.iter().any(|n| n.matches(q))
    }

    pub fn display_name(&self) -> String {
        match self.qualifiers.first() {
            Some(q) => format!("{q}.{}", self.name),
            None => self.name.to_string(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RowSchema {
    pub columns: Vec<ColumnInfo>,
}

pub const DISTANCE_COLUMN: &str = "distance";
pub const RANK_COLUMN: &str = "rank";

impl RowSchema {
    pub fn new(columns: Vec<ColumnInfo>) -> Self {
        RowSchema { columns }
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn concat(&self, other: &RowSchema) -> RowSchema {
        let mut columns = self.columns.clone();
        columns.extend(other.columns.iter().cloned());
        RowSchema { columns }
    }

    /// Resolves `qualifier.name` (or `name`) to a column index.
    pub fn resolve(&self, qualifier: Option<&str>, name: &str, pos: Pos) -> Result<usize> {
        let shown = match qualifier {
            Some(q) => format!("{q}.{name}"),
            None => name.to_string(),
        };
        let role = if name.eq_ignore_ascii_case(DISTANCE_COLUMN) {
            Some(ColumnRole::Distance)
        } else if name.eq_ignore_ascii_case(RANK_COLUMN) {
            Some(ColumnRole::Rank)
        } else {
            None
        };
        if let Some(role) = role {
            let found: Vec<usize> = (0..self.columns.len())
                .filter(|&i| {
                    let c = &self.columns[i];
                    c.role == role && qualifier.is_none_or(|q| c.qualified_by(q))
                })
                .collect();
            if let Some(min) = found.iter().map(|&i| self.columns[i].depth).min() {
                let best: Vec<usize> = found.into_iter().filter(|&i| self.columns[i].depth == min).collect();
                if best.len() == 1 {
                    return Ok(best[0]);
                }
                let sources: Vec<String> = best
                    .iter()
                    .filter_map(|&i| self.columns[i].qualifiers.first().map(|q| q.to_string()))
                    .collect();
                return Err(Error::bind(
                    Some(pos),
                    format!(
                        "ambiguous reference '{shown}': {} similarity searches are in scope; qualify it with one of [{}]",
                        best.len(),
                        sources.join(", ")
                    ),
                ));
            }
        }
        let found: Vec<usize> = (0..self.columns.len())
            .filter(|&i| {
                let c = &self.columns[i];
                c.role == ColumnRole::Attribute
                    && c.name.matches(name)
                    && match qualifier {
                        Some(q) => c.qualified_by(q),
                        None => !c.merged,
                    }
            })
            .collect();
        match found.len() {
            1 => Ok(found[0]),
            0 => Err(Error::bind(Some(pos), format!("unknown column '{shown}'"))),
            _ => {
                let names: Vec<String> = found.iter().map(|&i| self.columns[i].display_name()).collect();
                Err(Error::bind(
                    Some(pos),
                    format!("ambiguous column '{shown}': matches {}", names.join(", ")),
                ))
            }
        }
    }

    /// Indexes of the columns `SELECT *` expands to.
    pub fn wildcard(&self) -> Vec<usize> {
        (0..self.columns.len())
            .filter(|&i| self.columns[i].role == ColumnRole::Attribute && !self.columns[i].merged)
            .collect()
    }

    /// Indexes of the columns `q.*` expands to.
    pub fn qualified_wildcard(&self, q: &str) -> Vec<usize> {
        (0..self.columns.len())
            .filter(|&i| self.columns[i].role == ColumnRole::Attribute && self.columns[i].qualified_by(q))
            .collect()
    }

    pub fn has_qualifier(&self, q: &str) -> bool {
        self.columns.iter().any(|c| c.qualified_by(q))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(name: &str, q: &str) -> ColumnInfo {
        ColumnInfo::attribute(Name::new(name), Some(Name::new(q)), Ty::of_kind(ValueKind::Integer))
    }

    fn dist(q: &[&str], depth: u32) -> ColumnInfo {
        ColumnInfo {
            name: Name::new(DISTANCE_COLUMN),
            qualifiers: q.iter().map(Name::new).collect(),
            role: ColumnRole::Distance,
            ty: Ty::of_kind(ValueKind::Float),
            depth,
            merged: false,
        }
    }

    #[test]
    fn qualified_and_unqualified_lookup() {
        let s = RowSchema::new(vec![col("id", "k1"), col("value", "k1"), col("id", "k2"), dist(&[], 0)]);
        let p = Pos::default();
        assert_eq!(s.resolve(None, "value", p).unwrap(), 1);
        assert_eq!(s.resolve(Some("k2"), "ID", p).unwrap(), 2);
        assert!(s.resolve(None, "id", p).unwrap_err().to_string().contains("ambiguous"));
        assert!(s.resolve(None, "nope", p).is_err());
        assert_eq!(s.resolve(None, "distance", p).unwrap(), 3);
    }

    #[test]
    fn two_searches_make_distance_ambiguous() {
        let s = RowSchema::new(vec![col("a", "vf1"), dist(&["vf1"], 0), col("a", "vf2"), dist(&["vf2"], 0)]);
        let p = Pos::default();
        let err = s.resolve(None, "distance", p).unwrap_err();
        assert!(err.to_string().contains("vf1, vf2"), "{err}");
        assert_eq!(s.resolve(Some("vf2"), "DISTANCE", p).unwrap(), 3);
    }

    #[test]
    fn enclosing_search_wins_unqualified() {
        let s = RowSchema::new(vec![dist(&["vf1"], 1), dist(&["vf2"], 1), dist(&["sim"], 0)]);
        assert_eq!(s.resolve(None, "distance", Pos::default()).unwrap(), 2);
        assert_eq!(s.resolve(Some("vf1"), "distance", Pos::default()).unwrap(), 0);
    }

    #[test]
    fn merged_columns_need_qualifiers() {
        let mut right = col("id", "b");
        right.merged = true;
        let s = RowSchema::new(vec![col("id", "a"), right]);
        assert_eq!(s.resolve(None, "id", Pos::default()).unwrap(), 0);
        assert_eq!(s.resolve(Some("b"), "id", Pos::default()).unwrap(), 1);
        assert_eq!(s.wildcard(), vec![0]);
        assert_eq!(s.qualified_wildcard("b"), vec![1]);
    }

    #[test]
    fn compatibility() {
        let int = Ty::of_kind(ValueKind::Integer);
        let long = Ty::of_kind(ValueKind::Long);
        let s = Ty::of_kind(ValueKind::String);
        let v = Ty::of_kind(ValueKind::NumberVector);
        assert!(int.compatible(&long));
        assert!(!s.compatible(&v));
        assert!(Ty::unknown().compatible(&v));
    }
}
