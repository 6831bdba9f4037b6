//! Sorted-array index for domains with a total order.

use std::cmp::Ordering;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompareOp {
    Eq,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CompareOp {
    /// Whether `ord` (stored value compared to the probe) satisfies the
    /// operator.
    pub fn accepts(self, ord: Ordering) -> bool {
        match self {
            CompareOp::Eq => ord == Ordering::Equal,
            CompareOp::Lt => ord == Ordering::Less,
            CompareOp::Le => ord != Ordering::Greater,
            CompareOp::Gt => ord == Ordering::Greater,
            CompareOp::Ge => ord != Ordering::Less,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CompareOp::Eq => "=",
            CompareOp::Lt => "<",
            CompareOp::Le => "<=",
            CompareOp::Gt => ">",
            CompareOp::Ge => ">=",
        }
    }

    /// The operator with its operands swapped (`a < b` iff `b > a`).
    pub fn flipped(self) -> Self {
        match self {
            CompareOp::Lt => CompareOp::Gt,
            CompareOp::Le => CompareOp::Ge,
            CompareOp::Gt => CompareOp::Lt,
            CompareOp::Ge => CompareOp::Le,
            CompareOp::Eq => CompareOp::Eq,
        }
    }
}

#[derive(Clone, Debug)]
pub struct OrderedIndex<T> {
    entries: Vec<(T, u64)>,
    compare: fn(&T, &T) -> Ordering,
}

impl<T: Clone> OrderedIndex<T> {
    pub fn new(compare: fn(&T, &T) -> Ordering) -> Self {
        OrderedIndex {
            entries: Vec::new(),
            compare,
        }
    }

    pub fn build(items: impl IntoIterator<Item = (u64, T)>, compare: fn(&T, &T) -> Ordering) -> Self {
        let mut entries: Vec<(T, u64)> = items.into_iter().map(|(k, v)| (v, k)).collect();
        entries.sort_by(|a, b| compare(&a.0, &b.0).then(a.1.cmp(&b.1)));
        OrderedIndex { entries, compare }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn insert(&mut self, key: u64, value: T) {
        let cmp = self.compare;
        let at = self
            .entries
            .partition_point(|(v, k)| cmp(v, &value).then(k.cmp(&key)) == Ordering::Less);
        self.entries.insert(at, (value, key));
    }

    pub fn is_sorted(&self) -> bool {
        self.entries
            .windows(2)
            .all(|w| (self.compare)(&w[0].0, &w[1].0) != Ordering::Greater)
    }

    /// Keys whose value satisfies `value op probe`, ascending.
    pub fn lookup(&self, op: CompareOp, probe: &T) -> Vec<u64> {
        let cmp = self.compare;
        let lo = self.entries.partition_point(|(v, _)| cmp(v, probe) == Ordering::Less);
        let hi = self.entries.partition_point(|(v, _)| cmp(v, probe) != Ordering::Greater);
        let range = match op {
            CompareOp::Eq => lo..hi,
            CompareOp::Lt => 0..lo,
            CompareOp::Le => 0..hi,
            CompareOp::Gt => hi..self.entries.len(),
            CompareOp::Ge => lo..self.entries.len(),
        };
        let mut keys: Vec<u64> = self.entries[range].iter().map(|e| e.1).collect();
        keys.sort_unstable();
        keys
    }
}
