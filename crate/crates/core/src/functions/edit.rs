//! Edit distances by dynamic programming over Unicode scalar values.

use crate::error::{Error, Result};
use crate::scalar::DistanceScalar;

/// Costs of the three edit operations that turn the first string into the
/// second. Argument order everywhere is (substitute, insert, delete).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EditWeights<S> {
    pub substitute: S,
    pub insert: S,
    pub delete: S,
}

impl<S: DistanceScalar> EditWeights<S> {
    pub fn new(substitute: S, insert: S, delete: S) -> Result<Self> {
        for (what, w) in [("substitute", substitute), ("insert", insert), ("delete", delete)] {
            if !(w >= S::zero()) {
                return Err(Error::runtime(format!(
                    "edit weight '{what}' must be non-negative, got {w}"
                )));
            }
        }
        Ok(EditWeights {
            substitute,
            insert,
            delete,
        })
    }

    pub fn unit() -> Self {
        EditWeights {
            substitute: S::one(),
            insert: S::one(),
            delete: S::one(),
        }
    }

    /// Symmetric positive costs whose substitution never beats a
    /// delete-plus-insert detour satisfy the metric postulates.
    pub fn is_metric(&self) -> bool {
        self.insert == self.delete
            && self.substitute > S::zero()
            && self.insert > S::zero()
            && self.substitute <= self.insert + self.delete
    }
}

/// Levenshtein distance with unit costs.
pub fn levenshtein(x: &str, y: &str) -> usize {
    let a: Vec<char> = x.chars().collect();
    let b: Vec<char> = y.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for i in 1..=a.len() {
        cur[0] = i;
        for j in 1..=b.len() {
            let sub = prev[j - 1] + usize::from(a[i - 1] != b[j - 1]);
            cur[j] = sub.min(prev[j] + 1).min(cur[j - 1] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Minimal total cost of transforming `x` into `y`.
pub fn weighted_edit<S: DistanceScalar>(x: &str, y: &str, w: EditWeights<S>) -> S {
    let a: Vec<char> = x.chars().collect();
    let b: Vec<char> = y.chars().collect();
    let mut prev: Vec<S> = Vec::with_capacity(b.len() + 1);
    let mut acc = S::zero();
    prev.push(acc);
    for _ in 0..b.len() {
        acc = acc + w.insert;
        prev.push(acc);
    }
    let mut cur = vec![S::zero(); b.len() + 1];
    for i in 1..=a.len() {
        cur[0] = prev[0] + w.delete;
        for j in 1..=b.len() {
            let sub = if a[i - 1] == b[j - 1] {
                prev[j - 1]
            } else {
                prev[j - 1] + w.substitute
            };
            let del = prev[j] + w.delete;
            let ins = cur[j - 1] + w.insert;
            cur[j] = sub.min(del).min(ins);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}
