//! Relational operators over materialized tuple streams.

use std::cmp::Ordering;
use std::collections::HashSet;

use indexmap::IndexMap;

use super::value::Value;
use crate::error::{Error, Result};

pub type Row = Vec<Value>;

pub fn filter<F>(rows: Vec<Row>, mut predicate: F) -> Result<Vec<Row>>
where
    F: FnMut(&Row) -> Result<bool>,
{
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        if predicate(&row)? {
            out.push(row);
        }
    }
    Ok(out)
}

pub fn project<F>(rows: &[Row], mut f: F) -> Result<Vec<Row>>
where
    F: FnMut(&Row) -> Result<Row>,
{
    rows.iter().map(&mut f).collect()
}

/// Every left row concatenated with every right row, left-major.
pub fn cartesian(left: &[Row], right: &[Row]) -> Vec<Row> {
    let mut out = Vec::with_capacity(left.len() * right.len());
    for l in left {
        for r in right {
            out.push(concat(l, r));
        }
    }
    out
}

pub fn concat(left: &[Value], right: &[Value]) -> Row {
    let mut row = Vec::with_capacity(left.len() + right.len());
    row.extend_from_slice(left);
    row.extend_from_slice(right);
    row
}

/// Stable sort by precomputed keys; `descending[i]` flips key `i`.
pub fn sort<F>(rows: Vec<Row>, descending: &[bool], mut key: F) -> Result<Vec<Row>>
where
    F: FnMut(&Row) -> Result<Vec<Value>>,
{
    let mut keyed = rows
        .into_iter()
        .map(|r| Ok((key(&r)?, r)))
        .collect::<Result<Vec<_>>>()?;
    keyed.sort_by(|(a, _), (b, _)| compare_keys(a, b, descending));
    Ok(keyed.into_iter().map(|(_, r)| r).collect())
}

pub fn compare_keys(a: &[Value], b: &[Value], descending: &[bool]) -> Ordering {
    for (i, (x, y)) in a.iter().zip(b).enumerate() {
        let o = x.total_cmp(y);
        let o = if descending.get(i).copied().unwrap_or(false) {
            o.reverse()
        } else {
            o
        };
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

pub fn top_n(mut rows: Vec<Row>, n: usize) -> Vec<Row> {
    rows.truncate(n);
    rows
}

/// Keeps the first occurrence of every distinct row.
pub fn distinct(rows: Vec<Row>) -> Vec<Row> {
    let mut seen = HashSet::new();
    rows.into_iter().filter(|r| seen.insert(r.clone())).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AggregateFunc {
    Count,
    CountStar,
    Sum,
    Min,
    Max,
    Avg,
}

impl AggregateFunc {
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name.to_ascii_lowercase().as_str() {
            "count" => AggregateFunc::Count,
            "sum" => AggregateFunc::Sum,
            "min" => AggregateFunc::Min,
            "max" => AggregateFunc::Max,
            "avg" => AggregateFunc::Avg,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            AggregateFunc::Count | AggregateFunc::CountStar => "count",
            AggregateFunc::Sum => "sum",
            AggregateFunc::Min => "min",
            AggregateFunc::Max => "max",
            AggregateFunc::Avg => "avg",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AggregateSpec {
    pub func: AggregateFunc,
    pub distinct: bool,
}

#[derive(Default)]
struct Accumulator {
    count: i64,
    int_sum: i64,
    float_sum: f64,
    saw_float: bool,
    extreme: Option<Value>,
    seen: HashSet<Value>,
}

impl Accumulator {
    fn update(&mut self, spec: AggregateSpec, v: Value) -> Result<()> {
        if spec.func == AggregateFunc::CountStar {
            self.count += 1;
            return Ok(());
        }
        if v.is_null() {
            return Ok(());
        }
        if spec.distinct && !self.seen.insert(v.clone()) {
            return Ok(());
        }
        self.count += 1;
        match spec.func {
            AggregateFunc::Sum | AggregateFunc::Avg => match v {
                Value::Integer(i) | Value::Long(i) => {
                    self.int_sum = self.int_sum.checked_add(i).ok_or_else(|| {
                        Error::runtime(format!("{} overflow", spec.func.name()))
                    })?;
                }
                Value::Float(f) => {
                    self.saw_float = true;
                    self.float_sum += f;
                }
                other => {
                    return Err(Error::runtime(format!(
                        "{} needs numeric input, got {other}",
                        spec.func.name()
                    )))
                }
            },
            AggregateFunc::Min | AggregateFunc::Max => {
                let replace = match &self.extreme {
                    None => true,
                    Some(cur) => {
                        let o = v.total_cmp(cur);
                        (spec.func == AggregateFunc::Min && o == Ordering::Less)
                            || (spec.func == AggregateFunc::Max && o == Ordering::Greater)
                    }
                };
                if replace {
                    self.extreme = Some(v);
                }
            }
            AggregateFunc::Count | AggregateFunc::CountStar => {}
        }
        Ok(())
    }

    fn finish(self, spec: AggregateSpec) -> Value {
        match spec.func {
            AggregateFunc::Count | AggregateFunc::CountStar => Value::Integer(self.count),
            AggregateFunc::Sum if self.count == 0 => Value::Null,
            AggregateFunc::Sum if self.saw_float => {
                Value::Float(self.float_sum + self.int_sum as f64)
            }
            AggregateFunc::Sum => Value::Integer(self.int_sum),
            AggregateFunc::Avg if self.count == 0 => Value::Null,
            AggregateFunc::Avg => {
                Value::Float((self.float_sum + self.int_sum as f64) / self.count as f64)
            }
            AggregateFunc::Min | AggregateFunc::Max => self.extreme.unwrap_or(Value::Null),
        }
    }
}

/// Groups rows by `key` and evaluates `aggregates` per group. Output rows
/// are the group key followed by one value per aggregate, in order of first
/// appearance of each group. With `global` set, an empty input still yields
/// one (keyless) row, as SQL does for aggregates without GROUP BY.
pub fn group_aggregate<K, A>(
    rows: &[Row],
    global: bool,
    aggregates: &[AggregateSpec],
    mut key: K,
    mut argument: A,
) -> Result<Vec<Row>>
where
    K: FnMut(&Row) -> Result<Vec<Value>>,
    A: FnMut(&Row, usize) -> Result<Value>,
{
    let mut groups: IndexMap<Vec<Value>, Vec<Accumulator>> = IndexMap::new();
    if global {
        groups.insert(Vec::new(), fresh(aggregates.len()));
    }
    for row in rows {
        let k = key(row)?;
        let accs = groups
            .entry(k)
            .or_insert_with(|| fresh(aggregates.len()));
        for (i, spec) in aggregates.iter().enumerate() {
            let v = if spec.func == AggregateFunc::CountStar {
                Value::Null
            } else {
                argument(row, i)?
            };
            accs[i].update(*spec, v)?;
        }
    }
    Ok(groups
        .into_iter()
        .map(|(mut k, accs)| {
            k.extend(accs.into_iter().zip(aggregates).map(|(a, s)| a.finish(*s)));
            k
        })
        .collect())
}

fn fresh(n: usize) -> Vec<Accumulator> {
    (0..n).map(|_| Accumulator::default()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Row {
        v.iter().map(|&i| Value::Integer(i)).collect()
    }

    #[test]
    fn filter_on_distance_attribute() {
        let rows: Vec<Row> = [1.0, 2.0, 3.0].iter().map(|&d| vec![Value::Float(d)]).collect();
        let kept = filter(rows, |r| Ok(r[0].as_f64().unwrap() <= 2.0)).unwrap();
        assert_eq!(kept, vec![vec![Value::Float(1.0)], vec![Value::Float(2.0)]]);
    }

    #[test]
    fn top_n_takes_prefix() {
        let rows = vec![ints(&[3]), ints(&[1]), ints(&[2])];
        let sorted = sort(rows, &[false], |r| Ok(r.clone())).unwrap();
        assert_eq!(top_n(sorted, 1), vec![ints(&[1])]);
    }

    #[test]
    fn group_by_with_having_over_fixture() {
        // keyword_id -> number of images: 1:5, 2:4, 3:3, 4:1, 5:2
        let mut rows = Vec::new();
        for (kw, n) in [(1, 5), (2, 4), (3, 3), (4, 1), (5, 2)] {
            for img in 0..n {
                rows.push(ints(&[img, kw]));
            }
        }
        let spec = [AggregateSpec {
            func: AggregateFunc::Count,
            distinct: false,
        }];
        let groups = group_aggregate(&rows, false, &spec, |r| Ok(vec![r[1].clone()]), |r, _| {
            Ok(r[0].clone())
        })
        .unwrap();
        let having = filter(groups, |g| Ok(g[1].as_i64().unwrap() > 3)).unwrap();
        assert_eq!(having, vec![ints(&[1, 5]), ints(&[2, 4])]);
    }

    #[test]
    fn global_aggregate_over_empty_input() {
        let spec = [AggregateSpec {
            func: AggregateFunc::CountStar,
            distinct: false,
        }];
        let out = group_aggregate(&[], true, &spec, |_| Ok(vec![]), |_, _| Ok(Value::Null)).unwrap();
        assert_eq!(out, vec![ints(&[0])]);
    }

    #[test]
    fn count_distinct_and_nulls() {
        let rows = vec![ints(&[1]), ints(&[1]), vec![Value::Null], ints(&[2])];
        let spec = [
            AggregateSpec { func: AggregateFunc::Count, distinct: true },
            AggregateSpec { func: AggregateFunc::Count, distinct: false },
            AggregateSpec { func: AggregateFunc::Avg, distinct: false },
        ];
        let out =
            group_aggregate(&rows, true, &spec, |_| Ok(vec![]), |r, _| Ok(r[0].clone())).unwrap();
        assert_eq!(out[0][0], Value::Integer(2));
        assert_eq!(out[0][1], Value::Integer(3));
        assert_eq!(out[0][2], Value::Float(4.0 / 3.0));
    }

    #[test]
    fn distinct_keeps_first_occurrence_order() {
        let rows = vec![ints(&[2]), ints(&[1]), ints(&[2]), ints(&[3])];
        assert_eq!(distinct(rows), vec![ints(&[2]), ints(&[1]), ints(&[3])]);
    }

    #[test]
    fn cartesian_cardinality_up_to_50_by_50() {
        for n in [0usize, 1, 7, 50] {
            for m in [0usize, 3, 50] {
                let a: Vec<Row> = (0..n as i64).map(|i| ints(&[i])).collect();
                let b: Vec<Row> = (0..m as i64).map(|i| ints(&[i])).collect();
                let c = cartesian(&a, &b);
                assert_eq!(c.len(), n * m);
                assert!(c.iter().all(|r| r.len() == 2));
            }
        }
    }
}
