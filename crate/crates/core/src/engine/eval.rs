//! Expression evaluation with three-valued logic.
//!
//! Truth values are integers: `1` true, `0` false, `Null` unknown.

use std::cmp::Ordering;

use super::exec::Executor;
use crate::binder::{BoundExpr, DistanceCall};
use crate::catalog::DistanceContext;
use crate::datamodel::Value;
use crate::error::{Error, Result};
use crate::parser::{BinaryOp, UnaryOp};
use crate::Dist;

pub(crate) fn truth(b: Option<bool>) -> Value {
    match b {
        Some(true) => Value::Integer(1),
        Some(false) => Value::Integer(0),
        None => Value::Null,
    }
}

/// `Some(true|false)` for a known truth value, `None` for unknown.
pub(crate) fn as_truth(v: &Value) -> Result<Option<bool>> {
    match v {
        Value::Null => Ok(None),
        Value::Integer(i) | Value::Long(i) => Ok(Some(*i != 0)),
        Value::Float(f) => Ok(Some(*f != 0.0)),
        other => Err(Error::runtime(format!("expected a truth value, got {other}"))),
    }
}

/// Distance value of an evaluated expression: null is infinitely far.
pub(crate) fn as_distance(v: &Value) -> Result<Dist> {
    match v {
        Value::Null => Ok(Dist::INFINITY),
        v => match v.as_f64() {
            Some(d) if d.is_nan() || d < 0.0 => Err(Error::runtime(format!("invalid distance {d}"))),
            Some(d) => Ok(d),
            None => Err(Error::runtime(format!("expected a distance, got {v}"))),
        },
    }
}

fn compare(op: BinaryOp, l: &Value, r: &Value) -> Value {
    truth(l.sql_compare(r).map(|o| match op {
        BinaryOp::Eq => o == Ordering::Equal,
        BinaryOp::NotEq => o != Ordering::Equal,
        BinaryOp::Lt => o == Ordering::Less,
        BinaryOp::Le => o != Ordering::Greater,
        BinaryOp::Gt => o == Ordering::Greater,
        BinaryOp::Ge => o != Ordering::Less,
        _ => unreachable!("not a comparison"),
    }))
}

fn arithmetic(op: BinaryOp, l: &Value, r: &Value) -> Result<Value> {
    if l.is_null() || r.is_null() {
        return Ok(Value::Null);
    }
    let integral = |v: &Value| match v {
        Value::Integer(i) | Value::Long(i) => Some(*i),
        _ => None,
    };
    if op != BinaryOp::Div {
        if let (Some(a), Some(b)) = (integral(l), integral(r)) {
            let out = match op {
                BinaryOp::Add => a.checked_add(b),
                BinaryOp::Sub => a.checked_sub(b),
                BinaryOp::Mul => a.checked_mul(b),
                _ => unreachable!("not arithmetic"),
            };
            return out
                .map(Value::Integer)
                .ok_or_else(|| Error::runtime(format!("integer overflow in {a} {} {b}", op.symbol())));
        }
    }
    let (Some(a), Some(b)) = (l.as_f64(), r.as_f64()) else {
        return Err(Error::runtime(format!("operator '{}' needs numbers, got {l} and {r}", op.symbol())));
    };
    Ok(Value::Float(match op {
        BinaryOp::Add => a + b,
        BinaryOp::Sub => a - b,
        BinaryOp::Mul => a * b,
        BinaryOp::Div => {
            if b == 0.0 {
                return Err(Error::runtime("division by zero"));
            }
            a / b
        }
        _ => unreachable!("not arithmetic"),
    }))
}

impl Executor<'_> {
    /// Evaluates `e` over `row`, with `objects` the query objects of the
    /// enclosing search.
    pub(crate) fn eval(&mut self, e: &BoundExpr, row: &[Value], objects: &[Value]) -> Result<Value> {
        Ok(match e {
            BoundExpr::Literal(v) => v.clone(),
            BoundExpr::Column(i) => row[*i].clone(),
            BoundExpr::QueryObject(i) => objects
                .get(*i)
                .cloned()
                .ok_or_else(|| Error::runtime(format!("query object {} is not available", i + 1)))?,
            BoundExpr::Unary { op, expr } => {
                let v = self.eval(expr, row, objects)?;
                match op {
                    UnaryOp::Not => truth(as_truth(&v)?.map(|b| !b)),
                    UnaryOp::Neg => match v {
                        Value::Null => Value::Null,
                        Value::Integer(i) => Value::Integer(
                            i.checked_neg().ok_or_else(|| Error::runtime("integer overflow in negation"))?,
                        ),
                        Value::Long(i) => Value::Long(
                            i.checked_neg().ok_or_else(|| Error::runtime("integer overflow in negation"))?,
                        ),
                        Value::Float(f) => Value::Float(-f),
                        other => return Err(Error::runtime(format!("cannot negate {other}"))),
                    },
                }
            }
            BoundExpr::Binary { op, left, right } => match op {
                BinaryOp::And => {
                    let l = as_truth(&self.eval(left, row, objects)?)?;
                    if l == Some(false) {
                        return Ok(truth(Some(false)));
                    }
                    let r = as_truth(&self.eval(right, row, objects)?)?;
                    truth(match (l, r) {
                        (_, Some(false)) => Some(false),
                        (Some(true), Some(true)) => Some(true),
                        _ => None,
                    })
                }
                BinaryOp::Or => {
                    let l = as_truth(&self.eval(left, row, objects)?)?;
                    if l == Some(true) {
                        return Ok(truth(Some(true)));
                    }
                    let r = as_truth(&self.eval(right, row, objects)?)?;
                    truth(match (l, r) {
                        (_, Some(true)) => Some(true),
                        (Some(false), Some(false)) => Some(false),
                        _ => None,
                    })
                }
                op => {
                    let l = self.eval(left, row, objects)?;
                    let r = self.eval(right, row, objects)?;
                    if op.is_comparison() {
                        compare(*op, &l, &r)
                    } else {
                        arithmetic(*op, &l, &r)?
                    }
                }
            },
            BoundExpr::IsNull { expr, negated } => {
                let v = self.eval(expr, row, objects)?;
                truth(Some(v.is_null() != *negated))
            }
            BoundExpr::Distance(call) => Value::Float(self.distance_call(call, row, objects)?),
            BoundExpr::SetDistance { entry, args } => {
                let mut ds = Vec::with_capacity(args.len());
                for a in args {
                    ds.push(as_distance(&self.eval(a, row, objects)?)?);
                }
                Value::Float(entry.implementation.combine(&ds)?)
            }
            BoundExpr::Aggregated { entry, parts } => {
                let mut ps = Vec::with_capacity(parts.len());
                for (d, w) in parts {
                    let d = as_distance(&self.eval(d, row, objects)?)?;
                    let w = self.eval(w, row, objects)?;
                    let w = w
                        .as_f64()
                        .ok_or_else(|| Error::runtime(format!("weight of '{}' must be a number, got {w}", entry.name)))?;
                    ps.push((d, w));
                }
                Value::Float(entry.implementation.aggregate(&ps)?)
            }
            BoundExpr::Extract { entry, arg } => {
                let v = self.eval(arg, row, objects)?;
                if v.is_null() {
                    Value::Null
                } else {
                    entry.implementation.extract(&v)?
                }
            }
            BoundExpr::InSubquery {
                expr,
                plan,
                negated,
                id,
            } => {
                let v = self.eval(expr, row, objects)?;
                let values = self.subquery_column(*id, plan)?;
                let found = if v.is_null() {
                    None
                } else if values.iter().any(|x| v.sql_compare(x) == Some(Ordering::Equal)) {
                    Some(true)
                } else if values.iter().any(Value::is_null) {
                    None
                } else {
                    Some(false)
                };
                truth(found.map(|f| f != *negated))
            }
            BoundExpr::ScalarSubquery { plan, id } => {
                let values = self.subquery_column(*id, plan)?;
                match values.len() {
                    0 => Value::Null,
                    1 => values[0].clone(),
                    n => return Err(Error::runtime(format!("scalar subquery returned {n} rows"))),
                }
            }
        })
    }

    pub(crate) fn distance_call(&mut self, call: &DistanceCall, row: &[Value], objects: &[Value]) -> Result<Dist> {
        let l = self.eval(&call.left, row, objects)?;
        let r = self.eval(&call.right, row, objects)?;
        let corpus = match &call.corpus {
            Some(origin) => self.corpus(origin)?,
            None => None,
        };
        let ctx = DistanceContext {
            corpus: corpus.as_deref(),
        };
        call.entry.evaluate(&l, &r, &call.params, &ctx)
    }

    /// Whether `predicate` holds (unknown counts as false).
    pub(crate) fn holds(&mut self, predicate: &BoundExpr, row: &[Value]) -> Result<bool> {
        Ok(as_truth(&self.eval(predicate, row, &[])?)? == Some(true))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comparisons_with_null_are_unknown() {
        assert_eq!(compare(BinaryOp::Eq, &Value::Null, &Value::Integer(1)), Value::Null);
        assert_eq!(compare(BinaryOp::Le, &Value::Integer(1), &Value::Float(1.0)), Value::Integer(1));
    }

    #[test]
    fn integer_arithmetic_stays_integral() {
        assert_eq!(arithmetic(BinaryOp::Add, &Value::Integer(2), &Value::Integer(3)).unwrap(), Value::Integer(5));
        assert_eq!(arithmetic(BinaryOp::Div, &Value::Integer(3), &Value::Integer(2)).unwrap(), Value::Float(1.5));
        assert!(arithmetic(BinaryOp::Div, &Value::Integer(3), &Value::Integer(0)).is_err());
        assert!(arithmetic(BinaryOp::Mul, &Value::Integer(i64::MAX), &Value::Integer(2)).is_err());
    }

    #[test]
    fn distance_values() {
        assert_eq!(as_distance(&Value::Null).unwrap(), Dist::INFINITY);
        assert_eq!(as_distance(&Value::Integer(2)).unwrap(), 2.0);
        assert!(as_distance(&Value::Float(-1.0)).is_err());
        assert!(as_distance(&Value::string("x")).is_err());
    }
}
