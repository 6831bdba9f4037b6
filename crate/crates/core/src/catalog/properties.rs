//! Randomized spot-checks of declared distance properties.

use std::cmp::Ordering;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Catalog, DistanceContext, DistanceFunctionEntry, METRIC_POSTULATES};
use crate::datamodel::{Name, Value, ValueKind};
use crate::Dist;

/// A sampled counterexample to a declared property.
#[derive(Clone, Debug)]
pub struct Violation {
    pub function: Name,
    pub property: &'static str,
    pub values: Vec<Value>,
    pub distances: Vec<Dist>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} violates {} on", self.function, self.property)?;
        for v in &self.values {
            write!(f, " {v}")?;
        }
        write!(f, " (distances {:?})", self.distances)
    }
}

/// Small random values of `kind`, drawn so that repeats and near ties occur.
pub fn sample_value(kind: ValueKind, dimension: usize, rng: &mut impl Rng) -> Value {
    match kind {
        ValueKind::Integer => Value::Integer(rng.gen_range(-20..=20)),
        ValueKind::Long => Value::Long(rng.gen_range(-20..=20)),
        ValueKind::Date => Value::Date(rng.gen_range(-20..=20)),
        ValueKind::Float => Value::Float(f64::from(rng.gen_range(-40i32..=40)) / 4.0),
        ValueKind::String => {
            let len = rng.gen_range(0..=6);
            Value::string((0..len).map(|_| ['a', 'b', 'c'][rng.gen_range(0..3)]).collect::<String>())
        }
        ValueKind::NumberVector => {
            Value::vector((0..dimension).map(|_| f64::from(rng.gen_range(-8i32..=8)) / 2.0).collect::<Vec<_>>())
        }
        ValueKind::Image => {
            let w = rng.gen_range(1..=3);
            let h = rng.gen_range(1..=3);
            let shade = rng.gen_range(0..4u8) * 64;
            Value::image(crate::datamodel::ImageRaster::from_fn(w, h, |_, _| [shade; 3]))
        }
    }
}

fn same(x: &Value, y: &Value) -> bool {
    x.total_cmp(y) == Ordering::Equal
}

/// Tests non-negativity, identity of indiscernibles, symmetry and the
/// triangle inequality on `triples` random triples from `sample`.
pub fn spot_check_metric(
    entry: &DistanceFunctionEntry,
    params: &[Value],
    triples: usize,
    tolerance: Dist,
    mut sample: impl FnMut() -> Value,
) -> Result<(), Violation> {
    let ctx = DistanceContext::default();
    let violation = |property, values: &[&Value], distances: Vec<Dist>| Violation {
        function: entry.name.clone(),
        property,
        values: values.iter().map(|v| (*v).clone()).collect(),
        distances,
    };
    let d = |a: &Value, b: &Value| {
        entry
            .evaluate(a, b, params, &ctx)
            .unwrap_or(Dist::NAN)
    };
    for _ in 0..triples {
        let (x, y, z) = (sample(), sample(), sample());
        let (xy, yx, yz, xz, xx) = (d(&x, &y), d(&y, &x), d(&y, &z), d(&x, &z), d(&x, &x));
        if [xy, yx, yz, xz, xx].iter().any(|v| v.is_nan() || *v < 0.0) {
            return Err(violation("non-negativity", &[&x, &y, &z], vec![xy, yx, yz, xz, xx]));
        }
        if xx > tolerance || (same(&x, &y) != (xy <= tolerance)) {
            return Err(violation("identity of indiscernibles", &[&x, &y], vec![xx, xy]));
        }
        if (xy - yx).abs() > tolerance {
            return Err(violation("symmetry", &[&x, &y], vec![xy, yx]));
        }
        if xz > xy + yz + tolerance {
            return Err(violation("triangle inequality", &[&x, &y, &z], vec![xz, xy, yz]));
        }
    }
    Ok(())
}

/// Tests `lower(x, y) <= upper(x, y)` on `pairs` random pairs.
pub fn spot_check_lower_bound(
    lower: (&DistanceFunctionEntry, &[Value]),
    upper: (&DistanceFunctionEntry, &[Value]),
    pairs: usize,
    tolerance: Dist,
    mut sample: impl FnMut() -> Value,
) -> Result<(), Violation> {
    let ctx = DistanceContext::default();
    for _ in 0..pairs {
        let (x, y) = (sample(), sample());
        let l = lower.0.evaluate(&x, &y, lower.1, &ctx).unwrap_or(Dist::NAN);
        let u = upper.0.evaluate(&x, &y, upper.1, &ctx).unwrap_or(Dist::NAN);
        if l.is_nan() || u.is_nan() || l > u + tolerance {
            return Err(Violation {
                function: lower.0.name.clone(),
                property: "lower bound",
                values: vec![x, y],
                distances: vec![l, u],
            });
        }
    }
    Ok(())
}

/// Default parameters of `entry`, when it has defaults for all of them.
fn default_params(entry: &DistanceFunctionEntry) -> Option<Vec<Value>> {
    entry.params.iter().map(|p| p.default.clone()).collect()
}

/// Spot-checks every distance function in `catalog` declaring
/// `metric_postulates`, once per accepted operand type.
pub fn spot_check_catalog(catalog: &Catalog, triples: usize, tolerance: Dist, seed: u64) -> Vec<(Name, ValueKind, Result<(), Violation>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for entry in catalog.distances() {
        if !entry.properties.declares(METRIC_POSTULATES) {
            continue;
        }
        let Some(params) = default_params(entry) else { continue };
        for t in &entry.operand_types {
            let Some(kind) = catalog.data_type(t.as_str()).map(|d| d.repr) else { continue };
            let dimension = rng.gen_range(1..=6);
            let outcome = spot_check_metric(entry, &params, triples, tolerance, || sample_value(kind, dimension, &mut rng));
            out.push((entry.name.clone(), kind, outcome));
        }
    }
    out
}
