use std::sync::Arc;

use super::*;
use crate::functions::{self as f, builtin as b};

fn ty(id: &str, repr: ValueKind, default: Option<&str>, comparison: Option<&str>) -> DataTypeEntry {
    DataTypeEntry {
        id: Name::new(id),
        repr,
        default_distance: default.map(Name::new),
        comparison: comparison.map(Name::new),
    }
}

fn method(name: &str, objects: QueryObjects, relations: RelationArity, params: Vec<ParamSpec>, kind: MethodKind) -> SearchMethodEntry {
    SearchMethodEntry {
        name: Name::new(name),
        query_objects: objects,
        relations,
        params,
        kind,
    }
}

fn ordering(a: &Value, b: &Value) -> std::cmp::Ordering {
    a.total_cmp(b)
}

pub(super) fn catalog() -> Catalog {
    let mut c = Catalog::new();
    let ok = |r: Result<()>| r.expect("built-in catalog is consistent");

    // Types first without defaults: distance entries reference them.
    for (id, repr, cmp) in [
        ("integer", ValueKind::Integer, Some("numeric_order")),
        ("long", ValueKind::Long, Some("numeric_order")),
        ("float", ValueKind::Float, Some("numeric_order")),
        ("string", ValueKind::String, Some("string_order")),
        ("date", ValueKind::Date, Some("date_order")),
        ("number_vector", ValueKind::NumberVector, None),
        ("binary_image", ValueKind::Image, None),
    ] {
        if let Some(name) = cmp {
            if c.comparison(name).is_none() {
                ok(c.register_comparison(ComparisonFunctionEntry {
                    name: Name::new(name),
                    operand_type: Name::new(id),
                    implementation: ordering,
                }));
            }
        }
        c.register_data_type(ty(id, repr, None, cmp)).expect("built-in type");
    }

    let metric = PropertySet::metric;
    let plain = |func, props| b::PlainDistance::new(func, props);
    let distances = [
        DistanceFunctionEntry::new(IDENTITY_DISTANCE, &[], plain(f::identity_distance, PropertySet::new())),
        DistanceFunctionEntry::new(
            "L1_metric",
            &["number_vector", "integer", "long", "date", "float"],
            plain(f::l1_metric, metric()),
        ),
        DistanceFunctionEntry::new("L2_metric", &["number_vector"], plain(f::l2_metric, metric())),
        DistanceFunctionEntry::new("simple_edit_distance", &["string"], plain(f::simple_edit_distance, metric()))
            .lower_bound_of("weighted_edit_distance"),
        DistanceFunctionEntry::new("weighted_edit_distance", &["string"], Arc::new(b::WeightedEdit)).with_params(vec![
            ParamSpec::number("substitute").with_default(Value::Integer(1)),
            ParamSpec::number("insert").with_default(Value::Integer(1)),
            ParamSpec::number("delete").with_default(Value::Integer(1)),
        ]),
        DistanceFunctionEntry::new("tf_idf", &["string"], Arc::new(b::TfIdf)),
        DistanceFunctionEntry::new(
            "mpeg7_color_layout_metric",
            &["number_vector"],
            plain(f::mpeg7_color_layout_metric, metric()),
        ),
        DistanceFunctionEntry::new(
            "mpeg7_contour_shape_metric",
            &["number_vector"],
            plain(f::mpeg7_contour_shape_metric, metric()),
        ),
        DistanceFunctionEntry::new("mpeg7_face_metric", &["number_vector"], plain(f::mpeg7_face_metric, metric())),
    ];
    for d in distances {
        ok(c.register_distance(d.declared()));
    }

    for (id, default) in [
        ("integer", "L1_metric"),
        ("long", "L1_metric"),
        ("float", "L1_metric"),
        ("date", "L1_metric"),
        ("string", "simple_edit_distance"),
        ("number_vector", "L2_metric"),
        ("binary_image", IDENTITY_DISTANCE),
    ] {
        let t = c.types.get_mut(&Name::new(id)).expect("registered above");
        t.default_distance = Some(Name::new(default));
    }

    for (name, output, func) in [
        ("extract_MPEG7_color_layout", "number_vector", f::extract_MPEG7_color_layout as fn(&Value) -> Result<Value>),
        ("extract_MPEG7_contour_shape", "number_vector", f::extract_MPEG7_contour_shape),
    ] {
        ok(c.register_extractor(ExtractorEntry {
            name: Name::new(name),
            input: Name::new("binary_image"),
            output: Name::new(output),
            implementation: Arc::new(b::PlainExtractor(func)),
        }));
    }

    ok(c.register_set_distance(SetDistanceEntry {
        name: Name::new("minimum"),
        implementation: Arc::new(b::Minimum),
    }));
    ok(c.register_aggregated_distance(AggregatedDistanceEntry {
        name: Name::new("weight_sum"),
        implementation: Arc::new(b::WeightSum),
    }));

    use QueryObjects::*;
    use RelationArity::*;
    let methods = [
        method(DEFAULT_METHOD, Arbitrary, AtLeast(1), vec![], MethodKind::NearestNeighbor),
        method("rangeQuery", Arbitrary, AtLeast(1), vec![ParamSpec::number("radius")], MethodKind::Range),
        method(
            "MessifRangeQuery",
            Arbitrary,
            AtLeast(1),
            vec![ParamSpec::number("radius"), ParamSpec::number("max_visited")],
            MethodKind::ApproximateRange,
        ),
        method(
            "MessifSimilarityJoin",
            Zero,
            Exactly(2),
            vec![ParamSpec::number("threshold")],
            MethodKind::SimilarityJoin,
        ),
        method("reverseKnn", Singleton, Exactly(1), vec![ParamSpec::number("k")], MethodKind::ReverseKnn),
        method(
            "distinctKnn",
            Singleton,
            Exactly(1),
            vec![ParamSpec::number("k"), ParamSpec::attribute("attr")],
            MethodKind::DistinctKnn,
        ),
    ];
    let method_names: Vec<Name> = methods.iter().map(|m| m.name.clone()).collect();
    for m in methods {
        ok(c.register_method(m));
    }

    ok(c.register_index(IndexEntry {
        name: Name::new(METRIC_INDEX),
        kind: IndexKind::Metric,
        required_properties: vec![METRIC_POSTULATES.into()],
        requires_comparison: false,
        supported_methods: method_names,
    }));
    ok(c.register_index(IndexEntry {
        name: Name::new(ORDERED_INDEX),
        kind: IndexKind::Ordered,
        required_properties: vec![],
        requires_comparison: true,
        supported_methods: vec![],
    }));
    c
}
