use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use chrono::{Duration, NaiveDate};

use crate::error::{Error, Result};

/// Storage representation behind a data type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ValueKind {
    Integer,
    Long,
    Float,
    String,
    Date,
    NumberVector,
    Image,
}

impl ValueKind {
    pub const ALL: [ValueKind; 7] = [
        ValueKind::Integer,
        ValueKind::Long,
        ValueKind::Float,
        ValueKind::String,
        ValueKind::Date,
        ValueKind::NumberVector,
        ValueKind::Image,
    ];

    /// Name of the built-in data type with this representation.
    pub fn type_name(self) -> &'static str {
        match self {
            ValueKind::Integer => "integer",
            ValueKind::Long => "long",
            ValueKind::Float => "float",
            ValueKind::String => "string",
            ValueKind::Date => "date",
            ValueKind::NumberVector => "number_vector",
            ValueKind::Image => "binary_image",
        }
    }

    pub fn from_type_name(name: &str) -> Option<Self> {
        ValueKind::ALL
            .into_iter()
            .find(|k| k.type_name().eq_ignore_ascii_case(name))
    }

    pub fn is_numeric(self) -> bool {
        matches!(self, ValueKind::Integer | ValueKind::Long | ValueKind::Float)
    }

    /// Whether a value of kind `self` may be stored in or compared against
    /// a column whose representation is `column`.
    pub fn fits(self, column: ValueKind) -> bool {
        self == column
            || matches!(
                (self, column),
                (ValueKind::Integer, ValueKind::Long) | (ValueKind::Long, ValueKind::Integer)
            )
    }
}

impl fmt::Display for ValueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.type_name())
    }
}

/// Row-major RGB raster.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ImageRaster {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
}

impl ImageRaster {
    pub fn new(width: u32, height: u32, pixels: Vec<u8>) -> Result<Self> {
        let expected = 3 * width as usize * height as usize;
        if pixels.len() != expected {
            return Err(Error::runtime(format!(
                "raster {width}x{height} needs {expected} bytes, got {}",
                pixels.len()
            )));
        }
        Ok(ImageRaster {
            width,
            height,
            pixels,
        })
    }

    /// Builds a raster by evaluating `f(x, y)` for every pixel.
    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> [u8; 3]) -> Self {
        let mut pixels = Vec::with_capacity(3 * width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                pixels.extend_from_slice(&f(x, y));
            }
        }
        ImageRaster {
            width,
            height,
            pixels,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn is_empty(&self) -> bool {
        self.width == 0 || self.height == 0
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn pixel(&self, x: u32, y: u32) -> [u8; 3] {
        let i = 3 * (y as usize * self.width as usize + x as usize);
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    /// Decodes a binary PPM (P6) image.
    pub fn from_ppm(bytes: &[u8]) -> Result<Self> {
        if !bytes.starts_with(b"P6") {
            return Err(Error::runtime("not a binary PPM (P6) image"));
        }
        let img = image::load_from_memory_with_format(bytes, image::ImageFormat::Pnm)
            .map_err(|e| Error::runtime(format!("invalid PPM image: {e}")))?
            .to_rgb8();
        let (w, h) = img.dimensions();
        ImageRaster::new(w, h, img.into_raw())
    }

    /// Encodes the raster as binary PPM (P6) with maxval 255.
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }
}

/// A dynamically typed cell.
#[derive(Clone, Debug)]
pub enum Value {
    Null,
    Integer(i64),
    Long(i64),
    /// Computed numbers: distances, averages, fractional literals.
    Float(f64),
    String(Arc<str>),
    /// Days since 1970-01-01.
    Date(i32),
    NumberVector(Arc<[f64]>),
    Image(Arc<ImageRaster>),
}

impl Value {
    pub fn string(s: impl AsRef<str>) -> Self {
        Value::String(Arc::from(s.as_ref()))
    }

    pub fn vector(v: impl Into<Vec<f64>>) -> Self {
        Value::NumberVector(Arc::from(v.into()))
    }

    pub fn image(raster: ImageRaster) -> Self {
        Value::Image(Arc::new(raster))
    }

    pub fn kind(&self) -> Option<ValueKind> {
        Some(match self {
            Value::Null => return None,
            Value::Integer(_) => ValueKind::Integer,
            Value::Long(_) => ValueKind::Long,
            Value::Float(_) => ValueKind::Float,
            Value::String(_) => ValueKind::String,
            Value::Date(_) => ValueKind::Date,
            Value::NumberVector(_) => ValueKind::NumberVector,
            Value::Image(_) => ValueKind::Image,
        })
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }

    /// Numeric view of scalar numbers and dates.
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Integer(v) | Value::Long(v) => Some(*v as f64),
            Value::Float(v) => Some(*v),
            Value::Date(d) => Some(*d as f64),
            _ => None,
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        match self {
            Value::Integer(v) | Value::Long(v) => Some(*v),
            Value::Float(v) if v.fract() == 0.0 && v.abs() < 9.0e15 => Some(*v as i64),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::String(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_vector(&self) -> Option<&[f64]> {
        match self {
            Value::NumberVector(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_image(&self) -> Option<&ImageRaster> {
        match self {
            Value::Image(img) => Some(img),
            _ => None,
        }
    }

    /// Coerces the value into the representation `kind`, used when storing
    /// into a typed column.
    pub fn coerce_to(self, kind: ValueKind) -> Result<Value> {
        match (&self, kind) {
            (Value::Null, _) => Ok(Value::Null),
            (Value::Integer(v), ValueKind::Long) => Ok(Value::Long(*v)),
            (Value::Long(v), ValueKind::Integer) => Ok(Value::Integer(*v)),
            (v, k) if v.kind() == Some(k) => Ok(self),
            (v, k) => Err(Error::runtime(format!(
                "cannot store {} value in {k} attribute",
                v.kind().map(|k| k.type_name()).unwrap_or("null")
            ))),
        }
    }

    /// SQL comparison: `None` when either side is null or the kinds are not
    /// comparable.
    pub fn sql_compare(&self, other: &Value) -> Option<Ordering> {
        use Value::*;
        match (self, other) {
            (Null, _) | (_, Null) => None,
            (Integer(a) | Long(a), Integer(b) | Long(b)) => Some(a.cmp(b)),
            (Integer(_) | Long(_) | Float(_), Integer(_) | Long(_) | Float(_)) => {
                self.as_f64()?.partial_cmp(&other.as_f64()?)
            }
            (String(a), String(b)) => Some(a.cmp(b)),
            (Date(a), Date(b)) => Some(a.cmp(b)),
            (NumberVector(a), NumberVector(b)) => {
                if a.len() != b.len() {
                    return None;
                }
                Some(cmp_f64_slices(a, b))
            }
            (Image(a), Image(b)) => (a == b).then_some(Ordering::Equal),
            _ => None,
        }
    }

    /// Total order used for sorting and grouping. Nulls sort last; numbers
    /// compare numerically across integer, long and float.
    pub fn total_cmp(&self, other: &Value) -> Ordering {
        use Value::*;
        fn rank(v: &Value) -> u8 {
            match v {
                Integer(_) | Long(_) | Float(_) => 0,
                Date(_) => 1,
                String(_) => 2,
                NumberVector(_) => 3,
                Image(_) => 4,
                Null => 5,
            }
        }
        match (self, other) {
            (Integer(a) | Long(a), Integer(b) | Long(b)) => a.cmp(b),
            (Integer(_) | Long(_) | Float(_), Integer(_) | Long(_) | Float(_)) => {
                let (a, b) = (self.as_f64().unwrap(), other.as_f64().unwrap());
                a.total_cmp(&b)
            }
            (Date(a), Date(b)) => a.cmp(b),
            (String(a), String(b)) => a.cmp(b),
            (NumberVector(a), NumberVector(b)) => cmp_f64_slices(a, b),
            (Image(a), Image(b)) => (a.width, a.height, &a.pixels).cmp(&(b.width, b.height, &b.pixels)),
            (Null, Null) => Ordering::Equal,
            _ => rank(self).cmp(&rank(other)),
        }
    }

    /// Formats a date value as `YYYY-MM-DD`.
    pub fn format_date(days: i32) -> String {
        (epoch() + Duration::days(days as i64))
            .format("%Y-%m-%d")
            .to_string()
    }

    /// Parses `YYYY-MM-DD` into days since the epoch.
    pub fn parse_date(text: &str) -> Result<i32> {
        let d = NaiveDate::parse_from_str(text.trim(), "%Y-%m-%d")
            .map_err(|e| Error::runtime(format!("invalid date '{text}': {e}")))?;
        Ok((d - epoch()).num_days() as i32)
    }
}

fn epoch() -> NaiveDate {
    NaiveDate::from_ymd_opt(1970, 1, 1).expect("valid epoch")
}

fn cmp_f64_slices(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

fn canonical_bits(v: f64) -> u64 {
    if v == 0.0 {
        0
    } else if v.is_nan() {
        f64::NAN.to_bits()
    } else {
        v.to_bits()
    }
}

/// Structural equality; integer and long with the same number are equal.
impl PartialEq for Value {
    fn eq(&self, other: &Value) -> bool {
        use Value::*;
        match (self, other) {
            (Null, Null) => true,
            (Integer(a) | Long(a), Integer(b) | Long(b)) => a == b,
            (Float(a), Float(b)) => canonical_bits(*a) == canonical_bits(*b),
            (String(a), String(b)) => a == b,
            (Date(a), Date(b)) => a == b,
            (NumberVector(a), NumberVector(b)) => {
                a.len() == b.len()
                    && a
                        .iter()
                        .zip(b.iter())
                        .all(|(x, y)| canonical_bits(*x) == canonical_bits(*y))
            }
            (Image(a), Image(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Value {}

impl Hash for Value {
    fn hash<H: Hasher>(&self, state: &mut H) {
        use Value::*;
        match self {
            Null => 0u8.hash(state),
            Integer(v) | Long(v) => {
                1u8.hash(state);
                v.hash(state);
            }
            Float(v) => {
                2u8.hash(state);
                canonical_bits(*v).hash(state);
            }
            String(s) => {
                3u8.hash(state);
                s.hash(state);
            }
            Date(d) => {
                4u8.hash(state);
                d.hash(state);
            }
            NumberVector(v) => {
                5u8.hash(state);
                v.len().hash(state);
                for x in v.iter() {
                    canonical_bits(*x).hash(state);
                }
            }
            Image(img) => {
                6u8.hash(state);
                img.hash(state);
            }
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Null => f.write_str("NULL"),
            Value::Integer(v) | Value::Long(v) => write!(f, "{v}"),
            Value::Float(v) => f.write_str(&format_significant(*v, 6)),
            Value::String(s) => f.write_str(s),
            Value::Date(d) => f.write_str(&Value::format_date(*d)),
            Value::NumberVector(v) => {
                f.write_str("[")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str("]")
            }
            Value::Image(img) => write!(f, "<image {}x{}>", img.width, img.height),
        }
    }
}

/// Formats `v` with `digits` significant digits, trimming trailing zeros,
/// in the manner of C's `%g`.
pub fn format_significant(v: f64, digits: usize) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -4 || exp >= digits as i32 {
        let mantissa = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_fraction(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
