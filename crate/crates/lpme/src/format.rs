//! Byte-stable JSON: struct field order, two-space indent and every float
//! written with 17 significant digits.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter, Serializer};

struct FixedFloats<'a>(PrettyFormatter<'a>);

macro_rules! forward {
    ($($name:ident($($arg:ident: $ty:ty),*);)*) => {
        $(fn $name<W: ?Sized + io::Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> io::Result<()> {
            self.0.$name(w $(, $arg)*)
        })*
    };
}

impl Formatter for FixedFloats<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{}", float(value))
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    forward! {
        begin_array();
        end_array();
        begin_array_value(first: bool);
        end_array_value();
        begin_object();
        end_object();
        begin_object_key(first: bool);
        begin_object_value();
        end_object_value();
    }
}

/// `{:.16e}` of a finite float, with `-0` written as `0`.
pub fn float(value: f64) -> String {
    let v = if value == 0.0 { 0.0 } else { value };
    format!("{v:.16e}")
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = Serializer::with_formatter(&mut out, FixedFloats(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("serialization into memory");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_seventeen_digits() {
        assert_eq!(float(1.0), "1.0000000000000000e0");
        assert_eq!(float(-0.0), "0.0000000000000000e0");
        assert_eq!(float(0.1).parse::<f64>().unwrap(), 0.1);
        let json = to_json(&serde_json::json!({"a": [0.5, 2]}));
        assert!(json.contains("5.0000000000000000e-1"));
        assert!(json.contains("\n    2\n"));
    }

    #[test]
    fn round_trips_every_float() {
        for v in [std::f64::consts::PI, 1e-300, -7.25e21, f64::MIN_POSITIVE, 2f64.sqrt()] {
            assert_eq!(float(v).parse::<f64>().unwrap(), v);
        }
    }
}
