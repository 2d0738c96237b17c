//! JSON encodings shared by the library and the command line.
//!
//! Matrices are `{"rows": r, "cols": c, "entries": [[re, im], ...]}` in
//! row-major order. [`to_string_pretty`] prints every float with 17
//! significant digits so reports are byte-stable across runs.

use std::io;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Result;
use crate::matkernel::{CMatrix, C64};

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    entries: Vec<[f64; 2]>,
}

impl Serialize for CMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson {
            rows: self.rows(),
            cols: self.cols(),
            entries: self.row_major().iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = MatrixJson::deserialize(d)?;
        let entries = m.entries.iter().map(|e| C64::new(e[0], e[1])).collect();
        CMatrix::from_row_major(m.rows, m.cols, entries).map_err(D::Error::custom)
    }
}

/// Formatter writing floats as `{:.16e}`: 17 significant digits.
struct SigFigs(serde_json::ser::PrettyFormatter<'static>);

impl serde_json::ser::Formatter for SigFigs {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        if v.is_finite() {
            write!(w, "{v:.16e}")
        } else {
            // JSON has no infinities; mirror serde_json's null.
            w.write_all(b"null")
        }
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_string_pretty<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigFigs(serde_json::ser::PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

pub fn from_str<T: serde::de::DeserializeOwned>(s: &str) -> Result<T> {
    Ok(serde_json::from_str(s)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn matrix_roundtrip() {
        let m = CMatrix::from_fn(2, 3, |i, j| C64::new(i as f64 + 0.1, -(j as f64) / 3.0));
        let s = to_string_pretty(&m).unwrap();
        let back: CMatrix = from_str(&s).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn seventeen_digits() {
        let s = to_string_pretty(&vec![0.1f64, 1.0]).unwrap();
        assert!(s.contains("1.0000000000000001e-1"));
        assert!(s.contains("1.0000000000000000e0"));
    }

    #[test]
    fn wrong_entry_count_is_a_parse_error() {
        let r: Result<CMatrix> = from_str(r#"{"rows":2,"cols":2,"entries":[[1,0]]}"#);
        assert!(matches!(r, Err(Error::Parse(_))));
    }
}
