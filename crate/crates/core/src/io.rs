//! CSV readers and writers for data vectors, orderings and counts.

use std::collections::BTreeMap;
use std::fmt::Display;

use num_complex::Complex64;

use crate::bitstring::BitString;
use crate::coordinates::{DataVector, Mode};
use crate::error::{Error, Result};

/// Reads one entry per row: `re` (real mode) or `re,im` (complex mode).
/// Lines starting with `#` are comments; a non-numeric first row is taken as
/// a header.
pub fn read_vector_csv(text: &str) -> Result<DataVector> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(v) => rows.push(v),
            Err(_) if i == 0 => continue,
            Err(e) => return Err(Error::InvalidArgument(format!("row {}: {e}", i + 1))),
        }
    }
    let width = rows.first().map(Vec::len).unwrap_or(0);
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != width) {
        return Err(Error::InvalidArgument(format!("row {} has {} columns, expected {width}", i + 1, r.len())));
    }
    match width {
        0 => Err(Error::ZeroVector),
        1 => DataVector::real(rows.into_iter().map(|r| r[0]).collect()),
        2 => DataVector::complex(rows.into_iter().map(|r| Complex64::new(r[0], r[1])).collect()),
        w => Err(Error::InvalidArgument(format!("expected 1 or 2 columns, found {w}"))),
    }
}

pub fn vector_to_csv(x: &DataVector) -> String {
    let mut s = String::new();
    for z in x.entries() {
        match x.mode() {
            Mode::Real => s.push_str(&format!("{:?}\n", z.re)),
            Mode::Complex => s.push_str(&format!("{:?},{:?}\n", z.re, z.im)),
        }
    }
    s
}

pub fn ordering_to_csv(ordering: &[BitString]) -> String {
    let mut s = String::from("index,bitstring\n");
    for (i, b) in ordering.iter().enumerate() {
        s.push_str(&format!("{i},{b}\n"));
    }
    s
}

/// `bitstring,value` rows. With an ordering, its states come first in that
/// order (zeros included), then any other observed state.
pub fn map_to_csv<V: Display + Default + Copy>(header: &str, values: &BTreeMap<BitString, V>, ordering: Option<&[BitString]>) -> String {
    let mut s = format!("bitstring,{header}\n");
    let mut listed = std::collections::HashSet::new();
    for b in ordering.unwrap_or(&[]) {
        listed.insert(*b);
        s.push_str(&format!("{b},{}\n", values.get(b).copied().unwrap_or_default()));
    }
    for (b, v) in values {
        if !listed.contains(b) {
            s.push_str(&format!("{b},{v}\n"));
        }
    }
    s
}
