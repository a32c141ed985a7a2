//! CSV encoding of error maps and comparison tables.
//!
//! Numbers are written with 17 significant digits so a parse reproduces the
//! exact `f64`; failed cells are written as `nan`.

use std::io;

use qsteer_core::ErrorMap;

pub const MAP_HEADER: [&str; 3] = ["theta1", "theta2", "perr"];

pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.16e}")
    }
}

pub fn parse_number(field: &str) -> Option<f64> {
    match field.trim() {
        "nan" => Some(f64::NAN),
        s => s.parse().ok(),
    }
}

fn writer(buf: &mut Vec<u8>) -> csv::Writer<&mut Vec<u8>> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(buf)
}

/// Writes `header` and numeric `rows` as LF-terminated CSV.
pub fn encode(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut buf = Vec::new();
    {
        let mut w = writer(&mut buf);
        w.write_record(header).expect("in-memory write");
        for row in rows {
            w.write_record(row.iter().map(|&x| format_number(x))).expect("in-memory write");
        }
        w.flush().expect("in-memory flush");
    }
    String::from_utf8(buf).expect("ascii output")
}

/// `theta1,theta2,perr`, row-major with the first axis outermost.
pub fn encode_map(map: &ErrorMap) -> String {
    encode(
        &MAP_HEADER,
        map.cells().map(|(theta, p)| {
            let mut row = theta;
            row.push(p);
            row
        }),
    )
}

/// Parses a numeric CSV produced by [`encode`], returning the header and rows.
pub fn decode(text: &str) -> io::Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = r.headers().map_err(io::Error::other)?.iter().map(str::to_string).collect::<Vec<_>>();
    let mut rows = Vec::new();
    for (line, record) in r.records().enumerate() {
        let record = record.map_err(io::Error::other)?;
        let row = record
            .iter()
            .map(|f| {
                parse_number(f).ok_or_else(|| {
                    io::Error::new(io::ErrorKind::InvalidData, format!("row {}: bad number {f:?}", line + 1))
                })
            })
            .collect::<io::Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}
