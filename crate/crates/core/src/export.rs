//! CSV output shared by trajectory, speed-profile and figure exports:
//! comma-separated, one header row, 17 significant digits, LF endings.

use std::io::{self, Write};

/// Formats a value with 17 significant digits.
pub fn format_value(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(mut out: W, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> io::Result<()> {
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        let line: Vec<String> = row.into_iter().map(format_value).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

pub fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, header, rows).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("CSV output is ASCII")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(format_value(0.1), "1.0000000000000001e-1");
        assert_eq!(format_value(-2.0), "-2.0000000000000000e0");
        let parsed: f64 = format_value(std::f64::consts::PI).parse().unwrap();
        assert_eq!(parsed, std::f64::consts::PI);
    }

    #[test]
    fn layout() {
        let s = csv_string(&["a", "b"], vec![vec![1.0, 0.5]]);
        assert_eq!(s, "a,b\n1.0000000000000000e0,5.0000000000000000e-1\n");
    }
}
