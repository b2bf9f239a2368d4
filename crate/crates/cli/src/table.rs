//! CSV output: `#` metadata lines, a header row, then data rows. LF line
//! endings, `.` decimal separator, shortest round-trip float formatting.

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    U(u64),
    B(bool),
    S(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::F(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::U(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::U(v as u64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::I(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::B(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::S(v.to_string())
    }
}

impl Cell {
    fn render(&self) -> CliResult<String> {
        Ok(match self {
            Cell::F(v) if !v.is_finite() => {
                return Err(CliError::Runtime(format!("non-finite value {v} in output")))
            }
            Cell::F(v) => format!("{v:?}"),
            Cell::I(v) => v.to_string(),
            Cell::U(v) => v.to_string(),
            Cell::B(v) => u8::from(*v).to_string(),
            Cell::S(s) => s.clone(),
        })
    }
}

pub type Row = Vec<Cell>;

/// Renders the full file. Fails without producing anything on a
/// non-finite cell or a row of the wrong width.
pub fn render(meta: &[(String, String)], header: &[&str], rows: &[Row]) -> CliResult<String> {
    let mut out = String::new();
    for (k, v) in meta {
        out.push_str(&format!("# {k}: {v}\n"));
    }
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).map_err(|e| CliError::Runtime(e.to_string()))?;
    for (i, row) in rows.iter().enumerate() {
        if row.len() != header.len() {
            return Err(CliError::Runtime(format!(
                "row {i} has {} cells, header has {}",
                row.len(),
                header.len()
            )));
        }
        let cells = row.iter().map(Cell::render).collect::<CliResult<Vec<_>>>()?;
        w.write_record(&cells).map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    let body = w.into_inner().map_err(|e| CliError::Runtime(e.to_string()))?;
    out.push_str(std::str::from_utf8(&body).expect("csv output is utf-8"));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_metadata_header_and_rows() {
        let s = render(
            &[("config_hash".into(), "ab".into())],
            &["a", "b"],
            &[vec![Cell::F(0.1), Cell::B(true)], vec![Cell::F(2.0), Cell::S("x".into())]],
        )
        .unwrap();
        assert_eq!(s, "# config_hash: ab\na,b\n0.1,1\n2.0,x\n");
    }

    #[test]
    fn rejects_non_finite() {
        assert!(render(&[], &["a"], &[vec![Cell::F(f64::NAN)]]).is_err());
        assert!(render(&[], &["a"], &[vec![Cell::F(f64::INFINITY)]]).is_err());
    }
}
