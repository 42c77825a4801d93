use std::io::Read;

use super::{DesignMatrix, StatsError};

/// Header name of the response column in observation tables. Every other
/// column is a feature, in header order.
pub const RESPONSE_COLUMN: &str = "y";

/// Reads a comma-separated observation table with a header row.
pub fn read_table<R: Read>(reader: R) -> Result<DesignMatrix, StatsError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| StatsError::Table(e.to_string()))?
        .clone();
    let y_col = headers
        .iter()
        .position(|h| h == RESPONSE_COLUMN)
        .ok_or_else(|| StatsError::Table(format!("missing `{RESPONSE_COLUMN}` column")))?;
    let names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != y_col)
        .map(|(_, h)| h.to_string())
        .collect();

    let mut rows = Vec::new();
    let mut response = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| StatsError::Table(e.to_string()))?;
        let mut row = Vec::with_capacity(names.len());
        for (j, field) in rec.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                StatsError::Table(format!("row {}: `{field}` is not a number", i + 1))
            })?;
            if j == y_col {
                response.push(v);
            } else {
                row.push(v);
            }
        }
        rows.push(row);
    }
    DesignMatrix::new(names, &rows, response)
}
