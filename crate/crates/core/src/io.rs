//! Reading numeric tables from CSV.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::DataMatrix;
use crate::error::{Error, Result};

/// How to read a CSV file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvOptions {
    pub delimiter: u8,
    pub header: bool,
    /// Name (with a header) or 1-based index (without) of the response column.
    pub response_column: Option<String>,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self {
            delimiter: b',',
            header: true,
            response_column: None,
        }
    }
}

/// A designated response variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Response {
    pub name: String,
    pub values: Vec<f64>,
    /// Exactly two distinct values.
    pub binary: bool,
}

impl Response {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Self {
        let binary = is_binary(&values);
        Self {
            name: name.into(),
            values,
            binary,
        }
    }

    pub fn as_matrix(&self) -> Result<DataMatrix> {
        DataMatrix::from_column(self.values.clone())
    }
}

fn is_binary(values: &[f64]) -> bool {
    let mut distinct: Vec<f64> = Vec::with_capacity(3);
    for &v in values {
        if !distinct.contains(&v) {
            distinct.push(v);
            if distinct.len() > 2 {
                return false;
            }
        }
    }
    distinct.len() == 2
}

/// Named numeric columns plus an optional response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub names: Vec<String>,
    pub data: DataMatrix,
    pub response: Option<Response>,
}

impl Dataset {
    pub fn n(&self) -> usize {
        self.data.n()
    }

    pub fn p(&self) -> usize {
        self.data.dim()
    }

    /// Position of a column given by name or 1-based index.
    pub fn column_index(&self, key: &str) -> Result<usize> {
        if let Some(i) = self.names.iter().position(|n| n == key) {
            return Ok(i);
        }
        match key.parse::<usize>() {
            Ok(i) if i >= 1 && i <= self.p() => Ok(i - 1),
            _ => Err(Error::Config(format!("no column '{key}'"))),
        }
    }
}

/// Read a numeric CSV. Cells may carry surrounding whitespace; line endings
/// may be LF or CRLF. Parse errors cite 1-based data row and column numbers.
pub fn read_csv(path: &Path, options: &CsvOptions) -> Result<Dataset> {
    let file =
        std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_csv_from(file, options)
}

/// [`read_csv`] from any reader.
pub fn read_csv_from<R: std::io::Read>(reader: R, options: &CsvOptions) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(options.delimiter)
        .has_headers(options.header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut names: Vec<String> = if options.header {
        rdr.headers()
            .map_err(|e| Error::Io(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect()
    } else {
        Vec::new()
    };
    let mut values = Vec::new();
    let mut width = if options.header {
        Some(names.len())
    } else {
        None
    };
    let mut rows = 0;
    for (r, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| Error::Io(e.to_string()))?;
        if record.len() == 1 && record.get(0) == Some("") {
            continue;
        }
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(Error::Ragged {
                row: r + 1,
                got: record.len(),
                expected,
            });
        }
        for (c, cell) in record.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| Error::Parse {
                row: r + 1,
                col: c + 1,
                value: cell.to_string(),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    row: r + 1,
                    col: c + 1,
                    value: cell.to_string(),
                });
            }
            values.push(v);
        }
        rows += 1;
    }
    let p = width.unwrap_or(0);
    if rows == 0 || p == 0 {
        return Err(Error::EmptyInput);
    }
    if !options.header {
        names = (1..=p).map(|j| format!("V{j}")).collect();
    }
    let mut data = DataMatrix::new(values, rows, p)?;
    let response = match &options.response_column {
        None => None,
        Some(key) => {
            let idx = names
                .iter()
                .position(|n| n == key)
                .or_else(|| {
                    key.parse::<usize>()
                        .ok()
                        .filter(|&i| i >= 1 && i <= p)
                        .map(|i| i - 1)
                })
                .ok_or_else(|| Error::Config(format!("response column '{key}' not found")))?;
            if p < 2 {
                return Err(Error::Config("no columns left besides the response".into()));
            }
            let y = data.column(idx);
            let keep: Vec<Vec<f64>> = (0..p)
                .filter(|&j| j != idx)
                .map(|j| data.column(j))
                .collect();
            data = DataMatrix::from_columns(&keep)?;
            let name = names.remove(idx);
            Some(Response::new(name, y))
        }
    };
    Ok(Dataset {
        names,
        data,
        response,
    })
}

/// Read a sample as a matrix (all columns, header optional).
pub fn read_matrix(path: &Path, header: bool) -> Result<DataMatrix> {
    let opts = CsvOptions {
        header,
        ..CsvOptions::default()
    };
    Ok(read_csv(path, &opts)?.data)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(text: &str, opts: &CsvOptions) -> Result<Dataset> {
        read_csv_from(text.as_bytes(), opts)
    }

    #[test]
    fn reads_small_table() {
        let d = read("a,b\n1,2\n3,4\n5,6\n", &CsvOptions::default()).unwrap();
        assert_eq!((d.n(), d.p()), (3, 2));
        assert_eq!(d.names, vec!["a", "b"]);
        assert_eq!(d.data.column(1), vec![2.0, 4.0, 6.0]);
    }

    #[test]
    fn accepts_crlf_and_spaces() {
        let d = read("a, b\r\n1, 2\r\n3 ,4\r\n", &CsvOptions::default()).unwrap();
        assert_eq!(d.data.column(0), vec![1.0, 3.0]);
        assert_eq!(d.names, vec!["a", "b"]);
    }

    #[test]
    fn reports_cell_coordinates() {
        let err = read("a,b\n1,2\nabc,4\n", &CsvOptions::default()).unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                row: 2,
                col: 1,
                value: "abc".into()
            }
        );
    }

    #[test]
    fn distinct_errors() {
        assert_eq!(
            read("a,b\n", &CsvOptions::default()).unwrap_err(),
            Error::EmptyInput
        );
        assert!(matches!(
            read("a,b\n1,2\n3\n", &CsvOptions::default()).unwrap_err(),
            Error::Ragged {
                row: 2,
                got: 1,
                expected: 2
            }
        ));
        let opts = CsvOptions {
            response_column: Some("y".into()),
            ..CsvOptions::default()
        };
        assert!(matches!(
            read("a,b\n1,2\n", &opts).unwrap_err(),
            Error::Config(_)
        ));
    }

    #[test]
    fn splits_off_binary_response() {
        let opts = CsvOptions {
            response_column: Some("y".into()),
            ..CsvOptions::default()
        };
        let d = read("g1,y,g2\n1,0,5\n2,1,6\n3,1,7\n", &opts).unwrap();
        assert_eq!(d.names, vec!["g1", "g2"]);
        let r = d.response.unwrap();
        assert!(r.binary);
        assert_eq!(r.values, vec![0.0, 1.0, 1.0]);
        assert_eq!(d.data.column(1), vec![5.0, 6.0, 7.0]);
    }

    #[test]
    fn headerless_columns_get_names() {
        let opts = CsvOptions {
            header: false,
            response_column: Some("2".into()),
            ..CsvOptions::default()
        };
        let d = read("1,0\n2,1\n3,2\n", &opts).unwrap();
        assert_eq!(d.names, vec!["V1"]);
        assert!(!d.response.unwrap().binary);
    }
}
