//! Column-by-column dependence scans against a response, and exports of
//! double-centered distance pairs.

use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::DataMatrix;
use crate::error::{invalid, Error, Result};
use crate::estimators::CenteredDistanceMatrix;
use crate::inference::{default_permutation_count, permutation_test_centered, MethodSpec};
use crate::io::{Dataset, Response};
use crate::rng::{derive_seed, domain};
use crate::summation::NeumaierSum;
use crate::transforms::{apply_transform_with, DegeneratePolicy};

/// One method's outcome on one column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanEntry {
    pub dcor: f64,
    pub p_value: f64,
    pub degenerate: bool,
}

/// All methods' outcomes on one column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub column: String,
    /// 1-based column position among the non-response columns.
    pub index: usize,
    /// Aligned with [`ScanResult::methods`].
    pub entries: Vec<ScanEntry>,
}

/// Result of [`scan`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub methods: Vec<String>,
    pub b: usize,
    pub seed: u64,
    pub rows: Vec<ScanRow>,
}

fn prepare(x: &DataMatrix, method: &MethodSpec, transform: bool) -> Result<CenteredDistanceMatrix> {
    let t = if transform {
        apply_transform_with(x, &method.transform, DegeneratePolicy::PassThroughZeros)?
    } else {
        x.clone()
    };
    CenteredDistanceMatrix::from_sample(&t, method.alpha)
}

/// Centered response matrices, one per method. A binary response is never
/// transformed: any monotone transform of two values only rescales it.
fn prepare_response(
    response: &Response,
    methods: &[MethodSpec],
) -> Result<Vec<CenteredDistanceMatrix>> {
    let y = response.as_matrix()?;
    methods
        .iter()
        .map(|m| prepare(&y, m, !response.binary))
        .collect()
}

/// Test every column of `dataset` against `response` with each method.
///
/// Columns are processed independently and in parallel; column `j` uses the
/// permutation seed `derive_seed(seed, [SCAN, j])` for every method, so results
/// do not depend on the order of evaluation or the worker count. Constant
/// columns are flagged degenerate (dCor 0, p = 1) rather than aborting.
pub fn scan(
    dataset: &Dataset,
    response: &Response,
    methods: &[MethodSpec],
    b: Option<usize>,
    seed: u64,
) -> Result<ScanResult> {
    if methods.is_empty() {
        return Err(invalid("at least one method is required"));
    }
    for (i, m) in methods.iter().enumerate() {
        m.validate()?;
        if methods[..i].iter().any(|o| o.name() == m.name()) {
            return Err(invalid(format!("method '{}' given twice", m.name())));
        }
    }
    let n = dataset.n();
    if response.values.len() != n {
        return Err(Error::LengthMismatch {
            left: n,
            right: response.values.len(),
        });
    }
    if n < 2 {
        return Err(Error::TooFewObservations {
            required: 2,
            got: n,
        });
    }
    let b = b.unwrap_or_else(|| default_permutation_count(n));
    let cys = prepare_response(response, methods)?;
    let rows = (0..dataset.p())
        .into_par_iter()
        .map(|j| {
            let x = DataMatrix::from_column(dataset.data.column(j))?;
            let col_seed = derive_seed(seed, &[domain::SCAN, j as u64]);
            let entries = methods
                .iter()
                .zip(&cys)
                .map(|(m, cy)| {
                    let cx = prepare(&x, m, true)?;
                    let (dcor, p_value, degenerate) =
                        permutation_test_centered(&cx, cy, b, 0.5, col_seed)?;
                    Ok(ScanEntry {
                        dcor,
                        p_value,
                        degenerate,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(ScanRow {
                column: dataset.names[j].clone(),
                index: j + 1,
                entries,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanResult {
        methods: methods.iter().map(|m| m.name().to_string()).collect(),
        b,
        seed,
        rows,
    })
}

impl ScanResult {
    fn header(&self) -> Vec<String> {
        let mut h = vec!["column".to_string(), "index".to_string()];
        for m in &self.methods {
            h.push(format!("dcor_{m}"));
            h.push(format!("p_{m}"));
            h.push(format!("degenerate_{m}"));
        }
        h.push("b".into());
        h.push("seed".into());
        h
    }

    /// Write as CSV. Floats use the shortest representation that reads back
    /// to the same value, so [`ScanResult::read_csv`] round-trips exactly.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(self.header()).map_err(io)?;
        for row in &self.rows {
            let mut rec = vec![row.column.clone(), row.index.to_string()];
            for e in &row.entries {
                rec.push(e.dcor.to_string());
                rec.push(e.p_value.to_string());
                rec.push(e.degenerate.to_string());
            }
            rec.push(self.b.to_string());
            rec.push(self.seed.to_string());
            w.write_record(rec).map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_csv_path(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    /// Read a CSV written by [`ScanResult::write_csv`].
    pub fn read_csv<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let io = |e: csv::Error| Error::Io(e.to_string());
        let header: Vec<String> = r
            .headers()
            .map_err(io)?
            .iter()
            .map(str::to_string)
            .collect();
        let k = header.len();
        if k < 4 || !(k - 4).is_multiple_of(3) || header[0] != "column" || header[1] != "index" {
            return Err(Error::Config("not a scan result table".into()));
        }
        let methods: Vec<String> = (0..(k - 4) / 3)
            .map(|i| {
                header[2 + 3 * i]
                    .strip_prefix("dcor_")
                    .map(str::to_string)
                    .ok_or_else(|| {
                        Error::Config(format!("unexpected column '{}'", header[2 + 3 * i]))
                    })
            })
            .collect::<Result<_>>()?;
        let mut rows = Vec::new();
        let mut b = 0;
        let mut seed = 0;
        for (ri, rec) in r.records().enumerate() {
            let rec = rec.map_err(io)?;
            let cell = |c: usize| rec.get(c).unwrap_or("");
            let parse_err = |c: usize| Error::Parse {
                row: ri + 1,
                col: c + 1,
                value: cell(c).to_string(),
            };
            let num = |c: usize| cell(c).parse::<f64>().map_err(|_| parse_err(c));
            let entries = (0..methods.len())
                .map(|i| {
                    let c = 2 + 3 * i;
                    Ok(ScanEntry {
                        dcor: num(c)?,
                        p_value: num(c + 1)?,
                        degenerate: cell(c + 2).parse().map_err(|_| parse_err(c + 2))?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            b = cell(k - 2).parse().map_err(|_| parse_err(k - 2))?;
            seed = cell(k - 1).parse().map_err(|_| parse_err(k - 1))?;
            rows.push(ScanRow {
                column: cell(0).to_string(),
                index: cell(1).parse().map_err(|_| parse_err(1))?,
                entries,
            });
        }
        Ok(Self {
            methods,
            b,
            seed,
            rows,
        })
    }
}

/// Double-centered distance pairs of one column against the response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DcScatter {
    pub column: String,
    pub method: String,
    pub n: usize,
    /// `(Δ^X_ij, Δ^Y_ij)` in row-major order over `(i, j)`.
    #[serde(skip)]
    pub pairs: Vec<(f64, f64)>,
    /// Least-squares fit of `Δ^Y` on `Δ^X`; `None` for a degenerate column.
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    /// Pearson correlation of the pairs; equals `dcor` up to rounding.
    pub pearson: Option<f64>,
    pub dcor: f64,
    pub degenerate: bool,
}

/// Build the `n²` pairs of double-centered distances of column `j` (0-based)
/// and the response, after applying `method` to the column (and to the
/// response unless it is binary).
///
/// The Pearson correlation of the pairs is checked against the dCor of the
/// same matrices; a discrepancy above `1e-10` is a numerical failure.
pub fn dc_scatter(
    dataset: &Dataset,
    j: usize,
    response: &Response,
    method: &MethodSpec,
) -> Result<DcScatter> {
    if j >= dataset.p() {
        return Err(Error::Config(format!(
            "column {} out of range (1..={})",
            j + 1,
            dataset.p()
        )));
    }
    method.validate()?;
    let x = DataMatrix::from_column(dataset.data.column(j))?;
    let cx = prepare(&x, method, true)?;
    let cy = prepare_response(response, std::slice::from_ref(method))?.remove(0);
    let dcor = cx.dcor_with(&cy)?;
    let pairs: Vec<(f64, f64)> = cx
        .as_slice()
        .iter()
        .copied()
        .zip(cy.as_slice().iter().copied())
        .collect();
    let mut out = DcScatter {
        column: dataset.names[j].clone(),
        method: method.name().to_string(),
        n: dataset.n(),
        pairs,
        slope: None,
        intercept: None,
        pearson: None,
        dcor: dcor.value,
        degenerate: dcor.degenerate,
    };
    if dcor.degenerate {
        return Ok(out);
    }
    let (slope, intercept, pearson) = least_squares(&out.pairs);
    if (pearson - dcor.value).abs() > 1e-10 {
        return Err(Error::Numerical(format!(
            "Pearson correlation of distance pairs {pearson} differs from dCor {}",
            dcor.value
        )));
    }
    out.slope = Some(slope);
    out.intercept = Some(intercept);
    out.pearson = Some(pearson);
    Ok(out)
}

/// Slope, intercept and correlation of a simple linear regression.
fn least_squares(pairs: &[(f64, f64)]) -> (f64, f64, f64) {
    let m = pairs.len() as f64;
    let mean = |f: &dyn Fn(&(f64, f64)) -> f64| {
        let mut s = NeumaierSum::new();
        s.extend(pairs.iter().map(f));
        s.total() / m
    };
    let mx = mean(&|p| p.0);
    let my = mean(&|p| p.1);
    let sxy = mean(&|p| (p.0 - mx) * (p.1 - my));
    let sxx = mean(&|p| (p.0 - mx) * (p.0 - mx));
    let syy = mean(&|p| (p.1 - my) * (p.1 - my));
    let slope = sxy / sxx;
    (slope, my - slope * mx, sxy / (sxx * syy).sqrt())
}

/// Write the pairs as CSV (`delta_x,delta_y`) and the fit summary as JSON
/// next to it (same path with extension `.json`). Returns the JSON path.
pub fn write_dc_scatter(scatter: &DcScatter, csv_path: &Path) -> Result<PathBuf> {
    let file = std::fs::File::create(csv_path)
        .map_err(|e| Error::Io(format!("{}: {e}", csv_path.display())))?;
    let mut w = csv::Writer::from_writer(std::io::BufWriter::new(file));
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["delta_x", "delta_y"]).map_err(io)?;
    for (a, b) in &scatter.pairs {
        w.write_record([a.to_string(), b.to_string()]).map_err(io)?;
    }
    w.flush()?;
    let json_path = csv_path.with_extension("json");
    let json = serde_json::to_string_pretty(scatter).map_err(|e| Error::Io(e.to_string()))?;
    std::fs::write(&json_path, json + "\n")?;
    Ok(json_path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::sample_dcor;
    use rand::Rng;

    fn dataset(cols: Vec<Vec<f64>>, response: Vec<f64>) -> (Dataset, Response) {
        let names = (1..=cols.len()).map(|j| format!("g{j}")).collect();
        let d = Dataset {
            names,
            data: DataMatrix::from_columns(&cols).unwrap(),
            response: None,
        };
        (d, Response::new("y", response))
    }

    fn binary(n: usize) -> Vec<f64> {
        (0..n).map(|i| if i % 3 == 0 { 1.0 } else { 0.0 }).collect()
    }

    #[test]
    fn self_dependence_and_constant_column() {
        let y = binary(30);
        let (d, r) = dataset(vec![y.clone(), vec![2.5; 30]], y);
        let res = scan(
            &d,
            &r,
            &[MethodSpec::classical(), MethodSpec::biloop()],
            Some(99),
            3,
        )
        .unwrap();
        let e = res.rows[0].entries[0];
        assert!((e.dcor - 1.0).abs() < 1e-12);
        assert!((e.p_value - 0.01).abs() < 1e-15);
        for e in &res.rows[1].entries {
            assert!(e.degenerate);
            assert_eq!((e.dcor, e.p_value), (0.0, 1.0));
        }
    }

    #[test]
    fn csv_round_trip() {
        let mut rng = crate::rng::stream(5, &[0]);
        let y: Vec<f64> = (0..25).map(|_| rng.random::<f64>()).collect();
        let cols: Vec<Vec<f64>> = (0..4)
            .map(|_| (0..25).map(|_| rng.random::<f64>()).collect())
            .collect();
        let (d, r) = dataset(cols, y);
        let res = scan(&d, &r, &MethodSpec::standard_four(), Some(50), 11).unwrap();
        let mut buf = Vec::new();
        res.write_csv(&mut buf).unwrap();
        let back = ScanResult::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, res);
    }

    #[test]
    fn scan_is_thread_count_independent() {
        let mut rng = crate::rng::stream(8, &[0]);
        let y: Vec<f64> = (0..20).map(|_| rng.random::<f64>()).collect();
        let cols: Vec<Vec<f64>> = (0..6)
            .map(|_| (0..20).map(|_| rng.random::<f64>()).collect())
            .collect();
        let (d, r) = dataset(cols, y);
        let run = |w| {
            crate::parallel::with_workers(w, || {
                scan(&d, &r, &[MethodSpec::biloop()], Some(40), 1).unwrap()
            })
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn scatter_pearson_matches_dcor() {
        let mut rng = crate::rng::stream(9, &[0]);
        let y: Vec<f64> = (0..15).map(|_| rng.random::<f64>()).collect();
        let x: Vec<f64> = y
            .iter()
            .map(|v| v * v + 0.1 * rng.random::<f64>())
            .collect();
        let (d, r) = dataset(vec![x.clone()], y.clone());
        let s = dc_scatter(&d, 0, &r, &MethodSpec::classical()).unwrap();
        assert_eq!(s.pairs.len(), 225);
        let direct = sample_dcor(
            &DataMatrix::from_column(x).unwrap(),
            &DataMatrix::from_column(y).unwrap(),
            1.0,
        )
        .unwrap();
        assert!((s.pearson.unwrap() - direct.value).abs() < 1e-10);
        assert!(dc_scatter(&d, 1, &r, &MethodSpec::classical()).is_err());
    }

    #[test]
    fn binary_response_distances() {
        let distinct = |v: &[(f64, f64)]| {
            let mut ys: Vec<f64> = v.iter().map(|p| p.1).collect();
            ys.sort_by(f64::total_cmp);
            ys.dedup();
            ys
        };
        let (d, r) = dataset(vec![(0..30).map(f64::from).collect()], binary(30));
        let s = dc_scatter(&d, 0, &r, &MethodSpec::biloop()).unwrap();
        assert_eq!(distinct(&s.pairs).len(), 3);
        let balanced: Vec<f64> = (0..30).map(|i| (i % 2) as f64).collect();
        let (d, r) = dataset(vec![(0..30).map(f64::from).collect()], balanced);
        let s = dc_scatter(&d, 0, &r, &MethodSpec::classical()).unwrap();
        assert_eq!(distinct(&s.pairs), vec![-0.5, 0.5]);
    }
}
