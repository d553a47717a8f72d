//! Time series of norms and diagnostics, with CSV and JSON sidecar I/O.

use std::fs::File;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;

use super::SolverConfig;

/// One row of a [`TimeSeries`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub t: f64,
    pub l2_sq: f64,
    pub hhalf_sq: f64,
    pub h3half_sq: f64,
    /// Ḣ^{1/2} fraction inside the log-schedule ball.
    pub lowfrac_g1: f64,
    /// Ḣ^{1/2} fraction inside the power-schedule ball.
    pub lowfrac_g2: f64,
    pub bilinear_ratio: f64,
    pub energy_residual: f64,
    /// 1 when `‖u‖_{Ḣ^{1/2}} ≥ 2ε`, else 0.
    pub smallness_flag: u8,
    /// `⟨u, N(u)⟩_{Ḣ^{1/2}}`; not serialized.
    #[serde(skip)]
    pub transfer: f64,
}

/// Records ordered by strictly increasing time.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub records: Vec<Record>,
}

pub const CSV_HEADER: &str =
    "t,l2_sq,hhalf_sq,h3half_sq,lowfrac_g1,lowfrac_g2,bilinear_ratio,energy_residual,smallness_flag";

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.t).collect()
    }

    /// `(t, value)` pairs for the named CSV column.
    pub fn column(&self, name: &str) -> Result<Vec<(f64, f64)>> {
        let get: fn(&Record) -> f64 = match name {
            "t" => |r| r.t,
            "l2_sq" => |r| r.l2_sq,
            "hhalf_sq" => |r| r.hhalf_sq,
            "h3half_sq" => |r| r.h3half_sq,
            "lowfrac_g1" => |r| r.lowfrac_g1,
            "lowfrac_g2" => |r| r.lowfrac_g2,
            "bilinear_ratio" => |r| r.bilinear_ratio,
            "energy_residual" => |r| r.energy_residual,
            "smallness_flag" => |r| f64::from(r.smallness_flag),
            _ => return Err(Error::Domain(format!("unknown series column `{name}`"))),
        };
        Ok(self.records.iter().map(|r| (r.t, get(r))).collect())
    }

    pub fn smallness_violated(&self) -> bool {
        self.records.iter().any(|r| r.smallness_flag != 0)
    }

    /// Fills `energy_residual` from finite differences of `hhalf_sq`.
    ///
    /// The residual of `d/dt‖u‖²_{Ḣ^{1/2}} + 2‖∇u‖²_{Ḣ^{1/2}} − 2⟨u, N(u)⟩_{Ḣ^{1/2}} = 0`
    /// is divided by `2‖∇u‖²_{Ḣ^{1/2}}`. The derivative differentiates the
    /// interpolating polynomial through five neighbouring records (shifted
    /// inwards at the ends), or through all records when fewer exist.
    pub fn fill_energy_residual(&mut self) {
        let n = self.records.len();
        if n < 3 {
            self.records
                .iter_mut()
                .for_each(|r| r.energy_residual = 0.0);
            return;
        }
        let ts = self.times();
        let ys: Vec<f64> = self.records.iter().map(|r| r.hhalf_sq).collect();
        let width = n.min(5);
        for i in 0..n {
            let start = i.saturating_sub(width / 2).min(n - width);
            let idx: Vec<usize> = (start..start + width).collect();
            let deriv = lagrange_derivative(&ts, &ys, &idx, i);
            let r = &mut self.records[i];
            r.energy_residual = if r.h3half_sq > 0.0 {
                (deriv + 2.0 * r.h3half_sq - 2.0 * r.transfer) / (2.0 * r.h3half_sq)
            } else {
                0.0
            };
        }
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv_to(file).map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Serializes the series, header included, to any writer.
    pub fn write_csv_to<W: std::io::Write>(&self, sink: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(sink);
        if self.records.is_empty() {
            w.write_record(CSV_HEADER.split(','))?;
        }
        for r in &self.records {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv_to(&mut buf)
            .expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("CSV output is UTF-8")
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut rdr = csv::Reader::from_reader(file);
        let header = rdr
            .headers()
            .map_err(|source| Error::Csv {
                path: path.to_path_buf(),
                source,
            })?
            .iter()
            .collect::<Vec<_>>()
            .join(",");
        if header != CSV_HEADER {
            return Err(Error::Domain(format!(
                "{}: unexpected header `{header}`",
                path.display()
            )));
        }
        let records = rdr
            .deserialize()
            .collect::<std::result::Result<Vec<Record>, _>>()
            .map_err(|source| Error::Csv {
                path: path.to_path_buf(),
                source,
            })?;
        Ok(Self { records })
    }
}

/// Derivative at `ts[at]` of the polynomial interpolating `(ts[j], ys[j])`, `j ∈ idx`.
fn lagrange_derivative(ts: &[f64], ys: &[f64], idx: &[usize], at: usize) -> f64 {
    let x = ts[at];
    let mut acc = 0.0;
    for &j in idx {
        let w = if j == at {
            idx.iter()
                .filter(|&&m| m != j)
                .map(|&m| 1.0 / (x - ts[m]))
                .sum()
        } else {
            let mut w = 1.0 / (ts[j] - x);
            for &m in idx {
                if m != j && m != at {
                    w *= (x - ts[m]) / (ts[j] - ts[m]);
                }
            }
            w
        };
        acc += w * ys[j];
    }
    acc
}

/// JSON sidecar written next to a series CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub config: SolverConfig,
    pub grid: Grid,
    pub seeds: Vec<u64>,
    pub wall_time_seconds: f64,
    pub records: usize,
    pub steps: usize,
    pub smallness_violated: bool,
    pub label: String,
}

impl RunMetadata {
    pub fn write_json(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(t: f64, hhalf_sq: f64, h3half_sq: f64) -> Record {
        Record {
            t,
            l2_sq: 0.0,
            hhalf_sq,
            h3half_sq,
            lowfrac_g1: 0.0,
            lowfrac_g2: 0.0,
            bilinear_ratio: 0.0,
            energy_residual: f64::NAN,
            smallness_flag: 0,
            transfer: 0.0,
        }
    }

    #[test]
    fn derivative_is_exact_on_quartics() {
        let ts: Vec<f64> = (0..9)
            .map(|k| 0.1 * k as f64 + 0.01 * (k * k) as f64)
            .collect();
        let ys: Vec<f64> = ts.iter().map(|t| 3.0 * t.powi(4) - t + 2.0).collect();
        for i in 0..9usize {
            let start = i.saturating_sub(2).min(4);
            let idx: Vec<usize> = (start..start + 5).collect();
            let d = lagrange_derivative(&ts, &ys, &idx, i);
            assert!((d - (12.0 * ts[i].powi(3) - 1.0)).abs() < 1e-10);
        }
    }

    #[test]
    fn residual_vanishes_for_exponential_decay() {
        // E(t) = e^{−2t}, h3 = 1·E: exact identity E' = −2h3
        let mut s = TimeSeries {
            records: (0..20)
                .map(|k| {
                    let t = 0.01 * k as f64;
                    rec(t, (-2.0 * t).exp(), (-2.0 * t).exp())
                })
                .collect(),
        };
        s.fill_energy_residual();
        assert!(s.records.iter().all(|r| r.energy_residual.abs() < 1e-6));
    }

    #[test]
    fn zero_series_has_zero_residual() {
        let mut s = TimeSeries {
            records: (0..5).map(|k| rec(k as f64, 0.0, 0.0)).collect(),
        };
        s.fill_energy_residual();
        assert!(s.records.iter().all(|r| r.energy_residual == 0.0));
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        let mut s = TimeSeries {
            records: (0..4)
                .map(|k| rec(k as f64 * 0.5, 1.0 / (k + 1) as f64, 2.0))
                .collect(),
        };
        s.records[2].smallness_flag = 1;
        s.fill_energy_residual();
        s.write_csv(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
        let back = TimeSeries::read_csv(&path).unwrap();
        assert_eq!(back, s);
        assert!(back.smallness_violated());
        assert!(s.column("nope").is_err());
        assert_eq!(s.to_csv_string(), text);
        assert_eq!(
            TimeSeries::default().to_csv_string(),
            format!("{CSV_HEADER}\n")
        );
    }
}
