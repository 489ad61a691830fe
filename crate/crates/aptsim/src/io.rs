//! File formats: trajectory curves, count files and MLE results.

use std::path::Path;

use aptsim_core::dynamics::{DensityMatrix, Trajectory};
use aptsim_core::linalg::{Matrix, C64};
use aptsim_core::tomography::{BasisLabel, CountRecord, MleResult};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::format::sig6;

pub const TRAJECTORY_HEADER: [&str; 3] = ["t", "concurrence", "norm"];
pub const COUNTS_HEADER: [&str; 3] = ["basis", "observed", "total"];

fn csv_string(rows: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    rows(&mut w).expect("writing CSV to memory cannot fail");
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV output is UTF-8")
}

/// `t,concurrence,norm` rows.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    csv_string(|w| {
        w.write_record(TRAJECTORY_HEADER)?;
        for i in 0..traj.len() {
            w.write_record([
                sig6(traj.times[i]),
                sig6(traj.concurrence[i]),
                sig6(traj.unnormalized_norm[i]),
            ])?;
        }
        Ok(())
    })
}

#[derive(Serialize)]
struct TrajectoryJson<'a> {
    t: &'a [f64],
    concurrence: &'a [f64],
    norm: &'a [f64],
}

pub fn trajectory_json(traj: &Trajectory) -> String {
    serde_json::to_string_pretty(&TrajectoryJson {
        t: &traj.times,
        concurrence: &traj.concurrence,
        norm: &traj.unnormalized_norm,
    })
    .expect("trajectory serializes")
}

pub fn counts_csv(counts: &[CountRecord]) -> String {
    csv_string(|w| {
        w.write_record(COUNTS_HEADER)?;
        for r in counts {
            w.write_record([r.basis.to_string(), r.observed.to_string(), r.total.to_string()])?;
        }
        Ok(())
    })
}

#[derive(Deserialize)]
struct CountRow {
    basis: String,
    observed: u64,
    total: u64,
}

/// Parses a `basis,observed,total` count file. `origin` is only used in
/// error messages.
pub fn parse_counts(text: &str, origin: &Path) -> Result<Vec<CountRecord>, CliError> {
    let parse_err = |message: String| CliError::Parse {
        path: origin.to_path_buf(),
        message,
    };
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| parse_err(e.to_string()))?;
    if header.iter().collect::<Vec<_>>() != COUNTS_HEADER {
        return Err(parse_err(format!("expected header `{}`", COUNTS_HEADER.join(","))));
    }
    let mut records = Vec::new();
    for (line, row) in reader.deserialize::<CountRow>().enumerate() {
        let row = row.map_err(|e| parse_err(e.to_string()))?;
        let basis: BasisLabel = row
            .basis
            .parse()
            .map_err(|_| parse_err(format!("row {}: unknown basis `{}`", line + 1, row.basis)))?;
        records.push(CountRecord {
            basis,
            expected: None,
            observed: row.observed,
            total: row.total,
        });
    }
    Ok(records)
}

pub fn read_counts(path: &Path) -> Result<Vec<CountRecord>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_counts(&text, path)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexEntry {
    pub re: f64,
    pub im: f64,
}

/// Serialized MLE result; `rho` holds the 16 entries row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MleJson {
    pub rho: Vec<ComplexEntry>,
    pub log_likelihood: f64,
    pub iterations: usize,
}

impl From<&MleResult> for MleJson {
    fn from(r: &MleResult) -> Self {
        let m = r.rho_hat.matrix();
        Self {
            rho: m.0.iter().flatten().map(|z| ComplexEntry { re: z.re, im: z.im }).collect(),
            log_likelihood: r.log_likelihood,
            iterations: r.iterations,
        }
    }
}

impl MleJson {
    pub fn density_matrix(&self) -> Result<DensityMatrix, CliError> {
        if self.rho.len() != 16 {
            return Err(CliError::Usage(format!(
                "density matrix needs 16 entries, found {}",
                self.rho.len()
            )));
        }
        let m = Matrix::<4>::from_fn(|i, j| {
            let e = self.rho[4 * i + j];
            C64::new(e.re, e.im)
        });
        Ok(DensityMatrix::new(m)?)
    }
}

pub fn mle_json(r: &MleResult) -> String {
    serde_json::to_string_pretty(&MleJson::from(r)).expect("MLE result serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use aptsim_core::tomography::{mle_reconstruct, noiseless_counts};

    #[test]
    fn counts_round_trip() {
        let counts = noiseless_counts(&DensityMatrix::bell(), 1000).unwrap();
        let text = counts_csv(&counts);
        assert!(text.starts_with("basis,observed,total\nHH,0,1000\nHV,500,1000\n"));
        let back = parse_counts(&text, Path::new("mem")).unwrap();
        assert_eq!(back.len(), 16);
        for (a, b) in counts.iter().zip(&back) {
            assert_eq!((a.basis, a.observed, a.total), (b.basis, b.observed, b.total));
            assert_eq!(b.expected, None);
        }
    }

    #[test]
    fn counts_rejects_bad_input() {
        let p = Path::new("mem");
        assert!(parse_counts("b,o,t\nHH,1,2\n", p).is_err());
        assert!(parse_counts("basis,observed,total\nXX,1,2\n", p).is_err());
        assert!(parse_counts("basis,observed,total\nHH,-1,2\n", p).is_err());
    }

    #[test]
    fn mle_json_round_trip() {
        let counts = noiseless_counts(&DensityMatrix::bell(), 10_000).unwrap();
        let r = mle_reconstruct(&counts).unwrap();
        let text = mle_json(&r);
        let parsed: MleJson = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed.rho.len(), 16);
        let rho = parsed.density_matrix().unwrap();
        assert!(rho.matrix().max_abs_diff(r.rho_hat.matrix()) < 1e-12);
    }
}
