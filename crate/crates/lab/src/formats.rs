//! CSV and JSON artifacts. Floats are written with `{}` (shortest
//! round-trip form) so identical runs give identical bytes.

use std::fs;
use std::io::Write;
use std::path::Path;

use dirac_core::angular::AngularIndex;
use dirac_core::radial::{RadialGrid, RadialPair};
use dirac_core::C64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, LabResult};

/// Writes `bytes` next to `path` and renames into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> LabResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    {
        let mut f = fs::File::create(&tmp).map_err(|e| LabError::io(&tmp, e))?;
        f.write_all(bytes).map_err(|e| LabError::io(&tmp, e))?;
        f.sync_all().map_err(|e| LabError::io(&tmp, e))?;
    }
    fs::rename(&tmp, path).map_err(|e| LabError::io(path, e))
}

/// A numeric table with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> LabResult<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format!("{v}")))?;
        }
        w.into_inner().map_err(|e| LabError::Runtime(e.to_string()))
    }

    pub fn from_csv(bytes: &[u8]) -> LabResult<Self> {
        let mut r = csv::Reader::from_reader(bytes);
        let columns = r.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|s| s.parse::<f64>().map_err(|e| LabError::Runtime(format!("bad number `{s}`: {e}"))))
                .collect::<LabResult<Vec<f64>>>()?;
            rows.push(row);
        }
        Ok(Table { columns, rows })
    }

    pub fn write(&self, path: &Path) -> LabResult<()> {
        write_atomic(path, &self.to_csv()?)
    }
}

/// JSON sidecar describing a radial state CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateHeader {
    pub two_j: u32,
    pub two_mj: i32,
    pub kappa: i32,
    pub radius: f64,
    pub cells: usize,
    pub time: f64,
}

pub const STATE_COLUMNS: [&str; 5] = ["r", "re_plus", "im_plus", "re_minus", "im_minus"];

pub fn state_table(state: &RadialPair) -> Table {
    let mut t = Table::new(&STATE_COLUMNS);
    for (i, r) in state.grid().nodes().into_iter().enumerate() {
        let (p, m) = (state.plus()[i], state.minus()[i]);
        t.push(vec![r, p.re, p.im, m.re, m.im]);
    }
    t
}

pub fn state_header(state: &RadialPair, time: f64) -> StateHeader {
    let idx = state.idx();
    StateHeader {
        two_j: idx.two_j(),
        two_mj: idx.two_mj(),
        kappa: idx.kappa(),
        radius: state.grid().radius(),
        cells: state.grid().len(),
        time,
    }
}

/// Writes `<stem>.csv` and `<stem>.json`; returns the two file names.
pub fn write_state(dir: &Path, stem: &str, state: &RadialPair, time: f64) -> LabResult<[String; 2]> {
    let csv_name = format!("{stem}.csv");
    let json_name = format!("{stem}.json");
    state_table(state).write(&dir.join(&csv_name))?;
    let header = serde_json::to_vec_pretty(&state_header(state, time))?;
    write_atomic(&dir.join(&json_name), &header)?;
    Ok([csv_name, json_name])
}

pub fn read_state(header: &StateHeader, csv_bytes: &[u8]) -> LabResult<RadialPair> {
    let table = Table::from_csv(csv_bytes)?;
    if table.columns != STATE_COLUMNS {
        return Err(LabError::Runtime(format!("unexpected state columns {:?}", table.columns)));
    }
    let idx = AngularIndex::new(header.two_j, header.two_mj, header.kappa)?;
    let grid = RadialGrid::new(header.radius, header.cells)?;
    let plus = table.rows.iter().map(|r| C64::new(r[1], r[2])).collect();
    let minus = table.rows.iter().map(|r| C64::new(r[3], r[4])).collect();
    Ok(RadialPair::new(idx, grid, plus, minus)?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> LabResult<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_round_trip_is_exact() {
        let idx = AngularIndex::new(1, -1, 1).unwrap();
        let grid = RadialGrid::new(5.0, 64).unwrap();
        let s = RadialPair::from_fn(idx, grid, |r| (C64::new(r.sin() / 3.0, 1e-17 * r), C64::new(-r.exp().recip(), 0.1)));
        let t = state_table(&s);
        let back = read_state(&state_header(&s, 0.5), &t.to_csv().unwrap()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn csv_uses_shortest_float_form() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![0.1, 2.0]);
        assert_eq!(String::from_utf8(t.to_csv().unwrap()).unwrap(), "a,b\n0.1,2\n");
    }

    #[test]
    fn atomic_write_leaves_no_temp_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested").join("x.csv");
        write_atomic(&path, b"1\n").unwrap();
        write_atomic(&path, b"2\n").unwrap();
        assert_eq!(fs::read(&path).unwrap(), b"2\n");
        assert!(!dir.path().join("nested").join("x.csv.tmp").exists());
    }
}
