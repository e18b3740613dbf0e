use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{Axis, Cell, PerturbationEnsembleResult, SweepGrid};
use crate::dynamics::csv_err;
use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
struct SweepRow {
    x_name: String,
    x_value: f64,
    d: f64,
    entropy_mean: f64,
    entropy_std: f64,
    replicates: usize,
}

#[derive(Debug, Serialize)]
struct EnsembleRow {
    step: usize,
    hamming_mean: f64,
    hamming_std: f64,
    energy_mean: f64,
    energy_std: f64,
    activity_mean: Option<f64>,
    activity_std: Option<f64>,
    entropy_mean: f64,
    entropy_std: f64,
}

/// One row per cell, x-major, with header
/// `x_name,x_value,d,entropy_mean,entropy_std,replicates`.
pub fn write_sweep_csv<W: Write>(grid: &SweepGrid, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for c in &grid.cells {
        w.serialize(SweepRow {
            x_name: grid.x_axis.name.clone(),
            x_value: c.x,
            d: c.d,
            entropy_mean: c.entropy_mean,
            entropy_std: c.entropy_std,
            replicates: c.replicates,
        })
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io("<sweep csv>", e))
}

fn schema_error(reason: impl Into<String>) -> Error {
    Error::Config {
        key: "sweep csv".into(),
        reason: reason.into(),
    }
}

/// Parses a sweep CSV back into a grid (without `base_config`).
pub fn read_sweep_csv<R: Read>(input: R) -> Result<SweepGrid> {
    let mut rows = Vec::new();
    for row in csv::Reader::from_reader(input).deserialize::<SweepRow>() {
        rows.push(row.map_err(csv_err)?);
    }
    let first = rows.first().ok_or_else(|| schema_error("no data rows"))?;
    let x_name = first.x_name.clone();
    if rows.iter().any(|r| r.x_name != x_name) {
        return Err(schema_error("mixed x_name values"));
    }
    let mut xs: Vec<f64> = Vec::new();
    let mut ds: Vec<f64> = Vec::new();
    for r in &rows {
        if !xs.contains(&r.x_value) {
            xs.push(r.x_value);
        }
        if !ds.contains(&r.d) {
            ds.push(r.d);
        }
    }
    xs.sort_by(f64::total_cmp);
    ds.sort_by(f64::total_cmp);
    let (nx, ny) = (xs.len(), ds.len());
    if rows.len() != nx * ny {
        return Err(schema_error(format!(
            "{} rows do not form a full {nx} x {ny} grid",
            rows.len()
        )));
    }
    let mut cells: Vec<Option<Cell>> = vec![None; nx * ny];
    for r in &rows {
        let ix = xs
            .iter()
            .position(|&v| v == r.x_value)
            .expect("collected above");
        let iy = ds.iter().position(|&v| v == r.d).expect("collected above");
        let slot = &mut cells[ix * ny + iy];
        if slot.is_some() {
            return Err(schema_error(format!(
                "duplicate cell ({}, {})",
                r.x_value, r.d
            )));
        }
        *slot = Some(Cell {
            x: r.x_value,
            d: r.d,
            entropy_mean: r.entropy_mean,
            entropy_std: r.entropy_std,
            replicates: r.replicates,
        });
    }
    let cells: Vec<Cell> = cells.into_iter().map(|c| c.expect("full grid")).collect();
    let replicates = cells.iter().map(|c| c.replicates).min().unwrap_or(0);
    Ok(SweepGrid {
        x_axis: Axis {
            name: x_name,
            values: xs,
        },
        y_axis: Axis {
            name: "d".into(),
            values: ds,
        },
        cells,
        replicates,
        base_config: None,
    })
}

/// Per-step ensemble statistics; activity columns are empty at step 0.
pub fn write_ensemble_csv<W: Write>(result: &PerturbationEnsembleResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for (step, s) in result.steps.iter().enumerate() {
        w.serialize(EnsembleRow {
            step,
            hamming_mean: s.hamming.mean,
            hamming_std: s.hamming.std,
            energy_mean: s.energy.mean,
            energy_std: s.energy.std,
            activity_mean: s.activity.map(|a| a.mean),
            activity_std: s.activity.map(|a| a.std),
            entropy_mean: s.entropy.mean,
            entropy_std: s.entropy.std,
        })
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io("<ensemble csv>", e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{
        run_perturbation_ensemble, run_sweep, EnsembleSpec, SweepKind, SweepSpec,
    };

    #[test]
    fn sweep_csv_round_trip() {
        let spec = SweepSpec {
            n_neurons: 64,
            horizon: 12,
            burn_in: 4,
            replicates: 2,
            ..SweepSpec::new(SweepKind::Phase, vec![2.0, 8.0, 20.0], vec![0.0, 0.2])
        };
        let grid = run_sweep(&spec).unwrap();
        let mut buf = Vec::new();
        write_sweep_csv(&grid, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("x_name,x_value,d,entropy_mean,entropy_std,replicates\n"));
        assert_eq!(text.lines().count(), 7);
        let back = read_sweep_csv(buf.as_slice()).unwrap();
        assert_eq!(back.cells, grid.cells);
        assert_eq!(back.x_axis, grid.x_axis);
    }

    #[test]
    fn rejects_ragged_or_empty() {
        let header = "x_name,x_value,d,entropy_mean,entropy_std,replicates\n";
        assert!(read_sweep_csv(header.as_bytes()).is_err());
        let ragged = format!("{header}k,1,0.1,0.5,0,1\nk,2,0.1,0.5,0,1\nk,2,0.2,0.5,0,1\n");
        assert!(read_sweep_csv(ragged.as_bytes()).is_err());
    }

    #[test]
    fn ensemble_csv_header() {
        let spec = EnsembleSpec {
            n_neurons: 50,
            copies: 3,
            horizon: 4,
            ..EnsembleSpec::new(5.0, 0.1)
        };
        let r = run_perturbation_ensemble(&spec).unwrap();
        let mut buf = Vec::new();
        write_ensemble_csv(&r, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "step,hamming_mean,hamming_std,energy_mean,energy_std,activity_mean,activity_std,entropy_mean,entropy_std"
        );
        assert!(lines.next().unwrap().contains(",,"));
        assert_eq!(text.lines().count(), 6);
    }
}
