use serde::{Deserialize, Serialize};

use super::SweepGrid;
use crate::error::{Error, Result};

/// Entropy level separating ordered from chaotic cells.
pub const DEFAULT_THRESHOLD: f64 = 0.5;

// Largest step-to-step rise along d tolerated before a column is flagged.
const MONOTONE_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoCrossing {
    /// Every value is at or above the threshold.
    AllAbove,
    /// Every value is below the threshold.
    AllBelow,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub x: f64,
    pub d_star: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExcludedColumn {
    pub x: f64,
    pub reason: NoCrossing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitRange {
    /// Columns whose crossing moved more than one d-cell away from the first
    /// column's crossing; all crossing columns if fewer than two qualify.
    #[default]
    Auto,
    All,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryFit {
    pub threshold: f64,
    pub crossing_points: Vec<Crossing>,
    /// x values of the crossings used in the least-squares line.
    pub fitted_x: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fitted crossings.
    pub residual: f64,
    pub excluded: Vec<ExcludedColumn>,
    pub non_monotone: Vec<f64>,
}

impl BoundaryFit {
    pub fn predict(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }
}

/// Linear interpolation of the first place where `values` crosses `threshold`.
pub fn first_crossing(
    coords: &[f64],
    values: &[f64],
    threshold: f64,
) -> std::result::Result<f64, NoCrossing> {
    for i in 0..values.len().saturating_sub(1) {
        let (a, b) = (values[i], values[i + 1]);
        if (a >= threshold) != (b >= threshold) {
            let t = (threshold - a) / (b - a);
            return Ok(coords[i] + t * (coords[i + 1] - coords[i]));
        }
    }
    if values.iter().all(|&v| v >= threshold) {
        Err(NoCrossing::AllAbove)
    } else {
        Err(NoCrossing::AllBelow)
    }
}

/// Per x column, the d at which the entropy profile crosses `threshold`.
pub fn crossings_along_d(
    grid: &SweepGrid,
    threshold: f64,
) -> Vec<(f64, std::result::Result<f64, NoCrossing>)> {
    (0..grid.nx())
        .map(|ix| {
            let x = grid.x_axis.values[ix];
            (
                x,
                first_crossing(&grid.y_axis.values, &grid.column(ix), threshold),
            )
        })
        .collect()
}

/// Per d row, the x at which the entropy profile crosses `threshold`.
pub fn crossings_along_x(
    grid: &SweepGrid,
    threshold: f64,
) -> Vec<(f64, std::result::Result<f64, NoCrossing>)> {
    (0..grid.ny())
        .map(|iy| {
            let d = grid.y_axis.values[iy];
            (
                d,
                first_crossing(&grid.x_axis.values, &grid.row(iy), threshold),
            )
        })
        .collect()
}

fn mean_spacing(values: &[f64]) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => (values[n - 1] - values[0]).abs() / (n - 1) as f64,
    }
}

fn least_squares(points: &[Crossing]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.x).sum::<f64>() / n;
    let my = points.iter().map(|p| p.d_star).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return (0.0, my);
    }
    let sxy: f64 = points.iter().map(|p| (p.x - mx) * (p.d_star - my)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Boundary fit with the automatic intermediate-regime selection.
pub fn extract_boundary(grid: &SweepGrid, threshold: f64) -> Result<BoundaryFit> {
    extract_boundary_with(grid, threshold, FitRange::Auto)
}

pub fn extract_boundary_with(
    grid: &SweepGrid,
    threshold: f64,
    range: FitRange,
) -> Result<BoundaryFit> {
    let mut crossing_points = Vec::new();
    let mut excluded = Vec::new();
    for (x, c) in crossings_along_d(grid, threshold) {
        match c {
            Ok(d_star) => crossing_points.push(Crossing { x, d_star }),
            Err(reason) => excluded.push(ExcludedColumn { x, reason }),
        }
    }
    let non_monotone = (0..grid.nx())
        .filter(|&ix| {
            grid.column(ix)
                .windows(2)
                .any(|w| w[1] - w[0] > MONOTONE_TOLERANCE)
        })
        .map(|ix| grid.x_axis.values[ix])
        .collect();
    if crossing_points.is_empty() {
        return Err(Error::domain(
            "grid",
            format!("no column crosses entropy {threshold}"),
        ));
    }

    let fitted: Vec<Crossing> = match range {
        FitRange::All => crossing_points.clone(),
        FitRange::Auto => {
            let cell = mean_spacing(&grid.y_axis.values);
            let reference = grid
                .x_axis
                .values
                .first()
                .and_then(|&x0| crossing_points.iter().find(|p| p.x == x0))
                .map(|p| p.d_star);
            let moved: Vec<Crossing> = match reference {
                Some(d0) => crossing_points
                    .iter()
                    .copied()
                    .filter(|p| (p.d_star - d0).abs() > cell)
                    .collect(),
                None => Vec::new(),
            };
            if moved.len() >= 2 {
                moved
            } else {
                crossing_points.clone()
            }
        }
    };
    let (slope, intercept) = least_squares(&fitted);
    let residual = (fitted
        .iter()
        .map(|p| (p.d_star - (slope * p.x + intercept)).powi(2))
        .sum::<f64>()
        / fitted.len() as f64)
        .sqrt();
    Ok(BoundaryFit {
        threshold,
        fitted_x: fitted.iter().map(|p| p.x).collect(),
        crossing_points,
        slope,
        intercept,
        residual,
        excluded,
        non_monotone,
    })
}

/// Length of the coordinate set on which the piecewise-linear interpolation
/// of `values` lies strictly between `lo` and `hi`.
pub fn band_measure(coords: &[f64], values: &[f64], lo: f64, hi: f64) -> f64 {
    let mut total = 0.0;
    for i in 0..values.len().saturating_sub(1) {
        let width = (coords[i + 1] - coords[i]).abs();
        let (a, b) = (values[i], values[i + 1]);
        let fraction = if a == b {
            if a > lo && a < hi {
                1.0
            } else {
                0.0
            }
        } else {
            // v(t) = a + t (b - a), t in [0, 1]
            let t_lo = (lo - a) / (b - a);
            let t_hi = (hi - a) / (b - a);
            let (start, end) = if t_lo < t_hi {
                (t_lo, t_hi)
            } else {
                (t_hi, t_lo)
            };
            (end.min(1.0) - start.max(0.0)).max(0.0)
        };
        total += fraction * width;
    }
    total
}
