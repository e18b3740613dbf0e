//! Reproducible parameter sweeps and perturbation ensembles.
//!
//! Work items (one per cell and replicate, or per ensemble member) run on the
//! current rayon pool. Each item draws from streams seeded by
//! [`derive_seed`](crate::rng::derive_seed) over its coordinates, so results
//! do not depend on scheduling. Sweep seeds depend on the d index and the
//! replicate only: every x value along a row reuses the same draws.

mod boundary;
mod ensemble;
mod output;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{simulate, RunConfig, State, ZeroFieldRule};
use crate::error::{Error, Result};
use crate::metrics::{self, MeanStd};
use crate::reservoir::{generate_reservoir, ReservoirParams};
use crate::rng::{self, derive_seed, streams};
use crate::signals::{SignalKind, SignalSpec};

pub use boundary::{
    band_measure, crossings_along_d, crossings_along_x, extract_boundary, extract_boundary_with,
    first_crossing, BoundaryFit, Crossing, ExcludedColumn, FitRange, NoCrossing, DEFAULT_THRESHOLD,
};
pub use ensemble::{
    run_perturbation_ensemble, EnsembleSpec, EnsembleStep, PerturbationEnsembleResult,
};
pub use output::{read_sweep_csv, write_ensemble_csv, write_sweep_csv};

/// Which quantity the sweep's x axis varies, plus what is held fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "sweep", rename_all = "snake_case")]
pub enum SweepKind {
    /// x = mean degree, autonomous.
    Phase,
    /// x = noise gain at fixed mean degree.
    Noise { mean_degree: f64 },
    /// x = mean degree at fixed noise gain.
    NoisePhase { noise_gain: f64 },
    /// x = signal gain at fixed mean degree.
    Signal {
        mean_degree: f64,
        signal: SignalKind,
    },
}

impl SweepKind {
    pub fn x_name(&self) -> &'static str {
        match self {
            SweepKind::Phase | SweepKind::NoisePhase { .. } => "mean_degree",
            SweepKind::Noise { .. } => "noise_gain",
            SweepKind::Signal { .. } => "signal_gain",
        }
    }

    /// `(mean_degree, noise_gain, signal)` of the cell at `x`.
    fn cell_setup(&self, x: f64, seed: u64) -> (f64, f64, SignalSpec) {
        match self {
            SweepKind::Phase => (x, 0.0, SignalSpec::Zero),
            SweepKind::Noise { mean_degree } => (*mean_degree, x, SignalSpec::Zero),
            SweepKind::NoisePhase { noise_gain } => (x, *noise_gain, SignalSpec::Zero),
            SweepKind::Signal {
                mean_degree,
                signal,
            } => (*mean_degree, 0.0, SignalSpec::of_kind(*signal, x, seed)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub kind: SweepKind,
    pub x_values: Vec<f64>,
    pub d_values: Vec<f64>,
    pub n_neurons: usize,
    pub horizon: usize,
    pub burn_in: usize,
    pub replicates: usize,
    /// Probability that a neuron of a random initial state is `+1`.
    pub initial_bias: f64,
    pub master_seed: u64,
    #[serde(default)]
    pub zero_field: ZeroFieldRule,
}

impl SweepSpec {
    pub fn new(kind: SweepKind, x_values: Vec<f64>, d_values: Vec<f64>) -> Self {
        SweepSpec {
            kind,
            x_values,
            d_values,
            n_neurons: 1000,
            horizon: 300,
            burn_in: 100,
            replicates: 8,
            initial_bias: 0.5,
            master_seed: 0,
            zero_field: ZeroFieldRule::Positive,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.x_values.is_empty() || self.d_values.is_empty() {
            return Err(Error::domain("grid", "both axes need at least one value"));
        }
        if self.burn_in >= self.horizon {
            return Err(Error::domain(
                "burn_in",
                format!("{} must be below horizon {}", self.burn_in, self.horizon),
            ));
        }
        if self.replicates == 0 {
            return Err(Error::domain("replicates", "must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.initial_bias) {
            return Err(Error::domain("initial_bias", "must be a probability"));
        }
        let check_nonneg = |name, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::domain(
                    name,
                    format!("{v} must be finite and nonnegative"),
                ))
            }
        };
        match &self.kind {
            SweepKind::Phase => {}
            SweepKind::Noise { mean_degree } | SweepKind::Signal { mean_degree, .. } => {
                check_nonneg("mean_degree", *mean_degree)?
            }
            SweepKind::NoisePhase { noise_gain } => check_nonneg("noise_gain", *noise_gain)?,
        }
        for &x in &self.x_values {
            check_nonneg(self.kind.x_name(), x)?;
        }
        for &x in &self.x_values {
            for &d in &self.d_values {
                let (k, _, signal) = self.kind.cell_setup(x, 0);
                ReservoirParams::new(self.n_neurons, k, d, 0).validate()?;
                signal.validate()?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub x: f64,
    pub d: f64,
    pub entropy_mean: f64,
    pub entropy_std: f64,
    pub replicates: usize,
}

/// Replicate-averaged time-mean entropy over a 2-D grid; `d` is the y axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub x_axis: Axis,
    pub y_axis: Axis,
    /// Row-major in x: `cells[ix * ny + iy]`.
    pub cells: Vec<Cell>,
    pub replicates: usize,
    /// Absent when the grid was loaded from CSV.
    pub base_config: Option<SweepSpec>,
}

impl SweepGrid {
    pub fn nx(&self) -> usize {
        self.x_axis.values.len()
    }

    pub fn ny(&self) -> usize {
        self.y_axis.values.len()
    }

    pub fn cell(&self, ix: usize, iy: usize) -> &Cell {
        &self.cells[ix * self.ny() + iy]
    }

    /// Entropy means along d for column `ix`.
    pub fn column(&self, ix: usize) -> Vec<f64> {
        (0..self.ny())
            .map(|iy| self.cell(ix, iy).entropy_mean)
            .collect()
    }

    /// Entropy means along x for row `iy`.
    pub fn row(&self, iy: usize) -> Vec<f64> {
        (0..self.nx())
            .map(|ix| self.cell(ix, iy).entropy_mean)
            .collect()
    }
}

/// Time-mean entropy of one replicate of one cell.
pub fn cell_replicate(spec: &SweepSpec, ix: usize, iy: usize, replicate: usize) -> Result<f64> {
    let x = spec.x_values[ix];
    let d = spec.d_values[iy];
    let seed = derive_seed(spec.master_seed, &[iy as u64, replicate as u64]);
    let (mean_degree, noise_gain, signal) = spec.kind.cell_setup(x, seed);
    let reservoir = generate_reservoir(ReservoirParams::new(spec.n_neurons, mean_degree, d, seed))?;
    let initial = State::random(
        spec.n_neurons,
        spec.initial_bias,
        &mut rng::stream(seed, streams::INITIAL_STATE),
    )?;
    let cfg = RunConfig {
        signal,
        noise_gain,
        horizon: spec.horizon,
        zero_field: spec.zero_field,
    };
    let mut noise = rng::stream(seed, streams::NOISE);
    let mut total = 0.0;
    let mut terms = 0usize;
    simulate(&reservoir, &initial, &cfg, Some(&mut noise), |n, state| {
        if n >= spec.burn_in {
            total += metrics::entropy(state);
            terms += 1;
        }
    })?;
    Ok(total / terms as f64)
}

/// Runs every cell of `spec` on the current rayon pool.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepGrid> {
    spec.validate()?;
    let (nx, ny, r) = (spec.x_values.len(), spec.d_values.len(), spec.replicates);
    let values: Vec<f64> = (0..nx * ny * r)
        .into_par_iter()
        .map(|item| {
            let (ix, rest) = (item / (ny * r), item % (ny * r));
            let (iy, rep) = (rest / r, rest % r);
            cell_replicate(spec, ix, iy, rep).map_err(|e| Error::Cell {
                x: spec.x_values[ix],
                d: spec.d_values[iy],
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;
    let cells = values
        .chunks(r)
        .enumerate()
        .map(|(c, reps)| {
            let stats = MeanStd::of(reps);
            Cell {
                x: spec.x_values[c / ny],
                d: spec.d_values[c % ny],
                entropy_mean: stats.mean,
                entropy_std: stats.std,
                replicates: reps.len(),
            }
        })
        .collect();
    Ok(SweepGrid {
        x_axis: Axis {
            name: spec.kind.x_name().to_string(),
            values: spec.x_values.clone(),
        },
        y_axis: Axis {
            name: "d".to_string(),
            values: spec.d_values.clone(),
        },
        cells,
        replicates: r,
        base_config: Some(spec.clone()),
    })
}

/// Shared settings of the four sweep operations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepBase {
    pub n_neurons: usize,
    pub horizon: usize,
    pub burn_in: usize,
    pub replicates: usize,
    pub master_seed: u64,
}

impl Default for SweepBase {
    fn default() -> Self {
        SweepBase {
            n_neurons: 1000,
            horizon: 300,
            burn_in: 100,
            replicates: 8,
            master_seed: 0,
        }
    }
}

fn spec_from(kind: SweepKind, x: &[f64], d: &[f64], base: SweepBase) -> SweepSpec {
    SweepSpec {
        n_neurons: base.n_neurons,
        horizon: base.horizon,
        burn_in: base.burn_in,
        replicates: base.replicates,
        master_seed: base.master_seed,
        ..SweepSpec::new(kind, x.to_vec(), d.to_vec())
    }
}

/// Autonomous sweep over `(mean degree, d)`.
pub fn sweep_phase(mean_degrees: &[f64], d: &[f64], base: SweepBase) -> Result<SweepGrid> {
    run_sweep(&spec_from(SweepKind::Phase, mean_degrees, d, base))
}

/// Sweep over `(noise gain, d)` at fixed mean degree.
pub fn sweep_noise(
    mean_degree: f64,
    noise_gains: &[f64],
    d: &[f64],
    base: SweepBase,
) -> Result<SweepGrid> {
    run_sweep(&spec_from(
        SweepKind::Noise { mean_degree },
        noise_gains,
        d,
        base,
    ))
}

/// Sweep over `(mean degree, d)` at fixed noise gain.
pub fn sweep_noise_phase(
    noise_gain: f64,
    mean_degrees: &[f64],
    d: &[f64],
    base: SweepBase,
) -> Result<SweepGrid> {
    run_sweep(&spec_from(
        SweepKind::NoisePhase { noise_gain },
        mean_degrees,
        d,
        base,
    ))
}

/// Sweep over `(signal gain, d)` at fixed mean degree.
pub fn sweep_signal(
    mean_degree: f64,
    signal: SignalKind,
    gains: &[f64],
    d: &[f64],
    base: SweepBase,
) -> Result<SweepGrid> {
    if signal == SignalKind::Zero {
        return Err(Error::domain(
            "signal",
            "signal sweep needs white_noise or multisine",
        ));
    }
    run_sweep(&spec_from(
        SweepKind::Signal {
            mean_degree,
            signal,
        },
        gains,
        d,
        base,
    ))
}

/// `count` evenly spaced values from `start` to `end` inclusive.
pub fn linspace(start: f64, end: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![start],
        _ => (0..count)
            .map(|i| start + (end - start) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::run;

    fn toy(kind: SweepKind, x: Vec<f64>) -> SweepSpec {
        SweepSpec {
            n_neurons: 120,
            horizon: 30,
            burn_in: 10,
            replicates: 2,
            master_seed: 5,
            ..SweepSpec::new(kind, x, vec![0.0, 0.3])
        }
    }

    #[test]
    fn cell_matches_full_trajectory() {
        let spec = toy(SweepKind::Noise { mean_degree: 12.0 }, vec![0.05]);
        let seed = derive_seed(spec.master_seed, &[1, 1]);
        let reservoir = generate_reservoir(ReservoirParams::new(120, 12.0, 0.3, seed)).unwrap();
        let x0 = State::random(120, 0.5, &mut rng::stream(seed, streams::INITIAL_STATE)).unwrap();
        let mut noise = rng::stream(seed, streams::NOISE);
        let t = run(
            &reservoir,
            &x0,
            &SignalSpec::Zero,
            0.05,
            30,
            Some(&mut noise),
        )
        .unwrap();
        let expected = metrics::mean_entropy(&t, 10, 30).unwrap();
        assert_eq!(cell_replicate(&spec, 0, 1, 1).unwrap(), expected);
    }

    #[test]
    fn sweep_is_deterministic_and_complete() {
        let spec = toy(SweepKind::Phase, vec![2.0, 30.0]);
        let a = run_sweep(&spec).unwrap();
        let b = run_sweep(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.cells.len(), 4);
        assert!(a
            .cells
            .iter()
            .all(|c| c.replicates == 2 && (0.0..=1.0).contains(&c.entropy_mean)));
    }

    #[test]
    fn zero_noise_phase_equals_phase() {
        let a = run_sweep(&toy(SweepKind::Phase, vec![5.0, 40.0])).unwrap();
        let b = run_sweep(&toy(
            SweepKind::NoisePhase { noise_gain: 0.0 },
            vec![5.0, 40.0],
        ))
        .unwrap();
        assert_eq!(a.cells, b.cells);
    }

    #[test]
    fn validation_errors() {
        let mut spec = toy(SweepKind::Phase, vec![5.0]);
        spec.burn_in = 30;
        assert!(run_sweep(&spec).is_err());
        let spec = toy(SweepKind::Phase, vec![500.0]);
        assert!(run_sweep(&spec).is_err());
        let spec = toy(SweepKind::Phase, vec![]);
        assert!(run_sweep(&spec).is_err());
        assert!(
            sweep_signal(10.0, SignalKind::Zero, &[1.0], &[0.1], SweepBase::default()).is_err()
        );
    }

    #[test]
    fn linspace_endpoints() {
        assert_eq!(linspace(0.0, 1.0, 5), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(linspace(3.0, 9.0, 1), vec![3.0]);
    }
}
