//! Synchronous sign-threshold dynamics.
//!
//! `x_i[n+1] = sgn(sum_j W_ij x_j[n] + u[n] + nu * scale * xi_i[n])`, where
//! `u[n]` is broadcast to all neurons and `xi_i[n]` is an independent
//! standard normal draw per neuron per step. The recurrent part of the
//! field is computed in exact integer arithmetic.

pub mod state;

use std::io::Write;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::IndicatorSeries;
use crate::reservoir::{Reservoir, ReservoirParams};
use crate::rng::SimRng;
use crate::signals::SignalSpec;
pub use state::State;

/// What a neuron does when its total field is exactly zero.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroFieldRule {
    /// `sgn(0) = +1`.
    #[default]
    Positive,
    /// Keep the neuron's previous value.
    Hold,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepConfig {
    pub noise_gain: f64,
    pub input_value: f64,
    /// Factor multiplying `noise_gain`; the reservoir's mean degree.
    pub noise_scaling: f64,
    pub zero_field: ZeroFieldRule,
}

impl StepConfig {
    pub fn autonomous() -> Self {
        StepConfig {
            noise_gain: 0.0,
            input_value: 0.0,
            noise_scaling: 0.0,
            zero_field: ZeroFieldRule::Positive,
        }
    }

    /// Noise scaled by the reservoir's mean-degree hyperparameter.
    pub fn for_reservoir(reservoir: &Reservoir, noise_gain: f64, input_value: f64) -> Self {
        StepConfig {
            noise_gain,
            input_value,
            noise_scaling: reservoir.params().mean_degree,
            zero_field: ZeroFieldRule::Positive,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.noise_gain.is_finite() && self.noise_gain >= 0.0) {
            return Err(Error::domain(
                "noise_gain",
                format!("{} must be finite and nonnegative", self.noise_gain),
            ));
        }
        if !self.input_value.is_finite() {
            return Err(Error::domain("input_value", "must be finite"));
        }
        if !self.noise_scaling.is_finite() {
            return Err(Error::domain("noise_scaling", "must be finite"));
        }
        Ok(())
    }

    fn is_noisy(&self) -> bool {
        self.noise_gain > 0.0
    }
}

fn check_len(reservoir: &Reservoir, state: &State) -> Result<()> {
    if state.len() != reservoir.n_neurons() {
        return Err(Error::DimensionMismatch {
            expected: reservoir.n_neurons(),
            actual: state.len(),
        });
    }
    Ok(())
}

/// Local fields `S_i = sum_j W_ij x_j + u`.
pub fn local_field(reservoir: &Reservoir, state: &State, input_value: f64) -> Result<Vec<f64>> {
    check_len(reservoir, state)?;
    let mut field = vec![0i32; state.len()];
    reservoir.recurrent_field_into(state, &mut field);
    Ok(field.into_iter().map(|s| s as f64 + input_value).collect())
}

/// Reusable scratch space for repeated steps over one reservoir.
pub(crate) struct Stepper {
    field: Vec<i32>,
}

impl Stepper {
    pub(crate) fn new(n: usize) -> Self {
        Stepper { field: vec![0; n] }
    }

    /// Writes the image of `current` into `next`. Inputs must already be validated.
    pub(crate) fn advance(
        &mut self,
        reservoir: &Reservoir,
        current: &State,
        cfg: &StepConfig,
        rng: Option<&mut SimRng>,
        next: &mut State,
    ) -> Result<()> {
        reservoir.recurrent_field_into(current, &mut self.field);
        let noisy = cfg.is_noisy();
        let sigma = cfg.noise_gain * cfg.noise_scaling;
        let mut rng = match (noisy, rng) {
            (true, None) => return Err(Error::MissingRng),
            (true, Some(r)) => Some(r),
            (false, _) => None,
        };
        let integral_input = cfg.input_value == 0.0;
        let prev = current.words();
        let out = next.words_mut();
        for (w, chunk) in self.field.chunks(64).enumerate() {
            // bit set where the total field is strictly positive / exactly zero
            let mut positive = 0u64;
            let mut zero = 0u64;
            for (b, &s) in chunk.iter().enumerate() {
                let (pos, zer) = if let Some(r) = rng.as_deref_mut() {
                    let xi: f64 = StandardNormal.sample(r);
                    let total = s as f64 + cfg.input_value + sigma * xi;
                    (total > 0.0, total == 0.0)
                } else if integral_input {
                    (s > 0, s == 0)
                } else {
                    let total = s as f64 + cfg.input_value;
                    (total > 0.0, total == 0.0)
                };
                positive |= (pos as u64) << b;
                zero |= (zer as u64) << b;
            }
            let tie = match cfg.zero_field {
                ZeroFieldRule::Positive => zero,
                ZeroFieldRule::Hold => zero & prev[w],
            };
            out[w] = positive | tie;
        }
        Ok(())
    }
}

/// One synchronous update. `rng` is required when the noise gain is positive.
pub fn step(
    reservoir: &Reservoir,
    state: &State,
    cfg: &StepConfig,
    rng: Option<&mut SimRng>,
) -> Result<State> {
    check_len(reservoir, state)?;
    cfg.validate()?;
    let mut next = State::all_negative(state.len());
    Stepper::new(state.len()).advance(reservoir, state, cfg, rng, &mut next)?;
    Ok(next)
}

pub fn random_initial_state(n: usize, positive_bias: f64, rng: &mut SimRng) -> Result<State> {
    State::random(n, positive_bias, rng)
}

pub fn flip_neuron(state: &State, index: usize) -> Result<State> {
    state.flipped(index)
}

/// Everything besides the reservoir and initial state that determines a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub signal: SignalSpec,
    pub noise_gain: f64,
    pub horizon: usize,
    #[serde(default)]
    pub zero_field: ZeroFieldRule,
}

impl RunConfig {
    pub fn autonomous(horizon: usize) -> Self {
        RunConfig {
            signal: SignalSpec::Zero,
            noise_gain: 0.0,
            horizon,
            zero_field: ZeroFieldRule::Positive,
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::domain("horizon", "must be at least 1"));
        }
        if !(self.noise_gain.is_finite() && self.noise_gain >= 0.0) {
            return Err(Error::domain(
                "noise_gain",
                format!("{} must be finite and nonnegative", self.noise_gain),
            ));
        }
        self.signal.validate()
    }

    pub(crate) fn step_config(&self, reservoir: &Reservoir, n: usize) -> StepConfig {
        StepConfig {
            noise_gain: self.noise_gain,
            input_value: self.signal.sample(n as u64),
            noise_scaling: reservoir.params().mean_degree,
            zero_field: self.zero_field,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSnapshot {
    pub reservoir: ReservoirParams,
    pub run: RunConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// States for `n = 0..=horizon`.
    pub states: Vec<State>,
    pub indicators: IndicatorSeries,
    pub params_snapshot: RunSnapshot,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn horizon(&self) -> usize {
        self.states.len().saturating_sub(1)
    }

    /// First `n` with `states[n + 1] == states[n]`.
    pub fn first_fixed_point(&self) -> Option<usize> {
        self.states.windows(2).position(|w| w[0] == w[1])
    }

    /// Writes `step,energy,activity,entropy` rows; activity is empty at step 0.
    pub fn write_indicators_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["step", "energy", "activity", "entropy"])
            .map_err(csv_err)?;
        let ind = &self.indicators;
        for n in 0..self.len() {
            let activity = ind.activity[n].map(|a| a.to_string()).unwrap_or_default();
            w.write_record([
                n.to_string(),
                ind.energy[n].to_string(),
                activity,
                ind.entropy[n].to_string(),
            ])
            .map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::io("<trajectory csv>", e))
    }

    /// Raw states as `step,x0,x1,...` rows of `-1`/`1`.
    pub fn write_states_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let n = self.states.first().map_or(0, State::len);
        let mut header = vec!["step".to_string()];
        header.extend((0..n).map(|i| format!("x{i}")));
        w.write_record(&header).map_err(csv_err)?;
        for (t, s) in self.states.iter().enumerate() {
            let mut row = vec![t.to_string()];
            row.extend(s.iter().map(|v| v.to_string()));
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::io("<state csv>", e))
    }
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io("<csv>", io),
        other => Error::Config {
            key: "csv".into(),
            reason: format!("{other:?}"),
        },
    }
}

/// Iterates the dynamics for `horizon` steps, drive `u[n]` taken from `signal`.
pub fn run(
    reservoir: &Reservoir,
    initial: &State,
    signal: &SignalSpec,
    noise_gain: f64,
    horizon: usize,
    rng: Option<&mut SimRng>,
) -> Result<Trajectory> {
    let cfg = RunConfig {
        signal: signal.clone(),
        noise_gain,
        horizon,
        zero_field: ZeroFieldRule::Positive,
    };
    run_with(reservoir, initial, &cfg, rng)
}

pub fn run_with(
    reservoir: &Reservoir,
    initial: &State,
    cfg: &RunConfig,
    rng: Option<&mut SimRng>,
) -> Result<Trajectory> {
    let mut states = Vec::with_capacity(cfg.horizon + 1);
    simulate(reservoir, initial, cfg, rng, |_, s| states.push(s.clone()))?;
    let indicators = IndicatorSeries::from_states(&states);
    Ok(Trajectory {
        states,
        indicators,
        params_snapshot: RunSnapshot {
            reservoir: *reservoir.params(),
            run: cfg.clone(),
        },
    })
}

/// Drives the dynamics and hands every state `(n, x[n])`, `n = 0..=horizon`,
/// to `visit` without retaining the trajectory.
pub(crate) fn simulate(
    reservoir: &Reservoir,
    initial: &State,
    cfg: &RunConfig,
    mut rng: Option<&mut SimRng>,
    mut visit: impl FnMut(usize, &State),
) -> Result<()> {
    check_len(reservoir, initial)?;
    cfg.validate()?;
    let n = initial.len();
    let mut stepper = Stepper::new(n);
    let mut current = initial.clone();
    let mut next = State::all_negative(n);
    visit(0, &current);
    for t in 0..cfg.horizon {
        let step_cfg = cfg.step_config(reservoir, t);
        stepper.advance(
            reservoir,
            &current,
            &step_cfg,
            rng.as_deref_mut(),
            &mut next,
        )?;
        std::mem::swap(&mut current, &mut next);
        visit(t + 1, &current);
    }
    Ok(())
}
