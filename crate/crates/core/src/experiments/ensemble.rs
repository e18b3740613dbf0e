use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{simulate, RunConfig, State, ZeroFieldRule};
use crate::error::{Error, Result};
use crate::metrics::{self, MeanStd};
use crate::reservoir::{generate_reservoir, ReservoirParams};
use crate::rng::{self, streams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub n_neurons: usize,
    pub mean_degree: f64,
    pub asymmetry: f64,
    /// Probability that a neuron of the reference initial state is `+1`.
    pub bias: f64,
    pub copies: usize,
    pub horizon: usize,
    pub seed: u64,
    #[serde(default)]
    pub zero_field: ZeroFieldRule,
}

impl EnsembleSpec {
    pub fn new(mean_degree: f64, asymmetry: f64) -> Self {
        EnsembleSpec {
            n_neurons: 1000,
            mean_degree,
            asymmetry,
            bias: 0.6,
            copies: 50,
            horizon: 300,
            seed: 0,
            zero_field: ZeroFieldRule::Positive,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStep {
    pub hamming: MeanStd,
    pub energy: MeanStd,
    /// Absent at step 0.
    pub activity: Option<MeanStd>,
    pub entropy: MeanStd,
}

/// Per-step statistics across the perturbed copies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationEnsembleResult {
    pub config: EnsembleSpec,
    pub steps: Vec<EnsembleStep>,
    /// Neuron flipped in each copy, in copy order.
    pub flipped: Vec<usize>,
}

impl PerturbationEnsembleResult {
    pub fn final_step(&self) -> &EnsembleStep {
        self.steps.last().expect("ensemble has at least one step")
    }
}

struct MemberSeries {
    hamming: Vec<f64>,
    energy: Vec<f64>,
    activity: Vec<f64>,
    entropy: Vec<f64>,
}

/// Runs one reference trajectory and `copies` trajectories whose initial
/// state differs from it in a single neuron, all on the same reservoir.
pub fn run_perturbation_ensemble(spec: &EnsembleSpec) -> Result<PerturbationEnsembleResult> {
    if spec.copies == 0 {
        return Err(Error::domain("copies", "must be at least 1"));
    }
    if spec.copies > spec.n_neurons {
        return Err(Error::domain(
            "copies",
            format!("{} exceeds neuron count {}", spec.copies, spec.n_neurons),
        ));
    }
    let reservoir = generate_reservoir(ReservoirParams::new(
        spec.n_neurons,
        spec.mean_degree,
        spec.asymmetry,
        spec.seed,
    ))?;
    let cfg = RunConfig {
        zero_field: spec.zero_field,
        ..RunConfig::autonomous(spec.horizon)
    };
    let initial = State::random(
        spec.n_neurons,
        spec.bias,
        &mut rng::stream(spec.seed, streams::INITIAL_STATE),
    )?;
    let flipped = index::sample(
        &mut rng::stream(spec.seed, streams::PERTURBATION),
        spec.n_neurons,
        spec.copies,
    )
    .into_vec();

    let mut reference = Vec::with_capacity(spec.horizon + 1);
    simulate(&reservoir, &initial, &cfg, None, |_, s| {
        reference.push(s.clone())
    })?;

    let members: Vec<MemberSeries> = flipped
        .par_iter()
        .map(|&i| {
            let start = initial.flipped(i)?;
            let len = spec.horizon + 1;
            let mut m = MemberSeries {
                hamming: Vec::with_capacity(len),
                energy: Vec::with_capacity(len),
                activity: Vec::with_capacity(len),
                entropy: Vec::with_capacity(len),
            };
            let mut previous: Option<State> = None;
            simulate(&reservoir, &start, &cfg, None, |n, s| {
                m.hamming
                    .push(s.differing(&reference[n]) as f64 / s.len() as f64);
                m.energy.push(metrics::energy(s));
                m.entropy.push(metrics::entropy(s));
                if let Some(p) = &previous {
                    m.activity.push(s.differing(p) as f64 / s.len() as f64);
                }
                previous = Some(s.clone());
            })?;
            Ok(m)
        })
        .collect::<Result<_>>()?;

    let across = |n: usize, pick: &dyn Fn(&MemberSeries) -> &Vec<f64>| {
        MeanStd::of(&members.iter().map(|m| pick(m)[n]).collect::<Vec<_>>())
    };
    let steps = (0..=spec.horizon)
        .map(|n| EnsembleStep {
            hamming: across(n, &|m| &m.hamming),
            energy: across(n, &|m| &m.energy),
            activity: (n > 0).then(|| across(n - 1, &|m| &m.activity)),
            entropy: across(n, &|m| &m.entropy),
        })
        .collect();
    Ok(PerturbationEnsembleResult {
        config: spec.clone(),
        steps,
        flipped,
    })
}
