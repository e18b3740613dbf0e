//! Trajectory indicators: entropy, energy, activity and Hamming distance.

use serde::{Deserialize, Serialize};

use crate::dynamics::{State, Trajectory};
use crate::error::{Error, Result};

/// Fraction of neurons at `+1`.
pub fn positive_fraction(state: &State) -> f64 {
    if state.is_empty() {
        return 0.0;
    }
    state.count_positive() as f64 / state.len() as f64
}

fn entropy_term(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        -p * p.log2()
    }
}

/// Binary Shannon entropy (base 2) of the positive fraction, in `[0, 1]`.
///
/// Evaluated from the minority count, so a state and its negation give
/// bit-identical values.
pub fn entropy(state: &State) -> f64 {
    if state.is_empty() {
        return 0.0;
    }
    let n = state.len();
    let positive = state.count_positive();
    let minority = positive.min(n - positive);
    let lo = minority as f64 / n as f64;
    let hi = (n - minority) as f64 / n as f64;
    (entropy_term(lo) + entropy_term(hi)).clamp(0.0, 1.0)
}

pub fn binary_entropy(rho: f64) -> f64 {
    (entropy_term(rho) + entropy_term(1.0 - rho)).clamp(0.0, 1.0)
}

/// Mean of the `+-1` entries, `2 rho - 1`.
pub fn energy(state: &State) -> f64 {
    if state.is_empty() {
        return 0.0;
    }
    2.0 * positive_fraction(state) - 1.0
}

/// Normalized Hamming distance.
pub fn hamming(a: &State, b: &State) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    if a.is_empty() {
        return Ok(0.0);
    }
    Ok(a.differing(b) as f64 / a.len() as f64)
}

/// Fraction of neurons that changed between steps `n - 1` and `n`.
pub fn activity(trajectory: &Trajectory, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::ActivityAtStepZero);
    }
    if n >= trajectory.len() {
        return Err(Error::IndexOutOfRange {
            index: n,
            len: trajectory.len(),
        });
    }
    hamming(&trajectory.states[n], &trajectory.states[n - 1])
}

/// Time-averaged entropy over steps `t0..=t_end`, normalized by the number
/// of summed terms.
pub fn mean_entropy(trajectory: &Trajectory, t0: usize, t_end: usize) -> Result<f64> {
    mean_entropy_of(&trajectory.states, t0, t_end)
}

pub fn mean_entropy_of(states: &[State], t0: usize, t_end: usize) -> Result<f64> {
    check_window(t0, t_end, states.len())?;
    let window = &states[t0..=t_end];
    Ok(window.iter().map(entropy).sum::<f64>() / window.len() as f64)
}

pub(crate) fn check_window(t0: usize, t_end: usize, len: usize) -> Result<()> {
    if t0 >= t_end || t_end >= len {
        return Err(Error::EmptyWindow { t0, t_end, len });
    }
    Ok(())
}

/// Per-step indicator values of one trajectory.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IndicatorSeries {
    pub energy: Vec<f64>,
    /// `None` at step 0, where activity is undefined.
    pub activity: Vec<Option<f64>>,
    pub entropy: Vec<f64>,
    pub hamming_to_reference: Option<Vec<f64>>,
}

impl IndicatorSeries {
    pub fn from_states(states: &[State]) -> Self {
        let activity = (0..states.len())
            .map(|n| {
                (n > 0).then(|| {
                    states[n].differing(&states[n - 1]) as f64 / states[n].len().max(1) as f64
                })
            })
            .collect();
        IndicatorSeries {
            energy: states.iter().map(energy).collect(),
            activity,
            entropy: states.iter().map(entropy).collect(),
            hamming_to_reference: None,
        }
    }

    /// Adds the distance of each state to the matching state of `reference`.
    pub fn with_reference(mut self, states: &[State], reference: &[State]) -> Result<Self> {
        if states.len() != reference.len() {
            return Err(Error::DimensionMismatch {
                expected: reference.len(),
                actual: states.len(),
            });
        }
        let d = states
            .iter()
            .zip(reference)
            .map(|(a, b)| hamming(a, b))
            .collect::<Result<Vec<_>>>()?;
        self.hamming_to_reference = Some(d);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.energy.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energy.is_empty()
    }
}

/// Sample mean and population standard deviation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    pub fn of(values: &[f64]) -> Self {
        if values.is_empty() {
            return MeanStd {
                mean: f64::NAN,
                std: f64::NAN,
            };
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        MeanStd {
            mean,
            std: var.sqrt(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{RunConfig, RunSnapshot};
    use crate::reservoir::ReservoirParams;
    use crate::rng;

    fn traj(states: Vec<State>) -> Trajectory {
        let indicators = IndicatorSeries::from_states(&states);
        Trajectory {
            states,
            indicators,
            params_snapshot: RunSnapshot {
                reservoir: ReservoirParams::new(1, 0.0, 0.0, 0),
                run: RunConfig::autonomous(1),
            },
        }
    }

    fn half(n: usize) -> State {
        let signs: Vec<i8> = (0..n).map(|i| if i < n / 2 { 1 } else { -1 }).collect();
        State::from_signs(&signs).unwrap()
    }

    #[test]
    fn entropy_values() {
        assert_eq!(entropy(&State::all_positive(8)), 0.0);
        assert_eq!(entropy(&half(8)), 1.0);
        let quarter = State::from_signs(&[1, -1, -1, -1]).unwrap();
        // -(1/4)log2(1/4) - (3/4)log2(3/4)
        assert!((entropy(&quarter) - 0.811_278_124_459_132_8).abs() < 1e-15);
    }

    #[test]
    fn energy_values() {
        assert_eq!(energy(&State::all_positive(5)), 1.0);
        assert_eq!(energy(&half(10)), 0.0);
        let s = State::random(10_000, 0.6, &mut rng::stream(4, 1)).unwrap();
        assert!((energy(&s) - 0.2).abs() <= 3.0 * 2.0 * (0.24f64 / 10_000.0).sqrt());
    }

    #[test]
    fn hamming_values() {
        let x = half(10);
        assert_eq!(hamming(&x, &x).unwrap(), 0.0);
        assert_eq!(hamming(&x, &x.negated()).unwrap(), 1.0);
        assert!(hamming(&x, &State::all_positive(9)).is_err());
        let mut r = rng::stream(6, 1);
        let a = State::random(10_000, 0.5, &mut r).unwrap();
        let b = State::random(10_000, 0.5, &mut r).unwrap();
        assert!((hamming(&a, &b).unwrap() - 0.5).abs() <= 3.0 * (0.25f64 / 10_000.0).sqrt());
    }

    #[test]
    fn flip_changes_one_position() {
        let x = half(16);
        for i in 0..16 {
            assert_eq!(hamming(&x, &x.flipped(i).unwrap()).unwrap(), 1.0 / 16.0);
        }
    }

    #[test]
    fn activity_values() {
        let fixed = traj(vec![half(4); 4]);
        assert_eq!(activity(&fixed, 2).unwrap(), 0.0);
        assert!(matches!(
            activity(&fixed, 0),
            Err(Error::ActivityAtStepZero)
        ));
        let x = half(4);
        let flip = traj(vec![x.clone(), x.negated(), x.clone(), x.negated()]);
        for n in 1..4 {
            assert_eq!(activity(&flip, n).unwrap(), 1.0);
        }
    }

    #[test]
    fn mean_entropy_values() {
        let frozen = traj(vec![State::all_positive(6); 10]);
        assert_eq!(mean_entropy(&frozen, 2, 9).unwrap(), 0.0);
        let x = half(6);
        let alt = traj(
            (0..10)
                .map(|n| if n % 2 == 0 { x.clone() } else { x.negated() })
                .collect(),
        );
        assert_eq!(mean_entropy(&alt, 0, 9).unwrap(), 1.0);
        assert!(matches!(
            mean_entropy(&alt, 5, 5),
            Err(Error::EmptyWindow { .. })
        ));
        assert!(matches!(
            mean_entropy(&alt, 0, 10),
            Err(Error::EmptyWindow { .. })
        ));
    }

    #[test]
    fn window_counts_every_term() {
        // entropies 0, 1, 1 over the window: mean must be 2/3, not 2/2
        let x = half(4);
        let t = traj(vec![
            State::all_positive(4),
            State::all_positive(4),
            x.clone(),
            x,
        ]);
        assert!((mean_entropy(&t, 1, 3).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn mean_std() {
        let m = MeanStd::of(&[1.0, 3.0]);
        assert_eq!(m.mean, 2.0);
        assert_eq!(m.std, 1.0);
    }
}
