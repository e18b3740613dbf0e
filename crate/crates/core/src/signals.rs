//! Scalar drive `u[n]` broadcast identically to every neuron.

use std::f64::consts::{PI, SQRT_2};

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, streams};

/// Incommensurable default frequencies in cycles per step.
pub fn default_frequencies() -> Vec<f64> {
    vec![0.02, 0.02 * SQRT_2, 0.02 * 3f64.sqrt()]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SignalSpec {
    Zero,
    /// `A * g[n]` with `g[n]` standard normal, reproducible from `(seed, n)`.
    WhiteNoise {
        gain: f64,
        seed: u64,
    },
    /// `A / normalization * sum_m sin(2 pi f_m n)`.
    Multisine {
        gain: f64,
        frequencies: Vec<f64>,
        /// Divisor applied to the sum; defaults to the number of sines.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        normalization: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalKind {
    Zero,
    WhiteNoise,
    Multisine,
}

impl std::str::FromStr for SignalKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(SignalKind::Zero),
            "white_noise" | "white-noise" => Ok(SignalKind::WhiteNoise),
            "multisine" => Ok(SignalKind::Multisine),
            other => Err(Error::domain(
                "signal kind",
                format!("unknown kind `{other}`"),
            )),
        }
    }
}

impl SignalSpec {
    pub fn white_noise(gain: f64, seed: u64) -> Self {
        SignalSpec::WhiteNoise { gain, seed }
    }

    /// Default three-sine drive normalized by the number of sines.
    pub fn multisine(gain: f64) -> Self {
        SignalSpec::Multisine {
            gain,
            frequencies: default_frequencies(),
            normalization: None,
        }
    }

    /// Builds a spec of `kind` with the given gain and seed, using default frequencies.
    pub fn of_kind(kind: SignalKind, gain: f64, seed: u64) -> Self {
        match kind {
            SignalKind::Zero => SignalSpec::Zero,
            SignalKind::WhiteNoise => SignalSpec::white_noise(gain, seed),
            SignalKind::Multisine => SignalSpec::multisine(gain),
        }
    }

    pub fn kind(&self) -> SignalKind {
        match self {
            SignalSpec::Zero => SignalKind::Zero,
            SignalSpec::WhiteNoise { .. } => SignalKind::WhiteNoise,
            SignalSpec::Multisine { .. } => SignalKind::Multisine,
        }
    }

    pub fn gain(&self) -> f64 {
        match self {
            SignalSpec::Zero => 0.0,
            SignalSpec::WhiteNoise { gain, .. } | SignalSpec::Multisine { gain, .. } => *gain,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SignalSpec::Zero => Ok(()),
            SignalSpec::WhiteNoise { gain, .. } => check_gain(*gain),
            SignalSpec::Multisine {
                gain,
                frequencies,
                normalization,
            } => {
                check_gain(*gain)?;
                if frequencies.is_empty() {
                    return Err(Error::domain("frequencies", "must be nonempty"));
                }
                if frequencies.iter().any(|f| !f.is_finite()) {
                    return Err(Error::domain("frequencies", "must be finite"));
                }
                match normalization {
                    Some(z) if !(z.is_finite() && *z > 0.0) => Err(Error::domain(
                        "normalization",
                        format!("{z} must be positive"),
                    )),
                    _ => Ok(()),
                }
            }
        }
    }

    /// Drive value at time step `n`.
    pub fn sample(&self, n: u64) -> f64 {
        match self {
            SignalSpec::Zero => 0.0,
            SignalSpec::WhiteNoise { gain, seed } => {
                let mut r = rng::stream(*seed, streams::SIGNAL_BASE.wrapping_add(n));
                let g: f64 = StandardNormal.sample(&mut r);
                gain * g
            }
            SignalSpec::Multisine {
                gain,
                frequencies,
                normalization,
            } => {
                let norm = normalization.unwrap_or(frequencies.len() as f64);
                let t = n as f64;
                let sum: f64 = frequencies.iter().map(|f| (2.0 * PI * f * t).sin()).sum();
                gain / norm * sum
            }
        }
    }
}

fn check_gain(gain: f64) -> Result<()> {
    if gain.is_finite() && gain >= 0.0 {
        Ok(())
    } else {
        Err(Error::domain(
            "gain",
            format!("{gain} must be finite and nonnegative"),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_is_zero() {
        for n in [0, 1, 99] {
            assert_eq!(SignalSpec::Zero.sample(n), 0.0);
        }
    }

    #[test]
    fn multisine_starts_at_zero() {
        assert_eq!(SignalSpec::multisine(1.0).sample(0), 0.0);
    }

    #[test]
    fn multisine_at_seven() {
        // 3/3 * (sin(2 pi 0.14) + sin(2 pi 0.14 sqrt2) + sin(2 pi 0.14 sqrt3)),
        // evaluated independently with mpmath at 30 digits.
        let expected = 2.716_477_233_599_351_3;
        let got = SignalSpec::multisine(3.0).sample(7);
        assert!((got - expected).abs() < 1e-12, "{got}");
    }

    #[test]
    fn multisine_bounded_by_gain() {
        let s = SignalSpec::multisine(2.5);
        assert!((0..5000).all(|n| s.sample(n).abs() <= 2.5 + 1e-12));
    }

    #[test]
    fn white_noise_reproducible_and_uncorrelated() {
        let s = SignalSpec::white_noise(1.0, 11);
        assert_eq!(s.sample(42), s.sample(42));
        let xs: Vec<f64> = (0..10_000).map(|n| s.sample(n)).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64;
        assert!(mean.abs() < 3.0 / 100.0);
        assert!((var - 1.0).abs() < 0.05);
        for lag in 1..=3 {
            let c = xs
                .iter()
                .zip(&xs[lag..])
                .map(|(a, b)| (a - mean) * (b - mean))
                .sum::<f64>()
                / (xs.len() - lag) as f64
                / var;
            assert!(c.abs() < 3.0 / 100.0, "lag {lag}: {c}");
        }
    }

    #[test]
    fn validation() {
        assert!(SignalSpec::white_noise(-1.0, 0).validate().is_err());
        let empty = SignalSpec::Multisine {
            gain: 1.0,
            frequencies: vec![],
            normalization: None,
        };
        assert!(empty.validate().is_err());
        assert!(SignalSpec::multisine(1.0).validate().is_ok());
        assert!("sawtooth".parse::<SignalKind>().is_err());
    }
}
