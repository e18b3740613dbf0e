//! Closed-form criticality predictions.
//!
//! A network with mean degree `k` and asymmetry `d` is predicted chaotic when
//! `1 + 2p(1-p) k > k/2` with `p = d + 1/2`, equivalently `k < 1/(2 d^2)`.
//! With per-neuron noise of standard deviation `theta`, the chaotic region
//! becomes `k < a theta / |d|` for large `k`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Empirical slope of the noisy boundary `|d| < a nu + b`.
pub const DEFAULT_NOISE_SLOPE: f64 = 0.65;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CriticalDegree {
    Finite(f64),
    /// `d = 0`: every mean degree is on the chaotic side.
    AlwaysChaotic,
}

impl CriticalDegree {
    /// Numeric value, `+inf` for [`CriticalDegree::AlwaysChaotic`].
    pub fn value(self) -> f64 {
        match self {
            CriticalDegree::Finite(k) => k,
            CriticalDegree::AlwaysChaotic => f64::INFINITY,
        }
    }

    pub fn predicts_chaos(self, mean_degree: f64) -> bool {
        mean_degree < self.value()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Frozen,
    Chaotic,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::Frozen => "frozen",
            Regime::Chaotic => "chaotic",
        })
    }
}

fn check_asymmetry(d: f64) -> Result<()> {
    if d.is_finite() && d.abs() <= 0.5 {
        Ok(())
    } else {
        Err(Error::domain(
            "asymmetry",
            format!("{d} not in [-0.5, 0.5]"),
        ))
    }
}

/// `k_c = 1 / (2 d^2)`.
pub fn critical_degree(d: f64) -> Result<CriticalDegree> {
    check_asymmetry(d)?;
    if d == 0.0 {
        return Ok(CriticalDegree::AlwaysChaotic);
    }
    Ok(CriticalDegree::Finite(1.0 / (2.0 * d * d)))
}

/// `d_c = 1 / sqrt(2 k)`, the inverse of [`critical_degree`] on `d > 0`.
pub fn critical_asymmetry(mean_degree: f64) -> Result<f64> {
    if !(mean_degree.is_finite() && mean_degree > 0.0) {
        return Err(Error::domain(
            "mean_degree",
            format!("{mean_degree} must be positive"),
        ));
    }
    Ok(1.0 / (2.0 * mean_degree).sqrt())
}

/// Onset-of-chaos inequality `1 + 2p(1-p) k > k/2`, evaluated literally.
pub fn chaos_condition(mean_degree: f64, d: f64) -> bool {
    let p = d + 0.5;
    1.0 + 2.0 * p * (1.0 - p) * mean_degree > mean_degree / 2.0
}

pub fn predicted_regime(mean_degree: f64, d: f64) -> Regime {
    if chaos_condition(mean_degree, d) {
        Regime::Chaotic
    } else {
        Regime::Frozen
    }
}

/// Mean and variance of a neuron's summed input over `k` random `+-1` inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanFieldStats {
    pub mean_input: f64,
    pub variance_input: f64,
}

pub fn mean_field_stats(k: f64, d: f64) -> Result<MeanFieldStats> {
    if !(k.is_finite() && k >= 0.0) {
        return Err(Error::domain("degree", format!("{k} must be nonnegative")));
    }
    check_asymmetry(d)?;
    Ok(MeanFieldStats {
        mean_input: 2.0 * k * d,
        variance_input: (k * (1.0 - 4.0 * d * d)).max(0.0),
    })
}

/// `k_c^noise = a theta / |d|` for noise standard deviation `theta`.
pub fn noisy_critical_degree(noise_std: f64, d: f64, slope: f64) -> Result<f64> {
    check_asymmetry(d)?;
    if d == 0.0 {
        return Err(Error::domain("asymmetry", "must be nonzero"));
    }
    if !(noise_std.is_finite() && noise_std >= 0.0) {
        return Err(Error::domain(
            "noise_std",
            format!("{noise_std} must be nonnegative"),
        ));
    }
    if !(slope.is_finite() && slope > 0.0) {
        return Err(Error::domain("slope", format!("{slope} must be positive")));
    }
    Ok(slope * noise_std / d.abs())
}

/// Boundary asymmetry magnitude `a nu + b` of the fixed-degree noise sweep.
pub fn noisy_boundary_d(noise_gain: f64, slope: f64, intercept: f64) -> f64 {
    slope * noise_gain + intercept
}
