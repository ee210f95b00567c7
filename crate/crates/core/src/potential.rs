//! Potential energy functions shared by the swarm integrator and the grid solver.
//!
//! Units are `ħ = 1`. External potentials act separably on each coordinate
//! axis of a sample; pair potentials act on the separation `|r_a - r_b|` of two
//! samples in the same cortege.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Morse well `D·(1 - e^{-α(r - r₀)})² - D`: minimum `-D` at `r₀`, zero at infinity.
pub fn morse_potential(r: f64, depth: f64, alpha: f64, r0: f64) -> f64 {
    let e = (-alpha * (r - r0)).exp();
    depth * (1.0 - e) * (1.0 - e) - depth
}

fn morse_derivative(r: f64, depth: f64, alpha: f64, r0: f64) -> f64 {
    let e = (-alpha * (r - r0)).exp();
    2.0 * depth * alpha * (1.0 - e) * e
}

/// A one-dimensional potential profile.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    #[default]
    Zero,
    /// `½·m·ω²·(x - center)²`; `m` is the sample mass (reduced mass for pairs).
    Harmonic {
        omega: f64,
        #[serde(default)]
        center: f64,
    },
    Morse { depth: f64, alpha: f64, r0: f64 },
    /// `slope·x`, a uniform force field `-slope`.
    Linear { slope: f64 },
    /// Piecewise-linear interpolation of `values` on the nodes `lo + i·step`,
    /// held constant beyond the last node on either side.
    Tabulated { lo: f64, step: f64, values: Vec<f64> },
}

impl PotentialSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            PotentialSpec::Zero => true,
            PotentialSpec::Harmonic { omega, center } => omega.is_finite() && center.is_finite(),
            PotentialSpec::Morse { depth, alpha, r0 } => {
                depth.is_finite() && *depth >= 0.0 && alpha.is_finite() && *alpha > 0.0 && r0.is_finite()
            }
            PotentialSpec::Linear { slope } => slope.is_finite(),
            PotentialSpec::Tabulated { lo, step, values } => {
                lo.is_finite() && *step > 0.0 && values.len() >= 2 && values.iter().all(|v| v.is_finite())
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::config(format!("invalid potential parameters: {self:?}")))
        }
    }

    pub fn energy(&self, x: f64, mass: f64) -> f64 {
        match *self {
            PotentialSpec::Zero => 0.0,
            PotentialSpec::Harmonic { omega, center } => 0.5 * mass * omega * omega * (x - center).powi(2),
            PotentialSpec::Morse { depth, alpha, r0 } => morse_potential(x, depth, alpha, r0),
            PotentialSpec::Linear { slope } => slope * x,
            PotentialSpec::Tabulated { lo, step, ref values } => {
                let (i, t) = table_locate(x, lo, step, values.len());
                values[i] + t * (values[i + 1] - values[i])
            }
        }
    }

    /// `dV/dx`.
    pub fn derivative(&self, x: f64, mass: f64) -> f64 {
        match *self {
            PotentialSpec::Zero => 0.0,
            PotentialSpec::Harmonic { omega, center } => mass * omega * omega * (x - center),
            PotentialSpec::Morse { depth, alpha, r0 } => morse_derivative(x, depth, alpha, r0),
            PotentialSpec::Linear { slope } => slope,
            PotentialSpec::Tabulated { lo, step, ref values } => {
                let u = (x - lo) / step;
                if u < 0.0 || u > (values.len() - 1) as f64 {
                    return 0.0;
                }
                let (i, _) = table_locate(x, lo, step, values.len());
                (values[i + 1] - values[i]) / step
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, PotentialSpec::Zero)
    }
}

fn table_locate(x: f64, lo: f64, step: f64, n: usize) -> (usize, f64) {
    let u = ((x - lo) / step).clamp(0.0, (n - 1) as f64);
    let i = (u.floor() as usize).min(n - 2);
    (i, u - i as f64)
}

/// Which slot pairs of a cortege interact through the pair potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairTopology {
    /// Every unordered pair of slots.
    #[default]
    All,
    /// Neighbouring slots `(j, j+1)` only.
    Chain,
}

impl PairTopology {
    pub fn pairs(self, n: usize) -> Vec<(usize, usize)> {
        match self {
            PairTopology::All => (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect(),
            PairTopology::Chain => (1..n).map(|b| (b - 1, b)).collect(),
        }
    }
}

/// Pair interaction inside each cortege.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairPotential {
    #[serde(flatten)]
    pub potential: PotentialSpec,
    #[serde(default)]
    pub topology: PairTopology,
}
