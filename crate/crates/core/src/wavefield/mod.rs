//! Grid wavefunctions and their swarm counterparts.
//!
//! Units are `ħ = 1`. The swarm ↔ wavefunction dictionary is
//!
//! ```text
//! |Ψ(r)|  = sqrt(ρ(r))
//! φ(r)    = ∫_{r₀→r} m·v̄ · dγ
//! v̄(r)    = ∇φ(r) / m
//! ```
//!
//! i.e. the phase coefficient `k·dx²` is fixed to the slot mass and the
//! velocity coefficient `a·dx⁻²` to its inverse, which makes the last two
//! lines mutually inverse.

mod grain;
mod io;
mod sampling;

pub use grain::{amplitude_grain_reduce, grain_collapse_walk, AmplitudeVector, BasisLabel};
pub use io::{read_wavefunction, write_wavefunction};
pub use sampling::{
    born_sample, cortege_ensemble_from_entangled, phase_gradient_field, swarm_density, swarm_from_wavefunction,
    wavefunction_from_swarm, ConversionReport, SamplingReport,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::SpatialGrid;

/// Tolerance on `Σ|ψ|²·dV = 1`.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Complex amplitudes on the cells of an n-particle configuration grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridWavefunction {
    grid: SpatialGrid,
    n_particles: usize,
    amps: Vec<Complex64>,
}

impl GridWavefunction {
    /// Wraps raw amplitudes; `grid` is the configuration grid (`n·d` axes).
    pub fn from_amplitudes(grid: SpatialGrid, n_particles: usize, amps: Vec<Complex64>) -> Result<Self> {
        if n_particles == 0 || grid.dim() % n_particles != 0 {
            return Err(Error::contract(format!("{} axes do not split into {n_particles} particles", grid.dim())));
        }
        if amps.len() != grid.num_cells() {
            return Err(Error::contract(format!("{} amplitudes for {} cells", amps.len(), grid.num_cells())));
        }
        Ok(Self { grid, n_particles, amps })
    }

    /// Samples `f` at cell centres of the configuration grid of `n_particles`
    /// copies of `slot_grid`, then normalizes.
    pub fn from_fn(slot_grid: &SpatialGrid, n_particles: usize, f: impl Fn(&[f64]) -> Complex64) -> Result<Self> {
        let grid = slot_grid.configuration(n_particles);
        let amps = grid.cells().map(|c| f(&grid.cell_center(&c))).collect();
        let mut wf = Self::from_amplitudes(grid, n_particles, amps)?;
        wf.normalize()?;
        Ok(wf)
    }

    /// Gaussian packet per axis: `exp(-(x-c)²/(4σ²) + i·p·x)`, so `|ψ|²` has
    /// standard deviation `σ` and the phase gradient is `p`.
    pub fn gaussian(slot_grid: &SpatialGrid, center: &[f64], width: &[f64], momentum: &[f64]) -> Result<Self> {
        let d = slot_grid.dim();
        if center.len() != d || width.len() != d || momentum.len() != d {
            return Err(Error::contract("gaussian parameters must have one entry per axis"));
        }
        if width.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::contract("gaussian width must be positive"));
        }
        Self::from_fn(slot_grid, 1, |x| {
            let mut re = 0.0;
            let mut ph = 0.0;
            for k in 0..d {
                re -= (x[k] - center[k]).powi(2) / (4.0 * width[k] * width[k]);
                ph += momentum[k] * x[k];
            }
            Complex64::from_polar(re.exp(), ph)
        })
    }

    /// Tensor product of single-particle wavefunctions on a common slot grid.
    pub fn product(factors: &[GridWavefunction]) -> Result<Self> {
        let first = factors.first().ok_or_else(|| Error::contract("empty product"))?;
        let slot = first.slot_grid()?;
        let mut amps = vec![Complex64::new(1.0, 0.0)];
        let mut n = 0;
        for f in factors {
            if f.slot_grid()? != slot {
                return Err(Error::GridMismatch("product factors need the same slot grid".into()));
            }
            let mut next = Vec::with_capacity(amps.len() * f.amps.len());
            for a in &amps {
                for b in &f.amps {
                    next.push(a * b);
                }
            }
            amps = next;
            n += f.n_particles;
        }
        let mut wf = Self::from_amplitudes(slot.configuration(n), n, amps)?;
        wf.normalize()?;
        Ok(wf)
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn n_particles(&self) -> usize {
        self.n_particles
    }

    /// Axes per particle.
    pub fn slot_dim(&self) -> usize {
        self.grid.dim() / self.n_particles
    }

    pub fn slot_grid(&self) -> Result<SpatialGrid> {
        self.grid.slot_grid(self.n_particles)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.cell_volume()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm_sq();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::contract("wavefunction has zero or non-finite norm"));
        }
        let s = 1.0 / n.sqrt();
        for a in &mut self.amps {
            *a *= s;
        }
        Ok(())
    }

    pub fn check_normalized(&self) -> Result<()> {
        let n = self.norm_sq();
        if (n - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::contract(format!("wavefunction not normalized: Σ|ψ|²dV = {n}")));
        }
        Ok(())
    }

    /// `|ψ|²` per cell.
    pub fn density(&self) -> DensityField {
        DensityField {
            grid: self.grid.clone(),
            values: self.amps.iter().map(|a| a.norm_sqr()).collect(),
        }
    }

    /// Marginal density of one slot, obtained by summing out the others.
    pub fn marginal(&self, slot: usize) -> Result<DensityField> {
        self.density().marginal(self.n_particles, slot)
    }
}

/// Real field over configuration cells (probability density per unit volume).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityField {
    pub grid: SpatialGrid,
    pub values: Vec<f64>,
}

impl DensityField {
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_volume()
    }

    /// Sums out every slot except `slot` of an `n`-slot configuration field.
    pub fn marginal(&self, n: usize, slot: usize) -> Result<DensityField> {
        let slot_grid = self.grid.slot_grid(n)?;
        if slot >= n {
            return Err(Error::contract(format!("slot {slot} out of range for {n} particles")));
        }
        let d = slot_grid.dim();
        let other_volume = self.grid.cell_volume() / slot_grid.cell_volume();
        let mut values = vec![0.0; slot_grid.num_cells()];
        for (i, v) in self.values.iter().enumerate() {
            let cell = self.grid.cell_from_linear(i);
            let sub = crate::lattice::CellIndex(cell.slot(slot, d).to_vec());
            values[slot_grid.linear_index(&sub)] += v * other_volume;
        }
        Ok(DensityField { grid: slot_grid, values })
    }
}

/// Physical constants of the swarm ↔ wavefunction dictionary (`ħ = 1`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitsConfig {
    pub masses: Vec<f64>,
}

impl UnitsConfig {
    pub fn new(masses: Vec<f64>) -> Result<Self> {
        if masses.is_empty() || masses.iter().any(|m| !(*m > 0.0 && m.is_finite())) {
            return Err(Error::config("masses must be positive and finite"));
        }
        Ok(Self { masses })
    }

    pub fn hbar(&self) -> f64 {
        1.0
    }

    /// Phase coefficient `k` for `slot` at grain `dx`: `k·dx² = m`.
    pub fn k_phase(&self, slot: usize, dx: f64) -> f64 {
        self.masses[slot] / (dx * dx)
    }

    /// Velocity coefficient `a` for `slot` at grain `dx`: `a·dx⁻² = 1/m`.
    pub fn a_vel(&self, slot: usize, dx: f64) -> f64 {
        dx * dx / self.masses[slot]
    }
}
