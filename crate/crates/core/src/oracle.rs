//! Independent reference machinery: a Crank–Nicolson grid solver for up to
//! two degrees of freedom, density distances, and the coherent/incoherent
//! deposit comparison.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::potential::PotentialSpec;
use crate::rng;
use crate::wavefield::{DensityField, GridWavefunction, UnitsConfig};

/// Largest tolerated change of `Σ|ψ|²dV` over one step.
pub const NORM_DRIFT_LIMIT: f64 = 1e-10;

/// Grid Hamiltonian `Σ_a -∂²_a/(2m_a) + V_ext + V_pair` with hard walls just
/// outside the grid extent.
#[derive(Debug, Clone)]
pub struct SchrodingerSolver {
    pub external: PotentialSpec,
    /// Pair potential on `|x_0 - x_1|` for two one-dimensional particles.
    pub pair: Option<PotentialSpec>,
    pub units: UnitsConfig,
}

impl SchrodingerSolver {
    pub fn new(external: PotentialSpec, units: UnitsConfig) -> Self {
        Self { external, pair: None, units }
    }

    fn potential_grid(&self, wf: &GridWavefunction) -> Vec<f64> {
        let grid = wf.grid();
        let n = wf.n_particles();
        let d = wf.slot_dim();
        grid.cells()
            .map(|c| {
                let x = grid.cell_center(&c);
                let mut v = 0.0;
                for (axis, &xa) in x.iter().enumerate() {
                    v += self.external.energy(xa, self.units.masses[axis / d]);
                }
                if let (Some(pair), 2, 1) = (&self.pair, n, d) {
                    let (m0, m1) = (self.units.masses[0], self.units.masses[1]);
                    v += pair.energy((x[0] - x[1]).abs(), m0 * m1 / (m0 + m1));
                }
                v
            })
            .collect()
    }

    /// Propagates `wf0` to time `t` with steps no longer than `dt`.
    pub fn propagate(&self, wf0: &GridWavefunction, t: f64, dt: f64) -> Result<GridWavefunction> {
        wf0.check_normalized()?;
        let axes = wf0.grid().dim();
        if axes > 2 {
            return Err(Error::Unsupported(format!("grid solver handles at most 2 degrees of freedom, got {axes}")));
        }
        if self.units.masses.len() != wf0.n_particles() {
            return Err(Error::contract("one mass per particle required"));
        }
        if self.pair.is_some() && !(wf0.n_particles() == 2 && wf0.slot_dim() == 1) {
            return Err(Error::Unsupported("pair potential needs two one-dimensional particles".into()));
        }
        if !(t >= 0.0) || !(dt > 0.0) {
            return Err(Error::config("need t ≥ 0 and dt > 0"));
        }
        let mut wf = wf0.clone();
        if t == 0.0 {
            return Ok(wf);
        }
        let steps = (t / dt - 1e-9).ceil().max(1.0) as usize;
        let h = t / steps as f64;
        let v = self.potential_grid(wf0);
        let cells = wf0.grid().cells_per_axis().to_vec();
        let masses: Vec<f64> = (0..axes).map(|a| self.units.masses[a / wf0.slot_dim()]).collect();
        let dx = wf0.grid().dx();
        let dv = wf0.grid().cell_volume();
        let mut norm = wf.norm_sq();
        let share = 1.0 / axes as f64;
        for step in 0..steps {
            let amps = wf.amplitudes_mut();
            if axes == 1 {
                cayley_lines(amps, &cells, 0, masses[0], dx, &v, 1.0, h);
            } else {
                cayley_lines(amps, &cells, 0, masses[0], dx, &v, share, 0.5 * h);
                cayley_lines(amps, &cells, 1, masses[1], dx, &v, share, h);
                cayley_lines(amps, &cells, 0, masses[0], dx, &v, share, 0.5 * h);
            }
            let now = amps.iter().map(|a| a.norm_sqr()).sum::<f64>() * dv;
            let drift = (now - norm).abs();
            if !(drift < NORM_DRIFT_LIMIT) {
                return Err(Error::SolverInstability { step, drift });
            }
            norm = now;
        }
        Ok(wf)
    }
}

/// Applies `(1 + iτH_a/2)⁻¹(1 - iτH_a/2)` along every grid line of `axis`,
/// where `H_a = -∂²/(2m) + share·V`.
#[allow(clippy::too_many_arguments)]
fn cayley_lines(amps: &mut [Complex64], cells: &[usize], axis: usize, mass: f64, dx: f64, v: &[f64], share: f64, tau: f64) {
    let len = cells[axis];
    let stride: usize = cells[axis + 1..].iter().product();
    let lines = amps.len() / len;
    let kin = 1.0 / (2.0 * mass * dx * dx);
    let i_half = Complex64::new(0.0, 0.5 * tau);
    let off = -kin * i_half;
    let mut diag = vec![Complex64::default(); len];
    let mut rhs = vec![Complex64::default(); len];
    let mut cp = vec![Complex64::default(); len];
    for line in 0..lines {
        let base = (line / stride) * stride * len + line % stride;
        let idx = |i: usize| base + i * stride;
        for i in 0..len {
            let h_ii = 2.0 * kin + share * v[idx(i)];
            diag[i] = Complex64::new(1.0, 0.0) + i_half * h_ii;
            // (1 - iτH/2)ψ
            let mut r = (Complex64::new(1.0, 0.0) - i_half * h_ii) * amps[idx(i)];
            if i > 0 {
                r -= off * amps[idx(i - 1)];
            }
            if i + 1 < len {
                r -= off * amps[idx(i + 1)];
            }
            rhs[i] = r;
        }
        // Thomas algorithm with constant off-diagonals
        cp[0] = off / diag[0];
        rhs[0] /= diag[0];
        for i in 1..len {
            let m = diag[i] - off * cp[i - 1];
            cp[i] = off / m;
            rhs[i] = (rhs[i] - off * rhs[i - 1]) / m;
        }
        for i in (0..len - 1).rev() {
            rhs[i] = rhs[i] - cp[i] * rhs[i + 1];
        }
        for i in 0..len {
            amps[idx(i)] = rhs[i];
        }
    }
}

/// Crank–Nicolson propagation of `wf0` under an external potential.
pub fn solve_schrodinger(
    wf0: &GridWavefunction,
    potential: &PotentialSpec,
    units: &UnitsConfig,
    t: f64,
    dt: f64,
) -> Result<GridWavefunction> {
    SchrodingerSolver::new(potential.clone(), units.clone()).propagate(wf0, t, dt)
}

/// `Σ|a - b|·dV` over a shared grid.
pub fn l1_density_distance(a: &DensityField, b: &DensityField) -> Result<f64> {
    if a.grid != b.grid || a.values.len() != b.values.len() {
        return Err(Error::GridMismatch("density fields live on different grids".into()));
    }
    let sum: f64 = a.values.iter().zip(&b.values).map(|(x, y)| (x - y).abs()).sum();
    Ok(sum * a.grid.cell_volume())
}

/// Probability deposits of `l` equal-modulus amplitudes: coherent (`d1`,
/// all phases equal) and with the given phases (`d2`).
pub fn interference_deposit(l: usize, a_mod: f64, phases: &[f64]) -> Result<(f64, f64)> {
    if l == 0 || phases.len() != l {
        return Err(Error::contract(format!("need l ≥ 1 phases, got l={l} and {} phases", phases.len())));
    }
    if !(a_mod > 0.0) {
        return Err(Error::contract("amplitude modulus must be positive"));
    }
    let d1 = (l as f64 * a_mod).powi(2);
    let sum: Complex64 = phases.iter().map(|&p| Complex64::from_polar(a_mod, p)).sum();
    Ok((d1, sum.norm_sqr()))
}

/// Coherent deposit against the mean random-phase deposit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepositStats {
    pub l: usize,
    pub trials: usize,
    pub d1: f64,
    pub mean_d2: f64,
}

impl DepositStats {
    /// `d1 / mean(d2)`, which tends to `l`.
    pub fn ratio(&self) -> f64 {
        self.d1 / self.mean_d2
    }
}

/// Monte Carlo estimate of `mean(d2)` over i.i.d. uniform phases.
pub fn deposit_monte_carlo(l: usize, a_mod: f64, trials: usize, seed: u64) -> Result<DepositStats> {
    const CHUNK: usize = 8192;
    if trials == 0 {
        return Err(Error::contract("need at least one trial"));
    }
    let chunks = trials.div_ceil(CHUNK);
    let partial: Vec<Result<(f64, f64)>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut r = rng::stream(seed, &[l as u64, c as u64]);
            let mut phases = vec![0.0; l];
            let mut d1 = 0.0;
            let mut acc = 0.0;
            for _ in 0..CHUNK.min(trials - c * CHUNK) {
                for p in &mut phases {
                    *p = r.random::<f64>() * std::f64::consts::TAU;
                }
                let (a, b) = interference_deposit(l, a_mod, &phases)?;
                d1 = a;
                acc += b;
            }
            Ok((d1, acc))
        })
        .collect();
    let mut d1 = 0.0;
    let mut total = 0.0;
    for p in partial {
        let (a, b) = p?;
        d1 = a;
        total += b;
    }
    Ok(DepositStats { l, trials, d1, mean_d2: total / trials as f64 })
}

/// Standard deviation of `|ψ|²` along axis 0 of a single-particle wavefunction.
pub fn density_width(wf: &GridWavefunction) -> f64 {
    let g = wf.grid();
    let (mut m0, mut m1, mut m2) = (0.0, 0.0, 0.0);
    for c in g.cells() {
        let p = wf.amplitudes()[g.linear_index(&c)].norm_sqr();
        let x = g.cell_center(&c)[0];
        m0 += p;
        m1 += p * x;
        m2 += p * x * x;
    }
    let mean = m1 / m0;
    (m2 / m0 - mean * mean).sqrt()
}
