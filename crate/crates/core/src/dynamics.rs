//! Time evolution of cortege ensembles.
//!
//! One step is `drift → exchange → friction`:
//!
//! * **drift**: velocity-Verlet (kick-drift-kick) under the external potential
//!   and the pair potential of the sample's own cortege, with elastic
//!   reflection at the grid extent;
//! * **exchange**: corteges sharing a configuration-space cell are paired at
//!   random per slot, and each pair swaps its slot velocities with
//!   probability `p`;
//! * **friction**: every velocity is scaled by `1 - γ·dt`.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{cell_of, SpatialGrid};
use crate::potential::{PairPotential, PotentialSpec};
use crate::rng;
use crate::swarm::{Cortege, CortegeEnsemble, Vec3};

/// Parameters of the impulse-exchange rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExchangeParams {
    /// Base rate; the per-step pairing probability is `min(1, intensity_c·dt)`.
    pub intensity_c: f64,
    /// Cell size of the exchange buckets.
    pub dx: f64,
    pub dt: f64,
}

impl ExchangeParams {
    /// Probability that a formed pair swaps its velocities in one step.
    ///
    /// The rate per unit volume scales as `dx^{-D}` and the bucket volume as
    /// `dx^{D}`, so the product reduces to `intensity_c·dt`.
    pub fn probability(&self) -> f64 {
        (self.intensity_c * self.dt).clamp(0.0, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.intensity_c >= 0.0 && self.intensity_c.is_finite()) {
            return Err(Error::config("exchange intensity must be finite and non-negative"));
        }
        if !(self.dx > 0.0 && self.dt > 0.0) {
            return Err(Error::config("exchange dx and dt must be positive"));
        }
        Ok(())
    }
}

/// Everything the integrator needs besides the ensemble itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dynamics {
    pub external: PotentialSpec,
    pub pair: Option<PairPotential>,
    /// Exchange base rate; zero disables exchange.
    pub exchange_intensity: f64,
    /// Exchange bucket size; defaults to the ensemble grid's `dx`.
    pub exchange_dx: Option<f64>,
    /// Friction coefficient γ.
    pub friction: f64,
    pub dt: f64,
}

impl Dynamics {
    /// Free classical motion with step `dt`.
    pub fn free(dt: f64) -> Self {
        Self {
            external: PotentialSpec::Zero,
            pair: None,
            exchange_intensity: 0.0,
            exchange_dx: None,
            friction: 0.0,
            dt,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::config("dt must be positive"));
        }
        self.external.validate()?;
        if let Some(p) = &self.pair {
            p.potential.validate()?;
        }
        if !(self.friction >= 0.0) || self.friction * self.dt >= 1.0 {
            return Err(Error::config(format!(
                "friction γ={} with dt={} needs 0 ≤ γ·dt < 1",
                self.friction, self.dt
            )));
        }
        if !(self.exchange_intensity >= 0.0 && self.exchange_intensity.is_finite()) {
            return Err(Error::config("exchange intensity must be finite and non-negative"));
        }
        if let Some(dx) = self.exchange_dx {
            if !(dx > 0.0) {
                return Err(Error::config("exchange dx must be positive"));
            }
        }
        Ok(())
    }

    pub fn exchange_params(&self, grid: &SpatialGrid) -> Option<ExchangeParams> {
        (self.exchange_intensity > 0.0).then(|| ExchangeParams {
            intensity_c: self.exchange_intensity,
            dx: self.exchange_dx.unwrap_or(grid.dx()),
            dt: self.dt,
        })
    }
}

/// Accelerations of every member of one cortege.
fn accelerations(c: &Cortege, d: usize, dynamics: &Dynamics, pairs: &[(usize, usize)]) -> Result<Vec<Vec3>> {
    let mut acc = vec![[0.0; 3]; c.members.len()];
    if !dynamics.external.is_zero() {
        for (a, s) in acc.iter_mut().zip(&c.members) {
            for k in 0..d {
                a[k] -= dynamics.external.derivative(s.position[k], s.mass) / s.mass;
            }
        }
    }
    if let Some(pair) = &dynamics.pair {
        for &(i, j) in pairs {
            let (si, sj) = (&c.members[i], &c.members[j]);
            let mut sep = [0.0; 3];
            let mut r2 = 0.0;
            for k in 0..d {
                sep[k] = si.position[k] - sj.position[k];
                r2 += sep[k] * sep[k];
            }
            let r = r2.sqrt();
            if r < 1e-12 {
                continue;
            }
            let mu = si.mass * sj.mass / (si.mass + sj.mass);
            let f = -pair.potential.derivative(r, mu) / r;
            for k in 0..d {
                acc[i][k] += f * sep[k] / si.mass;
                acc[j][k] -= f * sep[k] / sj.mass;
            }
        }
    }
    if acc.iter().flatten().any(|a| !a.is_finite()) {
        return Err(Error::NonFiniteForce { cortege_id: c.id });
    }
    Ok(acc)
}

fn reflect(x: &mut f64, v: &mut f64, lo: f64, hi: f64) {
    for _ in 0..8 {
        if *x < lo {
            *x = 2.0 * lo - *x;
            *v = -*v;
        } else if *x > hi {
            *x = 2.0 * hi - *x;
            *v = -*v;
        } else {
            return;
        }
    }
    *x = x.clamp(lo, hi);
}

fn drift_cortege(c: &mut Cortege, grid: &SpatialGrid, dynamics: &Dynamics, pairs: &[(usize, usize)], dt: f64) -> Result<()> {
    let d = grid.dim();
    let half = 0.5 * dt;
    let acc = accelerations(c, d, dynamics, pairs)?;
    for (s, a) in c.members.iter_mut().zip(&acc) {
        for k in 0..d {
            s.velocity[k] += half * a[k];
            s.position[k] += dt * s.velocity[k];
            reflect(&mut s.position[k], &mut s.velocity[k], grid.lo()[k], grid.hi()[k]);
        }
    }
    let acc = accelerations(c, d, dynamics, pairs)?;
    for (s, a) in c.members.iter_mut().zip(&acc) {
        for k in 0..d {
            s.velocity[k] += half * a[k];
        }
    }
    Ok(())
}

/// Advances every sample by one leapfrog step of length `dt`.
///
/// Forces come from `dynamics.external` and `dynamics.pair` only; exchange and
/// friction settings are ignored here.
pub fn drift_step(ensemble: &mut CortegeEnsemble, dynamics: &Dynamics, dt: f64) -> Result<()> {
    if !(dt > 0.0) {
        return Err(Error::config("drift dt must be positive"));
    }
    let grid = ensemble.grid().clone();
    let pairs = dynamics
        .pair
        .as_ref()
        .map(|p| p.topology.pairs(ensemble.n_particles()))
        .unwrap_or_default();
    if dynamics.external.is_zero() && dynamics.pair.is_none() {
        let d = grid.dim();
        ensemble.corteges.par_iter_mut().for_each(|c| {
            for s in &mut c.members {
                for k in 0..d {
                    s.position[k] += dt * s.velocity[k];
                    reflect(&mut s.position[k], &mut s.velocity[k], grid.lo()[k], grid.hi()[k]);
                }
            }
        });
        return Ok(());
    }
    ensemble
        .corteges
        .par_iter_mut()
        .try_for_each(|c| drift_cortege(c, &grid, dynamics, &pairs, dt))
}

/// Groups cortege indices by configuration cell; buckets come out sorted by cell.
fn buckets(ensemble: &CortegeEnsemble, grid: &SpatialGrid) -> Result<Vec<(Vec<u32>, Vec<usize>)>> {
    let d = grid.dim();
    let mut keyed: Vec<(Vec<u32>, usize)> = ensemble
        .corteges
        .par_iter()
        .enumerate()
        .map(|(i, c)| cell_of(&c.configuration_point(d), grid).map(|cell| (cell.0, i)))
        .collect::<Result<_>>()?;
    keyed.par_sort_unstable();
    let mut out: Vec<(Vec<u32>, Vec<usize>)> = Vec::new();
    for (key, i) in keyed {
        match out.last_mut() {
            Some((k, members)) if *k == key => members.push(i),
            _ => out.push((key, vec![i])),
        }
    }
    Ok(out)
}

/// Number of distinct configuration cells occupied by the ensemble.
pub fn occupied_cells(ensemble: &CortegeEnsemble, grid: &SpatialGrid) -> Result<usize> {
    Ok(buckets(ensemble, grid)?.len())
}

/// One round of impulse exchange; returns the number of occupied buckets.
///
/// Every bucket draws from its own stream keyed by `(seed, cell)`, so the
/// outcome is independent of how the buckets are distributed over threads.
pub fn exchange_step(ensemble: &mut CortegeEnsemble, params: &ExchangeParams, seed: u64) -> Result<usize> {
    params.validate()?;
    let grid = ensemble.grid().with_dx(params.dx)?;
    let buckets = buckets(ensemble, &grid)?;
    let n = ensemble.n_particles();
    let p = params.probability();
    // (slot, cortege a, cortege b) swaps; pairs are disjoint within a slot.
    let swaps: Vec<(usize, usize, usize)> = buckets
        .par_iter()
        .filter(|(_, members)| members.len() >= 2)
        .flat_map_iter(|(key, members)| {
            let mut r = rng::stream(seed, &[rng::hash_coords(key)]);
            let mut order = members.clone();
            let mut out = Vec::new();
            for j in 0..n {
                order.shuffle(&mut r);
                for pair in order.chunks_exact(2) {
                    if r.random::<f64>() < p {
                        out.push((j, pair[0], pair[1]));
                    }
                }
            }
            out
        })
        .collect();
    for (j, a, b) in swaps {
        let va = ensemble.corteges[a].members[j].velocity;
        ensemble.corteges[a].members[j].velocity = ensemble.corteges[b].members[j].velocity;
        ensemble.corteges[b].members[j].velocity = va;
    }
    Ok(buckets.len())
}

/// Scales every velocity by `1 - gamma·dt`.
pub fn friction_step(ensemble: &mut CortegeEnsemble, gamma: f64, dt: f64) -> Result<()> {
    if !(gamma >= 0.0) || gamma * dt >= 1.0 {
        return Err(Error::config(format!("friction needs 0 ≤ γ·dt < 1, got γ={gamma}, dt={dt}")));
    }
    if gamma == 0.0 {
        return Ok(());
    }
    let f = 1.0 - gamma * dt;
    let d = ensemble.dim();
    ensemble.corteges.par_iter_mut().for_each(|c| {
        for s in &mut c.members {
            for v in &mut s.velocity[..d] {
                *v *= f;
            }
        }
    });
    Ok(())
}

/// Σ m·v per slot, summed in cortege order.
pub fn total_impulse(ensemble: &CortegeEnsemble) -> Vec<Vec3> {
    let mut out = vec![[0.0; 3]; ensemble.n_particles()];
    for c in &ensemble.corteges {
        for (acc, s) in out.iter_mut().zip(&c.members) {
            let p = s.momentum();
            for k in 0..3 {
                acc[k] += p[k];
            }
        }
    }
    out
}

/// Σ ½ m v² per slot, summed in cortege order.
pub fn kinetic_energy_per_slot(ensemble: &CortegeEnsemble) -> Vec<f64> {
    let mut out = vec![0.0; ensemble.n_particles()];
    for c in &ensemble.corteges {
        for (acc, s) in out.iter_mut().zip(&c.members) {
            *acc += s.kinetic_energy();
        }
    }
    out
}

pub fn kinetic_energy(ensemble: &CortegeEnsemble) -> f64 {
    kinetic_energy_per_slot(ensemble).iter().sum()
}

/// One row of the trajectory digest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DigestRow {
    pub step: usize,
    pub time: f64,
    pub impulse: Vec<Vec3>,
    pub kinetic: f64,
    pub occupied_cells: usize,
}

/// Per-step bookkeeping of an evolution run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryDigest {
    pub dim: usize,
    pub rows: Vec<DigestRow>,
}

impl TrajectoryDigest {
    /// CSV: `step,time,p{slot}_{axis}...,kinetic,occupied_cells`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("step,time");
        if let Some(first) = self.rows.first() {
            for j in 0..first.impulse.len() {
                for k in 0..self.dim {
                    let _ = write!(s, ",p{j}_{k}");
                }
            }
        }
        s.push_str(",kinetic,occupied_cells\n");
        for r in &self.rows {
            let _ = write!(s, "{},{}", r.step, r.time);
            for p in &r.impulse {
                for v in &p[..self.dim] {
                    let _ = write!(s, ",{v}");
                }
            }
            let _ = writeln!(s, ",{},{}", r.kinetic, r.occupied_cells);
        }
        s
    }
}

fn digest_row(ensemble: &CortegeEnsemble, step: usize, time: f64, occupied: usize) -> DigestRow {
    DigestRow {
        step,
        time,
        impulse: total_impulse(ensemble),
        kinetic: kinetic_energy(ensemble),
        occupied_cells: occupied,
    }
}

/// Number of `dt` steps in `big_dt`; errors unless it is an integer multiple.
pub fn step_count(big_dt: f64, dt: f64) -> Result<usize> {
    if !(big_dt >= 0.0) || !(dt > 0.0) {
        return Err(Error::config(format!("invalid duration {big_dt} for step {dt}")));
    }
    let ratio = big_dt / dt;
    let n = ratio.round();
    if (ratio - n).abs() > 1e-6 * n.max(1.0) {
        return Err(Error::config(format!("Δt={big_dt} is not a multiple of dt={dt}")));
    }
    Ok(n as usize)
}

/// Runs `big_dt / dt` steps of drift, exchange and friction in place.
///
/// Cortege ids and order are untouched, so each initial cortege stays
/// paired with its final descendant.
pub fn evolve(ensemble: &mut CortegeEnsemble, dynamics: &Dynamics, big_dt: f64, seed: u64) -> Result<TrajectoryDigest> {
    dynamics.validate()?;
    let steps = step_count(big_dt, dynamics.dt)?;
    evolve_steps(ensemble, dynamics, steps, seed)
}

/// As [`evolve`], with an explicit step count.
pub fn evolve_steps(ensemble: &mut CortegeEnsemble, dynamics: &Dynamics, steps: usize, seed: u64) -> Result<TrajectoryDigest> {
    dynamics.validate()?;
    let exchange = dynamics.exchange_params(ensemble.grid());
    let occupancy_grid = match &exchange {
        Some(p) => ensemble.grid().with_dx(p.dx)?,
        None => ensemble.grid().clone(),
    };
    let mut digest = TrajectoryDigest { dim: ensemble.dim(), rows: Vec::with_capacity(steps + 1) };
    let occ0 = occupied_cells(ensemble, &occupancy_grid)?;
    digest.rows.push(digest_row(ensemble, 0, 0.0, occ0));
    for step in 1..=steps {
        drift_step(ensemble, dynamics, dynamics.dt)?;
        let occupied = match &exchange {
            Some(p) => exchange_step(ensemble, p, rng::derive_seed(seed, &[step as u64]))?,
            None => occupied_cells(ensemble, &occupancy_grid)?,
        };
        friction_step(ensemble, dynamics.friction, dynamics.dt)?;
        digest.rows.push(digest_row(ensemble, step, step as f64 * dynamics.dt, occupied));
    }
    Ok(digest)
}
