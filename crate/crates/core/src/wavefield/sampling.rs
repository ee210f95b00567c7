use std::collections::VecDeque;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use super::{DensityField, GridWavefunction, UnitsConfig};
use crate::error::{Error, Result};
use crate::lattice::{cell_of, CellIndex, SpatialGrid};
use crate::rng;
use crate::swarm::{Cortege, CortegeEnsemble, Sample};

/// Samples per RNG stream; fixed so results do not depend on the thread count.
const CHUNK: usize = 4096;
const TAG_BORN: u64 = 0xb0_42;

/// Diagnostics from wavefunction → swarm conversion.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SamplingReport {
    /// Cells whose phase gradient fell back to a one-sided difference.
    pub one_sided_cells: usize,
    /// Sampled cells with no nonzero neighbour; their samples got zero velocity.
    pub isolated_cells: usize,
}

/// Diagnostics from swarm → wavefunction conversion.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConversionReport {
    pub occupied_cells: usize,
    /// Occupied cells fall into more than one face-connected component.
    pub disconnected_support: bool,
    /// Lattice-path steps between two empty cells (zero phase increment).
    pub path_gaps: usize,
}

fn cumulative(wf: &GridWavefunction) -> Vec<f64> {
    let dv = wf.grid().cell_volume();
    let mut acc = 0.0;
    wf.amplitudes()
        .iter()
        .map(|a| {
            acc += a.norm_sqr() * dv;
            acc
        })
        .collect()
}

/// Draws `count` (cell, point) pairs from `|ψ|²`.
fn draw(wf: &GridWavefunction, count: usize, seed: u64) -> Result<Vec<(usize, Vec<f64>)>> {
    wf.check_normalized()?;
    if count == 0 {
        return Err(Error::contract("sample count must be at least 1"));
    }
    let cdf = cumulative(wf);
    let total = *cdf.last().unwrap();
    let grid = wf.grid();
    let chunks = count.div_ceil(CHUNK);
    let out: Vec<Vec<(usize, Vec<f64>)>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut r = rng::stream(seed, &[TAG_BORN, c as u64]);
            let len = CHUNK.min(count - c * CHUNK);
            (0..len)
                .map(|_| {
                    let u = r.random::<f64>() * total;
                    let mut idx = cdf.partition_point(|&p| p <= u).min(cdf.len() - 1);
                    // never land on a zero-probability cell through rounding
                    while idx > 0 && cdf[idx] == cdf[idx - 1] {
                        idx -= 1;
                    }
                    let cell = grid.cell_from_linear(idx);
                    let point = cell
                        .0
                        .iter()
                        .enumerate()
                        .map(|(axis, &i)| {
                            let (a, b) = grid.cell_bounds(axis, i);
                            a + (b - a) * r.random::<f64>()
                        })
                        .collect();
                    (idx, point)
                })
                .collect()
        })
        .collect();
    Ok(out.into_iter().flatten().collect())
}

/// Draws `count` configuration points i.i.d. from `|ψ|²`, uniform inside the chosen cell.
pub fn born_sample(wf: &GridWavefunction, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    Ok(draw(wf, count, seed)?.into_iter().map(|(_, p)| p).collect())
}

/// Phase gradient `∂φ/∂x_axis` at every cell, via unwrapped central differences.
///
/// Falls back to one-sided differences next to zero-amplitude cells and to
/// zero for cells without a nonzero neighbour.
pub fn phase_gradient_field(wf: &GridWavefunction) -> (Vec<Vec<f64>>, SamplingReport) {
    let (grads, isolated, one_sided) = gradient_field(wf);
    let report = SamplingReport {
        one_sided_cells: one_sided,
        isolated_cells: isolated.iter().filter(|&&b| b).count(),
    };
    (grads, report)
}

fn gradient_field(wf: &GridWavefunction) -> (Vec<Vec<f64>>, Vec<bool>, usize) {
    let grid = wf.grid();
    let amps = wf.amplitudes();
    let dx = grid.dx();
    let axes = grid.dim();
    let cells = grid.cells_per_axis();
    let mut stride = vec![1usize; axes];
    for a in (0..axes.saturating_sub(1)).rev() {
        stride[a] = stride[a + 1] * cells[a + 1];
    }
    let mut isolated_flags = vec![false; amps.len()];
    let mut one_sided_cells = 0;
    let grads = (0..amps.len())
        .map(|idx| {
            let here = amps[idx];
            if here.norm_sqr() == 0.0 {
                return vec![0.0; axes];
            }
            let mut g = vec![0.0; axes];
            let mut isolated = true;
            let mut one_sided = false;
            for a in 0..axes {
                let coord = (idx / stride[a]) % cells[a];
                let prev = (coord > 0).then(|| amps[idx - stride[a]]).filter(|z| z.norm_sqr() > 0.0);
                let next = (coord + 1 < cells[a]).then(|| amps[idx + stride[a]]).filter(|z| z.norm_sqr() > 0.0);
                g[a] = match (prev, next) {
                    (Some(p), Some(n)) => (n * p.conj()).arg() / (2.0 * dx),
                    (None, Some(n)) => {
                        one_sided = true;
                        (n * here.conj()).arg() / dx
                    }
                    (Some(p), None) => {
                        one_sided = true;
                        (here * p.conj()).arg() / dx
                    }
                    (None, None) => 0.0,
                };
                isolated &= prev.is_none() && next.is_none();
            }
            if isolated {
                isolated_flags[idx] = true;
            } else if one_sided {
                one_sided_cells += 1;
            }
            g
        })
        .collect();
    (grads, isolated_flags, one_sided_cells)
}

/// Samples configuration points and assigns each slot the velocity `∇_j φ / m_j`.
fn sample_corteges(wf: &GridWavefunction, count: usize, units: &UnitsConfig, seed: u64) -> Result<(Vec<Cortege>, SamplingReport)> {
    let n = wf.n_particles();
    if units.masses.len() != n {
        return Err(Error::contract(format!("{} masses for {n} particles", units.masses.len())));
    }
    let d = wf.slot_dim();
    if d > 3 {
        return Err(Error::contract("at most 3 axes per particle"));
    }
    let draws = draw(wf, count, seed)?;
    let (grads, isolated, one_sided_cells) = gradient_field(wf);
    let dx = wf.grid().dx();
    let mut sampled_isolated = std::collections::BTreeSet::new();
    let corteges = draws
        .into_iter()
        .enumerate()
        .map(|(i, (cell, point))| {
            let g = &grads[cell];
            if isolated[cell] {
                sampled_isolated.insert(cell);
            }
            let members = (0..n)
                .map(|j| {
                    let mut position = [0.0; 3];
                    let mut velocity = [0.0; 3];
                    for k in 0..d {
                        position[k] = point[j * d + k];
                        // v = a·dx⁻²·∇φ with a·dx⁻² = 1/m
                        velocity[k] = units.a_vel(j, dx) / (dx * dx) * g[j * d + k];
                    }
                    Sample::new(j, position, velocity, units.masses[j])
                })
                .collect();
            Cortege { id: i as u64, members }
        })
        .collect();
    let report = SamplingReport { one_sided_cells, isolated_cells: sampled_isolated.len() };
    Ok((corteges, report))
}

/// Born-sampled swarms, one per particle, with phase-gradient velocities.
///
/// Sample `i` of every swarm comes from the same configuration point, so for a
/// product state the swarms can be re-joined at random without loss.
pub fn swarm_from_wavefunction(
    wf: &GridWavefunction,
    count: usize,
    units: &UnitsConfig,
    seed: u64,
) -> Result<(Vec<Vec<Sample>>, SamplingReport)> {
    let (corteges, report) = sample_corteges(wf, count, units, seed)?;
    let mut swarms = vec![Vec::with_capacity(count); wf.n_particles()];
    for c in corteges {
        for s in c.members {
            swarms[s.slot].push(s);
        }
    }
    Ok((swarms, report))
}

/// Cortege ensemble whose joint positions follow `|Φ|²` (the Born condition).
pub fn cortege_ensemble_from_entangled(
    wf: &GridWavefunction,
    count: usize,
    units: &UnitsConfig,
    seed: u64,
) -> Result<(CortegeEnsemble, SamplingReport)> {
    let (corteges, report) = sample_corteges(wf, count, units, seed)?;
    let ensemble = CortegeEnsemble::new(corteges, wf.n_particles(), wf.slot_grid()?)?;
    Ok((ensemble, report))
}

fn occupancy(ensemble: &CortegeEnsemble, config: &SpatialGrid) -> Result<Vec<u32>> {
    let d = ensemble.dim();
    let mut counts = vec![0u32; config.num_cells()];
    for c in &ensemble.corteges {
        let cell = cell_of(&c.configuration_point(d), config)?;
        counts[config.linear_index(&cell)] += 1;
    }
    Ok(counts)
}

const MAX_DENSE_CELLS: usize = 50_000_000;

fn dense_config(ensemble: &CortegeEnsemble, grid: &SpatialGrid) -> Result<SpatialGrid> {
    if grid.dim() != ensemble.dim() {
        return Err(Error::GridMismatch(format!(
            "grid has {} axes, ensemble samples have {}",
            grid.dim(),
            ensemble.dim()
        )));
    }
    let config = grid.configuration(ensemble.n_particles());
    let cells = config
        .cells_per_axis()
        .iter()
        .try_fold(1usize, |acc, &n| acc.checked_mul(n))
        .unwrap_or(usize::MAX);
    if cells > MAX_DENSE_CELLS {
        return Err(Error::contract(format!("dense configuration grid of {cells} cells is too large")));
    }
    Ok(config)
}

/// Cortege histogram over configuration cells, normalized to integrate to one.
pub fn swarm_density(ensemble: &CortegeEnsemble, grid: &SpatialGrid) -> Result<DensityField> {
    if ensemble.is_empty() {
        return Err(Error::contract("density of an empty ensemble"));
    }
    let config = dense_config(ensemble, grid)?;
    let counts = occupancy(ensemble, &config)?;
    let norm = 1.0 / (ensemble.len() as f64 * config.cell_volume());
    Ok(DensityField {
        values: counts.iter().map(|&c| f64::from(c) * norm).collect(),
        grid: config,
    })
}

/// Reconstructs `ψ = sqrt(ρ)·e^{iφ}` from an ensemble.
///
/// The phase is the lattice line integral of `m·v̄` (per-cell mean sample
/// velocity) along the axis-ordered path from `anchor`: first along axis 0,
/// then axis 1, and so on. Each step uses the trapezoid average of the two
/// cells it joins, or the occupied one alone.
pub fn wavefunction_from_swarm(
    ensemble: &CortegeEnsemble,
    grid: &SpatialGrid,
    units: &UnitsConfig,
    anchor: &CellIndex,
) -> Result<(GridWavefunction, ConversionReport)> {
    let density = swarm_density(ensemble, grid)?;
    let config = density.grid.clone();
    let n = ensemble.n_particles();
    let d = ensemble.dim();
    let axes = config.dim();
    if units.masses.len() != n {
        return Err(Error::contract(format!("{} masses for {n} particles", units.masses.len())));
    }
    if anchor.0.len() != axes || anchor.0.iter().zip(config.cells_per_axis()).any(|(&i, &c)| i as usize >= c) {
        return Err(Error::contract("anchor cell outside the configuration grid"));
    }
    let cells = config.num_cells();
    let mut counts = vec![0u32; cells];
    let mut vsum = vec![0.0; cells * axes];
    for c in &ensemble.corteges {
        let idx = config.linear_index(&cell_of(&c.configuration_point(d), &config)?);
        counts[idx] += 1;
        for (j, s) in c.members.iter().enumerate() {
            for k in 0..d {
                vsum[idx * axes + j * d + k] += s.velocity[k];
            }
        }
    }
    let anchor_idx = config.linear_index(anchor);
    if counts[anchor_idx] == 0 {
        return Err(Error::contract("anchor cell holds no corteges"));
    }
    let mean_v = |idx: usize, axis: usize| -> Option<f64> {
        (counts[idx] > 0).then(|| vsum[idx * axes + axis] / f64::from(counts[idx]))
    };

    let dx = config.dx();
    let mut report = ConversionReport {
        occupied_cells: counts.iter().filter(|&&c| c > 0).count(),
        ..Default::default()
    };
    let mut phase: Vec<Option<f64>> = vec![None; cells];
    phase[anchor_idx] = Some(0.0);
    let mut stack = Vec::new();
    for start in 0..cells {
        if phase[start].is_some() {
            continue;
        }
        // walk back along the axis-ordered path until a known phase
        let mut cur = config.cell_from_linear(start);
        loop {
            let idx = config.linear_index(&cur);
            if phase[idx].is_some() {
                break;
            }
            let axis = (0..axes).rev().find(|&a| cur.0[a] != anchor.0[a]).expect("non-anchor cell");
            let mut prev = cur.clone();
            let step: i64 = if cur.0[axis] > anchor.0[axis] { 1 } else { -1 };
            prev.0[axis] = (i64::from(cur.0[axis]) - step) as u32;
            stack.push((idx, config.linear_index(&prev), axis, step));
            cur = prev;
        }
        while let Some((idx, prev_idx, axis, step)) = stack.pop() {
            let avg = match (mean_v(prev_idx, axis), mean_v(idx, axis)) {
                (Some(a), Some(b)) => 0.5 * (a + b),
                (Some(a), None) | (None, Some(a)) => a,
                (None, None) => {
                    report.path_gaps += 1;
                    0.0
                }
            };
            // k·dx²·v̄·Δγ with k·dx² = m and Δγ = ±dx
            let inc = units.k_phase(axis / d, dx) * dx * dx * avg * step as f64 * dx;
            phase[idx] = Some(phase[prev_idx].unwrap() + inc);
        }
    }
    report.disconnected_support = components(&config, &counts) > 1;
    let amps = density
        .values
        .iter()
        .zip(&phase)
        .zip(&counts)
        .map(|((&rho, ph), &c)| {
            if c == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::from_polar(rho.sqrt(), ph.unwrap_or(0.0))
            }
        })
        .collect();
    Ok((GridWavefunction::from_amplitudes(config, n, amps)?, report))
}

/// Face-connected components among occupied cells.
fn components(grid: &SpatialGrid, counts: &[u32]) -> usize {
    let mut seen = vec![false; counts.len()];
    let mut n = 0;
    let mut queue = VecDeque::new();
    for start in 0..counts.len() {
        if counts[start] == 0 || seen[start] {
            continue;
        }
        n += 1;
        seen[start] = true;
        queue.push_back(start);
        while let Some(idx) = queue.pop_front() {
            let cell = grid.cell_from_linear(idx);
            for a in 0..grid.dim() {
                for delta in [-1i64, 1] {
                    let c = i64::from(cell.0[a]) + delta;
                    if c < 0 || c as usize >= grid.cells_per_axis()[a] {
                        continue;
                    }
                    let mut nb = cell.clone();
                    nb.0[a] = c as u32;
                    let j = grid.linear_index(&nb);
                    if counts[j] > 0 && !seen[j] {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                }
            }
        }
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    fn line(lo: f64, hi: f64, dx: f64) -> SpatialGrid {
        SpatialGrid::uniform(1, lo, hi, dx).unwrap()
    }

    fn point_ensemble(points: &[(f64, f64)], grid: SpatialGrid) -> CortegeEnsemble {
        let corteges = points
            .iter()
            .enumerate()
            .map(|(i, &(x, v))| Cortege { id: i as u64, members: vec![Sample::new(0, [x, 0.0, 0.0], [v, 0.0, 0.0], 1.0)] })
            .collect();
        CortegeEnsemble::new(corteges, 1, grid).unwrap()
    }

    #[test]
    fn two_cell_uniform_split() {
        let g = line(0.0, 1.0, 0.5);
        let wf = GridWavefunction::from_fn(&g, 1, |_| Complex64::new(1.0, 0.0)).unwrap();
        let pts = born_sample(&wf, 10_000, 11).unwrap();
        let left = pts.iter().filter(|p| p[0] < 0.5).count() as f64;
        assert!((left - 5000.0).abs() <= 150.0, "{left}");
    }

    #[test]
    fn degenerate_wavefunction_samples_one_cell() {
        let g = line(0.0, 1.0, 0.1);
        let wf = GridWavefunction::from_fn(&g, 1, |x| {
            if (0.3..0.4).contains(&x[0]) {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .unwrap();
        for p in born_sample(&wf, 2000, 3).unwrap() {
            assert!((0.3..0.4).contains(&p[0]), "{p:?}");
        }
    }

    #[test]
    fn unnormalized_input_is_a_contract_violation() {
        let g = line(0.0, 1.0, 0.5);
        let wf = GridWavefunction::from_amplitudes(g.configuration(1), 1, vec![Complex64::new(2.0, 0.0); 2]).unwrap();
        assert!(matches!(born_sample(&wf, 10, 0), Err(Error::Contract(_))));
    }

    #[test]
    fn gaussian_chi_square() {
        let g = line(-6.0, 6.0, 0.2);
        let wf = GridWavefunction::gaussian(&g, &[0.0], &[1.0], &[0.0]).unwrap();
        let n = 100_000;
        let pts = born_sample(&wf, n, 2024).unwrap();
        let mut counts = vec![0usize; g.num_cells()];
        for p in &pts {
            counts[cell_of(p, &g).unwrap().0[0] as usize] += 1;
        }
        let probs: Vec<f64> = wf.amplitudes().iter().map(|a| a.norm_sqr() * g.dx()).collect();
        // merge tail cells so every expected count is ≥ 5
        let (mut chi2, mut dof, mut pe, mut po) = (0.0, 0usize, 0.0, 0.0);
        for (p, &c) in probs.iter().zip(&counts) {
            pe += p * n as f64;
            po += c as f64;
            if pe >= 5.0 {
                chi2 += (po - pe).powi(2) / pe;
                dof += 1;
                pe = 0.0;
                po = 0.0;
            }
        }
        let crit = ChiSquared::new((dof - 1) as f64).unwrap().inverse_cdf(0.99);
        assert!(chi2 < crit, "chi2={chi2} crit={crit}");
    }

    #[test]
    fn sampling_is_deterministic() {
        let g = line(-3.0, 3.0, 0.1);
        let wf = GridWavefunction::gaussian(&g, &[0.0], &[0.7], &[1.0]).unwrap();
        assert_eq!(born_sample(&wf, 9000, 5).unwrap(), born_sample(&wf, 9000, 5).unwrap());
        assert_ne!(born_sample(&wf, 9000, 5).unwrap(), born_sample(&wf, 9000, 6).unwrap());
    }

    #[test]
    fn density_of_single_cell_ensemble() {
        let g = line(0.0, 5.0, 0.5);
        let pts: Vec<(f64, f64)> = (0..100).map(|i| (1.0 + 0.004 * i as f64, 0.0)).collect();
        let e = point_ensemble(&pts, g.clone());
        let rho = swarm_density(&e, &g).unwrap();
        assert!((rho.values[2] - 2.0).abs() < 1e-15);
        assert!((rho.integral() - 1.0).abs() < 1e-12);
        let mut rev = pts.clone();
        rev.reverse();
        assert_eq!(swarm_density(&point_ensemble(&rev, g.clone()), &g).unwrap(), rho);
    }

    #[test]
    fn empty_ensemble_density_errors() {
        let g = line(0.0, 1.0, 0.5);
        let e = CortegeEnsemble::new(vec![], 1, g.clone()).unwrap();
        assert!(swarm_density(&e, &g).is_err());
    }

    #[test]
    fn zero_velocity_gives_zero_phase() {
        let g = line(-3.0, 3.0, 0.1);
        let wf = GridWavefunction::gaussian(&g, &[0.0], &[0.8], &[0.0]).unwrap();
        let units = UnitsConfig::new(vec![1.0]).unwrap();
        let (ens, _) = cortege_ensemble_from_entangled(&wf, 5000, &units, 1).unwrap();
        assert!(ens.corteges.iter().all(|c| c.members[0].velocity[0] == 0.0));
        let anchor = cell_of(&[0.0], &g).unwrap();
        let (back, _) = wavefunction_from_swarm(&ens, &g, &units, &anchor).unwrap();
        let rho = swarm_density(&ens, &g).unwrap();
        for (a, r) in back.amplitudes().iter().zip(&rho.values) {
            assert_eq!(a.im, 0.0);
            assert!((a.re - r.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn plane_wave_phase_from_uniform_velocity() {
        let g = line(0.0, 4.0, 0.1);
        let (m, v0) = (2.0, 0.75);
        let pts: Vec<(f64, f64)> = (0..4000).map(|i| (0.001 * i as f64 + 0.0005, v0)).collect();
        let corteges = pts
            .iter()
            .enumerate()
            .map(|(i, &(x, v))| Cortege { id: i as u64, members: vec![Sample::new(0, [x, 0.0, 0.0], [v, 0.0, 0.0], m)] })
            .collect();
        let e = CortegeEnsemble::new(corteges, 1, g.clone()).unwrap();
        let units = UnitsConfig::new(vec![m]).unwrap();
        let anchor = CellIndex(vec![5]);
        let (wf, report) = wavefunction_from_swarm(&e, &g, &units, &anchor).unwrap();
        assert!(!report.disconnected_support);
        let x0 = g.cell_center(&anchor)[0];
        for c in g.cells() {
            let x = g.cell_center(&c)[0];
            let want = m * v0 * (x - x0);
            let got = wf.amplitudes()[g.linear_index(&c)].arg();
            let diff = (got - want).rem_euclid(2.0 * std::f64::consts::PI);
            let diff = diff.min(2.0 * std::f64::consts::PI - diff);
            assert!(diff <= g.dx() * m * v0, "x={x} got={got} want={want}");
        }
    }

    #[test]
    fn linear_phase_gives_exact_velocity() {
        let g = line(-5.0, 5.0, 0.05);
        let (p, m) = (1.3, 0.7);
        let wf = GridWavefunction::gaussian(&g, &[0.0], &[1.0], &[p]).unwrap();
        let units = UnitsConfig::new(vec![m]).unwrap();
        let (swarms, report) = swarm_from_wavefunction(&wf, 20_000, &units, 9).unwrap();
        assert_eq!(report.isolated_cells, 0);
        for s in &swarms[0] {
            assert!((s.velocity[0] - p / m).abs() < 1e-9, "{}", s.velocity[0]);
        }
    }

    #[test]
    fn disconnected_support_is_flagged() {
        let g = line(0.0, 1.0, 0.1);
        let e = point_ensemble(&[(0.05, 1.0), (0.95, 1.0)], g.clone());
        let units = UnitsConfig::new(vec![1.0]).unwrap();
        let (_, report) = wavefunction_from_swarm(&e, &g, &units, &CellIndex(vec![0])).unwrap();
        assert!(report.disconnected_support);
        assert!(report.path_gaps > 0);
        assert!(wavefunction_from_swarm(&e, &g, &units, &CellIndex(vec![4])).is_err());
    }

    #[test]
    fn bell_state_has_no_cross_corteges() {
        let g = line(0.0, 2.0, 1.0);
        // cells: (0,0) (0,1) (1,0) (1,1)
        let grid = g.configuration(2);
        let amp = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let wf = GridWavefunction::from_amplitudes(grid, 2, vec![amp, zero, zero, amp]).unwrap();
        let units = UnitsConfig::new(vec![1.0, 1.0]).unwrap();
        let count = 10_000;
        let (ens, _) = cortege_ensemble_from_entangled(&wf, count, &units, 77).unwrap();
        let mut aa = 0;
        for c in &ens.corteges {
            let a = c.members[0].position[0] < 1.0;
            let b = c.members[1].position[0] < 1.0;
            assert_eq!(a, b);
            aa += usize::from(a);
        }
        assert!((aa as f64 - 5000.0).abs() <= 150.0, "{aa}");
    }
}
