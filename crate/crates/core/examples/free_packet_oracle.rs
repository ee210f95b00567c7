//! Swarm density of a moving packet against the Crank–Nicolson solution.

use cortege::dynamics::{evolve, Dynamics};
use cortege::lattice::SpatialGrid;
use cortege::oracle::{l1_density_distance, SchrodingerSolver};
use cortege::potential::PotentialSpec;
use cortege::wavefield::{cortege_ensemble_from_entangled, swarm_density, GridWavefunction, UnitsConfig};

fn main() -> cortege::Result<()> {
    let grid = SpatialGrid::uniform(1, -10.0, 10.0, 0.05)?;
    let wf0 = GridWavefunction::gaussian(&grid, &[-1.0], &[1.0], &[1.0])?;
    let units = UnitsConfig::new(vec![1.0])?;
    let mut dynamics = Dynamics::free(0.01);
    dynamics.exchange_intensity = 5.0;
    let exact = SchrodingerSolver::new(PotentialSpec::Zero, units.clone()).propagate(&wf0, 0.5, 1e-3)?.density();
    for n in [1_000, 10_000, 100_000] {
        let (mut ens, _) = cortege_ensemble_from_entangled(&wf0, n, &units, 3)?;
        evolve(&mut ens, &dynamics, 0.5, 3)?;
        let d = l1_density_distance(&swarm_density(&ens, &grid)?, &exact)?;
        println!("N={n:>6}: L1 to oracle at t=0.5 = {d:.4}");
    }
    Ok(())
}
