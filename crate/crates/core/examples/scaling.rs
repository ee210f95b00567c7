//! Cost of one evolve step for growing particle counts at fixed ensemble size.

use std::time::Instant;

use cortege::dynamics::{evolve_steps, Dynamics};
use cortege::lattice::SpatialGrid;
use cortege::potential::{PairPotential, PairTopology, PotentialSpec};
use cortege::swarm::{Cortege, CortegeEnsemble, Sample};

fn main() -> cortege::Result<()> {
    let grid = SpatialGrid::uniform(1, -80.0, 80.0, 0.1)?;
    let dynamics = Dynamics {
        external: PotentialSpec::Zero,
        pair: Some(PairPotential { potential: PotentialSpec::Morse { depth: 1.0, alpha: 1.0, r0: 4.0 }, topology: PairTopology::Chain }),
        exchange_intensity: 5.0,
        exchange_dx: None,
        friction: 0.0,
        dt: 0.01,
    };
    for n in [2, 4, 8, 16] {
        let corteges = (0..10_000u64)
            .map(|id| Cortege {
                id,
                members: (0..n).map(|j| Sample::new(j, [4.0 * j as f64 - 30.0 + (id % 97) as f64 * 0.01, 0.0, 0.0], [0.0; 3], 1.0)).collect(),
            })
            .collect();
        let mut ens = CortegeEnsemble::new(corteges, n, grid.clone())?;
        let t = Instant::now();
        evolve_steps(&mut ens, &dynamics, 20, 1)?;
        println!("n={n:>2}: {:.2} ms/step", t.elapsed().as_secs_f64() * 1e3 / 20.0);
    }
    Ok(())
}
