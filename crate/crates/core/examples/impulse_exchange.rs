//! Velocity exchange inside shared cells leaves per-slot impulse and energy unchanged.

use cortege::dynamics::{exchange_step, kinetic_energy_per_slot, total_impulse, ExchangeParams};
use cortege::lattice::SpatialGrid;
use cortege::rng;
use cortege::swarm::{Cortege, CortegeEnsemble, Sample};
use rand::Rng;

fn main() -> cortege::Result<()> {
    let grid = SpatialGrid::uniform(1, 0.0, 1.0, 0.1)?;
    let mut r = rng::stream(1, &[]);
    let corteges = (0..5000)
        .map(|id| Cortege {
            id,
            members: (0..2)
                .map(|j| Sample::new(j, [r.random(), 0.0, 0.0], [r.random::<f64>() - 0.5 + j as f64, 0.0, 0.0], 1.0))
                .collect(),
        })
        .collect();
    let mut ens = CortegeEnsemble::new(corteges, 2, grid)?;
    let first_before = ens.corteges[0].members[0].velocity[0];
    let params = ExchangeParams { intensity_c: 40.0, dx: 0.25, dt: 0.01 };
    println!("before: impulse {:?} kinetic {:?}", total_impulse(&ens), kinetic_energy_per_slot(&ens));
    let mut buckets = 0;
    for step in 0..200 {
        buckets += exchange_step(&mut ens, &params, step)?;
    }
    println!("after:  impulse {:?} kinetic {:?}", total_impulse(&ens), kinetic_energy_per_slot(&ens));
    println!(
        "{buckets} bucket visits; cortege 0 slot 0 velocity {first_before:.4} -> {:.4}",
        ens.corteges[0].members[0].velocity[0]
    );
    Ok(())
}
