//! Wavefunction → swarm → wavefunction, then the result in the text format.

use cortege::lattice::{cell_of, SpatialGrid};
use cortege::wavefield::{
    cortege_ensemble_from_entangled, phase_gradient_field, wavefunction_from_swarm, write_wavefunction, GridWavefunction,
    UnitsConfig,
};

fn main() -> cortege::Result<()> {
    let grid = SpatialGrid::uniform(1, -5.0, 5.0, 0.25)?;
    let momentum = 2.0;
    let wf = GridWavefunction::gaussian(&grid, &[0.0], &[1.0], &[momentum])?;
    let units = UnitsConfig::new(vec![1.0])?;
    let (swarm, sampling) = cortege_ensemble_from_entangled(&wf, 100_000, &units, 7)?;
    let (back, report) = wavefunction_from_swarm(&swarm, &grid, &units, &cell_of(&[0.0], &grid)?)?;

    let amp_err: f64 = wf.amplitudes().iter().zip(back.amplitudes()).map(|(a, b)| (a.norm() - b.norm()).abs()).sum::<f64>() * grid.dx();
    let (grads, _) = phase_gradient_field(&back);
    let worst = grads.iter().zip(back.amplitudes()).filter(|(_, a)| a.norm() > 0.0).map(|(g, _)| (g[0] - momentum).abs()).fold(0.0, f64::max);
    println!("sampling: {sampling:?}");
    println!("conversion: {report:?}");
    println!("L1 |ψ| error {amp_err:.4}, worst phase-gradient error {worst:.2e}");

    let mut text = Vec::new();
    write_wavefunction(&back, &mut text).expect("writing to memory");
    for line in String::from_utf8_lossy(&text).lines().take(6) {
        println!("{line}");
    }
    Ok(())
}
