//! Grid solver checks: a coherent state returns after one period and a free packet spreads.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use cortege::lattice::SpatialGrid;
use cortege::oracle::{density_width, l1_density_distance, SchrodingerSolver};
use cortege::potential::PotentialSpec;
use cortege::wavefield::{GridWavefunction, UnitsConfig};

fn main() -> cortege::Result<()> {
    let grid = SpatialGrid::uniform(1, -8.0, 8.0, 0.05)?;
    let units = UnitsConfig::new(vec![1.0])?;
    let wf = GridWavefunction::gaussian(&grid, &[1.0], &[FRAC_1_SQRT_2], &[0.0])?;
    let solver = SchrodingerSolver::new(PotentialSpec::Harmonic { omega: 1.0, center: 0.0 }, units.clone());
    for frac in [0.25, 0.5, 1.0] {
        let out = solver.propagate(&wf, frac * TAU, 1e-3)?;
        println!("t = {frac:.2}·2π: L1 to initial density {:.3e}", l1_density_distance(&wf.density(), &out.density())?);
    }
    let free = SchrodingerSolver::new(PotentialSpec::Zero, units);
    let packet = GridWavefunction::gaussian(&grid, &[0.0], &[0.5], &[0.0])?;
    for t in [0.5, 1.0, 2.0] {
        let w = density_width(&free.propagate(&packet, t, 1e-3)?);
        let analytic = 0.5 * (1.0 + t * t / (4.0 * 0.5f64.powi(4))).sqrt();
        println!("t = {t}: width {w:.4}, analytic {analytic:.4}");
    }
    Ok(())
}
