//! Born-samples a Gaussian packet and compares the histogram with |ψ|².

use cortege::lattice::{cell_of, SpatialGrid};
use cortege::wavefield::{born_sample, GridWavefunction};

fn main() -> cortege::Result<()> {
    let grid = SpatialGrid::uniform(1, -4.0, 4.0, 0.5)?;
    let wf = GridWavefunction::gaussian(&grid, &[0.0], &[1.0], &[0.0])?;
    let n = 50_000;
    let points = born_sample(&wf, n, 1)?;
    let mut counts = vec![0usize; grid.num_cells()];
    for p in &points {
        counts[grid.linear_index(&cell_of(p, &grid)?)] += 1;
    }
    println!("{:>6} {:>9} {:>9}", "x", "sampled", "exact");
    for (cell, (c, a)) in grid.cells().zip(counts.iter().zip(wf.amplitudes())) {
        let x = grid.cell_center(&cell)[0];
        let sampled = *c as f64 / n as f64;
        let exact = a.norm_sqr() * grid.cell_volume();
        println!("{x:>6.2} {sampled:>9.5} {exact:>9.5}");
    }
    Ok(())
}
