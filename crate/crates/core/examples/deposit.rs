//! Coherent against random-phase deposits of l equal amplitudes.

use cortege::oracle::{deposit_monte_carlo, interference_deposit};

fn main() -> cortege::Result<()> {
    let (d1, d2) = interference_deposit(4, 1.0, &[0.0, 1.0, 2.0, 3.0])?;
    println!("l=4, phases 0..3: d1={d1}, d2={d2:.4}");
    for l in [1, 2, 4, 16, 64] {
        let s = deposit_monte_carlo(l, 1.0, 100_000, 1)?;
        println!("l={l:>2}: d1={:>6} mean d2={:>7.3} ratio={:.3}", s.d1, s.mean_d2, s.ratio());
    }
    Ok(())
}
