//! Amplitude grain: reduction of small summands and collapse frequencies of the random walk.

use cortege::rng;
use cortege::wavefield::{amplitude_grain_reduce, grain_collapse_walk, AmplitudeVector};

fn main() -> cortege::Result<()> {
    let state = AmplitudeVector::from_real(&[0.6, 0.8])?;
    let reduced = amplitude_grain_reduce(&state, 0.7)?;
    println!("reduce (0.6, 0.8) at ε=0.7 -> ({}, {})", reduced.get(&[0]), reduced.get(&[1]));

    let weights = [0.5, 0.3, 0.2];
    let state = AmplitudeVector::from_real(&weights.map(f64::sqrt))?;
    let trials = 5000;
    let mut hits = [0usize; 3];
    let mut r = rng::stream(4, &[]);
    for _ in 0..trials {
        hits[grain_collapse_walk(&state, 0.03, 0.05, &mut r)?[0] as usize] += 1;
    }
    for (j, (h, w)) in hits.iter().zip(weights).enumerate() {
        println!("state {j}: frequency {:.3}, |λ|² {w}", *h as f64 / trials as f64);
    }
    Ok(())
}
