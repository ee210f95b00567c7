//! Selection chain on the bundled H₂⁺ fixture; prints the channel series.
//!
//! `cargo run --release --example h2plus_selection -- [seed]`

use cortege::scenario::{OutcomeReport, ScenarioConfig};
use cortege::selection::{run_selection, OutcomeClassifier};

fn main() -> cortege::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(42);
    let cfg = ScenarioConfig::from_toml(include_str!("../fixtures/h2plus.toml"))?;
    let classifier = cfg.classifier()?;
    let run = run_selection(
        cfg.initial_swarms(seed)?,
        &cfg.grid()?,
        &cfg.dynamics(),
        cfg.selection.as_ref().expect("fixture has a selection section"),
        seed,
        Some(&classifier as &dyn OutcomeClassifier),
        |view| {
            let r = view.record;
            println!("iteration {}: k={} k1={} right={} wrong={} top={:?}", r.iteration, r.groups, r.k1, r.right, r.wrong, &r.top_groups[..3]);
        },
    )?;
    print!("{}", OutcomeReport::series_csv(&OutcomeReport::from_digest(&run.digest)));
    println!("stopped: {:?}", run.digest.stop);
    Ok(())
}
