//! Scenario files, reaction channels and the runs behind the CLI.
//!
//! A scenario is a TOML document:
//!
//! ```toml
//! seed = 42
//!
//! [system]
//! dim = 1
//! masses = [1.0, 1.0]
//! samples = 10000          # samples per particle swarm
//!
//! [grid]
//! lo = [-30.0]
//! hi = [30.0]
//! dx = 0.1
//!
//! [dynamics]
//! dt = 0.02
//! friction = 0.01
//! exchange_intensity = 5.0
//! duration = 6.0           # evolve mode
//!
//! [external]
//! kind = "zero"
//!
//! [pair]
//! kind = "morse"
//! depth = 1.0
//! alpha = 1.0
//! r0 = 2.0
//!
//! [selection]
//! delta_t = 6.0
//! max_iters = 6
//! selection_dx = 0.5
//!
//! [[initial]]              # one packet per particle
//! center = [-1.0]
//! width = [0.7]
//! velocity = [1.4]
//! ```
//!
//! Optional sections: `[classify]` (`r_cut`), `[oracle]` (`time`, `dt`),
//! `[deposit]` (`l`, `trials`, `a_mod`) and `[output]` (`dir`).

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{evolve, Dynamics};
use crate::error::{Error, Result};
use crate::lattice::SpatialGrid;
use crate::oracle::{deposit_monte_carlo, l1_density_distance, SchrodingerSolver};
use crate::potential::{PairPotential, PotentialSpec};
use crate::rng;
use crate::selection::{run_selection, ChainDigest, ChannelCount, OutcomeClassifier, SelectionConfig, SelectionRun};
use crate::swarm::{Cortege, CortegeEnsemble, Sample};
use crate::wavefield::{cortege_ensemble_from_entangled, swarm_density, swarm_from_wavefunction, GridWavefunction, UnitsConfig};

/// Environment variable that overrides every other output directory setting.
pub const OUT_DIR_ENV: &str = "CORTEGE_OUT_DIR";

const TAG_INIT: u64 = 0x1417;
const TAG_ASSEMBLE: u64 = 0xa55f;
const TAG_EVOLVE: u64 = 0xe70;
const TAG_SAMPLE: u64 = 0x5a;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub dim: usize,
    pub masses: Vec<f64>,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub dx: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsSection {
    pub dt: f64,
    #[serde(default)]
    pub friction: f64,
    #[serde(default)]
    pub exchange_intensity: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exchange_dx: Option<f64>,
    /// Length of a single `evolve` run.
    #[serde(default)]
    pub duration: f64,
}

/// Gaussian packet of one particle: density std `width`, mean velocity `velocity`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialPacket {
    pub center: Vec<f64>,
    pub width: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub velocity: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifySection {
    /// Separation beyond which a pair is never bound; defaults to `5·r0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_cut: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    pub time: f64,
    /// Solver step; defaults to the dynamics step.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DepositSection {
    #[serde(default = "default_deposit_l")]
    pub l: Vec<usize>,
    #[serde(default = "default_deposit_trials")]
    pub trials: usize,
    #[serde(default = "default_a_mod")]
    pub a_mod: f64,
}

fn default_deposit_l() -> Vec<usize> {
    vec![2, 4, 16]
}

fn default_deposit_trials() -> usize {
    100_000
}

fn default_a_mod() -> f64 {
    1.0
}

impl Default for DepositSection {
    fn default() -> Self {
        Self { l: default_deposit_l(), trials: default_deposit_trials(), a_mod: default_a_mod() }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub seed: u64,
    pub system: SystemSection,
    pub grid: GridSection,
    pub dynamics: DynamicsSection,
    #[serde(default)]
    pub external: PotentialSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<PairPotential>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selection: Option<SelectionConfig>,
    pub initial: Vec<InitialPacket>,
    #[serde(default)]
    pub classify: ClassifySection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deposit: Option<DepositSection>,
    #[serde(default)]
    pub output: OutputSection,
}

fn field(path: &str, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("{path}: {msg}"))
}

fn finite(path: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(field(path, format!("{v} is not finite")))
    }
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn n_particles(&self) -> usize {
        self.system.masses.len()
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.system.dim;
        if !(1..=3).contains(&d) {
            return Err(field("system.dim", "must be 1, 2 or 3"));
        }
        let n = self.n_particles();
        if n == 0 {
            return Err(field("system.masses", "needs at least one particle"));
        }
        for (j, m) in self.system.masses.iter().enumerate() {
            if !(*m > 0.0 && m.is_finite()) {
                return Err(field(&format!("system.masses[{j}]"), "must be positive and finite"));
            }
        }
        if self.system.samples == 0 {
            return Err(field("system.samples", "must be at least 1"));
        }
        if self.grid.lo.len() != d || self.grid.hi.len() != d {
            return Err(field("grid", format!("lo and hi need {d} entries")));
        }
        self.grid().map_err(|e| field("grid", e))?;
        for (name, v) in [
            ("dynamics.dt", self.dynamics.dt),
            ("dynamics.friction", self.dynamics.friction),
            ("dynamics.exchange_intensity", self.dynamics.exchange_intensity),
            ("dynamics.duration", self.dynamics.duration),
        ] {
            finite(name, v)?;
        }
        self.dynamics().validate().map_err(|e| field("dynamics", e))?;
        self.external.validate().map_err(|e| field("external", e))?;
        if let Some(p) = &self.pair {
            p.potential.validate().map_err(|e| field("pair", e))?;
            if let PotentialSpec::Morse { r0, .. } = p.potential {
                let extent = self.grid.hi.iter().zip(&self.grid.lo).map(|(h, l)| h - l).fold(f64::INFINITY, f64::min);
                if !(r0 > 0.0 && r0 < extent) {
                    return Err(field("pair.r0", format!("{r0} does not fit inside the grid extent {extent}")));
                }
            }
        }
        if let Some(s) = &self.selection {
            s.validate().map_err(|e| field("selection", e))?;
        }
        if self.initial.len() != n {
            return Err(field("initial", format!("{} packets for {n} particles", self.initial.len())));
        }
        let grid = self.grid()?;
        for (j, p) in self.initial.iter().enumerate() {
            let at = format!("initial[{j}]");
            if p.center.len() != d || p.width.len() != d || !(p.velocity.is_empty() || p.velocity.len() == d) {
                return Err(field(&at, format!("center, width and velocity need {d} entries")));
            }
            if !grid.contains(&p.center) {
                return Err(field(&format!("{at}.center"), "outside the grid"));
            }
            if p.width.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
                return Err(field(&format!("{at}.width"), "must be positive"));
            }
            for v in &p.velocity {
                finite(&format!("{at}.velocity"), *v)?;
            }
        }
        if let Some(r) = self.classify.r_cut {
            if !(r > 0.0 && r.is_finite()) {
                return Err(field("classify.r_cut", "must be positive"));
            }
        }
        if let Some(o) = &self.oracle {
            finite("oracle.time", o.time)?;
            if o.time < 0.0 || o.dt.is_some_and(|t| !(t > 0.0)) {
                return Err(field("oracle", "time must be non-negative and dt positive"));
            }
        }
        if let Some(dep) = &self.deposit {
            if dep.l.is_empty() || dep.l.contains(&0) || dep.trials == 0 || !(dep.a_mod > 0.0) {
                return Err(field("deposit", "needs l ≥ 1, trials ≥ 1 and a_mod > 0"));
            }
        }
        Ok(())
    }

    /// Single-particle grid.
    pub fn grid(&self) -> Result<SpatialGrid> {
        SpatialGrid::new(self.grid.lo.clone(), self.grid.hi.clone(), self.grid.dx)
    }

    pub fn units(&self) -> Result<UnitsConfig> {
        UnitsConfig::new(self.system.masses.clone())
    }

    pub fn dynamics(&self) -> Dynamics {
        Dynamics {
            external: self.external.clone(),
            pair: self.pair.clone(),
            exchange_intensity: self.dynamics.exchange_intensity,
            exchange_dx: self.dynamics.exchange_dx,
            friction: self.dynamics.friction,
            dt: self.dynamics.dt,
        }
    }

    fn packet_wavefunction(&self, j: usize, grid: &SpatialGrid) -> Result<GridWavefunction> {
        let p = &self.initial[j];
        let m = self.system.masses[j];
        let momentum: Vec<f64> = if p.velocity.is_empty() {
            vec![0.0; p.center.len()]
        } else {
            p.velocity.iter().map(|v| m * v).collect()
        };
        GridWavefunction::gaussian(grid, &p.center, &p.width, &momentum)
    }

    /// Born-sampled swarm of every particle from its initial packet.
    pub fn initial_swarms(&self, seed: u64) -> Result<Vec<Vec<Sample>>> {
        let grid = self.grid()?;
        (0..self.n_particles())
            .map(|j| {
                let wf = self.packet_wavefunction(j, &grid)?;
                let units = UnitsConfig::new(vec![self.system.masses[j]])?;
                let (mut swarms, _) = swarm_from_wavefunction(&wf, self.system.samples, &units, rng::derive_seed(seed, &[TAG_INIT, j as u64]))?;
                let mut swarm = swarms.remove(0);
                for s in &mut swarm {
                    s.slot = j;
                }
                Ok(swarm)
            })
            .collect()
    }

    /// Initial swarms joined into corteges at random.
    pub fn initial_ensemble(&self, seed: u64) -> Result<CortegeEnsemble> {
        let swarms = self.initial_swarms(seed)?;
        CortegeEnsemble::assemble_random(swarms, self.grid()?, &mut rng::stream(seed, &[TAG_ASSEMBLE]))
    }

    /// Product of the initial packets on the configuration grid.
    pub fn initial_wavefunction(&self) -> Result<GridWavefunction> {
        let grid = self.grid()?;
        let factors = (0..self.n_particles()).map(|j| self.packet_wavefunction(j, &grid)).collect::<Result<Vec<_>>>()?;
        GridWavefunction::product(&factors)
    }

    /// Bound/unbound classifier for two-particle scenarios with a pair potential.
    pub fn classifier(&self) -> Result<BoundClassifier> {
        if self.n_particles() != 2 {
            return Err(Error::Unsupported(format!("channel classification needs 2 particles, got {}", self.n_particles())));
        }
        let pair = self
            .pair
            .as_ref()
            .ok_or_else(|| Error::Unsupported("channel classification needs a pair potential".into()))?;
        let r_cut = match (self.classify.r_cut, &pair.potential) {
            (Some(r), _) => r,
            (None, PotentialSpec::Morse { r0, .. }) => 5.0 * r0,
            (None, _) => return Err(field("classify.r_cut", "required unless the pair potential is morse")),
        };
        Ok(BoundClassifier { pair: pair.potential.clone(), r_cut })
    }
}

/// Reaction channel of a two-particle cortege.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    Bound,
    Unbound,
}

impl Channel {
    pub fn label(self) -> &'static str {
        match self {
            Channel::Bound => "bound",
            Channel::Unbound => "unbound",
        }
    }
}

/// Bound iff `½μ|v₁-v₂|² + V(|r₁-r₂|) < 0` and `|r₁-r₂| < r_cut`.
pub fn classify_outcome(cortege: &Cortege, pair: &PotentialSpec, r_cut: f64) -> Result<Channel> {
    let [a, b] = cortege.members.as_slice() else {
        return Err(Error::Unsupported(format!(
            "bound/unbound classification needs 2 particles, cortege {} has {}",
            cortege.id,
            cortege.members.len()
        )));
    };
    let mu = a.mass * b.mass / (a.mass + b.mass);
    let mut r2 = 0.0;
    let mut v2 = 0.0;
    for k in 0..3 {
        r2 += (a.position[k] - b.position[k]).powi(2);
        v2 += (a.velocity[k] - b.velocity[k]).powi(2);
    }
    let r = r2.sqrt();
    let energy = 0.5 * mu * v2 + pair.energy(r, mu);
    Ok(if energy < 0.0 && r < r_cut { Channel::Bound } else { Channel::Unbound })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundClassifier {
    pub pair: PotentialSpec,
    pub r_cut: f64,
}

impl OutcomeClassifier for BoundClassifier {
    fn labels(&self) -> Vec<String> {
        vec![Channel::Bound.label().into(), Channel::Unbound.label().into()]
    }

    fn classify(&self, cortege: &Cortege) -> Result<usize> {
        Ok(classify_outcome(cortege, &self.pair, self.r_cut)? as usize)
    }
}

/// Channel counts of one iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeReport {
    pub iteration: usize,
    pub total: usize,
    pub channels: Vec<ChannelCount>,
}

impl OutcomeReport {
    pub fn count(&self, label: &str) -> usize {
        self.channels.iter().find(|c| c.label == label).map_or(0, |c| c.count)
    }

    pub fn fraction(&self, label: &str) -> f64 {
        self.count(label) as f64 / self.total as f64
    }

    pub fn fractions(&self) -> Vec<f64> {
        self.channels.iter().map(|c| c.count as f64 / self.total as f64).collect()
    }

    /// Reports of every iteration that carries a channel histogram.
    pub fn from_digest(digest: &ChainDigest) -> Vec<OutcomeReport> {
        digest
            .records
            .iter()
            .filter(|r| !r.channels.is_empty())
            .map(|r| OutcomeReport {
                iteration: r.iteration,
                total: r.channels.iter().map(|c| c.count).sum(),
                channels: r.channels.clone(),
            })
            .collect()
    }

    /// `iteration,bound_count,unbound_count,bound_frac`
    pub fn series_csv(reports: &[OutcomeReport]) -> String {
        let mut s = String::from("iteration,bound_count,unbound_count,bound_frac\n");
        for r in reports {
            let _ = writeln!(s, "{},{},{},{}", r.iteration, r.count("bound"), r.count("unbound"), r.fraction("bound"));
        }
        s
    }
}

/// `cortege_id,slot,x0..,v0..` with one row per sample.
pub fn sample_dump_csv(ensemble: &CortegeEnsemble) -> String {
    let d = ensemble.dim();
    let mut s = String::from("cortege_id,slot");
    for k in 0..d {
        let _ = write!(s, ",x{k}");
    }
    for k in 0..d {
        let _ = write!(s, ",v{k}");
    }
    s.push('\n');
    for c in &ensemble.corteges {
        for m in &c.members {
            let _ = write!(s, "{},{}", c.id, m.slot);
            for x in &m.position[..d] {
                let _ = write!(s, ",{x}");
            }
            for v in &m.velocity[..d] {
                let _ = write!(s, ",{v}");
            }
            s.push('\n');
        }
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Evolve,
    Select,
    OracleCompare,
    DepositCheck,
}

/// Output directory: the environment override, else `cli`, else the config, else `out`.
pub fn resolve_out_dir(cli: Option<&Path>, config: &ScenarioConfig) -> PathBuf {
    if let Some(dir) = std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()) {
        return PathBuf::from(dir);
    }
    cli.map(Path::to_path_buf)
        .or_else(|| config.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn write_file(dir: &Path, name: &str, body: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, body).map_err(|e| Error::io(&path, e))
}

/// Runs one mode, writes its artifacts into `out_dir` and returns a one-line summary.
pub fn run_scenario(config: &ScenarioConfig, mode: Mode, seed: u64, out_dir: &Path) -> Result<String> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    match mode {
        Mode::Evolve => run_evolve(config, seed, out_dir),
        Mode::Select => run_select(config, seed, out_dir).map(|(summary, _)| summary),
        Mode::OracleCompare => run_oracle_compare(config, seed, out_dir),
        Mode::DepositCheck => run_deposit_check(config, seed, out_dir),
    }
}

fn run_evolve(config: &ScenarioConfig, seed: u64, out: &Path) -> Result<String> {
    let mut ensemble = config.initial_ensemble(seed)?;
    write_file(out, "initial_samples.csv", &sample_dump_csv(&ensemble))?;
    let digest = evolve(&mut ensemble, &config.dynamics(), config.dynamics.duration, rng::derive_seed(seed, &[TAG_EVOLVE]))?;
    write_file(out, "final_samples.csv", &sample_dump_csv(&ensemble))?;
    write_file(out, "trajectory.csv", &digest.to_csv())?;
    let last = digest.rows.last().expect("digest has a step-0 row");
    Ok(format!(
        "evolve: {} corteges, {} steps, t={}, kinetic={:.6}, occupied_cells={}",
        ensemble.len(),
        last.step,
        last.time,
        last.kinetic,
        last.occupied_cells
    ))
}

/// Full selection chain for one seed; writes `chain.jsonl`, `outcomes.csv` and `final_samples.csv`.
pub fn run_select(config: &ScenarioConfig, seed: u64, out: &Path) -> Result<(String, SelectionRun)> {
    let selection = config.selection.as_ref().ok_or_else(|| field("selection", "section required for select mode"))?;
    let classifier = config.classifier().ok();
    let swarms = config.initial_swarms(seed)?;
    let run = run_selection(
        swarms,
        &config.grid()?,
        &config.dynamics(),
        selection,
        seed,
        classifier.as_ref().map(|c| c as &dyn OutcomeClassifier),
        |_| {},
    )?;
    write_file(out, "chain.jsonl", &run.digest.to_jsonl())?;
    write_file(out, "final_samples.csv", &sample_dump_csv(&run.final_ensemble))?;
    let reports = OutcomeReport::from_digest(&run.digest);
    let mut summary = format!("select: {} iterations, stop={:?}", run.digest.records.len(), run.digest.stop);
    if let (Some(first), Some(last)) = (reports.first(), reports.last()) {
        write_file(out, "outcomes.csv", &OutcomeReport::series_csv(&reports))?;
        let _ = write!(summary, ", bound fraction {:.4} -> {:.4}", first.fraction("bound"), last.fraction("bound"));
    }
    Ok((summary, run))
}

/// Independent selection chains, one per seed, each in `out/seed-<seed>`.
pub fn run_select_batch(config: &ScenarioConfig, seeds: &[u64], out: &Path) -> Result<Vec<SelectionRun>> {
    seeds
        .par_iter()
        .map(|&seed| {
            let dir = out.join(format!("seed-{seed}"));
            fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
            run_select(config, seed, &dir).map(|(_, run)| run)
        })
        .collect()
}

/// Swarm density after `oracle.time` against the grid solver, as an L1 distance.
pub fn oracle_compare(config: &ScenarioConfig, seed: u64) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    let o = config.oracle.as_ref().ok_or_else(|| field("oracle", "section required for oracle-compare mode"))?;
    let wf0 = config.initial_wavefunction()?;
    let units = config.units()?;
    let (mut ensemble, _) = cortege_ensemble_from_entangled(&wf0, config.system.samples, &units, rng::derive_seed(seed, &[TAG_SAMPLE]))?;
    evolve(&mut ensemble, &config.dynamics(), o.time, rng::derive_seed(seed, &[TAG_EVOLVE]))?;
    let swarm = swarm_density(&ensemble, &config.grid()?)?;
    let mut solver = SchrodingerSolver::new(config.external.clone(), units);
    solver.pair = config.pair.as_ref().map(|p| p.potential.clone());
    let exact = solver.propagate(&wf0, o.time, o.dt.unwrap_or(config.dynamics.dt))?.density();
    let l1 = l1_density_distance(&swarm, &exact)?;
    Ok((l1, swarm.values, exact.values))
}

fn run_oracle_compare(config: &ScenarioConfig, seed: u64, out: &Path) -> Result<String> {
    let (l1, swarm, exact) = oracle_compare(config, seed)?;
    let grid = config.initial_wavefunction()?.grid().clone();
    let mut csv = String::new();
    for k in 0..grid.dim() {
        let _ = write!(csv, "c{k},");
    }
    csv.push_str("swarm,oracle\n");
    for (cell, (a, b)) in grid.cells().zip(swarm.iter().zip(&exact)) {
        for x in grid.cell_center(&cell) {
            let _ = write!(csv, "{x},");
        }
        let _ = writeln!(csv, "{a},{b}");
    }
    write_file(out, "oracle_density.csv", &csv)?;
    let t = config.oracle.as_ref().map_or(0.0, |o| o.time);
    Ok(format!("oracle-compare: L1={l1:.6} at t={t} with {} samples", config.system.samples))
}

fn run_deposit_check(config: &ScenarioConfig, seed: u64, out: &Path) -> Result<String> {
    let dep = config.deposit.clone().unwrap_or_default();
    let mut csv = String::from("l,trials,d1,mean_d2,ratio\n");
    let mut parts = Vec::new();
    for &l in &dep.l {
        let s = deposit_monte_carlo(l, dep.a_mod, dep.trials, seed)?;
        let _ = writeln!(csv, "{},{},{},{},{}", s.l, s.trials, s.d1, s.mean_d2, s.ratio());
        parts.push(format!("l={l} ratio={:.4}", s.ratio()));
    }
    write_file(out, "deposit.csv", &csv)?;
    Ok(format!("deposit-check: {}", parts.join(", ")))
}
