//! Genetic entangling: evolve, group, select, recombine, repeat.
//!
//! One iteration takes an initial ensemble, evolves a copy for `Δt`, and
//! pairs every initial cortege with its final descendant. The pairs are
//! grouped by their cell in double configuration space and the groups ranked
//! by size. Pairs in the first `k₁` groups are *right*; the rest are *wrong*.
//! Right corteges re-enter the next iteration with their recorded initial
//! state. Wrong corteges are dismantled into per-slot pools and rebuilt
//! inside the initial cells of right groups (crossover). The chain stops when
//! the top group sizes stop moving.

use std::collections::{BTreeMap, HashSet};
use std::time::Instant;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{evolve, Dynamics};
use crate::error::{Error, Result};
use crate::lattice::{double_cell_of, DoubleCellIndex, SpatialGrid};
use crate::rng;
use crate::swarm::{Cortege, CortegeEnsemble, Sample};

const TAG_ASSEMBLE: u64 = 0xa55e;
const TAG_EVOLVE: u64 = 0xe7;
const TAG_CROSS: u64 = 0xc7;

/// A cortege at the start and at the end of one repetition.
#[derive(Debug, Clone, PartialEq)]
pub struct PairRecord {
    pub id: u64,
    pub ini: Cortege,
    pub fin: Cortege,
}

/// Pairs that share one double-space cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Group {
    pub cell: DoubleCellIndex,
    pub members: Vec<u64>,
}

/// Groups ranked by size, largest first; ties in cell order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GroupTable {
    pub groups: Vec<Group>,
}

impl GroupTable {
    pub fn counts(&self) -> Vec<usize> {
        self.groups.iter().map(|g| g.members.len()).collect()
    }

    pub fn total(&self) -> usize {
        self.groups.iter().map(|g| g.members.len()).sum()
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }
}

/// How many leading groups count as right.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum K1Rule {
    Fixed(usize),
    /// Smallest prefix of groups holding at least this fraction of all pairs.
    MassFraction(f64),
}

impl Default for K1Rule {
    fn default() -> Self {
        K1Rule::MassFraction(0.5)
    }
}

/// What happens to the pairs that survive selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Replication {
    /// Right corteges restart from their initial snapshots; wrong ones are
    /// rebuilt by crossover.
    #[default]
    Reset,
    /// Wrong corteges are discarded and right ones cloned (positions jittered
    /// by at most `dx/10`) to refill the ensemble.
    Duplicate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectionConfig {
    #[serde(default)]
    pub k1_rule: K1Rule,
    /// Cell size of the double-space division; defaults to the dynamics grid's `dx`.
    #[serde(default)]
    pub selection_dx: Option<f64>,
    /// Duration Δt of one repetition.
    pub delta_t: f64,
    /// Optional per-iteration Δt overrides; iteration `i` uses entry `i` if present.
    #[serde(default)]
    pub delta_t_schedule: Vec<f64>,
    /// δ: largest change of a top-group count still considered stable.
    /// Defaults to `ceil(0.01·N)`.
    #[serde(default)]
    pub stability_tol: Option<usize>,
    /// w: number of consecutive iterations that must agree within δ.
    #[serde(default = "default_window")]
    pub stability_window: usize,
    pub max_iters: usize,
    #[serde(default)]
    pub replication: Replication,
}

fn default_window() -> usize {
    2
}

impl SelectionConfig {
    pub fn new(delta_t: f64, max_iters: usize) -> Self {
        Self {
            k1_rule: K1Rule::default(),
            selection_dx: None,
            delta_t,
            delta_t_schedule: Vec::new(),
            stability_tol: None,
            stability_window: default_window(),
            max_iters,
            replication: Replication::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::config("selection.max_iters must be at least 1"));
        }
        if self.stability_window == 0 {
            return Err(Error::config("selection.stability_window must be at least 1"));
        }
        match self.k1_rule {
            K1Rule::Fixed(0) => return Err(Error::config("selection.k1_rule: fixed k₁ must be positive")),
            K1Rule::MassFraction(t) if !(t > 0.0 && t < 1.0) => {
                return Err(Error::config("selection.k1_rule: mass fraction must lie in (0, 1)"))
            }
            _ => {}
        }
        if let Some(dx) = self.selection_dx {
            if !(dx > 0.0) {
                return Err(Error::config("selection.selection_dx must be positive"));
            }
        }
        if !(self.delta_t >= 0.0) || self.delta_t_schedule.iter().any(|t| !(*t >= 0.0)) {
            return Err(Error::config("selection.delta_t must be non-negative"));
        }
        Ok(())
    }

    pub fn delta_t_for(&self, iteration: usize) -> f64 {
        self.delta_t_schedule.get(iteration).copied().unwrap_or(self.delta_t)
    }

    pub fn selection_grid(&self, grid: &SpatialGrid) -> Result<SpatialGrid> {
        match self.selection_dx {
            Some(dx) => grid.with_dx(dx),
            None => Ok(grid.clone()),
        }
    }

    pub fn tolerance(&self, ensemble_size: usize) -> usize {
        self.stability_tol.unwrap_or_else(|| (ensemble_size as f64 * 0.01).ceil() as usize)
    }
}

/// Groups pairs by double-space cell and ranks the groups.
pub fn group_pairs(pairs: &[PairRecord], grid: &SpatialGrid) -> Result<GroupTable> {
    if pairs.is_empty() {
        return Err(Error::contract("no pairs to group"));
    }
    let d = grid.dim();
    let mut buckets: BTreeMap<DoubleCellIndex, Vec<u64>> = BTreeMap::new();
    for p in pairs {
        let cell = double_cell_of(&p.ini.configuration_point(d), &p.fin.configuration_point(d), grid)?;
        buckets.entry(cell).or_default().push(p.id);
    }
    let mut groups: Vec<Group> = buckets.into_iter().map(|(cell, members)| Group { cell, members }).collect();
    // stable: equal counts keep the BTreeMap (lexicographic) order
    groups.sort_by(|a, b| b.members.len().cmp(&a.members.len()));
    Ok(GroupTable { groups })
}

/// Right/wrong split of cortege ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub k1: usize,
    pub right: Vec<u64>,
    pub wrong: Vec<u64>,
}

/// Number of right groups under `rule`, enforcing `k₁ < k` unless `k = 1`.
pub fn resolve_k1(counts: &[usize], rule: K1Rule) -> usize {
    let k = counts.len();
    if k <= 1 {
        return k;
    }
    let raw = match rule {
        K1Rule::Fixed(k1) => k1,
        K1Rule::MassFraction(theta) => {
            let total: usize = counts.iter().sum();
            let mut acc = 0usize;
            let mut k1 = k;
            for (i, &c) in counts.iter().enumerate() {
                acc += c;
                if acc as f64 >= theta * total as f64 {
                    k1 = i + 1;
                    break;
                }
            }
            k1
        }
    };
    raw.clamp(1, k - 1)
}

pub fn mark_right_wrong(table: &GroupTable, rule: K1Rule) -> Partition {
    let k1 = resolve_k1(&table.counts(), rule);
    let mut right = Vec::new();
    let mut wrong = Vec::new();
    for (i, g) in table.groups.iter().enumerate() {
        if i < k1 {
            right.extend_from_slice(&g.members);
        } else {
            wrong.extend_from_slice(&g.members);
        }
    }
    Partition { k1, right, wrong }
}

fn uniform_in<R: Rng + ?Sized>(r: &mut R, a: f64, b: f64) -> f64 {
    if b > a {
        a + (b - a) * r.random::<f64>()
    } else {
        a
    }
}

/// Keeps right corteges of `ensemble_ini` as they are and rebuilds the wrong ones.
///
/// Wrong corteges are dismantled into one sample pool per slot and each pool
/// is shuffled. Every rebuilt cortege draws a template right group with
/// probability proportional to its size; its slot-`j` member is the next
/// sample of pool `j`, moved to a uniform point of the template's initial
/// slot-`j` cell with its velocity untouched. Rebuilt corteges get fresh ids.
pub fn crossover_reassign(
    ensemble_ini: &CortegeEnsemble,
    table: &GroupTable,
    partition: &Partition,
    selection_grid: &SpatialGrid,
    seed: u64,
) -> Result<CortegeEnsemble> {
    if partition.wrong.is_empty() {
        return Ok(ensemble_ini.clone());
    }
    if partition.k1 == 0 || table.groups.is_empty() {
        return Err(Error::SelectionCollapse { iteration: 0 });
    }
    let wrong: HashSet<u64> = partition.wrong.iter().copied().collect();
    let n = ensemble_ini.n_particles();
    let d = ensemble_ini.dim();
    let mut r = rng::stream(seed, &[TAG_CROSS]);
    let mut kept = Vec::with_capacity(ensemble_ini.len());
    let mut pools: Vec<Vec<Sample>> = vec![Vec::with_capacity(wrong.len()); n];
    for c in &ensemble_ini.corteges {
        if wrong.contains(&c.id) {
            for (j, s) in c.members.iter().enumerate() {
                pools[j].push(*s);
            }
        } else {
            kept.push(c.clone());
        }
    }
    for pool in &mut pools {
        pool.shuffle(&mut r);
    }
    let templates = &table.groups[..partition.k1];
    let weights = WeightedIndex::new(templates.iter().map(|g| g.members.len())).map_err(|e| Error::contract(e.to_string()))?;
    let mut out = CortegeEnsemble::new(kept, n, ensemble_ini.grid().clone())?;
    out.bump_next_id(ensemble_ini.next_id());
    for m in 0..pools[0].len() {
        let template = &templates[weights.sample(&mut r)];
        let members = (0..n)
            .map(|j| {
                let mut s = pools[j][m];
                for (k, &cell) in template.cell.ini.slot(j, d).iter().enumerate() {
                    let (a, b) = selection_grid.cell_bounds(k, cell);
                    s.position[k] = uniform_in(&mut r, a, b);
                }
                s
            })
            .collect();
        let id = out.fresh_id();
        out.corteges.push(Cortege { id, members });
    }
    Ok(out)
}

/// Duplication variant of replication: wrong corteges are replaced by jittered
/// clones of uniformly chosen right corteges.
pub fn duplicate_right(
    ensemble_ini: &CortegeEnsemble,
    partition: &Partition,
    selection_grid: &SpatialGrid,
    seed: u64,
) -> Result<CortegeEnsemble> {
    if partition.wrong.is_empty() {
        return Ok(ensemble_ini.clone());
    }
    if partition.right.is_empty() {
        return Err(Error::SelectionCollapse { iteration: 0 });
    }
    let wrong: HashSet<u64> = partition.wrong.iter().copied().collect();
    let d = ensemble_ini.dim();
    let grid = ensemble_ini.grid();
    let jitter = selection_grid.dx() / 10.0;
    let mut r = rng::stream(seed, &[TAG_CROSS]);
    let kept: Vec<Cortege> = ensemble_ini.corteges.iter().filter(|c| !wrong.contains(&c.id)).cloned().collect();
    let mut out = CortegeEnsemble::new(kept, ensemble_ini.n_particles(), grid.clone())?;
    out.bump_next_id(ensemble_ini.next_id());
    let survivors = out.len();
    for _ in 0..wrong.len() {
        let mut c = out.corteges[r.random_range(0..survivors)].clone();
        for s in &mut c.members {
            for k in 0..d {
                let x = s.position[k] + uniform_in(&mut r, -jitter, jitter);
                s.position[k] = x.clamp(grid.lo()[k], grid.hi()[k]);
            }
        }
        c.id = out.fresh_id();
        out.corteges.push(c);
    }
    Ok(out)
}

/// Result of one selection iteration.
#[derive(Debug, Clone)]
pub struct IterationOutcome {
    /// Initial ensemble for the next iteration.
    pub next: CortegeEnsemble,
    /// The evolved ensemble of this iteration.
    pub final_ensemble: CortegeEnsemble,
    pub table: GroupTable,
    pub partition: Partition,
    pub pairs: Vec<PairRecord>,
}

/// Evolution over Δt, grouping, marking and replication.
pub fn selection_iteration(
    ensemble_ini: &CortegeEnsemble,
    dynamics: &Dynamics,
    config: &SelectionConfig,
    delta_t: f64,
    seed: u64,
) -> Result<IterationOutcome> {
    config.validate()?;
    let mut fin = ensemble_ini.clone();
    evolve(&mut fin, dynamics, delta_t, rng::derive_seed(seed, &[TAG_EVOLVE]))?;
    let pairs: Vec<PairRecord> = ensemble_ini
        .corteges
        .iter()
        .zip(&fin.corteges)
        .map(|(a, b)| PairRecord { id: a.id, ini: a.clone(), fin: b.clone() })
        .collect();
    let selection_grid = config.selection_grid(ensemble_ini.grid())?;
    let table = group_pairs(&pairs, &selection_grid)?;
    let partition = mark_right_wrong(&table, config.k1_rule);
    let cross_seed = rng::derive_seed(seed, &[TAG_CROSS]);
    let next = match config.replication {
        Replication::Reset => crossover_reassign(ensemble_ini, &table, &partition, &selection_grid, cross_seed)?,
        Replication::Duplicate => duplicate_right(ensemble_ini, &partition, &selection_grid, cross_seed)?,
    };
    Ok(IterationOutcome { next, final_ensemble: fin, table, partition, pairs })
}

/// Assigns every cortege to one reaction channel.
pub trait OutcomeClassifier: Sync {
    fn labels(&self) -> Vec<String>;
    fn classify(&self, cortege: &Cortege) -> Result<usize>;
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelCount {
    pub label: String,
    pub count: usize,
}

/// Channel histogram of an ensemble.
pub fn channel_histogram(ensemble: &CortegeEnsemble, classifier: &dyn OutcomeClassifier) -> Result<Vec<ChannelCount>> {
    let labels = classifier.labels();
    let mut counts = vec![0usize; labels.len()];
    for c in &ensemble.corteges {
        let k = classifier.classify(c)?;
        *counts
            .get_mut(k)
            .ok_or_else(|| Error::contract(format!("classifier returned channel {k} of {}", labels.len())))? += 1;
    }
    Ok(labels.into_iter().zip(counts).map(|(label, count)| ChannelCount { label, count }).collect())
}

/// Summary of one link of the chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub seed: u64,
    pub delta_t: f64,
    /// Number of groups k.
    pub groups: usize,
    pub k1: usize,
    pub top_groups: Vec<usize>,
    pub right: usize,
    pub wrong: usize,
    /// Channel histogram of the evolved ensemble.
    pub channels: Vec<ChannelCount>,
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Stable,
    MaxIters,
}

/// The sequence of (initial, final) digests of a selection run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainDigest {
    pub records: Vec<IterationRecord>,
    pub stop: StopReason,
}

impl ChainDigest {
    /// One JSON object per iteration.
    pub fn to_jsonl(&self) -> String {
        let mut s = String::new();
        for r in &self.records {
            s.push_str(&serde_json::to_string(r).expect("records serialize"));
            s.push('\n');
        }
        s
    }
}

/// Everything an observer sees after one iteration.
pub struct IterationView<'a> {
    pub iteration: usize,
    pub ini: &'a CortegeEnsemble,
    pub outcome: &'a IterationOutcome,
    pub record: &'a IterationRecord,
}

/// Output of [`run_selection`].
#[derive(Debug, Clone)]
pub struct SelectionRun {
    pub digest: ChainDigest,
    /// Evolved ensemble of the last iteration.
    pub final_ensemble: CortegeEnsemble,
    /// Initial ensemble the chain would continue from.
    pub next_initial: CortegeEnsemble,
}

fn stable_window(history: &[(usize, Vec<usize>)], window: usize, tol: usize) -> bool {
    if history.len() < window {
        return false;
    }
    let tail = &history[history.len() - window..];
    tail.windows(2).all(|w| {
        let (k1, now) = &w[1];
        let prev = &w[0].1;
        (0..*k1).all(|r| {
            let a = now.get(r).copied().unwrap_or(0);
            let b = prev.get(r).copied().unwrap_or(0);
            a.abs_diff(b) <= tol
        })
    })
}

/// Runs the selection chain from per-particle swarms.
///
/// The first ensemble joins the swarms into corteges at random. The chain
/// stops once the last `stability_window` iterations agree on every top-`k₁`
/// group count within `stability_tol`, or after `max_iters` iterations.
pub fn run_selection(
    swarms: Vec<Vec<Sample>>,
    grid: &SpatialGrid,
    dynamics: &Dynamics,
    config: &SelectionConfig,
    master_seed: u64,
    classifier: Option<&dyn OutcomeClassifier>,
    observer: impl FnMut(&IterationView),
) -> Result<SelectionRun> {
    let mut r = rng::stream(master_seed, &[TAG_ASSEMBLE]);
    let ensemble = CortegeEnsemble::assemble_random(swarms, grid.clone(), &mut r)?;
    run_selection_from(ensemble, dynamics, config, master_seed, classifier, observer)
}

/// As [`run_selection`], starting from an already assembled ensemble.
pub fn run_selection_from(
    mut ensemble: CortegeEnsemble,
    dynamics: &Dynamics,
    config: &SelectionConfig,
    master_seed: u64,
    classifier: Option<&dyn OutcomeClassifier>,
    mut observer: impl FnMut(&IterationView),
) -> Result<SelectionRun> {
    config.validate()?;
    dynamics.validate()?;
    if ensemble.is_empty() {
        return Err(Error::contract("selection needs a non-empty ensemble"));
    }
    let tol = config.tolerance(ensemble.len());
    let mut records = Vec::new();
    let mut history: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut last_final = None;
    let mut stop = StopReason::MaxIters;
    for iteration in 0..config.max_iters {
        let started = Instant::now();
        let seed = rng::derive_seed(master_seed, &[iteration as u64]);
        let delta_t = config.delta_t_for(iteration);
        let outcome = selection_iteration(&ensemble, dynamics, config, delta_t, seed).map_err(|e| match e {
            Error::SelectionCollapse { .. } => Error::SelectionCollapse { iteration },
            other => other,
        })?;
        let channels = match classifier {
            Some(c) => channel_histogram(&outcome.final_ensemble, c)?,
            None => Vec::new(),
        };
        let counts = outcome.table.counts();
        let record = IterationRecord {
            iteration,
            seed,
            delta_t,
            groups: counts.len(),
            k1: outcome.partition.k1,
            top_groups: counts.iter().take(10).copied().collect(),
            right: outcome.partition.right.len(),
            wrong: outcome.partition.wrong.len(),
            channels,
            wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
        };
        observer(&IterationView { iteration, ini: &ensemble, outcome: &outcome, record: &record });
        history.push((outcome.partition.k1, counts));
        records.push(record);
        ensemble = outcome.next;
        last_final = Some(outcome.final_ensemble);
        if stable_window(&history, config.stability_window, tol) {
            stop = StopReason::Stable;
            break;
        }
    }
    Ok(SelectionRun {
        digest: ChainDigest { records, stop },
        final_ensemble: last_final.expect("at least one iteration"),
        next_initial: ensemble,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> SpatialGrid {
        SpatialGrid::uniform(1, 0.0, 10.0, 1.0).unwrap()
    }

    fn cortege(id: u64, xs: &[f64]) -> Cortege {
        Cortege {
            id,
            members: xs.iter().enumerate().map(|(j, &x)| Sample::new(j, [x, 0.0, 0.0], [0.1 * id as f64, 0.0, 0.0], 1.0)).collect(),
        }
    }

    fn pair(id: u64, ini: &[f64], fin: &[f64]) -> PairRecord {
        PairRecord { id, ini: cortege(id, ini), fin: cortege(id, fin) }
    }

    fn table_from_sizes(sizes: &[usize]) -> GroupTable {
        let mut pairs = Vec::new();
        let mut id = 0;
        for (g, &s) in sizes.iter().enumerate() {
            for _ in 0..s {
                pairs.push(pair(id, &[g as f64 + 0.5], &[0.5]));
                id += 1;
            }
        }
        group_pairs(&pairs, &grid()).unwrap()
    }

    #[test]
    fn single_bucket() {
        let pairs: Vec<_> = (0..10).map(|i| pair(i, &[1.1 + 0.01 * i as f64, 2.2], &[3.3, 4.4])).collect();
        let t = group_pairs(&pairs, &grid()).unwrap();
        assert_eq!(t.counts(), vec![10]);
    }

    #[test]
    fn distinct_cells_give_singletons() {
        let pairs: Vec<_> = (0..7).map(|i| pair(i, &[i as f64 + 0.5], &[9.5 - i as f64])).collect();
        let t = group_pairs(&pairs, &grid()).unwrap();
        assert_eq!(t.counts(), vec![1; 7]);
        // ties resolved lexicographically on the double cell
        let cells: Vec<_> = t.groups.iter().map(|g| g.cell.clone()).collect();
        let mut sorted = cells.clone();
        sorted.sort();
        assert_eq!(cells, sorted);
    }

    #[test]
    fn fixed_k1_split() {
        let p = mark_right_wrong(&table_from_sizes(&[7, 3]), K1Rule::Fixed(1));
        assert_eq!((p.right.len(), p.wrong.len()), (7, 3));
    }

    #[test]
    fn mass_fraction_prefix() {
        let p = mark_right_wrong(&table_from_sizes(&[6, 3, 1]), K1Rule::MassFraction(0.75));
        assert_eq!((p.k1, p.right.len(), p.wrong.len()), (2, 9, 1));
    }

    #[test]
    fn single_group_all_right() {
        for rule in [K1Rule::Fixed(3), K1Rule::MassFraction(0.2)] {
            let p = mark_right_wrong(&table_from_sizes(&[5]), rule);
            assert_eq!((p.right.len(), p.wrong.len()), (5, 0));
        }
    }

    #[test]
    fn k1_never_reaches_k() {
        assert_eq!(resolve_k1(&[4, 4, 4], K1Rule::Fixed(9)), 2);
        assert_eq!(resolve_k1(&[4, 4, 4], K1Rule::MassFraction(0.99)), 2);
    }

    #[test]
    fn crossover_without_wrong_is_identity() {
        let e = CortegeEnsemble::new(vec![cortege(0, &[1.5]), cortege(1, &[1.7])], 1, grid()).unwrap();
        let table = GroupTable::default();
        let p = Partition { k1: 1, right: vec![0, 1], wrong: vec![] };
        assert_eq!(crossover_reassign(&e, &table, &p, &grid(), 1).unwrap(), e);
    }

    #[test]
    fn single_template_places_rebuilt_corteges_in_its_cell() {
        // ids 0..4 right (cell ini (2,7)), 4..10 wrong scattered
        let mut corteges = Vec::new();
        let mut pairs = Vec::new();
        for i in 0..4 {
            let c = cortege(i, &[2.5, 7.5]);
            pairs.push(PairRecord { id: i, ini: c.clone(), fin: c.clone() });
            corteges.push(c);
        }
        for i in 4..10 {
            let x = i as f64 - 3.7;
            let c = cortege(i, &[x, 9.2 - x]);
            pairs.push(PairRecord { id: i, ini: c.clone(), fin: c.clone() });
            corteges.push(c);
        }
        let e = CortegeEnsemble::new(corteges, 2, grid()).unwrap();
        let table = group_pairs(&pairs, &grid()).unwrap();
        let p = mark_right_wrong(&table, K1Rule::Fixed(1));
        assert_eq!(p.right, vec![0, 1, 2, 3]);
        let next = crossover_reassign(&e, &table, &p, &grid(), 5).unwrap();
        assert_eq!(next.len(), 10);
        for c in &next.corteges[4..] {
            assert!(c.id >= 10);
            assert!((2.0..3.0).contains(&c.members[0].position[0]));
            assert!((7.0..8.0).contains(&c.members[1].position[0]));
        }
        // velocities of the wrong pools survive as a multiset
        let mut want: Vec<f64> = (4..10).map(|i| 0.1 * i as f64).collect();
        let mut got: Vec<f64> = next.corteges[4..].iter().map(|c| c.members[0].velocity[0]).collect();
        want.sort_by(f64::total_cmp);
        got.sort_by(f64::total_cmp);
        assert_eq!(got, want);
    }

    #[test]
    fn stability_window_rule() {
        let h = vec![(1, vec![10, 5]), (1, vec![12, 3]), (1, vec![12, 4])];
        assert!(stable_window(&h, 2, 0));
        assert!(!stable_window(&h, 3, 1));
        assert!(stable_window(&h, 3, 2));
        assert!(!stable_window(&h[..1], 2, 100));
    }
}
