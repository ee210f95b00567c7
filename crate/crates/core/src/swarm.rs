//! Samples, corteges and cortege ensembles.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::lattice::SpatialGrid;

/// Spatial point or vector; components beyond the grid dimension stay zero.
pub type Vec3 = [f64; 3];

/// One classical probe of one real particle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub slot: usize,
    pub position: Vec3,
    pub velocity: Vec3,
    pub mass: f64,
}

impl Sample {
    pub fn new(slot: usize, position: Vec3, velocity: Vec3, mass: f64) -> Self {
        Self { slot, position, velocity, mass }
    }

    pub fn momentum(&self) -> Vec3 {
        self.velocity.map(|v| self.mass * v)
    }

    pub fn kinetic_energy(&self) -> f64 {
        0.5 * self.mass * self.velocity.iter().map(|v| v * v).sum::<f64>()
    }
}

/// One sample per particle slot, travelling together as a single "world".
#[derive(Debug, Clone, PartialEq)]
pub struct Cortege {
    pub id: u64,
    pub members: Vec<Sample>,
}

impl Cortege {
    /// Flattened configuration point `(r_1, ..., r_n)` using the first `d` axes of each member.
    pub fn configuration_point(&self, d: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.members.len() * d);
        for s in &self.members {
            out.extend_from_slice(&s.position[..d]);
        }
        out
    }
}

/// The swarm of an n-particle system: every sample belongs to exactly one cortege.
#[derive(Debug, Clone, PartialEq)]
pub struct CortegeEnsemble {
    pub corteges: Vec<Cortege>,
    n_particles: usize,
    grid: SpatialGrid,
    next_id: u64,
}

impl CortegeEnsemble {
    /// Builds an ensemble after checking slot structure and extent.
    pub fn new(corteges: Vec<Cortege>, n_particles: usize, grid: SpatialGrid) -> Result<Self> {
        if n_particles == 0 {
            return Err(Error::contract("ensemble needs at least one particle slot"));
        }
        if grid.dim() > 3 {
            return Err(Error::contract("single-particle grids have at most 3 axes"));
        }
        let d = grid.dim();
        let mut max_id = 0;
        for c in &corteges {
            if c.members.len() != n_particles {
                return Err(Error::contract(format!(
                    "cortege {} has {} members, expected {n_particles}",
                    c.id,
                    c.members.len()
                )));
            }
            for (j, s) in c.members.iter().enumerate() {
                if s.slot != j {
                    return Err(Error::contract(format!("cortege {} member {j} carries slot {}", c.id, s.slot)));
                }
                if !(s.mass > 0.0) {
                    return Err(Error::contract(format!("cortege {} slot {j}: mass must be positive", c.id)));
                }
                if !grid.contains(&s.position[..d]) {
                    return Err(Error::contract(format!("cortege {} slot {j} lies outside the grid", c.id)));
                }
            }
            max_id = max_id.max(c.id);
        }
        let next_id = if corteges.is_empty() { 0 } else { max_id + 1 };
        Ok(Self { corteges, n_particles, grid, next_id })
    }

    /// Random cortege assembly from per-particle swarms of equal size.
    ///
    /// Each swarm is shuffled independently and the `i`-th entries are joined,
    /// which represents the product state of the individual swarms.
    pub fn assemble_random<R: Rng + ?Sized>(swarms: Vec<Vec<Sample>>, grid: SpatialGrid, rng: &mut R) -> Result<Self> {
        let n = swarms.len();
        if n == 0 {
            return Err(Error::contract("no swarms to assemble"));
        }
        let m = swarms[0].len();
        if swarms.iter().any(|s| s.len() != m) {
            return Err(Error::contract("swarms must have equal sample counts"));
        }
        let mut swarms = swarms;
        for s in &mut swarms {
            s.shuffle(rng);
        }
        let corteges = (0..m)
            .map(|i| Cortege {
                id: i as u64,
                members: swarms
                    .iter()
                    .enumerate()
                    .map(|(j, s)| Sample { slot: j, ..s[i] })
                    .collect(),
            })
            .collect();
        Self::new(corteges, n, grid)
    }

    pub fn n_particles(&self) -> usize {
        self.n_particles
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.corteges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.corteges.is_empty()
    }

    /// Allocates an identifier not used by any cortege so far.
    pub fn fresh_id(&mut self) -> u64 {
        let id = self.next_id;
        self.next_id += 1;
        id
    }

    pub(crate) fn bump_next_id(&mut self, at_least: u64) {
        self.next_id = self.next_id.max(at_least);
    }

    pub(crate) fn next_id(&self) -> u64 {
        self.next_id
    }

    /// All samples of slot `j` in cortege order.
    pub fn slot_samples(&self, j: usize) -> Vec<Sample> {
        self.corteges.iter().map(|c| c.members[j]).collect()
    }

    /// Splits the ensemble back into per-particle swarms.
    pub fn into_swarms(self) -> Vec<Vec<Sample>> {
        let mut out = vec![Vec::with_capacity(self.corteges.len()); self.n_particles];
        for c in self.corteges {
            for s in c.members {
                out[s.slot].push(s);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn grid() -> SpatialGrid {
        SpatialGrid::uniform(1, -1.0, 1.0, 0.1).unwrap()
    }

    #[test]
    fn random_assembly_uses_every_sample_once() {
        let swarms: Vec<Vec<Sample>> = (0..3)
            .map(|j| {
                (0..50)
                    .map(|i| Sample::new(j, [i as f64 / 100.0 - 0.2 * j as f64, 0.0, 0.0], [i as f64, 0.0, 0.0], 1.0 + j as f64))
                    .collect()
            })
            .collect();
        let ens = CortegeEnsemble::assemble_random(swarms.clone(), grid(), &mut rng::stream(3, &[])).unwrap();
        assert_eq!(ens.len(), 50);
        for j in 0..3 {
            let mut got: Vec<f64> = ens.slot_samples(j).iter().map(|s| s.velocity[0]).collect();
            got.sort_by(f64::total_cmp);
            let want: Vec<f64> = swarms[j].iter().map(|s| s.velocity[0]).collect();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn rejects_bad_structure() {
        let c = Cortege { id: 0, members: vec![Sample::new(1, [0.0; 3], [0.0; 3], 1.0)] };
        assert!(CortegeEnsemble::new(vec![c], 1, grid()).is_err());
        let c = Cortege { id: 0, members: vec![Sample::new(0, [2.0, 0.0, 0.0], [0.0; 3], 1.0)] };
        assert!(CortegeEnsemble::new(vec![c], 1, grid()).is_err());
    }
}
