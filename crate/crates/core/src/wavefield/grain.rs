//! Absolute decoherence: amplitudes below the grain `ε` are dropped.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;

use super::NORM_TOLERANCE;
use crate::error::{Error, Result};

/// Integer tuple labelling a basis state.
pub type BasisLabel = Vec<i64>;

/// Sparse state `Σ_j λ_j |j⟩`; absent labels have amplitude zero.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeVector {
    entries: BTreeMap<BasisLabel, Complex64>,
}

impl AmplitudeVector {
    /// Accepts an already normalized state.
    pub fn new(entries: BTreeMap<BasisLabel, Complex64>) -> Result<Self> {
        let v = Self { entries };
        let n = v.norm_sq();
        if (n - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::contract(format!("amplitude vector not normalized: Σ|λ|² = {n}")));
        }
        Ok(v)
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(entries: impl IntoIterator<Item = (BasisLabel, Complex64)>) -> Result<Self> {
        let mut entries: BTreeMap<_, _> = entries.into_iter().filter(|(_, a)| a.norm_sqr() > 0.0).collect();
        renormalize(&mut entries)?;
        Ok(Self { entries })
    }

    /// Real amplitudes on labels `[0], [1], ...`.
    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::normalized(amps.iter().enumerate().map(|(i, &a)| (vec![i as i64], Complex64::new(a, 0.0))))
    }

    pub fn get(&self, label: &[i64]) -> Complex64 {
        self.entries.get(label).copied().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BasisLabel, &Complex64)> {
        self.entries.iter()
    }

    pub fn norm_sq(&self) -> f64 {
        self.entries.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn max_modulus(&self) -> f64 {
        self.entries.values().map(|a| a.norm()).fold(0.0, f64::max)
    }
}

fn renormalize(entries: &mut BTreeMap<BasisLabel, Complex64>) -> Result<()> {
    if entries.len() == 1 {
        // a lone survivor keeps only its phase
        let a = entries.values_mut().next().unwrap();
        *a /= a.norm();
        return Ok(());
    }
    let n: f64 = entries.values().map(|a| a.norm_sqr()).sum();
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::contract("cannot normalize a zero state"));
    }
    let s = 1.0 / n.sqrt();
    for a in entries.values_mut() {
        *a *= s;
    }
    Ok(())
}

/// Drops every summand with `|λ_j| < ε` and renormalizes the rest.
///
/// The threshold is applied once, to the moduli before renormalization.
pub fn amplitude_grain_reduce(state: &AmplitudeVector, epsilon: f64) -> Result<AmplitudeVector> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::contract(format!("amplitude grain must lie in (0, 1), got {epsilon}")));
    }
    let n = state.norm_sq();
    if (n - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::contract(format!("state not normalized: Σ|λ|² = {n}")));
    }
    let mut kept: BTreeMap<_, _> = state
        .entries
        .iter()
        .filter(|(_, a)| a.norm() >= epsilon)
        .map(|(k, a)| (k.clone(), *a))
        .collect();
    if kept.is_empty() {
        return Err(Error::Annihilation { epsilon });
    }
    if kept.len() < state.entries.len() {
        renormalize(&mut kept)?;
    }
    Ok(AmplitudeVector { entries: kept })
}

/// Runs a random unitary walk with grain reduction after every step until a
/// single basis state survives, and returns its label.
///
/// Each step picks two surviving labels and rotates weight `δ = min(step, p_a, p_b)`
/// from one to the other with a fair sign, keeping the phases. The rotation is
/// unitary and every weight `|λ_j|²` is a martingale, so without the grain the
/// walk would end on `j` with probability `|λ_j|²` of the starting state.
pub fn grain_collapse_walk<R: Rng + ?Sized>(
    state: &AmplitudeVector,
    epsilon: f64,
    step: f64,
    rng: &mut R,
) -> Result<BasisLabel> {
    if !(step > 0.0) {
        return Err(Error::contract("walk step must be positive"));
    }
    let mut state = amplitude_grain_reduce(state, epsilon)?;
    for _ in 0..10_000_000 {
        if state.len() == 1 {
            return Ok(state.entries.keys().next().unwrap().clone());
        }
        let labels: Vec<BasisLabel> = state.entries.keys().cloned().collect();
        let i = rng.random_range(0..labels.len());
        let mut j = rng.random_range(0..labels.len() - 1);
        if j >= i {
            j += 1;
        }
        let (a, b) = (state.entries[&labels[i]], state.entries[&labels[j]]);
        let (pa, pb) = (a.norm_sqr(), b.norm_sqr());
        let delta = step.min(pa).min(pb);
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        let (qa, qb) = ((pa + sign * delta).max(0.0), (pb - sign * delta).max(0.0));
        state.entries.insert(labels[i].clone(), Complex64::from_polar(qa.sqrt(), a.arg()));
        state.entries.insert(labels[j].clone(), Complex64::from_polar(qb.sqrt(), b.arg()));
        state = amplitude_grain_reduce(&state, epsilon)?;
    }
    Err(Error::contract("grain walk did not terminate"))
}
