//! Clifford data regression on basis-state probabilities, and bootstrap
//! percentile bands.

use std::collections::HashMap;
use std::f64::consts::FRAC_PI_4;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bitstring::BitString;
use crate::circuit::{Circuit, Gate, GateKind, Level};
use crate::error::{Error, Result};
use crate::noise::{derive_seed, run_trajectories};
use crate::simulator::{self, sample_indices};
use crate::su2::{self, Mat2};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CdrConfig {
    pub replacement_rates: Vec<f64>,
    pub circuits_per_rate: usize,
    pub shots: u64,
    pub seed: u64,
}

impl Default for CdrConfig {
    fn default() -> Self {
        CdrConfig { replacement_rates: vec![0.79, 0.83, 0.90, 0.95, 1.00], circuits_per_rate: 50, shots: 10_000, seed: 0 }
    }
}

impl CdrConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replacement_rates.is_empty() || self.replacement_rates.iter().any(|r| !(*r > 0.0 && *r <= 1.0)) {
            return Err(Error::InvalidArgument(format!("replacement rates must lie in (0, 1]: {:?}", self.replacement_rates)));
        }
        if self.circuits_per_rate == 0 {
            return Err(Error::InvalidArgument("circuits_per_rate must be at least 1".into()));
        }
        if self.shots == 0 {
            return Err(Error::InvalidArgument("shots must be at least 1".into()));
        }
        Ok(())
    }
}

/// One element of the single-qubit Clifford group as a word in
/// `Rz(π/4)` / `Ry(π/4)` (both quarter turns in the IR convention).
#[derive(Clone, Debug, PartialEq)]
pub struct CliffordElement {
    /// `(is_z, quarter_turns)`, applied in order.
    pub word: Vec<(bool, u8)>,
    pub matrix: Mat2,
}

impl CliffordElement {
    pub fn gates(&self, target: usize) -> Vec<Gate> {
        self.word
            .iter()
            .map(|&(z, k)| {
                let a = k as f64 * FRAC_PI_4;
                if z {
                    Gate::rz(target, a)
                } else {
                    Gate::ry(target, a)
                }
            })
            .collect()
    }
}

/// Canonical key of a 2×2 unitary modulo global phase.
fn phase_key(m: &Mat2) -> [i64; 8] {
    let flat = [m[0][0], m[0][1], m[1][0], m[1][1]];
    let pivot = flat.iter().copied().find(|z| z.norm() > 1e-6).expect("unitary");
    let ph = pivot.conj() / pivot.norm();
    let mut key = [0i64; 8];
    for (i, z) in flat.iter().enumerate() {
        let w = z * ph;
        key[2 * i] = (w.re * 1e6).round() as i64;
        key[2 * i + 1] = (w.im * 1e6).round() as i64;
    }
    key
}

fn word_matrix(word: &[(bool, u8)]) -> Mat2 {
    word.iter().fold(su2::identity(), |acc, &(z, k)| {
        let a = k as f64 * FRAC_PI_4;
        let g = if z { su2::rz(a) } else { su2::ry(a) };
        su2::mul(&g, &acc)
    })
}

/// Appends a quarter turn, merging with a trailing turn on the same axis.
fn extend(word: &[(bool, u8)], z: bool) -> Vec<(bool, u8)> {
    let mut w = word.to_vec();
    match w.last_mut() {
        Some(last) if last.0 == z => {
            last.1 = (last.1 + 1) % 4;
            if last.1 == 0 {
                w.pop();
            }
        }
        _ => w.push((z, 1)),
    }
    w
}

/// The 24 single-qubit Cliffords modulo phase, found by breadth-first
/// closure of the two quarter turns.
pub fn clifford_group() -> &'static [CliffordElement] {
    static GROUP: OnceLock<Vec<CliffordElement>> = OnceLock::new();
    GROUP.get_or_init(|| {
        let mut seen = HashMap::new();
        let mut out = vec![CliffordElement { word: Vec::new(), matrix: su2::identity() }];
        seen.insert(phase_key(&su2::identity()), 0usize);
        let mut head = 0;
        while head < out.len() {
            let base = out[head].word.clone();
            head += 1;
            for z in [true, false] {
                let word = extend(&base, z);
                let matrix = word_matrix(&word);
                let key = phase_key(&matrix);
                if let std::collections::hash_map::Entry::Vacant(slot) = seen.entry(key) {
                    slot.insert(out.len());
                    out.push(CliffordElement { word, matrix });
                }
            }
        }
        out
    })
}

fn is_quarter_multiple(a: f64) -> bool {
    let k = a / FRAC_PI_4;
    (k - k.round()).abs() < 1e-9
}

/// Gates counted as non-Clifford: Ry/Rz at angles off the π/4 grid, and
/// every Rw.
pub fn non_clifford_positions(circuit: &Circuit) -> Vec<usize> {
    circuit
        .gates()
        .iter()
        .enumerate()
        .filter(|(_, g)| match g.kind {
            GateKind::Ry { theta } => !is_quarter_multiple(theta),
            GateKind::Rz { phi } => !is_quarter_multiple(phi),
            GateKind::Rw { .. } => true,
            _ => false,
        })
        .map(|(i, _)| i)
        .collect()
}

/// `⌈r·count⌉`, ignoring floating-point dust just above an integer.
pub fn replacement_count(rate: f64, count: usize) -> usize {
    ((rate * count as f64 - 1e-9).ceil().max(0.0) as usize).min(count)
}

/// Training circuits: for each rate, `circuits_per_rate` copies with a
/// random subset of the non-Clifford gates swapped for random Cliffords.
pub fn near_clifford_ensemble(circuit: &Circuit, config: &CdrConfig) -> Result<Vec<Circuit>> {
    circuit.require_level(Level::Cnot)?;
    config.validate()?;
    let positions = non_clifford_positions(circuit);
    let group = clifford_group();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut out = Vec::with_capacity(config.replacement_rates.len() * config.circuits_per_rate);
    for &rate in &config.replacement_rates {
        let m = replacement_count(rate, positions.len());
        for _ in 0..config.circuits_per_rate {
            let chosen = rand::seq::index::sample(&mut rng, positions.len(), m);
            let mut replace: HashMap<usize, usize> = HashMap::with_capacity(m);
            for i in chosen.iter() {
                replace.insert(positions[i], rng.random_range(0..group.len()));
            }
            let mut gates = Vec::with_capacity(circuit.len() + m);
            for (i, g) in circuit.gates().iter().enumerate() {
                match replace.get(&i) {
                    Some(&e) => gates.extend(group[e].gates(g.target().expect("rotation target"))),
                    None => gates.push(*g),
                }
            }
            out.push(Circuit::from_parts_unchecked(circuit.n(), Level::Cnot, gates));
        }
    }
    Ok(out)
}

/// Per-observable (noisy, noiseless) pairs, one per ensemble circuit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrainingSet {
    pub observables: Vec<BitString>,
    /// `pairs[o][c]` for observable o and circuit c.
    pub pairs: Vec<Vec<(f64, f64)>>,
}

/// Evaluates every ensemble circuit exactly and under noise. Each circuit
/// gets its own seed derived from `seed`, so the result does not depend on
/// scheduling.
pub fn build_training_set(ensemble: &[Circuit], observables: &[BitString], p2: f64, shots: u64, seed: u64) -> Result<TrainingSet> {
    let per_circuit: Vec<Vec<(f64, f64)>> = ensemble
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let ideal = simulator::run(c);
            let counts = run_trajectories(c, p2, shots, derive_seed(seed, i as u64))?;
            Ok(observables
                .iter()
                .map(|b| {
                    let noisy = counts.get(b).copied().unwrap_or(0) as f64 / shots as f64;
                    (noisy, ideal.amplitude(b).norm_sqr())
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let pairs = (0..observables.len()).map(|o| per_circuit.iter().map(|row| row[o]).collect()).collect();
    Ok(TrainingSet { observables: observables.to_vec(), pairs })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegressionFit {
    pub slope: f64,
    pub intercept: f64,
    /// Set when the noisy values had no spread and the identity map was used.
    pub degenerate: bool,
    #[serde(skip)]
    pub training_pairs: Vec<(f64, f64)>,
}

impl RegressionFit {
    /// Least-squares line through `(noisy, noiseless)` pairs.
    pub fn fit(pairs: &[(f64, f64)]) -> Self {
        let n = pairs.len() as f64;
        let identity = RegressionFit { slope: 1.0, intercept: 0.0, degenerate: true, training_pairs: pairs.to_vec() };
        if pairs.len() < 2 {
            return identity;
        }
        let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = pairs.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = pairs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        if sxx <= 1e-14 * n {
            return identity;
        }
        let slope = sxy / sxx;
        RegressionFit { slope, intercept: my - slope * mx, degenerate: false, training_pairs: pairs.to_vec() }
    }

    pub fn apply(&self, raw: f64) -> f64 {
        self.slope * raw + self.intercept
    }
}

pub fn fit_all(training: &TrainingSet) -> Vec<RegressionFit> {
    training.pairs.iter().map(|p| RegressionFit::fit(p)).collect()
}

/// Applies one fit per observable, clamps to [0, 1] and renormalizes.
pub fn fit_and_mitigate(fits: &[RegressionFit], raw: &[f64]) -> Vec<f64> {
    assert_eq!(fits.len(), raw.len());
    let v: Vec<f64> = fits.iter().zip(raw).map(|(f, &r)| f.apply(r).clamp(0.0, 1.0)).collect();
    let total: f64 = v.iter().sum();
    if total > 0.0 {
        v.iter().map(|x| x / total).collect()
    } else {
        v
    }
}

/// Linear-interpolated percentile of sorted data, `p` in [0, 1].
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// 5th/95th percentile bands of `statistic` over `b` multinomial
/// resamples of `counts`. `statistic` maps resampled frequencies (same
/// indexing as `counts`) to the observables of interest.
pub fn bootstrap_with<F>(counts: &[u64], b: usize, seed: u64, statistic: F) -> Result<Vec<(f64, f64)>>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    if b < 2 {
        return Err(Error::InvalidArgument(format!("bootstrap needs B >= 2 (got {b})")));
    }
    let shots: u64 = counts.iter().sum();
    if shots == 0 {
        return Err(Error::InvalidArgument("bootstrap needs at least one shot".into()));
    }
    let weights: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples: Vec<Vec<f64>> = Vec::with_capacity(b);
    for _ in 0..b {
        let freq: Vec<f64> = sample_indices(&weights, shots, &mut rng).iter().map(|&c| c as f64 / shots as f64).collect();
        samples.push(statistic(&freq));
    }
    let m = samples[0].len();
    Ok((0..m)
        .map(|o| {
            let mut col: Vec<f64> = samples.iter().map(|s| s[o]).collect();
            col.sort_by(f64::total_cmp);
            (percentile(&col, 0.05), percentile(&col, 0.95))
        })
        .collect())
}

/// Percentile bands of the outcome frequencies themselves.
pub fn bootstrap_bands(counts: &[u64], b: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
    bootstrap_with(counts, b, seed, |f| f.to_vec())
}
