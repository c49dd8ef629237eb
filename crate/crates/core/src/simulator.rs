//! Exact sparse state-vector simulation, shot sampling and the entry point
//! for noisy trajectory simulation.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bitstring::BitString;
use crate::circuit::{Circuit, Gate, GateKind, Level};
use crate::dense::{single_qubit_matrix, Unitary};
use crate::error::{Error, Result};

/// Amplitudes below this modulus squared are dropped from the map.
const PRUNE: f64 = 1e-32;

/// Sparse map from basis states (bit q-1 = qubit q) to amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseState {
    n: usize,
    amps: HashMap<u64, Complex64>,
}

impl SparseState {
    pub fn zero(n: usize) -> Self {
        Self::basis(BitString::zeros(n))
    }

    pub fn basis(b: BitString) -> Self {
        let mut amps = HashMap::new();
        amps.insert(b.mask(), Complex64::new(1.0, 0.0));
        SparseState { n: b.n(), amps }
    }

    pub fn from_amplitudes(n: usize, entries: impl IntoIterator<Item = (BitString, Complex64)>) -> Result<Self> {
        let mut amps = HashMap::new();
        for (b, a) in entries {
            if b.n() != n {
                return Err(Error::LengthMismatch { expected: n, found: b.n() });
            }
            *amps.entry(b.mask()).or_insert(Complex64::new(0.0, 0.0)) += a;
        }
        Ok(SparseState { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitude(&self, b: &BitString) -> Complex64 {
        self.amps.get(&b.mask()).copied().unwrap_or_default()
    }

    pub fn amplitude_of_mask(&self, mask: u64) -> Complex64 {
        self.amps.get(&mask).copied().unwrap_or_default()
    }

    /// Number of stored basis states.
    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    /// Basis states with modulus above `tol`, sorted.
    pub fn support(&self, tol: f64) -> Vec<BitString> {
        let mut keys: Vec<u64> = self.amps.iter().filter(|(_, a)| a.norm() > tol).map(|(k, _)| *k).collect();
        keys.sort_unstable();
        keys.into_iter().map(|k| BitString::from_mask_unchecked(self.n, k)).collect()
    }

    /// Sorted `(basis, amplitude)` pairs.
    pub fn entries(&self) -> Vec<(BitString, Complex64)> {
        let mut v: Vec<(u64, Complex64)> = self.amps.iter().map(|(k, a)| (*k, *a)).collect();
        v.sort_unstable_by_key(|e| e.0);
        v.into_iter().map(|(k, a)| (BitString::from_mask_unchecked(self.n, k), a)).collect()
    }

    /// Dense vector of length 2^n.
    pub fn to_dense(&self) -> Vec<Complex64> {
        let mut v = vec![Complex64::default(); 1usize << self.n];
        for (k, a) in &self.amps {
            v[*k as usize] = *a;
        }
        v
    }

    pub fn apply(&mut self, g: &Gate) {
        if g.kind.is_pair() {
            self.apply_pair(g);
        } else {
            self.apply_single(g);
        }
    }

    fn apply_single(&mut self, g: &Gate) {
        let t = g.ins.mask();
        let cm = g.ctrls.mask();
        let am = g.anti_ctrls.mask();
        let active = |k: u64| k & cm == cm && k & am == 0;
        match g.kind {
            GateKind::X | GateKind::Cnot => {
                self.amps = self.amps.drain().map(|(k, a)| if active(k) { (k ^ t, a) } else { (k, a) }).collect();
                return;
            }
            GateKind::Rz { phi } => {
                let (e0, e1) = (Complex64::from_polar(1.0, -phi), Complex64::from_polar(1.0, phi));
                for (k, a) in self.amps.iter_mut() {
                    if active(*k) {
                        *a *= if k & t == 0 { e0 } else { e1 };
                    }
                }
                return;
            }
            GateKind::AntiPhase { phi } => {
                let e0 = Complex64::from_polar(1.0, phi);
                for (k, a) in self.amps.iter_mut() {
                    if active(*k) && k & t == 0 {
                        *a *= e0;
                    }
                }
                return;
            }
            _ => {}
        }
        let m = single_qubit_matrix(&g.kind).expect("single-qubit kind");
        let mut out: HashMap<u64, Complex64> = HashMap::with_capacity(self.amps.len() * 2);
        for (&k, &a) in &self.amps {
            if !active(k) {
                *out.entry(k).or_default() += a;
                continue;
            }
            let bit = usize::from(k & t != 0);
            *out.entry(k & !t).or_default() += m[0][bit] * a;
            *out.entry(k | t).or_default() += m[1][bit] * a;
        }
        out.retain(|_, a| a.norm_sqr() > PRUNE);
        self.amps = out;
    }

    fn apply_pair(&mut self, g: &Gate) {
        let (theta, phi) = g.kind.pair_angles().expect("pair kind");
        let (s, c) = theta.sin_cos();
        let e = Complex64::from_polar(1.0, phi);
        let ec = e.conj();
        let inm = g.ins.mask();
        let outm = g.outs.mask();
        let flip = inm | outm;
        let cm = g.ctrls.mask();
        let am = g.anti_ctrls.mask();
        let mut out: HashMap<u64, Complex64> = HashMap::with_capacity(self.amps.len() * 2);
        for (&k, &a) in &self.amps {
            if k & cm != cm || k & am != 0 {
                *out.entry(k).or_default() += a;
                continue;
            }
            let pattern = k & flip;
            if pattern == inm {
                *out.entry(k).or_default() += e * c * a;
                *out.entry(k ^ flip).or_default() += ec * s * a;
            } else if pattern == outm {
                *out.entry(k ^ flip).or_default() += -e * s * a;
                *out.entry(k).or_default() += ec * c * a;
            } else {
                *out.entry(k).or_default() += a;
            }
        }
        out.retain(|_, a| a.norm_sqr() > PRUNE);
        self.amps = out;
    }
}

/// Runs `circuit` from |0^n⟩.
pub fn run(circuit: &Circuit) -> SparseState {
    run_from(circuit, SparseState::zero(circuit.n()))
}

pub fn run_from(circuit: &Circuit, mut state: SparseState) -> SparseState {
    for g in circuit.gates() {
        state.apply(g);
    }
    state
}

/// Calls `visit` with the state after every gate.
pub fn run_traced(circuit: &Circuit, mut visit: impl FnMut(usize, &SparseState) -> Result<()>) -> Result<SparseState> {
    let mut state = SparseState::zero(circuit.n());
    for (i, g) in circuit.gates().iter().enumerate() {
        state.apply(g);
        visit(i, &state)?;
    }
    Ok(state)
}

pub fn probabilities(state: &SparseState) -> BTreeMap<BitString, f64> {
    state.entries().into_iter().map(|(b, a)| (b, a.norm_sqr())).collect()
}

/// Multinomial sample of `shots` measurements in the computational basis.
pub fn sample(state: &SparseState, shots: u64, seed: u64) -> BTreeMap<BitString, u64> {
    let entries = state.entries();
    let probs: Vec<f64> = entries.iter().map(|(_, a)| a.norm_sqr()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let counts = sample_indices(&probs, shots, &mut rng);
    entries.into_iter().zip(counts).filter(|(_, c)| *c > 0).map(|((b, _), c)| (b, c)).collect()
}

/// Draws `shots` outcomes from (unnormalized) weights, returning per-index counts.
pub(crate) fn sample_indices<R: Rng>(weights: &[f64], shots: u64, rng: &mut R) -> Vec<u64> {
    let mut cdf = Vec::with_capacity(weights.len());
    let mut acc = 0.0;
    for w in weights {
        acc += w;
        cdf.push(acc);
    }
    let mut counts = vec![0u64; weights.len()];
    if weights.is_empty() || acc <= 0.0 {
        return counts;
    }
    for _ in 0..shots {
        let u = rng.random::<f64>() * acc;
        let i = cdf.partition_point(|&c| c <= u).min(weights.len() - 1);
        counts[i] += 1;
    }
    counts
}

/// Unitary of a circuit assembled column by column from the simulator.
pub fn simulated_unitary(circuit: &Circuit) -> Result<Unitary> {
    let n = circuit.n();
    if n > crate::dense::MAX_DENSE_QUBITS {
        return Err(Error::TooManyQubits { n, max: crate::dense::MAX_DENSE_QUBITS });
    }
    let dim = 1usize << n;
    let mut u = Unitary::zeros(dim, dim);
    for col in 0..dim {
        let s = run_from(circuit, SparseState::basis(BitString::from_mask_unchecked(n, col as u64)));
        for (k, a) in &s.amps {
            u[(*k as usize, col)] = *a;
        }
    }
    Ok(u)
}

/// Depolarizing probability applied after every CNOT.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub p2: f64,
    pub seed: u64,
}

impl NoiseModel {
    pub fn new(p2: f64, seed: u64) -> Result<Self> {
        if !(0.0..1.0).contains(&p2) {
            return Err(Error::InvalidArgument(format!("depolarizing probability {p2} outside [0, 1)")));
        }
        Ok(NoiseModel { p2, seed })
    }

    pub fn noiseless(seed: u64) -> Self {
        NoiseModel { p2: 0.0, seed }
    }
}

/// Shot counts of a cnot-level circuit under the noise model. The seed
/// argument overrides `noise.seed`.
pub fn run_noisy(circuit: &Circuit, noise: &NoiseModel, shots: u64, seed: u64) -> Result<BTreeMap<BitString, u64>> {
    circuit.require_level(Level::Cnot)?;
    NoiseModel::new(noise.p2, seed)?;
    crate::noise::run_trajectories(circuit, noise.p2, shots, seed)
}
