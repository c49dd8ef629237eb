//! Monte-Carlo trajectories for depolarizing noise after each CNOT.
//!
//! Each shot draws its own error pattern (which CNOTs fail and with which
//! two-qubit Pauli). Shots with identical patterns share one state-vector
//! simulation and their outcomes are then drawn from that trajectory's
//! distribution, which has the same joint law as simulating each shot.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bitstring::BitString;
use crate::circuit::{Circuit, GateKind};
use crate::dense::single_qubit_matrix;
use crate::error::{Error, Result};
use crate::simulator::sample_indices;
use crate::su2::{self, Mat2};

/// Dense trajectories are limited to this many qubits.
pub const MAX_TRAJECTORY_QUBITS: usize = 20;
/// Ideal-prefix snapshots are kept while their total size stays below this
/// many amplitudes.
const SNAPSHOT_BUDGET: usize = 1 << 22;

#[derive(Clone, Debug)]
enum Op {
    U { bit: usize, m: Mat2 },
    Cnot { c: usize, t: usize },
}

/// A cnot-level circuit prepared for repeated dense simulation.
pub struct Program {
    n: usize,
    ops: Vec<Op>,
    /// Op index of every CNOT.
    cnot_ops: Vec<usize>,
    cnot_wires: Vec<(usize, usize)>,
    snapshots: Option<Vec<Vec<Complex64>>>,
}

fn apply_u(v: &mut [Complex64], bit: usize, m: &Mat2) {
    let stride = 1usize << bit;
    let dim = v.len();
    let mut base = 0;
    while base < dim {
        for i in base..base + stride {
            let j = i + stride;
            let (a, b) = (v[i], v[j]);
            v[i] = m[0][0] * a + m[0][1] * b;
            v[j] = m[1][0] * a + m[1][1] * b;
        }
        base += 2 * stride;
    }
}

fn apply_cnot(v: &mut [Complex64], c: usize, t: usize) {
    let (cm, tm) = (1usize << c, 1usize << t);
    for i in 0..v.len() {
        if i & cm != 0 && i & tm == 0 {
            v.swap(i, i | tm);
        }
    }
}

fn apply_x(v: &mut [Complex64], bit: usize) {
    let m = 1usize << bit;
    for i in 0..v.len() {
        if i & m == 0 {
            v.swap(i, i | m);
        }
    }
}

fn apply_z(v: &mut [Complex64], bit: usize) {
    let m = 1usize << bit;
    for (i, a) in v.iter_mut().enumerate() {
        if i & m != 0 {
            *a = -*a;
        }
    }
}

/// Pauli index 0..4 = I, X, Y, Z (Y up to a global phase).
fn apply_pauli(v: &mut [Complex64], bit: usize, p: u8) {
    match p {
        1 => apply_x(v, bit),
        2 => {
            apply_z(v, bit);
            apply_x(v, bit);
        }
        3 => apply_z(v, bit),
        _ => {}
    }
}

impl Program {
    pub fn new(circuit: &Circuit) -> Result<Self> {
        let n = circuit.n();
        if n > MAX_TRAJECTORY_QUBITS {
            return Err(Error::TooManyQubits { n, max: MAX_TRAJECTORY_QUBITS });
        }
        let mut pending: Vec<Option<Mat2>> = vec![None; n];
        let mut ops = Vec::new();
        let mut cnot_ops = Vec::new();
        let mut cnot_wires = Vec::new();
        let flush = |bit: usize, pending: &mut Vec<Option<Mat2>>, ops: &mut Vec<Op>| {
            if let Some(m) = pending[bit].take() {
                ops.push(Op::U { bit, m });
            }
        };
        for g in circuit.gates() {
            if g.kind == GateKind::Cnot {
                let c = g.ctrls.min().expect("cnot control") - 1;
                let t = g.ins.min().expect("cnot target") - 1;
                flush(c, &mut pending, &mut ops);
                flush(t, &mut pending, &mut ops);
                cnot_ops.push(ops.len());
                cnot_wires.push((c, t));
                ops.push(Op::Cnot { c, t });
                continue;
            }
            if !g.ctrls.is_empty() || !g.anti_ctrls.is_empty() || g.kind.is_pair() {
                return Err(Error::LevelMismatch { expected: "cnot".into(), found: "logical".into() });
            }
            let m = single_qubit_matrix(&g.kind).expect("single-qubit kind");
            let bit = g.ins.min().expect("target") - 1;
            pending[bit] = Some(match pending[bit] {
                Some(prev) => su2::mul(&m, &prev),
                None => m,
            });
        }
        for bit in 0..n {
            flush(bit, &mut pending, &mut ops);
        }
        let mut prog = Program { n, ops, cnot_ops, cnot_wires, snapshots: None };
        if prog.cnot_ops.len().saturating_mul(1 << n) <= SNAPSHOT_BUDGET {
            let mut v = prog.ground();
            let mut snaps = Vec::with_capacity(prog.cnot_ops.len());
            let mut next = 0;
            for (i, op) in prog.ops.iter().enumerate() {
                Self::apply_op(&mut v, op);
                if next < prog.cnot_ops.len() && prog.cnot_ops[next] == i {
                    snaps.push(v.clone());
                    next += 1;
                }
            }
            prog.snapshots = Some(snaps);
        }
        Ok(prog)
    }

    pub fn cnot_count(&self) -> usize {
        self.cnot_ops.len()
    }

    fn ground(&self) -> Vec<Complex64> {
        let mut v = vec![Complex64::default(); 1 << self.n];
        v[0] = Complex64::new(1.0, 0.0);
        v
    }

    fn apply_op(v: &mut [Complex64], op: &Op) {
        match op {
            Op::U { bit, m } => apply_u(v, *bit, m),
            Op::Cnot { c, t } => apply_cnot(v, *c, *t),
        }
    }

    /// Final state for an error pattern of `(cnot index, pauli 1..16)` pairs
    /// sorted by CNOT index. The Pauli index encodes `4·p_control + p_target`.
    pub fn final_state(&self, pattern: &[(u32, u8)]) -> Vec<Complex64> {
        let (mut v, mut start) = match (pattern.first(), &self.snapshots) {
            (Some(&(k, _)), Some(snaps)) => (snaps[k as usize].clone(), self.cnot_ops[k as usize]),
            _ => {
                let mut v = self.ground();
                if let Some(&(k, _)) = pattern.first() {
                    for op in &self.ops[..=self.cnot_ops[k as usize]] {
                        Self::apply_op(&mut v, op);
                    }
                    (v, self.cnot_ops[k as usize])
                } else {
                    for op in &self.ops {
                        Self::apply_op(&mut v, op);
                    }
                    return v;
                }
            }
        };
        // `start` is the op index of the first faulty CNOT, already applied.
        let mut errors = pattern.iter().peekable();
        let mut cnot_index = pattern[0].0 as usize;
        loop {
            while let Some(&&(k, p)) = errors.peek() {
                if k as usize != cnot_index {
                    break;
                }
                let (c, t) = self.cnot_wires[cnot_index];
                apply_pauli(&mut v, c, p / 4);
                apply_pauli(&mut v, t, p % 4);
                errors.next();
            }
            start += 1;
            if start >= self.ops.len() {
                break;
            }
            let op = &self.ops[start];
            Self::apply_op(&mut v, op);
            if matches!(op, Op::Cnot { .. }) {
                cnot_index += 1;
            }
        }
        v
    }

    pub fn ideal_probabilities(&self) -> Vec<f64> {
        self.final_state(&[]).iter().map(|a| a.norm_sqr()).collect()
    }
}

pub(crate) fn derive_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Error patterns of `shots` trajectories, grouped with multiplicities.
pub fn sample_patterns(cnots: usize, p2: f64, shots: u64, seed: u64) -> BTreeMap<Vec<(u32, u8)>, u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut groups: BTreeMap<Vec<(u32, u8)>, u64> = BTreeMap::new();
    let log_q = (1.0 - p2).ln();
    for _ in 0..shots {
        let mut pattern = Vec::new();
        if p2 > 0.0 && cnots > 0 {
            // geometric gaps between faulty CNOTs
            let mut pos = 0usize;
            loop {
                let u: f64 = 1.0 - rng.random::<f64>();
                let gap = (u.ln() / log_q).floor();
                if !gap.is_finite() || gap >= (cnots - pos) as f64 {
                    break;
                }
                pos += gap as usize;
                pattern.push((pos as u32, rng.random_range(1u8..16)));
                pos += 1;
                if pos >= cnots {
                    break;
                }
            }
        }
        *groups.entry(pattern).or_insert(0) += 1;
    }
    groups
}

pub fn run_trajectories(circuit: &Circuit, p2: f64, shots: u64, seed: u64) -> Result<BTreeMap<BitString, u64>> {
    let prog = Program::new(circuit)?;
    let groups: Vec<(Vec<(u32, u8)>, u64)> = sample_patterns(prog.cnot_count(), p2, shots, seed).into_iter().collect();
    let dim = 1usize << prog.n;
    let totals = groups
        .par_iter()
        .enumerate()
        .map(|(i, (pattern, count))| {
            let probs: Vec<f64> = prog.final_state(pattern).iter().map(|a| a.norm_sqr()).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, i as u64));
            sample_indices(&probs, *count, &mut rng)
        })
        .reduce(
            || vec![0u64; dim],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    Ok(totals
        .into_iter()
        .enumerate()
        .filter(|(_, c)| *c > 0)
        .map(|(k, c)| (BitString::from_mask_unchecked(prog.n, k as u64), c))
        .collect())
}
