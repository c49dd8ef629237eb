//! Golden tables, random instance generators and checkers shared by the
//! integration targets. Checkers return `Err(description)` on the first
//! mismatch so the acceptance target can print a one-line verdict.

#![allow(dead_code)]

use std::f64::consts::PI;

use hwenc::bitstring::ehrlich_walk;
use hwenc::compiler;
use hwenc::dense;
use hwenc::simulator;
use hwenc::{
    encode_binary, encode_dense_complex, encode_dense_real, encode_sparse, gate_params, BitString, Circuit, Complex64,
    DataVector, EhrlichState, EncoderReport, Gate, GateKind, Mode, QubitSet, SparseOptions, SparseTuple,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const AMP_TOL: f64 = 1e-10;
pub const UNITARY_TOL: f64 = 1e-9;

pub fn bs(s: &str) -> BitString {
    s.parse().unwrap()
}

pub fn set(labels: &[usize]) -> QubitSet {
    let mut q = QubitSet::EMPTY;
    for &l in labels {
        q.insert(l);
    }
    q
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------- dense, n = 6, k = 2

pub const DENSE_BITS: [&str; 15] = [
    "110000", "100001", "100010", "100100", "101000", "011000", "010001", "010010", "010100", "001100", "001001", "001010",
    "000110", "000101", "000011",
];

/// Marked string positions per row.
pub const DENSE_MARKS: [&[usize]; 15] = [
    &[1, 2],
    &[1, 3, 4, 5],
    &[1, 3, 4],
    &[1, 3],
    &[1],
    &[2, 3],
    &[2, 4, 5],
    &[2, 4],
    &[2],
    &[3, 4],
    &[3, 5],
    &[3],
    &[4, 5],
    &[4],
    &[],
];

/// (in, out, controls, eliminated controls) as qubit labels.
pub const DENSE_GATES: [(usize, usize, &[usize], &[usize]); 14] = [
    (5, 1, &[], &[6]),
    (1, 2, &[], &[6]),
    (2, 3, &[], &[6]),
    (3, 4, &[], &[6]),
    (6, 5, &[4], &[]),
    (4, 1, &[5], &[]),
    (1, 2, &[5], &[]),
    (2, 3, &[5], &[]),
    (5, 4, &[3], &[]),
    (3, 1, &[4], &[]),
    (1, 2, &[4], &[]),
    (4, 3, &[2], &[]),
    (2, 1, &[3], &[]),
    (3, 2, &[1], &[]),
];

pub fn check_dense_golden() -> Result<(), String> {
    let walk = ehrlich_walk(&EhrlichState::initial(6, 2), 15).map_err(|e| e.to_string())?;
    for (i, st) in walk.iter().enumerate() {
        if st.b != bs(DENSE_BITS[i]) {
            return Err(format!("row {}: bitstring {} expected {}", i + 1, st.b, DENSE_BITS[i]));
        }
        let marks: Vec<usize> = st.marked.iter().copied().collect();
        if marks != DENSE_MARKS[i] {
            return Err(format!("row {}: marks {:?} expected {:?}", i + 1, marks, DENSE_MARKS[i]));
        }
    }

    let mut untouched = walk[0].b.ones();
    for (i, w) in walk.windows(2).enumerate() {
        let p = gate_params(&w[0].b, &w[1].b, untouched).map_err(|e| e.to_string())?;
        let (gin, gout, ctrl, elim) = DENSE_GATES[i];
        if p.ins != set(&[gin]) || p.outs != set(&[gout]) || p.ctrls != set(ctrl) || p.eliminated != set(elim) {
            return Err(format!("gate {}: gate_params gave {p:?}", i + 1));
        }
        untouched = p.untouched;
    }

    let x = DataVector::real((1..=15).map(|i| i as f64).collect()).unwrap();
    let report = encode_dense_real(6, 2, &x).map_err(|e| e.to_string())?;
    let xs: Vec<&Gate> = report.circuit.gates()[..report.prefix_len].iter().collect();
    if xs.len() != 2 || xs.iter().any(|g| g.kind != GateKind::X) || set(&[6, 5]) != xs[0].support() | xs[1].support() {
        return Err("X layer should flip qubits 6 and 5".into());
    }
    let chain = &report.circuit.gates()[report.prefix_len..];
    if chain.len() != 14 {
        return Err(format!("{} chain gates, expected 14", chain.len()));
    }
    for (i, g) in chain.iter().enumerate() {
        let (gin, gout, ctrl, _) = DENSE_GATES[i];
        if !matches!(g.kind, GateKind::Rbs { .. }) || g.ins != set(&[gin]) || g.outs != set(&[gout]) || g.ctrls != set(ctrl) {
            return Err(format!("circuit gate {}: {g:?}", i + 1));
        }
    }
    let ordering: Vec<String> = report.ordering.iter().map(|b| b.to_string()).collect();
    if ordering != DENSE_BITS {
        return Err("encoder ordering differs from the table".into());
    }
    Ok(())
}

// ---------------------------------------------------------------- dense, n = 6, k = 2I

pub const SPARSE_ADDRESSES: [&str; 7] = ["000111", "001011", "001110", "010011", "011010", "100101", "111010"];

/// (is gRBS, ins, outs, controls, eliminated).
type SparseRow = (bool, &'static [usize], &'static [usize], &'static [usize], &'static [usize]);

pub const SPARSE_GATES: [SparseRow; 6] = [
    (false, &[3], &[4], &[], &[1, 2]),
    (false, &[1], &[3], &[4], &[2]),
    (true, &[3, 4], &[1, 5], &[], &[2]),
    (false, &[1], &[4], &[5], &[2]),
    (true, &[2, 4, 5], &[1, 3, 6], &[], &[]),
    (true, &[1, 3], &[2, 4, 5], &[6], &[]),
];

pub fn sparse_golden_tuple(values: &[f64]) -> SparseTuple {
    SparseTuple::real(values.iter().zip(SPARSE_ADDRESSES).map(|(&v, a)| (v, bs(a))).collect()).unwrap()
}

pub fn sparse_golden_report() -> EncoderReport {
    let y = sparse_golden_tuple(&[0.3, -0.2, 0.5, 0.1, -0.4, 0.25, 0.6]);
    encode_sparse(6, &y, SparseOptions::default()).unwrap()
}

pub fn check_sparse_golden() -> Result<(), String> {
    let y = sparse_golden_tuple(&[0.3, -0.2, 0.5, 0.1, -0.4, 0.25, 0.6]);
    let report = encode_sparse(6, &y, SparseOptions::default()).map_err(|e| e.to_string())?;
    let gates = report.circuit.gates();
    let prefix = &gates[..report.prefix_len];
    if prefix.len() != 3 || prefix.iter().any(|g| g.kind != GateKind::X) {
        return Err(format!("prefix should be three X gates, got {prefix:?}"));
    }
    let chain = &gates[report.prefix_len..];
    if chain.len() != SPARSE_GATES.len() {
        return Err(format!("{} chain gates, expected {}", chain.len(), SPARSE_GATES.len()));
    }
    for (i, (g, &(grbs, ins, outs, ctrls, elim))) in chain.iter().zip(SPARSE_GATES.iter()).enumerate() {
        let kind_ok = if grbs { matches!(g.kind, GateKind::Grbs { .. }) } else { matches!(g.kind, GateKind::Rbs { .. }) };
        let common = bs(SPARSE_ADDRESSES[i]).ones() & bs(SPARSE_ADDRESSES[i + 1]).ones();
        if !kind_ok || g.ins != set(ins) || g.outs != set(outs) || g.ctrls != set(ctrls) || common - g.ctrls != set(elim) {
            return Err(format!("gate {}: {g:?}", i + 1));
        }
    }
    roundtrip(&report, &y.values())
}

// ---------------------------------------------------------------- binary, n = 6

/// Gate index, target and controls of each weight bridge for n = 6.
pub const BINARY_BRIDGES: [(usize, usize, &[usize]); 6] = [
    (0, 6, &[]),
    (6, 6, &[5]),
    (21, 3, &[1, 2]),
    (41, 3, &[4, 5, 6]),
    (56, 5, &[1, 2, 3, 4]),
    (62, 1, &[2, 3, 4, 5, 6]),
];

/// First and last bitstring of each weight block, weights 1..=5.
pub const BINARY_STAGES: [(&str, &str); 5] =
    [("100000", "010000"), ("110000", "000011"), ("000111", "111000"), ("111100", "001111"), ("011111", "111110")];

pub fn check_binary_golden() -> Result<(), String> {
    let mut r = rng(4);
    let x = DataVector::real((0..64).map(|_| r.random_range(0.1..1.0)).collect()).unwrap();
    let report = encode_binary(6, &x).map_err(|e| e.to_string())?;
    let gates = report.circuit.gates();
    if gates.len() != 63 {
        return Err(format!("{} gates, expected 63", gates.len()));
    }
    for &(at, target, ctrls) in &BINARY_BRIDGES {
        let g = &gates[at];
        if !matches!(g.kind, GateKind::Ry { .. }) || g.target() != Some(target) || g.ctrls != set(ctrls) {
            return Err(format!("bridge at {at}: {g:?}"));
        }
    }
    let bridges: Vec<usize> = BINARY_BRIDGES.iter().map(|b| b.0).collect();
    for (i, g) in gates.iter().enumerate() {
        if !bridges.contains(&i) && !matches!(g.kind, GateKind::Rbs { .. }) {
            return Err(format!("gate {i} should be an RBS, got {}", g.kind.name()));
        }
    }
    if report.ordering[0] != BitString::zeros(6) || report.ordering[63] != BitString::ones_word(6) {
        return Err("ordering should start at 000000 and end at 111111".into());
    }
    let mut start = 1;
    for (w, &(first, last)) in BINARY_STAGES.iter().enumerate() {
        let len = hwenc::bitstring::binomial(6, w + 1) as usize;
        let block = &report.ordering[start..start + len];
        if block[0] != bs(first) || block[len - 1] != bs(last) {
            return Err(format!("weight {} block runs {}..{}, expected {first}..{last}", w + 1, block[0], block[len - 1]));
        }
        if block.iter().any(|b| b.weight() != w + 1) {
            return Err(format!("weight {} block holds a wrong weight", w + 1));
        }
        start += len;
    }
    roundtrip(&report, x.entries())
}

// ---------------------------------------------------------------- round trips

/// Simulates the report's circuit and compares the amplitude on each ordered
/// basis state with the normalized data, plus zero weight elsewhere.
pub fn roundtrip(report: &EncoderReport, values: &[Complex64]) -> Result<(), String> {
    let norm = values.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    // one real entry: the sign is a global phase with no parameter to carry it
    let norm = if report.mode == Mode::Real && values.len() == 1 { norm * values[0].re.signum() } else { norm };
    let state = simulator::run(&report.circuit);
    if report.ordering.len() != values.len() {
        return Err(format!("ordering has {} entries for {} values", report.ordering.len(), values.len()));
    }
    let mut inside = 0.0;
    for (b, v) in report.ordering.iter().zip(values) {
        let got = state.amplitude(b);
        let want = v / norm;
        if (got - want).norm() > AMP_TOL {
            return Err(format!("amplitude of {b}: {got} expected {want}"));
        }
        inside += got.norm_sqr();
    }
    if (state.norm_sqr() - inside).abs() > AMP_TOL {
        return Err(format!("{:e} weight outside the ordering", state.norm_sqr() - inside));
    }
    Ok(())
}

/// Parameter optimality: d - 1 real, 2d - 1 complex.
pub fn check_parameters(report: &EncoderReport) -> Result<(), String> {
    let d = report.ordering.len();
    let want = match report.mode {
        Mode::Real => d - 1,
        Mode::Complex => 2 * d - 1,
    };
    if report.param_count != want || report.counted_parameters() != want {
        return Err(format!("d = {d}: {} reported, {} counted, expected {want}", report.param_count, report.counted_parameters()));
    }
    Ok(())
}

pub fn random_real(r: &mut impl Rng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d)
            .map(|_| {
                // a few exact zeros exercise the boundary angles
                if r.random_bool(0.1) {
                    0.0
                } else {
                    r.random_range(-1.0..1.0)
                }
            })
            .collect();
        if v.iter().any(|x| *x != 0.0) {
            return v;
        }
    }
}

pub fn random_complex(r: &mut impl Rng, d: usize) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..d)
            .map(|_| if r.random_bool(0.05) { Complex64::new(0.0, 0.0) } else { Complex64::from_polar(r.random_range(0.0..1.0), r.random_range(-PI..PI)) })
            .collect();
        if v.iter().any(|z| z.norm() > 0.0) {
            return v;
        }
    }
}

/// A dense instance with k in 1..=min(4, n/2) or its mirror n - k.
pub fn random_dense_shape(r: &mut impl Rng, max_n: usize) -> (usize, usize) {
    let n = r.random_range(2..=max_n);
    let k = r.random_range(1..=(n / 2).min(4));
    if r.random_bool(0.4) && n - k != k {
        (n, n - k)
    } else {
        (n, k)
    }
}

pub fn dense_instance(r: &mut impl Rng, max_n: usize, complex: bool) -> Result<(EncoderReport, Vec<Complex64>), String> {
    let (n, k) = random_dense_shape(r, max_n);
    let d = hwenc::bitstring::binomial(n, k) as usize;
    let (report, values) = if complex {
        let v = random_complex(r, d);
        (encode_dense_complex(n, k, &DataVector::complex(v.clone()).unwrap()), v)
    } else {
        let v = random_real(r, d);
        let z = v.iter().map(|&a| Complex64::new(a, 0.0)).collect();
        (encode_dense_real(n, k, &DataVector::real(v).unwrap()), z)
    };
    let report = report.map_err(|e| format!("n = {n}, k = {k}: {e}"))?;
    Ok((report, values))
}

/// Distinct random addresses sorted by weight, with random values.
pub fn random_sparse(r: &mut impl Rng, n: usize, s: usize, complex: bool) -> SparseTuple {
    let mut masks: Vec<u64> = (0..1u64 << n).collect();
    masks.shuffle(r);
    let mut addrs: Vec<BitString> = masks[..s].iter().map(|&m| BitString::new(n, m).unwrap()).collect();
    addrs.sort_by_key(|b| b.weight());
    let values: Vec<Complex64> = if complex {
        random_complex(r, s)
    } else {
        loop {
            let v: Vec<f64> = (0..s).map(|_| r.random_range(-1.0..1.0)).collect();
            if v.iter().any(|x| *x != 0.0) {
                break v.into_iter().map(|a| Complex64::new(a, 0.0)).collect();
            }
        }
    };
    SparseTuple::new(values.into_iter().zip(addrs).collect()).unwrap()
}

pub fn sparse_instance(r: &mut impl Rng, complex: bool) -> Result<(EncoderReport, Vec<Complex64>), String> {
    let n = r.random_range(1..=10);
    let s = r.random_range(1..=20usize.min(1 << n));
    let y = random_sparse(r, n, s, complex);
    let report = encode_sparse(n, &y, SparseOptions { sort_by_weight: false, complex: Some(complex) })
        .map_err(|e| format!("n = {n}, {}: {e}", y.to_json()))?;
    Ok((report, y.values()))
}

pub fn binary_instance(r: &mut impl Rng) -> Result<(EncoderReport, Vec<Complex64>), String> {
    let n = r.random_range(1..=8);
    let v = random_real(r, 1 << n);
    let z = v.iter().map(|&a| Complex64::new(a, 0.0)).collect();
    let report = encode_binary(n, &DataVector::real(v).unwrap()).map_err(|e| format!("n = {n}: {e}"))?;
    Ok((report, z))
}

// ---------------------------------------------------------------- compilation

fn random_angle(r: &mut impl Rng) -> f64 {
    r.random_range(-PI..PI)
}

/// A random logical gate touching at most `max_qubits` of `n` qubits.
pub fn random_gate(r: &mut impl Rng, n: usize, max_qubits: usize) -> Gate {
    let mut labels: Vec<usize> = (1..=n).collect();
    labels.shuffle(r);
    let budget = max_qubits.min(n);
    let kind_pick = r.random_range(0..8);
    let (gate, used) = match kind_pick {
        0..=3 => {
            let width = r.random_range(2..=budget);
            let m = r.random_range(1..width);
            let ins = set(&labels[..m]);
            let outs = set(&labels[m..width]);
            let kind = match kind_pick {
                0 if m == 1 && width == 2 => GateKind::Rbs { theta: random_angle(r) },
                1 if m == 1 && width == 2 => GateKind::ComplexRbs { theta: random_angle(r), phi: random_angle(r) },
                _ => GateKind::Grbs { theta: random_angle(r), phi: random_angle(r) },
            };
            (Gate::pair(kind, ins, outs), width)
        }
        4 => (Gate::ry(labels[0], random_angle(r)), 1),
        5 => (Gate::rz(labels[0], random_angle(r)), 1),
        6 => {
            let axis: [f64; 3] = [r.random_range(-1.0..1.0), r.random_range(-1.0..1.0), r.random_range(0.1..1.0)];
            let len = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
            (Gate::rw(labels[0], random_angle(r), [axis[0] / len, axis[1] / len, axis[2] / len]), 1)
        }
        _ => (Gate::single(GateKind::AntiPhase { phi: random_angle(r) }, labels[0]), 1),
    };
    let free = &labels[used..budget];
    let n_ctrl = r.random_range(0..=free.len());
    let n_anti = r.random_range(0..=free.len() - n_ctrl);
    gate.controlled_by(set(&free[..n_ctrl])).anti_controlled_by(set(&free[n_ctrl..n_ctrl + n_anti]))
}

/// Lowers one gate and compares the dense unitaries up to global phase.
pub fn check_lowered_gate(g: &Gate, n: usize) -> Result<f64, String> {
    let mut c = Circuit::new(n, hwenc::Level::Logical);
    c.push(*g).map_err(|e| e.to_string())?;
    let lowered = compiler::lower(&c).map_err(|e| e.to_string())?;
    let a = dense::gate_unitary(g, n).map_err(|e| e.to_string())?;
    let b = dense::circuit_unitary(&lowered.circuit).map_err(|e| e.to_string())?;
    let dev = dense::phase_distance(&a, &b);
    if dev < UNITARY_TOL {
        Ok(dev)
    } else {
        Err(format!("{g:?} deviates by {dev:e}"))
    }
}

/// Compares the logical circuit (dense product oracle) with the lowered one
/// (column-by-column simulation).
pub fn check_lowered_circuit(c: &Circuit) -> Result<f64, String> {
    let lowered = compiler::lower(c).map_err(|e| e.to_string())?;
    let a = dense::circuit_unitary(c).map_err(|e| e.to_string())?;
    let b = simulator::simulated_unitary(&lowered.circuit).map_err(|e| e.to_string())?;
    let dev = dense::phase_distance(&a, &b);
    if dev < UNITARY_TOL {
        Ok(dev)
    } else {
        Err(format!("n = {} circuit of {} gates deviates by {dev:e}", c.n(), c.len()))
    }
}
