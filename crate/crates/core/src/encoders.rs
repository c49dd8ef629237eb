//! Dense (real / complex), sparse and binary amplitude encoders.
//!
//! Every encoder is a chain: after an X layer prepares `|b_1⟩`, gate j moves
//! the remaining amplitude from `b_j` to `b_{j+1}` and leaves `b_j` with its
//! final value. Complex encoders end with one controlled anti-phase gate that
//! fixes the phase of the last basis state.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bitstring::{binomial, ehrlich_walk, gate_params, BitString, EhrlichState, QubitSet, MAX_QUBITS};
use crate::circuit::{Circuit, Gate, GateKind, Level};
use crate::coordinates::{angles_complex, angles_real, phases_of, AngleSet, DataVector, Mode};
use crate::error::{Error, Result};
use crate::simulator::SparseState;
use crate::su2;

/// Tolerance of the post-construction verification pass.
pub const VERIFY_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Serialize)]
pub struct EncoderReport {
    pub circuit: Circuit,
    /// Basis state carrying amplitude i.
    pub ordering: Vec<BitString>,
    pub param_count: usize,
    pub mode: Mode,
    /// Number of leading gates (the X layer) before the first chain gate.
    #[serde(skip)]
    pub prefix_len: usize,
    /// Exclusive end index of each of the d - 1 chain steps. A step is one
    /// gate except for multi-bit weight raises in the sparse encoder.
    #[serde(skip)]
    pub step_ends: Vec<usize>,
}

impl EncoderReport {
    /// Simulates the circuit gate by gate and checks the chain invariants
    /// against the data `x` (in ordering order).
    /// A single real entry has no free parameter, so its sign is a global
    /// phase and only the modulus is checked.
    pub fn verify(&self, x: &DataVector) -> Result<()> {
        let mut target = x.normalized();
        if self.mode == Mode::Real && target.len() == 1 {
            target[0] = Complex64::new(target[0].norm(), 0.0);
        }
        verify_chain(&self.circuit, self.prefix_len, &self.step_ends, &self.ordering, &target)
    }

    /// Data parameters in the circuit: one per angle-carrying gate in real
    /// mode; complex pair and Rw gates carry two.
    pub fn counted_parameters(&self) -> usize {
        count_parameters(&self.circuit, self.mode)
    }
}

pub fn count_parameters(circuit: &Circuit, mode: Mode) -> usize {
    circuit
        .gates()
        .iter()
        .map(|g| match (g.kind, mode) {
            (GateKind::X | GateKind::Cnot, _) => 0,
            (_, Mode::Real) => 1,
            (GateKind::Rbs { .. } | GateKind::Ry { .. } | GateKind::Rz { .. } | GateKind::AntiPhase { .. }, Mode::Complex) => 1,
            (_, Mode::Complex) => 2,
        })
        .sum()
}

/// One chain gate's placement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Placement {
    ins: QubitSet,
    outs: QubitSet,
    ctrls: QubitSet,
    anti_ctrls: QubitSet,
}

struct Layout {
    n: usize,
    x_layer: QubitSet,
    steps: Vec<Placement>,
    ordering: Vec<BitString>,
    negated: bool,
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::InvalidArgument(format!("qubit count {n} outside 1..=64")));
    }
    Ok(())
}

fn dense_layout(n: usize, k: usize, d: usize) -> Result<Layout> {
    check_n(n)?;
    if k > n {
        return Err(Error::InvalidArgument(format!("Hamming weight {k} exceeds n = {n}")));
    }
    let size = binomial(n, k);
    if d < 2 || (d as u128) > size {
        return Err(Error::Dimension { d, reason: format!("need 2 <= d <= binom({n},{k}) = {size}") });
    }
    let negated = 2 * k > n;
    let kk = if negated { n - k } else { k };
    let walk = ehrlich_walk(&EhrlichState::initial(n, kk), d)?;
    let mut untouched = walk[0].b.ones();
    let mut steps = Vec::with_capacity(d - 1);
    for pair in walk.windows(2) {
        let gp = gate_params(&pair[0].b, &pair[1].b, untouched)?;
        untouched = gp.untouched;
        steps.push(if negated {
            Placement { ins: gp.outs, outs: gp.ins, ctrls: QubitSet::EMPTY, anti_ctrls: gp.ctrls }
        } else {
            Placement { ins: gp.ins, outs: gp.outs, ctrls: gp.ctrls, anti_ctrls: QubitSet::EMPTY }
        });
    }
    let ordering: Vec<BitString> = walk.iter().map(|s| if negated { s.b.complement() } else { s.b }).collect();
    Ok(Layout { n, x_layer: ordering[0].ones(), steps, ordering, negated })
}

fn pair_gate(p: &Placement, theta: f64, phi: Option<f64>) -> Gate {
    let kind = match (p.ins.len() == 1 && p.outs.len() == 1, phi) {
        (true, None) => GateKind::Rbs { theta },
        (true, Some(phi)) => GateKind::ComplexRbs { theta, phi },
        (false, phi) => GateKind::Grbs { theta, phi: phi.unwrap_or(0.0) },
    };
    Gate { kind, ins: p.ins, outs: p.outs, ctrls: p.ctrls, anti_ctrls: p.anti_ctrls }
}

/// Whether a gate with these ins/outs/controls would act on one of the
/// already loaded addresses `loaded`.
fn disturbs(loaded: &[BitString], ins: QubitSet, outs: QubitSet, ctrls: QubitSet) -> bool {
    loaded.iter().any(|b| {
        let ones = b.ones();
        let fires = |hi: QubitSet, lo: QubitSet| hi.is_subset(ones) && lo.is_disjoint(ones) && ctrls.is_subset(ones);
        fires(ins, outs) || fires(outs, ins)
    })
}

/// Single-qubit rotation taking `|0⟩` to `cos θ|0⟩ + sin θ|1⟩`, or in complex
/// mode `Rz(-φ)Ry(θ)` written as one Rw gate.
fn bridge_gate(target: usize, theta: f64, phi: Option<f64>) -> Gate {
    match phi {
        None => Gate::ry(target, theta),
        Some(phi) => {
            let u = su2::mul(&su2::rz(-phi), &su2::ry(theta));
            let (lambda, axis, _) = su2::rw_from_matrix(&u);
            Gate::rw(target, lambda, axis)
        }
    }
}

/// Gates applying `e^{iφ}` to `|b⟩` alone, given that every other populated
/// basis state either has lower weight or the same weight as `b`.
fn phase_fix(b: &BitString, phi: f64, negated: bool) -> Vec<Gate> {
    let kind = GateKind::AntiPhase { phi };
    let zeros = b.zeros_set();
    match zeros.min() {
        Some(t) if negated => vec![Gate::single(kind, t).anti_controlled_by(zeros - QubitSet::single(t))],
        Some(t) => vec![Gate::single(kind, t).controlled_by(b.ones())],
        None => {
            let rest = b.ones() - QubitSet::single(1);
            vec![Gate::x(1), Gate::single(kind, 1).controlled_by(rest), Gate::x(1)]
        }
    }
}

fn build_dense(layout: Layout, angles: &AngleSet, mode: Mode) -> Result<EncoderReport> {
    let mut c = Circuit::new(layout.n, Level::Logical);
    for q in layout.x_layer.iter().rev() {
        c.push(Gate::x(q))?;
    }
    let prefix_len = c.len();
    for (i, p) in layout.steps.iter().enumerate() {
        let phi = (mode == Mode::Complex).then(|| angles.phis[i]);
        c.push(pair_gate(p, angles.thetas[i], phi))?;
    }
    if mode == Mode::Complex {
        let last = layout.ordering.last().expect("non-empty ordering");
        for g in phase_fix(last, *angles.phis.last().expect("phases"), layout.negated) {
            c.push(g)?;
        }
    }
    let d = layout.ordering.len();
    Ok(EncoderReport {
        circuit: c,
        ordering: layout.ordering,
        param_count: if mode == Mode::Real { d - 1 } else { 2 * d - 1 },
        mode,
        prefix_len,
        step_ends: (prefix_len + 1..prefix_len + d).collect(),
    })
}

/// Real HW-k encoder. `x` must be real; entry i is loaded onto `ordering[i]`.
pub fn encode_dense_real(n: usize, k: usize, x: &DataVector) -> Result<EncoderReport> {
    if x.mode() != Mode::Real {
        return Err(Error::InvalidArgument("encode_dense_real needs a real-mode vector".into()));
    }
    let layout = dense_layout(n, k, x.len())?;
    build_dense(layout, &angles_real(x)?, Mode::Real)
}

/// Complex HW-k encoder; real-mode input is accepted and treated as complex.
pub fn encode_dense_complex(n: usize, k: usize, x: &DataVector) -> Result<EncoderReport> {
    let layout = dense_layout(n, k, x.len())?;
    build_dense(layout, &angles_complex(&x.as_complex())?, Mode::Complex)
}

/// Value/address pairs of a sparse vector.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseTuple {
    pairs: Vec<(Complex64, BitString)>,
}

#[derive(Serialize, Deserialize)]
struct SparseRecord {
    bits: BitString,
    re: f64,
    #[serde(default)]
    im: f64,
}

impl SparseTuple {
    pub fn new(pairs: Vec<(Complex64, BitString)>) -> Result<Self> {
        let Some(first) = pairs.first() else {
            return Err(Error::ZeroVector);
        };
        let n = first.1.n();
        let mut seen = std::collections::HashSet::new();
        for (i, (v, b)) in pairs.iter().enumerate() {
            if b.n() != n {
                return Err(Error::LengthMismatch { expected: n, found: b.n() });
            }
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::NonFinite(i));
            }
            if !seen.insert(*b) {
                return Err(Error::DuplicateAddress(b.to_string()));
            }
        }
        if pairs.iter().all(|(v, _)| v.norm() == 0.0) {
            return Err(Error::ZeroVector);
        }
        Ok(SparseTuple { pairs })
    }

    pub fn real(pairs: Vec<(f64, BitString)>) -> Result<Self> {
        Self::new(pairs.into_iter().map(|(v, b)| (Complex64::new(v, 0.0), b)).collect())
    }

    pub fn pairs(&self) -> &[(Complex64, BitString)] {
        &self.pairs
    }

    pub fn n(&self) -> usize {
        self.pairs[0].1.n()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn is_real(&self) -> bool {
        self.pairs.iter().all(|(v, _)| v.im == 0.0)
    }

    pub fn values(&self) -> Vec<Complex64> {
        self.pairs.iter().map(|p| p.0).collect()
    }

    /// Stable sort by Hamming weight of the addresses.
    pub fn sorted_by_weight(&self) -> Self {
        let mut pairs = self.pairs.clone();
        pairs.sort_by_key(|p| p.1.weight());
        SparseTuple { pairs }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let recs: Vec<SparseRecord> = serde_json::from_str(text)?;
        Self::new(recs.into_iter().map(|r| (Complex64::new(r.re, r.im), r.bits)).collect())
    }

    pub fn to_json(&self) -> String {
        let recs: Vec<SparseRecord> = self.pairs.iter().map(|(v, b)| SparseRecord { bits: *b, re: v.re, im: v.im }).collect();
        serde_json::to_string(&recs).expect("serializable")
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SparseOptions {
    pub sort_by_weight: bool,
    /// Force complex (or real) mode; `None` picks complex iff any value has
    /// a nonzero imaginary part.
    pub complex: Option<bool>,
}

/// Sparse encoder. Fails if the addresses decrease in Hamming weight, and
/// runs a mandatory simulation pass that checks every gate.
pub fn encode_sparse(n: usize, y: &SparseTuple, opts: SparseOptions) -> Result<EncoderReport> {
    check_n(n)?;
    if y.n() != n {
        return Err(Error::LengthMismatch { expected: n, found: y.n() });
    }
    let y = if opts.sort_by_weight { y.sorted_by_weight() } else { y.clone() };
    for (i, w) in y.pairs.windows(2).enumerate() {
        if w[1].1.weight() < w[0].1.weight() {
            return Err(Error::SparseOrdering {
                first: i,
                second: i + 1,
                detail: format!(
                    "{} (weight {}) precedes {} (weight {})",
                    w[0].1,
                    w[0].1.weight(),
                    w[1].1,
                    w[1].1.weight()
                ),
            });
        }
    }
    let complex = opts.complex.unwrap_or(!y.is_real());
    let mode = if complex { Mode::Complex } else { Mode::Real };
    let values = y.values();
    let data = if complex { DataVector::complex(values)? } else { DataVector::real(values.iter().map(|v| v.re).collect())? };
    let ordering: Vec<BitString> = y.pairs.iter().map(|p| p.1).collect();
    let s = ordering.len();

    let mut c = Circuit::new(n, Level::Logical);
    for q in ordering[0].ones().iter().rev() {
        c.push(Gate::x(q))?;
    }
    let prefix_len = c.len();
    let thetas = if s >= 2 { angles_real(&DataVector::real(data.entries().iter().map(|z| if complex { z.norm() } else { z.re }).collect())?)?.thetas } else { Vec::new() };
    let phis = if complex { phases_of(data.entries()) } else { Vec::new() };
    let mut untouched = ordering[0].ones();
    let mut step_ends = Vec::with_capacity(s.saturating_sub(1));
    for i in 1..s {
        let (b, bp) = (ordering[i - 1], ordering[i]);
        let gp = gate_params(&b, &bp, untouched)?;
        untouched = gp.untouched;
        let phi = complex.then(|| phis[i - 1]);
        let common = gp.ctrls | gp.eliminated;
        if gp.ins.is_empty() {
            // b ⊂ b′: rotate one new bit in, then flip the rest on that branch
            let p = gp.outs.min().expect("distinct addresses");
            let lone = QubitSet::single(p);
            let ctrls = if disturbs(&ordering[..i - 1], QubitSet::EMPTY, lone, gp.ctrls) { common } else { gp.ctrls };
            c.push(bridge_gate(p, thetas[i - 1], phi).controlled_by(ctrls))?;
            for q in (gp.outs - lone).iter() {
                c.push(Gate::x(q).controlled_by(b.ones() | lone))?;
            }
        } else {
            let ctrls = if disturbs(&ordering[..i - 1], gp.ins, gp.outs, gp.ctrls) { common } else { gp.ctrls };
            let p = Placement { ins: gp.ins, outs: gp.outs, ctrls, anti_ctrls: QubitSet::EMPTY };
            c.push(pair_gate(&p, thetas[i - 1], phi))?;
        }
        step_ends.push(c.len());
    }
    if complex {
        for g in phase_fix(&ordering[s - 1], phis[s - 1], false) {
            c.push(g)?;
        }
    }
    let report = EncoderReport {
        circuit: c,
        ordering,
        param_count: if complex { 2 * s - 1 } else { s - 1 },
        mode,
        prefix_len,
        step_ends,
    };
    report.verify(&data)?;
    Ok(report)
}

/// Candidate seeds for the weight-k stage: `1^k 0^(n-k)` with the ones
/// marked, then `0^(n-k) 1^k` with the zeros marked. The first one that
/// contains every one of `prev` is used.
fn binary_seed(n: usize, k: usize, prev: &BitString) -> Result<EhrlichState> {
    for cand in [EhrlichState::initial(n, k), EhrlichState::initial_zeros_marked(n, k)] {
        if prev.ones().is_subset(cand.b.ones()) {
            return Ok(cand);
        }
    }
    Err(Error::MalformedState(format!("no weight-{k} seed extends {prev}")))
}

/// Binary encoder over all 2^n basis states, ordered by stages of
/// increasing Hamming weight.
pub fn encode_binary(n: usize, x: &DataVector) -> Result<EncoderReport> {
    check_n(n)?;
    if n > 30 {
        return Err(Error::TooManyQubits { n, max: 30 });
    }
    let d = 1usize << n;
    if x.len() != d {
        return Err(Error::Dimension { d: x.len(), reason: format!("binary encoder on {n} qubits needs 2^{n} = {d} entries") });
    }
    let complex = x.mode() == Mode::Complex;
    let mode = x.mode();
    let angles = if complex { angles_complex(x)? } else { angles_real(x)? };

    let mut c = Circuit::new(n, Level::Logical);
    let mut ordering = vec![BitString::zeros(n)];
    let mut j = 0usize;
    let push_chain = |c: &mut Circuit, g: Gate, j: &mut usize| -> Result<()> {
        c.push(g)?;
        *j += 1;
        Ok(())
    };
    for k in 1..=n {
        let prev = *ordering.last().expect("non-empty");
        let seed = binary_seed(n, k, &prev)?;
        let target = (seed.b.ones() - prev.ones()).min().expect("seed adds one bit");
        let bridge = bridge_gate(target, angles.thetas[j], complex.then(|| angles.phis[j]));
        push_chain(&mut c, bridge.controlled_by(prev.ones()), &mut j)?;
        let size = binomial(n, k) as usize;
        let walk = ehrlich_walk(&seed, size)?;
        ordering.push(walk[0].b);
        for pair in walk.windows(2) {
            let gp = gate_params(&pair[0].b, &pair[1].b, QubitSet::EMPTY)?;
            let p = Placement { ins: gp.ins, outs: gp.outs, ctrls: gp.ctrls, anti_ctrls: QubitSet::EMPTY };
            let g = pair_gate(&p, angles.thetas[j], complex.then(|| angles.phis[j]));
            push_chain(&mut c, g, &mut j)?;
            ordering.push(pair[1].b);
        }
    }
    debug_assert_eq!(ordering.len(), d);
    if complex {
        for g in phase_fix(&ordering[d - 1], angles.phis[d - 1], false) {
            c.push(g)?;
        }
    }
    Ok(EncoderReport {
        circuit: c,
        ordering,
        param_count: if complex { 2 * d - 1 } else { d - 1 },
        mode,
        prefix_len: 0,
        step_ends: (1..d).collect(),
    })
}

/// Gate-by-gate check of a chain encoder. After chain gate j the support
/// must lie in `{b_1, …, b_{j+2}}`, `b_1..b_{j+1}` must hold their target
/// amplitudes and `b_{j+2}` must carry the remaining norm. After the trailing
/// phase gates every amplitude must match exactly.
pub fn verify_chain(
    circuit: &Circuit,
    prefix_len: usize,
    step_ends: &[usize],
    ordering: &[BitString],
    target: &[Complex64],
) -> Result<()> {
    let d = ordering.len();
    let n = circuit.n();
    let gates = circuit.gates();
    let chain_end = step_ends.last().copied().unwrap_or(prefix_len);
    if step_ends.len() + 1 != d || gates.len() < chain_end {
        return Err(Error::Verification { gate: gates.len(), detail: "circuit does not match the chain layout".into() });
    }
    let mut index_of = std::collections::HashMap::with_capacity(d);
    for (i, b) in ordering.iter().enumerate() {
        index_of.insert(b.mask(), i);
    }
    // remaining[i] = ‖target[i..]‖
    let mut remaining = vec![0.0f64; d + 1];
    for i in (0..d).rev() {
        remaining[i] = remaining[i + 1].hypot(target[i].norm());
    }

    let mut state = SparseState::zero(n);
    for g in &gates[..prefix_len] {
        state.apply(g);
    }
    let fail = |gate: usize, detail: String| Err(Error::Verification { gate, detail });
    if (state.amplitude(&ordering[0]) - Complex64::new(1.0, 0.0)).norm() > VERIFY_TOL {
        return fail(prefix_len.saturating_sub(1), format!("prefix does not prepare {}", ordering[0]));
    }
    let mut start = prefix_len;
    for (j, &end) in step_ends.iter().enumerate() {
        for g in &gates[start..end] {
            state.apply(g);
        }
        start = end;
        let gi = end - 1;
        for (b, a) in state.entries() {
            if a.norm() <= VERIFY_TOL {
                continue;
            }
            match index_of.get(&b.mask()) {
                Some(&i) if i <= j + 1 => {}
                _ => return fail(gi, format!("amplitude {a} leaked onto {b}")),
            }
        }
        for i in 0..=j {
            let got = state.amplitude(&ordering[i]);
            if (got - target[i]).norm() > VERIFY_TOL {
                return fail(gi, format!("amplitude of {} is {got}, expected {}", ordering[i], target[i]));
            }
        }
        let got = state.amplitude(&ordering[j + 1]).norm();
        if (got - remaining[j + 1]).abs() > VERIFY_TOL {
            return fail(gi, format!("modulus on {} is {got}, expected {}", ordering[j + 1], remaining[j + 1]));
        }
    }
    for g in &gates[chain_end..] {
        state.apply(g);
    }
    for (i, b) in ordering.iter().enumerate() {
        let got = state.amplitude(b);
        if (got - target[i]).norm() > VERIFY_TOL {
            return fail(gates.len().saturating_sub(1), format!("final amplitude of {b} is {got}, expected {}", target[i]));
        }
    }
    Ok(())
}
