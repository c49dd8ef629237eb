//! Lowering of logical gates to CNOT + single-qubit rotations.
//!
//! Multi-controlled rotations use the Gray-code multiplexor (2^ℓ CNOTs for
//! ℓ ≥ 1). Pair rotations use one of two templates:
//!
//! * Top: `(V ⊗ HV)† · CNOT(a→b) · (Ry_a(θ/2) ⊗ Ry_b(θ/2)) · CNOT(a→b) · (V ⊗ HV)`
//!   with the controls on the two middle rotations, followed by
//!   `Rz_a(φ/2) Rz_b(-φ/2)` for complex gates.
//! * Bottom: `CNOT(a→b) · C_b[Rz(φ) Ry(-θ)]_a · CNOT(a→b)`, where the central
//!   gate carries the controls plus `b`.
//!
//! The cheaper one wins; ties go to Top.

use serde::{Deserialize, Serialize};

use crate::bitstring::QubitSet;
use crate::circuit::{Circuit, Gate, GateKind, Level};
use crate::error::Result;
use crate::su2::{self, Mat2};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Template {
    Top,
    Bottom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    Y,
    Z,
}

/// CNOTs used by a Gray-code multiplexed rotation with `l` controls.
pub fn mc_rotation_cost(l: usize) -> usize {
    if l == 0 {
        0
    } else {
        1 << l
    }
}

/// CNOTs of a multi-controlled phase on `s` qubits.
pub fn mc_phase_cost(s: usize) -> usize {
    (1usize << s) - 2
}

/// Template choice and CNOT count for a pair rotation with `l` controls.
pub fn rbs_cost(l: usize, complex: bool) -> (Template, usize) {
    let top = 2 + if complex { 4 } else { 2 } * mc_rotation_cost(l);
    let bottom = 2 + mc_rotation_cost(l + 1);
    if top <= bottom {
        (Template::Top, top)
    } else {
        (Template::Bottom, bottom)
    }
}

/// CNOTs of a gRBS with `m` ins, `mp` outs and `l` explicit controls.
pub fn grbs_cost(m: usize, mp: usize, l: usize, complex: bool) -> usize {
    2 * (m + mp - 2) + rbs_cost(l + m + mp - 2, complex).1
}

const ANGLE_EPS: f64 = 1e-15;

fn rotation(axis: Axis, angle: f64, target: usize) -> Gate {
    match axis {
        Axis::Y => Gate::ry(target, angle),
        Axis::Z => Gate::rz(target, angle),
    }
}

fn snap_quarter_pi(a: f64) -> f64 {
    let q = std::f64::consts::FRAC_PI_4;
    let k = (a / q).round();
    if (a - k * q).abs() < 1e-9 {
        k * q
    } else {
        a
    }
}

/// Emits a fixed single-qubit unitary (up to global phase) as Rz·Ry·Rz.
pub fn emit_unitary(out: &mut Vec<Gate>, target: usize, u: &Mat2) {
    let (_, a, b, c) = su2::zyz(u);
    for (axis, angle) in [(Axis::Z, c), (Axis::Y, b), (Axis::Z, a)] {
        let angle = snap_quarter_pi(angle);
        if angle.abs() > ANGLE_EPS {
            out.push(rotation(axis, angle, target));
        }
    }
}

/// `V = (I - iX - iY - iZ)/2`, cycling X → Y → Z under conjugation.
fn frame_v() -> Mat2 {
    let i = num_complex::Complex64::i();
    let mut m = su2::identity();
    for p in [su2::pauli_x(), su2::pauli_y(), su2::pauli_z()] {
        for r in 0..2 {
            for s in 0..2 {
                m[r][s] -= i * p[r][s];
            }
        }
    }
    su2::scale(&m, num_complex::Complex64::new(0.5, 0.0))
}

fn frame_hv() -> Mat2 {
    su2::mul(&su2::hadamard(), &frame_v())
}

fn x_layer(out: &mut Vec<Gate>, qubits: QubitSet) {
    for q in qubits.iter() {
        out.push(Gate::x(q));
    }
}

/// Rotation about `axis` by `alpha` on `target`, applied only when every
/// qubit in `ctrls` is 1.
pub fn compile_mc_rotation(axis: Axis, alpha: f64, target: usize, ctrls: &[usize]) -> Vec<Gate> {
    let mut out = Vec::new();
    mc_rotation_into(&mut out, axis, alpha, target, ctrls);
    out
}

fn mc_rotation_into(out: &mut Vec<Gate>, axis: Axis, alpha: f64, target: usize, ctrls: &[usize]) {
    let l = ctrls.len();
    if l == 0 {
        out.push(rotation(axis, alpha, target));
        return;
    }
    let count = 1usize << l;
    let step = alpha / count as f64;
    for i in 0..count {
        let g = i ^ (i >> 1);
        let sign = if g.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        out.push(rotation(axis, sign * step, target));
        let flipped = if i + 1 < count { (i + 1).trailing_zeros() as usize } else { l - 1 };
        out.push(Gate::cnot(ctrls[flipped], target));
    }
}

/// Multi-controlled `Ry` (the bridge and census primitive).
pub fn compile_mcry(theta: f64, target: usize, ctrls: &[usize]) -> Vec<Gate> {
    compile_mc_rotation(Axis::Y, theta, target, ctrls)
}

/// Multi-controlled `exp(iλ w·σ)`.
fn mc_rw_into(out: &mut Vec<Gate>, lambda: f64, axis: [f64; 3], target: usize, ctrls: &[usize]) {
    if ctrls.is_empty() {
        out.push(Gate::rw(target, lambda, axis));
        return;
    }
    if lambda.abs() < ANGLE_EPS {
        return;
    }
    let [x, y, z] = axis;
    let tol = 1e-14;
    if x.abs() < tol && z.abs() < tol {
        // exp(iλY) = Ry(-λ)
        mc_rotation_into(out, Axis::Y, -lambda * y.signum(), target, ctrls);
        return;
    }
    if x.abs() < tol && y.abs() < tol {
        mc_rotation_into(out, Axis::Z, -lambda * z.signum(), target, ctrls);
        return;
    }
    // R = Rz(α/2) Ry(β/2) maps Z to w; exp(iλ w·σ) = R Rz(-λ) R†
    let alpha = y.atan2(x);
    let beta = z.clamp(-1.0, 1.0).acos();
    out.push(Gate::rz(target, -alpha / 2.0));
    out.push(Gate::ry(target, -beta / 2.0));
    mc_rotation_into(out, Axis::Z, -lambda, target, ctrls);
    out.push(Gate::ry(target, beta / 2.0));
    out.push(Gate::rz(target, alpha / 2.0));
}

/// Phase `e^{iγ}` on the states where every qubit of `qubits` is 1
/// (global phase dropped).
fn mc_phase_into(out: &mut Vec<Gate>, gamma: f64, qubits: &[usize]) {
    let Some((&t, rest)) = qubits.split_last() else {
        return;
    };
    // diag(1, e^{iγ}) = e^{iγ/2} Rz(γ/2)
    mc_rotation_into(out, Axis::Z, gamma / 2.0, t, rest);
    mc_phase_into(out, gamma / 2.0, rest);
}

/// Lowers `U` on `target` with positive controls `ctrls` and anti-controls `anti`.
fn controlled_single(out: &mut Vec<Gate>, kind: &GateKind, target: usize, ctrls: QubitSet, anti: QubitSet) {
    let all: Vec<usize> = (ctrls | anti).to_vec();
    x_layer(out, anti);
    match *kind {
        GateKind::X | GateKind::Cnot => match all.len() {
            0 => out.push(Gate::x(target)),
            1 => out.push(Gate::cnot(all[0], target)),
            _ => {
                let h = su2::hadamard();
                emit_unitary(out, target, &h);
                let mut qs = all.clone();
                qs.push(target);
                mc_phase_into(out, std::f64::consts::PI, &qs);
                emit_unitary(out, target, &h);
            }
        },
        GateKind::Ry { theta } => mc_rotation_into(out, Axis::Y, theta, target, &all),
        GateKind::Rz { phi } => mc_rotation_into(out, Axis::Z, phi, target, &all),
        GateKind::Rw { lambda, axis } => mc_rw_into(out, lambda, axis, target, &all),
        GateKind::AntiPhase { phi } => {
            if all.is_empty() {
                // diag(e^{iφ}, 1) = e^{iφ/2} Rz(-φ/2)
                out.push(Gate::rz(target, -phi / 2.0));
            } else {
                out.push(Gate::x(target));
                let mut qs = all.clone();
                qs.push(target);
                mc_phase_into(out, phi, &qs);
                out.push(Gate::x(target));
            }
        }
        _ => unreachable!("pair kinds are lowered by compile_grbs"),
    }
    x_layer(out, anti);
}

fn is_complex(kind: &GateKind) -> bool {
    match kind {
        GateKind::ComplexRbs { .. } => true,
        GateKind::Grbs { phi, .. } => *phi != 0.0,
        _ => false,
    }
}

/// Pair rotation on `(a, b)` (`a` = in, `b` = out) with positive controls.
fn rbs_core(out: &mut Vec<Gate>, theta: f64, phi: f64, complex: bool, a: usize, b: usize, ctrls: &[usize]) -> Template {
    let (template, _) = rbs_cost(ctrls.len(), complex);
    match template {
        Template::Top => {
            let (fa, fb) = (frame_v(), frame_hv());
            emit_unitary(out, a, &fa);
            emit_unitary(out, b, &fb);
            out.push(Gate::cnot(a, b));
            mc_rotation_into(out, Axis::Y, theta / 2.0, a, ctrls);
            mc_rotation_into(out, Axis::Y, theta / 2.0, b, ctrls);
            out.push(Gate::cnot(a, b));
            emit_unitary(out, a, &su2::adjoint(&fa));
            emit_unitary(out, b, &su2::adjoint(&fb));
            if complex {
                mc_rotation_into(out, Axis::Z, phi / 2.0, a, ctrls);
                mc_rotation_into(out, Axis::Z, -phi / 2.0, b, ctrls);
            }
        }
        Template::Bottom => {
            let u = su2::mul(&su2::rz(phi), &su2::ry(-theta));
            let (lambda, axis, _) = su2::rw_from_matrix(&u);
            let mut all = ctrls.to_vec();
            all.push(b);
            out.push(Gate::cnot(a, b));
            mc_rw_into(out, lambda, axis, a, &all);
            out.push(Gate::cnot(a, b));
        }
    }
    template
}

/// Lowers an RBS or complex RBS gate (any controls / anti-controls).
pub fn compile_rbs(g: &Gate) -> Vec<Gate> {
    debug_assert!(matches!(g.kind, GateKind::Rbs { .. } | GateKind::ComplexRbs { .. }));
    compile_grbs(g)
}

/// Lowers any pair gate: a CNOT ladder folds the ins and outs onto one
/// pivot each, the central pair rotation is anti-controlled on the folded
/// wires, and the ladder is undone.
pub fn compile_grbs(g: &Gate) -> Vec<Gate> {
    let (theta, phi) = g.kind.pair_angles().expect("pair gate");
    let complex = is_complex(&g.kind);
    let a = g.ins.min().expect("non-empty ins");
    let b = g.outs.min().expect("non-empty outs");
    let rest_in = g.ins - QubitSet::single(a);
    let rest_out = g.outs - QubitSet::single(b);
    let mut ladder = Vec::new();
    for q in rest_in.iter() {
        ladder.push(Gate::cnot(a, q));
    }
    for q in rest_out.iter() {
        ladder.push(Gate::cnot(b, q));
    }
    let anti = g.anti_ctrls | rest_in | rest_out;
    let ctrls: Vec<usize> = (g.ctrls | anti).to_vec();

    let mut out = ladder.clone();
    x_layer(&mut out, anti);
    rbs_core(&mut out, theta, phi, complex, a, b, &ctrls);
    x_layer(&mut out, anti);
    out.extend(ladder.into_iter().rev());
    out
}

/// Lowers one logical gate.
pub fn compile_gate(g: &Gate) -> Vec<Gate> {
    if g.kind.is_pair() {
        return compile_grbs(g);
    }
    let mut out = Vec::new();
    let t = g.target().expect("single-qubit target");
    if g.kind == GateKind::Cnot {
        controlled_single(&mut out, &GateKind::X, t, g.ctrls, g.anti_ctrls);
    } else {
        controlled_single(&mut out, &g.kind, t, g.ctrls, g.anti_ctrls);
    }
    out
}

/// Template the compiler picks for a pair gate.
pub fn template_for(g: &Gate) -> Option<Template> {
    if !g.kind.is_pair() {
        return None;
    }
    let l = g.control_count() + g.ins.len() + g.outs.len() - 2;
    Some(rbs_cost(l, is_complex(&g.kind)).0)
}

/// A lowered circuit plus the CNOTs spent on each logical gate.
#[derive(Clone, Debug)]
pub struct Lowered {
    pub circuit: Circuit,
    pub cnots_per_gate: Vec<usize>,
}

impl Lowered {
    pub fn total_cnots(&self) -> usize {
        self.cnots_per_gate.iter().sum()
    }
}

pub fn lower(circuit: &Circuit) -> Result<Lowered> {
    circuit.validate()?;
    if circuit.level() == Level::Cnot {
        let per = circuit.gates().iter().map(|g| usize::from(g.kind == GateKind::Cnot)).collect();
        return Ok(Lowered { circuit: circuit.clone(), cnots_per_gate: per });
    }
    let mut gates = Vec::new();
    let mut per = Vec::with_capacity(circuit.len());
    for g in circuit.gates() {
        let lowered = compile_gate(g);
        per.push(lowered.iter().filter(|x| x.kind == GateKind::Cnot).count());
        gates.extend(lowered);
    }
    let out = Circuit::from_parts_unchecked(circuit.n(), Level::Cnot, gates);
    out.validate()?;
    Ok(Lowered { circuit: out, cnots_per_gate: per })
}
