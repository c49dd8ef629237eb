//! OpenQASM 2.0 emission for cnot-level circuits.
//!
//! The IR rotations are half-angle free (`Ry(θ) = e^{-iθY}`), so every angle
//! is doubled on the way out. Qubit label q goes to wire `n - q`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::circuit::{Circuit, Gate, GateKind, Level};
use crate::error::{Error, Result};
use crate::su2;

/// Formats an angle in radians, using `pi` fractions for multiples of π/8.
pub fn format_angle(a: f64) -> String {
    let eighths = a / (PI / 8.0);
    let k = eighths.round();
    if (eighths - k).abs() < 1e-12 && k.abs() <= 64.0 {
        let k = k as i64;
        if k == 0 {
            return "0".into();
        }
        let g = gcd(k.unsigned_abs(), 8) as i64;
        let (num, den) = (k / g, 8 / g);
        let sign = if num < 0 { "-" } else { "" };
        let num = num.abs();
        let head = if num == 1 { "pi".to_string() } else { format!("{num}*pi") };
        return if den == 1 { format!("{sign}{head}") } else { format!("{sign}{head}/{den}") };
    }
    format!("{a:?}")
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn write_gate(out: &mut String, g: &Gate, n: usize) -> Result<()> {
    let w = |q: usize| n - q;
    let t = g.target();
    match g.kind {
        GateKind::X => writeln!(out, "x q[{}];", w(t.unwrap())),
        GateKind::Cnot => writeln!(out, "cx q[{}],q[{}];", w(g.ctrls.min().unwrap()), w(t.unwrap())),
        GateKind::Ry { theta } => writeln!(out, "ry({}) q[{}];", format_angle(2.0 * theta), w(t.unwrap())),
        GateKind::Rz { phi } => writeln!(out, "rz({}) q[{}];", format_angle(2.0 * phi), w(t.unwrap())),
        GateKind::Rw { lambda, axis } => {
            let (_, a, b, c) = su2::zyz(&su2::rw(lambda, axis));
            let q = w(t.unwrap());
            writeln!(out, "rz({}) q[{q}];", format_angle(2.0 * c))
                .and_then(|_| writeln!(out, "ry({}) q[{q}];", format_angle(2.0 * b)))
                .and_then(|_| writeln!(out, "rz({}) q[{q}];", format_angle(2.0 * a)))
        }
        _ => return Err(Error::InvalidGate { index: 0, reason: format!("{} cannot be emitted as QASM", g.kind.name()) }),
    }
    .expect("writing to a String");
    Ok(())
}

pub fn emit_qasm(circuit: &Circuit) -> Result<String> {
    circuit.require_level(Level::Cnot)?;
    let n = circuit.n();
    let mut out = format!("OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[{n}];\n");
    for (i, g) in circuit.gates().iter().enumerate() {
        write_gate(&mut out, g, n).map_err(|e| match e {
            Error::InvalidGate { reason, .. } => Error::InvalidGate { index: i, reason },
            e => e,
        })?;
    }
    Ok(out)
}
