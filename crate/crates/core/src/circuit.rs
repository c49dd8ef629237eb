//! Gate and circuit intermediate representation.
//!
//! Single-qubit kinds keep their target in `ins`. A CNOT has exactly one
//! entry in `ctrls` and its target in `ins`. Pair kinds (RBS, complex RBS,
//! gRBS) act on the basis pair where `ins` are 1 / `outs` are 0 and the
//! flipped partner.

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bitstring::QubitSet;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Logical,
    Cnot,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::Logical => "logical",
            Level::Cnot => "cnot",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateKind {
    X,
    Ry { theta: f64 },
    Rz { phi: f64 },
    /// `exp(iλ w·σ)`.
    Rw { lambda: f64, axis: [f64; 3] },
    /// `diag(e^{iφ}, 1)`.
    AntiPhase { phi: f64 },
    Rbs { theta: f64 },
    ComplexRbs { theta: f64, phi: f64 },
    Grbs { theta: f64, phi: f64 },
    Cnot,
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::X => "x",
            GateKind::Ry { .. } => "ry",
            GateKind::Rz { .. } => "rz",
            GateKind::Rw { .. } => "rw",
            GateKind::AntiPhase { .. } => "antiphase",
            GateKind::Rbs { .. } => "rbs",
            GateKind::ComplexRbs { .. } => "crbs",
            GateKind::Grbs { .. } => "grbs",
            GateKind::Cnot => "cnot",
        }
    }

    pub fn is_pair(&self) -> bool {
        matches!(self, GateKind::Rbs { .. } | GateKind::ComplexRbs { .. } | GateKind::Grbs { .. })
    }

    /// `(θ, φ)` of a pair gate.
    pub fn pair_angles(&self) -> Option<(f64, f64)> {
        match *self {
            GateKind::Rbs { theta } => Some((theta, 0.0)),
            GateKind::ComplexRbs { theta, phi } | GateKind::Grbs { theta, phi } => Some((theta, phi)),
            _ => None,
        }
    }

    /// Number of free data parameters carried by the gate.
    pub fn parameter_count(&self) -> usize {
        match self {
            GateKind::X | GateKind::Cnot => 0,
            GateKind::Ry { .. } | GateKind::Rz { .. } | GateKind::AntiPhase { .. } | GateKind::Rbs { .. } => 1,
            GateKind::ComplexRbs { .. } | GateKind::Grbs { .. } | GateKind::Rw { .. } => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub ins: QubitSet,
    pub outs: QubitSet,
    pub ctrls: QubitSet,
    pub anti_ctrls: QubitSet,
}

impl Gate {
    pub fn single(kind: GateKind, target: usize) -> Self {
        Gate { kind, ins: QubitSet::single(target), outs: QubitSet::EMPTY, ctrls: QubitSet::EMPTY, anti_ctrls: QubitSet::EMPTY }
    }

    pub fn x(target: usize) -> Self {
        Self::single(GateKind::X, target)
    }

    pub fn ry(target: usize, theta: f64) -> Self {
        Self::single(GateKind::Ry { theta }, target)
    }

    pub fn rz(target: usize, phi: f64) -> Self {
        Self::single(GateKind::Rz { phi }, target)
    }

    pub fn rw(target: usize, lambda: f64, axis: [f64; 3]) -> Self {
        Self::single(GateKind::Rw { lambda, axis }, target)
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Gate {
            kind: GateKind::Cnot,
            ins: QubitSet::single(target),
            outs: QubitSet::EMPTY,
            ctrls: QubitSet::single(control),
            anti_ctrls: QubitSet::EMPTY,
        }
    }

    pub fn pair(kind: GateKind, ins: QubitSet, outs: QubitSet) -> Self {
        Gate { kind, ins, outs, ctrls: QubitSet::EMPTY, anti_ctrls: QubitSet::EMPTY }
    }

    pub fn controlled_by(mut self, ctrls: QubitSet) -> Self {
        self.ctrls = self.ctrls | ctrls;
        self
    }

    pub fn anti_controlled_by(mut self, anti: QubitSet) -> Self {
        self.anti_ctrls = self.anti_ctrls | anti;
        self
    }

    /// Target of a single-qubit kind or CNOT.
    pub fn target(&self) -> Option<usize> {
        if self.kind.is_pair() {
            None
        } else {
            self.ins.min()
        }
    }

    /// Every qubit the gate touches.
    pub fn support(&self) -> QubitSet {
        self.ins | self.outs | self.ctrls | self.anti_ctrls
    }

    /// Number of control qubits including anti-controls.
    pub fn control_count(&self) -> usize {
        self.ctrls.len() + self.anti_ctrls.len()
    }

    pub fn validate(&self, n: usize, index: usize) -> Result<()> {
        let bad = |reason: String| Err(Error::InvalidGate { index, reason });
        let sets = [self.ins, self.outs, self.ctrls, self.anti_ctrls];
        for (i, a) in sets.iter().enumerate() {
            for b in &sets[i + 1..] {
                if !a.is_disjoint(*b) {
                    return bad(format!("qubit sets overlap: {a:?} and {b:?}"));
                }
            }
        }
        if let Some(q) = self.support().max() {
            if q > n {
                return bad(format!("qubit label {q} exceeds n = {n}"));
            }
        }
        let finite = |v: f64| v.is_finite();
        let angles_ok = match self.kind {
            GateKind::Ry { theta } | GateKind::Rbs { theta } => finite(theta),
            GateKind::Rz { phi } | GateKind::AntiPhase { phi } => finite(phi),
            GateKind::ComplexRbs { theta, phi } | GateKind::Grbs { theta, phi } => finite(theta) && finite(phi),
            GateKind::Rw { lambda, axis } => {
                let nrm = axis.iter().map(|a| a * a).sum::<f64>().sqrt();
                finite(lambda) && (nrm - 1.0).abs() < 1e-9
            }
            GateKind::X | GateKind::Cnot => true,
        };
        if !angles_ok {
            return bad("non-finite angle or non-unit axis".into());
        }
        match self.kind {
            GateKind::Rbs { .. } | GateKind::ComplexRbs { .. } => {
                if self.ins.len() != 1 || self.outs.len() != 1 {
                    return bad(format!("{} needs one in and one out qubit", self.kind.name()));
                }
            }
            GateKind::Grbs { .. } => {
                if self.ins.is_empty() || self.outs.is_empty() {
                    return bad("grbs needs non-empty ins and outs".into());
                }
            }
            GateKind::Cnot => {
                if self.ins.len() != 1 || !self.outs.is_empty() || self.ctrls.len() != 1 || !self.anti_ctrls.is_empty() {
                    return bad("cnot needs exactly one control and one target".into());
                }
            }
            _ => {
                if self.ins.len() != 1 || !self.outs.is_empty() {
                    return bad(format!("{} needs exactly one target", self.kind.name()));
                }
            }
        }
        Ok(())
    }

    fn allowed_at_cnot_level(&self) -> bool {
        match self.kind {
            GateKind::Cnot => true,
            GateKind::X | GateKind::Ry { .. } | GateKind::Rz { .. } | GateKind::Rw { .. } => {
                self.ctrls.is_empty() && self.anti_ctrls.is_empty()
            }
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n: usize,
    level: Level,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n: usize, level: Level) -> Self {
        Circuit { n, level, gates: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        let index = self.gates.len();
        self.check_gate(&gate, index)?;
        self.gates.push(gate);
        Ok(())
    }

    fn check_gate(&self, gate: &Gate, index: usize) -> Result<()> {
        gate.validate(self.n, index)?;
        if self.level == Level::Cnot && !gate.allowed_at_cnot_level() {
            return Err(Error::InvalidGate {
                index,
                reason: format!("{} with controls is not allowed in a cnot-level circuit", gate.kind.name()),
            });
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > crate::bitstring::MAX_QUBITS {
            return Err(Error::InvalidArgument(format!("qubit count {} outside 1..=64", self.n)));
        }
        for (i, g) in self.gates.iter().enumerate() {
            self.check_gate(g, i)?;
        }
        Ok(())
    }

    pub fn require_level(&self, level: Level) -> Result<()> {
        if self.level != level {
            return Err(Error::LevelMismatch { expected: level.to_string(), found: self.level.to_string() });
        }
        Ok(())
    }

    pub fn cnot_count(&self) -> usize {
        self.gates.iter().filter(|g| g.kind == GateKind::Cnot).count()
    }

    /// Number of data parameters in the circuit.
    pub fn parameter_count(&self) -> usize {
        self.gates.iter().map(|g| g.kind.parameter_count()).sum()
    }

    /// Gates that carry an angle (everything but X and CNOT).
    pub fn parameterized_gates(&self) -> usize {
        self.gates.iter().filter(|g| g.kind.parameter_count() > 0).count()
    }

    pub(crate) fn from_parts_unchecked(n: usize, level: Level, gates: Vec<Gate>) -> Self {
        Circuit { n, level, gates }
    }

    fn record(&self) -> CircuitRecord {
        CircuitRecord { n: self.n, level: self.level, gates: self.gates.iter().map(GateRecord::from_gate).collect() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.record()).expect("circuit serialization cannot fail")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.record()).expect("circuit serialization cannot fail")
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self.record()).expect("circuit serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)?;
        Self::from_value(&value)
    }

    pub fn from_value(value: &Value) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Header {
            n: usize,
            level: Level,
            gates: Vec<Value>,
        }
        let header: Header = serde_json::from_value(value.clone())?;
        let mut circuit = Circuit::new(header.n, header.level);
        for (index, raw) in header.gates.into_iter().enumerate() {
            let rec: GateRecord =
                serde_json::from_value(raw).map_err(|e| Error::Schema { index, message: e.to_string() })?;
            let gate = rec.into_gate(index)?;
            circuit.gates.push(gate);
        }
        circuit.validate()?;
        Ok(circuit)
    }
}

impl Serialize for Circuit {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.record().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Circuit {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        Circuit::from_value(&v).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize)]
struct CircuitRecord {
    n: usize,
    level: Level,
    gates: Vec<GateRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GateRecord {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    phi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    axis: Option<[f64; 3]>,
    ins: QubitSet,
    #[serde(default)]
    outs: QubitSet,
    #[serde(default)]
    ctrls: QubitSet,
    #[serde(default)]
    anti_ctrls: QubitSet,
}

impl GateRecord {
    fn from_gate(g: &Gate) -> Self {
        let (theta, phi, axis) = match g.kind {
            GateKind::X | GateKind::Cnot => (None, None, None),
            GateKind::Ry { theta } | GateKind::Rbs { theta } => (Some(theta), None, None),
            GateKind::Rz { phi } | GateKind::AntiPhase { phi } => (None, Some(phi), None),
            GateKind::ComplexRbs { theta, phi } | GateKind::Grbs { theta, phi } => (Some(theta), Some(phi), None),
            GateKind::Rw { lambda, axis } => (Some(lambda), None, Some(axis)),
        };
        GateRecord {
            kind: g.kind.name().to_string(),
            theta,
            phi,
            axis,
            ins: g.ins,
            outs: g.outs,
            ctrls: g.ctrls,
            anti_ctrls: g.anti_ctrls,
        }
    }

    fn into_gate(self, index: usize) -> Result<Gate> {
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| Error::Schema { index, message: format!("gate kind {:?} requires field {name:?}", self.kind) })
        };
        let kind = match self.kind.as_str() {
            "x" => GateKind::X,
            "cnot" => GateKind::Cnot,
            "ry" => GateKind::Ry { theta: need(self.theta, "theta")? },
            "rbs" => GateKind::Rbs { theta: need(self.theta, "theta")? },
            "rz" => GateKind::Rz { phi: need(self.phi, "phi")? },
            "antiphase" => GateKind::AntiPhase { phi: need(self.phi, "phi")? },
            "crbs" => GateKind::ComplexRbs { theta: need(self.theta, "theta")?, phi: need(self.phi, "phi")? },
            "grbs" => GateKind::Grbs { theta: need(self.theta, "theta")?, phi: self.phi.unwrap_or(0.0) },
            "rw" => GateKind::Rw {
                lambda: need(self.theta, "theta")?,
                axis: self
                    .axis
                    .ok_or_else(|| Error::Schema { index, message: "gate kind \"rw\" requires field \"axis\"".into() })?,
            },
            other => return Err(Error::UnknownGateKind { index, kind: other.to_string() }),
        };
        Ok(Gate { kind, ins: self.ins, outs: self.outs, ctrls: self.ctrls, anti_ctrls: self.anti_ctrls })
    }
}
