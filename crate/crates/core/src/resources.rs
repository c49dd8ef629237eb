//! Analytic CNOT accounting from the tabulated multi-controlled gate costs,
//! kept apart from the counts the concrete compiler achieves.

use std::fmt::Write as _;

use serde::Serialize;

use crate::bitstring::binomial;
use crate::circuit::{Circuit, GateKind};
use crate::compiler;
use crate::coordinates::Mode;
use crate::encoders::EncoderReport;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CostKind {
    /// Multi-controlled Ry (also used for single-qubit bridges).
    Ry,
    Rbs,
    Grbs,
}

const RY: [i128; 5] = [0, 2, 4, 12, 36];
const RBS_REAL: [i128; 5] = [2, 6, 10, 26, 58];
const RBS_COMPLEX: [i128; 5] = [2, 6, 14, 38, 84];

/// CNOT cost of a gate with `l` controls. `m`, `mp` are the pair widths
/// (ignored for Ry); a gRBS with `m = mp = 1` is costed as an RBS.
pub fn table1_bound(kind: CostKind, l: usize, m: usize, mp: usize, complex: bool) -> i128 {
    let li = l as i128;
    match kind {
        CostKind::Ry => RY.get(l).copied().unwrap_or(16 * li - 24),
        CostKind::Grbs if m == 1 && mp == 1 => table1_bound(CostKind::Rbs, l, 1, 1, complex),
        CostKind::Rbs if complex => RBS_COMPLEX.get(l).copied().unwrap_or(20 * li + 4),
        CostKind::Rbs => RBS_REAL.get(l).copied().unwrap_or(16 * li - 6),
        CostKind::Grbs => {
            let w = (m + mp) as i128;
            if complex {
                22 * w + 20 * li - 20
            } else {
                18 * w + 16 * li - 42
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BudgetRow {
    pub kind: CostKind,
    pub ell: usize,
    /// m + m′ for gRBS rows, 2 for RBS rows, 1 for single-qubit rotations.
    pub width: usize,
    pub gate_count: i128,
    pub cnots_per_gate: i128,
}

impl BudgetRow {
    pub fn subtotal(&self) -> i128 {
        self.gate_count * self.cnots_per_gate
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CnotBudget {
    pub rows: Vec<BudgetRow>,
    pub total_analytic: i128,
    pub total_closed_form: i128,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_actual: Option<usize>,
}

impl CnotBudget {
    fn from_rows(rows: Vec<BudgetRow>, closed: Option<i128>) -> Self {
        let total: i128 = rows.iter().map(BudgetRow::subtotal).sum();
        CnotBudget { rows, total_analytic: total, total_closed_form: closed.unwrap_or(total), total_actual: None }
    }

    /// Fills `total_actual` by lowering `circuit`.
    pub fn with_actual(mut self, circuit: &Circuit) -> Result<Self> {
        self.total_actual = Some(compiler::lower(circuit)?.total_cnots());
        Ok(self)
    }

    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:<6} {:>3} {:>5} {:>10} {:>10} {:>12}", "kind", "l", "width", "gates", "cnots/gate", "subtotal");
        for r in &self.rows {
            let kind = match r.kind {
                CostKind::Ry => "ry",
                CostKind::Rbs => "rbs",
                CostKind::Grbs => "grbs",
            };
            let _ = writeln!(
                s,
                "{:<6} {:>3} {:>5} {:>10} {:>10} {:>12}",
                kind,
                r.ell,
                r.width,
                r.gate_count,
                r.cnots_per_gate,
                r.subtotal()
            );
        }
        let _ = writeln!(s, "total (summed)      {}", self.total_analytic);
        let _ = writeln!(s, "total (closed form) {}", self.total_closed_form);
        if let Some(a) = self.total_actual {
            let _ = writeln!(s, "total (compiled)    {a}");
        }
        s
    }
}

fn binom(n: usize, k: usize) -> i128 {
    binomial(n, k) as i128
}

/// Closed-form dense totals. Exact polynomials for k ≤ 4; for k ≥ 5 the
/// ℓ ≤ 3 terms are collected as a quartic in N = n − k and the rest summed.
pub fn dense_closed_form(n: usize, k: usize, complex: bool) -> i128 {
    let ni = n as i128;
    match (k, complex) {
        (0, _) => 0,
        (1, _) => 2 * (ni - 1),
        (2, _) => (ni - 2) * (3 * ni - 1),
        (3, false) => (ni - 3) * (5 * ni * ni - 6 * ni - 2) / 3,
        (3, true) => (ni - 3) * (7 * ni * ni - 12 * ni + 2) / 3,
        (4, false) => (ni - 4) * (13 * ni.pow(3) - 58 * ni * ni + 79 * ni - 42) / 12,
        (4, true) => (ni - 4) * (19 * ni.pow(3) - 86 * ni * ni + 105 * ni - 30) / 12,
        _ => {
            let big_n = (n - k) as i128;
            let a: [i128; 4] = if complex { [230, 329, 142, 19] } else { [178, 239, 98, 13] };
            let quartic: i128 = a.iter().enumerate().map(|(i, c)| c * big_n.pow(i as u32 + 1)).sum::<i128>() / 12;
            let tail: i128 = (4..k)
                .map(|l| binom(n - (k - l), l + 1) * table1_bound(CostKind::Rbs, l, 1, 1, complex))
                .sum();
            quartic + tail
        }
    }
}

/// Dense HW-k budget: `binom(n-(k-ℓ), ℓ+1)` RBS gates with ℓ controls.
/// The final complex phase gate is not part of the analytic total.
pub fn count_dense(n: usize, k: usize, complex: bool) -> Result<CnotBudget> {
    if k == 0 || 2 * k > n {
        return Err(Error::InvalidArgument(format!(
            "count_dense needs 1 <= k <= n/2 (got n = {n}, k = {k}); count the mirrored weight n - k instead"
        )));
    }
    let rows = (0..k)
        .map(|l| BudgetRow {
            kind: CostKind::Rbs,
            ell: l,
            width: 2,
            gate_count: binom(n - (k - l), l + 1),
            cnots_per_gate: table1_bound(CostKind::Rbs, l, 1, 1, complex),
        })
        .collect();
    Ok(CnotBudget::from_rows(rows, Some(dense_closed_form(n, k, complex))))
}

/// Closed form of the binary budget, defined for n ≥ 4.
pub fn binary_closed_form(n: usize) -> Option<i128> {
    if n < 4 {
        return None;
    }
    let ni = n as i128;
    let quartic = (13 * ni.pow(4) - 58 * ni.pow(3) + 119 * ni * ni - 50 * ni + 120) / 12;
    let tail: i128 = (5..=n).map(|k| binom(n, k) * (16 * k as i128 - 22) - 2).sum();
    Some(quartic + tail)
}

/// Binary-encoder budget: per weight stage, `binom(n,k) - 1` RBS gates with
/// k - 1 controls plus one k-controlled Ry bridge.
pub fn count_binary(n: usize) -> Result<CnotBudget> {
    if n == 0 || n > 30 {
        return Err(Error::InvalidArgument(format!("count_binary needs 1 <= n <= 30 (got {n})")));
    }
    let mut rows = Vec::new();
    for k in 0..=n {
        if k >= 1 && binom(n, k) > 1 {
            rows.push(BudgetRow {
                kind: CostKind::Rbs,
                ell: k - 1,
                width: 2,
                gate_count: binom(n, k) - 1,
                cnots_per_gate: table1_bound(CostKind::Rbs, k - 1, 1, 1, false),
            });
        }
        rows.push(BudgetRow { kind: CostKind::Ry, ell: k, width: 1, gate_count: 1, cnots_per_gate: table1_bound(CostKind::Ry, k, 1, 1, false) });
    }
    Ok(CnotBudget::from_rows(rows, binary_closed_form(n)))
}

/// Sums the tabulated cost of every pair gate in a sparse encoder report.
/// Uncontrolled X gates and the trailing complex phase gate are free in
/// this ledger; controlled X gates are costed like a controlled rotation.
pub fn count_sparse(report: &EncoderReport) -> CnotBudget {
    let complex = report.mode == Mode::Complex;
    let mut rows: Vec<BudgetRow> = Vec::new();
    for g in report.circuit.gates() {
        let (kind, width) = match g.kind {
            GateKind::Rbs { .. } | GateKind::ComplexRbs { .. } => (CostKind::Rbs, 2),
            GateKind::Grbs { .. } => (CostKind::Grbs, g.ins.len() + g.outs.len()),
            GateKind::Ry { .. } | GateKind::Rw { .. } => (CostKind::Ry, 1),
            // flips that finish a multi-bit weight raise
            GateKind::X if g.control_count() > 0 => (CostKind::Ry, 1),
            _ => continue,
        };
        let kind = if kind == CostKind::Grbs && width == 2 { CostKind::Rbs } else { kind };
        let ell = g.control_count();
        let cost = table1_bound(kind, ell, g.ins.len(), g.outs.len(), complex);
        match rows.iter_mut().find(|r| r.kind == kind && r.ell == ell && r.width == width) {
            Some(r) => r.gate_count += 1,
            None => rows.push(BudgetRow { kind, ell, width, gate_count: 1, cnots_per_gate: cost }),
        }
    }
    CnotBudget::from_rows(rows, None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BoundCheck {
    pub n: usize,
    pub count: i128,
    pub bound: i128,
    pub ok: bool,
}

/// Compares the binary budget with `8 n 2^n` for n = 1..=n_max.
pub fn check_8n2n(n_max: usize) -> Result<Vec<BoundCheck>> {
    if n_max > 30 {
        return Err(Error::InvalidArgument(format!("n_max = {n_max} exceeds 30")));
    }
    (1..=n_max)
        .map(|n| {
            let count = count_binary(n)?.total_analytic;
            let bound = 8 * n as i128 * (1i128 << n);
            Ok(BoundCheck { n, count, bound, ok: count <= bound })
        })
        .collect()
}
