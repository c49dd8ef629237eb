//! Dense unitary construction from tensor products of single-qubit factors.
//!
//! Used as an oracle: every gate is written as a sum of Kronecker products of
//! projectors, flip operators and 2×2 blocks, so it shares no index
//! arithmetic with the sparse simulator.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::circuit::{Circuit, Gate, GateKind};
use crate::error::{Error, Result};
use crate::su2::{self, Mat2};

pub const MAX_DENSE_QUBITS: usize = 12;

pub type Unitary = DMatrix<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn proj0() -> Mat2 {
    [[ONE, ZERO], [ZERO, ZERO]]
}

fn proj1() -> Mat2 {
    [[ZERO, ZERO], [ZERO, ONE]]
}

/// `|0⟩⟨1|`
fn lower() -> Mat2 {
    [[ZERO, ONE], [ZERO, ZERO]]
}

/// `|1⟩⟨0|`
fn raise() -> Mat2 {
    [[ZERO, ZERO], [ONE, ZERO]]
}

fn to_matrix(m: &Mat2) -> Unitary {
    DMatrix::from_fn(2, 2, |i, j| m[i][j])
}

/// `factors[q-1]` acts on qubit `q`; qubit n is the most significant index bit.
fn kron_all(factors: &[Mat2]) -> Unitary {
    let mut out = DMatrix::from_element(1, 1, ONE);
    for f in factors.iter().rev() {
        out = out.kronecker(&to_matrix(f));
    }
    out
}

fn check_n(n: usize) -> Result<()> {
    if n > MAX_DENSE_QUBITS {
        return Err(Error::TooManyQubits { n, max: MAX_DENSE_QUBITS });
    }
    Ok(())
}

pub fn single_qubit_matrix(kind: &GateKind) -> Option<Mat2> {
    Some(match *kind {
        GateKind::X | GateKind::Cnot => su2::pauli_x(),
        GateKind::Ry { theta } => su2::ry(theta),
        GateKind::Rz { phi } => su2::rz(phi),
        GateKind::Rw { lambda, axis } => su2::rw(lambda, axis),
        GateKind::AntiPhase { phi } => su2::anti_phase(phi),
        _ => return None,
    })
}

fn control_factors(g: &Gate, n: usize) -> Vec<Mat2> {
    let mut f = vec![su2::identity(); n];
    for q in g.ctrls.iter() {
        f[q - 1] = proj1();
    }
    for q in g.anti_ctrls.iter() {
        f[q - 1] = proj0();
    }
    f
}

pub fn gate_unitary(g: &Gate, n: usize) -> Result<Unitary> {
    check_n(n)?;
    g.validate(n, 0)?;
    let dim = 1usize << n;
    let eye = Unitary::identity(dim, dim);
    if let Some(u) = single_qubit_matrix(&g.kind) {
        let t = g.target().expect("single-qubit gate has a target");
        let mut p = control_factors(g, n);
        let mut q = p.clone();
        p[t - 1] = su2::identity();
        q[t - 1] = u;
        return Ok(eye - kron_all(&p) + kron_all(&q));
    }
    let (theta, phi) = g.kind.pair_angles().expect("pair gate");
    let (s, c) = theta.sin_cos();
    let e = Complex64::from_polar(1.0, phi);
    let base = control_factors(g, n);
    let with = |on_in: Mat2, on_out: Mat2| {
        let mut f = base.clone();
        for q in g.ins.iter() {
            f[q - 1] = on_in;
        }
        for q in g.outs.iter() {
            f[q - 1] = on_out;
        }
        kron_all(&f)
    };
    let pb = with(proj1(), proj0());
    let pbp = with(proj0(), proj1());
    // flip takes |b⟩ (ins=1, outs=0) to |b′⟩
    let flip = with(lower(), raise());
    let flip_back = flip.adjoint();
    let u = eye - &pb - &pbp + pb * (e * c) + pbp * (e.conj() * c) + flip * (e.conj() * s) - flip_back * (e * s);
    Ok(u)
}

/// Product of all gate unitaries (first gate acts first).
pub fn circuit_unitary(c: &Circuit) -> Result<Unitary> {
    check_n(c.n())?;
    let dim = 1usize << c.n();
    let mut u = Unitary::identity(dim, dim);
    for g in c.gates() {
        u = gate_unitary(g, c.n())? * u;
    }
    Ok(u)
}

/// Max entry deviation between `a` and `b` after removing one global phase,
/// fitted on the largest-modulus entry of `a`.
pub fn phase_distance(a: &Unitary, b: &Unitary) -> f64 {
    assert_eq!(a.shape(), b.shape());
    let (mut idx, mut best) = ((0, 0), -1.0);
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            let v = a[(i, j)].norm();
            if v > best {
                best = v;
                idx = (i, j);
            }
        }
    }
    let ph = if b[idx].norm() == 0.0 { ONE } else { a[idx] / b[idx] };
    let ph = ph / ph.norm();
    a.iter().zip(b.iter()).map(|(x, y)| (x - ph * y).norm()).fold(0.0, f64::max)
}

/// Same as [`phase_distance`] for state vectors.
pub fn state_phase_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let (mut idx, mut best) = (0, -1.0);
    for (i, z) in a.iter().enumerate() {
        if z.norm() > best {
            best = z.norm();
            idx = i;
        }
    }
    let ph = if b[idx].norm() == 0.0 { ONE } else { a[idx] / b[idx] };
    let ph = ph / ph.norm();
    a.iter().zip(b).map(|(x, y)| (x - ph * y).norm()).fold(0.0, f64::max)
}

pub fn unitarity_error(u: &Unitary) -> f64 {
    let d = u.nrows();
    let p = u.adjoint() * u - Unitary::identity(d, d);
    p.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
