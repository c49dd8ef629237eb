//! Single-qubit 2×2 matrices and Euler decompositions.
//!
//! Rotations use the half-angle-free convention: `Ry(θ) = exp(-iθY)`,
//! `Rz(φ) = exp(-iφZ)`, and `Rw(λ, w) = exp(iλ w·σ)`.

use num_complex::Complex64;

pub type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity() -> Mat2 {
    [[ONE, ZERO], [ZERO, ONE]]
}

pub fn pauli_x() -> Mat2 {
    [[ZERO, ONE], [ONE, ZERO]]
}

pub fn pauli_y() -> Mat2 {
    [[ZERO, c(0.0, -1.0)], [c(0.0, 1.0), ZERO]]
}

pub fn pauli_z() -> Mat2 {
    [[ONE, ZERO], [ZERO, -ONE]]
}

pub fn hadamard() -> Mat2 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [[c(s, 0.0), c(s, 0.0)], [c(s, 0.0), c(-s, 0.0)]]
}

pub fn ry(theta: f64) -> Mat2 {
    let (s, co) = theta.sin_cos();
    [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
}

pub fn rz(phi: f64) -> Mat2 {
    [[Complex64::from_polar(1.0, -phi), ZERO], [ZERO, Complex64::from_polar(1.0, phi)]]
}

/// `diag(e^{iφ}, 1)`.
pub fn anti_phase(phi: f64) -> Mat2 {
    [[Complex64::from_polar(1.0, phi), ZERO], [ZERO, ONE]]
}

/// `exp(iλ w·σ)` for a unit axis `w`.
pub fn rw(lambda: f64, axis: [f64; 3]) -> Mat2 {
    let (s, co) = lambda.sin_cos();
    let [x, y, z] = axis;
    [[c(co, s * z), c(s * y, s * x)], [c(-s * y, s * x), c(co, -s * z)]]
}

pub fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut r = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    r
}

pub fn adjoint(a: &Mat2) -> Mat2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

pub fn det(a: &Mat2) -> Complex64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

pub fn scale(a: &Mat2, z: Complex64) -> Mat2 {
    [[a[0][0] * z, a[0][1] * z], [a[1][0] * z, a[1][1] * z]]
}

/// Largest entry-wise deviation after removing a global phase fitted on the
/// largest entry of `a`.
#[allow(clippy::needless_range_loop)]
pub fn phase_distance(a: &Mat2, b: &Mat2) -> f64 {
    let (mut bi, mut bj, mut best) = (0, 0, -1.0);
    for i in 0..2 {
        for j in 0..2 {
            if a[i][j].norm() > best {
                best = a[i][j].norm();
                bi = i;
                bj = j;
            }
        }
    }
    let ph = if b[bi][bj].norm() == 0.0 { ONE } else { a[bi][bj] / b[bi][bj] };
    let ph = ph / ph.norm();
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            worst = worst.max((a[i][j] - ph * b[i][j]).norm());
        }
    }
    worst
}

/// `U = e^{iγ} Rz(a) Ry(b) Rz(c)`; returns `(γ, a, b, c)`.
pub fn zyz(u: &Mat2) -> (f64, f64, f64, f64) {
    let gamma = det(u).arg() / 2.0;
    let v = scale(u, Complex64::from_polar(1.0, -gamma));
    let alpha = v[0][0];
    let beta = v[1][0];
    let b = beta.norm().atan2(alpha.norm());
    let (a, cc) = if beta.norm() < 1e-14 {
        (-alpha.arg(), 0.0)
    } else if alpha.norm() < 1e-14 {
        (beta.arg(), 0.0)
    } else {
        ((beta.arg() - alpha.arg()) / 2.0, (-alpha.arg() - beta.arg()) / 2.0)
    };
    (gamma, a, b, cc)
}

/// `(λ, axis)` with `exp(iλ w·σ) = e^{-iγ} U`; also returns γ.
pub fn rw_from_matrix(u: &Mat2) -> (f64, [f64; 3], f64) {
    let gamma = det(u).arg() / 2.0;
    let v = scale(u, Complex64::from_polar(1.0, -gamma));
    let cos_l = v[0][0].re.clamp(-1.0, 1.0);
    let lambda = cos_l.acos();
    let (x, y, z) = (v[0][1].im, v[0][1].re, v[0][0].im);
    let s = (x * x + y * y + z * z).sqrt();
    if s < 1e-13 {
        return (lambda, [0.0, 1.0, 0.0], gamma);
    }
    (lambda, [x / s, y / s, z / s], gamma)
}

/// The Rw parameters of `Ry(θ) Rz(φ)`; `λ = arccos(cos θ cos φ)`.
pub fn rw_from_product(theta: f64, phi: f64) -> (f64, [f64; 3]) {
    let (l, axis, _) = rw_from_matrix(&mul(&ry(theta), &rz(phi)));
    (l, axis)
}
