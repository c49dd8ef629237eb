//! Hyperspherical angles for real and complex data vectors.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Real,
    Complex,
}

/// A nonzero data vector. In real mode every imaginary part is zero.
#[derive(Clone, Debug, PartialEq)]
pub struct DataVector {
    entries: Vec<Complex64>,
    mode: Mode,
}

impl DataVector {
    pub fn real(values: Vec<f64>) -> Result<Self> {
        Self::checked(values.into_iter().map(|v| Complex64::new(v, 0.0)).collect(), Mode::Real)
    }

    pub fn complex(values: Vec<Complex64>) -> Result<Self> {
        Self::checked(values, Mode::Complex)
    }

    fn checked(entries: Vec<Complex64>, mode: Mode) -> Result<Self> {
        if let Some(i) = entries.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        if entries.iter().all(|z| z.re == 0.0 && z.im == 0.0) {
            return Err(Error::ZeroVector);
        }
        Ok(DataVector { entries, mode })
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().fold(0.0f64, |acc, z| acc.hypot(z.norm()))
    }

    pub fn normalized(&self) -> Vec<Complex64> {
        let r = self.norm();
        self.entries.iter().map(|z| z / r).collect()
    }

    /// Same data viewed as complex (used by the complex encoders).
    pub fn as_complex(&self) -> DataVector {
        DataVector { entries: self.entries.clone(), mode: Mode::Complex }
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.entries.iter().map(|z| z.re).collect()
    }
}

/// Rotation angles: `thetas` has d-1 entries, `phis` has d entries in
/// complex mode and is empty in real mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleSet {
    pub thetas: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub phis: Vec<f64>,
}

/// Principal value in (-π, π], with atan2(0, 0) = 0.
pub fn atan2_principal(y: f64, x: f64) -> f64 {
    if y == 0.0 && x == 0.0 {
        return 0.0;
    }
    let a = y.atan2(x);
    if a <= -PI {
        PI
    } else if a == 0.0 {
        0.0
    } else {
        a
    }
}

pub fn arg(z: Complex64) -> f64 {
    atan2_principal(z.im, z.re)
}

/// Wraps an angle into (-π, π].
pub fn wrap_angle(a: f64) -> f64 {
    let mut r = a % (2.0 * PI);
    if r <= -PI {
        r += 2.0 * PI;
    } else if r > PI {
        r -= 2.0 * PI;
    }
    r
}

fn thetas_of(values: &[f64]) -> Vec<f64> {
    let d = values.len();
    // suffix[i] = ‖(x_{i+1}, …, x_{d-1})‖ with 0-based indices
    let mut suffix = vec![0.0f64; d];
    for i in (0..d - 1).rev() {
        suffix[i] = suffix[i + 1].hypot(values[i + 1]);
    }
    let mut thetas = Vec::with_capacity(d - 1);
    for i in 0..d.saturating_sub(2) {
        thetas.push(atan2_principal(suffix[i], values[i]));
    }
    thetas.push(atan2_principal(values[d - 1], values[d - 2]));
    thetas
}

fn require_len(x: &DataVector) -> Result<()> {
    if x.len() < 2 {
        return Err(Error::Dimension { d: x.len(), reason: "angles need d >= 2".into() });
    }
    Ok(())
}

pub fn angles_real(x: &DataVector) -> Result<AngleSet> {
    if x.mode() != Mode::Real {
        return Err(Error::InvalidArgument("angles_real needs a real-mode vector".into()));
    }
    require_len(x)?;
    Ok(AngleSet { thetas: thetas_of(&x.real_parts()), phis: Vec::new() })
}

pub fn angles_complex(x: &DataVector) -> Result<AngleSet> {
    if x.mode() != Mode::Complex {
        return Err(Error::InvalidArgument("angles_complex needs a complex-mode vector".into()));
    }
    require_len(x)?;
    let moduli: Vec<f64> = x.entries().iter().map(|z| z.norm()).collect();
    Ok(AngleSet { thetas: thetas_of(&moduli), phis: phases_of(x.entries()) })
}

/// φ_1 = arg x_1, φ_i = arg x_i + Σ_{j<i} φ_j, each reduced to (-π, π].
pub(crate) fn phases_of(entries: &[Complex64]) -> Vec<f64> {
    let mut phis = Vec::with_capacity(entries.len());
    let mut acc = 0.0;
    for z in entries {
        let phi = wrap_angle(arg(*z) + acc);
        acc = wrap_angle(acc + phi);
        phis.push(phi);
    }
    phis
}

/// `sin_cos` that returns exact zeros at multiples of π/2, so zero entries
/// survive a round trip.
fn sin_cos_exact(t: f64) -> (f64, f64) {
    if t == PI || t == -PI {
        (0.0, -1.0)
    } else if t == FRAC_PI_2 {
        (1.0, 0.0)
    } else if t == -FRAC_PI_2 {
        (-1.0, 0.0)
    } else {
        t.sin_cos()
    }
}

/// Inverse of the angle maps, used as an oracle.
pub fn reconstruct(angles: &AngleSet, norm: f64) -> DataVector {
    let d = angles.thetas.len() + 1;
    let mut mags = Vec::with_capacity(d);
    let mut sines = norm;
    for (i, &t) in angles.thetas.iter().enumerate() {
        let (sin, cos) = sin_cos_exact(t);
        mags.push(sines * cos);
        sines *= sin;
        if i == d - 2 {
            mags.push(sines);
        }
    }
    if d == 1 {
        mags.push(norm);
    }
    if angles.phis.is_empty() {
        return DataVector { entries: mags.into_iter().map(|m| Complex64::new(m, 0.0)).collect(), mode: Mode::Real };
    }
    let mut acc = 0.0;
    let entries = mags
        .into_iter()
        .zip(&angles.phis)
        .map(|(m, &phi)| {
            let z = Complex64::from_polar(m, phi - acc);
            acc += phi;
            z
        })
        .collect();
    DataVector { entries, mode: Mode::Complex }
}
