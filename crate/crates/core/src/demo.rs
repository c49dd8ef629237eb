//! q-Gaussian loading demo: encode, lower, run under depolarizing noise and
//! optionally mitigate with CDR.

use serde::Serialize;

use crate::bitstring::BitString;
use crate::cdr::{self, CdrConfig, RegressionFit};
use crate::compiler;
use crate::coordinates::DataVector;
use crate::encoders::encode_dense_real;
use crate::error::{Error, Result};
use crate::noise::{derive_seed, run_trajectories};
use crate::simulator;

/// `e_q(x)`: `e^x` at q = 1, else `[1 + (1-q)x]^{1/(1-q)}` where the base is
/// positive and 0 otherwise.
pub fn q_exponential(x: f64, q: f64) -> f64 {
    if q == 1.0 {
        return x.exp();
    }
    let base = 1.0 + (1.0 - q) * x;
    if base > 0.0 {
        base.powf(1.0 / (1.0 - q))
    } else {
        0.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QGaussianSpec {
    pub q: f64,
    pub beta: f64,
    pub interval: (f64, f64),
    pub points: usize,
}

impl Default for QGaussianSpec {
    fn default() -> Self {
        QGaussianSpec { q: 1.5, beta: 2.0, interval: (-2.0, 2.0), points: 15 }
    }
}

impl QGaussianSpec {
    // negated comparisons also reject NaN
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.interval;
        if !(self.q < 3.0) || !(self.beta > 0.0) || !(lo < hi) || !lo.is_finite() || !hi.is_finite() || self.points < 2 {
            return Err(Error::InvalidArgument(format!(
                "need q < 3, beta > 0, lo < hi and points >= 2 (got q = {}, beta = {}, [{lo}, {hi}], points = {})",
                self.q, self.beta, self.points
            )));
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        let (lo, hi) = self.interval;
        let step = (hi - lo) / (self.points - 1) as f64;
        (0..self.points).map(|i| if i + 1 == self.points { hi } else { lo + i as f64 * step }).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Discretized {
    pub grid: Vec<f64>,
    /// Normalized to unit sum.
    pub density: Vec<f64>,
    /// Square roots of `density`.
    pub amplitudes: DataVector,
}

/// Evaluates `e_q(-βx²)` on the grid, normalizes to a probability vector and
/// takes square roots as amplitudes.
pub fn discretize_qgaussian(spec: &QGaussianSpec) -> Result<Discretized> {
    spec.validate()?;
    let grid = spec.grid();
    let raw: Vec<f64> = grid.iter().map(|&x| q_exponential(-spec.beta * x * x, spec.q)).collect();
    let total: f64 = raw.iter().sum();
    if total <= 0.0 || !total.is_finite() {
        return Err(Error::ZeroVector);
    }
    let density: Vec<f64> = raw.iter().map(|v| v / total).collect();
    let amplitudes = DataVector::real(density.iter().map(|p| p.sqrt()).collect())?;
    Ok(Discretized { grid, density, amplitudes })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DemoConfig {
    pub spec: QGaussianSpec,
    pub n: usize,
    pub k: usize,
    pub shots: u64,
    pub p2: f64,
    pub seed: u64,
    /// Rates and circuits per rate; the shot count and seed are taken from
    /// the demo.
    pub cdr: Option<CdrConfig>,
    /// Bootstrap resamples; 0 disables the bands.
    pub bootstrap: usize,
}

impl Default for DemoConfig {
    fn default() -> Self {
        DemoConfig { spec: QGaussianSpec::default(), n: 6, k: 2, shots: 10_000, p2: 0.01, seed: 0, cdr: None, bootstrap: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DemoRow {
    pub bitstring: BitString,
    pub target: f64,
    pub raw: f64,
    pub mitigated: Option<f64>,
    pub band_low: Option<f64>,
    pub band_high: Option<f64>,
    pub rel_err_raw: f64,
    pub rel_err_mitigated: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DemoResult {
    pub seed: u64,
    pub grid: Vec<f64>,
    pub rows: Vec<DemoRow>,
    /// Exact probabilities of the lowered circuit on the encoder ordering.
    pub noiseless: Vec<f64>,
    pub cnot_count: usize,
    pub mean_rel_err_raw: f64,
    pub mean_rel_err_mitigated: Option<f64>,
    pub degenerate_fits: usize,
}

impl DemoResult {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }
}

fn mean(v: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    s / n as f64
}

pub fn run_qgaussian(cfg: &DemoConfig) -> Result<DemoResult> {
    if cfg.shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let data = discretize_qgaussian(&cfg.spec)?;
    let report = encode_dense_real(cfg.n, cfg.k, &data.amplitudes)?;
    let lowered = compiler::lower(&report.circuit)?;
    let circuit = &lowered.circuit;
    let ordering = &report.ordering;
    let d = ordering.len();

    let ideal = simulator::run(circuit);
    let noiseless: Vec<f64> = ordering.iter().map(|b| ideal.amplitude(b).norm_sqr()).collect();

    let counts = run_trajectories(circuit, cfg.p2, cfg.shots, derive_seed(cfg.seed, 0))?;
    let mut binned: Vec<u64> = ordering.iter().map(|b| counts.get(b).copied().unwrap_or(0)).collect();
    let inside: u64 = binned.iter().sum();
    binned.push(cfg.shots - inside);
    let raw: Vec<f64> = binned[..d].iter().map(|&c| c as f64 / cfg.shots as f64).collect();

    let fits: Option<Vec<RegressionFit>> = match &cfg.cdr {
        None => None,
        Some(c) => {
            let c = CdrConfig { shots: cfg.shots, seed: derive_seed(cfg.seed, 1), ..c.clone() };
            let ensemble = cdr::near_clifford_ensemble(circuit, &c)?;
            let training = cdr::build_training_set(&ensemble, ordering, cfg.p2, c.shots, derive_seed(cfg.seed, 2))?;
            Some(cdr::fit_all(&training))
        }
    };
    let mitigated = fits.as_ref().map(|f| cdr::fit_and_mitigate(f, &raw));

    let bands = if cfg.bootstrap >= 2 {
        let bands = cdr::bootstrap_with(&binned, cfg.bootstrap, derive_seed(cfg.seed, 3), |freq| match &fits {
            Some(f) => cdr::fit_and_mitigate(f, &freq[..d]),
            None => freq[..d].to_vec(),
        })?;
        Some(bands)
    } else {
        None
    };

    let rows: Vec<DemoRow> = (0..d)
        .map(|i| {
            let t = data.density[i];
            let m = mitigated.as_ref().map(|m| m[i]);
            DemoRow {
                bitstring: ordering[i],
                target: t,
                raw: raw[i],
                mitigated: m,
                band_low: bands.as_ref().map(|b| b[i].0),
                band_high: bands.as_ref().map(|b| b[i].1),
                rel_err_raw: (raw[i] - t).abs() / t,
                rel_err_mitigated: m.map(|m| (m - t).abs() / t),
            }
        })
        .collect();
    Ok(DemoResult {
        seed: cfg.seed,
        grid: data.grid,
        noiseless,
        cnot_count: lowered.total_cnots(),
        mean_rel_err_raw: mean(rows.iter().map(|r| r.rel_err_raw)),
        mean_rel_err_mitigated: mitigated.as_ref().map(|_| mean(rows.iter().filter_map(|r| r.rel_err_mitigated))),
        degenerate_fits: fits.as_ref().map(|f| f.iter().filter(|x| x.degenerate).count()).unwrap_or(0),
        rows,
    })
}
