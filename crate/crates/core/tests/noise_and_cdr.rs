mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::FRAC_PI_4;

use common::*;
use hwenc::cdr::{self, CdrConfig, RegressionFit};
use hwenc::compiler::lower;
use hwenc::simulator::{self, run_noisy, NoiseModel};
use hwenc::{encode_dense_real, BitString, Circuit, DataVector, Gate, GateKind, Level};

/// Aaronson-Gottesman stabilizer tableau, used as an oracle independent of
/// the state-vector simulator.
#[derive(Clone)]
struct Tableau {
    n: usize,
    x: Vec<Vec<bool>>,
    z: Vec<Vec<bool>>,
    r: Vec<bool>,
}

fn g(x1: bool, z1: bool, x2: bool, z2: bool) -> i32 {
    let (x2, z2) = (x2 as i32, z2 as i32);
    match (x1, z1) {
        (false, false) => 0,
        (true, true) => z2 - x2,
        (true, false) => z2 * (2 * x2 - 1),
        (false, true) => x2 * (1 - 2 * z2),
    }
}

impl Tableau {
    fn new(n: usize) -> Self {
        let mut t = Tableau { n, x: vec![vec![false; n]; 2 * n + 1], z: vec![vec![false; n]; 2 * n + 1], r: vec![false; 2 * n + 1] };
        for i in 0..n {
            t.x[i][i] = true;
            t.z[n + i][i] = true;
        }
        t
    }

    fn h(&mut self, a: usize) {
        for i in 0..2 * self.n {
            self.r[i] ^= self.x[i][a] && self.z[i][a];
            std::mem::swap(&mut self.x[i][a], &mut self.z[i][a]);
        }
    }

    fn s(&mut self, a: usize) {
        for i in 0..2 * self.n {
            self.r[i] ^= self.x[i][a] && self.z[i][a];
            self.z[i][a] ^= self.x[i][a];
        }
    }

    fn cnot(&mut self, a: usize, b: usize) {
        for i in 0..2 * self.n {
            self.r[i] ^= self.x[i][a] && self.z[i][b] && (self.x[i][b] ^ self.z[i][a] ^ true);
            self.x[i][b] ^= self.x[i][a];
            self.z[i][a] ^= self.z[i][b];
        }
    }

    fn rowsum(&mut self, h: usize, i: usize) {
        let mut sum = 2 * self.r[h] as i32 + 2 * self.r[i] as i32;
        for j in 0..self.n {
            sum += g(self.x[i][j], self.z[i][j], self.x[h][j], self.z[h][j]);
        }
        self.r[h] = sum.rem_euclid(4) == 2;
        for j in 0..self.n {
            self.x[h][j] ^= self.x[i][j];
            self.z[h][j] ^= self.z[i][j];
        }
    }

    /// `Some(outcome)` if measuring `a` is deterministic, else collapses to
    /// `forced` and returns `None`.
    fn measure(&mut self, a: usize, forced: bool) -> Option<bool> {
        let n = self.n;
        if let Some(p) = (n..2 * n).find(|&p| self.x[p][a]) {
            for i in 0..2 * n {
                if i != p && self.x[i][a] {
                    self.rowsum(i, p);
                }
            }
            self.x[p - n] = self.x[p].clone();
            self.z[p - n] = self.z[p].clone();
            self.r[p - n] = self.r[p];
            self.x[p] = vec![false; n];
            self.z[p] = vec![false; n];
            self.z[p][a] = true;
            self.r[p] = forced;
            None
        } else {
            self.x[2 * n] = vec![false; n];
            self.z[2 * n] = vec![false; n];
            self.r[2 * n] = false;
            for i in 0..n {
                if self.x[i][a] {
                    self.rowsum(2 * n, i + n);
                }
            }
            Some(self.r[2 * n])
        }
    }

    /// Every basis state with nonzero probability, by branching on each
    /// random measurement, and log2 of its size.
    fn support(&self) -> (BTreeSet<u64>, usize) {
        fn walk(t: &Tableau, a: usize, mask: u64, out: &mut BTreeSet<u64>) {
            if a == t.n {
                out.insert(mask);
                return;
            }
            let mut zero = t.clone();
            match zero.measure(a, false) {
                Some(bit) => walk(&zero, a + 1, mask | (bit as u64) << a, out),
                None => {
                    walk(&zero, a + 1, mask, out);
                    let mut one = t.clone();
                    one.measure(a, true);
                    walk(&one, a + 1, mask | 1 << a, out);
                }
            }
        }
        let mut out = BTreeSet::new();
        walk(self, 0, 0, &mut out);
        let r = out.len().trailing_zeros() as usize;
        (out, r)
    }
}

fn quarter_turns(a: f64) -> usize {
    let k = (a / FRAC_PI_4).round();
    assert!((a - k * FRAC_PI_4).abs() < 1e-9, "angle {a} is not a Clifford angle");
    k.rem_euclid(4.0) as usize
}

/// Runs a Clifford cnot-level circuit on the tableau. Ry(π/4) is H·Z and
/// Rz(π/4) is S up to phase in the IR convention.
fn tableau_of(c: &Circuit) -> Tableau {
    let mut t = Tableau::new(c.n());
    for gate in c.gates() {
        match gate.kind {
            GateKind::Cnot => t.cnot(gate.ctrls.min().unwrap() - 1, gate.target().unwrap() - 1),
            GateKind::X => {
                let a = gate.target().unwrap() - 1;
                t.h(a);
                t.s(a);
                t.s(a);
                t.h(a);
            }
            GateKind::Rz { phi } => {
                let a = gate.target().unwrap() - 1;
                for _ in 0..quarter_turns(phi) {
                    t.s(a);
                }
            }
            GateKind::Ry { theta } => {
                let a = gate.target().unwrap() - 1;
                for _ in 0..quarter_turns(theta) {
                    t.s(a);
                    t.s(a);
                    t.h(a);
                }
            }
            other => panic!("non-Clifford gate {other:?} left in a fully replaced circuit"),
        }
    }
    t
}

fn demo_circuit(n: usize, k: usize) -> (Circuit, Vec<BitString>) {
    let d = hwenc::bitstring::binomial(n, k) as usize;
    let x = DataVector::real((0..d).map(|i| 1.0 + (i as f64 * 0.37).sin()).collect()).unwrap();
    let report = encode_dense_real(n, k, &x).unwrap();
    (lower(&report.circuit).unwrap().circuit, report.ordering)
}

#[test]
fn tableau_oracle_sanity() {
    // Bell pair: support {00, 11}
    let mut c = Circuit::new(2, Level::Cnot);
    c.push(Gate::ry(1, FRAC_PI_4)).unwrap();
    c.push(Gate::cnot(1, 2)).unwrap();
    let (support, r) = tableau_of(&c).support();
    assert_eq!(support, BTreeSet::from([0b00, 0b11]));
    assert_eq!(r, 1);
}

#[test]
fn full_replacement_gives_flat_stabilizer_profiles() {
    let (circuit, _) = demo_circuit(5, 2);
    let cfg = CdrConfig { replacement_rates: vec![1.0], circuits_per_rate: 40, shots: 1, seed: 17 };
    for member in cdr::near_clifford_ensemble(&circuit, &cfg).unwrap() {
        assert!(cdr::non_clifford_positions(&member).is_empty());
        let (support, r) = tableau_of(&member).support();
        let state = simulator::run(&member);
        let probs = simulator::probabilities(&state);
        let seen: BTreeSet<u64> = probs.iter().filter(|(_, p)| **p > 1e-12).map(|(b, _)| b.mask()).collect();
        assert_eq!(seen, support);
        let flat = 1.0 / (1u64 << r) as f64;
        for (b, p) in probs.iter().filter(|(_, p)| **p > 1e-12) {
            assert!((p - flat).abs() < 1e-9, "{b}: {p} vs 2^-{r}");
        }
    }
}

#[test]
fn ensemble_size_and_determinism() {
    let (circuit, ordering) = demo_circuit(6, 2);
    let cfg = CdrConfig { shots: 500, ..CdrConfig::default() };
    let a = cdr::near_clifford_ensemble(&circuit, &cfg).unwrap();
    assert_eq!(a.len(), 250);
    let b = cdr::near_clifford_ensemble(&circuit, &cfg).unwrap();
    assert_eq!(a, b);
    let t1 = cdr::build_training_set(&a[..20], &ordering, 0.01, 500, 9).unwrap();
    let t2 = cdr::build_training_set(&a[..20], &ordering, 0.01, 500, 9).unwrap();
    assert_eq!(t1, t2);
    assert!(t1.pairs.iter().all(|p| p.len() == 20));
}

#[test]
fn noiseless_training_is_diagonal() {
    let (circuit, ordering) = demo_circuit(5, 2);
    let cfg = CdrConfig { replacement_rates: vec![0.5, 0.9], circuits_per_rate: 30, shots: 100_000, seed: 3 };
    let ensemble = cdr::near_clifford_ensemble(&circuit, &cfg).unwrap();
    let training = cdr::build_training_set(&ensemble, &ordering, 0.0, 100_000, 4).unwrap();
    for fit in cdr::fit_all(&training).iter().filter(|f| !f.degenerate) {
        assert!((fit.slope - 1.0).abs() < 0.05, "slope {}", fit.slope);
        assert!(fit.intercept.abs() < 0.01, "intercept {}", fit.intercept);
    }
}

#[test]
fn synthetic_regression_recovered() {
    let pairs: Vec<(f64, f64)> = (0..30).map(|i| i as f64 / 30.0).map(|x| (x, 2.0 * x - 0.1)).collect();
    let fit = RegressionFit::fit(&pairs);
    assert!((fit.slope - 2.0).abs() < 1e-10 && (fit.intercept + 0.1).abs() < 1e-10);
    let flat = RegressionFit::fit(&[(0.3, 0.1), (0.3, 0.5)]);
    assert!(flat.degenerate);
    assert_eq!((flat.slope, flat.intercept), (1.0, 0.0));
}

#[test]
fn mitigated_vectors_are_distributions() {
    let fits = vec![
        RegressionFit { slope: 3.0, intercept: -0.5, degenerate: false, training_pairs: vec![] },
        RegressionFit { slope: 1.0, intercept: 0.2, degenerate: false, training_pairs: vec![] },
        RegressionFit { slope: 0.5, intercept: 0.0, degenerate: false, training_pairs: vec![] },
    ];
    let m = cdr::fit_and_mitigate(&fits, &[0.1, 0.6, 0.3]);
    assert!(m.iter().all(|p| *p >= 0.0));
    assert!((m.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    assert_eq!(m[0], 0.0);
}

#[test]
fn single_cnot_depolarizing_matches_closed_form() {
    // X on the control, then one noisy CNOT: 3 of the 15 Paulis leave 11 alone
    let mut c = Circuit::new(2, Level::Cnot);
    c.push(Gate::x(1)).unwrap();
    c.push(Gate::cnot(1, 2)).unwrap();
    let p2 = 0.3;
    let shots = 200_000u64;
    let counts = run_noisy(&c, &NoiseModel::new(p2, 0).unwrap(), shots, 11).unwrap();
    let expect: BTreeMap<&str, f64> =
        BTreeMap::from([("11", 1.0 - p2 + p2 * 3.0 / 15.0), ("01", p2 * 4.0 / 15.0), ("10", p2 * 4.0 / 15.0), ("00", p2 * 4.0 / 15.0)]);
    for (b, p) in expect {
        let got = counts.get(&bs(b)).copied().unwrap_or(0) as f64;
        let sigma = (shots as f64 * p * (1.0 - p)).sqrt();
        assert!((got - shots as f64 * p).abs() < 4.0 * sigma, "{b}: {got} vs {}", shots as f64 * p);
    }
}

#[test]
fn fidelity_drops_with_noise() {
    let (circuit, ordering) = demo_circuit(6, 2);
    let ideal = simulator::run(&circuit);
    let shots = 40_000u64;
    let mut last = -1.0;
    for p2 in [0.0, 0.01, 0.05] {
        let counts = run_noisy(&circuit, &NoiseModel::new(p2, 0).unwrap(), shots, 5).unwrap();
        let tv: f64 = 0.5
            * ordering.iter().map(|b| (counts.get(b).copied().unwrap_or(0) as f64 / shots as f64 - ideal.amplitude(b).norm_sqr()).abs()).sum::<f64>()
            + 0.5 * counts.iter().filter(|(b, _)| !ordering.contains(b)).map(|(_, &c)| c as f64 / shots as f64).sum::<f64>();
        assert!(tv > last, "p2 = {p2}: distance {tv} not above {last}");
        last = tv;
    }
}

#[test]
fn noiseless_trajectories_match_exact_sampling() {
    let (circuit, _) = demo_circuit(5, 2);
    let probs = simulator::probabilities(&simulator::run(&circuit));
    let shots = 50_000u64;
    let counts = run_noisy(&circuit, &NoiseModel::noiseless(0), shots, 2).unwrap();
    for (b, p) in probs.iter().filter(|(_, p)| **p > 1e-12) {
        let got = counts.get(b).copied().unwrap_or(0) as f64;
        let sigma = (shots as f64 * p * (1.0 - p)).sqrt().max(1.0);
        assert!((got - shots as f64 * p).abs() < 4.0 * sigma, "{b}");
    }
    assert!(counts.keys().all(|b| probs.get(b).copied().unwrap_or(0.0) > 1e-12));
}

#[test]
fn bootstrap_width_tracks_binomial_sigma() {
    let bands = cdr::bootstrap_bands(&[5_000, 5_000], 100, 8).unwrap();
    let predicted = 2.0 * 1.645 * (0.25f64 / 10_000.0).sqrt();
    let width = bands[0].1 - bands[0].0;
    assert!(width > predicted / 4.0 && width < predicted * 4.0, "width {width} vs {predicted}");
    assert_eq!(cdr::bootstrap_bands(&[0, 7], 50, 1).unwrap()[1], (1.0, 1.0));
    assert_eq!(cdr::bootstrap_bands(&[3, 7], 50, 1).unwrap(), cdr::bootstrap_bands(&[3, 7], 50, 1).unwrap());
}
