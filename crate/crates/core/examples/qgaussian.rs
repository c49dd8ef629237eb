//! Runs the q-Gaussian demo a few times and prints the mean relative errors.

use std::time::Instant;

use hwenc::cdr::CdrConfig;
use hwenc::demo::{run_qgaussian, DemoConfig};

fn main() {
    let reps: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    for seed in 0..reps {
        let t = Instant::now();
        let cfg = DemoConfig { seed, cdr: Some(CdrConfig::default()), ..Default::default() };
        let r = run_qgaussian(&cfg).expect("demo");
        println!(
            "seed {seed}: raw {:.4} mitigated {:.4} ({:.1}s)",
            r.mean_rel_err_raw,
            r.mean_rel_err_mitigated.unwrap(),
            t.elapsed().as_secs_f64()
        );
    }
}
