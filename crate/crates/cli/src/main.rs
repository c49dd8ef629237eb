use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use hwenc::cdr::CdrConfig;
use hwenc::compiler;
use hwenc::demo::{self, DemoConfig, QGaussianSpec};
use hwenc::io::{map_to_csv, ordering_to_csv, read_vector_csv};
use hwenc::qasm::emit_qasm;
use hwenc::resources::{self, CnotBudget};
use hwenc::simulator::{self, NoiseModel};
use hwenc::{BitString, Circuit, Complex64, DataVector, EncoderReport, Level, Mode, SparseOptions, SparseTuple};

const DEFAULT_SEED: u64 = 0;

#[derive(Parser)]
#[command(name = "hwenc", version, about = "Hamming-weight, sparse and binary amplitude encoders")]
struct Cli {
    /// Seed for every randomized step
    #[arg(long, global = true, env = "HWENC_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Dense HW-k encoder from a CSV vector (entries in ordering order)
    Encode {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// CSV with one column (real) or two columns (re, im)
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        complex: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Sparse encoder from JSON tuples [{"bits": "...", "re": .., "im": ..}]
    Sparse {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        sort_by_weight: bool,
        #[arg(long)]
        complex: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Binary encoder over all 2^n basis states
    Binary {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// CNOT budgets
    Count(CountArgs),
    /// Simulate a circuit file: exact probabilities, or sampled counts
    Simulate {
        #[arg(long)]
        circuit: PathBuf,
        /// 0 prints exact probabilities
        #[arg(long, default_value_t = 0)]
        shots: u64,
        /// `depol:p` (depolarizing after each CNOT) or `none`
        #[arg(long, default_value = "none")]
        noise: String,
        /// Ordering CSV written by encode/sparse/binary; sorts the output rows
        #[arg(long)]
        ordering: Option<PathBuf>,
    },
    /// End-to-end demos
    Demo {
        #[command(subcommand)]
        which: DemoCmd,
    },
}

#[derive(Subcommand)]
enum DemoCmd {
    /// Load a discretized q-Gaussian, run it under noise, optionally mitigate
    Qgaussian(QgArgs),
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = LevelArg::Logical)]
    level: LevelArg,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Circuit destination (stdout when absent)
    #[arg(long)]
    output: Option<PathBuf>,
    /// Ordering CSV destination; defaults to `<output>.ordering.csv`
    #[arg(long)]
    ordering_out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum LevelArg {
    Logical,
    Cnot,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Json,
    Qasm,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum CountMode {
    Analytic,
    ClosedForm,
    Actual,
}

#[derive(Args)]
struct CountArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    complex: bool,
    #[arg(long, value_enum, default_value_t = CountMode::Analytic)]
    mode: CountMode,
    /// Budget of the binary encoder on n qubits
    #[arg(long)]
    binary: bool,
    /// Compare the binary budget with 8 n 2^n for n = 1..=N
    #[arg(long, value_name = "N")]
    check_8n2n: Option<usize>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct QgArgs {
    #[arg(long, default_value_t = 1.5)]
    q: f64,
    #[arg(long, default_value_t = 2.0)]
    beta: f64,
    #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
    lo: f64,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    hi: f64,
    #[arg(long, default_value_t = 6)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 15)]
    points: usize,
    #[arg(long, default_value_t = 10_000)]
    shots: u64,
    #[arg(long, default_value = "depol:0.01")]
    noise: String,
    /// `cdr` or `none`
    #[arg(long, default_value = "none")]
    mitigate: String,
    /// Comma-separated replacement rates
    #[arg(long, value_delimiter = ',', default_values_t = [0.79, 0.83, 0.90, 0.95, 1.00])]
    rates: Vec<f64>,
    #[arg(long, default_value_t = 50)]
    circuits_per_rate: usize,
    /// Bootstrap resamples for the percentile bands (0 disables)
    #[arg(long, default_value_t = 0)]
    bootstrap: usize,
    /// CSV destination (stdout when absent)
    #[arg(long)]
    output: Option<PathBuf>,
}

fn parse_noise(s: &str) -> Result<f64> {
    match s.split_once(':') {
        None if s == "none" => Ok(0.0),
        Some(("depol", p)) => {
            let p: f64 = p.parse().with_context(|| format!("bad depolarizing probability in {s:?}"))?;
            NoiseModel::new(p, 0)?;
            Ok(p)
        }
        _ => bail!("unknown noise model {s:?}; expected `depol:p` or `none`"),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_report(report: &EncoderReport, out: &OutputArgs) -> Result<()> {
    let circuit = match out.level {
        LevelArg::Logical => report.circuit.clone(),
        LevelArg::Cnot => compiler::lower(&report.circuit)?.circuit,
    };
    let text = match out.format {
        Format::Json => circuit.to_json_pretty() + "\n",
        Format::Qasm if out.level == LevelArg::Logical => bail!("--format qasm needs --level cnot"),
        Format::Qasm => emit_qasm(&circuit)?,
    };
    write_or_print(out.output.as_deref(), &text)?;
    let ordering_path = out.ordering_out.clone().or_else(|| {
        out.output.as_ref().map(|p| {
            let mut s = p.clone().into_os_string();
            s.push(".ordering.csv");
            PathBuf::from(s)
        })
    });
    match ordering_path {
        Some(p) => fs::write(&p, ordering_to_csv(&report.ordering)).with_context(|| format!("writing {}", p.display()))?,
        None => eprintln!("ordering: {}", report.ordering.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(" ")),
    }
    eprintln!(
        "n={} gates={} parameters={} cnots={}",
        circuit.n(),
        circuit.len(),
        report.param_count,
        if out.level == LevelArg::Cnot { circuit.cnot_count().to_string() } else { "-".into() }
    );
    Ok(())
}

fn read_ordering(path: &Path) -> Result<Vec<BitString>> {
    let text = read(path)?;
    let mut out = Vec::new();
    for line in text.lines().skip(1).filter(|l| !l.trim().is_empty()) {
        let bits = line.rsplit(',').next().unwrap_or("").trim();
        out.push(bits.parse().with_context(|| format!("bad bitstring {bits:?} in {}", path.display()))?);
    }
    Ok(out)
}

/// Deterministic nonzero data of length d, used where only the structure
/// of an encoder matters.
fn structural_data(d: usize, complex: bool) -> Result<DataVector> {
    if complex {
        Ok(DataVector::complex((0..d).map(|i| Complex64::from_polar(1.0 + i as f64, 0.7 * i as f64 + 0.3)).collect())?)
    } else {
        Ok(DataVector::real((0..d).map(|i| 1.0 + i as f64).collect())?)
    }
}

fn print_budget(b: &CnotBudget, mode: CountMode, json: bool) -> Result<()> {
    if json {
        println!("{}", serde_json::to_string_pretty(b)?);
        return Ok(());
    }
    print!("{}", b.to_table());
    let total = match mode {
        CountMode::Analytic => b.total_analytic.to_string(),
        CountMode::ClosedForm => b.total_closed_form.to_string(),
        CountMode::Actual => b.total_actual.map(|a| a.to_string()).unwrap_or_default(),
    };
    println!("{total}");
    Ok(())
}

fn count(a: &CountArgs) -> Result<()> {
    if let Some(n_max) = a.check_8n2n {
        let rows = resources::check_8n2n(n_max)?;
        if a.json {
            println!("{}", serde_json::to_string_pretty(&rows)?);
        } else {
            println!("n,count,bound,ok");
            for r in &rows {
                println!("{},{},{},{}", r.n, r.count, r.bound, r.ok);
            }
        }
        if rows.iter().any(|r| !r.ok) {
            bail!("binary budget exceeds 8 n 2^n");
        }
        return Ok(());
    }
    let Some(n) = a.n else { bail!("--n is required") };
    let mut budget;
    if a.binary {
        budget = resources::count_binary(n)?;
        if a.mode == CountMode::Actual {
            let r = hwenc::encode_binary(n, &structural_data(1 << n, a.complex)?)?;
            budget = budget.with_actual(&r.circuit)?;
        }
    } else {
        let Some(k) = a.k else { bail!("--k is required unless --binary or --check-8n2n is given") };
        let kk = if 2 * k > n && k <= n {
            eprintln!("k = {k} > n/2: counting the mirrored weight {}", n - k);
            n - k
        } else {
            k
        };
        budget = resources::count_dense(n, kk, a.complex)?;
        if a.mode == CountMode::Actual {
            let d = hwenc::bitstring::binomial(n, k) as usize;
            let x = structural_data(d, a.complex)?;
            let r = if a.complex { hwenc::encode_dense_complex(n, k, &x)? } else { hwenc::encode_dense_real(n, k, &x)? };
            budget = budget.with_actual(&r.circuit)?;
        }
    }
    print_budget(&budget, a.mode, a.json)
}

fn simulate(seed: u64, circuit: &Path, shots: u64, noise: &str, ordering: Option<&Path>) -> Result<()> {
    let c = Circuit::from_json(&read(circuit)?)?;
    let p2 = parse_noise(noise)?;
    let ordering = ordering.map(read_ordering).transpose()?;
    println!("# seed={seed} shots={shots} noise={noise}");
    if shots == 0 {
        if p2 > 0.0 {
            bail!("noisy simulation needs --shots >= 1");
        }
        let probs = simulator::probabilities(&simulator::run(&c));
        print!("{}", map_to_csv("probability", &probs, ordering.as_deref()));
        return Ok(());
    }
    let counts = if p2 > 0.0 {
        let lowered = match c.level() {
            Level::Cnot => c,
            Level::Logical => {
                eprintln!("noise acts after CNOTs: lowering the logical circuit first");
                compiler::lower(&c)?.circuit
            }
        };
        simulator::run_noisy(&lowered, &NoiseModel::new(p2, seed)?, shots, seed)?
    } else {
        simulator::sample(&simulator::run(&c), shots, seed)
    };
    print!("{}", map_to_csv("count", &counts, ordering.as_deref()));
    Ok(())
}

fn qgaussian(seed: u64, a: &QgArgs) -> Result<()> {
    let p2 = parse_noise(&a.noise)?;
    let cdr = match a.mitigate.as_str() {
        "none" => None,
        "cdr" => Some(CdrConfig { replacement_rates: a.rates.clone(), circuits_per_rate: a.circuits_per_rate, ..CdrConfig::default() }),
        other => bail!("unknown mitigation {other:?}; expected `cdr` or `none`"),
    };
    let cfg = DemoConfig {
        spec: QGaussianSpec { q: a.q, beta: a.beta, interval: (a.lo, a.hi), points: a.points },
        n: a.n,
        k: a.k,
        shots: a.shots,
        p2,
        seed,
        cdr,
        bootstrap: a.bootstrap,
    };
    let r = demo::run_qgaussian(&cfg)?;
    let mut text = format!(
        "# seed={seed} q={} beta={} n={} k={} points={} shots={} noise={} mitigate={} cnots={}\n",
        a.q, a.beta, a.n, a.k, a.points, a.shots, a.noise, a.mitigate, r.cnot_count
    );
    text.push_str(&r.to_csv()?);
    write_or_print(a.output.as_deref(), &text)?;
    eprintln!("mean relative error (raw): {:.6}", r.mean_rel_err_raw);
    if let Some(m) = r.mean_rel_err_mitigated {
        eprintln!("mean relative error (mitigated): {m:.6}");
        if r.degenerate_fits > 0 {
            eprintln!("warning: {} observables used the identity fit (no spread in training data)", r.degenerate_fits);
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Encode { n, k, input, complex, out } => {
            let x = read_vector_csv(&read(&input)?)?;
            let report = if complex || x.mode() == Mode::Complex {
                hwenc::encode_dense_complex(n, k, &x)?
            } else {
                hwenc::encode_dense_real(n, k, &x)?
            };
            emit_report(&report, &out)
        }
        Cmd::Sparse { n, input, sort_by_weight, complex, out } => {
            let y = SparseTuple::from_json(&read(&input)?)?;
            let opts = SparseOptions { sort_by_weight, complex: complex.then_some(true) };
            emit_report(&hwenc::encode_sparse(n, &y, opts)?, &out)
        }
        Cmd::Binary { n, input, out } => {
            let x = read_vector_csv(&read(&input)?)?;
            emit_report(&hwenc::encode_binary(n, &x)?, &out)
        }
        Cmd::Count(a) => count(&a),
        Cmd::Simulate { circuit, shots, noise, ordering } => simulate(cli.seed, &circuit, shots, &noise, ordering.as_deref()),
        Cmd::Demo { which: DemoCmd::Qgaussian(a) } => qgaussian(cli.seed, &a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = match (e.downcast_ref::<hwenc::Error>(), e.downcast_ref::<std::io::Error>()) {
                (Some(h), _) => h.code(),
                (None, Some(_)) => "io",
                _ => "usage",
            };
            let chain: Vec<String> = e.chain().map(|c| c.to_string()).collect();
            let report = serde_json::json!({ "error": code, "message": chain.join(": ") });
            eprintln!("{report}");
            ExitCode::FAILURE
        }
    }
}
