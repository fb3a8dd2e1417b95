//! The `bpqm-lab` command line: compile and inspect MPGs, run single
//! decodes, query the optimal-decoder oracles and run experiment sweeps.

pub mod experiments;
pub mod parse;

use std::collections::HashMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::codes::{load_code, BinaryLinearCode};
use crate::error::{BpqmError, Result};
use crate::mpbpqm::{mp_bit_success, QuantGrid};
use crate::mpg::{build_mpg, compile_lists};
use crate::oracles::{
    capacities, classical_bsc_param, classical_map_success, helstrom_bit_report, pgm_block_report, Target,
};
use crate::qsim::{
    bpqm_block_success, bpqm_block_success_average, channel_state, default_order, validate_order, BitCircuit,
};
use experiments::ExperimentConfig;
use parse::{parse_angle, parse_angle_list, parse_bits, parse_int_list, parse_positions};

#[derive(Parser, Debug)]
#[command(
    name = "bpqm-lab",
    version,
    about = "Belief propagation with quantum messages: decoders, oracles and experiments"
)]
struct Cli {
    /// Worker threads (overrides BPQM_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the message-passing graph of one bit and its root branch list.
    Compile(CompileArgs),
    /// Success probability of a BPQM decoder, as a JSON record.
    Decode(DecodeArgs),
    /// Optimal and classical reference values, as a JSON record.
    Oracle(OracleArgs),
    /// Run an experiment sweep and write CSV.
    Experiment(ExperimentArgs),
}

#[derive(Args, Debug)]
struct CodeArg {
    /// `builtin:<name>` (code5, code6, code8, code17) or a path to a code file.
    #[arg(long, default_value = "builtin:code5")]
    code: String,
}

#[derive(Args, Debug)]
struct CompileArgs {
    #[command(flatten)]
    code: CodeArg,
    /// Target bit, 1-based.
    #[arg(long, default_value_t = 1)]
    bit: usize,
    /// Channel angle (radians or e.g. `0.2pi`); a comma list gives one per channel.
    #[arg(long, default_value = "0.2pi")]
    theta: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Statevector simulation, averaged over all codewords.
    Exact,
    /// Discretized message passing in compact form, on one codeword.
    Mp,
    /// Monte Carlo estimate from simulated measurement outcomes.
    Sample,
}

#[derive(Args, Debug)]
struct DecodeArgs {
    #[command(flatten)]
    code: CodeArg,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
    /// `block` or a 1-based bit index.
    #[arg(long, default_value = "1")]
    target: String,
    #[arg(long, default_value = "0.2pi")]
    theta: String,
    /// Angle-register size for `--mode mp`; omit for unquantized messages.
    #[arg(long = "B")]
    b: Option<u32>,
    /// Transmitted codeword for `--mode mp` (bit string); defaults to all zeros.
    #[arg(long)]
    x: Option<String>,
    /// Decode order for block targets, comma-separated 1-based positions.
    #[arg(long)]
    order: Option<String>,
    /// Number of shots for `--mode sample`.
    #[arg(long, default_value_t = 1000)]
    sample: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OracleKind {
    Helstrom,
    Pgm,
    ClassicalBit,
    ClassicalBlock,
    Capacity,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[command(flatten)]
    code: CodeArg,
    #[arg(long, value_enum, default_value_t = OracleKind::Helstrom)]
    kind: OracleKind,
    #[arg(long, default_value_t = 1)]
    bit: usize,
    #[arg(long, default_value = "0.2pi")]
    theta: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Experiment {
    Fig12,
    Fig16,
    Fig17,
    Fig19,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    #[arg(value_enum)]
    id: Experiment,
    /// Code source; defaults to code17 for fig12 and code8 otherwise.
    #[arg(long)]
    code: Option<String>,
    /// Channel angle (fig12, fig17) or angle grid (fig16, fig19): a comma
    /// list or `start..end:step`.
    #[arg(long)]
    theta: Option<String>,
    /// Decoder-angle grid for fig17.
    #[arg(long)]
    theta_prime: Option<String>,
    /// Register sizes for fig12: `a..b[:step]` or a comma list.
    #[arg(long = "B", default_value = "4..16:2")]
    b: String,
    /// Unrolling depths for fig16.
    #[arg(long, default_value = "1,2,3")]
    depths: String,
    /// Decode order for block rows of fig16.
    #[arg(long)]
    order: Option<String>,
    /// Output CSV path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Run the command line on `args` (including the program name) and return
/// the process exit code: 0 on success, 2 on bad usage, 1 on other errors.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Err(e) = configure_threads(cli.threads) {
        eprintln!("error: {e}");
        return 2;
    }
    let mut stdout = std::io::stdout().lock();
    match dispatch(cli.command, &mut stdout) {
        Ok(()) => 0,
        Err(BpqmError::InvalidArgument(msg)) | Err(BpqmError::BadOrder(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn configure_threads(flag: Option<usize>) -> std::result::Result<(), String> {
    let threads = match flag {
        Some(t) => Some(t),
        None => match std::env::var("BPQM_THREADS") {
            Ok(v) => Some(v.parse().map_err(|_| format!("BPQM_THREADS='{v}' is not a thread count"))?),
            Err(_) => None,
        },
    };
    if let Some(t) = threads {
        // A pool may already exist when run is called twice in one process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    Ok(())
}

fn invalid(msg: String) -> BpqmError {
    BpqmError::InvalidArgument(msg)
}

fn channel_angles(code: &BinaryLinearCode, spec: &str) -> Result<Vec<f64>> {
    let list = parse_angle_list(spec).map_err(invalid)?;
    match list.len() {
        1 => Ok(vec![list[0]; code.n()]),
        n if n == code.n() => Ok(list),
        n => Err(invalid(format!("{n} angles given for a length-{} code", code.n()))),
    }
}

fn single_angle(spec: &str) -> Result<f64> {
    parse_angle(spec).map_err(invalid)
}

fn order_for(code: &BinaryLinearCode, spec: &Option<String>) -> Result<Vec<usize>> {
    let order = match spec {
        Some(s) => parse_positions(s).map_err(invalid)?,
        None => default_order(code),
    };
    validate_order(code, &order)?;
    Ok(order)
}

fn write_json(out: &mut dyn Write, value: &serde_json::Value) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(value).map_err(|e| BpqmError::Io(e.to_string()))?)?;
    Ok(())
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Compile(a) => compile(a, out),
        Command::Decode(a) => decode(a, out),
        Command::Oracle(a) => oracle(a, out),
        Command::Experiment(a) => experiment(a, out),
    }
}

fn compile(a: CompileArgs, out: &mut dyn Write) -> Result<()> {
    let code = load_code(&a.code.code)?;
    let thetas = channel_angles(&code, &a.theta)?;
    let mpg = build_mpg(&code, a.bit)?;
    let compiled = compile_lists(&mpg, &thetas)?;
    write!(out, "{}", mpg.render(Some(&thetas)))?;
    let list = compiled.root_check_list();
    writeln!(out, "# root check list: {list:?}")?;
    writeln!(out, "s,angle,prob")?;
    for e in compiled.root_branches() {
        let s: String = (0..list.len()).map(|t| if (e.s >> t) & 1 == 1 { '1' } else { '0' }).collect();
        writeln!(out, "{s},{:.15},{:.15}", e.angle, e.prob)?;
    }
    Ok(())
}

enum DecodeTarget {
    Bit(usize),
    Block,
}

fn decode(a: DecodeArgs, out: &mut dyn Write) -> Result<()> {
    let code = load_code(&a.code.code)?;
    let thetas = channel_angles(&code, &a.theta)?;
    let target = if a.target == "block" {
        DecodeTarget::Block
    } else {
        let r: usize =
            a.target.parse().map_err(|_| invalid(format!("target '{}' is neither 'block' nor a bit", a.target)))?;
        if r == 0 || r > code.n() {
            return Err(BpqmError::BitOutOfRange { index: r, n: code.n() });
        }
        DecodeTarget::Bit(r)
    };
    let target_json = match target {
        DecodeTarget::Bit(r) => json!(r),
        DecodeTarget::Block => json!("block"),
    };
    let theta_json = if thetas.iter().all(|&t| t == thetas[0]) { json!(thetas[0]) } else { json!(thetas) };
    let mut record = json!({
        "code": a.code.code,
        "r": target_json,
        "theta": theta_json,
        "mode": format!("{:?}", a.mode).to_lowercase(),
    });
    let success = match (a.mode, &target) {
        (Mode::Exact, DecodeTarget::Bit(r)) => crate::qsim::bpqm_bit_success(&code, &thetas, *r)?,
        (Mode::Exact, DecodeTarget::Block) => bpqm_block_success_average(&code, &thetas, &order_for(&code, &a.order)?)?,
        (Mode::Mp, DecodeTarget::Bit(r)) => {
            let x = match &a.x {
                Some(s) => parse_bits(s).map_err(invalid)?,
                None => vec![0; code.n()],
            };
            if x.len() != code.n() || !code.is_codeword(pack(&x)) {
                return Err(invalid("--x must be a codeword of the code".into()));
            }
            let grid = match a.b {
                Some(b) => QuantGrid::new(b)?,
                None => QuantGrid::exact(),
            };
            record["B"] = json!(a.b);
            record["x"] = json!(x.iter().map(|b| char::from(b'0' + b)).collect::<String>());
            mp_bit_success(&code, &thetas, &x, *r, &grid)?
        }
        (Mode::Mp, DecodeTarget::Block) => {
            return Err(invalid("message-passing mode decodes single bits only".into()));
        }
        (Mode::Sample, _) => {
            record["shots"] = json!(a.sample);
            record["seed"] = json!(a.seed);
            sample(&code, &thetas, &target, &a)?
        }
    };
    record["success"] = json!(success);
    write_json(out, &record)
}

fn pack(x: &[u8]) -> u64 {
    x.iter().enumerate().fold(0, |acc, (i, &b)| acc | (u64::from(b & 1) << i))
}

/// Draw codewords uniformly, then draw the decoder's verdict from its exact
/// conditional success probability.
fn sample(code: &BinaryLinearCode, thetas: &[f64], target: &DecodeTarget, a: &DecodeArgs) -> Result<f64> {
    if a.sample == 0 {
        return Err(invalid("--sample must be positive".into()));
    }
    let words = code.codewords()?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut cache: HashMap<usize, f64> = HashMap::new();
    let circuit = match target {
        DecodeTarget::Bit(r) => Some(BitCircuit::new(code, thetas, *r)?),
        DecodeTarget::Block => None,
    };
    let order = match target {
        DecodeTarget::Block => order_for(code, &a.order)?,
        DecodeTarget::Bit(_) => Vec::new(),
    };
    let mut hits = 0usize;
    for _ in 0..a.sample {
        let i = rng.gen_range(0..words.len());
        let p = match cache.get(&i) {
            Some(&p) => p,
            None => {
                let x = &words[i];
                let p = match (target, &circuit) {
                    (DecodeTarget::Bit(r), Some(bc)) => bc.success_on(&channel_state(x, thetas)?, x[r - 1])?,
                    _ => bpqm_block_success(code, thetas, x, &order)?,
                };
                cache.insert(i, p);
                p
            }
        };
        if rng.gen::<f64>() < p {
            hits += 1;
        }
    }
    Ok(hits as f64 / a.sample as f64)
}

fn oracle(a: OracleArgs, out: &mut dyn Write) -> Result<()> {
    let code = load_code(&a.code.code)?;
    let thetas = channel_angles(&code, &a.theta)?;
    let mut record = json!({ "code": a.code.code, "kind": format!("{:?}", a.kind).to_lowercase() });
    match a.kind {
        OracleKind::Helstrom => {
            let v = helstrom_bit_report(&code, &thetas, a.bit)?;
            record["r"] = json!(a.bit);
            record["success"] = json!(v.success);
            record["condition_number"] = json!(v.condition_number);
        }
        OracleKind::Pgm => {
            let v = pgm_block_report(&code, &thetas)?;
            record["r"] = json!("block");
            record["success"] = json!(v.success);
            record["condition_number"] = json!(v.condition_number);
        }
        OracleKind::ClassicalBit => {
            record["r"] = json!(a.bit);
            record["success"] = json!(classical_map_success(&code, &thetas, Target::Bit(a.bit))?);
        }
        OracleKind::ClassicalBlock => {
            record["r"] = json!("block");
            record["success"] = json!(classical_map_success(&code, &thetas, Target::Block)?);
        }
        OracleKind::Capacity => {
            let per: Vec<serde_json::Value> = thetas
                .iter()
                .map(|&t| {
                    let (holevo, measured) = capacities(t);
                    json!({ "theta": t, "bsc_p": classical_bsc_param(t), "holevo": holevo, "measured": measured })
                })
                .collect();
            record["channels"] = json!(per);
        }
    }
    if a.kind != OracleKind::Capacity {
        record["theta"] = if thetas.iter().all(|&t| t == thetas[0]) { json!(thetas[0]) } else { json!(thetas) };
    }
    write_json(out, &record)
}

fn write_csv<R: Serialize>(
    rows: &[R],
    config: &ExperimentConfig,
    path: &Option<PathBuf>,
    out: &mut dyn Write,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| BpqmError::Io(e.to_string()))?;
    }
    let mut bytes = w.into_inner().map_err(|e| BpqmError::Io(e.to_string()))?;
    writeln!(bytes, "# bpqm-lab {} {}", env!("CARGO_PKG_VERSION"), config.hash())?;
    match path {
        Some(p) => std::fs::write(p, bytes)?,
        None => out.write_all(&bytes)?,
    }
    Ok(())
}

fn experiment(a: ExperimentArgs, out: &mut dyn Write) -> Result<()> {
    let default_code = if a.id == Experiment::Fig12 { "builtin:code17" } else { "builtin:code8" };
    let code_src = a.code.clone().unwrap_or_else(|| default_code.to_string());
    let code = load_code(&code_src)?;
    let grid = |spec: &Option<String>, default: Vec<f64>| -> Result<Vec<f64>> {
        match spec {
            Some(s) => parse_angle_list(s).map_err(invalid),
            None => Ok(default),
        }
    };
    let mut config = ExperimentConfig {
        experiment: format!("{:?}", a.id).to_lowercase(),
        code: code_src,
        thetas: Vec::new(),
        theta_primes: Vec::new(),
        bits: Vec::new(),
        depths: Vec::new(),
        order: Vec::new(),
    };
    let fixed_theta = || -> Result<f64> {
        match &a.theta {
            Some(s) => single_angle(s),
            None => Ok(0.2 * std::f64::consts::PI),
        }
    };
    match a.id {
        Experiment::Fig12 => {
            let theta = fixed_theta()?;
            config.thetas = vec![theta];
            config.bits = parse_int_list(&a.b).map_err(invalid)?;
            let rows = experiments::fig12(&code, theta, &config.bits)?;
            write_csv(&rows, &config, &a.out, out)
        }
        Experiment::Fig16 => {
            config.thetas = grid(&a.theta, experiments::default_theta_grid())?;
            config.depths = parse_int_list(&a.depths).map_err(invalid)?.into_iter().map(|h| h as usize).collect();
            config.order = order_for(&code, &a.order)?;
            if code.n() < 5 {
                return Err(invalid("fig16 reports bits 1 and 5 and needs n ≥ 5".into()));
            }
            let rows = experiments::fig16(&code, &config.thetas, &config.depths, &config.order)?;
            write_csv(&rows, &config, &a.out, out)
        }
        Experiment::Fig17 => {
            let theta = fixed_theta()?;
            config.thetas = vec![theta];
            config.theta_primes = grid(&a.theta_prime, experiments::default_theta_prime_grid())?;
            let rows = experiments::fig17(&code, theta, &config.theta_primes)?;
            write_csv(&rows, &config, &a.out, out)
        }
        Experiment::Fig19 => {
            if code.n() != 8 {
                return Err(invalid("fig19 uses the spanning trees of the (8,4) code".into()));
            }
            config.thetas = grid(&a.theta, experiments::default_theta_grid())?;
            let rows = experiments::fig19(&code, &config.thetas)?;
            write_csv(&rows, &config, &a.out, out)
        }
    }
}
