//! Command-line harness for building, querying and measuring ribbon filters.

mod format;

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use ribbon::hash::mix64;
use ribbon::{
    build_balanced, build_homogeneous, build_standard, config_for_count, config_from_space,
    homogeneous_small_n_warning, BandingStorage, BuildReport, Equation, KeyHash, RibbonConfig,
    RibbonWord, SplitMix64, Variant,
};
use serde_json::json;

use format::{decode, hash_key_bytes, AnyFilter, Kind};

#[derive(Parser)]
#[command(name = "ribbon", version, about = "Build, query and measure ribbon filters")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a filter from newline-delimited keys and write it to a file.
    Build(BuildArgs),
    /// Query a stored filter with newline-delimited keys; prints true/false per key.
    Query(QueryArgs),
    /// Measure a stored filter's false-positive rate on random non-member hashes.
    Fpr(FprArgs),
    /// Measure the per-attempt construction failure rate of a standard configuration.
    FailureRate(FailureRateArgs),
    /// Stream random equations into a fresh system until one fails; report occupancy overhead.
    AddTillFailure(AddTillFailureArgs),
    /// Report bits per key and space overhead relative to the entropy bound.
    Overhead(OverheadArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum VariantArg {
    Standard,
    Homogeneous,
    Balanced,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Standard => Variant::Standard,
            VariantArg::Homogeneous => Variant::Homogeneous,
            VariantArg::Balanced => Variant::Balanced,
        }
    }
}

#[derive(clap::Args)]
struct BuildArgs {
    /// Newline-delimited key file (keys are raw bytes; duplicates allowed).
    #[arg(long)]
    input: PathBuf,
    /// Output filter file.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = VariantArg::Standard)]
    variant: VariantArg,
    /// Ribbon width (16, 32, 64 or 128).
    #[arg(long, default_value_t = 64)]
    w: u32,
    /// Solution bits per row; fractional values like 7.7 split the blocks.
    #[arg(long)]
    r: Option<f64>,
    /// Total space budget in bits (alternative to --r).
    #[arg(long)]
    space_bits: Option<u64>,
    /// Configured overhead (m - n)/n; defaults to a per-variant rule.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Smash value; defaults to w/2 for small standard ribbons.
    #[arg(long)]
    smash: Option<u32>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Construction attempts before giving up (standard and balanced).
    #[arg(long, default_value_t = 8)]
    max_retries: u32,
}

#[derive(clap::Args)]
struct QueryArgs {
    #[arg(long)]
    filter: PathBuf,
    /// Newline-delimited query key file.
    #[arg(long)]
    keys: PathBuf,
}

#[derive(clap::Args)]
struct FprArgs {
    #[arg(long)]
    filter: PathBuf,
    /// Number of random non-member probes (at least 100000).
    #[arg(long, default_value_t = 1_000_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(clap::Args)]
struct FailureRateArgs {
    #[arg(long, default_value_t = 64)]
    w: u32,
    /// Row count; must be a multiple of the width.
    #[arg(long)]
    m: usize,
    /// Configured overhead; the key count is m / (1 + epsilon).
    #[arg(long)]
    epsilon: f64,
    #[arg(long, default_value_t = 0)]
    smash: u32,
    /// Fingerprint bits used by the trial builds.
    #[arg(long, default_value_t = 7)]
    r: u32,
    /// Number of fresh-seed construction attempts (at least 200).
    #[arg(long, default_value_t = 400)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(clap::Args)]
struct AddTillFailureArgs {
    #[arg(long, default_value_t = 64)]
    w: u32,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    smash: u32,
    #[arg(long, default_value_t = 201)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(clap::Args)]
struct OverheadArgs {
    #[arg(long)]
    filter: PathBuf,
    #[arg(long, default_value_t = 1_000_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Build(args) => cmd_build(&args),
        Command::Query(args) => cmd_query(&args),
        Command::Fpr(args) => cmd_fpr(&args),
        Command::FailureRate(args) => cmd_failure_rate(&args),
        Command::AddTillFailure(args) => cmd_add_till_failure(&args),
        Command::Overhead(args) => cmd_overhead(&args),
    }
}

fn read_keys(path: &Path) -> Result<Vec<Vec<u8>>> {
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut reader = BufReader::new(file);
    let mut keys = Vec::new();
    let mut buf = Vec::new();
    loop {
        buf.clear();
        let read = reader
            .read_until(b'\n', &mut buf)
            .with_context(|| format!("reading {}", path.display()))?;
        if read == 0 {
            break;
        }
        if buf.last() == Some(&b'\n') {
            buf.pop();
            if buf.last() == Some(&b'\r') {
                buf.pop();
            }
        }
        keys.push(buf.clone());
    }
    Ok(keys)
}

fn load_filter(path: &Path) -> Result<AnyFilter> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    decode(&bytes).with_context(|| format!("decoding {}", path.display()))
}

fn cmd_build(args: &BuildArgs) -> Result<()> {
    let raw = read_keys(&args.input)?;
    let hashes: Vec<KeyHash> = raw.iter().map(|k| hash_key_bytes(k)).collect();
    let variant: Variant = args.variant.into();
    if variant == Variant::Homogeneous {
        if let Some(warning) = homogeneous_small_n_warning(hashes.len()) {
            eprintln!("warning: {warning}");
        }
    }
    let (filter, report) = match args.w {
        16 => build_width::<u16>(args, &hashes, variant).map(|(k, r)| (AnyFilter::W16(k), r))?,
        32 => build_width::<u32>(args, &hashes, variant).map(|(k, r)| (AnyFilter::W32(k), r))?,
        64 => build_width::<u64>(args, &hashes, variant).map(|(k, r)| (AnyFilter::W64(k), r))?,
        128 => build_width::<u128>(args, &hashes, variant).map(|(k, r)| (AnyFilter::W128(k), r))?,
        w => bail!("unsupported ribbon width {w}; choose 16, 32, 64 or 128"),
    };
    fs::write(&args.out, filter.encode())
        .with_context(|| format!("writing {}", args.out.display()))?;
    println!(
        "{}",
        json!({
            "seed_used": report.seed_used,
            "attempts": report.attempts,
            "epsilon_configured": report.epsilon_configured,
            "bits_per_key": report.bits_per_key,
            "redundant_count": report.redundant_count,
        })
    );
    Ok(())
}

fn build_width<W: RibbonWord>(
    args: &BuildArgs,
    hashes: &[KeyHash],
    variant: Variant,
) -> Result<(Kind<W>, BuildReport)> {
    let cfg = match (args.r, args.space_bits) {
        (Some(_), Some(_)) => bail!("--r and --space-bits are mutually exclusive"),
        (None, None) => bail!("specify either --r or --space-bits"),
        (Some(r), None) => {
            config_for_count(hashes.len(), r, args.w, args.epsilon, args.smash, variant, args.seed)?
        }
        (None, Some(bits)) => {
            let mut cfg = config_from_space(hashes.len(), bits, args.w, variant, args.seed)?;
            if let Some(smash) = args.smash {
                cfg.smash = smash;
                cfg.validate()?;
            }
            cfg
        }
    };
    match variant {
        Variant::Standard => {
            let (f, report) = build_standard::<W>(hashes, &cfg, args.max_retries)?;
            Ok((Kind::Plain(f), report))
        }
        Variant::Homogeneous => {
            let (f, report) = build_homogeneous::<W>(hashes, &cfg)?;
            Ok((Kind::Plain(f), report))
        }
        Variant::Balanced => {
            // Balanced construction is single-attempt; retry under follow-up
            // seeds like the standard builder does internally.
            let attempts = args.max_retries.max(1);
            let mut last_err = None;
            for attempt in 0..attempts {
                let cfg_attempt = RibbonConfig {
                    seed: cfg.seed.wrapping_add(attempt as u64),
                    ..cfg
                };
                match build_balanced::<W>(hashes, &cfg_attempt) {
                    Ok((f, mut report)) => {
                        report.attempts = attempt + 1;
                        return Ok((Kind::Balanced(f), report));
                    }
                    Err(e) => last_err = Some(e),
                }
            }
            Err(last_err.unwrap().into())
        }
    }
}

fn cmd_query(args: &QueryArgs) -> Result<()> {
    let filter = load_filter(&args.filter)?;
    let keys = read_keys(&args.keys)?;
    let stdout = std::io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    for key in &keys {
        writeln!(out, "{}", filter.contains(hash_key_bytes(key)))?;
    }
    out.flush()?;
    Ok(())
}

/// Count positives among `trials` random hashes, deterministically chunked
/// for parallel measurement.
fn count_false_positives(filter: &AnyFilter, trials: u64, seed: u64) -> u64 {
    const CHUNK: u64 = 1 << 16;
    let chunks = trials.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = SplitMix64::new(mix64(seed ^ c.wrapping_mul(0x9E37_79B9_7F4A_7C15)));
            let count = CHUNK.min(trials - c * CHUNK);
            (0..count).filter(|_| filter.contains(rng.next_hash())).count() as u64
        })
        .sum()
}

fn wald_ci95(p: f64, n: u64) -> f64 {
    1.96 * (p * (1.0 - p) / n as f64).sqrt()
}

fn cmd_fpr(args: &FprArgs) -> Result<()> {
    if args.trials < 100_000 {
        bail!("--trials must be at least 100000 for a meaningful rate");
    }
    let filter = load_filter(&args.filter)?;
    let hits = count_false_positives(&filter, args.trials, args.seed);
    let rate = hits as f64 / args.trials as f64;
    println!(
        "{}",
        json!({
            "fp_rate": rate,
            "ci95": wald_ci95(rate, args.trials),
            "trials": args.trials,
        })
    );
    Ok(())
}

fn cmd_failure_rate(args: &FailureRateArgs) -> Result<()> {
    if args.trials < 200 {
        bail!("--trials must be at least 200");
    }
    if args.epsilon < 0.0 {
        bail!("--epsilon must be non-negative");
    }
    let n = (args.m as f64 / (1.0 + args.epsilon)).round() as usize;
    let failures: u64 = match args.w {
        16 => failure_trials::<u16>(args, n)?,
        32 => failure_trials::<u32>(args, n)?,
        64 => failure_trials::<u64>(args, n)?,
        128 => failure_trials::<u128>(args, n)?,
        w => bail!("unsupported ribbon width {w}"),
    };
    let rate = failures as f64 / args.trials as f64;
    println!(
        "{}",
        json!({
            "failure_rate": rate,
            "ci95": wald_ci95(rate, args.trials),
            "trials": args.trials,
            "n": n,
        })
    );
    Ok(())
}

fn failure_trials<W: RibbonWord>(args: &FailureRateArgs, n: usize) -> Result<u64> {
    // Validate the geometry once before spawning the trials.
    let cfg = RibbonConfig {
        m: args.m,
        w: args.w,
        r_lower: args.r,
        upper_start_block: args.m / args.w as usize,
        smash: args.smash,
        seed: 0,
        variant: Variant::Standard,
    };
    cfg.validate()?;
    Ok((0..args.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng =
                SplitMix64::new(mix64(args.seed ^ t.wrapping_mul(0xA076_1D64_78BD_642F)));
            let keys: Vec<KeyHash> = (0..n).map(|_| rng.next_hash()).collect();
            let trial_cfg = RibbonConfig { seed: rng.next_u64(), ..cfg };
            build_standard::<W>(&keys, &trial_cfg, 1).is_err() as u64
        })
        .sum())
}

fn cmd_add_till_failure(args: &AddTillFailureArgs) -> Result<()> {
    if args.trials == 0 {
        bail!("--trials must be positive");
    }
    let mut samples: Vec<f64> = match args.w {
        16 => add_till_failure_trials::<u16>(args)?,
        32 => add_till_failure_trials::<u32>(args)?,
        64 => add_till_failure_trials::<u64>(args)?,
        128 => add_till_failure_trials::<u128>(args)?,
        w => bail!("unsupported ribbon width {w}"),
    };
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let at = |q: f64| samples[(q * (samples.len() - 1) as f64).round() as usize];
    println!(
        "{}",
        json!({
            "median_epsilon": at(0.5),
            "q1_epsilon": at(0.25),
            "q3_epsilon": at(0.75),
            "trials": args.trials,
        })
    );
    Ok(())
}

fn add_till_failure_trials<W: RibbonWord>(args: &AddTillFailureArgs) -> Result<Vec<f64>> {
    BandingStorage::<W>::new(args.m, args.w, 64)?;
    if args.smash > args.w / 2 {
        bail!("--smash must not exceed w/2");
    }
    let num_starts = args.m - args.w as usize + 1;
    Ok((0..args.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng =
                SplitMix64::new(mix64(args.seed ^ t.wrapping_mul(0xE703_7ED1_A0B4_28DB)));
            let mut banding = BandingStorage::<W>::new(args.m, args.w, 64).unwrap();
            let mut successes = 0u64;
            loop {
                let h = rng.next_hash();
                let eq = Equation {
                    start: ribbon::start_in_range(h, num_starts, args.smash),
                    coeff: ribbon::coefficient_vector::<W>(h, args.w),
                    rhs: ribbon::fingerprint(h, 64),
                };
                if !banding.insert(&eq).is_success() {
                    break;
                }
                successes += 1;
            }
            (args.m as u64 - successes) as f64 / successes as f64
        })
        .collect())
}

fn cmd_overhead(args: &OverheadArgs) -> Result<()> {
    if args.trials < 100_000 {
        bail!("--trials must be at least 100000 for a meaningful rate");
    }
    let filter = load_filter(&args.filter)?;
    if filter.key_count() == 0 {
        bail!("overhead is undefined for an empty filter");
    }
    let hits = count_false_positives(&filter, args.trials, args.seed);
    let rate = hits as f64 / args.trials as f64;
    if hits == 0 {
        bail!("no false positives in {} trials; increase --trials", args.trials);
    }
    let bits_per_key = filter.total_bits() as f64 / filter.key_count() as f64;
    println!(
        "{}",
        json!({
            "bits_per_key": bits_per_key,
            "fp_rate": rate,
            "overhead_vs_entropy": bits_per_key / (1.0 / rate).log2() - 1.0,
        })
    );
    Ok(())
}
