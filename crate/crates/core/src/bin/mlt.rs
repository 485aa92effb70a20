use std::collections::HashMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};

use mlt::bench;
use mlt::pipeline::build_vocab_from_csv;
use mlt::{
    decode_file, encode_file, fit, is_prime, load_config, load_vocab, save_config, save_vocab,
    ColumnSpec, Error, ErrorKind, SeededGenerator, Strategy, TokenizerConfig,
};

/// Exhaustive verification refuses token spaces larger than this.
const EXHAUSTIVE_LIMIT: u128 = 100_000_000;

#[derive(Parser)]
#[command(
    name = "mlt",
    version,
    about = "Reversible modular linear tokenization of integer ids"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Choose (p, n) for a vocabulary size and write a tokenizer config
    Fit(FitArgs),
    /// Build a vocabulary file from one column of a CSV file
    BuildVocab(BuildVocabArgs),
    /// Replace categorical columns with their token digits
    Encode(FileArgs),
    /// Restore categorical columns from token digits
    Decode(FileArgs),
    /// Check that decode(encode(id)) = id with no collisions
    Verify(VerifyArgs),
    /// Measure encode/decode throughput
    Bench(BenchArgs),
}

#[derive(Args)]
#[command(group(ArgGroup::new("vocab").required(true)))]
#[command(group(ArgGroup::new("strategy").required(true)))]
struct FitArgs {
    #[arg(long, group = "vocab")]
    vocab_size: Option<u64>,
    /// Vocabulary file; its line count is the vocabulary size
    #[arg(long, group = "vocab")]
    vocab_file: Option<PathBuf>,
    #[arg(long, group = "strategy")]
    fix_p: Option<u64>,
    #[arg(long, group = "strategy")]
    fix_n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BuildVocabArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    column: String,
    #[arg(long)]
    out: PathBuf,
}

/// `--column`, `--config` and `--vocab` may repeat; the k-th of each go together.
#[derive(Args)]
struct FileArgs {
    #[arg(long, required = true)]
    config: Vec<PathBuf>,
    #[arg(long, required = true)]
    input: PathBuf,
    #[arg(long, required = true)]
    output: PathBuf,
    #[arg(long, required = true)]
    column: Vec<String>,
    #[arg(long, required = true)]
    vocab: Vec<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, conflicts_with = "samples")]
    exhaustive: bool,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value_t = 100_000)]
    iterations: u64,
}

enum Failure {
    Usage(String),
    Operational(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e.kind() {
            ErrorKind::InvalidArgument | ErrorKind::NotPrime => Failure::Usage(e.to_string()),
            _ => Failure::Operational(e.to_string()),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fit(a) => cmd_fit(a),
        Command::BuildVocab(a) => cmd_build_vocab(a),
        Command::Encode(a) => cmd_file(a, true),
        Command::Decode(a) => cmd_file(a, false),
        Command::Verify(a) => cmd_verify(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Operational(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn cmd_fit(a: FitArgs) -> CmdResult {
    let strategy = match (a.fix_p, a.fix_n) {
        (Some(p), None) => {
            if !is_prime(p) {
                return Err(Failure::Usage(format!("{p} is not prime")));
            }
            Strategy::FixP(p)
        }
        (None, Some(n)) => Strategy::FixN(n),
        _ => unreachable!("clap enforces exactly one strategy"),
    };
    let vocab_size = match (a.vocab_size, &a.vocab_file) {
        (Some(v), None) => v,
        (None, Some(path)) => load_vocab(path)?.size(),
        _ => unreachable!("clap enforces exactly one vocabulary source"),
    };
    if vocab_size == 0 {
        return Err(Failure::Usage("vocabulary size must be at least 1".into()));
    }
    let cfg = fit(vocab_size, strategy, a.seed)?;
    save_config(&cfg, &a.out)?;
    println!(
        "p={} n={} capacity={} vocab_size={} load_factor={:.6} seed={} out={}",
        cfg.prime(),
        cfg.digits(),
        cfg.capacity(),
        cfg.vocab_size(),
        cfg.load_factor(),
        cfg.seed(),
        a.out.display()
    );
    Ok(())
}

fn cmd_build_vocab(a: BuildVocabArgs) -> CmdResult {
    let vocab = build_vocab_from_csv(&a.input, &a.column)?;
    save_vocab(&vocab, &a.out)?;
    println!(
        "column={} size={} out={}",
        a.column,
        vocab.size(),
        a.out.display()
    );
    Ok(())
}

fn cmd_file(a: FileArgs, encode: bool) -> CmdResult {
    if a.column.len() != a.config.len() || a.column.len() != a.vocab.len() {
        return Err(Failure::Usage(format!(
            "got {} --column, {} --config and {} --vocab; counts must match",
            a.column.len(),
            a.config.len(),
            a.vocab.len()
        )));
    }
    let specs: Vec<ColumnSpec> = a
        .column
        .iter()
        .zip(&a.config)
        .zip(&a.vocab)
        .map(|((c, cfg), v)| ColumnSpec::new(c.clone(), cfg.clone(), v.clone()))
        .collect();
    let summary = if encode {
        encode_file(&a.input, &specs, &a.output)
    } else {
        decode_file(&a.input, &specs, &a.output)
    }
    .map_err(|e| Failure::Operational(e.to_string()))?;
    println!("{summary}");
    Ok(())
}

fn cmd_verify(a: VerifyArgs) -> CmdResult {
    let cfg = load_config(&a.config)?;
    let outcome = match (a.exhaustive, a.samples) {
        (true, _) => {
            if cfg.capacity() > EXHAUSTIVE_LIMIT {
                return Err(Failure::Usage(format!(
                    "refusing exhaustive verification over {} ids (limit {EXHAUSTIVE_LIMIT}); use --samples",
                    cfg.capacity()
                )));
            }
            verify_exhaustive(&cfg)?
        }
        (false, Some(0)) => return Err(Failure::Usage("--samples must be positive".into())),
        (false, Some(k)) => verify_sampled(&cfg, k, a.seed)?,
        (false, None) => {
            return Err(Failure::Usage("pass --exhaustive or --samples K".into()));
        }
    };
    match outcome {
        Ok(count) => {
            println!("VERIFIED bijective over {count} ids");
            Ok(())
        }
        Err(counterexample) => {
            println!("FAILED {counterexample}");
            Err(Failure::Operational("bijectivity check failed".into()))
        }
    }
}

/// Outer error aborts the command; inner error is a counterexample.
type Verdict = Result<u64, String>;

fn verify_exhaustive(cfg: &TokenizerConfig) -> Result<Verdict, Failure> {
    let cap = cfg.capacity() as u64;
    // token vectors indexed by their base-p value; p^n <= limit keeps this small
    let mut seen = vec![u64::MAX; cap as usize];
    let mut buf = vec![0u32; cfg.digits()];
    for id in 0..cap {
        cfg.encode_into(id, &mut buf)?;
        let back = cfg.decode_digits(&buf)?;
        if back != id {
            return Ok(Err(format!("id {id} decoded to {back}")));
        }
        let slot = token_index(cfg, &buf);
        if seen[slot] != u64::MAX {
            return Ok(Err(format!(
                "ids {} and {id} collide on token {buf:?}",
                seen[slot]
            )));
        }
        seen[slot] = id;
    }
    Ok(Ok(cap))
}

fn token_index(cfg: &TokenizerConfig, digits: &[u32]) -> usize {
    let p = cfg.prime().get() as usize;
    digits
        .iter()
        .rev()
        .fold(0usize, |acc, &d| acc * p + d as usize)
}

fn verify_sampled(cfg: &TokenizerConfig, samples: u64, seed: u64) -> Result<Verdict, Failure> {
    let mut rng = SeededGenerator::new(seed);
    let bound = u64::try_from(cfg.capacity()).ok();
    let mut seen: HashMap<Vec<u32>, u64> = HashMap::new();
    for _ in 0..samples {
        let id = match bound {
            Some(b) => rng.below(b),
            None => rng.next_u64(),
        };
        let t = cfg.encode(id)?;
        let back = cfg.decode(&t)?;
        if back != id {
            return Ok(Err(format!("id {id} decoded to {back}")));
        }
        if let Some(&other) = seen.get(t.digits()) {
            if other != id {
                return Ok(Err(format!(
                    "ids {other} and {id} collide on token {:?}",
                    t.digits()
                )));
            }
        }
        seen.insert(t.into_digits(), id);
    }
    Ok(Ok(samples))
}

fn cmd_bench(a: BenchArgs) -> CmdResult {
    if a.iterations == 0 {
        return Err(Failure::Usage("--iterations must be positive".into()));
    }
    let iterations = usize::try_from(a.iterations)
        .map_err(|_| Failure::Usage("--iterations too large".into()))?;
    let cfg = load_config(&a.config)?;
    let ids = bench::sample_ids(&cfg, iterations, cfg.seed());

    // one untimed pass to warm caches
    bench::time_encode(&cfg, &ids)?;
    let enc = bench::time_encode(&cfg, &ids)?;
    let dec = bench::time_decode(&cfg, &ids)?;
    println!(
        "config p={} n={} vocab_size={} iterations={iterations}",
        cfg.prime(),
        cfg.digits(),
        cfg.vocab_size()
    );
    println!(
        "encode ops_per_sec={:.0} ns_per_op={:.1}",
        enc.ops_per_sec(),
        enc.nanos_per_op()
    );
    println!(
        "decode ops_per_sec={:.0} ns_per_op={:.1}",
        dec.ops_per_sec(),
        dec.nanos_per_op()
    );

    let n = cfg.digits();
    let mut cardinality = Vec::new();
    for v in [1_000u64, 1_000_000_000] {
        match fit(v, Strategy::FixN(n), cfg.seed()) {
            Ok(c) => {
                let ids = bench::sample_ids(&c, iterations, 1);
                let ns = bench::median_encode_nanos(&c, &ids, 5)?;
                cardinality.push(format!("V={v}:p={}:{ns:.1}ns", c.prime()));
            }
            Err(_) => cardinality.push(format!("V={v}:unfit")),
        }
    }
    println!("cardinality n={n} {}", cardinality.join(" "));

    println!("scaling p={}", cfg.prime());
    for row in bench::digit_scaling(cfg.prime(), iterations, cfg.seed())? {
        match row.timing {
            Some((e, d)) => println!(
                "n={} encode_ns_per_op={:.1} decode_ns_per_op={:.1}",
                row.n,
                e.nanos_per_op(),
                d.nanos_per_op()
            ),
            None => println!("n={} skipped capacity_overflow", row.n),
        }
    }
    Ok(())
}
