//! Wall-clock measurements of encode and decode.
//!
//! Numbers from here are indicative only; they run single-threaded on
//! whatever machine calls them.

use std::hint::black_box;
use std::time::{Duration, Instant};

use crate::error::Result;
use crate::field::FieldPrime;
use crate::radix::RadixParams;
use crate::rng::SeededGenerator;
use crate::tokenizer::TokenizerConfig;

/// Digit counts probed by [`digit_scaling`].
pub const SCALING_DIGITS: [usize; 4] = [2, 4, 8, 16];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Throughput {
    pub ops: u64,
    pub elapsed: Duration,
}

impl Throughput {
    pub fn ops_per_sec(&self) -> f64 {
        self.ops as f64 / self.elapsed.as_secs_f64().max(1e-12)
    }

    pub fn nanos_per_op(&self) -> f64 {
        self.elapsed.as_nanos() as f64 / self.ops.max(1) as f64
    }
}

/// `count` ids drawn uniformly from `[0, vocab_size)`.
pub fn sample_ids(cfg: &TokenizerConfig, count: usize, seed: u64) -> Vec<u64> {
    let mut rng = SeededGenerator::new(seed);
    (0..count).map(|_| rng.below(cfg.vocab_size())).collect()
}

pub fn time_encode(cfg: &TokenizerConfig, ids: &[u64]) -> Result<Throughput> {
    let mut buf = vec![0u32; cfg.digits()];
    let start = Instant::now();
    for &id in ids {
        cfg.encode_into(black_box(id), &mut buf)?;
        black_box(&buf);
    }
    Ok(Throughput {
        ops: ids.len() as u64,
        elapsed: start.elapsed(),
    })
}

/// Times decode over the tokens of `ids`; encoding happens before the clock starts.
pub fn time_decode(cfg: &TokenizerConfig, ids: &[u64]) -> Result<Throughput> {
    let n = cfg.digits();
    let mut flat = vec![0u32; ids.len() * n];
    cfg.encode_batch_into(ids, &mut flat)?;
    let start = Instant::now();
    for chunk in flat.chunks_exact(n) {
        black_box(cfg.decode_digits(black_box(chunk))?);
    }
    Ok(Throughput {
        ops: ids.len() as u64,
        elapsed: start.elapsed(),
    })
}

/// Median nanoseconds per encode over `rounds` timed passes of `ids`.
pub fn median_encode_nanos(cfg: &TokenizerConfig, ids: &[u64], rounds: usize) -> Result<f64> {
    let mut samples = (0..rounds.max(1))
        .map(|_| time_encode(cfg, ids).map(|t| t.nanos_per_op()))
        .collect::<Result<Vec<_>>>()?;
    samples.sort_by(f64::total_cmp);
    Ok(samples[samples.len() / 2])
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingRow {
    pub p: u64,
    pub n: usize,
    /// `None` when `p^n` overflows 128 bits.
    pub timing: Option<(Throughput, Throughput)>,
}

/// Encode/decode timing at fixed `p` for each n in [`SCALING_DIGITS`].
pub fn digit_scaling(p: FieldPrime, iterations: usize, seed: u64) -> Result<Vec<ScalingRow>> {
    SCALING_DIGITS
        .iter()
        .map(|&n| {
            let Ok(params) = RadixParams::new(p, n) else {
                return Ok(ScalingRow {
                    p: p.get(),
                    n,
                    timing: None,
                });
            };
            let vocab = u64::try_from(params.capacity() - 1).unwrap_or(u64::MAX);
            let cfg = TokenizerConfig::from_params(params, vocab, seed)?;
            let ids = sample_ids(&cfg, iterations, seed ^ n as u64);
            let enc = time_encode(&cfg, &ids)?;
            let dec = time_decode(&cfg, &ids)?;
            Ok(ScalingRow {
                p: p.get(),
                n,
                timing: Some((enc, dec)),
            })
        })
        .collect()
}
