//! Monte-Carlo block error rate campaigns over the AWGN channel.
//!
//! The all-zero point is transmitted. Every trial draws its noise from a
//! ChaCha stream keyed by `(seed, snr index, trial index)`, and trials are
//! aggregated in fixed batches with integer counters, so results do not
//! depend on the number of worker threads.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decoder::{DecoderConfig, MultistageDecoder};
use crate::error::{invalid, Error, Result};
use crate::lattice::ConstructionDLattice;

/// Trials per aggregation batch. Target-error campaigns only stop on batch
/// boundaries.
pub const BATCH: u64 = 1000;

/// Human-readable statement of the SNR convention, written to every output.
pub const SNR_DEFINITION: &str = "det^(2/n)/(2*pi*e*sigma^2)";

/// Noise standard deviation for a generalized SNR in dB:
/// `σ² = det(Λ)^{2/n} / (2πe · 10^{snr/10})`.
pub fn sigma_from_snr(lat: &ConstructionDLattice, snr_db: f64) -> f64 {
    sigma_for_volume(lat.normalized_volume(), snr_db)
}

/// As [`sigma_from_snr`], given `det(Λ)^{2/n}` directly.
pub fn sigma_for_volume(normalized_volume: f64, snr_db: f64) -> f64 {
    let snr = 10f64.powf(snr_db / 10.0);
    (normalized_volume / (2.0 * std::f64::consts::PI * std::f64::consts::E * snr)).sqrt()
}

/// `(2/n)·P_e`.
pub fn normalized_error(pe: f64, n: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&pe) {
        return Err(invalid(format!("P_e = {pe} is not a probability")));
    }
    if n == 0 {
        return Err(invalid("dimension must be >= 1"));
    }
    Ok(2.0 * pe / n as f64)
}

/// Campaign description, as stored in JSON config files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    /// Lattice JSON file; resolved by the caller.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<PathBuf>,
    pub snr_db: Vec<f64>,
    /// Trials per SNR point; the cap when `target_errors` is set.
    pub trials: u64,
    /// Stop a point once this many block errors have been seen.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_errors: Option<u64>,
    pub seed: u64,
    #[serde(default)]
    pub decoder: DecoderConfig,
    /// Worker threads; 0 uses every available core.
    #[serde(default)]
    pub workers: usize,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(invalid("trials must be >= 1"));
        }
        if self.snr_db.is_empty() {
            return Err(invalid("SNR grid is empty"));
        }
        if self.snr_db.iter().any(|s| s.is_nan()) {
            return Err(invalid("SNR values must be numbers"));
        }
        if self.target_errors == Some(0) {
            return Err(invalid("target_errors must be >= 1"));
        }
        self.decoder.validate()
    }
}

/// Statistics of one SNR point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimRecord {
    pub snr_db: f64,
    pub sigma2: f64,
    pub trials: u64,
    pub errors: u64,
    /// Trials where some level failed to converge (a subset of `errors`).
    pub nonconverged: u64,
    pub pe: f64,
    pub pe_star: f64,
    pub avg_iterations: f64,
    pub max_iterations: usize,
    pub iteration_cap: usize,
    /// Per-iteration bound times average iterations.
    pub nd_bound: f64,
    /// Average operations actually executed per trial.
    pub nd_measured: f64,
    pub max_ops_per_iteration: u64,
    pub ops_bound: f64,
    /// Excluded from CSV output.
    pub wall_clock_secs: f64,
}

impl SimRecord {
    /// Standard error of `pe`.
    pub fn std_error(&self) -> f64 {
        (self.pe * (1.0 - self.pe) / self.trials as f64).sqrt()
    }
}

#[derive(Clone, Copy, Default)]
struct Tally {
    trials: u64,
    errors: u64,
    nonconverged: u64,
    iterations: u64,
    max_iterations: usize,
    operations: u128,
    max_ops: u64,
}

impl Tally {
    fn merge(self, o: Tally) -> Tally {
        Tally {
            trials: self.trials + o.trials,
            errors: self.errors + o.errors,
            nonconverged: self.nonconverged + o.nonconverged,
            iterations: self.iterations + o.iterations,
            max_iterations: self.max_iterations.max(o.max_iterations),
            operations: self.operations + o.operations,
            max_ops: self.max_ops.max(o.max_ops),
        }
    }
}

/// Per-trial generator keyed by `(seed, point, trial)`.
pub fn trial_rng(seed: u64, point: usize, trial: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(point as u64).to_le_bytes());
    key[16..24].copy_from_slice(&trial.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Runs one record per SNR point.
pub fn run_campaign(lat: &ConstructionDLattice, config: &SimConfig) -> Result<Vec<SimRecord>> {
    config.validate()?;
    let decoder = MultistageDecoder::new(lat, config.decoder)?;
    let bound = decoder.per_iteration_bound();
    let bound_u = bound.to_u128();
    let ops_bound = bound.to_f64().unwrap_or(f64::INFINITY);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let n = lat.dimension();

    let mut records = Vec::with_capacity(config.snr_db.len());
    for (point, &snr_db) in config.snr_db.iter().enumerate() {
        let start = Instant::now();
        let sigma = sigma_from_snr(lat, snr_db);
        let noise = Normal::new(0.0, sigma).map_err(|e| invalid(format!("noise: {e}")))?;
        let trial = |t: u64| -> Tally {
            let mut rng = trial_rng(config.seed, point, t);
            let y: Vec<f64> = if sigma == 0.0 {
                vec![0.0; n]
            } else {
                (0..n).map(|_| noise.sample(&mut rng)).collect()
            };
            let out = decoder.decode(&y);
            let converged = out.all_converged();
            let iterations = out.total_iterations();
            Tally {
                trials: 1,
                errors: u64::from(!converged || !out.point.is_zero()),
                nonconverged: u64::from(!converged),
                iterations: iterations as u64,
                max_iterations: iterations,
                operations: out.operations as u128,
                max_ops: out.max_operations_per_iteration,
            }
        };

        let mut tally = Tally::default();
        while tally.trials < config.trials {
            let lo = tally.trials;
            let hi = (lo + BATCH).min(config.trials);
            let batch = pool.install(|| {
                (lo..hi)
                    .into_par_iter()
                    .map(trial)
                    .reduce(Tally::default, Tally::merge)
            });
            tally = tally.merge(batch);
            if config.target_errors.is_some_and(|t| tally.errors >= t) {
                break;
            }
        }

        if bound_u.is_some_and(|b| tally.max_ops as u128 > b) {
            return Err(Error::Invariant(format!(
                "measured {} operations in one iteration, above the bound {bound}",
                tally.max_ops
            )));
        }

        let trials = tally.trials as f64;
        let pe = tally.errors as f64 / trials;
        let avg_iterations = tally.iterations as f64 / trials;
        records.push(SimRecord {
            snr_db,
            sigma2: sigma * sigma,
            trials: tally.trials,
            errors: tally.errors,
            nonconverged: tally.nonconverged,
            pe,
            pe_star: normalized_error(pe, n)?,
            avg_iterations,
            max_iterations: tally.max_iterations,
            iteration_cap: config.decoder.max_iterations * lat.levels(),
            nd_bound: ops_bound * avg_iterations,
            nd_measured: tally.operations as f64 / trials,
            max_ops_per_iteration: tally.max_ops,
            ops_bound,
            wall_clock_secs: start.elapsed().as_secs_f64(),
        });
    }
    Ok(records)
}

pub const CSV_HEADER: &str = "snr_db,sigma2,trials,errors,nonconverged,pe,pe_star,avg_iterations,\
max_iterations,iteration_cap,nd_bound,nd_measured,max_ops_per_iteration,ops_bound,snr_definition,config_hash";

/// CSV text for a campaign. Floats use shortest round-trip formatting, so
/// parsing a cell gives back the exact value.
pub fn records_to_csv(records: &[SimRecord], config_hash: &str) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        writeln!(
            out,
            "{:?},{:?},{},{},{},{:?},{:?},{:?},{},{},{:?},{:?},{},{:?},{},{}",
            r.snr_db,
            r.sigma2,
            r.trials,
            r.errors,
            r.nonconverged,
            r.pe,
            r.pe_star,
            r.avg_iterations,
            r.max_iterations,
            r.iteration_cap,
            r.nd_bound,
            r.nd_measured,
            r.max_ops_per_iteration,
            r.ops_bound,
            SNR_DEFINITION,
            config_hash
        )
        .expect("writing to a String");
    }
    out
}

fn sci(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let s = format!("{x:.digits$e}");
    match s.split_once('e') {
        Some((m, e)) => format!("{m}x10^{e}"),
        None => s,
    }
}

/// Plain-text table laid out like the published result tables.
pub fn format_table(records: &[SimRecord], title: &str) -> String {
    let mut out = String::new();
    writeln!(out, "{title}").unwrap();
    writeln!(
        out,
        "{:>7} | {:>14} | {:>4} | {:>12} | {:>12} | {:>9} | {:>8}",
        "SNR_db", "N_D", "M_I", "P_e", "P_e*", "avg iter", "trials"
    )
    .unwrap();
    writeln!(out, "{}", "-".repeat(85)).unwrap();
    for r in records {
        writeln!(
            out,
            "{:>7} | {:>14} | {:>4} | {:>12} | {:>12} | {:>9.3} | {:>8}",
            r.snr_db,
            format!("<={}", sci(r.nd_bound, 2)),
            r.max_iterations,
            sci(r.pe, 3),
            sci(r.pe_star, 3),
            r.avg_iterations,
            r.trials
        )
        .unwrap();
    }
    out
}

/// One row of the published comparison tables.
#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct BaselineRow {
    pub table: u8,
    pub lattice: String,
    pub levels: usize,
    pub n: usize,
    pub snr_db: f64,
    pub nd: f64,
    pub nd_is_bound: bool,
    pub max_iterations: usize,
    pub pe: f64,
    pub pe_star: f64,
}

/// Published results, bundled as CSV.
pub const BASELINE_CSV: &str = include_str!("../data/baselines.csv");

pub fn baselines() -> Vec<BaselineRow> {
    csv::Reader::from_reader(BASELINE_CSV.as_bytes())
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .expect("bundled baseline rows are well formed")
}
