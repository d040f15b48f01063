//! Seeded Monte Carlo simulation of the discrimination experiment.
//!
//! Each shot draws one of the two states with probability ½, draws an
//! outcome from the instrument's POVM, records whether the outcome matches
//! the state, and records the infidelity of the posterior with the input.
//! Shots are split into fixed-size partitions; partition `k` draws from
//! ChaCha8 stream `k` under the user seed, so results do not depend on how
//! partitions are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::instruments::Instrument;
use crate::qubit::StatePair;
use crate::{Error, Result};

/// Identifier recorded in every result so runs can be reproduced.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng/rand_chacha-0.9/stream-per-partition";

/// Shots per partition (one RNG stream each).
pub const PARTITION_SHOTS: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SimulationConfig {
    pub shots: u64,
    pub seed: u64,
}

impl SimulationConfig {
    pub fn new(shots: u64, seed: u64) -> Result<Self> {
        if shots == 0 {
            return Err(Error::InvalidConfig("shots must be at least 1".into()));
        }
        Ok(Self { shots, seed })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationResult {
    pub empirical_p: f64,
    pub empirical_d: f64,
    pub stderr_p: f64,
    pub stderr_d: f64,
    pub shots: u64,
    pub seed: u64,
    /// `counts[i][j]`: shots prepared in state `i` that produced outcome `j`.
    pub counts: [[u64; 2]; 2],
}

/// Per-(state, outcome) probability and posterior infidelity.
#[derive(Debug, Clone, Copy)]
struct Cells {
    first_outcome: [f64; 2],
    infidelity: [[f64; 2]; 2],
}

fn cells(inst: &Instrument, pair: &StatePair) -> Result<Cells> {
    let mut first_outcome = [0.0; 2];
    let mut infidelity = [[0.0; 2]; 2];
    for (i, psi) in pair.states().iter().enumerate() {
        let rho = psi.projector();
        let mut probs = [0.0; 2];
        for (j, p) in probs.iter_mut().enumerate() {
            let out = inst.apply_outcome(j, &rho)?;
            *p = out.probability;
            if let Some(post) = out.posterior() {
                let d = 1.0 - post.expectation(psi).re;
                // Snap round-off so an undisturbed posterior scores exactly zero.
                infidelity[i][j] = if d.abs() < 1e-14 {
                    0.0
                } else {
                    d.clamp(0.0, 1.0)
                };
            }
        }
        first_outcome[i] = probs[0] / (probs[0] + probs[1]);
    }
    Ok(Cells {
        first_outcome,
        infidelity,
    })
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    counts: [[u64; 2]; 2],
    successes: u64,
    sum_d: f64,
    sum_d2: f64,
}

impl Tally {
    fn merge(mut self, other: &Tally) -> Tally {
        for i in 0..2 {
            for j in 0..2 {
                self.counts[i][j] += other.counts[i][j];
            }
        }
        self.successes += other.successes;
        self.sum_d += other.sum_d;
        self.sum_d2 += other.sum_d2;
        self
    }
}

fn run_partition(cells: &Cells, seed: u64, partition: u64, shots: u64) -> Tally {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(partition);
    let mut tally = Tally::default();
    for _ in 0..shots {
        let i = usize::from(rng.random::<f64>() >= 0.5);
        let j = usize::from(rng.random::<f64>() >= cells.first_outcome[i]);
        tally.counts[i][j] += 1;
        if i == j {
            tally.successes += 1;
        }
        let d = cells.infidelity[i][j];
        tally.sum_d += d;
        tally.sum_d2 += d * d;
    }
    tally
}

/// Estimates the success probability and disturbance of a two-outcome
/// instrument on the equiprobable pair.
pub fn run(
    inst: &Instrument,
    pair: &StatePair,
    cfg: &SimulationConfig,
) -> Result<SimulationResult> {
    if inst.outcome_count() != 2 {
        return Err(Error::SizeMismatch {
            outcomes: inst.outcome_count(),
            states: 2,
        });
    }
    if cfg.shots == 0 {
        return Err(Error::InvalidConfig("shots must be at least 1".into()));
    }
    let cells = cells(inst, pair)?;
    let partitions = cfg.shots.div_ceil(PARTITION_SHOTS);
    let tallies: Vec<Tally> = (0..partitions)
        .into_par_iter()
        .map(|k| {
            let len = PARTITION_SHOTS.min(cfg.shots - k * PARTITION_SHOTS);
            run_partition(&cells, cfg.seed, k, len)
        })
        .collect();
    let total = tallies.iter().fold(Tally::default(), Tally::merge);

    let n = cfg.shots as f64;
    let k = total.successes as f64;
    let sample_var = |sum: f64, sum2: f64| {
        if cfg.shots < 2 {
            0.0
        } else {
            ((sum2 - sum * sum / n) / (n - 1.0)).max(0.0)
        }
    };
    Ok(SimulationResult {
        empirical_p: k / n,
        empirical_d: total.sum_d / n,
        stderr_p: (sample_var(k, k) / n).sqrt(),
        stderr_d: (sample_var(total.sum_d, total.sum_d2) / n).sqrt(),
        shots: cfg.shots,
        seed: cfg.seed,
        counts: total.counts,
    })
}
