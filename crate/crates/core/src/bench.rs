//! Timing sweeps over the number of positive findings.

use std::io::{Read, Write};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::corpus::CorpusRng;
use crate::engine::Quickscore;
use crate::error::{Error, Result};
use crate::model::{Network, Observations};

/// CSV header of bench output.
pub const CSV_HEADER: &str = "n,m_plus,m_minus,rep,seed,wall_seconds,joint";

/// One timed scoring run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub n: usize,
    pub m_plus: usize,
    pub m_minus: usize,
    pub rep: usize,
    pub seed: u64,
    pub wall_seconds: f64,
    pub joint: f64,
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub pos_min: usize,
    pub pos_max: usize,
    pub neg: usize,
    pub reps: usize,
    pub seed: u64,
    pub engine: Quickscore,
}

/// Findings worth observing: at least one link or a nonzero leak.
pub fn eligible_findings(network: &Network) -> Vec<usize> {
    network
        .findings()
        .iter()
        .enumerate()
        .filter(|(_, f)| !f.links.is_empty() || f.leak > 0.0)
        .map(|(j, _)| j)
        .collect()
}

/// Evidence for every (m_plus, rep) pair in sweep order, drawn uniformly
/// without replacement from the eligible findings. The first `m_plus` draws
/// are positive, the next `neg` negative.
pub fn draw_evidence(network: &Network, config: &BenchConfig) -> Result<Vec<Observations>> {
    let pool = eligible_findings(network);
    let needed = config.pos_max + config.neg;
    if needed > pool.len() {
        return Err(Error::InvalidConfig(format!(
            "need {needed} distinct observable findings but the KB has {}",
            pool.len()
        )));
    }
    let mut rng = CorpusRng::new(config.seed);
    let mut out = Vec::new();
    for m_plus in config.pos_min..=config.pos_max {
        for _ in 0..config.reps {
            let mut picks: Vec<usize> = rng
                .choose(pool.len(), m_plus + config.neg)
                .into_iter()
                .map(|p| pool[p])
                .collect();
            // shuffle so polarity does not follow finding index
            for i in (1..picks.len()).rev() {
                let j = rng.below(i as u64 + 1) as usize;
                picks.swap(i, j);
            }
            let negative = picks.split_off(m_plus);
            out.push(Observations {
                positive: picks,
                negative,
            });
        }
    }
    Ok(out)
}

/// Runs the sweep. Only the scoring call is inside the timed region.
///
/// Draws whose joint underflows into the cancellation noise of the
/// alternating sum are reported as infeasible by the engine; they are
/// recorded with joint 0 rather than aborting the sweep.
pub fn run(network: &Network, config: &BenchConfig) -> Result<Vec<BenchRecord>> {
    config.engine.check_positive_cap(config.pos_max)?;
    let cases = draw_evidence(network, config)?;
    let mut records = Vec::with_capacity(cases.len());
    let reps = config.reps.max(1);
    for (i, obs) in cases.iter().enumerate() {
        let start = Instant::now();
        let outcome = config.engine.score_observations(network, obs);
        let wall_seconds = start.elapsed().as_secs_f64();
        // the full subset walk ran either way, so the timing stands
        let joint = match outcome {
            Ok(result) => result.joint,
            Err(Error::InfeasibleEvidence) => 0.0,
            Err(e) => return Err(e),
        };
        records.push(BenchRecord {
            n: network.n_diseases(),
            m_plus: obs.positive.len(),
            m_minus: obs.negative.len(),
            rep: i % reps,
            seed: config.seed,
            wall_seconds,
            joint,
        });
    }
    Ok(records)
}

pub fn write_csv<W: Write>(records: &[BenchRecord], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{:?},{:?}",
            r.n, r.m_plus, r.m_minus, r.rep, r.seed, r.wall_seconds, r.joint
        )?;
    }
    out.flush()
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<BenchRecord>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r
        .headers()
        .map_err(|e| csv_parse_error(&e))?
        .iter()
        .collect::<Vec<_>>()
        .join(",");
    if header != CSV_HEADER {
        return Err(Error::Parse {
            path: "<csv>".into(),
            line: 1,
            column: 1,
            message: format!("unexpected header `{header}`"),
        });
    }
    r.deserialize()
        .map(|row| row.map_err(|e| csv_parse_error(&e)))
        .collect()
}

fn csv_parse_error(e: &csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    Error::Parse {
        path: "<csv>".into(),
        line,
        column: 1,
        message: e.to_string(),
    }
}

/// Median of each m_plus group's wall times, in ascending m_plus order.
pub fn median_seconds_by_m_plus(records: &[BenchRecord]) -> Vec<(usize, f64)> {
    let mut groups: std::collections::BTreeMap<usize, Vec<f64>> = Default::default();
    for r in records {
        groups.entry(r.m_plus).or_default().push(r.wall_seconds);
    }
    groups
        .into_iter()
        .map(|(m, mut ts)| {
            ts.sort_by(f64::total_cmp);
            let mid = ts.len() / 2;
            let median = if ts.len() % 2 == 1 {
                ts[mid]
            } else {
                0.5 * (ts[mid - 1] + ts[mid])
            };
            (m, median)
        })
        .collect()
}
