//! Time scoring as the number of positive findings grows. Each extra
//! positive should roughly double the cost.
//!
//! cargo run --release --example benchmark_sweep

use quickscore::bench::{self, BenchConfig};
use quickscore::corpus::{self, GeneratorConfig};
use quickscore::Quickscore;

fn main() -> quickscore::Result<()> {
    let network = corpus::generate(&GeneratorConfig {
        n_diseases: 300,
        n_findings: 1000,
        n_cases: 0,
        seed: 1,
        ..GeneratorConfig::default()
    })?
    .network;

    let config = BenchConfig {
        pos_min: 4,
        pos_max: 16,
        neg: 20,
        reps: 3,
        seed: 1,
        engine: Quickscore::default(),
    };
    let records = bench::run(&network, &config)?;

    let medians = bench::median_seconds_by_m_plus(&records);
    let mut previous: Option<f64> = None;
    for (m_plus, secs) in medians {
        match previous {
            Some(p) if p > 0.0 => println!("m+ {m_plus:2}  {secs:.3e} s  x{:.2}", secs / p),
            _ => println!("m+ {m_plus:2}  {secs:.3e} s"),
        }
        previous = Some(secs);
    }

    let mut csv = Vec::new();
    bench::write_csv(&records, &mut csv).expect("write to memory");
    println!(
        "{} CSV rows",
        String::from_utf8_lossy(&csv).lines().count() - 1
    );
    Ok(())
}
