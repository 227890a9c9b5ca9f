//! Compare quickscore against brute-force enumeration on random networks.
//!
//! cargo run --release --example oracle_cross_check

use quickscore::corpus::{self, GeneratorConfig};
use quickscore::{oracle_posteriors, score, Error};

fn main() -> quickscore::Result<()> {
    let config = GeneratorConfig {
        n_diseases: 14,
        n_findings: 30,
        edges_per_finding: 3.0,
        prior_range: [0.01, 0.2],
        leak_range: [0.0, 0.02],
        n_cases: 20,
        negatives_per_case: 6,
        seed: 11,
        ..GeneratorConfig::default()
    };
    let corpus = corpus::generate(&config)?;
    let net = &corpus.network;

    let mut worst = 0.0f64;
    for (k, case) in corpus.cases.iter().enumerate() {
        let fast = match score(net, case) {
            Ok(r) => r,
            Err(Error::InfeasibleEvidence) => continue,
            Err(e) => return Err(e),
        };
        let slow = oracle_posteriors(net, case)?;
        let diff = fast
            .posteriors
            .iter()
            .zip(&slow.posteriors)
            .map(|(a, b)| (a - b).abs())
            .fold((fast.joint - slow.joint).abs(), f64::max);
        worst = worst.max(diff);
        println!(
            "case {k:2}: m+ {:2} m- {:2}  joint {:.6e}  max diff {diff:.2e}",
            case.n_positive(),
            case.n_negative(),
            fast.joint
        );
    }
    println!("worst absolute difference {worst:.2e}");
    Ok(())
}
