//! Score a small diagnostic network and print the ranked posteriors.
//!
//! cargo run --example basic_scoring

use quickscore::{score, Evidence, Network};

fn main() -> quickscore::Result<()> {
    let network = Network::builder()
        .disease("flu", 0.10)
        .disease("cold", 0.20)
        .disease("strep", 0.02)
        .finding("fever", 0.01, [("flu", 0.8), ("cold", 0.3), ("strep", 0.7)])
        .finding("cough", 0.05, [("flu", 0.6), ("cold", 0.7)])
        .finding("sore_throat", 0.02, [("cold", 0.4), ("strep", 0.9)])
        .build()?;

    let evidence = Evidence::new()
        .with_positive(["fever", "sore_throat"])
        .with_negative(["cough"]);
    let result = score(&network, &evidence)?;

    println!("p(evidence) = {:.6}", result.joint);
    println!("subset terms: {}", result.terms_evaluated);
    for (i, p) in result.ranked(&network) {
        let d = network.disease(i);
        println!("{:>6}  prior {:.3}  posterior {:.4}", d.id, d.prior, p);
    }
    Ok(())
}
