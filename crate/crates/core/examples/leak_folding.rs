//! A finding's leak behaves like one extra always-linked disease. Folding it
//! into the network that way leaves every answer unchanged.
//!
//! cargo run --example leak_folding

use quickscore::{fold_leak_as_virtual_disease, oracle_posteriors, score, Evidence, Network};

fn main() -> quickscore::Result<()> {
    let network = Network::builder()
        .disease("d1", 0.1)
        .disease("d2", 0.2)
        .finding("f1", 0.05, [("d1", 0.8), ("d2", 0.5)])
        .finding("f2", 0.1, [("d1", 0.3)])
        .build()?;
    let folded = fold_leak_as_virtual_disease(&network);
    println!(
        "{} diseases become {}: {:?}",
        network.n_diseases(),
        folded.n_diseases(),
        folded.diseases().iter().map(|d| &d.id).collect::<Vec<_>>()
    );

    let evidence = Evidence::new().with_positive(["f1"]).with_negative(["f2"]);
    let leaky = score(&network, &evidence)?;
    let explicit = oracle_posteriors(&folded, &evidence)?;
    println!("joint with leak terms   {:.15}", leaky.joint);
    println!("joint with leak diseases {:.15}", explicit.joint);
    for (i, d) in network.diseases().iter().enumerate() {
        println!(
            "{}: {:.15} vs {:.15}",
            d.id, leaky.posteriors[i], explicit.posteriors[i]
        );
    }
    Ok(())
}
