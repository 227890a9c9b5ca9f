//! Add findings one at a time and watch the posteriors move.
//!
//! cargo run --example incremental_session

use quickscore::{Network, Session};

fn main() -> quickscore::Result<()> {
    let network = Network::builder()
        .disease("flu", 0.10)
        .disease("cold", 0.20)
        .disease("strep", 0.02)
        .finding("fever", 0.01, [("flu", 0.8), ("cold", 0.3), ("strep", 0.7)])
        .finding("cough", 0.05, [("flu", 0.6), ("cold", 0.7)])
        .finding("sore_throat", 0.02, [("cold", 0.4), ("strep", 0.9)])
        .finding("rash", 0.01, [("strep", 0.3)])
        .build()?;

    let mut session = Session::new(&network);
    let steps = [
        ("+", "fever"),
        ("-", "cough"),
        ("+", "sore_throat"),
        ("-", "rash"),
    ];
    for (sign, id) in steps {
        let result = if sign == "+" {
            session.add_positive(id)?
        } else {
            session.add_negative(id)?
        };
        let top = result.ranked(&network)[0];
        println!(
            "{sign}{id:<12} joint {:.6}  top {} {:.4}  ({} terms)",
            result.joint,
            network.disease(top.0).id,
            top.1,
            result.terms_evaluated
        );
    }

    // the session rejects repeats but keeps its state
    if let Err(e) = session.add_positive("fever") {
        println!("repeat rejected: {e}");
    }
    println!("evidence so far: {:?}", session.evidence());
    Ok(())
}
