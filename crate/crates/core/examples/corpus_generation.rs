//! Generate a seeded synthetic corpus, write it to disk and score it back.
//!
//! cargo run --example corpus_generation -- [OUT_DIR]

use quickscore::corpus::{self, GeneratorConfig};
use quickscore::{score, Error};

fn main() -> quickscore::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(std::path::PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("quickscore-corpus"));
    std::fs::create_dir_all(&out).map_err(|source| Error::Io {
        path: out.clone(),
        source,
    })?;

    let config = GeneratorConfig {
        n_cases: 5,
        seed: 2024,
        ..GeneratorConfig::default()
    };
    let generated = corpus::generate(&config)?;
    let paths = generated.write_to(&out)?;
    println!("wrote {} files under {}", paths.len(), out.display());

    // what is on disk is exactly what was generated
    let network = corpus::read_kb(&paths[0])?;
    assert_eq!(network, generated.network);
    for path in &paths[1..] {
        let case = corpus::read_case_for(path, &network)?;
        match score(&network, &case) {
            Ok(r) => {
                let (top, p) = r.ranked(&network)[0];
                println!(
                    "{}: m+ {} m- {} joint {:.3e} top {} {:.3}",
                    path.file_name().unwrap().to_string_lossy(),
                    case.n_positive(),
                    case.n_negative(),
                    r.joint,
                    network.disease(top).id,
                    p
                );
            }
            Err(e) => println!("{}: {e}", path.display()),
        }
    }
    Ok(())
}
