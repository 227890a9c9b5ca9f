//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any failed.
//!
//! cargo test -p quickscore --test acceptance

mod common;

use std::time::Instant;

use common::{max_abs_diff, random_evidence, random_network, RandomShape};
use quickscore::bench::{self, BenchConfig};
use quickscore::corpus::{generate, CaseSampler, CorpusRng, GeneratorConfig};
use quickscore::engine::subset_terms_evaluated;
use quickscore::oracle::Summation;
use quickscore::{
    fold_leak_as_virtual_disease, negative_marginal, oracle_joint, Error, Evidence, Network,
    Oracle, Quickscore, Session,
};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// 500 random networks, n in [1,12], m in [1,8]: joint and posteriors
/// within 1e-9 of enumeration, in under 10 s.
fn oracle_equivalence() -> Outcome {
    const TOL: f64 = 1e-9;
    let start = Instant::now();
    let mut rng = CorpusRng::new(20_240_501);
    let shape = RandomShape::default();
    let oracle = Oracle::default();
    let (mut worst_joint, mut worst_post, mut infeasible) = (0.0f64, 0.0f64, 0);
    for case in 0..500 {
        let net = random_network(&mut rng, &shape);
        let ev = random_evidence(&mut rng, &net);
        let expected = oracle.posteriors(&net, &ev);
        let got = quickscore::score(&net, &ev);
        match (expected, got) {
            (Ok(o), Ok(q)) => {
                worst_joint = worst_joint.max((o.joint - q.joint).abs());
                worst_post = worst_post.max(max_abs_diff(&o.posteriors, &q.posteriors));
            }
            (Err(Error::InfeasibleEvidence), Err(Error::InfeasibleEvidence)) => infeasible += 1,
            (o, q) => return Err(format!("case {case}: oracle {o:?} vs quickscore {q:?}")),
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        worst_joint <= TOL && worst_post <= TOL && secs < 10.0,
        format!(
            "max |Δjoint| {worst_joint:.2e}, max |Δposterior| {worst_post:.2e} (tol {TOL:e}), \
             {infeasible} infeasible in both, {secs:.2}s (< 10s)"
        ),
    )
}

/// Hand-derived N1 values within 1e-6.
fn n1_fixture() -> Outcome {
    const TOL: f64 = 1e-6;
    let net = common::n1();
    let mut lines = Vec::new();
    let mut ok = true;
    let mut expect = |what: &str, got: f64, want: f64| {
        let good = (got - want).abs() <= TOL;
        ok &= good;
        lines.push(format!("{what}={got:.6}{}", if good { "" } else { "(!)" }));
    };
    let neg = quickscore::score(&net, &Evidence::new().with_negative(["f1"]))
        .map_err(|e| e.to_string())?;
    expect("joint(F-={f1})", neg.joint, 0.828);
    let pos = quickscore::score(&net, &Evidence::new().with_positive(["f1"]))
        .map_err(|e| e.to_string())?;
    expect("joint(F+={f1})", pos.joint, 0.172);
    expect("p(d1|f1+)", pos.posteriors[0], 0.476744);
    expect("p(d2|f1+)", pos.posteriors[1], 0.627907);
    let mixed = quickscore::score(
        &net,
        &Evidence::new().with_positive(["f1"]).with_negative(["f2"]),
    )
    .map_err(|e| e.to_string())?;
    expect("joint(F+={f1},F-={f2})", mixed.joint, 0.1474);
    expect("p(d1|f1+,f2-)", mixed.posteriors[0], 0.389417);
    check(ok, lines.join(", "))
}

/// Negative-only product equals the general path to 1e-12 and evaluates no
/// subset terms.
fn negative_fast_path() -> Outcome {
    const TOL: f64 = 1e-12;
    let mut rng = CorpusRng::new(3);
    let shape = RandomShape {
        max_diseases: 40,
        max_findings: 30,
        ..RandomShape::default()
    };
    let mut worst = 0.0f64;
    let mut enumerated = 0;
    for _ in 0..100 {
        let net = random_network(&mut rng, &shape);
        let negatives: Vec<String> = net
            .findings()
            .iter()
            .filter(|_| rng.unit() < 0.6)
            .map(|f| f.id.clone())
            .collect();
        let before = subset_terms_evaluated();
        let fast = negative_marginal(&net, &negatives).map_err(|e| e.to_string())?;
        enumerated += subset_terms_evaluated() - before;
        let general =
            match quickscore::score(&net, &Evidence::new().with_negative(negatives.iter())) {
                Ok(r) => r.joint,
                Err(Error::InfeasibleEvidence) => 0.0,
                Err(e) => return Err(e.to_string()),
            };
        worst = worst.max((fast - general).abs());
    }
    check(
        worst <= TOL && enumerated == 0,
        format!("max |Δ| {worst:.2e} (tol {TOL:e}), subset terms in fast path: {enumerated}"),
    )
}

/// Session prefixes equal batch scores of the same prefixes, bit for bit.
fn incremental_equals_batch() -> Outcome {
    let mut rng = CorpusRng::new(4);
    let shape = RandomShape {
        max_diseases: 30,
        max_findings: 12,
        ..RandomShape::default()
    };
    let mut prefixes = 0;
    for case in 0..100 {
        let net = random_network(&mut rng, &shape);
        let ev = random_evidence(&mut rng, &net);
        let mut session = Session::new(&net);
        let steps = session.replay(&ev).map_err(|e| e.to_string())?;
        let sequence = ev.sequence();
        for (j, step) in steps.iter().enumerate() {
            let prefix = prefix_evidence(&sequence[..=j]);
            let batch = quickscore::score(&net, &prefix);
            let same = match (step, &batch) {
                (Ok(a), Ok(b)) => {
                    a.joint.to_bits() == b.joint.to_bits()
                        && a.terms_evaluated == b.terms_evaluated
                        && a.posteriors.len() == b.posteriors.len()
                        && a.posteriors
                            .iter()
                            .zip(&b.posteriors)
                            .all(|(x, y)| x.to_bits() == y.to_bits())
                }
                (Err(Error::InfeasibleEvidence), Err(Error::InfeasibleEvidence)) => true,
                _ => false,
            };
            if !same {
                return Err(format!("case {case} prefix {j}: {step:?} vs {batch:?}"));
            }
            prefixes += 1;
        }
    }
    Ok(format!(
        "{prefixes} prefixes over 100 cases identical to batch"
    ))
}

fn prefix_evidence(seq: &[(&str, quickscore::Polarity)]) -> Evidence {
    let mut ev = Evidence::new();
    for &(id, pol) in seq {
        match pol {
            quickscore::Polarity::Positive => ev.positive.push(id.to_string()),
            quickscore::Polarity::Negative => ev.negative.push(id.to_string()),
        }
    }
    ev.order = Some(seq.iter().map(|(id, _)| id.to_string()).collect());
    ev
}

/// Native leaks equal virtual always-present diseases to 1e-12.
fn leak_equivalence() -> Outcome {
    const TOL: f64 = 1e-12;
    let mut rng = CorpusRng::new(5);
    let shape = RandomShape::default();
    let mut worst = 0.0f64;
    for case in 0..100 {
        let net = random_network(&mut rng, &shape);
        let folded = fold_leak_as_virtual_disease(&net);
        let ev = random_evidence(&mut rng, &net);
        match (
            quickscore::score(&net, &ev),
            quickscore::score(&folded, &ev),
        ) {
            (Ok(a), Ok(b)) => {
                let n = net.n_diseases();
                worst = worst
                    .max((a.joint - b.joint).abs())
                    .max(max_abs_diff(&a.posteriors, &b.posteriors[..n]));
            }
            (Err(Error::InfeasibleEvidence), Err(Error::InfeasibleEvidence)) => {}
            (a, b) => return Err(format!("case {case}: {a:?} vs {b:?}")),
        }
    }
    check(
        worst <= TOL,
        format!("max |Δ| {worst:.2e} over 100 leaky networks (tol {TOL:e})"),
    )
}

/// n = 600, m- = 50, m+ from 14 to 20: median per-step time ratio in
/// [1.7, 2.5], whole sweep under 60 s.
fn complexity_shape() -> Outcome {
    let corpus = generate(&GeneratorConfig {
        n_diseases: 600,
        n_findings: 4000,
        n_cases: 0,
        seed: 42,
        ..GeneratorConfig::default()
    })
    .map_err(|e| e.to_string())?;
    let config = BenchConfig {
        pos_min: 14,
        pos_max: 20,
        neg: 50,
        reps: 5,
        seed: 1,
        engine: Quickscore::default(),
    };
    let start = Instant::now();
    let records = bench::run(&corpus.network, &config).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let medians = bench::median_seconds_by_m_plus(&records);
    let mut ratios: Vec<f64> = medians.windows(2).map(|w| w[1].1 / w[0].1).collect();
    let shown = ratios
        .iter()
        .map(|r| format!("{r:.2}"))
        .collect::<Vec<_>>()
        .join(" ");
    ratios.sort_by(f64::total_cmp);
    let median_ratio = 0.5 * (ratios[(ratios.len() - 1) / 2] + ratios[ratios.len() / 2]);
    check(
        records.len() == 35 && (1.7..=2.5).contains(&median_ratio) && secs < 60.0,
        format!(
            "{} rows, step ratios [{shown}], median {median_ratio:.3} (want [1.7, 2.5]), \
             m+=20 median {:.3}s, sweep {secs:.1}s (< 60s)",
            records.len(),
            medians.last().map_or(0.0, |m| m.1)
        ),
    )
}

/// Single negative findings, n <= 16: the 2^n-term sum equals the n-factor
/// product to 1e-12.
fn expansion_equals_product() -> Outcome {
    const TOL: f64 = 1e-12;
    let mut rng = CorpusRng::new(7);
    let shape = RandomShape {
        max_diseases: 16,
        ..RandomShape::default()
    };
    let oracle = Oracle {
        summation: Summation::Compensated,
        ..Oracle::default()
    };
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let net = random_network(&mut rng, &shape);
        let f = &net.finding(rng.below(net.n_findings() as u64) as usize).id;
        let expanded = oracle
            .joint(&net, &Evidence::new().with_negative([f]))
            .map_err(|e| e.to_string())?;
        let product = negative_marginal(&net, &[f]).map_err(|e| e.to_string())?;
        worst = worst.max((expanded - product).abs());
    }
    check(worst <= TOL, format!("max |Δ| {worst:.2e} (tol {TOL:e})"))
}

/// Extreme priors, uncausable findings and empty evidence, exactly.
fn degenerate_contracts() -> Outcome {
    let mut rng = CorpusRng::new(8);
    let shape = RandomShape {
        extreme_probability: 0.25,
        ..RandomShape::default()
    };
    let mut checked = [0usize; 4];
    for case in 0..200 {
        let net = random_network(&mut rng, &shape);

        let empty = quickscore::score(&net, &Evidence::new()).map_err(|e| e.to_string())?;
        let priors: Vec<f64> = net.diseases().iter().map(|d| d.prior).collect();
        if empty.joint != 1.0 || empty.posteriors != priors {
            return Err(format!("case {case}: empty evidence gave {empty:?}"));
        }
        checked[0] += 1;

        let ev = random_evidence(&mut rng, &net);
        let uncausable = ev
            .positive
            .iter()
            .any(|id| net.is_uncausable(net.finding_index(id).unwrap()));
        match quickscore::score(&net, &ev) {
            Ok(r) => {
                if uncausable {
                    return Err(format!("case {case}: uncausable positive scored {r:?}"));
                }
                for (d, &p) in net.diseases().iter().zip(&r.posteriors) {
                    if (d.prior == 0.0 && p != 0.0) || (d.prior == 1.0 && p != 1.0) {
                        return Err(format!("case {case}: prior {} gave posterior {p}", d.prior));
                    }
                    if d.prior == 0.0 || d.prior == 1.0 {
                        checked[1] += 1;
                    }
                }
            }
            Err(Error::InfeasibleEvidence) => {
                if uncausable {
                    checked[2] += 1;
                }
            }
            Err(e) => return Err(format!("case {case}: {e}")),
        }
    }
    let leakless = Network::builder()
        .disease("d", 0.4)
        .finding("f", 0.0, Vec::<(String, f64)>::new())
        .build()
        .unwrap();
    match quickscore::score(&leakless, &Evidence::new().with_positive(["f"])) {
        Err(Error::InfeasibleEvidence) => checked[3] += 1,
        other => return Err(format!("edgeless finding scored {other:?}")),
    }
    Ok(format!(
        "{} empty-evidence cases, {} extreme-prior posteriors, {} random + {} fixed uncausable cases",
        checked[0], checked[1], checked[2], checked[3]
    ))
}

/// Monte Carlo finding frequencies within 3σ of the enumerated marginals.
fn generator_faithfulness() -> Outcome {
    const SAMPLES: usize = 100_000;
    let corpus = generate(&GeneratorConfig {
        n_diseases: 10,
        n_findings: 8,
        edges_per_finding: 3.0,
        prior_range: [0.05, 0.5],
        p_cause_range: [0.1, 0.9],
        leak_range: [0.0, 0.1],
        n_cases: 0,
        negatives_per_case: 0,
        seed: 7,
    })
    .map_err(|e| e.to_string())?;
    let net = &corpus.network;
    let mut counts = vec![0usize; net.n_findings()];
    let mut sampler = CaseSampler::new(net, CorpusRng::new(7));
    for _ in 0..SAMPLES {
        let (_, findings) = sampler.sample();
        for (c, present) in counts.iter_mut().zip(findings) {
            *c += present as usize;
        }
    }
    let mut worst_sigma = 0.0f64;
    for (j, f) in net.findings().iter().enumerate() {
        let p = oracle_joint(net, &Evidence::new().with_positive([&f.id]))
            .map_err(|e| e.to_string())?;
        let freq = counts[j] as f64 / SAMPLES as f64;
        let sigma = (p * (1.0 - p) / SAMPLES as f64).sqrt();
        let z = if sigma > 0.0 {
            (freq - p).abs() / sigma
        } else if freq == p {
            0.0
        } else {
            f64::INFINITY
        };
        worst_sigma = worst_sigma.max(z);
    }
    check(
        worst_sigma <= 3.0,
        format!(
            "{} findings, {SAMPLES} samples, worst deviation {worst_sigma:.2}σ (≤ 3σ)",
            net.n_findings()
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("oracle equivalence", oracle_equivalence),
        ("hand-derived N1 fixture", n1_fixture),
        ("negative-only fast path", negative_fast_path),
        ("incremental = batch", incremental_equals_batch),
        ("leak equivalence", leak_equivalence),
        ("complexity shape", complexity_shape),
        ("expansion = product identity", expansion_equals_product),
        ("degenerate contracts", degenerate_contracts),
        ("generator faithfulness", generator_faithfulness),
    ];
    let mut failed = 0;
    for (i, (name, criterion)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = criterion();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] {}. {name}: {detail} [{secs:.2}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {}. {name}: {detail} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
