#![allow(dead_code)]

use quickscore::corpus::CorpusRng;
use quickscore::model::{Disease, FindingSpec};
use quickscore::{Evidence, Network};

pub fn n1() -> Network {
    n1_with_leak(0.0)
}

pub fn n1_with_leak(leak_f1: f64) -> Network {
    Network::builder()
        .disease("d1", 0.1)
        .disease("d2", 0.2)
        .finding("f1", leak_f1, [("d1", 0.8), ("d2", 0.5)])
        .finding("f2", 0.0, [("d1", 0.3)])
        .build()
        .unwrap()
}

#[derive(Debug, Clone, Copy)]
pub struct RandomShape {
    pub max_diseases: usize,
    pub max_findings: usize,
    pub edge_probability: f64,
    /// Chance that any probability is replaced by exactly 0 or 1.
    pub extreme_probability: f64,
    pub leak: bool,
}

impl Default for RandomShape {
    fn default() -> Self {
        Self {
            max_diseases: 12,
            max_findings: 8,
            edge_probability: 0.5,
            extreme_probability: 0.0,
            leak: true,
        }
    }
}

fn draw_p(rng: &mut CorpusRng, shape: &RandomShape) -> f64 {
    if shape.extreme_probability > 0.0 && rng.unit() < shape.extreme_probability {
        if rng.unit() < 0.5 {
            0.0
        } else {
            1.0
        }
    } else {
        rng.unit()
    }
}

/// A random network with 1..=max_diseases diseases and 1..=max_findings
/// findings, probabilities uniform on [0, 1).
pub fn random_network(rng: &mut CorpusRng, shape: &RandomShape) -> Network {
    let n = 1 + rng.below(shape.max_diseases as u64) as usize;
    let m = 1 + rng.below(shape.max_findings as u64) as usize;
    random_network_sized(rng, shape, n, m)
}

pub fn random_network_sized(
    rng: &mut CorpusRng,
    shape: &RandomShape,
    n: usize,
    m: usize,
) -> Network {
    let mut b = Network::builder();
    for i in 0..n {
        let prior = draw_p(rng, shape);
        b.push_disease(Disease {
            id: format!("d{i}"),
            name: None,
            prior,
        });
    }
    for j in 0..m {
        let leak = if shape.leak { draw_p(rng, shape) } else { 0.0 };
        let mut edges = Vec::new();
        for i in 0..n {
            if rng.unit() < shape.edge_probability {
                edges.push((format!("d{i}"), draw_p(rng, shape)));
            }
        }
        b.push_finding(FindingSpec {
            id: format!("f{j}"),
            name: None,
            leak,
            edges,
        });
    }
    b.build().unwrap()
}

/// Each finding independently positive, negative or unobserved with equal
/// chance, in a random processing order.
pub fn random_evidence(rng: &mut CorpusRng, network: &Network) -> Evidence {
    let mut ev = Evidence::new();
    let mut order = Vec::new();
    for f in network.findings() {
        match rng.below(3) {
            0 => ev.positive.push(f.id.clone()),
            1 => ev.negative.push(f.id.clone()),
            _ => continue,
        }
        order.push(f.id.clone());
    }
    for i in (1..order.len()).rev() {
        let j = rng.below(i as u64 + 1) as usize;
        order.swap(i, j);
    }
    ev.order = Some(order);
    ev
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
