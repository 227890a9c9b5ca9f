//! Knowledge-base, case and result files, and a seeded synthetic corpus
//! generator.
//!
//! All files are JSON with strict parsing: unknown keys are rejected.
//! Probabilities are written in the shortest decimal form that parses back
//! to the identical `f64`, so every write/read pair is lossless.
//!
//! # Generator random stream
//!
//! The generator draws from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `SeedableRng::seed_from_u64(seed)`. Only raw `next_u64` outputs are used:
//!
//! * unit draws are `(x >> 11) * 2^-53`, uniform on `[0, 1)`;
//! * range draws are `lo + (hi - lo) * unit`;
//! * integer draws below `k` reject `x >= u64::MAX - (u64::MAX % k)` and
//!   return `x % k`.
//!
//! Draws happen in this order: one prior per disease; then per finding its
//! leak, an edge-count draw, the linked diseases (Floyd sampling, sorted) and
//! one `p_cause` per link; then per case one draw per disease, one per leak
//! and per present link, and the negative-finding selection. Changing any of
//! this changes generated bytes and requires a format version bump.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engine::InferenceResult;
use crate::error::{Error, Result};
use crate::model::{Disease, Evidence, FindingSpec, Network};
use crate::oracle::OracleResult;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct KbFile {
    version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generator: Option<GeneratorConfig>,
    diseases: Vec<DiseaseRecord>,
    findings: Vec<FindingRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiseaseRecord {
    id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    prior: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FindingRecord {
    id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(default)]
    leak: f64,
    #[serde(default)]
    edges: Vec<EdgeRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeRecord {
    disease: String,
    p_cause: f64,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CaseFile {
    #[serde(default)]
    positive: Vec<String>,
    #[serde(default)]
    negative: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    order: Option<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Quickscore,
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PosteriorRecord {
    pub disease: String,
    pub posterior: f64,
}

/// The contents of a result file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScoreReport {
    pub joint: f64,
    pub posteriors: Vec<PosteriorRecord>,
    pub terms_evaluated: u64,
    pub method: Method,
}

impl ScoreReport {
    pub fn from_quickscore(network: &Network, result: &InferenceResult) -> Self {
        Self {
            joint: result.joint,
            posteriors: posterior_records(network, &result.posteriors),
            terms_evaluated: result.terms_evaluated,
            method: Method::Quickscore,
        }
    }

    /// `terms_evaluated` counts the 2^n enumerated disease instances.
    pub fn from_oracle(network: &Network, result: &OracleResult) -> Self {
        Self {
            joint: result.joint,
            posteriors: posterior_records(network, &result.posteriors),
            terms_evaluated: 1u64 << network.n_diseases(),
            method: Method::Oracle,
        }
    }
}

fn posterior_records(network: &Network, posteriors: &[f64]) -> Vec<PosteriorRecord> {
    network
        .diseases()
        .iter()
        .zip(posteriors)
        .map(|(d, &p)| PosteriorRecord {
            disease: d.id.clone(),
            posterior: p,
        })
        .collect()
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str, path: &Path) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("in-memory JSON serialization");
    text.push('\n');
    text
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Parses a KB document. `origin` is only used in error messages.
pub fn kb_from_str(text: &str, origin: &Path) -> Result<Network> {
    let file: KbFile = parse(text, origin)?;
    if file.version != FORMAT_VERSION {
        return Err(Error::Parse {
            path: origin.to_path_buf(),
            line: 1,
            column: 1,
            message: format!(
                "unsupported KB version {} (expected {FORMAT_VERSION})",
                file.version
            ),
        });
    }
    let mut b = Network::builder();
    for d in file.diseases {
        b.push_disease(Disease {
            id: d.id,
            name: d.name,
            prior: d.prior,
        });
    }
    for f in file.findings {
        b.push_finding(FindingSpec {
            id: f.id,
            name: f.name,
            leak: f.leak,
            edges: f
                .edges
                .into_iter()
                .map(|e| (e.disease, e.p_cause))
                .collect(),
        });
    }
    b.build()
}

pub fn kb_to_string(network: &Network, generator: Option<&GeneratorConfig>) -> String {
    let file = KbFile {
        version: FORMAT_VERSION,
        generator: generator.cloned(),
        diseases: network
            .diseases()
            .iter()
            .map(|d| DiseaseRecord {
                id: d.id.clone(),
                name: d.name.clone(),
                prior: d.prior,
            })
            .collect(),
        findings: network
            .findings()
            .iter()
            .map(|f| FindingRecord {
                id: f.id.clone(),
                name: f.name.clone(),
                leak: f.leak,
                edges: f
                    .links
                    .iter()
                    .map(|l| EdgeRecord {
                        disease: network.disease(l.disease).id.clone(),
                        p_cause: l.p_cause,
                    })
                    .collect(),
            })
            .collect(),
    };
    to_json(&file)
}

pub fn read_kb(path: impl AsRef<Path>) -> Result<Network> {
    let path = path.as_ref();
    kb_from_str(&read_text(path)?, path)
}

pub fn write_kb(network: &Network, path: impl AsRef<Path>) -> Result<()> {
    write_text(path.as_ref(), &kb_to_string(network, None))
}

/// Parses a case document and runs the network-independent evidence checks.
pub fn case_from_str(text: &str, origin: &Path) -> Result<Evidence> {
    let file: CaseFile = parse(text, origin)?;
    let evidence = Evidence {
        positive: file.positive,
        negative: file.negative,
        order: file.order,
    };
    let report = evidence.self_check();
    if !report.is_valid() {
        return Err(Error::Invalid(report));
    }
    Ok(evidence)
}

pub fn case_to_string(evidence: &Evidence) -> String {
    to_json(&CaseFile {
        positive: evidence.positive.clone(),
        negative: evidence.negative.clone(),
        order: evidence.order.clone(),
    })
}

pub fn read_case(path: impl AsRef<Path>) -> Result<Evidence> {
    let path = path.as_ref();
    case_from_str(&read_text(path)?, path)
}

/// Reads a case and validates it fully against `network`.
pub fn read_case_for(path: impl AsRef<Path>, network: &Network) -> Result<Evidence> {
    let evidence = read_case(path)?;
    let report = crate::model::validate(network, &evidence);
    if !report.is_valid() {
        return Err(Error::Invalid(report));
    }
    Ok(evidence)
}

pub fn write_case(evidence: &Evidence, path: impl AsRef<Path>) -> Result<()> {
    write_text(path.as_ref(), &case_to_string(evidence))
}

pub fn result_to_string(report: &ScoreReport) -> String {
    to_json(report)
}

pub fn result_from_str(text: &str, origin: &Path) -> Result<ScoreReport> {
    parse(text, origin)
}

pub fn write_result(report: &ScoreReport, path: impl AsRef<Path>) -> Result<()> {
    write_text(path.as_ref(), &result_to_string(report))
}

pub fn read_result(path: impl AsRef<Path>) -> Result<ScoreReport> {
    let path = path.as_ref();
    result_from_str(&read_text(path)?, path)
}

/// Settings for [`generate`]. Recorded verbatim in generated KB files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorConfig {
    pub n_diseases: usize,
    pub n_findings: usize,
    /// Mean number of diseases linked to each finding.
    pub edges_per_finding: f64,
    pub prior_range: [f64; 2],
    pub p_cause_range: [f64; 2],
    pub leak_range: [f64; 2],
    pub n_cases: usize,
    /// Absent findings reported as F- per case (fewer when not enough are
    /// absent).
    pub negatives_per_case: usize,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            n_diseases: 100,
            n_findings: 400,
            edges_per_finding: 2.0,
            prior_range: [0.0005, 0.005],
            p_cause_range: [0.05, 0.9],
            leak_range: [0.0, 0.001],
            n_cases: 10,
            negatives_per_case: 20,
            seed: 0,
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, [lo, hi]) in [
            ("prior_range", self.prior_range),
            ("p_cause_range", self.p_cause_range),
            ("leak_range", self.leak_range),
        ] {
            if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) {
                return Err(Error::InvalidConfig(format!(
                    "{name} [{lo}, {hi}] must lie within [0, 1]"
                )));
            }
            if lo > hi {
                return Err(Error::InvalidConfig(format!(
                    "{name} lower bound {lo} exceeds upper bound {hi}"
                )));
            }
        }
        if !self.edges_per_finding.is_finite() || self.edges_per_finding < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "edges_per_finding must be a finite non-negative number, got {}",
                self.edges_per_finding
            )));
        }
        Ok(())
    }
}

/// The pinned random stream described in the module docs.
#[derive(Debug, Clone)]
pub struct CorpusRng(ChaCha8Rng);

impl CorpusRng {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform on [0, 1).
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn range(&mut self, [lo, hi]: [f64; 2]) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    /// Uniform integer in `0..k`. `k` must be positive.
    pub fn below(&mut self, k: u64) -> u64 {
        assert!(k > 0, "empty range");
        let zone = u64::MAX - u64::MAX % k;
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % k;
            }
        }
    }

    /// `k` distinct values from `0..n` in ascending order (Floyd's algorithm).
    pub fn choose(&mut self, n: usize, k: usize) -> Vec<usize> {
        let k = k.min(n);
        let mut picked = BTreeSet::new();
        for j in (n - k)..n {
            let t = self.below(j as u64 + 1) as usize;
            if !picked.insert(t) {
                picked.insert(j);
            }
        }
        picked.into_iter().collect()
    }
}

/// Draws finding states from a network by simulating every causal
/// mechanism: each present disease independently triggers each linked
/// finding, and each leak fires on its own.
pub struct CaseSampler<'n> {
    network: &'n Network,
    rng: CorpusRng,
}

impl<'n> CaseSampler<'n> {
    pub fn new(network: &'n Network, rng: CorpusRng) -> Self {
        Self { network, rng }
    }

    pub fn into_rng(self) -> CorpusRng {
        self.rng
    }

    /// One disease instance (by dense index) and the resulting finding states.
    pub fn sample(&mut self) -> (Vec<bool>, Vec<bool>) {
        let diseases: Vec<bool> = self
            .network
            .diseases()
            .iter()
            .map(|d| self.rng.unit() < d.prior)
            .collect();
        let findings = self
            .network
            .findings()
            .iter()
            .map(|f| {
                let mut present = self.rng.unit() < f.leak;
                for l in &f.links {
                    if diseases[l.disease] && self.rng.unit() < l.p_cause {
                        present = true;
                    }
                }
                present
            })
            .collect();
        (diseases, findings)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub config: GeneratorConfig,
    pub network: Network,
    pub cases: Vec<Evidence>,
}

impl Corpus {
    pub fn kb_string(&self) -> String {
        kb_to_string(&self.network, Some(&self.config))
    }

    pub fn case_path(dir: &Path, index: usize) -> PathBuf {
        dir.join(format!("case-{index:04}.json"))
    }

    /// Writes `kb.json` and `case-NNNN.json` files into `dir`, creating it if
    /// needed. Returns the written paths, KB first.
    pub fn write_to(&self, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut written = Vec::with_capacity(self.cases.len() + 1);
        let kb = dir.join("kb.json");
        write_text(&kb, &self.kb_string())?;
        written.push(kb);
        for (i, case) in self.cases.iter().enumerate() {
            let path = Self::case_path(dir, i);
            write_case(case, &path)?;
            written.push(path);
        }
        Ok(written)
    }
}

/// Generates a random network and sampled cases, deterministically in
/// `config.seed`.
pub fn generate(config: &GeneratorConfig) -> Result<Corpus> {
    config.validate()?;
    let mut rng = CorpusRng::new(config.seed);
    let n = config.n_diseases;

    let mut b = Network::builder();
    for i in 0..n {
        b.push_disease(Disease {
            id: format!("d{i}"),
            name: None,
            prior: rng.range(config.prior_range),
        });
    }
    let whole = config.edges_per_finding.floor();
    let frac = config.edges_per_finding - whole;
    for j in 0..config.n_findings {
        let leak = rng.range(config.leak_range);
        let mut k = whole as usize;
        if rng.unit() < frac {
            k += 1;
        }
        let edges = rng
            .choose(n, k)
            .into_iter()
            .map(|d| (format!("d{d}"), rng.range(config.p_cause_range)))
            .collect();
        b.push_finding(FindingSpec {
            id: format!("f{j}"),
            name: None,
            leak,
            edges,
        });
    }
    let network = b.build()?;

    let mut sampler = CaseSampler::new(&network, rng);
    let mut cases = Vec::with_capacity(config.n_cases);
    for _ in 0..config.n_cases {
        let (_, findings) = sampler.sample();
        let mut ev = Evidence::new();
        let mut absent = Vec::new();
        for (j, &present) in findings.iter().enumerate() {
            if present {
                ev.positive.push(network.finding(j).id.clone());
            } else {
                absent.push(j);
            }
        }
        let picks = sampler.rng.choose(absent.len(), config.negatives_per_case);
        ev.negative = picks
            .into_iter()
            .map(|p| network.finding(absent[p]).id.clone())
            .collect();
        cases.push(ev);
    }

    Ok(Corpus {
        config: config.clone(),
        network,
        cases,
    })
}
