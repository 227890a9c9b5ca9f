//! The two-layer diagnostic network: diseases with priors, findings with
//! leaky noisy-OR links, and the evidence observed on the findings.
//!
//! Identifiers are case-sensitive strings at the edges of the API. A built
//! [`Network`] maps them to dense indices so inference loops index plain
//! vectors. Every `Network` value satisfies the model invariants; the only
//! way to obtain one is through [`NetworkBuilder::build`], which reports all
//! violations at once.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Disease {
    pub id: String,
    pub name: Option<String>,
    /// p(d+). p(d-) is always `1 - prior`.
    pub prior: f64,
}

/// A causal link from a disease (dense index) to a finding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link {
    pub disease: usize,
    /// p(f+ | only this disease present).
    pub p_cause: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Finding {
    pub id: String,
    pub name: Option<String>,
    /// Probability the finding is present with every modeled disease absent.
    pub leak: f64,
    pub links: Vec<Link>,
}

/// A validated bipartite disease/finding network.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    diseases: Vec<Disease>,
    findings: Vec<Finding>,
    disease_index: HashMap<String, usize>,
    finding_index: HashMap<String, usize>,
}

impl Network {
    pub fn builder() -> NetworkBuilder {
        NetworkBuilder::default()
    }

    pub fn diseases(&self) -> &[Disease] {
        &self.diseases
    }

    pub fn findings(&self) -> &[Finding] {
        &self.findings
    }

    /// Number of diseases, n.
    pub fn n_diseases(&self) -> usize {
        self.diseases.len()
    }

    /// Number of findings, m.
    pub fn n_findings(&self) -> usize {
        self.findings.len()
    }

    pub fn disease_index(&self, id: &str) -> Option<usize> {
        self.disease_index.get(id).copied()
    }

    pub fn finding_index(&self, id: &str) -> Option<usize> {
        self.finding_index.get(id).copied()
    }

    pub fn disease(&self, idx: usize) -> &Disease {
        &self.diseases[idx]
    }

    pub fn finding(&self, idx: usize) -> &Finding {
        &self.findings[idx]
    }

    /// p(f+ | only disease) for a (finding, disease) pair; 0 when unlinked.
    pub fn p_cause(&self, finding: usize, disease: usize) -> f64 {
        self.findings[finding]
            .links
            .iter()
            .find(|l| l.disease == disease)
            .map_or(0.0, |l| l.p_cause)
    }

    /// True when the finding can never be observed present: no leak and
    /// every linked disease either has prior 0 or never causes it.
    pub fn is_uncausable(&self, finding: usize) -> bool {
        let f = &self.findings[finding];
        f.leak == 0.0
            && f.links
                .iter()
                .all(|l| l.p_cause == 0.0 || self.diseases[l.disease].prior == 0.0)
    }

    /// Rebuilds the network into a builder, e.g. to edit and re-validate.
    pub fn to_builder(&self) -> NetworkBuilder {
        let mut b = NetworkBuilder::default();
        for d in &self.diseases {
            b.push_disease(d.clone());
        }
        for f in &self.findings {
            b.push_finding(FindingSpec {
                id: f.id.clone(),
                name: f.name.clone(),
                leak: f.leak,
                edges: f
                    .links
                    .iter()
                    .map(|l| (self.diseases[l.disease].id.clone(), l.p_cause))
                    .collect(),
            });
        }
        b
    }

    fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        check_diseases(&self.diseases, &mut out);
        let mut seen = HashSet::new();
        for f in &self.findings {
            if !seen.insert(f.id.as_str()) {
                out.push(Violation::DuplicateFindingId(f.id.clone()));
            }
            if !in_unit(f.leak) {
                out.push(Violation::LeakOutOfRange {
                    finding: f.id.clone(),
                    value: f.leak,
                });
            }
            let mut linked = HashSet::new();
            for l in &f.links {
                let Some(d) = self.diseases.get(l.disease) else {
                    out.push(Violation::UnknownDisease {
                        finding: f.id.clone(),
                        disease: format!("#{}", l.disease),
                    });
                    continue;
                };
                if !linked.insert(l.disease) {
                    out.push(Violation::DuplicateEdge {
                        finding: f.id.clone(),
                        disease: d.id.clone(),
                    });
                }
                if !in_unit(l.p_cause) {
                    out.push(Violation::PCauseOutOfRange {
                        finding: f.id.clone(),
                        disease: d.id.clone(),
                        value: l.p_cause,
                    });
                }
            }
        }
        out
    }
}

/// Finding description with disease references by id, as read from files.
#[derive(Debug, Clone, PartialEq)]
pub struct FindingSpec {
    pub id: String,
    pub name: Option<String>,
    pub leak: f64,
    pub edges: Vec<(String, f64)>,
}

#[derive(Debug, Clone, Default)]
pub struct NetworkBuilder {
    diseases: Vec<Disease>,
    findings: Vec<FindingSpec>,
}

impl NetworkBuilder {
    pub fn disease(mut self, id: impl Into<String>, prior: f64) -> Self {
        self.push_disease(Disease {
            id: id.into(),
            name: None,
            prior,
        });
        self
    }

    pub fn finding<I, S>(mut self, id: impl Into<String>, leak: f64, edges: I) -> Self
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        self.push_finding(FindingSpec {
            id: id.into(),
            name: None,
            leak,
            edges: edges.into_iter().map(|(d, p)| (d.into(), p)).collect(),
        });
        self
    }

    pub fn push_disease(&mut self, disease: Disease) -> &mut Self {
        self.diseases.push(disease);
        self
    }

    pub fn push_finding(&mut self, finding: FindingSpec) -> &mut Self {
        self.findings.push(finding);
        self
    }

    /// Validates every invariant and builds the dense network.
    pub fn build(self) -> Result<Network> {
        let mut violations = Vec::new();
        check_diseases(&self.diseases, &mut violations);

        let mut disease_index = HashMap::with_capacity(self.diseases.len());
        for (i, d) in self.diseases.iter().enumerate() {
            disease_index.entry(d.id.clone()).or_insert(i);
        }

        let mut finding_index = HashMap::with_capacity(self.findings.len());
        let mut findings = Vec::with_capacity(self.findings.len());
        for (j, spec) in self.findings.into_iter().enumerate() {
            if finding_index.insert(spec.id.clone(), j).is_some() {
                violations.push(Violation::DuplicateFindingId(spec.id.clone()));
            }
            if !in_unit(spec.leak) {
                violations.push(Violation::LeakOutOfRange {
                    finding: spec.id.clone(),
                    value: spec.leak,
                });
            }
            let mut links = Vec::with_capacity(spec.edges.len());
            let mut linked = HashSet::new();
            for (disease, p_cause) in spec.edges {
                if !in_unit(p_cause) {
                    violations.push(Violation::PCauseOutOfRange {
                        finding: spec.id.clone(),
                        disease: disease.clone(),
                        value: p_cause,
                    });
                }
                match disease_index.get(&disease) {
                    None => violations.push(Violation::UnknownDisease {
                        finding: spec.id.clone(),
                        disease,
                    }),
                    Some(&d) if !linked.insert(d) => violations.push(Violation::DuplicateEdge {
                        finding: spec.id.clone(),
                        disease,
                    }),
                    Some(&d) => links.push(Link {
                        disease: d,
                        p_cause,
                    }),
                }
            }
            findings.push(Finding {
                id: spec.id,
                name: spec.name,
                leak: spec.leak,
                links,
            });
        }

        if !violations.is_empty() {
            return Err(Error::Invalid(ValidationReport { violations }));
        }
        Ok(Network {
            diseases: self.diseases,
            findings,
            disease_index,
            finding_index,
        })
    }
}

fn in_unit(p: f64) -> bool {
    (0.0..=1.0).contains(&p)
}

fn check_diseases(diseases: &[Disease], out: &mut Vec<Violation>) {
    let mut seen = HashSet::new();
    for d in diseases {
        if !seen.insert(d.id.as_str()) {
            out.push(Violation::DuplicateDiseaseId(d.id.clone()));
        }
        if !in_unit(d.prior) {
            out.push(Violation::PriorOutOfRange {
                disease: d.id.clone(),
                value: d.prior,
            });
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    Positive,
    Negative,
}

/// Observed findings. Unlisted findings are unobserved.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Evidence {
    /// F+, in processing order when `order` is absent.
    pub positive: Vec<String>,
    /// F-, in processing order when `order` is absent.
    pub negative: Vec<String>,
    /// Optional total order over `positive` and `negative`.
    pub order: Option<Vec<String>>,
}

impl Evidence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_positive<I, S>(mut self, ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.positive.extend(ids.into_iter().map(Into::into));
        self
    }

    pub fn with_negative<I, S>(mut self, ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.negative.extend(ids.into_iter().map(Into::into));
        self
    }

    pub fn with_order<I, S>(mut self, ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.order = Some(ids.into_iter().map(Into::into).collect());
        self
    }

    pub fn is_empty(&self) -> bool {
        self.positive.is_empty() && self.negative.is_empty()
    }

    /// m+.
    pub fn n_positive(&self) -> usize {
        self.positive.len()
    }

    /// m-.
    pub fn n_negative(&self) -> usize {
        self.negative.len()
    }

    /// The sequence in which findings are incorporated: `order` when given,
    /// otherwise all negatives followed by all positives, each in list order.
    /// Assumes the evidence has been validated.
    pub fn sequence(&self) -> Vec<(&str, Polarity)> {
        match &self.order {
            Some(order) => {
                let positives: HashSet<&str> = self.positive.iter().map(String::as_str).collect();
                order
                    .iter()
                    .map(|id| {
                        let pol = if positives.contains(id.as_str()) {
                            Polarity::Positive
                        } else {
                            Polarity::Negative
                        };
                        (id.as_str(), pol)
                    })
                    .collect()
            }
            None => self
                .negative
                .iter()
                .map(|id| (id.as_str(), Polarity::Negative))
                .chain(
                    self.positive
                        .iter()
                        .map(|id| (id.as_str(), Polarity::Positive)),
                )
                .collect(),
        }
    }

    /// Validates against `network` and maps ids to dense finding indices in
    /// processing order.
    pub fn resolve(&self, network: &Network) -> Result<Observations> {
        let report = validate(network, self);
        if !report.is_valid() {
            return Err(Error::Invalid(report));
        }
        let mut obs = Observations::default();
        for (id, pol) in self.sequence() {
            let idx = network.finding_index(id).expect("validated finding id");
            match pol {
                Polarity::Positive => obs.positive.push(idx),
                Polarity::Negative => obs.negative.push(idx),
            }
        }
        Ok(obs)
    }
}

/// Evidence resolved to dense finding indices, each list in processing order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Observations {
    pub positive: Vec<usize>,
    pub negative: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    DuplicateDiseaseId(String),
    DuplicateFindingId(String),
    PriorOutOfRange {
        disease: String,
        value: f64,
    },
    LeakOutOfRange {
        finding: String,
        value: f64,
    },
    PCauseOutOfRange {
        finding: String,
        disease: String,
        value: f64,
    },
    UnknownDisease {
        finding: String,
        disease: String,
    },
    DuplicateEdge {
        finding: String,
        disease: String,
    },
    UnknownFinding(String),
    ObservedBothPolarities(String),
    DuplicateObservation(String),
    OrderNotPermutation(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            DuplicateDiseaseId(id) => write!(f, "duplicate disease id `{id}`"),
            DuplicateFindingId(id) => write!(f, "duplicate finding id `{id}`"),
            PriorOutOfRange { disease, value } => {
                write!(f, "prior out of range for disease `{disease}`: {value}")
            }
            LeakOutOfRange { finding, value } => {
                write!(f, "leak out of range for finding `{finding}`: {value}")
            }
            PCauseOutOfRange {
                finding,
                disease,
                value,
            } => write!(
                f,
                "p_cause out of range on edge `{disease}` -> `{finding}`: {value}"
            ),
            UnknownDisease { finding, disease } => {
                write!(f, "unknown disease id `{disease}` on finding `{finding}`")
            }
            DuplicateEdge { finding, disease } => {
                write!(f, "duplicate edge `{disease}` -> `{finding}`")
            }
            UnknownFinding(id) => write!(f, "unknown finding id `{id}`"),
            ObservedBothPolarities(id) => {
                write!(f, "finding observed both positive and negative: `{id}`")
            }
            DuplicateObservation(id) => write!(f, "finding `{id}` listed more than once"),
            OrderNotPermutation(why) => {
                write!(
                    f,
                    "order is not a permutation of the observed findings: {why}"
                )
            }
        }
    }
}

/// Every invariant violation found; empty means valid.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "  - {v}")?;
        }
        Ok(())
    }
}

/// Checks the network invariants and the evidence against the network.
pub fn validate(network: &Network, evidence: &Evidence) -> ValidationReport {
    let mut violations = network.violations();
    violations.extend(evidence_violations(evidence, |id| {
        network.finding_index(id).is_some()
    }));
    ValidationReport { violations }
}

impl Evidence {
    /// The checks that need no network: disjointness, duplicates and the
    /// shape of `order`.
    pub fn self_check(&self) -> ValidationReport {
        ValidationReport {
            violations: evidence_violations(self, |_| true),
        }
    }
}

fn evidence_violations(evidence: &Evidence, known: impl Fn(&str) -> bool) -> Vec<Violation> {
    let mut violations = Vec::new();
    let mut seen: HashMap<&str, Polarity> = HashMap::new();
    let observed = evidence
        .positive
        .iter()
        .map(|id| (id, Polarity::Positive))
        .chain(evidence.negative.iter().map(|id| (id, Polarity::Negative)));
    for (id, pol) in observed {
        if !known(id) {
            violations.push(Violation::UnknownFinding(id.clone()));
        }
        match seen.insert(id.as_str(), pol) {
            None => {}
            Some(prev) if prev == pol => {
                violations.push(Violation::DuplicateObservation(id.clone()))
            }
            Some(_) => violations.push(Violation::ObservedBothPolarities(id.clone())),
        }
    }

    if let Some(order) = &evidence.order {
        let mut in_order = HashSet::new();
        for id in order {
            if !seen.contains_key(id.as_str()) {
                violations.push(Violation::OrderNotPermutation(format!(
                    "`{id}` is not observed"
                )));
            } else if !in_order.insert(id.as_str()) {
                violations.push(Violation::OrderNotPermutation(format!(
                    "`{id}` appears twice"
                )));
            }
        }
        let mut missing: Vec<&str> = seen
            .keys()
            .copied()
            .filter(|id| !in_order.contains(id))
            .collect();
        missing.sort_unstable();
        for id in missing {
            violations.push(Violation::OrderNotPermutation(format!("`{id}` is missing")));
        }
    }
    violations
}

/// One assignment of present/absent to every disease, by dense index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiseaseInstance {
    present: Vec<bool>,
}

impl DiseaseInstance {
    pub fn none(n: usize) -> Self {
        Self {
            present: vec![false; n],
        }
    }

    /// Instance whose present set is the set bits of `mask` (bit i = disease i).
    pub fn from_mask(n: usize, mask: u64) -> Self {
        Self {
            present: (0..n).map(|i| mask >> i & 1 == 1).collect(),
        }
    }

    pub fn from_ids<'a>(network: &Network, ids: impl IntoIterator<Item = &'a str>) -> Option<Self> {
        let mut inst = Self::none(network.n_diseases());
        for id in ids {
            inst.present[network.disease_index(id)?] = true;
        }
        Some(inst)
    }

    pub fn is_present(&self, disease: usize) -> bool {
        self.present[disease]
    }

    pub fn set(&mut self, disease: usize, present: bool) {
        self.present[disease] = present;
    }

    pub fn len(&self) -> usize {
        self.present.len()
    }

    pub fn is_empty(&self) -> bool {
        self.present.is_empty()
    }

    pub fn present(&self) -> impl Iterator<Item = usize> + '_ {
        self.present
            .iter()
            .enumerate()
            .filter_map(|(i, &p)| p.then_some(i))
    }
}

/// p(f- | instance) under the leaky noisy-OR: the leak and every present
/// linked disease must all fail to produce the finding.
pub fn finding_absent_given_instance(
    network: &Network,
    finding: usize,
    instance: &DiseaseInstance,
) -> f64 {
    let f = network.finding(finding);
    f.links
        .iter()
        .filter(|l| instance.is_present(l.disease))
        .fold(1.0 - f.leak, |acc, l| acc * (1.0 - l.p_cause))
}

/// Id prefix of the virtual diseases introduced by
/// [`fold_leak_as_virtual_disease`].
pub const LEAK_DISEASE_PREFIX: &str = "leak:";

/// Replaces every leak with an always-present virtual disease that causes
/// only that finding with probability equal to the leak.
///
/// Virtual diseases are appended after the original diseases, so original
/// dense indices are preserved.
pub fn fold_leak_as_virtual_disease(network: &Network) -> Network {
    if network.findings.iter().all(|f| f.leak == 0.0) {
        return network.clone();
    }
    let mut diseases = network.diseases.clone();
    let mut disease_index = network.disease_index.clone();
    let mut findings = network.findings.clone();
    for f in &mut findings {
        if f.leak == 0.0 {
            continue;
        }
        let mut id = format!("{LEAK_DISEASE_PREFIX}{}", f.id);
        while disease_index.contains_key(&id) {
            id.push('\'');
        }
        let idx = diseases.len();
        disease_index.insert(id.clone(), idx);
        diseases.push(Disease {
            id,
            name: None,
            prior: 1.0,
        });
        f.links.push(Link {
            disease: idx,
            p_cause: f.leak,
        });
        f.leak = 0.0;
    }
    Network {
        diseases,
        findings,
        disease_index,
        finding_index: network.finding_index.clone(),
    }
}
