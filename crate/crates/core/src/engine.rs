//! Quickscore: exact p(F+, F-) and per-disease posteriors by
//! inclusion-exclusion over the subsets of the positive findings.
//!
//! For a subset S of F+, each disease contributes the factor
//! `t_i = q_i * p(d_i+) + p(d_i-)` where `q_i` is the product of
//! `1 - p_cause(d_i, f)` over `f` in `S ∪ F-`. The joint is
//!
//! ```text
//! p(F+, F-) = Σ_S (-1)^|S| · Π_{f ∈ S ∪ F-} (1 - leak_f) · Π_i t_i(S)
//! ```
//!
//! and the joint with disease i forced present replaces `t_i` by `q_i`.
//! Negative findings are folded into the `q_i` once, in O(n·m-); the subset
//! walk then costs O(n) per subset, O(n·2^m+) in total.
//!
//! Subsets are visited in reflected Gray-code order, so consecutive subsets
//! differ by one finding and every `q_i` is updated with a single multiply or
//! divide. The first 2^j subsets of the walk are exactly the subsets of the
//! first j positive findings, which is what lets a [`Session`] extend a
//! partial result instead of starting over.

use std::cell::Cell;

use crate::error::{CapKind, Error, Result};
use crate::model::{Evidence, Network, Observations, Polarity};
use crate::sum::NeumaierSum;

pub const DEFAULT_POSITIVE_CAP: usize = 24;

/// Joints in `[-INFEASIBLE_EPSILON, 0]` are reported as infeasible evidence.
pub const INFEASIBLE_EPSILON: f64 = 1e-12;

/// Joints and posteriors up to this far above 1 (or below 0, for
/// posteriors) are clamped back into range.
pub const RANGE_SLACK: f64 = 1e-9;

thread_local! {
    static SUBSET_TERMS: Cell<u64> = const { Cell::new(0) };
}

/// Number of inclusion-exclusion subset terms evaluated on this thread since
/// it started. Diagnostic counter for tests and benchmarks.
pub fn subset_terms_evaluated() -> u64 {
    SUBSET_TERMS.with(Cell::get)
}

fn count_terms(k: u64) {
    SUBSET_TERMS.with(|c| c.set(c.get() + k));
}

#[derive(Debug, Clone, PartialEq)]
pub struct InferenceResult {
    /// p(F+, F-).
    pub joint: f64,
    /// p(d+ | F+, F-) by dense disease index.
    pub posteriors: Vec<f64>,
    /// Subset terms summed, 2^m+.
    pub terms_evaluated: u64,
}

impl InferenceResult {
    /// Disease indices with posteriors, by descending posterior and then
    /// ascending disease id.
    pub fn ranked(&self, network: &Network) -> Vec<(usize, f64)> {
        let mut out: Vec<(usize, f64)> = self.posteriors.iter().copied().enumerate().collect();
        out.sort_by(|a, b| {
            b.1.total_cmp(&a.1)
                .then_with(|| network.disease(a.0).id.cmp(&network.disease(b.0).id))
        });
        out
    }

    pub fn posterior(&self, network: &Network, disease: &str) -> Option<f64> {
        network.disease_index(disease).map(|i| self.posteriors[i])
    }
}

/// Order in which the subsets of F+ are summed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SubsetOrder {
    /// Reflected Gray code with incremental q updates. Sessions use this order.
    #[default]
    Gray,
    /// Binary counting, each subset's q recomputed from the negative-only
    /// base. O(n + links) per subset; kept as a cross-check.
    Binary,
}

#[derive(Debug, Clone, Copy)]
pub struct Quickscore {
    pub positive_cap: usize,
    pub order: SubsetOrder,
}

impl Default for Quickscore {
    fn default() -> Self {
        Self {
            positive_cap: DEFAULT_POSITIVE_CAP,
            order: SubsetOrder::Gray,
        }
    }
}

impl Quickscore {
    pub fn with_cap(positive_cap: usize) -> Self {
        Self {
            positive_cap,
            ..Self::default()
        }
    }

    pub fn with_order(mut self, order: SubsetOrder) -> Self {
        self.order = order;
        self
    }

    pub fn check_positive_cap(&self, m_plus: usize) -> Result<()> {
        // subset codes live in a u64
        let cap = self.positive_cap.min(63);
        if m_plus > cap {
            return Err(Error::CapExceeded {
                kind: CapKind::PositiveFindings,
                count: m_plus,
                cap,
            });
        }
        Ok(())
    }

    pub fn score(&self, network: &Network, evidence: &Evidence) -> Result<InferenceResult> {
        self.check_positive_cap(evidence.n_positive())?;
        let obs = evidence.resolve(network)?;
        self.score_observations(network, &obs)
    }

    /// Scores already-resolved evidence. Negatives are folded and positives
    /// walked in the order given.
    pub fn score_observations(
        &self,
        network: &Network,
        obs: &Observations,
    ) -> Result<InferenceResult> {
        self.check_positive_cap(obs.positive.len())?;
        let mut base = Factors::unit(network);
        for &f in &obs.negative {
            base.fold(network, f);
        }
        let mut sums = match self.order {
            SubsetOrder::Gray => {
                let mut walk = GrayWalk::new(network, base);
                for &f in &obs.positive {
                    walk.push_positive(f);
                }
                walk.sums
            }
            SubsetOrder::Binary => binary_sums(network, &base, &obs.positive),
        };
        sums.uncausable = obs.positive.iter().any(|&f| network.is_uncausable(f));
        sums.finish(network)
    }

    pub fn session<'n>(&self, network: &'n Network) -> Session<'n> {
        Session::with_engine(network, *self)
    }
}

/// Scores with the default engine settings.
pub fn score(network: &Network, evidence: &Evidence) -> Result<InferenceResult> {
    Quickscore::default().score(network, evidence)
}

/// p(F-) for a set of negative findings as a single product over diseases.
/// Never enumerates subsets.
pub fn negative_marginal<S: AsRef<str>>(network: &Network, negatives: &[S]) -> Result<f64> {
    let evidence = Evidence::new().with_negative(negatives.iter().map(|s| s.as_ref()));
    let obs = evidence.resolve(network)?;
    let mut base = Factors::unit(network);
    for &f in &obs.negative {
        base.fold(network, f);
    }
    let mut product = 1.0;
    for (i, d) in network.diseases().iter().enumerate() {
        product *= base.q(i) * d.prior + (1.0 - d.prior);
    }
    Ok(base.leak() * product)
}

/// Running products of `1 - p_cause` per disease and `1 - leak` overall.
/// Zero factors are counted rather than multiplied in, so they can be
/// removed again without dividing by zero.
#[derive(Debug, Clone)]
struct Factors {
    q: Vec<f64>,
    q_zeros: Vec<u32>,
    /// `q` with the zero factors applied.
    effective: Vec<f64>,
    leak: f64,
    leak_zeros: u32,
}

impl Factors {
    fn unit(network: &Network) -> Self {
        let n = network.n_diseases();
        Self {
            q: vec![1.0; n],
            q_zeros: vec![0; n],
            effective: vec![1.0; n],
            leak: 1.0,
            leak_zeros: 0,
        }
    }

    #[inline]
    fn q(&self, i: usize) -> f64 {
        self.effective[i]
    }

    #[inline]
    fn leak(&self) -> f64 {
        if self.leak_zeros > 0 {
            0.0
        } else {
            self.leak
        }
    }

    fn fold(&mut self, network: &Network, finding: usize) {
        self.toggle(network, finding, true);
    }

    fn toggle(&mut self, network: &Network, finding: usize, include: bool) {
        let f = network.finding(finding);
        for l in &f.links {
            let i = l.disease;
            update(
                &mut self.q[i],
                &mut self.q_zeros[i],
                1.0 - l.p_cause,
                include,
            );
            self.effective[i] = if self.q_zeros[i] > 0 { 0.0 } else { self.q[i] };
        }
        update(&mut self.leak, &mut self.leak_zeros, 1.0 - f.leak, include);
    }
}

#[inline]
fn update(product: &mut f64, zeros: &mut u32, factor: f64, include: bool) {
    match (factor == 0.0, include) {
        (true, true) => *zeros += 1,
        (true, false) => *zeros -= 1,
        (false, true) => *product *= factor,
        (false, false) => *product /= factor,
    }
}

/// Compensated accumulators for the joint and the per-disease conditionals,
/// plus the scratch space a subset term needs.
#[derive(Debug, Clone)]
struct Sums {
    prior: Vec<f64>,
    absent: Vec<f64>,
    joint: NeumaierSum,
    /// Σ_S sign · leak · q_i · Π_{j≠i} t_j, i.e. p(F+, F- | d_i+).
    conditional: Vec<NeumaierSum>,
    terms: u64,
    uncausable: bool,
    t: Vec<f64>,
    prefix: Vec<f64>,
}

impl Sums {
    fn new(network: &Network) -> Self {
        let n = network.n_diseases();
        let prior: Vec<f64> = network.diseases().iter().map(|d| d.prior).collect();
        let absent = prior.iter().map(|p| 1.0 - p).collect();
        Self {
            prior,
            absent,
            joint: NeumaierSum::new(),
            conditional: vec![NeumaierSum::new(); n],
            terms: 0,
            uncausable: false,
            t: vec![0.0; n],
            prefix: vec![0.0; n + 1],
        }
    }

    /// Adds the term of one subset. `negate` is true for odd subsets.
    #[inline]
    fn accumulate(&mut self, factors: &Factors, negate: bool) {
        self.terms += 1;
        let leak = factors.leak();
        if leak == 0.0 {
            return;
        }
        let scale = if negate { -leak } else { leak };
        let n = self.prior.len();

        let q = &factors.effective[..n];
        let mut running = 1.0;
        self.prefix[0] = 1.0;
        let terms = q.iter().zip(&self.prior).zip(&self.absent);
        for (((&q, &prior), &absent), (t, p)) in
            terms.zip(self.t.iter_mut().zip(&mut self.prefix[1..]))
        {
            *t = q * prior + absent;
            running *= *t;
            *p = running;
        }
        self.joint.add(scale * running);

        // all-but-one products from prefix and suffix, no division by t_i
        let mut suffix = 1.0;
        for i in (0..n).rev() {
            self.conditional[i].add(scale * (self.prefix[i] * suffix) * q[i]);
            suffix *= self.t[i];
        }
    }

    fn finish(&self, network: &Network) -> Result<InferenceResult> {
        if self.uncausable {
            return Err(Error::InfeasibleEvidence);
        }
        let mut joint = self.joint.value();
        if joint <= 0.0 || joint.is_nan() {
            // includes the [-INFEASIBLE_EPSILON, 0) rounding band
            return Err(Error::InfeasibleEvidence);
        }
        if joint > 1.0 && joint <= 1.0 + RANGE_SLACK {
            joint = 1.0;
        }
        let posteriors = network
            .diseases()
            .iter()
            .zip(&self.conditional)
            .map(|(d, c)| {
                if d.prior == 0.0 {
                    0.0
                } else if d.prior == 1.0 {
                    1.0
                } else {
                    clamp_unit(d.prior * c.value() / joint)
                }
            })
            .collect();
        Ok(InferenceResult {
            joint,
            posteriors,
            terms_evaluated: self.terms,
        })
    }
}

fn clamp_unit(p: f64) -> f64 {
    if (-RANGE_SLACK..0.0).contains(&p) {
        0.0
    } else if p > 1.0 && p <= 1.0 + RANGE_SLACK {
        1.0
    } else {
        p
    }
}

/// Gray-code walk over the subsets of the positive findings pushed so far.
#[derive(Debug, Clone)]
struct GrayWalk<'n> {
    network: &'n Network,
    factors: Factors,
    positives: Vec<usize>,
    /// Bit j set when positives[j] is in the current subset.
    code: u64,
    sums: Sums,
}

impl<'n> GrayWalk<'n> {
    fn new(network: &'n Network, base: Factors) -> Self {
        let mut walk = Self {
            network,
            factors: base,
            positives: Vec::new(),
            code: 0,
            sums: Sums::new(network),
        };
        walk.sums.accumulate(&walk.factors, false);
        count_terms(1);
        walk
    }

    /// Extends the walk to the subsets containing `finding`: 2^j new terms
    /// when j positives were already present.
    fn push_positive(&mut self, finding: usize) {
        let bit = self.positives.len();
        self.positives.push(finding);
        let end = 1u64 << (bit + 1);
        let start = self.sums.terms;
        debug_assert_eq!(start, 1u64 << bit);
        for k in start..end {
            let flip = k.trailing_zeros() as usize;
            let include = self.code >> flip & 1 == 0;
            self.code ^= 1 << flip;
            self.factors
                .toggle(self.network, self.positives[flip], include);
            self.sums
                .accumulate(&self.factors, self.code.count_ones() & 1 == 1);
        }
        count_terms(end - start);
    }
}

fn binary_sums(network: &Network, base: &Factors, positives: &[usize]) -> Sums {
    let mut sums = Sums::new(network);
    let total = 1u64 << positives.len();
    for code in 0..total {
        let mut factors = base.clone();
        for (j, &f) in positives.iter().enumerate() {
            if code >> j & 1 == 1 {
                factors.fold(network, f);
            }
        }
        sums.accumulate(&factors, code.count_ones() & 1 == 1);
    }
    count_terms(total);
    sums
}

/// Incremental scoring: findings are incorporated one at a time and the
/// current result is available after each one.
///
/// A positive finding extends the Gray-code walk by the 2^j subsets that
/// contain it. A negative finding is folded into the base products, after
/// which the walk over the positives so far is replayed. Either way the
/// result after each step is bit-identical to batch scoring of the
/// incorporated findings.
#[derive(Debug, Clone)]
pub struct Session<'n> {
    network: &'n Network,
    engine: Quickscore,
    base: Factors,
    walk: GrayWalk<'n>,
    incorporated: Vec<(usize, Polarity)>,
    seen: Vec<bool>,
    uncausable: bool,
    hint: Vec<usize>,
}

impl<'n> Session<'n> {
    pub fn new(network: &'n Network) -> Self {
        Self::with_engine(network, Quickscore::default())
    }

    pub fn with_engine(network: &'n Network, engine: Quickscore) -> Self {
        let base = Factors::unit(network);
        Self {
            network,
            engine,
            walk: GrayWalk::new(network, base.clone()),
            base,
            incorporated: Vec::new(),
            seen: vec![false; network.n_findings()],
            uncausable: false,
            hint: Vec::new(),
        }
    }

    pub fn network(&self) -> &'n Network {
        self.network
    }

    /// Incorporates one finding and returns the updated result.
    ///
    /// A finding that makes the evidence infeasible is still incorporated;
    /// the error is returned now and by every later [`Session::result`].
    /// A finding rejected for the positive cap is not incorporated.
    pub fn add(&mut self, finding: &str, polarity: Polarity) -> Result<InferenceResult> {
        let idx = self
            .network
            .finding_index(finding)
            .ok_or_else(|| Error::UnknownFinding(finding.to_string()))?;
        if self.seen[idx] {
            return Err(Error::DuplicateFinding(finding.to_string()));
        }
        match polarity {
            Polarity::Positive => {
                self.engine
                    .check_positive_cap(self.walk.positives.len() + 1)?;
                self.walk.push_positive(idx);
                self.uncausable |= self.network.is_uncausable(idx);
            }
            Polarity::Negative => {
                self.base.fold(self.network, idx);
                let positives = std::mem::take(&mut self.walk.positives);
                self.walk = GrayWalk::new(self.network, self.base.clone());
                for f in positives {
                    self.walk.push_positive(f);
                }
            }
        }
        self.seen[idx] = true;
        self.incorporated.push((idx, polarity));
        self.result()
    }

    pub fn add_positive(&mut self, finding: &str) -> Result<InferenceResult> {
        self.add(finding, Polarity::Positive)
    }

    pub fn add_negative(&mut self, finding: &str) -> Result<InferenceResult> {
        self.add(finding, Polarity::Negative)
    }

    pub fn result(&self) -> Result<InferenceResult> {
        let mut sums = self.walk.sums.clone();
        sums.uncausable = self.uncausable;
        sums.finish(self.network)
    }

    /// Current joint without the feasibility check.
    pub fn joint(&self) -> f64 {
        if self.uncausable {
            0.0
        } else {
            self.walk.sums.joint.value()
        }
    }

    /// Findings incorporated so far, in order, as dense indices.
    pub fn incorporated(&self) -> &[(usize, Polarity)] {
        &self.incorporated
    }

    /// The incorporated findings as evidence in incorporation order.
    pub fn evidence(&self) -> Evidence {
        let mut ev = Evidence::new();
        let mut order = Vec::with_capacity(self.incorporated.len());
        for &(f, pol) in &self.incorporated {
            let id = self.network.finding(f).id.clone();
            match pol {
                Polarity::Positive => ev.positive.push(id.clone()),
                Polarity::Negative => ev.negative.push(id.clone()),
            }
            order.push(id);
        }
        ev.order = Some(order);
        ev
    }

    pub fn reset(&mut self) {
        let hint = std::mem::take(&mut self.hint);
        *self = Self::with_engine(self.network, self.engine);
        self.hint = hint;
    }

    /// Records a caller-chosen processing order, e.g. findings ranked by
    /// clinical importance. The session never reorders on its own; the hint
    /// only drives [`Session::next_hinted`].
    pub fn order_hint<S: AsRef<str>>(&mut self, order: &[S]) -> Result<()> {
        let mut hint = Vec::with_capacity(order.len());
        for id in order {
            let id = id.as_ref();
            let idx = self
                .network
                .finding_index(id)
                .ok_or_else(|| Error::UnknownFinding(id.to_string()))?;
            if hint.contains(&idx) {
                return Err(Error::DuplicateFinding(id.to_string()));
            }
            hint.push(idx);
        }
        self.hint = hint;
        Ok(())
    }

    /// First finding of the order hint not yet incorporated.
    pub fn next_hinted(&self) -> Option<&'n str> {
        self.hint
            .iter()
            .find(|&&f| !self.seen[f])
            .map(|&f| self.network.finding(f).id.as_str())
    }

    /// Incorporates `evidence` in its processing order, returning the
    /// intermediate result after each finding.
    pub fn replay(&mut self, evidence: &Evidence) -> Result<Vec<Result<InferenceResult>>> {
        let report = crate::model::validate(self.network, evidence);
        if !report.is_valid() {
            return Err(Error::Invalid(report));
        }
        Ok(evidence
            .sequence()
            .into_iter()
            .map(|(id, pol)| self.add(id, pol))
            .collect())
    }
}
