//! Brute-force reference inference: sums the evidence likelihood over every
//! one of the 2^n disease instances.
//!
//! Nothing here is clever on purpose. It shares only the noisy-OR likelihood
//! ([`finding_absent_given_instance`]) with the rest of the crate and is the
//! ground truth the quickscore engine is tested against.

use crate::error::{CapKind, Error, Result};
use crate::model::{finding_absent_given_instance, DiseaseInstance, Evidence, Network};
use crate::sum::NeumaierSum;

pub const DEFAULT_DISEASE_CAP: usize = 20;

/// Disease count from which [`Summation::Auto`] switches to compensated sums.
pub const COMPENSATED_FROM: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Summation {
    /// Plain below [`COMPENSATED_FROM`] diseases, compensated from there on.
    #[default]
    Auto,
    Plain,
    Compensated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// p(F+, F-).
    pub joint: f64,
    /// p(d+ | F+, F-) by dense disease index.
    pub posteriors: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct Oracle {
    pub disease_cap: usize,
    pub summation: Summation,
}

impl Default for Oracle {
    fn default() -> Self {
        Self {
            disease_cap: DEFAULT_DISEASE_CAP,
            summation: Summation::Auto,
        }
    }
}

enum Acc {
    Plain(f64),
    Compensated(NeumaierSum),
}

impl Acc {
    fn add(&mut self, x: f64) {
        match self {
            Acc::Plain(s) => *s += x,
            Acc::Compensated(s) => s.add(x),
        }
    }

    fn value(&self) -> f64 {
        match self {
            Acc::Plain(s) => *s,
            Acc::Compensated(s) => s.value(),
        }
    }
}

impl Oracle {
    pub fn with_cap(disease_cap: usize) -> Self {
        Self {
            disease_cap,
            ..Self::default()
        }
    }

    fn accumulator(&self, n: usize) -> Acc {
        let compensated = match self.summation {
            Summation::Auto => n >= COMPENSATED_FROM,
            Summation::Plain => false,
            Summation::Compensated => true,
        };
        if compensated {
            Acc::Compensated(NeumaierSum::new())
        } else {
            Acc::Plain(0.0)
        }
    }

    fn check_cap(&self, network: &Network) -> Result<()> {
        let n = network.n_diseases();
        // 2^n must also fit the instance mask
        if n > self.disease_cap || n >= 64 {
            return Err(Error::CapExceeded {
                kind: CapKind::Diseases,
                count: n,
                cap: self.disease_cap.min(63),
            });
        }
        Ok(())
    }

    /// Calls `visit(instance, weight)` for every disease instance, where
    /// weight = p(instance) * p(evidence | instance).
    fn enumerate(
        &self,
        network: &Network,
        evidence: &Evidence,
        mut visit: impl FnMut(&DiseaseInstance, f64),
    ) -> Result<()> {
        self.check_cap(network)?;
        let obs = evidence.resolve(network)?;
        let n = network.n_diseases();
        let mut inst = DiseaseInstance::none(n);
        for mask in 0..(1u64 << n) {
            for i in 0..n {
                inst.set(i, mask >> i & 1 == 1);
            }
            let mut w = 1.0;
            for (i, d) in network.diseases().iter().enumerate() {
                w *= if inst.is_present(i) {
                    d.prior
                } else {
                    1.0 - d.prior
                };
            }
            for &f in &obs.negative {
                w *= finding_absent_given_instance(network, f, &inst);
            }
            for &f in &obs.positive {
                w *= 1.0 - finding_absent_given_instance(network, f, &inst);
            }
            visit(&inst, w);
        }
        Ok(())
    }

    /// p(F+, F-) by explicit enumeration.
    pub fn joint(&self, network: &Network, evidence: &Evidence) -> Result<f64> {
        if evidence.is_empty() {
            self.check_cap(network)?;
            evidence.resolve(network)?;
            return Ok(1.0);
        }
        let mut acc = self.accumulator(network.n_diseases());
        self.enumerate(network, evidence, |_, w| acc.add(w))?;
        Ok(acc.value())
    }

    /// Joint and per-disease posteriors by explicit enumeration.
    pub fn posteriors(&self, network: &Network, evidence: &Evidence) -> Result<OracleResult> {
        let n = network.n_diseases();
        if evidence.is_empty() {
            self.check_cap(network)?;
            evidence.resolve(network)?;
            return Ok(OracleResult {
                joint: 1.0,
                posteriors: network.diseases().iter().map(|d| d.prior).collect(),
            });
        }
        let mut joint = self.accumulator(n);
        let mut with_disease: Vec<Acc> = (0..n).map(|_| self.accumulator(n)).collect();
        self.enumerate(network, evidence, |inst, w| {
            joint.add(w);
            for i in inst.present() {
                with_disease[i].add(w);
            }
        })?;
        let joint = joint.value();
        if joint <= 0.0 {
            return Err(Error::InfeasibleEvidence);
        }
        Ok(OracleResult {
            joint,
            posteriors: with_disease.iter().map(|a| a.value() / joint).collect(),
        })
    }

    /// Sum of p(instance) over all 2^n instances; 1 up to rounding.
    pub fn total_prior_mass(&self, network: &Network) -> Result<f64> {
        let mut acc = self.accumulator(network.n_diseases());
        self.enumerate(network, &Evidence::new(), |_, w| acc.add(w))?;
        Ok(acc.value())
    }
}

/// p(F+, F-) with the default oracle settings.
pub fn oracle_joint(network: &Network, evidence: &Evidence) -> Result<f64> {
    Oracle::default().joint(network, evidence)
}

/// Posteriors with the default oracle settings.
pub fn oracle_posteriors(network: &Network, evidence: &Evidence) -> Result<OracleResult> {
    Oracle::default().posteriors(network, evidence)
}
