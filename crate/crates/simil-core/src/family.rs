//! State-indexed families of joint signal distributions with a common prior.
//!
//! Type invariant: every signal has positive marginal probability under the
//! prior mixture, so posteriors are defined at every signal.

use crate::dist::{JointDist, SigSet, SignalSpace};
use crate::error::{Result, SimilError};
use crate::linalg::affine_dependence;
use crate::num::{fmt_q, Q};
use num_traits::{One, Signed, Zero};

/// Ordered state labels with strictly increasing rational values.
pub type StateSpace = SignalSpace;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateFamily {
    states: StateSpace,
    prior: Vec<Q>,
    per_state: Vec<JointDist>,
}

/// Affine independence of the posterior vectors, with a certificate of
/// dependence when it fails.
#[derive(Debug, Clone)]
pub struct AffineIndependenceReport {
    pub posteriors: Vec<Vec<Q>>,
    pub independent: bool,
    /// Coefficients c (not all zero) with sum(c) = 0 and sum(c * posterior) = 0.
    pub dependence: Option<Vec<Q>>,
}

impl StateFamily {
    pub fn new(states: StateSpace, prior: Vec<Q>, per_state: Vec<JointDist>) -> Result<Self> {
        if prior.len() != states.n() || per_state.len() != states.n() {
            return Err(SimilError::Invalid(
                "prior and per-state lists must match the number of states".into(),
            ));
        }
        if prior.iter().any(|p| !p.is_positive()) {
            return Err(SimilError::Invalid("prior must be strictly positive".into()));
        }
        let total: Q = prior.iter().sum();
        if !total.is_one() {
            return Err(SimilError::Invalid(format!(
                "prior mass is {}, expected 1",
                fmt_q(&total)
            )));
        }
        let first = &per_state[0];
        for d in &per_state[1..] {
            first.check_compatible(d)?;
        }
        let fam = Self { states, prior, per_state };
        for s in 0..fam.space().n() {
            if fam.mix_marginal(s).is_zero() {
                return Err(SimilError::ZeroMarginal(format!(
                    "{} has zero probability under the prior mixture",
                    fam.space().label(s)
                )));
            }
        }
        Ok(fam)
    }

    pub fn states(&self) -> &StateSpace {
        &self.states
    }

    pub fn n_states(&self) -> usize {
        self.states.n()
    }

    pub fn prior(&self) -> &[Q] {
        &self.prior
    }

    pub fn per_state(&self, theta: usize) -> &JointDist {
        &self.per_state[theta]
    }

    pub fn space(&self) -> &SignalSpace {
        self.per_state[0].space()
    }

    pub fn players(&self) -> usize {
        self.per_state[0].players()
    }

    /// Prior mixture of the per-state distributions.
    pub fn mix(&self) -> JointDist {
        let mut entries: Vec<(Vec<usize>, Q)> = Vec::new();
        for (theta, d) in self.per_state.iter().enumerate() {
            for (key, m) in d.entries() {
                entries.push((key.clone(), m * &self.prior[theta]));
            }
        }
        JointDist::new(self.space().clone(), self.players(), entries)
            .expect("mixture of valid distributions is valid")
    }

    pub fn mix_marginal(&self, s: usize) -> Q {
        self.per_state
            .iter()
            .zip(&self.prior)
            .map(|(d, p)| d.marginal(s) * p)
            .sum()
    }

    /// Posterior over states at signal s.
    pub fn posterior(&self, s: usize) -> Vec<Q> {
        let denom = self.mix_marginal(s);
        self.per_state
            .iter()
            .zip(&self.prior)
            .map(|(d, p)| d.marginal(s) * p / &denom)
            .collect()
    }

    pub fn posterior_matrix(&self) -> Vec<Vec<Q>> {
        (0..self.space().n()).map(|s| self.posterior(s)).collect()
    }

    /// Expectation of a per-state payoff vector under the posterior at s.
    pub fn posterior_expectation(&self, s: usize, values: &[Q]) -> Q {
        self.posterior(s)
            .iter()
            .zip(values)
            .map(|(p, v)| p * v)
            .sum()
    }

    /// E[state value | signal s].
    pub fn expected_state(&self, s: usize) -> Q {
        self.posterior_expectation(s, self.states.values())
    }

    pub fn affine_independence(&self) -> AffineIndependenceReport {
        let posteriors = self.posterior_matrix();
        let dependence = affine_dependence(&posteriors);
        AffineIndependenceReport {
            independent: dependence.is_none(),
            posteriors,
            dependence,
        }
    }

    /// States where the two families put different joint distributions.
    pub fn differing_states(&self, other: &StateFamily) -> Vec<usize> {
        (0..self.n_states())
            .filter(|&t| self.per_state[t] != other.per_state[t])
            .collect()
    }

    /// First (state, signal) where per-state marginals differ.
    pub fn marginal_mismatch(&self, other: &StateFamily) -> Option<(usize, usize, Q, Q)> {
        for t in 0..self.n_states() {
            if let Some((s, a, b)) = self.per_state[t].marginal_mismatch(&other.per_state[t]) {
                return Some((t, s, a, b));
            }
        }
        None
    }

    pub fn check_compatible(&self, other: &StateFamily) -> Result<()> {
        if self.states != other.states {
            return Err(SimilError::Mismatch("state spaces differ".into()));
        }
        if self.prior != other.prior {
            return Err(SimilError::Mismatch("priors differ".into()));
        }
        self.per_state[0].check_compatible(&other.per_state[0])
    }

    /// Conditional of the prior mixture: P(other's signal in K | own s).
    pub fn mix_cond(&self, s: usize, k: SigSet) -> Result<Q> {
        self.mix().cond_prob(s, k)
    }

    /// Per-state conditional weighted by the posterior at s; equals the
    /// mixture conditional only when signals are state-independent, so use
    /// `mix_cond` for pivotal probabilities.
    pub fn state_cond(&self, theta: usize, s: usize, k: SigSet) -> Result<Q> {
        self.per_state[theta].cond_prob(s, k)
    }
}
