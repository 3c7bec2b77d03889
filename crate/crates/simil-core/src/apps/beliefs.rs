//! Iterated belief operators over product events for two players: one
//! application keeps a signal when the conditional mass of the opponent's
//! event clears that signal's threshold, and fixpoints of the iteration
//! give the rationalizable invest and not-invest sets.

use crate::dist::{JointDist, SigSet};
use crate::error::{Result, SimilError};
use crate::num::Q;
use num_traits::{One, Zero};

/// Product event with per-player thresholds. Iterating `step` shrinks the
/// event sets weakly, so a fixpoint is reached after at most one pass per
/// dropped signal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BeliefState {
    pub e1: SigSet,
    pub e2: SigSet,
    pub phi1: Vec<Q>,
    pub phi2: Vec<Q>,
}

impl BeliefState {
    pub fn step(&self, dist: &JointDist) -> Result<BeliefState> {
        let (e1, e2) =
            belief_step(dist, self.e1, self.e2, &self.phi1, &self.phi2)?;
        Ok(BeliefState { e1, e2, phi1: self.phi1.clone(), phi2: self.phi2.clone() })
    }
}

/// One application of the two-player belief operator: player i keeps
/// signal s in E_i when P(opponent's signal in E_j | s) >= phi_i(s).
/// Both players update simultaneously from the same input sets.
pub fn belief_step(
    dist: &JointDist,
    e1: SigSet,
    e2: SigSet,
    phi1: &[Q],
    phi2: &[Q],
) -> Result<(SigSet, SigSet)> {
    if dist.players() != 2 {
        return Err(SimilError::Unsupported(
            "belief operators are defined for two players".into(),
        ));
    }
    let n = dist.space().n();
    if phi1.len() != n || phi2.len() != n {
        return Err(SimilError::Invalid("thresholds need one entry per signal".into()));
    }
    let keep = |own: SigSet, other: SigSet, phi: &[Q]| -> Result<SigSet> {
        let mut kept = SigSet::empty();
        for s in own.iter() {
            if dist.marginal(s).is_zero() {
                return Err(SimilError::ZeroMarginal(format!(
                    "event contains zero-marginal signal {}",
                    dist.space().label(s)
                )));
            }
            if dist.cond_prob(s, other)? >= phi[s] {
                kept = kept.with(s);
            }
        }
        Ok(kept)
    };
    Ok((keep(e1, e2, phi1)?, keep(e2, e1, phi2)?))
}

/// Iterates the operator to its fixpoint; returns the limit sets and the
/// number of strict refinements taken.
pub fn common_belief_fixpoint(
    dist: &JointDist,
    mut e1: SigSet,
    mut e2: SigSet,
    phi1: &[Q],
    phi2: &[Q],
) -> Result<(SigSet, SigSet, usize)> {
    let mut iterations = 0;
    loop {
        let (n1, n2) = belief_step(dist, e1, e2, phi1, phi2)?;
        if n1 == e1 && n2 == e2 {
            return Ok((e1, e2, iterations));
        }
        e1 = n1;
        e2 = n2;
        iterations += 1;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalizableReport {
    pub invest: (SigSet, SigSet),
    pub not_invest: (SigSet, SigSet),
    pub invest_iterations: usize,
    pub not_invest_iterations: usize,
}

/// Rationalizable action sets of the symmetric invest game with opponent
/// participation threshold x(s): investing survives under thresholds
/// 1 - x, not investing under thresholds x. Iteration starts from the
/// support, since events never contain unrealizable signals.
pub fn rationalizable_sets(dist: &JointDist, x: &[Q]) -> Result<RationalizableReport> {
    if dist.players() != 2 {
        return Err(SimilError::Unsupported(
            "rationalizability is implemented for two players".into(),
        ));
    }
    let n = dist.space().n();
    if x.len() != n {
        return Err(SimilError::Invalid("thresholds need one entry per signal".into()));
    }
    let mut start = SigSet::empty();
    for s in 0..n {
        if !dist.marginal(s).is_zero() {
            start = start.with(s);
        }
    }
    let invest_phi: Vec<Q> = x.iter().map(|v| Q::one() - v).collect();
    let (i1, i2, invest_iterations) =
        common_belief_fixpoint(dist, start, start, &invest_phi, &invest_phi)?;
    let (n1, n2, not_invest_iterations) =
        common_belief_fixpoint(dist, start, start, x, x)?;
    Ok(RationalizableReport {
        invest: (i1, i2),
        not_invest: (n1, n2),
        invest_iterations,
        not_invest_iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{diagonal_mixture, SignalSpace};
    use crate::num::{q, qi};

    fn space2() -> SignalSpace {
        SignalSpace::from_values(vec![qi(0), qi(1)]).unwrap()
    }

    fn uniform2() -> JointDist {
        JointDist::new(
            space2(),
            2,
            vec![
                (vec![0, 0], q(1, 4)),
                (vec![0, 1], q(1, 2)),
                (vec![1, 1], q(1, 4)),
            ],
        )
        .unwrap()
    }

    fn correlated2() -> JointDist {
        JointDist::new(
            space2(),
            2,
            vec![(vec![0, 0], q(1, 2)), (vec![1, 1], q(1, 2))],
        )
        .unwrap()
    }

    #[test]
    fn vacuous_threshold_keeps_everything() {
        let d = uniform2();
        let full = SigSet::full(2);
        let zero = vec![qi(0), qi(0)];
        let (a, b) = belief_step(&d, full, full, &zero, &zero).unwrap();
        assert_eq!((a, b), (full, full));
    }

    #[test]
    fn impossible_threshold_empties_everything() {
        let d = uniform2();
        let full = SigSet::full(2);
        let phi = vec![q(101, 100), q(101, 100)];
        let (a, b) = belief_step(&d, full, full, &phi, &phi).unwrap();
        assert!(a.is_empty() && b.is_empty());
    }

    #[test]
    fn certain_match_is_a_fixed_point() {
        let d = correlated2();
        let e = SigSet::singleton(1);
        let one = vec![qi(1), qi(1)];
        let (a, b) = belief_step(&d, e, e, &one, &one).unwrap();
        assert_eq!((a, b), (e, e));
    }

    #[test]
    fn zero_marginal_inside_event_is_an_error() {
        let space3 = SignalSpace::from_values(vec![qi(0), qi(1), qi(2)]).unwrap();
        let d3 = JointDist::new(
            space3,
            2,
            vec![(vec![0, 0], q(1, 2)), (vec![1, 1], q(1, 2))],
        )
        .unwrap();
        let full = SigSet::full(3);
        let zero = vec![qi(0); 3];
        assert!(matches!(
            belief_step(&d3, full, full, &zero, &zero),
            Err(SimilError::ZeroMarginal(_))
        ));
    }

    #[test]
    fn operator_is_monotone_in_the_event() {
        let d = uniform2();
        let phi = vec![q(1, 2), q(1, 2)];
        let small = SigSet::singleton(1);
        let big = SigSet::full(2);
        let (s1, s2) = belief_step(&d, small, small, &phi, &phi).unwrap();
        let (b1, b2) = belief_step(&d, big, big, &phi, &phi).unwrap();
        assert!(s1.is_subset_of(b1) && s2.is_subset_of(b2));
    }

    #[test]
    fn dominant_investment_keeps_the_full_set() {
        let d = uniform2();
        let x = vec![qi(1), q(3, 2)];
        let report = rationalizable_sets(&d, &x).unwrap();
        assert_eq!(report.invest, (SigSet::full(2), SigSet::full(2)));
        assert_eq!(report.invest_iterations, 0);
    }

    #[test]
    fn negative_threshold_empties_invest_immediately() {
        let d = uniform2();
        let x = vec![q(-1, 10), q(-1, 10)];
        let report = rationalizable_sets(&d, &x).unwrap();
        assert!(report.invest.0.is_empty());
        assert_eq!(report.invest_iterations, 1);
    }

    #[test]
    fn matching_boost_enlarges_the_invest_set() {
        let space = space2();
        let skewed = JointDist::new(
            space,
            2,
            vec![
                (vec![0, 0], q(9, 25)),
                (vec![0, 1], q(12, 25)),
                (vec![1, 1], q(4, 25)),
            ],
        )
        .unwrap();
        let x = vec![qi(-1), q(1, 2)];
        let base = rationalizable_sets(&skewed, &x).unwrap();
        // Conditional of a match at the high signal is 2/5 < 1/2: invest
        // unravels completely.
        assert!(base.invest.0.is_empty());
        // Mixing toward the diagonal lifts that conditional to 7/10.
        let mixed = diagonal_mixture(&skewed, &q(1, 2)).unwrap();
        let boosted = rationalizable_sets(&mixed, &x).unwrap();
        assert_eq!(boosted.invest.0, SigSet::singleton(1));
        assert!(base.invest.0.is_subset_of(boosted.invest.0));
    }

    #[test]
    fn fixpoint_reached_within_signal_count() {
        let d = uniform2();
        let x = vec![q(1, 3), q(1, 2)];
        let report = rationalizable_sets(&d, &x).unwrap();
        assert!(report.invest_iterations <= 2);
        assert!(report.not_invest_iterations <= 2);
    }
}
