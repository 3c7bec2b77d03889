//! Second-price auction revenue for two bidders, and decomposition of a
//! distribution pair into elementary transfers that move mass from a
//! mixed signal pair onto its two matched diagonal cells.

use crate::dist::{apply_eti, JointDist};
use crate::error::{Result, SimilError};
use crate::num::Q;
use num_traits::Zero;

/// One elementary transfer: mass `magnitude` moves from each ordered cell
/// (s, s') and (s', s) onto the diagonal cells (s, s) and (s', s').
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EtiStep {
    pub s: usize,
    pub s_prime: usize,
    pub magnitude: Q,
}

/// Result of decomposing F against G: either the per-cell transfer steps
/// whose net application to G reproduces F, or the first ordered cell
/// where F carries more off-diagonal mass than G.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EtiOutcome {
    Steps(Vec<EtiStep>),
    Blocked { s: usize, s_prime: usize, f_mass: Q, g_mass: Q },
}

/// Expected revenue E[min(s1, s2)] under truthful bidding: the price is
/// the second-highest reported value.
pub fn auction_revenue(dist: &JointDist) -> Result<Q> {
    if dist.players() != 2 {
        return Err(SimilError::Unsupported(
            "auction revenue is defined for two bidders".into(),
        ));
    }
    let mut total = Q::zero();
    for (key, mass) in dist.entries() {
        total += dist.space().value(key[0]) * mass;
    }
    Ok(total)
}

/// Per-cell decomposition: step magnitudes are G(s,s') - F(s,s') on
/// ordered cells with s < s'. Succeeds exactly when no off-diagonal cell
/// gained mass, which for two exchangeable players with equal marginals
/// is the pairwise similarity order.
pub fn eti_decompose(f: &JointDist, g: &JointDist) -> Result<EtiOutcome> {
    f.check_compatible(g)?;
    if f.players() != 2 {
        return Err(SimilError::Unsupported(
            "the decomposition is defined for two players".into(),
        ));
    }
    if let Some((s, lhs, rhs)) = f.marginal_mismatch(g) {
        return Err(SimilError::Mismatch(format!(
            "marginals differ at {}: {} vs {}",
            f.space().label(s),
            crate::num::fmt_q(&lhs),
            crate::num::fmt_q(&rhs)
        )));
    }
    let n = f.space().n();
    let mut steps = Vec::new();
    for s in 0..n {
        for s_prime in (s + 1)..n {
            let f_mass = f.ordered_prob(&[s, s_prime]);
            let g_mass = g.ordered_prob(&[s, s_prime]);
            if f_mass > g_mass {
                return Ok(EtiOutcome::Blocked { s, s_prime, f_mass, g_mass });
            }
            let magnitude = &g_mass - &f_mass;
            if !magnitude.is_zero() {
                steps.push(EtiStep { s, s_prime, magnitude });
            }
        }
    }
    Ok(EtiOutcome::Steps(steps))
}

/// Net application of a step sequence; each intermediate must remain a
/// valid distribution, which holds automatically for per-cell steps.
pub fn eti_apply_all(g: &JointDist, steps: &[EtiStep]) -> Result<JointDist> {
    let mut current = g.clone();
    for step in steps {
        current = apply_eti(&current, step.s, step.s_prime, &step.magnitude)?;
    }
    Ok(current)
}

/// Reorders (and if necessary splits) steps so that every prefix applies
/// to a valid distribution, reporting failure when no remaining step has
/// any feasible mass to move.
pub fn eti_prefix_valid_sequence(g: &JointDist, steps: &[EtiStep]) -> Result<Vec<EtiStep>> {
    let mut current = g.clone();
    let mut remaining: Vec<EtiStep> =
        steps.iter().filter(|st| !st.magnitude.is_zero()).cloned().collect();
    let mut out = Vec::new();
    let cap = 4 * (remaining.len() + 1) * (remaining.len() + 1);
    let mut rounds = 0;
    while !remaining.is_empty() {
        rounds += 1;
        if rounds > cap {
            return Err(SimilError::Unsupported(
                "could not sequence the steps with valid prefixes".into(),
            ));
        }
        let two = Q::from_integer(2.into());
        let feasible: Vec<Q> = remaining
            .iter()
            .map(|st| current.multiset_mass(&[st.s, st.s_prime]) / &two)
            .collect();
        if let Some(i) = remaining
            .iter()
            .enumerate()
            .position(|(i, st)| feasible[i] >= st.magnitude)
        {
            let st = remaining.remove(i);
            current = apply_eti(&current, st.s, st.s_prime, &st.magnitude)?;
            out.push(st);
            continue;
        }
        let best = (0..remaining.len()).max_by(|a, b| feasible[*a].cmp(&feasible[*b])).unwrap();
        if feasible[best].is_zero() {
            return Err(SimilError::Unsupported(
                "could not sequence the steps with valid prefixes".into(),
            ));
        }
        let amount = feasible[best].clone();
        let st = &mut remaining[best];
        current = apply_eti(&current, st.s, st.s_prime, &amount)?;
        out.push(EtiStep { s: st.s, s_prime: st.s_prime, magnitude: amount.clone() });
        st.magnitude -= amount;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{diagonal_mixture, SignalSpace};
    use crate::num::{q, qi};
    use crate::orders::check_cad;

    fn uniform2() -> JointDist {
        let space = SignalSpace::from_values(vec![qi(0), qi(1)]).unwrap();
        JointDist::new(
            space,
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
        let space = SignalSpace::from_values(vec![qi(0), qi(1)]).unwrap();
        JointDist::new(
            space,
            2,
            vec![(vec![0, 0], q(1, 2)), (vec![1, 1], q(1, 2))],
        )
        .unwrap()
    }

    #[test]
    fn revenue_is_expected_low_bid() {
        assert_eq!(auction_revenue(&uniform2()).unwrap(), q(1, 4));
        assert_eq!(auction_revenue(&correlated2()).unwrap(), q(1, 2));
    }

    #[test]
    fn one_step_decomposition_and_exact_revenue_shift() {
        let g = uniform2();
        let f = diagonal_mixture(&g, &q(1, 2)).unwrap();
        let outcome = eti_decompose(&f, &g).unwrap();
        let steps = match outcome {
            EtiOutcome::Steps(s) => s,
            other => panic!("expected steps, got {other:?}"),
        };
        assert_eq!(steps, vec![EtiStep { s: 0, s_prime: 1, magnitude: q(1, 8) }]);
        let rebuilt = eti_apply_all(&g, &steps).unwrap();
        assert_eq!(rebuilt.entries().collect::<Vec<_>>(), f.entries().collect::<Vec<_>>());
        let shift = auction_revenue(&f).unwrap() - auction_revenue(&g).unwrap();
        assert_eq!(shift, q(1, 8) * (qi(1) - qi(0)));
    }

    #[test]
    fn identical_pair_decomposes_to_nothing() {
        let g = uniform2();
        match eti_decompose(&g, &g).unwrap() {
            EtiOutcome::Steps(steps) => assert!(steps.is_empty()),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn reversed_pair_is_blocked_at_the_gaining_cell() {
        let g = uniform2();
        let f = diagonal_mixture(&g, &q(1, 2)).unwrap();
        match eti_decompose(&g, &f).unwrap() {
            EtiOutcome::Blocked { s, s_prime, f_mass, g_mass } => {
                assert_eq!((s, s_prime), (0, 1));
                assert_eq!(f_mass, q(1, 4));
                assert_eq!(g_mass, q(1, 8));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn decomposition_succeeds_exactly_when_the_order_holds() {
        let g = uniform2();
        let f = diagonal_mixture(&g, &q(1, 3)).unwrap();
        assert!(check_cad(&f, &g).unwrap().holds);
        assert!(matches!(eti_decompose(&f, &g).unwrap(), EtiOutcome::Steps(_)));
        assert!(!check_cad(&g, &f).unwrap().holds);
        assert!(matches!(eti_decompose(&g, &f).unwrap(), EtiOutcome::Blocked { .. }));
    }

    #[test]
    fn prefix_valid_mode_applies_cleanly() {
        let space = SignalSpace::from_values(vec![qi(0), qi(1), qi(2)]).unwrap();
        let g = JointDist::new(
            space,
            2,
            vec![
                (vec![0, 1], q(1, 4)),
                (vec![1, 2], q(1, 4)),
                (vec![0, 2], q(1, 4)),
                (vec![1, 1], q(1, 4)),
            ],
        )
        .unwrap();
        let steps = vec![
            EtiStep { s: 0, s_prime: 1, magnitude: q(1, 16) },
            EtiStep { s: 1, s_prime: 2, magnitude: q(1, 16) },
            EtiStep { s: 0, s_prime: 2, magnitude: q(1, 8) },
        ];
        let ordered = eti_prefix_valid_sequence(&g, &steps).unwrap();
        let direct = eti_apply_all(&g, &steps).unwrap();
        let via_ordered = eti_apply_all(&g, &ordered).unwrap();
        assert_eq!(
            direct.entries().collect::<Vec<_>>(),
            via_ordered.entries().collect::<Vec<_>>()
        );
        assert_eq!(
            auction_revenue(&direct).unwrap() - auction_revenue(&g).unwrap(),
            q(1, 16) + q(1, 16) + q(1, 8) * qi(2)
        );
    }

    #[test]
    fn marginal_mismatch_is_rejected() {
        let g = uniform2();
        let f = JointDist::new(
            g.space().clone(),
            2,
            vec![(vec![0, 0], q(1, 2)), (vec![0, 1], q(1, 2))],
        )
        .unwrap();
        assert!(matches!(eti_decompose(&f, &g), Err(SimilError::Mismatch(_))));
    }
}
