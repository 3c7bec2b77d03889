//! Similarity-order checks between joint signal distributions.
//!
//! Every check returns a verdict that either holds or carries a violation
//! certificate with the two exact conditional values that broke the order.
//! Scan order is deterministic: marginals first, then conditions by
//! ascending signal (and ascending inner index), so the reported violation
//! is the first one in that order. Signals with zero marginal probability
//! (on both sides, given the marginal check) are skipped as vacuous.

use crate::dist::{JointDist, NonExchJointDist, SigSet};
use crate::error::{Result, SimilError};
use crate::family::StateFamily;
use crate::num::Q;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CheckedOrder {
    Cad,
    Ccad,
    Icad,
    Scad,
    CadStatewise,
    Pqd2,
    CadNonexch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BaseOrder {
    Cad,
    Ccad,
    Icad,
    Scad,
    Pqd2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContourDir {
    Up,
    Down,
}

/// First condition that failed, with both exact values (left = the side
/// claimed more similar, right = the other).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Marginal probabilities of signal `s` differ.
    MarginalMismatch { s: usize, lhs: Q, rhs: Q },
    /// Pairwise conditional at (own s, other's s') broke its inequality.
    Point { s: usize, s_prime: usize, lhs: Q, rhs: Q },
    /// Conditional mass of a set K containing s* fell below the other side.
    Set { s_star: usize, k: SigSet, lhs: Q, rhs: Q },
    /// Contour conditional at own signal s and cut signal s_hat.
    Contour { s: usize, s_hat: usize, dir: ContourDir, lhs: Q, rhs: Q },
    /// Survival P(count of others in K >= m | s*) broke dominance.
    Count { s_star: usize, k: SigSet, m: usize, lhs: Q, rhs: Q },
    /// Lower-orthant probability at (x, y) fell below the other side.
    Orthant { x: usize, y: usize, lhs: Q, rhs: Q },
    /// Statewise check failed inside one state's distribution pair.
    State { theta: usize, inner: Box<Violation> },
    /// Pairwise player condition (i, j) failed; i = j marks player i's own
    /// marginal mismatch.
    Pair { i: usize, j: usize, inner: Box<Violation> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderVerdict {
    pub order: CheckedOrder,
    pub holds: bool,
    pub violation: Option<Violation>,
}

impl OrderVerdict {
    fn passes(order: CheckedOrder) -> Self {
        OrderVerdict { order, holds: true, violation: None }
    }

    fn fails(order: CheckedOrder, v: Violation) -> Self {
        OrderVerdict { order, holds: false, violation: Some(v) }
    }
}

/// Statewise verdict: the base order applied per state on every state where
/// the families differ.
#[derive(Debug, Clone)]
pub struct StatewiseVerdict {
    pub base: BaseOrder,
    pub tested_states: Vec<usize>,
    pub per_state: Vec<(usize, OrderVerdict)>,
    pub holds: bool,
    pub violation: Option<Violation>,
}

fn marginal_check(f: &JointDist, g: &JointDist) -> Option<Violation> {
    f.marginal_mismatch(g)
        .map(|(s, lhs, rhs)| Violation::MarginalMismatch { s, lhs, rhs })
}

fn support_signals(f: &JointDist) -> Vec<usize> {
    (0..f.space().n())
        .filter(|&s| !f.marginal(s).is_zero())
        .collect()
}

/// Diagonal conditionals must rise and off-diagonal ones fall: for every s,
/// F_s(s) >= G_s(s), and F_s(s') <= G_s(s') for s' != s.
pub fn check_cad(f: &JointDist, g: &JointDist) -> Result<OrderVerdict> {
    f.check_compatible(g)?;
    if let Some(v) = marginal_check(f, g) {
        return Ok(OrderVerdict::fails(CheckedOrder::Cad, v));
    }
    let support = support_signals(f);
    for &s in &support {
        let lhs = f.cond_prob(s, SigSet::singleton(s))?;
        let rhs = g.cond_prob(s, SigSet::singleton(s))?;
        if lhs < rhs {
            return Ok(OrderVerdict::fails(
                CheckedOrder::Cad,
                Violation::Point { s, s_prime: s, lhs, rhs },
            ));
        }
    }
    for &s in &support {
        for s_prime in 0..f.space().n() {
            if s_prime == s {
                continue;
            }
            let lhs = f.cond_prob(s, SigSet::singleton(s_prime))?;
            let rhs = g.cond_prob(s, SigSet::singleton(s_prime))?;
            if lhs > rhs {
                return Ok(OrderVerdict::fails(
                    CheckedOrder::Cad,
                    Violation::Point { s, s_prime, lhs, rhs },
                ));
            }
        }
    }
    Ok(OrderVerdict::passes(CheckedOrder::Cad))
}

/// Rewrites a pairwise violation as a set certificate (s*, K) with
/// F_{s*}(K) < G_{s*}(K) and s* in K: the diagonal case keeps K = {s}, the
/// off-diagonal case passes to the complement of {s'}.
pub fn cad_set_certificate(
    f: &JointDist,
    g: &JointDist,
    violation: &Violation,
) -> Result<Violation> {
    let n = f.space().n();
    match violation {
        Violation::Point { s, s_prime, .. } => {
            let k = if s == s_prime {
                SigSet::singleton(*s)
            } else {
                SigSet::singleton(*s_prime).complement(n)
            };
            let lhs = f.cond_prob(*s, k)?;
            let rhs = g.cond_prob(*s, k)?;
            if lhs >= rhs {
                return Err(SimilError::NotViolated(
                    "pairwise certificate does not convert to a set certificate".into(),
                ));
            }
            Ok(Violation::Set { s_star: *s, k, lhs, rhs })
        }
        Violation::Set { .. } => Ok(violation.clone()),
        _ => Err(SimilError::Invalid(
            "only pairwise or set certificates convert to set form".into(),
        )),
    }
}

/// Both contour families must gain conditional mass: F_s(up(s_hat)) >=
/// G_s(up(s_hat)) for s_hat <= s and F_s(down(s_hat)) >= G_s(down(s_hat))
/// for s_hat >= s.
pub fn check_ccad(f: &JointDist, g: &JointDist) -> Result<OrderVerdict> {
    f.check_compatible(g)?;
    if let Some(v) = marginal_check(f, g) {
        return Ok(OrderVerdict::fails(CheckedOrder::Ccad, v));
    }
    let n = f.space().n();
    for s in support_signals(f) {
        for s_hat in 0..=s {
            let k = f.space().upset(s_hat);
            let lhs = f.cond_prob(s, k)?;
            let rhs = g.cond_prob(s, k)?;
            if lhs < rhs {
                return Ok(OrderVerdict::fails(
                    CheckedOrder::Ccad,
                    Violation::Contour { s, s_hat, dir: ContourDir::Up, lhs, rhs },
                ));
            }
        }
        for s_hat in s..n {
            let k = f.space().downset(s_hat);
            let lhs = f.cond_prob(s, k)?;
            let rhs = g.cond_prob(s, k)?;
            if lhs < rhs {
                return Ok(OrderVerdict::fails(
                    CheckedOrder::Ccad,
                    Violation::Contour { s, s_hat, dir: ContourDir::Down, lhs, rhs },
                ));
            }
        }
    }
    Ok(OrderVerdict::passes(CheckedOrder::Ccad))
}

/// Intervals containing s, ordered by ascending lower then upper endpoint.
pub fn intervals_containing(s: usize, n: usize) -> Vec<SigSet> {
    let mut out = Vec::new();
    for lo in 0..=s {
        for hi in s..n {
            out.push(SigSet::from_indices(
                (lo..=hi).collect::<Vec<_>>().as_slice(),
            ));
        }
    }
    out
}

/// Every interval containing s must gain conditional mass.
pub fn check_icad(f: &JointDist, g: &JointDist) -> Result<OrderVerdict> {
    f.check_compatible(g)?;
    if let Some(v) = marginal_check(f, g) {
        return Ok(OrderVerdict::fails(CheckedOrder::Icad, v));
    }
    let n = f.space().n();
    for s in support_signals(f) {
        for k in intervals_containing(s, n) {
            let lhs = f.cond_prob(s, k)?;
            let rhs = g.cond_prob(s, k)?;
            if lhs < rhs {
                return Ok(OrderVerdict::fails(
                    CheckedOrder::Icad,
                    Violation::Set { s_star: s, k, lhs, rhs },
                ));
            }
        }
    }
    Ok(OrderVerdict::passes(CheckedOrder::Icad))
}

/// All subsets containing s, in ascending bitmask order.
pub fn subsets_containing(s: usize, n: usize) -> Vec<SigSet> {
    (0..(1u32 << n))
        .map(|bits| SigSet(bits as u16))
        .filter(|k| k.contains(s))
        .collect()
}

/// Count-survival dominance: for every set K containing s and every
/// threshold m, P_F(count >= m | s) >= P_G(count >= m | s).
pub fn check_scad(f: &JointDist, g: &JointDist) -> Result<OrderVerdict> {
    f.check_compatible(g)?;
    if let Some(v) = marginal_check(f, g) {
        return Ok(OrderVerdict::fails(CheckedOrder::Scad, v));
    }
    let n = f.space().n();
    for s in support_signals(f) {
        for k in subsets_containing(s, n) {
            let cf = f.count_cdf(s, k)?;
            let cg = g.count_cdf(s, k)?;
            for m in 1..f.players() {
                let lhs = cf.survival(m);
                let rhs = cg.survival(m);
                if lhs < rhs {
                    return Ok(OrderVerdict::fails(
                        CheckedOrder::Scad,
                        Violation::Count { s_star: s, k, m, lhs, rhs },
                    ));
                }
            }
        }
    }
    Ok(OrderVerdict::passes(CheckedOrder::Scad))
}

/// Two-player positive-quadrant-dependence comparison: every lower-orthant
/// probability under F must be at least the one under G.
pub fn check_pqd_2d(f: &JointDist, g: &JointDist) -> Result<OrderVerdict> {
    f.check_compatible(g)?;
    if f.players() != 2 {
        return Err(SimilError::Unsupported(
            "the quadrant-dependence check is defined for 2 players".into(),
        ));
    }
    if let Some(v) = marginal_check(f, g) {
        return Ok(OrderVerdict::fails(CheckedOrder::Pqd2, v));
    }
    let n = f.space().n();
    for x in 0..n {
        for y in 0..n {
            let lhs = f.orthant_prob(x, y)?;
            let rhs = g.orthant_prob(x, y)?;
            if lhs < rhs {
                return Ok(OrderVerdict::fails(
                    CheckedOrder::Pqd2,
                    Violation::Orthant { x, y, lhs, rhs },
                ));
            }
        }
    }
    Ok(OrderVerdict::passes(CheckedOrder::Pqd2))
}

pub fn check_order(base: BaseOrder, f: &JointDist, g: &JointDist) -> Result<OrderVerdict> {
    match base {
        BaseOrder::Cad => check_cad(f, g),
        BaseOrder::Ccad => check_ccad(f, g),
        BaseOrder::Icad => check_icad(f, g),
        BaseOrder::Scad => check_scad(f, g),
        BaseOrder::Pqd2 => check_pqd_2d(f, g),
    }
}

/// Applies the base order per state on every state where the families put
/// different distributions; states with equal distributions pass trivially.
pub fn check_statewise(
    base: BaseOrder,
    f: &StateFamily,
    g: &StateFamily,
) -> Result<StatewiseVerdict> {
    f.check_compatible(g)?;
    let tested_states = f.differing_states(g);
    let mut per_state = Vec::new();
    let mut holds = true;
    let mut violation = None;
    for &theta in &tested_states {
        let verdict = check_order(base, f.per_state(theta), g.per_state(theta))?;
        if !verdict.holds && holds {
            holds = false;
            violation = verdict.violation.clone().map(|inner| Violation::State {
                theta,
                inner: Box::new(inner),
            });
        }
        per_state.push((theta, verdict));
    }
    Ok(StatewiseVerdict { base, tested_states, per_state, holds, violation })
}

/// Pairwise-conditional dominance for ordered (non-exchangeable) players:
/// per-player marginals must match, and for every ordered pair (i, j) the
/// matching conditional rises while every non-matching one falls.
pub fn check_cad_nonexch(
    f: &NonExchJointDist,
    g: &NonExchJointDist,
) -> Result<OrderVerdict> {
    f.check_compatible(g)?;
    let n = f.space().n();
    let players = f.players();
    for i in 0..players {
        for s in 0..n {
            let lhs = f.marginal_of(i, s)?;
            let rhs = g.marginal_of(i, s)?;
            if lhs != rhs {
                return Ok(OrderVerdict::fails(
                    CheckedOrder::CadNonexch,
                    Violation::Pair {
                        i,
                        j: i,
                        inner: Box::new(Violation::MarginalMismatch { s, lhs, rhs }),
                    },
                ));
            }
        }
    }
    for i in 0..players {
        for j in 0..players {
            if i == j {
                continue;
            }
            let support: Vec<usize> =
                (0..n).filter(|&s| !f.marginal_of(i, s).unwrap().is_zero()).collect();
            for &s in &support {
                let k = SigSet::singleton(s);
                let lhs = f.cond_pair(i, j, s, k)?;
                let rhs = g.cond_pair(i, j, s, k)?;
                if lhs < rhs {
                    return Ok(OrderVerdict::fails(
                        CheckedOrder::CadNonexch,
                        Violation::Pair {
                            i,
                            j,
                            inner: Box::new(Violation::Set { s_star: s, k, lhs, rhs }),
                        },
                    ));
                }
            }
            for &s in &support {
                for s_prime in 0..n {
                    if s_prime == s {
                        continue;
                    }
                    let point = f.cond_pair(i, j, s, SigSet::singleton(s_prime))?;
                    let point_g = g.cond_pair(i, j, s, SigSet::singleton(s_prime))?;
                    if point > point_g {
                        let k = SigSet::singleton(s_prime).complement(n);
                        let lhs = f.cond_pair(i, j, s, k)?;
                        let rhs = g.cond_pair(i, j, s, k)?;
                        return Ok(OrderVerdict::fails(
                            CheckedOrder::CadNonexch,
                            Violation::Pair {
                                i,
                                j,
                                inner: Box::new(Violation::Set { s_star: s, k, lhs, rhs }),
                            },
                        ));
                    }
                }
            }
        }
    }
    Ok(OrderVerdict::passes(CheckedOrder::CadNonexch))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{diagonal_mixture, SignalSpace};
    use crate::num::{q, qi};

    fn binary_space() -> SignalSpace {
        SignalSpace::from_values(vec![qi(0), qi(1)]).unwrap()
    }

    /// Three players, binary signals, concentrated on aligned profiles.
    fn aligned() -> JointDist {
        JointDist::new(
            binary_space(),
            3,
            vec![
                (vec![0, 0, 0], q(1, 3)),
                (vec![0, 1, 1], q(1, 2)),
                (vec![1, 1, 1], q(1, 6)),
            ],
        )
        .unwrap()
    }

    /// Same marginals as `aligned`, signals more dispersed.
    fn dispersed() -> JointDist {
        JointDist::new(
            binary_space(),
            3,
            vec![(vec![0, 0, 1], q(3, 4)), (vec![1, 1, 1], q(1, 4))],
        )
        .unwrap()
    }

    #[test]
    fn cad_holds_on_aligned_vs_dispersed() {
        let v = check_cad(&aligned(), &dispersed()).unwrap();
        assert!(v.holds, "{:?}", v.violation);
        let back = check_cad(&dispersed(), &aligned()).unwrap();
        assert!(!back.holds);
        assert_eq!(
            back.violation,
            Some(Violation::Point { s: 0, s_prime: 0, lhs: q(1, 2), rhs: q(2, 3) })
        );
    }

    #[test]
    fn marginal_mismatch_reported_first() {
        let f = aligned();
        let g = JointDist::new(
            binary_space(),
            3,
            vec![(vec![0, 0, 0], q(2, 5)), (vec![1, 1, 1], q(3, 5))],
        )
        .unwrap();
        let v = check_cad(&f, &g).unwrap();
        assert_eq!(
            v.violation,
            Some(Violation::MarginalMismatch { s: 0, lhs: q(1, 2), rhs: q(2, 5) })
        );
    }

    fn four_space() -> SignalSpace {
        SignalSpace::from_values(vec![qi(1), qi(2), qi(3), qi(4)]).unwrap()
    }

    /// Uniform independent pair on four signals, shifted by +/- a on a cycle
    /// of cells that preserves both marginals and all contour conditionals.
    fn cycle_shift(a: Q) -> JointDist {
        let base = q(1, 16);
        let two = qi(2);
        JointDist::new(
            four_space(),
            2,
            vec![
                (vec![0, 0], &base + &a),
                (vec![3, 3], &base + &a),
                (vec![1, 2], &base * &two + &a * &two),
                (vec![0, 2], &base * &two - &a * &two),
                (vec![1, 3], &base * &two - &a * &two),
                (vec![0, 1], &base * &two),
                (vec![0, 3], &base * &two),
                (vec![1, 1], base.clone()),
                (vec![2, 2], base.clone()),
                (vec![2, 3], &base * &two),
            ],
        )
        .unwrap()
    }

    #[test]
    fn contour_order_can_hold_where_pairwise_order_fails() {
        let f = cycle_shift(q(1, 32));
        let g = cycle_shift(qi(0));
        let cad = check_cad(&f, &g).unwrap();
        assert!(!cad.holds);
        assert_eq!(
            cad.violation.as_ref().map(|v| match v {
                Violation::Point { s, s_prime, .. } => (*s, *s_prime),
                _ => panic!("expected pairwise violation"),
            }),
            Some((1, 2))
        );
        let ccad = check_ccad(&f, &g).unwrap();
        assert!(ccad.holds, "{:?}", ccad.violation);
        let icad = check_icad(&f, &g).unwrap();
        assert!(icad.holds, "{:?}", icad.violation);
    }

    #[test]
    fn set_certificate_from_pairwise_violation() {
        let f = cycle_shift(q(1, 32));
        let g = cycle_shift(qi(0));
        let cad = check_cad(&g, &f).unwrap();
        assert!(!cad.holds);
        let set = cad_set_certificate(&g, &f, cad.violation.as_ref().unwrap()).unwrap();
        match set {
            Violation::Set { s_star, k, lhs, rhs } => {
                assert!(k.contains(s_star));
                assert!(lhs < rhs);
            }
            other => panic!("expected set form, got {other:?}"),
        }
    }

    #[test]
    fn diagonal_mixture_is_cad_above_base() {
        let g = dispersed();
        let f = diagonal_mixture(&g, &q(1, 5)).unwrap();
        assert!(check_cad(&f, &g).unwrap().holds);
        assert!(check_ccad(&f, &g).unwrap().holds);
        assert!(check_icad(&f, &g).unwrap().holds);
        assert!(check_scad(&f, &g).unwrap().holds);
    }

    /// Binary 3-player masses (m0+d, m1-3d, m2+3d, m3-d) leave every pairwise
    /// joint unchanged but shift the count distribution.
    fn count_shifted(d: Q) -> JointDist {
        let three = qi(3);
        JointDist::new(
            binary_space(),
            3,
            vec![
                (vec![0, 0, 0], q(1, 4) + &d),
                (vec![0, 0, 1], q(1, 4) - &d * &three),
                (vec![0, 1, 1], q(1, 4) + &d * &three),
                (vec![1, 1, 1], q(1, 4) - &d),
            ],
        )
        .unwrap()
    }

    #[test]
    fn count_dominance_separates_where_pairwise_cannot() {
        let f = count_shifted(q(1, 20));
        let g = count_shifted(qi(0));
        assert!(check_cad(&f, &g).unwrap().holds);
        assert!(check_cad(&g, &f).unwrap().holds);
        let fg = check_scad(&f, &g).unwrap();
        assert!(!fg.holds);
        assert_eq!(
            fg.violation,
            Some(Violation::Count {
                s_star: 0,
                k: SigSet::singleton(0),
                m: 1,
                lhs: q(11, 15),
                rhs: q(5, 6),
            })
        );
        assert!(!check_scad(&g, &f).unwrap().holds);
    }

    #[test]
    fn quadrant_dependence_on_mixtures() {
        let g = JointDist::new(
            binary_space(),
            2,
            vec![
                (vec![0, 0], q(1, 4)),
                (vec![0, 1], q(1, 2)),
                (vec![1, 1], q(1, 4)),
            ],
        )
        .unwrap();
        let f = diagonal_mixture(&g, &q(1, 3)).unwrap();
        assert!(check_pqd_2d(&f, &g).unwrap().holds);
        let back = check_pqd_2d(&g, &f).unwrap();
        assert_eq!(
            back.violation,
            Some(Violation::Orthant { x: 0, y: 0, lhs: q(1, 4), rhs: q(1, 3) })
        );
        assert!(check_pqd_2d(&aligned(), &dispersed()).is_err());
    }

    #[test]
    fn statewise_check_skips_equal_states() {
        let states = SignalSpace::from_values(vec![qi(0), qi(1)]).unwrap();
        let f = StateFamily::new(
            states.clone(),
            vec![q(1, 2), q(1, 2)],
            vec![aligned(), aligned()],
        )
        .unwrap();
        let g = StateFamily::new(
            states,
            vec![q(1, 2), q(1, 2)],
            vec![aligned(), dispersed()],
        )
        .unwrap();
        let v = check_statewise(BaseOrder::Cad, &f, &g).unwrap();
        assert_eq!(v.tested_states, vec![1]);
        assert!(v.holds);
        let back = check_statewise(BaseOrder::Cad, &g, &f).unwrap();
        assert!(!back.holds);
        match back.violation {
            Some(Violation::State { theta, ref inner }) => {
                assert_eq!(theta, 1);
                assert!(matches!(**inner, Violation::Point { .. }));
            }
            ref other => panic!("expected statewise wrapper, got {other:?}"),
        }
    }

    #[test]
    fn nonexch_check_on_correlated_vs_anticorrelated() {
        let f = NonExchJointDist::new(
            binary_space(),
            2,
            vec![(vec![0, 0], q(1, 2)), (vec![1, 1], q(1, 2))],
        )
        .unwrap();
        let g = NonExchJointDist::new(
            binary_space(),
            2,
            vec![(vec![0, 1], q(1, 2)), (vec![1, 0], q(1, 2))],
        )
        .unwrap();
        assert!(check_cad_nonexch(&f, &g).unwrap().holds);
        let back = check_cad_nonexch(&g, &f).unwrap();
        assert_eq!(
            back.violation,
            Some(Violation::Pair {
                i: 0,
                j: 1,
                inner: Box::new(Violation::Set {
                    s_star: 0,
                    k: SigSet::singleton(0),
                    lhs: qi(0),
                    rhs: qi(1),
                }),
            })
        );
    }

    #[test]
    fn nonexch_marginal_mismatch_names_the_player() {
        let f = NonExchJointDist::new(
            binary_space(),
            2,
            vec![(vec![0, 0], q(1, 2)), (vec![1, 1], q(1, 2))],
        )
        .unwrap();
        let g = NonExchJointDist::new(
            binary_space(),
            2,
            vec![(vec![0, 0], q(1, 4)), (vec![1, 1], q(3, 4))],
        )
        .unwrap();
        let v = check_cad_nonexch(&f, &g).unwrap();
        assert_eq!(
            v.violation,
            Some(Violation::Pair {
                i: 0,
                j: 0,
                inner: Box::new(Violation::MarginalMismatch {
                    s: 0,
                    lhs: q(1, 2),
                    rhs: q(1, 4),
                }),
            })
        );
    }

    #[test]
    fn agreement_between_exchangeable_and_ordered_checks() {
        let f = aligned();
        let g = dispersed();
        let fx = NonExchJointDist::from_exchangeable(&f);
        let gx = NonExchJointDist::from_exchangeable(&g);
        assert_eq!(
            check_cad(&f, &g).unwrap().holds,
            check_cad_nonexch(&fx, &gx).unwrap().holds
        );
        assert_eq!(
            check_cad(&g, &f).unwrap().holds,
            check_cad_nonexch(&gx, &fx).unwrap().holds
        );
    }
}
