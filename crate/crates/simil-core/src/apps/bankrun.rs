//! Parametric deposit-run families: three payoff states and three signals
//! with accuracy p, an asymmetric prior, and a correlation perturbation
//! of the middle state that leaves every per-state marginal unchanged.
//! Closed-form thresholds in the perturbation decide which cutoff
//! equilibria of the stay/run game survive.

use crate::dist::{JointDist, SigSet, SignalSpace};
use crate::error::{Result, SimilError};
use crate::family::StateFamily;
use crate::games::{Aggregator, CommonValueGame};
use crate::num::{fmt_q, q, qi, Q};
use crate::orders::{check_cad, check_ccad, check_pqd_2d, OrderVerdict};
use num_traits::{One, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BankRunParams {
    pub epsilon: Q,
    pub p: Q,
    /// Perturbation magnitude pulling middle-state mass off the diagonal.
    pub a: Q,
}

/// Prior over the three states. The asymmetric example prior carries the
/// threshold formulas; the symmetric intro prior is a preset without them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BankRunPrior {
    Example,
    Intro,
}

fn half_grid_space() -> SignalSpace {
    SignalSpace::from_values(vec![q(-1, 2), q(1, 2), q(3, 2)]).expect("static space")
}

impl BankRunParams {
    pub fn new(epsilon: Q, p: Q, a: Q) -> Self {
        BankRunParams { epsilon, p, a }
    }

    /// Largest perturbation keeping all middle-state masses nonnegative:
    /// the diagonal cell loses 2a and the far corners lose a each.
    pub fn feasibility_bound(&self) -> Q {
        let corner = self.low_mass() * self.low_mass();
        let diagonal = &self.p * &self.p / qi(2);
        if corner <= diagonal {
            corner
        } else {
            diagonal
        }
    }

    /// Mass a state puts on each non-matching signal.
    fn low_mass(&self) -> Q {
        (Q::one() - &self.p) / qi(2)
    }

    pub fn dominance_bound(epsilon: &Q) -> Q {
        (qi(3) - qi(3) * epsilon) / (qi(3) - epsilon)
    }

    pub fn validate(&self, prior: BankRunPrior) -> Result<()> {
        let eps_top = match prior {
            BankRunPrior::Example => q(1, 3),
            BankRunPrior::Intro => q(1, 2),
        };
        if self.epsilon <= Q::zero() || self.epsilon >= eps_top {
            return Err(SimilError::Invalid(format!(
                "epsilon must lie strictly between 0 and {}",
                fmt_q(&eps_top)
            )));
        }
        if self.p <= Q::zero() || self.p >= Q::one() {
            return Err(SimilError::Invalid(
                "accuracy p must lie strictly between 0 and 1".into(),
            ));
        }
        if self.p <= Self::dominance_bound(&self.epsilon) {
            return Err(SimilError::Invalid(format!(
                "dominance condition fails: p must exceed {}",
                fmt_q(&Self::dominance_bound(&self.epsilon))
            )));
        }
        if self.a < Q::zero() {
            return Err(SimilError::Invalid("perturbation must be nonnegative".into()));
        }
        let low = self.low_mass();
        if &self.p * &self.p - qi(2) * &self.a < Q::zero() {
            return Err(SimilError::Invalid(
                "negative mass at cell (1/2, 1/2): perturbation exceeds p^2 / 2".into(),
            ));
        }
        if &low * &low - &self.a < Q::zero() {
            return Err(SimilError::Invalid(
                "negative mass at cell (-1/2, 3/2): perturbation exceeds ((1-p)/2)^2".into(),
            ));
        }
        Ok(())
    }
}

/// Marginal of a state's signal: p on the matching signal, (1-p)/2 on
/// each of the others.
fn state_marginal(params: &BankRunParams, theta: usize) -> Vec<Q> {
    let low = params.low_mass();
    (0..3).map(|s| if s == theta { params.p.clone() } else { low.clone() }).collect()
}

fn product_dist(space: &SignalSpace, marg: &[Q]) -> JointDist {
    let mut entries = Vec::new();
    for i in 0..marg.len() {
        for j in 0..marg.len() {
            entries.push((vec![i, j], &marg[i] * &marg[j]));
        }
    }
    JointDist::new(space.clone(), 2, entries).expect("product of a marginal")
}

pub fn bank_run_family_with_prior(
    params: &BankRunParams,
    prior_kind: BankRunPrior,
) -> Result<StateFamily> {
    params.validate(prior_kind)?;
    let space = half_grid_space();
    let eps = &params.epsilon;
    let prior = match prior_kind {
        BankRunPrior::Example => vec![eps.clone(), Q::one() - qi(3) * eps, qi(2) * eps],
        BankRunPrior::Intro => vec![eps.clone(), Q::one() - qi(2) * eps, eps.clone()],
    };
    let mut per_state = Vec::new();
    for theta in 0..3 {
        let marg = state_marginal(params, theta);
        if theta != 1 {
            per_state.push(product_dist(&space, &marg));
            continue;
        }
        let mut entries = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                entries.push((vec![i, j], &marg[i] * &marg[j]));
            }
        }
        let a = &params.a;
        entries.push((vec![1, 1], -qi(2) * a));
        for cell in [[0, 1], [1, 0], [1, 2], [2, 1]] {
            entries.push((cell.to_vec(), a.clone()));
        }
        for cell in [[0, 2], [2, 0]] {
            entries.push((cell.to_vec(), -a.clone()));
        }
        per_state.push(JointDist::new(space.clone(), 2, entries)?);
    }
    StateFamily::new(space, prior, per_state)
}

pub fn bank_run_family(params: &BankRunParams) -> Result<StateFamily> {
    bank_run_family_with_prior(params, BankRunPrior::Example)
}

/// Stay/run game: staying at state theta with A other stayers pays
/// theta - 1 + A; action 1 is staying, so the run region is the
/// complement of the participation set.
pub fn bank_run_game() -> CommonValueGame {
    let states = half_grid_space();
    let alpha = vec![q(-3, 2), q(-1, 2), q(1, 2)];
    let beta = vec![Q::one(), Q::one(), Q::one()];
    CommonValueGame::new(states, 2, alpha, beta, Aggregator::identity())
        .expect("static game")
}

/// Closed-form perturbation thresholds, computed from the unperturbed
/// (conditionally independent) family. Staying with the middle signal
/// against stay-at-top opponents stops being optimal above the first;
/// staying against stay-at-middle-and-top opponents above the second.
pub fn bank_run_thresholds(epsilon: &Q, p: &Q) -> Result<(Q, Q)> {
    let params = BankRunParams::new(epsilon.clone(), p.clone(), Q::zero());
    let family = bank_run_family(&params)?;
    let mix = family.mix();
    let posterior_mid = family.posterior(1)[1].clone();
    let expected_state = family.expected_state(1);
    let cond_top = mix.cond_prob(1, SigSet::singleton(2))?;
    let cond_bottom = mix.cond_prob(1, SigSet::singleton(0))?;
    let alpha_star = -(&expected_state + &cond_top - Q::one()) * p / &posterior_mid;
    let alpha_star_star = (&expected_state - &cond_bottom) * p / &posterior_mid;
    if alpha_star >= alpha_star_star {
        return Err(SimilError::Invalid(
            "threshold ordering failed; dominance condition too weak".into(),
        ));
    }
    Ok((alpha_star, alpha_star_star))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BankRunReport {
    /// Present for the example prior only.
    pub thresholds: Option<(Q, Q)>,
    pub eg_exists: bool,
    pub eb_exists: bool,
    /// Twice the run-region mass of the smallest / largest surviving
    /// cutoff equilibrium; absent when none survives.
    pub maximal_expected_run: Option<Q>,
    pub minimal_expected_run: Option<Q>,
}

/// Enumerates cutoff equilibria of the stay/run game on the perturbed
/// family and reads off the two named equilibria: stay on the top two
/// signals (cutoff 2) and stay only at the top (cutoff 3).
pub fn bank_run_analysis(params: &BankRunParams) -> Result<BankRunReport> {
    let family = bank_run_family(params)?;
    let game = bank_run_game();
    let cutoffs = game.enumerate_cutoff_equilibria(&family)?;
    let eg_exists = cutoffs.cutoffs.iter().any(|c| c.c == 2);
    let eb_exists = cutoffs.cutoffs.iter().any(|c| c.c == 3);
    let two = qi(2);
    let maximal_expected_run = cutoffs
        .stats
        .argmin
        .as_ref()
        .map(|_| &two * (Q::one() - &cutoffs.stats.eqminp));
    let minimal_expected_run = cutoffs
        .stats
        .argmax
        .as_ref()
        .map(|_| &two * (Q::one() - &cutoffs.stats.eqmaxp));
    let thresholds = Some(bank_run_thresholds(&params.epsilon, &params.p)?);
    Ok(BankRunReport {
        thresholds,
        eg_exists,
        eb_exists,
        maximal_expected_run,
        minimal_expected_run,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepRow {
    pub a: Q,
    pub eg_exists: bool,
    pub eb_exists: bool,
    pub maximal_expected_run: Option<Q>,
    pub minimal_expected_run: Option<Q>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BankRunSweep {
    pub alpha_star: Q,
    pub alpha_star_star: Q,
    pub feasibility: Q,
    pub rows: Vec<SweepRow>,
}

/// Evaluates the analysis on an exact grid a = i * bound / points,
/// i = 1..=points, over the feasible perturbation range.
pub fn bank_run_sweep(epsilon: &Q, p: &Q, points: usize) -> Result<BankRunSweep> {
    if points == 0 {
        return Err(SimilError::Invalid("sweep needs at least one grid point".into()));
    }
    let (alpha_star, alpha_star_star) = bank_run_thresholds(epsilon, p)?;
    let base = BankRunParams::new(epsilon.clone(), p.clone(), Q::zero());
    let feasibility = base.feasibility_bound();
    let mut rows = Vec::with_capacity(points);
    for i in 1..=points {
        let a = &feasibility * qi(i as i64) / qi(points as i64);
        let params = BankRunParams::new(epsilon.clone(), p.clone(), a.clone());
        let report = bank_run_analysis(&params)?;
        rows.push(SweepRow {
            a,
            eg_exists: report.eg_exists,
            eb_exists: report.eb_exists,
            maximal_expected_run: report.maximal_expected_run,
            minimal_expected_run: report.minimal_expected_run,
        });
    }
    Ok(BankRunSweep { alpha_star, alpha_star_star, feasibility, rows })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntroReport {
    /// Perturbation is zero, so the compared pair is identical.
    pub degenerate: bool,
    pub pqd_holds: bool,
    pub pairwise: OrderVerdict,
    pub contour: OrderVerdict,
    pub alpha_star: Q,
    pub alpha_star_star: Q,
    pub eg_exists: bool,
    pub eb_exists: bool,
    /// Existence flags agree with the thresholds.
    pub consistent: bool,
}

/// The headline puzzle as one executable report: the perturbed middle
/// state rises in quadrant dependence yet falls in the similarity orders,
/// and the all-but-top-run equilibrium survives exactly up to the first
/// threshold.
pub fn intro_example_suite(params: &BankRunParams) -> Result<IntroReport> {
    let perturbed = bank_run_family(params)?;
    let base_params = BankRunParams::new(params.epsilon.clone(), params.p.clone(), Q::zero());
    let base = bank_run_family(&base_params)?;
    let f = perturbed.per_state(1);
    let g = base.per_state(1);
    let pqd_holds = check_pqd_2d(f, g)?.holds;
    let pairwise = check_cad(f, g)?;
    let contour = check_ccad(f, g)?;
    let (alpha_star, alpha_star_star) = bank_run_thresholds(&params.epsilon, &params.p)?;
    let report = bank_run_analysis(params)?;
    let consistent = report.eb_exists == (params.a <= alpha_star)
        && report.eg_exists == (params.a <= alpha_star_star);
    Ok(IntroReport {
        degenerate: params.a.is_zero(),
        pqd_holds,
        pairwise,
        contour,
        alpha_star,
        alpha_star_star,
        eg_exists: report.eg_exists,
        eb_exists: report.eb_exists,
        consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::SigSet;
    use crate::orders::{ContourDir, Violation};

    fn spec_params(a: Q) -> BankRunParams {
        BankRunParams::new(q(1, 20), q(97, 100), a)
    }

    #[test]
    fn family_is_conditionally_independent_without_perturbation() {
        let fam = bank_run_family(&spec_params(Q::zero())).unwrap();
        assert_eq!(fam.prior(), &[q(1, 20), q(17, 20), q(2, 20)]);
        let mid = fam.per_state(1);
        assert_eq!(mid.multiset_mass(&[1, 2]), qi(2) * q(97, 100) * q(3, 200));
        assert_eq!(mid.multiset_mass(&[1, 1]), q(97, 100) * q(97, 100));
        for theta in 0..3 {
            let d = fam.per_state(theta);
            let marg = d.marginal_vec();
            for i in 0..3 {
                for j in 0..3 {
                    assert_eq!(d.ordered_prob(&[i, j]), &marg[i] * &marg[j]);
                }
            }
        }
    }

    #[test]
    fn perturbation_preserves_per_state_marginals() {
        let a = q(9, 40000);
        let fam = bank_run_family(&spec_params(a)).unwrap();
        let mid = fam.per_state(1);
        assert_eq!(mid.marginal_vec(), vec![q(3, 200), q(97, 100), q(3, 200)]);
        assert_eq!(mid.multiset_mass(&[0, 2]), Q::zero());
    }

    #[test]
    fn infeasible_perturbation_names_the_binding_cell() {
        let err = bank_run_family(&spec_params(q(1, 1000)));
        match err {
            Err(SimilError::Invalid(msg)) => assert!(msg.contains("(-1/2, 3/2)"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn dominance_violation_is_named() {
        let err = bank_run_family(&BankRunParams::new(q(3, 10), q(7, 10), Q::zero()));
        match err {
            Err(SimilError::Invalid(msg)) => assert!(msg.contains("dominance"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn thresholds_match_hand_computation() {
        let (star, star2) = bank_run_thresholds(&q(1, 20), &q(97, 100)).unwrap();
        assert_eq!(star, q(319033, 680000));
        assert_eq!(star2, q(160403, 340000));
        assert!(star < star2);
    }

    #[test]
    fn unperturbed_analysis_has_both_equilibria() {
        let report = bank_run_analysis(&spec_params(Q::zero())).unwrap();
        assert!(report.eg_exists);
        assert!(report.eb_exists);
        assert_eq!(report.maximal_expected_run, Some(q(1779, 1000)));
        assert_eq!(report.minimal_expected_run, Some(q(251, 2000)));
    }

    /// Parameters where the first threshold falls inside the feasible
    /// range, so the all-but-top-run equilibrium actually disappears.
    fn crossing(a: Q) -> BankRunParams {
        BankRunParams::new(q(3, 10), q(41, 50), a)
    }

    #[test]
    fn adversarial_equilibrium_dies_exactly_at_the_threshold() {
        let (star, _) = bank_run_thresholds(&q(3, 10), &q(41, 50)).unwrap();
        let feasibility = crossing(Q::zero()).feasibility_bound();
        assert!(star < feasibility, "threshold must be reachable");
        assert!(star > Q::zero());
        let at = bank_run_analysis(&crossing(star.clone())).unwrap();
        assert!(at.eb_exists, "weak inequality keeps it at the threshold");
        let above = bank_run_analysis(&crossing(&star + q(1, 100000))).unwrap();
        assert!(!above.eb_exists);
        assert!(above.eg_exists);
        // Losing the adversarial equilibrium shrinks the worst-case run
        // region by exactly the middle signal's mass.
        let drop = at.maximal_expected_run.unwrap() - above.maximal_expected_run.unwrap();
        let fam = bank_run_family(&crossing(Q::zero())).unwrap();
        assert_eq!(drop, qi(2) * fam.mix().marginal(1));
    }

    #[test]
    fn sweep_reproduces_the_two_regions() {
        let sweep = bank_run_sweep(&q(3, 10), &q(41, 50), 20).unwrap();
        assert_eq!(sweep.rows.len(), 20);
        for row in &sweep.rows {
            assert!(row.eg_exists);
            assert_eq!(row.eb_exists, row.a <= sweep.alpha_star);
        }
        assert!(sweep.rows.iter().any(|r| r.eb_exists));
        assert!(sweep.rows.iter().any(|r| !r.eb_exists));
    }

    #[test]
    fn intro_suite_reports_the_puzzle() {
        let report = intro_example_suite(&spec_params(q(9, 40000))).unwrap();
        assert!(!report.degenerate);
        assert!(report.pqd_holds);
        assert!(!report.pairwise.holds);
        match report.pairwise.violation.as_ref().unwrap() {
            Violation::Point { s, s_prime, .. } => assert_eq!((s, s_prime), (&1, &1)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(!report.contour.holds);
        match report.contour.violation.as_ref().unwrap() {
            Violation::Contour { s, s_hat, dir, .. } => {
                assert_eq!((*s, *s_hat), (1, 1));
                assert_eq!(*dir, ContourDir::Up);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(report.consistent);
        assert!(report.eb_exists, "threshold far above feasibility here");
    }

    #[test]
    fn intro_prior_preset_builds() {
        let fam = bank_run_family_with_prior(&spec_params(Q::zero()), BankRunPrior::Intro)
            .unwrap();
        assert_eq!(fam.prior(), &[q(1, 20), q(18, 20), q(1, 20)]);
    }

    #[test]
    fn stay_game_shape() {
        let game = bank_run_game();
        assert!(game.is_separable());
        assert_eq!(game.alpha(), &[q(-3, 2), q(-1, 2), q(1, 2)]);
        let _ = SigSet::full(3);
    }
}
