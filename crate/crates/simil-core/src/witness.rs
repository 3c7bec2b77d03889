//! Construction of separating witness games from order violations.
//!
//! Each constructor turns a verified violation certificate into a game and
//! a strategy such that the strategy is an equilibrium on one side of the
//! pair and not on the other, with the pivotal signal exactly indifferent
//! on the equilibrium side. Verification replays everything from the
//! package alone through the game and order operations.

use crate::dist::{JointDist, SigSet};
use crate::error::{Result, SimilError};
use crate::family::StateFamily;
use crate::games::{Aggregator, CommonValueGame, CutoffStrategy, PrivateValueGame};
use crate::linalg::{affine_dependence, dot, solve};
use crate::num::{fmt_q, Q};
use crate::orders::{cad_set_certificate, check_cad, check_scad, ContourDir, Violation};
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessFamily {
    PrivateMax,
    PrivateMin,
    Common,
    Separable,
    Scad,
    Congestion,
}

/// What the package certifies about the pair (F claimed at least as
/// similar as G). Membership-only packages certify just that equilibrium
///-set inclusion fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    MaxParticipationDrops,
    MinParticipationRises,
    InclusionFails,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WitnessGame {
    Private(PrivateValueGame),
    Common(CommonValueGame),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessStrategy {
    Set(SigSet),
    Cutoff(CutoffStrategy),
}

impl WitnessStrategy {
    pub fn as_set(&self, n: usize) -> SigSet {
        match self {
            WitnessStrategy::Set(p) => *p,
            WitnessStrategy::Cutoff(c) => c.set(n),
        }
    }
}

/// Exact values recorded at construction: net payoff of the pivotal signal
/// under both distributions, and the direction-relevant participation
/// bound on each side (strategy mass for membership-only packages).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certification {
    pub pivot_net_f: Q,
    pub pivot_net_g: Q,
    pub bound_f: Q,
    pub bound_g: Q,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessPackage {
    pub family: WitnessFamily,
    pub game: WitnessGame,
    pub strategy: WitnessStrategy,
    pub direction: Direction,
    pub pivot: usize,
    pub certification: Certification,
}

impl WitnessPackage {
    /// Side on which the strategy is claimed to be an equilibrium.
    pub fn equilibrium_under_f(&self) -> bool {
        matches!(self.family, WitnessFamily::Congestion)
    }
}

/// Linear functional separating a point from two finite sets with exact
/// unit gaps: max over A < value at x < min over B.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparatingFunctional {
    pub coefficients: Vec<Q>,
    pub max_a: Option<Q>,
    pub at_x: Q,
    pub min_b: Option<Q>,
}

/// Builds the functional by solving <coeff, y - x> = -1 for y in A and
/// +1 for y in B; solvable exactly because A, B, and x together are
/// affinely independent. Returns the dependence certificate otherwise.
pub fn separating_functional(
    a: &[Vec<Q>],
    x: &[Q],
    b: &[Vec<Q>],
) -> Result<SeparatingFunctional> {
    let mut points: Vec<Vec<Q>> = Vec::with_capacity(a.len() + b.len() + 1);
    points.extend(a.iter().cloned());
    points.push(x.to_vec());
    points.extend(b.iter().cloned());
    if let Some(cert) = affine_dependence(&points) {
        let formatted: Vec<String> = cert.iter().map(fmt_q).collect();
        return Err(SimilError::Degenerate(format!(
            "points are affinely dependent with coefficients [{}]",
            formatted.join(", ")
        )));
    }
    let mut rows = Vec::new();
    let mut targets = Vec::new();
    for y in a {
        rows.push(y.iter().zip(x).map(|(yi, xi)| yi - xi).collect::<Vec<Q>>());
        targets.push(-Q::one());
    }
    for y in b {
        rows.push(y.iter().zip(x).map(|(yi, xi)| yi - xi).collect::<Vec<Q>>());
        targets.push(Q::one());
    }
    let coefficients = if rows.is_empty() {
        vec![Q::zero(); x.len()]
    } else {
        solve(&rows, &targets).ok_or_else(|| {
            SimilError::Degenerate("difference system is inconsistent".into())
        })?
    };
    let at_x = dot(&coefficients, x);
    let max_a = a.iter().map(|y| dot(&coefficients, y)).max();
    let min_b = b.iter().map(|y| dot(&coefficients, y)).min();
    if let Some(m) = &max_a {
        if m >= &at_x {
            return Err(SimilError::Degenerate("separation failed on the A side".into()));
        }
    }
    if let Some(m) = &min_b {
        if m <= &at_x {
            return Err(SimilError::Degenerate("separation failed on the B side".into()));
        }
    }
    Ok(SeparatingFunctional { coefficients, max_a, at_x, min_b })
}

fn expect_set_violation(v: &Violation) -> Result<(usize, SigSet)> {
    match v {
        Violation::Set { s_star, k, .. } => Ok((*s_star, *k)),
        _ => Err(SimilError::Invalid(
            "expected a set-form violation certificate".into(),
        )),
    }
}

fn fraction(players: usize) -> Q {
    Q::one() / Q::from_integer(((players - 1) as u64).into())
}

/// Coordination game in which participation on K is attractive, the
/// violating signal is exactly indifferent under G, and everything off K
/// is dominated out; maximal participation must drop from G to F.
pub fn witness_private_max(
    f: &JointDist,
    g: &JointDist,
    violation: &Violation,
) -> Result<WitnessPackage> {
    f.check_compatible(g)?;
    let (s_star, k) = expect_set_violation(violation)?;
    let n = g.space().n();
    if !k.contains(s_star) {
        return Err(SimilError::Invalid("violating signal must lie in its set".into()));
    }
    let f_val = f.cond_prob(s_star, k)?;
    let g_val = g.cond_prob(s_star, k)?;
    if f_val >= g_val {
        return Err(SimilError::NotViolated(format!(
            "conditional mass of the set did not fall: {} vs {}",
            fmt_q(&f_val),
            fmt_q(&g_val)
        )));
    }
    let mut alpha = Vec::with_capacity(n);
    for s in 0..n {
        if s == s_star {
            alpha.push(-g_val.clone());
        } else if k.contains(s) {
            alpha.push(Q::one());
        } else {
            alpha.push(-Q::from_integer(2.into()));
        }
    }
    let beta = vec![fraction(g.players()); n];
    let game = PrivateValueGame::new(
        g.space().clone(),
        g.players(),
        alpha,
        beta,
        Aggregator::identity(),
    )?;
    let pivot_net_g = game.net_payoff(g, k, s_star)?;
    let pivot_net_f = game.net_payoff(f, k, s_star)?;
    debug_assert!(pivot_net_g.is_zero());
    let bound_f = game.enumerate_equilibria(f)?.stats.max_p;
    let bound_g = game.enumerate_equilibria(g)?.stats.max_p;
    Ok(WitnessPackage {
        family: WitnessFamily::PrivateMax,
        game: WitnessGame::Private(game),
        strategy: WitnessStrategy::Set(k),
        direction: Direction::MaxParticipationDrops,
        pivot: s_star,
        certification: Certification { pivot_net_f, pivot_net_g, bound_f, bound_g },
    })
}

/// Mirror construction on the complement: participation on S minus K is
/// dominant, the violating signal is indifferent between joining under G
/// and strictly joins under F; minimal participation must rise.
pub fn witness_private_min(
    f: &JointDist,
    g: &JointDist,
    violation: &Violation,
) -> Result<WitnessPackage> {
    f.check_compatible(g)?;
    let (s_star, k) = expect_set_violation(violation)?;
    let n = g.space().n();
    if !k.contains(s_star) {
        return Err(SimilError::Invalid("violating signal must lie in its set".into()));
    }
    let kc = k.complement(n);
    if kc.is_empty() {
        return Err(SimilError::NotViolated(
            "the full signal set admits no violation".into(),
        ));
    }
    let f_val = f.cond_prob(s_star, k)?;
    let g_val = g.cond_prob(s_star, k)?;
    if f_val >= g_val {
        return Err(SimilError::NotViolated(format!(
            "conditional mass of the set did not fall: {} vs {}",
            fmt_q(&f_val),
            fmt_q(&g_val)
        )));
    }
    let g_comp = g.cond_prob(s_star, kc)?;
    let mut alpha = Vec::with_capacity(n);
    for s in 0..n {
        if s == s_star {
            alpha.push(-g_comp.clone());
        } else if kc.contains(s) {
            alpha.push(Q::one());
        } else {
            alpha.push(-Q::from_integer(2.into()));
        }
    }
    let beta = vec![fraction(g.players()); n];
    let game = PrivateValueGame::new(
        g.space().clone(),
        g.players(),
        alpha,
        beta,
        Aggregator::identity(),
    )?;
    let pivot_net_g = game.net_payoff(g, kc, s_star)?;
    let pivot_net_f = game.net_payoff(f, kc, s_star)?;
    debug_assert!(pivot_net_g.is_zero());
    let bound_f = game.enumerate_equilibria(f)?.stats.min_p;
    let bound_g = game.enumerate_equilibria(g)?.stats.min_p;
    Ok(WitnessPackage {
        family: WitnessFamily::PrivateMin,
        game: WitnessGame::Private(game),
        strategy: WitnessStrategy::Set(kc),
        direction: Direction::MinParticipationRises,
        pivot: s_star,
        certification: Certification { pivot_net_f, pivot_net_g, bound_f, bound_g },
    })
}

/// Threshold-aggregator game from a count-survival violation: every signal
/// in K is exactly indifferent under G, off-K signals never participate,
/// and the violating signal strictly leaves under F.
pub fn witness_scad(f: &JointDist, g: &JointDist, violation: &Violation) -> Result<WitnessPackage> {
    f.check_compatible(g)?;
    let (s_star, k, m) = match violation {
        Violation::Count { s_star, k, m, .. } => (*s_star, *k, *m),
        _ => {
            return Err(SimilError::Invalid(
                "expected a count-form violation certificate".into(),
            ))
        }
    };
    let n = g.space().n();
    if !k.contains(s_star) {
        return Err(SimilError::Invalid("violating signal must lie in its set".into()));
    }
    let surv_f = f.count_cdf(s_star, k)?.survival(m);
    let surv_g = g.count_cdf(s_star, k)?.survival(m);
    if surv_f >= surv_g {
        return Err(SimilError::NotViolated(format!(
            "count survival did not fall: {} vs {}",
            fmt_q(&surv_f),
            fmt_q(&surv_g)
        )));
    }
    let alpha = vec![-Q::one(); n];
    let mut beta = vec![Q::zero(); n];
    for s in k.iter() {
        if g.marginal(s).is_zero() {
            continue;
        }
        let surv = g.count_cdf(s, k)?.survival(m);
        if surv.is_zero() {
            return Err(SimilError::Degenerate(format!(
                "count survival is zero at {} under G, interaction weight undefined",
                g.space().label(s)
            )));
        }
        beta[s] = Q::one() / surv;
    }
    let game = PrivateValueGame::new(
        g.space().clone(),
        g.players(),
        alpha,
        beta,
        Aggregator::threshold(m, g.players())?,
    )?;
    let pivot_net_g = game.net_payoff(g, k, s_star)?;
    let pivot_net_f = game.net_payoff(f, k, s_star)?;
    debug_assert!(pivot_net_g.is_zero());
    let bound_f = game.enumerate_equilibria(f)?.stats.max_p;
    let bound_g = game.enumerate_equilibria(g)?.stats.max_p;
    Ok(WitnessPackage {
        family: WitnessFamily::Scad,
        game: WitnessGame::Private(game),
        strategy: WitnessStrategy::Set(k),
        direction: Direction::MaxParticipationDrops,
        pivot: s_star,
        certification: Certification { pivot_net_f, pivot_net_g, bound_f, bound_g },
    })
}

/// Congestion game certifying failure of the reversed inclusion: the
/// strategy is an equilibrium under F (every K-signal exactly indifferent)
/// but the violating signal strictly leaves under G.
pub fn witness_congestion(
    f: &JointDist,
    g: &JointDist,
    violation: &Violation,
) -> Result<WitnessPackage> {
    f.check_compatible(g)?;
    let (s_star, k) = expect_set_violation(violation)?;
    let n = g.space().n();
    if !k.contains(s_star) {
        return Err(SimilError::Invalid("violating signal must lie in its set".into()));
    }
    let f_val = f.cond_prob(s_star, k)?;
    let g_val = g.cond_prob(s_star, k)?;
    if f_val >= g_val {
        return Err(SimilError::NotViolated(format!(
            "conditional mass of the set did not fall: {} vs {}",
            fmt_q(&f_val),
            fmt_q(&g_val)
        )));
    }
    let others = Q::from_integer(((g.players() - 1) as u64).into());
    let mut alpha = Vec::with_capacity(n);
    let mut beta = vec![Q::zero(); n];
    for s in 0..n {
        alpha.push(if k.contains(s) { Q::one() } else { -Q::one() });
    }
    for s in k.iter() {
        if f.marginal(s).is_zero() {
            continue;
        }
        let expected = f.cond_prob(s, k)? * &others;
        if expected.is_zero() {
            return Err(SimilError::Degenerate(format!(
                "expected participation is zero at {} under F, weight undefined",
                f.space().label(s)
            )));
        }
        beta[s] = -Q::one() / expected;
    }
    let game = PrivateValueGame::new(
        g.space().clone(),
        g.players(),
        alpha,
        beta,
        Aggregator::identity(),
    )?;
    let pivot_net_f = game.net_payoff(f, k, s_star)?;
    let pivot_net_g = game.net_payoff(g, k, s_star)?;
    debug_assert!(pivot_net_f.is_zero());
    let bound_f = f.set_mass(k);
    let bound_g = g.set_mass(k);
    Ok(WitnessPackage {
        family: WitnessFamily::Congestion,
        game: WitnessGame::Private(game),
        strategy: WitnessStrategy::Set(k),
        direction: Direction::InclusionFails,
        pivot: s_star,
        certification: Certification { pivot_net_f, pivot_net_g, bound_f, bound_g },
    })
}

fn expect_statewise_contour(v: &Violation) -> Result<(usize, usize, usize, ContourDir)> {
    if let Violation::State { theta, inner } = v {
        if let Violation::Contour { s, s_hat, dir, .. } = inner.as_ref() {
            return Ok((*theta, *s, *s_hat, *dir));
        }
    }
    Err(SimilError::Invalid(
        "expected a statewise contour violation certificate".into(),
    ))
}

/// Posterior of the equilibrium-side family; identical across the pair
/// because per-state marginals and the prior agree.
fn posteriors_checked(f: &StateFamily, g: &StateFamily) -> Result<Vec<Vec<Q>>> {
    g.check_compatible(f)?;
    if let Some((theta, s, a, b)) = g.marginal_mismatch(f) {
        return Err(SimilError::Mismatch(format!(
            "per-state marginals differ at state {}, signal {}: {} vs {}",
            g.states().label(theta),
            g.space().label(s),
            fmt_q(&b),
            fmt_q(&a)
        )));
    }
    let report = g.affine_independence();
    match report.dependence {
        Some(cert) => {
            let formatted: Vec<String> = cert.iter().map(fmt_q).collect();
            Err(SimilError::Degenerate(format!(
                "posteriors are affinely dependent with coefficients [{}]",
                formatted.join(", ")
            )))
        }
        None => Ok(report.posteriors),
    }
}

/// Common-value game from a statewise contour violation at one state.
/// The up-contour case pins the violating signal as the indifferent top of
/// the participation set and certifies a strict drop in maximal cutoff
/// participation; the down-contour case mirrors it and certifies a strict
/// rise in minimal cutoff participation.
pub fn witness_common(
    ffam: &StateFamily,
    gfam: &StateFamily,
    violation: &Violation,
) -> Result<WitnessPackage> {
    let (theta_star, s_tilde, s_hat, dir) = expect_statewise_contour(violation)?;
    let mu = posteriors_checked(ffam, gfam)?;
    let n = gfam.space().n();
    let players = gfam.players();
    let contour = match dir {
        ContourDir::Up => gfam.space().upset(s_hat),
        ContourDir::Down => gfam.space().downset(s_hat),
    };
    if mu[s_tilde][theta_star].is_zero() {
        return Err(SimilError::Degenerate(
            "the violating state has zero posterior weight at the violating signal".into(),
        ));
    }
    let g_cond = gfam.per_state(theta_star).cond_prob(s_tilde, contour)?;
    let f_cond = ffam.per_state(theta_star).cond_prob(s_tilde, contour)?;
    if f_cond >= g_cond {
        return Err(SimilError::NotViolated(format!(
            "contour conditional did not fall: {} vs {}",
            fmt_q(&f_cond),
            fmt_q(&g_cond)
        )));
    }
    // Interaction term of signal s at the candidate strategy, under G.
    let weight = |s: usize, p: SigSet| -> Result<Q> {
        if mu[s][theta_star].is_zero() {
            return Ok(Q::zero());
        }
        Ok(&mu[s][theta_star] * gfam.per_state(theta_star).cond_prob(s, p)?)
    };
    let (sigma_set, a_idx, b_idx, direction) = match dir {
        ContourDir::Up => {
            let p = gfam.space().upset(s_hat);
            let a: Vec<usize> = (0..s_hat).collect();
            let b: Vec<usize> = (s_hat..n).filter(|&s| s != s_tilde).collect();
            (p, a, b, Direction::MaxParticipationDrops)
        }
        ContourDir::Down => {
            let p = gfam.space().upset(s_hat + 1);
            let a: Vec<usize> = (0..=s_hat).filter(|&s| s != s_tilde).collect();
            let b: Vec<usize> = ((s_hat + 1)..n).collect();
            (p, a, b, Direction::MinParticipationRises)
        }
    };
    let a_pts: Vec<Vec<Q>> = a_idx.iter().map(|&s| mu[s].clone()).collect();
    let b_pts: Vec<Vec<Q>> = b_idx.iter().map(|&s| mu[s].clone()).collect();
    let sf = separating_functional(&a_pts, &mu[s_tilde], &b_pts)?;
    let l_x = weight(s_tilde, sigma_set)?;
    // Both incentive gaps are affine in the interaction scale k and
    // strictly positive at k = 0; collect the binding upper bounds.
    let mut k_max: Option<Q> = None;
    let mut tighten = |bound: Q| {
        k_max = Some(match k_max.take() {
            Some(cur) if cur <= bound => cur,
            _ => bound,
        });
    };
    match dir {
        ContourDir::Up => {
            // A-side worst case interaction is k itself.
            if l_x < Q::one() {
                tighten(Q::one() / (Q::one() - &l_x));
            }
            for &s in &b_idx {
                let slope = weight(s, sigma_set)? - &l_x;
                if slope.is_negative() {
                    tighten(Q::one() / -slope);
                }
            }
        }
        ContourDir::Down => {
            for &s in &a_idx {
                let slope = &l_x - weight(s, sigma_set)?;
                if slope.is_negative() {
                    tighten(Q::one() / -slope);
                }
            }
            // B-side worst case interaction is zero.
            if l_x.is_positive() {
                tighten(Q::one() / &l_x);
            }
        }
    }
    let k = match k_max {
        Some(bound) => bound / Q::from_integer(2.into()),
        None => Q::one(),
    };
    let shift = &sf.at_x + &k * &l_x;
    let alpha: Vec<Q> = sf.coefficients.iter().map(|c| c - &shift).collect();
    let mut beta = vec![Q::zero(); gfam.n_states()];
    beta[theta_star] = &k * fraction(players);
    let game = CommonValueGame::new(
        gfam.states().clone(),
        players,
        alpha,
        beta,
        Aggregator::identity(),
    )?;
    let pivot_net_g = game.net_payoff(gfam, sigma_set, s_tilde)?;
    let pivot_net_f = game.net_payoff(ffam, sigma_set, s_tilde)?;
    debug_assert!(pivot_net_g.is_zero());
    let cutoff = CutoffStrategy::from_set(sigma_set, n)
        .expect("contour strategies are cutoffs");
    let f_stats = game.enumerate_cutoff_equilibria(ffam)?.stats;
    let g_stats = game.enumerate_cutoff_equilibria(gfam)?.stats;
    let (bound_f, bound_g) = match direction {
        Direction::MaxParticipationDrops => (f_stats.eqmaxp, g_stats.eqmaxp),
        _ => (f_stats.eqminp, g_stats.eqminp),
    };
    Ok(WitnessPackage {
        family: WitnessFamily::Common,
        game: WitnessGame::Common(game),
        strategy: WitnessStrategy::Cutoff(cutoff),
        direction,
        pivot: s_tilde,
        certification: Certification { pivot_net_f, pivot_net_g, bound_f, bound_g },
    })
}

fn expect_contour(v: &Violation) -> Result<(usize, usize, ContourDir)> {
    match v {
        Violation::Contour { s, s_hat, dir, .. } => Ok((*s, *s_hat, *dir)),
        _ => Err(SimilError::Invalid(
            "expected a contour violation certificate".into(),
        )),
    }
}

/// Constant-interaction common-value game from a contour violation on the
/// prior mixtures. Certifies membership-only failure of cutoff inclusion:
/// the cutoff is an equilibrium under G's family but not under F's.
pub fn witness_separable(
    ffam: &StateFamily,
    gfam: &StateFamily,
    violation: &Violation,
) -> Result<WitnessPackage> {
    let (s_tilde, s_hat, dir) = expect_contour(violation)?;
    let mu = posteriors_checked(ffam, gfam)?;
    let n = gfam.space().n();
    let players = gfam.players();
    let others = Q::from_integer(((players - 1) as u64).into());
    let g_mix = gfam.mix();
    let f_mix = ffam.mix();
    let contour = match dir {
        ContourDir::Up => gfam.space().upset(s_hat),
        ContourDir::Down => gfam.space().downset(s_hat),
    };
    let g_cond = g_mix.cond_prob(s_tilde, contour)?;
    let f_cond = f_mix.cond_prob(s_tilde, contour)?;
    if f_cond >= g_cond {
        return Err(SimilError::NotViolated(format!(
            "mixture contour conditional did not fall: {} vs {}",
            fmt_q(&f_cond),
            fmt_q(&g_cond)
        )));
    }
    match dir {
        ContourDir::Up => {
            let sigma_set = gfam.space().upset(s_hat);
            let a_idx: Vec<usize> = (0..s_hat).collect();
            let b_idx: Vec<usize> = (s_hat..n).filter(|&s| s != s_tilde).collect();
            let a_pts: Vec<Vec<Q>> = a_idx.iter().map(|&s| mu[s].clone()).collect();
            let b_pts: Vec<Vec<Q>> = b_idx.iter().map(|&s| mu[s].clone()).collect();
            let sf = separating_functional(&a_pts, &mu[s_tilde], &b_pts)?;
            let u = |s: usize| dot(&sf.coefficients, &mu[s]);
            let w = |s: usize| -> Result<Q> { Ok(g_mix.cond_prob(s, sigma_set)? * &others) };
            let u_star = sf.at_x.clone();
            let w_star = w(s_tilde)?;
            // Shift c ranges over (u_star, c_max): below every B-side
            // value and below each A-side cap where the interaction ratio
            // exceeds one.
            let mut c_max: Option<Q> = sf.min_b.clone();
            for &s in &a_idx {
                let w_s = w(s)?;
                if w_s > w_star {
                    let cap = (&u_star * &w_s - u(s) * &w_star) / (&w_s - &w_star);
                    c_max = Some(match c_max.take() {
                        Some(cur) if cur <= cap => cur,
                        _ => cap,
                    });
                }
            }
            let c = match c_max {
                Some(top) => (&u_star + &top) / Q::from_integer(2.into()),
                None => &u_star + Q::one(),
            };
            let beta_val = (&c - &u_star) / &w_star;
            debug_assert!(beta_val.is_positive());
            let alpha: Vec<Q> = sf.coefficients.iter().map(|v| v - &c).collect();
            let beta = vec![beta_val; gfam.n_states()];
            finish_separable(ffam, gfam, alpha, beta, sigma_set, s_tilde, n, players)
        }
        ContourDir::Down => {
            let sigma_set = gfam.space().upset(s_hat + 1);
            let a_idx: Vec<usize> = (0..=s_hat).filter(|&s| s != s_tilde).collect();
            let b_idx: Vec<usize> = ((s_hat + 1)..n).collect();
            let a_pts: Vec<Vec<Q>> = a_idx.iter().map(|&s| mu[s].clone()).collect();
            let b_pts: Vec<Vec<Q>> = b_idx.iter().map(|&s| mu[s].clone()).collect();
            let sf = separating_functional(&a_pts, &mu[s_tilde], &b_pts)?;
            let half = Q::one() / Q::from_integer(2.into());
            // Normalize so the pivot sits at -1/2: A-side at or below -3/2,
            // B-side at or above +1/2.
            let offset = &sf.at_x + &half;
            let u_hat = |s: usize| dot(&sf.coefficients, &mu[s]) - &offset;
            let w = |s: usize| -> Result<Q> { Ok(g_mix.cond_prob(s, sigma_set)? * &others) };
            let w_star = w(s_tilde)?;
            let mut scale = Q::one();
            let mut raise = |lower: Q| {
                let doubled = lower * Q::from_integer(2.into());
                if doubled > scale {
                    scale = doubled;
                }
            };
            for &s in &b_idx {
                let gap = &w_star - w(s)?;
                if gap.is_positive() {
                    raise(gap / (u_hat(s) + &half));
                }
            }
            for &s in &a_idx {
                let gap = w(s)? - &w_star;
                if gap.is_positive() {
                    raise(gap / -(u_hat(s) + &half));
                }
            }
            let b_shift = &scale * &half - &w_star;
            let alpha: Vec<Q> = sf
                .coefficients
                .iter()
                .map(|v| &scale * (v - &offset) + &b_shift)
                .collect();
            let beta = vec![Q::one(); gfam.n_states()];
            finish_separable(ffam, gfam, alpha, beta, sigma_set, s_tilde, n, players)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn finish_separable(
    ffam: &StateFamily,
    gfam: &StateFamily,
    alpha: Vec<Q>,
    beta: Vec<Q>,
    sigma_set: SigSet,
    pivot: usize,
    n: usize,
    players: usize,
) -> Result<WitnessPackage> {
    let game = CommonValueGame::new(
        gfam.states().clone(),
        players,
        alpha,
        beta,
        Aggregator::identity(),
    )?;
    let pivot_net_g = game.net_payoff(gfam, sigma_set, pivot)?;
    let pivot_net_f = game.net_payoff(ffam, sigma_set, pivot)?;
    debug_assert!(pivot_net_g.is_zero());
    let cutoff = CutoffStrategy::from_set(sigma_set, n)
        .expect("contour strategies are cutoffs");
    let bound_f = ffam.mix().set_mass(sigma_set);
    let bound_g = gfam.mix().set_mass(sigma_set);
    Ok(WitnessPackage {
        family: WitnessFamily::Separable,
        game: WitnessGame::Common(game),
        strategy: WitnessStrategy::Cutoff(cutoff),
        direction: Direction::InclusionFails,
        pivot,
        certification: Certification { pivot_net_f, pivot_net_g, bound_f, bound_g },
    })
}

/// First contour condition that F breaks against G, scanning up-contours
/// over all signals before down-contours so the up form is preferred;
/// restrict to one direction by passing it.
pub fn find_contour_violation(
    f: &JointDist,
    g: &JointDist,
    prefer: Option<ContourDir>,
) -> Result<Option<Violation>> {
    f.check_compatible(g)?;
    if let Some((s, lhs, rhs)) = f.marginal_mismatch(g) {
        return Ok(Some(Violation::MarginalMismatch { s, lhs, rhs }));
    }
    let n = f.space().n();
    let dirs: &[ContourDir] = match prefer {
        Some(ContourDir::Up) => &[ContourDir::Up],
        Some(ContourDir::Down) => &[ContourDir::Down],
        None => &[ContourDir::Up, ContourDir::Down],
    };
    for &dir in dirs {
        for s in 0..n {
            if f.marginal(s).is_zero() {
                continue;
            }
            let hats: Vec<usize> = match dir {
                ContourDir::Up => (0..=s).collect(),
                ContourDir::Down => (s..n).collect(),
            };
            for s_hat in hats {
                let set = match dir {
                    ContourDir::Up => f.space().upset(s_hat),
                    ContourDir::Down => f.space().downset(s_hat),
                };
                let lhs = f.cond_prob(s, set)?;
                let rhs = g.cond_prob(s, set)?;
                if lhs < rhs {
                    return Ok(Some(Violation::Contour { s, s_hat, dir, lhs, rhs }));
                }
            }
        }
    }
    Ok(None)
}

/// Statewise variant: scans the differing states in order, up-contours
/// over all of them before down-contours.
pub fn find_statewise_contour_violation(
    ffam: &StateFamily,
    gfam: &StateFamily,
    prefer: Option<ContourDir>,
) -> Result<Option<Violation>> {
    ffam.check_compatible(gfam)?;
    let dirs: &[ContourDir] = match prefer {
        Some(ContourDir::Up) => &[ContourDir::Up],
        Some(ContourDir::Down) => &[ContourDir::Down],
        None => &[ContourDir::Up, ContourDir::Down],
    };
    for &dir in dirs {
        for theta in ffam.differing_states(gfam) {
            if let Some(v) = find_contour_violation(
                ffam.per_state(theta),
                gfam.per_state(theta),
                Some(dir),
            )? {
                return Ok(Some(Violation::State { theta, inner: Box::new(v) }));
            }
        }
    }
    Ok(None)
}

/// Pipeline: check the pairwise order and build the requested private
/// witness from its certificate.
pub fn build_private_witness(
    family: WitnessFamily,
    f: &JointDist,
    g: &JointDist,
) -> Result<WitnessPackage> {
    let verdict = check_cad(f, g)?;
    let violation = match verdict.violation {
        None => {
            return Err(SimilError::NotViolated(
                "the pairwise order holds; no witness exists".into(),
            ))
        }
        Some(Violation::MarginalMismatch { s, .. }) => {
            return Err(SimilError::Mismatch(format!(
                "marginals differ at {}; witnesses require equal marginals",
                f.space().label(s)
            )))
        }
        Some(v) => cad_set_certificate(f, g, &v)?,
    };
    match family {
        WitnessFamily::PrivateMax => witness_private_max(f, g, &violation),
        WitnessFamily::PrivateMin => witness_private_min(f, g, &violation),
        WitnessFamily::Congestion => witness_congestion(f, g, &violation),
        _ => Err(SimilError::Invalid(
            "this pipeline builds pairwise-certificate witnesses".into(),
        )),
    }
}

pub fn build_scad_witness(f: &JointDist, g: &JointDist) -> Result<WitnessPackage> {
    let verdict = check_scad(f, g)?;
    match verdict.violation {
        None => Err(SimilError::NotViolated(
            "the count-dominance order holds; no witness exists".into(),
        )),
        Some(Violation::MarginalMismatch { s, .. }) => Err(SimilError::Mismatch(format!(
            "marginals differ at {}; witnesses require equal marginals",
            f.space().label(s)
        ))),
        Some(v) => witness_scad(f, g, &v),
    }
}

pub fn build_common_witness(
    ffam: &StateFamily,
    gfam: &StateFamily,
    prefer: Option<ContourDir>,
) -> Result<WitnessPackage> {
    match find_statewise_contour_violation(ffam, gfam, prefer)? {
        None => Err(SimilError::NotViolated(
            "the statewise contour order holds; no witness exists".into(),
        )),
        Some(v) => witness_common(ffam, gfam, &v),
    }
}

pub fn build_separable_witness(
    ffam: &StateFamily,
    gfam: &StateFamily,
    prefer: Option<ContourDir>,
) -> Result<WitnessPackage> {
    ffam.check_compatible(gfam)?;
    if let Some((theta, s, a, b)) = gfam.marginal_mismatch(ffam) {
        return Err(SimilError::Mismatch(format!(
            "per-state marginals differ at state {}, signal {}: {} vs {}",
            gfam.states().label(theta),
            gfam.space().label(s),
            fmt_q(&b),
            fmt_q(&a)
        )));
    }
    match find_contour_violation(&ffam.mix(), &gfam.mix(), prefer)? {
        None => Err(SimilError::NotViolated(
            "the mixture contour order holds; no witness exists".into(),
        )),
        Some(v) => witness_separable(ffam, gfam, &v),
    }
}

/// Distribution pair a witness package is verified against.
pub enum WitnessInputs<'a> {
    Private { f: &'a JointDist, g: &'a JointDist },
    Families { f: &'a StateFamily, g: &'a StateFamily },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    /// Strategy is an equilibrium on its claimed side.
    pub equilibrium_holds: bool,
    /// Strategy fails to be an equilibrium on the other side.
    pub other_side_fails: bool,
    /// Net payoff at the pivot is exactly zero on the equilibrium side.
    pub pivot_indifferent: bool,
    /// The claimed participation bound strictly changed (vacuous for
    /// membership-only packages).
    pub bound_strictly_changes: bool,
    pub recomputed: Certification,
    pub ok: bool,
}

/// Replays a package from its bundle: equilibrium membership on each side,
/// exact pivotal indifference, and the claimed bound change, using only
/// game and distribution operations.
pub fn verify_witness(pkg: &WitnessPackage, inputs: WitnessInputs) -> Result<VerifyReport> {
    let eq_under_f = pkg.equilibrium_under_f();
    match (&pkg.game, inputs) {
        (WitnessGame::Private(game), WitnessInputs::Private { f, g }) => {
            let n = game.space().n();
            let sigma = pkg.strategy.as_set(n);
            let check_f = game.is_equilibrium(f, sigma)?.is_equilibrium;
            let check_g = game.is_equilibrium(g, sigma)?.is_equilibrium;
            let (equilibrium_holds, other_side_fails) = if eq_under_f {
                (check_f, !check_g)
            } else {
                (check_g, !check_f)
            };
            let pivot_net_f = game.net_payoff(f, sigma, pkg.pivot)?;
            let pivot_net_g = game.net_payoff(g, sigma, pkg.pivot)?;
            let pivot_indifferent =
                if eq_under_f { pivot_net_f.is_zero() } else { pivot_net_g.is_zero() };
            let (bound_f, bound_g, bound_strictly_changes) = match pkg.direction {
                Direction::MaxParticipationDrops => {
                    let bf = game.enumerate_equilibria(f)?.stats.max_p;
                    let bg = game.enumerate_equilibria(g)?.stats.max_p;
                    let strict = bf < bg;
                    (bf, bg, strict)
                }
                Direction::MinParticipationRises => {
                    let bf = game.enumerate_equilibria(f)?.stats.min_p;
                    let bg = game.enumerate_equilibria(g)?.stats.min_p;
                    let strict = bf > bg;
                    (bf, bg, strict)
                }
                Direction::InclusionFails => {
                    (f.set_mass(sigma), g.set_mass(sigma), true)
                }
            };
            let recomputed = Certification { pivot_net_f, pivot_net_g, bound_f, bound_g };
            let ok = equilibrium_holds
                && other_side_fails
                && pivot_indifferent
                && bound_strictly_changes;
            Ok(VerifyReport {
                equilibrium_holds,
                other_side_fails,
                pivot_indifferent,
                bound_strictly_changes,
                recomputed,
                ok,
            })
        }
        (WitnessGame::Common(game), WitnessInputs::Families { f, g }) => {
            let n = f.space().n();
            let sigma = pkg.strategy.as_set(n);
            let check_f = game.is_equilibrium(f, sigma)?.is_equilibrium;
            let check_g = game.is_equilibrium(g, sigma)?.is_equilibrium;
            let equilibrium_holds = check_g;
            let other_side_fails = !check_f;
            let pivot_net_f = game.net_payoff(f, sigma, pkg.pivot)?;
            let pivot_net_g = game.net_payoff(g, sigma, pkg.pivot)?;
            let pivot_indifferent = pivot_net_g.is_zero();
            let (bound_f, bound_g, bound_strictly_changes) = match pkg.direction {
                Direction::MaxParticipationDrops => {
                    let bf = game.enumerate_cutoff_equilibria(f)?.stats.eqmaxp;
                    let bg = game.enumerate_cutoff_equilibria(g)?.stats.eqmaxp;
                    let strict = bf < bg;
                    (bf, bg, strict)
                }
                Direction::MinParticipationRises => {
                    let bf = game.enumerate_cutoff_equilibria(f)?.stats.eqminp;
                    let bg = game.enumerate_cutoff_equilibria(g)?.stats.eqminp;
                    let strict = bf > bg;
                    (bf, bg, strict)
                }
                Direction::InclusionFails => {
                    (f.mix().set_mass(sigma), g.mix().set_mass(sigma), true)
                }
            };
            let recomputed = Certification { pivot_net_f, pivot_net_g, bound_f, bound_g };
            let ok = equilibrium_holds
                && other_side_fails
                && pivot_indifferent
                && bound_strictly_changes;
            Ok(VerifyReport {
                equilibrium_holds,
                other_side_fails,
                pivot_indifferent,
                bound_strictly_changes,
                recomputed,
                ok,
            })
        }
        _ => Err(SimilError::Invalid(
            "verification inputs do not match the package's game kind".into(),
        )),
    }
}
