//! Binary-action games with aggregate interaction and their symmetric
//! pure-strategy equilibria.
//!
//! A strategy is one participation set applied by every player. Incentive
//! conditions are weak: an exactly indifferent signal supports either
//! action. Signals with zero marginal probability impose no condition.

use crate::dist::{JointDist, NonExchJointDist, SigSet, SignalSpace};
use crate::error::{Result, SimilError};
use crate::family::{StateFamily, StateSpace};
use crate::num::{fmt_q, Q};
use num_traits::{One, Signed, Zero};

/// Payoff response to the aggregate participation count of the other
/// players: affine k*count + l with k > 0, or an explicit nondecreasing
/// table over counts 0..=players-1 that increases somewhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Aggregator {
    Affine { k: Q, l: Q },
    Table(Vec<Q>),
}

impl Aggregator {
    pub fn affine(k: Q, l: Q) -> Result<Self> {
        if !k.is_positive() {
            return Err(SimilError::Invalid(format!(
                "affine aggregator slope must be positive, got {}",
                fmt_q(&k)
            )));
        }
        Ok(Aggregator::Affine { k, l })
    }

    pub fn identity() -> Self {
        Aggregator::Affine { k: Q::one(), l: Q::zero() }
    }

    pub fn table(values: Vec<Q>) -> Result<Self> {
        if values.len() < 2 {
            return Err(SimilError::Invalid(
                "aggregator table needs one value per count 0..=players-1".into(),
            ));
        }
        for w in values.windows(2) {
            if w[0] > w[1] {
                return Err(SimilError::Invalid("aggregator table must be nondecreasing".into()));
            }
        }
        if values.first() == values.last() {
            return Err(SimilError::Invalid(
                "aggregator table must increase somewhere".into(),
            ));
        }
        Ok(Aggregator::Table(values))
    }

    /// Indicator table 1{count >= m}.
    pub fn threshold(m: usize, players: usize) -> Result<Self> {
        if m == 0 || m > players - 1 {
            return Err(SimilError::Invalid(format!(
                "threshold {m} outside 1..={}",
                players - 1
            )));
        }
        Self::table(
            (0..players)
                .map(|c| if c >= m { Q::one() } else { Q::zero() })
                .collect(),
        )
    }

    pub fn check_players(&self, players: usize) -> Result<()> {
        if let Aggregator::Table(values) = self {
            if values.len() != players {
                return Err(SimilError::Invalid(format!(
                    "aggregator table has {} entries, expected {} (one per count)",
                    values.len(),
                    players
                )));
            }
        }
        Ok(())
    }

    pub fn eval(&self, count: usize) -> Q {
        match self {
            Aggregator::Affine { k, l } => k * Q::from_integer((count as u64).into()) + l,
            Aggregator::Table(values) => values[count].clone(),
        }
    }

    /// E[h(C)] under a count pmf.
    pub fn expect(&self, pmf: &[Q]) -> Q {
        match self {
            Aggregator::Affine { k, l } => {
                let mean: Q = pmf
                    .iter()
                    .enumerate()
                    .map(|(c, p)| p * Q::from_integer((c as u64).into()))
                    .sum();
                k * mean + l
            }
            Aggregator::Table(values) => pmf.iter().zip(values).map(|(p, v)| p * v).sum(),
        }
    }

    pub fn is_nondecreasing(&self) -> bool {
        match self {
            Aggregator::Affine { k, .. } => !k.is_negative(),
            Aggregator::Table(values) => values.windows(2).all(|w| w[0] <= w[1]),
        }
    }
}

/// Per-signal incentive condition from one equilibrium check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IcEntry {
    /// Player index for ordered distributions; None for exchangeable ones.
    pub player: Option<usize>,
    pub s: usize,
    pub participating: bool,
    pub net: Q,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquilibriumCheck {
    pub is_equilibrium: bool,
    pub report: Vec<IcEntry>,
}

/// Participation statistics over an enumerated equilibrium set, using the
/// marginal mass of each participation set. Empty-set conventions:
/// max = 0, min = 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParticipationStats {
    pub max_p: Q,
    pub min_p: Q,
    pub argmax: Option<SigSet>,
    pub argmin: Option<SigSet>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquilibriumSet {
    pub strategies: Vec<SigSet>,
    pub stats: ParticipationStats,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetRelation {
    Equal,
    /// Left set strictly contains the right one.
    LeftSuperset,
    /// Left set strictly contained in the right one.
    LeftSubset,
    Incomparable,
}

fn relation_of<T: PartialEq>(left: &[T], right: &[T]) -> SetRelation {
    let l_in_r = left.iter().all(|x| right.contains(x));
    let r_in_l = right.iter().all(|x| left.contains(x));
    match (l_in_r, r_in_l) {
        (true, true) => SetRelation::Equal,
        (false, true) => SetRelation::LeftSuperset,
        (true, false) => SetRelation::LeftSubset,
        (false, false) => SetRelation::Incomparable,
    }
}

#[derive(Debug, Clone)]
pub struct InclusionReport {
    pub relation: SetRelation,
    pub left: EquilibriumSet,
    pub right: EquilibriumSet,
}

/// Game with private values: own signal enters the payoff directly.
/// Net payoff from participating at signal s against participation set P:
/// alpha(s) + beta(s) * E[h(count of others in P) | s].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrivateValueGame {
    space: SignalSpace,
    players: usize,
    alpha: Vec<Q>,
    beta: Vec<Q>,
    h: Aggregator,
}

impl PrivateValueGame {
    pub fn new(
        space: SignalSpace,
        players: usize,
        alpha: Vec<Q>,
        beta: Vec<Q>,
        h: Aggregator,
    ) -> Result<Self> {
        if alpha.len() != space.n() || beta.len() != space.n() {
            return Err(SimilError::Invalid(
                "alpha and beta need one entry per signal".into(),
            ));
        }
        h.check_players(players)?;
        let any_pos = beta.iter().any(|b| b.is_positive());
        let any_neg = beta.iter().any(|b| b.is_negative());
        if any_pos && any_neg {
            return Err(SimilError::Invalid(
                "interaction coefficients must be single-signed".into(),
            ));
        }
        Ok(Self { space, players, alpha, beta, h })
    }

    pub fn space(&self) -> &SignalSpace {
        &self.space
    }

    pub fn players(&self) -> usize {
        self.players
    }

    pub fn alpha(&self) -> &[Q] {
        &self.alpha
    }

    pub fn beta(&self) -> &[Q] {
        &self.beta
    }

    pub fn aggregator(&self) -> &Aggregator {
        &self.h
    }

    pub fn is_coordination(&self) -> bool {
        self.beta.iter().all(|b| !b.is_negative())
    }

    pub fn is_congestion(&self) -> bool {
        self.beta.iter().all(|b| !b.is_positive())
    }

    /// Pairwise-distinct (alpha, beta) rows across signals.
    pub fn signals_payoff_relevant(&self) -> bool {
        for i in 0..self.alpha.len() {
            for j in (i + 1)..self.alpha.len() {
                if self.alpha[i] == self.alpha[j] && self.beta[i] == self.beta[j] {
                    return false;
                }
            }
        }
        true
    }

    fn check_dist(&self, dist: &JointDist) -> Result<()> {
        if dist.space() != &self.space {
            return Err(SimilError::Mismatch(
                "game and distribution signal spaces differ".into(),
            ));
        }
        if dist.players() != self.players {
            return Err(SimilError::Mismatch(
                "game and distribution player counts differ".into(),
            ));
        }
        Ok(())
    }

    pub fn net_payoff(&self, dist: &JointDist, sigma: SigSet, s: usize) -> Result<Q> {
        self.check_dist(dist)?;
        let pmf = dist.count_pmf(s, sigma)?;
        Ok(&self.alpha[s] + &self.beta[s] * self.h.expect(&pmf))
    }

    pub fn is_equilibrium(&self, dist: &JointDist, sigma: SigSet) -> Result<EquilibriumCheck> {
        self.check_dist(dist)?;
        let mut report = Vec::new();
        let mut all_ok = true;
        for s in 0..self.space.n() {
            if dist.marginal(s).is_zero() {
                continue;
            }
            let net = self.net_payoff(dist, sigma, s)?;
            let participating = sigma.contains(s);
            let ok = if participating { !net.is_negative() } else { !net.is_positive() };
            all_ok &= ok;
            report.push(IcEntry { player: None, s, participating, net, ok });
        }
        Ok(EquilibriumCheck { is_equilibrium: all_ok, report })
    }

    /// Checks all 2^n participation sets in ascending bitmask order.
    pub fn enumerate_equilibria(&self, dist: &JointDist) -> Result<EquilibriumSet> {
        self.check_dist(dist)?;
        let n = self.space.n();
        let mut strategies = Vec::new();
        for bits in 0..(1u32 << n) {
            let sigma = SigSet(bits as u16);
            if self.is_equilibrium(dist, sigma)?.is_equilibrium {
                strategies.push(sigma);
            }
        }
        let stats = participation_stats(dist, &strategies);
        Ok(EquilibriumSet { strategies, stats })
    }

    pub fn compare_equilibrium_sets(
        &self,
        f: &JointDist,
        g: &JointDist,
    ) -> Result<InclusionReport> {
        f.check_compatible(g)?;
        let left = self.enumerate_equilibria(f)?;
        let right = self.enumerate_equilibria(g)?;
        let relation = relation_of(&left.strategies, &right.strategies);
        Ok(InclusionReport { relation, left, right })
    }
}

fn participation_stats(dist: &JointDist, strategies: &[SigSet]) -> ParticipationStats {
    let mut max_p = Q::zero();
    let mut min_p = Q::one();
    let mut argmax = None;
    let mut argmin = None;
    for &sigma in strategies {
        let mass = dist.set_mass(sigma);
        if argmax.is_none() || mass > max_p {
            max_p = mass.clone();
            argmax = Some(sigma);
        }
        if argmin.is_none() || mass < min_p {
            min_p = mass;
            argmin = Some(sigma);
        }
    }
    if strategies.is_empty() {
        max_p = Q::zero();
        min_p = Q::one();
    }
    ParticipationStats { max_p, min_p, argmax, argmin }
}

/// Upper-contour participation rule: cutoff index c in 1..=n+1 (1-based)
/// participates at the c-th lowest signal and above; c = n+1 participates
/// nowhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CutoffStrategy {
    pub c: usize,
}

impl CutoffStrategy {
    pub fn new(c: usize, n: usize) -> Result<Self> {
        if c == 0 || c > n + 1 {
            return Err(SimilError::Invalid(format!(
                "cutoff index {c} outside 1..={}",
                n + 1
            )));
        }
        Ok(CutoffStrategy { c })
    }

    pub fn set(&self, n: usize) -> SigSet {
        if self.c == n + 1 {
            SigSet::empty()
        } else {
            SigSet::from_indices(((self.c - 1)..n).collect::<Vec<_>>().as_slice())
        }
    }

    pub fn is_empty(&self, n: usize) -> bool {
        self.c == n + 1
    }

    /// Recognizes an upper contour set (or the empty set) as a cutoff.
    pub fn from_set(p: SigSet, n: usize) -> Option<CutoffStrategy> {
        if p.is_empty() {
            return Some(CutoffStrategy { c: n + 1 });
        }
        let lo = p.iter().next().unwrap();
        if p == SigSet::from_indices((lo..n).collect::<Vec<_>>().as_slice()) {
            Some(CutoffStrategy { c: lo + 1 })
        } else {
            None
        }
    }
}

/// Cutoff-equilibrium statistics. The empty cutoff is flagged by its index
/// n+1 and never enters the max/min; when no nonempty cutoff equilibrium
/// exists the conventions are max = 0, min = 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutoffStats {
    pub eqmaxp: Q,
    pub eqminp: Q,
    pub argmax: Option<CutoffStrategy>,
    pub argmin: Option<CutoffStrategy>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutoffSet {
    pub cutoffs: Vec<CutoffStrategy>,
    pub stats: CutoffStats,
}

#[derive(Debug, Clone)]
pub struct CutoffInclusionReport {
    pub relation: SetRelation,
    pub left: CutoffSet,
    pub right: CutoffSet,
}

/// Game with a common value: the payoff state is shared, signals matter
/// only through the posterior. Net payoff from participating at signal s:
/// sum over states of posterior(s)(theta) * [alpha(theta) + beta(theta) *
/// E[h(count of others in P) | theta, s]].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommonValueGame {
    states: StateSpace,
    players: usize,
    alpha: Vec<Q>,
    beta: Vec<Q>,
    h: Aggregator,
}

impl CommonValueGame {
    pub fn new(
        states: StateSpace,
        players: usize,
        alpha: Vec<Q>,
        beta: Vec<Q>,
        h: Aggregator,
    ) -> Result<Self> {
        if alpha.len() != states.n() || beta.len() != states.n() {
            return Err(SimilError::Invalid(
                "alpha and beta need one entry per state".into(),
            ));
        }
        if beta.iter().any(|b| b.is_negative()) {
            return Err(SimilError::Invalid(
                "state interaction coefficients must be nonnegative".into(),
            ));
        }
        h.check_players(players)?;
        Ok(Self { states, players, alpha, beta, h })
    }

    pub fn states(&self) -> &StateSpace {
        &self.states
    }

    pub fn players(&self) -> usize {
        self.players
    }

    pub fn alpha(&self) -> &[Q] {
        &self.alpha
    }

    pub fn beta(&self) -> &[Q] {
        &self.beta
    }

    pub fn aggregator(&self) -> &Aggregator {
        &self.h
    }

    /// Interaction coefficient constant across states.
    pub fn is_separable(&self) -> bool {
        self.beta.windows(2).all(|w| w[0] == w[1])
    }

    pub fn states_payoff_relevant(&self) -> bool {
        for i in 0..self.alpha.len() {
            for j in (i + 1)..self.alpha.len() {
                if self.alpha[i] == self.alpha[j] && self.beta[i] == self.beta[j] {
                    return false;
                }
            }
        }
        true
    }

    fn check_family(&self, family: &StateFamily) -> Result<()> {
        if family.states() != &self.states {
            return Err(SimilError::Mismatch("game and family state spaces differ".into()));
        }
        if family.players() != self.players {
            return Err(SimilError::Mismatch(
                "game and family player counts differ".into(),
            ));
        }
        Ok(())
    }

    pub fn net_payoff(&self, family: &StateFamily, sigma: SigSet, s: usize) -> Result<Q> {
        self.check_family(family)?;
        let posterior = family.posterior(s);
        let mut total = Q::zero();
        for theta in 0..self.states.n() {
            let w = &posterior[theta];
            if w.is_zero() {
                continue;
            }
            let interaction = if self.beta[theta].is_zero() {
                Q::zero()
            } else {
                let pmf = family.per_state(theta).count_pmf(s, sigma)?;
                &self.beta[theta] * self.h.expect(&pmf)
            };
            total += w * (&self.alpha[theta] + interaction);
        }
        Ok(total)
    }

    pub fn is_equilibrium(&self, family: &StateFamily, sigma: SigSet) -> Result<EquilibriumCheck> {
        self.check_family(family)?;
        let mut report = Vec::new();
        let mut all_ok = true;
        for s in 0..family.space().n() {
            let net = self.net_payoff(family, sigma, s)?;
            let participating = sigma.contains(s);
            let ok = if participating { !net.is_negative() } else { !net.is_positive() };
            all_ok &= ok;
            report.push(IcEntry { player: None, s, participating, net, ok });
        }
        Ok(EquilibriumCheck { is_equilibrium: all_ok, report })
    }

    /// Checks all n+1 cutoffs in ascending index order (full participation
    /// first, empty last).
    pub fn enumerate_cutoff_equilibria(&self, family: &StateFamily) -> Result<CutoffSet> {
        self.check_family(family)?;
        let n = family.space().n();
        let mix = family.mix();
        let mut cutoffs = Vec::new();
        for c in 1..=(n + 1) {
            let cutoff = CutoffStrategy { c };
            if self.is_equilibrium(family, cutoff.set(n))?.is_equilibrium {
                cutoffs.push(cutoff);
            }
        }
        let mut eqmaxp = Q::zero();
        let mut eqminp = Q::one();
        let mut argmax = None;
        let mut argmin = None;
        for &cutoff in cutoffs.iter().filter(|c| !c.is_empty(n)) {
            let mass = mix.set_mass(cutoff.set(n));
            if argmax.is_none() || mass > eqmaxp {
                eqmaxp = mass.clone();
                argmax = Some(cutoff);
            }
            if argmin.is_none() || mass < eqminp {
                eqminp = mass;
                argmin = Some(cutoff);
            }
        }
        if argmax.is_none() {
            eqmaxp = Q::zero();
            eqminp = Q::one();
        }
        Ok(CutoffSet { cutoffs, stats: CutoffStats { eqmaxp, eqminp, argmax, argmin } })
    }

    pub fn compare_cutoff_sets(
        &self,
        f: &StateFamily,
        g: &StateFamily,
    ) -> Result<CutoffInclusionReport> {
        f.check_compatible(g)?;
        let left = self.enumerate_cutoff_equilibria(f)?;
        let right = self.enumerate_cutoff_equilibria(g)?;
        let relation = relation_of(&left.cutoffs, &right.cutoffs);
        Ok(CutoffInclusionReport { relation, left, right })
    }
}

/// Net payoff for player `i` in a weighted-aggregate game on an ordered
/// distribution: alpha(s) + beta(s) * E[h(sum over j != i of weights[j] *
/// 1{s_j in P}) | s_i = s]. Affine aggregators take any nonnegative
/// weights; table aggregators require unit weights so the aggregate stays
/// a count.
pub fn nonexch_net_payoff(
    game: &PrivateValueGame,
    weights: &[Q],
    dist: &NonExchJointDist,
    sigma: SigSet,
    player: usize,
    s: usize,
) -> Result<Q> {
    if dist.space() != game.space() {
        return Err(SimilError::Mismatch(
            "game and distribution signal spaces differ".into(),
        ));
    }
    if dist.players() != game.players() {
        return Err(SimilError::Mismatch(
            "game and distribution player counts differ".into(),
        ));
    }
    if weights.len() != game.players() {
        return Err(SimilError::Invalid("one weight per player required".into()));
    }
    if weights.iter().any(|w| w.is_negative()) {
        return Err(SimilError::Invalid("weights must be nonnegative".into()));
    }
    let marg = dist.marginal_of(player, s)?;
    if marg.is_zero() {
        return Err(SimilError::ZeroMarginal(format!(
            "{} for player {}",
            dist.space().label(s),
            player
        )));
    }
    let alpha = &game.alpha()[s];
    let beta = &game.beta()[s];
    match game.aggregator() {
        Aggregator::Affine { k, l } => {
            let mut mean = Q::zero();
            for j in 0..game.players() {
                if j == player || weights[j].is_zero() {
                    continue;
                }
                mean += &weights[j] * dist.cond_pair(player, j, s, sigma)?;
            }
            Ok(alpha + beta * (k * mean + l))
        }
        Aggregator::Table(values) => {
            if weights.iter().any(|w| !w.is_one()) {
                return Err(SimilError::Unsupported(
                    "table aggregators require unit weights".into(),
                ));
            }
            let mut pmf = vec![Q::zero(); game.players()];
            for (key, m) in dist.entries() {
                if key[player] != s {
                    continue;
                }
                let count = key
                    .iter()
                    .enumerate()
                    .filter(|&(j, &sj)| j != player && sigma.contains(sj))
                    .count();
                pmf[count] += m;
            }
            for p in &mut pmf {
                *p /= &marg;
            }
            Ok(alpha + beta * values.iter().zip(&pmf).map(|(v, p)| v * p).sum::<Q>())
        }
    }
}

pub fn nonexch_is_equilibrium(
    game: &PrivateValueGame,
    weights: &[Q],
    dist: &NonExchJointDist,
    sigma: SigSet,
) -> Result<EquilibriumCheck> {
    let mut report = Vec::new();
    let mut all_ok = true;
    for player in 0..game.players() {
        for s in 0..game.space().n() {
            if dist.marginal_of(player, s)?.is_zero() {
                continue;
            }
            let net = nonexch_net_payoff(game, weights, dist, sigma, player, s)?;
            let participating = sigma.contains(s);
            let ok = if participating { !net.is_negative() } else { !net.is_positive() };
            all_ok &= ok;
            report.push(IcEntry { player: Some(player), s, participating, net, ok });
        }
    }
    Ok(EquilibriumCheck { is_equilibrium: all_ok, report })
}

pub fn nonexch_enumerate_equilibria(
    game: &PrivateValueGame,
    weights: &[Q],
    dist: &NonExchJointDist,
) -> Result<Vec<SigSet>> {
    let n = game.space().n();
    let mut out = Vec::new();
    for bits in 0..(1u32 << n) {
        let sigma = SigSet(bits as u16);
        if nonexch_is_equilibrium(game, weights, dist, sigma)?.is_equilibrium {
            out.push(sigma);
        }
    }
    Ok(out)
}
