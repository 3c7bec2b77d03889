//! Signal spaces and joint signal distributions in exact arithmetic.
//!
//! Exchangeable distributions are stored canonically as sorted multisets of
//! signal indices: the stored mass of a multiset is the total mass of all its
//! orderings, and every ordered query expands through the uniform rule
//! (mass / number of distinct orderings). Permutation invariance is therefore
//! structural. Desk-scale bounds: 2..=8 players, 1..=10 signals.

use crate::error::{Result, SimilError};
use crate::num::{fmt_q, Q};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

pub const MAX_PLAYERS: usize = 8;
pub const MAX_SIGNALS: usize = 10;

/// Ordered signal labels with strictly increasing rational values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignalSpace {
    labels: Vec<String>,
    values: Vec<Q>,
}

impl SignalSpace {
    pub fn new(labels: Vec<String>, values: Vec<Q>) -> Result<Self> {
        if labels.is_empty() || labels.len() != values.len() {
            return Err(SimilError::Invalid(
                "signal space needs matching nonempty labels and values".into(),
            ));
        }
        if labels.len() > MAX_SIGNALS {
            return Err(SimilError::Unsupported(format!(
                "{} signals exceeds the supported maximum {}",
                labels.len(),
                MAX_SIGNALS
            )));
        }
        for w in values.windows(2) {
            if w[0] >= w[1] {
                return Err(SimilError::Invalid(
                    "signal values must be strictly increasing".into(),
                ));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for l in &labels {
            if !seen.insert(l.clone()) {
                return Err(SimilError::Invalid(format!("duplicate signal label {l:?}")));
            }
        }
        Ok(Self { labels, values })
    }

    /// Space with labels equal to the canonical form of the values.
    pub fn from_values(values: Vec<Q>) -> Result<Self> {
        let labels = values.iter().map(fmt_q).collect();
        Self::new(labels, values)
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn value(&self, i: usize) -> &Q {
        &self.values[i]
    }

    pub fn values(&self) -> &[Q] {
        &self.values
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| SimilError::Parse(format!("unknown signal label {label:?}")))
    }

    pub fn full_set(&self) -> SigSet {
        SigSet::full(self.n())
    }

    /// Upper contour set {s : s >= the signal at `i`}.
    pub fn upset(&self, i: usize) -> SigSet {
        SigSet::from_indices((i..self.n()).collect::<Vec<_>>().as_slice())
    }

    /// Lower contour set {s : s <= the signal at `i`}.
    pub fn downset(&self, i: usize) -> SigSet {
        SigSet::from_indices((0..=i).collect::<Vec<_>>().as_slice())
    }

    pub fn interval(&self, lo: usize, hi: usize) -> SigSet {
        SigSet::from_indices((lo..=hi).collect::<Vec<_>>().as_slice())
    }

    pub fn set_labels(&self, set: SigSet) -> Vec<String> {
        set.iter().map(|i| self.labels[i].clone()).collect()
    }
}

/// Subset of signal indices as a bitmask (at most 10 signals).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SigSet(pub u16);

impl SigSet {
    pub fn empty() -> Self {
        SigSet(0)
    }

    pub fn full(n: usize) -> Self {
        SigSet(((1u32 << n) - 1) as u16)
    }

    pub fn singleton(i: usize) -> Self {
        SigSet(1 << i)
    }

    pub fn from_indices(indices: &[usize]) -> Self {
        let mut bits = 0u16;
        for &i in indices {
            bits |= 1 << i;
        }
        SigSet(bits)
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    pub fn with(&self, i: usize) -> Self {
        SigSet(self.0 | (1 << i))
    }

    pub fn without(&self, i: usize) -> Self {
        SigSet(self.0 & !(1 << i))
    }

    pub fn union(&self, other: Self) -> Self {
        SigSet(self.0 | other.0)
    }

    pub fn inter(&self, other: Self) -> Self {
        SigSet(self.0 & other.0)
    }

    pub fn complement(&self, n: usize) -> Self {
        SigSet(!self.0 & SigSet::full(n).0)
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        let bits = self.0;
        (0..16).filter(move |i| bits & (1 << i) != 0)
    }

    pub fn is_subset_of(&self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    /// True when the members form a contiguous index range.
    pub fn is_interval(&self) -> bool {
        if self.0 == 0 {
            return false;
        }
        let lo = self.0.trailing_zeros();
        let span = self.0 >> lo;
        (span & (span + 1)) == 0
    }
}

/// Conditional CDF of the count of other players with signals in a set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountCdf {
    values: Vec<Q>,
}

impl CountCdf {
    fn from_pmf(pmf: &[Q]) -> Self {
        let mut acc = Q::zero();
        let values = pmf
            .iter()
            .map(|p| {
                acc += p;
                acc.clone()
            })
            .collect();
        CountCdf { values }
    }

    /// P(C <= m).
    pub fn cdf(&self, m: usize) -> Q {
        if m >= self.values.len() {
            Q::one()
        } else {
            self.values[m].clone()
        }
    }

    /// P(C >= m).
    pub fn survival(&self, m: usize) -> Q {
        if m == 0 {
            Q::one()
        } else {
            Q::one() - self.cdf(m - 1)
        }
    }

    pub fn values(&self) -> &[Q] {
        &self.values
    }
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product::<u64>().max(1)
}

fn signal_counts(key: &[usize], n: usize) -> Vec<usize> {
    let mut counts = vec![0usize; n];
    for &i in key {
        counts[i] += 1;
    }
    counts
}

/// Number of distinct orderings of a sorted multiset.
fn orderings(key: &[usize], n: usize) -> u64 {
    let mut denom = 1u64;
    for c in signal_counts(key, n) {
        denom *= factorial(c);
    }
    factorial(key.len()) / denom
}

/// Pre-construction validation report; `JointDist::new` passes iff this does.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub players: usize,
    pub signals: usize,
    pub total_mass: Q,
    pub negative_entries: usize,
    pub first_negative: Option<(Vec<usize>, Q)>,
    pub exchangeable: bool,
    pub bounds_ok: bool,
    pub pass: bool,
}

fn validate_raw(
    space: &SignalSpace,
    players: usize,
    entries: &BTreeMap<Vec<usize>, Q>,
    exchangeable: bool,
) -> ValidationReport {
    let total_mass: Q = entries.values().sum();
    let mut negative_entries = 0;
    let mut first_negative = None;
    for (k, v) in entries {
        if v.is_negative() {
            negative_entries += 1;
            if first_negative.is_none() {
                first_negative = Some((k.clone(), v.clone()));
            }
        }
    }
    let bounds_ok = (2..=MAX_PLAYERS).contains(&players) && space.n() <= MAX_SIGNALS;
    let pass = bounds_ok && negative_entries == 0 && total_mass.is_one();
    ValidationReport {
        players,
        signals: space.n(),
        total_mass,
        negative_entries,
        first_negative,
        exchangeable,
        bounds_ok,
        pass,
    }
}

/// Exchangeable joint distribution over `players` signals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointDist {
    space: SignalSpace,
    players: usize,
    mass: BTreeMap<Vec<usize>, Q>,
}

impl JointDist {
    /// Builds from (profile, mass) entries. Profiles may arrive in any order;
    /// they are sorted into canonical multisets and duplicate entries are
    /// accumulated. Zero-mass entries are dropped.
    pub fn new<I>(space: SignalSpace, players: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, Q)>,
    {
        let mut mass: BTreeMap<Vec<usize>, Q> = BTreeMap::new();
        for (mut key, p) in entries {
            if key.len() != players {
                return Err(SimilError::Invalid(format!(
                    "profile length {} does not match {} players",
                    key.len(),
                    players
                )));
            }
            if key.iter().any(|&i| i >= space.n()) {
                return Err(SimilError::Invalid("profile index out of range".into()));
            }
            key.sort_unstable();
            *mass.entry(key).or_insert_with(Q::zero) += p;
        }
        mass.retain(|_, v| !v.is_zero());
        let report = validate_raw(&space, players, &mass, true);
        if !report.bounds_ok {
            return Err(SimilError::Unsupported(format!(
                "supported sizes are 2..=8 players and 1..=10 signals, got {} players, {} signals",
                players,
                space.n()
            )));
        }
        if report.negative_entries > 0 {
            let (k, v) = report.first_negative.unwrap();
            return Err(SimilError::Invalid(format!(
                "negative mass {} at profile {:?}",
                fmt_q(&v),
                space.set_labels(SigSet::from_indices(&k))
            )));
        }
        if !report.pass {
            return Err(SimilError::Invalid(format!(
                "total mass is {}, expected 1",
                fmt_q(&report.total_mass)
            )));
        }
        Ok(Self { space, players, mass })
    }

    pub fn space(&self) -> &SignalSpace {
        &self.space
    }

    pub fn players(&self) -> usize {
        self.players
    }

    /// Canonical (sorted multiset, total mass) entries.
    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &Q)> {
        self.mass.iter()
    }

    pub fn multiset_mass(&self, key: &[usize]) -> Q {
        debug_assert!(key.windows(2).all(|w| w[0] <= w[1]));
        self.mass.get(key).cloned().unwrap_or_else(Q::zero)
    }

    /// Probability of one specific ordered profile.
    pub fn ordered_prob(&self, profile: &[usize]) -> Q {
        let mut key = profile.to_vec();
        key.sort_unstable();
        let m = self.multiset_mass(&key);
        if m.is_zero() {
            return m;
        }
        m / Q::from_integer(orderings(&key, self.space.n()).into())
    }

    pub fn validate(&self) -> ValidationReport {
        validate_raw(&self.space, self.players, &self.mass, true)
    }

    /// Marginal probability of one player's signal (identical across players).
    pub fn marginal(&self, s: usize) -> Q {
        let n = Q::from_integer((self.players as u64).into());
        let mut total = Q::zero();
        for (key, m) in &self.mass {
            let c = key.iter().filter(|&&i| i == s).count();
            if c > 0 {
                total += m * Q::from_integer((c as u64).into()) / &n;
            }
        }
        total
    }

    pub fn marginal_vec(&self) -> Vec<Q> {
        (0..self.space.n()).map(|s| self.marginal(s)).collect()
    }

    /// Mass the marginal puts on a set of signals.
    pub fn set_mass(&self, set: SigSet) -> Q {
        set.iter().map(|s| self.marginal(s)).sum()
    }

    fn zero_marginal_err(&self, s: usize) -> SimilError {
        SimilError::ZeroMarginal(self.space.label(s).to_string())
    }

    /// Conditional pmf of C(K) = #{others with signal in K} given own signal s.
    pub fn count_pmf(&self, s: usize, k: SigSet) -> Result<Vec<Q>> {
        let marg = self.marginal(s);
        if marg.is_zero() {
            return Err(self.zero_marginal_err(s));
        }
        let n = Q::from_integer((self.players as u64).into());
        let mut pmf = vec![Q::zero(); self.players];
        for (key, m) in &self.mass {
            let own = key.iter().filter(|&&i| i == s).count();
            if own == 0 {
                continue;
            }
            // Others = multiset minus one copy of s; count of others in K.
            let mut others_in_k = key.iter().filter(|&&i| k.contains(i)).count();
            if k.contains(s) {
                others_in_k -= 1;
            }
            pmf[others_in_k] += m * Q::from_integer((own as u64).into()) / &n;
        }
        for p in &mut pmf {
            *p /= &marg;
        }
        Ok(pmf)
    }

    /// Conditional CDF of the count C(K) given own signal s.
    pub fn count_cdf(&self, s: usize, k: SigSet) -> Result<CountCdf> {
        Ok(CountCdf::from_pmf(&self.count_pmf(s, k)?))
    }

    /// F_s(K) = P(one given other player's signal is in K | own signal s).
    pub fn cond_prob(&self, s: usize, k: SigSet) -> Result<Q> {
        let pmf = self.count_pmf(s, k)?;
        let others = Q::from_integer(((self.players - 1) as u64).into());
        let mut acc = Q::zero();
        for (c, p) in pmf.iter().enumerate() {
            if c > 0 {
                acc += p * Q::from_integer((c as u64).into());
            }
        }
        Ok(acc / others)
    }

    /// E[C(K) | own signal s]; equals (players-1) * cond_prob identically.
    pub fn expected_count(&self, s: usize, k: SigSet) -> Result<Q> {
        let pmf = self.count_pmf(s, k)?;
        let mut acc = Q::zero();
        for (c, p) in pmf.iter().enumerate() {
            if c > 0 {
                acc += p * Q::from_integer((c as u64).into());
            }
        }
        Ok(acc)
    }

    /// P(own signal = a AND one given other player's signal = b), computed
    /// directly from multiset counts. Independent route from `cond_prob` for
    /// the exchangeability identity tests.
    pub fn pair_prob(&self, a: usize, b: usize) -> Q {
        let n = self.players as u64;
        let denom = Q::from_integer((n * (n - 1)).into());
        let mut total = Q::zero();
        for (key, m) in &self.mass {
            let ca = key.iter().filter(|&&i| i == a).count() as u64;
            if ca == 0 {
                continue;
            }
            let cb = key.iter().filter(|&&i| i == b).count() as u64;
            let pairs = if a == b { ca * (ca - 1) } else { ca * cb };
            if pairs > 0 {
                total += m * Q::from_integer(pairs.into()) / &denom;
            }
        }
        total
    }

    /// Joint lower-orthant probability P(s_1 <= x, s_2 <= y) for 2 players.
    pub fn orthant_prob(&self, x: usize, y: usize) -> Result<Q> {
        if self.players != 2 {
            return Err(SimilError::Unsupported(
                "orthant probabilities are defined for 2 players".into(),
            ));
        }
        let mut total = Q::zero();
        for (key, m) in &self.mass {
            let (a, b) = (key[0], key[1]);
            // Orderings of {a,b}: (a,b) and (b,a), each mass/2 when a != b.
            if a == b {
                if a <= x && b <= y {
                    total += m;
                }
            } else {
                let half = m / Q::from_integer(2.into());
                if a <= x && b <= y {
                    total += &half;
                }
                if b <= x && a <= y {
                    total += &half;
                }
            }
        }
        Ok(total)
    }

    /// Signals with positive marginal probability.
    pub fn support(&self) -> SigSet {
        let mut set = SigSet::empty();
        for s in 0..self.space.n() {
            if !self.marginal(s).is_zero() {
                set = set.with(s);
            }
        }
        set
    }

    /// First signal whose marginals differ between the two distributions.
    pub fn marginal_mismatch(&self, other: &JointDist) -> Option<(usize, Q, Q)> {
        for s in 0..self.space.n() {
            let a = self.marginal(s);
            let b = other.marginal(s);
            if a != b {
                return Some((s, a, b));
            }
        }
        None
    }

    pub fn check_compatible(&self, other: &JointDist) -> Result<()> {
        if self.space != other.space {
            return Err(SimilError::Mismatch("signal spaces differ".into()));
        }
        if self.players != other.players {
            return Err(SimilError::Mismatch("player counts differ".into()));
        }
        Ok(())
    }
}

/// (1-t) * dist + t * D where D puts each marginal mass on the all-equal
/// profile. Preserves marginals; raises every diagonal conditional.
pub fn diagonal_mixture(dist: &JointDist, t: &Q) -> Result<JointDist> {
    if t.is_negative() || t > &Q::one() {
        return Err(SimilError::Invalid(format!(
            "mixture weight {} outside [0,1]",
            fmt_q(t)
        )));
    }
    let keep = Q::one() - t;
    let mut entries: Vec<(Vec<usize>, Q)> = dist
        .entries()
        .map(|(k, m)| (k.clone(), m * &keep))
        .collect();
    if !t.is_zero() {
        for s in 0..dist.space().n() {
            let m = dist.marginal(s);
            if !m.is_zero() {
                entries.push((vec![s; dist.players()], m * t));
            }
        }
    }
    JointDist::new(dist.space().clone(), dist.players(), entries)
}

/// Elementary diagonalizing transfer for 2 players: +a at (s,s) and (s',s'),
/// -a at (s,s') and (s',s). Marginals unchanged.
pub fn apply_eti(dist: &JointDist, s: usize, s_prime: usize, a: &Q) -> Result<JointDist> {
    if dist.players() != 2 {
        return Err(SimilError::Unsupported(
            "elementary transfers are defined for 2 players".into(),
        ));
    }
    if s >= s_prime {
        return Err(SimilError::Invalid("transfer requires s < s'".into()));
    }
    if a.is_negative() {
        return Err(SimilError::Invalid("transfer magnitude must be >= 0".into()));
    }
    let off_key = vec![s, s_prime];
    let off = dist.multiset_mass(&off_key);
    let two_a = a * Q::from_integer(2.into());
    if off < two_a {
        return Err(SimilError::Invalid(format!(
            "transfer magnitude {} infeasible: off-diagonal cells hold {} each",
            fmt_q(a),
            fmt_q(&(off / Q::from_integer(2.into())))
        )));
    }
    let mut entries: Vec<(Vec<usize>, Q)> =
        dist.entries().map(|(k, m)| (k.clone(), m.clone())).collect();
    entries.push((vec![s, s], a.clone()));
    entries.push((vec![s_prime, s_prime], a.clone()));
    entries.push((off_key, -two_a));
    JointDist::new(dist.space().clone(), dist.players(), entries)
}

/// Joint distribution over ordered profiles; no symmetry required.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonExchJointDist {
    space: SignalSpace,
    players: usize,
    mass: BTreeMap<Vec<usize>, Q>,
}

impl NonExchJointDist {
    pub fn new<I>(space: SignalSpace, players: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, Q)>,
    {
        let mut mass: BTreeMap<Vec<usize>, Q> = BTreeMap::new();
        for (key, p) in entries {
            if key.len() != players {
                return Err(SimilError::Invalid(format!(
                    "profile length {} does not match {} players",
                    key.len(),
                    players
                )));
            }
            if key.iter().any(|&i| i >= space.n()) {
                return Err(SimilError::Invalid("profile index out of range".into()));
            }
            *mass.entry(key).or_insert_with(Q::zero) += p;
        }
        mass.retain(|_, v| !v.is_zero());
        let report = validate_raw(&space, players, &mass, false);
        if !report.bounds_ok {
            return Err(SimilError::Unsupported(format!(
                "supported sizes are 2..=8 players and 1..=10 signals, got {} players, {} signals",
                players,
                space.n()
            )));
        }
        if report.negative_entries > 0 {
            let (k, v) = report.first_negative.unwrap();
            return Err(SimilError::Invalid(format!(
                "negative mass {} at ordered profile {k:?}",
                fmt_q(&v)
            )));
        }
        if !report.pass {
            return Err(SimilError::Invalid(format!(
                "total mass is {}, expected 1",
                fmt_q(&report.total_mass)
            )));
        }
        Ok(Self { space, players, mass })
    }

    /// Ordered expansion of an exchangeable distribution.
    pub fn from_exchangeable(dist: &JointDist) -> Self {
        let mut entries: Vec<(Vec<usize>, Q)> = Vec::new();
        for (key, m) in dist.entries() {
            let perms = permutations(key);
            let each = m / Q::from_integer((perms.len() as u64).into());
            for p in perms {
                entries.push((p, each.clone()));
            }
        }
        Self::new(dist.space().clone(), dist.players(), entries)
            .expect("expansion of a valid distribution is valid")
    }

    pub fn space(&self) -> &SignalSpace {
        &self.space
    }

    pub fn players(&self) -> usize {
        self.players
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &Q)> {
        self.mass.iter()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = validate_raw(&self.space, self.players, &self.mass, false);
        report.exchangeable = self.is_exchangeable();
        report
    }

    pub fn is_exchangeable(&self) -> bool {
        self.mass.iter().all(|(key, m)| {
            let mut sorted = key.clone();
            sorted.sort_unstable();
            permutations(&sorted)
                .into_iter()
                .all(|p| self.mass.get(&p).cloned().unwrap_or_else(Q::zero) == *m)
        })
    }

    pub fn marginal_of(&self, player: usize, s: usize) -> Result<Q> {
        if player >= self.players {
            return Err(SimilError::Invalid(format!(
                "player index {player} out of range"
            )));
        }
        Ok(self
            .mass
            .iter()
            .filter(|(key, _)| key[player] == s)
            .map(|(_, m)| m.clone())
            .sum())
    }

    /// P(player j's signal in T | player i's signal = s).
    pub fn cond_pair(&self, i: usize, j: usize, s: usize, t_set: SigSet) -> Result<Q> {
        if i == j || i >= self.players || j >= self.players {
            return Err(SimilError::Invalid(format!(
                "bad player pair ({i},{j})"
            )));
        }
        let marg = self.marginal_of(i, s)?;
        if marg.is_zero() {
            return Err(SimilError::ZeroMarginal(format!(
                "{} for player {}",
                self.space.label(s),
                i
            )));
        }
        let joint: Q = self
            .mass
            .iter()
            .filter(|(key, _)| key[i] == s && t_set.contains(key[j]))
            .map(|(_, m)| m.clone())
            .sum();
        Ok(joint / marg)
    }

    pub fn check_compatible(&self, other: &NonExchJointDist) -> Result<()> {
        if self.space != other.space {
            return Err(SimilError::Mismatch("signal spaces differ".into()));
        }
        if self.players != other.players {
            return Err(SimilError::Mismatch("player counts differ".into()));
        }
        Ok(())
    }
}

/// Distinct permutations of a sorted multiset, in lexicographic order.
pub fn permutations(sorted_key: &[usize]) -> Vec<Vec<usize>> {
    let mut current = sorted_key.to_vec();
    let mut out = vec![current.clone()];
    while next_permutation(&mut current) {
        out.push(current.clone());
    }
    out
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}
