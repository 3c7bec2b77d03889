//! Seeded generation of distributions, families, and games.
//!
//! Every draw is an exact rational over a small denominator, so an
//! instance is reproducible bit for bit from its seed. Used by the
//! property-style tests and the self-test command.

use crate::dist::{diagonal_mixture, JointDist, SignalSpace};
use crate::family::{StateFamily, StateSpace};
use crate::games::{Aggregator, CommonValueGame, PrivateValueGame};
use crate::num::{q, qi, Q};
use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Nondecreasing signal profiles of the given length, in sorted order.
pub fn multiset_keys(n: usize, players: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, players: usize, start: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == players {
            out.push(prefix.clone());
            return;
        }
        for s in start..n {
            prefix.push(s);
            rec(n, players, s, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, players, 0, &mut Vec::new(), &mut out);
    out
}

pub struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.random_range(lo..=hi)
    }

    pub fn index(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.random_range(lo..=hi)
    }

    /// Rational in [lo, hi] with denominator at most den_max.
    pub fn rational(&mut self, lo: i64, hi: i64, den_max: i64) -> Q {
        let d = self.int(1, den_max);
        let n = self.int(lo * d, hi * d);
        q(n, d)
    }

    pub fn q_vec(&mut self, len: usize, lo: i64, hi: i64, den_max: i64) -> Vec<Q> {
        (0..len).map(|_| self.rational(lo, hi, den_max)).collect()
    }

    /// Rational strictly between 0 and 1.
    pub fn open_unit(&mut self, den_max: i64) -> Q {
        let d = self.int(2, den_max.max(2));
        let n = self.int(1, d - 1);
        q(n, d)
    }

    /// Signal space with integer values 0..n.
    pub fn space(&mut self, n: usize) -> SignalSpace {
        SignalSpace::from_values((0..n).map(|i| qi(i as i64)).collect()).expect("increasing")
    }

    /// Exchangeable distribution from integer weights on multisets,
    /// normalized by their total.
    pub fn dist(&mut self, space: &SignalSpace, players: usize, full_support: bool) -> JointDist {
        let keys = multiset_keys(space.n(), players);
        loop {
            let lo = if full_support { 1 } else { 0 };
            let weights: Vec<i64> = keys.iter().map(|_| self.int(lo, 8)).collect();
            let total: i64 = weights.iter().sum();
            if total == 0 {
                continue;
            }
            let entries = keys
                .iter()
                .zip(&weights)
                .filter(|(_, &w)| w > 0)
                .map(|(k, &w)| (k.clone(), q(w, total)));
            return JointDist::new(space.clone(), players, entries.collect::<Vec<_>>())
                .expect("normalized weights form a distribution");
        }
    }

    /// Pair (diagonal mixture of g, g): the left side is more aligned by
    /// construction, with the same marginals.
    pub fn mixture_pair(
        &mut self,
        space: &SignalSpace,
        players: usize,
        full_support: bool,
    ) -> (JointDist, JointDist, Q) {
        let g = self.dist(space, players, full_support);
        let t = self.open_unit(8);
        let f = diagonal_mixture(&g, &t).expect("t in unit interval");
        (f, g, t)
    }

    /// Two-player pair with identical marginals: g is random, f applies
    /// random mass-preserving rectangle moves to g's ordered-probability
    /// matrix. Moves keep the matrix symmetric and rows sum unchanged.
    pub fn rect_pair(&mut self, n: usize, moves: usize) -> (JointDist, JointDist) {
        let space = self.space(n);
        let g = self.dist(&space, 2, true);
        let mut m: Vec<Vec<Q>> = (0..n)
            .map(|s| (0..n).map(|t| g.ordered_prob(&[s, t])).collect())
            .collect();
        for _ in 0..moves {
            let s = self.index(0, n - 2);
            let s2 = self.index(s + 1, n - 1);
            let t = self.index(0, n - 2);
            let t2 = self.index(t + 1, n - 1);
            let sign = if self.int(0, 1) == 0 { 1 } else { -1 };
            let mut coeff = std::collections::BTreeMap::new();
            for &(a, b, c) in &[(s, t, 1i64), (s, t2, -1), (s2, t, -1), (s2, t2, 1)] {
                *coeff.entry((a, b)).or_insert(0) += c * sign;
                *coeff.entry((b, a)).or_insert(0) += c * sign;
            }
            let mut max_step: Option<Q> = None;
            for (&(a, b), &c) in &coeff {
                if c < 0 {
                    let cap = &m[a][b] / qi(-c);
                    max_step = Some(match max_step {
                        Some(cur) if cur <= cap => cur,
                        _ => cap,
                    });
                }
            }
            let Some(cap) = max_step else { continue };
            if cap.is_zero() {
                continue;
            }
            let step = cap * q(self.int(0, 8), 8);
            for (&(a, b), &c) in &coeff {
                m[a][b] = &m[a][b] + qi(c) * &step;
            }
        }
        let entries: Vec<(Vec<usize>, Q)> = (0..n)
            .flat_map(|s| (0..n).map(move |t| (vec![s, t], ())))
            .map(|(key, _)| {
                let p = m[key[0]][key[1]].clone();
                (key, p)
            })
            .filter(|(_, p)| !p.is_zero())
            .collect();
        let f = JointDist::new(space, 2, entries).expect("moves preserve total mass");
        (f, g)
    }

    /// Three-player binary pair with identical pairwise joints but shifted
    /// signal counts: multiset masses move by (+d, -3d, +3d, -d). The
    /// pairwise order holds with equality; count dominance fails at the
    /// low signal.
    pub fn count_shift_pair(&mut self) -> (JointDist, JointDist) {
        let space = self.space(2);
        let keys = multiset_keys(2, 3);
        let weights: Vec<i64> = keys.iter().map(|_| self.int(1, 8)).collect();
        let total: i64 = weights.iter().sum();
        let mass: Vec<Q> = weights.iter().map(|&w| q(w, total)).collect();
        let cap_pairs = [(&mass[1] / qi(3)), mass[3].clone()];
        let cap = if cap_pairs[0] <= cap_pairs[1] { cap_pairs[0].clone() } else { cap_pairs[1].clone() };
        let d = cap * q(self.int(1, 7), 8);
        let shifted = vec![
            &mass[0] + &d,
            &mass[1] - qi(3) * &d,
            &mass[2] + qi(3) * &d,
            &mass[3] - &d,
        ];
        let g = JointDist::new(space.clone(), 3, keys.iter().cloned().zip(mass).collect::<Vec<_>>())
            .expect("normalized");
        let f = JointDist::new(space, 3, keys.into_iter().zip(shifted).collect::<Vec<_>>())
            .expect("shift keeps mass nonnegative");
        (f, g)
    }

    /// State family with a full-support prior and full-support
    /// per-state distributions over a shared signal space.
    pub fn family(&mut self, n_states: usize, n: usize, players: usize) -> StateFamily {
        let states = self.space(n_states);
        let space = self.space(n);
        let weights: Vec<i64> = (0..n_states).map(|_| self.int(1, 8)).collect();
        let total: i64 = weights.iter().sum();
        let prior = weights.iter().map(|&w| q(w, total)).collect();
        let per_state = (0..n_states).map(|_| self.dist(&space, players, true)).collect();
        StateFamily::new(states, prior, per_state).expect("full support")
    }

    /// Family pair sharing states, prior, and marginals: each state of the
    /// left family is a diagonal mixture of the right one.
    pub fn mixture_family_pair(
        &mut self,
        n_states: usize,
        n: usize,
        players: usize,
    ) -> (StateFamily, StateFamily) {
        let g = self.family(n_states, n, players);
        let per_state = (0..n_states)
            .map(|t| {
                let t_theta = self.open_unit(8);
                diagonal_mixture(g.per_state(t), &t_theta).expect("t in unit interval")
            })
            .collect();
        let f = StateFamily::new(g.states().clone(), g.prior().to_vec(), per_state)
            .expect("marginals unchanged");
        (f, g)
    }

    fn affine_aggregator(&mut self) -> Aggregator {
        let d = self.int(1, 4);
        let k = q(self.int(1, 2 * d), d);
        let l = self.rational(-1, 1, 4);
        Aggregator::affine(k, l).expect("positive slope")
    }

    /// Private-value game with nonnegative interaction terms and an
    /// affine aggregator.
    pub fn coordination_game(&mut self, space: &SignalSpace, players: usize) -> PrivateValueGame {
        let n = space.n();
        let alpha = self.q_vec(n, -2, 2, 4);
        let beta = self.q_vec(n, 0, 2, 4);
        let h = self.affine_aggregator();
        PrivateValueGame::new(space.clone(), players, alpha, beta, h).expect("single-signed beta")
    }

    /// Private-value game with nonpositive interaction terms.
    pub fn congestion_game(&mut self, space: &SignalSpace, players: usize) -> PrivateValueGame {
        let n = space.n();
        let alpha = self.q_vec(n, -2, 2, 4);
        let beta = self.q_vec(n, -2, 0, 4);
        let h = self.affine_aggregator();
        PrivateValueGame::new(space.clone(), players, alpha, beta, h).expect("single-signed beta")
    }

    /// Private-value game whose aggregator is a nondecreasing table that
    /// increases somewhere.
    pub fn table_game(&mut self, space: &SignalSpace, players: usize) -> PrivateValueGame {
        let n = space.n();
        let alpha = self.q_vec(n, -2, 2, 4);
        let beta = self.q_vec(n, 0, 2, 4);
        let mut values = vec![self.rational(-1, 1, 4)];
        for _ in 1..players {
            let inc = self.rational(0, 1, 4);
            let prev = values.last().expect("nonempty").clone();
            values.push(prev + inc);
        }
        if values.first() == values.last() {
            let prev = values.last().expect("nonempty").clone();
            *values.last_mut().expect("nonempty") = prev + qi(1);
        }
        let h = Aggregator::table(values).expect("nondecreasing, increases somewhere");
        PrivateValueGame::new(space.clone(), players, alpha, beta, h).expect("single-signed beta")
    }

    /// Common-value game with nonnegative state interaction terms.
    pub fn common_game(&mut self, states: &StateSpace, players: usize) -> CommonValueGame {
        let n = states.n();
        let alpha = self.q_vec(n, -2, 2, 4);
        let beta = self.q_vec(n, 0, 2, 4);
        let h = self.affine_aggregator();
        CommonValueGame::new(states.clone(), players, alpha, beta, h).expect("nonnegative beta")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orders::{check_cad, check_scad, check_statewise, BaseOrder};
    use num_traits::One;

    #[test]
    fn multiset_keys_count_matches_binomial() {
        assert_eq!(multiset_keys(2, 3).len(), 4);
        assert_eq!(multiset_keys(3, 2).len(), 6);
        assert_eq!(multiset_keys(5, 4).len(), 70);
        assert!(multiset_keys(3, 3).iter().all(|k| k.windows(2).all(|w| w[0] <= w[1])));
    }

    #[test]
    fn same_seed_reproduces_the_draw() {
        let space = Gen::new(7).space(4);
        let a = Gen::new(7).dist(&Gen::new(7).space(4), 3, true);
        let b = Gen::new(7).dist(&space, 3, true);
        assert_eq!(a, b);
        let c = Gen::new(8).dist(&space, 3, true);
        assert_ne!(a, c);
    }

    #[test]
    fn generated_dists_are_valid() {
        for seed in 0..20 {
            let mut g = Gen::new(seed);
            let n = g.index(2, 5);
            let players = g.index(2, 4);
            let space = g.space(n);
            let d = g.dist(&space, players, seed % 2 == 0);
            let report = d.validate();
            assert!(report.pass, "seed {seed}: {report:?}");
            if seed % 2 == 0 {
                assert!((0..n).all(|s| !d.marginal(s).is_zero()));
            }
        }
    }

    #[test]
    fn rect_pairs_share_marginals() {
        for seed in 0..20 {
            let (f, g) = Gen::new(seed).rect_pair(4, 6);
            assert!(f.validate().pass);
            assert!(f.marginal_mismatch(&g).is_none(), "seed {seed}");
        }
    }

    #[test]
    fn count_shift_pairs_split_the_orders() {
        for seed in 0..20 {
            let (f, g) = Gen::new(seed).count_shift_pair();
            assert!(check_cad(&f, &g).unwrap().holds, "seed {seed}");
            assert!(!check_scad(&f, &g).unwrap().holds, "seed {seed}");
        }
    }

    #[test]
    fn mixture_family_pairs_are_statewise_aligned() {
        let (f, g) = Gen::new(3).mixture_family_pair(3, 3, 2);
        let verdict = check_statewise(BaseOrder::Ccad, &f, &g).unwrap();
        assert!(verdict.holds);
    }

    #[test]
    fn generated_games_have_the_claimed_signs() {
        let mut gen = Gen::new(11);
        let space = gen.space(3);
        assert!(gen.coordination_game(&space, 3).is_coordination());
        assert!(gen.congestion_game(&space, 3).is_congestion());
        let table = gen.table_game(&space, 3);
        assert!(table.aggregator().is_nondecreasing());
        let common = gen.common_game(&space, 2);
        assert!(common.beta().iter().all(|b| b >= &Q::zero()));
        let _ = Q::one();
    }

    #[test]
    fn rationals_respect_their_bounds() {
        let mut gen = Gen::new(5);
        for _ in 0..50 {
            let x = gen.rational(-2, 2, 4);
            assert!(x >= qi(-2) && x <= qi(2));
            let t = gen.open_unit(8);
            assert!(t > Q::zero() && t < Q::one());
        }
    }
}
