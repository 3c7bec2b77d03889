//! Bundled demonstrations over the shipped fixtures, plus the seeded
//! property suites behind `selftest`. Every demo recomputes its claims
//! from scratch and fails with one line per claim that broke.

use serde_json::{json, Value};
use simil_core::io::{parse_dist_str, to_json_string, verdict_value, DistInput};
use simil_core::num::{fmt_q, q, qi, Q};
use simil_core::orders::{check_cad, check_ccad, check_icad, ContourDir, Violation};
use simil_core::witness::{build_private_witness, verify_witness, WitnessFamily, WitnessInputs};
use simil_core::{
    auction_revenue, bank_run_family, bank_run_sweep, diagonal_mixture, eti_apply_all,
    eti_decompose, intro_example_suite, rationalizable_sets, BankRunParams, EtiOutcome, Gen,
    JointDist, SigSet, SimilError,
};

pub enum DemoOutcome {
    Pass(String),
    Fail(String),
}

const TABLE1_F: &str =
    include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/table1_F.dist.json"));
const TABLE1_G: &str =
    include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/table1_G.dist.json"));
const FIG2_F: &str =
    include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/fig2_F.dist.json"));
const FIG2_G: &str =
    include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/fig2_G.dist.json"));
const AUCTION_F: &str =
    include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/auction_F.dist.json"));
const AUCTION_G: &str =
    include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/auction_G.dist.json"));
const RATIONALIZE: &str =
    include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/rationalize.dist.json"));

pub fn run(name: &str) -> Result<DemoOutcome, SimilError> {
    match name {
        "table1" => table1(),
        "figure1" => figure1(),
        "figure2" => figure2(),
        "bankrun" => bankrun(),
        "auction" => auction(),
        "rationalize" => rationalize(),
        other => Err(SimilError::Invalid(format!(
            "unknown demo {other:?}; expected table1, figure1, figure2, bankrun, auction, rationalize"
        ))),
    }
}

struct Checks(Vec<String>);

impl Checks {
    fn new() -> Self {
        Checks(Vec::new())
    }

    fn expect(&mut self, cond: bool, claim: &str) {
        if !cond {
            self.0.push(format!("not upheld: {claim}"));
        }
    }

    fn finish(self, value: Value) -> DemoOutcome {
        if self.0.is_empty() {
            DemoOutcome::Pass(to_json_string(&value))
        } else {
            DemoOutcome::Fail(self.0.join("\n"))
        }
    }
}

fn fixture_dist(text: &str) -> Result<JointDist, SimilError> {
    match parse_dist_str(text)?.value {
        DistInput::Exchangeable(d) => Ok(d),
        _ => Err(SimilError::Invalid("fixture holds a different distribution kind".into())),
    }
}

/// The aligned and dispersed three-player pair: the pairwise order holds,
/// yet each one-profile functional moves its own way.
fn table1() -> Result<DemoOutcome, SimilError> {
    let f = fixture_dist(TABLE1_F)?;
    let g = fixture_dist(TABLE1_G)?;
    let verdict = check_cad(&f, &g)?;
    let mut checks = Checks::new();
    checks.expect(verdict.holds, "the pairwise order holds on the fixture pair");
    let ones = (f.multiset_mass(&[1, 1, 1]), g.multiset_mass(&[1, 1, 1]));
    let zeros = (f.multiset_mass(&[0, 0, 0]), g.multiset_mass(&[0, 0, 0]));
    checks.expect(ones.0 == q(1, 6) && ones.1 == q(1, 4), "all-ones masses are 1/6 and 1/4");
    checks.expect(ones.0 < ones.1, "the all-ones mass falls on the more similar side");
    checks.expect(zeros.0 == q(1, 3) && zeros.1 == qi(0), "all-zeros masses are 1/3 and 0");
    checks.expect(zeros.0 > zeros.1, "the all-zeros mass rises on the more similar side");
    let value = json!({
        "demo": "table1",
        "verdict": verdict_value(&verdict, f.space(), None),
        "allOnesMass": { "f": fmt_q(&ones.0), "g": fmt_q(&ones.1) },
        "allZerosMass": { "f": fmt_q(&zeros.0), "g": fmt_q(&zeros.1) },
    });
    Ok(checks.finish(value))
}

/// The headline puzzle at the largest feasible perturbation: quadrant
/// dependence rises while both similarity checks fail at the middle
/// signal, and the equilibrium flags match the closed-form thresholds.
fn figure1() -> Result<DemoOutcome, SimilError> {
    let epsilon = q(1, 20);
    let p = q(97, 100);
    let a = BankRunParams::new(epsilon.clone(), p.clone(), qi(0)).feasibility_bound();
    let params = BankRunParams::new(epsilon.clone(), p.clone(), a.clone());
    let report = intro_example_suite(&params)?;
    let family = bank_run_family(&params)?;
    let mut checks = Checks::new();
    checks.expect(!report.degenerate, "the perturbation is nonzero");
    checks.expect(report.pqd_holds, "quadrant dependence rises at the middle state");
    checks.expect(!report.pairwise.holds, "the pairwise order fails");
    checks.expect(
        matches!(report.pairwise.violation, Some(Violation::Point { s: 1, s_prime: 1, .. })),
        "the pairwise violation sits on the middle signal's diagonal",
    );
    checks.expect(!report.contour.holds, "the contour order fails");
    checks.expect(
        matches!(
            report.contour.violation,
            Some(Violation::Contour { s: 1, s_hat: 1, dir: ContourDir::Up, .. })
        ),
        "the contour violation is the middle signal's upper set",
    );
    checks.expect(report.alpha_star == q(319033, 680000), "first threshold is 319033/680000");
    checks.expect(report.alpha_star_star == q(160403, 340000), "second threshold is 160403/340000");
    checks.expect(report.eg_exists && report.eb_exists, "both named equilibria survive");
    checks.expect(report.consistent, "existence flags match the thresholds");
    let value = json!({
        "demo": "figure1",
        "epsilon": fmt_q(&epsilon),
        "p": fmt_q(&p),
        "a": fmt_q(&a),
        "pqdHolds": report.pqd_holds,
        "pairwise": verdict_value(&report.pairwise, family.space(), None),
        "contour": verdict_value(&report.contour, family.space(), None),
        "alphaStar": fmt_q(&report.alpha_star),
        "alphaStarStar": fmt_q(&report.alpha_star_star),
        "eG": report.eg_exists,
        "eB": report.eb_exists,
        "consistent": report.consistent,
    });
    Ok(checks.finish(value))
}

/// The cycle-shifted pair: contour and interval checks agree that the
/// order holds while the pairwise check fails at signals 2 and 3.
fn figure2() -> Result<DemoOutcome, SimilError> {
    let f = fixture_dist(FIG2_F)?;
    let g = fixture_dist(FIG2_G)?;
    let ccad = check_ccad(&f, &g)?;
    let cad = check_cad(&f, &g)?;
    let icad = check_icad(&f, &g)?;
    let mut checks = Checks::new();
    checks.expect(ccad.holds, "the contour order holds");
    checks.expect(!cad.holds, "the pairwise order fails");
    checks.expect(
        matches!(cad.violation, Some(Violation::Point { s: 1, s_prime: 2, .. })),
        "the pairwise violation is at signals labeled 2 and 3",
    );
    checks.expect(icad.holds == ccad.holds, "contour and interval checks agree");
    let value = json!({
        "demo": "figure2",
        "contour": verdict_value(&ccad, f.space(), None),
        "pairwise": verdict_value(&cad, f.space(), None),
        "interval": verdict_value(&icad, f.space(), None),
    });
    Ok(checks.finish(value))
}

/// Grid sweeps: at the headline parameters every feasible perturbation
/// keeps both equilibria, and at parameters whose first threshold falls
/// inside the feasible range the adversarial equilibrium dies exactly at
/// the threshold, dropping the maximal expected run.
fn bankrun() -> Result<DemoOutcome, SimilError> {
    let mut checks = Checks::new();
    let spec = bank_run_sweep(&q(1, 20), &q(97, 100), 20)?;
    for row in &spec.rows {
        checks.expect(
            row.eb_exists == (row.a <= spec.alpha_star),
            "adversarial equilibrium exists exactly up to the first threshold",
        );
        checks.expect(
            row.eg_exists == (row.a <= spec.alpha_star_star),
            "cautious equilibrium exists exactly up to the second threshold",
        );
    }
    checks.expect(
        spec.rows.iter().all(|r| r.eb_exists && r.eg_exists),
        "the feasible range sits below both thresholds here",
    );
    let cross = bank_run_sweep(&q(3, 10), &q(41, 50), 20)?;
    for row in &cross.rows {
        checks.expect(
            row.eb_exists == (row.a <= cross.alpha_star),
            "crossing sweep matches the first threshold row by row",
        );
        checks.expect(row.eg_exists, "cautious equilibrium survives the whole crossing sweep");
    }
    let last_below = cross.rows.iter().rev().find(|r| r.eb_exists);
    let first_above = cross.rows.iter().find(|r| !r.eb_exists);
    checks.expect(
        last_below.is_some() && first_above.is_some(),
        "the crossing sweep has rows on both sides of the threshold",
    );
    let mut boundary = json!(null);
    if let (Some(below), Some(above)) = (last_below, first_above) {
        match (&below.maximal_expected_run, &above.maximal_expected_run) {
            (Some(lo), Some(hi)) => {
                checks.expect(lo > hi, "the maximal expected run drops at the threshold");
                boundary = json!({
                    "lastBelow": { "a": fmt_q(&below.a), "maximalExpectedRun": fmt_q(lo) },
                    "firstAbove": { "a": fmt_q(&above.a), "maximalExpectedRun": fmt_q(hi) },
                });
            }
            _ => checks.expect(false, "both boundary rows report a maximal expected run"),
        }
    }
    let value = json!({
        "demo": "bankrun",
        "spec": {
            "epsilon": "1/20",
            "p": "97/100",
            "alphaStar": fmt_q(&spec.alpha_star),
            "alphaStarStar": fmt_q(&spec.alpha_star_star),
            "feasibility": fmt_q(&spec.feasibility),
            "rows": spec.rows.len(),
            "allRowsKeepBothEquilibria": spec.rows.iter().all(|r| r.eb_exists && r.eg_exists),
        },
        "crossing": {
            "epsilon": "3/10",
            "p": "41/50",
            "alphaStar": fmt_q(&cross.alpha_star),
            "feasibility": fmt_q(&cross.feasibility),
            "rows": cross.rows.len(),
            "boundary": boundary,
        },
    });
    Ok(checks.finish(value))
}

/// Revenue decomposition: each elementary transfer raises second-price
/// revenue by exactly its magnitude times the signal-value gap, and the
/// steps rebuild the more similar side bit for bit.
fn auction() -> Result<DemoOutcome, SimilError> {
    let f = fixture_dist(AUCTION_F)?;
    let g = fixture_dist(AUCTION_G)?;
    let mut checks = Checks::new();
    let steps = match eti_decompose(&f, &g)? {
        EtiOutcome::Steps(steps) => steps,
        EtiOutcome::Blocked { .. } => {
            checks.expect(false, "the fixture pair decomposes into transfer steps");
            Vec::new()
        }
    };
    let revenue_f = auction_revenue(&f)?;
    let revenue_g = auction_revenue(&g)?;
    let mut increments = Vec::new();
    let mut total = qi(0);
    for step in &steps {
        let gap = f.space().value(step.s_prime) - f.space().value(step.s);
        let inc = &step.magnitude * &gap;
        increments.push(json!({
            "s": f.space().label(step.s),
            "sPrime": f.space().label(step.s_prime),
            "magnitude": fmt_q(&step.magnitude),
            "revenueIncrement": fmt_q(&inc),
        }));
        total = &total + &inc;
    }
    checks.expect(
        &revenue_f - &revenue_g == total,
        "the revenue gap is the sum of per-step increments",
    );
    checks.expect(revenue_f >= revenue_g, "revenue rises on the more similar side");
    let rebuilt = eti_apply_all(&g, &steps)?;
    checks.expect(
        rebuilt.entries().collect::<Vec<_>>() == f.entries().collect::<Vec<_>>(),
        "applying the steps to the less similar side rebuilds the other exactly",
    );
    let value = json!({
        "demo": "auction",
        "revenueF": fmt_q(&revenue_f),
        "revenueG": fmt_q(&revenue_g),
        "gap": fmt_q(&(&revenue_f - &revenue_g)),
        "steps": increments,
    });
    Ok(checks.finish(value))
}

/// Belief-operator fixpoints: investment unravels completely on the
/// fixture, and mixing toward the diagonal revives it at the high signal.
fn rationalize() -> Result<DemoOutcome, SimilError> {
    let d = fixture_dist(RATIONALIZE)?;
    let x = vec![qi(-1), q(1, 2)];
    let base = rationalizable_sets(&d, &x)?;
    let mixed_dist = diagonal_mixture(&d, &q(1, 2))?;
    let mixed = rationalizable_sets(&mixed_dist, &x)?;
    let n = d.space().n();
    let mut checks = Checks::new();
    checks.expect(base.invest.0.is_empty(), "investment unravels on the fixture");
    checks.expect(
        mixed.invest.0 == SigSet::singleton(1),
        "the diagonal mixture revives investment at the high signal",
    );
    checks.expect(
        base.invest.0.is_subset_of(mixed.invest.0),
        "the invest set grows under the mixture",
    );
    checks.expect(
        base.invest_iterations <= n && mixed.invest_iterations <= n,
        "fixpoints arrive within one pass per signal",
    );
    let value = json!({
        "demo": "rationalize",
        "thresholds": x.iter().map(fmt_q).collect::<Vec<_>>(),
        "investBase": d.space().set_labels(base.invest.0),
        "investMixed": d.space().set_labels(mixed.invest.0),
        "iterations": {
            "base": base.invest_iterations,
            "mixed": mixed.invest_iterations,
        },
    });
    Ok(checks.finish(value))
}

struct Suite {
    name: &'static str,
    cases: usize,
    failures: Vec<String>,
}

/// Seeded property suites at desk scale. The same seed replays the same
/// instances; `ok` is true when every suite ran clean.
pub fn selftest(seed: u64, cases: usize) -> Result<(String, bool), SimilError> {
    if cases == 0 {
        return Err(SimilError::Invalid("selftest needs at least one case per suite".into()));
    }
    let mut gen = Gen::new(seed);
    let suites = vec![
        suite_contour_consistency(&mut gen, cases)?,
        suite_alignment_grows_equilibria(&mut gen, cases)?,
        suite_witness_replay(&mut gen, cases)?,
        suite_count_identity(&mut gen, cases)?,
        suite_revenue_monotone(&mut gen, cases)?,
    ];
    let ok = suites.iter().all(|s| s.failures.is_empty());
    let value = json!({
        "seed": seed,
        "suites": suites
            .iter()
            .map(|s| json!({
                "name": s.name,
                "cases": s.cases,
                "failures": s.failures,
            }))
            .collect::<Vec<_>>(),
        "ok": ok,
    });
    Ok((to_json_string(&value), ok))
}

/// Pairwise implies contour, and the contour and interval checks agree,
/// on mixture pairs and marginal-preserving rectangle pairs alike.
fn suite_contour_consistency(gen: &mut Gen, cases: usize) -> Result<Suite, SimilError> {
    let mut failures = Vec::new();
    for i in 0..cases {
        let (f, g) = if i % 2 == 0 {
            let n = gen.index(2, 4);
            let space = gen.space(n);
            let players = gen.index(2, 3);
            let (f, g, _) = gen.mixture_pair(&space, players, true);
            (f, g)
        } else {
            let n = gen.index(3, 5);
            let moves = gen.index(1, 3);
            gen.rect_pair(n, moves)
        };
        let cad = check_cad(&f, &g)?;
        let ccad = check_ccad(&f, &g)?;
        let icad = check_icad(&f, &g)?;
        if cad.holds && !ccad.holds {
            failures.push(format!("case {i}: pairwise holds but contour fails"));
        }
        if ccad.holds != icad.holds {
            failures.push(format!("case {i}: contour and interval checks disagree"));
        }
    }
    Ok(Suite { name: "contour-consistency", cases, failures })
}

/// Diagonal mixtures only enlarge the equilibrium set of a coordination
/// game and push the participation bounds outward.
fn suite_alignment_grows_equilibria(gen: &mut Gen, cases: usize) -> Result<Suite, SimilError> {
    let mut failures = Vec::new();
    for i in 0..cases {
        let n = gen.index(2, 3);
        let space = gen.space(n);
        let players = gen.index(2, 3);
        let (f, g, _) = gen.mixture_pair(&space, players, true);
        let game = gen.coordination_game(&space, players);
        let under_f = game.enumerate_equilibria(&f)?;
        let under_g = game.enumerate_equilibria(&g)?;
        if !under_g.strategies.iter().all(|s| under_f.strategies.contains(s)) {
            failures.push(format!("case {i}: equilibria were lost under the mixture"));
        }
        if under_f.stats.max_p < under_g.stats.max_p {
            failures.push(format!("case {i}: maximal participation fell"));
        }
        if under_f.stats.min_p > under_g.stats.min_p {
            failures.push(format!("case {i}: minimal participation rose"));
        }
    }
    Ok(Suite { name: "alignment-grows-equilibria", cases, failures })
}

/// Every pairwise violation found by rejection sampling yields replayable
/// max- and min-participation witnesses; the congestion construction may
/// legitimately report a degeneracy, but whatever it builds must replay.
fn suite_witness_replay(gen: &mut Gen, cases: usize) -> Result<Suite, SimilError> {
    let mut failures = Vec::new();
    let mut found = 0;
    let mut attempts = 0;
    while found < cases && attempts < 50 * cases {
        attempts += 1;
        let n = gen.index(3, 4);
        let moves = gen.index(1, 3);
        let (f, g) = gen.rect_pair(n, moves);
        if check_cad(&f, &g)?.holds {
            continue;
        }
        found += 1;
        for family in
            [WitnessFamily::PrivateMax, WitnessFamily::PrivateMin, WitnessFamily::Congestion]
        {
            match build_private_witness(family, &f, &g) {
                Ok(pkg) => {
                    let report = verify_witness(&pkg, WitnessInputs::Private { f: &f, g: &g })?;
                    if !report.ok {
                        failures.push(format!("violation {found}: {family:?} failed to replay"));
                    }
                }
                Err(SimilError::Degenerate(_)) if family == WitnessFamily::Congestion => {}
                Err(e) => failures.push(format!("violation {found}: {family:?} not built: {e}")),
            }
        }
    }
    if found < cases {
        failures.push(format!("only {found} of {cases} violating pairs found"));
    }
    Ok(Suite { name: "witness-replay", cases, failures })
}

/// The expected number of opponents inside a set equals the per-opponent
/// conditional probability scaled by the number of opponents.
fn suite_count_identity(gen: &mut Gen, cases: usize) -> Result<Suite, SimilError> {
    let mut failures = Vec::new();
    for i in 0..cases {
        let n = gen.index(2, 4);
        let space = gen.space(n);
        let players = gen.index(2, 4);
        let d = gen.dist(&space, players, false);
        let support: Vec<usize> = (0..n).filter(|&s| d.marginal(s) != qi(0)).collect();
        let s = support[gen.index(0, support.len() - 1)];
        let k = SigSet(gen.int(0, (1 << n) - 1) as u16);
        let expected = d.expected_count(s, k)?;
        let scaled = qi((players - 1) as i64) * d.cond_prob(s, k)?;
        if expected != scaled {
            failures.push(format!("case {i}: expected count differs from scaled conditional"));
        }
    }
    Ok(Suite { name: "count-identity", cases, failures })
}

/// Second-price revenue never falls under a diagonal mixture, and the
/// transfer decomposition rebuilds the mixture with matching increments.
fn suite_revenue_monotone(gen: &mut Gen, cases: usize) -> Result<Suite, SimilError> {
    let mut failures = Vec::new();
    for i in 0..cases {
        let n = gen.index(2, 4);
        let space = gen.space(n);
        let full_support = gen.int(0, 1) == 1;
        let (f, g, _) = gen.mixture_pair(&space, 2, full_support);
        let revenue_f = auction_revenue(&f)?;
        let revenue_g = auction_revenue(&g)?;
        if revenue_f < revenue_g {
            failures.push(format!("case {i}: revenue fell under the mixture"));
            continue;
        }
        let steps = match eti_decompose(&f, &g)? {
            EtiOutcome::Steps(steps) => steps,
            EtiOutcome::Blocked { .. } => {
                failures.push(format!("case {i}: mixture pair failed to decompose"));
                continue;
            }
        };
        let total: Q = steps.iter().fold(qi(0), |acc, st| {
            acc + &st.magnitude * (f.space().value(st.s_prime) - f.space().value(st.s))
        });
        if &revenue_f - &revenue_g != total {
            failures.push(format!("case {i}: increments do not sum to the revenue gap"));
        }
        let rebuilt = eti_apply_all(&g, &steps)?;
        if rebuilt.entries().collect::<Vec<_>>() != f.entries().collect::<Vec<_>>() {
            failures.push(format!("case {i}: steps failed to rebuild the mixture"));
        }
    }
    Ok(Suite { name: "revenue-monotone", cases, failures })
}
