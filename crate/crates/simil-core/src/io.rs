//! File formats and report serialization.
//!
//! Distributions, state families, games, and witness bundles are stored as
//! JSON objects whose rationals are exact `"num/den"` strings, so a value
//! written and read back is bit-identical. Bare integers are accepted on
//! input; floats are rationalized and flagged with a warning when the
//! conversion rounds.

use crate::dist::{JointDist, NonExchJointDist, SigSet, SignalSpace};
use crate::error::{Result, SimilError};
use crate::family::{StateFamily, StateSpace};
use crate::games::{
    Aggregator, CommonValueGame, CutoffSet, CutoffStrategy, EquilibriumSet, PrivateValueGame,
};
use crate::num::{fmt_q, parse_q, q_from_f64, Q};
use crate::orders::{
    BaseOrder, CheckedOrder, ContourDir, OrderVerdict, StatewiseVerdict, Violation,
};
use crate::witness::{
    Certification, Direction, VerifyReport, WitnessFamily, WitnessGame, WitnessPackage,
    WitnessStrategy,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

/// Rational as it may appear in a file: an exact string, a bare integer,
/// or a float (accepted with a rounding warning when inexact).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawQ {
    Str(String),
    Int(i64),
    Float(f64),
}

impl RawQ {
    fn exact(x: &Q) -> RawQ {
        RawQ::Str(fmt_q(x))
    }

    fn parse(&self, ctx: &str, warnings: &mut Vec<String>) -> Result<Q> {
        match self {
            RawQ::Str(s) => parse_q(s),
            RawQ::Int(n) => Ok(Q::from_integer((*n).into())),
            RawQ::Float(x) => {
                let (v, exact) = q_from_f64(*x)?;
                if !exact {
                    warnings.push(format!(
                        "{ctx}: float {x} rationalized to {}; pass \"num/den\" for exact input",
                        fmt_q(&v)
                    ));
                }
                Ok(v)
            }
        }
    }
}

/// A parsed value together with any ingestion warnings (inexact floats).
#[derive(Debug, Clone)]
pub struct Loaded<T> {
    pub value: T,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SignalEntry {
    pub label: String,
    pub value: RawQ,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MassEntry {
    pub profile: Vec<String>,
    pub p: RawQ,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateFamilyFile {
    pub states: Vec<SignalEntry>,
    pub prior: Vec<RawQ>,
    #[serde(rename = "perState")]
    pub per_state: Vec<Vec<MassEntry>>,
}

/// Distribution file. `mass` holds a plain joint distribution
/// (exchangeable unless `kind` is `"ordered"`); `stateFamily` holds a
/// state-indexed family over the same signal space. Exactly one of the
/// two must be present.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    pub signals: Vec<SignalEntry>,
    pub players: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mass: Option<Vec<MassEntry>>,
    #[serde(rename = "stateFamily", skip_serializing_if = "Option::is_none")]
    pub state_family: Option<StateFamilyFile>,
}

#[derive(Debug, Clone)]
pub enum DistInput {
    Exchangeable(JointDist),
    Ordered(NonExchJointDist),
    Family(StateFamily),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AffineSpec {
    pub k: RawQ,
    pub l: RawQ,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AggregatorFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub affine: Option<AffineSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<RawQ>>,
}

/// Game file. Private-value games list `signals`; common-value games list
/// `states`. Witness bundles for common-value games carry both so the
/// strategy labels resolve without the distribution files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GameFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signals: Option<Vec<SignalEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub states: Option<Vec<SignalEntry>>,
    pub players: usize,
    pub alpha: Vec<RawQ>,
    pub beta: Vec<RawQ>,
    pub h: AggregatorFile,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<RawQ>>,
}

#[derive(Debug, Clone)]
pub enum GameInput {
    Private { game: PrivateValueGame, weights: Option<Vec<Q>> },
    Common(CommonValueGame),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StrategyFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub set: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificationFile {
    #[serde(rename = "pivotNetF")]
    pub pivot_net_f: RawQ,
    #[serde(rename = "pivotNetG")]
    pub pivot_net_g: RawQ,
    #[serde(rename = "boundF")]
    pub bound_f: RawQ,
    #[serde(rename = "boundG")]
    pub bound_g: RawQ,
}

/// Self-contained witness bundle: the separating game, the strategy and
/// pivotal signal by label, and the exact values recorded at construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessBundleFile {
    pub family: String,
    pub direction: String,
    pub pivot: String,
    pub game: GameFile,
    pub strategy: StrategyFile,
    pub certification: CertificationFile,
}

fn space_entries(space: &SignalSpace) -> Vec<SignalEntry> {
    (0..space.n())
        .map(|i| SignalEntry {
            label: space.label(i).to_string(),
            value: RawQ::exact(space.value(i)),
        })
        .collect()
}

fn parse_space(entries: &[SignalEntry], ctx: &str, warnings: &mut Vec<String>) -> Result<SignalSpace> {
    let labels: Vec<String> = entries.iter().map(|e| e.label.clone()).collect();
    let mut values = Vec::with_capacity(entries.len());
    for (i, e) in entries.iter().enumerate() {
        values.push(e.value.parse(&format!("{ctx}[{i}].value"), warnings)?);
    }
    SignalSpace::new(labels, values)
}

fn mass_entries<'a>(
    space: &'a SignalSpace,
    entries: impl Iterator<Item = (&'a Vec<usize>, &'a Q)>,
) -> Vec<MassEntry> {
    entries
        .map(|(key, p)| MassEntry {
            profile: key.iter().map(|&i| space.label(i).to_string()).collect(),
            p: RawQ::exact(p),
        })
        .collect()
}

fn parse_mass(
    space: &SignalSpace,
    entries: &[MassEntry],
    ctx: &str,
    warnings: &mut Vec<String>,
) -> Result<Vec<(Vec<usize>, Q)>> {
    let mut out = Vec::with_capacity(entries.len());
    for (i, e) in entries.iter().enumerate() {
        let mut key = Vec::with_capacity(e.profile.len());
        for label in &e.profile {
            key.push(space.index_of(label)?);
        }
        let p = e.p.parse(&format!("{ctx}[{i}].p"), warnings)?;
        out.push((key, p));
    }
    Ok(out)
}

pub fn dist_file(dist: &JointDist) -> DistFile {
    DistFile {
        kind: None,
        signals: space_entries(dist.space()),
        players: dist.players(),
        mass: Some(mass_entries(dist.space(), dist.entries())),
        state_family: None,
    }
}

pub fn ordered_dist_file(dist: &NonExchJointDist) -> DistFile {
    DistFile {
        kind: Some("ordered".into()),
        signals: space_entries(dist.space()),
        players: dist.players(),
        mass: Some(mass_entries(dist.space(), dist.entries())),
        state_family: None,
    }
}

pub fn family_file(family: &StateFamily) -> DistFile {
    DistFile {
        kind: None,
        signals: space_entries(family.space()),
        players: family.players(),
        mass: None,
        state_family: Some(StateFamilyFile {
            states: space_entries(family.states()),
            prior: family.prior().iter().map(RawQ::exact).collect(),
            per_state: (0..family.n_states())
                .map(|t| {
                    let d = family.per_state(t);
                    mass_entries(d.space(), d.entries())
                })
                .collect(),
        }),
    }
}

pub fn parse_dist_str(text: &str) -> Result<Loaded<DistInput>> {
    let file: DistFile =
        serde_json::from_str(text).map_err(|e| SimilError::Parse(format!("distribution file: {e}")))?;
    let mut warnings = Vec::new();
    let space = parse_space(&file.signals, "signals", &mut warnings)?;
    let value = match (&file.mass, &file.state_family) {
        (Some(mass), None) => {
            let entries = parse_mass(&space, mass, "mass", &mut warnings)?;
            match file.kind.as_deref() {
                None | Some("exchangeable") => {
                    DistInput::Exchangeable(JointDist::new(space, file.players, entries)?)
                }
                Some("ordered") => {
                    DistInput::Ordered(NonExchJointDist::new(space, file.players, entries)?)
                }
                Some(other) => {
                    return Err(SimilError::Parse(format!(
                        "unknown kind {other:?}; expected \"exchangeable\" or \"ordered\""
                    )))
                }
            }
        }
        (None, Some(fam)) => {
            let states = parse_space(&fam.states, "stateFamily.states", &mut warnings)?;
            let mut prior = Vec::with_capacity(fam.prior.len());
            for (i, p) in fam.prior.iter().enumerate() {
                prior.push(p.parse(&format!("stateFamily.prior[{i}]"), &mut warnings)?);
            }
            let mut per_state = Vec::with_capacity(fam.per_state.len());
            for (t, mass) in fam.per_state.iter().enumerate() {
                let entries =
                    parse_mass(&space, mass, &format!("stateFamily.perState[{t}]"), &mut warnings)?;
                per_state.push(JointDist::new(space.clone(), file.players, entries)?);
            }
            DistInput::Family(StateFamily::new(states, prior, per_state)?)
        }
        (Some(_), Some(_)) => {
            return Err(SimilError::Parse(
                "distribution file has both mass and stateFamily; use one".into(),
            ))
        }
        (None, None) => {
            return Err(SimilError::Parse(
                "distribution file needs mass or stateFamily".into(),
            ))
        }
    };
    Ok(Loaded { value, warnings })
}

fn aggregator_file(h: &Aggregator) -> AggregatorFile {
    match h {
        Aggregator::Affine { k, l } => AggregatorFile {
            affine: Some(AffineSpec { k: RawQ::exact(k), l: RawQ::exact(l) }),
            table: None,
        },
        Aggregator::Table(values) => AggregatorFile {
            affine: None,
            table: Some(values.iter().map(RawQ::exact).collect()),
        },
    }
}

fn parse_aggregator(h: &AggregatorFile, warnings: &mut Vec<String>) -> Result<Aggregator> {
    match (&h.affine, &h.table) {
        (Some(a), None) => Aggregator::affine(
            a.k.parse("h.affine.k", warnings)?,
            a.l.parse("h.affine.l", warnings)?,
        ),
        (None, Some(t)) => {
            let mut values = Vec::with_capacity(t.len());
            for (i, v) in t.iter().enumerate() {
                values.push(v.parse(&format!("h.table[{i}]"), warnings)?);
            }
            Aggregator::table(values)
        }
        _ => Err(SimilError::Parse(
            "aggregator needs exactly one of affine or table".into(),
        )),
    }
}

fn parse_q_vec(raw: &[RawQ], ctx: &str, warnings: &mut Vec<String>) -> Result<Vec<Q>> {
    let mut out = Vec::with_capacity(raw.len());
    for (i, v) in raw.iter().enumerate() {
        out.push(v.parse(&format!("{ctx}[{i}]"), warnings)?);
    }
    Ok(out)
}

pub fn private_game_file(game: &PrivateValueGame, weights: Option<&[Q]>) -> GameFile {
    GameFile {
        signals: Some(space_entries(game.space())),
        states: None,
        players: game.players(),
        alpha: game.alpha().iter().map(RawQ::exact).collect(),
        beta: game.beta().iter().map(RawQ::exact).collect(),
        h: aggregator_file(game.aggregator()),
        weights: weights.map(|w| w.iter().map(RawQ::exact).collect()),
    }
}

pub fn common_game_file(game: &CommonValueGame) -> GameFile {
    GameFile {
        signals: None,
        states: Some(space_entries(game.states())),
        players: game.players(),
        alpha: game.alpha().iter().map(RawQ::exact).collect(),
        beta: game.beta().iter().map(RawQ::exact).collect(),
        h: aggregator_file(game.aggregator()),
        weights: None,
    }
}

pub fn parse_game_str(text: &str) -> Result<Loaded<GameInput>> {
    let file: GameFile =
        serde_json::from_str(text).map_err(|e| SimilError::Parse(format!("game file: {e}")))?;
    let mut warnings = Vec::new();
    let value = game_from_file(&file, &mut warnings)?;
    Ok(Loaded { value, warnings })
}

fn game_from_file(file: &GameFile, warnings: &mut Vec<String>) -> Result<GameInput> {
    let alpha = parse_q_vec(&file.alpha, "alpha", warnings)?;
    let beta = parse_q_vec(&file.beta, "beta", warnings)?;
    let h = parse_aggregator(&file.h, warnings)?;
    match (&file.signals, &file.states) {
        (_, Some(states)) => {
            let states = parse_space(states, "states", warnings)?;
            if file.weights.is_some() {
                return Err(SimilError::Parse(
                    "weights apply to private-value games only".into(),
                ));
            }
            Ok(GameInput::Common(CommonValueGame::new(
                states,
                file.players,
                alpha,
                beta,
                h,
            )?))
        }
        (Some(signals), None) => {
            let space = parse_space(signals, "signals", warnings)?;
            let weights = match &file.weights {
                Some(w) => Some(parse_q_vec(w, "weights", warnings)?),
                None => None,
            };
            Ok(GameInput::Private {
                game: PrivateValueGame::new(space, file.players, alpha, beta, h)?,
                weights,
            })
        }
        (None, None) => Err(SimilError::Parse("game file needs signals or states".into())),
    }
}

fn sorted_set_labels(space: &SignalSpace, set: SigSet) -> Vec<String> {
    set.iter().map(|i| space.label(i).to_string()).collect()
}

fn family_name(f: WitnessFamily) -> &'static str {
    match f {
        WitnessFamily::PrivateMax => "private-max",
        WitnessFamily::PrivateMin => "private-min",
        WitnessFamily::Common => "common",
        WitnessFamily::Separable => "separable",
        WitnessFamily::Scad => "scad",
        WitnessFamily::Congestion => "congestion",
    }
}

pub fn parse_family_name(name: &str) -> Result<WitnessFamily> {
    match name {
        "private-max" => Ok(WitnessFamily::PrivateMax),
        "private-min" => Ok(WitnessFamily::PrivateMin),
        "common" => Ok(WitnessFamily::Common),
        "separable" => Ok(WitnessFamily::Separable),
        "scad" => Ok(WitnessFamily::Scad),
        "congestion" => Ok(WitnessFamily::Congestion),
        other => Err(SimilError::Parse(format!(
            "unknown witness family {other:?}; expected private-max, private-min, common, separable, scad, or congestion"
        ))),
    }
}

fn direction_name(d: Direction) -> &'static str {
    match d {
        Direction::MaxParticipationDrops => "max-participation-drops",
        Direction::MinParticipationRises => "min-participation-rises",
        Direction::InclusionFails => "inclusion-fails",
    }
}

fn parse_direction(name: &str) -> Result<Direction> {
    match name {
        "max-participation-drops" => Ok(Direction::MaxParticipationDrops),
        "min-participation-rises" => Ok(Direction::MinParticipationRises),
        "inclusion-fails" => Ok(Direction::InclusionFails),
        other => Err(SimilError::Parse(format!("unknown direction {other:?}"))),
    }
}

fn certification_file(c: &Certification) -> CertificationFile {
    CertificationFile {
        pivot_net_f: RawQ::exact(&c.pivot_net_f),
        pivot_net_g: RawQ::exact(&c.pivot_net_g),
        bound_f: RawQ::exact(&c.bound_f),
        bound_g: RawQ::exact(&c.bound_g),
    }
}

fn parse_certification(c: &CertificationFile, warnings: &mut Vec<String>) -> Result<Certification> {
    Ok(Certification {
        pivot_net_f: c.pivot_net_f.parse("certification.pivotNetF", warnings)?,
        pivot_net_g: c.pivot_net_g.parse("certification.pivotNetG", warnings)?,
        bound_f: c.bound_f.parse("certification.boundF", warnings)?,
        bound_g: c.bound_g.parse("certification.boundG", warnings)?,
    })
}

/// Serializes a witness package. `signal_space` anchors strategy and pivot
/// labels; for private-value witnesses it must equal the game's own space.
pub fn witness_bundle_file(pkg: &WitnessPackage, signal_space: &SignalSpace) -> Result<WitnessBundleFile> {
    let game = match &pkg.game {
        WitnessGame::Private(g) => {
            if g.space() != signal_space {
                return Err(SimilError::Mismatch(
                    "witness game and signal space differ".into(),
                ));
            }
            private_game_file(g, None)
        }
        WitnessGame::Common(g) => {
            let mut file = common_game_file(g);
            file.signals = Some(space_entries(signal_space));
            file
        }
    };
    let strategy = match pkg.strategy {
        WitnessStrategy::Set(p) => StrategyFile {
            set: Some(sorted_set_labels(signal_space, p)),
            cutoff: None,
        },
        WitnessStrategy::Cutoff(c) => StrategyFile {
            set: Some(sorted_set_labels(signal_space, c.set(signal_space.n()))),
            cutoff: Some(c.c),
        },
    };
    Ok(WitnessBundleFile {
        family: family_name(pkg.family).to_string(),
        direction: direction_name(pkg.direction).to_string(),
        pivot: signal_space.label(pkg.pivot).to_string(),
        game,
        strategy,
        certification: certification_file(&pkg.certification),
    })
}

pub fn parse_witness_bundle_str(text: &str) -> Result<Loaded<WitnessPackage>> {
    // A report that embeds its bundle under "bundle" replays as-is.
    let mut raw: Value =
        serde_json::from_str(text).map_err(|e| SimilError::Parse(format!("witness bundle: {e}")))?;
    if let Some(inner) = raw.get_mut("bundle") {
        raw = inner.take();
    }
    let file: WitnessBundleFile = serde_json::from_value(raw)
        .map_err(|e| SimilError::Parse(format!("witness bundle: {e}")))?;
    let mut warnings = Vec::new();
    let signals = file
        .signals()
        .ok_or_else(|| SimilError::Parse("witness bundle game lists no signals".into()))?;
    let signal_space = parse_space(signals, "game.signals", &mut warnings)?;
    let game = match game_from_file(&file.game, &mut warnings)? {
        GameInput::Private { game, weights } => {
            if weights.is_some() {
                return Err(SimilError::Parse("witness bundles carry no weights".into()));
            }
            WitnessGame::Private(game)
        }
        GameInput::Common(game) => WitnessGame::Common(game),
    };
    let pivot = signal_space.index_of(&file.pivot)?;
    let strategy = match (&file.strategy.set, file.strategy.cutoff) {
        (_, Some(c)) => WitnessStrategy::Cutoff(CutoffStrategy::new(c, signal_space.n())?),
        (Some(labels), None) => {
            let mut p = SigSet::empty();
            for label in labels {
                p = p.with(signal_space.index_of(label)?);
            }
            WitnessStrategy::Set(p)
        }
        (None, None) => {
            return Err(SimilError::Parse("witness strategy needs set or cutoff".into()))
        }
    };
    let value = WitnessPackage {
        family: parse_family_name(&file.family)?,
        game,
        strategy,
        direction: parse_direction(&file.direction)?,
        pivot,
        certification: parse_certification(&file.certification, &mut warnings)?,
    };
    Ok(Loaded { value, warnings })
}

impl WitnessBundleFile {
    fn signals(&self) -> Option<&[SignalEntry]> {
        self.game.signals.as_deref()
    }
}

/// Pretty JSON with a trailing newline; key order is deterministic, so
/// repeated runs are byte-identical.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

pub fn order_name(order: CheckedOrder) -> &'static str {
    match order {
        CheckedOrder::Cad => "cad",
        CheckedOrder::Ccad => "ccad",
        CheckedOrder::Icad => "icad",
        CheckedOrder::Scad => "scad",
        CheckedOrder::CadStatewise => "cad-statewise",
        CheckedOrder::Pqd2 => "pqd2",
        CheckedOrder::CadNonexch => "cad-nonexch",
    }
}

pub fn base_order_name(order: BaseOrder) -> &'static str {
    match order {
        BaseOrder::Cad => "cad",
        BaseOrder::Ccad => "ccad",
        BaseOrder::Icad => "icad",
        BaseOrder::Scad => "scad",
        BaseOrder::Pqd2 => "pqd2",
    }
}

pub fn parse_base_order(name: &str) -> Result<BaseOrder> {
    match name {
        "cad" => Ok(BaseOrder::Cad),
        "ccad" => Ok(BaseOrder::Ccad),
        "icad" => Ok(BaseOrder::Icad),
        "scad" => Ok(BaseOrder::Scad),
        "pqd2" => Ok(BaseOrder::Pqd2),
        other => Err(SimilError::Parse(format!(
            "unknown order {other:?}; expected cad, ccad, icad, scad, or pqd2"
        ))),
    }
}

fn dir_name(d: ContourDir) -> &'static str {
    match d {
        ContourDir::Up => "up",
        ContourDir::Down => "down",
    }
}

/// Violation as a report object: variant tag, indices resolved to labels,
/// and both exact values. Nested violations keep their inner object and
/// copy the leaf values up.
pub fn violation_value(
    v: &Violation,
    space: &SignalSpace,
    states: Option<&StateSpace>,
) -> Value {
    let lab = |i: usize| space.label(i).to_string();
    match v {
        Violation::MarginalMismatch { s, lhs, rhs } => json!({
            "variant": "marginal-mismatch",
            "indices": { "s": lab(*s) },
            "lhs": fmt_q(lhs),
            "rhs": fmt_q(rhs),
        }),
        Violation::Point { s, s_prime, lhs, rhs } => json!({
            "variant": "point",
            "indices": { "s": lab(*s), "sPrime": lab(*s_prime) },
            "lhs": fmt_q(lhs),
            "rhs": fmt_q(rhs),
        }),
        Violation::Set { s_star, k, lhs, rhs } => json!({
            "variant": "set",
            "indices": { "sStar": lab(*s_star), "k": space.set_labels(*k) },
            "lhs": fmt_q(lhs),
            "rhs": fmt_q(rhs),
        }),
        Violation::Contour { s, s_hat, dir, lhs, rhs } => json!({
            "variant": "contour",
            "indices": { "s": lab(*s), "sHat": lab(*s_hat), "dir": dir_name(*dir) },
            "lhs": fmt_q(lhs),
            "rhs": fmt_q(rhs),
        }),
        Violation::Count { s_star, k, m, lhs, rhs } => json!({
            "variant": "count",
            "indices": { "sStar": lab(*s_star), "k": space.set_labels(*k), "m": m },
            "lhs": fmt_q(lhs),
            "rhs": fmt_q(rhs),
        }),
        Violation::Orthant { x, y, lhs, rhs } => json!({
            "variant": "orthant",
            "indices": { "x": lab(*x), "y": lab(*y) },
            "lhs": fmt_q(lhs),
            "rhs": fmt_q(rhs),
        }),
        Violation::State { theta, inner } => {
            let inner_value = violation_value(inner, space, states);
            let theta_label = states
                .map(|st| st.label(*theta).to_string())
                .unwrap_or_else(|| theta.to_string());
            json!({
                "variant": "state",
                "indices": { "theta": theta_label },
                "lhs": inner_value["lhs"],
                "rhs": inner_value["rhs"],
                "inner": inner_value,
            })
        }
        Violation::Pair { i, j, inner } => {
            let inner_value = violation_value(inner, space, states);
            json!({
                "variant": "pair",
                "indices": { "i": i, "j": j },
                "lhs": inner_value["lhs"],
                "rhs": inner_value["rhs"],
                "inner": inner_value,
            })
        }
    }
}

pub fn verdict_value(
    verdict: &OrderVerdict,
    space: &SignalSpace,
    states: Option<&StateSpace>,
) -> Value {
    json!({
        "order": order_name(verdict.order),
        "holds": verdict.holds,
        "violation": verdict
            .violation
            .as_ref()
            .map(|v| violation_value(v, space, states)),
    })
}

pub fn statewise_verdict_value(
    verdict: &StatewiseVerdict,
    space: &SignalSpace,
    states: &StateSpace,
) -> Value {
    json!({
        "order": format!("{}-statewise", base_order_name(verdict.base)),
        "holds": verdict.holds,
        "testedStates": verdict
            .tested_states
            .iter()
            .map(|&t| states.label(t).to_string())
            .collect::<Vec<_>>(),
        "violation": verdict
            .violation
            .as_ref()
            .map(|v| violation_value(v, space, Some(states))),
    })
}

pub fn equilibria_value(set: &EquilibriumSet, space: &SignalSpace) -> Value {
    json!({
        "strategies": set
            .strategies
            .iter()
            .map(|&p| space.set_labels(p))
            .collect::<Vec<_>>(),
        "maxP": fmt_q(&set.stats.max_p),
        "minP": fmt_q(&set.stats.min_p),
        "argmax": set.stats.argmax.map(|p| space.set_labels(p)),
        "argmin": set.stats.argmin.map(|p| space.set_labels(p)),
    })
}

pub fn cutoffs_value(set: &CutoffSet, space: &SignalSpace) -> Value {
    let cutoff_entry = |c: &CutoffStrategy| {
        json!({ "c": c.c, "set": space.set_labels(c.set(space.n())) })
    };
    json!({
        "cutoffs": set.cutoffs.iter().map(cutoff_entry).collect::<Vec<_>>(),
        "eqmaxp": fmt_q(&set.stats.eqmaxp),
        "eqminp": fmt_q(&set.stats.eqminp),
        "argmax": set.stats.argmax.as_ref().map(cutoff_entry),
        "argmin": set.stats.argmin.as_ref().map(cutoff_entry),
    })
}

fn certification_value(c: &Certification) -> Value {
    json!({
        "pivotNetF": fmt_q(&c.pivot_net_f),
        "pivotNetG": fmt_q(&c.pivot_net_g),
        "boundF": fmt_q(&c.bound_f),
        "boundG": fmt_q(&c.bound_g),
    })
}

pub fn verify_report_value(
    pkg: &WitnessPackage,
    report: &VerifyReport,
    space: &SignalSpace,
) -> Value {
    json!({
        "family": family_name(pkg.family),
        "direction": direction_name(pkg.direction),
        "pivot": space.label(pkg.pivot),
        "strategy": space.set_labels(pkg.strategy.as_set(space.n())),
        "verified": report.ok,
        "equilibriumHolds": report.equilibrium_holds,
        "otherSideFails": report.other_side_fails,
        "pivotIndifferent": report.pivot_indifferent,
        "boundStrictlyChanges": report.bound_strictly_changes,
        "claimed": certification_value(&pkg.certification),
        "recomputed": certification_value(&report.recomputed),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::diagonal_mixture;
    use crate::num::{q, qi};
    use crate::orders::check_cad;
    use crate::witness::{build_private_witness, verify_witness, WitnessInputs};
    use crate::witness::WitnessFamily as WF;

    fn space2() -> SignalSpace {
        SignalSpace::from_values(vec![qi(0), qi(1)]).unwrap()
    }

    fn pair_dist() -> JointDist {
        JointDist::new(
            space2(),
            2,
            vec![
                (vec![0, 0], q(1, 4)),
                (vec![0, 1], q(1, 8)),
                (vec![1, 0], q(1, 8)),
                (vec![1, 1], q(1, 2)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn dist_round_trip_is_bit_exact() {
        let d = pair_dist();
        let text = to_json_string(&dist_file(&d));
        let loaded = parse_dist_str(&text).unwrap();
        assert!(loaded.warnings.is_empty());
        match loaded.value {
            DistInput::Exchangeable(e) => {
                assert_eq!(e, d);
                assert_eq!(to_json_string(&dist_file(&e)), text);
            }
            _ => panic!("expected exchangeable"),
        }
    }

    #[test]
    fn dist_file_shape_matches_contract() {
        let text = to_json_string(&dist_file(&pair_dist()));
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["signals"][0]["label"], "0");
        assert_eq!(v["players"], 2);
        assert_eq!(v["mass"][0]["profile"], json!(["0", "0"]));
        assert_eq!(v["mass"][0]["p"], "1/4");
        assert_eq!(v["mass"][1]["p"], "1/4");
        assert!(v.get("kind").is_none());
        assert!(v.get("stateFamily").is_none());
    }

    #[test]
    fn ordered_round_trip_keeps_asymmetry() {
        let d = NonExchJointDist::new(
            space2(),
            2,
            vec![
                (vec![0, 1], q(3, 4)),
                (vec![1, 0], q(1, 4)),
            ],
        )
        .unwrap();
        let text = to_json_string(&ordered_dist_file(&d));
        let loaded = parse_dist_str(&text).unwrap();
        match loaded.value {
            DistInput::Ordered(e) => {
                assert_eq!(e, d);
                assert!(!e.is_exchangeable());
            }
            _ => panic!("expected ordered"),
        }
    }

    #[test]
    fn family_round_trip_is_bit_exact() {
        let g = pair_dist();
        let f = diagonal_mixture(&g, &q(1, 3)).unwrap();
        let fam = StateFamily::new(
            SignalSpace::from_values(vec![qi(0), qi(1)]).unwrap(),
            vec![q(1, 3), q(2, 3)],
            vec![g, f],
        )
        .unwrap();
        let text = to_json_string(&family_file(&fam));
        let loaded = parse_dist_str(&text).unwrap();
        match loaded.value {
            DistInput::Family(e) => {
                assert_eq!(e, fam);
                assert_eq!(to_json_string(&family_file(&e)), text);
            }
            _ => panic!("expected family"),
        }
    }

    #[test]
    fn float_mass_entry_warns_once() {
        let text = r#"{
            "signals": [
                {"label": "0", "value": "0"},
                {"label": "1", "value": "1"}
            ],
            "players": 2,
            "mass": [
                {"profile": ["0", "0"], "p": 0.3},
                {"profile": ["0", "1"], "p": 0.45},
                {"profile": ["1", "1"], "p": "1/4"}
            ]
        }"#;
        let loaded = parse_dist_str(text).unwrap();
        assert_eq!(loaded.warnings.len(), 2);
        assert!(loaded.warnings[0].contains("mass[0].p"));
        match loaded.value {
            DistInput::Exchangeable(d) => assert_eq!(d.multiset_mass(&[0, 0]), q(3, 10)),
            _ => panic!("expected exchangeable"),
        }
    }

    #[test]
    fn bad_kind_is_rejected() {
        let text = r#"{
            "signals": [{"label": "0", "value": "0"}],
            "players": 2,
            "kind": "mystery",
            "mass": [{"profile": ["0", "0"], "p": "1"}]
        }"#;
        assert!(matches!(parse_dist_str(text), Err(SimilError::Parse(_))));
    }

    #[test]
    fn game_round_trip_private_and_common() {
        let game = PrivateValueGame::new(
            space2(),
            3,
            vec![q(-1, 2), qi(1)],
            vec![q(1, 3), q(1, 3)],
            Aggregator::affine(qi(1), q(-1, 2)).unwrap(),
        )
        .unwrap();
        let text = to_json_string(&private_game_file(&game, None));
        match parse_game_str(&text).unwrap().value {
            GameInput::Private { game: g, weights } => {
                assert_eq!(g, game);
                assert!(weights.is_none());
                assert_eq!(to_json_string(&private_game_file(&g, None)), text);
            }
            _ => panic!("expected private"),
        }

        let common = CommonValueGame::new(
            SignalSpace::from_values(vec![q(-1, 2), q(1, 2)]).unwrap(),
            2,
            vec![qi(-1), qi(1)],
            vec![qi(1), qi(1)],
            Aggregator::table(vec![qi(0), qi(1)]).unwrap(),
        )
        .unwrap();
        let text = to_json_string(&common_game_file(&common));
        match parse_game_str(&text).unwrap().value {
            GameInput::Common(g) => {
                assert_eq!(g, common);
                assert_eq!(to_json_string(&common_game_file(&g)), text);
            }
            _ => panic!("expected common"),
        }
    }

    #[test]
    fn weighted_game_file_round_trips() {
        let game = PrivateValueGame::new(
            space2(),
            2,
            vec![qi(0), qi(0)],
            vec![qi(1), qi(1)],
            Aggregator::identity(),
        )
        .unwrap();
        let w = vec![q(1, 2), qi(2)];
        let text = to_json_string(&private_game_file(&game, Some(&w)));
        match parse_game_str(&text).unwrap().value {
            GameInput::Private { weights, .. } => assert_eq!(weights.unwrap(), w),
            _ => panic!("expected private"),
        }
    }

    #[test]
    fn witness_bundle_replays_from_file_alone() {
        let g = pair_dist();
        let f = JointDist::new(
            space2(),
            2,
            vec![
                (vec![0, 0], q(1, 8)),
                (vec![0, 1], q(1, 4)),
                (vec![1, 0], q(1, 4)),
                (vec![1, 1], q(3, 8)),
            ],
        )
        .unwrap();
        assert!(!check_cad(&f, &g).unwrap().holds);
        let pkg = build_private_witness(WF::PrivateMax, &f, &g).unwrap();
        let text = to_json_string(&witness_bundle_file(&pkg, f.space()).unwrap());
        let loaded = parse_witness_bundle_str(&text).unwrap();
        assert_eq!(loaded.value, pkg);
        let report =
            verify_witness(&loaded.value, WitnessInputs::Private { f: &f, g: &g }).unwrap();
        assert!(report.ok);
        assert_eq!(
            to_json_string(&witness_bundle_file(&loaded.value, f.space()).unwrap()),
            text
        );
    }

    #[test]
    fn verdict_report_shape() {
        let g = pair_dist();
        let f = JointDist::new(
            space2(),
            2,
            vec![
                (vec![0, 0], q(1, 8)),
                (vec![0, 1], q(1, 4)),
                (vec![1, 0], q(1, 4)),
                (vec![1, 1], q(3, 8)),
            ],
        )
        .unwrap();
        let verdict = check_cad(&f, &g).unwrap();
        let v = verdict_value(&verdict, f.space(), None);
        assert_eq!(v["order"], "cad");
        assert_eq!(v["holds"], false);
        assert_eq!(v["violation"]["variant"], "point");
        assert_eq!(v["violation"]["indices"]["s"], "0");
        let lhs = parse_q(v["violation"]["lhs"].as_str().unwrap()).unwrap();
        let rhs = parse_q(v["violation"]["rhs"].as_str().unwrap()).unwrap();
        assert!(lhs < rhs);

        let holds = check_cad(&g, &g).unwrap();
        let v = verdict_value(&holds, g.space(), None);
        assert_eq!(v["holds"], true);
        assert_eq!(v["violation"], Value::Null);
    }

    #[test]
    fn equilibria_report_uses_sorted_labels() {
        let game = PrivateValueGame::new(
            space2(),
            2,
            vec![q(-1, 2), q(-1, 2)],
            vec![qi(1), qi(1)],
            Aggregator::identity(),
        )
        .unwrap();
        let set = game.enumerate_equilibria(&pair_dist()).unwrap();
        let v = equilibria_value(&set, &space2());
        let strategies = v["strategies"].as_array().unwrap();
        assert!(strategies.contains(&json!([])));
        for s in strategies {
            let labels: Vec<&str> = s.as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
            let mut sorted = labels.clone();
            sorted.sort();
            assert_eq!(labels, sorted);
        }
        assert!(parse_q(v["maxP"].as_str().unwrap()).is_ok());
    }
}
