//! Python extension module: the order checks, equilibrium enumeration,
//! witness pipeline, and application reports behind a JSON-string surface.
//! Inputs and outputs use the same file formats as the command line, so
//! results are bit-identical across the two frontends.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde_json::json;
use simil_core::games::nonexch_enumerate_equilibria;
use simil_core::io::{
    cutoffs_value, equilibria_value, parse_base_order, parse_dist_str, parse_family_name,
    parse_game_str, parse_witness_bundle_str, statewise_verdict_value, to_json_string,
    verdict_value, verify_report_value, witness_bundle_file, DistInput, GameInput,
};
use simil_core::num::{fmt_q, parse_q, qi};
use simil_core::orders::{check_cad_nonexch, check_order, check_statewise, BaseOrder};
use simil_core::witness::{
    build_common_witness, build_private_witness, build_scad_witness, build_separable_witness,
    verify_witness, WitnessFamily, WitnessInputs,
};
use simil_core::{
    auction_revenue, bank_run_sweep, eti_apply_all, eti_decompose, rationalizable_sets,
    EtiOutcome, JointDist, SimilError,
};

fn err(e: SimilError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn with_warnings(mut value: serde_json::Value, warnings: Vec<String>) -> String {
    if !warnings.is_empty() {
        value["warnings"] = json!(warnings);
    }
    to_json_string(&value)
}

/// Checks a similarity order between two distribution files given as JSON
/// strings; set `statewise` to compare two state families per state.
#[pyfunction(signature = (order, f_json, g_json, statewise = false))]
fn check(order: &str, f_json: &str, g_json: &str, statewise: bool) -> PyResult<String> {
    let base = parse_base_order(order).map_err(err)?;
    let f = parse_dist_str(f_json).map_err(err)?;
    let g = parse_dist_str(g_json).map_err(err)?;
    let mut warnings = f.warnings;
    warnings.extend(g.warnings);
    let value = match (f.value, g.value) {
        (DistInput::Exchangeable(f), DistInput::Exchangeable(g)) if !statewise => {
            let verdict = check_order(base, &f, &g).map_err(err)?;
            verdict_value(&verdict, f.space(), None)
        }
        (DistInput::Ordered(f), DistInput::Ordered(g)) if !statewise => {
            if base != BaseOrder::Cad {
                return Err(err(SimilError::Unsupported(
                    "ordered distributions support the cad order only".into(),
                )));
            }
            let verdict = check_cad_nonexch(&f, &g).map_err(err)?;
            verdict_value(&verdict, f.space(), None)
        }
        (DistInput::Family(f), DistInput::Family(g)) if statewise => {
            let verdict = check_statewise(base, &f, &g).map_err(err)?;
            statewise_verdict_value(&verdict, f.space(), f.states())
        }
        _ => {
            return Err(err(SimilError::Mismatch(
                "the inputs do not fit this check; families need statewise=True".into(),
            )))
        }
    };
    Ok(with_warnings(value, warnings))
}

/// Enumerates symmetric pure equilibria of a game file on a distribution
/// file; set `cutoffs` for a common-value game on a state family.
#[pyfunction(signature = (game_json, dist_json, cutoffs = false))]
fn equilibria(game_json: &str, dist_json: &str, cutoffs: bool) -> PyResult<String> {
    let game = parse_game_str(game_json).map_err(err)?;
    let dist = parse_dist_str(dist_json).map_err(err)?;
    let mut warnings = game.warnings;
    warnings.extend(dist.warnings);
    let value = match (game.value, dist.value) {
        (GameInput::Private { game, weights }, DistInput::Exchangeable(d)) if !cutoffs => {
            if weights.is_some() {
                return Err(err(SimilError::Invalid(
                    "weighted games run on ordered distributions".into(),
                )));
            }
            let set = game.enumerate_equilibria(&d).map_err(err)?;
            equilibria_value(&set, game.space())
        }
        (GameInput::Private { game, weights }, DistInput::Ordered(d)) if !cutoffs => {
            let weights = weights.unwrap_or_else(|| vec![qi(1); game.players()]);
            let strategies = nonexch_enumerate_equilibria(&game, &weights, &d).map_err(err)?;
            json!({
                "strategies": strategies
                    .iter()
                    .map(|&p| game.space().set_labels(p))
                    .collect::<Vec<_>>(),
            })
        }
        (GameInput::Common(game), DistInput::Family(fam)) if cutoffs => {
            let set = game.enumerate_cutoff_equilibria(&fam).map_err(err)?;
            cutoffs_value(&set, fam.space())
        }
        _ => {
            return Err(err(SimilError::Mismatch(
                "game and distribution files do not go together; \
                 common-value games on families need cutoffs=True"
                    .into(),
            )))
        }
    };
    Ok(with_warnings(value, warnings))
}

fn load_pair(f_json: &str, g_json: &str) -> PyResult<(DistInput, DistInput, Vec<String>)> {
    let f = parse_dist_str(f_json).map_err(err)?;
    let g = parse_dist_str(g_json).map_err(err)?;
    let mut warnings = f.warnings;
    warnings.extend(g.warnings);
    Ok((f.value, g.value, warnings))
}

/// Builds a separating witness from an order violation between the two
/// inputs and replays it, returning the bundle and the verification.
#[pyfunction]
fn witness(f_json: &str, g_json: &str, family: &str) -> PyResult<String> {
    let family = parse_family_name(family).map_err(err)?;
    let (f, g, warnings) = load_pair(f_json, g_json)?;
    let needs_families = matches!(family, WitnessFamily::Common | WitnessFamily::Separable);
    let value = match (f, g) {
        (DistInput::Exchangeable(f), DistInput::Exchangeable(g)) if !needs_families => {
            let pkg = match family {
                WitnessFamily::Scad => build_scad_witness(&f, &g).map_err(err)?,
                _ => build_private_witness(family, &f, &g).map_err(err)?,
            };
            let report =
                verify_witness(&pkg, WitnessInputs::Private { f: &f, g: &g }).map_err(err)?;
            json!({
                "bundle": witness_bundle_file(&pkg, f.space()).map_err(err)?,
                "verification": verify_report_value(&pkg, &report, f.space()),
            })
        }
        (DistInput::Family(f), DistInput::Family(g)) if needs_families => {
            let pkg = match family {
                WitnessFamily::Common => build_common_witness(&f, &g, None).map_err(err)?,
                _ => build_separable_witness(&f, &g, None).map_err(err)?,
            };
            let report =
                verify_witness(&pkg, WitnessInputs::Families { f: &f, g: &g }).map_err(err)?;
            json!({
                "bundle": witness_bundle_file(&pkg, f.space()).map_err(err)?,
                "verification": verify_report_value(&pkg, &report, f.space()),
            })
        }
        _ => {
            return Err(err(SimilError::Mismatch(if needs_families {
                "this witness family separates state families; pass two family files".into()
            } else {
                "this witness family separates plain distributions".into()
            })))
        }
    };
    Ok(with_warnings(value, warnings))
}

/// Replays a witness bundle against the two inputs it claims to separate.
#[pyfunction]
fn verify(bundle_json: &str, f_json: &str, g_json: &str) -> PyResult<String> {
    let bundle = parse_witness_bundle_str(bundle_json).map_err(err)?;
    let pkg = bundle.value;
    let (f, g, mut warnings) = load_pair(f_json, g_json)?;
    warnings.extend(bundle.warnings);
    let value = match (&f, &g) {
        (DistInput::Exchangeable(f), DistInput::Exchangeable(g)) => {
            let report = verify_witness(&pkg, WitnessInputs::Private { f, g }).map_err(err)?;
            verify_report_value(&pkg, &report, f.space())
        }
        (DistInput::Family(f), DistInput::Family(g)) => {
            let report = verify_witness(&pkg, WitnessInputs::Families { f, g }).map_err(err)?;
            verify_report_value(&pkg, &report, f.space())
        }
        _ => {
            return Err(err(SimilError::Mismatch(
                "verification needs two plain distributions or two families".into(),
            )))
        }
    };
    Ok(with_warnings(value, warnings))
}

/// Sweeps the stay/run perturbation over its feasible range and returns
/// the thresholds with one row per grid point.
#[pyfunction(signature = (epsilon = "1/20", p = "97/100", points = 20))]
fn bankrun(epsilon: &str, p: &str, points: usize) -> PyResult<String> {
    let epsilon = parse_q(epsilon).map_err(err)?;
    let p = parse_q(p).map_err(err)?;
    let sweep = bank_run_sweep(&epsilon, &p, points).map_err(err)?;
    let opt = |x: &Option<simil_core::Q>| x.as_ref().map(fmt_q);
    let value = json!({
        "alphaStar": fmt_q(&sweep.alpha_star),
        "alphaStarStar": fmt_q(&sweep.alpha_star_star),
        "feasibility": fmt_q(&sweep.feasibility),
        "rows": sweep.rows.iter().map(|r| json!({
            "a": fmt_q(&r.a),
            "eG": r.eg_exists,
            "eB": r.eb_exists,
            "maximalExpectedRun": opt(&r.maximal_expected_run),
            "minimalExpectedRun": opt(&r.minimal_expected_run),
        })).collect::<Vec<_>>(),
    });
    Ok(to_json_string(&value))
}

fn plain_dist(input: DistInput) -> PyResult<JointDist> {
    match input {
        DistInput::Exchangeable(d) => Ok(d),
        _ => Err(err(SimilError::Invalid("this operation takes a plain distribution".into()))),
    }
}

/// Second-price revenues of the pair and the elementary-transfer
/// decomposition of the first input against the second.
#[pyfunction]
fn auction(f_json: &str, g_json: &str) -> PyResult<String> {
    let (f, g, warnings) = load_pair(f_json, g_json)?;
    let f = plain_dist(f)?;
    let g = plain_dist(g)?;
    let revenue_f = auction_revenue(&f).map_err(err)?;
    let revenue_g = auction_revenue(&g).map_err(err)?;
    let value = match eti_decompose(&f, &g).map_err(err)? {
        EtiOutcome::Steps(steps) => {
            let rebuilt = eti_apply_all(&g, &steps).map_err(err)?;
            let exact = rebuilt.entries().collect::<Vec<_>>() == f.entries().collect::<Vec<_>>();
            json!({
                "revenueF": fmt_q(&revenue_f),
                "revenueG": fmt_q(&revenue_g),
                "gap": fmt_q(&(&revenue_f - &revenue_g)),
                "steps": steps.iter().map(|st| json!({
                    "s": f.space().label(st.s),
                    "sPrime": f.space().label(st.s_prime),
                    "magnitude": fmt_q(&st.magnitude),
                    "revenueIncrement": fmt_q(
                        &(&st.magnitude * (f.space().value(st.s_prime) - f.space().value(st.s)))
                    ),
                })).collect::<Vec<_>>(),
                "rebuildsExactly": exact,
            })
        }
        EtiOutcome::Blocked { s, s_prime, f_mass, g_mass } => json!({
            "revenueF": fmt_q(&revenue_f),
            "revenueG": fmt_q(&revenue_g),
            "blocked": {
                "s": f.space().label(s),
                "sPrime": f.space().label(s_prime),
                "fMass": fmt_q(&f_mass),
                "gMass": fmt_q(&g_mass),
            },
        }),
    };
    Ok(with_warnings(value, warnings))
}

/// Rationalizable invest and not-invest sets of the two-player threshold
/// game; `thresholds` lists x(s) as "num/den" strings, one per signal.
#[pyfunction]
fn rationalizable(dist_json: &str, thresholds: Vec<String>) -> PyResult<String> {
    let loaded = parse_dist_str(dist_json).map_err(err)?;
    let warnings = loaded.warnings;
    let d = plain_dist(loaded.value)?;
    let x = thresholds
        .iter()
        .map(|t| parse_q(t))
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?;
    let report = rationalizable_sets(&d, &x).map_err(err)?;
    let labels = |p| d.space().set_labels(p);
    let value = json!({
        "invest": [labels(report.invest.0), labels(report.invest.1)],
        "notInvest": [labels(report.not_invest.0), labels(report.not_invest.1)],
        "investIterations": report.invest_iterations,
        "notInvestIterations": report.not_invest_iterations,
    });
    Ok(with_warnings(value, warnings))
}

#[pymodule]
fn simil_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(equilibria, m)?)?;
    m.add_function(wrap_pyfunction!(witness, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(bankrun, m)?)?;
    m.add_function(wrap_pyfunction!(auction, m)?)?;
    m.add_function(wrap_pyfunction!(rationalizable, m)?)?;
    Ok(())
}
