//! Exact-rational similarity orders on joint signal distributions,
//! symmetric equilibrium enumeration for binary-action games, and
//! construction of separating witness games from order violations.

pub mod apps;
pub mod dist;
pub mod error;
pub mod family;
pub mod games;
pub mod gen;
pub mod io;
pub mod linalg;
pub mod num;
pub mod orders;
pub mod witness;

pub use apps::auction::{
    auction_revenue, eti_apply_all, eti_decompose, eti_prefix_valid_sequence, EtiOutcome, EtiStep,
};
pub use apps::bankrun::{
    bank_run_analysis, bank_run_family, bank_run_family_with_prior, bank_run_game,
    bank_run_sweep, bank_run_thresholds, intro_example_suite, BankRunParams, BankRunPrior,
    BankRunReport, BankRunSweep, IntroReport, SweepRow,
};
pub use apps::beliefs::{
    belief_step, common_belief_fixpoint, rationalizable_sets, BeliefState, RationalizableReport,
};
pub use dist::{
    apply_eti, diagonal_mixture, CountCdf, JointDist, NonExchJointDist, SigSet, SignalSpace,
    ValidationReport,
};
pub use error::{Result, SimilError};
pub use family::{AffineIndependenceReport, StateFamily, StateSpace};
pub use games::{
    nonexch_enumerate_equilibria, nonexch_is_equilibrium, nonexch_net_payoff, Aggregator,
    CommonValueGame, CutoffInclusionReport, CutoffSet, CutoffStats, CutoffStrategy,
    EquilibriumCheck, EquilibriumSet, IcEntry, InclusionReport, ParticipationStats,
    PrivateValueGame, SetRelation,
};
pub use gen::Gen;
pub use io::{
    base_order_name, common_game_file, cutoffs_value, dist_file, equilibria_value, family_file,
    order_name, ordered_dist_file, parse_base_order, parse_dist_str, parse_family_name,
    parse_game_str, parse_witness_bundle_str, private_game_file, statewise_verdict_value,
    to_json_string, verdict_value, verify_report_value, violation_value, witness_bundle_file,
    DistFile, DistInput, GameFile, GameInput, Loaded, WitnessBundleFile,
};
pub use num::{fmt_q, parse_q, q, q_from_f64, q_to_f64, qi, Q};
pub use orders::{
    check_cad, check_cad_nonexch, check_ccad, check_icad, check_order, check_pqd_2d, check_scad,
    check_statewise, BaseOrder, CheckedOrder, ContourDir, OrderVerdict, StatewiseVerdict,
    Violation,
};
pub use witness::{
    build_common_witness, build_private_witness, build_scad_witness, build_separable_witness,
    find_contour_violation, find_statewise_contour_violation, separating_functional,
    verify_witness, witness_common, witness_congestion, witness_private_max, witness_private_min,
    witness_scad, witness_separable, Certification, Direction, SeparatingFunctional, VerifyReport,
    WitnessFamily, WitnessGame, WitnessInputs, WitnessPackage, WitnessStrategy,
};
