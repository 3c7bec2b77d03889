//! Regenerates the fixtures/ tree at the repository root. Every file is
//! deterministic, so reruns leave a clean working copy.

use simil_core::apps::bankrun::{bank_run_family, bank_run_game, BankRunParams};
use simil_core::dist::{apply_eti, diagonal_mixture, JointDist, SignalSpace};
use simil_core::family::StateFamily;
use simil_core::games::{Aggregator, PrivateValueGame};
use simil_core::io::{common_game_file, dist_file, family_file, private_game_file, to_json_string};
use simil_core::num::{q, qi, Q};
use std::fs;
use std::path::{Path, PathBuf};

fn binary_space() -> SignalSpace {
    SignalSpace::from_values(vec![qi(0), qi(1)]).unwrap()
}

fn table1_f() -> JointDist {
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

fn table1_g() -> JointDist {
    JointDist::new(
        binary_space(),
        3,
        vec![(vec![0, 0, 1], q(3, 4)), (vec![1, 1, 1], q(1, 4))],
    )
    .unwrap()
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

fn independent3() -> JointDist {
    JointDist::new(
        binary_space(),
        3,
        vec![
            (vec![0, 0, 0], q(1, 8)),
            (vec![0, 0, 1], q(3, 8)),
            (vec![0, 1, 1], q(3, 8)),
            (vec![1, 1, 1], q(1, 8)),
        ],
    )
    .unwrap()
}

fn auction_g() -> JointDist {
    let space = SignalSpace::from_values(vec![qi(0), qi(1), qi(2)]).unwrap();
    let cells = (0..3).flat_map(|s| (0..3).map(move |t| (vec![s, t], q(1, 9))));
    JointDist::new(space, 2, cells.collect::<Vec<_>>()).unwrap()
}

fn rationalize_dist() -> JointDist {
    JointDist::new(
        binary_space(),
        2,
        vec![
            (vec![0, 0], q(9, 25)),
            (vec![0, 1], q(6, 25)),
            (vec![1, 0], q(6, 25)),
            (vec![1, 1], q(4, 25)),
        ],
    )
    .unwrap()
}

/// Two states over three signals: posteriors of three signals in a
/// one-dimensional simplex are always affinely dependent, so witness
/// construction on this pair must report the degeneracy.
fn degenerate_pair() -> (StateFamily, StateFamily) {
    let space = SignalSpace::from_values(vec![qi(0), qi(1), qi(2)]).unwrap();
    let states = SignalSpace::from_values(vec![qi(0), qi(1)]).unwrap();
    let uniform = |space: &SignalSpace| {
        let cells = (0..3).flat_map(|s| (0..3).map(move |t| (vec![s, t], q(1, 9))));
        JointDist::new(space.clone(), 2, cells.collect::<Vec<_>>()).unwrap()
    };
    let spread = JointDist::new(
        space.clone(),
        2,
        vec![
            (vec![0, 0], q(1, 18)),
            (vec![1, 1], q(1, 18)),
            (vec![0, 1], q(3, 18)),
            (vec![1, 0], q(3, 18)),
            (vec![0, 2], q(2, 18)),
            (vec![2, 0], q(2, 18)),
            (vec![1, 2], q(2, 18)),
            (vec![2, 1], q(2, 18)),
            (vec![2, 2], q(2, 18)),
        ],
    )
    .unwrap();
    let prior = vec![q(1, 2), q(1, 2)];
    let g = StateFamily::new(states.clone(), prior.clone(), vec![uniform(&space), uniform(&space)])
        .unwrap();
    let f = StateFamily::new(states, prior, vec![uniform(&space), spread]).unwrap();
    (f, g)
}

fn write(dir: &Path, name: &str, content: String) {
    let path = dir.join(name);
    fs::write(&path, content).unwrap_or_else(|e| panic!("write {}: {e}", path.display()));
    println!("wrote {}", path.display());
}

fn main() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    fs::create_dir_all(&dir).expect("create fixtures dir");

    write(&dir, "table1_F.dist.json", to_json_string(&dist_file(&table1_f())));
    write(&dir, "table1_G.dist.json", to_json_string(&dist_file(&table1_g())));

    write(&dir, "fig2_F.dist.json", to_json_string(&dist_file(&cycle_shift(q(1, 32)))));
    write(&dir, "fig2_G.dist.json", to_json_string(&dist_file(&cycle_shift(qi(0)))));

    let eps = q(1, 20);
    let p = q(97, 100);
    let base_params = BankRunParams::new(eps.clone(), p.clone(), qi(0));
    let feasibility = base_params.feasibility_bound();
    let perturbed_params = BankRunParams::new(eps, p, feasibility);
    let base = bank_run_family(&base_params).expect("valid parameters");
    let perturbed = bank_run_family(&perturbed_params).expect("feasible perturbation");
    write(&dir, "fig1_base.dist.json", to_json_string(&dist_file(base.per_state(1))));
    write(
        &dir,
        "fig1_perturbed.dist.json",
        to_json_string(&dist_file(perturbed.per_state(1))),
    );
    write(&dir, "bankrun_base.dist.json", to_json_string(&family_file(&base)));
    write(&dir, "bankrun_perturbed.dist.json", to_json_string(&family_file(&perturbed)));
    write(&dir, "bankrun.game.json", to_json_string(&common_game_file(&bank_run_game())));

    let dominance = PrivateValueGame::new(
        binary_space(),
        3,
        vec![qi(1), qi(1)],
        vec![qi(0), qi(0)],
        Aggregator::identity(),
    )
    .unwrap();
    write(&dir, "dominance.game.json", to_json_string(&private_game_file(&dominance, None)));

    let congestion = PrivateValueGame::new(
        binary_space(),
        3,
        vec![q(1, 4), q(1, 2)],
        vec![q(-1, 4), q(-1, 4)],
        Aggregator::identity(),
    )
    .unwrap();
    write(&dir, "congestion.game.json", to_json_string(&private_game_file(&congestion, None)));
    write(&dir, "independent3.dist.json", to_json_string(&dist_file(&independent3())));
    write(
        &dir,
        "independent3_mixture.dist.json",
        to_json_string(&dist_file(&diagonal_mixture(&independent3(), &q(1, 2)).unwrap())),
    );

    let g = auction_g();
    let f = apply_eti(&apply_eti(&g, 0, 1, &q(1, 18)).unwrap(), 1, 2, &q(1, 36)).unwrap();
    write(&dir, "auction_G.dist.json", to_json_string(&dist_file(&g)));
    write(&dir, "auction_F.dist.json", to_json_string(&dist_file(&f)));

    write(&dir, "rationalize.dist.json", to_json_string(&dist_file(&rationalize_dist())));

    let (df, dg) = degenerate_pair();
    write(&dir, "degenerate_F.dist.json", to_json_string(&family_file(&df)));
    write(&dir, "degenerate_G.dist.json", to_json_string(&family_file(&dg)));
}
