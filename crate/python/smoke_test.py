"""Smoke test for the simil_py extension module.

Build and stage the module first:

    cargo build -p simil-py --release
    cp target/release/libsimil_py.so python/simil_py.so

then run `python3 python/smoke_test.py`.
"""

import json
import pathlib
import sys

HERE = pathlib.Path(__file__).resolve().parent
FIXTURES = HERE.parent / "fixtures"

if not (HERE / "simil_py.so").exists():
    sys.exit("simil_py.so not found; see the module docstring for build steps")
sys.path.insert(0, str(HERE))

import simil_py


def fixture(name):
    return (FIXTURES / name).read_text()


def run(label, cond):
    status = "ok" if cond else "FAIL"
    print(f"{status:4} {label}")
    return cond


results = []

# Order checks.
verdict = json.loads(simil_py.check("cad", fixture("table1_F.dist.json"),
                                    fixture("table1_G.dist.json")))
results.append(run("pairwise order holds on the aligned pair", verdict["holds"]))

verdict = json.loads(simil_py.check("cad", fixture("fig2_F.dist.json"),
                                    fixture("fig2_G.dist.json")))
results.append(run("cycle-shift pair breaks pairwise at signals 2 and 3",
                   not verdict["holds"]
                   and verdict["violation"]["indices"] == {"s": "2", "sPrime": "3"}
                   and verdict["violation"]["lhs"] == "3/8"))

verdict = json.loads(simil_py.check("ccad", fixture("fig2_F.dist.json"),
                                    fixture("fig2_G.dist.json")))
results.append(run("contour order holds on the cycle-shift pair", verdict["holds"]))

verdict = json.loads(simil_py.check("cad", fixture("bankrun_perturbed.dist.json"),
                                    fixture("bankrun_base.dist.json"), statewise=True))
results.append(run("statewise check points at the middle state",
                   not verdict["holds"]
                   and verdict["violation"]["indices"]["theta"] == "1/2"))

# Equilibria.
eq = json.loads(simil_py.equilibria(fixture("dominance.game.json"),
                                    fixture("table1_F.dist.json")))
results.append(run("dominant game keeps the full strategy",
                   eq["strategies"] == [["0", "1"]] and eq["maxP"] == "1"))

cut = json.loads(simil_py.equilibria(fixture("bankrun.game.json"),
                                     fixture("bankrun_base.dist.json"), cutoffs=True))
sets = {entry["c"]: entry["set"] for entry in cut["cutoffs"]}
results.append(run("cutoff enumeration lists both named equilibria",
                   sets.get(2) == ["1/2", "3/2"] and sets.get(3) == ["3/2"]))

# Witness round trip.
built = json.loads(simil_py.witness(fixture("fig1_perturbed.dist.json"),
                                    fixture("fig1_base.dist.json"), "private-max"))
results.append(run("witness replays at build time", built["verification"]["verified"]))

replay = json.loads(simil_py.verify(json.dumps(built["bundle"]),
                                    fixture("fig1_perturbed.dist.json"),
                                    fixture("fig1_base.dist.json")))
results.append(run("bundle replays from its serialized form", replay["verified"]))

try:
    simil_py.witness(fixture("degenerate_F.dist.json"),
                     fixture("degenerate_G.dist.json"), "common")
    results.append(run("degenerate families raise", False))
except ValueError as e:
    results.append(run("degenerate families raise", "degenerate" in str(e)))

# Applications.
sweep = json.loads(simil_py.bankrun())
results.append(run("sweep thresholds match the closed form",
                   sweep["alphaStar"] == "319033/680000"
                   and sweep["alphaStarStar"] == "160403/340000"
                   and len(sweep["rows"]) == 20
                   and all(r["eB"] and r["eG"] for r in sweep["rows"])))

auction = json.loads(simil_py.auction(fixture("auction_F.dist.json"),
                                      fixture("auction_G.dist.json")))
results.append(run("revenue gap decomposes into exact increments",
                   auction["gap"] == "1/12" and auction["rebuildsExactly"]
                   and [s["magnitude"] for s in auction["steps"]] == ["1/18", "1/36"]))

rat = json.loads(simil_py.rationalizable(fixture("rationalize.dist.json"),
                                         ["-1", "1/2"]))
results.append(run("investment unravels on the skewed fixture",
                   rat["invest"] == [[], []] and rat["investIterations"] <= 2))

print(f"\n{sum(results)}/{len(results)} checks passed")
sys.exit(0 if all(results) else 1)
