#!/usr/bin/env python3
"""Smoke test for the svf extension module.

Expects `cargo build -p svf-py` to have produced target/{debug,release}/
libsvf.so. The library is staged into a temp directory as svf.so so the
interpreter can import it by name, then exercised end to end on small
instances with exactly known answers.
"""

import pathlib
import shutil
import sys
import tempfile
from fractions import Fraction as F


def load_module():
    root = pathlib.Path(__file__).resolve().parents[1]
    candidates = [
        root / "target" / "debug" / "libsvf.so",
        root / "target" / "release" / "libsvf.so",
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit("libsvf.so not found; run `cargo build -p svf-py` first")
    stage = tempfile.mkdtemp(prefix="svf-py-")
    shutil.copy2(built, pathlib.Path(stage) / "svf.so")
    sys.path.insert(0, stage)
    import svf

    return svf


svf = load_module()
checks = 0


def ok(cond, what):
    global checks
    if not cond:
        sys.exit(f"FAIL: {what}")
    checks += 1


def raises(fn, what):
    try:
        fn()
    except ValueError:
        ok(True, what)
    else:
        sys.exit(f"FAIL: {what} did not raise ValueError")


# Probability vectors.
b3 = svf.ProbabilityVector.banzhaf(3)
s3 = svf.ProbabilityVector.shapley(3)
ok(b3.n == 3, "banzhaf n")
ok(b3.entries == [F(1, 4)] * 3, "banzhaf entries")
ok(s3.entries == [F(1, 3), F(1, 6), F(1, 3)], "shapley entries")
ok(b3.normalizer() == F(7, 2), "banzhaf normalizer")
ok(b3.p(-1) == 0 and b3.p(3) == 0, "out-of-range p is zero")
ok(b3.is_regular() and s3.is_regular(), "presets are regular")
ok(svf.ProbabilityVector(["1/2", "1/4", "0"]).is_regular() is False, "custom vector")

# Semivalues of the three-player majority game: every player gets 1.
maj3 = svf.WeightedGame(["1", "1", "1"], 0)
ok(maj3.n == 3 and maj3.theta == 0, "game accessors")
ok(maj3.weights == [F(1)] * 3, "game weights")
sv = maj3.semivalues(b3)
ok(sv == [F(1)] * 3, "majority semivalues")
ok(isinstance(sv[0], F), "semivalues are Fractions")
ok(maj3.semivalues(b3, method="brute") == sv, "brute route agrees")

# A lopsided game under the permutation vector.
lop = svf.WeightedGame([2, 1, 1], 2)
ok(lop.semivalues(s3) == [F(4, 3), F(1, 3), F(1, 3)], "lopsided Shapley values")
ok(lop.normalized().weights == [F(1, 2), F(1, 4), F(1, 4)], "normalized weights")

# Reformulation: semivalue_i = (hat_i + cf) / 2.
ref = lop.reformulation(s3)
ok(ref["semivalues"] == lop.semivalues(s3), "reformulation semivalues")
ok(all((h + ref["cf"]) / 2 == v for h, v in zip(ref["hat"], ref["semivalues"])),
   "reformulation split")

# Verification.
ok(maj3.verify(b3, [1, 1, 1]) is True, "verify yes")
ok(maj3.verify(b3, [1, 1, "2"]) is False, "verify no")

# Khintchine constant and zero mass of a zero-sum vector.
b4 = svf.ProbabilityVector.banzhaf(4)
a = ["1", "1", "-1", "-1"]
ok(svf.khintchine(a, b4) == F(8, 5), "khintchine value")
ok(svf.khintchine(a, b4, method="brute") == F(8, 5), "khintchine brute")
ok(svf.partition_probability(a, b4) == F(1, 3), "partition probability")

# Counting pipeline: (1, 1, 2) with k = 1 has the two half-sum subsets
# {3} and {1, 2}, recovered exactly from one probability.
b5 = svf.ProbabilityVector.banzhaf(5)
run = svf.rpartition_pipeline([1, 1, 2], 1, b5)
ok(run["vector"] == [F(1), F(1), F(2), F(-2), F(-2)], "pipeline vector")
ok(run["probability"] == F(5, 31), "pipeline probability")
ok(run["recovered"] == 2 and run["count"] == 2, "pipeline count")
ok(run["promise_holds"] is True, "pipeline promise")

# Perturbed triple recovers the same probability from three constants.
triple = svf.khintchine_triple(a, b4)
ok(triple["c"] == [F(2), F(2), F(-2), F(-2)], "triple doubles the base")
ok(triple["d"][0] == F(3, 4), "triple perturbs the first head")
ok(triple["pointwise"] and triple["aggregate"] and triple["partition_match"],
   "triple identities")
ok(triple["recovered"] == F(1, 3), "triple recovery")

# Optimization over the semivalue polytope, both modes.
opt = svf.optimize(a, b4)
ok(opt["value"] == 3, "optimum value")
wsv = opt["witness"].semivalues(b4)
ok(wsv == [F(3, 4), F(3, 4), F(-3, 4), F(-3, 4)], "witness semivalues")
ok(sum(F(x) for x in (1, 1, -1, -1)) == 0 and
   sum(f * v for f, v in zip([F(1), F(1), F(-1), F(-1)], wsv)) == 3,
   "witness attains the optimum")
ok(svf.optimize(a, b4, mode="vertex_enum")["value"] == 3, "vertex scan agrees")

# Transfer to positive weights: tails flip, targets shift.
moved = svf.pton(a, ["0", "0", "0", "0"], b4)
ok(moved["weights"] == [F(1)] * 4, "pton weights are positive")
ok(moved["theta"] == 0, "pton threshold")
ok(moved["targets"] == [F(0), F(0), F(3, 2), F(3, 2)], "pton target shift")
ok(moved["shift_identities"] is True, "pton identities")

# Inverse problem, all three modes.
inv = svf.invert([1, 1, 1], 0, b3)
ok(inv["status"] == "found", "exact inverse status")
ok(inv["weights"] == [F(1, 3)] * 3, "exact inverse weights")
ok(inv["games_examined"] == 4, "exact inverse work")
ok(svf.invert([1, 1, 2], 0, b3)["status"] == "no_solution_in_class", "clean no")

near = svf.invert([1, 1, "9/10"], 0, b3, mode="nearest", bound=1)
ok(near["status"] == "nearest" and near["distance"] == F(1, 100), "nearest inverse")
ok(near["weights"] == [F(1, 3)] * 3, "nearest weights")

heur = svf.invert([2, 0, 0], 0, b3, mode="heuristic")
ok(heur["status"] == "found" and heur["distance"] == 0, "heuristic hits zero")
ok(heur["weights"] == [F(14, 23), F(9, 46), F(9, 46)], "heuristic weights")

# Verification through the inverse solver agrees with direct verification.
ok(svf.verify_via_inverse(maj3, [1, 1, 1], b3) is True, "inverse-based yes")
ok(svf.verify_via_inverse(maj3, [1, 1, 0], b3) is False, "inverse-based no")

# Equal semivalue vectors force agreement on every positive-mass point.
uniq = svf.uniqueness(maj3, svf.WeightedGame([1, 1, 1], 0), b3)
ok(uniq["semivalues_equal"] and uniq["holds"], "uniqueness holds")
ok(uniq["violations"] == [] and uniq["points_checked"] > 0, "uniqueness scan ran")

# Canonical enumeration: six two-player truth tables at bound 1.
games = svf.enumerate_games(2, 1)
ok(len(games) == 6, "two-player canonical count")
ok(all(isinstance(g, svf.WeightedGame) for g in games), "enumeration types")

# Built-in invariant suite at a small cap, invariant across job counts.
report = svf.selftest(cap=5, trials=4)
ok(report["all_passed"] is True, "selftest passes")
ok(len(report["outcomes"]) >= 20, "selftest coverage")
ok(all(o["passed"] for o in report["outcomes"]), "selftest outcomes")
ok(svf.selftest(cap=5, trials=4, jobs=2) == report, "selftest jobs-invariant")

# Module constants and error paths.
ok(svf.DEFAULT_CAP == 20 and svf.DEFAULT_BOUND == 3, "module constants")
raises(lambda: svf.WeightedGame(["1/0"], 0), "zero denominator")
raises(lambda: svf.WeightedGame([0.5], 0), "float weight")
raises(lambda: svf.ProbabilityVector(["1/2", "1/4"]), "unnormalized vector")
raises(lambda: maj3.semivalues(b3, method="nope"), "unknown method")
raises(lambda: maj3.semivalues(svf.ProbabilityVector.banzhaf(4)), "dimension clash")
raises(lambda: svf.khintchine(a, b4, method="brute", cap=1), "cap exceeded")
raises(lambda: svf.invert([1, 1, 1], 0, s3, mode="heuristic"), "heuristic needs banzhaf")

print(f"ok: {checks} checks passed")
