"""Acceptance suite: one test per criterion, with a visible pass/fail line.

Every expected value is either closed-form arithmetic, an independently
computed oracle (dense unitaries, binomial tails, Schmidt decompositions)
or a bound that must hold with the stated tolerance.  Runtime caps are
asserted with the wall clock.
"""

import time

import numpy as np
import pytest

from conftest import haar_unitary2, random_state
from mbqclab.cli import main as cli_main
from mbqclab.engine import CallbackStrategy, ResourceState, run_all_branches
from mbqclab.fixtures import cluster_fixture
from mbqclab.gates import Circuit, Gate, ID2
from mbqclab.optimize import optimize_corrections, optimize_product_overlap
from mbqclab.quantifier import StrategyEncoding, Thresholds, Decision, decide, sandwich_check
from mbqclab.reduction import (
    acceptance_prob,
    amplify_verifier,
    binomial_tail,
    equality_verifier,
    rotation_verifier,
)
from mbqclab.serialization import canonical_dumps, verifier_to_json
from mbqclab.states import (
    fidelity_with_pure,
    mixture_density,
    pure_density,
    schmidt_values_sq,
    trace_distance,
)
from mbqclab.universality import (
    PrecisionParams,
    StrategyDictionary,
    UnitaryFamily,
    check_universality,
    distance_for_witness,
    fidelity_for_witness,
    strategy_search,
)


@pytest.fixture
def report(capsys):
    """Emit one pass/fail line per criterion, visible despite capture."""

    def emit(num: int, label: str, elapsed: float, ok: bool, detail: str) -> None:
        line = (
            f"[ACCEPTANCE] criterion {num} ({label}): "
            f"{'PASS' if ok else 'FAIL'} ({detail}) [{elapsed:.1f}s]"
        )
        with capsys.disabled():
            print(line, flush=True)
        assert ok, line

    return emit


def test_criterion_1_cluster_engine(report):
    start = time.time()
    res, strat, family = cluster_fixture()
    verdict = check_universality(res, strat, family, PrecisionParams(1e-6))
    probs_ok = True
    for y in family.witnesses():
        mix = run_all_branches(res, strat, y)
        probs_ok &= len(mix.branches) == 16
        probs_ok &= all(abs(b.probability - 2.0**-4) <= 1e-10 for b in mix.branches)
    elapsed = time.time() - start
    ok = verdict.kind == "Universal" and probs_ok and elapsed < 5.0
    report(1, "cluster engine", elapsed, ok,
            f"verdict={verdict.kind}, max d={verdict.distance:.2e}, uniform branches={probs_ok}")


def test_criterion_2_yes_case_bound_chain(yes_bundle, report):
    start = time.time()
    red = yes_bundle
    r = red.params.r
    target = red.family.target_ket("11")

    # (a) best product overlap against the accepting target
    overlap_sq = optimize_product_overlap(target).overlap_sq
    ok_a = overlap_sq <= 2.0**-3 + 1e-6

    # (b) exhaustive search over the default dictionary, corrections optimized
    search = strategy_search(
        red.resource, red.family, StrategyDictionary.default(), PrecisionParams.from_t(1)
    )
    max_f_star = search.per_y["11"].max_fidelity
    ok_b = max_f_star <= 2.0**-1 + 1e-6 and search.per_y["11"].distance_floor >= 0.5 - 1e-6
    ok_cert = search.certificate

    # measured distance with per-branch optimized corrections
    uncorrected = run_all_branches(red.resource, red.honest_strategy, "11", apply_corrections=False)
    corr = {
        m: optimize_corrections(b.post_state, target).corrections
        for m, b in ((b.m, b) for b in uncorrected.branches)
    }
    opt_strat = CallbackStrategy(
        lambda j, y, p: ID2,
        lambda y, m: corr.get(m, [ID2] * red.params.num_unitary_qubits),
    )
    d_star = distance_for_witness(red.resource, opt_strat, red.family, "11")
    ok_d = d_star >= 1.0 - np.sqrt(1.0 / 8.0) - 1e-6

    elapsed = time.time() - start
    ok = ok_a and ok_b and ok_cert and ok_d and elapsed < 180.0
    report(2, "accepting-side bound chain", elapsed, ok,
            f"overlap^2={overlap_sq:.6f}<=0.125, max F(y*)={max_f_star:.6f}<=0.5, "
            f"certificate={ok_cert}, measured d(y*)={d_star:.6f}>=0.6464")


def test_criterion_3_no_case_bounds(no_bundle, rot_eighth_bundle, report):
    start = time.time()
    ok_reject = True
    for y in no_bundle.family.witnesses():
        d = distance_for_witness(no_bundle.resource, no_bundle.honest_strategy, no_bundle.family, y)
        ok_reject &= abs(d) <= 1e-9
    ok_rot = True
    for y in rot_eighth_bundle.family.witnesses():
        f = fidelity_for_witness(
            rot_eighth_bundle.resource, rot_eighth_bundle.honest_strategy, rot_eighth_bundle.family, y
        )
        d = distance_for_witness(
            rot_eighth_bundle.resource, rot_eighth_bundle.honest_strategy, rot_eighth_bundle.family, y
        )
        ok_rot &= abs(f**2 - 49 / 64) <= 1e-9 and d <= 2.0**-1
    elapsed = time.time() - start
    ok = ok_reject and ok_rot and elapsed < 60.0
    report(3, "rejecting-side bounds", elapsed, ok,
            f"all-reject d=0: {ok_reject}, rotation F^2=49/64 and d<=1/2: {ok_rot}")


def test_criterion_4_parameter_discipline(tmp_path, report):
    start = time.time()
    vf = tmp_path / "verifier.json"
    vf.write_text(canonical_dumps(verifier_to_json(equality_verifier("11"))))
    code_bad = cli_main(["reduce", "--verifier", str(vf), "--r", "2", "--t", "1",
                         "--out", str(tmp_path / "bad.json")])
    code_good = cli_main(["reduce", "--verifier", str(vf), "--r", "3", "--t", "1",
                          "--out", str(tmp_path / "good.json")])
    elapsed = time.time() - start
    ok = code_bad == 4 and code_good == 0
    report(4, "parameter discipline", elapsed, ok, f"r=2 exit {code_bad}, r=3 exit {code_good}")


def test_criterion_5_amplification(report):
    start = time.time()
    amplified = amplify_verifier(rotation_verifier(2 * np.pi / 3), 3)
    simulated = acceptance_prob(amplified, "00")
    oracle = binomial_tail(0.75, 3)
    elapsed = time.time() - start
    ok = abs(simulated - 27 / 32) <= 1e-9 and abs(simulated - oracle) <= 1e-9
    report(5, "error amplification", elapsed, ok,
            f"simulated={simulated:.12f}, binomial oracle={oracle:.12f}")


def test_criterion_6_sandwich_suite(report):
    start = time.time()
    rng = np.random.default_rng(2024)
    ok = True
    for _ in range(200):
        n_total = int(rng.integers(2, 5))
        n_out = int(rng.integers(1, n_total))
        res = ResourceState(random_state(n_total, rng), n_out)
        strat = CallbackStrategy(
            lambda j, y, p: haar_unitary2(np.random.default_rng(j * 13 + len(p))),
            lambda y, m, k=n_out: [haar_unitary2(np.random.default_rng(7 * int(m, 2) + i)) for i in range(k)],
        )
        mat = haar_unitary2(rng)
        fam = UnitaryFamily(1, n_out, lambda y, m=mat: _as_circuit(m, n_out))
        rec = sandwich_check(res, strat, fam, "0")
        f = fidelity_for_witness(res, strat, fam, "0")
        ok &= rec.holds and abs((1.0 - rec.p) - f**2) <= 1e-9
    elapsed = time.time() - start
    ok = ok and elapsed < 120.0
    report(6, "trace-distance sandwich", elapsed, ok, "200 random instances on <= 4 qubits")


def _as_circuit(mat2: np.ndarray, n: int) -> Circuit:
    theta = 2 * np.arctan2(abs(mat2[1, 0]), abs(mat2[0, 0]))
    phase = np.angle(mat2[0, 0]) if abs(mat2[0, 0]) > 1e-12 else 0.0
    phi = np.angle(mat2[1, 0]) - phase if abs(mat2[1, 0]) > 1e-12 else 0.0
    lam = np.angle(-mat2[0, 1]) - phase if abs(mat2[0, 1]) > 1e-12 else 0.0
    return Circuit(n, (Gate("U3", (0,), params=(float(theta), float(phi), float(lam))),))


def test_criterion_7_quantified_decision(yes_bundle, no_bundle, report):
    start = time.time()
    thresholds = Thresholds.from_epsilon(2.0**-3)  # t=3 keeps the gap positive
    enc_yes = StrategyEncoding.for_instance(yes_bundle.resource, yes_bundle.family)
    enc_no = StrategyEncoding.for_instance(no_bundle.resource, no_bundle.family)
    rep_yes = decide(yes_bundle.resource, yes_bundle.family, enc_yes, thresholds)
    rep_no = decide(no_bundle.resource, no_bundle.family, enc_no, thresholds)
    elapsed = time.time() - start
    ok = (
        rep_yes.verdict is Decision.IN_LANGUAGE
        and rep_no.verdict is Decision.NOT_IN_LANGUAGE
        and elapsed < 120.0
    )
    report(7, "two-quantifier decision", elapsed, ok,
            f"yes={rep_yes.verdict.value}, no={rep_no.verdict.value}, "
            f"lambda={enc_yes.lambda_bits}, a=0.75, b=0.25")


def test_criterion_8_kernel_property_suites(report):
    start = time.time()
    rng = np.random.default_rng(808)

    fvdg_ok = True
    for _ in range(200):
        n = int(rng.integers(1, 4))
        terms = int(rng.integers(1, 9))
        rho = mixture_density((p, random_state(n, rng)) for p in rng.dirichlet(np.ones(terms)))
        phi = random_state(n, rng)
        f = fidelity_with_pure(rho, phi)
        td = trace_distance(rho, pure_density(phi))
        fvdg_ok &= (1.0 - f <= td + 1e-9) and (td <= np.sqrt(1.0 - f**2) + 1e-9)

    from conftest import random_circuit
    from mbqclab.gates import apply_circuit

    norm_ok = True
    for _ in range(100):
        n = int(rng.integers(1, 9))
        out = apply_circuit(random_state(n, rng), random_circuit(n, 25, rng))
        norm_ok &= abs(np.linalg.norm(out.amplitudes) - 1.0) <= 1e-10

    schmidt_ok = True
    for _ in range(50):
        target = random_state(2, rng)
        got = optimize_product_overlap(target).overlap_sq
        schmidt_ok &= abs(got - schmidt_values_sq(target, {0})[0]) <= 1e-6

    elapsed = time.time() - start
    ok = fvdg_ok and norm_ok and schmidt_ok
    report(8, "kernel property suites", elapsed, ok,
            f"fuchs-van-de-graaf x200: {fvdg_ok}, norms x100: {norm_ok}, schmidt oracle x50: {schmidt_ok}")
