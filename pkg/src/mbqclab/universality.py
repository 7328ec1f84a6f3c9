"""The nonuniversality promise problem over a family of target unitaries.

A resource state is universal for a family ``{U_y}`` at precision
``epsilon`` when a single strategy brings the output mixture within trace
distance ``epsilon`` of ``U_y |0..0>`` for every ``y``; it fails maximally
when every strategy is at distance at least ``1 - epsilon`` for some
witness ``y``.  The quantifier over all classical drivers is not
enumerable, so it is replaced here by (a) exhaustive search over finite
basis dictionaries and (b) continuous optimization of the final
corrections, which is what the fidelity bound needs.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .engine import ResourceState, Strategy, TableStrategy, basis_key, correction_key, run_all_branches
from .gates import Circuit, H2, ID2, PAULIS, YB2, apply_circuit, equatorial_basis, require_unitary2
from .optimize import optimize_corrections
from .states import InvariantViolation, Ket, pure_density, trace_distance
from .tolerances import ATOL_COMPARE


class SearchCapExceeded(RuntimeError):
    """An exhaustive sweep would exceed its configured size cap."""


def all_bitstrings(width: int) -> list[str]:
    return ["".join(bits) for bits in itertools.product("01", repeat=width)]


@dataclass(frozen=True)
class UnitaryFamily:
    """Indexed set of target unitaries on ``n`` qubits, one per witness string."""

    w: int
    n: int
    member: object  # callable: y -> Circuit or dense (2^n, 2^n) array

    def member_for(self, y: str):
        if len(y) != self.w or set(y) - {"0", "1"}:
            raise InvariantViolation(f"bad witness {y!r} for w={self.w}")
        return self.member(y)

    def target_ket(self, y: str) -> Ket:
        """``U_y`` applied to the all-zeros input."""
        mem = self.member_for(y)
        if isinstance(mem, Circuit):
            if mem.num_qubits != self.n:
                raise InvariantViolation("family member acts on the wrong register size")
            return apply_circuit(Ket.zero(self.n), mem)
        mat = np.asarray(mem, dtype=np.complex128)
        return Ket(self.n, mat[:, 0])

    def witnesses(self) -> list[str]:
        return all_bitstrings(self.w)


@dataclass(frozen=True)
class PrecisionParams:
    """Precision of the promise problem; ``epsilon = 2**-t`` when built from ``t``."""

    epsilon: float
    t: int | None = None

    def __post_init__(self):
        if not (0.0 < self.epsilon <= 0.5):
            raise InvariantViolation(f"epsilon {self.epsilon} outside (0, 1/2]")

    @classmethod
    def from_t(cls, t: int) -> PrecisionParams:
        if t < 1:
            raise InvariantViolation("t must be a positive integer")
        return cls(2.0 ** (-t), t)


@dataclass(frozen=True)
class PerWitness:
    y: str
    distance: float
    fidelity: float


@dataclass(frozen=True)
class Verdict:
    """Outcome of a universality check for one concrete strategy."""

    kind: str  # "Universal" | "NonUniversal" | "OutsidePromise"
    epsilon: float
    witness: str | None
    distance: float  # the witness distance (NonUniversal) or the max distance
    per_y: tuple[PerWitness, ...]

    def __post_init__(self):
        if self.kind == "NonUniversal" and self.distance < 1.0 - self.epsilon - ATOL_COMPARE:
            raise InvariantViolation("NonUniversal verdict without a qualifying distance")
        if self.kind == "Universal" and any(
            p.distance > self.epsilon + ATOL_COMPARE for p in self.per_y
        ):
            raise InvariantViolation("Universal verdict with an over-threshold distance")


def evaluate_witness(
    resource: ResourceState, strat: Strategy, family: UnitaryFamily, y: str
) -> PerWitness:
    """Trace distance and fidelity of the output mixture against ``U_y|0..0>``."""
    if family.n != resource.num_output:
        raise InvariantViolation("family output size differs from resource output size")
    mixture = run_all_branches(resource, strat, y)
    target = family.target_ket(y)
    fid_sq = sum(
        b.probability * abs(b.post_state.overlap(target)) ** 2 for b in mixture.branches
    )
    distance = trace_distance(mixture.density, pure_density(target))
    return PerWitness(y, distance, float(np.sqrt(min(max(fid_sq, 0.0), 1.0))))


def distance_for_witness(resource, strat, family, y: str) -> float:
    return evaluate_witness(resource, strat, family, y).distance


def fidelity_for_witness(resource, strat, family, y: str) -> float:
    return evaluate_witness(resource, strat, family, y).fidelity


def check_universality(
    resource: ResourceState,
    strat: Strategy,
    family: UnitaryFamily,
    prec: PrecisionParams,
    *,
    threads: int = 1,
) -> Verdict:
    """Evaluate every witness and classify the strategy's performance.

    The returned verdict is re-checked: the decisive witness distance is
    recomputed from scratch and must agree within 1e-9.
    """
    if family.w > 12:
        raise SearchCapExceeded(f"witness space 2**{family.w} exceeds the 2**12 cap")
    ys = family.witnesses()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_y = list(pool.map(lambda y: evaluate_witness(resource, strat, family, y), ys))
    else:
        per_y = [evaluate_witness(resource, strat, family, y) for y in ys]

    eps = prec.epsilon
    worst = max(per_y, key=lambda p: (p.distance, [-ord(c) for c in p.y]))
    if worst.distance <= eps:
        recheck_y = ys[len(ys) // 2]
        recheck = evaluate_witness(resource, strat, family, recheck_y).distance
        if abs(recheck - next(p.distance for p in per_y if p.y == recheck_y)) > ATOL_COMPARE:
            raise InvariantViolation("verdict recheck disagreed with the first evaluation")
        return Verdict("Universal", eps, None, worst.distance, tuple(per_y))
    # deterministic witness pick: smallest y among those at threshold
    qualifying = [p for p in per_y if p.distance >= 1.0 - eps]
    if qualifying:
        pick = min(qualifying, key=lambda p: p.y)
        recheck = evaluate_witness(resource, strat, family, pick.y).distance
        if abs(recheck - pick.distance) > ATOL_COMPARE:
            raise InvariantViolation("verdict recheck disagreed with the first evaluation")
        return Verdict("NonUniversal", eps, pick.y, pick.distance, tuple(per_y))
    return Verdict("OutsidePromise", eps, worst.y, worst.distance, tuple(per_y))


# ---------------------------------------------------------------------------
# Exhaustive search over adaptive basis tables from a finite dictionary.
# ---------------------------------------------------------------------------

DEFAULT_EQUATORIAL_GRID = tuple(k * np.pi / 4 for k in range(8))


@dataclass(frozen=True)
class StrategyDictionary:
    """Finite basis menu plus the policy for the final corrections."""

    bases: tuple = ()
    corrections_mode: str = "optimized"  # or "dictionary" (single-qubit Paulis)

    def __post_init__(self):
        if not self.bases:
            raise InvariantViolation("strategy dictionary must contain at least one basis")
        if len(self.bases) > 16:
            raise SearchCapExceeded("at most 16 dictionary bases are supported")
        for b in self.bases:
            require_unitary2(b)
        if self.corrections_mode not in ("dictionary", "optimized"):
            raise InvariantViolation(f"unknown corrections mode {self.corrections_mode!r}")

    @classmethod
    def default(cls, corrections_mode: str = "optimized") -> StrategyDictionary:
        bases = [ID2, H2, YB2] + [equatorial_basis(a) for a in DEFAULT_EQUATORIAL_GRID]
        return cls(tuple(bases), corrections_mode)


@dataclass(frozen=True)
class WitnessSearchStats:
    y: str
    max_fidelity: float
    min_fidelity: float

    @property
    def distance_floor(self) -> float:
        """Lower bound on the distance any searched table attains at this witness."""
        return 1.0 - self.max_fidelity


@dataclass
class SearchResult:
    best_strategy: TableStrategy
    best_min_fidelity: float
    best_table_index: int
    per_y: dict
    num_tables: int
    epsilon: float

    @property
    def certificate(self) -> bool:
        """True when even the best table fails some witness at the precision.

        Valid because the trace distance is at least ``1 - fidelity``: if
        every table has ``min_y F <= epsilon``, then every table has some
        witness at distance ``>= 1 - epsilon``.
        """
        return self.best_min_fidelity <= self.epsilon + ATOL_COMPARE


def _branches_for_bases(resource, y: str, basis_seq_for, max_branches: int):
    """Enumerate uncorrected branches where step j uses basis_seq_for(prefix)."""

    class _Tmp(Strategy):
        def basis_for(self, step, yy, prefix):
            return basis_seq_for(step, prefix)

        def corrections_for(self, yy, m):  # pragma: no cover - not used
            raise NotImplementedError

    return run_all_branches(
        resource, _Tmp(), y, max_branches=max_branches, apply_corrections=False
    )


def _best_pauli_corrections(branch: Ket, target: Ket) -> tuple[float, tuple[int, ...]]:
    """Exact max of |<branch| P_1 x .. x P_n |target>| over Pauli products."""
    n = branch.num_qubits
    if n > 8:
        raise SearchCapExceeded("dictionary corrections enumerate 4**n; capped at n=8")
    mats = [PAULIS[p] for p in "IXYZ"]
    best, best_combo = -1.0, (0,) * n
    for combo in itertools.product(range(4), repeat=n):
        out = target.tensor_view()
        for j, c in enumerate(combo):
            if c:
                out = np.moveaxis(np.tensordot(mats[c], out, axes=([1], [j])), 0, j)
        val = abs(np.vdot(branch.amplitudes, out.reshape(-1)))
        if val > best:
            best, best_combo = val, combo
    return best, best_combo


def strategy_search(
    resource: ResourceState,
    family: UnitaryFamily,
    dictionary: StrategyDictionary,
    prec: PrecisionParams,
    *,
    max_tables: int = 1 << 20,
    restarts: int = 8,
    seed: int = 0,
) -> SearchResult:
    """Enumerate every adaptive basis table over the dictionary.

    For each table and witness, the final corrections are chosen to
    maximize the per-branch overlap (continuously, or over Pauli products
    in ``dictionary`` mode), so the reported fidelities upper-bound what
    any strategy built from these bases can reach.  The best table is the
    one maximizing the minimum fidelity over witnesses; ties break toward
    the smallest table index.
    """
    steps = resource.num_measured
    if steps > 3:
        raise SearchCapExceeded("adaptive table search capped at 3 measured qubits")
    if family.w > 2:
        raise SearchCapExceeded("adaptive table search capped at w = 2")
    nbases = len(dictionary.bases)
    ys = family.witnesses()
    slots_per_y = [(j, prefix) for j in range(1, steps + 1) for prefix in all_bitstrings(j - 1)]
    num_slots = len(ys) * len(slots_per_y)
    if nbases**num_slots > max_tables:
        raise SearchCapExceeded(
            f"{nbases}**{num_slots} tables exceed the cap of {max_tables}"
        )

    targets = {y: family.target_ket(y) for y in ys}

    # fidelity of a per-witness table projection, memoized on the basis indices
    fid_cache: dict = {}
    corr_cache: dict = {}

    def fidelity_for_projection(y: str, proj: tuple) -> float:
        key = (y, proj)
        if key in fid_cache:
            return fid_cache[key]
        assign = dict(zip(slots_per_y, proj))

        def basis_seq_for(step, prefix):
            return dictionary.bases[assign[(step, prefix)]]

        mixture = _branches_for_bases(resource, y, basis_seq_for, max_tables)
        fid_sq = 0.0
        for b in mixture.branches:
            # the branch state only depends on the bases along its own path
            path = tuple(assign[(j, b.m[: j - 1])] for j in range(1, steps + 1))
            ckey = (y, path, b.m)
            if ckey not in corr_cache:
                if dictionary.corrections_mode == "optimized":
                    corr_cache[ckey] = optimize_corrections(
                        b.post_state, targets[y], restarts=restarts, seed=seed
                    ).overlap
                else:
                    corr_cache[ckey] = _best_pauli_corrections(b.post_state, targets[y])[0]
            fid_sq += b.probability * corr_cache[ckey] ** 2
        fid = float(np.sqrt(min(max(fid_sq, 0.0), 1.0)))
        fid_cache[key] = fid
        return fid

    best_idx = -1
    best_min = -1.0
    best_proj: dict = {}
    max_by_y = {y: 0.0 for y in ys}
    min_by_y = {y: 1.0 for y in ys}
    count = 0
    for count, full in enumerate(itertools.product(range(nbases), repeat=num_slots)):
        fids = {}
        for yi, y in enumerate(ys):
            proj = full[yi * len(slots_per_y) : (yi + 1) * len(slots_per_y)]
            fids[y] = fidelity_for_projection(y, proj)
        for y in ys:
            max_by_y[y] = max(max_by_y[y], fids[y])
            min_by_y[y] = min(min_by_y[y], fids[y])
        table_min = min(fids.values())
        if table_min > best_min + 1e-15:
            best_min = table_min
            best_idx = count
            best_proj = {
                y: full[yi * len(slots_per_y) : (yi + 1) * len(slots_per_y)]
                for yi, y in enumerate(ys)
            }

    best_strategy = _materialize_table(
        resource, family, dictionary, best_proj, slots_per_y, targets, restarts, seed
    )
    per_y = {
        y: WitnessSearchStats(y, max_by_y[y], min_by_y[y]) for y in ys
    }
    return SearchResult(
        best_strategy=best_strategy,
        best_min_fidelity=best_min,
        best_table_index=best_idx,
        per_y=per_y,
        num_tables=count + 1,
        epsilon=prec.epsilon,
    )


def _materialize_table(
    resource, family, dictionary, proj_by_y, slots_per_y, targets, restarts, seed
) -> TableStrategy:
    """Spell out the winning table as a serializable strategy."""
    bases = {}
    corrections = {}
    n_out = resource.num_output
    for y, proj in proj_by_y.items():
        assign = dict(zip(slots_per_y, proj))
        for (j, prefix), idx in assign.items():
            bases[basis_key(j, y, prefix)] = np.asarray(dictionary.bases[idx])

        def basis_seq_for(step, prefix):
            return dictionary.bases[assign[(step, prefix)]]

        mixture = _branches_for_bases(resource, y, basis_seq_for, 1 << 20)
        seen = set()
        for b in mixture.branches:
            seen.add(b.m)
            if dictionary.corrections_mode == "optimized":
                corrections[correction_key(y, b.m)] = optimize_corrections(
                    b.post_state, targets[y], restarts=restarts, seed=seed
                ).corrections
            else:
                combo = _best_pauli_corrections(b.post_state, targets[y])[1]
                corrections[correction_key(y, b.m)] = [PAULIS["IXYZ"[c]] for c in combo]
        for m in all_bitstrings(resource.num_measured):
            if m not in seen:  # unreachable outcome; keep the table total
                corrections[correction_key(y, m)] = [ID2] * n_out
    return TableStrategy(bases, corrections)
