"""Two-quantifier decision procedure over encoded strategies.

The verifier behind it converts an MBQC run into a bit: rotate the output
mixture back by the target, measure every qubit computationally, and
reject exactly on the all-zeros string.  Its acceptance probability
``p = 1 - <0|U_y^dag rho U_y|0>`` sandwiches the trace distance,
``1 - sqrt(1-p) <= d <= sqrt(p)``, which turns universality statements
into threshold statements about ``p``.

Strategies are encoded as bit strings of a fixed width so the for-all /
exists quantifiers range over a finite, enumerable set.  Decoding is
total: every bit string yields a valid strategy (indices wrap modulo the
dictionary sizes).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .engine import ResourceState, Strategy, TableStrategy, basis_key, correction_key, run_all_branches
from .gates import H2, ID2, X2, Z2, require_unitary2
from .states import InvariantViolation
from .universality import SearchCapExceeded, UnitaryFamily, all_bitstrings, evaluate_witness
from .tolerances import ATOL_COMPARE


@dataclass(frozen=True)
class Thresholds:
    """Acceptance/rejection thresholds ``0 <= b < a <= 1``."""

    a: float
    b: float

    def __post_init__(self):
        if not (0.0 <= self.b < self.a <= 1.0):
            raise InvariantViolation(f"thresholds need 0 <= b < a <= 1, got a={self.a} b={self.b}")

    @classmethod
    def from_epsilon(cls, epsilon: float) -> Thresholds:
        """The natural pair ``(1 - 2 eps, 2 eps)``; requires ``eps < 1/4``."""
        return cls(1.0 - 2.0 * epsilon, 2.0 * epsilon)


def accept_prob(resource: ResourceState, strat: Strategy, family: UnitaryFamily, y: str) -> float:
    """``1 - <0..0| U_y^dag rho U_y |0..0>`` for the run's output mixture.

    Equals ``1 - F^2`` with F the output fidelity against ``U_y|0..0>``,
    so no density matrix is ever assembled.
    """
    mixture = run_all_branches(resource, strat, y)
    target = family.target_ket(y)
    fid_sq = sum(b.probability * abs(b.post_state.overlap(target)) ** 2 for b in mixture.branches)
    return float(min(max(1.0 - fid_sq, 0.0), 1.0))


@dataclass(frozen=True)
class SandwichRecord:
    y: str
    p: float
    distance: float
    lower: float
    upper: float
    holds: bool


def sandwich_check(resource, strat, family, y: str, *, atol: float = ATOL_COMPARE) -> SandwichRecord:
    """Verify ``1 - sqrt(1-p) <= d <= sqrt(p)`` on one instance."""
    p = accept_prob(resource, strat, family, y)
    d = evaluate_witness(resource, strat, family, y).distance
    lower = 1.0 - float(np.sqrt(max(1.0 - p, 0.0)))
    upper = float(np.sqrt(p))
    return SandwichRecord(y, p, d, lower, upper, lower - atol <= d <= upper + atol)


# ---------------------------------------------------------------------------
# Strategy encoding.
#
# Raw per-qubit Pauli indices per (witness, outcome) slot would cost about
# 2 * n * 2^w * 2^steps bits, far beyond an enumerable width at reduction
# scale, so corrections are drawn from a small dictionary of named rules
# instead; the rule list includes the witness-imprinting corrections, so
# the universal-side strategy of the reduction is encodable.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CorrectionRule:
    """Named map from (y, m) to a full correction list."""

    name: str
    build: object  # callable (y, m, num_outputs, w) -> list of 2x2 arrays


def _rule_identity(y, m, n_out, w):
    return [ID2] * n_out


def _rule_witness_imprint(y, m, n_out, w):
    return [X2 if (j < w and y[j] == "1") else ID2 for j in range(n_out)]


def _rule_flip_all(y, m, n_out, w):
    return [X2] * n_out


def _rule_phase_outcome(y, m, n_out, w):
    v = Z2 if m.count("1") % 2 else ID2
    return [v] * n_out


DEFAULT_RULES = (
    CorrectionRule("identity", _rule_identity),
    CorrectionRule("witness-imprint", _rule_witness_imprint),
)

EXTENDED_RULES = DEFAULT_RULES + (
    CorrectionRule("flip-all", _rule_flip_all),
    CorrectionRule("phase-on-odd-outcome", _rule_phase_outcome),
)


def _index_width(count: int) -> int:
    return max(1, (count - 1).bit_length())


@dataclass(frozen=True)
class StrategyEncoding:
    """Fixed-width bit layout: basis slots per (y, step, prefix), then rule
    slots per (y, m), in lexicographic order."""

    w: int
    num_steps: int
    num_outputs: int
    bases: tuple = (ID2, H2)
    rules: tuple = DEFAULT_RULES

    def __post_init__(self):
        for b in self.bases:
            require_unitary2(b)
        if not self.bases or not self.rules:
            raise InvariantViolation("encoding needs at least one basis and one rule")

    @classmethod
    def for_instance(cls, resource: ResourceState, family: UnitaryFamily, **kw) -> StrategyEncoding:
        return cls(family.w, resource.num_measured, resource.num_output, **kw)

    @property
    def basis_slots(self) -> list[tuple[str, int, str]]:
        return [
            (y, j, prefix)
            for y in all_bitstrings(self.w)
            for j in range(1, self.num_steps + 1)
            for prefix in all_bitstrings(j - 1)
        ]

    @property
    def rule_slots(self) -> list[tuple[str, str]]:
        return [
            (y, m) for y in all_bitstrings(self.w) for m in all_bitstrings(self.num_steps)
        ]

    @property
    def lambda_bits(self) -> int:
        return len(self.basis_slots) * _index_width(len(self.bases)) + len(
            self.rule_slots
        ) * _index_width(len(self.rules))

    def slot_indices(self, bits: str) -> tuple[dict, dict]:
        """Decode the bit string into per-slot dictionary indices."""
        if len(bits) != self.lambda_bits or set(bits) - {"0", "1"}:
            raise InvariantViolation(f"encoded strategy must be {self.lambda_bits} bits")
        bw = _index_width(len(self.bases))
        rw = _index_width(len(self.rules))
        pos = 0
        basis_idx = {}
        for slot in self.basis_slots:
            basis_idx[slot] = int(bits[pos : pos + bw], 2) % len(self.bases)
            pos += bw
        rule_idx = {}
        for slot in self.rule_slots:
            rule_idx[slot] = int(bits[pos : pos + rw], 2) % len(self.rules)
            pos += rw
        return basis_idx, rule_idx

    def decode(self, bits: str) -> TableStrategy:
        basis_idx, rule_idx = self.slot_indices(bits)
        bases = {
            basis_key(j, y, prefix): np.asarray(self.bases[i])
            for (y, j, prefix), i in basis_idx.items()
        }
        corrections = {
            correction_key(y, m): self.rules[i].build(y, m, self.num_outputs, self.w)
            for (y, m), i in rule_idx.items()
        }
        return TableStrategy(bases, corrections)

    def encode_indices(self, basis_index: int, rule_index: int) -> str:
        """Bit string selecting one basis and one rule uniformly."""
        bw = _index_width(len(self.bases))
        rw = _index_width(len(self.rules))
        return format(basis_index, f"0{bw}b") * len(self.basis_slots) + format(
            rule_index, f"0{rw}b"
        ) * len(self.rule_slots)


class Decision(Enum):
    IN_LANGUAGE = "InL"
    NOT_IN_LANGUAGE = "NotInL"
    UNDETERMINED = "Undetermined"


@dataclass
class LambdaRow:
    bits: str
    max_p: float
    min_p: float
    argmax_y: str
    argmin_y: str


@dataclass
class DecisionReport:
    verdict: Decision
    thresholds: Thresholds
    lambda_bits: int
    w: int
    rows: list[LambdaRow] = field(default_factory=list)


def decide(
    resource: ResourceState,
    family: UnitaryFamily,
    encoding: StrategyEncoding,
    thresholds: Thresholds,
    *,
    max_lambda: int = 16,
    max_w: int = 8,
) -> DecisionReport:
    """Brute-force the two quantifiers over all encoded strategies.

    IN_LANGUAGE when every encoded strategy has a witness with acceptance
    probability at least ``a``; NOT_IN_LANGUAGE when some encoded strategy
    keeps every witness at or below ``b``; UNDETERMINED otherwise.  The
    acceptance probability for a witness depends only on that witness's
    slots, so evaluations are memoized on the per-witness projection.
    """
    lam = encoding.lambda_bits
    if lam > max_lambda:
        raise SearchCapExceeded(f"lambda = {lam} exceeds the cap of {max_lambda}")
    if family.w > max_w:
        raise SearchCapExceeded(f"w = {family.w} exceeds the cap of {max_w}")
    ys = family.witnesses()
    targets = {y: family.target_ket(y) for y in ys}

    slots_per_y = [(j, prefix) for j in range(1, encoding.num_steps + 1) for prefix in all_bitstrings(j - 1)]
    cache: dict = {}

    def p_for(y: str, basis_idx: dict, rule_idx: dict) -> float:
        proj = (
            tuple(basis_idx[(y, j, prefix)] for (j, prefix) in slots_per_y),
            tuple(rule_idx[(y, m)] for m in all_bitstrings(encoding.num_steps)),
        )
        key = (y, proj)
        if key in cache:
            return cache[key]

        class _OneY(Strategy):
            def basis_for(self, step, yy, prefix):
                return encoding.bases[basis_idx[(y, step, prefix)]]

            def corrections_for(self, yy, m):
                rule = encoding.rules[rule_idx[(y, m)]]
                return rule.build(y, m, encoding.num_outputs, encoding.w)

        mixture = run_all_branches(resource, _OneY(), y)
        fid_sq = sum(
            b.probability * abs(b.post_state.overlap(targets[y])) ** 2 for b in mixture.branches
        )
        val = float(min(max(1.0 - fid_sq, 0.0), 1.0))
        cache[key] = val
        return val

    rows: list[LambdaRow] = []
    every_lambda_has_accepting_y = True
    some_lambda_rejects_all_y = False
    for bits_tuple in itertools.product("01", repeat=lam):
        bits = "".join(bits_tuple)
        basis_idx, rule_idx = encoding.slot_indices(bits)
        ps = {y: p_for(y, basis_idx, rule_idx) for y in ys}
        max_y = max(ys, key=lambda y: (ps[y], [-ord(c) for c in y]))
        min_y = min(ys, key=lambda y: (ps[y], y))
        rows.append(LambdaRow(bits, ps[max_y], ps[min_y], max_y, min_y))
        if ps[max_y] < thresholds.a:
            every_lambda_has_accepting_y = False
        if ps[max_y] <= thresholds.b:
            some_lambda_rejects_all_y = True

    if every_lambda_has_accepting_y:
        verdict = Decision.IN_LANGUAGE
    elif some_lambda_rejects_all_y:
        verdict = Decision.NOT_IN_LANGUAGE
    else:
        verdict = Decision.UNDETERMINED
    return DecisionReport(verdict, thresholds, lam, family.w, rows)
