"""JSON interchange for circuits, resources, strategies and bundles.

Complex numbers are ``[re, im]`` pairs, matrices are row-major nested
lists of pairs.  Reports are emitted through :func:`canonical_dumps`,
which sorts keys and prints floats with 17 significant digits so that
identical inputs produce byte-identical files.
"""

from __future__ import annotations

import hashlib
import json

import numpy as np

from .engine import ResourceState, TableStrategy, build_graph_state
from .gates import Circuit, Gate
from .reduction import ReductionOutput, ReductionParams, VerifierCircuit, build_reduction
from .states import Ket


class SchemaError(ValueError):
    """An input file does not match its documented schema."""


# ---------------------------------------------------------------------------
# canonical JSON
# ---------------------------------------------------------------------------


def _fmt_float(x: float) -> str:
    if x != x or x in (float("inf"), float("-inf")):
        raise SchemaError("non-finite float in report")
    return f"{x:.17g}"


def canonical_dumps(obj) -> str:
    out: list[str] = []

    def emit(o) -> None:
        if o is None or o is True or o is False:
            out.append("null" if o is None else ("true" if o else "false"))
        elif isinstance(o, (int, np.integer)) and not isinstance(o, bool):
            out.append(str(int(o)))
        elif isinstance(o, (float, np.floating)):
            out.append(_fmt_float(float(o)))
        elif isinstance(o, str):
            out.append(json.dumps(o))
        elif isinstance(o, dict):
            out.append("{")
            keys = sorted(o.keys())
            for i, k in enumerate(keys):
                if not isinstance(k, str):
                    raise SchemaError("report keys must be strings")
                out.append(json.dumps(k))
                out.append(":")
                emit(o[k])
                if i != len(keys) - 1:
                    out.append(",")
            out.append("}")
        elif isinstance(o, (list, tuple)):
            out.append("[")
            for i, v in enumerate(o):
                emit(v)
                if i != len(o) - 1:
                    out.append(",")
            out.append("]")
        else:
            raise SchemaError(f"unserializable value of type {type(o).__name__}")

    emit(obj)
    return "".join(out)


def complex_pair(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def matrix_to_json(m: np.ndarray) -> list:
    return [[complex_pair(z) for z in row] for row in np.asarray(m)]


def matrix_from_json(rows, what: str = "matrix") -> np.ndarray:
    try:
        return np.array([[complex(p[0], p[1]) for p in row] for row in rows], dtype=np.complex128)
    except (TypeError, IndexError) as exc:
        raise SchemaError(f"malformed {what}: expected nested [re, im] pairs") from exc


def amplitudes_to_json(k: Ket) -> list:
    return [complex_pair(z) for z in k.amplitudes]


def state_fingerprint(k: Ket) -> str:
    """Deterministic digest of the amplitudes, rounded to 12 decimals."""
    rounded = np.round(k.amplitudes, 12) + 0.0  # normalize -0.0
    return hashlib.sha256(rounded.tobytes()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# circuits and verifiers
# ---------------------------------------------------------------------------


def gate_to_json(g: Gate) -> dict:
    return {
        "kind": g.kind,
        "targets": list(g.targets),
        "controls": list(g.controls),
        "params": [float(p) for p in g.params],
    }


def gate_from_json(d) -> Gate:
    try:
        return Gate(
            d["kind"],
            tuple(d["targets"]),
            tuple(d.get("controls", ())),
            tuple(d.get("params", ())),
        )
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed gate entry {d!r}") from exc


def circuit_to_json(c: Circuit) -> dict:
    return {"num_qubits": c.num_qubits, "gates": [gate_to_json(g) for g in c.gates]}


def circuit_from_json(d) -> Circuit:
    try:
        return Circuit(int(d["num_qubits"]), tuple(gate_from_json(g) for g in d["gates"]))
    except (KeyError, TypeError) as exc:
        raise SchemaError("malformed circuit: need num_qubits and gates") from exc


def verifier_to_json(v: VerifierCircuit) -> dict:
    return {"w": v.w, "n": v.n, "gates": [gate_to_json(g) for g in v.circuit.gates]}


def verifier_from_json(d) -> VerifierCircuit:
    try:
        w, n = int(d["w"]), int(d["n"])
        circ = Circuit(w + n, tuple(gate_from_json(g) for g in d["gates"]))
    except (KeyError, TypeError) as exc:
        raise SchemaError("malformed verifier: need w, n and gates") from exc
    return VerifierCircuit(circ, w, n)


# ---------------------------------------------------------------------------
# resources and strategies
# ---------------------------------------------------------------------------


def resource_to_json(res: ResourceState) -> dict:
    return {
        "kind": "amplitudes",
        "num_qubits": res.num_qubits,
        "num_output": res.num_output,
        "amplitudes": amplitudes_to_json(res.state),
    }


def resource_from_json(d) -> ResourceState:
    try:
        kind = d["kind"]
        num_output = int(d["num_output"])
        if kind == "zeros":
            state = Ket.zero(int(d["num_qubits"]))
        elif kind == "graph":
            edges = [tuple(e) for e in d["edges"]]
            state = build_graph_state(int(d["num_vertices"]), edges)
        elif kind == "amplitudes":
            amps = [complex(p[0], p[1]) for p in d["amplitudes"]]
            state = Ket(int(d["num_qubits"]), np.array(amps))
        else:
            raise SchemaError(f"unknown resource kind {kind!r}")
    except (KeyError, TypeError, IndexError) as exc:
        raise SchemaError("malformed resource file") from exc
    return ResourceState(state, num_output)


def strategy_to_json(s: TableStrategy) -> dict:
    return {
        "bases": {k: matrix_to_json(m) for k, m in sorted(s.bases.items())},
        "corrections": {
            k: [matrix_to_json(m) for m in ms] for k, ms in sorted(s.corrections.items())
        },
    }


def strategy_from_json(d) -> TableStrategy:
    try:
        bases = {k: matrix_from_json(v, f"basis {k}") for k, v in d["bases"].items()}
        corrections = {
            k: [matrix_from_json(m, f"correction {k}") for m in v]
            for k, v in d["corrections"].items()
        }
    except (KeyError, TypeError, AttributeError) as exc:
        raise SchemaError("malformed strategy table: need bases and corrections maps") from exc
    return TableStrategy(bases, corrections)


# ---------------------------------------------------------------------------
# family files and reduction bundles
# ---------------------------------------------------------------------------


def family_members_to_json(w: int, n: int, members: dict) -> dict:
    return {"w": w, "n": n, "members": {y: circuit_to_json(c) for y, c in sorted(members.items())}}


def family_members_from_json(d):
    from .universality import UnitaryFamily

    try:
        w, n = int(d["w"]), int(d["n"])
        members = {y: circuit_from_json(c) for y, c in d["members"].items()}
    except (KeyError, TypeError, AttributeError) as exc:
        raise SchemaError("malformed family file: need w, n, members") from exc
    if sorted(members) != sorted(format(i, f"0{w}b") if w else "" for i in range(1 << w)):
        raise SchemaError("family file must list every witness exactly once")
    return UnitaryFamily(w, n, lambda y: members[y])


FAMILY_TAG = "x-imprint-then-unitary"


def bundle_to_json(red: ReductionOutput) -> dict:
    from .engine import tabulate_strategy

    p = red.params
    honest = tabulate_strategy(red.honest_strategy, p.w, 1, p.num_unitary_qubits)
    return {
        "params": {"n": p.n, "w": p.w, "r": p.r, "t": p.t},
        "unitary": circuit_to_json(red.unitary),
        "family": {"construction": FAMILY_TAG},
        "resource_qubits": p.num_resource_qubits,
        "honest_strategy": strategy_to_json(honest),
    }


def bundle_from_json(d) -> ReductionOutput:
    from .reduction import build_family, build_resource

    try:
        pd = d["params"]
        params = ReductionParams(int(pd["n"]), int(pd["w"]), int(pd["r"]),
                                 None if pd.get("t") is None else int(pd["t"]))
        unitary = circuit_from_json(d["unitary"])
        if d["family"].get("construction") != FAMILY_TAG:
            raise SchemaError(f"unknown family construction {d['family']!r}")
        honest = strategy_from_json(d["honest_strategy"])
        declared = int(d["resource_qubits"])
    except (KeyError, TypeError, AttributeError) as exc:
        raise SchemaError("malformed bundle file") from exc
    if unitary.num_qubits != params.num_unitary_qubits:
        raise SchemaError("bundle unitary size disagrees with its params")
    if declared != params.num_resource_qubits:
        raise SchemaError("bundle resource size disagrees with its params")
    return ReductionOutput(
        params=params,
        unitary=unitary,
        family=build_family(unitary, params.w),
        resource=build_resource(params),
        honest_strategy=honest,
    )


def load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path} is not valid JSON: {exc}") from exc


def reduction_from_verifier(verifier: VerifierCircuit, r: int, t: int | None) -> ReductionOutput:
    params = ReductionParams(verifier.n, verifier.w, r, t)
    return build_reduction(verifier, params)
