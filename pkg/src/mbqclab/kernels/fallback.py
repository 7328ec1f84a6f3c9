"""Pure-NumPy gate kernels, the fallback when the compiled core is absent.

Index convention: qubit 0 is the most significant bit of the basis index,
so qubit ``q`` of an ``n``-qubit register owns bit ``1 << (n - 1 - q)``.
``cmask`` is the OR of the bit masks of all control qubits; an amplitude
participates only if every control bit is set.  Both kernels update the
state in place.
"""

import numpy as np


def apply_1q(state: np.ndarray, gate: np.ndarray, n: int, target: int, cmask: int) -> None:
    tbit = 1 << (n - 1 - target)
    idx = np.arange(state.shape[0])
    sel = (idx & tbit) == 0
    if cmask:
        sel &= (idx & cmask) == cmask
    i0 = idx[sel]
    i1 = i0 | tbit
    a0 = state[i0]
    a1 = state[i1]
    state[i0] = gate[0, 0] * a0 + gate[0, 1] * a1
    state[i1] = gate[1, 0] * a0 + gate[1, 1] * a1


def apply_2q(state: np.ndarray, gate: np.ndarray, n: int, t0: int, t1: int, cmask: int) -> None:
    b0 = 1 << (n - 1 - t0)
    b1 = 1 << (n - 1 - t1)
    idx = np.arange(state.shape[0])
    sel = ((idx & b0) == 0) & ((idx & b1) == 0)
    if cmask:
        sel &= (idx & cmask) == cmask
    i00 = idx[sel]
    i01 = i00 | b1
    i10 = i00 | b0
    i11 = i00 | b0 | b1
    a = (state[i00], state[i01], state[i10], state[i11])
    for row, ii in enumerate((i00, i01, i10, i11)):
        state[ii] = gate[row, 0] * a[0] + gate[row, 1] * a[1] + gate[row, 2] * a[2] + gate[row, 3] * a[3]
