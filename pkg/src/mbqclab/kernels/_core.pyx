# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled gate kernels; semantics identical to ``fallback.py``."""


def apply_1q(double complex[::1] state, double complex[:, :] gate, int n, int target, unsigned long long cmask):
    cdef unsigned long long dim = 1ULL << n
    cdef unsigned long long tbit = 1ULL << (n - 1 - target)
    cdef unsigned long long i
    cdef double complex g00 = gate[0, 0], g01 = gate[0, 1], g10 = gate[1, 0], g11 = gate[1, 1]
    cdef double complex a0, a1
    for i in range(dim):
        if i & tbit:
            continue
        if (i & cmask) != cmask:
            continue
        a0 = state[i]
        a1 = state[i | tbit]
        state[i] = g00 * a0 + g01 * a1
        state[i | tbit] = g10 * a0 + g11 * a1


def apply_2q(double complex[::1] state, double complex[:, :] gate, int n, int t0, int t1, unsigned long long cmask):
    cdef unsigned long long dim = 1ULL << n
    cdef unsigned long long b0 = 1ULL << (n - 1 - t0)
    cdef unsigned long long b1 = 1ULL << (n - 1 - t1)
    cdef unsigned long long i, i01, i10, i11
    cdef double complex a00, a01, a10, a11
    for i in range(dim):
        if i & (b0 | b1):
            continue
        if (i & cmask) != cmask:
            continue
        i01 = i | b1
        i10 = i | b0
        i11 = i | b0 | b1
        a00 = state[i]
        a01 = state[i01]
        a10 = state[i10]
        a11 = state[i11]
        state[i] = gate[0, 0] * a00 + gate[0, 1] * a01 + gate[0, 2] * a10 + gate[0, 3] * a11
        state[i01] = gate[1, 0] * a00 + gate[1, 1] * a01 + gate[1, 2] * a10 + gate[1, 3] * a11
        state[i10] = gate[2, 0] * a00 + gate[2, 1] * a01 + gate[2, 2] * a10 + gate[2, 3] * a11
        state[i11] = gate[3, 0] * a00 + gate[3, 1] * a01 + gate[3, 2] * a10 + gate[3, 3] * a11
