"""Package-wide numeric tolerances.

Everything here targets dense double-precision arithmetic at dimensions
of at most 2**12, which leaves several orders of magnitude of headroom;
the values are therefore fixed rather than configurable per call.
"""

ATOL_STATE = 1e-10   # normalization, unitarity, hermiticity, trace checks
ATOL_COMPARE = 1e-9  # comparisons between independently computed quantities
PRUNE_PROB = 1e-12   # measurement branches below this probability are dropped
OPT_GAIN_TOL = 1e-10  # alternating optimizers stop once a sweep gains less
