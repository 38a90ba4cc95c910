"""Exception types shared across the package.

The CLI maps these onto process exit codes: usage errors exit 1,
DataError exits 2, NumericError exits 3.
"""


class DataError(Exception):
    """Bad or inconsistent input data (files, labels, shapes, manifests)."""


class NumericError(Exception):
    """Optimization produced a non-finite value (divergence, bad step size)."""
