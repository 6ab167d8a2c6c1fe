"""Pure NumPy/SciPy versions of the compiled kernels in ``_kernels.pyx``."""

import numpy as np
from scipy.signal import lfilter

TINY = 1e-280


def power_table(a, b, rows, cols, start=None):
    """Taylor coefficients of successive powers of a disk automorphism.

    Column ``k`` of the result holds coefficients 0..rows-1 of ``g(z)^(k0 + k)``
    where ``g(z) = (a z + b) / (conj(b) z + conj(a))``.  ``start`` is the column for
    ``g^k0`` (defaults to the constant 1, i.e. ``k0 = 0``).  Returns the table and
    the column for ``g^(k0 + cols)`` so long tables can be produced in blocks.

    Multiplying by ``g`` is the causal recurrence
    ``conj(a) h_j + conj(b) h_{j-1} = a p_{j-1} + b p_j``, so a row-truncated
    table is exact: no padding in ``j`` is needed.
    """
    a = complex(a)
    b = complex(b)
    p = np.zeros(rows, dtype=complex)
    if start is None:
        p[0] = 1.0
    else:
        p[:] = start[:rows]
    out = np.empty((rows, cols), dtype=complex)
    num = [b, a]
    den = [a.conjugate(), b.conjugate()]
    for k in range(cols):
        out[:, k] = p
        p = lfilter(num, den, p)
        p[np.abs(p) < TINY] = 0.0
    return out, p


def horner(coeffs, points):
    """``sum_i coeffs[i] * points**i`` at every point."""
    z = np.asarray(points, dtype=complex)
    acc = np.zeros_like(z)
    for c in np.asarray(coeffs, dtype=complex)[::-1]:
        acc *= z
        acc += c
    return acc
