"""Pure-numpy versions of the routines in ``_kernels.pyx``."""

import numpy as np


def apply_pairs(m, ia, ib, u00, u01, u10, u11):
    x = m[ia]
    y = m[ib]
    m[ia] = u00 * x + u01 * y
    m[ib] = u10 * x + u11 * y


def scale_rows(m, rows, phase):
    m[rows] *= phase


def row_weights(m, rows, out):
    z = m[rows]
    out[:] = (z.real * z.real + z.imag * z.imag).sum(axis=0)
