"""Compiled inner loops.  They release the GIL so lanes run truly concurrently."""

import numba
import numpy as np


@numba.njit(nogil=True, cache=True)
def rank_one_update(block, pivot_col, pivot_row, r):
    # block is a Fortran-ordered column slice; pivot_row covers the same columns.
    # Each cell is updated as cell - col[i] * row[j], matching the reference
    # np.outer-based update bit for bit.
    nrows = block.shape[0]
    for j in range(block.shape[1]):
        f = pivot_row[j]
        if f != 0.0:
            for i in range(r):
                block[i, j] -= pivot_col[i] * f
            for i in range(r + 1, nrows):
                block[i, j] -= pivot_col[i] * f
        block[r, j] = f


@numba.njit(nogil=True, cache=True)
def most_negative(values, start, threshold):
    """Index (absolute) and value of the first minimum below ``threshold``, or -1."""
    best = -1
    best_value = threshold
    for j in range(values.shape[0]):
        v = values[j]
        if v < best_value:
            best_value = v
            best = j
    if best < 0:
        return -1, 0.0
    return start + best, best_value


@numba.njit(nogil=True, cache=True)
def first_negative(values, start, threshold):
    for j in range(values.shape[0]):
        if values[j] < threshold:
            return start + j, values[j]
    return -1, 0.0


def warm_up():
    block = np.zeros((2, 2), order="F")
    rank_one_update(block, np.zeros(2), np.zeros(2), 0)
    most_negative(np.zeros(2), 0, -1.0)
    first_negative(np.zeros(2), 0, -1.0)
