"""Exact Gaussian elimination over GF(p), vectorized with numpy.

All matrices are int64 arrays with entries in [0, p).  Reduced row echelon
forms are canonical for a fixed column order, so rowspace equality is plain
array equality.  The heavy inner products run through float64 matmul, which
is exact here: p <= 5 and column counts stay far below 2^53 / (p-1)^2.
"""

from __future__ import annotations

import numpy as np

_CHUNK = 256


def _inverse_table(p: int) -> np.ndarray:
    inv = np.zeros(p, dtype=np.int64)
    for a in range(1, p):
        inv[a] = pow(a, p - 2, p)
    return inv


_INV_CACHE: dict[int, np.ndarray] = {}


def inverses_mod(p: int) -> np.ndarray:
    table = _INV_CACHE.get(p)
    if table is None:
        table = _inverse_table(p)
        _INV_CACHE[p] = table
    return table


def reduce_rows(block: np.ndarray, rows: np.ndarray, pivots: np.ndarray,
                p: int, rows_f8: np.ndarray | None = None) -> np.ndarray:
    """Normal form of each row of ``block`` against an RREF basis.

    One pass suffices because ``rows`` is fully reduced: subtracting
    coeffs @ rows clears every pivot column exactly.  ``rows_f8`` may carry
    a cached float64 copy of the basis to avoid repeated conversion.
    """
    block = np.asarray(block, dtype=np.int64) % p
    if rows.shape[0] == 0 or block.shape[0] == 0:
        return block
    coeffs = block[:, pivots]
    if not coeffs.any():
        return block
    if rows_f8 is None:
        rows_f8 = rows.astype(np.float64)
    prod = coeffs.astype(np.float64) @ rows_f8
    return (block - prod.astype(np.int64)) % p


def _gauss_small(block: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    """In-place RREF of a modest block; returns (nonzero rows, pivot cols)."""
    inv = inverses_mod(p)
    nrows, ncols = block.shape
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        col = block[r:, c]
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        pr = r + nz[0]
        if pr != r:
            block[[r, pr]] = block[[pr, r]]
        block[r] = (block[r] * inv[block[r, c]]) % p
        col_all = block[:, c].copy()
        col_all[r] = 0
        touched = np.nonzero(col_all)[0]
        if touched.size:
            block[touched] = (block[touched]
                              - np.outer(col_all[touched], block[r])) % p
        pivots.append(c)
        r += 1
    return block[:r], np.array(pivots, dtype=np.int64)


def rref(mat: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Canonical reduced row echelon form.

    Returns (rows, pivots) with zero rows dropped and rows sorted by pivot
    column.  Processes input in chunks: each chunk is reduced against the
    accumulated basis with a single matmul before local elimination.
    """
    mat = np.atleast_2d(np.asarray(mat, dtype=np.int64))
    ncols = mat.shape[1]
    rows = np.zeros((0, ncols), dtype=np.int64)
    pivots = np.zeros(0, dtype=np.int64)
    for start in range(0, mat.shape[0], _CHUNK):
        chunk = mat[start:start + _CHUNK] % p
        chunk = reduce_rows(chunk, rows, pivots, p)
        chunk = chunk[np.any(chunk, axis=1)]
        if chunk.shape[0] == 0:
            continue
        new_rows, new_pivots = _gauss_small(chunk, p)
        if new_rows.shape[0] == 0:
            continue
        if rows.shape[0]:
            # Clear the new pivot columns from the existing basis.
            coeffs = rows[:, new_pivots]
            if coeffs.any():
                prod = coeffs.astype(np.float64) @ new_rows.astype(np.float64)
                rows = (rows - prod.astype(np.int64)) % p
            rows = np.vstack([rows, new_rows])
            pivots = np.concatenate([pivots, new_pivots])
            order = np.argsort(pivots, kind="stable")
            rows = rows[order]
            pivots = pivots[order]
        else:
            rows, pivots = new_rows, new_pivots
    rows = np.ascontiguousarray(rows)
    rows.flags.writeable = False
    pivots.flags.writeable = False
    return rows, pivots


def rank(mat: np.ndarray, p: int) -> int:
    return rref(mat, p)[0].shape[0]


def merge(rows: np.ndarray, pivots: np.ndarray, extra: np.ndarray,
          p: int) -> tuple[np.ndarray, np.ndarray]:
    """RREF of rowspace(rows) + rowspace(extra), reusing the existing RREF."""
    if rows.shape[0] == 0:
        return rref(extra, p)
    if extra.shape[0] == 0:
        return rows, pivots
    reduced = reduce_rows(extra, rows, pivots, p)
    reduced = reduced[np.any(reduced, axis=1)]
    if reduced.shape[0] == 0:
        return rows, pivots
    new_rows, new_pivots = rref(reduced, p)
    coeffs = rows[:, new_pivots]
    if coeffs.any():
        prod = coeffs.astype(np.float64) @ new_rows.astype(np.float64)
        rows = (rows - prod.astype(np.int64)) % p
    merged = np.vstack([rows, new_rows])
    merged_piv = np.concatenate([pivots, new_pivots])
    order = np.argsort(merged_piv, kind="stable")
    merged = np.ascontiguousarray(merged[order])
    merged_piv = merged_piv[order]
    merged.flags.writeable = False
    merged_piv.flags.writeable = False
    return merged, merged_piv


def nullspace(mat: np.ndarray, p: int) -> np.ndarray:
    """Basis (as rows, in RREF) of {v : mat @ v = 0}."""
    mat = np.atleast_2d(np.asarray(mat, dtype=np.int64))
    ncols = mat.shape[1]
    rows, pivots = rref(mat, p)
    free = np.setdiff1d(np.arange(ncols), pivots)
    if free.size == 0:
        return np.zeros((0, ncols), dtype=np.int64)
    kernel = np.zeros((free.size, ncols), dtype=np.int64)
    kernel[np.arange(free.size), free] = 1
    if pivots.size:
        kernel[:, pivots] = (-rows[:, free].T) % p
    # Rows are already independent; canonicalize for downstream equality.
    return rref(kernel, p)[0]


def left_nullspace(mat: np.ndarray, p: int) -> np.ndarray:
    """Basis of {c : c @ mat = 0} as rows."""
    return nullspace(np.ascontiguousarray(np.asarray(mat).T), p)


def intersect_rowspaces(rows_a: np.ndarray, piv_a: np.ndarray,
                        rows_b: np.ndarray, piv_b: np.ndarray,
                        p: int) -> tuple[np.ndarray, np.ndarray]:
    """RREF basis of the intersection of two rowspaces.

    Works through the cokernel of the side with fewer non-pivot columns:
    v = c @ A lies in B iff c kills the reduction of A's rows modulo B.
    """
    ncols = rows_a.shape[1]
    if rows_a.shape[0] == 0 or rows_b.shape[0] == 0:
        empty = np.zeros((0, ncols), dtype=np.int64)
        return empty, np.zeros(0, dtype=np.int64)
    # Prefer reducing against the side whose cokernel is smaller.
    if (ncols - piv_b.size) > (ncols - piv_a.size):
        rows_a, piv_a, rows_b, piv_b = rows_b, piv_b, rows_a, piv_a
    residue = reduce_rows(rows_a, rows_b, piv_b, p)
    nonpiv = np.setdiff1d(np.arange(ncols), piv_b)
    combos = left_nullspace(residue[:, nonpiv], p)
    if combos.shape[0] == 0:
        empty = np.zeros((0, ncols), dtype=np.int64)
        return empty, np.zeros(0, dtype=np.int64)
    vecs = (combos.astype(np.float64) @ rows_a.astype(np.float64)).astype(np.int64) % p
    return rref(vecs, p)
