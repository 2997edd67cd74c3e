"""Vectorised F_p linear algebra used by the brute-force scans.

Field elements are flattened to their base-p digit vectors; multiplication
by a fixed element ``b`` is then the F_p-linear map ``flat(a) @ mult_matrix(b)``.
"""
from __future__ import annotations

import numpy as np

from .field_tower import Field

CHUNK = 1 << 15


def powers(p: int, N: int) -> np.ndarray:
    return p ** np.arange(N, dtype=np.int64)


def digit_array(values, p: int, N: int) -> np.ndarray:
    v = np.asarray(values, dtype=np.int64)
    return (v[..., None] // powers(p, N)) % p


def from_digit_array(D: np.ndarray, p: int) -> np.ndarray:
    return D.astype(np.int64) @ powers(p, D.shape[-1])


def mult_matrix(F: Field, b: int) -> np.ndarray:
    """Row ``r`` is the flattened product ``p**r * b``."""
    N = F.prime_degree
    return np.array([F.flat(F.mul(F.p**r, b)) for r in range(N)], dtype=np.int64)


def inverse_table(p: int) -> np.ndarray:
    return np.array([0] + [pow(i, p - 2, p) for i in range(1, p)], dtype=np.int64)


def rref_fp(A, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over F_p and the pivot columns."""
    M = np.array(A, dtype=np.int64) % p
    if M.ndim != 2:
        M = M.reshape(0, 0) if M.size == 0 else M
    rows, cols = M.shape
    inv = inverse_table(p)
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(M[r:, c])[0]
        if len(nz) == 0:
            continue
        i = r + nz[0]
        if i != r:
            M[[r, i]] = M[[i, r]]
        M[r] = M[r] * inv[M[r, c]] % p
        f = M[:, c].copy()
        f[r] = 0
        M = (M - np.outer(f, M[r])) % p
        pivots.append(c)
        r += 1
    return M[:r], pivots


def reduction_matrix(rows: np.ndarray, p: int, N: int) -> np.ndarray:
    """Matrix of the projection of F_p^N onto a complement of ``span(rows)``.

    ``v @ R`` is zero exactly when ``v`` lies in the row span.
    """
    R = np.eye(N, dtype=np.int64)
    E, piv = rref_fp(rows, p)
    S = np.zeros((N, N), dtype=np.int64)
    for i, c in enumerate(piv):
        S[c] = E[i]
    return (R - S) % p


def batched_rank(A: np.ndarray, p: int, chunk: int = CHUNK) -> np.ndarray:
    """Rank over F_p of each matrix in a stack of shape ``(B, r, c)``."""
    A = np.asarray(A, dtype=np.int64)
    B, r, c = A.shape
    out = np.zeros(B, dtype=np.int64)
    if r == 0 or c == 0:
        return out
    inv = inverse_table(p)
    rows = np.arange(r)
    for s in range(0, B, chunk):
        M = A[s : s + chunk] % p
        b = M.shape[0]
        rank = np.zeros(b, dtype=np.int64)
        for col in range(c):
            mask = (M[:, :, col] != 0) & (rows[None, :] >= rank[:, None])
            has = mask.any(axis=1)
            if not has.any():
                continue
            sel = np.nonzero(has)[0]
            pr = np.argmax(mask[sel], axis=1)
            rr = rank[sel]
            row_p = M[sel, pr].copy()
            M[sel, pr] = M[sel, rr]
            M[sel, rr] = row_p * inv[row_p[:, col]][:, None] % p
            f = M[sel, :, col].copy()
            f[rows[None, :] <= rr[:, None]] = 0
            M[sel] = (M[sel] - f[:, :, None] * M[sel, rr][:, None, :]) % p
            rank[sel] += 1
            if (rank == r).all():
                break
        out[s : s + b] = rank
    return out


def batched_rref(A: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Fully reduced echelon forms of a stack ``(B, r, c)`` and the pivot
    column of each row (-1 below the rank)."""
    M = np.asarray(A, dtype=np.int64) % p
    B, r, c = M.shape
    inv = inverse_table(p)
    rows = np.arange(r)
    rank = np.zeros(B, dtype=np.int64)
    piv = np.full((B, r), -1, dtype=np.int64)
    for col in range(c):
        mask = (M[:, :, col] != 0) & (rows[None, :] >= rank[:, None])
        has = mask.any(axis=1)
        if not has.any():
            continue
        sel = np.nonzero(has)[0]
        pr = np.argmax(mask[sel], axis=1)
        rr = rank[sel]
        row_p = M[sel, pr].copy()
        M[sel, pr] = M[sel, rr]
        M[sel, rr] = row_p * inv[row_p[:, col]][:, None] % p
        f = M[sel, :, col].copy()
        f[rows[None, :] == rr[:, None]] = 0
        M[sel] = (M[sel] - f[:, :, None] * M[sel, rr][:, None, :]) % p
        piv[sel, rr] = col
        rank[sel] += 1
    return M, piv


def projective_transversal(q: int, n: int) -> np.ndarray:
    """Representatives of the nonzero vectors of F_q^n modulo F_q^*.

    A vector is encoded as the int with base-``q`` digits equal to its
    coordinates; the representative is the one whose lowest nonzero digit
    is 1.  Returned in increasing order.
    """
    parts = [q**j + q ** (j + 1) * np.arange(q ** (n - j - 1), dtype=np.int64) for j in range(n)]
    out = np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)
    out.sort()
    return out
