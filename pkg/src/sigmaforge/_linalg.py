"""Dense linear algebra over F_p on small numpy integer matrices."""

from __future__ import annotations

import numpy as np


def asmat(rows, p) -> np.ndarray:
    m = np.array(rows, dtype=np.int64) % p
    if m.ndim == 1:
        m = m.reshape(1, -1)
    return m


def rref(mat: np.ndarray, p: int):
    """Reduced row echelon form mod p.  Returns (R, pivot_columns)."""
    R = (np.array(mat, dtype=np.int64) % p).copy()
    nrows, ncols = R.shape
    pivots = []
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        nz = np.nonzero(R[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + nz[0]
        if k != r:
            R[[r, k]] = R[[k, r]]
        R[r] = (R[r] * pow(int(R[r, c]), -1, p)) % p
        for i in range(nrows):
            if i != r and R[i, c]:
                R[i] = (R[i] - R[i, c] * R[r]) % p
        pivots.append(c)
        r += 1
    return R[:r], pivots


def rank(mat, p: int) -> int:
    if len(mat) == 0:
        return 0
    return len(rref(asmat(mat, p), p)[1])


def nullspace(mat: np.ndarray, p: int) -> np.ndarray:
    """Rows form a basis of the right kernel {x : mat @ x = 0 mod p}."""
    A = asmat(mat, p)
    ncols = A.shape[1]
    R, pivots = rref(A, p)
    free = [c for c in range(ncols) if c not in pivots]
    basis = np.zeros((len(free), ncols), dtype=np.int64)
    for idx, c in enumerate(free):
        basis[idx, c] = 1
        for r, pc in enumerate(pivots):
            basis[idx, pc] = (-R[r, c]) % p
    return basis


def solve(A: np.ndarray, b: np.ndarray, p: int):
    """One solution of A @ x = b mod p, or None."""
    A = asmat(A, p)
    b = np.array(b, dtype=np.int64) % p
    aug = np.concatenate([A, b.reshape(-1, 1)], axis=1)
    R, pivots = rref(aug, p)
    if A.shape[1] in pivots:
        return None
    x = np.zeros(A.shape[1], dtype=np.int64)
    for r, c in enumerate(pivots):
        x[c] = R[r, -1]
    return x


def inv(A: np.ndarray, p: int):
    """Matrix inverse mod p, or None when singular."""
    A = asmat(A, p)
    n = A.shape[0]
    aug = np.concatenate([A, np.eye(n, dtype=np.int64)], axis=1)
    R, pivots = rref(aug, p)
    if len(pivots) < n or pivots[:n] != list(range(n)):
        return None
    return R[:, n:]


def rref_key(mat: np.ndarray, p: int) -> bytes:
    """Canonical bytes for the row space of mat; equal iff row spaces agree."""
    R, _ = rref(asmat(mat, p), p)
    return R.astype(np.int8).tobytes() + bytes([R.shape[1] % 256])
