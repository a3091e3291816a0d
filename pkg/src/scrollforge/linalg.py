"""Dense linear algebra over F_p (row echelon forms, ranks, kernels)."""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _rref_kernel(M, p):
    rows, cols = M.shape
    pivots = np.empty(min(rows, cols), dtype=np.int64)
    nz = np.empty(cols, dtype=np.int64)
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = -1
        for i in range(r, rows):
            if M[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for k in range(c, cols):
                t = M[r, k]
                M[r, k] = M[piv, k]
                M[piv, k] = t
        # modular inverse by Fermat
        a = M[r, c]
        inv = 1
        e = p - 2
        while e > 0:
            if e & 1:
                inv = inv * a % p
            a = a * a % p
            e >>= 1
        cnt = 0
        for k in range(c, cols):
            if M[r, k] != 0:
                M[r, k] = M[r, k] * inv % p
                nz[cnt] = k
                cnt += 1
        for i in range(rows):
            if i != r:
                f = M[i, c]
                if f != 0:
                    for t in range(cnt):
                        k = nz[t]
                        M[i, k] = (M[i, k] - f * M[r, k]) % p
        pivots[r] = c
        r += 1
    return r, pivots[:r]


def rref(M, p: int):
    """Reduced row echelon form of ``M`` mod ``p``.

    Returns ``(R, pivots)`` with ``R`` the nonzero rows.
    """
    A = np.ascontiguousarray(np.asarray(M, dtype=np.int64) % p)
    if A.size == 0:
        return A.reshape(0, A.shape[1] if A.ndim == 2 else 0), np.zeros(0, dtype=np.int64)
    r, piv = _rref_kernel(A, p)
    return A[:r].copy(), piv.copy()


def rank(M, p: int) -> int:
    return rref(M, p)[0].shape[0]


def kernel(M, p: int):
    """Basis (as rows) of the right kernel ``{v : M v = 0}``."""
    A = np.asarray(M, dtype=np.int64)
    n = A.shape[1]
    R, piv = rref(A, p)
    pivset = set(int(c) for c in piv)
    free = [j for j in range(n) if j not in pivset]
    K = np.zeros((len(free), n), dtype=np.int64)
    for t, j in enumerate(free):
        K[t, j] = 1
        for i, c in enumerate(piv):
            K[t, c] = (-R[i, j]) % p
    return K


def reduce_rows(T, R, piv, p: int):
    """Reduce rows of ``T`` by the RREF block ``(R, piv)``."""
    T = np.asarray(T, dtype=np.int64) % p
    if len(piv) == 0 or T.shape[0] == 0:
        return T
    coeffs = T[:, piv]
    out = T.copy()
    # chunk the product so each dot stays far below 2**63
    step = max(1, (2 ** 62) // (p * p) - 1)
    for s in range(0, len(piv), step):
        out = (out - coeffs[:, s:s + step] @ R[s:s + step]) % p
    return out


def matmul_mod(A, B, p: int):
    """``A @ B mod p`` (batched like ``np.matmul``), chunking the inner dimension below 2**63."""
    A = np.asarray(A, dtype=np.int64) % p
    B = np.asarray(B, dtype=np.int64) % p
    step = max(1, (2 ** 62) // (p * p) - 1)
    n = A.shape[-1]
    if n <= step:
        return np.matmul(A, B) % p
    out = None
    for s in range(0, n, step):
        part = np.matmul(A[..., s:s + step], B[..., s:s + step, :]) % p
        out = part if out is None else (out + part) % p
    return out
