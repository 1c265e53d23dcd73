"""Small exact linear algebra over F_p (p odd prime), numpy int arrays throughout."""

from __future__ import annotations

import numpy as np


def as_mat(m, p: int) -> np.ndarray:
    a = np.asarray(m, dtype=np.int64) % p
    return a


def mat_mul(a, b, p: int) -> np.ndarray:
    return (as_mat(a, p) @ as_mat(b, p)) % p


def mat_pow(a, k: int, p: int) -> np.ndarray:
    a = as_mat(a, p)
    n = a.shape[0]
    out = np.eye(n, dtype=np.int64)
    base = a.copy()
    if k < 0:
        base = mat_inv(a, p)
        k = -k
    while k:
        if k & 1:
            out = (out @ base) % p
        base = (base @ base) % p
        k >>= 1
    return out


def rref(m, p: int) -> tuple[np.ndarray, list[int]]:
    """Row-reduced echelon form and pivot columns."""
    a = as_mat(m, p).copy()
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        piv = None
        for i in range(r, rows):
            if a[i, c] % p:
                piv = i
                break
        if piv is None:
            continue
        a[[r, piv]] = a[[piv, r]]
        a[r] = (a[r] * pow(int(a[r, c]), p - 2, p)) % p
        for i in range(rows):
            if i != r and a[i, c] % p:
                a[i] = (a[i] - a[i, c] * a[r]) % p
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return a, pivots


def rank(m, p: int) -> int:
    return len(rref(m, p)[1])


def kernel_basis(m, p: int) -> list[np.ndarray]:
    """Basis of the right kernel {x : m x = 0}."""
    a, pivots = rref(m, p)
    cols = a.shape[1]
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = np.zeros(cols, dtype=np.int64)
        v[f] = 1
        for r, c in enumerate(pivots):
            v[c] = (-a[r, f]) % p
        basis.append(v)
    return basis


def solve(m, rhs, p: int) -> np.ndarray | None:
    """One solution of m x = rhs, or None if inconsistent."""
    a = as_mat(m, p)
    b = as_mat(rhs, p).reshape(-1, 1)
    aug, pivots = rref(np.hstack([a, b]), p)
    cols = a.shape[1]
    if cols in pivots:
        return None
    x = np.zeros(cols, dtype=np.int64)
    for r, c in enumerate(pivots):
        x[c] = aug[r, cols]
    return x


def mat_inv(m, p: int) -> np.ndarray:
    a = as_mat(m, p)
    n = a.shape[0]
    aug, pivots = rref(np.hstack([a, np.eye(n, dtype=np.int64)]), p)
    if pivots != list(range(n)):
        raise ZeroDivisionError("matrix not invertible mod %d" % p)
    return aug[:, n:] % p


def det(m, p: int) -> int:
    a = as_mat(m, p).copy()
    n = a.shape[0]
    d = 1
    for c in range(n):
        piv = None
        for i in range(c, n):
            if a[i, c] % p:
                piv = i
                break
        if piv is None:
            return 0
        if piv != c:
            a[[c, piv]] = a[[piv, c]]
            d = -d
        d = (d * int(a[c, c])) % p
        inv = pow(int(a[c, c]), p - 2, p)
        for i in range(c + 1, n):
            if a[i, c] % p:
                a[i] = (a[i] - a[i, c] * inv * a[c]) % p
    return d % p


def _berkowitz(a: list[list[int]], red) -> list[int]:
    """Division-free characteristic polynomial of det(X*I - a).

    `red` reduces intermediate integers (identity for Z, mod p otherwise).
    Returns coefficients low degree first, length n+1, monic.
    """
    n = len(a)
    if n == 0:
        return [1]
    # High-degree-first coefficient vector of the leading 1x1 block.
    vec = [1, red(-a[0][0])]
    for k in range(1, n):
        R = a[k][:k]
        C = [a[i][k] for i in range(k)]
        M = [row[:k] for row in a[:k]]
        # q_j = R . M^j . C for j = 0..k-1
        q = []
        w = C[:]
        for _ in range(k):
            q.append(red(sum(R[i] * w[i] for i in range(k))))
            w = [red(sum(M[i][j] * w[j] for j in range(k))) for i in range(k)]
        # Toeplitz generator (1, -a_kk, -q_0, -q_1, ...): truncated convolution.
        t = [1, red(-a[k][k])] + [red(-x) for x in q]
        new = [0] * (k + 2)
        for i in range(k + 2):
            s = 0
            for j in range(min(i, k) + 1):
                if i - j < len(t):
                    s += t[i - j] * vec[j]
            new[i] = red(s)
        vec = new
    return list(reversed(vec))


def charpoly(m, p: int) -> list[int]:
    """Characteristic polynomial of m over F_p, low degree first, monic."""
    a = [[int(x) % p for x in row] for row in as_mat(m, p)]
    return _berkowitz(a, lambda x: x % p)


def charpoly_int(m) -> list[int]:
    """Characteristic polynomial over Z (exact), low degree first, monic."""
    a = [[int(x) for x in row] for row in np.asarray(m, dtype=object)]
    return _berkowitz(a, lambda x: x)
