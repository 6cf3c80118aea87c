"""Dense linear algebra over prime fields GF(q), on int64 numpy arrays."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._accel import rref_mod

MAX_MODULUS = 2**31 - 1  # products must stay inside int64


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def next_prime_above(n: int) -> int:
    """Smallest prime strictly greater than ``n``."""
    p = max(2, n + 1)
    while not is_prime(p):
        p += 1
    return p


@dataclass(frozen=True)
class PrimeField:
    q: int

    def __post_init__(self):
        if not is_prime(self.q):
            raise ValueError(f"{self.q} is not prime")
        if self.q > MAX_MODULUS:
            raise ValueError("modulus too large for int64 kernels")

    def array(self, values) -> np.ndarray:
        return np.asarray(values, dtype=np.int64) % self.q

    def random(self, rng: np.random.Generator, shape) -> np.ndarray:
        return rng.integers(0, self.q, size=shape, dtype=np.int64)

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        # entries < q < 2^31 but long inner sums can overflow; reduce blockwise
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if a.shape[-1] == 0:
            return np.zeros(a.shape[:-1] + b.shape[1:], dtype=np.int64)
        if self.q < 2**26 and a.shape[-1] < 2**11:
            return (a @ b) % self.q
        out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
        for k in range(a.shape[1]):
            out = (out + np.outer(a[:, k], b[k])) % self.q
        return out

    def rref(self, M) -> tuple[np.ndarray, np.ndarray]:
        return rref_mod(np.asarray(M, dtype=np.int64).reshape(_shape2(M)), self.q)

    def rank(self, M) -> int:
        M = np.asarray(M, dtype=np.int64)
        if M.size == 0:
            return 0
        return len(self.rref(M)[1])

    def inverse(self, M) -> np.ndarray:
        M = self.array(M)
        n = M.shape[0]
        if M.shape != (n, n):
            raise ValueError("inverse needs a square matrix")
        R, piv = self.rref(np.hstack([M, np.eye(n, dtype=np.int64)]))
        if len(piv) < n or piv[n - 1] >= n:
            raise np.linalg.LinAlgError("matrix is singular over GF(%d)" % self.q)
        return R[:, n:].copy()

    def in_rowspace(self, vectors, M) -> bool:
        """Whether every row of ``vectors`` lies in the row space of ``M``."""
        vectors = np.atleast_2d(np.asarray(vectors, dtype=np.int64))
        M = np.asarray(M, dtype=np.int64)
        if vectors.shape[0] == 0:
            return True
        if M.size == 0:
            return not np.any(vectors % self.q)
        return self.rank(np.vstack([M, vectors])) == self.rank(M)

    def extend_to_basis(self, M) -> np.ndarray:
        """Append unit rows (lowest index first) until ``M`` is square and invertible.

        Raises:
            ValueError: if ``M`` does not have full row rank.
        """
        M = self.array(M)
        n = M.shape[1]
        if self.rank(M) != M.shape[0]:
            raise ValueError("matrix does not have full row rank")
        current = M
        r = M.shape[0]
        for i in range(n):
            if r == n:
                break
            e = np.zeros((1, n), dtype=np.int64)
            e[0, i] = 1
            cand = np.vstack([current, e])
            if self.rank(cand) > r:
                current, r = cand, r + 1
        return current


def _shape2(M):
    M = np.asarray(M)
    if M.ndim == 1:
        return (1, M.shape[0])
    return M.shape
