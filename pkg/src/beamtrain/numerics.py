"""Complex linear-algebra primitives used by the training schemes.

Vectors and matrices are plain ``numpy`` arrays of dtype ``complex128``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 10_000
# Seed of the single random restart in principal_svd.
_RESTART_SEED = 0x5EED
# Relative margin for the "is this really the top eigenvalue" certificate.
_CERT_MARGIN = 1e-6


class NonConvergenceError(RuntimeError):
    """Raised when an iterative routine exhausts its iteration budget.

    The last iterate is kept on the exception so callers can inspect it.
    """

    def __init__(self, message, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


@dataclass(frozen=True)
class SvdTriple:
    """Principal singular triple ``A @ v1 == sigma1 * u1``."""

    sigma1: float
    u1: np.ndarray
    v1: np.ndarray


def as_vector(x) -> np.ndarray:
    v = np.asarray(x, dtype=complex)
    if v.ndim != 1 or v.size < 1:
        raise ValueError(f"expected a nonempty 1-D vector, got shape {v.shape}")
    return v


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.size < 1:
        raise ValueError(f"expected a nonempty 2-D matrix, got shape {m.shape}")
    return m


def matvec(a, x) -> np.ndarray:
    """Return ``A @ x``."""
    a = as_matrix(a)
    x = as_vector(x)
    if a.shape[1] != x.size:
        raise ValueError(f"dimension mismatch: A is {a.shape}, x has {x.size} entries")
    return a @ x


def hermitian_matvec(a, x) -> np.ndarray:
    """Return ``A^H @ x`` without forming the conjugate transpose."""
    a = as_matrix(a)
    x = as_vector(x)
    if a.shape[0] != x.size:
        raise ValueError(f"dimension mismatch: A is {a.shape}, x has {x.size} entries")
    return (x.conj() @ a).conj()


@lru_cache(maxsize=64)
def _dft(n: int) -> np.ndarray:
    k = np.arange(n)
    # reduce k*l mod n before scaling so large phases stay exact
    phase = np.outer(k, k) % n
    f = np.exp(-2j * np.pi * phase / n) / np.sqrt(n)
    f.setflags(write=False)
    return f


def dft_matrix(n: int) -> np.ndarray:
    """Unitary ``n x n`` DFT matrix, ``F[k, l] = exp(-2j*pi*k*l/n) / sqrt(n)``.

    Every entry has magnitude ``1/sqrt(n)``. The returned array is cached and
    read-only.
    """
    if int(n) != n or n < 1:
        raise ValueError(f"DFT size must be a positive integer, got {n!r}")
    return _dft(int(n))


def _is_top_eigenvalue(gram: np.ndarray, lam: float) -> bool:
    # lam*(1+margin)*I - gram is positive definite iff lam bounds the spectrum
    shifted = -gram
    shifted[np.diag_indices_from(shifted)] += lam * (1.0 + _CERT_MARGIN) + 1e-300
    try:
        np.linalg.cholesky(shifted)
    except np.linalg.LinAlgError:
        return False
    return True


def _power_iterate(a, gram, v, tol, max_iter, rng):
    """Power iteration on ``gram = A^H A`` from ``v``.

    Returns ``(sigma, u, v)``. Restarts once from a random vector if the
    Rayleigh quotient stops growing while the residual is still large.
    """
    ah = a.conj().T
    v = v / np.linalg.norm(v)
    rq_prev = -np.inf
    restarted = False
    for _ in range(max_iter):
        w = gram @ v
        rq = float(np.real(np.vdot(v, w)))
        norm_w = np.linalg.norm(w)
        if norm_w == 0.0:
            raise NonConvergenceError("iterate fell into the null space", v)
        av = a @ v
        sigma = np.linalg.norm(av)
        u = av / sigma
        residual = np.linalg.norm(ah @ u - sigma * v)
        if residual <= tol * sigma:
            return sigma, u, v
        stalled = rq - rq_prev < tol * rq and residual > np.sqrt(tol) * sigma
        if stalled and not restarted:
            v = rng.standard_normal(v.size) + 1j * rng.standard_normal(v.size)
            v /= np.linalg.norm(v)
            restarted = True
            rq_prev = -np.inf
            continue
        rq_prev = rq
        v = w / norm_w
    raise NonConvergenceError(
        f"power iteration did not converge in {max_iter} iterations", v
    )


def principal_svd(a, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> SvdTriple:
    """Largest singular value and its singular vectors by power iteration.

    Iterates ``v <- A^H A v`` from the all-ones vector until the residual
    ``||A^H u - sigma v||`` drops below ``tol * sigma``. The result is
    then certified against the Gram matrix; if some eigenvalue clearly
    exceeds ``sigma**2`` (start vector orthogonal to the principal one), the
    iteration is repeated from a seeded random vector.

    Parameters
    ----------
    a : array_like
        Nonzero complex matrix.
    tol : float
        Relative residual tolerance.
    max_iter : int
        Iteration budget per start vector.

    Returns
    -------
    SvdTriple

    Raises
    ------
    NonConvergenceError
        If the budget is exhausted.
    """
    a = as_matrix(a)
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not np.any(a):
        raise ValueError("principal_svd of the zero matrix is undefined")
    rng = np.random.default_rng(_RESTART_SEED)
    gram = a.conj().T @ a
    start = np.ones(a.shape[1], dtype=complex)
    sigma, u, v = _power_iterate(a, gram, start, tol, max_iter, rng)
    if not _is_top_eigenvalue(gram, sigma * sigma):
        start = rng.standard_normal(a.shape[1]) + 1j * rng.standard_normal(a.shape[1])
        s2, u2, v2 = _power_iterate(a, gram, start, tol, max_iter, rng)
        if s2 > sigma:
            sigma, u, v = s2, u2, v2
    return SvdTriple(float(sigma), u, v)
