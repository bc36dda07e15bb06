"""
Dense complex linear algebra used by every other module.

Matrices are plain ``numpy`` complex128 arrays. The Hermitian eigensolver is a
cyclic complex Jacobi iteration; rotations of one round act on disjoint index
pairs (round-robin ordering) so a whole round is applied with array slicing.
"""

from dataclasses import dataclass
from functools import lru_cache
import logging

import numpy as np

from .conf import setting
from .exceptions import DimensionMismatch, InvalidMatrix, NoConvergence, NotHermitian, NotPSD

logger = logging.getLogger(__name__)


def as_cmatrix(M):
    """Return ``M`` as a finite two-dimensional complex128 array."""
    A = np.asarray(M, dtype=np.complex128)
    if A.ndim != 2:
        raise InvalidMatrix(f"expected a matrix, got an array of shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidMatrix("matrix has non-finite entries")
    return A


def rng_from(seed):
    """Accept a Generator, an int or a sequence of ints and return a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def dagger(M):
    return np.conj(M).T


def fro_norm(M):
    return float(np.sqrt(np.sum(np.abs(M) ** 2)))


@dataclass(frozen=True)
class HermEig:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def min(self):
        return float(self.eigenvalues[0]) if self.eigenvalues.size else 0.0

    @property
    def max(self):
        return float(self.eigenvalues[-1]) if self.eigenvalues.size else 0.0

    def reconstruct(self):
        Q = self.eigenvectors
        return (Q * self.eigenvalues) @ dagger(Q)


@lru_cache(maxsize=256)
def _round_robin(n):
    """Rounds of disjoint pairs covering every (p, q), p < q, exactly once."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for i in range(m // 2):
            p, q = players[i], players[m - 1 - i]
            if p < n and q < n:
                ps.append(min(p, q))
                qs.append(max(p, q))
        rounds.append((np.array(ps, dtype=np.intp), np.array(qs, dtype=np.intp)))
        players = [players[0], players[-1]] + players[1:-1]
    return tuple(rounds)


def _off_norm(A):
    return fro_norm(A - np.diag(np.diag(A)))


def check_hermitian(M, tol=None):
    A = as_cmatrix(M)
    if A.shape[0] != A.shape[1]:
        raise NotHermitian(f"matrix of shape {A.shape} is not square")
    tol = setting('HERMITIAN_TOL') if tol is None else tol
    defect = fro_norm(A - dagger(A))
    if defect > tol * (1.0 + fro_norm(A)):
        raise NotHermitian(f"‖M − M*‖ = {defect:.3e} exceeds tolerance")
    return A


def herm_eig(M, tol=None, max_sweeps=None):
    """
    Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Each rotation first removes the phase of the pivot a_pq with a diagonal
    unitary and then applies the real rotation that annihilates it. Sweeps stop
    once the off-diagonal Frobenius mass is below ``tol``·‖M‖.
    """
    A = check_hermitian(M)
    A = (A + dagger(A)) / 2.0
    n = A.shape[0]
    V = np.eye(n, dtype=np.complex128)
    tol = setting('JACOBI_TOL') if tol is None else tol
    max_sweeps = setting('JACOBI_MAX_SWEEPS') if max_sweeps is None else max_sweeps

    scale = fro_norm(A)
    threshold = tol * scale
    if n > 1 and scale > 0.0:
        rounds = _round_robin(n)
        for sweep in range(max_sweeps + 1):
            if _off_norm(A) <= threshold:
                break
            if sweep == max_sweeps:
                raise NoConvergence(f"Jacobi iteration did not converge in {max_sweeps} sweeps (n={n})")
            for ps, qs in rounds:
                apq = A[ps, qs]
                mag = np.abs(apq)
                active = mag > 0.0
                safe = np.where(active, mag, 1.0)
                app = A[ps, ps].real
                aqq = A[qs, qs].real
                with np.errstate(over='ignore', invalid='ignore', divide='ignore'):
                    tau = (aqq - app) / (2.0 * safe)
                    t = np.where(tau >= 0.0, 1.0, -1.0) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
                t = np.where(active & np.isfinite(t), t, 0.0)
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                phase = np.where(active, apq / safe, 1.0)
                cphase = np.conj(phase)

                colp = A[:, ps].copy()
                colq = A[:, qs].copy()
                A[:, ps] = colp * c - colq * (s * cphase)
                A[:, qs] = colp * s + colq * (c * cphase)
                rowp = A[ps, :].copy()
                rowq = A[qs, :].copy()
                A[ps, :] = c[:, None] * rowp - (s * phase)[:, None] * rowq
                A[qs, :] = s[:, None] * rowp + (c * phase)[:, None] * rowq
                A[ps, qs] = 0.0
                A[qs, ps] = 0.0

                vp = V[:, ps].copy()
                vq = V[:, qs].copy()
                V[:, ps] = vp * c - vq * (s * cphase)
                V[:, qs] = vp * s + vq * (c * cphase)

    w = np.diag(A).real.copy()
    order = np.argsort(w, kind='stable')
    return HermEig(eigenvalues=w[order], eigenvectors=V[:, order])


@dataclass(frozen=True)
class PsdVerdict:
    passed: bool
    min_eigenvalue: float
    max_eigenvalue: float
    tol: float

    @property
    def residual(self):
        """Relative negativity; a value above ``tol`` is a failure."""
        return max(0.0, -self.min_eigenvalue) / (1.0 + max(self.max_eigenvalue, 0.0))


def is_psd(M, tol=None, eig=None):
    tol = setting('PSD_TOL') if tol is None else tol
    eig = herm_eig(M) if eig is None else eig
    lo, hi = eig.min, eig.max
    return PsdVerdict(passed=lo >= -tol * (1.0 + max(hi, 0.0)), min_eigenvalue=lo, max_eigenvalue=hi, tol=tol)


def psd_sqrt(M, tol=None):
    tol = setting('PSD_TOL') if tol is None else tol
    eig = herm_eig(M)
    if eig.min < -tol * (1.0 + max(eig.max, 0.0)):
        raise NotPSD(f"matrix has eigenvalue {eig.min:.3e} below tolerance")
    roots = np.sqrt(np.clip(eig.eigenvalues, 0.0, None))
    Q = eig.eigenvectors
    return (Q * roots) @ dagger(Q)


def op_norm(M):
    """Largest singular value."""
    A = as_cmatrix(M)
    if A.size == 0:
        return 0.0
    gram = dagger(A) @ A if A.shape[1] <= A.shape[0] else A @ dagger(A)
    return float(np.sqrt(max(herm_eig(gram).max, 0.0)))


def random_isometry(n_from, n_to, seed):
    """Haar-type random isometry C^n_from → C^n_to (columns orthonormal)."""
    if n_from > n_to:
        raise DimensionMismatch(f"no isometry from dimension {n_from} into {n_to}")
    rng = rng_from(seed)
    Z = rng.standard_normal((n_to, n_from)) + 1j * rng.standard_normal((n_to, n_from))
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.where(np.abs(d) > 0, np.abs(d), 1.0))


def random_density(d, seed, rank=None):
    rng = rng_from(seed)
    rank = d if rank is None else rank
    G = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = G @ dagger(G)
    return rho / np.trace(rho).real


def random_contraction(n, seed, norm=None):
    """Random n×n matrix with operator norm ``norm`` (uniform in (0, 1] when omitted)."""
    rng = rng_from(seed)
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    target = rng.uniform(0.05, 1.0) if norm is None else norm
    return Z * (target / op_norm(Z))


def kron_all(factors):
    out = np.eye(1, dtype=np.complex128)
    for f in factors:
        out = np.kron(out, f)
    return out


@dataclass(frozen=True)
class Verdict:
    """Outcome of one check: raw residual against its tolerance plus free-form details."""

    passed: bool
    residual: float
    tol: float
    detail: dict = None

    def as_dict(self):
        return {'passed': bool(self.passed), 'residual': float(self.residual), 'tol': float(self.tol), 'detail': self.detail or {}}
