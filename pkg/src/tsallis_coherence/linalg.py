"""Dense Hermitian linear algebra: spectra, spectral matrix functions, Loewner order.

Two eigensolvers are available. ``method="lapack"`` (the default) calls
``numpy.linalg.eigh``; ``method="jacobi"`` is a cyclic complex Jacobi solver
kept as an independent, dependency-free route and used to cross-check LAPACK
in the test suite.
"""

from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

from .config import TOL


class NotHermitianError(ValueError):
    pass


class EigenConvergenceError(RuntimeError):
    """Raised when Jacobi sweeps fail to annihilate the off-diagonal part."""

    def __init__(self, sweeps: int, residual: float):
        super().__init__(
            f"Jacobi eigensolver did not converge after {sweeps} sweeps "
            f"(off-diagonal residual {residual:.3e})"
        )
        self.sweeps = sweeps
        self.residual = residual


class MatrixDomainError(ValueError):
    pass


class Spectrum(NamedTuple):
    eigenvalues: np.ndarray   # ascending, real
    eigenvectors: np.ndarray  # unitary, columns

    def reconstruct(self) -> np.ndarray:
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.conj().T


class OrderCheck(NamedTuple):
    holds: bool
    min_eigenvalue: float
    witness: np.ndarray | None


def max_abs(a: np.ndarray) -> float:
    return float(np.max(np.abs(a))) if a.size else 0.0


def hermitian(a, tol: float = TOL.herm) -> np.ndarray:
    """Return ``a`` as a complex Hermitian array, symmetrized exactly.

    Raises :class:`NotHermitianError` when ``a`` deviates from its adjoint by
    more than ``tol * max(1, max|a|)``.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotHermitianError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NotHermitianError("matrix has non-finite entries")
    dev = max_abs(a - a.conj().T)
    if dev > tol * max(1.0, max_abs(a)):
        raise NotHermitianError(f"matrix is not Hermitian (max |H - H^dagger| = {dev:.3e})")
    return 0.5 * (a + a.conj().T)


def _jacobi_eigh(h: np.ndarray, max_sweeps: int) -> tuple[np.ndarray, np.ndarray]:
    a = h.copy()
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = max(np.linalg.norm(a), np.finfo(float).tiny)
    eps = np.finfo(float).eps
    for sweep in range(max_sweeps + 1):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= eps * scale:
            return np.real(np.diag(a)).copy(), v
        if sweep == max_sweeps:
            raise EigenConvergenceError(max_sweeps, float(off))
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                g = abs(apq)
                if g <= eps * eps * scale:
                    continue
                app = a[p, p].real
                aqq = a[q, q].real
                # phase-rotate column q so the pivot is real, then a real Givens rotation
                phase = apq / g
                theta = (aqq - app) / (2.0 * g)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0)) if theta != 0 else 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]], dtype=complex)
                idx = [p, q]
                a[:, idx] = a[:, idx] @ rot
                a[idx, :] = rot.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ rot
    raise AssertionError("unreachable")


def eigh(h, method: str = "lapack", max_sweeps: int = TOL.max_sweeps) -> Spectrum:
    """Eigendecomposition of a Hermitian matrix with ascending eigenvalues.

    Parameters
    ----------
    h : array_like
        Hermitian matrix (checked to ``TOL.herm``).
    method : {"lapack", "jacobi"}
        Backend. ``"jacobi"`` raises :class:`EigenConvergenceError` carrying the
        off-diagonal residual when ``max_sweeps`` cyclic sweeps do not suffice.
    """
    h = hermitian(h)
    if method == "lapack":
        w, u = np.linalg.eigh(h)
        return Spectrum(w, u)
    if method == "jacobi":
        w, u = _jacobi_eigh(h, max_sweeps)
        order = np.argsort(w, kind="stable")
        return Spectrum(w[order], u[:, order])
    raise ValueError(f"unknown eigensolver {method!r}")


def noise_floor(eigenvalues: np.ndarray) -> np.ndarray:
    """Rounding level ``n * eps * max|w|`` of a spectrum; eigenvalues below it are numerically zero."""
    n = eigenvalues.shape[-1]
    return n * np.finfo(float).eps * np.max(np.abs(eigenvalues), axis=-1, keepdims=True)


def support_threshold(eigenvalues: np.ndarray, cutoff: float = TOL.support_cutoff) -> float:
    top = float(np.max(np.abs(eigenvalues))) if eigenvalues.size else 0.0
    return cutoff * max(top, np.finfo(float).tiny)


def matrix_function(
    h,
    f: Callable[[np.ndarray], np.ndarray],
    support_cutoff: float | None = None,
    method: str = "lapack",
) -> np.ndarray:
    """Apply a scalar function through the spectrum, ``U f(Lambda) U^dagger``.

    With ``support_cutoff`` set, eigenvalues in ``[-c, 0)`` (``c`` relative to
    the largest eigenvalue) are clamped to zero, ``f`` is applied only to
    eigenvalues above ``c`` and the rest map to zero. This is the
    pseudo-inverse convention needed for negative and fractional powers.
    """
    w, u = eigh(h, method=method)
    if support_cutoff is None:
        with np.errstate(all="ignore"):
            fw = np.asarray(f(w), dtype=float)
    else:
        thr = support_threshold(w, support_cutoff)
        if np.any(w < -thr):
            raise MatrixDomainError(
                f"eigenvalue {w.min():.3e} is negative beyond the support cutoff {thr:.3e}"
            )
        keep = w > thr
        fw = np.zeros_like(w)
        with np.errstate(all="ignore"):
            fw[keep] = f(w[keep])
    if not np.all(np.isfinite(fw)):
        raise MatrixDomainError("function is undefined on a retained eigenvalue")
    return hermitian((u * fw) @ u.conj().T, tol=np.inf)


def matrix_power(h, p: float, support_cutoff: float = TOL.support_cutoff, method: str = "lapack") -> np.ndarray:
    """``h**p`` for PSD ``h``.

    Rounding noise in ``[-c, 0)`` is clamped to zero (``c = support_cutoff``
    relative to the largest eigenvalue). Positive powers act on every
    eigenvalue. Zero and negative powers act on the support only, so
    ``p < 0`` gives the pseudo-inverse power and ``P**p == P`` for projectors.
    """
    w, u = eigh(h, method=method)
    thr = support_threshold(w, support_cutoff)
    if w.size and w[0] < -thr:
        raise MatrixDomainError(f"eigenvalue {w[0]:.3e} is negative beyond the support cutoff {thr:.3e}")
    if p > 0:
        fw = np.where(w > noise_floor(w), np.clip(w, 0.0, None), 0.0) ** p
    else:
        keep = w > thr
        fw = np.zeros_like(w)
        fw[keep] = w[keep] ** p
    return hermitian((u * fw) @ u.conj().T, tol=np.inf)


def support_projector(h, support_cutoff: float = TOL.support_cutoff) -> np.ndarray:
    return matrix_function(h, np.ones_like, support_cutoff=support_cutoff)


def psd_power_stack(stack: np.ndarray, p: float, cutoff: float = TOL.support_cutoff) -> np.ndarray:
    """Batched :func:`matrix_power` for an ``(k, d, d)`` stack of PSD matrices.

    No Hermiticity or domain checks; the hot loops of the optimizer call this.
    """
    w, u = np.linalg.eigh(stack)
    if p > 0:
        fw = np.where(w > noise_floor(w), np.clip(w, 0.0, None), 0.0) ** p
    else:
        top = np.max(np.abs(w), axis=-1, keepdims=True)
        keep = w > cutoff * np.maximum(top, np.finfo(float).tiny)
        fw = np.where(keep, np.abs(w), 1.0) ** p * keep
    return (u * fw[..., None, :]) @ np.conj(np.swapaxes(u, -1, -2))


def real_trace(a: np.ndarray, tol: float = TOL.imag_residue) -> float:
    """Trace that must be real; an imaginary residue above ``tol`` is a bug upstream."""
    t = np.trace(a)
    if abs(t.imag) > tol * max(1.0, abs(t.real)):
        raise ArithmeticError(f"trace has imaginary residue {t.imag:.3e}")
    return float(t.real)


def psd_order_leq(a, b, tol: float = TOL.operator_inequality) -> OrderCheck:
    """Loewner comparison ``a <= b``, i.e. ``b - a`` is PSD up to ``-tol``.

    On failure the witness is the eigenvector of ``b - a`` with the most
    negative eigenvalue.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    w, u = eigh(b - a)
    holds = bool(w[0] >= -tol)
    return OrderCheck(holds, float(w[0]), None if holds else u[:, 0])
