"""Tsallis relative operator entropy and the trace functionals built on it.

For positive ``rho`` and ``sigma``::

    T_q(rho||sigma) = rho^(1/2) ln_{1-q}(rho^(-1/2) sigma rho^(-1/2)) rho^(1/2)
    f_q(rho, sigma) = Tr[rho^(1/2) (rho^(-1/2) sigma rho^(-1/2))^(1-q) rho^(1/2)]
    D_q(rho||sigma) = (f_q^(1/q) - 1) / (q - 1)

with ``ln_{1-q} x = (x^(1-q) - 1) / (1 - q)``. Inverse square roots of a
singular ``rho`` are taken on its support (pseudo-inverse convention), so
for a pure state ``|phi><phi|`` one gets ``f_q = <phi|sigma|phi>^(1-q)``.

The ``*_diagonal`` factories return batched evaluators of the same
functionals for diagonal ``sigma``; the coherence optimizers call these.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .config import TOL
from .linalg import (
    MatrixDomainError,
    hermitian,
    noise_floor,
    matrix_power,
    real_trace,
    support_projector,
    support_threshold,
)


class SupportError(MatrixDomainError):
    """``supp rho`` is not contained in ``supp sigma``."""

    def __init__(self, message: str, vector: np.ndarray):
        super().__init__(message)
        self.vector = vector


def check_q(q: float, allow_zero: bool = False) -> float:
    """Validate the order of ``T_q``/``f_q`` (``[0, 1)``) or of ``D_q``/``C_q`` (``(0, 1)``)."""
    q = float(q)
    lo_ok = q >= 0 if allow_zero else q > 0
    if not (lo_ok and q < 1):
        rng = "[0, 1)" if allow_zero else "(0, 1)"
        raise ValueError(f"q out of range: {q} not in {rng}")
    return q


def check_alpha_q(q: float) -> float:
    """Validate the order of the Tsallis relative alpha entropy, ``(0, 2]`` minus 1."""
    q = float(q)
    if not (0 < q <= 2) or q == 1:
        raise ValueError(f"q out of range: {q} not in (0, 2] \\ {{1}}")
    return q


def in_measure_range(q: float) -> bool:
    """True when ``C_q`` is defined; ``q = 0`` is valid for ``T_q`` only."""
    return 0.0 < q < 1.0


def deformed_log(x, q: float):
    """``ln_{1-q} x = (x**(1-q) - 1) / (1 - q)`` for ``x > 0``, ``q`` in ``[0, 1)``."""
    q = check_q(q, allow_zero=True)
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("deformed logarithm needs x > 0")
    a = 1.0 - q
    out = np.expm1(a * np.log(x)) / a
    return float(out) if out.ndim == 0 else out


def check_support(rho, sigma, tol=TOL) -> None:
    """Raise :class:`SupportError` unless ``||(I - P_sigma) P_rho|| <= tol.support_inclusion``."""
    p_sigma = support_projector(sigma, tol.support_cutoff)
    w, u = np.linalg.eigh(hermitian(rho, tol=np.inf))
    vecs = u[:, w > support_threshold(w, tol.support_cutoff)]
    if vecs.shape[1] == 0:
        return
    leak = vecs - p_sigma @ vecs
    norms = np.linalg.norm(leak, axis=0)
    if np.linalg.norm(leak, 2) > tol.support_inclusion:
        k = int(np.argmax(norms))
        raise SupportError(
            f"supp rho is not contained in supp sigma: eigenvector {k} of rho "
            f"leaks {norms[k]:.3e} outside supp sigma",
            vecs[:, k],
        )


def _geometric_core(rho, sigma, q, check):
    """``(rho^(1/2) X^(1-q) rho^(1/2), rho)`` with ``X = rho^(-1/2) sigma rho^(-1/2)``."""
    rho = hermitian(rho)
    sigma = hermitian(sigma)
    if rho.shape != sigma.shape:
        raise ValueError(f"dimension mismatch: {rho.shape} vs {sigma.shape}")
    if check:
        check_support(rho, sigma)
    r_half = matrix_power(rho, 0.5)
    r_mhalf = matrix_power(rho, -0.5)
    x = hermitian(r_mhalf @ sigma @ r_mhalf, tol=np.inf)
    core = r_half @ matrix_power(x, 1.0 - q) @ r_half
    return hermitian(core, tol=np.inf), rho


def t_q_operator(rho, sigma, q: float, check: bool = True) -> np.ndarray:
    """Tsallis relative operator entropy ``T_q(rho||sigma)``.

    Accepts any positive matrices (not only normalized states), which the
    homogeneity and superadditivity properties need. ``q = 0`` is allowed.
    """
    q = check_q(q, allow_zero=True)
    core, rho = _geometric_core(rho, sigma, q, check)
    return (core - rho) / (1.0 - q)


def f_q(rho, sigma, q: float, check: bool = True) -> float:
    """``f_q(rho, sigma)``; equals ``Tr rho + (1 - q) Tr T_q(rho||sigma)``."""
    q = check_q(q, allow_zero=True)
    core, _ = _geometric_core(rho, sigma, q, check)
    return real_trace(core)


def d_q(rho, sigma, q: float, check: bool = True) -> float:
    """Generalized Tsallis relative operator entropy ``(f_q**(1/q) - 1) / (q - 1)``."""
    q = check_q(q)
    f = f_q(rho, sigma, q, check=check)
    return (max(f, 0.0) ** (1.0 / q) - 1.0) / (q - 1.0)


def tsallis_alpha_f(rho, sigma, q: float, check: bool = True) -> float:
    """``Tr rho^q sigma^(1-q)``; for ``q > 1`` the negative power acts on ``supp sigma``."""
    q = check_alpha_q(q)
    rho = hermitian(rho)
    sigma = hermitian(sigma)
    if check and q > 1:
        check_support(rho, sigma)
    return real_trace(matrix_power(rho, q) @ matrix_power(sigma, 1.0 - q))


def tsallis_alpha_entropy(rho, sigma, q: float, check: bool = True) -> float:
    """Tsallis relative alpha entropy ``(Tr rho^q sigma^(1-q) - 1) / (q - 1)``."""
    q = check_alpha_q(q)
    return (tsallis_alpha_f(rho, sigma, q, check=check) - 1.0) / (q - 1.0)


def fidelity(rho, sigma) -> float:
    """Uhlmann fidelity ``[Tr (rho^(1/2) sigma rho^(1/2))^(1/2)]^2``.

    Evaluated as the squared trace norm of ``rho^(1/2) sigma^(1/2)``; the
    singular values avoid the square root of rounding noise that a direct
    eigenvalue route suffers on rank-deficient inputs.
    """
    s = np.linalg.svd(matrix_power(rho, 0.5) @ matrix_power(sigma, 0.5), compute_uv=False)
    return float(np.sum(s) ** 2)


# -- batched evaluators over diagonal sigma ------------------------------------

def _support_frame(rho, cutoff=TOL.support_cutoff):
    """Eigenvalues on the support of ``rho`` and the matching eigenvector rows."""
    w, u = np.linalg.eigh(hermitian(rho))
    keep = w > support_threshold(w, cutoff)
    return w[keep], u[:, keep].conj().T  # (r,), (r, d)


def _congruence_stack(b: np.ndarray, probs: np.ndarray) -> np.ndarray:
    # b diag(p) b^dagger for each row p of probs
    return np.einsum("ri,ki,si->krs", b, probs, b.conj(), optimize=False)


def f_q_diagonal(rho, q: float) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorized ``p -> f_q(rho, diag(p))`` for a ``(k, d)`` array of weights.

    Works in the eigenbasis of ``rho`` restricted to its support: with
    ``rho = W L W^dagger`` and ``B = L^(-1/2) W^dagger``,
    ``f_q = Tr[L Y^(1-q)]`` where ``Y = B diag(p) B^dagger``. The weights need
    not be normalized, which the finite-difference gradients rely on.
    """
    q = check_q(q, allow_zero=True)
    lam, wh = _support_frame(rho)
    b = wh / np.sqrt(lam)[:, None]
    a = 1.0 - q

    def evaluate(probs):
        probs = np.atleast_2d(np.asarray(probs, dtype=float))
        mu, z = np.linalg.eigh(_congruence_stack(b, probs))
        weights = np.einsum("r,krj->kj", lam, np.abs(z) ** 2)
        mu = np.where(mu > noise_floor(mu), mu, 0.0)
        return np.sum(mu**a * weights, axis=-1)

    return evaluate


def fidelity_diagonal(rho) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorized ``p -> F(rho, diag(p))`` via singular values of ``L^(1/2) W^dagger diag(p)^(1/2)``."""
    lam, wh = _support_frame(rho)
    b = wh * np.sqrt(lam)[:, None]

    def evaluate(probs):
        probs = np.atleast_2d(np.asarray(probs, dtype=float))
        m = b[None, :, :] * np.sqrt(np.clip(probs, 0.0, None))[:, None, :]
        return np.sum(np.linalg.svd(m, compute_uv=False), axis=-1) ** 2

    return evaluate


def tsallis_alpha_f_diagonal(rho, q: float) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorized ``p -> Tr rho^q diag(p)^(1-q) = sum_i <i|rho^q|i> p_i^(1-q)``.

    Terms with ``<i|rho^q|i> = 0`` are dropped (support convention for ``q > 1``).
    """
    q = check_alpha_q(q)
    weights = np.real(np.diag(matrix_power(rho, q)))
    active = weights > 0

    def evaluate(probs):
        probs = np.atleast_2d(np.asarray(probs, dtype=float))[:, active]
        with np.errstate(divide="ignore"):
            return np.sum(probs ** (1.0 - q) * weights[active], axis=-1)

    return evaluate
