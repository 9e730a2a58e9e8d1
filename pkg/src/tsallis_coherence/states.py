"""Density matrices and incoherent states in a fixed reference basis.

Matrices are plain complex ``numpy`` arrays; a diagonal (incoherent) state
is a 1-D probability vector. Constructors return validated arrays.

Random states come from the Ginibre ensemble, ``G G^dagger / Tr(G G^dagger)``
with ``G`` a ``d x rank`` complex standard-normal matrix drawn from a
Philox stream (see :func:`tsallis_coherence.config.make_rng`).
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .config import TOL, make_rng
from .linalg import NotHermitianError, hermitian

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


class InvalidStateError(ValueError):
    """Input violates the density-matrix (or probability-vector) invariants."""


class MalformedStateFile(ValueError):
    """State file is not valid JSON or does not follow the dim/re/im schema."""


def as_density(rho, tol=TOL) -> np.ndarray:
    """Validate ``rho`` as a density matrix: Hermitian, PSD, unit trace."""
    try:
        rho = hermitian(rho, tol=tol.herm)
    except NotHermitianError as exc:
        raise InvalidStateError(str(exc)) from exc
    tr = np.trace(rho).real
    if abs(tr - 1.0) > tol.trace:
        raise InvalidStateError(f"trace is {tr!r}, expected 1")
    lam_min = np.linalg.eigvalsh(rho)[0]
    if lam_min < -tol.psd:
        raise InvalidStateError(f"not positive semidefinite (min eigenvalue {lam_min:.3e})")
    return rho


def as_probabilities(p, tol=TOL) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise InvalidStateError(f"expected a non-empty probability vector, got shape {p.shape}")
    if np.any(p < 0) or not np.all(np.isfinite(p)):
        raise InvalidStateError("probabilities must be finite and non-negative")
    if abs(p.sum() - 1.0) > tol.prob_sum:
        raise InvalidStateError(f"probabilities sum to {p.sum()!r}")
    return p


def incoherent_state(probs) -> np.ndarray:
    """Density matrix ``sum_i p_i |i><i|``."""
    return np.diag(as_probabilities(probs)).astype(complex)


def dephase(rho) -> np.ndarray:
    """Diagonal of ``rho`` as a probability vector (the fully dephased state)."""
    p = np.clip(np.real(np.diag(np.asarray(rho))), 0.0, None)
    return p / p.sum()


def is_incoherent(rho, tol: float = TOL.incoherent_offdiag) -> bool:
    rho = np.asarray(rho)
    off = rho - np.diag(np.diag(rho))
    return bool(np.all(np.abs(off) <= tol))


def density_from_bloch(c) -> np.ndarray:
    """Qubit state ``(I + c1 X + c2 Y + c3 Z) / 2``."""
    c = np.asarray(c, dtype=float)
    if c.shape != (3,):
        raise InvalidStateError("Bloch vector needs three components")
    if np.dot(c, c) > 1.0 + TOL.bloch:
        raise InvalidStateError(f"Bloch vector has norm {np.linalg.norm(c):.6g} > 1")
    rho = 0.5 * (np.eye(2, dtype=complex) + sum(ci * s for ci, s in zip(c, PAULI)))
    return hermitian(rho)


def maximally_coherent(d: int, phases=None) -> np.ndarray:
    """Projector onto ``d**-0.5 * sum_j exp(i phi_j) |j>``."""
    if d < 1:
        raise InvalidStateError("dimension must be positive")
    phases = np.zeros(d) if phases is None else np.asarray(phases, dtype=float)
    if phases.shape != (d,):
        raise InvalidStateError(f"need {d} phases, got {phases.size}")
    psi = np.exp(1j * phases) / np.sqrt(d)
    return np.outer(psi, psi.conj())


def pure_state(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def random_density(d: int, rank: int | None = None, seed: int = 0, rng=None) -> np.ndarray:
    """Seeded Ginibre state of the given rank (full rank by default).

    Pass ``rng`` to draw from an existing generator instead of ``seed``.
    """
    rank = d if rank is None else rank
    if not 1 <= rank <= d:
        raise ValueError(f"rank must lie in [1, {d}], got {rank}")
    rng = make_rng(seed) if rng is None else rng
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    return hermitian(rho, tol=np.inf)


def random_probabilities(d: int, rng) -> np.ndarray:
    return rng.dirichlet(np.ones(d))


def random_unitary(d: int, seed: int = 0, rng=None) -> np.ndarray:
    """Haar unitary from the QR decomposition of a Ginibre matrix."""
    rng = make_rng(seed) if rng is None else rng
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def block_diag(p: float, rho1, rho2) -> np.ndarray:
    """Direct sum ``p rho1 (+) (1 - p) rho2``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"weight p={p} outside [0, 1]")
    rho1 = np.asarray(rho1, dtype=complex)
    rho2 = np.asarray(rho2, dtype=complex)
    d1, d2 = rho1.shape[0], rho2.shape[0]
    out = np.zeros((d1 + d2, d1 + d2), dtype=complex)
    out[:d1, :d1] = p * rho1
    out[d1:, d1:] = (1.0 - p) * rho2
    return out


# -- state files ---------------------------------------------------------------

def state_to_json(rho) -> dict:
    rho = np.asarray(rho, dtype=complex)
    return {"dim": int(rho.shape[0]), "re": rho.real.tolist(), "im": rho.imag.tolist()}


def save_state(rho, path) -> None:
    Path(path).write_text(json.dumps(state_to_json(rho)) + "\n")


def state_from_json(obj) -> np.ndarray:
    """Parse ``{"dim": d, "re": [[...]], "im": [[...]]}`` and validate it as a density matrix.

    Schema problems raise :class:`MalformedStateFile`; a well-formed matrix
    that is not a density matrix raises :class:`InvalidStateError`.
    """
    if not isinstance(obj, dict) or not {"dim", "re", "im"} <= obj.keys():
        raise MalformedStateFile('state must be an object with keys "dim", "re", "im"')
    d = obj["dim"]
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise MalformedStateFile(f'"dim" must be a positive integer, got {d!r}')
    parts = []
    for key in ("re", "im"):
        try:
            arr = np.array(obj[key], dtype=float)
        except (TypeError, ValueError) as exc:
            raise MalformedStateFile(f'"{key}" is not a numeric matrix') from exc
        if arr.shape != (d, d):
            raise MalformedStateFile(f'"{key}" has shape {arr.shape}, expected ({d}, {d})')
        if not np.all(np.isfinite(arr)):
            raise MalformedStateFile(f'"{key}" contains non-finite values')
        parts.append(arr)
    return as_density(parts[0] + 1j * parts[1])


def load_state(path) -> np.ndarray:
    try:
        obj = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedStateFile(f"cannot read state file {path}: {exc}") from exc
    return state_from_json(obj)
