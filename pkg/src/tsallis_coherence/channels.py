"""Kraus channels, selective measurements and the inequality checks built on them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import entropy, measures
from .config import TOL, make_rng
from .linalg import hermitian, max_abs
from .states import random_density, random_unitary


class ChannelError(ValueError):
    pass


@dataclass(frozen=True)
class KrausChannel:
    """``rho -> sum_n K_n rho K_n^dagger`` with ``sum_n K_n^dagger K_n = I``.

    Completeness is checked on construction unless ``validate=False``
    (used to build deliberately broken channels for negative controls).
    """

    kraus: tuple
    validate: bool = True

    def __post_init__(self):
        ks = tuple(np.asarray(k, dtype=complex) for k in self.kraus)
        if not ks:
            raise ChannelError("a channel needs at least one Kraus operator")
        shape = ks[0].shape
        if any(k.ndim != 2 or k.shape != shape for k in ks):
            raise ChannelError("Kraus operators must be matrices of one common shape")
        object.__setattr__(self, "kraus", ks)
        if self.validate and self.completeness_residual() > TOL.completeness:
            raise ChannelError(f"completeness violated: residual {self.completeness_residual():.3e}")

    @property
    def dim_in(self) -> int:
        return self.kraus[0].shape[1]

    @property
    def dim_out(self) -> int:
        return self.kraus[0].shape[0]

    def completeness_residual(self) -> float:
        s = sum(k.conj().T @ k for k in self.kraus)
        return max_abs(s - np.eye(self.dim_in))

    def __call__(self, rho) -> np.ndarray:
        return apply_channel(self, rho)


class Branch(NamedTuple):
    prob: float
    state: np.ndarray


def apply_channel(phi: KrausChannel, rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (phi.dim_in, phi.dim_in):
        raise ChannelError(f"state of shape {rho.shape} does not fit a channel on dimension {phi.dim_in}")
    out = sum(k @ rho @ k.conj().T for k in phi.kraus)
    return hermitian(out, tol=np.inf)


def selective_measure(phi: KrausChannel, rho, prune: float = TOL.branch_prune) -> list[Branch]:
    """Outcome ensemble ``{(p_n, K_n rho K_n^dagger / p_n)}``.

    Branches with ``p_n <= prune`` are dropped and the remaining weights
    renormalized.
    """
    rho = np.asarray(rho, dtype=complex)
    raw = []
    for k in phi.kraus:
        m = k @ rho @ k.conj().T
        p = float(np.trace(m).real)
        if p > prune:
            raw.append((p, hermitian(m / p, tol=np.inf)))
    total = sum(p for p, _ in raw)
    return [Branch(p / total, s) for p, s in raw]


def is_incoherent_channel(phi: KrausChannel, tol: float = TOL.incoherent_entry) -> bool:
    """Every Kraus operator has at most one nonzero entry per column.

    Such an operator sends each ``|j>`` to a multiple of a single ``|i>``, so
    it maps diagonal states to (unnormalized) diagonal states.
    """
    return all(np.all(np.sum(np.abs(k) > tol, axis=0) <= 1) for k in phi.kraus)


# -- constructors --------------------------------------------------------------

def identity_channel(d: int) -> KrausChannel:
    return KrausChannel((np.eye(d),))


def unitary_channel(u) -> KrausChannel:
    return KrausChannel((np.asarray(u),))


def dephasing_channel(d: int) -> KrausChannel:
    """Complete dephasing, Kraus operators ``|i><i|``."""
    return KrausChannel(tuple(np.diag(np.eye(d)[i]) for i in range(d)))


def permutation_channel(perm) -> KrausChannel:
    perm = list(perm)
    return KrausChannel((np.eye(len(perm))[perm],))


def random_unitary_mixture(d: int, n: int, seed: int = 0) -> KrausChannel:
    """Unital channel ``sum_n w_n U_n rho U_n^dagger`` with random weights and Haar unitaries."""
    rng = make_rng(seed)
    w = rng.dirichlet(np.ones(n))
    return KrausChannel(tuple(np.sqrt(wi) * random_unitary(d, rng=rng) for wi in w))


def random_incoherent_channel(d: int, n_kraus: int, seed: int = 0, rng=None) -> KrausChannel:
    """Random incoherent channel with Kraus operators ``K_n = D_n P_n``.

    ``P_n`` is a random permutation matrix and ``D_n`` a complex Gaussian
    diagonal. Columns are rescaled jointly so that ``sum K^dagger K = I``;
    column scaling preserves the diagonal-times-permutation form.
    """
    if n_kraus < 1:
        raise ValueError("need at least one Kraus operator")
    rng = make_rng(seed) if rng is None else rng
    for _ in range(100):
        ks = []
        for _ in range(n_kraus):
            diag = rng.standard_normal(d) + 1j * rng.standard_normal(d)
            ks.append(diag[:, None] * np.eye(d)[rng.permutation(d)])
        norms = np.sqrt(sum(np.sum(np.abs(k) ** 2, axis=0) for k in ks))
        if np.all(norms > 1e-8):
            return KrausChannel(tuple(k / norms for k in ks))
    raise ChannelError("could not draw a normalizable incoherent channel")


def random_cptp_channel(d: int, env_dim: int, seed: int = 0, rng=None) -> KrausChannel:
    """Stinespring channel: ``env_dim`` blocks of a random ``(d env_dim) x d`` isometry."""
    if env_dim < 1:
        raise ValueError("env_dim must be at least 1")
    rng = make_rng(seed) if rng is None else rng
    z = rng.standard_normal((d * env_dim, d)) + 1j * rng.standard_normal((d * env_dim, d))
    v, r = np.linalg.qr(z)
    v = v * (np.diag(r) / np.abs(np.diag(r)))
    return KrausChannel(tuple(v[n * d:(n + 1) * d] for n in range(env_dim)))


# -- inequality checks ---------------------------------------------------------

class InequalityCheck(NamedTuple):
    lhs: float
    rhs: float
    holds: bool

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs


def check_lemma2(rho, sigma, phi: KrausChannel, q: float, tol: float = TOL.operator_inequality) -> InequalityCheck:
    """Data processing for ``f_q``: ``f_q(Phi rho, Phi sigma) >= f_q(rho, sigma)``."""
    lhs = entropy.f_q(rho, sigma, q)
    rhs = entropy.f_q(apply_channel(phi, rho), apply_channel(phi, sigma), q, check=False)
    return InequalityCheck(lhs, rhs, rhs >= lhs - tol)


def check_lemma3(rho, sigma, phi: KrausChannel, q: float, tol: float = TOL.operator_inequality) -> InequalityCheck:
    """Ensemble bound ``f_q(rho, sigma) <= sum_n p_n^q q_n^(1-q) f_q(rho_n, sigma_n)``.

    Outcomes where either branch weight is ``<= TOL.branch_prune`` are skipped.
    """
    lhs = entropy.f_q(rho, sigma, q)
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    rhs = 0.0
    for k in phi.kraus:
        mr = k @ rho @ k.conj().T
        ms = k @ sigma @ k.conj().T
        pn = float(np.trace(mr).real)
        qn = float(np.trace(ms).real)
        if pn <= TOL.branch_prune or qn <= TOL.branch_prune:
            continue
        rhs += pn**q * qn ** (1 - q) * entropy.f_q(mr / pn, ms / qn, q, check=False)
    return InequalityCheck(lhs, rhs, rhs >= lhs - tol)


def check_strong_monotonicity(
    rho, phi: KrausChannel, q: float,
    cfg: measures.OptimizerConfig = measures.OptimizerConfig(),
    tol: float = TOL.monotonicity,
    total: float | None = None,
) -> InequalityCheck:
    """``sum_n p_n C_q(rho_n) <= C_q(rho)`` for an incoherent selective operation.

    ``lhs`` is the average over outcomes, ``rhs`` the coherence of ``rho``
    (pass ``total`` to reuse an already computed value).
    """
    if not is_incoherent_channel(phi):
        raise ChannelError("strong monotonicity is only claimed for incoherent channels")
    avg = sum(b.prob * measures.c_q(b.state, q, cfg).value for b in selective_measure(phi, rho))
    if total is None:
        total = measures.c_q(rho, q, cfg).value
    return InequalityCheck(avg, total, avg <= total + tol)


def holder_step(p, qn, f, q: float) -> InequalityCheck:
    """``(sum q_n)^(1-q) (sum p_n f_n^(1/q))^q >= sum p_n^q q_n^(1-q) f_n`` for ``q`` in ``(0, 1)``."""
    p, qn, f = (np.asarray(x, dtype=float) for x in (p, qn, f))
    big = np.sum(qn) ** (1 - q) * np.sum(p * f ** (1 / q)) ** q
    small = np.sum(p**q * qn ** (1 - q) * f)
    return InequalityCheck(small, big, big >= small - TOL.scalar_inequality)


# -- counterexample search -----------------------------------------------------

@dataclass
class Counterexample:
    trial: int
    rho: np.ndarray
    channel: KrausChannel
    average: float
    total: float

    def to_dict(self) -> dict:
        def cplx(m):
            return {"re": np.real(m).tolist(), "im": np.imag(m).tolist()}

        return {
            "trial": self.trial,
            "state": {"dim": int(self.rho.shape[0]), **cplx(self.rho)},
            "kraus": [cplx(k) for k in self.channel.kraus],
            "average": self.average,
            "total": self.total,
            "excess": self.average - self.total,
        }


def find_tsallis_alpha_violation(
    d: int, q: float, trials: int, seed: int = 0, n_kraus: int = 2,
    margin: float = 1e-6, measure=None, full_rank: bool = False,
) -> Counterexample | None:
    """Search random (state, incoherent channel) pairs for a strong-monotonicity violation.

    Looks for ``sum_n p_n C(rho_n) > C(rho) + margin``. ``measure`` defaults to
    the closed-form Tsallis alpha coherence at order ``q``; pass another
    ``rho -> float`` to run the same search on a different quantifier. Returns
    the first hit, or ``None`` (which is not a proof that none exists).

    By default the rank of each trial state is drawn uniformly from ``1..d``.
    ``full_rank=True`` restricts to rank ``d``; use it for ``C_q``, whose
    support convention makes it discontinuous at rank-deficient states.
    """
    entropy.check_alpha_q(q)
    if measure is None:
        def measure(r):
            return measures.tsallis_alpha_coherence_exact(r, q)
    for t in range(trials):
        rng = make_rng(seed, t)
        rank = int(rng.integers(1, d + 1))
        if full_rank:
            rank = d
        rho = random_density(d, rank=rank, rng=rng)
        phi = random_incoherent_channel(d, n_kraus, rng=rng)
        total = measure(rho)
        avg = sum(b.prob * measure(b.state) for b in selective_measure(phi, rho))
        if avg > total + margin:
            return Counterexample(t, rho, phi, avg, total)
    return None
