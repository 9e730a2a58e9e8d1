"""Coherence quantifiers as optimizations over incoherent (diagonal) states.

``C_q(rho) = min_sigma D_q(rho||sigma)`` is computed as a maximization of
``f_q(rho, sigma)`` over the probability simplex: for ``q`` in ``(0, 1)`` the
factor ``1/(q - 1)`` is negative, so the minimizer of ``D_q`` is the
maximizer of ``f_q``, which is concave in ``sigma``. The same ascent serves
the geometric coherence (maximize fidelity) and the Tsallis relative alpha
entropy of coherence.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from . import entropy
from .config import TOL, make_rng
from .linalg import matrix_power
from .states import dephase


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 8
    max_iters: int = 500
    grad_step: float = 1e-6
    conv_tol: float = 1e-9
    prob_floor: float = 1e-12
    grid_points: int = 2001
    seed: int = 0

    def __post_init__(self):
        for name in ("restarts", "max_iters", "grad_step", "conv_tol", "prob_floor", "grid_points"):
            if getattr(self, name) <= 0:
                raise ValueError(f"OptimizerConfig.{name} must be positive")


@dataclass
class OptimizationResult:
    point: np.ndarray
    value: float
    iterations: int
    converged: bool
    history: list[float] = field(default_factory=list)


@dataclass
class MeasureReport:
    """Value of a coherence measure with the incoherent state that attains it."""

    measure: str
    value: float
    optimal_sigma: np.ndarray
    q: float | None
    iterations: int
    converged: bool
    objective_history: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "measure": self.measure,
            "q": self.q,
            "value": self.value,
            "optimal_sigma": [float(x) for x in self.optimal_sigma],
            "converged": self.converged,
            "iterations": self.iterations,
        }


# -- simplex optimizer ---------------------------------------------------------

def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto ``{p >= 0, sum p = 1}`` (sort-based)."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    k = np.arange(1, v.size + 1)
    rho = np.nonzero(u - css / k > 0)[0][-1]
    return np.maximum(v - css[rho] / (rho + 1), 0.0)


def _floor(p: np.ndarray, floor: float) -> np.ndarray:
    p = np.maximum(p, floor)
    return p / p.sum()


def _as_batched(objective, vectorized):
    if vectorized:
        return lambda pts: np.asarray(objective(pts), dtype=float)
    return lambda pts: np.array([objective(p) for p in pts], dtype=float)


def _fd_gradient(evaluate, p, fp, h):
    # central differences, forward ones for coordinates too close to the boundary
    d = p.size
    central = p > h
    plus = p + h * np.eye(d)
    minus = p - h * np.eye(d)
    minus[~central] = p
    vals = evaluate(np.vstack([plus, minus[central]]))
    fplus = vals[:d]
    fminus = np.full(d, fp)
    fminus[central] = vals[d:]
    return (fplus - fminus) / np.where(central, 2 * h, h)


def _ascend(evaluate, start, cfg: OptimizerConfig) -> OptimizationResult:
    p = _floor(project_simplex(start), cfg.prob_floor)
    f = float(evaluate(p[None])[0])
    history = [f]
    step = 1.0
    g = _fd_gradient(evaluate, p, f, cfg.grad_step)
    converged = False
    it = 0
    for it in range(1, cfg.max_iters + 1):
        t = step
        while True:
            pn = _floor(project_simplex(p + t * g), cfg.prob_floor)
            fn = float(evaluate(pn[None])[0])
            if fn >= f + 1e-4 * np.dot(g, pn - p):
                break
            t *= 0.5
            if t < 1e-16:
                pn, fn = p, f
                break
        gn = _fd_gradient(evaluate, pn, fn, cfg.grad_step)
        s = pn - p
        y = gn - g
        gain = fn - f
        p, f, g = pn, fn, gn
        history.append(f)
        mapping = np.max(np.abs(project_simplex(p + g) - p))
        if gain <= cfg.conv_tol * max(1.0, abs(f)) and mapping <= np.sqrt(cfg.conv_tol):
            converged = True
            break
        sy = -np.dot(s, y)
        step = float(np.clip(np.dot(s, s) / sy, 1e-8, 1e8)) if sy > 0 else min(2.0 * t, 1e8)
    return OptimizationResult(p, f, it, converged, history)


def optimize_over_simplex(
    objective: Callable,
    d: int,
    cfg: OptimizerConfig = OptimizerConfig(),
    initial=(),
    vectorized: bool = False,
) -> OptimizationResult:
    """Maximize a concave function over the probability simplex.

    Projected-gradient ascent with finite-difference gradients, Armijo
    backtracking and Barzilai-Borwein step lengths, restarted from the uniform
    distribution, every point in ``initial`` and seeded Dirichlet draws until
    ``cfg.restarts`` starts have run. The objective is evaluated slightly off
    the simplex (unnormalized, non-negative weights) by the gradient stencil.

    Parameters
    ----------
    objective
        ``p -> float``, or ``(k, d) -> (k,)`` when ``vectorized`` is true.
    initial
        Extra starting points, tried right after the uniform start.

    Returns the best point found; ``converged`` is true if any start met the
    stopping rule.
    """
    evaluate = _as_batched(objective, vectorized)
    if d == 1:
        p = np.ones(1)
        return OptimizationResult(p, float(evaluate(p[None])[0]), 0, True, [])
    rng = make_rng(cfg.seed, d)
    starts = [np.full(d, 1.0 / d), *[np.asarray(s, dtype=float) for s in initial]]
    while len(starts) < cfg.restarts:
        starts.append(rng.dirichlet(np.ones(d)))
    best = None
    iterations = 0
    any_converged = False
    for s in starts[: max(cfg.restarts, 1 + len(initial))]:
        res = _ascend(evaluate, s, cfg)
        iterations += res.iterations
        any_converged |= res.converged
        if best is None or res.value > best.value:
            best = res
    return OptimizationResult(best.point, best.value, iterations, any_converged, best.history)


def grid_maximize_qubit(objective: Callable, points: int = 2001, refine: bool = True) -> tuple[np.ndarray, float]:
    """Brute-force maximum of ``p -> objective((p, 1 - p))`` over ``p`` in ``[0, 1]``.

    Scans a uniform grid (endpoints nudged inside by ``1e-12``). With
    ``refine`` the best cell and its neighbours are then searched by bounded
    Brent iteration, which removes the ``O(1/points)`` grid error when the
    maximizer sits near a boundary where the objective is steep.
    """
    ps = np.clip(np.linspace(0.0, 1.0, points), 1e-12, 1 - 1e-12)
    vals = np.array([objective(np.array([p, 1 - p])) for p in ps])
    k = int(np.argmax(vals))
    best_p, best_v = ps[k], float(vals[k])
    if refine:
        lo, hi = ps[max(k - 1, 0)], ps[min(k + 1, points - 1)]
        r = minimize_scalar(lambda p: -objective(np.array([p, 1 - p])), bounds=(lo, hi),
                            method="bounded", options={"xatol": 1e-13})
        if -r.fun > best_v:
            best_p, best_v = float(r.x), float(-r.fun)
    return np.array([best_p, 1 - best_p]), best_v


# -- measures ------------------------------------------------------------------

def _clamp(value: float) -> float:
    return 0.0 if -TOL.clamp_negative <= value <= 0.0 else value


def _maximize_diag(evaluate, rho, cfg):
    return optimize_over_simplex(evaluate, rho.shape[0], cfg, initial=[dephase(rho)], vectorized=True)


def d_q_from_f(f: float, q: float) -> float:
    return (max(f, 0.0) ** (1.0 / q) - 1.0) / (q - 1.0)


def c_q(rho, q: float, cfg: OptimizerConfig = OptimizerConfig()) -> MeasureReport:
    """Coherence ``C_q(rho) = min over incoherent sigma of D_q(rho||sigma)``, ``q`` in ``(0, 1)``."""
    q = entropy.check_q(q)
    rho = np.asarray(rho, dtype=complex)
    res = _maximize_diag(entropy.f_q_diagonal(rho, q), rho, cfg)
    return MeasureReport("cq", _clamp(d_q_from_f(res.value, q)), res.point, q,
                         res.iterations, res.converged, res.history)


def c_q_max(d: int, q: float) -> float:
    """Largest value of ``C_q`` in dimension ``d``, attained by maximally coherent states."""
    q = entropy.check_q(q)
    if d < 1:
        raise ValueError("dimension must be positive")
    return (d ** ((q - 1.0) / q) - 1.0) / (q - 1.0)


def c_half(rho, cfg: OptimizerConfig = OptimizerConfig()) -> MeasureReport:
    """``C_1/2(rho) = min_sigma 2 (1 - f_1/2(rho, sigma)**2)``."""
    rho = np.asarray(rho, dtype=complex)
    res = _maximize_diag(entropy.f_q_diagonal(rho, 0.5), rho, cfg)
    value = 2.0 * (1.0 - res.value**2)
    return MeasureReport("c-half", _clamp(value), res.point, 0.5, res.iterations, res.converged, res.history)


def geometric_coherence(rho, cfg: OptimizerConfig = OptimizerConfig()) -> MeasureReport:
    """``C_g(rho) = 1 - max_sigma F(rho, sigma)``."""
    rho = np.asarray(rho, dtype=complex)
    res = _maximize_diag(entropy.fidelity_diagonal(rho), rho, cfg)
    return MeasureReport("cg", _clamp(1.0 - res.value), res.point, None,
                         res.iterations, res.converged, res.history)


def tsallis_alpha_coherence(rho, q: float, cfg: OptimizerConfig = OptimizerConfig()) -> MeasureReport:
    """``min_delta D~_q(rho||delta)`` over incoherent ``delta`` by direct search.

    For ``q < 1`` this maximizes ``Tr rho^q delta^(1-q)``; for ``q > 1`` it
    maximizes the negative of the same trace (concave there as well).
    """
    q = entropy.check_alpha_q(q)
    rho = np.asarray(rho, dtype=complex)
    ftilde = entropy.tsallis_alpha_f_diagonal(rho, q)
    sign = 1.0 if q < 1 else -1.0
    res = _maximize_diag(lambda pts: sign * ftilde(pts), rho, cfg)
    f = sign * res.value
    return MeasureReport("tsallis-alpha", _clamp((f - 1.0) / (q - 1.0)), res.point, q,
                         res.iterations, res.converged, [sign * v for v in res.history])


def tsallis_alpha_coherence_exact(rho, q: float) -> float:
    """Closed form of the Tsallis alpha coherence.

    Optimizing ``sum_i a_i delta_i^(1-q)`` over the simplex by Hoelder's
    inequality gives ``(sum_i a_i^(1/q))^q`` with ``a_i = <i|rho^q|i>``.
    """
    q = entropy.check_alpha_q(q)
    a = np.clip(np.real(np.diag(matrix_power(rho, q))), 0.0, None)
    return _clamp((np.sum(a ** (1.0 / q)) ** q - 1.0) / (q - 1.0))


def l1_coherence(rho) -> float:
    rho = np.asarray(rho)
    return float(np.sum(np.abs(rho)) - np.sum(np.abs(np.diag(rho))))


def von_neumann_entropy(rho) -> float:
    """Base-2 von Neumann entropy."""
    w = np.linalg.eigvalsh(np.asarray(rho))
    w = w[w > 1e-15]
    return float(-np.sum(w * np.log2(w)))


def rel_entropy_coherence(rho) -> float:
    """``S(diag rho) - S(rho)`` in bits."""
    p = np.real(np.diag(np.asarray(rho)))
    p = p[p > 1e-15]
    return _clamp(float(-np.sum(p * np.log2(p))) - von_neumann_entropy(rho))


MEASURES = {
    "cq": lambda rho, q, cfg: c_q(rho, q, cfg),
    "c-half": lambda rho, q, cfg: c_half(rho, cfg),
    "cg": lambda rho, q, cfg: geometric_coherence(rho, cfg),
    "tsallis-alpha": lambda rho, q, cfg: tsallis_alpha_coherence(rho, q, cfg),
}
