"""Seeded Monte-Carlo suites for every operator inequality and coherence axiom.

Each suite returns a :class:`SuiteResult`. ``worst_margin`` is the smallest
slack seen: for an inequality ``a <= b`` it is ``b - a``, for an identity it
is minus the residual. Hard suites fail the run when any trial misses its
tolerance; census suites (``hard=False``) only report a satisfaction count.

Every trial draws from its own Philox stream keyed by ``(seed, suite, d,
trial)``, so suites can be run alone or in any order with identical results.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from . import channels as ch
from . import entropy, measures
from .config import TOL, make_rng
from .linalg import max_abs, psd_order_leq
from .states import (
    block_diag,
    density_from_bloch,
    incoherent_state,
    dephase,
    is_incoherent,
    maximally_coherent,
    random_density,
    random_unitary,
)

MAX_DUMPS = 3


def _cplx(m):
    m = np.asarray(m)
    return {"re": np.real(m).tolist(), "im": np.imag(m).tolist()}


@dataclass
class SuiteResult:
    name: str
    hard: bool = True
    trials: int = 0
    passes: int = 0
    worst_margin: float | None = None
    counterexamples: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.hard or self.passes == self.trials

    @property
    def rate(self) -> float:
        return self.passes / self.trials if self.trials else 1.0

    def record(self, margin: float, holds: bool, **dump) -> None:
        self.trials += 1
        self.passes += bool(holds)
        if self.worst_margin is None or margin < self.worst_margin:
            self.worst_margin = float(margin)
        if not holds and len(self.counterexamples) < MAX_DUMPS:
            self.counterexamples.append({"margin": float(margin), **dump})

    def record_error(self, exc: Exception, **dump) -> None:
        self.trials += 1
        if len(self.counterexamples) < MAX_DUMPS:
            self.counterexamples.append({"error": f"{type(exc).__name__}: {exc}", **dump})

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "hard": self.hard,
            "trials": self.trials,
            "passes": self.passes,
            "worst_margin": self.worst_margin,
            "counterexamples": self.counterexamples,
        }


def _rng(seed, name, *keys):
    return make_rng(seed, zlib.crc32(name.encode()), *keys)


def _min_eig(a) -> float:
    return float(np.linalg.eigvalsh(0.5 * (a + a.conj().T))[0])


# -- scalar suites -------------------------------------------------------------

def deformed_log_sandwich(samples: int, seed: int = 0) -> SuiteResult:
    """``1 - 1/x <= ln_{1-q} x <= x - 1`` on ``(0, 10] x (0, 1)``."""
    res = SuiteResult("deformed_log_sandwich")
    if samples == 0:
        return res
    rng = _rng(seed, res.name)
    x = rng.uniform(0.0, 10.0, samples)
    x[x == 0] = 10.0
    q = rng.uniform(0.0, 1.0, samples)
    q[q == 0] = 0.5
    val = np.array([entropy.deformed_log(xi, qi) for xi, qi in zip(x, q)])
    margins = np.minimum(val - (1 - 1 / x), (x - 1) - val)
    for i, m in enumerate(margins):
        res.record(m, m >= -TOL.scalar_inequality, x=float(x[i]), q=float(q[i]))
    return res


def holder_step(samples: int, seed: int = 0) -> SuiteResult:
    """``(sum q_n)^(1-q) (sum p_n f_n^(1/q))^q >= sum p_n^q q_n^(1-q) f_n``."""
    res = SuiteResult("holder_step")
    for t in range(samples):
        rng = _rng(seed, res.name, t)
        n = int(rng.integers(1, 7))
        p, qn, f = rng.uniform(0, 1, (3, n))
        q = float(rng.uniform(0.01, 0.99))
        c = ch.holder_step(p, qn, f, q)
        res.record(c.margin, c.holds, p=p.tolist(), qn=qn.tolist(), f=f.tolist(), q=q)
    return res


# -- operator suites -----------------------------------------------------------

def _pair(rng, d):
    return random_density(d, rng=rng), random_density(d, rng=rng)


def tq_sandwich(trials: int, dims=(2, 3, 4), qs=(0.2, 0.5, 0.8), seed: int = 0) -> list[SuiteResult]:
    """``rho - rho sigma^-1 rho <= T_q(rho||sigma) <= sigma - rho`` and ``T_q(rho||rho) = 0``."""
    lower = SuiteResult("tq_sandwich_lower")
    upper = SuiteResult("tq_sandwich_upper")
    zero = SuiteResult("tq_self_divergence_zero")
    tol = TOL.operator_inequality
    for t in range(trials):
        rng = _rng(seed, "tq_sandwich", t)
        d = dims[t % len(dims)]
        q = qs[(t // len(dims)) % len(qs)]
        rho, sigma = _pair(rng, d)
        dump = {"d": d, "q": q, "rho": _cplx(rho), "sigma": _cplx(sigma)}
        T = entropy.t_q_operator(rho, sigma, q)
        lo = _min_eig(T - (rho - rho @ np.linalg.inv(sigma) @ rho))
        hi = _min_eig((sigma - rho) - T)
        lower.record(lo, lo >= -tol, **dump)
        upper.record(hi, hi >= -tol, **dump)
        z = max_abs(entropy.t_q_operator(rho, rho, q))
        zero.record(-z, z <= 1e-10, **dump)
    return [lower, upper, zero]


def tq_properties(trials: int, dims=(2, 3, 4), seed: int = 0) -> list[SuiteResult]:
    """Homogeneity, monotonicity in sigma, superadditivity, joint concavity, unitary covariance."""
    names = ["tq_homogeneity", "tq_monotonicity", "tq_superadditivity",
             "tq_joint_concavity", "tq_unitary_covariance"]
    out = {n: SuiteResult(n) for n in names}
    tol = TOL.operator_inequality
    T = entropy.t_q_operator
    for t in range(trials):
        rng = _rng(seed, "tq_properties", t)
        d = dims[t % len(dims)]
        q = float(rng.uniform(0.05, 0.95))
        r1, s1 = _pair(rng, d)
        r2, s2 = _pair(rng, d)
        dump = {"d": d, "q": q, "rho": _cplx(r1), "sigma": _cplx(s1)}
        base = T(r1, s1, q)

        alpha = (0.5, 2.0)[t % 2]
        res = max_abs(T(alpha * r1, alpha * s1, q) - alpha * base)
        out["tq_homogeneity"].record(-res, res <= tol, alpha=alpha, **dump)

        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        tau = s1 + float(rng.uniform(0.01, 1.0)) * (g @ g.conj().T) / d
        m = psd_order_leq(base, T(r1, tau, q), tol).min_eigenvalue
        out["tq_monotonicity"].record(m, m >= -tol, **dump)

        m = psd_order_leq(base + T(r2, s2, q), T(r1 + r2, s1 + s2, q), tol).min_eigenvalue
        out["tq_superadditivity"].record(m, m >= -tol, **dump)

        a = float(rng.uniform(0, 1))
        mix = T(a * r1 + (1 - a) * r2, a * s1 + (1 - a) * s2, q)
        m = psd_order_leq(a * base + (1 - a) * T(r2, s2, q), mix, tol).min_eigenvalue
        out["tq_joint_concavity"].record(m, m >= -tol, a=a, **dump)

        u = random_unitary(d, rng=rng)
        rot = T(u @ r1 @ u.conj().T, u @ s1 @ u.conj().T, q)
        res = max_abs(rot - u @ base @ u.conj().T)
        out["tq_unitary_covariance"].record(-res, res <= tol, **dump)
    return [out[n] for n in names]


def unital_trace(trials: int, dims=(2, 3, 4), seed: int = 0) -> SuiteResult:
    """``Tr Phi(T_q(rho||sigma)) <= Tr T_q(Phi rho||Phi sigma)`` for unital channels."""
    res = SuiteResult("unital_trace_inequality")
    for t in range(trials):
        rng = _rng(seed, res.name, t)
        d = dims[t % len(dims)]
        q = float(rng.uniform(0.05, 0.95))
        rho, sigma = _pair(rng, d)
        if t % 2:
            phi, kind = ch.dephasing_channel(d), "dephasing"
        else:
            phi, kind = ch.random_unitary_mixture(d, int(rng.integers(1, 4)), seed=int(rng.integers(2**31))), "unitary-mixture"
        lhs = np.trace(ch.apply_channel(phi, entropy.t_q_operator(rho, sigma, q))).real
        rhs = np.trace(entropy.t_q_operator(phi(rho), phi(sigma), q)).real
        res.record(rhs - lhs, rhs - lhs >= -TOL.operator_inequality, channel=kind, d=d, q=q)
    return res


def functional_identities(trials: int, dims=(2, 3, 4), seed: int = 0) -> list[SuiteResult]:
    """``f_q = 1 + (1-q) Tr T_q``, ALT bound ``f_1/2^2 <= F``, fidelity symmetry."""
    cons = SuiteResult("fq_trace_consistency")
    alt = SuiteResult("alt_inequality")
    sym = SuiteResult("fidelity_symmetry")
    for t in range(trials):
        rng = _rng(seed, "functional_identities", t)
        d = dims[t % len(dims)]
        q = float(rng.uniform(0.05, 0.95))
        rho, sigma = _pair(rng, d)
        dump = {"d": d, "q": q, "rho": _cplx(rho), "sigma": _cplx(sigma)}
        r = abs(entropy.f_q(rho, sigma, q) - 1 - (1 - q) * np.trace(entropy.t_q_operator(rho, sigma, q)).real)
        cons.record(-r, r <= 1e-10, **dump)
        F = entropy.fidelity(rho, sigma)
        m = F - entropy.f_q(rho, sigma, 0.5) ** 2
        alt.record(m, m >= -1e-10, **dump)
        r = abs(F - entropy.fidelity(sigma, rho))
        sym.record(-r, r <= TOL.operator_inequality, **dump)
    return [cons, alt, sym]


# -- channel suites ------------------------------------------------------------

ChannelFactory = Callable[[int, int, np.random.Generator], ch.KrausChannel]


def _default_factory(d, n, rng):
    return ch.random_incoherent_channel(d, n, rng=rng)


def channel_completeness(trials: int, dims=(2, 3), seed: int = 0,
                         factory: ChannelFactory = _default_factory) -> SuiteResult:
    res = SuiteResult("channel_completeness")
    for d in dims:
        for t in range(trials):
            rng = _rng(seed, res.name, d, t)
            phi = factory(d, int(rng.integers(1, 4)), rng)
            cptp = ch.random_cptp_channel(d, int(rng.integers(1, 4)), rng=rng)
            r = max(phi.completeness_residual(), cptp.completeness_residual())
            ok = r <= TOL.completeness and ch.is_incoherent_channel(phi)
            res.record(-r, ok, d=d, kraus=[_cplx(k) for k in phi.kraus])
    return res


def _structured_channels(d, rng):
    return [("identity", ch.identity_channel(d)),
            ("unitary", ch.unitary_channel(random_unitary(d, rng=rng))),
            ("dephasing", ch.dephasing_channel(d))]


def channel_inequalities(trials: int, dims=(2, 3, 4), seed: int = 0) -> list[SuiteResult]:
    """Data processing of ``f_q`` and its selective-measurement ensemble bound.

    Structured channels (identity, unitary, dephasing) on full-rank pairs are
    hard assertions. The census draws ``rho`` of random rank, a full-rank
    ``sigma`` and a random Stinespring or incoherent channel, and only counts.
    """
    l2 = SuiteResult("data_processing_structured")
    l3 = SuiteResult("ensemble_bound_structured")
    l2c = SuiteResult("data_processing_census", hard=False)
    l3c = SuiteResult("ensemble_bound_census", hard=False)
    for t in range(trials):
        rng = _rng(seed, "channel_inequalities", t)
        d = dims[t % len(dims)]
        q = float(rng.uniform(0.05, 0.95))
        rho, sigma = _pair(rng, d)
        for kind, phi in _structured_channels(d, rng):
            dump = {"channel": kind, "d": d, "q": q, "rho": _cplx(rho), "sigma": _cplx(sigma)}
            c = ch.check_lemma2(rho, sigma, phi, q)
            l2.record(c.margin, c.holds, **dump)
            c = ch.check_lemma3(rho, sigma, phi, q)
            l3.record(c.margin, c.holds, **dump)
        rank = int(rng.integers(1, d + 1))
        rho_c = random_density(d, rank=rank, rng=rng)
        if t % 2:
            phi, kind = ch.random_cptp_channel(d, int(rng.integers(1, 4)), rng=rng), "cptp"
        else:
            phi, kind = ch.random_incoherent_channel(d, int(rng.integers(1, 4)), rng=rng), "incoherent"
        dump = {"channel": kind, "d": d, "q": q, "rank": rank, "rho": _cplx(rho_c), "sigma": _cplx(sigma),
                "kraus": [_cplx(k) for k in phi.kraus]}
        c = ch.check_lemma2(rho_c, sigma, phi, q)
        l2c.record(c.margin, c.holds, **dump)
        c = ch.check_lemma3(rho_c, sigma, phi, q)
        l3c.record(c.margin, c.holds, **dump)
    return [l2, l3, l2c, l3c]


# -- coherence axioms ----------------------------------------------------------

AXIOM_SUITES = ["c1_faithfulness", "c2_monotonicity", "c3_strong_monotonicity",
                "c4_convexity", "c5_block_additivity", "cq_upper_bound"]


def axioms(trials: int, dims=(2, 3), seed: int = 0,
           cfg: measures.OptimizerConfig = measures.OptimizerConfig(),
           factory: ChannelFactory = _default_factory) -> list[SuiteResult]:
    """(C1)-(C5) and the maximal-coherence bound for ``C_q`` on full-rank random states.

    ``q`` is drawn uniformly from ``[0.1, 0.9]`` per trial.
    """
    out = {n: SuiteResult(n) for n in AXIOM_SUITES}
    for d in dims:
        for t in range(trials):
            rng = _rng(seed, "axioms", d, t)
            q = float(rng.uniform(0.1, 0.9))
            rho = random_density(d, rng=rng)
            dump = {"d": d, "trial": t, "q": q, "rho": _cplx(rho)}
            cq = lambda r: measures.c_q(r, q, cfg).value  # noqa: E731
            before = {n: out[n].trials for n in AXIOM_SUITES}
            try:
                phi = factory(d, int(rng.integers(1, 4)), rng)
                rho2 = random_density(d, rng=rng)
                p = float(rng.uniform(0, 1))
                d2 = int(rng.integers(1, d + 1))
                rho_b = random_density(d2, rng=rng)
                p_b = float(rng.uniform(0.05, 0.95))
                c_rho = cq(rho)
                inc = incoherent_state(dephase(rho))
                c_inc = cq(inc)
                ok = ((c_rho <= TOL.zero_coherence) == is_incoherent(rho, TOL.incoherent_offdiag)
                      and (c_inc <= TOL.zero_coherence) == is_incoherent(inc, TOL.incoherent_offdiag))
                out["c1_faithfulness"].record(min(c_rho - TOL.zero_coherence, TOL.zero_coherence - c_inc), ok, **dump)

                bound = measures.c_q_max(d, q)
                out["cq_upper_bound"].record(bound - c_rho, c_rho <= bound + TOL.zero_coherence, **dump)

                m = c_rho - cq(ch.apply_channel(phi, rho))
                out["c2_monotonicity"].record(m, m >= -TOL.monotonicity, **dump)

                sm = ch.check_strong_monotonicity(rho, phi, q, cfg, total=c_rho)
                out["c3_strong_monotonicity"].record(sm.margin, sm.margin >= -TOL.monotonicity,
                                                     kraus=[_cplx(k) for k in phi.kraus], **dump)

                m = p * c_rho + (1 - p) * cq(rho2) - cq(p * rho + (1 - p) * rho2)
                out["c4_convexity"].record(m, m >= -TOL.monotonicity, p=p, rho2=_cplx(rho2), **dump)

                defect = abs(cq(block_diag(p_b, rho, rho_b)) - p_b * c_rho - (1 - p_b) * cq(rho_b))
                out["c5_block_additivity"].record(-defect, defect <= TOL.additivity, p=p_b,
                                                  rho2=_cplx(rho_b), **dump)
            except Exception as exc:  # a crash is a failed trial, never a skipped one
                for name in AXIOM_SUITES:
                    if out[name].trials == before[name]:
                        out[name].record_error(exc, **dump)
    return [out[n] for n in AXIOM_SUITES]


def maximal_coherence(dims=range(2, 7), qs=np.round(np.arange(0.1, 1.0, 0.1), 10),
                      cfg: measures.OptimizerConfig = measures.OptimizerConfig(), tol: float = 1e-6) -> SuiteResult:
    """``C_q`` of the maximally coherent state equals ``(d^((q-1)/q) - 1)/(q - 1)``."""
    res = SuiteResult("maximal_coherence_closed_form")
    for d in dims:
        for q in qs:
            err = abs(measures.c_q(maximally_coherent(d), float(q), cfg).value - measures.c_q_max(d, float(q)))
            res.record(-err, err <= tol, d=int(d), q=float(q))
    return res


def _random_bloch(rng, radius=None):
    v = rng.standard_normal(3)
    v /= np.linalg.norm(v)
    return v * (rng.uniform(0, 1) ** (1 / 3) if radius is None else radius)


def half_vs_geometric(trials: int, seed: int = 0,
                      cfg: measures.OptimizerConfig = measures.OptimizerConfig()) -> list[SuiteResult]:
    """``C_1/2 = 2 C_g`` on pure qubits, ``C_1/2 >= 2 C_g`` on well-mixed qubits.

    The strict gap ``> 1e-6`` is only a census: when the Bloch vector has
    ``c3 = 0`` the optimal sigma is ``I/2``, which commutes with ``rho``, and
    the two sides coincide exactly. Near that plane the gap is ``O(c3^2)``.
    """
    pure = SuiteResult("c_half_equals_2cg_pure")
    ge = SuiteResult("c_half_geq_2cg_mixed")
    strict = SuiteResult("c_half_gt_2cg_mixed", hard=False)
    for t in range(trials):
        rng = _rng(seed, "half_vs_geometric", t)
        c = _random_bloch(rng, radius=1.0)
        rho = density_from_bloch(c)
        diff = measures.c_half(rho, cfg).value - 2 * measures.geometric_coherence(rho, cfg).value
        pure.record(-abs(diff), abs(diff) <= 1e-6, bloch=c.tolist())
        while True:
            c = _random_bloch(rng)
            if (1 - np.linalg.norm(c)) / 2 > 0.05:
                break
        rho = density_from_bloch(c)
        diff = measures.c_half(rho, cfg).value - 2 * measures.geometric_coherence(rho, cfg).value
        ge.record(diff, diff >= -1e-8, bloch=c.tolist())
        strict.record(diff - 1e-6, diff > 1e-6, bloch=c.tolist())
    return [pure, ge, strict]


def pure_qubit_fidelity(trials: int, seed: int = 0) -> SuiteResult:
    """``F(rho, diag(p1, p2)) = (1 + c3)/2 p1 + (1 - c3)/2 p2`` for pure qubits."""
    res = SuiteResult("pure_qubit_fidelity")
    for t in range(trials):
        rng = _rng(seed, res.name, t)
        c = _random_bloch(rng, radius=1.0)
        p1 = float(rng.uniform(0, 1))
        expected = (1 + c[2]) / 2 * p1 + (1 - c[2]) / 2 * (1 - p1)
        err = abs(entropy.fidelity(density_from_bloch(c), np.diag([p1, 1 - p1])) - expected)
        res.record(-err, err <= 1e-9, bloch=c.tolist(), p1=p1)
    return res


def optimizer_oracle(trials: int, seed: int = 0,
                     cfg: measures.OptimizerConfig = measures.OptimizerConfig(),
                     tol: float = 1e-5, refine: bool = True) -> list[SuiteResult]:
    """Multistart optimizer against a brute-force grid over qubit diagonal states.

    ``refine=False`` compares with the bare grid maximum.
    """
    out = [SuiteResult("oracle_cq"), SuiteResult("oracle_tsallis_alpha"), SuiteResult("oracle_cg")]
    for t in range(trials):
        rng = _rng(seed, "optimizer_oracle", t)
        rho = random_density(2, rank=int(rng.integers(1, 3)), rng=rng)
        q = float(rng.uniform(0.1, 0.9))
        qa = float(rng.choice([rng.uniform(0.1, 0.9), rng.uniform(1.1, 2.0)]))
        dump = {"rho": _cplx(rho), "q": q}

        fq = entropy.f_q_diagonal(rho, q)
        _, fbest = measures.grid_maximize_qubit(lambda p: fq(p)[0], cfg.grid_points, refine)
        err = abs(measures.c_q(rho, q, cfg).value - measures.d_q_from_f(fbest, q))
        out[0].record(-err, err <= tol, **dump)

        ft = entropy.tsallis_alpha_f_diagonal(rho, qa)
        sign = 1.0 if qa < 1 else -1.0
        _, fbest = measures.grid_maximize_qubit(lambda p: sign * ft(p)[0], cfg.grid_points, refine)
        err = abs(measures.tsallis_alpha_coherence(rho, qa, cfg).value - (sign * fbest - 1) / (qa - 1))
        out[1].record(-err, err <= tol, alpha_q=qa, **dump)

        fid = entropy.fidelity_diagonal(rho)
        _, fbest = measures.grid_maximize_qubit(lambda p: fid(p)[0], cfg.grid_points, refine)
        err = abs(measures.geometric_coherence(rho, cfg).value - (1 - fbest))
        out[2].record(-err, err <= tol, **dump)
    return out


def tsallis_alpha_search(trials: int, dims=(2, 3), qs=(0.2, 0.5, 2.0), seed: int = 0) -> SuiteResult:
    """Census: does a random search find strong-monotonicity violations of the alpha measure?"""
    res = SuiteResult("tsallis_alpha_violation_search", hard=False)
    for d in dims:
        for q in qs:
            hit = ch.find_tsallis_alpha_violation(d, q, trials, seed=seed)
            # "passes" counts (d, q) cells where a violation was exhibited
            margin = 0.0 if hit is None else hit.average - hit.total
            res.record(margin, hit is not None, d=d, q=q,
                       **({} if hit is None else {"counterexample": hit.to_dict()}))
    return res


# -- driver --------------------------------------------------------------------

def run_all(trials: int = 200, dims: Iterable[int] = (2, 3), seed: int = 0,
            cfg: measures.OptimizerConfig = measures.OptimizerConfig(),
            factory: ChannelFactory = _default_factory) -> list[SuiteResult]:
    """Every suite with ``trials`` trials each (per dimension where dimension-indexed)."""
    dims = tuple(dims)
    op_dims = tuple(sorted(set(dims) | {4})) if dims else (2, 3, 4)
    suites: list[SuiteResult] = [
        deformed_log_sandwich(trials, seed),
        holder_step(trials, seed),
        *tq_sandwich(trials, op_dims, seed=seed),
        *tq_properties(trials, op_dims, seed),
        unital_trace(trials, op_dims, seed),
        *functional_identities(trials, op_dims, seed),
        channel_completeness(trials, dims, seed, factory),
        *channel_inequalities(trials, op_dims, seed),
        *axioms(trials, dims, seed, cfg, factory),
        *half_vs_geometric(trials, seed, cfg),
        pure_qubit_fidelity(trials, seed),
        *optimizer_oracle(min(trials, 50), seed, cfg),
    ]
    if trials:
        suites.append(maximal_coherence(cfg=cfg))
        suites.append(tsallis_alpha_search(trials, dims, seed=seed))
    return suites


def report(suites: list[SuiteResult]) -> dict:
    return {
        "schema_version": 1,
        "suites": [s.to_dict() for s in suites],
        "overall": "pass" if all(s.ok for s in suites) else "fail",
    }
