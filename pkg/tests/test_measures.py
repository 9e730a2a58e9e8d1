import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import full_rank_states, orders, seeds
from tsallis_coherence import channels as ch
from tsallis_coherence import entropy as E
from tsallis_coherence import measures as M
from tsallis_coherence.config import make_rng
from tsallis_coherence.states import (
    density_from_bloch,
    incoherent_state,
    maximally_coherent,
    pure_state,
    random_density,
)

def pure_cq(m, q):
    """``C_q`` of a pure state whose largest basis weight is ``m``."""
    return (1 - m ** ((1 - q) / q)) / (1 - q)


@given(v=st.lists(st.floats(-5, 5), min_size=1, max_size=6))
def test_project_simplex(v):
    p = M.project_simplex(np.array(v))
    assert np.all(p >= 0)
    assert p.sum() == pytest.approx(1)
    # idempotent
    np.testing.assert_allclose(M.project_simplex(p), p, atol=1e-12)


def test_optimizer_finds_interior_and_vertex_maxima():
    target = np.array([0.1, 0.6, 0.3])
    res = M.optimize_over_simplex(lambda p: -np.sum((p - target) ** 2), 3)
    assert res.converged
    np.testing.assert_allclose(res.point, target, atol=1e-5)
    res = M.optimize_over_simplex(lambda p: p[2], 3)
    assert res.point[2] == pytest.approx(1, abs=1e-9)
    assert M.optimize_over_simplex(lambda p: 7.0, 1).value == 7.0


def test_optimizer_config_validation():
    with pytest.raises(ValueError, match="restarts"):
        M.OptimizerConfig(restarts=0)


@pytest.mark.parametrize("d", [2, 3, 5])
@pytest.mark.parametrize("q", [0.1, 0.5, 0.9])
def test_maximally_coherent_closed_form(d, q):
    rep = M.c_q(maximally_coherent(d), q)
    assert rep.converged
    assert rep.value == pytest.approx(M.c_q_max(d, q), abs=1e-6)


def test_maximizer_need_not_be_unique():
    # on a pure state f_q = <phi|sigma|phi>^(1-q); for the maximally coherent
    # state that is (1/d)^(1-q) whatever sigma is, so every incoherent state is optimal
    f = E.f_q_diagonal(maximally_coherent(4), 0.3)
    vals = f(make_rng(1).dirichlet(np.ones(4), size=20))
    np.testing.assert_allclose(vals, 0.25**0.7, rtol=1e-12)


def test_c_q_max_limits():
    assert M.c_q_max(1, 0.5) == 0.0
    assert M.c_q_max(2, 0.5) == pytest.approx(1.0)
    # q -> 1 tends to ln d
    assert M.c_q_max(4, 1 - 1e-8) == pytest.approx(np.log(4), rel=1e-6)


@given(seed=seeds, q=orders, d=st.integers(2, 4))
def test_pure_state_closed_form(seed, q, d):
    rng = make_rng(seed)
    phi = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    phi /= np.linalg.norm(phi)
    m = np.max(np.abs(phi) ** 2)
    assert M.c_q(pure_state(phi), q).value == pytest.approx(pure_cq(m, q), abs=1e-6)


@given(rho=full_rank_states(), q=orders)
def test_zero_on_incoherent_and_bounded(rho, q):
    d = rho.shape[0]
    p = np.real(np.diag(rho))
    assert M.c_q(incoherent_state(p), q).value <= 1e-8
    v = M.c_q(rho, q).value
    assert 0 < v <= M.c_q_max(d, q) + 1e-8


@given(rho=full_rank_states(), q=orders, seed=seeds)
def test_invariant_under_permutation_and_phases(rho, q, seed):
    rng = make_rng(seed)
    d = rho.shape[0]
    perm = rng.permutation(d)
    phases = np.diag(np.exp(1j * rng.uniform(0, 2 * np.pi, d)))
    u = phases @ np.eye(d)[perm]
    base = M.c_q(rho, q).value
    assert M.c_q(u @ rho @ u.conj().T, q).value == pytest.approx(base, abs=1e-7)


def test_c_half_matches_c_q_at_one_half():
    # (f^2 - 1) / (1/2 - 1) = 2 (1 - f^2)
    rho = random_density(3, seed=9)
    general = M.c_q(rho, 0.5)
    rep = M.c_half(rho)
    assert rep.value == pytest.approx(general.value, abs=1e-9)
    np.testing.assert_allclose(rep.optimal_sigma, general.optimal_sigma, atol=1e-5)


@given(seed=seeds)
def test_geometric_qubit_closed_form(seed):
    rho = random_density(2, seed=seed)
    expected = (1 - np.sqrt(1 - 4 * abs(rho[0, 1]) ** 2)) / 2
    assert M.geometric_coherence(rho).value == pytest.approx(expected, abs=1e-7)


@given(rho=full_rank_states(), q=st.sampled_from([0.2, 0.5, 0.8, 1.3, 2.0]))
def test_tsallis_alpha_optimizer_matches_holder_closed_form(rho, q):
    rep = M.tsallis_alpha_coherence(rho, q)
    assert rep.value == pytest.approx(M.tsallis_alpha_coherence_exact(rho, q), abs=1e-6)


def test_reference_measures():
    rho = maximally_coherent(2)
    assert M.l1_coherence(rho) == pytest.approx(1)
    assert M.rel_entropy_coherence(rho) == pytest.approx(1)  # bits
    assert M.von_neumann_entropy(np.eye(4) / 4) == pytest.approx(2)
    assert M.rel_entropy_coherence(np.diag([0.5, 0.5])) == 0.0


def test_negative_rounding_is_clamped():
    for rep in (M.c_q(np.diag([0.3, 0.7]), 0.4), M.geometric_coherence(np.diag([0.3, 0.7])),
                M.tsallis_alpha_coherence(np.diag([0.3, 0.7]), 1.5)):
        assert rep.value == 0.0
        assert np.signbit(rep.value) == False  # noqa: E712


def test_report_serializes():
    d = M.c_q(maximally_coherent(2), 0.5).to_dict()
    assert set(d) == {"measure", "q", "value", "optimal_sigma", "converged", "iterations"}
    assert isinstance(d["optimal_sigma"][0], float)


def test_grid_oracle_refinement():
    # maximizer at p = 0.31234, between grid points
    obj = lambda p: -(p[0] - 0.31234) ** 2  # noqa: E731
    p, v = M.grid_maximize_qubit(obj, 11)
    assert p[0] == pytest.approx(0.31234, abs=1e-7)
    p, _ = M.grid_maximize_qubit(obj, 11, refine=False)
    assert p[0] == pytest.approx(0.3)


# -- characterization of the support convention ---------------------------------

def test_pure_state_strong_monotonicity_fails_above_one_half():
    """Pure states break strong monotonicity for q > 1/2 under the support convention.

    ``C_q`` of a pure state is ``h(m)`` with ``m`` its largest basis weight,
    and ``h`` is convex in ``m`` for ``q > 1/2``. The channel below splits
    ``sqrt(0.2)|0> + sqrt(0.8)|1>`` into a pure branch with smaller ``m`` and an
    incoherent branch, which gains on average.
    """
    phi = np.array([np.sqrt(0.2), np.sqrt(0.8)])
    chan = ch.KrausChannel((np.diag([1.0, 0.5]), np.diag([0.0, np.sqrt(0.75)])))
    q = 0.8
    res = ch.check_strong_monotonicity(pure_state(phi), chan, q)
    assert not res.holds
    p1 = 0.2 + 0.8 * 0.25
    assert res.lhs == pytest.approx(p1 * pure_cq(0.2 / p1, q), abs=1e-7)
    assert res.rhs == pytest.approx(pure_cq(0.8, q), abs=1e-7)
    assert res.margin == pytest.approx(-0.0469152, abs=1e-6)

    # q = 1/2 makes h affine and the inequality tight; full rank restores it at q = 0.8
    tight = ch.check_strong_monotonicity(pure_state(phi), chan, 0.5)
    assert abs(tight.margin) < 1e-7
    mixed = 0.999 * pure_state(phi) + 0.001 * np.eye(2) / 2
    assert ch.check_strong_monotonicity(mixed, chan, q).holds


@pytest.mark.parametrize("c", [(0.4, 0.0, 0.0), (0.1, 0.5, 0.0), (-0.3, 0.3, 0.0)])
def test_half_equals_twice_geometric_on_flat_diagonal_mixed_qubits(c):
    # sigma = I/2 commutes with rho, so the geometric mean is the fidelity term
    rho = density_from_bloch(c)
    assert np.linalg.eigvalsh(rho)[0] > 0.05
    diff = M.c_half(rho).value - 2 * M.geometric_coherence(rho).value
    assert abs(diff) < 1e-12


def test_half_vs_geometric_gap_grows_quadratically_off_the_plane():
    gaps = []
    for c3 in (0.01, 0.02, 0.04):
        rho = density_from_bloch([0.3, 0.3, c3])
        gaps.append(M.c_half(rho).value - 2 * M.geometric_coherence(rho).value)
    ratios = np.array(gaps[1:]) / np.array(gaps[:-1])
    np.testing.assert_allclose(ratios, 4.0, rtol=0.05)
