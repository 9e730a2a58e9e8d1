import numpy as np
import pytest
from hypothesis import settings, strategies as st

from tsallis_coherence.states import random_density

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

# acceptance lines collected during the run, printed in the terminal summary
ACCEPTANCE: list[tuple[str, str]] = []


def record_criterion(label: str, ok: bool, detail: str) -> None:
    line = f"criterion {label}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE.append((label, line))
    print(line)

seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims = st.integers(min_value=2, max_value=4)
orders = st.floats(min_value=0.05, max_value=0.95)


@st.composite
def full_rank_states(draw, d=None):
    d = draw(dims) if d is None else d
    return random_density(d, seed=draw(seeds))


@st.composite
def state_pairs(draw):
    d = draw(dims)
    return random_density(d, seed=draw(seeds)), random_density(d, seed=draw(seeds))


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        def key(item):
            label = item[0]
            digits = "".join(ch for ch in label if ch.isdigit())
            return int(digits), label

        for _, line in sorted(ACCEPTANCE, key=key):
            terminalreporter.write_line(line)
