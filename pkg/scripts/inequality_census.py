"""Census of the f_q data-processing and ensemble inequalities, split by channel kind and rank of rho.

Random CPTP maps need not be unital, and rank-deficient ``rho`` interacts
with the support convention, so this script reports satisfaction rates per
cell instead of asserting.
"""

from __future__ import annotations

import argparse
from collections import defaultdict
from dataclasses import dataclass

from tsallis_coherence import channels as ch
from tsallis_coherence.config import make_rng
from tsallis_coherence.states import random_density


@dataclass(frozen=True)
class CensusConfig:
    trials: int = 500
    dims: tuple[int, ...] = (2, 3, 4)
    seed: int = 0


def run(cfg: CensusConfig) -> dict:
    cells = defaultdict(lambda: [0, 0, 0, float("inf")])  # trials, data-processing ok, ensemble ok, worst data-processing margin
    for t in range(cfg.trials):
        rng = make_rng(cfg.seed, t)
        d = cfg.dims[t % len(cfg.dims)]
        q = float(rng.uniform(0.05, 0.95))
        rank = int(rng.integers(1, d + 1))
        rho = random_density(d, rank=rank, rng=rng)
        sigma = random_density(d, rng=rng)
        kind = ("cptp", "incoherent", "unitary-mixture")[t % 3]
        if kind == "cptp":
            phi = ch.random_cptp_channel(d, int(rng.integers(1, 4)), rng=rng)
        elif kind == "incoherent":
            phi = ch.random_incoherent_channel(d, int(rng.integers(1, 4)), rng=rng)
        else:
            phi = ch.random_unitary_mixture(d, int(rng.integers(1, 4)), seed=int(rng.integers(2**31)))
        key = (kind, "full" if rank == d else "deficient")
        c2 = ch.check_lemma2(rho, sigma, phi, q)
        c3 = ch.check_lemma3(rho, sigma, phi, q)
        cell = cells[key]
        cell[0] += 1
        cell[1] += c2.holds
        cell[2] += c3.holds
        cell[3] = min(cell[3], c2.margin)
    return dict(cells)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=CensusConfig.trials)
    ap.add_argument("--seed", type=int, default=CensusConfig.seed)
    a = ap.parse_args()
    cells = run(CensusConfig(trials=a.trials, seed=a.seed))
    print(f"{'channel':<16}{'rank':<11}{'n':>5}{'data proc':>11}{'ensemble':>10}{'worst dp margin':>18}")
    for (kind, rank), (n, ok2, ok3, worst) in sorted(cells.items()):
        print(f"{kind:<16}{rank:<11}{n:>5}{ok2 / n:>11.1%}{ok3 / n:>10.1%}{worst:>18.3e}")


if __name__ == "__main__":
    main()
