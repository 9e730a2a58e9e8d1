"""Numerical tolerances and random-stream construction shared by all modules."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Tolerances:
    """Every numerical threshold used by the package, in one place.

    The defaults are the normative values; pass a modified copy
    (``dataclasses.replace(TOL, ...)``) to functions that accept ``tol``.
    """

    herm: float = 1e-12               # |H - H^dagger| relative to max(1, |H|_max)
    eig_residual: float = 1e-10       # reconstruction / unitarity of a Spectrum
    max_sweeps: int = 100             # cyclic Jacobi sweeps before giving up
    support_cutoff: float = 1e-10     # eigenvalues below cutoff * lambda_max are dropped
    psd: float = 1e-10                # min eigenvalue of a density matrix
    trace: float = 1e-10              # |Tr rho - 1|
    prob_sum: float = 1e-12           # |sum p - 1| for a diagonal state
    bloch: float = 1e-12              # |c| <= 1 + bloch
    support_inclusion: float = 1e-8   # ||(I - P_sigma) P_rho||
    imag_residue: float = 1e-10       # imaginary part allowed in a real trace
    completeness: float = 1e-10       # ||sum K^dagger K - I||_max
    branch_prune: float = 1e-12       # drop measurement branches below this weight
    incoherent_entry: float = 1e-12   # "nonzero" threshold for Kraus structure checks
    operator_inequality: float = 1e-9   # Loewner-order and channel-inequality margins
    scalar_inequality: float = 1e-12  # scalar sandwich / Hoelder margins
    monotonicity: float = 1e-7        # C2, C3, C4 margins (absorbs optimizer error)
    additivity: float = 1e-6          # C5 block additivity defect
    zero_coherence: float = 1e-8      # c_q below this counts as zero
    incoherent_offdiag: float = 1e-9  # off-diagonal modulus counted as zero
    clamp_negative: float = 1e-10     # measure values in [-clamp, 0) are reported as 0


TOL = Tolerances()


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Counter-based (Philox 4x64) generator keyed by ``seed`` and a stream path.

    ``make_rng(seed, trial)`` gives every harness trial its own independent
    stream, so results do not depend on execution order.
    """
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, *(int(s) for s in stream)])
    return np.random.Generator(np.random.Philox(ss))
