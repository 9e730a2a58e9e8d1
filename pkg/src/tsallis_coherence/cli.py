"""Command-line entry point: ``tsallis-coherence <command> [options]``.

Exit codes: 0 success, 1 a hard verification suite failed, 2 malformed input
or parameter out of range, 3 invariant violation, 4 optimizer did not
converge (the value is still written).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import channels as ch
from . import entropy, measures, verify
from .states import InvalidStateError, MalformedStateFile, load_state, maximally_coherent

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_BAD_INPUT = 2
EXIT_INVARIANT = 3
EXIT_NOT_CONVERGED = 4

Q_MEASURES = ("cq", "c-half", "tsallis-alpha")
ALL_MEASURES = ("cq", "c-half", "cg", "tsallis-alpha", "l1", "rel-ent")


class UsageError(ValueError):
    """Bad flag values; maps to exit code 2."""


@dataclass(frozen=True)
class RunConfig:
    command: str
    state_path: str | None = None
    measure: str = "cq"
    q: float = 0.5
    q_range: tuple[float, float, int] | None = None
    d: tuple[int, ...] = (2,)
    trials: int = 200
    seed: int = 0
    tol: float | None = None
    output_path: str | None = None
    format: str = "json"
    inject_fault: str | None = None

    def optimizer(self) -> measures.OptimizerConfig:
        cfg = measures.OptimizerConfig(seed=self.seed)
        return cfg if self.tol is None else replace(cfg, conv_tol=self.tol)


def validate_q(measure: str, q: float) -> float:
    """Raise :class:`UsageError` (``"q out of range"``) when ``q`` is invalid for ``measure``."""
    try:
        if measure in ("cq", "c-half"):
            entropy.check_q(q)
        elif measure == "tsallis-alpha":
            entropy.check_alpha_q(q)
    except ValueError as exc:
        raise UsageError(f"{exc} for measure {measure}") from exc
    return q


def parse_sweep(text: str) -> tuple[float, float, int]:
    try:
        start, stop, steps = text.split(":")
        out = float(start), float(stop), int(steps)
    except ValueError as exc:
        raise UsageError(f"--sweep expects START:STOP:STEPS, got {text!r}") from exc
    if out[2] < 1:
        raise UsageError("--sweep needs steps >= 1")
    return out


def sweep_grid(start: float, stop: float, steps: int) -> np.ndarray:
    return np.array([start]) if steps == 1 else np.linspace(start, stop, steps)


# -- evaluation ----------------------------------------------------------------

def evaluate(rho, measure: str, q: float, cfg: measures.OptimizerConfig) -> measures.MeasureReport:
    """One measure on one state; ``l1`` and ``rel-ent`` are closed forms and always converge."""
    if measure == "l1":
        return measures.MeasureReport("l1", measures.l1_coherence(rho), np.real(np.diag(rho)), None, 0, True)
    if measure == "rel-ent":
        return measures.MeasureReport("rel-ent", measures.rel_entropy_coherence(rho),
                                      np.real(np.diag(rho)), None, 0, True)
    return measures.MEASURES[measure](rho, q, cfg)


def _check_bounds(rep: measures.MeasureReport, d: int) -> None:
    if rep.value < 0:
        raise InvalidStateError(f"{rep.measure} came out negative ({rep.value:.3e})")
    if rep.measure == "cq" and rep.value > measures.c_q_max(d, rep.q) + 1e-8:
        raise InvalidStateError(
            f"C_q = {rep.value:.12g} exceeds its maximum {measures.c_q_max(d, rep.q):.12g} in dimension {d}"
        )


# -- output --------------------------------------------------------------------

def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _csv(header: list[str], rows: list[list], comment: str = "") -> str:
    buf = io.StringIO()
    buf.write(f"# schema_version: {SCHEMA_VERSION}{comment}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _fmt(x) -> str:
    return repr(float(x))


# -- commands ------------------------------------------------------------------

def cmd_coherence(cfg: RunConfig) -> int:
    if cfg.state_path is None:
        raise UsageError("coherence needs --state")
    validate_q(cfg.measure, cfg.q)
    rho = load_state(cfg.state_path)
    rep = evaluate(rho, cfg.measure, cfg.q, cfg.optimizer())
    record = {"schema_version": SCHEMA_VERSION, **rep.to_dict()}
    if cfg.format == "csv":
        row = [rep.measure, "" if rep.q is None else _fmt(rep.q), _fmt(rep.value),
               " ".join(_fmt(x) for x in rep.optimal_sigma), str(rep.converged).lower(), rep.iterations]
        _write(_csv(["measure", "q", "value", "optimal_sigma", "converged", "iterations"], [row]),
               cfg.output_path)
    else:
        _write(_dump_json(record), cfg.output_path)
    _check_bounds(rep, rho.shape[0])
    return EXIT_OK if rep.converged else EXIT_NOT_CONVERGED


def cmd_sweep(cfg: RunConfig) -> int:
    if cfg.state_path is None:
        raise UsageError("sweep needs --state")
    if cfg.q_range is None:
        raise UsageError("sweep needs --sweep START:STOP:STEPS")
    qs = sweep_grid(*cfg.q_range)
    for q in qs:
        validate_q(cfg.measure, float(q))
    rho = load_state(cfg.state_path)
    opt = cfg.optimizer()
    reports = [evaluate(rho, cfg.measure, float(q), opt) for q in qs]
    if cfg.format == "json":
        text = _dump_json({
            "schema_version": SCHEMA_VERSION,
            "measure": cfg.measure,
            "rows": [{"q": float(q), "value": r.value, "converged": r.converged, "iterations": r.iterations}
                     for q, r in zip(qs, reports)],
        })
    else:
        rows = [[_fmt(q), _fmt(r.value), str(r.converged).lower(), r.iterations] for q, r in zip(qs, reports)]
        note = "; entropies in bits" if cfg.measure == "rel-ent" else ""
        text = _csv(["q", "value", "converged", "iterations"], rows, f"; measure: {cfg.measure}{note}")
    _write(text, cfg.output_path)
    for r in reports:
        _check_bounds(r, rho.shape[0])
    return EXIT_OK if all(r.converged for r in reports) else EXIT_NOT_CONVERGED


def _broken_factory(d, n, rng):
    # negative control: a valid incoherent channel scaled so completeness fails
    good = ch.random_incoherent_channel(d, n, rng=rng)
    return ch.KrausChannel(tuple(1.1 * k for k in good.kraus), validate=False)


FAULTS = {"broken-channel": _broken_factory}


def cmd_verify(cfg: RunConfig) -> int:
    if cfg.trials < 0:
        raise UsageError("--trials must be non-negative")
    factory = FAULTS[cfg.inject_fault] if cfg.inject_fault else verify._default_factory
    suites = verify.run_all(cfg.trials, cfg.d, cfg.seed, cfg.optimizer(), factory)
    rep = verify.report(suites)
    _write(_dump_json(rep), cfg.output_path)
    for s in suites:
        if not s.ok:
            print(f"FAIL {s.name}: {s.passes}/{s.trials}", file=sys.stderr)
    return EXIT_OK if rep["overall"] == "pass" else EXIT_VERIFY_FAILED


def cmd_search_violation(cfg: RunConfig) -> int:
    if cfg.measure != "tsallis-alpha":
        why = (" (C_q is strongly monotone under incoherent operations, so no violation exists)"
               if cfg.measure in ("cq", "c-half") else "")
        raise UsageError(f"search-violation only targets tsallis-alpha, not {cfg.measure}{why}")
    validate_q(cfg.measure, cfg.q)
    if cfg.trials < 0:
        raise UsageError("--trials must be non-negative")
    d = cfg.d[0]
    hit = ch.find_tsallis_alpha_violation(d, cfg.q, cfg.trials, seed=cfg.seed)
    out = {"schema_version": SCHEMA_VERSION, "measure": cfg.measure, "d": d, "q": cfg.q,
           "trials": cfg.trials, "seed": cfg.seed}
    if hit is None:
        out.update(found=False, message=f"not found in {cfg.trials} trials")
    else:
        out.update(found=True, counterexample=hit.to_dict())
    _write(_dump_json(out), cfg.output_path)
    return EXIT_OK


def cmd_max_coherent(cfg: RunConfig) -> int:
    """``C_q`` of the maximally coherent state against its closed form, per ``d`` and ``q``."""
    qs = sweep_grid(*cfg.q_range) if cfg.q_range else np.array([cfg.q])
    for q in qs:
        validate_q("cq", float(q))
    opt = cfg.optimizer()
    rows = []
    for d in cfg.d:
        rho = maximally_coherent(d)
        for q in qs:
            rep = measures.c_q(rho, float(q), opt)
            exact = measures.c_q_max(d, float(q))
            rows.append({"d": d, "q": float(q), "value": rep.value, "closed_form": exact,
                         "abs_error": abs(rep.value - exact), "converged": rep.converged})
    if cfg.format == "csv":
        text = _csv(list(rows[0]), [[r["d"], _fmt(r["q"]), _fmt(r["value"]), _fmt(r["closed_form"]),
                                     _fmt(r["abs_error"]), str(r["converged"]).lower()] for r in rows])
    else:
        text = _dump_json({"schema_version": SCHEMA_VERSION, "rows": rows})
    _write(text, cfg.output_path)
    return EXIT_OK if all(r["converged"] for r in rows) else EXIT_NOT_CONVERGED


COMMANDS = {
    "coherence": cmd_coherence,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
    "search-violation": cmd_search_violation,
    "max-coherent": cmd_max_coherent,
}


# -- argument parsing ----------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_BAD_INPUT)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tsallis-coherence", description="Tsallis relative operator entropy coherence toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, measure=True, state=False, fmt="json"):
        if state:
            p.add_argument("--state", dest="state_path", metavar="PATH", help="JSON state file")
        if measure:
            p.add_argument("--measure", choices=ALL_MEASURES, default="cq")
        p.add_argument("--q", type=float, default=0.5)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float, default=None, help="optimizer convergence tolerance")
        p.add_argument("--out", dest="output_path", metavar="PATH")
        p.add_argument("--format", choices=("csv", "json"), default=fmt)

    common(sub.add_parser("coherence", help="one measure of one state"), state=True)
    p = sub.add_parser("sweep", help="a measure over a range of q")
    common(p, state=True, fmt="csv")
    p.add_argument("--sweep", dest="q_range", metavar="START:STOP:STEPS")

    p = sub.add_parser("verify", help="run every property and inequality suite")
    common(p, measure=False)
    p.add_argument("--d", type=int, nargs="+", default=[2, 3])
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--inject-fault", choices=sorted(FAULTS), default=None, help=argparse.SUPPRESS)

    p = sub.add_parser("search-violation", help="look for strong-monotonicity violations")
    common(p, fmt="json")
    p.set_defaults(measure="tsallis-alpha")
    p.add_argument("--d", type=int, nargs=1, default=[2])
    p.add_argument("--trials", type=int, default=1000)

    p = sub.add_parser("max-coherent", help="C_q of the maximally coherent state vs its closed form")
    common(p, measure=False)
    p.add_argument("--d", type=int, nargs="+", default=[2])
    p.add_argument("--sweep", dest="q_range", metavar="START:STOP:STEPS")
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    q_range = parse_sweep(ns.q_range) if getattr(ns, "q_range", None) else None
    d = tuple(getattr(ns, "d", (2,)))
    if any(x < 1 for x in d):
        raise UsageError("--d must be positive")
    return RunConfig(
        command=ns.command,
        state_path=getattr(ns, "state_path", None),
        measure=getattr(ns, "measure", "cq"),
        q=ns.q,
        q_range=q_range,
        d=d,
        trials=getattr(ns, "trials", 200),
        seed=ns.seed,
        tol=ns.tol,
        output_path=ns.output_path,
        format=ns.format,
        inject_fault=getattr(ns, "inject_fault", None),
    )


def main(argv: list[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(ns)
        if cfg.tol is not None and cfg.tol <= 0:
            raise UsageError("--tol must be positive")
        return COMMANDS[cfg.command](cfg)
    except (UsageError, MalformedStateFile) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except InvalidStateError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
