"""Command line front end.

Seven subcommands cover the pipeline: tree construction statistics,
block-decomposition verification, truncated spectra, phase-flow runs,
phase-diagram classification, Monte Carlo exponent estimation, and the
theorem-condition classifier.  Every run is driven by a JSON config file
(`--config`), optionally overridden by `--seed`, `--out` and `--format`,
and produces deterministic bytes: same config and seed, same output.

Exit codes: 0 on success, 2 on validation errors, 3 on size-guard
violations.
"""

import argparse
import dataclasses
import json
import math
import sys
import time
from fractions import Fraction

import numpy as np

from . import __version__
from .decomposition import truncated_block, verify_decomposition
from .errors import GuardError, ValidationError
from .jacobi import ADJACENCY, DEGREE
from .operators import eigenvalues_sym
from .phase import PhaseReducer
from .reports import (
    CsvTable,
    EFGP_RUN_HEADER,
    PHASE_DIAGRAM_HEADER,
    SPECTRUM_HEADER,
    ReportEnvelope,
    emit,
)
from .spectral import (
    essential_spectrum_coverage,
    mc_exponent,
    phase_diagram,
    theorem_classifier,
)
from .transfer import boundary_theta0, efgp_run
from .trees import (
    ball_count,
    estimate_dimension,
    parse_gamma,
    spec_from_record,
    spec_to_record,
    theoretical_dimension,
    validate,
)

SUBCOMMANDS = (
    "tree-stats",
    "decompose",
    "spectrum",
    "efgp-run",
    "phase-diagram",
    "mc-exponent",
    "classify-theorems",
)

_MISSING = object()


def _field(cfg: dict, name: str, default=_MISSING):
    if name in cfg:
        return cfg[name]
    if default is _MISSING:
        raise ValidationError(f"{name}: required config field is missing")
    return default


def _int_field(cfg: dict, name: str, default=_MISSING) -> int:
    value = _field(cfg, name, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(f"{name}: must be an integer")
    return value


def _float_field(cfg: dict, name: str, default=_MISSING) -> float:
    value = _field(cfg, name, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{name}: must be a number")
    return float(value)


def _spec_field(cfg: dict):
    record = _field(cfg, "spec")
    return spec_from_record(record)


def _phi_field(cfg: dict):
    """Resolve the phase angle: a float, or an exact rational multiple of pi.

    Returns (phi, reducer); the reducer is None on the float path and an
    exact fixed-point reducer when phi_pi_multiple is given.
    """
    phi = cfg.get("phi")
    multiple = cfg.get("phi_pi_multiple")
    if (phi is None) == (multiple is None):
        raise ValidationError("phi: give exactly one of phi, phi_pi_multiple")
    if multiple is not None:
        try:
            frac = Fraction(str(multiple))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(
                f"phi_pi_multiple: cannot parse {multiple!r} as a rational"
            ) from exc
        return float(frac) * math.pi, PhaseReducer.from_pi_multiple(frac)
    if isinstance(phi, bool) or not isinstance(phi, (int, float)):
        raise ValidationError("phi: must be a number")
    return float(phi), None


def _energy_grid(cfg: dict) -> list[float]:
    grid = _field(cfg, "energies")
    if isinstance(grid, list):
        if not grid or not all(
            isinstance(e, (int, float)) and not isinstance(e, bool) for e in grid
        ):
            raise ValidationError("energies: list entries must be numbers")
        return [float(e) for e in grid]
    if isinstance(grid, dict):
        lo = _float_field(grid, "min")
        hi = _float_field(grid, "max")
        points = _int_field(grid, "points")
        if points < 2:
            raise ValidationError("points: energy grid needs at least 2 points")
        if not lo < hi:
            raise ValidationError("min: energy grid needs min < max")
        return [float(e) for e in np.linspace(lo, hi, points)]
    raise ValidationError("energies: must be a list or a min/max/points mapping")


def _variant_field(cfg: dict, allow_both: bool) -> str:
    allowed = (ADJACENCY, DEGREE) + (("both",) if allow_both else ())
    variant = _field(cfg, "variant", "both" if allow_both else ADJACENCY)
    if variant not in allowed:
        raise ValidationError(f"variant: must be one of {', '.join(allowed)}")
    return variant


# ---------------------------------------------------------------------------
# Subcommand handlers: config -> (payload, optional CSV view)
# ---------------------------------------------------------------------------


def _run_tree_stats(cfg: dict, seed: int):
    spec = _spec_field(cfg)
    depth = _int_field(cfg, "depth")
    payload = {
        "spec": spec_to_record(spec),
        "n_branchings": len(spec.branch_levels),
        "depth": depth,
        "vertex_count": ball_count(spec, depth),
        "estimated_dimension": estimate_dimension(spec, depth),
        "structure": validate(spec),
    }
    if spec.gamma is not None:
        payload["theoretical_dimension"] = theoretical_dimension(
            spec.branch_factors[0], spec.gamma
        )
    return payload, None


def _decomposition_record(report) -> dict:
    return {
        "passed": report.passed,
        "max_deviation": report.max_deviation,
        "tolerance": report.tolerance,
        "tree_size": report.tree_size,
        "counting_ok": report.counting_ok,
        "block_sizes": list(report.block_sizes),
        "block_multiplicities": list(report.block_multiplicities),
    }


def _run_decompose(cfg: dict, seed: int):
    spec = _spec_field(cfg)
    depth = _int_field(cfg, "depth")
    variant = _variant_field(cfg, allow_both=True)
    rho = _float_field(cfg, "rho", 0.0)
    variants = (ADJACENCY, DEGREE) if variant == "both" else (variant,)
    reports = {v: _decomposition_record(verify_decomposition(spec, depth, v, rho)) for v in variants}
    payload = {
        "spec": spec_to_record(spec),
        "depth": depth,
        "rho": rho,
        "reports": reports,
        "passed": all(r["passed"] and r["counting_ok"] for r in reports.values()),
    }
    return payload, None


def _run_spectrum(cfg: dict, seed: int):
    spec = _spec_field(cfg)
    depth = _int_field(cfg, "depth")
    block = _int_field(cfg, "block", 0)
    variant = _variant_field(cfg, allow_both=False)
    rho = _float_field(cfg, "rho", 0.0)
    eigenvalues = [float(e) for e in eigenvalues_sym(truncated_block(spec, block, depth, variant, rho))]
    payload = {
        "spec": spec_to_record(spec),
        "block": block,
        "depth": depth,
        "variant": variant,
        "rho": rho,
        "eigenvalues": eigenvalues,
    }
    if "coverage" in cfg:
        cov = cfg["coverage"]
        if not isinstance(cov, dict):
            raise ValidationError("coverage: must be a mapping with eps, grid_points")
        eps = _float_field(cov, "eps")
        grid_points = _int_field(cov, "grid_points", 1000)
        payload["coverage"] = {
            "eps": eps,
            "grid_points": grid_points,
            "fraction": essential_spectrum_coverage(spec, depth, eps, grid_points),
        }
    table = CsvTable(
        SPECTRUM_HEADER, tuple((i, e) for i, e in enumerate(eigenvalues))
    )
    return payload, table


def _run_efgp(cfg: dict, seed: int):
    spec = _spec_field(cfg)
    phi, reducer = _phi_field(cfg)
    if "rho" in cfg and "theta0" in cfg:
        raise ValidationError("theta0: give either theta0 or rho, not both")
    if "rho" in cfg:
        theta0 = boundary_theta0(_float_field(cfg, "rho"), phi)
    else:
        theta0 = _float_field(cfg, "theta0", 0.0)
    n_bumps = _int_field(cfg, "n_bumps", len(spec.branch_levels))
    trajectory = efgp_run(spec, phi, theta0=theta0, n_bumps=n_bumps, reducer=reducer)
    rows = trajectory.as_rows()
    payload = {
        "spec": spec_to_record(spec),
        "phi": phi,
        "theta0": theta0,
        "n_bumps": n_bumps,
        "mean_y": trajectory.mean_y(),
        "rows": [
            {"n": n, "L_n": level, "log_r": log_r, "theta": theta, "Y_n": y}
            for n, level, log_r, theta, y in rows
        ],
    }
    return payload, CsvTable(EFGP_RUN_HEADER, tuple(rows))


def _run_phase_diagram(cfg: dict, seed: int):
    k = _int_field(cfg, "k")
    gamma = parse_gamma(_field(cfg, "gamma"))
    energies = _energy_grid(cfg)
    points = phase_diagram(k, gamma, energies)
    payload = {
        "k": k,
        "gamma": float(gamma),
        "points": [p.as_record() for p in points],
    }
    table = CsvTable(
        PHASE_DIAGRAM_HEADER,
        tuple((p.energy, p.k, p.gamma, p.label, p.alpha) for p in points),
    )
    return payload, table


def _run_mc_exponent(cfg: dict, seed: int):
    k = _int_field(cfg, "k")
    gamma = parse_gamma(_field(cfg, "gamma"))
    phi = cfg.get("phi")
    multiple = cfg.get("phi_pi_multiple")
    if phi is not None and (isinstance(phi, bool) or not isinstance(phi, (int, float))):
        raise ValidationError("phi: must be a number")
    report = mc_exponent(
        k,
        gamma,
        None if phi is None else float(phi),
        n_bumps=_int_field(cfg, "n_bumps", 2000),
        trials=_int_field(cfg, "trials", 20),
        seed=seed,
        pi_multiple=None if multiple is None else str(multiple),
    )
    payload = dataclasses.asdict(report)
    payload["trial_means"] = list(report.trial_means)
    return payload, None


def _run_classify(cfg: dict, seed: int):
    spec = _spec_field(cfg)
    report = theorem_classifier(spec)
    payload = {"spec": spec_to_record(spec)}
    payload.update(dataclasses.asdict(report))
    payload["holds"] = report.holds
    return payload, None


_HANDLERS = {
    "tree-stats": _run_tree_stats,
    "decompose": _run_decompose,
    "spectrum": _run_spectrum,
    "efgp-run": _run_efgp,
    "phase-diagram": _run_phase_diagram,
    "mc-exponent": _run_mc_exponent,
    "classify-theorems": _run_classify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparsetrees",
        description="Spectral analysis of spherically homogeneous sparse trees",
    )
    parser.add_argument("--version", action="version", version=__version__)
    subparsers = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        sub = subparsers.add_parser(name)
        sub.add_argument("--config", required=True, help="path to a JSON config file")
        sub.add_argument("--seed", type=int, default=None, help="override the config seed")
        sub.add_argument("--out", default=None, help="write the report here instead of stdout")
        sub.add_argument("--format", choices=("csv", "json"), default=None)
    return parser


def _load_config(path: str) -> tuple[str, dict]:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ValidationError(f"config: cannot read {path}: {exc}") from exc
    try:
        cfg = json.loads(text)
    except ValueError as exc:
        raise ValidationError(f"config: {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ValidationError("config: top level must be a JSON object")
    return text, cfg


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config_text, cfg = _load_config(args.config)
        declared = cfg.get("subcommand")
        if declared is not None and declared != args.subcommand:
            raise ValidationError(
                f"subcommand: config declares {declared!r} but {args.subcommand!r} was invoked"
            )
        seed = args.seed if args.seed is not None else _int_field(cfg, "seed", 0)
        if not 0 <= seed < 2**64:
            raise ValidationError("seed: must fit in 64 bits")
        fmt = args.format or _field(cfg, "format", "json")
        if fmt not in ("csv", "json"):
            raise ValidationError(f"format: unknown format {fmt!r}")

        started = time.perf_counter()
        payload, table = _HANDLERS[args.subcommand](cfg, seed)
        elapsed = time.perf_counter() - started
        envelope = ReportEnvelope(
            version=__version__,
            subcommand=args.subcommand,
            config_text=config_text,
            seed=seed,
            payload=payload,
            timing_seconds=elapsed,
        )
        data = emit(envelope, fmt, table)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except GuardError as exc:
        print(f"guard: {exc}", file=sys.stderr)
        return 3

    if args.out:
        with open(args.out, "wb") as handle:
            handle.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    print(f"elapsed_seconds={envelope.timing_seconds:.3f}", file=sys.stderr)
    return 0


def main(argv=None) -> int:
    return run(argv)
