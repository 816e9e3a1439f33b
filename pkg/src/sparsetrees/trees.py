"""Spherically homogeneous tree specifications and counting.

A rooted tree is spherically homogeneous when every vertex at generation j
has the same number of forward neighbours kappa_j.  The trees handled here
branch only at a sparse set of generations: kappa_j equals a branching
factor k_n at generation L_n and 1 everywhere else.  A spec is therefore
just the pair of sequences (L_n, k_n) up to a finite horizon, plus the
recipe that produced them (explicit lists, a geometric family with ratio
gamma, or the randomly jittered variant of that family).

All counts are exact arbitrary-precision integers; generation levels may
exceed 64-bit range (the geometric family reaches gamma**n for n in the
thousands), so nothing here assumes levels fit machine words.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import ValidationError

_MAX_SEED = 2**64


def parse_gamma(value: str | float | int | Fraction) -> Fraction:
    """Parse a growth ratio into an exact rational.

    Accepts "p/q" strings, decimal strings, ints, floats (taken at their
    exact binary value) and Fractions.  The result is exact, so integer
    powers and floors computed from it are reproducible bit for bit.
    """
    try:
        if isinstance(value, str) and "/" in value:
            num, den = value.split("/")
            gamma = Fraction(int(num), int(den))
        else:
            gamma = Fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"gamma: cannot parse {value!r} as a rational") from exc
    if gamma <= 0:
        raise ValidationError(f"gamma: must be positive, got {gamma}")
    return gamma


@dataclass(frozen=True)
class TreeSpec:
    """Branching data of a spherically homogeneous tree up to a horizon.

    branch_levels holds the generations L_n at which branching happens
    (strictly increasing, starting at 1 or later) and branch_factors the
    corresponding k_n >= 2.  family records how the spec was produced;
    gamma, seed and omega are only set for the generated families.
    """

    branch_levels: tuple[int, ...]
    branch_factors: tuple[int, ...]
    family: str = "explicit"
    gamma: Fraction | None = None
    seed: int | None = None
    omega: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.family not in ("explicit", "gamma", "omega"):
            raise ValidationError(f"family: unknown family {self.family!r}")
        if len(self.branch_levels) != len(self.branch_factors):
            raise ValidationError("branch_factors: length must match branch_levels")
        prev = 0
        for lv in self.branch_levels:
            if not isinstance(lv, int) or lv <= prev:
                raise ValidationError(
                    "branch_levels: must be strictly increasing integers >= 1"
                )
            prev = lv
        for k in self.branch_factors:
            if not isinstance(k, int) or k < 2:
                raise ValidationError("branch_factors: every factor must be an integer >= 2")
        if self.family in ("gamma", "omega") and self.gamma is None:
            raise ValidationError("gamma: required for gamma and omega families")

    @property
    def n_branchings(self) -> int:
        return len(self.branch_levels)

    @property
    def horizon(self) -> int:
        """Largest generation about which the spec carries information."""
        return self.branch_levels[-1] if self.branch_levels else 0


@dataclass(frozen=True)
class OmegaSample:
    """Record of one random jitter draw: the seed and the offsets omega_n."""

    seed: int
    omega: tuple[int, ...]


@dataclass(frozen=True)
class BallCount:
    """Number of vertices within graph distance radius of the root."""

    radius: int
    count: int


@lru_cache(maxsize=256)
def _prefix_products(factors: tuple[int, ...]) -> tuple[int, ...]:
    # products[m] = k_1 * ... * k_m, products[0] = 1
    out = [1]
    for k in factors:
        out.append(out[-1] * k)
    return tuple(out)


def kappa(spec: TreeSpec, j: int) -> int:
    """Forward branching number at generation j (k_n at L_n, else 1)."""
    if j < 0:
        raise ValidationError("j: generation must be >= 0")
    pos = bisect_left(spec.branch_levels, j)
    if pos < len(spec.branch_levels) and spec.branch_levels[pos] == j:
        return spec.branch_factors[pos]
    return 1


def generation_size(spec: TreeSpec, j: int) -> int:
    """Number of vertices at generation j, the product of k_n over L_n < j."""
    if j < 0:
        raise ValidationError("j: generation must be >= 0")
    n_below = bisect_left(spec.branch_levels, j)
    return _prefix_products(spec.branch_factors)[n_below]


def ball_count(spec: TreeSpec, radius: int) -> int:
    """Exact number of vertices within distance radius of the root.

    The generation size is constant between branchings, so the sum over
    generations collapses to one term per branching and stays cheap even
    when radius is astronomically large.
    """
    if radius < 0:
        raise ValidationError("radius: must be >= 0")
    levels = spec.branch_levels
    products = _prefix_products(spec.branch_factors)
    first = levels[0] if levels else radius
    total = min(first, radius) + 1  # generations 0..min(L_1, radius), size 1
    for m in range(len(levels)):
        lo = levels[m] + 1
        if lo > radius:
            break
        hi = min(levels[m + 1], radius) if m + 1 < len(levels) else radius
        total += products[m + 1] * (hi - lo + 1)
    return total


def theoretical_dimension(k: int, gamma: Fraction | float) -> float:
    """Growth dimension log(gamma*k)/log(gamma) of the geometric family."""
    g = float(gamma)
    if g <= 1:
        raise ValidationError("gamma: dimension defined for gamma > 1")
    if k < 2:
        raise ValidationError("k: branching factor must be >= 2")
    return 1.0 + math.log(k) / math.log(g)


def estimate_dimension(spec: TreeSpec, radius: int) -> float:
    """Empirical dimension log(ball_count)/log(radius) at one radius."""
    if radius < 2:
        raise ValidationError("radius: must be >= 2 so log(radius) > 0")
    count = ball_count(spec, radius)
    return _log_big(count) / _log_big(radius)


def _log_big(n: int) -> float:
    # math.log handles arbitrary precision ints directly
    return math.log(n)


def make_gamma_tree(k: int, gamma: str | float | Fraction, n_levels: int) -> TreeSpec:
    """Build the geometric family spec with L_n = floor(gamma**n), exactly.

    gamma is parsed to an exact rational so the floor is computed by integer
    division; no floating-point rounding is involved at any size.

    Parameters
    ----------
    k : constant branching factor, >= 2
    gamma : growth ratio > 1 (rational "p/q", decimal string, or number)
    n_levels : number of branching generations to materialise
    """
    g = parse_gamma(gamma)
    if g <= 1:
        raise ValidationError(f"gamma: geometric family needs gamma > 1, got {g}")
    if n_levels < 1:
        raise ValidationError("n_levels: need at least one branching level")
    if k < 2:
        raise ValidationError("k: branching factor must be >= 2")
    p, q = g.numerator, g.denominator
    levels = []
    pn, qn = 1, 1
    for _ in range(n_levels):
        pn *= p
        qn *= q
        levels.append(pn // qn)
    for a, b in zip(levels, levels[1:]):
        if b <= a:
            raise ValidationError(
                f"gamma: floor(gamma**n) not strictly increasing at this horizon (gamma={g})"
            )
    if levels[0] < 1:
        raise ValidationError("gamma: first level floor(gamma) must be >= 1")
    return TreeSpec(tuple(levels), (k,) * n_levels, family="gamma", gamma=g)


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Counter-style stream splitting: disjoint 128-bit Philox keys per trial."""
    if not 0 <= seed < _MAX_SEED:
        raise ValidationError("seed: must fit in 64 bits")
    if not 0 <= trial < _MAX_SEED:
        raise ValidationError("trial: must fit in 64 bits")
    return np.random.Generator(np.random.Philox(key=(seed << 64) | trial))


def sample_omega_tree(
    k: int,
    gamma: str | float | Fraction,
    n_levels: int,
    seed: int,
    trial: int = 0,
) -> tuple[TreeSpec, OmegaSample]:
    """Draw the jittered geometric spec L_n = floor(gamma**n) + omega_n.

    omega_n is uniform on {-n, ..., n}.  When a draw would break the tree
    (level below 1, or a gap smaller than 2) only that omega_n is redrawn;
    for gamma > 2 a valid value always exists, so the repair terminates.
    Identical (seed, trial) pairs reproduce the sample exactly.
    """
    g = parse_gamma(gamma)
    if g <= 2:
        raise ValidationError(f"gamma: jittered family needs gamma > 2, got {g}")
    base = make_gamma_tree(k, g, n_levels)
    rng = _trial_rng(seed, trial)
    levels: list[int] = []
    omegas: list[int] = []
    for n in range(1, n_levels + 1):
        floor_n = base.branch_levels[n - 1]
        lower = 1 if n == 1 else levels[-1] + 2
        for _ in range(1000):
            w = int(rng.integers(-n, n + 1))
            if floor_n + w >= lower:
                break
        else:  # pragma: no cover - unreachable for gamma > 2
            raise ValidationError(f"gamma: repair failed at level {n}")
        levels.append(floor_n + w)
        omegas.append(w)
    spec = TreeSpec(
        tuple(levels),
        (k,) * n_levels,
        family="omega",
        gamma=g,
        seed=seed,
        omega=tuple(omegas),
    )
    return spec, OmegaSample(seed=seed, omega=tuple(omegas))


def validate(spec: TreeSpec) -> dict[str, bool]:
    """Finite-horizon structure flags.

    monotone: levels strictly increasing (true by construction, reported
    for externally built records).  sparse: the gap sequence is
    nondecreasing and ends strictly above where it started, the finite
    witness of gaps growing without bound.  normal: if the branching
    factors trend upward, at least one gap exceeding 1 must exist;
    bounded factors satisfy the condition vacuously.
    """
    levels = spec.branch_levels
    factors = spec.branch_factors
    monotone = all(b > a for a, b in zip(levels, levels[1:]))
    gaps = [b - a for a, b in zip(levels, levels[1:])]
    sparse = (
        len(gaps) >= 2
        and all(b >= a for a, b in zip(gaps, gaps[1:]))
        and gaps[-1] > gaps[0]
    )
    k_growing = (
        len(factors) >= 2
        and all(b >= a for a, b in zip(factors, factors[1:]))
        and factors[-1] > factors[0]
    )
    normal = (not k_growing) or any(g > 1 for g in gaps)
    return {"monotone": monotone, "sparse": sparse, "normal": normal}


def _format_gamma(g: Fraction) -> str:
    return str(g.numerator) if g.denominator == 1 else f"{g.numerator}/{g.denominator}"


def spec_to_record(spec: TreeSpec) -> dict:
    """Serializable record of a spec; explicit levels are listed only for
    the explicit family, generated families carry their parameters."""
    if spec.family == "explicit":
        return {
            "family": "explicit",
            "k": list(spec.branch_factors),
            "L": list(spec.branch_levels),
        }
    record: dict = {
        "family": spec.family,
        "k": spec.branch_factors[0],
        "gamma": _format_gamma(spec.gamma),
        "N": spec.n_branchings,
    }
    if spec.family == "omega":
        record["seed"] = spec.seed
    return record


def spec_from_record(record: dict) -> TreeSpec:
    """Rebuild a TreeSpec from its serialized record."""
    if not isinstance(record, dict) or "family" not in record:
        raise ValidationError("family: record must be a mapping with a family field")
    family = record["family"]
    if family == "explicit":
        levels = record.get("L")
        factors = record.get("k")
        if not isinstance(levels, list) or not isinstance(factors, list):
            raise ValidationError("L: explicit family needs list fields L and k")
        return TreeSpec(tuple(int(x) for x in levels), tuple(int(x) for x in factors))
    if family == "gamma":
        return make_gamma_tree(int(record["k"]), record["gamma"], int(record["N"]))
    if family == "omega":
        if "seed" not in record:
            raise ValidationError("seed: omega family requires a seed")
        spec, _ = sample_omega_tree(
            int(record["k"]), record["gamma"], int(record["N"]), int(record["seed"])
        )
        return spec
    raise ValidationError(f"family: unknown family {family!r}")
