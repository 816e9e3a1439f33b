"""Half-line Jacobi coefficient sequences with sparse off-diagonal bumps.

The operators studied here act on square-summable sequences indexed by
j >= 1 through

    (J u)(j) = a(j) u(j+1) + a(j-1) u(j-1) + b(j) u(j),      a(0) = 1,

where the off-diagonal a(j) equals 1 everywhere except at finitely many
bump positions (where it is the square root of a branching factor) and the
diagonal b(j) is either zero (adjacency variant) or the negated vertex
degree pattern (degree variant).  A boundary parameter rho adds -tan(rho)
to b(1).  Bump positions may be huge integers; lookups bisect the sorted
position list, so nothing walks the line site by site.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass, field

from .errors import ValidationError
from .trees import TreeSpec

ADJACENCY = "adjacency"
DEGREE = "degree"


@dataclass(frozen=True)
class JacobiCoefficients:
    """Sparse-bump Jacobi coefficients a(j), b(j) with boundary rho.

    positions: strictly increasing bump indices (a(position) != 1).
    values: a at each bump, positive.
    diag_bumps: b at each bump for the degree variant (ignored for the
    adjacency variant, where b is zero away from the boundary).
    """

    positions: tuple[int, ...]
    values: tuple[float, ...]
    variant: str = ADJACENCY
    rho: float = 0.0
    diag_bumps: tuple[float, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.variant not in (ADJACENCY, DEGREE):
            raise ValidationError(f"variant: unknown variant {self.variant!r}")
        if len(self.positions) != len(self.values):
            raise ValidationError("values: must match positions in length")
        prev = 0
        for p in self.positions:
            if p <= prev:
                raise ValidationError("positions: must be strictly increasing and >= 1")
            prev = p
        for v in self.values:
            if not v > 0:
                raise ValidationError("values: bump weights must be positive")
        if not abs(self.rho) < math.pi / 2:
            raise ValidationError("rho: boundary parameter must satisfy |rho| < pi/2")
        if self.variant == DEGREE and len(self.diag_bumps) != len(self.positions):
            raise ValidationError("diag_bumps: degree variant needs one entry per bump")

    @classmethod
    def free(cls, rho: float = 0.0) -> JacobiCoefficients:
        """The free half-line operator: a = 1, b = 0 (plus the boundary)."""
        return cls((), (), ADJACENCY, rho)

    @classmethod
    def from_bumps(
        cls,
        positions: tuple[int, ...],
        values: tuple[float, ...],
        rho: float = 0.0,
    ) -> JacobiCoefficients:
        """Adjacency-variant coefficients with explicitly placed bumps."""
        return cls(tuple(positions), tuple(values), ADJACENCY, rho)

    @classmethod
    def for_tree_block(
        cls,
        spec: TreeSpec,
        block: int = 0,
        variant: str = ADJACENCY,
        rho: float = 0.0,
    ) -> JacobiCoefficients:
        """Coefficients of block number `block` of the tree decomposition.

        Block n starts at generation R_n (R_0 = 0, R_n = L_n + 1) and sees
        the branchings above it: bumps sit at j = R_m - R_n for m > n with
        weight sqrt(k_m).  In the degree variant the diagonal is -2 off the
        bumps and -(k_m + 1) on them, the degree pattern of the untruncated
        tree; truncation boundary corrections are applied where a finite
        matrix is actually cut (see decomposition.truncated_block).
        """
        if not 0 <= block <= spec.n_branchings:
            raise ValidationError("block: outside 0..n_branchings")
        offsets = block_offsets(spec)
        start = offsets[block]
        positions = tuple(offsets[m] - start for m in range(block + 1, len(offsets)))
        values = tuple(
            math.sqrt(spec.branch_factors[m - 1])
            for m in range(block + 1, len(offsets))
        )
        diag = ()
        if variant == DEGREE:
            diag = tuple(
                -float(spec.branch_factors[m - 1] + 1)
                for m in range(block + 1, len(offsets))
            )
        return cls(positions, values, variant, rho, diag)

    @property
    def bump_count(self) -> int:
        return len(self.positions)

    def bump(self, m: int) -> tuple[int, float]:
        """Position and weight of the m-th bump, m = 1..bump_count."""
        if not 1 <= m <= len(self.positions):
            raise ValidationError("m: bump index out of range")
        return self.positions[m - 1], self.values[m - 1]

    def _bump_index(self, j: int) -> int | None:
        pos = bisect_left(self.positions, j)
        if pos < len(self.positions) and self.positions[pos] == j:
            return pos
        return None

    def a(self, j: int) -> float:
        """Off-diagonal coefficient; a(0) = 1 closes the recursion."""
        if j < 0:
            raise ValidationError("j: index must be >= 0")
        idx = self._bump_index(j)
        return self.values[idx] if idx is not None else 1.0

    def b(self, j: int) -> float:
        """Diagonal coefficient at j >= 1, including the boundary term."""
        if j < 1:
            raise ValidationError("j: index must be >= 1")
        if self.variant == ADJACENCY:
            base = 0.0
        else:
            idx = self._bump_index(j)
            base = self.diag_bumps[idx] if idx is not None else -2.0
        if j == 1 and self.rho != 0.0:
            base -= math.tan(self.rho)
        return base

    @property
    def is_adjacency(self) -> bool:
        return self.variant == ADJACENCY


def block_offsets(spec: TreeSpec) -> tuple[int, ...]:
    """Start generations R_n of the decomposition blocks: 0, L_1+1, L_2+1, ..."""
    return (0,) + tuple(lv + 1 for lv in spec.branch_levels)
