"""Assembly of tree graph operators on finite truncations.

Vertices of the ball of radius D around the root are indexed breadth
first, generation by generation, so parent and child indices are pure
arithmetic on generation offsets.  Two operators are assembled: the plain
adjacency matrix, and adjacency minus the diagonal of vertex degrees
(degrees counted inside the truncation, so the truncation is a Dirichlet
cut after generation D).  Eigenvalues come from LAPACK via numpy/scipy,
with a fast path for tridiagonal matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import GuardError, ValidationError
from .trees import TreeSpec, ball_count, generation_size, kappa

VERTEX_GUARD = 1_000_000
DENSE_GUARD = 4_000


@dataclass(frozen=True)
class VertexIndexing:
    """Breadth-first vertex numbering of the depth-D truncation."""

    spec: TreeSpec
    depth: int
    offsets: tuple[int, ...]  # offsets[j] = index of first vertex in generation j
    sizes: tuple[int, ...]

    @property
    def total(self) -> int:
        return self.offsets[-1] + self.sizes[-1]

    def index(self, generation: int, position: int) -> int:
        if not 0 <= generation <= self.depth:
            raise ValidationError("generation: outside the truncation")
        if not 0 <= position < self.sizes[generation]:
            raise ValidationError("position: outside the generation")
        return self.offsets[generation] + position

    def generation_of(self, idx: int) -> tuple[int, int]:
        """Inverse lookup, returns (generation, position)."""
        if not 0 <= idx < self.total:
            raise ValidationError("idx: outside the truncation")
        lo, hi = 0, self.depth
        while lo < hi:  # last generation with offset <= idx
            mid = (lo + hi + 1) // 2
            if self.offsets[mid] <= idx:
                lo = mid
            else:
                hi = mid - 1
        return lo, idx - self.offsets[lo]

    def parent(self, idx: int) -> int:
        gen, pos = self.generation_of(idx)
        if gen == 0:
            raise ValidationError("idx: the root has no parent")
        return self.offsets[gen - 1] + pos // kappa(self.spec, gen - 1)

    def children(self, idx: int) -> range:
        gen, pos = self.generation_of(idx)
        if gen == self.depth:
            return range(0)
        k = kappa(self.spec, gen)
        base = self.offsets[gen + 1] + pos * k
        return range(base, base + k)


def enumerate_vertices(spec: TreeSpec, depth: int) -> VertexIndexing:
    """Index the ball of radius depth; refuses more than a million vertices."""
    if depth < 0:
        raise ValidationError("depth: must be >= 0")
    if ball_count(spec, depth) > VERTEX_GUARD:
        raise GuardError(
            f"depth: truncation holds {ball_count(spec, depth)} vertices, "
            f"guard is {VERTEX_GUARD}"
        )
    sizes = [generation_size(spec, j) for j in range(depth + 1)]
    offsets = [0]
    for s in sizes[:-1]:
        offsets.append(offsets[-1] + s)
    return VertexIndexing(spec, depth, tuple(offsets), tuple(sizes))


@dataclass(frozen=True)
class SymOperator:
    """Real symmetric operator stored as a diagonal plus one edge list.

    Each off-diagonal entry appears exactly once, as (i, j, value) with
    i < j, so symmetry holds by construction rather than by bookkeeping.
    """

    size: int
    diag: tuple[float, ...]
    edges: tuple[tuple[int, int, float], ...]

    def to_dense(self) -> np.ndarray:
        a = np.zeros((self.size, self.size))
        np.fill_diagonal(a, self.diag)
        for i, j, v in self.edges:
            a[i, j] = v
            a[j, i] = v
        return a

    def is_tridiagonal(self) -> bool:
        return all(j == i + 1 for i, j, _ in self.edges)

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.size, dtype=np.int64)
        for i, j, _ in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    def to_triplets(self) -> list[tuple[int, int, float]]:
        """Coordinate export: diagonal entries first, then each edge once."""
        out = [(i, i, d) for i, d in enumerate(self.diag) if d != 0.0]
        out.extend(self.edges)
        return out


def _tree_edges(indexing: VertexIndexing) -> tuple[tuple[int, int, float], ...]:
    edges = []
    for gen in range(indexing.depth):
        k = kappa(indexing.spec, gen)
        parent_base = indexing.offsets[gen]
        child_base = indexing.offsets[gen + 1]
        for pos in range(indexing.sizes[gen]):
            p = parent_base + pos
            for c in range(pos * k, (pos + 1) * k):
                edges.append((p, child_base + c))
    return tuple((i, j, 1.0) for i, j in edges)


def assemble_delta(spec: TreeSpec, depth: int) -> SymOperator:
    """Pure adjacency operator of the truncated tree (0/1 entries)."""
    indexing = enumerate_vertices(spec, depth)
    edges = _tree_edges(indexing)
    return SymOperator(indexing.total, (0.0,) * indexing.total, edges)


def assemble_delta_tilde(spec: TreeSpec, depth: int) -> SymOperator:
    """Adjacency minus vertex degrees, degrees counted within the truncation.

    Equivalently the negative graph Laplacian of the ball, so the result is
    negative semidefinite and every row sums to zero.
    """
    indexing = enumerate_vertices(spec, depth)
    edges = _tree_edges(indexing)
    deg = np.zeros(indexing.total)
    for i, j, _ in edges:
        deg[i] += 1
        deg[j] += 1
    return SymOperator(indexing.total, tuple(-deg), edges)


def apply_root_boundary(op: SymOperator, rho: float) -> SymOperator:
    """Subtract tan(rho) from the root diagonal entry (vertex 0).

    rho parametrises the boundary condition of the half-line reduction;
    |rho| must stay below pi/2 so the tangent is finite.
    """
    if not abs(rho) < math.pi / 2:
        raise ValidationError("rho: boundary parameter must satisfy |rho| < pi/2")
    if op.size == 0:
        raise ValidationError("op: empty operator")
    diag = list(op.diag)
    diag[0] -= math.tan(rho)
    return SymOperator(op.size, tuple(diag), op.edges)


def eigenvalues_sym(op: SymOperator) -> np.ndarray:
    """All eigenvalues of a SymOperator, ascending.

    Tridiagonal operators go through the specialised LAPACK routine at any
    size; anything else is solved densely and guarded at 4000 rows.
    """
    if op.size == 0:
        return np.zeros(0)
    if op.size == 1:
        return np.array([op.diag[0]])
    if op.is_tridiagonal():
        off = np.zeros(op.size - 1)
        for i, _, v in op.edges:
            off[i] = v
        return eigh_tridiagonal(np.asarray(op.diag), off, eigvals_only=True)
    if op.size > DENSE_GUARD:
        raise GuardError(
            f"size: dense eigensolve limited to {DENSE_GUARD} rows, got {op.size}"
        )
    return np.linalg.eigvalsh(op.to_dense())
