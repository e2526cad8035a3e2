"""Directed-network topology as a one-dimensional chain complex.

A network is a set of labelled nodes plus directed branches between
them.  Treating branches as the basis of a free abelian group, the
boundary operator sends a branch to (end node) - (start node); its
matrix is the node-by-branch incidence matrix with entries in
{-1, 0, +1}.  Two consequences carried through this module:

* a vector of branch currents satisfies Kirchhoff's current law exactly
  when it lies in the kernel of the boundary matrix, and
* the kernel (the cycle space) has dimension B - N + C for B branches,
  N nodes and C connected components, with an integer basis.

All kernel computations here are exact over the rationals.  Incidence
matrices are totally unimodular, so fraction-free integer elimination
keeps every intermediate entry small and fast; Fractions only appear
during back-substitution and are cleared from the returned basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .errors import TopologyError
from .waveform import Waveform


@dataclass(frozen=True)
class Branch:
    """Directed branch from ``start`` node to ``end`` node.

    ``element`` is an optional payload (circuit element, weight, ...);
    topology code never inspects it.
    """

    id: str
    start: str
    end: str
    element: Any = None

    def __post_init__(self) -> None:
        if not self.id:
            raise TopologyError("branch id must be a non-empty string")
        if not self.start or not self.end:
            raise TopologyError(f"branch {self.id!r}: node labels must be non-empty")


@dataclass(frozen=True)
class Network:
    """Immutable directed network with optional reference (ground) node."""

    nodes: tuple[str, ...]
    branches: tuple[Branch, ...]
    reference: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "branches", tuple(self.branches))
        if len(set(self.nodes)) != len(self.nodes):
            raise TopologyError("duplicate node labels")
        node_set = set(self.nodes)
        seen: set[str] = set()
        for br in self.branches:
            if br.id in seen:
                raise TopologyError(f"duplicate branch id {br.id!r}")
            seen.add(br.id)
            for label in (br.start, br.end):
                if label not in node_set:
                    raise TopologyError(
                        f"branch {br.id!r} references unknown node {label!r}")
        if self.reference is not None and self.reference not in node_set:
            raise TopologyError(f"reference node {self.reference!r} not in network")

    @classmethod
    def from_branches(cls, branches: Iterable[Branch],
                      reference: str | None = None,
                      extra_nodes: Iterable[str] = ()) -> "Network":
        """Build a network whose node list is collected from the branches.

        Nodes appear in first-use order; ``extra_nodes`` allows isolated
        nodes (they raise in the constructor otherwise, since they never
        occur in a branch).
        """
        branches = tuple(branches)
        nodes: list[str] = []
        seen: set[str] = set()
        for label in extra_nodes:
            if label not in seen:
                seen.add(label)
                nodes.append(label)
        for br in branches:
            for label in (br.start, br.end):
                if label not in seen:
                    seen.add(label)
                    nodes.append(label)
        return cls(tuple(nodes), branches, reference)

    @property
    def branch_ids(self) -> tuple[str, ...]:
        return tuple(br.id for br in self.branches)

    def node_index(self, label: str) -> int:
        try:
            return self.nodes.index(label)
        except ValueError:
            raise TopologyError(f"unknown node {label!r}") from None

    def branch(self, branch_id: str) -> Branch:
        for br in self.branches:
            if br.id == branch_id:
                return br
        raise TopologyError(f"unknown branch {branch_id!r}")


@dataclass(frozen=True)
class BoundaryMatrix:
    """Node-by-branch incidence matrix of a network (entries -1, 0, +1)."""

    nodes: tuple[str, ...]
    branch_ids: tuple[str, ...]
    matrix: np.ndarray  # int64, shape (len(nodes), len(branch_ids)), read-only

    def column(self, branch_id: str) -> np.ndarray:
        try:
            j = self.branch_ids.index(branch_id)
        except ValueError:
            raise TopologyError(f"unknown branch {branch_id!r}") from None
        return self.matrix[:, j]


@dataclass(frozen=True)
class CycleBasis:
    """Integer basis of the kernel of a boundary matrix.

    ``vectors[k][j]`` is the coefficient of branch ``branch_ids[j]`` in
    the k-th basis cycle.  Each vector is primitive (gcd 1) with its
    first non-zero entry positive.
    """

    branch_ids: tuple[str, ...]
    vectors: tuple[tuple[int, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.vectors)


def boundary(net: Network) -> BoundaryMatrix:
    """Incidence matrix of ``net``: column of branch b is e(end) - e(start).

    A self-loop contributes a zero column (it bounds nothing), which is
    exactly what makes its current free in the kernel.
    """
    mat = np.zeros((len(net.nodes), len(net.branches)), dtype=np.int64)
    index = {label: k for k, label in enumerate(net.nodes)}
    for j, br in enumerate(net.branches):
        mat[index[br.end], j] += 1
        mat[index[br.start], j] -= 1
    mat.setflags(write=False)
    return BoundaryMatrix(net.nodes, net.branch_ids, mat)


def connected_components(net: Network) -> list[frozenset[str]]:
    """Connected components of the underlying undirected graph."""
    parent = {label: label for label in net.nodes}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for br in net.branches:
        ra, rb = find(br.start), find(br.end)
        if ra != rb:
            parent[ra] = rb
    groups: dict[str, set[str]] = {}
    for label in net.nodes:
        groups.setdefault(find(label), set()).add(label)
    return [frozenset(g) for g in groups.values()]


def _integer_kernel(mat: np.ndarray) -> list[list[int]]:
    """Exact integer basis of the kernel of an integer matrix.

    Forward pass is fraction-free (Bareiss) elimination: every division
    is exact, so rows stay integer; for totally unimodular inputs such
    as incidence matrices the pivots are +-1 and entries never grow.
    Back-substitution runs over Fractions and each kernel vector is then
    scaled to a primitive integer vector.
    """
    rows = [list(map(int, r)) for r in mat]
    n_rows = len(rows)
    n_cols = int(mat.shape[1])

    pivot_cols: list[int] = []
    pivot_rows: list[int] = []
    r = 0
    prev = 1
    for c in range(n_cols):
        pr = next((i for i in range(r, n_rows) if rows[i][c] != 0), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        piv = rows[r][c]
        rr = rows[r]
        for i in range(r + 1, n_rows):
            ri = rows[i]
            head = ri[c]
            if head == 0:
                if piv != prev:
                    # Sylvester identity still scales the row by piv/prev
                    # (exact); with equal pivots it is a no-op.
                    for j in range(c, n_cols):
                        if ri[j]:
                            ri[j] = piv * ri[j] // prev
                continue
            for j in range(c, n_cols):
                ri[j] = (piv * ri[j] - head * rr[j]) // prev
        pivot_cols.append(c)
        pivot_rows.append(r)
        prev = piv
        r += 1
        if r == n_rows:
            break

    pivot_set = set(pivot_cols)
    free_cols = [c for c in range(n_cols) if c not in pivot_set]
    basis: list[list[int]] = []
    for fc in free_cols:
        vec: list[Fraction] = [Fraction(0)] * n_cols
        vec[fc] = Fraction(1)
        for k in range(len(pivot_cols) - 1, -1, -1):
            pc = pivot_cols[k]
            row = rows[pivot_rows[k]]
            acc = Fraction(0)
            for c in range(pc + 1, n_cols):
                if row[c] and vec[c]:
                    acc += row[c] * vec[c]
            vec[pc] = -acc / row[pc]
        scale = math.lcm(*(f.denominator for f in vec)) if vec else 1
        ints = [int(f * scale) for f in vec]
        g = math.gcd(*ints)
        if g > 1:
            ints = [v // g for v in ints]
        lead = next(v for v in ints if v != 0)
        if lead < 0:
            ints = [-v for v in ints]
        basis.append(ints)
    return basis


def cycle_space(net: Network) -> CycleBasis:
    """Exact integer basis of the cycle space (kernel of the boundary map).

    The returned dimension always equals
    ``len(net.branches) - len(net.nodes) + len(connected_components(net))``.
    """
    bnd = boundary(net)
    vectors = _integer_kernel(bnd.matrix)
    return CycleBasis(net.branch_ids, tuple(tuple(v) for v in vectors))


def cycle_rank(net: Network) -> int:
    """Cycle-space dimension from counting: B - N + C."""
    return len(net.branches) - len(net.nodes) + len(connected_components(net))


def _currents_vector(net: Network,
                     currents: Mapping[str, Any] | Sequence[Any]) -> list[Any]:
    if isinstance(currents, Mapping):
        missing = [br.id for br in net.branches if br.id not in currents]
        if missing:
            raise TopologyError(f"missing currents for branches {missing}")
        extra = set(currents) - set(net.branch_ids)
        if extra:
            raise TopologyError(f"currents given for unknown branches {sorted(extra)}")
        return [currents[br.id] for br in net.branches]
    vec = list(currents)
    if len(vec) != len(net.branches):
        raise TopologyError(
            f"expected {len(net.branches)} branch currents, got {len(vec)}")
    return vec


def kcl_residual(net: Network,
                 currents: Mapping[str, Any] | Sequence[Any]) -> dict[str, Any]:
    """Net current into each node: (boundary matrix) @ (branch currents).

    ``currents`` is either a mapping keyed by branch id or a sequence
    aligned with ``net.branches``.  Arithmetic stays in the input type,
    so exact types (int, Fraction) give exact residuals.  A current
    vector satisfies KCL iff every residual is zero, i.e. iff it lies in
    the kernel of :func:`boundary`.
    """
    vec = _currents_vector(net, currents)
    residual: dict[str, Any] = {label: 0 for label in net.nodes}
    for br, cur in zip(net.branches, vec):
        residual[br.end] = residual[br.end] + cur
        residual[br.start] = residual[br.start] - cur
    return residual


def in_cycle_space(net: Network,
                   currents: Mapping[str, Any] | Sequence[Any]) -> bool:
    """True iff the branch-current vector satisfies KCL at every node."""
    return all(v == 0 for v in kcl_residual(net, currents).values())


def node_balance_output(static_current: float, perturbation: Waveform) -> Waveform:
    """Total current leaving a three-branch junction fed by a constant
    source and a time-varying source.

    With a constant ``static_current`` entering on one branch and
    ``perturbation`` entering on another, KCL makes the output branch
    carry their sum sample by sample.  The returned waveform shares the
    perturbation's grid.
    """
    return Waveform(perturbation.t0, perturbation.dt,
                    perturbation.samples + float(static_current),
                    perturbation.unit or "A")
