"""Deterministic linear-algebra ground truth.

Dense solves of the network equations, the matrix-tree determinant, and
absorbing-chain fundamental-matrix quantities. Everything here is meant to
be boring and trustworthy; the combinatorial engines are validated against
it.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Optional

import numpy as np

from .errors import InvalidInjection, SingularSystem, StartInR
from .network import FixedVoltages, InjectedCurrents, Network

if TYPE_CHECKING:  # pragma: no cover
    from .markov import Chain


@dataclass(frozen=True)
class VoltageVector:
    """Per-node potentials in canonical node order."""
    nodes: tuple[str, ...]
    values: tuple[float, ...]
    ground: Optional[str] = None

    def __getitem__(self, node: str) -> float:
        return self.values[self.nodes.index(node)]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.nodes, self.values))


@dataclass(frozen=True)
class CurrentMatrix:
    """Antisymmetric node-aggregated branch currents, plus optional
    per-branch currents keyed by branch_id."""
    nodes: tuple[str, ...]
    matrix: np.ndarray  # n x n, antisymmetric, zero diagonal
    per_branch: Optional[dict[int, float]] = None

    def value(self, u: str, v: str) -> float:
        return float(self.matrix[self.nodes.index(u), self.nodes.index(v)])

    def row_sums(self) -> np.ndarray:
        """The injected-current vector J implied by this distribution."""
        return np.asarray(self.matrix.sum(axis=1))


def current_matrix_from_branches(net: Network, per_branch: dict[int, float]) -> CurrentMatrix:
    """Aggregate per-branch currents (oriented u -> v as stored) into the
    antisymmetric node matrix. Self-loop currents are ignored."""
    mat = np.zeros((net.n, net.n))
    for bid, amps in per_branch.items():
        b = net.branches[bid]
        if b.is_self_loop:
            continue
        mat[b.u, b.v] += amps
        mat[b.v, b.u] -= amps
    return CurrentMatrix(nodes=net.nodes, matrix=mat, per_branch=dict(per_branch))


def _solve(A: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - internal error
        raise SingularSystem(str(exc)) from exc


def solve_dirichlet(net: Network, fixed: FixedVoltages) -> VoltageVector:
    """Node voltages given fixed potentials on a nonempty node set; every
    other node is harmonic (zero injected current)."""
    fixed.validate(net)
    L = net.laplacian()
    fixed_idx = net.indices(fixed.assignments.keys())
    free = [k for k in range(net.n) if k not in set(fixed_idx)]

    v = np.zeros(net.n)
    for name, volts in fixed.assignments.items():
        v[net.index(name)] = volts
    if free:
        rhs = -L[np.ix_(free, fixed_idx)] @ v[fixed_idx]
        v[free] = _solve(L[np.ix_(free, free)], rhs)
    return VoltageVector(nodes=net.nodes, values=tuple(v))


def solve_injected(net: Network, J: InjectedCurrents, ground: str) -> VoltageVector:
    """Node voltages for an injected-current vector, ground pinned to 0.

    Deletes the ground row/column, solves the reduced Laplacian system and
    reinserts the zero.
    """
    J.validate(net)
    g = net.index(ground)
    keep = [k for k in range(net.n) if k != g]
    L = net.laplacian()
    v = np.zeros(net.n)
    if keep:
        v[keep] = _solve(L[np.ix_(keep, keep)], J.as_array()[keep])
    return VoltageVector(nodes=net.nodes, values=tuple(v), ground=ground)


def solve_mixed(net: Network, zero_set: Iterable[str], J: dict[str, float]) -> VoltageVector:
    """Voltages with a node set pinned to 0 volts and currents injected at
    the remaining nodes (the visit-count configuration)."""
    zero_idx = set(net.indices(zero_set))
    if not zero_idx:
        raise InvalidInjection("zero set must be nonempty")
    free = [k for k in range(net.n) if k not in zero_idx]
    rhs = np.zeros(net.n)
    for name, amps in J.items():
        rhs[net.index(name)] = amps
    L = net.laplacian()
    v = np.zeros(net.n)
    if free:
        v[free] = _solve(L[np.ix_(free, free)], rhs[free])
    return VoltageVector(nodes=net.nodes, values=tuple(v))


def branch_currents(net: Network, v: VoltageVector) -> CurrentMatrix:
    """Ohm's law per branch: i = g (v_u - v_v); self-loops carry nothing."""
    va = v.as_array()
    per_branch = {
        b.branch_id: b.g * (va[b.u] - va[b.v]) for b in net.branches
    }
    return current_matrix_from_branches(net, per_branch)


def tree_sum_determinant(net: Network) -> float:
    """Weighted matrix-tree value: determinant of the Laplacian with the
    last row and column deleted."""
    L = net.laplacian()
    if net.n == 1:
        return 1.0
    return float(np.linalg.det(L[:-1, :-1]))


def _transient_split(chain: "Chain", R: Iterable[str]) -> tuple[list[int], list[int]]:
    r_idx = set(chain.network.indices(R))
    transient = [k for k in range(chain.n) if k not in r_idx]
    absorbing = sorted(r_idx)
    return transient, absorbing


def fundamental_hitting(
    chain: "Chain", start: str, R: Iterable[str]
) -> tuple[float, dict[str, float]]:
    """Expected steps to absorption in R and the absorption distribution,
    via the fundamental matrix N = (I - P_TT)^-1."""
    roots = set(R)
    if start in roots:
        return 0.0, {name: (1.0 if name == start else 0.0) for name in roots}
    net = chain.network
    transient, absorbing = _transient_split(chain, roots)
    P = chain.P
    N = np.linalg.inv(np.eye(len(transient)) - P[np.ix_(transient, transient)])
    s = transient.index(net.index(start))
    tau = float(N[s].sum())
    B = N @ P[np.ix_(transient, absorbing)]
    absorb = {net.nodes[a]: float(B[s, j]) for j, a in enumerate(absorbing)}
    return tau, absorb


def expected_visits(chain: "Chain", start: str, R: Iterable[str]) -> dict[str, float]:
    """Expected visit counts before absorption; the terminal arrival in R is
    not counted, so states in R score 0."""
    roots = set(R)
    net = chain.network
    if start in roots:
        return {name: 0.0 for name in net.nodes}
    if start not in net.nodes:
        net.index(start)  # raises UnknownNode
    transient, _ = _transient_split(chain, roots)
    P = chain.P
    N = np.linalg.inv(np.eye(len(transient)) - P[np.ix_(transient, transient)])
    s = transient.index(net.index(start))
    out = {name: 0.0 for name in net.nodes}
    for j, k in enumerate(transient):
        out[net.nodes[k]] = float(N[s, j])
    return out


def raise_if_start_in_roots(start: str, R: Iterable[str]) -> None:
    if start in set(R):
        raise StartInR(f"start node {start!r} is in the root set")
