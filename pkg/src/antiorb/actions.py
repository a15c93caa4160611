"""Point indexing and orbit partitions for linear group actions on F_q^N.

A point of F_q^N is indexed by ``sum_j x_j q^j`` (coordinate 0 is the fastest
digit).  A linear action is described by the images of generators as N x N
matrices acting on coordinate row vectors, and orbits are the connected
components of the graph whose edges are ``x -> g.x``.
"""

from __future__ import annotations

import os
from typing import Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .finitefield import FqField

DEFAULT_BUDGET = 20_000_000


class BudgetExceeded(RuntimeError):
    """Raised when a dense computation would exceed the configured point budget."""

    def __init__(self, needed: int, budget: int, what: str = "points"):
        super().__init__(f"{what}: {needed} exceeds budget {budget}")
        self.needed = needed
        self.budget = budget
        self.what = what


def point_budget() -> int:
    env = os.environ.get("ANTIORB_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


def check_budget(q: int, n: int, budget: int | None = None, what: str = "points") -> int:
    size = q**n
    limit = point_budget() if budget is None else budget
    if size > limit:
        raise BudgetExceeded(size, limit, what)
    return size


def point_coords(q: int, n: int, indices: np.ndarray | None = None) -> np.ndarray:
    """Coordinates (rows) of the given point indices, or of every point."""
    if indices is None:
        indices = np.arange(q**n, dtype=np.int64)
    powers = q ** np.arange(n, dtype=np.int64)
    return (indices[:, None] // powers[None, :]) % q


def coords_to_index(q: int, coords: np.ndarray) -> np.ndarray:
    powers = q ** np.arange(coords.shape[-1], dtype=np.int64)
    return (coords * powers).sum(axis=-1)


def apply_linear(F: FqField, coords: np.ndarray, M: Sequence[Sequence[int]]) -> np.ndarray:
    """Row vectors times M over F_q, for a batch of rows."""
    n_in = coords.shape[1]
    M = np.asarray(M, dtype=np.int64).reshape(n_in, -1) if n_in else np.zeros((0, 0), dtype=np.int64)
    n_out = M.shape[1]
    out = np.zeros((coords.shape[0], n_out), dtype=np.int64)
    for i in range(n_in):
        col = coords[:, i]
        for j in range(n_out):
            if M[i, j]:
                out[:, j] = F.add[out[:, j], F.mul[col, M[i, j]]]
    return out


def linear_perm(F: FqField, n: int, M: Sequence[Sequence[int]], coords: np.ndarray | None = None) -> np.ndarray:
    """Permutation of point indices induced by the invertible map x -> x M."""
    if coords is None:
        coords = point_coords(F.q, n)
    return coords_to_index(F.q, apply_linear(F, coords, M))


def orbit_partition(n_points: int, perms: Sequence[np.ndarray]) -> tuple[np.ndarray, list[np.ndarray]]:
    """Orbits of the group generated by the given permutations.

    Returns (label per point, orbits), orbits sorted by their minimal point and
    each orbit given as a sorted index array.  Labels are positions in that list.
    """
    src = np.concatenate([np.arange(n_points, dtype=np.int64)] * len(perms)) if perms else np.zeros(0, np.int64)
    dst = np.concatenate(list(perms)) if perms else np.zeros(0, np.int64)
    graph = coo_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(n_points, n_points))
    _, raw = connected_components(graph, directed=True, connection="weak")
    # renumber by minimal member, which np.unique with return_index provides in point order
    _, first = np.unique(raw, return_index=True)
    order = np.argsort(first)
    relabel = np.empty_like(order)
    relabel[order] = np.arange(len(order))
    labels = relabel[raw]
    sort_idx = np.argsort(labels, kind="stable")
    bounds = np.cumsum(np.bincount(labels, minlength=len(order)))[:-1]
    orbits = np.split(sort_idx, bounds)
    return labels, orbits
