"""Threshold-decision TSP backend.

A task is a 2-D instance plus a threshold ``t_d``; any permutation whose
closed-tour cost is at most ``t_d`` is a valid solution.  The solver is
nearest-neighbour / random starts followed by best-improvement 2-opt,
repeated until a tour meets the threshold or the restart budget runs out.
"""

from __future__ import annotations

import hashlib
import itertools
import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import numpy as np

from ..base import ZERO_DIGEST, OpCount
from ..errors import TooLarge

# relative slack when comparing float tour costs against the threshold
COST_RTOL = 1e-9
BRUTE_FORCE_MAX = 11


class DistanceMode(str, Enum):
    EUC_2D_ROUNDED = "euc2d_rounded"
    EUC_2D_EXACT = "euc2d_exact"


def tsp_distance(a, b, mode: DistanceMode = DistanceMode.EUC_2D_EXACT) -> float:
    d = math.hypot(a[0] - b[0], a[1] - b[1])
    if mode is DistanceMode.EUC_2D_ROUNDED:
        return float(int(d + 0.5))
    return d


@dataclass(frozen=True, eq=False)
class TspInstance:
    coords: np.ndarray
    mode: DistanceMode = DistanceMode.EUC_2D_EXACT
    name: str = ""

    def __post_init__(self):
        c = np.array(self.coords, dtype=np.float64)
        if c.ndim != 2 or c.shape[1] != 2:
            raise ValueError("coords must be an (n, 2) array")
        if c.shape[0] < 3:
            raise ValueError("need at least 3 cities")
        if not np.isfinite(c).all():
            raise ValueError("coordinates must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)
        object.__setattr__(self, "mode", DistanceMode(self.mode))

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @cached_property
    def distances(self) -> np.ndarray:
        diff = self.coords[:, None, :] - self.coords[None, :, :]
        d = np.sqrt((diff**2).sum(axis=2))
        if self.mode is DistanceMode.EUC_2D_ROUNDED:
            d = np.floor(d + 0.5)
        d.setflags(write=False)
        return d

    def to_bytes(self) -> bytes:
        return b"tsp1" + self.mode.value.encode() + self.coords.astype(">f8").tobytes()

    def __eq__(self, other):
        return isinstance(other, TspInstance) and self.to_bytes() == other.to_bytes()

    def __hash__(self):
        return hash(self.to_bytes())


def random_tsp_instance(n: int, rng=None, mode=DistanceMode.EUC_2D_EXACT, scale: float = 1.0) -> TspInstance:
    rng = np.random.default_rng(rng)
    return TspInstance(rng.random((n, 2)) * scale, mode)


@dataclass(frozen=True)
class TspTour:
    order: tuple

    def __post_init__(self):
        object.__setattr__(self, "order", tuple(int(i) for i in self.order))

    def to_bytes(self) -> bytes:
        return b"".join(i.to_bytes(4, "big") for i in self.order)

    @classmethod
    def from_bytes(cls, data: bytes) -> "TspTour":
        if len(data) % 4:
            raise ValueError("tour payload must be a whole number of 4-byte indices")
        return cls(tuple(np.frombuffer(data, dtype=">u4").tolist()))


@dataclass(frozen=True)
class TspTask:
    instance: TspInstance
    t_d: float

    def __post_init__(self):
        if not self.t_d >= 0:
            raise ValueError("threshold must be non-negative")

    def to_bytes(self) -> bytes:
        return self.instance.to_bytes() + np.float64(self.t_d).astype(">f8").tobytes()


def tour_cost(instance: TspInstance, tour) -> float:
    order = np.asarray(tour.order if isinstance(tour, TspTour) else tour, dtype=np.int64)
    return float(instance.distances[order, np.roll(order, -1)].sum())


def within_threshold(cost: float, t_d: float) -> bool:
    return cost <= t_d + COST_RTOL * max(1.0, abs(t_d))


def is_permutation(order, n: int) -> bool:
    order = np.asarray(order)
    if order.shape != (n,) or not np.issubdtype(order.dtype, np.integer):
        return False
    if n and (order.min() < 0 or order.max() >= n):
        return False
    return bool((np.bincount(order, minlength=n) == 1).all())


def nearest_neighbor_tour(dist: np.ndarray, start: int, counter: OpCount | None = None) -> np.ndarray:
    n = dist.shape[0]
    visited = np.zeros(n, dtype=bool)
    tour = np.empty(n, dtype=np.int64)
    cur = start
    for step in range(n):
        tour[step] = cur
        visited[cur] = True
        if step == n - 1:
            break
        row = np.where(visited, np.inf, dist[cur])
        cur = int(np.argmin(row))
        if counter is not None:
            counter.add(n - step - 1)
    return tour


def _move_mask(n: int) -> np.ndarray:
    i, j = np.triu_indices(n, k=2)
    keep = ~((i == 0) & (j == n - 1))
    mask = np.zeros((n, n), dtype=bool)
    mask[i[keep], j[keep]] = True
    return mask


def two_opt_deltas(dist: np.ndarray, tour: np.ndarray) -> np.ndarray:
    """Cost change of every 2-exchange (i, j), i < j; invalid pairs are +inf."""
    n = tour.shape[0]
    a = tour
    b = np.roll(tour, -1)
    dab = dist[a, b]
    delta = dist[np.ix_(a, a)] + dist[np.ix_(b, b)] - dab[:, None] - dab[None, :]
    return np.where(_move_mask(n), delta, np.inf)


def two_opt(dist: np.ndarray, tour: np.ndarray, counter: OpCount | None = None) -> np.ndarray:
    """Best-improvement 2-opt to a local optimum."""
    tour = np.array(tour, dtype=np.int64)
    n = tour.shape[0]
    if n < 4:
        return tour
    eps = COST_RTOL * max(1.0, float(dist.max()))
    mask = _move_mask(n)
    per_pass = int(mask.sum())
    while True:
        a = tour
        b = np.roll(tour, -1)
        dab = dist[a, b]
        delta = dist[np.ix_(a, a)] + dist[np.ix_(b, b)] - dab[:, None] - dab[None, :]
        delta[~mask] = np.inf
        if counter is not None:
            counter.add(per_pass)
        flat = int(np.argmin(delta))
        i, j = divmod(flat, n)
        if not delta[i, j] < -eps:
            return tour
        tour[i + 1:j + 1] = tour[i + 1:j + 1][::-1].copy()


def _start_tour(dist, restart: int, rng, counter):
    n = dist.shape[0]
    if restart == 0:
        return nearest_neighbor_tour(dist, int(rng.integers(n)), counter)
    counter.add(n)
    return rng.permutation(n)


def tsp_solve(task: TspTask, seed=0, budget: int = 10):
    """Return ``(tour, ops, restarts)``; ``tour`` is None after ``budget`` failed restarts."""
    if budget <= 0:
        raise ValueError("budget must be a positive number of restarts")
    rng = np.random.default_rng(seed)
    dist = task.instance.distances
    counter = OpCount()
    for restart in range(budget):
        tour = two_opt(dist, _start_tour(dist, restart, rng, counter), counter)
        if within_threshold(float(dist[tour, np.roll(tour, -1)].sum()), task.t_d):
            return TspTour(tour.tolist()), counter.ops, restart + 1
    return None, counter.ops, budget


def tsp_verify(task: TspTask, tour: TspTour, counter: OpCount | None = None) -> bool:
    n = task.instance.n
    order = np.asarray(tour.order, dtype=np.int64)
    if not is_permutation(order, n):
        return False
    if counter is not None:
        counter.add(n)
    return within_threshold(tour_cost(task.instance, order), task.t_d)


def baseline_cost(instance: TspInstance, seed=0, restarts: int = 1) -> float:
    rng = np.random.default_rng(seed)
    dist = instance.distances
    counter = OpCount()
    best = math.inf
    for restart in range(restarts):
        tour = two_opt(dist, _start_tour(dist, restart, rng, counter))
        best = min(best, float(dist[tour, np.roll(tour, -1)].sum()))
    return best


def tsp_derive_threshold(instance: TspInstance, alpha: float, seed=0, restarts: int = 1) -> float:
    """``alpha`` times the cost of a fixed-budget 2-opt baseline."""
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    return alpha * baseline_cost(instance, seed, restarts)


@dataclass(frozen=True)
class TspTransform:
    """City relabelling plus a rigid motion; ``perm[new] = original``."""

    perm: tuple
    angle: float = 0.0
    shift: tuple = (0.0, 0.0)

    @classmethod
    def identity(cls, n: int) -> "TspTransform":
        return cls(tuple(range(n)))

    @classmethod
    def from_digest(cls, digest: bytes, n: int, scale: float = 1.0) -> "TspTransform":
        """Digest-seeded transform; the all-zero digest maps to the identity."""
        if digest == ZERO_DIGEST:
            return cls.identity(n)
        rng = np.random.default_rng(int.from_bytes(hashlib.sha256(b"tsp-ctx" + digest).digest(), "big"))
        perm = rng.permutation(n)
        angle = float(rng.uniform(0.0, 2.0 * math.pi))
        shift = tuple(float(v) for v in rng.uniform(-scale, scale, size=2))
        return cls(tuple(perm.tolist()), angle, shift)

    @property
    def is_identity(self) -> bool:
        return self.perm == tuple(range(len(self.perm))) and self.angle == 0.0 and self.shift == (0.0, 0.0)

    def apply(self, instance: TspInstance) -> TspInstance:
        if self.is_identity:
            return instance
        c, s = math.cos(self.angle), math.sin(self.angle)
        rot = np.array([[c, -s], [s, c]])
        moved = instance.coords[list(self.perm)] @ rot.T + np.array(self.shift)
        return TspInstance(moved, instance.mode, instance.name)

    def restore_tour(self, tour: TspTour) -> TspTour:
        return TspTour(tuple(self.perm[i] for i in tour.order))

    def restore_coords(self, instance: TspInstance) -> np.ndarray:
        c, s = math.cos(self.angle), math.sin(self.angle)
        rot = np.array([[c, -s], [s, c]])
        back = (instance.coords - np.array(self.shift)) @ rot
        out = np.empty_like(back)
        out[list(self.perm)] = back
        return out


def tsp_contextualize(instance: TspInstance, ctx_digest: bytes, t_d: float):
    """Bind an instance to a context: returns ``(TspTask, TspTransform)``.

    Exact-mode distances are preserved, so a threshold derived on the
    original instance keeps its meaning.
    """
    span = float(np.ptp(instance.coords)) or 1.0
    transform = TspTransform.from_digest(ctx_digest, instance.n, scale=span)
    return TspTask(transform.apply(instance), t_d), transform


def brute_force_optimal(instance: TspInstance, chunk: int = 200_000):
    """Exact optimum over all (n-1)!/2 distinct tours (n <= 11)."""
    n = instance.n
    if n > BRUTE_FORCE_MAX:
        raise TooLarge(f"brute force limited to {BRUTE_FORCE_MAX} cities, got {n}")
    dist = instance.distances
    if n == 3:
        order = (0, 1, 2)
        return TspTour(order), tour_cost(instance, order)
    best_cost = math.inf
    best = None
    perms = (p for p in itertools.permutations(range(1, n)) if p[0] < p[-1])
    while True:
        block = np.array(list(itertools.islice(perms, chunk)), dtype=np.int64)
        if block.size == 0:
            break
        full = np.hstack([np.zeros((block.shape[0], 1), dtype=np.int64), block])
        costs = dist[full, np.roll(full, -1, axis=1)].sum(axis=1)
        i = int(np.argmin(costs))
        if costs[i] < best_cost:
            best_cost = float(costs[i])
            best = full[i]
    return TspTour(best.tolist()), best_cost
