"""Exact bottleneck optimal transport on discrete distributions.

The infinity-Wasserstein distance between two finite distributions is the
smallest threshold t such that all probability mass can be transported
along pairs at L1 distance at most t. We compute it exactly: probability
masses are integers over a common denominator, feasibility at a threshold
is an integer max-flow question, and the threshold search runs over the
finite set of realized pairwise distances. Only the distances themselves
are floating point; no feasibility decision ever depends on float
rounding.

The relaxed notion, (W, delta)-closeness, asks for a coupling that moves
all but delta of the mass by at most W; it is decided by the same flow
machinery and witnessed by an explicit coupling certificate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .model import solve_spd

__all__ = [
    "DiscreteDistribution",
    "ClosenessCertificate",
    "winf_distance",
    "max_mass_within",
    "is_w_delta_close",
    "min_w_for_delta",
    "closeness_from_bounds",
    "discretize_samples",
    "discretize_gaussian",
]


@dataclass(frozen=True)
class DiscreteDistribution:
    """Finite support points in R^m with exact rational masses.

    Masses are stored as integer numerators over a single integer
    denominator and must sum exactly to one.
    """

    points: np.ndarray
    mass_num: Tuple[int, ...]
    mass_den: int

    def __init__(self, points, mass_num, mass_den):
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2:
            raise ValueError("points must form a 2-D array of row vectors")
        if not np.all(np.isfinite(pts)):
            raise ValueError("support points must be finite")
        pts = pts + 0.0  # fold -0.0 into 0.0 so distinctness is numeric
        nums = tuple(int(n) for n in mass_num)
        den = int(mass_den)
        if len(nums) != pts.shape[0]:
            raise ValueError("one mass per support point required")
        if den < 1:
            raise ValueError("mass denominator must be a positive integer")
        if any(n < 0 for n in nums):
            raise ValueError("masses must be nonnegative")
        if sum(nums) != den:
            raise ValueError(f"masses must sum to 1 exactly ({sum(nums)}/{den} given)")
        seen = set()
        for row in pts:
            key = row.tobytes()
            if key in seen:
                raise ValueError("support points must be pairwise distinct")
            seen.add(key)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "mass_num", nums)
        object.__setattr__(self, "mass_den", den)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def size(self) -> int:
        return self.points.shape[0]

    def masses(self) -> List[Fraction]:
        return [Fraction(n, self.mass_den) for n in self.mass_num]

    @classmethod
    def from_fractions(cls, points, masses: Sequence[Fraction]) -> "DiscreteDistribution":
        fracs = [Fraction(m) for m in masses]
        den = math.lcm(*(f.denominator for f in fracs)) if fracs else 1
        nums = [int(f * den) for f in fracs]
        return cls(points, nums, den)

    def to_json(self) -> dict:
        return {
            "points": [[float(x) for x in row] for row in self.points],
            "mass_num": list(self.mass_num),
            "mass_den": self.mass_den,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "DiscreteDistribution":
        return cls(doc["points"], doc["mass_num"], doc["mass_den"])


@dataclass(frozen=True)
class ClosenessCertificate:
    """A witnessing partial coupling for a (W, delta)-closeness claim.

    coupling_edges holds (source index, target index, mass) triples with
    exact rational masses. The certificate can be re-verified against the
    two distributions without trusting the solver that produced it.
    """

    coupling_edges: Tuple[Tuple[int, int, Fraction], ...]
    retained_mass: Fraction
    max_retained_distance: float

    def verify(self, mu: DiscreteDistribution, nu: DiscreteDistribution, w: float, delta) -> bool:
        """Independent feasibility check of the stored coupling."""
        src_used = [Fraction(0)] * mu.size
        dst_used = [Fraction(0)] * nu.size
        total = Fraction(0)
        for i, j, mass in self.coupling_edges:
            if mass < 0:
                return False
            d = float(np.abs(mu.points[i] - nu.points[j]).sum())
            if d > self.max_retained_distance or d > w:
                return False
            src_used[i] += mass
            dst_used[j] += mass
            total += mass
        if total != self.retained_mass:
            return False
        mu_masses, nu_masses = mu.masses(), nu.masses()
        if any(src_used[i] > mu_masses[i] for i in range(mu.size)):
            return False
        if any(dst_used[j] > nu_masses[j] for j in range(nu.size)):
            return False
        return total >= 1 - Fraction(delta)


class _Dinic:
    """Max flow with arbitrary-precision integer capacities.

    Edges live in flat parallel arrays; the reverse of edge e is e ^ 1.
    The blocking-flow search is iterative, so support sizes are limited
    by time, not recursion depth, and capacities are Python integers, so
    no scale of masses can overflow.
    """

    def __init__(self, n: int):
        self.n = n
        self.to: List[int] = []
        self.cap: List[int] = []
        self.head: List[List[int]] = [[] for _ in range(n)]

    def add_edge(self, u: int, v: int, cap: int) -> int:
        e = len(self.to)
        self.head[u].append(e)
        self.to.append(v)
        self.cap.append(cap)
        self.head[v].append(e + 1)
        self.to.append(u)
        self.cap.append(0)
        return e

    def max_flow(self, s: int, t: int) -> int:
        to, cap, head = self.to, self.cap, self.head
        total = 0
        while True:
            level = [-1] * self.n
            level[s] = 0
            queue = [s]
            for u in queue:
                nxt = level[u] + 1
                for e in head[u]:
                    v = to[e]
                    if cap[e] > 0 and level[v] < 0:
                        level[v] = nxt
                        queue.append(v)
            if level[t] < 0:
                return total
            it = [0] * self.n
            path: List[int] = []
            u = s
            while True:
                if u == t:
                    bottleneck = min(cap[e] for e in path)
                    total += bottleneck
                    for e in path:
                        cap[e] -= bottleneck
                        cap[e ^ 1] += bottleneck
                    # Retreat to the first saturated edge on the path.
                    cut = next(idx for idx, e in enumerate(path) if cap[e] == 0)
                    u = to[path[cut] ^ 1]
                    del path[cut:]
                    continue
                advanced = False
                edges = head[u]
                i = it[u]
                base = level[u] + 1
                while i < len(edges):
                    e = edges[i]
                    v = to[e]
                    if cap[e] > 0 and level[v] == base:
                        it[u] = i
                        path.append(e)
                        u = v
                        advanced = True
                        break
                    i += 1
                if not advanced:
                    it[u] = i
                    if u == s:
                        break
                    level[u] = -1
                    e = path.pop()
                    u = to[e ^ 1]
                    it[u] += 1

    def edge_flow(self, e: int) -> int:
        return self.cap[e ^ 1]


def _pairwise_l1(mu: DiscreteDistribution, nu: DiscreteDistribution) -> np.ndarray:
    if mu.dim != nu.dim:
        raise ValueError(f"dimension mismatch: {mu.dim} vs {nu.dim}")
    return np.abs(mu.points[:, None, :] - nu.points[None, :, :]).sum(axis=2)


def _scaled_masses(mu: DiscreteDistribution, nu: DiscreteDistribution):
    scale = math.lcm(mu.mass_den, nu.mass_den)
    supplies = [n * (scale // mu.mass_den) for n in mu.mass_num]
    demands = [n * (scale // nu.mass_den) for n in nu.mass_num]
    return supplies, demands, scale


def _flow_within(mu, nu, dist, w):
    """Max transportable integer mass using only edges of distance <= w."""
    supplies, demands, scale = _scaled_masses(mu, nu)
    k, l = mu.size, nu.size
    source, sink = 0, k + l + 1
    net = _Dinic(k + l + 2)
    for i, s in enumerate(supplies):
        if s > 0:
            net.add_edge(source, 1 + i, s)
    for j, d in enumerate(demands):
        if d > 0:
            net.add_edge(1 + k + j, sink, d)
    handles = []
    rows, cols = np.nonzero(dist <= w)
    for i, j in zip(rows.tolist(), cols.tolist()):
        if supplies[i] > 0 and demands[j] > 0:
            cap = min(supplies[i], demands[j])
            handles.append((i, j, net.add_edge(1 + i, 1 + k + j, cap)))
    flow = net.max_flow(source, sink)
    edges = []
    for i, j, handle in handles:
        f = net.edge_flow(handle)
        if f > 0:
            edges.append((i, j, Fraction(f, scale)))
    return flow, scale, edges


def _smallest_feasible_threshold(mu, nu, dist, needed_of_scale) -> float:
    """Least realized distance t whose flow reaches the needed fraction."""
    thresholds = np.unique(dist)
    if thresholds.size == 0 or thresholds[0] > 0.0:
        thresholds = np.concatenate(([0.0], thresholds))
    _, _, scale = _scaled_masses(mu, nu)
    needed = needed_of_scale(scale)

    lo, hi = 0, thresholds.size - 1
    if needed >= scale:
        # Full transport: every positive-mass point needs an edge within the
        # threshold, so the covering radius is a cheap search floor.
        src = np.array(mu.mass_num) > 0
        dst = np.array(nu.mass_num) > 0
        cover = max(
            float(dist[src][:, dst].min(axis=1).max()) if src.any() else 0.0,
            float(dist[src][:, dst].min(axis=0).max()) if dst.any() else 0.0,
        )
        lo = int(np.searchsorted(thresholds, cover))

    def feasible(idx: int) -> bool:
        flow, _, _ = _flow_within(mu, nu, dist, float(thresholds[idx]))
        return flow >= needed

    if feasible(lo):
        return float(thresholds[lo])
    # Invariant: lo infeasible, hi feasible (full transport always is).
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return float(thresholds[hi])


def winf_distance(mu: DiscreteDistribution, nu: DiscreteDistribution) -> float:
    """Infinity-Wasserstein distance under the L1 ground metric, exact.

    Returns the smallest threshold t, among realized pairwise distances,
    such that a coupling of mu and nu exists whose every positive-mass
    edge has L1 length at most t.
    """
    dist = _pairwise_l1(mu, nu)
    return _smallest_feasible_threshold(mu, nu, dist, lambda scale: scale)


def max_mass_within(mu: DiscreteDistribution, nu: DiscreteDistribution, w: float) -> Fraction:
    """Largest coupling mass placeable on pairs with L1 distance <= w."""
    if w < 0:
        raise ValueError(f"w must be nonnegative, got {w}")
    dist = _pairwise_l1(mu, nu)
    flow, scale, _ = _flow_within(mu, nu, dist, float(w))
    return Fraction(flow, scale)


def is_w_delta_close(
    mu: DiscreteDistribution, nu: DiscreteDistribution, w: float, delta
) -> Tuple[bool, Optional[ClosenessCertificate]]:
    """Decide (w, delta)-closeness; return a verifiable coupling when true.

    delta is interpreted exactly (a float argument means the exact
    rational value of that float), so the mass comparison never depends
    on rounding.
    """
    if w < 0:
        raise ValueError(f"w must be nonnegative, got {w}")
    delta_frac = Fraction(delta)
    if not (0 <= delta_frac <= 1):
        raise ValueError(f"delta must lie in [0, 1], got {delta}")
    dist = _pairwise_l1(mu, nu)
    flow, scale, edges = _flow_within(mu, nu, dist, float(w))
    ok = Fraction(flow, scale) >= 1 - delta_frac
    if not ok:
        return False, None
    max_dist = max((float(dist[i, j]) for i, j, _ in edges), default=0.0)
    cert = ClosenessCertificate(
        coupling_edges=tuple(edges),
        retained_mass=Fraction(flow, scale),
        max_retained_distance=max_dist,
    )
    return True, cert


def min_w_for_delta(mu: DiscreteDistribution, nu: DiscreteDistribution, delta) -> float:
    """Smallest realized-distance threshold w with (w, delta)-closeness.

    With delta = 0 this equals winf_distance; with delta = 1 it is 0.
    """
    delta_frac = Fraction(delta)
    if not (0 <= delta_frac <= 1):
        raise ValueError(f"delta must lie in [0, 1], got {delta}")
    dist = _pairwise_l1(mu, nu)

    def needed(scale: int) -> int:
        return scale - math.floor(delta_frac * scale)

    return _smallest_feasible_threshold(mu, nu, dist, needed)


def closeness_from_bounds(delta_e1: float, c: float) -> float:
    """Closeness radius implied by mean gaps plus concentration.

    If each query distribution puts mass at least 1 - delta/2 within L1
    radius c of its mean, every protected pair is (delta_e1 + 2c, delta)-
    close, where delta_e1 is the worst-case L1 distance between means.
    """
    if delta_e1 < 0 or c < 0:
        raise ValueError("both bound terms must be nonnegative")
    return float(delta_e1) + 2.0 * float(c)


def discretize_samples(samples, mass_resolution: int) -> DiscreteDistribution:
    """Empirical distribution of samples with duplicate points merged.

    Masses are multiples of 1/mass_resolution, so the sample count must
    divide the resolution.
    """
    x = np.asarray(samples, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.shape[0] < 1:
        raise ValueError("need at least one sample")
    count = x.shape[0]
    resolution = int(mass_resolution)
    if resolution < 1 or resolution % count != 0:
        raise ValueError(
            f"mass resolution {resolution} incompatible with sample count {count}"
        )
    unit = resolution // count
    order: List[bytes] = []
    multiplicity: dict = {}
    rows: dict = {}
    for row in x:
        key = row.tobytes()
        if key not in multiplicity:
            multiplicity[key] = 0
            rows[key] = row
            order.append(key)
        multiplicity[key] += 1
    points = np.vstack([rows[k] for k in order])
    nums = [multiplicity[k] * unit for k in order]
    return DiscreteDistribution(points, nums, resolution)


def discretize_gaussian(
    mean,
    cov,
    points_per_axis: int = 41,
    half_width_sds: float = 6.0,
    mass_resolution: int = 10**6,
) -> DiscreteDistribution:
    """Axis-aligned grid approximation of a Gaussian.

    Covers each axis to +/- half_width_sds standard deviations and
    assigns rational masses proportional to the density. This is a
    bridging approximation for cross-checking transport bounds against
    Gaussian models; it is never an exact representation.
    """
    mean = np.asarray(mean, dtype=float)
    cov = np.asarray(cov, dtype=float)
    m = mean.size
    sds = np.sqrt(np.maximum(np.diag(cov), 1e-300))
    axes = [
        np.linspace(mean[k] - half_width_sds * sds[k], mean[k] + half_width_sds * sds[k], points_per_axis)
        for k in range(m)
    ]
    mesh = np.meshgrid(*axes, indexing="ij")
    points = np.column_stack([g.ravel() for g in mesh])
    centered = points - mean
    mahal = np.einsum("ij,ji->i", centered, solve_spd(cov, centered.T))
    weights = np.exp(-0.5 * (mahal - mahal.min()))
    shares = weights / weights.sum()
    nums = np.floor(shares * mass_resolution).astype(object)
    shortfall = mass_resolution - int(nums.sum())
    # Hand the rounding remainder to the heaviest cells, deterministically.
    for idx in np.argsort(-shares, kind="stable")[:shortfall]:
        nums[idx] += 1
    keep = np.nonzero(nums > 0)[0]
    return DiscreteDistribution(
        points[keep], [int(nums[i]) for i in keep], mass_resolution
    )
