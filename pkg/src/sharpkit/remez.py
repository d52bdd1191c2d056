"""First Algorithm of Remez: minimax fitting on a compact set.

The algorithm solves the discrete minimax problem on a growing reference
set, each iteration appending the frequency where the current fit deviates
most from the target.  It needs no Haar condition and accepts complex
basis functions and targets, which is what makes sharpening of arbitrary
subfilters possible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import RankDeficient
from .minimax import DiscreteInstance, MinimaxSolution, column_rank, solve_complex, solve_real

__all__ = [
    "CompactSet",
    "BasisFamily",
    "RemezTrace",
    "remez_first",
    "argmax_deviation",
    "max_abs_on_set",
]

DEFAULT_GRID_DENSITY = 4096.0 / np.pi
_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def _normalize_intervals(intervals) -> tuple[tuple[float, float], ...]:
    ivs = []
    for lo, hi in intervals:
        lo, hi = float(lo), float(hi)
        if not (np.isfinite(lo) and np.isfinite(hi)):
            raise ValueError("interval endpoints must be finite")
        if lo > hi:
            raise ValueError(f"interval [{lo}, {hi}] has lo > hi")
        ivs.append((lo, hi))
    ivs.sort()
    merged: list[list[float]] = []
    for lo, hi in ivs:
        if merged and lo <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return tuple((lo, hi) for lo, hi in merged)


@dataclass(frozen=True)
class CompactSet:
    """Finite union of closed real intervals with a sampling density.

    ``grid_density`` is in points per unit length; overlapping intervals
    are merged on construction.  Degenerate intervals are kept as single
    points.
    """

    intervals: tuple[tuple[float, float], ...]
    grid_density: float = DEFAULT_GRID_DENSITY

    def __init__(self, intervals, grid_density: float = DEFAULT_GRID_DENSITY):
        object.__setattr__(self, "intervals", _normalize_intervals(intervals))
        object.__setattr__(self, "grid_density", float(grid_density))

    @property
    def total_length(self) -> float:
        return sum(hi - lo for lo, hi in self.intervals)

    def grid_parts(self) -> list[np.ndarray]:
        parts = []
        for lo, hi in self.intervals:
            if hi == lo:
                parts.append(np.array([lo]))
            else:
                n = max(2, int(np.ceil((hi - lo) * self.grid_density)) + 1)
                parts.append(np.linspace(lo, hi, n))
        return parts

    def grid(self) -> np.ndarray:
        return np.concatenate(self.grid_parts())

    def contains(self, x: float, tol: float = 1e-12) -> bool:
        return any(lo - tol <= x <= hi + tol for lo, hi in self.intervals)


class BasisFamily:
    """K+1 continuous basis functions; evaluators accept scalars or arrays."""

    def __init__(self, evaluators: Sequence[Callable]):
        if len(evaluators) == 0:
            raise ValueError("need at least one basis function")
        self.evaluators = tuple(evaluators)

    @property
    def order(self) -> int:
        return len(self.evaluators) - 1

    def matrix(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        cols = []
        for ev in self.evaluators:
            v = np.asarray(ev(x), dtype=complex)
            cols.append(np.broadcast_to(v, x.shape))
        return np.column_stack(cols)

    def row(self, x: float) -> np.ndarray:
        return np.array([complex(ev(x)) for ev in self.evaluators])

    @classmethod
    def monomials(cls, order: int) -> "BasisFamily":
        return cls([(lambda x, k=k: np.asarray(x) ** k) for k in range(order + 1)])

    @classmethod
    def cosines(cls, order: int) -> "BasisFamily":
        return cls([(lambda w, k=k: np.cos(k * np.asarray(w, dtype=float))) for k in range(order + 1)])

    @classmethod
    def response_powers(cls, response: Callable, order: int) -> "BasisFamily":
        return cls([(lambda w, k=k: np.asarray(response(w)) ** k) for k in range(order + 1)])


@dataclass
class RemezTrace:
    """Per-iteration record of the exchange loop."""

    ref_sizes: list = field(default_factory=list)
    discrete_deltas: list = field(default_factory=list)
    continuum_devs: list = field(default_factory=list)
    new_points: list = field(default_factory=list)
    converged: bool = False

    @property
    def iterations(self) -> int:
        return len(self.discrete_deltas)


def _golden_max_vec(
    fn: Callable[[np.ndarray], np.ndarray],
    lo: np.ndarray,
    hi: np.ndarray,
    steps: int = 24,
) -> tuple[np.ndarray, np.ndarray]:
    """Golden-section maximization run in lockstep over a batch of brackets.

    ``fn`` is evaluated once per step on a vector holding one probe point
    per bracket, which keeps the refinement cost at ``steps`` vectorized
    evaluations regardless of how many extrema are polished.
    """
    a = np.asarray(lo, dtype=float).copy()
    b = np.asarray(hi, dtype=float).copy()
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1 = np.asarray(fn(x1), dtype=float)
    f2 = np.asarray(fn(x2), dtype=float)
    for _ in range(steps):
        take = f1 < f2
        a = np.where(take, x1, a)
        b = np.where(take, b, x2)
        x1n = np.where(take, x2, b - _GOLDEN * (b - a))
        x2n = np.where(take, a + _GOLDEN * (b - a), x1)
        probe = np.where(take, x2n, x1n)
        fp = np.asarray(fn(probe), dtype=float)
        f1n = np.where(take, f2, fp)
        f2n = np.where(take, fp, f1)
        x1, x2, f1, f2 = x1n, x2n, f1n, f2n
    pick1 = f1 >= f2
    return np.where(pick1, x1, x2), np.where(pick1, f1, f2)


def _local_maxima(values: np.ndarray) -> np.ndarray:
    """Indices of local maxima of a sampled function, endpoints included."""
    if values.size == 1:
        return np.array([0])
    up = np.empty(values.size, dtype=bool)
    down = np.empty(values.size, dtype=bool)
    up[0] = True
    up[1:] = values[1:] >= values[:-1]
    down[-1] = True
    down[:-1] = values[:-1] >= values[1:]
    return np.flatnonzero(up & down)


def _scan_and_polish(
    abs_fn: Callable[[np.ndarray], np.ndarray],
    parts: list[np.ndarray],
    abs_values: np.ndarray,
    margin: float = 0.2,
    max_candidates: int = 512,
) -> tuple[float, float]:
    """Max of |residual|: dense grid scan plus golden refinement.

    Every grid-local maximum within ``margin`` (relative) of the grid max
    is refined; near-equiripple residuals have many same-height extrema and
    polishing only the leader would systematically under-report the sup.
    ``abs_fn`` must accept arrays.
    """
    offsets = np.cumsum([0] + [p.size for p in parts])
    grid = np.concatenate(parts)

    candidates: list[int] = []
    for part in range(len(parts)):
        lo_i, hi_i = offsets[part], offsets[part + 1]
        local = _local_maxima(abs_values[lo_i:hi_i]) + lo_i
        candidates.extend(int(i) for i in local)
    vmax = float(abs_values.max())
    span = vmax - float(abs_values.min())
    cut = vmax - margin * max(span, abs(vmax), 1e-300)
    candidates = [i for i in candidates if abs_values[i] >= cut]
    if len(candidates) > max_candidates:
        candidates = sorted(candidates, key=lambda i: -abs_values[i])[:max_candidates]

    best_i = int(np.argmax(abs_values))
    best_x = float(grid[best_i])
    best_v = vmax

    los, his = [], []
    for idx in candidates:
        part = int(np.searchsorted(offsets, idx, side="right")) - 1
        lo_i, hi_i = offsets[part], offsets[part + 1] - 1
        if hi_i == lo_i:
            continue
        los.append(grid[max(idx - 1, lo_i)])
        his.append(grid[min(idx + 1, hi_i)])
    if los:
        xs, vs = _golden_max_vec(abs_fn, np.array(los), np.array(his))
        j = int(np.argmax(vs))
        if vs[j] > best_v:
            best_x, best_v = float(xs[j]), float(vs[j])
    return best_x, best_v


def _residual_abs_fn(f: np.ndarray, basis: BasisFamily, target: Callable) -> Callable:
    f = np.asarray(f)

    def abs_fn(xs):
        xs = np.asarray(xs, dtype=float)
        t = np.broadcast_to(np.asarray(target(xs), dtype=complex), xs.shape)
        return np.abs(t - basis.matrix(xs) @ f)

    return abs_fn


def argmax_deviation(
    f: np.ndarray,
    basis: BasisFamily,
    target: Callable,
    domain: CompactSet,
) -> tuple[float, float]:
    """Location and size of the largest fit error over the compact set.

    Dense grid scan followed by golden-section refinement inside the
    bracketing grid cells of every near-maximal local extremum.
    """
    parts = domain.grid_parts()
    grid = np.concatenate(parts)
    abs_fn = _residual_abs_fn(f, basis, target)
    return _scan_and_polish(abs_fn, parts, abs_fn(grid))


def max_abs_on_set(fn: Callable, domain: CompactSet) -> float:
    """Max of |fn| over the set: grid scan plus golden polish (fn vectorized)."""
    parts = domain.grid_parts()
    grid = np.concatenate(parts)

    def abs_fn(xs):
        xs = np.asarray(xs, dtype=float)
        return np.abs(np.broadcast_to(np.asarray(fn(xs)), xs.shape))

    _, dev = _scan_and_polish(abs_fn, parts, abs_fn(grid))
    return dev


def min_max_on_set(fn: Callable, domain: CompactSet) -> tuple[float, float]:
    """Range of a real-valued function over the set, with golden polish."""
    parts = domain.grid_parts()
    grid = np.concatenate(parts)

    def real_fn(xs):
        xs = np.asarray(xs, dtype=float)
        return np.real(np.broadcast_to(np.asarray(fn(xs)), xs.shape))

    def neg_fn(xs):
        return -real_fn(xs)

    vals = real_fn(grid)
    _, hi = _scan_and_polish(real_fn, parts, vals)
    _, lo_neg = _scan_and_polish(neg_fn, parts, -vals)
    return -lo_neg, hi


def _initial_reference(
    grid: np.ndarray,
    U_grid: np.ndarray,
    domain: CompactSet,
    order: int,
) -> list[int]:
    """K+2 grid indices spread proportionally to interval lengths, then
    greedily augmented until the basis rows have full column rank."""
    parts = domain.grid_parts()
    offsets = np.cumsum([0] + [p.size for p in parts])
    lengths = np.array([hi - lo for lo, hi in domain.intervals])
    want = order + 2

    if lengths.sum() == 0:
        weights = np.ones(len(parts)) / len(parts)
    else:
        weights = lengths / lengths.sum()
    counts = np.maximum(1, np.floor(weights * want).astype(int))
    while counts.sum() < want:
        counts[int(np.argmax(weights * want - counts))] += 1
    while counts.sum() > want and np.any(counts > 1):
        counts[int(np.argmax(counts))] -= 1

    indices: list[int] = []
    for part, cnt in enumerate(counts):
        size = parts[part].size
        cnt = min(cnt, size)
        local = np.unique(np.round(np.linspace(0, size - 1, cnt)).astype(int))
        indices.extend(int(offsets[part] + i) for i in local)
    indices = sorted(set(indices))

    def row_space_rank(idx: list[int]) -> int:
        return column_rank(U_grid[idx, :])

    rank = row_space_rank(indices)
    available = np.setdiff1d(np.arange(grid.size), indices)
    while rank < order + 1 and available.size:
        # add the grid row with the largest component orthogonal to the
        # current numerical row space (same 1e-10 tolerance as the rank test)
        R = U_grid[indices, :]
        _, s, vh = np.linalg.svd(R, full_matrices=False)
        scale = s[0] if s.size else 1.0
        V = vh[s > max(scale, 1e-300) * 1e-10]
        cand = U_grid[available, :]
        proj = cand - (cand @ V.conj().T) @ V
        norms = np.linalg.norm(proj, axis=1)
        j = int(np.argmax(norms))
        if norms[j] <= 1e-10 * max(scale, 1.0):
            break
        indices.append(int(available[j]))
        available = np.delete(available, j)
        rank = row_space_rank(indices)

    if rank < order + 1:
        raise RankDeficient(
            f"cannot build a rank-{order + 1} reference set on this grid"
        )
    return sorted(indices)


def remez_first(
    basis: BasisFamily,
    target: Callable,
    domain: CompactSet,
    tol: float = 1e-8,
    max_iter: int = 200,
) -> tuple[MinimaxSolution, RemezTrace]:
    """Minimax fit of the basis span to the target over a compact set.

    Iterates: solve the discrete minimax problem on the current reference
    points, locate the worst deviation on the continuum, append it.  Stops
    when the discrete deviation has stabilized (relative change < tol) and
    the continuum deviation exceeds it by less than 10*tol relative, so the
    returned fit is within (1 + O(tol)) of optimal on the whole set.

    The reference construction is deterministic: identical inputs use the
    same initial points, so repeated invocations are reproducible.
    """
    K = basis.order
    parts = domain.grid_parts()
    grid = np.concatenate(parts)
    if grid.size < K + 1:
        raise RankDeficient(
            f"grid has {grid.size} points; need at least {K + 1} for order {K}"
        )
    U_grid = basis.matrix(grid)
    d_grid = np.asarray(target(grid), dtype=complex)
    d_grid = np.broadcast_to(d_grid, grid.shape).copy()
    real_mode = not (np.any(U_grid.imag) or np.any(d_grid.imag))

    ref_idx = _initial_reference(grid, U_grid, domain, K)
    ref_x = [float(grid[i]) for i in ref_idx]
    ref_U = [U_grid[i, :] for i in ref_idx]
    ref_d = [complex(d_grid[i]) for i in ref_idx]

    trace = RemezTrace()
    sol = None
    prev_delta = None

    for it in range(1, max_iter + 1):
        inst = DiscreteInstance(np.vstack(ref_U), np.array(ref_d))
        if real_mode:
            sol = solve_real(
                DiscreteInstance(np.vstack(ref_U).real, np.array(ref_d).real)
            )
        else:
            sol = solve_complex(inst, refine_tol=max(tol * 1e-2, 1e-12))

        resid = d_grid - U_grid @ sol.f
        abs_fn = _residual_abs_fn(sol.f, basis, target)
        x_star, dev = _scan_and_polish(abs_fn, parts, np.abs(resid))
        dev = max(dev, sol.delta)  # restriction to a subset never increases the sup

        trace.ref_sizes.append(len(ref_x))
        trace.discrete_deltas.append(sol.delta)
        trace.continuum_devs.append(dev)
        trace.new_points.append(x_star)

        gap_ok = (dev - sol.delta) <= 10.0 * tol * max(sol.delta, 1e-30)
        change_ok = (
            prev_delta is None
            or abs(sol.delta - prev_delta) <= tol * max(sol.delta, 1e-30)
        )
        if gap_ok and change_ok:
            trace.converged = True
            break
        prev_delta = sol.delta
        if any(x_star == x for x in ref_x):
            # exact duplicate: the grid cannot localize a better point
            trace.converged = True
            break
        ref_x.append(x_star)
        ref_U.append(basis.row(x_star))
        ref_d.append(complex(target(x_star)))

    return sol, trace
