"""Discrete minimax fitting: min over real f of max_n |d_n - sum_k f_k U_{kn}|.

Real-valued data reduces to a linear program; complex-valued data is handled
by an outer polygonal (facet) linearization of each modulus constraint,
sharpened by rounds of residual-aligned cutting planes.  Both are backed by
an in-house dense two-phase simplex.  The epigraph LPs have many constraints
and few unknowns, so they are solved through their duals (few rows, many
columns) and the primal solution is read off the simplex multipliers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import Infeasible, RankDeficient, Unbounded

__all__ = [
    "DiscreteInstance",
    "MinimaxSolution",
    "solve_real",
    "solve_complex",
    "lp_simplex",
]

_RANK_TOL = 1e-10
_PIVOT_TOL = 1e-10


@dataclass
class DiscreteInstance:
    """Point-wise fitting data: U has shape (points, basis), d has one entry per point."""

    U: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        self.U = np.atleast_2d(np.asarray(self.U))
        self.d = np.atleast_1d(np.asarray(self.d))
        if self.U.shape[0] != self.d.shape[0]:
            raise ValueError("U and d disagree on the number of points")

    @property
    def n_points(self) -> int:
        return self.U.shape[0]

    @property
    def order(self) -> int:
        """K: one less than the number of basis functions."""
        return self.U.shape[1] - 1


@dataclass
class MinimaxSolution:
    f: np.ndarray
    delta: float
    active_indices: np.ndarray


@dataclass
class SimplexResult:
    x: np.ndarray
    objective: float
    multipliers: np.ndarray
    basis: np.ndarray


def column_rank(A: np.ndarray, tol: float = _RANK_TOL) -> int:
    """Column rank by modified Gram-Schmidt with column pivoting."""
    W = np.asarray(A, dtype=complex).copy()
    n_cols = W.shape[1]
    rank = 0
    first_pivot = None
    for _ in range(n_cols):
        norms = np.linalg.norm(W[:, rank:], axis=0)
        j = int(np.argmax(norms))
        pivot = norms[j]
        if first_pivot is None:
            first_pivot = pivot
        if pivot <= tol * max(first_pivot, 1e-300):
            break
        W[:, [rank, rank + j]] = W[:, [rank + j, rank]]
        q = W[:, rank] / pivot
        if rank + 1 < n_cols:
            W[:, rank + 1 :] -= np.outer(q, q.conj() @ W[:, rank + 1 :])
        rank += 1
    return rank


def _check_instance(inst: DiscreteInstance) -> None:
    if inst.n_points < inst.order + 1:
        raise RankDeficient(
            f"{inst.n_points} points cannot determine {inst.order + 1} coefficients"
        )
    if column_rank(inst.U) < inst.order + 1:
        raise RankDeficient("basis matrix does not have full column rank")


class _Tableau:
    """Dense simplex tableau with the artificial identity block retained."""

    __slots__ = ("T", "basis", "n", "m")

    def __init__(self, A: np.ndarray, b: np.ndarray, basis: np.ndarray | None = None):
        m, n = A.shape
        self.n = n
        self.m = m
        if basis is None:
            self.T = np.empty((m, n + m + 1))
            self.T[:, :n] = A
            self.T[:, n : n + m] = np.eye(m)
            self.T[:, -1] = b
            self.basis = np.arange(n, n + m)
        else:
            # rebuild the canonical form for a known feasible basis
            full = np.hstack([A, np.eye(m)])
            B = full[:, basis]
            Binv = np.linalg.inv(B)
            self.T = np.empty((m, n + m + 1))
            self.T[:, : n + m] = Binv @ full
            self.T[:, -1] = Binv @ b
            self.basis = np.asarray(basis).copy()

    def pivot(self, row: int, col: int) -> None:
        T = self.T
        T[row] /= T[row, col]
        factors = T[:, col].copy()
        factors[row] = 0.0
        T -= np.outer(factors, T[row])
        self.T = T
        self.basis[row] = col

    def run(self, costs: np.ndarray, tol: float = _PIVOT_TOL, max_iter: int = 200_000) -> None:
        """Minimize costs over the current feasible basis.

        Dantzig pricing, switching permanently to Bland's rule after a
        stretch of degenerate pivots so cycling cannot occur.  Artificial
        columns never re-enter the basis.
        """
        T, basis, n, m = self.T, self.basis, self.n, self.m
        stall = 0
        bland = False
        prev_obj = np.inf
        for _ in range(max_iter):
            reduced = costs[:n] - costs[basis] @ T[:, :n]
            if bland:
                candidates = np.flatnonzero(reduced < -tol)
                if candidates.size == 0:
                    return
                col = int(candidates[0])
            else:
                col = int(np.argmin(reduced))
                if reduced[col] >= -tol:
                    return
            colvals = T[:, col]
            pos = colvals > tol
            if not np.any(pos):
                raise Unbounded("LP is unbounded along an entering column")
            ratios = np.full(m, np.inf)
            ratios[pos] = T[pos, -1] / colvals[pos]
            best = ratios.min()
            ties = np.flatnonzero(ratios <= best + 1e-12 * (1.0 + abs(best)))
            row = int(ties[np.argmin(basis[ties])])
            self.pivot(row, col)
            obj = costs[basis] @ T[:, -1]
            if obj >= prev_obj - 1e-13:
                stall += 1
                if stall > 200:
                    bland = True
            else:
                stall = 0
            prev_obj = obj
        raise RuntimeError("simplex iteration limit exceeded")

    def extract(self, c: np.ndarray) -> SimplexResult:
        n, m = self.n, self.m
        costs = np.concatenate([c, np.zeros(m)])
        x = np.zeros(n)
        in_struct = self.basis < n
        x[self.basis[in_struct]] = self.T[in_struct, -1]
        multipliers = costs[self.basis] @ self.T[:, n : n + m]
        return SimplexResult(
            x=x, objective=float(c @ x), multipliers=multipliers, basis=self.basis.copy()
        )


def _simplex_standard(
    A: np.ndarray,
    b: np.ndarray,
    c: np.ndarray,
    *,
    warm_basis: np.ndarray | None = None,
    tol: float = _PIVOT_TOL,
) -> SimplexResult:
    """Solve min c.x s.t. Ax = b, x >= 0 for b >= 0 after row sign flips.

    With ``warm_basis`` (feasible for the current A, b) phase 1 is skipped.
    The caller receives multipliers in terms of the original row signs.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    m, n = A.shape

    flip = b < 0
    A = np.where(flip[:, None], -A, A)
    b = np.abs(b)

    tab = None
    if warm_basis is not None:
        try:
            cand = _Tableau(A, b, basis=warm_basis)
        except np.linalg.LinAlgError:
            cand = None
        if cand is not None:
            rhs = cand.T[:, -1]
            if rhs.min() >= -1e-9:
                cand.T[:, -1] = np.maximum(rhs, 0.0)
                tab = cand
    if tab is None:
        tab = _Tableau(A, b)
        costs1 = np.concatenate([np.zeros(n), np.ones(m)])
        tab.run(costs1, tol=tol)
        if costs1[tab.basis] @ tab.T[:, -1] > 1e-8 * max(1.0, b.max(initial=0.0)):
            raise Infeasible("phase-1 optimum is positive")
        # pivot remaining artificials out where possible; rows that cannot be
        # pivoted are redundant and stay inert at zero
        for row in range(m):
            if tab.basis[row] >= n:
                entries = np.abs(tab.T[row, :n])
                j = int(np.argmax(entries))
                if entries[j] > tol:
                    tab.pivot(row, j)

    costs2 = np.concatenate([c, np.zeros(m)])
    tab.run(costs2, tol=tol)
    res = tab.extract(c)
    res.multipliers = np.where(flip, -res.multipliers, res.multipliers)
    return res


def lp_simplex(A, b, c) -> np.ndarray:
    """Optimal basic solution of the standard-form LP min c.x, Ax = b, x >= 0."""
    return _simplex_standard(A, b, c).x


def _solve_epigraph(
    G: np.ndarray, g: np.ndarray, n_free: int, warm_basis: np.ndarray | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """min v[-1] over v in R^{n_free} subject to G v >= g.

    Solved through the dual max g.y s.t. G'y = e_last, y >= 0; the primal
    vertex is -multipliers of the equality rows.  Returns (v, dual basis).
    """
    b_dual = np.zeros(n_free)
    b_dual[-1] = 1.0
    res = _simplex_standard(G.T, b_dual, -g, warm_basis=warm_basis)
    return -res.multipliers, res.basis


def solve_real(inst: DiscreteInstance) -> MinimaxSolution:
    """Exact discrete minimax for real-valued data (LP epigraph formulation)."""
    if np.iscomplexobj(inst.U) and np.any(inst.U.imag != 0.0):
        raise ValueError("solve_real requires exactly real basis values")
    if np.iscomplexobj(inst.d) and np.any(inst.d.imag != 0.0):
        raise ValueError("solve_real requires exactly real data values")
    U = inst.U.real.astype(float)
    d = inst.d.real.astype(float)
    _check_instance(inst)

    n_pts, n_basis = U.shape
    ones = np.ones((n_pts, 1))
    G = np.vstack([np.hstack([U, ones]), np.hstack([-U, ones])])
    g = np.concatenate([d, -d])
    v, _ = _solve_epigraph(G, g, n_basis + 1)
    f = v[:-1]

    r = d - U @ f
    delta = float(np.abs(r).max())
    if abs(delta - v[-1]) > 1e-9 * max(1.0, delta):
        raise RuntimeError(
            f"recomputed deviation {delta:.3e} disagrees with LP objective {v[-1]:.3e}"
        )
    active = np.flatnonzero(np.abs(r) >= delta * (1.0 - 1e-8))
    _assert_certificate(np.abs(r), delta, n_basis, np.abs(d).max(initial=0.0))
    return MinimaxSolution(f=f, delta=delta, active_indices=active)


def _assert_certificate(abs_r: np.ndarray, delta: float, n_basis: int, scale: float) -> None:
    # finite-dimensional Chebyshev characterization on point sets: a vertex
    # optimum has at least K+2 active points unless the fit is exact
    if delta <= 1e-12 * max(1.0, scale):
        return
    tol = 1e-7 * max(delta, 1.0)
    n_active = int(np.count_nonzero(abs_r >= delta - tol))
    if n_active < n_basis + 1:
        raise RuntimeError(
            f"optimality certificate failed: {n_active} active points "
            f"for {n_basis} coefficients"
        )


def solve_complex(
    inst: DiscreteInstance, facets: int = 64, refine_tol: float = 1e-9
) -> MinimaxSolution:
    """Discrete minimax with complex data and real coefficients.

    Each modulus constraint |r_n| <= delta is replaced by the outer polygon
    Re(e^{j theta_p} r_n) <= delta over ``facets`` equispaced angles, which
    certifies the optimum up to a factor sec(pi/facets).  Rounds of extra
    facets aligned with the current residual angles then close that gap to
    ``refine_tol`` relative (the LP value lower-bounds the true optimum, so
    delta - lp_value bounds the suboptimality); refinement rounds reuse the
    previous LP basis, so they cost only a few pivots each.  The reported
    delta is always the recomputed true maximum modulus.
    """
    if facets < 8:
        raise ValueError("facets must be at least 8")
    U = inst.U.astype(complex)
    d = inst.d.astype(complex)
    _check_instance(inst)

    n_pts, n_basis = U.shape
    theta = 2.0 * np.pi * np.arange(facets) / facets
    phases = np.exp(1j * theta)
    # rows Re(ph * U_n) f + delta >= Re(ph * d_n), one per (point, angle)
    A0 = (phases[:, None, None] * U[None, :, :]).real.reshape(-1, n_basis)
    g0 = (phases[:, None] * d[None, :]).real.ravel()

    G = np.hstack([A0, np.ones((A0.shape[0], 1))])
    g = g0
    f = np.zeros(n_basis)
    basis = None
    prev_gap = np.inf
    for _ in range(40):
        v, basis = _solve_epigraph(G, g, n_basis + 1, warm_basis=basis)
        f = v[:-1]
        r = d - U @ f
        delta = float(np.abs(r).max())
        gap = delta - v[-1]
        if gap <= 1e-13 + refine_tol * delta:
            break
        if gap > 0.8 * prev_gap and gap <= 1e-6 * delta:
            # progress has hit the LP noise floor
            break
        prev_gap = gap
        align = np.exp(-1j * np.angle(r))
        a_new = (align[:, None] * U).real
        g_new = (align * d).real
        # appending primal rows appends dual columns; artificial indices in
        # the warm basis shift up by the number of new columns
        basis = np.where(basis >= G.shape[0], basis + n_pts, basis)
        G = np.vstack([G, np.hstack([a_new, np.ones((n_pts, 1))])])
        g = np.concatenate([g, g_new])

    r = d - U @ f
    delta = float(np.abs(r).max())
    active = np.flatnonzero(np.abs(r) >= delta * (1.0 - 1e-8))
    return MinimaxSolution(f=f, delta=delta, active_indices=active)
