"""Approximate functional decomposition of FIR filters.

Given taps h and factor degrees (K, M), find polynomials F, G with
deg F = K, deg G = M minimizing the coefficient 2-norm of h - F(G).  The
composition is linear in F, so the workhorse alternates an exact
least-squares update of F with one damped Gauss-Newton step on G.  The
affine ambiguity F(G) = F((G - b)/a scaled back) is removed by keeping G
monic with zero constant term during optimization.

Three pathways: decompose the z-transform coefficients directly, decompose
the cos(omega)-polynomial of an even-symmetric filter, or split a symmetric
filter as C(z) + C(z^{-1}) and decompose C, which keeps the reconstruction
exactly symmetric.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegreeMismatch, NotSymmetric
from .poly import ChebyshevExpansion, RealPolynomial, compose_poly, cos_power_expansion, eval_poly

__all__ = [
    "DecompositionResult",
    "SymmetricSplit",
    "SymmetricDecomposition",
    "als_decompose",
    "decompose_direct",
    "decompose_chebyshev",
    "split_symmetric",
    "decompose_symmetric",
]


@dataclass
class DecompositionResult:
    F: RealPolynomial
    G: RealPolynomial
    reconstruction: RealPolynomial
    l2_error: float
    iterations: int
    converged: bool
    degenerate: bool = False
    response_error: float | None = None


@dataclass
class SymmetricSplit:
    """Half sequence C with h_shifted(z) = C(z) + C(z^{-1})."""

    C: RealPolynomial
    L: int


@dataclass
class SymmetricDecomposition:
    result: DecompositionResult
    reconstruction: RealPolynomial
    taps: np.ndarray  # untrimmed length 2KM+1, symmetric by construction
    response_error: float


def _target_vector(h, K: int, M: int) -> np.ndarray:
    coeffs = h.coeffs if isinstance(h, (RealPolynomial, ChebyshevExpansion)) else np.asarray(h, float)
    if coeffs.size - 1 > K * M:
        raise DegreeMismatch(
            f"degree {coeffs.size - 1} target cannot equal a composition of degrees {K}*{M}"
        )
    t = np.zeros(K * M + 1)
    t[: coeffs.size] = coeffs
    return t


def _normalize_init(g0, M: int) -> np.ndarray:
    """Free coefficients g_1..g_{M-1} of the monic, zero-constant form."""
    if g0 is None:
        return np.zeros(max(M - 1, 0))
    arr = np.asarray(
        g0.coeffs if isinstance(g0, RealPolynomial) else g0, dtype=float
    )
    if arr.size != M + 1 or arr[-1] == 0.0:
        raise ValueError(f"initial G must have degree exactly {M}")
    arr = arr / arr[-1]
    return arr[1:M].copy()


def _g_full(g_free: np.ndarray, M: int) -> np.ndarray:
    g = np.zeros(M + 1)
    g[-1] = 1.0
    if M >= 1:
        g[1:M] = g_free
    return g


def _powers(g: np.ndarray, K: int, size: int) -> np.ndarray:
    """Columns: coefficients of g^k, k = 0..K, padded to ``size``."""
    C = np.zeros((size, K + 1))
    p = np.array([1.0])
    for k in range(K + 1):
        C[: p.size, k] = p
        if k < K:
            p = np.convolve(p, g)
    return C


def als_decompose(
    h,
    K: int,
    M: int,
    init=None,
    tol: float = 1e-10,
    max_iter: int = 500,
) -> DecompositionResult:
    """Alternating least squares with a damped Gauss-Newton G step.

    F <- exact linear least squares given G; G <- one Levenberg-damped
    Gauss-Newton step on the coefficient residual.  G steps are accepted
    only on descent, so the residual is non-increasing.  Terminates when
    the relative error change drops below ``tol``.
    """
    if K < 1 or M < 1:
        raise ValueError("factor degrees must be at least 1")
    t = _target_vector(h, K, M)
    size = K * M + 1
    scale = max(np.linalg.norm(t), 1e-300)

    g_free = _normalize_init(init, M)
    lam = 1e-3
    f = np.zeros(K + 1)
    err = np.inf
    iterations = 0
    converged = False
    singular = False

    for it in range(1, max_iter + 1):
        iterations = it
        g = _g_full(g_free, M)
        C = _powers(g, K, size)
        f, *_ = np.linalg.lstsq(C, t, rcond=None)
        r = t - C @ f
        new_err = float(np.linalg.norm(r))

        if err - new_err <= tol * max(new_err, 1e-300) and it > 1:
            err = min(err, new_err)
            converged = True
            break
        err = new_err
        if err <= 1e-14 * scale:
            converged = True
            break

        if M >= 2:
            # Jacobian of F(G) w.r.t. g_j is F'(G) shifted by j positions
            fprime = f[1:] * np.arange(1, K + 1)
            Cm1 = _powers(g, K - 1, size)
            pf = Cm1 @ fprime
            J = np.zeros((size, M - 1))
            for j in range(1, M):
                J[j:, j - 1] = pf[: size - j]
            accepted = False
            for _ in range(10):
                A = J.T @ J + lam * np.eye(M - 1)
                try:
                    step = np.linalg.solve(A, J.T @ r)
                except np.linalg.LinAlgError:
                    lam *= 10.0
                    continue
                cand = g_free + step
                Cc = _powers(_g_full(cand, M), K, size)
                fc, *_ = np.linalg.lstsq(Cc, t, rcond=None)
                cand_err = float(np.linalg.norm(t - Cc @ fc))
                if cand_err < err:
                    g_free = cand
                    lam = max(lam / 3.0, 1e-12)
                    accepted = True
                    break
                lam *= 10.0
            if not accepted:
                singular = True
                converged = True
                break

    g = _g_full(g_free, M)
    C = _powers(g, K, size)
    f, *_ = np.linalg.lstsq(C, t, rcond=None)
    r = t - C @ f
    err = float(np.linalg.norm(r))
    F = RealPolynomial(f)
    G = RealPolynomial(g)
    recon = compose_poly(F, G)
    degenerate = bool(abs(f[-1]) <= 1e-12 * max(np.abs(f).max(), 1e-300)) or singular
    return DecompositionResult(
        F=F,
        G=G,
        reconstruction=recon,
        l2_error=err,
        iterations=iterations,
        converged=converged,
        degenerate=degenerate,
    )


def _series_root_init(t: np.ndarray, K: int, M: int) -> np.ndarray | None:
    """Monic K-th root of the reversed series: exact for decomposable targets.

    If h = F(G) with G monic then the top M+1 coefficients of h/h_top agree
    with those of G^K up to scale; the root is extracted term by term
    (J.C.P. Miller's recurrence), landing very close to a good basin for
    near-decomposable inputs.
    """
    if t[-1] == 0.0:
        return None
    phi = (t / t[-1])[::-1]  # descending: 1, a1, a2, ...
    p = 1.0 / K
    psi = np.zeros(M + 1)
    psi[0] = 1.0
    for n in range(1, M + 1):
        acc = 0.0
        for i in range(1, n + 1):
            a_i = phi[i] if i < phi.size else 0.0
            acc += ((p + 1.0) * i - n) * a_i * psi[n - i]
        psi[n] = acc / n
    g = psi[::-1].copy()  # ascending, monic
    return g[1:M].copy()


def _multi_start(
    t_like,
    K: int,
    M: int,
    n_starts: int,
    seed: int,
    tol: float,
    max_iter: int,
) -> DecompositionResult:
    t = _target_vector(t_like, K, M)
    scale = max(np.linalg.norm(t), 1e-300)
    rng = np.random.default_rng(seed)

    starts: list[np.ndarray] = []
    base = _series_root_init(t, K, M)
    if base is not None and np.all(np.isfinite(base)):
        starts.append(base)
    else:
        base = np.zeros(max(M - 1, 0))
        starts.append(base)
    spread = max(1.0, float(np.abs(base).max(initial=0.0)))
    while len(starts) < n_starts:
        starts.append(base + spread * rng.standard_normal(max(M - 1, 0)))

    best: DecompositionResult | None = None
    for g_free in starts:
        init = RealPolynomial(_g_full(np.asarray(g_free, float), M))
        res = als_decompose(t, K, M, init=init, tol=tol, max_iter=max_iter)
        if best is None or res.l2_error < best.l2_error:
            best = res
        if best.l2_error <= 1e-10 * scale:
            break
    return best


def decompose_direct(
    h,
    K: int,
    M: int,
    *,
    n_starts: int = 8,
    seed: int = 0,
    tol: float = 1e-10,
    max_iter: int = 500,
    response_grid: int = 1024,
) -> DecompositionResult:
    """Best multi-start decomposition of the tap vector itself.

    Also reports the worst-case frequency-response error of the
    reconstruction, since coefficient proximity and response proximity can
    differ substantially.
    """
    res = _multi_start(h, K, M, n_starts, seed, tol, max_iter)
    w = np.linspace(0.0, np.pi, response_grid)
    z = np.exp(-1j * w)
    coeffs = h.coeffs if isinstance(h, RealPolynomial) else np.asarray(h, float)
    orig = eval_poly(coeffs, z)
    rec = eval_poly(res.reconstruction, z)
    res.response_error = float(np.abs(orig - rec).max())
    return res


def decompose_chebyshev(
    h,
    K: int,
    M: int,
    *,
    n_starts: int = 8,
    seed: int = 0,
    tol: float = 1e-10,
    max_iter: int = 500,
    response_grid: int = 1024,
) -> DecompositionResult:
    """Decompose the cos(omega)-polynomial of an even-symmetric filter.

    The coefficient error is measured on the cos-power expansion B; the
    reported response error is measured where it matters, on x = cos(omega)
    in [-1, 1], and can be much larger than the coefficient error.
    """
    B = cos_power_expansion(h)
    res = _multi_start(B, K, M, n_starts, seed, tol, max_iter)
    x = np.cos(np.linspace(0.0, np.pi, response_grid))
    res.response_error = float(
        np.abs(eval_poly(B, x) - eval_poly(res.reconstruction, x)).max()
    )
    return res


def split_symmetric(h) -> SymmetricSplit:
    """Split an even-symmetric filter as h_shifted(z) = C(z) + C(z^{-1}).

    C keeps the causal half of the centered sequence, with the center tap
    halved so the overlap at z^0 reconstructs exactly.
    """
    coeffs = h.coeffs if isinstance(h, RealPolynomial) else np.asarray(h, dtype=float)
    if coeffs.size % 2 == 0:
        raise NotSymmetric("need an odd-length (even-order) tap vector")
    L = (coeffs.size - 1) // 2
    asym = np.abs(coeffs - coeffs[::-1])
    if np.any(asym > 1e-10):
        raise NotSymmetric(f"max asymmetry {asym.max():.3e} exceeds 1e-10")
    c = coeffs[L:].copy()
    c[0] = coeffs[L] / 2.0
    return SymmetricSplit(C=RealPolynomial(c), L=L)


def _zero_phase(taps: np.ndarray, w: np.ndarray) -> np.ndarray:
    center = (taps.size - 1) // 2
    k = np.arange(taps.size) - center
    return np.cos(np.multiply.outer(w, k)) @ taps


def decompose_symmetric(
    h,
    K: int,
    M: int,
    *,
    n_starts: int = 8,
    seed: int = 0,
    tol: float = 1e-10,
    max_iter: int = 500,
    response_grid: int = 1024,
) -> SymmetricDecomposition:
    """Symmetry-preserving decomposition via the half sequence C.

    C is decomposed as F(G); the filter is rebuilt as F(G(z)) + F(G(z^{-1}))
    shifted back to causal, whose coefficients are symmetric by
    construction (not merely to numerical precision).
    """
    split = split_symmetric(h)
    res = _multi_start(split.C, K, M, n_starts, seed, tol, max_iter)

    r = np.zeros(K * M + 1)
    rc = res.reconstruction.coeffs
    r[: rc.size] = rc
    sym = np.concatenate([r[:0:-1], [2.0 * r[0]], r[1:]])
    reconstruction = RealPolynomial(sym)

    coeffs = h.coeffs if isinstance(h, RealPolynomial) else np.asarray(h, dtype=float)
    w = np.linspace(0.0, np.pi, response_grid)
    response_error = float(
        np.abs(_zero_phase(coeffs, w) - _zero_phase(sym, w)).max()
    )
    return SymmetricDecomposition(
        result=res,
        reconstruction=reconstruction,
        taps=sym,
        response_error=response_error,
    )
