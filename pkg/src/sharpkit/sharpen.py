"""Frequency-response sharpening: best polynomial F so that F(G) matches a target.

Given a subfilter response G and desired band targets H, the sharpened
response is sum_k f_k G^k; the coefficients minimize the worst-case band
error.  Two routes are provided: the direct route fits the composition on
the frequency axis (works for arbitrary complex G), and for real zero-phase
subfilters a fast route approximates the ideal outer function on the image
intervals of G instead.  Both land on the same unique optimum when the
images of bands with different targets are disjoint.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .bands import Band, BandSpec
from .errors import QPathUnavailable
from .poly import NotSymmetric, RealPolynomial, TransferFunction, compose_tf, eval_poly, freq_response
from .remez import (
    BasisFamily,
    CompactSet,
    RemezTrace,
    max_abs_on_set,
    min_max_on_set,
    remez_first,
)

__all__ = [
    "SharpenResult",
    "ImageIntervals",
    "sharpen",
    "image_intervals",
    "sharpen_via_q",
    "bilinear_warp",
    "twicing",
    "cascade",
    "tapped_cascade",
]


@dataclass
class SharpenResult:
    F: RealPolynomial
    delta: float
    composed: TransferFunction | None
    trace: RemezTrace


@dataclass
class ImageIntervals:
    """Per-band [min, max] of a real subfilter response."""

    intervals: tuple[tuple[float, float], ...]

    def __iter__(self):
        return iter(self.intervals)


def _as_response(G) -> Callable:
    """Coerce a subfilter argument to a callable omega -> response value."""
    if isinstance(G, TransferFunction):
        return lambda w: freq_response(G, w)
    if hasattr(G, "zero_phase"):
        return G.zero_phase
    if callable(G):
        return G
    raise TypeError(f"cannot interpret {type(G).__name__} as a subfilter response")


def _compose_result(F: RealPolynomial, G) -> TransferFunction | None:
    if isinstance(G, TransferFunction):
        return compose_tf(F, G)
    if hasattr(G, "h"):
        return TransferFunction(tapped_cascade(F, np.asarray(G.h)))
    return None


def _achieved_delta(
    F: RealPolynomial, resp: Callable, spec: BandSpec, domain: CompactSet
) -> float:
    def err(w):
        return eval_poly(F, np.asarray(resp(w))) - spec.desired_at(w)

    return max_abs_on_set(err, domain)


def sharpen(
    G,
    spec: BandSpec,
    K: int,
    *,
    tol: float = 1e-8,
    max_iter: int = 200,
    grid_density: float | None = None,
) -> SharpenResult:
    """Minimax sharpening polynomial of order K for subfilter G.

    G may be a TransferFunction, a designed FIR (its real zero-phase
    response is used), or any callable omega -> complex.  The fit runs on
    the union of the spec bands; transition regions are don't-care.
    """
    if K < 1:
        raise ValueError("polynomial order K must be at least 1")
    resp = _as_response(G)
    domain = spec.compact_set(grid_density)
    basis = BasisFamily.response_powers(resp, K)
    sol, trace = remez_first(basis, spec.desired_at, domain, tol=tol, max_iter=max_iter)
    F = RealPolynomial(sol.f)
    return SharpenResult(
        F=F,
        delta=_achieved_delta(F, resp, spec, domain),
        composed=_compose_result(F, G),
        trace=trace,
    )


def image_intervals(
    G_zero_phase,
    spec: BandSpec,
    *,
    grid_density: float | None = None,
) -> ImageIntervals:
    """Per-band min/max of a real response, by dense grid plus golden polish."""
    resp = _as_response(G_zero_phase)
    out = []
    for band in spec.bands:
        args = (grid_density,) if grid_density is not None else ()
        domain = CompactSet([(band.lo, band.hi)], *args)
        probe = np.asarray(resp(domain.grid()))
        if np.iscomplexobj(probe) and np.abs(probe.imag).max() > 1e-9:
            raise ValueError("image_intervals requires a real response on the bands")
        lo, hi = min_max_on_set(resp, domain)
        out.append((lo, hi))
    return ImageIntervals(intervals=tuple(out))


def sharpen_via_q(
    G_zero_phase,
    spec: BandSpec,
    K: int,
    *,
    tol: float = 1e-8,
    max_iter: int = 200,
    grid_density: float | None = None,
) -> SharpenResult:
    """Sharpening via the image-domain target: fast path for real responses.

    Composing with a real zero-phase response maps each band into an
    interval on the x axis; the optimal F is then the minimax polynomial
    approximation of the function that is the band target on each image
    interval.  Requires images of bands with different targets to be
    disjoint.
    """
    if K < 1:
        raise ValueError("polynomial order K must be at least 1")
    resp = _as_response(G_zero_phase)
    images = image_intervals(G_zero_phase, spec, grid_density=grid_density)

    targets = []
    for band, (xlo, xhi) in zip(spec.bands, images):
        if callable(band.desired):
            raise ValueError("image-domain route needs constant band targets")
        val = complex(band.desired)
        if val.imag != 0:
            raise ValueError("image-domain route needs real band targets")
        targets.append((xlo, xhi, val.real))

    # merge same-target overlaps; different targets must stay disjoint
    merged: list[list[float]] = []
    for xlo, xhi, val in sorted(targets):
        if merged and xlo <= merged[-1][1] + 1e-15:
            if merged[-1][2] != val:
                raise QPathUnavailable(
                    f"band images overlap near x={xlo:.6g} with targets "
                    f"{merged[-1][2]} and {val}"
                )
            merged[-1][1] = max(merged[-1][1], xhi)
        else:
            merged.append([xlo, xhi, val])

    total = sum(hi - lo for lo, hi, _ in merged)
    density = max(4096.0 / np.pi, 256.0 * (K + 1) / max(total, 1e-9))
    x_domain = CompactSet([(lo, hi) for lo, hi, _ in merged], density)

    vals = np.array([v for _, _, v in merged])
    edges = np.array([lo for lo, _, _ in merged])

    def q_target(x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        idx = np.clip(np.searchsorted(edges, x + 1e-15, side="right") - 1, 0, len(vals) - 1)
        out = vals[idx]
        return out if np.asarray(x).ndim else out[0]

    sol, trace = remez_first(
        BasisFamily.monomials(K), q_target, x_domain, tol=tol, max_iter=max_iter
    )
    F = RealPolynomial(sol.f)
    domain = spec.compact_set(grid_density)
    return SharpenResult(
        F=F,
        delta=_achieved_delta(F, resp, spec, domain),
        composed=_compose_result(F, G_zero_phase),
        trace=trace,
    )


def bilinear_warp(G_ct: Callable, spec_ct: Sequence[Band] | BandSpec, c: float = 1.0):
    """Map a continuous-time response onto [-pi, pi] for sharpening.

    Evaluates the continuous-time response at Omega = c * tan(omega / 2)
    and maps band edges by omega = 2 * atan(Omega / c); infinite edges go
    to +/- pi.  The warp is monotone, so the worst-case error profile is
    unchanged and sharpening on omega is equivalent.
    """
    if c <= 0:
        raise ValueError("warp constant c must be positive")
    bands = spec_ct.bands if isinstance(spec_ct, BandSpec) else tuple(spec_ct)

    def warp_edge(Omega: float) -> float:
        if np.isposinf(Omega):
            return np.pi
        if np.isneginf(Omega):
            return -np.pi
        return 2.0 * np.arctan(Omega / c)

    warped = BandSpec(
        [Band(warp_edge(b.lo), warp_edge(b.hi), b.desired) for b in bands]
    )

    def response(omega):
        w = np.asarray(omega, dtype=float)
        return G_ct(c * np.tan(w / 2.0))

    return response, warped


def twicing(G: TransferFunction) -> TransferFunction:
    """The classic 2G - G^2 sharpener (fixes both band centers to first order)."""
    return compose_tf(RealPolynomial([0.0, 2.0, -1.0]), G)


def cascade(G: TransferFunction, n: int) -> TransferFunction:
    """Plain n-fold cascade G^n."""
    if n < 1:
        raise ValueError("cascade length must be at least 1")
    f = np.zeros(n + 1)
    f[n] = 1.0
    return compose_tf(RealPolynomial(f), G)


def tapped_cascade(F: RealPolynomial | Sequence[float], h: Sequence[float]) -> np.ndarray:
    """Causal taps of the sharpened Type-I filter sum_k f_k G^k(z) z^{-(K-k)M}.

    Each power of the subfilter is delay-aligned so all terms share the
    group delay K*M; the zero-phase response of the result is exactly
    F applied to the subfilter's zero-phase response.  Requires symmetric
    odd-length h.
    """
    f = RealPolynomial(F).coeffs if not isinstance(F, RealPolynomial) else F.coeffs
    h = np.asarray(h, dtype=float)
    if h.size % 2 == 0:
        raise NotSymmetric("need odd-length (Type-I) taps")
    if np.abs(h - h[::-1]).max() > 1e-10:
        raise NotSymmetric("taps are not even-symmetric")
    M = (h.size - 1) // 2
    K = f.size - 1
    out = np.zeros(2 * K * M + 1)
    power = np.array([1.0])
    for k in range(K + 1):
        if f[k] != 0.0:
            shift = (K - k) * M
            out[shift : shift + power.size] += f[k] * power
        if k < K:
            power = np.convolve(power, h)
    return out
