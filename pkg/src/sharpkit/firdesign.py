"""Minimax Type-I linear-phase FIR design on the cosine basis.

A Type-I filter of order 2L has taps h[n] = h[2L-n]; after an L-sample
advance its frequency response is the real function sum_k b_k cos(k w).
Designing the b_k is a minimax problem on a Haar system, solved here with
the same exchange engine used everywhere else.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bands import BandSpec
from .poly import TransferFunction
from .remez import BasisFamily, RemezTrace, max_abs_on_set, remez_first

__all__ = ["FirDesign", "design_type1"]


@dataclass
class FirDesign:
    """Designed taps (length 2L+1, exactly symmetric) and the achieved error."""

    h: np.ndarray
    achieved_delta: float
    spec: BandSpec
    cosine_coeffs: np.ndarray
    trace: RemezTrace

    @property
    def half_order(self) -> int:
        return (self.h.size - 1) // 2

    def zero_phase(self, omega):
        """Real response sum_k b_k cos(k w) of the L-sample-advanced filter."""
        w = np.asarray(omega, dtype=float)
        k = np.arange(self.cosine_coeffs.size)
        out = np.cos(np.multiply.outer(w, k)) @ self.cosine_coeffs
        return out if out.ndim else out[()]

    def transfer_function(self) -> TransferFunction:
        return TransferFunction(self.h)


def design_type1(
    L: int,
    spec: BandSpec,
    *,
    tol: float = 1e-8,
    max_iter: int = 200,
    grid_density: float | None = None,
) -> FirDesign:
    """Minimax Type-I FIR of order 2L for real band targets on [0, pi].

    The zero-phase response sum b_k cos(k w) is fitted to the band targets;
    taps follow as h[L] = b_0, h[L +/- k] = b_k / 2 (symmetry is built, not
    fitted).  Default grid density is 16 points per basis function per pi
    of bandwidth.
    """
    if L < 0:
        raise ValueError("L must be nonnegative")
    for band in spec.bands:
        if callable(band.desired):
            continue
        if complex(band.desired).imag != 0:
            raise ValueError("design targets must be real")
    if spec.bands[0].lo < 0 or spec.bands[-1].hi > np.pi + 1e-12:
        raise ValueError("design bands must lie inside [0, pi]")

    density = grid_density if grid_density is not None else 16.0 * (L + 1) / np.pi
    domain = spec.compact_set(density)
    basis = BasisFamily.cosines(L)

    def target(w):
        return np.real(spec.desired_at(w))

    sol, trace = remez_first(basis, target, domain, tol=tol, max_iter=max_iter)
    b = np.asarray(sol.f, dtype=float)

    h = np.zeros(2 * L + 1)
    h[L] = b[0]
    for k in range(1, L + 1):
        h[L + k] = b[k] / 2.0
        h[L - k] = b[k] / 2.0

    def residual(w):
        w = np.asarray(w, dtype=float)
        k = np.arange(b.size)
        return np.cos(np.multiply.outer(w, k)) @ b - target(w)

    achieved = max_abs_on_set(residual, domain)
    return FirDesign(
        h=h, achieved_delta=achieved, spec=spec, cosine_coeffs=b, trace=trace
    )
