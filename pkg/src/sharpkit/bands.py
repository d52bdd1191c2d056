"""Frequency-band specifications: intervals with desired response targets.

Bands are closed, pairwise disjoint intervals in radians; their union is
the compact set the approximation is measured on.  Transition regions are
simply omitted (don't-care).  A band's target may be a complex constant, a
real constant, or a callable of omega; an optional group delay tau turns
constant magnitude targets into linear-phase targets mag * e^{-j w tau}.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .remez import DEFAULT_GRID_DENSITY, CompactSet

__all__ = ["Band", "BandSpec"]

Target = Union[complex, float, Callable]


@dataclass(frozen=True)
class Band:
    lo: float
    hi: float
    desired: Target = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.lo) and np.isfinite(self.hi)):
            raise ValueError("band edges must be finite")
        if self.lo > self.hi:
            raise ValueError(f"band [{self.lo}, {self.hi}] has lo > hi")


@dataclass(frozen=True)
class BandSpec:
    bands: tuple[Band, ...]
    group_delay: float = 0.0

    def __init__(self, bands, group_delay: float = 0.0):
        bands = tuple(b if isinstance(b, Band) else Band(*b) for b in bands)
        if not bands:
            raise ValueError("need at least one band")
        ordered = sorted(bands, key=lambda b: b.lo)
        for a, b in zip(ordered, ordered[1:]):
            if b.lo <= a.hi:
                raise ValueError(
                    f"bands [{a.lo}, {a.hi}] and [{b.lo}, {b.hi}] are not disjoint"
                )
        object.__setattr__(self, "bands", tuple(ordered))
        object.__setattr__(self, "group_delay", float(group_delay))

    @classmethod
    def lowpass(
        cls,
        pass_edge: float,
        stop_edge: float,
        pass_level: float = 1.0,
        stop_level: float = 0.0,
        group_delay: float = 0.0,
    ) -> "BandSpec":
        return cls(
            [Band(0.0, pass_edge, pass_level), Band(stop_edge, np.pi, stop_level)],
            group_delay=group_delay,
        )

    def intervals(self) -> list[tuple[float, float]]:
        return [(b.lo, b.hi) for b in self.bands]

    def compact_set(self, grid_density: float | None = None) -> CompactSet:
        return CompactSet(
            self.intervals(),
            grid_density if grid_density is not None else DEFAULT_GRID_DENSITY,
        )

    def _band_index(self, omega: np.ndarray) -> np.ndarray:
        """Band membership for each omega; raises if any point is in a gap."""
        los = np.array([b.lo for b in self.bands])
        his = np.array([b.hi for b in self.bands])
        idx = np.searchsorted(los, omega + 1e-12, side="right") - 1
        idx = np.clip(idx, 0, len(self.bands) - 1)
        tol = 1e-9
        inside = (omega >= los[idx] - tol) & (omega <= his[idx] + tol)
        if not np.all(inside):
            bad = np.asarray(omega)[~inside]
            raise ValueError(f"frequencies outside all bands: {bad[:4].tolist()}")
        return idx

    def desired_at(self, omega) -> np.ndarray:
        """Target response at omega (must lie inside the bands)."""
        w = np.atleast_1d(np.asarray(omega, dtype=float))
        idx = self._band_index(w)
        out = np.empty(w.shape, dtype=complex)
        for i, band in enumerate(self.bands):
            mask = idx == i
            if not np.any(mask):
                continue
            if callable(band.desired):
                out[mask] = band.desired(w[mask])
            else:
                out[mask] = complex(band.desired)
        if self.group_delay != 0.0:
            out = out * np.exp(-1j * w * self.group_delay)
        out = np.asarray(out)
        return out if np.asarray(omega).ndim else out[0]

    def magnitudes_at(self, omega) -> np.ndarray:
        """Real nonnegative magnitude targets (group delay ignored)."""
        w = np.atleast_1d(np.asarray(omega, dtype=float))
        idx = self._band_index(w)
        out = np.empty(w.shape, dtype=float)
        for i, band in enumerate(self.bands):
            mask = idx == i
            if not np.any(mask):
                continue
            val = band.desired(w[mask]) if callable(band.desired) else band.desired
            val = np.asarray(val)
            if np.iscomplexobj(val) and np.any(val.imag != 0):
                raise ValueError("magnitude targets must be real")
            val = val.real.astype(float)
            if np.any(val < 0):
                raise ValueError("magnitude targets must be nonnegative")
            out[mask] = val
        return out if np.asarray(omega).ndim else out[0]
