"""Polynomial and rational transfer-function arithmetic.

One coefficient convention everywhere: vectors are ascending powers, so
``coeffs[k]`` multiplies x^k (or z^{-k} for transfer functions).  Trailing
zeros are trimmed exactly (tolerance 0.0) on construction.
"""

from __future__ import annotations

import numpy as np

from .errors import NotSymmetric, PoleOnUnitCircle

__all__ = [
    "RealPolynomial",
    "TransferFunction",
    "ChebyshevExpansion",
    "eval_poly",
    "freq_response",
    "compose_poly",
    "compose_tf",
    "cos_power_expansion",
]

#: coefficients below this are never treated as zero; trimming is exact only
SYMMETRY_TOL = 1e-10


def _as_coeff_array(coeffs) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(coeffs, dtype=float))
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("coefficient vector must be one-dimensional and non-empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError("coefficients must be finite")
    return arr


def _trim_trailing_zeros(arr: np.ndarray) -> np.ndarray:
    trimmed = np.trim_zeros(arr, "b")
    if trimmed.size == 0:
        trimmed = np.zeros(1)
    return np.array(trimmed)


class RealPolynomial:
    """Real polynomial; the zero polynomial is the single coefficient [0]."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        arr = _trim_trailing_zeros(_as_coeff_array(coeffs))
        arr.flags.writeable = False
        self.coeffs = arr

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, x):
        return eval_poly(self, x)

    def derivative(self) -> "RealPolynomial":
        if self.degree == 0:
            return RealPolynomial([0.0])
        k = np.arange(1, self.coeffs.size)
        return RealPolynomial(self.coeffs[1:] * k)

    def __eq__(self, other):
        return isinstance(other, RealPolynomial) and np.array_equal(
            self.coeffs, other.coeffs
        )

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def __repr__(self):
        return f"RealPolynomial({self.coeffs.tolist()})"


class ChebyshevExpansion:
    """Polynomial in cos(omega), ascending powers; same trim rule as above."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        arr = _trim_trailing_zeros(_as_coeff_array(coeffs))
        arr.flags.writeable = False
        self.coeffs = arr

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, omega):
        return eval_poly(self.coeffs, np.cos(omega))

    def as_polynomial(self) -> RealPolynomial:
        return RealPolynomial(self.coeffs)

    def __eq__(self, other):
        return isinstance(other, ChebyshevExpansion) and np.array_equal(
            self.coeffs, other.coeffs
        )

    def __repr__(self):
        return f"ChebyshevExpansion({self.coeffs.tolist()})"


class TransferFunction:
    """Rational function in z^{-1}, normalized so den[0] = 1."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=(1.0,)):
        num = _as_coeff_array(num)
        den = _as_coeff_array(den)
        if den[0] == 0.0:
            raise ValueError("den[0] must be nonzero")
        num = _trim_trailing_zeros(num / den[0])
        den = _trim_trailing_zeros(den / den[0])
        num.flags.writeable = False
        den.flags.writeable = False
        self.num = num
        self.den = den

    @property
    def is_fir(self) -> bool:
        return self.den.size == 1

    def response(self, omega):
        return freq_response(self, omega)

    def __eq__(self, other):
        return (
            isinstance(other, TransferFunction)
            and np.array_equal(self.num, other.num)
            and np.array_equal(self.den, other.den)
        )

    def __repr__(self):
        return f"TransferFunction(num={self.num.tolist()}, den={self.den.tolist()})"


def _coeffs_of(p) -> np.ndarray:
    if isinstance(p, (RealPolynomial, ChebyshevExpansion)):
        return p.coeffs
    return _as_coeff_array(p)


def _horner(coeffs: np.ndarray, x):
    out = np.zeros_like(x, dtype=np.result_type(coeffs, x, float))
    for c in coeffs[::-1]:
        out = out * x + c
    return out


def eval_poly(p, x):
    """Evaluate a polynomial (Horner) at real or complex x, scalar or array."""
    coeffs = _coeffs_of(p)
    xa = np.asarray(x)
    out = _horner(coeffs, xa)
    return out if out.ndim else out[()]


def freq_response(g: TransferFunction, omega):
    """Frequency response num(e^{-jw})/den(e^{-jw}) at radian frequency omega.

    Raises PoleOnUnitCircle if |den(e^{-jw})| < 1e-12 anywhere.
    """
    w = np.asarray(omega, dtype=float)
    z_inv = np.exp(-1j * w)
    num = _horner(g.num, z_inv)
    den = _horner(g.den, z_inv)
    mod = np.abs(den)
    if np.any(mod < 1e-12):
        bad = np.atleast_1d(w)[np.atleast_1d(mod) < 1e-12]
        raise PoleOnUnitCircle(f"denominator vanishes at omega={bad[:4].tolist()}")
    out = num / den
    return out if out.ndim else out[()]


def compose_poly(f, g) -> RealPolynomial:
    """Coefficients of f(g(x)); Horner in the polynomial ring."""
    fc = _coeffs_of(f)
    gc = _coeffs_of(g)
    out = np.array([fc[-1]])
    for c in fc[-2::-1]:
        out = np.convolve(out, gc)
        out[0] += c
    return RealPolynomial(out)


def _poly_pow(base: np.ndarray, k: int) -> np.ndarray:
    out = np.array([1.0])
    for _ in range(k):
        out = np.convolve(out, base)
    return out


def _padded_sum(terms) -> np.ndarray:
    n = max(t.size for t in terms)
    out = np.zeros(n)
    for t in terms:
        out[: t.size] += t
    return out


def compose_tf(f, g: TransferFunction) -> TransferFunction:
    """Transfer function of f(g(z)).

    The result is (sum_k f_k num^k den^{K-k}) / den^K with K = deg f.  No
    pole cancellation is attempted: the output denominator is den^K exactly,
    so composition only raises the multiplicity of existing poles.
    """
    fc = _trim_trailing_zeros(_coeffs_of(f))
    K = fc.size - 1
    num_pow = [np.array([1.0])]
    den_pow = [np.array([1.0])]
    for _ in range(K):
        num_pow.append(np.convolve(num_pow[-1], g.num))
        den_pow.append(np.convolve(den_pow[-1], g.den))
    terms = [fc[k] * np.convolve(num_pow[k], den_pow[K - k]) for k in range(K + 1)]
    return TransferFunction(_padded_sum(terms), den_pow[K])


def cos_power_expansion(h_shifted, L: int | None = None) -> ChebyshevExpansion:
    """Rewrite an even-symmetric response as a polynomial in cos(omega).

    ``h_shifted`` has length 2L+1 and is even-symmetric about index L
    (checked to 1e-10 per coefficient).  The cosine-series terms cos(n w)
    are converted to powers of cos(w) with the Chebyshev recurrence
    T_{n+1}(x) = 2 x T_n(x) - T_{n-1}(x).
    """
    h = _as_coeff_array(h_shifted)
    if L is None:
        L = (h.size - 1) // 2
    if h.size != 2 * L + 1:
        raise ValueError(f"expected length {2 * L + 1} for half-order L={L}, got {h.size}")
    asym = np.abs(h - h[::-1])
    if np.any(asym > SYMMETRY_TOL):
        raise NotSymmetric(f"max asymmetry {asym.max():.3e} exceeds {SYMMETRY_TOL}")

    # cosine-series coefficients: h[L] + sum_n 2 h[L+n] cos(n w)
    a = np.concatenate(([h[L]], 2.0 * h[L + 1 :]))
    b = np.zeros(L + 1)
    t_prev = np.array([1.0])  # T_0
    b[:1] += a[0] * t_prev
    if L >= 1:
        t_cur = np.array([0.0, 1.0])  # T_1
        b[:2] += a[1] * t_cur
        for n in range(2, L + 1):
            t_next = np.zeros(n + 1)
            t_next[1:] = 2.0 * t_cur
            t_next[: n - 1] -= t_prev
            b[: n + 1] += a[n] * t_next
            t_prev, t_cur = t_cur, t_next
    return ChebyshevExpansion(b)
