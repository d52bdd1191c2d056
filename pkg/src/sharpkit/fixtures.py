"""Frozen filter fixtures used by the demos and the test suite.

The elliptic bandpass below was generated once with the external design
oracle scipy.signal.ellip (see scripts/make_fixtures.py for the exact
call) and frozen here so the package itself has no scipy dependency.
"""

from .poly import TransferFunction

__all__ = ["elliptic_bandpass_4th"]

# 4th-order elliptic bandpass: passband edges 0.45*pi and 0.63*pi,
# 1 dB passband ripple, 40 dB stopband attenuation.
# scipy.signal.ellip(2, 1.0, 40.0, [0.45, 0.63], btype="bandpass")
_ELLIPTIC_BP4_NUM = (
    0.066180044651600628,
    0.0037008888272184858,
    -0.10352113765753869,
    0.0037008888272185079,
    0.066180044651600642,
)
_ELLIPTIC_BP4_DEN = (
    1.0,
    0.42876880123806532,
    1.3334962290616517,
    0.31140896420563141,
    0.55039893550460861,
)


def elliptic_bandpass_4th() -> TransferFunction:
    """The 4th-order elliptic bandpass fixture (all poles inside the unit circle)."""
    return TransferFunction(_ELLIPTIC_BP4_NUM, _ELLIPTIC_BP4_DEN)
