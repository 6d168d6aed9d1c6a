"""Explicit Lojasiewicz exponent for the rank-constrained affine set.

For a polynomial of degree ``d`` in ``l`` variables the exponent denominator is

    R(l, d) = d * (3d - 3)^(l - 1),

and the lift ``g`` is a quartic in ``l = n (m + n - r)`` variables, giving

    tau(m, n, r) = 1 / R(n (m + n - r), 4) = 1 / (4 * 9^(l - 1)).

``tau`` drops below the smallest normal double near ``l = 322`` (``m = n = 13``,
``r = 0``), so everything carries ``log10`` alongside the float value.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from fractions import Fraction

TINY = 5e-324
MAX_EXACT_DIGITS = 10**6
_LOG10_MAX = math.log10(sys.float_info.max)


@dataclass(frozen=True)
class LogScalar:
    """A positive number known through its base-10 logarithm.

    ``linear`` is None when the value overflows a double (and 0.0 when it
    underflows). ``exact`` is an int or Fraction when the value is small
    enough to hold exactly.
    """

    log10: float
    linear: float | None
    exact: int | Fraction | None = None

    @property
    def exact_digits(self):
        if self.exact is None:
            return None
        set_limit = getattr(sys, "set_int_max_str_digits", None)
        old = sys.get_int_max_str_digits() if set_limit else None
        if set_limit:
            set_limit(0)
        try:
            return str(self.exact)
        finally:
            if set_limit:
                set_limit(old)

    @property
    def overflow(self):
        return self.linear is None

    def clamped(self):
        """Float value clamped into ``[smallest subnormal, inf)``."""
        if self.linear is None:
            return math.inf
        return max(self.linear, TINY)

    @property
    def complement(self):
        """``1 - value`` for values in [0, 1]; rounds to 1.0 below about 1e-17."""
        return 1.0 - self.linear


def num_variables(m, n, r):
    """Number of variables of the lift, ``n (m + n - r)``, with ``m >= n`` enforced."""
    m, n = max(m, n), min(m, n)
    if not 0 <= r <= n:
        raise ValueError(f"rank bound r={r} outside [0, {n}]")
    return n * (m + n - r)


def r_value(l, d):
    """``R(l, d) = d (3d - 3)^(l - 1)`` as a :class:`LogScalar`."""
    l, d = int(l), int(d)
    if l < 1:
        raise ValueError(f"number of variables must be >= 1, got {l}")
    if d < 2:
        raise ValueError(f"degree must be >= 2, got {d}")
    log10 = math.log10(d) + (l - 1) * math.log10(3 * d - 3)
    exact = d * (3 * d - 3) ** (l - 1) if log10 < MAX_EXACT_DIGITS else None
    if log10 < _LOG10_MAX:
        linear = float(exact) if exact is not None else 10.0**log10
    else:
        linear = None
    return LogScalar(log10, linear, exact)


def tau(m, n, r):
    """Exponent ``tau = 1 / R(n (m + n - r), 4)``."""
    R = r_value(num_variables(m, n, r), 4)
    log10 = -R.log10
    exact = Fraction(1, R.exact) if R.exact is not None else None
    if R.linear is None:
        linear = 10.0**log10  # underflows to 0.0 for very large l
    else:
        linear = 1.0 / R.linear
    return LogScalar(log10, linear, exact)


def exponent_report(m, n, r):
    """Summary used by the command line ``exponent`` command."""
    l = num_variables(m, n, r)
    R = r_value(l, 4)
    t = tau(m, n, r)
    out = {"l": l, "R_log10": R.log10, "tau": t.linear, "tau_log10": t.log10}
    if R.exact is not None and R.log10 < 4000:
        out["R_exact"] = R.exact_digits
    return out
