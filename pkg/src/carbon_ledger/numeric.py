"""Exact numeric kernel: decimal tokens in, rationals inside, decimals out.

All quantities are carried as ``fractions.Fraction`` so that sums, products,
and divisions stay exact and conservation identities close with zero residual.
Binary floats never touch a value. Decimal strings appear only at the I/O
boundary: input tokens are parsed exactly, and output is rounded half-even at
a configurable number of significant digits as the final step.
"""

from __future__ import annotations

import re
from fractions import Fraction

# Plain decimal tokens only: optional sign, digits, optional fractional part.
# No exponents, no thousands separators, no leading/trailing whitespace.
_DECIMAL_TOKEN = re.compile(r"^[+-]?(?:\d+)(?:\.(\d+))?$")

DEFAULT_SIG_DIGITS = 6


def parse_decimal(token: str) -> Fraction:
    """Parse a plain decimal token into an exact Fraction.

    Raises ValueError for anything that is not a plain decimal literal
    (exponents and thousands separators are rejected on purpose: they are
    the formats that silently lose precision elsewhere).
    """
    match = _DECIMAL_TOKEN.match(token)
    if match is None:
        raise ValueError(f"not a plain decimal: {token!r}")
    return Fraction(token)


def fraction_digits(token: str) -> int:
    """Number of fractional digits in a decimal token (0 if none)."""
    match = _DECIMAL_TOKEN.match(token)
    if match is None:
        raise ValueError(f"not a plain decimal: {token!r}")
    return len(match.group(1) or "")


def is_finite_decimal(value: Fraction) -> bool:
    """True if the fraction has an exact finite decimal expansion."""
    d = value.denominator
    for p in (2, 5):
        while d % p == 0:
            d //= p
    return d == 1


def decimal_str(value: Fraction) -> str:
    """Render an exact finite decimal, normalized (no trailing zeros).

    Raises ValueError if the value has no finite decimal expansion; callers
    that may hold arbitrary rationals must round first (``round_sig``).
    """
    if value == 0:
        return "0"
    sign = "-" if value < 0 else ""
    n, d = abs(value.numerator), value.denominator
    twos = fives = 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        raise ValueError(f"{value!r} has no finite decimal expansion")
    places = max(twos, fives)
    # n * 10**places is divisible by the denominator once 2s and 5s are cleared
    digits = str(n * 10**places // value.denominator)
    if places == 0:
        return sign + digits
    digits = digits.rjust(places + 1, "0")
    whole, frac = digits[:-places], digits[-places:]
    frac = frac.rstrip("0")
    return sign + whole + ("." + frac if frac else "")


def _floor_log10(value: Fraction) -> int:
    """Exact floor(log10(value)) for value > 0."""
    n, d = value.numerator, value.denominator
    estimate = len(str(n)) - len(str(d))
    while value < Fraction(10) ** estimate:
        estimate -= 1
    while value >= Fraction(10) ** (estimate + 1):
        estimate += 1
    return estimate


def round_sig(value: Fraction, sig_digits: int = DEFAULT_SIG_DIGITS) -> Fraction:
    """Round half-even to ``sig_digits`` significant decimal digits, exactly.

    The tie comparison happens on exact rationals, so there is no
    double-rounding: this is the only place precision is given up.
    """
    if sig_digits < 1:
        raise ValueError("sig_digits must be >= 1")
    if value == 0:
        return Fraction(0)
    magnitude = abs(value)
    quantum = Fraction(10) ** (_floor_log10(magnitude) - sig_digits + 1)
    scaled = magnitude / quantum
    whole = scaled.numerator // scaled.denominator
    remainder = scaled - whole
    half = Fraction(1, 2)
    if remainder > half or (remainder == half and whole % 2 == 1):
        whole += 1
    result = whole * quantum
    return -result if value < 0 else result


def format_sig(value: Fraction, sig_digits: int = DEFAULT_SIG_DIGITS) -> str:
    """Round half-even to significant digits and render a normalized decimal."""
    return decimal_str(round_sig(value, sig_digits))
