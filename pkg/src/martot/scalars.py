"""Scalar policy: exact rationals by default, floats as the approximate fallback.

Exact values are ``int`` or ``fractions.Fraction`` and support +, -, *, /
and comparison with no rounding.  Approximate values are ``float`` and all
equality-like tests go through a global tolerance ``TOL`` (1e-12 unless a
caller passes its own).  A computation stays exact as long as every input
is exact; mixing a float in anywhere demotes the result to approximate,
which is exactly the behaviour the stability experiments rely on.
"""

from __future__ import annotations

import math
from fractions import Fraction

TOL = 1e-12

Scalar = int | Fraction | float


def is_exact(x: Scalar) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def all_exact(*xs) -> bool:
    return all(is_exact(x) for x in xs)


def parse_scalar(text, exact: bool = True) -> Scalar:
    """Parse ``"p/q"``, a decimal string, an int or a float into a scalar.

    In exact mode every accepted form converts without rounding
    (``Fraction("0.25")`` is exact); a float object is rejected because its
    printed decimal intent cannot be recovered reliably.
    """
    from .errors import ParseError

    if isinstance(text, bool):
        raise ParseError(f"not a scalar: {text!r}")
    if isinstance(text, int):
        return text
    if isinstance(text, Fraction):
        return _normalize(text)
    if isinstance(text, float):
        if exact:
            raise ParseError(f"float {text!r} not accepted in exact mode; pass a string")
        return text
    if isinstance(text, str):
        try:
            value = Fraction(text.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"cannot parse scalar {text!r}") from exc
        return _normalize(value) if exact else float(value)
    raise ParseError(f"cannot parse scalar {text!r}")


def _normalize(f: Fraction) -> Scalar:
    return int(f) if f.denominator == 1 else f


def scalar_str(x: Scalar) -> str:
    """Serialize a scalar; rationals as ``p/q`` or a plain integer string."""
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, int):
        return str(x)
    return repr(float(x))


def eq(a: Scalar, b: Scalar, tol: float | None = None) -> bool:
    if is_exact(a) and is_exact(b):
        return a == b
    t = TOL if tol is None else tol
    return abs(a - b) <= t


def le(a: Scalar, b: Scalar, tol: float | None = None) -> bool:
    if is_exact(a) and is_exact(b):
        return a <= b
    t = TOL if tol is None else tol
    return a <= b + t


def lt(a: Scalar, b: Scalar, tol: float | None = None) -> bool:
    return not le(b, a, tol)


def is_zero(a: Scalar, tol: float | None = None) -> bool:
    return eq(a, 0, tol)


def sign(a: Scalar, tol: float | None = None) -> int:
    if is_zero(a, tol):
        return 0
    return 1 if a > 0 else -1


def spow(x: Scalar, rho: Scalar) -> Scalar:
    """|x| is assumed nonnegative by callers; exact for integer exponents."""
    if is_exact(x) and is_exact(rho) and isinstance(rho, int):
        return x ** rho
    return float(x) ** float(rho)


def rho_root(x: Scalar, rho: Scalar) -> Scalar:
    """The rho-th root of x >= 0, exact whenever x is a perfect rho-th power."""
    if x == 0:
        return 0
    if rho == 1:
        return x
    if is_exact(x) and isinstance(rho, int) and rho >= 1:
        f = Fraction(x)
        num = _iroot(f.numerator, rho)
        den = _iroot(f.denominator, rho)
        if num is not None and den is not None:
            return _normalize(Fraction(num, den))
    return float(x) ** (1.0 / float(rho))


def _iroot(n: int, k: int) -> int | None:
    """Integer k-th root of n if n is a perfect k-th power, else None."""
    if n < 0:
        return None
    r = round(n ** (1.0 / k))
    for c in (r - 1, r, r + 1):
        if c >= 0 and c ** k == n:
            return c
    return None


def check_rho(rho: Scalar) -> Scalar:
    from .errors import PreconditionError

    if not (is_exact(rho) or isinstance(rho, float)) or rho < 1:
        raise PreconditionError(f"order rho must be >= 1, got {rho!r}")
    return rho


def as_float(x: Scalar) -> float:
    return float(x)


def isclose_float(a: float, b: float, tol: float = TOL) -> bool:
    return math.isclose(a, b, rel_tol=0.0, abs_tol=tol)
