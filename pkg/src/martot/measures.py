"""Finitely supported probability measures on the real line.

A measure is stored as strictly increasing atoms with positive weights
summing to one.  The quantile function is the left-continuous step function
on (0, 1] taking the i-th atom on the i-th cumulative-weight interval; the
pushforward of Lebesgue measure on (0, 1) through it recovers the measure
(inverse transform sampling), which is what every construction downstream
leans on.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from . import scalars
from .errors import ParseError, PreconditionError
from .piecewise import PiecewiseConstant


@dataclass(frozen=True)
class DiscreteMeasure:
    atoms: tuple
    weights: tuple

    def __post_init__(self):
        if not self.atoms or len(self.atoms) != len(self.weights):
            raise PreconditionError("need matching nonempty atoms and weights")
        for a, b in zip(self.atoms, self.atoms[1:]):
            if not scalars.lt(a, b):
                raise PreconditionError("atoms must be strictly increasing")
        if any(w <= 0 for w in self.weights):
            raise PreconditionError("weights must be positive")
        total = sum(self.weights)
        if scalars.all_exact(*self.weights):
            if total != 1:
                raise PreconditionError(f"weights sum to {total}, not 1")
        elif not scalars.eq(total, 1.0, 1e-9):
            raise PreconditionError(f"weights sum to {total}, not 1")

    @classmethod
    def from_pairs(cls, pairs, tol=None):
        """Build from (atom, weight) pairs, merging duplicate atoms.

        Exact atoms merge under exact equality; float atoms merge when
        within the comparison tolerance.
        """
        if not pairs:
            raise PreconditionError("a probability measure needs at least one atom")
        merged = []
        for x, w in sorted(pairs, key=lambda p: p[0]):
            if merged and scalars.eq(merged[-1][0], x, tol):
                merged[-1][1] += w
            else:
                merged.append([x, w])
        merged = [(x, w) for x, w in merged if w != 0]
        return cls(tuple(x for x, _ in merged), tuple(w for _, w in merged))

    @classmethod
    def dirac(cls, x):
        return cls((x,), (1,))

    @classmethod
    def uniform_over(cls, points):
        n = len(points)
        return cls.from_pairs([(x, Fraction(1, n)) for x in points])

    # -- CDF / quantile machinery -------------------------------------------------

    def cum_weights(self):
        acc, out = 0, []
        for w in self.weights:
            acc += w
            out.append(acc)
        return out

    def quantile(self) -> PiecewiseConstant:
        """Left-continuous quantile step function on (0, 1]."""
        return PiecewiseConstant(tuple([0] + self.cum_weights()), self.atoms)

    def cdf_at(self, x):
        total = 0
        for a, w in zip(self.atoms, self.weights):
            if scalars.le(a, x):
                total += w
            else:
                break
        return total

    def cdf_left_at(self, x):
        total = 0
        for a, w in zip(self.atoms, self.weights):
            if scalars.lt(a, x):
                total += w
            else:
                break
        return total

    def mass_at(self, x):
        for a, w in zip(self.atoms, self.weights):
            if scalars.eq(a, x):
                return w
        return 0

    # -- moments ------------------------------------------------------------------

    def mean(self):
        return sum(w * x for x, w in zip(self.atoms, self.weights))

    def abs_moment(self, rho=1):
        return sum(w * scalars.spow(abs(x), rho) for x, w in zip(self.atoms, self.weights))

    def second_moment(self):
        return sum(w * x * x for x, w in zip(self.atoms, self.weights))

    def potential(self, x):
        """u(x) = ∫ |x - y| dη(y); convex and piecewise linear in x."""
        return sum(w * abs(x - y) for y, w in zip(self.atoms, self.weights))

    def support(self):
        return self.atoms

    # -- serialization --------------------------------------------------------------

    def to_json(self):
        return {"atoms": [{"x": scalars.scalar_str(x), "w": scalars.scalar_str(w)}
                          for x, w in zip(self.atoms, self.weights)]}

    @classmethod
    def from_json(cls, obj, exact=True):
        try:
            pairs = [(scalars.parse_scalar(a["x"], exact), scalars.parse_scalar(a["w"], exact))
                     for a in obj["atoms"]]
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed measure object: {exc}") from exc
        return cls.from_pairs(pairs)


def mix(components) -> DiscreteMeasure:
    """Convex combination sum p_i * m_i of measures; weights must sum to one."""
    pairs = []
    for p, m in components:
        if p == 0:
            continue
        pairs.extend((x, p * w) for x, w in zip(m.atoms, m.weights))
    return DiscreteMeasure.from_pairs(pairs)


def merged_quantile_pieces(m1: DiscreteMeasure, m2: DiscreteMeasure):
    """Common refinement of the two quantile partitions of (0, 1].

    Yields (length, x1, x2): on a u-interval of the given length the two
    quantile functions are constantly x1 and x2.
    """
    i = j = 0
    prev = 0
    c1, c2 = m1.cum_weights(), m2.cum_weights()
    while i < len(c1) and j < len(c2):
        cut = min(c1[i], c2[j])
        if cut > prev:
            yield cut - prev, m1.atoms[i], m2.atoms[j]
        if scalars.eq(c1[i], cut):
            i += 1
        if scalars.eq(c2[j], cut):
            j += 1
        prev = cut


def wasserstein_pow(m1: DiscreteMeasure, m2: DiscreteMeasure, rho=1):
    """W_rho^rho via the quantile formula; exact for integer rho and exact data."""
    scalars.check_rho(rho)
    return sum(length * scalars.spow(abs(x1 - x2), rho)
               for length, x1, x2 in merged_quantile_pieces(m1, m2))


def wasserstein(m1: DiscreteMeasure, m2: DiscreteMeasure, rho=1):
    """W_rho distance; exact for rho = 1, otherwise the rho-th root of an exact power."""
    return scalars.rho_root(wasserstein_pow(m1, m2, rho), rho)


class StochOrder(Enum):
    LE = "le"
    GE = "ge"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


def stochastic_order(m1: DiscreteMeasure, m2: DiscreteMeasure) -> StochOrder:
    """Pointwise comparison of the two quantile functions on a common refinement."""
    any_lt = any_gt = False
    for _, x1, x2 in merged_quantile_pieces(m1, m2):
        if scalars.lt(x1, x2):
            any_lt = True
        elif scalars.lt(x2, x1):
            any_gt = True
    if any_lt and any_gt:
        return StochOrder.INCOMPARABLE
    if any_lt:
        return StochOrder.LE
    if any_gt:
        return StochOrder.GE
    return StochOrder.EQUAL


def convex_order_violation(m1: DiscreteMeasure, m2: DiscreteMeasure, tol=None):
    """None if m1 <=_cx m2, else a witness ("means", a, b) or ("potential", x, gap).

    Both potentials are piecewise linear with kinks exactly at the atoms and
    equal asymptotics when the means agree, so checking the inequality at
    every atom of either measure is sufficient.
    """
    if not scalars.eq(m1.mean(), m2.mean(), tol):
        return ("means", m1.mean(), m2.mean())
    for x in sorted(set(m1.atoms) | set(m2.atoms)):
        if not scalars.le(m1.potential(x), m2.potential(x), tol):
            return ("potential", x, m1.potential(x) - m2.potential(x))
    return None


def convex_order(m1: DiscreteMeasure, m2: DiscreteMeasure, tol=None) -> bool:
    """m1 <=_cx m2 via potential-function comparison at the atoms."""
    return convex_order_violation(m1, m2, tol) is None
