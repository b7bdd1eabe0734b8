"""Exact algebra of piecewise-constant and piecewise-affine functions on [0, 1].

Both classes use the left-continuous convention that matches quantile
functions: a piecewise-constant function holds its i-th value on the
half-open interval ``(b[i-1], b[i]]``.  Piecewise-affine functions may jump
between pieces (generalized inverses of functions with plateaus do), are
evaluated left-continuously, and record the right-limit at the left end of
every piece so each piece is a self-contained affine segment.

All arithmetic is exact when the breakpoints and values are rationals.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass

from . import scalars
from .errors import InternalError, PreconditionError


def _merge_breaks(a, b, tol=None):
    out = []
    for x in sorted(list(a) + list(b)):
        if not out or not scalars.eq(out[-1], x, tol):
            out.append(x)
    return out


@dataclass(frozen=True)
class PiecewiseConstant:
    """Left-continuous step function: value ``values[i]`` on ``(breaks[i], breaks[i+1]]``."""

    breaks: tuple
    values: tuple

    def __post_init__(self):
        if len(self.breaks) != len(self.values) + 1:
            raise InternalError("breakpoint/value count mismatch")
        for lo, hi in zip(self.breaks, self.breaks[1:]):
            if not scalars.lt(lo, hi):
                raise InternalError("breakpoints must be strictly increasing")

    @property
    def lo(self):
        return self.breaks[0]

    @property
    def hi(self):
        return self.breaks[-1]

    def __call__(self, u):
        if scalars.lt(u, self.lo) or scalars.lt(self.hi, u):
            raise PreconditionError(f"{u} outside domain [{self.lo}, {self.hi}]")
        if scalars.le(u, self.lo):
            return self.values[0]
        i = bisect_left(self.breaks, u, 1, len(self.breaks) - 1)
        return self.values[i - 1]

    def pieces(self):
        for i, v in enumerate(self.values):
            yield self.breaks[i], self.breaks[i + 1], v

    def map(self, fn):
        return PiecewiseConstant(self.breaks, tuple(fn(v) for v in self.values))

    def positive_part(self):
        return self.map(lambda v: v if v > 0 else 0)

    def negative_part(self):
        return self.map(lambda v: -v if v < 0 else 0)

    def __neg__(self):
        return self.map(lambda v: -v)

    @staticmethod
    def combine(f, g, op):
        """Pointwise ``op(f, g)`` on the common domain via breakpoint merging."""
        if not (scalars.eq(f.lo, g.lo) and scalars.eq(f.hi, g.hi)):
            raise PreconditionError("combine requires identical domains")
        breaks = _merge_breaks(f.breaks, g.breaks)
        vals = tuple(op(f(b), g(b)) for b in breaks[1:])
        return PiecewiseConstant(tuple(breaks), vals)

    def __sub__(self, other):
        return PiecewiseConstant.combine(self, other, lambda a, b: a - b)

    def integral(self, upper=None):
        """Exact integral from the left end of the domain up to ``upper``."""
        if upper is None:
            upper = self.hi
        if scalars.lt(upper, self.lo) or scalars.lt(self.hi, upper):
            raise PreconditionError(f"upper bound {upper} outside [{self.lo}, {self.hi}]")
        total = 0
        for a, b, v in self.pieces():
            if scalars.le(upper, a):
                break
            top = upper if scalars.lt(upper, b) else b
            total += v * (top - a)
        return total

    def antiderivative(self):
        """Continuous piecewise-affine F with F' = self and F(lo) = 0."""
        pcs = []
        acc = 0
        for a, b, v in self.pieces():
            nxt = acc + v * (b - a)
            pcs.append((acc, nxt))
            acc = nxt
        return PiecewiseLinear(self.breaks, tuple(pcs), 0)

    def simplify(self):
        """Merge adjacent pieces with equal values (canonical form for tests)."""
        breaks = [self.breaks[0]]
        vals = []
        for a, b, v in self.pieces():
            if vals and scalars.eq(vals[-1], v):
                breaks[-1] = b
            else:
                vals.append(v)
                breaks.append(b)
        return PiecewiseConstant(tuple(breaks), tuple(vals))


def integrate_positive_part(f: PiecewiseConstant, upper):
    """∫ over (lo, upper] of the positive part of f, exact in exact mode."""
    return f.positive_part().integral(upper)


@dataclass(frozen=True)
class PiecewiseLinear:
    """Piecewise-affine, left-continuous, possibly discontinuous at breakpoints.

    Piece i lives on ``(breaks[i], breaks[i+1]]`` and is the affine segment
    from value ``pieces[i][0]`` (right-limit at the left endpoint) to value
    ``pieces[i][1]`` (attained at the right endpoint).  ``value_at_lo`` is
    the function value at the left end of the domain.
    """

    breaks: tuple
    pieces: tuple
    value_at_lo: object

    def __post_init__(self):
        if len(self.breaks) != len(self.pieces) + 1:
            raise InternalError("breakpoint/piece count mismatch")
        for lo, hi in zip(self.breaks, self.breaks[1:]):
            if not scalars.lt(lo, hi):
                raise InternalError("breakpoints must be strictly increasing")

    @property
    def lo(self):
        return self.breaks[0]

    @property
    def hi(self):
        return self.breaks[-1]

    def __call__(self, u):
        if scalars.lt(u, self.lo) or scalars.lt(self.hi, u):
            raise PreconditionError(f"{u} outside domain [{self.lo}, {self.hi}]")
        if scalars.le(u, self.lo):
            return self.value_at_lo
        i = bisect_left(self.breaks, u, 1, len(self.breaks) - 1)
        a, b = self.breaks[i - 1], self.breaks[i]
        fa, fb = self.pieces[i - 1]
        if scalars.eq(u, b):
            return fb
        return fa + (fb - fa) * (u - a) / (b - a)

    def right_limit(self, u):
        """lim_{t -> u+} f(t); equals f at interior points, next piece start at breaks."""
        if scalars.eq(u, self.hi):
            return self(u)
        for i in range(1, len(self.breaks)):
            if scalars.eq(u, self.breaks[i - 1]):
                return self.pieces[i - 1][0]
        return self(u)

    def segments(self):
        for i, (fa, fb) in enumerate(self.pieces):
            yield self.breaks[i], self.breaks[i + 1], fa, fb

    def is_continuous(self, tol=None):
        prev = self.value_at_lo
        for fa, fb in self.pieces:
            if not scalars.eq(prev, fa, tol):
                return False
            prev = fb
        return True

    def is_nondecreasing(self, tol=None):
        prev = self.value_at_lo
        for fa, fb in self.pieces:
            if scalars.lt(fa, prev, tol) or scalars.lt(fb, fa, tol):
                return False
            prev = fb
        return True

    def dominates(self, other, tol=None):
        """self >= other on the whole (shared, continuous) domain."""
        breaks = _merge_breaks(self.breaks, other.breaks)
        return all(scalars.le(other(u), self(u), tol) for u in breaks)

    def derivative(self):
        vals = tuple((fb - fa) / (b - a) for a, b, fa, fb in self.segments())
        return PiecewiseConstant(self.breaks, vals)


def generalized_left_inverse(F: PiecewiseLinear) -> PiecewiseLinear:
    """Left-continuous generalized inverse t -> inf{u : F(u) >= t}.

    Requires F continuous and nondecreasing.  Plateaus of F become jumps of
    the inverse; the inf convention returns the left edge of a plateau at
    its level.
    """
    if not F.is_continuous():
        raise PreconditionError("generalized inverse needs a continuous function")
    if not F.is_nondecreasing():
        raise PreconditionError("generalized inverse needs a nondecreasing function")
    out_breaks = [F.value_at_lo]
    out_pieces = []
    for a, b, fa, fb in F.segments():
        if scalars.eq(fa, fb):
            continue  # plateau: skipped, shows up as a jump in the inverse
        out_breaks.append(fb)
        out_pieces.append((a, b))
    return PiecewiseLinear(tuple(out_breaks), tuple(out_pieces), F.lo)


def _refine_against_levels(f: PiecewiseLinear, levels):
    """Breakpoints of f plus the u where f crosses any of the given levels."""
    crossings = []
    for a, b, fa, fb in f.segments():
        if scalars.eq(fa, fb):
            continue
        for t in levels:
            if scalars.lt(fa, t) and scalars.lt(t, fb):
                crossings.append(a + (t - fa) * (b - a) / (fb - fa))
    return _merge_breaks(f.breaks, crossings)


def _containing_piece(g, fa, fb):
    """Index of the piece of g whose half-open interval contains (fa, fb]."""
    i = bisect_left(g.breaks, fb, 1, len(g.breaks) - 1)
    if scalars.lt(fa, g.breaks[i - 1]):
        raise InternalError("range straddles a breakpoint after refinement")
    return i - 1


def compose(g: PiecewiseLinear, f: PiecewiseLinear) -> PiecewiseLinear:
    """Exact composite g∘f for nondecreasing f with range(f) ⊆ dom(g).

    Upward jumps of f between pieces are fine; each piece is composed on its
    own half-open value range.
    """
    if not f.is_nondecreasing():
        raise PreconditionError("compose requires a nondecreasing inner function")
    if scalars.lt(f.value_at_lo, g.lo) or scalars.lt(g.hi, f(f.hi)):
        raise PreconditionError("range of inner function not contained in outer domain")
    breaks = _refine_against_levels(f, g.breaks)
    pieces = []
    for a, b in zip(breaks, breaks[1:]):
        fa, fb = f.right_limit(a), f(b)
        if scalars.eq(fa, fb):
            v = g(fb)
            pieces.append((v, v))
        else:
            i = _containing_piece(g, fa, fb)
            ca, cb = g.breaks[i], g.breaks[i + 1]
            ga, gb = g.pieces[i]
            at = lambda t: ga + (gb - ga) * (t - ca) / (cb - ca)
            pieces.append((at(fa), at(fb)))
    return PiecewiseLinear(tuple(breaks), tuple(pieces), g(f.value_at_lo))


def compose_pc(g: PiecewiseConstant, f: PiecewiseLinear) -> PiecewiseConstant:
    """Exact composite g∘f of a step function with a nondecreasing affine one."""
    if not f.is_nondecreasing():
        raise PreconditionError("compose_pc requires a nondecreasing inner function")
    if scalars.lt(f.value_at_lo, g.lo) or scalars.lt(g.hi, f(f.hi)):
        raise PreconditionError("range of inner function not contained in outer domain")
    breaks = _refine_against_levels(f, g.breaks)
    vals = []
    for a, b in zip(breaks, breaks[1:]):
        fa, fb = f.right_limit(a), f(b)
        if scalars.eq(fa, fb):
            vals.append(g(fb))
        else:
            i = bisect_left(g.breaks, fb, 1, len(g.breaks) - 1)
            if scalars.lt(fa, g.breaks[i - 1]):
                raise InternalError("range straddles a breakpoint after refinement")
            vals.append(g.values[i - 1])
    return PiecewiseConstant(tuple(breaks), tuple(vals))
