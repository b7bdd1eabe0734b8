"""Couplings on R x R, disintegration kernels, and lifted couplings.

A lifted coupling keeps the u-indexed kernel information that collapsing to
a plain coupling integrates away: it is a finite partition of (0, 1] into
segments, each carrying the first-marginal quantile value on the segment
and a kernel measure that is constant there.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import scalars
from .errors import InternalError, ParseError, PreconditionError
from .measures import DiscreteMeasure, mix
from .piecewise import PiecewiseConstant


@dataclass(frozen=True)
class DiscreteCoupling:
    """Finitely supported joint measure, points sorted lexicographically by (x, y)."""

    points: tuple  # of (x, y, w)

    def __post_init__(self):
        if not self.points:
            raise PreconditionError("a coupling needs at least one point")
        for (x1, y1, _), (x2, y2, _) in zip(self.points, self.points[1:]):
            if (x1, y1) >= (x2, y2):
                raise PreconditionError("points must be sorted and distinct")
        if any(w <= 0 for w in (p[2] for p in self.points)):
            raise PreconditionError("weights must be positive")
        total = sum(p[2] for p in self.points)
        if scalars.all_exact(*(p[2] for p in self.points)):
            if total != 1:
                raise PreconditionError(f"weights sum to {total}, not 1")
        elif not scalars.eq(total, 1.0, 1e-9):
            raise PreconditionError(f"weights sum to {total}, not 1")

    @classmethod
    def from_pairs(cls, triples):
        acc = {}
        for x, y, w in triples:
            if w == 0:
                continue
            acc[(x, y)] = acc.get((x, y), 0) + w
        pts = tuple((x, y, w) for (x, y), w in sorted(acc.items()))
        return cls(pts)

    def first_marginal(self) -> DiscreteMeasure:
        return DiscreteMeasure.from_pairs([(x, w) for x, _, w in self.points])

    def second_marginal(self) -> DiscreteMeasure:
        return DiscreteMeasure.from_pairs([(y, w) for _, y, w in self.points])

    def cost(self, fn):
        return sum(w * fn(x, y) for x, y, w in self.points)

    def to_json(self):
        return {"points": [{"x": scalars.scalar_str(x), "y": scalars.scalar_str(y),
                            "w": scalars.scalar_str(w)} for x, y, w in self.points]}

    @classmethod
    def from_json(cls, obj, exact=True):
        try:
            triples = [(scalars.parse_scalar(p["x"], exact), scalars.parse_scalar(p["y"], exact),
                        scalars.parse_scalar(p["w"], exact)) for p in obj["points"]]
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed coupling object: {exc}") from exc
        return cls.from_pairs(triples)


def disintegrate(pi: DiscreteCoupling) -> dict:
    """Kernel of pi with respect to its first marginal: atom x -> pi_x."""
    rows = {}
    for x, y, w in pi.points:
        rows.setdefault(x, []).append((y, w))
    kernel = {}
    for x, pairs in rows.items():
        mass = sum(w for _, w in pairs)
        kernel[x] = DiscreteMeasure.from_pairs([(y, w / mass) for y, w in pairs])
    return kernel


def reassemble(mu: DiscreteMeasure, kernel: dict) -> DiscreteCoupling:
    """mu(dx) kernel_x(dy) as a coupling; kernel domain must be supp(mu)."""
    if set(kernel) != set(mu.atoms):
        raise PreconditionError("kernel domain differs from the support of the first marginal")
    triples = []
    for x, w in zip(mu.atoms, mu.weights):
        k = kernel[x]
        triples.extend((x, y, w * q) for y, q in zip(k.atoms, k.weights))
    return DiscreteCoupling.from_pairs(triples)


def product_coupling(mu: DiscreteMeasure, nu: DiscreteMeasure) -> DiscreteCoupling:
    return DiscreteCoupling.from_pairs(
        (x, y, wx * wy)
        for x, wx in zip(mu.atoms, mu.weights)
        for y, wy in zip(nu.atoms, nu.weights))


def hoeffding_frechet(mu: DiscreteMeasure, nu: DiscreteMeasure) -> DiscreteCoupling:
    """Comonotone coupling: image of Lebesgue on (0,1) by u -> (F_mu^-1, F_nu^-1)(u).

    Computed exactly by merging the two cumulative-weight partitions; attains
    W_rho for every rho >= 1.
    """
    from .measures import merged_quantile_pieces

    return DiscreteCoupling.from_pairs(
        (x, y, length) for length, x, y in merged_quantile_pieces(mu, nu))


def is_martingale(pi: DiscreteCoupling, tol=None) -> bool:
    """True iff every disintegration kernel has mean equal to its base point."""
    return all(scalars.eq(k.mean(), x, tol) for x, k in disintegrate(pi).items())


def is_monge(pi: DiscreteCoupling) -> bool:
    """True iff the coupling is carried by the graph of a map (all kernels Dirac)."""
    return all(len(k.atoms) == 1 for k in disintegrate(pi).values())


def barycentre_deviation(pi: DiscreteCoupling):
    """∫ |mean(pi_x) - x| mu(dx): the universal lower bound for AW_1 to martingales."""
    mu = pi.first_marginal()
    kernel = disintegrate(pi)
    return sum(w * abs(kernel[x].mean() - x) for x, w in zip(mu.atoms, mu.weights))


def conditional_mean_fn(pi: DiscreteCoupling) -> PiecewiseConstant:
    """u -> mean(pi_{F_mu^-1(u)}) as a step function on (0, 1]."""
    mu = pi.first_marginal()
    kernel = disintegrate(pi)
    return PiecewiseConstant(tuple([0] + mu.cum_weights()),
                             tuple(kernel[x].mean() for x in mu.atoms))


def barycentre_dispersion(pi: DiscreteCoupling, tol=None) -> bool:
    """Dispersion check via two independent routes that must agree.

    (a) atom scan: every upper tail sum of mu({x}) (x - mean(pi_x)) is <= 0;
    (b) the running integrals of the positive and negative parts of
        F_mu^-1 - G satisfy Delta_+ >= Delta_- everywhere.
    """
    mu = pi.first_marginal()
    kernel = disintegrate(pi)
    tail = 0
    scan_ok = True
    for x, w in zip(reversed(mu.atoms), reversed(mu.weights)):
        tail += w * (x - kernel[x].mean())
        if not scalars.le(tail, 0, tol):
            scan_ok = False
            break

    diff = mu.quantile() - conditional_mean_fn(pi)
    delta_plus = diff.positive_part().antiderivative()
    delta_minus = diff.negative_part().antiderivative()
    delta_ok = delta_plus.dominates(delta_minus, tol)

    if scan_ok != delta_ok:
        raise InternalError("barycentre dispersion routes disagree")
    return scan_ok


# -- lifted couplings ------------------------------------------------------------


@dataclass(frozen=True)
class Segment:
    a: object
    b: object
    x: object
    kernel: DiscreteMeasure

    @property
    def length(self):
        return self.b - self.a


@dataclass(frozen=True)
class LiftedCoupling:
    """lambda_(0,1) x delta_{F_mu^-1(u)} x p_u with p_u constant per segment."""

    segments: tuple

    def __post_init__(self):
        if not self.segments:
            raise PreconditionError("a lifted coupling needs at least one segment")
        prev = 0
        for s in self.segments:
            if not scalars.eq(s.a, prev) or not scalars.lt(s.a, s.b):
                raise PreconditionError("segments must partition (0, 1]")
            prev = s.b
        if not scalars.eq(prev, 1):
            raise PreconditionError("segments must end at 1")
        xs = [s.x for s in self.segments]
        if any(scalars.lt(b, a) for a, b in zip(xs, xs[1:])):
            raise PreconditionError("segment x-values must be nondecreasing")

    def first_marginal(self) -> DiscreteMeasure:
        return DiscreteMeasure.from_pairs([(s.x, s.length) for s in self.segments])

    def second_marginal(self) -> DiscreteMeasure:
        return mix([(s.length, s.kernel) for s in self.segments])

    def collapse(self) -> DiscreteCoupling:
        """Integrate out u: sum of length * (delta_x  ⊗ kernel) over segments."""
        triples = []
        for s in self.segments:
            triples.extend((s.x, y, s.length * w)
                           for y, w in zip(s.kernel.atoms, s.kernel.weights))
        return DiscreteCoupling.from_pairs(triples)

    def is_martingale(self, tol=None) -> bool:
        return all(scalars.eq(s.kernel.mean(), s.x, tol) for s in self.segments)

    def refine(self, cuts) -> "LiftedCoupling":
        """Split segments at the given u-values (kernels are constant, so exact)."""
        cuts = sorted(cuts)
        out = []
        for s in self.segments:
            inner = [c for c in cuts if scalars.lt(s.a, c) and scalars.lt(c, s.b)]
            lo = s.a
            for c in inner:
                out.append(Segment(lo, c, s.x, s.kernel))
                lo = c
            out.append(Segment(lo, s.b, s.x, s.kernel))
        return LiftedCoupling(tuple(out))

    def to_json(self):
        return {"segments": [{"a": scalars.scalar_str(s.a), "b": scalars.scalar_str(s.b),
                              "x": scalars.scalar_str(s.x), "kernel": s.kernel.to_json()}
                             for s in self.segments]}

    @classmethod
    def from_json(cls, obj, exact=True):
        try:
            segs = tuple(Segment(scalars.parse_scalar(s["a"], exact),
                                 scalars.parse_scalar(s["b"], exact),
                                 scalars.parse_scalar(s["x"], exact),
                                 DiscreteMeasure.from_json(s["kernel"], exact))
                         for s in obj["segments"])
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed lifted coupling object: {exc}") from exc
        return cls(segs)


def lift(pi: DiscreteCoupling) -> LiftedCoupling:
    """The plain embedding: segment per atom of mu, kernel pi_{F_mu^-1(u)}."""
    mu = pi.first_marginal()
    kernel = disintegrate(pi)
    segs, lo = [], 0
    for x, c in zip(mu.atoms, mu.cum_weights()):
        segs.append(Segment(lo, c, x, kernel[x]))
        lo = c
    return LiftedCoupling(tuple(segs))


def lifted_hoeffding_frechet(mu: DiscreteMeasure, nu: DiscreteMeasure) -> LiftedCoupling:
    """Quantile-graph lift of the comonotone coupling: kernel delta_{F_nu^-1(u)}.

    Differs from lift(hoeffding_frechet(mu, nu)) whenever F_nu^-1 is not
    constant on a jump of F_mu.
    """
    from .measures import merged_quantile_pieces

    segs, lo = [], 0
    for length, x, y in merged_quantile_pieces(mu, nu):
        segs.append(Segment(lo, lo + length, x, DiscreteMeasure.dirac(y)))
        lo = lo + length
    return LiftedCoupling(tuple(segs))


def common_refinement(l1: LiftedCoupling, l2: LiftedCoupling):
    """Refine both lifted couplings onto the union of their breakpoints."""
    cuts1 = [s.b for s in l1.segments]
    cuts2 = [s.b for s in l2.segments]
    r1 = l1.refine(cuts2)
    r2 = l2.refine(cuts1)
    if len(r1.segments) != len(r2.segments):
        raise InternalError("refinement produced mismatched partitions")
    return r1, r2
