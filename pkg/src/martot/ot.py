"""Exact finite optimal transport and adapted (nested) Wasserstein distances.

The workhorse is a transportation-network simplex with exact pivots, so the
optimal value of every finite problem with rational data is a rational
number, not a float that happens to be close.  A small dense two-phase
simplex provides an algorithmically independent cross-check, and the nested
brute force composes that dense solver at both stages.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from . import scalars
from .couplings import (DiscreteCoupling, LiftedCoupling, common_refinement,
                        disintegrate)
from .errors import InternalError, PreconditionError, ScaleError
from .measures import DiscreteMeasure, wasserstein_pow

# -- transportation simplex ------------------------------------------------------


@dataclass(frozen=True)
class TransportPlan:
    row_weights: tuple
    col_weights: tuple
    flows: tuple  # of (i, j, mass), mass > 0

    def __post_init__(self):
        m, n = len(self.row_weights), len(self.col_weights)
        rows = [0] * m
        cols = [0] * n
        for i, j, w in self.flows:
            rows[i] += w
            cols[j] += w
        for have, want in zip(rows, self.row_weights):
            if not scalars.eq(have, want):
                raise InternalError("plan row sums do not match the marginal")
        for have, want in zip(cols, self.col_weights):
            if not scalars.eq(have, want):
                raise InternalError("plan column sums do not match the marginal")

    def value(self, cost):
        return sum(w * cost[i][j] for i, j, w in self.flows)

    def support(self):
        return [(i, j) for i, j, _ in self.flows]


def _check_marginals(supply, demand):
    if any(w <= 0 for w in supply) or any(w <= 0 for w in demand):
        raise PreconditionError("marginal weights must be positive")
    ts, td = sum(supply), sum(demand)
    if scalars.all_exact(ts, td):
        if ts != td:
            raise PreconditionError(f"marginal masses differ: {ts} vs {td}")
    elif not scalars.eq(ts, td, 1e-9):
        raise PreconditionError(f"marginal masses differ: {ts} vs {td}")


def solve_ot(cost, supply, demand):
    """Exact minimum of sum c_ij x_ij over the transportation polytope.

    Returns (optimal value, TransportPlan).  The plan is a vertex, so it has
    at most m + n - 1 support points.  Bland's rule on both the entering and
    the leaving arc guarantees termination under exact arithmetic.
    """
    _check_marginals(supply, demand)
    m, n = len(supply), len(demand)

    # Northwest-corner initial basis (m + n - 1 arcs, zeros allowed).
    flows = {}
    basis = []
    a, b = list(supply), list(demand)
    i = j = 0
    while i < m and j < n:
        t = min(a[i], b[j])
        flows[(i, j)] = t
        basis.append((i, j))
        a[i] -= t
        b[j] -= t
        if scalars.is_zero(a[i]) and scalars.is_zero(b[j]) and i + 1 < m:
            i += 1
        elif scalars.is_zero(a[i]) and i + 1 < m:
            i += 1
        else:
            j += 1
    if len(basis) != m + n - 1:
        raise InternalError("northwest corner produced a non-tree basis")

    float_mode = not (scalars.all_exact(*supply) and scalars.all_exact(*demand)
                      and all(scalars.all_exact(*row) for row in cost))
    eps = 1e-12 if float_mode else 0

    while True:
        u, v = _potentials(cost, basis, m, n)
        entering = None
        for r in range(m):
            for s in range(n):
                if (r, s) in flows:
                    continue
                if cost[r][s] - u[r] - v[s] < -eps:
                    entering = (r, s)
                    break
            if entering:
                break
        if entering is None:
            break
        cycle = _cycle(basis, entering, m)
        minus = cycle[1::2]
        theta = min(flows[arc] for arc in minus)
        leaving = min(arc for arc in minus if scalars.eq(flows[arc], theta))
        for k, arc in enumerate(cycle):
            if k % 2 == 0:
                flows[arc] = flows.get(arc, 0) + theta
            else:
                flows[arc] -= theta
        del flows[leaving]
        basis.remove(leaving)
        basis.append(entering)

    value = sum(w * cost[i][j] for (i, j), w in flows.items())
    plan = TransportPlan(tuple(supply), tuple(demand),
                         tuple((i, j, w) for (i, j), w in sorted(flows.items()) if w > 0))
    return value, plan


def _potentials(cost, basis, m, n):
    """Dual potentials u, v with u_i + v_j = c_ij on the basis tree."""
    adj = {}
    for (i, j) in basis:
        adj.setdefault(("r", i), []).append(("c", j))
        adj.setdefault(("c", j), []).append(("r", i))
    u = [None] * m
    v = [None] * n
    u[0] = 0
    stack = [("r", 0)]
    seen = {("r", 0)}
    while stack:
        node = stack.pop()
        for nxt in adj.get(node, ()):
            if nxt in seen:
                continue
            seen.add(nxt)
            if nxt[0] == "c":
                v[nxt[1]] = cost[node[1]][nxt[1]] - u[node[1]]
            else:
                u[nxt[1]] = cost[nxt[1]][node[1]] - v[node[1]]
            stack.append(nxt)
    if any(x is None for x in u) or any(x is None for x in v):
        raise InternalError("basis graph is not a spanning tree")
    return u, v


def _cycle(basis, entering, m):
    """Arcs of the unique basis cycle closed by the entering arc.

    Returned in alternating orientation starting with the entering arc, so
    even positions gain flow and odd positions lose flow.
    """
    adj = {}
    for (i, j) in basis:
        adj.setdefault(("r", i), []).append((("c", j), (i, j)))
        adj.setdefault(("c", j), []).append((("r", i), (i, j)))
    start, goal = ("r", entering[0]), ("c", entering[1])
    parent = {start: None}
    stack = [start]
    while stack:
        node = stack.pop()
        if node == goal:
            break
        for nxt, arc in adj.get(node, ()):
            if nxt not in parent:
                parent[nxt] = (node, arc)
                stack.append(nxt)
    if goal not in parent:
        raise InternalError("entering arc endpoints are disconnected in the basis")
    path_arcs = []
    node = goal
    while parent[node] is not None:
        node, arc = parent[node]
        path_arcs.append(arc)
    return [entering] + path_arcs


def plan_to_coupling(plan: TransportPlan, row_atoms, col_atoms) -> DiscreteCoupling:
    return DiscreteCoupling.from_pairs(
        (row_atoms[i], col_atoms[j], w) for i, j, w in plan.flows)


# -- dense two-phase simplex (independent cross-check) ----------------------------


def _simplex_min(A, b, c):
    """min c.x subject to Ax = b, x >= 0, everything exact Fractions.

    Straightforward two-phase tableau with Bland's rule; intended for tiny
    instances where an algorithmically independent answer is wanted.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    A = [[Fraction(x) for x in row] for row in A]
    b = [Fraction(x) for x in b]
    for r in range(m):
        if b[r] < 0:
            A[r] = [-x for x in A[r]]
            b[r] = -b[r]

    # Phase 1 tableau: columns = original vars + artificials.
    T = [A[r] + [Fraction(int(r == k)) for k in range(m)] + [b[r]] for r in range(m)]
    basis = [n + r for r in range(m)]
    obj = [sum(T[r][col] for r in range(m)) for col in range(n + m + 1)]

    def pivot(T, obj, basis, allowed):
        while True:
            col = next((jc for jc in allowed if obj[jc] > 0), None)
            if col is None:
                return
            best = None
            for r in range(m):
                if T[r][col] > 0:
                    ratio = T[r][-1] / T[r][col]
                    key = (ratio, basis[r])
                    if best is None or key < best[0]:
                        best = (key, r)
            if best is None:
                raise InternalError("unbounded linear program")
            r = best[1]
            piv = T[r][col]
            T[r] = [x / piv for x in T[r]]
            for rr in range(m):
                if rr != r and T[rr][col] != 0:
                    f = T[rr][col]
                    T[rr] = [x - f * y for x, y in zip(T[rr], T[r])]
            if obj[col] != 0:
                f = obj[col]
                obj[:] = [x - f * y for x, y in zip(obj, T[r])]
            basis[r] = col

    pivot(T, obj, basis, range(n))
    if obj[-1] != 0:
        raise PreconditionError("infeasible linear program")
    # Drive any artificial still in the basis out (or drop its redundant row).
    for r in range(m):
        if basis[r] >= n:
            col = next((jc for jc in range(n) if T[r][jc] != 0), None)
            if col is None:
                continue  # redundant row
            piv = T[r][col]
            T[r] = [x / piv for x in T[r]]
            for rr in range(m):
                if rr != r and T[rr][col] != 0:
                    f = T[rr][col]
                    T[rr] = [x - f * y for x, y in zip(T[rr], T[r])]
            basis[r] = col

    obj2 = [Fraction(0)] * (n + m + 1)
    for jc in range(n):
        obj2[jc] = -Fraction(c[jc])
    for r in range(m):
        if basis[r] < n and obj2[basis[r]] != 0:
            f = obj2[basis[r]]
            obj2 = [x - f * y for x, y in zip(obj2, T[r])]
    pivot(T, obj2, basis, range(n))

    x = [Fraction(0)] * n
    for r in range(m):
        if basis[r] < n:
            x[basis[r]] = T[r][-1]
    value = sum(Fraction(c[jc]) * x[jc] for jc in range(n))
    return value, x


def solve_ot_dense(cost, supply, demand):
    """Transportation optimum via the dense simplex; cross-check oracle."""
    _check_marginals(supply, demand)
    m, n = len(supply), len(demand)
    A, b = [], []
    for i in range(m):
        A.append([Fraction(int(k // n == i)) for k in range(m * n)])
        b.append(supply[i])
    for j in range(n - 1):  # the last column constraint is implied
        A.append([Fraction(int(k % n == j)) for k in range(m * n)])
        b.append(demand[j])
    c = [cost[k // n][k % n] for k in range(m * n)]
    value, _ = _simplex_min(A, b, c)
    return value


# -- exact vertex enumeration (tiny polytopes) ------------------------------------


def _row_reduce(A, b):
    """Gaussian elimination; returns independent rows of [A | b] or None if inconsistent."""
    rows = [[Fraction(x) for x in row] + [Fraction(rhs)] for row, rhs in zip(A, b)]
    ncols = len(rows[0]) - 1 if rows else 0
    out, used = [], 0
    for col in range(ncols):
        piv = next((r for r in range(used, len(rows)) if rows[r][col] != 0), None)
        if piv is None:
            continue
        rows[used], rows[piv] = rows[piv], rows[used]
        p = rows[used][col]
        rows[used] = [x / p for x in rows[used]]
        for r in range(len(rows)):
            if r != used and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[used])]
        used += 1
    for r in range(used, len(rows)):
        if rows[r][-1] != 0:
            return None
    return rows[:used]


def enumerate_polytope_vertices(A, b, max_bases=20000):
    """All vertices of {x >= 0 : Ax = b} by brute-force basis enumeration."""
    reduced = _row_reduce(A, b)
    if reduced is None:
        return []
    rank = len(reduced)
    ncols = len(A[0])
    from math import comb

    if comb(ncols, rank) > max_bases:
        raise ScaleError("vertex enumeration instance too large")
    verts = []
    for cols in combinations(range(ncols), rank):
        square = [[row[cc] for cc in cols] for row in reduced]
        rhs = [row[-1] for row in reduced]
        sol = _solve_square(square, rhs)
        if sol is None or any(x < 0 for x in sol):
            continue
        full = [Fraction(0)] * ncols
        for cc, val in zip(cols, sol):
            full[cc] = val
        if full not in verts:
            verts.append(full)
    return verts


def _solve_square(M, rhs):
    n = len(M)
    aug = [[Fraction(M[r][cc]) for cc in range(n)] + [Fraction(rhs[r])] for r in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [aug[r][-1] for r in range(n)]


def enumerate_martingale_couplings(mu: DiscreteMeasure, nu: DiscreteMeasure):
    """Every vertex of the martingale transportation polytope between mu and nu."""
    m, n = len(mu.atoms), len(nu.atoms)
    A, b = [], []
    for i in range(m):
        A.append([Fraction(int(k // n == i)) for k in range(m * n)])
        b.append(mu.weights[i])
    for j in range(n - 1):
        A.append([Fraction(int(k % n == j)) for k in range(m * n)])
        b.append(nu.weights[j])
    for i in range(m):
        A.append([(Fraction(nu.atoms[k % n]) if k // n == i else Fraction(0))
                  for k in range(m * n)])
        b.append(mu.weights[i] * mu.atoms[i])
    couplings = []
    for vert in enumerate_polytope_vertices(A, b):
        triples = [(mu.atoms[k // n], nu.atoms[k % n], vert[k])
                   for k in range(m * n) if vert[k] > 0]
        couplings.append(DiscreteCoupling.from_pairs(triples))
    return couplings


# -- adapted Wasserstein ------------------------------------------------------------


def kernel_cost_matrix(pi1: DiscreteCoupling, pi2: DiscreteCoupling, rho=1):
    """c[i][j] = |x_i - x'_j|^rho + W_rho^rho(kernel_i, kernel'_j), all exact."""
    mu1, mu2 = pi1.first_marginal(), pi2.first_marginal()
    k1, k2 = disintegrate(pi1), disintegrate(pi2)
    return [[scalars.spow(abs(x1 - x2), rho) + wasserstein_pow(k1[x1], k2[x2], rho)
             for x2 in mu2.atoms] for x1 in mu1.atoms], mu1, mu2


def adapted_wasserstein_pow(pi1: DiscreteCoupling, pi2: DiscreteCoupling, rho=1):
    """AW_rho^rho and an optimal coupling of the first marginals."""
    scalars.check_rho(rho)
    cost, mu1, mu2 = kernel_cost_matrix(pi1, pi2, rho)
    value, plan = solve_ot(cost, list(mu1.weights), list(mu2.weights))
    return value, plan_to_coupling(plan, mu1.atoms, mu2.atoms)


def adapted_wasserstein(pi1: DiscreteCoupling, pi2: DiscreteCoupling, rho=1):
    value_pow, chi = adapted_wasserstein_pow(pi1, pi2, rho)
    return scalars.rho_root(value_pow, rho), chi


def nested_wasserstein_bruteforce_pow(pi1: DiscreteCoupling, pi2: DiscreteCoupling,
                                      rho=1, max_support=5):
    """Bicausal brute force: outer chi times per-pair inner couplings, dense LP twice.

    By the bicausal disintegration characterization this equals AW_rho^rho;
    the computation shares no code path with adapted_wasserstein_pow beyond
    arithmetic, which is what makes it useful as an oracle.
    """
    scalars.check_rho(rho)
    mu1, mu2 = pi1.first_marginal(), pi2.first_marginal()
    nu1, nu2 = pi1.second_marginal(), pi2.second_marginal()
    if max(len(mu1.atoms), len(mu2.atoms), len(nu1.atoms), len(nu2.atoms)) > max_support:
        raise ScaleError(f"brute-force oracle limited to {max_support} support points")
    k1, k2 = disintegrate(pi1), disintegrate(pi2)
    inner = {}
    for x1 in mu1.atoms:
        for x2 in mu2.atoms:
            ka, kb = k1[x1], k2[x2]
            cost = [[scalars.spow(abs(ya - yb), rho) for yb in kb.atoms] for ya in ka.atoms]
            inner[(x1, x2)] = solve_ot_dense(cost, list(ka.weights), list(kb.weights))
    outer = [[scalars.spow(abs(x1 - x2), rho) + inner[(x1, x2)]
              for x2 in mu2.atoms] for x1 in mu1.atoms]
    return solve_ot_dense(outer, list(mu1.weights), list(mu2.weights))


# -- lifted adapted Wasserstein ------------------------------------------------------


def lifted_martingale_lower_bound(lifted: LiftedCoupling):
    """∫ |mean(p_u) - F_mu^-1(u)| du: lower bound for AW_1-hat to any lifted martingale."""
    return sum(s.length * abs(s.kernel.mean() - s.x) for s in lifted.segments)


def lifted_diagonal_bound_pow(l1: LiftedCoupling, l2: LiftedCoupling, rho=1):
    """Cost of the identity coupling of (0,1) with itself: always an upper bound."""
    r1, r2 = common_refinement(l1, l2)
    return sum(s1.length * (scalars.spow(abs(s1.x - s2.x), rho)
                            + wasserstein_pow(s1.kernel, s2.kernel, rho))
               for s1, s2 in zip(r1.segments, r2.segments))


def _segment_relaxation_lower_pow(r1, r2, rho):
    """Transportation over segment masses with the minimal per-pair cost: a lower bound."""
    segs1, segs2 = r1.segments, r2.segments
    cost = []
    for s1 in segs1:
        row = []
        for s2 in segs2:
            gap = 0
            if scalars.lt(s1.b, s2.a):
                gap = s2.a - s1.b
            elif scalars.lt(s2.b, s1.a):
                gap = s1.a - s2.b
            row.append(scalars.spow(gap, rho) + scalars.spow(abs(s1.x - s2.x), rho)
                       + wasserstein_pow(s1.kernel, s2.kernel, rho))
        cost.append(row)
    value, _ = solve_ot(cost, [s.length for s in segs1], [s.length for s in segs2])
    return value


def _uniform_cell_data(lifted: LiftedCoupling, n):
    """Per cell (k/n, (k+1)/n]: the overlay pieces (length, x, kernel)."""
    cells = [[] for _ in range(n)]
    for k in range(n):
        clo, chi = Fraction(k, n), Fraction(k + 1, n)
        for s in lifted.segments:
            lo = max(Fraction(s.a), clo)
            hi = min(Fraction(s.b), chi)
            if hi > lo:
                cells[k].append((hi - lo, s.x, s.kernel))
    return cells


def _cell_pair_cost_pow(cell1, cell2, rho, shift_pow, n):
    """Per-unit-mass cost of matching two cells by the monotone translation."""
    total = 0
    c1 = [list(p) for p in cell1]
    c2 = [list(p) for p in cell2]
    i = j = 0
    while i < len(c1) and j < len(c2):
        step = min(c1[i][0], c2[j][0])
        total += step * (scalars.spow(abs(c1[i][1] - c2[j][1]), rho)
                         + wasserstein_pow(c1[i][2], c2[j][2], rho))
        c1[i][0] -= step
        c2[j][0] -= step
        if c1[i][0] == 0:
            i += 1
        if c2[j][0] == 0:
            j += 1
    return shift_pow + total * n


def lifted_adapted_wasserstein_pow(l1: LiftedCoupling, l2: LiftedCoupling, rho=1,
                                   tol=None, max_cells=64):
    """Upper bound for the lifted adapted cost, exact in the bound-matching cases.

    First solves the segment-atom relaxation; when its value meets the
    diagonal upper bound the optimum is certified and returned.  Otherwise
    equal-length cells are matched by an exact assignment and the grid is
    bisected until two successive values agree (exactly, or within tol for
    float data).
    """
    scalars.check_rho(rho)
    r1, r2 = common_refinement(l1, l2)
    upper = lifted_diagonal_bound_pow(r1, r2, rho)
    lower = _segment_relaxation_lower_pow(r1, r2, rho)
    if scalars.eq(lower, upper, tol):
        return upper
    best = upper
    prev = None
    n = 8
    while n <= max_cells:
        cells1 = _uniform_cell_data(r1, n)
        cells2 = _uniform_cell_data(r2, n)
        cost = [[_cell_pair_cost_pow(cells1[k], cells2[l], rho,
                                     scalars.spow(Fraction(abs(k - l), n), rho), n)
                 for l in range(n)] for k in range(n)]
        mass = [Fraction(1, n)] * n
        value, _ = solve_ot(cost, mass, mass)
        best = min(best, value)
        if prev is not None and scalars.eq(value, prev, tol):
            break
        prev = value
        n *= 2
    if scalars.lt(best, lower, tol):
        raise InternalError("lifted upper bound fell below the relaxation lower bound")
    return best


def aw_rho_equivalence_check(couplings, limit: DiscreteCoupling, rho, eps=1e-2):
    """Empirical check that AW_rho -> 0 iff AW_1 -> 0 plus marginal W_rho -> 0.

    Returns (equivalence_held, rows) where each row carries the distances of
    one sequence element to the limit.
    """
    from .measures import wasserstein

    scalars.check_rho(rho)
    rows = []
    for pi in couplings:
        aw_rho = scalars.as_float(scalars.rho_root(adapted_wasserstein_pow(pi, limit, rho)[0], rho))
        aw_one = scalars.as_float(adapted_wasserstein_pow(pi, limit, 1)[0])
        w_mu = scalars.as_float(wasserstein(pi.first_marginal(), limit.first_marginal(), rho))
        w_nu = scalars.as_float(wasserstein(pi.second_marginal(), limit.second_marginal(), rho))
        rows.append((aw_rho, aw_one, w_mu, w_nu))
    last = rows[-1]
    lhs = last[0] < eps
    rhs = last[1] < eps and last[2] < eps and last[3] < eps
    return lhs == rhs, rows
