from fractions import Fraction as F

import pytest

from martot.errors import PreconditionError
from martot.piecewise import (PiecewiseConstant, PiecewiseLinear, compose,
                              compose_pc, generalized_left_inverse,
                              integrate_positive_part)


def step(breaks, values):
    return PiecewiseConstant(tuple(breaks), tuple(values))


# Example-A quantile difference F_mu^-1 - F_nu^-1: +1 on (0,1/2], -1 on (1/2,1].
DIFF_A = step([0, F(1, 2), 1], [1, -1])


def test_integrate_positive_part_zero_function():
    z = step([0, 1], [0])
    assert integrate_positive_part(z, 1) == 0


def test_integrate_positive_part_example_a():
    # Hand integration: positive part is 1 on (0,1/2], 0 after.
    assert integrate_positive_part(DIFF_A, 1) == F(1, 2)
    assert integrate_positive_part(DIFF_A, F(1, 4)) == F(1, 4)


def test_integrate_positive_part_domain_error():
    with pytest.raises(PreconditionError):
        integrate_positive_part(DIFF_A, 2)


def test_signed_split_reassembles_integral():
    f = step([0, F(1, 3), F(1, 2), F(3, 4), 1], [2, -3, 0, 5])
    for u in [F(1, 5), F(1, 3), F(2, 5), F(1, 2), F(2, 3), 1]:
        plus = f.positive_part().integral(u)
        minus = f.negative_part().integral(u)
        assert f.integral(u) == plus - minus


def test_antiderivative_matches_integral():
    f = step([0, F(1, 4), F(2, 3), 1], [3, -1, F(1, 2)])
    g = f.antiderivative()
    assert g.is_continuous()
    for u in [0, F(1, 8), F(1, 4), F(1, 2), F(2, 3), F(9, 10), 1]:
        assert g(u) == f.integral(u)


def identity_pl():
    return PiecewiseLinear((0, 1), ((0, 1),), 0)


def test_left_inverse_identity():
    inv = generalized_left_inverse(identity_pl())
    for u in [0, F(1, 3), 1]:
        assert inv(u) == u


def test_left_inverse_example_a_psi_minus():
    # Psi_-(u) = max(u - 1/2, 0): flat then slope one.
    psi_minus = PiecewiseLinear((0, F(1, 2), 1), ((0, 0), (0, F(1, 2))), 0)
    inv = generalized_left_inverse(psi_minus)
    assert inv.lo == 0 and inv.hi == F(1, 2)
    for t in [F(1, 8), F(1, 4), F(1, 2)]:
        assert inv(t) == F(1, 2) + t
    # inf convention at the plateau level 0.
    assert inv(0) == 0


def test_left_inverse_interior_plateau_left_value():
    # Rise to 1/2, plateau, rise again: the inverse jumps across the plateau.
    f = PiecewiseLinear((0, F(1, 4), F(1, 2), 1),
                        ((0, F(1, 2)), (F(1, 2), F(1, 2)), (F(1, 2), 1)), 0)
    inv = generalized_left_inverse(f)
    assert inv(F(1, 2)) == F(1, 4)          # left edge of the plateau
    assert inv.right_limit(F(1, 2)) == F(1, 2)  # jump past it
    assert inv(F(3, 4)) == F(3, 4)


def test_left_inverse_rejects_decreasing():
    f = PiecewiseLinear((0, 1), ((1, 0),), 1)
    with pytest.raises(PreconditionError):
        generalized_left_inverse(f)


def test_inverse_after_function_is_identity_off_plateaus():
    f = PiecewiseLinear((0, F(1, 4), F(1, 2), 1),
                        ((0, F(1, 3)), (F(1, 3), F(1, 3)), (F(1, 3), 1)), 0)
    inv = generalized_left_inverse(f)
    for u in [F(1, 8), F(1, 4), F(3, 4), F(9, 10)]:
        assert inv(f(u)) == u or (F(1, 4) < u <= F(1, 2))
    # F(F^-1(t)) = t on the range of F (continuity).
    for t in [F(1, 6), F(1, 3), F(1, 2), F(9, 10)]:
        assert f(inv(t)) == t


def test_compose_identity_neutral():
    f = PiecewiseLinear((0, F(1, 2), 1), ((0, F(1, 4)), (F(1, 4), 1)), 0)
    left = compose(identity_pl(), f)
    for u in [0, F(1, 8), F(1, 2), F(7, 8), 1]:
        assert left(u) == f(u)


def test_compose_example_a_phi():
    # phi = Psi_-^{-1} o Psi_+ for Example A equals u + 1/2 on (0, 1/2].
    psi_plus = DIFF_A.positive_part().antiderivative()
    psi_minus = DIFF_A.negative_part().antiderivative()
    phi = compose(generalized_left_inverse(psi_minus), psi_plus)
    for u in [F(1, 8), F(1, 4), F(1, 2)]:
        assert phi(u) == u + F(1, 2)


def test_compose_pc_example_a():
    # F_nu^-1 o phi on (0,1/2] is 1 on (0,1/4] and 2 on (1/4,1/2].
    psi_plus = DIFF_A.positive_part().antiderivative()
    psi_minus = DIFF_A.negative_part().antiderivative()
    phi = compose(generalized_left_inverse(psi_minus), psi_plus)
    qf_nu = step([0, F(1, 4), F(1, 2), F(3, 4), 1], [-2, -1, 1, 2])
    comp = compose_pc(qf_nu, phi)
    assert comp(F(1, 8)) == 1
    assert comp(F(1, 4)) == 1
    assert comp(F(3, 8)) == 2
    assert comp(F(1, 2)) == 2


def test_compose_pc_requires_range_in_domain():
    f = PiecewiseLinear((0, 1), ((0, 2),), 0)  # range [0, 2]
    g = step([0, 1], [5])
    with pytest.raises(PreconditionError):
        compose_pc(g, f)


def test_compose_associative_on_refinements():
    f = PiecewiseLinear((0, F(1, 3), 1), ((0, F(1, 4)), (F(1, 4), 1)), 0)
    g = PiecewiseLinear((0, F(1, 2), 1), ((0, F(3, 4)), (F(3, 4), 1)), 0)
    h = PiecewiseLinear((0, F(2, 3), 1), ((0, F(1, 2)), (F(1, 2), 1)), 0)
    lhs = compose(compose(h, g), f)
    rhs = compose(h, compose(g, f))
    for k in range(13):
        u = F(k, 12)
        assert lhs(u) == rhs(u)


def test_pc_simplify_merges_equal_neighbours():
    f = step([0, F(1, 4), F(1, 2), 1], [3, 3, -1]).simplify()
    assert f.breaks == (0, F(1, 2), 1)
    assert f.values == (3, -1)
