import random
from fractions import Fraction as F

import pytest

from martot.couplings import (DiscreteCoupling, LiftedCoupling,
                              barycentre_deviation, barycentre_dispersion,
                              common_refinement, disintegrate,
                              hoeffding_frechet, is_martingale, is_monge, lift,
                              lifted_hoeffding_frechet, product_coupling,
                              reassemble)
from martot.errors import PreconditionError
from martot.measures import DiscreteMeasure, wasserstein_pow

from .test_measures import MU_A, MU_B, NU_A, NU_B, random_convex_order_pair

HF_A = DiscreteCoupling.from_pairs([(-1, -2, F(1, 4)), (0, -1, F(1, 4)),
                                    (0, 1, F(1, 4)), (1, 2, F(1, 4))])
HF_B = DiscreteCoupling.from_pairs([(-2, -4, F(1, 3)), (-2, -1, F(1, 6)),
                                    (2, 1, F(1, 6)), (2, 4, F(1, 3))])


def diagonal(mu):
    return DiscreteCoupling.from_pairs([(x, x, w) for x, w in zip(mu.atoms, mu.weights)])


def test_marginals_recovered():
    assert HF_A.first_marginal() == MU_A
    assert HF_A.second_marginal() == NU_A


def test_hoeffding_frechet_diagonal_when_equal():
    assert hoeffding_frechet(MU_A, MU_A) == diagonal(MU_A)


def test_hoeffding_frechet_golden_example_a():
    assert hoeffding_frechet(MU_A, NU_A) == HF_A


def test_hoeffding_frechet_golden_example_b():
    assert hoeffding_frechet(MU_B, NU_B) == HF_B


def test_hf_marginal_conservation_and_optimality_random():
    from martot.ot import solve_ot

    rng = random.Random(5)
    for _ in range(40):
        mu, nu = random_convex_order_pair(rng)
        hf = hoeffding_frechet(mu, nu)
        assert hf.first_marginal() == mu
        assert hf.second_marginal() == nu
        for rho in (1, 2):
            cost = [[abs(x - y) ** rho for y in nu.atoms] for x in mu.atoms]
            lp, _ = solve_ot(cost, list(mu.weights), list(nu.weights))
            assert hf.cost(lambda x, y: abs(x - y) ** rho) == lp == wasserstein_pow(mu, nu, rho)


def test_disintegrate_product():
    pi = product_coupling(MU_A, NU_A)
    for k in disintegrate(pi).values():
        assert k == NU_A


def test_disintegrate_examples():
    assert disintegrate(HF_A)[0] == DiscreteMeasure.uniform_over([-1, 1])
    assert disintegrate(HF_B)[-2] == DiscreteMeasure.from_pairs([(-4, F(2, 3)), (-1, F(1, 3))])


def test_disintegrate_reassemble_round_trip():
    rng = random.Random(11)
    for _ in range(20):
        mu, nu = random_convex_order_pair(rng)
        pi = hoeffding_frechet(mu, nu)
        assert reassemble(pi.first_marginal(), disintegrate(pi)) == pi


def test_reassemble_domain_mismatch():
    with pytest.raises(PreconditionError):
        reassemble(MU_A, {0: NU_A})


def test_is_martingale_and_monge():
    assert is_martingale(diagonal(MU_A))
    assert is_monge(diagonal(MU_A))
    assert not is_martingale(HF_A)  # kernel means are -2, 0, 2
    # Scaling pair: the quantile of nu is constant on each jump of F_mu.
    scaled = hoeffding_frechet(DiscreteMeasure.uniform_over([-1, 1]),
                               DiscreteMeasure.uniform_over([-2, 2]))
    assert is_monge(scaled)
    assert not is_monge(HF_A)
    assert not is_monge(HF_B)


def test_barycentre_dispersion_examples():
    assert barycentre_dispersion(HF_A)
    assert barycentre_dispersion(diagonal(MU_A))
    anti = DiscreteCoupling.from_pairs([(-1, 2, F(1, 2)), (1, -2, F(1, 2))])
    assert not barycentre_dispersion(anti)


def test_barycentre_dispersion_of_hf_random():
    rng = random.Random(13)
    for _ in range(60):
        mu, nu = random_convex_order_pair(rng)
        assert barycentre_dispersion(hoeffding_frechet(mu, nu))


def test_barycentre_deviation_example_a():
    assert barycentre_deviation(HF_A) == F(1, 2)


def test_lift_dirac_first_marginal():
    pi = product_coupling(DiscreteMeasure.dirac(0), NU_A)
    lifted = lift(pi)
    assert len(lifted.segments) == 1
    assert lifted.segments[0].kernel == NU_A


def test_lift_example_a_segments():
    lifted = lift(HF_A)
    kernels = [s.kernel for s in lifted.segments]
    assert kernels == [DiscreteMeasure.dirac(-2),
                       DiscreteMeasure.uniform_over([-1, 1]),
                       DiscreteMeasure.dirac(2)]
    assert lifted.collapse() == HF_A


def test_lift_of_martingale_is_lifted_martingale():
    m = DiscreteCoupling.from_pairs([(-1, -2, F(3, 16)), (-1, 2, F(1, 16)),
                                     (0, -1, F(1, 4)), (0, 1, F(1, 4)),
                                     (1, -2, F(1, 16)), (1, 2, F(3, 16))])
    assert is_martingale(m)
    assert lift(m).is_martingale()


def test_lifted_hf_differs_from_plain_lift_on_jumps():
    lifted = lifted_hoeffding_frechet(MU_A, NU_A)
    assert all(len(s.kernel.atoms) == 1 for s in lifted.segments)
    assert lifted.collapse() == HF_A
    assert lifted.second_marginal() == NU_A
    # iota(pi) keeps the two-point kernel at x = 0 on both of its segments.
    plain = lift(HF_A)
    assert any(len(s.kernel.atoms) == 2 for s in plain.segments)


def test_common_refinement_alignment():
    l1 = lifted_hoeffding_frechet(MU_A, NU_A)
    l2 = lift(HF_A)
    r1, r2 = common_refinement(l1, l2)
    assert [s.a for s in r1.segments] == [s.a for s in r2.segments]
    assert r1.collapse() == l1.collapse()
    assert r2.collapse() == l2.collapse()


def test_segment_partition_validated():
    with pytest.raises(PreconditionError):
        LiftedCoupling((  # gap between 1/2 and 3/4
            __import__("martot.couplings", fromlist=["Segment"]).Segment(0, F(1, 2), 0, MU_A),
            __import__("martot.couplings", fromlist=["Segment"]).Segment(F(3, 4), 1, 1, MU_A)))
