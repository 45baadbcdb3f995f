from fractions import Fraction

import pytest

from exsys.lattice import alpha_gamma, cf_eval, mu, primitive, ray_sequence, neg2
from exsys.surface import enumerate_surfaces, normal_form


def test_primitive():
    assert primitive((2, 4)) == (1, 2)
    assert primitive((0, -3)) == (0, -1)
    assert primitive((1, 1)) == (1, 1)
    with pytest.raises(ValueError):
        primitive((0, 0))


def test_mu():
    assert mu(Fraction(1, 2)) == 2
    assert mu(Fraction(-3)) == 1
    assert mu(Fraction(5, 6)) == 6
    # minimality: (mu-1)*v is never integral unless mu = 1
    for v in [Fraction(1, 2), Fraction(5, 6), Fraction(-7, 3), Fraction(4)]:
        m = mu(v)
        assert (m * v).denominator == 1
        if m > 1:
            assert ((m - 1) * v).denominator != 1


def test_cf_eval():
    assert cf_eval([5]) == 5
    assert cf_eval([0]) == 0
    # hand evaluation: [1,2,2] = 1 - 1/(2 - 1/2) = 1 - 2/3 = 1/3
    assert cf_eval([1, 2, 2]) == Fraction(1, 3)
    assert cf_eval([1, 1]) == 0
    # undefined: [2, 0, anything-with-inner-zero] e.g. [3, 1, 1] -> [1,1]=0
    assert cf_eval([3, 1, 1]) is None
    with pytest.raises(ValueError):
        cf_eval([])


def test_alpha_gamma_examples():
    assert alpha_gamma((-2, 0, 2, 0)) == (2, 0)
    assert alpha_gamma((-1, 0, 2, 1, 1)) == (2, 0)
    # cf [1,1] = 0 gives alpha = 3, gamma = (3-1)+(3-1)-3 = 1
    assert alpha_gamma((-1, 1, 1, 3, 1, 1)) == (3, 1)


def test_alpha_gamma_preconditions():
    with pytest.raises(ValueError):
        alpha_gamma((2, 0, -2, 0))   # b_0 not negative
    with pytest.raises(ValueError):
        alpha_gamma((-1, -1, -1))    # too short


def test_alpha_gamma_invariants_exhaustive():
    # gamma >= 0 and b_0 + b_alpha - gamma >= 0 over all enumerated
    # b-sequences with |b_i| <= 6 and length <= 8, in every rotation and
    # reflection with b_0 < 0
    seen = 0
    for rank in range(2, 7):
        for b in enumerate_surfaces(rank, 6):
            variants = set()
            for seq in (b, b[::-1]):
                for r in range(len(seq)):
                    variants.add(seq[r:] + seq[:r])
            for v in variants:
                if v[0] >= 0:
                    continue
                alpha, gamma = alpha_gamma(v)
                rays = ray_sequence(v)
                assert rays[alpha] == neg2(rays[0])
                assert gamma >= 0
                assert v[0] + v[alpha] - gamma >= 0
                seen += 1
    assert seen > 100


def test_normalform_trivia():
    assert normal_form((0, 1, 1, 1, 0)) == (0, 0, 1, 1, 1)
    assert normal_form((2, 1, 1, -1, 0)) == normal_form((-1, 0, 2, 1, 1))
    assert normal_form((3, 0, -3, 0)) == normal_form((-3, 0, 3, 0))
