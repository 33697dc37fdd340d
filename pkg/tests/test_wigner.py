import itertools
import math

import numpy as np
import pytest

from raimsim.wigner import wigner3j, wigner6j


def clebsch(j1, m1, j2, m2, J, M):
    """CG coefficient from the 3j symbol (independent composition path)."""
    return (-1) ** round(j1 - j2 + M) * math.sqrt(2 * J + 1) * wigner3j(
        j1, j2, J, m1, m2, -M)


def test_selection_rule_m_sum():
    assert wigner3j(1, 1, 1, 1, 1, 1) == 0.0
    assert wigner3j(2, 1, 1, 0, 1, 0) == 0.0


def test_triangle_violation_is_zero():
    assert wigner3j(1, 1, 3, 0, 0, 0) == 0.0
    assert wigner6j(1, 1, 3, 1, 1, 1) == 0.0


def test_110_value_against_cg_sum():
    # <j1 m1 j2 m2|0 0> coupling implies 3j(1,1,0;0,0,0) = -CG(1,0,1,0|0,0)/sqrt(1)
    # brute-force CG from orthogonality of the J=0 state built explicitly:
    # |0,0> = sum_m (-1)^(1-m)/sqrt(3) |1,m>|1,-m>  ->  CG(1,0,1,0|00) = -1/sqrt(3)
    assert wigner3j(1, 1, 0, 0, 0, 0) == pytest.approx(-1 / math.sqrt(3), abs=1e-14)
    # cross-check the clebsch helper too
    assert clebsch(1, 0, 1, 0, 0, 0) == pytest.approx(-1 / math.sqrt(3), abs=1e-14)


@pytest.mark.parametrize("j1,j2,j3", [(1, 1, 2), (1.5, 0.5, 1), (2.5, 1.5, 2), (3, 2, 4)])
def test_3j_even_permutation_symmetry(j1, j2, j3, rng):
    for _ in range(6):
        m1 = rng.integers(0, round(2 * j1) + 1) - j1
        m2 = rng.integers(0, round(2 * j2) + 1) - j2
        m3 = -(m1 + m2)
        if abs(m3) > j3:
            continue
        a = wigner3j(j1, j2, j3, m1, m2, m3)
        b = wigner3j(j2, j3, j1, m2, m3, m1)
        c = wigner3j(j3, j1, j2, m3, m1, m2)
        assert a == pytest.approx(b, abs=1e-12)
        assert a == pytest.approx(c, abs=1e-12)


def test_3j_orthogonality():
    # sum_{m1,m2} (2j3+1) 3j(...m3)^2 = 1
    j1, j2 = 2.5, 1.5
    for j3 in (1, 2, 3, 4):
        for m3 in np.arange(-j3, j3 + 1):
            s = 0.0
            for m1 in np.arange(-j1, j1 + 1):
                m2 = -m3 - m1
                if abs(m2) > j2:
                    continue
                s += (2 * j3 + 1) * wigner3j(j1, j2, j3, m1, m2, m3) ** 2
            assert s == pytest.approx(1.0, abs=1e-12)


def test_6j_orthogonality_identity():
    # sum_x (2x+1) {j1 j2 x; j3 j4 j5}{j1 j2 x; j3 j4 j6} = delta_{j5 j6}/(2 j5+1)
    # (valid when the fixed triads (j1,j4,j5) and (j3,j2,j5) are admissible)
    def tri(a, b, c):
        return abs(a - b) <= c <= a + b

    j1, j2, j3, j4 = 1.5, 1.0, 0.5, 1.0
    for j5, j6 in itertools.product((0.5, 1.5, 2.5), repeat=2):
        xs = np.arange(abs(j1 - j2), j1 + j2 + 0.5)
        s = sum((2 * x + 1) * wigner6j(j1, j2, x, j3, j4, j5)
                * wigner6j(j1, j2, x, j3, j4, j6) for x in xs)
        admissible = tri(j1, j4, j5) and tri(j3, j2, j5)
        expected = (1.0 / (2 * j5 + 1)) if (j5 == j6 and admissible) else 0.0
        assert s == pytest.approx(expected, abs=1e-10)


def test_large_j_stability():
    # Regge-symmetric special value: 3j(j,j,0;m,-m,0) = (-1)^(j-m)/sqrt(2j+1)
    for j in (40, 75, 100):
        for m in (0, 11, j):
            val = wigner3j(j, j, 0, m, -m, 0)
            ref = (-1) ** (j - m) / math.sqrt(2 * j + 1)
            assert val == pytest.approx(ref, rel=1e-10)
    # 6j with one zero argument: {a b c; 0 c b} = (-1)^(a+b+c)/sqrt((2b+1)(2c+1))
    a, b, c = 60, 50, 40
    ref = (-1) ** (a + b + c) / math.sqrt((2 * b + 1) * (2 * c + 1))
    assert wigner6j(a, b, c, 0, c, b) == pytest.approx(ref, rel=1e-10)


def test_half_integer_validation():
    with pytest.raises(ValueError):
        wigner3j(1.2, 1, 1, 0, 0, 0)
