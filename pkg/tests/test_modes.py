import math

import numpy as np
import pytest

from raimsim.errors import ConfigurationError, NumericalError
from raimsim.modes import (
    CONFIGS,
    SystemGeometry,
    analytic_frequencies,
    equilibrium,
    hessian,
    normal_modes,
    potential,
)
from raimsim.units import UNITS


@pytest.fixture(scope="module")
def geom():
    return SystemGeometry()


def test_beta_value(geom):
    assert geom.beta == pytest.approx(9.012 / (9.012 + 86.909), rel=1e-12)


def test_ion_spacing_9p2_um(geom):
    assert UNITS.bohr_to_um(geom.d12) == pytest.approx(9.2, rel=0.01)


# ---------------------------------------------------------------------------
# potential
# ---------------------------------------------------------------------------

def test_gg_potential_at_equilibrium(geom):
    pos = equilibrium(geom, "gg")
    v = potential(geom, "gg", pos)
    # harmonic ion terms plus (repulsive) Coulomb at spacing d12; tweezers at rest
    expected = (0.5 * geom.m_i * geom.omega_i**2 * (pos[0] ** 2 + pos[1] ** 2)
                + 1.0 / geom.d12)
    assert v == pytest.approx(expected, rel=1e-12)


def test_spring_vanishes_at_rest_length(geom):
    pos = equilibrium(geom, "gg")
    # at the gg equilibrium each |z_l - zeta_l| equals d exactly
    assert abs(abs(pos[0] - pos[2]) - geom.d) < 1e-6
    assert potential(geom, "gR", pos) == pytest.approx(
        potential(geom, "gg", pos), rel=1e-14)


def test_rr_minus_gg_is_sum_of_single_springs(geom, rng):
    base = equilibrium(geom, "gg")
    for _ in range(5):
        pos = base + rng.normal(scale=50.0, size=4)
        lhs = potential(geom, "RR", pos) - potential(geom, "gg", pos)
        rhs = (potential(geom, "gR", pos) - potential(geom, "gg", pos)
               + potential(geom, "Rg", pos) - potential(geom, "gg", pos))
        assert lhs == pytest.approx(rhs, rel=1e-12)


def test_coincident_ions_raise(geom):
    with pytest.raises(NumericalError):
        potential(geom, "gg", [1.0, 1.0, 2.0, 3.0])


def test_unknown_config_rejected(geom):
    with pytest.raises(ConfigurationError):
        potential(geom, "rr", [0.0, 1.0, 2.0, 3.0])


# ---------------------------------------------------------------------------
# equilibria
# ---------------------------------------------------------------------------

def test_gg_equilibrium_analytic(geom):
    pos = equilibrium(geom, "gg")
    assert pos[1] - pos[0] == pytest.approx(geom.d12, rel=1e-12)
    assert pos[2] == pytest.approx(geom.tweezer_centers[0], abs=1e-9)
    assert pos[3] == pytest.approx(geom.tweezer_centers[1], abs=1e-9)


@pytest.mark.parametrize("o", CONFIGS)
def test_equilibrium_gradient_zero(geom, o):
    from raimsim.modes import _gradient
    pos = equilibrium(geom, o)
    f_nat = geom.m_i * geom.omega_i**2 * geom.d12
    assert np.linalg.norm(_gradient(geom, o, pos)) < 1e-12 * f_nat


def test_rr_equilibrium_mirror_antisymmetric(geom):
    pos = equilibrium(geom, "RR")
    assert pos[0] == pytest.approx(-pos[1], rel=1e-12)
    assert pos[2] == pytest.approx(-pos[3], rel=1e-12)


def test_default_centers_make_equilibria_coincide(geom):
    # tweezers sit exactly a bond length outside each ion, so the RAIM
    # springs are at rest in every configuration and the equilibria agree
    pos_gg = equilibrium(geom, "gg")
    for o in ("gR", "Rg", "RR"):
        assert np.allclose(equilibrium(geom, o), pos_gg, atol=1e-7)


# ---------------------------------------------------------------------------
# hessian
# ---------------------------------------------------------------------------

def test_gg_hessian_block_structure(geom):
    A = hessian(geom, "gg")
    assert abs(A[0, 2]) == 0 and abs(A[0, 3]) == 0
    assert abs(A[1, 2]) == 0 and abs(A[1, 3]) == 0
    assert A[2, 2] == pytest.approx(geom.omega_t**2, rel=1e-12)
    assert A[2, 3] == 0


@pytest.mark.parametrize("o", CONFIGS)
def test_hessian_symmetric(geom, o):
    A = hessian(geom, o)
    assert np.array_equal(A, A.T)


@pytest.mark.parametrize("o", CONFIGS)
def test_hessian_vs_finite_differences(geom, o):
    pos = equilibrium(geom, o)
    h = 1e-4 * geom.d12
    n = 4
    fd = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            pp = pos.copy(); pp[i] += h; pp[j] += h
            pm = pos.copy(); pm[i] += h; pm[j] -= h
            mp = pos.copy(); mp[i] -= h; mp[j] += h
            mm = pos.copy(); mm[i] -= h; mm[j] -= h
            fd[i, j] = (potential(geom, o, pp) - potential(geom, o, pm)
                        - potential(geom, o, mp) + potential(geom, o, mm)) / (4 * h * h)
    minv = 1.0 / np.sqrt(geom.masses)
    fd_mw = fd * np.outer(minv, minv)
    A = hessian(geom, o)
    scale = np.abs(A).max()
    assert np.abs(fd_mw - A).max() < 1e-6 * scale


# ---------------------------------------------------------------------------
# normal modes
# ---------------------------------------------------------------------------

def test_gg_modes_closed_form(geom):
    ms = normal_modes(geom, "gg")
    ref = analytic_frequencies(geom, "gg")
    assert np.abs(ms.freqs_au / ref - 1).max() < 1e-10


def test_rr_modes_exact_formula(geom):
    # exact in the ground-state-only tweezer model, any omega_t
    ms = normal_modes(geom, "RR")
    ref = analytic_frequencies(geom, "RR")
    assert np.abs(ms.freqs_au / ref - 1).max() < 1e-9


def test_gr_limit_frequencies(geom):
    ms = normal_modes(geom, "gR")
    ref = analytic_frequencies(geom, "gR")
    # omega_M / omega_i = 36: limit forms good to well under 2%
    assert np.abs(ms.freqs_au / ref - 1).max() < 0.02


def test_gr_equals_rg_and_vectors_mirror(geom):
    a = normal_modes(geom, "gR")
    b = normal_modes(geom, "Rg")
    assert np.abs(a.freqs_au - b.freqs_au).max() < 1e-12 * a.freqs_au.max()
    # mirror: (z1,z2,zeta1,zeta2) -> (-z2,-z1,-zeta2,-zeta1)
    perm = [1, 0, 3, 2]
    for k in range(4):
        va = a.vectors[k]
        vb = -b.vectors[k][perm]
        assert min(np.abs(va - vb).max(), np.abs(va + vb).max()) < 1e-9


@pytest.mark.parametrize("o", CONFIGS)
def test_vectors_orthonormal_and_descending(geom, o):
    ms = normal_modes(geom, o)
    V = ms.vectors
    assert np.abs(V @ V.T - np.eye(4)).max() < 1e-10
    f = ms.freqs_au
    assert all(a >= b for a, b in zip(f, f[1:]))
    for k in range(4):
        assert V[k, np.argmax(np.abs(V[k]))] > 0


@pytest.mark.parametrize("o", CONFIGS)
def test_trace_identity(geom, o):
    ms = normal_modes(geom, o)
    A = hessian(geom, o)
    assert np.sum(ms.freqs_au**2) == pytest.approx(np.trace(A), rel=1e-10)


def test_rr_low_modes_limit_2pct(geom):
    ms = normal_modes(geom, "RR")
    b = geom.beta
    ref = np.array([math.sqrt(3 * b), math.sqrt(b)]) * geom.omega_i
    assert np.abs(ms.freqs_au[2:] / ref - 1).max() < 0.02


def test_rr_low_modes_monotone_convergence():
    # as omega_M grows, the two low RR modes approach the mixed-crystal
    # values monotonically
    b = SystemGeometry().beta
    lim = np.array([math.sqrt(3 * b), math.sqrt(b)])
    devs = []
    for wm in (10.0, 36.0, 120.0, 400.0):
        geom = SystemGeometry(omega_M_mhz=wm)
        ms = normal_modes(geom, "RR")
        ref = lim * geom.omega_i
        devs.append(np.abs(ms.freqs_au[2:] / ref - 1).max())
    assert all(a > b_ for a, b_ in zip(devs, devs[1:]))
