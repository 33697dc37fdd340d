import numpy as np
import pytest

from raimsim.atomcore import (
    RydbergLevel,
    angular_matrix_element,
    build_basis,
    level_energy,
    radial_integral,
)
from raimsim.errors import WellNotFoundError
from raimsim.starkmap import (
    MultipoleOperator,
    PotentialCurveSet,
    WellDescriptor,
    assemble_HTI,
    build_multipole,
    diagonalize_scan,
    environment_terms,
    find_well,
    ion_spacing_au,
    parse_level_label,
    reduced_mass_au,
    scan_and_find_well,
    vibrational_states,
)
from raimsim.units import UNITS


@pytest.fixture(scope="module")
def op22(rb87):
    basis = build_basis(22, [0.5], rb87)
    return build_multipole(basis, rb87)


@pytest.fixture(scope="module")
def curves22(op22):
    curves, well = scan_and_find_well(op22)
    return curves, well


# ---------------------------------------------------------------------------
# multipole operator
# ---------------------------------------------------------------------------

def test_dipole_block_same_parity_zero(op22):
    M1 = op22.matrix(1, 0)
    basis = op22.basis
    for i, a in enumerate(basis.levels[:60]):
        for j, b in enumerate(basis.levels[:60]):
            if (a.l + b.l) % 2 == 0:
                assert M1[i, j] == 0.0


def test_entry_factors_into_radial_times_angular(op22, rb87):
    basis = op22.basis
    a = RydbergLevel(22, 0, 1, 1)
    b = RydbergLevel(22, 1, 1, 1)
    i, j = basis.index(a), basis.index(b)
    expected = radial_integral(a, b, 1, rb87) * angular_matrix_element(a, b, 1, 0)
    assert op22.matrix(1, 0)[i, j] == pytest.approx(expected, rel=1e-10)


def test_all_blocks_symmetric(op22):
    for lp in range(1, 7):
        M = op22.matrix(lp, 0)
        assert np.abs(M - M.T).max() < 1e-12 * max(np.abs(M).max(), 1.0)


def test_quadrupole_cross_sector_blocks(rb87):
    basis = build_basis(22, [-1.5, 0.5], rb87)
    op = MultipoleOperator(basis, rb87, lp_max=2)
    Mp = op.matrix(2, 2)   # <m_j = m~_j + 2| ... couples 1/2 <- -3/2
    Mm = op.matrix(2, -2)
    assert np.abs(Mp - Mm.T).max() < 1e-12 * max(np.abs(Mp).max(), 1.0)
    assert np.abs(Mp + Mm).max() > 0  # genuinely nonzero coupling


# ---------------------------------------------------------------------------
# H_TI assembly
# ---------------------------------------------------------------------------

def test_large_r_limit_gives_bare_energies(op22):
    H = assemble_HTI(op22, 1e9)
    vals = np.linalg.eigh(H)[0]
    assert np.abs(vals - np.sort(op22.energies)).max() < 1e-12


def test_nonpositive_r_rejected(op22):
    with pytest.raises(ValueError):
        assemble_HTI(op22, 0.0)


def test_H_real_symmetric(op22):
    H = assemble_HTI(op22, 4000.0)
    assert np.abs(H - H.T).max() < 1e-12 * np.abs(H).max()


def test_trace_identity(op22):
    H = assemble_HTI(op22, 3700.0)
    vals = np.linalg.eigh(H)[0]
    assert vals.sum() == pytest.approx(np.trace(H), rel=1e-9)


def test_induced_dipole_shift_second_order(op22, rb87):
    # large-r shift of 22S_1/2 matches PT2 through the l'=1 block, ~ r^-4
    s = RydbergLevel(22, 0, 1, 1)
    idx = op22.basis.index(s)
    e_s = level_energy(s, rb87)
    M1 = op22.matrix(1, 0)
    denom = e_s - op22.energies
    denom[idx] = np.inf
    alpha_like = np.sum(M1[idx] ** 2 / denom)
    r = 1e5
    H = assemble_HTI(op22, r)
    vals, V = np.linalg.eigh(H)
    k = np.argmax(np.abs(V[idx]))
    shift = vals[k] - e_s
    pt2 = alpha_like / r**4
    assert shift == pytest.approx(pt2, rel=1e-3)


# ---------------------------------------------------------------------------
# scans and tracking
# ---------------------------------------------------------------------------

def test_single_point_scan(op22):
    grid = np.array([4000.0])
    curves = diagonalize_scan(op22, grid)
    assert curves.n_points == 1
    assert curves.energies.shape == (1, op22.basis.size)


def test_vectors_orthonormal(op22):
    curves = diagonalize_scan(op22, np.array([3600.0, 3605.0]), keep_vectors=True)
    for k in range(2):
        V = curves.vectors[k]
        assert np.abs(V.T @ V - np.eye(V.shape[0])).max() < 1e-10


def test_linking_is_bijection(op22):
    grid = np.linspace(3500.0, 3520.0, 9)
    curves = diagonalize_scan(op22, grid)
    for k in range(curves.n_points):
        assert sorted(curves.eigen_index[k]) == list(range(op22.basis.size))


def test_energy_continuity_along_curves(op22):
    grid = np.linspace(4300.0, 4330.0, 31)
    curves = diagonalize_scan(op22, grid)
    c = curves.curve_for_level("22P1/2")
    E = curves.curve_energies(c)
    # bounded by local slope x step, estimated from the coarsest difference
    steps = np.abs(np.diff(E))
    assert steps.max() < 10 * np.median(steps) + 1e-12


def test_parse_level_label():
    lev = parse_level_label("50P1/2")
    assert (lev.n, lev.l, lev.two_j) == (50, 1, 1)
    lev = parse_level_label("22D5/2")
    assert (lev.n, lev.l, lev.two_j) == (22, 2, 5)


# ---------------------------------------------------------------------------
# wells
# ---------------------------------------------------------------------------

def _synthetic_curves(r, E):
    return PotentialCurveSet(
        op=None, grid=r, energies=E[:, None],
        eigen_index=np.zeros((len(r), 1), dtype=int),
        link_overlap=np.ones((len(r) - 1, 1)),
        diabatic=np.zeros((len(r) - 1, 1), dtype=bool))


def test_parabolic_well_recovers_omega_exactly():
    mu = reduced_mass_au()
    omega = 5e-9
    d0 = 30000.0
    r = np.linspace(d0 - 400, d0 + 400, 4001)
    E = 0.5 * mu * omega**2 * (r - d0) ** 2 - 1e-6
    well = find_well(_synthetic_curves(r, E), 0)
    assert well.omega_au == pytest.approx(omega, rel=1e-10)
    assert well.d_au == pytest.approx(d0, abs=1e-6)


def test_no_minimum_raises():
    r = np.linspace(1000.0, 2000.0, 100)
    E = -1.0 / r
    with pytest.raises(WellNotFoundError):
        find_well(_synthetic_curves(r, E), 0)


def test_harmonic_vibrational_spectrum():
    mu = reduced_mass_au()
    omega = 5e-9
    d0 = 30000.0
    r = np.linspace(d0 - 1500, d0 + 1500, 2001)
    E = 0.5 * mu * omega**2 * (r - d0) ** 2
    well = WellDescriptor(curve_label="synthetic", curve_index=0, d_au=d0,
                          e_min=0.0, depth_au=E.max(), omega_au=omega,
                          mu_au=mu, window=(d0 - 100, d0 + 100),
                          barrier=(r[0], E[0]))
    well = vibrational_states(well, r, E, 5)
    ladder = np.array(well.vibrational_mhz)
    expected = UNITS.energy_to_mhz(omega) * (np.arange(5) + 0.5)
    assert np.allclose(ladder, expected, rtol=1e-4)
    assert well.all_bound
    assert all(a < b for a, b in zip(ladder, ladder[1:]))


def test_deep_well_returns_requested_count():
    mu = reduced_mass_au()
    omega = 5e-9
    d0 = 30000.0
    r = np.linspace(d0 - 2000, d0 + 2000, 2501)
    E = 0.5 * mu * omega**2 * (r - d0) ** 2
    well = WellDescriptor(curve_label="synthetic", curve_index=0, d_au=d0,
                          e_min=0.0, depth_au=E.max(), omega_au=omega,
                          mu_au=mu, window=(d0 - 100, d0 + 100),
                          barrier=(r[0], E[0]))
    well = vibrational_states(well, r, E, 5)
    assert len(well.vibrational_mhz) == 5


def test_shallow_well_flags_missing_states():
    mu = reduced_mass_au()
    omega = 5e-9
    d0 = 30000.0
    r = np.linspace(d0 - 300, d0 + 300, 1001)
    E = 0.5 * mu * omega**2 * (r - d0) ** 2
    well = WellDescriptor(curve_label="synthetic", curve_index=0, d_au=d0,
                          e_min=0.0, depth_au=UNITS.mhz_to_energy(2.0),
                          omega_au=omega, mu_au=mu, window=(d0 - 100, d0 + 100),
                          barrier=(r[0], E[0]))
    # depth of 2 MHz only admits a couple of ~0.86 MHz quanta
    well = vibrational_states(well, r, E, 5)
    assert not well.all_bound
    assert len(well.vibrational_mhz) < 5


# ---------------------------------------------------------------------------
# the 22P1/2 molecular well (scan-level integration test)
# ---------------------------------------------------------------------------

def test_22p_well_between_manifolds(curves22, rb87):
    curves, well = curves22
    # a genuine well on the P1/2 curve: interior minimum, positive depth
    assert well.depth_mhz > 100.0
    assert well.omega_mhz > 0
    # located between the adjacent hydrogenic manifolds in energy
    e19 = -0.5 / 19.0**2
    e20 = -0.5 / 20.0**2
    assert e19 < well.e_min < e20
    # bond length in the expected scaling ballpark (1.85 a0 n^2.5 +- 25%)
    assert well.d_au == pytest.approx(1.85 * 22**2.5, rel=0.25)


def test_22p_vibrational_vs_harmonic(curves22):
    curves, well = curves22
    c = well.curve_index
    r, E = curves.grid, curves.curve_energies(c)
    w = vibrational_states(well, r, E, 5)
    gap = w.vibrational_mhz[1] - w.vibrational_mhz[0]
    assert gap == pytest.approx(w.omega_mhz, rel=0.15)


# ---------------------------------------------------------------------------
# environment terms
# ---------------------------------------------------------------------------

def test_environment_vanishes_in_isolated_limit(op22):
    H = environment_terms(op22, 4000.0, 1e12, 0.0, np.pi)
    assert np.abs(H).max() < 1e-18


def test_theta_orientations_differ(op22):
    w_i = UNITS.omega_au_from_mhz(1.0)
    d12 = ion_spacing_au(w_i)
    H_pi = environment_terms(op22, 4000.0, d12, w_i, np.pi)
    H_0 = environment_terms(op22, 4000.0, d12, w_i, 0.0)
    assert np.abs(H_pi - H_0).max() > 1e-12 * np.abs(H_pi).max()


def test_theta0_requires_d12_larger_than_rci(op22):
    with pytest.raises(ValueError):
        environment_terms(op22, 5000.0, 4000.0, 1e-10, 0.0)


def test_ion_spacing_9p2_um():
    w_i = UNITS.omega_au_from_mhz(1.0)
    d12 = ion_spacing_au(w_i, 9.012)
    assert UNITS.bohr_to_um(d12) == pytest.approx(9.2, rel=0.01)
