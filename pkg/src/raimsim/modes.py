"""Axial normal modes of the two-ion / two-atom crystal in its four
electronic configurations (gg, gR, Rg, RR).

Coordinates are (z1, z2, zeta1, zeta2): ions at z, tweezer atoms at zeta,
trap center at the origin, pair l = 1 on the negative axis. The potential is

    V_o = 1/2 m_i w_i^2 (z1^2+z2^2) + 1/(4 pi eps0) e^2/|z1-z2|
        + 1/2 m_a w_t^2 sum_{l ground} (zeta_l - c_l)^2
        + 1/2 mu w_M^2 sum_{l excited} (|z_l-zeta_l| - d)^2.

The Coulomb term is repulsive (like charges). The tweezer pins an atom
only while it is in the ground state; a Rydberg-excited atom is held by
its RAIM spring instead. This is the model in which the closed-form
spectra hold exactly: the free spectator atom vibrates at w_t, the excited
pairs reduce to a mixed-mass crystal. Atomic units throughout;
constructors take lab units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConfigurationError, NumericalError, UnstableConfigurationError
from .units import UNITS, MASS_BE9_AMU, MASS_RB87_AMU

CONFIGS = ("gg", "gR", "Rg", "RR")

# which ion-atom pairs carry a RAIM spring; pair 1 = (z1, zeta1) on the left,
# config letters read atom 1, atom 2
_ACTIVE_PAIRS = {"gg": (), "gR": (2,), "Rg": (1,), "RR": (1, 2)}


@dataclass(frozen=True)
class SystemGeometry:
    """Masses, trap frequencies and RAIM geometry of the 2+2 crystal."""

    m_ion_amu: float = MASS_BE9_AMU
    m_atom_amu: float = MASS_RB87_AMU
    omega_i_mhz: float = 1.0    # axial ion trap, 2pi x MHz
    omega_t_mhz: float = 0.2    # tweezer, 2pi x MHz
    omega_M_mhz: float = 36.0   # RAIM harmonic frequency, 2pi x MHz
    d_um: float = 1.735         # RAIM bond length

    def __post_init__(self):
        if min(self.m_ion_amu, self.m_atom_amu, self.omega_i_mhz,
               self.omega_M_mhz, self.d_um) <= 0 or self.omega_t_mhz < 0:
            raise ConfigurationError("geometry parameters must be positive")

    @cached_property
    def m_i(self) -> float:
        return UNITS.amu_to_au(self.m_ion_amu)

    @cached_property
    def m_a(self) -> float:
        return UNITS.amu_to_au(self.m_atom_amu)

    @cached_property
    def omega_i(self) -> float:
        return UNITS.omega_au_from_mhz(self.omega_i_mhz)

    @cached_property
    def omega_t(self) -> float:
        return UNITS.omega_au_from_mhz(self.omega_t_mhz)

    @cached_property
    def omega_M(self) -> float:
        return UNITS.omega_au_from_mhz(self.omega_M_mhz)

    @cached_property
    def d(self) -> float:
        return UNITS.um_to_bohr(self.d_um)

    @property
    def beta(self) -> float:
        return self.m_i / (self.m_i + self.m_a)

    @property
    def mu(self) -> float:
        return self.m_i * self.m_a / (self.m_i + self.m_a)

    @cached_property
    def d12(self) -> float:
        """Two-ion equilibrium spacing (2/(m w^2))^(1/3), a0."""
        return (2.0 / (self.m_i * self.omega_i**2)) ** (1.0 / 3.0)

    @cached_property
    def tweezer_centers(self) -> tuple:
        """Tweezers hold the atoms a bond length outside each ion."""
        return (-self.d12 / 2.0 - self.d, self.d12 / 2.0 + self.d)

    @property
    def masses(self) -> np.ndarray:
        return np.array([self.m_i, self.m_i, self.m_a, self.m_a])


def _check_config(o: str) -> str:
    if o not in CONFIGS:
        raise ConfigurationError(f"unknown electronic configuration {o!r}")
    return o


def potential(geom: SystemGeometry, o: str, positions) -> float:
    """Crystal potential energy (Hartree) at positions (z1, z2, zeta1, zeta2)."""
    _check_config(o)
    z1, z2, x1, x2 = np.asarray(positions, dtype=float)
    if z1 == z2:
        raise NumericalError("coincident ions: Coulomb singularity")
    centers = geom.tweezer_centers
    v = 0.5 * geom.m_i * geom.omega_i**2 * (z1**2 + z2**2)
    v += 1.0 / abs(z1 - z2)
    spring = 0.5 * geom.mu * geom.omega_M**2
    for l in (1, 2):
        z, x = (z1, x1) if l == 1 else (z2, x2)
        if l in _ACTIVE_PAIRS[o]:
            v += spring * (abs(z - x) - geom.d) ** 2
        else:
            v += 0.5 * geom.m_a * geom.omega_t**2 * (x - centers[l - 1]) ** 2
    return float(v)


def _gradient(geom: SystemGeometry, o: str, pos: np.ndarray) -> np.ndarray:
    z1, z2, x1, x2 = pos
    c1, c2 = geom.tweezer_centers
    g = np.zeros(4)
    g[0] = geom.m_i * geom.omega_i**2 * z1
    g[1] = geom.m_i * geom.omega_i**2 * z2
    s = math.copysign(1.0, z1 - z2)
    g[0] -= s / (z1 - z2) ** 2
    g[1] += s / (z1 - z2) ** 2
    k = geom.mu * geom.omega_M**2
    for l in (1, 2):
        zi, xi = (0, 2) if l == 1 else (1, 3)
        if l in _ACTIVE_PAIRS[o]:
            u = pos[zi] - pos[xi]
            f = k * (abs(u) - geom.d) * math.copysign(1.0, u)
            g[zi] += f
            g[xi] -= f
        else:
            g[xi] += geom.m_a * geom.omega_t**2 * (pos[xi] - (c1, c2)[l - 1])
    return g


def _hessian_cartesian(geom: SystemGeometry, o: str, pos: np.ndarray) -> np.ndarray:
    z1, z2 = pos[0], pos[1]
    H = np.zeros((4, 4))
    H[0, 0] = H[1, 1] = geom.m_i * geom.omega_i**2
    cc = 2.0 / abs(z1 - z2) ** 3
    H[0, 0] += cc
    H[1, 1] += cc
    H[0, 1] = H[1, 0] = -cc
    k = geom.mu * geom.omega_M**2
    for l in (1, 2):
        zi, xi = (0, 2) if l == 1 else (1, 3)
        if l in _ACTIVE_PAIRS[o]:
            H[zi, zi] += k
            H[xi, xi] += k
            H[zi, xi] -= k
            H[xi, zi] -= k
        else:
            H[xi, xi] += geom.m_a * geom.omega_t**2
    return H


def equilibrium(geom: SystemGeometry, o: str, *, tol: float = 1e-12,
                max_iter: int = 100) -> np.ndarray:
    """Equilibrium positions by Newton iteration from the analytic gg guess.

    Converged when |grad| < tol * (natural force m_i w_i^2 d12). The gg
    initialization keeps each atom on the outer branch of its |z-zeta|
    spring.
    """
    _check_config(o)
    c1, c2 = geom.tweezer_centers
    pos = np.array([-geom.d12 / 2.0, geom.d12 / 2.0, c1, c2])
    f_nat = geom.m_i * geom.omega_i**2 * geom.d12
    for _ in range(max_iter):
        g = _gradient(geom, o, pos)
        if np.linalg.norm(g) < tol * f_nat:
            return pos
        H = _hessian_cartesian(geom, o, pos)
        pos = pos - np.linalg.solve(H, g)
    raise NumericalError(f"equilibrium for {o} did not converge in {max_iter} "
                         f"Newton steps (|g| = {np.linalg.norm(g):.2e})")


def hessian(geom: SystemGeometry, o: str) -> np.ndarray:
    """Mass-weighted Hessian A_jk = (1/sqrt(m_j m_k)) d2V/dr_j dr_k at the
    configuration's own equilibrium."""
    pos = equilibrium(geom, o)
    H = _hessian_cartesian(geom, o, pos)
    minv = 1.0 / np.sqrt(geom.masses)
    return H * np.outer(minv, minv)


@dataclass(frozen=True)
class ModeSpectrum:
    """Normal modes of one electronic configuration.

    `vectors[k]` is the mass-weighted eigenvector of mode k; modes are
    sorted by descending frequency (Fock labels N = (n1..n4) follow this
    order). Degenerate pairs are rotated to a localized, deterministic
    basis; each vector's largest component is positive.
    """

    config: str
    geometry: SystemGeometry
    equilibrium: np.ndarray   # (4,) a0
    freqs_au: np.ndarray      # (4,) descending
    vectors: np.ndarray       # (4, 4), rows are modes

    @property
    def freqs_mhz(self) -> np.ndarray:
        return UNITS.omega_au_to_mhz(self.freqs_au)

    @property
    def mass_weighted_equilibrium(self) -> np.ndarray:
        return self.equilibrium * np.sqrt(self.geometry.masses)


def normal_modes(geom: SystemGeometry, o: str,
                 *, zero_tol: float = 1e-12) -> ModeSpectrum:
    """Eigenmodes of the mass-weighted Hessian, descending frequency order."""
    pos = equilibrium(geom, o)
    A = hessian(geom, o)
    vals, vecs = np.linalg.eigh(A)
    scale = np.abs(vals).max()
    if vals.min() < -zero_tol * scale:
        raise UnstableConfigurationError(
            f"negative Hessian eigenvalue {vals.min():.3e} for {o}")
    vals = np.clip(vals, 0.0, None)
    order = np.argsort(vals)[::-1]
    vals = vals[order]
    V = vecs[:, order].T  # rows are modes
    V = _canonicalize_degenerate(vals, V, zero_tol)
    for k in range(4):
        i = int(np.argmax(np.abs(V[k])))
        if V[k, i] < 0:
            V[k] = -V[k]
    return ModeSpectrum(config=o, geometry=geom, equilibrium=pos,
                        freqs_au=np.sqrt(vals), vectors=V)


def _canonicalize_degenerate(vals: np.ndarray, V: np.ndarray,
                             rel_tol: float = 1e-10) -> np.ndarray:
    """Rotate degenerate subspaces to a deterministic localized basis.

    Within a degenerate cluster the eigenbasis is arbitrary; diagonalizing
    the coordinate-index operator there picks the same localized modes on
    every platform.
    """
    V = V.copy()
    scale = max(vals.max(), 1e-300)
    k = 0
    while k < len(vals):
        j = k + 1
        while j < len(vals) and abs(vals[j] - vals[k]) <= 1e-8 * scale:
            j += 1
        if j - k > 1:
            sub = V[k:j]
            X = sub @ np.diag(np.arange(4.0)) @ sub.T
            _, R = np.linalg.eigh(X)
            V[k:j] = R.T @ sub
        k = j
    return V


def analytic_frequencies(geom: SystemGeometry, o: str) -> np.ndarray:
    """Closed-form mode frequencies for validation, descending (a.u.).

    gg and RR are exact (RR: the two-branch formula
    (1/sqrt2) sqrt(c w_i^2 + w_M^2 +- sqrt(c^2 w_i^4 + 2c(1-2b) w_i^2 w_M^2
    + w_M^4)), c in {3, 1}). gR/Rg are the w_M >> w_i limit forms; the
    spectator atom's w_t mode is exact.
    """
    _check_config(o)
    wi, wt, wm, b = geom.omega_i, geom.omega_t, geom.omega_M, geom.beta
    if o == "gg":
        out = [math.sqrt(3.0) * wi, wi, wt, wt]
    elif o == "RR":
        out = []
        for c in (3.0, 1.0):
            root = math.sqrt(c * c * wi**4 + 2.0 * c * (1.0 - 2.0 * b) * wi**2 * wm**2
                             + wm**4)
            out.append(math.sqrt((c * wi**2 + wm**2 + root) / 2.0))
            out.append(math.sqrt((c * wi**2 + wm**2 - root) / 2.0))
    else:
        disc = math.sqrt(1.0 + b * (b - 1.0))
        out = [wm + (1.0 - b) * wi**2 / wm,
               wi * math.sqrt(1.0 + b + disc),
               wi * math.sqrt(1.0 + b - disc),
               wt]
    return np.sort(np.array(out))[::-1]
