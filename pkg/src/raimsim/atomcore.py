"""Quantum-defect Rydberg structure: levels, energies, radial wavefunctions,
radial integrals and angular matrix elements.

Everything is in Hartree atomic units. Radial wavefunctions follow the
quantum-defect form

    R(r) = sqrt((2/n*)^3 (n*-l*-1)! / ((n*+l*)! 2n*)) e^{-r/n*} (2r/n*)^{l*}
           L^{2l*+1}_{n*-l*-1}(2r/n*)

with n* = n - delta(n,l,j) and l* = l - delta + I(l), I(l) = floor(delta),
so the generalized Laguerre degree n*-l*-1 = n-l-I-1 is a non-negative
integer while the upper index 2l*+1 is non-integer. The polynomial is
evaluated by the three-term recurrence in extended precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

import numpy as np

from .errors import ConfigurationError, InvalidChannelError, NumericalAccuracyError
from .wigner import wigner3j, wigner6j

R_CORE = 0.05          # a0; inner cutoff below which QDT wavefunctions are unphysical
GRID_POINTS = 32769    # log-spaced radial grid (odd, for Simpson)


# ---------------------------------------------------------------------------
# quantum defects
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuantumDefectTable:
    """Rydberg-Ritz coefficients per (l, j) channel for one species."""

    species: str
    n_min: int
    channels: dict  # (l, two_j) -> (delta0, delta2)

    @classmethod
    def from_file(cls, path) -> "QuantumDefectTable":
        species = None
        n_min = None
        channels = {}
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                parts = line.split()
                if len(parts) != 6:
                    raise ConfigurationError(
                        f"{path}:{lineno}: expected 6 columns, got {len(parts)}")
                sp, l, j, d0, d2, nm = parts
                if species is None:
                    species = sp
                elif sp != species:
                    raise ConfigurationError(
                        f"{path}:{lineno}: mixed species {sp!r} vs {species!r}")
                two_j = round(2 * float(j))
                channels[(int(l), two_j)] = (float(d0), float(d2))
                n_min = int(nm) if n_min is None else n_min
        if not channels:
            raise ConfigurationError(f"{path}: no channels found")
        return cls(species=species, n_min=n_min, channels=channels)

    @classmethod
    def bundled(cls, species: str = "Rb87") -> "QuantumDefectTable":
        name = {"Rb87": "rb87_defects.txt"}.get(species)
        if name is None:
            raise ConfigurationError(f"no bundled defect table for species {species!r}")
        with resources.as_file(resources.files("raimsim.data") / name) as p:
            return cls.from_file(p)

    def defect(self, n: int, l: int, two_j: int) -> float:
        """delta(n,l,j); channels above the table's maximum l are hydrogenic."""
        if n < self.n_min:
            raise ConfigurationError(
                f"n={n} below n_min={self.n_min} for {self.species}")
        coeff = self.channels.get((l, two_j))
        if coeff is None:
            return 0.0
        d0, d2 = coeff
        return d0 + d2 / (n - d0) ** 2


# ---------------------------------------------------------------------------
# levels and basis
# ---------------------------------------------------------------------------

_L_LETTERS = "SPDFGHIKLMNOQRTUVWXYZ"


@dataclass(frozen=True, order=True)
class RydbergLevel:
    """|n, s=1/2, l, j, m_j> with j, m_j stored as doubled integers."""

    n: int
    l: int
    two_j: int
    two_mj: int

    def __post_init__(self):
        if self.l < 0 or self.l >= self.n:
            raise ConfigurationError(f"l={self.l} outside 0 <= l < n={self.n}")
        if abs(self.two_j - 2 * self.l) != 1:
            raise ConfigurationError(
                f"j={self.two_j / 2} not |l±1/2| for l={self.l}")
        if abs(self.two_mj) > self.two_j or (self.two_mj - self.two_j) % 2:
            raise ConfigurationError(
                f"m_j={self.two_mj / 2} invalid for j={self.two_j / 2}")

    @property
    def j(self) -> float:
        return self.two_j / 2.0

    @property
    def mj(self) -> float:
        return self.two_mj / 2.0

    def label(self) -> str:
        letter = _L_LETTERS[self.l] if self.l < len(_L_LETTERS) else f"(l={self.l})"
        return f"{self.n}{letter}{self.two_j}/2"


def channel_parameters(n: int, l: int, two_j: int, defects: QuantumDefectTable):
    """(n*, l*, k) with k = n - l - I(l) - 1 the Laguerre degree."""
    delta = defects.defect(n, l, two_j)
    i_l = math.floor(delta)
    n_star = n - delta
    l_star = l - delta + i_l
    k = n - l - i_l - 1
    if k < 0:
        raise InvalidChannelError(
            f"n*-l*-1 = {k} < 0 for n={n}, l={l}, j={two_j}/2")
    return n_star, l_star, k


def level_energy(level: RydbergLevel, defects: QuantumDefectTable) -> float:
    """Rydberg-Ritz energy -1/(2 n*^2) in Hartree."""
    n_star, _, _ = channel_parameters(level.n, level.l, level.two_j, defects)
    return -0.5 / n_star**2


@dataclass(frozen=True, eq=False)
class BasisSet:
    """Truncated basis n_c-4 < n < n_c+4 for the requested m_j sectors.

    Levels are ordered ascending by (m_j, n, l, j); each sector occupies a
    contiguous index range. Hash/eq are by identity: instances are built once
    and shared, and caches key on the object.
    """

    species: str
    n_center: int
    two_mj_sectors: tuple
    levels: tuple
    sector_slices: dict

    @property
    def size(self) -> int:
        return len(self.levels)

    def sector(self, two_mj: int) -> slice:
        return self.sector_slices[two_mj]

    def index(self, level: RydbergLevel) -> int:
        return self._index_map()[level]

    @lru_cache(maxsize=None)
    def _index_map(self):
        return {lev: i for i, lev in enumerate(self.levels)}


def build_basis(n_c: int, mj_sectors, defects: QuantumDefectTable) -> BasisSet:
    """All levels with n_c-4 < n < n_c+4 in the given m_j sectors."""
    sectors = sorted({_two_mj(m) for m in mj_sectors})
    if not sectors:
        raise ConfigurationError("empty m_j sector list")
    if n_c < defects.n_min + 4:
        raise ConfigurationError(
            f"n_c={n_c} must be at least n_min+4 = {defects.n_min + 4}")
    levels = []
    slices = {}
    for two_mj in sectors:
        start = len(levels)
        for n in range(n_c - 3, n_c + 4):
            for l in range(n):
                for two_j in (2 * l - 1, 2 * l + 1):
                    if two_j < 1 or two_j < abs(two_mj):
                        continue
                    levels.append(RydbergLevel(n, l, two_j, two_mj))
        slices[two_mj] = slice(start, len(levels))
    return BasisSet(species=defects.species, n_center=n_c,
                    two_mj_sectors=tuple(sectors), levels=tuple(levels),
                    sector_slices=slices)


def _two_mj(m) -> int:
    t = round(2 * float(m))
    if abs(2 * float(m) - t) > 1e-9:
        raise ConfigurationError(f"m_j={m} is not a half-integer")
    return t


# ---------------------------------------------------------------------------
# radial wavefunctions
# ---------------------------------------------------------------------------

def _genlaguerre_recurrence(k: int, alpha: float, x: np.ndarray) -> np.ndarray:
    """L^alpha_k(x) by the ascending three-term recurrence (extended precision)."""
    xl = x.astype(np.longdouble)
    prev = np.ones_like(xl)
    if k == 0:
        return prev.astype(np.float64)
    curr = 1.0 + alpha - xl
    for m in range(1, k):
        prev, curr = curr, ((2 * m + 1 + alpha - xl) * curr - (m + alpha) * prev) / (m + 1)
    return curr.astype(np.float64)


def radial_wavefunction(level: RydbergLevel, r, defects: QuantumDefectTable):
    """R_{n* l*}(r); r in a0, scalar or array, r > 0."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("r must be positive")
    n_star, l_star, k = channel_parameters(level.n, level.l, level.two_j, defects)
    return _radial_on(r, n_star, l_star, k)


def _radial_on(r: np.ndarray, n_star: float, l_star: float, k: int) -> np.ndarray:
    alpha = 2 * l_star + 1
    x = 2.0 * r / n_star
    ln_norm = 0.5 * (3 * math.log(2.0 / n_star) + math.lgamma(k + 1)
                     - math.lgamma(n_star + l_star + 1) - math.log(2 * n_star))
    lag = _genlaguerre_recurrence(k, alpha, x)
    # assemble in log space to dodge overflow of x**l* against exp(-x/2)
    with np.errstate(divide="ignore"):
        ln_env = ln_norm - x / 2.0 + l_star * np.log(x)
    out = np.exp(ln_env) * lag
    # flush negligible amplitudes to exact zeros: anything this small is
    # physically dead, and pairwise products of such tails go subnormal
    # inside BLAS, which is orders of magnitude slower
    tiny = np.abs(out) < 1e-60
    if tiny.any():
        out[tiny] = 0.0
    return out


def classical_radius(n_star: float) -> float:
    """Outer grid bound 2 n*(n*+15): turning point plus evanescent tail."""
    return 2.0 * n_star * (n_star + 15.0)


def _log_grid(r_max: float, points: int = GRID_POINTS):
    """Log-spaced grid on [R_CORE, r_max] plus Simpson weights for int f dr."""
    u = np.linspace(math.log(R_CORE), math.log(r_max), points)
    r = np.exp(u)
    h = u[1] - u[0]
    w = np.ones(points)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    w *= h / 3.0
    return r, w * r  # absorb dr = r du


def radial_integral(a: RydbergLevel, b: RydbergLevel, p: int,
                    defects: QuantumDefectTable, rtol: float = 1e-8) -> float:
    """int_0^inf R_a(r) r^{p+2} R_b(r) dr for multipole order 1 <= p <= 6.

    Converged result is required: the integral is recomputed on a grid of
    half the resolution and the difference must stay below rtol.
    """
    if not 1 <= p <= 6:
        raise ValueError(f"multipole order p={p} outside 1..6")
    ca = channel_parameters(a.n, a.l, a.two_j, defects)
    cb = channel_parameters(b.n, b.l, b.two_j, defects)
    r_max = max(classical_radius(ca[0]), classical_radius(cb[0]))
    r, w = _log_grid(r_max)
    integrand = _radial_on(r, *ca) * _radial_on(r, *cb) * r ** (p + 2)
    full = float(np.dot(w, integrand))
    coarse = _resimpson(r, integrand)
    if abs(full - coarse) > rtol * max(abs(full), 1e-300):
        raise NumericalAccuracyError(
            f"radial integral <{a.label()}|r^{p}|{b.label()}> not converged: "
            f"{full} vs {coarse}")
    return full


def _resimpson(r: np.ndarray, integrand: np.ndarray) -> float:
    """Same integral on the half-resolution subgrid (accuracy estimate)."""
    rs = r[::2]
    h = math.log(rs[1]) - math.log(rs[0])
    w = np.ones(len(rs))
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    w *= h / 3.0
    return float(np.dot(w * rs, integrand[::2]))


# ---------------------------------------------------------------------------
# angular matrix elements
# ---------------------------------------------------------------------------

def angular_matrix_element(a: RydbergLevel, b: RydbergLevel,
                           lp: int, mp: int = 0) -> float:
    """<a| sqrt(4pi/(2l'+1)) Y_{l'm'} |b> in the |l,s,j,m_j> basis.

    Selection-rule failures (parity of the first 3j, triangles, projection)
    return 0 rather than raising.
    """
    if not 1 <= lp <= 6:
        raise ValueError(f"l'={lp} outside 1..6")
    if mp not in (-2, 0, 2):
        raise ValueError(f"m'={mp} not in {{-2, 0, 2}}")
    return _amat(a.l, a.two_j, a.two_mj, b.l, b.two_j, b.two_mj, lp, mp)


@lru_cache(maxsize=500_000)
def _amat(l, two_j, two_mj, lt, two_jt, two_mjt, lp, mp) -> float:
    if two_mj != two_mjt + 2 * mp:
        return 0.0
    w1 = wigner3j(l, lp, lt, 0, 0, 0)
    if w1 == 0.0:
        return 0.0
    j, jt, mj, mjt = two_j / 2, two_jt / 2, two_mj / 2, two_mjt / 2
    w2 = wigner3j(j, lp, jt, -mj, mp, mjt)
    if w2 == 0.0:
        return 0.0
    w6 = wigner6j(l, j, 0.5, jt, lt, lp)
    if w6 == 0.0:
        return 0.0
    # phase (-1)^(2l + 1/2 + l' + j + j~ - m_j) is real: the exponent is an integer
    expo = 2 * l + lp + round(0.5 + j + jt - mj)
    phase = -1.0 if expo % 2 else 1.0
    pre = math.sqrt((2 * l + 1) * (2 * lt + 1) * (two_j + 1) * (two_jt + 1))
    return phase * pre * w1 * w2 * w6
