"""Hartree atomic units and conversions to laboratory units.

All internal computation uses atomic units (hbar = e = m_e = 4*pi*eps0 = 1).
Laboratory-facing quantities are nm/um for lengths, GHz/MHz for frequencies,
amu for masses and us for times; conversion happens only at module borders.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# CODATA 2018
HARTREE_J = 4.3597447222071e-18      # Hartree energy, J
BOHR_M = 5.29177210903e-11           # Bohr radius, m
HBAR_SI = 1.054571817e-34            # J s
ATOMIC_TIME_S = 2.4188843265857e-17  # hbar / E_H, s
AMU_TO_ME = 1822.888486209           # atomic mass unit in electron masses

# E_H / h in GHz; as an angular frequency E_H/hbar = 2*pi * HARTREE_GHZ 1e9 rad/s
HARTREE_GHZ = HARTREE_J / (2.0 * math.pi * HBAR_SI) * 1e-9
HARTREE_MHZ = HARTREE_GHZ * 1e3

BOHR_NM = BOHR_M * 1e9
BOHR_UM = BOHR_M * 1e6


@dataclass(frozen=True)
class UnitSystem:
    """Conversion factors between atomic units and lab units."""

    hartree_ghz: float = HARTREE_GHZ
    bohr_nm: float = BOHR_NM
    atomic_time_s: float = ATOMIC_TIME_S
    amu_to_me: float = AMU_TO_ME

    # ---- energy / frequency -------------------------------------------------
    def energy_to_ghz(self, e_au: float) -> float:
        """Energy (Hartree) to equivalent photon frequency in GHz."""
        return e_au * self.hartree_ghz

    def energy_to_mhz(self, e_au) -> float:
        return e_au * self.hartree_ghz * 1e3

    def ghz_to_energy(self, nu_ghz: float) -> float:
        return nu_ghz / self.hartree_ghz

    def mhz_to_energy(self, nu_mhz: float) -> float:
        return nu_mhz * 1e-3 / self.hartree_ghz

    # ---- angular frequency --------------------------------------------------
    # "2pi x MHz" quantities: omega = 2*pi*nu. In atomic units energy and
    # angular frequency coincide (hbar = 1).
    def omega_au_from_mhz(self, nu_mhz: float) -> float:
        """Angular frequency 2*pi*nu (nu in MHz) expressed in atomic units."""
        return 2.0 * math.pi * nu_mhz * 1e6 * self.atomic_time_s

    def omega_au_to_mhz(self, omega_au) -> float:
        """Atomic-unit angular frequency to nu in MHz (omega = 2*pi*nu)."""
        return omega_au / (2.0 * math.pi * 1e6 * self.atomic_time_s)

    def rad_per_s_to_au(self, omega_si: float) -> float:
        return omega_si * self.atomic_time_s

    # ---- length -------------------------------------------------------------
    def bohr_to_nm(self, r_au) -> float:
        return r_au * self.bohr_nm

    def nm_to_bohr(self, r_nm) -> float:
        return r_nm / self.bohr_nm

    def um_to_bohr(self, r_um) -> float:
        return r_um * 1e3 / self.bohr_nm

    def bohr_to_um(self, r_au) -> float:
        return r_au * self.bohr_nm * 1e-3

    # ---- mass ---------------------------------------------------------------
    def amu_to_au(self, m_amu: float) -> float:
        return m_amu * self.amu_to_me

    # ---- time ---------------------------------------------------------------
    def us_to_au(self, t_us) -> float:
        return t_us * 1e-6 / self.atomic_time_s

    def au_to_us(self, t_au) -> float:
        return t_au * self.atomic_time_s * 1e6


UNITS = UnitSystem()

# convenience masses (amu)
MASS_RB87_AMU = 86.909
MASS_BE9_AMU = 9.012
