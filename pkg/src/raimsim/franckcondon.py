"""Wavefunction overlap integrals between phonon Fock states of different
electronic configurations, S = <o_a, N| exp(i k zeta_l) |o_b, N'>.

Each configuration's phonon wavefunction is a product of harmonic
oscillator modes about that configuration's own equilibrium; the two mode
frames differ, so the integral is done over the shared mass-weighted
coordinates with a 4-D tensor Gauss-Hermite rule. The combined Gaussian of
bra and ket is diagonalized exactly and absorbed into the quadrature
weight, leaving polynomials times the photon-recoil plane wave, for which
Gauss-Hermite converges at modest order.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConfigurationError, NumericalAccuracyError
from .modes import CONFIGS, ModeSpectrum, SystemGeometry, normal_modes
from .units import UNITS

# effective wavenumber of the Rydberg excitation light, 1/a0
# (297 nm equivalent for the Rb nP excitation; configurable everywhere)
DEFAULT_K_AU = 2.0 * math.pi / UNITS.nm_to_bohr(297.0)

# (lower config, upper config, kicked atom) driven by the two laser tones
TABLE_PAIRS = (("gg", "gR", 2), ("gg", "Rg", 1), ("gR", "RR", 1), ("Rg", "RR", 2))


@dataclass(frozen=True)
class FockLabel:
    """Occupations (n1..n4) of the four modes, descending-frequency order."""

    n: tuple

    def __post_init__(self):
        if len(self.n) != 4 or any(v < 0 for v in self.n):
            raise ConfigurationError(f"invalid Fock label {self.n}")

    def __iter__(self):
        return iter(self.n)

    def __str__(self):
        return "".join(str(v) for v in self.n)


@dataclass(frozen=True)
class FockCutoff:
    """Per-mode truncation: the two high modes carry at most `high_max`
    quanta each, the two low (bus) modes at most `bus_total` together."""

    high_max: int = 1
    bus_total: int = 3

    def labels(self) -> tuple:
        out = []
        for n1, n2 in itertools.product(range(self.high_max + 1), repeat=2):
            for n3 in range(self.bus_total + 1):
                for n4 in range(self.bus_total + 1 - n3):
                    out.append(FockLabel((n1, n2, n3, n4)))
        return tuple(out)

    @property
    def max_order(self) -> int:
        return max(self.high_max, self.bus_total)


def mode_wavefunction(spectrum: ModeSpectrum, label, displacements) -> float:
    """Amplitude of Fock state `label` at mass-weighted displacements r''
    (about the spectrum's own equilibrium)."""
    n = tuple(label)
    r = np.asarray(displacements, dtype=float)
    q = spectrum.vectors @ r
    out = 1.0
    for k in range(4):
        w = spectrum.freqs_au[k]
        if w <= 0:
            raise ConfigurationError("zero-frequency mode has no normalizable state")
        x = math.sqrt(w) * q[k]
        herm = _hermite_values(n[k], np.array([x]))[n[k], 0]
        out *= ((w / math.pi) ** 0.25
                / math.sqrt(2.0 ** n[k] * math.factorial(n[k]))
                * math.exp(-0.5 * x * x) * herm)
    return out


def _hermite_values(n_max: int, x: np.ndarray) -> np.ndarray:
    """Physicists' Hermite polynomials H_0..H_nmax on x; shape (n_max+1, len(x))."""
    H = np.empty((n_max + 1, len(x)))
    H[0] = 1.0
    if n_max >= 1:
        H[1] = 2.0 * x
    for k in range(2, n_max + 1):
        H[k] = 2.0 * x * H[k - 1] - 2.0 * (k - 1) * H[k - 2]
    return H


class _PairQuadrature:
    """Shared geometry of the bra/ket Gaussians for one configuration pair."""

    def __init__(self, spec_a: ModeSpectrum, spec_b: ModeSpectrum):
        if spec_a.geometry is not spec_b.geometry and \
           spec_a.geometry != spec_b.geometry:
            raise ConfigurationError("spectra come from different geometries")
        self.spec_a = spec_a
        self.spec_b = spec_b
        self.omega_a = _precision(spec_a)
        self.omega_b = _precision(spec_b)
        self.e_a = spec_a.mass_weighted_equilibrium
        self.e_b = spec_b.mass_weighted_equilibrium
        P = self.omega_a + self.omega_b
        lam, U = np.linalg.eigh(P)
        self.T = math.sqrt(2.0) * U / np.sqrt(lam)
        self.det_T = 4.0 / math.sqrt(float(np.prod(lam)))
        self.center = U @ ((U.T @ (self.omega_a @ self.e_a
                                   + self.omega_b @ self.e_b)) / lam)
        self.gamma = 0.5 * float(self.e_a @ self.omega_a @ self.e_a
                                 + self.e_b @ self.omega_b @ self.e_b
                                 - self.center @ P @ self.center)


def _precision(spec: ModeSpectrum) -> np.ndarray:
    if np.any(spec.freqs_au <= 0):
        raise ConfigurationError(
            f"{spec.config} has a zero-frequency mode; overlaps are undefined")
    return spec.vectors.T @ np.diag(spec.freqs_au) @ spec.vectors


def _norms(spec: ModeSpectrum, labels) -> np.ndarray:
    w = spec.freqs_au
    base = float(np.prod((w / math.pi) ** 0.25))
    out = np.empty(len(labels))
    for i, lab in enumerate(labels):
        out[i] = base / math.sqrt(np.prod(
            [2.0 ** n * math.factorial(n) for n in lab]))
    return out


def _overlap_matrix(pq: _PairQuadrature, labels_a, labels_b, kicked_atom: int,
                    k_au: float, order: int) -> np.ndarray:
    """All <a, N| e^{ik zeta_l} |b, N'> on a tensor Gauss-Hermite grid."""
    nodes, weights = np.polynomial.hermite.hermgauss(order)
    na_max = max(max(lab) for lab in labels_a)
    nb_max = max(max(lab) for lab in labels_b)
    idx_zeta = 1 + kicked_atom  # (z1, z2, zeta1, zeta2)
    k_mw = k_au / math.sqrt(pq.spec_a.geometry.m_a)

    arr_a = np.array([list(lab) for lab in labels_a])
    arr_b = np.array([list(lab) for lab in labels_b])
    norm_a = _norms(pq.spec_a, labels_a)
    norm_b = _norms(pq.spec_b, labels_b)

    S = np.zeros((len(labels_a), len(labels_b)), dtype=complex)
    w3 = (weights[:, None, None] * weights[None, :, None]
          * weights[None, None, :]).ravel()
    q_tail = np.array(np.meshgrid(nodes, nodes, nodes,
                                  indexing="ij")).reshape(3, -1)
    q = np.empty((4, q_tail.shape[1]))
    q[1:] = q_tail
    for i0 in range(order):
        q[0] = nodes[i0]
        x = pq.center[:, None] + pq.T @ q
        qa = pq.spec_a.vectors @ (x - pq.e_a[:, None])
        qb = pq.spec_b.vectors @ (x - pq.e_b[:, None])
        A = _label_values(qa, pq.spec_a.freqs_au, arr_a, na_max) * norm_a[:, None]
        B = _label_values(qb, pq.spec_b.freqs_au, arr_b, nb_max) * norm_b[:, None]
        phase = np.exp(1j * k_mw * x[idx_zeta])
        S += A @ ((weights[i0] * w3 * phase) * B).T
    return pq.det_T * math.exp(-pq.gamma) * S


def _label_values(q_modes: np.ndarray, freqs: np.ndarray, label_arr: np.ndarray,
                  n_max: int) -> np.ndarray:
    """Product of per-mode Hermite polynomials for every label (labels, pts)."""
    n_pts = q_modes.shape[1]
    stacks = []
    for k in range(4):
        xk = math.sqrt(freqs[k]) * q_modes[k]
        stacks.append(_hermite_values(n_max, xk))
    out = np.ones((label_arr.shape[0], n_pts))
    for k in range(4):
        out *= stacks[k][label_arr[:, k]]
    return out


def overlap(spec_a: ModeSpectrum, spec_b: ModeSpectrum, N, N_prime,
            kicked_atom: int, k_au: float = DEFAULT_K_AU, *,
            order: int = 40, check: bool = True) -> complex:
    """Single overlap <a, N| e^{ik zeta_l} |b, N'>.

    With check=True the value is re-evaluated at order+8 and the two must
    agree to 1e-6.
    """
    la = (FockLabel(tuple(N)),)
    lb = (FockLabel(tuple(N_prime)),)
    pq = _PairQuadrature(spec_a, spec_b)
    val = _overlap_matrix(pq, la, lb, kicked_atom, k_au, order)[0, 0]
    if check:
        ref = _overlap_matrix(pq, la, lb, kicked_atom, k_au, order + 8)[0, 0]
        if abs(val - ref) > 1e-6:
            raise NumericalAccuracyError(
                f"overlap quadrature not converged: {val} vs {ref} "
                f"at orders {order}/{order + 8}")
    return complex(val)


@dataclass(frozen=True)
class OverlapTable:
    """Dense table S[N][N'] for one configuration pair and kicked atom."""

    source: str
    target: str
    kicked_atom: int
    k_au: float
    labels: tuple          # shared label list (same cutoff both sides)
    S: np.ndarray          # (n_labels, n_labels) complex

    def value(self, N, N_prime) -> complex:
        i = self.labels.index(FockLabel(tuple(N)))
        j = self.labels.index(FockLabel(tuple(N_prime)))
        return complex(self.S[i, j])


def build_overlap_tables(geometry: SystemGeometry, k_au: float = DEFAULT_K_AU,
                         cutoff: FockCutoff = FockCutoff(), *,
                         order: int = 40, check: bool = True,
                         spectra: dict | None = None) -> dict:
    """Tables for the four driven pairs (gg-gR), (gg-Rg), (gR-RR), (Rg-RR).

    gg-RR is deliberately absent: the drive operators only connect
    configurations differing by a single Rydberg excitation. With
    check=True each table is re-evaluated at order+8 and every entry must
    be stable to 1e-6 (raises NumericalAccuracyError otherwise).
    """
    if cutoff.bus_total < 1:
        raise ConfigurationError("cutoff must admit at least one phonon")
    if spectra is None:
        spectra = {o: normal_modes(geometry, o) for o in CONFIGS}
    labels = cutoff.labels()
    tables = {}
    for src, tgt, l in TABLE_PAIRS:
        pq = _PairQuadrature(spectra[src], spectra[tgt])
        S = _overlap_matrix(pq, labels, labels, l, k_au, order)
        if check:
            S2 = _overlap_matrix(pq, labels, labels, l, k_au, order + 8)
            dev = np.abs(S - S2).max()
            if dev > 1e-6:
                raise NumericalAccuracyError(
                    f"{src}-{tgt} table not converged: max entry change "
                    f"{dev:.2e} between orders {order} and {order + 8}")
        tables[(src, tgt)] = OverlapTable(source=src, target=tgt,
                                          kicked_atom=l, k_au=k_au,
                                          labels=labels, S=S)
    return tables
