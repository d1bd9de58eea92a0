"""Closed-form effective dispersive map under adiabatic resonator response.

All quantities are per qubit-coherence |n_al><n_ar| and diagonal in the qubit
number basis, so this module is scalar algebra over the level labels: complex
spectrum entries E_{n_al,n_ar}, the Stark shift / dephasing pair for the
|1><0| coherence, the equivalent Lindblad form (number-diagonal Hamiltonian
and collapse operator), channel application, and a Choi positivity check.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .model import SystemParams, detuning_l, detuning_r


@dataclass(frozen=True)
class EffectiveSpectrumEntry:
    """Complex generator eigenvalue for the coherence |n_al><n_ar| (MHz)."""

    n_al: int
    n_ar: int
    value: complex


@dataclass(frozen=True)
class RatePair:
    """Stark shift and measurement-induced dephasing for |1><0| (MHz)."""

    stark: float
    dephasing: float

    def __post_init__(self):
        if self.dephasing < 0:
            raise ValueError("dephasing rate must be >= 0")


@dataclass(frozen=True)
class EffectiveLindblad:
    """Number-diagonal effective Hamiltonian and collapse-operator values."""

    h_values: np.ndarray  # real, per level
    c_values: np.ndarray  # complex, per level; c_values[0] == 0


def adiabatic_correlations(params: SystemParams, n_al: int, n_ar: int,
                           photon: float) -> tuple[complex, complex, complex, complex]:
    """Leading adiabatic values of the drive correlation functions.

    A_ll = photon / dl(n_al), A_rr = photon / dr(n_ar),
    B_lr = C_lr = (3/2) photon / (dl(n_al) dr(n_ar)).
    """
    if photon < 0:
        raise ValueError("photon number must be >= 0")
    dl = detuning_l(params, n_al)
    dr = detuning_r(params, n_ar)
    if dl == 0 or dr == 0:
        raise ValueError("vanishing dressed detuning: correlation functions are singular")
    a_ll = photon / dl
    a_rr = photon / dr
    b_lr = 1.5 * photon / (dl * dr)
    return a_ll, a_rr, b_lr, b_lr


def effective_spectrum(params: SystemParams, n_al: int, n_ar: int,
                       photon: float) -> EffectiveSpectrumEntry:
    """Closed-form complex eigenvalue E_{n_al,n_ar} at the given photon number.

    The real part carries the level-difference factor and the imaginary part
    its square, so E_{n,n} = 0 and E_{m,n} = -conj(E_{n,m}) hold exactly in
    floating point.
    """
    if photon < 0:
        raise ValueError("photon number must be >= 0")
    d, chi, k = params.delta_cd, params.chi_ac, params.kappa_c
    half_k_sq = (k / 2.0) ** 2
    dl = d + 2.0 * chi * n_al
    dr = d + 2.0 * chi * n_ar
    den = (dl**2 + half_k_sq) * (dr**2 + half_k_sq)
    base = d**2 + half_k_sq
    diff = float(n_al - n_ar)
    re = 2.0 * chi * base * (dl * dr + half_k_sq) * diff * photon / den
    im = -2.0 * chi**2 * k * base * diff**2 * photon / den
    return EffectiveSpectrumEntry(n_al=n_al, n_ar=n_ar, value=complex(re, im))


def spectrum_matrix(params: SystemParams, levels: int, photon: float) -> np.ndarray:
    """E_{m,n} over levels 0..levels-1 as a complex matrix."""
    return np.array([[effective_spectrum(params, m, n, photon).value
                      for n in range(levels)] for m in range(levels)])


def generator_eigenvalue(params: SystemParams, n_al: int, n_ar: int, photon: float) -> complex:
    """Same eigenvalue assembled term by term from the effective generator:
    first-order shift, level-dressed second-order terms, and the cross term.
    Used as an internal cross-check of the closed forms."""
    chi, k = params.chi_ac, params.kappa_c
    dl = detuning_l(params, n_al)
    dr = detuning_r(params, n_ar)
    return (2.0 * chi * photon * (n_al - n_ar)
            - 4.0 * chi**2 * photon * (n_al**2 / dl - n_ar**2 / dr)
            + 4.0j * chi**2 * k * photon * n_al * n_ar / (dl * dr))


def rates(params: SystemParams, photon: float) -> RatePair:
    """Stark shift and dephasing of the |1><0| coherence at the given photon
    number: the real and negative imaginary parts of E_{1,0}.

    The dephasing equals -(1/2) (kappa_c/(delta_cd+2 chi_ac)) times the
    second-order Stark contribution; see stark_orders.
    """
    entry = effective_spectrum(params, 1, 0, photon)
    return RatePair(stark=entry.value.real, dephasing=-entry.value.imag)


def stark_orders(params: SystemParams, photon: float) -> tuple[float, float]:
    """First- and second-order Stark contributions (their sum is rates().stark)."""
    d, chi, k = params.delta_cd, params.chi_ac, params.kappa_c
    first = 2.0 * chi * photon
    second = -4.0 * chi**2 * (d + 2.0 * chi) * photon / ((d + 2.0 * chi) ** 2 + (k / 2.0) ** 2)
    return first, second


def gambetta_rates(params: SystemParams, omega_c: float) -> float:
    """Two-level-model dephasing rate built from both pointer photon numbers:

    gamma = chi^2 kappa (n_+ + n_-) / (delta_cd^2 + chi^2 + kappa^2/4),
    n_pm = (omega_c/2)^2 / ((delta_cd +- chi)^2 + (kappa/2)^2).

    Evaluating it at delta_cd + chi_ac reproduces rates() at delta_cd exactly
    (the two conventions differ by a chi offset of the resonator frequency).
    """
    if params.kappa_c <= 0:
        raise ValueError("gambetta_rates requires kappa_c > 0")
    d, chi, k = params.delta_cd, params.chi_ac, params.kappa_c
    n_plus = (omega_c / 2.0) ** 2 / ((d + chi) ** 2 + (k / 2.0) ** 2)
    n_minus = (omega_c / 2.0) ** 2 / ((d - chi) ** 2 + (k / 2.0) ** 2)
    return chi**2 * k * (n_plus + n_minus) / (d**2 + chi**2 + k**2 / 4.0)


def effective_lindblad(params: SystemParams, photon: float) -> EffectiveLindblad:
    """Number-diagonal Lindblad form of the adiabatic map.

    h(n) = 2 chi n photon - 4 chi^2 photon (d + 2 chi n) n^2 / ((d+2chi n)^2 + (k/2)^2)
    c(n) = sqrt(4 chi^2 kappa photon) * n / (d - i k/2 + 2 chi n)

    |c(1)|^2 / 2 reproduces the dephasing rate of rates().
    """
    if photon < 0:
        raise ValueError("photon number must be >= 0")
    d, chi, k = params.delta_cd, params.chi_ac, params.kappa_c
    n = np.arange(params.n_a, dtype=float)
    dn = d + 2.0 * chi * n
    h = 2.0 * chi * photon * n - 4.0 * chi**2 * photon * dn * n**2 / (dn**2 + (k / 2.0) ** 2)
    c = math.sqrt(4.0 * chi**2 * k * photon) * n / (dn - 0.5j * k)
    return EffectiveLindblad(h_values=h, c_values=c)


def effective_map_apply(rho0: np.ndarray, params: SystemParams, photon_series,
                        t_grid) -> np.ndarray:
    """Apply the element-wise effective map along a photon-number history.

    rho_mn(t) = rho_mn(0) * exp(-2 pi i * R_mn * Integral_0^t photon dt'),
    with R_mn the per-photon spectrum entry and the integral by the trapezoid
    rule on t_grid (ns). Returns rho at every grid time, shape (nt, d, d).
    Diagonal entries are conserved identically (R_nn = 0).
    """
    rho0 = np.asarray(rho0, dtype=complex)
    d = rho0.shape[0]
    if rho0.shape != (d, d):
        raise ValueError("rho0 must be square")
    if np.max(np.abs(rho0 - rho0.conj().T)) > 1e-10 * max(1.0, np.max(np.abs(rho0))):
        raise ValueError("rho0 must be Hermitian")
    t = np.asarray(t_grid, dtype=float)
    phot = np.asarray(photon_series, dtype=float)
    if t.shape != phot.shape:
        raise ValueError("photon_series and t_grid must share a grid")
    rate = spectrum_matrix(params, d, 1.0)  # per-photon entries
    # cumulative trapezoid of the photon number, converted ns -> us
    integ = np.concatenate(([0.0], np.cumsum(0.5 * (phot[1:] + phot[:-1]) * np.diff(t)))) * 1e-3
    phases = np.exp(-2j * np.pi * rate[None, :, :] * integ[:, None, None])
    return rho0[None, :, :] * phases


def dephasing_choi(spectrum: np.ndarray, t_us: float) -> np.ndarray:
    """Choi matrix of the element-wise map rho_mn -> exp(-2 pi i E_mn t) rho_mn."""
    d = spectrum.shape[0]
    phi = np.exp(-2j * np.pi * spectrum * t_us)
    choi = np.zeros((d * d, d * d), dtype=complex)
    for m in range(d):
        for n in range(d):
            choi[m * d + m, n * d + n] = phi[m, n]
    return choi


def choi_cptp_check(params: SystemParams, photon: float, t_us: float,
                    levels: int | None = None) -> float:
    """Minimum eigenvalue of the effective map's Choi matrix (>= 0 up to
    roundoff for a physical channel)."""
    if t_us < 0:
        raise ValueError("time must be >= 0")
    d = params.n_a if levels is None else levels
    choi = dephasing_choi(spectrum_matrix(params, d, photon), t_us)
    return float(np.linalg.eigvalsh(choi).min())


def write_rates_sweep_csv(path, rows, header: bool = True) -> None:
    """Columns: delta_cd_mhz, gamma_phi_mhz, stark_mhz, n_ground, n_excited."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        if header:
            w.writerow(["delta_cd_mhz", "gamma_phi_mhz", "stark_mhz", "n_ground", "n_excited"])
        for row in rows:
            w.writerow([f"{x:.12g}" for x in row])


def write_spectrum_grid_csv(path, params: SystemParams, levels: int, photon: float,
                            header: bool = True) -> None:
    """Columns: n_al, n_ar, re_E, im_E over the level grid."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        if header:
            w.writerow(["n_al", "n_ar", "re_E", "im_E"])
        for m in range(levels):
            for n in range(levels):
                e = effective_spectrum(params, m, n, photon).value
                # + 0.0 folds signed zeros on the diagonal
                w.writerow([m, n, f"{e.real + 0.0:.12g}", f"{e.imag + 0.0:.12g}"])
