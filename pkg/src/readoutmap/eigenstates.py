"""Perturbative stationary eigenstates of the doubled-space generator.

At zeroth order each doubled eigenstate is a qubit Fock label on either copy
with both resonator copies in coherent states (eta on the ket copy, eta* on
the bra copy). Higher orders add qubit-conditioned resonator excitations:
displaced creation operators (c^+ - eta*) acting on the coherent background,
with closed-form coefficients built from the dressed detunings. Coherent
amplitudes are written analytically in the truncated Fock basis (never via
matrix exponentials) to avoid truncation-induced norm loss.

Validation is done at a steady-state snapshot under constant drive, where the
exact eigenvectors of the static generator are available densely.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .effective import effective_spectrum
from .liouville import build_extended_hamiltonian, destroy
from .model import SystemParams, detuning_l, detuning_r
from .response import steady_state
from .spectra import TrackingLostError, eigendecompose


@dataclass(frozen=True)
class PerturbativeEigenstate:
    """Unit-normalized doubled-space vector for labels (n_al, n_ar), orders 0..2."""

    n_al: int
    n_ar: int
    order: int
    eta: complex
    vector: np.ndarray = field(repr=False)
    dims: tuple[int, int] = (0, 0)


def coherent_amplitudes(eta: complex, n_c: int) -> np.ndarray:
    """Truncated coherent-state column: exp(-|eta|^2/2) eta^k / sqrt(k!)."""
    k = np.arange(n_c)
    log_fact = np.cumsum(np.concatenate(([0.0], np.log(np.arange(1, n_c, dtype=float)))))
    mag = np.exp(-abs(eta) ** 2 / 2.0 + k * np.log(abs(eta)) - 0.5 * log_fact) if eta != 0 \
        else np.concatenate(([1.0], np.zeros(n_c - 1)))
    phase = np.exp(1j * k * np.angle(eta)) if eta != 0 else np.ones(n_c)
    return mag * phase


def perturbative_eigenstate(labels: tuple[int, int], params: SystemParams,
                            eta: complex, order: int) -> PerturbativeEigenstate:
    """Build the order-0/1/2 eigenstate for qubit labels in {0, 1}^2.

    The (0,0) state is the pure coherent product at every order. For excited
    labels the first order applies -2 chi eta (c^+ - eta*)/dl (and the mirror
    on the bra copy), the second order its half-squared iteration, and (1,1)
    additionally the cross ket-bra excitation. Requires |eta|^2 < n_c/4 so the
    coherent tail is negligible at the truncation.
    """
    n_al, n_ar = labels
    if n_al not in (0, 1) or n_ar not in (0, 1):
        raise ValueError("perturbative eigenstates are built for labels in {0,1}")
    if order not in (0, 1, 2):
        raise ValueError(f"unsupported perturbative order {order}")
    n_a, n_c = params.n_a, params.n_c
    if abs(eta) ** 2 >= n_c / 4.0:
        raise ValueError(f"|eta|^2 = {abs(eta)**2:.3g} too large for n_c = {n_c}; "
                         "increase the resonator truncation")

    qubit_l = np.zeros(n_a, dtype=complex)
    qubit_l[n_al] = 1.0
    qubit_r = np.zeros(n_a, dtype=complex)
    qubit_r[n_ar] = 1.0
    res_l = coherent_amplitudes(eta, n_c)
    res_r = coherent_amplitudes(np.conj(eta), n_c)

    disp_l = destroy(n_c).conj().T - np.conj(eta) * np.eye(n_c)  # c^+ - eta*
    disp_r = destroy(n_c).conj().T - eta * np.eye(n_c)           # c^+ - eta

    def assemble(left, right):
        return np.kron(qubit_l, np.kron(left, np.kron(qubit_r, right)))

    vec = assemble(res_l, res_r)
    chi = params.chi_ac
    if n_al == 1 and order >= 1:
        dl = detuning_l(params, 1)
        vec = vec - (2.0 * chi * eta / dl) * assemble(disp_l @ res_l, res_r)
        if order >= 2:
            vec = vec + (2.0 * chi**2 * eta**2 / dl**2) * assemble(disp_l @ (disp_l @ res_l), res_r)
    if n_ar == 1 and order >= 1:
        dr = detuning_r(params, 1)
        vec = vec - (2.0 * chi * np.conj(eta) / dr) * assemble(res_l, disp_r @ res_r)
        if order >= 2:
            vec = vec + (2.0 * chi**2 * np.conj(eta) ** 2 / dr**2) \
                * assemble(res_l, disp_r @ (disp_r @ res_r))
    if n_al == 1 and n_ar == 1 and order >= 2:
        d, k = params.delta_cd, params.kappa_c
        cross = 4.0 * chi**2 * abs(eta) ** 2 / ((d + 2.0 * chi) ** 2 + (k / 2.0) ** 2)
        vec = vec + cross * assemble(disp_l @ res_l, disp_r @ res_r)

    vec = vec / np.linalg.norm(vec)
    return PerturbativeEigenstate(n_al=n_al, n_ar=n_ar, order=order, eta=complex(eta),
                                  vector=vec, dims=(n_a, n_c))


def exact_eigenvector(state: PerturbativeEigenstate, params: SystemParams,
                      omega_c: float) -> np.ndarray:
    """Exact eigenvector of the static generator matched to the ansatz.

    Selected by maximal overlap with the perturbative vector; in the validity
    regime the branch is isolated, so this is the same selection rule as
    overlap continuation from zero drive. Raises TrackingLostError when the
    best overlap drops to 0.5."""
    es = eigendecompose(build_extended_hamiltonian(params, omega_c))
    ov = np.abs(state.vector.conj() @ es.eigenvectors)
    j = int(np.argmax(ov))
    if ov[j] <= 0.5:
        raise TrackingLostError(
            f"overlap {ov[j]:.3f} <= 0.5 at omega_c = {omega_c} MHz; ansatz too far from exact")
    return es.eigenvectors[:, j]


def eigenstate_fidelity(state: PerturbativeEigenstate, params: SystemParams,
                        omega_c: float, exact: np.ndarray | None = None) -> float:
    """Infidelity 1 - |<pert|exact>|^2 against the exact static eigenvector.

    The state must have been built with the steady-state amplitude of
    omega_c. A precomputed exact vector can be passed to amortize the
    diagonalization over several orders."""
    eta_ss, _ = steady_state(params, omega_c)
    if abs(state.eta - eta_ss) > 1e-8 * (1.0 + abs(eta_ss)):
        raise ValueError(f"state was built with eta = {state.eta}, but omega_c = {omega_c} "
                         f"has steady-state amplitude {eta_ss}")
    if exact is None:
        exact = exact_eigenvector(state, params, omega_c)
    return float(1.0 - abs(np.vdot(state.vector, exact)) ** 2)


def residual_norm(state: PerturbativeEigenstate, params: SystemParams,
                  omega_c: float, hu: np.ndarray | None = None) -> float:
    """|Hu v - lambda v| / |v| with lambda the perturbative eigenvalue
    delta_ad (n_al - n_ar) + anharmonic offset + E_{n_al,n_ar}(photon)."""
    if hu is None:
        hu = build_extended_hamiltonian(params, omega_c).data
    _, photon = steady_state(params, omega_c)
    n_al, n_ar = state.n_al, state.n_ar
    lam = (params.delta_ad * (n_al - n_ar)
           + 0.5 * params.alpha_a * (n_al * (n_al - 1) - n_ar * (n_ar - 1))
           + effective_spectrum(params, n_al, n_ar, photon).value)
    v = state.vector
    return float(np.linalg.norm(hu @ v - lam * v) / np.linalg.norm(v))


def fidelity_sweep(params: SystemParams, omega_c_values, labels: tuple[int, int] = (1, 0),
                   orders=(0, 1, 2)) -> list[dict]:
    """Infidelity and residual for each order across drive amplitudes.

    Returns one record per (omega_c, order): keys omega_c_mhz, order,
    infidelity, residual_norm."""
    rows = []
    for omega in omega_c_values:
        eta_ss, _ = steady_state(params, omega)
        hu = build_extended_hamiltonian(params, omega).data
        states = [perturbative_eigenstate(labels, params, eta_ss, o) for o in orders]
        exact = exact_eigenvector(states[-1], params, omega)
        for state in states:
            rows.append({
                "omega_c_mhz": float(omega),
                "order": state.order,
                "infidelity": eigenstate_fidelity(state, params, omega, exact=exact),
                "residual_norm": residual_norm(state, params, omega, hu=hu),
            })
    return rows


def write_fidelity_csv(path, rows, header: bool = True) -> None:
    """Columns: omega_c_mhz, order, infidelity, residual_norm."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        if header:
            w.writerow(["omega_c_mhz", "order", "infidelity", "residual_norm"])
        for r in rows:
            w.writerow([f"{r['omega_c_mhz']:.12g}", r["order"],
                        f"{r['infidelity']:.12g}", f"{r['residual_norm']:.12g}"])
