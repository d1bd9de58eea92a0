"""Exact spectrum of the doubled-space generator and drive sweeps.

For a constant drive the generator is time independent and its full complex
spectrum is computed densely (LAPACK: balancing, Hessenberg reduction, shifted
QR). The |1><0| qubit-coherence eigenvalue is followed across a drive sweep by
eigenvector-overlap continuation; its real part renormalizes the qubit
frequency (Stark shift) and its negative imaginary part is the
measurement-induced dephasing rate.
"""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .liouville import AccuracyError, ExtendedOperator, basis_index, build_extended_hamiltonian
from .model import SystemParams
from .response import steady_state


class TrackingLostError(RuntimeError):
    """Eigenvector continuation lost the branch (grid too coarse)."""


@dataclass(frozen=True)
class EigenSet:
    """Full spectrum of a general complex matrix with per-pair residuals."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns, unit 2-norm
    residuals: np.ndarray


@dataclass(frozen=True)
class CoherenceTrack:
    """|1><0| coherence eigenvalue followed over a drive-amplitude grid."""

    omega_c: np.ndarray
    eigenvalues: np.ndarray
    overlaps: np.ndarray
    photons: np.ndarray
    vectors: list[np.ndarray]


def eigendecompose(op: ExtendedOperator | np.ndarray) -> EigenSet:
    """Dense non-Hermitian eigendecomposition with residual enforcement."""
    mat = op.data if isinstance(op, ExtendedOperator) else np.asarray(op, dtype=complex)
    if not np.all(np.isfinite(mat)):
        raise ValueError("matrix contains non-finite entries")
    w, v = sla.eig(mat)
    norms = np.linalg.norm(v, axis=0)
    v = v / norms
    residuals = np.linalg.norm(mat @ v - v * w, axis=0)
    scale = np.linalg.norm(mat)
    if scale > 0 and np.max(residuals) > 1e-8 * scale:
        raise AccuracyError(
            f"eigensolver residual {np.max(residuals):.3e} exceeds 1e-8*|M| = {1e-8 * scale:.3e}; "
            f"matrix norm {scale:.3e}, worst pair index {int(np.argmax(residuals))}")
    return EigenSet(eigenvalues=w, eigenvectors=v, residuals=residuals)


def coherence_seed(params: SystemParams) -> tuple[np.ndarray, complex]:
    """Exact zero-drive eigenpair for the |1_al, 0_cl, 0_ar, 0_cr> coherence."""
    dim = (params.n_a * params.n_c) ** 2
    v = np.zeros(dim, dtype=complex)
    v[basis_index(params, 1, 0, 0, 0)] = 1.0
    return v, complex(params.delta_ad)


def track_coherence(params: SystemParams, omega_c_grid, n_workers: int = 1) -> CoherenceTrack:
    """Follow the coherence eigenvalue along the drive grid by max overlap.

    The grid must start at omega_c = 0, where the eigenvector is the exact
    basis state. Each diagonalization is independent (parallel across the
    grid); the overlap selection is a sequential pass afterwards.
    """
    grid = np.asarray(omega_c_grid, dtype=float)
    if grid.size == 0 or grid[0] != 0.0:
        raise ValueError("omega_c grid must start at 0")

    def diag(omega):
        return eigendecompose(build_extended_hamiltonian(params, omega))

    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            eigsets = list(pool.map(diag, grid[1:]))
    else:
        eigsets = [diag(w) for w in grid[1:]]

    v_prev, e0 = coherence_seed(params)
    eigenvalues = [e0]
    overlaps = [1.0]
    vectors = [v_prev]
    for omega, es in zip(grid[1:], eigsets):
        ov = np.abs(v_prev.conj() @ es.eigenvectors)
        j = int(np.argmax(ov))
        if ov[j] <= 0.5:
            raise TrackingLostError(
                f"overlap {ov[j]:.3f} <= 0.5 at omega_c = {omega} MHz; refine the grid")
        v_prev = es.eigenvectors[:, j]
        eigenvalues.append(complex(es.eigenvalues[j]))
        overlaps.append(float(ov[j]))
        vectors.append(v_prev)

    photons = np.array([steady_state(params, w)[1] for w in grid])
    return CoherenceTrack(omega_c=grid, eigenvalues=np.asarray(eigenvalues),
                          overlaps=np.asarray(overlaps), photons=photons, vectors=vectors)


def extract_rates(track: CoherenceTrack, params: SystemParams) -> tuple[np.ndarray, np.ndarray]:
    """Per-point (stark, gamma_phi) in MHz from the tracked eigenvalue."""
    stark = track.eigenvalues.real - params.delta_ad
    gamma_phi = -track.eigenvalues.imag
    return stark, gamma_phi


def write_track_csv(path, track: CoherenceTrack, params: SystemParams, header: bool = True,
                    extra_cols: dict[str, np.ndarray] | None = None) -> None:
    """Columns: omega_c_mhz, n_c_photons, re_E_mhz, im_E_mhz, stark_mhz,
    gamma_phi_mhz, overlap (plus any extra columns appended in order)."""
    stark, gamma = extract_rates(track, params)
    names = ["omega_c_mhz", "n_c_photons", "re_E_mhz", "im_E_mhz",
             "stark_mhz", "gamma_phi_mhz", "overlap"]
    extra = extra_cols or {}
    names += list(extra)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        if header:
            w.writerow(names)
        for i in range(track.omega_c.size):
            row = [track.omega_c[i], track.photons[i], track.eigenvalues[i].real,
                   track.eigenvalues[i].imag, stark[i], gamma[i], track.overlaps[i]]
            row += [extra[name][i] for name in extra]
            w.writerow([f"{x + 0.0:.12g}" for x in row])  # + 0.0 folds signed zeros
