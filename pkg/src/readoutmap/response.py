"""Classical resonator response to the drive, with analytic derivatives.

The mean-field amplitude eta(t) of the damped, driven resonator obeys (in the
package units, time in ns, rates in cyclic MHz)

    d(eta)/dt = -(2*pi*i*delta_cd + pi*kappa_c) * 1e-3 * eta
                - i*pi*1e-3 * omega_c(t)

with eta(0) = 0. A fixed-step RK4 on a uniform grid is used so that downstream
correlation integrals stay grid-aligned; derivatives are obtained from the ODE
itself (differentiating it once and twice) rather than from the samples, which
keeps the adiabatic derivative expansion noise-free.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .model import RAD_PER_MHZ_NS, PulseSpec, SystemParams, envelope_derivatives, sg_envelope


@dataclass(frozen=True)
class ResonatorTrajectory:
    """Uniformly sampled complex resonator amplitude and its derivatives.

    times in ns; eta dimensionless; eta_d1/2/3 in 1/ns^k. photon = |eta|^2.
    """

    times: np.ndarray
    eta: np.ndarray
    eta_d1: np.ndarray
    eta_d2: np.ndarray
    eta_d3: np.ndarray
    pulse: PulseSpec

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    @property
    def photon(self) -> np.ndarray:
        return np.abs(self.eta) ** 2


def steady_state(params: SystemParams, omega_c: float) -> tuple[complex, float]:
    """Steady-state amplitude and photon number under a constant drive.

    eta_ss = -(i/2) omega_c / (i delta_cd + kappa_c/2)
    n_c    = (omega_c/2)^2 / (delta_cd^2 + (kappa_c/2)^2)
    """
    denom = 1j * params.delta_cd + params.kappa_c / 2.0
    if denom == 0:
        raise ValueError("degenerate resonator: delta_cd = kappa_c = 0 has no steady state")
    eta_ss = -0.5j * omega_c / denom
    n_c = (omega_c / 2.0) ** 2 / (params.delta_cd**2 + (params.kappa_c / 2.0) ** 2)
    return eta_ss, n_c


def _decay_rate_per_ns(params: SystemParams) -> complex:
    return (2.0j * np.pi * params.delta_cd + np.pi * params.kappa_c) * 1.0e-3


def max_stable_dt(params: SystemParams, pulse: PulseSpec) -> float:
    """Largest allowed RK4 step: 0.05 rad of the fastest rate per step."""
    fastest = max(abs(params.delta_cd), params.kappa_c, abs(pulse.omega_c))
    if fastest == 0.0:
        return np.inf
    return 0.05 / (RAD_PER_MHZ_NS * fastest)


def solve_eta(params: SystemParams, pulse: PulseSpec, t_end: float, dt: float) -> ResonatorTrajectory:
    """Integrate the resonator response on [0, t_end] ns with step dt.

    Raises ValueError when dt violates the stability/accuracy bound.
    """
    dt_max = max_stable_dt(params, pulse)
    if dt > dt_max:
        raise ValueError(f"step size {dt} ns exceeds stability bound {dt_max:.4g} ns")

    beta = _decay_rate_per_ns(params)
    drive = -1.0j * np.pi * 1.0e-3 * pulse.omega_c

    n_steps = int(round(t_end / dt))
    times = np.arange(n_steps + 1) * dt
    eta = np.empty(n_steps + 1, dtype=complex)
    eta[0] = 0.0

    # envelope evaluated once on the half-step grid; the loop is then pure
    # complex arithmetic
    half_grid = np.arange(2 * n_steps + 1) * (dt / 2.0)
    dr = (drive * sg_envelope(half_grid, pulse)).tolist()

    z = 0.0 + 0.0j
    half = dt / 2.0
    sixth = dt / 6.0
    for k in range(n_steps):
        k1 = -beta * z + dr[2 * k]
        k2 = -beta * (z + half * k1) + dr[2 * k + 1]
        k3 = -beta * (z + half * k2) + dr[2 * k + 1]
        k4 = -beta * (z + dt * k3) + dr[2 * k + 2]
        z = z + sixth * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        eta[k + 1] = z

    env = sg_envelope(times, pulse)
    env_d1 = envelope_derivatives(times, pulse, 1)
    env_d2 = envelope_derivatives(times, pulse, 2)
    eta_d1 = -beta * eta + drive * env
    eta_d2 = -beta * eta_d1 + drive * env_d1
    eta_d3 = -beta * eta_d2 + drive * env_d2
    return ResonatorTrajectory(times=times, eta=eta, eta_d1=eta_d1, eta_d2=eta_d2,
                               eta_d3=eta_d3, pulse=pulse)


def write_trajectory_csv(path, traj: ResonatorTrajectory, header: bool = True) -> None:
    """Columns: t_ns, re_eta, im_eta, photon_number."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        if header:
            w.writerow(["t_ns", "re_eta", "im_eta", "photon_number"])
        for t, z in zip(traj.times, traj.eta):
            w.writerow([f"{t:.12g}", f"{z.real:.12g}", f"{z.imag:.12g}", f"{abs(z) ** 2:.12g}"])
