"""Two-qubit entanglement: Wootters concurrence and negativity."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .momentum_overlaps import OverlapQuad
from .photon_state import TwoQubitDM, assemble_density_matrix, map_to_polarization, normalize

__all__ = [
    "EntanglementReport",
    "concurrence",
    "concurrence_x_state",
    "negativity",
    "partial_transpose",
    "wootters_spectrum",
    "entanglement_report",
]

INPUT_TOL = 1e-9

_YY = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]]))


def _matrix(dm):
    m = dm.entries if isinstance(dm, TwoQubitDM) else np.asarray(dm, dtype=complex)
    if m.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {m.shape}")
    if np.max(np.abs(m - m.conj().T)) > INPUT_TOL:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(m).real - 1) > INPUT_TOL:
        raise ValueError(f"density matrix is not normalized (trace {np.trace(m).real})")
    if np.linalg.eigvalsh(m).min() < -INPUT_TOL:
        raise ValueError("density matrix is not positive semidefinite")
    return m


def wootters_spectrum(dm):
    """Square roots of the eigenvalues of rho * flip(rho), descending.

    Computed as singular values of tau = Psi^T (sy x sy) Psi with
    rho = Psi Psi^dagger. tau is quadratic in Psi, so near-zero eigenvalues
    of rho do not lose half their digits to a square root.
    """
    m = _matrix(dm)
    w, v = np.linalg.eigh(m)
    psi = v * np.sqrt(np.clip(w, 0, None))
    tau = psi.T @ _YY @ psi
    return np.linalg.svd(tau, compute_uv=False)


def concurrence(dm):
    lam = wootters_spectrum(dm)
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def concurrence_x_state(q: OverlapQuad):
    """Closed-form concurrence of the normalized X-shaped matrix built from ``q``."""
    q.validate()
    outer = (q.L - q.M) * (q.Ltilde - q.Mtilde)
    direct = q.L * q.Ltilde
    exchange = q.M * q.Mtilde
    if outer + direct <= 0:
        raise ValueError("overlaps give a zero-trace state")
    return float(max(0.0, (exchange - outer) / (outer + direct)))


def partial_transpose(m, subsystem=1):
    """Partial transpose of a 4x4 matrix over qubit 0 or 1."""
    t = np.asarray(m).reshape(2, 2, 2, 2)
    if subsystem == 1:
        t = t.transpose(0, 3, 2, 1)
    elif subsystem == 0:
        t = t.transpose(2, 1, 0, 3)
    else:
        raise ValueError("subsystem must be 0 or 1")
    return t.reshape(4, 4)


def negativity(dm, subsystem=1):
    """Sum of |negative eigenvalues| of the partial transpose."""
    m = _matrix(dm)
    w = np.linalg.eigvalsh(partial_transpose(m, subsystem))
    return float(np.abs(w[w < 0]).sum())


@dataclass(frozen=True)
class EntanglementReport:
    concurrence: float
    concurrence_x_form: float
    negativity: float
    spectrum: tuple


def entanglement_report(q: OverlapQuad, rules=None) -> EntanglementReport:
    """Concurrence (both routes) and negativity of the photon state for ``q``."""
    spin = normalize(assemble_density_matrix(q))
    photon = map_to_polarization(spin) if rules is None else map_to_polarization(spin, rules)
    return EntanglementReport(
        concurrence=concurrence(photon),
        concurrence_x_form=concurrence_x_state(q),
        negativity=negativity(photon),
        spectrum=tuple(float(x) for x in wootters_spectrum(photon)),
    )
