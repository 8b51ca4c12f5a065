"""Squared speed of evolution under a fixed Hamiltonian.

The Euclidean squared speed is the squared rate of change of the generalized
Bloch vector.  For unitary dynamics it has three equivalent forms, all
implemented here so they can be checked against each other:

* Bohr-frequency sum   ``sum_ij |rho_ij|^2 omega_ij^2``   (:func:`squared_speed`)
* commutator norm      ``||[H, rho]||_HS^2``               (:func:`squared_speed_commutator`)
* Bloch finite differences                                  (:func:`squared_speed_bloch`)
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch
from .linalg import (
    OrthonormalBasis,
    as_array,
    as_hamiltonian,
    bloch_vector,
    check_dims,
    gell_mann_basis,
    matrix_sqrt_psd,
    purity,
    x_state_sqrt,
)


@dataclass(frozen=True)
class SpeedReport:
    euclid_sq: float
    euclid_sq_commutator: float
    euclid_sq_bloch: float
    wy_sq: float
    variance_bound: float
    purity: float


@dataclass(frozen=True)
class LindbladSet:
    """Jump operators ``L_k`` of a Lindblad dissipator."""

    operators: tuple = field(default_factory=tuple)

    def __post_init__(self):
        ops = tuple(np.array(L, dtype=complex) for L in self.operators)
        shapes = {L.shape for L in ops}
        if len(shapes) > 1:
            raise DimensionMismatch(f"Lindblad operators disagree in shape: {shapes}")
        object.__setattr__(self, "operators", ops)

    def __len__(self):
        return len(self.operators)


def _prep(H, rho):
    H = as_hamiltonian(H)
    rho = as_array(rho)
    check_dims(H, rho)
    return H, rho


def squared_speed(H, rho) -> float:
    """``sum_ij |rho_ij|^2 omega_ij^2`` with ``rho`` in the eigenbasis of ``H``."""
    H, rho = _prep(H, rho)
    return float(np.sum(np.abs(rho) ** 2 * H.omega_sq))


def squared_speed_commutator(H, rho) -> float:
    """Hilbert-Schmidt norm squared of ``[H, rho]``."""
    H, rho = _prep(H, rho)
    Hm = H.matrix
    c = Hm @ rho - rho @ Hm
    return float(np.sum(np.abs(c) ** 2))


def evolve(H, rho, t: float) -> np.ndarray:
    """``exp(-iHt) rho exp(iHt)`` for diagonal ``H``."""
    H, rho = _prep(H, rho)
    ph = np.exp(-1j * H.energies * t)
    return ph[:, None] * rho * ph.conj()[None, :]


def squared_speed_bloch(H, rho, basis: OrthonormalBasis | None = None,
                        dt: float | None = None) -> float:
    """Squared Bloch-vector velocity by central finite differences.

    This is a validation path; its error is ``O(dt^2 omega_max^2)`` relative.
    The default step is ``1e-5 / omega_max``.
    """
    H, rho = _prep(H, rho)
    basis = gell_mann_basis(H.dim) if basis is None else basis
    if basis.dim != H.dim:
        raise DimensionMismatch("basis and Hamiltonian dimensions differ")
    wmax = H.max_gap
    if wmax == 0:
        return 0.0
    if dt is None:
        dt = 1e-5 / wmax
    if dt <= 0:
        raise ValueError("dt must be positive")
    rdot = (bloch_vector(evolve(H, rho, dt), basis)
            - bloch_vector(evolve(H, rho, -dt), basis)) / (2 * dt)
    return float(rdot @ rdot)


def energy_variance(H, rho) -> float:
    """``(Delta H)^2 = sum_{i<j} rho_ii rho_jj omega_ij^2``."""
    H, rho = _prep(H, rho)
    p = np.diag(rho).real
    return float(0.5 * p @ H.omega_sq @ p)


def mu_gap(H, rho):
    """Distance from the variance bound.

    Returns ``(gap, mu)`` where ``mu[i, j] = rho_ii rho_jj - |rho_ij|^2`` for
    ``i < j`` (zero elsewhere) and ``gap = 2 sum_{i<j} mu_ij omega_ij^2``, so
    that ``squared_speed = 2 (Delta H)^2 - gap``.
    """
    H, rho = _prep(H, rho)
    p = np.diag(rho).real
    mu = np.triu(np.outer(p, p) - np.abs(rho) ** 2, k=1)
    return float(2 * np.sum(mu * H.omega_sq)), mu


def wy_squared_speed(H, rho) -> float:
    """Wigner-Yanase squared speed ``-Tr[H, sqrt(rho)]^2``.

    An :class:`~qspeed.optimal.OptimalState` is a persymmetric X-state, so its
    square root is taken block-wise in closed form; anything else goes
    through an eigendecomposition.
    """
    H = as_hamiltonian(H)
    if hasattr(rho, "regime") and hasattr(rho, "state"):
        root = x_state_sqrt(rho.state)
    else:
        root = matrix_sqrt_psd(as_array(rho))
    check_dims(H, root)
    return float(np.sum(np.abs(root) ** 2 * H.omega_sq))


def dissipator(Ls: LindbladSet, rho) -> np.ndarray:
    rho = as_array(rho)
    out = np.zeros_like(rho)
    for L in Ls.operators:
        if L.shape != rho.shape:
            raise DimensionMismatch(f"Lindblad operator shape {L.shape} vs state {rho.shape}")
        LdL = L.conj().T @ L
        out += L @ rho @ L.conj().T - 0.5 * (LdL @ rho + rho @ LdL)
    return out


def squared_speed_open(H, Ls: LindbladSet, rho, *, terms: bool = False):
    """Squared speed ``Tr[(L rho)^2]`` of Lindblad dynamics.

    With ``terms=True`` also return the unitary, dissipative and
    incompatibility contributions, which sum to the direct value.
    """
    H, rho = _prep(H, rho)
    Hm = H.matrix
    D = dissipator(Ls, rho)
    Lrho = -1j * (Hm @ rho - rho @ Hm) + D
    direct = float(np.trace(Lrho @ Lrho).real)
    if not terms:
        return direct
    unitary = 2 * np.trace(Hm @ (Hm @ rho - rho @ Hm) @ rho).real
    dissip = np.trace(D @ D).real
    incompat = (-2j * np.trace(rho @ (D @ Hm - Hm @ D))).real
    return direct, (float(unitary), float(dissip), float(incompat))


def speed_report(H, rho, basis: OrthonormalBasis | None = None) -> SpeedReport:
    return SpeedReport(
        euclid_sq=squared_speed(H, rho),
        euclid_sq_commutator=squared_speed_commutator(H, rho),
        euclid_sq_bloch=squared_speed_bloch(H, rho, basis),
        wy_sq=wy_squared_speed(H, rho),
        variance_bound=2 * energy_variance(H, rho),
        purity=purity(as_array(rho)),
    )


def batch_speeds(H, states: np.ndarray):
    """Euclidean and WY squared speeds for a stack of states ``(n, d, d)``."""
    H = as_hamiltonian(H)
    states = np.asarray(states)
    if states.shape[1:] != (H.dim, H.dim):
        raise DimensionMismatch("state stack does not match the Hamiltonian")
    w2 = H.omega_sq
    v2 = np.einsum("nij,ij->n", np.abs(states) ** 2, w2)
    lam, vec = np.linalg.eigh(states)
    lam[lam <= H.dim * np.finfo(float).eps * lam[:, -1:]] = 0.0
    root = np.einsum("nik,nk,njk->nij", vec, np.sqrt(np.clip(lam, 0, None)), vec.conj())
    wy = np.einsum("nij,ij->n", np.abs(root) ** 2, w2)
    return v2, wy


__all__ = [
    "LindbladSet", "SpeedReport", "batch_speeds", "dissipator",
    "energy_variance", "evolve", "mu_gap", "speed_report", "squared_speed",
    "squared_speed_bloch", "squared_speed_commutator", "squared_speed_open",
    "wy_squared_speed",
]
