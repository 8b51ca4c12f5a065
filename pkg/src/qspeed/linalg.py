"""Dense Hermitian matrix primitives, density-matrix validation and the
generalized Gell-Mann basis.

All states are expressed in the energy eigenbasis of the Hamiltonian, so the
Hamiltonian itself is just a sorted vector of energies.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    BadFactorization,
    ConvergenceFailure,
    DimensionMismatch,
    NotHermitian,
    NotPSD,
    TraceNotOne,
)

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10
PSD_TOL = 1e-9


def _frozen(a, dtype=complex):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A d x d density matrix in the energy eigenbasis.

    Direct construction does not check anything; use :func:`validate_density`
    for untrusted input.
    """

    data: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "data", _frozen(self.data))

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @property
    def purity(self) -> float:
        return purity(self)

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.data.copy() if copy else self.data
        return self.data.astype(dtype)


@dataclass(frozen=True, eq=False)
class Hamiltonian:
    """Time-independent Hamiltonian diagonal in its own eigenbasis (hbar = 1)."""

    energies: np.ndarray

    def __post_init__(self):
        e = np.array(self.energies, dtype=float).ravel()
        if e.size < 1:
            raise DimensionMismatch("Hamiltonian needs at least one level")
        if np.any(np.diff(e) < 0):
            raise ValueError("energies must be sorted nondecreasing")
        e.setflags(write=False)
        object.__setattr__(self, "energies", e)

    @property
    def dim(self) -> int:
        return self.energies.size

    @property
    def omega(self) -> np.ndarray:
        """Bohr frequencies ``omega[i, j] = E_j - E_i`` (antisymmetric)."""
        return self.energies[None, :] - self.energies[:, None]

    @property
    def omega_sq(self) -> np.ndarray:
        return self.omega ** 2

    @property
    def max_gap(self) -> float:
        return float(self.energies[-1] - self.energies[0])

    @property
    def matrix(self) -> np.ndarray:
        return np.diag(self.energies).astype(complex)

    def shifted(self, c: float) -> "Hamiltonian":
        return Hamiltonian(self.energies + c)


def as_hamiltonian(H) -> Hamiltonian:
    return H if isinstance(H, Hamiltonian) else Hamiltonian(H)


def as_array(rho) -> np.ndarray:
    """Return the raw complex matrix behind a state-like object."""
    if isinstance(rho, DensityMatrix):
        return rho.data
    state = getattr(rho, "state", None)
    if isinstance(state, DensityMatrix):
        return state.data
    return np.asarray(rho, dtype=complex)


def check_dims(H: Hamiltonian, rho: np.ndarray):
    if rho.shape != (H.dim, H.dim):
        raise DimensionMismatch(
            f"state has shape {rho.shape}, Hamiltonian has dimension {H.dim}")


def density_diagnostics(M) -> dict:
    """Measured violation of each density-matrix invariant (0 when satisfied)."""
    M = as_array(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {M.shape}")
    herm = float(np.max(np.abs(M - M.conj().T))) if M.size else 0.0
    trace = abs(complex(np.trace(M)) - 1.0)
    lam_min = float(np.linalg.eigvalsh((M + M.conj().T) / 2)[0])
    return {
        "hermitian": herm,
        "trace": trace,
        "psd": max(0.0, -lam_min),
    }


def validate_density(M, *, herm_tol=HERMITIAN_TOL, trace_tol=TRACE_TOL,
                     psd_tol=PSD_TOL) -> DensityMatrix:
    """Check the density-matrix invariants and wrap ``M``.

    Raises
    ------
    NotHermitian, TraceNotOne, NotPSD
        With ``violation`` set to the measured defect.
    """
    diag = density_diagnostics(M)
    if diag["hermitian"] > herm_tol:
        raise NotHermitian(
            f"max |M - M^dagger| = {diag['hermitian']:.3e} > {herm_tol:g}",
            diag["hermitian"])
    if diag["trace"] > trace_tol:
        raise TraceNotOne(f"|Tr M - 1| = {diag['trace']:.3e} > {trace_tol:g}",
                          diag["trace"])
    if diag["psd"] > psd_tol:
        raise NotPSD(f"minimum eigenvalue -{diag['psd']:.3e} below -{psd_tol:g}",
                     diag["psd"])
    return DensityMatrix(as_array(M))


def hermitian_eig(M, tol=1e-10):
    """Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.

    Uses LAPACK ``zheevd``; a LAPACK convergence failure (its internal
    iteration cap is ``30 * n`` QR sweeps) is re-raised as
    :class:`ConvergenceFailure`.
    """
    M = as_array(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {M.shape}")
    dev = float(np.max(np.abs(M - M.conj().T))) if M.size else 0.0
    if dev > tol:
        raise NotHermitian(f"input deviates from Hermitian by {dev:.3e}", dev)
    try:
        w, v = np.linalg.eigh((M + M.conj().T) / 2)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    return w, v


def _clipped_spectrum(M, psd_tol):
    w, v = hermitian_eig(M)
    if w.size and w[0] < -psd_tol:
        raise NotPSD(f"eigenvalue {w[0]:.3e} below -{psd_tol:g}", -float(w[0]))
    return np.clip(w, 0.0, None), v


def matrix_sqrt_psd(M, psd_tol=PSD_TOL) -> np.ndarray:
    """Principal square root of a positive semidefinite Hermitian matrix.

    Eigenvalues in ``[-psd_tol, 0]`` are treated as zero, and so are
    positive ones within rounding of zero (``d * eps * lambda_max``), whose
    square roots would otherwise inject ``O(sqrt(eps))`` errors.
    """
    w, v = _clipped_spectrum(M, psd_tol)
    if w.size:
        w[w <= w.size * np.finfo(float).eps * w[-1]] = 0.0
    s = (v * np.sqrt(w)) @ v.conj().T
    return (s + s.conj().T) / 2


def x_state_sqrt(rho) -> np.ndarray:
    """Square root of a persymmetric X-state, block by block.

    Each block ``[[a, c], [c*, a]]`` on levels ``(i, d-i+1)`` has eigenvalues
    ``a +- |c|``; its root keeps the phase of ``c`` and has diagonal
    ``(sqrt(l+) + sqrt(l-))/2`` and modulus ``(sqrt(l+) - sqrt(l-))/2``.
    """
    rho = as_array(rho)
    d = rho.shape[0]
    out = np.zeros_like(rho)
    for i in range(d // 2):
        j = d - 1 - i
        a = rho[i, i].real
        c = rho[i, j]
        lp = np.sqrt(max(a + abs(c), 0.0))
        lm = np.sqrt(max(a - abs(c), 0.0))
        phase = c / abs(c) if abs(c) > 0 else 1.0
        out[i, i] = out[j, j] = (lp + lm) / 2
        out[i, j] = phase * (lp - lm) / 2
        out[j, i] = np.conj(out[i, j])
    if d % 2:
        m = d // 2
        out[m, m] = np.sqrt(max(rho[m, m].real, 0.0))
    return out


def partial_transpose(rho, d1: int, d2: int, subsystem: int = 1) -> np.ndarray:
    """Partial transpose of a ``d1 x d2`` bipartite operator.

    ``subsystem=1`` transposes the first factor.
    """
    rho = as_array(rho)
    if d1 * d2 != rho.shape[0]:
        raise BadFactorization(f"{d1} x {d2} does not factor dimension {rho.shape[0]}")
    if subsystem not in (1, 2):
        raise ValueError("subsystem must be 1 or 2")
    t = rho.reshape(d1, d2, d1, d2)
    t = t.transpose(2, 1, 0, 3) if subsystem == 1 else t.transpose(0, 3, 2, 1)
    return t.reshape(d1 * d2, d1 * d2)


@dataclass(frozen=True, eq=False)
class OrthonormalBasis:
    """``d**2 - 1`` traceless Hermitian matrices, Hilbert-Schmidt orthonormal.

    ``matrices`` has shape ``(d**2 - 1, d, d)``; the identity element
    ``sigma0 = I / sqrt(d)`` is kept separately.
    """

    dim: int
    matrices: np.ndarray

    @property
    def sigma0(self) -> np.ndarray:
        return np.eye(self.dim, dtype=complex) / np.sqrt(self.dim)

    def __len__(self):
        return len(self.matrices)


@lru_cache(maxsize=None)
def gell_mann_basis(d: int) -> OrthonormalBasis:
    """Normalized generalized Gell-Mann matrices.

    Ordering is fixed: symmetric pairs ``(i, j), i < j`` row-major, then the
    antisymmetric pairs in the same order, then the ``d - 1`` diagonal
    matrices.
    """
    pairs = [(i, j) for i in range(d) for j in range(i + 1, d)]
    mats = []
    for i, j in pairs:
        m = np.zeros((d, d), complex)
        m[i, j] = m[j, i] = 1 / np.sqrt(2)
        mats.append(m)
    for i, j in pairs:
        m = np.zeros((d, d), complex)
        m[i, j] = -1j / np.sqrt(2)
        m[j, i] = 1j / np.sqrt(2)
        mats.append(m)
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -l
        mats.append(np.diag(diag / np.sqrt(l * (l + 1))).astype(complex))
    return OrthonormalBasis(d, _frozen(np.array(mats).reshape(-1, d, d)))


def bloch_vector(rho, basis: OrthonormalBasis | None = None) -> np.ndarray:
    """Real coordinates ``r_j = Tr[rho sigma_j]``."""
    rho = as_array(rho)
    basis = gell_mann_basis(rho.shape[0]) if basis is None else basis
    if basis.dim != rho.shape[0]:
        raise DimensionMismatch(
            f"basis dimension {basis.dim} != state dimension {rho.shape[0]}")
    # Tr[rho s] = sum_ij rho_ij s_ji
    return np.einsum("ij,kji->k", rho, basis.matrices).real


def from_bloch(r, basis: OrthonormalBasis) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if r.shape != (len(basis),):
        raise DimensionMismatch(f"need {len(basis)} coordinates, got {r.shape}")
    return basis.sigma0 / np.sqrt(basis.dim) + np.einsum("k,kij->ij", r, basis.matrices)


def purity(rho) -> float:
    """``Tr[rho^2]``, computed as the squared Frobenius norm."""
    rho = as_array(rho)
    return float(np.sum(np.abs(rho) ** 2))


def purity_expanded(rho) -> float:
    """Purity split into diagonal and off-diagonal contributions."""
    rho = as_array(rho)
    diag = np.diag(rho).real
    off = np.abs(rho) ** 2
    np.fill_diagonal(off, 0.0)
    return float(np.sum(diag ** 2) + np.sum(off))


def numerical_rank(rho, tol=1e-9) -> int:
    return int(np.sum(np.linalg.eigvalsh(as_array(rho)) > tol))
