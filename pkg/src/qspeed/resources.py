"""Coherence and entanglement of states written in the energy eigenbasis.

A ``d = d1 * d2`` level system is split as ``|k> = |i>|j>`` with
``k = i * d2 + j`` (first factor most significant).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadFactorization, DimensionMismatch, OutOfBand, WrongDimension
from .linalg import DensityMatrix, as_array, as_hamiltonian, hermitian_eig, partial_transpose

NEGATIVITY_CUTOFF = 1e-12
RANK_CUTOFF = 1e-13

_SY2 = np.kron([[0, -1j], [1j, 0]], [[0, -1j], [1j, 0]]).real


def l1_coherence(rho) -> float:
    """Sum of the moduli of the off-diagonal entries."""
    r = np.abs(as_array(rho))
    return float(r.sum() - np.trace(r))


def _check_split(rho, d1, d2):
    if d1 < 1 or d2 < 1 or d1 * d2 != rho.shape[0]:
        raise BadFactorization(f"{d1} x {d2} does not factor dimension {rho.shape[0]}")


def negativity(rho, d1: int, d2: int) -> float:
    """``||rho^T1||_1 - 1``, evaluated as twice the summed negative eigenvalues.

    Eigenvalues in ``(-1e-12, 0)`` are treated as rounding noise.
    """
    rho = as_array(rho)
    _check_split(rho, d1, d2)
    w, _ = hermitian_eig(partial_transpose(rho, d1, d2, 1), tol=1e-9)
    neg = w[w <= -NEGATIVITY_CUTOFF]
    return float(-2 * neg.sum()) + 0.0


def concurrence_two_qubit(rho) -> float:
    """Wootters concurrence of a two-qubit state.

    The square roots of the eigenvalues of ``rho (Y x Y) rho* (Y x Y)`` are
    the singular values of ``tau = W^T (Y x Y) W`` for any factorization
    ``rho = W W^dagger``.  Taking ``W`` from the eigendecomposition with
    null directions dropped avoids square roots of rounding noise, which
    matters for the rank-deficient states this package produces.
    """
    rho = as_array(rho)
    if rho.shape != (4, 4):
        raise DimensionMismatch(f"concurrence needs a 4 x 4 state, got {rho.shape}")
    w, v = hermitian_eig(rho, tol=1e-9)
    keep = w > RANK_CUTOFF
    W = v[:, keep] * np.sqrt(w[keep])
    s = np.zeros(4)
    sv = np.linalg.svd(W.T @ _SY2 @ W, compute_uv=False)
    s[: sv.size] = sv
    return float(min(max(s[0] - s[1] - s[2] - s[3], 0.0), 1.0))


def concurrence_optimal_closed(state) -> float:
    """``max(2(|rho_14| - rho_22), 0)`` for a ``d = 4`` persymmetric X-state."""
    rho = as_array(state)
    if rho.shape != (4, 4):
        raise WrongDimension(f"closed-form concurrence needs d = 4, got {rho.shape[0]}")
    return float(max(2 * (abs(rho[0, 3]) - rho[1, 1].real), 0.0))


def reduced_state(rho, d1: int, d2: int, keep: int = 1) -> np.ndarray:
    """Partial trace over the factor not in ``keep`` (1 or 2)."""
    rho = as_array(rho)
    _check_split(rho, d1, d2)
    t = rho.reshape(d1, d2, d1, d2)
    if keep == 1:
        return np.einsum("ijkj->ik", t)
    if keep == 2:
        return np.einsum("ijik->jk", t)
    raise ValueError("keep must be 1 or 2")


@dataclass(frozen=True)
class ProductDecomposition:
    """``target = sum_k w_k A_k (x) B_k`` with every ``A_k``, ``B_k`` a state."""

    terms: tuple
    target: DensityMatrix
    d1: int
    d2: int

    def reconstruct(self) -> np.ndarray:
        out = np.zeros((self.d1 * self.d2,) * 2, dtype=complex)
        for w, A, B in self.terms:
            out += w * np.kron(A.data, B.data)
        return out

    def residual(self) -> float:
        return float(np.max(np.abs(self.reconstruct() - self.target.data)))


def _proj(vec):
    vec = np.asarray(vec, dtype=complex)
    return DensityMatrix(np.outer(vec, vec.conj()))


def _edge_vectors(n, phase):
    """``|+-x>`` and ``|+-y>`` on levels ``0`` and ``n-1`` of one factor."""
    e0 = np.zeros(n, complex)
    e1 = np.zeros(n, complex)
    e0[0] = 1
    e1[-1] = 1
    ph = np.exp(-0.5j * phase)
    r = 1 / np.sqrt(2)
    return {
        ("x", +1): r * (e0 + ph * e1),
        ("x", -1): r * (e0 - ph * e1),
        ("y", +1): r * (e0 + 1j * ph * e1),
        ("y", -1): r * (e0 - 1j * ph * e1),
    }


def separable_decomposition(H, kappa: float, d1: int, d2: int,
                            theta1: float = 0.0) -> ProductDecomposition:
    """Explicit product-state expansion of the fastest state below ``kappa0``.

    The state is ``I/d`` plus a coherence ``c e^{i theta1}`` between the
    first and last levels.  Writing both levels as corners of the ``d1 x d2``
    grid, the corner populations donate ``c`` each to four phase-rotated
    product projectors::

        c [P_x+ Q_x+ + P_x- Q_x- + P_y+ Q_y- + P_y- Q_y+]

    whose sum is the four corner projectors plus the coherence.  All weights
    ``1/d - c`` stay nonnegative exactly when ``kappa <= 1/d + 2/d^2``.
    """
    from .optimal import Regime, optimal_state

    H = as_hamiltonian(H)
    d = H.dim
    if d1 < 2 or d2 < 2 or d1 * d2 != d:
        raise BadFactorization(f"{d1} x {d2} is not a bipartition of dimension {d}")
    target = optimal_state(H, kappa, theta1=theta1)
    if target.regime is not Regime.LOW_PURITY or kappa > 1 / d + 2 / d ** 2 + 1e-12:
        raise OutOfBand(f"purity {kappa} above 1/d + 2/d^2; the state is not of this form")
    c = abs(target.state.data[0, -1])
    corners = {(0, 0), (0, d2 - 1), (d1 - 1, 0), (d1 - 1, d2 - 1)}
    terms = []
    for i in range(d1):
        for j in range(d2):
            w = 1 / d - (c if (i, j) in corners else 0.0)
            w = max(w, 0.0)
            if w > 0:
                a = np.zeros(d1)
                b = np.zeros(d2)
                a[i] = 1
                b[j] = 1
                terms.append((w, _proj(a), _proj(b)))
    if c > 0:
        va = _edge_vectors(d1, theta1)
        vb = _edge_vectors(d2, theta1)
        for axis, sa, sb in (("x", 1, 1), ("x", -1, -1), ("y", 1, -1), ("y", -1, 1)):
            terms.append((float(c), _proj(va[axis, sa]), _proj(vb[axis, sb])))
    return ProductDecomposition(tuple(terms), target.state, d1, d2)
