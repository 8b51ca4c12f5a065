"""Brute-force maximization of the squared speed at fixed purity.

This module knows nothing about the closed-form optimal states; it is the
independent check on them and the constructor of last resort where no closed
form is known.

Two search spaces are offered:

``Ansatz.FULL``
    every density matrix, parametrized as ``rho = A A^dagger / Tr(A A^dagger)``
    with ``A`` a free complex ``d x d`` matrix (a single column at unit
    purity).  Positivity and unit trace hold by construction, so the only
    explicit constraint is the purity.
``Ansatz.PERSYM_X``
    persymmetric X-states: one diagonal value and one secondary-diagonal
    modulus per level pair ``(i, d-i+1)``, plus the middle level for odd
    ``d``.

Each restart is a local SLSQP solve with analytic gradients; the result is
pushed back onto the purity shell by alternating projection
(:func:`project_purity`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import minimize

from .errors import NoConvergence, OutOfRange, StructureViolation, WrongDimension
from .linalg import DensityMatrix, as_hamiltonian, purity
from .speed import squared_speed

CONSTRAINT_TOL = 1e-8
STRUCTURE_TOL = 1e-5


class Ansatz(str, Enum):
    FULL = "full"
    PERSYM_X = "persym_x"


@dataclass(frozen=True)
class OracleResult:
    best_speed_sq: float
    argmax: DensityMatrix
    restarts_used: int
    converged: bool
    constraint_residual: float
    all_values: tuple = field(default=(), repr=False)


def project_purity(rho, kappa, tol=1e-10, max_iter=200):
    """Move ``rho`` onto ``{Tr rho^2 = kappa, rho >= 0, Tr rho = 1}``.

    Alternates an exact rescaling of the Bloch radius about ``I/d`` with
    clipping of negative eigenvalues and trace renormalization, until the
    purity error and the most negative eigenvalue are both below ``tol``.
    """
    rho = np.array(rho, dtype=complex)
    d = rho.shape[0]
    eye = np.eye(d) / d
    for _ in range(max_iter):
        radius2 = purity(rho) - 1 / d
        if radius2 <= 0:
            break
        rho = eye + np.sqrt(max(kappa - 1 / d, 0.0) / radius2) * (rho - eye)
        w, v = np.linalg.eigh(rho)
        if w[0] >= -tol:
            break
        w = np.clip(w, 0, None)
        rho = (v * (w / w.sum())) @ v.conj().T
    return (rho + rho.conj().T) / 2


def _cgrad(A, gamma, rho, S):
    """Real gradient of ``phi(rho(A))`` given the Hermitian gradient ``gamma``
    of ``phi`` with respect to ``rho`` (``d phi = Tr[gamma d rho]``)."""
    g = gamma - np.trace(gamma @ rho).real * np.eye(len(rho))
    G = 2 * (g @ A) / S
    return np.concatenate([G.real.ravel(), G.imag.ravel()])


class _FullProblem:
    def __init__(self, w2, kappa, rank):
        self.w2 = w2 / max(np.max(w2), 1e-300)
        self.kappa = kappa
        self.d = len(w2)
        self.rank = rank

    def unpack(self, z):
        n = self.d * self.rank
        return (z[:n] + 1j * z[n:]).reshape(self.d, self.rank)

    def state(self, z):
        A = self.unpack(z)
        M = A @ A.conj().T
        S = np.trace(M).real
        return A, M / S, S

    def obj(self, z):
        A, rho, S = self.state(z)
        val = np.sum(self.w2 * np.abs(rho) ** 2)
        return -val, -_cgrad(A, 2 * self.w2 * rho, rho, S)

    def con(self, z):
        A, rho, S = self.state(z)
        return np.sum(np.abs(rho) ** 2) - self.kappa

    def con_jac(self, z):
        A, rho, S = self.state(z)
        return _cgrad(A, 2 * rho, rho, S)


def _solve_full(H, kappa, rng, start=None):
    d = H.dim
    pure = kappa >= 1 - 1e-12
    rank = 1 if pure else d
    prob = _FullProblem(H.omega_sq, kappa, rank)
    if start is None:
        A0 = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    else:
        w, v = np.linalg.eigh(np.asarray(start, dtype=complex))
        A0 = (v * np.sqrt(np.clip(w, 0, None)))[:, -rank:]
        A0 = A0 + 1e-3 * (rng.standard_normal(A0.shape) + 1j * rng.standard_normal(A0.shape))
    z0 = np.concatenate([A0.real.ravel(), A0.imag.ravel()])
    if pure:
        res = minimize(prob.obj, z0, jac=True, method="BFGS",
                       options={"gtol": 1e-12, "maxiter": 2000})
    else:
        res = minimize(prob.obj, z0, jac=True, method="SLSQP",
                       constraints=[{"type": "eq", "fun": prob.con, "jac": prob.con_jac}],
                       options={"ftol": 1e-12, "maxiter": 1000})
    _, rho, _ = prob.state(res.x)
    return rho, bool(res.success)


def _xstate_from(a, c, m, d):
    rho = np.zeros((d, d), dtype=complex)
    for p in range(d // 2):
        q = d - 1 - p
        rho[p, p] = rho[q, q] = a[p]
        rho[p, q] = rho[q, p] = c[p]
    if d % 2:
        rho[d // 2, d // 2] = m
    return rho


def _solve_persym_x(H, kappa, rng, start=None):
    d = H.dim
    P = d // 2
    odd = d % 2
    W = max(H.max_gap ** 2, 1e-300)
    wp = np.array([H.omega_sq[p, d - 1 - p] for p in range(P)]) / W

    if kappa >= 1 - 1e-12:
        # unit purity: the state is the fastest pure pair state
        a = np.zeros(P)
        c = np.zeros(P)
        p = int(np.argmax(wp))
        a[p] = c[p] = 0.5
        return _xstate_from(a, c, 0.0, d), True

    n = 2 * P + odd

    def split(z):
        return z[:P], z[P:2 * P], (z[2 * P] if odd else 0.0)

    def obj(z):
        a, c, m = split(z)
        g = np.zeros(n)
        g[P:2 * P] = -4 * c * wp
        return -2 * np.sum(c ** 2 * wp), g

    def trace_con(z):
        a, c, m = split(z)
        return 2 * np.sum(a) + m - 1

    def trace_jac(z):
        g = np.zeros(n)
        g[:P] = 2
        if odd:
            g[2 * P] = 1
        return g

    def pur_con(z):
        a, c, m = split(z)
        return 2 * np.sum(a ** 2) + m ** 2 + 2 * np.sum(c ** 2) - kappa

    def pur_jac(z):
        a, c, m = split(z)
        g = np.concatenate([4 * a, 4 * c, [2 * m] if odd else []])
        return g

    Aineq = np.zeros((P, n))
    Aineq[:, :P] = np.eye(P)
    Aineq[:, P:2 * P] = -np.eye(P)

    if start is None:
        e = rng.exponential(size=P + odd)
        e /= e.sum()
        a0 = e[:P] / 2
        m0 = e[P] if odd else 0.0
        c0 = a0 * rng.uniform(size=P)
    else:
        start = np.asarray(start)
        a0 = np.array([start[p, p].real for p in range(P)])
        c0 = np.array([abs(start[p, d - 1 - p]) for p in range(P)])
        m0 = start[d // 2, d // 2].real if odd else 0.0
    z0 = np.concatenate([a0, c0, [m0] if odd else []])
    res = minimize(
        obj, z0, jac=True, method="SLSQP",
        bounds=[(0, 0.5)] * (2 * P) + ([(0, 1)] if odd else []),
        constraints=[
            {"type": "eq", "fun": trace_con, "jac": trace_jac},
            {"type": "eq", "fun": pur_con, "jac": pur_jac},
            {"type": "ineq", "fun": lambda z: Aineq @ z, "jac": lambda z: Aineq},
        ],
        options={"ftol": 1e-15, "maxiter": 1000},
    )
    a, c, m = split(res.x)
    c = np.minimum(np.clip(c, 0, None), np.clip(a, 0, None))
    return _xstate_from(np.clip(a, 0, None), c, max(m, 0.0), d), bool(res.success)


def max_speed_bruteforce(H, kappa, restarts=32, rng=None, ansatz=Ansatz.FULL,
                         starts=()) -> OracleResult:
    """Largest squared speed found over states of purity ``kappa``.

    Parameters
    ----------
    H : Hamiltonian or sequence of energies
    kappa : float
        Target purity in ``[1/d, 1]``.
    restarts : int
        Number of random local searches.  Each gets its own generator
        spawned from ``rng``, so the result does not depend on scheduling.
    rng : numpy.random.Generator or int, optional
    ansatz : Ansatz
    starts : sequence of matrices, optional
        Extra starting states, searched in addition to the random restarts.

    Returns
    -------
    OracleResult
        The best local optimum; ties are resolved by restart order.
    """
    H = as_hamiltonian(H)
    ansatz = Ansatz(ansatz)
    d = H.dim
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    if not (1 / d - 1e-12 <= kappa <= 1 + 1e-12):
        raise OutOfRange(f"purity {kappa} outside [1/{d}, 1]")
    kappa = min(max(kappa, 1 / d), 1.0)
    rng = np.random.default_rng(rng)

    if kappa - 1 / d <= 1e-14 or d == 1:
        rho = np.eye(d, dtype=complex) / d
        return OracleResult(0.0, DensityMatrix(rho), 0, True, abs(purity(rho) - kappa), (0.0,))

    solve = _solve_full if ansatz is Ansatz.FULL else _solve_persym_x
    children = rng.spawn(restarts + len(starts))
    jobs = [None] * restarts + list(starts)
    values, states, flags = [], [], []
    for child, start in zip(children, jobs):
        rho, ok = solve(H, kappa, child, start)
        rho = project_purity(rho, kappa)
        states.append(rho)
        values.append(squared_speed(H, rho))
        flags.append(ok and abs(purity(rho) - kappa) <= CONSTRAINT_TOL)
    best = int(np.argmax(values))
    rho = states[best]
    resid = abs(purity(rho) - kappa)
    if resid > CONSTRAINT_TOL:
        raise NoConvergence(f"purity residual {resid:.2e} after {len(jobs)} restarts", resid)
    return OracleResult(values[best], DensityMatrix(rho), len(jobs), flags[best], resid,
                        tuple(values))


@dataclass(frozen=True)
class StructureReport:
    argmax: DensityMatrix
    best_speed_sq: float
    off_x_max: float
    persymmetry_residual: float
    secondary: tuple
    ok: bool


def x_structure_residuals(rho):
    """Largest entry off the two diagonals, and the largest persymmetry defect
    ``| |rho_ij| - |rho_{d-j+1, d-i+1}| |``.

    Both are moduli, so they do not depend on the phase gauge of the levels.
    """
    r = np.abs(np.asarray(rho))
    d = len(r)
    mask = np.ones((d, d), bool)
    np.fill_diagonal(mask, False)
    mask[np.arange(d), d - 1 - np.arange(d)] = False
    off = float(r[mask].max()) if mask.any() else 0.0
    flipped = r[::-1, ::-1].T
    return off, float(np.max(np.abs(r - flipped)))


def verify_x_structure(H, kappa, restarts=32, rng=None, tol=STRUCTURE_TOL,
                       raise_on_fail=True) -> StructureReport:
    """Unrestricted search, then check that the winner is a persymmetric X-state."""
    H = as_hamiltonian(H)
    if H.dim not in (2, 3, 4):
        raise WrongDimension("structure verification is limited to d in {2, 3, 4}")
    res = max_speed_bruteforce(H, kappa, restarts, rng, Ansatz.FULL)
    rho = res.argmax.data
    off, pers = x_structure_residuals(rho)
    d = H.dim
    secondary = tuple(float(abs(rho[i, d - 1 - i])) for i in range(d // 2))
    ok = off <= tol and pers <= tol
    if not ok and raise_on_fail:
        r = np.abs(rho)
        bad = [(i, j, float(r[i, j])) for i in range(d) for j in range(d)
               if i != j and j != d - 1 - i and r[i, j] > tol]
        raise StructureViolation(
            f"off-X entry {off:.2e}, persymmetry defect {pers:.2e}", max(off, pers), bad)
    return StructureReport(res.argmax, res.best_speed_sq, off, pers, secondary, ok)
