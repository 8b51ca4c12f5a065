"""Closed-form fastest states at fixed purity.

For a Hamiltonian with energies ``E_1 <= ... <= E_d`` and a purity
``kappa`` the fastest state is a persymmetric X-state: nonzero entries only
on the main and secondary diagonals, and ``rho_ii = rho_{d-i+1, d-i+1}``.
Which secondary-diagonal coherences are switched on depends on ``kappa`` and
on the ratio ``gamma_1 = omega_{1d}^2 / omega_{2,d-1}^2``:

=================  =========================================================
band               state
=================  =========================================================
LOW_PURITY         ``I/d`` plus coherence ``rho_1d``, for
                   ``kappa <= kappa0 = 1/d + 2/d^2``
GAMMA1_GE2         ``2(1/d + x) |Psi1><Psi1|`` plus a flat middle block;
                   the whole upper range when ``gamma_1 >= 2`` (and for
                   ``d = 3``), otherwise only ``[kappa0, kappa1]``
MID_BAND           the previous state frozen at ``x = x0`` plus coherence
                   ``rho_{2,d-1}``, for ``gamma_1 < 2`` and
                   ``kappa in [kappa1, kappa2]``
TOP_BAND           mixture of ``|Psi1>`` and ``|Psi2>``, ``d = 4`` and
                   ``kappa >= kappa2``
NUMERIC_FALLBACK   ``d > 4``, ``gamma_1 < 2``, ``kappa > kappa2``: no closed
                   form is known, the state comes from the oracle searching
                   persymmetric X-states
=================  =========================================================

with ``|Psi1> = (|E_1> + e^{-i theta1} |E_d>)/sqrt(2)`` and ``|Psi2>`` the
same on levels ``2, d-1`` with phase ``theta2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from math import inf, sqrt

import numpy as np

from .errors import DegenerateSpectrum, KKTViolation, OutOfBand, OutOfRange
from .linalg import DensityMatrix, Hamiltonian, as_hamiltonian
from .speed import squared_speed

KAPPA_CLAMP = 1e-12
FALLBACK_SEED = 20240917
FALLBACK_RESTARTS = 24


class Regime(str, Enum):
    LOW_PURITY = "LowPurity"
    GAMMA1_GE2 = "Gamma1Ge2"
    MID_BAND = "MidBand"
    TOP_BAND = "TopBand"
    NUMERIC_FALLBACK = "NumericFallback"


CONSTRUCTION = {
    Regime.LOW_PURITY: "maximally mixed + rho_1d coherence",
    Regime.GAMMA1_GE2: "Psi1 weight 2(1/d+x), flat middle block",
    Regime.MID_BAND: "Psi1 weight 2(1/d+x0), flat middle block, rho_{2,d-1} coherence",
    Regime.TOP_BAND: "two-projector mixture of Psi1 and Psi2 (d=4)",
    Regime.NUMERIC_FALLBACK: "numeric search over persymmetric X-states (not closed form)",
}


@dataclass(frozen=True)
class RegimeParams:
    """Purity thresholds and gap ratios of one Hamiltonian.

    ``gamma[k] = omega_{1d}^2 / omega_{k+2, d-k-1}^2`` (1-based level labels),
    one entry per inner secondary-diagonal pair.  ``kappa1 = kappa2 = 1``
    and ``x0 = None`` when ``gamma_1 > 2``.  ``kappa`` and ``x`` are filled
    only when a purity was supplied and lies at or above ``kappa0``.
    """

    dim: int
    kappa0: float
    kappa1: float
    kappa2: float
    gamma: tuple
    x0: float | None
    kappa: float | None = None
    x: float | None = None

    @property
    def gamma1(self) -> float:
        return self.gamma[0] if self.gamma else inf


def kappa0_of(d: int) -> float:
    return 1 / d + 2 / d ** 2


def x_max(d: int) -> float:
    return (d - 2) / (2 * d)


def x_of_kappa(kappa: float, d: int) -> float:
    """Weight shift ``x`` of the ``Psi1`` form at purity ``kappa``.

    Positive root of ``kappa = 4(1/d + x)^2 + (d-2)(1/d - 2x/(d-2))^2``.
    """
    k0 = kappa0_of(d)
    if kappa < k0 - KAPPA_CLAMP or kappa > 1 + KAPPA_CLAMP:
        raise OutOfBand(f"purity {kappa} outside [{k0}, 1]")
    kappa = min(max(kappa, k0), 1.0)
    if d == 2:
        return 0.0
    root = sqrt(max((-1 + (d - 1) * kappa) / (d - 2), 0.0))
    x = (d - 2) / (2 * d * (d - 1)) * (-1 + d * root)
    return min(max(x, 0.0), x_max(d))


def x0_of_gamma(gamma1: float, d: int) -> float:
    """Frozen weight shift ``x0`` at which the ``rho_{2,d-1}`` coherence turns on.

    Defined for ``1 <= gamma1 <= 2``; the endpoints give ``0`` and ``(d-2)/(2d)``.
    """
    if d < 4:
        raise OutOfRange("x0 needs d >= 4")
    if not (1 - 1e-12 <= gamma1 <= 2 + 1e-12):
        raise OutOfRange(f"gamma1 = {gamma1} outside [1, 2]")
    return (gamma1 - 1) / (d * (2 * (d - 1) / (d - 2) - gamma1))


def _kappa12_from_gamma(gamma1, d):
    den = (2 * (d - 1) - (d - 2) * gamma1) ** 2
    return (4 + (d - 2) * (2 - gamma1) ** 2) / den, (4 + d * (2 - gamma1) ** 2) / den


def kappa_thresholds_from_x0(x0: float, d: int):
    """``(kappa1, kappa2)`` rebuilt from ``x0`` via the purity of the frozen state."""
    mid = 1 / d - 2 * x0 / (d - 2)
    k1 = 4 * (1 / d + x0) ** 2 + (d - 2) * mid ** 2
    return k1, k1 + 2 * mid ** 2


def regime_params(H, kappa: float | None = None) -> RegimeParams:
    H = as_hamiltonian(H)
    d = H.dim
    if d < 2:
        raise OutOfRange("need d >= 2")
    W = float(H.omega_sq[0, -1])
    if W == 0:
        raise DegenerateSpectrum("omega_1d = 0: every state is stationary")
    gam = []
    for k in range(1, d // 2):
        w = float(H.omega_sq[k, d - 1 - k])
        gam.append(W / w if w > 0 else inf)
    gamma = tuple(gam)
    g1 = gamma[0] if gamma else inf
    x0 = None
    k1 = k2 = 1.0
    if d >= 4 and g1 <= 2 + 1e-12:
        x0 = x0_of_gamma(g1, d)
        k1, k2 = _kappa12_from_gamma(g1, d)
        c1, c2 = kappa_thresholds_from_x0(x0, d)
        if abs(c1 - k1) > 1e-12 or abs(c2 - k2) > 1e-12:
            raise ArithmeticError(
                f"threshold forms disagree: kappa1 {k1!r} vs {c1!r}, kappa2 {k2!r} vs {c2!r}")
    k0 = kappa0_of(d)
    x = None
    if kappa is not None:
        kappa = _clamp_kappa(kappa, d)
        if kappa >= k0:
            x = x_of_kappa(kappa, d)
    return RegimeParams(d, k0, k1, k2, gamma, x0, kappa, x)


def _clamp_kappa(kappa, d):
    if kappa < 1 / d - KAPPA_CLAMP or kappa > 1 + KAPPA_CLAMP:
        raise OutOfRange(f"purity {kappa} outside [1/{d}, 1]")
    return min(max(float(kappa), 1 / d), 1.0)


def classify(params: RegimeParams, kappa: float) -> Regime:
    d = params.dim
    if kappa <= params.kappa0:
        return Regime.LOW_PURITY
    if params.gamma1 >= 2 or d < 4 or kappa <= params.kappa1:
        return Regime.GAMMA1_GE2
    if kappa <= params.kappa2:
        return Regime.MID_BAND
    return Regime.TOP_BAND if d == 4 else Regime.NUMERIC_FALLBACK


@dataclass(frozen=True, eq=False)
class OptimalState:
    state: DensityMatrix
    regime: Regime
    construction: str
    kappa: float
    theta1: float = 0.0
    theta2: float = 0.0
    params: RegimeParams | None = field(default=None, repr=False)

    @property
    def dim(self):
        return self.state.dim

    def __array__(self, dtype=None, copy=None):
        return self.state.__array__(dtype, copy)


def _band_entries(params: RegimeParams, regime: Regime, kappa: float):
    """Diagonal values and secondary-diagonal moduli, per level pair.

    Returns ``(diag, anti)`` where ``diag[p]`` is ``rho_pp`` for pair ``p`` and
    the middle level (odd ``d``) is the last element of ``diag``.
    """
    d = params.dim
    P = d // 2
    n_diag = P + d % 2
    diag = np.zeros(n_diag)
    anti = np.zeros(P)
    if regime is Regime.LOW_PURITY:
        diag[:] = 1 / d
        anti[0] = sqrt(max(kappa - 1 / d, 0.0) / 2)
    elif regime in (Regime.GAMMA1_GE2, Regime.MID_BAND):
        x = x_of_kappa(kappa, d) if regime is Regime.GAMMA1_GE2 else params.x0
        diag[:] = 1 / d - 2 * x / (d - 2)
        diag[0] = anti[0] = 1 / d + x
        if regime is Regime.MID_BAND:
            anti[1] = sqrt(max(kappa - params.kappa1, 0.0) / 2)
    elif regime is Regime.TOP_BAND:
        s = sqrt(max(2 * kappa - 1, 0.0))
        diag[0] = anti[0] = (1 + s) / 4
        diag[1] = anti[1] = (1 - s) / 4
    else:
        raise ValueError(f"no closed form for {regime}")
    return diag, anti


def _assemble(diag, anti, d, theta1, theta2):
    rho = np.zeros((d, d), dtype=complex)
    P = d // 2
    phases = [theta1, theta2] + [0.0] * max(P - 2, 0)
    for p in range(P):
        q = d - 1 - p
        rho[p, p] = rho[q, q] = diag[p]
        rho[p, q] = anti[p] * np.exp(1j * phases[p])
        rho[q, p] = np.conj(rho[p, q])
    if d % 2:
        rho[P, P] = diag[-1]
    return rho


@lru_cache(maxsize=4096)
def _fallback_search(energies: tuple, kappa: float) -> np.ndarray:
    from .oracle import Ansatz, max_speed_bruteforce

    H = Hamiltonian(energies)
    params = regime_params(H)
    diag, anti = _band_entries(params, Regime.MID_BAND, params.kappa2)
    seed = _assemble(diag, anti, H.dim, 0.0, 0.0)
    res = max_speed_bruteforce(H, kappa, FALLBACK_RESTARTS, FALLBACK_SEED,
                               Ansatz.PERSYM_X, starts=[seed])
    out = res.argmax.data.copy()
    out.setflags(write=False)
    return out


def _fallback(H, kappa, theta1, theta2):
    rho = _fallback_search(tuple(H.energies.tolist()), float(kappa)).copy()
    d = H.dim
    for p, th in ((0, theta1), (1, theta2)):
        q = d - 1 - p
        rho[p, q] = abs(rho[p, q]) * np.exp(1j * th)
        rho[q, p] = np.conj(rho[p, q])
    return rho


def optimal_state(H, kappa: float, theta1: float = 0.0, theta2: float = 0.0) -> OptimalState:
    """Fastest state of purity ``kappa`` under ``H``.

    ``theta1`` and ``theta2`` are free phases of ``rho_1d`` and
    ``rho_{2,d-1}``; they do not change any speed.
    """
    H = as_hamiltonian(H)
    params = regime_params(H, kappa)
    kappa = params.kappa
    regime = classify(params, kappa)
    if regime is Regime.NUMERIC_FALLBACK:
        rho = _fallback(H, kappa, theta1, theta2)
    else:
        diag, anti = _band_entries(params, regime, kappa)
        rho = _assemble(diag, anti, H.dim, theta1, theta2)
    return OptimalState(DensityMatrix(rho), regime, CONSTRUCTION[regime], kappa,
                        theta1, theta2, params)


def branch_state(H, kappa: float, regime: Regime, theta1: float = 0.0,
                 theta2: float = 0.0) -> np.ndarray:
    """Evaluate one band's closed-form entries at ``kappa``, whatever band
    ``kappa`` actually falls in.  Used to compare neighbouring bands at
    their shared edge."""
    H = as_hamiltonian(H)
    params = regime_params(H)
    diag, anti = _band_entries(params, Regime(regime), _clamp_kappa(kappa, H.dim))
    return _assemble(diag, anti, H.dim, theta1, theta2)


def band_edges(params: RegimeParams):
    """``(kappa, lower band, upper band)`` for every interior band edge."""
    d = params.dim
    out = []
    if params.kappa0 < 1:
        out.append((params.kappa0, Regime.LOW_PURITY, Regime.GAMMA1_GE2))
    if params.x0 is not None and params.kappa1 < 1:
        out.append((params.kappa1, Regime.GAMMA1_GE2, Regime.MID_BAND))
        if d == 4 and params.kappa2 < 1:
            out.append((params.kappa2, Regime.MID_BAND, Regime.TOP_BAND))
    return out


def _closed_speed(H: Hamiltonian, params: RegimeParams, regime: Regime, kappa: float) -> float:
    d = params.dim
    W = H.omega_sq[0, -1]
    if regime is Regime.LOW_PURITY:
        return (kappa - 1 / d) * W
    w = H.omega_sq[1, d - 2] if d >= 4 else 0.0
    if regime is Regime.GAMMA1_GE2:
        return 2 * (1 / d + x_of_kappa(kappa, d)) ** 2 * W
    if regime is Regime.MID_BAND:
        return 2 * (1 / d + params.x0) ** 2 * W + (kappa - params.kappa1) * w
    s = sqrt(max(2 * kappa - 1, 0.0))
    return ((1 + s) ** 2 * W + (1 - s) ** 2 * w) / 8


def optimal_speed(H, kappa: float) -> float:
    """Largest squared speed at purity ``kappa``."""
    H = as_hamiltonian(H)
    params = regime_params(H, kappa)
    regime = classify(params, params.kappa)
    if regime is Regime.NUMERIC_FALLBACK:
        return squared_speed(H, _fallback(H, params.kappa, 0.0, 0.0))
    return float(_closed_speed(H, params, regime, params.kappa))


def optimal_speed_curve(H, kappas) -> np.ndarray:
    """:func:`optimal_speed` over an array of purities, reusing the thresholds."""
    H = as_hamiltonian(H)
    params = regime_params(H)
    d = H.dim
    out = np.empty(len(kappas))
    for n, k in enumerate(kappas):
        k = _clamp_kappa(k, d)
        regime = classify(params, k)
        if regime is Regime.NUMERIC_FALLBACK:
            out[n] = optimal_speed(H, k)
        else:
            out[n] = _closed_speed(H, params, regime, k)
    return out


def optimal_wy_curve(H, kappas) -> np.ndarray:
    """Wigner-Yanase squared speed of the optimal state, for each purity.

    Uses the block-wise square root of the X-state: a pair with diagonal ``a``
    and coherence ``c`` contributes ``(sqrt(a+c) - sqrt(a-c))^2 / 2`` times its
    squared Bohr frequency.
    """
    H = as_hamiltonian(H)
    params = regime_params(H)
    d = H.dim
    w2 = np.array([H.omega_sq[p, d - 1 - p] for p in range(d // 2)])
    out = np.empty(len(kappas))
    for n, k in enumerate(kappas):
        k = _clamp_kappa(k, d)
        regime = classify(params, k)
        if regime is Regime.NUMERIC_FALLBACK:
            rho = _fallback(H, k, 0.0, 0.0)
            diag = np.array([rho[p, p].real for p in range(d // 2)])
            anti = np.array([abs(rho[p, d - 1 - p]) for p in range(d // 2)])
        else:
            diag, anti = _band_entries(params, regime, k)
            diag = diag[: d // 2]
        lp = np.sqrt(np.clip(diag + anti, 0, None))
        lm = np.sqrt(np.clip(diag - anti, 0, None))
        out[n] = np.sum((lp - lm) ** 2 / 2 * w2)
    return out


@dataclass(frozen=True)
class KKTReport:
    regime: Regime
    mu: float
    mu_bounds: tuple
    c2: tuple
    omega_sq_excluded: tuple
    omega_exclusion_strict: bool
    ok: bool
    failures: tuple = ()


def kkt_check(H, candidate: OptimalState, tol: float = 1e-9, raise_on_fail: bool = True) -> KKTReport:
    """Check the Lagrange stationarity conditions of a closed-form candidate.

    The multiplier ``mu`` of the purity constraint is recovered from the
    stationarity condition in ``x = rho_11 - 1/d``::

        x [2(d-1)/(d-2) mu - W] = (W - mu) / d,      W = omega_1d^2

    and must lie in ``[W/2, W]``.  Every inner coherence ``rho_ij``
    (``2 <= i < j <= d-1``) must vanish unless ``mu = omega_ij^2``.  In the
    ``d = 4`` two-projector band the inner pair is tied to its diagonal and
    ``mu`` follows from the single remaining degree of freedom instead; it
    decreases from ``omega_23^2`` to ``W/2`` across the band.

    ``omega_sq_excluded`` lists ``omega_1j^2 + omega_jd^2`` for the middle
    levels ``j``; these never reach ``W`` so ``rho_1j`` cannot be active.
    """
    H = as_hamiltonian(H)
    rho = candidate.state.data
    d = H.dim
    W = H.omega_sq[0, -1]
    regime = candidate.regime
    if regime is Regime.NUMERIC_FALLBACK:
        raise OutOfBand("no closed-form stationarity conditions for the numeric band")
    failures = []
    a = rho[0, 0].real
    if regime is Regime.TOP_BAND:
        b = rho[1, 1].real
        w = H.omega_sq[1, 2]
        mu = (a * W - b * w) / (2 * (a - b))
        lo, hi = W / 2, w
        inner_skip = {(1, 2)}
    else:
        x = a - 1 / d
        if d == 2 or abs(x) < 1e-15:
            mu = W
        else:
            mu = W * (x + 1 / d) / (2 * (d - 1) * x / (d - 2) + 1 / d)
        lo, hi = W / 2, W
        inner_skip = set()
    scale = tol * max(1.0, W)
    if not (lo - scale <= mu <= hi + scale):
        failures.append(f"mu = {mu:.12g} outside [{lo:.12g}, {hi:.12g}]")
    c2 = []
    for i in range(1, d - 1):
        for j in range(i + 1, d - 1):
            if (i, j) in inner_skip:
                continue
            mod = abs(rho[i, j])
            gap = abs(mu - H.omega_sq[i, j])
            good = mod <= 1e-12 or gap <= tol * W
            c2.append((i + 1, j + 1, mod, gap, good))
            if not good:
                failures.append(f"|rho_{i + 1}{j + 1}| = {mod:.3e} with mu - omega^2 = {gap:.3e}")
    for j in range(1, d - 1):
        if abs(rho[0, j]) > 1e-12 or abs(rho[j, -1]) > 1e-12:
            failures.append(f"rho_1{j + 1} or rho_{j + 1}{d} nonzero")
    omegas = tuple(float(H.omega_sq[0, j] + H.omega_sq[j, -1]) for j in range(1, d - 1))
    if any(o > W * (1 + 1e-12) for o in omegas):
        failures.append("omega_1j^2 + omega_jd^2 exceeds omega_1d^2")
    strict = all(o < W for o in omegas)
    report = KKTReport(regime, float(mu), (float(lo), float(hi)), tuple(c2), omegas,
                       strict, not failures, tuple(failures))
    if failures and raise_on_fail:
        raise KKTViolation("; ".join(failures), report)
    return report
