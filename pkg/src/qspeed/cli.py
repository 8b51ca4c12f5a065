"""Command-line front end: ``qspeed {optimal,simulate,verify}``.

CSV output is comma separated, UTF-8, LF line endings, with a header row;
floats are written with 17 significant digits so they round-trip exactly.

optimal
    one row per purity: ``kappa, regime, v2_opt, v2_wy_of_opt, l1_coherence,
    negativity, split_d1, concurrence, rank``, then ``rho_ii`` for each level
    and the real and imaginary parts of ``rho_{i, d-i+1}`` for the upper half
    of the secondary diagonal.  ``negativity`` is empty when ``d`` is prime
    and ``concurrence`` when ``d != 4``.
simulate
    one row per random state: ``index, purity, v2_euclid, v2_wy,
    l1_coherence, v2_opt, v2_wy_opt``.  A summary goes to standard error.
verify
    prints a pass/fail table and exits 0 only if every check passes.

Exit codes: 0 success, 1 failed verification, 2 configuration error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from math import sqrt

import numpy as np

from . import optimal as opt
from .errors import ConvergenceFailure, KKTViolation, NoConvergence, QSpeedError
from .linalg import Hamiltonian, numerical_rank
from .oracle import Ansatz, max_speed_bruteforce, x_structure_residuals
from .resources import (
    concurrence_optimal_closed,
    concurrence_two_qubit,
    l1_coherence,
    negativity,
)
from .sampling import SamplerConfig, iter_blocks
from .speed import squared_speed, wy_squared_speed


def _preset(inner_gap):
    outer = sqrt(2)
    a = (outer - inner_gap) / 2
    return (0.0, a, a + inner_gap, outer)


PRESETS = {
    "gamma-lt2": _preset(2 / sqrt(3)),
    "gamma-ge2": _preset(2 / sqrt(5)),
}

WY_BIN_EDGES = (0.25, 0.275, 0.3, 0.325, 0.35)


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    energies: tuple
    kappas: tuple = ()
    samples: int = 100_000
    seed: int = 0
    theta1: float = 0.0
    theta2: float = 0.0
    split: int | None = None
    out: str | None = None
    threads: int = 1
    restarts: int = 16

    @property
    def dim(self) -> int:
        return len(self.energies)


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int, np.integer, str)):
        return str(v)
    return f"{float(v):.17g}"


def _write(rows, header, out):
    lines = [",".join(header)]
    lines += [",".join(fmt(v) for v in r) for r in rows]
    text = "\n".join(lines) + "\n"
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _split_for(d, split):
    if split is not None:
        if split < 2 or d % split or d // split < 2:
            raise ConfigError(f"--split {split} does not factor d = {d}")
        return split
    for k in range(2, d):
        if d % k == 0:
            return k
    return None


def _optimal_rows(cfg: RunConfig):
    H = Hamiltonian(cfg.energies)
    d = H.dim
    d1 = _split_for(d, cfg.split)
    header = ["kappa", "regime", "v2_opt", "v2_wy_of_opt", "l1_coherence",
              "negativity", "split_d1", "concurrence", "rank"]
    header += [f"rho_{i + 1}{i + 1}" for i in range(d)]
    for i in range(d // 2):
        header += [f"rho_{i + 1}{d - i}_re", f"rho_{i + 1}{d - i}_im"]
    rows = []
    for k in cfg.kappas:
        s = opt.optimal_state(H, k, cfg.theta1, cfg.theta2)
        rho = s.state.data
        row = [s.kappa, s.regime.value, squared_speed(H, s), wy_squared_speed(H, s),
               l1_coherence(s),
               negativity(s, d1, d // d1) if d1 else None, d1,
               concurrence_two_qubit(s) if d == 4 else None,
               numerical_rank(s)]
        row += [rho[i, i].real for i in range(d)]
        for i in range(d // 2):
            row += [rho[i, d - 1 - i].real, rho[i, d - 1 - i].imag]
        rows.append(row)
    return header, rows


def cmd_optimal(cfg: RunConfig) -> int:
    header, rows = _optimal_rows(cfg)
    _write(rows, header, cfg.out)
    return 0


def simulate(cfg: RunConfig):
    """Random-state speeds plus the comparison with the optimal state.

    Returns ``(columns, summary)`` where ``columns`` maps column names to
    arrays of length ``cfg.samples``.
    """
    H = Hamiltonian(cfg.energies)
    d = H.dim
    w2 = H.omega_sq
    sc = SamplerConfig.for_samples(d, cfg.samples, cfg.seed)
    kap, v2, wy, l1 = [], [], [], []
    for b in iter_blocks(sc, cfg.threads):
        S = b.states
        kap.append(np.full(len(S), np.sum(b.spectrum ** 2)))
        v2.append(np.einsum("nij,ij->n", np.abs(S) ** 2, w2))
        wy.append(np.einsum("nij,ij->n", np.abs(b.sqrt_states()) ** 2, w2))
        A = np.abs(S)
        l1.append(A.sum(axis=(1, 2)) - np.einsum("nii->n", A))
    n = cfg.samples
    cols = {
        "index": np.arange(n),
        "purity": np.concatenate(kap)[:n],
        "v2_euclid": np.concatenate(v2)[:n],
        "v2_wy": np.concatenate(wy)[:n],
        "l1_coherence": np.concatenate(l1)[:n],
    }
    cols["v2_opt"] = opt.optimal_speed_curve(H, cols["purity"])
    cols["v2_wy_opt"] = opt.optimal_wy_curve(H, cols["purity"])

    excess = cols["v2_euclid"] - cols["v2_opt"]
    wy_exceed = cols["v2_wy"] > cols["v2_wy_opt"]
    bins = []
    for lo, hi in zip(WY_BIN_EDGES[:-1], WY_BIN_EDGES[1:]):
        m = (cols["purity"] >= lo) & (cols["purity"] < hi)
        bins.append((lo, hi, int(m.sum()), int(wy_exceed[m].sum())))
    summary = {
        "samples": n,
        "max_excess": float(excess.max()),
        "violations": int(np.sum(excess > 1e-9)),
        "wy_exceedances": int(wy_exceed.sum()),
        "wy_bins": bins,
    }
    return cols, summary


def cmd_simulate(cfg: RunConfig) -> int:
    cols, summary = simulate(cfg)
    header = list(cols)
    rows = zip(*(cols[h] for h in header))
    _write(rows, header, cfg.out)
    err = sys.stderr
    print(f"samples={summary['samples']}", file=err)
    print(f"max_excess_over_optimal={summary['max_excess']:.17g}", file=err)
    print(f"supremacy_violations={summary['violations']}", file=err)
    print(f"wy_exceedances={summary['wy_exceedances']}", file=err)
    for lo, hi, count, ex in summary["wy_bins"]:
        print(f"wy_bin[{lo:g},{hi:g}) states={count} exceedances={ex}", file=err)
    return 3 if summary["violations"] else 0


def verification_checks(H: Hamiltonian, kappas, restarts: int, seed: int):
    """Run the closed-form consistency checks; yield ``(name, kappa, value, tol, ok)``."""
    d = H.dim
    p = opt.regime_params(H)
    yield "kappa0 = 1/d + 2/d^2", None, abs(p.kappa0 - (1 / d + 2 / d ** 2)), 1e-15, \
        abs(p.kappa0 - (1 / d + 2 / d ** 2)) <= 1e-15
    if p.x0 is not None:
        c1, c2 = opt.kappa_thresholds_from_x0(p.x0, d)
        dev = max(abs(c1 - p.kappa1), abs(c2 - p.kappa2))
        yield "thresholds via x0", None, dev, 1e-12, dev <= 1e-12
    for k, below, above in opt.band_edges(p):
        lo = opt.branch_state(H, k, below)
        hi = opt.branch_state(H, k, above)
        dev = float(np.max(np.abs(lo - hi)))
        yield "continuity at threshold", k, dev, 1e-10, dev <= 1e-10
    rng = np.random.default_rng(seed)
    for k in kappas:
        s = opt.optimal_state(H, k)
        rho = s.state.data
        dev = abs(np.sum(np.abs(rho) ** 2) - k)
        yield "purity of optimal state", k, dev, 1e-10, dev <= 1e-10
        off, pers = x_structure_residuals(rho)
        yield "persymmetric X form", k, max(off, pers), 1e-12, max(off, pers) <= 1e-12
        closed = opt.optimal_speed(H, k)
        direct = squared_speed(H, s)
        dev = abs(closed - direct)
        yield "closed speed = speed of state", k, dev, 1e-12, dev <= 1e-12 * max(1, closed)
        if s.regime is not opt.Regime.NUMERIC_FALLBACK and 1 / d < k:
            rep = opt.kkt_check(H, s, raise_on_fail=False)
            yield "stationarity conditions", k, rep.mu, 0.0, rep.ok
        if d <= 4 and 1 / d < k:
            res = max_speed_bruteforce(H, k, restarts, rng, Ansatz.FULL)
            rel = (res.best_speed_sq - closed) / max(closed, 1e-300)
            yield "oracle vs closed form", k, rel, 1e-5, abs(rel) <= 1e-5
            if k < 1 - 1e-9:
                off, pers = x_structure_residuals(res.argmax.data)
                yield "oracle argmax X form", k, max(off, pers), 1e-5, max(off, pers) <= 1e-5
        if d == 4:
            c = concurrence_two_qubit(s)
            vals = (c, concurrence_optimal_closed(s), negativity(s, 2, 2))
            dev = max(vals) - min(vals)
            yield "concurrence = closed = negativity", k, dev, 1e-10, dev <= 1e-10


def cmd_verify(cfg: RunConfig) -> int:
    H = Hamiltonian(cfg.energies)
    rows = list(verification_checks(H, cfg.kappas, cfg.restarts, cfg.seed))
    width = max(len(r[0]) for r in rows)
    print(f"{'check':<{width}}  {'kappa':>10}  {'value':>12}  {'tol':>8}  result")
    for name, k, val, tol, ok in rows:
        ks = f"{k:10.6f}" if k is not None else f"{'-':>10}"
        print(f"{name:<{width}}  {ks}  {val:12.4e}  {tol:8.1e}  {'PASS' if ok else 'FAIL'}")
    failed = sum(not r[-1] for r in rows)
    print(f"{len(rows) - failed}/{len(rows)} checks passed")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qspeed", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name, help_ in (("optimal", "tabulate the fastest state over a purity grid"),
                        ("simulate", "speeds of uniformly random states"),
                        ("verify", "closed form vs numerical optimization")):
        p = sub.add_parser(name, help=help_)
        g = p.add_mutually_exclusive_group()
        g.add_argument("--energies", help="comma-separated sorted energies (hbar = 1)")
        g.add_argument("--preset", choices=sorted(PRESETS))
        p.add_argument("--dim", type=int, help="dimension; energies default to 0..d-1")
        p.add_argument("--kappa", type=float, help="single purity")
        p.add_argument("--kappa-min", type=float)
        p.add_argument("--kappa-max", type=float)
        p.add_argument("--steps", type=int, default=8 if name == "verify" else 50)
        p.add_argument("--samples", type=int, default=100_000)
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--theta1", type=float, default=0.0)
        p.add_argument("--theta2", type=float, default=0.0)
        p.add_argument("--split", type=int, help="first factor d1 of a d1 x d2 split")
        p.add_argument("--out", help="output CSV path (default: standard output)")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--restarts", type=int, default=16, help="oracle restarts (verify)")
    return ap


def config_from_args(ns) -> RunConfig:
    if ns.preset:
        energies = PRESETS[ns.preset]
    elif ns.energies:
        try:
            energies = tuple(float(x) for x in ns.energies.split(","))
        except ValueError as exc:
            raise ConfigError(f"bad --energies: {exc}") from None
    elif ns.dim:
        energies = tuple(float(i) for i in range(ns.dim))
    else:
        raise ConfigError("give --energies, --preset or --dim")
    d = len(energies)
    if ns.dim is not None and ns.dim != d:
        raise ConfigError(f"--dim {ns.dim} but {d} energies")
    if d < 2:
        raise ConfigError("need at least two levels")
    if any(b < a for a, b in zip(energies, energies[1:])):
        raise ConfigError("energies must be sorted nondecreasing")
    if ns.samples < 1:
        raise ConfigError("--samples must be >= 1")
    if ns.threads < 1 or ns.restarts < 1:
        raise ConfigError("--threads and --restarts must be >= 1")
    if not 0 <= ns.seed < 2 ** 64:
        raise ConfigError("--seed must be a 64-bit unsigned integer")
    if ns.kappa is not None:
        kappas = (ns.kappa,)
    else:
        if ns.steps < 2:
            raise ConfigError("--steps must be >= 2")
        lo = 1 / d if ns.kappa_min is None else ns.kappa_min
        hi = 1.0 if ns.kappa_max is None else ns.kappa_max
        if lo > hi:
            raise ConfigError("--kappa-min exceeds --kappa-max")
        kappas = tuple(np.linspace(lo, hi, ns.steps))
    for k in kappas:
        if not (1 / d - 1e-12 <= k <= 1 + 1e-12):
            raise ConfigError(f"purity {k} outside [1/{d}, 1]")
    return RunConfig(ns.command, energies, kappas, ns.samples, ns.seed, ns.theta1,
                     ns.theta2, ns.split, ns.out, ns.threads, ns.restarts)


COMMANDS = {"optimal": cmd_optimal, "simulate": cmd_simulate, "verify": cmd_verify}


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(ns)
        return COMMANDS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"qspeed: configuration error: {exc}", file=sys.stderr)
        return 2
    except (NoConvergence, ConvergenceFailure, KKTViolation, ArithmeticError) as exc:
        print(f"qspeed: numerical failure: {exc}", file=sys.stderr)
        return 3
    except QSpeedError as exc:
        print(f"qspeed: configuration error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"qspeed: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
