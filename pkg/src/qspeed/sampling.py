"""Uniform random density matrices ``rho = U diag(p) U^dagger``.

``p`` is uniform on the probability simplex and ``U`` is Haar distributed.

Stream layout
-------------
A run is ``n_diag`` random spectra, each conjugated by ``n_unitary``
independent Haar unitaries, giving ``n_diag * n_unitary`` states in
spectrum-major order.  Spectrum ``i`` owns the generator
``default_rng(SeedSequence(seed, spawn_key=(i,)))`` and draws from it, in
order: ``d`` exponential variates for ``p``, then a real and an imaginary
standard-normal block of shape ``(n_unitary, d, d)`` for the unitaries.
Any partition of the spectra across workers therefore reproduces the same
states bit for bit.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .linalg import DensityMatrix


@dataclass(frozen=True)
class SamplerConfig:
    dim: int
    seed: int = 0
    n_diag: int = 1
    n_unitary: int = 1

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.n_diag < 1 or self.n_unitary < 1:
            raise ValueError("n_diag and n_unitary must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def total(self) -> int:
        return self.n_diag * self.n_unitary

    @classmethod
    def for_samples(cls, dim: int, samples: int, seed: int = 0, n_unitary: int = 100):
        """Smallest layout holding at least ``samples`` states.

        Use :func:`sample_states` with ``limit=samples`` to drop the surplus
        from the last spectrum.
        """
        if samples < 1:
            raise ValueError("samples must be >= 1")
        n_unitary = min(n_unitary, samples)
        return cls(dim, seed, -(-samples // n_unitary), n_unitary)


def stream(seed: int, index: int) -> np.random.Generator:
    """Generator owned by spectrum ``index`` of a run seeded with ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def sample_simplex(d: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform point of the probability simplex (normalized exponentials)."""
    e = rng.standard_exponential(d)
    return e / e.sum()


def _haar_from_normals(re, im):
    Z = (re + 1j * im) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    diag = np.diagonal(R, axis1=-2, axis2=-1)
    # column phases fixed so that R has a positive diagonal
    return Q * (diag / np.abs(diag))[..., None, :]


def sample_haar_unitary(d: int, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Haar-random unitary (or a stack of ``size`` of them)."""
    shape = (d, d) if size is None else (size, d, d)
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return _haar_from_normals(re, im)


def sample_density(d: int, rng: np.random.Generator) -> DensityMatrix:
    p = sample_simplex(d, rng)
    U = sample_haar_unitary(d, rng)
    return DensityMatrix(_conjugate(U, p))


def _conjugate(U, p):
    rho = (U * p[..., None, :]) @ np.swapaxes(U.conj(), -1, -2)
    return (rho + np.swapaxes(rho.conj(), -1, -2)) / 2


@dataclass(frozen=True)
class SampleBlock:
    """States generated from one spectrum."""

    index: int
    spectrum: np.ndarray
    unitaries: np.ndarray
    states: np.ndarray

    def sqrt_states(self) -> np.ndarray:
        """Square roots ``U diag(sqrt p) U^dagger``, exact up to rounding."""
        return _conjugate(self.unitaries, np.sqrt(self.spectrum))


def sample_block(config: SamplerConfig, index: int) -> SampleBlock:
    rng = stream(config.seed, index)
    p = sample_simplex(config.dim, rng)
    U = sample_haar_unitary(config.dim, rng, config.n_unitary)
    return SampleBlock(index, p, U, _conjugate(U, p))


def iter_blocks(config: SamplerConfig, threads: int = 1):
    """Yield :class:`SampleBlock` objects in spectrum order.

    With ``threads > 1`` blocks are generated concurrently; the output is
    identical because each block depends only on its own stream.
    """
    idx = range(config.n_diag)
    if threads <= 1:
        for i in idx:
            yield sample_block(config, i)
        return
    with ThreadPoolExecutor(threads) as pool:
        yield from pool.map(lambda i: sample_block(config, i), idx)


def sample_states(config: SamplerConfig, limit: int | None = None, threads: int = 1) -> np.ndarray:
    """All states of a run as an array ``(n, d, d)``, truncated to ``limit``."""
    out = np.concatenate([b.states for b in iter_blocks(config, threads)])
    return out if limit is None else out[:limit]
