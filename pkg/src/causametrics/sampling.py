"""Seeded random states, channels and instruments.

Every sampler takes a ``numpy.random.Generator``; use :func:`substream` to
derive an independent generator for sample ``index`` of a seeded run.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .tensor import choi


def substream(seed: int, *index: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), *map(int, index)])


def worker_count() -> int:
    """Worker cap from ``CAUSAMETRICS_THREADS`` (0 or unset means automatic)."""
    raw = os.environ.get("CAUSAMETRICS_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    return n if n > 0 else min(8, os.cpu_count() or 1)


def parallel_map(fn, items):
    """Map in a thread pool; output order follows ``items``."""
    items = list(items)
    workers = worker_count()
    if workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def haar_isometry(rng: np.random.Generator, d_out: int, d_in: int) -> np.ndarray:
    """Haar-random isometry C^d_in -> C^d_out via QR of a complex Ginibre matrix."""
    if d_out < d_in:
        raise ValueError("an isometry needs d_out >= d_in")
    z = (rng.standard_normal((d_out, d_in)) + 1j * rng.standard_normal((d_out, d_in))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def haar_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    return haar_isometry(rng, d, d)


def random_pure_state(rng: np.random.Generator, d: int) -> np.ndarray:
    return haar_isometry(rng, d, 1)[:, 0]


def random_density(rng: np.random.Generator, d: int, rank: int | None = None) -> np.ndarray:
    """Random density matrix from the Gram construction G G^dag / Tr."""
    rank = d if rank is None else rank
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_kraus(rng: np.random.Generator, d_in: int, d_out: int, rank: int | None = None) -> list[np.ndarray]:
    """Kraus operators of a random channel: partial trace of a Haar isometry."""
    r_min = -(-d_in // d_out)
    if rank is None:
        rank = int(rng.integers(r_min, r_min + 3))
    rank = max(rank, r_min)
    V = haar_isometry(rng, d_out * rank, d_in).reshape(d_out, rank, d_in)
    return [V[:, k, :] for k in range(rank)]


def random_channel_choi(rng: np.random.Generator, d_in: int, d_out: int, rank: int | None = None) -> np.ndarray:
    return choi(random_kraus(rng, d_in, d_out, rank), d_in, d_out)


def random_instrument_chois(rng: np.random.Generator, d_in: int, d_out: int, n_outcomes: int,
                            rank: int = 1) -> list[np.ndarray]:
    """Chois of a random instrument: Kraus operators of one isometry grouped by outcome."""
    r_min = -(-d_in // (d_out * n_outcomes))
    rank = max(rank, r_min)
    V = haar_isometry(rng, d_out * n_outcomes * rank, d_in).reshape(d_out, n_outcomes, rank, d_in)
    return [choi([V[:, k, j, :] for j in range(rank)], d_in, d_out) for k in range(n_outcomes)]
