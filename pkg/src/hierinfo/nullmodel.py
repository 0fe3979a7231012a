"""Permutation null model: expected HMI and the chance-adjusted HMI."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .hpart import HierPartition, SizeMismatch, apply_permutation
from .infotheory import (
    DegenerateDenominator,
    MeanKind,
    generalized_mean,
    hmi_batch,
    hmi_recursive,
)

__all__ = [
    "EhmiEstimate",
    "KOutOfRange",
    "make_rng",
    "random_permutation",
    "shuffle_k",
    "ehmi",
    "ahmi",
]

EXHAUSTIVE_THRESHOLD = 5040
_BATCH = 32


class KOutOfRange(ValueError):
    pass


@dataclass(frozen=True)
class EhmiEstimate:
    mean: float
    sem: float
    samples: int
    exhausted: bool = False
    converged: bool = True


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Independent generator for sub-stream ``stream`` of ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream,)))


def random_permutation(n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform permutation of ``1..n`` as an image array."""
    return rng.permutation(n) + 1


def shuffle_k(T: HierPartition, k: int, rng: np.random.Generator) -> HierPartition:
    """Relabel ``k`` randomly chosen elements by a uniform permutation among themselves."""
    n = T.n
    if not 0 <= k <= n:
        raise KOutOfRange(f"k={k} outside 0..{n}")
    perm = np.arange(1, n + 1)
    if k > 1:
        chosen = rng.choice(n, size=k, replace=False)
        perm[chosen] = perm[chosen[rng.permutation(k)]]
    return apply_permutation(T, perm)


def _exhaustive(T, S) -> EhmiEstimate:
    n = T.n
    total = 0.0
    count = 0
    perms = itertools.permutations(range(1, n + 1))
    while True:
        chunk = list(itertools.islice(perms, 720))
        if not chunk:
            break
        vals = hmi_batch(T, S, np.asarray(chunk))
        total += math.fsum(vals)
        count += len(chunk)
    return EhmiEstimate(total / count, 0.0, count, exhausted=True)


def ehmi(
    T: HierPartition,
    S: HierPartition,
    rel_sem_target: float = 0.01,
    min_samples: int = 30,
    max_samples: int = 100_000,
    rng: np.random.Generator | None = None,
    exhaustive_threshold: int = EXHAUSTIVE_THRESHOLD,
) -> EhmiEstimate:
    """Expected HMI under uniform relabelling of ``T``.

    Exact (all ``n!`` permutations) when ``n! <= exhaustive_threshold``.
    Otherwise permutations are sampled in batches until the standard error
    relative to the mean drops below ``rel_sem_target`` (absolute ``1e-4``
    when the mean is below ``1e-6``), or ``max_samples`` is reached, in which
    case ``converged`` is False.
    """
    if T.n != S.n:
        raise SizeMismatch(f"universe sizes differ: {T.n} != {S.n}")
    if rel_sem_target <= 0:
        raise ValueError("rel_sem_target must be positive")
    n = T.n
    if math.factorial(n) <= exhaustive_threshold:
        return _exhaustive(T, S)
    if rng is None:
        rng = np.random.default_rng()
    min_samples = max(min_samples, 2)
    chunks: list[np.ndarray] = []
    count = 0
    total = 0.0
    total_sq = 0.0
    while count < max_samples:
        size = min(max(_BATCH, min_samples - count), max_samples - count)
        perms = np.stack([random_permutation(n, rng) for _ in range(size)])
        vals = hmi_batch(T, S, perms)
        chunks.append(vals)
        count += size
        total += float(vals.sum())
        total_sq += float(vals @ vals)
        if count < min_samples:
            continue
        mean = total / count
        var = max(total_sq - count * mean * mean, 0.0) / (count - 1)
        sem = math.sqrt(var / count)
        if abs(mean) < 1e-6:
            if sem < 1e-4:
                break
        elif sem / abs(mean) < rel_sem_target:
            break
    vals = np.concatenate(chunks)
    mean = float(vals.mean())
    sem = float(vals.std(ddof=1) / math.sqrt(len(vals)))
    converged = (sem < 1e-4) if abs(mean) < 1e-6 else (sem / abs(mean) < rel_sem_target)
    return EhmiEstimate(mean, sem, len(vals), exhausted=False, converged=converged)


def ahmi(
    T: HierPartition,
    S: HierPartition,
    mean: MeanKind | str = MeanKind.ARITHMETIC,
    rng: np.random.Generator | None = None,
    estimate: EhmiEstimate | None = None,
    **ehmi_params,
) -> float:
    """Adjusted HMI ``(I - <I>) / (M(H_T, H_S) - <I>)``.

    Pass a precomputed ``estimate`` to skip the EHMI computation.
    """
    if estimate is None:
        estimate = ehmi(T, S, rng=rng, **ehmi_params)
    # entropies via the same routine as I, so T == S gives exactly 1
    h_t = hmi_recursive(T, T)
    h_s = hmi_recursive(S, S)
    denom = generalized_mean(h_t, h_s, mean) - estimate.mean
    if abs(denom) < 1e-9:
        raise DegenerateDenominator("mean entropy equals the expected HMI")
    return (hmi_recursive(T, S) - estimate.mean) / denom
