"""Experiment drivers: triangle-defect scans, null-model curves, shuffle decay."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..genpart import enum_hier_partitions, random_hier_partition
from ..hpart import serialize
from ..infotheory import (
    DegenerateDenominator,
    MeanKind,
    dn_from_hvi,
    hentropy,
    hmi_recursive,
    hvi_total,
)
from ..nullmodel import ahmi, ehmi, make_rng, shuffle_k

MAX_SCAN_N = 5
_EXACT_LIMIT = 5_000_000
_BINS = 2000


class NOutOfRange(ValueError):
    pass


@dataclass
class CcdfTable:
    """``ccdf[i]`` is the fraction of values ``>= x[i]``."""

    x: np.ndarray
    ccdf: np.ndarray

    def check(self) -> None:
        if len(self.x) > 1 and not np.all(np.diff(self.x) > 0):
            raise AssertionError("x not strictly increasing")
        if len(self.ccdf) > 1 and not np.all(np.diff(self.ccdf) <= 1e-15):
            raise AssertionError("ccdf increases")
        if len(self.ccdf) and not (self.ccdf[0] <= 1.0 + 1e-12 and self.ccdf[-1] >= 0.0):
            raise AssertionError("ccdf outside [0, 1]")


@dataclass(frozen=True)
class CurvePoint:
    curve: str
    n: int
    value: float
    stderr: float
    k: int | None = None
    count: int = 0


def ccdf_from_values(values: np.ndarray, decimals: int = 12) -> CcdfTable:
    vals = np.round(np.asarray(values, dtype=float), decimals)
    x, counts = np.unique(vals, return_counts=True)
    tail = np.cumsum(counts[::-1])[::-1]
    return CcdfTable(x, tail / len(vals))


def _parallel_map(func, items, threads: int):
    if threads <= 1:
        return [func(it) for it in items]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items, chunksize=max(1, len(items) // (4 * threads))))


# -- triangle scans ----------------------------------------------------------
@dataclass
class TriangleScan:
    n: int
    measure: str
    n_partitions: int
    n_triples: int
    min_value: float
    max_value: float
    argmin: tuple
    argmax: tuple
    table: CcdfTable
    binned: bool = False


def pair_matrix(parts, measure: str) -> np.ndarray:
    k = len(parts)
    V = np.zeros((k, k))
    for a in range(k):
        for b in range(a + 1, k):
            V[a, b] = V[b, a] = hvi_total(parts[a], parts[b])
    if measure == "hvi":
        return V
    if measure == "dn":
        n = parts[0].n
        return np.vectorize(lambda v: dn_from_hvi(max(v, 0.0), n))(V)
    raise ValueError(f"unknown measure {measure!r}")


def scan_triangle(n: int, measure: str = "hvi") -> TriangleScan:
    """Triangle defects over all triples of hierarchical partitions of ``{1..n}``.

    ``(T, S, R)`` and ``(R, S, T)`` have the same defect and are counted once.
    """
    if not 1 <= n <= MAX_SCAN_N:
        raise NOutOfRange(f"n={n} outside 1..{MAX_SCAN_N}")
    parts = list(enum_hier_partitions(n))
    M = pair_matrix(parts, measure)
    k = len(parts)
    n_triples = k * k * (k + 1) // 2
    binned = n_triples > _EXACT_LIMIT
    lo, hi = math.inf, -math.inf
    argmin = argmax = (0, 0, 0)
    chunks = []
    if binned:
        span = 2.0 * float(M.max()) + 1e-9
        edges = np.linspace(-span, span, _BINS + 1)
        hist = np.zeros(_BINS, dtype=np.int64)
    for t in range(k):
        # D[s, r] = M[t, s] + M[s, r] - M[t, r], r >= t
        D = M[t][:, None] + M[:, t:] - M[t, t:][None, :]
        i_min = np.unravel_index(np.argmin(D), D.shape)
        i_max = np.unravel_index(np.argmax(D), D.shape)
        if D[i_min] < lo:
            lo, argmin = float(D[i_min]), (t, int(i_min[0]), int(i_min[1]) + t)
        if D[i_max] > hi:
            hi, argmax = float(D[i_max]), (t, int(i_max[0]), int(i_max[1]) + t)
        if binned:
            hist += np.histogram(D, bins=edges)[0]
        else:
            chunks.append(D.ravel())
    if binned:
        tail = np.cumsum(hist[::-1])[::-1]
        keep = hist > 0
        table = CcdfTable(edges[:-1][keep], tail[keep] / n_triples)
    else:
        table = ccdf_from_values(np.concatenate(chunks))
    names = lambda idx: tuple(serialize(parts[i]) for i in idx)  # noqa: E731
    return TriangleScan(n, measure, k, n_triples, lo, hi, names(argmin), names(argmax),
                        table, binned)


# -- null-model curves -------------------------------------------------------
@dataclass(frozen=True)
class _NullTask:
    n: int
    index: int
    seed: int
    rel_sem: float
    max_samples: int
    on_trivial: str


def _null_item(task: _NullTask) -> dict:
    rng = make_rng(task.seed, task.n * 1_000_000 + task.index)
    T = random_hier_partition(task.n, rng, on_trivial=task.on_trivial)
    S = random_hier_partition(task.n, rng, on_trivial=task.on_trivial)
    e_ts = ehmi(T, S, task.rel_sem, max_samples=task.max_samples, rng=rng)
    e_tt = ehmi(T, T, task.rel_sem, max_samples=task.max_samples, rng=rng)
    return {
        "he": hentropy(T),
        "hmi": hmi_recursive(T, S),
        "ehmi": e_ts.mean,
        "ehmi_self": e_tt.mean,
        "unconverged": int(not e_ts.converged) + int(not e_tt.converged),
    }


def _mean_se(x) -> tuple[float, float]:
    x = np.asarray(x, dtype=float)
    if len(x) < 2:
        return float(x.mean()) if len(x) else math.nan, 0.0
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(len(x)))


def _ratio_se(a, b) -> tuple[float, float]:
    # delta method on paired samples
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    r = a.mean() / b.mean()
    if len(a) < 2:
        return float(r), 0.0
    resid = a - r * b
    return float(r), float(resid.std(ddof=1) / math.sqrt(len(a)) / abs(b.mean()))


@dataclass
class NullCurves:
    points: list = field(default_factory=list)
    unconverged: int = 0
    raw: dict = field(default_factory=dict)

    def value(self, curve: str, n: int) -> float:
        return next(p.value for p in self.points if p.curve == curve and p.n == n)


def null_curves(n_list=(8, 16, 32, 64, 128), pairs_per_n: int = 1000, seed: int = 0,
                threads: int = 1, rel_sem: float = 0.01, max_samples: int = 100_000,
                on_trivial: str = "leaf") -> NullCurves:
    """Mean HMI, HE, EHMI, EHMI/HE and self-EHMI over random pairs, per ``n``."""
    if pairs_per_n < 1:
        raise ValueError("pairs_per_n must be >= 1")
    out = NullCurves()
    for n in n_list:
        tasks = [_NullTask(n, i, seed, rel_sem, max_samples, on_trivial)
                 for i in range(pairs_per_n)]
        items = _parallel_map(_null_item, tasks, threads)
        cols = {key: [it[key] for it in items] for key in ("he", "hmi", "ehmi", "ehmi_self")}
        out.raw[n] = cols
        out.unconverged += sum(it["unconverged"] for it in items)
        for key in ("hmi", "he", "ehmi", "ehmi_self"):
            m, se = _mean_se(cols[key])
            out.points.append(CurvePoint(f"mean_{key}", n, m, se, count=len(items)))
        r, se = _ratio_se(cols["ehmi"], cols["he"])
        out.points.append(CurvePoint("ratio_ehmi_he", n, r, se, count=len(items)))
    return out


# -- shuffle decay -----------------------------------------------------------
@dataclass(frozen=True)
class _ShuffleTask:
    n: int
    k: int
    index: int
    seed: int
    with_ahmi: bool
    rel_sem: float
    max_samples: int
    mean: str
    on_trivial: str


def _shuffle_item(task: _ShuffleTask) -> dict:
    rng = make_rng(task.seed, (task.n * 1000 + task.k) * 1_000_000 + task.index)
    T = random_hier_partition(task.n, rng, on_trivial=task.on_trivial)
    S = shuffle_k(T, task.k, rng)
    row = {"hmi": hmi_recursive(T, S), "ahmi": None, "unconverged": 0}
    if task.with_ahmi:
        est = ehmi(T, S, task.rel_sem, max_samples=task.max_samples, rng=rng)
        row["unconverged"] = int(not est.converged)
        try:
            row["ahmi"] = ahmi(T, S, task.mean, estimate=est)
        except DegenerateDenominator:
            pass
    return row


@dataclass
class ShuffleDecay:
    points: list = field(default_factory=list)
    unconverged: int = 0
    raw: dict = field(default_factory=dict)

    def curve(self, name: str, n: int) -> list[CurvePoint]:
        return sorted((p for p in self.points if p.curve == name and p.n == n),
                      key=lambda p: p.k)


def shuffle_decay(n_list=(16, 32, 64), samples: int = 10_000, seed: int = 0,
                  k_values=None, ahmi_k=None, threads: int = 1, rel_sem: float = 0.01,
                  max_samples: int = 100_000, mean: str = MeanKind.ARITHMETIC,
                  on_trivial: str = "leaf") -> ShuffleDecay:
    """Mean HMI and AHMI between ``T`` and ``shuffle_k(T, k)`` versus ``k``.

    ``k_values`` defaults to ``0..n``; ``ahmi_k`` restricts where the (costly)
    AHMI is evaluated and defaults to every ``k``. AHMI samples with a
    degenerate denominator are dropped; ``dropped_ahmi`` points count them.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    out = ShuffleDecay()
    for n in n_list:
        ks = list(range(n + 1)) if k_values is None else [k for k in k_values if k <= n]
        for k in ks:
            with_a = ahmi_k is None or k in ahmi_k
            tasks = [_ShuffleTask(n, k, i, seed, with_a, rel_sem, max_samples, str(MeanKind(mean).value),
                                  on_trivial) for i in range(samples)]
            items = _parallel_map(_shuffle_item, tasks, threads)
            hm = [it["hmi"] for it in items]
            out.raw[(n, k)] = items
            m, se = _mean_se(hm)
            out.points.append(CurvePoint("mean_hmi", n, m, se, k=k, count=len(hm)))
            if with_a:
                a = [it["ahmi"] for it in items if it["ahmi"] is not None]
                out.unconverged += sum(it["unconverged"] for it in items)
                m, se = _mean_se(a) if a else (math.nan, 0.0)
                out.points.append(CurvePoint("mean_ahmi", n, m, se, k=k, count=len(a)))
                out.points.append(CurvePoint("dropped_ahmi", n, float(len(items) - len(a)),
                                             0.0, k=k, count=len(items)))
    return out
