"""Information-theoretic measures between hierarchical partitions.

All values are in nats. Two independent routes compute the hierarchical
mutual information:

* :func:`hmi_recursive` walks pairs of same-depth nodes and sums the local
  mutual information of their children restricted to the blocks' overlap.
* :func:`hmi_levels` sums classical conditional mutual informations between
  consecutive (padded) level partitions.

Only non-empty intersection cells are ever visited, which realises the
``0 ln 0 = 0`` and ``0/0 = 0`` conventions without special cases.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import xlogy

from .hpart import HierPartition, Node, SizeMismatch

__all__ = [
    "MeanKind",
    "MeasureReport",
    "VertexTerm",
    "DegenerateDenominator",
    "generalized_mean",
    "flat_entropy",
    "hmi_recursive",
    "hmi_levels",
    "hmi_batch",
    "hentropy",
    "hje",
    "hce",
    "hvi",
    "hvi_total",
    "nhmi",
    "dn",
    "dn_from_hvi",
    "triangle_defect",
    "vertex_hmi_terms",
    "padded_levels",
]


class DegenerateDenominator(ZeroDivisionError):
    """Normalisation denominator vanishes (e.g. both entropies are zero)."""


class MeanKind(str, enum.Enum):
    ARITHMETIC = "arithmetic"
    GEOMETRIC = "geometric"
    MAX = "max"
    MIN = "min"


def generalized_mean(x: float, y: float, kind: MeanKind | str = MeanKind.ARITHMETIC) -> float:
    kind = MeanKind(kind)
    if kind is MeanKind.ARITHMETIC:
        return 0.5 * (x + y)
    if kind is MeanKind.GEOMETRIC:
        return math.sqrt(x * y)
    if kind is MeanKind.MAX:
        return max(x, y)
    return min(x, y)


@dataclass(frozen=True)
class MeasureReport:
    total: float
    per_level: list = field(default_factory=list)


@dataclass(frozen=True)
class VertexTerm:
    t: tuple
    s: tuple
    depth: int
    weight: float
    value: float


def _check_sizes(*hps: HierPartition) -> int:
    sizes = {hp.n for hp in hps}
    if len(sizes) != 1:
        raise SizeMismatch(f"universe sizes differ: {sorted(sizes)}")
    return sizes.pop()


def flat_entropy(labels) -> float:
    """Shannon entropy of a membership vector."""
    _, counts = np.unique(np.asarray(labels), return_counts=True)
    n = counts.sum()
    return float(math.log(n) - xlogy(counts, counts).sum() / n)


# -- recursive form ----------------------------------------------------------
def _pair_value(t: Node, s: Node, overlap: frozenset, n: int, depth: int,
                paths, out: list | None) -> float:
    """HMI of the sub-partitions rooted at ``t`` and ``s`` on ``overlap``.

    A leaf facing an internal node is padded by a unary copy of itself, so the
    recursion continues on the other side only. ``paths`` is ``None`` once
    either side is such a padded copy; those pairs are not recorded.
    """
    if t.is_leaf and s.is_leaf:
        value = 0.0
    else:
        t_kids = t.children or (t,)
        s_kids = s.children or (s,)
        m = len(overlap)
        rows = [(i, k.block & overlap) for i, k in enumerate(t_kids)]
        rows = [(i, a) for i, a in rows if a]
        cols = [(j, k.block & overlap) for j, k in enumerate(s_kids)]
        cols = [(j, b) for j, b in cols if b]
        local = 0.0
        sub = 0.0
        for i, a in rows:
            na = len(a)
            for j, b in cols:
                cell = a & b
                if not cell:
                    continue
                c = len(cell)
                local += c * math.log((c * m) / (na * len(b)))
                child_paths = None
                if paths is not None and t.children and s.children:
                    child_paths = (paths[0] + (i,), paths[1] + (j,))
                sub += c * _pair_value(t_kids[i], s_kids[j], cell, n, depth + 1,
                                       child_paths, out)
        value = (local + sub) / m
    if out is not None and paths is not None:
        out.append(VertexTerm(paths[0], paths[1], depth, len(overlap) / n, value))
    return value


def hmi_recursive(T: HierPartition, S: HierPartition) -> float:
    """Hierarchical mutual information by recursion over node pairs."""
    n = _check_sizes(T, S)
    return _pair_value(T.root, S.root, T.root.block & S.root.block, n, 0, None, None)


def vertex_hmi_terms(T: HierPartition, S: HierPartition) -> list[VertexTerm]:
    """Sub-tree HMI for every same-depth pair of overlapping nodes.

    Node ids are paths from the root. The root pair's value is the total HMI.
    Pairs with empty overlap are excluded.
    """
    n = _check_sizes(T, S)
    out: list[VertexTerm] = []
    _pair_value(T.root, S.root, T.root.block & S.root.block, n, 0, ((), ()), out)
    out.reverse()
    return out


# -- level form --------------------------------------------------------------
def padded_levels(hp: HierPartition, depth: int) -> np.ndarray:
    """Level matrix of ``hp`` padded (last row repeated) to ``depth + 1`` rows."""
    lev = hp.level_matrix()
    if lev.shape[0] > depth + 1:
        raise ValueError("cannot pad to a smaller depth")
    if lev.shape[0] < depth + 1:
        pad = np.repeat(lev[-1:], depth + 1 - lev.shape[0], axis=0)
        lev = np.vstack([lev, pad])
    return lev


def _sum_xlogx(x: np.ndarray, y: np.ndarray, kx: int, ky: int) -> np.ndarray:
    """Row-wise sum of ``c ln c`` over the joint counts of label arrays.

    ``x`` and ``y`` have shape ``(batch, n)`` with labels below ``kx``/``ky``.
    """
    batch = x.shape[0]
    width = kx * ky
    codes = x * ky + y + (np.arange(batch, dtype=np.int64) * width)[:, None]
    counts = np.bincount(codes.ravel(), minlength=batch * width).reshape(batch, width)
    return xlogy(counts, counts).sum(axis=1)


def _level_mi_terms(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Per-level conditional MI terms, shape ``(batch, L)``.

    ``A`` and ``B`` are padded level matrices of shape ``(batch, L + 1, n)``.
    Uses ``I(X';Y'|X,Y) = H(X',Y) + H(X,Y') - H(X',Y') - H(X,Y)`` which holds
    because each level refines the previous one.
    """
    batch, rows, n = A.shape
    ka = [int(A[:, l].max()) + 1 for l in range(rows)]
    kb = [int(B[:, l].max()) + 1 for l in range(rows)]
    # sums of c ln c; entropies are ln n - sum/n so ln n cancels in each term
    diag = [_sum_xlogx(A[:, l], B[:, l], ka[l], kb[l]) for l in range(rows)]
    terms = np.empty((batch, rows - 1))
    for l in range(rows - 1):
        h_a1_b0 = _sum_xlogx(A[:, l + 1], B[:, l], ka[l + 1], kb[l])
        h_a0_b1 = _sum_xlogx(A[:, l], B[:, l + 1], ka[l], kb[l + 1])
        # -(s10 + s01 - s11 - s00)/n
        terms[:, l] = (diag[l + 1] + diag[l] - h_a1_b0 - h_a0_b1) / n
        # a side that does not split at this level contributes exactly zero
        still = (A[:, l + 1] == A[:, l]).all(axis=1) | (B[:, l + 1] == B[:, l]).all(axis=1)
        terms[still, l] = 0.0
    return terms


def hmi_levels(T: HierPartition, S: HierPartition) -> MeasureReport:
    """HMI as a level-by-level sum of conditional mutual informations."""
    _check_sizes(T, S)
    L = max(T.max_depth, S.max_depth)
    if L == 0:
        return MeasureReport(0.0, [])
    A = padded_levels(T, L)[None]
    B = padded_levels(S, L)[None]
    terms = _level_mi_terms(A, B)[0]
    per_level = [float(v) for v in terms]
    return MeasureReport(float(math.fsum(per_level)), per_level)


def hmi_batch(T: HierPartition, S: HierPartition, perms: np.ndarray) -> np.ndarray:
    """``I(rho T; S)`` for each row ``rho`` of ``perms`` (1-based images).

    Element ``e`` of ``T`` is relabelled ``rho[e - 1]``.
    """
    _check_sizes(T, S)
    perms = np.atleast_2d(np.asarray(perms, dtype=np.int64))
    batch = perms.shape[0]
    L = max(T.max_depth, S.max_depth)
    if L == 0:
        return np.zeros(batch)
    A = padded_levels(T, L)
    B = padded_levels(S, L)
    # membership of element f in rho T is that of rho^{-1}(f) in T
    inv = np.argsort(perms, axis=1)
    A_perm = A[:, inv].transpose(1, 0, 2)
    B_rep = np.broadcast_to(B, (batch,) + B.shape)
    return _level_mi_terms(A_perm, B_rep).sum(axis=1)


# -- derived measures --------------------------------------------------------
def hentropy(T: HierPartition) -> float:
    """Hierarchical entropy; equals the entropy of the leaf partition."""
    return flat_entropy(T.level_matrix()[-1])


def hje(T: HierPartition, S: HierPartition) -> float:
    return hentropy(T) + hentropy(S) - hmi_recursive(T, S)


def hce(T: HierPartition, S: HierPartition) -> float:
    """Conditional entropy of ``T`` given ``S``."""
    return hentropy(T) - hmi_recursive(T, S)


def _first_seen(labels: np.ndarray) -> np.ndarray:
    # relabel each row by order of first appearance
    out = np.empty_like(labels)
    for r, row in enumerate(labels):
        _, first, inverse = np.unique(row, return_index=True, return_inverse=True)
        out[r] = np.argsort(np.argsort(first))[inverse]
    return out


def hvi(T: HierPartition, S: HierPartition) -> MeasureReport:
    """Hierarchical variation of information with its per-level decomposition.

    Exactly zero when both padded level sequences coincide.
    """
    _check_sizes(T, S)
    L = max(T.max_depth, S.max_depth)
    if L == 0:
        return MeasureReport(0.0, [])
    A = padded_levels(T, L)
    B = padded_levels(S, L)
    if np.array_equal(_first_seen(A), _first_seen(B)):
        return MeasureReport(0.0, [0.0] * L)
    mi = _level_mi_terms(A[None], B[None])[0]
    ha = [flat_entropy(row) for row in A]
    hb = [flat_entropy(row) for row in B]
    per_level = [
        float((ha[l + 1] - ha[l]) + (hb[l + 1] - hb[l]) - 2.0 * mi[l]) for l in range(L)
    ]
    total = hentropy(T) + hentropy(S) - 2.0 * hmi_recursive(T, S)
    return MeasureReport(float(total), per_level)


def hvi_total(T: HierPartition, S: HierPartition) -> float:
    """HVI total alone, without the per-level decomposition."""
    _check_sizes(T, S)
    total = hentropy(T) + hentropy(S) - 2.0 * hmi_recursive(T, S)
    # the smallest non-zero value is 2 ln 2 / n, far above this cutoff
    if abs(total) < 1e-12:
        L = max(T.max_depth, S.max_depth)
        if np.array_equal(_first_seen(padded_levels(T, L)), _first_seen(padded_levels(S, L))):
            return 0.0
    return float(total)


def nhmi(T: HierPartition, S: HierPartition, mean: MeanKind | str = MeanKind.ARITHMETIC) -> float:
    denom = generalized_mean(hentropy(T), hentropy(S), mean)
    if denom <= 0.0:
        raise DegenerateDenominator("mean of hierarchical entropies is zero")
    return hmi_recursive(T, S) / denom


def dn_from_hvi(v: float, n: int) -> float:
    """Metric transform of an HVI value (nats) for universe size ``n``.

    ``1 - 2**(-n V_bits / 2)``, i.e. ``1 - exp(-n V / 2)`` with ``V`` in nats.
    The smallest non-zero HVI is ``2/n`` bits, which puts every distinct pair
    at distance at least ``1/2`` and makes the triangle inequality hold.
    """
    return -math.expm1(-0.5 * n * v)


def dn(T: HierPartition, S: HierPartition) -> float:
    n = _check_sizes(T, S)
    return dn_from_hvi(max(hvi_total(T, S), 0.0), n)


def triangle_defect(T: HierPartition, S: HierPartition, R: HierPartition,
                    measure: str = "hvi") -> float:
    """``m(T,S) + m(S,R) - m(T,R)``; negative values break the triangle inequality."""
    _check_sizes(T, S, R)
    if measure == "hvi":
        m = hvi_total
    elif measure == "dn":
        m = dn
    else:
        raise ValueError(f"unknown measure {measure!r}")
    return m(T, S) + m(S, R) - m(T, R)
