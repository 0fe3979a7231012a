"""Hierarchical clustering under uncertain features.

Missing boolean cells are completed in every possible way; each completion is
clustered by average linkage (UPGMA) under the Manhattan distance and turned
into a hierarchical partition. The ensemble is summarised by its
eccentricity-minimising member and per-vertex HMI statistics.
"""
from __future__ import annotations

import csv
import hashlib
import io
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Iterator

import numpy as np

from .hpart import HierPartition, Node
from .infotheory import hvi_total, vertex_hmi_terms

__all__ = [
    "MISSING",
    "ParseError",
    "DuplicateLabel",
    "TooManyMissing",
    "IncompleteMatrix",
    "FeatureMatrix",
    "Merge",
    "Dendrogram",
    "Member",
    "Ensemble",
    "VertexStat",
    "load_dataset",
    "animals_path",
    "file_sha256",
    "completions",
    "manhattan",
    "average_linkage",
    "dendro_to_hpart",
    "build_ensemble",
    "eccentricity",
    "central",
    "vertex_stats",
]

MISSING = -1
MAX_MISSING = 20
ANIMALS_SHA256 = "2ce4d162f50126823f4401d83b1efdc8b31670c4471a9fa0529d7a8adc7261cf"


class ParseError(ValueError):
    pass


class DuplicateLabel(ValueError):
    pass


class TooManyMissing(ValueError):
    pass


class IncompleteMatrix(ValueError):
    pass


@dataclass(frozen=True)
class FeatureMatrix:
    row_labels: tuple
    col_labels: tuple
    values: np.ndarray  # int8, MISSING where unspecified

    @property
    def missing(self) -> list[tuple[int, int]]:
        """Missing cells as ``(row, col)``, row-major."""
        rows, cols = np.nonzero(self.values == MISSING)
        return list(zip(rows.tolist(), cols.tolist()))

    @property
    def is_complete(self) -> bool:
        return not (self.values == MISSING).any()


def animals_path() -> Path:
    return Path(str(resources.files("hierinfo") / "data" / "animals.csv"))


def file_sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def load_dataset(path) -> FeatureMatrix:
    """Read a CSV with a header row; first column labels, then 0/1/``?`` cells.

    Lines starting with ``#`` are comments.
    """
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    reader = csv.reader(io.StringIO("\n".join(lines)))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError(f"{path}: empty file") from None
    if len(header) < 2:
        raise ParseError(f"{path}: need a label column and at least one feature")
    labels, rows = [], []
    for lineno, rec in enumerate(reader, start=2):
        rec = [c.strip() for c in rec]
        if len(rec) != len(header):
            raise ParseError(f"{path}:{lineno}: expected {len(header)} fields, got {len(rec)}")
        row = []
        for cell in rec[1:]:
            if cell == "?":
                row.append(MISSING)
            elif cell in ("0", "1"):
                row.append(int(cell))
            else:
                raise ParseError(f"{path}:{lineno}: bad value {cell!r}")
        if rec[0] in labels:
            raise DuplicateLabel(rec[0])
        labels.append(rec[0])
        rows.append(row)
    if not rows:
        raise ParseError(f"{path}: no data rows")
    return FeatureMatrix(tuple(labels), tuple(h.strip() for h in header[1:]),
                         np.asarray(rows, dtype=np.int8))


def completion_bits(index: int, m: int) -> tuple:
    # first missing cell is the most significant bit
    return tuple((index >> (m - 1 - j)) & 1 for j in range(m))


def completions(fm: FeatureMatrix) -> Iterator[FeatureMatrix]:
    """All ``2**m`` completions of the missing cells, in truth-table order."""
    cells = fm.missing
    m = len(cells)
    if m > MAX_MISSING:
        raise TooManyMissing(f"{m} missing cells (limit {MAX_MISSING})")
    for index in range(2 ** m):
        values = fm.values.copy()
        for (r, c), bit in zip(cells, completion_bits(index, m)):
            values[r, c] = bit
        yield replace(fm, values=values)


def manhattan(fm: FeatureMatrix, i: int, j: int) -> int:
    if not fm.is_complete:
        raise IncompleteMatrix("matrix has missing cells")
    return int(np.abs(fm.values[i].astype(int) - fm.values[j].astype(int)).sum())


@dataclass(frozen=True)
class Merge:
    left: int
    right: int
    height: float


@dataclass(frozen=True)
class Dendrogram:
    merges: tuple
    n_leaves: int


def average_linkage(fm: FeatureMatrix) -> Dendrogram:
    """UPGMA agglomeration with exact rational distances.

    Clusters ``0..n-1`` are the rows; the k-th merge creates cluster ``n + k``.
    The closest pair merges first; ties go to the lexicographically smallest
    ``(smaller id, larger id)``.
    """
    if not fm.is_complete:
        raise IncompleteMatrix("matrix has missing cells")
    n = len(fm.row_labels)
    if n < 2:
        raise ValueError("need at least two rows")
    vals = fm.values.astype(int)
    dist: dict[tuple[int, int], Fraction] = {}
    for i in range(n):
        for j in range(i + 1, n):
            dist[(i, j)] = Fraction(int(np.abs(vals[i] - vals[j]).sum()))
    size = {i: 1 for i in range(n)}
    merges = []
    for k in range(n - 1):
        (a, b), h = min(dist.items(), key=lambda kv: (kv[1], kv[0]))
        new = n + k
        merges.append(Merge(a, b, float(h)))
        sa, sb = size.pop(a), size.pop(b)
        others = list(size)
        updated = {}
        for c in others:
            dac = dist[(min(a, c), max(a, c))]
            dbc = dist[(min(b, c), max(b, c))]
            updated[(c, new)] = (sa * dac + sb * dbc) / (sa + sb)
        dist = {key: d for key, d in dist.items() if a not in key and b not in key}
        dist.update(updated)
        size[new] = sa + sb
    return Dendrogram(tuple(merges), n)


def dendro_to_hpart(d: Dendrogram, tol: float = 1e-9) -> HierPartition:
    """Drop heights; merges within ``tol`` of their parent's height are fused.

    Row ``i`` becomes element ``i + 1``.
    """
    n = d.n_leaves
    nodes: dict[int, Node] = {i: Node(frozenset((i + 1,))) for i in range(n)}
    heights: dict[int, float] = {}
    for k, mg in enumerate(d.merges):
        kids: list[Node] = []
        for c in (mg.left, mg.right):
            if c >= n and abs(heights[c] - mg.height) <= tol:
                kids.extend(nodes[c].children)
            else:
                kids.append(nodes[c])
        cid = n + k
        nodes[cid] = Node(frozenset().union(*(x.block for x in kids)), tuple(kids))
        heights[cid] = mg.height
        del nodes[mg.left], nodes[mg.right]
    (root,) = nodes.values()
    return HierPartition(root, n)


@dataclass(frozen=True)
class Member:
    completion_bits: tuple
    partition: HierPartition


@dataclass(frozen=True)
class Ensemble:
    members: tuple
    missing_cells: tuple = ()


def build_ensemble(fm: FeatureMatrix) -> Ensemble:
    cells = fm.missing
    members = []
    for index, full in enumerate(completions(fm)):
        hp = dendro_to_hpart(average_linkage(full))
        members.append(Member(completion_bits(index, len(cells)), hp))
    return Ensemble(tuple(members), tuple(cells))


def hvi_matrix(e: Ensemble) -> np.ndarray:
    parts = [m.partition for m in e.members]
    k = len(parts)
    out = np.zeros((k, k))
    for a in range(k):
        for b in range(a + 1, k):
            out[a, b] = out[b, a] = hvi_total(parts[a], parts[b])
    return out


def eccentricity(e: Ensemble) -> list[float]:
    """Average HVI of each member to all members, itself included."""
    if not e.members:
        raise ValueError("empty ensemble")
    V = hvi_matrix(e)
    return [float(math.fsum(row) / len(row)) for row in V]


def central(e: Ensemble, ecc: list[float] | None = None) -> int:
    """Index of the least eccentric member; the lowest index wins ties."""
    ecc = eccentricity(e) if ecc is None else ecc
    best = min(ecc)
    return next(i for i, c in enumerate(ecc) if c <= best + 1e-12)


@dataclass(frozen=True)
class VertexStat:
    path: tuple
    depth: int
    count: int
    mean: float
    stddev: float
    cv: float | None


def vertex_stats(central_hp: HierPartition, e: Ensemble) -> list[VertexStat]:
    """Mean, population stddev and stddev/mean of sub-tree HMI per vertex.

    For each vertex ``t`` of ``central_hp`` the values of every same-depth,
    overlapping vertex of every member are pooled.
    """
    pooled: dict[tuple, list[float]] = {path: [] for path, _ in central_hp.nodes()}
    for m in e.members:
        for term in vertex_hmi_terms(central_hp, m.partition):
            pooled[term.t].append(term.value)
    out = []
    for path, _ in central_hp.nodes():
        vals = np.asarray(pooled[path])
        if len(vals) == 0:
            out.append(VertexStat(path, len(path), 0, 0.0, 0.0, None))
            continue
        mean = float(vals.mean())
        std = float(vals.std())
        cv = std / mean if mean > 0 else None
        out.append(VertexStat(path, len(path), len(vals), mean, std, cv))
    return out
