"""Enumeration and random generation of flat and hierarchical partitions."""
from __future__ import annotations

from typing import Iterator

import numpy as np

from .hpart import HierPartition, LevelPartition, Node, serialize

__all__ = [
    "enum_flat_partitions",
    "enum_hier_partitions",
    "random_flat_partition",
    "split_on_splitters",
    "random_hier_partition",
]


def _flat_blocks(n: int) -> Iterator[list[list[int]]]:
    # element n joins each existing block, or opens a new one
    if n == 1:
        yield [[1]]
        return
    for blocks in _flat_blocks(n - 1):
        for i in range(len(blocks)):
            yield blocks[:i] + [blocks[i] + [n]] + blocks[i + 1:]
        yield blocks + [[n]]


def enum_flat_partitions(n: int) -> Iterator[LevelPartition]:
    """All set partitions of ``{1..n}``, each exactly once (Bell(n) of them)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    for blocks in _flat_blocks(n):
        membership = np.empty(n, dtype=np.int64)
        for bid, block in enumerate(blocks):
            membership[np.asarray(block) - 1] = bid
        yield LevelPartition(membership, 1)


def _extensions(node: Node, new: int) -> Iterator[Node]:
    """Every tree obtained by inserting ``new`` at one node of ``node``'s subtree.

    Per node: add to a leaf's block, add a singleton child to an internal
    node, or replace the node by a parent holding it and a singleton.
    """
    single = Node(frozenset((new,)))
    grown = node.block | {new}
    if node.is_leaf:
        yield Node(grown)
    else:
        yield Node(grown, node.children + (single,))
    yield Node(grown, (node, single))
    for i, child in enumerate(node.children):
        for ext in _extensions(child, new):
            kids = node.children[:i] + (ext,) + node.children[i + 1:]
            yield Node(grown, kids)


def enum_hier_partitions(n: int) -> Iterator[HierPartition]:
    """All distinct hierarchical partitions of ``{1..n}`` without unary nodes.

    Built by induction on ``n``; trees reached from several parents are
    yielded once (deduplicated on canonical serialization).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    prev = [HierPartition(Node(frozenset((1,))), 1)]
    if n == 1:
        yield prev[0]
        return
    for size in range(2, n + 1):
        seen: set[str] = set()
        current = []
        for hp in prev:
            for root in _extensions(hp.root, size):
                cand = HierPartition(root, size)
                key = serialize(cand)
                if key in seen:
                    continue
                seen.add(key)
                if size == n:
                    yield cand
                else:
                    current.append(cand)
        prev = current


def split_on_splitters(sequence) -> list[list[int]]:
    """Cut a shuffled sequence at splitter marks (``None`` or ``"|"``).

    Empty parts are dropped: ``[1, 2, "|", 3, "|", "|", 4, 5]`` gives
    ``[[1, 2], [3], [4, 5]]``.
    """
    parts: list[list[int]] = [[]]
    for item in sequence:
        if item is None or item == "|":
            parts.append([])
        else:
            parts[-1].append(item)
    return [p for p in parts if p]


def random_flat_partition(block, rng: np.random.Generator) -> list[list[int]]:
    """Random partition of ``block`` by shuffling elements among ``z`` splitters.

    ``z`` is uniform on ``{0..len(block)}``.
    """
    elements = sorted(block)
    m = len(elements)
    z = int(rng.integers(0, m + 1))
    if z == 0 or m == 1:
        return [elements]
    # splitters are encoded as -1
    seq = np.concatenate([np.asarray(elements, dtype=np.int64), np.full(z, -1, dtype=np.int64)])
    seq = rng.permutation(seq)
    return split_on_splitters([None if v < 0 else int(v) for v in seq])


def _random_node(block, rng, redraw: bool) -> Node:
    if len(block) == 1:
        return Node(frozenset(block))
    parts = random_flat_partition(block, rng)
    while len(parts) == 1:
        if not redraw:
            # a draw that does not divide the block makes it a leaf
            return Node(frozenset(block))
        parts = random_flat_partition(block, rng)
    return Node(frozenset(block), tuple(_random_node(p, rng, redraw) for p in parts))


def random_hier_partition(n: int, rng: np.random.Generator,
                          on_trivial: str = "leaf") -> HierPartition:
    """Random hierarchical partition of ``{1..n}`` by recursive splitting.

    Each block is split with :func:`random_flat_partition`. With
    ``on_trivial="leaf"`` a draw that leaves the block whole ends the recursion
    there; ``"redraw"`` draws again, so every leaf is a singleton. Neither law
    is uniform over hierarchical partitions.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if on_trivial not in ("leaf", "redraw"):
        raise ValueError(f"on_trivial must be 'leaf' or 'redraw', not {on_trivial!r}")
    return HierPartition(_random_node(range(1, n + 1), rng, on_trivial == "redraw"), n)
