"""Hierarchical partitions: representation, parsing, level projection.

A hierarchical partition of ``{1..n}`` is a rooted tree whose nodes carry
blocks of elements; the children of every internal node partition its block.
Nodes are addressed by their *path*, the tuple of child indices leading from
the root (the root is ``()``).

Leaves above the maximum depth are padded: when a level deeper than a leaf is
requested, the leaf contributes its block unchanged, as if it were followed by
a chain of unary copies.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

__all__ = [
    "Node",
    "HierPartition",
    "LevelPartition",
    "PartitionSyntaxError",
    "ValidationError",
    "DepthOutOfRange",
    "SizeMismatch",
    "parse",
    "serialize",
    "validate",
    "level_partition",
    "apply_permutation",
    "canonical_form",
    "check_permutation",
    "read_hp",
    "read_hpl",
    "write_hpl",
]


class PartitionSyntaxError(ValueError):
    """Malformed bracket notation."""


class ValidationError(ValueError):
    """Input does not describe a valid hierarchical partition."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class DepthOutOfRange(IndexError):
    pass


class SizeMismatch(ValueError):
    """Two objects live on universes of different size."""


@dataclass(frozen=True)
class Node:
    block: frozenset
    children: tuple = ()

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def min_element(self) -> int:
        return min(self.block) if self.block else 0


def _make_node(children: Sequence[Node]) -> Node:
    block = frozenset().union(*(c.block for c in children))
    return Node(block, tuple(children))


def _leaf(elements) -> Node:
    return Node(frozenset(elements))


@dataclass(frozen=True, eq=False)
class HierPartition:
    """Immutable hierarchical partition over the universe ``{1..n}``.

    Equality compares the trees with child order taken into account; compare
    ``canonical_form`` results, or serializations, for order-free equality.
    """

    root: Node
    n: int
    _levels: np.ndarray | None = field(default=None, repr=False, compare=False)

    @classmethod
    def from_nested(cls, nested, check: bool = True) -> "HierPartition":
        """Build from nested lists, e.g. ``[[[1, 2], [3]], [4]]``."""
        root = _from_nested(nested)
        hp = cls(root, max(root.block, default=0))
        if check:
            problems = validate(hp)
            if problems:
                raise ValidationError(problems)
        return hp

    @classmethod
    def from_membership(cls, labels) -> "HierPartition":
        """Two-level partition from a flat membership vector (element i+1 -> labels[i])."""
        groups: dict = {}
        for i, lab in enumerate(labels):
            groups.setdefault(lab, []).append(i + 1)
        if len(groups) == 1:
            return cls(_leaf(range(1, len(labels) + 1)), len(labels))
        root = _make_node([_leaf(g) for g in groups.values()])
        return cls(root, len(labels))

    def to_nested(self):
        return _to_nested(self.root)

    # -- structure ---------------------------------------------------------
    @property
    def max_depth(self) -> int:
        return _max_depth(self.root)

    def nodes(self) -> Iterator[tuple[tuple, Node]]:
        """Yield ``(path, node)`` for every node, preorder."""
        stack = [((), self.root)]
        while stack:
            path, node = stack.pop()
            yield path, node
            for i in range(len(node.children) - 1, -1, -1):
                stack.append((path + (i,), node.children[i]))

    def node_at(self, path: Sequence[int]) -> Node:
        node = self.root
        for i in path:
            node = node.children[i]
        return node

    def leaves(self) -> list[Node]:
        return [node for _, node in self.nodes() if node.is_leaf]

    def level_matrix(self) -> np.ndarray:
        """Padded membership labels, shape ``(max_depth + 1, n)``.

        Row ``l`` holds contiguous block ids of the level-``l`` partition for
        elements ``1..n`` (column ``e - 1``). Cached on first use.
        """
        if self._levels is None:
            object.__setattr__(self, "_levels", _level_matrix(self))
        return self._levels

    def __eq__(self, other):
        if not isinstance(other, HierPartition):
            return NotImplemented
        return self.n == other.n and self.root == other.root

    def __hash__(self):
        return hash((self.n, self.root))

    def __str__(self):
        return serialize(self)


@dataclass(frozen=True)
class LevelPartition:
    membership: np.ndarray
    depth: int

    @property
    def n_blocks(self) -> int:
        return int(self.membership.max()) + 1 if len(self.membership) else 0

    def blocks(self) -> list[frozenset]:
        out = [set() for _ in range(self.n_blocks)]
        for i, b in enumerate(self.membership):
            out[b].add(i + 1)
        return [frozenset(b) for b in out]

    def refines(self, coarser: "LevelPartition") -> bool:
        """Every block of ``self`` lies inside one block of ``coarser``."""
        seen: dict = {}
        for a, b in zip(self.membership.tolist(), coarser.membership.tolist()):
            if seen.setdefault(a, b) != b:
                return False
        return True


def _from_nested(obj) -> Node:
    if not isinstance(obj, (list, tuple)):
        raise PartitionSyntaxError(f"expected a list, got {obj!r}")
    if not obj:
        return Node(frozenset())
    if all(isinstance(x, (list, tuple)) for x in obj):
        children = tuple(_from_nested(x) for x in obj)
        block = frozenset().union(*(c.block for c in children))
        return Node(block, children)
    if any(isinstance(x, (list, tuple)) for x in obj):
        raise PartitionSyntaxError("a block mixes elements and sub-blocks")
    elements = [int(x) for x in obj]
    node = Node(frozenset(elements))
    if len(node.block) != len(elements):
        raise ValidationError([f"duplicate element inside leaf {elements}"])
    return node


def _to_nested(node: Node):
    if node.is_leaf:
        return sorted(node.block)
    return [_to_nested(c) for c in node.children]


def _max_depth(node: Node) -> int:
    if node.is_leaf:
        return 0
    return 1 + max(_max_depth(c) for c in node.children)


# -- text format -------------------------------------------------------------
_TOKEN = re.compile(r"\s*(?:(\[)|(\])|(,)|(-?\d+))")


def _tokenize(text: str):
    pos = 0
    tokens = []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise PartitionSyntaxError(f"bad token at offset {pos}: {text[pos:pos + 10]!r}")
        pos = m.end()
        if m.group(1):
            tokens.append("[")
        elif m.group(2):
            tokens.append("]")
        elif m.group(3):
            tokens.append(",")
        else:
            tokens.append(int(m.group(4)))
        # trailing whitespace
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return tokens


def _parse_tokens(tokens):
    stack: list[list] = []
    result = None
    expect_item = True
    for tok in tokens:
        if result is not None:
            raise PartitionSyntaxError("trailing input after closing bracket")
        if tok == "[":
            if not expect_item:
                raise PartitionSyntaxError("missing comma before '['")
            stack.append([])
            expect_item = True
        elif tok == "]":
            if not stack:
                raise PartitionSyntaxError("unbalanced ']'")
            if expect_item and stack[-1]:
                raise PartitionSyntaxError("dangling comma")
            done = stack.pop()
            if stack:
                stack[-1].append(done)
            else:
                result = done
            expect_item = False
        elif tok == ",":
            if expect_item or not stack:
                raise PartitionSyntaxError("unexpected ','")
            expect_item = True
        else:
            if not stack or not expect_item:
                raise PartitionSyntaxError(f"unexpected element {tok}")
            stack[-1].append(tok)
            expect_item = False
    if stack or result is None:
        raise PartitionSyntaxError("unbalanced '['")
    return result


def parse(text: str) -> HierPartition:
    """Parse bracket notation such as ``"[[[1,2],[3]],[4]]"``.

    Raises
    ------
    PartitionSyntaxError
        Unbalanced brackets or an unexpected token.
    ValidationError
        Duplicate or missing elements, empty blocks.
    """
    nested = _parse_tokens(_tokenize(text))
    return HierPartition.from_nested(nested)


def serialize(hp: HierPartition) -> str:
    """Canonical text: children ordered by smallest element, elements ascending."""
    return _ser(canonical_form(hp).root)


def _ser(node: Node) -> str:
    if node.is_leaf:
        return "[" + ",".join(str(e) for e in sorted(node.block)) + "]"
    return "[" + ",".join(_ser(c) for c in node.children) + "]"


def validate(hp: HierPartition) -> list[str]:
    """Return the list of invariant violations; empty means valid."""
    problems: list[str] = []
    n = hp.n
    if hp.root.block != frozenset(range(1, n + 1)):
        missing = sorted(set(range(1, n + 1)) - hp.root.block)
        extra = sorted(hp.root.block - set(range(1, n + 1)))
        problems.append(
            f"root: block is not the universe 1..{n} (missing {missing}, outside {extra})"
        )
    for path, node in hp.nodes():
        if node.is_leaf:
            if not node.block:
                problems.append(f"node {path}: empty leaf block")
            continue
        union: set = set()
        total = 0
        for child in node.children:
            union |= child.block
            total += len(child.block)
        if union != node.block:
            problems.append(f"node {path}: condition (i) violated, children cover "
                            f"{sorted(union)} but block is {sorted(node.block)}")
        if total != len(union):
            problems.append(f"node {path}: condition (ii) violated, children blocks overlap")
    return problems


def level_partition(hp: HierPartition, depth: int) -> LevelPartition:
    if depth < 0 or depth > hp.max_depth:
        raise DepthOutOfRange(f"depth {depth} outside 0..{hp.max_depth}")
    return LevelPartition(hp.level_matrix()[depth].copy(), depth)


def _level_matrix(hp: HierPartition) -> np.ndarray:
    depth = hp.max_depth
    out = np.empty((depth + 1, hp.n), dtype=np.int64)
    frontier = [hp.root]
    for lvl in range(depth + 1):
        nxt = []
        for bid, node in enumerate(frontier):
            idx = np.fromiter(node.block, dtype=np.int64, count=len(node.block)) - 1
            out[lvl, idx] = bid
            nxt.extend(node.children if node.children else (node,))
        frontier = nxt
    return out


def check_permutation(perm, n: int) -> np.ndarray:
    p = np.asarray(perm, dtype=np.int64)
    if p.shape != (n,):
        raise SizeMismatch(f"permutation of length {p.shape} for universe of size {n}")
    if not np.array_equal(np.sort(p), np.arange(1, n + 1)):
        raise ValueError("not a bijection on 1..n")
    return p


def apply_permutation(hp: HierPartition, perm) -> HierPartition:
    """Map every block elementwise: element ``e`` goes to ``perm[e - 1]``."""
    p = check_permutation(perm, hp.n).tolist()

    def walk(node: Node) -> Node:
        if node.is_leaf:
            return Node(frozenset(p[e - 1] for e in node.block))
        return _make_node([walk(c) for c in node.children])

    return HierPartition(walk(hp.root), hp.n)


def canonical_form(hp: HierPartition) -> HierPartition:
    def walk(node: Node) -> Node:
        if node.is_leaf:
            return node
        kids = sorted((walk(c) for c in node.children), key=lambda c: c.min_element)
        return Node(node.block, tuple(kids))

    return HierPartition(walk(hp.root), hp.n)


# -- files -------------------------------------------------------------------
def read_hp(path) -> HierPartition:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def read_hpl(path) -> list[HierPartition]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            out.append(parse(line))
    return out


def write_hpl(path, partitions, header: str | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            for h in header.splitlines():
                fh.write(f"# {h}\n")
        for hp in partitions:
            fh.write(serialize(hp) + "\n")
