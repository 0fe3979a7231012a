import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings

import oracles
from conftest import partition_pairs
from hierinfo.genpart import enum_hier_partitions, random_hier_partition
from hierinfo.hpart import HierPartition, SizeMismatch, apply_permutation, parse
from hierinfo.infotheory import (
    DegenerateDenominator,
    MeanKind,
    dn,
    dn_from_hvi,
    generalized_mean,
    hce,
    hentropy,
    hje,
    hmi_batch,
    hmi_levels,
    hmi_recursive,
    hvi,
    hvi_total,
    nhmi,
    triangle_defect,
    vertex_hmi_terms,
)
from hierinfo.nullmodel import make_rng

LN2, LN4 = math.log(2), math.log(4)
A, B = "[[1,2],[3]]", "[[1],[2,3]]"
BAL, CROSS = "[[[1],[2]],[[3],[4]]]", "[[[1],[3]],[[2],[4]]]"


def P(s):
    return parse(s)


def random_pairs(n, count, seed, on_trivial="leaf"):
    rng = make_rng(seed, n)
    return [(random_hier_partition(n, rng, on_trivial), random_hier_partition(n, rng, on_trivial))
            for _ in range(count)]


class TestHmiExamples:
    def test_three_cell(self):
        assert hmi_recursive(P(A), P(B)) == pytest.approx(math.log(27 / 16) / 3, abs=1e-12)
        assert hmi_recursive(P(A), P(B)) == pytest.approx(0.17441, abs=1e-5)

    def test_self_is_entropy(self):
        for s in (A, BAL, "[[[1,2],[3]],[4]]"):
            assert hmi_recursive(P(s), P(s)) == pytest.approx(hentropy(P(s)), abs=1e-12)

    def test_independent(self):
        assert hmi_recursive(P("[[1,2],[3,4]]"), P("[[1,3],[2,4]]")) == pytest.approx(0.0, abs=1e-15)

    def test_size_mismatch(self):
        with pytest.raises(SizeMismatch):
            hmi_recursive(P(A), P(BAL))
        with pytest.raises(SizeMismatch):
            hmi_levels(P(A), P(BAL))


class TestLevels:
    def test_balanced_self(self):
        r = hmi_levels(P(BAL), P(BAL))
        assert r.per_level == pytest.approx([LN2, LN2], abs=1e-12)
        assert r.total == pytest.approx(LN4, abs=1e-12)

    def test_crossed(self):
        r = hmi_levels(P(BAL), P(CROSS))
        assert r.per_level == pytest.approx([0.0, 0.0], abs=1e-12)
        assert r.total == pytest.approx(0.0, abs=1e-12)

    def test_depth_mismatch(self):
        assert hmi_levels(P("[1,2]"), P("[[1],[2]]")).total == pytest.approx(0.0, abs=1e-15)
        assert hmi_recursive(P("[1,2]"), P("[[1],[2]]")) == pytest.approx(0.0, abs=1e-15)

    def test_total_is_sum(self):
        for T, S in random_pairs(20, 50, 3):
            r = hmi_levels(T, S)
            assert r.total == pytest.approx(math.fsum(r.per_level), abs=1e-12)


class TestEntropies:
    def test_he(self):
        assert hentropy(P("[1,2,3]")) == 0.0
        assert hentropy(P(A)) == pytest.approx(2 / 3 * math.log(1.5) + math.log(3) / 3, abs=1e-12)
        assert hentropy(P(BAL)) == pytest.approx(LN4, abs=1e-12)

    def test_hje_hce(self):
        assert hje(P(A), P(A)) == pytest.approx(hentropy(P(A)), abs=1e-12)
        assert hce(P(A), P(A)) == pytest.approx(0.0, abs=1e-12)
        assert hje(P(A), P(B)) == pytest.approx(math.log(3), abs=1e-10)
        assert hce(P(A), P("[1,2,3]")) == pytest.approx(hentropy(P(A)), abs=1e-12)

    def test_hje_bounds(self):
        for T, S in random_pairs(15, 100, 4):
            assert hje(T, S) >= max(hentropy(T), hentropy(S)) - 1e-12
            assert hce(T, S) >= -1e-12


class TestHvi:
    def test_examples(self):
        assert hvi(P(A), P(A)).total == pytest.approx(0.0, abs=1e-12)
        assert hvi(P(A), P(B)).total == pytest.approx(0.92420, abs=1e-5)
        assert hvi(P(BAL), P(CROSS)).total == pytest.approx(2 * LN4, abs=1e-12)

    def test_decomposition(self):
        for T, S in random_pairs(30, 100, 5):
            r = hvi(T, S)
            assert all(v >= -1e-12 for v in r.per_level)
            assert r.total == pytest.approx(math.fsum(r.per_level), abs=1e-10)

    def test_total_only_matches(self):
        for T, S in random_pairs(18, 200, 17) + [(P(A), P(A)), (P(BAL), P(CROSS))]:
            assert hvi_total(T, S) == pytest.approx(hvi(T, S).total, abs=1e-12)
        assert hvi_total(P(BAL), P(BAL)) == 0.0

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_zero_iff_same_levels(self, n):
        parts = list(enum_hier_partitions(n))
        for T, S in itertools.product(parts, repeat=2):
            same = np.array_equal(_padded(T, S)[0], _padded(T, S)[1])
            assert (abs(hvi(T, S).total) < 1e-12) == same


def _padded(T, S):
    from hierinfo.infotheory import padded_levels
    L = max(T.max_depth, S.max_depth)
    return padded_levels(T, L), padded_levels(S, L)


class TestNhmi:
    @pytest.mark.parametrize("mean", list(MeanKind))
    def test_self(self, mean):
        assert nhmi(P(A), P(A), mean) == pytest.approx(1.0, abs=1e-12)

    def test_independent(self):
        assert nhmi(P(BAL), P(CROSS)) == pytest.approx(0.0, abs=1e-12)

    def test_arithmetic(self):
        assert nhmi(P(A), P(B), "arithmetic") == pytest.approx(0.27401, abs=1e-5)

    def test_degenerate(self):
        with pytest.raises(DegenerateDenominator):
            nhmi(P("[1,2]"), P("[1,2]"))
        with pytest.raises(DegenerateDenominator):
            nhmi(P("[1,2]"), P("[[1],[2]]"), "geometric")

    @pytest.mark.parametrize("mean", list(MeanKind))
    def test_range(self, mean):
        for T, S in random_pairs(12, 100, 6):
            try:
                v = nhmi(T, S, mean)
            except DegenerateDenominator:
                continue
            assert -1e-12 <= v <= 1 + 1e-9

    def test_mean_bounds(self):
        rng = np.random.default_rng(0)
        for x, y in rng.uniform(0, 5, size=(200, 2)):
            for kind in MeanKind:
                m = generalized_mean(x, y, kind)
                assert min(x, y) - 1e-12 <= m <= max(x, y) + 1e-12


class TestDn:
    def test_identity(self):
        assert dn(P(A), P(A)) == 0.0

    def test_closed_form(self):
        # 1 - 2**(-n V_bits / 2)
        v = hvi(P(A), P(B)).total
        assert dn(P(A), P(B)) == pytest.approx(1 - 2 ** (-3 * (v / LN2) / 2), abs=1e-12)
        assert dn(P(A), P(B)) == pytest.approx(0.75, abs=1e-5)
        assert dn(P(BAL), P(CROSS)) == pytest.approx(1 - 2 ** -8, abs=1e-12)

    def test_range(self):
        for T, S in random_pairs(10, 200, 7):
            d = dn(T, S)
            assert 0.0 <= d < 1.0

    def test_size_mismatch(self):
        with pytest.raises(SizeMismatch):
            dn(P(A), P(BAL))

    def test_nats_reading_breaks_bound(self):
        # the same formula fed with nats would put [1,2] vs [[1],[2]] below 1/2
        v = hvi(P("[1,2]"), P("[[1],[2]]")).total
        assert v == pytest.approx(LN2, abs=1e-12)
        assert 1 - math.exp(-2 * LN2 / 2 * v) < 0.5
        assert dn_from_hvi(v, 2) == pytest.approx(0.5, abs=1e-12)


class TestTriangle:
    def test_counter_example(self, counter_example):
        T, S, R = counter_example
        assert triangle_defect(T, S, R, "hvi") == pytest.approx(-0.17, abs=0.01)

    def test_maximum(self):
        T = P(BAL)
        assert triangle_defect(T, P(CROSS), T, "hvi") == pytest.approx(4 * LN4, abs=1e-10)

    def test_dn_non_negative(self, counter_example):
        assert triangle_defect(*counter_example, measure="dn") >= -1e-12
        for i, (T, S) in enumerate(random_pairs(6, 100, 8)):
            R = random_hier_partition(6, make_rng(9, i))
            assert triangle_defect(T, S, R, "dn") >= -1e-12

    def test_unknown_measure(self, counter_example):
        with pytest.raises(ValueError):
            triangle_defect(*counter_example, measure="nope")


class TestVertexTerms:
    def test_root_is_total(self):
        for T, S in random_pairs(15, 50, 10):
            terms = vertex_hmi_terms(T, S)
            assert terms[0].t == () and terms[0].s == ()
            assert terms[0].value == pytest.approx(hmi_recursive(T, S), abs=1e-12)

    def test_self_pairs_are_subtree_entropies(self):
        T = P("[[[1,2],[3]],[[4],[5],[6,7]]]")
        terms = {(x.t, x.s): x for x in vertex_hmi_terms(T, T)}
        for path, node in T.nodes():
            sub = HierPartition.from_nested(_relabel(T, path))
            assert terms[(path, path)].value == pytest.approx(hentropy(sub), abs=1e-12)
            assert terms[(path, path)].weight == pytest.approx(len(node.block) / T.n)

    def test_leaf_pairs_zero_and_disjoint_absent(self):
        T, S = P("[[[1,2],[3]],[4]]"), P("[[2],[[3],[1,4]]]")
        terms = vertex_hmi_terms(T, S)
        for x in terms:
            t, s = T.node_at(x.t), S.node_at(x.s)
            assert len(x.t) == len(x.s) == x.depth
            assert t.block & s.block
            assert x.weight > 0 and x.value >= -1e-12
            if t.is_leaf and s.is_leaf:
                assert x.value == 0.0
        assert all(not (x.t == (1,) and x.s == (0,)) for x in terms)  # {4} vs {2}


def _relabel(T, path):
    node = T.node_at(path)
    order = {e: i + 1 for i, e in enumerate(sorted(node.block))}

    def walk(x):
        if x.is_leaf:
            return sorted(order[e] for e in x.block)
        return [walk(c) for c in x.children]

    return walk(node)


class TestProperties:
    def test_symmetry(self):
        for T, S in random_pairs(25, 1000, 11):
            assert hmi_recursive(T, S) == pytest.approx(hmi_recursive(S, T), abs=1e-12)
            assert hvi(T, S).total == pytest.approx(hvi(S, T).total, abs=1e-12)
            assert dn(T, S) == pytest.approx(dn(S, T), abs=1e-12)

    @pytest.mark.parametrize("n", [10, 50, 200])
    def test_level_recursive_equivalence(self, n):
        pairs = random_pairs(n, 100, 12) + random_pairs(n, 100, 13, "redraw")
        assert len({max(T.max_depth, S.max_depth) - min(T.max_depth, S.max_depth)
                    for T, S in pairs}) > 1
        for T, S in pairs:
            assert abs(hmi_levels(T, S).total - hmi_recursive(T, S)) <= 1e-10

    def test_oracle_all_pairs_n3(self):
        parts = list(enum_hier_partitions(3))
        for T, S in itertools.product(parts, repeat=2):
            ref = oracles.brute_hmi(T.to_nested(), S.to_nested())
            assert abs(hmi_recursive(T, S) - ref) <= 1e-10
            assert abs(hmi_levels(T, S).total - ref) <= 1e-10

    def test_oracle_random_n12(self):
        for T, S in random_pairs(12, 500, 14):
            ref = oracles.brute_hmi(T.to_nested(), S.to_nested())
            assert abs(hmi_recursive(T, S) - ref) <= 1e-10
            assert abs(hmi_levels(T, S).total - ref) <= 1e-10
            assert hentropy(T) == pytest.approx(oracles.brute_entropy(T.to_nested()), abs=1e-12)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_bounds_enumerated(self, n):
        parts = list(enum_hier_partitions(n))
        H = [hentropy(p) for p in parts]
        for (i, T), (j, S) in itertools.product(enumerate(parts), repeat=2):
            v = hmi_recursive(T, S)
            assert -1e-12 <= v <= min(H[i], H[j]) + 1e-12
        for p, h in zip(parts, H):
            assert abs(hmi_recursive(p, p) - h) <= 1e-12

    def test_level_terms_non_negative(self):
        for T, S in random_pairs(40, 200, 15):
            assert all(v >= -1e-12 for v in hmi_levels(T, S).per_level)

    def test_batch_matches_permuted(self):
        rng = make_rng(16)
        T, S = random_pairs(9, 1, 16)[0]
        perms = np.stack([rng.permutation(9) + 1 for _ in range(40)])
        got = hmi_batch(T, S, perms)
        want = [hmi_recursive(apply_permutation(T, p), S) for p in perms]
        assert np.allclose(got, want, atol=1e-12)

    @settings(max_examples=150, deadline=None)
    @given(partition_pairs())
    def test_hypothesis_pairs(self, pair):
        T, S = (HierPartition.from_nested(x) for x in pair)
        i = hmi_recursive(T, S)
        assert abs(i - oracles.brute_hmi(pair[0], pair[1])) <= 1e-10
        assert abs(hmi_levels(T, S).total - i) <= 1e-10
        assert -1e-12 <= i <= min(hentropy(T), hentropy(S)) + 1e-12
        assert hvi(T, S).total >= -1e-12
