"""Tree construction, geometry, center of mass, rerooting, text format."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import treecut as T
from treecut.errors import (CycleError, ParentIndexError, RootCountError,
                            TreeFormatError, ValidationError)

from util import (best_center_split, brute_depth, brute_max_edge_load,
                  brute_path_load, brute_subtree_size, brute_tail_value,
                  random_tree)

# the 14-site tree from the contour illustration: root with four branches
FIG_PARENTS = [-1, 0, 0, 0, 0, 1, 2, 3, 4, 5, 5, 5, 11, 7]


class TestFromParents:
    def test_single_vertex(self):
        t = T.from_parents(1, [None])
        assert t.n == 1 and t.root == 0 and t.height == 0

    def test_three_chain(self):
        t = T.from_parents(3, [None, 0, 1])
        assert t.root == 0
        assert t.parent.tolist() == [-1, 0, 1]
        assert [list(t.children(v)) for v in range(3)] == [[1], [2], []]

    def test_cycle_error(self):
        with pytest.raises(CycleError):
            T.from_parents(4, [-1, 2, 3, 1])

    def test_root_count_errors(self):
        with pytest.raises(RootCountError):
            T.from_parents(3, [1, 0, 0])  # cycle 0<->1 and no sentinel
        with pytest.raises(RootCountError):
            T.from_parents(3, [-1, -1, 0])

    def test_index_error(self):
        with pytest.raises(ParentIndexError):
            T.from_parents(3, [-1, 5, 0])
        with pytest.raises(ParentIndexError):
            T.from_parents(3, [-1, -3, 0])

    def test_bad_length(self):
        with pytest.raises(ValidationError):
            T.from_parents(3, [-1, 0])

    def test_children_sorted(self):
        t = T.from_parents(5, [-1, 0, 0, 0, 2])
        assert list(t.children(0)) == [1, 2, 3]


class TestMetrics:
    def test_path_of_three(self):
        m = T.compute_metrics(T.segment(2))
        assert m.subtree_size.tolist() == [3, 2, 1]
        assert m.path_load.tolist() == [0, 2, 3]
        assert m.diameter == 2

    def test_star(self):
        m = T.compute_metrics(T.spherically_symmetric([3]))
        assert m.depth.max() == 1
        assert m.diameter == 2
        assert m.max_degree == 3

    def test_depth_sum_equals_subtree_sum(self):
        # two independent traversals of the same double-counting identity
        t = T.from_parents(len(FIG_PARENTS), FIG_PARENTS)
        depth_total = sum(brute_depth(t, v) for v in range(t.n))
        size_total = sum(brute_subtree_size(t, v) for v in range(t.n)
                         if t.parent[v] >= 0)
        assert depth_total == size_total
        m = T.compute_metrics(t)
        assert m.depth.sum() == depth_total
        assert m.subtree_size[t.parent >= 0].sum() == size_total

    def test_path_load_recurrence(self, small_suite):
        for t in small_suite:
            m = T.compute_metrics(t)
            for v in range(t.n):
                p = int(t.parent[v])
                if p >= 0:
                    assert m.path_load[v] == m.path_load[p] + m.subtree_size[v]

    @given(n=st.integers(2, 40), seed=st.integers(0, 2**32), tall=st.booleans())
    @settings(max_examples=60, deadline=None)
    def test_subtree_recurrence(self, n, seed, tall):
        t = random_tree(n, seed, tall)
        m = T.compute_metrics(t)
        for v in range(t.n):
            kids = t.children(v)
            assert m.subtree_size[v] == 1 + m.subtree_size[kids].sum()
        assert m.subtree_size[t.root] == t.n


class TestLoads:
    def test_edge_load_path(self):
        # three edges from the root: loads k*(4-k) for k=1..3
        m = T.compute_metrics(T.segment(3))
        assert T.max_edge_load(m) == (4, 2)

    def test_edge_load_star(self):
        m = T.compute_metrics(T.spherically_symmetric([5]))
        assert T.max_edge_load(m).value == 1

    def test_edge_load_single_vertex(self):
        m = T.compute_metrics(T.from_parents(1, [-1]))
        assert T.max_edge_load(m) == (0, None)
        assert T.max_path_load(m).value == 0

    def test_edge_load_against_brute_force(self):
        t = random_tree(50, seed=31337)
        m = T.compute_metrics(t)
        assert T.max_edge_load(m).value == brute_max_edge_load(t)

    def test_path_load_values(self):
        m = T.compute_metrics(T.segment(2))
        assert T.max_path_load(m) == (3, 2)

    def test_path_load_against_brute_force(self):
        t = random_tree(50, seed=99, tall=True)
        m = T.compute_metrics(t)
        assert T.max_path_load(m).value == max(brute_path_load(t, v)
                                               for v in range(t.n))

    def test_tail_profile_path(self):
        tp = T.tail_profile(T.compute_metrics(T.segment(3)))
        assert tp.table.tolist() == [0, 3, 4, 3]
        assert (tp.value, tp.k) == (4, 2)

    def test_tail_profile_star(self):
        tp = T.tail_profile(T.compute_metrics(T.spherically_symmetric([7])))
        assert tp.value == 7

    def test_tail_profile_against_brute_force(self):
        t = T.cor15_tree(64)
        assert T.tail_profile(T.compute_metrics(t)).value == brute_tail_value(t)


class TestCenterOfMass:
    def test_path_of_three(self):
        c = T.center_of_mass(T.segment(2))
        assert c.vertex == 1
        assert {len(c.part_a), len(c.part_b)} == {2}
        assert c.delta == pytest.approx(2 / 3)

    def test_star_with_four_leaves(self):
        c = T.center_of_mass(T.spherically_symmetric([4]))
        assert c.vertex == 0
        assert len(c.part_a) == 3 and len(c.part_b) == 3
        assert c.part_a & c.part_b == {0}
        assert c.delta == pytest.approx(3 / 5)

    def test_single_vertex(self):
        c = T.center_of_mass(T.from_parents(1, [-1]))
        assert c.part_a == c.part_b == frozenset({0})

    def test_forced_vertex(self):
        t = T.segment(4)
        c = T.center_of_mass(t, at=0)
        assert c.vertex == 0 and c.delta == pytest.approx(1 / 5)

    def test_random_suite_against_exhaustive(self):
        for i in range(200):
            n = 2 + i % 39
            t = random_tree(n, seed=1000 + i, tall=i % 3 == 0)
            c = T.center_of_mass(t)
            # validity: parts cover, overlap only in the split vertex
            assert c.part_a | c.part_b == set(range(n))
            assert c.part_a & c.part_b == {c.vertex}
            assert min(len(c.part_a), len(c.part_b)) >= -(-n // 3)  # ceil(n/3)
            assert c.delta <= best_center_split(t) + 1e-12

    def test_parts_induce_subtrees(self):
        for seed in (4, 14, 24):
            t = random_tree(25, seed=seed)
            c = T.center_of_mass(t)
            adj = [[] for _ in range(t.n)]
            for v in range(t.n):
                p = int(t.parent[v])
                if p >= 0:
                    adj[v].append(p)
                    adj[p].append(v)
            for part in (c.part_a, c.part_b):
                # connected within the part when entered at the split vertex
                seen = {c.vertex}
                stack = [c.vertex]
                while stack:
                    u = stack.pop()
                    for w in adj[u]:
                        if w in part and w not in seen:
                            seen.add(w)
                            stack.append(w)
                assert seen == part


class TestReroot:
    def test_identity(self):
        t = T.segment(3)
        assert T.reroot(t, t.root) is t

    def test_path_middle(self):
        t = T.reroot(T.segment(2), 1)
        assert t.root == 1
        assert sorted(t.children(1)) == [0, 2]

    def test_degree_multiset_and_diameter_preserved(self, small_suite):
        for t in small_suite[:15]:
            m = T.compute_metrics(t)
            r = T.reroot(t, t.n - 1)
            mr = T.compute_metrics(r)
            assert sorted(m.degree.tolist()) == sorted(mr.degree.tolist())
            assert m.diameter == mr.diameter

    def test_gap_invariant_under_reroot(self, small_suite):
        for t in small_suite[:10]:
            g0 = T.spectrum(t).gap
            g1 = T.spectrum(T.reroot(t, t.n - 1)).gap
            assert abs(g0 - g1) < 1e-10


class TestTextFormat:
    def test_round_trip(self):
        t = random_tree(17, seed=5)
        assert T.to_text(T.from_text(T.to_text(t))) == T.to_text(t)

    def test_canonical_example(self):
        assert T.to_text(T.segment(3)) == "4\n-1 0 1 2\n"

    def test_rejects_trailing_tokens(self):
        with pytest.raises(TreeFormatError):
            T.from_text("2\n-1 0 0\n")
        with pytest.raises(TreeFormatError):
            T.from_text("2\n-1 0\n7\n")

    def test_rejects_malformed(self):
        with pytest.raises(TreeFormatError):
            T.from_text("x\n-1\n")
        with pytest.raises(TreeFormatError):
            T.from_text("2\n-1 zebra\n")
        with pytest.raises(TreeFormatError):
            T.from_text("3\n-1 0\n")

    def test_allows_trailing_newline_only(self):
        t = T.from_text("3\n-1 0 1\n\n")
        assert t.n == 3


def test_root_path():
    t = T.segment(4)
    assert T.root_path(t, 3) == [0, 1, 2, 3]
    assert T.root_path(t, 0) == [0]
