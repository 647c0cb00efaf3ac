import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mielab.percolation import (ClusterPartition, FastClusters,
                                apply_cluster_event, cluster_observables)


def chain(n):
    part = ClusterPartition(n)
    for i in range(n - 1):
        part.merge(i, i + 1)
    return part


class TestPartition:
    def test_initial_singletons(self):
        part = ClusterPartition(4)
        assert sorted(part.clusters()) == [[0], [1], [2], [3]]

    def test_merge_and_split(self):
        part = ClusterPartition(4)
        part.merge(0, 1)
        part.merge(1, 2)
        assert sorted(map(sorted, part.clusters())) == [[0, 1, 2], [3]]
        part.split(1)
        assert sorted(map(sorted, part.clusters())) == [[0, 2], [1], [3]]

    def test_merge_idempotent(self):
        part = ClusterPartition(3)
        part.merge(0, 1)
        part.merge(1, 0)
        assert len(part.clusters()) == 2

    def test_split_singleton_noop(self):
        part = ClusterPartition(3)
        before = sorted(map(sorted, part.clusters()))
        part.split(2)
        assert sorted(map(sorted, part.clusters())) == before

    def test_events(self):
        part = ClusterPartition(5)
        apply_cluster_event(part, ("merge", 0, 4))
        apply_cluster_event(part, ("split", 0))
        assert sorted(map(sorted, part.clusters())) == [[0], [1], [2], [3], [4]]
        with pytest.raises(ValueError):
            apply_cluster_event(part, ("swap", 1, 2))

    def test_bounds(self):
        part = ClusterPartition(3)
        with pytest.raises(IndexError):
            part.merge(0, 3)
        with pytest.raises(IndexError):
            part.split(-1)


class TestObservables:
    def test_shared_ghz_cluster(self):
        # one cluster covering exactly A and B: s1 = 1
        part = ClusterPartition(6)
        part.merge(0, 3)
        obs = cluster_observables(part, [0], [3])
        assert obs == {"s1": 1, "s2": 0, "mi_bits": 2,
                       "mie_x_bits": 1, "mie_z_bits": 1}

    def test_cluster_leaking_outside(self):
        # the shared cluster also touches site 5: s2 = 1
        part = ClusterPartition(6)
        part.merge(0, 3)
        part.merge(3, 5)
        obs = cluster_observables(part, [0], [3])
        assert obs == {"s1": 0, "s2": 1, "mi_bits": 1,
                       "mie_x_bits": 1, "mie_z_bits": 0}

    def test_disconnected_regions(self):
        part = ClusterPartition(6)
        part.merge(0, 1)
        part.merge(3, 4)
        obs = part.observables([0, 1], [3, 4])
        assert (obs.s1, obs.s2) == (0, 0)
        assert obs.mi_bits == 0

    def test_mixed_counts(self):
        part = ClusterPartition(8)
        part.merge(0, 4)          # s1 cluster {0, 4}
        part.merge(1, 5)
        part.merge(5, 7)          # s2 cluster {1, 5, 7}
        obs = part.observables([0, 1], [4, 5])
        assert (obs.s1, obs.s2) == (1, 1)
        assert obs.mi_bits == 3
        assert obs.mie_x_bits == 2
        assert obs.mie_z_bits == 1

    def test_overlap_rejected(self):
        part = ClusterPartition(4)
        with pytest.raises(ValueError):
            part.observables([0, 1], [1, 2])

    def test_full_chain(self):
        part = chain(10)
        obs = part.observables([0, 1], [5, 6])
        assert (obs.s1, obs.s2) == (0, 1)
        obs = part.observables(range(5), range(5, 10))
        assert (obs.s1, obs.s2) == (1, 0)


@st.composite
def event_streams(draw):
    n = draw(st.integers(4, 12))
    events = draw(st.lists(
        st.one_of(
            st.tuples(st.just("merge"), st.integers(0, n - 1),
                      st.integers(0, n - 1)),
            st.tuples(st.just("split"), st.integers(0, n - 1)),
        ),
        max_size=60,
    ))
    return n, events


class TestFastClusters:
    @given(event_streams(), st.randoms(use_true_random=False))
    @settings(max_examples=150, deadline=None)
    def test_matches_reference(self, stream, rnd):
        n, events = stream
        ref = ClusterPartition(n)
        fast = FastClusters(n)
        for ev in events:
            apply_cluster_event(ref, ev)
            if ev[0] == "merge":
                fast.merge(ev[1], ev[2])
            else:
                fast.split(ev[1])
        for _ in range(4):
            sites = list(range(n))
            rnd.shuffle(sites)
            k1 = rnd.randrange(1, n - 1)
            k2 = rnd.randrange(k1 + 1, n)
            a, b = sorted(sites[:k1]), sorted(sites[k1:k2])
            want = ref.observables(a, b)
            got = fast.observables(np.asarray(a, np.int64),
                                   np.asarray(b, np.int64))
            assert (got.s1, got.s2) == (want.s1, want.s2)

    def test_growth_under_many_splits(self):
        fast = FastClusters(4)
        ref = ClusterPartition(4)
        for rep in range(200):
            i, j = rep % 4, (rep + 1) % 4
            fast.merge(i, j)
            ref.merge(i, j)
            fast.split(j)
            ref.split(j)
        want = ref.observables([0], [2])
        got = fast.observables(np.array([0], np.int64),
                               np.array([2], np.int64))
        assert (got.s1, got.s2) == (want.s1, want.s2)
