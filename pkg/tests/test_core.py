import math

import numpy as np
import pytest
import scipy.stats

from ra_sim.core import (
    DegreeDistribution,
    FrameConfig,
    ProtocolConfig,
    ProtocolKind,
    REFERENCE_DISTRIBUTION,
    TransmissionSchedule,
    avg_degree,
    edge_perspective,
    format_distribution,
    generate_schedule,
    inject_schedule,
    parse_distribution,
)


def dist(*entries, name=""):
    return DegreeDistribution(tuple(entries), name=name)


class TestDegreeDistribution:
    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            DegreeDistribution(())

    @pytest.mark.parametrize("entries", [
        ((0, 1.0),),                    # degree below 1
        ((2, 0.5), (2, 0.5)),           # duplicate degree
        ((2, 0.5), (3, 0.6)),           # sums to 1.1
        ((2, 1.5),),                    # probability above 1
        ((2, 0.0), (3, 1.0)),           # zero probability entry
    ])
    def test_rejects_invalid(self, entries):
        with pytest.raises(ValueError):
            DegreeDistribution(entries)

    def test_reference_distribution(self):
        assert REFERENCE_DISTRIBUTION.entries == ((2, 0.5), (3, 0.28), (8, 0.22))
        assert REFERENCE_DISTRIBUTION.max_degree == 8
        assert REFERENCE_DISTRIBUTION.min_degree == 2


class TestAvgDegree:
    def test_constant_two(self):
        assert avg_degree(dist((2, 1.0))) == 2.0

    def test_slotted_aloha(self):
        assert avg_degree(dist((1, 1.0))) == 1.0

    def test_reference(self):
        # by hand: 2*0.5 + 3*0.28 + 8*0.22 = 1.0 + 0.84 + 1.76
        assert avg_degree(REFERENCE_DISTRIBUTION) == pytest.approx(3.6, abs=1e-12)


class TestEdgePerspective:
    def test_constant_maps_to_itself(self):
        assert edge_perspective(dist((3, 1.0))).entries == ((3, 1.0),)

    def test_two_degree_mix(self):
        # avg = 2, so weights are 1*0.5/2 and 3*0.5/2
        out = edge_perspective(dist((1, 0.5), (3, 0.5)))
        assert out.entries[0] == (1, pytest.approx(0.25, abs=1e-12))
        assert out.entries[1] == (3, pytest.approx(0.75, abs=1e-12))

    def test_probabilities_sum_to_one(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            k = rng.integers(1, 6)
            degrees = rng.choice(np.arange(1, 12), size=k, replace=False)
            probs = rng.dirichlet(np.ones(k))
            d = DegreeDistribution(tuple(zip(degrees.tolist(), probs.tolist())))
            total = sum(p for _, p in edge_perspective(d).entries)
            assert total == pytest.approx(1.0, abs=1e-9)


class TestDistributionLiteral:
    def test_parse_reference(self):
        d = parse_distribution("2:0.5,3:0.28,8:0.22")
        assert d.entries == REFERENCE_DISTRIBUTION.entries

    def test_round_trip(self):
        text = format_distribution(REFERENCE_DISTRIBUTION)
        assert parse_distribution(text).entries == REFERENCE_DISTRIBUTION.entries

    def test_renormalizes_within_tolerance(self):
        d = parse_distribution("1:0.5,2:0.4999996")
        assert sum(p for _, p in d.entries) == pytest.approx(1.0, abs=1e-12)

    def test_rejects_badly_normalized(self):
        with pytest.raises(ValueError):
            parse_distribution("2:0.7,3:0.5")

    @pytest.mark.parametrize("text", ["", "2", "2:0.5,,3:0.5", "x:1.0", "2:1.0:3"])
    def test_rejects_malformed(self, text):
        with pytest.raises(ValueError):
            parse_distribution(text)


class TestProtocolConfig:
    def test_slotted_aloha_is_degree_one(self):
        cfg = ProtocolConfig.slotted_aloha()
        assert cfg.distribution.entries == ((1, 1.0),)

    def test_slotted_aloha_rejects_other_distributions(self):
        with pytest.raises(ValueError):
            ProtocolConfig(ProtocolKind.SLOTTED_ALOHA, dist((2, 1.0)))

    def test_crdsa_requires_constant_degree(self):
        with pytest.raises(ValueError):
            ProtocolConfig(ProtocolKind.CRDSA, REFERENCE_DISTRIBUTION)
        with pytest.raises(ValueError):
            ProtocolConfig(ProtocolKind.CRDSA, dist((1, 1.0)))
        assert ProtocolConfig.crdsa(3).distribution.entries == ((3, 1.0),)

    def test_csa_k_bounds(self):
        d = dist((3, 0.5), (4, 0.5))
        assert ProtocolConfig.csa(d, 2).csa_k == 2
        assert ProtocolConfig.csa(d, 3).csa_k == 3
        with pytest.raises(ValueError):
            ProtocolConfig.csa(d, 4)  # above min degree
        with pytest.raises(ValueError):
            ProtocolConfig.csa(d, 0)
        with pytest.raises(ValueError):
            ProtocolConfig(ProtocolKind.CSA, d)  # missing csa_k

    def test_csa_k_rejected_elsewhere(self):
        with pytest.raises(ValueError):
            ProtocolConfig(ProtocolKind.IRSA, REFERENCE_DISTRIBUTION, csa_k=2)


class TestFrameConfig:
    def test_load_is_derived(self):
        cfg = FrameConfig(200, 100, ProtocolConfig.slotted_aloha())
        assert cfg.load == pytest.approx(0.5)

    def test_rejects_degree_above_frame(self):
        with pytest.raises(ValueError):
            FrameConfig(4, 10, ProtocolConfig.irsa())  # max degree 8 > 4 slots

    def test_rejects_bad_counts(self):
        with pytest.raises(ValueError):
            FrameConfig(0, 1, ProtocolConfig.slotted_aloha())
        with pytest.raises(ValueError):
            FrameConfig(5, -1, ProtocolConfig.slotted_aloha())


class TestInjectSchedule:
    def test_accepts_demo_placement(self):
        # occupancy by hand: slots 3 and 4 are the only clean ones
        s = inject_schedule(5, [(0, 1), (1, 2), (2, 3), (4, 0)])
        per_slot = [0] * 5
        for slots in s.placements:
            for t in slots:
                per_slot[t] += 1
        assert per_slot == [2, 2, 2, 1, 1]

    def test_rejects_duplicate_slot(self):
        with pytest.raises(ValueError):
            inject_schedule(5, [(0, 0)])

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            inject_schedule(5, [(7,)])


def crdsa_frame(n_slots, n_users, degree=2):
    return FrameConfig(n_slots, n_users, ProtocolConfig.crdsa(degree))


class TestGenerateSchedule:
    def test_no_users(self):
        s = generate_schedule(crdsa_frame(10, 0), seed=1)
        assert s.placements == ()

    def test_slotted_aloha_degree_one(self):
        cfg = FrameConfig(20, 5, ProtocolConfig.slotted_aloha())
        s = generate_schedule(cfg, seed=3)
        assert all(len(p) == 1 for p in s.placements)

    def test_deterministic(self):
        cfg = FrameConfig(50, 40, ProtocolConfig.irsa())
        a = generate_schedule(cfg, seed=99)
        b = generate_schedule(cfg, seed=99)
        assert a.placements == b.placements
        assert a.placements != generate_schedule(cfg, seed=100).placements

    def test_invariants_over_random_configs(self):
        rng = np.random.default_rng(11)
        protocols = [
            ProtocolConfig.slotted_aloha(),
            ProtocolConfig.crdsa(2),
            ProtocolConfig.irsa(),
            ProtocolConfig.csa(dist((2, 0.6), (3, 0.4)), 2),
        ]
        for i in range(200):
            protocol = protocols[i % len(protocols)]
            n_slots = int(rng.integers(protocol.distribution.max_degree, 40))
            n_users = int(rng.integers(0, 30))
            cfg = FrameConfig(n_slots, n_users, protocol)
            s = generate_schedule(cfg, seed=int(rng.integers(0, 2**63)))
            assert s.n_users == n_users
            support = {d for d, _ in protocol.distribution.entries}
            for slots in s.placements:
                assert len(slots) in support
                assert len(set(slots)) == len(slots)
                assert all(0 <= t < n_slots for t in slots)

    def test_flat_edges_match_placements(self):
        cfg = FrameConfig(30, 25, ProtocolConfig.irsa())
        s = generate_schedule(cfg, seed=4)
        users, slots = s.flat_edges()
        pairs = sorted(zip(users.tolist(), slots.tolist()))
        expected = sorted(
            (u, t) for u, p in enumerate(s.placements) for t in p
        )
        assert pairs == expected

    def test_degree_fidelity(self):
        # empirical frequency of each degree within 3 sigma over 1e5 users
        n = 100_000
        cfg = FrameConfig(100, n, ProtocolConfig.irsa())
        s = generate_schedule(cfg, seed=2024)
        counts = {}
        for p in s.placements:
            counts[len(p)] = counts.get(len(p), 0) + 1
        for d, prob in REFERENCE_DISTRIBUTION.entries:
            bound = 3 * math.sqrt(prob * (1 - prob) / n)
            assert abs(counts[d] / n - prob) < bound

    def test_per_slot_occupancy_is_poisson(self):
        # CRDSA degree 2, G = 100: per-slot replica counts over many seeds
        # should fit Poisson(2G) by chi-square at the 1% level
        n_slots, n_users = 100, 10_000
        cfg = crdsa_frame(n_slots, n_users)
        observations = []
        for seed in range(40):
            s = generate_schedule(cfg, seed=seed)
            per_slot = np.zeros(n_slots, dtype=int)
            _, slots = s.flat_edges()
            np.add.at(per_slot, slots, 1)
            observations.extend(per_slot.tolist())
        observations = np.array(observations)
        mean = 2 * n_users / n_slots
        lo, hi = int(observations.min()), int(observations.max())
        support = np.arange(lo, hi + 1)
        pmf = scipy.stats.poisson.pmf(support, mean)
        # merge tail bins until every expected count is at least 5
        total = observations.size
        obs_hist = np.array([(observations == v).sum() for v in support])
        exp_hist = pmf * total
        while exp_hist.size > 2 and exp_hist[0] < 5:
            exp_hist[1] += exp_hist[0]
            obs_hist[1] += obs_hist[0]
            exp_hist, obs_hist = exp_hist[1:], obs_hist[1:]
        while exp_hist.size > 2 and exp_hist[-1] < 5:
            exp_hist[-2] += exp_hist[-1]
            obs_hist[-2] += obs_hist[-1]
            exp_hist, obs_hist = exp_hist[:-1], obs_hist[:-1]
        exp_hist *= obs_hist.sum() / exp_hist.sum()
        stat, pvalue = scipy.stats.chisquare(obs_hist, exp_hist)
        assert pvalue > 0.01


class TestTransmissionSchedule:
    def test_flat_edges_without_cache(self):
        s = inject_schedule(5, [(0, 1), (2,)])
        users, slots = s.flat_edges()
        assert users.tolist() == [0, 0, 1]
        assert slots.tolist() == [0, 1, 2]

    def test_rejects_invalid_flat_cache(self):
        users = np.array([0, 0], dtype=np.int64)
        slots = np.array([1, 1], dtype=np.int64)
        with pytest.raises(ValueError):
            TransmissionSchedule(5, ((1, 1),), _flat=(users, slots))
