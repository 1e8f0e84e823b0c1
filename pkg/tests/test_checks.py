import random
from fractions import Fraction

import fincomplete as fc
from fincomplete import (
    FiniteModel,
    Partition,
    SubmodelRef,
    are_independent,
    basu_consistency,
    is_ancillary,
    is_boundedly_complete,
    is_complete,
    is_homogeneous,
    is_minimal_sufficient,
    is_sufficient,
    join,
    meet,
    minimal_sufficient_partition,
    power_model,
    product_model,
    support_union,
)

from conftest import (
    all_partitions,
    bernoulli_pair_grid,
    coin,
    coin_family,
    oracle_is_complete,
    valid_incompleteness_witness,
)


def random_small_model(rng, max_points=4, max_params=4):
    n = rng.randint(1, max_points)
    k = rng.randint(1, max_params)
    rows = []
    for _ in range(k):
        while True:
            raw = [Fraction(rng.randint(0, 6)) for _ in range(n)]
            if sum(raw) > 0:
                rows.append(tuple(w / sum(raw) for w in raw))
                break
    return FiniteModel(
        tuple(f"x{i}" for i in range(n)), tuple(f"t{i}" for i in range(k)), tuple(rows)
    )


def random_partition(rng, n):
    return Partition(tuple(rng.randint(0, n - 1) for _ in range(n)))


class TestIsComplete:
    def test_registry_section_is_complete(self):
        e = fc.load("CE55")
        rep = is_complete(e.partitions["C1"], e.model, SubmodelRef.of(2, 3))
        assert rep.passed

    def test_grid_discrete_partition_fails_with_coordinate_difference(self):
        e = fc.load("CE52")
        m = e.model
        rep = is_complete(Partition.discrete(4), m, SubmodelRef.full(m))
        assert rep.failed
        w = rep.witness["function"]
        assert w.values == (0, -1, 1, 0)
        assert valid_incompleteness_witness(w, m, SubmodelRef.full(m))

    def test_single_distribution_trivial_partition(self):
        m = coin_family("1/3")
        assert is_complete(Partition.trivial(2), m, SubmodelRef.full(m)).passed

    def test_agrees_with_exhaustive_oracle(self):
        rng = random.Random(101)
        mismatches = 0
        for _ in range(300):
            m = random_small_model(rng)
            c = random_partition(rng, m.num_points)
            sub = SubmodelRef.full(m)
            rep = is_complete(c, m, sub)
            if rep.passed != oracle_is_complete(c, m, sub):
                mismatches += 1
            if rep.failed:
                lifted = rep.witness["function"]
                assert lifted.is_measurable(c)
                assert valid_incompleteness_witness(lifted, m, sub)
        assert mismatches == 0

    def test_bounded_alias_carries_note(self):
        m = coin_family("1/3")
        rep = is_boundedly_complete(Partition.trivial(2), m, SubmodelRef.full(m))
        assert rep.passed
        assert any("bounded" in n for n in rep.notes)


class TestIsSufficient:
    def test_discrete_partition_always_sufficient(self):
        rng = random.Random(5)
        for _ in range(20):
            m = random_small_model(rng)
            assert is_sufficient(
                Partition.discrete(m.num_points), m, SubmodelRef.full(m)
            ).passed

    def test_sum_statistic_for_coin_powers(self):
        m = bernoulli_pair_grid(("0",), ("1/5", "1/4", "1/3"), swap=False)
        sum_p = Partition((0, 1, 1, 2))
        assert is_sufficient(sum_p, m, SubmodelRef.full(m)).passed

    def test_registry_join_insufficient(self):
        e = fc.load("CE55")
        rep = is_sufficient(e.partitions["C1"], e.model, SubmodelRef.full(e.model))
        assert rep.failed
        assert rep.witness["point"] == "1"
        assert rep.witness["params"] == (("1", "1"), ("2", "2"))

    def test_upward_heredity_of_sufficiency(self):
        rng = random.Random(6)
        for _ in range(60):
            m = random_small_model(rng)
            n = m.num_points
            c = random_partition(rng, n)
            sub = SubmodelRef.full(m)
            if not is_sufficient(c, m, sub).passed:
                continue
            finer = join(c, random_partition(rng, n))
            assert is_sufficient(finer, m, sub).passed


class TestMinimalSufficiency:
    def test_single_parameter_collapses_support(self):
        m = coin_family("1/3")
        part = minimal_sufficient_partition(m, SubmodelRef.full(m))
        assert part == Partition.trivial(2)

    def test_registry_section_blocks(self):
        e = fc.load("CE55")
        part = minimal_sufficient_partition(e.model, SubmodelRef.of(2, 3))
        assert part.block_id == (0, 0, 1)

    def test_bernoulli_grid_partition_by_sum(self):
        m = bernoulli_pair_grid(("0",), ("1/5", "1/4", "1/3"), swap=False)
        part = minimal_sufficient_partition(m, SubmodelRef.full(m))
        assert part == Partition((0, 1, 1, 2))

    def test_off_support_points_form_one_block(self):
        m = FiniteModel(
            ("a", "b", "c", "d"),
            ("t0", "t1"),
            (
                (Fraction(1, 2), Fraction(1, 2), 0, 0),
                (Fraction(1, 4), Fraction(3, 4), 0, 0),
            ),
        )
        part = minimal_sufficient_partition(m, SubmodelRef.full(m))
        assert part.block_id == (0, 1, 2, 2)

    def test_output_is_sufficient_and_coarsest(self):
        rng = random.Random(7)
        for _ in range(60):
            m = random_small_model(rng)
            sub = SubmodelRef.full(m)
            msp = minimal_sufficient_partition(m, sub)
            assert is_sufficient(msp, m, sub).passed
            su = support_union(m, sub)
            for c in all_partitions(m.num_points):
                if not is_sufficient(c, m, sub).passed:
                    continue
                # on the support union, msp is coarser than or equal to c
                for x in su:
                    for y in su:
                        if c.block_id[x] == c.block_id[y]:
                            assert msp.block_id[x] == msp.block_id[y]

    def test_is_minimal_sufficient_verdicts(self):
        e = fc.load("CE55")
        m = e.model
        sec = SubmodelRef.of(2, 3)
        msp = minimal_sufficient_partition(m, sec)
        assert is_minimal_sufficient(msp, m, sec).passed
        finer = is_minimal_sufficient(Partition.discrete(3), m, sec)
        assert finer.failed
        assert "sufficient but not minimal" in finer.notes
        # the full model's minimal sufficient partition is discrete
        assert is_minimal_sufficient(Partition.discrete(3), m, SubmodelRef.full(m)).passed


class TestAncillaryIndependentHomogeneous:
    def test_trivial_partition_is_ancillary(self):
        m = coin_family("1/3", "1/2")
        assert is_ancillary(Partition.trivial(2), m, SubmodelRef.full(m)).passed

    def test_coordinate_partition_not_ancillary_for_coin_grid(self):
        m = bernoulli_pair_grid(("0",), ("1/5", "1/4"), swap=False)
        rep = is_ancillary(Partition((0, 0, 1, 1)), m, SubmodelRef.full(m))
        assert rep.failed

    def test_first_coordinate_ancillary_when_law_fixed(self):
        # product of a fixed coin with a varying coin
        a = coin("1/3")
        b = coin_family("1/5", "1/4", "1/3")
        m = product_model(a, b)
        c1, _ = fc.coordinate_partitions(a, b)
        assert is_ancillary(c1, m, SubmodelRef.full(m)).passed

    def test_product_coordinates_independent(self):
        a = coin_family("1/3", "1/2")
        b = coin_family("1/5", "1/4")
        m = product_model(a, b)
        c1, c2 = fc.coordinate_partitions(a, b)
        assert are_independent(c1, c2, m, SubmodelRef.full(m)).passed

    def test_trivial_partition_independent_of_anything(self):
        m = bernoulli_pair_grid(("0", "1"), ("1/5",))
        c1 = Partition((0, 0, 1, 1))
        assert are_independent(c1, Partition.trivial(4), m, SubmodelRef.full(m)).passed

    def test_coordinate_and_sum_dependent_exactly(self):
        m = power_model(coin("1/3"), 2)
        c1 = Partition((0, 0, 1, 1))
        sum_p = Partition((0, 1, 1, 2))
        rep = are_independent(c1, sum_p, m, SubmodelRef.full(m))
        assert rep.failed
        assert rep.witness["joint"] != rep.witness["product"]

    def test_homogeneous_verdicts(self):
        assert is_homogeneous(coin_family("1/3", "1/2"), SubmodelRef.of(0, 1)).passed
        e = fc.load("CE55")
        rep = is_homogeneous(e.model, SubmodelRef.full(e.model))
        assert rep.failed
        r = fc.load("CE53").components["R"]
        assert is_homogeneous(r, fc.parse_submodel(r, "theta2=0")).failed


class TestBasu:
    def test_product_model_instance(self):
        a = coin_family("1/3", "1/2", "2/3")
        b = coin("1/4")
        m = product_model(a, b)
        c1, c2 = fc.coordinate_partitions(a, b)
        rep = basu_consistency(c1, c2, m, SubmodelRef.full(m))
        assert rep.passed

    def test_vacuous_when_hypotheses_fail(self):
        e = fc.load("CE55")
        m = e.model
        rep = basu_consistency(e.partitions["C1"], Partition.trivial(3), m, SubmodelRef.full(m))
        assert rep.verdict == "vacuous"

    def test_generated_complete_sufficient_instances(self):
        rng = random.Random(8)
        checked = 0
        for _ in range(80):
            m = random_small_model(rng, max_points=4, max_params=4)
            sub = SubmodelRef.full(m)
            rep = fc.exists_complete_sufficient(m, sub)
            if not rep.passed:
                continue
            c_cs = rep.witness["partition"]
            rep2 = basu_consistency(c_cs, Partition.trivial(m.num_points), m, sub)
            assert rep2.passed
            checked += 1
        assert checked > 10


class TestStructuralProperties:
    def test_downward_heredity_of_completeness(self):
        rng = random.Random(9)
        for _ in range(80):
            m = random_small_model(rng)
            n = m.num_points
            d = random_partition(rng, n)
            sub = SubmodelRef.full(m)
            if not is_complete(d, m, sub).passed:
                continue
            coarser = meet(d, random_partition(rng, n))
            assert is_complete(coarser, m, sub).passed

    def test_relabeling_invariance(self):
        rng = random.Random(10)
        for _ in range(40):
            m = random_small_model(rng)
            n, k = m.num_points, m.num_params
            c = random_partition(rng, n)
            sub = SubmodelRef.full(m)
            point_perm = list(range(n))
            param_perm = list(range(k))
            rng.shuffle(point_perm)
            rng.shuffle(param_perm)
            permuted = FiniteModel(
                tuple(m.points[point_perm[i]] for i in range(n)),
                tuple(m.params[param_perm[j]] for j in range(k)),
                tuple(
                    tuple(m.prob[param_perm[j]][point_perm[i]] for i in range(n))
                    for j in range(k)
                ),
            )
            c_perm = Partition(tuple(c.block_id[point_perm[i]] for i in range(n)))
            for fn in (is_complete, is_sufficient, is_ancillary):
                assert fn(c, m, sub).verdict == fn(c_perm, permuted, sub).verdict
            assert (
                is_homogeneous(m, sub).verdict == is_homogeneous(permuted, sub).verdict
            )
