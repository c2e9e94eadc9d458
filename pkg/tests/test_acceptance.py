"""Acceptance suite: reproduces the reference design tables end to end.

Each test_criterion_N_* function covers one numbered acceptance criterion;
the conftest plugin prints a PASS/FAIL line per criterion after the run.
All expected values are frozen constants, cross-checked where possible by
arithmetic identities or the brute-force oracles.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction

import pytest

from designforge import (
    Block,
    ConsistencyError,
    Permutation,
    PermGroup,
    block_orbit,
    block_stabilizer_order,
    complement_design,
    complement_partition,
    decompose_block,
    design_from_maximal,
    design_from_orbit,
    design_to_json,
    lambda_s,
    merge_orbits,
    orbit_partition,
    set_stabilizer,
    verify_t_design,
)

from . import oracles

# Orbit-size multisets of the k-subset partitions for the degree-22 Mathieu
# group, k = 1..11 (k = 1..3 are single complete orbits).
SIGMA_M22 = {
    1: {22: 1},
    2: {231: 1},
    3: {1540: 1},
    4: {1155: 1, 6160: 1},
    5: {462: 1, 3696: 2, 18480: 1},
    6: {77: 1, 1232: 2, 7392: 1, 9240: 1, 55440: 1},
    7: {176: 2, 1232: 1, 2640: 1, 18480: 2, 55440: 1, 73920: 1},
    8: {330: 1, 2640: 2, 9240: 1, 27720: 1, 36960: 2, 55440: 1, 73920: 2},
    9: {4620: 1, 6160: 1, 18480: 3, 24640: 1, 36960: 2, 110880: 1, 221760: 1},
    10: {
        616: 1, 2310: 1, 6160: 1, 7392: 2, 18480: 1, 22176: 1, 27720: 1,
        73920: 3, 110880: 1, 221760: 1,
    },
    11: {
        672: 2, 7392: 2, 9240: 2, 27720: 1, 36960: 2, 44352: 2, 73920: 2,
        110880: 3,
    },
}

# The degree-22 table of 3-designs as printed in the reference: one row per
# distinct (k, b), as (k, b, r, lambda).  The k=5 row (36960, 8400, 240) is a
# known misprint: 36960 exceeds C(22,5) = 26334, so no 5-subset orbit of that
# size can exist, and the row is exactly ten times the genuine (3696, 840, 24).
REPORTED_M22_ROWS = {
    (4, 1155, 210, 3), (4, 6160, 1120, 16),
    (5, 462, 105, 3), (5, 36960, 8400, 240), (5, 18480, 4200, 120),
    (6, 77, 21, 1), (6, 1232, 336, 16), (6, 7392, 2016, 96),
    (6, 9240, 2520, 120), (6, 55440, 15120, 720),
    (7, 176, 56, 4), (7, 1232, 392, 28), (7, 2640, 840, 60),
    (7, 18480, 5880, 420), (7, 55440, 17640, 1260), (7, 73920, 23520, 1680),
    (8, 330, 120, 12), (8, 2640, 960, 96), (8, 9240, 3360, 336),
    (8, 27720, 10080, 1008), (8, 36960, 13440, 1344), (8, 55440, 20160, 2016),
    (8, 73920, 26880, 2688),
    (9, 4620, 1890, 252), (9, 6160, 2520, 336), (9, 18480, 7560, 1008),
    (9, 24640, 10080, 1344), (9, 36960, 15120, 2016),
    (9, 110880, 45360, 6048), (9, 221760, 90720, 12096),
    (10, 616, 280, 48), (10, 2310, 1050, 180), (10, 6160, 2800, 480),
    (10, 7392, 3360, 576), (10, 18480, 8400, 1440), (10, 22176, 10080, 1728),
    (10, 27720, 12600, 2160), (10, 73920, 33600, 5760),
    (10, 110880, 50400, 8640), (10, 221760, 100800, 17280),
    (11, 672, 336, 72), (11, 7392, 3696, 792), (11, 9240, 4620, 990),
    (11, 27720, 13860, 2970), (11, 36960, 18480, 3960),
    (11, 44352, 22176, 4752), (11, 73920, 36960, 7920),
    (11, 110880, 55440, 11880),
}
MISPRINTED_ROW = (5, 36960, 8400, 240)
CORRECTED_ROW = (5, 3696, 840, 24)

# 2-design rows over the degree-176 Higman-Sims action, one row per maximal
# subgroup orbit: (subgroup, k) -> (b, r, lambda).
EXPECTED_HS_ROWS = {
    ("HS.M2", 50): (176, 50, 14),
    ("HS.M2", 126): (176, 126, 90),
    ("HS.M3a", 8): (1100, 50, 2),
    ("HS.M3a", 168): (1100, 1050, 1002),
    ("HS.M3b", 56): (1100, 350, 110),
    ("HS.M3b", 120): (1100, 750, 510),
    ("HS.M4", 80): (3850, 1750, 790),
    ("HS.M4", 96): (3850, 2100, 1140),
    ("HS.M5", 64): (4125, 1500, 540),
    ("HS.M5", 112): (4125, 2625, 1665),
    ("HS.M6", 16): (5775, 525, 45),
    ("HS.M6", 160): (5775, 5250, 4770),
    ("HS.M7a", 11): (5600, 350, 20),
    ("HS.M7a", 165): (5600, 5250, 4920),
    ("HS.M7b", 66): (5600, 2100, 780),
    ("HS.M7b", 110): (5600, 3500, 2180),
    ("HS.M8", 12): (15400, 1050, 66),
    ("HS.M8", 72): (15400, 6300, 2556),
    ("HS.M8", 90): (15400, 7875, 4005),
    ("HS.M9", 6): (36960, 1260, 36),
    ("HS.M9", 50): (36960, 10500, 2940),
    ("HS.M9", 120): (36960, 25200, 17136),
}

# 2-design rows over the degree-276 Conway action that stay at desk scale
# (b < 10^5), for the three shipped maximal-subgroup fixtures.
EXPECTED_CO3_ROWS = {
    ("Co3.M23", 23): (48600, 4050, 324),
    ("Co3.M23", 253): (48600, 44550, 40824),
    ("Co3.HS", 100): (11178, 4050, 1458),
    ("Co3.HS", 176): (11178, 7128, 4536),
    ("Co3.U43", 112): (37950, 15400, 6216),
    ("Co3.U43", 162): (37950, 22275, 13041),
}

# Skip manifest for the same action: further known block counts that this
# suite does not construct, because no generator fixture is shipped for the
# corresponding stabilizer class (first three) or because the block count is
# beyond desk scale (the 10**6-and-up family).  Listed so the omission is a
# recorded decision rather than a silent gap.
CO3_SKIPPED_BLOCK_COUNTS = (708_400, 128_800, 170_775)

CO3_BIG_WORK = 2 * 10**9  # 48600 * C(253,2) coverage increments


@pytest.fixture(scope="module")
def m22_partitions(m22):
    """k-subset orbit partitions of the degree-22 action for k = 1..18."""
    return {
        k: orbit_partition(m22, k, group_name="M22") for k in range(1, 19)
    }


@pytest.fixture(scope="module")
def m22_sweep(m22, m22_partitions):
    """One design per orbit for k = 4..11, certified at t = 3.

    Designs are materialized one at a time; only facts, serialized documents,
    and small certificates are retained.
    """
    orbit_rows = []
    doc_triples = []
    level_checks = []
    complement_facts = []
    complement_certs = {}
    for k in range(4, 12):
        direct_reps = {
            o.representative.points for o in m22_partitions[22 - k].orbits
        }
        for index, orbit in enumerate(m22_partitions[k].orbits):
            design = design_from_orbit(m22, orbit, group_name="M22")
            cert = verify_t_design(design, 3)
            docs = tuple(
                design_to_json(
                    design,
                    verify_t_design(design, 3, threads=threads),
                    include_blocks=False,
                )
                for threads in (1, 4, 8)
            )
            for s in (1, 2):
                measured = verify_t_design(design, s)
                level_checks.append(
                    dict(
                        k=k, b=design.b, r=design.r, s=s,
                        measured=measured.lambda_t,
                        measured_constant=measured.verified,
                        predicted=lambda_s(cert.lambda_t, 3, s, design.v, design.k),
                    )
                )
            comp = complement_design(design)
            complement_facts.append(
                dict(
                    k=k, b=design.b, r=design.r,
                    comp_v=comp.v, comp_b=comp.b, comp_k=comp.k, comp_r=comp.r,
                    rep_is_known=comp.representative.points in direct_reps,
                )
            )
            if (k, design.b) in ((6, 77), (4, 1155)):
                complement_certs[(k, design.b)] = verify_t_design(comp, 3)
            orbit_rows.append(
                dict(
                    k=k, index=index, b=design.b, r=design.r,
                    lam=cert.lambda_t, verified=cert.verified,
                    histogram=dict(cert.coverage_histogram),
                )
            )
            doc_triples.append((k, index, docs))
    return dict(
        orbit_rows=orbit_rows,
        doc_triples=doc_triples,
        level_checks=level_checks,
        complement_facts=complement_facts,
        complement_certs=complement_certs,
    )


@pytest.fixture(scope="module")
def hs_rows(registry, hs):
    """All maximal-subgroup orbit designs of the degree-176 action at t = 2."""
    rows = {}
    complete = None
    labels = [name for name in registry.names() if name.startswith("HS.")]
    for label in labels:
        subgroup = registry.load_group(label)
        for suborbit in subgroup.orbits():
            design = design_from_maximal(
                hs, subgroup, min(suborbit), group_name="HS", subgroup_name=label
            )
            cert = verify_t_design(design, 2)
            lam1 = verify_t_design(design, 1).lambda_t
            fact = dict(
                label=label, v=design.v, b=design.b, r=design.r, k=design.k,
                lam=cert.lambda_t, verified=cert.verified,
                maximality=design.construction["maximality"],
                subgroup_order=design.construction["subgroup_order"],
                group_order=hs.order(), lam1=lam1,
            )
            if design.b == math.comb(design.v, design.k):
                complete = fact
            else:
                rows[(label, design.k)] = fact
    return dict(rows=rows, complete=complete)


@pytest.fixture(scope="module")
def co3_rows(registry, co3):
    """Desk-scale maximal-subgroup orbit designs of the degree-276 action."""
    rows = {}
    complete = None
    for label in ("Co3.M23", "Co3.HS", "Co3.U43"):
        subgroup = registry.load_group(label)
        for suborbit in subgroup.orbits():
            design = design_from_maximal(
                co3, subgroup, min(suborbit), group_name="Co3", subgroup_name=label
            )
            cert = verify_t_design(design, 2, max_work=CO3_BIG_WORK)
            lam1 = verify_t_design(design, 1).lambda_t
            fact = dict(
                label=label, v=design.v, b=design.b, r=design.r, k=design.k,
                lam=cert.lambda_t, verified=cert.verified,
                subgroup_order=design.construction["subgroup_order"],
                group_order=co3.order(), lam1=lam1,
            )
            if design.b == math.comb(design.v, design.k):
                complete = fact
            else:
                rows[(label, design.k)] = fact
    return dict(rows=rows, complete=complete)


def test_criterion_1_degree22_subset_partitions(m22_partitions):
    for k in range(1, 12):
        partition = m22_partitions[k]
        assert partition.size_multiset() == SIGMA_M22[k], f"k={k}"
        assert partition.total() == math.comb(22, k)
        assert partition.is_trivial() == (k <= 3)
    assert m22_partitions[5].exponent_string() == "462, 3696^2, 18480"
    eleven = m22_partitions[11]
    assert len(eleven.orbits) == 16
    assert eleven.size_multiset()[672] == 2
    assert eleven.size_multiset()[110880] == 3


def test_criterion_2_small_mathieu_partitions(m11, m12):
    for k in range(1, 11):
        partition = orbit_partition(m11, k, group_name="M11")
        if k in (5, 6):
            assert partition.size_multiset() == {66: 1, 396: 1}, f"M11 k={k}"
        else:
            assert partition.is_trivial(), f"M11 k={k}"
            assert partition.size_multiset() == {math.comb(11, k): 1}
    for k in range(1, 12):
        partition = orbit_partition(m12, k, group_name="M12")
        if k == 6:
            assert partition.size_multiset() == {132: 1, 792: 1}
        else:
            assert partition.is_trivial(), f"M12 k={k}"
            assert partition.size_multiset() == {math.comb(12, k): 1}


def test_criterion_3_degree22_design_table(m22_sweep):
    computed = set()
    by_size = {}
    for row in m22_sweep["orbit_rows"]:
        assert row["verified"], f"k={row['k']} orbit {row['index']} not constant"
        assert row["histogram"] == {row["lam"]: math.comb(22, 3)}
        computed.add((row["k"], row["b"], row["r"], row["lam"]))
        by_size.setdefault((row["k"], row["b"]), set()).add(
            (row["r"], row["lam"])
        )
    # Orbits of equal size at the same k always give the same table row.
    assert all(len(values) == 1 for values in by_size.values())
    assert len(REPORTED_M22_ROWS) == 48
    assert len(computed) == 48
    assert REPORTED_M22_ROWS - computed == {MISPRINTED_ROW}
    assert computed - REPORTED_M22_ROWS == {CORRECTED_ROW}
    # The lone mismatch is a factor-of-ten misprint of an impossible size.
    assert MISPRINTED_ROW[1] > math.comb(22, 5)
    assert MISPRINTED_ROW[1:] == tuple(10 * x for x in CORRECTED_ROW[1:])


def test_criterion_4_complement_duality(m22, m22_partitions, m22_sweep):
    for k in range(4, 12):
        comp = complement_partition(m22, m22_partitions[k])
        direct = m22_partitions[22 - k]
        assert [
            (o.size, o.representative.points) for o in comp.orbits
        ] == [(o.size, o.representative.points) for o in direct.orbits], f"k={k}"
    for fact in m22_sweep["complement_facts"]:
        assert fact["comp_v"] == 22
        assert fact["comp_b"] == fact["b"]
        assert fact["comp_k"] == 22 - fact["k"]
        assert fact["comp_r"] == fact["b"] - fact["r"]
        assert fact["rep_is_known"]
    # Certified complement witnesses: the Steiner hexads complement to a
    # 3-(22,16,28) design, and the 1155-orbit of 4-sets to a 3-(22,18,612).
    hexad_comp = m22_sweep["complement_certs"][(6, 77)]
    assert hexad_comp.verified and hexad_comp.lambda_t == 28
    quad_comp = m22_sweep["complement_certs"][(4, 1155)]
    assert quad_comp.verified and quad_comp.lambda_t == 612


def test_criterion_5_higman_sims_table(hs_rows):
    rows = hs_rows["rows"]
    assert set(rows) == set(EXPECTED_HS_ROWS)
    for key, fact in rows.items():
        b, r, lam = EXPECTED_HS_ROWS[key]
        assert (fact["v"], fact["b"], fact["r"], fact["lam"]) == (176, b, r, lam), key
        assert fact["verified"], key
    # The named example: a symmetric 2-(176,50,14) design (b = v) and its
    # k = 126 companion from the other orbit of the same order-252000 subgroup.
    symmetric = rows[("HS.M2", 50)]
    assert symmetric["b"] == symmetric["v"] == 176
    assert symmetric["subgroup_order"] == 252_000
    companion = rows[("HS.M2", 126)]
    assert (companion["b"], companion["r"], companion["lam"]) == (176, 126, 90)
    # Block-action primitivity is verified outright at small block counts and
    # only asserted beyond the verification ceiling.
    for fact in rows.values():
        assert fact["maximality"] == ("verified" if fact["b"] <= 10_000 else "asserted")
    # The leftover 2-point orbit yields the complete design, not a table row.
    complete = hs_rows["complete"]
    assert complete["label"] == "HS.M8"
    assert (complete["k"], complete["b"], complete["lam"]) == (2, 15_400, 1)


def test_criterion_6_conway_rows(co3_rows):
    rows = co3_rows["rows"]
    assert set(rows) == set(EXPECTED_CO3_ROWS)
    for key, fact in rows.items():
        b, r, lam = EXPECTED_CO3_ROWS[key]
        assert (fact["v"], fact["b"], fact["r"], fact["lam"]) == (276, b, r, lam), key
        assert fact["verified"], key
    # The shipped fixtures must not quietly produce any of the skipped rows.
    built = {fact["b"] for fact in rows.values()}
    assert built.isdisjoint(CO3_SKIPPED_BLOCK_COUNTS)
    # The 2-point orbit of the order-13063680 subgroup gives the complete
    # 2-design: its index in the group equals C(276,2) exactly.
    complete = co3_rows["complete"]
    assert complete["label"] == "Co3.U43"
    assert (complete["k"], complete["b"], complete["lam"]) == (2, 37_950, 1)
    assert complete["b"] == math.comb(276, 2)


def _sample_small_groups(count: int, seed: int):
    """Deterministic pseudo-random groups of order at most 5000."""
    rng = random.Random(seed)
    found = []
    while len(found) < count:
        degree = rng.randrange(5, 10)
        gens = [tuple(rng.sample(range(degree), degree)) for _ in range(2)]
        if all(g == tuple(range(degree)) for g in gens):
            continue
        try:
            elements = oracles.closure(list(gens), limit=5000)
        except ValueError:
            continue
        found.append((degree, gens, elements, rng.randrange(2**32)))
    return found


def test_criterion_7_oracle_equivalence():
    samples = _sample_small_groups(20, seed=0x5EED)
    transitive_seen = intransitive_seen = 0
    for degree, gens, elements, subseed in samples:
        group = PermGroup([Permutation(list(g)) for g in gens])
        assert group.order() == len(elements)
        assert group.orbits() == oracles.point_orbits(elements, degree)
        assert group.point_stabilizer(0).order() == oracles.point_stabilizer_order(
            elements, 0
        )
        assert group.is_primitive() == oracles.is_primitive(elements, degree)
        assert group.transitivity_degree(cap=3).value == oracles.transitivity_degree(
            elements, degree, 3
        )
        if oracles.is_transitive(elements, degree):
            transitive_seen += 1
        else:
            intransitive_seen += 1
        rng = random.Random(subseed)
        for k in range(2, 5):
            if len(elements) * math.comb(degree, k) > 2_000_000:
                continue
            partition = orbit_partition(group, k)
            expected = oracles.subset_orbits(elements, degree, k)
            assert sorted(partition.sizes()) == sorted(len(o) for o in expected)
            for orbit in partition.orbits:
                rep = orbit.representative.points
                matches = [o for o in expected if rep in o]
                assert len(matches) == 1 and len(matches[0]) == orbit.size
        points = tuple(sorted(rng.sample(range(degree), rng.randrange(2, degree))))
        orbit = block_orbit(group, Block(points, degree), materialize=True)
        assert orbit.size == len(oracles.subset_orbit(elements, points))
        assert block_stabilizer_order(group, points) == oracles.set_stabilizer_order(
            elements, points
        )
    assert len(samples) >= 20
    assert transitive_seen and intransitive_seen


def _assert_merge_round_trip(group, subgroup, indices):
    """Merge the chosen suborbits, then recover them from the block."""
    suborbits = subgroup.orbits()
    try:
        design = merge_orbits(group, subgroup, indices)
    except ConsistencyError:
        return "rejected"  # the merged set has a strictly larger stabilizer
    expected_sizes = sorted(len(suborbits[i]) for i in indices)
    assert design.k == sum(expected_sizes)
    assert design.b * design.k == design.v * design.r
    assert design.b == group.order() // subgroup.order()
    decomposition = decompose_block(group, design)
    assert decomposition.stabilizer_order == subgroup.order()
    assert sorted(len(o) for o in decomposition.orbits) == expected_sizes
    assert sorted(p for o in decomposition.orbits for p in o) == list(
        design.representative.points
    )
    if design.b <= 10_000:
        assert decomposition.block_primitive is True
    stabilizer = set_stabilizer(group, design.representative)
    chosen = sorted(
        stabilizer.orbits().index(orbit) for orbit in decomposition.orbits
    )
    rebuilt = merge_orbits(group, stabilizer, chosen)
    assert (rebuilt.v, rebuilt.b, rebuilt.k, rebuilt.r) == (
        design.v, design.b, design.k, design.r,
    )
    assert rebuilt.representative == design.representative
    return "ok"


def test_criterion_8_formula_identities(m22_sweep, hs_rows, co3_rows):
    # b*k = v*r on every constructed design.
    for row in m22_sweep["orbit_rows"]:
        assert row["b"] * row["k"] == 22 * row["r"]
    maximal_facts = list(hs_rows["rows"].values()) + list(co3_rows["rows"].values())
    maximal_facts += [hs_rows["complete"], co3_rows["complete"]]
    for fact in maximal_facts:
        assert fact["b"] * fact["k"] == fact["v"] * fact["r"]
        # r from the point stabilizer against r from the block count.
        stab_order = fact["group_order"] // fact["v"]
        assert fact["r"] == stab_order * fact["k"] // fact["subgroup_order"]
        assert fact["r"] == fact["k"] * fact["b"] // fact["v"]
        # lambda_1 is the replication number, by measurement and by formula.
        assert fact["lam1"] == fact["r"]
        assert lambda_s(fact["lam"], 2, 1, fact["v"], fact["k"]) == Fraction(fact["r"])
    # Predicted s-level coverage agrees with independent measurement.
    for check in m22_sweep["level_checks"]:
        assert check["measured_constant"]
        assert Fraction(check["measured"]) == check["predicted"]
        if check["s"] == 1:
            assert check["measured"] == check["r"]


def test_criterion_8_merge_round_trips(registry, m22, hs, m22_partitions):
    pool = []
    for k, size in ((6, 77), (7, 176), (8, 330), (10, 616), (11, 672)):
        for index, orbit in enumerate(m22_partitions[k].orbits):
            if orbit.size == size:
                stabilizer = set_stabilizer(m22, orbit.representative)
                pool.append((f"M22:{k}:{index}", m22, stabilizer))
    for label in (name for name in registry.names() if name.startswith("HS.")):
        pool.append((label, hs, registry.load_group(label)))
    rng = random.Random(0xD0_0D1E)
    outcomes = {}
    successes = rejected = attempts = 0
    while successes < 100:
        attempts += 1
        assert attempts <= 500, "too many rejected merge draws"
        name, group, subgroup = pool[rng.randrange(len(pool))]
        width = len(subgroup.orbits())
        mask = rng.randrange(1, 2**width - 1)
        indices = tuple(i for i in range(width) if mask >> i & 1)
        key = (name, indices)
        if key not in outcomes:
            outcomes[key] = _assert_merge_round_trip(group, subgroup, indices)
        if outcomes[key] == "rejected":
            rejected += 1
            continue
        successes += 1
    assert successes == 100
    assert len(outcomes) > 20  # the draws genuinely vary
    # Merging every orbit of a stabilizer degenerates to the full point set.
    hexads = m22_partitions[6].orbits[0]
    stabilizer = set_stabilizer(m22, hexads.representative)
    full = merge_orbits(m22, stabilizer, range(len(stabilizer.orbits())))
    assert full.degenerate and (full.v, full.b, full.k, full.r) == (22, 1, 22, 1)


def test_criterion_9_thread_determinism(m22, m22_sweep):
    partition_docs = {
        threads: "\n".join(
            orbit_partition(m22, k, threads=threads, group_name="M22").to_json()
            for k in range(1, 12)
        )
        for threads in (1, 4, 8)
    }
    assert partition_docs[1] == partition_docs[4] == partition_docs[8]
    for k, index, docs in m22_sweep["doc_triples"]:
        assert docs[0] == docs[1] == docs[2], f"k={k} orbit {index}"
