import json
from fractions import Fraction
from functools import lru_cache
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coarsegroups import _kernels
from coarsegroups.covers import verify_families
from coarsegroups.groups import FreeAbelian
from coarsegroups.metric import MetricContext, WeightFunction
from coarsegroups.solver import (
    ORACLE_MAX_POINTS,
    MetricTable,
    coloring_value,
    dump_instance,
    exhaustive_cover_oracle,
    load_instance,
    solve_min_diameter,
    witness_certificate,
)

Z, Z2 = FreeAbelian(1), FreeAbelian(2)
UNIT = MetricContext.default(Z)
PLANE = MetricContext.default(Z2)
Z13 = MetricContext(WeightFunction(Z, [((1,), 1), ((3,), 1)]))


@lru_cache(maxsize=None)
def table(ctx, radius):
    return MetricTable.from_ball(ctx, radius)


@pytest.mark.parametrize(
    "radius, k, d, expected",
    [(6, 2, 2, 1), (4, 2, 1, 0), (4, 1, 1, 8), (4, 2, 2, 1)],
)
def test_z_examples(radius, k, d, expected):
    t = table(UNIT, radius)
    res = solve_min_diameter(t, k, d)
    assert res.exact and res.r_star == expected
    assert exhaustive_cover_oracle(t, k, d) == expected
    assert coloring_value(t, res.coloring, d) == expected


def test_one_family_per_point_gives_zero():
    t = table(PLANE, 1)
    assert solve_min_diameter(t, t.n, 1).r_star == 0


@pytest.mark.parametrize("ctx, radius", [(UNIT, 3), (UNIT, 4), (PLANE, 1), (Z13, 2)])
@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("d", [1, 2, 3])
def test_matches_exhaustive_oracle(ctx, radius, k, d):
    t = table(ctx, radius)
    assert t.n <= ORACLE_MAX_POINTS
    res = solve_min_diameter(t, k, d)
    assert res.exact
    assert res.r_star == exhaustive_cover_oracle(t, k, d)


@pytest.mark.slow
@pytest.mark.parametrize("d", [1, 2, 3])
def test_matches_oracle_on_sixteen_points(d):
    t = MetricTable(table(UNIT, 8).ids[:16], tuple(r[:16] for r in table(UNIT, 8).dist[:16]))
    assert solve_min_diameter(t, 2, d).r_star == exhaustive_cover_oracle(t, 2, d)


distances = st.integers(1, 6).map(Fraction) | st.fractions(Fraction(1, 3), 6, max_denominator=3).filter(lambda f: f > 0)


@st.composite
def instances(draw):
    n = draw(st.integers(1, 7))
    upper = draw(st.lists(distances, min_size=n * (n - 1) // 2, max_size=n * (n - 1) // 2))
    k = draw(st.integers(1, 3))
    d = draw(st.sampled_from([Fraction(1), Fraction(2), Fraction(5, 2), Fraction(3)]))
    return MetricTable.from_upper(list(range(n)), upper), k, d


@settings(max_examples=150)
@given(instances())
def test_random_tables_match_oracle(inst):
    t, k, d = inst
    res = solve_min_diameter(t, k, d)
    assert res.exact and res.lower_bound == res.r_star
    assert res.r_star == exhaustive_cover_oracle(t, k, d)
    assert coloring_value(t, res.coloring, d) == res.r_star


@settings(max_examples=60)
@given(instances())
def test_backends_and_jobs_agree(inst):
    t, k, d = inst
    results = {(b, j): solve_min_diameter(t, k, d, jobs=j, backend=b) for b in _kernels.BACKENDS for j in (1, 3)}
    first = next(iter(results.values()))
    assert all((r.r_star, r.coloring) == (first.r_star, first.coloring) for r in results.values())


def test_witness_is_lexicographically_first():
    t = table(UNIT, 3)
    res = solve_min_diameter(t, 2, 2)
    best = min(c for c in product(range(2), repeat=t.n) if coloring_value(t, c, 2) == res.r_star)
    # the solver normalizes colors by first use, which is lexicographically minimal already
    assert res.coloring == best


def test_monotone_in_k_d_and_radius():
    for ctx, radii in ((UNIT, range(1, 6)), (PLANE, (1, 2))):
        for k in (1, 2, 3):
            for d in (1, 2, 3):
                vals = [solve_min_diameter(table(ctx, r), k, d).r_star for r in radii]
                assert vals == sorted(vals)
        for r in radii:
            t = table(ctx, r)
            for d in (1, 2, 3):
                by_k = [solve_min_diameter(t, k, d).r_star for k in (1, 2, 3)]
                assert by_k == sorted(by_k, reverse=True)
            for k in (1, 2, 3):
                by_d = [solve_min_diameter(t, k, d).r_star for d in (1, 2, 3)]
                assert by_d == sorted(by_d)


def test_z_growth_signal():
    for n in range(1, 9):
        t = table(UNIT, n)
        assert solve_min_diameter(t, 1, 1).r_star == 2 * n
        assert solve_min_diameter(t, 2, 1).r_star <= 1


def test_z2_small_values():
    assert [solve_min_diameter(table(PLANE, n), 2, 2).r_star for n in (1, 2)] == [2, 4]
    assert [solve_min_diameter(table(PLANE, n), 3, 2).r_star for n in (1, 2)] == [2, 2]


def test_budget_exhaustion_is_not_an_error():
    t = table(PLANE, 3)
    res = solve_min_diameter(t, 2, 2, budget=50)
    assert not res.exact
    assert res.lower_bound <= res.r_star
    assert coloring_value(t, res.coloring, 2) == res.r_star
    full = solve_min_diameter(t, 2, 2)
    assert res.lower_bound <= full.r_star <= res.r_star


@pytest.mark.parametrize("ctx, radius, k, d", [(UNIT, 6, 2, 2), (PLANE, 2, 2, 2), (PLANE, 2, 3, 1), (Z13, 4, 2, 1)])
def test_witness_certificate_verifies(ctx, radius, k, d):
    t = table(ctx, radius)
    res = solve_min_diameter(t, k, d)
    cert = witness_certificate(ctx, t, res, k, d)
    rep = verify_families(cert, radius)
    assert rep.ok
    assert rep.max_diameter == res.r_star


def test_instance_round_trip():
    t = table(Z13, 2)
    data = dump_instance(t, 2, Fraction(3, 2), ids=[str(x[0]) for x in t.ids])
    text = json.dumps(data)
    t2, k, d = load_instance(text)
    assert (k, d) == (2, Fraction(3, 2))
    assert t2.dist == t.dist and list(t2.ids) == data["points"]
    assert all(isinstance(v, str) for v in data["dist"])
    assert solve_min_diameter(t2, k, d).to_json() == solve_min_diameter(t, k, d).to_json()


def test_result_json_uses_exact_strings():
    out = solve_min_diameter(table(Z13, 2), 2, Fraction(1, 2)).to_json()
    assert set(out) == {"r_star", "exact", "lower_bound", "coloring"}
    assert isinstance(out["r_star"], str)


def test_input_errors():
    t = table(UNIT, 2)
    with pytest.raises(ValueError):
        solve_min_diameter(t, 0, 1)
    with pytest.raises(ValueError):
        solve_min_diameter(t, 1, 0)
    with pytest.raises(ValueError):
        exhaustive_cover_oracle(table(UNIT, 9), 2, 1)
    with pytest.raises(ValueError):
        MetricTable.from_upper([0, 1, 2], ["1", "2"])
    with pytest.raises(ValueError):
        MetricTable.from_upper([0, 1], ["0"])
    with pytest.raises(ValueError):
        load_instance({"points": [0, 1], "dist": ["1"], "k": 0, "d": "1"})


def test_empty_table():
    res = solve_min_diameter(MetricTable((), ()), 2, 1)
    assert res.exact and res.r_star == 0 and res.coloring == ()
