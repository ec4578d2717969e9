import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toricgen.errors import InvalidConeError, InvariantViolation, MalformedFanError, ParameterError
from toricgen.fan import (
    FamilyParams,
    Fan,
    SubdivisionWarning,
    build_family_fan,
    check_smooth_complete,
    dumps,
    edge_cone,
    facet_pairing_complete,
    family_ray_indices,
    int_det,
    is_complete,
    is_connected,
    is_regular,
    loads,
    projective_space_fan,
    star_subdivide,
)

family_params = st.integers(3, 9).flatmap(
    lambda n: st.builds(FamilyParams, st.just(n), st.integers(2, n - 1), st.integers(-3, 3), st.integers(-3, 3))
)


def test_family_small_counts():
    f = build_family_fan(FamilyParams(3, 2, 0, 0))
    assert f.n_rays == 6
    assert len(f.max_cones) == 8
    assert all(abs(d) == 1 for _, d in is_regular(f).determinants)


def test_family_n43_counts():
    f = build_family_fan(FamilyParams(43, 4, 21, 11))
    assert f.n_rays == 46
    assert len(f.max_cones) == 320
    assert is_regular(f)


def test_family_n8_rays():
    p = FamilyParams(8, 3, 1, -1)
    f = build_family_fan(p)
    assert is_regular(f) and facet_pairing_complete(f)[0]
    assert len(f.max_cones) == 36
    u = family_ray_indices(p)["U"]
    assert f.rays[u[-1]] == (-1, -1, -1, -1, -1, 0, 0, 0)


def test_family_ray_layout():
    p = FamilyParams(6, 3, 2, 5)
    f = build_family_fan(p)
    idx = family_ray_indices(p)
    assert [len(idx[k]) for k in "UVW"] == [4, 3, 2]
    assert f.rays[idx["V"][-1]] == (0, 0, 2, -1, -1, 0)
    assert f.rays[idx["W"][-1]] == (0, 0, 0, 0, 5, -1)


@pytest.mark.parametrize("n, eps", [(2, 2), (5, 1), (5, 5), (5, 0)])
def test_family_params_rejected(n, eps):
    with pytest.raises(ParameterError):
        FamilyParams(n, eps, 1, 1)


def test_max_dim_guard():
    with pytest.raises(ParameterError):
        build_family_fan(FamilyParams(70, 3, 1, 1))
    assert build_family_fan(FamilyParams(70, 3, 1, 1), max_dim=80).dim == 70


@given(family_params)
@settings(max_examples=60, deadline=None)
def test_family_is_smooth_complete(p):
    f = build_family_fan(p)
    assert f.n_rays == p.n + 3
    assert len(f.max_cones) == (p.n - p.eps + 1) * p.eps * 2
    check_smooth_complete(f)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_projective_space(n):
    f = projective_space_fan(n)
    assert f.n_rays == n + 1 and len(f.max_cones) == n + 1
    assert is_regular(f) and facet_pairing_complete(f)[0] and is_connected(f)


def test_projective_space_rejects_zero():
    with pytest.raises(ParameterError):
        projective_space_fan(0)


def test_cp1_rays():
    assert set(projective_space_fan(1).rays) == {(1,), (-1,)}


def test_subdivide_cp2_max_cone():
    f = star_subdivide(projective_space_fan(2), (0, 1))
    assert f.n_rays == 4 and len(f.max_cones) == 4
    assert f.rays[-1] == (1, 1)
    check_smooth_complete(f)


def test_subdivide_edge_n3():
    p = FamilyParams(3, 2, 1, 1)
    f = star_subdivide(build_family_fan(p), edge_cone(p))
    assert f.rays[-1] == (1, 1, 0)
    assert is_regular(f)
    assert len(f.max_cones) == 8 + 2 * (3 - 2)


@given(family_params, st.data())
@settings(max_examples=40, deadline=None)
def test_subdivide_max_cone_adds_n_minus_one(p, data):
    f = build_family_fan(p)
    tau = data.draw(st.sampled_from(f.max_cones))
    g = star_subdivide(f, tau)
    assert len(g.max_cones) == len(f.max_cones) + p.n - 1
    check_smooth_complete(g)


@given(family_params)
@settings(max_examples=30, deadline=None)
def test_edge_subdivision_count(p):
    f = build_family_fan(p)
    g = star_subdivide(f, edge_cone(p))
    assert len(f.cones_containing(edge_cone(p))) == 2
    assert len(g.max_cones) == len(f.max_cones) + 2 * (p.n - 2)
    check_smooth_complete(g)


def test_subdivide_non_face():
    f = build_family_fan(FamilyParams(4, 2, 1, 1))
    idx = family_ray_indices(FamilyParams(4, 2, 1, 1))
    with pytest.raises(InvalidConeError):
        star_subdivide(f, idx["W"])
    with pytest.raises(InvalidConeError):
        star_subdivide(f, (0, 99))


def test_subdivide_single_ray_warns():
    f = projective_space_fan(3)
    with pytest.warns(SubdivisionWarning):
        g = star_subdivide(f, (2,))
    assert g is f


def test_subdivide_non_regular_result_aborts():
    # det 3 cone: new ray (2, 3) leaves a det 3 piece
    f = Fan(2, ((1, 0), (1, 3), (-1, -1)), ((0, 1),))
    with pytest.raises(InvariantViolation):
        star_subdivide(f, (0, 1))


def test_subdivide_gcd_normalized():
    f = Fan(2, ((1, 0), (1, 2), (-1, -1)), ((0, 1),))
    with pytest.warns(SubdivisionWarning):
        g = star_subdivide(f, (0, 1), check=False)
    assert g.rays[-1] == (1, 1)
    assert "gcd 2" in g.label


def test_det_two_fails():
    f = Fan(2, ((1, 0), (1, 2)), ((0, 1),))
    rep = is_regular(f)
    assert not rep
    assert rep.failures == [((0, 1), 2)]


def test_non_square_cone_is_malformed():
    f = Fan(3, ((1, 0, 0), (0, 1, 0)), ((0, 1),))
    with pytest.raises(MalformedFanError):
        is_regular(f)


@pytest.mark.parametrize(
    "rays, cones",
    [
        (((2, 0), (0, 1)), ((0, 1),)),
        (((1, 0), (1, 0)), ((0, 1),)),
        (((1, 0), (0, 1)), ((0, 2),)),
        (((1, 0, 0),), ((0,),)),
    ],
)
def test_malformed_fans(rays, cones):
    with pytest.raises(MalformedFanError):
        Fan(2, rays, cones)


@pytest.mark.parametrize("fan", [projective_space_fan(3), build_family_fan(FamilyParams(5, 3, 2, -1))])
def test_deleted_cone_orphans_n_facets(fan):
    broken = Fan(fan.dim, fan.rays, fan.max_cones[1:])
    ok, bad = facet_pairing_complete(broken)
    assert not ok
    assert len(bad) == fan.dim
    assert all(set(b) <= set(fan.max_cones[0]) for b in bad)
    assert not is_complete(broken)
    with pytest.raises(InvariantViolation):
        check_smooth_complete(broken)


def test_disconnected_fan_not_complete():
    cp1 = Fan(1, ((1,), (-1,)), ((0,), (1,)))
    assert is_complete(cp1)
    empty_half = Fan(1, ((1,), (-1,)), ((0,),))
    assert not is_complete(empty_half)


def test_int_det():
    assert int_det([[2, 1], [1, 1]]) == 1
    assert int_det([[1, 2, 3], [4, 5, 6], [7, 8, 10]]) == -3
    assert int_det([[10**30, 1], [1, 1]]) == 10**30 - 1


unimodular = st.sampled_from(
    [
        [[1, 1, 0], [0, 1, 0], [0, 0, 1]],
        [[0, 1, 0], [1, 0, 0], [0, 0, -1]],
        [[1, 0, 0], [3, 1, 0], [-2, 5, 1]],
        [[2, 1, 0], [1, 1, 0], [0, 0, 1]],
    ]
)


@given(unimodular, st.integers(-2, 2), st.integers(-2, 2))
@settings(max_examples=30, deadline=None)
def test_unimodular_image_stays_smooth(g, a, b):
    f = build_family_fan(FamilyParams(3, 2, a, b))
    check_smooth_complete(f.transformed(g))


def test_json_roundtrip():
    p = FamilyParams(6, 4, 3, -2)
    f = star_subdivide(build_family_fan(p), edge_cone(p))
    g = loads(dumps(f))
    assert g == f and g.label == f.label


def test_json_bigint_rays():
    f = Fan(2, ((1, 0), (2**70, 1), (-1, 0)), ((0, 1),), "big")
    text = dumps(f)
    assert str(2**70) in text
    assert loads(text).rays[1] == (2**70, 1)
    data = json.loads(text)
    assert isinstance(data["rays"][1][0], str)


def test_json_malformed():
    with pytest.raises(MalformedFanError):
        loads('{"dim": 2, "rays": [[1, 0]]}')
