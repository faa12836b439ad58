import pytest

from symtoric.catalog import (
    FamilySpec,
    enumerate_smooth_fano_surfaces,
    family_fan,
    family_rays,
    family_witnesses,
    lattice_equivalent,
    named_fan,
)
from symtoric.fan import build_fan
from conftest import FAMILY_SPECS, fan_of


def expected_ray_count(spec):
    m = spec.params[0]
    if spec.family == "V":
        return 2 * spec.dim + 2
    if spec.family == "S":
        return 2 * m + 4
    if spec.family == "X":
        return 2 * m + 8 if m else 6
    return 3 * m + 3


def test_ray_counts(family_spec):
    assert len(fan_of(family_spec).rays) == expected_ray_count(family_spec)
    assert fan_of(family_spec).dim == family_spec.dim


def test_v1_rays():
    fan = family_fan(FamilySpec("V", (1,)))
    assert set(fan.rays) == {(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1)}


def test_w2_rays():
    rays = family_rays(FamilySpec("W", (2,)))
    assert rays == [
        [1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1],
        [-1, -1, 0, 0], [0, 0, -1, -1], [-1, -1, -1, -1],
        [1, 0, 1, 0], [0, 1, 0, 1],
    ]


def test_s11_rays():
    rays = family_rays(FamilySpec("S", (1, 1)))
    assert sorted(map(tuple, rays)) == sorted([(1, 0, 0), (0, 1, 0), (0, 0, 1), (0, 0, -1), (-1, 0, -1), (0, -1, 1)])


def test_x00_is_the_hexagon():
    assert lattice_equivalent(family_fan(FamilySpec("X", (0, 0))), named_fan("V1"))


@pytest.mark.parametrize(
    "family, params",
    [("V", (0,)), ("S", (1, 2)), ("S", (2, 0)), ("X", (1, 2)), ("W", (0,)), ("Q", (1,)), ("V", (1, 1))],
)
def test_out_of_range_parameters(family, params):
    with pytest.raises(ValueError):
        FamilySpec(family, params)


def test_witness_orders():
    alpha, beta = family_witnesses(FamilySpec("W", (2,)))
    assert (alpha.order(), beta.order()) == (3, 2)
    alpha, beta = family_witnesses(FamilySpec("X", (1, 0)))
    assert (alpha.order(), beta.order()) == (2, 2)
    (neg,) = family_witnesses(FamilySpec("V", (2,)))
    assert neg.matrix == tuple(tuple(-int(i == j) for j in range(4)) for i in range(4))


def test_enumeration_gives_five_classes():
    surfaces = enumerate_smooth_fano_surfaces()
    assert [f.name for f in surfaces] == ["P2", "Bl1P2", "P1xP1", "Bl2P2", "V1"]
    assert [len(f.rays) for f in surfaces] == [3, 4, 4, 5, 6]


def test_wider_bound_adds_no_class():
    assert len(enumerate_smooth_fano_surfaces(bound=5)) == 5


def test_lattice_equivalence_examples():
    p2 = named_fan("P2")
    swapped = build_fan(2, [(0, 1), (1, 0), (-1, -1)])
    assert lattice_equivalent(p2, swapped)
    assert not lattice_equivalent(p2, named_fan("P1xP1"))
    assert not lattice_equivalent(named_fan("Bl1P2"), named_fan("P1xP1"))
    # P2 blown up at its three torus-fixed points, then moved by a unimodular map
    blown = [(1, 0), (0, 1), (-1, -1), (1, 1), (-1, 0), (0, -1)]
    moved = [(2 * x + y, x + y) for x, y in blown]
    assert lattice_equivalent(named_fan("V1"), build_fan(2, moved))
    with pytest.raises(ValueError):
        lattice_equivalent(p2, named_fan("P1"))


def test_lattice_equivalence_is_an_equivalence_relation():
    fans = [named_fan(n) for n in ("P2", "P1xP1", "Bl1P2", "Bl2P2", "V1")]
    fans.append(build_fan(2, [(1, 0), (1, 1), (-1, 0), (-1, -1)]))  # P1xP1 in other coordinates
    eq = [[lattice_equivalent(a, b) for b in fans] for a in fans]
    k = len(fans)
    assert all(eq[i][i] for i in range(k))
    assert all(eq[i][j] == eq[j][i] for i in range(k) for j in range(k))
    assert all(not (eq[i][j] and eq[j][l]) or eq[i][l] for i in range(k) for j in range(k) for l in range(k))
    assert eq[1][5]


def test_family_names():
    assert FamilySpec("S", (2, 1)).name == "S_{2,1}"
    assert FamilySpec("V", (3,)).name == "V_3"
    assert {s.name for s in FAMILY_SPECS} >= {"X_{0,0}", "W_3"}
