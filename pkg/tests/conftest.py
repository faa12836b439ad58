from functools import lru_cache

import pytest

from symtoric.catalog import FamilySpec, family_fan, named_fan
from symtoric.polytope import polytope_from_fan
from symtoric.symmetry import fan_automorphisms

FAMILY_SPECS = (
    [FamilySpec("V", (k,)) for k in (1, 2, 3)]
    + [FamilySpec("S", (m, k)) for m in (1, 2, 3) for k in range(1, m + 1)]
    + [FamilySpec("X", (m, k)) for m in (0, 1, 2) for k in range(0, m + 1)]
    + [FamilySpec("W", (m,)) for m in (1, 2, 3)]
)

SYMMETRIC_SURFACES = ("P1", "P2", "P1xP1", "V1")


@lru_cache(maxsize=None)
def fan_of(key):
    return named_fan(key) if isinstance(key, str) else family_fan(key)


@lru_cache(maxsize=None)
def polytope_of(key):
    return polytope_from_fan(fan_of(key))


@lru_cache(maxsize=None)
def group_of(key):
    return fan_automorphisms(fan_of(key))


def key_id(key):
    return key if isinstance(key, str) else key.name


@pytest.fixture(params=FAMILY_SPECS, ids=key_id)
def family_spec(request):
    return request.param
