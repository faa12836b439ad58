"""Fan automorphism groups and the symmetric criterion."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Sequence

import numpy as np

from .fan import Fan
from .lattice import (
    RationalVector,
    UnimodularMap,
    determinant,
    fixed_subspace,
    inverse_rational,
    transpose,
)


@dataclass(frozen=True)
class SymmetryGroup:
    elements: tuple[UnimodularMap, ...]
    generators: tuple[UnimodularMap, ...]

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def dim(self) -> int:
        return self.elements[0].dim

    def __contains__(self, g: UnimodularMap) -> bool:
        return g in set(self.elements)

    def dual_generators(self) -> tuple[UnimodularMap, ...]:
        return tuple(g.dual() for g in self.generators)


@dataclass(frozen=True)
class SymmetryVerdict:
    is_symmetric: bool
    fixed_space_basis: tuple[RationalVector, ...]
    group_order: int


class _FanIndex:
    """Lookup tables used by the isomorphism search."""

    def __init__(self, fan: Fan):
        self.fan = fan
        self.ray_index = {r: i for i, r in enumerate(fan.rays)}
        self.degree = fan.ray_degrees()
        pairs = Counter()
        for cone in fan.max_cones:
            pairs.update(combinations(cone, 2))
        self.pair_degree = pairs
        self.cone_array = np.array(fan.max_cones, dtype=np.int64)
        self.cone_masks = np.sort(self._masks(np.arange(len(fan.rays))))
        self.rays_T = np.array(fan.rays, dtype=np.int64).T

    def pair(self, i: int, j: int) -> int:
        return self.pair_degree[(i, j) if i < j else (j, i)]

    def _masks(self, perm: np.ndarray) -> np.ndarray:
        return (np.int64(1) << perm[self.cone_array]).sum(axis=1)

    def invariants(self) -> tuple:
        return (
            self.fan.dim,
            len(self.fan.rays),
            len(self.fan.max_cones),
            tuple(sorted(self.degree)),
        )


def _isomorphisms(src: Fan, dst: Fan, first_only: bool = False) -> Iterator[tuple[UnimodularMap, tuple[int, ...]]]:
    """Unimodular maps carrying src's rays and maximal cones onto dst's.

    Any such map sends the base cone of ``src`` onto some maximal cone of
    ``dst``, and is pinned down by where the base generators go. The base
    generators are assigned one at a time, keeping only targets with matching
    cone counts and pairwise co-occurrence counts.
    """
    a, b = _FanIndex(src), _FanIndex(dst)
    if len(src.rays) > 62 or len(dst.rays) > 62:
        raise ValueError("fans with more than 62 rays are not supported")
    if a.invariants() != b.invariants():
        return
    n = src.dim
    base = src.max_cones[0]
    base_cols = transpose([src.rays[i] for i in base])
    det = determinant(base_cols)
    if det == 0:
        raise ValueError("irregular cone")
    # det * inverse, exact and integral
    base_adj = np.array(
        [[int(x * det) for x in row] for row in inverse_rational(base_cols)], dtype=np.int64
    )

    for target in dst.max_cones:
        def extend(assigned: list[int]) -> Iterator[list[int]]:
            k = len(assigned)
            if k == n:
                yield list(assigned)
                return
            g = base[k]
            for t in target:
                if t in assigned or a.degree[g] != b.degree[t]:
                    continue
                if any(a.pair(base[j], g) != b.pair(assigned[j], t) for j in range(k)):
                    continue
                assigned.append(t)
                yield from extend(assigned)
                assigned.pop()

        for images in extend([]):
            scaled = b.rays_T[:, images] @ base_adj
            if (scaled % det).any():
                continue
            mat = scaled // det
            image = mat @ a.rays_T
            perm = []
            for col in image.T:
                j = b.ray_index.get(tuple(int(x) for x in col))
                if j is None:
                    break
                perm.append(j)
            else:
                if len(set(perm)) != len(perm):
                    continue
                p = np.array(perm, dtype=np.int64)
                if not np.array_equal(np.sort(a._masks(p)), b.cone_masks):
                    continue
                try:
                    g = UnimodularMap(mat.tolist())
                except ValueError:
                    continue
                yield g, tuple(perm)
                if first_only:
                    return


def _compose(p: Sequence[int], q: Sequence[int]) -> tuple[int, ...]:
    """Permutation p after q."""
    return tuple(p[i] for i in q)


def _perm_closure(gens: Sequence[tuple[int, ...]], size: int) -> set[tuple[int, ...]]:
    identity = tuple(range(size))
    seen = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for h in frontier:
            for g in gens:
                x = _compose(g, h)
                if x not in seen:
                    seen.add(x)
                    nxt.append(x)
        frontier = nxt
    return seen


def fan_automorphisms(fan: Fan) -> SymmetryGroup:
    """All lattice automorphisms of ``fan``, with a small generating set.

    The elements are tracked through the ray permutations they induce (which
    determine them, since the rays span). A generating set is picked greedily
    and the element list is checked to equal the group it generates.
    """
    found = list(_isomorphisms(fan, fan))
    if not found:
        raise ValueError("automorphism search found no identity; invalid fan")
    perms = [p for _, p in found]
    by_perm = dict(zip(perms, (g for g, _ in found)))
    identity = tuple(range(len(fan.rays)))
    if identity not in by_perm:
        raise AssertionError("identity missing from automorphism search")

    gens: list[tuple[int, ...]] = []
    span = {identity}
    for p in sorted(perms):
        if p not in span:
            gens.append(p)
            span = _perm_closure(gens, len(identity))
    if span != set(perms):
        raise AssertionError("automorphism set is not closed under composition")

    elements = tuple(by_perm[p] for p in sorted(perms))
    return SymmetryGroup(elements, tuple(by_perm[p] for p in gens))


def group_closure(maps: Iterable, bound: int = 10**6) -> SymmetryGroup:
    """Smallest group containing ``maps`` (matrices or UnimodularMaps)."""
    gens = tuple(m if isinstance(m, UnimodularMap) else UnimodularMap(m) for m in maps)
    if not gens:
        raise ValueError("group_closure needs at least one map")
    n = gens[0].dim
    if any(g.dim != n for g in gens):
        raise ValueError("dimension mismatch")
    identity = UnimodularMap.identity(n)
    seen = {identity}
    order = [identity]
    frontier = [identity]
    while frontier:
        nxt = []
        for h in frontier:
            for g in gens:
                x = g @ h
                if x not in seen:
                    seen.add(x)
                    order.append(x)
                    nxt.append(x)
                    if len(seen) > bound:
                        raise ValueError(f"group closure exceeds {bound} elements")
        frontier = nxt
    return SymmetryGroup(tuple(order), gens)


def permutes_fan(fan: Fan, g: UnimodularMap) -> bool:
    """True when ``g`` maps the ray set and the maximal-cone set onto themselves."""
    index = {r: i for i, r in enumerate(fan.rays)}
    perm = []
    for r in fan.rays:
        j = index.get(g(r))
        if j is None:
            return False
        perm.append(j)
    cones = {frozenset(c) for c in fan.max_cones}
    return {frozenset(perm[i] for i in c) for c in fan.max_cones} == cones


def verify_subgroup(fan: Fan, maps: Iterable) -> bool:
    maps = [m if isinstance(m, UnimodularMap) else UnimodularMap(m) for m in maps]
    if any(g.dim != fan.dim for g in maps):
        raise ValueError("dimension mismatch")
    return all(permutes_fan(fan, g) for g in maps)


def is_symmetric(fan: Fan, group: SymmetryGroup) -> SymmetryVerdict:
    """Decide whether the only W-invariant character is the trivial one.

    W acts on M by the inverse transpose. The fixed space of a finite group
    is the fixed space of any generating set, so only generators are used.
    The N-side fixed space must have the same dimension (dual representations).
    """
    if group.dim != fan.dim:
        raise ValueError("dimension mismatch")
    gens = group.generators or (UnimodularMap.identity(fan.dim),)
    m_side = fixed_subspace(g.dual() for g in gens)
    n_side = fixed_subspace(gens)
    if len(m_side) != len(n_side):
        raise AssertionError("fixed spaces on M and N have different dimensions")
    return SymmetryVerdict(not m_side, tuple(m_side), group.order)
