"""The reflexive polytope of a smooth toric Fano fan and its lattice data."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from math import factorial
from typing import Iterable, Sequence

import numpy as np

from .fan import Fan, dual_vertex, validate_smooth_fano
from .lattice import LatticeVector, RationalVector, determinant


@dataclass(frozen=True)
class FanoPolytope:
    """Δ = {y : <y, e> <= 1 for every ray e} together with its lattice data.

    ``vertices[j]`` is the vertex dual to ``fan.max_cones[j]``.
    """

    fan: Fan
    vertices: tuple[LatticeVector, ...]
    lattice_points: tuple[LatticeVector, ...]
    facet_interior_points: tuple[LatticeVector, ...]

    @property
    def dim(self) -> int:
        return self.fan.dim

    @property
    def facet_normals(self) -> tuple[LatticeVector, ...]:
        return self.fan.rays

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @cached_property
    def points_array(self) -> np.ndarray:
        return np.array(self.lattice_points, dtype=float).reshape(-1, self.dim)

    @cached_property
    def vertices_array(self) -> np.ndarray:
        return np.array(self.vertices, dtype=float).reshape(-1, self.dim)

    @cached_property
    def normals_array(self) -> np.ndarray:
        return np.array(self.fan.rays, dtype=float).reshape(-1, self.dim)

    @cached_property
    def cone_bases(self) -> np.ndarray:
        """Generator matrices of the maximal cones, shape (cones, n, n), rows = generators."""
        return np.array([self.fan.cone_rays(k) for k in range(len(self.fan.max_cones))], dtype=float)


@dataclass(frozen=True)
class Barycenter:
    point: RationalVector
    total_volume: Fraction

    @property
    def is_zero(self) -> bool:
        return all(x == 0 for x in self.point)


def polytope_from_fan(fan: Fan, check: bool = True) -> FanoPolytope:
    if check:
        report = validate_smooth_fano(fan, probes=0)
        if not report.is_fano:
            raise ValueError("fan is not smooth Fano: " + "; ".join(report.diagnostics))
    verts = []
    for k in range(len(fan.max_cones)):
        w = dual_vertex(fan, k)
        if any(x.denominator != 1 for x in w):
            raise ValueError("irregular cone")
        verts.append(tuple(int(x) for x in w))
    if len(set(verts)) != len(verts):
        raise ValueError("distinct maximal cones share a vertex; the fan is not Fano")
    points = _scan_lattice_points(fan.rays, verts)
    return FanoPolytope(fan, tuple(verts), points, _facet_interior(fan.rays, points))


def _scan_lattice_points(normals, vertices) -> tuple[LatticeVector, ...]:
    """Every integer point of the vertex bounding box passing all inequalities."""
    verts = np.array(vertices, dtype=np.int64)
    lo, hi = verts.min(axis=0), verts.max(axis=0)
    normals = np.array(normals, dtype=np.int64)
    n = len(lo)
    # vectorize over the trailing coordinates, loop over the leading one
    tail = np.stack(
        np.meshgrid(*[np.arange(lo[i], hi[i] + 1) for i in range(1, n)], indexing="ij"),
        axis=-1,
    ).reshape(-1, n - 1) if n > 1 else np.zeros((1, 0), dtype=np.int64)
    found = []
    for x0 in range(lo[0], hi[0] + 1):
        pts = np.hstack([np.full((len(tail), 1), x0, dtype=np.int64), tail])
        keep = (pts @ normals.T <= 1).all(axis=1)
        found.append(pts[keep])
    pts = np.vstack(found)
    return tuple(sorted(tuple(int(x) for x in p) for p in pts))


def _facet_interior(normals, points) -> tuple[LatticeVector, ...]:
    if not points:
        return ()
    levels = np.array(points, dtype=np.int64) @ np.array(normals, dtype=np.int64).T
    once = (levels == 1).sum(axis=1) == 1
    return tuple(p for p, keep in zip(points, once) if keep)


def lattice_points(delta: FanoPolytope) -> tuple[LatticeVector, ...]:
    return delta.lattice_points


def facet_interior_points(delta: FanoPolytope) -> tuple[LatticeVector, ...]:
    """Lattice points on exactly one facet, i.e. in the relative interior of a facet.

    In dimension 1 the facets are the two endpoints, so they are returned.
    """
    return delta.facet_interior_points


def is_centrally_symmetric(points: Iterable[Sequence[int]]) -> bool:
    s = {tuple(p) for p in points}
    return all(tuple(-x for x in p) in s for p in s)


def _pulling_triangulation(delta: FanoPolytope) -> list[tuple[int, ...]]:
    """Triangulate every facet by recursively pulling its lex-smallest vertex.

    A face of Δ is labelled by the fan cone τ it is dual to; its vertices are
    the dual vertices of the maximal cones containing τ and its facets are the
    faces of the cones τ ∪ {e}. Returns maximal simplices as vertex-index tuples
    (each a full facet simplex, to be coned from the origin).
    """
    fan = delta.fan
    cone_sets = [frozenset(c) for c in fan.max_cones]
    order = sorted(range(len(delta.vertices)), key=lambda j: delta.vertices[j])
    rank = {j: r for r, j in enumerate(order)}

    @lru_cache(maxsize=None)
    def triangulate(tau: frozenset) -> tuple[tuple[int, ...], ...]:
        verts = [j for j, c in enumerate(cone_sets) if tau <= c]
        if len(tau) == fan.dim:
            return ((verts[0],),)
        apex = min(verts, key=rank.__getitem__)
        out = []
        candidates = set().union(*(cone_sets[j] for j in verts)) - tau
        for e in sorted(candidates):
            if e in cone_sets[apex]:
                continue
            out.extend((apex,) + s for s in triangulate(tau | {e}))
        return tuple(out)

    simplices = []
    for e in range(len(fan.rays)):
        simplices.extend(triangulate(frozenset([e])))
    return simplices


def barycenter(delta: FanoPolytope) -> Barycenter:
    """Exact centroid of Δ from a triangulation coned over the origin."""
    n = delta.dim
    total = 0
    moment = [0] * n
    for simplex in _pulling_triangulation(delta):
        pts = [delta.vertices[j] for j in simplex]
        vol = abs(determinant(pts))
        total += vol
        for i in range(n):
            moment[i] += vol * sum(p[i] for p in pts)
    # simplex centroid is (0 + sum of vertices) / (n + 1); volumes carry 1/n!
    point = tuple(Fraction(m, total * (n + 1)) for m in moment)
    return Barycenter(point, Fraction(total, factorial(n)))
