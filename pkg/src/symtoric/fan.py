"""Complete regular fans and the smooth toric Fano check."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .lattice import (
    LatticeVector,
    RationalVector,
    determinant,
    dot,
    matrix_rank,
    primitive,
    solve_rational,
)


@dataclass(frozen=True)
class Fan:
    """A simplicial fan given by primitive rays and maximal cones.

    Rays are stored in lexicographic order and every cone is a sorted tuple of
    ray indices; the cone list itself is sorted. Two fans built from the same
    data therefore compare equal regardless of input order.
    """

    dim: int
    rays: tuple[LatticeVector, ...]
    max_cones: tuple[tuple[int, ...], ...]
    name: str = field(default="", compare=False)

    def cone_rays(self, index: int) -> tuple[LatticeVector, ...]:
        return tuple(self.rays[i] for i in self.max_cones[index])

    def ray_degrees(self) -> tuple[int, ...]:
        """Number of maximal cones containing each ray."""
        counts = Counter(i for cone in self.max_cones for i in cone)
        return tuple(counts[i] for i in range(len(self.rays)))

    def cones(self) -> set[frozenset[int]]:
        """All nonempty faces of the maximal cones, as sets of ray indices."""
        out: set[frozenset[int]] = set()
        for cone in self.max_cones:
            for k in range(1, len(cone) + 1):
                out.update(frozenset(c) for c in combinations(cone, k))
        return out


@dataclass
class ValidationReport:
    is_primitive_ok: bool
    is_complete: bool
    is_regular: bool
    is_fano: bool
    diagnostics: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.is_fano

    def to_dict(self) -> dict:
        return {
            "is_primitive_ok": self.is_primitive_ok,
            "is_complete": self.is_complete,
            "is_regular": self.is_regular,
            "is_fano": self.is_fano,
            "diagnostics": list(self.diagnostics),
        }


def _hull_facets(rays: Sequence[LatticeVector], dim: int) -> list[tuple[int, ...]]:
    # n-subsets whose affine hyperplane <w, .> = 1 has every other ray strictly below
    facets = []
    for subset in combinations(range(len(rays)), dim):
        mat = [rays[i] for i in subset]
        if determinant(mat) == 0:
            continue
        w = solve_rational(mat, [1] * dim)
        levels = [dot(w, r) for r in rays]
        if any(x > 1 for x in levels):
            continue
        on_facet = [i for i, x in enumerate(levels) if x == 1]
        if len(on_facet) != dim:
            raise ValueError("non-simplicial facet, explicit max_cones required")
        facets.append(subset)
    return facets


def _facet_pairing_ok(max_cones: Sequence[Sequence[int]]) -> tuple[bool, list[str]]:
    faces = Counter()
    for cone in max_cones:
        for ridge in combinations(sorted(cone), len(cone) - 1):
            faces[ridge] += 1
    bad = [ridge for ridge, k in faces.items() if k != 2]
    return not bad, [f"ridge {list(r)} lies in {faces[r]} maximal cone(s)" for r in bad[:5]]


def build_fan(
    dim: int,
    raw_rays: Iterable[Sequence[int]],
    max_cones: Iterable[Sequence[int]] | None = None,
    name: str = "",
) -> Fan:
    """Normalize rays and either canonicalize the given cones or infer them.

    Without ``max_cones`` the fan is taken to be the face fan of the convex
    hull of the rays, which requires every hull facet to carry exactly ``dim``
    rays.
    """
    raw = [tuple(int(x) for x in r) for r in raw_rays]
    if not raw:
        raise ValueError("empty ray set")
    if any(len(r) != dim for r in raw):
        raise ValueError(f"every ray must have length {dim}")
    cone_lists = None if max_cones is None else [[int(i) for i in c] for c in max_cones]
    for cone in cone_lists or []:
        for i in cone:
            if not 0 <= i < len(raw):
                raise ValueError(f"index {i} out of range")
    prim = [primitive(r) for r in raw]
    if len(set(prim)) != len(prim):
        raise ValueError("duplicate rays after primitive normalization")
    if matrix_rank(prim) < dim:
        raise ValueError("degenerate ray set")

    order = sorted(range(len(prim)), key=lambda i: prim[i])
    rays = tuple(prim[i] for i in order)
    relabel = {old: new for new, old in enumerate(order)}

    if cone_lists is None:
        cones = _hull_facets(rays, dim)
        if not cones or not _facet_pairing_ok(cones)[0]:
            raise ValueError("degenerate ray set")
    else:
        cones = []
        for cone in cone_lists:
            if len(cone) != dim or len(set(cone)) != dim:
                raise ValueError(f"maximal cone {cone} must have {dim} distinct rays")
            cones.append(tuple(relabel[i] for i in cone))
    canon = tuple(sorted(tuple(sorted(c)) for c in cones))
    if len(set(canon)) != len(canon):
        raise ValueError("duplicate maximal cones")
    return Fan(dim, rays, canon, name)


def _adjugate(mat: Sequence[Sequence[int]], det: int) -> list[list[int]]:
    n = len(mat)
    cols = [solve_rational(mat, [int(i == j) for i in range(n)]) for j in range(n)]
    return [[int(cols[j][i] * det) for j in range(n)] for i in range(n)]


def _probe_directions(fan: Fan, probes: int, seed: int) -> tuple[bool, list[str]]:
    """Locate random integer directions; each must lie inside exactly one cone."""
    rng = np.random.default_rng(seed)
    dirs = rng.integers(-(10**6), 10**6, size=(probes, fan.dim), endpoint=True)
    hits = np.zeros(probes, dtype=np.int64)
    on_boundary = np.zeros(probes, dtype=bool)
    for k in range(len(fan.max_cones)):
        gens = fan.cone_rays(k)
        det = determinant(gens)
        if det == 0:
            continue
        # coefficients of d in the generator basis, scaled by |det| to stay integral
        adj = np.array(_adjugate(gens, det), dtype=np.int64)
        coeffs = (dirs @ adj) * (1 if det > 0 else -1)
        inside = (coeffs >= 0).all(axis=1)
        on_boundary |= inside & (coeffs == 0).any(axis=1)
        hits += inside
    bad = np.flatnonzero(~on_boundary & (hits != 1))
    msgs = [f"direction {dirs[i].tolist()} lies in {hits[i]} maximal cones" for i in bad[:5]]
    return bad.size == 0, msgs


def validate_smooth_fano(fan: Fan, probes: int = 1000, seed: int = 0) -> ValidationReport:
    """Check primitivity, regularity, completeness and the Fano condition.

    Completeness is checked twice: every ridge of a maximal cone must lie in
    exactly two maximal cones, and ``probes`` random directions must each be
    located in exactly one cone. The Fano test asks that, for every maximal
    cone, the linear form equal to 1 on its generators is < 1 on all other
    rays; this makes every ray a vertex of the ray hull with 0 inside it.
    """
    diag: list[str] = []
    n = fan.dim

    primitive_ok = len(set(fan.rays)) == len(fan.rays)
    for r in fan.rays:
        if len(r) != n or primitive(r) != r:
            primitive_ok = False
            diag.append(f"ray {list(r)} is not primitive")
    if len(set(fan.rays)) != len(fan.rays):
        diag.append("rays are not pairwise distinct")

    dets = [determinant(fan.cone_rays(k)) for k in range(len(fan.max_cones))]
    regular = True
    for cone, d in zip(fan.max_cones, dets):
        if abs(d) != 1:
            regular = False
            diag.append(f"cone {list(cone)} has determinant {d}")

    complete, msgs = _facet_pairing_ok(fan.max_cones)
    diag.extend(msgs)
    if any(d == 0 for d in dets):
        complete = False
    if complete and probes:
        probe_ok, msgs = _probe_directions(fan, probes, seed)
        complete = probe_ok
        diag.extend(msgs)

    fano = primitive_ok and regular and complete
    if fano:
        for k, cone in enumerate(fan.max_cones):
            w = solve_rational(fan.cone_rays(k), [1] * n)
            members = set(cone)
            for i, r in enumerate(fan.rays):
                if i not in members and dot(w, r) >= 1:
                    fano = False
                    diag.append(
                        f"ray {list(r)} is not strictly below the facet of cone {list(cone)}"
                    )
    elif not diag:
        diag.append("Fano test skipped")
    return ValidationReport(primitive_ok, complete, regular, fano, diag)


def dual_vertex(fan: Fan, cone_index: int) -> RationalVector:
    """The point w with <w, e> = 1 for each generator e of the given cone."""
    try:
        return solve_rational(fan.cone_rays(cone_index), [1] * fan.dim)
    except ZeroDivisionError:
        raise ValueError("irregular cone") from None
