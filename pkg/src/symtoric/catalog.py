"""Example families of symmetric toric Fano manifolds and toric del Pezzo surfaces."""

from __future__ import annotations

from dataclasses import dataclass
from math import atan2, pi

from .fan import Fan, build_fan, validate_smooth_fano
from .lattice import UnimodularMap, primitive, transpose
from .symmetry import _isomorphisms

FAMILIES = ("V", "S", "X", "W")


@dataclass(frozen=True)
class FamilySpec:
    """One member of a family: V_k, S_{m,k}, X_{m,k} or W_m.

    ``params`` is ``(k,)`` for V, ``(m, k)`` for S and X, ``(m,)`` for W.
    """

    family: str
    params: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(int(p) for p in self.params))
        f, p = self.family, self.params
        if f not in FAMILIES:
            raise ValueError(f"unknown family {f!r}; expected one of {FAMILIES}")
        expected = {"V": 1, "S": 2, "X": 2, "W": 1}[f]
        if len(p) != expected:
            raise ValueError(f"family {f} takes {expected} parameter(s)")
        ok = {
            "V": lambda: p[0] >= 1,
            "S": lambda: 1 <= p[1] <= p[0],
            "X": lambda: 0 <= p[1] <= p[0],
            "W": lambda: p[0] >= 1,
        }[f]()
        if not ok:
            raise ValueError(f"parameters {p} out of range for family {f}")

    @property
    def dim(self) -> int:
        m = self.params[0]
        return {"V": 2 * m, "S": 2 * m + 1, "X": 2 * m + 2, "W": 2 * m}[self.family]

    @property
    def name(self) -> str:
        if self.family in ("S", "X"):
            return f"{self.family}_{{{self.params[0]},{self.params[1]}}}"
        return f"{self.family}_{self.params[0]}"


def _basis(n: int):
    def e(i: int) -> list[int]:  # 1-based basis vector
        v = [0] * n
        v[i - 1] = 1
        return v

    return e


def _lin(n: int, *terms: tuple[int, list[int]]) -> list[int]:
    out = [0] * n
    for c, v in terms:
        out = [x + c * y for x, y in zip(out, v)]
    return out


def family_rays(spec: FamilySpec) -> list[list[int]]:
    n = spec.dim
    e = _basis(n)
    if spec.family == "V":
        rays = [e(i) for i in range(1, n + 1)]
        rays.append([1] * n)
        return rays + [[-x for x in r] for r in rays]
    m = spec.params[0]
    if spec.family == "S":
        k = spec.params[1]
        rays = [e(i) for i in range(1, 2 * m + 1)] + [e(2 * m + 1), _lin(n, (-1, e(2 * m + 1)))]
        rays.append(_lin(n, *[(-1, e(i)) for i in range(1, m + 1)], (-k, e(2 * m + 1))))
        rays.append(_lin(n, *[(-1, e(i)) for i in range(m + 1, 2 * m + 1)], (k, e(2 * m + 1))))
        return rays
    if spec.family == "X":
        k = spec.params[1]
        rays = [e(i) for i in range(1, 2 * m + 1)]
        for v in (e(2 * m + 1), e(2 * m + 2), _lin(n, (1, e(2 * m + 1)), (1, e(2 * m + 2)))):
            rays += [v, [-x for x in v]]
        if m == 0:
            # both extra generators vanish when m = k = 0; what remains is the hexagon fan
            return rays
        rays.append(_lin(n, *[(-1, e(i)) for i in range(1, m + 1)], (k, e(2 * m + 1))))
        rays.append(_lin(n, *[(-1, e(i)) for i in range(m + 1, 2 * m + 1)], (-k, e(2 * m + 1))))
        return rays
    rays = [e(i) for i in range(1, 2 * m + 1)]
    rays.append(_lin(n, *[(-1, e(i)) for i in range(1, m + 1)]))
    rays.append(_lin(n, *[(-1, e(i)) for i in range(m + 1, 2 * m + 1)]))
    rays.append([-1] * n)
    rays += [_lin(n, (1, e(i)), (1, e(i + m))) for i in range(1, m + 1)]
    return rays


def family_fan(spec: FamilySpec) -> Fan:
    return build_fan(spec.dim, family_rays(spec), name=spec.name)


def _map_from_images(n: int, images: dict[int, list[int]]) -> UnimodularMap:
    """The linear map with the given images of e_1..e_n (1-based keys)."""
    return UnimodularMap(transpose([images[i] for i in range(1, n + 1)]))


def family_witnesses(spec: FamilySpec) -> tuple[UnimodularMap, ...]:
    """The explicit automorphisms α, β (or -id for V_k) with no common fixed vector."""
    n = spec.dim
    e = _basis(n)
    if spec.family == "V":
        return (UnimodularMap(tuple(tuple(-int(i == j) for j in range(n)) for i in range(n))),)
    m = spec.params[0]
    # coefficient of e_{2m+1} in the images of e_m and e_{2m}
    k = spec.params[1] if spec.family in ("S", "X") else 0
    first, second = (-k, k) if spec.family == "S" else (k, -k)

    alpha: dict[int, list[int]] = {}
    beta: dict[int, list[int]] = {}
    for i in range(1, m):
        alpha[i] = e(i + 1)
        alpha[i + m] = e(i + m + 1)
    if m:
        alpha[m] = _lin(n, *[(-1, e(i)) for i in range(1, m + 1)])
        alpha[2 * m] = _lin(n, *[(-1, e(i)) for i in range(m + 1, 2 * m + 1)])
    if k:
        alpha[m] = _lin(n, (1, alpha[m]), (first, e(2 * m + 1)))
        alpha[2 * m] = _lin(n, (1, alpha[2 * m]), (second, e(2 * m + 1)))
    for i in range(1, m + 1):
        beta[i] = e(i + m)
        beta[i + m] = e(i)
    for j in range(2 * m + 1, n + 1):
        alpha[j] = e(j)
        beta[j] = _lin(n, (-1, e(j)))
    return _map_from_images(n, alpha), _map_from_images(n, beta)


def lattice_equivalent(f1: Fan, f2: Fan) -> bool:
    """True iff some element of GL(n, Z) carries f1's rays and cones onto f2's."""
    if f1.dim != f2.dim:
        raise ValueError("dimension mismatch")
    return next(_isomorphisms(f1, f2, first_only=True), None) is not None


NAMED_SURFACES = {
    "P1": (1, [(1,), (-1,)]),
    "P2": (2, [(1, 0), (0, 1), (-1, -1)]),
    "P1xP1": (2, [(1, 0), (0, 1), (-1, 0), (0, -1)]),
    "Bl1P2": (2, [(1, 0), (0, 1), (1, 1), (-1, -1)]),
    "Bl2P2": (2, [(1, 0), (0, 1), (1, 1), (-1, -1), (0, -1)]),
    "V1": (2, [(1, 0), (0, 1), (-1, 0), (0, -1), (1, 1), (-1, -1)]),
}


def named_fan(name: str) -> Fan:
    dim, rays = NAMED_SURFACES[name]
    return build_fan(dim, rays, name=name)


def _det2(u, v) -> int:
    return u[0] * v[1] - u[1] * v[0]


def enumerate_smooth_fano_surfaces(bound: int = 3) -> list[Fan]:
    """Smooth toric Fano surfaces, one per lattice-equivalence class.

    Walks counterclockwise cycles of primitive vectors with coordinates in
    [-bound, bound] in which consecutive rays form a lattice basis and every
    ray is a strict vertex of the ray polygon (u_prev + u_next = b u with
    b <= 1). Each cycle starts at its lexicographically smallest ray.
    """
    box = range(-bound, bound + 1)
    vecs = sorted({primitive((x, y)) for x in box for y in box if (x, y) != (0, 0)})
    vecs = [v for v in vecs if max(abs(v[0]), abs(v[1])) <= bound]
    found: list[Fan] = []

    def angle_from(start, v) -> float:
        a = atan2(v[1], v[0]) - atan2(start[1], start[0])
        return a % (2 * pi)

    def locally_convex(prev, cur, nxt) -> bool:
        s = (prev[0] + nxt[0], prev[1] + nxt[1])
        # cur is primitive and s is an integer multiple of it
        b = s[0] // cur[0] if cur[0] else s[1] // cur[1]
        return (b * cur[0], b * cur[1]) == s and b <= 1

    def walk(cycle: list):
        start, cur = cycle[0], cycle[-1]
        for v in vecs:
            if _det2(cur, v) != 1:
                continue
            if v == start:
                if len(cycle) >= 3 and locally_convex(cycle[-2], cur, v) and locally_convex(cur, v, cycle[1]):
                    candidates.append(list(cycle))
                continue
            if v < start or v in cycle or angle_from(start, v) <= angle_from(start, cur):
                continue
            if len(cycle) >= 2 and not locally_convex(cycle[-2], cur, v):
                continue
            cycle.append(v)
            walk(cycle)
            cycle.pop()

    candidates: list[list] = []
    for v in vecs:
        walk([v])

    for cycle in candidates:
        r = len(cycle)
        fan = build_fan(2, cycle, [(i, (i + 1) % r) for i in range(r)])
        if not validate_smooth_fano(fan, probes=64).is_fano:
            continue
        if not any(lattice_equivalent(fan, g) for g in found):
            found.append(fan)

    # label each class by a familiar representative when one matches
    named = [named_fan(k) for k in NAMED_SURFACES if NAMED_SURFACES[k][0] == 2]
    out = []
    for fan in found:
        rep = next((g for g in named if lattice_equivalent(fan, g)), fan)
        out.append(rep)
    out.sort(key=lambda f: (len(f.rays), f.name))
    return out
