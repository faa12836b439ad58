"""Numerical checks on the log-sum-exp potential of a toric Fano polytope.

Everything here works on ``y`` in N_R with shape ``(..., n)`` and broadcasts
over the leading axes. The potential is

    u(y) = log sum_{v in L(Δ)} exp(<v, y>)

and ``ubar(y) = max_j <w_j, y>`` over the vertices w_j of Δ. On a maximal cone
spanned by a lattice basis b_1..b_n, ``ubar(sum t_i b_i) = t_1 + ... + t_n``,
which is what the integrators below exploit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy import optimize

from .lattice import UnimodularMap
from .polytope import FanoPolytope
from .symmetry import SymmetryGroup

DEFAULT_SEED = 0xE2024
POSITIVITY_TOL = 1e-9
CHUNK = 20_000
QUAD_ORDER = 96


def _lse(s: np.ndarray) -> np.ndarray:
    m = s.max(axis=-1, keepdims=True)
    return m[..., 0] + np.log(np.exp(s - m).sum(axis=-1))


def _softmax(s: np.ndarray) -> np.ndarray:
    e = np.exp(s - s.max(axis=-1, keepdims=True))
    return e / e.sum(axis=-1, keepdims=True)


def _exponents(points: np.ndarray, y, log_weights=None) -> np.ndarray:
    s = np.asarray(y, dtype=float) @ points.T
    if log_weights is not None:
        s = s + log_weights
    return s


def u_tilde(delta: FanoPolytope, y) -> np.ndarray:
    """log sum_v exp(<v, y>), shifted by the max exponent for stability."""
    return _lse(_exponents(delta.points_array, y))


def u_bar(delta: FanoPolytope, y) -> np.ndarray:
    return (np.asarray(y, dtype=float) @ delta.vertices_array.T).max(axis=-1)


def envelope_gap(delta: FanoPolytope, y) -> np.ndarray:
    """u - ubar computed without cancellation.

    The maximum of <v, y> over L(Δ) is attained at a vertex, so the gap is
    log(1 + sum of the remaining shifted terms).
    """
    s = _exponents(delta.points_array, y)
    shifted = s - s.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    top = np.argmax(shifted, axis=-1)
    rest = e.sum(axis=-1) - np.take_along_axis(e, top[..., None], axis=-1)[..., 0]
    return np.log1p(np.clip(rest, 0.0, None))


def _moments(points, y, log_weights=None):
    p = _softmax(_exponents(points, y, log_weights))
    mean = p @ points
    second = np.einsum("...k,ki,kj->...ij", p, points, points)
    return p, mean, second - mean[..., :, None] * mean[..., None, :]


def moment_map(delta: FanoPolytope, y) -> np.ndarray:
    """Gradient of u: the softmax-weighted mean of L(Δ)."""
    return _softmax(_exponents(delta.points_array, y)) @ delta.points_array


def hessian(delta: FanoPolytope, y) -> np.ndarray:
    """Hessian of u: the softmax-weighted covariance of L(Δ)."""
    return _moments(delta.points_array, y)[2]


def facet_slack(delta: FanoPolytope, y) -> np.ndarray:
    """1 - <moment_map(y), e> for every facet normal e, as a sum of nonnegative terms."""
    p = _softmax(_exponents(delta.points_array, y))
    slack = 1.0 - delta.points_array @ delta.normals_array.T  # (k, facets), all >= 0
    return p @ slack


@dataclass
class EnvelopeReport:
    ok: bool
    min_gap: float
    max_gap: float
    upper_constant: float
    witness: np.ndarray | None = None


def envelope_check(delta: FanoPolytope, samples) -> EnvelopeReport:
    """Check ubar < u <= ubar + log|L(Δ)| on the given sample points."""
    y = np.atleast_2d(np.asarray(samples, dtype=float))
    gap = envelope_gap(delta, y)
    upper = math.log(len(delta.lattice_points))
    bad = (gap <= 0) | (gap > upper + 1e-12)
    witness = y[np.argmax(bad)] if bad.any() else None
    return EnvelopeReport(not bad.any(), float(gap.min()), float(gap.max()), upper, witness)


@dataclass
class IntegralEstimate:
    value: float
    standard_error: float
    method: str
    samples: int | None
    seed: int | None
    bound: float
    bound_ok: bool
    label: str = ""

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "value": self.value,
            "standard_error": self.standard_error,
            "method": self.method,
            "samples": self.samples,
            "seed": self.seed,
            "bound": self.bound,
            "bound_ok": self.bound_ok,
        }


def _cone_integrals(
    delta: FanoPolytope,
    rate: float,
    weight: Callable[[np.ndarray], np.ndarray],
    method: str,
    samples: int,
    seed: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Integrate over N_R cone by cone, returning (values, standard errors).

    On the cone spanned by the rows of B put y = t B with t_i = -log(x_i)/rate,
    x in the unit cube; then dy = rate^-n exp(rate * ubar(y)) dx. ``weight(y)``
    must return the integrand times exp(rate * ubar(y)), shape (..., K), which
    keeps it bounded. Uniform x is the same as drawing t from the density
    proportional to exp(-rate * ubar) on the cone.
    """
    n = delta.dim
    scale = rate ** (-n)

    def on_cube(basis: np.ndarray, x: np.ndarray) -> np.ndarray:
        t = -np.log(x) / rate
        return weight(t @ basis)

    total = None
    var = None
    if method == "quadrature":
        if n > 2:
            raise ValueError("quadrature is only available for n <= 2")
        # Terms of the integrand behave like x_i ** (a / rate) near the cube
        # boundary; x = s ** q turns these into powers >= 2 in s, which
        # tensor Gauss-Legendre handles well. Two orders give an error estimate.
        q = max(1, math.ceil(2 * rate))
        fine, coarse = (_tensor_rule(on_cube, delta.cone_bases, n, q, order) for order in (QUAD_ORDER, QUAD_ORDER // 2))
        return scale * fine, scale * np.abs(fine - coarse)

    if method != "monte_carlo":
        raise ValueError(f"unknown method {method!r}")
    streams = np.random.SeedSequence(seed).spawn(len(delta.cone_bases))
    for basis, ss in zip(delta.cone_bases, streams):
        rng = np.random.default_rng(ss)
        x = 1.0 - rng.random((samples, n))  # in (0, 1]
        vals = np.concatenate([on_cube(basis, x[i : i + CHUNK]) for i in range(0, samples, CHUNK)])
        mean = vals.mean(axis=0)
        v = vals.var(axis=0, ddof=1) / samples
        total = mean if total is None else total + mean
        var = v if var is None else var + v
    return scale * total, scale * np.sqrt(var)


def _tensor_rule(on_cube, bases, n: int, q: int, order: int) -> np.ndarray:
    nodes, wts = np.polynomial.legendre.leggauss(order)
    s = 0.5 * (nodes + 1.0)
    x = s**q
    w = 0.5 * wts * q * s ** (q - 1)
    grid = np.stack(np.meshgrid(*([x] * n), indexing="ij"), axis=-1).reshape(-1, n)
    gw = np.prod(np.stack(np.meshgrid(*([w] * n), indexing="ij"), axis=-1).reshape(-1, n), axis=1)
    total = 0.0
    for basis in bases:
        total = total + np.einsum("i,i...->...", gw, on_cube(basis, grid))
    return np.atleast_1d(total)


def _pick_method(delta: FanoPolytope, method: str) -> str:
    if method == "auto":
        return "quadrature" if delta.dim <= 2 else "monte_carlo"
    return method


def integral_exp(
    delta: FanoPolytope,
    tau: float,
    method: str = "auto",
    samples: int = 20_000,
    seed: int = DEFAULT_SEED,
) -> IntegralEstimate:
    """Estimate the integral of exp(-tau * u) over N_R and compare with v(Δ)/tau^n."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    method = _pick_method(delta, method)
    value, se = _cone_integrals(
        delta, tau, lambda y: np.exp(-tau * envelope_gap(delta, y))[..., None], method, samples, seed
    )
    bound = delta.num_vertices / tau**delta.dim
    v, s = float(value[0]), float(se[0])
    mc = method == "monte_carlo"
    return IntegralEstimate(
        v, s, method, samples if mc else None, seed if mc else None, bound, v + 3 * s <= bound,
        label=f"integral_exp(tau={tau:g})",
    )


@dataclass(eq=False)
class Potential:
    """A test potential phi = u_w - u - shift with u_w = log sum w_v exp(<v, y>).

    Then u + phi = u_w - shift is convex, |phi| <= max|log w| + |shift|, and the
    shift is the (estimated) supremum of u_w - u so that sup phi = 0.
    """

    points: np.ndarray
    log_weights: np.ndarray
    shift: float
    invariant: bool = False

    @property
    def weights(self) -> np.ndarray:
        return np.exp(self.log_weights)

    @property
    def is_zero(self) -> bool:
        return not self.log_weights.any() and self.shift == 0

    def u_plus_phi(self, y) -> np.ndarray:
        return _lse(_exponents(self.points, y, self.log_weights)) - self.shift

    def __call__(self, y) -> np.ndarray:
        if self.is_zero:
            return np.zeros(np.shape(y)[:-1])
        return self.u_plus_phi(y) - _lse(_exponents(self.points, y))

    def gradient_plus_u(self, y) -> np.ndarray:
        return _moments(self.points, y, self.log_weights)[1]

    def hessian_plus_u(self, y) -> np.ndarray:
        return _moments(self.points, y, self.log_weights)[2]

    @property
    def bound(self) -> float:
        """Upper bound on |phi| over all of N_R."""
        return float(np.abs(self.log_weights).max() + abs(self.shift))


def grid_points(n: int, radius: float = 10.0, spacing: float = 0.5) -> np.ndarray:
    axis = np.arange(-radius, radius + spacing / 2, spacing)
    return np.stack(np.meshgrid(*([axis] * n), indexing="ij"), axis=-1).reshape(-1, n)


def random_points(n: int, count: int, radius: float = 10.0, seed: int = DEFAULT_SEED) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.uniform(-radius, radius, size=(count, n))


def _weights_array(delta: FanoPolytope, weights) -> np.ndarray:
    if isinstance(weights, Mapping):
        w = np.array([float(weights[tuple(v)]) for v in delta.lattice_points])
    else:
        w = np.asarray(weights, dtype=float)
    if w.shape != (len(delta.lattice_points),):
        raise ValueError("one weight per lattice point of Δ is required")
    if not (w > 0).all() or not np.isfinite(w).all():
        raise ValueError("weights must be positive")
    return w


def _dual_permutations(delta: FanoPolytope, maps: Sequence[UnimodularMap]) -> list[np.ndarray]:
    """Permutations of L(Δ) induced by the dual (inverse transpose) action."""
    index = {v: i for i, v in enumerate(delta.lattice_points)}
    perms = []
    for g in maps:
        d = g.dual()
        perms.append(np.array([index[d(v)] for v in delta.lattice_points]))
    return perms


def lattice_point_orbits(delta: FanoPolytope, group: SymmetryGroup) -> list[list[int]]:
    perms = _dual_permutations(delta, group.generators)
    seen = np.zeros(len(delta.lattice_points), dtype=bool)
    orbits = []
    for start in range(len(seen)):
        if seen[start]:
            continue
        orbit, stack = [start], [start]
        seen[start] = True
        while stack:
            i = stack.pop()
            for p in perms:
                j = int(p[i])
                if not seen[j]:
                    seen[j] = True
                    orbit.append(j)
                    stack.append(j)
        orbits.append(sorted(orbit))
    return orbits


def random_invariant_weights(
    delta: FanoPolytope,
    group: SymmetryGroup,
    rng: np.random.Generator,
    low: float = 0.25,
    high: float = 4.0,
) -> np.ndarray:
    """Log-uniform weights in [low, high], symmetrized by geometric means over W-orbits."""
    logw = rng.uniform(math.log(low), math.log(high), size=len(delta.lattice_points))
    for orbit in lattice_point_orbits(delta, group):
        logw[orbit] = logw[orbit].mean()
    return np.exp(logw)


def _sup_log_ratio(delta: FanoPolytope, logw: np.ndarray, seed: int) -> float:
    """sup over N_R of u_w - u: coarse search, local refinement, cone limits."""
    pts = delta.points_array
    n = delta.dim

    def diff(y):
        return _lse(_exponents(pts, y, logw)) - _lse(_exponents(pts, y))

    if n <= 2:
        cand = grid_points(n, 10.0, 0.25)
    else:
        cand = np.vstack([np.zeros((1, n)), random_points(n, 20_000, 10.0, seed)])
    vals = np.concatenate([diff(cand[i : i + CHUNK]) for i in range(0, len(cand), CHUNK)])
    best = float(vals.max())

    def neg(y):
        return -float(diff(y))

    def neg_grad(y):
        return -(_moments(pts, y, logw)[1] - _moments(pts, y)[1])

    for i in np.argsort(vals)[-3:]:
        res = optimize.minimize(neg, cand[i], jac=neg_grad, method="BFGS", options={"maxiter": 200})
        if np.all(np.isfinite(res.x)):
            best = max(best, -float(res.fun))

    # along a direction inside a maximal cone its vertex dominates both sums
    index = {v: i for i, v in enumerate(delta.lattice_points)}
    vertex_limit = max(float(logw[index[w]]) for w in delta.vertices)
    return max(best, vertex_limit)


def make_test_potential(
    delta: FanoPolytope,
    weights,
    group: SymmetryGroup | None = None,
    seed: int = DEFAULT_SEED,
) -> Potential:
    """Build phi = log(sum w_v e^<v,y>) - u - c from positive lattice-point weights.

    With ``group`` given the weights must be invariant under its dual action.
    """
    w = _weights_array(delta, weights)
    logw = np.log(w)
    if group is not None:
        for perm in _dual_permutations(delta, group.generators):
            if not np.allclose(logw[perm], logw, rtol=0, atol=1e-12):
                raise ValueError("weights are not invariant under the symmetry group")
    if not logw.any():
        shift = 0.0
    else:
        shift = _sup_log_ratio(delta, logw, seed)
    return Potential(delta.points_array, logw, shift, invariant=group is not None)


def zero_potential(delta: FanoPolytope) -> Potential:
    return Potential(delta.points_array, np.zeros(len(delta.lattice_points)), 0.0, invariant=True)


@dataclass
class PositivityReport:
    ok: bool
    min_value: float
    witness: np.ndarray
    floor_ok: bool
    floor_margin: float
    points_checked: int
    tolerance: float = POSITIVITY_TOL


def default_positivity_points(n: int, seed: int = DEFAULT_SEED) -> np.ndarray:
    if n <= 2:
        return grid_points(n, 10.0, 0.5)
    return random_points(n, 100_000, 10.0, seed)


def positivity_check(
    delta: FanoPolytope,
    potential: Potential,
    points=None,
    seed: int = DEFAULT_SEED,
    tol: float = POSITIVITY_TOL,
) -> PositivityReport:
    """Minimum of u + phi over sample points, plus the far-field floor.

    Away from the sampled box, u + phi >= ubar - |shift| - max|log w| holds by
    construction; it is checked on points at radii 15 to 200.
    """
    n = delta.dim
    y = default_positivity_points(n, seed) if points is None else np.atleast_2d(points)
    vals = np.concatenate(
        [potential.u_plus_phi(y[i : i + CHUNK]) for i in range(0, len(y), CHUNK)]
    )
    k = int(np.argmin(vals))
    rng = np.random.default_rng(seed + 1)
    dirs = rng.normal(size=(2000, n))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    far = dirs * rng.uniform(15.0, 200.0, size=(2000, 1))
    floor = u_bar(delta, far) - potential.bound
    margin = float((potential.u_plus_phi(far) - floor).min())
    return PositivityReport(
        bool(vals[k] >= -tol), float(vals[k]), y[k], margin >= -tol, margin, len(y), tol
    )


def alpha_integral(
    delta: FanoPolytope,
    lam,
    potentials: Potential | Sequence[Potential] | None = None,
    method: str = "auto",
    samples: int = 20_000,
    seed: int = DEFAULT_SEED,
):
    """Estimate the integral of exp(-lam * phi - u) and compare with v(Δ)/(1 - lam)^n.

    ``lam`` may be a scalar or a sequence and ``potentials`` a single potential
    or a sequence; all combinations are integrated in one pass and the result
    has shape ``[potential][lam]`` (scalars are unwrapped).
    """
    lams = np.atleast_1d(np.asarray(lam, dtype=float))
    if ((lams <= 0) | (lams >= 1)).any():
        raise ValueError("lambda must lie in (0, 1)")
    single_pot = potentials is None or isinstance(potentials, Potential)
    pots = [zero_potential(delta) if potentials is None else potentials] if single_pot else list(potentials)
    method = _pick_method(delta, method)
    pts = delta.points_array

    def weight(y):
        # exp(-lam*phi - u + ubar) = exp(-lam*(u_w - c) - (1 - lam)*u + ubar)
        gap = envelope_gap(delta, y)
        u = _lse(_exponents(pts, y))
        ubar = u - gap
        cols = []
        for p in pots:
            upp = p.u_plus_phi(y)
            for l in lams:
                cols.append(np.exp(-l * (upp - ubar) - (1 - l) * gap))
        return np.stack(cols, axis=-1)

    values, errors = _cone_integrals(delta, 1.0, weight, method, samples, seed)
    mc = method == "monte_carlo"
    out = []
    for i in range(len(pots)):
        row = []
        for j, l in enumerate(lams):
            v, s = float(values[i * len(lams) + j]), float(errors[i * len(lams) + j])
            bound = float(delta.num_vertices / (1 - l) ** delta.dim)
            row.append(
                IntegralEstimate(
                    v, s, method, samples if mc else None, seed if mc else None, bound,
                    bool(v + 3 * s <= bound), label=f"alpha_integral(lambda={l:g})",
                )
            )
        out.append(row)
    if np.ndim(lam) == 0:
        out = [row[0] for row in out]
    return out[0] if single_pot else out


def ma_residual(delta: FanoPolytope, potential: Potential, t: float, y) -> np.ndarray:
    """det Hess(u + phi)(y) - exp(-u(y) - t * phi(y)); zero exactly on solutions."""
    y = np.asarray(y, dtype=float)
    det = np.linalg.det(potential.hessian_plus_u(y))
    return det - np.exp(-u_tilde(delta, y) - t * potential(y))
