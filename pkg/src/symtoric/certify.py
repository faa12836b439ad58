"""The certification pipeline: validate, find the symmetry group, decide."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .analytic import (
    DEFAULT_SEED,
    alpha_integral,
    integral_exp,
    make_test_potential,
    positivity_check,
    random_invariant_weights,
)
from .fan import Fan, ValidationReport, validate_smooth_fano
from .polytope import Barycenter, FanoPolytope, barycenter, is_centrally_symmetric, polytope_from_fan
from .symmetry import SymmetryVerdict, fan_automorphisms, is_symmetric

VERDICT_YES = "EK certificate: YES (symmetric toric Fano)"
VERDICT_UNDECIDED = "undecided by symmetric criterion"
VERDICT_FAILS = "fails necessary conditions"
VERDICT_INVALID = "not a smooth toric Fano fan"

ANALYTIC_POTENTIALS = 20


@dataclass
class CertificationReport:
    name: str
    dim: int
    ray_count: int
    cone_count: int
    validation: ValidationReport
    group_order: int | None = None
    symmetric: SymmetryVerdict | None = None
    barycenter: Barycenter | None = None
    r_delta_size: int | None = None
    r_centrally_symmetric: bool | None = None
    ek_certified: bool = False
    analytic_evidence: list[dict] = field(default_factory=list)

    @property
    def futaki_vanishes(self) -> bool | None:
        return None if self.barycenter is None else self.barycenter.is_zero

    @property
    def verdict(self) -> str:
        if not self.validation.is_fano:
            return VERDICT_INVALID
        if self.ek_certified:
            return VERDICT_YES
        if self.futaki_vanishes is False or self.r_centrally_symmetric is False:
            return VERDICT_FAILS
        return VERDICT_UNDECIDED

    def to_dict(self) -> dict:
        """Plain data with exact rationals kept as Fractions (the CLI stringifies them)."""
        sym = None
        if self.symmetric is not None:
            sym = {
                "is_symmetric": self.symmetric.is_symmetric,
                "fixed_space_basis": [list(v) for v in self.symmetric.fixed_space_basis],
            }
        bary = None
        if self.barycenter is not None:
            bary = {
                "point": list(self.barycenter.point),
                "volume": self.barycenter.total_volume,
                "is_zero": self.barycenter.is_zero,
            }
        return {
            "fan": {
                "name": self.name,
                "dim": self.dim,
                "rays": self.ray_count,
                "cones": self.cone_count,
            },
            "validation": self.validation.to_dict(),
            "group_order": self.group_order,
            "symmetric": sym,
            "barycenter": bary,
            "r_delta_size": self.r_delta_size,
            "r_centrally_symmetric": self.r_centrally_symmetric,
            "ek_certified": self.ek_certified,
            "verdict": self.verdict,
            "analytic_evidence": list(self.analytic_evidence),
        }


def necessary_conditions(delta: FanoPolytope) -> tuple[bool, bool]:
    """(barycenter is exactly 0, R(Δ) is centrally symmetric).

    These are the vanishing of the Futaki character and the reductivity of
    the automorphism group, both necessary for an Einstein-Kähler metric.
    """
    return barycenter(delta).is_zero, is_centrally_symmetric(delta.facet_interior_points)


def _analytic_evidence(delta: FanoPolytope, group, seed: int) -> list[dict]:
    evidence = [integral_exp(delta, 1.0, seed=seed).to_dict()]
    rng = np.random.default_rng(seed)
    pots = [
        make_test_potential(delta, random_invariant_weights(delta, group, rng), group, seed=seed)
        for _ in range(ANALYTIC_POTENTIALS)
    ]
    reports = [positivity_check(delta, p, seed=seed) for p in pots]
    worst = min(reports, key=lambda r: r.min_value)
    evidence.append(
        {
            "label": f"positivity({len(pots)} invariant potentials)",
            "ok": all(r.ok and r.floor_ok for r in reports),
            "min_value": worst.min_value,
            "witness": [float(x) for x in worst.witness],
            "floor_margin": min(r.floor_margin for r in reports),
            "points_checked": worst.points_checked,
        }
    )
    estimates = alpha_integral(delta, 0.9, pots, seed=seed)
    worst_alpha = max(estimates, key=lambda e: (e.value + 3 * e.standard_error) / e.bound)
    d = worst_alpha.to_dict()
    d["label"] = f"alpha_integral(lambda=0.9, worst of {len(pots)})"
    d["bound_ok"] = all(e.bound_ok for e in estimates)
    evidence.append(d)
    return evidence


def certify(
    fan: Fan,
    analytic: bool = False,
    seed: int = DEFAULT_SEED,
    necessary_only: bool = False,
    probes: int = 1000,
) -> CertificationReport:
    """Run the full pipeline on ``fan``; a failed criterion is a verdict, not an error.

    With ``necessary_only`` the automorphism search is skipped and only the
    barycenter and R(Δ) checks run, so ``ek_certified`` stays false.
    """
    validation = validate_smooth_fano(fan, probes=probes, seed=seed)
    report = CertificationReport(
        fan.name, fan.dim, len(fan.rays), len(fan.max_cones), validation
    )
    if not validation.is_fano:
        return report

    delta = polytope_from_fan(fan, check=False)
    report.barycenter = barycenter(delta)
    report.r_delta_size = len(delta.facet_interior_points)
    report.r_centrally_symmetric = is_centrally_symmetric(delta.facet_interior_points)
    if necessary_only:
        return report

    group = fan_automorphisms(fan)
    report.group_order = group.order
    report.symmetric = is_symmetric(fan, group)
    report.ek_certified = validation.is_fano and report.symmetric.is_symmetric
    if report.symmetric.is_symmetric and not (
        report.barycenter.is_zero and report.r_centrally_symmetric
    ):
        raise AssertionError("symmetric fan with nonzero barycenter or asymmetric R(Δ)")
    if analytic and report.ek_certified:
        report.analytic_evidence = _analytic_evidence(delta, group, seed)
    return report


def format_fraction(x: Fraction) -> str:
    return str(Fraction(x))


def summary_lines(report: CertificationReport) -> list[str]:
    """Human-readable summary; the last line is the verdict."""
    lines = [
        f"fan: {report.name or '(unnamed)'}  n={report.dim}  rays={report.ray_count}  cones={report.cone_count}",
        "validation: "
        + ", ".join(
            f"{k}={'yes' if v else 'no'}"
            for k, v in (
                ("primitive", report.validation.is_primitive_ok),
                ("complete", report.validation.is_complete),
                ("regular", report.validation.is_regular),
                ("fano", report.validation.is_fano),
            )
        ),
    ]
    lines += [f"  {d}" for d in report.validation.diagnostics]
    if report.barycenter is not None:
        point = ", ".join(format_fraction(x) for x in report.barycenter.point)
        lines.append(f"barycenter: ({point})  volume={format_fraction(report.barycenter.total_volume)}")
        lines.append(
            f"R(Δ): {report.r_delta_size} points, centrally symmetric: "
            f"{'yes' if report.r_centrally_symmetric else 'no'}"
        )
    if report.symmetric is not None:
        lines.append(f"automorphism group order: {report.group_order}")
        if report.symmetric.is_symmetric:
            lines.append("symmetric: yes (no nonzero invariant vector)")
        else:
            basis = "; ".join(
                "(" + ", ".join(format_fraction(x) for x in v) + ")"
                for v in report.symmetric.fixed_space_basis
            )
            lines.append(f"symmetric: no, invariant vectors span {basis}")
    for ev in report.analytic_evidence:
        ok = ev.get("bound_ok", ev.get("ok"))
        lines.append(f"analytic: {ev['label']}: {'ok' if ok else 'FAILED'}")
    lines.append(report.verdict)
    return lines
