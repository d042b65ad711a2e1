"""Classification reports and the implication-chain consistency check."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

from ..operators import Direction, Operator
from .checks import (
    DEFAULT_BUDGETS,
    Budgets,
    Verdict,
    check_boundary_ellipticity,
    check_C_ellipticity,
    check_cancellation,
    check_real_ellipticity,
)

N1_NOTE = "n=1: boundary ellipticity trivially reduces to A(nu) != 0"
N1_CHAIN_NOTE = "n=1: the implication boundary elliptic => canceling is not checked (it needs n >= 2)"


@dataclass(frozen=True)
class TaxonomyReport:
    operator: Operator
    real_elliptic: Verdict
    boundary_elliptic: tuple[tuple[Direction, Verdict], ...]
    c_elliptic: Verdict
    canceling: Verdict
    chain_consistent: bool
    diagnostics: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()
    settings: dict = field(default_factory=dict)

    @property
    def directions_tested(self) -> list[Direction]:
        return [d for d, _ in self.boundary_elliptic]

    @property
    def any_inconclusive(self) -> bool:
        verdicts = [self.real_elliptic, self.c_elliptic, self.canceling] + [v for _, v in self.boundary_elliptic]
        return any(v.status == "inconclusive" for v in verdicts)

    def boundary(self, d: Direction) -> Verdict:
        for e, v in self.boundary_elliptic:
            if e == d:
                return v
        raise KeyError(str(d))

    def to_json_obj(self) -> dict:
        c = self.c_elliptic.to_json()
        c["sampled"] = self.c_elliptic.sampled
        out = {
            "operator": self.operator.to_json_obj(),
            "real_elliptic": self.real_elliptic.to_json(),
            "boundary_elliptic": [dict(direction=d.to_json(), **v.to_json()) for d, v in self.boundary_elliptic],
            "c_elliptic": c,
            "canceling": self.canceling.to_json(),
            "chain_consistent": self.chain_consistent,
            "directions_tested": [d.to_json() for d, _ in self.boundary_elliptic],
            "settings": self.settings,
        }
        if self.diagnostics:
            out["diagnostics"] = list(self.diagnostics)
        if self.notes:
            out["notes"] = list(self.notes)
        return out

    def to_json(self) -> str:
        return canonical_json(self.to_json_obj())


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def chain_violations(real: Verdict, boundary: Sequence[tuple[Direction, Verdict]], c: Verdict, cancel: Verdict,
                     n: int = 2) -> list[str]:
    """Verdict-level check of C-elliptic => boundary elliptic => canceling.

    Sampled Holds counts as Holds; Inconclusive is vacuous. The step to
    cancellation needs n >= 2 (d/dt on the line is a counterexample)."""
    out = []
    if c.holds:
        for d, v in boundary:
            if v.fails:
                out.append(f"complex ellipticity holds but boundary ellipticity fails in direction {d}")
    if n >= 2 and real.holds and cancel.fails:
        for d, v in boundary:
            if v.holds:
                out.append(f"boundary elliptic in direction {d} and elliptic, yet cancellation fails")
    if c.holds and real.fails:
        out.append("complex ellipticity holds but real ellipticity fails")
    for d, v in boundary:
        if v.holds and real.fails:
            out.append(f"boundary ellipticity holds in direction {d} but real ellipticity fails")
    return out


def classify(op: Operator, directions: Sequence[Direction] | None = None, budgets: Budgets = DEFAULT_BUDGETS,
             check_complex: bool = True) -> TaxonomyReport:
    if not directions:
        directions = [Direction.axis(op.n, j) for j in range(op.n)]
    for d in directions:
        if d.n != op.n:
            raise ValueError(f"direction {d} does not live in R^{op.n}")
    real = check_real_ellipticity(op, budgets.boxes, budgets)
    bnd = tuple((d, check_boundary_ellipticity(op, d, budgets.boxes, budgets)) for d in directions)
    if check_complex:
        c = check_C_ellipticity(op, budgets.c_directions, budgets.boxes, budgets)
    else:
        c = Verdict("inconclusive", note="complex ellipticity check skipped")
    cancel = check_cancellation(op, budgets.boxes, budgets)
    problems = chain_violations(real, bnd, c, cancel, op.n)
    notes = (N1_NOTE, N1_CHAIN_NOTE) if op.n == 1 else ()
    settings = {"budgets": budgets.to_json(), "check_complex": check_complex}
    return TaxonomyReport(op, real, bnd, c, cancel, not problems, tuple(problems), notes, settings)
