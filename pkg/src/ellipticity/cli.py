"""Command-line front end: classification, experiments and verification runs.

Exit codes: 0 decisive, 2 inconclusive, 1 error or internal inconsistency,
64 bad usage."""
from __future__ import annotations

import argparse
import math
import re
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .operators import Direction, Operator, OperatorError, catalog, catalog_schema, parse_operator
from .taxonomy import DEFAULT_BUDGETS, canonical_json, classify, with_budget

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 64

EXPERIMENTS = ("trace-blowup", "sobolev-ratio", "kernel-decay", "besov-scaling")
VERIFICATIONS = ("representation", "extension")
DEFAULT_EPS_TEXT = "2^-3..2^-10"

_POW2 = re.compile(r"\s*2\^(-?\d+)\s*")


class UsageError(Exception):
    pass


def parse_eps(text: str) -> list[float]:
    """"2^-3..2^-10" (every power of two in between) or a comma list of
    numbers, rationals and powers of two."""
    if ".." in text:
        lo, hi = text.split("..", 1)
        a, b = _POW2.fullmatch(lo), _POW2.fullmatch(hi)
        if not (a and b):
            raise UsageError(f"epsilon range {text!r} must look like 2^-3..2^-10")
        p, q = int(a.group(1)), int(b.group(1))
        step = 1 if q >= p else -1
        vals = [2.0 ** e for e in range(p, q + step, step)]
    else:
        vals = []
        for part in text.split(","):
            m = _POW2.fullmatch(part)
            try:
                vals.append(2.0 ** int(m.group(1)) if m else float(Fraction(part.strip())))
            except (ValueError, ZeroDivisionError):
                raise UsageError(f"bad epsilon value {part!r}") from None
    if any(not (v > 0 and math.isfinite(v)) for v in vals):
        raise UsageError("epsilon values must be positive")
    return vals


@dataclass
class RunConfig:
    command: str
    target: str | None = None  # experiment or verification name
    catalog_name: str | None = None
    operator_file: str | None = None
    n: int | None = None
    N: int | None = None
    k: int | None = None
    directions: list[Direction] = field(default_factory=list)
    eps: list[float] | None = None
    h: float | None = None
    budget: int | None = None
    seed: int = 0
    out: str | None = None

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> RunConfig:
        try:
            dirs = [Direction.parse(d) for d in (ns.direction or [])]
        except OperatorError as exc:
            raise UsageError(str(exc)) from None
        cfg = cls(ns.command, getattr(ns, "target", None), ns.catalog, ns.operator, ns.n, ns.N, ns.k, dirs,
                  parse_eps(ns.eps) if ns.eps else None, ns.h, ns.budget, ns.seed, ns.out)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        needs_op = self.command == "classify" or self.target in ("trace-blowup", "sobolev-ratio")
        if self.catalog_name and self.operator_file:
            raise UsageError("give exactly one of --catalog and --operator")
        if needs_op and not (self.catalog_name or self.operator_file):
            raise UsageError(f"{self.target or self.command} needs --catalog or --operator")
        if self.h is not None and not self.h > 0:
            raise UsageError("--h must be positive")
        if self.budget is not None and self.budget < 1:
            raise UsageError("--budget must be positive")

    def operator(self) -> Operator:
        if self.catalog_name:
            params = {"n": self.n, "N": self.N, "k": self.k}
            schema = catalog_schema().get(self.catalog_name)
            if schema is None:
                raise UsageError(f"unknown catalog operator {self.catalog_name!r}")
            return catalog(self.catalog_name, **{p: v for p, v in params.items() if p in schema})
        src = Path(self.operator_file).read_text()
        return parse_operator(src, n=self.n, name=Path(self.operator_file).stem)

    def budgets(self):
        return with_budget(DEFAULT_BUDGETS, boxes=self.budget) if self.budget else DEFAULT_BUDGETS

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "target": self.target,
            "catalog": self.catalog_name,
            "operator_file": self.operator_file,
            "n": self.n,
            "N": self.N,
            "k": self.k,
            "directions": [d.to_json() for d in self.directions],
            "eps": self.eps,
            "h": self.h,
            "budget": self.budget,
            "seed": self.seed,
        }


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--catalog", metavar="NAME")
    common.add_argument("--operator", metavar="FILE", help="operator in JSON or the text DSL")
    common.add_argument("--n", type=int)
    common.add_argument("--N", type=int)
    common.add_argument("--k", type=int, help="order for kth_gradient, kernel-decay and extension")
    common.add_argument("--direction", action="append", metavar="CSV", help="rational vector, e.g. 3/5,4/5")
    common.add_argument("--eps", metavar="RANGE", help=f"e.g. {DEFAULT_EPS_TEXT} or 1/8,1/16,1/32")
    common.add_argument("--h", type=float)
    common.add_argument("--budget", type=int, help="box budget for branch and bound")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", metavar="PATH")

    p = _Parser(prog="ellipticity", description="Ellipticity taxonomy and halfspace trace experiments")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("classify", parents=[common], help="run all four checks")
    e = sub.add_parser("experiment", parents=[common])
    e.add_argument("target", choices=EXPERIMENTS)
    v = sub.add_parser("verify", parents=[common])
    v.add_argument("target", choices=VERIFICATIONS)
    sub.add_parser("catalog-list", parents=[common])
    return p


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _classify(cfg: RunConfig) -> int:
    op = cfg.operator()
    rep = classify(op, cfg.directions or None, cfg.budgets())
    obj = rep.to_json_obj()
    obj["settings"]["directions_defaulted"] = not cfg.directions
    obj["settings"]["seed"] = cfg.seed
    _emit(canonical_json(obj), cfg.out)
    if not rep.chain_consistent:
        sys.stderr.write(canonical_json({"diagnostic": {"chain_consistent": False,
                                                        "violations": list(rep.diagnostics)}}))
        return EXIT_ERROR
    return EXIT_INCONCLUSIVE if rep.any_inconclusive else EXIT_OK


def _single_direction(cfg: RunConfig, op: Operator) -> Direction:
    if len(cfg.directions) > 1:
        raise UsageError("experiments take a single --direction")
    d = cfg.directions[0] if cfg.directions else Direction.axis(op.n, op.n - 1)
    if d.n != op.n:
        raise UsageError(f"direction {d} does not live in R^{op.n}")
    return d


def _curve_output(cfg: RunConfig, curves: dict, summary: dict) -> None:
    summary = dict(summary, config=cfg.to_json())
    summary["curves"] = {name: c.to_json() for name, c in curves.items()}
    if cfg.out:
        base = Path(cfg.out)
        paths = {}
        for name, c in curves.items():
            path = base if len(curves) == 1 else base.with_name(f"{base.stem}-{name}{base.suffix or '.csv'}")
            c.write_csv(path)
            paths[name] = str(path)
        summary["csv"] = paths
        base.with_suffix(".json").write_text(canonical_json(summary))
    else:
        for c in curves.values():
            sys.stdout.write(c.to_csv())
        sys.stdout.write(canonical_json(summary))


def _experiment(cfg: RunConfig) -> int:
    from . import harness as hz

    eps = cfg.eps or parse_eps(DEFAULT_EPS_TEXT)
    if cfg.target == "trace-blowup":
        op = cfg.operator()
        nu = _single_direction(cfg, op)
        curve = hz.trace_blowup_experiment(op, nu, eps, h=cfg.h, seed=cfg.seed)
        fit = curve.fit
        summary = {"experiment": cfg.target, "fit": fit.to_json(), **curve.summary}
        _curve_output(cfg, {"trace": curve}, summary)
        return EXIT_OK
    if cfg.target == "sobolev-ratio":
        op = cfg.operator()
        nu = _single_direction(cfg, op)
        fields = hz.random_bump_fields(op, nu, 20, seed=cfg.seed, h=cfg.h)
        curves = {"bumps": hz.sobolev_ratio_experiment(op, nu, fields, h=cfg.h)}
        fam, failing = hz.family_for(op, nu, variant=hz.SOBOLEV)
        if failing:
            curves["counterexample"] = hz.sobolev_ratio_experiment(op, nu, fam, eps, h=cfg.h)
        summary = {"experiment": cfg.target, "boundary_witness": failing,
                   **{f"{k}_summary": c.summary for k, c in curves.items()}}
        _curve_output(cfg, curves, summary)
        return EXIT_OK
    if cfg.target == "kernel-decay":
        from .constructions import default_profile, holder_cone_kernel, sobolev_kernel

        n = cfg.n or 2
        k = cfg.k or 1
        prof = default_profile(n)
        targets = [tuple([n - 1] * k)]

        def kern(y):
            return sobolev_kernel(n, k, prof, y, targets[0])

        res = hz.kernel_decay_check(kern, n, k, 0.0)
        ref = hz.kernel_decay_check(holder_cone_kernel(n, 0.5), n, 1, 0.5)
        out = {"experiment": cfg.target, "n": n, "k": k, "profile": prof.to_json(),
               "sobolev_kernel": res.to_json(), "holder_cone_reference": {"alpha": 0.5, **ref.to_json()},
               "config": cfg.to_json()}
        _emit(canonical_json(out), cfg.out)
        return EXIT_OK
    if cfg.target == "besov-scaling":
        curve = besov_scaling_report(cfg.h or 1 / 256)
        _emit(canonical_json(dict(curve, config=cfg.to_json())), cfg.out)
        return EXIT_OK
    raise UsageError(f"unknown experiment {cfg.target!r}")


def besov_scaling_report(h: float, ss=(0.5, 1.0, 1.5), k: int = 2, lam: float = 2.0) -> dict:
    """[u(lam .)]_s / [u]_s against lam^(s - m) for a 1D bump, m = 1."""
    import numpy as np

    from .harness import besov_seminorm, sample_field

    def bump(scale):
        return lambda x: (np.clip(1.0 - (x[:, 0] / scale) ** 2, 0.0, None) ** 4)[:, None]

    box = [(-2.0, 2.0)]
    u1 = sample_field(bump(1.0), box, h)
    u2 = sample_field(bump(1.0 / lam), box, h)
    rows = []
    for s in ss:
        a, b = besov_seminorm(u1, s, k), besov_seminorm(u2, s, k)
        target = lam ** (s - 1)
        rows.append({"s": s, "ratio": b / a, "target": target, "rel_error": abs(b / a - target) / target})
    return {"experiment": "besov-scaling", "k": k, "lambda": lam, "h": h, "rows": rows}


def _verify(cfg: RunConfig) -> int:
    if cfg.target == "representation":
        from .harness import verify_representation

        h = cfg.h or 1 / 128
        a, b = verify_representation(h=h), verify_representation(h=h / 2)
        ratio = b.relative_error / a.relative_error if a.relative_error else None
        out = {"verification": "representation", "coarse": a.to_json(), "fine": b.to_json(),
               "error_ratio": ratio, "config": cfg.to_json()}
    elif cfg.target == "extension":
        from .constructions import verify_extension

        k = cfg.k or 3
        out = dict(verify_extension(k=k, seed=cfg.seed, h=cfg.h or 1 / 128), verification="extension",
                   config=cfg.to_json())
    else:
        raise UsageError(f"unknown verification {cfg.target!r}")
    _emit(canonical_json(out), cfg.out)
    return EXIT_OK


def run(cfg: RunConfig) -> int:
    if cfg.command == "classify":
        return _classify(cfg)
    if cfg.command == "experiment":
        return _experiment(cfg)
    if cfg.command == "verify":
        return _verify(cfg)
    if cfg.command == "catalog-list":
        _emit(canonical_json({"catalog": catalog_schema()}), cfg.out)
        return EXIT_OK
    raise UsageError(f"unknown command {cfg.command!r}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return run(RunConfig.from_args(ns))
    except UsageError as exc:
        sys.stderr.write(f"ellipticity: usage error: {exc}\n")
        return EXIT_USAGE
    except (OperatorError, ValueError, ArithmeticError, OSError) as exc:
        sys.stderr.write(f"ellipticity: error: {exc}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
