"""Experiment curves with least-squares growth fits and CSV output."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

LOG = "log"
POWER = "power"
LOG_INVERSE = "log_inverse"  # abscissa enters as log(1/x)
LOG_X = "log_x"  # abscissa enters as log(x)


@dataclass(frozen=True)
class Fit:
    model: str
    slope: float
    intercept: float
    r_squared: float

    def predict(self, t: np.ndarray) -> np.ndarray:
        return self.intercept + self.slope * t

    def to_json(self) -> dict:
        return {"model": self.model, "exponent_or_slope": self.slope, "intercept": self.intercept,
                "r_squared": self.r_squared}


def least_squares_line(t: Sequence[float], y: Sequence[float]) -> tuple[float, float, float]:
    t = np.asarray(t, float)
    y = np.asarray(y, float)
    a = np.vstack([t, np.ones_like(t)]).T
    (slope, icpt), *_ = np.linalg.lstsq(a, y, rcond=None)
    resid = y - (slope * t + icpt)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(icpt), r2


@dataclass
class ExperimentCurve:
    """Ordinates against abscissae; the fit is always recomputed from the points.

    model "log": ordinate = intercept + slope * T(abscissa);
    model "power": log(ordinate) = intercept + exponent * log(abscissa).
    T is log(1/x) or log(x) according to `transform`."""

    abscissae: list[float]
    ordinates: list[float]
    model: str = LOG
    transform: str = LOG_INVERSE
    label: str = ""
    columns: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)

    def __post_init__(self):
        self.abscissae = [float(x) for x in self.abscissae]
        self.ordinates = [float(y) for y in self.ordinates]
        if len(self.abscissae) != len(self.ordinates):
            raise ValueError("abscissae and ordinates differ in length")
        if len(self.abscissae) < 3:
            raise ValueError("a curve needs at least 3 points")
        if self.model not in (LOG, POWER):
            raise ValueError(f"unknown model {self.model!r}")

    def _t(self) -> np.ndarray:
        x = np.asarray(self.abscissae)
        if self.model == POWER or self.transform == LOG_X:
            return np.log(x)
        return np.log(1.0 / x)

    def _y(self) -> np.ndarray:
        y = np.asarray(self.ordinates)
        return np.log(y) if self.model == POWER else y

    @property
    def fit(self) -> Fit:
        s, c, r2 = least_squares_line(self._t(), self._y())
        return Fit(self.model, s, c, r2)

    def residuals(self) -> np.ndarray:
        return self._y() - self.fit.predict(self._t())

    @property
    def max_over_min(self) -> float:
        y = np.asarray(self.ordinates)
        return float(y.max() / y.min()) if y.min() > 0 else math.inf

    def is_monotone_increasing(self, decreasing_abscissa: bool = True) -> bool:
        order = np.argsort(self.abscissae)
        y = np.asarray(self.ordinates)[order]
        if decreasing_abscissa:
            y = y[::-1]
        return bool(np.all(np.diff(y) > 0))

    def to_csv(self) -> str:
        f = self.fit
        buf = io.StringIO()
        buf.write(f"# model={f.model} slope={f.slope!r} r2={f.r_squared!r} transform={self.transform}"
                  + (f" label={self.label}" if self.label else "") + "\n")
        extra = sorted(self.columns)
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["abscissa", "ordinate", "fit_residual"] + extra)
        for i, (x, y, r) in enumerate(zip(self.abscissae, self.ordinates, self.residuals())):
            w.writerow([repr(x), repr(y), repr(float(r))] + [repr(float(self.columns[c][i])) for c in extra])
        return buf.getvalue()

    def write_csv(self, path) -> None:
        Path(path).write_text(self.to_csv())

    @classmethod
    def from_csv(cls, text: str) -> ExperimentCurve:
        lines = text.splitlines()
        head = dict(p.split("=", 1) for p in lines[0][1:].split() if "=" in p)
        rows = list(csv.reader(lines[1:]))
        names = rows[0]
        data = {n: [float(r[i]) for r in rows[1:]] for i, n in enumerate(names)}
        cols = {n: v for n, v in data.items() if n not in ("abscissa", "ordinate", "fit_residual")}
        return cls(data["abscissa"], data["ordinate"], head.get("model", LOG), head.get("transform", LOG_INVERSE),
                   head.get("label", ""), cols)

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "abscissae": self.abscissae,
            "ordinates": self.ordinates,
            "transform": self.transform,
            "fit": self.fit.to_json(),
            "summary": self.summary,
        }
