"""Sparse multivariate polynomials with Gaussian-rational coefficients."""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

from .numbers import ONE, ZERO, GaussianRational

Exponent = tuple[int, ...]

# degree of the zero polynomial; compares below every integer
NEG_INF = float("-inf")
INHOMOGENEOUS = "inhomogeneous"


def _c(x) -> GaussianRational:
    return GaussianRational.coerce(x)


class MultiPoly:
    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms=None):
        if nvars < 0:
            raise ValueError("nvars must be non-negative")
        clean: dict[Exponent, GaussianRational] = {}
        for exp, coef in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != nvars or any(e < 0 for e in exp):
                raise ValueError(f"bad exponent {exp} for {nvars} variables")
            c = _c(coef)
            if exp in clean:
                c = clean[exp] + c
            if c.is_zero():
                clean.pop(exp, None)
            else:
                clean[exp] = c
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "_terms", clean)
        object.__setattr__(self, "_hash", None)

    @classmethod
    def _raw(cls, nvars: int, terms: dict) -> MultiPoly:
        obj = object.__new__(cls)
        object.__setattr__(obj, "nvars", nvars)
        object.__setattr__(obj, "_terms", terms)
        object.__setattr__(obj, "_hash", None)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("MultiPoly is immutable")

    # constructors
    @classmethod
    def zero(cls, nvars: int) -> MultiPoly:
        return cls._raw(nvars, {})

    @classmethod
    def constant(cls, nvars: int, c) -> MultiPoly:
        c = _c(c)
        return cls._raw(nvars, {} if c.is_zero() else {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars: int, j: int) -> MultiPoly:
        exp = [0] * nvars
        exp[j] = 1
        return cls._raw(nvars, {tuple(exp): ONE})

    @classmethod
    def monomial(cls, exp: Sequence[int], c=1) -> MultiPoly:
        return cls(len(exp), {tuple(exp): c})

    @property
    def terms(self) -> dict[Exponent, GaussianRational]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def degree(self):
        """Total degree; NEG_INF for the zero polynomial."""
        if not self._terms:
            return NEG_INF
        return max(sum(e) for e in self._terms)

    def degree_in(self, j: int):
        if not self._terms:
            return NEG_INF
        return max(e[j] for e in self._terms)

    def is_real(self) -> bool:
        return all(c.is_real() for c in self._terms.values())

    def _check(self, other: MultiPoly):
        if other.nvars != self.nvars:
            raise ValueError(f"variable count mismatch: {self.nvars} vs {other.nvars}")

    def _lift(self, other) -> MultiPoly:
        if isinstance(other, MultiPoly):
            self._check(other)
            return other
        return MultiPoly.constant(self.nvars, other)

    def __add__(self, other):
        try:
            o = self._lift(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for e, c in o._terms.items():
            s = out.get(e)
            s = c if s is None else s + c
            if s.is_zero():
                out.pop(e, None)
            else:
                out[e] = s
        return MultiPoly._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        try:
            o = self._lift(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> MultiPoly:
        c = _c(c)
        if c.is_zero():
            return MultiPoly.zero(self.nvars)
        return MultiPoly._raw(self.nvars, {e: v * c for e, v in self._terms.items()})

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            try:
                return self.scale(other)
            except TypeError:
                return NotImplemented
        self._check(other)
        out: dict[Exponent, GaussianRational] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                p = c1 * c2
                s = out.get(e)
                out[e] = p if s is None else s + p
        return MultiPoly._raw(self.nvars, {e: c for e, c in out.items() if not c.is_zero()})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result = MultiPoly.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.nvars == other.nvars and self._terms == other._terms
        if isinstance(other, (int, Fraction, GaussianRational)):
            c = _c(other)
            if c.is_zero():
                return not self._terms
            return self._terms == {(0,) * self.nvars: c}
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash((self.nvars, frozenset(self._terms.items()))))
        return self._hash

    def conjugate(self) -> MultiPoly:
        return MultiPoly._raw(self.nvars, {e: c.conjugate() for e, c in self._terms.items()})

    def leading_term(self):
        """Lex-largest exponent and its coefficient."""
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self._terms)
        return e, self._terms[e]

    def exact_div(self, divisor: MultiPoly) -> MultiPoly:
        """Quotient when divisor divides self exactly; raises ArithmeticError otherwise."""
        if not isinstance(divisor, MultiPoly):
            divisor = MultiPoly.constant(self.nvars, divisor)
        self._check(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if len(divisor._terms) == 1:
            (de, dc), = divisor._terms.items()
            out = {}
            for e, c in self._terms.items():
                q = tuple(a - b for a, b in zip(e, de))
                if min(q, default=0) < 0:
                    raise ArithmeticError("division is not exact")
                out[q] = c / dc
            return MultiPoly._raw(self.nvars, out)
        de, dc = divisor.leading_term()
        quotient: dict[Exponent, GaussianRational] = {}
        rem = self
        while rem._terms:
            re_, rc = rem.leading_term()
            q = tuple(a - b for a, b in zip(re_, de))
            if min(q, default=0) < 0:
                raise ArithmeticError("division is not exact")
            qc = rc / dc
            quotient[q] = qc
            rem = rem - divisor * MultiPoly._raw(self.nvars, {q: qc})
        return MultiPoly._raw(self.nvars, quotient)

    def coefficients_in(self, j: int) -> list[MultiPoly]:
        """Write self = sum_m c_m * x_j^m; returns [c_0, c_1, ...] with x_j removed from c_m."""
        if not self._terms:
            return []
        top = self.degree_in(j)
        buckets: list[dict] = [dict() for _ in range(top + 1)]
        for e, c in self._terms.items():
            m = e[j]
            buckets[m][e[:j] + (0,) + e[j + 1:]] = c
        return [MultiPoly._raw(self.nvars, b) for b in buckets]

    def drop_variable(self, j: int) -> MultiPoly:
        """Remove variable j, which must not occur."""
        out = {}
        for e, c in self._terms.items():
            if e[j]:
                raise ValueError(f"variable {j} occurs in the polynomial")
            out[e[:j] + e[j + 1:]] = c
        return MultiPoly._raw(self.nvars - 1, out)

    def evaluate_exact(self, point: Sequence) -> GaussianRational:
        if len(point) != self.nvars:
            raise ValueError("point dimension mismatch")
        pt = [_c(x) for x in point]
        total = ZERO
        powers: list[dict[int, GaussianRational]] = [dict() for _ in pt]
        for e, c in self._terms.items():
            term = c
            for j, a in enumerate(e):
                if a:
                    pw = powers[j].get(a)
                    if pw is None:
                        pw = pt[j] ** a
                        powers[j][a] = pw
                    term = term * pw
            total = total + term
        return total

    def substitute_linear(self, matrix: Sequence[Sequence], new_nvars: int | None = None) -> MultiPoly:
        """Substitute x_i = sum_j matrix[i][j] y_j."""
        if len(matrix) != self.nvars:
            raise ValueError("substitution needs one row per variable")
        m = new_nvars if new_nvars is not None else (len(matrix[0]) if matrix else 0)
        lin = []
        for row in matrix:
            if len(row) != m:
                raise ValueError("ragged substitution matrix")
            lin.append(MultiPoly(m, {tuple(1 if t == j else 0 for t in range(m)): row[j] for j in range(m)}))
        cache: list[dict[int, MultiPoly]] = [dict() for _ in lin]
        total = MultiPoly.zero(m)
        for e, c in self._terms.items():
            term = MultiPoly.constant(m, c)
            for i, a in enumerate(e):
                if a:
                    pw = cache[i].get(a)
                    if pw is None:
                        pw = lin[i] ** a
                        cache[i][a] = pw
                    term = term * pw
            total = total + term
        return total

    def translate_imaginary(self, nu: Sequence) -> MultiPoly:
        """p(x + i nu) expanded, for a rational vector nu."""
        shifted = []
        for j in range(self.nvars):
            shifted.append(MultiPoly.variable(self.nvars, j) + GaussianRational(0, nu[j]))
        total = MultiPoly.zero(self.nvars)
        for e, c in self._terms.items():
            term = MultiPoly.constant(self.nvars, c)
            for j, a in enumerate(e):
                if a:
                    term = term * shifted[j] ** a
            total = total + term
        return total

    def __repr__(self):
        if not self._terms:
            return f"MultiPoly({self.nvars}, 0)"
        parts = []
        for e in sorted(self._terms, reverse=True):
            mono = "*".join(f"x{j + 1}^{a}" if a > 1 else f"x{j + 1}" for j, a in enumerate(e) if a)
            parts.append(f"({self._terms[e]})" + (f"*{mono}" if mono else ""))
        return f"MultiPoly({self.nvars}, " + " + ".join(parts) + ")"

    def to_json(self) -> dict:
        return {
            "nvars": self.nvars,
            "terms": [{"exponent": list(e), "coefficient": self._terms[e].to_json()} for e in sorted(self._terms)],
        }

    @classmethod
    def from_json(cls, obj) -> MultiPoly:
        return cls(obj["nvars"], {tuple(t["exponent"]): GaussianRational.from_json(t["coefficient"]) for t in obj["terms"]})


def poly_eval(p: MultiPoly, point: Sequence[complex]) -> complex:
    """Floating evaluation of sum c_a x^a with per-variable power tables and fsum accumulation."""
    if len(point) != p.nvars:
        raise ValueError(f"point has length {len(point)}, polynomial has {p.nvars} variables")
    if p.is_zero():
        return 0j
    pts = [complex(x) for x in point]
    tops = [0] * p.nvars
    for e, _ in p.items():
        for j, a in enumerate(e):
            if a > tops[j]:
                tops[j] = a
    tables = []
    for j, x in enumerate(pts):
        row = [1 + 0j]
        for _ in range(tops[j]):
            row.append(row[-1] * x)
        tables.append(row)
    re_parts, im_parts = [], []
    for e, c in p.items():
        mono = complex(c)
        for j, a in enumerate(e):
            if a:
                mono *= tables[j][a]
        re_parts.append(mono.real)
        im_parts.append(mono.imag)
    return complex(math.fsum(re_parts), math.fsum(im_parts))


def homogeneity_degree(p: MultiPoly):
    """Common total degree of all terms, or INHOMOGENEOUS."""
    if p.is_zero():
        raise ValueError("the zero polynomial has no homogeneity degree")
    degs = {sum(e) for e, _ in p.items()}
    if len(degs) == 1:
        return degs.pop()
    return INHOMOGENEOUS


def variables(nvars: int) -> list[MultiPoly]:
    return [MultiPoly.variable(nvars, j) for j in range(nvars)]


def multi_indices(n: int, k: int) -> Iterable[Exponent]:
    """All exponents of length n with |a| = k, in lexicographically decreasing order."""
    if n == 1:
        yield (k,)
        return
    for first in range(k, -1, -1):
        for rest in multi_indices(n - 1, k - first):
            yield (first,) + rest
