"""Exact scalars and polynomials.

Three coefficient domains are used throughout the package:

* rationals, represented by :class:`gmpy2.mpq` (always reduced, positive
  denominator);
* :class:`Cyc12`, the cyclotomic field of order 12;
* :class:`Jet`, first-order jets ``a + b*eps`` over either of the above.

On top of these sit :class:`MPoly`, a sparse multivariate polynomial with
rational coefficients, and :class:`LaurentUPoly`, a univariate Laurent
polynomial over any exact field.
"""

from __future__ import annotations

import json
import random
from fractions import Fraction
from math import comb
from typing import Any, Callable, Iterable, Mapping, Sequence

from gmpy2 import mpq

Rational = mpq

#: Canonical ordering of named indeterminates; any other name sorts after.
CANONICAL_VARS = ("x", "tau", "alpha", "t")


class DomainError(ArithmeticError):
    """Raised when an operation is evaluated outside its domain."""


def rational(value: Any) -> mpq:
    """Convert ``value`` to an exact rational.

    Accepts integers, :class:`fractions.Fraction`, ``mpq`` and strings of the
    form ``"p"`` or ``"p/q"``.  Floats are rejected on purpose.
    """
    if isinstance(value, float):
        raise TypeError("floats are not exact; pass a 'p/q' string instead")
    if isinstance(value, str):
        text = value.strip()
        try:
            if "/" in text:
                num, den = text.split("/")
                if int(den) == 0:
                    raise ZeroDivisionError("zero denominator in " + repr(value))
                return mpq(int(num), int(den))
            return mpq(int(text))
        except ValueError as exc:
            raise ValueError(f"not a rational literal: {value!r}") from exc
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    return mpq(value)


def format_rational(value: Any) -> str:
    value = rational(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def is_rational(value: Any) -> bool:
    return isinstance(value, (int, type(mpq(0)), Fraction))


def bracket(z):
    """Return ``z - 1/z``."""
    if z == 0:
        raise DomainError("bracket undefined at 0")
    return z - 1 / z


def random_rational(rng: random.Random, height: int = 40, positive: bool = False) -> mpq:
    """Uniform-ish rational with numerator and denominator bounded by ``height``."""
    num = rng.randint(1, height)
    den = rng.randint(1, height)
    sign = 1 if positive or rng.random() < 0.5 else -1
    return mpq(sign * num, den)


# ---------------------------------------------------------------------------
# Cyclotomic field of order 12
# ---------------------------------------------------------------------------

_RATIONAL_TYPES = (int, type(mpq(0)), Fraction)


class Cyc12:
    """Element ``c0 + c1*z + c2*z^2 + c3*z^3`` of Q(z), z primitive 12th root.

    The minimal polynomial is ``z^4 - z^2 + 1``.  Notable elements:
    ``Cyc12.q()`` is z^4 (a primitive cube root of unity) and ``Cyc12.i()`` is
    z^3.
    """

    __slots__ = ("c",)

    def __init__(self, coeffs: Iterable[Any] = (0, 0, 0, 0)):
        c = tuple(mpq(v) for v in coeffs)
        if len(c) != 4:
            raise ValueError("Cyc12 needs exactly four coefficients")
        self.c = c

    @classmethod
    def zeta(cls) -> "Cyc12":
        return cls((0, 1, 0, 0))

    @classmethod
    def q(cls) -> "Cyc12":
        return cls((-1, 0, 1, 0))

    @classmethod
    def i(cls) -> "Cyc12":
        return cls((0, 0, 0, 1))

    @classmethod
    def sqrt3(cls) -> "Cyc12":
        # z + z^11 = z + (z - z^3)
        return cls((0, 2, 0, -1))

    @staticmethod
    def _coerce(other):
        if isinstance(other, Cyc12):
            return other
        if isinstance(other, _RATIONAL_TYPES):
            return Cyc12((other, 0, 0, 0))
        return None

    def is_rational(self) -> bool:
        return self.c[1] == 0 and self.c[2] == 0 and self.c[3] == 0

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self.c, o.c
        return Cyc12((a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]))

    __radd__ = __add__

    def __neg__(self):
        a = self.c
        return Cyc12((-a[0], -a[1], -a[2], -a[3]))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self.c, o.c
        return Cyc12((a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if isinstance(other, _RATIONAL_TYPES):
            a = self.c
            return Cyc12((a[0] * other, a[1] * other, a[2] * other, a[3] * other))
        if not isinstance(other, Cyc12):
            return NotImplemented
        a0, a1, a2, a3 = self.c
        b0, b1, b2, b3 = other.c
        p0 = a0 * b0
        p1 = a0 * b1 + a1 * b0
        p2 = a0 * b2 + a1 * b1 + a2 * b0
        p3 = a0 * b3 + a1 * b2 + a2 * b1 + a3 * b0
        p4 = a1 * b3 + a2 * b2 + a3 * b1
        p5 = a2 * b3 + a3 * b2
        p6 = a3 * b3
        # z^6 = -1, z^5 = z^3 - z, z^4 = z^2 - 1
        return Cyc12((p0 - p4 - p6, p1 - p5, p2 + p4, p3 + p5))

    __rmul__ = __mul__

    def inverse(self) -> "Cyc12":
        if self == 0:
            raise ZeroDivisionError("inverse of zero in Cyc12")
        # Solve self * y = 1 via the 4x4 multiplication matrix.
        cols = [(self * Cyc12.zeta() ** k).c for k in range(4)]
        mat = [[cols[k][r] for k in range(4)] + [mpq(1 if r == 0 else 0)] for r in range(4)]
        sol = solve_linear([row[:4] for row in mat], [row[4] for row in mat])
        return Cyc12(sol)

    def __truediv__(self, other):
        if isinstance(other, _RATIONAL_TYPES):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            a = self.c
            return Cyc12((a[0] / other, a[1] / other, a[2] / other, a[3] / other))
        if not isinstance(other, Cyc12):
            return NotImplemented
        if other.is_rational():
            return self / other.c[0]
        return self * other.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = Cyc12((1, 0, 0, 0))
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.c == o.c

    def __hash__(self):
        if self.is_rational():
            return hash(self.c[0])
        return hash(self.c)

    def __bool__(self):
        return any(self.c)

    def __repr__(self):
        return f"Cyc12({', '.join(format_rational(v) for v in self.c)})"

    def __str__(self):
        parts = []
        for k, v in enumerate(self.c):
            if v == 0:
                continue
            mono = "" if k == 0 else ("zeta" if k == 1 else f"zeta^{k}")
            if not mono:
                parts.append(format_rational(v))
            elif v == 1:
                parts.append(mono)
            else:
                parts.append(f"{format_rational(v)}*{mono}")
        return " + ".join(parts) if parts else "0"


# ---------------------------------------------------------------------------
# First-order jets
# ---------------------------------------------------------------------------


class Jet:
    """Dual number ``value + deriv * eps`` with ``eps**2 == 0``."""

    __slots__ = ("value", "deriv")

    def __init__(self, value, deriv=0):
        self.value = value
        self.deriv = deriv

    @classmethod
    def variable(cls, value) -> "Jet":
        """Lift the active variable: derivative 1."""
        return cls(value, 1)

    @staticmethod
    def _coerce(other):
        if isinstance(other, Jet):
            return other
        if isinstance(other, _RATIONAL_TYPES) or isinstance(other, Cyc12):
            return Jet(other, 0)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Jet(self.value + o.value, self.deriv + o.deriv)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.value, -self.deriv)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Jet(self.value - o.value, self.deriv - o.deriv)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Jet(self.value * o.value, self.value * o.deriv + self.deriv * o.value)

    __rmul__ = __mul__

    def inverse(self) -> "Jet":
        if self.value == 0:
            raise ZeroDivisionError("jet with zero value is not invertible")
        inv = 1 / self.value
        return Jet(inv, -self.deriv * inv * inv)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = Jet(1, 0)
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.value == o.value and self.deriv == o.deriv

    def __hash__(self):
        return hash((self.value, self.deriv))

    def __repr__(self):
        return f"Jet({self.value!r}, {self.deriv!r})"


# ---------------------------------------------------------------------------
# Linear algebra over exact fields
# ---------------------------------------------------------------------------


def solve_linear(matrix: Sequence[Sequence[Any]], rhs: Sequence[Any]) -> list:
    """Solve a square linear system by Gaussian elimination over a field."""
    n = len(matrix)
    aug = [list(row) + [rhs[r]] for r, row in enumerate(matrix)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise ZeroDivisionError("singular linear system")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [aug[r][n] for r in range(n)]


def bareiss_det(matrix: Sequence[Sequence[Any]]):
    """Fraction-free determinant (Bareiss) over an integral domain with exact division.

    Works over rationals, :class:`Cyc12` and plain integers.
    """
    n = len(matrix)
    if n == 0:
        return mpq(1)
    m = [list(row) for row in matrix]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if m[r][k] != 0), None)
            if swap is None:
                return m[k][k] * 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


# ---------------------------------------------------------------------------
# Sparse multivariate polynomials
# ---------------------------------------------------------------------------


def _var_key(name: str):
    if name in CANONICAL_VARS:
        return (0, CANONICAL_VARS.index(name), "")
    return (1, 0, name)


def sort_vars(names: Iterable[str]) -> tuple[str, ...]:
    return tuple(sorted(set(names), key=_var_key))


class MPoly:
    """Sparse polynomial with rational coefficients in named indeterminates.

    Exponents are stored as tuples aligned with :attr:`vars`, which always
    follows the canonical order (x, tau, alpha, t, then other names sorted).
    Negative exponents are tolerated so that intermediate Laurent expressions
    can be carried; :meth:`is_polynomial` tells them apart.
    """

    __slots__ = ("vars", "terms")

    def __init__(self, terms: Mapping[tuple, Any] | None = None, vars: Sequence[str] = ()):
        self.vars = tuple(vars)
        if list(self.vars) != list(sort_vars(self.vars)):
            raise ValueError(f"variables {self.vars} not in canonical order")
        clean = {}
        for exp, coeff in (terms or {}).items():
            if len(exp) != len(self.vars):
                raise ValueError("exponent length does not match variables")
            c = rational(coeff)
            if c != 0:
                clean[tuple(int(e) for e in exp)] = c
        self.terms = clean

    # -- construction ------------------------------------------------------
    @classmethod
    def const(cls, value, vars: Sequence[str] = ()) -> "MPoly":
        vars = sort_vars(vars)
        return cls({(0,) * len(vars): value}, vars)

    @classmethod
    def var(cls, name: str, power: int = 1) -> "MPoly":
        return cls({(power,): 1}, (name,))

    @classmethod
    def _raw(cls, terms: dict, vars: tuple) -> "MPoly":
        obj = cls.__new__(cls)
        obj.vars = vars
        obj.terms = terms
        return obj

    def with_vars(self, vars: Sequence[str]) -> "MPoly":
        """Re-express over a superset of variables (canonical order)."""
        vars = sort_vars(vars)
        if vars == self.vars:
            return self
        missing = set(self.vars) - set(vars)
        if missing:
            raise ValueError(f"cannot drop variables {sorted(missing)}")
        index = [vars.index(v) for v in self.vars]
        terms = {}
        for exp, c in self.terms.items():
            new = [0] * len(vars)
            for pos, e in zip(index, exp):
                new[pos] = e
            terms[tuple(new)] = c
        return MPoly._raw(terms, vars)

    @staticmethod
    def _align(a: "MPoly", b: "MPoly"):
        if a.vars == b.vars:
            return a, b
        vars = sort_vars(a.vars + b.vars)
        return a.with_vars(vars), b.with_vars(vars)

    @staticmethod
    def _coerce(other):
        if isinstance(other, MPoly):
            return other
        if isinstance(other, _RATIONAL_TYPES):
            return MPoly.const(other)
        return None

    # -- arithmetic ----------------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self._align(self, o)
        terms = dict(a.terms)
        for exp, c in b.terms.items():
            v = terms.get(exp, 0) + c
            if v:
                terms[exp] = v
            else:
                terms.pop(exp, None)
        return MPoly._raw(terms, a.vars)

    __radd__ = __add__

    def __neg__(self):
        return MPoly._raw({e: -c for e, c in self.terms.items()}, self.vars)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, _RATIONAL_TYPES):
            c0 = rational(other)
            if c0 == 0:
                return MPoly._raw({}, self.vars)
            return MPoly._raw({e: c * c0 for e, c in self.terms.items()}, self.vars)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self._align(self, o)
        terms: dict = {}
        for ea, ca in a.terms.items():
            for eb, cb in b.terms.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                terms[e] = terms.get(e, 0) + ca * cb
        return MPoly._raw({e: c for e, c in terms.items() if c}, a.vars)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("MPoly powers must be non-negative integers")
        result = MPoly.const(1, self.vars)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self._align(self, o)
        return a.terms == b.terms

    def __hash__(self):
        return hash(tuple(sorted(self.drop_unused().terms.items())))

    def __bool__(self):
        return bool(self.terms)

    # -- inspection ----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_polynomial(self) -> bool:
        return all(e >= 0 for exp in self.terms for e in exp)

    def require_polynomial(self) -> "MPoly":
        if not self.is_polynomial():
            raise DomainError(f"negative exponent survives in {self}")
        return self

    def drop_unused(self) -> "MPoly":
        used = [k for k in range(len(self.vars)) if any(exp[k] for exp in self.terms)]
        if len(used) == len(self.vars):
            return self
        vars = tuple(self.vars[k] for k in used)
        return MPoly._raw({tuple(exp[k] for k in used): c for exp, c in self.terms.items()}, vars)

    def degree(self, var: str) -> int:
        """Highest exponent of ``var``; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        if var not in self.vars:
            return 0
        k = self.vars.index(var)
        return max(exp[k] for exp in self.terms)

    def low_degree(self, var: str) -> int:
        if not self.terms or var not in self.vars:
            return 0
        k = self.vars.index(var)
        return min(exp[k] for exp in self.terms)

    def coefficients(self) -> list:
        return list(self.terms.values())

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.terms.values())

    def constant_value(self):
        """The value of a polynomial with no remaining variable dependence."""
        p = self.drop_unused()
        if p.vars:
            raise ValueError(f"{self} is not constant")
        return p.terms.get((), mpq(0))

    # -- substitution --------------------------------------------------------
    def coeff(self, var: str, power: int) -> "MPoly":
        """Coefficient of ``var**power`` as a polynomial in the other variables."""
        if var not in self.vars:
            return self if power == 0 else MPoly._raw({}, self.vars)
        k = self.vars.index(var)
        vars = self.vars[:k] + self.vars[k + 1:]
        terms = {}
        for exp, c in self.terms.items():
            if exp[k] == power:
                terms[exp[:k] + exp[k + 1:]] = c
        return MPoly._raw(terms, vars)

    def as_univariate(self, var: str) -> dict:
        """Map power -> coefficient polynomial in the remaining variables."""
        if var not in self.vars:
            return {0: self} if self.terms else {}
        k = self.vars.index(var)
        vars = self.vars[:k] + self.vars[k + 1:]
        out: dict = {}
        for exp, c in self.terms.items():
            out.setdefault(exp[k], {})[exp[:k] + exp[k + 1:]] = c
        return {p: MPoly._raw(t, vars) for p, t in out.items()}

    def truncate(self, var: str, max_power: int) -> "MPoly":
        if var not in self.vars:
            return self
        k = self.vars.index(var)
        return MPoly._raw({e: c for e, c in self.terms.items() if e[k] <= max_power}, self.vars)

    def shift(self, var: str, power: int) -> "MPoly":
        """Multiply by the monomial ``var**power`` (power may be negative)."""
        p = self.with_vars(self.vars + (var,))
        k = p.vars.index(var)
        return MPoly._raw(
            {e[:k] + (e[k] + power,) + e[k + 1:]: c for e, c in p.terms.items()}, p.vars
        )

    def substitute(self, values: Mapping[str, Any]) -> "MPoly":
        """Substitute exact scalars or polynomials for some variables."""
        result = MPoly._raw({}, ())
        keep = [v for v in self.vars if v not in values]
        keep_idx = [self.vars.index(v) for v in keep]
        subs = [(self.vars.index(v), values[v]) for v in self.vars if v in values]
        cache: dict = {}

        def power(k: int, value, e: int):
            key = (k, e)
            if key not in cache:
                if isinstance(value, MPoly):
                    if e < 0:
                        raise DomainError("cannot invert a polynomial")
                    cache[key] = value ** e
                else:
                    cache[key] = rational(value) ** e if is_rational(value) else value ** e
            return cache[key]

        acc: dict = {}
        poly_part = MPoly._raw({}, tuple(keep))
        for exp, c in self.terms.items():
            factor = c
            poly_factor = None
            for k, value in subs:
                pv = power(k, value, exp[k])
                if isinstance(pv, MPoly):
                    poly_factor = pv if poly_factor is None else poly_factor * pv
                else:
                    factor = factor * pv
            mono = tuple(exp[k] for k in keep_idx)
            if poly_factor is None:
                if not isinstance(factor, _RATIONAL_TYPES):
                    raise TypeError("substitution values must be rational or MPoly")
                acc[mono] = acc.get(mono, 0) + factor
            else:
                term = MPoly._raw({mono: mpq(1)}, tuple(keep)) * poly_factor * factor
                poly_part = poly_part + term
        result = MPoly._raw({e: c for e, c in acc.items() if c}, tuple(keep)) + poly_part
        return result

    def evaluate(self, values: Mapping[str, Any]):
        """Evaluate at exact scalar values for every variable; returns a scalar.

        The scalar type may be rational, :class:`Cyc12` or :class:`Jet`.
        """
        total = 0
        pw: dict = {}
        for exp, c in self.terms.items():
            term = c
            for name, e in zip(self.vars, exp):
                if e == 0:
                    continue
                key = (name, e)
                if key not in pw:
                    pw[key] = values[name] ** e
                term = term * pw[key]
            total = total + term
        return total

    def map_coefficients(self, fn: Callable[[mpq], Any]) -> "MPoly":
        return MPoly({e: fn(c) for e, c in self.terms.items()}, self.vars)

    # -- presentation ----------------------------------------------------------
    def sorted_terms(self) -> list:
        return sorted(self.terms.items())

    def to_json_obj(self) -> dict:
        return {
            "vars": list(self.vars),
            "terms": [
                {"exp": list(e), "num": str(c.numerator), "den": str(c.denominator)}
                for e, c in self.sorted_terms()
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), separators=(",", ":"))

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> "MPoly":
        vars = tuple(obj["vars"])
        terms = {tuple(t["exp"]): mpq(int(t["num"]), int(t["den"])) for t in obj["terms"]}
        return cls(terms, vars)

    @classmethod
    def from_json(cls, text: str) -> "MPoly":
        return cls.from_json_obj(json.loads(text))

    def __repr__(self):
        return f"MPoly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        pieces = []
        for exp, c in sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0])):
            mono = "*".join(
                name if e == 1 else f"{name}^{e}" for name, e in zip(self.vars, exp) if e
            )
            coeff = format_rational(abs(c))
            if mono and abs(c) == 1:
                body = mono
            elif mono:
                body = f"{coeff}*{mono}"
            else:
                body = coeff
            pieces.append(("-" if c < 0 else "+", body))
        text = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
        for sign, body in pieces[1:]:
            text += f" {sign} {body}"
        return text


def poly(expr: str, **_unused) -> MPoly:
    """Parse a small polynomial expression such as ``"3 + 5*x + 3*x^2"``.

    Supports ``+ - * ^``, parentheses, integers, ``p/q`` via division by an
    integer literal, and variable names.  Intended for tables and tests.
    """
    return _Parser(expr).parse()


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def parse(self) -> MPoly:
        value = self._expr()
        if self.pos != len(self.tokens):
            raise ValueError(f"unexpected token {self.tokens[self.pos]!r}")
        return value

    def _peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def _expr(self) -> MPoly:
        sign = 1
        if self._peek() in ("+", "-"):
            sign = -1 if self._take() == "-" else 1
        value = self._term() * sign
        while self._peek() in ("+", "-"):
            op = self._take()
            rhs = self._term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def _term(self) -> MPoly:
        value = self._power()
        while True:
            tok = self._peek()
            if tok == "*":
                self._take()
                value = value * self._power()
            elif tok == "/":
                self._take()
                den = self._power().constant_value()
                value = value * (1 / den)
            elif tok == "(" or (tok is not None and (tok[0].isalnum())):
                value = value * self._power()
            else:
                return value

    def _power(self) -> MPoly:
        base = self._atom()
        if self._peek() == "^":
            self._take()
            exponent = int(self._take())
            base = base ** exponent
        return base

    def _atom(self) -> MPoly:
        tok = self._take()
        if tok == "(":
            value = self._expr()
            if self._take() != ")":
                raise ValueError("unbalanced parentheses")
            return value
        if tok.isdigit():
            return MPoly.const(int(tok))
        if tok[0].isalpha():
            return MPoly.var(tok)
        raise ValueError(f"unexpected token {tok!r}")


def _tokenize(text: str) -> list:
    tokens = []
    k = 0
    while k < len(text):
        ch = text[k]
        if ch.isspace():
            k += 1
        elif ch.isdigit():
            j = k
            while j < len(text) and text[j].isdigit():
                j += 1
            tokens.append(text[k:j])
            k = j
        elif ch.isalpha() or ch == "_":
            j = k
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(text[k:j])
            k = j
        elif ch in "+-*/^()":
            tokens.append(ch)
            k += 1
        else:
            raise ValueError(f"bad character {ch!r} in {text!r}")
    return tokens


# ---------------------------------------------------------------------------
# Series helpers and coefficient extraction
# ---------------------------------------------------------------------------


def coeff_extract(p: MPoly, exponents: Mapping[str, int]) -> MPoly:
    """Coefficient of the monomial ``prod u**e`` (over the given variables) in ``p``.

    The result is a polynomial in the remaining variables; missing monomials
    give the zero polynomial.
    """
    result = p
    for name, e in exponents.items():
        result = result.coeff(name, e)
    return result.drop_unused() if result.terms else MPoly._raw({}, ())


def truncated_geometric(c, order: int) -> list:
    """Coefficients ``[1, -c, c^2, ..., (-c)^order]`` of ``1/(1 + c*u)``."""
    if order < 0:
        raise ValueError("order must be non-negative")
    out = [MPoly.const(1) if isinstance(c, MPoly) else mpq(1)]
    for _ in range(order):
        out.append(out[-1] * (-c))
    return out


def truncated_binomial(c, exponent: int, order: int) -> list:
    """Coefficients of ``(1 + c*u)**exponent`` through ``u**order``.

    ``exponent`` may be negative, in which case the series is infinite and is
    truncated; ``exponent = -1`` reproduces :func:`truncated_geometric`.
    """
    if order < 0:
        raise ValueError("order must be non-negative")
    out = []
    binom = mpq(1)
    cpow = MPoly.const(1) if isinstance(c, MPoly) else mpq(1)
    for k in range(order + 1):
        out.append(cpow * binom)
        binom = binom * (exponent - k) / (k + 1)
        cpow = cpow * c
    return out


def binomial(a: int, b: int) -> int:
    """Binomial coefficient with C(a, b) = 0 for b < 0 or b > a (a >= 0)."""
    if b < 0 or a < 0 or b > a:
        return 0
    return comb(a, b)


# ---------------------------------------------------------------------------
# Univariate Laurent polynomials
# ---------------------------------------------------------------------------


class LaurentUPoly:
    """Laurent polynomial in one variable over an exact field."""

    __slots__ = ("var", "coeffs")

    def __init__(self, coeffs: Mapping[int, Any] | None = None, var: str = "z"):
        self.var = var
        self.coeffs = {int(k): v for k, v in (coeffs or {}).items() if v != 0}

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def low_degree(self) -> int:
        if not self.coeffs:
            raise ValueError("zero Laurent polynomial has no degree")
        return min(self.coeffs)

    @property
    def high_degree(self) -> int:
        if not self.coeffs:
            raise ValueError("zero Laurent polynomial has no degree")
        return max(self.coeffs)

    def coefficient(self, k: int):
        return self.coeffs.get(k, 0)

    def __call__(self, z):
        if z == 0:
            raise DomainError("Laurent polynomial evaluated at 0")
        total = 0
        for k, c in self.coeffs.items():
            total = total + c * z ** k
        return total

    def __eq__(self, other):
        if not isinstance(other, LaurentUPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __repr__(self):
        body = ", ".join(f"{k}: {v}" for k, v in sorted(self.coeffs.items()))
        return f"LaurentUPoly({{{body}}}, var={self.var!r})"


class InterpolationError(ArithmeticError):
    """Samples are inconsistent with the declared degree window."""


def interpolate_laurent(samples: Sequence[tuple], lowdeg: int, highdeg: int, var: str = "z") -> LaurentUPoly:
    """Reconstruct a Laurent polynomial with exponents in ``[lowdeg, highdeg]``.

    The first ``highdeg - lowdeg + 1`` samples determine the polynomial (Newton
    interpolation of ``z**(-lowdeg) * f``); every further sample must agree,
    otherwise :class:`InterpolationError` is raised.
    """
    width = highdeg - lowdeg + 1
    if width <= 0:
        raise ValueError("empty degree window")
    if len(samples) < width:
        raise ValueError(f"need at least {width} samples, got {len(samples)}")
    pts = [p for p, _ in samples]
    if any(p == 0 for p in pts):
        raise DomainError("Laurent interpolation needs nonzero sample points")
    if len(set(map(_hashable, pts))) != len(pts):
        raise ValueError("sample points must be distinct")
    xs = pts[:width]
    ys = [v * p ** (-lowdeg) for p, v in samples[:width]]
    # Newton divided differences
    coef = list(ys)
    for j in range(1, width):
        for i in range(width - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    # expand the Newton form into monomials
    mono = [0] * width
    for k in range(width - 1, -1, -1):
        # mono = mono * (z - xs[k]) + coef[k]
        shifted = [0] + mono[:-1]
        mono = [s - xs[k] * m for s, m in zip(shifted, mono)]
        mono[0] = mono[0] + coef[k]
    result = LaurentUPoly({lowdeg + k: c for k, c in enumerate(mono)}, var)
    for p, v in samples[width:]:
        if result(p) != v:
            raise InterpolationError(
                f"sample at {p} disagrees with the interpolant in window [{lowdeg}, {highdeg}]"
            )
    return result


def _hashable(value):
    if isinstance(value, Cyc12):
        return value.c
    if isinstance(value, Jet):
        return (value.value, value.deriv)
    return value
