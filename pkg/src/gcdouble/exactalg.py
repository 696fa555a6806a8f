"""Exact sparse polynomial arithmetic over Q.

Everything downstream (L-matrices, seeds, mutations, brackets) runs on the
polynomial ring

    Q[x_ij, y_ij, lam],   1 <= i, j <= n,

with coefficients in `fractions.Fraction`.  A polynomial is a dict mapping a
*packed monomial* to its coefficient.  The packing puts the total degree into
the most significant field of a single Python int, followed by one 16-bit
field per variable in the fixed order x11, x12, ..., xnn, y11, ..., ynn, lam.
Two consequences the rest of the code relies on:

* integer comparison of packed keys is graded-lex comparison (total degree
  first, ties broken by the exponent of x11, then x12, and so on), so
  ``max(terms)`` is the leading monomial;
* the product of two monomials is the sum of their packed ints.

`Context` owns the packing for a fixed n; polynomials from different contexts
never mix.  Determinants go through fraction-free Bareiss elimination (every
division exact) with cofactor expansion as an independent second route; both
are exposed so tests can cross-check one against the other.

Forward-mode differentiation is provided by `Dual` scalars (a value plus a
sparse gradient dict).  `partials` differentiates a Poly both ways, symbolic
and dual, and raises if the two disagree.

The matrix helpers prefixed with ``g`` (gdet, gmatmul, ...) are generic over
the scalar type: Fraction, Dual and Poly all work, since all three support
+, -, * and exact division via /.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

__all__ = [
    "BITS",
    "Context",
    "Dual",
    "ExactalgError",
    "Poly",
    "PolyMatrix",
    "RatPoint",
    "context",
    "det_bareiss",
    "det_cofactor",
    "dj_check",
    "gadjugate",
    "gdet",
    "gidentity",
    "ginverse",
    "gmatmul",
    "gmatvec",
    "gminor",
    "gscale",
    "gsubmatrix",
    "gtranspose",
    "interp_coeffs",
    "partials",
    "random_point",
]

BITS = 16
_MASK = (1 << BITS) - 1
_F0 = Fraction(0)
_F1 = Fraction(1)

Scalar = Union[Fraction, int]


class ExactalgError(Exception):
    """Raised for inexact divisions, context mixing and degenerate pivots."""


# ---------------------------------------------------------------------------
# contexts and packed monomials
# ---------------------------------------------------------------------------


class Context:
    """Variable universe and monomial packing for a fixed matrix size n.

    Variables are ordered x11, x12, ..., xnn, y11, ..., ynn, lam; that order
    is also the lex order used inside the graded-lex comparison.  Use the
    module-level `context(n)` factory so that equal n share one instance and
    identity checks suffice.
    """

    def __init__(self, n: int):
        if not 1 <= n <= 9:
            raise ExactalgError(f"context size n={n} out of the supported range 1..9")
        self.n = n
        names: List[str] = []
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                names.append(f"x{i}{j}")
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                names.append(f"y{i}{j}")
        names.append("lam")
        self.names: Tuple[str, ...] = tuple(names)
        self.nvars = len(names)
        self.index: Dict[str, int] = {name: k for k, name in enumerate(names)}
        # most significant variable field belongs to names[0]
        self._shifts: Tuple[int, ...] = tuple(
            (self.nvars - 1 - k) * BITS for k in range(self.nvars)
        )
        self._degshift = self.nvars * BITS
        self.zero = Poly(self, {})
        self.one = Poly(self, {0: _F1})

    # -- packing ------------------------------------------------------------

    def pack(self, exps: Sequence[int]) -> int:
        if len(exps) != self.nvars:
            raise ExactalgError("exponent vector length mismatch")
        key = 0
        deg = 0
        for e, shift in zip(exps, self._shifts):
            if not 0 <= e <= _MASK:
                raise ExactalgError(f"exponent {e} outside the packed field range")
            key += e << shift
            deg += e
        return key + (deg << self._degshift)

    def unpack(self, key: int) -> Tuple[int, ...]:
        return tuple((key >> shift) & _MASK for shift in self._shifts)

    def degree_of(self, key: int) -> int:
        return key >> self._degshift

    # -- element construction ----------------------------------------------

    def const(self, c: Scalar) -> Poly:
        c = Fraction(c)
        return Poly(self, {0: c} if c else {})

    def var(self, name: str) -> Poly:
        k = self.index.get(name)
        if k is None:
            raise ExactalgError(f"unknown variable {name!r} for n={self.n}")
        return Poly(self, {(1 << self._shifts[k]) + (1 << self._degshift): _F1})

    def x(self, i: int, j: int) -> Poly:
        return self.var(f"x{i}{j}")

    def y(self, i: int, j: int) -> Poly:
        return self.var(f"y{i}{j}")

    @property
    def lam(self) -> Poly:
        return self.var("lam")

    def poly(self, terms: Mapping[Tuple[int, ...], Scalar]) -> Poly:
        """Build a Poly from a map of exponent tuples to coefficients."""
        out: Dict[int, Fraction] = {}
        for exps, c in terms.items():
            c = Fraction(c)
            if c:
                key = self.pack(exps)
                acc = out.get(key, _F0) + c
                if acc:
                    out[key] = acc
                else:
                    out.pop(key, None)
        return Poly(self, out)

    def __repr__(self) -> str:
        return f"Context(n={self.n})"


@lru_cache(maxsize=None)
def context(n: int) -> Context:
    return Context(n)


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------


class Poly:
    """Sparse multivariate polynomial with Fraction coefficients.

    Instances are treated as immutable; the term dict is never mutated after
    construction and never exposed for mutation.  Arithmetic accepts ints,
    Fractions and Polys of the same context.  `/` performs exact division and
    raises ExactalgError when the division leaves a remainder.
    """

    __slots__ = ("ctx", "terms", "_hashcache")

    def __init__(self, ctx: Context, terms: Dict[int, Fraction]):
        self.ctx = ctx
        self.terms = terms
        self._hashcache: Optional[int] = None

    # -- basic queries ------------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def nterms(self) -> int:
        return len(self.terms)

    def total_degree(self) -> int:
        if not self.terms:
            return 0
        return self.ctx.degree_of(max(self.terms))

    def leading_key(self) -> int:
        if not self.terms:
            raise ExactalgError("zero polynomial has no leading term")
        return max(self.terms)

    def degree_in(self, name: str) -> int:
        k = self.ctx.index[name]
        shift = self.ctx._shifts[k]
        best = 0
        for key in self.terms:
            e = (key >> shift) & _MASK
            if e > best:
                best = e
        return best

    def coefficient(self, exps: Sequence[int]) -> Fraction:
        return self.terms.get(self.ctx.pack(exps), _F0)

    def constant_term(self) -> Fraction:
        return self.terms.get(0, _F0)

    # -- equality -----------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Poly):
            return self.ctx is other.ctx and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            if not other:
                return not self.terms
            return self.terms == {0: other}
        return NotImplemented

    def __hash__(self) -> int:
        if self._hashcache is None:
            self._hashcache = hash(frozenset(self.terms.items()))
        return self._hashcache

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other: object) -> Optional["Poly"]:
        if isinstance(other, Poly):
            if other.ctx is not self.ctx:
                raise ExactalgError("mixing polynomials from different contexts")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ctx.const(other)
        return None

    def __add__(self, other: object) -> "Poly":
        p = self._coerce(other)
        if p is None:
            return NotImplemented
        big, small = (self.terms, p.terms) if len(self.terms) >= len(p.terms) else (p.terms, self.terms)
        out = dict(big)
        for key, c in small.items():
            acc = out.get(key, _F0) + c
            if acc:
                out[key] = acc
            else:
                out.pop(key, None)
        return Poly(self.ctx, out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(self.ctx, {key: -c for key, c in self.terms.items()})

    def __sub__(self, other: object) -> "Poly":
        p = self._coerce(other)
        if p is None:
            return NotImplemented
        out = dict(self.terms)
        for key, c in p.terms.items():
            acc = out.get(key, _F0) - c
            if acc:
                out[key] = acc
            else:
                out.pop(key, None)
        return Poly(self.ctx, out)

    def __rsub__(self, other: object) -> "Poly":
        p = self._coerce(other)
        if p is None:
            return NotImplemented
        return p.__sub__(self)

    def __mul__(self, other: object) -> "Poly":
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            if not c:
                return self.ctx.zero
            return Poly(self.ctx, {key: v * c for key, v in self.terms.items()})
        p = self._coerce(other)
        if p is None:
            return NotImplemented
        a, b = self.terms, p.terms
        if len(a) > len(b):
            a, b = b, a
        out: Dict[int, Fraction] = {}
        get = out.get
        for k1, c1 in a.items():
            for k2, c2 in b.items():
                key = k1 + k2
                acc = get(key)
                out[key] = c1 * c2 if acc is None else acc + c1 * c2
        return Poly(self.ctx, {key: c for key, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "Poly":
        if not isinstance(e, int) or e < 0:
            raise ExactalgError("polynomial powers must be nonnegative integers")
        result = self.ctx.one
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def exact_div(self, den: object) -> "Poly":
        """Divide exactly, raising ExactalgError when a remainder is left."""
        if isinstance(den, (int, Fraction)):
            c = Fraction(den)
            if not c:
                raise ExactalgError("division by zero")
            return Poly(self.ctx, {key: v / c for key, v in self.terms.items()})
        d = self._coerce(den)
        if d is None:
            raise ExactalgError(f"cannot divide Poly by {type(den).__name__}")
        if not d.terms:
            raise ExactalgError("division by zero polynomial")
        if len(d.terms) == 1:
            ((dkey, dcoef),) = d.terms.items()
            dexp = self.ctx.unpack(dkey)
            out: Dict[int, Fraction] = {}
            for key, c in self.terms.items():
                exp = self.ctx.unpack(key)
                if any(e < de for e, de in zip(exp, dexp)):
                    raise ExactalgError("inexact division: monomial does not divide")
                out[key - dkey] = c / dcoef
            return Poly(self.ctx, out)
        num = dict(self.terms)
        dlead = max(d.terms)
        dcoef = d.terms[dlead]
        dexp = self.ctx.unpack(dlead)
        quot: Dict[int, Fraction] = {}
        while num:
            nlead = max(num)
            nexp = self.ctx.unpack(nlead)
            if any(ne < de for ne, de in zip(nexp, dexp)):
                raise ExactalgError("inexact division: remainder is nonzero")
            qkey = nlead - dlead
            qcoef = num[nlead] / dcoef
            quot[qkey] = qcoef
            for key, c in d.terms.items():
                target = key + qkey
                acc = num.get(target, _F0) - c * qcoef
                if acc:
                    num[target] = acc
                else:
                    num.pop(target, None)
        return Poly(self.ctx, quot)

    __truediv__ = exact_div

    # -- calculus and evaluation --------------------------------------------

    def partial(self, name: str) -> "Poly":
        """Symbolic partial derivative with respect to one variable."""
        k = self.ctx.index.get(name)
        if k is None:
            raise ExactalgError(f"unknown variable {name!r}")
        shift = self.ctx._shifts[k]
        drop = (1 << shift) + (1 << self.ctx._degshift)
        out: Dict[int, Fraction] = {}
        for key, c in self.terms.items():
            e = (key >> shift) & _MASK
            if e:
                out[key - drop] = c * e
        return Poly(self.ctx, out)

    def eval(self, env: Mapping[str, object]):
        """Evaluate with variables bound to arbitrary ring scalars.

        The env must provide a value for every variable that actually occurs.
        Returns Fraction(0) for the zero polynomial.
        """
        ctx = self.ctx
        shifts = ctx._shifts
        names = ctx.names
        powers: List[Dict[int, object]] = [{} for _ in names]
        total = None
        for key in sorted(self.terms, reverse=True):
            c = self.terms[key]
            prod = None
            for idx, shift in enumerate(shifts):
                e = (key >> shift) & _MASK
                if not e:
                    continue
                cache = powers[idx]
                p = cache.get(e)
                if p is None:
                    try:
                        base = env[names[idx]]
                    except KeyError:
                        raise ExactalgError(f"no value bound for {names[idx]}") from None
                    p = base ** e
                    cache[e] = p
                prod = p if prod is None else prod * p
            term = c if prod is None else prod * c
            total = term if total is None else total + term
        return _F0 if total is None else total

    def subs_lam(self, value: Scalar) -> "Poly":
        """Substitute a rational number for lam, keeping x/y symbolic."""
        ctx = self.ctx
        shift = ctx._shifts[ctx.index["lam"]]
        value = Fraction(value)
        out: Dict[int, Fraction] = {}
        for key, c in self.terms.items():
            e = (key >> shift) & _MASK
            if e:
                key -= (e << shift) + (e << ctx._degshift)
                c = c * value ** e
            if not c:
                continue
            acc = out.get(key, _F0) + c
            if acc:
                out[key] = acc
            else:
                out.pop(key, None)
        return Poly(ctx, out)

    def lam_coefficients(self) -> List["Poly"]:
        """Split into coefficients of powers of lam, constant term first."""
        ctx = self.ctx
        shift = ctx._shifts[ctx.index["lam"]]
        buckets: Dict[int, Dict[int, Fraction]] = {}
        top = 0
        for key, c in self.terms.items():
            e = (key >> shift) & _MASK
            top = max(top, e)
            stripped = key - (e << shift) - (e << ctx._degshift)
            buckets.setdefault(e, {})[stripped] = c
        return [Poly(ctx, buckets.get(e, {})) for e in range(top + 1)]

    # -- rendering ----------------------------------------------------------

    def canonical_str(self) -> str:
        """Deterministic rendering, graded-lex order, leading term first."""
        if not self.terms:
            return "0"
        ctx = self.ctx
        pieces: List[str] = []
        for key in sorted(self.terms, reverse=True):
            c = self.terms[key]
            exps = ctx.unpack(key)
            factors = []
            for idx, e in enumerate(exps):
                if e == 1:
                    factors.append(ctx.names[idx])
                elif e > 1:
                    factors.append(f"{ctx.names[idx]}^{e}")
            mag = abs(c)
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = str(mag) + "*" + "*".join(factors)
            if not pieces:
                pieces.append(("-" if c < 0 else "") + body)
            else:
                pieces.append((" - " if c < 0 else " + ") + body)
        return "".join(pieces)

    def __str__(self) -> str:
        return self.canonical_str()

    def __repr__(self) -> str:
        s = self.canonical_str()
        if len(s) > 60:
            s = s[:57] + "..."
        return f"Poly({s})"


# ---------------------------------------------------------------------------
# dual numbers for forward-mode differentiation
# ---------------------------------------------------------------------------


class Dual:
    """Value plus sparse gradient, the scalar of forward-mode evaluation.

    The gradient maps variable names to Fractions; absent names mean zero.
    Division requires the denominator value to be nonzero.  For pivot
    selection inside gdet a Dual counts as usable only when its value part is
    nonzero (see _pivot_value), so elimination never divides by an
    infinitesimal.
    """

    __slots__ = ("val", "grad")

    def __init__(self, val: Scalar, grad: Optional[Mapping[str, Fraction]] = None):
        self.val = Fraction(val)
        self.grad: Dict[str, Fraction] = dict(grad) if grad else {}

    @staticmethod
    def seed(name: str, val: Scalar) -> "Dual":
        return Dual(val, {name: _F1})

    def __bool__(self) -> bool:
        return bool(self.val) or bool(self.grad)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Dual):
            return self.val == other.val and self.grad == other.grad
        if isinstance(other, (int, Fraction)):
            return not self.grad and self.val == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.val, frozenset(self.grad.items())))

    def partial(self, name: str) -> Fraction:
        return self.grad.get(name, _F0)

    def _lift(self, other: object) -> Optional["Dual"]:
        if isinstance(other, Dual):
            return other
        if isinstance(other, (int, Fraction)):
            return Dual(other)
        return None

    def __add__(self, other: object):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        grad = dict(self.grad)
        for k, v in o.grad.items():
            acc = grad.get(k, _F0) + v
            if acc:
                grad[k] = acc
            else:
                grad.pop(k, None)
        return Dual(self.val + o.val, grad)

    __radd__ = __add__

    def __neg__(self) -> "Dual":
        return Dual(-self.val, {k: -v for k, v in self.grad.items()})

    def __sub__(self, other: object):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self.__add__(o.__neg__())

    def __rsub__(self, other: object):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o.__sub__(self)

    def __mul__(self, other: object):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        grad: Dict[str, Fraction] = {}
        if o.val:
            for k, v in self.grad.items():
                grad[k] = v * o.val
        if self.val:
            for k, v in o.grad.items():
                acc = grad.get(k, _F0) + v * self.val
                if acc:
                    grad[k] = acc
                else:
                    grad.pop(k, None)
        return Dual(self.val * o.val, grad)

    __rmul__ = __mul__

    def __truediv__(self, other: object):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        if not o.val:
            raise ExactalgError("dual division by a zero-valued scalar")
        val = self.val / o.val
        grad: Dict[str, Fraction] = {}
        for k, v in self.grad.items():
            grad[k] = v / o.val
        if self.val:
            f = self.val / (o.val * o.val)
            for k, v in o.grad.items():
                acc = grad.get(k, _F0) - v * f
                if acc:
                    grad[k] = acc
                else:
                    grad.pop(k, None)
        return Dual(val, grad)

    def __rtruediv__(self, other: object):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o.__truediv__(self)

    def __pow__(self, e: int) -> "Dual":
        if not isinstance(e, int):
            raise ExactalgError("dual powers must be integers")
        if e < 0:
            return Dual(1) / self.__pow__(-e)
        if e == 0:
            return Dual(1)
        val = self.val ** e
        if not self.val:
            # fall back to repeated multiplication, derivative formula needs val != 0
            out = Dual(self.val, self.grad)
            for _ in range(e - 1):
                out = out * self
            return out
        f = e * self.val ** (e - 1)
        return Dual(val, {k: v * f for k, v in self.grad.items()})

    def __repr__(self) -> str:
        return f"Dual({self.val}, {self.grad})"


# ---------------------------------------------------------------------------
# rational points
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RatPoint:
    """Assignment of rational values to the variables of a context."""

    values: Tuple[Tuple[str, Fraction], ...]

    @staticmethod
    def of(mapping: Mapping[str, Scalar]) -> "RatPoint":
        return RatPoint(tuple(sorted((k, Fraction(v)) for k, v in mapping.items())))

    def __getitem__(self, name: str) -> Fraction:
        for k, v in self.values:
            if k == name:
                return v
        raise KeyError(name)

    def env(self) -> Dict[str, Fraction]:
        return dict(self.values)

    def dual_env(self) -> Dict[str, Dual]:
        return {k: Dual.seed(k, v) for k, v in self.values}

    def matrix(self, letter: str, n: int) -> List[List[Fraction]]:
        env = self.env()
        return [[env[f"{letter}{i}{j}"] for j in range(1, n + 1)] for i in range(1, n + 1)]

    def dual_matrix(self, letter: str, n: int) -> List[List[Dual]]:
        env = self.dual_env()
        return [[env[f"{letter}{i}{j}"] for j in range(1, n + 1)] for i in range(1, n + 1)]


def random_point(ctx: Context, rng, lo: int = -9, hi: int = 9) -> RatPoint:
    """Random rational point with small numerators and denominators.

    Zero values are avoided so that monomial evaluations stay informative;
    callers that need nonsingular X or Y should resample on failure.
    """
    vals: Dict[str, Fraction] = {}
    for name in ctx.names:
        num = 0
        while num == 0:
            num = rng.randint(lo, hi)
        vals[name] = Fraction(num, rng.randint(1, 3))
    return RatPoint.of(vals)


# ---------------------------------------------------------------------------
# generic matrix helpers (scalars: Fraction, Dual or Poly)
# ---------------------------------------------------------------------------

Rows = Sequence[Sequence[object]]


def _pivot_value(e: object):
    return getattr(e, "val", e)


def gtranspose(rows: Rows) -> List[List[object]]:
    return [list(col) for col in zip(*rows)]


def gsubmatrix(rows: Rows, rsel: Sequence[int], csel: Sequence[int]) -> List[List[object]]:
    return [[rows[i][j] for j in csel] for i in rsel]


def gminor(rows: Rows, del_rows: Iterable[int], del_cols: Iterable[int]) -> List[List[object]]:
    dr = set(del_rows)
    dc = set(del_cols)
    return [
        [e for j, e in enumerate(row) if j not in dc]
        for i, row in enumerate(rows)
        if i not in dr
    ]


def gmatmul(a: Rows, b: Rows) -> List[List[object]]:
    if a and b and len(a[0]) != len(b):
        raise ExactalgError("matrix product shape mismatch")
    bt = gtranspose(b)
    out = []
    for row in a:
        out_row = []
        for col in bt:
            acc = None
            for u, v in zip(row, col):
                term = u * v
                acc = term if acc is None else acc + term
            out_row.append(_F0 if acc is None else acc)
        out.append(out_row)
    return out


def gmatvec(a: Rows, v: Sequence[object]) -> List[object]:
    return [row[0] for row in gmatmul(a, [[e] for e in v])]


def gscale(rows: Rows, c: object) -> List[List[object]]:
    return [[e * c for e in row] for row in rows]


def gidentity(m: int) -> List[List[Fraction]]:
    return [[_F1 if i == j else _F0 for j in range(m)] for i in range(m)]


def det_bareiss(rows: Rows):
    """Fraction-free Bareiss determinant, generic over the scalar ring.

    Divisions are exact by construction.  Pivots must have a nonzero value
    part; a column whose remaining entries are all zero gives determinant 0,
    while a column with only infinitesimal-style entries (zero value, nonzero
    gradient) raises, so callers can resample their evaluation point.
    """
    m = len(rows)
    if m == 0:
        return _F1
    for row in rows:
        if len(row) != m:
            raise ExactalgError("determinant of a non-square matrix")
    if m == 1:
        return rows[0][0]
    a = [list(row) for row in rows]
    sign = 1
    prev: object = 1
    for k in range(m - 1):
        piv = None
        for r in range(k, m):
            if _pivot_value(a[r][k]):
                piv = r
                break
        if piv is None:
            if any(a[r][k] for r in range(k, m)):
                raise ExactalgError("degenerate pivot: no invertible entry in column")
            return rows[0][0] * 0
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        pk = a[k][k]
        for i in range(k + 1, m):
            aik = a[i][k]
            arow = a[i]
            krow = a[k]
            for j in range(k + 1, m):
                arow[j] = (pk * arow[j] - aik * krow[j]) / prev
            arow[k] = 0
        prev = pk
    d = a[m - 1][m - 1]
    return d if sign > 0 else -d


def det_cofactor(rows: Rows):
    """Cofactor-expansion determinant, expanding along the sparsest line."""
    m = len(rows)
    if m == 0:
        return _F1
    for row in rows:
        if len(row) != m:
            raise ExactalgError("determinant of a non-square matrix")
    return _det_cof([list(r) for r in rows])


def _det_cof(a: List[List[object]]):
    m = len(a)
    if m == 1:
        return a[0][0]
    if m == 2:
        return a[0][0] * a[1][1] - a[0][1] * a[1][0]
    row_zeros = [sum(1 for e in row if not e) for row in a]
    col_zeros = [sum(1 for row in a if not row[j]) for j in range(m)]
    br = max(range(m), key=lambda i: row_zeros[i])
    bc = max(range(m), key=lambda j: col_zeros[j])
    acc = None
    if row_zeros[br] >= col_zeros[bc]:
        i = br
        for j, e in enumerate(a[i]):
            if not e:
                continue
            sub = gminor(a, [i], [j])
            term = e * _det_cof(sub)
            if (i + j) % 2:
                term = -term
            acc = term if acc is None else acc + term
    else:
        j = bc
        for i in range(m):
            e = a[i][j]
            if not e:
                continue
            sub = gminor(a, [i], [j])
            term = e * _det_cof(sub)
            if (i + j) % 2:
                term = -term
            acc = term if acc is None else acc + term
    if acc is None:
        return a[0][0] * 0
    return acc


def gdet(rows: Rows, method: str = "auto"):
    """Determinant with selectable route: auto, bareiss or cofactor."""
    if method == "bareiss":
        return det_bareiss(rows)
    if method == "cofactor":
        return det_cofactor(rows)
    if method != "auto":
        raise ExactalgError(f"unknown determinant method {method!r}")
    m = len(rows)
    if m <= 3:
        return det_cofactor(rows)
    total = m * m
    zeros = sum(1 for row in rows for e in row if not e)
    if zeros * 2 > total:
        return det_cofactor(rows)
    return det_bareiss(rows)


def ginverse(rows: Rows) -> List[List[object]]:
    """Gauss-Jordan inverse for field-like scalars (Fraction, Dual)."""
    m = len(rows)
    a = [list(row) + list(ident_row) for row, ident_row in zip(rows, gidentity(m))]
    for k in range(m):
        piv = None
        for r in range(k, m):
            if _pivot_value(a[r][k]):
                piv = r
                break
        if piv is None:
            raise ExactalgError("matrix is singular (or degenerate at this point)")
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
        pk = a[k][k]
        a[k] = [e / pk for e in a[k]]
        for r in range(m):
            if r == k:
                continue
            f = a[r][k]
            if not f:
                continue
            a[r] = [er - f * ek for er, ek in zip(a[r], a[k])]
    return [row[m:] for row in a]


def gadjugate(rows: Rows) -> List[List[object]]:
    """Adjugate via cofactors; works over any of the supported scalars."""
    m = len(rows)
    if m == 1:
        one = rows[0][0] * 0 + 1
        return [[one]]
    out = [[None] * m for _ in range(m)]
    for i in range(m):
        for j in range(m):
            c = gdet(gminor(rows, [i], [j]))
            if (i + j) % 2:
                c = -c
            out[j][i] = c  # transpose of the cofactor matrix
    return out


def interp_coeffs(values: Sequence[object]) -> List[object]:
    """Coefficients of the degree d polynomial taking the given values at 0..d.

    Solves the Vandermonde system exactly; scalars may be Fractions or Duals.
    Used to split det(X + lam Y) into its lam coefficients at evaluation time.
    """
    d = len(values) - 1
    a = [[Fraction(node ** e) for e in range(d + 1)] for node in range(d + 1)]
    inv = ginverse(a)
    return gmatvec(inv, list(values))


# ---------------------------------------------------------------------------
# polynomial matrices
# ---------------------------------------------------------------------------


class PolyMatrix:
    """Rectangular matrix of Poly entries from a single context."""

    __slots__ = ("ctx", "entries")

    def __init__(self, ctx: Context, entries: Sequence[Sequence[Poly]]):
        rows = []
        width = None
        for row in entries:
            row = tuple(row)
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise ExactalgError("ragged rows in PolyMatrix")
            for e in row:
                if not isinstance(e, Poly) or e.ctx is not ctx:
                    raise ExactalgError("PolyMatrix entries must be Polys of its context")
            rows.append(row)
        self.ctx = ctx
        self.entries: Tuple[Tuple[Poly, ...], ...] = tuple(rows)

    # -- constructors -------------------------------------------------------

    @staticmethod
    def symbols(ctx: Context, letter: str) -> "PolyMatrix":
        """The full n x n matrix of x- or y-variables."""
        if letter not in ("x", "y"):
            raise ExactalgError("symbol matrices exist for letters 'x' and 'y'")
        n = ctx.n
        return PolyMatrix(
            ctx,
            [[ctx.var(f"{letter}{i}{j}") for j in range(1, n + 1)] for i in range(1, n + 1)],
        )

    @staticmethod
    def identity(ctx: Context, m: int) -> "PolyMatrix":
        return PolyMatrix(
            ctx, [[ctx.one if i == j else ctx.zero for j in range(m)] for i in range(m)]
        )

    @staticmethod
    def zeros(ctx: Context, m: int, k: int) -> "PolyMatrix":
        return PolyMatrix(ctx, [[ctx.zero] * k for _ in range(m)])

    # -- queries ------------------------------------------------------------

    @property
    def nrows(self) -> int:
        return len(self.entries)

    @property
    def ncols(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    def entry(self, i: int, j: int) -> Poly:
        return self.entries[i][j]

    def rows(self) -> List[List[Poly]]:
        return [list(row) for row in self.entries]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return self.ctx is other.ctx and self.entries == other.entries

    def __hash__(self) -> int:
        return hash(self.entries)

    # -- algebra ------------------------------------------------------------

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.nrows != other.nrows or self.ncols != other.ncols:
            raise ExactalgError("matrix addition shape mismatch")
        return PolyMatrix(
            self.ctx,
            [
                [a + b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.entries, other.entries)
            ],
        )

    def __sub__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.nrows != other.nrows or self.ncols != other.ncols:
            raise ExactalgError("matrix subtraction shape mismatch")
        return PolyMatrix(
            self.ctx,
            [
                [a - b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.entries, other.entries)
            ],
        )

    def __mul__(self, other: object) -> "PolyMatrix":
        if isinstance(other, PolyMatrix):
            return PolyMatrix(self.ctx, gmatmul(self.entries, other.entries))
        if isinstance(other, (int, Fraction, Poly)):
            return self.map(lambda e: e * other)
        return NotImplemented

    def map(self, fn: Callable[[Poly], Poly]) -> "PolyMatrix":
        return PolyMatrix(self.ctx, [[fn(e) for e in row] for row in self.entries])

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix(self.ctx, gtranspose(self.entries))

    def submatrix(self, rsel: Sequence[int], csel: Sequence[int]) -> "PolyMatrix":
        return PolyMatrix(self.ctx, gsubmatrix(self.entries, rsel, csel))

    def det(self, method: str = "auto") -> Poly:
        d = gdet(self.entries, method)
        if isinstance(d, int):
            return self.ctx.const(d)
        return d

    def eval(self, env: Mapping[str, object]) -> List[List[object]]:
        return [[e.eval(env) for e in row] for row in self.entries]

    # -- rendering ----------------------------------------------------------

    def render(self) -> str:
        """One bracketed row per line, entries space-separated."""
        lines = []
        for row in self.entries:
            lines.append("[" + " ".join(e.canonical_str() for e in row) + "]")
        return "\n".join(lines)

    def __repr__(self) -> str:
        return f"PolyMatrix({self.nrows}x{self.ncols})"


# ---------------------------------------------------------------------------
# derivatives with a built-in cross-check
# ---------------------------------------------------------------------------


def partials(p: Poly, at: RatPoint) -> Dict[str, Fraction]:
    """All partial derivatives of p at a rational point.

    Computed twice, by forward-mode dual evaluation and by evaluating the
    symbolic derivatives; any disagreement raises.  The returned map covers
    every variable of the context (zeros included).
    """
    env = at.env()
    forward = p.eval(at.dual_env())
    fw_grad: Dict[str, Fraction] = forward.grad if isinstance(forward, Dual) else {}
    out: Dict[str, Fraction] = {}
    for name in p.ctx.names:
        sym = p.partial(name).eval(env)
        if fw_grad.get(name, _F0) != sym:
            raise ExactalgError(
                f"forward and symbolic derivatives disagree for {name}: "
                f"{fw_grad.get(name, _F0)} vs {sym}"
            )
        out[name] = sym
    return out


# ---------------------------------------------------------------------------
# Desnanot-Jacobi identities
# ---------------------------------------------------------------------------


def _as_rows(a: Union[PolyMatrix, Rows]) -> List[List[object]]:
    if isinstance(a, PolyMatrix):
        return a.rows()
    return [list(r) for r in a]


def dj_check(
    a: Union[PolyMatrix, Rows],
    kind: str,
    cols: Optional[Sequence[int]] = None,
    rows: Optional[Sequence[int]] = None,
    method: str = "auto",
) -> bool:
    """Verify a Desnanot-Jacobi identity on explicit data.

    kind "long": a has shape m x (m+1); for columns i < j < k and a row r
    (all 1-based) the identity reads

        det A^i * det A^jk_r + det A^k * det A^ij_r = det A^j * det A^ik_r,

    superscripts deleting columns and the subscript deleting a row.

    kind "short": a is square m x m; for columns i < j and rows k < l,

        det A * det A^ij_kl = det A^i_k * det A^j_l - det A^i_l * det A^j_k.

    With cols/rows omitted, every admissible index choice is checked.
    Returns True when each checked instance holds exactly.
    """
    data = _as_rows(a)
    m = len(data)
    if m == 0:
        raise ExactalgError("dj_check needs a nonempty matrix")
    width = len(data[0])
    if kind == "long":
        if width != m + 1:
            raise ExactalgError(f"long identity needs shape m x (m+1), got {m} x {width}")
        col_triples: Iterable[Tuple[int, int, int]]
        if cols is not None:
            i, j, k = cols
            if not 1 <= i < j < k <= width:
                raise ExactalgError("long identity needs columns i < j < k")
            col_triples = [(i, j, k)]
        else:
            col_triples = [
                (i, j, k)
                for i in range(1, width + 1)
                for j in range(i + 1, width + 1)
                for k in range(j + 1, width + 1)
            ]
        row_list = list(rows) if rows is not None else list(range(1, m + 1))
        for i, j, k in col_triples:
            for r in row_list:
                lhs = gdet(gminor(data, [], [i - 1]), method) * gdet(
                    gminor(data, [r - 1], [j - 1, k - 1]), method
                ) + gdet(gminor(data, [], [k - 1]), method) * gdet(
                    gminor(data, [r - 1], [i - 1, j - 1]), method
                )
                rhs = gdet(gminor(data, [], [j - 1]), method) * gdet(
                    gminor(data, [r - 1], [i - 1, k - 1]), method
                )
                if not _same(lhs, rhs):
                    return False
        return True
    if kind == "short":
        if width != m:
            raise ExactalgError(f"short identity needs a square matrix, got {m} x {width}")
        if m < 2:
            raise ExactalgError("short identity needs size at least 2")
        col_pairs: Iterable[Tuple[int, int]]
        if cols is not None:
            i, j = cols
            if not 1 <= i < j <= m:
                raise ExactalgError("short identity needs columns i < j")
            col_pairs = [(i, j)]
        else:
            col_pairs = [(i, j) for i in range(1, m + 1) for j in range(i + 1, m + 1)]
        if rows is not None:
            k, l = rows
            if not 1 <= k < l <= m:
                raise ExactalgError("short identity needs rows k < l")
            row_pairs = [(k, l)]
        else:
            row_pairs = [(k, l) for k in range(1, m + 1) for l in range(k + 1, m + 1)]
        for i, j in col_pairs:
            for k, l in row_pairs:
                lhs = gdet(data, method) * gdet(
                    gminor(data, [k - 1, l - 1], [i - 1, j - 1]), method
                )
                rhs = gdet(gminor(data, [k - 1], [i - 1]), method) * gdet(
                    gminor(data, [l - 1], [j - 1]), method
                ) - gdet(gminor(data, [l - 1], [i - 1]), method) * gdet(
                    gminor(data, [k - 1], [j - 1]), method
                )
                if not _same(lhs, rhs):
                    return False
        return True
    raise ExactalgError(f"unknown identity kind {kind!r}")


def _same(a: object, b: object) -> bool:
    if isinstance(a, Poly) or isinstance(b, Poly):
        return a == b
    diff = a - b
    return not diff
