"""Generalized cluster mutation.

One mutation replaces the function at a mutable vertex k through the
exchange relation

    x_k x_k' = sum_{r=0}^{d_k} p_{kr} u_{k;>}^r v_{k;>}^[r]
                                u_{k;<}^{d_k-r} v_{k;<}^[d_k-r],

where the cluster tau-monomials u collect the mutable columns of row k
with exponents b_kj / d_k and the stable tau-monomials v collect the
frozen columns with floored exponents floor(r b_kj / d_k).  The division
by x_k is carried out exactly in the polynomial ring; a remainder means
the seed data is wrong and raises.  The exchange matrix follows the
usual rule with row and column k negated, the string at k is reversed,
and everything else is untouched.  For a trivial string the relation
degenerates to the ordinary two-term exchange.

Mutated functions keep their vertex name with a prime appended (a second
mutation strips it again), so a double mutation reproduces the original
seed on the nose.
"""

import json
import time
from dataclasses import dataclass
from typing import Any, Dict, IO, List, Optional, Tuple

from .exactalg import Context, ExactalgError, Poly, context
from .seed import ClusterFunction, Seed

__all__ = [
    "MutationError",
    "MutationStep",
    "exchange_exponents",
    "exchange_numerator",
    "mutate",
    "mutate_with_step",
    "mutate_sequence",
    "p_hat",
    "seeds_equal",
    "toggle_prime",
    "y_coordinate",
]


class MutationError(Exception):
    pass


@dataclass(frozen=True)
class MutationStep:
    """Record of one exchange: new * old = numerator, exactly."""

    direction: str
    old_name: str
    new_name: str
    numerator: Poly

    def verify(self, old: Poly, new: Poly) -> bool:
        return new * old == self.numerator


def toggle_prime(name: str) -> str:
    return name[:-1] if name.endswith("'") else name + "'"


def _require_mutable(seed: Seed, k: str) -> None:
    role = seed.role(k)
    if role != "mutable":
        raise MutationError(f"cannot mutate at {k}: vertex is {role}")


def exchange_exponents(seed: Seed, k: str) -> List[Dict[str, int]]:
    """Exponent tables of the d_k + 1 exchange terms at k.

    Term r combines the tau-monomial exponents of row k with the string
    coefficient p_kr; every exponent is a nonnegative integer (floors are
    exact integer arithmetic, and the mutable entries divide by d_k by
    the gcd property).
    """
    _require_mutable(seed, k)
    d = seed.d(k)
    row = seed.ext_row(k)
    string = seed.string(k)
    mutable = set(seed.mutable_names)
    out: List[Dict[str, int]] = []
    for r in range(d + 1):
        expo: Dict[str, int] = {}
        for j, b in sorted(row.items()):
            if b == 0:
                continue
            if j in mutable and b % d != 0:
                raise MutationError(
                    f"entry b({k}, {j}) = {b} is not divisible by d = {d}"
                )
            e = (r * b) // d if b > 0 else ((d - r) * -b) // d
            if e:
                expo[j] = expo.get(j, 0) + e
        for j, e in string[r].items():
            expo[j] = expo.get(j, 0) + e
        out.append(expo)
    return out


def exchange_numerator(seed: Seed, k: str, ctx: Optional[Context] = None) -> Poly:
    """The right-hand side of the exchange relation at k, as a polynomial."""
    ctx = ctx or context(seed.n)
    powers: Dict[Tuple[str, int], Poly] = {}

    def power(j: str, e: int) -> Poly:
        got = powers.get((j, e))
        if got is None:
            got = seed.poly(j, ctx) ** e
            powers[(j, e)] = got
        return got

    total = ctx.const(0)
    for expo in exchange_exponents(seed, k):
        term = ctx.const(1)
        for j, e in sorted(expo.items(), key=lambda it: -it[1]):
            term = term * power(j, e)
        total = total + term
    return total


def _mutate_row(seed: Seed, k: str) -> Dict[str, Dict[str, int]]:
    new_name = toggle_prime(k)
    ext: Dict[str, Dict[str, int]] = {}
    row_k = seed.ext_row(k)
    for i in seed.mutable_names:
        row = seed.ext_row(i)
        if i == k:
            new_row = {j: -b for j, b in row.items() if b}
        else:
            b_ik = row.get(k, 0)
            new_row = {}
            for j in set(row) | set(row_k):
                b_ij = row.get(j, 0)
                if j == k:
                    b_new = -b_ij
                else:
                    b_kj = row_k.get(j, 0)
                    b_new = b_ij + (abs(b_ik) * b_kj + b_ik * abs(b_kj)) // 2
                if b_new:
                    new_row[j] = b_new
        ext[new_name if i == k else i] = {
            (new_name if j == k else j): b for j, b in new_row.items()
        }
    return ext


def mutate_with_step(seed: Seed, k: str,
                     trace: Optional[IO[str]] = None) -> Tuple[Seed, MutationStep]:
    """Mutate at k; return the adjacent seed and the exchange record."""
    t0 = time.perf_counter()
    _require_mutable(seed, k)
    ctx = context(seed.n)
    old_fn = seed.func(k)
    old_poly = seed.poly(k, ctx)
    numerator = exchange_numerator(seed, k, ctx)
    try:
        new_poly = numerator.exact_div(old_poly)
    except ExactalgError as exc:
        raise MutationError(
            f"exchange at {k} is not divisible by the old function: {exc}"
        ) from exc
    new_name = toggle_prime(k)

    def recipe(env, _p: Poly = new_poly):
        return _p.eval(env)

    new_fn = ClusterFunction(new_name, old_fn.kind, old_fn.index, "mutable",
                             recipe, note=f"exchange at {k}")
    new_fn._polys[seed.n] = new_poly
    functions = tuple(new_fn if fn.name == k else fn for fn in seed.functions)

    strings = {key: val for key, val in seed.strings.items() if key != k}
    ds = {key: val for key, val in seed.ds.items() if key != k}
    if k in seed.ds:
        ds[new_name] = seed.ds[k]
        strings[new_name] = tuple(reversed(seed.strings[k]))

    mutated = seed.replaced(
        functions=functions,
        ext=_mutate_row(seed, k),
        strings=strings,
        ds=ds,
        history=seed.history + (k,),
    )
    step = MutationStep(k, k, new_name, numerator)
    if trace is not None:
        trace.write(json.dumps({
            "step": len(mutated.history),
            "direction": k,
            "new": new_name,
            "numerator_terms": numerator.nterms(),
            "result_terms": new_poly.nterms(),
            "ms": round(1000 * (time.perf_counter() - t0), 3),
        }) + "\n")
    return mutated, step


def mutate(seed: Seed, k: str, trace: Optional[IO[str]] = None) -> Seed:
    """The adjacent seed in direction k (exact, history appended)."""
    return mutate_with_step(seed, k, trace)[0]


def mutate_sequence(seed: Seed, directions: Any,
                    trace: Optional[IO[str]] = None) -> Seed:
    for k in directions:
        seed = mutate(seed, k, trace)
    return seed


def y_coordinate(seed: Seed, k: str) -> Tuple[Poly, Poly]:
    """The y-coordinate of row k, split into numerator and denominator.

    y_k = prod_j x_j^{b_kj} over every column; the split follows the sign
    of b_kj.  A zero row gives 1/1.
    """
    _require_mutable(seed, k)
    ctx = context(seed.n)
    num = ctx.const(1)
    den = ctx.const(1)
    for j, b in sorted(seed.ext_row(k).items()):
        if b > 0:
            num = num * seed.poly(j, ctx) ** b
        elif b < 0:
            den = den * seed.poly(j, ctx) ** (-b)
    return num, den


def p_hat(seed: Seed, i: str, r: int) -> Dict[str, int]:
    """The Casimir monomial p-hat_{ir} as a Laurent exponent table.

    p-hat_{ir} = p_{ir}^{d_i} / q_{ir} with q the floor defect of the
    stable tau-monomials; the result involves stable names only.
    """
    _require_mutable(seed, i)
    d = seed.d(i)
    if d < 2:
        raise MutationError(f"{i} carries a trivial string")
    if not 0 <= r <= d:
        raise MutationError(f"r = {r} outside 0..{d}")
    from .poisson import phat_exponent_vectors

    return phat_exponent_vectors(seed, i)[r]


def seeds_equal(a: Seed, b: Seed, symbolic: bool = True) -> bool:
    """Equality of the full seed datum, ignoring history.

    Compares names, roles, multiplicities, strings, exchange rows and
    (when symbolic is set) the functions themselves in the polynomial
    ring.
    """
    if a.names != b.names:
        return False
    for nm in a.names:
        if a.role(nm) != b.role(nm):
            return False
    if a.ds != b.ds or a.strings != b.strings:
        return False
    ga = {k: {j: v for j, v in row.items() if v} for k, row in (a.ext or {}).items()}
    gb = {k: {j: v for j, v in row.items() if v} for k, row in (b.ext or {}).items()}
    if (a.ext is None) != (b.ext is None) or ga != gb:
        return False
    if symbolic:
        ctx = context(a.n)
        for nm in a.names:
            fa, fb = a.func(nm), b.func(nm)
            if fa is fb:
                continue
            if fa.poly(ctx) != fb.poly(ctx):
                return False
    return True
