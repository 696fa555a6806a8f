"""Tests for the exact polynomial layer.

These pin the behaviour everything else is built on: packed-monomial
ordering, canonical rendering, exact division, the two determinant routes,
forward/symbolic derivatives and the Desnanot-Jacobi identities.
"""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from gcdouble.exactalg import (
    Dual,
    ExactalgError,
    Poly,
    PolyMatrix,
    RatPoint,
    context,
    det_bareiss,
    det_cofactor,
    dj_check,
    gadjugate,
    gdet,
    gidentity,
    ginverse,
    gmatmul,
    interp_coeffs,
    partials,
    random_point,
)

ctx2 = context(2)
ctx3 = context(3)

F = Fraction


def poly_strategy(ctx, max_terms=5, max_exp=3):
    exps = st.tuples(*[st.integers(0, max_exp) for _ in range(ctx.nvars)])
    coef = st.fractions(
        min_value=-9, max_value=9, max_denominator=5
    )
    return st.dictionaries(exps, coef, max_size=max_terms).map(ctx.poly)


def frac_matrix(rng, m, k, lo=-9, hi=9):
    return [[F(rng.randint(lo, hi), rng.randint(1, 3)) for _ in range(k)] for _ in range(m)]


# ---------------------------------------------------------------------------
# packing and ordering
# ---------------------------------------------------------------------------


def test_pack_unpack_roundtrip():
    exps = tuple([2, 0, 1, 0, 0, 3, 0, 1, 0])
    assert len(exps) == ctx2.nvars
    key = ctx2.pack(exps)
    assert ctx2.unpack(key) == exps
    assert ctx2.degree_of(key) == 7


def test_graded_lex_order_degree_first():
    # degree dominates: x11^3 > x11*x22
    a = (ctx2.x(1, 1) ** 3).leading_key()
    b = (ctx2.x(1, 1) * ctx2.x(2, 2)).leading_key()
    assert a > b


def test_graded_lex_order_ties_broken_by_earlier_variable():
    # same degree: x11*x22 > x12*x21 because x11 comes first
    a = (ctx2.x(1, 1) * ctx2.x(2, 2)).leading_key()
    b = (ctx2.x(1, 2) * ctx2.x(2, 1)).leading_key()
    assert a > b
    # and y-variables sort below all x-variables of equal degree
    c = (ctx2.y(1, 1) ** 2).leading_key()
    assert b > c


def test_pack_rejects_oversized_exponents():
    with pytest.raises(ExactalgError):
        ctx2.pack(tuple([1 << 16] + [0] * (ctx2.nvars - 1)))


def test_context_is_cached():
    assert context(3) is ctx3
    assert context(2) is not ctx3


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------


def test_canonical_str_two_by_two_determinant():
    p = ctx2.x(1, 1) * ctx2.x(2, 2) - ctx2.x(1, 2) * ctx2.x(2, 1)
    assert p.canonical_str() == "x11*x22 - x12*x21"


def test_canonical_str_coefficients_and_powers():
    p = ctx2.x(1, 1) ** 2 * 3 - ctx2.y(1, 2) * F(1, 2) + 5
    assert p.canonical_str() == "3*x11^2 - 1/2*y12 + 5"
    assert (-ctx2.x(1, 1)).canonical_str() == "-x11"
    assert ctx2.zero.canonical_str() == "0"


def test_render_matrix_format():
    m = PolyMatrix(ctx2, [[ctx2.x(1, 1), ctx2.zero], [ctx2.one * 2, ctx2.y(2, 2)]])
    assert m.render() == "[x11 0]\n[2 y22]"


# ---------------------------------------------------------------------------
# ring arithmetic
# ---------------------------------------------------------------------------


@settings(max_examples=50, deadline=None)
@given(poly_strategy(ctx2), poly_strategy(ctx2), poly_strategy(ctx2))
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == ctx2.zero
    assert a + ctx2.zero == a
    assert a * ctx2.one == a


@settings(max_examples=50, deadline=None)
@given(poly_strategy(ctx2), poly_strategy(ctx2))
def test_exact_div_recovers_factor(a, b):
    if not b:
        return
    assert (a * b) / b == a


def test_exact_div_difference_of_squares():
    x, y = ctx2.x(1, 1), ctx2.y(1, 1)
    assert (x * x - y * y) / (x - y) == x + y


def test_exact_div_remainder_raises():
    x = ctx2.x(1, 1)
    with pytest.raises(ExactalgError):
        (x * x + 1) / x


def test_exact_div_by_zero_raises():
    with pytest.raises(ExactalgError):
        ctx2.one / ctx2.zero


def test_context_mixing_raises():
    with pytest.raises(ExactalgError):
        ctx2.x(1, 1) + ctx3.x(1, 1)


def test_pow_matches_repeated_multiplication():
    p = ctx2.x(1, 1) + ctx2.y(2, 1) - 1
    assert p ** 4 == p * p * p * p
    assert p ** 0 == ctx2.one


# ---------------------------------------------------------------------------
# evaluation and derivatives
# ---------------------------------------------------------------------------


def test_eval_rational():
    p = ctx2.x(1, 1) ** 2 * ctx2.y(2, 2) - 3
    env = {name: F(0) for name in ctx2.names}
    env["x11"] = F(2)
    env["y22"] = F(1, 4)
    assert p.eval(env) == F(2) ** 2 * F(1, 4) - 3


def test_eval_composition_with_polys():
    # substituting polynomials for variables works because eval is generic
    p = ctx2.x(1, 1) * ctx2.x(2, 2)
    env = {name: ctx2.zero for name in ctx2.names}
    env["x11"] = ctx2.y(1, 1) + 1
    env["x22"] = ctx2.y(1, 1) - 1
    assert p.eval(env) == ctx2.y(1, 1) ** 2 - 1


def test_partial_symbolic():
    x, y = ctx2.x(1, 1), ctx2.y(2, 1)
    p = x ** 3 * y
    assert p.partial("x11") == 3 * x ** 2 * y
    assert p.partial("y21") == x ** 3
    assert p.partial("y11") == ctx2.zero


def test_partials_cross_checked_routes():
    rng = random.Random(7)
    pt = random_point(ctx2, rng)
    x, y, lam = ctx2.x(1, 2), ctx2.y(2, 2), ctx2.lam
    p = x ** 2 * y - lam * x * 5 + 3
    grads = partials(p, pt)
    env = pt.env()
    assert grads["x12"] == 2 * env["x12"] * env["y22"] - 5 * env["lam"]
    assert grads["y22"] == env["x12"] ** 2
    assert grads["lam"] == -5 * env["x12"]
    assert grads["x21"] == 0


@settings(max_examples=30, deadline=None)
@given(poly_strategy(ctx2, max_terms=4, max_exp=2))
def test_partials_routes_agree_on_random_polys(p):
    rng = random.Random(11)
    pt = random_point(ctx2, rng)
    partials(p, pt)  # raises on any disagreement


def test_dual_division_and_power():
    a = Dual.seed("x11", F(3))
    b = Dual.seed("y11", F(2))
    q = (a * a + 1) / b
    assert q.val == F(10, 2)
    assert q.partial("x11") == F(2 * 3, 2)
    assert q.partial("y11") == F(-10, 4)
    c = a ** 3
    assert c.val == 27 and c.partial("x11") == 27
    inv = Dual(1) / a
    assert inv.val == F(1, 3) and inv.partial("x11") == F(-1, 9)


def test_subs_lam_and_lam_coefficients():
    x = ctx2.x(1, 1)
    lam = ctx2.lam
    p = x * lam ** 2 - lam * 2 + x
    assert p.subs_lam(3) == x * 9 - 6 + x
    coeffs = p.lam_coefficients()
    assert coeffs == [x, ctx2.const(-2), x]


# ---------------------------------------------------------------------------
# determinants
# ---------------------------------------------------------------------------


def test_det_identity_and_small_numeric():
    assert gdet(gidentity(3)) == 1
    assert gdet([[F(1), F(2)], [F(3), F(4)]]) == -2
    m = PolyMatrix(ctx2, [[ctx2.const(1), ctx2.const(2)], [ctx2.const(3), ctx2.const(4)]])
    assert m.det() == ctx2.const(-2)


def test_det_char_poly_two_by_two():
    # det(X + lam I) for n=2
    x = PolyMatrix.symbols(ctx2, "x")
    lam = ctx2.lam
    m = PolyMatrix(
        ctx2,
        [
            [x.entry(0, 0) + lam, x.entry(0, 1)],
            [x.entry(1, 0), x.entry(1, 1) + lam],
        ],
    )
    expected = (
        lam ** 2
        + lam * (ctx2.x(1, 1) + ctx2.x(2, 2))
        + ctx2.x(1, 1) * ctx2.x(2, 2)
        - ctx2.x(1, 2) * ctx2.x(2, 1)
    )
    assert m.det() == expected


def test_det_routes_agree_symbolic():
    x = PolyMatrix.symbols(ctx3, "x")
    assert x.det(method="bareiss") == x.det(method="cofactor")
    y = PolyMatrix.symbols(ctx3, "y")
    mixed = x * y
    assert mixed.det(method="bareiss") == mixed.det(method="cofactor")


def test_det_routes_agree_numeric():
    rng = random.Random(5)
    for m in range(1, 6):
        for _ in range(10):
            a = frac_matrix(rng, m, m)
            assert det_bareiss(a) == det_cofactor(a)


def test_det_multiplicative_numeric():
    rng = random.Random(9)
    for _ in range(20):
        a = frac_matrix(rng, 3, 3)
        b = frac_matrix(rng, 3, 3)
        assert gdet(gmatmul(a, b)) == gdet(a) * gdet(b)


def test_det_multiplicative_symbolic():
    x = PolyMatrix.symbols(ctx2, "x")
    y = PolyMatrix.symbols(ctx2, "y")
    assert (x * y).det() == x.det() * y.det()


def test_det_singular_counts_as_zero():
    a = [[F(1), F(2)], [F(2), F(4)]]
    assert gdet(a) == 0


def test_det_non_square_raises():
    with pytest.raises(ExactalgError):
        det_bareiss([[F(1), F(2), F(3)], [F(4), F(5), F(6)]])


def test_det_dual_matches_cofactor_gradient():
    rng = random.Random(21)
    pt = random_point(ctx3, rng)
    xm = pt.dual_matrix("x", 3)
    d = det_bareiss(xm)
    env = pt.env()
    sym = PolyMatrix.symbols(ctx3, "x").det()
    assert d.val == sym.eval(env)
    for name in ("x11", "x23", "x32"):
        assert d.partial(name) == sym.partial(name).eval(env)


def test_adjugate_identity_symbolic():
    x = PolyMatrix.symbols(ctx3, "x")
    adj = gadjugate(x.entries)
    prod = gmatmul(x.entries, adj)
    d = x.det()
    for i in range(3):
        for j in range(3):
            assert prod[i][j] == (d if i == j else ctx3.zero)


def test_ginverse_numeric():
    rng = random.Random(3)
    a = frac_matrix(rng, 4, 4)
    while gdet(a) == 0:
        a = frac_matrix(rng, 4, 4)
    prod = gmatmul(a, ginverse(a))
    assert prod == gidentity(4)


def test_interp_coeffs_recovers_cubic():
    coeffs = [F(2), F(-1, 2), F(0), F(5)]
    values = [sum(c * node ** e for e, c in enumerate(coeffs)) for node in range(4)]
    assert interp_coeffs(values) == coeffs


def test_interp_coeffs_with_duals():
    a = Dual.seed("x11", F(2))
    values = [(a * node + 1) * (a * node + 1) for node in range(3)]
    got = interp_coeffs(values)
    # (1 + a lam)^2 = 1 + 2a lam + a^2 lam^2
    assert got[0].val == 1 and got[1].val == 4 and got[2].val == 4
    assert got[1].partial("x11") == 2 and got[2].partial("x11") == 4


# ---------------------------------------------------------------------------
# Desnanot-Jacobi identities
# ---------------------------------------------------------------------------


def test_dj_long_random_all_shapes():
    rng = random.Random(2024)
    for m in range(2, 7):
        for _ in range(40):
            a = frac_matrix(rng, m, m + 1)
            i = rng.randint(1, m - 1)
            j = rng.randint(i + 1, m)
            k = rng.randint(j + 1, m + 1)
            r = rng.randint(1, m)
            assert dj_check(a, "long", cols=(i, j, k), rows=(r,))


def test_dj_short_random_all_shapes():
    rng = random.Random(2025)
    for m in range(2, 7):
        for _ in range(40):
            a = frac_matrix(rng, m, m)
            i = rng.randint(1, m - 1)
            j = rng.randint(i + 1, m)
            k = rng.randint(1, m - 1)
            l = rng.randint(k + 1, m)
            assert dj_check(a, "short", cols=(i, j), rows=(k, l))


def test_dj_symbolic_full_index_sweep():
    x4 = context(4)
    rows3x3 = [[x4.x(i, j) for j in range(1, 4)] for i in range(1, 4)]
    assert dj_check(rows3x3, "short")
    rows3x4 = [[x4.x(i, j) for j in range(1, 5)] for i in range(1, 4)]
    assert dj_check(rows3x4, "long")


def test_dj_shape_validation():
    with pytest.raises(ExactalgError):
        dj_check([[F(1), F(2)], [F(3), F(4)]], "long")
    with pytest.raises(ExactalgError):
        dj_check([[F(1), F(2), F(3)], [F(4), F(5), F(6)]], "short")
    with pytest.raises(ExactalgError):
        dj_check([[F(1), F(2)], [F(3), F(4)]], "diagonal")


# ---------------------------------------------------------------------------
# points
# ---------------------------------------------------------------------------


def test_random_point_deterministic_and_nonzero():
    a = random_point(ctx2, random.Random(42))
    b = random_point(ctx2, random.Random(42))
    assert a == b
    assert all(v != 0 for _, v in a.values)


def test_rat_point_matrix_views():
    pt = RatPoint.of({name: F(i + 1) for i, name in enumerate(ctx2.names)})
    xm = pt.matrix("x", 2)
    assert xm[0][0] == pt["x11"] and xm[1][1] == pt["x22"]
    dm = pt.dual_matrix("y", 2)
    assert dm[0][1].val == pt["y12"]
    assert dm[0][1].partial("y12") == 1
