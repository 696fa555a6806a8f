import functools
import io
import json
import math

import pytest
from hypothesis import given, settings, strategies as st

from gcdouble.bd import BDPair
from gcdouble.exactalg import context, det_bareiss, gsubmatrix
from gcdouble.mutation import (
    MutationError,
    exchange_exponents,
    exchange_numerator,
    mutate,
    mutate_sequence,
    mutate_with_step,
    p_hat,
    seeds_equal,
    toggle_prime,
    y_coordinate,
)
from gcdouble.seed import ClusterFunction, Seed, build_initial_seed


@functools.lru_cache(maxsize=None)
def initial(tag):
    pair = {
        "std2": BDPair.standard(2),
        "std3": BDPair.standard(3),
        "std4": BDPair.standard(4),
        "cg3": BDPair.cremmer_gervais(3),
    }[tag]
    return build_initial_seed(pair)


def ymatrix(ctx, n):
    return [[ctx.y(i, j) for j in range(1, n + 1)] for i in range(1, n + 1)]


# ---------------------------------------------------------------------------
# naming
# ---------------------------------------------------------------------------


def test_toggle_prime():
    assert toggle_prime("h_2_4") == "h_2_4'"
    assert toggle_prime("h_2_4'") == "h_2_4"


# ---------------------------------------------------------------------------
# the exchange relation
# ---------------------------------------------------------------------------


def test_h24_closed_form():
    # mutating h_24 in the standard n=4 seed gives det Y^{[3,4]}_{{1,3}}
    seed = initial("std4")
    ctx = context(4)
    m, step = mutate_with_step(seed, "h_2_4")
    got = m.poly("h_2_4'", ctx)
    want = det_bareiss(gsubmatrix(ymatrix(ctx, 4), [0, 2], [2, 3]))
    assert got == want
    assert step.direction == "h_2_4"
    assert step.new_name == "h_2_4'"
    assert step.verify(seed.poly("h_2_4", ctx), got)


def test_ordinary_exchange_is_two_terms():
    # trivial string: numerator = product over b>0 plus product over b<0
    seed = initial("std3")
    ctx = context(3)
    for k in ("h_2_2", "g_3_3", "f_1_1"):
        row = seed.ext_row(k)
        pos = ctx.const(1)
        neg = ctx.const(1)
        for j, b in row.items():
            if b > 0:
                pos = pos * seed.poly(j, ctx) ** b
            elif b < 0:
                neg = neg * seed.poly(j, ctx) ** (-b)
        assert exchange_numerator(seed, k) == pos + neg


def test_string_vertex_relation_n3():
    # phi11 phi11' = sum_r c_r phi21^r phi12^(3-r) with c_0, c_3 the dets
    seed = initial("std3")
    ctx = context(3)
    m, step = mutate_with_step(seed, "phi_1_1")
    cs = [seed.poly("g_1_1", ctx), seed.poly("c_1", ctx),
          seed.poly("c_2", ctx), seed.poly("h_1_1", ctx)]
    want = ctx.const(0)
    for r in range(4):
        want = want + cs[r] * seed.poly("phi_2_1", ctx) ** r \
            * seed.poly("phi_1_2", ctx) ** (3 - r)
    assert step.numerator == want
    assert m.poly("phi_1_1'", ctx) * seed.poly("phi_1_1", ctx) == want


def test_string_vertex_exponent_tables():
    seed = initial("std3")
    assert exchange_exponents(seed, "phi_1_1") == [
        {"phi_1_2": 3, "g_1_1": 1},
        {"phi_2_1": 1, "phi_1_2": 2, "c_1": 1},
        {"phi_2_1": 2, "phi_1_2": 1, "c_2": 1},
        {"phi_2_1": 3, "h_1_1": 1},
    ]


def test_mutated_function_evaluates():
    seed = initial("std3")
    m = mutate(seed, "h_2_2")
    env = {f"{a}{i}{j}": (i * 3 + j + (a == "y") * 7) for a in "xy"
           for i in range(1, 4) for j in range(1, 4)}
    env = {k: __import__("fractions").Fraction(v) for k, v in env.items()}
    lhs = m.evaluate("h_2_2'", env) * seed.evaluate("h_2_2", env)
    rhs = exchange_numerator(seed, "h_2_2").eval(env)
    assert lhs == rhs


# ---------------------------------------------------------------------------
# involution
# ---------------------------------------------------------------------------


def test_involution_every_mutable_vertex_n3():
    seed = initial("std3")
    for k in seed.mutable_names:
        twice = mutate(mutate(seed, k), toggle_prime(k))
        assert seeds_equal(seed, twice), k
        assert twice.history == (k, toggle_prime(k))


def test_involution_cg3_string_vertex():
    seed = initial("cg3")
    assert seeds_equal(seed, mutate(mutate(seed, "phi_1_1"), "phi_1_1'"))


# ---------------------------------------------------------------------------
# matrix, string and quiver updates
# ---------------------------------------------------------------------------


def row_gcd(seed, k):
    mut = set(seed.mutable_names)
    vals = [abs(b) for j, b in seed.ext_row(k).items() if j in mut and b]
    return math.gcd(*vals) if vals else 0


def test_matrix_rule_row_and_column_negated():
    seed = initial("std3")
    m = mutate(seed, "h_2_2")
    for j, b in seed.ext_row("h_2_2").items():
        assert m.b("h_2_2'", j) == -b
    for i in seed.mutable_names:
        if i == "h_2_2":
            continue
        assert m.b(i, "h_2_2'") == -seed.b(i, "h_2_2")


def test_matrix_rule_path_update():
    # b'_ij picks up |b_ik| b_kj when both arrows run through k
    seed = initial("std3")
    k = "h_2_2"
    m = mutate(seed, k)
    for i in seed.mutable_names:
        if i == k:
            continue
        b_ik = seed.b(i, k)
        for j in seed.names:
            if j == k:
                continue
            b_kj = seed.b(k, j)
            want = seed.b(i, j) + (abs(b_ik) * b_kj + b_ik * abs(b_kj)) // 2
            assert m.b(i, j) == want, (i, j)


def test_gcd_preserved_and_string_reversed():
    seed = initial("std3")
    # mutating a neighbor of the string vertex keeps gcd of its row at 3
    assert row_gcd(seed, "phi_1_1") == 3
    m = mutate(seed, "phi_1_2")
    assert row_gcd(m, "phi_1_1") == 3
    assert m.d("phi_1_1") == 3
    # mutating the string vertex itself reverses the string
    m2 = mutate(seed, "phi_1_1")
    assert m2.string("phi_1_1'") == ({}, {"c_2": 1}, {"c_1": 1}, {})
    assert m2.d("phi_1_1'") == 3
    back = mutate(m2, "phi_1_1'")
    assert back.string("phi_1_1") == seed.string("phi_1_1")


def test_isolated_columns_stay_zero():
    seed = initial("std3")
    m = mutate_sequence(seed, ["h_2_2", "g_2_2", "phi_1_1"])
    for k in m.mutable_names:
        for c in m.isolated_names:
            assert m.b(k, c) == 0


def test_quiver_view_follows_matrix():
    seed = initial("std3")
    m = mutate(seed, "h_3_3")
    arrows = {(a, b): w for a, b, w in m.arrows()}
    for j, b in m.ext_row("h_3_3'").items():
        if b > 0:
            assert arrows[("h_3_3'", j)] == b
        elif b < 0:
            assert arrows[(j, "h_3_3'")] == -b


# ---------------------------------------------------------------------------
# y-coordinates
# ---------------------------------------------------------------------------


def test_y_h22_printed_form():
    # y(h_ii) = h_{i-1,i} f_{1,n-i} / (h_{i,i+1} f_{1,n-i+1}) at i=2, n=3
    seed = initial("std3")
    ctx = context(3)
    num, den = y_coordinate(seed, "h_2_2")
    assert num == seed.poly("h_1_2", ctx) * seed.poly("f_1_1", ctx)
    assert den == seed.poly("h_2_3", ctx) * seed.poly("phi_1_2", ctx)


def test_y_g33_printed_form():
    # y(g_ii), six factors, at i=3, n=4
    seed = initial("std4")
    ctx = context(4)
    num, den = y_coordinate(seed, "g_3_3")
    want_n = seed.poly("g_4_4", ctx) * seed.poly("f_2_1", ctx) * seed.poly("g_3_2", ctx)
    want_d = seed.poly("g_2_2", ctx) * seed.poly("f_1_1", ctx) * seed.poly("g_4_3", ctx)
    assert num == want_n and den == want_d


def test_y_zero_row_is_one():
    fns = [
        ClusterFunction("a", "g", (1, 1), "mutable", lambda env: env["x11"]),
        ClusterFunction("b", "g", (2, 1), "frozen", lambda env: env["y11"]),
    ]
    seed = Seed(BDPair.standard(2), fns, ext={"a": {}})
    num, den = y_coordinate(seed, "a")
    assert num == context(2).const(1)
    assert den == context(2).const(1)


# ---------------------------------------------------------------------------
# p-hat
# ---------------------------------------------------------------------------


def test_p_hat_values():
    assert p_hat(initial("std3"), "phi_1_1", 1) == {"c_1": 3, "g_1_1": -2, "h_1_1": -1}
    assert p_hat(initial("std3"), "phi_1_1", 2) == {"c_2": 3, "g_1_1": -1, "h_1_1": -2}
    assert p_hat(initial("std3"), "phi_1_1", 0) == {}
    assert p_hat(initial("std2"), "phi_1_1", 1) == {"c_1": 2, "g_1_1": -1, "h_1_1": -1}


def test_p_hat_errors():
    seed = initial("std3")
    with pytest.raises(MutationError):
        p_hat(seed, "h_2_2", 0)
    with pytest.raises(MutationError):
        p_hat(seed, "phi_1_1", 4)


# ---------------------------------------------------------------------------
# errors and the trace log
# ---------------------------------------------------------------------------


def test_mutate_rejects_stable_vertices():
    seed = initial("std3")
    with pytest.raises(MutationError):
        mutate(seed, "g_1_1")
    with pytest.raises(MutationError):
        mutate(seed, "c_1")


def test_trace_log_lines():
    seed = initial("std3")
    buf = io.StringIO()
    m = mutate(seed, "h_2_2", trace=buf)
    mutate(m, "h_3_3", trace=buf)
    lines = [json.loads(ln) for ln in buf.getvalue().splitlines()]
    assert [ln["step"] for ln in lines] == [1, 2]
    assert lines[0]["direction"] == "h_2_2"
    assert lines[0]["new"] == "h_2_2'"
    assert lines[0]["numerator_terms"] > 1
    assert lines[0]["result_terms"] >= 1
    assert lines[0]["ms"] >= 0


# ---------------------------------------------------------------------------
# random walks stay polynomial
# ---------------------------------------------------------------------------


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(min_value=0, max_value=2), min_size=1, max_size=4))
def test_random_walks_n2(choices):
    # every step must divide exactly, and each intermediate Seed re-checks
    # skewness and divisibility on construction
    seed = initial("std2")
    for c in choices:
        names = seed.mutable_names
        seed = mutate(seed, names[c % len(names)])
    assert sorted(seed.ds.values()) == [2]
    for k in seed.mutable_names:
        assert row_gcd(seed, k) in (1, 2)
        for iso in seed.isolated_names:
            assert seed.b(k, iso) == 0
