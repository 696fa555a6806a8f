"""Tests for L-matrix assembly against the printed 6x6 examples."""

import itertools

import pytest

from gcdouble.bd import BDPair, BDTriple, maximal_paths
from gcdouble.exactalg import context
from gcdouble.lmatrix import (
    LMatrixError,
    build_all,
    build_l,
    locate_diagonal,
)

L1_EXPECTED = "\n".join([
    "[x41 x42 x43 0 0 0]",
    "[y12 y13 y14 0 0 0]",
    "[y22 y23 y24 x11 x12 x13]",
    "[y32 y33 y34 x21 x22 x23]",
    "[y42 y43 y44 x31 x32 x33]",
    "[0 0 0 x41 x42 x43]",
])

L2_EXPECTED = "\n".join([
    "[y12 y13 y14 0 0 0]",
    "[y22 y23 y24 x11 x12 x13]",
    "[y32 y33 y34 x21 x22 x23]",
    "[y42 y43 y44 x31 x32 x33]",
    "[0 0 0 x41 x42 x43]",
    "[0 0 0 y12 y13 y14]",
])


def test_cg4_l1_exact():
    lm = build_all(BDPair.cremmer_gervais(4))[0]
    assert lm.size == 6
    assert lm.render() == L1_EXPECTED


def test_cg4_l2_exact():
    lm = build_all(BDPair.cremmer_gervais(4))[1]
    assert lm.size == 6
    assert lm.render() == L2_EXPECTED


def test_cg4_diagonal_variables():
    l1, l2 = build_all(BDPair.cremmer_gervais(4))
    assert l1.diagonal_variable(1) == "x41"
    assert l1.diagonal_variable(4) == "x21"
    assert l2.diagonal_variable(6) == "y14"
    assert [l1.diagonal_variable(s) for s in range(1, 7)] == [
        "x41", "y13", "y24", "x21", "x32", "x43",
    ]
    assert [l2.diagonal_variable(s) for s in range(1, 7)] == [
        "y12", "y23", "y34", "x31", "x42", "y14",
    ]
    with pytest.raises(LMatrixError, match="outside"):
        l1.diagonal_variable(7)


def test_cg4_blocks_and_exits():
    l1, l2 = build_all(BDPair.cremmer_gervais(4))
    kinds = [(b.kind, b.edge, b.t_index, b.exit_name, b.exit_slot) for b in l1.blocks]
    assert kinds == [
        ("X", (3, 1), 1, "x21", 4),
        ("Y", (2, 2), 1, "y13", 2),
        ("X", (1, 3), 2, "x41", 1),
    ]
    kinds = [(b.kind, b.edge, b.t_index, b.exit_name, b.exit_slot) for b in l2.blocks]
    assert kinds == [
        ("Y", (1, 3), 0, "y14", 6),
        ("X", (2, 2), 1, "x31", 4),
        ("Y", (3, 1), 1, "y12", 1),
    ]
    assert l1.blocks[0].src_rows == (1, 4) and l1.blocks[0].src_cols == (1, 3)
    assert l1.blocks[1].src_rows == (1, 4) and l1.blocks[1].src_cols == (2, 4)
    assert l1.blocks[2].src_rows == (4, 4) and l1.blocks[2].src_cols == (1, 3)


def test_cg4_block_intervals():
    l1, l2 = build_all(BDPair.cremmer_gervais(4))
    t1, t2 = l1.block_intervals()
    assert t1["K"] == (3, 6) and t1["L"] == (4, 6)
    assert t1["Kbar"] == (2, 5) and t1["Lbar"] == (1, 3)
    assert t1["Phi"] == (3, 5) and t1["Psi"] is None
    assert t2["K"] == (1, 1) and t2["L"] == (1, 3)
    assert t2["Kbar"] is None and t2["Phi"] is None
    assert t2["Psi"] == (1, 3)
    (u1,) = l2.block_intervals()
    assert u1["K"] == (2, 5) and u1["Kbar"] == (1, 4)
    assert u1["Phi"] == (2, 4) and u1["Psi"] == (4, 6)


def test_standard_single_blocks():
    for n in (2, 3, 4, 5):
        pair = BDPair.standard(n)
        lms = build_all(pair)
        assert len(lms) == 2 * (n - 1)
        for k in range(1, n):
            lm = lms[k - 1]
            assert lm.size == k
            (b,) = lm.blocks
            assert b.kind == "X"
            assert b.src_rows == (n - k + 1, n) and b.src_cols == (1, k)
            assert lm.diagonal_variable(1) == f"x{n - k + 1}1"
            lm = lms[n - 1 + k - 1]
            assert lm.size == k
            (b,) = lm.blocks
            assert b.kind == "Y"
            assert b.src_rows == (1, k) and b.src_cols == (n - k + 1, n)


def test_build_l_rejects_foreign_path():
    pair = BDPair.cremmer_gervais(4)
    other = maximal_paths(BDPair.standard(4))[0]
    with pytest.raises(LMatrixError, match="does not belong"):
        build_l(pair, other)


def _all_triples(n):
    roots = range(1, n)
    out = []
    for dom_mask in itertools.product([0, 1], repeat=n - 1):
        dom = [r for r, m in zip(roots, dom_mask) if m]
        for image in itertools.permutations(roots, len(dom)):
            try:
                out.append(BDTriple(n, dict(zip(dom, image))))
            except Exception:
                pass
    return out


def test_diagonal_census_exhaustive_n4():
    """Across all L-matrices of a pair, each strictly-lower x and strictly-upper
    y variable appears on a diagonal exactly once."""
    n = 4
    lower_x = {("x", i, j) for i in range(1, n + 1) for j in range(1, i)}
    upper_y = {("y", i, j) for j in range(1, n + 1) for i in range(1, j)}
    triples = _all_triples(n)
    for row, col in itertools.product(triples, triples):
        pair = BDPair(row, col)
        if not pair.is_aperiodic():
            continue
        lms = build_all(pair)
        seen = []
        for lm in lms:
            seen.extend(lm.diagonal_labels())
        assert sorted(seen) == sorted(lower_x | upper_y)


def test_diagonal_census_cg5():
    pair = BDPair.cremmer_gervais(5)
    seen = []
    for lm in build_all(pair):
        seen.extend(lm.diagonal_labels())
    expect = [("x", i, j) for i in range(1, 6) for j in range(1, i)]
    expect += [("y", i, j) for j in range(1, 6) for i in range(1, j)]
    assert sorted(seen) == sorted(expect)


def test_locate_diagonal():
    lms = build_all(BDPair.cremmer_gervais(4))
    assert locate_diagonal(lms, "x", 2, 1) == (0, 4)
    assert locate_diagonal(lms, "y", 1, 4) == (1, 6)
    with pytest.raises(LMatrixError, match="expected exactly one"):
        locate_diagonal(lms, "x", 1, 1)


def test_to_poly_matrix_and_det():
    ctx = context(3)
    pair = BDPair.standard(3)
    lm = build_all(pair)[1]  # X^{[1,2]}_{[2,3]}
    pm = lm.to_poly_matrix(ctx)
    assert pm.render() == "[x21 x22]\n[x31 x32]"
    det = pm.det()
    assert det == ctx.x(2, 1) * ctx.x(3, 2) - ctx.x(2, 2) * ctx.x(3, 1)


def test_json_export():
    lm = build_all(BDPair.cremmer_gervais(4))[0]
    blob = lm.to_json()
    assert blob["size"] == 6
    assert blob["grid"][0] == ["x41", "x42", "x43", "0", "0", "0"]
    assert blob["blocks"][0]["exit"] == "x21"
    assert blob["path"].startswith("3 -X-> 1")
