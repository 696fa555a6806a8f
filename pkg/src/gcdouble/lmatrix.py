"""Assembly of the L-matrix attached to each maximal alternating path.

Every horizontal edge of the path contributes a submatrix of X or Y:

* an upper edge traversed i -> i' gives the X-block X^{[1,beta]}_{[alpha,n]}
  with beta = i_+(Gamma_1^c) and alpha = (i'+1)_-(Gamma_1^r) + 1
  (superscript = columns, subscript = rows, both inclusive);
* a lower edge j' -> j gives the Y-block Y^{[bbeta,n]}_{[1,balpha]} with
  bbeta = (j+1)_-(Gamma_2^c) + 1 and balpha = j'_+(Gamma_2^r).

The first block sits in the bottom right corner.  After an X-block for an
edge ending at i with gamma_r(i) = j, the next Y-block goes to the left so
that y_{jn} and x_{i1} are adjacent in the same row; after a Y-block ending
at j with gamma_c*(j) = i, the next X-block goes on top so that x_{ni} and
y_{1j} are adjacent in the same column.

Blocks carry the bookkeeping used downstream: the interval K_t/L_t (rows and
columns occupied by the t-th X-block), Kbar_t/Lbar_t (same for Y-blocks),
the overlaps Phi_t = K_t cap Kbar_t and Psi_t = L_t cap Lbar_{t-1}, and the
exit point of each block ((i+1,1) in X for an edge ending at i, (1,j+1) in Y
for an edge ending at j), whose variable always lands on the main diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .bd import AltPath, BDError, BDPair, maximal_paths
from .exactalg import Context, PolyMatrix

__all__ = [
    "Block",
    "LMatrix",
    "LMatrixError",
    "build_all",
    "build_l",
    "locate_diagonal",
]


class LMatrixError(Exception):
    """Internal inconsistency while assembling an L-matrix."""


Label = Tuple[str, int, int]
Interval = Tuple[int, int]


@dataclass(frozen=True)
class Block:
    """One X- or Y-block placed inside an L-matrix.

    Row and column data are 1-based inclusive intervals; `rows`/`cols` refer
    to positions in the L-matrix, `src_rows`/`src_cols` to the source matrix.
    `t_index` follows the convention that X-blocks are numbered 1, 2, ... in
    path order and each Y-block shares the index of the row-aligned X-block
    (a Y-block opening the path gets index 0).
    """

    kind: str
    edge: Tuple[int, int]
    rows: Interval
    cols: Interval
    src_rows: Interval
    src_cols: Interval
    t_index: int
    exit_src: Tuple[int, int]
    exit_slot: int

    @property
    def exit_name(self) -> str:
        i, j = self.exit_src
        return f"{self.kind.lower()}{i}{j}"


class LMatrix:
    """The matrix of one maximal alternating path, with block records."""

    def __init__(self, pair: BDPair, path: AltPath, size: int,
                 blocks: Tuple[Block, ...], grid: Tuple[Tuple[Optional[Label], ...], ...]):
        self.pair = pair
        self.path = path
        self.size = size
        self.blocks = blocks
        self.grid = grid
        self._slots: Dict[Label, int] = {}
        for s in range(size):
            lab = grid[s][s]
            if lab is None:
                raise LMatrixError(f"zero entry on the diagonal at slot {s + 1}")
            if lab in self._slots:
                raise LMatrixError(f"variable {lab} occupies two diagonal slots")
            self._slots[lab] = s + 1

    # -- entries ------------------------------------------------------------

    def entry_name(self, r: int, c: int) -> Optional[str]:
        """Variable name at 1-based (r, c), or None for a structural zero."""
        lab = self.grid[r - 1][c - 1]
        if lab is None:
            return None
        return f"{lab[0]}{lab[1]}{lab[2]}"

    def diagonal_variable(self, s: int) -> str:
        if not (1 <= s <= self.size):
            raise LMatrixError(f"slot {s} outside [1, {self.size}]")
        name = self.entry_name(s, s)
        assert name is not None
        return name

    def diagonal_labels(self) -> List[Label]:
        return [self.grid[s][s] for s in range(self.size)]

    def slot_of(self, letter: str, i: int, j: int) -> Optional[int]:
        """Diagonal slot holding letter_{ij}, or None."""
        return self._slots.get((letter, i, j))

    # -- views --------------------------------------------------------------

    def to_poly_matrix(self, ctx: Context) -> PolyMatrix:
        rows = []
        for r in range(self.size):
            row = []
            for c in range(self.size):
                lab = self.grid[r][c]
                if lab is None:
                    row.append(ctx.zero)
                elif lab[0] == "x":
                    row.append(ctx.x(lab[1], lab[2]))
                else:
                    row.append(ctx.y(lab[1], lab[2]))
            rows.append(row)
        return PolyMatrix(ctx, rows)

    def render(self) -> str:
        lines = []
        for r in range(1, self.size + 1):
            cells = [self.entry_name(r, c) or "0" for c in range(1, self.size + 1)]
            lines.append("[" + " ".join(cells) + "]")
        return "\n".join(lines)

    def block_intervals(self) -> List[Dict[str, Optional[Interval]]]:
        """K_t, L_t, Kbar_t, Lbar_t, Phi_t, Psi_t for t = 1..(number of X-blocks).

        Phi_t is the row overlap of X_t with Y_t, Psi_t the column overlap of
        X_t with Y_{t-1}; missing blocks give None intervals and empty overlaps.
        """
        xs = {b.t_index: b for b in self.blocks if b.kind == "X"}
        ys = {b.t_index: b for b in self.blocks if b.kind == "Y"}

        def cap(a: Optional[Interval], b: Optional[Interval]) -> Optional[Interval]:
            if a is None or b is None:
                return None
            lo, hi = max(a[0], b[0]), min(a[1], b[1])
            return (lo, hi) if lo <= hi else None

        out = []
        for t in sorted(xs):
            xb = xs[t]
            yb = ys.get(t)
            prev = ys.get(t - 1)
            out.append({
                "t": t,
                "K": xb.rows,
                "L": xb.cols,
                "Kbar": yb.rows if yb else None,
                "Lbar": yb.cols if yb else None,
                "Phi": cap(xb.rows, yb.rows if yb else None),
                "Psi": cap(xb.cols, prev.cols if prev else None),
            })
        return out

    def to_json(self) -> Dict:
        return {
            "size": self.size,
            "path": self.path.render(),
            "blocks": [
                {
                    "kind": b.kind,
                    "edge": list(b.edge),
                    "rows": list(b.rows),
                    "cols": list(b.cols),
                    "src_rows": list(b.src_rows),
                    "src_cols": list(b.src_cols),
                    "t": b.t_index,
                    "exit": b.exit_name,
                    "exit_slot": b.exit_slot,
                }
                for b in self.blocks
            ],
            "grid": [
                [self.entry_name(r, c) or "0" for c in range(1, self.size + 1)]
                for r in range(1, self.size + 1)
            ],
        }

    def __repr__(self) -> str:
        return f"LMatrix(size={self.size}, path={self.path.render()!r})"


def _block_shape(pair: BDPair, kind: str, frm: int, to: int):
    """Source row and column intervals of the block for one horizontal edge."""
    n = pair.n
    if kind == "X":
        beta = pair.col.plus(frm, part=1)
        alpha = pair.row.minus(to + 1, part=1) + 1
        return (alpha, n), (1, beta)
    bbeta = pair.col.minus(to + 1, part=2) + 1
    balpha = pair.row.plus(frm, part=2)
    return (1, balpha), (bbeta, n)


def build_l(pair: BDPair, path: AltPath) -> LMatrix:
    """Assemble the L-matrix of one maximal alternating path of the pair."""
    if path not in maximal_paths(pair):
        raise LMatrixError("path does not belong to the pair")
    n = pair.n

    # place blocks in a floating coordinate system, first block anchored
    # with its bottom right corner at (0, 0)
    placed = []  # (kind, frm, to, top, left, src_rows, src_cols)
    edges = list(path.edges)
    pos = 0
    while pos < len(edges):
        kind, frm, to = edges[pos]
        src_rows, src_cols = _block_shape(pair, kind, frm, to)
        height = src_rows[1] - src_rows[0] + 1
        width = src_cols[1] - src_cols[0] + 1
        if not placed:
            top, left = 1 - height, 1 - width
        else:
            pkind, pfrm, pto, ptop, pleft, psrc_rows, psrc_cols = placed[-1]
            if pkind == "X":
                # rule 1: y_{jn} left of x_{i1} in the same row (j = frm, i = pto)
                anchor_r = ptop + (pto - psrc_rows[0])
                anchor_c = pleft - 1
                top = anchor_r - (frm - src_rows[0])
                left = anchor_c - (n - src_cols[0])
            else:
                # rule 2: x_{ni} above y_{1j} in the same column (i = frm, j = pto)
                anchor_r = ptop - 1
                anchor_c = pleft + (pto - psrc_cols[0])
                top = anchor_r - (n - src_rows[0])
                left = anchor_c - (frm - src_cols[0])
        placed.append((kind, frm, to, top, left, src_rows, src_cols))
        pos += 2  # skip the vertical edge

    min_r = min(p[3] for p in placed)
    min_c = min(p[4] for p in placed)
    max_r = max(p[3] + (p[5][1] - p[5][0]) for p in placed)
    max_c = max(p[4] + (p[6][1] - p[6][0]) for p in placed)
    size_r = max_r - min_r + 1
    size_c = max_c - min_c + 1
    if size_r != size_c:
        raise LMatrixError(f"assembled matrix is {size_r} x {size_c}, not square")
    size = size_r
    if size != sum(path.vertices()[::2]):
        raise LMatrixError("size disagrees with the odd-position vertex sum")

    grid: List[List[Optional[Label]]] = [[None] * size for _ in range(size)]
    blocks = []
    t_index = 0
    for kind, frm, to, top, left, src_rows, src_cols in placed:
        if kind == "X":
            t_index += 1
        top -= min_r
        left -= min_c
        letter = kind.lower()
        for r in range(src_rows[0], src_rows[1] + 1):
            for c in range(src_cols[0], src_cols[1] + 1):
                rr = top + (r - src_rows[0])
                cc = left + (c - src_cols[0])
                if grid[rr][cc] is not None:
                    raise LMatrixError(
                        f"blocks overlap at ({rr + 1}, {cc + 1})"
                    )
                grid[rr][cc] = (letter, r, c)
        if kind == "X":
            exit_src = (to + 1, 1)
            er = top + (exit_src[0] - src_rows[0])
            ec = left
        else:
            exit_src = (1, to + 1)
            er = top
            ec = left + (exit_src[1] - src_cols[0])
        if er != ec:
            raise LMatrixError(
                f"exit point {kind.lower()}{exit_src[0]}{exit_src[1]} off the diagonal"
            )
        blocks.append(Block(
            kind=kind,
            edge=(frm, to),
            rows=(top + 1, top + src_rows[1] - src_rows[0] + 1),
            cols=(left + 1, left + src_cols[1] - src_cols[0] + 1),
            src_rows=src_rows,
            src_cols=src_cols,
            t_index=t_index,
            exit_src=exit_src,
            exit_slot=er + 1,
        ))

    return LMatrix(pair, path, size, tuple(blocks),
                   tuple(tuple(row) for row in grid))


def build_all(pair: BDPair) -> List[LMatrix]:
    """L-matrices of all maximal paths, in path enumeration order."""
    return [build_l(pair, path) for path in maximal_paths(pair)]


def locate_diagonal(lmats: List[LMatrix], letter: str, i: int, j: int) -> Tuple[int, int]:
    """Find the unique (matrix index, slot) with letter_{ij} on the diagonal."""
    hits = []
    for idx, lm in enumerate(lmats):
        s = lm.slot_of(letter, i, j)
        if s is not None:
            hits.append((idx, s))
    if len(hits) != 1:
        raise LMatrixError(
            f"{letter}{i}{j} found on {len(hits)} diagonals, expected exactly one"
        )
    return hits[0]
