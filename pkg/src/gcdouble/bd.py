"""Belavin-Drinfeld combinatorics: triples, pairs, runs, graphs and paths.

A BD triple on the simple roots [1, n-1] is (Gamma1, Gamma2, gamma) with
gamma : Gamma1 -> Gamma2 a nilpotent isometry.  Only oriented triples are
supported: whenever i and i+1 both lie in Gamma1, gamma(i+1) = gamma(i) + 1.
A BD pair is a row triple together with a column triple for the same n.

The module also owns everything derived purely from that combinatorics:

* run decompositions of [1, n] (X-runs from Gamma1, Y-runs from Gamma2);
* the BD graph of a pair and its maximal alternating paths, in the
  deterministic order "upper starts ascending, then lower starts ascending";
  periodic pairs are rejected with an error that spells out a cycle;
* the linear maps gamma and gamma* on gl_n (block copies along nontrivial
  runs, zero elsewhere), their group lifts on unipotent matrices, and the
  projections onto the block subalgebras spanned by nontrivial runs.

Pairs serialize to JSON as {"n": n, "row": {"gamma": {...}}, "col": ...}
with string keys inside the gamma maps; validation is eager and total.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Set, Tuple, Union

__all__ = [
    "AltPath",
    "BDError",
    "BDPair",
    "BDTriple",
    "RunDecomposition",
    "compute_runs",
    "gamma_apply",
    "group_lift",
    "maximal_paths",
    "project_onto_runs",
    "run_support",
]


class BDError(Exception):
    """Raised for malformed triples, pairs, or periodic BD graphs."""


# ---------------------------------------------------------------------------
# triples and pairs
# ---------------------------------------------------------------------------


class BDTriple:
    """An oriented BD triple, stored as the root map gamma.

    gamma is a dict {i: j} meaning gamma(i) = j.  Validation happens on
    construction: domain and image inside [1, n-1], injectivity, the isometry
    property (adjacency of roots is preserved both ways), orientation, and
    nilpotency (every orbit eventually leaves Gamma1).
    """

    def __init__(self, n: int, gamma: Mapping[int, int]):
        if n < 1:
            raise BDError(f"matrix size n={n} must be positive")
        g = {}
        for i, j in gamma.items():
            i, j = int(i), int(j)
            if not (1 <= i <= n - 1) or not (1 <= j <= n - 1):
                raise BDError(
                    f"gamma({i}) = {j} falls outside the simple roots [1, {n - 1}]"
                )
            g[i] = j
        if len(set(g.values())) != len(g):
            raise BDError("gamma must be injective")
        dom = sorted(g)
        for a in dom:
            for b in dom:
                if a < b and ((b - a == 1) != (abs(g[b] - g[a]) == 1)):
                    raise BDError(
                        f"gamma is not an isometry: roots {a},{b} map to {g[a]},{g[b]}"
                    )
        for i in dom:
            if i + 1 in g and g[i + 1] != g[i] + 1:
                raise BDError(
                    f"triple is not oriented: gamma({i + 1}) = {g[i + 1]} != gamma({i}) + 1"
                )
        for start in dom:
            seen = set()
            i = start
            while i in g:
                if i in seen:
                    raise BDError(f"gamma is not nilpotent: orbit of {start} cycles")
                seen.add(i)
                i = g[i]
        self.n = n
        self.gamma: Dict[int, int] = dict(sorted(g.items()))
        self.gamma1: Tuple[int, ...] = tuple(sorted(g))
        self.gamma2: Tuple[int, ...] = tuple(sorted(g.values()))
        self._inverse: Dict[int, int] = {j: i for i, j in g.items()}

    # -- basic maps ---------------------------------------------------------

    def apply_root(self, i: int) -> Optional[int]:
        return self.gamma.get(i)

    def invert_root(self, j: int) -> Optional[int]:
        return self._inverse.get(j)

    def opposite(self) -> "BDTriple":
        """The triple (Gamma2, Gamma1, gamma^{-1})."""
        return BDTriple(self.n, self._inverse)

    def is_standard(self) -> bool:
        return not self.gamma

    # -- run endpoints (shared by runs and L-matrix construction) -----------

    def minus(self, i: int, part: int = 1) -> int:
        """max{j in [0,n] minus Gamma_part with j < i}."""
        excluded = set(self.gamma1 if part == 1 else self.gamma2)
        for j in range(i - 1, -1, -1):
            if j not in excluded:
                return j
        raise BDError(f"no admissible j below {i}")

    def plus(self, i: int, part: int = 1) -> int:
        """min{j in [1,n] minus Gamma_part with j >= i}."""
        excluded = set(self.gamma1 if part == 1 else self.gamma2)
        for j in range(i, self.n + 1):
            if j not in excluded:
                return j
        raise BDError(f"no admissible j above {i}")

    # -- misc ---------------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BDTriple):
            return NotImplemented
        return self.n == other.n and self.gamma == other.gamma

    def __hash__(self) -> int:
        return hash((self.n, tuple(sorted(self.gamma.items()))))

    def __repr__(self) -> str:
        body = ", ".join(f"{i}->{j}" for i, j in self.gamma.items()) or "empty"
        return f"BDTriple(n={self.n}, {body})"

    @staticmethod
    def standard(n: int) -> "BDTriple":
        return BDTriple(n, {})

    @staticmethod
    def cremmer_gervais(n: int) -> "BDTriple":
        """gamma(i) = i + 1 on [1, n-2]."""
        return BDTriple(n, {i: i + 1 for i in range(1, n - 1)})


class BDPair:
    """A row BD triple and a column BD triple for the same n."""

    def __init__(self, row: BDTriple, col: BDTriple):
        if row.n != col.n:
            raise BDError(f"row and column triples disagree on n: {row.n} vs {col.n}")
        self.n = row.n
        self.row = row
        self.col = col

    def opposite(self) -> "BDPair":
        """The opposite pair: triples swapped and individually opposed."""
        return BDPair(self.col.opposite(), self.row.opposite())

    def is_standard(self) -> bool:
        return self.row.is_standard() and self.col.is_standard()

    def is_aperiodic(self) -> bool:
        try:
            maximal_paths(self)
        except BDError:
            return False
        return True

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BDPair):
            return NotImplemented
        return self.row == other.row and self.col == other.col

    def __hash__(self) -> int:
        return hash((self.row, self.col))

    def __repr__(self) -> str:
        return f"BDPair(n={self.n}, row={self.row.gamma}, col={self.col.gamma})"

    # -- serialization ------------------------------------------------------

    @staticmethod
    def from_json(data: Union[str, Mapping]) -> "BDPair":
        if isinstance(data, str):
            try:
                data = json.loads(data)
            except json.JSONDecodeError as e:
                raise BDError(f"invalid JSON for BD pair: {e}") from None
        if not isinstance(data, Mapping):
            raise BDError("BD pair JSON must be an object")
        try:
            n = int(data["n"])
        except (KeyError, TypeError, ValueError):
            raise BDError('BD pair JSON needs an integer field "n"') from None
        triples = {}
        for side in ("row", "col"):
            block = data.get(side, {})
            if not isinstance(block, Mapping):
                raise BDError(f'field "{side}" must be an object')
            gamma = block.get("gamma", {})
            if not isinstance(gamma, Mapping):
                raise BDError(f'field "{side}.gamma" must be an object')
            parsed = {}
            for k, v in gamma.items():
                try:
                    parsed[int(k)] = int(v)
                except (TypeError, ValueError):
                    raise BDError(f"bad gamma entry {k!r}: {v!r}") from None
            triples[side] = BDTriple(n, parsed)
        return BDPair(triples["row"], triples["col"])

    def to_json(self) -> Dict:
        return {
            "n": self.n,
            "row": {"gamma": {str(i): j for i, j in self.row.gamma.items()}},
            "col": {"gamma": {str(i): j for i, j in self.col.gamma.items()}},
        }

    @staticmethod
    def standard(n: int) -> "BDPair":
        return BDPair(BDTriple.standard(n), BDTriple.standard(n))

    @staticmethod
    def cremmer_gervais(n: int) -> "BDPair":
        return BDPair(BDTriple.cremmer_gervais(n), BDTriple.cremmer_gervais(n))


# ---------------------------------------------------------------------------
# runs
# ---------------------------------------------------------------------------


Interval = Tuple[int, int]


@dataclass(frozen=True)
class RunDecomposition:
    """X- and Y-runs of a triple, plus the bijection on nontrivial runs.

    Intervals are (a, b) with both ends included.  `pairing` maps the index
    of a nontrivial X-run (position in x_runs) to the index of its Y-run.
    """

    n: int
    x_runs: Tuple[Interval, ...]
    y_runs: Tuple[Interval, ...]
    pairing: Tuple[Tuple[int, int], ...]

    def x_run_of(self, i: int) -> Interval:
        for a, b in self.x_runs:
            if a <= i <= b:
                return (a, b)
        raise BDError(f"{i} outside [1, {self.n}]")

    def y_run_of(self, i: int) -> Interval:
        for a, b in self.y_runs:
            if a <= i <= b:
                return (a, b)
        raise BDError(f"{i} outside [1, {self.n}]")

    def nontrivial_pairs(self) -> List[Tuple[Interval, Interval]]:
        return [(self.x_runs[i], self.y_runs[j]) for i, j in self.pairing]

    def render(self) -> str:
        xs = ", ".join(f"[{a},{b}]" if a != b else f"[{a}]" for a, b in self.x_runs)
        ys = ", ".join(f"[{a},{b}]" if a != b else f"[{a}]" for a, b in self.y_runs)
        return f"X-runs: {xs}; Y-runs: {ys}"


def _runs_from_excluded(n: int, excluded: Sequence[int]) -> Tuple[Interval, ...]:
    ends = [j for j in range(1, n + 1) if j not in set(excluded)]
    runs = []
    left = 1
    for e in ends:
        runs.append((left, e))
        left = e + 1
    return tuple(runs)


def compute_runs(triple: BDTriple) -> RunDecomposition:
    """Run decomposition of [1, n] for one triple.

    X-runs come from Gamma1, Y-runs from Gamma2; gamma induces a bijection
    between the nontrivial ones, recovered here through the image of the
    leftmost root of each nontrivial X-run.
    """
    n = triple.n
    x_runs = _runs_from_excluded(n, triple.gamma1)
    y_runs = _runs_from_excluded(n, triple.gamma2)
    pairing = []
    for xi, (a, b) in enumerate(x_runs):
        if b == a:
            continue
        image_left = triple.gamma[a]
        for yi, (c, d) in enumerate(y_runs):
            if c <= image_left <= d:
                if d - c != b - a:
                    raise BDError(
                        f"run {x_runs[xi]} maps onto {y_runs[yi]} of different length"
                    )
                pairing.append((xi, yi))
                break
    return RunDecomposition(n, x_runs, y_runs, tuple(pairing))


# ---------------------------------------------------------------------------
# BD graph paths
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AltPath:
    """A maximal alternating path in the BD graph of a pair.

    edges is a tuple of steps in traversal order; each step is one of
      ("X", i, i2)    horizontal edge in the upper part, traversed i -> i2,
      ("Y", j, j2)    horizontal edge in the lower part, traversed j -> j2,
      ("gr", i, j)    vertical edge downwards, gamma_r(i) = j,
      ("gc*", j, i)   vertical edge upwards, gamma_c(i) = j.
    Paths always start and end with a horizontal edge.
    """

    edges: Tuple[Tuple[str, int, int], ...]

    @property
    def start(self) -> Tuple[str, int]:
        kind, a, _ = self.edges[0]
        return ("upper" if kind == "X" else "lower", a)

    def vertices(self) -> List[int]:
        out = [self.edges[0][1]]
        for kind, _, b in self.edges:
            out.append(b)
        return out

    def horizontal_edges(self) -> List[Tuple[str, int, int]]:
        return [e for e in self.edges if e[0] in ("X", "Y")]

    def vertical_edges(self) -> List[Tuple[str, int, int]]:
        return [e for e in self.edges if e[0] in ("gr", "gc*")]

    def render(self) -> str:
        bits = [str(self.edges[0][1])]
        for kind, _, b in self.edges:
            bits.append(f"-{kind}-> {b}")
        return " ".join(bits)


def _walk(pair: BDPair, part: str, vertex: int, max_steps: int) -> List[Tuple[str, int, int]]:
    """Follow the alternating path forward from a start vertex."""
    n = pair.n
    edges: List[Tuple[str, int, int]] = []
    steps = 0
    while True:
        steps += 1
        if steps > max_steps:
            raise BDError("alternating walk failed to terminate")  # pragma: no cover
        far = n - vertex
        if part == "upper":
            edges.append(("X", vertex, far))
            j = pair.row.apply_root(far)
            if j is None:
                return edges
            edges.append(("gr", far, j))
            part, vertex = "lower", j
        else:
            edges.append(("Y", vertex, far))
            i = pair.col.invert_root(far)
            if i is None:
                return edges
            edges.append(("gc*", far, i))
            part, vertex = "upper", i


def _find_cycle(pair: BDPair) -> Optional[AltPath]:
    """Return an alternating cycle if one exists."""
    n = pair.n
    for start in range(1, n):
        part, vertex = "upper", start
        edges: List[Tuple[str, int, int]] = []
        for _ in range(4 * n):
            far = n - vertex
            if part == "upper":
                edges.append(("X", vertex, far))
                j = pair.row.apply_root(far)
                if j is None:
                    break
                edges.append(("gr", far, j))
                part, vertex = "lower", j
            else:
                edges.append(("Y", vertex, far))
                i = pair.col.invert_root(far)
                if i is None:
                    break
                edges.append(("gc*", far, i))
                part, vertex = "upper", i
            if part == "upper" and vertex == start:
                return AltPath(tuple(edges))
        else:  # pragma: no cover
            raise BDError("cycle search failed to terminate")
    return None


def maximal_paths(pair: BDPair) -> List[AltPath]:
    """All maximal alternating paths, in deterministic order.

    Upper starts (vertices without an incoming gamma_c* edge) come first in
    ascending order, then lower starts (vertices without an incoming gamma_r
    edge) ascending.  A periodic pair raises BDError naming a cycle.
    """
    cycle = _find_cycle(pair)
    if cycle is not None:
        raise BDError(
            "the BD pair is periodic: alternating cycle " + cycle.render()
        )
    n = pair.n
    gamma1_col = set(pair.col.gamma1)
    gamma2_row = set(pair.row.gamma2)
    paths = []
    max_steps = 8 * n * n + 8
    for i in range(1, n):
        if i not in gamma1_col:
            paths.append(AltPath(tuple(_walk(pair, "upper", i, max_steps))))
    for j in range(1, n):
        if j not in gamma2_row:
            paths.append(AltPath(tuple(_walk(pair, "lower", j, max_steps))))
    return paths


# ---------------------------------------------------------------------------
# gamma as an operator on gl_n
# ---------------------------------------------------------------------------


Rows = Sequence[Sequence[object]]


def _zero_like(mat: Rows):
    z = mat[0][0] * 0
    m = len(mat)
    return [[z for _ in range(m)] for _ in range(m)]


def gamma_apply(triple: BDTriple, mat: Rows, star: bool = False) -> List[List[object]]:
    """Apply gamma (or gamma*) to an n x n matrix over any scalar ring.

    gamma copies the diagonal block of each nontrivial X-run to the block of
    the corresponding Y-run and kills everything else; gamma* is the adjoint,
    copying Y-run blocks back to X-run blocks.
    """
    n = triple.n
    if len(mat) != n or any(len(row) != n for row in mat):
        raise BDError(f"gamma_apply expects an {n} x {n} matrix")
    out = _zero_like(mat)
    runs = compute_runs(triple)
    for (a, b), (c, d) in runs.nontrivial_pairs():
        size = b - a
        for r in range(size + 1):
            for s in range(size + 1):
                if star:
                    out[a - 1 + r][a - 1 + s] = mat[c - 1 + r][c - 1 + s]
                else:
                    out[c - 1 + r][c - 1 + s] = mat[a - 1 + r][a - 1 + s]
    return out


def group_lift(triple: BDTriple, mat: Rows, star: bool = False) -> List[List[object]]:
    """Lift gamma to unipotent matrices: N maps to gamma(N - I) + I."""
    n = triple.n
    shifted = [list(row) for row in mat]
    for i in range(n):
        shifted[i][i] = shifted[i][i] - 1
    out = gamma_apply(triple, shifted, star=star)
    for i in range(n):
        out[i][i] = out[i][i] + 1
    return out


def run_support(triple: BDTriple, part: int = 1) -> Set[Tuple[int, int]]:
    """1-based entry positions of the block subalgebra of nontrivial runs.

    part=1 gives the X-run blocks (the subalgebra g_{Gamma_1}), part=2 the
    Y-run blocks (g_{Gamma_2}).
    """
    runs = compute_runs(triple)
    intervals = [xr if part == 1 else yr for xr, yr in runs.nontrivial_pairs()]
    support: Set[Tuple[int, int]] = set()
    for a, b in intervals:
        for i in range(a, b + 1):
            for j in range(a, b + 1):
                support.add((i, j))
    return support


def project_onto_runs(
    triple: BDTriple, mat: Rows, part: int = 1, complement: bool = False
) -> List[List[object]]:
    """Entrywise projection onto the run-block support or its complement."""
    n = triple.n
    if len(mat) != n or any(len(row) != n for row in mat):
        raise BDError(f"projection expects an {n} x {n} matrix")
    support = run_support(triple, part)
    out = _zero_like(mat)
    for i in range(n):
        for j in range(n):
            inside = (i + 1, j + 1) in support
            if inside != complement:
                out[i][j] = mat[i][j]
    return out
